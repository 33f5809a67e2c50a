//! Domino shuffling: destruction, sliding and creation, plus the reverse map
//! and predecessor counting.
//!
//! One forward step turns a tiling of the order-`n-1` diamond into a tiling
//! of the order-`n` diamond. Creation is the only random stage; it draws one
//! coin per empty 2x2 hole from a [`CoinSource`], horizontal with
//! probability `p`.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{
    blocks_of, row_span, BlockKind, Cell, CellGrid, Domino, GeometryError, Heading, Orientation,
    PartialTiling, Tiling,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShuffleError {
    #[error("dominoes overlap after sliding at cell {0}")]
    SlideOverlap(Cell),
    #[error("domino {0} left the order-{1} diamond while sliding")]
    SlideOutOfBounds(Domino, u32),
    #[error("empty cell {0} does not start an empty 2x2 square")]
    NotAHole(Cell),
    #[error("hole at {0} cannot hold a block of the required kind")]
    HoleParity(Cell),
    #[error("expected {expected} fill choices, got {got}")]
    ChoiceCount { expected: usize, got: usize },
    #[error("coin tape exhausted at hole {0}")]
    TapeExhausted(Cell),
    #[error("coin tape recorded hole {recorded}, shuffle reached hole {reached}")]
    TapeMismatch { recorded: Cell, reached: Cell },
    #[error("coin tape has {0} unused draws")]
    TapeNotExhausted(usize),
    #[error("bias {0} is outside [0, 1]")]
    InvalidBias(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Supplies the creation coins: `true` fills a hole with two horizontal
/// dominoes, `false` with two vertical ones.
pub trait CoinSource {
    fn horizontal(&mut self, hole: Cell) -> Result<bool, ShuffleError>;
}

/// Independent coins, horizontal with probability `p`.
#[derive(Debug, Clone)]
pub struct BiasedCoins<R> {
    rng: R,
    p: f64,
}

impl<R: Rng> BiasedCoins<R> {
    pub fn new(rng: R, p: f64) -> Result<Self, ShuffleError> {
        check_bias(p)?;
        Ok(BiasedCoins { rng, p })
    }
}

impl BiasedCoins<ChaCha8Rng> {
    pub fn seeded(seed: u64, p: f64) -> Result<Self, ShuffleError> {
        Self::new(ChaCha8Rng::seed_from_u64(seed), p)
    }
}

impl<R: Rng> CoinSource for BiasedCoins<R> {
    fn horizontal(&mut self, _hole: Cell) -> Result<bool, ShuffleError> {
        Ok(self.rng.gen_bool(self.p))
    }
}

pub fn check_bias(p: f64) -> Result<(), ShuffleError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ShuffleError::InvalidBias(p))
    }
}

/// Ordered record of every creation coin of a run, replayable bit-exactly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoinTape {
    pub seed: u64,
    pub draws: Vec<(Cell, bool)>,
}

/// Wraps a coin source and appends every draw to a tape.
pub struct Recording<'a, C> {
    inner: C,
    tape: &'a mut CoinTape,
}

impl<'a, C: CoinSource> Recording<'a, C> {
    pub fn new(inner: C, tape: &'a mut CoinTape) -> Self {
        Recording { inner, tape }
    }
}

impl<C: CoinSource> CoinSource for Recording<'_, C> {
    fn horizontal(&mut self, hole: Cell) -> Result<bool, ShuffleError> {
        let bit = self.inner.horizontal(hole)?;
        self.tape.draws.push((hole, bit));
        Ok(bit)
    }
}

/// Replays a recorded tape, checking each hole against the recording.
pub struct Replay<'a> {
    draws: std::slice::Iter<'a, (Cell, bool)>,
}

impl<'a> Replay<'a> {
    pub fn new(tape: &'a CoinTape) -> Self {
        Replay {
            draws: tape.draws.iter(),
        }
    }
}

impl CoinSource for Replay<'_> {
    fn horizontal(&mut self, hole: Cell) -> Result<bool, ShuffleError> {
        match self.draws.next() {
            None => Err(ShuffleError::TapeExhausted(hole)),
            Some(&(recorded, bit)) if recorded == hole => Ok(bit),
            Some(&(recorded, _)) => Err(ShuffleError::TapeMismatch {
                recorded,
                reached: hole,
            }),
        }
    }
}

/// Removes every bad block.
pub fn destruction(t: &Tiling) -> PartialTiling {
    remove_blocks(t, BlockKind::Bad)
}

fn remove_blocks(t: &Tiling, kind: BlockKind) -> PartialTiling {
    let mut keep = vec![true; t.len()];
    for (a, b) in blocks_of(t.as_partial(), kind) {
        debug_assert!(keep[a] && keep[b], "domino in two blocks");
        keep[a] = false;
        keep[b] = false;
    }
    let survivors: Vec<Domino> = t
        .dominoes()
        .iter()
        .zip(&keep)
        .filter_map(|(&d, &k)| k.then_some(d))
        .collect();
    PartialTiling::from_dominoes(t.order(), &survivors).expect("subset of a tiling")
}

/// Moves every domino one step along its heading (computed at the current
/// order) into the concentric diamond one order larger.
pub fn slide(pt: &PartialTiling) -> Result<PartialTiling, ShuffleError> {
    translate_all(pt, pt.order() + 1, |h| h.offset())
}

fn translate_all(
    pt: &PartialTiling,
    target_order: u32,
    step: impl Fn(Heading) -> (i32, i32),
) -> Result<PartialTiling, ShuffleError> {
    let n = pt.order();
    let mut out = PartialTiling::with_capacity(target_order, pt.len());
    for &d in pt.dominoes() {
        let (dx, dy) = step(d.heading(n));
        let moved = d.translated(dx, dy);
        out.insert(moved).map_err(|e| match e {
            GeometryError::Overlap(c) => ShuffleError::SlideOverlap(c),
            GeometryError::OutOfBounds(d, n) => ShuffleError::SlideOutOfBounds(d, n),
            other => ShuffleError::Geometry(other),
        })?;
    }
    Ok(out)
}

/// Splits the uncovered cells into 2x2 squares.
///
/// Rows are scanned top to bottom, left to right. The first uncovered cell
/// met must be the top-left cell of an uncovered square; the square's
/// lower-left cell is recorded as the hole anchor.
pub fn find_holes(pt: &PartialTiling) -> Result<Vec<Cell>, ShuffleError> {
    let n = pt.order();
    let area = pt.uncovered_area();
    let mut holes = Vec::with_capacity(area / 4);
    if area == 0 {
        return Ok(holes);
    }
    let mut claimed = CellGrid::new(n, false);
    let free = |c: Cell, claimed: &CellGrid<bool>| {
        c.in_diamond(n) && !pt.is_covered(c) && claimed.get(c) == Some(&false)
    };
    let ni = n as i32;
    for y in (-ni..ni).rev() {
        let (lo, hi) = row_span(n, y);
        for x in lo..=hi {
            let top_left = Cell::new(x, y);
            if !free(top_left, &claimed) {
                continue;
            }
            let square = [top_left, top_left.offset(1, 0), top_left.offset(0, -1), top_left.offset(1, -1)];
            if !square.iter().all(|&c| free(c, &claimed)) {
                return Err(ShuffleError::NotAHole(top_left));
            }
            for c in square {
                *claimed.get_mut(c).expect("in diamond") = true;
            }
            holes.push(top_left.offset(0, -1));
        }
    }
    debug_assert_eq!(holes.len() * 4, area);
    Ok(holes)
}

/// The two dominoes filling the 2x2 square anchored at `hole`.
pub fn block_in(hole: Cell, horizontal: bool) -> [Domino; 2] {
    if horizontal {
        [Domino::horizontal(hole.x, hole.y), Domino::horizontal(hole.x, hole.y + 1)]
    } else {
        [Domino::vertical(hole.x, hole.y), Domino::vertical(hole.x + 1, hole.y)]
    }
}

/// A hole is fillable by a good block at order `n` iff `x + y - n` is odd
/// (the lower or left domino then heads South or West).
fn good_hole(hole: Cell, n: u32) -> bool {
    (hole.x as i64 + hole.y as i64 - n as i64).rem_euclid(2) == 1
}

/// Fills every hole with a good block, drawing one coin per hole.
pub fn creation<C: CoinSource>(
    mut pt: PartialTiling,
    holes: &[Cell],
    coins: &mut C,
) -> Result<Tiling, ShuffleError> {
    let n = pt.order();
    for &hole in holes {
        if !good_hole(hole, n) {
            return Err(ShuffleError::HoleParity(hole));
        }
        let bit = coins.horizontal(hole)?;
        for d in block_in(hole, bit) {
            pt.insert(d)?;
        }
    }
    Ok(Tiling::from_partial(pt)?)
}

/// What one forward step did, besides producing the new tiling.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub tiling: Tiling,
    /// Bad blocks removed at the old order.
    pub destroyed: usize,
    /// Holes filled at the new order, with the coin drawn for each.
    pub holes: Vec<(Cell, bool)>,
}

/// One round of shuffling from order `n-1` to order `n`.
pub fn shuffle_step<C: CoinSource>(t: &Tiling, coins: &mut C) -> Result<StepOutcome, ShuffleError> {
    let destroyed_pt = destruction(t);
    let destroyed = (t.len() - destroyed_pt.len()) / 2;
    let slid = slide(&destroyed_pt)?;
    let holes = find_holes(&slid)?;
    let n = slid.order() as usize;
    debug_assert_eq!(holes.len(), destroyed + n, "area bookkeeping");

    let mut record = Vec::with_capacity(holes.len());
    let mut logging = LogCoins {
        inner: coins,
        log: &mut record,
    };
    let tiling = creation(slid, &holes, &mut logging)?;
    debug_assert_eq!(tiling.good_blocks().len(), holes.len(), "every good block is new");
    Ok(StepOutcome {
        tiling,
        destroyed,
        holes: record,
    })
}

struct LogCoins<'a, C> {
    inner: &'a mut C,
    log: &'a mut Vec<(Cell, bool)>,
}

impl<C: CoinSource> CoinSource for LogCoins<'_, C> {
    fn horizontal(&mut self, hole: Cell) -> Result<bool, ShuffleError> {
        let bit = self.inner.horizontal(hole)?;
        self.log.push((hole, bit));
        Ok(bit)
    }
}

/// Shuffles from the empty order-0 tiling up to `order`.
pub fn shuffle_from_empty<C: CoinSource>(order: u32, coins: &mut C) -> Result<Tiling, ShuffleError> {
    let mut t = Tiling::empty();
    for _ in 0..order {
        t = shuffle_step(&t, coins)?.tiling;
    }
    Ok(t)
}

/// Random tiling of the given order, horizontal blocks with probability
/// `p`, from a ChaCha8 stream seeded with `seed`.
pub fn generate(order: u32, p: f64, seed: u64) -> Result<Tiling, ShuffleError> {
    let mut coins = BiasedCoins::seeded(seed, p)?;
    shuffle_from_empty(order, &mut coins)
}

/// As [`generate`], also returning the tape of every coin drawn.
pub fn generate_with_tape(order: u32, p: f64, seed: u64) -> Result<(Tiling, CoinTape), ShuffleError> {
    let mut tape = CoinTape {
        seed,
        draws: Vec::new(),
    };
    let coins = BiasedCoins::seeded(seed, p)?;
    let t = shuffle_from_empty(order, &mut Recording::new(coins, &mut tape))?;
    Ok((t, tape))
}

/// Rebuilds the tiling recorded on `tape`; the tape must be used up exactly.
pub fn replay(order: u32, tape: &CoinTape) -> Result<Tiling, ShuffleError> {
    let mut coins = Replay::new(tape);
    let t = shuffle_from_empty(order, &mut coins)?;
    let unused = coins.draws.len();
    if unused > 0 {
        return Err(ShuffleError::TapeNotExhausted(unused));
    }
    Ok(t)
}

/// Runs `f` on `replicas` independent tilings seeded `seed0 + i`, returning
/// results in replica order.
pub fn map_replicas<T, F>(order: u32, p: f64, seed0: u64, replicas: usize, f: F) -> Result<Vec<T>, ShuffleError>
where
    T: Send,
    F: Fn(u64, Tiling) -> T + Sync,
{
    check_bias(p)?;
    (0..replicas as u64)
        .into_par_iter()
        .map(|i| {
            let seed = seed0.wrapping_add(i);
            generate(order, p, seed).map(|t| f(seed, t))
        })
        .collect()
}

/// First half of the reverse map: remove good blocks and slide every other
/// domino one step against its heading, into the diamond one order smaller.
pub fn reverse_partial(t: &Tiling) -> Result<PartialTiling, ShuffleError> {
    if t.order() == 0 {
        return Ok(PartialTiling::empty(0));
    }
    let kept = remove_blocks(t, BlockKind::Good);
    translate_all(&kept, t.order() - 1, |h| h.opposite().offset())
}

/// Anchors of the holes that [`reverse_step`] fills, in fill order.
pub fn reverse_holes(t: &Tiling) -> Result<Vec<Cell>, ShuffleError> {
    find_holes(&reverse_partial(t)?)
}

/// Maps an order-`n` tiling to one of its order-`n-1` predecessors. Each
/// reverse hole is filled with a bad block, horizontal where the matching
/// entry of `fill_choices` is `true`.
pub fn reverse_step(t: &Tiling, fill_choices: &[bool]) -> Result<Tiling, ShuffleError> {
    let mut pt = reverse_partial(t)?;
    let holes = find_holes(&pt)?;
    if holes.len() != fill_choices.len() {
        return Err(ShuffleError::ChoiceCount {
            expected: holes.len(),
            got: fill_choices.len(),
        });
    }
    let n = pt.order();
    for (&hole, &bit) in holes.iter().zip(fill_choices) {
        // Bad blocks need the opposite parity to good ones.
        if good_hole(hole, n) {
            return Err(ShuffleError::HoleParity(hole));
        }
        let [a, b] = block_in(hole, bit);
        debug_assert_eq!(crate::geometry::block_kind(a, b, n), BlockKind::Bad);
        pt.insert(a)?;
        pt.insert(b)?;
    }
    Ok(Tiling::from_partial(pt)?)
}

/// Number of good blocks minus the order: `log2` of the predecessor count.
pub fn predecessor_exponent(t: &Tiling) -> u32 {
    let g = t.good_blocks().len() as u32;
    debug_assert!(g >= t.order(), "a tiling has at least n good blocks");
    g - t.order()
}

/// Number of order-`n-1` tilings that shuffle to `t` with positive
/// probability: `2^(g - n)` for `g` good blocks.
pub fn predecessor_count(t: &Tiling) -> BigUint {
    BigUint::from(1u8) << predecessor_exponent(t) as usize
}

/// Horizontal orientation of the domino covering `c` in `t`.
pub fn is_horizontal_at(t: &Tiling, c: Cell) -> Option<bool> {
    t.domino_at(c)
        .map(|id| t.dominoes()[id].orientation == Orientation::Horizontal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::validate_tiling;

    struct Fixed(bool);

    impl CoinSource for Fixed {
        fn horizontal(&mut self, _: Cell) -> Result<bool, ShuffleError> {
            Ok(self.0)
        }
    }

    fn order_one(horizontal: bool) -> Tiling {
        shuffle_step(&Tiling::empty(), &mut Fixed(horizontal)).unwrap().tiling
    }

    #[test]
    fn order_zero_to_one() {
        let h = order_one(true);
        assert_eq!(h, Tiling::all_horizontal(1));
        assert_eq!(order_one(false), Tiling::all_vertical(1));
        assert!(slide(&PartialTiling::empty(0)).unwrap().is_empty());
        assert_eq!(find_holes(&PartialTiling::empty(0)).unwrap(), vec![]);
    }

    #[test]
    fn destruction_keeps_good_blocks() {
        for t in [order_one(true), order_one(false)] {
            assert_eq!(destruction(&t).len(), 2);
        }
        // One row lower at order 2 a stacked horizontal pair is bad.
        let t = Tiling::new(
            2,
            vec![
                Domino::horizontal(-1, 1),
                Domino::horizontal(-1, -1),
                Domino::horizontal(-1, 0),
                Domino::vertical(-2, -1),
                Domino::vertical(1, -1),
                Domino::horizontal(-1, -2),
            ],
        )
        .unwrap();
        let pt = destruction(&t);
        assert_eq!(pt.len(), 4);
        assert!(!pt.dominoes().contains(&Domino::horizontal(-1, -1)));
        assert!(!pt.dominoes().contains(&Domino::horizontal(-1, 0)));
    }

    #[test]
    fn slide_of_good_pair() {
        let t = order_one(true);
        let slid = slide(&destruction(&t)).unwrap();
        assert_eq!(slid.order(), 2);
        let mut got = slid.dominoes().to_vec();
        got.sort();
        assert_eq!(got, vec![Domino::horizontal(-1, -2), Domino::horizontal(-1, 1)]);
        let holes = find_holes(&slid).unwrap();
        assert_eq!(holes, vec![Cell::new(-2, -1), Cell::new(0, -1)]);
    }

    #[test]
    fn full_tiling_has_no_holes() {
        assert!(find_holes(Tiling::all_horizontal(3).as_partial()).unwrap().is_empty());
    }

    #[test]
    fn find_holes_rejects_ragged_gaps() {
        let mut pt = PartialTiling::empty(1);
        pt.insert(Domino::vertical(-1, -1)).unwrap();
        assert!(matches!(find_holes(&pt), Err(ShuffleError::NotAHole(_))));
    }

    #[test]
    fn degenerate_bias() {
        let t = generate(5, 1.0, 3).unwrap();
        assert_eq!(t, Tiling::all_horizontal(5));
        let t = generate(5, 0.0, 3).unwrap();
        assert_eq!(t, Tiling::all_vertical(5));
        assert!(matches!(generate(2, 1.5, 0), Err(ShuffleError::InvalidBias(_))));
    }

    #[test]
    fn generated_tilings_are_valid() {
        for seed in 0..20 {
            let t = generate(12, 0.5, seed).unwrap();
            assert!(validate_tiling(12, t.dominoes()).is_valid());
        }
    }

    #[test]
    fn tape_replays_exactly() {
        let (t, tape) = generate_with_tape(16, 0.3, 99).unwrap();
        assert_eq!(t, generate(16, 0.3, 99).unwrap());
        assert_eq!(replay(16, &tape).unwrap(), t);
        let mut short = tape.clone();
        short.draws.pop();
        assert!(matches!(replay(16, &short), Err(ShuffleError::TapeExhausted(_))));
        let mut bent = tape.clone();
        bent.draws[0].0 = Cell::new(7, 7);
        assert!(matches!(replay(16, &bent), Err(ShuffleError::TapeMismatch { .. })));
    }

    #[test]
    fn reverse_of_order_one_is_empty() {
        let t = order_one(true);
        assert_eq!(reverse_holes(&t).unwrap().len(), 0);
        assert_eq!(reverse_step(&t, &[]).unwrap(), Tiling::empty());
        assert!(matches!(
            reverse_step(&t, &[true]),
            Err(ShuffleError::ChoiceCount { expected: 0, got: 1 })
        ));
        assert_eq!(predecessor_count(&t), BigUint::from(1u8));
    }

    #[test]
    fn random_round_trips() {
        for seed in 0..30 {
            let prev = generate(9, 0.5, seed).unwrap();
            let step = shuffle_step(&prev, &mut BiasedCoins::seeded(seed + 1000, 0.5).unwrap()).unwrap();
            let choices: Vec<bool> = reverse_holes(&step.tiling)
                .unwrap()
                .into_iter()
                .map(|h| is_horizontal_at(&prev, h).unwrap())
                .collect();
            assert_eq!(choices.len(), step.destroyed);
            assert_eq!(reverse_step(&step.tiling, &choices).unwrap(), prev);
        }
    }

    #[test]
    fn hole_count_is_destroyed_plus_order() {
        for seed in 0..10 {
            let mut coins = BiasedCoins::seeded(seed, 0.5).unwrap();
            let mut t = Tiling::empty();
            for n in 1..=40 {
                let out = shuffle_step(&t, &mut coins).unwrap();
                assert_eq!(out.holes.len(), out.destroyed + n);
                t = out.tiling;
            }
        }
    }
}
