//! Frozen regions of a tiling, the partition carried by the north region,
//! its growth process and particle encoding, and the distance from the
//! temperate zone to the limiting circle or ellipse.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::geometry::{Cell, Domino, Heading, Tiling};
use crate::tasep::{ParticleState, Probability, TasepError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionsError {
    #[error("the temperate zone is empty")]
    EmptyTemperate,
    #[error("north region is not a Ferrers diagram: square ({0}, {1}) lacks a neighbour")]
    NotFerrers(u32, u32),
    #[error("partition {0} does not fit inside the order-{1} staircase")]
    OutsideStaircase(Partition, u32),
    #[error("parts must be positive and weakly decreasing: {0:?}")]
    NotAPartition(Vec<u32>),
    #[error("window [{lo}, {hi}] does not cover partition {partition}")]
    WindowTooSmall { lo: i64, hi: i64, partition: Partition },
    #[error("exact growth law is capped at {1} steps (asked for {0})")]
    TooLarge(u32, u32),
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error(transparent)]
    Tasep(#[from] TasepError),
}

/// The frozen region of each domino, indexed like `Tiling::dominoes`;
/// `None` marks the temperate zone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrozenRegions {
    pub order: u32,
    labels: Vec<Option<Heading>>,
    dominoes: Vec<Domino>,
}

impl FrozenRegions {
    pub fn label(&self, id: usize) -> Option<Heading> {
        self.labels[id]
    }

    pub fn labels(&self) -> &[Option<Heading>] {
        &self.labels
    }

    pub fn region(&self, h: Heading) -> Vec<Domino> {
        self.select(Some(h))
    }

    pub fn temperate(&self) -> Vec<Domino> {
        self.select(None)
    }

    pub fn count(&self, h: Heading) -> usize {
        self.labels.iter().filter(|&&l| l == Some(h)).count()
    }

    pub fn temperate_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_none()).count()
    }

    fn select(&self, want: Option<Heading>) -> Vec<Domino> {
        self.labels
            .iter()
            .zip(&self.dominoes)
            .filter(|(l, _)| **l == want)
            .map(|(_, &d)| d)
            .collect()
    }
}

fn domino_neighbours(t: &Tiling, id: usize) -> impl Iterator<Item = usize> + '_ {
    let n = t.order();
    t.dominoes()[id]
        .cells()
        .into_iter()
        .flat_map(|c| c.neighbors())
        .filter(move |c| c.in_diamond(n))
        .filter_map(|c| t.domino_at(c))
        .filter(move |&j| j != id)
}

fn touches_boundary(t: &Tiling, d: Domino) -> bool {
    let n = t.order();
    d.cells()
        .into_iter()
        .flat_map(|c| c.neighbors())
        .any(|c| !c.in_diamond(n))
}

/// Labels every domino that reaches the boundary through an edge-connected
/// chain of dominoes with its own heading.
pub fn frozen_regions(t: &Tiling) -> FrozenRegions {
    let mut labels: Vec<Option<Heading>> = vec![None; t.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for (id, &d) in t.dominoes().iter().enumerate() {
        if touches_boundary(t, d) {
            labels[id] = Some(t.heading_of(id));
            queue.push_back(id);
        }
    }
    while let Some(id) = queue.pop_front() {
        let h = t.heading_of(id);
        for j in domino_neighbours(t, id) {
            if labels[j].is_none() && t.heading_of(j) == h {
                labels[j] = Some(h);
                queue.push_back(j);
            }
        }
    }
    FrozenRegions {
        order: t.order(),
        labels,
        dominoes: t.dominoes().to_vec(),
    }
}

/// A Young diagram stored as its positive row lengths, longest first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    rows: Vec<u32>,
}

impl Partition {
    pub fn new(mut rows: Vec<u32>) -> Result<Self, RegionsError> {
        while rows.last() == Some(&0) {
            rows.pop();
        }
        if rows.contains(&0) || rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(RegionsError::NotAPartition(rows));
        }
        Ok(Self { rows })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn size(&self) -> u32 {
        self.rows.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Length of row `b`, zero past the last row.
    pub fn row(&self, b: u32) -> u32 {
        self.rows.get(b as usize).copied().unwrap_or(0)
    }

    /// Whether the square in column `a`, row `b` belongs to the diagram.
    pub fn contains(&self, a: u32, b: u32) -> bool {
        a < self.row(b)
    }

    /// Row `b` is at most `n - b` long and there are at most `n` rows.
    pub fn fits_staircase(&self, n: u32) -> bool {
        self.rows.len() as u32 <= n && self.rows.iter().enumerate().all(|(b, &r)| r + b as u32 <= n)
    }

    /// Squares `(a, b)` outside the diagram whose left and lower neighbours
    /// are inside it or off the axes.
    pub fn growth_corners(&self) -> Vec<(u32, u32)> {
        (0..=self.rows.len() as u32)
            .filter(|&b| b == 0 || self.row(b - 1) > self.row(b))
            .map(|b| (self.row(b), b))
            .collect()
    }

    /// The diagram with the given growth corners added.
    pub fn with_added(&self, corners: &[(u32, u32)]) -> Self {
        let mut rows = self.rows.clone();
        for &(a, b) in corners {
            let b = b as usize;
            if b == rows.len() {
                rows.push(0);
            }
            debug_assert_eq!(rows[b], a);
            rows[b] += 1;
        }
        Self::new(rows).expect("growth corners keep the shape a partition")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str(")")
    }
}

/// Square `(a, b)` of the diagram carried by a north-going domino of an
/// order-`n` tiling, or `None` for a domino outside the diamond's north half.
pub fn north_square(d: Domino, n: u32) -> Option<(u32, u32)> {
    let s = n as i64 + 1 - d.anchor.y as i64;
    let delta = d.anchor.x as i64 + 1;
    if (s - delta) % 2 != 0 {
        return None;
    }
    let (i, j) = ((s - delta) / 2, (s + delta) / 2);
    if i < 1 || j < 1 {
        return None;
    }
    Some(((i - 1) as u32, (j - 1) as u32))
}

/// Top domino of the good horizontal block that adds square `(a, b)` at
/// order `n`; the block's hole anchor sits one row lower.
pub fn corner_domino(a: u32, b: u32, n: u32) -> Domino {
    let (a, b, n) = (a as i32, b as i32, n as i32);
    Domino::horizontal(b - a - 1, n - 1 - a - b)
}

/// Hole anchor filled when square `(a, b)` is added at order `n`.
pub fn corner_hole(a: u32, b: u32, n: u32) -> Cell {
    let top = corner_domino(a, b, n).anchor;
    Cell::new(top.x, top.y - 1)
}

/// The partition traced by the north frozen region.
pub fn arctic_to_partition(t: &Tiling) -> Result<Partition, RegionsError> {
    let n = t.order();
    let regions = frozen_regions(t);
    let squares: BTreeSet<(u32, u32)> = regions
        .region(Heading::North)
        .into_iter()
        .map(|d| north_square(d, n).expect("north dominoes lie on the north lattice"))
        .collect();
    for &(a, b) in &squares {
        let left_ok = a == 0 || squares.contains(&(a - 1, b));
        let down_ok = b == 0 || squares.contains(&(a, b - 1));
        if !left_ok || !down_ok {
            return Err(RegionsError::NotFerrers(a, b));
        }
    }
    let mut rows: Vec<u32> = Vec::new();
    for &(_, b) in &squares {
        let b = b as usize;
        if rows.len() <= b {
            rows.resize(b + 1, 0);
        }
        rows[b] += 1;
    }
    let p = Partition::new(rows).map_err(|_| RegionsError::NotFerrers(0, 0))?;
    if !p.fits_staircase(n) {
        return Err(RegionsError::OutsideStaircase(p, n));
    }
    Ok(p)
}

/// Partition of the frozen region with heading `h`, read after rotating that
/// region to the top.
pub fn region_partition(t: &Tiling, h: Heading) -> Result<Partition, RegionsError> {
    let turns = match h {
        Heading::North => 0,
        Heading::East => 1,
        Heading::South => 2,
        Heading::West => 3,
    };
    let mut r = t.clone();
    for _ in 0..turns {
        r = r.rotate_quarter();
    }
    arctic_to_partition(&r)
}

/// Particle encoding of the diagram's boundary path on `[lo, hi]`.
///
/// The path comes down the vertical axis, runs along the rows from top to
/// bottom, and leaves along the horizontal axis; the step ending at `(x, y)`
/// writes bit `x - y`, 1 for a down step and 0 for a right step. The empty
/// diagram gives the wedge.
pub fn partition_to_bits(p: &Partition, lo: i64, hi: i64) -> Result<ParticleState, RegionsError> {
    let height = p.rows.len() as i64;
    let widest = p.row(0) as i64;
    if lo > 1 - height || hi < widest.max(0) || hi < lo {
        return Err(RegionsError::WindowTooSmall {
            lo,
            hi,
            partition: p.clone(),
        });
    }
    let mut bits = vec![false; (hi - lo + 1) as usize];
    let mut set = |i: i64, v: bool| {
        if (lo..=hi).contains(&i) {
            bits[(i - lo) as usize] = v;
        }
    };
    for i in lo..=-height {
        set(i, true);
    }
    let (mut x, mut y) = (0i64, height);
    for b in (0..height).rev() {
        let target = p.rows[b as usize] as i64;
        while x < target {
            x += 1;
            set(x - y, false);
        }
        y -= 1;
        set(x - y, true);
    }
    Ok(ParticleState::new(lo, bits)?)
}

/// Adds each growth corner independently with probability `p`.
pub fn growth_step<R: Rng + ?Sized>(p_state: &Partition, p: f64, rng: &mut R) -> Result<Partition, RegionsError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(RegionsError::InvalidProbability(p));
    }
    let fired: Vec<(u32, u32)> = p_state
        .growth_corners()
        .into_iter()
        .filter(|_| rng.gen_bool(p))
        .collect();
    Ok(p_state.with_added(&fired))
}

/// Every successor under one growth step with its probability.
pub fn growth_transitions<T: Probability>(part: &Partition, p: &T) -> Vec<(Partition, T)> {
    let corners = part.growth_corners();
    let m = corners.len();
    let q = T::one() - p.clone();
    (0u64..(1u64 << m))
        .map(|mask| {
            let fired: Vec<(u32, u32)> = (0..m).filter(|&k| mask >> k & 1 == 1).map(|k| corners[k]).collect();
            let k = fired.len();
            let w = (0..k).fold(T::one(), |acc, _| acc * p.clone());
            let w = (k..m).fold(w, |acc, _| acc * q.clone());
            (part.with_added(&fired), w)
        })
        .collect()
}

/// Largest step count accepted by [`growth_distribution_exact`].
pub const MAX_GROWTH_STEPS: u32 = 6;

/// Exact law of the diagram after `n` growth steps from the empty diagram.
pub fn growth_distribution_exact<T: Probability>(n: u32, p: &T) -> Result<BTreeMap<Partition, T>, RegionsError> {
    if n > MAX_GROWTH_STEPS {
        return Err(RegionsError::TooLarge(n, MAX_GROWTH_STEPS));
    }
    let mut law = BTreeMap::new();
    law.insert(Partition::empty(), T::one());
    for _ in 0..n {
        let mut next: BTreeMap<Partition, T> = BTreeMap::new();
        for (part, w) in &law {
            for (succ, q) in growth_transitions(part, p) {
                let add = w.clone() * q;
                let slot = next.entry(succ).or_insert_with(T::zero);
                *slot = slot.clone() + add;
            }
        }
        law = next;
    }
    Ok(law)
}

/// Lattice points on edges separating a cell accepted by `inside` from a
/// cell that is not; cells are those of the order-`n` diamond.
pub fn boundary_points(n: u32, inside: impl Fn(Cell) -> bool) -> Vec<(i32, i32)> {
    let mut pts = BTreeSet::new();
    for c in crate::geometry::cells_of_order(n) {
        if !inside(c) {
            continue;
        }
        let (x, y) = (c.x, c.y);
        // Each neighbour paired with the endpoints of the shared edge.
        let edges = [
            ((x + 1, y), [(x + 1, y), (x + 1, y + 1)]),
            ((x - 1, y), [(x, y), (x, y + 1)]),
            ((x, y + 1), [(x, y + 1), (x + 1, y + 1)]),
            ((x, y - 1), [(x, y), (x + 1, y)]),
        ];
        for ((nx, ny), ends) in edges {
            let nb = Cell::new(nx, ny);
            if !(nb.in_diamond(n) && inside(nb)) {
                pts.extend(ends);
            }
        }
    }
    pts.into_iter().collect()
}

/// Boundary lattice points of the temperate zone, in coordinates where the
/// diamond is centred on the origin.
pub fn temperate_boundary(t: &Tiling) -> Result<Vec<(i32, i32)>, RegionsError> {
    let regions = frozen_regions(t);
    if regions.temperate_count() == 0 {
        return Err(RegionsError::EmptyTemperate);
    }
    Ok(boundary_points(t.order(), |c| {
        t.domino_at(c).is_some_and(|id| regions.label(id).is_none())
    }))
}

/// `max |r(P) - R(θ(P))| / n` over the points.
pub fn radial_deviation(points: &[(i32, i32)], n: u32, radius: impl Fn(f64) -> f64) -> f64 {
    let n = n as f64;
    points
        .iter()
        .map(|&(x, y)| {
            let (x, y) = (x as f64, y as f64);
            let r = x.hypot(y);
            (r - radius(y.atan2(x))).abs() / n
        })
        .fold(0.0, f64::max)
}

/// Radius of `x²/(p n²) + y²/((1-p) n²) = 1` in direction `theta`.
pub fn ellipse_radius(n: u32, p: f64, theta: f64) -> f64 {
    let n2 = (n as f64) * (n as f64);
    let (c, s) = (theta.cos(), theta.sin());
    let inv = c * c / (p * n2) + s * s / ((1.0 - p) * n2);
    1.0 / inv.sqrt()
}

/// Largest scaled distance from the temperate boundary to the inscribed
/// circle of radius `n / sqrt(2)`.
pub fn circle_deviation(t: &Tiling) -> Result<f64, RegionsError> {
    let pts = temperate_boundary(t)?;
    let r = t.order() as f64 / std::f64::consts::SQRT_2;
    Ok(radial_deviation(&pts, t.order(), |_| r))
}

/// Largest scaled radial distance from the temperate boundary to the ellipse
/// `x²/p + y²/(1-p) = 1` (scaled by `n`).
pub fn ellipse_deviation(t: &Tiling, p: f64) -> Result<f64, RegionsError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(RegionsError::InvalidProbability(p));
    }
    let pts = temperate_boundary(t)?;
    let n = t.order();
    Ok(radial_deviation(&pts, n, |theta| ellipse_radius(n, p, theta)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shuffle::generate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn part(rows: &[u32]) -> Partition {
        Partition::new(rows.to_vec()).unwrap()
    }

    #[test]
    fn order_one_regions() {
        let t = Tiling::all_horizontal(1);
        let r = frozen_regions(&t);
        assert_eq!(r.region(Heading::North), vec![Domino::horizontal(-1, 0)]);
        assert_eq!(r.region(Heading::South), vec![Domino::horizontal(-1, -1)]);
        assert!(r.temperate().is_empty());
    }

    #[test]
    fn brick_wall_is_fully_frozen() {
        for n in 1..8 {
            let t = Tiling::all_horizontal(n);
            let r = frozen_regions(&t);
            assert_eq!(r.temperate_count(), 0);
            for d in r.region(Heading::North) {
                assert!(d.anchor.y >= 0);
            }
            assert_eq!(r.count(Heading::North), t.len() / 2);
            assert!(matches!(circle_deviation(&t), Err(RegionsError::EmptyTemperate)));
        }
    }

    #[test]
    fn staircase_partitions() {
        assert_eq!(arctic_to_partition(&Tiling::all_horizontal(2)).unwrap(), part(&[2, 1]));
        let stairs: Vec<u32> = (1..=5).rev().collect();
        assert_eq!(arctic_to_partition(&Tiling::all_horizontal(5)).unwrap(), part(&stairs));
        assert_eq!(arctic_to_partition(&Tiling::all_vertical(4)).unwrap(), Partition::empty());
        assert_eq!(region_partition(&Tiling::all_vertical(3), Heading::East).unwrap(), part(&[3, 2, 1]));
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert_eq!(part(&[2, 1, 0]), part(&[2, 1]));
        assert!(part(&[3, 2, 1]).fits_staircase(3));
        assert!(!part(&[3, 3]).fits_staircase(3));
    }

    #[test]
    fn corners() {
        assert_eq!(Partition::empty().growth_corners(), vec![(0, 0)]);
        assert_eq!(part(&[1]).growth_corners(), vec![(1, 0), (0, 1)]);
        assert_eq!(part(&[2, 2]).growth_corners(), vec![(2, 0), (0, 2)]);
        assert_eq!(part(&[3, 1]).growth_corners(), vec![(3, 0), (1, 1), (0, 2)]);
    }

    #[test]
    fn bits_of_small_diagrams() {
        let s = partition_to_bits(&Partition::empty(), -3, 3).unwrap();
        assert_eq!(s.to_string(), "1111000");
        let s = partition_to_bits(&part(&[1]), -2, 2).unwrap();
        assert_eq!(s.to_string(), "11010");
        let s = partition_to_bits(&part(&[2, 1]), -3, 3).unwrap();
        assert_eq!(s.to_string(), "1101010");
        assert!(partition_to_bits(&part(&[2, 1]), 0, 3).is_err());
        assert!(partition_to_bits(&part(&[2, 1]), -2, 1).is_err());
        assert!(partition_to_bits(&Partition::empty(), 2, 3).is_err());
    }

    #[test]
    fn growth_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(growth_step(&Partition::empty(), 1.0, &mut rng).unwrap(), part(&[1]));
        let law = growth_distribution_exact(1, &0.5f64).unwrap();
        assert_eq!(law[&Partition::empty()], 0.5);
        assert_eq!(law[&part(&[1])], 0.5);
        let t = growth_transitions(&part(&[1]), &0.5f64);
        let got: BTreeMap<Partition, f64> = t.into_iter().collect();
        for rows in [&[1][..], &[2], &[1, 1], &[2, 1]] {
            assert_eq!(got[&part(rows)], 0.25);
        }
    }

    #[test]
    fn growth_stays_in_staircase() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut p = Partition::empty();
            for n in 1..=30 {
                p = growth_step(&p, 0.5, &mut rng).unwrap();
                assert!(p.fits_staircase(n));
            }
        }
        for n in 0..=MAX_GROWTH_STEPS {
            let law = growth_distribution_exact(n, &0.3f64).unwrap();
            assert!((law.values().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(law.keys().all(|p| p.fits_staircase(n)));
        }
    }

    #[test]
    fn north_squares_round_trip() {
        for n in 1..6 {
            for a in 0..n {
                for b in 0..n - a {
                    let d = corner_domino(a, b, n);
                    assert!(d.in_diamond(n));
                    assert_eq!(d.heading(n), Heading::North);
                    assert_eq!(north_square(d, n), Some((a, b)));
                }
            }
        }
    }

    #[test]
    fn disc_boundary_deviation() {
        for n in [40u32, 100, 200] {
            let r = n as f64 / std::f64::consts::SQRT_2;
            let inside = |c: Cell| {
                let (x, y) = (c.x as f64 + 0.5, c.y as f64 + 0.5);
                x.hypot(y) <= r
            };
            let pts = boundary_points(n, inside);
            let dev = radial_deviation(&pts, n, |_| r);
            assert!(dev <= 2.0 / n as f64, "n = {n}: {dev}");
        }
    }

    #[test]
    fn ellipse_at_half_is_circle() {
        let t = generate(48, 0.5, 2).unwrap();
        let a = circle_deviation(&t).unwrap();
        let b = ellipse_deviation(&t, 0.5).unwrap();
        assert!((a - b).abs() < 1e-12);
        let r = ellipse_radius(10, 0.3, 0.0);
        assert!((r - 10.0 * 0.3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn random_tiling_has_temperate_zone() {
        let t = generate(64, 0.5, 1).unwrap();
        let r = frozen_regions(&t);
        assert!(r.temperate_count() > 0);
        let total: usize = Heading::ALL.iter().map(|&h| r.count(h)).sum::<usize>() + r.temperate_count();
        assert_eq!(total, t.len());
        let p = arctic_to_partition(&t).unwrap();
        assert!(p.fits_staircase(64));
    }
}
