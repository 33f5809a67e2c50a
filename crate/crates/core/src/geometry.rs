//! Aztec diamond coordinates, dominoes, headings and block predicates.
//!
//! Cells are named by their lower-left lattice corner. The order-`n` diamond
//! is the set of cells with `|x + 1/2| + |y + 1/2| <= n`, so diamonds of
//! consecutive orders are concentric about the lattice point `(0, 0)`.
//!
//! A lattice vertex `(vx, vy)` is *dotted* at order `n` iff `vx + vy - n` is
//! even. This dots the middle vertex `(0, n)` of the northern border and every
//! vertex at even lattice distance from it. Every domino has exactly one long
//! side whose midpoint is dotted, and that side gives the domino its heading.
//! All heading logic in the crate goes through [`Domino::heading`].

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("domino {0} lies outside the order-{1} diamond")]
    OutOfBounds(Domino, u32),
    #[error("cell {0} is covered twice")]
    Overlap(Cell),
    #[error("invalid tiling: {0}")]
    Invalid(ValidationReport),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Self {
        Cell { x, y }
    }

    pub const fn offset(self, dx: i32, dy: i32) -> Self {
        Cell {
            x: self.x + dx,
            y: self.y + dy,
        }
    }

    /// Membership in the order-`n` diamond, in integer arithmetic:
    /// `|2x + 1| + |2y + 1| <= 2n`.
    pub fn in_diamond(self, n: u32) -> bool {
        let lhs = (2 * self.x as i64 + 1).abs() + (2 * self.y as i64 + 1).abs();
        lhs <= 2 * n as i64
    }

    /// Checkerboard colour used by height functions.
    pub fn is_black(self) -> bool {
        (self.x + self.y).rem_euclid(2) == 0
    }

    pub fn neighbors(self) -> [Cell; 4] {
        [
            self.offset(1, 0),
            self.offset(-1, 0),
            self.offset(0, 1),
            self.offset(0, -1),
        ]
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Heading {
    North,
    South,
    East,
    West,
}

impl Heading {
    pub const ALL: [Heading; 4] = [Heading::North, Heading::South, Heading::East, Heading::West];

    /// Unit translation in the direction of the heading.
    pub const fn offset(self) -> (i32, i32) {
        match self {
            Heading::North => (0, 1),
            Heading::South => (0, -1),
            Heading::East => (1, 0),
            Heading::West => (-1, 0),
        }
    }

    pub const fn opposite(self) -> Heading {
        match self {
            Heading::North => Heading::South,
            Heading::South => Heading::North,
            Heading::East => Heading::West,
            Heading::West => Heading::East,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Domino {
    pub anchor: Cell,
    pub orientation: Orientation,
}

impl Domino {
    pub const fn horizontal(x: i32, y: i32) -> Self {
        Domino {
            anchor: Cell::new(x, y),
            orientation: Orientation::Horizontal,
        }
    }

    pub const fn vertical(x: i32, y: i32) -> Self {
        Domino {
            anchor: Cell::new(x, y),
            orientation: Orientation::Vertical,
        }
    }

    pub fn cells(self) -> [Cell; 2] {
        match self.orientation {
            Orientation::Horizontal => [self.anchor, self.anchor.offset(1, 0)],
            Orientation::Vertical => [self.anchor, self.anchor.offset(0, 1)],
        }
    }

    pub fn in_diamond(self, n: u32) -> bool {
        self.cells().iter().all(|c| c.in_diamond(n))
    }

    /// Heading at order `n`, without a bounds check.
    ///
    /// The dotted long side is the north (east) side iff the vertex
    /// `anchor + (1, 1)` is dotted, i.e. iff `x + y - n` is even.
    pub fn heading(self, n: u32) -> Heading {
        let even = (self.anchor.x as i64 + self.anchor.y as i64 - n as i64).rem_euclid(2) == 0;
        match (self.orientation, even) {
            (Orientation::Horizontal, true) => Heading::North,
            (Orientation::Horizontal, false) => Heading::South,
            (Orientation::Vertical, true) => Heading::East,
            (Orientation::Vertical, false) => Heading::West,
        }
    }

    pub fn translated(self, dx: i32, dy: i32) -> Self {
        Domino {
            anchor: self.anchor.offset(dx, dy),
            orientation: self.orientation,
        }
    }

    /// Geometric centre in lattice coordinates, doubled to stay integral.
    pub fn doubled_center(self) -> (i32, i32) {
        match self.orientation {
            Orientation::Horizontal => (2 * self.anchor.x + 2, 2 * self.anchor.y + 1),
            Orientation::Vertical => (2 * self.anchor.x + 1, 2 * self.anchor.y + 2),
        }
    }
}

impl fmt::Display for Domino {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = match self.orientation {
            Orientation::Horizontal => 'H',
            Orientation::Vertical => 'V',
        };
        write!(f, "{}@{}", o, self.anchor)
    }
}

/// All cells of the order-`n` diamond, rows top to bottom, left to right.
pub fn cells_of_order(n: u32) -> Vec<Cell> {
    let n = n as i32;
    let mut cells = Vec::with_capacity((2 * n * (n + 1)) as usize);
    for y in (-n..n).rev() {
        let (lo, hi) = row_span(n as u32, y);
        cells.extend((lo..=hi).map(|x| Cell::new(x, y)));
    }
    cells
}

/// Inclusive x-range of row `y` in the order-`n` diamond. Empty rows
/// (outside `-n..n`) give `lo > hi`.
pub fn row_span(n: u32, y: i32) -> (i32, i32) {
    let n = n as i32;
    if y < -n || y >= n {
        return (0, -1);
    }
    // |2x + 1| <= 2n - |2y + 1|
    let half = (2 * n - (2 * y + 1).abs() - 1) / 2;
    (-half - 1, half)
}

/// Heading of `d` at order `n`; fails if `d` is not inside the diamond.
pub fn heading(d: Domino, n: u32) -> Result<Heading, GeometryError> {
    if !d.in_diamond(n) {
        return Err(GeometryError::OutOfBounds(d, n));
    }
    Ok(d.heading(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Good,
    Bad,
    NotABlock,
}

/// Classifies a pair of dominoes as a good block, a bad block, or neither.
pub fn block_kind(d1: Domino, d2: Domino, n: u32) -> BlockKind {
    if d1.orientation != d2.orientation {
        return BlockKind::NotABlock;
    }
    let (lower, upper) = if d1.anchor <= d2.anchor { (d1, d2) } else { (d2, d1) };
    let stacked = match lower.orientation {
        Orientation::Horizontal => upper.anchor == lower.anchor.offset(0, 1),
        Orientation::Vertical => upper.anchor == lower.anchor.offset(1, 0),
    };
    if !stacked {
        return BlockKind::NotABlock;
    }
    // `lower` is the bottom (resp. left) domino; the block is good when it
    // heads away from its partner.
    match lower.heading(n) {
        Heading::South | Heading::West => BlockKind::Good,
        Heading::North | Heading::East => BlockKind::Bad,
    }
}

/// Outcome of checking a domino set against an order-`n` diamond.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub uncovered: Vec<Cell>,
    pub overlapping: Vec<Cell>,
    pub out_of_bounds: Vec<Domino>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.uncovered.is_empty() && self.overlapping.is_empty() && self.out_of_bounds.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} uncovered, {} overlapping, {} out of bounds",
            self.uncovered.len(),
            self.overlapping.len(),
            self.out_of_bounds.len()
        )
    }
}

/// Checks that `dominoes` cover every cell of the order-`n` diamond exactly
/// once and stay inside it.
pub fn validate_tiling(n: u32, dominoes: &[Domino]) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut counts = CellGrid::new(n, 0u8);
    for &d in dominoes {
        if !d.in_diamond(n) {
            report.out_of_bounds.push(d);
        }
        for c in d.cells() {
            if let Some(k) = counts.get_mut(c) {
                *k = k.saturating_add(1);
            }
        }
    }
    for c in cells_of_order(n) {
        match counts.get(c) {
            Some(0) => report.uncovered.push(c),
            Some(1) => {}
            _ => report.overlapping.push(c),
        }
    }
    report
}

/// Dense storage over the bounding square `[-n, n) x [-n, n)` of the
/// order-`n` diamond.
#[derive(Debug, Clone)]
pub struct CellGrid<T> {
    order: u32,
    side: usize,
    slots: Vec<T>,
}

impl<T: Clone> CellGrid<T> {
    pub fn new(order: u32, fill: T) -> Self {
        let side = 2 * order as usize;
        CellGrid {
            order,
            side,
            slots: vec![fill; side * side],
        }
    }
}

impl<T> CellGrid<T> {
    pub fn order(&self) -> u32 {
        self.order
    }

    #[inline]
    fn slot(&self, c: Cell) -> Option<usize> {
        let n = self.order as i64;
        let (x, y) = (c.x as i64 + n, c.y as i64 + n);
        let side = self.side as i64;
        if x < 0 || y < 0 || x >= side || y >= side {
            None
        } else {
            Some((y * side + x) as usize)
        }
    }

    #[inline]
    pub fn get(&self, c: Cell) -> Option<&T> {
        self.slot(c).map(|i| &self.slots[i])
    }

    #[inline]
    pub fn get_mut(&mut self, c: Cell) -> Option<&mut T> {
        self.slot(c).map(move |i| &mut self.slots[i])
    }
}

const EMPTY: u32 = u32::MAX;

/// A set of non-overlapping dominoes inside an order-`n` diamond, indexed
/// by cell. Not every cell needs to be covered.
#[derive(Debug, Clone)]
pub struct PartialTiling {
    order: u32,
    dominoes: Vec<Domino>,
    index: CellGrid<u32>,
}

impl PartialTiling {
    pub fn empty(order: u32) -> Self {
        PartialTiling {
            order,
            dominoes: Vec::new(),
            index: CellGrid::new(order, EMPTY),
        }
    }

    pub fn with_capacity(order: u32, capacity: usize) -> Self {
        let mut pt = Self::empty(order);
        pt.dominoes.reserve(capacity);
        pt
    }

    pub fn from_dominoes(order: u32, dominoes: &[Domino]) -> Result<Self, GeometryError> {
        let mut pt = Self::with_capacity(order, dominoes.len());
        for &d in dominoes {
            pt.insert(d)?;
        }
        Ok(pt)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn dominoes(&self) -> &[Domino] {
        &self.dominoes
    }

    pub fn len(&self) -> usize {
        self.dominoes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dominoes.is_empty()
    }

    pub fn insert(&mut self, d: Domino) -> Result<usize, GeometryError> {
        if !d.in_diamond(self.order) {
            return Err(GeometryError::OutOfBounds(d, self.order));
        }
        let [a, b] = d.cells();
        for c in [a, b] {
            if self.index.get(c) != Some(&EMPTY) {
                return Err(GeometryError::Overlap(c));
            }
        }
        let id = self.dominoes.len() as u32;
        *self.index.get_mut(a).expect("in bounds") = id;
        *self.index.get_mut(b).expect("in bounds") = id;
        self.dominoes.push(d);
        Ok(id as usize)
    }

    /// Index of the domino covering `c`, if any.
    #[inline]
    pub fn domino_at(&self, c: Cell) -> Option<usize> {
        match self.index.get(c) {
            Some(&id) if id != EMPTY => Some(id as usize),
            _ => None,
        }
    }

    #[inline]
    pub fn is_covered(&self, c: Cell) -> bool {
        self.domino_at(c).is_some()
    }

    pub fn uncovered_area(&self) -> usize {
        let n = self.order as usize;
        2 * n * (n + 1) - 2 * self.dominoes.len()
    }

    pub fn is_complete(&self) -> bool {
        self.uncovered_area() == 0
    }

    pub fn into_dominoes(self) -> Vec<Domino> {
        self.dominoes
    }
}

/// A complete domino tiling of an order-`n` Aztec diamond.
#[derive(Debug, Clone)]
pub struct Tiling {
    inner: PartialTiling,
}

impl Tiling {
    pub fn new(order: u32, dominoes: Vec<Domino>) -> Result<Self, GeometryError> {
        let report = validate_tiling(order, &dominoes);
        if !report.is_valid() {
            return Err(GeometryError::Invalid(report));
        }
        let inner = PartialTiling::from_dominoes(order, &dominoes)?;
        Ok(Tiling { inner })
    }

    /// The unique tiling of the order-0 diamond.
    pub fn empty() -> Self {
        Tiling {
            inner: PartialTiling::empty(0),
        }
    }

    pub fn from_partial(pt: PartialTiling) -> Result<Self, GeometryError> {
        if pt.is_complete() {
            Ok(Tiling { inner: pt })
        } else {
            let report = validate_tiling(pt.order, &pt.dominoes);
            Err(GeometryError::Invalid(report))
        }
    }

    /// Brick-wall tiling with every domino horizontal.
    pub fn all_horizontal(order: u32) -> Self {
        let mut dominoes = Vec::new();
        let n = order as i32;
        for y in -n..n {
            let (lo, hi) = row_span(order, y);
            dominoes.extend((lo..=hi).step_by(2).map(|x| Domino::horizontal(x, y)));
        }
        Tiling::new(order, dominoes).expect("rows have even length")
    }

    /// The all-horizontal tiling turned a quarter turn.
    pub fn all_vertical(order: u32) -> Self {
        Tiling::all_horizontal(order).rotate_quarter()
    }

    pub fn order(&self) -> u32 {
        self.inner.order
    }

    pub fn dominoes(&self) -> &[Domino] {
        &self.inner.dominoes
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn domino_at(&self, c: Cell) -> Option<usize> {
        self.inner.domino_at(c)
    }

    pub fn as_partial(&self) -> &PartialTiling {
        &self.inner
    }

    pub fn heading_of(&self, id: usize) -> Heading {
        self.inner.dominoes[id].heading(self.inner.order)
    }

    pub fn horizontal_count(&self) -> usize {
        self.dominoes()
            .iter()
            .filter(|d| d.orientation == Orientation::Horizontal)
            .count()
    }

    /// Sorted domino list; equal tilings have equal canonical forms.
    pub fn canonical(&self) -> Vec<Domino> {
        let mut v = self.inner.dominoes.clone();
        v.sort_unstable();
        v
    }

    /// Rotates the tiling a quarter turn counter-clockwise about the centre.
    /// The dot pattern is invariant, so an east-going domino becomes a
    /// north-going one.
    pub fn rotate_quarter(&self) -> Tiling {
        let dominoes = self
            .dominoes()
            .iter()
            .map(|d| {
                // Cell (x, y) maps to (-y - 1, x).
                let [a, b] = d.cells();
                let (ra, rb) = (Cell::new(-a.y - 1, a.x), Cell::new(-b.y - 1, b.x));
                let anchor = ra.min(rb);
                let orientation = match d.orientation {
                    Orientation::Horizontal => Orientation::Vertical,
                    Orientation::Vertical => Orientation::Horizontal,
                };
                Domino { anchor, orientation }
            })
            .collect();
        Tiling::new(self.order(), dominoes).expect("rotation preserves validity")
    }

    /// Every good block, as (lower or left domino id, upper or right domino id).
    pub fn good_blocks(&self) -> Vec<(usize, usize)> {
        self.blocks(BlockKind::Good)
    }

    pub fn bad_blocks(&self) -> Vec<(usize, usize)> {
        self.blocks(BlockKind::Bad)
    }

    fn blocks(&self, kind: BlockKind) -> Vec<(usize, usize)> {
        blocks_of(&self.inner, kind)
    }
}

/// Blocks of the given kind among the dominoes of a partial tiling.
pub(crate) fn blocks_of(pt: &PartialTiling, kind: BlockKind) -> Vec<(usize, usize)> {
    let n = pt.order();
    let mut out = Vec::new();
    for (id, &d) in pt.dominoes().iter().enumerate() {
        let partner_anchor = match d.orientation {
            Orientation::Horizontal => d.anchor.offset(0, 1),
            Orientation::Vertical => d.anchor.offset(1, 0),
        };
        if let Some(other) = pt.domino_at(partner_anchor) {
            let od = pt.dominoes()[other];
            if od.anchor == partner_anchor && od.orientation == d.orientation && block_kind(d, od, n) == kind {
                out.push((id, other));
            }
        }
    }
    out
}

impl PartialEq for Tiling {
    fn eq(&self, other: &Self) -> bool {
        self.order() == other.order() && self.canonical() == other.canonical()
    }
}

impl Eq for Tiling {}
