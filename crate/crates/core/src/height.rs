//! Height functions on the vertices of a tiled Aztec diamond.
//!
//! Every unit edge is oriented with the black cell (`x + y` even) on its left.
//! Walking an edge forward raises the height by 1, unless a domino covers
//! both cells beside it, in which case the height drops by 3.

use std::collections::VecDeque;

use thiserror::Error;

use crate::geometry::{Cell, CellGrid, Domino, Tiling};
use crate::shuffle::{map_replicas, ShuffleError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeightError {
    #[error("domino {0} leaves the order-{1} diamond")]
    OutOfBounds(Domino, u32),
    #[error("cell {0} is covered twice")]
    Overlap(Cell),
    #[error("heights disagree along the edge from ({0}, {1}) to ({2}, {3})")]
    Inconsistent(i32, i32, i32, i32),
    #[error(transparent)]
    Shuffle(#[from] ShuffleError),
}

/// Heights on the `(2n+1)²` lattice points of `[-n, n]²`; points off the
/// diamond are `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightField {
    order: u32,
    values: Vec<Option<i32>>,
}

fn vertex_index(n: u32, x: i32, y: i32) -> Option<usize> {
    let n = n as i32;
    if x.abs() + y.abs() > n {
        return None;
    }
    let side = (2 * n + 1) as usize;
    Some((y + n) as usize * side + (x + n) as usize)
}

/// Lattice points of the order-`n` diamond, `|x| + |y| ≤ n`.
pub fn diamond_vertices(n: u32) -> Vec<(i32, i32)> {
    let n = n as i32;
    (-n..=n)
        .flat_map(|y| {
            let r = n - y.abs();
            (-r..=r).map(move |x| (x, y))
        })
        .collect()
}

impl HeightField {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn get(&self, x: i32, y: i32) -> Option<i32> {
        vertex_index(self.order, x, y).and_then(|i| self.values[i])
    }

    /// `(x, y, h)` for every vertex, row by row from the bottom.
    pub fn entries(&self) -> Vec<(i32, i32, i32)> {
        diamond_vertices(self.order)
            .into_iter()
            .map(|(x, y)| (x, y, self.get(x, y).expect("every vertex is assigned")))
            .collect()
    }

    /// Heights on the outer boundary `|x| + |y| = n`.
    pub fn boundary(&self) -> Vec<(i32, i32, i32)> {
        let n = self.order as i32;
        self.entries()
            .into_iter()
            .filter(|&(x, y, _)| x.abs() + y.abs() == n)
            .collect()
    }
}

/// Edges out of a vertex inside the diamond: the neighbour and the two cells
/// on either side of the connecting edge, left one first when walking out.
fn vertex_edges(x: i32, y: i32) -> [((i32, i32), Cell, Cell); 4] {
    [
        ((x + 1, y), Cell::new(x, y), Cell::new(x, y - 1)),
        ((x - 1, y), Cell::new(x - 1, y - 1), Cell::new(x - 1, y)),
        ((x, y + 1), Cell::new(x - 1, y), Cell::new(x, y)),
        ((x, y - 1), Cell::new(x, y - 1), Cell::new(x - 1, y - 1)),
    ]
}

/// Height of the height function from a raw domino list, rooted at the west
/// corner `(-n, 0)` with height 0. Any cover defect shows up as an
/// inconsistent edge.
pub fn height_function_of(n: u32, dominoes: &[Domino]) -> Result<HeightField, HeightError> {
    let mut owner: CellGrid<u32> = CellGrid::new(n, u32::MAX);
    for (id, d) in dominoes.iter().enumerate() {
        if !d.in_diamond(n) {
            return Err(HeightError::OutOfBounds(*d, n));
        }
        for c in d.cells() {
            let slot = owner.get_mut(c).expect("in diamond");
            if *slot != u32::MAX {
                return Err(HeightError::Overlap(c));
            }
            *slot = id as u32;
        }
    }
    let same = |a: Cell, b: Cell| match (owner.get(a), owner.get(b)) {
        (Some(&i), Some(&j)) => i != u32::MAX && i == j,
        _ => false,
    };
    let inside = |c: Cell| c.in_diamond(n);
    let step = |left: Cell, right: Cell| -> Option<i32> {
        if !inside(left) && !inside(right) {
            return None;
        }
        let inc = if same(left, right) { -3 } else { 1 };
        Some(if left.is_black() { inc } else { -inc })
    };

    let side = (2 * n + 1) as usize;
    let mut values: Vec<Option<i32>> = vec![None; side * side];
    let ni = n as i32;
    let root = vertex_index(n, -ni, 0).expect("west corner");
    values[root] = Some(0);
    let mut queue = VecDeque::from([(-ni, 0)]);
    while let Some((x, y)) = queue.pop_front() {
        let h = values[vertex_index(n, x, y).expect("queued inside")].expect("assigned");
        for ((nx, ny), left, right) in vertex_edges(x, y) {
            let Some(delta) = step(left, right) else {
                continue;
            };
            let Some(j) = vertex_index(n, nx, ny) else {
                continue;
            };
            match values[j] {
                None => {
                    values[j] = Some(h + delta);
                    queue.push_back((nx, ny));
                }
                Some(v) if v != h + delta => return Err(HeightError::Inconsistent(x, y, nx, ny)),
                Some(_) => {}
            }
        }
    }
    Ok(HeightField { order: n, values })
}

pub fn height_function(t: &Tiling) -> Result<HeightField, HeightError> {
    height_function_of(t.order(), t.dominoes())
}

/// Mean height at each vertex over an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageHeight {
    pub order: u32,
    pub samples: usize,
    /// `(x, y, mean)` in the order of [`diamond_vertices`].
    pub values: Vec<(i32, i32, f64)>,
}

/// Average height over `samples` shuffled tilings; replica `i` uses seed
/// `seed + i`.
pub fn average_height(n: u32, samples: usize, p: f64, seed: u64) -> Result<AverageHeight, HeightError> {
    let fields = map_replicas(n, p, seed, samples, |_, t| height_function(&t))?;
    let verts = diamond_vertices(n);
    let mut sums = vec![0i64; verts.len()];
    for f in fields {
        let f = f?;
        for (s, &(x, y)) in sums.iter_mut().zip(&verts) {
            *s += f.get(x, y).expect("assigned") as i64;
        }
    }
    let k = samples.max(1) as f64;
    Ok(AverageHeight {
        order: n,
        samples,
        values: verts
            .into_iter()
            .zip(sums)
            .map(|((x, y), s)| (x, y, s as f64 / k))
            .collect(),
    })
}

/// Least-squares plane `h ≈ a x + b y + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub max_residual: f64,
}

pub fn fit_affine(points: &[(i32, i32, f64)]) -> AffineFit {
    // Normal equations M [a b c]^T = v.
    let mut m = [[0.0f64; 3]; 3];
    let mut v = [0.0f64; 3];
    for &(x, y, h) in points {
        let row = [x as f64, y as f64, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            v[i] += row[i] * h;
        }
    }
    let [a, b, c] = solve3(m, v);
    let max_residual = points
        .iter()
        .map(|&(x, y, h)| (h - (a * x as f64 + b * y as f64 + c)).abs())
        .fold(0.0, f64::max);
    AffineFit { a, b, c, max_residual }
}

fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .expect("non-empty");
        m.swap(col, pivot);
        v.swap(col, pivot);
        let d = m[col][col];
        if d == 0.0 {
            continue;
        }
        let pivot_row = m[col];
        for r in 0..3 {
            if r != col {
                let f = m[r][col] / d;
                for (x, p) in m[r].iter_mut().zip(pivot_row).skip(col) {
                    *x -= f * p;
                }
                v[r] -= f * v[col];
            }
        }
    }
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = if m[i][i] == 0.0 { 0.0 } else { v[i] / m[i][i] };
    }
    out
}
