//! Exact Euclidean first and second nearest neighbours.
//!
//! Candidates are ordered by `(squared distance, tie key)`. The tie key is a
//! hash of `(seed, query, candidate)`, so among exactly equidistant points the
//! winner is uniform and independent of the traversal order. Because the same
//! total order drives both the first and the second neighbour, `nn2(i)` is
//! always the nearest neighbour of `i` once `nn1(i)` is removed.

use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_len, Error, Result};
use crate::rng::splitmix64;

const LEAF_SIZE: usize = 8;
const PARALLEL_MIN_N: usize = 4096;

/// First and second nearest neighbour of every row (0-based indices).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborTable {
    nn1: Vec<usize>,
    nn2: Vec<usize>,
    tie_events: usize,
    seed: u64,
}

impl NeighborTable {
    pub fn len(&self) -> usize {
        self.nn1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nn1.is_empty()
    }

    pub fn nn1(&self) -> &[usize] {
        &self.nn1
    }

    pub fn nn2(&self) -> &[usize] {
        &self.nn2
    }

    /// Number of rows whose first or second neighbour was decided by a
    /// distance tie.
    pub fn tie_events(&self) -> usize {
        self.tie_events
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Nearest neighbour of `i` among all rows other than `i` and `j`.
    pub fn resolve_excluded_neighbor(&self, i: usize, j: usize) -> Result<usize> {
        let n = self.len();
        if i >= n || j >= n {
            return Err(Error::Input(format!(
                "row index out of range ({i}, {j}) for n = {n}"
            )));
        }
        if i == j {
            return Err(Error::Input(format!(
                "excluded row must differ from the query row ({i})"
            )));
        }
        Ok(if self.nn1[i] == j {
            self.nn2[i]
        } else {
            self.nn1[i]
        })
    }
}

/// Free-function form of [`NeighborTable::resolve_excluded_neighbor`].
pub fn resolve_excluded_neighbor(table: &NeighborTable, i: usize, j: usize) -> Result<usize> {
    table.resolve_excluded_neighbor(i, j)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStrategy {
    /// Tree when `p <= tree_max_dim` and `n >= tree_min_n`, scan otherwise.
    #[default]
    Auto,
    Tree,
    Scan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NeighborConfig {
    pub strategy: SearchStrategy,
    pub tree_max_dim: usize,
    pub tree_min_n: usize,
}

impl Default for NeighborConfig {
    fn default() -> Self {
        Self {
            strategy: SearchStrategy::Auto,
            // Measured crossover at n = 2000: the tree wins up to p = 6.
            tree_max_dim: 6,
            tree_min_n: 64,
        }
    }
}

impl NeighborConfig {
    pub fn scan() -> Self {
        Self {
            strategy: SearchStrategy::Scan,
            ..Self::default()
        }
    }

    pub fn tree() -> Self {
        Self {
            strategy: SearchStrategy::Tree,
            ..Self::default()
        }
    }

    fn use_tree(&self, n: usize, p: usize) -> bool {
        match self.strategy {
            SearchStrategy::Tree => true,
            SearchStrategy::Scan => false,
            SearchStrategy::Auto => p <= self.tree_max_dim && n >= self.tree_min_n,
        }
    }
}

/// Tie-breaking priority of candidate `k` for query row `i`.
#[inline]
pub fn tie_key(seed: u64, i: usize, k: usize) -> u64 {
    splitmix64(splitmix64(seed ^ (i as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93)) ^ k as u64)
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (u, v) in a.iter().zip(b) {
        let d = u - v;
        s += d * d;
    }
    s
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Candidate {
    pub d2: f64,
    pub key: u64,
    pub idx: usize,
}

impl Candidate {
    #[inline]
    pub fn precedes(&self, other: &Candidate) -> bool {
        (self.d2, self.key, self.idx) < (other.d2, other.key, other.idx)
    }
}

#[derive(Debug, Clone, Copy)]
struct Best3 {
    items: [Candidate; 3],
    len: usize,
}

impl Best3 {
    fn new() -> Self {
        let empty = Candidate {
            d2: f64::INFINITY,
            key: u64::MAX,
            idx: usize::MAX,
        };
        Self {
            items: [empty; 3],
            len: 0,
        }
    }

    #[inline]
    fn bound(&self) -> f64 {
        if self.len < 3 {
            f64::INFINITY
        } else {
            self.items[2].d2
        }
    }

    #[inline]
    fn offer(&mut self, c: Candidate) {
        if self.len == 3 && !c.precedes(&self.items[2]) {
            return;
        }
        let mut pos = self.len.min(2);
        if self.len < 3 {
            self.len += 1;
        }
        while pos > 0 && c.precedes(&self.items[pos - 1]) {
            self.items[pos] = self.items[pos - 1];
            pos -= 1;
        }
        self.items[pos] = c;
    }

    fn has_tie(&self) -> bool {
        self.items[0].d2 == self.items[1].d2
            || (self.len == 3 && self.items[1].d2 == self.items[2].d2)
    }
}

struct Rows<'a> {
    data: &'a [f64],
    p: usize,
}

impl<'a> Rows<'a> {
    #[inline]
    fn row(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }
}

enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

struct KdTree<'a> {
    rows: Rows<'a>,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> KdTree<'a> {
    fn build(rows: Rows<'a>, n: usize) -> Self {
        let mut tree = Self {
            rows,
            order: (0..n).collect(),
            nodes: Vec::with_capacity(2 * n / LEAF_SIZE + 1),
        };
        tree.build_node(0, n);
        tree
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let p = self.rows.p;
        let mut axis = 0;
        let mut widest = 0.0;
        for a in 0..p {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &k in &self.order[start..end] {
                let v = self.rows.data[k * p + a];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if hi - lo > widest {
                widest = hi - lo;
                axis = a;
            }
        }
        if widest == 0.0 {
            // All points coincide; every candidate is a tie anyway.
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let mid = start + (end - start) / 2;
        let data = self.rows.data;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            data[a * p + axis].partial_cmp(&data[b * p + axis]).unwrap()
        });
        let value = data[self.order[mid] * p + axis];
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    fn query(&self, i: usize, seed: u64) -> Best3 {
        let mut best = Best3::new();
        self.search(0, i, self.rows.row(i), seed, &mut best);
        best
    }

    fn search(&self, node: usize, i: usize, q: &[f64], seed: u64, best: &mut Best3) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &k in &self.order[start..end] {
                    if k == i {
                        continue;
                    }
                    let d2 = sq_dist(q, self.rows.row(k));
                    if d2 <= best.bound() {
                        best.offer(Candidate {
                            d2,
                            key: tie_key(seed, i, k),
                            idx: k,
                        });
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.search(near, i, q, seed, best);
                // Points across the plane are at least |diff| away along `axis`;
                // equality must still be visited because ties are decided by key.
                if diff * diff <= best.bound() {
                    self.search(far, i, q, seed, best);
                }
            }
        }
    }
}

fn scan_query(rows: &Rows<'_>, n: usize, i: usize, seed: u64) -> Best3 {
    let q = rows.row(i);
    let mut best = Best3::new();
    for k in (0..n).filter(|&k| k != i) {
        let d2 = sq_dist(q, rows.row(k));
        if d2 <= best.bound() {
            best.offer(Candidate {
                d2,
                key: tie_key(seed, i, k),
                idx: k,
            });
        }
    }
    best
}

/// Builds the neighbour table with the default search configuration.
pub fn build_neighbor_table(x: ArrayView2<'_, f64>, seed: u64) -> Result<NeighborTable> {
    build_neighbor_table_with(x, seed, &NeighborConfig::default())
}

pub fn build_neighbor_table_with(
    x: ArrayView2<'_, f64>,
    seed: u64,
    config: &NeighborConfig,
) -> Result<NeighborTable> {
    let (n, p) = x.dim();
    ensure_len(n, 3)?;
    if p == 0 {
        return Err(Error::Input("covariate matrix has no columns".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("covariates contain a non-finite value".into()));
    }
    let x = x.as_standard_layout();
    let rows = Rows {
        data: x.as_slice().expect("standard layout"),
        p,
    };

    let results: Vec<Best3> = if config.use_tree(n, p) {
        let tree = KdTree::build(rows, n);
        if n >= PARALLEL_MIN_N {
            (0..n)
                .into_par_iter()
                .map(|i| tree.query(i, seed))
                .collect()
        } else {
            (0..n).map(|i| tree.query(i, seed)).collect()
        }
    } else if n >= PARALLEL_MIN_N {
        (0..n)
            .into_par_iter()
            .map(|i| scan_query(&rows, n, i, seed))
            .collect()
    } else {
        (0..n).map(|i| scan_query(&rows, n, i, seed)).collect()
    };

    let tie_events = results.iter().filter(|b| b.has_tie()).count();
    Ok(NeighborTable {
        nn1: results.iter().map(|b| b.items[0].idx).collect(),
        nn2: results.iter().map(|b| b.items[1].idx).collect(),
        tie_events,
        seed,
    })
}

/// All rows other than `i`, sorted by the same `(distance, tie key)` order the
/// table uses. O(n p + n log n) per call; meant for brute-force checks.
pub fn exhaustive_neighbor_order(x: ArrayView2<'_, f64>, i: usize, seed: u64) -> Vec<usize> {
    let n = x.nrows();
    let q: Vec<f64> = x.row(i).to_vec();
    let mut cands: Vec<Candidate> = (0..n)
        .filter(|&k| k != i)
        .map(|k| {
            let row: Vec<f64> = x.row(k).to_vec();
            Candidate {
                d2: sq_dist(&q, &row),
                key: tie_key(seed, i, k),
                idx: k,
            }
        })
        .collect();
    cands.sort_by(|a, b| {
        (a.d2, a.key, a.idx)
            .partial_cmp(&(b.d2, b.key, b.idx))
            .unwrap()
    });
    cands.into_iter().map(|c| c.idx).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::Rng;

    use crate::rng::rng_from_seed;

    #[test]
    fn three_points_on_a_line() {
        let x = array![[0.0], [1.0], [3.0]];
        for seed in 0..20 {
            let t = build_neighbor_table(x.view(), seed).unwrap();
            assert_eq!(t.nn1(), &[1, 0, 1]);
            assert_eq!(t.nn2(), &[2, 2, 0]);
            assert_eq!(t.tie_events(), 0);
            assert_eq!(t.resolve_excluded_neighbor(0, 2).unwrap(), 1);
            assert_eq!(t.resolve_excluded_neighbor(0, 1).unwrap(), 2);
            assert!(t.resolve_excluded_neighbor(0, 0).is_err());
        }
    }

    #[test]
    fn duplicate_rows_pair_up() {
        let x = array![[2.0, 2.0], [2.0, 2.0], [40.0, -3.0]];
        for seed in 0..50 {
            let t = build_neighbor_table(x.view(), seed).unwrap();
            assert_eq!(t.nn1()[0], 1);
            assert_eq!(t.nn1()[1], 0);
        }
    }

    #[test]
    fn equidistant_tie_is_uniform() {
        let x = array![[0.0], [1.0], [2.0]];
        let seeds = 10_000u64;
        let left = (0..seeds)
            .filter(|&s| build_neighbor_table(x.view(), s).unwrap().nn1()[1] == 0)
            .count();
        let freq = left as f64 / seeds as f64;
        assert!((freq - 0.5).abs() <= 0.05, "frequency {freq}");
    }

    #[test]
    fn rejects_small_or_non_finite_input() {
        assert!(matches!(
            build_neighbor_table(array![[0.0], [1.0]].view(), 0),
            Err(Error::InsufficientSample { needed: 3, got: 2 })
        ));
        assert!(matches!(
            build_neighbor_table(array![[0.0], [f64::NAN], [1.0]].view(), 0),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn tree_matches_scan_on_random_and_tied_data() {
        let mut rng = rng_from_seed(77);
        for case in 0..60 {
            let n = rng.random_range(3..300);
            let p = [1, 2, 3, 5][case % 4];
            let coarse = case % 3 == 0;
            let x = Array2::from_shape_fn((n, p), |_| {
                if coarse {
                    rng.random_range(0..4) as f64
                } else {
                    rng.random::<f64>()
                }
            });
            let tree =
                build_neighbor_table_with(x.view(), case as u64, &NeighborConfig::tree()).unwrap();
            let scan =
                build_neighbor_table_with(x.view(), case as u64, &NeighborConfig::scan()).unwrap();
            assert_eq!(tree, scan, "case {case}");
        }
    }

    #[test]
    fn constant_covariate_is_handled() {
        let x = Array2::from_elem((200, 1), 1.5);
        let t = build_neighbor_table_with(x.view(), 3, &NeighborConfig::tree()).unwrap();
        assert_eq!(t.tie_events(), 200);
        for i in 0..200 {
            assert_ne!(t.nn1()[i], i);
            assert_ne!(t.nn2()[i], t.nn1()[i]);
        }
    }
}
