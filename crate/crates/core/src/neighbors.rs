//! Exact k-nearest-neighbour search: brute force and a k-d tree.
//!
//! Both searches rank candidates by `(distance, row index)`, so distance
//! ties always resolve to the lower row index and the two give identical
//! answers.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
    Manhattan,
}

impl Metric {
    /// Order-preserving surrogate of the distance (squared for Euclidean).
    #[inline]
    pub fn rank_distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum(),
            Metric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }

    /// Converts a rank distance back into the metric distance.
    pub fn distance_from_rank(self, r: f64) -> f64 {
        match self {
            Metric::Euclidean => r.sqrt(),
            Metric::Manhattan => r,
        }
    }

    /// Rank-distance lower bound contributed by one axis gap.
    #[inline]
    fn axis_bound(self, gap: f64) -> f64 {
        match self {
            Metric::Euclidean => gap * gap,
            Metric::Manhattan => gap.abs(),
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        self.distance_from_rank(self.rank_distance(a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    /// Rank distance, see [`Metric::rank_distance`].
    pub rank: f64,
}

impl Neighbor {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.rank.total_cmp(&other.rank).then(self.index.cmp(&other.index))
    }
}

impl Eq for Neighbor {}

impl PartialOrd for Neighbor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Neighbor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key_cmp(other)
    }
}

/// The `k` rows of `points` (row-major, `d` columns) closest to `query`,
/// nearest first, optionally skipping row `exclude`.
pub fn brute_force(points: &[f64], d: usize, query: &[f64], k: usize, metric: Metric, exclude: Option<usize>) -> Vec<Neighbor> {
    let mut all: Vec<Neighbor> = points
        .chunks_exact(d)
        .enumerate()
        .filter(|(i, _)| Some(*i) != exclude)
        .map(|(index, p)| Neighbor {
            index,
            rank: metric.rank_distance(query, p),
        })
        .collect();
    let k = k.min(all.len());
    if k == 0 {
        return Vec::new();
    }
    if k < all.len() {
        all.select_nth_unstable(k - 1);
        all.truncate(k);
        all.shrink_to_fit();
    }
    all.sort_unstable();
    all
}

const LEAF_SIZE: usize = 16;

enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: Box<Node>, right: Box<Node> },
}

/// Static k-d tree over a copy of the points.
pub struct KdTree {
    points: Vec<f64>,
    d: usize,
    /// Row order after partitioning; leaves own contiguous ranges of it.
    order: Vec<usize>,
    root: Node,
    metric: Metric,
}

impl KdTree {
    pub fn new(points: &[f64], d: usize, metric: Metric) -> Self {
        assert!(d > 0 && points.len().is_multiple_of(d), "points must be n x d");
        let n = points.len() / d;
        let mut order: Vec<usize> = (0..n).collect();
        let root = Self::build(points, d, &mut order, 0);
        KdTree {
            points: points.to_vec(),
            d,
            order,
            root,
            metric,
        }
    }

    fn build(points: &[f64], d: usize, order: &mut [usize], start: usize) -> Node {
        let len = order.len();
        if len <= LEAF_SIZE {
            return Node::Leaf { start, end: start + len };
        }
        // split the axis with the widest spread at its median
        let axis = (0..d)
            .map(|a| {
                let (lo, hi) = order.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                    let v = points[i * d + a];
                    (lo.min(v), hi.max(v))
                });
                (a, hi - lo)
            })
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
            .0;
        let mid = len / 2;
        order.select_nth_unstable_by(mid, |&a, &b| points[a * d + axis].total_cmp(&points[b * d + axis]));
        let value = points[order[mid] * d + axis];
        let (lo, hi) = order.split_at_mut(mid);
        Node::Split {
            axis,
            value,
            left: Box::new(Self::build(points, d, lo, start)),
            right: Box::new(Self::build(points, d, hi, start + mid)),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn query(&self, query: &[f64], k: usize, exclude: Option<usize>) -> Vec<Neighbor> {
        if k == 0 {
            return Vec::new();
        }
        let mut heap = BinaryHeap::with_capacity(k + 1);
        self.search(&self.root, query, k, exclude, &mut heap);
        heap.into_sorted_vec()
    }

    fn search(&self, node: &Node, q: &[f64], k: usize, exclude: Option<usize>, heap: &mut BinaryHeap<Neighbor>) {
        match node {
            Node::Leaf { start, end } => {
                for &i in &self.order[*start..*end] {
                    if Some(i) == exclude {
                        continue;
                    }
                    let cand = Neighbor {
                        index: i,
                        rank: self.metric.rank_distance(q, self.row(i)),
                    };
                    if heap.len() < k {
                        heap.push(cand);
                    } else if cand < *heap.peek().expect("heap is full") {
                        heap.pop();
                        heap.push(cand);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let gap = q[*axis] - value;
                // points equal to `value` can sit on either side
                let (near, far) = if gap < 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, k, exclude, heap);
                let bound = self.metric.axis_bound(gap);
                // equal bounds are still visited: a tie may have a lower index
                if heap.len() < k || bound <= heap.peek().expect("heap is full").rank {
                    self.search(far, q, k, exclude, heap);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn result_holds_only_k() {
        let pts: Vec<f64> = (0..1000).map(f64::from).collect();
        let nn = brute_force(&pts, 1, &[10.2], 3, Metric::Euclidean, None);
        assert_eq!(nn.capacity(), 3);
    }

    #[test]
    fn ties_go_to_lower_index() {
        let pts = [0.0, 1.0, -1.0, 1.0, 2.0];
        let nn = brute_force(&pts, 1, &[0.0], 3, Metric::Euclidean, None);
        let idx: Vec<usize> = nn.iter().map(|n| n.index).collect();
        assert_eq!(idx, vec![0, 1, 2]);
        let nn = brute_force(&pts, 1, &[0.0], 2, Metric::Euclidean, Some(0));
        assert_eq!(nn.iter().map(|n| n.index).collect::<Vec<_>>(), vec![1, 2]);
    }

    proptest! {
        #[test]
        fn kd_tree_matches_brute_force(
            raw in proptest::collection::vec(0i32..6, 3..600),
            k in 1usize..12,
            manhattan in any::<bool>(),
        ) {
            let d = 3;
            let n = raw.len() / d;
            let pts: Vec<f64> = raw[..n * d].iter().map(|&v| v as f64).collect();
            let metric = if manhattan { Metric::Manhattan } else { Metric::Euclidean };
            let tree = KdTree::new(&pts, d, metric);
            for (i, q) in pts.chunks_exact(d).enumerate().take(20) {
                let a = tree.query(q, k, Some(i));
                let b = brute_force(&pts, d, q, k, metric, Some(i));
                prop_assert_eq!(a, b);
            }
        }
    }
}
