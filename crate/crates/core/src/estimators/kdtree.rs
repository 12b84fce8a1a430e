//! A static k-d tree under the maximum (Chebyshev) norm.
//!
//! Supports exactly the two queries the KSG estimator needs: distance to the
//! k-th nearest neighbour of a stored point, and the number of stored points
//! strictly inside a max-norm ball around a stored point.

use std::collections::BinaryHeap;

use ordered::OrdF64;

const LEAF_SIZE: usize = 12;

#[derive(Debug)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { dim: usize, value: f64, left: usize, right: usize },
}

#[derive(Debug)]
pub struct KdTree {
    points: Vec<f64>,
    dim: usize,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl KdTree {
    /// `points` is row-major with `dim` coordinates per point.
    pub fn new(points: Vec<f64>, dim: usize) -> Self {
        assert!(dim > 0, "k-d tree needs at least one dimension");
        assert_eq!(points.len() % dim, 0);
        let n = points.len() / dim;
        let mut tree = Self {
            points,
            dim,
            order: (0..n).collect(),
            nodes: Vec::with_capacity(2 * n / LEAF_SIZE + 1),
        };
        if n > 0 {
            tree.build(0, n);
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    fn dist(&self, a: &[f64], b: usize) -> f64 {
        let b = self.point(b);
        a.iter()
            .zip(b)
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { start, end });
        if end - start <= LEAF_SIZE {
            return id;
        }
        let (dim, spread) = (0..self.dim)
            .map(|d| {
                let (lo, hi) = self.order[start..end].iter().fold(
                    (f64::INFINITY, f64::NEG_INFINITY),
                    |(lo, hi), &i| {
                        let v = self.points[i * self.dim + d];
                        (lo.min(v), hi.max(v))
                    },
                );
                (d, hi - lo)
            })
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if spread <= 0.0 {
            return id;
        }
        let mid = start + (end - start) / 2;
        let (points, stride) = (&self.points, self.dim);
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points[a * stride + dim].total_cmp(&points[b * stride + dim])
        });
        let value = self.points[self.order[mid] * self.dim + dim];
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id] = Node::Split { dim, value, left, right };
        id
    }

    /// Max-norm distance from stored point `query` to its `k`-th nearest other point.
    pub fn kth_neighbor_distance(&self, query: usize, k: usize) -> f64 {
        assert!(k >= 1 && k < self.len(), "need 1 <= k < n");
        let q = self.point(query).to_vec();
        let mut heap: BinaryHeap<OrdF64> = BinaryHeap::with_capacity(k + 1);
        self.knn_visit(0, &q, query, k, 0.0, &mut heap);
        heap.peek().expect("k >= 1 neighbours found").0
    }

    fn knn_visit(
        &self,
        node: usize,
        q: &[f64],
        skip: usize,
        k: usize,
        bound: f64,
        heap: &mut BinaryHeap<OrdF64>,
    ) {
        if heap.len() == k && bound >= heap.peek().unwrap().0 {
            return;
        }
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    if i == skip {
                        continue;
                    }
                    let d = self.dist(q, i);
                    if heap.len() < k {
                        heap.push(OrdF64(d));
                    } else if d < heap.peek().unwrap().0 {
                        heap.pop();
                        heap.push(OrdF64(d));
                    }
                }
            }
            Node::Split { dim, value, left, right } => {
                let diff = q[dim] - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.knn_visit(near, q, skip, k, bound, heap);
                self.knn_visit(far, q, skip, k, bound.max(diff.abs()), heap);
            }
        }
    }

    /// Number of stored points other than `query` at max-norm distance strictly below `radius`.
    pub fn count_within(&self, query: usize, radius: f64) -> usize {
        let q = self.point(query).to_vec();
        self.count_visit(0, &q, query, radius, 0.0)
    }

    fn count_visit(&self, node: usize, q: &[f64], skip: usize, radius: f64, bound: f64) -> usize {
        if bound >= radius {
            return 0;
        }
        match self.nodes[node] {
            Node::Leaf { start, end } => self.order[start..end]
                .iter()
                .filter(|&&i| i != skip && self.dist(q, i) < radius)
                .count(),
            Node::Split { dim, value, left, right } => {
                let diff = q[dim] - value;
                let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                self.count_visit(near, q, skip, radius, bound)
                    + self.count_visit(far, q, skip, radius, bound.max(diff.abs()))
            }
        }
    }
}

mod ordered {
    use std::cmp::Ordering;

    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct OrdF64(pub f64);

    impl Eq for OrdF64 {}

    impl PartialOrd for OrdF64 {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }

    impl Ord for OrdF64 {
        fn cmp(&self, other: &Self) -> Ordering {
            self.0.total_cmp(&other.0)
        }
    }
}
