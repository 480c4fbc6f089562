use std::fmt;

use num_complex::Complex64;

/// One corner of the central triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Corner {
    A,
    B,
    C,
}

pub const CORNERS: [Corner; 3] = [Corner::A, Corner::B, Corner::C];

impl Corner {
    /// Roundabout successor: A→B→C→A.
    pub fn next(self) -> Corner {
        match self {
            Corner::A => Corner::B,
            Corner::B => Corner::C,
            Corner::C => Corner::A,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Corner::A => 0,
            Corner::B => 1,
            Corner::C => 2,
        }
    }
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Corner::A => "A",
            Corner::B => "B",
            Corner::C => "C",
        })
    }
}

/// A vertex of the spider graph: a triangle corner or the k-th point of one
/// of the three rays (k ≥ 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpiderVertex {
    Triangle(Corner),
    Ray(Corner, u32),
}

impl SpiderVertex {
    pub fn is_in_delta(self) -> bool {
        matches!(self, SpiderVertex::Triangle(_))
    }

    /// Combinatorial distance to the central triangle.
    pub fn delta_distance(self) -> u64 {
        match self {
            SpiderVertex::Triangle(_) => 0,
            SpiderVertex::Ray(_, k) => u64::from(k),
        }
    }

    pub fn is_in_delta_plus(self, radius: u64) -> bool {
        self.delta_distance() <= radius
    }

    /// Position along the full line of ray `x`, if this vertex lies on it:
    /// `Triangle(next(x))` (the ray's backward extension, its "beginning")
    /// sits at -1, `Triangle(x)` at 0, `Ray(x, k)` at k.
    pub fn ray_line_coordinate(self, x: Corner) -> Option<i64> {
        match self {
            SpiderVertex::Triangle(c) if c == x => Some(0),
            SpiderVertex::Triangle(c) if c == x.next() => Some(-1),
            SpiderVertex::Ray(c, k) if c == x => Some(i64::from(k)),
            _ => None,
        }
    }
}

impl fmt::Display for SpiderVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpiderVertex::Triangle(c) => write!(f, "T{c}"),
            SpiderVertex::Ray(c, k) => write!(f, "R{c}{k}"),
        }
    }
}

/// The spider graph: an equilateral triangle A=0, B=1, C=e^{iπ/3} traversed
/// one way (A→B→C→A), plus one ray per corner, collinear with the line
/// through the corner and its roundabout successor and pointing away from
/// it. Every vertex has exactly two moves of unit embedded length in
/// opposite directions, so the embedded walk is a martingale.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpiderGraph;

/// e^{iπ/3}
const CIS_60: Complex64 = Complex64::new(0.5, 0.866025403784438646763723170752936183);
/// e^{-iπ/3}
const CIS_MINUS_60: Complex64 = Complex64::new(0.5, -0.866025403784438646763723170752936183);

impl SpiderGraph {
    pub fn new() -> Self {
        SpiderGraph
    }

    /// Walks start at corner A, the origin of the embedding.
    pub fn origin(&self) -> SpiderVertex {
        SpiderVertex::Triangle(Corner::A)
    }

    /// Complex embedding of a vertex.
    pub fn position(&self, v: SpiderVertex) -> Complex64 {
        match v {
            SpiderVertex::Triangle(Corner::A) => Complex64::new(0.0, 0.0),
            SpiderVertex::Triangle(Corner::B) => Complex64::new(1.0, 0.0),
            SpiderVertex::Triangle(Corner::C) => CIS_60,
            SpiderVertex::Ray(Corner::A, k) => Complex64::new(-f64::from(k), 0.0),
            SpiderVertex::Ray(Corner::B, k) => Complex64::new(1.0, 0.0) + f64::from(k) * CIS_MINUS_60,
            SpiderVertex::Ray(Corner::C, k) => (1.0 + f64::from(k)) * CIS_60,
        }
    }

    /// The two equiprobable moves, in canonical order: the first entry is
    /// the outward choice (onto the ray at a corner, away from the triangle
    /// on a ray), the second the roundabout/backward choice.
    pub fn moves(&self, v: SpiderVertex) -> [SpiderVertex; 2] {
        match v {
            SpiderVertex::Triangle(c) => [
                SpiderVertex::Ray(c, 1),
                SpiderVertex::Triangle(c.next()),
            ],
            SpiderVertex::Ray(c, 1) => [SpiderVertex::Ray(c, 2), SpiderVertex::Triangle(c)],
            SpiderVertex::Ray(c, k) => [SpiderVertex::Ray(c, k + 1), SpiderVertex::Ray(c, k - 1)],
        }
    }

    /// Undirected shortest-path distance. Triangle edges (a 3-clique) and
    /// ray edges are all traversable in either direction by some move.
    pub fn distance(&self, u: SpiderVertex, v: SpiderVertex) -> u64 {
        use SpiderVertex::*;
        match (u, v) {
            (Triangle(a), Triangle(b)) => u64::from(a != b),
            (Triangle(a), Ray(x, k)) | (Ray(x, k), Triangle(a)) => {
                u64::from(k) + u64::from(a != x)
            }
            (Ray(x, k), Ray(y, j)) => {
                if x == y {
                    u64::from(k.abs_diff(j))
                } else {
                    u64::from(k) + u64::from(j) + 1
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, VecDeque};

    fn vertices_up_to(max_k: u32) -> Vec<SpiderVertex> {
        let mut out: Vec<SpiderVertex> = CORNERS.iter().map(|&c| SpiderVertex::Triangle(c)).collect();
        for k in 1..=max_k {
            for &c in &CORNERS {
                out.push(SpiderVertex::Ray(c, k));
            }
        }
        out
    }

    /// BFS over the undirected edge set derived from the move map, the
    /// oracle for the closed-form distance.
    fn bfs_distance(src: SpiderVertex, dst: SpiderVertex, max_k: u32) -> u64 {
        let g = SpiderGraph::new();
        let mut adj: HashMap<SpiderVertex, Vec<SpiderVertex>> = HashMap::new();
        for v in vertices_up_to(max_k) {
            for w in g.moves(v) {
                if let SpiderVertex::Ray(_, k) = w {
                    if k > max_k {
                        continue;
                    }
                }
                adj.entry(v).or_default().push(w);
                adj.entry(w).or_default().push(v);
            }
        }
        let mut dist = HashMap::new();
        dist.insert(src, 0u64);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            if v == dst {
                return dist[&v];
            }
            for &w in adj.get(&v).into_iter().flatten() {
                if !dist.contains_key(&w) {
                    dist.insert(w, dist[&v] + 1);
                    queue.push_back(w);
                }
            }
        }
        panic!("unreachable vertex");
    }

    #[test]
    fn moves_have_unit_length_and_zero_mean() {
        let g = SpiderGraph::new();
        for v in vertices_up_to(12) {
            let p = g.position(v);
            let [m1, m2] = g.moves(v);
            let d1 = g.position(m1) - p;
            let d2 = g.position(m2) - p;
            assert!((d1.norm() - 1.0).abs() < 1e-12, "move {v}→{m1} not unit");
            assert!((d2.norm() - 1.0).abs() < 1e-12, "move {v}→{m2} not unit");
            assert!((d1 + d2).norm() < 1e-12, "moves from {v} not opposite");
        }
    }

    #[test]
    fn ray_directions_are_120_degrees_apart() {
        let g = SpiderGraph::new();
        let dirs: Vec<Complex64> = CORNERS
            .iter()
            .map(|&c| {
                g.position(SpiderVertex::Ray(c, 2)) - g.position(SpiderVertex::Ray(c, 1))
            })
            .collect();
        for i in 0..3 {
            for j in i + 1..3 {
                let angle = (dirs[i] / dirs[j]).arg().abs();
                assert!(
                    (angle - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-12,
                    "rays {i} and {j} at angle {angle}"
                );
            }
        }
    }

    #[test]
    fn ray_lines_extend_through_the_roundabout_successor() {
        // the backward extension of ray X passes through next(X): positions
        // of Triangle(next(X)), Triangle(X), Ray(X, 1) are collinear and
        // unit-spaced
        let g = SpiderGraph::new();
        for &x in &CORNERS {
            let beginning = g.position(SpiderVertex::Triangle(x.next()));
            let base = g.position(SpiderVertex::Triangle(x));
            let first = g.position(SpiderVertex::Ray(x, 1));
            assert!(((base - beginning) - (first - base)).norm() < 1e-12);
        }
    }

    #[test]
    fn distance_examples() {
        let g = SpiderGraph::new();
        use Corner::*;
        use SpiderVertex::*;
        assert_eq!(g.distance(Triangle(A), Triangle(B)), 1);
        assert_eq!(g.distance(Ray(A, 1), Ray(C, 1)), 3);
        assert_eq!(g.distance(Ray(A, 2), Ray(A, 5)), 3);
        assert_eq!(g.distance(Ray(B, 4), Triangle(B)), 4);
        assert_eq!(g.distance(Ray(B, 4), Triangle(C)), 5);
    }

    #[test]
    fn closed_form_matches_bfs_oracle() {
        let g = SpiderGraph::new();
        let verts = vertices_up_to(6);
        for &u in &verts {
            for &v in &verts {
                assert_eq!(
                    g.distance(u, v),
                    bfs_distance(u, v, 16),
                    "distance mismatch for {u}, {v}"
                );
            }
        }
    }

    #[test]
    fn delta_membership() {
        use Corner::*;
        use SpiderVertex::*;
        assert!(Triangle(C).is_in_delta());
        assert!(!Ray(A, 1).is_in_delta());
        assert!(Ray(B, 2).is_in_delta_plus(2));
        assert!(!Ray(B, 3).is_in_delta_plus(2));
    }

    #[test]
    fn ray_line_coordinates() {
        use Corner::*;
        use SpiderVertex::*;
        // beginning of ray A is Triangle(B)
        assert_eq!(Triangle(B).ray_line_coordinate(A), Some(-1));
        assert_eq!(Triangle(A).ray_line_coordinate(A), Some(0));
        assert_eq!(Ray(A, 3).ray_line_coordinate(A), Some(3));
        assert_eq!(Ray(B, 3).ray_line_coordinate(A), None);
        assert_eq!(Triangle(C).ray_line_coordinate(B), Some(-1));
        assert_eq!(Triangle(A).ray_line_coordinate(C), Some(-1));
    }
}
