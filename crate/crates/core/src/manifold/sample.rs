//! Dense samples of a manifold with tangent frames and a neighbor graph.

use super::{finite_difference_tangent, ModelRef, Topology};
use crate::csvout::{fmt_f64, write_row};
use crate::error::{invalid, Error, Result};
use crate::exec::map_range;
use crate::linalg::{distance, orthonormalize};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::io::Write;

type Adjacency = Vec<Vec<(usize, f64)>>;

/// Point cloud on a manifold with parameters, orthonormal tangent frames and
/// a radius neighbor graph used for geodesic distances.
#[derive(Debug, Clone)]
pub struct ManifoldSample {
    model: ModelRef,
    params: Vec<Vec<f64>>,
    points: Vec<Vec<f64>>,
    frames: Vec<Vec<Vec<f64>>>,
    graph_radius: f64,
    adjacency: Adjacency,
}

/// Sample `count` parameters uniformly over the domain.
///
/// Circle coordinates use spacing `period / count` (no duplicate endpoint);
/// interval coordinates include both ends. For K > 1 a product grid with
/// `ceil(count^(1/K))` nodes per coordinate is truncated to `count` points.
pub fn sample_manifold(model: ModelRef, count: usize, graph_radius: f64) -> Result<ManifoldSample> {
    if count < 2 {
        return Err(invalid(format!("sample count must be >= 2, got {count}")));
    }
    let params = uniform_parameters(&model, count);
    ManifoldSample::from_parameters(model, params, graph_radius)
}

fn uniform_parameters(model: &ModelRef, count: usize) -> Vec<Vec<f64>> {
    let domain = model.domain();
    let k = domain.dim();
    let per = if k == 1 {
        count
    } else {
        let mut p = (count as f64).powf(1.0 / k as f64).ceil() as usize;
        while p.pow(k as u32) < count {
            p += 1;
        }
        p.max(2)
    };
    let coord = |c: usize, i: usize| -> f64 {
        let lo = domain.lower(c);
        let ext = domain.extent(c);
        match domain.topology() {
            Topology::Circle => lo + i as f64 * ext / per as f64,
            Topology::Interval => lo + i as f64 * ext / (per - 1) as f64,
        }
    };
    (0..count)
        .map(|mut idx| {
            (0..k)
                .map(|c| {
                    let i = idx % per;
                    idx /= per;
                    coord(c, i)
                })
                .collect()
        })
        .collect()
}

impl ManifoldSample {
    /// Build a sample at explicit parameters.
    pub fn from_parameters(
        model: ModelRef,
        params: Vec<Vec<f64>>,
        graph_radius: f64,
    ) -> Result<Self> {
        if params.len() < 2 {
            return Err(invalid(format!(
                "sample needs at least 2 points, got {}",
                params.len()
            )));
        }
        if !(graph_radius > 0.0 && graph_radius.is_finite()) {
            return Err(invalid(format!(
                "graph radius must be positive, got {graph_radius}"
            )));
        }
        let k = model.intrinsic_dim();
        if let Some(bad) = params.iter().find(|p| p.len() != k) {
            return Err(invalid(format!(
                "parameter of length {} for a {k}-dimensional model",
                bad.len()
            )));
        }
        let count = params.len();
        let points = map_range(count, |i| model.chart(&params[i]));
        let max_extent = (0..k)
            .map(|c| model.domain().extent(c))
            .fold(0.0f64, f64::max);
        let step = max_extent / (100.0 * count as f64);
        let frames = map_range(count, |i| {
            let raw = model
                .tangent(&params[i])
                .unwrap_or_else(|| finite_difference_tangent(model.as_ref(), &params[i], step));
            orthonormalize(&raw)
        });
        let frames = frames
            .into_iter()
            .enumerate()
            .map(|(i, f)| {
                f.ok_or_else(|| {
                    Error::Consistency(format!("degenerate tangent at parameter {:?}", params[i]))
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let adjacency = radius_graph(&points, graph_radius);
        if !is_connected(&adjacency) {
            let mut r = graph_radius;
            loop {
                r *= 2.0;
                if is_connected(&radius_graph(&points, r)) {
                    break;
                }
            }
            return Err(Error::GraphDisconnected {
                radius: graph_radius,
                connecting_radius: r,
            });
        }
        Ok(Self {
            model,
            params,
            points,
            frames,
            graph_radius,
            adjacency,
        })
    }

    pub fn model(&self) -> &ModelRef {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn params(&self) -> &[Vec<f64>] {
        &self.params
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn param(&self, i: usize) -> &[f64] {
        &self.params[i]
    }

    pub fn frames(&self) -> &[Vec<Vec<f64>>] {
        &self.frames
    }

    pub fn frame(&self, i: usize) -> &[Vec<f64>] {
        &self.frames[i]
    }

    pub fn graph_radius(&self) -> f64 {
        self.graph_radius
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            Err(invalid(format!(
                "point index {i} out of range for sample of size {}",
                self.len()
            )))
        } else {
            Ok(())
        }
    }

    /// Graph shortest-path distance d_M between sample points `i` and `j`.
    pub fn geodesic_distance(&self, i: usize, j: usize) -> Result<f64> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Ok(0.0);
        }
        // Search from the smaller index so the result is bit-symmetric.
        let (a, b) = (i.min(j), i.max(j));
        Ok(dijkstra(&self.adjacency, a, Some(b))[b])
    }

    /// Graph distances from `i` to every sample point.
    pub fn geodesic_row(&self, i: usize) -> Result<Vec<f64>> {
        self.check_index(i)?;
        Ok(dijkstra(&self.adjacency, i, None))
    }

    /// Geodesic distance between two arbitrary points on the manifold.
    ///
    /// Each point is attached to the sample points within the graph radius;
    /// the points are joined directly when they are themselves that close.
    pub fn geodesic_between_points(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        let n = self.model.ambient_dim();
        if a.len() != n || b.len() != n {
            return Err(invalid("point length does not match ambient dimension"));
        }
        let r = self.graph_radius;
        let direct = distance(a, b);
        if direct <= r {
            return Ok(direct);
        }
        let src = self.len();
        let dst = src + 1;
        let mut adj = self.adjacency.clone();
        adj.push(Vec::new());
        adj.push(Vec::new());
        for (i, p) in self.points.iter().enumerate() {
            let da = distance(a, p);
            if da <= r {
                adj[src].push((i, da));
                adj[i].push((src, da));
            }
            let db = distance(b, p);
            if db <= r {
                adj[dst].push((i, db));
                adj[i].push((dst, db));
            }
        }
        if adj[src].is_empty() || adj[dst].is_empty() {
            return Err(invalid(
                "point has no sample neighbor within the graph radius",
            ));
        }
        Ok(dijkstra(&adj, src, Some(dst))[dst])
    }

    /// Indices sorted by the first parameter coordinate (path order for K = 1).
    pub fn ordered_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.params[a][0].total_cmp(&self.params[b][0]));
        idx
    }

    /// Write the sample as CSV: `param_0..param_{K-1},x_0..x_{N-1}`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let k = self.model.intrinsic_dim();
        let n = self.model.ambient_dim();
        let header: Vec<String> = (0..k)
            .map(|c| format!("param_{c}"))
            .chain((0..n).map(|c| format!("x_{c}")))
            .collect();
        write_row(w, &header)?;
        for (p, x) in self.params.iter().zip(&self.points) {
            let row: Vec<String> = p.iter().chain(x).map(|&v| fmt_f64(v)).collect();
            write_row(w, &row)?;
        }
        Ok(())
    }
}

fn radius_graph(points: &[Vec<f64>], radius: f64) -> Adjacency {
    map_range(points.len(), |i| {
        points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .filter_map(|(j, q)| {
                let d = distance(&points[i], q);
                (d <= radius).then_some((j, d))
            })
            .collect()
    })
}

fn is_connected(adj: &Adjacency) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut visited = 1;
    while let Some(u) = queue.pop_front() {
        for &(v, _) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                visited += 1;
                queue.push_back(v);
            }
        }
    }
    visited == adj.len()
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra(adj: &Adjacency, source: usize, target: Option<usize>) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::from([Entry(0.0, source)]);
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if Some(u) == target {
            break;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Entry(nd, v));
            }
        }
    }
    dist
}
