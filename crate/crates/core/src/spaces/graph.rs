//! Metric graphs: finite graphs whose edges are isometric to intervals.
//!
//! Multi-edges and loops are allowed. Points live either at a vertex or at an
//! offset along an edge, measured from the edge's `a` endpoint.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when comparing sums of edge lengths.
const TIE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub len: f64,
}

/// A point of a metric graph, already canonicalized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GraphPoint {
    Vertex(usize),
    OnEdge { edge: usize, offset: f64 },
}

/// One way of leaving a point: reach `vertex` after travelling `cost`.
/// `slope` is the derivative of `cost` with respect to the point's edge offset.
#[derive(Clone, Copy, Debug)]
struct Anchor {
    vertex: usize,
    cost: f64,
    slope: f64,
}

#[derive(Clone, Debug)]
pub struct MetricGraph {
    names: Vec<String>,
    edges: Vec<Edge>,
    incidence: Vec<Vec<(usize, bool)>>,
    dist: Vec<Vec<f64>>,
    pred: Vec<Vec<Option<(usize, usize)>>>,
    path_count: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<String>,
    edges: Vec<EdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    a: String,
    b: String,
    len: f64,
}

impl MetricGraph {
    pub fn new(names: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidSpace("metric graph needs at least one vertex".into()));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.a >= n || e.b >= n {
                return Err(Error::InvalidSpace(format!("edge {i} references a missing vertex")));
            }
            if !(e.len.is_finite() && e.len > 0.0) {
                return Err(Error::InvalidSpace(format!("edge {i} has non-positive length {}", e.len)));
            }
        }
        let mut incidence = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            incidence[e.a].push((i, true));
            incidence[e.b].push((i, false));
        }
        let mut g = MetricGraph {
            names,
            edges,
            incidence,
            dist: Vec::new(),
            pred: Vec::new(),
            path_count: Vec::new(),
        };
        for s in 0..n {
            let (d, p, c) = g.dijkstra(s);
            g.dist.push(d);
            g.pred.push(p);
            g.path_count.push(c);
        }
        if g.dist[0].iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidSpace("metric graph is not connected".into()));
        }
        Ok(g)
    }

    /// Builds a graph from `(a, b, len)` triples over vertices `0..n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let names = (1..=n).map(|i| format!("v{i}")).collect();
        let edges = edges.iter().map(|&(a, b, len)| Edge { a, b, len }).collect();
        Self::new(names, edges)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let lookup = |name: &str| {
            raw.vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::Parse(format!("unknown vertex {name:?}")))
        };
        let mut edges = Vec::with_capacity(raw.edges.len());
        for e in &raw.edges {
            edges.push(Edge { a: lookup(&e.a)?, b: lookup(&e.b)?, len: e.len });
        }
        Self::new(raw.vertices.clone(), edges)
    }

    pub fn to_json_string(&self) -> String {
        let raw = GraphJson {
            vertices: self.names.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson { a: self.names[e.a].clone(), b: self.names[e.b].clone(), len: e.len })
                .collect(),
        };
        serde_json::to_string(&raw).expect("graph serializes")
    }

    /// Two vertices joined by three unit edges.
    pub fn theta() -> Self {
        Self::from_edges(2, &[(0, 1, 1.0), (0, 1, 1.0), (0, 1, 1.0)]).expect("valid")
    }

    /// Four vertices in a cycle, each consecutive pair joined by two unit edges.
    /// Edge `2i` is e⁺ and edge `2i + 1` is e⁻ between `v_i` and `v_{i+1}`.
    pub fn doubled_square() -> Self {
        let mut edges = Vec::new();
        for i in 0..4 {
            let j = (i + 1) % 4;
            edges.push((i, j, 1.0));
            edges.push((i, j, 1.0));
        }
        Self::from_edges(4, &edges).expect("valid")
    }

    pub fn single_loop(len: f64) -> Result<Self> {
        Self::from_edges(1, &[(0, 0, len)])
    }

    pub fn cycle(n: usize, len: f64) -> Result<Self> {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, len)).collect();
        Self::from_edges(n, &edges)
    }

    /// The interval `[0, len]` as a single edge between two vertices.
    pub fn interval(len: f64) -> Result<Self> {
        Self::from_edges(2, &[(0, 1, len)])
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Directed edges leaving `v`, as `(edge, forward)` with forward meaning a→b.
    pub fn incident(&self, v: usize) -> &[(usize, bool)] {
        &self.incidence[v]
    }

    pub fn vertex_distance(&self, u: usize, v: usize) -> f64 {
        self.dist[u][v]
    }

    /// First Betti number |E| − |V| + 1 (the graph is connected).
    pub fn betti(&self) -> usize {
        (self.edges.len() + 1).saturating_sub(self.names.len())
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.len).sum()
    }

    fn dijkstra(&self, source: usize) -> (Vec<f64>, Vec<Option<(usize, usize)>>, Vec<u32>) {
        let n = self.names.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![None; n];
        let mut count = vec![0u32; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        count[source] = 1;
        heap.push(HeapItem { key: 0.0, node: source });
        while let Some(HeapItem { key, node }) = heap.pop() {
            if done[node] || key > dist[node] {
                continue;
            }
            done[node] = true;
            for &(e, fwd) in &self.incidence[node] {
                let edge = &self.edges[e];
                let other = if fwd { edge.b } else { edge.a };
                if other == node {
                    continue;
                }
                let cand = key + edge.len;
                let slack = TIE * (1.0 + cand);
                if cand < dist[other] - slack {
                    dist[other] = cand;
                    pred[other] = Some((node, e));
                    count[other] = count[node];
                    heap.push(HeapItem { key: cand, node: other });
                } else if (cand - dist[other]).abs() <= slack && !done[other] {
                    count[other] = count[other].saturating_add(count[node]);
                }
            }
        }
        (dist, pred, count)
    }

    pub fn canonicalize(&self, p: GraphPoint) -> Result<GraphPoint> {
        match p {
            GraphPoint::Vertex(v) if v < self.names.len() => Ok(p),
            GraphPoint::Vertex(v) => Err(Error::PointMismatch(format!("vertex {v} out of range"))),
            GraphPoint::OnEdge { edge, offset } => {
                let e = self
                    .edges
                    .get(edge)
                    .ok_or_else(|| Error::PointMismatch(format!("edge {edge} out of range")))?;
                let tol = TIE * (1.0 + e.len);
                if !offset.is_finite() || offset < -tol || offset > e.len + tol {
                    return Err(Error::PointMismatch(format!(
                        "offset {offset} outside edge {edge} of length {}",
                        e.len
                    )));
                }
                if offset <= tol {
                    Ok(GraphPoint::Vertex(e.a))
                } else if offset >= e.len - tol {
                    Ok(GraphPoint::Vertex(e.b))
                } else {
                    Ok(p)
                }
            }
        }
    }

    fn anchors(&self, p: GraphPoint) -> ([Anchor; 2], usize) {
        match p {
            GraphPoint::Vertex(v) => {
                let a = Anchor { vertex: v, cost: 0.0, slope: 0.0 };
                ([a, a], 1)
            }
            GraphPoint::OnEdge { edge, offset } => {
                let e = &self.edges[edge];
                (
                    [
                        Anchor { vertex: e.a, cost: offset, slope: 1.0 },
                        Anchor { vertex: e.b, cost: e.len - offset, slope: -1.0 },
                    ],
                    2,
                )
            }
        }
    }

    /// Intrinsic distance between two canonical points.
    pub fn distance(&self, p: GraphPoint, q: GraphPoint) -> f64 {
        let (ap, np) = self.anchors(p);
        let (aq, nq) = self.anchors(q);
        let mut best = f64::INFINITY;
        for x in &ap[..np] {
            for y in &aq[..nq] {
                best = best.min(x.cost + self.dist[x.vertex][y.vertex] + y.cost);
            }
        }
        if let (GraphPoint::OnEdge { edge: e1, offset: s }, GraphPoint::OnEdge { edge: e2, offset: t }) = (p, q) {
            if e1 == e2 {
                best = best.min((s - t).abs());
            }
        }
        best
    }

    /// Signed initial velocity (in edge-offset units) of the minimal segment from
    /// an edge-interior point `p` to `q`; its magnitude is the distance.
    pub fn log_map(&self, p: GraphPoint, q: GraphPoint) -> Result<f64> {
        let d = self.distance(p, q);
        if d == 0.0 {
            return Ok(0.0);
        }
        let GraphPoint::OnEdge { edge, offset: s } = p else {
            return Err(Error::Nonsmooth("graph vertex has no tangent line".into()));
        };
        let tol = TIE * (1.0 + d) * 16.0;
        let mut slope: Option<f64> = None;
        let mut consider = |cost: f64, sl: f64| -> Result<()> {
            if (cost - d).abs() <= tol {
                match slope {
                    None => slope = Some(sl),
                    Some(prev) if prev != sl => {
                        return Err(Error::AmbiguousDirection(format!(
                            "two minimal segments leave edge {edge} in opposite directions"
                        )))
                    }
                    _ => {}
                }
            }
            Ok(())
        };
        let (ap, _) = self.anchors(p);
        let (aq, nq) = self.anchors(q);
        for x in &ap {
            for y in &aq[..nq] {
                consider(x.cost + self.dist[x.vertex][y.vertex] + y.cost, x.slope)?;
            }
        }
        if let GraphPoint::OnEdge { edge: e2, offset: t } = q {
            if e2 == edge && s != t {
                consider((s - t).abs(), (s - t).signum())?;
            }
        }
        Ok(-slope.expect("minimum attained by some route") * d)
    }

    /// Moves an edge-interior point by `v` offset units; fails if it would leave
    /// the open edge.
    pub fn step(&self, p: GraphPoint, v: f64) -> Result<GraphPoint> {
        match p {
            GraphPoint::Vertex(_) if v == 0.0 => Ok(p),
            GraphPoint::Vertex(_) => Err(Error::Nonsmooth("cannot step off a graph vertex".into())),
            GraphPoint::OnEdge { edge, offset } => {
                let len = self.edges[edge].len;
                let o = offset + v;
                if o <= 0.0 || o >= len {
                    Err(Error::Nonsmooth(format!("step leaves edge {edge}")))
                } else {
                    Ok(GraphPoint::OnEdge { edge, offset: o })
                }
            }
        }
    }

    /// Vertex path `u → v` as directed edges, plus whether it is the unique shortest path.
    pub fn vertex_path(&self, u: usize, v: usize) -> (Vec<(usize, bool)>, bool) {
        let mut steps = Vec::new();
        let mut cur = v;
        while cur != u {
            let (prev, e) = self.pred[u][cur].expect("connected graph");
            let fwd = self.edges[e].a == prev && self.edges[e].b == cur;
            steps.push((e, fwd));
            cur = prev;
        }
        steps.reverse();
        (steps, self.path_count[u][v] <= 1)
    }

    /// A minimal path from `p` to `q` as edge runs `(edge, from_offset, to_offset)`.
    /// Returns `None` when several distinct minimal paths exist.
    pub fn minimal_path(&self, p: GraphPoint, q: GraphPoint) -> Option<Vec<(usize, f64, f64)>> {
        let d = self.distance(p, q);
        if d == 0.0 {
            return Some(Vec::new());
        }
        let tol = TIE * (1.0 + d) * 16.0;
        let mut routes: Vec<Vec<(usize, f64, f64)>> = Vec::new();
        let mut unique = true;
        if let (GraphPoint::OnEdge { edge: e1, offset: s }, GraphPoint::OnEdge { edge: e2, offset: t }) = (p, q) {
            if e1 == e2 && ((s - t).abs() - d).abs() <= tol {
                routes.push(vec![(e1, s, t)]);
            }
        }
        let (ap, np) = self.anchors(p);
        let (aq, nq) = self.anchors(q);
        for (i, x) in ap[..np].iter().enumerate() {
            for (j, y) in aq[..nq].iter().enumerate() {
                let cost = x.cost + self.dist[x.vertex][y.vertex] + y.cost;
                if (cost - d).abs() > tol {
                    continue;
                }
                let mut route = Vec::new();
                if let GraphPoint::OnEdge { edge, offset } = p {
                    let e = &self.edges[edge];
                    route.push((edge, offset, if i == 0 { 0.0 } else { e.len }));
                }
                let (steps, uniq) = self.vertex_path(x.vertex, y.vertex);
                unique &= uniq;
                for (e, fwd) in steps {
                    let len = self.edges[e].len;
                    route.push(if fwd { (e, 0.0, len) } else { (e, len, 0.0) });
                }
                if let GraphPoint::OnEdge { edge, offset } = q {
                    let e = &self.edges[edge];
                    route.push((edge, if j == 0 { 0.0 } else { e.len }, offset));
                }
                routes.push(route);
            }
        }
        if routes.len() != 1 || !unique {
            return None;
        }
        routes.pop()
    }

    /// Exact diameter: the maximum over edge pairs of a min of affine functions
    /// is attained at a vertex of the line arrangement they induce.
    pub fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for u in 0..self.names.len() {
            for v in 0..self.names.len() {
                best = best.max(self.dist[u][v]);
            }
        }
        for e in 0..self.edges.len() {
            for f in e..self.edges.len() {
                best = best.max(self.edge_pair_max(e, f));
            }
        }
        best
    }

    fn edge_pair_max(&self, e: usize, f: usize) -> f64 {
        let ee = &self.edges[e];
        let ff = &self.edges[f];
        let (le, lf) = (ee.len, ff.len);
        // affine pieces c + α s + β t
        let mut pieces: Vec<(f64, f64, f64)> = Vec::new();
        for (cs, al, u) in [(0.0, 1.0, ee.a), (le, -1.0, ee.b)] {
            for (ct, be, w) in [(0.0, 1.0, ff.a), (lf, -1.0, ff.b)] {
                pieces.push((cs + ct + self.dist[u][w], al, be));
            }
        }
        if e == f {
            pieces.push((0.0, 1.0, -1.0));
            pieces.push((0.0, -1.0, 1.0));
        }
        // lines as a s + b t = c
        let mut lines: Vec<(f64, f64, f64)> = vec![(1.0, 0.0, 0.0), (1.0, 0.0, le), (0.0, 1.0, 0.0), (0.0, 1.0, lf)];
        for i in 0..pieces.len() {
            for j in (i + 1)..pieces.len() {
                let (ci, ai, bi) = pieces[i];
                let (cj, aj, bj) = pieces[j];
                let (a, b) = (ai - aj, bi - bj);
                if a != 0.0 || b != 0.0 {
                    lines.push((a, b, cj - ci));
                }
            }
        }
        let eval = |s: f64, t: f64| pieces.iter().map(|&(c, a, b)| c + a * s + b * t).fold(f64::INFINITY, f64::min);
        let mut best = f64::NEG_INFINITY;
        let inside = |s: f64, t: f64| s >= -1e-12 && s <= le + 1e-12 && t >= -1e-12 && t <= lf + 1e-12;
        for i in 0..lines.len() {
            for j in (i + 1)..lines.len() {
                let (a1, b1, c1) = lines[i];
                let (a2, b2, c2) = lines[j];
                let det = a1 * b2 - a2 * b1;
                if det.abs() < 1e-15 {
                    continue;
                }
                let s = (c1 * b2 - c2 * b1) / det;
                let t = (a1 * c2 - a2 * c1) / det;
                if inside(s, t) {
                    best = best.max(eval(s.clamp(0.0, le), t.clamp(0.0, lf)));
                }
            }
        }
        best
    }

    /// Eccentricity `sup_q d(p, q)`, exact for a fixed point `p`.
    pub fn eccentricity(&self, p: GraphPoint) -> f64 {
        let (ap, np) = self.anchors(p);
        let mut best: f64 = 0.0;
        for v in 0..self.names.len() {
            best = best.max(ap[..np].iter().map(|x| x.cost + self.dist[x.vertex][v]).fold(f64::INFINITY, f64::min));
        }
        for (fi, f) in self.edges.iter().enumerate() {
            // pieces c + β t along edge f
            let mut pieces: Vec<(f64, f64)> = Vec::new();
            for x in &ap[..np] {
                pieces.push((x.cost + self.dist[x.vertex][f.a], 1.0));
                pieces.push((x.cost + self.dist[x.vertex][f.b] + f.len, -1.0));
            }
            if let GraphPoint::OnEdge { edge, offset } = p {
                if edge == fi {
                    pieces.push((-offset, 1.0));
                    pieces.push((offset, -1.0));
                }
            }
            let eval = |t: f64| pieces.iter().map(|&(c, b)| c + b * t).fold(f64::INFINITY, f64::min);
            let mut cands = vec![0.0, f.len];
            for i in 0..pieces.len() {
                for j in (i + 1)..pieces.len() {
                    let (ci, bi) = pieces[i];
                    let (cj, bj) = pieces[j];
                    if bi != bj {
                        let t = (cj - ci) / (bi - bj);
                        if (0.0..=f.len).contains(&t) {
                            cands.push(t);
                        }
                    }
                }
            }
            for t in cands {
                best = best.max(eval(t));
            }
        }
        best
    }

    /// Vertices followed by evenly spaced interior points with spacing ≤ `density`.
    pub fn probe_points(&self, density: f64) -> Vec<GraphPoint> {
        let mut out: Vec<GraphPoint> = (0..self.names.len()).map(GraphPoint::Vertex).collect();
        for (i, e) in self.edges.iter().enumerate() {
            let m = (e.len / density).ceil().max(1.0) as usize;
            for j in 1..m {
                out.push(GraphPoint::OnEdge { edge: i, offset: e.len * j as f64 / m as f64 });
            }
        }
        out
    }
}

#[derive(PartialEq)]
struct HeapItem {
    key: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.total_cmp(&self.key).then_with(|| self.node.cmp(&other.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
