//! Closed curves parametrized at constant speed L/(2π) over [0, 2π).

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::mesh::{norm, sub};
use crate::spaces::{dotv, GraphPoint, LengthSpace, MeshPoint, SpacePoint};

pub const TWO_PI: f64 = 2.0 * PI;
/// Default parameter grid step for "for all t" checks.
pub const DEFAULT_DELTA: f64 = TWO_PI / 1024.0;
/// Finest grid step tried before a check is reported undecided.
pub const DELTA_FLOOR: f64 = TWO_PI / 65536.0;
pub const DEFAULT_K_MAX: usize = 16;

/// A minimizing piece of a closed curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Piece {
    /// Along a graph edge between two offsets (either direction).
    Edge { edge: usize, from: f64, to: f64 },
    /// Circle arc from an arclength position by a signed displacement.
    Arc { start: f64, delta: f64 },
    /// Straight torus segment with an unwrapped displacement.
    Line { start: Vec<f64>, delta: Vec<f64> },
    /// Great-circle arc from a unit vector along a unit tangent.
    GreatArc { start: Vec<f64>, tangent: Vec<f64>, angle: f64 },
    /// Straight segment inside one mesh face.
    Flat { face: usize, from: [f64; 3], to: [f64; 3], length: f64 },
}

impl Piece {
    pub fn length(&self) -> f64 {
        match self {
            Piece::Edge { from, to, .. } => (to - from).abs(),
            Piece::Arc { delta, .. } => delta.abs(),
            Piece::Line { delta, .. } => dotv(delta, delta).sqrt(),
            Piece::GreatArc { angle, .. } => *angle,
            Piece::Flat { length, .. } => *length,
        }
    }

    /// Point at arclength `s` from the start of the piece.
    pub fn point_at(&self, space: &LengthSpace, s: f64) -> SpacePoint {
        let len = self.length();
        let s = s.clamp(0.0, len);
        match self {
            Piece::Edge { edge, from, to } => {
                let off = if to >= from { from + s } else { from - s };
                let g = space.as_graph().expect("edge piece on a graph");
                let p = GraphPoint::OnEdge { edge: *edge, offset: off.clamp(0.0, g.edge(*edge).len) };
                SpacePoint::Graph(g.canonicalize(p).unwrap_or(p))
            }
            Piece::Arc { start, delta } => {
                let c = space.circumferences().expect("arc on a circle")[0];
                SpacePoint::Circle((start + delta.signum() * s).rem_euclid(c))
            }
            Piece::Line { start, delta } => {
                let cs = space.circumferences().expect("line on a torus");
                let f = if len > 0.0 { s / len } else { 0.0 };
                SpacePoint::Torus(start.iter().zip(delta).zip(&cs).map(|((a, d), c)| (a + f * d).rem_euclid(*c)).collect())
            }
            Piece::GreatArc { start, tangent, .. } => {
                let v: Vec<f64> = start.iter().zip(tangent).map(|(p, t)| s.cos() * p + s.sin() * t).collect();
                let n = dotv(&v, &v).sqrt();
                SpacePoint::Sphere(v.iter().map(|x| x / n).collect())
            }
            Piece::Flat { face, from, to, .. } => {
                let f = if len > 0.0 { s / len } else { 0.0 };
                let b = [0, 1, 2].map(|i| from[i] + f * (to[i] - from[i]));
                let m = space.as_mesh().expect("flat piece on a mesh");
                SpacePoint::Mesh(m.normalize(MeshPoint { face: *face, bary: b }))
            }
        }
    }

    fn start_point(&self, space: &LengthSpace) -> SpacePoint {
        self.point_at(space, 0.0)
    }

    fn end_point(&self, space: &LengthSpace) -> SpacePoint {
        self.point_at(space, self.length())
    }
}

/// Ternary outcome of a 1/k check. `margin` is L/k − min g (positive means a
/// deficit) and `t` the parameter where the minimum was seen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CheckOutcome {
    Holds { margin: f64 },
    Violated { margin: f64, t: f64 },
    Inconclusive { margin: f64, t: f64 },
}

impl CheckOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, CheckOutcome::Holds { .. })
    }
    pub fn violated(&self) -> bool {
        matches!(self, CheckOutcome::Violated { .. })
    }
    pub fn margin(&self) -> f64 {
        match self {
            CheckOutcome::Holds { margin } | CheckOutcome::Violated { margin, .. } | CheckOutcome::Inconclusive { margin, .. } => {
                *margin
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OpenOutcome {
    Open,
    NotOpen,
    Inconclusive,
}

/// Result of an index search over a range of k. Serializes as the index
/// itself, the string "exceeds", or `{"undecided": k}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexResult {
    Found(usize),
    /// No k ≤ k_max qualifies.
    Exceeds,
    /// The check at this k stayed inconclusive at the finest grid and no
    /// smaller k qualifies.
    Undecided(usize),
}

impl Serialize for IndexResult {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            IndexResult::Found(k) => ser.serialize_u64(*k as u64),
            IndexResult::Exceeds => ser.serialize_str("exceeds"),
            IndexResult::Undecided(k) => {
                let mut m = ser.serialize_map(Some(1))?;
                m.serialize_entry("undecided", k)?;
                m.end()
            }
        }
    }
}

impl IndexResult {
    pub fn found(&self) -> Option<usize> {
        match self {
            IndexResult::Found(k) => Some(*k),
            _ => None,
        }
    }
}

/// Grid settings for certified checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub delta: f64,
    pub floor: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { delta: DEFAULT_DELTA, floor: DELTA_FLOOR }
    }
}

impl GridConfig {
    pub fn with_delta(delta: f64) -> Self {
        GridConfig { delta, floor: DELTA_FLOOR.min(delta) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveReport {
    pub length: f64,
    pub is_geodesic: bool,
    pub minind: IndexResult,
    pub opind: IndexResult,
    pub injrad: f64,
    pub injrad_tolerance: f64,
    pub margins: Vec<(usize, CheckOutcome)>,
}

#[derive(Clone, Debug)]
pub struct ClosedCurve {
    space: Arc<LengthSpace>,
    pieces: Vec<Piece>,
    cum: Vec<f64>,
    length: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Graph,
    Uniform,
    Grid,
}

fn same(space: &LengthSpace, p: &SpacePoint, q: &SpacePoint) -> bool {
    space.same_point(p, q) || space.distance(p, q).map_or(false, |d| d <= 1e-9)
}

impl ClosedCurve {
    /// Builds a curve from contiguous pieces. Zero-length pieces are dropped.
    pub fn from_pieces(space: Arc<LengthSpace>, pieces: Vec<Piece>) -> Result<Self> {
        let pieces: Vec<Piece> = pieces.into_iter().filter(|p| p.length() > 0.0).collect();
        if pieces.is_empty() {
            return Err(Error::InvalidCurve("curve has zero length".into()));
        }
        for p in &pieces {
            let ok = match (&*space, p) {
                (LengthSpace::MetricGraph(g), Piece::Edge { edge, from, to }) => {
                    *edge < g.edges().len() && [from, to].iter().all(|x| (0.0..=g.edge(*edge).len).contains(*x))
                }
                (LengthSpace::Circle { .. }, Piece::Arc { .. }) => true,
                (LengthSpace::FlatTorus { diameters }, Piece::Line { start, delta }) => {
                    start.len() == diameters.len() && delta.len() == diameters.len()
                }
                (LengthSpace::RoundSphere { dim }, Piece::GreatArc { start, tangent, .. }) => {
                    start.len() == dim + 1 && tangent.len() == dim + 1 && dotv(start, tangent).abs() < 1e-9
                }
                (LengthSpace::MeshSurface(m), Piece::Flat { face, .. }) => *face < m.faces().len(),
                _ => false,
            };
            if !ok {
                return Err(Error::InvalidCurve(format!("piece {p:?} does not fit a {} space", space.kind())));
            }
        }
        for i in 0..pieces.len() {
            let end = pieces[i].end_point(&space);
            let next = pieces[(i + 1) % pieces.len()].start_point(&space);
            if !same(&space, &end, &next) {
                return Err(Error::InvalidCurve(format!("piece {i} does not end where piece {} starts", (i + 1) % pieces.len())));
            }
        }
        let mut cum = Vec::with_capacity(pieces.len() + 1);
        let mut acc = 0.0;
        for p in &pieces {
            cum.push(acc);
            acc += p.length();
        }
        cum.push(acc);
        Ok(ClosedCurve { space, pieces, cum, length: acc })
    }

    /// Joins consecutive breakpoints by minimizing segments. Where the
    /// minimizing segment is not unique, `witnesses[i]` must supply the pieces
    /// from breakpoint i to i+1.
    pub fn from_breakpoints(
        space: Arc<LengthSpace>,
        points: &[SpacePoint],
        witnesses: Option<&[Option<Vec<Piece>>]>,
    ) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidCurve("need at least two breakpoints".into()));
        }
        let pts: Vec<SpacePoint> = points.iter().map(|p| space.canonicalize(p)).collect::<Result<_>>()?;
        let n = pts.len();
        let mut pieces = Vec::new();
        for i in 0..n {
            let (p, q) = (&pts[i], &pts[(i + 1) % n]);
            if let Some(Some(w)) = witnesses.and_then(|w| w.get(i)) {
                let d = space.distance(p, q)?;
                let len: f64 = w.iter().map(Piece::length).sum();
                if (len - d).abs() > space.length_tolerance(d) {
                    return Err(Error::InvalidCurve(format!("witness {i} has length {len}, distance is {d}")));
                }
                pieces.extend(w.iter().cloned());
                continue;
            }
            if same(&space, p, q) {
                continue;
            }
            pieces.extend(minimal_segment(&space, p, q).ok_or(Error::AmbiguousSegment { index: i, next: (i + 1) % n })?);
        }
        Self::from_pieces(space, pieces)
    }

    /// Closed walk on a graph given as (edge, forward) steps.
    pub fn graph_walk(space: Arc<LengthSpace>, walk: &[(usize, bool)]) -> Result<Self> {
        let g = space.as_graph().ok_or_else(|| Error::InvalidCurve("graph walk on a non-graph space".into()))?;
        if walk.is_empty() {
            return Err(Error::InvalidCurve("empty walk".into()));
        }
        let mut pieces = Vec::with_capacity(walk.len());
        for &(e, fwd) in walk {
            if e >= g.edges().len() {
                return Err(Error::InvalidCurve(format!("edge {e} out of range")));
            }
            let len = g.edge(e).len;
            pieces.push(if fwd { Piece::Edge { edge: e, from: 0.0, to: len } } else { Piece::Edge { edge: e, from: len, to: 0.0 } });
        }
        Self::from_pieces(space, pieces)
    }

    /// The circle traversed `n` times (negative `n` reverses orientation).
    pub fn circle_loop(space: Arc<LengthSpace>, start: f64, n: i64) -> Result<Self> {
        let c = match &*space {
            LengthSpace::Circle { diameter } => 2.0 * diameter,
            _ => return Err(Error::InvalidCurve("circle loop on a non-circle space".into())),
        };
        Self::from_pieces(space, vec![Piece::Arc { start, delta: n as f64 * c }])
    }

    /// Closed straight line on a flat torus with integer winding vector `a`.
    pub fn torus_line(space: Arc<LengthSpace>, start: Vec<f64>, a: &[i64]) -> Result<Self> {
        let cs = space.circumferences().filter(|c| c.len() == a.len() && matches!(*space, LengthSpace::FlatTorus { .. }));
        let cs = cs.ok_or_else(|| Error::InvalidCurve("winding vector does not match the torus".into()))?;
        let delta = a.iter().zip(&cs).map(|(k, c)| *k as f64 * c).collect();
        Self::from_pieces(space, vec![Piece::Line { start, delta }])
    }

    /// Great circle through `start` with initial unit direction `tangent`, traversed `n` times.
    pub fn great_circle(space: Arc<LengthSpace>, start: Vec<f64>, tangent: Vec<f64>, n: u32) -> Result<Self> {
        Self::from_pieces(space, vec![Piece::GreatArc { start, tangent, angle: TWO_PI * n as f64 }])
    }

    /// Closed loop along mesh edges through the given vertices.
    pub fn mesh_vertex_loop(space: Arc<LengthSpace>, vertices: &[usize]) -> Result<Self> {
        let m = space.as_mesh().ok_or_else(|| Error::InvalidCurve("vertex loop on a non-mesh space".into()))?;
        let mut pieces = Vec::with_capacity(vertices.len());
        for i in 0..vertices.len() {
            let (a, b) = (vertices[i], vertices[(i + 1) % vertices.len()]);
            let (face, from, to) = m.edge_piece(a, b)?;
            let length = norm(sub(m.vertices()[a], m.vertices()[b]));
            pieces.push(Piece::Flat { face, from, to, length });
        }
        Self::from_pieces(space, pieces)
    }

    pub fn space(&self) -> &Arc<LengthSpace> {
        &self.space
    }
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Start point of every piece.
    pub fn breakpoints(&self) -> Vec<SpacePoint> {
        self.pieces.iter().map(|p| p.start_point(&self.space)).collect()
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        self.pieces.iter().map(Piece::length).collect()
    }

    /// Parameters at which pieces start.
    pub fn breakpoint_params(&self) -> Vec<f64> {
        self.cum[..self.pieces.len()].iter().map(|c| c / self.length * TWO_PI).collect()
    }

    pub fn point_at_length(&self, s: f64) -> SpacePoint {
        let s = s.rem_euclid(self.length);
        let i = self.cum.partition_point(|&c| c <= s).saturating_sub(1).min(self.pieces.len() - 1);
        self.pieces[i].point_at(&self.space, s - self.cum[i])
    }

    pub fn eval(&self, t: f64) -> SpacePoint {
        self.point_at_length(t.rem_euclid(TWO_PI) / TWO_PI * self.length)
    }

    pub fn iterate(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("iterate count must be ≥ 1".into()));
        }
        let pieces = (0..n).flat_map(|_| self.pieces.iter().cloned()).collect();
        Self::from_pieces(self.space.clone(), pieces)
    }

    /// Same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        let pieces: Vec<Piece> = self
            .pieces
            .iter()
            .rev()
            .map(|p| match p {
                Piece::Edge { edge, from, to } => Piece::Edge { edge: *edge, from: *to, to: *from },
                Piece::Arc { start, delta } => Piece::Arc { start: start + delta, delta: -delta },
                Piece::Line { start, delta } => Piece::Line {
                    start: start.iter().zip(delta).map(|(s, d)| s + d).collect(),
                    delta: delta.iter().map(|d| -d).collect(),
                },
                Piece::GreatArc { start, tangent, angle } => {
                    let (c, s) = (angle.cos(), angle.sin());
                    let end: Vec<f64> = start.iter().zip(tangent).map(|(p, t)| c * p + s * t).collect();
                    let back: Vec<f64> = start.iter().zip(tangent).map(|(p, t)| s * p - c * t).collect();
                    Piece::GreatArc { start: end, tangent: back, angle: *angle }
                }
                Piece::Flat { face, from, to, length } => Piece::Flat { face: *face, from: *to, to: *from, length: *length },
            })
            .collect();
        Self::from_pieces(self.space.clone(), pieces).expect("reversal of a valid curve")
    }

    /// Tolerance for length equalities on this curve's scale.
    pub fn tolerance(&self) -> f64 {
        self.space.length_tolerance(self.length)
    }

    /// Lipschitz slack of g on a grid of step `delta`.
    pub fn tol_cert(&self, delta: f64) -> f64 {
        self.length / PI * delta
    }

    fn mode(&self) -> Mode {
        match &*self.space {
            LengthSpace::MetricGraph(_) => Mode::Graph,
            LengthSpace::MeshSurface(_) => Mode::Grid,
            _ if self.is_uniform() => Mode::Uniform,
            _ => Mode::Grid,
        }
    }

    /// True when the curve is an orbit of a one-parameter isometry group (a
    /// single-direction circle, torus line or great circle), so that every
    /// parameter looks alike.
    pub fn is_uniform(&self) -> bool {
        match &self.pieces[0] {
            Piece::Arc { delta: d0, .. } => self.pieces.iter().all(|p| matches!(p, Piece::Arc { delta, .. } if delta.signum() == d0.signum())),
            Piece::Line { delta: d0, .. } => {
                let n0 = dotv(d0, d0).sqrt();
                self.pieces.iter().all(|p| match p {
                    Piece::Line { delta, .. } => {
                        let n = dotv(delta, delta).sqrt();
                        delta.iter().zip(d0).all(|(a, b)| (a / n - b / n0).abs() < 1e-12)
                    }
                    _ => false,
                })
            }
            Piece::GreatArc { start: s0, tangent: t0, .. } => self.pieces.iter().all(|p| match p {
                Piece::GreatArc { start, tangent, .. } => {
                    let proj = |v: &Vec<f64>| (dotv(v, s0), dotv(v, t0));
                    let (a, b) = proj(start);
                    let (c, d) = proj(tangent);
                    let res = |v: &Vec<f64>, x: f64, y: f64| {
                        v.iter().zip(s0).zip(t0).map(|((v, s), t)| (v - x * s - y * t).powi(2)).sum::<f64>().sqrt()
                    };
                    res(start, a, b) < 1e-9 && res(tangent, c, d) < 1e-9 && a * d - b * c > 0.5
                }
                _ => false,
            }),
            _ => false,
        }
    }

    fn g_at(&self, s: f64, h: f64) -> Result<f64> {
        let g = self.space.distance(&self.point_at_length(s), &self.point_at_length(s + h))?;
        debug_assert!(
            matches!(*self.space, LengthSpace::MeshSurface(_)) || g <= h + 1e-7 * (1.0 + self.length),
            "distance {g} exceeds arclength {h}"
        );
        Ok(g)
    }

    /// Whether d(γ(t), γ(t + 2π/k)) = L/k for all t.
    pub fn check_one_over_k(&self, k: usize, delta: f64) -> Result<CheckOutcome> {
        self.check_one_over_k_with(k, &GridConfig::with_delta(delta))
    }

    pub fn check_one_over_k_with(&self, k: usize, grid: &GridConfig) -> Result<CheckOutcome> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("k must be ≥ 2, got {k}")));
        }
        if !(grid.delta > 0.0) {
            return Err(Error::InvalidArgument("grid step must be positive".into()));
        }
        let h = self.length / k as f64;
        let tol = self.tolerance();
        match self.mode() {
            Mode::Uniform => {
                let m = h - self.g_at(0.0, h)?;
                Ok(if m > tol { CheckOutcome::Violated { margin: m, t: 0.0 } } else { CheckOutcome::Holds { margin: m } })
            }
            Mode::Graph => {
                let (m, s) = self.graph_min_gap(h)?;
                let t = s / self.length * TWO_PI;
                Ok(if m > tol { CheckOutcome::Violated { margin: m, t } } else { CheckOutcome::Holds { margin: m } })
            }
            Mode::Grid => {
                let mut delta = grid.delta;
                loop {
                    let (m, s) = self.grid_min_gap(h, delta)?;
                    let t = s / self.length * TWO_PI;
                    if m <= tol {
                        return Ok(CheckOutcome::Holds { margin: m });
                    }
                    if m > self.tol_cert(delta) {
                        return Ok(CheckOutcome::Violated { margin: m, t });
                    }
                    if delta / 2.0 < grid.floor * (1.0 - 1e-12) {
                        return Ok(CheckOutcome::Inconclusive { margin: m, t });
                    }
                    delta /= 2.0;
                }
            }
        }
    }

    /// Largest value of h − g over the grid plus breakpoints and their shifts,
    /// with the arclength where it occurs.
    fn grid_min_gap(&self, h: f64, delta: f64) -> Result<(f64, f64)> {
        let n = (TWO_PI / delta).ceil() as usize;
        let mut params: Vec<f64> = (0..n).map(|i| i as f64 * self.length / n as f64).collect();
        for &c in &self.cum[..self.pieces.len()] {
            params.push(c);
            params.push((c - h).rem_euclid(self.length));
        }
        self.worst_gap(&params, h)
    }

    fn worst_gap(&self, params: &[f64], h: f64) -> Result<(f64, f64)> {
        let gaps: Vec<(f64, f64)> =
            params.par_iter().map(|&s| self.g_at(s, h).map(|g| (h - g, s))).collect::<Result<_>>()?;
        Ok(gaps.into_iter().fold((f64::NEG_INFINITY, 0.0), |a, b| if b.0 > a.0 { b } else { a }))
    }

    /// Exact worst gap on a metric graph: between consecutive critical
    /// arclengths both points travel along fixed edges, so g is a minimum of
    /// affine functions except where two points on one edge pass each other.
    fn graph_min_gap(&self, h: f64) -> Result<(f64, f64)> {
        let l = self.length;
        let mut crit: Vec<f64> = Vec::with_capacity(2 * self.pieces.len());
        for &c in &self.cum[..self.pieces.len()] {
            crit.push(c);
            crit.push((c - h).rem_euclid(l));
        }
        crit.sort_by(f64::total_cmp);
        crit.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * (1.0 + l));
        let mut extra = Vec::new();
        for i in 0..crit.len() {
            let a = crit[i];
            let b = if i + 1 < crit.len() { crit[i + 1] } else { crit[0] + l };
            if b - a <= 0.0 {
                continue;
            }
            let mid = 0.5 * (a + b);
            if let (Some((ep, op, vp)), Some((eq, oq, vq))) = (self.edge_motion(mid), self.edge_motion(mid + h)) {
                if ep == eq && vp != vq {
                    let s = mid + (oq - op) / (vp - vq);
                    if s > a && s < b {
                        extra.push(s.rem_euclid(l));
                    }
                }
            }
        }
        crit.extend(extra);
        self.worst_gap(&crit, h)
    }

    /// Edge, offset and offset velocity of the graph point at arclength `s`.
    fn edge_motion(&self, s: f64) -> Option<(usize, f64, f64)> {
        let s = s.rem_euclid(self.length);
        let i = self.cum.partition_point(|&c| c <= s).saturating_sub(1).min(self.pieces.len() - 1);
        match &self.pieces[i] {
            Piece::Edge { edge, from, to } => {
                let v = if to >= from { 1.0 } else { -1.0 };
                Some((*edge, from + v * (s - self.cum[i]), v))
            }
            _ => None,
        }
    }

    /// Smallest k in 2..=k_max for which the curve is a 1/k geodesic.
    pub fn minimizing_index(&self, k_max: usize, grid: &GridConfig) -> Result<IndexResult> {
        let mut undecided = None;
        for k in 2..=k_max {
            match self.check_one_over_k_with(k, grid)? {
                CheckOutcome::Holds { .. } => return Ok(undecided.map_or(IndexResult::Found(k), IndexResult::Undecided)),
                CheckOutcome::Inconclusive { .. } if undecided.is_none() => undecided = Some(k),
                _ => {}
            }
        }
        Ok(undecided.map_or(IndexResult::Exceeds, IndexResult::Undecided))
    }

    /// Largest h ≤ L/2 such that the curve minimizes on [s, s + h].
    fn minimizing_reach(&self, s: f64) -> Result<f64> {
        // much tighter than the equality tolerance so that the overshoot past
        // the true reach stays far below the reported error
        let tol = match *self.space {
            LengthSpace::MeshSurface(_) => self.tolerance(),
            _ => 1e-12 * (1.0 + self.length),
        };
        let top = self.length / 2.0;
        let ok = |h: f64| -> Result<bool> { Ok(self.g_at(s, h)? >= h - tol) };
        let steps = 16;
        let mut lo = 0.0;
        let mut hi = None;
        for j in 1..=steps {
            let h = top * j as f64 / steps as f64;
            if ok(h)? {
                lo = h;
            } else {
                hi = Some(h);
                break;
            }
        }
        let Some(mut hi) = hi else { return Ok(top) };
        while hi - lo > 1e-13 * (1.0 + self.length) {
            let mid = 0.5 * (lo + hi);
            if ok(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }

    /// Injectivity radius of the curve and its certified error.
    pub fn curve_injrad(&self, delta: f64) -> Result<(f64, f64)> {
        if self.mode() == Mode::Uniform {
            return Ok((self.minimizing_reach(0.0)?, self.tolerance()));
        }
        let n = (TWO_PI / delta).ceil() as usize;
        let mut params: Vec<f64> = (0..n).map(|i| i as f64 * self.length / n as f64).collect();
        params.extend_from_slice(&self.cum[..self.pieces.len()]);
        let reaches: Vec<f64> = params.par_iter().map(|&s| self.minimizing_reach(s)).collect::<Result<_>>()?;
        let rho = reaches.into_iter().fold(f64::INFINITY, f64::min);
        Ok((rho, self.length / n as f64 + self.tolerance()))
    }

    /// Decides openness once the 1/k check holds: `rho` is a grid estimate of
    /// the injectivity radius, never below the true value and at most `err` above.
    fn open_verdict(&self, k: usize, rho: f64, err: f64) -> Option<bool> {
        let h = self.length / k as f64;
        if rho <= h + self.tolerance() {
            Some(false)
        } else if rho > h + err {
            Some(true)
        } else {
            None
        }
    }

    /// Whether the curve is an openly 1/k geodesic: a 1/k geodesic whose
    /// injectivity radius strictly exceeds L/k.
    pub fn open_check(&self, k: usize, grid: &GridConfig) -> Result<OpenOutcome> {
        self.open_check_cached(k, grid, None)
    }

    fn open_check_cached(&self, k: usize, grid: &GridConfig, first: Option<(f64, f64)>) -> Result<OpenOutcome> {
        match self.check_one_over_k_with(k, grid)? {
            CheckOutcome::Violated { .. } => return Ok(OpenOutcome::NotOpen),
            CheckOutcome::Inconclusive { .. } => return Ok(OpenOutcome::Inconclusive),
            CheckOutcome::Holds { .. } => {}
        }
        let mut delta = grid.delta;
        let mut reach = first;
        loop {
            let (rho, err) = match reach.take() {
                Some(r) => r,
                None => self.curve_injrad(delta)?,
            };
            match self.open_verdict(k, rho, err) {
                Some(true) => return Ok(OpenOutcome::Open),
                Some(false) => return Ok(OpenOutcome::NotOpen),
                None if delta / 2.0 < grid.floor * (1.0 - 1e-12) => return Ok(OpenOutcome::Inconclusive),
                None => delta /= 2.0,
            }
        }
    }

    pub fn is_openly(&self, k: usize, grid: &GridConfig) -> Result<bool> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("k must be ≥ 2, got {k}")));
        }
        Ok(self.open_check(k, grid)? == OpenOutcome::Open)
    }

    /// Smallest k in 3..=k_max for which the curve is openly 1/k.
    pub fn open_index(&self, k_max: usize, grid: &GridConfig) -> Result<IndexResult> {
        let first = self.curve_injrad(grid.delta)?;
        let mut undecided = None;
        for k in 3..=k_max {
            match self.open_check_cached(k, grid, Some(first))? {
                OpenOutcome::Open => return Ok(undecided.map_or(IndexResult::Found(k), IndexResult::Undecided)),
                OpenOutcome::Inconclusive if undecided.is_none() => undecided = Some(k),
                _ => {}
            }
        }
        Ok(undecided.map_or(IndexResult::Exceeds, IndexResult::Undecided))
    }

    /// Whether the curve is locally minimizing everywhere, decided by 1/k
    /// checks at k = k₀, 2k₀, 4k₀, ... where k₀ resolves the shortest piece.
    pub fn is_closed_geodesic(&self, grid: &GridConfig) -> Result<bool> {
        let shortest = self.pieces.iter().map(Piece::length).fold(f64::INFINITY, f64::min);
        let k0 = ((self.length / shortest).ceil() as usize).max(2);
        let cap = (4 * k0).max(64);
        let mut k = k0;
        while k <= cap {
            if self.check_one_over_k_with(k, grid)?.holds() {
                return Ok(true);
            }
            k *= 2;
        }
        Ok(false)
    }

    pub fn report(&self, k_max: usize, grid: &GridConfig) -> Result<CurveReport> {
        let margins: Vec<(usize, CheckOutcome)> =
            (2..=k_max).map(|k| self.check_one_over_k_with(k, grid).map(|c| (k, c))).collect::<Result<_>>()?;
        let minind = self.minimizing_index(k_max, grid)?;
        let opind = self.open_index(k_max, grid)?;
        let (injrad, injrad_tolerance) = self.curve_injrad(grid.delta)?;
        Ok(CurveReport { length: self.length, is_geodesic: self.is_closed_geodesic(grid)?, minind, opind, injrad, injrad_tolerance, margins })
    }
}

/// Unique minimizing pieces from `p` to `q`, or `None` when not unique.
pub fn minimal_segment(space: &LengthSpace, p: &SpacePoint, q: &SpacePoint) -> Option<Vec<Piece>> {
    match (space, p, q) {
        (LengthSpace::Circle { .. }, SpacePoint::Circle(a), _) => {
            let v = space.log_map(p, q).ok()?;
            Some(vec![Piece::Arc { start: *a, delta: v[0] }])
        }
        (LengthSpace::FlatTorus { .. }, SpacePoint::Torus(a), _) => {
            let v = space.log_map(p, q).ok()?;
            Some(vec![Piece::Line { start: a.clone(), delta: v }])
        }
        (LengthSpace::RoundSphere { .. }, SpacePoint::Sphere(a), _) => {
            let v = space.log_map(p, q).ok()?;
            let angle = dotv(&v, &v).sqrt();
            if angle == 0.0 {
                return Some(Vec::new());
            }
            Some(vec![Piece::GreatArc { start: a.clone(), tangent: v.iter().map(|x| x / angle).collect(), angle }])
        }
        (LengthSpace::MetricGraph(g), SpacePoint::Graph(a), SpacePoint::Graph(b)) => {
            let path = g.minimal_path(*a, *b)?;
            Some(path.into_iter().map(|(edge, from, to)| Piece::Edge { edge, from, to }).collect())
        }
        (LengthSpace::MeshSurface(m), SpacePoint::Mesh(a), SpacePoint::Mesh(b)) => Some(
            m.minimal_path(a, b)
                .into_iter()
                .map(|(face, from, to)| {
                    let length = norm(sub(m.position(&MeshPoint { face, bary: from }), m.position(&MeshPoint { face, bary: to })));
                    Piece::Flat { face, from, to, length }
                })
                .collect(),
        ),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::MetricGraph;

    fn grid() -> GridConfig {
        GridConfig::default()
    }

    #[test]
    fn equator_basics() {
        let s = Arc::new(LengthSpace::sphere(2).unwrap());
        let eq = ClosedCurve::great_circle(s.clone(), vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], 1).unwrap();
        let SpacePoint::Sphere(x) = eq.eval(PI) else { panic!() };
        assert!((x[0] + 1.0).abs() < 1e-12);
        assert_eq!(eq.minimizing_index(16, &grid()).unwrap(), IndexResult::Found(2));
        let (rho, _) = eq.curve_injrad(DEFAULT_DELTA).unwrap();
        assert!((rho - PI).abs() < 1e-9);
        assert!(eq.is_openly(3, &grid()).unwrap());
        assert!(!eq.is_openly(2, &grid()).unwrap());
        assert!(eq.is_closed_geodesic(&grid()).unwrap());
        let twice = eq.iterate(2).unwrap();
        assert!((twice.length() - 4.0 * PI).abs() < 1e-12);
        assert_eq!(twice.minimizing_index(16, &grid()).unwrap(), IndexResult::Found(4));
    }

    #[test]
    fn torus_lines_follow_the_winding_formula() {
        let t = Arc::new(LengthSpace::torus(vec![PI, PI / 2.0]).unwrap());
        for (a, b) in [(1i64, 0i64), (1, 2), (2, 3), (0, 1), (-1, 1)] {
            let c = ClosedCurve::torus_line(t.clone(), vec![0.3, 0.1], &[a, b]).unwrap();
            let expect = 2 * a.abs().max(b.abs()) as usize;
            assert_eq!(c.minimizing_index(16, &grid()).unwrap(), IndexResult::Found(expect), "({a},{b})");
            assert_eq!(c.open_index(16, &grid()).unwrap(), IndexResult::Found(expect + 1), "({a},{b})");
        }
        let c = ClosedCurve::torus_line(t.clone(), vec![0.0, 0.0], &[1, 0]).unwrap();
        let SpacePoint::Torus(x) = c.eval(PI / 2.0) else { panic!() };
        assert!((x[0] - PI / 2.0).abs() < 1e-12 && x[1].abs() < 1e-12);
        let (rho, _) = c.curve_injrad(DEFAULT_DELTA).unwrap();
        assert!((rho - PI).abs() < 1e-9);
        let c = ClosedCurve::torus_line(t, vec![0.0, 0.0], &[1, 2]).unwrap();
        assert!(c.check_one_over_k(3, DEFAULT_DELTA).unwrap().violated());
    }

    #[test]
    fn theta_loop() {
        let g = Arc::new(LengthSpace::MetricGraph(MetricGraph::theta()));
        let c = ClosedCurve::graph_walk(g, &[(0, true), (1, false)]).unwrap();
        assert_eq!(c.eval(PI), SpacePoint::Graph(GraphPoint::Vertex(1)));
        assert_eq!(c.minimizing_index(16, &grid()).unwrap(), IndexResult::Found(2));
        let (rho, err) = c.curve_injrad(DEFAULT_DELTA).unwrap();
        assert!((rho - 1.0).abs() <= err);
        assert!(c.is_closed_geodesic(&grid()).unwrap());
    }

    #[test]
    fn backtracking_walk_is_not_geodesic() {
        let g = Arc::new(LengthSpace::MetricGraph(MetricGraph::theta()));
        let c = ClosedCurve::graph_walk(g, &[(0, true), (0, false)]).unwrap();
        assert!(!c.is_closed_geodesic(&grid()).unwrap());
    }

    #[test]
    fn doubled_square_zigzag() {
        let g = Arc::new(LengthSpace::MetricGraph(MetricGraph::doubled_square()));
        let c = ClosedCurve::graph_walk(g, &[(0, true), (3, true), (4, true), (7, true)]).unwrap();
        assert!(c.check_one_over_k(2, DEFAULT_DELTA).unwrap().holds());
        assert!(c.is_openly(4, &grid()).unwrap());
    }

    #[test]
    fn breakpoints_need_witness_when_ambiguous() {
        let c = Arc::new(LengthSpace::circle(PI).unwrap());
        let pts = [SpacePoint::Circle(0.0), SpacePoint::Circle(PI)];
        assert!(matches!(ClosedCurve::from_breakpoints(c.clone(), &pts, None), Err(Error::AmbiguousSegment { .. })));
        let w = vec![Some(vec![Piece::Arc { start: 0.0, delta: PI }]), Some(vec![Piece::Arc { start: PI, delta: PI }])];
        let curve = ClosedCurve::from_breakpoints(c, &pts, Some(&w)).unwrap();
        assert!((curve.length() - TWO_PI).abs() < 1e-12);
    }

    #[test]
    fn reversal_preserves_length_and_index() {
        let t = Arc::new(LengthSpace::torus(vec![PI, PI]).unwrap());
        let c = ClosedCurve::torus_line(t, vec![0.5, 0.25], &[2, 1]).unwrap();
        let r = c.reversed();
        assert!((c.length() - r.length()).abs() < 1e-12);
        assert_eq!(c.minimizing_index(16, &grid()).unwrap(), r.minimizing_index(16, &grid()).unwrap());
    }
}
