//! Compact length spaces with a uniform distance oracle.

pub mod graph;
pub mod mesh;

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use graph::{Edge, GraphPoint, MetricGraph};
pub use mesh::{MeshPoint, MeshSurface};

/// Global tolerance for length comparisons on graph and analytic spaces.
pub const EPS_LEN: f64 = 1e-9;

/// A finite metric space given by its distance matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetric {
    dist: Vec<Vec<f64>>,
}

impl FiniteMetric {
    pub fn new(dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::InvalidSpace("finite metric needs at least one point".into()));
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidSpace("distance matrix must be square".into()));
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidSpace(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let d = row[j];
                if !d.is_finite() || d < 0.0 || (i != j && d == 0.0) {
                    return Err(Error::InvalidSpace(format!("bad distance d({i},{j}) = {d}")));
                }
                if (d - dist[j][i]).abs() > EPS_LEN * (1.0 + d) {
                    return Err(Error::InvalidSpace(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if dist[i][k] > dist[i][j] + dist[j][k] + EPS_LEN * (1.0 + dist[i][k]) {
                        return Err(Error::InvalidSpace(format!("triangle inequality fails on ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(FiniteMetric { dist })
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }
}

#[derive(Clone, Debug)]
pub enum LengthSpace {
    FiniteMetric(FiniteMetric),
    MetricGraph(MetricGraph),
    /// Circle of the given diameter; circumference is twice the diameter.
    Circle { diameter: f64 },
    /// Product of circles with the given diameters.
    FlatTorus { diameters: Vec<f64> },
    /// Unit sphere S^n in R^(n+1).
    RoundSphere { dim: usize },
    MeshSurface(MeshSurface),
}

/// A point of a [`LengthSpace`]. Circle and torus coordinates are arclength
/// positions, reduced modulo each factor's circumference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpacePoint {
    Index(usize),
    Graph(GraphPoint),
    Circle(f64),
    Torus(Vec<f64>),
    Sphere(Vec<f64>),
    Mesh(MeshPoint),
}

/// An r-net: every probe point of the parent space lies within `r` of `points`.
#[derive(Clone, Debug)]
pub struct NetSample {
    pub points: Vec<SpacePoint>,
    pub r: f64,
    /// Largest probe-to-net distance actually observed.
    pub covering: f64,
}

fn mismatch(space: &LengthSpace, p: &SpacePoint) -> Error {
    Error::PointMismatch(format!("{:?} is not a point of a {} space", p, space.kind()))
}

fn wrap(x: f64, c: f64) -> f64 {
    let r = x.rem_euclid(c);
    if r >= c {
        0.0
    } else {
        r
    }
}

/// Signed shortest displacement from `a` to `b` on a circle of circumference `c`.
fn arc_delta(a: f64, b: f64, c: f64) -> f64 {
    let mut d = (b - a).rem_euclid(c);
    if d > c / 2.0 {
        d -= c;
    }
    d
}

impl LengthSpace {
    pub fn circle(diameter: f64) -> Result<Self> {
        if !(diameter > 0.0 && diameter.is_finite()) {
            return Err(Error::InvalidSpace("circle diameter must be positive".into()));
        }
        Ok(LengthSpace::Circle { diameter })
    }

    pub fn torus(diameters: Vec<f64>) -> Result<Self> {
        if diameters.is_empty() || diameters.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::InvalidSpace("torus needs positive factor diameters".into()));
        }
        Ok(LengthSpace::FlatTorus { diameters })
    }

    pub fn sphere(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpace("sphere dimension must be ≥ 1".into()));
        }
        Ok(LengthSpace::RoundSphere { dim })
    }

    /// The unit interval as a two-vertex metric graph.
    pub fn interval() -> Self {
        LengthSpace::MetricGraph(MetricGraph::interval(1.0).expect("unit interval is valid"))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LengthSpace::FiniteMetric(_) => "finite",
            LengthSpace::MetricGraph(_) => "graph",
            LengthSpace::Circle { .. } => "circle",
            LengthSpace::FlatTorus { .. } => "torus",
            LengthSpace::RoundSphere { .. } => "sphere",
            LengthSpace::MeshSurface(_) => "mesh",
        }
    }

    /// Whether distances and segments are computed in closed form.
    pub fn is_analytic(&self) -> bool {
        matches!(self, LengthSpace::Circle { .. } | LengthSpace::FlatTorus { .. } | LengthSpace::RoundSphere { .. })
    }

    /// Topological dimension (graphs count as 1, finite spaces as 0).
    pub fn dimension(&self) -> usize {
        match self {
            LengthSpace::FiniteMetric(_) => 0,
            LengthSpace::MetricGraph(_) | LengthSpace::Circle { .. } => 1,
            LengthSpace::FlatTorus { diameters } => diameters.len(),
            LengthSpace::RoundSphere { dim } => *dim,
            LengthSpace::MeshSurface(_) => 2,
        }
    }

    /// Tolerance for deciding that two lengths of size about `scale` agree.
    pub fn length_tolerance(&self, scale: f64) -> f64 {
        match self {
            LengthSpace::MeshSurface(m) => m.tolerance() * (1.0 + scale),
            _ => EPS_LEN * (1.0 + scale),
        }
    }

    pub fn circumferences(&self) -> Option<Vec<f64>> {
        match self {
            LengthSpace::Circle { diameter } => Some(vec![2.0 * diameter]),
            LengthSpace::FlatTorus { diameters } => Some(diameters.iter().map(|d| 2.0 * d).collect()),
            _ => None,
        }
    }

    /// Validates a point and maps it to its canonical representation.
    pub fn canonicalize(&self, p: &SpacePoint) -> Result<SpacePoint> {
        match (self, p) {
            (LengthSpace::FiniteMetric(m), SpacePoint::Index(i)) if *i < m.len() => Ok(p.clone()),
            (LengthSpace::MetricGraph(g), SpacePoint::Graph(x)) => Ok(SpacePoint::Graph(g.canonicalize(*x)?)),
            (LengthSpace::Circle { diameter }, SpacePoint::Circle(x)) if x.is_finite() => {
                Ok(SpacePoint::Circle(wrap(*x, 2.0 * diameter)))
            }
            (LengthSpace::FlatTorus { diameters }, SpacePoint::Torus(x))
                if x.len() == diameters.len() && x.iter().all(|v| v.is_finite()) =>
            {
                Ok(SpacePoint::Torus(x.iter().zip(diameters).map(|(v, d)| wrap(*v, 2.0 * d)).collect()))
            }
            (LengthSpace::RoundSphere { dim }, SpacePoint::Sphere(x)) if x.len() == dim + 1 => {
                let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if (n - 1.0).abs() > 1e-6 {
                    return Err(Error::PointMismatch(format!("sphere point has norm {n}")));
                }
                Ok(SpacePoint::Sphere(x.iter().map(|v| v / n).collect()))
            }
            (LengthSpace::MeshSurface(m), SpacePoint::Mesh(x)) => {
                m.validate_point(x)?;
                Ok(SpacePoint::Mesh(m.normalize(*x)))
            }
            _ => Err(mismatch(self, p)),
        }
    }

    pub fn distance(&self, p: &SpacePoint, q: &SpacePoint) -> Result<f64> {
        match (self, p, q) {
            (LengthSpace::FiniteMetric(m), SpacePoint::Index(i), SpacePoint::Index(j)) if *i < m.len() && *j < m.len() => {
                Ok(m.get(*i, *j))
            }
            (LengthSpace::MetricGraph(g), SpacePoint::Graph(a), SpacePoint::Graph(b)) => {
                Ok(g.distance(g.canonicalize(*a)?, g.canonicalize(*b)?))
            }
            (LengthSpace::Circle { diameter }, SpacePoint::Circle(a), SpacePoint::Circle(b)) => {
                Ok(arc_delta(*a, *b, 2.0 * diameter).abs())
            }
            (LengthSpace::FlatTorus { diameters }, SpacePoint::Torus(a), SpacePoint::Torus(b))
                if a.len() == diameters.len() && b.len() == diameters.len() =>
            {
                Ok(diameters
                    .iter()
                    .enumerate()
                    .map(|(i, d)| arc_delta(a[i], b[i], 2.0 * d).powi(2))
                    .sum::<f64>()
                    .sqrt())
            }
            (LengthSpace::RoundSphere { dim }, SpacePoint::Sphere(a), SpacePoint::Sphere(b))
                if a.len() == dim + 1 && b.len() == dim + 1 =>
            {
                Ok(sphere_angle(a, b))
            }
            (LengthSpace::MeshSurface(m), SpacePoint::Mesh(a), SpacePoint::Mesh(b)) => Ok(m.distance(a, b)),
            _ => Err(if std::mem::discriminant(p) == std::mem::discriminant(q) { mismatch(self, p) } else { mismatch(self, q) }),
        }
    }

    pub fn same_point(&self, p: &SpacePoint, q: &SpacePoint) -> bool {
        match (self, p, q) {
            (LengthSpace::MeshSurface(m), SpacePoint::Mesh(a), SpacePoint::Mesh(b)) => m.same_point(a, b, 1e-12),
            (LengthSpace::MetricGraph(g), SpacePoint::Graph(a), SpacePoint::Graph(b)) => {
                matches!((g.canonicalize(*a), g.canonicalize(*b)), (Ok(x), Ok(y)) if x == y)
            }
            _ => self.distance(p, q).map_or(false, |d| d <= 1e-12),
        }
    }

    /// Finite probe set with spacing about `density`. Homogeneous spaces put
    /// their base point first.
    pub fn probe_points(&self, density: f64) -> Vec<SpacePoint> {
        match self {
            LengthSpace::FiniteMetric(m) => (0..m.len()).map(SpacePoint::Index).collect(),
            LengthSpace::MetricGraph(g) => g.probe_points(density).into_iter().map(SpacePoint::Graph).collect(),
            LengthSpace::Circle { diameter } => {
                let c = 2.0 * diameter;
                let n = (c / density).ceil().max(1.0) as usize;
                (0..n).map(|i| SpacePoint::Circle(c * i as f64 / n as f64)).collect()
            }
            LengthSpace::FlatTorus { diameters } => {
                let axes: Vec<Vec<f64>> = diameters
                    .iter()
                    .map(|d| {
                        let c = 2.0 * d;
                        let n = (c / density).ceil().max(1.0) as usize;
                        (0..n).map(|i| c * i as f64 / n as f64).collect()
                    })
                    .collect();
                let mut out = vec![Vec::new()];
                for axis in &axes {
                    out = out
                        .into_iter()
                        .flat_map(|prefix: Vec<f64>| {
                            axis.iter().map(move |&x| {
                                let mut v = prefix.clone();
                                v.push(x);
                                v
                            })
                        })
                        .collect();
                }
                out.into_iter().map(SpacePoint::Torus).collect()
            }
            LengthSpace::RoundSphere { dim } => sphere_probes(*dim, density),
            LengthSpace::MeshSurface(m) => m.probe_points().into_iter().map(SpacePoint::Mesh).collect(),
        }
    }

    /// Maximal pairwise distance. Exact for finite metrics and graphs; a probe
    /// maximum from the base point on homogeneous spaces; a probe maximum on
    /// meshes.
    pub fn diameter(&self, density: f64) -> f64 {
        match self {
            LengthSpace::FiniteMetric(m) => {
                (0..m.len()).flat_map(|i| (0..m.len()).map(move |j| (i, j))).map(|(i, j)| m.get(i, j)).fold(0.0, f64::max)
            }
            LengthSpace::MetricGraph(g) => g.diameter(),
            LengthSpace::MeshSurface(m) => mesh_eccentricities(m).into_iter().fold(0.0, f64::max),
            _ => self.base_eccentricity(density),
        }
    }

    /// Min over points of the max distance; exact on finite metrics, a probe
    /// minimum of exact eccentricities on graphs.
    pub fn radius(&self, density: f64) -> f64 {
        match self {
            LengthSpace::FiniteMetric(m) => {
                (0..m.len()).map(|i| (0..m.len()).map(|j| m.get(i, j)).fold(0.0, f64::max)).fold(f64::INFINITY, f64::min)
            }
            LengthSpace::MetricGraph(g) => {
                g.probe_points(density).into_iter().map(|p| g.eccentricity(p)).fold(f64::INFINITY, f64::min)
            }
            LengthSpace::MeshSurface(m) => mesh_eccentricities(m).into_iter().fold(f64::INFINITY, f64::min),
            _ => self.base_eccentricity(density),
        }
    }

    fn base_eccentricity(&self, density: f64) -> f64 {
        let probes = self.probe_points(density);
        let base = self.base_point();
        let mut best: f64 = probes.iter().map(|q| self.distance(&base, q).unwrap_or(0.0)).fold(0.0, f64::max);
        if let LengthSpace::RoundSphere { .. } = self {
            // the antipode is always attained
            best = best.max(PI);
        }
        best
    }

    /// A fixed reference point.
    pub fn base_point(&self) -> SpacePoint {
        match self {
            LengthSpace::FiniteMetric(_) => SpacePoint::Index(0),
            LengthSpace::MetricGraph(_) => SpacePoint::Graph(GraphPoint::Vertex(0)),
            LengthSpace::Circle { .. } => SpacePoint::Circle(0.0),
            LengthSpace::FlatTorus { diameters } => SpacePoint::Torus(vec![0.0; diameters.len()]),
            LengthSpace::RoundSphere { dim } => {
                let mut v = vec![0.0; dim + 1];
                v[0] = 1.0;
                SpacePoint::Sphere(v)
            }
            LengthSpace::MeshSurface(m) => SpacePoint::Mesh(m.vertex_point(0)),
        }
    }

    /// Greedy farthest-point net over the probe set at `density`.
    pub fn build_net(&self, r: f64, density: f64) -> Result<NetSample> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("net radius must be ≥ 0, got {r}")));
        }
        if r == 0.0 && !matches!(self, LengthSpace::FiniteMetric(_)) {
            return Err(Error::InvalidArgument("a 0-net of a continuum is infinite".into()));
        }
        if !(density > 0.0) {
            return Err(Error::InvalidArgument("probe density must be positive".into()));
        }
        let probes = self.probe_points(density);
        greedy_net(self, probes, r)
    }

    /// Initial velocity of the minimizing segment from `p` to `q`, in ambient
    /// coordinates, with norm equal to the distance.
    pub fn log_map(&self, p: &SpacePoint, q: &SpacePoint) -> Result<Vec<f64>> {
        match (self, p, q) {
            (LengthSpace::Circle { diameter }, SpacePoint::Circle(a), SpacePoint::Circle(b)) => {
                let c = 2.0 * diameter;
                let d = arc_delta(*a, *b, c);
                if (d.abs() - c / 2.0).abs() <= 1e-12 * c {
                    return Err(Error::AmbiguousDirection("antipodal points on a circle".into()));
                }
                Ok(vec![d])
            }
            (LengthSpace::FlatTorus { diameters }, SpacePoint::Torus(a), SpacePoint::Torus(b)) => diameters
                .iter()
                .enumerate()
                .map(|(i, dm)| {
                    let c = 2.0 * dm;
                    let d = arc_delta(a[i], b[i], c);
                    if (d.abs() - c / 2.0).abs() <= 1e-12 * c {
                        Err(Error::AmbiguousDirection(format!("antipodal coordinate in factor {i}")))
                    } else {
                        Ok(d)
                    }
                })
                .collect(),
            (LengthSpace::RoundSphere { .. }, SpacePoint::Sphere(a), SpacePoint::Sphere(b)) => {
                let c = dotv(a, b);
                let v: Vec<f64> = b.iter().zip(a).map(|(y, x)| y - c * x).collect();
                let s = dotv(&v, &v).sqrt();
                if s < 1e-12 && c < 0.0 {
                    return Err(Error::AmbiguousDirection("antipodal points on a sphere".into()));
                }
                if s == 0.0 {
                    return Ok(vec![0.0; a.len()]);
                }
                let theta = s.atan2(c);
                Ok(v.iter().map(|x| x * theta / s).collect())
            }
            (LengthSpace::MetricGraph(g), SpacePoint::Graph(a), SpacePoint::Graph(b)) => {
                Ok(vec![g.log_map(g.canonicalize(*a)?, g.canonicalize(*b)?)?])
            }
            (LengthSpace::MeshSurface(m), SpacePoint::Mesh(a), SpacePoint::Mesh(b)) => Ok(m.log_map(a, b)?.to_vec()),
            (LengthSpace::FiniteMetric(_), _, _) => Err(Error::Unsupported { variant: "finite", op: "log_map" }),
            _ => Err(mismatch(self, p)),
        }
    }

    /// Moves from `p` along the ambient tangent vector `v`.
    pub fn exp(&self, p: &SpacePoint, v: &[f64]) -> Result<SpacePoint> {
        match (self, p) {
            (LengthSpace::Circle { diameter }, SpacePoint::Circle(a)) => Ok(SpacePoint::Circle(wrap(a + v[0], 2.0 * diameter))),
            (LengthSpace::FlatTorus { diameters }, SpacePoint::Torus(a)) => Ok(SpacePoint::Torus(
                diameters.iter().enumerate().map(|(i, d)| wrap(a[i] + v[i], 2.0 * d)).collect(),
            )),
            (LengthSpace::RoundSphere { .. }, SpacePoint::Sphere(a)) => {
                let t = dotv(v, v).sqrt();
                if t == 0.0 {
                    return Ok(p.clone());
                }
                let x: Vec<f64> = a.iter().zip(v).map(|(p, w)| t.cos() * p + t.sin() * w / t).collect();
                let n = dotv(&x, &x).sqrt();
                Ok(SpacePoint::Sphere(x.iter().map(|c| c / n).collect()))
            }
            (LengthSpace::MetricGraph(g), SpacePoint::Graph(a)) => Ok(SpacePoint::Graph(g.step(*a, v[0])?)),
            (LengthSpace::MeshSurface(m), SpacePoint::Mesh(a)) => Ok(SpacePoint::Mesh(m.step(a, [v[0], v[1], v[2]])?)),
            (LengthSpace::FiniteMetric(_), _) => Err(Error::Unsupported { variant: "finite", op: "exp" }),
            _ => Err(mismatch(self, p)),
        }
    }

    /// Orthonormal basis of the tangent space at `p`, in ambient coordinates.
    pub fn tangent_basis(&self, p: &SpacePoint) -> Result<Vec<Vec<f64>>> {
        match (self, p) {
            (LengthSpace::Circle { .. }, SpacePoint::Circle(_)) | (LengthSpace::MetricGraph(_), SpacePoint::Graph(_)) => {
                Ok(vec![vec![1.0]])
            }
            (LengthSpace::FlatTorus { diameters }, SpacePoint::Torus(_)) => {
                let m = diameters.len();
                Ok((0..m).map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect())
            }
            (LengthSpace::RoundSphere { dim }, SpacePoint::Sphere(a)) => {
                let mut basis: Vec<Vec<f64>> = Vec::with_capacity(*dim);
                let mut frame = vec![a.clone()];
                for i in 0..=*dim {
                    let mut e = vec![0.0; dim + 1];
                    e[i] = 1.0;
                    for f in &frame {
                        let c = dotv(&e, f);
                        for (x, y) in e.iter_mut().zip(f) {
                            *x -= c * y;
                        }
                    }
                    let n = dotv(&e, &e).sqrt();
                    if n > 1e-6 {
                        let u: Vec<f64> = e.iter().map(|x| x / n).collect();
                        frame.push(u.clone());
                        basis.push(u);
                    }
                    if basis.len() == *dim {
                        break;
                    }
                }
                Ok(basis)
            }
            (LengthSpace::MeshSurface(m), SpacePoint::Mesh(a)) => Ok(m.tangent_basis(a).iter().map(|v| v.to_vec()).collect()),
            (LengthSpace::FiniteMetric(_), _) => Err(Error::Unsupported { variant: "finite", op: "tangent_basis" }),
            _ => Err(mismatch(self, p)),
        }
    }

    /// Injectivity radius where it is known in closed form: half the shortest
    /// closed geodesic on analytic spaces, half the systole on graphs.
    pub fn injrad(&self) -> Option<f64> {
        match self {
            LengthSpace::Circle { diameter } => Some(*diameter),
            LengthSpace::FlatTorus { diameters } => diameters.iter().copied().reduce(f64::min),
            LengthSpace::RoundSphere { .. } => Some(PI),
            LengthSpace::MetricGraph(g) => crate::spectra::graph_systole(g).ok().map(|(l, _)| l / 2.0),
            _ => None,
        }
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> SpacePoint {
        match self {
            LengthSpace::FiniteMetric(m) => SpacePoint::Index(rng.gen_range(0..m.len())),
            LengthSpace::MetricGraph(g) => {
                let e = rng.gen_range(0..g.edges().len());
                let len = g.edge(e).len;
                SpacePoint::Graph(GraphPoint::OnEdge { edge: e, offset: rng.gen_range(0.0..1.0) * len })
                    .canonical_graph(g)
            }
            LengthSpace::Circle { diameter } => SpacePoint::Circle(rng.gen_range(0.0..2.0 * diameter)),
            LengthSpace::FlatTorus { diameters } => {
                SpacePoint::Torus(diameters.iter().map(|d| rng.gen_range(0.0..2.0 * d)).collect())
            }
            LengthSpace::RoundSphere { dim } => loop {
                let v: Vec<f64> = (0..=*dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let n = dotv(&v, &v).sqrt();
                if n > 0.1 && n <= 1.0 {
                    break SpacePoint::Sphere(v.iter().map(|x| x / n).collect());
                }
            },
            LengthSpace::MeshSurface(m) => SpacePoint::Mesh(m.random_point(rng)),
        }
    }

    pub fn as_graph(&self) -> Option<&MetricGraph> {
        match self {
            LengthSpace::MetricGraph(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_mesh(&self) -> Option<&MeshSurface> {
        match self {
            LengthSpace::MeshSurface(m) => Some(m),
            _ => None,
        }
    }
}

impl SpacePoint {
    fn canonical_graph(self, g: &MetricGraph) -> SpacePoint {
        match self {
            SpacePoint::Graph(p) => SpacePoint::Graph(g.canonicalize(p).unwrap_or(p)),
            other => other,
        }
    }
}

pub(crate) fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sphere_angle(a: &[f64], b: &[f64]) -> f64 {
    // atan2 form stays accurate for nearby and nearly antipodal points
    let c = dotv(a, b);
    let cross2: f64 = {
        let mut s = 0.0;
        for i in 0..a.len() {
            for j in (i + 1)..a.len() {
                let w = a[i] * b[j] - a[j] * b[i];
                s += w * w;
            }
        }
        s
    };
    cross2.sqrt().atan2(c)
}

fn sphere_probes(dim: usize, density: f64) -> Vec<SpacePoint> {
    if dim == 1 {
        let n = (2.0 * PI / density).ceil().max(1.0) as usize;
        return (0..n)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / n as f64;
                SpacePoint::Sphere(vec![a.cos(), a.sin()])
            })
            .collect();
    }
    if dim == 2 {
        let mut out = vec![SpacePoint::Sphere(vec![1.0, 0.0, 0.0])];
        let rings = (PI / density).ceil().max(1.0) as usize;
        for i in 0..=rings {
            let theta = PI * i as f64 / rings as f64;
            let m = ((2.0 * PI * theta.sin()) / density).ceil().max(1.0) as usize;
            for j in 0..m {
                let phi = 2.0 * PI * j as f64 / m as f64;
                out.push(SpacePoint::Sphere(vec![theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]));
            }
        }
        return out;
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(dim as u64);
    let count = ((PI / density).powi(dim as i32) as usize).clamp(64, 20_000);
    let space = LengthSpace::RoundSphere { dim };
    let mut out = vec![space.base_point()];
    out.extend((0..count).map(|_| space.random_point(&mut rng)));
    out
}

fn mesh_eccentricities(m: &MeshSurface) -> Vec<f64> {
    use rayon::prelude::*;
    let nv = m.vertices().len();
    (0..nv)
        .into_par_iter()
        .map(|v| m.node_distances_from(&m.vertex_point(v)).into_iter().fold(0.0, f64::max))
        .collect()
}

fn greedy_net(space: &LengthSpace, probes: Vec<SpacePoint>, r: f64) -> Result<NetSample> {
    if probes.is_empty() {
        return Err(Error::EmptySet("build_net"));
    }
    let mut points = vec![probes[0].clone()];
    let mut gap: Vec<f64> = probes.iter().map(|p| space.distance(&probes[0], p)).collect::<Result<_>>()?;
    loop {
        let (far, worst) = gap.iter().copied().enumerate().fold((0, 0.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
        if worst <= r {
            return Ok(NetSample { points, r, covering: worst });
        }
        let next = probes[far].clone();
        for (g, p) in gap.iter_mut().zip(&probes) {
            *g = g.min(space.distance(&next, p)?);
        }
        points.push(next);
    }
}
