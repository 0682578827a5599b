//! Hausdorff and Gromov-Hausdorff estimates and spectral convergence experiments.

use std::sync::Arc;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spaces::{LengthSpace, MeshSurface, NetSample, SpacePoint, EPS_LEN};
use crate::spectra::{spectrum_1_over_k, Spectrum, SpectrumConfig};

/// Largest net accepted by the exact bijection search.
pub const EXACT_MAX: usize = 8;

/// Hausdorff distance between finite subsets of the real line.
pub fn hausdorff_distance_reals(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("hausdorff_distance_reals"));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("lengths must be finite".into()));
    }
    Ok(one_sided(a, b).max(one_sided(b, a)))
}

fn one_sided(a: &[f64], b: &[f64]) -> f64 {
    let mut sorted = b.to_vec();
    sorted.sort_by(f64::total_cmp);
    a.iter()
        .map(|&x| {
            let i = sorted.partition_point(|&y| y < x);
            let right = sorted.get(i).map_or(f64::INFINITY, |y| y - x);
            let left = if i > 0 { x - sorted[i - 1] } else { f64::INFINITY };
            left.min(right)
        })
        .fold(0.0, f64::max)
}

/// Pairwise distance matrix of a finite sample.
pub fn distance_matrix(space: &LengthSpace, points: &[SpacePoint]) -> Result<Vec<Vec<f64>>> {
    points
        .par_iter()
        .map(|p| points.iter().map(|q| space.distance(p, q)).collect::<Result<Vec<f64>>>())
        .collect()
}

/// A relation between two finite metric samples given by their distance matrices.
#[derive(Clone, Debug, Serialize)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
    pub distortion: f64,
}

impl Correspondence {
    pub fn new(dx: &[Vec<f64>], dy: &[Vec<f64>], pairs: Vec<(usize, usize)>) -> Result<Self> {
        let distortion = correspondence_distortion(dx, dy, &pairs)?;
        Ok(Correspondence { pairs, distortion })
    }
}

/// max over pairs of pairs of |d_X(x, x') − d_Y(y, y')|; the relation must cover both sides.
pub fn correspondence_distortion(dx: &[Vec<f64>], dy: &[Vec<f64>], relation: &[(usize, usize)]) -> Result<f64> {
    let mut seen_x = vec![false; dx.len()];
    let mut seen_y = vec![false; dy.len()];
    for &(x, y) in relation {
        if x >= dx.len() || y >= dy.len() {
            return Err(Error::NonCovering(format!("pair ({x}, {y}) out of range")));
        }
        seen_x[x] = true;
        seen_y[y] = true;
    }
    if let Some(i) = seen_x.iter().position(|s| !s) {
        return Err(Error::NonCovering(format!("point {i} of the first sample is unmatched")));
    }
    if let Some(i) = seen_y.iter().position(|s| !s) {
        return Err(Error::NonCovering(format!("point {i} of the second sample is unmatched")));
    }
    Ok(relation
        .par_iter()
        .map(|&(x, y)| relation.iter().map(|&(x2, y2)| (dx[x][x2] - dy[y][y2]).abs()).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max))
}

/// A point map X → Y used to build correspondences.
pub type PointMap = Arc<dyn Fn(&SpacePoint) -> Result<SpacePoint> + Send + Sync>;

#[derive(Clone)]
pub enum GhMethod {
    /// All bijections between nets of equal size ≤ 8.
    Exact,
    Greedy,
    /// The graph of a map on the first net; the second net is its image.
    ProvidedMap(PointMap),
}

impl GhMethod {
    pub fn name(&self) -> &'static str {
        match self {
            GhMethod::Exact => "exact",
            GhMethod::Greedy => "greedy",
            GhMethod::ProvidedMap(_) => "provided-map",
        }
    }
}

impl std::fmt::Debug for GhMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// (x_1, ..., x_m) ↦ x_1 from a flat torus onto a circle of the same first circumference.
pub fn torus_projection(torus: &LengthSpace, circle: &LengthSpace) -> Result<PointMap> {
    match (torus, circle) {
        (LengthSpace::FlatTorus { diameters }, LengthSpace::Circle { diameter }) if (diameters[0] - diameter).abs() <= EPS_LEN * (1.0 + diameter) => {
            Ok(Arc::new(|p: &SpacePoint| match p {
                SpacePoint::Torus(v) => Ok(SpacePoint::Circle(v[0])),
                other => Err(Error::PointMismatch(format!("{other:?} is not a torus point"))),
            }))
        }
        _ => Err(Error::InvalidArgument("projection needs a torus whose first factor matches the circle".into())),
    }
}

/// Identity on (face, barycentric) coordinates between meshes with the same combinatorics.
pub fn mesh_identity(x: &LengthSpace, y: &LengthSpace) -> Result<PointMap> {
    match (x, y) {
        (LengthSpace::MeshSurface(a), LengthSpace::MeshSurface(b)) if a.faces() == b.faces() => Ok(Arc::new(|p: &SpacePoint| match p {
            SpacePoint::Mesh(m) => Ok(SpacePoint::Mesh(*m)),
            other => Err(Error::PointMismatch(format!("{other:?} is not a mesh point"))),
        })),
        _ => Err(Error::InvalidArgument("mesh identity needs two meshes with identical faces".into())),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GhBound {
    pub method: &'static str,
    pub r: f64,
    /// Certified covering radii of the two nets.
    pub r_x: f64,
    pub r_y: f64,
    pub net_x: usize,
    pub net_y: usize,
    pub distortion: f64,
    /// r_x + r_y + distortion.
    pub bound: f64,
    /// r_x + r_y + distortion / 2 (informational).
    pub sharp_bound: f64,
    #[serde(skip)]
    pub correspondence: Correspondence,
}

/// Distance from any point of the space to its nearest probe, bounded above.
fn probe_slack(space: &LengthSpace, density: f64) -> f64 {
    match space {
        LengthSpace::FiniteMetric(_) => 0.0,
        LengthSpace::MeshSurface(m) => m.max_edge(),
        _ => density,
    }
}

/// An r-net whose covering radius over the whole space is at most the
/// returned bound (≤ r).
pub fn certified_net(space: &LengthSpace, r: f64) -> Result<(NetSample, f64)> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("net radius must be positive, got {r}")));
    }
    let density = r / 8.0;
    let slack = probe_slack(space, density);
    if slack >= r {
        return Err(Error::InvalidArgument(format!("net radius {r} is below the sampling resolution {slack}")));
    }
    let net = space.build_net(r - slack, density)?;
    let cover = net.covering + slack;
    Ok((net, cover))
}

fn covering_of(space: &LengthSpace, points: &[SpacePoint], r: f64) -> Result<f64> {
    let density = r / 8.0;
    let worst = space
        .probe_points(density)
        .par_iter()
        .map(|p| points.iter().map(|q| space.distance(p, q)).try_fold(f64::INFINITY, |m, d| d.map(|d| m.min(d))))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(worst + probe_slack(space, density))
}

/// Certified upper bound on the Gromov-Hausdorff distance via r-nets and a
/// low-distortion correspondence.
pub fn gh_upper_bound(x: &LengthSpace, y: &LengthSpace, r: f64, method: &GhMethod) -> Result<GhBound> {
    let (nx, rx) = certified_net(x, r)?;
    let (ny_points, ry) = match method {
        GhMethod::ProvidedMap(f) => {
            let mut img: Vec<SpacePoint> = Vec::new();
            for p in &nx.points {
                let q = y.canonicalize(&f(p)?)?;
                if !img.iter().any(|z| y.same_point(z, &q)) {
                    img.push(q);
                }
            }
            let cover = covering_of(y, &img, r)?;
            (img, cover)
        }
        _ => {
            let (ny, ry) = certified_net(y, r)?;
            (ny.points, ry)
        }
    };
    let dx = distance_matrix(x, &nx.points)?;
    let dy = distance_matrix(y, &ny_points)?;
    let corr = match method {
        GhMethod::Exact => exact_bijection(&dx, &dy)?,
        GhMethod::Greedy => greedy_correspondence(&dx, &dy)?,
        GhMethod::ProvidedMap(f) => {
            let mut pairs = Vec::with_capacity(nx.points.len());
            for (i, p) in nx.points.iter().enumerate() {
                let q = y.canonicalize(&f(p)?)?;
                let j = ny_points.iter().position(|z| y.same_point(z, &q)).expect("image point is in the net");
                pairs.push((i, j));
            }
            Correspondence::new(&dx, &dy, pairs)?
        }
    };
    Ok(GhBound {
        method: method.name(),
        r,
        r_x: rx,
        r_y: ry,
        net_x: dx.len(),
        net_y: dy.len(),
        distortion: corr.distortion,
        bound: rx + ry + corr.distortion,
        sharp_bound: rx + ry + corr.distortion / 2.0,
        correspondence: corr,
    })
}

/// Best bijection between two equal-size samples of at most eight points.
pub fn exact_bijection(dx: &[Vec<f64>], dy: &[Vec<f64>]) -> Result<Correspondence> {
    let n = dx.len();
    if n > EXACT_MAX || dy.len() > EXACT_MAX {
        return Err(Error::NetTooLarge { max: EXACT_MAX, got: n.max(dy.len()) });
    }
    if n != dy.len() {
        return Err(Error::InvalidArgument(format!("bijection needs equal net sizes, got {n} and {}", dy.len())));
    }
    let best = (0..n)
        .permutations(n)
        .map(|perm| {
            let pairs: Vec<(usize, usize)> = perm.into_iter().enumerate().collect();
            let d = pairs
                .iter()
                .flat_map(|&(a, b)| pairs.iter().map(move |&(c, e)| (dx[a][c] - dy[b][e]).abs()))
                .fold(0.0, f64::max);
            (d, pairs)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or(Error::EmptySet("exact_bijection"))?;
    Ok(Correspondence { pairs: best.1, distortion: best.0 })
}

/// Extends a partial matching point by point, choosing each image to
/// minimize the worst deviation against pairs already placed.
fn greedy_extend(dx: &[Vec<f64>], dy: &[Vec<f64>], seed: (usize, usize)) -> Vec<(usize, usize)> {
    let mut pairs = vec![seed];
    for i in (0..dx.len()).filter(|&i| i != seed.0) {
        let j = (0..dy.len())
            .map(|j| (pairs.iter().map(|&(a, b)| (dx[i][a] - dy[j][b]).abs()).fold(0.0, f64::max), j))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .expect("nonempty")
            .1;
        pairs.push((i, j));
    }
    let mut hit = vec![false; dy.len()];
    for &(_, j) in &pairs {
        hit[j] = true;
    }
    for j in (0..dy.len()).filter(|&j| !hit[j]) {
        let xs: Vec<(usize, usize)> = pairs.clone();
        let i = (0..dx.len())
            .map(|i| (xs.iter().map(|&(a, b)| (dx[i][a] - dy[j][b]).abs()).fold(0.0, f64::max), i))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .expect("nonempty")
            .1;
        pairs.push((i, j));
    }
    pairs
}

/// Heuristic correspondence: greedy extensions from several seed pairs, plus
/// the index-order matching when both samples have the same size.
pub fn greedy_correspondence(dx: &[Vec<f64>], dy: &[Vec<f64>]) -> Result<Correspondence> {
    if dx.is_empty() || dy.is_empty() {
        return Err(Error::EmptySet("greedy_correspondence"));
    }
    let seeds: Vec<usize> = (0..dy.len()).take(16).collect();
    let mut candidates: Vec<Vec<(usize, usize)>> = seeds.par_iter().map(|&j| greedy_extend(dx, dy, (0, j))).collect();
    if dx.len() == dy.len() {
        candidates.push((0..dx.len()).map(|i| (i, i)).collect());
    }
    candidates
        .into_iter()
        .map(|pairs| Correspondence::new(dx, dy, pairs))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min_by(|a, b| a.distortion.total_cmp(&b.distortion))
        .ok_or(Error::EmptySet("greedy_correspondence"))
}

/// Outcome of the containment test of a member spectrum in the ε-neighborhood
/// of the limit spectrum ∪ {0}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inclusion {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub enum Family {
    /// FlatTorus(π, π/j) → Circle(π).
    TorusCollapse,
    /// Every member is the limit space itself.
    Constant(Arc<LengthSpace>),
    /// Ellipsoid meshes with vertical scale c → doubled disk.
    EllipsoidFlatten { rings: usize, steiner: usize },
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::TorusCollapse => "torus-collapse",
            Family::Constant(_) => "constant",
            Family::EllipsoidFlatten { .. } => "ellipsoid-flatten",
        }
    }

    pub fn member(&self, param: f64) -> Result<Arc<LengthSpace>> {
        Ok(match self {
            Family::TorusCollapse => {
                if !(param > 0.0) {
                    return Err(Error::InvalidArgument(format!("torus collapse parameter must be positive, got {param}")));
                }
                Arc::new(LengthSpace::torus(vec![std::f64::consts::PI, std::f64::consts::PI / param])?)
            }
            Family::Constant(s) => s.clone(),
            Family::EllipsoidFlatten { rings, steiner } => Arc::new(LengthSpace::MeshSurface(MeshSurface::ellipsoid(param, *rings, *steiner)?)),
        })
    }

    pub fn limit(&self) -> Result<Arc<LengthSpace>> {
        Ok(match self {
            Family::TorusCollapse => Arc::new(LengthSpace::circle(std::f64::consts::PI)?),
            Family::Constant(s) => s.clone(),
            Family::EllipsoidFlatten { rings, steiner } => Arc::new(LengthSpace::MeshSurface(MeshSurface::doubled_disk(*rings, *steiner)?)),
        })
    }

    /// The natural map from a member onto the limit.
    pub fn map(&self, member: &LengthSpace, limit: &LengthSpace) -> Result<GhMethod> {
        Ok(match self {
            Family::TorusCollapse => GhMethod::ProvidedMap(torus_projection(member, limit)?),
            Family::Constant(_) => GhMethod::ProvidedMap(Arc::new(|p: &SpacePoint| Ok(p.clone()))),
            Family::EllipsoidFlatten { .. } => GhMethod::ProvidedMap(mesh_identity(member, limit)?),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MemberRecord {
    pub param: f64,
    pub lengths: Vec<f64>,
    pub undecided: usize,
    /// Hausdorff distance between member ∪ {0} and limit ∪ {0}.
    pub hausdorff: f64,
    pub inclusion: Inclusion,
    /// Member entries farther than ε from limit ∪ {0}.
    pub outliers: Vec<f64>,
    pub gh: Option<GhBound>,
    /// For mesh members: whether each seed loop is among the accepted witnesses.
    pub seed_loops_present: Vec<bool>,
    #[serde(skip)]
    pub spectrum: Spectrum,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub family: &'static str,
    pub k: usize,
    #[serde(rename = "R")]
    pub r: f64,
    pub epsilon: f64,
    pub limit_lengths: Vec<f64>,
    pub members: Vec<MemberRecord>,
    pub hausdorff_strictly_decreasing: bool,
    pub hausdorff_nonincreasing: bool,
    pub all_included: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExperimentConfig {
    pub k: usize,
    pub r: f64,
    pub epsilon: f64,
    /// Net radius for the GH bound; `None` skips it.
    pub gh_r: Option<f64>,
    pub spectrum: SpectrumConfig,
}

fn with_zero(ls: &[f64]) -> Vec<f64> {
    std::iter::once(0.0).chain(ls.iter().copied()).collect()
}

/// Runs the spectral convergence experiment on a family ordered toward its limit.
pub fn convergence_experiment(family: &Family, params: &[f64], cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    if params.is_empty() {
        return Err(Error::EmptySet("convergence_experiment"));
    }
    if !(cfg.epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("ε must be ≥ 0, got {}", cfg.epsilon)));
    }
    let limit = family.limit()?;
    let limit_spec = spectrum_1_over_k(&limit, cfg.k, Some(cfg.r), &cfg.spectrum)?;
    let limit_lengths = limit_spec.lengths();
    let target = with_zero(&limit_lengths);
    let members: Vec<MemberRecord> = params
        .par_iter()
        .map(|&param| {
            let member = family.member(param)?;
            let spec = spectrum_1_over_k(&member, cfg.k, Some(cfg.r), &cfg.spectrum)?;
            let lengths = spec.lengths();
            let outliers: Vec<f64> = lengths
                .iter()
                .copied()
                .filter(|l| target.iter().all(|t| (l - t).abs() > cfg.epsilon))
                .collect();
            let inclusion = if !outliers.is_empty() {
                Inclusion::Fails
            } else if spec.undecided.is_empty() {
                Inclusion::Holds
            } else {
                Inclusion::Inconclusive
            };
            let hausdorff = hausdorff_distance_reals(&with_zero(&lengths), &target)?;
            let gh = match cfg.gh_r {
                Some(r) => Some(gh_upper_bound(&member, &limit, r, &family.map(&member, &limit)?)?),
                None => None,
            };
            let seed_loops_present = match member.as_mesh() {
                Some(m) => (0..m.loops().len())
                    .map(|i| {
                        let tag = format!("seed loop {i} x1");
                        spec.entries.iter().any(|e| e.witnesses.contains(&tag))
                    })
                    .collect(),
                None => Vec::new(),
            };
            Ok(MemberRecord { param, lengths, undecided: spec.undecided.len(), hausdorff, inclusion, outliers, gh, seed_loops_present, spectrum: spec })
        })
        .collect::<Result<_>>()?;
    let hs: Vec<f64> = members.iter().map(|m| m.hausdorff).collect();
    Ok(ConvergenceReport {
        family: family.label(),
        k: cfg.k,
        r: cfg.r,
        epsilon: cfg.epsilon,
        limit_lengths,
        hausdorff_strictly_decreasing: hs.windows(2).all(|w| w[1] < w[0]),
        hausdorff_nonincreasing: hs.windows(2).all(|w| w[1] <= w[0]),
        all_included: members.iter().all(|m| m.inclusion == Inclusion::Holds),
        members,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "result")]
pub enum GapResult {
    Gap,
    Occupied { lengths: Vec<f64>, witnesses: Vec<String> },
    /// No decided entry in the window, but undecided ones are.
    Inconclusive { lengths: Vec<f64> },
}

/// Whether no spectrum entry lies in [a + ε, b − ε].
pub fn gap_check(spectrum: &Spectrum, a: f64, b: f64, eps: f64) -> Result<GapResult> {
    if a > b || !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!("need a ≤ b and ε ≥ 0, got a={a}, b={b}, ε={eps}")));
    }
    let (lo, hi) = (a + eps, b - eps);
    let inside = |l: f64| lo <= l && l <= hi;
    let hits: Vec<_> = spectrum.entries.iter().filter(|e| inside(e.length)).collect();
    if !hits.is_empty() {
        return Ok(GapResult::Occupied {
            lengths: hits.iter().map(|e| e.length).collect(),
            witnesses: hits.iter().flat_map(|e| e.witnesses.iter().cloned()).collect(),
        });
    }
    let open: Vec<f64> = spectrum.undecided.iter().map(|u| u.length).filter(|&l| inside(l)).collect();
    if open.is_empty() {
        Ok(GapResult::Gap)
    } else {
        Ok(GapResult::Inconclusive { lengths: open })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::MetricGraph;
    use std::f64::consts::PI;

    #[test]
    fn hausdorff_examples() {
        assert_eq!(hausdorff_distance_reals(&[2.0 * PI], &[2.0 * PI]).unwrap(), 0.0);
        assert_eq!(hausdorff_distance_reals(&[PI, 2.0 * PI], &[2.0 * PI]).unwrap(), PI);
        assert_eq!(hausdorff_distance_reals(&[], &[1.0]), Err(Error::EmptySet("hausdorff_distance_reals")));
    }

    #[test]
    fn distortion_needs_cover() {
        let d = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(correspondence_distortion(&d, &d, &[(0, 0), (1, 1)]).unwrap(), 0.0);
        assert!(matches!(correspondence_distortion(&d, &d, &[(0, 0)]), Err(Error::NonCovering(_))));
    }

    #[test]
    fn circle_with_itself() {
        let c = LengthSpace::circle(PI).unwrap();
        let r = PI / 16.0;
        for m in [GhMethod::Greedy, GhMethod::ProvidedMap(Arc::new(|p: &SpacePoint| Ok(p.clone())))] {
            let b = gh_upper_bound(&c, &c, r, &m).unwrap();
            assert!(b.bound <= 2.0 * r + 1e-9, "{b:?}");
        }
    }

    #[test]
    fn exact_limit() {
        let d = vec![vec![0.0; 9]; 9];
        assert_eq!(exact_bijection(&d, &d).unwrap_err(), Error::NetTooLarge { max: 8, got: 9 });
        let f = LengthSpace::FiniteMetric(crate::spaces::FiniteMetric::new(vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]]).unwrap());
        let b = gh_upper_bound(&f, &f, 0.5, &GhMethod::Exact).unwrap();
        assert_eq!(b.distortion, 0.0);
    }

    #[test]
    fn torus_projection_bound() {
        let c = LengthSpace::circle(PI).unwrap();
        let r = PI / 32.0;
        for j in [4.0, 8.0] {
            let t = LengthSpace::torus(vec![PI, PI / j]).unwrap();
            let b = gh_upper_bound(&t, &c, r, &GhMethod::ProvidedMap(torus_projection(&t, &c).unwrap())).unwrap();
            assert!(b.distortion <= PI / j + 1e-12);
            assert!(b.bound <= PI / j + 2.0 * r, "{b:?}");
        }
    }

    #[test]
    fn theta_vs_triangle() {
        let theta = LengthSpace::MetricGraph(MetricGraph::theta());
        let tri = LengthSpace::MetricGraph(MetricGraph::cycle(3, 1.0).unwrap());
        let b = gh_upper_bound(&theta, &tri, 0.25, &GhMethod::Greedy).unwrap();
        assert!(b.bound > 0.0 && b.distortion > 0.0);
    }

    #[test]
    fn gaps() {
        let cfg = SpectrumConfig::default();
        let s = Arc::new(LengthSpace::sphere(2).unwrap());
        let spec = spectrum_1_over_k(&s, 4, Some(4.0 * PI + 1.0), &cfg).unwrap();
        assert_eq!(gap_check(&spec, 2.0 * PI, 4.0 * PI, 0.1).unwrap(), GapResult::Gap);
        assert!(matches!(gap_check(&spec, 5.0, 7.0, 0.1).unwrap(), GapResult::Occupied { .. }));
        assert_eq!(gap_check(&spec, 3.0, 3.0, 0.0).unwrap(), GapResult::Gap);
        let t = Arc::new(LengthSpace::torus(vec![PI, PI]).unwrap());
        let spec = spectrum_1_over_k(&t, 4, Some(10.0), &cfg).unwrap();
        assert_eq!(gap_check(&spec, 0.0, 2.0 * PI, 0.1).unwrap(), GapResult::Gap);
    }

    #[test]
    fn constant_family() {
        let cfg = ExperimentConfig { k: 3, r: 7.0, epsilon: 1e-9, gh_r: Some(PI / 8.0), spectrum: SpectrumConfig::default() };
        let fam = Family::Constant(Arc::new(LengthSpace::circle(PI).unwrap()));
        let rep = convergence_experiment(&fam, &[1.0, 1.0, 1.0], &cfg).unwrap();
        assert!(rep.members.iter().all(|m| m.hausdorff == 0.0 && m.inclusion == Inclusion::Holds));
    }
}
