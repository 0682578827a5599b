//! Uniform energy on the k-fold product and its critical points.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::curves::{ClosedCurve, IndexResult};
use crate::error::{Error, Result};
use crate::spaces::{dotv, LengthSpace, SpacePoint};

pub const TOL_GRAD: f64 = 1e-10;
pub const MAX_ITER: usize = 10_000;
pub const BACKTRACK: f64 = 0.5;
/// Steps that bring two neighbors this close to each other's cut locus are rejected.
pub const TOL_CUT: f64 = 1e-6;
/// Gradient tolerance for shifted resamples of an induced curve.
pub const TOL_ROTATING: f64 = 1e-6;
/// Finite-difference step for Hessians.
pub const H_FD: f64 = 1e-4;

/// A k-tuple of points, read cyclically.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductPoint {
    pub points: Vec<SpacePoint>,
}

impl ProductPoint {
    pub fn new(points: Vec<SpacePoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidArgument(format!("product needs k ≥ 2 points, got {}", points.len())));
        }
        Ok(ProductPoint { points })
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }

    fn next(&self, i: usize) -> &SpacePoint {
        &self.points[(i + 1) % self.k()]
    }

    fn prev(&self, i: usize) -> &SpacePoint {
        &self.points[(i + self.k() - 1) % self.k()]
    }
}

/// Segment weights r_1..r_k of a weighted energy Σ d(x_i, x_{i+1})² / r_i.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergySpec {
    pub weights: Vec<f64>,
    pub weight_sum: f64,
}

impl EnergySpec {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 || weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("weights must be k ≥ 2 positive numbers".into()));
        }
        let weight_sum = weights.iter().sum();
        Ok(EnergySpec { weights, weight_sum })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(vec![1.0 / k as f64; k])
    }

    pub fn energy(&self, space: &LengthSpace, pt: &ProductPoint) -> Result<f64> {
        if pt.k() != self.weights.len() {
            return Err(Error::InvalidArgument(format!("{} weights for {} points", self.weights.len(), pt.k())));
        }
        (0..pt.k()).map(|i| Ok(space.distance(&pt.points[i], pt.next(i))?.powi(2) / self.weights[i])).sum()
    }
}

/// k·Σ d(x_i, x_{i+1})², cyclic.
pub fn uniform_energy(space: &LengthSpace, pt: &ProductPoint) -> Result<f64> {
    let k = pt.k() as f64;
    let s: f64 = (0..pt.k()).map(|i| space.distance(&pt.points[i], pt.next(i)).map(|d| d * d)).sum::<Result<f64>>()?;
    Ok(k * s)
}

fn smooth_log(space: &LengthSpace, p: &SpacePoint, q: &SpacePoint) -> Result<Vec<f64>> {
    space.log_map(p, q).map_err(|e| match e {
        Error::AmbiguousDirection(m) => Error::Nonsmooth(m),
        other => other,
    })
}

/// Component i is −2k·(log(x_i, x_{i+1}) + log(x_i, x_{i−1})), in ambient coordinates.
pub fn energy_gradient(space: &LengthSpace, pt: &ProductPoint) -> Result<Vec<Vec<f64>>> {
    let k = pt.k() as f64;
    (0..pt.k())
        .map(|i| {
            let a = smooth_log(space, &pt.points[i], pt.next(i))?;
            let b = smooth_log(space, &pt.points[i], pt.prev(i))?;
            Ok(a.iter().zip(&b).map(|(x, y)| -2.0 * k * (x + y)).collect())
        })
        .collect()
}

pub fn gradient_norm(g: &[Vec<f64>]) -> f64 {
    g.iter().map(|v| dotv(v, v)).sum::<f64>().sqrt()
}

/// Whether `q` lies within `tol` of the cut locus of `p`.
fn near_cut(space: &LengthSpace, p: &SpacePoint, q: &SpacePoint, tol: f64) -> bool {
    match (space, p, q) {
        (LengthSpace::Circle { .. } | LengthSpace::FlatTorus { .. }, _, _) => {
            let cs = space.circumferences().expect("flat space");
            match space.log_map(p, q) {
                Ok(v) => v.iter().zip(&cs).any(|(x, c)| x.abs() >= c / 2.0 - tol),
                Err(_) => true,
            }
        }
        (LengthSpace::RoundSphere { .. }, _, _) => space.distance(p, q).map_or(true, |d| d >= std::f64::consts::PI - tol),
        _ => space.log_map(p, q).is_err(),
    }
}

fn touches_cut(space: &LengthSpace, pt: &ProductPoint) -> bool {
    (0..pt.k()).any(|i| near_cut(space, &pt.points[i], pt.next(i), TOL_CUT))
}

fn move_along(space: &LengthSpace, pt: &ProductPoint, dirs: &[Vec<f64>], scale: f64) -> Result<ProductPoint> {
    let points = pt
        .points
        .iter()
        .zip(dirs)
        .map(|(p, v)| {
            let w: Vec<f64> = v.iter().map(|x| x * scale).collect();
            space.exp(p, &w)
        })
        .collect::<Result<_>>()?;
    Ok(ProductPoint { points })
}

/// Orthonormal tangent frames at every point of the tuple.
fn frames(space: &LengthSpace, pt: &ProductPoint) -> Result<Vec<Vec<Vec<f64>>>> {
    pt.points.iter().map(|p| space.tangent_basis(p)).collect()
}

/// Product point at chart coordinates `u` around `pt`.
fn chart(space: &LengthSpace, pt: &ProductPoint, fr: &[Vec<Vec<f64>>], u: &[f64]) -> Result<ProductPoint> {
    let mut off = 0;
    let mut points = Vec::with_capacity(pt.k());
    for (p, basis) in pt.points.iter().zip(fr) {
        let amb = basis[0].len();
        let mut v = vec![0.0; amb];
        for b in basis {
            for (x, y) in v.iter_mut().zip(b) {
                *x += u[off] * y;
            }
            off += 1;
        }
        points.push(space.exp(p, &v)?);
    }
    Ok(ProductPoint { points })
}

fn coords(g: &[Vec<f64>], fr: &[Vec<Vec<f64>>]) -> Vec<f64> {
    g.iter().zip(fr).flat_map(|(v, basis)| basis.iter().map(move |b| dotv(v, b))).collect()
}

/// How a critical point was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Monotone gradient descent with backtracking.
    Descent,
    /// Damped Newton iteration on the gradient (reaches saddles).
    Newton,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPointRecord {
    pub point: ProductPoint,
    pub energy: f64,
    pub gradient_norm: f64,
    pub rotating: bool,
    pub length: f64,
    pub hessian_index: Option<usize>,
    pub nullity: Option<usize>,
    /// max |d_i / mean(d) − 1| over the segments.
    pub segment_ratio_residual: f64,
    pub method: Method,
    pub start: usize,
    #[serde(skip)]
    pub curve: Option<ClosedCurve>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchConfig {
    pub n_starts: usize,
    pub seed: u64,
    pub tol_grad: f64,
    pub max_iter: usize,
    pub backtrack: f64,
    /// Also run the damped Newton iteration from every start.
    pub newton: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { n_starts: 64, seed: 0, tol_grad: TOL_GRAD, max_iter: MAX_ITER, backtrack: BACKTRACK, newton: true }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub k: usize,
    pub starts: usize,
    /// Runs that reached the gradient tolerance.
    pub converged: usize,
    pub rotating: Vec<CriticalPointRecord>,
    /// Converged nonzero critical points that fail the rotating check.
    pub non_rotating: Vec<CriticalPointRecord>,
    pub collapsed: usize,
    pub rejected_nonsmooth: usize,
    pub not_converged: usize,
}

enum RunEnd {
    Converged(ProductPoint, f64, f64),
    Nonsmooth,
    Stalled,
}

/// Records the energies of accepted iterates when `trace` is given.
fn descend(space: &LengthSpace, start: ProductPoint, cfg: &SearchConfig, mut trace: Option<&mut Vec<f64>>) -> RunEnd {
    let k = start.k() as f64;
    let mut x = start;
    if touches_cut(space, &x) {
        return RunEnd::Nonsmooth;
    }
    let Ok(mut e) = uniform_energy(space, &x) else { return RunEnd::Nonsmooth };
    let mut alpha0 = 1.0 / (2.0 * k);
    for _ in 0..cfg.max_iter {
        let g = match energy_gradient(space, &x) {
            Ok(g) => g,
            Err(_) => return RunEnd::Nonsmooth,
        };
        let gn = gradient_norm(&g);
        if let Some(t) = trace.as_deref_mut() {
            t.push(e);
        }
        if gn <= cfg.tol_grad {
            return RunEnd::Converged(x, e, gn);
        }
        let mut alpha = alpha0;
        let mut accepted = false;
        while alpha * gn > 1e-16 {
            if let Ok(y) = move_along(space, &x, &g, -alpha) {
                if !touches_cut(space, &y) {
                    if let Ok(ey) = uniform_energy(space, &y) {
                        if ey <= e - 1e-4 * alpha * gn * gn || (ey < e && alpha * gn < 1e-9) {
                            x = y;
                            e = ey;
                            accepted = true;
                            break;
                        }
                    }
                }
            }
            alpha *= cfg.backtrack;
        }
        if !accepted {
            return RunEnd::Stalled;
        }
        alpha0 = (alpha / cfg.backtrack).min(1.0 / k);
    }
    RunEnd::Stalled
}

/// Jacobian of the chart gradient by central differences of the analytic gradient.
fn gradient_jacobian(space: &LengthSpace, x: &ProductPoint, fr: &[Vec<Vec<f64>>]) -> Result<DMatrix<f64>> {
    let n: usize = fr.iter().map(Vec::len).sum();
    let h = 1e-6;
    let mut j = DMatrix::zeros(n, n);
    for a in 0..n {
        let mut u = vec![0.0; n];
        u[a] = h;
        let gp = coords(&energy_gradient(space, &chart(space, x, fr, &u)?)?, fr);
        u[a] = -h;
        let gm = coords(&energy_gradient(space, &chart(space, x, fr, &u)?)?, fr);
        for b in 0..n {
            j[(b, a)] = (gp[b] - gm[b]) / (2.0 * h);
        }
    }
    Ok((&j + j.transpose()) * 0.5)
}

/// Levenberg-Marquardt on ½‖∇E‖².
fn newton(space: &LengthSpace, start: ProductPoint, cfg: &SearchConfig) -> RunEnd {
    let mut x = start;
    if touches_cut(space, &x) {
        return RunEnd::Nonsmooth;
    }
    let mut lambda = 1e-3;
    let iters = cfg.max_iter.min(500);
    for _ in 0..iters {
        let mut step = || -> Result<Option<ProductPoint>> {
            let fr = frames(space, &x)?;
            let g = coords(&energy_gradient(space, &x)?, &fr);
            let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gn <= cfg.tol_grad {
                return Ok(None);
            }
            let j = gradient_jacobian(space, &x, &fr)?;
            let gv = DVector::from_vec(g);
            let jtj = j.transpose() * &j;
            let rhs = -(j.transpose() * &gv);
            loop {
                let mut m = jtj.clone();
                let scale = jtj.diagonal().max().max(1.0);
                for d in 0..m.nrows() {
                    m[(d, d)] += lambda * scale;
                }
                let Some(chol) = m.cholesky() else {
                    lambda *= 4.0;
                    continue;
                };
                let delta = chol.solve(&rhs);
                let trial = chart(space, &x, &fr, delta.as_slice());
                if let Ok(y) = trial {
                    if !touches_cut(space, &y) {
                        if let Ok(gy) = energy_gradient(space, &y) {
                            if gradient_norm(&gy) < gn {
                                lambda = (lambda / 3.0).max(1e-12);
                                return Ok(Some(y));
                            }
                        }
                    }
                }
                lambda *= 4.0;
                if lambda > 1e8 {
                    return Err(Error::Nonsmooth("no damped step reduces the gradient".into()));
                }
            }
        };
        match step() {
            Ok(Some(y)) => x = y,
            Ok(None) => {
                let Ok(e) = uniform_energy(space, &x) else { return RunEnd::Nonsmooth };
                let gn = energy_gradient(space, &x).map(|g| gradient_norm(&g)).unwrap_or(f64::INFINITY);
                return RunEnd::Converged(x, e, gn);
            }
            Err(Error::Nonsmooth(_)) if lambda > 1e8 => return RunEnd::Stalled,
            Err(_) => return RunEnd::Nonsmooth,
        }
    }
    RunEnd::Stalled
}

/// Breakpoints x_1..x_k joined by minimizing segments.
pub fn tuple_to_curve(space: &Arc<LengthSpace>, pt: &ProductPoint) -> Result<ClosedCurve> {
    ClosedCurve::from_breakpoints(space.clone(), &pt.points, None)
}

/// Checks that the shifted samples (γ(t), γ(t + 2π/k), ...) of the induced
/// curve are critical for `n_shifts` values of t in [0, 2π/k).
pub fn is_rotating_critical(space: &Arc<LengthSpace>, pt: &ProductPoint, n_shifts: usize, tol_grad: f64) -> bool {
    let Ok(curve) = tuple_to_curve(space, pt) else { return false };
    rotating_on(&curve, pt.k(), n_shifts, tol_grad)
}

fn rotating_on(curve: &ClosedCurve, k: usize, n_shifts: usize, tol_grad: f64) -> bool {
    let space = curve.space();
    let l = curve.length();
    (0..n_shifts.max(1)).all(|j| {
        let s0 = j as f64 / n_shifts.max(1) as f64 * l / k as f64;
        let pts = (0..k).map(|i| curve.point_at_length(s0 + i as f64 * l / k as f64)).collect();
        let shifted = ProductPoint { points: pts };
        !touches_cut(space, &shifted)
            && energy_gradient(space, &shifted).map_or(false, |g| gradient_norm(&g) <= tol_grad * (1.0 + l * l))
    })
}

/// Morse index and nullity of the finite-difference Hessian of E in product
/// exponential coordinates. Eigenvalues within ±τ, τ = 100·h²·(1 + E), are null.
pub fn hessian_index(space: &LengthSpace, pt: &ProductPoint, h: f64) -> Result<(usize, usize)> {
    if !space.is_analytic() {
        return Err(Error::Unsupported { variant: space.kind(), op: "hessian_index" });
    }
    let fr = frames(space, pt)?;
    let n: usize = fr.iter().map(Vec::len).sum();
    let e0 = uniform_energy(space, pt)?;
    let ev = |u: &[f64]| -> Result<f64> { uniform_energy(space, &chart(space, pt, &fr, u)?) };
    let mut hm = DMatrix::zeros(n, n);
    let mut u = vec![0.0; n];
    for a in 0..n {
        u[a] = h;
        let ep = ev(&u)?;
        u[a] = -h;
        let em = ev(&u)?;
        u[a] = 0.0;
        hm[(a, a)] = (ep - 2.0 * e0 + em) / (h * h);
        for b in 0..a {
            let mut f = |sa: f64, sb: f64| -> Result<f64> {
                u[a] = sa * h;
                u[b] = sb * h;
                let r = ev(&u);
                u[a] = 0.0;
                u[b] = 0.0;
                r
            };
            let v = (f(1.0, 1.0)? - f(1.0, -1.0)? - f(-1.0, 1.0)? + f(-1.0, -1.0)?) / (4.0 * h * h);
            hm[(a, b)] = v;
            hm[(b, a)] = v;
        }
    }
    if hm.iter().any(|x| !x.is_finite()) {
        return Err(Error::Nonsmooth("Hessian has non-finite entries".into()));
    }
    let tau = 100.0 * h * h * (1.0 + e0.abs());
    let eig = SymmetricEigen::new(hm).eigenvalues;
    let index = eig.iter().filter(|&&l| l < -tau).count();
    let nullity = eig.iter().filter(|&&l| l.abs() <= tau).count();
    Ok((index, nullity))
}

/// Whether two curves agree up to a shift of parameter (orientation kept).
pub fn same_curve_up_to_rotation(a: &ClosedCurve, b: &ClosedCurve, tol: f64) -> bool {
    let space = a.space();
    if (a.length() - b.length()).abs() > tol {
        return false;
    }
    let lb = b.length();
    let a0 = a.point_at_length(0.0);
    let d = |s: f64| space.distance(&a0, &b.point_at_length(s)).unwrap_or(f64::INFINITY);
    let n = 512;
    let step = lb / n as f64;
    let best = (0..n).map(|i| i as f64 * step).min_by(|x, y| d(*x).total_cmp(&d(*y))).expect("samples");
    // golden-section refinement around the best sample
    let (mut lo, mut hi) = (best - step, best + step);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if d(m1) <= d(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let u = 0.5 * (lo + hi);
    (0..64).all(|i| {
        let s = i as f64 / 64.0 * a.length();
        space.distance(&a.point_at_length(s), &b.point_at_length(u + s)).map_or(false, |x| x <= tol)
    })
}

fn start_rng(seed: u64, start: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(start as u64);
    rng
}

fn random_tuple(space: &LengthSpace, k: usize, rng: &mut ChaCha8Rng) -> ProductPoint {
    ProductPoint { points: (0..k).map(|_| space.random_point(rng)).collect() }
}

fn segment_residual(space: &LengthSpace, pt: &ProductPoint) -> f64 {
    let ds: Vec<f64> = (0..pt.k()).map(|i| space.distance(&pt.points[i], pt.next(i)).unwrap_or(f64::NAN)).collect();
    let mean = ds.iter().sum::<f64>() / ds.len() as f64;
    if mean == 0.0 {
        return 0.0;
    }
    ds.iter().map(|d| (d / mean - 1.0).abs()).fold(0.0, f64::max)
}

/// Multi-start search for critical points of the uniform energy on the k-fold product.
pub fn find_critical_points(space: &Arc<LengthSpace>, k: usize, cfg: &SearchConfig) -> Result<SearchReport> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be ≥ 2, got {k}")));
    }
    if cfg.n_starts == 0 {
        return Err(Error::InvalidArgument("need at least one start".into()));
    }
    if matches!(**space, LengthSpace::FiniteMetric(_)) {
        return Err(Error::Unsupported { variant: "finite", op: "find_critical_points" });
    }
    let runs: Vec<Vec<(RunEnd, Method, usize)>> = (0..cfg.n_starts)
        .into_par_iter()
        .map(|s| {
            let mut rng = start_rng(cfg.seed, s);
            let x0 = random_tuple(space, k, &mut rng);
            let mut out = vec![(descend(space, x0.clone(), cfg, None), Method::Descent, s)];
            if cfg.newton {
                out.push((newton(space, x0, cfg), Method::Newton, s));
            }
            out
        })
        .collect();
    let diam = space.diameter(std::f64::consts::PI / 64.0);
    let collapse = 1e-6 * (1.0 + diam);
    let mut report = SearchReport {
        k,
        starts: cfg.n_starts,
        converged: 0,
        rotating: Vec::new(),
        non_rotating: Vec::new(),
        collapsed: 0,
        rejected_nonsmooth: 0,
        not_converged: 0,
    };
    let mut found = Vec::new();
    for (end, method, start) in runs.into_iter().flatten() {
        match end {
            RunEnd::Nonsmooth => report.rejected_nonsmooth += 1,
            RunEnd::Stalled => report.not_converged += 1,
            RunEnd::Converged(x, e, gn) => {
                report.converged += 1;
                if e.sqrt() <= collapse {
                    report.collapsed += 1;
                } else {
                    found.push((x, e, gn, method, start));
                }
            }
        }
    }
    let records: Vec<CriticalPointRecord> = found
        .into_par_iter()
        .map(|(x, e, gn, method, start)| {
            let curve = tuple_to_curve(space, &x).ok();
            let rotating = curve.as_ref().map_or(false, |c| rotating_on(c, k, 16, TOL_ROTATING));
            let (hessian_index, nullity) = match hessian_index(space, &x, H_FD) {
                Ok((i, n)) => (Some(i), Some(n)),
                Err(_) => (None, None),
            };
            CriticalPointRecord {
                segment_ratio_residual: segment_residual(space, &x),
                length: curve.as_ref().map_or(f64::NAN, ClosedCurve::length),
                point: x,
                energy: e,
                gradient_norm: gn,
                rotating,
                hessian_index,
                nullity,
                method,
                start,
                curve,
            }
        })
        .collect();
    let mut records = records;
    records.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.start.cmp(&b.start)).then((a.method as u8).cmp(&(b.method as u8))));
    let tol = 1e-6 * (1.0 + diam);
    for r in records {
        let bucket = if r.rotating { &mut report.rotating } else { &mut report.non_rotating };
        let dup = bucket.iter().any(|q| match (&q.curve, &r.curve) {
            (Some(a), Some(b)) => same_curve_up_to_rotation(a, b, tol),
            _ => false,
        });
        if !dup {
            bucket.push(r);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct OpenIndexSearch {
    pub value: IndexResult,
    /// False when the value is backed by an exhaustive closed-form argument.
    pub upper_bound_only: bool,
    /// Number of distinct rotating critical points found at each k tried.
    pub rotating_per_k: Vec<(usize, usize)>,
}

/// Smallest k in [3, k_max] whose search finds a nonzero rotating critical point.
pub fn open_index_search(space: &Arc<LengthSpace>, k_max: usize, cfg: &SearchConfig) -> Result<OpenIndexSearch> {
    if k_max < 3 {
        return Err(Error::InvalidArgument(format!("k_max must be ≥ 3, got {k_max}")));
    }
    let mut per_k = Vec::new();
    let mut value = IndexResult::Exceeds;
    for k in 3..=k_max {
        let rep = find_critical_points(space, k, cfg)?;
        per_k.push((k, rep.rotating.len()));
        if !rep.rotating.is_empty() {
            value = IndexResult::Found(k);
            break;
        }
    }
    // every closed geodesic of a circle is an n-fold loop with opind 2n + 1
    let exhaustive = matches!(**space, LengthSpace::Circle { .. });
    Ok(OpenIndexSearch { value, upper_bound_only: !exhaustive, rotating_per_k: per_k })
}

/// Energies of accepted descent iterates from one seeded start.
pub fn descent_trace(space: &LengthSpace, start: ProductPoint, cfg: &SearchConfig) -> (Vec<f64>, bool) {
    let mut trace = Vec::new();
    let end = descend(space, start, cfg, Some(&mut trace));
    (trace, matches!(end, RunEnd::Converged(..)))
}

/// Upper bound (n − 1)·opind on the Morse index of a rotating critical point.
pub fn morse_bound(space: &LengthSpace, opind: usize) -> usize {
    space.dimension().saturating_sub(1) * opind
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle() -> Arc<LengthSpace> {
        Arc::new(LengthSpace::circle(PI).unwrap())
    }

    fn tuple(pts: &[f64]) -> ProductPoint {
        ProductPoint::new(pts.iter().map(|&x| SpacePoint::Circle(x)).collect()).unwrap()
    }

    #[test]
    fn energy_examples() {
        let c = circle();
        let third = 2.0 * PI / 3.0;
        assert!((uniform_energy(&c, &tuple(&[0.0, third, 2.0 * third])).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
        assert_eq!(uniform_energy(&c, &tuple(&[1.0, 1.0, 1.0])).unwrap(), 0.0);
        let t = LengthSpace::torus(vec![PI, PI]).unwrap();
        let p = ProductPoint::new(vec![SpacePoint::Torus(vec![0.0, 0.0]), SpacePoint::Torus(vec![PI, 0.0])]).unwrap();
        assert!((uniform_energy(&t, &p).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
        let w = EnergySpec::uniform(3).unwrap();
        assert!((w.energy(&c, &tuple(&[0.0, third, 2.0 * third])).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn gradient_examples() {
        let c = circle();
        let third = 2.0 * PI / 3.0;
        assert!(gradient_norm(&energy_gradient(&c, &tuple(&[0.0, third, 2.0 * third])).unwrap()) < 1e-12);
        assert!(gradient_norm(&energy_gradient(&c, &tuple(&[0.0, PI / 2.0])).unwrap()) > 1.0);
        assert!(matches!(energy_gradient(&c, &tuple(&[0.0, PI])), Err(Error::Nonsmooth(_))));
    }

    #[test]
    fn circle_search() {
        let c = circle();
        let cfg = SearchConfig { seed: 7, ..Default::default() };
        let r2 = find_critical_points(&c, 2, &cfg).unwrap();
        assert!(r2.rotating.is_empty() && r2.non_rotating.is_empty());
        let r3 = find_critical_points(&c, 3, &cfg).unwrap();
        assert_eq!(r3.rotating.len(), 2);
        for r in &r3.rotating {
            assert!((r.energy - 4.0 * PI * PI).abs() < 1e-6);
            assert!((r.length - 2.0 * PI).abs() < 1e-6);
            assert_eq!(r.hessian_index, Some(0));
            assert!(r.nullity.unwrap() >= 1);
        }
    }

    #[test]
    fn sphere_equator_is_rotating() {
        let s = Arc::new(LengthSpace::sphere(2).unwrap());
        let pts = (0..4).map(|i| {
            let a = i as f64 * PI / 2.0;
            SpacePoint::Sphere(vec![a.cos(), a.sin(), 0.0])
        });
        let pt = ProductPoint::new(pts.collect()).unwrap();
        assert!(is_rotating_critical(&s, &pt, 16, TOL_ROTATING));
        let (index, nullity) = hessian_index(&s, &pt, H_FD).unwrap();
        assert!(index <= morse_bound(&s, 3));
        assert!(nullity >= 1);
    }

    #[test]
    fn torus_line_hessian() {
        let t = Arc::new(LengthSpace::torus(vec![PI, PI]).unwrap());
        let third = 2.0 * PI / 3.0;
        let pt = ProductPoint::new((0..3).map(|i| SpacePoint::Torus(vec![i as f64 * third, 0.5])).collect()).unwrap();
        let c = tuple_to_curve(&t, &pt).unwrap();
        assert!((c.length() - 2.0 * PI).abs() < 1e-12);
        let (index, nullity) = hessian_index(&t, &pt, H_FD).unwrap();
        assert_eq!(index, 0);
        assert!(nullity >= 2);
    }
}
