//! Randomized curve and space generators and the invariant properties checked
//! on them; shared by the proptest suites and the acceptance target.

use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use lsl::curves::{ClosedCurve, GridConfig, IndexResult, TWO_PI};
use lsl::energy::{find_critical_points, uniform_energy, ProductPoint, SearchConfig};
use lsl::spaces::LengthSpace;
use lsl::spectra::{enumerate_graph_geodesics, spectrum_1_over_k, spectrum_open_1_over_k, Spectrum, SpectrumConfig, WALK_CAP};

/// Enumeration cutoff for graph curves and spectra.
const GRAPH_R: f64 = 6.0;

#[derive(Clone, Debug)]
pub enum SpaceSpec {
    Graph(u64),
    Torus(Vec<f64>),
    Sphere(usize),
}

impl SpaceSpec {
    pub fn build(&self) -> Arc<LengthSpace> {
        match self {
            SpaceSpec::Graph(seed) => super::random_graph(*seed).space(),
            SpaceSpec::Torus(d) => Arc::new(LengthSpace::torus(d.clone()).unwrap()),
            SpaceSpec::Sphere(n) => Arc::new(LengthSpace::sphere(*n).unwrap()),
        }
    }

    /// Exact diameter.
    fn diameter(&self, space: &LengthSpace) -> f64 {
        match self {
            SpaceSpec::Graph(_) => space.diameter(1.0),
            SpaceSpec::Torus(d) => d.iter().map(|x| x * x).sum::<f64>().sqrt(),
            SpaceSpec::Sphere(_) => PI,
        }
    }

    fn cutoff(&self, wanted: f64) -> f64 {
        match self {
            SpaceSpec::Graph(_) => wanted.min(GRAPH_R),
            _ => wanted,
        }
    }
}

#[derive(Clone, Debug)]
pub enum CurveSpec {
    /// Graph seed and index into its enumerated closed geodesics.
    Graph(u64, usize),
    Torus { diameters: Vec<f64>, start: Vec<f64>, winding: Vec<i64> },
    Sphere { dim: usize, frame: Vec<f64>, n: u32 },
}

pub fn space_spec() -> impl Strategy<Value = SpaceSpec> {
    prop_oneof![
        (0u64..10_000).prop_map(SpaceSpec::Graph),
        prop::collection::vec(0.4f64..2.0, 1..=3).prop_map(SpaceSpec::Torus),
        (2usize..=3).prop_map(SpaceSpec::Sphere),
    ]
}

pub fn curve_spec() -> impl Strategy<Value = CurveSpec> {
    let torus = (1usize..=3)
        .prop_flat_map(|m| (prop::collection::vec(0.4f64..2.0, m), prop::collection::vec(0.0f64..4.0, m), prop::collection::vec(-3i64..=3, m)))
        .prop_filter("nonzero winding", |(_, _, w)| w.iter().any(|&x| x != 0))
        .prop_map(|(diameters, start, winding)| CurveSpec::Torus { diameters, start, winding });
    let sphere = (2usize..=3)
        .prop_flat_map(|dim| (Just(dim), prop::collection::vec(-1.0f64..1.0, 2 * (dim + 1)), 1u32..=3))
        .prop_map(|(dim, frame, n)| CurveSpec::Sphere { dim, frame, n });
    prop_oneof![(0u64..10_000, any::<usize>()).prop_map(|(s, i)| CurveSpec::Graph(s, i)), torus, sphere]
}

fn normalize(v: &[f64]) -> Option<Vec<f64>> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (n > 1e-3).then(|| v.iter().map(|x| x / n).collect())
}

/// Builds the curve, or `None` when the spec is degenerate (a forest, a
/// nearly parallel frame).
pub fn build(spec: &CurveSpec) -> Option<(SpaceSpec, ClosedCurve)> {
    match spec {
        CurveSpec::Graph(seed, i) => {
            let space = super::random_graph(*seed).space();
            let e = enumerate_graph_geodesics(&space, GRAPH_R, WALK_CAP).unwrap();
            if e.curves.is_empty() {
                return None;
            }
            Some((SpaceSpec::Graph(*seed), e.curves[i % e.curves.len()].curve.clone()))
        }
        CurveSpec::Torus { diameters, start, winding } => {
            let s = SpaceSpec::Torus(diameters.clone());
            let c = ClosedCurve::torus_line(s.build(), start.clone(), winding).unwrap();
            Some((s, c))
        }
        CurveSpec::Sphere { dim, frame, n } => {
            let m = dim + 1;
            let p = normalize(&frame[..m])?;
            let dot: f64 = frame[m..].iter().zip(&p).map(|(a, b)| a * b).sum();
            let t: Vec<f64> = frame[m..].iter().zip(&p).map(|(a, b)| a - dot * b).collect();
            let t = normalize(&t)?;
            let s = SpaceSpec::Sphere(*dim);
            let c = ClosedCurve::great_circle(s.build(), p, t, *n).unwrap();
            Some((s, c))
        }
    }
}

pub fn contained(a: &Spectrum, b: &Spectrum, tol: f64) -> bool {
    a.lengths().iter().all(|x| b.lengths().iter().any(|y| (x - y).abs() <= tol))
}

pub fn found(i: IndexResult) -> Option<usize> {
    i.found()
}

/// A 1/k geodesic is a 1/(k+1) geodesic; spectra nest in k.
pub fn nesting(spec: &CurveSpec, sspec: &SpaceSpec, k: usize) -> Result<(), TestCaseError> {
    let Some((_, c)) = build(spec) else { return Err(TestCaseError::reject("degenerate")) };
    let grid = GridConfig::default();
    for j in 2..=8 {
        if c.check_one_over_k_with(j, &grid).unwrap().holds() {
            prop_assert!(c.check_one_over_k_with(j + 1, &grid).unwrap().holds(), "holds at {j} but not {}", j + 1);
        }
    }
    let space = sspec.build();
    let cfg = SpectrumConfig::default();
    let r = sspec.cutoff(10.0);
    let a = spectrum_1_over_k(&space, k, Some(r), &cfg).unwrap();
    let b = spectrum_1_over_k(&space, k + 1, Some(r), &cfg).unwrap();
    prop_assert!(contained(&a, &b, 1e-9), "{:?} ⊄ {:?}", a.lengths(), b.lengths());
    Ok(())
}

/// 1/k spectra live in (0, k · diameter], even when asked for more.
pub fn diameter_truncation(spec: &CurveSpec, sspec: &SpaceSpec, k: usize) -> Result<(), TestCaseError> {
    let space = sspec.build();
    let diam = sspec.diameter(&space);
    let r = sspec.cutoff(3.0 * k as f64 * diam);
    let s = spectrum_1_over_k(&space, k, Some(r), &SpectrumConfig::default()).unwrap();
    for l in s.lengths() {
        prop_assert!(l <= k as f64 * diam + 1e-9 * (1.0 + l), "length {l} > {k}·{diam}");
    }
    let Some((cs, c)) = build(spec) else { return Err(TestCaseError::reject("degenerate")) };
    let d = cs.diameter(c.space());
    if let Some(m) = found(c.minimizing_index(16, &GridConfig::default()).unwrap()) {
        prop_assert!(m as f64 >= c.length() / d - 1e-9, "minind {m} < L/diam = {}", c.length() / d);
    }
    Ok(())
}

/// L_{1/(k−1)} ⊆ L^open_{1/k} ⊆ L_{1/k}.
pub fn back_sandwich(sspec: &SpaceSpec, k: usize) -> Result<(), TestCaseError> {
    let space = sspec.build();
    let cfg = SpectrumConfig::default();
    let r = sspec.cutoff(9.0);
    let lower = spectrum_1_over_k(&space, k - 1, Some(r), &cfg).unwrap();
    let open = spectrum_open_1_over_k(&space, k, Some(r), &cfg).unwrap();
    let upper = spectrum_1_over_k(&space, k, Some(r), &cfg).unwrap();
    prop_assert!(contained(&lower, &open, 1e-9), "{:?} ⊄ {:?}", lower.lengths(), open.lengths());
    prop_assert!(contained(&open, &upper, 1e-9), "{:?} ⊄ {:?}", open.lengths(), upper.lengths());
    let open2 = spectrum_open_1_over_k(&space, 2, Some(r), &cfg).unwrap();
    prop_assert!(open2.entries.is_empty());
    Ok(())
}

/// L/m ≤ injrad < L/(m − 1) for m = minind.
pub fn injrad_sandwich(spec: &CurveSpec) -> Result<(), TestCaseError> {
    let Some((_, c)) = build(spec) else { return Err(TestCaseError::reject("degenerate")) };
    let grid = GridConfig::default();
    let Some(m) = found(c.minimizing_index(16, &grid).unwrap()) else { return Ok(()) };
    let (rho, err) = c.curve_injrad(grid.delta).unwrap();
    let slack = c.tol_cert(grid.delta) + err;
    let l = c.length();
    prop_assert!(l / m as f64 <= rho + slack, "L/m = {} > ρ = {rho}", l / m as f64);
    prop_assert!(rho < l / (m - 1) as f64 + slack, "ρ = {rho} ≥ L/(m−1) = {}", l / (m - 1) as f64);
    Ok(())
}

/// minind(γ^n) ∈ [n(m − 1), n·m] ∩ [2n, ∞).
pub fn iteration_interval(spec: &CurveSpec, n: usize) -> Result<(), TestCaseError> {
    let Some((_, c)) = build(spec) else { return Err(TestCaseError::reject("degenerate")) };
    let grid = GridConfig::default();
    let Some(m) = found(c.minimizing_index(16, &grid).unwrap()) else { return Ok(()) };
    let it = c.iterate(n).unwrap();
    let mi = found(it.minimizing_index(n * m + 2, &grid).unwrap());
    prop_assert!(mi.is_some(), "iterate has no index ≤ {}", n * m + 2);
    let mi = mi.unwrap();
    prop_assert!(mi >= n * (m - 1) && mi <= n * m && mi >= 2 * n, "m = {m}, n = {n}, minind(γ^n) = {mi}");
    Ok(())
}

/// minind ≤ opind ≤ minind + 1.
pub fn minop_gap(spec: &CurveSpec) -> Result<(), TestCaseError> {
    let Some((_, c)) = build(spec) else { return Err(TestCaseError::reject("degenerate")) };
    let grid = GridConfig::default();
    let Some(m) = found(c.minimizing_index(16, &grid).unwrap()) else { return Ok(()) };
    let o = found(c.open_index(m + 2, &grid).unwrap());
    prop_assert!(o.is_some(), "opind exceeds minind + 2 (m = {m})");
    let o = o.unwrap();
    prop_assert!(m <= o && o <= m + 1, "minind {m}, opind {o}");
    Ok(())
}

/// A tuple evenly sampled on a 1/k geodesic, and every rotating critical
/// point found by the search, has energy L².
pub fn energy_length_identity(spec: &CurveSpec, sspec: &SpaceSpec, seed: u64, extra: usize) -> Result<(), TestCaseError> {
    if let Some((cs, c)) = build(spec) {
        if !matches!(cs, SpaceSpec::Graph(_)) {
            if let Some(m) = found(c.minimizing_index(16, &GridConfig::default()).unwrap()) {
                let k = m + extra;
                let pt = ProductPoint::new((0..k).map(|i| c.eval(i as f64 * TWO_PI / k as f64)).collect()).unwrap();
                let e = uniform_energy(c.space(), &pt).unwrap();
                let l2 = c.length().powi(2);
                prop_assert!((e - l2).abs() <= 1e-8 * l2, "E = {e}, L² = {l2}");
            }
        }
    }
    if matches!(sspec, SpaceSpec::Graph(_)) {
        return Ok(());
    }
    let space = sspec.build();
    let cfg = SearchConfig { n_starts: 4, seed, ..SearchConfig::default() };
    let rep = find_critical_points(&space, 3 + extra, &cfg).unwrap();
    for r in &rep.rotating {
        let l2 = r.length.powi(2);
        prop_assert!((r.energy - l2).abs() <= 1e-8 * l2, "E = {}, L² = {l2}", r.energy);
    }
    Ok(())
}
