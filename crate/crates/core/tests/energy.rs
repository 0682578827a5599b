mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lsl::curves::{GridConfig, TWO_PI};
use lsl::energy::*;
use lsl::spaces::LengthSpace;
use lsl::spectra::{spectrum_open_1_over_k, SpectrumConfig};

fn analytic_spaces() -> Vec<Arc<LengthSpace>> {
    vec![
        Arc::new(LengthSpace::circle(PI).unwrap()),
        Arc::new(LengthSpace::torus(vec![PI, PI / 2.0]).unwrap()),
        Arc::new(LengthSpace::torus(vec![PI, 1.3, 0.7]).unwrap()),
        Arc::new(LengthSpace::sphere(2).unwrap()),
        Arc::new(LengthSpace::sphere(3).unwrap()),
    ]
}

#[test]
fn gradient_matches_finite_differences() {
    for (si, space) in analytic_spaces().iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + si as u64);
        let mut worst = 0.0f64;
        for n in 0..100 {
            let k = 2 + n % 5;
            let pt = common::random_smooth_config(space, k, &mut rng);
            worst = worst.max(common::fd_gradient_error(space, &pt, 1e-5));
        }
        assert!(worst <= 1e-6, "{}: worst relative error {worst:e}", space.kind());
    }
}

#[test]
fn rotating_points_are_open_geodesics() {
    let grid = GridConfig::default();
    let cfg = SearchConfig { n_starts: 16, seed: 11, ..SearchConfig::default() };
    for space in analytic_spaces() {
        for k in 3..=4 {
            let rep = find_critical_points(&space, k, &cfg).unwrap();
            for r in &rep.rotating {
                let c = r.curve.as_ref().expect("rotating records carry their curve");
                assert!(c.is_openly(k, &grid).unwrap(), "{} k={k} length {}", space.kind(), r.length);
                assert!(r.gradient_norm <= TOL_GRAD);
            }
        }
    }
}

#[test]
fn open_witnesses_sample_to_critical_tuples() {
    let cfg = SpectrumConfig::default();
    let mut checked = 0;
    for space in analytic_spaces() {
        for k in 3..=5 {
            let s = spectrum_open_1_over_k(&space, k, Some(7.0), &cfg).unwrap();
            for e in &s.entries {
                for c in &e.curves {
                    for j in 0..8 {
                        let t = j as f64 / 8.0 * TWO_PI / k as f64;
                        let pts = (0..k).map(|i| c.eval(t + i as f64 * TWO_PI / k as f64)).collect();
                        let pt = ProductPoint::new(pts).unwrap();
                        let g = gradient_norm(&energy_gradient(&space, &pt).unwrap());
                        assert!(g <= 1e-9 * (1.0 + e.length * k as f64), "{} k={k} L={} |g|={g:e}", space.kind(), e.length);
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked >= 100, "{checked}");
}

#[test]
fn descent_is_monotone() {
    for (si, space) in analytic_spaces().iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7 + si as u64);
        for n in 0..20 {
            let pt = common::random_smooth_config(space, 3 + n % 3, &mut rng);
            let (trace, _) = descent_trace(space, pt, &SearchConfig::default());
            assert!(trace.windows(2).all(|w| w[1] <= w[0]), "{}: {trace:?}", space.kind());
        }
    }
}

#[test]
fn energy_examples() {
    let circle = LengthSpace::circle(PI).unwrap();
    let c = |a: f64| lsl::spaces::SpacePoint::Circle(a);
    let triple = ProductPoint::new(vec![c(0.0), c(TWO_PI / 3.0), c(2.0 * TWO_PI / 3.0)]).unwrap();
    assert!((uniform_energy(&circle, &triple).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
    assert!(gradient_norm(&energy_gradient(&circle, &triple).unwrap()) < 1e-12);
    let pair = ProductPoint::new(vec![c(0.0), c(PI / 2.0)]).unwrap();
    assert!(gradient_norm(&energy_gradient(&circle, &pair).unwrap()) > 1.0);
    let torus = LengthSpace::torus(vec![PI, PI]).unwrap();
    let t = |a: f64, b: f64| lsl::spaces::SpacePoint::Torus(vec![a, b]);
    let pt = ProductPoint::new(vec![t(0.0, 0.0), t(PI, 0.0)]).unwrap();
    assert!((uniform_energy(&torus, &pt).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
    let same = ProductPoint::new(vec![t(1.0, 2.0); 4]).unwrap();
    assert_eq!(uniform_energy(&torus, &same).unwrap(), 0.0);
}

#[test]
fn search_is_deterministic() {
    let space = Arc::new(LengthSpace::sphere(2).unwrap());
    let cfg = SearchConfig { n_starts: 12, seed: 5, ..SearchConfig::default() };
    let a = serde_json::to_string(&find_critical_points(&space, 3, &cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&find_critical_points(&space, 3, &cfg).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn open_index_examples() {
    let cfg = SearchConfig { n_starts: 32, seed: 1, ..SearchConfig::default() };
    for space in [LengthSpace::circle(PI).unwrap(), LengthSpace::sphere(2).unwrap(), LengthSpace::torus(vec![PI, PI]).unwrap()] {
        let o = open_index_search(&Arc::new(space), 6, &cfg).unwrap();
        assert_eq!(o.value.found(), Some(3));
    }
    let o = open_index_search(&Arc::new(LengthSpace::interval()), 6, &cfg).unwrap();
    assert_eq!(o.value.found(), None);
}
