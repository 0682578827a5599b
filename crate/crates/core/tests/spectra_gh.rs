use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lsl::gh::*;
use lsl::spaces::LengthSpace;
use lsl::spectra::{spectrum_1_over_k, SpectrumConfig};

/// Lattice lengths sqrt((2πa)² + (2πb/j)²) with 0 ≤ a, b ≤ ⌊k/2⌋, nonzero, ≤ r.
fn lattice(j: f64, k: usize, r: f64) -> Vec<f64> {
    let m = (k / 2) as i32;
    let mut v: Vec<f64> = (0..=m)
        .flat_map(|a| (0..=m).map(move |b| (a, b)))
        .map(|(a, b)| ((2.0 * PI * a as f64).powi(2) + (2.0 * PI * b as f64 / j).powi(2)).sqrt())
        .filter(|&l| l > 0.0 && l <= r)
        .collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    v
}

fn assert_same(got: &[f64], want: &[f64], tol: f64, ctx: &str) {
    assert_eq!(got.len(), want.len(), "{ctx}: {got:?} vs {want:?}");
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= tol, "{ctx}: {got:?} vs {want:?}");
    }
}

fn torus(j: f64) -> Arc<LengthSpace> {
    Arc::new(LengthSpace::torus(vec![PI, PI / j]).unwrap())
}

#[test]
fn torus_spectra_follow_the_lattice() {
    let cfg = SpectrumConfig::default();
    for j in [1.0, 2.0, 4.0, 8.0] {
        for k in 2..=7 {
            let got = spectrum_1_over_k(&torus(j), k, Some(10.0), &cfg).unwrap();
            assert!(got.undecided.is_empty());
            assert_same(&got.lengths(), &lattice(j, k, 10.0), 1e-9, &format!("j={j} k={k}"));
        }
    }
}

#[test]
fn even_and_next_odd_index_agree_on_tori() {
    let cfg = SpectrumConfig::default();
    for j in [1.0, 2.0, 4.0, 8.0] {
        for m in 1..=3 {
            let even = spectrum_1_over_k(&torus(j), 2 * m, Some(10.0), &cfg).unwrap().lengths();
            let odd = spectrum_1_over_k(&torus(j), 2 * m + 1, Some(10.0), &cfg).unwrap().lengths();
            assert_same(&even, &odd, 1e-9, &format!("j={j} m={m}"));
        }
    }
}

fn hausdorff_oracle(a: &[f64], b: &[f64]) -> f64 {
    let near = |x: f64, s: &[f64]| s.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min);
    a.iter().map(|&x| near(x, b)).chain(b.iter().map(|&y| near(y, a))).fold(0.0, f64::max)
}

#[test]
fn torus_collapse_matches_lattice_prediction() {
    let limit = [0.0, 2.0 * PI];
    for j in [2.0, 4.0, 8.0, 16.0, 32.0] {
        for (eps, expect_included) in [(4.0 * PI / j + 1e-9, true), (2.0 * PI / j + 1e-9, j < 4.0)] {
            let cfg = ExperimentConfig { k: 4, r: 10.0, epsilon: eps, gh_r: None, spectrum: SpectrumConfig::default() };
            let rep = convergence_experiment(&Family::TorusCollapse, &[j], &cfg).unwrap();
            assert_same(&rep.limit_lengths, &[2.0 * PI], 1e-9, "limit");
            let m = &rep.members[0];
            let member: Vec<f64> = std::iter::once(0.0).chain(lattice(j, 4, 10.0)).collect();
            assert!((m.hausdorff - hausdorff_oracle(&member, &limit)).abs() < 1e-9, "j={j}");
            assert_eq!(m.inclusion == Inclusion::Holds, expect_included, "j={j} eps={eps}: {:?}", m.outliers);
        }
    }
    let cfg = ExperimentConfig { k: 4, r: 10.0, epsilon: 1.0, gh_r: None, spectrum: SpectrumConfig::default() };
    let rep = convergence_experiment(&Family::TorusCollapse, &[4.0, 8.0, 16.0, 32.0], &cfg).unwrap();
    assert!(rep.hausdorff_strictly_decreasing);
    for m in &rep.members {
        assert!((m.hausdorff - 4.0 * PI / m.param).abs() < 1e-9);
    }
}

#[test]
fn projection_bound_shrinks_with_the_fiber() {
    let circle = LengthSpace::circle(PI).unwrap();
    let r = PI / 32.0;
    let mut last = f64::INFINITY;
    for j in [4.0, 8.0, 16.0] {
        let t = torus(j);
        let b = gh_upper_bound(&t, &circle, r, &GhMethod::ProvidedMap(torus_projection(&t, &circle).unwrap())).unwrap();
        assert!(b.bound <= PI / j + 2.0 * r, "j={j}: {}", b.bound);
        assert!(b.bound < last);
        last = b.bound;
    }
}

fn random_metric(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0))).collect();
    pts.iter().map(|a| pts.iter().map(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()).collect()).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    permutations(n - 1)
        .into_iter()
        .flat_map(|p| (0..n).map(move |i| {
            let mut q = p.clone();
            q.insert(i, n - 1);
            q
        }))
        .collect()
}

#[test]
fn exact_bijection_is_optimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for n in 1..=6 {
        for _ in 0..5 {
            let (dx, dy) = (random_metric(n, &mut rng), random_metric(n, &mut rng));
            let best = permutations(n)
                .into_iter()
                .map(|p| (0..n).flat_map(|a| (0..n).map(move |c| (a, c))).map(|(a, c)| (dx[a][c] - dy[p[a]][p[c]]).abs()).fold(0.0, f64::max))
                .fold(f64::INFINITY, f64::min);
            let got = exact_bijection(&dx, &dy).unwrap();
            assert!((got.distortion - best).abs() < 1e-12);
            assert_eq!(correspondence_distortion(&dx, &dy, &got.pairs).unwrap(), got.distortion);
        }
    }
    let big = random_metric(9, &mut rng);
    assert!(matches!(exact_bijection(&big, &big), Err(lsl::Error::NetTooLarge { .. })));
}

#[test]
fn greedy_relations_cover_both_sides() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for (n, m) in [(3, 5), (6, 2), (7, 7), (12, 9)] {
        let (dx, dy) = (random_metric(n, &mut rng), random_metric(m, &mut rng));
        let c = greedy_correspondence(&dx, &dy).unwrap();
        assert!((0..n).all(|i| c.pairs.iter().any(|p| p.0 == i)));
        assert!((0..m).all(|j| c.pairs.iter().any(|p| p.1 == j)));
        assert_eq!(correspondence_distortion(&dx, &dy, &c.pairs).unwrap(), c.distortion);
    }
    assert!(matches!(correspondence_distortion(&vec![vec![0.0; 2]; 2], &[vec![0.0]], &[(0, 0)]), Err(lsl::Error::NonCovering(_))));
}

#[test]
fn lattice_gaps() {
    let s = spectrum_1_over_k(&torus(4.0), 4, Some(10.0), &SpectrumConfig::default()).unwrap();
    assert_eq!(gap_check(&s, 3.2, 6.2, 0.0).unwrap(), GapResult::Gap);
    match gap_check(&s, 3.0, 6.4, 0.0).unwrap() {
        GapResult::Occupied { lengths, .. } => assert_same(&lengths, &[PI, 2.0 * PI], 1e-9, "occupied"),
        other => panic!("{other:?}"),
    }
}
