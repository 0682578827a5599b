//! Shared test fixtures: a seeded suite of small rational metric graphs and an
//! exact brute-force oracle for their closed geodesics and 1/k checks.

#![allow(dead_code)]

pub mod props;

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::sync::Arc;

use num_rational::Rational64 as Q;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lsl::energy::{energy_gradient, uniform_energy, ProductPoint};
use lsl::spaces::{LengthSpace, MetricGraph, SpacePoint};

pub type Step = (usize, bool);

#[derive(Clone, Debug)]
pub struct RationalGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, Q)>,
}

impl RationalGraph {
    pub fn space(&self) -> Arc<LengthSpace> {
        let edges: Vec<(usize, usize, f64)> = self.edges.iter().map(|&(a, b, l)| (a, b, to_f64(l))).collect();
        Arc::new(LengthSpace::MetricGraph(MetricGraph::from_edges(self.n, &edges).expect("valid graph")))
    }
}

pub fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

const LENGTHS: [(i64, i64); 3] = [(1, 1), (3, 2), (2, 1)];

/// Connected multigraph (loops allowed) with 2 to 5 vertices and at most 8 edges.
pub fn random_graph(seed: u64) -> RationalGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=5usize);
    let len = |rng: &mut ChaCha8Rng| {
        let (p, q) = LENGTHS[rng.gen_range(0..LENGTHS.len())];
        Q::new(p, q)
    };
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v, len(&mut rng)));
    }
    let extra = rng.gen_range(0..=(8 - edges.len()).min(4));
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        edges.push((a, b, len(&mut rng)));
    }
    RationalGraph { n, edges }
}

/// The fixed suite: the first 60 seeds.
pub fn graph_suite() -> Vec<RationalGraph> {
    (0..60).map(random_graph).collect()
}

pub struct Oracle {
    pub g: RationalGraph,
    /// All-pairs vertex distances (None = unreachable).
    pub dist: Vec<Vec<Option<Q>>>,
}

fn add(a: Option<Q>, b: Q) -> Option<Q> {
    a.map(|x| x + b)
}

fn min_opt(a: Option<Q>, b: Option<Q>) -> Option<Q> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl Oracle {
    pub fn new(g: RationalGraph) -> Self {
        let n = g.n;
        let mut dist = vec![vec![None; n]; n];
        for (v, row) in dist.iter_mut().enumerate() {
            row[v] = Some(Q::from_integer(0));
        }
        for &(a, b, l) in &g.edges {
            dist[a][b] = min_opt(dist[a][b], Some(l));
            dist[b][a] = min_opt(dist[b][a], Some(l));
        }
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(x), Some(y)) = (dist[i][m], dist[m][j]) {
                        dist[i][j] = min_opt(dist[i][j], Some(x + y));
                    }
                }
            }
        }
        Oracle { g, dist }
    }

    pub fn vertex_diameter(&self) -> Q {
        self.dist.iter().flatten().map(|d| d.expect("connected")).max().expect("nonempty")
    }

    fn len(&self, e: usize) -> Q {
        self.g.edges[e].2
    }

    fn tail(&self, s: Step) -> usize {
        let (a, b, _) = self.g.edges[s.0];
        if s.1 {
            a
        } else {
            b
        }
    }

    fn head(&self, s: Step) -> usize {
        let (a, b, _) = self.g.edges[s.0];
        if s.1 {
            b
        } else {
            a
        }
    }

    /// Distance between (edge, offset-from-first-endpoint) points.
    pub fn distance(&self, p: (usize, Q), q: (usize, Q)) -> Q {
        let ends = |(e, x): (usize, Q)| {
            let (a, b, l) = self.g.edges[e];
            [(a, x), (b, l - x)]
        };
        let mut best = if p.0 == q.0 { Some(if p.1 < q.1 { q.1 - p.1 } else { p.1 - q.1 }) } else { None };
        for (u, cu) in ends(p) {
            for (v, cv) in ends(q) {
                best = min_opt(best, add(self.dist[u][v], cu + cv));
            }
        }
        best.expect("connected")
    }

    /// Closed non-backtracking walks of length ≤ r, one per class under
    /// rotation and reversal.
    pub fn closed_walks(&self, r: Q) -> Vec<Vec<Step>> {
        let steps: Vec<Step> = (0..self.g.edges.len()).flat_map(|e| [(e, true), (e, false)]).collect();
        let mut found = BTreeSet::new();
        for &s0 in &steps {
            let mut path = vec![s0];
            self.extend(&steps, &mut path, self.len(s0.0), r, &mut found);
        }
        found.into_iter().collect()
    }

    fn extend(&self, steps: &[Step], path: &mut Vec<Step>, total: Q, r: Q, found: &mut BTreeSet<Vec<Step>>) {
        let first = path[0];
        let last = *path.last().unwrap();
        if self.head(last) == self.tail(first) && last != (first.0, !first.1) {
            found.insert(canonical(path));
        }
        for &s in steps {
            if self.tail(s) != self.head(last) || s == (last.0, !last.1) {
                continue;
            }
            let t = total + self.len(s.0);
            if t > r {
                continue;
            }
            path.push(s);
            self.extend(steps, path, t, r, found);
            path.pop();
        }
    }

    pub fn walk_length(&self, w: &[Step]) -> Q {
        w.iter().map(|s| self.len(s.0)).sum()
    }

    /// Point at arclength `s` (reduced mod the length) along the walk.
    fn point(&self, w: &[Step], cum: &[Q], s: Q) -> (usize, Q, usize) {
        let l = cum[w.len()];
        let mut s = s % l;
        if s < Q::from_integer(0) {
            s += l;
        }
        let i = (0..w.len()).rev().find(|&i| cum[i] <= s).unwrap();
        let off = s - cum[i];
        let (e, fwd) = w[i];
        (e, if fwd { off } else { self.len(e) - off }, i)
    }

    /// Exact decision of d(γ(s), γ(s + L/k)) = L/k for all s.
    pub fn is_one_over_k(&self, w: &[Step], k: usize) -> bool {
        let mut cum = vec![Q::from_integer(0)];
        for s in w {
            cum.push(cum.last().unwrap() + self.len(s.0));
        }
        let l = cum[w.len()];
        let h = l / Q::from_integer(k as i64);
        let wrap = |x: Q| {
            let r = x % l;
            if r < Q::from_integer(0) {
                r + l
            } else {
                r
            }
        };
        let mut events: Vec<Q> = cum[..w.len()].iter().flat_map(|&c| [c, wrap(c - h)]).collect();
        events.sort();
        events.dedup();
        let mut crossings = Vec::new();
        for i in 0..events.len() {
            let s0 = events[i];
            let s1 = if i + 1 < events.len() { events[i + 1] } else { events[0] + l };
            let mid = (s0 + s1) / Q::from_integer(2);
            let (ep, _, ip) = self.point(w, &cum, mid);
            let (eq, _, iq) = self.point(w, &cum, mid + h);
            if ep != eq || w[ip].1 == w[iq].1 {
                continue;
            }
            // x_p(s) = xp0 + σ(s − mid), x_q(s) = xq0 − σ(s − mid)
            let (_, xp0, _) = self.point(w, &cum, mid);
            let (_, xq0, _) = self.point(w, &cum, mid + h);
            let sigma = if w[ip].1 { Q::from_integer(1) } else { Q::from_integer(-1) };
            let s = mid + (xq0 - xp0) / (Q::from_integer(2) * sigma);
            if s0 < s && s < s1 {
                crossings.push(wrap(s));
            }
        }
        events.extend(crossings);
        events.iter().all(|&s| {
            let (ep, xp, _) = self.point(w, &cum, s);
            let (eq, xq, _) = self.point(w, &cum, s + h);
            self.distance((ep, xp), (eq, xq)) == h
        })
    }
}

fn reversed(w: &[Step]) -> Vec<Step> {
    w.iter().rev().map(|&(e, f)| (e, !f)).collect()
}

pub fn canonical(w: &[Step]) -> Vec<Step> {
    let r = reversed(w);
    (0..w.len())
        .flat_map(|i| {
            let a: Vec<Step> = w[i..].iter().chain(&w[..i]).copied().collect();
            let b: Vec<Step> = r[i..].iter().chain(&r[..i]).copied().collect();
            [a, b]
        })
        .min()
        .unwrap()
}

/// Sorted distinct lengths as f64 (exact for the dyadic lengths used here).
pub fn length_set(ls: impl IntoIterator<Item = Q>) -> Vec<f64> {
    let set: BTreeSet<Q> = ls.into_iter().collect();
    set.into_iter().map(to_f64).collect()
}

/// Sorted distinct values of a pipeline spectrum.
pub fn f64_set(mut ls: Vec<f64>) -> Vec<f64> {
    ls.sort_by(f64::total_cmp);
    ls.dedup();
    ls
}

/// Cutoff used for the suite: min(3 · vertex diameter, 5), never above
/// three times the metric diameter.
pub fn suite_radius(o: &Oracle) -> Q {
    (o.vertex_diameter() * Q::from_integer(3)).min(Q::from_integer(5))
}

/// Largest distance between cyclic neighbors, relative to the cut distance,
/// that still counts as a smooth configuration.
const SMOOTH_MARGIN: f64 = 0.1;

/// Whether every neighbor pair stays `SMOOTH_MARGIN` away from the cut locus.
pub fn is_smooth(space: &LengthSpace, pt: &ProductPoint) -> bool {
    let k = pt.k();
    (0..k).all(|i| {
        let (p, q) = (&pt.points[i], &pt.points[(i + 1) % k]);
        match (space, p, q) {
            (LengthSpace::RoundSphere { .. }, _, _) => space.distance(p, q).unwrap() < PI - SMOOTH_MARGIN,
            _ => {
                let cs = space.circumferences().expect("analytic space");
                let (a, b) = match (p, q) {
                    (SpacePoint::Circle(a), SpacePoint::Circle(b)) => (vec![*a], vec![*b]),
                    (SpacePoint::Torus(a), SpacePoint::Torus(b)) => (a.clone(), b.clone()),
                    _ => unreachable!(),
                };
                a.iter().zip(&b).zip(&cs).all(|((x, y), c)| {
                    let d = (y - x).rem_euclid(*c);
                    d.min(c - d) < c / 2.0 - SMOOTH_MARGIN
                })
            }
        }
    })
}

/// Random k-tuple away from the cut locus.
pub fn random_smooth_config<R: Rng>(space: &LengthSpace, k: usize, rng: &mut R) -> ProductPoint {
    loop {
        let pt = ProductPoint::new((0..k).map(|_| space.random_point(rng)).collect()).unwrap();
        if is_smooth(space, &pt) {
            return pt;
        }
    }
}

/// Relative error between `energy_gradient` and central finite differences
/// of `uniform_energy` along an orthonormal tangent frame at each point.
pub fn fd_gradient_error(space: &LengthSpace, pt: &ProductPoint, h: f64) -> f64 {
    let grad = energy_gradient(space, pt).unwrap();
    let (mut err, mut norm) = (0.0f64, 0.0f64);
    for i in 0..pt.k() {
        for v in space.tangent_basis(&pt.points[i]).unwrap() {
            let moved = |t: f64| {
                let mut q = pt.clone();
                let w: Vec<f64> = v.iter().map(|x| x * t).collect();
                q.points[i] = space.exp(&pt.points[i], &w).unwrap();
                uniform_energy(space, &q).unwrap()
            };
            let fd = (moved(h) - moved(-h)) / (2.0 * h);
            let an: f64 = grad[i].iter().zip(&v).map(|(g, x)| g * x).sum();
            err += (fd - an).powi(2);
            norm += an * an;
        }
    }
    err.sqrt() / norm.sqrt().max(1.0)
}
