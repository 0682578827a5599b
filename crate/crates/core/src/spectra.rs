//! Closed geodesic enumeration and truncated length spectra.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::curves::{ClosedCurve, GridConfig, IndexResult, OpenOutcome, CheckOutcome, DEFAULT_K_MAX};
use crate::error::{Error, Result};
use crate::spaces::{LengthSpace, MetricGraph};

/// Default cap on the number of walks explored during graph enumeration.
pub const WALK_CAP: usize = 1_000_000;

/// A directed edge traversal: edge id and whether it runs from `a` to `b`.
pub type Step = (usize, bool);

#[derive(Clone, Debug)]
pub struct EnumeratedCurve {
    pub curve: ClosedCurve,
    /// Canonical step sequence (graphs only).
    pub walk: Vec<Step>,
    /// 1 if the curve equals its reversal up to rotation, else 2.
    pub oriented_multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct GeodesicEnumeration {
    pub r: f64,
    pub curves: Vec<EnumeratedCurve>,
    pub complete: bool,
}

/// Where an entry's indices came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexSource {
    ClosedForm,
    Checked,
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub curve: ClosedCurve,
    pub label: String,
    /// Known indices; `None` until checked.
    pub minind: Option<IndexResult>,
    pub opind: Option<IndexResult>,
    pub source: IndexSource,
    pub oriented_multiplicity: usize,
}

impl Witness {
    fn closed_form(curve: ClosedCurve, label: String, m: usize) -> Self {
        Witness {
            curve,
            label,
            minind: Some(IndexResult::Found(m)),
            opind: Some(IndexResult::Found(m + 1)),
            source: IndexSource::ClosedForm,
            oriented_multiplicity: 2,
        }
    }

    fn checked(curve: ClosedCurve, label: String, oriented_multiplicity: usize) -> Self {
        Witness { curve, label, minind: None, opind: None, source: IndexSource::Checked, oriented_multiplicity }
    }

    /// Fills in both indices, checking up to `k_max`.
    pub fn resolve(&mut self, k_max: usize, grid: &GridConfig) -> Result<(IndexResult, IndexResult)> {
        if self.minind.is_none() {
            self.minind = Some(self.curve.minimizing_index(k_max, grid)?);
        }
        if self.opind.is_none() {
            self.opind = Some(self.curve.open_index(k_max.max(3), grid)?);
        }
        Ok((self.minind.expect("set"), self.opind.expect("set")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumEntry {
    pub length: f64,
    pub minind: IndexResult,
    pub opind: IndexResult,
    pub open: bool,
    pub witnesses: Vec<String>,
    #[serde(skip)]
    pub curves: Vec<ClosedCurve>,
}

#[derive(Clone, Debug, Serialize)]
pub struct UndecidedEntry {
    pub length: f64,
    pub witness: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    pub space: String,
    /// `None` for the full spectrum.
    pub k: Option<usize>,
    #[serde(rename = "R")]
    pub r: f64,
    pub entries: Vec<SpectrumEntry>,
    pub undecided: Vec<UndecidedEntry>,
    pub complete: bool,
    pub open_only: bool,
}

impl Spectrum {
    pub fn lengths(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.length).collect()
    }

    pub fn is_decided(&self) -> bool {
        self.undecided.is_empty()
    }
}

/// Settings shared by the spectrum computations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumConfig {
    pub grid: GridConfig,
    pub k_max: usize,
    pub walk_cap: usize,
    /// Probe density for diameter estimates on continuous spaces.
    pub density: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig { grid: GridConfig::default(), k_max: DEFAULT_K_MAX, walk_cap: WALK_CAP, density: std::f64::consts::PI / 64.0 }
    }
}

fn reverse_step(s: Step) -> Step {
    (s.0, !s.1)
}

fn step_ends(g: &MetricGraph, s: Step) -> (usize, usize) {
    let e = g.edge(s.0);
    if s.1 {
        (e.a, e.b)
    } else {
        (e.b, e.a)
    }
}

fn min_rotation(seq: &[Step]) -> Vec<Step> {
    (0..seq.len())
        .map(|r| seq[r..].iter().chain(&seq[..r]).copied().collect::<Vec<_>>())
        .min()
        .expect("nonempty walk")
}

/// Canonical form under rotation and reversal, plus the oriented multiplicity.
pub fn canonical_walk(seq: &[Step]) -> (Vec<Step>, usize) {
    let fwd = min_rotation(seq);
    let rev: Vec<Step> = seq.iter().rev().map(|&s| reverse_step(s)).collect();
    let back = min_rotation(&rev);
    let mult = if fwd == back { 1 } else { 2 };
    (fwd.min(back), mult)
}

/// All closed non-backtracking walks of length ≤ R, up to rotation and reversal.
pub fn enumerate_graph_geodesics(space: &Arc<LengthSpace>, r: f64, cap: usize) -> Result<GeodesicEnumeration> {
    let g = space.as_graph().ok_or(Error::Unsupported { variant: "non-graph", op: "enumerate_graph_geodesics" })?;
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("truncation radius must be positive, got {r}")));
    }
    let slack = 1e-9 * (1.0 + r);
    let starts: Vec<Step> = (0..g.edges().len()).flat_map(|e| [(e, true), (e, false)]).collect();
    let explored = std::sync::atomic::AtomicUsize::new(0);
    let found: Vec<Result<BTreeSet<(Vec<Step>, usize)>>> = starts
        .par_iter()
        .map(|&s0| {
            let mut out = BTreeSet::new();
            let origin = step_ends(g, s0).0;
            let mut path = vec![s0];
            let mut stack: Vec<(usize, f64, usize)> = vec![(step_ends(g, s0).1, g.edge(s0.0).len, 0)];
            // iterative DFS: (current vertex, length so far, next incidence index)
            while let Some(top) = stack.last_mut() {
                let (v, len, idx) = *top;
                if idx == 0 && v == origin {
                    let last = *path.last().expect("nonempty");
                    if reverse_step(last) != s0 || path.len() == 1 && g.edge(s0.0).a == g.edge(s0.0).b {
                        if reverse_step(last) != s0 {
                            out.insert(canonical_walk(&path));
                        }
                    }
                }
                let inc = g.incident(v);
                if idx >= inc.len() {
                    stack.pop();
                    path.pop();
                    continue;
                }
                top.2 += 1;
                let (e, fwd) = inc[idx];
                let step = (e, fwd);
                if step == reverse_step(*path.last().expect("nonempty")) {
                    continue;
                }
                let nl = len + g.edge(e).len;
                if nl > r + slack {
                    continue;
                }
                if explored.fetch_add(1, std::sync::atomic::Ordering::Relaxed) >= cap {
                    return Err(Error::EnumerationCap { cap });
                }
                path.push(step);
                stack.push((step_ends(g, step).1, nl, 0));
            }
            Ok(out)
        })
        .collect();
    let mut all = BTreeSet::new();
    for f in found {
        all.extend(f?);
    }
    let mut curves: Vec<EnumeratedCurve> = all
        .into_iter()
        .map(|(walk, mult)| {
            let curve = ClosedCurve::graph_walk(space.clone(), &walk)?;
            Ok(EnumeratedCurve { curve, walk, oriented_multiplicity: mult })
        })
        .collect::<Result<_>>()?;
    curves.sort_by(|a, b| a.curve.length().total_cmp(&b.curve.length()).then_with(|| a.walk.cmp(&b.walk)));
    Ok(GeodesicEnumeration { r, curves, complete: true })
}

fn walk_label(g: &MetricGraph, walk: &[Step]) -> String {
    walk.iter()
        .map(|&(e, fwd)| {
            let (a, b) = step_ends(g, (e, fwd));
            format!("{}>{}#{}", g.names()[a], g.names()[b], e)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Closed geodesics of length ≤ R, and whether the list is known to be exhaustive.
/// Mesh candidates are seed loops and their iterates that pass the geodesic check.
pub fn candidate_geodesics(space: &Arc<LengthSpace>, r: f64, cfg: &SpectrumConfig) -> Result<(Vec<Witness>, bool)> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("truncation radius must be positive and finite, got {r}")));
    }
    let tol = space.length_tolerance(r);
    match &**space {
        LengthSpace::FiniteMetric(_) => Ok((Vec::new(), true)),
        LengthSpace::Circle { diameter } => {
            let c = 2.0 * diameter;
            let mut out = Vec::new();
            let mut n = 1i64;
            while n as f64 * c <= r + tol {
                out.push(Witness::closed_form(ClosedCurve::circle_loop(space.clone(), 0.0, n)?, format!("circle x{n}"), 2 * n as usize));
                n += 1;
            }
            Ok((out, true))
        }
        LengthSpace::RoundSphere { dim } => {
            let mut out = Vec::new();
            let mut n = 1u32;
            while 2.0 * std::f64::consts::PI * n as f64 <= r + tol {
                let mut p = vec![0.0; dim + 1];
                let mut t = vec![0.0; dim + 1];
                p[0] = 1.0;
                t[1] = 1.0;
                out.push(Witness::closed_form(ClosedCurve::great_circle(space.clone(), p, t, n)?, format!("great circle x{n}"), 2 * n as usize));
                n += 1;
            }
            Ok((out, true))
        }
        LengthSpace::FlatTorus { diameters } => {
            let cs: Vec<f64> = diameters.iter().map(|d| 2.0 * d).collect();
            let bounds: Vec<i64> = cs.iter().map(|c| ((r + tol) / c).floor() as i64).collect();
            let mut vecs: Vec<Vec<i64>> = vec![Vec::new()];
            for &b in &bounds {
                vecs = vecs.into_iter().flat_map(|v| (-b..=b).map(move |x| [v.clone(), vec![x]].concat())).collect();
            }
            let mut out = Vec::new();
            for a in vecs {
                // one representative per ± pair
                match a.iter().find(|x| **x != 0) {
                    Some(x) if *x > 0 => {}
                    _ => continue,
                }
                let len = a.iter().zip(&cs).map(|(k, c)| (*k as f64 * c).powi(2)).sum::<f64>().sqrt();
                if len > r + tol {
                    continue;
                }
                let m = a.iter().map(|x| x.unsigned_abs() as usize).max().expect("nonempty");
                out.push(Witness::closed_form(ClosedCurve::torus_line(space.clone(), vec![0.0; a.len()], &a)?, format!("torus {a:?}"), 2 * m));
            }
            Ok((out, true))
        }
        LengthSpace::MetricGraph(g) => {
            let en = enumerate_graph_geodesics(space, r, cfg.walk_cap)?;
            let out = en.curves.into_iter().map(|c| Witness::checked(c.curve, walk_label(g, &c.walk), c.oriented_multiplicity)).collect();
            Ok((out, true))
        }
        LengthSpace::MeshSurface(m) => {
            let mut out = Vec::new();
            for (i, lp) in m.loops().iter().enumerate() {
                let base = ClosedCurve::mesh_vertex_loop(space.clone(), lp)?;
                let mut n = 1;
                while base.length() * n as f64 <= r + tol {
                    out.push(Witness::checked(base.iterate(n)?, format!("seed loop {i} x{n}"), 2));
                    n += 1;
                }
            }
            let keep: Vec<bool> = out.par_iter().map(|w| w.curve.is_closed_geodesic(&cfg.grid)).collect::<Result<_>>()?;
            let out = out.into_iter().zip(keep).filter_map(|(w, k)| k.then_some(w)).collect();
            Ok((out, false))
        }
    }
}

fn describe(space: &LengthSpace) -> String {
    match space {
        LengthSpace::FiniteMetric(m) => format!("finite({})", m.len()),
        LengthSpace::MetricGraph(g) => format!("graph({} vertices, {} edges)", g.vertex_count(), g.edges().len()),
        LengthSpace::Circle { diameter } => format!("circle({diameter})"),
        LengthSpace::FlatTorus { diameters } => format!("torus({diameters:?})"),
        LengthSpace::RoundSphere { dim } => format!("sphere({dim})"),
        LengthSpace::MeshSurface(m) => format!("mesh({} vertices, {} faces)", m.vertices().len(), m.faces().len()),
    }
}

fn min_index(a: IndexResult, b: IndexResult) -> IndexResult {
    match (a.found(), b.found()) {
        (Some(x), Some(y)) => IndexResult::Found(x.min(y)),
        (Some(_), None) => a,
        (None, Some(_)) => b,
        _ => match (a, b) {
            (IndexResult::Undecided(x), IndexResult::Undecided(y)) => IndexResult::Undecided(x.min(y)),
            (IndexResult::Undecided(_), _) => a,
            _ => b,
        },
    }
}

/// Groups accepted witnesses into entries of equal length. Witnesses must be resolved.
fn assemble(space: &LengthSpace, k: Option<usize>, r: f64, accepted: Vec<(Witness, bool)>, undecided: Vec<UndecidedEntry>, complete: bool, open_only: bool) -> Spectrum {
    let mut accepted = accepted;
    accepted.sort_by(|a, b| a.0.curve.length().total_cmp(&b.0.curve.length()).then_with(|| a.0.label.cmp(&b.0.label)));
    let mut entries: Vec<SpectrumEntry> = Vec::new();
    for (w, open) in accepted {
        let l = w.curve.length();
        let (mi, oi) = (w.minind.unwrap_or(IndexResult::Exceeds), w.opind.unwrap_or(IndexResult::Exceeds));
        match entries.last_mut() {
            Some(e) if (l - e.length).abs() <= space.length_tolerance(l) => {
                e.minind = min_index(e.minind, mi);
                e.opind = min_index(e.opind, oi);
                e.open |= open;
                e.witnesses.push(w.label);
                e.curves.push(w.curve);
            }
            _ => entries.push(SpectrumEntry { length: l, minind: mi, opind: oi, open, witnesses: vec![w.label], curves: vec![w.curve] }),
        }
    }
    let mut undecided = undecided;
    undecided.sort_by(|a, b| a.length.total_cmp(&b.length).then_with(|| a.witness.cmp(&b.witness)));
    Spectrum { space: describe(space), k, r, entries, undecided, complete, open_only }
}

fn resolve_all(ws: Vec<(Witness, bool)>, cfg: &SpectrumConfig) -> Result<Vec<(Witness, bool)>> {
    ws.into_par_iter()
        .map(|(mut w, open)| {
            w.resolve(cfg.k_max, &cfg.grid)?;
            Ok((w, open))
        })
        .collect()
}

/// Lengths of all closed geodesics in (0, R].
pub fn spectrum(space: &Arc<LengthSpace>, r: f64, cfg: &SpectrumConfig) -> Result<Spectrum> {
    let (cands, complete) = candidate_geodesics(space, r, cfg)?;
    let accepted = resolve_all(cands.into_iter().map(|w| (w, false)).collect(), cfg)?;
    Ok(assemble(space, None, r, accepted, Vec::new(), complete, false))
}

/// Default truncation for k-spectra: every 1/k geodesic is at most k times the diameter long.
pub fn default_radius(space: &LengthSpace, k: usize, cfg: &SpectrumConfig) -> f64 {
    let r = k as f64 * space.diameter(cfg.density);
    r + space.length_tolerance(r)
}

fn one_over_k_outcome(w: &Witness, k: usize, grid: &GridConfig) -> Result<CheckOutcome> {
    Ok(match (w.source, w.minind) {
        (IndexSource::ClosedForm, Some(IndexResult::Found(m))) if m <= k => CheckOutcome::Holds { margin: 0.0 },
        (IndexSource::ClosedForm, Some(_)) => CheckOutcome::Violated { margin: f64::NAN, t: 0.0 },
        _ => w.curve.check_one_over_k_with(k, grid)?,
    })
}

/// Lengths of 1/k geodesics in (0, R]; `r = None` uses k·diameter.
pub fn spectrum_1_over_k(space: &Arc<LengthSpace>, k: usize, r: Option<f64>, cfg: &SpectrumConfig) -> Result<Spectrum> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be ≥ 2, got {k}")));
    }
    let r = r.unwrap_or_else(|| default_radius(space, k, cfg));
    let cfg = SpectrumConfig { k_max: cfg.k_max.max(k), ..*cfg };
    let (cands, complete) = candidate_geodesics(space, r, &cfg)?;
    let verdicts: Vec<(Witness, CheckOutcome)> = cands
        .into_par_iter()
        .map(|w| {
            let o = one_over_k_outcome(&w, k, &cfg.grid)?;
            Ok((w, o))
        })
        .collect::<Result<_>>()?;
    let mut accepted = Vec::new();
    let mut undecided = Vec::new();
    for (w, outcome) in verdicts {
        match outcome {
            CheckOutcome::Holds { .. } => accepted.push((w, false)),
            CheckOutcome::Inconclusive { margin, .. } => undecided.push(UndecidedEntry {
                length: w.curve.length(),
                witness: w.label,
                reason: format!("1/{k} check inconclusive at the finest grid (deficit {margin:.3e})"),
            }),
            CheckOutcome::Violated { .. } => {}
        }
    }
    let accepted = resolve_all(accepted, &cfg)?
        .into_iter()
        .map(|(w, _)| {
            let open = matches!(w.opind, Some(IndexResult::Found(o)) if o <= k);
            (w, open)
        })
        .collect();
    Ok(assemble(space, Some(k), r, accepted, undecided, complete, false))
}

/// Lengths of openly 1/k geodesics in (0, R]. Empty for k = 2.
pub fn spectrum_open_1_over_k(space: &Arc<LengthSpace>, k: usize, r: Option<f64>, cfg: &SpectrumConfig) -> Result<Spectrum> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be ≥ 2, got {k}")));
    }
    let r = r.unwrap_or_else(|| default_radius(space, k, cfg));
    if k == 2 {
        return Ok(assemble(space, Some(2), r, Vec::new(), Vec::new(), true, true));
    }
    let cfg = SpectrumConfig { k_max: cfg.k_max.max(k), ..*cfg };
    let (cands, complete) = candidate_geodesics(space, r, &cfg)?;
    let verdicts: Vec<(Witness, OpenOutcome)> = cands
        .into_par_iter()
        .map(|w| {
            let outcome = match (w.source, w.opind) {
                (IndexSource::ClosedForm, Some(IndexResult::Found(o))) if o <= k => OpenOutcome::Open,
                (IndexSource::ClosedForm, Some(_)) => OpenOutcome::NotOpen,
                _ => w.curve.open_check(k, &cfg.grid)?,
            };
            Ok((w, outcome))
        })
        .collect::<Result<_>>()?;
    let mut accepted = Vec::new();
    let mut undecided = Vec::new();
    for (w, outcome) in verdicts {
        match outcome {
            OpenOutcome::Open => accepted.push((w, true)),
            OpenOutcome::Inconclusive => undecided.push(UndecidedEntry {
                length: w.curve.length(),
                witness: w.label,
                reason: format!("openly 1/{k} check inconclusive at the finest grid"),
            }),
            OpenOutcome::NotOpen => {}
        }
    }
    let accepted = resolve_all(accepted, &cfg)?;
    Ok(assemble(space, Some(k), r, accepted, undecided, complete, true))
}

/// Shortest non-backtracking closed walk of a metric graph, with a witness walk.
pub fn graph_systole(g: &MetricGraph) -> Result<(f64, Vec<Step>)> {
    let mut best: Option<(f64, Vec<Step>)> = None;
    for (e, edge) in g.edges().iter().enumerate() {
        let cand = if edge.a == edge.b {
            Some((edge.len, vec![(e, true)]))
        } else {
            shortest_path_avoiding(g, edge.b, edge.a, e).map(|(d, mut path)| {
                path.insert(0, (e, true));
                (edge.len + d, path)
            })
        };
        if let Some((l, w)) = cand {
            if best.as_ref().map_or(true, |(b, _)| l < *b) {
                best = Some((l, w));
            }
        }
    }
    best.ok_or(Error::SystoleUndefined)
}

pub fn systole(space: &Arc<LengthSpace>) -> Result<(f64, ClosedCurve)> {
    let g = space.as_graph().ok_or(Error::Unsupported { variant: "non-graph", op: "systole" })?;
    let (l, walk) = graph_systole(g)?;
    Ok((l, ClosedCurve::graph_walk(space.clone(), &walk)?))
}

#[derive(PartialEq)]
struct Item(f64, usize);
impl Eq for Item {}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then_with(|| self.1.cmp(&o.1))
    }
}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn shortest_path_avoiding(g: &MetricGraph, from: usize, to: usize, skip: usize) -> Option<(f64, Vec<Step>)> {
    let n = g.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<(usize, Step)>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[from] = 0.0;
    heap.push(Item(0.0, from));
    while let Some(Item(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(e, fwd) in g.incident(v) {
            if e == skip {
                continue;
            }
            let w = step_ends(g, (e, fwd)).1;
            let nd = d + g.edge(e).len;
            if nd < dist[w] {
                dist[w] = nd;
                pred[w] = Some((v, (e, fwd)));
                heap.push(Item(nd, w));
            }
        }
    }
    if !dist[to].is_finite() {
        return None;
    }
    let mut path = Vec::new();
    let mut v = to;
    while let Some((u, s)) = pred[v] {
        path.push(s);
        v = u;
    }
    path.reverse();
    Some((dist[to], path))
}

/// Space-level minimizing index with a flag telling whether it is only an
/// upper bound (heuristic enumeration).
#[derive(Clone, Debug, Serialize)]
pub struct SpaceIndex {
    pub minind: IndexResult,
    pub upper_bound_only: bool,
    #[serde(skip)]
    pub witness: Option<ClosedCurve>,
    pub witness_length: Option<f64>,
}

/// Smallest k ≤ k_max such that some closed geodesic is 1/k. A 1/k geodesic
/// has length at most k·diameter, so each k only needs candidates up to that length.
pub fn space_minind(space: &Arc<LengthSpace>, cfg: &SpectrumConfig) -> Result<SpaceIndex> {
    let diam = space.diameter(cfg.density);
    let bound = |k: usize| {
        let r = k as f64 * diam;
        r + space.length_tolerance(r)
    };
    let none = SpaceIndex { minind: IndexResult::Exceeds, upper_bound_only: false, witness: None, witness_length: None };
    if !(diam > 0.0) || cfg.k_max < 2 {
        return Ok(none);
    }
    let (mut cands, complete) = candidate_geodesics(space, bound(cfg.k_max), cfg)?;
    cands.sort_by(|a, b| a.curve.length().total_cmp(&b.curve.length()));
    let mut undecided: Option<usize> = None;
    for k in 2..=cfg.k_max {
        let eligible: Vec<&Witness> = cands.iter().filter(|w| w.curve.length() <= bound(k)).collect();
        let outcomes: Vec<CheckOutcome> = eligible.par_iter().map(|w| one_over_k_outcome(w, k, &cfg.grid)).collect::<Result<_>>()?;
        if let Some(i) = outcomes.iter().position(|o| o.holds()) {
            let minind = match undecided {
                Some(u) => IndexResult::Undecided(u),
                None => IndexResult::Found(k),
            };
            let w = eligible[i];
            return Ok(SpaceIndex { minind, upper_bound_only: !complete, witness: Some(w.curve.clone()), witness_length: Some(w.curve.length()) });
        }
        if undecided.is_none() && outcomes.iter().any(|o| matches!(o, CheckOutcome::Inconclusive { .. })) {
            undecided = Some(k);
        }
    }
    Ok(SpaceIndex { minind: undecided.map_or(IndexResult::Exceeds, IndexResult::Undecided), upper_bound_only: !complete, ..none })
}

#[derive(Clone, Debug, Serialize)]
pub struct MinLengthBounds {
    pub k: usize,
    /// Shortest closed geodesic found.
    pub upper: f64,
    pub diameter: f64,
    /// Whether `upper ≤ k · diameter`.
    pub upper_within_k_diameter: bool,
    /// min{k · injrad, min L_{1/k}}, when the injectivity radius is known.
    pub lower: Option<f64>,
    pub injrad: Option<f64>,
}

/// Bounds on the length of the shortest closed geodesic in terms of the
/// space's minimizing index.
pub fn min_length_bounds(space: &Arc<LengthSpace>, cfg: &SpectrumConfig) -> Result<MinLengthBounds> {
    let idx = space_minind(space, cfg)?;
    let k = idx
        .minind
        .found()
        .ok_or_else(|| Error::InvalidArgument(format!("space minimizing index is {:?}; bounds need a found index", idx.minind)))?;
    let diameter = space.diameter(cfg.density);
    let r = k as f64 * diameter + space.length_tolerance(k as f64 * diameter);
    let (cands, _) = candidate_geodesics(space, r, cfg)?;
    let upper = cands.iter().map(|w| w.curve.length()).min_by(f64::total_cmp).ok_or(Error::EmptySet("min_length_bounds"))?;
    let injrad = space.injrad();
    let lower = match injrad {
        Some(i) => {
            let lk = spectrum_1_over_k(space, k, Some(r), cfg)?;
            let lmin = lk.entries.first().map_or(f64::INFINITY, |e| e.length);
            Some((k as f64 * i).min(lmin))
        }
        None => None,
    };
    Ok(MinLengthBounds {
        k,
        upper,
        diameter,
        upper_within_k_diameter: upper <= k as f64 * diameter + space.length_tolerance(upper),
        lower,
        injrad,
    })
}
