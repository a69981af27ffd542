//! Seeded, reproducible property audits.
//!
//! Every audit is a pure function of its inputs and the seed: check `i`
//! draws from ChaCha stream `i`, checks may run on any number of workers, and
//! outcomes are collected in check order, so the serialized report is
//! byte-identical regardless of scheduling.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::scalar::Scalar;
use crate::space::{check_rng, MetricSpace};

mod construction;

pub use construction::*;

/// Largest number of violation records kept in one report.
pub const MAX_RECORDED_VIOLATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditContext {
    pub seed: u64,
    pub workers: usize,
}

impl AuditContext {
    pub fn new(seed: u64) -> Self {
        AuditContext { seed, workers: 1 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    /// Evaluates `n` independent checks and returns their results in check order.
    pub(crate) fn map<T, F>(&self, n: u64, check: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, &mut ChaCha8Rng) -> T + Sync + Send,
    {
        let seed = self.seed;
        let one = |i: u64| {
            let mut rng = check_rng(seed, i);
            check(i, &mut rng)
        };
        if self.workers <= 1 {
            (0..n).map(one).collect()
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(self.workers)
                .build()
                .expect("thread pool")
                .install(|| (0..n).into_par_iter().map(one).collect())
        }
    }

    pub(crate) fn run<F>(&self, n: u64, check: F) -> Vec<Vec<Violation>>
    where
        F: Fn(u64, &mut ChaCha8Rng) -> Vec<Violation> + Sync + Send,
    {
        self.map(n, check)
    }
}

/// One failed check, with everything needed to replay it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub check: u64,
    pub rule: String,
    pub points: Vec<String>,
    pub values: BTreeMap<String, Scalar>,
}

impl Violation {
    pub fn new(check: u64, rule: impl Into<String>) -> Self {
        Violation {
            check,
            rule: rule.into(),
            points: Vec::new(),
            values: BTreeMap::new(),
        }
    }

    pub fn point(mut self, p: impl std::fmt::Display) -> Self {
        self.points.push(p.to_string());
        self
    }

    pub fn value(mut self, name: impl Into<String>, v: Scalar) -> Self {
        self.values.insert(name.into(), v);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub audit: String,
    pub space: String,
    pub seed: u64,
    /// Resolved run configuration, filled in by the caller.
    pub config: BTreeMap<String, String>,
    pub samples: BTreeMap<String, u64>,
    pub attempted: u64,
    pub passed: u64,
    pub violations: Vec<Violation>,
    pub summary: BTreeMap<String, Value>,
}

impl AuditReport {
    pub(crate) fn new(audit: &str, space: String, seed: u64) -> Self {
        AuditReport {
            audit: audit.to_string(),
            space,
            seed,
            config: BTreeMap::new(),
            samples: BTreeMap::new(),
            attempted: 0,
            passed: 0,
            violations: Vec::new(),
            summary: BTreeMap::new(),
        }
    }

    /// Folds per-check outcomes into the counters and violation list.
    pub(crate) fn absorb(&mut self, outcomes: Vec<Vec<Violation>>) {
        let mut total = 0u64;
        for found in outcomes {
            self.attempted += 1;
            if found.is_empty() {
                self.passed += 1;
            }
            for v in found {
                total += 1;
                if self.violations.len() < MAX_RECORDED_VIOLATIONS {
                    self.violations.push(v);
                }
            }
        }
        let prior = self
            .summary
            .get("violations_total")
            .and_then(Value::as_u64)
            .unwrap_or(0);
        self.summary
            .insert("violations_total".into(), Value::from(prior + total));
    }

    pub(crate) fn sample(mut self, name: &str, n: u64) -> Self {
        self.samples.insert(name.into(), n);
        self
    }

    pub(crate) fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.into(), value.into());
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.passed == self.attempted
    }

    pub fn with_config(mut self, config: BTreeMap<String, String>) -> Self {
        self.config = config;
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Where the triples of a three-point audit come from.
#[derive(Debug, Clone)]
pub enum Triples<P> {
    /// `n` triples drawn from the space's sampler.
    Sampled(u64),
    /// Every ordered triple of the given points.
    All(Vec<P>),
}

impl<P: Clone> Triples<P> {
    fn count(&self) -> u64 {
        match self {
            Triples::Sampled(n) => *n,
            Triples::All(points) => (points.len() as u64).pow(3),
        }
    }

    fn get<S: MetricSpace<Point = P>>(&self, space: &S, i: u64, rng: &mut ChaCha8Rng) -> [P; 3] {
        match self {
            Triples::Sampled(_) => [space.sample(rng), space.sample(rng), space.sample(rng)],
            Triples::All(points) => {
                let n = points.len() as u64;
                let (a, b, c) = (i / (n * n), (i / n) % n, i % n);
                [
                    points[a as usize].clone(),
                    points[b as usize].clone(),
                    points[c as usize].clone(),
                ]
            }
        }
    }
}

fn dist_or_violation<S: MetricSpace>(
    space: &S,
    check: u64,
    p: &S::Point,
    q: &S::Point,
    out: &mut Vec<Violation>,
) -> Option<Scalar> {
    match space.distance(p, q) {
        Ok(d) => Some(d),
        Err(e) => {
            out.push(Violation::new(check, format!("distance failed: {e}")).point(p).point(q));
            None
        }
    }
}

/// Identity of indiscernibles, nonnegativity, symmetry and the triangle
/// inequality on each triple, all compared exactly.
pub fn audit_metric<S: MetricSpace>(space: &S, triples: Triples<S::Point>, ctx: &AuditContext) -> AuditReport {
    let n = triples.count();
    let outcomes = ctx.run(n, |i, rng| {
        let [x, y, z] = triples.get(space, i, rng);
        let mut out = Vec::new();
        let (Some(xy), Some(yz), Some(xz), Some(yx), Some(xx)) = (
            dist_or_violation(space, i, &x, &y, &mut out),
            dist_or_violation(space, i, &y, &z, &mut out),
            dist_or_violation(space, i, &x, &z, &mut out),
            dist_or_violation(space, i, &y, &x, &mut out),
            dist_or_violation(space, i, &x, &x, &mut out),
        ) else {
            return out;
        };
        if !xx.is_zero() {
            out.push(Violation::new(i, "d(x,x) = 0").point(&x).value("d(x,x)", xx));
        }
        if xy.is_negative() {
            out.push(Violation::new(i, "d(x,y) >= 0").point(&x).point(&y).value("d(x,y)", xy.clone()));
        }
        if xy.is_zero() != (x == y) {
            out.push(
                Violation::new(i, "d(x,y) = 0 iff x = y")
                    .point(&x)
                    .point(&y)
                    .value("d(x,y)", xy.clone()),
            );
        }
        if xy != yx {
            out.push(
                Violation::new(i, "d(x,y) = d(y,x)")
                    .point(&x)
                    .point(&y)
                    .value("d(x,y)", xy.clone())
                    .value("d(y,x)", yx),
            );
        }
        if xz > &xy + &yz {
            out.push(
                Violation::new(i, "d(x,z) <= d(x,y) + d(y,z)")
                    .point(&x)
                    .point(&y)
                    .point(&z)
                    .value("d(x,y)", xy)
                    .value("d(y,z)", yz)
                    .value("d(x,z)", xz),
            );
        }
        out
    });
    let mut report = AuditReport::new("metric", space.describe(), ctx.seed).sample("triples", n);
    report.absorb(outcomes);
    report
}

/// The strong triangle inequality `d(x,z) <= max(d(x,y), d(y,z))`.
pub fn audit_ultrametric<S: MetricSpace>(
    space: &S,
    triples: Triples<S::Point>,
    ctx: &AuditContext,
) -> AuditReport {
    let n = triples.count();
    let outcomes = ctx.run(n, |i, rng| {
        let [x, y, z] = triples.get(space, i, rng);
        let mut out = Vec::new();
        let (Some(xy), Some(yz), Some(xz)) = (
            dist_or_violation(space, i, &x, &y, &mut out),
            dist_or_violation(space, i, &y, &z, &mut out),
            dist_or_violation(space, i, &x, &z, &mut out),
        ) else {
            return out;
        };
        if xz > std::cmp::max(xy.clone(), yz.clone()) {
            out.push(
                Violation::new(i, "d(x,z) <= max(d(x,y), d(y,z))")
                    .point(&x)
                    .point(&y)
                    .point(&z)
                    .value("d(x,y)", xy)
                    .value("d(y,z)", yz)
                    .value("d(x,z)", xz),
            );
        }
        out
    });
    let mut report = AuditReport::new("ultrametric", space.describe(), ctx.seed).sample("triples", n);
    report.absorb(outcomes);
    report
}

/// Distinct pairwise distances of sampled families. For ultrametric spaces a
/// family of `n` points has at most `n - 1` distinct nonzero distances, and
/// that bound is asserted; other spaces are only reported.
pub fn audit_distinct_distances<S: MetricSpace>(
    space: &S,
    family_sizes: RangeInclusive<usize>,
    families: u64,
    ctx: &AuditContext,
) -> AuditReport
where
    S::Point: Ord,
{
    let assert_bound = space.is_ultrametric();
    let lo = (*family_sizes.start()).max(2);
    let hi = (*family_sizes.end()).max(lo);
    let counts: Vec<(usize, usize, Vec<Violation>)> = ctx.map(families, |i, rng| {
        let size = rng.gen_range(lo..=hi);
        let points: Vec<S::Point> = (0..size).map(|_| space.sample(rng)).collect();
        let mut distinct = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for (j, p) in points.iter().enumerate() {
            for q in &points[j..] {
                if let Some(d) = dist_or_violation(space, i, p, q, &mut out) {
                    distinct.insert(d);
                }
            }
        }
        let nonzero = distinct.iter().filter(|d| !d.is_zero()).count();
        if assert_bound && nonzero > size - 1 {
            out.push(
                Violation::new(i, "distinct nonzero distances <= n - 1")
                    .value("n", Scalar::from_int(size as i64))
                    .value("distinct_nonzero", Scalar::from_int(nonzero as i64)),
            );
        }
        (size, distinct.len(), out)
    });

    let mut report = AuditReport::new(
        if assert_bound { "distinct-distances" } else { "distinct-distances (report only)" },
        space.describe(),
        ctx.seed,
    )
    .sample("families", families)
    .sample("max_family_size", hi as u64);
    if assert_bound {
        report.absorb(counts.iter().map(|(_, _, v)| v.clone()).collect());
    } else {
        let errors: Vec<Violation> = counts.iter().flat_map(|(_, _, v)| v.clone()).collect();
        if !errors.is_empty() {
            report.absorb(vec![errors]);
        }
    }
    report.note(
        "family_sizes",
        counts.iter().map(|(n, _, _)| *n as u64).collect::<Vec<_>>(),
    );
    report.note(
        "distinct_distances",
        counts.iter().map(|(_, d, _)| *d as u64).collect::<Vec<_>>(),
    );
    report.note("bound_asserted", assert_bound);
    report
}

/// `d_Y(f(p), f(q)) <= d_X(p, q)` on sampled pairs.
pub fn audit_lipschitz<D, C, F>(
    map_name: &str,
    domain: &D,
    codomain: &C,
    map: F,
    n_pairs: u64,
    ctx: &AuditContext,
) -> AuditReport
where
    D: MetricSpace,
    C: MetricSpace,
    F: Fn(&D::Point) -> C::Point + Sync + Send,
{
    let outcomes = ctx.run(n_pairs, |i, rng| {
        let p = domain.sample(rng);
        let q = domain.sample(rng);
        let (fp, fq) = (map(&p), map(&q));
        let mut out = Vec::new();
        let (Some(dx), Some(dy)) = (
            dist_or_violation(domain, i, &p, &q, &mut out),
            codomain.distance(&fp, &fq).ok(),
        ) else {
            if out.is_empty() {
                out.push(Violation::new(i, "codomain distance failed").point(&fp).point(&fq));
            }
            return out;
        };
        if dy > dx {
            out.push(
                Violation::new(i, "d(f(p), f(q)) <= d(p, q)")
                    .point(&p)
                    .point(&q)
                    .value("d(p,q)", dx)
                    .value("d(f(p),f(q))", dy),
            );
        }
        out
    });
    let mut report = AuditReport::new(
        "lipschitz",
        format!("{map_name}: {} -> {}", domain.describe(), codomain.describe()),
        ctx.seed,
    )
    .sample("pairs", n_pairs);
    report.absorb(outcomes);
    report
}

/// Components of the relation `d(p, q) <= eps` on a finite sample. When
/// `expected` is given, the component count is checked against it.
pub fn audit_chain<S: MetricSpace>(
    space: &S,
    sample_name: &str,
    sample: &[S::Point],
    eps_chain: &Scalar,
    expected: Option<usize>,
    ctx: &AuditContext,
) -> AuditReport {
    let n = sample.len();
    let mut report = AuditReport::new("chain", space.describe(), ctx.seed).sample("points", n as u64);
    report.note("sample", sample_name);
    report.note("eps_chain", eps_chain.to_string());
    if n == 0 {
        report.absorb(vec![vec![Violation::new(0, "sample is nonempty")]]);
        return report;
    }
    let rows: Vec<(Vec<usize>, Vec<Violation>)> = ctx.map(n as u64, |i, _| {
        let i = i as usize;
        let mut edges = Vec::new();
        let mut errors = Vec::new();
        for j in i + 1..n {
            match space.distance(&sample[i], &sample[j]) {
                Ok(d) if d <= *eps_chain => edges.push(j),
                Ok(_) => {}
                Err(e) => errors.push(
                    Violation::new(i as u64, format!("distance failed: {e}"))
                        .point(&sample[i])
                        .point(&sample[j]),
                ),
            }
        }
        (edges, errors)
    });
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut errors = Vec::new();
    for (i, (edges, errs)) in rows.into_iter().enumerate() {
        for j in edges {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        errors.extend(errs);
    }
    let components = (0..n).filter(|&i| find(&mut parent, i) == i).count();
    report.note("components", components as u64);
    let mut check = errors;
    if let Some(want) = expected {
        report.note("expected_components", want as u64);
        if components != want {
            check.push(
                Violation::new(0, "component count matches expectation")
                    .value("components", Scalar::from_int(components as i64))
                    .value("expected", Scalar::from_int(want as i64)),
            );
        }
        report.absorb(vec![check]);
    } else if !check.is_empty() {
        report.absorb(vec![check]);
    }
    report
}

/// A sequence `x_0, x_1, ...` with a declared limit, for completeness probes.
pub struct CauchySequence<'a, P> {
    pub name: String,
    pub term: Box<dyn Fn(u32) -> P + Sync + Send + 'a>,
    pub limit: P,
    /// When set, also checks the vortex localization used in the
    /// completeness argument for a cobweb with this thread length.
    pub localize_eps: Option<Scalar>,
}

/// Checks `d(x_k, limit) <= 2^-k` for `k = 0..=depth`, exactly.
pub fn audit_cauchy<S, F>(
    space: &S,
    seq: &CauchySequence<'_, S::Point>,
    depth: u32,
    nearest_vortex: F,
    ctx: &AuditContext,
) -> AuditReport
where
    S: MetricSpace,
    F: Fn(&S::Point) -> Option<(S::Point, Scalar)> + Sync,
{
    let outcomes = ctx.run(u64::from(depth) + 1, |k, _| {
        let x = (seq.term)(k as u32);
        let mut out = Vec::new();
        if let Some(d) = dist_or_violation(space, k, &x, &seq.limit, &mut out) {
            let bound = Scalar::pow2_neg(k as u32);
            if d > bound {
                out.push(
                    Violation::new(k, "d(x_k, limit) <= 2^-k")
                        .point(&x)
                        .point(&seq.limit)
                        .value("d", d)
                        .value("bound", bound),
                );
            }
        }
        out
    });
    let mut report = AuditReport::new("cauchy", space.describe(), ctx.seed).sample("depth", u64::from(depth));
    report.note("sequence", seq.name.clone());
    report.note("limit", seq.limit.to_string());
    report.absorb(outcomes);

    if let Some(eps) = &seq.localize_eps {
        // first index from which every later term is within eps/4 of it
        let quarter = eps * Scalar::ratio(1, 4);
        let start = (0..=depth).find(|&k| Scalar::pow2_neg(k) * Scalar::from_int(2) <= quarter);
        let mut found = Vec::new();
        match start.map(|k| (k, (seq.term)(k))) {
            None => found.push(Violation::new(0, "sequence reaches the eps/4 regime within depth")),
            Some((k, anchor)) => match nearest_vortex(&anchor) {
                None => found.push(Violation::new(u64::from(k), "anchor has a nearest vortex").point(&anchor)),
                Some((vortex, d)) => {
                    if d > eps * Scalar::ratio(1, 2) {
                        found.push(
                            Violation::new(u64::from(k), "d(x_k, vortex) <= eps/2")
                                .point(&anchor)
                                .point(&vortex)
                                .value("d", d),
                        );
                    }
                    let cap = eps * Scalar::ratio(3, 4);
                    for n in k..=depth {
                        let x = (seq.term)(n);
                        match space.distance(&x, &vortex) {
                            Ok(d) if d <= cap => {}
                            Ok(d) => found.push(
                                Violation::new(u64::from(n), "d(x_n, vortex) <= 3 eps/4")
                                    .point(&x)
                                    .point(&vortex)
                                    .value("d", d),
                            ),
                            Err(e) => found.push(Violation::new(u64::from(n), format!("distance failed: {e}"))),
                        }
                    }
                    report.note("localizing_vortex", vortex.to_string());
                    report.note("localization_start", u64::from(k));
                }
            },
        }
        report.absorb(vec![found]);
    }
    report
}
