//! The acceptance battery: eleven criteria, each a bundle of audits with a
//! pass condition and, where one is set, a wall-clock budget.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::audits::{self, AuditContext, AuditReport, Triples};
use crate::base::{BasePoint, BaseSpace};
use crate::cobweb::{nearest_vortex, CobwebPoint, CobwebSpace};
use crate::extremal::ExtremalSpace;
use crate::hedgehog::HedgehogSpace;
use crate::invlimit::Tower;
use crate::runner::{chain_eps, cobweb_sequence, hedgehog_sequence, skeleton_fibers, zcon_sequence};
use crate::scalar::Scalar;
use crate::space::Gauged;
use crate::zcon::{default_eps, ZSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Criterion {
    pub id: &'static str,
    pub title: &'static str,
    pub budget: Option<Duration>,
}

const fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

pub const CRITERIA: [Criterion; 11] = [
    Criterion { id: "C1", title: "cobweb closed form equals the graph oracle", budget: secs(5) },
    Criterion { id: "C2", title: "metric axioms on seven spaces", budget: secs(60) },
    Criterion { id: "C3", title: "Cantor ultrametric certificate", budget: None },
    Criterion { id: "C4", title: "Z-construction projection identities", budget: secs(30) },
    Criterion { id: "C5", title: "star points are discrete", budget: None },
    Criterion { id: "C6", title: "inverse-limit tower", budget: secs(60) },
    Criterion { id: "C7", title: "chain connectedness proxy", budget: None },
    Criterion { id: "C8", title: "extremal space", budget: secs(30) },
    Criterion { id: "C9", title: "completeness probes", budget: None },
    Criterion { id: "C10", title: "negative controls", budget: None },
    Criterion { id: "C11", title: "determinism across runs and workers", budget: None },
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub workers: usize,
    /// Adds a corrupted distance table to the metric-axiom criterion.
    pub inject_corruption: bool,
}

impl SuiteOptions {
    pub fn new(seed: u64) -> Self {
        SuiteOptions {
            seed,
            workers: 1,
            inject_corruption: false,
        }
    }

    fn ctx(&self) -> AuditContext {
        AuditContext::new(self.seed).with_workers(self.workers)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
    #[serde(skip)]
    pub budget: Option<Duration>,
    pub reports: Vec<AuditReport>,
}

impl CriterionOutcome {
    /// One summary line, e.g. `C1 PASS cobweb closed form ... (0.4 s, budget 5 s)`.
    pub fn line(&self) -> String {
        let budget = match self.budget {
            Some(b) => format!(", budget {} s", b.as_secs()),
            None => String::new(),
        };
        format!(
            "{:<3} {} {}: {} ({:.2} s{budget})",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail,
            self.elapsed.as_secs_f64(),
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSummary {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionOutcome>,
}

impl SuiteSummary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }
}

pub fn criterion(id: &str) -> Option<&'static Criterion> {
    CRITERIA.iter().find(|c| c.id.eq_ignore_ascii_case(id))
}

fn all_clean(reports: &[AuditReport]) -> bool {
    reports.iter().all(AuditReport::is_clean)
}

fn violation_detail(reports: &[AuditReport]) -> String {
    let total: u64 = reports.iter().map(|r| r.attempted).sum();
    let bad: Vec<String> = reports
        .iter()
        .filter(|r| !r.is_clean())
        .map(|r| format!("{} on {}: {} violations", r.audit, r.space, r.attempted - r.passed))
        .collect();
    if bad.is_empty() {
        format!("{} audits, {total} checks, no violations", reports.len())
    } else {
        bad.join("; ")
    }
}

fn corrupted_table() -> BaseSpace {
    let s = Scalar::from_int;
    BaseSpace::discrete_unchecked(vec![
        vec![s(0), s(1), s(3)],
        vec![s(1), s(0), s(1)],
        vec![s(3), s(1), s(0)],
    ])
    .expect("square table")
}

/// Metric-axiom audit over every triple of the corrupted table.
pub fn corrupted_table_report(ctx: &AuditContext) -> AuditReport {
    let space = corrupted_table();
    let points = (0..3).map(BasePoint::Index).collect();
    audits::audit_metric(&space, Triples::All(points), ctx)
}

fn unit_zspace() -> ZSpace<BaseSpace> {
    ZSpace::new(BaseSpace::unit_interval(), default_eps()).expect("eps above one")
}

fn tower() -> Tower {
    Tower::new(BaseSpace::unit_interval(), 3, default_eps()).expect("valid tower")
}

/// Runs the audits of one criterion and judges them.
fn evaluate(id: &str, opts: &SuiteOptions) -> (bool, String, Vec<AuditReport>) {
    let ctx = opts.ctx();
    let two = Scalar::from_int(2);
    match id {
        "C1" => {
            let r = audits::audit_cobweb_oracle(500, &ctx);
            let avoided = r.summary["routes_avoiding_shared_vortex"].as_u64().unwrap_or(0);
            let ok = r.is_clean() && avoided > 0;
            let detail = format!("{}; {avoided} winning routes avoid a shared vortex", violation_detail(std::slice::from_ref(&r)));
            (ok, detail, vec![r])
        }
        "C2" => {
            let n = 10_000;
            let hedgehog = HedgehogSpace::new(8, two.clone()).expect("valid hedgehog");
            let cobweb = CobwebSpace::new((0..6u32).collect(), two).expect("valid cobweb");
            let mut reports = vec![
                audits::audit_metric(&BaseSpace::unit_interval(), Triples::Sampled(n), &ctx),
                audits::audit_metric(&BaseSpace::cantor(), Triples::Sampled(n), &ctx),
                audits::audit_metric(&hedgehog, Triples::Sampled(n), &ctx),
                audits::audit_metric(&cobweb, Triples::Sampled(n), &ctx),
                audits::audit_metric(&unit_zspace(), Triples::Sampled(n), &ctx),
                audits::audit_metric(&ExtremalSpace::default(), Triples::Sampled(n), &ctx),
                audits::audit_metric(&tower(), Triples::Sampled(n), &ctx),
            ];
            if opts.inject_corruption {
                reports.push(corrupted_table_report(&ctx));
            }
            (all_clean(&reports), violation_detail(&reports), reports)
        }
        "C3" => {
            let small = BaseSpace::Cantor { universe: 6 };
            let subsets: Vec<BasePoint> = (0u32..64)
                .map(|mask| BasePoint::set((1..=6).filter(|i| mask & (1 << (i - 1)) != 0)))
                .collect();
            let reports = vec![
                audits::audit_ultrametric(&small, Triples::All(subsets), &ctx),
                audits::audit_distinct_distances(&BaseSpace::cantor(), 2..=64, 200, &ctx),
            ];
            (all_clean(&reports), violation_detail(&reports), reports)
        }
        "C4" => {
            let z = unit_zspace();
            let codomain = Gauged(z.base());
            let reports = vec![
                audits::audit_lipschitz("f", &z, &codomain, |p| z.f_project(p).clone(), 10_000, &ctx),
                audits::audit_fiber_gap(&z, 100, 100, &ctx),
                audits::audit_ball_image(&z, 100, 32, &ctx),
            ];
            (all_clean(&reports), violation_detail(&reports), reports)
        }
        "C5" => {
            let reports = vec![audits::audit_star_discreteness(&unit_zspace(), 50, &ctx)];
            (all_clean(&reports), violation_detail(&reports), reports)
        }
        "C6" => {
            let t = tower();
            let reports = vec![
                audits::audit_threads(&t, 1000, &ctx),
                audits::audit_enclosures(&t, 1000, &ctx),
                audits::audit_economical(&t, 100, 64, &ctx),
            ];
            (all_clean(&reports), violation_detail(&reports), reports)
        }
        "C7" => {
            let z = unit_zspace();
            let fibers = skeleton_fibers();
            let skeleton = audits::grid_skeleton(&z, &fibers, &chain_eps());
            let stars: Vec<_> = fibers.iter().map(|a| z.star(a.clone())).collect();
            let reports = vec![
                audits::audit_chain(&z, "grid skeleton, step 1/64, spacing 1/8", &skeleton, &chain_eps(), Some(1), &ctx),
                audits::audit_chain(&z, "star points, step 1/64", &stars, &chain_eps(), Some(stars.len()), &ctx),
            ];
            let detail = format!(
                "skeleton of {} points: {} component(s); {} stars: {} components",
                skeleton.len(),
                reports[0].summary["components"],
                stars.len(),
                reports[1].summary["components"]
            );
            (all_clean(&reports), detail, reports)
        }
        "C8" => {
            let e = ExtremalSpace::default();
            let unit = BaseSpace::unit_interval();
            let reports = vec![
                audits::audit_extrema(&e, 100, 24, &ctx),
                audits::audit_extremal_ball_image(&e, 100, 16, &ctx),
                audits::audit_lipschitz("value", &e, &unit, |p| BasePoint::Rational(e.e_value(p).clone()), 10_000, &ctx),
            ];
            (all_clean(&reports), violation_detail(&reports), reports)
        }
        "C9" => {
            let h = HedgehogSpace::new(8, two.clone()).expect("valid hedgehog");
            let c = CobwebSpace::new((0..6u32).collect(), two.clone()).expect("valid cobweb");
            let z = unit_zspace();
            let reports = vec![
                audits::audit_cauchy(&h, &hedgehog_sequence(&h), 20, |_| None, &ctx),
                audits::audit_cauchy(
                    &c,
                    &cobweb_sequence(&c),
                    20,
                    |p| {
                        let (v, d) = nearest_vortex(&two, p);
                        Some((CobwebPoint::Vortex(v), d))
                    },
                    &ctx,
                ),
                audits::audit_cauchy(&z, &zcon_sequence(&z, BasePoint::rational(1, 2)), 20, |_| None, &ctx),
            ];
            (all_clean(&reports), violation_detail(&reports), reports)
        }
        "C10" => {
            let corrupted = corrupted_table_report(&ctx);
            let ultra = audits::audit_ultrametric(&BaseSpace::unit_interval(), Triples::Sampled(10_000), &ctx);
            // the injected run of C2 fails exactly when this report has violations
            let ok = !corrupted.violations.is_empty() && !ultra.violations.is_empty();
            let detail = format!(
                "corrupted table: {} violations; unit-interval ultrametric: {} violations",
                corrupted.violations.len(),
                ultra.summary["violations_total"]
            );
            (ok, detail, vec![corrupted, ultra])
        }
        _ => (false, format!("unknown criterion {id}"), Vec::new()),
    }
}

/// Runs one criterion other than the determinism check.
pub fn run_criterion(id: &str, opts: &SuiteOptions) -> Option<CriterionOutcome> {
    let c = criterion(id)?;
    if c.id == "C11" {
        return Some(determinism(opts, &[]));
    }
    let start = Instant::now();
    let (passed, detail, reports) = evaluate(c.id, opts);
    let elapsed = start.elapsed();
    let over = c.budget.is_some_and(|b| elapsed > b);
    Some(CriterionOutcome {
        id: c.id,
        title: c.title,
        passed: passed && !over,
        detail: if over { format!("{detail}; over the runtime budget") } else { detail },
        elapsed,
        budget: c.budget,
        reports,
    })
}

/// Re-runs criteria C1 to C10 with the worker counts 1 and 4 (and the
/// caller's, when different) and compares every report byte for byte.
/// Outcomes already computed with `opts` are reused.
pub fn determinism(opts: &SuiteOptions, done: &[CriterionOutcome]) -> CriterionOutcome {
    let c = criterion("C11").expect("listed");
    let start = Instant::now();
    let mut counts = vec![1usize, 4];
    if !counts.contains(&opts.workers) {
        counts.push(opts.workers);
    }
    let mut mismatches = Vec::new();
    let mut compared = 0usize;
    for other in CRITERIA.iter().filter(|c| c.id != "C11") {
        let mut runs: Vec<Vec<String>> = Vec::new();
        if let Some(prev) = done.iter().find(|o| o.id == other.id) {
            runs.push(prev.reports.iter().map(AuditReport::to_json).collect());
        }
        for &w in &counts {
            if w == opts.workers && !runs.is_empty() {
                continue;
            }
            let o = SuiteOptions { workers: w, ..opts.clone() };
            runs.push(evaluate(other.id, &o).2.iter().map(AuditReport::to_json).collect());
        }
        if runs.len() < 2 {
            // `opts.workers` is 1 or 4 and nothing was reused: run it once more
            runs.push(evaluate(other.id, opts).2.iter().map(AuditReport::to_json).collect());
        }
        compared += runs[0].len();
        if runs.iter().any(|r| r != &runs[0]) {
            mismatches.push(other.id);
        }
    }
    let passed = mismatches.is_empty();
    CriterionOutcome {
        id: c.id,
        title: c.title,
        passed,
        detail: if passed {
            format!("{compared} reports identical across worker counts {counts:?}")
        } else {
            format!("reports differ for {}", mismatches.join(", "))
        },
        elapsed: start.elapsed(),
        budget: c.budget,
        reports: Vec::new(),
    }
}

/// Runs the selected criteria (all when `only` is empty) in order.
pub fn run_suite(opts: &SuiteOptions, only: &[&str]) -> SuiteSummary {
    let selected: Vec<&Criterion> = CRITERIA
        .iter()
        .filter(|c| only.is_empty() || only.iter().any(|o| o.eq_ignore_ascii_case(c.id)))
        .collect();
    let mut outcomes: Vec<CriterionOutcome> = Vec::new();
    for c in selected {
        let outcome = if c.id == "C11" {
            determinism(opts, &outcomes)
        } else {
            run_criterion(c.id, opts).expect("listed criterion")
        };
        outcomes.push(outcome);
    }
    SuiteSummary {
        seed: opts.seed,
        passed: outcomes.iter().all(|o| o.passed),
        criteria: outcomes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_ordered() {
        let ids: Vec<&str> = CRITERIA.iter().map(|c| c.id).collect();
        assert_eq!(ids, (1..=11).map(|i| format!("C{i}")).collect::<Vec<_>>());
        assert_eq!(criterion("c4").unwrap().id, "C4");
        assert!(criterion("C12").is_none());
    }

    #[test]
    fn cheap_criteria_pass() {
        let opts = SuiteOptions::new(0);
        for id in ["C3", "C5", "C9", "C10"] {
            let o = run_criterion(id, &opts).unwrap();
            assert!(o.passed, "{}", o.line());
        }
    }

    #[test]
    fn corruption_is_detected() {
        assert!(!corrupted_table_report(&AuditContext::new(0)).violations.is_empty());
    }
}
