//! Audits of the properties specific to each construction.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{AuditContext, AuditReport, Violation};
use crate::cobweb::{cw_canonicalize, cw_distance, cw_witness_path, oracle, path_length, CobwebPoint, CobwebSpace};
use crate::extremal::{ExtremalSpace, Extremum, Which};
use crate::invlimit::{LimitPoint, Tower};
use crate::scalar::Scalar;
use crate::space::{grid_open_unit, MetricSpace};
use crate::zcon::{Spike, ZPoint, ZSpace};

fn q(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

/// A second cobweb point: unrelated, on the same thread, or on a thread
/// sharing a vortex with `p`, with parameters pushed toward the far ends.
fn partner(space: &CobwebSpace<u32>, p: &CobwebPoint<u32>, rng: &mut ChaCha8Rng) -> CobwebPoint<u32> {
    let eps = space.eps();
    let vs = space.vortices();
    let near_end = |rng: &mut ChaCha8Rng| eps - eps * Scalar::ratio(rng.gen_range(1..=32), 64);
    match (p, rng.gen_range(0..3)) {
        (CobwebPoint::Inner { u, v, .. }, 0) => {
            let t = eps * Scalar::ratio(rng.gen_range(1..64), 64);
            cw_canonicalize(eps, *u, *v, t).expect("parameter in range")
        }
        (CobwebPoint::Inner { u, v, .. }, 1) if vs.len() > 2 => {
            let shared = if rng.gen_bool(0.5) { *u } else { *v };
            let others: Vec<u32> = vs.iter().copied().filter(|w| w != u && w != v).collect();
            let w = others[rng.gen_range(0..others.len())];
            cw_canonicalize(eps, shared, w, near_end(rng)).expect("parameter in range")
        }
        _ => space.sample(rng),
    }
}

fn shares_vortex_unused(p: &CobwebPoint<u32>, q: &CobwebPoint<u32>, route: &[CobwebPoint<u32>]) -> bool {
    let (CobwebPoint::Inner { u: a, v: b, .. }, CobwebPoint::Inner { u: c, v: d, .. }) = (p, q) else {
        return false;
    };
    let shared = [a, b].into_iter().find(|x| *x == c || *x == d);
    match shared {
        Some(s) if (a, b) != (c, d) => !route.iter().any(|x| x.vortex() == Some(s)),
        _ => false,
    }
}

/// Cross-checks the closed-form cobweb distance against shortest paths on
/// the explicit thread graph, over random cobwebs with 2 to 8 vortices, and
/// checks that the witness route realises the distance.
pub fn audit_cobweb_oracle(instances: u64, ctx: &AuditContext) -> AuditReport {
    let results = ctx.map(instances, |i, rng| {
        let n = rng.gen_range(2..=8u32);
        let eps = [q(1, 1), q(3, 2), q(2, 1)][rng.gen_range(0..3)].clone();
        let space = CobwebSpace::new((0..n).collect(), eps.clone()).expect("valid cobweb");
        let p = space.sample(rng);
        let other = partner(&space, &p, rng);
        let (p, other) = if rng.gen_bool(0.5) { (p, other) } else { (other, p) };
        check_oracle_pair(i, &space, &p, &other)
    });
    // the near-tip pair where leaving through the far ends beats the shared vortex
    let fixed = {
        let space = CobwebSpace::new(vec![0, 1, 2], q(2, 1)).expect("valid cobweb");
        let p = space.point(0, 1, q(19, 10)).expect("valid point");
        let other = space.point(0, 2, q(19, 10)).expect("valid point");
        let (mut found, avoided) = check_oracle_pair(instances, &space, &p, &other);
        let d = cw_distance(space.eps(), &p, &other);
        if d != q(11, 5) {
            found.push(
                Violation::new(instances, "near-tip distance is 11/5")
                    .point(&p)
                    .point(&other)
                    .value("d", d),
            );
        }
        if !avoided {
            found.push(Violation::new(instances, "near-tip route avoids the shared vortex"));
        }
        (found, avoided)
    };
    let avoided = results.iter().filter(|(_, a)| *a).count() as u64 + u64::from(fixed.1);
    let mut outcomes: Vec<Vec<Violation>> = results.into_iter().map(|(v, _)| v).collect();
    outcomes.push(fixed.0);
    let mut report = AuditReport::new("cobweb-oracle", "cobweb(vortices=2..8)".into(), ctx.seed)
        .sample("instances", instances + 1);
    report.absorb(outcomes);
    report.note("routes_avoiding_shared_vortex", avoided);
    report
}

fn check_oracle_pair(
    i: u64,
    space: &CobwebSpace<u32>,
    p: &CobwebPoint<u32>,
    other: &CobwebPoint<u32>,
) -> (Vec<Violation>, bool) {
    let eps = space.eps();
    let mut out = Vec::new();
    let d = cw_distance(eps, p, other);
    match oracle::shortest_path(eps, space.vortices(), p, other) {
        Ok(o) if o == d => {}
        Ok(o) => out.push(
            Violation::new(i, "closed form equals shortest path")
                .point(p)
                .point(other)
                .value("closed_form", d.clone())
                .value("shortest_path", o)
                .value("eps", eps.clone()),
        ),
        Err(e) => out.push(Violation::new(i, format!("oracle failed: {e}")).point(p).point(other)),
    }
    let route = cw_witness_path(eps, p, other);
    let ends_ok = route.first() == Some(p) && route.last() == Some(other);
    match path_length(eps, &route) {
        Ok(len) if len == d && ends_ok => {}
        Ok(len) => out.push(
            Violation::new(i, "witness route joins the points at the distance")
                .point(p)
                .point(other)
                .value("route_length", len)
                .value("d", d.clone()),
        ),
        Err(e) => out.push(Violation::new(i, format!("witness route invalid: {e}")).point(p).point(other)),
    }
    let avoided = shares_vortex_unused(p, other, &route);
    (out, avoided)
}

/// For distinct fibers `a, b`: the closest pair between `Z_a` and `Z_b` is
/// at `gauge(a, b)`, realised by the reported points, and sampled
/// cross-fiber pairs never come closer.
pub fn audit_fiber_gap<B>(z: &ZSpace<B>, pairs: u64, cross_samples: usize, ctx: &AuditContext) -> AuditReport
where
    B: MetricSpace,
    B::Point: Ord,
{
    let outcomes = ctx.run(pairs, |i, rng| {
        let a = z.base().sample(rng);
        let mut b = z.base().sample(rng);
        let mut tries = 0;
        while b == a && tries < 16 {
            b = z.base().sample(rng);
            tries += 1;
        }
        if b == a {
            return vec![Violation::new(i, "base sampler yields distinct points").point(&a)];
        }
        let mut out = Vec::new();
        let (gap, g_ab, g_ba) = match (z.fiber_min_distance(&a, &b), z.base().gauge(&a, &b), z.base().gauge(&b, &a)) {
            (Ok(gap), Ok(x), Ok(y)) => (gap, x, y),
            _ => return vec![Violation::new(i, "fiber gap computable").point(&a).point(&b)],
        };
        if gap.distance != g_ab || g_ab != g_ba {
            out.push(
                Violation::new(i, "fiber gap equals gauge(a, b)")
                    .point(&a)
                    .point(&b)
                    .value("gap", gap.distance.clone())
                    .value("gauge", g_ab),
            );
        }
        let realised = z.z_distance(&gap.from, &gap.to);
        if realised != gap.distance || z.f_project(&gap.from) != &a || z.f_project(&gap.to) != &b {
            out.push(
                Violation::new(i, "gap attained between the fibers")
                    .point(&gap.from)
                    .point(&gap.to)
                    .value("realised", realised)
                    .value("gap", gap.distance.clone()),
            );
        }
        for _ in 0..cross_samples {
            let x = z.sample_in_fiber(&a, rng);
            let u = z.sample_in_fiber(&b, rng);
            let d = z.z_distance(&x, &u);
            if d < gap.distance {
                out.push(
                    Violation::new(i, "cross-fiber distance >= gap")
                        .point(&x)
                        .point(&u)
                        .value("d", d)
                        .value("gap", gap.distance.clone()),
                );
            }
        }
        out
    });
    let mut report = AuditReport::new("fiber-gap", z.describe(), ctx.seed)
        .sample("fiber_pairs", pairs)
        .sample("cross_samples_per_pair", cross_samples as u64);
    report.absorb(outcomes);
    report
}

/// `b in f(B(a*, r))` exactly when `gauge(a, b) < r`: members come with a
/// witness inside the ball, and for non-members sampled points of `Z_b`,
/// including the nearest tip, stay at distance at least `r`. Every fifth
/// trial uses `r = gauge(a, b)` exactly.
pub fn audit_ball_image<B>(z: &ZSpace<B>, trials: u64, fiber_samples: usize, ctx: &AuditContext) -> AuditReport
where
    B: MetricSpace,
    B::Point: Ord,
{
    let outcomes = ctx.run(trials, |i, rng| {
        let a = z.base().sample(rng);
        let b = z.base().sample(rng);
        let gauge = match z.base().gauge(&a, &b) {
            Ok(g) => g,
            Err(e) => return vec![Violation::new(i, format!("gauge failed: {e}"))],
        };
        let r = if i % 5 == 0 && gauge.is_positive() {
            gauge.clone()
        } else {
            q(rng.gen_range(1..=64), 64)
        };
        let star = z.star(a.clone());
        let mut out = Vec::new();
        let image = match z.ball_image_contains(&a, &r, &b) {
            Ok(img) => img,
            Err(e) => return vec![Violation::new(i, format!("ball image failed: {e}"))],
        };
        let expected = gauge < r;
        if image.contained != expected || image.fiber_distance != gauge {
            out.push(
                Violation::new(i, "b in f(B(a*, r)) iff gauge(a, b) < r")
                    .point(&a)
                    .point(&b)
                    .value("r", r.clone())
                    .value("gauge", gauge.clone())
                    .value("fiber_distance", image.fiber_distance.clone()),
            );
        }
        match &image.witness {
            Some(w) => {
                let d = z.z_distance(&star, w);
                if z.f_project(w) != &b || d >= r {
                    out.push(
                        Violation::new(i, "witness lies in Z_b inside the ball")
                            .point(&star)
                            .point(w)
                            .value("d", d)
                            .value("r", r.clone()),
                    );
                }
            }
            None if image.contained => out.push(Violation::new(i, "member has a witness")),
            None => {
                let mut probes: Vec<ZPoint<B::Point>> =
                    (0..fiber_samples).map(|_| z.sample_in_fiber(&b, rng)).collect();
                if let Ok(tip) = z.tip(b.clone(), a.clone()) {
                    probes.push(tip);
                }
                for w in probes {
                    let d = z.z_distance(&star, &w);
                    if d < r {
                        out.push(
                            Violation::new(i, "non-member fiber stays outside the ball")
                                .point(&star)
                                .point(&w)
                                .value("d", d)
                                .value("r", r.clone()),
                        );
                    }
                }
            }
        }
        out
    });
    let mut report = AuditReport::new("ball-image", z.describe(), ctx.seed)
        .sample("trials", trials)
        .sample("fiber_samples", fiber_samples as u64);
    report.absorb(outcomes);
    report
}

/// Distinct star points sit at distance `eps`, so at truncated distance one.
pub fn audit_star_discreteness<B>(z: &ZSpace<B>, pairs: u64, ctx: &AuditContext) -> AuditReport
where
    B: MetricSpace,
    B::Point: Ord,
{
    let outcomes = ctx.run(pairs, |i, rng| {
        let a = z.base().sample(rng);
        let mut b = z.base().sample(rng);
        while b == a {
            b = z.base().sample(rng);
        }
        let (sa, sb) = (z.star(a), z.star(b));
        let d = z.z_distance(&sa, &sb);
        let t = z.z_distance_truncated(&sa, &sb);
        if &d != z.eps() || t != Scalar::one() {
            vec![Violation::new(i, "d(a*, b*) = eps and its gauge is 1")
                .point(&sa)
                .point(&sb)
                .value("d", d)
                .value("gauge", t)]
        } else {
            Vec::new()
        }
    });
    let mut report = AuditReport::new("star-discreteness", z.describe(), ctx.seed).sample("pairs", pairs);
    report.absorb(outcomes);
    report
}

/// A point of `Z_a` below the tip of its spike is at least its clearance
/// away from every point of another fiber, so fibers are open.
pub fn audit_open_fibers<B>(z: &ZSpace<B>, trials: u64, probes: usize, ctx: &AuditContext) -> AuditReport
where
    B: MetricSpace,
    B::Point: Ord,
{
    let outcomes = ctx.run(trials, |i, rng| {
        let p = z.sample(rng);
        let clearance = match z.spike_clearance(&p) {
            Ok(c) => c,
            Err(e) => return vec![Violation::new(i, format!("clearance failed: {e}")).point(&p)],
        };
        let mut out = Vec::new();
        for _ in 0..probes {
            let u = z.sample(rng);
            if z.f_project(&u) == z.f_project(&p) {
                continue;
            }
            let d = z.z_distance(&p, &u);
            if d < clearance {
                out.push(
                    Violation::new(i, "other fibers keep the clearance")
                        .point(&p)
                        .point(&u)
                        .value("d", d)
                        .value("clearance", clearance.clone()),
                );
            }
        }
        out
    });
    let mut report = AuditReport::new("open-fibers", z.describe(), ctx.seed)
        .sample("points", trials)
        .sample("probes_per_point", probes as u64);
    report.absorb(outcomes);
    report
}

/// The grid skeleton of `Z(X_1)` over `i / grid`: for each fiber, its star
/// spike and the spikes toward the grid neighbours, subdivided at
/// `spacing`, with vortices, star points and spike tips included.
pub fn grid_skeleton<B>(z: &ZSpace<B>, fibers: &[B::Point], spacing: &Scalar) -> Vec<ZPoint<B::Point>>
where
    B: MetricSpace,
    B::Point: Ord,
{
    let mut points = Vec::new();
    for (i, a) in fibers.iter().enumerate() {
        let mut spikes = vec![Spike::Star];
        if i > 0 {
            spikes.push(Spike::Toward(fibers[i - 1].clone()));
        }
        if i + 1 < fibers.len() {
            spikes.push(Spike::Toward(fibers[i + 1].clone()));
        }
        for spike in spikes {
            let len = z.spike_length(a, &spike).expect("neighbour fibers are distinct");
            let mut t = if spike == Spike::Star { Scalar::zero() } else { spacing.clone() };
            while t < len {
                points.push(z.z_make(a.clone(), spike.clone(), t.clone()).expect("t inside spike"));
                t = t + spacing;
            }
            points.push(z.z_make(a.clone(), spike, len).expect("tip"));
        }
    }
    points
}

/// Thread consistency `pi_n = f_n o pi_(n+1)` on sampled limit points, and
/// that star lifts are sections of the bonding maps.
pub fn audit_threads(tower: &Tower, points: u64, ctx: &AuditContext) -> AuditReport {
    let h = tower.height();
    let outcomes = ctx.run(points, |i, rng| {
        let x = tower.sample(rng);
        let mut out = Vec::new();
        for n in 1..h {
            let (lo, hi) = match (tower.project(&x, n), tower.project(&x, n + 1)) {
                (Ok(lo), Ok(hi)) => (lo, hi),
                _ => {
                    out.push(Violation::new(i, "projections exist").point(&x));
                    continue;
                }
            };
            match tower.bond(&hi) {
                Ok(b) if b == lo => {}
                _ => out.push(
                    Violation::new(i, format!("pi_{n} = f_{n}(pi_{})", n + 1))
                        .point(&x)
                        .point(&lo)
                        .point(&hi),
                ),
            }
            match tower.star_lift(&lo).and_then(|s| tower.bond(&s)) {
                Ok(b) if b == lo => {}
                _ => out.push(Violation::new(i, format!("f_{n} o star = id on level {n}")).point(&lo)),
            }
        }
        out
    });
    let mut report = AuditReport::new("threads", tower.describe(), ctx.seed).sample("points", points);
    report.absorb(outcomes);
    report
}

/// Prefix enclosures from levels `1..=K` contain the exact distance, have
/// width at most `2^-(K+1)`, and tighten as `K` grows.
pub fn audit_enclosures(tower: &Tower, pairs: u64, ctx: &AuditContext) -> AuditReport {
    let h = tower.height();
    let outcomes = ctx.run(pairs, |i, rng| {
        let x = tower.sample(rng);
        let u = tower.sample(rng);
        let d = tower.limit_distance(&x, &u);
        let mut out = Vec::new();
        let mut prev: Option<crate::invlimit::Enclosure> = None;
        for k in 1..=h {
            let enc = match tower.prefix_enclosure(&x, &u, k) {
                Ok(e) => e,
                Err(e) => {
                    out.push(Violation::new(i, format!("enclosure failed: {e}")));
                    continue;
                }
            };
            let bound = Scalar::pow2_neg(k as u32 + 1);
            if !enc.contains(&d) || enc.width() > bound {
                out.push(
                    Violation::new(i, format!("enclosure at K={k} contains d with width <= 2^-(K+1)"))
                        .point(&x)
                        .point(&u)
                        .value("d", d.clone())
                        .value("lo", enc.lo.clone())
                        .value("hi", enc.hi.clone()),
                );
            }
            if let Some(p) = &prev {
                if enc.lo < p.lo || enc.hi > p.hi {
                    out.push(
                        Violation::new(i, format!("enclosure at K={k} refines K={}", k - 1))
                            .point(&x)
                            .point(&u)
                            .value("lo", enc.lo.clone())
                            .value("prev_lo", p.lo.clone()),
                    );
                }
            }
            prev = Some(enc);
        }
        out
    });
    let mut report = AuditReport::new("enclosures", tower.describe(), ctx.seed).sample("pairs", pairs);
    report.absorb(outcomes);
    report
}

/// Distinct limit distances of a finite sample are bounded by the summed
/// distinct level distances, and each is a scaled level distance.
pub fn audit_economical(tower: &Tower, samples: u64, max_size: usize, ctx: &AuditContext) -> AuditReport {
    let results = ctx.map(samples, |i, rng| {
        let size = rng.gen_range(2..=max_size.max(2));
        let sample: Vec<LimitPoint> = (0..size).map(|_| tower.sample(rng)).collect();
        let rep = tower.economical_report(&sample);
        let mut out = Vec::new();
        if !rep.sum_bound_holds || !rep.scaled_inclusion_holds {
            out.push(
                Violation::new(i, "|d(A x A)| <= sum_n |d_n(pi_n A x pi_n A)|")
                    .value("distinct", Scalar::from_int(rep.distinct_distances as i64))
                    .value("level_sum", Scalar::from_int(rep.level_sum as i64))
                    .value(
                        "scaled_inclusion",
                        Scalar::from_int(i64::from(rep.scaled_inclusion_holds)),
                    ),
            );
        }
        (out, rep.distinct_distances as u64, rep.level_sum as u64)
    });
    let mut report = AuditReport::new("economical", tower.describe(), ctx.seed)
        .sample("samples", samples)
        .sample("max_sample_size", max_size as u64);
    report.note("distinct_distances", results.iter().map(|r| r.1).collect::<Vec<_>>());
    report.note("level_sums", results.iter().map(|r| r.2).collect::<Vec<_>>());
    report.absorb(results.into_iter().map(|r| r.0).collect());
    report
}

/// Extremal classification: `up(a)` is a local minimum and `down(a)` a
/// local maximum for radii below `min(a, 1 - a)`, with sampled neighbours on
/// the right side and some strictly beyond; every other sampled point is
/// locally constant within its classification radius.
pub fn audit_extrema(space: &ExtremalSpace, trials: u64, neighbours: usize, ctx: &AuditContext) -> AuditReport {
    let outcomes = ctx.run(trials, |i, rng| {
        let a = grid_open_unit(rng, 1 << 12);
        let limit = std::cmp::min(a.clone(), Scalar::one() - &a);
        let r = &limit * Scalar::ratio(rng.gen_range(1..64), 64);
        let mut out = Vec::new();
        for (which, want) in [(Which::Up, Extremum::LocalMin), (Which::Down, Extremum::LocalMax)] {
            let p = space.extreme(a.clone(), which).expect("a in (0, 1)");
            match space.e_classify(&p, &r) {
                Ok(got) if got == want => {}
                other => out.push(
                    Violation::new(i, format!("classify {p} as {want:?}, got {other:?}"))
                        .point(&p)
                        .value("r", r.clone()),
                ),
            }
            let near = space.sample_near(&p, &r, neighbours, rng);
            let mut strict = false;
            for x in &near {
                let v = space.e_value(x);
                let ok = match which {
                    Which::Up => *v >= a,
                    Which::Down => *v <= a,
                };
                strict |= *v != a;
                if !ok {
                    out.push(
                        Violation::new(i, format!("neighbours respect the {want:?}"))
                            .point(&p)
                            .point(x)
                            .value("value", v.clone())
                            .value("r", r.clone()),
                    );
                }
            }
            if !strict {
                out.push(Violation::new(i, "some neighbour has a different value").point(&p).value("r", r.clone()));
            }
        }
        let p = space.sample(rng);
        let is_extreme = *p.t() == Scalar::one() && matches!(p.spike(), crate::extremal::ESpike::Up | crate::extremal::ESpike::Down);
        if !is_extreme {
            let radius = space.classification_radius(&p) * Scalar::ratio(rng.gen_range(1..=64), 64);
            if radius.is_positive() {
                match space.e_classify(&p, &radius) {
                    Ok(Extremum::LocallyConstant) => {}
                    other => out.push(Violation::new(i, format!("classify as constant, got {other:?}")).point(&p)),
                }
                for x in space.sample_near(&p, &radius, neighbours, rng) {
                    if space.e_value(&x) != space.e_value(&p) {
                        out.push(
                            Violation::new(i, "locally constant near non-extreme points")
                                .point(&p)
                                .point(&x)
                                .value("r", radius.clone()),
                        );
                    }
                }
            }
        }
        out
    });
    let mut report = AuditReport::new("extrema", space.describe(), ctx.seed)
        .sample("trials", trials)
        .sample("neighbours", neighbours as u64);
    report.absorb(outcomes);
    report
}

/// `f(B(up(a), r)) = [a, a + r)` and `f(B(down(a), r)) = (a - r, a]`: the
/// interval decides membership exactly as the nearest point of `H_c` does,
/// and sampled points of non-member fibers stay outside the ball.
pub fn audit_extremal_ball_image(
    space: &ExtremalSpace,
    trials: u64,
    fiber_samples: usize,
    ctx: &AuditContext,
) -> AuditReport {
    let outcomes = ctx.run(trials, |i, rng| {
        let a = grid_open_unit(rng, 1 << 12);
        let limit = std::cmp::min(a.clone(), Scalar::one() - &a);
        let r = &limit * Scalar::ratio(rng.gen_range(1..64), 64);
        let which = if rng.gen_bool(0.5) { Which::Up } else { Which::Down };
        let image = match space.e_ball_image(&a, which, &r) {
            Ok(img) => img,
            Err(e) => return vec![Violation::new(i, format!("ball image failed: {e}"))],
        };
        let centre = space.extreme(a.clone(), which).expect("a in (0, 1)");
        // probe fibers at and around both ends of the interval
        let mut fibers: Vec<Scalar> = [-2i64, -1, 0, 1, 2]
            .iter()
            .flat_map(|k| {
                let step = &r * Scalar::ratio(*k, 2);
                [&a + &step, &a - &step, &a + &r + &step * Scalar::ratio(1, 8), &a - &r + &step * Scalar::ratio(1, 8)]
            })
            .collect();
        fibers.push(grid_open_unit(rng, 1 << 12));
        fibers.retain(|c| c.is_positive() && *c < Scalar::one());
        fibers.sort();
        fibers.dedup();
        let mut out = Vec::new();
        for c in fibers {
            let (nearest, d) = match space.nearest_in_fiber(&a, which, &c) {
                Ok(x) => x,
                Err(e) => {
                    out.push(Violation::new(i, format!("nearest point failed: {e}")));
                    continue;
                }
            };
            let member = image.contains(&c);
            if member != (d < r) || space.e_value(&nearest) != &c {
                out.push(
                    Violation::new(i, format!("c in {image} iff H_c meets the ball"))
                        .point(&centre)
                        .point(&nearest)
                        .value("c", c.clone())
                        .value("d", d.clone())
                        .value("r", r.clone()),
                );
            }
            if !member {
                for _ in 0..fiber_samples {
                    let x = sample_fiber_point(space, &c, rng);
                    let dx = space.e_distance(&centre, &x);
                    if dx < r || dx < d {
                        out.push(
                            Violation::new(i, "non-member fibers stay outside the ball")
                                .point(&centre)
                                .point(&x)
                                .value("d", dx)
                                .value("r", r.clone()),
                        );
                    }
                }
            }
        }
        out
    });
    let mut report = AuditReport::new("extremal-ball-image", space.describe(), ctx.seed)
        .sample("trials", trials)
        .sample("fiber_samples", fiber_samples as u64);
    report.absorb(outcomes);
    report
}

fn sample_fiber_point(space: &ExtremalSpace, c: &Scalar, rng: &mut ChaCha8Rng) -> crate::extremal::EPoint {
    use crate::extremal::ESpike;
    let spike = match rng.gen_range(0..4) {
        0 => ESpike::Up,
        1 => ESpike::Down,
        _ => {
            let b = grid_open_unit(rng, 1 << 12);
            match b.cmp(c) {
                std::cmp::Ordering::Greater => ESpike::TowardDown(b),
                std::cmp::Ordering::Less => ESpike::TowardUp(b),
                std::cmp::Ordering::Equal => ESpike::Down,
            }
        }
    };
    let len = space.spike_length(c, &spike).expect("target on the right side");
    let t = len * Scalar::ratio(rng.gen_range(0..=64), 64);
    space.e_make(c.clone(), spike, t).expect("parameter inside the spike")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{BasePoint, BaseSpace};
    use crate::invlimit::DEFAULT_HEIGHT;

    fn zspace() -> ZSpace<BaseSpace> {
        ZSpace::new(BaseSpace::unit_interval(), Scalar::from_int(2)).unwrap()
    }

    #[test]
    fn oracle_audit_is_clean() {
        let r = audit_cobweb_oracle(300, &AuditContext::new(0));
        assert!(r.is_clean(), "{:?}", r.violations);
        assert!(r.summary["routes_avoiding_shared_vortex"].as_u64().unwrap() >= 1);
    }

    #[test]
    fn zcon_audits_are_clean() {
        let z = zspace();
        let ctx = AuditContext::new(5);
        for r in [
            audit_fiber_gap(&z, 40, 10, &ctx),
            audit_ball_image(&z, 60, 10, &ctx),
            audit_star_discreteness(&z, 30, &ctx),
            audit_open_fibers(&z, 30, 10, &ctx),
        ] {
            assert!(r.is_clean(), "{}: {:?}", r.audit, r.violations);
        }
    }

    #[test]
    fn skeleton_shape() {
        let z = zspace();
        let fibers: Vec<BasePoint> = (0..=2).map(|i| BasePoint::rational(i, 2)).collect();
        let pts = grid_skeleton(&z, &fibers, &q(1, 2));
        // star spike: 0..2 by 1/2 -> 5 points; a toward spike of length 3/2
        // contributes 1/2, 1 and its tip
        assert_eq!(pts.len(), 3 * 5 + 4 * 3);
    }

    #[test]
    fn tower_audits_are_clean() {
        let t = Tower::new(BaseSpace::unit_interval(), DEFAULT_HEIGHT, Scalar::from_int(2)).unwrap();
        let ctx = AuditContext::new(2);
        for r in [
            audit_threads(&t, 50, &ctx),
            audit_enclosures(&t, 50, &ctx),
            audit_economical(&t, 5, 16, &ctx),
        ] {
            assert!(r.is_clean(), "{}: {:?}", r.audit, r.violations);
        }
    }

    #[test]
    fn extremal_audits_are_clean() {
        let e = ExtremalSpace::default();
        let ctx = AuditContext::new(4);
        let r = audit_extrema(&e, 30, 20, &ctx);
        assert!(r.is_clean(), "{:?}", r.violations);
        let r = audit_extremal_ball_image(&e, 30, 8, &ctx);
        assert!(r.is_clean(), "{:?}", r.violations);
    }
}
