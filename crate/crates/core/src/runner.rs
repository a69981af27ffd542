//! Distance queries and audits driven by a [`RunConfig`].

use crate::audits::{self, AuditContext, AuditReport, CauchySequence, Triples};
use crate::base::{BasePoint, BaseSpace};
use crate::cobweb::{cw_witness_path, nearest_vortex, CobwebPoint, CobwebSpace};
use crate::config::{RunConfig, SpaceSpec};
use crate::error::{Error, Result};
use crate::hedgehog::HedgehogSpace;
use crate::lit;
use crate::scalar::Scalar;
use crate::space::{check_rng, Gauged, MetricSpace};
use crate::zcon::{Spike, ZSpace};

/// Every audit the runner knows, in listing order.
pub const AUDITS: &[&str] = &[
    "metric",
    "ultrametric",
    "distinct-distances",
    "lipschitz",
    "cauchy",
    "oracle",
    "fiber-gap",
    "ball-image",
    "star-discreteness",
    "open-fibers",
    "chain",
    "chain-stars",
    "threads",
    "enclosures",
    "economical",
    "extrema",
];

/// Sample count used when the config does not set `samples`.
pub fn default_samples(audit: &str) -> u64 {
    match audit {
        "metric" | "ultrametric" | "lipschitz" => 10_000,
        "distinct-distances" => 200,
        "oracle" => 500,
        "cauchy" => 20,
        "threads" | "enclosures" => 1000,
        "economical" | "ball-image" | "fiber-gap" | "extrema" | "open-fibers" => 100,
        "star-discreteness" => 50,
        _ => 0,
    }
}

/// Grid step and chain scale of the connectedness skeleton.
pub const SKELETON_GRID: i64 = 64;

pub fn chain_eps() -> Scalar {
    Scalar::ratio(1, 8)
}

/// A distance with an optional route realising it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistAnswer {
    pub distance: Scalar,
    pub witness: Option<Vec<String>>,
}

fn strings<T: std::fmt::Display>(route: &[T]) -> Vec<String> {
    route.iter().map(ToString::to_string).collect()
}

/// Parses two point literals in the configured space and measures them.
pub fn run_dist(spec: &SpaceSpec, p: &str, q: &str, witness: bool) -> Result<DistAnswer> {
    let (distance, route) = match spec {
        SpaceSpec::Base(s) => {
            let (x, y) = (lit::parse_base(s, p)?, lit::parse_base(s, q)?);
            (s.distance(&x, &y)?, witness.then(|| strings(&[x, y])))
        }
        SpaceSpec::Hedgehog(s) => {
            let (x, y) = (lit::parse_hedgehog(s, p)?, lit::parse_hedgehog(s, q)?);
            let route = if x.spike == y.spike || x.t.is_zero() || y.t.is_zero() {
                vec![x.clone(), y.clone()]
            } else {
                vec![x.clone(), s.point(0, Scalar::zero())?, y.clone()]
            };
            (s.distance(&x, &y)?, witness.then(|| strings(&route)))
        }
        SpaceSpec::Cobweb(s) => {
            let (x, y) = (lit::parse_cobweb(s, p)?, lit::parse_cobweb(s, q)?);
            let route = witness.then(|| s.cw_witness_path(&x, &y)).transpose()?;
            (s.cw_distance(&x, &y)?, route.map(|r| strings(&r)))
        }
        SpaceSpec::Zcon(s) => {
            let (x, y) = (lit::parse_zpoint(s, p)?, lit::parse_zpoint(s, q)?);
            let route = witness.then(|| cw_witness_path(s.eps(), &s.z_embed(&x), &s.z_embed(&y)));
            (s.z_distance(&x, &y), route.map(|r| strings(&r)))
        }
        SpaceSpec::Extremal(s) => {
            let (x, y) = (lit::parse_epoint(s, p)?, lit::parse_epoint(s, q)?);
            let route = witness.then(|| cw_witness_path(&s.eps(), &s.e_embed(&x), &s.e_embed(&y)));
            (s.e_distance(&x, &y), route.map(|r| strings(&r)))
        }
        SpaceSpec::Tower(s) => {
            let (x, y) = (lit::parse_limit_point(s, p)?, lit::parse_limit_point(s, q)?);
            if witness {
                return Err(Error::NotApplicable(
                    "limit distances are a max over levels; there is no witness route".into(),
                ));
            }
            (s.limit_distance(&x, &y), None)
        }
    };
    Ok(DistAnswer { distance, witness: route })
}

fn not_applicable(audit: &str, spec: &SpaceSpec) -> Error {
    Error::NotApplicable(format!("audit {audit:?} does not apply to {}", spec.describe()))
}

/// Runs the generic three-point and family audits on any space.
fn generic<S: MetricSpace>(audit: &str, space: &S, n: u64, ctx: &AuditContext) -> Option<AuditReport>
where
    S::Point: Ord,
{
    Some(match audit {
        "metric" => audits::audit_metric(space, Triples::Sampled(n), ctx),
        "ultrametric" => audits::audit_ultrametric(space, Triples::Sampled(n), ctx),
        "distinct-distances" => audits::audit_distinct_distances(space, 2..=64, n, ctx),
        _ => return None,
    })
}

/// A fixed fiber for sequences that live in one fiber.
fn anchor(base: &BaseSpace, seed: u64) -> BasePoint {
    match base {
        BaseSpace::UnitInterval { .. } => BasePoint::rational(1, 2),
        _ => base.sample(&mut check_rng(seed, u64::MAX)),
    }
}

/// `x_k` at height `eps - min(eps, 2^-k)` on the last spike, converging to its tip.
pub fn hedgehog_sequence(space: &HedgehogSpace) -> CauchySequence<'_, crate::hedgehog::HedgehogPoint> {
    let eps = space.eps().clone();
    let spike = space.spike_count() - 1;
    CauchySequence {
        name: format!("hedgehog spike {spike} toward its tip"),
        term: Box::new(move |k| {
            let t = &eps - std::cmp::min(eps.clone(), Scalar::pow2_neg(k));
            space.point(spike, t).expect("height in range")
        }),
        limit: space.point(spike, space.eps().clone()).expect("tip"),
        localize_eps: None,
    }
}

/// Points on the first thread running into its far vortex.
pub fn cobweb_sequence(space: &CobwebSpace<u32>) -> CauchySequence<'_, CobwebPoint<u32>> {
    let eps = space.eps().clone();
    let (u, v) = (space.vortices()[0], space.vortices()[1]);
    CauchySequence {
        name: format!("cobweb thread ({u}, {v}) toward vortex {v}"),
        term: Box::new(move |k| {
            let t = &eps - std::cmp::min(eps.clone(), Scalar::pow2_neg(k));
            space.point(u, v, t).expect("parameter in range")
        }),
        limit: CobwebPoint::Vortex(v),
        localize_eps: Some(space.eps().clone()),
    }
}

/// Points on the star spike of a fiber running into the star point.
pub fn zcon_sequence(space: &ZSpace<BaseSpace>, a: BasePoint) -> CauchySequence<'_, crate::zcon::ZPoint<BasePoint>> {
    let eps = space.eps().clone();
    let fiber = a.clone();
    CauchySequence {
        name: format!("star spike of fiber {a} toward {a}*"),
        term: Box::new(move |k| {
            let t = &eps - std::cmp::min(eps.clone(), Scalar::pow2_neg(k));
            space.z_make(fiber.clone(), Spike::Star, t).expect("parameter in range")
        }),
        limit: space.star(a),
        localize_eps: None,
    }
}

/// The grid fibers `0, 1/64, ..., 1` of a unit-interval base.
pub fn skeleton_fibers() -> Vec<BasePoint> {
    (0..=SKELETON_GRID).map(|i| BasePoint::rational(i, SKELETON_GRID)).collect()
}

/// Runs a named audit on the configured space.
pub fn run_audit(audit: &str, config: &RunConfig, ctx: &AuditContext) -> Result<AuditReport> {
    if !AUDITS.contains(&audit) {
        return Err(Error::Config(format!("unknown audit {audit:?}; expected one of {}", AUDITS.join(", "))));
    }
    let spec = config.build()?;
    let n = config.samples()?.unwrap_or_else(|| default_samples(audit));
    let depth = n.min(u64::from(u32::MAX)) as u32;
    let report = match (&spec, audit) {
        (SpaceSpec::Base(s), _) => generic(audit, s, n, ctx),
        (SpaceSpec::Hedgehog(s), "cauchy") => {
            Some(audits::audit_cauchy(s, &hedgehog_sequence(s), depth, |_| None, ctx))
        }
        (SpaceSpec::Hedgehog(s), _) => generic(audit, s, n, ctx),
        (SpaceSpec::Cobweb(s), "cauchy") => {
            let eps = s.eps().clone();
            Some(audits::audit_cauchy(
                s,
                &cobweb_sequence(s),
                depth,
                move |p| {
                    let (v, d) = nearest_vortex(&eps, p);
                    Some((CobwebPoint::Vortex(v), d))
                },
                ctx,
            ))
        }
        (SpaceSpec::Cobweb(_), "oracle") => Some(audits::audit_cobweb_oracle(n, ctx)),
        (SpaceSpec::Cobweb(s), _) => generic(audit, s, n, ctx),
        (SpaceSpec::Zcon(s), _) => match audit {
            "lipschitz" => {
                let codomain = Gauged(s.base());
                Some(audits::audit_lipschitz("f", s, &codomain, |p| s.f_project(p).clone(), n, ctx))
            }
            "cauchy" => Some(audits::audit_cauchy(
                s,
                &zcon_sequence(s, anchor(s.base(), ctx.seed)),
                depth,
                |_| None,
                ctx,
            )),
            "fiber-gap" => Some(audits::audit_fiber_gap(s, n, 10, ctx)),
            "ball-image" => Some(audits::audit_ball_image(s, n, 32, ctx)),
            "star-discreteness" => Some(audits::audit_star_discreteness(s, n, ctx)),
            "open-fibers" => Some(audits::audit_open_fibers(s, n, 32, ctx)),
            "chain" | "chain-stars" => {
                if !matches!(s.base(), BaseSpace::UnitInterval { .. }) {
                    return Err(not_applicable(audit, &spec));
                }
                let fibers = skeleton_fibers();
                Some(if audit == "chain" {
                    let points = audits::grid_skeleton(s, &fibers, &chain_eps());
                    audits::audit_chain(s, "grid skeleton, step 1/64, spacing 1/8", &points, &chain_eps(), Some(1), ctx)
                } else {
                    let stars: Vec<_> = fibers.iter().map(|a| s.star(a.clone())).collect();
                    let count = stars.len();
                    audits::audit_chain(s, "star points, step 1/64", &stars, &chain_eps(), Some(count), ctx)
                })
            }
            _ => generic(audit, s, n, ctx),
        },
        (SpaceSpec::Extremal(s), _) => match audit {
            "lipschitz" => {
                let unit = BaseSpace::unit_interval();
                Some(audits::audit_lipschitz(
                    "value",
                    s,
                    &unit,
                    |p| BasePoint::Rational(s.e_value(p).clone()),
                    n,
                    ctx,
                ))
            }
            "ball-image" => Some(audits::audit_extremal_ball_image(s, n, 16, ctx)),
            "extrema" => Some(audits::audit_extrema(s, n, 24, ctx)),
            _ => generic(audit, s, n, ctx),
        },
        (SpaceSpec::Tower(s), _) => match audit {
            "lipschitz" => {
                let level = s.level(1)?;
                Some(audits::audit_lipschitz(
                    "pi_1",
                    s,
                    &Scaled2(level),
                    |x| s.project(x, 1).expect("level 1 exists"),
                    n,
                    ctx,
                ))
            }
            "threads" => Some(audits::audit_threads(s, n, ctx)),
            "enclosures" => Some(audits::audit_enclosures(s, n, ctx)),
            "economical" => Some(audits::audit_economical(s, n, 64, ctx)),
            _ => generic(audit, s, n, ctx),
        },
    };
    let report = report.ok_or_else(|| not_applicable(audit, &spec))?;
    let mut resolved = config.resolved()?;
    resolved.insert("audit".into(), audit.into());
    resolved.insert("seed".into(), ctx.seed.to_string());
    resolved.insert("samples".into(), n.to_string());
    Ok(report.with_config(resolved))
}

/// Level 1 with its metric halved, the codomain in which `pi_1` is 1-Lipschitz.
struct Scaled2<S>(S);

impl<S: MetricSpace> MetricSpace for Scaled2<S> {
    type Point = S::Point;

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> Result<Scalar> {
        Ok(self.0.distance(p, q)? * Scalar::ratio(1, 2))
    }

    fn sample(&self, rng: &mut rand_chacha::ChaCha8Rng) -> Self::Point {
        self.0.sample(rng)
    }

    fn describe(&self) -> String {
        format!("{} scaled by 1/2", self.0.describe())
    }
}
