//! The Z-construction over a base space `X`.
//!
//! Every base point `a` contributes two vortices, `bar(a)` and `star(a)`.
//! The fiber `Z_a` over `a` is the full thread from `bar(a)` to `star(a)`
//! together with, for every `b != a`, the initial segment of the thread from
//! `bar(a)` to `star(b)` that stops at distance `gauge(b, a)` short of
//! `star(b)`. Distances are induced from the whole cobweb over all vortices,
//! so routes may leave `Z`. The projection `f` sends `Z_a` to `a`.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cobweb::{cw_distance, CobwebPoint};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{check_rng, grid_parameter, MetricSpace};

/// Default thread length. Must exceed one so that spike tips never reach the
/// star vortex they point at.
pub fn default_eps() -> Scalar {
    Scalar::from_int(2)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spike<P> {
    /// The thread from `bar(a)` to `star(a)`.
    Star,
    /// The truncated thread from `bar(a)` toward `star(b)`.
    Toward(P),
}

/// A point of `Z`, `t` measured from `bar(a)`. Built only through
/// [`ZSpace::z_make`], which enforces the spike range and canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZPoint<P> {
    a: P,
    spike: Spike<P>,
    t: Scalar,
}

impl<P> ZPoint<P> {
    pub fn fiber(&self) -> &P {
        &self.a
    }

    pub fn spike(&self) -> &Spike<P> {
        &self.spike
    }

    pub fn t(&self) -> &Scalar {
        &self.t
    }
}

impl<P: fmt::Display> fmt::Display for ZPoint<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.spike {
            Spike::Star => write!(f, "({}, star, {})", self.a, self.t),
            Spike::Toward(b) => write!(f, "({}, to {}, {})", self.a, b, self.t),
        }
    }
}

/// Vortex tags of the ambient cobweb.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ZVortex<P> {
    Bar(P),
    Star(P),
}

impl<P: fmt::Display> fmt::Display for ZVortex<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZVortex::Bar(a) => write!(f, "bar({a})"),
            ZVortex::Star(a) => write!(f, "star({a})"),
        }
    }
}

/// Closest pair between two fibers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberGap<P> {
    pub distance: Scalar,
    /// The tip of `Z_a` pointing at `b`.
    pub from: ZPoint<P>,
    /// The star point `b*`.
    pub to: ZPoint<P>,
}

/// Answer to "does `f(B(a*, r))` contain `b`?".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallImage<P> {
    pub contained: bool,
    /// A point of `Z_b` within distance `r` of `a*`, when one exists.
    pub witness: Option<ZPoint<P>>,
    /// `inf { rho(a*, z) : z in Z_b }`, which equals `gauge(a, b)`.
    pub fiber_distance: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZSpace<B> {
    base: B,
    eps: Scalar,
    steps: u64,
}

impl<B> ZSpace<B>
where
    B: MetricSpace,
    B::Point: Ord,
{
    pub fn new(base: B, eps: Scalar) -> Result<Self> {
        if eps <= Scalar::one() {
            return Err(Error::range("eps", format!("{eps} must exceed 1")));
        }
        Ok(ZSpace {
            base,
            eps,
            steps: 64,
        })
    }

    pub fn with_steps(mut self, steps: u64) -> Self {
        self.steps = steps.max(1);
        self
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn eps(&self) -> &Scalar {
        &self.eps
    }

    /// Length of a spike of `Z_a`.
    pub fn spike_length(&self, a: &B::Point, spike: &Spike<B::Point>) -> Result<Scalar> {
        match spike {
            Spike::Star => Ok(self.eps.clone()),
            Spike::Toward(b) => {
                if b == a {
                    return Err(Error::InvalidPoint(format!(
                        "spike of fiber {a} cannot point at its own fiber"
                    )));
                }
                Ok(&self.eps - self.base.gauge(b, a)?)
            }
        }
    }

    pub fn z_make(&self, a: B::Point, spike: Spike<B::Point>, t: Scalar) -> Result<ZPoint<B::Point>> {
        let len = self.spike_length(&a, &spike)?;
        if t.is_negative() || t > len {
            return Err(Error::range(
                "spike parameter",
                format!("{t} not in [0, {len}]"),
            ));
        }
        let spike = if t.is_zero() { Spike::Star } else { spike };
        Ok(ZPoint { a, spike, t })
    }

    /// The vortex `bar(a)`.
    pub fn bar(&self, a: B::Point) -> ZPoint<B::Point> {
        ZPoint {
            a,
            spike: Spike::Star,
            t: Scalar::zero(),
        }
    }

    /// The star point `a*`.
    pub fn star(&self, a: B::Point) -> ZPoint<B::Point> {
        ZPoint {
            a,
            spike: Spike::Star,
            t: self.eps.clone(),
        }
    }

    /// The tip of `Z_a` pointing at `b`, at distance `gauge(b, a)` from `b*`.
    pub fn tip(&self, a: B::Point, b: B::Point) -> Result<ZPoint<B::Point>> {
        let spike = Spike::Toward(b);
        let t = self.spike_length(&a, &spike)?;
        Ok(ZPoint { a, spike, t })
    }

    /// Re-checks the invariants of a point, e.g. one built for another space.
    pub fn validate(&self, p: &ZPoint<B::Point>) -> Result<()> {
        let rebuilt = self.z_make(p.a.clone(), p.spike.clone(), p.t.clone())?;
        if rebuilt != *p {
            return Err(Error::InvalidPoint(format!("{p} is not canonical")));
        }
        Ok(())
    }

    /// How far `p` sits below the tip of its spike. Points of other fibers
    /// are at least this far away.
    pub fn spike_clearance(&self, p: &ZPoint<B::Point>) -> Result<Scalar> {
        Ok(self.spike_length(&p.a, &p.spike)? - &p.t)
    }

    pub fn z_embed(&self, p: &ZPoint<B::Point>) -> CobwebPoint<ZVortex<B::Point>> {
        let far = match &p.spike {
            Spike::Star => ZVortex::Star(p.a.clone()),
            Spike::Toward(b) => ZVortex::Star(b.clone()),
        };
        if p.t.is_zero() {
            CobwebPoint::Vortex(ZVortex::Bar(p.a.clone()))
        } else if p.t == self.eps {
            CobwebPoint::Vortex(far)
        } else {
            // Bar(_) < Star(_), so the stored orientation already runs from bar(a).
            CobwebPoint::Inner {
                u: ZVortex::Bar(p.a.clone()),
                v: far,
                t: p.t.clone(),
            }
        }
    }

    fn embed_ref<'a>(&self, p: &'a ZPoint<B::Point>) -> CobwebPoint<ZVortex<&'a B::Point>> {
        let far = match &p.spike {
            Spike::Star => ZVortex::Star(&p.a),
            Spike::Toward(b) => ZVortex::Star(b),
        };
        if p.t.is_zero() {
            CobwebPoint::Vortex(ZVortex::Bar(&p.a))
        } else if p.t == self.eps {
            CobwebPoint::Vortex(far)
        } else {
            CobwebPoint::Inner {
                u: ZVortex::Bar(&p.a),
                v: far,
                t: p.t.clone(),
            }
        }
    }

    /// Distance induced from the ambient cobweb.
    pub fn z_distance(&self, p: &ZPoint<B::Point>, q: &ZPoint<B::Point>) -> Scalar {
        cw_distance(&self.eps, &self.embed_ref(p), &self.embed_ref(q))
    }

    pub fn z_distance_truncated(&self, p: &ZPoint<B::Point>, q: &ZPoint<B::Point>) -> Scalar {
        self.z_distance(p, q).truncated()
    }

    pub fn f_project<'a>(&self, p: &'a ZPoint<B::Point>) -> &'a B::Point {
        &p.a
    }

    /// `min { rho(x, u) : x in Z_a, u in Z_b } = gauge(a, b)`, attained by
    /// the tip of `Z_a` toward `b` and the star point `b*`.
    pub fn fiber_min_distance(&self, a: &B::Point, b: &B::Point) -> Result<FiberGap<B::Point>> {
        if a == b {
            return Err(Error::InvalidPoint(format!(
                "fiber distance needs distinct fibers, got {a} twice"
            )));
        }
        let distance = self.base.gauge(a, b)?;
        Ok(FiberGap {
            distance,
            from: self.tip(a.clone(), b.clone())?,
            to: self.star(b.clone()),
        })
    }

    /// Whether `b` lies in `f(B(a*, r))`, i.e. `gauge(a, b) < r`. The witness
    /// is the tip of `Z_b` pointing at `a`.
    pub fn ball_image_contains(&self, a: &B::Point, r: &Scalar, b: &B::Point) -> Result<BallImage<B::Point>> {
        if !r.is_positive() {
            return Err(Error::range("ball radius", format!("{r} is not positive")));
        }
        if a == b {
            return Ok(BallImage {
                contained: true,
                witness: Some(self.star(a.clone())),
                fiber_distance: Scalar::zero(),
            });
        }
        let fiber_distance = self.base.gauge(a, b)?;
        let contained = fiber_distance < *r;
        Ok(BallImage {
            contained,
            witness: if contained {
                Some(self.tip(b.clone(), a.clone())?)
            } else {
                None
            },
            fiber_distance,
        })
    }

    /// A random point of `Z_a`; the spike is the star thread a third of the
    /// time and otherwise points at a sampled base point.
    pub fn sample_in_fiber(&self, a: &B::Point, rng: &mut ChaCha8Rng) -> ZPoint<B::Point> {
        let spike = if rng.gen_range(0..3) == 0 {
            Spike::Star
        } else {
            let b = self.base.sample(rng);
            if b == *a {
                Spike::Star
            } else {
                Spike::Toward(b)
            }
        };
        let len = self
            .spike_length(a, &spike)
            .expect("spike chosen with a distinct target");
        let t = grid_parameter(rng, &len, self.steps);
        self.z_make(a.clone(), spike, t)
            .expect("parameter drawn inside the spike")
    }

    /// `count` deterministic samples from `Z_a`.
    pub fn sample_fiber(&self, a: &B::Point, count: usize, seed: u64) -> Vec<ZPoint<B::Point>> {
        let mut rng = check_rng(seed, 0);
        (0..count).map(|_| self.sample_in_fiber(a, &mut rng)).collect()
    }
}

impl<B> MetricSpace for ZSpace<B>
where
    B: MetricSpace,
    B::Point: Ord,
{
    type Point = ZPoint<B::Point>;

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> Result<Scalar> {
        Ok(self.z_distance(p, q))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Point {
        let a = self.base.sample(rng);
        self.sample_in_fiber(&a, rng)
    }

    fn describe(&self) -> String {
        format!("zcon(base={}, eps={})", self.base.describe(), self.eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{BasePoint, BaseSpace};

    fn space() -> ZSpace<BaseSpace> {
        ZSpace::new(BaseSpace::unit_interval(), default_eps()).unwrap()
    }

    fn q(n: i64, d: i64) -> BasePoint {
        BasePoint::rational(n, d)
    }

    #[test]
    fn construction_examples() {
        let z = space();
        let a = q(0, 1);
        let star = z.z_make(a.clone(), Spike::Star, default_eps()).unwrap();
        assert_eq!(star, z.star(a.clone()));
        let bar = z.z_make(a.clone(), Spike::Toward(q(1, 2)), Scalar::zero()).unwrap();
        assert_eq!(bar, z.bar(a.clone()));
        assert_eq!(*bar.spike(), Spike::Star);
        let tip = z
            .z_make(a.clone(), Spike::Toward(q(1, 2)), Scalar::ratio(3, 2))
            .unwrap();
        assert_eq!(tip, z.tip(a.clone(), q(1, 2)).unwrap());
        assert!(z
            .z_make(a.clone(), Spike::Toward(q(1, 2)), Scalar::ratio(8, 5))
            .is_err());
        assert!(z.z_make(a.clone(), Spike::Toward(a.clone()), Scalar::one()).is_err());
        assert!(ZSpace::new(BaseSpace::unit_interval(), Scalar::one()).is_err());
    }

    #[test]
    fn embedding() {
        let z = space();
        let a = q(1, 3);
        assert_eq!(
            z.z_embed(&z.star(a.clone())),
            CobwebPoint::Vortex(ZVortex::Star(a.clone()))
        );
        assert_eq!(
            z.z_embed(&z.bar(a.clone())),
            CobwebPoint::Vortex(ZVortex::Bar(a.clone()))
        );
        let p = z
            .z_make(a.clone(), Spike::Toward(q(1, 2)), Scalar::ratio(1, 4))
            .unwrap();
        assert_eq!(
            z.z_embed(&p),
            CobwebPoint::Inner {
                u: ZVortex::Bar(a.clone()),
                v: ZVortex::Star(q(1, 2)),
                t: Scalar::ratio(1, 4)
            }
        );
    }

    #[test]
    fn star_to_tip_distance_is_the_gauge() {
        let z = space();
        let (a, b) = (q(0, 1), q(1, 2));
        let tip = z.tip(b.clone(), a.clone()).unwrap();
        assert_eq!(z.z_distance(&z.star(a.clone()), &tip), Scalar::ratio(1, 2));
        assert_eq!(z.z_distance(&z.bar(a.clone()), &z.bar(b.clone())), default_eps());
        assert_eq!(
            z.z_distance_truncated(&z.bar(a.clone()), &z.bar(b.clone())),
            Scalar::one()
        );
        assert_eq!(z.z_distance(&tip, &tip), Scalar::zero());
    }

    #[test]
    fn projection() {
        let z = space();
        let (a, b) = (q(1, 5), q(4, 5));
        assert_eq!(z.f_project(&z.star(a.clone())), &a);
        let tip = z.tip(a.clone(), b.clone()).unwrap();
        assert_eq!(z.f_project(&tip), &a);
        let p = z.z_make(a.clone(), Spike::Star, Scalar::ratio(1, 3)).unwrap();
        assert_eq!(z.f_project(&p), &a);
    }

    #[test]
    fn fiber_gap() {
        let z = space();
        let (a, b) = (q(0, 1), q(1, 3));
        let gap = z.fiber_min_distance(&a, &b).unwrap();
        assert_eq!(gap.distance, Scalar::ratio(1, 3));
        assert_eq!(z.z_distance(&gap.from, &gap.to), gap.distance);
        assert_eq!(z.fiber_min_distance(&b, &a).unwrap().distance, gap.distance);
        assert!(z.fiber_min_distance(&a, &a).is_err());
        for x in z.sample_fiber(&a, 200, 5) {
            for u in z.sample_fiber(&b, 50, 6) {
                assert!(z.z_distance(&x, &u) >= Scalar::ratio(1, 3));
            }
        }
    }

    #[test]
    fn ball_images() {
        let z = space();
        let quarter = Scalar::ratio(1, 4);
        let hit = z.ball_image_contains(&q(1, 2), &quarter, &q(3, 5)).unwrap();
        assert!(hit.contained);
        let w = hit.witness.unwrap();
        assert_eq!(z.f_project(&w), &q(3, 5));
        assert_eq!(z.z_distance(&z.star(q(1, 2)), &w), Scalar::ratio(1, 10));

        assert!(z.ball_image_contains(&q(1, 2), &Scalar::ratio(1, 1000), &q(1, 2)).unwrap().contained);

        let miss = z.ball_image_contains(&q(0, 1), &quarter, &q(1, 2)).unwrap();
        assert!(!miss.contained && miss.witness.is_none());
        let star = z.star(q(0, 1));
        for x in z.sample_fiber(&q(1, 2), 500, 9) {
            assert!(z.z_distance(&star, &x) >= quarter);
        }
        assert!(z.ball_image_contains(&q(0, 1), &Scalar::zero(), &q(1, 2)).is_err());
    }

    #[test]
    fn fiber_sampling_is_deterministic_and_valid() {
        let z = space();
        let a = q(2, 7);
        let first = z.sample_fiber(&a, 64, 11);
        assert_eq!(first, z.sample_fiber(&a, 64, 11));
        for p in &first {
            assert_eq!(z.f_project(p), &a);
            z.validate(p).unwrap();
        }
    }

    #[test]
    fn other_fibers_stay_clear_of_spike_interiors() {
        let z = space();
        let mut rng = check_rng(21, 0);
        for _ in 0..300 {
            let p = z.sample(&mut rng);
            let clearance = z.spike_clearance(&p).unwrap();
            for _ in 0..10 {
                let other = z.sample(&mut rng);
                if z.f_project(&other) != z.f_project(&p) {
                    assert!(z.z_distance(&p, &other) >= clearance);
                }
            }
            // the nearest point of the targeted fiber sits exactly at the clearance
            if let Spike::Toward(b) = p.spike() {
                assert_eq!(z.z_distance(&p, &z.star(b.clone())), z.eps() - p.t());
            }
        }
    }
}
