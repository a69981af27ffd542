//! A complete metric space over `(0, 1)` carrying a 1-Lipschitz surjection
//! with a local extremum at every point.
//!
//! Every `a` in `(0, 1)` contributes three vortices `bar(a)`, `up(a)` and
//! `down(a)`, all pairwise at distance one. The fiber `H_a` consists of the
//! threads `[bar(a), up(a)]` and `[bar(a), down(a)]`, the part of
//! `[bar(a), down(b)]` ending `b - a` short of `down(b)` for every `b > a`,
//! and the part of `[bar(a), up(b)]` ending `a - b` short of `up(b)` for
//! every `b < a`. The value map sends `H_a` to `a`; it has a local minimum at
//! each `up(a)`, a local maximum at each `down(a)`, and is locally constant
//! everywhere else.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cobweb::{cw_distance, CobwebPoint};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{grid_open_unit, grid_parameter, MetricSpace};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ESpike {
    /// Thread `[bar(a), up(a)]`.
    Up,
    /// Thread `[bar(a), down(a)]`.
    Down,
    /// Part of `[bar(a), down(b)]` for `b > a`.
    TowardDown(Scalar),
    /// Part of `[bar(a), up(b)]` for `b < a`.
    TowardUp(Scalar),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EPoint {
    a: Scalar,
    spike: ESpike,
    t: Scalar,
}

impl EPoint {
    pub fn fiber(&self) -> &Scalar {
        &self.a
    }

    pub fn spike(&self) -> &ESpike {
        &self.spike
    }

    pub fn t(&self) -> &Scalar {
        &self.t
    }
}

impl fmt::Display for EPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.spike {
            ESpike::Up => write!(f, "({}, up, {})", self.a, self.t),
            ESpike::Down => write!(f, "({}, down, {})", self.a, self.t),
            ESpike::TowardDown(b) => write!(f, "({}, todown {}, {})", self.a, b, self.t),
            ESpike::TowardUp(b) => write!(f, "({}, toup {}, {})", self.a, b, self.t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EVortex {
    Bar(Scalar),
    Up(Scalar),
    Down(Scalar),
}

impl fmt::Display for EVortex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EVortex::Bar(a) => write!(f, "bar({a})"),
            EVortex::Up(a) => write!(f, "up({a})"),
            EVortex::Down(a) => write!(f, "down({a})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Up,
    Down,
}

/// A half-open interval of rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn contains(&self, x: &Scalar) -> bool {
        let above = if self.lo_closed { *x >= self.lo } else { *x > self.lo };
        let below = if self.hi_closed { *x <= self.hi } else { *x < self.hi };
        above && below
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Extremum {
    LocalMin,
    LocalMax,
    LocallyConstant,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremalSpace {
    grid: u64,
    steps: u64,
}

impl Default for ExtremalSpace {
    fn default() -> Self {
        ExtremalSpace {
            grid: crate::base::DEFAULT_GRID,
            steps: 64,
        }
    }
}

fn in_open_unit(x: &Scalar) -> bool {
    x.is_positive() && *x < Scalar::one()
}

impl ExtremalSpace {
    pub fn new(grid: u64) -> Self {
        ExtremalSpace {
            grid: grid.max(2),
            steps: 64,
        }
    }

    pub fn with_steps(mut self, steps: u64) -> Self {
        self.steps = steps.max(1);
        self
    }

    /// Thread length; every pair of vortices is this far apart.
    pub fn eps(&self) -> Scalar {
        Scalar::one()
    }

    pub fn spike_length(&self, a: &Scalar, spike: &ESpike) -> Result<Scalar> {
        if !in_open_unit(a) {
            return Err(Error::range("fiber", format!("{a} not in (0, 1)")));
        }
        match spike {
            ESpike::Up | ESpike::Down => Ok(Scalar::one()),
            ESpike::TowardDown(b) => {
                if !in_open_unit(b) || b <= a {
                    return Err(Error::InvalidPoint(format!(
                        "todown spike of fiber {a} needs a target in ({a}, 1), got {b}"
                    )));
                }
                Ok(Scalar::one() - (b - a))
            }
            ESpike::TowardUp(b) => {
                if !in_open_unit(b) || b >= a {
                    return Err(Error::InvalidPoint(format!(
                        "toup spike of fiber {a} needs a target in (0, {a}), got {b}"
                    )));
                }
                Ok(Scalar::one() - (a - b))
            }
        }
    }

    pub fn e_make(&self, a: Scalar, spike: ESpike, t: Scalar) -> Result<EPoint> {
        let len = self.spike_length(&a, &spike)?;
        if t.is_negative() || t > len {
            return Err(Error::range(
                "spike parameter",
                format!("{t} not in [0, {len}]"),
            ));
        }
        let spike = if t.is_zero() { ESpike::Up } else { spike };
        Ok(EPoint { a, spike, t })
    }

    pub fn bar(&self, a: Scalar) -> Result<EPoint> {
        self.e_make(a, ESpike::Up, Scalar::zero())
    }

    pub fn up(&self, a: Scalar) -> Result<EPoint> {
        self.e_make(a, ESpike::Up, Scalar::one())
    }

    pub fn down(&self, a: Scalar) -> Result<EPoint> {
        self.e_make(a, ESpike::Down, Scalar::one())
    }

    pub fn extreme(&self, a: Scalar, which: Which) -> Result<EPoint> {
        match which {
            Which::Up => self.up(a),
            Which::Down => self.down(a),
        }
    }

    pub fn validate(&self, p: &EPoint) -> Result<()> {
        let rebuilt = self.e_make(p.a.clone(), p.spike.clone(), p.t.clone())?;
        if rebuilt != *p {
            return Err(Error::InvalidPoint(format!("{p} is not canonical")));
        }
        Ok(())
    }

    fn embed<'a>(&self, p: &'a EPoint) -> CobwebPoint<EVortexRef<'a>> {
        let far = match &p.spike {
            ESpike::Up => EVortexRef::Up(&p.a),
            ESpike::Down => EVortexRef::Down(&p.a),
            ESpike::TowardDown(b) => EVortexRef::Down(b),
            ESpike::TowardUp(b) => EVortexRef::Up(b),
        };
        if p.t.is_zero() {
            CobwebPoint::Vortex(EVortexRef::Bar(&p.a))
        } else if p.t == Scalar::one() {
            CobwebPoint::Vortex(far)
        } else {
            CobwebPoint::Inner {
                u: EVortexRef::Bar(&p.a),
                v: far,
                t: p.t.clone(),
            }
        }
    }

    pub fn e_embed(&self, p: &EPoint) -> CobwebPoint<EVortex> {
        match self.embed(p) {
            CobwebPoint::Vortex(v) => CobwebPoint::Vortex(v.owned()),
            CobwebPoint::Inner { u, v, t } => CobwebPoint::Inner {
                u: u.owned(),
                v: v.owned(),
                t,
            },
        }
    }

    pub fn e_distance(&self, p: &EPoint, q: &EPoint) -> Scalar {
        cw_distance(&Scalar::one(), &self.embed(p), &self.embed(q))
    }

    pub fn e_value<'a>(&self, p: &'a EPoint) -> &'a Scalar {
        &p.a
    }

    /// `f(B(up(a), r)) = [a, a + r)` and `f(B(down(a), r)) = (a - r, a]`.
    pub fn e_ball_image(&self, a: &Scalar, which: Which, r: &Scalar) -> Result<Interval> {
        self.check_radius(a, r)?;
        Ok(match which {
            Which::Up => Interval {
                lo: a.clone(),
                hi: a + r,
                lo_closed: true,
                hi_closed: false,
            },
            Which::Down => Interval {
                lo: a - r,
                hi: a.clone(),
                lo_closed: false,
                hi_closed: true,
            },
        })
    }

    fn check_radius(&self, a: &Scalar, r: &Scalar) -> Result<()> {
        if !in_open_unit(a) {
            return Err(Error::range("fiber", format!("{a} not in (0, 1)")));
        }
        let limit = std::cmp::min(a.clone(), Scalar::one() - a);
        if !r.is_positive() || *r >= limit {
            return Err(Error::range(
                "ball radius",
                format!("{r} not in (0, {limit})"),
            ));
        }
        Ok(())
    }

    /// The point of `H_c` nearest to `up(a)` (or `down(a)`), with its distance.
    ///
    /// For `c` on the side the extremum opens toward, `H_c` has a spike whose
    /// tip is `|c - a|` from the extreme vortex; from the other side the
    /// nearest point is `bar(c)`, one full thread away.
    pub fn nearest_in_fiber(&self, a: &Scalar, which: Which, c: &Scalar) -> Result<(EPoint, Scalar)> {
        let point = if c == a {
            self.extreme(a.clone(), which)?
        } else {
            match (which, c > a) {
                (Which::Up, true) => {
                    let spike = ESpike::TowardUp(a.clone());
                    let len = self.spike_length(c, &spike)?;
                    self.e_make(c.clone(), spike, len)?
                }
                (Which::Down, false) => {
                    let spike = ESpike::TowardDown(a.clone());
                    let len = self.spike_length(c, &spike)?;
                    self.e_make(c.clone(), spike, len)?
                }
                _ => self.bar(c.clone())?,
            }
        };
        let d = self.e_distance(&self.extreme(a.clone(), which)?, &point);
        Ok((point, d))
    }

    /// Largest radius for which a ball around `p` decides its classification.
    pub fn classification_radius(&self, p: &EPoint) -> Scalar {
        match (&p.spike, p.t == Scalar::one()) {
            (ESpike::Up | ESpike::Down, true) => {
                std::cmp::min(p.a.clone(), Scalar::one() - &p.a)
            }
            // Other fibers are no closer than the far end of p's thread.
            _ => Scalar::one() - &p.t,
        }
    }

    /// Local behaviour of the value map at `p`, valid for balls of radius `r`.
    pub fn e_classify(&self, p: &EPoint, r: &Scalar) -> Result<Extremum> {
        self.validate(p)?;
        let limit = self.classification_radius(p);
        let extreme = p.t == Scalar::one() && matches!(p.spike, ESpike::Up | ESpike::Down);
        let too_large = if extreme { *r >= limit } else { *r > limit };
        if !r.is_positive() || too_large {
            return Err(Error::range(
                "classification radius",
                format!("{r} is not a valid radius at {p} (limit {limit})"),
            ));
        }
        Ok(match (&p.spike, extreme) {
            (ESpike::Up, true) => Extremum::LocalMin,
            (ESpike::Down, true) => Extremum::LocalMax,
            _ => Extremum::LocallyConstant,
        })
    }

    /// Points within distance `< r` of `p`, drawn along p's own thread, the
    /// other spikes at `bar(a)`, and the spikes of neighbouring fibers that
    /// approach `up(a)` or `down(a)`. Every returned point is checked to be
    /// inside the ball.
    pub fn sample_near(&self, p: &EPoint, r: &Scalar, count: usize, rng: &mut ChaCha8Rng) -> Vec<EPoint> {
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count && attempts < count * 20 {
            attempts += 1;
            let frac = Scalar::ratio(rng.gen_range(0..1024), 1024);
            let delta = r * &frac;
            let candidate = match rng.gen_range(0..4) {
                // along p's thread, toward or away from bar(a)
                0 => {
                    let t = if rng.gen_bool(0.5) { &p.t + &delta } else { &p.t - &delta };
                    self.e_make(p.a.clone(), p.spike.clone(), t).ok()
                }
                // another spike of the same fiber, measured from bar(a)
                1 => {
                    let spike = self.random_spike(&p.a, rng);
                    let remaining = r - &p.t;
                    if remaining.is_positive() {
                        let t = remaining * frac;
                        self.e_make(p.a.clone(), spike, t).ok()
                    } else {
                        None
                    }
                }
                // neighbouring fibers reaching toward an extreme vortex
                2 => {
                    let (c, spike) = match p.spike {
                        ESpike::Up => (&p.a + &delta, ESpike::TowardUp(p.a.clone())),
                        _ => (&p.a - &delta, ESpike::TowardDown(p.a.clone())),
                    };
                    // distance from the extreme vortex, between the tip and r
                    let reach = &delta + (r - &delta) * Scalar::ratio(rng.gen_range(0..1024), 1024);
                    self.e_make(c, spike, Scalar::one() - reach).ok()
                }
                _ => Some(self.sample(rng)),
            };
            if let Some(q) = candidate {
                if self.e_distance(p, &q) < *r {
                    out.push(q);
                }
            }
        }
        out
    }

    fn random_spike(&self, a: &Scalar, rng: &mut ChaCha8Rng) -> ESpike {
        match rng.gen_range(0..4) {
            0 => ESpike::Up,
            1 => ESpike::Down,
            _ => {
                let b = grid_open_unit(rng, self.grid);
                match b.cmp(a) {
                    std::cmp::Ordering::Greater => ESpike::TowardDown(b),
                    std::cmp::Ordering::Less => ESpike::TowardUp(b),
                    std::cmp::Ordering::Equal => ESpike::Up,
                }
            }
        }
    }
}

/// Borrowed vortex tags, ordered like [`EVortex`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EVortexRef<'a> {
    Bar(&'a Scalar),
    Up(&'a Scalar),
    Down(&'a Scalar),
}

impl EVortexRef<'_> {
    fn owned(self) -> EVortex {
        match self {
            EVortexRef::Bar(a) => EVortex::Bar(a.clone()),
            EVortexRef::Up(a) => EVortex::Up(a.clone()),
            EVortexRef::Down(a) => EVortex::Down(a.clone()),
        }
    }
}

impl MetricSpace for ExtremalSpace {
    type Point = EPoint;

    fn distance(&self, p: &EPoint, q: &EPoint) -> Result<Scalar> {
        Ok(self.e_distance(p, q))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> EPoint {
        let a = grid_open_unit(rng, self.grid);
        let spike = self.random_spike(&a, rng);
        let len = self.spike_length(&a, &spike).expect("spike target on the right side");
        let t = grid_parameter(rng, &len, self.steps);
        self.e_make(a, spike, t).expect("parameter inside the spike")
    }

    fn describe(&self) -> String {
        format!("extremal(grid={}, eps=1/1)", self.grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::check_rng;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn basic_distances() {
        let e = ExtremalSpace::default();
        let half = q(1, 2);
        let bar = e.bar(half.clone()).unwrap();
        let up = e.up(half.clone()).unwrap();
        assert_eq!(e.e_distance(&bar, &up), Scalar::one());
        assert_eq!(e.e_distance(&up, &up), Scalar::zero());

        // the toup spike of H_{3/4} ends 1/4 short of up(1/2)
        let spike = ESpike::TowardUp(half.clone());
        let len = e.spike_length(&q(3, 4), &spike).unwrap();
        assert_eq!(len, q(3, 4));
        let tip = e.e_make(q(3, 4), spike, len).unwrap();
        assert_eq!(e.e_distance(&up, &tip), q(1, 4));
    }

    #[test]
    fn values() {
        let e = ExtremalSpace::default();
        let a = q(1, 3);
        assert_eq!(e.e_value(&e.up(a.clone()).unwrap()), &a);
        assert_eq!(e.e_value(&e.bar(a.clone()).unwrap()), &a);
        let tip = e
            .e_make(a.clone(), ESpike::TowardDown(q(1, 2)), q(5, 6))
            .unwrap();
        assert_eq!(e.e_value(&tip), &a);
    }

    #[test]
    fn construction_errors() {
        let e = ExtremalSpace::default();
        assert!(e.up(Scalar::zero()).is_err());
        assert!(e.up(Scalar::one()).is_err());
        assert!(e.e_make(q(1, 2), ESpike::TowardDown(q(1, 4)), q(1, 2)).is_err());
        assert!(e.e_make(q(1, 2), ESpike::TowardUp(q(3, 4)), q(1, 2)).is_err());
        assert!(e.e_make(q(1, 2), ESpike::TowardDown(q(3, 4)), q(4, 5)).is_err());
        let p = e.e_make(q(1, 2), ESpike::Down, Scalar::zero()).unwrap();
        assert_eq!(p, e.bar(q(1, 2)).unwrap());
    }

    #[test]
    fn ball_images() {
        let e = ExtremalSpace::default();
        let half = q(1, 2);
        let quarter = q(1, 4);
        let up = e.e_ball_image(&half, Which::Up, &quarter).unwrap();
        assert_eq!(up.to_string(), "[1/2, 3/4)");
        let down = e.e_ball_image(&half, Which::Down, &quarter).unwrap();
        assert_eq!(down.to_string(), "(1/4, 1/2]");
        assert!(up.contains(&q(5, 8)) && !up.contains(&q(3, 4)) && up.contains(&half));
        let (w, d) = e.nearest_in_fiber(&half, Which::Up, &q(5, 8)).unwrap();
        assert_eq!(d, q(1, 8));
        assert_eq!(e.e_value(&w), &q(5, 8));
        assert!(e.e_ball_image(&half, Which::Up, &half).is_err());
        assert!(e.e_ball_image(&q(1, 10), Which::Up, &q(1, 5)).is_err());
        let (_, far) = e.nearest_in_fiber(&half, Which::Up, &q(1, 4)).unwrap();
        assert_eq!(far, Scalar::one());
    }

    #[test]
    fn classification() {
        let e = ExtremalSpace::default();
        let a = q(2, 5);
        let r = q(1, 10);
        assert_eq!(e.e_classify(&e.up(a.clone()).unwrap(), &r).unwrap(), Extremum::LocalMin);
        assert_eq!(e.e_classify(&e.down(a.clone()).unwrap(), &r).unwrap(), Extremum::LocalMax);
        let mid = e.e_make(a.clone(), ESpike::Up, q(1, 2)).unwrap();
        assert_eq!(e.e_classify(&mid, &r).unwrap(), Extremum::LocallyConstant);
        assert!(e.e_classify(&e.up(a.clone()).unwrap(), &q(1, 2)).is_err());
        let near_top = e.e_make(a.clone(), ESpike::Up, q(19, 20)).unwrap();
        assert!(e.e_classify(&near_top, &r).is_err());
    }

    #[test]
    fn neighbourhood_samples_respect_extrema() {
        let e = ExtremalSpace::new(64);
        let mut rng = check_rng(2, 0);
        let a = q(3, 7);
        let r = q(1, 5);
        let up = e.up(a.clone()).unwrap();
        let near = e.sample_near(&up, &r, 200, &mut rng);
        assert!(near.len() > 50);
        assert!(near.iter().all(|x| *e.e_value(x) >= a));
        assert!(near.iter().any(|x| *e.e_value(x) > a));
        let down = e.down(a.clone()).unwrap();
        let near = e.sample_near(&down, &r, 200, &mut rng);
        assert!(near.iter().all(|x| *e.e_value(x) <= a));
        assert!(near.iter().any(|x| *e.e_value(x) < a));
    }
}
