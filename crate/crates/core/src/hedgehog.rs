//! The hedgehog: a center with finitely many spikes of length `eps`.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{grid_parameter, MetricSpace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HedgehogSpace {
    spike_count: u32,
    eps: Scalar,
    steps: u64,
}

/// A point at height `t` on spike `spike`. The center is stored as spike 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HedgehogPoint {
    pub spike: u32,
    pub t: Scalar,
}

impl fmt::Display for HedgehogPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.spike, self.t)
    }
}

impl HedgehogSpace {
    pub fn new(spike_count: u32, eps: Scalar) -> Result<Self> {
        if spike_count == 0 {
            return Err(Error::range("spike count", "must be positive"));
        }
        if !eps.is_positive() {
            return Err(Error::range("eps", format!("{eps} is not positive")));
        }
        Ok(HedgehogSpace {
            spike_count,
            eps,
            steps: 64,
        })
    }

    /// Sets the number of grid steps used when sampling heights.
    pub fn with_steps(mut self, steps: u64) -> Self {
        self.steps = steps.max(1);
        self
    }

    pub fn eps(&self) -> &Scalar {
        &self.eps
    }

    pub fn spike_count(&self) -> u32 {
        self.spike_count
    }

    pub fn point(&self, spike: u32, t: Scalar) -> Result<HedgehogPoint> {
        self.canonicalize(HedgehogPoint { spike, t })
    }

    pub fn canonicalize(&self, p: HedgehogPoint) -> Result<HedgehogPoint> {
        if p.t.is_negative() || p.t > self.eps {
            return Err(Error::range(
                "hedgehog height",
                format!("{} not in [0, {}]", p.t, self.eps),
            ));
        }
        if p.spike >= self.spike_count {
            return Err(Error::range(
                "spike",
                format!("{} >= {}", p.spike, self.spike_count),
            ));
        }
        Ok(if p.t.is_zero() {
            HedgehogPoint {
                spike: 0,
                t: Scalar::zero(),
            }
        } else {
            p
        })
    }

    /// `|t - s|` on a common spike, `t + s` across spikes.
    pub fn hh_distance(&self, p: &HedgehogPoint, q: &HedgehogPoint) -> Scalar {
        if p.spike == q.spike {
            (&p.t - &q.t).abs()
        } else {
            &p.t + &q.t
        }
    }
}

impl MetricSpace for HedgehogSpace {
    type Point = HedgehogPoint;

    fn distance(&self, p: &HedgehogPoint, q: &HedgehogPoint) -> Result<Scalar> {
        for x in [p, q] {
            if self.canonicalize(x.clone())? != *x {
                return Err(Error::InvalidPoint(format!("{x} is not canonical")));
            }
        }
        Ok(self.hh_distance(p, q))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> HedgehogPoint {
        let spike = rng.gen_range(0..self.spike_count);
        let t = grid_parameter(rng, &self.eps, self.steps);
        self.point(spike, t).expect("grid height lies in [0, eps]")
    }

    fn describe(&self) -> String {
        format!("hedgehog(spikes={}, eps={})", self.spike_count, self.eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> HedgehogSpace {
        HedgehogSpace::new(8, Scalar::from_int(2)).unwrap()
    }

    #[test]
    fn center_identification() {
        let s = space();
        let c = s.point(7, Scalar::zero()).unwrap();
        assert_eq!(c, HedgehogPoint { spike: 0, t: Scalar::zero() });
        let p = s.point(3, Scalar::ratio(1, 2)).unwrap();
        assert_eq!(p.spike, 3);
        assert_eq!(s.canonicalize(c.clone()).unwrap(), c);
        assert!(s.point(1, Scalar::from_int(3)).is_err());
        assert!(s.point(1, Scalar::ratio(-1, 2)).is_err());
    }

    #[test]
    fn two_case_formula() {
        let s = space();
        let a = s.point(1, Scalar::ratio(1, 2)).unwrap();
        let b = s.point(1, Scalar::ratio(3, 2)).unwrap();
        assert_eq!(s.hh_distance(&a, &b), Scalar::one());
        let c = s.point(2, Scalar::ratio(7, 10)).unwrap();
        assert_eq!(s.hh_distance(&a, &c), Scalar::ratio(6, 5));
        let center = s.point(0, Scalar::zero()).unwrap();
        let q = s.point(5, Scalar::ratio(3, 7)).unwrap();
        assert_eq!(s.hh_distance(&center, &q), Scalar::ratio(3, 7));
    }

    #[test]
    fn diameter_bound() {
        let s = space();
        let mut rng = crate::space::check_rng(3, 0);
        let bound = s.eps() * Scalar::from_int(2);
        for _ in 0..500 {
            let p = s.sample(&mut rng);
            let q = s.sample(&mut rng);
            assert!(s.distance(&p, &q).unwrap() <= bound);
        }
    }

    #[test]
    fn non_canonical_points_are_rejected() {
        let s = space();
        let raw = HedgehogPoint {
            spike: 4,
            t: Scalar::zero(),
        };
        assert!(s.distance(&raw, &raw).is_err());
    }
}
