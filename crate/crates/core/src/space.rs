//! The oracle interface shared by every space in the crate.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::scalar::Scalar;

/// A metric space that can sample its own points deterministically and
/// measure exact distances between them.
pub trait MetricSpace: Sync {
    type Point: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync;

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> Result<Scalar>;

    /// The metric truncated at one, `min(d, 1)`.
    fn gauge(&self, p: &Self::Point, q: &Self::Point) -> Result<Scalar> {
        Ok(self.distance(p, q)?.truncated())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Point;

    /// Human-readable descriptor used in reports.
    fn describe(&self) -> String;

    /// Whether the metric is known to satisfy the strong triangle inequality.
    fn is_ultrametric(&self) -> bool {
        false
    }
}

impl<S: MetricSpace> MetricSpace for &S {
    type Point = S::Point;

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> Result<Scalar> {
        (**self).distance(p, q)
    }

    fn gauge(&self, p: &Self::Point, q: &Self::Point) -> Result<Scalar> {
        (**self).gauge(p, q)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Point {
        (**self).sample(rng)
    }

    fn describe(&self) -> String {
        (**self).describe()
    }

    fn is_ultrametric(&self) -> bool {
        (**self).is_ultrametric()
    }
}

/// Wraps a space so that its distance is the gauge `min(d, 1)`.
#[derive(Debug, Clone, Copy)]
pub struct Gauged<S>(pub S);

impl<S: MetricSpace> MetricSpace for Gauged<S> {
    type Point = S::Point;

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> Result<Scalar> {
        self.0.gauge(p, q)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Point {
        self.0.sample(rng)
    }

    fn describe(&self) -> String {
        format!("gauge({})", self.0.describe())
    }

    fn is_ultrametric(&self) -> bool {
        self.0.is_ultrametric()
    }
}

/// RNG for check number `stream` of a run seeded with `seed`.
///
/// Each check draws from its own ChaCha stream, so results do not depend on
/// which worker evaluates which check.
pub fn check_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `max * k / steps` for a uniformly drawn `k` in `0..=steps`, with the two
/// endpoints drawn more often than uniform so that vortices and tips show up
/// in samples.
pub fn grid_parameter(rng: &mut ChaCha8Rng, max: &Scalar, steps: u64) -> Scalar {
    let steps = steps.max(1);
    let k = match rng.gen_range(0..8u8) {
        0 => 0,
        1 => steps,
        _ => rng.gen_range(0..=steps),
    };
    max * Scalar::ratio(k as i64, steps as i64)
}

/// A rational in `[0, 1]` with denominator at most `max_den`. Half of the
/// draws use denominators up to 16 so that samples collide and cluster.
pub fn grid_unit(rng: &mut ChaCha8Rng, max_den: u64) -> Scalar {
    let cap = if rng.gen_bool(0.5) { max_den.min(16) } else { max_den };
    let den = rng.gen_range(1..=cap.max(1));
    let num = rng.gen_range(0..=den);
    Scalar::ratio(num as i64, den as i64)
}

/// A rational in the open interval `(0, 1)` with denominator at most
/// `max_den`, coarse half of the time as in [`grid_unit`].
pub fn grid_open_unit(rng: &mut ChaCha8Rng, max_den: u64) -> Scalar {
    let cap = if rng.gen_bool(0.5) { max_den.min(16) } else { max_den };
    let den = rng.gen_range(2..=cap.max(2));
    let num = rng.gen_range(1..den);
    Scalar::ratio(num as i64, den as i64)
}
