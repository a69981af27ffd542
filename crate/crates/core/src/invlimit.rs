//! The tower `X_1, X_2 = Z(X_1), ..., X_N` with bonding maps `f_n`, and the
//! inverse limit metric `d(x, u) = max_n d_n(x_n, u_n) / 2^n`.
//!
//! Each level carries the Z-construction metric truncated at one. A limit
//! point is represented by a single coordinate `rep` at some level `M`; its
//! lower coordinates are bonding-map images and every coordinate above `M`
//! is the star point of the one below. Two such threads that differ at level
//! `M` differ at every higher level by a pair of distinct star vortices, at
//! truncated distance exactly one, so the tail of the max is exactly
//! `2^-(M+1)` and limit distances are exact rationals.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::base::{BasePoint, BaseSpace};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::MetricSpace;
use crate::zcon::{Spike, ZPoint, ZSpace};

pub const DEFAULT_HEIGHT: usize = 3;

/// A point of some level of the tower; the nesting depth is the level.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LevelPoint {
    Base(BasePoint),
    Lift(Box<ZPoint<LevelPoint>>),
}

impl LevelPoint {
    pub fn level(&self) -> usize {
        match self {
            LevelPoint::Base(_) => 1,
            LevelPoint::Lift(z) => z.fiber().level() + 1,
        }
    }
}

impl fmt::Display for LevelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelPoint::Base(p) => write!(f, "{p}"),
            LevelPoint::Lift(z) => write!(f, "{z}"),
        }
    }
}

/// A star-tailed thread of the inverse limit, represented by its lowest
/// coordinate above which every coordinate is a star point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LimitPoint {
    rep: LevelPoint,
}

impl LimitPoint {
    pub fn rep(&self) -> &LevelPoint {
        &self.rep
    }

    pub fn level(&self) -> usize {
        self.rep.level()
    }
}

impl fmt::Display for LimitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.rep.level(), self.rep)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    base: BaseSpace,
    height: usize,
    eps: Scalar,
    steps: u64,
}

/// One level of a tower viewed as a metric space with the truncated metric.
#[derive(Debug, Clone, Copy)]
pub struct Level<'a> {
    tower: &'a Tower,
    index: usize,
}

/// Certified bounds on a limit distance from the first `K` levels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Enclosure {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Enclosure {
    pub fn contains(&self, x: &Scalar) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn width(&self) -> Scalar {
        &self.hi - &self.lo
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelCount {
    pub level: usize,
    pub distinct_points: usize,
    pub distinct_distances: usize,
}

/// Distinct-distance counts of a finite sample of the limit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EconomicalReport {
    pub sample_size: usize,
    /// `|d(A x A)|`, zero included.
    pub distinct_distances: usize,
    pub levels: Vec<LevelCount>,
    /// `sum_n |d_n(pi_n A x pi_n A)|` over levels `1..=N+1`.
    pub level_sum: usize,
    pub sum_bound_holds: bool,
    /// Every limit distance equals `d_n / 2^n` for some level `n`.
    pub scaled_inclusion_holds: bool,
}

impl Tower {
    /// Builds a tower of the given height over the truncation of `base`.
    pub fn new(base: BaseSpace, height: usize, eps: Scalar) -> Result<Self> {
        if height == 0 {
            return Err(Error::range("tower height", "must be at least 1"));
        }
        if eps <= Scalar::one() {
            return Err(Error::range("eps", format!("{eps} must exceed 1")));
        }
        Ok(Tower {
            base: base.truncate(),
            height,
            eps,
            steps: 64,
        })
    }

    pub fn with_steps(mut self, steps: u64) -> Self {
        self.steps = steps.max(1);
        self
    }

    pub fn base(&self) -> &BaseSpace {
        &self.base
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn eps(&self) -> &Scalar {
        &self.eps
    }

    pub fn level(&self, n: usize) -> Result<Level<'_>> {
        if n == 0 || n > self.height {
            return Err(Error::range(
                "level",
                format!("{n} not in [1, {}]", self.height),
            ));
        }
        Ok(self.level_unchecked(n))
    }

    // Levels above the height are well defined; they back the star tail.
    fn level_unchecked(&self, n: usize) -> Level<'_> {
        Level {
            tower: self,
            index: n,
        }
    }

    /// The Z-construction producing level `n + 1` from level `n`.
    pub fn zspace(&self, n: usize) -> ZSpace<Level<'_>> {
        ZSpace::new(self.level_unchecked(n), self.eps.clone())
            .expect("eps checked at construction")
            .with_steps(self.steps)
    }

    /// Builds the level-`n+1` point `(a, spike, t)` over the level-`n` point `a`.
    pub fn make_point(&self, a: LevelPoint, spike: Spike<LevelPoint>, t: Scalar) -> Result<LevelPoint> {
        let n = a.level();
        if n >= self.height {
            return Err(Error::range(
                "level",
                format!("a point over level {n} lies above the tower height {}", self.height),
            ));
        }
        if let Spike::Toward(b) = &spike {
            if b.level() != n {
                return Err(Error::InvalidPoint(format!(
                    "spike target {b} is not a level-{n} point"
                )));
            }
        }
        self.validate_point(&a)?;
        let z = self.zspace(n).z_make(a, spike, t)?;
        Ok(LevelPoint::Lift(Box::new(z)))
    }

    pub fn validate_point(&self, p: &LevelPoint) -> Result<()> {
        if p.level() > self.height {
            return Err(Error::range(
                "level",
                format!("{} exceeds tower height {}", p.level(), self.height),
            ));
        }
        match p {
            LevelPoint::Base(b) => self.base.contains(b),
            LevelPoint::Lift(z) => {
                self.validate_point(z.fiber())?;
                if let Spike::Toward(b) = z.spike() {
                    if b.level() != z.fiber().level() {
                        return Err(Error::InvalidPoint(format!("spike target {b} on the wrong level")));
                    }
                    self.validate_point(b)?;
                }
                self.zspace(z.fiber().level()).validate(z)
            }
        }
    }

    /// `f_k`: a level-`k+1` point to its fiber tag at level `k`.
    pub fn bond(&self, p: &LevelPoint) -> Result<LevelPoint> {
        match p {
            LevelPoint::Base(_) => Err(Error::range("level", "level 1 has no bonding map below it")),
            LevelPoint::Lift(z) => Ok(z.fiber().clone()),
        }
    }

    /// The star point of `p`'s fiber one level up.
    pub fn star_lift(&self, p: &LevelPoint) -> Result<LevelPoint> {
        if p.level() >= self.height {
            return Err(Error::range(
                "level",
                format!("cannot lift level {} in a tower of height {}", p.level(), self.height),
            ));
        }
        Ok(self.lift(p))
    }

    fn lift(&self, p: &LevelPoint) -> LevelPoint {
        LevelPoint::Lift(Box::new(self.zspace(p.level()).star(p.clone())))
    }

    /// The thread through `rep`, stored at the lowest level from which it
    /// is a star lift, so equal threads have equal representatives.
    pub fn limit_point(&self, rep: LevelPoint) -> Result<LimitPoint> {
        self.validate_point(&rep)?;
        Ok(self.thread(rep))
    }

    fn thread(&self, mut rep: LevelPoint) -> LimitPoint {
        while let LevelPoint::Lift(z) = &rep {
            if !(matches!(z.spike(), Spike::Star) && *z.t() == self.eps) {
                break;
            }
            rep = z.fiber().clone();
        }
        LimitPoint { rep }
    }

    /// `pi_n(x)` for `1 <= n <= N`.
    pub fn project(&self, x: &LimitPoint, n: usize) -> Result<LevelPoint> {
        self.level(n)?;
        Ok(self.coordinate(x, n))
    }

    fn coordinate(&self, x: &LimitPoint, n: usize) -> LevelPoint {
        let mut p = x.rep.clone();
        while p.level() > n {
            p = self.bond(&p).expect("level above 1");
        }
        while p.level() < n {
            p = self.lift(&p);
        }
        p
    }

    fn level_distance(&self, n: usize, p: &LevelPoint, q: &LevelPoint) -> Scalar {
        self.level_unchecked(n)
            .distance(p, q)
            .expect("coordinates of valid threads lie on their level")
    }

    fn scaled(&self, n: usize, x: &LimitPoint, u: &LimitPoint) -> Scalar {
        let d = self.level_distance(n, &self.coordinate(x, n), &self.coordinate(u, n));
        d * Scalar::pow2_neg(n as u32)
    }

    fn prefix_max(&self, x: &LimitPoint, u: &LimitPoint, k: usize) -> Scalar {
        (1..=k)
            .map(|n| self.scaled(n, x, u))
            .max()
            .unwrap_or_else(Scalar::zero)
    }

    /// Exact `max_n d_n(x_n, u_n) / 2^n` over the whole thread.
    pub fn limit_distance(&self, x: &LimitPoint, u: &LimitPoint) -> Scalar {
        let top = x.level().max(u.level());
        let prefix = self.prefix_max(x, u, top);
        if self.coordinate(x, top) == self.coordinate(u, top) {
            prefix
        } else {
            std::cmp::max(prefix, Scalar::pow2_neg(top as u32 + 1))
        }
    }

    /// Bounds on `limit_distance` computed from levels `1..=K` only.
    pub fn prefix_enclosure(&self, x: &LimitPoint, u: &LimitPoint, k: usize) -> Result<Enclosure> {
        self.level(k)?;
        let lo = self.prefix_max(x, u, k);
        // Threads that agree at level max(K, M) agree at every level above K.
        let top = k.max(x.level()).max(u.level());
        let hi = if self.coordinate(x, top) == self.coordinate(u, top) {
            lo.clone()
        } else {
            std::cmp::max(lo.clone(), Scalar::pow2_neg(k as u32 + 1))
        };
        Ok(Enclosure { lo, hi })
    }

    pub fn economical_report(&self, sample: &[LimitPoint]) -> EconomicalReport {
        let mut distances = BTreeSet::new();
        for (i, x) in sample.iter().enumerate() {
            for u in &sample[i..] {
                distances.insert(self.limit_distance(x, u));
            }
        }
        let mut scaled_union = BTreeSet::new();
        let mut levels = Vec::new();
        for n in 1..=self.height + 1 {
            let coords: BTreeSet<LevelPoint> =
                sample.iter().map(|x| self.coordinate(x, n)).collect();
            let coords: Vec<LevelPoint> = coords.into_iter().collect();
            let mut level_distances = BTreeSet::new();
            for (i, p) in coords.iter().enumerate() {
                for q in &coords[i..] {
                    level_distances.insert(self.level_distance(n, p, q));
                }
            }
            for d in &level_distances {
                scaled_union.insert(d * Scalar::pow2_neg(n as u32));
            }
            levels.push(LevelCount {
                level: n,
                distinct_points: coords.len(),
                distinct_distances: level_distances.len(),
            });
        }
        let level_sum = levels.iter().map(|l| l.distinct_distances).sum();
        EconomicalReport {
            sample_size: sample.len(),
            distinct_distances: distances.len(),
            sum_bound_holds: distances.len() <= level_sum,
            scaled_inclusion_holds: distances.is_subset(&scaled_union),
            levels,
            level_sum,
        }
    }
}

impl<'a> MetricSpace for Level<'a> {
    type Point = LevelPoint;

    fn distance(&self, p: &LevelPoint, q: &LevelPoint) -> Result<Scalar> {
        if p.level() != self.index || q.level() != self.index {
            return Err(Error::InvalidPoint(format!(
                "expected level-{} points, got levels {} and {}",
                self.index,
                p.level(),
                q.level()
            )));
        }
        match (p, q) {
            (LevelPoint::Base(x), LevelPoint::Base(y)) => self.tower.base.gauge(x, y),
            (LevelPoint::Lift(x), LevelPoint::Lift(y)) => Ok(self
                .tower
                .zspace(self.index - 1)
                .z_distance_truncated(x, y)),
            _ => unreachable!("levels checked above"),
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> LevelPoint {
        if self.index == 1 {
            LevelPoint::Base(self.tower.base.sample(rng))
        } else {
            LevelPoint::Lift(Box::new(self.tower.zspace(self.index - 1).sample(rng)))
        }
    }

    fn describe(&self) -> String {
        format!("level {} of {}", self.index, self.tower.describe())
    }
}

impl MetricSpace for Tower {
    type Point = LimitPoint;

    fn distance(&self, x: &LimitPoint, u: &LimitPoint) -> Result<Scalar> {
        Ok(self.limit_distance(x, u))
    }

    /// A thread whose representative sits at a uniformly drawn level.
    fn sample(&self, rng: &mut ChaCha8Rng) -> LimitPoint {
        let n = rng.gen_range(1..=self.height);
        self.thread(self.level_unchecked(n).sample(rng))
    }

    fn describe(&self) -> String {
        format!(
            "tower(base={}, height={}, eps={})",
            self.base.describe(),
            self.height,
            self.eps
        )
    }
}
