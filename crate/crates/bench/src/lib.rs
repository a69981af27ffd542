//! Benchmark fixtures shared by the criterion benches.

use exotic_core::space::check_rng;
use exotic_core::{BaseSpace, CobwebSpace, MetricSpace, Scalar, Tower, ZSpace};

/// `count` seeded point pairs drawn from `space`.
pub fn pairs<S: MetricSpace>(space: &S, count: usize, seed: u64) -> Vec<(S::Point, S::Point)> {
    let mut rng = check_rng(seed, 0);
    (0..count)
        .map(|_| (space.sample(&mut rng), space.sample(&mut rng)))
        .collect()
}

pub fn cobweb(vortices: u32) -> CobwebSpace<u32> {
    CobwebSpace::new((0..vortices).collect(), Scalar::from_int(2)).expect("valid cobweb")
}

pub fn zcon() -> ZSpace<BaseSpace> {
    ZSpace::new(BaseSpace::unit_interval(), Scalar::from_int(2)).expect("valid construction")
}

pub fn tower(height: usize) -> Tower {
    Tower::new(BaseSpace::unit_interval(), height, Scalar::from_int(2)).expect("valid tower")
}
