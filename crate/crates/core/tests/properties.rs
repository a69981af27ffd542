use std::collections::BTreeSet;

use exotic_core::base::cantor_distance;
use exotic_core::cobweb::{cw_canonicalize, cw_distance, oracle};
use exotic_core::extremal::EVortex;
use exotic_core::lit;
use exotic_core::space::check_rng;
use exotic_core::zcon::ZVortex;
use exotic_core::{
    BaseSpace, CobwebPoint, CobwebSpace, ExtremalSpace, HedgehogSpace, LimitPoint, MetricSpace, Scalar, Tower,
    ZSpace,
};
use proptest::prelude::*;

/// A coarse grid makes coincident fibers and shared vortices common.
fn coarse_base() -> BaseSpace {
    BaseSpace::UnitInterval { grid: 4 }
}

fn zspace() -> ZSpace<BaseSpace> {
    ZSpace::new(coarse_base(), Scalar::from_int(2)).unwrap().with_steps(8)
}

fn tower() -> Tower {
    Tower::new(coarse_base(), 3, Scalar::from_int(2)).unwrap().with_steps(4)
}

fn triple<S: MetricSpace>(space: &S, seed: u64) -> [S::Point; 3] {
    let mut rng = check_rng(seed, 0);
    [space.sample(&mut rng), space.sample(&mut rng), space.sample(&mut rng)]
}

fn assert_axioms<S: MetricSpace>(space: &S, seed: u64) -> Result<(), TestCaseError>
where
    S::Point: PartialEq + std::fmt::Debug,
{
    let [x, y, z] = triple(space, seed);
    let d = |p: &S::Point, q: &S::Point| space.distance(p, q).unwrap();
    prop_assert!(d(&x, &x).is_zero());
    prop_assert!(!d(&x, &y).is_negative());
    prop_assert_eq!(d(&x, &y).is_zero(), x == y, "{:?} {:?}", x, y);
    prop_assert_eq!(d(&x, &y), d(&y, &x));
    prop_assert!(d(&x, &z) <= &d(&x, &y) + &d(&y, &z));
    Ok(())
}

fn eps_choice() -> impl Strategy<Value = Scalar> {
    prop_oneof![Just(Scalar::one()), Just(Scalar::ratio(3, 2)), Just(Scalar::from_int(2))]
}

/// A cobweb point on `0..n` vortices; `t` runs over `[0, eps]` in steps of `eps / 16`.
fn cobweb_point(n: u32) -> impl Strategy<Value = (u32, u32, u32)> {
    (0..n, 0..n, 0u32..=16)
}

fn build(eps: &Scalar, (u, v, k): (u32, u32, u32)) -> CobwebPoint<u32> {
    let t = eps * &Scalar::ratio(i64::from(k), 16);
    if u == v {
        CobwebPoint::Vortex(u)
    } else {
        cw_canonicalize(eps, u, v, t).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn scalar_text_round_trips(num in -10_000i64..10_000, den in 1i64..10_000) {
        let s = Scalar::ratio(num, den);
        let text = s.to_string();
        prop_assert_eq!(text.parse::<Scalar>().unwrap(), s.clone());
        let (p, q) = text.split_once('/').unwrap();
        let q: i64 = q.parse().unwrap();
        prop_assert!(q > 0);
        prop_assert_eq!(gcd(p.parse::<i64>().unwrap().abs(), q), 1);
    }

    #[test]
    fn hedgehog_axioms(seed in any::<u64>(), spikes in 1u32..6) {
        let space = HedgehogSpace::new(spikes, Scalar::one()).unwrap().with_steps(4);
        assert_axioms(&space, seed)?;
    }

    #[test]
    fn cobweb_axioms(seed in any::<u64>(), n in 2u32..6) {
        let space = CobwebSpace::new((0..n).collect(), Scalar::ratio(3, 2)).unwrap().with_steps(4);
        assert_axioms(&space, seed)?;
    }

    #[test]
    fn zcon_axioms(seed in any::<u64>()) {
        assert_axioms(&zspace(), seed)?;
    }

    #[test]
    fn extremal_axioms(seed in any::<u64>()) {
        assert_axioms(&ExtremalSpace::new(4).with_steps(8), seed)?;
    }

    #[test]
    fn tower_axioms(seed in any::<u64>()) {
        assert_axioms(&tower(), seed)?;
    }

    #[test]
    fn cantor_is_ultrametric(
        a in prop::collection::btree_set(1u32..8, 0..6),
        b in prop::collection::btree_set(1u32..8, 0..6),
        c in prop::collection::btree_set(1u32..8, 0..6),
    ) {
        let (ab, bc, ac) = (cantor_distance(&a, &b), cantor_distance(&b, &c), cantor_distance(&a, &c));
        prop_assert!(ac <= std::cmp::max(ab, bc));
    }

    #[test]
    fn cobweb_closed_form_matches_shortest_paths(
        eps in eps_choice(),
        n in 2u32..8,
        raw in (cobweb_point(8), cobweb_point(8)),
    ) {
        let clamp = |(u, v, k): (u32, u32, u32)| (u % n, v % n, k);
        let (p, q) = (build(&eps, clamp(raw.0)), build(&eps, clamp(raw.1)));
        let vortices: Vec<u32> = (0..n).collect();
        prop_assert_eq!(
            cw_distance(&eps, &p, &q),
            oracle::shortest_path(&eps, &vortices, &p, &q).unwrap()
        );
    }

    #[test]
    fn zcon_distance_is_the_shortest_path_in_the_ambient_cobweb(seed in any::<u64>()) {
        let z = zspace();
        let [p, q, extra] = triple(&z, seed);
        let (ep, eq) = (z.z_embed(&p), z.z_embed(&q));
        let mut vortices = BTreeSet::new();
        for point in [&ep, &eq, &z.z_embed(&extra)] {
            vortices.extend(ends(point));
        }
        vortices.insert(ZVortex::Star(extra.fiber().clone()));
        let vortices: Vec<_> = vortices.into_iter().collect();
        prop_assert_eq!(z.z_distance(&p, &q), oracle::shortest_path(z.eps(), &vortices, &ep, &eq).unwrap());
    }

    #[test]
    fn extremal_distance_is_the_shortest_path_in_the_ambient_cobweb(seed in any::<u64>()) {
        let e = ExtremalSpace::new(4).with_steps(8);
        let [p, q, extra] = triple(&e, seed);
        let (ep, eq) = (e.e_embed(&p), e.e_embed(&q));
        let mut vortices = BTreeSet::new();
        for point in [&ep, &eq, &e.e_embed(&extra)] {
            vortices.extend(ends(point));
        }
        vortices.insert(EVortex::Down(extra.fiber().clone()));
        let vortices: Vec<_> = vortices.into_iter().collect();
        prop_assert_eq!(e.e_distance(&p, &q), oracle::shortest_path(&Scalar::one(), &vortices, &ep, &eq).unwrap());
    }

    #[test]
    fn tower_distance_is_the_levelwise_maximum(seed in any::<u64>()) {
        let t = tower();
        let [x, u, _] = triple(&t, seed);
        prop_assert_eq!(t.limit_distance(&x, &u), levelwise_max(&t, &x, &u));
    }

    #[test]
    fn literals_round_trip(seed in any::<u64>()) {
        let z = ZSpace::new(BaseSpace::unit_interval(), Scalar::from_int(2)).unwrap();
        let e = ExtremalSpace::new(1 << 10);
        let t = Tower::new(BaseSpace::unit_interval(), 3, Scalar::from_int(2)).unwrap();
        let mut rng = check_rng(seed, 0);
        let zp = z.sample(&mut rng);
        prop_assert_eq!(lit::parse_zpoint(&z, &zp.to_string()).unwrap(), zp);
        let ep = e.sample(&mut rng);
        prop_assert_eq!(lit::parse_epoint(&e, &ep.to_string()).unwrap(), ep);
        let tp = t.sample(&mut rng);
        prop_assert_eq!(lit::parse_limit_point(&t, &tp.to_string()).unwrap(), tp);
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn ends<V: Clone>(p: &CobwebPoint<V>) -> Vec<V> {
    match p {
        CobwebPoint::Vortex(v) => vec![v.clone()],
        CobwebPoint::Inner { u, v, .. } => vec![u.clone(), v.clone()],
    }
}

/// `max_n d_n(pi_n x, pi_n u) / 2^n` over the stored levels, plus the star
/// tail above the height, where distinct coordinates sit at truncated distance one.
fn levelwise_max(t: &Tower, x: &LimitPoint, u: &LimitPoint) -> Scalar {
    let height = t.height();
    let mut best = Scalar::zero();
    for n in 1..=height {
        let (xn, un) = (t.project(x, n).unwrap(), t.project(u, n).unwrap());
        let d = t.level(n).unwrap().distance(&xn, &un).unwrap() * Scalar::pow2_neg(n as u32);
        best = std::cmp::max(best, d);
    }
    if t.project(x, height).unwrap() != t.project(u, height).unwrap() {
        best = std::cmp::max(best, Scalar::pow2_neg(height as u32 + 1));
    }
    best
}
