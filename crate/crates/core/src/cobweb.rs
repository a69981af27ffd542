//! The cobweb spun over a vortex set: every pair of vortices is joined by a
//! thread of length `eps`, and distance is measured along threads.
//!
//! A point is either a vortex or an interior point `(u, v, t)` of the thread
//! from `u` to `v`, `t` measured from `u`. Only the `u < v` orientation is
//! stored, so structural equality is point equality.
//!
//! Since every vortex hop costs `eps`, a shortest route visits at most two
//! vortices: it leaves the first thread through one endpoint, crosses at most
//! one thread, and enters the second thread through one endpoint. Points on a
//! common thread may also be joined directly. [`cw_distance`] minimises over
//! exactly these routes; [`oracle::shortest_path`] recomputes the value by
//! Dijkstra on the explicit graph.

use std::cmp::Ordering;
use std::fmt;

use rand::seq::index::sample as sample_indices;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{grid_parameter, MetricSpace};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CobwebPoint<V> {
    Vortex(V),
    Inner { u: V, v: V, t: Scalar },
}

impl<V: fmt::Display> fmt::Display for CobwebPoint<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CobwebPoint::Vortex(v) => write!(f, "{v}"),
            CobwebPoint::Inner { u, v, t } => write!(f, "({u}, {v}, {t})"),
        }
    }
}

impl<V: fmt::Display> Serialize for CobwebPoint<V> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<V> CobwebPoint<V> {
    pub fn vortex(&self) -> Option<&V> {
        match self {
            CobwebPoint::Vortex(v) => Some(v),
            CobwebPoint::Inner { .. } => None,
        }
    }
}

/// Builds the canonical point at distance `t` from `u` along the thread `[u, v]`.
pub fn cw_canonicalize<V: Ord>(eps: &Scalar, u: V, v: V, t: Scalar) -> Result<CobwebPoint<V>> {
    if u == v {
        return Err(Error::InvalidPoint("a thread needs two distinct vortices".into()));
    }
    if t.is_negative() || t > *eps {
        return Err(Error::range(
            "thread parameter",
            format!("{t} not in [0, {eps}]"),
        ));
    }
    if t.is_zero() {
        return Ok(CobwebPoint::Vortex(u));
    }
    if t == *eps {
        return Ok(CobwebPoint::Vortex(v));
    }
    Ok(if u < v {
        CobwebPoint::Inner { u, v, t }
    } else {
        CobwebPoint::Inner {
            u: v,
            v: u,
            t: eps - &t,
        }
    })
}

/// Checks the canonical-form invariants of an already built point.
pub fn check_canonical<V: Ord + fmt::Debug>(eps: &Scalar, p: &CobwebPoint<V>) -> Result<()> {
    match p {
        CobwebPoint::Vortex(_) => Ok(()),
        CobwebPoint::Inner { u, v, t } => {
            if u >= v {
                Err(Error::InvalidPoint(format!(
                    "thread ({u:?}, {v:?}) is not oriented low to high"
                )))
            } else if !t.is_positive() || t >= eps {
                Err(Error::range(
                    "thread parameter",
                    format!("{t} not in (0, {eps})"),
                ))
            } else {
                Ok(())
            }
        }
    }
}

/// The vortices a point can leave through, with the cost of reaching each.
fn exits<'a, V>(eps: &Scalar, p: &'a CobwebPoint<V>) -> Vec<(&'a V, Scalar)> {
    match p {
        CobwebPoint::Vortex(v) => vec![(v, Scalar::zero())],
        CobwebPoint::Inner { u, v, t } => vec![(u, t.clone()), (v, eps - t)],
    }
}

fn same_thread<V: PartialEq>(p: &CobwebPoint<V>, q: &CobwebPoint<V>) -> Option<Scalar> {
    match (p, q) {
        (
            CobwebPoint::Inner { u: u1, v: v1, t: t1 },
            CobwebPoint::Inner { u: u2, v: v2, t: t2 },
        ) if u1 == u2 && v1 == v2 => Some((t1 - t2).abs()),
        _ => None,
    }
}

/// Exact intrinsic distance between two canonical cobweb points.
pub fn cw_distance<V: Ord>(eps: &Scalar, p: &CobwebPoint<V>, q: &CobwebPoint<V>) -> Scalar {
    if p == q {
        return Scalar::zero();
    }
    let mut best = same_thread(p, q);
    for (x, cx) in exits(eps, p) {
        for (y, cy) in exits(eps, q) {
            let mut cost = &cx + &cy;
            if x != y {
                cost = cost + eps;
            }
            best = Some(match best {
                Some(b) if b <= cost => b,
                _ => cost,
            });
        }
    }
    best.expect("at least one route exists")
}

/// Breakpoints of a shortest route from `p` to `q`; consecutive breakpoints
/// share a thread. Ties prefer fewer breakpoints, then smaller vortices.
pub fn cw_witness_path<V: Ord + Clone>(
    eps: &Scalar,
    p: &CobwebPoint<V>,
    q: &CobwebPoint<V>,
) -> Vec<CobwebPoint<V>> {
    if p == q {
        return vec![p.clone()];
    }
    let mut candidates: Vec<(Scalar, Vec<CobwebPoint<V>>)> = Vec::new();
    if let Some(d) = same_thread(p, q) {
        candidates.push((d, vec![p.clone(), q.clone()]));
    }
    for (x, cx) in exits(eps, p) {
        for (y, cy) in exits(eps, q) {
            let mut cost = &cx + &cy;
            if x != y {
                cost = cost + eps;
            }
            let mut route = vec![p.clone()];
            for stop in [
                CobwebPoint::Vortex(x.clone()),
                CobwebPoint::Vortex(y.clone()),
                q.clone(),
            ] {
                if route.last() != Some(&stop) {
                    route.push(stop);
                }
            }
            candidates.push((cost, route));
        }
    }
    candidates
        .into_iter()
        .min_by(|(da, ra), (db, rb)| {
            da.cmp(db)
                .then(ra.len().cmp(&rb.len()))
                .then_with(|| route_vortices(ra).cmp(&route_vortices(rb)))
        })
        .map(|(_, route)| route)
        .expect("at least one route exists")
}

fn route_vortices<V>(route: &[CobwebPoint<V>]) -> Vec<&V> {
    route.iter().filter_map(CobwebPoint::vortex).collect()
}

/// Length of a witness route, summing same-thread legs.
pub fn path_length<V: Ord>(eps: &Scalar, route: &[CobwebPoint<V>]) -> Result<Scalar> {
    let mut total = Scalar::zero();
    for leg in route.windows(2) {
        total = total + leg_length(eps, &leg[0], &leg[1])?;
    }
    Ok(total)
}

/// Distance between two points on a common thread, measured along it.
pub fn leg_length<V: Ord>(eps: &Scalar, a: &CobwebPoint<V>, b: &CobwebPoint<V>) -> Result<Scalar> {
    use CobwebPoint::*;
    let apart = || Error::InvalidPoint("route leg does not lie on one thread".into());
    match (a, b) {
        (Vortex(x), Vortex(y)) => Ok(if x == y { Scalar::zero() } else { eps.clone() }),
        (Vortex(x), Inner { u, v, t }) | (Inner { u, v, t }, Vortex(x)) => {
            if x == u {
                Ok(t.clone())
            } else if x == v {
                Ok(eps - t)
            } else {
                Err(apart())
            }
        }
        _ => same_thread(a, b).ok_or_else(apart),
    }
}

/// The vortex closest to `p`, with its distance. Never more than `eps / 2`.
pub fn nearest_vortex<V: Ord + Clone>(eps: &Scalar, p: &CobwebPoint<V>) -> (V, Scalar) {
    exits(eps, p)
        .into_iter()
        .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(b.0)))
        .map(|(v, c)| (v.clone(), c))
        .expect("a point has at least one exit")
}

/// A cobweb over an explicit finite vortex list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CobwebSpace<V> {
    vortices: Vec<V>,
    eps: Scalar,
    steps: u64,
}

impl<V: Ord + Clone + fmt::Debug> CobwebSpace<V> {
    pub fn new(mut vortices: Vec<V>, eps: Scalar) -> Result<Self> {
        if !eps.is_positive() {
            return Err(Error::range("eps", format!("{eps} is not positive")));
        }
        vortices.sort();
        if vortices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("vortex identifiers must be distinct".into()));
        }
        if vortices.len() < 2 {
            return Err(Error::Config("a cobweb needs at least two vortices".into()));
        }
        Ok(CobwebSpace {
            vortices,
            eps,
            steps: 64,
        })
    }

    pub fn with_steps(mut self, steps: u64) -> Self {
        self.steps = steps.max(1);
        self
    }

    pub fn eps(&self) -> &Scalar {
        &self.eps
    }

    pub fn vortices(&self) -> &[V] {
        &self.vortices
    }

    pub fn has_vortex(&self, v: &V) -> bool {
        self.vortices.binary_search(v).is_ok()
    }

    pub fn point(&self, u: V, v: V, t: Scalar) -> Result<CobwebPoint<V>> {
        for x in [&u, &v] {
            if !self.has_vortex(x) {
                return Err(Error::InvalidPoint(format!("unknown vortex {x:?}")));
            }
        }
        cw_canonicalize(&self.eps, u, v, t)
    }

    pub fn validate(&self, p: &CobwebPoint<V>) -> Result<()> {
        check_canonical(&self.eps, p)?;
        let ends: Vec<&V> = match p {
            CobwebPoint::Vortex(v) => vec![v],
            CobwebPoint::Inner { u, v, .. } => vec![u, v],
        };
        match ends.into_iter().find(|v| !self.has_vortex(v)) {
            Some(v) => Err(Error::InvalidPoint(format!("unknown vortex {v:?}"))),
            None => Ok(()),
        }
    }

    pub fn cw_distance(&self, p: &CobwebPoint<V>, q: &CobwebPoint<V>) -> Result<Scalar> {
        self.validate(p)?;
        self.validate(q)?;
        Ok(cw_distance(&self.eps, p, q))
    }

    pub fn cw_witness_path(
        &self,
        p: &CobwebPoint<V>,
        q: &CobwebPoint<V>,
    ) -> Result<Vec<CobwebPoint<V>>> {
        self.validate(p)?;
        self.validate(q)?;
        Ok(cw_witness_path(&self.eps, p, q))
    }

    pub fn cw_distance_oracle(&self, p: &CobwebPoint<V>, q: &CobwebPoint<V>) -> Result<Scalar> {
        oracle::shortest_path(&self.eps, &self.vortices, p, q)
    }
}

impl<V> MetricSpace for CobwebSpace<V>
where
    V: Ord + Clone + fmt::Debug + fmt::Display + Send + Sync,
{
    type Point = CobwebPoint<V>;

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> Result<Scalar> {
        self.cw_distance(p, q)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Point {
        let pick = sample_indices(rng, self.vortices.len(), 2);
        let u = self.vortices[pick.index(0)].clone();
        let v = self.vortices[pick.index(1)].clone();
        let t = grid_parameter(rng, &self.eps, self.steps);
        cw_canonicalize(&self.eps, u, v, t).expect("distinct vortices and t in range")
    }

    fn describe(&self) -> String {
        format!("cobweb(vortices={}, eps={})", self.vortices.len(), self.eps)
    }
}

/// Shortest paths on the explicit thread graph, used to cross-check the
/// closed form.
pub mod oracle {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    use super::*;

    /// Dijkstra over the graph with nodes `{p, q} ∪ vortices`: each vortex
    /// pair is joined at weight `eps`, an interior point is joined to its two
    /// thread endpoints at its parameter costs, and two interior points on a
    /// common thread are also joined directly.
    pub fn shortest_path<V: Ord + fmt::Debug>(
        eps: &Scalar,
        vortices: &[V],
        p: &CobwebPoint<V>,
        q: &CobwebPoint<V>,
    ) -> Result<Scalar> {
        let n = vortices.len();
        let index_of = |v: &V| {
            vortices
                .iter()
                .position(|w| w == v)
                .ok_or_else(|| Error::InvalidPoint(format!("vortex {v:?} outside the universe")))
        };
        let mut adjacency: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); n + 2];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    adjacency[i].push((j, eps.clone()));
                }
            }
        }
        let mut attach = |point: &CobwebPoint<V>, slot: usize| -> Result<usize> {
            match point {
                CobwebPoint::Vortex(v) => index_of(v),
                CobwebPoint::Inner { u, v, t } => {
                    let (iu, iv) = (index_of(u)?, index_of(v)?);
                    for (end, cost) in [(iu, t.clone()), (iv, eps - t)] {
                        adjacency[slot].push((end, cost.clone()));
                        adjacency[end].push((slot, cost));
                    }
                    Ok(slot)
                }
            }
        };
        let source = attach(p, n)?;
        let target = if p == q { source } else { attach(q, n + 1)? };
        if let (
            CobwebPoint::Inner { u: u1, v: v1, t: t1 },
            CobwebPoint::Inner { u: u2, v: v2, t: t2 },
        ) = (p, q)
        {
            if u1 == u2 && v1 == v2 && source != target {
                let d = (t1 - t2).abs();
                adjacency[source].push((target, d.clone()));
                adjacency[target].push((source, d));
            }
        }

        let mut dist: Vec<Option<Scalar>> = vec![None; n + 2];
        let mut heap = BinaryHeap::new();
        dist[source] = Some(Scalar::zero());
        heap.push(Reverse((Scalar::zero(), source)));
        while let Some(Reverse((d, node))) = heap.pop() {
            if node == target {
                return Ok(d);
            }
            if dist[node].as_ref().is_some_and(|best| *best < d) {
                continue;
            }
            for (next, w) in &adjacency[node] {
                let candidate = &d + w;
                let better = match &dist[*next] {
                    None => true,
                    Some(current) => candidate.cmp(current) == Ordering::Less,
                };
                if better {
                    dist[*next] = Some(candidate.clone());
                    heap.push(Reverse((candidate, *next)));
                }
            }
        }
        Err(Error::InvalidPoint("target unreachable".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> Scalar {
        Scalar::from_int(2)
    }

    fn inner(u: u32, v: u32, t: Scalar) -> CobwebPoint<u32> {
        cw_canonicalize(&two(), u, v, t).unwrap()
    }

    #[test]
    fn canonical_forms() {
        let eps = two();
        assert_eq!(
            cw_canonicalize(&eps, 1u32, 2, Scalar::zero()).unwrap(),
            CobwebPoint::Vortex(1)
        );
        assert_eq!(
            cw_canonicalize(&eps, 1u32, 2, eps.clone()).unwrap(),
            CobwebPoint::Vortex(2)
        );
        assert_eq!(
            cw_canonicalize(&eps, 5u32, 3, Scalar::ratio(1, 2)).unwrap(),
            CobwebPoint::Inner {
                u: 3,
                v: 5,
                t: Scalar::ratio(3, 2)
            }
        );
        assert!(cw_canonicalize(&eps, 1u32, 1, Scalar::one()).is_err());
        assert!(cw_canonicalize(&eps, 1u32, 2, Scalar::from_int(3)).is_err());
        let p = inner(0, 1, Scalar::ratio(1, 3));
        if let CobwebPoint::Inner { u, v, t } = p.clone() {
            assert_eq!(cw_canonicalize(&eps, u, v, t).unwrap(), p);
        }
    }

    #[test]
    fn closed_form_examples() {
        let eps = two();
        assert_eq!(
            cw_distance(&eps, &CobwebPoint::Vortex(0u32), &CobwebPoint::Vortex(1)),
            eps
        );
        let a = inner(0, 1, Scalar::ratio(1, 2));
        let b = inner(0, 1, Scalar::ratio(3, 2));
        assert_eq!(cw_distance(&eps, &a, &b), Scalar::one());

        // u=0, v=1, w=2: leaving near v and entering near w beats going through u.
        let p = inner(0, 1, Scalar::ratio(19, 10));
        let q = inner(0, 2, Scalar::ratio(19, 10));
        assert_eq!(cw_distance(&eps, &p, &q), Scalar::ratio(11, 5));

        let p = inner(0, 1, Scalar::one());
        let q = inner(2, 3, Scalar::one());
        assert_eq!(cw_distance(&eps, &p, &q), Scalar::from_int(4));
    }

    #[test]
    fn oracle_agrees_on_examples() {
        let eps = two();
        let universe: Vec<u32> = (0..4).collect();
        let cases = [
            (inner(0, 1, Scalar::ratio(1, 2)), inner(0, 1, Scalar::ratio(3, 2)), Scalar::one()),
            (
                inner(0, 1, Scalar::ratio(19, 10)),
                inner(0, 2, Scalar::ratio(19, 10)),
                Scalar::ratio(11, 5),
            ),
            (inner(0, 1, Scalar::one()), inner(2, 3, Scalar::one()), Scalar::from_int(4)),
            (CobwebPoint::Vortex(0), CobwebPoint::Vortex(3), eps.clone()),
        ];
        for (p, q, expected) in cases {
            assert_eq!(oracle::shortest_path(&eps, &universe, &p, &q).unwrap(), expected);
        }
        let p = inner(1, 2, Scalar::ratio(1, 7));
        assert_eq!(oracle::shortest_path(&eps, &universe, &p, &p).unwrap(), Scalar::zero());
        assert!(oracle::shortest_path(&eps, &universe, &p, &CobwebPoint::Vortex(9)).is_err());
    }

    #[test]
    fn witness_paths() {
        let eps = two();
        let p = inner(0, 1, Scalar::ratio(19, 10));
        assert_eq!(cw_witness_path(&eps, &p, &p), vec![p.clone()]);
        let same = inner(0, 1, Scalar::ratio(1, 2));
        assert_eq!(cw_witness_path(&eps, &p, &same), vec![p.clone(), same.clone()]);
        let q = inner(0, 2, Scalar::ratio(19, 10));
        assert_eq!(
            cw_witness_path(&eps, &p, &q),
            vec![p.clone(), CobwebPoint::Vortex(1), CobwebPoint::Vortex(2), q.clone()]
        );
        let route = cw_witness_path(&eps, &p, &q);
        assert_eq!(path_length(&eps, &route).unwrap(), Scalar::ratio(11, 5));
    }

    #[test]
    fn witness_tie_break_prefers_smaller_vortices() {
        let eps = two();
        // Midpoints of disjoint threads: all four endpoint pairs cost 4.
        let p = inner(0, 1, Scalar::one());
        let q = inner(2, 3, Scalar::one());
        assert_eq!(
            cw_witness_path(&eps, &p, &q),
            vec![p.clone(), CobwebPoint::Vortex(0), CobwebPoint::Vortex(2), q.clone()]
        );
    }

    #[test]
    fn nearest_vortex_is_within_half_eps() {
        let eps = two();
        let p = inner(0, 1, Scalar::ratio(3, 2));
        assert_eq!(nearest_vortex(&eps, &p), (1, Scalar::ratio(1, 2)));
        assert_eq!(nearest_vortex(&eps, &inner(0, 1, Scalar::one())).0, 0);
    }

    #[test]
    fn space_validation() {
        let s = CobwebSpace::new(vec![0u32, 1, 2], two()).unwrap();
        assert!(s.point(0, 7, Scalar::one()).is_err());
        let bad = CobwebPoint::Inner {
            u: 1u32,
            v: 0,
            t: Scalar::one(),
        };
        assert!(s.cw_distance(&bad, &bad).is_err());
        assert!(CobwebSpace::new(vec![0u32, 0], two()).is_err());
        assert!(CobwebSpace::new(vec![0u32, 1], Scalar::zero()).is_err());
    }
}
