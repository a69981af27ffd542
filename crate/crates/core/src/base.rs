//! Base metric spaces fed into the Z-construction: rationals in the unit
//! interval, finite subsets of the positive integers with the Cantor
//! ultrametric, and finite spaces given by a distance table.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{grid_unit, MetricSpace};

/// Default denominator bound for sampled rationals.
pub const DEFAULT_GRID: u64 = 1 << 16;
/// Default largest element of sampled Cantor sets.
pub const DEFAULT_UNIVERSE: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseSpace {
    /// Rationals in `[0, 1]` with `|p - q|`; samples have denominator `<= grid`.
    UnitInterval { grid: u64 },
    /// Finite subsets of `{1, 2, ...}`; samples draw from `{1..=universe}`.
    Cantor { universe: u32 },
    /// A finite space given by a symmetric distance table.
    Discrete {
        labels: Vec<String>,
        table: Vec<Vec<Scalar>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasePoint {
    Rational(Scalar),
    Set(BTreeSet<u32>),
    Index(usize),
}

impl BasePoint {
    pub fn rational(num: i64, den: i64) -> Self {
        BasePoint::Rational(Scalar::ratio(num, den))
    }

    pub fn set(elements: impl IntoIterator<Item = u32>) -> Self {
        BasePoint::Set(elements.into_iter().collect())
    }
}

impl fmt::Display for BasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasePoint::Rational(r) => write!(f, "{r}"),
            BasePoint::Set(s) => {
                f.write_str("{")?;
                for (i, n) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{n}")?;
                }
                f.write_str("}")
            }
            BasePoint::Index(i) => write!(f, "#{i}"),
        }
    }
}

/// `1 / min((A \ B) ∪ (B \ A))`, or zero when `A = B`.
pub fn cantor_distance(a: &BTreeSet<u32>, b: &BTreeSet<u32>) -> Scalar {
    match a.symmetric_difference(b).min() {
        None => Scalar::zero(),
        Some(&n) => Scalar::ratio(1, i64::from(n)),
    }
}

impl BaseSpace {
    pub fn unit_interval() -> Self {
        BaseSpace::UnitInterval { grid: DEFAULT_GRID }
    }

    pub fn cantor() -> Self {
        BaseSpace::Cantor {
            universe: DEFAULT_UNIVERSE,
        }
    }

    /// A finite space; the table must be square and satisfy the metric axioms.
    pub fn discrete(table: Vec<Vec<Scalar>>) -> Result<Self> {
        let space = Self::discrete_unchecked(table)?;
        if let BaseSpace::Discrete { table, .. } = &space {
            check_table(table)?;
        }
        Ok(space)
    }

    /// A finite space whose table is only checked for shape. Used for
    /// deliberately corrupted negative controls.
    pub fn discrete_unchecked(table: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Config("distance table is empty".into()));
        }
        if let Some(row) = table.iter().position(|r| r.len() != n) {
            return Err(Error::Config(format!(
                "distance table row {row} has {} entries, expected {n}",
                table[row].len()
            )));
        }
        let labels = (0..n).map(|i| i.to_string()).collect();
        Ok(BaseSpace::Discrete { labels, table })
    }

    pub fn with_labels(self, labels: Vec<String>) -> Result<Self> {
        match self {
            BaseSpace::Discrete { table, .. } => {
                if labels.len() != table.len() {
                    return Err(Error::Config(format!(
                        "{} labels for {} points",
                        labels.len(),
                        table.len()
                    )));
                }
                Ok(BaseSpace::Discrete { labels, table })
            }
            other => Ok(other),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            BaseSpace::UnitInterval { .. } => "unit",
            BaseSpace::Cantor { .. } => "cantor",
            BaseSpace::Discrete { .. } => "discrete",
        }
    }

    pub fn contains(&self, p: &BasePoint) -> Result<()> {
        match (self, p) {
            (BaseSpace::UnitInterval { .. }, BasePoint::Rational(r)) => {
                if r.is_negative() || *r > Scalar::one() {
                    Err(Error::range("unit interval point", r.to_string()))
                } else {
                    Ok(())
                }
            }
            (BaseSpace::Cantor { .. }, BasePoint::Set(s)) => {
                if s.contains(&0) {
                    Err(Error::InvalidPoint(
                        "Cantor sets contain positive integers only".into(),
                    ))
                } else {
                    Ok(())
                }
            }
            (BaseSpace::Discrete { table, .. }, BasePoint::Index(i)) => {
                if *i < table.len() {
                    Ok(())
                } else {
                    Err(Error::range(
                        "point index",
                        format!("{i} >= {}", table.len()),
                    ))
                }
            }
            _ => Err(Error::KindMismatch {
                expected: self.kind_name(),
            }),
        }
    }

    pub fn base_distance(&self, p: &BasePoint, q: &BasePoint) -> Result<Scalar> {
        self.contains(p)?;
        self.contains(q)?;
        Ok(match (self, p, q) {
            (BaseSpace::UnitInterval { .. }, BasePoint::Rational(x), BasePoint::Rational(y)) => {
                (x - y).abs()
            }
            (BaseSpace::Cantor { .. }, BasePoint::Set(a), BasePoint::Set(b)) => {
                cantor_distance(a, b)
            }
            (BaseSpace::Discrete { table, .. }, BasePoint::Index(i), BasePoint::Index(j)) => {
                table[*i][*j].clone()
            }
            _ => unreachable!("membership checked above"),
        })
    }

    /// The first-countability gauge realized as the metric truncated at one.
    pub fn gauge(&self, x: &BasePoint, u: &BasePoint) -> Result<Scalar> {
        Ok(self.base_distance(x, u)?.truncated())
    }

    /// The same space with every distance replaced by `min(d, 1)`.
    pub fn truncate(&self) -> BaseSpace {
        match self {
            BaseSpace::Discrete { labels, table } => BaseSpace::Discrete {
                labels: labels.clone(),
                table: table
                    .iter()
                    .map(|row| row.iter().map(Scalar::truncated).collect())
                    .collect(),
            },
            other => other.clone(),
        }
    }

    /// Resolves a discrete point label to its index.
    pub fn label_index(&self, label: &str) -> Option<usize> {
        match self {
            BaseSpace::Discrete { labels, .. } => labels.iter().position(|l| l == label),
            _ => None,
        }
    }

    /// Every violation of the metric axioms in a distance table, one line each.
    pub fn table_violations(table: &[Vec<Scalar>]) -> Vec<String> {
        let n = table.len();
        let mut out = Vec::new();
        for i in 0..n {
            if !table[i][i].is_zero() {
                out.push(format!("d({i},{i}) = {} is not zero", table[i][i]));
            }
            for j in 0..n {
                if i != j && !table[i][j].is_positive() {
                    out.push(format!("d({i},{j}) = {} is not positive", table[i][j]));
                }
                if i < j && table[i][j] != table[j][i] {
                    out.push(format!(
                        "d({i},{j}) = {} but d({j},{i}) = {}",
                        table[i][j], table[j][i]
                    ));
                }
                for k in 0..n {
                    if table[i][k] > &table[i][j] + &table[j][k] {
                        out.push(format!(
                            "d({i},{k}) = {} exceeds d({i},{j}) + d({j},{k}) = {}",
                            table[i][k],
                            &table[i][j] + &table[j][k]
                        ));
                    }
                }
            }
        }
        out
    }
}

fn check_table(table: &[Vec<Scalar>]) -> Result<()> {
    match BaseSpace::table_violations(table).into_iter().next() {
        None => Ok(()),
        Some(v) => Err(Error::NotAMetric(v)),
    }
}

impl MetricSpace for BaseSpace {
    type Point = BasePoint;

    fn distance(&self, p: &BasePoint, q: &BasePoint) -> Result<Scalar> {
        self.base_distance(p, q)
    }

    fn gauge(&self, p: &BasePoint, q: &BasePoint) -> Result<Scalar> {
        BaseSpace::gauge(self, p, q)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> BasePoint {
        match self {
            BaseSpace::UnitInterval { grid } => BasePoint::Rational(grid_unit(rng, *grid)),
            BaseSpace::Cantor { universe } => {
                BasePoint::Set((1..=*universe).filter(|_| rng.gen_bool(0.5)).collect())
            }
            BaseSpace::Discrete { table, .. } => BasePoint::Index(rng.gen_range(0..table.len())),
        }
    }

    fn describe(&self) -> String {
        match self {
            BaseSpace::UnitInterval { grid } => format!("unit-interval(grid={grid})"),
            BaseSpace::Cantor { universe } => format!("cantor(universe={universe})"),
            BaseSpace::Discrete { table, .. } => format!("discrete(n={})", table.len()),
        }
    }

    fn is_ultrametric(&self) -> bool {
        matches!(self, BaseSpace::Cantor { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[&[(i64, i64)]]) -> Vec<Vec<Scalar>> {
        rows.iter()
            .map(|r| r.iter().map(|&(p, q)| Scalar::ratio(p, q)).collect())
            .collect()
    }

    #[test]
    fn unit_interval_distances() {
        let s = BaseSpace::unit_interval();
        let third = BasePoint::rational(1, 3);
        assert_eq!(s.base_distance(&third, &third).unwrap(), Scalar::zero());
        assert_eq!(
            s.base_distance(&BasePoint::rational(0, 1), &BasePoint::rational(3, 4))
                .unwrap(),
            Scalar::ratio(3, 4)
        );
    }

    #[test]
    fn discrete_lookup_and_gauge() {
        let s = BaseSpace::discrete(table(&[&[(0, 1), (1, 2)], &[(1, 2), (0, 1)]])).unwrap();
        let d = s
            .base_distance(&BasePoint::Index(0), &BasePoint::Index(1))
            .unwrap();
        assert_eq!(d, Scalar::ratio(1, 2));

        let far = BaseSpace::discrete(table(&[&[(0, 1), (5, 2)], &[(5, 2), (0, 1)]])).unwrap();
        assert_eq!(
            far.gauge(&BasePoint::Index(0), &BasePoint::Index(1)).unwrap(),
            Scalar::one()
        );
        assert_eq!(
            far.gauge(&BasePoint::Index(1), &BasePoint::Index(1)).unwrap(),
            Scalar::zero()
        );
    }

    #[test]
    fn cantor_formula() {
        let d = |a: &[u32], b: &[u32]| {
            cantor_distance(&a.iter().copied().collect(), &b.iter().copied().collect())
        };
        assert_eq!(d(&[1], &[2]), Scalar::one());
        assert_eq!(d(&[1, 2], &[1, 3]), Scalar::ratio(1, 2));
        assert_eq!(d(&[4, 5], &[4, 5]), Scalar::zero());
        assert_eq!(d(&[], &[7]), Scalar::ratio(1, 7));
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let s = BaseSpace::unit_interval();
        assert_eq!(
            s.base_distance(&BasePoint::Index(0), &BasePoint::rational(1, 2)),
            Err(Error::KindMismatch { expected: "unit" })
        );
        assert!(s.contains(&BasePoint::rational(3, 2)).is_err());
        assert!(BaseSpace::cantor().contains(&BasePoint::set([0, 1])).is_err());
    }

    #[test]
    fn truncation() {
        assert_eq!(BaseSpace::unit_interval().truncate(), BaseSpace::unit_interval());
        let s = BaseSpace::discrete(table(&[&[(0, 1), (3, 1)], &[(3, 1), (0, 1)]]))
            .unwrap()
            .truncate();
        match &s {
            BaseSpace::Discrete { table, .. } => {
                assert_eq!(table[0][1], Scalar::one());
                assert_eq!(table[0][0], Scalar::zero());
            }
            _ => unreachable!(),
        }
        assert!(BaseSpace::table_violations(match &s {
            BaseSpace::Discrete { table, .. } => table,
            _ => unreachable!(),
        })
        .is_empty());
    }

    #[test]
    fn corrupted_tables_are_rejected() {
        // d(0,2) = 3 > d(0,1) + d(1,2) = 2
        let bad = table(&[
            &[(0, 1), (1, 1), (3, 1)],
            &[(1, 1), (0, 1), (1, 1)],
            &[(3, 1), (1, 1), (0, 1)],
        ]);
        assert!(matches!(
            BaseSpace::discrete(bad.clone()),
            Err(Error::NotAMetric(_))
        ));
        assert!(BaseSpace::discrete_unchecked(bad).is_ok());
        let asym = table(&[&[(0, 1), (1, 1)], &[(2, 1), (0, 1)]]);
        assert!(BaseSpace::discrete(asym).is_err());
        assert!(BaseSpace::discrete(vec![vec![Scalar::zero()], vec![]]).is_err());
    }

    #[test]
    fn cantor_strong_triangle_on_all_subsets_of_four() {
        let sets: Vec<BTreeSet<u32>> = (0u32..16)
            .map(|m| (1..=4).filter(|i| m & (1 << (i - 1)) != 0).collect())
            .collect();
        for a in &sets {
            for b in &sets {
                for c in &sets {
                    let ac = cantor_distance(a, c);
                    let ab = cantor_distance(a, b);
                    let bc = cantor_distance(b, c);
                    assert!(ac <= std::cmp::max(ab, bc));
                }
            }
        }
    }

    #[test]
    fn display_forms() {
        assert_eq!(BasePoint::set([3, 1]).to_string(), "{1,3}");
        assert_eq!(BasePoint::set([]).to_string(), "{}");
        assert_eq!(BasePoint::rational(2, 4).to_string(), "1/2");
        assert_eq!(BasePoint::Index(2).to_string(), "#2");
    }
}
