//! Integer partitions, the multiplicity calculus on them, and dominance order.
//!
//! A partition is stored as its nonincreasing list of positive parts. The
//! multiplicity view `λ = (1^{m_1} 2^{m_2} ...)` is derived on demand and is
//! what the multiset operations (`⊂'`, `\`, `∪`, multiplicity binomials) act
//! on.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("parts must be positive and nonincreasing, got {0:?}")]
    Invalid(Vec<u32>),
    #[error("cannot parse partition `{0}`")]
    Parse(String),
    #[error("partitions have different weights ({0} vs {1})")]
    WeightMismatch(u32, u32),
    #[error("{sub} is not contained in {sup} by multiplicity")]
    NotContained { sub: Partition, sup: Partition },
}

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

/// Outcome of comparing two partitions of the same weight in dominance order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dominance {
    Greater,
    Less,
    Equal,
    Incomparable,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, PartitionError> {
        if parts.iter().any(|&p| p == 0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(PartitionError::Invalid(parts));
        }
        Ok(Partition { parts })
    }

    /// Sorts the parts and drops zeros.
    pub fn from_unsorted(parts: impl IntoIterator<Item = u32>) -> Self {
        let mut parts: Vec<u32> = parts.into_iter().filter(|&p| p > 0).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition::default()
    }

    /// `(part^count)`.
    pub fn rectangle(part: u32, count: usize) -> Self {
        Partition::from_unsorted(std::iter::repeat_n(part, count))
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn multiplicity(&self, part: u32) -> u32 {
        self.parts.iter().filter(|&&p| p == part).count() as u32
    }

    pub fn multiplicities(&self) -> BTreeMap<u32, u32> {
        let mut m = BTreeMap::new();
        for &p in &self.parts {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    /// `z_λ = ∏ i^{m_i} m_i!`.
    pub fn z(&self) -> BigInt {
        let mut acc = BigInt::one();
        for (part, mult) in self.multiplicities() {
            for k in 1..=mult {
                acc *= BigInt::from(part) * BigInt::from(k);
            }
        }
        acc
    }

    pub fn dominance_cmp(&self, other: &Partition) -> Result<Dominance, PartitionError> {
        let (w1, w2) = (self.weight(), other.weight());
        if w1 != w2 {
            return Err(PartitionError::WeightMismatch(w1, w2));
        }
        if self == other {
            return Ok(Dominance::Equal);
        }
        let (mut ge, mut le) = (true, true);
        let (mut s1, mut s2) = (0u32, 0u32);
        for i in 0..self.len().max(other.len()) {
            s1 += self.parts.get(i).copied().unwrap_or(0);
            s2 += other.parts.get(i).copied().unwrap_or(0);
            ge &= s1 >= s2;
            le &= s1 <= s2;
        }
        Ok(match (ge, le) {
            (true, false) => Dominance::Greater,
            (false, true) => Dominance::Less,
            (false, false) => Dominance::Incomparable,
            (true, true) => unreachable!("equal partial sums imply equal partitions"),
        })
    }

    /// `self ≥ other` in dominance order; false for different weights.
    pub fn dominates(&self, other: &Partition) -> bool {
        matches!(
            self.dominance_cmp(other),
            Ok(Dominance::Greater | Dominance::Equal)
        )
    }

    /// `sub ⊂' self`: every multiplicity of `sub` is at most that of `self`.
    pub fn mult_contains(&self, sub: &Partition) -> bool {
        let mine = self.multiplicities();
        sub.multiplicities()
            .into_iter()
            .all(|(p, n)| mine.get(&p).copied().unwrap_or(0) >= n)
    }

    /// `self \ sub`, subtracting multiplicities.
    pub fn mult_diff(&self, sub: &Partition) -> Result<Partition, PartitionError> {
        if !self.mult_contains(sub) {
            return Err(PartitionError::NotContained {
                sub: sub.clone(),
                sup: self.clone(),
            });
        }
        let mut remove = sub.multiplicities();
        let mut parts = Vec::with_capacity(self.len() - sub.len());
        for &p in &self.parts {
            match remove.get_mut(&p) {
                Some(n) if *n > 0 => *n -= 1,
                _ => parts.push(p),
            }
        }
        Ok(Partition { parts })
    }

    /// `self ∪ other`, adding multiplicities.
    pub fn mult_union(&self, other: &Partition) -> Partition {
        let mut parts = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.len() || j < other.len() {
            let take_self = match (self.parts.get(i), other.parts.get(j)) {
                (Some(a), Some(b)) => a >= b,
                (Some(_), None) => true,
                _ => false,
            };
            if take_self {
                parts.push(self.parts[i]);
                i += 1;
            } else {
                parts.push(other.parts[j]);
                j += 1;
            }
        }
        Partition { parts }
    }

    /// `binom(m(self), m(sub)) = ∏_i binom(m_i, n_i)`; zero unless `sub ⊂' self`.
    pub fn mult_binomial(&self, sub: &Partition) -> BigInt {
        let mine = self.multiplicities();
        let mut acc = BigInt::one();
        for (p, n) in sub.multiplicities() {
            let m = mine.get(&p).copied().unwrap_or(0);
            if n > m {
                return BigInt::zero();
            }
            acc *= binomial(m, n);
        }
        acc
    }

    /// All `μ` with `μ ⊂' self`, including the empty partition and `self`.
    pub fn mult_subsets(&self) -> Vec<Partition> {
        let mults: Vec<(u32, u32)> = self.multiplicities().into_iter().rev().collect();
        let mut out = vec![Vec::new()];
        for (part, m) in mults {
            let mut next = Vec::with_capacity(out.len() * (m as usize + 1));
            for prefix in &out {
                for k in 0..=m {
                    let mut v: Vec<u32> = prefix.clone();
                    v.extend(std::iter::repeat_n(part, k as usize));
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(|parts| Partition { parts }).collect()
    }

    /// Parts padded with zeros (or truncated) to `len` entries.
    pub fn padded(&self, len: usize) -> Vec<u32> {
        let mut v = self.parts.clone();
        v.resize(len, 0);
        v
    }
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Graded reverse-lexicographic order: smaller weight first, then larger
/// parts first, so `(3) < (2,1) < (1,1,1)`.
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| other.parts.cmp(&self.parts))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = PartitionError;

    fn try_from(parts: Vec<u32>) -> Result<Self, Self::Error> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("()");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            f.write_str("()")
        } else {
            write!(f, "({self})")
        }
    }
}

impl FromStr for Partition {
    type Err = PartitionError;

    /// Accepts `"3,2,1"` and `"()"` for the empty partition.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "()" {
            return Ok(Partition::empty());
        }
        let t = t
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .unwrap_or(t);
        if t.trim().is_empty() {
            return Err(PartitionError::Parse(s.to_string()));
        }
        let parts = t
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| PartitionError::Parse(s.to_string()))?;
        Partition::new(parts)
    }
}

/// All partitions of `n` (optionally with at most `max_len` parts) in
/// graded reverse-lexicographic order.
pub fn partitions_of(n: u32, max_len: Option<usize>) -> Vec<Partition> {
    fn go(rest: u32, max_part: u32, len_left: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        if len_left == 0 {
            return;
        }
        for p in (1..=max_part.min(rest)).rev() {
            cur.push(p);
            go(rest - p, p, len_left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, max_len.unwrap_or(usize::MAX), &mut Vec::new(), &mut out);
    out
}

/// Memoized [`partitions_of`] without a length bound.
pub fn partitions_cached(n: u32) -> Arc<Vec<Partition>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<Partition>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.read().expect("partition cache poisoned").get(&n) {
        return v.clone();
    }
    let v = Arc::new(partitions_of(n, None));
    cache
        .write()
        .expect("partition cache poisoned")
        .entry(n)
        .or_insert(v)
        .clone()
}

/// `((k+1)^s, k^t)`, with zero parts dropped.
pub fn near_rectangle(k: u32, s: usize, t: usize) -> Partition {
    Partition::from_unsorted(
        std::iter::repeat_n(k + 1, s).chain(std::iter::repeat_n(k, t)),
    )
}

/// Brute-force check that every partition `μ` of the same weight as
/// `λ = ((k+1)^s, k^t)` with at most `s + t` parts dominates `λ`.
pub fn near_rectangle_dominance_check(k: u32, s: usize, t: usize) -> bool {
    let lambda = near_rectangle(k, s, t);
    partitions_of(lambda.weight(), Some(s + t))
        .iter()
        .all(|mu| mu.dominates(&lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn z_values() {
        assert_eq!(Partition::empty().z(), BigInt::from(1));
        assert_eq!(p("2,1").z(), BigInt::from(2));
        assert_eq!(p("2,2,1,1").z(), BigInt::from(16));
        assert_eq!(p("3,3,3").z(), BigInt::from(27 * 6));
    }

    #[test]
    fn dominance_examples() {
        assert_eq!(p("2,1").dominance_cmp(&p("1,1,1")), Ok(Dominance::Greater));
        assert_eq!(p("1,1,1").dominance_cmp(&p("2,1")), Ok(Dominance::Less));
        assert_eq!(p("2,1").dominance_cmp(&p("2,1")), Ok(Dominance::Equal));
        assert_eq!(p("3,3").dominance_cmp(&p("4,1,1")), Ok(Dominance::Incomparable));
        assert_eq!(
            p("2").dominance_cmp(&p("1")),
            Err(PartitionError::WeightMismatch(2, 1))
        );
    }

    #[test]
    fn multiset_calculus() {
        assert!(p("2,1").mult_contains(&p("1")));
        assert!(!p("2,1").mult_contains(&p("1,1")));
        assert!(p("5,2").mult_contains(&Partition::empty()));

        assert_eq!(p("2,1").mult_diff(&p("1")).unwrap(), p("2"));
        assert_eq!(p("3,2").mult_diff(&Partition::empty()).unwrap(), p("3,2"));
        assert_eq!(p("3,3,2").mult_diff(&p("3")).unwrap(), p("3,2"));
        assert!(matches!(
            p("2").mult_diff(&p("1")),
            Err(PartitionError::NotContained { .. })
        ));

        assert_eq!(p("2").mult_union(&p("1")), p("2,1"));
        assert_eq!(p("2,1").mult_union(&Partition::empty()), p("2,1"));
        assert_eq!(p("2,1").mult_union(&p("2")), p("2,2,1"));

        assert_eq!(p("2,2,1").mult_binomial(&p("2")), BigInt::from(2));
        assert_eq!(p("2,2,1").mult_binomial(&p("2,2,1")), BigInt::from(1));
        assert_eq!(p("1").mult_binomial(&p("2")), BigInt::from(0));
    }

    #[test]
    fn mult_subsets_enumerates_all_sub_multisets() {
        let subs = p("2,2,1").mult_subsets();
        assert_eq!(subs.len(), 3 * 2);
        assert!(subs.iter().all(|s| p("2,2,1").mult_contains(s)));
        assert!(subs.contains(&Partition::empty()));
        assert!(subs.contains(&p("2,2,1")));
    }

    #[test]
    fn enumeration() {
        assert_eq!(partitions_of(0, None), vec![Partition::empty()]);
        assert_eq!(partitions_of(3, None), vec![p("3"), p("2,1"), p("1,1,1")]);
        assert_eq!(partitions_of(6, Some(2)).len(), 4);
        // Canonical order agrees with the `Ord` impl.
        let ps = partitions_of(7, None);
        assert!(ps.windows(2).all(|w| w[0] < w[1]));
    }

    /// Classical partition numbers via the coin-change recurrence.
    fn partition_numbers(n: usize) -> Vec<u64> {
        let mut dp = vec![0u64; n + 1];
        dp[0] = 1;
        for part in 1..=n {
            for total in part..=n {
                dp[total] += dp[total - part];
            }
        }
        dp
    }

    #[test]
    fn counts_match_partition_function() {
        let pn = partition_numbers(30);
        assert_eq!(pn[10], 42);
        for n in 0..=30u32 {
            assert_eq!(partitions_of(n, None).len() as u64, pn[n as usize], "n = {n}");
        }
    }

    #[test]
    fn near_rectangles_are_dominated() {
        assert!(near_rectangle_dominance_check(1, 1, 1));
        assert!(near_rectangle_dominance_check(0, 0, 3));
        assert_eq!(near_rectangle(2, 2, 1), p("3,3,2"));
        assert_eq!(partitions_of(8, Some(3)).len(), 10);
        assert!(near_rectangle_dominance_check(2, 2, 1));
        for k in 0..=4 {
            for s in 0..=4 {
                for t in 1..=4 {
                    assert!(near_rectangle_dominance_check(k, s, t), "{k} {s} {t}");
                }
            }
        }
    }

    #[test]
    fn text_forms() {
        assert_eq!(Partition::empty().to_string(), "()");
        assert_eq!(p("3,2,1").to_string(), "3,2,1");
        assert_eq!(p("(4,1)"), p("4,1"));
        assert!("".parse::<Partition>().is_err());
        assert!("1,2".parse::<Partition>().is_err());
        assert!("2,0".parse::<Partition>().is_err());
        assert!("x".parse::<Partition>().is_err());
    }

    fn arb_partition(max_weight: u32) -> impl Strategy<Value = Partition> {
        prop::collection::vec(1..=max_weight, 0..4)
            .prop_map(Partition::from_unsorted)
            .prop_filter("weight bound", move |p| p.weight() <= max_weight)
    }

    proptest! {
        #[test]
        fn union_then_diff_is_identity(a in arb_partition(8), b in arb_partition(8)) {
            let u = a.mult_union(&b);
            prop_assert_eq!(u.weight(), a.weight() + b.weight());
            prop_assert_eq!(u.len(), a.len() + b.len());
            prop_assert_eq!(u.mult_diff(&b).unwrap(), a);
        }
    }

    #[test]
    fn dominance_is_a_partial_order() {
        for n in 0..=10 {
            let ps = partitions_of(n, None);
            for a in &ps {
                assert!(a.dominates(a));
                for b in &ps {
                    if a.dominates(b) && b.dominates(a) {
                        assert_eq!(a, b);
                    }
                    if n <= 8 {
                        for c in &ps {
                            if a.dominates(b) && b.dominates(c) {
                                assert!(a.dominates(c));
                            }
                        }
                    }
                }
            }
        }
    }
}
