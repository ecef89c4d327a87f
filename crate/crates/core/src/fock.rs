//! The Fock space `V = Sym(h_{-1}, h_{-2}, ...) ⊗ C[½Z]` with its
//! Heisenberg action, scalar product and the map `T` onto symmetric
//! functions.
//!
//! A basis vector `h_{-λ} ⊗ e^{sh}` is keyed by `(λ, 2s)`: charges are
//! half-integers and are stored doubled so they stay integral.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exactscalar::{BigRational, Coeff, ExactError, RatFn};
use crate::partitions::Partition;
use crate::symfunc::{Basis, SymFunc};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FockError {
    #[error("vector is not homogeneous: found bidegrees {0} and {1}")]
    NotHomogeneous(Bidegree, Bidegree),
    #[error("h_0 is not a Heisenberg mode of this representation")]
    ZeroMode,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `nd(v) = (|λ|, charge)`; the zero vector has every bidegree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bidegree {
    Any,
    Of { weight: u32, twice_charge: i64 },
}

impl Bidegree {
    /// Equality in which `Any` matches everything.
    pub fn matches(&self, other: &Bidegree) -> bool {
        match (self, other) {
            (Bidegree::Any, _) | (_, Bidegree::Any) => true,
            (a, b) => a == b,
        }
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bidegree::Any => f.write_str("any"),
            Bidegree::Of {
                weight,
                twice_charge,
            } => write!(f, "({weight}, {twice_charge}/2)"),
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct FockVector<C> {
    terms: BTreeMap<(Partition, i64), C>,
}

impl<C: Coeff> Default for FockVector<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> FockVector<C> {
    pub fn zero() -> Self {
        FockVector {
            terms: BTreeMap::new(),
        }
    }

    /// `e^{sh}` with `2s = twice_charge`.
    pub fn vacuum(twice_charge: i64) -> Self {
        Self::basis_vector(Partition::empty(), twice_charge)
    }

    pub fn basis_vector(lambda: Partition, twice_charge: i64) -> Self {
        let mut v = Self::zero();
        v.terms.insert((lambda, twice_charge), C::one());
        v
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Partition, i64, C)>) -> Self {
        let mut v = Self::zero();
        for (l, q, c) in terms {
            v.add_term(l, q, c);
        }
        v
    }

    pub fn terms(&self) -> &BTreeMap<(Partition, i64), C> {
        &self.terms
    }

    pub fn coeff(&self, lambda: &Partition, twice_charge: i64) -> C {
        self.terms
            .get(&(lambda.clone(), twice_charge))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, lambda: Partition, twice_charge: i64, c: C) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((lambda, twice_charge)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((l, q), c) in &other.terms {
            out.add_term(l.clone(), *q, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-C::one()))
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        FockVector {
            terms: self
                .terms
                .iter()
                .map(|(k, x)| (k.clone(), x.clone() * c))
                .collect(),
        }
    }

    pub fn twice_charges(&self) -> BTreeSet<i64> {
        self.terms.keys().map(|(_, q)| *q).collect()
    }

    /// Heisenberg action: `h_{-n}` multiplies, `h_n` (n > 0) acts as
    /// `α^{-1} n ∂/∂h_{-n}`.
    pub fn apply_h(&self, n: i64, alpha: &C) -> Result<Self, FockError> {
        if n == 0 {
            return Err(FockError::ZeroMode);
        }
        let part = Partition::from_unsorted([n.unsigned_abs() as u32]);
        let mut out = Self::zero();
        if n < 0 {
            for ((l, q), c) in &self.terms {
                out.add_term(l.mult_union(&part), *q, c.clone());
            }
            return Ok(out);
        }
        let scale = C::from_int(n).checked_div(alpha)?;
        for ((l, q), c) in &self.terms {
            let m = l.multiplicity(n as u32);
            if m == 0 {
                continue;
            }
            let rest = l.mult_diff(&part).expect("part occurs in λ");
            out.add_term(rest, *q, c.clone() * &scale * &C::from_int(m as i64));
        }
        Ok(out)
    }

    /// Multiplication by `h_{-μ}`.
    pub fn mul_creation(&self, mu: &Partition) -> Self {
        FockVector {
            terms: self
                .terms
                .iter()
                .map(|((l, q), c)| ((l.mult_union(mu), *q), c.clone()))
                .collect(),
        }
    }

    /// `⟨h_{-λ}⊗e^{mh}, h_{-μ}⊗e^{nh}⟩ = z_λ α^{-l(λ)} δ_{λμ} δ_{mn}`.
    pub fn inner(&self, other: &Self, alpha: &C) -> Result<C, FockError> {
        let alpha_inv = alpha.inv()?;
        let mut acc = C::zero();
        for (key, c) in &self.terms {
            if let Some(d) = other.terms.get(key) {
                let w = alpha_inv.powi(key.0.len() as i64)?
                    * &C::from_rational(BigRational::from_integer(key.0.z()));
                acc = acc + c.clone() * d * &w;
            }
        }
        Ok(acc)
    }

    /// `T: h_{-λ} ⊗ e^{sh} ↦ p_λ`, summing over charge sectors.
    pub fn t_map(&self) -> SymFunc<C> {
        SymFunc::from_terms(
            Basis::PowerSum,
            self.terms.iter().map(|((l, _), c)| (l.clone(), c.clone())),
        )
    }

    pub fn bidegree(&self) -> Result<Bidegree, FockError> {
        let mut seen = Bidegree::Any;
        for (l, q) in self.terms.keys() {
            let here = Bidegree::Of {
                weight: l.weight(),
                twice_charge: *q,
            };
            if !seen.matches(&here) {
                return Err(FockError::NotHomogeneous(seen, here));
            }
            seen = here;
        }
        Ok(seen)
    }

    pub fn try_map<D: Coeff, E>(&self, f: impl Fn(&C) -> Result<D, E>) -> Result<FockVector<D>, E> {
        let mut out = FockVector::zero();
        for ((l, q), c) in &self.terms {
            out.add_term(l.clone(), *q, f(c)?);
        }
        Ok(out)
    }
}

impl FockVector<RatFn> {
    pub fn specialize(&self, x: &BigRational) -> Result<FockVector<BigRational>, ExactError> {
        self.try_map(|c| c.eval(x))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct TermRepr {
    partition: Partition,
    twice_charge: i64,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct FockRepr {
    terms: Vec<TermRepr>,
}

impl<C: Coeff> Serialize for FockVector<C> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FockRepr {
            terms: self
                .terms
                .iter()
                .map(|((l, q), c)| TermRepr {
                    partition: l.clone(),
                    twice_charge: *q,
                    coeff: c.to_string(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, C: Coeff> Deserialize<'de> for FockVector<C> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = FockRepr::deserialize(deserializer)?;
        let mut v = FockVector::zero();
        for t in repr.terms {
            if v.terms.contains_key(&(t.partition.clone(), t.twice_charge)) {
                return Err(D::Error::custom(format!(
                    "duplicate term {} at twice charge {}",
                    t.partition, t.twice_charge
                )));
            }
            let c = C::parse_text(&t.coeff).map_err(D::Error::custom)?;
            v.add_term(t.partition, t.twice_charge, c);
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactscalar::{One, Zero};
    use crate::partitions::partitions_of;
    use crate::symfunc::SymRing;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn a() -> RatFn {
        RatFn::alpha()
    }

    #[test]
    fn heisenberg_examples() {
        let v = FockVector::<RatFn>::basis_vector(p("2"), 0);
        assert_eq!(
            v.apply_h(2, &a()).unwrap(),
            FockVector::vacuum(0).scale(&"2/a".parse().unwrap())
        );
        assert!(v.apply_h(3, &a()).unwrap().is_zero());
        assert_eq!(v.apply_h(0, &a()), Err(FockError::ZeroMode));
        let w = FockVector::<RatFn>::from_terms([(p("2,1"), 1, RatFn::one()), (p("1,1"), 1, a())]);
        let comm = w
            .apply_h(-1, &a())
            .unwrap()
            .apply_h(1, &a())
            .unwrap()
            .sub(&w.apply_h(1, &a()).unwrap().apply_h(-1, &a()).unwrap());
        assert_eq!(comm, w.scale(&a().inv().unwrap()));
    }

    #[test]
    fn pairing_examples() {
        let u = FockVector::<RatFn>::basis_vector(p("2,1"), 0);
        assert_eq!(u.inner(&u, &a()).unwrap(), "2/a^2".parse().unwrap());
        let x = FockVector::<RatFn>::basis_vector(p("1"), 0);
        let y = FockVector::<RatFn>::basis_vector(p("1"), 2);
        assert!(x.inner(&y, &a()).unwrap().is_zero());
    }

    #[test]
    fn t_map_and_bidegree() {
        let v = FockVector::<RatFn>::basis_vector(p("2,1"), 3);
        assert_eq!(v.t_map(), SymFunc::basis_element(Basis::PowerSum, p("2,1")));
        assert!(FockVector::<RatFn>::zero().t_map().is_zero());
        assert_eq!(
            FockVector::<RatFn>::basis_vector(p("2,1"), 2).bidegree(),
            Ok(Bidegree::Of {
                weight: 3,
                twice_charge: 2
            })
        );
        assert_eq!(FockVector::<RatFn>::zero().bidegree(), Ok(Bidegree::Any));
        let mixed = FockVector::<RatFn>::from_terms([
            (p("2"), 0, RatFn::one()),
            (p("1"), 0, RatFn::one()),
        ]);
        assert!(matches!(mixed.bidegree(), Err(FockError::NotHomogeneous(..))));
        assert!(Bidegree::Any.matches(&Bidegree::Of {
            weight: 1,
            twice_charge: 0
        }));
    }

    #[test]
    fn adjointness_and_isometry_on_basis() {
        let ring = SymRing::symbolic();
        for w in 0..=5u32 {
            for l in partitions_of(w, None) {
                for mu in partitions_of(w + 1, None) {
                    for n in 1..=(w + 1) as i64 {
                        let u = FockVector::<RatFn>::basis_vector(mu.clone(), 1);
                        let v = FockVector::<RatFn>::basis_vector(l.clone(), 1);
                        let lhs = u.apply_h(n, &a()).unwrap().inner(&v, &a()).unwrap();
                        let rhs = u.inner(&v.apply_h(-n, &a()).unwrap(), &a()).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
                let u = FockVector::<RatFn>::basis_vector(l.clone(), -1);
                assert_eq!(
                    u.inner(&u, &a()).unwrap(),
                    ring.inner_product(&u.t_map(), &u.t_map()).unwrap()
                );
            }
        }
    }

    #[test]
    fn json_shape() {
        let v = FockVector::<RatFn>::from_terms([(p("2,1"), -1, a())]);
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(
            text,
            r#"{"terms":[{"partition":[2,1],"twiceCharge":-1,"coeff":"a"}]}"#
        );
        assert_eq!(serde_json::from_str::<FockVector<RatFn>>(&text).unwrap(), v);
        assert!(RatFn::zero().is_zero());
    }
}
