//! Symmetric functions over a coefficient field, the α-deformed scalar
//! product and Jack functions.
//!
//! Conventions: the scalar product is `⟨p_λ, p_μ⟩ = δ_{λμ} α^{-l(λ)} z_λ`,
//! so `α` plays the role of the *reciprocal* of the usual Jack parameter.
//! [`SymRing::jack_p`] therefore returns what is commonly written
//! `P_λ(α^{-1})`, and [`SymRing::gen_homogeneous`] returns the one-row dual
//! function `Q_n(α^{-1}) = Σ_{λ⊢n} α^{l(λ)} z_λ^{-1} p_λ`.
//!
//! Internally everything is converted to power sums. Conversions out of
//! power sums use dual pairings (`⟨q_λ, m_μ⟩ = δ`, `⟨P_λ, Q_μ⟩ = δ`) rather
//! than matrix inversion, so no rational-function matrix is ever inverted.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::cache::{CacheError, TransitionCache};
use crate::exactscalar::{BigRational, Coeff, ExactError, RatFn};
use crate::linalg;
use crate::partitions::{partitions_cached, Partition};

#[derive(Debug, Error)]
pub enum SymFuncError {
    #[error("basis mismatch: {0} vs {1}")]
    BasisMismatch(Basis, Basis),
    #[error("matrix shapes do not compose: {0}")]
    Shape(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Cache(#[from] CacheError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Basis {
    PowerSum,
    Monomial,
    GenHomogeneous,
    JackP,
    JackQ,
}

impl Basis {
    pub const ALL: [Basis; 5] = [
        Basis::PowerSum,
        Basis::Monomial,
        Basis::GenHomogeneous,
        Basis::JackP,
        Basis::JackQ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Basis::PowerSum => "powerSum",
            Basis::Monomial => "monomial",
            Basis::GenHomogeneous => "genHomogeneous",
            Basis::JackP => "jackP",
            Basis::JackQ => "jackQ",
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Basis {
    type Err = String;

    /// Long names plus the one-letter aliases `p m q P Q`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "powerSum" | "p" => Basis::PowerSum,
            "monomial" | "m" => Basis::Monomial,
            "genHomogeneous" | "q" => Basis::GenHomogeneous,
            "jackP" | "P" => Basis::JackP,
            "jackQ" | "Q" => Basis::JackQ,
            _ => return Err(format!("unknown basis `{s}`")),
        })
    }
}

/// A finitely supported linear combination of basis elements.
#[derive(Clone, PartialEq, Debug)]
pub struct SymFunc<C> {
    basis: Basis,
    terms: BTreeMap<Partition, C>,
}

impl<C: Coeff> SymFunc<C> {
    pub fn zero(basis: Basis) -> Self {
        SymFunc {
            basis,
            terms: BTreeMap::new(),
        }
    }

    /// The unit `p_()`.
    pub fn one() -> Self {
        Self::basis_element(Basis::PowerSum, Partition::empty())
    }

    pub fn basis_element(basis: Basis, lambda: Partition) -> Self {
        let mut f = Self::zero(basis);
        f.terms.insert(lambda, C::one());
        f
    }

    /// Sums repeated partitions and drops zero coefficients.
    pub fn from_terms(basis: Basis, terms: impl IntoIterator<Item = (Partition, C)>) -> Self {
        let mut f = Self::zero(basis);
        for (lambda, c) in terms {
            f.add_term(lambda, c);
        }
        f
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn terms(&self) -> &BTreeMap<Partition, C> {
        &self.terms
    }

    pub fn coeff(&self, lambda: &Partition) -> C {
        self.terms.get(lambda).cloned().unwrap_or_else(C::zero)
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

    pub fn add_term(&mut self, lambda: Partition, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(lambda) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SymFuncError> {
        self.check_basis(other)?;
        let mut out = self.clone();
        for (lambda, c) in &other.terms {
            out.add_term(lambda.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SymFuncError> {
        self.add(&other.scale(&-C::one()))
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.basis);
        }
        SymFunc {
            basis: self.basis,
            terms: self
                .terms
                .iter()
                .map(|(l, x)| (l.clone(), x.clone() * c))
                .collect(),
        }
    }

    /// Product of two power-sum expansions: `p_λ p_μ = p_{λ∪μ}`.
    pub fn mul(&self, other: &Self) -> Result<Self, SymFuncError> {
        for b in [self.basis, other.basis] {
            if b != Basis::PowerSum {
                return Err(SymFuncError::BasisMismatch(b, Basis::PowerSum));
            }
        }
        let mut out = Self::zero(Basis::PowerSum);
        for (l1, c1) in &self.terms {
            for (l2, c2) in &other.terms {
                out.add_term(l1.mult_union(l2), c1.clone() * c2);
            }
        }
        Ok(out)
    }

    pub fn homogeneous_component(&self, weight: u32) -> Self {
        SymFunc {
            basis: self.basis,
            terms: self
                .terms
                .iter()
                .filter(|(l, _)| l.weight() == weight)
                .map(|(l, c)| (l.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn weights(&self) -> BTreeSet<u32> {
        self.terms.keys().map(Partition::weight).collect()
    }

    pub fn try_map<D: Coeff, E>(&self, f: impl Fn(&C) -> Result<D, E>) -> Result<SymFunc<D>, E> {
        let mut out = SymFunc::zero(self.basis);
        for (l, c) in &self.terms {
            out.add_term(l.clone(), f(c)?);
        }
        Ok(out)
    }

    fn check_basis(&self, other: &Self) -> Result<(), SymFuncError> {
        if self.basis != other.basis {
            return Err(SymFuncError::BasisMismatch(self.basis, other.basis));
        }
        Ok(())
    }
}

impl SymFunc<RatFn> {
    /// Evaluates every coefficient at `α = x`.
    pub fn specialize(&self, x: &BigRational) -> Result<SymFunc<BigRational>, ExactError> {
        self.try_map(|c| c.eval(x))
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    partition: Partition,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct SymFuncRepr {
    basis: Basis,
    terms: Vec<TermRepr>,
}

impl<C: Coeff> Serialize for SymFunc<C> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SymFuncRepr {
            basis: self.basis,
            terms: self
                .terms
                .iter()
                .map(|(l, c)| TermRepr {
                    partition: l.clone(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, C: Coeff> Deserialize<'de> for SymFunc<C> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = SymFuncRepr::deserialize(deserializer)?;
        let mut f = SymFunc::zero(repr.basis);
        for t in repr.terms {
            if f.terms.contains_key(&t.partition) {
                return Err(D::Error::custom(format!("duplicate partition {}", t.partition)));
            }
            let c = C::parse_text(&t.coeff).map_err(D::Error::custom)?;
            f.add_term(t.partition, c);
        }
        Ok(f)
    }
}

/// Change-of-basis matrix at one weight. Row `λ` holds the expansion
/// `from_λ = Σ_μ M[λ][μ] to_μ`; rows and columns follow the canonical
/// partition order.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix<C> {
    weight: u32,
    from: Basis,
    to: Basis,
    partitions: Arc<Vec<Partition>>,
    entries: Vec<Vec<C>>,
}

impl<C: Coeff> TransitionMatrix<C> {
    pub fn new(
        weight: u32,
        from: Basis,
        to: Basis,
        entries: Vec<Vec<C>>,
    ) -> Result<Self, SymFuncError> {
        let partitions = partitions_cached(weight);
        let n = partitions.len();
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(SymFuncError::Shape(format!(
                "expected {n}x{n} entries at weight {weight}"
            )));
        }
        Ok(TransitionMatrix {
            weight,
            from,
            to,
            partitions,
            entries,
        })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn from_basis(&self) -> Basis {
        self.from
    }

    pub fn to_basis(&self) -> Basis {
        self.to
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn entries(&self) -> &[Vec<C>] {
        &self.entries
    }

    pub fn get(&self, row: &Partition, col: &Partition) -> Option<&C> {
        let i = self.partitions.iter().position(|p| p == row)?;
        let j = self.partitions.iter().position(|p| p == col)?;
        Some(&self.entries[i][j])
    }

    /// `self` followed by `next`: a `from → to → next.to` matrix.
    pub fn compose(&self, next: &Self) -> Result<Self, SymFuncError> {
        if self.weight != next.weight || self.to != next.from {
            return Err(SymFuncError::Shape(format!(
                "cannot compose {}→{} (weight {}) with {}→{} (weight {})",
                self.from, self.to, self.weight, next.from, next.to, next.weight
            )));
        }
        Ok(TransitionMatrix {
            weight: self.weight,
            from: self.from,
            to: next.to,
            partitions: self.partitions.clone(),
            entries: linalg::mat_mul(&self.entries, &next.entries),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.entries == linalg::identity::<C>(self.partitions.len())
    }

    pub fn has_unit_diagonal(&self) -> bool {
        (0..self.entries.len()).all(|i| self.entries[i][i].is_one())
    }

    /// Nonzero entries only where the column partition dominates the row.
    pub fn is_upper_in_dominance(&self) -> bool {
        self.support_all(|row, col| col.dominates(row))
    }

    /// Nonzero entries only where the row partition dominates the column.
    pub fn is_lower_in_dominance(&self) -> bool {
        self.support_all(|row, col| row.dominates(col))
    }

    pub fn transpose(&self) -> Self {
        let n = self.entries.len();
        let entries = (0..n)
            .map(|i| (0..n).map(|j| self.entries[j][i].clone()).collect())
            .collect();
        TransitionMatrix {
            entries,
            ..self.clone()
        }
    }

    fn support_all(&self, allowed: impl Fn(&Partition, &Partition) -> bool) -> bool {
        let ps = &self.partitions;
        self.entries.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(j, c)| c.is_zero() || allowed(&ps[i], &ps[j]))
        })
    }
}

/// Number of maps from the parts of `lambda` to the rows of `mu` whose
/// fibres sum to the row lengths: the coefficient of `m_μ` in `p_λ`.
pub fn power_to_monomial_count(lambda: &Partition, mu: &Partition) -> BigInt {
    fn go(
        parts: &[u32],
        idx: usize,
        caps: Vec<u32>,
        memo: &mut HashMap<(usize, Vec<u32>), BigInt>,
    ) -> BigInt {
        if idx == parts.len() {
            return BigInt::from(caps.iter().all(|&c| c == 0) as u8);
        }
        if let Some(v) = memo.get(&(idx, caps.clone())) {
            return v.clone();
        }
        let mut total = BigInt::from(0);
        for j in 0..caps.len() {
            if caps[j] >= parts[idx] {
                let mut next = caps.clone();
                next[j] -= parts[idx];
                next.sort_unstable_by(|a, b| b.cmp(a));
                total += go(parts, idx + 1, next, memo);
            }
        }
        memo.insert((idx, caps), total.clone());
        total
    }
    if lambda.weight() != mu.weight() || !mu.dominates(lambda) {
        return BigInt::from(0);
    }
    go(lambda.parts(), 0, mu.parts().to_vec(), &mut HashMap::new())
}

/// α-independent data for one weight: the partition list and the integer
/// change of basis between power sums and monomials.
struct WeightTable {
    parts: Arc<Vec<Partition>>,
    index: HashMap<Partition, usize>,
    p_to_m: Vec<Vec<BigRational>>,
    m_to_p: Vec<Vec<BigRational>>,
}

fn weight_table(n: u32) -> Arc<WeightTable> {
    static TABLES: OnceLock<RwLock<HashMap<u32, Arc<WeightTable>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(Default::default);
    if let Some(t) = tables.read().expect("weight table lock").get(&n) {
        return t.clone();
    }
    let parts = partitions_cached(n);
    let index = parts
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    let p_to_m: Vec<Vec<BigRational>> = parts
        .iter()
        .map(|l| {
            parts
                .iter()
                .map(|m| BigRational::from_integer(power_to_monomial_count(l, m)))
                .collect()
        })
        .collect();
    let m_to_p = linalg::inverse(&p_to_m).expect("power sums form a basis");
    let table = Arc::new(WeightTable {
        parts,
        index,
        p_to_m,
        m_to_p,
    });
    tables
        .write()
        .expect("weight table lock")
        .entry(n)
        .or_insert(table)
        .clone()
}

/// Jack functions of one weight, densely in power-sum coordinates.
struct JackWeight<C> {
    p_coords: Vec<Vec<C>>,
    norms: Vec<C>,
}

/// The ring of symmetric functions over a field containing the value of α.
pub struct SymRing<C: Coeff> {
    alpha: C,
    alpha_inv: C,
    pairing: RwLock<HashMap<u32, Arc<Vec<C>>>>,
    jacks: RwLock<HashMap<u32, Arc<JackWeight<C>>>>,
    transitions: RwLock<HashMap<(u32, Basis, Basis), Arc<TransitionMatrix<C>>>>,
    disk: Option<TransitionCache>,
}

impl SymRing<RatFn> {
    /// α kept as a formal parameter.
    pub fn symbolic() -> Self {
        SymRing::new(RatFn::alpha()).expect("α is invertible")
    }
}

impl SymRing<BigRational> {
    pub fn at(alpha: BigRational) -> Result<Self, ExactError> {
        SymRing::new(alpha)
    }
}

impl<C: Coeff> SymRing<C> {
    pub fn new(alpha: C) -> Result<Self, ExactError> {
        let alpha_inv = alpha.inv()?;
        Ok(SymRing {
            alpha,
            alpha_inv,
            pairing: Default::default(),
            jacks: Default::default(),
            transitions: Default::default(),
            disk: None,
        })
    }

    /// Persists transition matrices under `cache`.
    pub fn with_disk_cache(mut self, cache: TransitionCache) -> Self {
        self.disk = Some(cache);
        self
    }

    pub fn alpha(&self) -> &C {
        &self.alpha
    }

    /// `Q_n(α^{-1}) = Σ_{λ⊢n} α^{l(λ)} z_λ^{-1} p_λ`, zero for negative `n`.
    pub fn gen_homogeneous(&self, n: i64) -> SymFunc<C> {
        if n < 0 {
            return SymFunc::zero(Basis::PowerSum);
        }
        let mut f = SymFunc::zero(Basis::PowerSum);
        for lambda in partitions_cached(n as u32).iter() {
            let c = self.alpha_pow(lambda.len()) * &C::from_rational(BigRational::new(1.into(), lambda.z()));
            f.add_term(lambda.clone(), c);
        }
        f
    }

    /// `q_λ = Q_{λ_1} Q_{λ_2} ⋯` in power sums.
    pub fn q_product(&self, lambda: &Partition) -> SymFunc<C> {
        lambda
            .parts()
            .iter()
            .fold(SymFunc::one(), |acc, &part| {
                acc.mul(&self.gen_homogeneous(part as i64))
                    .expect("power-sum operands")
            })
    }

    pub fn mul(&self, f: &SymFunc<C>, g: &SymFunc<C>) -> Result<SymFunc<C>, SymFuncError> {
        self.to_power_sum(f)?.mul(&self.to_power_sum(g)?)
    }

    pub fn inner_product(&self, f: &SymFunc<C>, g: &SymFunc<C>) -> Result<C, SymFuncError> {
        let f = self.to_power_sum(f)?;
        let g = self.to_power_sum(g)?;
        let mut acc = C::zero();
        for (lambda, c) in f.terms() {
            if let Some(d) = g.terms().get(lambda) {
                acc = acc + c.clone() * d * &self.pairing_weight(lambda);
            }
        }
        Ok(acc)
    }

    /// `α^{-l(λ)} z_λ = ⟨p_λ, p_λ⟩`.
    pub fn pairing_weight(&self, lambda: &Partition) -> C {
        self.alpha_inv_pow(lambda.len()) * &C::from_rational(BigRational::from_integer(lambda.z()))
    }

    pub fn to_power_sum(&self, f: &SymFunc<C>) -> Result<SymFunc<C>, SymFuncError> {
        if f.basis() == Basis::PowerSum {
            return Ok(f.clone());
        }
        let mut out = SymFunc::zero(Basis::PowerSum);
        for (weight, dense) in self.dense_power_sums(f)? {
            let table = weight_table(weight);
            for (i, c) in dense.into_iter().enumerate() {
                out.add_term(table.parts[i].clone(), c);
            }
        }
        Ok(out)
    }

    pub fn to_basis(&self, f: &SymFunc<C>, target: Basis) -> Result<SymFunc<C>, SymFuncError> {
        if f.basis() == target {
            return Ok(f.clone());
        }
        let mut out = SymFunc::zero(target);
        for (weight, dense) in self.dense_power_sums(f)? {
            let table = weight_table(weight);
            for (i, c) in self.from_power_sums(weight, &dense, target)?.into_iter().enumerate() {
                out.add_term(table.parts[i].clone(), c);
            }
        }
        Ok(out)
    }

    /// `P_λ(α^{-1})` in the monomial basis, with `m_λ` coefficient 1.
    pub fn jack_p(&self, lambda: &Partition) -> Result<SymFunc<C>, SymFuncError> {
        self.to_basis(&SymFunc::basis_element(Basis::JackP, lambda.clone()), Basis::Monomial)
    }

    /// `Q_λ(α^{-1}) = P_λ / ⟨P_λ, P_λ⟩` in the monomial basis.
    pub fn jack_q(&self, lambda: &Partition) -> Result<SymFunc<C>, SymFuncError> {
        self.to_basis(&SymFunc::basis_element(Basis::JackQ, lambda.clone()), Basis::Monomial)
    }

    /// `⟨P_λ, P_λ⟩`, the reciprocal of the dual normalization `b_λ`.
    pub fn jack_norm(&self, lambda: &Partition) -> Result<C, SymFuncError> {
        let weight = lambda.weight();
        let jw = self.jack_weight(weight)?;
        Ok(jw.norms[weight_table(weight).index[lambda]].clone())
    }

    pub fn transition_matrix(
        &self,
        weight: u32,
        from: Basis,
        to: Basis,
    ) -> Result<Arc<TransitionMatrix<C>>, SymFuncError> {
        let key = (weight, from, to);
        if let Some(m) = self.transitions.read().expect("transition lock").get(&key) {
            return Ok(m.clone());
        }
        let tag = self.alpha.to_string();
        let loaded = match &self.disk {
            Some(disk) => disk.load::<C>(&tag, weight, from, to)?,
            None => None,
        };
        let matrix = match loaded {
            Some(m) => m,
            None => {
                let table = weight_table(weight);
                let mut rows = Vec::with_capacity(table.parts.len());
                for i in 0..table.parts.len() {
                    let dense = self.basis_element_dense(weight, from, i)?;
                    rows.push(self.from_power_sums(weight, &dense, to)?);
                }
                let m = TransitionMatrix::new(weight, from, to, rows)?;
                if let Some(disk) = &self.disk {
                    disk.store(&tag, &m)?;
                }
                m
            }
        };
        let matrix = Arc::new(matrix);
        Ok(self
            .transitions
            .write()
            .expect("transition lock")
            .entry(key)
            .or_insert(matrix)
            .clone())
    }

    fn alpha_pow(&self, k: usize) -> C {
        (0..k).fold(C::one(), |acc, _| acc * &self.alpha)
    }

    fn alpha_inv_pow(&self, k: usize) -> C {
        (0..k).fold(C::one(), |acc, _| acc * &self.alpha_inv)
    }

    fn pairing_weights(&self, n: u32) -> Arc<Vec<C>> {
        if let Some(w) = self.pairing.read().expect("pairing lock").get(&n) {
            return w.clone();
        }
        let w: Arc<Vec<C>> = Arc::new(
            partitions_cached(n)
                .iter()
                .map(|l| self.pairing_weight(l))
                .collect(),
        );
        self.pairing
            .write()
            .expect("pairing lock")
            .entry(n)
            .or_insert(w)
            .clone()
    }

    fn dense_inner(&self, n: u32, u: &[C], v: &[C]) -> C {
        let w = self.pairing_weights(n);
        let mut acc = C::zero();
        for i in 0..u.len() {
            if !u[i].is_zero() && !v[i].is_zero() {
                acc = acc + u[i].clone() * &v[i] * &w[i];
            }
        }
        acc
    }

    /// Monomial coefficients of every `P_λ` of weight `n` from the
    /// eigenoperator recursion
    /// `(ρ_λ - ρ_μ) u_λμ = 2α Σ (μ_i - μ_j + 2t) u_λν`, where `ν` runs over
    /// raisings of `μ` still dominated by `λ` and
    /// `ρ_λ = Σ λ_i (λ_i - 1 - 2α (i - 1))`.
    ///
    /// The result is the Gram-Schmidt orthogonalisation of the monomials
    /// over dominance down-sets (the integration tests check this directly).
    fn jack_weight(&self, n: u32) -> Result<Arc<JackWeight<C>>, SymFuncError> {
        if let Some(j) = self.jacks.read().expect("jack lock").get(&n) {
            return Ok(j.clone());
        }
        let table = weight_table(n);
        let size = table.parts.len();
        let two_alpha = self.alpha.clone() + &self.alpha;
        let rho: Vec<C> = table
            .parts
            .iter()
            .map(|l| {
                let mut acc = C::zero();
                for (i, &part) in l.parts().iter().enumerate() {
                    let k = i64::from(part);
                    let shift = C::from_int(k - 1) - two_alpha.clone() * C::from_int(i as i64);
                    acc = acc + C::from_int(k) * shift;
                }
                acc
            })
            .collect();
        // For each μ, the raisings (index of ν, integer factor).
        let raisings: Vec<Vec<(usize, i64)>> = table
            .parts
            .iter()
            .map(|mu| {
                let ps = mu.parts();
                let mut out = Vec::new();
                for i in 0..ps.len() {
                    for j in i + 1..ps.len() {
                        for t in 1..=ps[j] {
                            let mut raised = ps.to_vec();
                            raised[i] += t;
                            raised[j] -= t;
                            let nu = Partition::from_unsorted(raised);
                            let factor = i64::from(ps[i]) - i64::from(ps[j]) + 2 * i64::from(t);
                            out.push((table.index[&nu], factor));
                        }
                    }
                }
                out
            })
            .collect();
        let mut p_coords: Vec<Vec<C>> = vec![Vec::new(); size];
        let mut norms: Vec<C> = vec![C::zero(); size];
        for l in 0..size {
            let lambda = &table.parts[l];
            let mut u: Vec<C> = vec![C::zero(); size];
            u[l] = C::one();
            for m in l + 1..size {
                if !lambda.dominates(&table.parts[m]) {
                    continue;
                }
                let mut acc = C::zero();
                for &(nu, factor) in &raisings[m] {
                    if nu >= l && !u[nu].is_zero() {
                        acc = acc + u[nu].clone() * C::from_int(factor);
                    }
                }
                if !acc.is_zero() {
                    let gap = rho[l].clone() - &rho[m];
                    u[m] = (acc * &two_alpha).checked_div(&gap)?;
                }
            }
            let mut v = vec![C::zero(); size];
            for (m, c) in u.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(&table.m_to_p[m]) {
                    if !num_traits::Zero::is_zero(y) {
                        *x = x.clone() + c.clone() * C::from_rational(y.clone());
                    }
                }
            }
            norms[l] = self.dense_inner(n, &v, &v);
            p_coords[l] = v;
        }
        let jw = Arc::new(JackWeight { p_coords, norms });
        Ok(self
            .jacks
            .write()
            .expect("jack lock")
            .entry(n)
            .or_insert(jw)
            .clone())
    }

    /// Power-sum coordinates of the `idx`-th basis element of weight `n`.
    fn basis_element_dense(&self, n: u32, basis: Basis, idx: usize) -> Result<Vec<C>, SymFuncError> {
        let table = weight_table(n);
        Ok(match basis {
            Basis::PowerSum => {
                let mut v = vec![C::zero(); table.parts.len()];
                v[idx] = C::one();
                v
            }
            Basis::Monomial => table.m_to_p[idx]
                .iter()
                .map(|x| C::from_rational(x.clone()))
                .collect(),
            Basis::GenHomogeneous => {
                let q = self.q_product(&table.parts[idx]);
                table
                    .parts
                    .iter()
                    .map(|l| q.coeff(l))
                    .collect()
            }
            Basis::JackP => self.jack_weight(n)?.p_coords[idx].clone(),
            Basis::JackQ => {
                let jw = self.jack_weight(n)?;
                let b = jw.norms[idx].inv()?;
                jw.p_coords[idx].iter().map(|x| x.clone() * &b).collect()
            }
        })
    }

    /// Groups `f` by weight and expands each component densely in power sums.
    fn dense_power_sums(&self, f: &SymFunc<C>) -> Result<BTreeMap<u32, Vec<C>>, SymFuncError> {
        let mut out: BTreeMap<u32, Vec<C>> = BTreeMap::new();
        for (lambda, c) in f.terms() {
            let n = lambda.weight();
            let table = weight_table(n);
            let idx = table.index[lambda];
            let elem = self.basis_element_dense(n, f.basis(), idx)?;
            let acc = out
                .entry(n)
                .or_insert_with(|| vec![C::zero(); table.parts.len()]);
            for (a, e) in acc.iter_mut().zip(elem) {
                if !e.is_zero() {
                    *a = a.clone() + e * c;
                }
            }
        }
        Ok(out)
    }

    /// Coordinates in `target` of a dense power-sum vector of weight `n`.
    fn from_power_sums(&self, n: u32, dense: &[C], target: Basis) -> Result<Vec<C>, SymFuncError> {
        let table = weight_table(n);
        let size = table.parts.len();
        Ok(match target {
            Basis::PowerSum => dense.to_vec(),
            Basis::Monomial => (0..size)
                .map(|j| {
                    let mut acc = C::zero();
                    for (i, c) in dense.iter().enumerate() {
                        let r = &table.p_to_m[i][j];
                        if !c.is_zero() && !num_traits::Zero::is_zero(r) {
                            acc = acc + c.clone() * &C::from_rational(r.clone());
                        }
                    }
                    acc
                })
                .collect(),
            Basis::GenHomogeneous => (0..size)
                .map(|j| {
                    let m_row: Vec<C> = table.m_to_p[j]
                        .iter()
                        .map(|x| C::from_rational(x.clone()))
                        .collect();
                    self.dense_inner(n, dense, &m_row)
                })
                .collect(),
            Basis::JackP | Basis::JackQ => {
                let jw = self.jack_weight(n)?;
                let mut out = Vec::with_capacity(size);
                for j in 0..size {
                    let pairing = self.dense_inner(n, dense, &jw.p_coords[j]);
                    out.push(if target == Basis::JackP {
                        pairing.checked_div(&jw.norms[j])?
                    } else {
                        pairing
                    });
                }
                out
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactscalar::{int, rat, One, Zero};

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn a() -> RatFn {
        RatFn::alpha()
    }

    fn r(s: &str) -> RatFn {
        s.parse().unwrap()
    }

    #[test]
    fn ring_operations() {
        let p2 = SymFunc::<RatFn>::basis_element(Basis::PowerSum, p("2"));
        let p1 = SymFunc::<RatFn>::basis_element(Basis::PowerSum, p("1"));
        assert_eq!(
            p2.mul(&p1).unwrap(),
            SymFunc::basis_element(Basis::PowerSum, p("2,1"))
        );
        assert_eq!(p2.add(&SymFunc::zero(Basis::PowerSum)).unwrap(), p2);
        assert_eq!(p1.scale(&a()).coeff(&p("1")), a());
        let m1 = SymFunc::<RatFn>::basis_element(Basis::Monomial, p("1"));
        assert!(matches!(p1.add(&m1), Err(SymFuncError::BasisMismatch(..))));
        assert!(p1.sub(&p1).unwrap().is_zero());
    }

    #[test]
    fn one_row_functions() {
        let ring = SymRing::symbolic();
        assert_eq!(ring.gen_homogeneous(0), SymFunc::one());
        assert!(ring.gen_homogeneous(-1).is_zero());
        assert_eq!(
            ring.gen_homogeneous(1),
            SymFunc::from_terms(Basis::PowerSum, [(p("1"), a())])
        );
        assert_eq!(
            ring.gen_homogeneous(2),
            SymFunc::from_terms(
                Basis::PowerSum,
                [(p("2"), r("a/2")), (p("1,1"), r("a^2/2"))]
            )
        );
        assert_eq!(ring.q_product(&p("1")), ring.gen_homogeneous(1));
        assert_eq!(ring.q_product(&Partition::empty()), SymFunc::one());
        assert_eq!(
            ring.q_product(&p("1,1")),
            SymFunc::from_terms(Basis::PowerSum, [(p("1,1"), r("a^2"))])
        );
    }

    #[test]
    fn scalar_product_examples() {
        let ring = SymRing::symbolic();
        let p2 = SymFunc::basis_element(Basis::PowerSum, p("2"));
        let p1 = SymFunc::basis_element(Basis::PowerSum, p("1"));
        assert_eq!(ring.inner_product(&p2, &p2).unwrap(), r("2/a"));
        assert!(ring.inner_product(&p1, &p2).unwrap().is_zero());
        let q21 = SymFunc::basis_element(Basis::GenHomogeneous, p("2,1"));
        let m21 = SymFunc::basis_element(Basis::Monomial, p("2,1"));
        assert_eq!(ring.inner_product(&q21, &m21).unwrap(), RatFn::one());
    }

    #[test]
    fn power_sum_monomial_counts() {
        // p_1^2 = m_2 + 2 m_11, p_2 p_1 = m_3 + m_21.
        assert_eq!(power_to_monomial_count(&p("1,1"), &p("1,1")), 2.into());
        assert_eq!(power_to_monomial_count(&p("1,1"), &p("2")), 1.into());
        assert_eq!(power_to_monomial_count(&p("2,1"), &p("3")), 1.into());
        assert_eq!(power_to_monomial_count(&p("2,1"), &p("2,1")), 1.into());
        assert_eq!(power_to_monomial_count(&p("2,1"), &p("1,1,1")), 0.into());
        assert_eq!(power_to_monomial_count(&p("1,1,1"), &p("2,1")), 3.into());
    }

    #[test]
    fn conversions() {
        let ring = SymRing::symbolic();
        let p1 = SymFunc::basis_element(Basis::PowerSum, p("1"));
        assert_eq!(
            ring.to_basis(&p1, Basis::Monomial).unwrap(),
            SymFunc::basis_element(Basis::Monomial, p("1"))
        );
        for n in 1..=4 {
            let qn = SymFunc::basis_element(Basis::GenHomogeneous, p(&n.to_string()));
            assert_eq!(
                ring.to_basis(&qn, Basis::JackQ).unwrap(),
                SymFunc::basis_element(Basis::JackQ, p(&n.to_string()))
            );
        }
        let q11 = SymFunc::basis_element(Basis::GenHomogeneous, p("1,1"));
        let in_q = ring.to_basis(&q11, Basis::JackQ).unwrap();
        assert_eq!(in_q.coeff(&p("1,1")), RatFn::one());
        assert!(!in_q.coeff(&p("2")).is_zero());
        assert_eq!(in_q.len(), 2);
    }

    #[test]
    fn small_jacks() {
        let ring = SymRing::symbolic();
        assert_eq!(
            ring.jack_p(&p("1")).unwrap(),
            SymFunc::basis_element(Basis::Monomial, p("1"))
        );
        // P_2 = m_2 + c m_11 with ⟨P_2, P_11⟩ = 0.
        let p2 = ring.jack_p(&p("2")).unwrap();
        assert_eq!(p2.coeff(&p("2")), RatFn::one());
        let c = p2.coeff(&p("1,1"));
        let m2 = SymFunc::basis_element(Basis::Monomial, p("2"));
        let m11 = SymFunc::basis_element(Basis::Monomial, p("1,1"));
        let lhs = ring.inner_product(&m2, &m11).unwrap();
        let rhs = ring.inner_product(&m11, &m11).unwrap();
        assert_eq!(c, -(lhs.checked_div(&rhs).unwrap()));
        assert_eq!(
            ring.jack_q(&p("1")).unwrap(),
            SymFunc::from_terms(Basis::Monomial, [(p("1"), a())])
        );
        for n in 1..=4u32 {
            let l = p(&n.to_string());
            let qn = ring.to_basis(&ring.gen_homogeneous(n as i64), Basis::Monomial).unwrap();
            assert_eq!(ring.jack_q(&l).unwrap(), qn);
        }
    }

    #[test]
    fn specialized_ring_matches_symbolic() {
        let sym = SymRing::symbolic();
        let two = SymRing::at(int(2)).unwrap();
        for l in partitions_cached(4).iter() {
            let s = sym.jack_p(l).unwrap().specialize(&int(2)).unwrap();
            assert_eq!(s, two.jack_p(l).unwrap());
        }
        let half = SymRing::at(rat(1, 2)).unwrap();
        assert_eq!(
            half.gen_homogeneous(2).coeff(&p("1,1")),
            rat(1, 8)
        );
    }

    #[test]
    fn triangular_pair_small() {
        let ring = SymRing::symbolic();
        for n in 0..=5 {
            let up = ring.transition_matrix(n, Basis::GenHomogeneous, Basis::JackQ).unwrap();
            let down = ring.transition_matrix(n, Basis::JackQ, Basis::GenHomogeneous).unwrap();
            assert!(up.compose(&down).unwrap().is_identity());
            assert!(up.is_upper_in_dominance() && up.has_unit_diagonal());
            assert!(down.is_upper_in_dominance() && down.has_unit_diagonal());
            let pm = ring.transition_matrix(n, Basis::JackP, Basis::Monomial).unwrap();
            assert_eq!(up.entries(), pm.transpose().entries());
        }
    }

    #[test]
    fn json_round_trip() {
        let ring = SymRing::symbolic();
        let f = ring.jack_q(&p("2,1")).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.starts_with("{\"basis\":\"monomial\",\"terms\":[{\"partition\":[2,1]"));
        let back: SymFunc<RatFn> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let dup = r#"{"basis":"powerSum","terms":[{"partition":[1],"coeff":"1"},{"partition":[1],"coeff":"2"}]}"#;
        assert!(serde_json::from_str::<SymFunc<RatFn>>(dup).is_err());
    }
}
