//! Vertex operators on the Fock space at a specialized value of α.
//!
//! `X(z) = Σ X_n z^{-n}` shifts the charge by one; `Y_a(z) = Σ Y_a(n) z^{-n}`
//! and its adjoint `Y*(z) = Σ Y*_n z^n` preserve it. Every operator here is
//! a normally ordered product of a creation exponential, an optional charge
//! shift and an annihilation exponential, and its modes are read off one
//! power of `z` at a time.
//!
//! Products `X_{-λ_s}⋯X_{-λ_1} e^{nh}` are evaluated three ways: by iterating
//! single modes, by the closed nested sum over partition chains, and by
//! coefficient extraction from the raising-operator generating function.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::contraction::{
    self, contraction_coeff, ordered_form_sign, ContractionError, LaurentSeries, Variables,
};
use crate::exactscalar::{int, BigRational, ExactError};
use crate::fock::{Bidegree, FockError, FockVector};
use crate::partitions::{binomial, partitions_cached, Partition};
use crate::symfunc::{Basis, SymFunc, SymFuncError, SymRing};

type Q = BigRational;

#[derive(Debug, Error)]
pub enum VertexError {
    #[error("z-exponent (2s+1)α is not an integer at twice-charge {twice_charge}, α = {alpha}")]
    NonIntegralExponent { twice_charge: i64, alpha: Q },
    #[error("chain weight at step {step} is {value}, not an integer")]
    NonIntegralWeight { step: usize, value: Q },
    #[error("2α = {0} is not a nonnegative integer")]
    UnsupportedExponent(Q),
    #[error("α must be positive, got {0}")]
    NonPositiveAlpha(Q),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("product is not a scalar multiple of Q_{target:?}")]
    NotProportional {
        target: Partition,
        product: SymFunc<Q>,
        jack: SymFunc<Q>,
    },
    #[error("product vanishes")]
    VanishingProduct,
    #[error("Fock and series evaluations disagree: {fock} vs {sign}·{series}")]
    MethodsDisagree { fock: Q, series: Q, sign: i64 },
    #[error(transparent)]
    SymFunc(#[from] SymFuncError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Contraction(#[from] ContractionError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

impl VertexError {
    /// Variant name, for diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::NonIntegralExponent { .. } => "NonIntegralExponent",
            Self::NonIntegralWeight { .. } => "NonIntegralWeight",
            Self::UnsupportedExponent(_) => "UnsupportedExponent",
            Self::NonPositiveAlpha(_) => "NonPositiveAlpha",
            Self::PreconditionViolated(_) => "PreconditionViolated",
            Self::NotProportional { .. } => "NotProportional",
            Self::VanishingProduct => "VanishingProduct",
            Self::MethodsDisagree { .. } => "MethodsDisagree",
            Self::SymFunc(_) => "SymFunc",
            Self::Fock(_) => "Fock",
            Self::Contraction(_) => "Contraction",
            Self::Exact(_) => "Exact",
        }
    }
}

fn as_int(q: &Q) -> Option<i64> {
    q.is_integer().then(|| q.to_integer().to_i64()).flatten()
}

fn check_alpha(alpha: &Q) -> Result<(), VertexError> {
    if alpha.is_positive() {
        Ok(())
    } else {
        Err(VertexError::NonPositiveAlpha(alpha.clone()))
    }
}

/// `2α` as a nonnegative integer.
fn twice_alpha(alpha: &Q) -> Result<u32, VertexError> {
    let t = alpha * int(2);
    as_int(&t)
        .filter(|&x| x >= 0)
        .map(|x| x as u32)
        .ok_or(VertexError::UnsupportedExponent(t))
}

/// `(2s+1)α` for twice-charge `2s`, when it is an integer.
fn charge_exponent(twice_charge: i64, alpha: &Q) -> Result<i64, VertexError> {
    as_int(&(alpha * int(twice_charge + 1))).ok_or_else(|| VertexError::NonIntegralExponent {
        twice_charge,
        alpha: alpha.clone(),
    })
}

fn pow(x: &Q, e: usize) -> Q {
    num_traits::pow::Pow::pow(x, e as u32)
}

/// Coefficient `α^{l(λ)}/z_λ` of `h_{-λ} z^{|λ|}` in `exp(Σ z^n/n α h_{-n})`.
pub fn creation_coeffs(alpha: &Q, lambda: &Partition) -> Q {
    pow(alpha, lambda.len()) / BigRational::from_integer(lambda.z())
}

/// Terms of `exp(Σ z^{-n}/(-n) aα h_n)·h_{-λ}`: for every sub-multiset
/// `μ ⊂' λ`, the remaining partition `λ\μ`, the shed weight `|μ|` and the
/// α-independent coefficient `binom(m(λ), m(μ)) (-a)^{l(μ)}`.
pub fn annihilation_terms(lambda: &Partition, strength: &Q) -> Vec<(Partition, u32, Q)> {
    let factor = -strength.clone();
    if strength.is_zero() {
        return vec![(lambda.clone(), 0, Q::one())];
    }
    lambda
        .mult_subsets()
        .into_iter()
        .map(|mu| {
            let c = BigRational::from_integer(lambda.mult_binomial(&mu)) * pow(&factor, mu.len());
            (lambda.mult_diff(&mu).expect("sub-multiset"), mu.weight(), c)
        })
        .collect()
}

/// The annihilation half of `X(z)` (strength 2).
pub fn annihilation_apply(lambda: &Partition) -> Vec<(Partition, u32, Q)> {
    annihilation_terms(lambda, &int(2))
}

/// A normally ordered half-vertex operator
/// `exp(Σ z^n/n cα h_{-n}) · [charge shift] · exp(Σ z^{-n}/(-n) aα h_n)`.
struct HalfVertex<'a> {
    alpha: &'a Q,
    creation: Q,
    annihilation: Q,
    shifts_charge: bool,
}

impl HalfVertex<'_> {
    /// Coefficient of `z^k` applied to `v`.
    fn coefficient(&self, k: i64, v: &FockVector<Q>) -> Result<FockVector<Q>, VertexError> {
        check_alpha(self.alpha)?;
        let mut creation_table: HashMap<u32, Vec<(Partition, Q)>> = HashMap::new();
        let c_alpha = &self.creation * self.alpha;
        let mut out = FockVector::zero();
        for ((lambda, q), coef) in v.terms() {
            let (shift, new_q) = if self.shifts_charge {
                (charge_exponent(*q, self.alpha)?, q + 2)
            } else {
                (0, *q)
            };
            for (rest, shed, a_coef) in annihilation_terms(lambda, &self.annihilation) {
                let size = k - shift + shed as i64;
                if size < 0 || (self.creation.is_zero() && size != 0) {
                    continue;
                }
                let size = size as u32;
                let table = creation_table.entry(size).or_insert_with(|| {
                    partitions_cached(size)
                        .iter()
                        .map(|nu| (nu.clone(), creation_coeffs(&c_alpha, nu)))
                        .collect()
                });
                let base = coef * &a_coef;
                for (nu, c) in table.iter() {
                    out.add_term(rest.mult_union(nu), new_q, &base * c);
                }
            }
        }
        Ok(out)
    }
}

/// The mode `X_n`, the coefficient of `z^{-n}` in `X(z)·v`.
pub fn apply_x_mode(n: i64, v: &FockVector<Q>, alpha: &Q) -> Result<FockVector<Q>, VertexError> {
    HalfVertex {
        alpha,
        creation: Q::one(),
        annihilation: int(2),
        shifts_charge: true,
    }
    .coefficient(-n, v)
}

/// The mode `Y_a(n)` (coefficient of `z^{-n}` in `Y_a(z)`), or with `dual`
/// the mode `Y*_n` (coefficient of `z^n` in `Y*_a(z) = Y_a(z^{-1})*`).
/// `Y*_n` is the adjoint of `Y_a(n)`.
pub fn apply_y_mode(
    n: i64,
    v: &FockVector<Q>,
    alpha: &Q,
    a: &Q,
    dual: bool,
) -> Result<FockVector<Q>, VertexError> {
    let op = if dual {
        HalfVertex {
            alpha,
            creation: -a.clone(),
            annihilation: int(-1),
            shifts_charge: false,
        }
    } else {
        HalfVertex {
            alpha,
            creation: Q::one(),
            annihilation: a.clone(),
            shifts_charge: false,
        }
    };
    op.coefficient(if dual { n } else { -n }, v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductMethod {
    Iterated,
    Explicit,
    Raising,
}

impl ProductMethod {
    pub const ALL: [ProductMethod; 3] = [Self::Iterated, Self::Explicit, Self::Raising];

    pub fn name(self) -> &'static str {
        match self {
            Self::Iterated => "iterated",
            Self::Explicit => "explicit",
            Self::Raising => "raising",
        }
    }
}

impl fmt::Display for ProductMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProductMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "iterated" => Ok(Self::Iterated),
            "explicit" => Ok(Self::Explicit),
            "raising" => Ok(Self::Raising),
            _ => Err(format!("unknown method {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ModeProductResult {
    pub vector: FockVector<Q>,
    pub modes: Vec<i64>,
    pub twice_charge_in: i64,
    pub method: ProductMethod,
}

/// `X_{-λ_s}⋯X_{-λ_1} e^{nh}` with `modes = [λ_1, …, λ_s]`; `λ_1` acts first.
pub fn product_x(
    method: ProductMethod,
    modes: &[i64],
    twice_charge_in: i64,
    alpha: &Q,
) -> Result<ModeProductResult, VertexError> {
    let vector = match method {
        ProductMethod::Iterated => product_x_iterated(modes, twice_charge_in, alpha)?,
        ProductMethod::Explicit => product_x_explicit(modes, twice_charge_in, alpha)?,
        ProductMethod::Raising => product_x_raising(modes, twice_charge_in, alpha)?,
    };
    Ok(ModeProductResult {
        vector,
        modes: modes.to_vec(),
        twice_charge_in,
        method,
    })
}

/// Modes of a partition in the order they act: `λ_1` first.
pub fn modes_of(lambda: &Partition) -> Vec<i64> {
    lambda.parts().iter().map(|&p| p as i64).collect()
}

pub fn product_x_iterated(modes: &[i64], twice_charge_in: i64, alpha: &Q) -> Result<FockVector<Q>, VertexError> {
    let mut v = FockVector::vacuum(twice_charge_in);
    for &k in modes {
        v = apply_x_mode(-k, &v, alpha)?;
    }
    Ok(v)
}

/// Chain weights `k_i = |λ^{(i)}| - i(2n+i)α` of the nested sum.
pub fn chain_weights(modes: &[i64], twice_charge_in: i64, alpha: &Q) -> Result<Vec<i64>, VertexError> {
    let mut partial = 0;
    let mut out = Vec::with_capacity(modes.len());
    for (idx, &m) in modes.iter().enumerate() {
        let i = idx as i64 + 1;
        partial += m;
        let value = int(partial) - alpha * int(i * (twice_charge_in + i));
        out.push(as_int(&value).ok_or(VertexError::NonIntegralWeight { step: i as usize, value })?);
    }
    Ok(out)
}

/// The closed nested sum over chains `μ^1, …, μ^s` with `|μ^i| = k_i`:
/// at each step keep `ρ ⊂' μ^{i-1}`, add a fresh `ν ⊢ k_i - |ρ|` and set
/// `μ^i = ρ ∪ ν`, weighting by `(-2α)^{l(ν)} z_ν^{-1} binom(m(μ^{i-1}), m(ρ))`;
/// finally divide by `(-2)^{l(μ^s)}`.
pub fn product_x_explicit(modes: &[i64], twice_charge_in: i64, alpha: &Q) -> Result<FockVector<Q>, VertexError> {
    check_alpha(alpha)?;
    let weights = chain_weights(modes, twice_charge_in, alpha)?;
    let twice_out = twice_charge_in + 2 * modes.len() as i64;
    if weights.iter().any(|&k| k < 0) {
        return Ok(FockVector::zero());
    }
    let fresh_scale = alpha * int(-2);
    let mut fresh: HashMap<u32, Vec<(Partition, Q)>> = HashMap::new();
    let mut states: HashMap<Partition, Q> = HashMap::from([(Partition::empty(), Q::one())]);
    for &k in &weights {
        let mut next: HashMap<Partition, Q> = HashMap::new();
        for (prev, c) in &states {
            for rho in prev.mult_subsets() {
                let Some(size) = (k as u64).checked_sub(rho.weight() as u64) else {
                    continue;
                };
                let size = size as u32;
                let keep = c * BigRational::from_integer(prev.mult_binomial(&rho));
                let table = fresh.entry(size).or_insert_with(|| {
                    partitions_cached(size)
                        .iter()
                        .map(|nu| (nu.clone(), creation_coeffs(&fresh_scale, nu)))
                        .collect()
                });
                for (nu, f) in table.iter() {
                    *next.entry(rho.mult_union(nu)).or_insert_with(Q::zero) += &keep * f;
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        states = next;
    }
    let minus_two = int(-2);
    Ok(FockVector::from_terms(states.into_iter().map(|(mu, c)| {
        let d = pow(&minus_two, mu.len());
        (mu, twice_out, c / d)
    })))
}

/// `∏_{i<j} (z_i - z_j)^{e}` over `s` plain variables.
fn difference_power(s: usize, e: u32) -> Result<LaurentSeries, VertexError> {
    let vars = Variables::plain("z", s);
    let mut acc = LaurentSeries::one(&vars);
    for i in 0..s {
        for j in i + 1..s {
            let mut ei = vec![0; s];
            ei[i] = 1;
            let mut ej = vec![0; s];
            ej[j] = 1;
            let diff = LaurentSeries::binomial_poly(&vars, &[(ei, 1), (ej, -1)]);
            acc = acc.mul(&diff.pow(e)?)?;
        }
    }
    Ok(acc)
}

/// Sends `Σ c_λ p_λ` to `Σ c_λ h_{-λ} ⊗ e^{(twice/2)h}`.
fn power_sums_to_fock(f: &SymFunc<Q>, twice_charge: i64) -> FockVector<Q> {
    FockVector::from_terms(f.terms().iter().map(|(l, c)| (l.clone(), twice_charge, c.clone())))
}

/// Coefficient of `z_1^{K_1}⋯z_s^{K_s}` in
/// `∏_{i<j} (z_i - z_j)^{2α} ∏ z_i^{(2n+1)α} ∏ Σ_m H_m z_i^m`, which is
/// `X_{-K_1}⋯X_{-K_s} e^{nh}`. The acting order is reversed relative to
/// `modes`, so `K_i = modes[s-i]`.
pub fn product_x_raising(modes: &[i64], twice_charge_in: i64, alpha: &Q) -> Result<FockVector<Q>, VertexError> {
    check_alpha(alpha)?;
    let two_alpha = twice_alpha(alpha)?;
    let shift = charge_exponent(twice_charge_in, alpha)?;
    let s = modes.len();
    let targets: Vec<i64> = modes.iter().rev().copied().collect();
    let mut h_indices: BTreeMap<Partition, Q> = BTreeMap::new();
    for (e, c) in difference_power(s, two_alpha)?.terms() {
        let idx: Vec<i64> = targets.iter().zip(e).map(|(k, x)| k - x - shift).collect();
        if idx.iter().any(|&r| r < 0) {
            continue;
        }
        let key = Partition::from_unsorted(idx.iter().filter(|&&r| r > 0).map(|&r| r as u32));
        *h_indices.entry(key).or_insert_with(Q::zero) += c;
    }
    let ring = SymRing::at(alpha.clone())?;
    let mut total = SymFunc::zero(Basis::PowerSum);
    for (mu, c) in h_indices {
        if !c.is_zero() {
            total = total.add(&ring.q_product(&mu).scale(&c))?;
        }
    }
    Ok(power_sums_to_fock(&total, twice_charge_in + 2 * s as i64))
}

/// Bidegree `(|λ| - α(2n+l)l, n + l)` predicted for a product on the vacuum,
/// or `None` when the weight is not a nonnegative integer.
pub fn expected_bidegree(modes: &[i64], twice_charge_in: i64, alpha: &Q) -> Option<Bidegree> {
    let l = modes.len() as i64;
    let w = int(modes.iter().sum()) - alpha * int((twice_charge_in + l) * l);
    let w = as_int(&w).filter(|&w| w >= 0)?;
    Some(Bidegree::Of {
        weight: w as u32,
        twice_charge: twice_charge_in + 2 * l,
    })
}

/// `T` applied to a product, as a symmetric function in power sums.
pub fn t_image(v: &FockVector<Q>) -> SymFunc<Q> {
    v.t_map()
}

/// Index sets for the vertex operator basis. `strict` is the hypothesis
/// `λ_l ≥ (2m+1)α`; the halved reading asks only `λ_l ≥ (2m+1)α/2`. Both
/// require gaps `λ_i - λ_{i+1} ≥ 2α`.
pub fn in_basis_index_set(lambda: &Partition, twice_m: i64, alpha: &Q, strict: bool) -> bool {
    let gap = alpha * int(2);
    let parts = lambda.parts();
    if parts.windows(2).any(|w| int(w[0] as i64 - w[1] as i64) < gap) {
        return false;
    }
    let Some(&last) = parts.last() else {
        return true;
    };
    let mut floor = alpha * int(twice_m + 1);
    if !strict {
        floor /= int(2);
    }
    int(last as i64) >= floor
}

/// `X_{-λ_1}⋯X_{-λ_l} e^{mh} = Σ_μ a_{λμ} H_{μ - (2m+1)α·1 - 2αδ} e^{(m+l)h}`,
/// with `a_{λμ}` read off from `∏_{i<j} (1 - R_{ij})^{2α}` applied to `λ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct JacobiTrudiExpansion {
    pub lambda: Partition,
    pub twice_m: i64,
    #[serde(serialize_with = "ser_display")]
    pub alpha: Q,
    /// Shift `(2m+1)α + 2α(l-i)` subtracted from `μ_i`.
    pub shifts: Vec<i64>,
    /// `μ ↦ a_{λμ}`; only terms whose H-index is nonnegative are kept.
    #[serde(serialize_with = "ser_terms")]
    pub terms: BTreeMap<Vec<i64>, BigInt>,
}

fn ser_display<S: serde::Serializer, T: fmt::Display>(x: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

fn ser_terms<S: serde::Serializer>(m: &BTreeMap<Vec<i64>, BigInt>, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct T<'a> {
        composition: &'a [i64],
        coeff: String,
    }
    s.collect_seq(m.iter().map(|(k, v)| T {
        composition: k,
        coeff: v.to_string(),
    }))
}

pub fn jacobi_trudi_expansion(lambda: &Partition, twice_m: i64, alpha: &Q) -> Result<JacobiTrudiExpansion, VertexError> {
    check_alpha(alpha)?;
    let two_alpha = twice_alpha(alpha)?;
    let base = charge_exponent(twice_m, alpha)?;
    let l = lambda.len();
    if let Some(&last) = lambda.parts().last() {
        if (last as i64) < base {
            return Err(VertexError::PreconditionViolated(format!(
                "last part {last} of {lambda:?} is below (2m+1)α = {base}"
            )));
        }
    }
    let shifts: Vec<i64> = (0..l)
        .map(|i| base + two_alpha as i64 * (l - 1 - i) as i64)
        .collect();
    let coeffs: Vec<BigInt> = (0..=two_alpha)
        .map(|e| {
            let b = binomial(two_alpha, e);
            if e % 2 == 0 { b } else { -b }
        })
        .collect();
    let mut states: HashMap<Vec<i64>, BigInt> = HashMap::from([(modes_of(lambda), BigInt::one())]);
    // Pairs grouped by their first index, last group first: once an entry has
    // been lowered it never rises again, so negative H-indices are final.
    for i in (0..l).rev() {
        for j in i + 1..l {
            let mut next: HashMap<Vec<i64>, BigInt> = HashMap::new();
            for (mu, c) in &states {
                for (e, b) in coeffs.iter().enumerate() {
                    // Entry j only decreases from here on.
                    if mu[j] - (e as i64) < shifts[j] {
                        break;
                    }
                    let mut nu = mu.clone();
                    nu[i] += e as i64;
                    nu[j] -= e as i64;
                    *next.entry(nu).or_insert_with(BigInt::zero) += c * b;
                }
            }
            next.retain(|_, c| !c.is_zero());
            states = next;
        }
        states.retain(|mu, _| mu[i] >= shifts[i]);
    }
    Ok(JacobiTrudiExpansion {
        lambda: lambda.clone(),
        twice_m,
        alpha: alpha.clone(),
        shifts,
        terms: states.into_iter().collect(),
    })
}

impl JacobiTrudiExpansion {
    pub fn h_index(&self, mu: &[i64]) -> Vec<i64> {
        mu.iter().zip(&self.shifts).map(|(m, s)| m - s).collect()
    }

    /// `Σ a_{λμ} q_{sort(H-index)}` in the generalized homogeneous basis.
    pub fn to_q_basis(&self) -> SymFunc<Q> {
        let mut f = SymFunc::zero(Basis::GenHomogeneous);
        for (mu, c) in &self.terms {
            let idx = self.h_index(mu);
            let key = Partition::from_unsorted(idx.iter().filter(|&&r| r > 0).map(|&r| r as u32));
            f.add_term(key, BigRational::from_integer(c.clone()));
        }
        f
    }

    /// The modes in acting order: `λ_l` first.
    pub fn acting_modes(&self) -> Vec<i64> {
        modes_of(&self.lambda).into_iter().rev().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RectangularJack {
    pub lambda: Partition,
    pub twice_charge_in: i64,
    pub jack_index: Partition,
    #[serde(serialize_with = "ser_display")]
    pub constant: Q,
}

/// The constant `(-1)^{s(s-1+2t)/2} s!` predicted at α = 1.
pub fn rectangular_constant_at_one(s: usize, t: usize) -> Q {
    let fact = (1..=s as i64).fold(int(1), |acc, i| acc * int(i));
    if (s * (s - 1 + 2 * t) / 2) % 2 == 0 {
        fact
    } else {
        -fact
    }
}

/// Evaluates `T(X_{-λ} e^{-(s+t-r)h/2})` for `λ = ((k+1)^s, k^t)` and
/// returns the scalar `c` with `T(…) = c Q_{λ - rα·1}`.
pub fn rectangular_jack(k: u32, s: usize, t: usize, alpha: &Q, r: i64) -> Result<RectangularJack, VertexError> {
    check_alpha(alpha)?;
    if s == 0 || t > 1 {
        return Err(VertexError::PreconditionViolated(format!("need s > 0 and t ∈ {{0,1}}, got s={s}, t={t}")));
    }
    if r != 0 && as_int(alpha).is_none() {
        return Err(VertexError::PreconditionViolated("shifted shapes need a positive integer α".into()));
    }
    let cap = k as i64 + i64::from(t == 0);
    let shift = alpha * int(r);
    if shift > int(cap) {
        return Err(VertexError::PreconditionViolated(format!("rα = {shift} exceeds {cap}")));
    }
    let mut modes: Vec<i64> = vec![k as i64; t];
    modes.extend(std::iter::repeat_n(k as i64 + 1, s));
    let twice_charge_in = -((s + t) as i64 - r);
    let lambda = Partition::from_unsorted(modes.iter().map(|&m| m as u32).filter(|&m| m > 0));
    let target_parts: Vec<i64> = modes.iter().map(|&m| as_int(&(int(m) - &shift)).expect("integral shift")).collect();
    if target_parts.iter().any(|&p| p < 0) {
        return Err(VertexError::PreconditionViolated("shifted shape has a negative part".into()));
    }
    let jack_index = Partition::from_unsorted(target_parts.iter().filter(|&&p| p > 0).map(|&p| p as u32));
    let product = t_image(&product_x_explicit(&modes, twice_charge_in, alpha)?);
    if product.is_zero() {
        return Err(VertexError::VanishingProduct);
    }
    let ring = SymRing::at(alpha.clone())?;
    let jack = ring.to_power_sum(&SymFunc::basis_element(Basis::JackQ, jack_index.clone()))?;
    let (lead, lead_c) = jack.terms().iter().next().expect("Jack functions are nonzero");
    let constant = product.coeff(lead) / lead_c;
    if product.sub(&jack.scale(&constant))?.is_zero() {
        Ok(RectangularJack {
            lambda,
            twice_charge_in,
            jack_index,
            constant,
        })
    } else {
        Err(VertexError::NotProportional {
            target: jack_index,
            product,
            jack,
        })
    }
}

/// Both evaluations of the mixed matrix coefficient.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OpeCoefficient {
    pub w_exponents: Vec<u32>,
    pub z_exponents: Vec<i64>,
    pub alpha: u32,
    #[serde(serialize_with = "ser_display")]
    pub fock: Q,
    #[serde(serialize_with = "ser_display")]
    pub series: Q,
    /// Sign with `fock = sign · series`.
    pub sign: i64,
}

/// Coefficient of `w^{-m} z^k` in
/// `⟨Y*(w_1)⋯Y*(w_r) X(z_1)⋯X(z_L) e^{-Lh/2}, e^{Lh/2}⟩`, `L = s + t`,
/// computed in the Fock space and from the contraction series.
pub fn ope_matrix_coefficient(
    s: usize,
    t: usize,
    alpha: u32,
    w_exponents: &[u32],
    z_exponents: &[i64],
) -> Result<OpeCoefficient, VertexError> {
    let l = s + t;
    if z_exponents.len() != l || alpha == 0 {
        return Err(VertexError::PreconditionViolated(format!(
            "need {l} z-exponents and positive α"
        )));
    }
    let a = int(alpha as i64);
    let acting: Vec<i64> = z_exponents.iter().rev().copied().collect();
    let mut v = product_x_iterated(&acting, -(l as i64), &a)?;
    for &m in w_exponents.iter().rev() {
        v = apply_y_mode(-(m as i64), &v, &a, &Q::zero(), true)?;
    }
    let fock = v.coeff(&Partition::empty(), l as i64);
    let series = contraction_coeff(l, &a, w_exponents, z_exponents)?;
    let sign = ordered_form_sign(alpha, l);
    if fock != &series * int(sign) {
        return Err(VertexError::MethodsDisagree { fock, series, sign });
    }
    Ok(OpeCoefficient {
        w_exponents: w_exponents.to_vec(),
        z_exponents: z_exponents.to_vec(),
        alpha,
        fock,
        series,
        sign,
    })
}

/// Nonzero monomials of `H_α(Z_L, W_r)` through `Σ m ≤ bound`, sorted, for
/// sampling matrix coefficients.
pub fn ope_support(l: usize, r: usize, alpha: u32, bound: i64) -> Result<Vec<(Vec<u32>, Vec<i64>)>, VertexError> {
    let series = contraction::contraction_function(l, r, &int(alpha as i64), bound)?;
    Ok(series
        .sorted_terms()
        .into_iter()
        .map(|(e, _)| {
            let m = e[..r].iter().map(|&x| (-x) as u32).collect();
            (m, e[r..].to_vec())
        })
        .collect())
}
