//! Truncated multivariate Laurent series and the contraction functions
//! produced by normal ordering vertex operators.
//!
//! A series lives over an ordered list of variables. The order is the
//! expansion region: earlier variables dominate later ones, so `(1 - z/w)^{-1}`
//! may be expanded as a geometric series when `w` precedes `z`, and the
//! reverse expansion is refused. Each variable carries an integer grading
//! weight; a series records the graded degree up to which it is exact and
//! never reports a coefficient beyond it.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactscalar::{int, BigRational};
use crate::partitions::binomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ContractionError {
    #[error("cannot expand (1 - u)^e with u = {0:?} against the variable order")]
    WrongRegion(Vec<i64>),
    #[error("infinite expansion of (1 - u)^e with u = {0:?} needs u of positive graded degree and a truncation bound")]
    Unbounded(Vec<i64>),
    #[error("coefficient at graded degree {degree} lies beyond the exact bound {bound}")]
    TruncationInsufficient { degree: i64, bound: i64 },
    #[error("series are over different variables")]
    VariableMismatch,
    #[error("exponent vector has length {got}, expected {expected}")]
    Arity { got: usize, expected: usize },
    #[error("α must be a positive integer here, got {0}")]
    NonIntegerAlpha(BigRational),
    #[error("exponent {0} is not an integer")]
    NonIntegralExponent(BigRational),
    #[error("({s}, {n}) lies outside the supported envelope 2 ≤ s ≤ 3, 1 ≤ n ≤ 3")]
    EnvelopeExceeded { s: usize, n: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("evaluation point is a pole")]
    Pole,
}

/// Ordered variable names with their grading weights.
#[derive(Debug, PartialEq, Eq)]
pub struct Variables {
    names: Vec<String>,
    grading: Vec<i64>,
}

impl Variables {
    pub fn new(names: Vec<String>, grading: Vec<i64>) -> Arc<Self> {
        assert_eq!(names.len(), grading.len(), "one grading weight per variable");
        Arc::new(Variables { names, grading })
    }

    /// Variables `w_1..w_t, z_1..z_s` graded by `w ↦ -1`, `z ↦ 0`, so the
    /// graded degree of `w^{-m} z^k` is `Σ m`.
    pub fn contraction(s: usize, t: usize) -> Arc<Self> {
        let names = (1..=t)
            .map(|i| format!("w{i}"))
            .chain((1..=s).map(|i| format!("z{i}")))
            .collect();
        let grading = std::iter::repeat_n(-1, t)
            .chain(std::iter::repeat_n(0, s))
            .collect();
        Self::new(names, grading)
    }

    /// Ungraded variables `x_1..x_n`.
    pub fn plain(prefix: &str, n: usize) -> Arc<Self> {
        Self::new(
            (1..=n).map(|i| format!("{prefix}{i}")).collect(),
            vec![0; n],
        )
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn degree(&self, exps: &[i64]) -> i64 {
        exps.iter().zip(&self.grading).map(|(e, g)| e * g).sum()
    }

    /// `u` is small in the expansion region: its first nonzero exponent is
    /// negative, or it is a nonconstant monomial with no negative exponent.
    pub fn is_small(&self, u: &[i64]) -> bool {
        match u.iter().find(|&&e| e != 0) {
            None => false,
            Some(&e) if e < 0 => true,
            Some(_) => u.iter().all(|&e| e >= 0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries {
    vars: Arc<Variables>,
    terms: HashMap<Vec<i64>, BigRational>,
    /// Exact for graded degree `≤ bound`; `None` for an exact polynomial.
    bound: Option<i64>,
}

fn min_bound(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl LaurentSeries {
    pub fn zero(vars: &Arc<Variables>) -> Self {
        LaurentSeries {
            vars: vars.clone(),
            terms: HashMap::new(),
            bound: None,
        }
    }

    pub fn one(vars: &Arc<Variables>) -> Self {
        Self::monomial(vars, vec![0; vars.len()], BigRational::one())
    }

    pub fn monomial(vars: &Arc<Variables>, exps: Vec<i64>, c: BigRational) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent arity");
        let mut s = Self::zero(vars);
        if !c.is_zero() {
            s.terms.insert(exps, c);
        }
        s
    }

    /// `1 - x_i/x_j` style binomials: `a·x^e + b·x^f`.
    pub fn binomial_poly(vars: &Arc<Variables>, terms: &[(Vec<i64>, i64)]) -> Self {
        let mut s = Self::zero(vars);
        for (e, c) in terms {
            s.add_term(e.clone(), int(*c));
        }
        s
    }

    pub fn vars(&self) -> &Arc<Variables> {
        &self.vars
    }

    pub fn bound(&self) -> Option<i64> {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &BigRational)> {
        self.terms.iter()
    }

    /// Terms in lexicographic exponent order.
    pub fn sorted_terms(&self) -> Vec<(Vec<i64>, BigRational)> {
        let sorted: BTreeMap<_, _> = self.terms.iter().map(|(e, c)| (e.clone(), c.clone())).collect();
        sorted.into_iter().collect()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().map(|e| self.vars.degree(e)).min()
    }

    fn add_term(&mut self, exps: Vec<i64>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        if let Some(b) = self.bound {
            if self.vars.degree(&exps) > b {
                return;
            }
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Drops everything above graded degree `bound`.
    pub fn truncate(&self, bound: i64) -> Self {
        let bound = min_bound(self.bound, Some(bound));
        let mut out = LaurentSeries {
            vars: self.vars.clone(),
            terms: HashMap::new(),
            bound,
        };
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self {
            terms: HashMap::new(),
            ..self.clone()
        };
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self, ContractionError> {
        self.check_vars(other)?;
        let mut out = self.truncate_opt(min_bound(self.bound, other.bound));
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ContractionError> {
        self.add(&other.scale(&-BigRational::one()))
    }

    /// Product; exact up to `min(bound_a + mindeg_b, bound_b + mindeg_a)`.
    pub fn mul(&self, other: &Self) -> Result<Self, ContractionError> {
        self.check_vars(other)?;
        let (la, lb) = (self.min_degree(), other.min_degree());
        if la.is_none() || lb.is_none() {
            let mut z = Self::zero(&self.vars);
            z.bound = min_bound(self.bound, other.bound);
            return Ok(z);
        }
        let (la, lb) = (la.unwrap(), lb.unwrap());
        let bound = min_bound(
            self.bound.map(|p| p + lb),
            other.bound.map(|p| p + la),
        );
        let mut right: Vec<(i64, &Vec<i64>, &BigRational)> = other
            .terms
            .iter()
            .map(|(e, c)| (self.vars.degree(e), e, c))
            .collect();
        right.sort_by_key(|t| t.0);
        let mut out = LaurentSeries {
            vars: self.vars.clone(),
            terms: HashMap::new(),
            bound,
        };
        for (ea, ca) in &self.terms {
            let da = self.vars.degree(ea);
            for (db, eb, cb) in &right {
                if bound.is_some_and(|b| da + db > b) {
                    break;
                }
                let e: Vec<i64> = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * *cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self, ContractionError> {
        let mut acc = Self::one(&self.vars);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn coeff(&self, exps: &[i64]) -> Result<BigRational, ContractionError> {
        if exps.len() != self.vars.len() {
            return Err(ContractionError::Arity {
                got: exps.len(),
                expected: self.vars.len(),
            });
        }
        let degree = self.vars.degree(exps);
        if let Some(bound) = self.bound {
            if degree > bound {
                return Err(ContractionError::TruncationInsufficient { degree, bound });
            }
        }
        Ok(self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero))
    }

    /// True when no term has a negative exponent in variable `idx`.
    pub fn is_polynomial_in(&self, idx: usize) -> bool {
        self.terms.keys().all(|e| e[idx] >= 0)
    }

    /// Re-expresses the series over `target`, sending variable `i` to
    /// `target` position `map[i]`.
    pub fn embed(&self, target: &Arc<Variables>, map: &[usize]) -> Self {
        let mut out = LaurentSeries {
            vars: target.clone(),
            terms: HashMap::new(),
            bound: self.bound,
        };
        for (e, c) in &self.terms {
            let mut f = vec![0; target.len()];
            for (i, &x) in e.iter().enumerate() {
                f[map[i]] += x;
            }
            out.add_term(f, c.clone());
        }
        out
    }

    /// Evaluates an exact Laurent polynomial at a point.
    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational, ContractionError> {
        if self.bound.is_some() {
            return Err(ContractionError::InvalidArgument(
                "only exact polynomials can be evaluated".into(),
            ));
        }
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if x.is_zero() && k < 0 {
                    return Err(ContractionError::Pole);
                }
                term *= num_traits::pow::Pow::pow(x, k as i32);
            }
            acc += term;
        }
        Ok(acc)
    }

    fn truncate_opt(&self, bound: Option<i64>) -> Self {
        match bound {
            Some(b) => self.truncate(b),
            None => self.clone(),
        }
    }

    fn check_vars(&self, other: &Self) -> Result<(), ContractionError> {
        if self.vars != other.vars {
            return Err(ContractionError::VariableMismatch);
        }
        Ok(())
    }
}

impl Serialize for LaurentSeries {
    /// An array of `{"exponents": [...], "coeff": "p/q"}` in lexicographic
    /// exponent order.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            exponents: &'a [i64],
            coeff: String,
        }
        let sorted = self.sorted_terms();
        let mut seq = serializer.serialize_seq(Some(sorted.len()))?;
        for (e, c) in &sorted {
            seq.serialize_element(&Term {
                exponents: e,
                coeff: c.to_string(),
            })?;
        }
        seq.end()
    }
}

/// Generalized binomial coefficient `binom(e, n)` for rational `e`.
pub fn rational_binomial(e: &BigRational, n: u32) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..n {
        acc = acc * (e - int(i as i64)) / int(i as i64 + 1);
    }
    acc
}

fn as_integer(q: &BigRational) -> Option<i64> {
    q.is_integer().then(|| q.to_integer().to_i64()).flatten()
}

/// `(1 - u)^e` for a monomial `u`. Nonnegative integer powers are exact
/// polynomials; any other power is a series that must converge in the
/// expansion region and is truncated at graded degree `bound`.
pub fn expand_binomial_power(
    vars: &Arc<Variables>,
    u: &[i64],
    e: &BigRational,
    bound: Option<i64>,
) -> Result<LaurentSeries, ContractionError> {
    if u.len() != vars.len() {
        return Err(ContractionError::Arity {
            got: u.len(),
            expected: vars.len(),
        });
    }
    let scaled = |n: u32| -> Vec<i64> { u.iter().map(|x| x * n as i64).collect() };
    let sign = |n: u32| if n % 2 == 0 { int(1) } else { int(-1) };
    if let Some(k) = as_integer(e).filter(|&k| k >= 0) {
        let mut s = LaurentSeries::zero(vars);
        for n in 0..=k as u32 {
            s.add_term(scaled(n), BigRational::from_integer(binomial(k as u32, n)) * sign(n));
        }
        return Ok(match bound {
            Some(b) => s.truncate(b),
            None => s,
        });
    }
    if !vars.is_small(u) {
        return Err(ContractionError::WrongRegion(u.to_vec()));
    }
    let step = vars.degree(u);
    let Some(bound) = bound.filter(|_| step > 0) else {
        return Err(ContractionError::Unbounded(u.to_vec()));
    };
    let mut s = LaurentSeries {
        vars: vars.clone(),
        terms: HashMap::new(),
        bound: Some(bound),
    };
    let mut n = 0u32;
    while step * n as i64 <= bound {
        s.add_term(scaled(n), rational_binomial(e, n) * sign(n));
        n += 1;
    }
    Ok(s)
}

/// `u = x_j / x_i` as an exponent vector.
fn ratio(len: usize, num: usize, den: usize) -> Vec<i64> {
    let mut u = vec![0; len];
    u[num] += 1;
    u[den] -= 1;
    u
}

fn positive_integer(alpha: &BigRational) -> Result<u32, ContractionError> {
    as_integer(alpha)
        .filter(|&a| a > 0)
        .map(|a| a as u32)
        .ok_or_else(|| ContractionError::NonIntegerAlpha(alpha.clone()))
}

/// `∏_j ∏_i (1 - z_j/w_i)^{-α}` over [`Variables::contraction`], truncated at
/// `bound`.
fn w_factor(
    vars: &Arc<Variables>,
    s: usize,
    t: usize,
    alpha: &BigRational,
    bound: i64,
) -> Result<LaurentSeries, ContractionError> {
    let mut acc = LaurentSeries::one(vars).truncate(bound);
    for i in 0..t {
        for j in 0..s {
            let f = expand_binomial_power(vars, &ratio(s + t, t + j, i), &-alpha.clone(), Some(bound))?;
            acc = acc.mul(&f)?;
        }
    }
    Ok(acc)
}

/// `H_α(Z_s, W_t) = ∏_{i≠j} (1 - z_j/z_i)^α ∏_j ∏_i (1 - z_j/w_i)^{-α}`,
/// exact through `Σ m_i ≤ bound` for monomials `w^{-m} z^k`.
pub fn contraction_function(
    s: usize,
    t: usize,
    alpha: &BigRational,
    bound: i64,
) -> Result<LaurentSeries, ContractionError> {
    let a = positive_integer(alpha)?;
    let vars = Variables::contraction(s, t);
    let mut acc = w_factor(&vars, s, t, alpha, bound)?;
    for i in 0..s {
        for j in 0..s {
            if i != j {
                let f = expand_binomial_power(&vars, &ratio(s + t, t + j, t + i), &int(a as i64), None)?;
                acc = acc.mul(&f)?;
            }
        }
    }
    Ok(acc)
}

/// The ordered form produced directly by the vertex operator calculus:
/// `∏_i z_i^{(L-2i+1)α} ∏_{i<j} (1 - z_j/z_i)^{2α} ∏_j ∏_i (1 - z_j/w_i)^{-α}`.
/// For integer α it equals `(-1)^{αL(L-1)/2} H_α(Z_L, W_r)`; it also makes
/// sense for half-integer α whenever the prefactor exponents are integers.
pub fn ordered_contraction_function(
    l: usize,
    r: usize,
    alpha: &BigRational,
    bound: i64,
) -> Result<LaurentSeries, ContractionError> {
    let two_alpha = as_integer(&(alpha * int(2)))
        .filter(|&x| x >= 0)
        .ok_or_else(|| ContractionError::NonIntegralExponent(alpha * int(2)))?;
    let vars = Variables::contraction(l, r);
    let mut pre = vec![0i64; l + r];
    for i in 1..=l {
        let e = alpha * int(l as i64 - 2 * i as i64 + 1);
        pre[r + i - 1] = as_integer(&e).ok_or(ContractionError::NonIntegralExponent(e))?;
    }
    let mut acc = w_factor(&vars, l, r, alpha, bound)?
        .mul(&LaurentSeries::monomial(&vars, pre, BigRational::one()))?;
    for i in 0..l {
        for j in i + 1..l {
            let f = expand_binomial_power(&vars, &ratio(l + r, r + j, r + i), &int(two_alpha), None)?;
            acc = acc.mul(&f)?;
        }
    }
    Ok(acc)
}

/// Exponent vector of `w^{-m} z^k` over [`Variables::contraction`].
pub fn contraction_exponents(m: &[u32], k: &[i64]) -> Vec<i64> {
    m.iter().map(|&x| -(x as i64)).chain(k.iter().copied()).collect()
}

/// Coefficient of `w_1^{-m_1}⋯w_t^{-m_t} z_1^{k_1}⋯z_s^{k_s}` in
/// `H_α(Z_s, W_t)`, computed at the minimal sufficient truncation `Σ m`.
pub fn contraction_coeff(
    s: usize,
    alpha: &BigRational,
    m: &[u32],
    k: &[i64],
) -> Result<BigRational, ContractionError> {
    if k.len() != s {
        return Err(ContractionError::Arity {
            got: k.len(),
            expected: s,
        });
    }
    let mut bound: i64 = m.iter().map(|&x| x as i64).sum();
    loop {
        let series = contraction_function(s, m.len(), alpha, bound)?;
        match series.coeff(&contraction_exponents(m, k)) {
            Err(ContractionError::TruncationInsufficient { .. }) => bound = 2 * bound + 1,
            other => return other,
        }
    }
}

/// Result of scanning a contraction series for forbidden monomials
/// `w^{-m} z^k` with `m_1 > max_i k_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VanishingScan {
    pub s: usize,
    pub t: usize,
    pub alpha: String,
    pub max_degree: i64,
    pub terms_scanned: usize,
    pub forbidden_monomials: usize,
    pub violations: Vec<(Vec<i64>, String)>,
}

fn scan_series(series: &LaurentSeries, s: usize, t: usize, alpha: &BigRational, max_degree: i64) -> VanishingScan {
    let mut violations = Vec::new();
    let mut forbidden = 0;
    for (e, c) in series.sorted_terms() {
        if t == 0 || s == 0 {
            continue;
        }
        let m1 = -e[0];
        let max_k = e[t..].iter().copied().max().expect("s > 0");
        if m1 > max_k {
            forbidden += 1;
            violations.push((e, c.to_string()));
        }
    }
    VanishingScan {
        s,
        t,
        alpha: alpha.to_string(),
        max_degree,
        terms_scanned: series.len(),
        forbidden_monomials: forbidden,
        violations,
    }
}

/// Scans every monomial of `H_α(Z_s, W_t)` with `Σ m ≤ max_degree`.
pub fn vanishing_scan(
    s: usize,
    t: usize,
    alpha: &BigRational,
    max_degree: i64,
) -> Result<VanishingScan, ContractionError> {
    let series = contraction_function(s, t, alpha, max_degree)?;
    Ok(scan_series(&series, s, t, alpha, max_degree))
}

/// The same scan on [`ordered_contraction_function`], usable for
/// half-integer α.
pub fn ordered_vanishing_scan(
    l: usize,
    r: usize,
    alpha: &BigRational,
    max_degree: i64,
) -> Result<VanishingScan, ContractionError> {
    let series = ordered_contraction_function(l, r, alpha, max_degree)?;
    Ok(scan_series(&series, l, r, alpha, max_degree))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VandermondeTarget {
    /// `∏ x_i^{s-1}`.
    Diagonal,
    /// `x_k x_s^{-1} ∏ x_i^{s-1}` for `1 ≤ k ≤ s-1`.
    OffDiagonal(usize),
}

/// Coefficient of the named monomial in `∏_{i<j} (x_i - x_j)^2`, by full
/// expansion.
pub fn vandermonde_square_coeff(s: usize, target: VandermondeTarget) -> Result<BigInt, ContractionError> {
    if s < 2 {
        return Err(ContractionError::InvalidArgument("need s ≥ 2".into()));
    }
    let vars = Variables::plain("x", s);
    let mut acc = LaurentSeries::one(&vars);
    for i in 0..s {
        for j in i + 1..s {
            let mut ei = vec![0; s];
            ei[i] = 1;
            let mut ej = vec![0; s];
            ej[j] = 1;
            let diff = LaurentSeries::binomial_poly(&vars, &[(ei, 1), (ej, -1)]);
            acc = acc.mul(&diff)?.mul(&diff)?;
        }
    }
    let mut exps = vec![s as i64 - 1; s];
    if let VandermondeTarget::OffDiagonal(k) = target {
        if k == 0 || k >= s {
            return Err(ContractionError::InvalidArgument(format!("k = {k} not in 1..{s}")));
        }
        exps[k - 1] += 1;
        exps[s - 1] -= 1;
    }
    Ok(acc.coeff(&exps)?.to_integer())
}

/// The closed forms `(-1)^{s(s-1)/2} s!` and `-(-1)^{s(s-1)/2} (s-1)!`.
pub fn vandermonde_expected(s: usize, target: VandermondeTarget) -> BigInt {
    let sign = if (s * (s - 1) / 2) % 2 == 0 { 1 } else { -1 };
    let fact = |n: usize| (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
    match target {
        VandermondeTarget::Diagonal => fact(s) * sign,
        VandermondeTarget::OffDiagonal(_) => -fact(s - 1) * sign,
    }
}

/// Coefficients with `a^r b^s = Σ_{m=1}^r f_m a^m + Σ_{n=1}^s g_n b^n`
/// whenever `ab = a + b`. `f[m-1]` holds `f_m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitPair {
    #[serde(serialize_with = "as_strings")]
    pub f: Vec<BigInt>,
    #[serde(serialize_with = "as_strings")]
    pub g: Vec<BigInt>,
}

fn as_strings<S: Serializer>(v: &[BigInt], serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_seq(v.iter().map(|x| x.to_string()))
}

/// Repeatedly rewrites `ab` as `a + b`.
pub fn split_pair(r: usize, s: usize) -> Result<SplitPair, ContractionError> {
    if r == 0 || s == 0 {
        return Err(ContractionError::InvalidArgument("r and s must be positive".into()));
    }
    // split(r, s) = split(r, s-1) + split(r-1, s); a^r b^0 and a^0 b^s are leaves.
    let mut table: Vec<Vec<SplitPair>> = Vec::with_capacity(r + 1);
    for i in 0..=r {
        let mut row = Vec::with_capacity(s + 1);
        for j in 0..=s {
            let mut cell = SplitPair {
                f: vec![BigInt::zero(); r],
                g: vec![BigInt::zero(); s],
            };
            if i == 0 && j > 0 {
                cell.g[j - 1] = BigInt::one();
            } else if j == 0 && i > 0 {
                cell.f[i - 1] = BigInt::one();
            } else if i > 0 && j > 0 {
                let left: &SplitPair = &row[j - 1];
                let up: &SplitPair = &table[i - 1][j];
                for m in 0..r {
                    cell.f[m] = &left.f[m] + &up.f[m];
                }
                for n in 0..s {
                    cell.g[n] = &left.g[n] + &up.g[n];
                }
            }
            row.push(cell);
        }
        table.push(row);
    }
    Ok(table.swap_remove(r).swap_remove(s))
}

/// `a = (1 - z_i/z_j)/(1 - z_i/w)` and `b = (1 - z_j/z_i)/(1 - z_j/w)` at a point.
pub fn split_variables_at(
    zi: &BigRational,
    zj: &BigRational,
    w: &BigRational,
) -> Result<(BigRational, BigRational), ContractionError> {
    let one = BigRational::one();
    if zi.is_zero() || zj.is_zero() || w.is_zero() || zi == w || zj == w {
        return Err(ContractionError::Pole);
    }
    let a = (&one - zi / zj) / (&one - zi / w);
    let b = (&one - zj / zi) / (&one - zj / w);
    Ok((a, b))
}

/// `a^r b^s - Σ f_m a^m - Σ g_n b^n` at the given point.
pub fn split_pair_residual(
    split: &SplitPair,
    zi: &BigRational,
    zj: &BigRational,
    w: &BigRational,
) -> Result<BigRational, ContractionError> {
    let (a, b) = split_variables_at(zi, zj, w)?;
    let pow = |x: &BigRational, k: usize| num_traits::pow::Pow::pow(x, k as u32);
    let mut res = pow(&a, split.f.len()) * pow(&b, split.g.len());
    for (m, f) in split.f.iter().enumerate() {
        res -= BigRational::from_integer(f.clone()) * pow(&a, m + 1);
    }
    for (n, g) in split.g.iter().enumerate() {
        res -= BigRational::from_integer(g.clone()) * pow(&b, n + 1);
    }
    Ok(res)
}

/// The decomposition `H_n(Z_s, w) = Σ_i Σ_j (1 - z_i/w)^{-j} f_{i,j}` with
/// each `f_{i,j}` an exact Laurent polynomial in `z_1..z_s`.
#[derive(Clone, Debug)]
pub struct SplitFull {
    pub s: usize,
    pub n: usize,
    pub z_vars: Arc<Variables>,
    /// Keyed by `(i, j)`, both 1-based.
    pub parts: BTreeMap<(usize, usize), LaurentSeries>,
}

/// `∏ (1 - x_a/x_b)^e` over a list of `(a, b)` index pairs.
fn ratio_product(vars: &Arc<Variables>, pairs: &[(usize, usize)], e: u32) -> Result<LaurentSeries, ContractionError> {
    let mut acc = LaurentSeries::one(vars);
    for &(a, b) in pairs {
        let f = expand_binomial_power(vars, &ratio(vars.len(), a, b), &int(e as i64), None)?;
        acc = acc.mul(&f)?;
    }
    Ok(acc)
}

/// Builds the decomposition by induction on `s`, starting from
/// `H_n(Z_1, w) = (1 - z_1/w)^{-n}` and multiplying by
/// `A_{s+1} = ∏_{i≤s} (1 - z_i/z_{s+1})^n (1 - z_{s+1}/z_i)^n (1 - z_{s+1}/w)^{-n}`,
/// splitting each resulting `a^j b^n` with [`split_pair`].
pub fn split_full(s: usize, n: usize) -> Result<SplitFull, ContractionError> {
    if !(2..=3).contains(&s) || !(1..=3).contains(&n) {
        return Err(ContractionError::EnvelopeExceeded { s, n });
    }
    let vars = Variables::plain("z", s);
    let mut parts: BTreeMap<(usize, usize), LaurentSeries> = BTreeMap::new();
    parts.insert((1, n), LaurentSeries::one(&vars));
    for new in 1..s {
        let mut next: BTreeMap<(usize, usize), LaurentSeries> = BTreeMap::new();
        let mut push = |key: (usize, usize), v: LaurentSeries| -> Result<(), ContractionError> {
            let merged = match next.remove(&key) {
                Some(old) => old.add(&v)?,
                None => v,
            };
            next.insert(key, merged);
            Ok(())
        };
        for (&(i, j), f) in &parts {
            let i0 = i - 1;
            let others: Vec<(usize, usize)> = (0..new)
                .filter(|&k| k != i0)
                .flat_map(|k| [(k, new), (new, k)])
                .collect();
            let b_factor = ratio_product(&vars, &[(i0, new)], (n - j) as u32)?
                .mul(&ratio_product(&vars, &others, n as u32)?)?
                .mul(f)?;
            let split = split_pair(j, n)?;
            for (m, c) in split.f.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let term = ratio_product(&vars, &[(i0, new)], m as u32 + 1)?
                    .mul(&b_factor)?
                    .scale(&BigRational::from_integer(c.clone()));
                push((i, m + 1), term)?;
            }
            for (m, c) in split.g.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let term = ratio_product(&vars, &[(new, i0)], m as u32 + 1)?
                    .mul(&b_factor)?
                    .scale(&BigRational::from_integer(c.clone()));
                push((new + 1, m + 1), term)?;
            }
        }
        parts = next;
    }
    parts.retain(|_, v| !v.is_zero());
    Ok(SplitFull {
        s,
        n,
        z_vars: vars,
        parts,
    })
}

impl SplitFull {
    /// `Σ (1 - z_i/w)^{-j} f_{i,j}` as a series over
    /// `Variables::contraction(s, 1)`, exact through w-degree `bound`.
    pub fn resum(&self, bound: i64) -> Result<LaurentSeries, ContractionError> {
        let vars = Variables::contraction(self.s, 1);
        let map: Vec<usize> = (1..=self.s).collect();
        let mut acc = LaurentSeries::zero(&vars).truncate(bound);
        for (&(i, j), f) in &self.parts {
            let pole = expand_binomial_power(&vars, &ratio(self.s + 1, i, 0), &int(-(j as i64)), Some(bound))?;
            acc = acc.add(&pole.mul(&f.embed(&vars, &map))?)?;
        }
        Ok(acc)
    }

    /// Compares the re-summation with `H_n(Z_s, w)` through w-degree `bound`.
    pub fn resum_matches(&self, bound: i64) -> Result<bool, ContractionError> {
        let lhs = self.resum(bound)?;
        let rhs = contraction_function(self.s, 1, &int(self.n as i64), bound)?;
        Ok(lhs.sub(&rhs)?.is_zero())
    }

    /// Every `f_{i,j}` has no negative power of `z_i`.
    pub fn polynomial_in_own_variable(&self) -> bool {
        self.parts.iter().all(|(&(i, _), f)| f.is_polynomial_in(i - 1))
    }

    /// `f_{1,n} = ∏_{i≥2} (1 - z_1/z_i)^n ∏_{2≤i≠j} (1 - z_i/z_j)^n`.
    pub fn leading_closed_form(&self) -> Result<LaurentSeries, ContractionError> {
        let mut pairs: Vec<(usize, usize)> = (1..self.s).map(|i| (0, i)).collect();
        for i in 1..self.s {
            for j in 1..self.s {
                if i != j {
                    pairs.push((i, j));
                }
            }
        }
        ratio_product(&self.z_vars, &pairs, self.n as u32)
    }

    pub fn leading_matches_closed_form(&self) -> Result<bool, ContractionError> {
        let got = self
            .parts
            .get(&(1, self.n))
            .cloned()
            .unwrap_or_else(|| LaurentSeries::zero(&self.z_vars));
        Ok(got.sub(&self.leading_closed_form()?)?.is_zero())
    }
}

/// `(-1)^{αL(L-1)/2}`, the sign relating the ordered and symmetric forms.
pub fn ordered_form_sign(alpha: u32, l: usize) -> i64 {
    if (alpha as u64 * (l as u64) * (l as u64).saturating_sub(1) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactscalar::rat;

    #[test]
    fn binomial_examples() {
        let vars = Variables::contraction(1, 1);
        let u = vec![-1, 1];
        let sq = expand_binomial_power(&vars, &u, &int(2), None).unwrap();
        assert_eq!(sq.bound(), None);
        assert_eq!(sq.coeff(&[0, 0]).unwrap(), int(1));
        assert_eq!(sq.coeff(&[-1, 1]).unwrap(), int(-2));
        assert_eq!(sq.coeff(&[-2, 2]).unwrap(), int(1));
        assert_eq!(sq.len(), 3);
        let geo = expand_binomial_power(&vars, &u, &int(-1), Some(3)).unwrap();
        for n in 0..=3 {
            assert_eq!(geo.coeff(&[-n, n]).unwrap(), int(1));
        }
        assert_eq!(geo.len(), 4);
        assert!(matches!(
            geo.coeff(&[-4, 4]),
            Err(ContractionError::TruncationInsufficient { degree: 4, bound: 3 })
        ));
        let unit = expand_binomial_power(&vars, &u, &int(0), None).unwrap();
        assert_eq!(unit, LaurentSeries::one(&vars));
        assert_eq!(
            expand_binomial_power(&vars, &[1, -1], &int(-1), Some(3)),
            Err(ContractionError::WrongRegion(vec![1, -1]))
        );
        let half = expand_binomial_power(&vars, &u, &rat(-1, 2), Some(2)).unwrap();
        assert_eq!(half.coeff(&[-2, 2]).unwrap(), rat(3, 8));
    }

    #[test]
    fn multiplication_tracks_precision() {
        let vars = Variables::contraction(1, 1);
        let geo = expand_binomial_power(&vars, &[-1, 1], &int(-1), Some(5)).unwrap();
        let lin = expand_binomial_power(&vars, &[-1, 1], &int(1), None).unwrap();
        let prod = geo.mul(&lin).unwrap();
        assert_eq!(prod.bound(), Some(5));
        assert_eq!(prod.sorted_terms(), vec![(vec![0, 0], int(1))]);
        let shifted = geo.mul(&LaurentSeries::monomial(&vars, vec![-2, 0], int(1))).unwrap();
        assert_eq!(shifted.bound(), Some(7));
    }

    #[test]
    fn vandermonde_small() {
        assert_eq!(vandermonde_square_coeff(2, VandermondeTarget::Diagonal).unwrap(), BigInt::from(-2));
        assert_eq!(vandermonde_square_coeff(2, VandermondeTarget::OffDiagonal(1)).unwrap(), BigInt::from(1));
        assert_eq!(vandermonde_square_coeff(3, VandermondeTarget::Diagonal).unwrap(), BigInt::from(-6));
    }

    #[test]
    fn contraction_examples() {
        // Forbidden monomial w^{-3} z1^2 z2^2 at α = 1.
        assert_eq!(contraction_coeff(2, &int(1), &[3], &[2, 2]).unwrap(), int(0));
        // No pairs and no w: H = 1.
        assert_eq!(contraction_coeff(1, &int(1), &[], &[2]).unwrap(), int(0));
        assert_eq!(contraction_coeff(1, &int(1), &[], &[0]).unwrap(), int(1));
        // (2 - z2/z1 - z1/z2)/((1 - z1/w)(1 - z2/w)): w^{-2} z1^0 z2^2 has coefficient 1.
        assert_eq!(contraction_coeff(2, &int(1), &[2], &[0, 2]).unwrap(), int(1));
        assert!(matches!(
            contraction_function(2, 1, &rat(1, 2), 3),
            Err(ContractionError::NonIntegerAlpha(_))
        ));
    }

    #[test]
    fn ordered_form_matches_symmetric_form() {
        for alpha in 1..=2u32 {
            for l in 1..=3usize {
                for r in 0..=2usize {
                    let a = int(alpha as i64);
                    let ordered = ordered_contraction_function(l, r, &a, 4).unwrap();
                    let sym = contraction_function(l, r, &a, 4).unwrap();
                    let sign = int(ordered_form_sign(alpha, l));
                    assert_eq!(ordered.sub(&sym.scale(&sign)).unwrap().len(), 0, "α={alpha} L={l} r={r}");
                }
            }
        }
    }

    #[test]
    fn split_pair_examples() {
        let one = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(split_pair(1, 1).unwrap(), SplitPair { f: one(&[1]), g: one(&[1]) });
        assert_eq!(split_pair(2, 1).unwrap(), SplitPair { f: one(&[1, 1]), g: one(&[1]) });
        assert_eq!(split_pair(1, 2).unwrap(), SplitPair { f: one(&[1]), g: one(&[1, 1]) });
        let sp = split_pair(3, 2).unwrap();
        assert!(split_pair_residual(&sp, &rat(2, 3), &rat(-5, 7), &rat(11, 4)).unwrap().is_zero());
    }

    #[test]
    fn split_full_base_case() {
        let sf = split_full(2, 1).unwrap();
        assert_eq!(sf.parts.len(), 2);
        assert!(sf.resum_matches(8).unwrap());
        assert!(sf.polynomial_in_own_variable());
        assert!(sf.leading_matches_closed_form().unwrap());
        assert!(matches!(split_full(4, 1), Err(ContractionError::EnvelopeExceeded { .. })));
    }

    #[test]
    fn split_full_envelope() {
        for s in 2..=3 {
            for n in 1..=3 {
                let sf = split_full(s, n).unwrap();
                assert!(sf.resum_matches(8).unwrap(), "s={s} n={n}");
                assert!(sf.polynomial_in_own_variable(), "s={s} n={n}");
                assert!(sf.leading_matches_closed_form().unwrap(), "s={s} n={n}");
            }
        }
    }

    #[test]
    fn json_is_sorted() {
        let vars = Variables::contraction(1, 1);
        let s = expand_binomial_power(&vars, &[-1, 1], &int(2), None).unwrap();
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"[{"exponents":[-2,2],"coeff":"1"},{"exponents":[-1,1],"coeff":"-2"},{"exponents":[0,0],"coeff":"1"}]"#
        );
    }
}
