//! Independent oracles shared by the integration tests. None of them call
//! the code paths they are used to check.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use jackvertex::exactscalar::int;
use jackvertex::fock::FockVector;
use jackvertex::partitions::{partitions_cached, Partition};
use jackvertex::symfunc::{Basis, SymFunc, SymRing};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn p(s: &str) -> Partition {
    s.parse().unwrap()
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < k {
        return BigInt::zero();
    }
    factorial(n as u64) / (factorial(k as u64) * factorial((n - k) as u64))
}

/// Polynomials in the power sums, keyed by the partition of the monomial.
type PowerPoly = BTreeMap<Partition, Q>;

fn z_of(lambda: &Partition) -> BigInt {
    let mut z = BigInt::one();
    let mut counts: HashMap<u32, u64> = HashMap::new();
    for &x in lambda.parts() {
        *counts.entry(x).or_default() += 1;
    }
    for (part, m) in counts {
        z *= BigInt::from(part).pow(m as u32) * factorial(m);
    }
    z
}

/// `h_n = Σ_{μ ⊢ n} p_μ / z_μ`, the classical complete homogeneous function.
fn complete_homogeneous(n: i64) -> PowerPoly {
    if n < 0 {
        return PowerPoly::new();
    }
    partitions_cached(n as u32)
        .iter()
        .map(|mu| (mu.clone(), Q::new(BigInt::one(), z_of(mu))))
        .collect()
}

fn poly_mul(a: &PowerPoly, b: &PowerPoly) -> PowerPoly {
    let mut out = PowerPoly::new();
    for (x, c) in a {
        for (y, d) in b {
            let key = Partition::from_unsorted(x.parts().iter().chain(y.parts()).copied());
            let e = out.entry(key).or_insert_with(Q::zero);
            *e += c * d;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn poly_add_scaled(acc: &mut PowerPoly, f: &PowerPoly, c: &Q) {
    for (k, v) in f {
        *acc.entry(k.clone()).or_insert_with(Q::zero) += v * c;
    }
    acc.retain(|_, c| !c.is_zero());
}

/// The Schur function `det(h_{λ_i - i + j})` in power sums, by Laplace
/// expansion along rows with memoisation on the set of used columns.
pub fn schur_jacobi_trudi(lambda: &Partition) -> SymFunc<Q> {
    let parts: Vec<i64> = lambda.parts().iter().map(|&x| x as i64).collect();
    let l = parts.len();
    let mut memo: HashMap<(usize, u32), PowerPoly> = HashMap::new();
    fn minor(
        row: usize,
        used: u32,
        parts: &[i64],
        memo: &mut HashMap<(usize, u32), PowerPoly>,
    ) -> PowerPoly {
        let l = parts.len();
        if row == l {
            return PowerPoly::from([(Partition::empty(), Q::one())]);
        }
        if let Some(v) = memo.get(&(row, used)) {
            return v.clone();
        }
        let mut acc = PowerPoly::new();
        let mut sign = Q::one();
        for col in 0..l {
            if used & (1 << col) != 0 {
                continue;
            }
            let h = complete_homogeneous(parts[row] - row as i64 + col as i64);
            if !h.is_empty() {
                let rest = minor(row + 1, used | (1 << col), parts, memo);
                poly_add_scaled(&mut acc, &poly_mul(&h, &rest), &sign);
            }
            sign = -sign;
        }
        memo.insert((row, used), acc.clone());
        acc
    }
    let det = if l == 0 {
        PowerPoly::from([(Partition::empty(), Q::one())])
    } else {
        minor(0, 0, &parts, &mut memo)
    };
    SymFunc::from_terms(Basis::PowerSum, det)
}

/// Jack `P_λ` by classical Gram-Schmidt: subtract from `m_λ` its projections
/// onto the already-orthogonalised `P_μ`, `μ` strictly dominated by `λ`.
pub fn gram_schmidt_jack_p(ring: &SymRing<Q>, weight: u32) -> BTreeMap<Partition, SymFunc<Q>> {
    let parts = partitions_cached(weight);
    let mut done: BTreeMap<Partition, (SymFunc<Q>, Q)> = BTreeMap::new();
    for lambda in parts.iter().rev() {
        let m = ring
            .to_power_sum(&SymFunc::basis_element(Basis::Monomial, lambda.clone()))
            .unwrap();
        let mut v = m.clone();
        for (mu, (pm, norm)) in &done {
            if mu != lambda && lambda.dominates(mu) {
                let c = ring.inner_product(&m, pm).unwrap() / norm;
                v = v.sub(&pm.scale(&c)).unwrap();
            }
        }
        let norm = ring.inner_product(&v, &v).unwrap();
        done.insert(lambda.clone(), (v, norm));
    }
    done.into_iter().map(|(k, (v, _))| (k, v)).collect()
}

/// Brute force `[∏ x_i^{e_i}] ∏_{i<j} (x_i - x_j)^2` from the determinant
/// form of the Vandermonde product: a double sum over permutations.
pub fn vandermonde_square_by_permutations(exps: &[i64]) -> BigInt {
    let s = exps.len();
    let perms = permutations(s);
    let mut acc = BigInt::zero();
    for (sigma, sgn_s) in &perms {
        for (tau, sgn_t) in &perms {
            if (0..s).all(|i| (sigma[i] + tau[i]) as i64 == exps[i]) {
                acc += BigInt::from(sgn_s * sgn_t);
            }
        }
    }
    acc
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    if n == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (perm, sign) in permutations(n - 1) {
        for pos in 0..=perm.len() {
            let mut next = perm.clone();
            next.insert(pos, n - 1);
            // Inserting the largest element at `pos` adds `len - pos` inversions.
            let flips = (perm.len() - pos) as i64;
            out.push((next, if flips % 2 == 0 { sign } else { -sign }));
        }
    }
    out
}

/// The closed form of the `ab = a + b` splitting:
/// `f_m = C(r+s-m-1, s-1)` and `g_n = C(r+s-n-1, r-1)`.
pub fn split_pair_closed_form(r: usize, s: usize) -> (Vec<BigInt>, Vec<BigInt>) {
    let (ri, si) = (r as i64, s as i64);
    let f = (1..=ri).map(|m| binomial(ri + si - m - 1, si - 1)).collect();
    let g = (1..=si).map(|n| binomial(ri + si - n - 1, ri - 1)).collect();
    (f, g)
}

/// Vectors indexed by the power of `z` they carry.
type Graded = BTreeMap<i64, FockVector<Q>>;

/// `exp(Σ c z^d h_mode)` over `(mode, d, c)`, dropping z-degrees above `max_up`.
fn graded_exp(v: &Graded, generators: &[(i64, i64, Q)], alpha: &Q, max_up: i64) -> Graded {
    let step = |g: &Graded| -> Graded {
        let mut out = Graded::new();
        for (deg, vec) in g {
            for (mode, zdeg, c) in generators {
                let d = deg + zdeg;
                if d > max_up {
                    continue;
                }
                let hv = vec.apply_h(*mode, alpha).unwrap().scale(c);
                if hv.is_zero() {
                    continue;
                }
                let e = out.entry(d).or_insert_with(FockVector::zero);
                *e = e.add(&hv);
            }
        }
        out
    };
    let mut acc = v.clone();
    let mut term = v.clone();
    let mut k = 1i64;
    loop {
        term = step(&term)
            .into_iter()
            .map(|(d, x)| (d, x.scale(&Q::new(BigInt::one(), BigInt::from(k)))))
            .filter(|(_, x)| !x.is_zero())
            .collect();
        if term.is_empty() {
            return acc;
        }
        for (d, x) in &term {
            let e = acc.entry(*d).or_insert_with(FockVector::zero);
            *e = e.add(x);
        }
        k += 1;
    }
}

/// The mode `X_n` assembled from scratch: exponentiate the annihilation
/// part `-Σ 2α h_k z^{-k}/k`, shift the charge by `e^h z^{(2s+1)α}`, then
/// exponentiate the creation part `Σ α h_{-k} z^k / k` and read off the
/// coefficient of `z^{-n}`. Only the Heisenberg action is used.
pub fn x_mode_from_exponentials(n: i64, v: &FockVector<Q>, alpha: &Q) -> FockVector<Q> {
    let max_weight = v.terms().keys().map(|(l, _)| l.weight() as i64).max().unwrap_or(0);
    // Annihilation: z-degree -k for h_k.
    let ann: Vec<(i64, i64, Q)> = (1..=max_weight.max(1))
        .map(|k| (k, -k, -(alpha * int(2)) / int(k)))
        .collect();
    let start = Graded::from([(0, v.clone())]);
    let after_ann = graded_exp(&start, &ann, alpha, i64::MAX);
    // Charge shift: each basis vector picks up z^{(q+1)α} and q -> q + 2.
    let mut shifted = Graded::new();
    for (deg, vec) in &after_ann {
        for ((l, q), c) in vec.terms() {
            let e = alpha * int(q + 1);
            assert!(e.is_integer(), "non-integral charge exponent");
            let d = deg + e.to_integer().try_into().unwrap_or(0i64);
            let entry = shifted.entry(d).or_insert_with(FockVector::zero);
            entry.add_term(l.clone(), q + 2, c.clone());
        }
    }
    // Creation raises the z-degree; only degrees up to -n matter.
    let target = -n;
    let lowest = shifted.keys().next().copied().unwrap_or(0);
    let cre: Vec<(i64, i64, Q)> = (1..=(target - lowest).max(0))
        .map(|k| (-k, k, alpha / int(k)))
        .collect();
    let done = graded_exp(&shifted, &cre, alpha, target);
    done.get(&target).cloned().unwrap_or_else(FockVector::zero)
}
