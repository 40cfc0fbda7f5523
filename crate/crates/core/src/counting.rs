//! Exact endomorphism counts.
//!
//! Powers of the golden ratio and its conjugate only ever appear as
//! `τ^{2k} + θ^{2k}`, which is the Lucas number `L_{2k}`, so every formula is
//! evaluated over the integers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::groups::totient;
use crate::semigroup::SemigroupKind::{self, *};

fn big(v: impl Into<BigInt>) -> BigInt {
    v.into()
}

/// `F_i` with `F_0 = 0`, `F_1 = F_2 = 1`.
pub fn fib(i: u64) -> BigInt {
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..i {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// `L_{2k} = τ^{2k} + θ^{2k}`.
pub fn lucas_even(k: u64) -> BigInt {
    let (mut a, mut b) = (big(2), BigInt::one());
    for _ in 0..2 * k {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// `C(a, b)`, zero outside `0 <= b <= a`.
pub fn binom(a: i64, b: i64) -> BigInt {
    if a < 0 || b < 0 || b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut r = BigInt::one();
    for i in 0..b {
        r = r * big(a - i) / big(i + 1);
    }
    r
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

/// `(-1)^m`.
fn sign(m: u64) -> BigInt {
    if m % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Division that must be exact.
fn exact_div(a: BigInt, d: i64) -> BigInt {
    let (q, r) = a.div_rem(&big(d));
    assert!(r.is_zero(), "inexact division by {d}");
    q
}

fn check_rank(n: u64, k: u64) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("rank {k} not in 1..={n}")));
    }
    Ok(())
}

fn check_n(n: u64) -> Result<()> {
    if n < 3 {
        return Err(Error::Domain(format!("n = {n}, need n >= 3")));
    }
    Ok(())
}

/// `|E(J_k^{OP_n})|`.
pub fn count_idem_op_rank(n: u64, k: u64) -> Result<BigInt> {
    check_rank(n, k)?;
    if k == 1 {
        return Ok(big(n));
    }
    let (n, k) = (n as i64, k as i64);
    Ok((1..=n - k + 1)
        .map(|i| big(i * i) * binom(n - i + k - 2, 2 * k - 3))
        .sum())
}

/// `|E(J_k^{POP_n})|`.
pub fn count_idem_pop_rank(n: u64, k: u64) -> Result<BigInt> {
    check_rank(n, k)?;
    if k == 1 {
        return Ok(big(n) * pow2(n - 1));
    }
    let mut total = BigInt::zero();
    for i in k..=n {
        total += binom(n as i64, i as i64) * count_idem_op_rank(i, k)?;
    }
    Ok(total)
}

/// `|E(J_k^S)|` for `0 <= k <= n`.
pub fn idempotents_of_rank_count(kind: SemigroupKind, n: u64, k: u64) -> Result<BigInt> {
    if k > n {
        return Err(Error::Domain(format!("rank {k} exceeds n = {n}")));
    }
    match kind {
        OP | OR => {
            if k == 0 {
                Ok(BigInt::zero())
            } else {
                count_idem_op_rank(n, k)
            }
        }
        POPI | PORI => Ok(binom(n as i64, k as i64)),
        POP | POR => {
            if k == 0 {
                Ok(BigInt::one())
            } else {
                count_idem_pop_rank(n, k)
            }
        }
        _ => Err(Error::Unsupported(format!("idempotent counts for {kind}"))),
    }
}

/// `|E(OP_n)| = F_{2n−1} + F_{2n+1} − n² + n − 2`.
pub fn total_idempotents_op(n: u64) -> BigInt {
    fib(2 * n - 1) + fib(2 * n + 1) - big(n * n) + big(n) - 2
}

/// `|E(POP_n)| = 1 + Σ_k C(n,k)(L_{2k} − k² + k − 2)`.
pub fn total_idempotents_pop(n: u64) -> BigInt {
    BigInt::one()
        + (1..=n)
            .map(|k| binom(n as i64, k as i64) * (lucas_even(k) - big(k * k) + big(k) - 2))
            .sum::<BigInt>()
}

/// `|E_S(e)|` for an idempotent `e` of rank `k`.
pub fn e_count(kind: SemigroupKind, k: u64) -> Result<BigInt> {
    match kind {
        OP | OR => {
            if k == 0 {
                return Err(Error::Domain("OP and OR have no rank-0 idempotent".into()));
            }
            Ok(fib(2 * k - 1) + fib(2 * k + 1) - big(k * k) + big(k) - 2)
        }
        POPI | PORI => Ok(pow2(k)),
        POP | POR => Ok(total_idempotents_pop(k)),
        _ => Err(Error::Unsupported(format!("E_S(e) for {kind}"))),
    }
}

/// `ε(n,k)`: elements of a cyclic group of order `k` whose order divides
/// `n` and exceeds one.
pub fn eps(n: u64, k: u64) -> u64 {
    (1..k).filter(|&t| n % (k / t.gcd(&k)) == 0).count() as u64
}

/// `δ(n,k)`: 1 when `n` and `k` are both even.
pub fn delta(n: u64, k: u64) -> u64 {
    let v = sign(n + k) + sign(n) + sign(k) + 1;
    exact_div(v, 4).to_u64().expect("0 or 1")
}

/// `|E_S(h₀)|` for a group element `h₀` of order 2 and rank `k` with
/// `fix` fixed points.
pub fn h0_count(kind: SemigroupKind, k: u64, fix: u64) -> Result<BigInt> {
    let consistent = match fix {
        0 => k % 2 == 0,
        1 => k % 2 == 1 && k >= 3,
        2 => k % 2 == 0 && k >= 4,
        _ => false,
    };
    if !consistent {
        return Err(Error::Domain(format!("no order-2 group element of rank {k} fixes {fix} points")));
    }
    Ok(match (kind, fix) {
        (PORI, 0) => big(1),
        (PORI, 1) => big(2),
        (PORI, 2) => big(4),
        (OR, 0) => big(0),
        (OR, 1) => big(1),
        (OR, 2) => big(k / 2 + 2),
        (POR, 0) => big(1),
        (POR, 1) => 1 + pow2((k - 1) / 2),
        (POR, 2) => 1 + big(k / 2 + 9) * pow2(k / 2 - 2),
        _ => return Err(Error::Unsupported(format!("E_S(h0) for {kind}"))),
    })
}

/// `Σ_{h₀ ∈ G_{H_k}(2)} |E_S(h₀)|` in closed form.
pub fn h0_aggregate(kind: SemigroupKind, k: u64) -> Result<BigInt> {
    if k < 2 {
        return Err(Error::Domain(format!("rank {k} has no element of order 2")));
    }
    let even = sign(k) + 1; // 2 if k is even, else 0
    Ok(match (kind, k) {
        (PORI | POR, 2) => big(1),
        (OR, 2) => big(0),
        (PORI, _) => big(2 * k) + exact_div(even * (2 + big(k)), 4),
        (OR, _) => big(k) + exact_div(even * big(k * k), 8),
        (POR, _) => {
            let p = pow2(k / 2);
            big(k) + big(k) * &p + exact_div(even * (16 + big(k * k + 2 * k) * &p), 32)
        }
        _ => return Err(Error::Unsupported(format!("type 6 for {kind}"))),
    })
}

fn as_decimal<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn as_decimal_opt<S: Serializer>(v: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(b) => s.collect_str(b),
        None => s.serialize_none(),
    }
}

fn as_decimal_vec<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|b| b.to_string()))
}

/// Per-type subtotals. Types 3 and 7 are counted together.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeCounts {
    #[serde(serialize_with = "as_decimal")]
    pub t1: BigInt,
    #[serde(serialize_with = "as_decimal")]
    pub t2: BigInt,
    #[serde(serialize_with = "as_decimal")]
    pub t3_7: BigInt,
    #[serde(serialize_with = "as_decimal")]
    pub t4: BigInt,
    #[serde(serialize_with = "as_decimal")]
    pub t5: BigInt,
    #[serde(serialize_with = "as_decimal")]
    pub t6: BigInt,
}

impl TypeCounts {
    pub fn sum(&self) -> BigInt {
        &self.t1 + &self.t2 + &self.t3_7 + &self.t4 + &self.t5 + &self.t6
    }
}

/// Per-type subtotals from the intermediate formulas.
pub fn type_counts(kind: SemigroupKind, n: u64) -> Result<TypeCounts> {
    check_n(n)?;
    if !kind.is_target() {
        return Err(Error::Unsupported(format!("type counts for {kind}")));
    }
    let ej = |k: u64| idempotents_of_rank_count(kind, n, k);
    let t1 = big(2 * n);
    let t2 = if kind.is_partial() {
        big(n * totient(n as usize) as u64)
    } else {
        BigInt::zero()
    };
    let t3_7 = match kind {
        OP | OR => {
            let mut t = BigInt::zero();
            for k in 1..=n {
                t += ej(k)? * e_count(kind, k)?;
            }
            t
        }
        _ => {
            let mut t = BigInt::zero();
            for k in 0..=n {
                t += ej(k)? * e_count(kind, k)?;
            }
            t
        }
    };
    let mut t4 = BigInt::zero();
    if matches!(kind, POPI | POP) {
        for k in 2..=n {
            t4 += ej(k)? * eps(n, k);
        }
    }
    let mut t5 = BigInt::zero();
    if matches!(kind, PORI | POR) {
        for k in 3..=n {
            t5 += ej(k)? * big(k * (eps(n, k) + 2 * delta(n, k)));
        }
    }
    let mut t6 = BigInt::zero();
    if kind.has_reflection() {
        for k in 2..=n {
            t6 += ej(k)? * h0_aggregate(kind, k)?;
        }
        t6 *= sign(n) + 2;
    }
    Ok(TypeCounts {
        t1,
        t2,
        t3_7,
        t4,
        t5,
        t6,
    })
}

/// The total from the closed-form theorem for `kind`, evaluated as
/// displayed (no regrouping into the per-type subtotals).
pub fn theorem_total(kind: SemigroupKind, n: u64) -> Result<BigInt> {
    check_n(n)?;
    let ni = n as i64;
    let phi = big(n * totient(n as usize) as u64);
    let s = sign(n) + 2;
    // Σ_{j=1}^{i−k+1} j² C(i−j+k−2, 2k−3)
    let op_inner = |i: i64, k: i64| -> BigInt {
        (1..=i - k + 1).map(|j| big(j * j) * binom(i - j + k - 2, 2 * k - 3)).sum()
    };
    let lucas_term = |i: u64| lucas_even(i) - big(i * i) + big(i) - 2;
    let pop_e = |k: u64| -> BigInt { (1..=k).map(|i| binom(k as i64, i as i64) * lucas_term(i)).sum() };
    let pop_ej = |k: i64| -> BigInt { (k..=ni).map(|i| binom(ni, i) * op_inner(i, k)).sum() };
    let pop_head = || {
        1 + big(2 * n)
            + &phi
            + big(n) * pow2(n - 1)
            + (1..=n).map(|k| binom(ni, k as i64) * lucas_term(k)).sum::<BigInt>()
    };
    let op_sum = || -> BigInt {
        (2..=ni)
            .map(|k| op_inner(ni, k) * (fib(2 * k as u64 - 1) + fib(2 * k as u64 + 1) - big(k * k) + big(k) - 2))
            .sum()
    };
    Ok(match kind {
        OP => big(3 * n) + op_sum(),
        OR => {
            let t6: BigInt = (3..=ni)
                .map(|k| op_inner(ni, k) * (big(k) + exact_div((sign(k as u64) + 1) * big(k * k), 8)))
                .sum();
            big(3 * n) + op_sum() + s * t6
        }
        POPI => {
            big(2 * n)
                + &phi
                + big(3).pow(n as u32)
                + (2..=n).map(|k| binom(ni, k as i64) * eps(n, k)).sum::<BigInt>()
        }
        POP => {
            pop_head()
                + (2..=n)
                    .map(|k| pop_ej(k as i64) * (big(eps(n, k)) + pop_e(k)))
                    .sum::<BigInt>()
        }
        PORI => {
            let five_halves = exact_div(big(5 * ni * (ni - 1)), 2);
            &phi + big(3).pow(n as u32)
                + (3..=n)
                    .map(|k| binom(ni, k as i64) * big(k * (eps(n, k) + 2 * delta(n, k))))
                    .sum::<BigInt>()
                + &s * (big(9 * n + 4) * pow2(n - 3) - five_halves - 1)
                - 2 * (sign(n) + 1) * big(n)
        }
        POR => {
            let k2: BigInt = (2..=ni).map(|i| binom(ni, i) * big(i * i * (i * i - 1))).sum();
            let k2 = exact_div((sign(n) + 7) * k2, 12);
            let rest: BigInt = (3..=n)
                .map(|k| {
                    let p = pow2(k / 2);
                    let even = sign(k) + 1;
                    let agg = big(k) + big(k) * &p + exact_div(even * (16 + big(k * k + 2 * k) * &p), 32);
                    pop_ej(k as i64) * (big(k * (eps(n, k) + 2 * delta(n, k))) + pop_e(k) + &s * agg)
                })
                .sum();
            pop_head() + k2 + rest
        }
        _ => return Err(Error::Unsupported(format!("no total theorem for {kind}"))),
    })
}

/// `|End(C_n)|` and `|End(D_2n)|`.
pub fn group_endomorphism_total(kind: SemigroupKind, n: u64) -> Result<BigInt> {
    check_n(n)?;
    match kind {
        C => Ok(big(n)),
        D2 if n % 2 == 1 => Ok(big(n * n + 1)),
        D2 => Ok(big(n * n + 4 * n + 4)),
        _ => Err(Error::Unsupported(format!("{kind} is not a group kind"))),
    }
}

/// `|Aut(S)|`: `2n` for the six monoids, `φ(n)` for `C_n`, `nφ(n)` for `D_2n`.
pub fn automorphism_total(kind: SemigroupKind, n: u64) -> Result<BigInt> {
    check_n(n)?;
    let phi = totient(n as usize) as u64;
    match kind {
        C => Ok(big(phi)),
        D2 => Ok(big(n * phi)),
        k if k.is_target() => Ok(big(2 * n)),
        _ => Err(Error::Unsupported(format!("no automorphism count for {kind}"))),
    }
}

/// Formula counts for one `(kind, n)`, optionally paired with enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub kind: SemigroupKind,
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub types: Option<TypeCounts>,
    #[serde(serialize_with = "as_decimal")]
    pub formula_total: BigInt,
    #[serde(serialize_with = "as_decimal")]
    pub automorphisms: BigInt,
    #[serde(serialize_with = "as_decimal_opt")]
    pub enumerated_total: Option<BigInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumerated_types: Option<BTreeMap<String, u64>>,
    #[serde(serialize_with = "as_decimal_vec")]
    pub idempotents_by_rank: Vec<BigInt>,
}

impl CountReport {
    /// True when there is no enumeration or it agrees with the formula.
    pub fn consistent(&self) -> bool {
        self.enumerated_total.as_ref().is_none_or(|e| *e == self.formula_total)
            && self.types.as_ref().is_none_or(|t| t.sum() == self.formula_total)
    }
}

/// Formula report for a classified monoid or for `C`/`D2`.
pub fn total_endomorphisms(kind: SemigroupKind, n: u64) -> Result<CountReport> {
    check_n(n)?;
    let (types, formula_total, idempotents_by_rank) = if kind.is_group() {
        (None, group_endomorphism_total(kind, n)?, vec![BigInt::zero(); n as usize].into_iter().chain([BigInt::one()]).collect())
    } else {
        let types = type_counts(kind, n)?;
        let total = theorem_total(kind, n)?;
        let ranks = (0..=n).map(|k| idempotents_of_rank_count(kind, n, k)).collect::<Result<_>>()?;
        (Some(types), total, ranks)
    };
    Ok(CountReport {
        kind,
        n,
        types,
        formula_total,
        automorphisms: automorphism_total(kind, n)?,
        enumerated_total: None,
        enumerated_types: None,
        idempotents_by_rank,
    })
}
