//! Exact continued-fraction arithmetic.
//!
//! For a word `w = (a_1, ..., a_n)` the convergents p_n/q_n obey the
//! three-term recurrence `x_k = a_k x_{k-1} + x_{k-2}` with seeds
//! `(p_0, p_{-1}) = (0, 1)` and `(q_0, q_{-1}) = (1, 0)`. Everything here is
//! arbitrary precision; floating-point shortcuts live in [`crate::markov`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{GfError, Result};
use crate::word::Word;

/// The exact convergent p/q of a word, in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuantPair {
    pub p: BigInt,
    pub q: BigInt,
}

/// All four continuants `(p_{n-1}, p_n, q_{n-1}, q_n)` of a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuantQuad {
    pub p_prev: BigInt,
    pub p: BigInt,
    pub q_prev: BigInt,
    pub q: BigInt,
}

pub fn continuant_quad(w: &Word) -> ContinuantQuad {
    continuant_quad_with_hook(w, false)
}

/// Recurrence evaluation with an optional deliberate corruption
/// (`x_{k-2}` doubled) used by the identity-suite negative test. Never set
/// the flag outside tests.
pub fn continuant_quad_with_hook(w: &Word, corrupt_recurrence: bool) -> ContinuantQuad {
    let shift: u32 = if corrupt_recurrence { 1 } else { 0 };
    let (mut p_prev, mut p) = (BigInt::one(), BigInt::zero());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    for &a in w.digits() {
        let pn = BigInt::from(a) * &p + (&p_prev << shift);
        let qn = BigInt::from(a) * &q + (&q_prev << shift);
        p_prev = std::mem::replace(&mut p, pn);
        q_prev = std::mem::replace(&mut q, qn);
    }
    ContinuantQuad { p_prev, p, q_prev, q }
}

/// `(p_n, q_n)` of a word; asserts coprimality post-hoc.
pub fn continuants(w: &Word) -> Result<ContinuantPair> {
    let quad = continuant_quad(w);
    let g = quad.p.gcd(&quad.q);
    if !g.is_one() {
        return Err(GfError::Identity(format!(
            "continuants of {w} are not coprime (gcd {g})"
        )));
    }
    Ok(ContinuantPair { p: quad.p, q: quad.q })
}

/// `q_n p_{n-1} - q_{n-1} p_n`; must equal `(-1)^n`.
pub fn check_determinant(w: &Word) -> Result<BigInt> {
    check_determinant_with_hook(w, false)
}

pub fn check_determinant_with_hook(w: &Word, corrupt_recurrence: bool) -> Result<BigInt> {
    if w.is_empty() {
        return Err(GfError::Domain("determinant needs a nonempty word".into()));
    }
    let quad = continuant_quad_with_hook(w, corrupt_recurrence);
    let det = &quad.q * &quad.p_prev - &quad.q_prev * &quad.p;
    let expect = if w.len() % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    if det != expect {
        return Err(GfError::Identity(format!(
            "determinant of {w} is {det}, expected {expect}"
        )));
    }
    Ok(det)
}

/// Both sides of the mirror identities `q_n(w) = q_n(w_rev)` and
/// `q_{n-1}(w) = p_n(w_rev)`.
#[derive(Debug, Clone)]
pub struct MirrorReport {
    pub q_word: BigInt,
    pub q_mirror: BigInt,
    pub q_prev_word: BigInt,
    pub p_mirror: BigInt,
    pub ok: bool,
}

pub fn mirror_identities(w: &Word) -> Result<MirrorReport> {
    if w.is_empty() {
        return Err(GfError::Domain("mirror identities need a nonempty word".into()));
    }
    let quad = continuant_quad(w);
    let rev = continuant_quad(&w.mirror());
    let ok = quad.q == rev.q && quad.q_prev == rev.p;
    let report = MirrorReport {
        q_word: quad.q,
        q_mirror: rev.q,
        q_prev_word: quad.q_prev,
        p_mirror: rev.p,
        ok,
    };
    if !ok {
        return Err(GfError::Identity(format!(
            "mirror identity failed for {w}: q {} vs {}, q_prev {} vs p {}",
            report.q_word, report.q_mirror, report.q_prev_word, report.p_mirror
        )));
    }
    Ok(report)
}

/// Exact cylinder length `1/(q_n (q_n + q_{n-1}))`.
pub fn interval_length(w: &Word) -> Result<BigRational> {
    if w.is_empty() {
        return Err(GfError::Domain("interval length needs a nonempty word".into()));
    }
    let quad = continuant_quad(w);
    let denom = &quad.q * (&quad.q + &quad.q_prev);
    Ok(BigRational::new(BigInt::one(), denom))
}

/// Checks `(1/4) q_n^{-2} <= |I_w| <= q_n^{-2}` exactly.
pub fn length_bounds_check(w: &Word) -> Result<bool> {
    let quad = continuant_quad(w);
    let len = interval_length(w)?;
    let qq = BigRational::new(BigInt::one(), &quad.q * &quad.q);
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    Ok(len <= qq && len >= quarter * qq)
}

/// `q_n(w) / (q_{n-k}(prefix) q_k(suffix))` for the split after `n - k`
/// digits; the ratio lies in `[1/2, 4]`.
pub fn quasi_multiplicativity(w: &Word, k: usize) -> Result<BigRational> {
    let n = w.len();
    if k == 0 || k >= n {
        return Err(GfError::Domain(format!(
            "quasi-multiplicativity split k = {k} out of range for |w| = {n}"
        )));
    }
    let q_full = continuant_quad(w).q;
    let q_prefix = continuant_quad(&w.prefix(n - k)).q;
    let q_suffix = continuant_quad(&w.suffix(k)).q;
    Ok(BigRational::new(q_full, q_prefix * q_suffix))
}

/// Exact continued-fraction value `[a_1, ..., a_n] = p_n / q_n`.
pub fn cf_value(w: &Word) -> BigRational {
    let quad = continuant_quad(w);
    if quad.q.is_zero() {
        // unreachable for digits >= 1; empty word gives 0/1
        return BigRational::zero();
    }
    BigRational::new(quad.p, quad.q)
}

/// The strictly increasing denominators `q_1 < q_2 < ...` of a digit word.
pub fn continuant_denominators(w: &Word) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(w.len());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    for &a in w.digits() {
        let qn = BigInt::from(a) * &q + &q_prev;
        q_prev = std::mem::replace(&mut q, qn);
        out.push(q.clone());
    }
    out
}

/// Exact fold-right evaluation `1/(a_1 + 1/(a_2 + ...))`, the independent
/// oracle for [`cf_value`].
pub fn nested_fraction_oracle(w: &Word) -> BigRational {
    let mut v = BigRational::zero();
    for &a in w.digits().iter().rev() {
        v = (BigRational::from_integer(BigInt::from(a)) + v).recip();
    }
    v
}

/// Signed magnitude helper for rational comparisons in callers.
pub fn rational_abs(x: &BigRational) -> BigRational {
    x.abs()
}
