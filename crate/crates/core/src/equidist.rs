//! Weyl sums along strictly increasing integer sequences — including the
//! continuant denominators of another digit word — and the averaged-square
//! convergence surrogate for equidistribution.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::continuants::cf_value;
use crate::error::{GfError, Result};
use crate::thermo::GibbsSpec;
use crate::word::Word;

pub use crate::continuants::continuant_denominators;

/// Which sequence `(n_k)` the Weyl sum runs over.
#[derive(Debug, Clone)]
pub enum SequenceSpec {
    /// `n_k = k`.
    Identity,
    /// An explicit strictly increasing list.
    Explicit(Vec<u64>),
    /// `n_k = q_k(w)`, the continuant denominators of a digit word.
    ContinuantDenominators(Word),
}

impl SequenceSpec {
    pub fn explicit(terms: Vec<u64>) -> Result<Self> {
        if terms.is_empty() || terms[0] == 0 {
            return Err(GfError::Domain("sequence terms must be positive".into()));
        }
        if terms.windows(2).any(|p| p[1] <= p[0]) {
            return Err(GfError::Domain("sequence must be strictly increasing".into()));
        }
        Ok(SequenceSpec::Explicit(terms))
    }

    /// Longest usable prefix (unbounded for the identity sequence).
    pub fn available(&self) -> Option<usize> {
        match self {
            SequenceSpec::Identity => None,
            SequenceSpec::Explicit(v) => Some(v.len()),
            SequenceSpec::ContinuantDenominators(w) => Some(w.len()),
        }
    }
}

/// The evaluation point of the Weyl sum.
#[derive(Debug, Clone)]
pub enum WeylPoint {
    /// Exact rational: phases are computed by exact modular arithmetic,
    /// immune to the size of `m n_k`.
    Exact(BigRational),
    /// Floating point: usable while `m n_k x` stays well below 2^53.
    Float(f64),
}

/// Draws a digit word of length `L` with prefix-conditional Gibbs weights
/// `|T_a'(x_prefix)|^s` and returns it with its exact rational value.
pub fn sample_point(spec: &GibbsSpec, length: usize, seed: u64) -> Result<(Word, BigRational)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = spec.alphabet;
    let mut digits: Vec<u32> = Vec::with_capacity(length);
    for _ in 0..length {
        let prefix = Word::new(digits.clone())?;
        let x = spec.system.branch_point(&prefix, 0.0)?;
        let weights: Vec<f64> = (lo..=hi)
            .map(|a| Ok(spec.system.branch(a, x)?.1.abs().powf(spec.s)))
            .collect::<Result<Vec<f64>>>()?;
        let total: f64 = weights.iter().sum();
        let mut t = rng.gen::<f64>() * total;
        let mut chosen = hi;
        for (a, &w) in (lo..=hi).zip(&weights) {
            if t < w {
                chosen = a;
                break;
            }
            t -= w;
        }
        digits.push(chosen);
    }
    let word = Word::new(digits)?;
    let x = cf_value(&word);
    Ok((word, x))
}

/// `(1/N) sum_{k=1}^{N} e^{2 pi i m n_k x}`.
pub fn weyl_sum(x: &WeylPoint, seq: &SequenceSpec, n: usize, m: u64) -> Result<Complex64> {
    if let Some(avail) = seq.available() {
        if n > avail {
            return Err(GfError::Domain(format!(
                "N = {n} exceeds available sequence length {avail}"
            )));
        }
    }
    if n == 0 {
        return Err(GfError::Domain("N must be >= 1".into()));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    match x {
        WeylPoint::Exact(r) => {
            let q = r.denom().abs();
            let p = ((r.numer() % &q) + &q) % &q;
            let mp = (BigInt::from(m) * &p) % &q;
            let qf = q.to_f64().ok_or_else(|| {
                GfError::Domain("denominator overflows f64 exponent range".into())
            })?;
            let mut push = |nk_mod: &BigInt| {
                let phase = (nk_mod * &mp) % &q;
                let frac = phase.to_f64().unwrap_or(0.0) / qf;
                acc += Complex64::cis(std::f64::consts::TAU * frac);
            };
            match seq {
                SequenceSpec::Identity => {
                    let mut k_mod = BigInt::zero();
                    let one = BigInt::from(1);
                    for _ in 0..n {
                        k_mod = (&k_mod + &one) % &q;
                        push(&k_mod);
                    }
                }
                SequenceSpec::Explicit(terms) => {
                    for &t in &terms[..n] {
                        push(&(BigInt::from(t) % &q));
                    }
                }
                SequenceSpec::ContinuantDenominators(w) => {
                    // q_k mod q via the continuant recurrence
                    let (mut prev, mut cur) = (BigInt::zero(), BigInt::from(1));
                    for &a in &w.digits()[..n] {
                        let next = (BigInt::from(a) * &cur + &prev) % &q;
                        prev = std::mem::replace(&mut cur, next);
                        push(&cur);
                    }
                }
            }
        }
        WeylPoint::Float(xf) => {
            let mut term = |nk: f64| {
                acc += Complex64::cis(std::f64::consts::TAU * (m as f64 * nk * xf).fract());
            };
            match seq {
                SequenceSpec::Identity => {
                    for k in 1..=n {
                        term(k as f64);
                    }
                }
                SequenceSpec::Explicit(terms) => {
                    for &t in &terms[..n] {
                        term(t as f64);
                    }
                }
                SequenceSpec::ContinuantDenominators(w) => {
                    let qs = continuant_denominators(&Word::new(w.digits()[..n].to_vec())?);
                    for qk in qs {
                        let v = qk.to_f64().filter(|v| *v < 9.0e15).ok_or_else(|| {
                            GfError::Domain(
                                "continuant denominators exceed float precision; use an exact rational point".into(),
                            )
                        })?;
                        term(v);
                    }
                }
            }
        }
    }
    Ok(acc / n as f64)
}

#[derive(Debug, Clone)]
pub struct DelRow {
    pub m: u64,
    pub n: usize,
    pub w: Complex64,
    pub w_sq: f64,
    /// Running `sum_N |W_N|^2 / N` over the grid — the convergence
    /// surrogate of the averaged-square equidistribution criterion.
    pub partial: f64,
}

/// `|W_N(m)|^2` over the `(m, N)` grid with running averaged-square sums.
pub fn del_report(
    x: &WeylPoint,
    seq: &SequenceSpec,
    m_max: u64,
    n_grid: &[usize],
) -> Result<Vec<DelRow>> {
    if n_grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(GfError::Domain("N grid must be strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(m_max as usize * n_grid.len());
    for m in 1..=m_max {
        let mut partial = 0.0;
        for &n in n_grid {
            let w = weyl_sum(x, seq, n, m)?;
            let w_sq = w.norm_sqr();
            partial += w_sq / n as f64;
            rows.push(DelRow { m, n, w, w_sq, partial });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::MarkovSystem;

    fn exact(p: i64, q: i64) -> WeylPoint {
        WeylPoint::Exact(BigRational::new(p.into(), q.into()))
    }

    #[test]
    fn zero_point_gives_one() {
        let w = weyl_sum(&exact(0, 1), &SequenceSpec::Identity, 100, 3).unwrap();
        assert!((w.re - 1.0).abs() < 1e-14 && w.im.abs() < 1e-14);
    }

    #[test]
    fn zero_frequency_gives_one() {
        let w = weyl_sum(&exact(1, 3), &SequenceSpec::Identity, 50, 0).unwrap();
        assert!((w.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn alternating_sum_cancels() {
        let w = weyl_sum(&exact(1, 2), &SequenceSpec::Identity, 1000, 1).unwrap();
        assert!(w.norm() < 1e-13);
    }

    #[test]
    fn golden_truncation_equidistributes() {
        let word = Word::new(vec![1; 40]).unwrap();
        let x = WeylPoint::Exact(cf_value(&word));
        let w = weyl_sum(&x, &SequenceSpec::Identity, 10_000, 1).unwrap();
        assert!(w.norm() <= 0.05, "|W| = {}", w.norm());
    }

    #[test]
    fn rational_resonance_stays_at_one() {
        // q | m: every phase is integral
        let x = exact(1, 3);
        for n in [10, 100, 1000] {
            let w = weyl_sum(&x, &SequenceSpec::Identity, n, 3).unwrap();
            assert!((w.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_point_fibonacci_and_determinism() {
        let spec =
            GibbsSpec::new(MarkovSystem::gauss(2), (1, 1), 0.5, 10, 0.1, 1 << 20).unwrap();
        let (word, x) = sample_point(&spec, 10, 42).unwrap();
        assert_eq!(word.digits(), &[1; 10]);
        // F_10 / F_11
        assert_eq!(x, BigRational::new(55.into(), 89.into()));
        let spec2 =
            GibbsSpec::new(MarkovSystem::gauss(2), (1, 2), 0.5344, 10, 0.1, 1 << 20).unwrap();
        let (w1, _) = sample_point(&spec2, 50, 7).unwrap();
        let (w2, _) = sample_point(&spec2, 50, 7).unwrap();
        assert_eq!(w1, w2);
        assert!(w1.digits().iter().all(|&d| d == 1 || d == 2));
    }

    #[test]
    fn sequence_validation() {
        assert!(SequenceSpec::explicit(vec![1, 2, 2]).is_err());
        assert!(SequenceSpec::explicit(vec![0, 1]).is_err());
        let seq = SequenceSpec::explicit(vec![1, 10, 100]).unwrap();
        assert!(weyl_sum(&exact(1, 7), &seq, 4, 1).is_err());
    }

    #[test]
    fn del_partial_sums_accumulate() {
        let rows = del_report(&exact(1, 3), &SequenceSpec::Identity, 1, &[3, 6, 9]).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.windows(2).all(|p| p[1].partial >= p[0].partial));
    }

    #[test]
    fn float_point_matches_exact_for_small_data() {
        let seq = SequenceSpec::Identity;
        let xe = exact(2, 7);
        let xf = WeylPoint::Float(2.0 / 7.0);
        let a = weyl_sum(&xe, &seq, 500, 2).unwrap();
        let b = weyl_sum(&xf, &seq, 500, 2).unwrap();
        assert!((a - b).norm() < 1e-9);
    }
}
