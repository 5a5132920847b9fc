//! Fourier transforms of atomic measures, multiplicative convolutions with
//! dyadic decomposition, decay-exponent scans, and the blocked exponential
//! sums.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{GfError, Result};
use crate::fit::ols;
use crate::measure::DiscreteMeasure;
use crate::thermo::{RegularTree, ZetaSystem};

const TAU: f64 = std::f64::consts::TAU;

/// `sum_a w_a e^{-2 pi i xi x_a}` in atom order.
pub fn fourier_transform(m: &DiscreteMeasure, xi: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in m.iter() {
        acc += w * Complex64::cis(-TAU * xi * x);
    }
    acc
}

/// How frequencies are sampled inside each dyadic block.
#[derive(Debug, Clone, Copy)]
pub enum SampleMode {
    /// Independent log-uniform draws per block (seeded, deterministic).
    LogUniform { samples: usize, seed: u64 },
    /// Deterministic linear grid with a bounded absolute step — needed when
    /// the transform has narrow peaks of O(1) width (lattice-like spectra).
    MaxStep { step: f64, min_samples: usize, max_samples: usize },
}

#[derive(Debug, Clone)]
pub struct BlockRow {
    pub j: i32,
    pub xi_lo: f64,
    pub xi_hi: f64,
    pub sup_abs: f64,
    pub n_samples: usize,
    pub aliased: bool,
}

#[derive(Debug, Clone)]
pub struct DecayScan {
    pub blocks: Vec<BlockRow>,
    /// Fitted polynomial decay exponent (`|mu_hat| ~ |xi|^{-e_hat}`).
    pub e_hat: f64,
    /// Standard error of the exponent.
    pub e_se: f64,
    pub residual: f64,
    /// Frequencies beyond this no longer represent the underlying measure.
    pub aliasing_bound: f64,
}

/// Sampled sup of `|mu_hat|` per dyadic block `[2^j, 2^{j+1})` with a
/// log-log decay fit over the non-aliased blocks.
///
/// `resolution` is the smallest cylinder (atom-spacing) scale of the
/// discretization; blocks beyond `0.1 / resolution` are flagged as aliased
/// and excluded from the fit rather than silently reported.
pub fn decay_scan(
    m: &DiscreteMeasure,
    j_lo: i32,
    j_hi: i32,
    mode: SampleMode,
    resolution: f64,
) -> Result<DecayScan> {
    if j_hi < j_lo {
        return Err(GfError::Domain("empty dyadic range".into()));
    }
    if let SampleMode::LogUniform { samples, .. } = mode {
        if samples < 64 {
            return Err(GfError::Domain("need >= 64 samples per block".into()));
        }
    }
    if !(resolution > 0.0) {
        return Err(GfError::Domain("resolution must be > 0".into()));
    }
    let aliasing_bound = 0.1 / resolution;
    let blocks: Vec<BlockRow> = (j_lo..=j_hi)
        .into_par_iter()
        .map(|j| {
            let xi_lo = 2.0f64.powi(j);
            let xi_hi = 2.0f64.powi(j + 1);
            let aliased = xi_hi > aliasing_bound;
            let xis: Vec<f64> = match mode {
                SampleMode::LogUniform { samples, seed } => {
                    let mut rng = ChaCha8Rng::seed_from_u64(
                        seed ^ (j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                    );
                    (0..samples)
                        .map(|_| xi_lo * (rng.gen::<f64>() * std::f64::consts::LN_2).exp())
                        .collect()
                }
                SampleMode::MaxStep { step, min_samples, max_samples } => {
                    let width = xi_hi - xi_lo;
                    let wanted = (width / step).ceil() as usize;
                    let n = wanted.clamp(min_samples.max(2), max_samples.max(2));
                    (0..n)
                        .map(|i| xi_lo + width * i as f64 / n as f64)
                        .collect()
                }
            };
            let sup_abs = xis
                .iter()
                .map(|&xi| fourier_transform(m, xi).norm())
                .fold(0.0f64, f64::max);
            BlockRow { j, xi_lo, xi_hi, sup_abs, n_samples: xis.len(), aliased }
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = blocks
        .iter()
        .filter(|b| !b.aliased && b.sup_abs > 0.0)
        .map(|b| (b.j as f64 * std::f64::consts::LN_2, b.sup_abs.ln()))
        .unzip();
    if xs.is_empty() {
        return Err(GfError::Aliased(format!(
            "every block in [2^{j_lo}, 2^{}] lies beyond the aliasing bound {aliasing_bound:.3e}",
            j_hi + 1
        )));
    }
    let (e_hat, e_se, residual) = if xs.len() >= 2 {
        let f = ols(&xs, &ys)?;
        (-f.slope, f.slope_se, f.residual)
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    Ok(DecayScan { blocks, e_hat, e_se, residual, aliasing_bound })
}

/// Pushforward of `m1 x m2` under multiplication, with atom merging.
pub fn mult_convolution(
    m1: &DiscreteMeasure,
    m2: &DiscreteMeasure,
    budget: u64,
) -> Result<DiscreteMeasure> {
    let count = m1.len() as u128 * m2.len() as u128;
    if count > budget as u128 {
        return Err(GfError::Budget(format!(
            "product of {} x {} atoms exceeds budget {budget}",
            m1.len(),
            m2.len()
        )));
    }
    let mut pairs = Vec::with_capacity(count as usize);
    for (x, wx) in m1.iter() {
        for (y, wy) in m2.iter() {
            pairs.push((x * y, wx * wy));
        }
    }
    DiscreteMeasure::from_pairs(pairs)
}

/// Splits `m` (supported in `[1/R, R]`) into pieces on `(2^{i-1}, 2^i]`
/// rescaled to `[1/2, 1]`; boundary atoms go to the lower interval.
pub fn dyadic_decompose(m: &DiscreteMeasure, r: f64) -> Result<Vec<(i32, DiscreteMeasure)>> {
    if !(r >= 1.0) {
        return Err(GfError::Domain("R must be >= 1".into()));
    }
    let mut buckets: std::collections::BTreeMap<i32, Vec<(f64, f64)>> = Default::default();
    for (x, w) in m.iter() {
        if !(x >= 1.0 / r && x <= r) {
            return Err(GfError::Domain(format!("atom {x} outside [1/{r}, {r}]")));
        }
        // smallest i with x <= 2^i (closed-right convention), robust to
        // rounding in log2
        let mut i = x.log2().ceil() as i32;
        while x > 2.0f64.powi(i) {
            i += 1;
        }
        while x <= 2.0f64.powi(i - 1) {
            i -= 1;
        }
        buckets.entry(i).or_default().push((x * 2.0f64.powi(-i), w));
    }
    buckets
        .into_iter()
        .map(|(i, pairs)| Ok((i, DiscreteMeasure::from_pairs(pairs)?)))
        .collect()
}

/// Undoes [`dyadic_decompose`]; exact in atoms and weights up to the merge
/// tolerance.
pub fn dyadic_reconstruct(pieces: &[(i32, DiscreteMeasure)]) -> Result<DiscreteMeasure> {
    let mut pairs = Vec::new();
    for (i, piece) in pieces {
        for (x, w) in piece.iter() {
            pairs.push((x * 2.0f64.powi(*i), w));
        }
    }
    DiscreteMeasure::from_pairs(pairs)
}

#[derive(Debug, Clone, Copy)]
pub struct BourgainCheck {
    pub ok: bool,
    /// Worst `mu(B(a, rho)) / rho^kappa` over atoms and scales.
    pub worst_ratio: f64,
}

/// The ball-mass hypothesis `max_a mu(B(a, rho)) < rho^kappa` over a scale
/// grid, for a probability measure on `[1/2, 1]`. Balls have diameter `rho`.
pub fn bourgain_hypothesis_check(
    m: &DiscreteMeasure,
    kappa: f64,
    rho_grid: &[f64],
) -> Result<BourgainCheck> {
    if (m.total_mass() - 1.0).abs() > 1e-9 {
        return Err(GfError::Domain("measure must be normalized".into()));
    }
    if m.atoms().iter().any(|&x| !(0.5..=1.0).contains(&x)) {
        return Err(GfError::Domain("support must lie in [1/2, 1]".into()));
    }
    let mut worst = 0.0f64;
    for &rho in rho_grid {
        if !(rho > 0.0) {
            return Err(GfError::Domain("scales must be positive".into()));
        }
        for &a in m.atoms() {
            worst = worst.max(m.ball_mass(a, rho) / rho.powf(kappa));
        }
    }
    Ok(BourgainCheck { ok: worst < 1.0, worst_ratio: worst })
}

/// `N^{-k} sum_{b_1..b_k} exp(2 pi i eta prod_j zeta_j(b_j))` over the full
/// block product.
pub fn exp_sum(zetas: &[ZetaSystem], eta: f64) -> Result<Complex64> {
    if zetas.is_empty() {
        return Err(GfError::Structure("need at least one zeta table".into()));
    }
    let n = zetas[0].values.len();
    if zetas.iter().any(|z| z.values.len() != n) {
        return Err(GfError::Structure("zeta tables must share the tree".into()));
    }
    // fold the product measure one factor at a time: the phase distribution
    // of prod zeta_j is the multiplicative convolution of the tables
    let mut products: Vec<f64> = zetas[0].values.clone();
    for z in &zetas[1..] {
        let mut next = Vec::with_capacity(products.len() * n);
        for &p in &products {
            for &v in &z.values {
                next.push(p * v);
            }
        }
        products = next;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for &p in &products {
        acc += Complex64::cis(TAU * eta * p);
    }
    Ok(acc / products.len() as f64)
}

/// The admissible frequency window `[e^{lambda n / 4}, C e^{lambda n / 2}]`.
pub fn frequency_window(tree: &RegularTree) -> (f64, f64) {
    let ln = tree.lambda_hat * tree.n as f64;
    ((ln / 4.0).exp(), tree.c_eps * (ln / 2.0).exp())
}

#[derive(Debug, Clone)]
pub struct ExpsumRow {
    pub eta: f64,
    pub max_abs: f64,
    pub n_blocks: usize,
}

#[derive(Debug, Clone)]
pub struct ExpsumScan {
    pub rows: Vec<ExpsumRow>,
    pub eps2_hat: f64,
    pub eps2_se: f64,
    pub window: (f64, f64),
}

/// Max `|exp_sum|` over sampled well-distributed blocks per frequency, with
/// the log-log decay fit; frequencies outside the window are excluded.
pub fn expsum_decay_scan(
    tree: &RegularTree,
    wd: &crate::nonconc::WellDistributed,
    eta_grid: &[f64],
    n_blocks: usize,
    seed: u64,
) -> Result<ExpsumScan> {
    if wd.good_blocks == 0 {
        return Err(GfError::Degenerate(
            "no well-distributed blocks: exponential-sum scan undefined".into(),
        ));
    }
    let window = frequency_window(tree);
    let etas: Vec<f64> = eta_grid
        .iter()
        .copied()
        .filter(|&e| e >= window.0 && e <= window.1)
        .collect();
    if etas.is_empty() {
        return Err(GfError::Domain(format!(
            "no frequencies inside the window [{:.3}, {:.3}]",
            window.0, window.1
        )));
    }
    let blocks = crate::nonconc::sample_blocks(wd, tree, n_blocks, seed)?;
    let tables: Vec<Vec<ZetaSystem>> = blocks
        .iter()
        .map(|b| crate::thermo::zeta_table(tree, b))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<ExpsumRow> = etas
        .par_iter()
        .map(|&eta| {
            let mut max_abs = 0.0f64;
            for t in &tables {
                max_abs = max_abs.max(exp_sum(t, eta)?.norm());
            }
            Ok(ExpsumRow { eta, max_abs, n_blocks: tables.len() })
        })
        .collect::<Result<Vec<_>>>()?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.max_abs > 0.0)
        .map(|r| (r.eta.ln(), r.max_abs.ln()))
        .unzip();
    let (eps2_hat, eps2_se) = if xs.len() >= 3 {
        let f = ols(&xs, &ys)?;
        (-f.slope, f.slope_se)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(ExpsumScan { rows, eps2_hat, eps2_se, window })
}

/// Equal-weight midpoint discretization of the middle-third Cantor measure
/// at the given ternary depth — the no-decay control (its transform is
/// invariant along `xi -> 3 xi` in the limit).
pub fn ternary_control_measure(depth: usize) -> Result<DiscreteMeasure> {
    let count = 1usize << depth;
    let mut pairs = Vec::with_capacity(count);
    let w = 1.0 / count as f64;
    for idx in 0..count {
        let mut x = 0.5 * 3.0f64.powi(-(depth as i32));
        let mut scale = 1.0 / 3.0;
        for b in (0..depth).rev() {
            if idx >> b & 1 == 1 {
                x += 2.0 * scale;
            }
            scale /= 3.0;
        }
        pairs.push((x, w));
    }
    DiscreteMeasure::from_pairs(pairs)
}
