//! Thermodynamic-formalism layer: potentials, Birkhoff sums, the transfer
//! operator, pressure/dimension/Lyapunov estimation, large-deviation scans,
//! and the multiscale regular word tree with its zeta tables.
//!
//! Throughout, the geometric potential is `phi = -s log|T'| - c` with `psi =
//! -log|T'|`; the shift `c` is chosen so the depth-`m` upper pressure proxy
//! of `phi` vanishes, making the Gibbs weights honestly normalized.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{GfError, Result};
use crate::markov::{MapKind, MarkovSystem, QuadF64};
use crate::measure::CylinderMeasure;
use crate::word::Word;

/// A Gibbs-measure specification: system, exponent, depth, corridor width,
/// enumeration budget, and the computed pressure normalization.
#[derive(Debug, Clone)]
pub struct GibbsSpec {
    pub system: MarkovSystem,
    /// Inclusive digit range.
    pub alphabet: (u32, u32),
    pub s: f64,
    pub n: usize,
    pub epsilon: f64,
    pub budget: u64,
    /// Normalization constant `c`; the depth-`m` upper pressure proxy of
    /// `-s log|T'|` (m capped so the enumeration stays inside the budget).
    pub pressure_shift: f64,
    /// Width of the upper/lower proxy bracket at the shift depth — the
    /// honest residual of the normalization, reported rather than hidden.
    pub pressure_residual: f64,
}

impl GibbsSpec {
    pub fn new(
        system: MarkovSystem,
        alphabet: (u32, u32),
        s: f64,
        n: usize,
        epsilon: f64,
        budget: u64,
    ) -> Result<Self> {
        let (lo, hi) = alphabet;
        if lo == 0 || hi < lo || hi > system.alphabet_cutoff {
            return Err(GfError::Domain(format!(
                "alphabet ({lo}, {hi}) invalid for cutoff {}",
                system.alphabet_cutoff
            )));
        }
        if !(0.0..=2.0).contains(&s) {
            return Err(GfError::Domain(format!("exponent s = {s} outside [0, 2]")));
        }
        if !(epsilon > 0.0) {
            return Err(GfError::Domain("epsilon must be > 0".into()));
        }
        check_enumeration(alphabet, n, budget)?;
        // normalization depth: 12 when affordable, else the largest depth
        // whose enumeration stays small
        let size = (hi - lo + 1) as u128;
        let cap = (budget as u128).min(2_000_000);
        let mut m = 12usize;
        while m > 1 && size.checked_pow(m as u32).map_or(true, |c| c > cap) {
            m -= 1;
        }
        let est = pressure_estimate(system, alphabet, s, m, budget)?;
        Ok(GibbsSpec {
            system,
            alphabet,
            s,
            n,
            epsilon,
            budget,
            pressure_shift: est.upper,
            pressure_residual: est.upper - est.lower,
        })
    }

    /// The spec's corridor-nondegeneracy guideline `epsilon < s lambda / 10`.
    /// Treated as a warning, not an error: useful corridor widths in the
    /// scans are wider.
    pub fn epsilon_corridor_ok(&self, lambda_hat: f64) -> bool {
        self.epsilon < self.s * lambda_hat / 10.0
    }
}

/// Guards `|A|^n` against the enumeration budget.
pub fn check_enumeration(alphabet: (u32, u32), n: usize, budget: u64) -> Result<u64> {
    let size = (alphabet.1 - alphabet.0 + 1) as u128;
    let count = size
        .checked_pow(n as u32)
        .filter(|&c| c <= budget as u128)
        .ok_or_else(|| {
            GfError::Budget(format!(
                "|A|^n = {}^{} exceeds budget {}",
                size, n, budget
            ))
        })?;
    Ok(count as u64)
}

/// All words of length `n` over the inclusive digit range, lexicographic.
pub fn enumerate_words(alphabet: (u32, u32), n: usize, budget: u64) -> Result<Vec<Word>> {
    let count = check_enumeration(alphabet, n, budget)? as usize;
    let size = (alphabet.1 - alphabet.0 + 1) as usize;
    let words: Vec<Word> = (0..count)
        .into_par_iter()
        .map(|mut idx| {
            let mut digits = vec![0u32; n];
            for d in digits.iter_mut().rev() {
                *d = alphabet.0 + (idx % size) as u32;
                idx /= size;
            }
            Word::new(digits).expect("digits >= 1 by construction")
        })
        .collect();
    Ok(words)
}

/// `S_n psi(T_w x) = log |T_w'(x)|` — the Birkhoff sum of `psi = -log|T'|`
/// along the cylinder of `w`, parameterized by the branch preimage `x`.
pub fn birkhoff_psi(sys: MarkovSystem, w: &Word, x: f64) -> Result<f64> {
    sys.log_branch_derivative_abs(w, x)
}

/// Birkhoff sum of the spec's potential: `s log|T_w'(x)| - c |w|`.
pub fn birkhoff_sum(spec: &GibbsSpec, w: &Word, x: f64) -> Result<f64> {
    Ok(spec.s * birkhoff_psi(spec.system, w, x)? - spec.pressure_shift * w.len() as f64)
}

/// Prefix Birkhoff sums `S_k psi` for `k = 1..=n`, all evaluated at the same
/// point `x` inside the cylinder of `w` (the multiscale corridor input).
///
/// For Gauss the prefix branch is inverted through its Möbius form, so each
/// scale is exact up to rounding; continuants must stay below 2^53.
pub fn birkhoff_psi_prefixes(sys: MarkovSystem, w: &Word, x: f64) -> Result<Vec<f64>> {
    let n = w.len();
    let mut out = Vec::with_capacity(n);
    match sys.kind {
        MapKind::Gauss => {
            let mut quad = QuadF64::new();
            for &a in w.digits() {
                quad.push(a);
                // xi = T_{w|k}^{-1}(x)
                let xi = (quad.p - quad.q * x) / (quad.q_prev * x - quad.p_prev);
                out.push(-2.0 * (quad.q_prev * xi + quad.q).ln());
            }
        }
        MapKind::Lueroth => {
            let mut s = 0.0;
            for &a in w.digits() {
                s -= (a as f64 * (a as f64 + 1.0)).ln();
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// One transfer-operator iterate with a general geometric potential
/// `-s log|T'| - c`: `sum_{w in A^m} e^{S_m phi(T_w x)} f(T_w x)`.
pub fn transfer_apply_potential<F>(
    sys: MarkovSystem,
    alphabet: (u32, u32),
    s: f64,
    c: f64,
    f: F,
    x: f64,
    m: usize,
    budget: u64,
) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    let words = enumerate_words(alphabet, m, budget)?;
    let terms: Vec<f64> = words
        .par_iter()
        .map(|w| {
            let y = sys.branch_point(w, x)?;
            let lg = sys.log_branch_derivative_abs(w, x)?;
            Ok((s * lg - c * m as f64).exp() * f(y))
        })
        .collect::<Result<Vec<f64>>>()?;
    // sequential reduction keeps the result bit-stable
    Ok(terms.iter().sum())
}

/// Transfer iterate with the spec's own normalized potential.
pub fn transfer_apply<F>(spec: &GibbsSpec, f: F, x: f64, m: usize) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    transfer_apply_potential(
        spec.system,
        spec.alphabet,
        spec.s,
        spec.pressure_shift,
        f,
        x,
        m,
        spec.budget,
    )
}

/// Exact rational witness that the full-alphabet Lüroth transfer operator
/// fixes the constant function: `sum_{a<=N} 1/(a(a+1)) + 1/(N+1)`, where the
/// closing term is the analytic tail of the telescoping series. Returns the
/// exact sum (equal to one).
pub fn lueroth_unit_transfer_exact(cutoff: u32) -> BigRational {
    let mut total = BigRational::new(BigInt::one(), BigInt::from(cutoff as u64 + 1));
    for a in 1..=cutoff as u64 {
        total += BigRational::new(BigInt::one(), BigInt::from(a * (a + 1)));
    }
    total
}

#[derive(Debug, Clone, Copy)]
pub struct PressureEstimate {
    /// `(1/m) log sum_w sup_x |T_w'|^s` — decreasing-in-m upper proxy.
    pub upper: f64,
    /// Same with `inf_x` — lower proxy.
    pub lower: f64,
    /// `(1/m) log sum_w |I_w|^s` — interval-length proxy (for Gauss, the
    /// exact geometric mean of the other two since `|I_w| = 1/(q(q+q'))`).
    pub geometric: f64,
    pub depth: usize,
}

/// Depth-`m` pressure proxies of `-s log|T'|` over the truncated alphabet.
pub fn pressure_estimate(
    sys: MarkovSystem,
    alphabet: (u32, u32),
    s: f64,
    m: usize,
    budget: u64,
) -> Result<PressureEstimate> {
    let words = enumerate_words(alphabet, m, budget)?;
    // |T_w'| is monotone in x for both instances: sup at x=0, inf at x=1
    let sums: Vec<(f64, f64, f64)> = words
        .par_iter()
        .map(|w| {
            let sup = (s * sys.log_branch_derivative_abs(w, 0.0)?).exp();
            let inf = (s * sys.log_branch_derivative_abs(w, 1.0)?).exp();
            let len = (s * sys.log_cylinder_length(w)?).exp();
            Ok((sup, inf, len))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut su, mut si, mut sl) = (0.0, 0.0, 0.0);
    for (a, b, c) in sums {
        su += a;
        si += b;
        sl += c;
    }
    let mf = m as f64;
    Ok(PressureEstimate {
        upper: su.ln() / mf,
        lower: si.ln() / mf,
        geometric: sl.ln() / mf,
        depth: m,
    })
}

#[derive(Debug, Clone, Copy)]
pub enum PressureProxy {
    Upper,
    Lower,
    Geometric,
}

/// Bisection root of the chosen pressure proxy in `s` over `[0, 1.5]`.
pub fn pressure_root(
    sys: MarkovSystem,
    alphabet: (u32, u32),
    m: usize,
    budget: u64,
    proxy: PressureProxy,
) -> Result<f64> {
    let eval = |s: f64| -> Result<f64> {
        let est = pressure_estimate(sys, alphabet, s, m, budget)?;
        Ok(match proxy {
            PressureProxy::Upper => est.upper,
            PressureProxy::Lower => est.lower,
            PressureProxy::Geometric => est.geometric,
        })
    };
    let (mut lo, mut hi) = (0.0_f64, 1.5_f64);
    if eval(lo)? < 0.0 {
        return Err(GfError::Degenerate("pressure already negative at s = 0".into()));
    }
    if eval(hi)? > 0.0 {
        return Err(GfError::Degenerate(
            "pressure still positive at s = 1.5; no root in range".into(),
        ));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy)]
pub struct DimensionRoot {
    /// Root of the lower proxy (smaller end of the bracket).
    pub bracket_lo: f64,
    /// Root of the upper proxy (larger end of the bracket).
    pub bracket_hi: f64,
    /// Root of the interval-length proxy — the point estimate.
    pub point: f64,
}

pub fn dimension_root(
    sys: MarkovSystem,
    alphabet: (u32, u32),
    m: usize,
    budget: u64,
) -> Result<DimensionRoot> {
    Ok(DimensionRoot {
        bracket_lo: pressure_root(sys, alphabet, m, budget, PressureProxy::Lower)?,
        bracket_hi: pressure_root(sys, alphabet, m, budget, PressureProxy::Upper)?,
        point: pressure_root(sys, alphabet, m, budget, PressureProxy::Geometric)?,
    })
}

/// The depth-`n` Gibbs approximation: atoms at cylinder midpoints `x_w`,
/// weights proportional to `|T_w'(x_w)|^s`, normalized to unit mass.
pub fn gibbs_measure(spec: &GibbsSpec) -> Result<CylinderMeasure> {
    gibbs_measure_at_depth(spec, spec.n)
}

pub fn gibbs_measure_at_depth(spec: &GibbsSpec, depth: usize) -> Result<CylinderMeasure> {
    let words = enumerate_words(spec.alphabet, depth, spec.budget)?;
    let log_weights: Vec<f64> = words
        .par_iter()
        .map(|w| {
            let x = spec.system.cylinder_midpoint(w)?;
            Ok(spec.s * spec.system.log_branch_derivative_abs(w, x)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    // shift by the max before exponentiating so deep cylinders don't underflow
    let shift = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut weights: Vec<f64> = log_weights.iter().map(|lw| (lw - shift).exp()).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    CylinderMeasure::new(spec.system, depth, words, weights)
}

/// Empirical Gibbs constant: the smallest `C` with
/// `mu(I_w) / e^{S_n phi(x_w)} in [1/C, C]` over all depth-`n` words.
pub fn gibbs_constant(spec: &GibbsSpec, measure: &CylinderMeasure) -> Result<f64> {
    let mut c = 1.0_f64;
    for (i, w) in measure.words.iter().enumerate() {
        let phi = birkhoff_sum(spec, w, inverse_midpoint_param(spec.system, w)?)?;
        let ratio = measure.weights[i] / phi.exp();
        c = c.max(ratio).max(1.0 / ratio);
    }
    Ok(c)
}

/// Refinement-consistency constant: worst ratio between a depth-`(n-1)`
/// Gibbs weight and the summed weights of its children at depth `n`.
pub fn gibbs_refinement_constant(spec: &GibbsSpec) -> Result<f64> {
    if spec.n < 2 {
        return Ok(1.0);
    }
    let fine = gibbs_measure_at_depth(spec, spec.n)?;
    let coarse = gibbs_measure_at_depth(spec, spec.n - 1)?;
    let size = (spec.alphabet.1 - spec.alphabet.0 + 1) as usize;
    let mut c = 1.0_f64;
    for (j, _w) in coarse.words.iter().enumerate() {
        // children of word j are the contiguous index block [j*size, (j+1)*size)
        let child_sum: f64 = fine.weights[j * size..(j + 1) * size].iter().sum();
        let ratio = coarse.weights[j] / child_sum;
        c = c.max(ratio).max(1.0 / ratio);
    }
    Ok(c)
}

/// Point `x0` with `T_w(x0) = ` cylinder midpoint; the Birkhoff-evaluation
/// parameter matching the Gibbs atoms.
fn inverse_midpoint_param(sys: MarkovSystem, w: &Word) -> Result<f64> {
    match sys.kind {
        MapKind::Gauss => {
            let x = sys.cylinder_midpoint(w)?;
            let quad = QuadF64::of(w);
            let x0 = (quad.p - quad.q * x) / (quad.q_prev * x - quad.p_prev);
            Ok(x0.clamp(0.0, 1.0))
        }
        MapKind::Lueroth => Ok(0.5),
    }
}

/// Depth-`depth` cylinder measure with Gauss–Kuzmin weights
/// `log2((1+hi)/(1+lo))`; returns the measure and the truncation-tail mass
/// dropped by the digit cutoff.
pub fn gauss_kuzmin_measure(
    cutoff: u32,
    depth: usize,
    budget: u64,
) -> Result<(CylinderMeasure, f64)> {
    let sys = MarkovSystem::gauss(cutoff);
    let words = enumerate_words((1, cutoff), depth, budget)?;
    let raw: Vec<f64> = words
        .par_iter()
        .map(|w| {
            let (lo, hi) = sys.cylinder(w)?;
            Ok(((1.0 + hi) / (1.0 + lo)).ln() / std::f64::consts::LN_2)
        })
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = raw.iter().sum();
    let dropped = 1.0 - total;
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    Ok((CylinderMeasure::new(sys, depth, words, weights)?, dropped))
}

/// `-(1/n) sum_w mu(I_w) log |I_w|` with exact (log-space) cylinder lengths.
pub fn lyapunov_estimate(measure: &CylinderMeasure) -> Result<f64> {
    let mass = measure.total_mass();
    let terms: Vec<f64> = measure
        .words
        .par_iter()
        .zip(measure.weights.par_iter())
        .map(|(w, &wt)| Ok(wt * measure.system.log_cylinder_length(w)?))
        .collect::<Result<Vec<f64>>>()?;
    let s: f64 = terms.iter().sum();
    Ok(-s / (measure.depth as f64 * mass))
}

/// Estimates `(lambda_hat, s_hat)` once per spec, at the frozen reference
/// depth `n + 4`: the Gibbs-weighted Lyapunov exponent and the
/// Gibbs-weighted mean of the Birkhoff ratio `S phi / S psi`.
pub fn estimate_parameters(spec: &GibbsSpec) -> Result<(f64, f64)> {
    let n_ref = spec.n + 4;
    let measure = gibbs_measure_at_depth(spec, n_ref)?;
    let lambda_hat = lyapunov_estimate(&measure)?;
    let ratios: Vec<f64> = measure
        .words
        .par_iter()
        .zip(measure.weights.par_iter())
        .map(|(w, &wt)| {
            let x0 = inverse_midpoint_param(spec.system, w)?;
            let psi = birkhoff_psi(spec.system, w, x0)?;
            let phi = spec.s * psi - spec.pressure_shift * n_ref as f64;
            Ok(wt * phi / psi)
        })
        .collect::<Result<Vec<f64>>>()?;
    let s_hat: f64 = ratios.iter().sum();
    Ok((lambda_hat, s_hat))
}

/// The multiscale regular tree at depth `n`.
#[derive(Debug, Clone)]
pub struct RegularTree {
    pub system: MarkovSystem,
    pub alphabet: (u32, u32),
    pub n: usize,
    pub epsilon: f64,
    pub lambda_hat: f64,
    pub s_hat: f64,
    /// `C = e^{epsilon n}`.
    pub c_eps: f64,
    pub words: Vec<Word>,
    pub midpoints: Vec<f64>,
    /// Normalized Gibbs weights of the kept words.
    pub weights: Vec<f64>,
    pub kept_mass: f64,
    pub total_words: u64,
}

impl RegularTree {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Keeps the depth-`n` words whose prefix Birkhoff averages stay inside the
/// epsilon-corridor at every scale `k = floor(n/4)..=n` and whose cylinder
/// length sits in the explicit corridor
/// `((1/16) C^{-1} e^{-lambda n}, C e^{-lambda n})`, `C = e^{epsilon n}`.
///
/// The corridor conditions are evaluated at cylinder midpoints; bounded
/// distortion makes the midpoint-vs-measure discrepancy a uniform constant,
/// which is folded into the corridor as `B/k` (average) and
/// `B/(lambda k)` (ratio) slack, `B` the system distortion bound.
pub fn regular_words(spec: &GibbsSpec, lambda_hat: f64, s_hat: f64) -> Result<RegularTree> {
    let n = spec.n;
    let measure = gibbs_measure(spec)?;
    let b = spec.system.distortion_bound();
    let eps = spec.epsilon;
    let c_eps = (eps * n as f64).exp();
    let k_min = (n / 4).max(1);
    let log_len_lo = (c_eps.recip() / 16.0).ln() - lambda_hat * n as f64;
    let log_len_hi = c_eps.ln() - lambda_hat * n as f64;

    let keep: Vec<bool> = measure
        .words
        .par_iter()
        .map(|w| {
            let log_len = spec.system.log_cylinder_length(w)?;
            if !(log_len > log_len_lo && log_len < log_len_hi) {
                return Ok(false);
            }
            // prefix sums at the cylinder midpoint
            let x_mid = spec.system.cylinder_midpoint(w)?;
            let sums = birkhoff_psi_prefixes(spec.system, w, x_mid)?;
            for (k_idx, &psi_k) in sums.iter().enumerate() {
                let k = k_idx + 1;
                if k < k_min {
                    continue;
                }
                let kf = k as f64;
                if (psi_k / kf + lambda_hat).abs() >= eps + b / kf {
                    return Ok(false);
                }
                let phi_k = spec.s * psi_k - spec.pressure_shift * kf;
                if (phi_k / psi_k - s_hat).abs() >= eps + b / (lambda_hat * kf) {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect::<Result<Vec<bool>>>()?;

    let mut words = Vec::new();
    let mut midpoints = Vec::new();
    let mut weights = Vec::new();
    let mut kept_mass = 0.0;
    for (i, &k) in keep.iter().enumerate() {
        if k {
            words.push(measure.words[i].clone());
            midpoints.push(measure.atoms[i]);
            weights.push(measure.weights[i]);
            kept_mass += measure.weights[i];
        }
    }
    if words.is_empty() {
        return Err(GfError::Degenerate(format!(
            "regular tree empty at n = {n}, epsilon = {eps}: corridor too narrow"
        )));
    }
    Ok(RegularTree {
        system: spec.system,
        alphabet: spec.alphabet,
        n,
        epsilon: eps,
        lambda_hat,
        s_hat,
        c_eps,
        total_words: measure.words.len() as u64,
        words,
        midpoints,
        weights,
        kept_mass,
    })
}

/// Odometer iterator over `k`-fold index tuples from the tree (the blocked
/// word set `R_n^k` in index form).
pub struct BlockIter {
    size: usize,
    state: Vec<usize>,
    done: bool,
}

impl Iterator for BlockIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.state.clone();
        for i in (0..self.state.len()).rev() {
            self.state[i] += 1;
            if self.state[i] < self.size {
                return Some(out);
            }
            self.state[i] = 0;
        }
        self.done = true;
        Some(out)
    }
}

pub fn regular_blocks(tree: &RegularTree, k: usize) -> Result<BlockIter> {
    if tree.is_empty() {
        return Err(GfError::Degenerate("regular tree is empty".into()));
    }
    if k == 0 {
        return Err(GfError::Domain("block arity must be >= 1".into()));
    }
    Ok(BlockIter { size: tree.len(), state: vec![0; k], done: false })
}

pub fn block_count(tree: &RegularTree, k: usize) -> u128 {
    (tree.len() as u128).pow(k as u32)
}

/// One rescaled-derivative table: `zeta(b) = e^{2 lambda n} T'_{a_prev b}(x_{a_cur})`
/// over all `b` in the tree (tree word order).
#[derive(Debug, Clone)]
pub struct ZetaSystem {
    pub j: usize,
    pub values: Vec<f64>,
}

/// Zeta values for one adjacent pair of block entries, by tree index.
pub fn zeta_values(tree: &RegularTree, a_prev: usize, a_cur: usize) -> Result<Vec<f64>> {
    let scale = 2.0 * tree.lambda_hat * tree.n as f64;
    let x = tree.midpoints[a_cur];
    let prev = &tree.words[a_prev];
    tree.words
        .iter()
        .map(|b| {
            let w = prev.concat(b);
            Ok((scale + tree.system.log_branch_derivative_abs(&w, x)?).exp())
        })
        .collect()
}

/// Zeta tables for a `(k+1)`-entry block given by tree indices.
pub fn zeta_table(tree: &RegularTree, block: &[usize]) -> Result<Vec<ZetaSystem>> {
    if block.len() < 2 {
        return Err(GfError::Structure("block needs at least 2 entries".into()));
    }
    (1..block.len())
        .map(|j| {
            Ok(ZetaSystem {
                j,
                values: zeta_values(tree, block[j - 1], block[j])?,
            })
        })
        .collect()
}

/// The zeta range corridor `[16^{-2} C^{-2}, C^2]`.
pub fn zeta_range(tree: &RegularTree) -> (f64, f64) {
    let c2 = tree.c_eps * tree.c_eps;
    (1.0 / (256.0 * c2), c2)
}

#[derive(Debug, Clone)]
pub struct LdRow {
    pub n: usize,
    pub complement_mass: f64,
}

#[derive(Debug, Clone)]
pub struct LargeDeviationScan {
    pub rows: Vec<LdRow>,
    pub lambda_hat: f64,
    pub s_hat: f64,
    /// Fitted exponential rate of the complement mass (NaN when the scan
    /// has fewer than two strictly positive rows).
    pub delta_hat: f64,
}

/// Measures the complement of the single-scale corridor set per depth.
///
/// Within each cylinder the set where both corridor conditions hold is an
/// exact subinterval in the branch parameter (`u = 2 log(q' xi + q)` is
/// monotone for Gauss, constant for Lüroth); the word's Gibbs weight is
/// split by the Lebesgue fraction of that subinterval, so the scan measures
/// points, not words.
pub fn large_deviation_scan(
    spec: &GibbsSpec,
    epsilon: f64,
    n_list: &[usize],
) -> Result<LargeDeviationScan> {
    if n_list.windows(2).any(|p| p[1] <= p[0]) {
        return Err(GfError::Domain("n_list must be strictly increasing".into()));
    }
    let (lambda_hat, s_hat) = estimate_parameters(spec)?;
    let c = spec.pressure_shift;
    let s = spec.s;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let measure = gibbs_measure_at_depth(spec, n)?;
        let nf = n as f64;
        // corridor in u = -S_n psi > 0
        let (a1, a2) = (nf * (lambda_hat - epsilon), nf * (lambda_hat + epsilon));
        let fails: Vec<f64> = measure
            .words
            .par_iter()
            .zip(measure.weights.par_iter())
            .map(|(w, &wt)| {
                let frac = match spec.system.kind {
                    MapKind::Gauss => {
                        let quad = QuadF64::of(w);
                        let (u0, u1) = (2.0 * quad.q.ln(), 2.0 * (quad.q + quad.q_prev).ln());
                        let (mut lo, mut hi) = (u0.max(a1), u1.min(a2));
                        let (r1, r2) = ratio_u_interval(c * nf, s, s_hat, epsilon);
                        lo = lo.max(r1);
                        hi = hi.min(r2);
                        if lo >= hi {
                            0.0
                        } else {
                            // q_prev >= 1 for any nonempty word (q_0 = 1)
                            let xi = |u: f64| ((0.5 * u).exp() - quad.q) / quad.q_prev;
                            let f =
                                (xi(hi).clamp(0.0, 1.0) - xi(lo).clamp(0.0, 1.0)).max(0.0);
                            // snap 1-ulp exp/ln round-trip dust at the endpoints
                            if f > 1.0 - 1e-12 {
                                1.0
                            } else if f < 1e-12 {
                                0.0
                            } else {
                                f
                            }
                        }
                    }
                    MapKind::Lueroth => {
                        let u = -birkhoff_psi(spec.system, w, 0.5)?;
                        let avg_ok = u > a1 && u < a2;
                        let ratio = (s * (-u) - c * nf) / (-u);
                        let ratio_ok = (ratio - s_hat).abs() < epsilon;
                        if avg_ok && ratio_ok {
                            1.0
                        } else {
                            0.0
                        }
                    }
                };
                Ok(wt * (1.0 - frac))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(LdRow { n, complement_mass: fails.iter().sum() });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.complement_mass > 0.0)
        .map(|r| (r.n as f64, r.complement_mass.ln()))
        .unzip();
    let delta_hat = if xs.len() >= 2 {
        -crate::fit::ols(&xs, &ys)?.slope
    } else {
        f64::NAN
    };
    Ok(LargeDeviationScan { rows, lambda_hat, s_hat, delta_hat })
}

/// The `u > 0` interval on which `|s + cn/u - s_hat| < epsilon`.
fn ratio_u_interval(cn: f64, s: f64, s_hat: f64, epsilon: f64) -> (f64, f64) {
    let g1 = s_hat - s - epsilon;
    let g2 = s_hat - s + epsilon;
    if cn == 0.0 {
        // ratio is constantly s
        return if g1 < 0.0 && g2 > 0.0 {
            (0.0, f64::INFINITY)
        } else {
            (f64::INFINITY, 0.0)
        };
    }
    if cn > 0.0 {
        // cn/u decreasing from +inf to 0
        if g2 <= 0.0 {
            return (f64::INFINITY, 0.0); // empty
        }
        let hi = if g1 > 0.0 { cn / g1 } else { f64::INFINITY };
        (cn / g2, hi)
    } else {
        // cn/u increasing from -inf to 0
        if g1 >= 0.0 {
            return (f64::INFINITY, 0.0);
        }
        let hi = if g2 < 0.0 { cn / g2 } else { f64::INFINITY };
        (cn / g1, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(d: &[u32]) -> Word {
        Word::new(d.to_vec()).unwrap()
    }

    fn gauss12(n: usize, eps: f64) -> GibbsSpec {
        GibbsSpec::new(MarkovSystem::gauss(2), (1, 2), 0.5344, n, eps, 1 << 26).unwrap()
    }

    #[test]
    fn birkhoff_single_branch() {
        let sys = MarkovSystem::gauss(10);
        let v = birkhoff_psi(sys, &w(&[2]), 0.0).unwrap();
        assert!((v - 0.25f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn birkhoff_lueroth_slopes() {
        let sys = MarkovSystem::lueroth(10);
        let v = birkhoff_psi(sys, &w(&[1, 2]), 0.0).unwrap();
        assert!((v + 12.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn transfer_zero_function() {
        let spec = gauss12(4, 0.15);
        let v = transfer_apply(&spec, |_| 0.0, 0.3, 3).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn transfer_iteration_identity() {
        // two depth-1 applications equal one depth-2 application
        let sys = MarkovSystem::gauss(3);
        let f = |y: f64| 1.0 / (1.0 + y);
        let one = |x: f64| {
            transfer_apply_potential(sys, (1, 3), 1.2, 0.1, f, x, 1, 1 << 20).unwrap()
        };
        for x in [0.0, 0.4, 1.0] {
            let twice = transfer_apply_potential(sys, (1, 3), 1.2, 0.1, one, x, 1, 1 << 20)
                .unwrap();
            let depth2 =
                transfer_apply_potential(sys, (1, 3), 1.2, 0.1, f, x, 2, 1 << 20).unwrap();
            assert!((twice - depth2).abs() < 1e-10, "{twice} vs {depth2}");
        }
    }

    #[test]
    fn lueroth_unit_transfer_is_exactly_one() {
        assert!(lueroth_unit_transfer_exact(10).is_one());
        assert!(lueroth_unit_transfer_exact(10_000).is_one());
    }

    #[test]
    fn pressure_root_single_digit_alphabet() {
        // one branch, zero entropy: the root sits at s = 0
        let sys = MarkovSystem::gauss(2);
        let r = pressure_root(sys, (1, 1), 6, 1 << 20, PressureProxy::Geometric).unwrap();
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn gibbs_single_digit_hits_golden_point() {
        let spec =
            GibbsSpec::new(MarkovSystem::gauss(2), (1, 1), 0.5, 30, 0.1, 1 << 20).unwrap();
        let m = gibbs_measure(&spec).unwrap();
        assert_eq!(m.len(), 1);
        let golden = (5.0f64.sqrt() - 1.0) / 2.0;
        assert!((m.atoms[0] - golden).abs() < 1e-10);
    }

    #[test]
    fn gibbs_lueroth_depth_one_weights() {
        let s = 0.7;
        let spec =
            GibbsSpec::new(MarkovSystem::lueroth(2), (1, 2), s, 1, 0.1, 1 << 20).unwrap();
        let m = gibbs_measure(&spec).unwrap();
        let w1 = 0.5f64.powf(s);
        let w2 = (1.0 / 6.0f64).powf(s);
        // enumeration order: index 0 is digit 1, index 1 is digit 2
        let got = m.weights[0] / m.weights[1];
        assert!((got - w1 / w2).abs() < 1e-12);
        assert!((m.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gibbs_structure_at_depth_10() {
        let spec = gauss12(10, 0.15);
        let m = gibbs_measure(&spec).unwrap();
        assert_eq!(m.len(), 1024);
        assert!((m.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lyapunov_closed_forms() {
        // single digit 1: 2 log golden-ratio
        let spec =
            GibbsSpec::new(MarkovSystem::gauss(2), (1, 1), 0.5, 2000, 0.1, 1 << 20).unwrap();
        let m = gibbs_measure(&spec).unwrap();
        let lam = lyapunov_estimate(&m).unwrap();
        let expect = 2.0 * ((1.0 + 5.0f64.sqrt()) / 2.0).ln();
        assert!((lam - expect).abs() < 1e-3, "lam = {lam}, expect = {expect}");

        // Lüroth {1,2} equal weights: (log 2 + log 6)/2
        let spec =
            GibbsSpec::new(MarkovSystem::lueroth(2), (1, 2), 0.0, 8, 0.1, 1 << 20).unwrap();
        let m = gibbs_measure(&spec).unwrap();
        let lam = lyapunov_estimate(&m).unwrap();
        let expect = 0.5 * (2.0f64.ln() + 6.0f64.ln());
        assert!((lam - expect).abs() < 1e-12);
    }

    #[test]
    fn regular_tree_huge_epsilon_keeps_everything() {
        let spec = gauss12(8, 50.0);
        let (lh, sh) = estimate_parameters(&spec).unwrap();
        let tree = regular_words(&spec, lh, sh).unwrap();
        assert_eq!(tree.len() as u64, tree.total_words);
        assert!((tree.kept_mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regular_tree_keeps_majority_mass() {
        let spec = gauss12(12, 0.15);
        let (lh, sh) = estimate_parameters(&spec).unwrap();
        let tree = regular_words(&spec, lh, sh).unwrap();
        assert!(tree.kept_mass >= 0.5, "kept mass {}", tree.kept_mass);
    }

    #[test]
    fn blocks_and_zeta_range() {
        let spec = gauss12(8, 0.15);
        let (lh, sh) = estimate_parameters(&spec).unwrap();
        let tree = regular_words(&spec, lh, sh).unwrap();
        assert_eq!(block_count(&tree, 1), tree.len() as u128);
        assert_eq!(block_count(&tree, 3), (tree.len() as u128).pow(3));
        let (zlo, zhi) = zeta_range(&tree);
        let zs = zeta_table(&tree, &[0, tree.len() / 2, tree.len() - 1]).unwrap();
        assert_eq!(zs.len(), 2);
        for z in &zs {
            for &v in &z.values {
                assert!(v > zlo && v < zhi, "zeta {v} outside ({zlo}, {zhi})");
            }
        }
    }

    #[test]
    fn block_iter_covers_product() {
        let spec = gauss12(4, 50.0);
        let (lh, sh) = estimate_parameters(&spec).unwrap();
        let tree = regular_words(&spec, lh, sh).unwrap();
        let blocks: Vec<_> = regular_blocks(&tree, 2).unwrap().collect();
        assert_eq!(blocks.len() as u128, block_count(&tree, 2));
    }

    #[test]
    fn ld_scan_huge_epsilon_all_zero() {
        let spec = gauss12(8, 0.15);
        let scan = large_deviation_scan(&spec, 100.0, &[4, 6, 8]).unwrap();
        for r in &scan.rows {
            assert_eq!(r.complement_mass, 0.0);
        }
    }

    #[test]
    fn ld_scan_rejects_unsorted() {
        let spec = gauss12(6, 0.15);
        assert!(large_deviation_scan(&spec, 0.2, &[8, 6]).is_err());
    }

    #[test]
    fn budget_guard_trips() {
        assert!(matches!(
            check_enumeration((1, 2), 40, 1 << 20),
            Err(GfError::Budget(_))
        ));
    }
}
