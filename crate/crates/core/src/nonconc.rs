//! Distortion-set statistics over a regular tree: the nonlinearity
//! counter with its fitted exponent, the exact continued-fraction sandwich
//! and concatenation slack, triple counts, and well-distributed blocks.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::continuants::{cf_value, continuant_quad};
use crate::error::{GfError, Result};
use crate::fit::ols;
use crate::markov::{GaussGrowth, MapKind, MarkovSystem};
use crate::thermo::RegularTree;
use crate::word::Word;

fn tree_index(tree: &RegularTree, a: &Word) -> Result<usize> {
    // kept words preserve the lexicographic enumeration order
    tree.words
        .binary_search(a)
        .map_err(|_| GfError::Domain(format!("word {a} is not in the regular tree")))
}

/// The multiset `{ distortion(a.b, x) : b regular }` in tree order.
pub fn distortion_set(tree: &RegularTree, a: &Word, x: f64) -> Result<Vec<f64>> {
    tree_index(tree, a)?;
    tree.words
        .iter()
        .map(|b| tree.system.distortion(&a.concat(b), x))
        .collect()
}

/// Admissible scale range of the nonlinearity counter.
pub fn rho_range(tree: &RegularTree) -> (f64, f64) {
    ((-tree.lambda_hat * tree.n as f64 / 2.0).exp(), 1.0)
}

/// Number of regular `c` with `|distortion(a.b, x) - distortion(a.c, x)| <= rho`.
pub fn nonlinearity_counter(
    tree: &RegularTree,
    a: &Word,
    b: &Word,
    x: f64,
    rho: f64,
) -> Result<u64> {
    let (rho_lo, rho_hi) = rho_range(tree);
    if !(rho >= rho_lo && rho <= rho_hi) {
        return Err(GfError::Domain(format!(
            "rho = {rho} outside [{rho_lo}, {rho_hi}]"
        )));
    }
    tree_index(tree, b)?;
    let values = distortion_set(tree, a, x)?;
    let target = tree.system.distortion(&a.concat(b), x)?;
    Ok(values.iter().filter(|&&v| (v - target).abs() <= rho).count() as u64)
}

#[derive(Debug, Clone)]
pub struct NonConcReport {
    /// Decreasing dyadic scales.
    pub rho_grid: Vec<f64>,
    /// Worst-case counts over the sampled `(a, b, x)` grid.
    pub counts: Vec<u64>,
    pub kappa_hat: f64,
    pub c0_hat: f64,
    pub residual: f64,
    pub bound_ok: Vec<bool>,
    pub tree_size: usize,
}

/// Exhaustive-in-`c` nonlinearity scan: worst counts over an evenly spaced
/// sample of `(a, b)` pairs and the 17-point rational `x` grid, with the
/// power-law fit `count <= C0 rho^kappa N`.
pub fn nonconc_report(tree: &RegularTree, ab_samples: usize) -> Result<NonConcReport> {
    let n_tree = tree.len();
    let (rho_lo, _) = rho_range(tree);
    let j_max = (-rho_lo.ln() / std::f64::consts::LN_2).floor() as i32;
    let rho_grid: Vec<f64> = (0..=j_max).map(|j| 0.5f64.powi(j)).collect();
    if rho_grid.len() < 2 {
        return Err(GfError::Domain("scale grid too small for a fit".into()));
    }
    let xs: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
    let samples = ab_samples.max(1).min(n_tree);
    let idx = |i: usize| i * n_tree / samples;

    let per_a: Vec<Vec<u64>> = (0..samples)
        .into_par_iter()
        .map(|ia| {
            let a = &tree.words[idx(ia)];
            let mut worst = vec![0u64; rho_grid.len()];
            for &x in &xs {
                let mut values = distortion_set(tree, a, x)?;
                values.sort_by(f64::total_cmp);
                for ib in 0..samples {
                    let b = &tree.words[idx(ib)];
                    let target = tree.system.distortion(&a.concat(b), x)?;
                    for (k, &rho) in rho_grid.iter().enumerate() {
                        let lo = values.partition_point(|&v| v < target - rho);
                        let hi = values.partition_point(|&v| v <= target + rho);
                        worst[k] = worst[k].max((hi - lo) as u64);
                    }
                }
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts = vec![0u64; rho_grid.len()];
    for w in per_a {
        for (c, v) in counts.iter_mut().zip(w) {
            *c = (*c).max(v);
        }
    }

    let log_rho: Vec<f64> = rho_grid.iter().map(|r| r.ln()).collect();
    let log_frac: Vec<f64> = counts
        .iter()
        .map(|&c| ((c.max(1)) as f64 / n_tree as f64).ln())
        .collect();
    let fit = ols(&log_rho, &log_frac)?;
    let kappa_hat = fit.slope.max(0.0);
    // smallest prefactor making the power law a true upper bound on the grid
    let c0_hat = rho_grid
        .iter()
        .zip(&counts)
        .map(|(&rho, &c)| c as f64 / (rho.powf(kappa_hat) * n_tree as f64))
        .fold(0.0f64, f64::max);
    let bound_ok: Vec<bool> = rho_grid
        .iter()
        .zip(&counts)
        .map(|(&rho, &c)| (c as f64) <= c0_hat * rho.powf(kappa_hat) * n_tree as f64 * (1.0 + 1e-12))
        .collect();
    Ok(NonConcReport {
        rho_grid,
        counts,
        kappa_hat,
        c0_hat,
        residual: fit.residual,
        bound_ok,
        tree_size: n_tree,
    })
}

/// Exact distortion of a word at a rational point:
/// `-2 q_{n-1} / (q_{n-1} x + q_n)`.
pub fn distortion_exact(w: &Word, x: &BigRational) -> BigRational {
    let quad = continuant_quad(w);
    let q_prev = BigRational::from_integer(quad.q_prev);
    let q = BigRational::from_integer(quad.q);
    let num = BigRational::from_integer((-2).into()) * &q_prev;
    num / (q_prev * x + q)
}

#[derive(Debug, Clone)]
pub struct DistDiophReport {
    pub lhs: BigRational,
    pub mid: BigRational,
    pub rhs: BigRational,
    pub ok: bool,
}

/// The exact sandwich
/// `(1/2)|[b_rev] - [c_rev]| <= |distortion(b,x) - distortion(c,x)| <= 2|[b_rev] - [c_rev]|`.
pub fn distdioph_check(
    sys: MarkovSystem,
    b: &Word,
    c: &Word,
    x: &BigRational,
) -> Result<DistDiophReport> {
    if sys.kind != MapKind::Gauss {
        return Err(GfError::Unsupported(
            "continued-fraction sandwich is Gauss-specific".into(),
        ));
    }
    if b.len() != c.len() {
        return Err(GfError::Domain("words must share a length".into()));
    }
    if x < &BigRational::zero() || x > &BigRational::from_integer(1.into()) {
        return Err(GfError::Domain("x must lie in [0, 1]".into()));
    }
    let gap = (cf_value(&b.mirror()) - cf_value(&c.mirror())).abs();
    let mid = (distortion_exact(b, x) - distortion_exact(c, x)).abs();
    let half = BigRational::new(1.into(), 2.into());
    let two = BigRational::from_integer(2.into());
    let lhs = &half * &gap;
    let rhs = &two * &gap;
    let ok = lhs <= mid && mid <= rhs;
    Ok(DistDiophReport { lhs, mid, rhs, ok })
}

/// Slack of the concatenation bound
/// `|[b_rev]-[c_rev]| <= |[(ab)_rev]-[(ac)_rev]| + 2 C e^{-lambda n / 2}`
/// (nonnegative when the bound holds).
pub fn dist_concat_slack(
    a: &Word,
    b: &Word,
    c: &Word,
    c_eps: f64,
    lambda_hat: f64,
) -> Result<f64> {
    if b.len() != c.len() {
        return Err(GfError::Domain("words must share a length".into()));
    }
    let n = b.len() as f64;
    let inner = (cf_value(&b.mirror()) - cf_value(&c.mirror()))
        .abs()
        .to_f64()
        .unwrap_or(f64::NAN);
    let outer = (cf_value(&a.concat(b).mirror()) - cf_value(&a.concat(c).mirror()))
        .abs()
        .to_f64()
        .unwrap_or(f64::NAN);
    Ok(outer + 2.0 * c_eps * (-lambda_hat * n / 2.0).exp() - inner)
}

/// Admissible scale range of the triple counts.
pub fn sigma_range(tree: &RegularTree) -> (f64, f64) {
    ((-tree.lambda_hat * tree.n as f64).exp(), 1.0)
}

fn check_sigma(tree: &RegularTree, sigma: f64) -> Result<()> {
    let (lo, hi) = sigma_range(tree);
    if !(sigma >= lo && sigma <= hi) {
        return Err(GfError::Domain(format!("sigma = {sigma} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// `#{(b,c,d) : |distortion(a.b, x_d) - distortion(a.c, x_d)| <= sqrt(sigma)/2}`.
/// With `x_override`, the same point replaces every `x_d`.
pub fn triple_count_d1(
    tree: &RegularTree,
    a: &Word,
    x_override: Option<f64>,
    sigma: f64,
) -> Result<u64> {
    check_sigma(tree, sigma)?;
    tree_index(tree, a)?;
    let t = 0.5 * sigma.sqrt();
    let count_at = |x: f64| -> Result<u64> {
        let mut values = distortion_set(tree, a, x)?;
        values.sort_by(f64::total_cmp);
        let mut pairs = 0u64;
        for &v in &values {
            let lo = values.partition_point(|&u| u < v - t);
            let hi = values.partition_point(|&u| u <= v + t);
            pairs += (hi - lo) as u64;
        }
        Ok(pairs)
    };
    if let Some(x) = x_override {
        return Ok(tree.len() as u64 * count_at(x)?);
    }
    let per_d: Vec<u64> = tree
        .midpoints
        .par_iter()
        .map(|&x| count_at(x))
        .collect::<Result<Vec<u64>>>()?;
    Ok(per_d.iter().sum())
}

/// `#{(b,c,d)}` with distortion gap `>= sqrt(sigma)/2` yet derivative gap
/// `|T'_{ab}(x_d) - T'_{ac}(x_d)| <= e^{-2 lambda n} sigma`.
pub fn triple_count_d2(tree: &RegularTree, a: &Word, sigma: f64) -> Result<u64> {
    check_sigma(tree, sigma)?;
    tree_index(tree, a)?;
    let t_dist = 0.5 * sigma.sqrt();
    let t_der = (-2.0 * tree.lambda_hat * tree.n as f64).exp() * sigma;
    let per_d: Vec<u64> = tree
        .midpoints
        .par_iter()
        .map(|&x| {
            let dist = distortion_set(tree, a, x)?;
            let der: Vec<f64> = tree
                .words
                .iter()
                .map(|b| tree.system.branch_derivative(&a.concat(b), x))
                .collect::<Result<Vec<f64>>>()?;
            let mut count = 0u64;
            for i in 0..dist.len() {
                for j in 0..dist.len() {
                    if (dist[i] - dist[j]).abs() >= t_dist
                        && (der[i] - der[j]).abs() <= t_der
                    {
                        count += 1;
                    }
                }
            }
            Ok(count)
        })
        .collect::<Result<Vec<u64>>>()?;
    Ok(per_d.iter().sum())
}

/// Reference bound for the first triple count:
/// `alpha C^beta e^{3 lambda s n} sigma^{kappa/2}` with `alpha = 192 e^lambda`,
/// `beta = 11 lambda`, and `kappa = s_hat`.
pub fn d1_bound(tree: &RegularTree, sigma: f64) -> f64 {
    let lam = tree.lambda_hat;
    let n = tree.n as f64;
    192.0
        * lam.exp()
        * tree.c_eps.powf(11.0 * lam)
        * (3.0 * lam * tree.s_hat * n).exp()
        * sigma.powf(tree.s_hat / 2.0)
}

/// Reference bound for the second triple count, with the (weaker) constant
/// `96^2 C_gibbs^2 e^lambda C^{11 lambda}` carried through the derivation.
pub fn d2_bound(tree: &RegularTree, gibbs_c: f64, sigma: f64) -> f64 {
    let lam = tree.lambda_hat;
    let n = tree.n as f64;
    96.0 * 96.0
        * gibbs_c
        * gibbs_c
        * lam.exp()
        * tree.c_eps.powf(11.0 * lam)
        * (3.0 * lam * tree.s_hat * n).exp()
        * sigma.powf(tree.s_hat / 2.0)
}

/// The blocked word set kept by the pairwise zeta non-concentration test.
#[derive(Debug, Clone)]
pub struct WellDistributed {
    pub k: usize,
    pub s0: f64,
    pub eps3: f64,
    pub sigma_grid: Vec<f64>,
    /// Row-major `N x N` pair admissibility: `good[prev * N + cur]`.
    pub good_pair: Vec<bool>,
    pub good_blocks: u128,
    pub total_blocks: u128,
    pub complement_fraction: f64,
}

impl WellDistributed {
    pub fn pair_ok(&self, n: usize, prev: usize, cur: usize) -> bool {
        self.good_pair[prev * n + cur]
    }

    pub fn block_ok(&self, n: usize, block: &[usize]) -> bool {
        block.windows(2).all(|p| self.pair_ok(n, p[0], p[1]))
    }
}

/// Classifies every adjacent pair by the test
/// `e^{-2 lambda s n} #{(b,c): |zeta(b) - zeta(c)| <= sigma} <= sigma^{s0}`
/// over the dyadic grid of `[e^{-lambda n}, e^{-lambda eps3 n / 4}]`, then
/// counts the `(k+1)`-blocks whose pairs all pass.
pub fn well_distributed_blocks(
    tree: &RegularTree,
    k: usize,
    s0: f64,
    eps3: f64,
) -> Result<WellDistributed> {
    let n_tree = tree.len();
    let lam = tree.lambda_hat;
    let nf = tree.n as f64;
    let j_lo = (lam * eps3 * nf / 4.0 / std::f64::consts::LN_2).ceil() as i64;
    let j_hi = (lam * nf / std::f64::consts::LN_2).floor() as i64;
    if j_lo > j_hi {
        return Err(GfError::Domain(format!(
            "empty sigma grid: eps3 = {eps3} leaves no dyadic scale"
        )));
    }
    let sigma_grid: Vec<f64> = (j_lo..=j_hi).map(|j| 0.5f64.powi(j as i32)).collect();
    let norm = (-2.0 * lam * tree.s_hat * nf).exp();

    // growth state of prev.b, independent of the evaluation point
    let growths: Vec<Vec<(f64, f64)>> = tree
        .words
        .par_iter()
        .map(|prev| {
            tree.words
                .iter()
                .map(|b| match tree.system.kind {
                    MapKind::Gauss => {
                        let g = GaussGrowth::of(&prev.concat(b));
                        (g.log_q, g.t)
                    }
                    MapKind::Lueroth => {
                        let lg = tree
                            .system
                            .log_branch_derivative_abs(&prev.concat(b), 0.0)
                            .expect("tree words are admissible");
                        (lg, f64::NAN)
                    }
                })
                .collect()
        })
        .collect();

    let scale = 2.0 * lam * nf;
    let good_pair: Vec<bool> = (0..n_tree * n_tree)
        .into_par_iter()
        .map(|pc| {
            let (prev, cur) = (pc / n_tree, pc % n_tree);
            let x = tree.midpoints[cur];
            let mut zeta: Vec<f64> = growths[prev]
                .iter()
                .map(|&(lg, t)| match tree.system.kind {
                    MapKind::Gauss => (scale - 2.0 * (lg + (t * x).ln_1p())).exp(),
                    MapKind::Lueroth => (scale + lg).exp(),
                })
                .collect();
            zeta.sort_by(f64::total_cmp);
            sigma_grid.iter().all(|&sigma| {
                let mut pairs = 0u64;
                for &v in &zeta {
                    let lo = zeta.partition_point(|&u| u < v - sigma);
                    let hi = zeta.partition_point(|&u| u <= v + sigma);
                    pairs += (hi - lo) as u64;
                }
                norm * pairs as f64 <= sigma.powf(s0)
            })
        })
        .collect();

    // path count through the admissibility graph: 1^T M^k 1
    let mut v = vec![1u128; n_tree];
    for _ in 0..k {
        let mut next = vec![0u128; n_tree];
        for prev in 0..n_tree {
            let row = &good_pair[prev * n_tree..(prev + 1) * n_tree];
            let mut acc = 0u128;
            for (cur, &ok) in row.iter().enumerate() {
                if ok {
                    acc += v[cur];
                }
            }
            next[prev] = acc;
        }
        v = next;
    }
    let good_blocks: u128 = v.iter().sum();
    let total_blocks = (n_tree as u128).pow(k as u32 + 1);
    Ok(WellDistributed {
        k,
        s0,
        eps3,
        sigma_grid,
        good_pair,
        good_blocks,
        total_blocks,
        complement_fraction: 1.0 - good_blocks as f64 / total_blocks as f64,
    })
}

/// Deterministic rejection sampler of well-distributed blocks (tree-index
/// tuples of length `k + 1`).
pub fn sample_blocks(
    wd: &WellDistributed,
    tree: &RegularTree,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    if wd.good_blocks == 0 {
        return Err(GfError::Degenerate(
            "no well-distributed blocks to sample".into(),
        ));
    }
    let n = tree.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let block: Vec<usize> = (0..=wd.k).map(|_| rng.gen_range(0..n)).collect();
        if wd.block_ok(n, &block) {
            out.push(block);
        }
    }
    Ok(out)
}
