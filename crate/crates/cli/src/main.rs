//! `gf` — command-line scans over the gibbs-fourier library.
//!
//! Every subcommand reads the shared flag set, runs one scan, writes a CSV
//! artifact (deterministic for a fixed config and seed) and prints a JSON
//! summary `{params, fitted_exponents, runtime_s}` to stdout.  Timestamps and
//! wall-clock data live only in the JSON summary, never in the CSV body.
//!
//! Exit codes: 0 success, 1 identity failure, 2 budget exceeded, 3 scan fully
//! aliased, 64 invalid configuration, 65 other errors.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use gibbs_fourier::config::RunConfig;
use gibbs_fourier::continuants::{
    check_determinant_with_hook, length_bounds_check, mirror_identities, quasi_multiplicativity,
};
use gibbs_fourier::equidist::{del_report, sample_point, SequenceSpec, WeylPoint};
use gibbs_fourier::error::GfError;
use gibbs_fourier::fourier::{decay_scan, expsum_decay_scan, frequency_window, SampleMode};
use gibbs_fourier::markov::MapKind;
use gibbs_fourier::nonconc::{nonconc_report, well_distributed_blocks};
use gibbs_fourier::thermo::{
    estimate_parameters, gibbs_measure, large_deviation_scan, regular_words,
};
use gibbs_fourier::word::Word;

#[derive(Parser)]
#[command(name = "gf", version, about = "Numerical scans for Gibbs measures of Markov maps")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Interval map family: "gauss" or "lueroth".
    #[arg(long, default_value = "gauss")]
    map: String,
    /// Inclusive digit range, e.g. --alphabet 1,2.
    #[arg(long, value_delimiter = ',', num_args = 1..=2, default_values_t = vec![1u32, 2u32])]
    alphabet: Vec<u32>,
    /// Potential exponent in [0, 1].
    #[arg(long, default_value_t = 0.5344)]
    s: f64,
    /// Word depth.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Corridor half-width.
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
    /// Per-command size knob (see each subcommand's help).
    #[arg(long)]
    k: Option<usize>,
    /// RNG seed for every sampled quantity.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Hard cap on enumeration/evaluation work.
    #[arg(long, default_value_t = 1u64 << 26)]
    budget: u64,
    /// CSV output path (defaults to <command>.csv).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact continuant identity suite over random words (k = word count, default 10000).
    Identities {
        #[command(flatten)]
        common: Common,
        /// Corrupt the continuant recurrence (negative-test hook).
        #[arg(long, hide = true)]
        corrupt_recurrence: bool,
    },
    /// Fourier-decay scan over dyadic frequency blocks (k = top block index, default 20).
    Decay {
        #[command(flatten)]
        common: Common,
    },
    /// Distortion non-concentration counts on the regular tree (k = (a,b) samples, default 4).
    Nonconc {
        #[command(flatten)]
        common: Common,
    },
    /// Exponential sums over well-distributed blocks (k = block length, default 2).
    Expsum {
        #[command(flatten)]
        common: Common,
    },
    /// Weyl-sum equidistribution table (k = max frequency m, default 5).
    Equidist {
        #[command(flatten)]
        common: Common,
        /// Override the evaluation point with an exact rational "p/q".
        #[arg(long)]
        x: Option<String>,
        /// File with one integer per line: explicit strictly increasing n_k.
        #[arg(long)]
        seq: Option<PathBuf>,
    },
    /// Large-deviation complement-mass scan (k = depth span below n, default 4).
    Largedev {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("GF_THREADS") {
        if let Ok(t) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    let started = Instant::now();
    let result = match cli.cmd {
        Cmd::Identities { common, corrupt_recurrence } => {
            cmd_identities(&common, corrupt_recurrence, started)
        }
        Cmd::Decay { common } => cmd_decay(&common, started),
        Cmd::Nonconc { common } => cmd_nonconc(&common, started),
        Cmd::Expsum { common } => cmd_expsum(&common, started),
        Cmd::Equidist { common, x, seq } => cmd_equidist(&common, x, seq, started),
        Cmd::Largedev { common } => cmd_largedev(&common, started),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gf: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &GfError) -> u8 {
    match e {
        GfError::Identity(_) => 1,
        GfError::Budget(_) => 2,
        GfError::Aliased(_) => 3,
        GfError::Domain(_) => 64,
        _ => 65,
    }
}

fn config_of(c: &Common) -> Result<RunConfig, GfError> {
    let map = match c.map.as_str() {
        "gauss" => MapKind::Gauss,
        "lueroth" => MapKind::Lueroth,
        other => {
            return Err(GfError::Domain(format!(
                "unknown map '{other}' (expected gauss or lueroth)"
            )))
        }
    };
    let lo = *c.alphabet.first().unwrap_or(&1);
    let hi = *c.alphabet.last().unwrap_or(&lo);
    let cfg = RunConfig { map, alphabet: [lo, hi], s: c.s, n: c.n, epsilon: c.epsilon, budget: c.budget };
    cfg.validate()?;
    Ok(cfg)
}

/// 17 significant digits, '.' decimal separator, locale-independent.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(c: &Common, default_name: &str, header: &str, rows: &[String]) -> Result<PathBuf, GfError> {
    let path = c
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{default_name}.csv")));
    let mut body = String::with_capacity(rows.len() * 64 + header.len() + 1);
    body.push_str(header);
    body.push('\n');
    for r in rows {
        body.push_str(r);
        body.push('\n');
    }
    let mut f = std::fs::File::create(&path)
        .map_err(|e| GfError::Structure(format!("cannot create {}: {e}", path.display())))?;
    f.write_all(body.as_bytes())
        .map_err(|e| GfError::Structure(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn params_json(c: &Common, cfg: &RunConfig, k: usize) -> serde_json::Value {
    json!({
        "map": cfg.map,
        "alphabet": cfg.alphabet,
        "s": cfg.s,
        "n": cfg.n,
        "epsilon": cfg.epsilon,
        "k": k,
        "seed": c.seed,
        "budget": cfg.budget,
    })
}

fn emit_summary(params: serde_json::Value, fitted: serde_json::Value, started: Instant) {
    let summary = json!({
        "params": params,
        "fitted_exponents": fitted,
        "runtime_s": started.elapsed().as_secs_f64(),
    });
    println!("{summary}");
}

fn cmd_identities(c: &Common, corrupt: bool, started: Instant) -> Result<(), GfError> {
    let cfg = config_of(c)?;
    let count = c.k.unwrap_or(10_000);
    let (lo, hi) = (cfg.alphabet[0], cfg.alphabet[1]);
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let four = BigRational::from(BigInt::from(4));
    let (mut det_ok, mut mirror_ok, mut len_ok, mut quasi_ok, mut quasi_run) =
        (0u64, 0u64, 0u64, 0u64, 0u64);
    for _ in 0..count {
        let len = rng.gen_range(1..=30usize);
        let digits: Vec<u32> = (0..len).map(|_| rng.gen_range(lo..=hi)).collect();
        let w = Word::new(digits)?;
        check_determinant_with_hook(&w, corrupt)?;
        det_ok += 1;
        let m = mirror_identities(&w)?;
        if !m.ok {
            return Err(GfError::Identity(format!("mirror identity failed on {w}")));
        }
        mirror_ok += 1;
        if !length_bounds_check(&w)? {
            return Err(GfError::Identity(format!("interval length bounds failed on {w}")));
        }
        len_ok += 1;
        if len >= 2 {
            let ratio = quasi_multiplicativity(&w, len / 2)?;
            if ratio < half || ratio > four {
                return Err(GfError::Identity(format!(
                    "quasi-multiplicativity ratio {ratio} outside [1/2, 4] on {w}"
                )));
            }
            quasi_ok += 1;
            quasi_run += 1;
        }
    }
    let report = json!({
        "params": params_json(c, &cfg, count),
        "counts": {
            "words": count,
            "determinant_ok": det_ok,
            "mirror_ok": mirror_ok,
            "length_ok": len_ok,
            "quasi_ok": quasi_ok,
            "quasi_checked": quasi_run,
        },
        "runtime_s": started.elapsed().as_secs_f64(),
    });
    if let Some(path) = &c.out {
        std::fs::write(path, format!("{report}\n"))
            .map_err(|e| GfError::Structure(format!("cannot write {}: {e}", path.display())))?;
    }
    println!("{report}");
    Ok(())
}

fn cmd_decay(c: &Common, started: Instant) -> Result<(), GfError> {
    let cfg = config_of(c)?;
    let spec = cfg.to_spec()?;
    let j_hi = c.k.unwrap_or(20) as i32;
    let measure = gibbs_measure(&spec)?;
    let resolution = measure.min_cylinder_length()?;
    let discrete = measure.to_discrete()?;
    let scan = decay_scan(
        &discrete,
        0,
        j_hi,
        SampleMode::LogUniform { samples: 256, seed: c.seed },
        resolution,
    )?;
    let rows: Vec<String> = scan
        .blocks
        .iter()
        .map(|b| {
            format!(
                "{},{},{},{},{},{}",
                b.j,
                fmt(b.xi_lo),
                fmt(b.xi_hi),
                fmt(b.sup_abs),
                b.n_samples,
                b.aliased
            )
        })
        .collect();
    write_csv(c, "decay", "j,xi_lo,xi_hi,sup_abs,n_samples,aliased", &rows)?;
    emit_summary(
        params_json(c, &cfg, j_hi as usize),
        json!({
            "e_hat": scan.e_hat,
            "e_se": scan.e_se,
            "residual": scan.residual,
            "aliasing_bound": scan.aliasing_bound,
        }),
        started,
    );
    Ok(())
}

fn cmd_nonconc(c: &Common, started: Instant) -> Result<(), GfError> {
    let cfg = config_of(c)?;
    let spec = cfg.to_spec()?;
    let ab_samples = c.k.unwrap_or(4);
    let (lh, sh) = estimate_parameters(&spec)?;
    let tree = regular_words(&spec, lh, sh)?;
    let report = nonconc_report(&tree, ab_samples)?;
    let n_tree = report.tree_size as f64;
    let rows: Vec<String> = report
        .rho_grid
        .iter()
        .zip(&report.counts)
        .zip(&report.bound_ok)
        .map(|((&rho, &count), &ok)| {
            let bound = report.c0_hat * rho.powf(report.kappa_hat) * n_tree;
            format!("{},{},{},{},{}", cfg.n, fmt(rho), count, fmt(bound), ok)
        })
        .collect();
    write_csv(c, "nonconc", "n,rho,count,bound,ok", &rows)?;
    emit_summary(
        params_json(c, &cfg, ab_samples),
        json!({
            "kappa_hat": report.kappa_hat,
            "c0_hat": report.c0_hat,
            "residual": report.residual,
            "lambda_hat": lh,
            "s_hat": sh,
        }),
        started,
    );
    Ok(())
}

fn cmd_expsum(c: &Common, started: Instant) -> Result<(), GfError> {
    let cfg = config_of(c)?;
    let spec = cfg.to_spec()?;
    let k = c.k.unwrap_or(2);
    let (lh, sh) = estimate_parameters(&spec)?;
    let tree = regular_words(&spec, lh, sh)?;
    let kappa = nonconc_report(&tree, 2)?.kappa_hat;
    let s0 = kappa.min(sh) / 4.0;
    let wd = well_distributed_blocks(&tree, k, s0, 0.25)?;
    let (eta_lo, eta_hi) = frequency_window(&tree);
    let points = 24;
    let eta_grid: Vec<f64> = (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            (eta_lo.ln() + t * (eta_hi.ln() - eta_lo.ln())).exp()
        })
        .collect();
    let scan = expsum_decay_scan(&tree, &wd, &eta_grid, 64, c.seed)?;
    let rows: Vec<String> = scan
        .rows
        .iter()
        .map(|r| format!("{},{},{}", fmt(r.eta), fmt(r.max_abs), r.n_blocks))
        .collect();
    write_csv(c, "expsum", "eta,max_abs,n_blocks_sampled", &rows)?;
    emit_summary(
        params_json(c, &cfg, k),
        json!({
            "eps2_hat": scan.eps2_hat,
            "eps2_se": scan.eps2_se,
            "s0": s0,
            "good_blocks": wd.good_blocks as u64,
            "complement_fraction": wd.complement_fraction,
            "window": [scan.window.0, scan.window.1],
        }),
        started,
    );
    Ok(())
}

fn parse_rational(s: &str) -> Result<BigRational, GfError> {
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| GfError::Domain(format!("invalid rational component '{t}'")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q == BigInt::from(0) {
                return Err(GfError::Domain("rational denominator must be nonzero".into()));
            }
            Ok(BigRational::new(parse_int(p)?, q))
        }
        None => Ok(BigRational::from(parse_int(s)?)),
    }
}

fn cmd_equidist(
    c: &Common,
    x_override: Option<String>,
    seq_path: Option<PathBuf>,
    started: Instant,
) -> Result<(), GfError> {
    let cfg = config_of(c)?;
    let spec = cfg.to_spec()?;
    let m_max = c.k.unwrap_or(5) as u64;
    let x = match &x_override {
        Some(s) => WeylPoint::Exact(parse_rational(s)?),
        None => {
            let (_, xv) = sample_point(&spec, 50, c.seed)?;
            WeylPoint::Exact(xv)
        }
    };
    let seq = match &seq_path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| GfError::Structure(format!("cannot read {}: {e}", p.display())))?;
            let terms: Vec<u64> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(|l| {
                    l.parse::<u64>()
                        .map_err(|_| GfError::Domain(format!("invalid sequence term '{l}'")))
                })
                .collect::<Result<_, _>>()?;
            SequenceSpec::explicit(terms)?
        }
        None => SequenceSpec::Identity,
    };
    let mut n_grid: Vec<usize> = vec![10, 100, 1000, 10_000];
    if let Some(avail) = seq.available() {
        n_grid.retain(|&n| n <= avail);
        if n_grid.is_empty() {
            n_grid.push(avail);
        }
    }
    n_grid.retain(|&n| (n as u64) <= cfg.budget);
    if n_grid.is_empty() {
        return Err(GfError::Budget(format!(
            "budget {} admits no Weyl-sum length",
            cfg.budget
        )));
    }
    let rows = del_report(&x, &seq, m_max, &n_grid)?;
    let csv_rows: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{}",
                r.m,
                r.n,
                fmt(r.w.re),
                fmt(r.w.im),
                fmt(r.w.norm())
            )
        })
        .collect();
    write_csv(c, "equidist", "m,N,re_W,im_W,abs_W", &csv_rows)?;
    let worst = rows
        .iter()
        .filter(|r| r.n == *n_grid.last().unwrap())
        .map(|r| r.w.norm())
        .fold(0.0f64, f64::max);
    emit_summary(
        params_json(c, &cfg, m_max as usize),
        json!({
            "max_abs_w_at_largest_n": worst,
            "n_grid": n_grid,
        }),
        started,
    );
    Ok(())
}

fn cmd_largedev(c: &Common, started: Instant) -> Result<(), GfError> {
    let cfg = config_of(c)?;
    let spec = cfg.to_spec()?;
    let span = c.k.unwrap_or(4);
    let n_lo = cfg.n.saturating_sub(span).max(2);
    let n_list: Vec<usize> = (n_lo..=cfg.n).collect();
    let scan = large_deviation_scan(&spec, cfg.epsilon, &n_list)?;
    let rows: Vec<String> = scan
        .rows
        .iter()
        .map(|r| format!("{},{}", r.n, fmt(r.complement_mass)))
        .collect();
    write_csv(c, "largedev", "n,complement_mass", &rows)?;
    emit_summary(
        params_json(c, &cfg, span),
        json!({
            "delta_hat": scan.delta_hat,
            "lambda_hat": scan.lambda_hat,
            "s_hat": scan.s_hat,
        }),
        started,
    );
    Ok(())
}
