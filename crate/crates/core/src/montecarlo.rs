//! Monte Carlo estimates of the events the union and Chernoff bounds
//! control, with exact binomial tails as comparators.
//!
//! Sample `i` of a run always draws its coloring from substream `i` of the
//! master seed, so results do not depend on how samples are split across
//! worker threads.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::precise::{ln, to_f64, DEFAULT_PREC};
use crate::bounds::{binomial, binomial_lower_tail, binomial_upper_vs_union, rainbow_star_prob};
use crate::colorings::{random_coloring, CompleteGraphColoring, SeededStream};
use crate::error::{domain, Result};
use crate::trees::{rainbow_star_count, verify_coloring, OracleMode, VertexSet};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// How a sampled coloring is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialMode {
    /// Stars `T(u)` plus the exact internal packing: a sound lower bound,
    /// cheap enough for sweeps.
    StarCertificateOnly,
    Oracle(OracleMode),
}

impl TrialMode {
    fn oracle(self) -> OracleMode {
        match self {
            // the paper-mode value is exactly stars + internal packing
            TrialMode::StarCertificateOnly => OracleMode::Paper,
            TrialMode::Oracle(m) => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialConfig {
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub t: usize,
    pub samples: u64,
    pub seed: u64,
    pub mode: TrialMode,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return domain("samples must be at least 1");
        }
        if self.k < 2 || self.k > self.n {
            return domain(format!("need 2 <= k <= n, got k={} n={}", self.k, self.n));
        }
        if self.t < 1 {
            return domain("palette size must be at least 1");
        }
        if let TrialMode::Oracle(m) = self.mode {
            m.validate()?;
        }
        Ok(())
    }
}

/// Estimate with a 95% Wilson interval and analytic comparators.
///
/// The comparators bound the probability of the *failure* event: `B_S` for
/// [`estimate_bs`], "some `S` fails" for [`estimate_as_all`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub event: &'static str,
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub successes: u64,
    pub samples: u64,
    pub point_estimate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    /// Exact `Pr[X <= ℓ-1]`, `X ~ Binomial(n-k, k!/k^k)`.
    pub exact_tail: Option<f64>,
    pub chernoff: Option<f64>,
    pub union_bound: Option<f64>,
}

impl TrialSummary {
    pub fn contains(&self, x: f64) -> bool {
        self.wilson_lo <= x && x <= self.wilson_hi
    }
}

/// Wilson score interval for `successes` out of `samples`.
pub fn wilson_interval(successes: u64, samples: u64, z: f64) -> (f64, f64) {
    assert!(samples > 0 && successes <= samples);
    let n = samples as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // clamp so lo <= phat <= hi survives rounding at 0 and 1
    (
        (center - half).max(0.0).min(phat),
        (center + half).min(1.0).max(phat),
    )
}

fn summarize(
    event: &'static str,
    cfg: &TrialConfig,
    successes: u64,
    comparators: (Option<f64>, Option<f64>, Option<f64>),
) -> TrialSummary {
    let (lo, hi) = wilson_interval(successes, cfg.samples, Z95);
    TrialSummary {
        event,
        n: cfg.n,
        k: cfg.k,
        ell: cfg.ell,
        successes,
        samples: cfg.samples,
        point_estimate: successes as f64 / cfg.samples as f64,
        wilson_lo: lo,
        wilson_hi: hi,
        exact_tail: comparators.0,
        chernoff: comparators.1,
        union_bound: comparators.2,
    }
}

/// Exact `B_S` tail for `t = k`.
fn exact_bs_tail(n: usize, k: usize, ell: usize) -> Result<BigRational> {
    let p = rainbow_star_prob(k as u64)?;
    Ok(binomial_lower_tail((n - k) as u64, &p, ell as u64))
}

/// Frequency of `B_S`: at most `ℓ - 1` rainbow stars over `S = {1..k}`.
pub fn estimate_bs(cfg: &TrialConfig) -> Result<TrialSummary> {
    cfg.validate()?;
    if cfg.t != cfg.k {
        return domain(format!(
            "B_S sampling colors with exactly k={} colors, got t={}",
            cfg.k, cfg.t
        ));
    }
    let s = VertexSet::first(cfg.k, cfg.n)?;
    let seed = SeededStream::new(cfg.seed, 0);
    let hits: u64 = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let c = random_coloring(cfg.n, cfg.t, &seed.substream(i)).expect("validated dims");
            (rainbow_star_count(&s, &c) < cfg.ell) as u64
        })
        .sum();
    let exact = to_f64(&exact_bs_tail(cfg.n, cfg.k, cfg.ell)?);
    let chernoff = chernoff_tail_bound(cfg.n, cfg.k, cfg.ell).ok();
    let union = if cfg.ell >= 1 && cfg.n >= cfg.k + cfg.ell {
        Some(to_f64(
            &binomial_upper_vs_union(cfg.n as u64, cfg.k as u64, cfg.ell as u64)?.right,
        ))
    } else {
        None
    };
    Ok(summarize("B_S", cfg, hits, (Some(exact), chernoff, union)))
}

/// Outcome of [`estimate_as_all`]: the summary plus the first successful
/// coloring, which certifies the `(k, ℓ)` property for this `n`.
#[derive(Debug, Clone)]
pub struct AllSetsOutcome {
    pub summary: TrialSummary,
    pub witness: Option<CompleteGraphColoring>,
    pub witness_sample: Option<u64>,
}

/// Fraction of random colorings in which every `k`-set has `ℓ` internally
/// disjoint rainbow S-trees.
pub fn estimate_as_all(cfg: &TrialConfig) -> Result<AllSetsOutcome> {
    cfg.validate()?;
    let mode = cfg.mode.oracle();
    let seed = SeededStream::new(cfg.seed, 0);
    let results: Vec<bool> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let c = random_coloring(cfg.n, cfg.t, &seed.substream(i))?;
            Ok(verify_coloring(&c, cfg.k, cfg.ell, mode)?.pass)
        })
        .collect::<Result<_>>()?;
    let successes = results.iter().filter(|&&b| b).count() as u64;
    let witness_sample = results.iter().position(|&b| b).map(|i| i as u64);
    let witness = witness_sample
        .map(|i| random_coloring(cfg.n, cfg.t, &seed.substream(i)))
        .transpose()?;

    let comparators = if cfg.t == cfg.k && cfg.ell >= 1 {
        let per_set = to_f64(&exact_bs_tail(cfg.n, cfg.k, cfg.ell)?);
        let sets = binomial(cfg.n as u64, cfg.k as u64)
            .to_f64()
            .unwrap_or(f64::INFINITY);
        let chernoff = chernoff_tail_bound(cfg.n, cfg.k, cfg.ell)
            .ok()
            .map(|b| sets * b);
        let union = (cfg.n >= cfg.k + cfg.ell)
            .then(|| lemma_union_bound(cfg.n, cfg.k, cfg.ell))
            .transpose()?;
        (Some(per_set), chernoff, union)
    } else {
        (None, None, None)
    };
    Ok(AllSetsOutcome {
        summary: summarize("all_S", cfg, successes, comparators),
        witness,
        witness_sample,
    })
}

/// `n^{k+ℓ-1} (1-p)^{n-(k+ℓ-1)}` in f64.
fn lemma_union_bound(n: usize, k: usize, ell: usize) -> Result<f64> {
    Ok(crate::bounds::union_bound_failure(n as u64, k as u64, ell as u64)?.value)
}

/// `δ = ((n-k)p - ℓ + 1)/((n-k)p)` and the exponent `δ² p (n-k) / 2`.
fn chernoff_exponent(n: usize, k: usize, ell: usize) -> Result<BigRational> {
    if k > n {
        return domain(format!("need k <= n, got k={} n={}", k, n));
    }
    let p = rainbow_star_prob(k as u64)?;
    let mean = &p * BigRational::from_integer(((n - k) as u64).into());
    let need = BigRational::from_integer((ell.saturating_sub(1) as u64).into());
    if mean <= need {
        return domain(format!(
            "Chernoff bound needs (n-k)p > ell-1, got (n-k)p = {} ({:.4}) and ell-1 = {}",
            mean,
            to_f64(&mean),
            need
        ));
    }
    let delta = (&mean - &need) / &mean;
    Ok(&delta * &delta * &mean / BigRational::from_integer(2.into()))
}

/// `exp(-½ δ² p (n-k))`, the Chernoff bound on `Pr[X <= ℓ-1]`.
pub fn chernoff_tail_bound(n: usize, k: usize, ell: usize) -> Result<f64> {
    Ok((-to_f64(&chernoff_exponent(n, k, ell)?)).exp())
}

/// Rigorous check of `Pr[X <= ℓ-1] <= chernoff_tail_bound(n, k, ℓ)`.
pub fn exact_tail_within_chernoff(n: usize, k: usize, ell: usize) -> Result<bool> {
    let exponent = chernoff_exponent(n, k, ell)?;
    let tail = exact_bs_tail(n, k, ell)?;
    if tail.is_zero() {
        return Ok(true);
    }
    if tail >= BigRational::one() {
        return Ok(false);
    }
    let target = -exponent;
    let mut prec = DEFAULT_PREC;
    loop {
        let l = ln(&tail, prec);
        if l.hi <= target {
            return Ok(true);
        }
        if l.lo > target {
            return Ok(false);
        }
        prec *= 2;
        if prec > 1 << 14 {
            return domain("tail and Chernoff bound agree to 16000 bits");
        }
    }
}

/// Rigorous check of `Pr[X <= ℓ-1] <= n^{ℓ-1} (1-p)^{n-k-ℓ+1}`.
pub fn exact_tail_within_union(n: usize, k: usize, ell: usize) -> Result<bool> {
    let chain = binomial_upper_vs_union(n as u64, k as u64, ell as u64)?;
    Ok(chain.exact <= chain.right)
}

/// One row of a threshold sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub samples: u64,
    pub successes: u64,
    pub estimate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub exact_tail: Option<f64>,
    pub chernoff: Option<f64>,
    pub union_bound: Option<f64>,
}

impl From<&TrialSummary> for SweepRow {
    fn from(s: &TrialSummary) -> Self {
        Self {
            n: s.n,
            samples: s.samples,
            successes: s.successes,
            estimate: s.point_estimate,
            wilson_lo: s.wilson_lo,
            wilson_hi: s.wilson_hi,
            exact_tail: s.exact_tail,
            chernoff: s.chernoff,
            union_bound: s.union_bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdSweep {
    /// Smallest `n` whose Wilson lower bound reaches the target.
    pub found: Option<usize>,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub k: usize,
    pub ell: usize,
    pub t: usize,
    pub samples: u64,
    pub target: f64,
    pub n_values: Vec<usize>,
    pub seed: u64,
    /// Stop at the first `n` that reaches the target.
    pub stop_at_first: bool,
}

/// Scans `n` upward with star certificates and reports where random
/// colorings start to succeed.
pub fn empirical_threshold(cfg: &SweepConfig) -> Result<ThresholdSweep> {
    if cfg.n_values.windows(2).any(|w| w[0] >= w[1]) {
        return domain("n values must be strictly ascending");
    }
    if !(0.0..=1.0).contains(&cfg.target) {
        return domain("target must lie in [0, 1]");
    }
    let mut sweep = ThresholdSweep {
        found: None,
        rows: Vec::new(),
    };
    for &n in &cfg.n_values {
        let trial = TrialConfig {
            n,
            k: cfg.k,
            ell: cfg.ell,
            t: cfg.t,
            samples: cfg.samples,
            seed: cfg.seed,
            mode: TrialMode::StarCertificateOnly,
        };
        let out = estimate_as_all(&trial)?;
        sweep.rows.push((&out.summary).into());
        if sweep.found.is_none() && out.summary.wilson_lo >= cfg.target {
            sweep.found = Some(n);
            if cfg.stop_at_first {
                break;
            }
        }
    }
    Ok(sweep)
}

pub const SWEEP_CSV_HEADER: &str =
    "n,samples,successes,estimate,wilson_lo,wilson_hi,exact_tail,chernoff,union_bound";

/// Sweep table as CSV. Missing comparators are empty fields.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let opt = |x: Option<f64>| x.map(|v| format!("{:e}", v)).unwrap_or_default();
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.samples,
            r.successes,
            r.estimate,
            r.wilson_lo,
            r.wilson_hi,
            opt(r.exact_tail),
            opt(r.chernoff),
            opt(r.union_bound)
        ));
    }
    out
}
