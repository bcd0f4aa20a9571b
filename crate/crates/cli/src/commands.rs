use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use rainbow_core::bounds::precise::to_f64;
use rainbow_core::bounds::{
    chernoff_theta, combined_n, ell_min, expected_x_upper, multicolor_ramsey_upper, n1_bound,
    n2_bound, n_threshold, parse_eps, star_double_count, RamseyQuery,
};
use rainbow_core::colorings::{
    random_coloring, read_coloring, CompleteGraphColoring, SeededStream,
};
use rainbow_core::montecarlo::{
    empirical_threshold, estimate_as_all, estimate_bs, sweep_csv, SweepConfig, TrialConfig,
    TrialMode, TrialSummary,
};
use rainbow_core::search::{search, witness_dump, SearchConfig, SearchOutcome, Strategy};
use rainbow_core::trees::{
    combinations, exact_count, max_disjoint_rainbow_trees, verify_coloring, verify_coloring_with,
    OracleMode, VerifyOptions, VertexSet,
};

use crate::args::*;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_NONE_FOUND: i32 = 3;

/// What a command produced. Only `stdout` is digested and replayed.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    /// Human-readable summary.
    pub stderr: String,
    pub code: i32,
    pub seed: Option<u64>,
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn load(path: &Path) -> Result<CompleteGraphColoring> {
    let file = fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_coloring(file).with_context(|| format!("cannot read coloring {}", path.display()))
}

fn save(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

/// `paper`, `full` (budget `k-2`, at least 1) or `full:<b>`.
pub fn parse_mode(s: &str, k: usize) -> Result<OracleMode> {
    if s == "full" {
        return Ok(OracleMode::full_default(k));
    }
    Ok(s.parse()?)
}

fn parse_trial_mode(s: &str, k: usize) -> Result<TrialMode> {
    match s {
        "star" => Ok(TrialMode::StarCertificateOnly),
        other => Ok(TrialMode::Oracle(parse_mode(other, k)?)),
    }
}

/// `a:b:s` (inclusive) or `a,b,c`.
pub fn parse_n_range(s: &str) -> Result<Vec<usize>> {
    let s = s.trim();
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let (a, b, step) = match parts.as_slice() {
            [a, b] => (a.parse::<usize>()?, b.parse::<usize>()?, 1),
            [a, b, c] => (a.parse()?, b.parse()?, c.parse()?),
            _ => bail!("range must be start:end[:step], got {:?}", s),
        };
        if step == 0 {
            bail!("range step must be positive");
        }
        Ok((a..=b).step_by(step).collect())
    } else if s.is_empty() {
        Ok(Vec::new())
    } else {
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .map_err(|e| anyhow!("bad n {:?}: {}", x, e))
            })
            .collect()
    }
}

pub fn run(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Bounds(a) => bounds(a),
        Command::Verify(a) => verify(a),
        Command::Search(a) => search_cmd(a),
        Command::Oracle(a) => oracle(a),
        Command::Mc(McCommand::Bs(a)) => mc_bs(a),
        Command::Mc(McCommand::As(a)) => mc_as(a),
        Command::Mc(McCommand::Sweep(a)) => mc_sweep(a),
        Command::Repro(a) => repro(a),
        Command::Replay(_) => unreachable!("replay is handled by main"),
    }
}

fn bounds(a: &BoundsArgs) -> Result<Output> {
    let eps = a.eps.as_deref().map(parse_eps).transpose()?;
    let r = combined_n(a.k, a.ell, eps.as_ref())?;
    let mut table = String::new();
    let row = |t: &mut String, name: &str, v: &dyn std::fmt::Display| {
        writeln!(t, "{:<14} {}", name, v).unwrap()
    };
    row(&mut table, "k", &r.k);
    row(&mut table, "ell", &r.ell);
    row(
        &mut table,
        "p",
        &format!("{} ~ {:.6}", r.p.exact, r.p.approx),
    );
    row(
        &mut table,
        "f(k)",
        &format!("{} ~ {:.6}", r.f_k.exact, r.f_k.approx),
    );
    row(&mut table, "N1", &r.n1);
    row(&mut table, "N2", &format!("{} ({:?})", r.n2, r.n2_kind));
    if let Some(e) = &r.eps {
        row(&mut table, "eps", &e.exact);
        row(
            &mut table,
            "theta",
            &format!("{:.6}", r.theta.unwrap_or(f64::NAN)),
        );
        row(
            &mut table,
            "ell_min",
            &r.ell_min.map_or("-".into(), |v| v.to_string()),
        );
        row(
            &mut table,
            "n_threshold",
            &r.n_threshold.map_or("-".into(), |v| v.to_string()),
        );
    }
    row(
        &mut table,
        "combined N",
        &format!("{} via {:?}", r.combined_n, r.route),
    );
    Ok(Output {
        stdout: json(&r)?,
        stderr: table,
        code: EXIT_PASS,
        seed: None,
    })
}

fn verify(a: &VerifyArgs) -> Result<Output> {
    let c = load(&a.file)?;
    let mode = parse_mode(&a.mode, a.k)?;
    let opts = VerifyOptions {
        with_counts: a.counts,
        ..Default::default()
    };
    let v = verify_coloring_with(&c, a.k, a.ell, mode, opts)?;
    let human = match &v.witness_s {
        None => format!(
            "PASS: all {} sets of size {} have {} trees ({})\n",
            v.sets_checked, a.k, a.ell, v.mode
        ),
        Some(s) => format!(
            "FAIL: S={:?} has only {} trees, need {} ({})\n",
            s,
            v.witness_count.unwrap_or(0),
            a.ell,
            v.mode
        ),
    };
    Ok(Output {
        stdout: json(&v)?,
        stderr: human,
        code: if v.pass { EXIT_PASS } else { EXIT_FAIL },
        seed: None,
    })
}

#[derive(Serialize)]
struct SearchReport<'a> {
    status: &'static str,
    /// Only set by exhaustive search that covered the whole space.
    no_coloring_exists: bool,
    n: usize,
    k: usize,
    ell: usize,
    t: usize,
    strategy: String,
    mode: String,
    budget: u64,
    seed: u64,
    tried: u64,
    coloring: Option<String>,
    verification: Option<&'a rainbow_core::trees::Verification>,
}

fn search_cmd(a: &SearchArgs) -> Result<Output> {
    let mode = parse_mode(&a.mode, a.k)?;
    let strategy = match a.strategy {
        StrategyArg::Random => Strategy::Random,
        StrategyArg::Exhaustive => Strategy::Exhaustive,
        StrategyArg::Local => Strategy::Local,
    };
    let cfg = SearchConfig {
        n: a.n,
        k: a.k,
        ell: a.ell,
        t: a.t,
        strategy,
        budget: a.budget,
        seed: a.seed,
        mode,
    };
    let outcome = search(&cfg)?;
    let mut report = SearchReport {
        status: "",
        no_coloring_exists: false,
        n: a.n,
        k: a.k,
        ell: a.ell,
        t: a.t,
        strategy: strategy.to_string(),
        mode: mode.name(),
        budget: a.budget,
        seed: a.seed,
        tried: outcome.tried(),
        coloring: None,
        verification: None,
    };
    let (code, human) = match &outcome {
        SearchOutcome::Found {
            coloring,
            verification,
            ..
        } => {
            report.status = "found";
            report.coloring = Some(coloring.to_text());
            report.verification = Some(verification);
            if let Some(p) = &a.out {
                save(p, &coloring.to_text())?;
            }
            if let Some(p) = &a.witness {
                save(p, &witness_dump(coloring, a.k, mode)?)?;
            }
            (
                EXIT_PASS,
                format!("found a passing coloring after {} tries\n", outcome.tried()),
            )
        }
        SearchOutcome::NoneWithinBudget { tried } => {
            report.status = "none_within_budget";
            (
                EXIT_NONE_FOUND,
                format!("none found within budget ({} tried)\n", tried),
            )
        }
        SearchOutcome::ProvenNone { tried } => {
            report.status = "proven_none";
            report.no_coloring_exists = true;
            (
                EXIT_NONE_FOUND,
                format!(
                    "no coloring exists: all {} colorings up to color permutation fail\n",
                    tried
                ),
            )
        }
    };
    Ok(Output {
        stdout: json(&report)?,
        stderr: human,
        code,
        seed: Some(a.seed),
    })
}

#[derive(Serialize)]
struct OracleReport {
    #[serde(rename = "S")]
    set: Vec<usize>,
    mode: String,
    count: usize,
    /// 1-based edge lists.
    trees: Vec<Vec<[usize; 2]>>,
    dump: String,
}

fn oracle(a: &OracleArgs) -> Result<Output> {
    let c = load(&a.file)?;
    let set = VertexSet::from_one_based(&a.set, c.n())?;
    let mode = parse_mode(&a.mode, set.k())?;
    let (count, family) = max_disjoint_rainbow_trees(&set, &c, mode)?;
    let report = OracleReport {
        set: set.one_based(),
        mode: mode.name(),
        count,
        trees: family
            .trees()
            .iter()
            .map(|t| t.edges().iter().map(|&(u, v)| [u + 1, v + 1]).collect())
            .collect(),
        dump: family.dump(),
    };
    Ok(Output {
        stderr: format!("S={} max={} ({})\n{}", set, count, report.mode, report.dump),
        stdout: json(&report)?,
        code: EXIT_PASS,
        seed: None,
    })
}

fn trial_config(a: &McArgs, mode: TrialMode) -> TrialConfig {
    TrialConfig {
        n: a.n,
        k: a.k,
        ell: a.ell,
        t: a.t.unwrap_or(a.k),
        samples: a.samples,
        seed: a.seed,
        mode,
    }
}

fn summary_line(s: &TrialSummary) -> String {
    let opt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{:.6}", v));
    format!(
        "{} n={}: {}/{} = {:.6}, 95% CI [{:.6}, {:.6}], exact tail {}, chernoff {}, union {}\n",
        s.event,
        s.n,
        s.successes,
        s.samples,
        s.point_estimate,
        s.wilson_lo,
        s.wilson_hi,
        opt(s.exact_tail),
        opt(s.chernoff),
        opt(s.union_bound)
    )
}

fn mc_bs(a: &McArgs) -> Result<Output> {
    let s = estimate_bs(&trial_config(a, TrialMode::StarCertificateOnly))?;
    Ok(Output {
        stdout: json(&s)?,
        stderr: summary_line(&s),
        code: EXIT_PASS,
        seed: Some(a.seed),
    })
}

#[derive(Serialize)]
struct AsReport<'a> {
    #[serde(flatten)]
    summary: &'a TrialSummary,
    mode: String,
    witness_sample: Option<u64>,
    witness: Option<String>,
}

fn mc_as(a: &McAsArgs) -> Result<Output> {
    let mode = parse_trial_mode(&a.mode, a.base.k)?;
    let out = estimate_as_all(&trial_config(&a.base, mode))?;
    let witness = out.witness.as_ref().map(|c| c.to_text());
    if let (Some(p), Some(text)) = (&a.witness, &witness) {
        save(p, text)?;
    }
    let report = AsReport {
        summary: &out.summary,
        mode: match mode {
            TrialMode::StarCertificateOnly => "star".into(),
            TrialMode::Oracle(m) => m.name(),
        },
        witness_sample: out.witness_sample,
        witness,
    };
    Ok(Output {
        stdout: json(&report)?,
        stderr: summary_line(&out.summary),
        code: EXIT_PASS,
        seed: Some(a.base.seed),
    })
}

fn mc_sweep(a: &SweepArgs) -> Result<Output> {
    if a.samples == 0 {
        bail!("samples must be at least 1");
    }
    let cfg = SweepConfig {
        k: a.k,
        ell: a.ell,
        t: a.t.unwrap_or(a.k),
        samples: a.samples,
        target: a.target,
        n_values: parse_n_range(&a.n_range)?,
        seed: a.seed,
        stop_at_first: a.stop_at_first,
    };
    let sweep = empirical_threshold(&cfg)?;
    let stdout = if a.json {
        json(&sweep)?
    } else {
        sweep_csv(&sweep.rows)
    };
    let stderr = match sweep.found {
        Some(n) => format!("first n with Wilson lower bound >= {}: {}\n", a.target, n),
        None => format!("not found in range (target {})\n", a.target),
    };
    Ok(Output {
        stdout,
        stderr,
        code: EXIT_PASS,
        seed: Some(a.seed),
    })
}

#[derive(Serialize)]
struct Check {
    name: String,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct ReproReport {
    target: ReproTarget,
    pass: bool,
    checks: Vec<Check>,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

fn repro(a: &ReproArgs) -> Result<Output> {
    let checks = match a.target {
        ReproTarget::Theta => repro_theta()?,
        ReproTarget::Thresholds => repro_thresholds()?,
        ReproTarget::Lemma34 => repro_lemma34(a.n, a.samples, a.seed)?,
        ReproTarget::K6 => repro_k6(a.seed)?,
    };
    let pass = checks.iter().all(|c| c.pass);
    let mut human = String::new();
    for c in &checks {
        writeln!(
            human,
            "{} {}: {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        )?;
    }
    let report = ReproReport {
        target: a.target,
        pass,
        checks,
    };
    Ok(Output {
        stdout: json(&report)?,
        stderr: human,
        code: if pass { EXIT_PASS } else { EXIT_FAIL },
        seed: matches!(a.target, ReproTarget::Lemma34 | ReproTarget::K6).then_some(a.seed),
    })
}

fn repro_theta() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (eps, expected) in [("1/2", 712.415), ("2/3", 360.699)] {
        let theta = chernoff_theta(&parse_eps(eps)?, 3)?;
        out.push(check(
            format!("theta(eps={}, k=3)", eps),
            (theta - expected).abs() <= 1e-2,
            format!("{:.6} vs {}", theta, expected),
        ));
    }
    Ok(out)
}

fn repro_thresholds() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    // (eps, ell_min, ell range, closed form)
    type Case = (
        &'static str,
        u64,
        std::ops::RangeInclusive<u64>,
        fn(u64) -> u64,
    );
    let cases: [Case; 2] = [
        ("1/2", 80, 80..=120, |l| 9 * l - 6),
        ("2/3", 28, 28..=60, |l| (3 * (9 * l - 7)).div_ceil(2)),
    ];
    for (eps_s, expected_min, range, closed) in cases {
        let eps = parse_eps(eps_s)?;
        let min = ell_min(&eps, 3)?;
        out.push(check(
            format!("ell_min(eps={}, k=3)", eps_s),
            min == expected_min,
            format!("{} vs {}", min, expected_min),
        ));
        let mut bad = Vec::new();
        for l in range.clone() {
            let nt = n_threshold(&eps, 3, l)?;
            if nt != closed(l) {
                bad.push(format!("ell={}: {} vs {}", l, nt, closed(l)));
            }
        }
        out.push(check(
            format!(
                "n_threshold(eps={}) closed form on ell {}..={}",
                eps_s,
                range.start(),
                range.end()
            ),
            bad.is_empty(),
            if bad.is_empty() {
                "exact match".to_string()
            } else {
                bad.join("; ")
            },
        ));
    }
    let n1 = n1_bound(3, 1)?;
    out.push(check("N1(3,1)", n1.to_string() == "572", n1.to_string()));
    let (_, n2) = n2_bound(3, 1)?;
    out.push(check("N2(3,1)", n2.to_string() == "6", n2.to_string()));
    let r = multicolor_ramsey_upper(&RamseyQuery::diagonal(3, 4)?);
    out.push(check(
        "R_3(4) multinomial bound",
        r.to_string() == "1680",
        r.to_string(),
    ));
    Ok(out)
}

fn repro_lemma34(n: usize, samples: u64, seed: u64) -> Result<Vec<Check>> {
    if n < 3 || samples == 0 {
        bail!("lemma34 needs n >= 3 and samples >= 1");
    }
    let base = SeededStream::new(seed, 0);
    let (mut identity_ok, mut averaging_ok, mut min_ok) = (0u64, 0u64, 0u64);
    let mut worst_min = 0usize;
    let mut bound_s = String::new();
    for i in 0..samples {
        let c = random_coloring(n, 3, &base.substream(i))?;
        let (stars, products) = star_double_count(&c)?;
        identity_ok += (stars == products) as u64;
        let avg = expected_x_upper(&c)?;
        averaging_ok += avg.holds() as u64;
        let min = combinations(n, 3)
            .map(|s| exact_count(&VertexSet::new(s, n)?, &c, OracleMode::Paper))
            .collect::<rainbow_core::Result<Vec<_>>>()?
            .into_iter()
            .min()
            .unwrap_or(0);
        worst_min = worst_min.max(min);
        min_ok += avg.within_bound(min) as u64;
        bound_s = format!("{:.4}", to_f64(&avg.bound));
    }
    Ok(vec![
        check(
            "sum_S stars(S) = sum_v d1 d2 d3",
            identity_ok == samples,
            format!("{}/{} colorings", identity_ok, samples),
        ),
        check(
            "average bound 3 + avg(d1 d2 d3) <= 2(n-1)^2/(9(n-2)) + 3",
            averaging_ok == samples,
            format!("{}/{} colorings", averaging_ok, samples),
        ),
        check(
            format!("min_S paper value <= {}", bound_s),
            min_ok == samples,
            format!(
                "{}/{} colorings, largest min {}",
                min_ok, samples, worst_min
            ),
        ),
    ])
}

fn repro_k6(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (ell, strategy) in [(1, Strategy::Random), (2, Strategy::Local)] {
        let mode = OracleMode::full_default(3);
        let cfg = SearchConfig {
            n: 6,
            k: 3,
            ell,
            t: 3,
            strategy,
            budget: 1_000_000,
            seed,
            mode,
        };
        let detail = match search(&cfg)? {
            SearchOutcome::Found { coloring, .. } => {
                let v = verify_coloring(&coloring, 3, ell, mode)?;
                out.push(check(
                    format!("K6 coloring with {} tree(s) for every triple", ell),
                    v.pass,
                    format!("{} search, {}: {:?}", strategy, mode.name(), coloring),
                ));
                continue;
            }
            other => format!("{} search: {:?}", strategy, other),
        };
        out.push(check(
            format!("K6 coloring with {} tree(s) for every triple", ell),
            false,
            detail,
        ));
    }
    Ok(out)
}
