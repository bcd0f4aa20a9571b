mod args;
mod commands;
mod manifest;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Parser;

use args::{Cli, Command};
use commands::Output;
use manifest::{digest, RunManifest, MANIFEST_VERSION};

const EXIT_ERROR: i32 = 2;

fn subcommand_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Bounds(_) => "bounds",
        Command::Verify(_) => "verify",
        Command::Search(_) => "search",
        Command::Oracle(_) => "oracle",
        Command::Mc(args::McCommand::Bs(_)) => "mc bs",
        Command::Mc(args::McCommand::As(_)) => "mc as",
        Command::Mc(args::McCommand::Sweep(_)) => "mc sweep",
        Command::Repro(_) => "repro",
        Command::Replay(_) => "replay",
    }
}

fn replay(path: &std::path::Path) -> Result<Output> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let recorded: RunManifest = serde_json::from_str(&text).context("not a run manifest")?;
    let argv = std::iter::once("rainbow".to_string()).chain(recorded.argv.iter().cloned());
    let cli = Cli::try_parse_from(argv).context("manifest arguments no longer parse")?;
    if matches!(cli.command, Command::Replay(_)) {
        bail!("refusing to replay a replay");
    }
    let out = commands::run(&cli.command)?;
    let got = digest(out.stdout.as_bytes());
    let same = got == recorded.output_sha256 && out.code == recorded.exit_code;
    let stderr = if same {
        format!("replay identical: sha256 {}\n", got)
    } else {
        format!(
            "replay differs: sha256 {} (exit {}) vs recorded {} (exit {})\n",
            got, out.code, recorded.output_sha256, recorded.exit_code
        )
    };
    Ok(Output {
        stdout: out.stdout,
        stderr,
        code: if same { 0 } else { 1 },
        seed: out.seed,
    })
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot set up {} threads: {}", n, e);
            return ExitCode::from(EXIT_ERROR as u8);
        }
    }

    let start = Instant::now();
    let result = match &cli.command {
        Command::Replay(a) => replay(&a.manifest_file),
        cmd => commands::run(cmd),
    };
    let out = result.unwrap_or_else(|e| Output {
        stderr: format!("error: {:#}\n", e),
        code: EXIT_ERROR,
        ..Default::default()
    });

    {
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(out.stdout.as_bytes());
        let _ = stdout.flush();
    }
    eprint!("{}", out.stderr);

    let record = RunManifest {
        manifest_version: MANIFEST_VERSION,
        subcommand: subcommand_name(&cli.command).to_string(),
        argv,
        params: serde_json::to_value(&cli.command).unwrap_or(serde_json::Value::Null),
        seed: out.seed,
        rng: rainbow_core::colorings::RNG_NAME.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_secs: start.elapsed().as_secs_f64(),
        exit_code: out.code,
        output_sha256: digest(out.stdout.as_bytes()),
    };
    match &cli.manifest {
        Some(path) => {
            let text = serde_json::to_string_pretty(&record).expect("manifest serializes");
            if let Err(e) = std::fs::write(path, text + "\n") {
                eprintln!("error: cannot write manifest {}: {}", path.display(), e);
                return ExitCode::from(EXIT_ERROR as u8);
            }
        }
        None => eprintln!(
            "manifest: {}",
            serde_json::to_string(&record).expect("manifest serializes")
        ),
    }
    ExitCode::from(out.code as u8)
}
