mod problem;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Parser, Subcommand};
use critlimit::critsys::build_family;
use critlimit::limitlab::{ed_degree, generic_crit_count, limit_crit, point_pairs, verify_run, GenericCount};
use critlimit::tracker::{solve_generic, PathStatus};
use critlimit::Error;

use problem::{Overrides, Problem, ProblemFile};
use report::{
    LimitResult, Outcome, PathRecord, RejectionRecord, RunReport, SolutionRecord, SolveResult, VerifyResult,
};

const EXIT_UNVERIFIED: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_INPUT: u8 = 4;

/// Limits of critical points of linear pencils on affine varieties.
#[derive(Parser)]
#[command(name = "critlimit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report tolerance for multiset comparison and stratum membership.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Overrides the seed in the problem file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Radius where the endgames take over.
    #[arg(long, global = true)]
    endgame_radius: Option<f64>,
    /// Affine norm beyond which a path is counted at infinity.
    #[arg(long, global = true)]
    divergence_bound: Option<f64>,
    /// Size of the path-tracking pool (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    json_out: Option<PathBuf>,
    /// Two-group start system for Lagrange systems.
    #[arg(long, global = true)]
    multihom: bool,
    /// Record wall time in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Critical points of f - t*g at the file's `t` or a random one.
    Solve { file: PathBuf },
    /// Limit of the critical points as t -> 0, and the count at infinity.
    Limit { file: PathBuf },
    /// The limit compared with the strata.
    Verify { file: PathBuf },
    /// Distance degree, or the nearest-point limit when the file has data.
    Ed { file: PathBuf },
}

impl Command {
    fn file(&self) -> &PathBuf {
        match self {
            Command::Solve { file } | Command::Limit { file } | Command::Verify { file } | Command::Ed { file } => file,
        }
    }
}

fn euler_check(p: &Problem) -> Result<Option<GenericCount>> {
    match p.euler {
        Some(e) => Ok(Some(generic_crit_count(&p.variety, p.objective()?, Some(e), &p.config)?)),
        None => Ok(None),
    }
}

fn solve(p: &Problem) -> Result<(Outcome, Vec<PathRecord>, bool)> {
    let fam = build_family(&p.variety, p.objective()?)?;
    let t = p.t.unwrap_or_else(|| p.config.t0());
    let r = solve_generic(&fam, t, &p.config.solve)?;
    let paths = r.outcomes.iter().map(|o| PathRecord::new(o, |z| z.to_vec())).collect();
    let fiber = fam.chart.fiber() as usize;
    let out = SolveResult {
        t: [t.re, t.im],
        path_count: r.path_count,
        finite: r.count(PathStatus::Finite),
        at_infinity: r.count(PathStatus::AtInfinity),
        failed: r.count(PathStatus::TrackFailure),
        inconsistent: r.inconsistent,
        solution_count: r.solutions.len() / fiber,
        solutions: r
            .solutions
            .iter()
            .map(|s| SolutionRecord {
                ambient: point_pairs(&s.ambient),
                coordinates: point_pairs(&s.point),
                residual: s.residual,
                condition: s.condition,
            })
            .collect(),
        rejected: r
            .rejected
            .iter()
            .map(|j| RejectionRecord {
                path: j.path_id,
                reason: j.reason,
            })
            .collect(),
    };
    Ok((Outcome::Solve(out), paths, true))
}

fn limit(p: &Problem, with_strata: bool) -> Result<(Outcome, Vec<PathRecord>, bool)> {
    let run = limit_crit(&p.variety, p.objective()?, &p.config)?;
    let paths = run
        .paths
        .iter()
        .map(|o| PathRecord::new(o, |z| run.chart.ambient_point(z)))
        .collect();
    let euler = euler_check(p)?;
    let euler_ok = euler.as_ref().is_none_or(|e| e.agrees == Some(true));
    if with_strata {
        let report = verify_run(&run, &p.variety, p.objective()?, &p.strata, &p.config)?;
        let ok = report.theorem_verified && euler_ok;
        return Ok((Outcome::Verify(VerifyResult { report, euler_check: euler }), paths, ok));
    }
    let out = LimitResult {
        t0: [run.t0.re, run.t0.im],
        conserved: run.is_conserved(),
        lhs_limit: run.limit.clone(),
        generic_count: run.generic_count,
        infinity_count: run.infinity_count,
        failure_count: run.failure_count,
        ambiguous: run.ambiguous,
        euler_check: euler,
    };
    Ok((Outcome::Limit(out), paths, euler_ok))
}

fn run(cli: &Cli) -> Result<u8> {
    let over = Overrides {
        seed: cli.seed,
        tol: cli.tol,
        endgame_radius: cli.endgame_radius,
        divergence_bound: cli.divergence_bound,
        threads: cli.threads,
        multihom: cli.multihom,
    };
    let file = ProblemFile::read(cli.command.file())?;
    let p = file.resolve(&over)?;
    let start = Instant::now();
    let (name, (result, paths, ok)) = match &cli.command {
        Command::Solve { .. } => ("solve", solve(&p)?),
        Command::Limit { .. } => ("limit", limit(&p, false)?),
        Command::Verify { .. } => ("verify", limit(&p, true)?),
        Command::Ed { .. } if p.data.is_some() => ("ed", limit(&p, true)?),
        Command::Ed { .. } => ("ed", (Outcome::EdDegree(ed_degree(&p.variety, &p.config)?), Vec::new(), true)),
    };
    let report = RunReport {
        command: name,
        problem: p.name.clone(),
        description: p.description.clone(),
        config: p.config.clone(),
        result,
        paths,
        wall_time_seconds: cli.timing.then(|| start.elapsed().as_secs_f64()),
    };
    let json = report::to_json(&report)?;
    match &cli.json_out {
        Some(path) => std::fs::write(path, json)?,
        None => print!("{json}"),
    }
    Ok(if ok { 0 } else { EXIT_UNVERIFIED })
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(
            Error::PathFailureBudget { .. }
            | Error::Genericity(_)
            | Error::SingularJacobian { .. }
            | Error::NotIsolated { .. }
            | Error::UnsolvableStratum { .. },
        ) => EXIT_NUMERICAL,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
