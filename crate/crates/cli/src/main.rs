//! `qot`: run the OT and bit-commitment protocols, the explicit attacks and
//! the bound verifiers, and write machine-readable reports.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qot_core::adversaries::{
    alice_attack, alice_family_on_grid, bob_attack, bob_family_on_grid, AttackParams, ATTACK_GRID,
};
use qot_core::analysis::{
    alice_witness_bound, binding_family_on_grid, estimate_lambda, lifted_alice_attack,
    monte_carlo_check, monte_carlo_qbc_check, qbc_stats, uniform_inputs, uniform_selection,
    verify_lemma1, verify_lemma2, verify_sealing, with_honest_alice, with_honest_bob, McCheck,
    SweepReport, SweepRow, BOB_WITNESS_CONSTANT, LEMMA1_CONSTANT, LEMMA2_CONSTANT,
};
use qot_core::branching::SampledChooser;
use qot_core::ot::{honest_alice, honest_bob, run_ot, AliceParty, BobParty, OtConfig};
use qot_core::qbc::{run_qbc, QbcAlice, QbcBob};
use qot_core::{Bit, Error};

use report::{Destination, Envelope, Format};

const EXIT_VIOLATIONS: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const TARGET_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(
    name = "qot",
    version,
    about = "Quantum oblivious transfer and bit commitment simulator"
)]
struct Cli {
    /// Directory for report files. Defaults to $QOT_OUTPUT_DIR, then the current directory.
    #[arg(long, global = true, env = "QOT_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,

    /// Exact report path; overrides --output-dir.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Oblivious transfer.
    Ot {
        #[command(subcommand)]
        command: OtCommand,
    },
    /// Explicit attack at one epsilon: exact statistics plus sampled frequencies.
    Attack(AttackArgs),
    /// Check a bound over a seeded family of strategies.
    Verify(VerifyArgs),
    /// Bit commitment.
    Qbc {
        #[command(subcommand)]
        command: QbcCommand,
    },
}

#[derive(Subcommand, Debug)]
enum OtCommand {
    /// One honest OT run.
    Run(OtRunArgs),
}

#[derive(Subcommand, Debug)]
enum QbcCommand {
    /// Commit to b and open it, optionally against one adversary.
    Run(QbcRunArgs),
}

#[derive(Args, Debug, Serialize)]
struct OtRunArgs {
    #[arg(long, value_parser = parse_bit)]
    a0: Bit,
    #[arg(long, value_parser = parse_bit)]
    a1: Bit,
    #[arg(long, value_parser = parse_bit)]
    i: Bit,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum AttackRole {
    Alice,
    Bob,
}

#[derive(Args, Debug, Serialize)]
struct AttackArgs {
    #[arg(long, value_enum)]
    role: AttackRole,
    #[arg(long, value_parser = parse_epsilon)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum VerifyTarget {
    Lemma1,
    Lemma2,
    Sealing,
    Lambda,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(value_enum)]
    target: VerifyTarget,
    /// Number of sampled strategies on top of the explicit attacks.
    #[arg(long, default_value_t = 200)]
    family_size: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Comma-separated attack strengths in (0,1).
    #[arg(long, value_delimiter = ',', value_parser = parse_epsilon, default_values_t = ATTACK_GRID.to_vec())]
    epsilon_grid: Vec<f64>,
}

#[derive(Args, Debug, Serialize)]
struct QbcRunArgs {
    #[arg(long, value_parser = parse_bit)]
    b: Bit,
    /// Bob deposits honestly and then opens the complement of b.
    #[arg(long, conflicts_with = "alice_attack")]
    bob_flip_open: bool,
    /// Alice runs the explicit attack with this epsilon inside OT 0.
    #[arg(long, value_parser = parse_epsilon)]
    alice_attack: Option<f64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_bit(s: &str) -> Result<Bit, String> {
    s.parse::<Bit>().map_err(|e| e.to_string())
}

fn parse_epsilon(s: &str) -> Result<f64, String> {
    let eps: f64 = s.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    AttackParams::new(eps).map_err(|e| e.to_string())?;
    Ok(eps)
}

/// Failure of a command, mapped onto the exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            Error::Io(_) => Failure::Io(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

type CmdResult = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let dest = Destination::new(cli.output.clone(), cli.output_dir.clone(), cli.format);
    let result = match &cli.command {
        Command::Ot {
            command: OtCommand::Run(args),
        } => cmd_ot_run(args, &dest),
        Command::Attack(args) => cmd_attack(args, &dest),
        Command::Verify(args) => cmd_verify(args, &dest),
        Command::Qbc {
            command: QbcCommand::Run(args),
        } => cmd_qbc_run(args, &dest),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VIOLATIONS),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VIOLATIONS)
        }
    }
}

fn cmd_ot_run(args: &OtRunArgs, dest: &Destination) -> CmdResult {
    let mut alice = honest_alice(args.a0, args.a1);
    let mut bob = honest_bob(args.i);
    let mut chooser = SampledChooser::new(args.seed);
    let transcript = run_ot(&mut alice, &mut bob, &mut chooser, &OtConfig::default())?;
    let file = format!(
        "ot-run-a0_{}-a1_{}-i_{}-seed{}",
        args.a0, args.a1, args.i, args.seed
    );
    let envelope = Envelope::new("ot run", args, dest).with_extra("transcript", &transcript)?;
    let path = dest.write_json_only(&file, &envelope)?;
    println!("m = {}", transcript.m);
    println!("bob_output = {}", transcript.bob_output);
    println!("transcript: {}", path.display());
    Ok(true)
}

fn mc_columns(mut row: SweepRow, checks: &[McCheck]) -> SweepRow {
    for c in checks {
        row = row
            .with(&format!("mc_{}", c.event), c.frequency)
            .with(&format!("mc_{}_sigma", c.event), c.sigma)
            .with(
                &format!("mc_{}_reseeded", c.event),
                f64::from(u8::from(c.reseeded)),
            );
        if !c.within {
            let msg = format!(
                "{} frequency {:.6} is more than 4 sigma from {:.6}",
                c.event, c.frequency, c.exact
            );
            flag(&mut row, msg);
        }
    }
    row
}

fn flag(row: &mut SweepRow, msg: String) {
    row.violation = Some(match row.violation.take() {
        Some(prev) => format!("{prev}; {msg}"),
        None => msg,
    });
}

/// Marks the row when the attack misses its error bound or witness target.
fn attack_targets(mut row: SweepRow, error: f64, advantage: f64, witness: f64) -> SweepRow {
    let eps = row.epsilon.unwrap_or(f64::NAN);
    if error > 2.0 * eps + TARGET_TOL {
        flag(&mut row, format!("error {error:.6} exceeds 2*epsilon {:.6}", 2.0 * eps));
    }
    if advantage < witness - TARGET_TOL {
        flag(&mut row, format!("advantage {advantage:.6} is below the witness bound {witness:.6}"));
    }
    row
}

fn cmd_attack(args: &AttackArgs, dest: &Destination) -> CmdResult {
    let eps = args.epsilon;
    let params = AttackParams::new(eps)?;
    let row = match args.role {
        AttackRole::Alice => {
            let alice = AliceParty::Malicious(Arc::new(alice_attack(params)?));
            let dist = uniform_selection(Bit::ZERO, Bit::ZERO);
            let (s, checks) =
                monte_carlo_check(&alice, &BobParty::Honest, &dist, args.trials, args.seed)?;
            let witness = alice_witness_bound(eps);
            let row = SweepRow::new("alice_attack", "a0=0,a1=0", Some(eps))
                .with("bob_error", s.bob_error_prob)
                .with("error_bound", 2.0 * eps)
                .with("alice_advantage", s.alice_advantage)
                .with("witness_bound", witness)
                .with("witness_margin", s.alice_advantage - witness)
                .with("lemma_bound", LEMMA1_CONSTANT * s.bob_error_prob.sqrt());
            let row = attack_targets(row, s.bob_error_prob, s.alice_advantage, witness);
            mc_columns(row, &checks)
        }
        AttackRole::Bob => {
            let bob = BobParty::Malicious(Arc::new(bob_attack(params)?));
            let (s, checks) = monte_carlo_check(
                &AliceParty::Honest,
                &bob,
                &uniform_inputs(),
                args.trials,
                args.seed,
            )?;
            let [p0, p1] = s.bob_pair_stats;
            let witness = BOB_WITNESS_CONSTANT * eps.sqrt();
            let row = SweepRow::new("bob_attack", "uniform inputs", Some(eps))
                .with("a0_correct", p0)
                .with("a0_error", 1.0 - p0)
                .with("error_bound", 2.0 * eps)
                .with("a1_correct", p1)
                .with("a1_advantage", p1 - 0.5)
                .with("witness_bound", witness)
                .with("witness_margin", p1 - 0.5 - witness)
                .with("lemma_bound", 0.5 + LEMMA2_CONSTANT * (1.0 - p0).sqrt())
                .with("bob_error", s.bob_error_prob);
            let row = attack_targets(row, 1.0 - p0, p1 - 0.5, witness);
            mc_columns(row, &checks)
        }
    };
    let mut report = SweepReport::new("attack")
        .meta("trials", args.trials)
        .meta("seed", args.seed);
    report.push(row);
    let file = format!(
        "attack-{}-eps{}-seed{}",
        role_name(args.role),
        eps,
        args.seed
    );
    let path = dest.write_report(&file, Envelope::new("attack", args, dest), &report)?;
    let row = &report.rows[0];
    for (k, v) in &row.values {
        println!("{k} = {v}");
    }
    for v in &report.violations {
        println!("violation: {v}");
    }
    println!("report: {}", path.display());
    Ok(report.is_clean())
}

fn role_name(role: AttackRole) -> &'static str {
    match role {
        AttackRole::Alice => "alice",
        AttackRole::Bob => "bob",
    }
}

fn cmd_verify(args: &VerifyArgs, dest: &Destination) -> CmdResult {
    if args.epsilon_grid.is_empty() {
        return Err(Failure::Usage("--epsilon-grid must not be empty".into()));
    }
    let grid = &args.epsilon_grid;
    let (name, report) = match args.target {
        VerifyTarget::Lemma1 => (
            "lemma1",
            verify_lemma1(&with_honest_alice(alice_family_on_grid(
                grid,
                args.seed,
                args.family_size,
            )?)?)?,
        ),
        VerifyTarget::Lemma2 => (
            "lemma2",
            verify_lemma2(&with_honest_bob(bob_family_on_grid(
                grid,
                args.seed,
                args.family_size,
            )?)?)?,
        ),
        VerifyTarget::Sealing => ("sealing", verify_sealing(grid)?),
        VerifyTarget::Lambda => {
            let est = estimate_lambda(&binding_family_on_grid(grid, args.seed, args.family_size)?)?;
            match est.lambda_est {
                Some(l) => println!(
                    "lambda_est = {l} (empirical estimate over {} candidates, argmin {})",
                    est.frontier.len(),
                    est.argmin.as_deref().unwrap_or("-")
                ),
                None => println!("lambda_est = none (no binding-relevant candidate)"),
            }
            ("lambda", est.to_report())
        }
    };
    let file = format!("verify-{name}-seed{}", args.seed);
    let path = dest.write_report(
        &file,
        Envelope::new(&format!("verify {name}"), args, dest),
        &report,
    )?;
    for (k, v) in &report.summary {
        println!("{k} = {v}");
    }
    for v in &report.violations {
        println!("violation: {v}");
    }
    println!("report: {}", path.display());
    Ok(report.is_clean())
}

fn cmd_qbc_run(args: &QbcRunArgs, dest: &Destination) -> CmdResult {
    let alice = match args.alice_attack {
        Some(eps) => lifted_alice_attack(eps)?,
        None => QbcAlice::Honest,
    };
    let bob = if args.bob_flip_open {
        QbcBob::FlipOpen
    } else {
        QbcBob::Honest
    };
    let first = run_qbc(args.b, &alice, &bob, &mut SampledChooser::new(args.seed))?;
    println!("opened = {}", first.revealed_b);
    println!("sealing_test = {:?}", first.sealing_test);
    println!("binding_test = {:?}", first.binding_test);
    println!(
        "alice_verdict = {}",
        serde_json::to_string(&first.alice_verdict).unwrap_or_default()
    );
    println!(
        "bob_verdict = {}",
        serde_json::to_string(&first.bob_verdict).unwrap_or_default()
    );

    let exact = qbc_stats(&alice, &bob, args.b)?;
    let mut row = SweepRow::new(
        adversary_name(args),
        format!("b={}", args.b),
        args.alice_attack,
    )
    .with("p0", exact.p0)
    .with("p1", exact.p1)
    .with("p_err", exact.p_err)
    .with("q0", exact.q0)
    .with("q1", exact.q1)
    .with("q_err", exact.q_err)
    .with("bob_detection", exact.bob_detection_prob)
    .with("alice_guess_advantage", exact.alice_guess_advantage);
    if args.trials > 1 {
        let checks = monte_carlo_qbc_check(args.b, &alice, &bob, args.trials, args.seed)?;
        for c in &checks {
            println!(
                "{}: frequency {} (exact {}, sigma {})",
                c.event, c.frequency, c.exact, c.sigma
            );
        }
        row = mc_columns(row, &checks);
    }
    let mut report = SweepReport::new("qbc")
        .meta("trials", args.trials)
        .meta("seed", args.seed);
    report.push(row);
    let file = format!(
        "qbc-run-b{}-{}-seed{}",
        args.b,
        adversary_name(args),
        args.seed
    );
    let envelope = Envelope::new("qbc run", args, dest).with_extra("first_transcript", &first)?;
    let path = dest.write_report(&file, envelope, &report)?;
    println!("report: {}", path.display());
    Ok(report.is_clean())
}

fn adversary_name(args: &QbcRunArgs) -> String {
    match (args.bob_flip_open, args.alice_attack) {
        (true, _) => "bob-flip-open".into(),
        (false, Some(eps)) => format!("alice-attack-eps{eps}"),
        (false, None) => "honest".into(),
    }
}
