//! `endodyn`: analyze group endomorphisms as dynamical systems.
//!
//! Exit status: 0 on success, 1 when a checked property fails, 2 on invalid
//! input.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use endodyn::census::{brute_force_census, CensusCounts, CensusReport};
use endodyn::dynamics::{Carrier, Fdg};
use endodyn::realization::{realize, DivisorChain};
use endodyn::spec_file::SystemSpec;
use endodyn::state_graph::{kernel_index_check, CanonicalInvariant, StateSpace};
use endodyn::verify::{self, VerifyConfig, VerifyReport};
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "endodyn",
    version,
    about = "Group endomorphisms as finite dynamical systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Seed for every randomized step.
    #[arg(long, default_value_t = 42, global = true)]
    seed: u64,

    /// Worker threads (defaults to one per core).
    #[arg(long, env = "ENDODYN_JOBS", global = true)]
    jobs: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decomposition, procreation and cycle structure of one system.
    Analyze(SystemArgs),
    /// Count state-space types of the maps x -> a x on Z/n.
    Census(CensusArgs),
    /// Build a system whose identity behaves like a divisor chain.
    Realize(RealizeArgs),
    /// Export the state space in DOT format.
    Graph(GraphArgs),
    /// Run every verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct SystemArgs {
    /// JSON system description.
    #[arg(long, conflicts_with_all = ["n", "a"])]
    input: Option<PathBuf>,
    /// Order of the cyclic group, with --a.
    #[arg(long, requires = "a")]
    n: Option<u64>,
    /// Multiplier of the stretch map x -> a x.
    #[arg(long, requires = "n", allow_negative_numbers = true)]
    a: Option<i64>,
}

#[derive(Args, Debug)]
struct CensusArgs {
    #[arg(long, required_unless_present = "max_n", conflicts_with = "max_n")]
    n: Option<u64>,
    /// Check every n from 1 up to this value (always enumerates).
    #[arg(long)]
    max_n: Option<u64>,
    /// Enumerate all maps and compare with the formula.
    #[arg(long)]
    brute_force: bool,
}

#[derive(Args, Debug)]
struct RealizeArgs {
    /// Comma-separated divisor chain, e.g. 4,2.
    #[arg(long, allow_hyphen_values = true)]
    chain: String,
}

#[derive(Args, Debug)]
struct GraphArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Label vertices with group elements.
    #[arg(long)]
    labels: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Random endomorphisms of larger groups to add to the exhaustive pool.
    #[arg(long, default_value_t = 1000)]
    budget: usize,
}

/// What a command produced.
struct Report {
    text: String,
    json: Value,
    /// A checked property failed.
    violation: bool,
}

/// Errors in the input (exit 2).
struct InputError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(InputError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether a property check failed.
fn run(cli: &Cli) -> Result<bool, InputError> {
    let report = match &cli.command {
        Command::Analyze(args) => analyze(&load_system(args)?),
        Command::Census(args) => census(args)?,
        Command::Realize(args) => return realize_cmd(cli, args),
        Command::Graph(args) => return graph(cli, args),
        Command::Verify(args) => verify_cmd(cli, args),
    };
    let body = match cli.format {
        Format::Text => report.text,
        Format::Json => pretty(&report.json),
    };
    write_output(cli.output.as_deref(), &body)?;
    Ok(report.violation)
}

fn pretty(value: &Value) -> String {
    // serde_json's map keeps keys sorted, which makes the output stable
    let mut s = serde_json::to_string_pretty(value).expect("values serialize");
    s.push('\n');
    s
}

fn write_output(path: Option<&Path>, body: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, body).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn load_system(args: &SystemArgs) -> anyhow::Result<Fdg> {
    let spec = match (&args.input, args.n, args.a) {
        (Some(path), _, _) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            SystemSpec::from_json(&text).with_context(|| format!("in {}", path.display()))?
        }
        (None, Some(n), Some(a)) => SystemSpec::Cyclic { n, a },
        _ => return Err(anyhow!("give either --input or both --n and --a")),
    };
    Ok(spec.build()?)
}

fn describe_group(fdg: &Fdg) -> String {
    match fdg.carrier() {
        Carrier::Abelian(g) => g
            .orders()
            .iter()
            .map(|m| format!("Z/{m}"))
            .collect::<Vec<_>>()
            .join(" x "),
        Carrier::Table(_) => "table group".to_string(),
    }
}

fn cycles_json(inv: &CanonicalInvariant) -> Value {
    json!(inv
        .cycles
        .pairs()
        .iter()
        .map(|&(l, m)| [l, m])
        .collect::<Vec<_>>())
}

fn analyze(fdg: &Fdg) -> Report {
    let fitting = fdg.fitting_check();
    let space = StateSpace::from_fdg(fdg);
    let rigidity = space.rigid_procreation_check();
    let kernel = kernel_index_check(fdg);
    let inv = CanonicalInvariant::of_state_space(&space, fdg.identity());
    let kernel_sizes: Vec<usize> = fdg.kernel_chain().iter().map(|k| k.len()).collect();
    let image_sizes: Vec<usize> = fdg.image_chain().iter().map(|k| k.len()).collect();
    let ok = |b: bool| if b { "ok" } else { "FAILED" };

    let mut text = String::new();
    let _ = writeln!(
        text,
        "group: {} (order {})",
        describe_group(fdg),
        fdg.order()
    );
    let _ = writeln!(text, "kernel chain sizes: {kernel_sizes:?}");
    let _ = writeln!(text, "image chain sizes: {image_sizes:?}");
    let _ = writeln!(text, "nil part: {} elements", fitting.nil_order);
    let _ = writeln!(text, "per part: {} elements", fitting.per_order);
    if let Some(normal) = fitting.nil_normal {
        let _ = writeln!(
            text,
            "nil part normal: {}",
            if normal { "yes" } else { "NO" }
        );
    }
    let _ = writeln!(text, "identity behavior: {}", inv.identity_behavior);
    let _ = writeln!(text, "cycles: {}", inv.cycles);
    let _ = writeln!(text, "decomposition check: {}", ok(fitting.passed()));
    let _ = writeln!(text, "kernel-index check: {}", ok(kernel.passed()));
    let _ = writeln!(text, "rigid procreation: {}", ok(rigidity.is_rigid()));

    let violation = !(fitting.passed() && kernel.passed() && rigidity.is_rigid());
    let json = json!({
        "group": {"description": describe_group(fdg), "order": fdg.order()},
        "kernel_chain_sizes": kernel_sizes,
        "image_chain_sizes": image_sizes,
        "fitting": fitting,
        "identity_behavior": inv.identity_behavior,
        "cycles": cycles_json(&inv),
        "kernel_index": kernel,
        "rigidity": rigidity,
        "passed": !violation,
    });
    Report {
        text,
        json,
        violation,
    }
}

fn counts_line(c: &CensusCounts) -> String {
    format!(
        "total {}, trees {}, cycle unions {}, mixed {}",
        c.total, c.trees, c.cycle_unions, c.mixed
    )
}

fn census_json(r: &CensusReport) -> Value {
    let classes: Vec<Value> = r
        .classes
        .iter()
        .map(|c| {
            json!({
                "rep": c.rep,
                "behavior": c.invariant.identity_behavior,
                "cycles": cycles_json(&c.invariant),
                "size": c.size,
            })
        })
        .collect();
    json!({
        "n": r.n,
        "formula": r.formula,
        "bruteForce": r.brute_force,
        "classes": classes,
        "overlap": r.overlap,
    })
}

fn census(args: &CensusArgs) -> Result<Report, InputError> {
    if let Some(max_n) = args.max_n {
        if max_n == 0 {
            return Err(anyhow!("--max-n must be at least 1").into());
        }
        let reports: Vec<CensusReport> = (1..=max_n)
            .into_par_iter()
            .map(brute_force_census)
            .collect::<Result<_, _>>()?;
        let bad: Vec<&CensusReport> = reports.iter().filter(|r| !r.agrees()).collect();
        let mut text = String::new();
        for r in &bad {
            let _ = writeln!(
                text,
                "n={}: formula {} but enumeration {}",
                r.n,
                counts_line(&r.formula),
                r.brute_force.as_ref().map(counts_line).unwrap_or_default()
            );
        }
        if bad.is_empty() {
            let _ = writeln!(
                text,
                "formula and enumeration agree for all n in 1..={max_n}"
            );
        } else {
            let _ = writeln!(text, "{} of {max_n} values disagree", bad.len());
        }
        let json = json!({
            "max_n": max_n,
            "results": reports.iter().map(|r| json!({
                "n": r.n,
                "formula": r.formula,
                "bruteForce": r.brute_force,
                "agree": r.agrees(),
            })).collect::<Vec<_>>(),
            "all_agree": bad.is_empty(),
        });
        return Ok(Report {
            text,
            json,
            violation: !bad.is_empty(),
        });
    }

    let n = args.n.expect("clap requires --n without --max-n");
    let r = if args.brute_force {
        brute_force_census(n)?
    } else {
        CensusReport::formula_only(n)?
    };
    let mut text = String::new();
    let _ = writeln!(text, "n = {n}");
    let _ = writeln!(text, "formula:     {}", counts_line(&r.formula));
    if let Some(b) = &r.brute_force {
        let verdict = if r.agrees() { "agrees" } else { "DISAGREES" };
        let _ = writeln!(text, "enumeration: {} ({verdict})", counts_line(b));
    }
    if r.overlap {
        let _ = writeln!(text, "note: the only type is both a tree and a cycle union");
    }
    if !r.classes.is_empty() {
        let _ = writeln!(text, "classes:");
        for c in &r.classes {
            let _ = writeln!(
                text,
                "  a = {:<5} size {:<5} {}",
                c.rep, c.size, c.invariant
            );
        }
    }
    Ok(Report {
        text,
        json: census_json(&r),
        violation: !r.agrees(),
    })
}

fn parse_chain(s: &str) -> anyhow::Result<Vec<u64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u64>()
                .with_context(|| format!("invalid chain entry {t:?}"))
        })
        .collect()
}

/// The system description goes to `--output` (or stdout first); the report follows.
fn realize_cmd(cli: &Cli, args: &RealizeArgs) -> Result<bool, InputError> {
    let chain = DivisorChain::new(parse_chain(&args.chain)?)?;
    let fdg = realize(&chain)?;
    let spec = SystemSpec::describe(&fdg).expect("realized systems are abelian");
    let space = StateSpace::from_fdg(&fdg);
    let inv = CanonicalInvariant::of_state_space(&space, fdg.identity());
    let behavior_ok = inv.identity_behavior.as_slice() == chain.as_slice();
    let nilpotent = inv.cycles.pairs() == [(1, 1)];
    let rigid = space.rigid_procreation_check().is_rigid();
    let kernel_ok = kernel_index_check(&fdg).passed();
    let verified = behavior_ok && nilpotent && rigid && kernel_ok;

    let spec_json = serde_json::to_value(&spec).expect("spec serializes");
    if let Some(path) = &cli.output {
        write_output(Some(path), &pretty(&spec_json))?;
    }
    let body = match cli.format {
        Format::Text => {
            let mut text = String::new();
            if cli.output.is_none() {
                let _ = writeln!(text, "{}", spec.to_json());
            }
            let (orders, matrix) = match &spec {
                SystemSpec::Abelian { orders, matrix } => (orders, matrix),
                _ => unreachable!("realized systems are abelian"),
            };
            let _ = writeln!(text, "group: {orders:?}");
            let _ = writeln!(text, "matrix: {matrix:?}");
            let _ = writeln!(text, "identity behavior: {}", inv.identity_behavior);
            let _ = writeln!(text, "cycles: {}", inv.cycles);
            let _ = writeln!(
                text,
                "{}",
                if verified {
                    "verified"
                } else {
                    "VERIFICATION FAILED"
                }
            );
            text
        }
        Format::Json => pretty(&json!({
            "spec": spec_json,
            "identity_behavior": inv.identity_behavior,
            "cycles": cycles_json(&inv),
            "behavior_matches": behavior_ok,
            "single_fixed_point": nilpotent,
            "rigid": rigid,
            "kernel_index_ok": kernel_ok,
            "verified": verified,
        })),
    };
    print!("{body}");
    Ok(!verified)
}

fn graph(cli: &Cli, args: &GraphArgs) -> Result<bool, InputError> {
    let fdg = load_system(&args.system)?;
    let dot = StateSpace::from_fdg(&fdg).to_dot(args.labels);
    write_output(cli.output.as_deref(), &dot)?;
    Ok(false)
}

fn verify_text(report: &VerifyReport) -> String {
    let mut text = String::new();
    let _ = writeln!(text, "seed {}, budget {}", report.seed, report.budget);
    for s in &report.suites {
        let status = if s.passed() { "ok" } else { "FAILED" };
        let _ = writeln!(
            text,
            "{:<24} {:>8} checked, {} violations  {status}",
            s.name, s.checked, s.violation_count
        );
        if let Some(note) = &s.note {
            let _ = writeln!(text, "    note: {note}");
        }
        for v in &s.violations {
            let _ = writeln!(text, "    {}", v.message);
            if let Some(r) = &v.reproducer {
                let _ = writeln!(text, "    reproducer: {}", r.to_json());
            }
        }
    }
    let _ = writeln!(
        text,
        "{}",
        if report.passed() {
            "all suites passed"
        } else {
            "some suites FAILED"
        }
    );
    text
}

fn verify_cmd(cli: &Cli, args: &VerifyArgs) -> Report {
    let report = verify::run_all(VerifyConfig {
        seed: cli.seed,
        budget: args.budget,
    });
    Report {
        text: verify_text(&report),
        json: serde_json::to_value(&report).expect("report serializes"),
        violation: !report.passed(),
    }
}
