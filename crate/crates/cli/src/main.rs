//! `evpi`: exact information-value queries and structural orderings over
//! influence-diagram model files.
//!
//! Exit codes: 0 success, 1 runtime error or failed check, 2 invalid
//! model, 3 parse error, 4 non-canonical query, 5 model too large,
//! 6 unsupported reformulation, 64 usage error.

mod dot;

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

use evpi_core::{
    build_ordering, emit_model, evpi, generate, nevpi_refine, parse_model, run_consistency_check,
    CheckConfig, ConsistencyReport, FormatError, GenConfig, GraphError, InfluenceDiagram, Method,
    ModelError, NodeId, OrderingGraph, SolveError,
};

/// Version of the machine-readable output layout; bumped on any breaking
/// change to `--json` output.
const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Format(FormatError::Parse(_)) => 3,
            CliError::Format(_) => 2,
            CliError::Solve(SolveError::NonCanonicalQuery { .. }) => 4,
            CliError::Solve(SolveError::ModelTooLarge { .. }) => 5,
            CliError::Solve(SolveError::Model(ModelError::UnsupportedReformulation(_)))
            | CliError::Model(ModelError::UnsupportedReformulation(_)) => 6,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "evpi",
    version,
    about = "Exact EVPI/NEVPI and d-separation based information-value orderings for influence diagrams"
)]
struct Cli {
    /// Machine-readable output (JSON objects carrying schema_version).
    #[arg(long, global = true)]
    json: bool,
    /// Print primary results only; suppress report bodies.
    #[arg(long, global = true)]
    quiet: bool,
    /// Rescale chance-table rows to sum to one while loading. Never done
    /// silently.
    #[arg(long, global = true)]
    renormalize: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file; exit 0 if valid, 2 with itemized violations.
    Validate { path: PathBuf },
    /// Test whether node sets X and Y are d-separated given a third set.
    Dsep {
        path: PathBuf,
        /// First node set, comma-separated.
        #[arg(long, value_delimiter = ',', required = true, value_name = "NODES")]
        x: Vec<String>,
        /// Second node set, comma-separated.
        #[arg(long, value_delimiter = ',', required = true, value_name = "NODES")]
        y: Vec<String>,
        /// Conditioning set, comma-separated; may be empty.
        #[arg(long, value_delimiter = ',', value_name = "NODES")]
        given: Vec<String>,
    },
    /// Price perfect information on chance nodes ahead of a decision.
    Evpi {
        path: PathBuf,
        #[arg(long, value_name = "NODE")]
        decision: String,
        /// Chance nodes observed jointly, comma-separated.
        #[arg(long, value_delimiter = ',', required = true, value_name = "NODES")]
        chance: Vec<String>,
        /// Also report the net value: EVPI minus observation costs.
        #[arg(long)]
        cost: bool,
    },
    /// Derive the structural information-value ordering for a decision.
    Order {
        path: PathBuf,
        #[arg(long, value_name = "NODE")]
        decision: String,
        /// Write the ordering as Graphviz DOT to this file.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        /// Refine with the model's observation costs (strict pairs).
        #[arg(long)]
        costs: bool,
    },
    /// Report canonical form for a decision; optionally emit the rewrite.
    Canonical {
        path: PathBuf,
        #[arg(long, value_name = "NODE")]
        decision: String,
        /// Write the reformulated model to this file.
        #[arg(long, value_name = "FILE")]
        emit: Option<PathBuf>,
    },
    /// Generate a random valid model on stdout; deterministic per seed.
    Gen {
        #[arg(long, default_value_t = 4)]
        chance: usize,
        #[arg(long, default_value_t = 1)]
        decisions: usize,
        /// Actions per decision.
        #[arg(long, default_value_t = 2)]
        actions: usize,
        /// States per chance node.
        #[arg(long, default_value_t = 2)]
        states: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Probability of an arc between chance nodes.
        #[arg(long, default_value_t = 0.5)]
        edge_probability: f64,
    },
    /// Cross-check structural orderings against numeric EVPI on random
    /// models; exit 0 only if every claim holds.
    Check {
        #[arg(long, default_value_t = 200)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Chance-node count is drawn from 1..=max-chance per trial.
        #[arg(long, default_value_t = 6)]
        max_chance: usize,
        /// Action count is drawn from 2..=max-actions per trial.
        #[arg(long, default_value_t = 4)]
        max_actions: usize,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            process::exit(code);
        }
    };
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Solve(SolveError::NonCanonicalQuery { decision, .. }) = &e {
                eprintln!(
                    "hint: rewrite the model first: evpi canonical <model> --decision {decision} --emit <reformulated.json>"
                );
            }
            e.exit_code()
        }
    };
    process::exit(code);
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Validate { path } => cmd_validate(cli, path),
        Command::Dsep { path, x, y, given } => cmd_dsep(cli, path, x, y, given),
        Command::Evpi {
            path,
            decision,
            chance,
            cost,
        } => cmd_evpi(cli, path, decision, chance, *cost),
        Command::Order {
            path,
            decision,
            dot,
            costs,
        } => cmd_order(cli, path, decision, dot.as_deref(), *costs),
        Command::Canonical {
            path,
            decision,
            emit,
        } => cmd_canonical(cli, path, decision, emit.as_deref()),
        Command::Gen {
            chance,
            decisions,
            actions,
            states,
            seed,
            edge_probability,
        } => cmd_gen(
            *chance,
            *decisions,
            *actions,
            *states,
            *seed,
            *edge_probability,
        ),
        Command::Check {
            trials,
            seed,
            max_chance,
            max_actions,
        } => cmd_check(cli, *trials, *seed, *max_chance, *max_actions),
    }
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })
}

fn write_file(path: &std::path::Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads and fully validates a model; table-level violations exit 2 just
/// like structural ones.
fn load_model(cli: &Cli, path: &PathBuf) -> Result<InfluenceDiagram, CliError> {
    let m = parse_model(&read_file(path)?, cli.renormalize)?;
    let report = m.validate();
    if let Some(first) = report.violations.first() {
        return Err(CliError::Format(FormatError::Invalid(format!(
            "{} violation(s), first: {first}",
            report.violations.len()
        ))));
    }
    Ok(m)
}

fn node_ids(names: &[String]) -> Vec<NodeId> {
    names.iter().map(|s| NodeId::from(s.as_str())).collect()
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::ClosedForm => "closed_form",
        Method::Bisection => "bisection",
    }
}

fn print_json(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn cmd_validate(cli: &Cli, path: &PathBuf) -> Result<i32, CliError> {
    let text = read_file(path)?;
    let report = match parse_model(&text, cli.renormalize) {
        Ok(m) => m.validate(),
        Err(e @ FormatError::Parse(_)) => return Err(e.into()),
        // Construction-level problems (unknown parents, cycles, kind
        // misuse) are invalid models, reported in the same shape as
        // table-level violations.
        Err(e) => {
            if cli.json {
                print_json(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "valid": false,
                    "violations": [{"kind": "structure", "detail": e.to_string()}],
                }));
            } else if !cli.quiet {
                println!("invalid: {e}");
            }
            return Ok(2);
        }
    };
    if cli.json {
        print_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "valid": report.is_valid(),
            "violations": report.violations,
        }));
    } else if !cli.quiet {
        if report.is_valid() {
            println!("ok");
        } else {
            for v in &report.violations {
                println!("violation[{}]: {v}", v.kind());
            }
        }
    }
    Ok(if report.is_valid() { 0 } else { 2 })
}

fn cmd_dsep(
    cli: &Cli,
    path: &PathBuf,
    x: &[String],
    y: &[String],
    given: &[String],
) -> Result<i32, CliError> {
    let m = load_model(cli, path)?;
    let separated = m
        .dag()
        .d_separated(&node_ids(x), &node_ids(y), &node_ids(given))?;
    if cli.json {
        print_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "d_separated": separated,
        }));
    } else {
        println!(
            "{}",
            if separated {
                "d-separated"
            } else {
                "d-connected"
            }
        );
    }
    Ok(0)
}

fn cmd_evpi(
    cli: &Cli,
    path: &PathBuf,
    decision: &str,
    chance: &[String],
    cost: bool,
) -> Result<i32, CliError> {
    let m = load_model(cli, path)?;
    let a = NodeId::from(decision);
    let xs = node_ids(chance);
    let report = evpi(&m, &a, &xs)?;
    let net = cost.then(|| {
        let mut seen = BTreeSet::new();
        let mut total = 0.0;
        for x in &xs {
            if seen.insert(x.clone()) {
                total += m.cost(x);
            }
        }
        report.value - total
    });
    if cli.json {
        let mut out = serde_json::to_value(&report).expect("serializable");
        let obj = out.as_object_mut().expect("report is an object");
        obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
        obj.insert("evpi".into(), json!(report.value));
        if let Some(n) = net {
            obj.insert("nevpi".into(), json!(n));
        }
        print_json(&out);
    } else if cli.quiet {
        println!("{}", report.value);
        if let Some(n) = net {
            println!("{n}");
        }
    } else {
        println!("decision:   {}", report.decision);
        println!(
            "observed:   {}",
            report
                .observed
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        );
        println!("EVPI:       {}", report.value);
        if let Some(n) = net {
            println!("NEVPI:      {n}");
        }
        println!("method:     {}", method_name(report.method));
        println!("residual:   {:e}", report.residual);
        println!("iterations: {}", report.iterations);
        println!("EU with:    {}", report.eu_with);
        println!("EU without: {}", report.eu_without);
    }
    Ok(0)
}

fn describe_rule(edge: &evpi_core::OrderingEdge) -> String {
    match &edge.rule {
        evpi_core::CandidateRule::Adjacent => "adjacent".to_string(),
        evpi_core::CandidateRule::ViaDecision(d) => format!("via decision '{d}'"),
    }
}

fn print_ordering(g: &OrderingGraph, refinement: Option<&evpi_core::NevpiRefinement>) {
    println!("decision: {}", g.decision);
    println!(
        "nodes:    {}",
        g.nodes
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    );
    if g.zero_set.is_empty() {
        println!("zero set: (empty)");
    } else {
        println!(
            "zero set: {}",
            g.zero_set
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    for r in &g.reformulation {
        println!(
            "rewrite:  '{}' expressed through mapping '{}' and deterministic '{}'",
            r.original, r.mapping_node, r.deterministic_node
        );
    }
    if g.edges.is_empty() {
        println!("edges:    (none)");
    } else {
        println!("edges:");
        for e in &g.edges {
            println!(
                "  {} >= {}  [{}; {}]",
                e.from,
                e.to,
                describe_rule(e),
                e.premise
            );
        }
    }
    if let Some(r) = refinement {
        if r.strict.is_empty() {
            println!("strict after costs: (none)");
        } else {
            println!("strict after costs:");
            for (x, y) in &r.strict {
                println!("  {x} > {y}");
            }
        }
        if !r.equal_cost.is_empty() {
            println!("equal costs (weak relation unchanged):");
            for (x, y) in &r.equal_cost {
                println!("  {x} >= {y}");
            }
        }
    }
}

fn cmd_order(
    cli: &Cli,
    path: &PathBuf,
    decision: &str,
    dot_path: Option<&std::path::Path>,
    costs: bool,
) -> Result<i32, CliError> {
    let m = load_model(cli, path)?;
    let g = build_ordering(&m, &NodeId::from(decision))?;
    let refinement = if costs {
        Some(nevpi_refine(&g, m.costs())?)
    } else {
        None
    };
    if let Some(p) = dot_path {
        write_file(p, &dot::render(&g))?;
    }
    if cli.json {
        print_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "ordering": g,
            "refinement": refinement,
        }));
    } else if !cli.quiet {
        print_ordering(&g, refinement.as_ref());
    }
    Ok(0)
}

fn cmd_canonical(
    cli: &Cli,
    path: &PathBuf,
    decision: &str,
    emit: Option<&std::path::Path>,
) -> Result<i32, CliError> {
    let m = load_model(cli, path)?;
    let (canon, records) = m.canonicalize(&NodeId::from(decision))?;
    let canonical = records.is_empty();
    if let Some(p) = emit {
        write_file(p, &emit_model(&canon))?;
    }
    if cli.json {
        print_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "canonical": canonical,
            "records": records,
        }));
    } else {
        println!("canonical: {canonical}");
        if !cli.quiet {
            for r in &records {
                println!(
                    "rewrote '{}' as mapping '{}' with deterministic '{}'",
                    r.original, r.mapping_node, r.deterministic_node
                );
            }
        }
    }
    Ok(0)
}

fn cmd_gen(
    chance: usize,
    decisions: usize,
    actions: usize,
    states: usize,
    seed: u64,
    edge_probability: f64,
) -> Result<i32, CliError> {
    let m = generate(&GenConfig {
        chance,
        decisions,
        actions,
        states,
        seed,
        edge_probability,
        cost_range: None,
    });
    print!("{}", emit_model(&m));
    Ok(0)
}

fn print_check_report(r: &ConsistencyReport) {
    println!("trials:            {}", r.trials);
    println!("models generated:  {}", r.models_generated);
    println!("edges checked:     {}", r.edges_checked);
    println!("edge violations:   {}", r.violations.len());
    println!("zero-set checked:  {}", r.zero_set_checked);
    println!("zero violations:   {}", r.zero_violations.len());
    for v in &r.violations {
        println!(
            "violation: seed {} edge {} -> {} but EVPI {} < {}",
            v.seed, v.from, v.to, v.evpi_from, v.evpi_to
        );
    }
    for v in &r.zero_violations {
        println!(
            "violation: seed {} node {} claimed worthless but EVPI {}",
            v.seed, v.node, v.evpi
        );
    }
    println!(
        "{}",
        if r.is_clean() {
            "ok"
        } else {
            "violations found"
        }
    );
}

fn cmd_check(
    cli: &Cli,
    trials: u32,
    seed: u64,
    max_chance: usize,
    max_actions: usize,
) -> Result<i32, CliError> {
    let report = run_consistency_check(
        &CheckConfig {
            trials,
            seed,
            max_chance,
            max_actions,
        },
        None,
    )?;
    if cli.json {
        let mut out = serde_json::to_value(&report).expect("serializable");
        let obj = out.as_object_mut().expect("report is an object");
        obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
        obj.insert("clean".into(), json!(report.is_clean()));
        print_json(&out);
    } else if !cli.quiet {
        print_check_report(&report);
    }
    Ok(if report.is_clean() { 0 } else { 1 })
}
