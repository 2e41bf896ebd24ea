use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use triax::canonical::{cyclic_decomposition, shift_block_form};
use triax::centralizer::{
    centralizer_basis, closure_poly_membership, double_centralizer_basis, laurent_centralizer_probe,
    open_question_probe, poly_algebra_basis,
};
use triax::exactfield::{split_linear, FieldSpec};
use triax::linspace::{Domain, SparseVec};
use triax::operators::Operator;
use triax::oracle::{all_matrices, brute_force_triangularizable, seeded_matrix_stream};
use triax::simtri::{simultaneous_triangularize, OperatorFamily, SimultaneousVerdict};
use triax::triangulate::{
    closure_test, invertibility_report, is_topologically_nilpotent, saturate_vectors, triangularize,
    verify_triangular, ClosureVerdict, NilpotenceVerdict, Saturation, TriangularizabilityVerdict, DEFAULT_FUEL,
};

use crate::fixtures::{fixture, fixtures};
use crate::format::{matrix_json, parse_operator_file, serialize_operator, sparse_json};
use crate::report::{self, SCHEMA};
use crate::CliError;

/// Exact triangularization of linear operators over Q and F_p.
#[derive(Debug, Parser)]
#[command(name = "triax", version)]
pub struct Cli {
    /// Saturation budget in stages (overrides TRIAX_FUEL).
    #[arg(long, global = true)]
    pub fuel: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Print a one-line summary to stdout (the report still goes to --output).
    #[arg(long, global = true)]
    pub summary: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct OperatorArgs {
    /// Operator file (JSON).
    pub operator: Option<PathBuf>,
    /// Use a built-in fixture instead of a file.
    #[arg(long, conflicts_with = "operator")]
    pub fixture: Option<String>,
    /// Seed or probe vector such as "{0: 1, 2: -1/2}"; repeatable.
    #[arg(long = "seed")]
    pub seeds: Vec<String>,
    /// Seed with the basis vectors at positions 0..N.
    #[arg(long, conflicts_with = "seeds")]
    pub prefix: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Triangularization, nilpotence, closure and invertibility in one report.
    Analyze(OperatorArgs),
    /// Decide triangularizability on the hull of the seeds.
    Triangularize(OperatorArgs),
    /// Simultaneous triangularization of a commuting family.
    Simtri {
        /// Operator files, one per member.
        operators: Vec<PathBuf>,
        /// Fixture members, appended after the files.
        #[arg(long = "fixture")]
        fixtures: Vec<String>,
        #[arg(long = "seed")]
        seeds: Vec<String>,
        #[arg(long, conflicts_with = "seeds")]
        prefix: Option<usize>,
    },
    /// Shift-block (Jordan) form and cyclic decomposition of the seed hull.
    Canonical(OperatorArgs),
    /// Centralizer computations.
    Centralizer {
        #[command(flatten)]
        op: OperatorArgs,
        /// Compare C(C(M)) with k[M].
        #[arg(long)]
        double: bool,
        /// Test whether the operator in this file lies in the closure of k[T].
        #[arg(long, value_name = "OPERATOR_FILE", conflicts_with = "double")]
        poly_membership: Option<PathBuf>,
        /// Check that the operator is a Laurent polynomial in the bilateral shift.
        #[arg(long, value_name = "R", conflicts_with_all = ["double", "poly_membership"])]
        laurent_radius: Option<usize>,
        /// Evidence for whether C(C(T)) equals the closure of k[T]; no verdict.
        #[arg(long, conflicts_with_all = ["double", "poly_membership", "laurent_radius"])]
        probe_open_question: bool,
    },
    /// Topological nilpotence on the probes.
    Nilpotence(OperatorArgs),
    /// Membership of the operator in the closure of the triangularizable operators.
    Closure(OperatorArgs),
    /// Brute-force cross-checks.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// List the built-in fixtures, or print one as an operator file.
    Fixtures {
        name: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Compare the triangularize verdict, the minimal-polynomial split verdict
    /// and brute-force flag search on every n x n matrix over F_p.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u64,
        /// Check this many seeded random matrices instead of all of them.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A finished run: the report, the exit code and the summary line.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
    pub summary: String,
}

pub const EXIT_DEFINITIVE: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

/// `--fuel`, then `TRIAX_FUEL`, then the default.
pub fn resolve_fuel(flag: Option<usize>) -> Result<usize, CliError> {
    let fuel = match flag {
        Some(f) => f,
        None => match std::env::var("TRIAX_FUEL") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("TRIAX_FUEL must be a positive integer, got `{v}`")))?,
            Err(_) => DEFAULT_FUEL,
        },
    };
    if fuel == 0 {
        return Err(CliError::Usage("fuel must be at least 1".into()));
    }
    Ok(fuel)
}

struct Loaded {
    source: String,
    operator: Operator,
    seeds: Vec<SparseVec>,
}

fn parse_seeds(field: FieldSpec, domain: Domain, seeds: &[String], prefix: Option<usize>) -> Result<Option<Vec<SparseVec>>, CliError> {
    if let Some(n) = prefix {
        if n == 0 {
            return Err(CliError::Usage("--prefix must be at least 1".into()));
        }
        return (0..n as i64)
            .map(|i| SparseVec::basis(field, domain, i).map_err(CliError::Core))
            .collect::<Result<Vec<_>, _>>()
            .map(Some);
    }
    if seeds.is_empty() {
        return Ok(None);
    }
    seeds
        .iter()
        .map(|s| SparseVec::parse(field, domain, s).map_err(|e| CliError::Usage(format!("bad seed `{s}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn default_seeds(op: &Operator) -> Vec<SparseVec> {
    let n = op.finite_dim().unwrap_or(1);
    (0..n as i64)
        .map(|i| SparseVec::basis(op.field(), op.domain(), i).expect("position in domain"))
        .collect()
}

fn load(args: &OperatorArgs) -> Result<Loaded, CliError> {
    let (source, operator, fixture_seeds) = match (&args.operator, &args.fixture) {
        (Some(path), None) => (path.display().to_string(), parse_operator_file(path)?, None),
        (None, Some(name)) => {
            let f = fixture(name)?;
            (format!("fixture:{name}"), f.operator, Some(f.seeds))
        }
        _ => return Err(CliError::Usage("give an operator file or --fixture NAME".into())),
    };
    let seeds = match parse_seeds(operator.field(), operator.domain(), &args.seeds, args.prefix)? {
        Some(s) => s,
        None => fixture_seeds.unwrap_or_else(|| default_seeds(&operator)),
    };
    Ok(Loaded {
        source,
        operator,
        seeds,
    })
}

fn exit_for(definitive: bool) -> i32 {
    if definitive {
        EXIT_DEFINITIVE
    } else {
        EXIT_INCONCLUSIVE
    }
}

fn header(command: &str, fuel: usize) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), json!({"name": command, "fuel": fuel}));
    m
}

fn operator_echo(l: &Loaded) -> Value {
    json!({
        "source": l.source,
        "description": l.operator.describe(),
        "field": l.operator.field().to_string(),
        "domain": l.operator.domain().to_string(),
        "locally_escaping": l.operator.locally_escaping(),
        "seeds": l.seeds.iter().map(sparse_json).collect::<Vec<_>>(),
    })
}

fn verdict_of(v: &Value) -> String {
    v.get("verdict").and_then(Value::as_str).unwrap_or("none").to_string()
}

/// Runs one command. Input problems come back as `Err`; everything else,
/// including negative and inconclusive verdicts, is an `Outcome`.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let fuel = resolve_fuel(cli.fuel)?;
    let started = Instant::now();
    let (name, mut report, body, exit_code) = match &cli.command {
        Command::Analyze(args) => {
            let l = load(args)?;
            let mut r = header("analyze", fuel);
            r.insert("operator".into(), operator_echo(&l));
            let (body, exit) = analyze(&l, fuel)?;
            ("analyze", r, body, exit)
        }
        Command::Triangularize(args) => {
            let l = load(args)?;
            let mut r = header("triangularize", fuel);
            r.insert("operator".into(), operator_echo(&l));
            let v = triangularize(&l.operator, &l.seeds, fuel)?;
            ("triangularize", r, report::triangularize_json(&v), exit_for(v.is_definitive()))
        }
        Command::Simtri {
            operators,
            fixtures: names,
            seeds,
            prefix,
        } => {
            let mut members = Vec::new();
            let mut sources = Vec::new();
            for p in operators {
                members.push(parse_operator_file(p)?);
                sources.push(p.display().to_string());
            }
            let mut fixture_seeds = None;
            for n in names {
                let f = fixture(n)?;
                fixture_seeds.get_or_insert(f.seeds);
                members.push(f.operator);
                sources.push(format!("fixture:{n}"));
            }
            if members.is_empty() {
                return Err(CliError::Usage("simtri needs at least one operator".into()));
            }
            let family = OperatorFamily::new(members).map_err(CliError::Core)?;
            let seeds = match parse_seeds(family.field(), family.domain(), seeds, *prefix)? {
                Some(s) => s,
                None => fixture_seeds.unwrap_or_else(|| default_seeds(&family.members()[0])),
            };
            let mut r = header("simtri", fuel);
            r.insert(
                "operators".into(),
                json!({"sources": sources, "seeds": seeds.iter().map(sparse_json).collect::<Vec<_>>()}),
            );
            let (body, exit) = match simultaneous_triangularize(&family, &seeds, fuel) {
                Ok(v) => {
                    let definitive = !matches!(v, SimultaneousVerdict::Inconclusive(_));
                    (report::simtri_json(&v), exit_for(definitive))
                }
                Err(triax::Error::NonCommuting(w)) => (
                    json!({"verdict": "non_commuting", "witness": report::commutation_json(&w)}),
                    EXIT_DEFINITIVE,
                ),
                Err(e) => return Err(CliError::Core(e)),
            };
            ("simtri", r, body, exit)
        }
        Command::Canonical(args) => {
            let l = load(args)?;
            let mut r = header("canonical", fuel);
            r.insert("operator".into(), operator_echo(&l));
            let (body, exit) = canonical(&l, fuel)?;
            ("canonical", r, body, exit)
        }
        Command::Centralizer {
            op,
            double,
            poly_membership,
            laurent_radius,
            probe_open_question,
        } => {
            let l = load(op)?;
            let mut r = header("centralizer", fuel);
            r.insert("operator".into(), operator_echo(&l));
            let body = if let Some(radius) = laurent_radius {
                report::laurent_json(&laurent_centralizer_probe(&l.operator, *radius)?)
            } else if let Some(path) = poly_membership {
                let s = parse_operator_file(path)?;
                let mut b = report::membership_json(&closure_poly_membership(&l.operator, &s, &l.seeds)?);
                b["candidate"] = json!(path.display().to_string());
                b
            } else if *probe_open_question {
                report::open_question_json(&open_question_probe(&l.operator, &l.seeds, fuel)?)
            } else {
                let m = l.operator.to_matrix()?;
                let c = centralizer_basis(&m)?;
                let mut b = json!({
                    "verdict": "computed",
                    "centralizer_dim": c.dim(),
                    "centralizer_basis": c.elements().iter().map(matrix_json).collect::<Vec<_>>(),
                });
                if *double {
                    let dc = double_centralizer_basis(&m)?;
                    let pa = poly_algebra_basis(&m)?;
                    b["double_centralizer_dim"] = json!(dc.dim());
                    b["poly_algebra_dim"] = json!(pa.dim());
                    b["minimal_polynomial"] = report::poly_json(&m.minimal_polynomial());
                    b["double_centralizer_equals_poly_algebra"] = json!(dc == pa);
                    b["double_centralizer_basis"] =
                        Value::Array(dc.elements().iter().map(matrix_json).collect());
                }
                b
            };
            ("centralizer", r, body, EXIT_DEFINITIVE)
        }
        Command::Nilpotence(args) => {
            let l = load(args)?;
            let mut r = header("nilpotence", fuel);
            r.insert("operator".into(), operator_echo(&l));
            let v = is_topologically_nilpotent(&l.operator, &l.seeds, fuel)?;
            let exit = exit_for(!matches!(v, NilpotenceVerdict::Inconclusive { .. }));
            ("nilpotence", r, report::nilpotence_json(&v), exit)
        }
        Command::Closure(args) => {
            let l = load(args)?;
            let mut r = header("closure", fuel);
            r.insert("operator".into(), operator_echo(&l));
            let v = closure_test(&l.operator, &l.seeds, fuel)?;
            let exit = exit_for(!matches!(v, ClosureVerdict::Inconclusive { .. }));
            ("closure", r, report::closure_json(&v), exit)
        }
        Command::Oracle {
            command: OracleCommand::Sweep { n, p, random, seed },
        } => {
            let r = header("oracle_sweep", fuel);
            ("oracle_sweep", r, sweep(*n, *p, *random, *seed, fuel)?, EXIT_DEFINITIVE)
        }
        Command::Fixtures { name } => {
            let r = header("fixtures", fuel);
            let body = match name {
                Some(n) => {
                    let f = fixture(n)?;
                    json!({
                        "verdict": "listed",
                        "name": f.name,
                        "description": f.description,
                        "locally_escaping": f.locally_escaping(),
                        "seeds": f.seeds.iter().map(sparse_json).collect::<Vec<_>>(),
                        "operator": serialize_operator(&f.operator),
                    })
                }
                None => json!({
                    "verdict": "listed",
                    "fixtures": fixtures().iter().map(|f| json!({
                        "name": f.name,
                        "description": f.description,
                        "field": f.operator.field().to_string(),
                        "domain": f.operator.domain().to_string(),
                        "locally_escaping": f.locally_escaping(),
                    })).collect::<Vec<_>>(),
                }),
            };
            ("fixtures", r, body, EXIT_DEFINITIVE)
        }
    };
    let summary = format!("{name}: {}", verdict_of(&body));
    report.insert("result".into(), body);
    report.insert("timing_ms".into(), json!(started.elapsed().as_millis() as u64));
    Ok(Outcome {
        report: Value::Object(report),
        exit_code,
        summary,
    })
}

fn analyze(l: &Loaded, fuel: usize) -> Result<(Value, i32), CliError> {
    let t = &l.operator;
    let v = triangularize(t, &l.seeds, fuel)?;
    let mut body = report::triangularize_json(&v);
    if let TriangularizabilityVerdict::Triangularizable(c) = &v {
        body["invertibility"] = report::invertibility_json(&invertibility_report(t, &c.basis, &c.hull)?);
        body["recheck"] = report::check_json(&verify_triangular(t, &c.basis)?);
    }
    body["nilpotence"] = report::nilpotence_json(&is_topologically_nilpotent(t, &l.seeds, fuel)?);
    body["closure"] = report::closure_json(&closure_test(t, &l.seeds, fuel)?);
    Ok((body, exit_for(v.is_definitive())))
}

fn canonical(l: &Loaded, fuel: usize) -> Result<(Value, i32), CliError> {
    let hull = match saturate_vectors(&l.operator, &l.seeds, fuel)? {
        Saturation::Closed { hull, .. } => hull,
        Saturation::Diverged(trace) => {
            return Ok((json!({"verdict": "inconclusive", "trace": report::trace_json(&trace)}), EXIT_INCONCLUSIVE));
        }
    };
    if hull.dim() == 0 {
        return Ok((json!({"verdict": "zero_hull"}), EXIT_DEFINITIVE));
    }
    let p = hull.matrix.minimal_polynomial();
    let cyclic = cyclic_decomposition(&hull, &p)?;
    let mut body = json!({
        "hull": report::subspace_json(&hull.basis),
        "minimal_polynomial": report::poly_json(&p),
        "cyclic_blocks": cyclic.iter().map(report::cyclic_block_json).collect::<Vec<_>>(),
    });
    match shift_block_form(&hull) {
        Ok(blocks) => {
            body["verdict"] = json!("shift_blocks");
            body["blocks"] = Value::Array(blocks.iter().map(report::shift_block_json).collect());
        }
        Err(triax::Error::Split(f)) => {
            body["verdict"] = json!("not_split");
            body["split_failure"] = report::split_failure_json(&f);
        }
        Err(e) => return Err(CliError::Core(e)),
    }
    Ok((body, EXIT_DEFINITIVE))
}

fn sweep(n: usize, p: u64, random: Option<usize>, seed: u64, fuel: usize) -> Result<Value, CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let field = FieldSpec::prime(p)?;
    let matrices: Box<dyn Iterator<Item = triax::linspace::Matrix>> = match random {
        Some(k) => Box::new(seeded_matrix_stream(n, p, seed)?.take(k)),
        None => Box::new(all_matrices(field, n)?),
    };
    let (mut checked, mut triangularizable, mut failures) = (0usize, 0usize, Vec::new());
    for m in matrices {
        checked += 1;
        let brute = brute_force_triangularizable(&m)?;
        let split = split_linear(&m.minimal_polynomial())?.roots().is_some();
        let op = Operator::matrix(m.clone())?;
        let main = match triangularize(&op, &default_seeds(&op), fuel)? {
            TriangularizabilityVerdict::Triangularizable(_) => Some(true),
            TriangularizabilityVerdict::NotTriangularizable(_) => Some(false),
            TriangularizabilityVerdict::Inconclusive(_) => None,
        };
        if main == Some(brute) && split == brute {
            triangularizable += brute as usize;
        } else {
            failures.push(json!({
                "matrix": matrix_json(&m),
                "brute_force": brute,
                "minimal_polynomial_splits": split,
                "triangularize": main,
            }));
        }
    }
    Ok(json!({
        "verdict": if failures.is_empty() { "pass" } else { "fail" },
        "n": n,
        "p": p,
        "checked": checked,
        "passed": checked - failures.len(),
        "failed": failures.len(),
        "triangularizable": triangularizable,
        "disagreements": failures,
    }))
}
