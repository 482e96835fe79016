mod cache;
mod render;

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use projrep::linalg::IntMatrix;
use projrep::moduli::{self, FgAbelianGroup};
use projrep::skew::{self, SkewMatrixZm, DEFAULT_ENUMERATION_CAP};
use projrep::unitary::{self, ConstructOptions, UnitaryTuple};
use projrep::Error;

use cache::CountCache;
use render::{list, render, Format, Table};

/// Projective representations of finitely generated abelian groups.
///
/// Classes `D` are given as JSON `{"n": .., "m": .., "upper": [..]}` where
/// `upper` lists the entries above the diagonal row by row, either inline or
/// as a path to a file (`-` reads stdin).
///
/// Exit codes: 0 success, 1 bad input, 2 infeasible or too large,
/// 3 verification failure.
#[derive(Parser)]
#[command(name = "projrep", version)]
struct Cli {
    /// Output format; `construct` always writes JSON
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads for enumeration commands
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=1024))]
    jobs: u64,
    /// Largest enumeration allowed
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_CAP, value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
    /// JSON file caching N(n, m) counts
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Numerical tolerance for class extraction and commutant rank
    #[arg(long, global = true, default_value_t = unitary::DEFAULT_TOL, value_parser = positive_float)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GroupSpec {
    /// Torsion orders k_1,...,k_s
    #[arg(long, value_delimiter = ',')]
    torsion: Vec<u64>,
    /// Free rank
    #[arg(long, default_value_t = 0)]
    rank: usize,
}

#[derive(Subcommand)]
enum Command {
    /// sigma(D), r_i(D), |R(D)| and the canonical invariants of a class
    Sigma {
        d: String,
        /// Torsion orders of the leading generators, for the admissibility check
        #[arg(long, value_delimiter = ',')]
        torsion: Vec<u64>,
    },
    /// Canonical form Q^T D Q = D_n(c) with the transform Q and its inverse
    Canon { d: String },
    /// N(n, m): number of classes D in T(n, Z/m) with sigma(D) | m
    Count { n: usize, m: u64 },
    /// Components of Rep(Gamma, PU(m)), one per admissible class
    Decompose {
        m: u64,
        #[command(flatten)]
        group: GroupSpec,
    },
    /// Irreducible projective classes of a finite abelian group
    Irreps {
        #[command(flatten)]
        group: GroupSpec,
        /// Only classes of this degree
        #[arg(long)]
        degree: Option<u64>,
    },
    /// Flat and total PU(m)-bundle classes over the n-torus
    Bundles { n: usize, m: u64 },
    /// A unitary tuple realizing D in U(m)
    Construct {
        d: String,
        /// Torus points as JSON, one list of n phases (in turns) per block
        #[arg(long)]
        scalars: Option<String>,
        /// Orders k_i with A_i^(k_i) = I for the leading generators
        #[arg(long, value_delimiter = ',')]
        torsion: Vec<u64>,
        /// Write the tuple here instead of stdout
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Read off the class of a tuple and check irreducibility and eigenvalues
    Verify {
        tuple: String,
        /// Modulus for the class; defaults to the matrix dimension
        #[arg(long)]
        m: Option<u64>,
    },
}

fn positive_float(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ZeroModulus
            | Error::InvalidInput(_)
            | Error::DimensionMismatch(_)
            | Error::InfiniteGroup(_)
            | Error::Internal(_) => 1,
            Error::Overflow(_)
            | Error::EnumerationTooLarge { .. }
            | Error::Infeasible(_)
            | Error::Inadmissible(_) => 2,
            Error::NotAlmostCommuting { .. }
            | Error::IndeterminateClass { .. }
            | Error::IllConditioned { .. }
            | Error::LemmaViolation(_) => 3,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(String, u8), Failure>;

fn read_source(arg: &str) -> Result<String, Failure> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::input(format!("cannot read stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(arg).map_err(|e| Failure::input(format!("cannot read {arg}: {e}")))
}

fn parse_class(arg: &str) -> Result<SkewMatrixZm, Failure> {
    serde_json::from_str(&read_source(arg)?)
        .map_err(|e| Failure::input(format!("malformed class: {e}")))
}

fn int_rows(a: &IntMatrix) -> Value {
    (0..a.rows())
        .map(|i| {
            (0..a.cols())
                .map(|j| {
                    let s = a.get(i, j).to_string();
                    s.parse::<i64>()
                        .map(Value::from)
                        .unwrap_or(Value::String(s))
                })
                .collect::<Value>()
        })
        .collect()
}

fn upper_cell(d: &SkewMatrixZm) -> String {
    list(d.upper())
}

#[derive(Serialize)]
struct SigmaReport {
    #[serde(rename = "D")]
    d: SkewMatrixZm,
    sigma: u64,
    r: Vec<u64>,
    row_space_order: u64,
    invariants: Vec<u64>,
    admissible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

fn cmd_sigma(cli: &Cli, arg: &str, torsion: &[u64]) -> Outcome {
    let d = parse_class(arg)?;
    if torsion.len() > d.n() {
        return Err(Failure::input(format!(
            "{} torsion orders for {} generators",
            torsion.len(),
            d.n()
        )));
    }
    let reason = skew::admissibility_failure(&d, torsion)?;
    let report = SigmaReport {
        sigma: skew::sigma(&d)?,
        r: d.coordinate_orders(),
        row_space_order: d.row_space_order()?,
        invariants: skew::canonical_form(&d).invariants,
        admissible: reason.is_none(),
        reason,
        d,
    };
    let out = render(cli.format, &report, || {
        Table::fields(vec![
            ("D", report.d.to_string()),
            ("sigma", report.sigma.to_string()),
            ("r", list(&report.r)),
            ("row_space_order", report.row_space_order.to_string()),
            ("invariants", list(&report.invariants)),
            ("admissible", report.admissible.to_string()),
        ])
    });
    Ok((out, 0))
}

#[derive(Serialize)]
struct CanonReport {
    #[serde(rename = "D")]
    d: SkewMatrixZm,
    invariants: Vec<u64>,
    orders: Vec<u64>,
    normal_form: SkewMatrixZm,
    #[serde(rename = "Q")]
    q: Value,
    #[serde(rename = "Q_inv")]
    q_inv: Value,
}

fn cmd_canon(cli: &Cli, arg: &str) -> Outcome {
    let d = parse_class(arg)?;
    let c = skew::canonical_form(&d);
    let report = CanonReport {
        invariants: c.invariants.clone(),
        orders: c.orders(),
        normal_form: c.normal_form()?,
        q: int_rows(&c.q),
        q_inv: int_rows(&c.q_inv),
        d,
    };
    let rows = |v: &Value| {
        v.as_array()
            .map(|rows| {
                rows.iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .unwrap_or_default()
    };
    let out = render(cli.format, &report, || {
        Table::fields(vec![
            ("D", report.d.to_string()),
            ("invariants", list(&report.invariants)),
            ("orders", list(&report.orders)),
            ("normal_form", report.normal_form.to_string()),
            ("Q", rows(&report.q)),
            ("Q_inv", rows(&report.q_inv)),
        ])
    });
    Ok((out, 0))
}

/// `N(n, m)`, through the cache when one is configured.
fn cached_count(cli: &Cli, n: usize, m: u64) -> Result<u64, Failure> {
    let compute = || skew::count_admissible_parallel(n, m, cli.jobs as usize, cli.cap);
    let Some(path) = &cli.cache else {
        return Ok(compute()?);
    };
    let mut cache = CountCache::open(path);
    if let Some(v) = cache.get(n, m) {
        return Ok(v);
    }
    let v = compute()?;
    cache.insert(n, m, v);
    if let Err(e) = cache.save() {
        eprintln!("warning: could not write cache {}: {e}", path.display());
    }
    Ok(v)
}

#[derive(Serialize)]
struct CountReport {
    n: usize,
    m: u64,
    count: u64,
}

fn cmd_count(cli: &Cli, n: usize, m: u64) -> Outcome {
    if n == 0 || m == 0 {
        return Err(Failure::input("n and m must be positive"));
    }
    let report = CountReport {
        n,
        m,
        count: cached_count(cli, n, m)?,
    };
    let out = render(cli.format, &report, || {
        let mut t = Table::new(["n", "m", "count"]);
        t.push(vec![n.to_string(), m.to_string(), report.count.to_string()]);
        t
    });
    Ok((out, 0))
}

fn group(spec: &GroupSpec) -> Result<FgAbelianGroup, Failure> {
    if spec.torsion.is_empty() && spec.rank == 0 {
        return Err(Failure::input("the group needs --torsion or --rank"));
    }
    Ok(FgAbelianGroup::new(spec.torsion.clone(), spec.rank)?)
}

fn cmd_decompose(cli: &Cli, m: u64, spec: &GroupSpec) -> Outcome {
    let gamma = group(spec)?;
    let report = moduli::decompose_parallel(&gamma, m, cli.jobs as usize, cli.cap)?;
    let out = match cli.format {
        Format::Json => report.to_json() + "\n",
        _ => render(cli.format, &report, || {
            let mut t = Table::new(["D", "sigma", "l", "r", "H", "pi0"]);
            for c in &report.summands {
                t.push(vec![
                    upper_cell(&c.d),
                    c.sigma.to_string(),
                    c.l.to_string(),
                    list(&c.coordinate_orders),
                    c.h.to_string(),
                    c.pi0_count.to_string(),
                ]);
            }
            t
        }),
    };
    Ok((out, 0))
}

fn cmd_irreps(cli: &Cli, spec: &GroupSpec, degree: Option<u64>) -> Outcome {
    let gamma = group(spec)?;
    let classes = moduli::irreducible_projective_classes(&gamma, degree, cli.cap)?;
    let out = render(cli.format, &classes, || {
        let mut t = Table::new(["D", "degree", "linear_class_count"]);
        for c in &classes {
            t.push(vec![
                upper_cell(&c.d),
                c.degree.to_string(),
                c.linear_class_count.to_string(),
            ]);
        }
        t
    });
    Ok((out, 0))
}

fn cmd_bundles(cli: &Cli, n: usize, m: u64) -> Outcome {
    let report = moduli::flat_bundle_report_with(n, m, |n, m| {
        cached_count(cli, n, m).map_err(|f| Error::InvalidInput(f.message))
    })?;
    let total = match report.total_bundle_classes {
        moduli::BundleCount::Finite(v) => v.to_string(),
        moduli::BundleCount::Infinite => "infinite".into(),
    };
    let out = render(cli.format, &report, || {
        Table::fields(vec![
            ("n", n.to_string()),
            ("m", m.to_string()),
            ("flat_classes", report.flat_classes.to_string()),
            ("all_bundles_flat", report.all_bundles_flat.to_string()),
            ("total_bundle_classes", total.clone()),
            ("nonflat_exists", report.nonflat_exists.to_string()),
        ])
    });
    Ok((out, 0))
}

fn cmd_construct(
    arg: &str,
    scalars: Option<&str>,
    torsion: &[u64],
    output: Option<&PathBuf>,
) -> Outcome {
    let d = parse_class(arg)?;
    let scalars = scalars
        .map(|s| {
            serde_json::from_str::<Vec<Vec<f64>>>(s)
                .map_err(|e| Failure::input(format!("malformed scalars: {e}")))
        })
        .transpose()?;
    let opts = ConstructOptions {
        scalars,
        torsion: (!torsion.is_empty()).then(|| torsion.to_vec()),
    };
    let tuple = unitary::construct_tuple(&d, &opts)?;
    let json = serde_json::to_string(&tuple).expect("tuple serializes") + "\n";
    match output {
        Some(path) => {
            fs::write(path, json)
                .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
            Ok((String::new(), 0))
        }
        None => Ok((json, 0)),
    }
}

fn cmd_verify(cli: &Cli, arg: &str, m: Option<u64>) -> Outcome {
    let tuple: UnitaryTuple = serde_json::from_str(&read_source(arg)?)
        .map_err(|e| Failure::input(format!("malformed tuple: {e}")))?;
    let m = m.unwrap_or(tuple.dim() as u64);
    let report = unitary::verify_tuple(&tuple, m, cli.tol)?;
    let out = render(cli.format, &report, || {
        let opt = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
        let eigen = report
            .eigen
            .as_ref()
            .map_or("-".to_string(), |e| list(&e.coords));
        let mut fields = vec![
            ("D", report.d.to_string()),
            ("sigma", report.sigma.to_string()),
            (
                "max_commutator_residual",
                format!("{:.3e}", report.max_commutator_residual),
            ),
            (
                "unitarity_residual",
                format!("{:.3e}", report.unitarity_residual),
            ),
            ("commutant_dimension", opt(report.commutant_dimension)),
            ("eigen_coords", eigen),
            (
                "verdict",
                if report.pass { "pass" } else { "fail" }.to_string(),
            ),
        ];
        for f in &report.failures {
            fields.push(("failure", f.clone()));
        }
        Table::fields(fields)
    });
    Ok((out, if report.pass { 0 } else { 3 }))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Sigma { d, torsion } => cmd_sigma(cli, d, torsion),
        Command::Canon { d } => cmd_canon(cli, d),
        Command::Count { n, m } => cmd_count(cli, *n, *m),
        Command::Decompose { m, group } => cmd_decompose(cli, *m, group),
        Command::Irreps { group, degree } => cmd_irreps(cli, group, *degree),
        Command::Bundles { n, m } => cmd_bundles(cli, *n, *m),
        Command::Construct {
            d,
            scalars,
            torsion,
            output,
        } => cmd_construct(d, scalars.as_deref(), torsion, output.as_ref()),
        Command::Verify { tuple, m } => cmd_verify(cli, tuple, *m),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
