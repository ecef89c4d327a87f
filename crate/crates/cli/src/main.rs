use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use jackvertex::cache::TransitionCache;
use jackvertex::exactscalar::{parse_rational, BigRational, Coeff};
use jackvertex::fock::FockVector;
use jackvertex::partitions::Partition;
use jackvertex::symfunc::{Basis, SymFunc, SymRing};
use jackvertex::verify::{self, Suite, VerifyOptions};
use jackvertex::vertexops::{product_x, ProductMethod};
use serde_json::{json, Value};

const EXIT_VERIFY: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "jackvertex", version, about = "Exact Jack functions and vertex operator products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a Jack function P_λ or Q_λ.
    Jack {
        #[arg(long)]
        lambda: Partition,
        #[arg(long, value_enum, default_value = "P")]
        kind: JackKind,
        /// `symbolic` or `at:<rational>`.
        #[arg(long, default_value = "symbolic")]
        alpha: AlphaMode,
        /// Output basis: powerSum, monomial, genHomogeneous, jackP, jackQ (or p, m, q, P, Q).
        #[arg(long, default_value = "monomial")]
        basis: Basis,
        #[arg(long)]
        pretty: bool,
    },
    /// Evaluate X_{-λ_s}⋯X_{-λ_1} e^{nh}, with λ_1 acting first.
    VertexProduct {
        #[arg(long)]
        lambda: Partition,
        #[arg(long, allow_hyphen_values = true)]
        twice_charge: i64,
        #[arg(long, value_parser = parse_alpha)]
        alpha: BigRational,
        #[arg(long, value_enum, default_value = "iterated")]
        method: MethodArg,
        #[arg(long)]
        pretty: bool,
    },
    /// Run verification suites and print a JSON report.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 8)]
        size: u32,
        /// Comma-separated list of rationals.
        #[arg(long, value_delimiter = ',', value_parser = parse_alpha, default_value = "1")]
        alpha: Vec<BigRational>,
        /// Also write the report to this file.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Omit per-case timings so reports are byte-identical across runs.
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        pretty: bool,
    },
    /// Inspect or fill the on-disk transition matrix cache.
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
        /// Highest weight for `warm`.
        #[arg(long, default_value_t = 6)]
        weight: u32,
        #[arg(long, default_value = "symbolic")]
        alpha: AlphaMode,
        /// Overrides the cache directory environment variable.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum JackKind {
    #[value(name = "P", alias = "p")]
    P,
    #[value(name = "Q", alias = "q")]
    Q,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Iterated,
    Explicit,
    Raising,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Rectangular,
    Basis,
    Contraction,
    Jacklemma,
    Products,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum CacheAction {
    Status,
    Clear,
    Warm,
}

#[derive(Clone, Debug)]
enum AlphaMode {
    Symbolic,
    At(BigRational),
}

impl std::str::FromStr for AlphaMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symbolic" | "a" => Ok(AlphaMode::Symbolic),
            _ => parse_alpha(s.strip_prefix("at:").unwrap_or(s)).map(AlphaMode::At),
        }
    }
}

fn parse_alpha(s: &str) -> Result<BigRational, String> {
    parse_rational(s.trim()).map_err(|e| e.to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn domain(e: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_DOMAIN, message: e.to_string() }
    }

    fn io(e: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_IO, message: e.to_string() }
    }
}

fn vertex_failure(e: jackvertex::vertexops::VertexError) -> Failure {
    Failure::domain(format!("{}: {e}", e.kind()))
}

/// Prints to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn render(value: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(value).expect("json")
    } else {
        serde_json::to_string(value).expect("json")
    }
}

fn symfunc_table<C: Coeff>(f: &SymFunc<C>) -> String {
    let rows: Vec<(String, String)> = f.terms().iter().map(|(l, c)| (format!("{l:?}"), c.to_string())).collect();
    let width = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    let mut out = format!("basis: {}\n", f.basis());
    for (l, c) in rows {
        let _ = writeln!(out, "{l:<width$}  {c}");
    }
    out
}

fn jack<C: Coeff>(ring: &SymRing<C>, lambda: &Partition, kind: JackKind, basis: Basis, pretty: bool) -> Result<String, Failure> {
    let source = match kind {
        JackKind::P => Basis::JackP,
        JackKind::Q => Basis::JackQ,
    };
    let f = ring
        .to_basis(&SymFunc::basis_element(source, lambda.clone()), basis)
        .map_err(Failure::domain)?;
    Ok(if pretty {
        symfunc_table(&f)
    } else {
        serde_json::to_string(&f).expect("json")
    })
}

fn vertex_product(lambda: &Partition, twice_charge: i64, alpha: &BigRational, method: MethodArg, pretty: bool) -> Result<(String, bool), Failure> {
    let modes: Vec<i64> = lambda.parts().iter().map(|&p| p as i64).collect();
    let header = json!({
        "schema": verify::SCHEMA_VERSION,
        "lambda": lambda,
        "twiceChargeIn": twice_charge,
        "alpha": alpha.to_string(),
    });
    let single = |m: ProductMethod| product_x(m, &modes, twice_charge, alpha);
    let describe = |v: &FockVector<BigRational>| json!({"vector": v, "tImage": v.t_map()});
    let methods: Vec<ProductMethod> = match method {
        MethodArg::Iterated => vec![ProductMethod::Iterated],
        MethodArg::Explicit => vec![ProductMethod::Explicit],
        MethodArg::Raising => vec![ProductMethod::Raising],
        MethodArg::All => ProductMethod::ALL.to_vec(),
    };
    let mut report = header;
    if methods.len() == 1 {
        let r = single(methods[0]).map_err(vertex_failure)?;
        report["method"] = json!(methods[0].name());
        let d = describe(&r.vector);
        report["vector"] = d["vector"].clone();
        report["tImage"] = d["tImage"].clone();
        return Ok((render(&report, pretty), true));
    }
    let mut results = serde_json::Map::new();
    let mut vectors = Vec::new();
    let mut errors = Vec::new();
    for m in methods {
        match single(m) {
            Ok(r) => {
                results.insert(m.name().into(), describe(&r.vector));
                vectors.push(r.vector);
            }
            Err(e) => {
                results.insert(m.name().into(), json!({"error": e.to_string()}));
                errors.push(e);
            }
        }
    }
    if vectors.is_empty() {
        return Err(vertex_failure(errors.remove(0)));
    }
    let agreement = vectors.windows(2).all(|w| w[0] == w[1]);
    report["agreement"] = json!(agreement);
    report["methods"] = Value::Object(results);
    Ok((render(&report, pretty), agreement))
}

fn cache_command(action: CacheAction, weight: u32, alpha: &AlphaMode, dir: Option<PathBuf>) -> Result<String, Failure> {
    let cache = dir.map_or_else(TransitionCache::from_env, TransitionCache::new);
    match action {
        CacheAction::Status => {
            let status = cache.status().map_err(Failure::io)?;
            let mut out = format!("{} entries\n", status.total());
            for (tag, weights) in &status.entries {
                for (w, n) in weights {
                    let _ = writeln!(out, "{tag} weight {w}: {n}");
                }
            }
            Ok(out)
        }
        CacheAction::Clear => {
            let n = cache.clear().map_err(Failure::io)?;
            Ok(format!("removed {n} entries\n"))
        }
        CacheAction::Warm => {
            let written = match alpha {
                AlphaMode::Symbolic => warm(&SymRing::symbolic().with_disk_cache(cache.clone()), weight)?,
                AlphaMode::At(a) => {
                    let ring = SymRing::at(a.clone()).map_err(Failure::domain)?;
                    warm(&ring.with_disk_cache(cache.clone()), weight)?
                }
            };
            Ok(format!("warmed {written} matrices up to weight {weight}\n"))
        }
    }
}

fn warm<C: Coeff>(ring: &SymRing<C>, max_weight: u32) -> Result<usize, Failure> {
    let mut n = 0;
    for w in 0..=max_weight {
        for from in Basis::ALL {
            for to in Basis::ALL {
                if from != to {
                    ring.transition_matrix(w, from, to).map_err(|e| match e {
                        jackvertex::symfunc::SymFuncError::Cache(c) => Failure::io(c),
                        other => Failure::domain(other),
                    })?;
                    n += 1;
                }
            }
        }
    }
    Ok(n)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Jack { lambda, kind, alpha, basis, pretty } => {
            let text = match alpha {
                AlphaMode::Symbolic => jack(&SymRing::symbolic(), &lambda, kind, basis, pretty)?,
                AlphaMode::At(a) => jack(&SymRing::at(a).map_err(Failure::domain)?, &lambda, kind, basis, pretty)?,
            };
            emit(&format!("{}\n", text.trim_end()));
            Ok(0)
        }
        Command::VertexProduct { lambda, twice_charge, alpha, method, pretty } => {
            let (text, agree) = vertex_product(&lambda, twice_charge, &alpha, method, pretty)?;
            emit(&format!("{text}\n"));
            Ok(if agree { 0 } else { EXIT_VERIFY })
        }
        Command::Verify { suite, size, alpha, output, no_timing, pretty } => {
            let suites: Vec<Suite> = match suite {
                SuiteArg::Rectangular => vec![Suite::Rectangular],
                SuiteArg::Basis => vec![Suite::Basis],
                SuiteArg::Contraction => vec![Suite::Contraction],
                SuiteArg::Jacklemma => vec![Suite::Jacklemma],
                SuiteArg::Products => vec![Suite::Products],
                SuiteArg::All => Suite::ALL.to_vec(),
            };
            let opts = VerifyOptions { size, alphas: alpha, timing: !no_timing };
            let report = verify::run(&suites, &opts);
            let value = serde_json::to_value(&report).expect("json");
            let text = render(&value, pretty);
            emit(&format!("{text}\n"));
            if let Some(path) = output {
                std::fs::write(&path, format!("{text}\n")).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            }
            eprintln!("{} cases, {} failed", report.case_count(), report.failures());
            Ok(if report.passed { 0 } else { EXIT_VERIFY })
        }
        Command::Cache { action, weight, alpha, cache_dir } => {
            emit(&cache_command(action, weight, &alpha, cache_dir)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
