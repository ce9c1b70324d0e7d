use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use posetdim::dimension::{exact_dimension, is_realizer};
use posetdim::experiments::{
    growth_csv, run_dual_scan, run_growth_experiment, run_hiraguchi_scan, run_prob_lemma_trials,
    run_split_sandwich_scan, GrowthConfig, Violation,
};
use posetdim::format::{parse_poset, write_bipartite, write_poset, PosetFile};
use posetdim::generate::{random_bipartite, random_poset, random_skfree_bipartite};
use posetdim::skfree::peel::{general_upper_bound, peel_realizer, PeelConfig};
use posetdim::{BipartitePoset, LinearExtension, Poset, VERSION};

/// Order-dimension toolkit: generate posets, compute dimensions, peel
/// S_k-free posets and run seeded experiments.
#[derive(Parser)]
#[command(name = "posetdim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a poset in POSET v1 format.
    Gen {
        /// standard:<k> | random:<n>,<p> | bipartite:<nA>,<nB>,<p> | skfree:<nA>,<nB>,<p>,<k>
        #[arg(long = "type")]
        kind: GenType,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Attempts for skfree rejection sampling.
        #[arg(long, default_value_t = 10_000)]
        max_tries: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact dimension with a realizer, or check a realizer.
    Dim {
        file: PathBuf,
        /// Run the exact solver without a node budget (the default).
        #[arg(long, conflicts_with = "budget")]
        exact: bool,
        /// Stop after N search nodes and report the best realizer found.
        #[arg(long)]
        budget: Option<u64>,
        /// Check the realizer in a JSON file (a dimension result, a peel
        /// certificate, or a list of extensions) instead of solving.
        #[arg(long)]
        verify: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Peel an S_k-free poset into a certified realizer.
    Peel {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        q: usize,
        /// Hand the rest to the exact solver at this many elements.
        #[arg(long, default_value_t = 10)]
        threshold: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Node budget for the exact solver on the base.
        #[arg(long)]
        budget: Option<u64>,
        /// Accept any poset: peel its split and project the realizer back.
        #[arg(long)]
        general: bool,
        /// Write the certificate JSON here (stdout otherwise).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Kimble split, written with its bipartition.
    Split {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Look for an induced standard example S_k.
    Detect {
        file: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Monte Carlo estimate of the event-E probability.
    ProbLemma {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Seeded experiments.
    Experiment {
        #[command(subcommand)]
        which: Experiment,
    },
}

#[derive(Subcommand)]
enum Experiment {
    /// Peeled realizer size against ground size.
    Growth {
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Comma-separated ascending sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        q: usize,
        #[arg(long, default_value_t = 0.005)]
        edge_prob: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threshold: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// dim(P) <= n/2 on random posets with 4 <= n <= 8.
    Hiraguchi(ScanArgs),
    /// dim(P) <= dim(split P) <= dim(P) + 1 on random posets with n <= 7.
    Sandwich(ScanArgs),
    /// dim(P) = dim(dual P) on random posets with n <= 8.
    Dual(ScanArgs),
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Debug)]
enum GenType {
    Standard(usize),
    Random(usize, f64),
    Bipartite(usize, usize, f64),
    Skfree(usize, usize, f64, usize),
}

impl FromStr for GenType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, params) = s.split_once(':').ok_or("expected <kind>:<params>")?;
        let parts: Vec<&str> = params.split(',').collect();
        let int = |i: usize| -> Result<usize, String> {
            parts[i].trim().parse().map_err(|_| format!("bad integer `{}`", parts[i]))
        };
        let prob = |i: usize| -> Result<f64, String> {
            parts[i].trim().parse().map_err(|_| format!("bad probability `{}`", parts[i]))
        };
        let arity = |n: usize| {
            if parts.len() == n {
                Ok(())
            } else {
                Err(format!("`{kind}` takes {n} parameter(s)"))
            }
        };
        match kind {
            "standard" => arity(1).and_then(|_| Ok(GenType::Standard(int(0)?))),
            "random" => arity(2).and_then(|_| Ok(GenType::Random(int(0)?, prob(1)?))),
            "bipartite" => arity(3).and_then(|_| Ok(GenType::Bipartite(int(0)?, int(1)?, prob(2)?))),
            "skfree" => arity(4).and_then(|_| Ok(GenType::Skfree(int(0)?, int(1)?, prob(2)?, int(3)?))),
            other => Err(format!("unknown generator `{other}`")),
        }
    }
}

impl std::fmt::Display for GenType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GenType::Standard(k) => write!(f, "standard:{k}"),
            GenType::Random(n, p) => write!(f, "random:{n},{p}"),
            GenType::Bipartite(na, nb, p) => write!(f, "bipartite:{na},{nb},{p}"),
            GenType::Skfree(na, nb, p, k) => write!(f, "skfree:{na},{nb},{p},{k}"),
        }
    }
}

/// Failure that maps to exit code 1 with a JSON report on stderr.
struct Failure {
    name: String,
    module: &'static str,
    message: String,
}

impl From<posetdim::Error> for Failure {
    fn from(e: posetdim::Error) -> Self {
        Failure {
            name: e.name().to_string(),
            module: e.module(),
            message: e.to_string(),
        }
    }
}

fn cli_failure(name: &str, message: impl Into<String>) -> Failure {
    Failure {
        name: name.to_string(),
        module: "cli",
        message: message.into(),
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| cli_failure("IoError", format!("{}: {e}", path.display())))
}

fn write_text(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| cli_failure("IoError", format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_poset(path: &Path) -> CliResult<PosetFile> {
    Ok(parse_poset(&read_text(path)?)?)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn envelope(command: &str, seed: Option<u64>, parameters: Value) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("tool_version".into(), json!(VERSION));
    m.insert("command".into(), json!(command));
    m.insert("seed".into(), json!(seed));
    m.insert("parameters".into(), parameters);
    m
}

fn gen(kind: &GenType, seed: u64, max_tries: usize, output: Option<&Path>) -> CliResult {
    let body = match *kind {
        GenType::Standard(k) => {
            let p = Poset::standard_example(k)?;
            write_bipartite(&p.bipartition().expect("standard examples have height 2"))
        }
        GenType::Random(n, p) => write_poset(&random_poset(n, p, seed)?),
        GenType::Bipartite(na, nb, p) => write_bipartite(&random_bipartite(na, nb, p, seed)?),
        GenType::Skfree(na, nb, p, k) => write_bipartite(&random_skfree_bipartite(na, nb, p, k, seed, max_tries)?),
    };
    let header = format!("# posetdim {VERSION} gen --type {kind} --seed {seed}\n");
    write_text(output, &(header + &body))
}

/// Pulls a list of extensions out of the JSON shapes the tool writes.
fn extensions_from_json(v: &Value) -> Option<Vec<LinearExtension>> {
    let list = if v.is_array() {
        v
    } else {
        [
            &v["extensions"],
            &v["realizer"]["extensions"],
            &v["certificate"]["realizer"]["extensions"],
            &v["result"]["extensions"],
        ]
        .into_iter()
        .find(|x| x.is_array())?
    };
    serde_json::from_value(list.clone()).ok()
}

fn dim(file: &Path, budget: Option<u64>, verify: Option<&Path>, as_json: bool) -> CliResult {
    let poset = read_poset(file)?.poset;
    let params = json!({ "input": file.display().to_string(), "budget": budget });
    if let Some(path) = verify {
        let v: Value = serde_json::from_str(&read_text(path)?)
            .map_err(|e| cli_failure("FormatError", format!("{}: {e}", path.display())))?;
        let extensions = extensions_from_json(&v)
            .ok_or_else(|| cli_failure("FormatError", "no list of extensions found in the JSON"))?;
        let check = is_realizer(&poset, &extensions)?;
        if !check.valid {
            let first = check
                .unreversed
                .first()
                .map(|c| format!("critical pair ({}, {}) is never reversed", c.x, c.y))
                .unwrap_or_else(|| "empty family".into());
            return Err(Failure {
                name: "InvalidRealizer".into(),
                module: "dimension",
                message: first,
            });
        }
        println!("valid realizer with {} extensions", extensions.len());
        return Ok(());
    }
    let result = match exact_dimension(&poset, budget) {
        Ok(r) => r,
        Err(posetdim::Error::BudgetExceeded { best, .. }) => *best,
        Err(e) => return Err(e.into()),
    };
    if as_json {
        let mut m = envelope("dim", None, params);
        m.insert("result".into(), serde_json::to_value(&result).expect("serializable"));
        print!("{}", pretty(&Value::Object(m)));
    } else if result.optimal {
        println!("dimension {}", result.dimension);
    } else {
        println!("dimension <= {} (budget exhausted)", result.dimension);
    }
    Ok(())
}

struct PeelArgs<'a> {
    file: &'a Path,
    cfg: PeelConfig,
    general: bool,
    json: Option<&'a Path>,
}

fn peel(a: PeelArgs) -> CliResult {
    let parsed = read_poset(a.file)?;
    let cfg = a.cfg;
    let params = json!({
        "input": a.file.display().to_string(),
        "k": cfg.k,
        "q": cfg.q,
        "threshold": cfg.base_threshold,
        "budget": cfg.budget,
        "general": a.general,
    });
    let mut m = envelope("peel", Some(cfg.seed), params);
    let summary;
    if a.general {
        let g = general_upper_bound(&parsed.poset, &cfg)?;
        summary = format!(
            "bound {} from {} peeling steps; realizer of {} extensions",
            g.bound,
            g.certificate.steps.len(),
            g.realizer.len()
        );
        m.insert("bound".into(), json!(g.bound));
        m.insert("projection_cleanup".into(), json!(g.projection_cleanup));
        m.insert("certificate".into(), serde_json::to_value(&g.certificate).expect("serializable"));
        m.insert("realizer".into(), serde_json::to_value(&g.realizer).expect("serializable"));
    } else {
        let bp: BipartitePoset = match parsed.bipartition {
            Some(bp) => bp,
            None => parsed.poset.bipartition().ok_or_else(|| {
                cli_failure("ArgumentError", "poset has height above 2; use --general")
            })?,
        };
        let cert = peel_realizer(&bp, &cfg)?;
        summary = format!(
            "{} peeling steps, base of {} elements with dimension {}, total {} extensions",
            cert.steps.len(),
            cert.base_size,
            cert.base_dimension,
            cert.total_size
        );
        m.insert("certificate".into(), serde_json::to_value(&cert).expect("serializable"));
    }
    let text = pretty(&Value::Object(m));
    match a.json {
        Some(path) => {
            write_text(Some(path), &text)?;
            println!("{summary}");
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn split(file: &Path, output: Option<&Path>) -> CliResult {
    let poset = read_poset(file)?.poset;
    let n = poset.len();
    let bp = BipartitePoset::new(poset.kimble_split(), (0..n).collect(), (n..2 * n).collect())?;
    write_text(output, &write_bipartite(&bp))
}

fn detect(file: &Path, k: usize) -> CliResult {
    if k == 0 {
        return Err(cli_failure("ArgumentError", "k must be positive"));
    }
    let poset = read_poset(file)?.poset;
    let found = poset.find_standard_example(k);
    let mut m = envelope("detect", None, json!({ "input": file.display().to_string(), "k": k }));
    m.insert("contains".into(), json!(found.is_some()));
    m.insert("embedding".into(), serde_json::to_value(&found).expect("serializable"));
    print!("{}", pretty(&Value::Object(m)));
    Ok(())
}

fn prob_lemma(t: usize, q: usize, r: usize, trials: usize, seed: u64) -> CliResult {
    let (freq, bound) = run_prob_lemma_trials(t, q, r, trials, seed)?;
    let mut m = envelope("prob-lemma", Some(seed), json!({ "t": t, "q": q, "r": r, "trials": trials }));
    m.insert("empirical_freq".into(), json!(freq));
    m.insert("analytic_bound".into(), json!(bound));
    print!("{}", pretty(&Value::Object(m)));
    Ok(())
}

fn scan_report(name: &str, args: &ScanArgs, violations: Vec<Violation>) -> CliResult {
    let mut m = envelope(
        &format!("experiment {name}"),
        Some(args.seed),
        json!({ "count": args.count }),
    );
    let found = violations.len();
    m.insert("violations".into(), serde_json::to_value(&violations).expect("serializable"));
    print!("{}", pretty(&Value::Object(m)));
    if found > 0 {
        return Err(cli_failure("ScanViolation", format!("{found} violations in the {name} scan")));
    }
    Ok(())
}

fn experiment(which: &Experiment) -> CliResult {
    match which {
        Experiment::Growth {
            k,
            sizes,
            samples,
            q,
            edge_prob,
            seed,
            threshold,
            csv,
            json,
        } => {
            let mut cfg = GrowthConfig::new(*k, sizes.clone(), *samples, *q, *edge_prob, *seed);
            if let Some(t) = threshold {
                cfg.base_threshold = *t;
            }
            let report = run_growth_experiment(&cfg)?;
            write_text(csv.as_deref(), &growth_csv(&report.records))?;
            if let Some(path) = json {
                let mut m = envelope("experiment growth", Some(*seed), serde_json::to_value(&cfg).expect("serializable"));
                m.insert("records".into(), serde_json::to_value(&report.records).expect("serializable"));
                m.insert("failures".into(), serde_json::to_value(&report.failures).expect("serializable"));
                write_text(Some(path), &pretty(&Value::Object(m)))?;
            }
            for f in &report.failures {
                eprintln!("sample {} at n = {} failed: {} ({})", f.sample, f.n, f.error, f.message);
            }
            Ok(())
        }
        Experiment::Hiraguchi(a) => scan_report("hiraguchi", a, run_hiraguchi_scan(a.count, a.seed)),
        Experiment::Sandwich(a) => scan_report("sandwich", a, run_split_sandwich_scan(a.count, a.seed)),
        Experiment::Dual(a) => scan_report("dual", a, run_dual_scan(a.count, a.seed)),
    }
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Gen {
            kind,
            seed,
            max_tries,
            output,
        } => gen(kind, *seed, *max_tries, output.as_deref()),
        Command::Dim {
            file,
            exact: _,
            budget,
            verify,
            json,
        } => dim(file, *budget, verify.as_deref(), *json),
        Command::Peel {
            file,
            k,
            q,
            threshold,
            seed,
            budget,
            general,
            json,
        } => peel(PeelArgs {
            file,
            cfg: PeelConfig {
                k: *k,
                q: *q,
                base_threshold: *threshold,
                seed: *seed,
                budget: *budget,
            },
            general: *general,
            json: json.as_deref(),
        }),
        Command::Split { file, output } => split(file, output.as_deref()),
        Command::Detect { file, k } => detect(file, *k),
        Command::ProbLemma { t, q, r, trials, seed } => prob_lemma(*t, *q, *r, *trials, *seed),
        Command::Experiment { which } => experiment(which),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let report = json!({ "error": f.name, "module": f.module, "message": f.message });
            eprintln!("{report}");
            ExitCode::from(1)
        }
    }
}
