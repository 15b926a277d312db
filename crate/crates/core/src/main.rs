use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use coorbit::catalog;
use coorbit::classifier::{Analysis, Verdict};
use coorbit::report::{self, InputDigest, RunReport};
use coorbit::sampler::{self, WalkConfig};
use coorbit::{validate_algebra, AlgebraTable, Covector, Error, LieAlgebra, Result, Tolerances};

#[derive(Parser, Debug)]
#[command(name = "coorbit", version, about = "Classify coadjoint orbits of real Lie algebras")]
struct Cli {
    /// Emit a JSON run report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Relative rank tolerance.
    #[arg(long, global = true, value_name = "TOL")]
    tol_rank: Option<f64>,
    /// Numerical tolerance for annihilation and ideal tests.
    #[arg(long, global = true, value_name = "TOL")]
    tol_num: Option<f64>,
    /// Random seed for the sampler.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Include wall time in the JSON report.
    #[arg(long, global = true)]
    timing: bool,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check antisymmetry and the Jacobi identity.
    Validate { algebra: String },
    /// Radical, simple ideals, g_n and Levi factor.
    Structure { algebra: String },
    /// Fixed point / compact / unbounded verdict for a covector.
    Classify {
        algebra: String,
        #[command(flatten)]
        covector: CovectorArgs,
    },
    /// Search for a one-parameter unboundedness witness.
    Witness {
        algebra: String,
        #[command(flatten)]
        covector: CovectorArgs,
    },
    /// Random-walk the orbit and estimate boundedness.
    Sample {
        algebra: String,
        #[command(flatten)]
        covector: CovectorArgs,
        #[arg(long, default_value_t = sampler::DEFAULT_STEPS)]
        steps: usize,
        #[arg(long, default_value_t = sampler::DEFAULT_EPS)]
        eps: f64,
        #[arg(long, default_value_t = sampler::DEFAULT_ESCAPE_THRESHOLD)]
        escape_threshold: f64,
        /// Run one walk per seed in parallel.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Built-in algebras.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List,
    Show { name: String },
}

#[derive(Args, Debug)]
struct CovectorArgs {
    /// Comma-separated coordinates in the dual basis.
    #[arg(long, allow_hyphen_values = true)]
    covector: Option<String>,
    /// JSON file `{"f": [...]}`.
    #[arg(long)]
    covector_file: Option<PathBuf>,
}

struct Context {
    tol: Tolerances,
    inputs: Vec<InputDigest>,
}

impl Context {
    fn load_algebra(&mut self, arg: &str) -> Result<LieAlgebra> {
        let (label, text) = match arg.strip_prefix("catalog:") {
            Some(name) => (arg.to_string(), catalog::get(name)?.source.to_string()),
            None => (arg.to_string(), read(arg)?),
        };
        self.inputs.push(InputDigest::of(label, text.as_bytes()));
        let table = AlgebraTable::from_json(&text)?;
        validate_algebra(&table, &self.tol)
    }

    fn load_covector(&mut self, args: &CovectorArgs) -> Result<Covector> {
        match (&args.covector, &args.covector_file) {
            (Some(_), Some(_)) => Err(Error::InvalidInput(
                "give either --covector or --covector-file, not both".into(),
            )),
            (None, None) => Err(Error::InvalidInput("a covector is required".into())),
            (Some(inline), None) => {
                self.inputs.push(InputDigest::of("--covector", inline.as_bytes()));
                parse_inline(inline)
            }
            (None, Some(path)) => {
                let text = read(&path.to_string_lossy())?;
                self.inputs.push(InputDigest::of(path.to_string_lossy(), text.as_bytes()));
                parse_covector_file(&text)
            }
        }
    }
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {path}: {e}")))
}

fn parse_inline(text: &str) -> Result<Covector> {
    let coords = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse(format!("bad covector entry {s:?}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Covector::new(coords))
}

fn parse_covector_file(text: &str) -> Result<Covector> {
    #[derive(serde::Deserialize)]
    struct File {
        f: Vec<f64>,
    }
    let file: File = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(Covector::new(file.f))
}

fn check_dim(g: &LieAlgebra, f: &Covector) -> Result<()> {
    if g.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: f.dim(),
        });
    }
    Ok(())
}

fn fmt_num(x: f64) -> String {
    if x != 0.0 && !(1e-3..1e6).contains(&x.abs()) {
        format!("{x:.6e}")
    } else {
        format!("{x:.6}")
    }
}

fn fmt_vec(v: &nalgebra::DVector<f64>) -> String {
    let parts: Vec<String> = v.iter().map(|&x| fmt_num(x)).collect();
    format!("[{}]", parts.join(", "))
}

/// Runs one command; returns the JSON output and its text rendering.
fn execute(cli: &Cli, ctx: &mut Context) -> Result<(Value, String)> {
    match &cli.command {
        Command::Validate { algebra } => {
            let g = ctx.load_algebra(algebra)?;
            let text = format!(
                "{}: valid Lie algebra of dimension {} (Jacobi residual {:.3e})\n",
                g.name(),
                g.dim(),
                g.jacobi_residual()
            );
            Ok((report::validation_json(&g), text))
        }
        Command::Structure { algebra } => {
            let g = ctx.load_algebra(algebra)?;
            let an = Analysis::new(&g, &ctx.tol)?;
            let r = &an.report;
            let mut text = format!("{} (dim {})\n", g.name(), g.dim());
            text += &format!("  [g,g] dim      {}\n", r.derived.dim());
            text += &format!("  radical dim    {}\n", r.radical.dim());
            text += &format!("  semisimple dim {}\n", r.semisimple_dim());
            for (i, s) in r.simple_ideals.iter().enumerate() {
                let kind = if s.compact { "compact" } else { "non-compact" };
                text += &format!("  simple ideal {i}: dim {} {kind}\n", s.subspace.dim());
            }
            text += &format!("  g_n dim        {}\n", r.gn.dim());
            match &r.levi {
                Some(l) => text += &format!("  Levi factor    dim {} (residual {:.3e})\n", l.subspace.dim(), l.residual),
                None => text += "  Levi factor    not found\n",
            }
            Ok((report::structure_json(r), text))
        }
        Command::Classify { algebra, covector } => {
            let g = ctx.load_algebra(algebra)?;
            let f = ctx.load_covector(covector)?;
            check_dim(&g, &f)?;
            let an = Analysis::new(&g, &ctx.tol)?;
            let c = an.classify(&f)?;
            let embedding = if c.verdict.is_bounded() {
                an.decompose(&f)?.embedding
            } else {
                None
            };
            let mut text = format!("verdict: {}\norbit dim: {}\n", c.verdict.as_str(), c.orbit_dim);
            text += &format!("criterion residual: {:.3e}\n", c.criterion_residual);
            if let Some(f1) = &c.f1 {
                text += &format!("f1: {}\n", fmt_vec(&f1.0));
            }
            if let Some(p) = &c.compact_part {
                let dim = p.algebra.as_ref().map_or(0, |a| a.dim());
                text += &format!("compact part: dim {dim}, covector {}\n", fmt_vec(&p.covector.0));
            }
            if c.verdict == Verdict::Unbounded {
                text += &witness_text(c.witness.as_ref());
            }
            Ok((report::classification_json(&c, embedding.as_ref()), text))
        }
        Command::Witness { algebra, covector } => {
            let g = ctx.load_algebra(algebra)?;
            let f = ctx.load_covector(covector)?;
            check_dim(&g, &f)?;
            let an = Analysis::new(&g, &ctx.tol)?;
            let verdict = an.verdict(&f)?;
            let w = if verdict == Verdict::Unbounded { an.witness(&f)? } else { None };
            let mut text = format!("verdict: {}\n", verdict.as_str());
            text += &witness_text(w.as_ref());
            let out = json!({
                "verdict": verdict.as_str(),
                "witness": w.as_ref().map(report::witness_json),
            });
            Ok((out, text))
        }
        Command::Sample {
            algebra,
            covector,
            steps,
            eps,
            escape_threshold,
            seeds,
        } => {
            let g = ctx.load_algebra(algebra)?;
            let f = ctx.load_covector(covector)?;
            check_dim(&g, &f)?;
            let configs: Vec<WalkConfig> = seeds
                .clone()
                .unwrap_or_else(|| vec![cli.seed])
                .into_iter()
                .map(|s| WalkConfig {
                    seed: s,
                    eps: *eps,
                    steps: *steps,
                    escape_threshold: *escape_threshold,
                })
                .collect();
            let samples = sampler::sample_many(&g, &f, &configs)?;
            let mut text = String::new();
            let mut summaries = Vec::new();
            for s in &samples {
                let e = sampler::estimate_bounded(s);
                text += &format!(
                    "seed {}: {} (max norm {}, growth ratio {}, {} steps)\n",
                    s.config.seed,
                    e.status.as_str(),
                    fmt_num(s.max_norm),
                    fmt_num(e.growth_ratio),
                    s.points.len() - 1
                );
                summaries.push(report::sample_json(s, &e));
            }
            let out = if seeds.is_some() {
                Value::Array(summaries)
            } else {
                summaries.pop().expect("one walk")
            };
            Ok((out, text))
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                let names: Vec<&str> = catalog::names().collect();
                let mut text = String::new();
                for n in &names {
                    let e = catalog::get(n)?;
                    text += &format!("{n:<18} dim {:<3} {}\n", e.algebra.dim(), e.description);
                }
                Ok((json!(names), text))
            }
            CatalogAction::Show { name } => {
                let e = catalog::get(name)?;
                let v = report::catalog_entry_json(&e);
                let text = report::to_json_string(&v) + "\n";
                Ok((v, text))
            }
        },
    }
}

fn witness_text(w: Option<&coorbit::Witness>) -> String {
    match w {
        None => "witness: none\n".into(),
        Some(w) => {
            let growth = match (w.rate, w.degree) {
                (Some(r), _) => format!("rate {r:.6}"),
                (_, Some(d)) => format!("degree {d}"),
                _ => String::new(),
            };
            format!(
                "witness: {} {growth}, generator {}, growth at t=4: {}\n",
                w.kind.as_str(),
                fmt_vec(&w.generator.0),
                fmt_num(w.verified_growth)
            )
        }
    }
}

fn command_echo() -> Vec<String> {
    std::env::args().skip(1).filter(|a| a != "--timing").collect()
}

fn emit(cli: &Cli, content: &str) -> Result<()> {
    match &cli.output {
        Some(path) => fs::write(path, content)
            .map_err(|e| Error::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Internal(format!("cannot write output: {e}")))
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let mut tol = Tolerances::default();
    if let Some(t) = cli.tol_rank {
        tol.rank_rel = t;
    }
    if let Some(t) = cli.tol_num {
        tol.num = t;
    }
    if !(tol.rank_rel > 0.0 && tol.num > 0.0 && tol.rank_rel.is_finite() && tol.num.is_finite()) {
        return Err(Error::InvalidInput("tolerances must be positive and finite".into()));
    }
    let mut ctx = Context { tol, inputs: Vec::new() };
    let start = Instant::now();
    let (value, text) = execute(cli, &mut ctx)?;
    let content = if cli.json {
        let r = RunReport {
            command: command_echo(),
            inputs: ctx.inputs,
            output: value,
            tolerances: tol,
            wall_time_s: cli.timing.then(|| start.elapsed().as_secs_f64()),
        };
        r.to_json() + "\n"
    } else {
        text
    };
    emit(cli, &content)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| run(&cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(3),
    }
}
