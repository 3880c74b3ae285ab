//! `focklab`: command-line driver for the operator laboratory.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use focklab::analysis::{
    berezin, berezin_bound_check, commutator_report, converse_search, decay_table_csv, defect_sequence,
    hs_partial_sum, BerezinSubject,
};
use focklab::graph::{symbol_to_params, DEFAULT_EPS};
use focklab::operator::apply_exact;
use focklab::{verify, Error, FockVector, FockWeight, HGraph, HarmonicSymbol, OperatorKind, SampledSymbol, TruncatedOperator};
use num_complex::Complex64;
use serde_json::json;

const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(name = "focklab", version, about = "Toeplitz, Hankel and H-Toeplitz operators on the Fock space")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,

    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand. Flags win over `FOCKLAB_*`
/// environment variables, which win over defaults.
#[derive(Args)]
struct RunConfig {
    /// Weight of the Gaussian measure.
    #[arg(long, global = true, env = "FOCKLAB_ALPHA", default_value_t = 1.0)]
    alpha: f64,

    /// Comparison tolerance for verdicts.
    #[arg(long, global = true, env = "FOCKLAB_TOL", default_value_t = 1e-10)]
    tol: f64,

    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, env = "FOCKLAB_FORMAT")]
    format: Option<Format>,

    /// Write to this file instead of stdout.
    #[arg(long, short, global = true, env = "FOCKLAB_OUTPUT")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Toeplitz,
    Hankel,
    Htoeplitz,
}

impl From<KindArg> for OperatorKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Toeplitz => OperatorKind::Toeplitz,
            KindArg::Hankel => OperatorKind::Hankel,
            KindArg::Htoeplitz => OperatorKind::HToeplitz,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print a truncated operator matrix.
    Matrix {
        #[arg(long)]
        symbol: String,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
    },
    /// Apply an operator exactly to a finite vector.
    Apply {
        #[arg(long)]
        symbol: String,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Coefficients as JSON `[[index, re, im], ...]`.
        #[arg(long)]
        vector: String,
    },
    /// Commutator of two H-Toeplitz operators on a leading block.
    Commutator {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        psi: String,
        #[arg(long, env = "FOCKLAB_BLOCK", default_value_t = 8)]
        block: usize,
        /// Also run this many random trials searching for commuting
        /// independent pairs.
        #[arg(long, default_value_t = 0)]
        search: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Partial Hilbert–Schmidt sums of an H-Toeplitz operator.
    Hsnorm {
        #[arg(long)]
        symbol: String,
        /// Column counts, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        ncols: Vec<usize>,
    },
    /// Compactness defect sequence d_0 .. d_nmax.
    Defect {
        #[arg(long)]
        symbol: String,
        #[arg(long, env = "FOCKLAB_NMAX", default_value_t = 40)]
        nmax: usize,
    },
    /// Berezin transform at sample radii along a ray.
    Berezin {
        /// Polynomial symbol; mutually exclusive with --disk.
        #[arg(long, conflicts_with = "disk", required_unless_present = "disk")]
        symbol: Option<String>,
        /// Indicator of the disk of this radius.
        #[arg(long)]
        disk: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5")]
        radii: Vec<f64>,
        /// Argument of the sample ray, in radians.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        angle: f64,
        /// Compare the samples with the symbol's sup norm.
        #[arg(long)]
        bound_check: bool,
    },
    /// Directed graph from a symbol or from offset lists.
    Graph {
        #[arg(long, conflicts_with_all = ["xs", "ys"])]
        symbol: Option<String>,
        #[arg(long, value_delimiter = ',')]
        xs: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        ys: Vec<usize>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
    },
    /// Run the full closed-form versus oracle suite.
    Verify,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    body: serde_json::Value,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_resource_limit() {
            EXIT_RESOURCE
        } else if matches!(e, Error::Unstable { .. }) {
            EXIT_VERIFY
        } else {
            EXIT_INPUT
        };
        let mut body = json!({ "kind": e.kind(), "message": e.to_string() });
        if let Error::Parse(p) = &e {
            body["position"] = json!(p.position);
        }
        Failure { code, body }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        body: json!({ "kind": "invalid_argument", "message": message.into() }),
    }
}

fn parse_symbol(text: &str) -> Result<HarmonicSymbol, Failure> {
    Ok(HarmonicSymbol::parse(text).map_err(Error::from)?)
}

fn parse_vector(text: &str, w: FockWeight) -> Result<FockVector, Failure> {
    let raw: Vec<(usize, f64, f64)> =
        serde_json::from_str(text).map_err(|e| input_error(format!("vector must be [[index, re, im], ...]: {e}")))?;
    Ok(FockVector::from_coeffs(raw.into_iter().map(|(n, re, im)| (n, Complex64::new(re, im))), w))
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn vector_json(v: &FockVector) -> serde_json::Value {
    json!(v.iter().map(|(n, c)| json!([n, c.re, c.im])).collect::<Vec<_>>())
}

fn reject_format(f: Format, allowed: &[Format]) -> Result<(), Failure> {
    if allowed.contains(&f) {
        Ok(())
    } else {
        Err(input_error("output format not supported by this subcommand"))
    }
}

/// Produces the full output text and the exit code.
fn run(cli: &Cli) -> Result<(String, u8), Failure> {
    let cfg = &cli.config;
    let w = FockWeight::new(cfg.alpha)?;
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(input_error("tolerance must be a positive number"));
    }
    match &cli.command {
        Command::Matrix { symbol, kind, rows, cols } => {
            let format = cfg.format.unwrap_or(Format::Csv);
            reject_format(format, &[Format::Csv, Format::Json])?;
            let phi = parse_symbol(symbol)?;
            let op = TruncatedOperator::build((*kind).into(), &phi, *rows, *cols, w)?;
            let text = match format {
                Format::Json => {
                    let mut s = op.to_json();
                    s.push('\n');
                    s
                }
                _ => op.to_csv(),
            };
            Ok((text, 0))
        }
        Command::Apply { symbol, kind, vector } => {
            let format = cfg.format.unwrap_or(Format::Json);
            reject_format(format, &[Format::Json, Format::Csv])?;
            let phi = parse_symbol(symbol)?;
            let f = parse_vector(vector, w)?;
            let out = apply_exact((*kind).into(), &phi, &f)?;
            let text = if format == Format::Csv {
                let mut s = String::from("n,re,im\n");
                for (n, c) in out.iter() {
                    s.push_str(&format!("{n},{:.16e},{:.16e}\n", c.re, c.im));
                }
                s
            } else {
                pretty(&json!({
                    "kind": OperatorKind::from(*kind).name(),
                    "alpha": cfg.alpha,
                    "symbol": phi.render(),
                    "input": vector_json(&f),
                    "output": vector_json(&out),
                }))
            };
            Ok((text, 0))
        }
        Command::Commutator { phi, psi, block, search, seed } => {
            reject_format(cfg.format.unwrap_or(Format::Json), &[Format::Json])?;
            let (p, q) = (parse_symbol(phi)?, parse_symbol(psi)?);
            let report = commutator_report(&p, &q, *block, w, cfg.tol)?;
            let mut body = json!({ "phi": p.render(), "psi": q.render(), "alpha": cfg.alpha, "report": report });
            if *search > 0 {
                let max_degree = p.analytic_degree().max(p.anti_degree()).max(1) as usize;
                body["converse_search"] = json!(converse_search(*search, max_degree, *block, *seed, w, cfg.tol)?);
            }
            Ok((pretty(&body), 0))
        }
        Command::Hsnorm { symbol, ncols } => {
            reject_format(cfg.format.unwrap_or(Format::Json), &[Format::Json])?;
            let phi = parse_symbol(symbol)?;
            let sums = ncols.iter().map(|&n| hs_partial_sum(&phi, n, w)).collect::<Result<Vec<_>, _>>()?;
            Ok((
                pretty(&json!({ "symbol": phi.render(), "alpha": cfg.alpha, "ncols": ncols, "partial_sums": sums })),
                0,
            ))
        }
        Command::Defect { symbol, nmax } => {
            let format = cfg.format.unwrap_or(Format::Json);
            reject_format(format, &[Format::Json, Format::Csv])?;
            let phi = parse_symbol(symbol)?;
            let seq = defect_sequence(&phi, nmax + 1, w, cfg.tol)?;
            let text = if format == Format::Csv {
                let mut s = String::from("n,value\n");
                for (n, d) in seq.values.iter().enumerate() {
                    s.push_str(&format!("{n},{d:.16e}\n"));
                }
                s
            } else {
                pretty(&json!({ "symbol": phi.render(), "alpha": cfg.alpha, "defect": seq }))
            };
            Ok((text, 0))
        }
        Command::Berezin { symbol, disk, radii, angle, bound_check } => {
            let format = cfg.format.unwrap_or(Format::Json);
            reject_format(format, &[Format::Json, Format::Csv])?;
            if radii.iter().any(|r| !r.is_finite() || *r < 0.0) {
                return Err(input_error("radii must be finite and non-negative"));
            }
            let points: Vec<Complex64> = radii.iter().map(|&r| Complex64::from_polar(r, *angle)).collect();
            let subject = match (symbol, disk) {
                (Some(s), _) => BerezinSubject::Polynomial(parse_symbol(s)?),
                (None, Some(r)) if r.is_finite() && *r > 0.0 => BerezinSubject::Sampled(SampledSymbol::indicator_disk(*r)),
                _ => return Err(input_error("disk radius must be positive")),
            };
            let (values, bound) = match (&subject, bound_check) {
                (BerezinSubject::Polynomial(phi), false) => {
                    let v = points.iter().map(|&z| berezin(phi, z, w)).collect::<Result<Vec<_>, _>>()?;
                    (v, None)
                }
                _ => {
                    let report = berezin_bound_check(&subject, &points, w)?;
                    (report.samples.iter().map(|s| s.1).collect(), Some(report))
                }
            };
            let failed = bound.as_ref().is_some_and(|b| !b.within_bound);
            let text = if format == Format::Csv {
                let rows: Vec<(f64, f64)> = radii.iter().copied().zip(values.iter().map(|v| v.norm())).collect();
                decay_table_csv(&rows)
            } else {
                let samples: Vec<_> = radii
                    .iter()
                    .zip(&values)
                    .map(|(r, v)| json!({ "radius": r, "value": [v.re, v.im] }))
                    .collect();
                let mut body = json!({ "alpha": cfg.alpha, "angle": angle, "samples": samples });
                if let Some(b) = bound {
                    body["bound_check"] = json!(b);
                }
                pretty(&body)
            };
            Ok((text, if failed { EXIT_VERIFY } else { 0 }))
        }
        Command::Graph { symbol, xs, ys, n, eps } => {
            let format = cfg.format.unwrap_or(Format::Dot);
            reject_format(format, &[Format::Dot, Format::Csv, Format::Json])?;
            let (g, params, literal) = match symbol {
                Some(s) => {
                    let phi = parse_symbol(s)?;
                    let g = HGraph::from_symbol(&phi, *n, *eps, w)?;
                    let params = symbol_to_params(&phi);
                    let positive_xs: Vec<usize> = params.xs.iter().copied().filter(|&x| x > 0 && x < *n).collect();
                    let positive_ys: Vec<usize> = params.ys.iter().copied().filter(|&y| y < *n).collect();
                    let literal = HGraph::from_params(*n, &positive_xs, &positive_ys)?;
                    (g, Some(params), Some(literal))
                }
                None => (HGraph::from_params(*n, xs, ys)?, None, None),
            };
            let text = match format {
                Format::Csv => g.to_csv(),
                Format::Json => {
                    let mut body = json!({ "graph": g, "degrees": g.degree_report() });
                    if let (Some(p), Some(lit)) = (params, literal) {
                        body["params"] = json!({ "xs": p.xs, "ys": p.ys, "has_zero_offset": p.has_zero_offset, "caption": p.caption() });
                        body["offset_rule_comparison"] = json!(g.compare(&lit)?);
                    }
                    pretty(&body)
                }
                _ => g.to_dot(),
            };
            Ok((text, 0))
        }
        Command::Verify => {
            let format = cfg.format.unwrap_or(Format::Text);
            reject_format(format, &[Format::Text, Format::Json])?;
            let outcomes = verify::run_all();
            let ok = outcomes.iter().all(|o| o.passed);
            let text = if format == Format::Json {
                pretty(&json!({ "passed": ok, "checks": outcomes }))
            } else {
                verify::render_table(&outcomes)
            };
            Ok((text, if ok { 0 } else { EXIT_VERIFY }))
        }
    }
}

fn emit_error(f: &Failure) -> ExitCode {
    eprintln!("{}", json!({ "error": f.body }));
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            return emit_error(&Failure {
                code: EXIT_INPUT,
                body: json!({ "kind": "usage", "message": e.to_string().trim_end() }),
            })
        }
    };
    let (text, code) = match run(&cli) {
        Ok(r) => r,
        Err(f) => return emit_error(&f),
    };
    let written = match &cli.config.output {
        Some(path) => std::fs::write(path, &text).map_err(|e| Failure {
            code: EXIT_RESOURCE,
            body: json!({ "kind": "io", "message": format!("cannot write {}: {e}", path.display()) }),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(f) = written {
        return emit_error(&f);
    }
    ExitCode::from(code)
}
