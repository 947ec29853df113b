//! The `lapsim` command-line front end.
//!
//! Every subcommand reads an edge-list graph (or, for `validate`, a matrix),
//! calls the corresponding library routine and prints the result as TSV
//! (12 significant digits) or JSON (17 significant digits). Matrices carry a
//! header of node labels in input order.
//!
//! Exit status: 0 on success, 1 when a check finds a failure, 2 on input or
//! usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;

use crate::error::Error;
use crate::graph::{self, LaplacianMatrix, WeightedGraph};
use crate::resistance::{self, MetricMode};
use crate::schur;
use crate::simplex::{self, GramPair};
use crate::tolerance::Tolerances;

/// Residual above which `verify-identity` reports a failure.
pub const IDENTITY_TOL: f64 = 1e-8;

pub const TSV_DIGITS: usize = 12;
pub const JSON_DIGITS: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "lapsim",
    version,
    about = "Graph Laplacians, effective resistances and their simplices"
)]
pub struct Invocation {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Tsv, global = true)]
    pub format: Format,

    /// Override every validation tolerance (relative).
    #[arg(long, value_name = "X", global = true)]
    pub tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Edge-list file, or `-` for standard input.
    #[arg(value_name = "PATH")]
    pub path: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Laplacian matrix.
    Laplacian(Input),
    /// Pseudoinverse of the Laplacian.
    Pinv(Input),
    /// Effective resistance matrix.
    Resistance(Input),
    /// Simplex vertex coordinates, one column per node.
    Embed(Input),
    /// Dihedral-angle cosines and classification.
    Angles(Input),
    /// Kron-reduced Laplacian on the kept nodes.
    Reduce {
        #[command(flatten)]
        input: Input,
        /// Comma-separated labels of the nodes to keep.
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<String>,
    },
    /// Triangle-inequality check of the resistances.
    MetricCheck {
        #[command(flatten)]
        input: Input,
        /// Check square roots of the resistances instead.
        #[arg(long)]
        sqrt: bool,
    },
    /// Volume of the simplex from the Cayley-Menger determinant.
    Volume(Input),
    /// Residual of the bordered resistance/Laplacian inverse identity.
    VerifyIdentity(Input),
    /// Weighted spanning-tree count.
    SpanningTrees(Input),
    /// Diagonal of the pseudoinverse, circumcenter coordinates and circumradius.
    Blocks(Input),
    /// Check whether a matrix (TSV or JSON, as printed by this tool) is a Laplacian.
    Validate(Input),
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Num(f64),
    Int(usize),
    Bool(bool),
    Str(String),
    Nums(Vec<f64>),
    Strs(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
enum Document {
    Matrix {
        labels: Vec<String>,
        rows: Vec<Vec<f64>>,
    },
    /// Rendered as a plain table in TSV; `extra` only appears in JSON.
    Table {
        columns: Vec<String>,
        rows: Vec<Vec<Value>>,
        extra: Vec<(String, Value)>,
    },
    Fields(Vec<(String, Value)>),
}

/// Formats like C's `%.{digits}g`, with `-0` printed as `0`.
pub fn format_number(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_fraction(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn tsv_value(v: &Value) -> String {
    match v {
        Value::Num(x) => format_number(*x, TSV_DIGITS),
        Value::Int(i) => i.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) => s.clone(),
        Value::Nums(xs) => xs
            .iter()
            .map(|x| format_number(*x, TSV_DIGITS))
            .collect::<Vec<_>>()
            .join("\t"),
        Value::Strs(ss) => ss.join("\t"),
    }
}

fn json_num(x: f64) -> String {
    if x.is_finite() {
        format_number(x, JSON_DIGITS)
    } else {
        "null".to_string()
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn json_list<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    format!("[{}]", items.iter().map(f).collect::<Vec<_>>().join(","))
}

fn json_value(v: &Value) -> String {
    match v {
        Value::Num(x) => json_num(*x),
        Value::Int(i) => i.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) => json_str(s),
        Value::Nums(xs) => json_list(xs, |x| json_num(*x)),
        Value::Strs(ss) => json_list(ss, |s| json_str(s)),
    }
}

fn json_fields(fields: &[(String, Value)]) -> Vec<String> {
    fields
        .iter()
        .map(|(k, v)| format!("{}:{}", json_str(k), json_value(v)))
        .collect()
}

impl Document {
    fn matrix(labels: Vec<String>, m: &DMatrix<f64>) -> Self {
        let rows = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
        Document::Matrix { labels, rows }
    }

    fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match (self, format) {
            (Document::Matrix { labels, rows }, Format::Tsv) => {
                out.push_str(&labels.join("\t"));
                out.push('\n');
                for row in rows {
                    out.push_str(&tsv_value(&Value::Nums(row.clone())));
                    out.push('\n');
                }
            }
            (Document::Matrix { labels, rows }, Format::Json) => {
                out.push_str(&format!(
                    "{{\"labels\":{},\"rows\":{}}}\n",
                    json_value(&Value::Strs(labels.clone())),
                    json_list(rows, |r| json_value(&Value::Nums(r.clone())))
                ));
            }
            (Document::Table { columns, rows, .. }, Format::Tsv) => {
                out.push_str(&columns.join("\t"));
                out.push('\n');
                for row in rows {
                    out.push_str(&row.iter().map(tsv_value).collect::<Vec<_>>().join("\t"));
                    out.push('\n');
                }
            }
            (Document::Table { columns, rows, extra }, Format::Json) => {
                let mut parts = json_fields(extra);
                parts.push(format!(
                    "\"rows\":{}",
                    json_list(rows, |row| {
                        let fields: Vec<(String, Value)> = columns.iter().cloned().zip(row.iter().cloned()).collect();
                        format!("{{{}}}", json_fields(&fields).join(","))
                    })
                ));
                out.push_str(&format!("{{{}}}\n", parts.join(",")));
            }
            (Document::Fields(fields), Format::Tsv) => {
                for (k, v) in fields {
                    out.push_str(&format!("{k}\t{}\n", tsv_value(v)));
                }
            }
            (Document::Fields(fields), Format::Json) => {
                out.push_str(&format!("{{{}}}\n", json_fields(fields).join(",")));
            }
        }
        out
    }
}

/// What a subcommand produced: the document, an optional note for stderr and
/// whether its check passed.
struct Outcome {
    doc: Document,
    note: Option<String>,
    passed: bool,
}

impl Outcome {
    fn ok(doc: Document) -> Self {
        Outcome {
            doc,
            note: None,
            passed: true,
        }
    }
}

fn read_input(path: &str, stdin: &mut dyn Read) -> Result<String, String> {
    if path == "-" {
        let mut s = String::new();
        stdin
            .read_to_string(&mut s)
            .map_err(|e| format!("reading standard input: {e}"))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))
    }
}

/// Parses a matrix in either output format of this tool.
fn parse_matrix(text: &str) -> Result<(Vec<String>, DMatrix<f64>), String> {
    let (labels, rows): (Vec<String>, Vec<Vec<f64>>) = if text.trim_start().starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
        let labels = v["labels"]
            .as_array()
            .ok_or("missing \"labels\" array")?
            .iter()
            .map(|l| l.as_str().map(str::to_string).ok_or("labels must be strings"))
            .collect::<Result<_, _>>()?;
        let rows = v["rows"]
            .as_array()
            .ok_or("missing \"rows\" array")?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or("rows must be arrays")?
                    .iter()
                    .map(|x| x.as_f64().ok_or("matrix entries must be numbers"))
                    .collect::<Result<Vec<f64>, _>>()
            })
            .collect::<Result<_, _>>()?;
        (labels, rows)
    } else {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let labels = lines
            .next()
            .ok_or("empty matrix input")?
            .split('\t')
            .map(|s| s.trim().to_string())
            .collect();
        let rows = lines
            .enumerate()
            .map(|(r, line)| {
                line.split('\t')
                    .map(|x| {
                        x.trim()
                            .parse::<f64>()
                            .map_err(|_| format!("row {}: '{}' is not a number", r + 1, x.trim()))
                    })
                    .collect::<Result<Vec<f64>, _>>()
            })
            .collect::<Result<_, _>>()?;
        (labels, rows)
    };
    let n = labels.len();
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(format!("expected a {n}x{n} matrix matching the label header"));
    }
    Ok((labels, DMatrix::from_fn(n, n, |i, j| rows[i][j])))
}

fn property_key(p: graph::LaplacianProperty) -> String {
    p.name().replace([' ', '-'], "_")
}

fn graph_input(input: &Input, stdin: &mut dyn Read) -> Result<(WeightedGraph, LaplacianMatrix), String> {
    let text = read_input(&input.path, stdin)?;
    let g = graph::parse_graph(&text).map_err(|e| e.to_string())?;
    let q = graph::build_laplacian(&g);
    Ok((g, q))
}

fn labels_of(g: &WeightedGraph) -> Vec<String> {
    g.labels().to_vec()
}

fn execute(inv: &Invocation, stdin: &mut dyn Read) -> Result<Outcome, String> {
    let tol = inv.tol.map(Tolerances::uniform).unwrap_or_default();
    let lib = |e: Error| e.to_string();
    let outcome = match &inv.command {
        Command::Laplacian(input) => {
            let (g, q) = graph_input(input, stdin)?;
            Outcome::ok(Document::matrix(labels_of(&g), q.matrix()))
        }
        Command::Pinv(input) => {
            let (g, q) = graph_input(input, stdin)?;
            Outcome::ok(Document::matrix(labels_of(&g), q.pseudoinverse().map_err(lib)?))
        }
        Command::Resistance(input) => {
            let (g, q) = graph_input(input, stdin)?;
            let omega = resistance::resistance_matrix(&q).map_err(lib)?;
            Outcome::ok(Document::matrix(labels_of(&g), omega.matrix()))
        }
        Command::Embed(input) => {
            let (g, q) = graph_input(input, stdin)?;
            let s = simplex::embed_from_laplacian(&q).map_err(lib)?;
            Outcome::ok(Document::matrix(labels_of(&g), s.vertices()))
        }
        Command::Angles(input) => {
            let (g, q) = graph_input(input, stdin)?;
            let gp = GramPair::from_laplacian(&q).map_err(lib)?;
            let angles = simplex::dihedral_angles(&gp, &tol);
            let hyperacute = angles.obtuse().next().is_none();
            let rows = angles
                .angles
                .iter()
                .map(|a| {
                    vec![
                        Value::Str(g.labels()[a.i].clone()),
                        Value::Str(g.labels()[a.j].clone()),
                        Value::Num(a.cosine),
                        Value::Str(a.kind.to_string()),
                    ]
                })
                .collect();
            Outcome {
                doc: Document::Table {
                    columns: ["node_a", "node_b", "cosine", "kind"].map(String::from).to_vec(),
                    rows,
                    extra: vec![
                        ("hyperacute".to_string(), Value::Bool(hyperacute)),
                        ("tolerance".to_string(), Value::Num(angles.tolerance)),
                    ],
                },
                note: Some(format!(
                    "{} obtuse dihedral angles; hyperacute: {hyperacute}",
                    angles.obtuse().count()
                )),
                passed: true,
            }
        }
        Command::Reduce { input, keep } => {
            let (g, q) = graph_input(input, stdin)?;
            let kept = keep
                .iter()
                .map(|l| g.index_of(l).ok_or_else(|| Error::UnknownLabel(l.clone()).to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            let r = schur::schur_complement(&q, &kept).map_err(lib)?;
            let labels = kept.iter().map(|&i| g.labels()[i].clone()).collect();
            Outcome {
                doc: Document::matrix(labels, r.laplacian.matrix()),
                note: (r.clamped > 0).then(|| format!("{} rounding-level entries clamped to zero", r.clamped)),
                passed: true,
            }
        }
        Command::MetricCheck { input, sqrt } => {
            let (g, q) = graph_input(input, stdin)?;
            let mode = if *sqrt { MetricMode::Sqrt } else { MetricMode::Plain };
            let omega = resistance::resistance_matrix(&q).map_err(lib)?;
            let rep = resistance::check_metric(omega.matrix(), mode, &tol).map_err(lib)?;
            let worst = match rep.worst {
                Some(w) => Value::Strs(vec![
                    g.labels()[w.i].clone(),
                    g.labels()[w.j].clone(),
                    g.labels()[w.k].clone(),
                    format_number(w.excess, TSV_DIGITS),
                ]),
                None => Value::Str("-".to_string()),
            };
            let verdict = if rep.passed() { "pass" } else { "fail" };
            Outcome {
                doc: Document::Fields(vec![
                    ("mode".into(), Value::Str(mode.to_string())),
                    ("nodes".into(), Value::Int(rep.order)),
                    ("triples".into(), Value::Int(rep.triples_checked)),
                    ("violations".into(), Value::Int(rep.violations)),
                    ("indiscernible_pairs".into(), Value::Int(rep.indiscernible_pairs)),
                    ("slack".into(), Value::Num(rep.slack)),
                    ("worst".into(), worst),
                    ("verdict".into(), Value::Str(verdict.into())),
                ]),
                note: Some(format!(
                    "metric check ({mode}): {} violations in {} triples",
                    rep.violations, rep.triples_checked
                )),
                passed: rep.passed(),
            }
        }
        Command::Volume(input) => {
            let (_, q) = graph_input(input, stdin)?;
            let omega = resistance::resistance_matrix(&q).map_err(lib)?;
            let vol = simplex::cayley_menger_volume(&omega.to_distances()).map_err(lib)?;
            Outcome::ok(Document::Fields(vec![("volume".into(), Value::Num(vol))]))
        }
        Command::VerifyIdentity(input) => {
            let (_, q) = graph_input(input, stdin)?;
            let res = resistance::verify_fiedler_identity(&q).map_err(lib)?;
            let passed = res.max() <= IDENTITY_TOL;
            Outcome {
                doc: Document::Fields(vec![
                    ("residual_ab".into(), Value::Num(res.left)),
                    ("residual_ba".into(), Value::Num(res.right)),
                    ("threshold".into(), Value::Num(IDENTITY_TOL)),
                    (
                        "verdict".into(),
                        Value::Str(if passed { "pass" } else { "fail" }.into()),
                    ),
                ]),
                note: Some(format!("identity residual {res}")),
                passed,
            }
        }
        Command::SpanningTrees(input) => {
            let (_, q) = graph_input(input, stdin)?;
            let count = graph::spanning_tree_count(&q).map_err(lib)?;
            Outcome::ok(Document::Fields(vec![("spanning_trees".into(), Value::Num(count))]))
        }
        Command::Blocks(input) => {
            let (g, q) = graph_input(input, stdin)?;
            let b = resistance::fiedler_blocks(&q).map_err(lib)?;
            Outcome::ok(Document::Fields(vec![
                ("labels".into(), Value::Strs(labels_of(&g))),
                ("zeta".into(), Value::Nums(b.zeta.iter().copied().collect())),
                ("r".into(), Value::Nums(b.r.iter().copied().collect())),
                ("radius".into(), Value::Num(b.radius)),
            ]))
        }
        Command::Validate(input) => {
            let text = read_input(&input.path, stdin)?;
            let (_, m) = parse_matrix(&text)?;
            let rep = graph::validate_laplacian(&m, &tol).map_err(lib)?;
            let mut fields: Vec<(String, Value)> = rep
                .checks
                .iter()
                .map(|c| {
                    (
                        property_key(c.property),
                        Value::Str(if c.passed { "pass" } else { "fail" }.into()),
                    )
                })
                .collect();
            fields.push(("laplacian".into(), Value::Bool(rep.passed())));
            fields.push(("spectral_verdict".into(), Value::Bool(rep.spectral_verdict())));
            fields.push(("consistent".into(), Value::Bool(rep.consistent())));
            Outcome {
                doc: Document::Fields(fields),
                note: (!rep.passed()).then(|| format!("not a Laplacian: failed {}", rep.failure_summary())),
                passed: rep.passed(),
            }
        }
    };
    Ok(outcome)
}

/// Runs one invocation and returns the process exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let inv = match Invocation::try_parse_from(args) {
        Ok(inv) => inv,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    if let Some(t) = inv.tol {
        if !(t.is_finite() && t > 0.0) {
            let _ = writeln!(stderr, "error: --tol must be positive and finite");
            return 2;
        }
    }
    match execute(&inv, stdin) {
        Ok(outcome) => {
            if stdout.write_all(outcome.doc.render(inv.format).as_bytes()).is_err() {
                return 2;
            }
            if let Some(note) = outcome.note {
                let _ = writeln!(stderr, "{note}");
            }
            if outcome.passed {
                0
            } else {
                1
            }
        }
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
    }
}
