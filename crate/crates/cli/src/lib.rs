//! Command-line front end for the invariant calculus.
//!
//! Every subcommand prints a single machine-readable document on standard
//! output: JSON with sorted keys for the computations, DOT for graph
//! export, and the line-oriented validation report for `verify`. All
//! diagnostics go to standard error. Exit codes: 0 success, 1 domain error
//! (invalid descriptor, hypothesis not carried, budget exceeded), 2
//! usage or syntax error.

use std::fmt::Write as _;
use std::fs;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qfi_core::descriptor::{BaseClass, FieldDescriptor, InvariantValue};
use qfi_core::error::Error;
use qfi_core::forms::{ClassForm, Tower, DEFAULT_ENUMERATION_CAP};
use qfi_core::oracle::{SampleMode, DEFAULT_WITNESS_BUDGET};
use qfi_core::{calculus, graphs, oracle};

#[derive(Debug, Parser)]
#[command(name = "qfi", version, about = "Quadratic-form invariants over field towers")]
pub struct Cli {
    /// Print a human-readable table instead of the machine document.
    #[arg(long, global = true)]
    pub human: bool,

    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Clone, Subcommand)]
pub enum CliCommand {
    /// Invariants (m, u, AU, layer) of a field descriptor.
    FieldInfo {
        /// Descriptor text, or @path to read it from a file.
        descriptor: String,
    },
    /// Decide a property of a diagonal form over a concrete tower.
    FormCheck {
        /// Tower as p,r (e.g. 5,1 for F_5((t1))).
        #[arg(long)]
        tower: String,
        /// Form literal, e.g. "[1,s,t1,s*t1]". Required for isotropic and
        /// universal checks; ignored by the tower-level au and radical checks.
        #[arg(long)]
        form: Option<String>,
        #[arg(long, value_enum)]
        check: CheckKind,
        /// Cap on the Laurent depth for the enumerating checks.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        max_r: u32,
    },
    /// Enumerate the dimensions of anisotropic universal forms of a tower.
    AuEnumerate {
        #[arg(long)]
        tower: String,
        /// Cap on the Laurent depth. r = 2 visits ~6.4k multisets; r = 3
        /// means 16 square classes and up to ~1.5e8 candidate forms.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        max_r: u32,
    },
    /// The Kaplansky radical of a tower.
    Radical {
        #[arg(long)]
        tower: String,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        max_r: u32,
    },
    /// All AU sets attainable over an n-local tower over a base.
    Attainable {
        #[arg(long)]
        n: u32,
        /// algclosed, finite, or custom:r:hyp.
        #[arg(long)]
        base: String,
    },
    /// The possible m-invariants over an n-local tower over a base.
    PossibleM {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        base: String,
    },
    /// A semi-global descriptor over an n-local tower with layer exactly j.
    LayerExample {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        base: String,
    },
    /// Cross-validate the decision engine against the oracles.
    Verify {
        #[arg(long)]
        tower: String,
        /// Inclusive dimension range, e.g. 1..4.
        #[arg(long)]
        dims: String,
        /// exhaustive, or random:N:SEED.
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        /// Exponent bound for the fallback witness enumeration.
        #[arg(long, default_value_t = 2)]
        degree_bound: i64,
    },
    /// DOT rendering of the root reduction graph of a semi-global descriptor.
    ExportGraph { descriptor: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Isotropic,
    Universal,
    Au,
    Radical,
}

impl CheckKind {
    fn name(self) -> &'static str {
        match self {
            CheckKind::Isotropic => "isotropic",
            CheckKind::Universal => "universal",
            CheckKind::Au => "au",
            CheckKind::Radical => "radical",
        }
    }
}

// ---------------------------------------------------------------------------
// Normalized commands
// ---------------------------------------------------------------------------

/// A parsed and validated command. Printing it with [`Command::to_args`]
/// and re-parsing yields a structurally equal value.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    FieldInfo {
        descriptor: FieldDescriptor,
    },
    FormCheck {
        tower: Tower,
        form: Option<ClassForm>,
        check: CheckKind,
        max_r: u32,
    },
    AuEnumerate {
        tower: Tower,
        max_r: u32,
    },
    Radical {
        tower: Tower,
        max_r: u32,
    },
    Attainable {
        n: u32,
        base: BaseClass,
    },
    PossibleM {
        n: u32,
        base: BaseClass,
    },
    LayerExample {
        n: u32,
        j: u32,
        base: BaseClass,
    },
    Verify {
        tower: Tower,
        dims: (usize, usize),
        mode: SampleMode,
        degree_bound: i64,
    },
    ExportGraph {
        descriptor: FieldDescriptor,
    },
}

impl Command {
    pub fn from_cli(cli: CliCommand) -> Result<Command, Error> {
        Ok(match cli {
            CliCommand::FieldInfo { descriptor } => Command::FieldInfo {
                descriptor: read_descriptor(&descriptor)?,
            },
            CliCommand::FormCheck {
                tower,
                form,
                check,
                max_r,
            } => {
                let tower = parse_tower(&tower)?;
                let form = match (form, check) {
                    (Some(text), _) => Some(tower.parse_form(&text)?),
                    (None, CheckKind::Au | CheckKind::Radical) => None,
                    (None, _) => {
                        return Err(Error::parse_usage(format!(
                            "--form is required for --check {}",
                            check.name()
                        )))
                    }
                };
                Command::FormCheck {
                    tower,
                    form,
                    check,
                    max_r,
                }
            }
            CliCommand::AuEnumerate { tower, max_r } => Command::AuEnumerate {
                tower: parse_tower(&tower)?,
                max_r,
            },
            CliCommand::Radical { tower, max_r } => Command::Radical {
                tower: parse_tower(&tower)?,
                max_r,
            },
            CliCommand::Attainable { n, base } => Command::Attainable {
                n,
                base: parse_base(&base)?,
            },
            CliCommand::PossibleM { n, base } => Command::PossibleM {
                n,
                base: parse_base(&base)?,
            },
            CliCommand::LayerExample { n, j, base } => Command::LayerExample {
                n,
                j,
                base: parse_base(&base)?,
            },
            CliCommand::Verify {
                tower,
                dims,
                mode,
                degree_bound,
            } => Command::Verify {
                tower: parse_tower(&tower)?,
                dims: parse_dims(&dims)?,
                mode: parse_mode(&mode)?,
                degree_bound,
            },
            CliCommand::ExportGraph { descriptor } => Command::ExportGraph {
                descriptor: read_descriptor(&descriptor)?,
            },
        })
    }

    /// The canonical argument vector that re-parses to this command.
    pub fn to_args(&self) -> Vec<String> {
        let s = |x: &str| x.to_string();
        match self {
            Command::FieldInfo { descriptor } => {
                vec![s("field-info"), descriptor.to_string()]
            }
            Command::FormCheck {
                tower,
                form,
                check,
                max_r,
            } => {
                let mut args = vec![s("form-check"), s("--tower"), tower.to_string()];
                if let Some(form) = form {
                    args.push(s("--form"));
                    args.push(form.to_string());
                }
                args.extend([
                    s("--check"),
                    s(check.name()),
                    s("--max-r"),
                    max_r.to_string(),
                ]);
                args
            }
            Command::AuEnumerate { tower, max_r } => vec![
                s("au-enumerate"),
                s("--tower"),
                tower.to_string(),
                s("--max-r"),
                max_r.to_string(),
            ],
            Command::Radical { tower, max_r } => vec![
                s("radical"),
                s("--tower"),
                tower.to_string(),
                s("--max-r"),
                max_r.to_string(),
            ],
            Command::Attainable { n, base } => vec![
                s("attainable"),
                s("--n"),
                n.to_string(),
                s("--base"),
                render_base(base),
            ],
            Command::PossibleM { n, base } => vec![
                s("possible-m"),
                s("--n"),
                n.to_string(),
                s("--base"),
                render_base(base),
            ],
            Command::LayerExample { n, j, base } => vec![
                s("layer-example"),
                s("--n"),
                n.to_string(),
                s("--j"),
                j.to_string(),
                s("--base"),
                render_base(base),
            ],
            Command::Verify {
                tower,
                dims,
                mode,
                degree_bound,
            } => vec![
                s("verify"),
                s("--tower"),
                tower.to_string(),
                s("--dims"),
                format!("{}..{}", dims.0, dims.1),
                s("--mode"),
                mode.to_string(),
                s("--degree-bound"),
                degree_bound.to_string(),
            ],
            Command::ExportGraph { descriptor } => {
                vec![s("export-graph"), descriptor.to_string()]
            }
        }
    }
}

trait UsageExt {
    fn parse_usage(message: String) -> Error;
}

impl UsageExt for Error {
    fn parse_usage(message: String) -> Error {
        Error::Parse {
            line: 0,
            col: 0,
            message,
        }
    }
}

// ---------------------------------------------------------------------------
// Flag parsing
// ---------------------------------------------------------------------------

fn read_descriptor(text: &str) -> Result<FieldDescriptor, Error> {
    let source = match text.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| {
            Error::parse_usage(format!("cannot read descriptor file {path}: {e}"))
        })?,
        None => text.to_string(),
    };
    qfi_core::parse_field(source.trim())
}

fn parse_tower(text: &str) -> Result<Tower, Error> {
    let (p, r) = text
        .split_once(',')
        .ok_or_else(|| Error::parse_usage(format!("--tower expects p,r; got `{text}`")))?;
    let p: u64 = p
        .trim()
        .parse()
        .map_err(|_| Error::parse_usage(format!("bad prime `{p}` in --tower")))?;
    let r: u32 = r
        .trim()
        .parse()
        .map_err(|_| Error::parse_usage(format!("bad depth `{r}` in --tower")))?;
    Tower::new(p, r)
}

fn parse_dims(text: &str) -> Result<(usize, usize), Error> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| Error::parse_usage(format!("--dims expects A..B; got `{text}`")))?;
    let lo: usize = a
        .trim()
        .parse()
        .map_err(|_| Error::parse_usage(format!("bad dimension `{a}`")))?;
    let hi: usize = b
        .trim()
        .parse()
        .map_err(|_| Error::parse_usage(format!("bad dimension `{b}`")))?;
    if lo < 1 || hi < lo {
        return Err(Error::parse_usage(format!("empty dimension range `{text}`")));
    }
    Ok((lo, hi))
}

fn parse_mode(text: &str) -> Result<SampleMode, Error> {
    if text == "exhaustive" {
        return Ok(SampleMode::Exhaustive);
    }
    if let Some(rest) = text.strip_prefix("random:") {
        if let Some((n, seed)) = rest.split_once(':') {
            let n = n
                .parse()
                .map_err(|_| Error::parse_usage(format!("bad sample count `{n}`")))?;
            let seed = seed
                .parse()
                .map_err(|_| Error::parse_usage(format!("bad seed `{seed}`")))?;
            return Ok(SampleMode::Random { n, seed });
        }
    }
    Err(Error::parse_usage(format!(
        "--mode expects exhaustive or random:N:SEED; got `{text}`"
    )))
}

fn parse_base(text: &str) -> Result<BaseClass, Error> {
    match text {
        "algclosed" => Ok(BaseClass::AlgebraicallyClosed),
        // any odd prime gives the same exponent; 3 is the representative
        "finite" => Ok(BaseClass::Finite(3)),
        other => {
            let parts: Vec<&str> = other.split(':').collect();
            if parts.len() == 3 && parts[0] == "custom" {
                let r: u32 = parts[1]
                    .parse()
                    .map_err(|_| Error::parse_usage(format!("bad exponent `{}`", parts[1])))?;
                let hyp: bool = parts[2]
                    .parse()
                    .map_err(|_| Error::parse_usage(format!("bad flag `{}`", parts[2])))?;
                return Ok(BaseClass::Custom {
                    r,
                    fnfield_hypothesis: hyp,
                });
            }
            Err(Error::parse_usage(format!(
                "--base expects algclosed, finite or custom:r:hyp; got `{other}`"
            )))
        }
    }
}

fn render_base(base: &BaseClass) -> String {
    match base {
        BaseClass::AlgebraicallyClosed => "algclosed".to_string(),
        BaseClass::Finite(_) => "finite".to_string(),
        BaseClass::Custom {
            r,
            fnfield_hypothesis,
        } => format!("custom:{r}:{fnfield_hypothesis}"),
    }
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

/// Runs a command and returns the full standard-output text.
pub fn run(command: &Command, human: bool) -> Result<String, Error> {
    match command {
        Command::FieldInfo { descriptor } => {
            let au = calculus::au_set(descriptor)?;
            let mut doc = serde_json::Map::new();
            doc.insert("descriptor".into(), json!(descriptor.to_string()));
            doc.insert("n".into(), json!(descriptor.cdvf_depth()));
            doc.insert(
                "au".into(),
                Value::Array(au.iter().map(|d| json!(d)).collect()),
            );
            doc.insert("m".into(), json!(au.min_dim()));
            doc.insert("u".into(), json!(au.max_dim()));
            if descriptor.is_ms_us_computable() {
                doc.insert("ms_us".into(), json!(descriptor.ms_us()?));
            }
            if matches!(descriptor, FieldDescriptor::SemiGlobal { .. }) {
                let layer = graphs::layer(descriptor)?;
                doc.insert("layer".into(), invariant_json(layer));
                doc.insert("fully_arboreal".into(), json!(layer.is_infinite()));
            }
            Ok(render_doc(Value::Object(doc), human))
        }
        Command::FormCheck {
            tower,
            form,
            check,
            max_r,
        } => {
            let mut doc = serde_json::Map::new();
            doc.insert("tower".into(), json!(tower.to_string()));
            doc.insert("check".into(), json!(check.name()));
            match (check, form) {
                (CheckKind::Isotropic, Some(q)) => {
                    let (res, depth) = tower.is_isotropic_with_depth(q);
                    doc.insert("form".into(), json!(q.to_string()));
                    doc.insert("result".into(), json!(res));
                    doc.insert("trace_depth".into(), json!(depth));
                }
                (CheckKind::Universal, Some(q)) => {
                    let mut depth = 0;
                    let mut res = true;
                    for a in tower.classes() {
                        let probe = q.appended(tower.minus_one().product(a));
                        let (iso, d) = tower.is_isotropic_with_depth(&probe);
                        depth = depth.max(d);
                        res &= iso;
                    }
                    doc.insert("form".into(), json!(q.to_string()));
                    doc.insert("result".into(), json!(res));
                    doc.insert("trace_depth".into(), json!(depth));
                }
                (CheckKind::Au, _) => {
                    let e = tower.au_enumerate(None, *max_r)?;
                    doc.insert(
                        "result".into(),
                        Value::Array(e.dims.iter().map(|d| json!(d)).collect()),
                    );
                    doc.insert("trace_depth".into(), json!(tower.r() + 1));
                }
                (CheckKind::Radical, _) => {
                    let rad = tower.kaplansky_radical(*max_r)?;
                    doc.insert(
                        "result".into(),
                        Value::Array(rad.iter().map(|c| json!(c.render())).collect()),
                    );
                    doc.insert("trace_depth".into(), json!(tower.r() + 1));
                }
                _ => unreachable!("form presence is checked during parsing"),
            }
            Ok(render_doc(Value::Object(doc), human))
        }
        Command::AuEnumerate { tower, max_r } => {
            let e = tower.au_enumerate(None, *max_r)?;
            let doc = json!({
                "tower": tower.to_string(),
                "au": e.dims.iter().collect::<Vec<_>>(),
                "m": e.m,
                "u": e.u,
                "max_dim": tower.class_count(),
            });
            Ok(render_doc(doc, human))
        }
        Command::Radical { tower, max_r } => {
            let rad = tower.kaplansky_radical(*max_r)?;
            let doc = json!({
                "tower": tower.to_string(),
                "radical": rad.iter().map(|c| c.render()).collect::<Vec<_>>(),
            });
            Ok(render_doc(doc, human))
        }
        Command::Attainable { n, base } => {
            let sets = graphs::attainable_au(*n, *base)?;
            let doc = json!({
                "base": render_base(base),
                "n": n,
                "count": sets.len(),
                "sets": sets
                    .iter()
                    .map(|s| s.iter().collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            });
            Ok(render_doc(doc, human))
        }
        Command::PossibleM { n, base } => {
            let values = calculus::possible_m(*n, *base)?;
            let doc = json!({
                "base": render_base(base),
                "n": n,
                "values": values.iter().collect::<Vec<_>>(),
            });
            Ok(render_doc(doc, human))
        }
        Command::LayerExample { n, j, base } => {
            let f = graphs::make_layer_example(*n, *j, *base)?;
            let layer = graphs::layer(&f)?;
            let m = graphs::m_from_layer(&f)?;
            let doc = json!({
                "base": render_base(base),
                "n": n,
                "j": j,
                "descriptor": f.to_string(),
                "layer": invariant_json(layer),
                "m": invariant_json(m),
            });
            Ok(render_doc(doc, human))
        }
        Command::Verify {
            tower,
            dims,
            mode,
            degree_bound,
        } => {
            let report =
                oracle::cross_validate(tower, *dims, *mode, *degree_bound, DEFAULT_WITNESS_BUDGET)?;
            Ok(report.to_string())
        }
        Command::ExportGraph { descriptor } => {
            let FieldDescriptor::SemiGlobal { model, .. } = descriptor else {
                return Err(Error::NotSemiGlobal {
                    got: descriptor.to_string(),
                });
            };
            Ok(model.reduction_graph()?.to_dot())
        }
    }
}

fn invariant_json(v: InvariantValue) -> Value {
    match v {
        InvariantValue::Finite(x) => json!(x),
        InvariantValue::Infinite => json!("inf"),
    }
}

fn render_doc(doc: Value, human: bool) -> String {
    if human {
        let mut out = String::new();
        render_human(&doc, "", &mut out);
        out
    } else {
        let mut text = serde_json::to_string_pretty(&doc).expect("documents serialize");
        text.push('\n');
        text
    }
}

fn render_human(value: &Value, prefix: &str, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                render_human(v, &key, out);
            }
        }
        other => {
            let _ = writeln!(out, "{prefix:<16} {other}");
        }
    }
}

/// Exit code for an error per the CLI contract.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } => 2,
        _ => 1,
    }
}
