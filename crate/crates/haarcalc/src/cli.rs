//! Command line verbs. Each verb builds a [`Report`]; `main` prints it.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use haarcalc_core::diagram::holonomy;
use haarcalc_core::gg::{gg_build, gg_pi0};
use haarcalc_core::haar::{check_axioms, glue, haq_membership, split, AxiomCase, HaarElement};
use haarcalc_core::ktheory::{k0_class, k1_class, k1_torsor_action};
use haarcalc_core::lca::{classify, structure_decompose};
use haarcalc_core::morphism::mod_of;
use haarcalc_core::ExactSequence;
use serde_json::{json, Value};

use crate::parse::{self, ParseError};
use crate::report::{exponents, positive_real, Report};
use crate::suite;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "haarcalc",
    version,
    about = "Exact Haar-measure bookkeeping on locally compact abelian groups"
)]
pub struct Cli {
    /// Seed for randomized suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub report: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and normalize a group expression.
    Parse {
        #[arg(long)]
        expr: String,
    },
    /// Vector-free, compact and discrete flags plus the structure decomposition.
    Classify {
        #[arg(long)]
        expr: String,
    },
    /// Module of an automorphism.
    Module {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        morphism: String,
    },
    /// K1 class of an automorphism of a vector-free group.
    K1 {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        morphism: String,
    },
    /// K0 class of a finite group.
    K0 {
        #[arg(long)]
        expr: String,
    },
    /// Defect of a catalog exact sequence.
    Defect {
        #[arg(long)]
        sequence: String,
    },
    /// Split a Haar measure on the middle term along a catalog sequence.
    Split {
        #[arg(long)]
        sequence: String,
        /// Scale of the measure on the middle term, relative to the canonical one.
        #[arg(long, default_value = "1")]
        scale: String,
    },
    /// Check one determinant-functor axiom on one instance.
    CheckAxioms {
        #[arg(long, value_parser = clap::value_parser!(u8).range(3..=5))]
        axiom: u8,
        #[arg(long)]
        expr: Option<String>,
        #[arg(long)]
        morphism: Option<String>,
        #[arg(long)]
        filtration: Option<String>,
        /// Second summand for axiom 5.
        #[arg(long)]
        other: Option<String>,
    },
    /// Holonomy of the cycles of a diagram file.
    Holonomy {
        #[arg(long)]
        file: PathBuf,
        /// A closed walk such as `0+,1-`; defaults to a cycle basis.
        #[arg(long)]
        cycle: Option<String>,
    },
    /// Whether a Haar measure is a rational multiple of the canonical one.
    Haq {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        scale: String,
    },
    /// Components of the truncated Gillet-Grayson complex.
    GgPi0 {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        max_length: u32,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Run a single criterion.
        #[arg(long)]
        only: Option<u32>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Compute(#[from] haarcalc_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn usage(what: &str, e: ParseError) -> CliError {
    CliError::Usage(format!("{what}: {e}"))
}

fn required<'a>(value: &'a Option<String>, flag: &str, axiom: u8) -> Result<&'a str, CliError> {
    value
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("axiom {axiom} needs --{flag}")))
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let mut r;
    match &cli.command {
        Command::Parse { expr } => {
            r = Report::new("parse");
            r.input("expr", expr.as_str());
            let x = parse::parse_expr(expr).map_err(|e| usage("expr", e))?;
            let atoms: Vec<Value> = x
                .atoms()
                .iter()
                .map(|(a, k)| json!({"atom": a.to_string(), "multiplicity": k}))
                .collect();
            r.results = json!({"normalized": x.to_string(), "atoms": atoms});
        }
        Command::Classify { expr } => {
            r = Report::new("classify");
            r.input("expr", expr.as_str());
            let x = parse::parse_expr(expr).map_err(|e| usage("expr", e))?;
            let c = classify(&x);
            let d = structure_decompose(&x)?;
            r.results = json!({
                "normalized": x.to_string(),
                "vector_free": c.vector_free,
                "compact": c.compact,
                "discrete": c.discrete,
                "real_rank": d.real_rank,
                "compact_open": d.compact_open.to_string(),
                "discrete_quotient": d.discrete.to_string(),
            });
            r.note_groups([&x]);
        }
        Command::Module { expr, morphism } => {
            r = Report::new("module");
            r.input("expr", expr.as_str())
                .input("morphism", morphism.as_str());
            let x = parse::parse_expr(expr).map_err(|e| usage("expr", e))?;
            let f = parse::parse_morphism(&x, morphism).map_err(|e| usage("morphism", e))?;
            let automorphism = f.validate_automorphism();
            r.verdict("automorphism", automorphism.is_ok());
            r.results = match automorphism {
                Ok(()) => json!({"module": positive_real(&mod_of(&f)?)}),
                Err(v) => json!({"violation": v.to_string()}),
            };
            r.note_groups([&x]);
        }
        Command::K1 { expr, morphism } => {
            r = Report::new("k1");
            r.input("expr", expr.as_str())
                .input("morphism", morphism.as_str());
            let x = parse::parse_expr(expr).map_err(|e| usage("expr", e))?;
            let f = parse::parse_morphism(&x, morphism).map_err(|e| usage("morphism", e))?;
            let k = k1_class(&f)?;
            let action = k1_torsor_action(&f)?;
            r.verdict("basechange of k1 equals module", action == mod_of(&f)?);
            r.results = json!({"k1": exponents(&k), "torsor_action": positive_real(&action)});
        }
        Command::K0 { expr } => {
            r = Report::new("k0");
            r.input("expr", expr.as_str());
            let x = parse::parse_expr(expr).map_err(|e| usage("expr", e))?;
            r.results = json!({"k0": exponents(&k0_class(&x)?)});
        }
        Command::Defect { sequence } => {
            r = Report::new("defect");
            r.input("sequence", sequence.as_str());
            let kind = parse::parse_sequence(sequence).map_err(|e| usage("sequence", e))?;
            let s = ExactSequence::make(kind)?;
            r.results = json!({
                "sub": s.sub().to_string(),
                "total": s.total().to_string(),
                "quot": s.quot().to_string(),
                "defect": positive_real(&s.defect()?),
            });
            r.note_groups([s.total()]);
        }
        Command::Split { sequence, scale } => {
            r = Report::new("split");
            r.input("sequence", sequence.as_str())
                .input("scale", scale.as_str());
            let kind = parse::parse_sequence(sequence).map_err(|e| usage("sequence", e))?;
            let a = parse::parse_positive_real(scale).map_err(|e| usage("scale", e))?;
            let s = ExactSequence::make(kind)?;
            let mu = HaarElement::canonical(s.total()).scaled(&a);
            let parts = split(&s, &mu)?;
            let back = glue(&s, &parts.sub, &parts.quot)?;
            r.verdict("glue inverts split", back == mu);
            r.results = json!({
                "total": mu.to_string(),
                "sub": {"group": parts.sub.group.to_string(), "scale": positive_real(&parts.sub.scale)},
                "quot": {"group": parts.quot.group.to_string(), "scale": positive_real(&parts.quot.scale)},
                "r": positive_real(&parts.r),
            });
            r.note_groups([s.total()]);
        }
        Command::CheckAxioms {
            axiom,
            expr,
            morphism,
            filtration,
            other,
        } => {
            r = Report::new("check-axioms");
            r.input("axiom", *axiom);
            let case = match axiom {
                3 => {
                    let (e, m) = (
                        required(expr, "expr", 3)?,
                        required(morphism, "morphism", 3)?,
                    );
                    r.input("expr", e).input("morphism", m);
                    let x = parse::parse_expr(e).map_err(|e| usage("expr", e))?;
                    AxiomCase::Axiom3(
                        parse::parse_morphism(&x, m).map_err(|e| usage("morphism", e))?,
                    )
                }
                4 => {
                    let f = required(filtration, "filtration", 4)?;
                    r.input("filtration", f);
                    AxiomCase::Axiom4(
                        parse::parse_filtration(f).map_err(|e| usage("filtration", e))?,
                    )
                }
                _ => {
                    let (e, o) = (required(expr, "expr", 5)?, required(other, "other", 5)?);
                    r.input("expr", e).input("other", o);
                    let a = parse::parse_expr(e).map_err(|e| usage("expr", e))?;
                    let b = parse::parse_expr(o).map_err(|e| usage("other", e))?;
                    AxiomCase::Axiom5(a, b)
                }
            };
            let out = check_axioms(&case)?;
            r.verdict(&format!("axiom {axiom}"), out.pass);
            r.results = json!({"case": out.case, "lhs": positive_real(&out.lhs), "rhs": positive_real(&out.rhs)});
        }
        Command::Holonomy { file, cycle } => {
            r = Report::new("holonomy");
            r.input("file", file.display().to_string());
            let text = std::fs::read_to_string(file)?;
            let d = parse::parse_diagram(&text).map_err(|e| usage("diagram", e))?;
            let cycles = match cycle {
                Some(c) => {
                    r.input("cycle", c.as_str());
                    vec![parse::parse_cycle(c).map_err(|e| usage("cycle", e))?]
                }
                None => d.cycle_basis(),
            };
            let mut rows = vec![];
            let mut all_rational = true;
            for c in &cycles {
                let h = holonomy(&d, c)?;
                all_rational &= h.is_rational();
                let walk: Vec<String> = c
                    .iter()
                    .map(|(i, fwd)| format!("{i}{}", if *fwd { '+' } else { '-' }))
                    .collect();
                rows.push(json!({"cycle": walk.join(","), "holonomy": positive_real(&h), "rational": h.is_rational()}));
            }
            r.verdict(
                "vector-free diagrams have rational holonomy",
                !d.is_vector_free() || all_rational,
            );
            r.results = json!({"vector_free": d.is_vector_free(), "cycles": rows, "rational": all_rational});
            r.note_groups(d.vertices());
        }
        Command::Haq { expr, scale } => {
            r = Report::new("haq");
            r.input("expr", expr.as_str())
                .input("scale", scale.as_str());
            let x = parse::parse_expr(expr).map_err(|e| usage("expr", e))?;
            let a = parse::parse_positive_real(scale).map_err(|e| usage("scale", e))?;
            let mu = HaarElement::canonical(&x).scaled(&a);
            r.results = json!({"measure": mu.to_string(), "member": haq_membership(&mu)?});
        }
        Command::GgPi0 { prime, max_length } => {
            r = Report::new("gg-pi0");
            r.input("prime", *prime).input("max_length", *max_length);
            let c = gg_build(*prime, *max_length)?;
            let p = gg_pi0(&c);
            let names: Vec<String> = c.objects().iter().map(ToString::to_string).collect();
            let components: Vec<Value> = p
                .components
                .iter()
                .zip(&p.differences)
                .map(|(comp, d)| {
                    let vertices: Vec<String> = comp
                        .iter()
                        .map(|&(a, b)| format!("({}, {})", names[a], names[b]))
                        .collect();
                    json!({"difference": d, "vertices": vertices})
                })
                .collect();
            let per_difference: serde_json::Map<String, Value> = p
                .components_per_difference
                .iter()
                .map(|(d, n)| (d.to_string(), json!(n)))
                .collect();
            r.verdict(
                "length difference constant on every edge",
                p.difference_constant && p.edges_checked == p.edge_count,
            );
            r.verdict(
                "(0,0) joined to (P,P) for every object",
                p.diagonal_connected,
            );
            r.results = json!({
                "objects": names,
                "vertex_count": p.vertex_count,
                "sequence_count": p.sequence_count,
                "edge_count": p.edge_count,
                "edges_checked": p.edges_checked,
                "component_count": p.components.len(),
                "components_per_difference": per_difference,
                "components": components,
            });
            let unmerged = p.unmerged();
            if !unmerged.is_empty() {
                r.notes.push(format!("length differences {unmerged:?} split into several components inside the truncation"));
            }
        }
        Command::Selftest { only } => {
            r = Report::new("selftest");
            let seed = cli.seed.unwrap_or(suite::DEFAULT_SEED);
            r.input("seed", seed);
            let criteria = match only {
                Some(id) => {
                    r.input("only", *id);
                    vec![suite::run_one(*id, seed).ok_or_else(|| {
                        CliError::Usage(format!("no criterion {id}; expected 1..=12"))
                    })?]
                }
                None => suite::run_all(seed),
            };
            for c in &criteria {
                r.verdict(&format!("{}. {}", c.id, c.name), c.pass);
            }
            r.results = suite::summary(seed, &criteria);
        }
    }
    if let Some(seed) = cli.seed {
        r.input("seed", seed);
    }
    Ok(r)
}

/// Runs the parsed command, writes its output, and returns the exit code.
pub fn execute(cli: &Cli) -> i32 {
    let report = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("haarcalc: {e}");
            return e.exit_code();
        }
    };
    let json = report.to_json();
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("haarcalc: cannot write {}: {e}", path.display());
            return 1;
        }
    }
    match cli.format {
        Format::Json => print!("{json}"),
        Format::Text => print!("{}", report.to_text()),
    }
    if report.pass() {
        0
    } else {
        1
    }
}
