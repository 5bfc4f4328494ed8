//! The `k3lat` command line. Exit codes: 0 success, 1 mathematical failure
//! (mismatch, no match, failing row), 2 usage or input error.

use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::binary::{class_number, enumerate_reduced, match_disc_form, EvenBinaryForm};
use crate::catalog::{repro_section4, repro_section5, repro_table1, Catalog};
use crate::error::Error;
use crate::finite_qf::FiniteQF;
use crate::lattice::discriminant_group;
use crate::ns_verify::{generators_report, Candidate, CurveConfig};
use crate::ternary::{decide_isotropy, is_simple_shioda_inose, IsotropyVerdict, TernaryForm};
use crate::text::read_gram_arg;
use crate::transcendental::{is_small_discriminant, transcendental_of_singular};

#[derive(Debug, Parser)]
#[command(
    name = "k3lat",
    version,
    about = "Lattice and quadratic form tools for K3 transcendental lattices"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List reduced forms (2a c; c 2b) of discriminant d = 4ab - c^2.
    Enumerate {
        #[arg(allow_negative_numbers = true)]
        d: i64,
    },
    /// Reduce a positive definite even binary form.
    Reduce { matrix: String },
    /// Decide SL2(Z)-equivalence of two binary forms.
    Equivalent { first: String, second: String },
    /// Number of classes of discriminant d.
    Classnum {
        #[arg(allow_negative_numbers = true)]
        d: i64,
    },
    /// Discriminant group and form of an even lattice.
    Discform { matrix: String },
    /// Reduced forms of discriminant d with the given discriminant form.
    Match {
        #[arg(allow_negative_numbers = true)]
        d: i64,
        form: String,
        /// Treat FORM as the Néron–Severi form and match its negation, requiring a unique result.
        #[arg(long)]
        ns: bool,
    },
    /// Smallness of a rank-3 discriminant.
    Small {
        #[arg(allow_negative_numbers = true)]
        d: i64,
    },
    /// Isotropy of a ternary form: witness, local obstruction or inconclusive.
    Isotropy {
        matrix: String,
        #[arg(long, default_value_t = 50)]
        bound: i64,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
    },
    /// Whether T(-1) is anisotropic for a rank-3 transcendental lattice T.
    Simple {
        matrix: String,
        #[arg(long, default_value_t = 50)]
        bound: i64,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
    },
    /// Parity criterion for embedding into U + U(2) + A2(-2).
    Hessian { matrix: String },
    /// CM points attached to a binary form.
    CmModuli { matrix: String },
    /// Check divisible classes against a labeled intersection matrix.
    NsCheck {
        config: String,
        /// File with one `coeffs / n` class per line.
        candidates: Option<String>,
        /// A single class `coeffs / n`; may be repeated.
        #[arg(long = "class")]
        classes: Vec<String>,
        /// Require -2 on the diagonal.
        #[arg(long)]
        rational_curves: bool,
    },
    /// Reproduce the stored table and the derived statements.
    Repro {
        target: ReproTarget,
        #[arg(long)]
        data: Option<String>,
        #[arg(long, default_value_t = 50)]
        bound: i64,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReproTarget {
    Table1,
    Section4,
    Section5,
    All,
}

enum Failure {
    Math,
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(Failure::Math) => 1,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Input(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn binary_arg(s: &str) -> std::result::Result<EvenBinaryForm, Failure> {
    Ok(EvenBinaryForm::from_gram(&read_gram_arg(s)?)?)
}

fn form_arg(s: &str) -> std::result::Result<FiniteQF, Failure> {
    Ok(s.parse::<FiniteQF>()?)
}

fn read_file(path: &str) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read `{path}`: {e}")))
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let json = cli.json;
    match &cli.command {
        Command::Enumerate { d } => {
            let forms = enumerate_reduced(*d)?;
            if json {
                emit(out, &forms.iter().map(|f| f.record()).collect::<Vec<_>>())?;
            } else {
                for f in &forms {
                    writeln!(out, "{f}")?;
                }
            }
        }
        Command::Reduce { matrix } => {
            let f = binary_arg(matrix)?;
            let (r, g) = f.reduce();
            if json {
                emit(
                    out,
                    &json!({ "input": f.record(), "reduced": r.record(), "transform": g.0 }),
                )?;
            } else {
                writeln!(out, "{r}")?;
                writeln!(out, "gamma = {:?}", g.0)?;
            }
        }
        Command::Equivalent { first, second } => {
            let (f, g) = (binary_arg(first)?, binary_arg(second)?);
            let t = f.equivalent(&g);
            if json {
                emit(
                    out,
                    &json!({ "equivalent": t.is_some(), "transform": t.map(|t| t.0) }),
                )?;
            } else {
                match t {
                    Some(t) => writeln!(out, "equivalent: true\ngamma = {:?}", t.0)?,
                    None => writeln!(out, "equivalent: false")?,
                }
            }
            if t.is_none() {
                return Err(Failure::Math);
            }
        }
        Command::Classnum { d } => {
            let h = class_number(*d)?;
            if json {
                emit(out, &json!({ "d": d, "class_number": h }))?;
            } else {
                writeln!(out, "{h}")?;
            }
        }
        Command::Discform { matrix } => {
            let g = read_gram_arg(matrix)?;
            let group = discriminant_group(&g)?;
            let q = FiniteQF::from_lattice(&g)?;
            let factors: Vec<String> = group
                .invariant_factors
                .iter()
                .map(|d| d.to_string())
                .collect();
            if json {
                emit(
                    out,
                    &json!({
                        "determinant": g.determinant().to_string(),
                        "invariant_factors": factors,
                        "generators": group.generators.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                        "form": q.to_string(),
                        "normalized": q.cyclic_normalize().to_string(),
                    }),
                )?;
            } else {
                writeln!(out, "determinant: {}", g.determinant())?;
                writeln!(out, "invariant factors: [{}]", factors.join(", "))?;
                for v in &group.generators {
                    writeln!(out, "generator: ({v})")?;
                }
                writeln!(out, "form: {q}")?;
                writeln!(out, "normalized: {}", q.cyclic_normalize())?;
            }
        }
        Command::Match { d, form, ns } => {
            let q = form_arg(form)?;
            let found = if *ns {
                match transcendental_of_singular(*d, &q) {
                    Ok(f) => vec![f],
                    Err(Error::NoMatch(_)) => vec![],
                    Err(e @ Error::Ambiguous { .. }) => {
                        writeln!(out, "{e}")?;
                        return Err(Failure::Math);
                    }
                    Err(e) => return Err(e.into()),
                }
            } else {
                match_disc_form(*d, &q)?
            };
            if json {
                emit(out, &found.iter().map(|f| f.record()).collect::<Vec<_>>())?;
            } else if found.is_empty() {
                writeln!(out, "no match")?;
            } else {
                for f in &found {
                    writeln!(out, "{f}")?;
                }
            }
            if found.is_empty() {
                return Err(Failure::Math);
            }
        }
        Command::Small { d } => {
            let small = is_small_discriminant(*d)?;
            if json {
                emit(out, &json!({ "d": d, "small": small }))?;
            } else {
                writeln!(out, "small: {small}")?;
            }
        }
        Command::Isotropy {
            matrix,
            bound,
            primes,
        } => {
            let f = TernaryForm::new(read_gram_arg(matrix)?)?;
            let v = decide_isotropy(&f, *bound, primes.as_deref());
            write_verdict(out, json, &v)?;
        }
        Command::Simple {
            matrix,
            bound,
            primes,
        } => {
            let v = is_simple_shioda_inose(&read_gram_arg(matrix)?, *bound, primes.as_deref())?;
            write_verdict(out, json, &v)?;
            if !v.is_obstruction() {
                return Err(Failure::Math);
            }
        }
        Command::Hessian { matrix } => {
            let f = binary_arg(matrix)?;
            let ok = f.hessian_embeddable();
            if json {
                emit(out, &json!({ "form": f.record(), "embeddable": ok }))?;
            } else {
                writeln!(out, "embeddable: {ok}")?;
            }
        }
        Command::CmModuli { matrix } => {
            let (t1, t2) = binary_arg(matrix)?.cm_moduli();
            if json {
                emit(out, &json!({ "tau1": t1, "tau2": t2 }))?;
            } else {
                writeln!(out, "tau1 = {t1}\ntau2 = {t2}")?;
            }
        }
        Command::NsCheck {
            config,
            candidates,
            classes,
            rational_curves,
        } => {
            let cfg = CurveConfig::parse(&read_file(config)?, *rational_curves)?;
            let mut cands = match candidates {
                Some(path) => Candidate::parse_list(&read_file(path)?)?,
                None => Vec::new(),
            };
            for c in classes {
                cands.push(Candidate::parse(c)?);
            }
            if cands.is_empty() {
                return Err(Failure::Input("no candidate classes given".into()));
            }
            let rep = generators_report(&cfg, &cands)?;
            if json {
                emit(out, &rep)?;
            } else {
                for c in &rep.classes {
                    match (&c.norm, &c.order) {
                        (Some(n), Some(o)) => {
                            writeln!(out, "{}: in dual, norm {n} mod 2Z, order {o}", c.class)?
                        }
                        _ => writeln!(out, "{}: not in dual", c.class)?,
                    }
                    for f in &c.failures {
                        writeln!(out, "  {f}")?;
                    }
                }
                writeln!(
                    out,
                    "subgroup order {} of {}: {}",
                    rep.subgroup_order,
                    rep.group_order,
                    if rep.generates {
                        "generates"
                    } else {
                        "proper subgroup"
                    }
                )?;
            }
            if rep.classes.iter().any(|c| !c.passed()) {
                return Err(Failure::Math);
            }
        }
        Command::Repro {
            target,
            data,
            bound,
            primes,
        } => {
            let cat = match data {
                Some(path) => Catalog::load(path)?,
                None => Catalog::embedded(),
            };
            let mut ok = true;
            let mut records = serde_json::Map::new();
            let want = |t: ReproTarget| *target == t || *target == ReproTarget::All;
            if want(ReproTarget::Table1) {
                let rep = repro_table1(&cat);
                ok &= rep.all_pass();
                if json {
                    records.insert(
                        "table1".into(),
                        serde_json::to_value(&rep).expect("serializable"),
                    );
                } else {
                    writeln!(out, "{rep}")?;
                }
            }
            if want(ReproTarget::Section4) {
                let rep = repro_section4(&cat, *bound, primes.as_deref());
                ok &= rep.all_pass();
                if json {
                    records.insert(
                        "section4".into(),
                        serde_json::to_value(&rep).expect("serializable"),
                    );
                } else {
                    writeln!(out, "{rep}")?;
                }
            }
            if want(ReproTarget::Section5) {
                let rep = repro_section5(&cat);
                ok &= rep.all_pass();
                if json {
                    records.insert(
                        "section5".into(),
                        serde_json::to_value(&rep).expect("serializable"),
                    );
                } else {
                    writeln!(out, "{rep}")?;
                }
            }
            if json {
                emit(out, &records)?;
            }
            if !ok {
                return Err(Failure::Math);
            }
        }
    }
    Ok(())
}

fn write_verdict(out: &mut dyn Write, json: bool, v: &IsotropyVerdict) -> Outcome {
    if json {
        return emit(out, v);
    }
    match v {
        IsotropyVerdict::Witness { witness } => writeln!(out, "witness: {witness:?}")?,
        IsotropyVerdict::Obstruction { prime, precision } => writeln!(
            out,
            "obstruction: no primitive zero mod {prime}^{precision}"
        )?,
        IsotropyVerdict::Inconclusive { bound, primes } => writeln!(
            out,
            "inconclusive: no zero with |v_i| <= {bound}, no obstruction at {primes:?}"
        )?,
    }
    Ok(())
}
