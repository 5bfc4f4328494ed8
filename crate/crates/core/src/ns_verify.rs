//! Bookkeeping for divisible classes in a lattice spanned by named curves.
//!
//! Config file:
//!
//! ```text
//! # names line, then the intersection matrix
//! names: M1 M2 M3
//! -2 0 0
//! 0 -2 0
//! 0 0 -2
//! ```
//!
//! Candidate file: one class per line as `c1 c2 ... / n`, optionally with a
//! `label:` prefix.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::fmt_rat;
use crate::error::{Error, Result};
use crate::lattice::{
    is_dual_vector, order_in_quotient, qnorm_mod2z, smith_normal_form, GramMatrix, RationalVector,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveConfig {
    pub names: Vec<String>,
    pub gram: GramMatrix,
}

impl CurveConfig {
    /// With `rational_curves`, every diagonal entry must be `-2`.
    pub fn new(names: Vec<String>, gram: GramMatrix, rational_curves: bool) -> Result<Self> {
        if names.len() != gram.rank() {
            return Err(Error::DimensionMismatch {
                expected: gram.rank(),
                found: names.len(),
            });
        }
        if rational_curves {
            if let Some(i) = (0..gram.rank()).find(|&i| gram.get(i, i) != -2) {
                return Err(Error::Parse(format!(
                    "curve {} has self-intersection {}, expected -2",
                    names[i],
                    gram.get(i, i)
                )));
            }
        }
        Ok(CurveConfig { names, gram })
    }

    pub fn parse(text: &str, rational_curves: bool) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing names line".into()))?;
        let names_part = header.strip_prefix("names:").unwrap_or(header);
        let names: Vec<String> = names_part.split_whitespace().map(String::from).collect();
        let rows = lines
            .map(|l| {
                l.split_whitespace()
                    .map(|t| {
                        t.parse::<i64>()
                            .map_err(|_| Error::Parse(format!("bad entry `{t}`")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if rows.len() != names.len() {
            return Err(Error::DimensionMismatch {
                expected: names.len(),
                found: rows.len(),
            });
        }
        CurveConfig::new(names, GramMatrix::new(rows)?, rational_curves)
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    /// `sum c_i name_i / n`, for display.
    pub fn describe(&self, cand: &Candidate) -> String {
        let terms: Vec<String> = cand
            .coeffs
            .iter()
            .zip(&self.names)
            .filter(|(c, _)| **c != 0)
            .map(|(c, name)| match c {
                1 => name.clone(),
                -1 => format!("-{name}"),
                c => format!("{c}{name}"),
            })
            .collect();
        let sum = if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+").replace("+-", "-")
        };
        if cand.n == 1 {
            sum
        } else {
            format!("({sum})/{}", cand.n)
        }
    }
}

/// The class `coeffs / n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub label: Option<String>,
    pub coeffs: Vec<i64>,
    pub n: i64,
}

impl Candidate {
    pub fn new(coeffs: Vec<i64>, n: i64) -> Self {
        Candidate {
            label: None,
            coeffs,
            n,
        }
    }

    /// `[label:] c1 c2 ... / n`; a missing `/ n` means `n = 1`.
    pub fn parse(line: &str) -> Result<Self> {
        let (label, body) = match line.split_once(':') {
            Some((l, b)) => (Some(l.trim().to_string()), b),
            None => (None, line),
        };
        let (coeff_part, n_part) = body.split_once('/').unwrap_or((body, "1"));
        let bad = |t: &str| Error::Parse(format!("bad candidate token `{t}` in `{line}`"));
        let coeffs = coeff_part
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| bad(t)))
            .collect::<Result<Vec<_>>>()?;
        let n_str = n_part.trim();
        let n: i64 = n_str.parse().map_err(|_| bad(n_str))?;
        if n < 1 {
            return Err(Error::Parse(format!(
                "divisor must be positive in `{line}`"
            )));
        }
        Ok(Candidate { label, coeffs, n })
    }

    pub fn parse_list(text: &str) -> Result<Vec<Self>> {
        text.lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(Candidate::parse)
            .collect()
    }

    fn vector(&self) -> RationalVector {
        RationalVector::from_fraction(&self.coeffs, self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub class: String,
    pub in_dual: bool,
    /// Square mod 2Z, present when the class is in the dual.
    pub norm: Option<String>,
    /// Order in the discriminant group, present when the class is in the dual.
    pub order: Option<String>,
    pub failures: Vec<String>,
}

impl ClassReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn check_divisible_class(cfg: &CurveConfig, cand: &Candidate) -> Result<ClassReport> {
    if cand.coeffs.len() != cfg.rank() {
        return Err(Error::DimensionMismatch {
            expected: cfg.rank(),
            found: cand.coeffs.len(),
        });
    }
    let v = cand.vector();
    let in_dual = is_dual_vector(&cfg.gram, &v)?;
    let mut failures = Vec::new();
    let (norm, order) = if in_dual {
        (
            Some(fmt_rat(&qnorm_mod2z(&cfg.gram, &v)?)),
            Some(order_in_quotient(&cfg.gram, &v)?.to_string()),
        )
    } else {
        let g = &cfg.gram;
        for (i, name) in cfg.names.iter().enumerate() {
            let dot: i128 = (0..cfg.rank())
                .map(|j| g.get(i, j) as i128 * cand.coeffs[j] as i128)
                .sum();
            if dot % cand.n as i128 != 0 {
                failures.push(format!("pairing with {name} is {}/{}", dot, cand.n));
            }
        }
        (None, None)
    };
    Ok(ClassReport {
        class: cfg.describe(cand),
        in_dual,
        norm,
        order,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorsReport {
    pub classes: Vec<ClassReport>,
    /// Order of the subgroup of the discriminant group spanned by the dual classes.
    pub subgroup_order: String,
    pub group_order: String,
    pub generates: bool,
}

/// Per-class reports plus whether the classes generate the discriminant group.
pub fn generators_report(cfg: &CurveConfig, cands: &[Candidate]) -> Result<GeneratorsReport> {
    let det = cfg.gram.determinant();
    if det.is_zero() {
        return Err(Error::DegenerateLattice);
    }
    let classes = cands
        .iter()
        .map(|c| check_divisible_class(cfg, c))
        .collect::<Result<Vec<_>>>()?;
    let dual: Vec<RationalVector> = cands
        .iter()
        .zip(&classes)
        .filter(|(_, r)| r.in_dual)
        .map(|(c, _)| c.vector())
        .collect();
    let subgroup = subgroup_order(cfg.rank(), &dual);
    let group = det.abs();
    Ok(GeneratorsReport {
        classes,
        generates: subgroup == group,
        subgroup_order: subgroup.to_string(),
        group_order: group.to_string(),
    })
}

/// `[Z^n + sum Z v_i : Z^n]`: scale everything by the common denominator `N`
/// and compare with the index of the scaled span in `Z^n`.
fn subgroup_order(n: usize, vs: &[RationalVector]) -> BigInt {
    let den = vs
        .iter()
        .flat_map(|v| v.0.iter())
        .fold(BigInt::one(), |acc, x| {
            num_integer::Integer::lcm(&acc, x.denom())
        });
    let mut m = vec![vec![BigInt::zero(); n + vs.len()]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = den.clone();
        for (k, v) in vs.iter().enumerate() {
            let x: BigRational = &v.0[i] * BigRational::from_integer(den.clone());
            row[n + k] = x.to_integer();
        }
    }
    let index: BigInt = smith_normal_form(&m).diagonal().into_iter().product();
    num_traits::pow(den, n) / index
}
