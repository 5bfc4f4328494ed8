//! Positive definite even binary forms `(2a c; c 2b)` up to `SL2(Z)`.
//!
//! A form is reduced when `-a <= c <= a <= b`. The only coincidences among
//! reduced forms are `c = a` vs `c = -a` and, for `a = b`, `c` vs `-c`; the
//! canonical representative keeps `c >= 0` in both cases, so distinct
//! canonical reduced forms are inequivalent.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_qf::FiniteQF;
use crate::lattice::GramMatrix;
use crate::text::parse_inline_matrix;

/// The form with Gram matrix `(2a c; c 2b)`; ordered lexicographically by `(a, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EvenBinaryForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl EvenBinaryForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let f = EvenBinaryForm { a, b, c };
        if a <= 0 || b <= 0 || f.discriminant() <= 0 {
            return Err(Error::InvalidBinaryForm(f.to_string()));
        }
        Ok(f)
    }

    pub fn from_gram(g: &GramMatrix) -> Result<Self> {
        if g.rank() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: g.rank(),
            });
        }
        g.require_even()?;
        EvenBinaryForm::new(g.get(0, 0) / 2, g.get(1, 1) / 2, g.get(0, 1))
    }

    /// `d = 4ab - c^2`.
    pub fn discriminant(&self) -> i64 {
        4 * self.a * self.b - self.c * self.c
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        [[2 * self.a, self.c], [self.c, 2 * self.b]]
    }

    pub fn gram(&self) -> GramMatrix {
        GramMatrix::new(self.matrix().iter().map(|r| r.to_vec()).collect())
            .expect("symmetric by construction")
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        -a <= c && c <= a && a <= b
    }

    /// Reduced with the sign convention `c >= 0` when `c = a` or `a = b`.
    pub fn is_canonical(&self) -> bool {
        self.is_reduced() && !(self.c < 0 && (self.c == -self.a || self.a == self.b))
    }

    /// `gcd(a, b, c) == 1`.
    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// `g^T M g`.
    pub fn transform(&self, g: &UnimodularTransform) -> EvenBinaryForm {
        let m = self.matrix();
        let [[p, q], [r, s]] = g.0;
        let col = |x: i64, y: i64| -> [i128; 2] {
            [
                m[0][0] as i128 * x as i128 + m[0][1] as i128 * y as i128,
                m[1][0] as i128 * x as i128 + m[1][1] as i128 * y as i128,
            ]
        };
        let dot = |x: i64, y: i64, v: [i128; 2]| x as i128 * v[0] + y as i128 * v[1];
        let (e1, e2) = ((p, r), (q, s));
        let m11 = dot(e1.0, e1.1, col(e1.0, e1.1));
        let m12 = dot(e1.0, e1.1, col(e2.0, e2.1));
        let m22 = dot(e2.0, e2.1, col(e2.0, e2.1));
        EvenBinaryForm {
            a: (m11 / 2) as i64,
            b: (m22 / 2) as i64,
            c: m12 as i64,
        }
    }

    /// Gauss reduction. Returns the canonical reduced form `r` and `g` with
    /// `g^T M g = R`.
    pub fn reduce(&self) -> (EvenBinaryForm, UnimodularTransform) {
        let (mut a, mut b, mut c) = (self.a, self.b, self.c);
        let mut g = UnimodularTransform::identity();
        loop {
            let k = Integer::div_floor(&(a - c), &(2 * a));
            if k != 0 {
                b += a * k * k + c * k;
                c += 2 * a * k;
                g = g.mul(&UnimodularTransform([[1, k], [0, 1]]));
            }
            if a > b || (a == b && c < 0) {
                (a, b, c) = (b, a, -c);
                g = g.mul(&UnimodularTransform::swap());
                continue;
            }
            break;
        }
        (EvenBinaryForm { a, b, c }, g)
    }

    /// A transform `g` with `g^T M_self g = M_other`, if the forms are equivalent.
    pub fn equivalent(&self, other: &EvenBinaryForm) -> Option<UnimodularTransform> {
        let (r1, g1) = self.reduce();
        let (r2, g2) = other.reduce();
        if r1 != r2 {
            return None;
        }
        let g = g1.mul(&g2.inverse());
        debug_assert_eq!(self.transform(&g), *other);
        Some(g)
    }

    /// `tau_1 = (-c + sqrt(-d)) / 2a`, `tau_2 = (c + sqrt(-d)) / 2`.
    pub fn cm_moduli(&self) -> (QuadraticSurd, QuadraticSurd) {
        let d = self.discriminant();
        (
            QuadraticSurd::new(-self.c, 1, 2 * self.a, -d),
            QuadraticSurd::new(self.c, 1, 2, -d),
        )
    }

    /// Primitive embeddability into `U + U(2) + A2(-2)`: for the matrix
    /// `(2n a; a 2m)`, at least one of `a`, `n`, `m` is even.
    pub fn hessian_embeddable(&self) -> bool {
        self.c % 2 == 0 || self.a % 2 == 0 || self.b % 2 == 0
    }

    pub fn record(&self) -> FormRecord {
        FormRecord {
            a: self.a,
            b: self.b,
            c: self.c,
            d: self.discriminant(),
            matrix: self.matrix(),
        }
    }
}

impl fmt::Display for EvenBinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {}; {} {}]", 2 * self.a, self.c, self.c, 2 * self.b)
    }
}

impl FromStr for EvenBinaryForm {
    type Err = Error;

    /// `[2a c; c 2b]`.
    fn from_str(s: &str) -> Result<Self> {
        let g = GramMatrix::new(parse_inline_matrix(s)?)?;
        EvenBinaryForm::from_gram(&g)
    }
}

/// JSON record `{a, b, c, d, matrix}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormRecord {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub matrix: [[i64; 2]; 2],
}

impl TryFrom<&FormRecord> for EvenBinaryForm {
    type Error = Error;

    fn try_from(r: &FormRecord) -> Result<Self> {
        let f = EvenBinaryForm::new(r.a, r.b, r.c)?;
        if f.discriminant() != r.d || f.matrix() != r.matrix {
            return Err(Error::Parse(format!("inconsistent form record {r:?}")));
        }
        Ok(f)
    }
}

/// An element of `SL2(Z)`, rows first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnimodularTransform(pub [[i64; 2]; 2]);

impl UnimodularTransform {
    pub fn new(m: [[i64; 2]; 2]) -> Result<Self> {
        if m[0][0] * m[1][1] - m[0][1] * m[1][0] != 1 {
            return Err(Error::Parse(format!("{m:?} does not have determinant 1")));
        }
        Ok(UnimodularTransform(m))
    }

    pub fn identity() -> Self {
        UnimodularTransform([[1, 0], [0, 1]])
    }

    fn swap() -> Self {
        UnimodularTransform([[0, -1], [1, 0]])
    }

    pub fn mul(&self, other: &UnimodularTransform) -> UnimodularTransform {
        let (a, b) = (self.0, other.0);
        UnimodularTransform([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn inverse(&self) -> UnimodularTransform {
        let [[p, q], [r, s]] = self.0;
        UnimodularTransform([[s, -q], [-r, p]])
    }
}

/// `(p + q sqrt(radicand)) / r`, with `r > 0` and `gcd(p, q, r) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadraticSurd {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub radicand: i64,
}

impl QuadraticSurd {
    pub fn new(p: i64, q: i64, r: i64, radicand: i64) -> Self {
        let sign = if r < 0 { -1 } else { 1 };
        let g = p.gcd(&q).gcd(&r).max(1);
        QuadraticSurd {
            p: sign * p / g,
            q: sign * q / g,
            r: sign * r / g,
            radicand,
        }
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let root = if self.q == 1 {
            format!("√{}", self.radicand)
        } else {
            format!("{}√{}", self.q, self.radicand)
        };
        let num = if self.p == 0 {
            root
        } else {
            format!("{}+{}", self.p, root)
        };
        if self.r == 1 {
            write!(f, "{num}")
        } else if self.p == 0 {
            write!(f, "{num}/{}", self.r)
        } else {
            write!(f, "({num})/{}", self.r)
        }
    }
}

fn require_positive(d: i64) -> Result<()> {
    if d <= 0 {
        return Err(Error::InvalidBinaryForm(format!(
            "discriminant {d} must be positive"
        )));
    }
    Ok(())
}

/// One canonical reduced form per class of discriminant `d`, sorted by `(a, b, c)`.
///
/// Reducedness forces `3c^2 <= d`, and `c` has the parity of `d`.
pub fn enumerate_reduced(d: i64) -> Result<Vec<EvenBinaryForm>> {
    require_positive(d)?;
    if d % 4 != 0 && d % 4 != 3 {
        return Err(Error::EmptyResult(d));
    }
    let mut out = Vec::new();
    let mut c_abs = d % 2;
    while 3 * c_abs * c_abs <= d {
        let ab = (d + c_abs * c_abs) / 4;
        let signs: &[i64] = if c_abs == 0 { &[0] } else { &[c_abs, -c_abs] };
        for &c in signs {
            let mut a = c_abs.max(1);
            while a * a <= ab {
                if ab % a == 0 {
                    let f = EvenBinaryForm { a, b: ab / a, c };
                    if f.is_canonical() {
                        out.push(f);
                    }
                }
                a += 1;
            }
        }
        c_abs += 2;
    }
    out.sort();
    Ok(out)
}

/// Number of `SL2(Z)` classes of discriminant `d` (zero when `d` is not 0 or 3 mod 4).
pub fn class_number(d: i64) -> Result<usize> {
    match enumerate_reduced(d) {
        Ok(v) => Ok(v.len()),
        Err(Error::EmptyResult(_)) => Ok(0),
        Err(e) => Err(e),
    }
}

/// Reduced forms of discriminant `d` grouped by isomorphism class of their
/// discriminant forms, i.e. by genus.
pub fn genus_partition(d: i64) -> Result<Vec<Vec<EvenBinaryForm>>> {
    let forms = enumerate_reduced(d)?;
    let mut groups: Vec<(FiniteQF, Vec<EvenBinaryForm>)> = Vec::new();
    for f in forms {
        let q = FiniteQF::from_lattice(&f.gram())?;
        let mut placed = false;
        for (rep, members) in groups.iter_mut() {
            if rep.is_isomorphic(&q)? {
                members.push(f);
                placed = true;
                break;
            }
        }
        if !placed {
            groups.push((q, vec![f]));
        }
    }
    Ok(groups.into_iter().map(|(_, m)| m).collect())
}

/// Reduced forms of discriminant `d` whose discriminant form is isomorphic to `target`.
pub fn match_disc_form(d: i64, target: &FiniteQF) -> Result<Vec<EvenBinaryForm>> {
    let mut out = Vec::new();
    if target.group_order() != d as u64 {
        return Ok(out);
    }
    for f in enumerate_reduced(d)? {
        if FiniteQF::from_lattice(&f.gram())?.is_isomorphic(target)? {
            out.push(f);
        }
    }
    Ok(out)
}
