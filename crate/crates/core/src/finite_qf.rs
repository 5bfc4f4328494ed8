//! Finite quadratic forms `q: A -> Q/2Z` on finite abelian groups, as they
//! arise on discriminant groups `L^v / L` of even lattices.
//!
//! A form is stored on a presentation `A = Z_{m_1} + ... + Z_{m_k}` by the
//! values `q(g_i)` in `[0, 2)` and the pairings `b(g_i, g_j)` in `[0, 1)`.
//! The diagonal pairing is always `b(g_i, g_i) = q(g_i) mod 1`.
//!
//! Text syntax: `Z2(3/2)+Z30(23/30)`, optionally followed by nonzero cross
//! pairings `; b(1,2)=1/2` (1-based generator indices). `0` is the trivial form.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{fmt_rat, is_integer, mod1, mod2, parse_rat};
use crate::error::{Error, Result};
use crate::lattice::{
    discriminant_group, pairing_mod_z, qnorm_mod2z, smith_normal_form, GramMatrix,
};

/// Largest group order handled by [`FiniteQF::is_isomorphic`].
pub const ISO_BOUND: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteQF {
    orders: Vec<u64>,
    qvals: Vec<BigRational>,
    bvals: Vec<Vec<BigRational>>,
}

impl FiniteQF {
    /// Builds a form from generator orders, `q` values and the nonzero cross
    /// pairings `(i, j, b(g_i, g_j))` (0-based). Values are reduced into their
    /// canonical intervals; the result must be well defined on the group.
    pub fn new(
        orders: Vec<u64>,
        qvals: Vec<BigRational>,
        pairings: &[(usize, usize, BigRational)],
    ) -> Result<Self> {
        let k = orders.len();
        if qvals.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: qvals.len(),
            });
        }
        let qvals: Vec<BigRational> = qvals.iter().map(mod2).collect();
        let mut bvals = vec![vec![BigRational::zero(); k]; k];
        for i in 0..k {
            bvals[i][i] = mod1(&qvals[i]);
        }
        for (i, j, b) in pairings {
            let (i, j) = (*i, *j);
            if i >= k || j >= k || i == j {
                return Err(Error::InvalidForm(format!(
                    "pairing index ({}, {}) out of range",
                    i + 1,
                    j + 1
                )));
            }
            bvals[i][j] = mod1(b);
            bvals[j][i] = mod1(b);
        }
        let form = FiniteQF {
            orders,
            qvals,
            bvals,
        };
        form.validate()?;
        Ok(form)
    }

    pub fn trivial() -> Self {
        FiniteQF {
            orders: Vec::new(),
            qvals: Vec::new(),
            bvals: Vec::new(),
        }
    }

    /// `Z_m(q)`.
    pub fn cyclic(m: u64, q: BigRational) -> Result<Self> {
        FiniteQF::new(vec![m], vec![q], &[])
    }

    fn validate(&self) -> Result<()> {
        for (i, (&m, q)) in self.orders.iter().zip(&self.qvals).enumerate() {
            if m < 2 {
                return Err(Error::InvalidForm(format!("generator order {m} < 2")));
            }
            let mb = BigRational::from_integer(BigInt::from(m));
            // q(m g) = m^2 q(g) = 0 and b(m g, g) = m q(g) = 0
            if !is_integer(&(&mb * q)) || !(&mb * &mb * q / BigInt::from(2)).is_integer() {
                return Err(Error::InvalidForm(format!(
                    "Z{}({}) is not well defined",
                    m,
                    fmt_rat(q)
                )));
            }
            for j in 0..self.orders.len() {
                if i != j && !is_integer(&(&mb * &self.bvals[i][j])) {
                    return Err(Error::InvalidForm(format!(
                        "b({},{}) = {} is not killed by the order {}",
                        i + 1,
                        j + 1,
                        fmt_rat(&self.bvals[i][j]),
                        m
                    )));
                }
            }
        }
        Ok(())
    }

    /// The discriminant form of an even nondegenerate lattice, on the
    /// generators produced by [`discriminant_group`].
    pub fn from_lattice(g: &GramMatrix) -> Result<Self> {
        g.require_even()?;
        let dg = discriminant_group(g)?;
        let k = dg.generators.len();
        let mut orders = Vec::with_capacity(k);
        for d in &dg.invariant_factors {
            orders.push(d.to_u64().ok_or(Error::Overflow)?);
        }
        let qvals = dg
            .generators
            .iter()
            .map(|v| qnorm_mod2z(g, v))
            .collect::<Result<Vec<_>>>()?;
        let mut pairings = Vec::new();
        for i in 0..k {
            for j in (i + 1)..k {
                let b = pairing_mod_z(g, &dg.generators[i], &dg.generators[j])?;
                if !b.is_zero() {
                    pairings.push((i, j, b));
                }
            }
        }
        FiniteQF::new(orders, qvals, &pairings)
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn qvals(&self) -> &[BigRational] {
        &self.qvals
    }

    /// `b(g_i, g_j)` in `[0, 1)`.
    pub fn pairing(&self, i: usize, j: usize) -> &BigRational {
        &self.bvals[i][j]
    }

    /// Number of generators in the presentation.
    pub fn num_generators(&self) -> usize {
        self.orders.len()
    }

    pub fn group_order(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Concatenated generators with zero cross pairings.
    pub fn direct_sum(&self, other: &FiniteQF) -> FiniteQF {
        let k1 = self.orders.len();
        let k = k1 + other.orders.len();
        let mut bvals = vec![vec![BigRational::zero(); k]; k];
        for i in 0..k1 {
            for j in 0..k1 {
                bvals[i][j] = self.bvals[i][j].clone();
            }
        }
        for i in 0..other.orders.len() {
            for j in 0..other.orders.len() {
                bvals[k1 + i][k1 + j] = other.bvals[i][j].clone();
            }
        }
        FiniteQF {
            orders: [self.orders.clone(), other.orders.clone()].concat(),
            qvals: [self.qvals.clone(), other.qvals.clone()].concat(),
            bvals,
        }
    }

    /// `-q`, `-b`.
    pub fn negate(&self) -> FiniteQF {
        FiniteQF {
            orders: self.orders.clone(),
            qvals: self.qvals.iter().map(|q| mod2(&-q)).collect(),
            bvals: self
                .bvals
                .iter()
                .map(|row| row.iter().map(|b| mod1(&-b)).collect())
                .collect(),
        }
    }

    fn check_len(&self, x: &[i64]) -> Result<()> {
        if x.len() != self.orders.len() {
            return Err(Error::DimensionMismatch {
                expected: self.orders.len(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `q(sum x_i g_i)` in `[0, 2)`.
    pub fn evaluate(&self, x: &[i64]) -> Result<BigRational> {
        self.check_len(x)?;
        let mut s = BigRational::zero();
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            let xi = BigInt::from(x[i]);
            s += &self.qvals[i] * (&xi * &xi);
            for j in (i + 1)..x.len() {
                if x[j] != 0 && !self.bvals[i][j].is_zero() {
                    s += &self.bvals[i][j] * (BigInt::from(2) * &xi * BigInt::from(x[j]));
                }
            }
        }
        Ok(mod2(&s))
    }

    /// `b(sum x_i g_i, sum y_j g_j)` in `[0, 1)`.
    pub fn pair(&self, x: &[i64], y: &[i64]) -> Result<BigRational> {
        self.check_len(x)?;
        self.check_len(y)?;
        let mut s = BigRational::zero();
        for i in 0..x.len() {
            for j in 0..y.len() {
                if x[i] != 0 && y[j] != 0 {
                    s += &self.bvals[i][j] * BigInt::from(x[i] * y[j]);
                }
            }
        }
        Ok(mod1(&s))
    }

    /// Merges summands of coprime order by the Chinese remainder theorem.
    ///
    /// Each generator is folded into the most recent summand whose order is
    /// coprime to its own; the merged generator is the sum of the original
    /// generators (coordinate 1 in each piece).
    pub fn cyclic_normalize(&self) -> FiniteQF {
        let k = self.orders.len();
        let mut clusters: Vec<(u64, Vec<i64>)> = Vec::new();
        for i in 0..k {
            let m = self.orders[i];
            match clusters
                .iter_mut()
                .rev()
                .find(|(order, _)| order.gcd(&m) == 1)
            {
                Some((order, coeffs)) => {
                    *order *= m;
                    coeffs[i] = 1;
                }
                None => {
                    let mut coeffs = vec![0; k];
                    coeffs[i] = 1;
                    clusters.push((m, coeffs));
                }
            }
        }
        let orders = clusters.iter().map(|(m, _)| *m).collect();
        let qvals = clusters
            .iter()
            .map(|(_, c)| self.evaluate(c).expect("coefficient length"))
            .collect();
        let mut pairings = Vec::new();
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let v = self
                    .pair(&clusters[a].1, &clusters[b].1)
                    .expect("coefficient length");
                if !v.is_zero() {
                    pairings.push((a, b, v));
                }
            }
        }
        FiniteQF::new(orders, qvals, &pairings).expect("CRT merge of a valid form is valid")
    }

    /// True iff `b` has trivial radical.
    pub fn is_nondegenerate(&self) -> Result<bool> {
        let table = FastForm::new(self, self.denominator())?;
        Ok(table.is_nondegenerate())
    }

    /// Exhaustive isomorphism test: searches images of the generators among
    /// elements of matching order and `q` value, checking every pairing.
    pub fn is_isomorphic(&self, other: &FiniteQF) -> Result<bool> {
        Ok(self.find_isomorphism(other)?.is_some())
    }

    /// Images of the generators of `self` (as coefficient vectors over the
    /// generators of `other`) defining an isometry, if one exists.
    pub fn find_isomorphism(&self, other: &FiniteQF) -> Result<Option<Vec<Vec<u64>>>> {
        for f in [self, other] {
            let n = f.checked_order()?;
            if n > ISO_BOUND {
                return Err(Error::TooLarge {
                    order: n,
                    bound: ISO_BOUND,
                });
            }
        }
        if self.group_order() != other.group_order() {
            return Ok(None);
        }
        let den = self.denominator().lcm(&other.denominator());
        let src = FastForm::new(self, den)?;
        let dst = FastForm::new(other, den)?;
        let src_elems = src.elements();
        let dst_elems = dst.elements();
        if histogram(&src_elems) != histogram(&dst_elems) {
            return Ok(None);
        }
        let mut buckets: HashMap<(u64, u64), Vec<Vec<u64>>> = HashMap::new();
        for e in dst_elems {
            buckets.entry((e.order, e.q)).or_default().push(e.coeffs);
        }
        let mut candidates = Vec::with_capacity(src.orders.len());
        for i in 0..src.orders.len() {
            match buckets.get(&(src.orders[i], src.q[i])) {
                Some(c) => candidates.push(c.as_slice()),
                None => return Ok(None),
            }
        }
        let need_surjectivity = !src.is_nondegenerate();
        let mut chosen: Vec<Vec<u64>> = Vec::new();
        Ok(search(
            &src,
            &dst,
            &candidates,
            &mut chosen,
            need_surjectivity,
        ))
    }

    fn checked_order(&self) -> Result<u64> {
        self.orders
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(m))
            .ok_or(Error::TooLarge {
                order: u64::MAX,
                bound: ISO_BOUND,
            })
    }

    /// Common denominator of all `q` and `b` values.
    fn denominator(&self) -> u64 {
        let mut d = BigInt::one();
        for q in &self.qvals {
            d = d.lcm(q.denom());
        }
        for row in &self.bvals {
            for b in row {
                d = d.lcm(b.denom());
            }
        }
        d.to_u64().unwrap_or(u64::MAX)
    }
}

/// Values scaled by a common denominator `den`: `q` lives in `Z/2den`, `b` in `Z/den`.
struct FastForm {
    orders: Vec<u64>,
    den: u64,
    q: Vec<u64>,
    b: Vec<Vec<u64>>,
}

struct Element {
    coeffs: Vec<u64>,
    order: u64,
    q: u64,
}

impl FastForm {
    fn new(f: &FiniteQF, den: u64) -> Result<Self> {
        let scale = |x: &BigRational, modulus: u64| -> Result<u64> {
            let v = x * BigInt::from(den);
            if !v.is_integer() {
                return Err(Error::Overflow);
            }
            let v = v.to_integer().mod_floor(&BigInt::from(modulus));
            v.to_u64().ok_or(Error::Overflow)
        };
        Ok(FastForm {
            orders: f.orders.clone(),
            den,
            q: f.qvals
                .iter()
                .map(|x| scale(x, 2 * den))
                .collect::<Result<_>>()?,
            b: f.bvals
                .iter()
                .map(|row| row.iter().map(|x| scale(x, den)).collect::<Result<_>>())
                .collect::<Result<_>>()?,
        })
    }

    fn q_of(&self, x: &[u64]) -> u64 {
        let m2 = 2 * self.den as u128;
        let mut s: u128 = 0;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            let xi = x[i] as u128;
            s = (s + xi * xi % m2 * self.q[i] as u128) % m2;
            for j in (i + 1)..x.len() {
                if x[j] != 0 {
                    s = (s + 2 * (xi * x[j] as u128 % m2) * self.b[i][j] as u128) % m2;
                }
            }
        }
        s as u64
    }

    fn pair(&self, x: &[u64], y: &[u64]) -> u64 {
        let m = self.den as u128;
        let mut s: u128 = 0;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            for j in 0..y.len() {
                if y[j] != 0 {
                    s = (s + (x[i] as u128 * y[j] as u128 % m) * self.b[i][j] as u128) % m;
                }
            }
        }
        s as u64
    }

    fn element_order(&self, x: &[u64]) -> u64 {
        x.iter()
            .zip(&self.orders)
            .fold(1, |acc, (&xi, &m)| acc.lcm(&(m / xi.gcd(&m))))
    }

    fn elements(&self) -> Vec<Element> {
        let total: u64 = self.orders.iter().product();
        let mut out = Vec::with_capacity(total as usize);
        let mut x = vec![0u64; self.orders.len()];
        for _ in 0..total {
            out.push(Element {
                order: self.element_order(&x),
                q: self.q_of(&x),
                coeffs: x.clone(),
            });
            for (xi, &m) in x.iter_mut().zip(&self.orders) {
                *xi += 1;
                if *xi < m {
                    break;
                }
                *xi = 0;
            }
        }
        out
    }

    fn is_nondegenerate(&self) -> bool {
        let k = self.orders.len();
        let gens: Vec<Vec<u64>> = (0..k)
            .map(|i| {
                let mut e = vec![0; k];
                e[i] = 1;
                e
            })
            .collect();
        self.elements()
            .iter()
            .filter(|e| e.coeffs.iter().any(|&c| c != 0))
            .all(|e| gens.iter().any(|g| self.pair(&e.coeffs, g) != 0))
    }

    /// Whether the given elements generate the whole group.
    fn generates(&self, images: &[Vec<u64>]) -> bool {
        let k = self.orders.len();
        let mut rows: Vec<Vec<BigInt>> = vec![Vec::new(); k];
        for (r, row) in rows.iter_mut().enumerate() {
            for c in 0..k {
                row.push(if r == c {
                    BigInt::from(self.orders[r])
                } else {
                    BigInt::zero()
                });
            }
            for img in images {
                row.push(BigInt::from(img[r]));
            }
        }
        smith_normal_form(&rows)
            .diagonal()
            .iter()
            .all(|d| d.is_one())
    }
}

fn histogram(elems: &[Element]) -> HashMap<(u64, u64), usize> {
    let mut h = HashMap::new();
    for e in elems {
        *h.entry((e.order, e.q)).or_insert(0) += 1;
    }
    h
}

fn search(
    src: &FastForm,
    dst: &FastForm,
    candidates: &[&[Vec<u64>]],
    chosen: &mut Vec<Vec<u64>>,
    need_surjectivity: bool,
) -> Option<Vec<Vec<u64>>> {
    let i = chosen.len();
    if i == candidates.len() {
        if need_surjectivity && !dst.generates(chosen) {
            return None;
        }
        return Some(chosen.clone());
    }
    for h in candidates[i] {
        let consistent = (0..i).all(|j| dst.pair(&chosen[j], h) == src.b[j][i]);
        if !consistent {
            continue;
        }
        chosen.push(h.clone());
        if let Some(found) = search(src, dst, candidates, chosen, need_surjectivity) {
            return Some(found);
        }
        chosen.pop();
    }
    None
}

impl fmt::Display for FiniteQF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .orders
            .iter()
            .zip(&self.qvals)
            .map(|(m, q)| format!("Z{}({})", m, fmt_rat(q)))
            .collect();
        write!(f, "{}", parts.join("+"))?;
        for i in 0..self.orders.len() {
            for j in (i + 1)..self.orders.len() {
                if !self.bvals[i][j].is_zero() {
                    write!(f, "; b({},{})={}", i + 1, j + 1, fmt_rat(&self.bvals[i][j]))?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for FiniteQF {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("finite form `{s}`: {what}"));
        let mut clauses = s.split(';');
        let head = clauses.next().unwrap_or("").trim();
        let mut orders = Vec::new();
        let mut qvals = Vec::new();
        if head != "0" && !head.is_empty() {
            for tok in head.split('+') {
                let tok = tok.trim();
                let rest = tok
                    .strip_prefix('Z')
                    .ok_or_else(|| bad("expected `Zm(p/q)`"))?;
                let (m, q) = rest
                    .strip_suffix(')')
                    .and_then(|r| r.split_once('('))
                    .ok_or_else(|| bad("expected `Zm(p/q)`"))?;
                orders.push(m.trim().parse::<u64>().map_err(|_| bad("bad order"))?);
                qvals.push(parse_rat(q).ok_or_else(|| bad("bad value"))?);
            }
        } else if head.is_empty() {
            return Err(bad("empty"));
        }
        let mut pairings = Vec::new();
        for clause in clauses {
            let clause = clause.trim();
            if clause.is_empty() {
                continue;
            }
            let (lhs, rhs) = clause
                .split_once('=')
                .ok_or_else(|| bad("expected `b(i,j)=v`"))?;
            let idx = lhs
                .trim()
                .strip_prefix("b(")
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| bad("expected `b(i,j)=v`"))?;
            let (i, j) = idx
                .split_once(',')
                .ok_or_else(|| bad("expected `b(i,j)=v`"))?;
            let i: usize = i.trim().parse().map_err(|_| bad("bad index"))?;
            let j: usize = j.trim().parse().map_err(|_| bad("bad index"))?;
            if i == 0 || j == 0 {
                return Err(bad("indices are 1-based"));
            }
            let v = parse_rat(rhs).ok_or_else(|| bad("bad value"))?;
            pairings.push((i - 1, j - 1, v));
        }
        FiniteQF::new(orders, qvals, &pairings)
    }
}
