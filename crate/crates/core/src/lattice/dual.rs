//! Dual lattice membership, the discriminant group `L^v / L` and the induced
//! values of the bilinear and quadratic forms on it.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::linalg::{determinant, mat_mul, transpose, IntMatrix};
use super::snf::smith_normal_form;
use super::GramMatrix;
use crate::arith::{fmt_rat, is_integer, mod1, mod2, parse_rat};
use crate::error::{Error, Result};

/// A vector of `L (x) Q` in lattice coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalVector(pub Vec<BigRational>);

impl RationalVector {
    pub fn from_ints(xs: &[i64]) -> Self {
        RationalVector(
            xs.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect(),
        )
    }

    /// `coeffs / n`.
    pub fn from_fraction(coeffs: &[i64], n: i64) -> Self {
        RationalVector(
            coeffs
                .iter()
                .map(|&x| BigRational::new(BigInt::from(x), BigInt::from(n)))
                .collect(),
        )
    }

    pub fn zero(n: usize) -> Self {
        RationalVector(vec![BigRational::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(is_integer)
    }

    /// Coordinates reduced into `[0, 1)`.
    pub fn reduced_mod_z(&self) -> Self {
        RationalVector(self.0.iter().map(mod1).collect())
    }

    pub fn add(&self, other: &RationalVector) -> Self {
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        RationalVector(self.0.iter().map(|a| a * &k).collect())
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(|tok| parse_rat(tok).ok_or_else(|| Error::Parse(format!("bad rational `{tok}`"))))
            .collect::<Result<Vec<_>>>()
            .map(RationalVector)
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_rat).collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn check_dim(g: &GramMatrix, v: &RationalVector) -> Result<()> {
    if g.rank() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: g.rank(),
            found: v.len(),
        });
    }
    Ok(())
}

fn apply(g: &GramMatrix, v: &RationalVector) -> Vec<BigRational> {
    (0..g.rank())
        .map(|i| {
            let mut s = BigRational::zero();
            for (j, x) in v.0.iter().enumerate() {
                let gij = g.get(i, j);
                if gij != 0 && !x.is_zero() {
                    s += x * BigRational::from_integer(BigInt::from(gij));
                }
            }
            s
        })
        .collect()
}

fn bilinear(g: &GramMatrix, v: &RationalVector, w: &RationalVector) -> BigRational {
    apply(g, w)
        .iter()
        .zip(&v.0)
        .fold(BigRational::zero(), |acc, (gw, x)| acc + gw * x)
}

/// `G v` integral, i.e. `v` pairs integrally with every lattice vector.
pub fn is_dual_vector(g: &GramMatrix, v: &RationalVector) -> Result<bool> {
    check_dim(g, v)?;
    Ok(apply(g, v).iter().all(is_integer))
}

fn require_dual(g: &GramMatrix, v: &RationalVector) -> Result<()> {
    if is_dual_vector(g, v)? {
        Ok(())
    } else {
        Err(Error::NotInDual)
    }
}

/// `v^T G v` in `[0, 2)`.
pub fn qnorm_mod2z(g: &GramMatrix, v: &RationalVector) -> Result<BigRational> {
    require_dual(g, v)?;
    Ok(mod2(&bilinear(g, v, v)))
}

/// `v^T G w` in `[0, 1)`.
pub fn pairing_mod_z(
    g: &GramMatrix,
    v: &RationalVector,
    w: &RationalVector,
) -> Result<BigRational> {
    require_dual(g, v)?;
    require_dual(g, w)?;
    Ok(mod1(&bilinear(g, v, w)))
}

/// Least `n >= 1` with `n v` integral.
pub fn order_in_quotient(g: &GramMatrix, v: &RationalVector) -> Result<BigInt> {
    require_dual(g, v)?;
    Ok(v.0.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom())))
}

/// Invariant factors (> 1) of `L^v / L` with one generator per factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscriminantGroup {
    pub invariant_factors: Vec<BigInt>,
    pub generators: Vec<RationalVector>,
}

impl DiscriminantGroup {
    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }
}

/// With `U G V = D`, the column `V e_i / d_i` generates the `i`-th cyclic factor.
pub fn discriminant_group(g: &GramMatrix) -> Result<DiscriminantGroup> {
    if g.determinant().is_zero() {
        return Err(Error::DegenerateLattice);
    }
    let snf = smith_normal_form(&g.to_big());
    let mut invariant_factors = Vec::new();
    let mut generators = Vec::new();
    for (i, d) in snf.diagonal().into_iter().enumerate() {
        if d.is_one() {
            continue;
        }
        let v = RationalVector(
            snf.v
                .iter()
                .map(|row| BigRational::new(row[i].clone(), d.clone()))
                .collect(),
        );
        generators.push(v.reduced_mod_z());
        invariant_factors.push(d);
    }
    Ok(DiscriminantGroup {
        invariant_factors,
        generators,
    })
}

/// Outcome of checking `[L:M]^2 = d(M) / d(L)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SublatticeIndex {
    pub index: BigInt,
    pub det_sublattice: BigInt,
    pub verified: bool,
}

/// `basis` holds the basis vectors of `M` as columns, in `L`-coordinates.
pub fn sublattice_index_law(g: &GramMatrix, basis: &IntMatrix) -> Result<SublatticeIndex> {
    let n = g.rank();
    if basis.len() != n || basis.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: basis.len(),
        });
    }
    let det_l = g.determinant();
    if det_l.is_zero() {
        return Err(Error::DegenerateLattice);
    }
    let det_b = determinant(basis);
    if det_b.is_zero() {
        return Err(Error::DegenerateSublattice);
    }
    let gram_m = mat_mul(&mat_mul(&transpose(basis), &g.to_big()), basis);
    let det_m = determinant(&gram_m);
    let index = det_b.abs();
    let verified = &index * &index * &det_l == det_m;
    Ok(SublatticeIndex {
        index,
        det_sublattice: det_m,
        verified,
    })
}
