//! Integral lattices given by symmetric Gram matrices.
//!
//! Entries are stored as `i64`; every derived quantity (determinants, Smith
//! forms, dual vectors, norms) is computed with arbitrary precision.

mod dual;
mod linalg;
mod snf;

pub use dual::{
    discriminant_group, is_dual_vector, order_in_quotient, pairing_mod_z, qnorm_mod2z,
    sublattice_index_law, DiscriminantGroup, RationalVector, SublatticeIndex,
};
pub use linalg::{determinant, identity, mat_mul, transpose, IntMatrix};
pub use snf::{smith_normal_form, SnfResult};

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Symmetric integer matrix of a bilinear form `b: L x L -> Z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GramMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl GramMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Parse("empty Gram matrix".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(Error::NotSymmetric(i, j));
                }
            }
        }
        Ok(GramMatrix { n, entries })
    }

    pub fn diagonal(diag: &[i64]) -> Self {
        let n = diag.len();
        let mut entries = vec![0; n * n];
        for (i, d) in diag.iter().enumerate() {
            entries[i * n + i] = *d;
        }
        GramMatrix { n, entries }
    }

    /// The hyperbolic plane `U`.
    pub fn hyperbolic_plane() -> Self {
        GramMatrix {
            n: 2,
            entries: vec![0, 1, 1, 0],
        }
    }

    /// The root lattice `A2`, fixed as `(2 -1; -1 2)`.
    pub fn a2() -> Self {
        GramMatrix {
            n: 2,
            entries: vec![2, -1, -1, 2],
        }
    }

    /// The positive definite even unimodular lattice `E8` in the basis used
    /// throughout the catalog.
    pub fn e8() -> Self {
        let rows = vec![
            vec![2, 0, -1, 0, 0, 0, 0, 0],
            vec![0, 2, 0, -1, 0, 0, 0, 0],
            vec![-1, 0, 2, -1, 0, 0, 0, 0],
            vec![0, -1, -1, 2, -1, 0, 0, 0],
            vec![0, 0, 0, -1, 2, -1, 0, 0],
            vec![0, 0, 0, 0, -1, 2, -1, 0],
            vec![0, 0, 0, 0, 0, -1, 2, -1],
            vec![0, 0, 0, 0, 0, 0, -1, 2],
        ];
        GramMatrix::new(rows).expect("E8 is symmetric")
    }

    /// `(-E8) + (-E8) + U + U + U`, the second cohomology lattice of a K3 surface.
    pub fn k3_lattice() -> Self {
        let neg_e8 = GramMatrix::e8().negated();
        let u = GramMatrix::hyperbolic_plane();
        neg_e8
            .direct_sum(&neg_e8)
            .direct_sum(&u)
            .direct_sum(&u)
            .direct_sum(&u)
    }

    /// `U + U(2) + A2(-2)`.
    pub fn hessian_lattice() -> Self {
        let u = GramMatrix::hyperbolic_plane();
        let u2 = u.twist(2).expect("nonzero twist");
        let a2m2 = GramMatrix::a2().twist(-2).expect("nonzero twist");
        u.direct_sum(&u2).direct_sum(&a2m2)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_even(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) % 2 == 0)
    }

    pub fn require_even(&self) -> Result<()> {
        match (0..self.n).find(|&i| self.get(i, i) % 2 != 0) {
            Some(i) => Err(Error::OddLattice(i)),
            None => Ok(()),
        }
    }

    pub fn to_big(&self) -> IntMatrix {
        self.rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect()
    }

    pub fn to_rational(&self) -> Vec<Vec<BigRational>> {
        self.rows()
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| BigRational::from_integer(BigInt::from(x)))
                    .collect()
            })
            .collect()
    }

    /// Block-diagonal concatenation.
    pub fn direct_sum(&self, other: &GramMatrix) -> GramMatrix {
        let n = self.n + other.n;
        let mut entries = vec![0; n * n];
        for i in 0..self.n {
            for j in 0..self.n {
                entries[i * n + j] = self.get(i, j);
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                entries[(self.n + i) * n + self.n + j] = other.get(i, j);
            }
        }
        GramMatrix { n, entries }
    }

    /// `L(n)`: the same module with the form scaled by `n`.
    pub fn twist(&self, factor: i64) -> Result<GramMatrix> {
        if factor == 0 {
            return Err(Error::ZeroTwist);
        }
        let entries = self
            .entries
            .iter()
            .map(|x| x.checked_mul(factor).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(GramMatrix { n: self.n, entries })
    }

    pub fn negated(&self) -> GramMatrix {
        self.twist(-1).expect("negation of an i64 matrix")
    }

    /// Exact determinant (fraction-free elimination).
    pub fn determinant(&self) -> BigInt {
        determinant(&self.to_big())
    }

    /// `(s_plus, s_minus)` by exact symmetric elimination.
    pub fn signature(&self) -> Result<(usize, usize)> {
        if self.determinant().is_zero() {
            return Err(Error::DegenerateLattice);
        }
        Ok(linalg::signature(self.to_rational()))
    }

    /// `v^T G w` over the integers.
    pub fn inner(&self, v: &[i64], w: &[i64]) -> i128 {
        let mut s: i128 = 0;
        for i in 0..self.n {
            if v[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                s += v[i] as i128 * self.get(i, j) as i128 * w[j] as i128;
            }
        }
        s
    }

    pub fn abs_det_u64(&self) -> Option<u64> {
        use num_traits::ToPrimitive;
        self.determinant().abs().to_u64()
    }
}

impl fmt::Display for GramMatrix {
    /// Inline form `[a b; c d]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.chunks(self.n).enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}
