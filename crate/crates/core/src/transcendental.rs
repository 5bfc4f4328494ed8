//! Transcendental lattices: rank-2 lattices recovered from a Néron–Severi
//! discriminant form, and rank-3 candidates checked against their genus data.

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::is_square;
use crate::binary::{match_disc_form, EvenBinaryForm};
use crate::error::{Error, Result};
use crate::finite_qf::FiniteQF;
use crate::lattice::GramMatrix;

/// True when `4|d|` has no cube factor `k^3` with `k >= 2` non-square and
/// `k = 0, 1 mod 4`. Such a `d` pins down an indefinite rank-3 genus to one class.
pub fn is_small_discriminant(d: i64) -> Result<bool> {
    if d == 0 {
        return Err(Error::ZeroDiscriminant);
    }
    Ok(small_witness(d).is_none())
}

/// The least `k` violating smallness, if any.
pub fn small_witness(d: i64) -> Option<u64> {
    let n = 4 * d.unsigned_abs();
    (2u64..)
        .take_while(|k| k.checked_pow(3).is_some_and(|c| c <= n))
        .find(|&k| (k % 4 == 0 || k % 4 == 1) && !is_square(k) && n.is_multiple_of(k * k * k))
}

/// The general-member transcendental lattice `(4 1 0; 1 4 0; 0 0 -2)`.
pub fn t0() -> GramMatrix {
    GramMatrix::new(vec![vec![4, 1, 0], vec![1, 4, 0], vec![0, 0, -2]]).expect("symmetric")
}

/// The general-member transcendental lattice `(10 4 0; 4 10 0; 0 0 -2)`.
pub fn t1() -> GramMatrix {
    GramMatrix::new(vec![vec![10, 4, 0], vec![4, 10, 0], vec![0, 0, -2]]).expect("symmetric")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rank3Candidate {
    pub gram: GramMatrix,
    pub expected_d: i64,
    pub expected_form: FiniteQF,
}

impl Rank3Candidate {
    pub fn new(gram: GramMatrix, expected_d: i64, expected_form: FiniteQF) -> Result<Self> {
        if gram.rank() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: gram.rank(),
            });
        }
        gram.require_even()?;
        Ok(Rank3Candidate {
            gram,
            expected_d,
            expected_form,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateReport {
    pub signature_ok: bool,
    pub determinant_ok: bool,
    pub disc_form_ok: bool,
    pub small: bool,
    pub verdict: bool,
}

/// Signature `(2, 1)`, the determinant, the discriminant form and smallness.
/// Errors inside a check (degenerate input, oversized groups) count as failure.
pub fn verify_candidate(cand: &Rank3Candidate) -> CandidateReport {
    let signature_ok = cand.gram.signature() == Ok((2, 1));
    let determinant_ok = cand.gram.determinant() == BigInt::from(cand.expected_d);
    let disc_form_ok = FiniteQF::from_lattice(&cand.gram)
        .and_then(|q| q.is_isomorphic(&cand.expected_form))
        .unwrap_or(false);
    let small = determinant_ok && is_small_discriminant(cand.expected_d).unwrap_or(false);
    CandidateReport {
        signature_ok,
        determinant_ok,
        disc_form_ok,
        small,
        verdict: signature_ok && determinant_ok && disc_form_ok && small,
    }
}

/// The positive definite rank-2 lattice of determinant `d` whose discriminant
/// form is `-ns_form`, the orthogonal complement data of a rank-20 NS lattice.
pub fn transcendental_of_singular(d: i64, ns_form: &FiniteQF) -> Result<EvenBinaryForm> {
    let mut found = match_disc_form(d, &ns_form.negate())?;
    match found.len() {
        0 => Err(Error::NoMatch(d)),
        1 => Ok(found.remove(0)),
        count => Err(Error::Ambiguous { d, count }),
    }
}
