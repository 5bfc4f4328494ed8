//! Isotropy of ternary integral forms: a box search for integer zeros, and
//! p-adic obstructions certified by exhausting primitive zeros mod `p^e`.
//!
//! The modular search walks the Hensel tree: a primitive zero mod `p^(k+1)`
//! reduces to one mod `p^k`, so it suffices to lift surviving residues one
//! level at a time. Scaling by a unit lets the first unit coordinate be 1.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{prime_divisors, valuation};
use crate::error::{Error, Result};
use crate::lattice::GramMatrix;

/// Default cap on Hensel-tree nodes visited by one modular search.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// `x -> x^T G x` for a nondegenerate symmetric 3x3 `G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryForm {
    gram: GramMatrix,
}

impl TernaryForm {
    pub fn new(gram: GramMatrix) -> Result<Self> {
        if gram.rank() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: gram.rank(),
            });
        }
        gram.signature()?;
        Ok(TernaryForm { gram })
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    pub fn value(&self, v: &[i64; 3]) -> i128 {
        self.gram.inner(v, v)
    }

    fn det(&self) -> i64 {
        self.gram
            .determinant()
            .to_i64()
            .expect("3x3 determinant of i64 entries fits for the forms in use")
    }

    /// Odd primes dividing `2 det`, largest first, each with precision `3 + v_p(2 det)`.
    pub fn default_primes(&self) -> Vec<(u64, u32)> {
        let n = 2 * self.det().unsigned_abs();
        let mut ps: Vec<_> = prime_divisors(n)
            .into_iter()
            .filter(|&p| p != 2)
            .map(|p| (p, self.default_precision(p)))
            .collect();
        ps.reverse();
        ps
    }

    pub fn default_precision(&self, p: u64) -> u32 {
        3 + valuation(2 * self.det().unsigned_abs(), p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IsotropyVerdict {
    Witness { witness: [i64; 3] },
    Obstruction { prime: u64, precision: u32 },
    Inconclusive { bound: i64, primes: Vec<u64> },
}

impl IsotropyVerdict {
    pub fn is_obstruction(&self) -> bool {
        matches!(self, IsotropyVerdict::Obstruction { .. })
    }
}

/// Order in which a coordinate runs through `[-h, h]`: 0, 1, -1, 2, -2, ...
fn zigzag(h: i64) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=h).flat_map(|k| [k, -k]))
}

/// The first nonzero `v` in shell order with `|v_i| <= bound` and `v^T G v = 0`.
/// Shells are visited by increasing sup norm and the first nonzero coordinate
/// of a candidate is positive.
pub fn find_isotropic(f: &TernaryForm, bound: i64) -> Option<[i64; 3]> {
    for h in 1..=bound {
        for x in zigzag(h) {
            for y in zigzag(h) {
                let zs: Vec<i64> = if x.abs().max(y.abs()) < h {
                    vec![h, -h]
                } else {
                    zigzag(h).collect()
                };
                for z in zs {
                    let v = [x, y, z];
                    let lead = v.iter().copied().find(|&c| c != 0).unwrap_or(0);
                    if lead > 0 && f.value(&v) == 0 {
                        return Some(v);
                    }
                }
            }
        }
    }
    None
}

/// True when no primitive `v` mod `p^e` has `v^T G v = 0 mod p^e`.
pub fn local_obstruction(f: &TernaryForm, p: u64, e: u32) -> Result<bool> {
    local_obstruction_with_budget(f, p, e, DEFAULT_BUDGET)
}

pub fn local_obstruction_with_budget(f: &TernaryForm, p: u64, e: u32, budget: u64) -> Result<bool> {
    if e == 0 {
        return Err(Error::Parse("precision must be at least 1".into()));
    }
    // Values are bounded by 9 max|g| p^(2e); keep p^e well inside i128 range.
    (p as i128)
        .checked_pow(e)
        .filter(|m| *m <= 1 << 40)
        .ok_or(Error::Overflow)?;
    let mut search = HenselSearch {
        g: std::array::from_fn(|i| std::array::from_fn(|j| f.gram.get(i, j) as i128)),
        p: p as i128,
        e,
        visited: 0,
        budget,
    };
    for pivot in 0..3 {
        let mut v = [0i128; 3];
        v[pivot] = 1;
        let free: Vec<usize> = (pivot + 1..3).collect();
        for t in 0..(p as i128).pow(free.len() as u32) {
            let mut w = v;
            let mut rest = t;
            for &j in &free {
                w[j] = rest % search.p;
                rest /= search.p;
            }
            if search
                .lifts(pivot, w, 1)
                .map_err(|_| Error::SearchTooLarge { p, e, budget })?
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

struct HenselSearch {
    g: [[i128; 3]; 3],
    p: i128,
    e: u32,
    visited: u64,
    budget: u64,
}

impl HenselSearch {
    fn value(&self, v: &[i128; 3]) -> i128 {
        (0..3)
            .map(|i| (0..3).map(|j| self.g[i][j] * v[i] * v[j]).sum::<i128>())
            .sum()
    }

    /// Whether `v`, known mod `p^k`, is a zero there that lifts to precision `e`.
    fn lifts(&mut self, pivot: usize, v: [i128; 3], k: u32) -> std::result::Result<bool, ()> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(());
        }
        let pk = self.p.pow(k);
        if self.value(&v).rem_euclid(pk) != 0 {
            return Ok(false);
        }
        if k == self.e {
            return Ok(true);
        }
        let free: Vec<usize> = (0..3).filter(|&j| j != pivot).collect();
        for s in 0..self.p {
            for t in 0..self.p {
                let mut w = v;
                w[free[0]] += pk * s;
                w[free[1]] += pk * t;
                if self.lifts(pivot, w, k + 1)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

/// A witness within `bound`, else the first prime in `primes` (or the defaults)
/// carrying an obstruction at its precision, else inconclusive.
pub fn decide_isotropy(f: &TernaryForm, bound: i64, primes: Option<&[u64]>) -> IsotropyVerdict {
    if let Some(witness) = find_isotropic(f, bound) {
        return IsotropyVerdict::Witness { witness };
    }
    let plan: Vec<(u64, u32)> = match primes {
        Some(ps) => ps.iter().map(|&p| (p, f.default_precision(p))).collect(),
        None => f.default_primes(),
    };
    for &(p, e) in &plan {
        if local_obstruction(f, p, e) == Ok(true) {
            return IsotropyVerdict::Obstruction {
                prime: p,
                precision: e,
            };
        }
    }
    IsotropyVerdict::Inconclusive {
        bound,
        primes: plan.into_iter().map(|(p, _)| p).collect(),
    }
}

/// The Néron–Severi form `T(-1)` of the abelian surface behind a rank-3
/// transcendental lattice `T`.
pub fn ns_of_abelian(t: &GramMatrix) -> Result<TernaryForm> {
    let sig = t.signature()?;
    if t.rank() != 3 || sig != (2, 1) {
        return Err(Error::WrongSignature {
            expected: (2, 1),
            found: sig,
        });
    }
    TernaryForm::new(t.twist(-1)?)
}

/// An obstruction verdict means `T(-1)` has no isotropic vector, so the
/// abelian surface carries no elliptic curve.
pub fn is_simple_shioda_inose(
    t: &GramMatrix,
    bound: i64,
    primes: Option<&[u64]>,
) -> Result<IsotropyVerdict> {
    Ok(decide_isotropy(&ns_of_abelian(t)?, bound, primes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transcendental::{t0, t1};
    use proptest::prelude::*;

    fn form(rows: [[i64; 3]; 3]) -> TernaryForm {
        TernaryForm::new(GramMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap())
            .unwrap()
    }

    fn diag(a: i64, b: i64, c: i64) -> TernaryForm {
        TernaryForm::new(GramMatrix::diagonal(&[a, b, c])).unwrap()
    }

    /// Oracle: scan every residue vector mod p^e.
    fn brute_force_obstruction(f: &TernaryForm, p: u64, e: u32) -> bool {
        let m = (p as i64).pow(e);
        for x in 0..m {
            for y in 0..m {
                for z in 0..m {
                    let v = [x, y, z];
                    if v.iter().all(|c| c % p as i64 == 0) {
                        continue;
                    }
                    if f.value(&v).rem_euclid(m as i128) == 0 {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn ns_t0() -> TernaryForm {
        form([[-4, -1, 0], [-1, -4, 0], [0, 0, 2]])
    }

    fn ns_t1() -> TernaryForm {
        form([[-10, -4, 0], [-4, -10, 0], [0, 0, 2]])
    }

    #[test]
    fn witnesses() {
        assert_eq!(find_isotropic(&diag(1, -1, 5), 1), Some([1, 1, 0]));
        assert_eq!(find_isotropic(&diag(1, 1, -2), 3), Some([1, 1, 1]));
        assert_eq!(find_isotropic(&diag(1, 1, 1), 10), None);
        assert_eq!(find_isotropic(&ns_t0(), 50), None);
        assert_eq!(find_isotropic(&ns_t1(), 50), None);
        assert_eq!(find_isotropic(&diag(1, -2, -1), 2), Some([1, 0, 1]));
        let f = diag(3, -5, -7);
        assert!(find_isotropic(&f, 1).is_none());
        let w = find_isotropic(&f, 5).unwrap();
        assert_eq!(f.value(&w), 0);
    }

    #[test]
    fn obstructions() {
        assert_eq!(local_obstruction(&ns_t0(), 5, 3), Ok(true));
        assert_eq!(local_obstruction(&ns_t1(), 7, 3), Ok(true));
        for p in [2, 3, 5, 7] {
            assert_eq!(local_obstruction(&diag(1, -1, 5), p, 1), Ok(false));
            assert_eq!(local_obstruction(&diag(1, -1, 5), p, 4), Ok(false));
        }
        assert_eq!(
            local_obstruction_with_budget(&diag(25, 25, 25), 5, 6, 1000),
            Err(Error::SearchTooLarge {
                p: 5,
                e: 6,
                budget: 1000
            })
        );
    }

    #[test]
    fn obstruction_agrees_with_brute_force() {
        for (f, p, e) in [
            (ns_t0(), 5, 2),
            (ns_t0(), 5, 3),
            (ns_t1(), 7, 2),
            (ns_t0(), 3, 2),
            (ns_t1(), 3, 2),
        ] {
            assert_eq!(
                local_obstruction(&f, p, e),
                Ok(brute_force_obstruction(&f, p, e)),
                "p = {p}, e = {e}"
            );
        }
        // The default precision is 4; both certificates already hold one level lower.
        assert!(brute_force_obstruction(&ns_t0(), 5, 3));
        assert_eq!(local_obstruction(&ns_t1(), 7, 3), Ok(true));
        assert!(brute_force_obstruction(&ns_t1(), 7, 2));
    }

    #[test]
    fn decisions() {
        assert_eq!(ns_t0().default_primes(), vec![(5, 4), (3, 4)]);
        assert_eq!(ns_t1().default_primes(), vec![(7, 4), (3, 4)]);
        assert_eq!(
            decide_isotropy(&ns_t0(), 50, None),
            IsotropyVerdict::Obstruction {
                prime: 5,
                precision: 4
            }
        );
        assert_eq!(
            decide_isotropy(&ns_t1(), 50, None),
            IsotropyVerdict::Obstruction {
                prime: 7,
                precision: 4
            }
        );
        // The prime 3 obstructs as well.
        assert!(decide_isotropy(&ns_t0(), 50, Some(&[3])).is_obstruction());
        assert!(decide_isotropy(&ns_t1(), 50, Some(&[3])).is_obstruction());
        assert_eq!(
            decide_isotropy(&diag(1, 1, -2), 50, None),
            IsotropyVerdict::Witness { witness: [1, 1, 1] }
        );
        assert_eq!(
            decide_isotropy(&ns_t0(), 5, Some(&[11])),
            IsotropyVerdict::Inconclusive {
                bound: 5,
                primes: vec![11]
            }
        );
    }

    #[test]
    fn shioda_inose() {
        assert_eq!(
            is_simple_shioda_inose(&t0(), 50, None).unwrap(),
            decide_isotropy(&ns_t0(), 50, None)
        );
        assert_eq!(
            is_simple_shioda_inose(&t1(), 50, None).unwrap(),
            decide_isotropy(&ns_t1(), 50, None)
        );
        let u_plus_2 = GramMatrix::hyperbolic_plane().direct_sum(&GramMatrix::diagonal(&[2]));
        assert!(matches!(
            is_simple_shioda_inose(&u_plus_2, 50, None),
            Ok(IsotropyVerdict::Witness { .. })
        ));
        assert_eq!(
            is_simple_shioda_inose(&GramMatrix::diagonal(&[2, 2, 2]), 5, None),
            Err(Error::WrongSignature {
                expected: (2, 1),
                found: (3, 0)
            })
        );
    }

    #[test]
    fn verdict_json() {
        let w = IsotropyVerdict::Witness { witness: [1, 1, 1] };
        assert_eq!(
            serde_json::to_string(&w).unwrap(),
            r#"{"kind":"witness","witness":[1,1,1]}"#
        );
        let o = IsotropyVerdict::Obstruction {
            prime: 5,
            precision: 4,
        };
        let json = serde_json::to_string(&o).unwrap();
        assert_eq!(json, r#"{"kind":"obstruction","prime":5,"precision":4}"#);
        assert_eq!(serde_json::from_str::<IsotropyVerdict>(&json).unwrap(), o);
    }

    fn arb_form() -> impl Strategy<Value = TernaryForm> {
        prop::array::uniform6(-6i64..=6).prop_filter_map("nondegenerate", |[a, b, c, d, e, g]| {
            let gram = GramMatrix::new(vec![vec![a, d, e], vec![d, b, g], vec![e, g, c]]).ok()?;
            TernaryForm::new(gram).ok()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn tree_search_matches_brute_force(f in arb_form(), pi in 0usize..3, e in 1u32..=2) {
            let p = [2u64, 3, 5][pi];
            prop_assert_eq!(local_obstruction(&f, p, e), Ok(brute_force_obstruction(&f, p, e)));
        }

        #[test]
        fn obstruction_excludes_witnesses(f in arb_form()) {
            for (p, e) in f.default_primes().into_iter().filter(|&(p, _)| p < 50) {
                if local_obstruction(&f, p, e) == Ok(true) {
                    prop_assert_eq!(find_isotropic(&f, 12), None);
                    prop_assert_eq!(local_obstruction(&f, p, e + 1), Ok(true));
                }
            }
            if let Some(w) = find_isotropic(&f, 6) {
                prop_assert_eq!(f.value(&w), 0);
                prop_assert!(w.iter().any(|&c| c != 0));
            }
        }
    }
}
