//! Small dense linear algebra over [`Scalar`].
//!
//! Exact matrices use fraction-free (Bareiss) elimination after clearing
//! row denominators; matrices holding intervals fall back to cofactor
//! expansion, which keeps the enclosure tight for the 3×3–5×5 sizes used here.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{Rational, Scalar, ScalarError, ZeroTest};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is singular")]
    Singular,
    #[error("pivot could not be separated from zero at the current precision")]
    Undecided,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Zero test that refuses to guess.
pub fn decide_zero(x: &Scalar) -> Result<bool, LinalgError> {
    match x.is_zero() {
        ZeroTest::Zero => Ok(true),
        ZeroTest::NonZero => Ok(false),
        ZeroTest::Undecided => Err(LinalgError::Undecided),
    }
}

pub fn det(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    assert!(
        m.iter().all(|row| row.len() == n),
        "determinant of non-square matrix"
    );
    if n == 0 {
        return Scalar::one();
    }
    let exact: Option<Vec<Vec<Rational>>> = m
        .iter()
        .map(|row| row.iter().map(|x| x.as_rational().cloned()).collect())
        .collect();
    match exact {
        Some(q) => Scalar::Exact(det_bareiss(&q)),
        None => det_cofactor(m),
    }
}

/// Determinant of a rational matrix by Bareiss elimination on the integer
/// matrix obtained by scaling each row by its denominator lcm.
pub fn det_bareiss(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            scale *= &l;
            row.iter().map(|q| q.numer() * (&l / q.denom())).collect()
        })
        .collect();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return Rational::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone() * sign;
    Rational::new(d, scale)
}

fn det_cofactor(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    match n {
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        _ => {
            let mut acc = Scalar::zero();
            for j in 0..n {
                if m[0][j].is_zero() == ZeroTest::Zero {
                    continue;
                }
                let minor: Vec<Vec<Scalar>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][j] * &det_cofactor(&minor);
                acc = if j % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

/// Solves `a x = b` by Gaussian elimination with provably nonzero pivots.
pub fn solve(a: &[Vec<Scalar>], b: &[Scalar]) -> Result<Vec<Scalar>, LinalgError> {
    let n = a.len();
    let mut m: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for k in 0..n {
        let mut pivot = None;
        let mut undecided = false;
        for (i, row) in m.iter().enumerate().skip(k) {
            match row[k].is_zero() {
                ZeroTest::NonZero => {
                    pivot = Some(i);
                    break;
                }
                ZeroTest::Undecided => undecided = true,
                ZeroTest::Zero => {}
            }
        }
        let p = match (pivot, undecided) {
            (Some(p), _) => p,
            (None, true) => return Err(LinalgError::Undecided),
            (None, false) => return Err(LinalgError::Singular),
        };
        m.swap(k, p);
        let inv = m[k][k].recip()?;
        for j in k..=n {
            m[k][j] = &m[k][j] * &inv;
        }
        for i in 0..n {
            if i == k || m[i][k].is_zero() == ZeroTest::Zero {
                continue;
            }
            let f = m[i][k].clone();
            for j in k..=n {
                let v = &m[i][j] - &(&f * &m[k][j]);
                m[i][j] = v;
            }
        }
    }
    Ok(m.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Signed 3×3 minors of a 3×4 matrix: a vector orthogonal to all three rows.
pub fn null_vector_3x4(rows: &[[Scalar; 4]; 3]) -> [Scalar; 4] {
    let minor = |skip: usize| -> Scalar {
        let m: Vec<Vec<Scalar>> = rows
            .iter()
            .map(|r| {
                (0..4)
                    .filter(|&c| c != skip)
                    .map(|c| r[c].clone())
                    .collect()
            })
            .collect();
        det(&m)
    };
    [minor(0), -minor(1), minor(2), -minor(3)]
}

/// All `k×k` minors of a `k×4` matrix (k ≤ 4); they all vanish iff the rows
/// are linearly dependent.
pub fn maximal_minors(rows: &[[Scalar; 4]]) -> Vec<Scalar> {
    let k = rows.len();
    let mut out = Vec::new();
    let mut cols = Vec::with_capacity(k);
    fn rec(
        start: usize,
        k: usize,
        cols: &mut Vec<usize>,
        rows: &[[Scalar; 4]],
        out: &mut Vec<Scalar>,
    ) {
        if cols.len() == k {
            let m: Vec<Vec<Scalar>> = rows
                .iter()
                .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
                .collect();
            out.push(det(&m));
            return;
        }
        for c in start..4 {
            cols.push(c);
            rec(c + 1, k, cols, rows, out);
            cols.pop();
        }
    }
    rec(0, k, &mut cols, rows, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, EvalMode, Interval};
    use proptest::prelude::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn identity_and_permutation() {
        let id = vec![
            vec![s(1), s(0), s(0)],
            vec![s(0), s(1), s(0)],
            vec![s(0), s(0), s(1)],
        ];
        assert_eq!(det(&id), s(1));
        let swapped = vec![id[1].clone(), id[0].clone(), id[2].clone()];
        assert_eq!(det(&swapped), s(-1));
    }

    #[test]
    fn rational_entries() {
        let m = vec![
            vec![Scalar::Exact(rat(1, 2)), Scalar::Exact(rat(1, 3))],
            vec![Scalar::Exact(rat(1, 4)), Scalar::Exact(rat(1, 5))],
        ];
        assert_eq!(det(&m), Scalar::Exact(rat(1, 10) - rat(1, 12)));
    }

    #[test]
    fn solve_small_system() {
        let a = vec![vec![s(2), s(1)], vec![s(1), s(3)]];
        let x = solve(&a, &[s(3), s(5)]).unwrap();
        assert_eq!(x, vec![Scalar::Exact(rat(4, 5)), Scalar::Exact(rat(7, 5))]);
        let sing = vec![vec![s(1), s(2)], vec![s(2), s(4)]];
        assert_eq!(solve(&sing, &[s(1), s(1)]), Err(LinalgError::Singular));
    }

    #[test]
    fn null_vector_is_orthogonal() {
        let rows = [
            [s(1), s(2), s(3), s(4)],
            [s(0), s(1), s(-1), s(2)],
            [s(5), s(0), s(1), s(1)],
        ];
        let v = null_vector_3x4(&rows);
        for r in &rows {
            let dot = (0..4).fold(Scalar::zero(), |acc, i| acc + &r[i] * &v[i]);
            assert_eq!(dot, Scalar::zero());
        }
    }

    #[test]
    fn interval_determinant_encloses_exact() {
        let root2 = Scalar::from_int(2)
            .sqrt(EvalMode::Interval { bits: 80 })
            .unwrap();
        let m = vec![vec![root2.clone(), s(1)], vec![s(1), root2.clone()]];
        // sqrt2 * sqrt2 - 1 = 1
        match det(&m) {
            Scalar::Approx(i) => assert!(i.contains(&int(1))),
            Scalar::Exact(_) => panic!("expected enclosure"),
        }
        let _ = Interval::point(&int(0), 64);
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor(v in proptest::collection::vec((-30i64..30, 1i64..7), 16)) {
            let m: Vec<Vec<Scalar>> = v
                .chunks(4)
                .map(|row| row.iter().map(|&(n, d)| Scalar::Exact(rat(n, d))).collect())
                .collect();
            prop_assert_eq!(det(&m), det_cofactor(&m));
        }
    }
}
