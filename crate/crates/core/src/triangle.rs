//! Planar machinery: triangle sides, trilinear and areal coordinates,
//! conjugations, and evaluation of center functions.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{CenterExpr, EvalError, EvalPoint};
use crate::scalar::{int, EvalMode, Rational, Scalar, ScalarError, ZeroTest};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangleError {
    #[error("sides ({0}, {1}, {2}) do not form a nondegenerate triangle")]
    DegenerateTriangle(Rational, Rational, Rational),
    #[error("point lies on a sideline (zero coordinate)")]
    OnSideline,
    #[error("center function is singular on this triangle")]
    EvaluationSingular,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl From<ScalarError> for TriangleError {
    fn from(e: ScalarError) -> Self {
        TriangleError::Eval(EvalError::Scalar(e))
    }
}

/// Positive side lengths satisfying the strict triangle inequality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleSides {
    a: Rational,
    b: Rational,
    c: Rational,
}

impl TriangleSides {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Result<Self, TriangleError> {
        let ok = a.is_positive()
            && b.is_positive()
            && c.is_positive()
            && a < &b + &c
            && b < &c + &a
            && c < &a + &b;
        if ok {
            Ok(TriangleSides { a, b, c })
        } else {
            Err(TriangleError::DegenerateTriangle(a, b, c))
        }
    }

    pub fn from_ints(a: i64, b: i64, c: i64) -> Result<Self, TriangleError> {
        Self::new(int(a), int(b), int(c))
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }
    pub fn b(&self) -> &Rational {
        &self.b
    }
    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn as_array(&self) -> [&Rational; 3] {
        [&self.a, &self.b, &self.c]
    }

    /// K² by Heron's formula.
    pub fn area_squared(&self) -> Rational {
        EvalPoint {
            sides: self.as_array(),
            r: None,
            mode: EvalMode::Exact,
        }
        .area_squared()
    }
}

/// Source form of a center function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordForm {
    Trilinear,
    Areal,
}

impl std::str::FromStr for CoordForm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "trilinear" => Ok(CoordForm::Trilinear),
            "areal" | "barycentric" => Ok(CoordForm::Areal),
            other => Err(format!("unknown coordinate form `{other}`")),
        }
    }
}

impl std::fmt::Display for CoordForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CoordForm::Trilinear => "trilinear",
            CoordForm::Areal => "areal",
        })
    }
}

/// Projective trilinear coordinates (α : β : γ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trilinear(pub [Scalar; 3]);

/// Projective areal (barycentric) coordinates (x : y : z).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Areal(pub [Scalar; 3]);

fn sides_scalar(s: &TriangleSides) -> [Scalar; 3] {
    [
        Scalar::Exact(s.a.clone()),
        Scalar::Exact(s.b.clone()),
        Scalar::Exact(s.c.clone()),
    ]
}

pub fn trilinear_to_areal(t: &Trilinear, s: &TriangleSides) -> Areal {
    let k = sides_scalar(s);
    Areal([&t.0[0] * &k[0], &t.0[1] * &k[1], &t.0[2] * &k[2]])
}

pub fn areal_to_trilinear(p: &Areal, s: &TriangleSides) -> Trilinear {
    let k = sides_scalar(s);
    // dividing by positive rationals never fails
    Trilinear([
        p.0[0].checked_div(&k[0]).unwrap(),
        p.0[1].checked_div(&k[1]).unwrap(),
        p.0[2].checked_div(&k[2]).unwrap(),
    ])
}

fn reciprocals(v: &[Scalar; 3]) -> Result<[Scalar; 3], TriangleError> {
    let mut out = Vec::with_capacity(3);
    for x in v {
        match x.is_zero() {
            ZeroTest::NonZero => out.push(x.recip()?),
            _ => return Err(TriangleError::OnSideline),
        }
    }
    Ok(out.try_into().unwrap())
}

/// (x : y : z) ↦ (1/x : 1/y : 1/z).
pub fn isotomic_conjugate(p: &Areal) -> Result<Areal, TriangleError> {
    Ok(Areal(reciprocals(&p.0)?))
}

/// (x : y : z) ↦ (a²/x : b²/y : c²/z), the areal form of trilinear reciprocation.
pub fn isogonal_conjugate(p: &Areal, s: &TriangleSides) -> Result<Areal, TriangleError> {
    let r = reciprocals(&p.0)?;
    let k = sides_scalar(s);
    Ok(Areal([
        &(&k[0] * &k[0]) * &r[0],
        &(&k[1] * &k[1]) * &r[1],
        &(&k[2] * &k[2]) * &r[2],
    ]))
}

/// Projective equality via vanishing 2×2 cross products. `None` when an
/// interval comparison is inconclusive.
pub fn proj_eq(u: &[Scalar], v: &[Scalar]) -> Option<bool> {
    assert_eq!(u.len(), v.len());
    let u_zero = u.iter().all(|x| x.is_zero() == ZeroTest::Zero);
    let v_zero = v.iter().all(|x| x.is_zero() == ZeroTest::Zero);
    if u_zero || v_zero {
        return Some(u_zero && v_zero);
    }
    let mut undecided = false;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            match (&u[i] * &v[j] - &u[j] * &v[i]).is_zero() {
                ZeroTest::Zero => {}
                ZeroTest::NonZero => return Some(false),
                ZeroTest::Undecided => undecided = true,
            }
        }
    }
    if undecided {
        None
    } else {
        Some(true)
    }
}

/// Evaluates `f` at (a,b,c), (b,c,a), (c,a,b).
pub fn eval_center(
    f: &CenterExpr,
    s: &TriangleSides,
    r: Option<&Rational>,
    mode: EvalMode,
) -> Result<[Scalar; 3], TriangleError> {
    let [a, b, c] = s.as_array();
    let mut out = Vec::with_capacity(3);
    for args in [[a, b, c], [b, c, a], [c, a, b]] {
        let v = f.eval(&EvalPoint {
            sides: args,
            r,
            mode,
        });
        match v {
            Ok(v) => out.push(v),
            Err(EvalError::Scalar(
                ScalarError::DivisionByZero | ScalarError::IndeterminateDivision,
            )) => return Err(TriangleError::EvaluationSingular),
            Err(e) => return Err(e.into()),
        }
    }
    if out.iter().all(|x| x.is_zero() == ZeroTest::Zero) {
        return Err(TriangleError::EvaluationSingular);
    }
    Ok(out.try_into().unwrap())
}

/// Evaluates a center function given in `form` and returns areal coordinates.
pub fn eval_center_areal(
    f: &CenterExpr,
    form: CoordForm,
    s: &TriangleSides,
    r: Option<&Rational>,
    mode: EvalMode,
) -> Result<Areal, TriangleError> {
    let v = eval_center(f, s, r, mode)?;
    Ok(match form {
        CoordForm::Areal => Areal(v),
        CoordForm::Trilinear => trilinear_to_areal(&Trilinear(v), s),
    })
}

/// Areal coordinates normalized to sum 1.
pub fn normalize_areal(p: &Areal) -> Result<[Scalar; 3], TriangleError> {
    let sum = &(&p.0[0] + &p.0[1]) + &p.0[2];
    if sum.is_zero() != ZeroTest::NonZero {
        return Err(TriangleError::EvaluationSingular);
    }
    Ok([
        p.0[0].checked_div(&sum)?,
        p.0[1].checked_div(&sum)?,
        p.0[2].checked_div(&sum)?,
    ])
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter()
        .all(|x| x.as_rational().is_some_and(|q| q.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_center_expr;
    use crate::scalar::rat;
    use proptest::prelude::*;

    fn ex(v: [i64; 3]) -> [Scalar; 3] {
        v.map(Scalar::from_int)
    }

    fn t345() -> TriangleSides {
        TriangleSides::from_ints(3, 4, 5).unwrap()
    }

    #[test]
    fn degenerate_rejected() {
        assert!(TriangleSides::from_ints(1, 2, 3).is_err());
        assert!(TriangleSides::from_ints(0, 2, 2).is_err());
    }

    #[test]
    fn incenter_constant_function() {
        let f = parse_center_expr("1").unwrap();
        let v = eval_center(&f, &t345(), None, EvalMode::Exact).unwrap();
        assert_eq!(v, ex([1, 1, 1]));
    }

    #[test]
    fn nagel_areal_345() {
        let f = parse_center_expr("b+c-a").unwrap();
        let v = eval_center(&f, &t345(), None, EvalMode::Exact).unwrap();
        assert_eq!(v, ex([6, 4, 2]));
        assert_eq!(proj_eq(&v, &ex([3, 2, 1])), Some(true));
    }

    #[test]
    fn circumcenter_of_right_triangle_is_hypotenuse_midpoint() {
        let f = parse_center_expr("a^2*(b^2+c^2-a^2)").unwrap();
        let v = eval_center(&f, &t345(), None, EvalMode::Exact).unwrap();
        assert_eq!(v, ex([288, 288, 0]));
        // Cartesian oracle: A=(0,0), B=(4,0)... with a=3 opposite A the right
        // angle is at C, so the circumcenter is the midpoint of AB.
        assert_eq!(proj_eq(&v, &ex([1, 1, 0])), Some(true));
    }

    #[test]
    fn conversions() {
        let s = t345();
        let inc = trilinear_to_areal(&Trilinear(ex([1, 1, 1])), &s);
        assert_eq!(inc.0, ex([3, 4, 5]));
        let centroid = trilinear_to_areal(
            &Trilinear([
                Scalar::Exact(rat(1, 3)),
                Scalar::Exact(rat(1, 4)),
                Scalar::Exact(rat(1, 5)),
            ]),
            &s,
        );
        assert_eq!(centroid.0, ex([1, 1, 1]));
    }

    #[test]
    fn isotomic_examples() {
        assert_eq!(
            isotomic_conjugate(&Areal(ex([1, 1, 1]))).unwrap().0,
            ex([1, 1, 1])
        );
        let c = isotomic_conjugate(&Areal(ex([3, 2, 1]))).unwrap();
        assert_eq!(proj_eq(&c.0, &ex([2, 3, 6])), Some(true));
        assert_eq!(
            isotomic_conjugate(&Areal(ex([0, 2, 1]))),
            Err(TriangleError::OnSideline)
        );
    }

    #[test]
    fn isogonal_examples() {
        let s = t345();
        let inc = Areal(ex([3, 4, 5]));
        assert_eq!(
            proj_eq(&isogonal_conjugate(&inc, &s).unwrap().0, &inc.0),
            Some(true)
        );
        // the centroid maps to the symmedian point (a² : b² : c²)
        let k = isogonal_conjugate(&Areal(ex([1, 1, 1])), &s).unwrap();
        assert_eq!(k.0, ex([9, 16, 25]));
    }

    fn sides_strategy() -> impl Strategy<Value = TriangleSides> {
        (1i64..40, 1i64..40, 1i64..40, 1i64..6)
            .prop_filter_map("triangle inequality", |(a, b, c, d)| {
                TriangleSides::new(rat(a, d), rat(b, d), rat(c, d)).ok()
            })
    }

    fn point_strategy() -> impl Strategy<Value = [Scalar; 3]> {
        [
            (1i64..50, 1i64..9),
            (1i64..50, 1i64..9),
            (-50i64..-1, 1i64..9),
        ]
        .prop_map(|v| v.map(|(n, d)| Scalar::Exact(rat(n, d))))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn areal_trilinear_round_trip(s in sides_strategy(), p in point_strategy()) {
            let back = trilinear_to_areal(&areal_to_trilinear(&Areal(p.clone()), &s), &s);
            prop_assert_eq!(proj_eq(&back.0, &p), Some(true));
        }

        #[test]
        fn isogonal_is_trilinear_reciprocation(s in sides_strategy(), p in point_strategy()) {
            let via_formula = isogonal_conjugate(&Areal(p.clone()), &s).unwrap();
            let t = areal_to_trilinear(&Areal(p.clone()), &s);
            let recip = Trilinear(t.0.clone().map(|x| x.recip().unwrap()));
            let via_trilinear = trilinear_to_areal(&recip, &s);
            prop_assert_eq!(proj_eq(&via_formula.0, &via_trilinear.0), Some(true));
            let twice = isogonal_conjugate(&via_formula, &s).unwrap();
            prop_assert_eq!(proj_eq(&twice.0, &p), Some(true));
        }

        #[test]
        fn isotomic_involution(p in point_strategy()) {
            let twice = isotomic_conjugate(&isotomic_conjugate(&Areal(p.clone())).unwrap()).unwrap();
            prop_assert_eq!(proj_eq(&twice.0, &p), Some(true));
        }
    }
}
