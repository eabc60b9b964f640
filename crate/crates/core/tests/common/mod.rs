//! Independent oracles shared by the integration tests. Geometry here is
//! plain Cartesian: integer vertex coordinates, so every squared edge and
//! every point with rational tetrahedral coordinates is exactly rational.

#![allow(dead_code)]

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tetracenter::catalog::{builtin_catalog, Center, Transform};
use tetracenter::geom::{squared_distance, EdgeMetric, TetraLine, TetraPoint};
use tetracenter::model::{generate_one, TetraFamily};
use tetracenter::properties::{
    cevian, check, hyperboloid_center, pair_condition, spear_condition, spear_constructive,
    Precision, PropertyId, Verdict,
};
use tetracenter::scalar::{int, Rational, Scalar, ZeroTest};

pub type V3 = [Rational; 3];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sub(a: &V3, b: &V3) -> V3 {
    std::array::from_fn(|i| &a[i] - &b[i])
}

fn dot(a: &V3, b: &V3) -> Rational {
    (0..3).map(|i| &a[i] * &b[i]).sum()
}

fn det3(m: [&V3; 3]) -> Rational {
    let [a, b, c] = m;
    &a[0] * &(&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * &(&b[0] * &c[2] - &b[2] * &c[0])
        + &a[2] * &(&b[0] * &c[1] - &b[1] * &c[0])
}

/// A non-degenerate tetrahedron with integer vertices.
pub struct Cartesian {
    pub v: [V3; 4],
}

impl Cartesian {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        loop {
            let v: [V3; 4] =
                std::array::from_fn(|_| std::array::from_fn(|_| int(rng.gen_range(-9..=9))));
            let (e1, e2, e3) = (sub(&v[1], &v[0]), sub(&v[2], &v[0]), sub(&v[3], &v[0]));
            if !det3([&e1, &e2, &e3]).is_zero() {
                return Cartesian { v };
            }
        }
    }

    pub fn metric(&self) -> EdgeMetric {
        let d2 = |i: usize, j: usize| {
            let d = sub(&self.v[i], &self.v[j]);
            dot(&d, &d)
        };
        EdgeMetric::from_squares([d2(1, 2), d2(0, 2), d2(0, 1), d2(0, 3), d2(1, 3), d2(2, 3)])
    }

    /// Cartesian image of an exact point (normalized first).
    pub fn point(&self, p: &TetraPoint) -> V3 {
        let w: Vec<Rational> =
            p.0.iter()
                .map(|x| x.as_rational().expect("exact").clone())
                .collect();
        let s: Rational = w.iter().sum();
        std::array::from_fn(|k| (0..4).map(|i| &w[i] * &self.v[i][k]).sum::<Rational>() / &s)
    }

    /// Cartesian image of a direction (coordinates summing to zero).
    pub fn direction(&self, d: &[Scalar; 4]) -> V3 {
        std::array::from_fn(|k| {
            (0..4)
                .map(|i| d[i].as_rational().expect("exact") * &self.v[i][k])
                .sum::<Rational>()
        })
    }
}

pub fn random_point(rng: &mut ChaCha8Rng) -> TetraPoint {
    loop {
        let v: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-6..=12));
        if v.iter().sum::<i64>() != 0 {
            return TetraPoint::from_ints(v);
        }
    }
}

/// Positive point on face `i` (coordinate `i` zero).
pub fn face_point(rng: &mut ChaCha8Rng, i: usize) -> TetraPoint {
    TetraPoint::from_ints(std::array::from_fn(|k| {
        if k == i {
            0
        } else {
            rng.gen_range(1..=25)
        }
    }))
}

/// Squared distances against the Cartesian embedding: exactly on rational
/// points, and by enclosure when the points are first widened to 64-bit
/// intervals.
pub fn squared_distance_oracle(cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = rng(seed);
    let two64 = Rational::new(One::one(), num_bigint::BigInt::from(1u8) << 64);
    for k in 0..cases {
        let t = Cartesian::random(&mut rng);
        let m = t.metric();
        let (p, q) = (random_point(&mut rng), random_point(&mut rng));
        let d = sub(&t.point(&p), &t.point(&q));
        let want = dot(&d, &d);
        let got = squared_distance(&p, &q, &m).map_err(|e| format!("case {k}: {e}"))?;
        if got.as_rational() != Some(&want) {
            return Err(format!("case {k}: exact {got:?} vs Cartesian {want}"));
        }
        let approx = squared_distance(&p.to_interval(64), &q.to_interval(64), &m)
            .map_err(|e| format!("case {k}: {e}"))?;
        let iv = approx.to_interval(64);
        let scale = want.abs().max(int(1));
        if !iv.contains(&want) || iv.width() > &scale * &two64 * int(1 << 20) {
            return Err(format!("case {k}: interval {iv:?} misses {want}"));
        }
    }
    Ok(())
}

/// The closed-form spear condition against the constructive decision, on
/// pairs built to satisfy it and on unconstrained ones.
pub fn spear_oracle(cases: usize, seed: u64) -> Result<(usize, usize), String> {
    let mut rng = rng(seed);
    let (mut conforming, mut random) = (0, 0);
    for k in 0..cases {
        let p1 = face_point(&mut rng, 0);
        let p3 = face_point(&mut rng, 2);
        let p2 = if k % 2 == 0 {
            // z1 x2 y3 = y1 z2 x3
            let g = |p: &TetraPoint, i: usize| p.0[i].as_rational().unwrap().clone();
            let z2 = int(rng.gen_range(1..=25));
            let x2 = &(&g(&p1, 1) * &z2) * &g(&p3, 0) / (&g(&p1, 2) * &g(&p3, 1));
            TetraPoint::from_rationals([x2, int(0), z2, int(rng.gen_range(1..=25))])
        } else {
            face_point(&mut rng, 1)
        };
        let closed = spear_condition(&p1, &p2, &p3).is_zero() == ZeroTest::Zero;
        let built = spear_constructive(&p1, &p2, &p3)
            .map_err(|e| format!("case {k}: {e}"))?
            .iter()
            .all(|r| r.is_zero() == ZeroTest::Zero);
        if closed != built {
            return Err(format!(
                "case {k}: closed form {closed}, construction {built}"
            ));
        }
        if k % 2 == 0 && !closed {
            return Err(format!(
                "case {k}: conforming triple does not satisfy the condition"
            ));
        }
        if closed {
            conforming += 1;
        } else {
            random += 1;
        }
    }
    Ok((conforming, random))
}

/// Solves the square system `a x = b` by Gauss–Jordan elimination.
fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                for k in c..n {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                }
                let t = &f * &b[c];
                b[r] -= t;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Null vector of a 9×10 system, assuming rank 9.
fn null_vector(rows: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    // fix the last free unknown to 1 for whichever column makes the rest square
    for free in (0..10).rev() {
        let a: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| {
                (0..10)
                    .filter(|&c| c != free)
                    .map(|c| r[c].clone())
                    .collect()
            })
            .collect();
        let b: Vec<Rational> = rows.iter().map(|r| -r[free].clone()).collect();
        if let Some(x) = solve(a, b) {
            let mut v = x;
            v.insert(free, int(1));
            return Some(v);
        }
    }
    None
}

/// Center of the quadric through three skew Cartesian lines `p + s d`.
pub fn quadric_center(lines: &[(V3, V3); 3]) -> Option<V3> {
    let mono = |x: &V3| -> Vec<Rational> {
        vec![
            &x[0] * &x[0],
            &x[1] * &x[1],
            &x[2] * &x[2],
            &x[0] * &x[1],
            &x[0] * &x[2],
            &x[1] * &x[2],
            x[0].clone(),
            x[1].clone(),
            x[2].clone(),
            int(1),
        ]
    };
    let mut rows = Vec::new();
    for (p, d) in lines {
        for s in 0..3 {
            let x: V3 = std::array::from_fn(|k| &p[k] + &(&int(s) * &d[k]));
            rows.push(mono(&x));
        }
    }
    let q = null_vector(&rows)?;
    let two = int(2);
    let a = vec![
        vec![&two * &q[0], q[3].clone(), q[4].clone()],
        vec![q[3].clone(), &two * &q[1], q[5].clone()],
        vec![q[4].clone(), q[5].clone(), &two * &q[2]],
    ];
    let b = vec![-q[6].clone(), -q[7].clone(), -q[8].clone()];
    let c = solve(a, b)?;
    Some([c[0].clone(), c[1].clone(), c[2].clone()])
}

fn cartesian_line(t: &Cartesian, l: &TetraLine) -> (V3, V3) {
    (t.point(&l.base), t.direction(&l.dir.0))
}

/// Hyperboloid centers of three skew cevians against the Cartesian quadric.
pub fn hyperboloid_oracle(cases: usize, seed: u64) -> Result<usize, String> {
    let mut rng = rng(seed);
    let mut checked = 0;
    for k in 0..cases {
        let t = Cartesian::random(&mut rng);
        let pts: Vec<TetraPoint> = (0..3).map(|i| face_point(&mut rng, i)).collect();
        let skew = (0..3).all(|i| {
            (i + 1..3)
                .all(|j| pair_condition(i, &pts[i], j, &pts[j]).is_zero() == ZeroTest::NonZero)
        });
        if !skew {
            continue;
        }
        let l: Vec<TetraLine> = (0..3).map(|i| cevian(i, &pts[i]).unwrap()).collect();
        let got = hyperboloid_center(&l[0], &l[1], &l[2]).map_err(|e| format!("case {k}: {e}"))?;
        let lines = [
            cartesian_line(&t, &l[0]),
            cartesian_line(&t, &l[1]),
            cartesian_line(&t, &l[2]),
        ];
        let want =
            quadric_center(&lines).ok_or(format!("case {k}: oracle quadric is degenerate"))?;
        if t.point(&got) != want {
            return Err(format!(
                "case {k}: center {:?} vs quadric center {want:?}",
                t.point(&got)
            ));
        }
        checked += 1;
    }
    Ok(checked)
}

// ------------------------------------------------------------- closures

fn holds(v: &Verdict, prop: PropertyId) -> bool {
    v.holds()
        || (prop == PropertyId::Hyperbolic
            && matches!(
                v,
                Verdict::Degenerate {
                    condition_holds: Some(true),
                    ..
                }
            ))
}

/// For `pairs` (instance, center) pairs on which `prop` holds for a base
/// center, `prop` must also hold for every transformed center.
pub fn closure(
    bases: &[(TetraFamily, &str)],
    prop: PropertyId,
    transforms: &[Vec<Transform>],
    pairs: usize,
    seed: u64,
) -> Result<usize, String> {
    let cat = builtin_catalog();
    let prec = Precision::default();
    let mut found = 0;
    let mut vacuous = 0;
    let mut index = vec![0u64; bases.len()];
    let mut round = 0;
    while found < pairs {
        let b = round % bases.len();
        round += 1;
        if round > pairs * 20 {
            return Err(format!("only {found} holding base pairs found"));
        }
        let (family, id) = bases[b];
        let e = generate_one(family, seed, index[b]).map_err(|e| e.to_string())?;
        index[b] += 1;
        let base: Center = cat.resolve(id).map_err(|e| e.to_string())?;
        if !holds(&check(&e, &base, prop, &prec).verdict, prop) {
            continue;
        }
        found += 1;
        for ts in transforms {
            let c = ts.iter().fold(base.clone(), |c, t| c.with(*t));
            let v = check(&e, &c, prop, &prec).verdict;
            match v {
                Verdict::Skipped { .. }
                | Verdict::Degenerate {
                    condition_holds: None,
                    ..
                } => vacuous += 1,
                v if holds(&v, prop) => {}
                v => return Err(format!("{} on {e}: {}", c.label(), v.label())),
            }
        }
    }
    // transformed centers undefined on most instances would make this vacuous
    if vacuous * 10 > found * transforms.len() {
        return Err(format!(
            "{vacuous} of {} transformed checks were vacuous",
            found * transforms.len()
        ));
    }
    Ok(found)
}

pub fn isotomic_closure(pairs: usize, seed: u64) -> Result<usize, String> {
    closure(
        &[
            (TetraFamily::Circumscriptible, "X7"),
            (TetraFamily::Circumscriptible, "X8"),
            (TetraFamily::Orthocentric, "X4"),
            (TetraFamily::Isodynamic, "POW[r=1]"),
        ],
        PropertyId::Concur,
        &[vec![Transform::Isotomic]],
        pairs,
        seed,
    )
}

pub fn power_closure(pairs: usize, seed: u64) -> Result<usize, String> {
    closure(
        &[
            (TetraFamily::Circumscriptible, "X7"),
            (TetraFamily::Circumscriptible, "X8"),
            (TetraFamily::Orthocentric, "X4"),
            (TetraFamily::Isodynamic, "POW[r=1]"),
        ],
        PropertyId::Concur,
        &[
            vec![Transform::Power(2)],
            vec![Transform::Power(3)],
            vec![Transform::Power(-1)],
        ],
        pairs,
        seed,
    )
}

const HYPERBOLIC_BASES: [(TetraFamily, &str); 5] = [
    (TetraFamily::General, "POW[r=1]"),
    (TetraFamily::General, "POW[r=2]"),
    (TetraFamily::Circumscriptible, "X9"),
    (TetraFamily::Isodynamic, "X10"),
    (TetraFamily::Orthocentric, "X25"),
];

pub fn side_power_closure(pairs: usize, seed: u64) -> Result<usize, String> {
    let t = |r: i64, q: i64| vec![Transform::Power(q), Transform::SidePower(r)];
    closure(
        &HYPERBOLIC_BASES,
        PropertyId::Hyperbolic,
        &[t(1, 1), t(2, 1), t(0, 2), t(-2, 1)],
        pairs,
        seed,
    )
}

pub fn conjugate_closure(pairs: usize, seed: u64) -> Result<usize, String> {
    closure(
        &HYPERBOLIC_BASES,
        PropertyId::Hyperbolic,
        &[vec![Transform::Isotomic], vec![Transform::Isogonal]],
        pairs,
        seed,
    )
}
