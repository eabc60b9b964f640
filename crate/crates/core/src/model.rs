//! Tetrahedra given by edge lengths: validity, families, random rational
//! generators, face-center placement and the space centers.
//!
//! Edges: A2A3 = a1, A3A1 = a2, A1A2 = a3, A1A4 = b1, A2A4 = b2, A3A4 = b3.
//! Vertices are 0-based throughout (`A1` is index 0).

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::Center;
use crate::geom::{coplanar4, is_zero, EdgeMetric, GeomError, TetraPoint};
use crate::linalg::solve;
use crate::scalar::{
    format_rational, int, parse_rational, rat, EvalMode, Rational, Scalar, ScalarError,
};
use crate::triangle::{TriangleError, TriangleSides};

/// Unordered vertex pair of each edge, in the order a1, a2, a3, b1, b2, b3.
pub const EDGE_PAIRS: [(usize, usize); 6] = [(1, 2), (0, 2), (0, 1), (0, 3), (1, 3), (2, 3)];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid tetrahedron: {0}")]
    Invalid(InvalidReason),
    #[error("generator for {family} exhausted its budget of {attempts} attempts")]
    GenerationExhausted {
        family: TetraFamily,
        attempts: usize,
    },
    #[error("center is singular on face {face}")]
    EvaluationSingular { face: usize },
    #[error("points are coplanar")]
    CoplanarPoints,
    #[error("point is not on the Euler line")]
    NotOnLine,
    #[error("Euler line undefined: centroid and circumcenter coincide")]
    EulerLineDegenerate,
    #[error("zero test undecided at the current precision")]
    Undecided,
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Triangle(#[from] TriangleError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum InvalidReason {
    NonPositiveEdge,
    /// Face `i` (opposite vertex i, 0-based) violates a triangle inequality.
    FaceInequality(usize),
    /// The Cayley–Menger determinant is not positive.
    Flat,
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidReason::NonPositiveEdge => write!(f, "edge lengths must be positive"),
            InvalidReason::FaceInequality(i) => {
                write!(
                    f,
                    "face opposite A{} violates the triangle inequality",
                    i + 1
                )
            }
            InvalidReason::Flat => write!(f, "Cayley-Menger determinant is not positive"),
        }
    }
}

/// The six edge lengths.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "EdgeRepr", into = "EdgeRepr")]
pub struct EdgeLengths {
    pub a: [Rational; 3],
    pub b: [Rational; 3],
}

#[derive(Serialize, Deserialize)]
struct EdgeRepr {
    a: [String; 3],
    b: [String; 3],
}

impl From<EdgeLengths> for EdgeRepr {
    fn from(e: EdgeLengths) -> Self {
        EdgeRepr {
            a: e.a.each_ref().map(format_rational),
            b: e.b.each_ref().map(format_rational),
        }
    }
}

impl TryFrom<EdgeRepr> for EdgeLengths {
    type Error = ScalarError;
    fn try_from(r: EdgeRepr) -> Result<Self, ScalarError> {
        let parse = |v: &[String; 3]| -> Result<[Rational; 3], ScalarError> {
            Ok([
                parse_rational(&v[0])?,
                parse_rational(&v[1])?,
                parse_rational(&v[2])?,
            ])
        };
        Ok(EdgeLengths {
            a: parse(&r.a)?,
            b: parse(&r.b)?,
        })
    }
}

impl fmt::Display for EdgeLengths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let j = |v: &[Rational; 3]| {
            v.iter()
                .map(|q| q.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(f, "a=({}) b=({})", j(&self.a), j(&self.b))
    }
}

impl EdgeLengths {
    pub fn new(a: [Rational; 3], b: [Rational; 3]) -> Self {
        EdgeLengths { a, b }
    }

    pub fn from_ints(a: [i64; 3], b: [i64; 3]) -> Self {
        EdgeLengths {
            a: a.map(int),
            b: b.map(int),
        }
    }

    /// All six edges equal to 1.
    pub fn regular() -> Self {
        Self::from_ints([1; 3], [1; 3])
    }

    /// Lengths in the order a1, a2, a3, b1, b2, b3.
    pub fn six(&self) -> [&Rational; 6] {
        [
            &self.a[0], &self.a[1], &self.a[2], &self.b[0], &self.b[1], &self.b[2],
        ]
    }

    /// Length of the edge A_{i+1}A_{j+1}.
    pub fn length(&self, i: usize, j: usize) -> &Rational {
        assert!(i != j && i < 4 && j < 4);
        let key = (i.min(j), i.max(j));
        let k = EDGE_PAIRS.iter().position(|&p| p == key).unwrap();
        self.six()[k]
    }

    pub fn metric(&self) -> EdgeMetric {
        EdgeMetric::from_squares(self.six().map(|x| x * x))
    }

    /// The vertices of face `i` in increasing order.
    pub fn face_vertices(i: usize) -> [usize; 3] {
        let v: Vec<usize> = (0..4).filter(|&k| k != i).collect();
        [v[0], v[1], v[2]]
    }

    /// Side triple of face `i`: the side opposite each face vertex, in the
    /// order of [`face_vertices`](Self::face_vertices).
    pub fn face_side_triple(&self, i: usize) -> [Rational; 3] {
        let [u, v, w] = Self::face_vertices(i);
        [
            self.length(v, w).clone(),
            self.length(u, w).clone(),
            self.length(u, v).clone(),
        ]
    }

    pub fn face_sides(&self, i: usize) -> Result<TriangleSides, TriangleError> {
        let [a, b, c] = self.face_side_triple(i);
        TriangleSides::new(a, b, c)
    }

    /// Relabels the vertices: old vertex `i` becomes vertex `perm[i]`.
    pub fn relabel(&self, perm: [usize; 4]) -> EdgeLengths {
        let mut six: [Rational; 6] = std::array::from_fn(|_| Rational::zero());
        for (k, &(i, j)) in EDGE_PAIRS.iter().enumerate() {
            let (ni, nj) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
            let nk = EDGE_PAIRS.iter().position(|&p| p == (ni, nj)).unwrap();
            six[nk] = self.six()[k].clone();
        }
        let [a1, a2, a3, b1, b2, b3] = six;
        EdgeLengths::new([a1, a2, a3], [b1, b2, b3])
    }
}

/// Moves coordinate `i` to position `perm[i]`.
pub fn relabel_point(p: &TetraPoint, perm: [usize; 4]) -> TetraPoint {
    let mut v: [Scalar; 4] = std::array::from_fn(|_| Scalar::zero());
    for i in 0..4 {
        v[perm[i]] = p.0[i].clone();
    }
    TetraPoint(v)
}

/// Checks positivity, the four face triangle inequalities, and positive volume.
pub fn validate(e: &EdgeLengths) -> Result<(), InvalidReason> {
    if e.six().iter().any(|x| !x.is_positive()) {
        return Err(InvalidReason::NonPositiveEdge);
    }
    for i in (0..4).rev() {
        if e.face_sides(i).is_err() {
            return Err(InvalidReason::FaceInequality(i));
        }
    }
    if !e.metric().cayley_menger().is_positive() {
        return Err(InvalidReason::Flat);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TetraFamily {
    General,
    /// a_i = b_i
    Isosceles,
    /// a_i + b_i = t
    Circumscriptible,
    /// a_i b_i = t
    Isodynamic,
    /// a_i² + b_i² = t
    Orthocentric,
    /// 1/a_i + 1/b_i = t
    Harmonic,
    /// a_i b_i + a_i + b_i = t
    ProductPlusSum,
}

impl TetraFamily {
    pub const ALL: [TetraFamily; 7] = [
        TetraFamily::General,
        TetraFamily::Isosceles,
        TetraFamily::Circumscriptible,
        TetraFamily::Isodynamic,
        TetraFamily::Orthocentric,
        TetraFamily::Harmonic,
        TetraFamily::ProductPlusSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TetraFamily::General => "general",
            TetraFamily::Isosceles => "isosceles",
            TetraFamily::Circumscriptible => "circumscriptible",
            TetraFamily::Isodynamic => "isodynamic",
            TetraFamily::Orthocentric => "orthocentric",
            TetraFamily::Harmonic => "harmonic",
            TetraFamily::ProductPlusSum => "product-plus-sum",
        }
    }

    /// The per-edge-pair invariant; `None` for the unconstrained family.
    pub fn invariant(self, a: &Rational, b: &Rational) -> Option<Rational> {
        Some(match self {
            TetraFamily::General => return None,
            TetraFamily::Isosceles => a - b,
            TetraFamily::Circumscriptible => a + b,
            TetraFamily::Isodynamic => a * b,
            TetraFamily::Orthocentric => a * a + b * b,
            TetraFamily::Harmonic => a.recip() + b.recip(),
            TetraFamily::ProductPlusSum => a * b + a + b,
        })
    }
}

impl fmt::Display for TetraFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TetraFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let lower = s.trim().to_ascii_lowercase().replace('_', "-");
        TetraFamily::ALL
            .into_iter()
            .find(|f| f.name() == lower)
            .ok_or_else(|| {
                let names: Vec<_> = TetraFamily::ALL.iter().map(|f| f.name()).collect();
                format!(
                    "unknown family `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// Exact family test; the constant is taken from the first edge pair.
pub fn family_predicate(e: &EdgeLengths, f: TetraFamily) -> bool {
    let inv = |i: usize| f.invariant(&e.a[i], &e.b[i]);
    match inv(0) {
        None => true,
        Some(t) => (1..3).all(|i| inv(i).as_ref() == Some(&t)),
    }
}

/// Per-instance rejection budget.
pub const GENERATION_BUDGET: usize = 1000;

/// Uniform rational in `[lo, hi]` with denominator at most `max_den`.
fn rand_rational(rng: &mut impl Rng, lo: i64, hi: i64, max_den: i64) -> Rational {
    let d = rng.gen_range(1..=max_den);
    let n = rng.gen_range(lo * d..=hi * d);
    rat(n, d)
}

fn rand_in(rng: &mut impl Rng, lo: &Rational, hi: &Rational, max_den: i64) -> Rational {
    let u = rand_rational(rng, 0, 1, max_den);
    lo + (hi - lo) * u
}

fn candidate(f: TetraFamily, rng: &mut ChaCha8Rng) -> Option<EdgeLengths> {
    const DEN: i64 = 12;
    let a: [Rational; 3] = std::array::from_fn(|_| rand_rational(rng, 1, 2, DEN));
    let b = match f {
        TetraFamily::General => std::array::from_fn(|_| rand_rational(rng, 1, 2, DEN)),
        TetraFamily::Isosceles => a.clone(),
        TetraFamily::Circumscriptible => {
            let t = rand_rational(rng, 3, 4, DEN);
            a.clone().map(|x| &t - x)
        }
        TetraFamily::Isodynamic => {
            let t = rand_rational(rng, 2, 4, DEN);
            a.clone().map(|x| &t / x)
        }
        TetraFamily::Harmonic => {
            // b = a / (t a − 1) needs t a > 1
            let t = rand_in(rng, &rat(3, 4), &rat(3, 2), DEN);
            let mut b = Vec::with_capacity(3);
            for x in &a {
                let den = &t * x - Rational::one();
                if !den.is_positive() {
                    return None;
                }
                b.push(x / den);
            }
            b.try_into().unwrap()
        }
        TetraFamily::ProductPlusSum => {
            // (a + 1)(b + 1) = t + 1
            let s = rand_rational(rng, 5, 9, DEN);
            a.clone()
                .map(|x| &s / (x + Rational::one()) - Rational::one())
        }
        TetraFamily::Orthocentric => return orthocentric_candidate(rng),
    };
    Some(EdgeLengths::new(a, b))
}

/// Three rational points on x² + y² = p² + q² obtained by chord
/// parametrization through (p, q).
fn orthocentric_candidate(rng: &mut ChaCha8Rng) -> Option<EdgeLengths> {
    let p = rand_rational(rng, 1, 2, 6);
    let q = rand_rational(rng, 1, 2, 6);
    let mut a = Vec::with_capacity(3);
    let mut b = Vec::with_capacity(3);
    for _ in 0..3 {
        let m = rand_rational(rng, -3, 3, 4);
        let s = -(int(2) * (&p + &q * &m)) / (Rational::one() + &m * &m);
        let x = (&p + &s).abs();
        let y = (&q + &m * &s).abs();
        if x.is_zero() || y.is_zero() {
            return None;
        }
        a.push(x);
        b.push(y);
    }
    Some(EdgeLengths::new(
        a.try_into().unwrap(),
        b.try_into().unwrap(),
    ))
}

/// The `index`-th instance of a seeded stream; independent of other indices.
pub fn generate_one(f: TetraFamily, seed: u64, index: u64) -> Result<EdgeLengths, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    for _ in 0..GENERATION_BUDGET {
        if let Some(e) = candidate(f, &mut rng) {
            if validate(&e).is_ok() {
                debug_assert!(family_predicate(&e, f));
                return Ok(e);
            }
        }
    }
    Err(ModelError::GenerationExhausted {
        family: f,
        attempts: GENERATION_BUDGET,
    })
}

/// `count` valid instances of family `f`, deterministic per seed.
pub fn generate(f: TetraFamily, seed: u64, count: usize) -> Result<Vec<EdgeLengths>, ModelError> {
    (0..count as u64)
        .map(|i| generate_one(f, seed, i))
        .collect()
}

/// Places `center` on every face. Face `i` gets its areal coordinates at
/// the face vertices, zero at vertex `i`.
pub fn face_points(
    e: &EdgeLengths,
    center: &Center,
    mode: EvalMode,
) -> Result<[TetraPoint; 4], ModelError> {
    let mut out = Vec::with_capacity(4);
    for i in 0..4 {
        let sides = e.face_sides(i)?;
        let p = center.areal(&sides, mode).map_err(|err| match err {
            TriangleError::EvaluationSingular | TriangleError::OnSideline => {
                ModelError::EvaluationSingular { face: i }
            }
            other => ModelError::Triangle(other),
        })?;
        let mut v: [Scalar; 4] = std::array::from_fn(|_| Scalar::zero());
        for (k, &vert) in EdgeLengths::face_vertices(i).iter().enumerate() {
            v[vert] = p.0[k].clone();
        }
        out.push(TetraPoint(v));
    }
    Ok(out.try_into().unwrap())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceCenterKind {
    Centroid,
    Circumcenter,
    Incenter,
    MongePoint,
    EulerPoint,
}

impl SpaceCenterKind {
    pub const ALL: [SpaceCenterKind; 5] = [
        SpaceCenterKind::Centroid,
        SpaceCenterKind::Circumcenter,
        SpaceCenterKind::Incenter,
        SpaceCenterKind::MongePoint,
        SpaceCenterKind::EulerPoint,
    ];

    /// Whether the center stays rational for rational input.
    pub fn is_rational(self) -> bool {
        self != SpaceCenterKind::Incenter
    }
}

impl fmt::Display for SpaceCenterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceCenterKind::Centroid => "centroid",
            SpaceCenterKind::Circumcenter => "circumcenter",
            SpaceCenterKind::Incenter => "incenter",
            SpaceCenterKind::MongePoint => "Monge point",
            SpaceCenterKind::EulerPoint => "Euler point",
        })
    }
}

/// Unnormalized first circumcenter coordinate from squared edges
/// `[a1², a2², a3², b1², b2², b3²]`.
fn circumcenter_x(s: &[Rational; 6]) -> Rational {
    let [a1, a2, a3, b1, b2, b3] = s;
    a1 * b1 * (b2 + b3 - a1) + a2 * b2 * (b3 + a1 - b2) + a3 * b3 * (a1 + b2 - b3)
        - int(2) * a1 * b2 * b3
}

/// The circumcenter from the closed form, each coordinate obtained from
/// the first by relabeling.
pub fn circumcenter_closed_form(e: &EdgeLengths) -> TetraPoint {
    let coords: [Rational; 4] = std::array::from_fn(|k| {
        let mut perm = [0, 1, 2, 3];
        perm.swap(0, k);
        let sq = e.relabel(perm).six().map(|x| x * x);
        circumcenter_x(&sq)
    });
    TetraPoint::from_rationals(coords)
}

fn lin2(p: &TetraPoint, cp: &Scalar, q: &TetraPoint, cq: &Scalar) -> TetraPoint {
    TetraPoint(std::array::from_fn(|i| &(cp * &p.0[i]) + &(cq * &q.0[i])))
}

fn monge_euler(g: &TetraPoint, o: &TetraPoint, k: SpaceCenterKind) -> TetraPoint {
    let m = lin2(g, &Scalar::from_int(2), o, &Scalar::from_int(-1));
    match k {
        SpaceCenterKind::MongePoint => m,
        _ => lin2(g, &Scalar::Exact(rat(2, 3)), &m, &Scalar::Exact(rat(1, 3))),
    }
}

/// A space center of the reference tetrahedron, normalized.
pub fn space_center(
    e: &EdgeLengths,
    k: SpaceCenterKind,
    mode: EvalMode,
) -> Result<TetraPoint, ModelError> {
    let g = TetraPoint::from_ints([1; 4]).normalize()?;
    Ok(match k {
        SpaceCenterKind::Centroid => g,
        SpaceCenterKind::Circumcenter => circumcenter_closed_form(e).normalize()?,
        SpaceCenterKind::Incenter => {
            let m = e.metric();
            let mut f = Vec::with_capacity(4);
            for i in 0..4 {
                f.push(Scalar::Exact(m.face_area_squared(i)).sqrt(mode)?);
            }
            TetraPoint(f.try_into().unwrap()).normalize()?
        }
        SpaceCenterKind::MongePoint | SpaceCenterKind::EulerPoint => {
            let o = circumcenter_closed_form(e).normalize()?;
            monge_euler(&g, &o, k)
        }
    })
}

fn metric_bilinear(m: &EdgeMetric, u: &TetraPoint, v: &TetraPoint) -> Scalar {
    m.bilinear(&u.0, &v.0)
}

/// A space center of the tetrahedron with vertices `p`, in the reference
/// metric `m`.
pub fn space_center_of_points(
    p: &[TetraPoint; 4],
    m: &EdgeMetric,
    k: SpaceCenterKind,
    mode: EvalMode,
) -> Result<TetraPoint, ModelError> {
    match coplanar4(p) {
        Ok(true) => return Err(ModelError::CoplanarPoints),
        Ok(false) => {}
        Err(GeomError::Undecided) => return Err(ModelError::Undecided),
        Err(e) => return Err(e.into()),
    }
    let mut q = Vec::with_capacity(4);
    for x in p {
        q.push(x.normalize()?);
    }
    let q: [TetraPoint; 4] = q.try_into().unwrap();
    let quarter = Scalar::Exact(rat(1, 4));
    let g = TetraPoint(std::array::from_fn(|i| {
        &quarter * &(&(&q[0].0[i] + &q[1].0[i]) + &(&q[2].0[i] + &q[3].0[i]))
    }));
    let circumcenter = || -> Result<TetraPoint, ModelError> {
        // 2B(X, Q_k − Q_1) = B(Q_k, Q_k) − B(Q_1, Q_1), k = 2..4, and ΣX = 1
        let mut a = Vec::with_capacity(4);
        let mut rhs = Vec::with_capacity(4);
        let q11 = metric_bilinear(m, &q[0], &q[0]);
        for qk in &q[1..] {
            let d = TetraPoint(std::array::from_fn(|i| &qk.0[i] - &q[0].0[i]));
            let row: Vec<Scalar> = (0..4)
                .map(|i| &Scalar::from_int(2) * &metric_bilinear(m, &TetraPoint::vertex(i), &d))
                .collect();
            a.push(row);
            rhs.push(metric_bilinear(m, qk, qk) - q11.clone());
        }
        a.push(vec![Scalar::one(); 4]);
        rhs.push(Scalar::one());
        let x = solve(&a, &rhs).map_err(|e| ModelError::Geom(e.into()))?;
        Ok(TetraPoint(x.try_into().unwrap()))
    };
    Ok(match k {
        SpaceCenterKind::Centroid => g,
        SpaceCenterKind::Circumcenter => circumcenter()?,
        SpaceCenterKind::MongePoint | SpaceCenterKind::EulerPoint => {
            monge_euler(&g, &circumcenter()?, k)
        }
        SpaceCenterKind::Incenter => {
            // weight each vertex by the area of the opposite face
            let d2 = |i: usize, j: usize| -> Result<Scalar, ModelError> {
                Ok(crate::geom::squared_distance(&q[i], &q[j], m)?)
            };
            let mut acc: [Scalar; 4] = std::array::from_fn(|_| Scalar::zero());
            let mut total = Scalar::zero();
            for i in 0..4 {
                let [u, v, w] = EdgeLengths::face_vertices(i);
                let (x, y, z) = (d2(u, v)?, d2(v, w)?, d2(u, w)?);
                let two = Scalar::from_int(2);
                let s16 = &two * &(&(&(&x * &y) + &(&y * &z)) + &(&z * &x))
                    - &(&x * &x)
                    - &(&y * &y)
                    - &(&z * &z);
                let area = (&s16 * &Scalar::Exact(rat(1, 16))).sqrt(mode)?;
                for c in 0..4 {
                    acc[c] = &acc[c] + &(&area * &q[i].0[c]);
                }
                total = total + area;
            }
            let inv = total.recip()?;
            TetraPoint(acc.map(|x| &x * &inv))
        }
    })
}

/// Position of a point on the Euler line: p = O + t(G − O).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerParam {
    pub t: Scalar,
}

/// The parameter of `p` on the line through `o` (t = 0) and `g` (t = 1).
pub fn line_param(
    o: &TetraPoint,
    g: &TetraPoint,
    p: &TetraPoint,
) -> Result<EulerParam, ModelError> {
    let (o, g, p) = (o.normalize()?, g.normalize()?, p.normalize()?);
    let dir: [Scalar; 4] = std::array::from_fn(|i| &g.0[i] - &o.0[i]);
    let off: [Scalar; 4] = std::array::from_fn(|i| &p.0[i] - &o.0[i]);
    let zero =
        |x: &Scalar| -> Result<bool, ModelError> { is_zero(x).map_err(|_| ModelError::Undecided) };
    let mut pivot = None;
    for (i, d) in dir.iter().enumerate() {
        if !zero(d)? {
            pivot = Some(i);
            break;
        }
    }
    let i = pivot.ok_or(ModelError::EulerLineDegenerate)?;
    let t = off[i].checked_div(&dir[i])?;
    for j in 0..4 {
        if !zero(&(&off[j] - &(&t * &dir[j])))? {
            return Err(ModelError::NotOnLine);
        }
    }
    Ok(EulerParam { t })
}

/// Parameter of `p` on the Euler line of the reference tetrahedron.
pub fn euler_param(e: &EdgeLengths, p: &TetraPoint) -> Result<EulerParam, ModelError> {
    let o = space_center(e, SpaceCenterKind::Circumcenter, EvalMode::Exact)?;
    let g = space_center(e, SpaceCenterKind::Centroid, EvalMode::Exact)?;
    line_param(&o, &g, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin_catalog;
    use crate::geom::squared_distance;

    fn s(q: Rational) -> Scalar {
        Scalar::Exact(q)
    }

    fn assert_close(p: &TetraPoint, q: &TetraPoint) {
        for i in 0..4 {
            assert!(
                (p.0[i].to_f64() - q.0[i].to_f64()).abs() < 1e-15,
                "{p:?} vs {q:?}"
            );
        }
    }

    #[test]
    fn validation() {
        assert_eq!(validate(&EdgeLengths::regular()), Ok(()));
        let bad = EdgeLengths::from_ints([10, 1, 1], [1, 1, 1]);
        assert!(matches!(
            validate(&bad),
            Err(InvalidReason::FaceInequality(_))
        ));
        // isosceles with a right-angled face is flat
        let right = EdgeLengths::from_ints([3, 4, 5], [3, 4, 5]);
        assert_eq!(validate(&right), Err(InvalidReason::Flat));
        let acute = EdgeLengths::from_ints([4, 5, 6], [4, 5, 6]);
        assert_eq!(validate(&acute), Ok(()));
    }

    #[test]
    fn predicates() {
        for f in TetraFamily::ALL {
            assert!(family_predicate(&EdgeLengths::regular(), f), "{f}");
        }
        let iso = EdgeLengths::from_ints([2, 3, 4], [2, 3, 4]);
        assert!(family_predicate(&iso, TetraFamily::Isosceles));
        let dyn_ = EdgeLengths::from_ints([2, 3, 4], [6, 4, 3]);
        assert!(family_predicate(&dyn_, TetraFamily::Isodynamic));
        assert!(!family_predicate(&dyn_, TetraFamily::Circumscriptible));
    }

    #[test]
    fn generators_satisfy_their_family() {
        for f in TetraFamily::ALL {
            for e in generate(f, 11, 20).unwrap() {
                assert_eq!(validate(&e), Ok(()), "{f}: {e}");
                assert!(family_predicate(&e, f), "{f}: {e}");
            }
        }
        assert_eq!(
            generate(TetraFamily::General, 5, 4).unwrap(),
            generate(TetraFamily::General, 5, 4).unwrap()
        );
        assert_eq!(
            generate(TetraFamily::General, 5, 4).unwrap()[3],
            generate_one(TetraFamily::General, 5, 3).unwrap()
        );
    }

    #[test]
    fn json_round_trip() {
        let e = EdgeLengths::new(
            [rat(3, 2), int(2), rat(7, 5)],
            [int(1), rat(5, 3), rat(9, 7)],
        );
        let text = serde_json::to_string(&e).unwrap();
        assert_eq!(text, r#"{"a":["3/2","2/1","7/5"],"b":["1/1","5/3","9/7"]}"#);
        assert_eq!(serde_json::from_str::<EdgeLengths>(&text).unwrap(), e);
    }

    #[test]
    fn face_placement() {
        let e = EdgeLengths::from_ints([4, 5, 6], [5, 6, 7]);
        let cat = builtin_catalog();
        let g = face_points(&e, &cat.resolve("X2").unwrap(), EvalMode::Exact).unwrap();
        for (i, p) in g.iter().enumerate() {
            let mut want = [1; 4];
            want[i] = 0;
            assert!(p.proj_eq(&TetraPoint::from_ints(want)).unwrap());
        }
        // incenter (a : b : c) on face 4 is (a1, a2, a3, 0)
        let inc = face_points(&e, &cat.resolve("X1").unwrap(), EvalMode::Exact).unwrap();
        assert!(inc[3]
            .proj_eq(&TetraPoint::from_ints([4, 5, 6, 0]))
            .unwrap());
        // face 1 opposite sides: A2 ↔ b3, A3 ↔ b2, A4 ↔ a1
        assert!(inc[0]
            .proj_eq(&TetraPoint::from_ints([0, 7, 6, 4]))
            .unwrap());
    }

    #[test]
    fn relabeling_permutes_face_points() {
        let cat = builtin_catalog();
        let perm = [1, 2, 3, 0];
        for e in generate(TetraFamily::Isosceles, 3, 5).unwrap() {
            for id in ["X1", "X3", "X7", "X11"] {
                let c = cat.resolve(id).unwrap();
                let before = face_points(&e, &c, EvalMode::Exact).unwrap();
                let after = face_points(&e.relabel(perm), &c, EvalMode::Exact).unwrap();
                for i in 0..4 {
                    assert!(after[perm[i]]
                        .proj_eq(&relabel_point(&before[i], perm))
                        .unwrap());
                }
            }
        }
    }

    #[test]
    fn circumcenter_is_equidistant() {
        for e in generate(TetraFamily::General, 1, 25).unwrap() {
            let m = e.metric();
            let o = space_center(&e, SpaceCenterKind::Circumcenter, EvalMode::Exact).unwrap();
            let r0 = squared_distance(&o, &TetraPoint::vertex(0), &m).unwrap();
            for i in 1..4 {
                assert_eq!(
                    squared_distance(&o, &TetraPoint::vertex(i), &m).unwrap(),
                    r0
                );
            }
            let verts: [TetraPoint; 4] = std::array::from_fn(TetraPoint::vertex);
            for k in SpaceCenterKind::ALL {
                let mode = if k.is_rational() {
                    EvalMode::Exact
                } else {
                    EvalMode::Interval { bits: 128 }
                };
                let a = space_center(&e, k, mode).unwrap();
                let b = space_center_of_points(&verts, &m, k, mode).unwrap();
                assert_close(&a, &b);
                if k.is_rational() {
                    assert_eq!(a, b, "{k}");
                }
            }
        }
    }

    #[test]
    fn regular_centers_coincide() {
        let e = EdgeLengths::regular();
        let g = TetraPoint::from_ints([1; 4]);
        assert!(circumcenter_closed_form(&e).proj_eq(&g).unwrap());
        for k in SpaceCenterKind::ALL {
            let p = space_center(&e, k, EvalMode::Interval { bits: 64 }).unwrap();
            assert_close(&p, &g.normalize().unwrap());
        }
        assert_eq!(euler_param(&e, &g), Err(ModelError::EulerLineDegenerate));
    }

    #[test]
    fn euler_anchors() {
        let anchors = [
            (SpaceCenterKind::Circumcenter, int(0)),
            (SpaceCenterKind::Centroid, int(1)),
            (SpaceCenterKind::EulerPoint, rat(4, 3)),
            (SpaceCenterKind::MongePoint, int(2)),
        ];
        for e in generate(TetraFamily::General, 2, 20).unwrap() {
            for (k, t) in &anchors {
                let p = space_center(&e, *k, EvalMode::Exact).unwrap();
                assert_eq!(euler_param(&e, &p).unwrap().t, s(t.clone()));
            }
            let off = TetraPoint::from_ints([1, 2, 3, 4]);
            assert_eq!(euler_param(&e, &off), Err(ModelError::NotOnLine));
        }
    }

    #[test]
    fn incenter_is_equidistant_from_faces() {
        let bits = 160;
        for e in generate(TetraFamily::General, 4, 5).unwrap() {
            let m = e.metric();
            let i =
                space_center(&e, SpaceCenterKind::Incenter, EvalMode::Interval { bits }).unwrap();
            let v = Scalar::Exact(m.volume_squared())
                .sqrt(EvalMode::Interval { bits })
                .unwrap();
            let dist: Vec<f64> = (0..4)
                .map(|k| {
                    let f = Scalar::Exact(m.face_area_squared(k))
                        .sqrt(EvalMode::Interval { bits })
                        .unwrap();
                    let d = &(&i.0[k] * &(&Scalar::from_int(3) * &v))
                        .checked_div(&f)
                        .unwrap();
                    assert!(d.width() < rat(1, 1 << 62));
                    d.to_f64()
                })
                .collect();
            for d in &dist {
                assert!((d - dist[0]).abs() < 1e-15);
            }
        }
    }
}
