//! Tetrahedral-coordinate geometry: points, directions, lines and planes
//! relative to a reference tetrahedron A1A2A3A4, and the metric induced by
//! its edge lengths.
//!
//! Points are projective 4-tuples; operations that need actual coordinates
//! (distances, ratios) normalize to sum 1 themselves.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{det, maximal_minors, null_vector_3x4, LinalgError};
use crate::scalar::{int, EvalMode, Rational, Scalar, ScalarError, ZeroTest};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("zero test undecided at the current precision")]
    Undecided,
    #[error("points coincide")]
    IdenticalPoints,
    #[error("ratio weights sum to zero")]
    DegenerateRatio,
    #[error("lines are skew")]
    SkewLines,
    #[error("lines are parallel")]
    ParallelLines,
    #[error("lines coincide")]
    IdenticalLines,
    #[error("points are collinear")]
    CollinearPoints,
    #[error("points are coplanar")]
    CoplanarPoints,
    #[error("point lies on the line")]
    PointOnLine,
    #[error("directions are parallel")]
    ParallelDirections,
    #[error("line is parallel to the plane")]
    LineParallelToPlane,
    #[error("point is at infinity (coordinate sum zero)")]
    PointAtInfinity,
    #[error("direction components must sum to zero")]
    InvalidDirection,
    #[error("direction has non-positive squared length for this metric")]
    ImaginarySigma,
    #[error("linear system is singular")]
    SingularSystem,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

impl From<LinalgError> for GeomError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::Singular => GeomError::SingularSystem,
            LinalgError::Undecided => GeomError::Undecided,
            LinalgError::Scalar(s) => GeomError::Scalar(s),
        }
    }
}

pub type GeomResult<T> = Result<T, GeomError>;

pub fn is_zero(x: &Scalar) -> GeomResult<bool> {
    match x.is_zero() {
        ZeroTest::Zero => Ok(true),
        ZeroTest::NonZero => Ok(false),
        ZeroTest::Undecided => Err(GeomError::Undecided),
    }
}

/// True iff every value is zero; a single provably nonzero value decides
/// `false` even if others are undecided.
pub fn all_zero(xs: &[Scalar]) -> GeomResult<bool> {
    let mut undecided = false;
    for x in xs {
        match x.is_zero() {
            ZeroTest::NonZero => return Ok(false),
            ZeroTest::Undecided => undecided = true,
            ZeroTest::Zero => {}
        }
    }
    if undecided {
        Err(GeomError::Undecided)
    } else {
        Ok(true)
    }
}

fn sum4(v: &[Scalar; 4]) -> Scalar {
    &(&v[0] + &v[1]) + &(&v[2] + &v[3])
}

fn dot4(u: &[Scalar; 4], v: &[Scalar; 4]) -> Scalar {
    (0..4).fold(Scalar::zero(), |acc, i| acc + &u[i] * &v[i])
}

/// Projective point (x : y : z : w).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TetraPoint(pub [Scalar; 4]);

impl TetraPoint {
    pub fn new(v: [Scalar; 4]) -> Self {
        TetraPoint(v)
    }

    pub fn from_rationals(v: [Rational; 4]) -> Self {
        TetraPoint(v.map(Scalar::Exact))
    }

    pub fn from_ints(v: [i64; 4]) -> Self {
        TetraPoint(v.map(Scalar::from_int))
    }

    /// Vertex `A_{i+1}` (0-based index).
    pub fn vertex(i: usize) -> Self {
        let mut v = [0; 4];
        v[i] = 1;
        Self::from_ints(v)
    }

    pub fn coords(&self) -> &[Scalar; 4] {
        &self.0
    }

    pub fn sum(&self) -> Scalar {
        sum4(&self.0)
    }

    /// Exact coordinates with sum 1.
    pub fn normalize(&self) -> GeomResult<TetraPoint> {
        let s = self.sum();
        if is_zero(&s)? {
            return Err(GeomError::PointAtInfinity);
        }
        let inv = s.recip()?;
        Ok(TetraPoint(self.0.clone().map(|x| &x * &inv)))
    }

    pub fn is_exact(&self) -> bool {
        self.0.iter().all(Scalar::is_exact)
    }

    /// Converts every coordinate to an interval of the given precision.
    pub fn to_interval(&self, bits: u32) -> TetraPoint {
        TetraPoint(self.0.clone().map(|x| Scalar::Approx(x.to_interval(bits))))
    }

    pub fn proj_eq(&self, other: &TetraPoint) -> GeomResult<bool> {
        match crate::triangle::proj_eq(&self.0, &other.0) {
            Some(b) => Ok(b),
            None => Err(GeomError::Undecided),
        }
    }

    /// `self − other` on normalized representatives: a direction.
    pub fn displacement_to(&self, other: &TetraPoint) -> GeomResult<TetraDirection> {
        let p = self.normalize()?;
        let q = other.normalize()?;
        Ok(TetraDirection(std::array::from_fn(|i| &q.0[i] - &p.0[i])))
    }

    pub fn map_coords(&self, f: impl Fn(&Scalar) -> Scalar) -> TetraPoint {
        TetraPoint(std::array::from_fn(|i| f(&self.0[i])))
    }
}

/// Direction (K, L, M, N) with K + L + M + N = 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TetraDirection(pub [Scalar; 4]);

impl TetraDirection {
    pub fn new(v: [Scalar; 4]) -> GeomResult<Self> {
        if !is_zero(&sum4(&v))? || all_zero(&v)? {
            return Err(GeomError::InvalidDirection);
        }
        Ok(TetraDirection(v))
    }

    pub fn from_ints(v: [i64; 4]) -> GeomResult<Self> {
        Self::new(v.map(Scalar::from_int))
    }

    pub fn coords(&self) -> &[Scalar; 4] {
        &self.0
    }

    pub fn scale(&self, k: &Scalar) -> TetraDirection {
        TetraDirection(std::array::from_fn(|i| &self.0[i] * k))
    }
}

/// Line through `base` (normalized) with direction `dir`; its points are
/// `base + s·dir`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TetraLine {
    pub base: TetraPoint,
    pub dir: TetraDirection,
}

impl TetraLine {
    pub fn new(base: &TetraPoint, dir: TetraDirection) -> GeomResult<Self> {
        Ok(TetraLine {
            base: base.normalize()?,
            dir,
        })
    }

    pub fn point_at(&self, s: &Scalar) -> TetraPoint {
        TetraPoint(std::array::from_fn(|i| {
            &self.base.0[i] + &(&self.dir.0[i] * s)
        }))
    }

    pub fn contains(&self, p: &TetraPoint) -> GeomResult<bool> {
        let rows = [p.0.clone(), self.base.0.clone(), self.dir.0.clone()];
        all_zero(&maximal_minors(&rows))
    }
}

/// Plane A x + B y + C z + D w = 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TetraPlane(pub [Scalar; 4]);

impl TetraPlane {
    /// The face plane opposite vertex `i` (0-based): coordinate i = 0.
    pub fn face(i: usize) -> TetraPlane {
        let mut v = [0; 4];
        v[i] = 1;
        TetraPlane(v.map(Scalar::from_int))
    }

    pub fn eval(&self, p: &TetraPoint) -> Scalar {
        dot4(&self.0, &p.0)
    }

    pub fn contains(&self, p: &TetraPoint) -> GeomResult<bool> {
        is_zero(&self.eval(p))
    }
}

/// Squared edge lengths, with d23 = a1, d13 = a2, d12 = a3, d14 = b1,
/// d24 = b2, d34 = b3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMetric {
    sq: [[Rational; 4]; 4],
}

impl EdgeMetric {
    /// From squared lengths in the order (a1², a2², a3², b1², b2², b3²).
    pub fn from_squares(s: [Rational; 6]) -> Self {
        let z = || int(0);
        let mut sq: [[Rational; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| z()));
        let pairs = [(1, 2), (0, 2), (0, 1), (0, 3), (1, 3), (2, 3)];
        for ((i, j), v) in pairs.into_iter().zip(s) {
            sq[i][j] = v.clone();
            sq[j][i] = v;
        }
        EdgeMetric { sq }
    }

    /// Squared distance between vertices `i` and `j` (0-based).
    pub fn d2(&self, i: usize, j: usize) -> &Rational {
        &self.sq[i][j]
    }

    /// Cayley–Menger determinant; equals 288 V².
    pub fn cayley_menger(&self) -> Rational {
        let mut m: Vec<Vec<Rational>> = vec![vec![int(1); 5]; 5];
        m[0][0] = int(0);
        for i in 0..4 {
            for j in 0..4 {
                m[i + 1][j + 1] = self.sq[i][j].clone();
            }
        }
        crate::linalg::det_bareiss(&m)
    }

    pub fn volume_squared(&self) -> Rational {
        self.cayley_menger() / int(288)
    }

    /// Squared area of the face opposite vertex `i`.
    pub fn face_area_squared(&self, i: usize) -> Rational {
        let v: Vec<usize> = (0..4).filter(|&k| k != i).collect();
        let (p, q, r) = (
            self.d2(v[0], v[1]),
            self.d2(v[1], v[2]),
            self.d2(v[0], v[2]),
        );
        (int(2) * (p * q + q * r + r * p) - p * p - q * q - r * r) / int(16)
    }

    /// −Σ_{i<j} d²_ij u_i v_j summed symmetrically: the bilinear form whose
    /// quadratic form gives squared lengths of displacements.
    pub fn bilinear(&self, u: &[Scalar; 4], v: &[Scalar; 4]) -> Scalar {
        let mut acc = Scalar::zero();
        for i in 0..4 {
            for j in i + 1..4 {
                let d = Scalar::Exact(self.sq[i][j].clone());
                let t = &(&u[i] * &v[j]) + &(&u[j] * &v[i]);
                acc = acc - &d * &t;
            }
        }
        // halve to make it the polarization of the quadratic form
        &acc * &Scalar::Exact(crate::scalar::rat(1, 2))
    }

    pub fn quadratic(&self, u: &[Scalar; 4]) -> Scalar {
        self.bilinear(u, u)
    }
}

/// Four points are coplanar iff their coordinate determinant vanishes.
pub fn coplanar_residual(p: &[TetraPoint; 4]) -> Scalar {
    det(&p.iter().map(|q| q.0.to_vec()).collect::<Vec<_>>())
}

pub fn coplanar4(p: &[TetraPoint; 4]) -> GeomResult<bool> {
    is_zero(&coplanar_residual(p))
}

/// Collinearity as cross products of normalized differences.
pub fn collinear_residuals(
    p1: &TetraPoint,
    p2: &TetraPoint,
    p3: &TetraPoint,
) -> GeomResult<Vec<Scalar>> {
    let d1 = p1.displacement_to(p2)?;
    let d2 = p1.displacement_to(p3)?;
    let mut out = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            out.push(&d1.0[i] * &d2.0[j] - &d1.0[j] * &d2.0[i]);
        }
    }
    Ok(out)
}

pub fn collinear3(p1: &TetraPoint, p2: &TetraPoint, p3: &TetraPoint) -> GeomResult<bool> {
    all_zero(&collinear_residuals(p1, p2, p3)?)
}

/// Squared distance between two points.
pub fn squared_distance(p: &TetraPoint, q: &TetraPoint, m: &EdgeMetric) -> GeomResult<Scalar> {
    let d = p.displacement_to(q)?;
    Ok(m.quadratic(&d.0))
}

/// The line through two distinct points.
pub fn line_through(p: &TetraPoint, q: &TetraPoint) -> GeomResult<TetraLine> {
    let d = p.displacement_to(q)?;
    if all_zero(&d.0)? {
        return Err(GeomError::IdenticalPoints);
    }
    TetraLine::new(p, d)
}

/// The point dividing PQ in the ratio μ:λ.
pub fn divide_segment(
    p: &TetraPoint,
    q: &TetraPoint,
    mu: &Rational,
    lambda: &Rational,
) -> GeomResult<TetraPoint> {
    let total = mu + lambda;
    if num_traits::Zero::is_zero(&total) {
        return Err(GeomError::DegenerateRatio);
    }
    let (p, q) = (p.normalize()?, q.normalize()?);
    let (l, m) = (Scalar::Exact(lambda / &total), Scalar::Exact(mu / &total));
    Ok(TetraPoint(std::array::from_fn(|i| {
        &(&l * &p.0[i]) + &(&m * &q.0[i])
    })))
}

fn proportional(u: &[Scalar], v: &[Scalar]) -> GeomResult<bool> {
    match crate::triangle::proj_eq(u, v) {
        Some(b) => Ok(b),
        None => Err(GeomError::Undecided),
    }
}

/// Lines are parallel iff their directions are proportional.
pub fn lines_parallel(l1: &TetraLine, l2: &TetraLine) -> GeomResult<bool> {
    proportional(&l1.dir.0, &l2.dir.0)
}

/// The bilinear expression Σ d²_ij (D_i E_j + D_j E_i).
pub fn perpendicularity_form(d: &TetraDirection, e: &TetraDirection, m: &EdgeMetric) -> Scalar {
    // bilinear() carries the factor −1/2
    &m.bilinear(&d.0, &e.0) * &Scalar::from_int(-2)
}

pub fn lines_perpendicular(l1: &TetraLine, l2: &TetraLine, m: &EdgeMetric) -> GeomResult<bool> {
    is_zero(&perpendicularity_form(&l1.dir, &l2.dir, m))
}

/// Coplanarity of two lines: the determinant of (base1; dir1; base2; dir2).
pub fn intersect_residual(l1: &TetraLine, l2: &TetraLine) -> Scalar {
    det(&[
        l1.base.0.to_vec(),
        l1.dir.0.to_vec(),
        l2.base.0.to_vec(),
        l2.dir.0.to_vec(),
    ])
}

/// Whether two lines meet (parallel counts as meeting).
pub fn lines_intersect(l1: &TetraLine, l2: &TetraLine) -> GeomResult<bool> {
    is_zero(&intersect_residual(l1, l2))
}

/// The common point of two coplanar, non-parallel, distinct lines.
pub fn intersection_point(l1: &TetraLine, l2: &TetraLine) -> GeomResult<TetraPoint> {
    if lines_parallel(l1, l2)? {
        return if l1.contains(&l2.base)? {
            Err(GeomError::IdenticalLines)
        } else {
            Err(GeomError::ParallelLines)
        };
    }
    if !lines_intersect(l1, l2)? {
        return Err(GeomError::SkewLines);
    }
    // c1·base1 + c2·dir1 = c3·base2 + c4·dir2: a null vector of the 4×4
    // matrix with those columns; drop one equation at a time until the
    // remaining three are independent.
    let cols = [&l1.base.0, &l1.dir.0, &l2.base.0, &l2.dir.0];
    for skip in 0..4 {
        let rows: Vec<[Scalar; 4]> = (0..4)
            .filter(|&r| r != skip)
            .map(|r| {
                [
                    cols[0][r].clone(),
                    cols[1][r].clone(),
                    -cols[2][r].clone(),
                    -cols[3][r].clone(),
                ]
            })
            .collect();
        let c = null_vector_3x4(&[rows[0].clone(), rows[1].clone(), rows[2].clone()]);
        if all_zero(&c)? {
            continue;
        }
        let p = TetraPoint(std::array::from_fn(|i| {
            &(&c[0] * &cols[0][i]) + &(&c[1] * &cols[1][i])
        }));
        return p.normalize();
    }
    Err(GeomError::IdenticalLines)
}

/// On the interval backend: cos θ_i between the line and the
/// normal of face i, cos θ_i = 3V·D_i / (F_i σ), with σ² = −Σ d²_ij D_i D_j
/// the squared length of the direction.
pub fn direction_cosines(l: &TetraLine, m: &EdgeMetric, bits: u32) -> GeomResult<[Scalar; 4]> {
    let mode = EvalMode::Interval { bits };
    let sigma2 = m.quadratic(&l.dir.0);
    if sigma2.sign() != Some(std::cmp::Ordering::Greater) {
        return Err(GeomError::ImaginarySigma);
    }
    let sigma = sigma2.sqrt(mode)?;
    let v = Scalar::Exact(m.volume_squared()).sqrt(mode)?;
    let three_v = &Scalar::from_int(3) * &v;
    let mut out = Vec::with_capacity(4);
    for i in 0..4 {
        let f = Scalar::Exact(m.face_area_squared(i)).sqrt(mode)?;
        let num = &three_v * &l.dir.0[i];
        out.push(num.checked_div(&(&f * &sigma))?);
    }
    Ok(out.try_into().unwrap())
}

/// The plane through three points.
pub fn plane_through_3(
    p1: &TetraPoint,
    p2: &TetraPoint,
    p3: &TetraPoint,
) -> GeomResult<TetraPlane> {
    let c = null_vector_3x4(&[p1.0.clone(), p2.0.clone(), p3.0.clone()]);
    if all_zero(&c)? {
        return Err(GeomError::CollinearPoints);
    }
    Ok(TetraPlane(c))
}

/// Parallel planes: (A1−D1 : B1−D1 : C1−D1) ∝ (A2−D2 : B2−D2 : C2−D2).
pub fn planes_parallel(e1: &TetraPlane, e2: &TetraPlane) -> GeomResult<bool> {
    let red = |e: &TetraPlane| -> [Scalar; 3] { std::array::from_fn(|i| &e.0[i] - &e.0[3]) };
    proportional(&red(e1), &red(e2))
}

/// The plane through a point and a line.
pub fn plane_point_line(p: &TetraPoint, l: &TetraLine) -> GeomResult<TetraPlane> {
    let c = null_vector_3x4(&[p.0.clone(), l.base.0.clone(), l.dir.0.clone()]);
    if all_zero(&c)? {
        return Err(GeomError::PointOnLine);
    }
    Ok(TetraPlane(c))
}

/// The plane containing `l1` and parallel to direction `d2`.
pub fn plane_line_parallel_line(l1: &TetraLine, d2: &TetraDirection) -> GeomResult<TetraPlane> {
    let c = null_vector_3x4(&[l1.base.0.clone(), l1.dir.0.clone(), d2.0.clone()]);
    if all_zero(&c)? {
        return Err(GeomError::ParallelDirections);
    }
    Ok(TetraPlane(c))
}

/// Zero iff the line is parallel to the plane: AK + BL + CM + DN.
pub fn line_plane_parallel_residual(l: &TetraLine, e: &TetraPlane) -> Scalar {
    dot4(&e.0, &l.dir.0)
}

/// Where a line meets a plane.
pub fn line_plane_intersection(l: &TetraLine, e: &TetraPlane) -> GeomResult<TetraPoint> {
    let den = line_plane_parallel_residual(l, e);
    if is_zero(&den)? {
        return Err(GeomError::LineParallelToPlane);
    }
    let r = e.eval(&l.base).checked_div(&den)?;
    Ok(TetraPoint(std::array::from_fn(|i| {
        &l.base.0[i] - &(&r * &l.dir.0[i])
    })))
}
