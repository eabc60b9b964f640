//! The sixteen screened properties of a configuration of four face points,
//! plus the closed-form conditions behind them (pairwise concurrence,
//! spear lines, normals, planarity determinants).
//!
//! Every check reduces to a list of residuals that vanish exactly when the
//! property holds. A driver evaluates them at increasing interval precision;
//! rational inputs stay rational throughout, so a rational center yields an
//! exact verdict on the first round.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::catalog::Center;
use crate::geom::{
    collinear_residuals, coplanar_residual, intersect_residual, line_plane_intersection,
    line_through, plane_line_parallel_line, plane_point_line, squared_distance, EdgeMetric,
    GeomError, TetraLine, TetraPlane, TetraPoint,
};
use crate::linalg::{null_vector_3x4, LinalgError};
use crate::model::{
    face_points, line_param, space_center, space_center_of_points, EdgeLengths, ModelError,
    SpaceCenterKind, EDGE_PAIRS,
};
use crate::scalar::{
    compare_radical_sums, format_rational, int, EvalMode, Rational, Scalar, ScalarError, ZeroTest,
    DEFAULT_PRECISION_CAP,
};
use crate::triangle::TriangleError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

impl From<LinalgError> for PropError {
    fn from(e: LinalgError) -> Self {
        PropError::Geom(e.into())
    }
}

impl From<TriangleError> for PropError {
    fn from(e: TriangleError) -> Self {
        PropError::Model(e.into())
    }
}

enum ErrorClass {
    /// More precision may help.
    Refine,
    Singular(String),
    Degenerate(String),
    Other(String),
}

fn scalar_cause(e: &PropError) -> Option<&ScalarError> {
    use crate::expr::EvalError;
    fn tri(t: &TriangleError) -> Option<&ScalarError> {
        match t {
            TriangleError::Eval(EvalError::Scalar(s)) => Some(s),
            _ => None,
        }
    }
    match e {
        PropError::Scalar(s) => Some(s),
        PropError::Geom(GeomError::Scalar(s)) => Some(s),
        PropError::Model(ModelError::Scalar(s)) => Some(s),
        PropError::Model(ModelError::Geom(GeomError::Scalar(s))) => Some(s),
        PropError::Model(ModelError::Triangle(t)) => tri(t),
        _ => None,
    }
}

fn classify(e: &PropError) -> ErrorClass {
    if let Some(s) = scalar_cause(e) {
        return match s {
            ScalarError::IndeterminateDivision | ScalarError::IrrationalInExactMode => {
                ErrorClass::Refine
            }
            other => ErrorClass::Other(other.to_string()),
        };
    }
    match e {
        PropError::Geom(GeomError::Undecided)
        | PropError::Model(ModelError::Undecided)
        | PropError::Model(ModelError::Geom(GeomError::Undecided)) => ErrorClass::Refine,
        PropError::Model(ModelError::EvaluationSingular { .. }) => {
            ErrorClass::Singular(e.to_string())
        }
        PropError::Model(ModelError::CoplanarPoints)
        | PropError::Model(ModelError::EulerLineDegenerate)
        | PropError::Geom(GeomError::CoplanarPoints) => ErrorClass::Degenerate(e.to_string()),
        _ => ErrorClass::Other(e.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropertyId {
    Concur = 1,
    Hyperbolic = 2,
    Coplanar = 3,
    Collinear = 4,
    NormalsConcur = 5,
    FacesParallel = 6,
    CentralIsosceles = 7,
    CentralRegular = 8,
    CentralIsodynamic = 9,
    CentralCircumscriptible = 10,
    CentralOrthocentric = 11,
    SimilarToReference = 12,
    EqualCevians = 13,
    SharedSpaceCenter = 14,
    CentralCenterOnRefEuler = 15,
    RefCenterOnCentralEuler = 16,
}

impl PropertyId {
    pub const ALL: [PropertyId; 16] = [
        PropertyId::Concur,
        PropertyId::Hyperbolic,
        PropertyId::Coplanar,
        PropertyId::Collinear,
        PropertyId::NormalsConcur,
        PropertyId::FacesParallel,
        PropertyId::CentralIsosceles,
        PropertyId::CentralRegular,
        PropertyId::CentralIsodynamic,
        PropertyId::CentralCircumscriptible,
        PropertyId::CentralOrthocentric,
        PropertyId::SimilarToReference,
        PropertyId::EqualCevians,
        PropertyId::SharedSpaceCenter,
        PropertyId::CentralCenterOnRefEuler,
        PropertyId::RefCenterOnCentralEuler,
    ];

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.get((n as usize).checked_sub(1)?).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            PropertyId::Concur => "Concur",
            PropertyId::Hyperbolic => "Hyperbolic",
            PropertyId::Coplanar => "Coplanar",
            PropertyId::Collinear => "Collinear",
            PropertyId::NormalsConcur => "NormalsConcur",
            PropertyId::FacesParallel => "FacesParallel",
            PropertyId::CentralIsosceles => "CentralIsosceles",
            PropertyId::CentralRegular => "CentralRegular",
            PropertyId::CentralIsodynamic => "CentralIsodynamic",
            PropertyId::CentralCircumscriptible => "CentralCircumscriptible",
            PropertyId::CentralOrthocentric => "CentralOrthocentric",
            PropertyId::SimilarToReference => "SimilarToReference",
            PropertyId::EqualCevians => "EqualCevians",
            PropertyId::SharedSpaceCenter => "SharedSpaceCenter",
            PropertyId::CentralCenterOnRefEuler => "CentralCenterOnRefEuler",
            PropertyId::RefCenterOnCentralEuler => "RefCenterOnCentralEuler",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            PropertyId::Concur => "cevians to the four centers concur",
            PropertyId::Hyperbolic => "cevians form a hyperbolic group",
            PropertyId::Coplanar => "the four centers are coplanar",
            PropertyId::Collinear => "the four centers are collinear",
            PropertyId::NormalsConcur => "normals to the faces at the centers concur",
            PropertyId::FacesParallel => "central faces parallel to reference faces",
            PropertyId::CentralIsosceles => "central tetrahedron is isosceles",
            PropertyId::CentralRegular => "central tetrahedron is regular",
            PropertyId::CentralIsodynamic => "central tetrahedron is isodynamic",
            PropertyId::CentralCircumscriptible => "central tetrahedron is circumscriptible",
            PropertyId::CentralOrthocentric => "central tetrahedron is orthocentric",
            PropertyId::SimilarToReference => "central tetrahedron is similar to the reference",
            PropertyId::EqualCevians => "cevians have the same length",
            PropertyId::SharedSpaceCenter => "central and reference share a space center",
            PropertyId::CentralCenterOnRefEuler => {
                "a central space center lies on the reference Euler line"
            }
            PropertyId::RefCenterOnCentralEuler => {
                "a reference space center lies on the central Euler line"
            }
        }
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.number())
    }
}

impl Serialize for PropertyId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

impl FromStr for PropertyId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        let digits = t.strip_prefix(['P', 'p']).unwrap_or(t);
        if let Ok(n) = digits.parse::<u8>() {
            return PropertyId::from_number(n)
                .ok_or_else(|| format!("property number {n} out of range 1..16"));
        }
        let norm = |x: &str| x.to_ascii_lowercase().replace(['-', '_'], "");
        PropertyId::ALL
            .into_iter()
            .find(|p| norm(p.name()) == norm(t))
            .ok_or_else(|| format!("unknown property `{s}`"))
    }
}

fn ser_rational<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

/// Result of a property check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    /// Every residual vanished in exact rational arithmetic.
    HoldsExact,
    /// Residuals enclose zero at the precision cap.
    HoldsNumeric {
        #[serde(serialize_with = "ser_rational")]
        width: Rational,
        bits: u32,
    },
    /// A residual is provably nonzero.
    Fails { residual: Scalar },
    /// A structural zero test stayed undecided at the cap.
    Undecided { bits: u32 },
    /// The property's precondition fails; `condition_holds` reports the
    /// defining condition anyway when it could be evaluated.
    Degenerate {
        reason: String,
        condition_holds: Option<bool>,
    },
    /// The center could not be placed or evaluated.
    Skipped { reason: String },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::HoldsExact | Verdict::HoldsNumeric { .. })
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::HoldsExact => "holds-exact",
            Verdict::HoldsNumeric { .. } => "holds-numeric",
            Verdict::Fails { .. } => "fails",
            Verdict::Undecided { .. } => "undecided",
            Verdict::Degenerate { .. } => "degenerate",
            Verdict::Skipped { .. } => "skipped",
        }
    }
}

/// Optional data attached to a verdict.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Payload {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<TetraPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperboloid_center: Option<TetraPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_invariant: Option<bool>,
    /// (central, reference) space centers that coincide.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub coincidences: Vec<(SpaceCenterKind, SpaceCenterKind)>,
    /// Space centers found on an Euler line, with the line parameter.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub euler_params: Vec<(SpaceCenterKind, Scalar)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub similarity_ratio2: Option<Scalar>,
}

impl Payload {
    pub fn is_empty(&self) -> bool {
        *self == Payload::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Payload::is_empty")]
    pub payload: Payload,
}

impl Outcome {
    fn bare(verdict: Verdict) -> Self {
        Outcome {
            verdict,
            payload: Payload::default(),
        }
    }
}

/// What one evaluation round produced.
#[derive(Debug, Clone)]
pub enum Status {
    /// Holds iff some group has all residuals zero.
    AnyOf(Vec<Vec<Scalar>>),
    Degenerate {
        reason: String,
        condition_holds: Option<bool>,
    },
    /// A structural test could not be decided at this precision.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub status: Status,
    pub payload: Payload,
}

impl Evaluation {
    pub fn residuals(v: Vec<Scalar>) -> Self {
        Evaluation {
            status: Status::AnyOf(vec![v]),
            payload: Payload::default(),
        }
    }

    fn with(mut self, payload: Payload) -> Self {
        self.payload = payload;
        self
    }
}

enum Decision {
    Holds { exact: bool },
    Fails(Scalar),
    Straddle(Rational),
}

fn decide_group(v: &[Scalar]) -> Decision {
    let mut width = Rational::zero();
    let mut exact = true;
    for x in v {
        match x.is_zero() {
            ZeroTest::NonZero => return Decision::Fails(x.clone()),
            ZeroTest::Undecided => {
                exact = false;
                width = width.max(x.width());
            }
            ZeroTest::Zero => exact &= x.is_exact(),
        }
    }
    if exact {
        Decision::Holds { exact: true }
    } else if width.is_zero() {
        Decision::Holds { exact: false }
    } else {
        Decision::Straddle(width)
    }
}

fn decide(groups: &[Vec<Scalar>]) -> Decision {
    let mut first_fail = None;
    let mut best: Option<Decision> = None;
    for g in groups {
        match decide_group(g) {
            Decision::Holds { exact: true } => return Decision::Holds { exact: true },
            Decision::Fails(r) => {
                first_fail.get_or_insert(r);
            }
            d @ Decision::Holds { exact: false } => best = Some(d),
            Decision::Straddle(w) => {
                if !matches!(best, Some(Decision::Holds { .. })) {
                    let narrower = match &best {
                        Some(Decision::Straddle(b)) => w < *b,
                        _ => true,
                    };
                    if narrower {
                        best = Some(Decision::Straddle(w));
                    }
                }
            }
        }
    }
    best.unwrap_or_else(|| Decision::Fails(first_fail.expect("at least one residual group")))
}

/// Precision schedule for interval rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Precision {
    pub start_bits: u32,
    pub cap_bits: u32,
    /// Run a first round on interval-converted face points; only a proven
    /// failure is accepted from it.
    pub prefilter: bool,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            start_bits: 64,
            cap_bits: DEFAULT_PRECISION_CAP,
            prefilter: false,
        }
    }
}

impl Precision {
    pub fn with_cap(cap_bits: u32) -> Self {
        Precision {
            cap_bits: cap_bits.max(64),
            ..Self::default()
        }
    }
}

/// Evaluates `f` at increasing precision until the residuals are decided
/// or the cap is reached.
pub fn drive(prec: &Precision, f: impl Fn(EvalMode) -> Result<Evaluation, PropError>) -> Outcome {
    let mut bits = prec.start_bits.min(prec.cap_bits);
    loop {
        let last = bits >= prec.cap_bits;
        let round = match f(EvalMode::Interval { bits }) {
            Ok(ev) => ev,
            Err(e) => match classify(&e) {
                ErrorClass::Refine if !last => {
                    bits = (bits * 2).min(prec.cap_bits);
                    continue;
                }
                ErrorClass::Refine => return Outcome::bare(Verdict::Undecided { bits }),
                ErrorClass::Singular(reason) | ErrorClass::Other(reason) => {
                    return Outcome::bare(Verdict::Skipped { reason })
                }
                ErrorClass::Degenerate(reason) => {
                    return Outcome::bare(Verdict::Degenerate {
                        reason,
                        condition_holds: None,
                    })
                }
            },
        };
        let verdict = match &round.status {
            Status::Degenerate {
                reason,
                condition_holds,
            } => Verdict::Degenerate {
                reason: reason.clone(),
                condition_holds: *condition_holds,
            },
            Status::Inconclusive if last => Verdict::Undecided { bits },
            Status::Inconclusive => {
                bits = (bits * 2).min(prec.cap_bits);
                continue;
            }
            Status::AnyOf(groups) => match decide(groups) {
                Decision::Holds { exact: true } => Verdict::HoldsExact,
                Decision::Holds { exact: false } => Verdict::HoldsNumeric {
                    width: Rational::zero(),
                    bits,
                },
                Decision::Fails(residual) => Verdict::Fails { residual },
                Decision::Straddle(width) if last => Verdict::HoldsNumeric { width, bits },
                Decision::Straddle(_) => {
                    bits = (bits * 2).min(prec.cap_bits);
                    continue;
                }
            },
        };
        return Outcome {
            verdict,
            payload: round.payload,
        };
    }
}

fn zero_test(x: &Scalar) -> Result<bool, PropError> {
    match x.is_zero() {
        ZeroTest::Zero => Ok(true),
        ZeroTest::NonZero => Ok(false),
        ZeroTest::Undecided => Err(PropError::Geom(GeomError::Undecided)),
    }
}

/// 2×2 minors of two vectors: all zero iff they are proportional.
pub fn proportionality_residuals(u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
    let mut out = Vec::new();
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            out.push(&u[i] * &v[j] - &u[j] * &v[i]);
        }
    }
    out
}

fn others(i: usize, j: usize) -> (usize, usize) {
    let mut it = (0..4).filter(|&k| k != i && k != j);
    (it.next().unwrap(), it.next().unwrap())
}

// ---------------------------------------------------------------- cevians

/// The line from vertex `i` to `p`, a point on face `i`.
pub fn cevian(i: usize, p: &TetraPoint) -> Result<TetraLine, GeomError> {
    line_through(&TetraPoint::vertex(i), p)
}

/// Vanishes iff cevians `i` and `j` meet (or are parallel):
/// `P_i[k] P_j[l] − P_i[l] P_j[k]` with `{k, l}` the remaining indices.
pub fn pair_condition(i: usize, pi: &TetraPoint, j: usize, pj: &TetraPoint) -> Scalar {
    let (k, l) = others(i, j);
    &pi.0[k] * &pj.0[l] - &pi.0[l] * &pj.0[k]
}

/// The condition for the cevians to `p1` (face 1) and `p2` (face 2).
pub fn pair_concurrence_condition(p1: &TetraPoint, p2: &TetraPoint) -> Scalar {
    pair_condition(0, p1, 1, p2)
}

fn pair_conditions(pts: &[TetraPoint; 4]) -> Vec<((usize, usize), Scalar)> {
    let mut out = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            out.push(((i, j), pair_condition(i, &pts[i], j, &pts[j])));
        }
    }
    out
}

/// Common point of cevians `i` and `j`, assuming their pair condition holds.
pub fn cevian_meet(i: usize, pi: &TetraPoint, j: usize, pj: &TetraPoint) -> Option<TetraPoint> {
    let (k, l) = others(i, j);
    for m in [k, l] {
        let both_zero = pi.0[m].is_zero() == ZeroTest::Zero && pj.0[m].is_zero() == ZeroTest::Zero;
        if both_zero {
            continue;
        }
        let mut q = pi.map_coords(|x| x * &pj.0[m]);
        q.0[i] = &pi.0[m] * &pj.0[i];
        return Some(q);
    }
    None
}

/// Residuals for `q` lying on cevian `i` towards `p`.
fn on_cevian_residuals(q: &TetraPoint, i: usize, p: &TetraPoint) -> Vec<Scalar> {
    let pick = |v: &TetraPoint| -> Vec<Scalar> {
        (0..4).filter(|&c| c != i).map(|c| v.0[c].clone()).collect()
    };
    proportionality_residuals(&pick(q), &pick(p))
}

/// Property 1: all six pairwise conditions.
pub fn concurrence(pts: &[TetraPoint; 4]) -> Evaluation {
    let res: Vec<Scalar> = pair_conditions(pts).into_iter().map(|(_, r)| r).collect();
    let mut payload = Payload::default();
    if res.iter().all(|r| r.is_zero() == ZeroTest::Zero) {
        if let Some(q) = cevian_meet(0, &pts[0], 1, &pts[1]) {
            let q = q.normalize().unwrap_or(q);
            let mut check = on_cevian_residuals(&q, 2, &pts[2]);
            check.extend(on_cevian_residuals(&q, 3, &pts[3]));
            debug_assert!(check.iter().all(|r| r.is_zero() != ZeroTest::NonZero));
            payload.point = Some(q);
        }
    }
    Evaluation::residuals(res).with(payload)
}

// ----------------------------------------------------------- spear lines

/// Spear condition at vertex `v`: with the other vertices `i < j < k`,
/// `P_i[k] P_j[i] P_k[j] − P_i[j] P_j[k] P_k[i]`.
pub fn spear_condition_at(pts: &[TetraPoint; 4], v: usize) -> Scalar {
    let o: Vec<usize> = (0..4).filter(|&x| x != v).collect();
    let (i, j, k) = (o[0], o[1], o[2]);
    let (pi, pj, pk) = (&pts[i].0, &pts[j].0, &pts[k].0);
    &(&pi[k] * &pj[i]) * &pk[j] - &(&(&pi[j] * &pj[k]) * &pk[i])
}

/// The spear condition at A4 for points on faces 1–3: `z1 x2 y3 − y1 z2 x3`.
pub fn spear_condition(p1: &TetraPoint, p2: &TetraPoint, p3: &TetraPoint) -> Scalar {
    let dummy = TetraPoint::vertex(3);
    spear_condition_at(&[p1.clone(), p2.clone(), p3.clone(), dummy], 3)
}

/// Where the spear line through A4 meets face 4: `(x3 y1, y1 y3, y3 z1, 0)`.
pub fn spear_trace(p1: &TetraPoint, p3: &TetraPoint) -> TetraPoint {
    let (y1, z1) = (&p1.0[1], &p1.0[2]);
    let (x3, y3) = (&p3.0[0], &p3.0[1]);
    TetraPoint([x3 * y1, y1 * y3, y3 * z1, Scalar::zero()])
}

/// Decides the existence of a spear line through A4 by construction: the
/// plane through A4 and cevian 3 meets cevians 1 and 2 at Q1, Q2; a spear
/// line exists iff A4, Q1, Q2 are collinear. Returns the collinearity
/// residuals.
pub fn spear_constructive(
    p1: &TetraPoint,
    p2: &TetraPoint,
    p3: &TetraPoint,
) -> Result<Vec<Scalar>, GeomError> {
    let a4 = TetraPoint::vertex(3);
    let plane = plane_point_line(&a4, &cevian(2, p3)?)?;
    let q1 = line_plane_intersection(&cevian(0, p1)?, &plane)?;
    let q2 = line_plane_intersection(&cevian(1, p2)?, &plane)?;
    collinear_residuals(&a4, &q1, &q2)
}

/// Center of the hyperboloid through three pairwise skew lines: the
/// midpoint of X = L3 ∩ plane(L1 ∥ L2) and Y = L2 ∩ plane(L1 ∥ L3).
pub fn hyperboloid_center(
    l1: &TetraLine,
    l2: &TetraLine,
    l3: &TetraLine,
) -> Result<TetraPoint, GeomError> {
    let x = line_plane_intersection(l3, &plane_line_parallel_line(l1, &l2.dir)?)?.normalize()?;
    let y = line_plane_intersection(l2, &plane_line_parallel_line(l1, &l3.dir)?)?.normalize()?;
    let half = Scalar::Exact(crate::scalar::rat(1, 2));
    Ok(TetraPoint(std::array::from_fn(|i| {
        &half * &(&x.0[i] + &y.0[i])
    })))
}

fn hyperboloid_payload(pts: &[TetraPoint; 4]) -> Payload {
    let lines: Result<Vec<TetraLine>, GeomError> = (0..4).map(|i| cevian(i, &pts[i])).collect();
    let Ok(l) = lines else {
        return Payload::default();
    };
    let c = hyperboloid_center(&l[0], &l[1], &l[2]).ok();
    let invariant = c.as_ref().and_then(|c| {
        let mut all = true;
        for (a, b, d) in [(1, 2, 3), (3, 0, 2), (2, 3, 1)] {
            let alt = hyperboloid_center(&l[a], &l[b], &l[d]).ok()?;
            all &= c.proj_eq(&alt).ok()?;
        }
        Some(all)
    });
    Payload {
        hyperboloid_center: c,
        center_invariant: invariant,
        ..Payload::default()
    }
}

/// Property 2: the cevians are pairwise skew and a spear line exists
/// through every vertex.
pub fn hyperbolic(pts: &[TetraPoint; 4]) -> Evaluation {
    let spears: Vec<Scalar> = (0..4).map(|v| spear_condition_at(pts, v)).collect();
    let mut inconclusive = false;
    for ((i, j), r) in pair_conditions(pts) {
        match r.is_zero() {
            ZeroTest::Zero => {
                let condition_holds = match decide_group(&spears) {
                    Decision::Holds { .. } => Some(true),
                    Decision::Fails(_) => Some(false),
                    Decision::Straddle(_) => None,
                };
                return Evaluation {
                    status: Status::Degenerate {
                        reason: format!("cevians {} and {} meet", i + 1, j + 1),
                        condition_holds,
                    },
                    payload: Payload::default(),
                };
            }
            ZeroTest::Undecided => inconclusive = true,
            ZeroTest::NonZero => {}
        }
    }
    if inconclusive {
        return Evaluation {
            status: Status::Inconclusive,
            payload: Payload::default(),
        };
    }
    let payload = if spears.iter().all(|s| s.is_zero() != ZeroTest::NonZero) {
        hyperboloid_payload(pts)
    } else {
        Payload::default()
    };
    Evaluation::residuals(spears).with(payload)
}

// --------------------------------------------------------------- planarity

/// Property 3.
pub fn coplanar(pts: &[TetraPoint; 4]) -> Evaluation {
    Evaluation::residuals(vec![coplanar_residual(pts)])
}

/// Property 4.
pub fn collinear(pts: &[TetraPoint; 4]) -> Result<Evaluation, PropError> {
    let mut r = collinear_residuals(&pts[0], &pts[1], &pts[2])?;
    r.extend(collinear_residuals(&pts[0], &pts[1], &pts[3])?);
    Ok(Evaluation::residuals(r))
}

/// det[[a_i + b_i], [a_i b_i], [1]]; its vanishing makes the Feuerbach
/// points coplanar.
pub fn feuerbach_planarity_condition(e: &EdgeLengths) -> Rational {
    let row = |f: &dyn Fn(usize) -> Rational| -> Vec<Rational> { (0..3).map(f).collect() };
    let m = vec![
        row(&|i| &e.a[i] + &e.b[i]),
        row(&|i| &e.a[i] * &e.b[i]),
        row(&|_| int(1)),
    ];
    crate::linalg::det_bareiss(&m)
}

/// Two points of the Lemoine axis x/a² + y/b² + z/c² = 0 of face `i`.
pub fn lemoine_axis_points(e: &EdgeLengths, i: usize) -> [TetraPoint; 2] {
    let s = e.face_side_triple(i);
    let sq: Vec<Rational> = s.iter().map(|x| x * x).collect();
    let verts = EdgeLengths::face_vertices(i);
    let place = |c: [Rational; 3]| -> TetraPoint {
        let mut v: [Rational; 4] = std::array::from_fn(|_| Rational::zero());
        for (k, &vert) in verts.iter().enumerate() {
            v[vert] = c[k].clone();
        }
        TetraPoint::from_rationals(v)
    };
    let z = Rational::zero();
    [
        place([sq[0].clone(), -sq[1].clone(), z.clone()]),
        place([z, sq[1].clone(), -sq[2].clone()]),
    ]
}

/// The four face Lemoine axes lie in one plane iff the eight defining
/// points span a space of rank at most 3.
pub fn lemoine_axes_coplanar(e: &EdgeLengths) -> Evaluation {
    let pts: Vec<TetraPoint> = (0..4).flat_map(|i| lemoine_axis_points(e, i)).collect();
    let mut res = Vec::new();
    let n = pts.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let quad = [
                        pts[a].clone(),
                        pts[b].clone(),
                        pts[c].clone(),
                        pts[d].clone(),
                    ];
                    res.push(coplanar_residual(&quad));
                }
            }
        }
    }
    Evaluation::residuals(res)
}

// ----------------------------------------------------------------- normals

/// The normal to face `i` at `p`: its direction is orthogonal (in the
/// reference metric) to two edges of the face and sums to zero.
pub fn face_normal_line(e: &EdgeLengths, i: usize, p: &TetraPoint) -> Result<TetraLine, GeomError> {
    let m = e.metric();
    let [u, v, w] = EdgeLengths::face_vertices(i);
    let edge = |a: usize, b: usize| -> [Scalar; 4] {
        let mut d: [Scalar; 4] = std::array::from_fn(|_| Scalar::zero());
        d[a] = Scalar::from_int(1);
        d[b] = Scalar::from_int(-1);
        d
    };
    let row = |d: [Scalar; 4]| -> [Scalar; 4] {
        std::array::from_fn(|c| m.bilinear(TetraPoint::vertex(c).coords(), &d))
    };
    let rows = [
        std::array::from_fn(|_| Scalar::from_int(1)),
        row(edge(v, u)),
        row(edge(w, u)),
    ];
    let dir = null_vector_3x4(&rows);
    crate::geom::TetraLine::new(
        p,
        crate::geom::TetraDirection::new(dir).map_err(|_| GeomError::SingularSystem)?,
    )
}

/// `d²(P_j, A_k) + d²(P_i, A_l) − d²(P_j, A_l) − d²(P_i, A_k)`; zero iff the
/// normals at `P_i` (face i) and `P_j` (face j) meet.
pub fn tabov_residual(
    e: &EdgeLengths,
    i: usize,
    pi: &TetraPoint,
    j: usize,
    pj: &TetraPoint,
) -> Result<Scalar, GeomError> {
    let m = e.metric();
    let (k, l) = others(i, j);
    let d = |p: &TetraPoint, v: usize| squared_distance(p, &TetraPoint::vertex(v), &m);
    Ok(d(pj, k)? + d(pi, l)? - d(pj, l)? - d(pi, k)?)
}

/// The two-face condition for `p1` on face 1 and `p2` on face 2.
pub fn tabov_pair_condition(
    e: &EdgeLengths,
    p1: &TetraPoint,
    p2: &TetraPoint,
) -> Result<Scalar, GeomError> {
    tabov_residual(e, 0, p1, 1, p2)
}

/// Property 5: the six pairwise normal intersection determinants.
pub fn normals_concur(e: &EdgeLengths, pts: &[TetraPoint; 4]) -> Result<Evaluation, PropError> {
    let mut normals = Vec::with_capacity(4);
    for (i, p) in pts.iter().enumerate() {
        normals.push(face_normal_line(e, i, p)?);
    }
    let mut res = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            res.push(intersect_residual(&normals[i], &normals[j]));
        }
    }
    let mut payload = Payload::default();
    if res.iter().all(|r| r.is_zero() == ZeroTest::Zero) {
        payload.point = crate::geom::intersection_point(&normals[0], &normals[1]).ok();
    }
    Ok(Evaluation::residuals(res).with(payload))
}

// ------------------------------------------------------- central tetrahedron

fn central_squares(pts: &[TetraPoint; 4], m: &EdgeMetric) -> Result<Vec<Scalar>, PropError> {
    let mut out = Vec::with_capacity(6);
    for &(i, j) in &EDGE_PAIRS {
        out.push(squared_distance(&pts[i], &pts[j], m)?);
    }
    Ok(out)
}

fn require_solid(pts: &[TetraPoint; 4]) -> Result<(), PropError> {
    if zero_test(&coplanar_residual(pts))? {
        Err(ModelError::CoplanarPoints.into())
    } else {
        Ok(())
    }
}

/// Property 6: each central face is parallel to the matching reference face.
pub fn faces_parallel(pts: &[TetraPoint; 4]) -> Result<Evaluation, PropError> {
    require_solid(pts)?;
    let mut res = Vec::new();
    for i in 0..4 {
        let tri: Vec<&TetraPoint> = (0..4).filter(|&k| k != i).map(|k| &pts[k]).collect();
        let plane = crate::geom::plane_through_3(tri[0], tri[1], tri[2])?;
        let reduce =
            |e: &TetraPlane| -> Vec<Scalar> { (0..3).map(|c| &e.0[c] - &e.0[3]).collect() };
        res.extend(proportionality_residuals(
            &reduce(&plane),
            &reduce(&TetraPlane::face(i)),
        ));
    }
    Ok(Evaluation::residuals(res))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CentralClass {
    Isosceles,
    Regular,
    Isodynamic,
    Circumscriptible,
    Orthocentric,
    SimilarToReference,
}

impl CentralClass {
    pub const ALL: [CentralClass; 6] = [
        CentralClass::Isosceles,
        CentralClass::Regular,
        CentralClass::Isodynamic,
        CentralClass::Circumscriptible,
        CentralClass::Orthocentric,
        CentralClass::SimilarToReference,
    ];
}

/// `sqrt(p) + sqrt(q) − sqrt(r) − sqrt(s)`, decided exactly for rationals.
fn radical_sum_residual(
    p: &Scalar,
    q: &Scalar,
    r: &Scalar,
    s: &Scalar,
    mode: EvalMode,
) -> Result<Scalar, PropError> {
    if let (Some(p), Some(q), Some(r), Some(s)) = (
        p.as_rational(),
        q.as_rational(),
        r.as_rational(),
        s.as_rational(),
    ) {
        if compare_radical_sums(p, q, r, s).is_eq() {
            return Ok(Scalar::zero());
        }
        // known nonzero: find an enclosure that shows it
        let mut bits = mode.bits().unwrap_or(64).max(64);
        loop {
            let m = EvalMode::Interval { bits };
            let v = radical_sum_interval(&[p, q, r, s].map(|x| Scalar::Exact(x.clone())), m)?;
            if v.is_zero() == ZeroTest::NonZero {
                return Ok(v);
            }
            bits *= 2;
        }
    }
    radical_sum_interval(&[p.clone(), q.clone(), r.clone(), s.clone()], mode)
}

fn radical_sum_interval(v: &[Scalar; 4], mode: EvalMode) -> Result<Scalar, PropError> {
    let rt = |x: &Scalar| x.sqrt(mode);
    Ok(rt(&v[0])? + rt(&v[1])? - rt(&v[2])? - rt(&v[3])?)
}

/// Residuals for the central tetrahedron belonging to `class`.
pub fn central_class(
    e: &EdgeLengths,
    pts: &[TetraPoint; 4],
    class: CentralClass,
    mode: EvalMode,
) -> Result<Evaluation, PropError> {
    require_solid(pts)?;
    let c = central_squares(pts, &e.metric())?;
    let mut payload = Payload::default();
    let res: Vec<Scalar> = match class {
        CentralClass::Isosceles => (0..3).map(|k| &c[k] - &c[k + 3]).collect(),
        CentralClass::Regular => (1..6).map(|k| &c[k] - &c[0]).collect(),
        CentralClass::Isodynamic => {
            let p0 = &c[0] * &c[3];
            (1..3).map(|k| &(&c[k] * &c[k + 3]) - &p0).collect()
        }
        CentralClass::Orthocentric => {
            let s0 = &c[0] + &c[3];
            (1..3).map(|k| &(&c[k] + &c[k + 3]) - &s0).collect()
        }
        CentralClass::Circumscriptible => {
            let mut v = Vec::with_capacity(2);
            for k in 1..3 {
                v.push(radical_sum_residual(&c[0], &c[3], &c[k], &c[k + 3], mode)?);
            }
            v
        }
        CentralClass::SimilarToReference => {
            let r: Vec<Scalar> = e.six().iter().map(|x| Scalar::Exact(*x * *x)).collect();
            payload.similarity_ratio2 = c[0].checked_div(&r[0]).ok();
            (1..6)
                .map(|k| &(&c[k] * &r[0]) - &(&c[0] * &r[k]))
                .collect()
        }
    };
    Ok(Evaluation::residuals(res).with(payload))
}

/// Every class decided to hold exactly (interval-undecided classes are left out).
pub fn classify_central(
    e: &EdgeLengths,
    pts: &[TetraPoint; 4],
) -> Result<Vec<CentralClass>, PropError> {
    let mut out = Vec::new();
    for class in CentralClass::ALL {
        let ev = central_class(e, pts, class, EvalMode::Interval { bits: 128 })?;
        if let Status::AnyOf(g) = &ev.status {
            if matches!(decide(g), Decision::Holds { .. }) {
                out.push(class);
            }
        }
    }
    Ok(out)
}

/// Property 13.
pub fn equal_cevians(e: &EdgeLengths, pts: &[TetraPoint; 4]) -> Result<Evaluation, PropError> {
    let m = e.metric();
    let mut d = Vec::with_capacity(4);
    for (i, p) in pts.iter().enumerate() {
        d.push(squared_distance(&TetraPoint::vertex(i), p, &m)?);
    }
    Ok(Evaluation::residuals(
        (1..4).map(|k| &d[k] - &d[0]).collect(),
    ))
}

// ------------------------------------------------------------ space centers

/// A relation between space centers of the central and reference tetrahedra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpaceRelation {
    Coincide {
        central: SpaceCenterKind,
        reference: SpaceCenterKind,
    },
    CentralOnReferenceEuler(SpaceCenterKind),
    ReferenceOnCentralEuler(SpaceCenterKind),
}

struct Centers {
    central: Vec<(SpaceCenterKind, TetraPoint)>,
    reference: Vec<(SpaceCenterKind, TetraPoint)>,
}

fn centers(
    e: &EdgeLengths,
    pts: &[TetraPoint; 4],
    kinds: &[SpaceCenterKind],
    mode: EvalMode,
) -> Result<Centers, PropError> {
    let m = e.metric();
    let mut central = Vec::new();
    let mut reference = Vec::new();
    for &k in kinds {
        central.push((k, space_center_of_points(pts, &m, k, mode)?));
        reference.push((k, space_center(e, k, mode)?));
    }
    Ok(Centers { central, reference })
}

fn get(v: &[(SpaceCenterKind, TetraPoint)], k: SpaceCenterKind) -> &TetraPoint {
    &v.iter().find(|(x, _)| *x == k).unwrap().1
}

fn point_residuals(p: &TetraPoint, q: &TetraPoint) -> Vec<Scalar> {
    proportionality_residuals(&p.0, &q.0)
}

/// Residual groups and payload for "some point of `cands` lies on the
/// line through `o` (t = 0) and `g` (t = 1)".
fn on_line(
    o: &TetraPoint,
    g: &TetraPoint,
    cands: &[(SpaceCenterKind, TetraPoint)],
    what: &str,
) -> Result<Evaluation, PropError> {
    if point_residuals(o, g)
        .iter()
        .all(|r| r.is_zero() == ZeroTest::Zero)
    {
        return Ok(Evaluation {
            status: Status::Degenerate {
                reason: format!("{what} Euler line undefined (centroid = circumcenter)"),
                condition_holds: None,
            },
            payload: Payload::default(),
        });
    }
    let mut groups = Vec::new();
    let mut payload = Payload::default();
    for (k, p) in cands {
        let r = collinear_residuals(o, g, p)?;
        if matches!(decide_group(&r), Decision::Holds { .. }) {
            if let Ok(t) = line_param(o, g, p) {
                payload.euler_params.push((*k, t.t));
            }
        }
        groups.push(r);
    }
    Ok(Evaluation {
        status: Status::AnyOf(groups),
        payload,
    })
}

pub fn space_relation(
    e: &EdgeLengths,
    pts: &[TetraPoint; 4],
    rel: SpaceRelation,
    mode: EvalMode,
) -> Result<Evaluation, PropError> {
    use SpaceCenterKind::{Centroid, Circumcenter};
    match rel {
        SpaceRelation::Coincide { central, reference } => {
            let c = centers(e, pts, &[central, reference], mode)?;
            let r = point_residuals(get(&c.central, central), get(&c.reference, reference));
            let mut payload = Payload::default();
            if matches!(decide_group(&r), Decision::Holds { .. }) {
                payload.coincidences.push((central, reference));
            }
            Ok(Evaluation::residuals(r).with(payload))
        }
        SpaceRelation::CentralOnReferenceEuler(k) => {
            let c = centers(e, pts, &[k, Centroid, Circumcenter], mode)?;
            let (o, g) = (get(&c.reference, Circumcenter), get(&c.reference, Centroid));
            on_line(o, g, &[(k, get(&c.central, k).clone())], "reference")
        }
        SpaceRelation::ReferenceOnCentralEuler(k) => {
            let c = centers(e, pts, &[k, Centroid, Circumcenter], mode)?;
            let (o, g) = (get(&c.central, Circumcenter), get(&c.central, Centroid));
            on_line(o, g, &[(k, get(&c.reference, k).clone())], "central")
        }
    }
}

/// Properties 14–16.
fn space_property(
    e: &EdgeLengths,
    pts: &[TetraPoint; 4],
    prop: PropertyId,
    mode: EvalMode,
) -> Result<Evaluation, PropError> {
    use SpaceCenterKind::{Centroid, Circumcenter};
    require_solid(pts)?;
    let c = centers(e, pts, &SpaceCenterKind::ALL, mode)?;
    match prop {
        PropertyId::SharedSpaceCenter => {
            let mut groups = Vec::new();
            let mut payload = Payload::default();
            for (kc, pc) in &c.central {
                for (kr, pr) in &c.reference {
                    let r = point_residuals(pc, pr);
                    if matches!(decide_group(&r), Decision::Holds { .. }) {
                        payload.coincidences.push((*kc, *kr));
                    }
                    groups.push(r);
                }
            }
            Ok(Evaluation {
                status: Status::AnyOf(groups),
                payload,
            })
        }
        PropertyId::CentralCenterOnRefEuler => on_line(
            get(&c.reference, Circumcenter),
            get(&c.reference, Centroid),
            &c.central,
            "reference",
        ),
        PropertyId::RefCenterOnCentralEuler => on_line(
            get(&c.central, Circumcenter),
            get(&c.central, Centroid),
            &c.reference,
            "central",
        ),
        _ => unreachable!("not a space-center property"),
    }
}

// ------------------------------------------------------------------ driver

/// One evaluation round of `prop` on the given face points.
pub fn evaluate(
    e: &EdgeLengths,
    pts: &[TetraPoint; 4],
    prop: PropertyId,
    mode: EvalMode,
) -> Result<Evaluation, PropError> {
    use PropertyId::*;
    Ok(match prop {
        Concur => concurrence(pts),
        Hyperbolic => hyperbolic(pts),
        Coplanar => coplanar(pts),
        Collinear => collinear(pts)?,
        NormalsConcur => normals_concur(e, pts)?,
        FacesParallel => faces_parallel(pts)?,
        CentralIsosceles => central_class(e, pts, CentralClass::Isosceles, mode)?,
        CentralRegular => central_class(e, pts, CentralClass::Regular, mode)?,
        CentralIsodynamic => central_class(e, pts, CentralClass::Isodynamic, mode)?,
        CentralCircumscriptible => central_class(e, pts, CentralClass::Circumscriptible, mode)?,
        CentralOrthocentric => central_class(e, pts, CentralClass::Orthocentric, mode)?,
        SimilarToReference => central_class(e, pts, CentralClass::SimilarToReference, mode)?,
        EqualCevians => equal_cevians(e, pts)?,
        SharedSpaceCenter | CentralCenterOnRefEuler | RefCenterOnCentralEuler => {
            space_property(e, pts, prop, mode)?
        }
    })
}

/// Checks `prop` for `center` placed on the faces of `e`.
pub fn check(e: &EdgeLengths, center: &Center, prop: PropertyId, prec: &Precision) -> Outcome {
    check_with(e, center, prec, |pts, mode| evaluate(e, pts, prop, mode))
}

/// Runs an arbitrary per-round evaluation on the face points of `center`,
/// honoring the prefilter setting.
pub fn check_with(
    e: &EdgeLengths,
    center: &Center,
    prec: &Precision,
    f: impl Fn(&[TetraPoint; 4], EvalMode) -> Result<Evaluation, PropError>,
) -> Outcome {
    if prec.prefilter {
        let bits = prec.start_bits;
        let mode = EvalMode::Interval { bits };
        let pre = face_points(e, center, mode)
            .map_err(PropError::from)
            .and_then(|p| {
                let p = p.map(|x| x.to_interval(bits));
                f(&p, mode)
            });
        if let Ok(ev) = pre {
            if let Status::AnyOf(g) = &ev.status {
                if let Decision::Fails(residual) = decide(g) {
                    return Outcome {
                        verdict: Verdict::Fails { residual },
                        payload: ev.payload,
                    };
                }
            }
        }
    }
    drive(prec, |mode| {
        let pts = face_points(e, center, mode)?;
        f(&pts, mode)
    })
}

pub fn check_concurrence(e: &EdgeLengths, center: &Center, prec: &Precision) -> Outcome {
    check(e, center, PropertyId::Concur, prec)
}

pub fn check_hyperbolic(e: &EdgeLengths, center: &Center, prec: &Precision) -> Outcome {
    check(e, center, PropertyId::Hyperbolic, prec)
}

pub fn check_coplanar(e: &EdgeLengths, center: &Center, prec: &Precision) -> Outcome {
    check(e, center, PropertyId::Coplanar, prec)
}

pub fn check_collinear(e: &EdgeLengths, center: &Center, prec: &Precision) -> Outcome {
    check(e, center, PropertyId::Collinear, prec)
}

pub fn check_normals_concur(e: &EdgeLengths, center: &Center, prec: &Precision) -> Outcome {
    check(e, center, PropertyId::NormalsConcur, prec)
}

pub fn check_faces_parallel(pts: &[TetraPoint; 4]) -> Outcome {
    drive(&Precision::default(), |_| faces_parallel(pts))
}

pub fn check_equal_cevians(e: &EdgeLengths, pts: &[TetraPoint; 4]) -> Outcome {
    drive(&Precision::default(), |_| equal_cevians(e, pts))
}

pub fn check_space_center_relations(
    e: &EdgeLengths,
    pts: &[TetraPoint; 4],
    prop: PropertyId,
    prec: &Precision,
) -> Outcome {
    drive(prec, |mode| space_property(e, pts, prop, mode))
}
