//! The theorem registry: every claimed result as an executable case.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{ScreenError, Tally};
use crate::catalog::{instantiate_all, Catalog, Center, SAMPLE_R};
use crate::geom::{intersect_residual, TetraPoint};
use crate::model::{generate, EdgeLengths, SpaceCenterKind, TetraFamily};
use crate::properties::{
    check, check_with, drive, face_normal_line, feuerbach_planarity_condition,
    lemoine_axes_coplanar, space_relation, tabov_residual, Outcome, Payload, Precision, PropertyId,
    SpaceRelation, Verdict,
};
use crate::scalar::{int, rat, EvalMode, Rational, Scalar, ZeroTest};
use crate::triangle::TriangleSides;

/// What a case evaluates on each (instance, center).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Property(PropertyId),
    Relation(SpaceRelation),
    /// The edge determinant vanishes and the Feuerbach points are coplanar.
    FeuerbachDeterminant,
    /// The four face Lemoine axes are coplanar.
    LemoineAxes,
    /// The two-face squared-distance condition agrees with the normals
    /// actually meeting, on conforming and on random point pairs.
    TabovBiconditional,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Centers {
    List(Vec<String>),
    /// Every rational-only catalog entry (parametric ones at the sample r values).
    RationalCatalog,
    None,
}

/// Expected payload. Coordinates are compared projectively.
#[derive(Debug, Clone, Copy)]
pub enum Expect {
    Nothing,
    Point(fn(&EdgeLengths) -> TetraPoint),
    /// Coordinate k of the concurrence point is `f` evaluated with vertex
    /// k relabeled as A4; coordinate 4 is `f` itself.
    FourthCoordinate(fn(&EdgeLengths) -> Rational),
    EulerParam(SpaceCenterKind, i64, i64),
    SimilarityRatio2(i64, i64),
    HyperboloidInvariant,
}

/// A candidate form for the concurrence point that is reported, not asserted.
#[derive(Debug, Clone, Copy)]
pub struct Observation {
    pub name: &'static str,
    pub point: fn(&EdgeLengths, Option<&Rational>) -> TetraPoint,
}

#[derive(Debug, Clone)]
pub struct TheoremCase {
    pub id: &'static str,
    pub statement: &'static str,
    pub family: TetraFamily,
    pub centers: Centers,
    pub target: Target,
    pub expect: Expect,
    pub observe: Vec<Observation>,
    pub default_n: usize,
    pub note: Option<&'static str>,
}

fn list(ids: &[&str]) -> Centers {
    Centers::List(ids.iter().map(|s| s.to_string()).collect())
}

/// `id` together with its isotomic and isogonal conjugates.
fn with_inverses(ids: &[&str]) -> Centers {
    let mut v = Vec::new();
    for id in ids {
        v.push(id.to_string());
        v.push(format!("isotomic({id})"));
        v.push(format!("isogonal({id})"));
    }
    Centers::List(v)
}

fn pows(rs: &[i64]) -> Centers {
    Centers::List(rs.iter().map(|r| format!("POW[r={r}]")).collect())
}

fn t_of(e: &EdgeLengths, f: TetraFamily) -> Rational {
    f.invariant(&e.a[0], &e.b[0])
        .expect("family with an invariant")
}

fn gergonne_fourth(e: &EdgeLengths) -> Rational {
    let [a1, a2, a3] = &e.a;
    (a2 + a3 - a1) * (a3 + a1 - a2) * (a1 + a2 - a3)
}

fn nagel_fourth(e: &EdgeLengths) -> Rational {
    let [a1, a2, a3] = &e.a;
    a1 + a2 + a3 - int(2) * t_of(e, TetraFamily::Circumscriptible)
}

fn orthocenter_fourth(e: &EdgeLengths) -> Rational {
    let [a1, a2, a3] = e.a.clone().map(|x| &x * &x);
    (&a2 + &a3 - &a1) * (&a3 + &a1 - &a2) * (&a1 + &a2 - &a3)
}

fn ortho_isotomic_fourth(e: &EdgeLengths) -> Rational {
    let [a1, a2, a3] = e.a.clone().map(|x| &x * &x);
    a1 + a2 + a3 - int(2) * t_of(e, TetraFamily::Orthocentric)
}

fn quarter(_: &EdgeLengths) -> TetraPoint {
    TetraPoint::from_ints([1, 1, 1, 1])
}

fn ref_circumcenter(e: &EdgeLengths) -> TetraPoint {
    crate::model::circumcenter_closed_form(e)
}

fn pow_exponent(r: Option<&Rational>) -> i64 {
    // trilinear a^r is areal a^(r+1)
    let r = r.expect("power point parameter");
    assert!(r.is_integer(), "integer power expected");
    r.numer()
        .try_into()
        .map(|x: i64| x + 1)
        .expect("small exponent")
}

fn rpow(x: &Rational, k: i64) -> Rational {
    Scalar::Exact(x.clone())
        .powi(k)
        .unwrap()
        .as_rational()
        .unwrap()
        .clone()
}

fn pow_point_direct(e: &EdgeLengths, r: Option<&Rational>) -> TetraPoint {
    let s = pow_exponent(r);
    let [a1, a2, a3] = &e.a;
    let t = t_of(e, TetraFamily::Isodynamic);
    TetraPoint::from_rationals([
        rpow(a1, s),
        rpow(a2, s),
        rpow(a3, s),
        rpow(&(a1 * a2 * a3 / t), s),
    ])
}

fn pow_point_stated(e: &EdgeLengths, r: Option<&Rational>) -> TetraPoint {
    let s = pow_exponent(r);
    let [a1, a2, a3] = &e.a;
    TetraPoint::from_rationals([rpow(a1, s), rpow(a2, s), rpow(a3, s), a1 * rpow(a2, s) * a3])
}

/// (f(σ₀e), f(σ₁e), f(σ₂e), f(e)) with σ_k swapping vertices k and 4.
pub fn symmetric_point(e: &EdgeLengths, f: fn(&EdgeLengths) -> Rational) -> TetraPoint {
    let coord = |k: usize| {
        let mut perm = [0, 1, 2, 3];
        perm.swap(k, 3);
        f(&e.relabel(perm))
    };
    TetraPoint::from_rationals([coord(0), coord(1), coord(2), f(e)])
}

/// The full registry, in reporting order.
pub fn registry() -> Vec<TheoremCase> {
    use PropertyId::*;
    use SpaceCenterKind::*;
    use TetraFamily::*;
    let case = |id, statement, family, centers, target, expect, default_n| TheoremCase {
        id,
        statement,
        family,
        centers,
        target,
        expect,
        observe: Vec::new(),
        default_n,
        note: None,
    };
    let prop = Target::Property;
    let rel = Target::Relation;
    let mut v = vec![
        // arbitrary tetrahedra
        case("general-centroid-faces-parallel", "Central faces of the face centroids are parallel to the reference faces.",
            General, list(&["X2"]), prop(FacesParallel), Expect::Nothing, 100),
        case("general-centroid-cevians-concur", "Cevians to the face centroids concur at the reference centroid.",
            General, list(&["X2"]), prop(Concur), Expect::Point(quarter), 100),
        case("general-centroid-similar", "The centroid central tetrahedron is similar to the reference (squared ratio 1/9).",
            General, list(&["X2"]), prop(SimilarToReference), Expect::SimilarityRatio2(1, 9), 100),
        case("general-centroid-shared-centroid", "The centroid central tetrahedron has the reference centroid.",
            General, list(&["X2"]), rel(SpaceRelation::Coincide { central: Centroid, reference: Centroid }), Expect::Nothing, 100),
        case("general-centroid-circumcenter-euler-point", "The central circumcenter is the reference Euler point.",
            General, list(&["X2"]), rel(SpaceRelation::Coincide { central: Circumcenter, reference: EulerPoint }), Expect::Nothing, 100),
        case("general-centroid-monge-on-euler-line", "The central Monge point lies on the reference Euler line at 2/3.",
            General, list(&["X2"]), rel(SpaceRelation::CentralOnReferenceEuler(MongePoint)), Expect::EulerParam(MongePoint, 2, 3), 100),
        case("general-centroid-euler-point-on-euler-line", "The central Euler point lies on the reference Euler line at 8/9.",
            General, list(&["X2"]), rel(SpaceRelation::CentralOnReferenceEuler(EulerPoint)), Expect::EulerParam(EulerPoint, 8, 9), 100),
        case("general-centroid-circumcenter-on-central-euler-line", "The reference circumcenter lies on the central Euler line at 4.",
            General, list(&["X2"]), rel(SpaceRelation::ReferenceOnCentralEuler(Circumcenter)), Expect::EulerParam(Circumcenter, 4, 1), 100),
        case("general-centroid-monge-on-central-euler-line", "The reference Monge point lies on the central Euler line at -2.",
            General, list(&["X2"]), rel(SpaceRelation::ReferenceOnCentralEuler(MongePoint)), Expect::EulerParam(MongePoint, -2, 1), 100),
        case("general-circumcenter-normals-concur", "Normals at the face circumcenters concur at the reference circumcenter.",
            General, list(&["X3"]), prop(NormalsConcur), Expect::Point(ref_circumcenter), 100),
        case("general-power-points-hyperbolic", "Cevians to the r-power points form a hyperbolic group.",
            General, pows(&[-2, -1, 0, 1, 2, 3]), prop(Hyperbolic), Expect::HyperboloidInvariant, 50),
        case("general-2ar-br-cr-shared-centroid", "The 2a^r+b^r+c^r central tetrahedron has the reference centroid.",
            General, list(&["Z8[r=1]", "Z8[r=2]"]), rel(SpaceRelation::Coincide { central: Centroid, reference: Centroid }), Expect::Nothing, 100),
        // isosceles
        case("isosceles-equal-cevians", "On an isosceles tetrahedron the cevians to any center have equal length.",
            Isosceles, Centers::RationalCatalog, prop(EqualCevians), Expect::Nothing, 20),
        case("isosceles-central-isosceles", "On an isosceles tetrahedron every central tetrahedron is isosceles.",
            Isosceles, Centers::RationalCatalog, prop(CentralIsosceles), Expect::Nothing, 20),
        case("isosceles-shared-centroid", "On an isosceles tetrahedron every central tetrahedron has the reference centroid.",
            Isosceles, Centers::RationalCatalog, rel(SpaceRelation::Coincide { central: Centroid, reference: Centroid }), Expect::Nothing, 20),
        case("isosceles-hyperbolic", "On an isosceles tetrahedron the cevians to any center form a hyperbolic group.",
            Isosceles, Centers::RationalCatalog, prop(Hyperbolic), Expect::Nothing, 20),
        // circumscriptible
        case("circumscriptible-gergonne-concur", "Cevians to the Gergonne points concur; 4th coordinate (a2+a3-a1)(a3+a1-a2)(a1+a2-a3).",
            Circumscriptible, list(&["X7"]), prop(Concur), Expect::FourthCoordinate(gergonne_fourth), 100),
        case("circumscriptible-nagel-concur", "Cevians to the Nagel points concur; 4th coordinate a1+a2+a3-2t.",
            Circumscriptible, list(&["X8"]), prop(Concur), Expect::FourthCoordinate(nagel_fourth), 100),
        case("circumscriptible-feuerbach-coplanar", "The Feuerbach points are coplanar.",
            Circumscriptible, list(&["X11"]), prop(Coplanar), Expect::Nothing, 100),
        case("circumscriptible-incenter-normals-concur", "Normals at the incenters concur.",
            Circumscriptible, list(&["X1"]), prop(NormalsConcur), Expect::Nothing, 100),
        case("circumscriptible-x40-normals-concur", "Normals at the X40 points concur.",
            Circumscriptible, list(&["X40"]), prop(NormalsConcur), Expect::Nothing, 100),
        case("circumscriptible-gergonne-hyperbolic", "Gergonne points and their inverses form hyperbolic groups.",
            Circumscriptible, with_inverses(&["X7"]), prop(Hyperbolic), Expect::Nothing, 100),
        case("circumscriptible-nagel-hyperbolic", "Nagel points and their inverses form hyperbolic groups.",
            Circumscriptible, with_inverses(&["X8"]), prop(Hyperbolic), Expect::Nothing, 100),
        case("circumscriptible-mittenpunkt-hyperbolic", "Mittenpunkts and their inverses form hyperbolic groups.",
            Circumscriptible, with_inverses(&["X9"]), prop(Hyperbolic), Expect::Nothing, 100),
        case("circumscriptible-x41-hyperbolic", "X41 points and their inverses form hyperbolic groups.",
            Circumscriptible, with_inverses(&["X41"]), prop(Hyperbolic), Expect::Nothing, 100),
        case("circumscriptible-feuerbach-hyperbolic", "Feuerbach points and their inverses form hyperbolic groups.",
            Circumscriptible, with_inverses(&["X11"]), prop(Hyperbolic), Expect::Nothing, 100),
        // isodynamic
        case("isodynamic-power-points-concur", "Cevians to any power point concur.",
            Isodynamic, pows(&[-1, 0, 1, 2]), prop(Concur), Expect::Nothing, 100),
        case("isodynamic-feuerbach-coplanar", "The Feuerbach points are coplanar.",
            Isodynamic, list(&["X11"]), prop(Coplanar), Expect::Nothing, 100),
        case("isodynamic-x44-coplanar", "The X44 points are coplanar.",
            Isodynamic, list(&["X44"]), prop(Coplanar), Expect::Nothing, 100),
        case("isodynamic-lemoine-axes-coplanar", "The face Lemoine axes are coplanar.",
            Isodynamic, Centers::None, Target::LemoineAxes, Expect::Nothing, 100),
        case("isodynamic-x76-circumcenter-centroid", "The circumcenter of the X76 points is the reference centroid.",
            Isodynamic, list(&["X76"]), rel(SpaceRelation::Coincide { central: Circumcenter, reference: Centroid }), Expect::Nothing, 100),
        case("isodynamic-spieker-hyperbolic", "Spieker centers and their inverses form hyperbolic groups.",
            Isodynamic, with_inverses(&["X10"]), prop(Hyperbolic), Expect::Nothing, 100),
        case("isodynamic-x37-hyperbolic", "X37 points and their inverses form hyperbolic groups.",
            Isodynamic, with_inverses(&["X37"]), prop(Hyperbolic), Expect::Nothing, 100),
        case("isodynamic-x38-hyperbolic", "X38 points and their inverses form hyperbolic groups.",
            Isodynamic, with_inverses(&["X38"]), prop(Hyperbolic), Expect::Nothing, 100),
        case("isodynamic-brocard-midpoint-hyperbolic", "Brocard midpoints and their inverses form hyperbolic groups.",
            Isodynamic, with_inverses(&["X39"]), prop(Hyperbolic), Expect::Nothing, 100),
        case("isodynamic-x42-hyperbolic", "X42 points and their inverses form hyperbolic groups.",
            Isodynamic, with_inverses(&["X42"]), prop(Hyperbolic), Expect::Nothing, 100),
        case("isodynamic-x106-hyperbolic", "X106 points form a hyperbolic group.",
            Isodynamic, list(&["X106"]), prop(Hyperbolic), Expect::Nothing, 100),
        case("isodynamic-x107-hyperbolic", "X107 points form a hyperbolic group.",
            Isodynamic, Centers::List(Vec::new()), prop(Hyperbolic), Expect::Nothing, 100),
        case("isodynamic-x108-hyperbolic", "X108 points form a hyperbolic group.",
            Isodynamic, Centers::List(Vec::new()), prop(Hyperbolic), Expect::Nothing, 100),
        case("isodynamic-x109-hyperbolic", "X109 points form a hyperbolic group.",
            Isodynamic, Centers::List(Vec::new()), prop(Hyperbolic), Expect::Nothing, 100),
        case("isodynamic-x110-hyperbolic", "X110 points form a hyperbolic group.",
            Isodynamic, list(&["X110"]), prop(Hyperbolic), Expect::Nothing, 100),
        case("isodynamic-x111-hyperbolic", "X111 points form a hyperbolic group.",
            Isodynamic, list(&["X111"]), prop(Hyperbolic), Expect::Nothing, 100),
        // orthocentric
        case("orthocentric-orthocenter-concur", "Cevians to the orthocenters concur; 4th coordinate (a2²+a3²-a1²)(a3²+a1²-a2²)(a1²+a2²-a3²).",
            Orthocentric, list(&["X4"]), prop(Concur), Expect::FourthCoordinate(orthocenter_fourth), 100),
        case("orthocentric-isotomic-orthocenter-concur", "Cevians to the isotomic conjugates of the orthocenters concur; 4th coordinate a1²+a2²+a3²-2t.",
            Orthocentric, list(&["isotomic(X4)"]), prop(Concur), Expect::FourthCoordinate(ortho_isotomic_fourth), 100),
        case("orthocentric-nine-point-centroid", "The centroid of the nine-point centers is the reference centroid.",
            Orthocentric, list(&["X5"]), rel(SpaceRelation::Coincide { central: Centroid, reference: Centroid }), Expect::Nothing, 100),
        case("orthocentric-orthocenter-centroid-monge", "The centroid of the orthocenters is the reference Monge point.",
            Orthocentric, list(&["X4"]), rel(SpaceRelation::Coincide { central: Centroid, reference: MongePoint }), Expect::Nothing, 100),
        case("orthocentric-orthocenter-circumcenter-on-euler-line", "The circumcenter of the orthocenters lies on the reference Euler line.",
            Orthocentric, list(&["X4"]), rel(SpaceRelation::CentralOnReferenceEuler(Circumcenter)), Expect::Nothing, 100),
        case("orthocentric-orthocenter-monge-on-euler-line", "The Monge point of the orthocenters lies on the reference Euler line.",
            Orthocentric, list(&["X4"]), rel(SpaceRelation::CentralOnReferenceEuler(MongePoint)), Expect::Nothing, 100),
        case("orthocentric-x53-centroid-monge", "The centroid of the X53 points is the reference Monge point.",
            Orthocentric, list(&["X53"]), rel(SpaceRelation::Coincide { central: Centroid, reference: MongePoint }), Expect::Nothing, 100),
        case("orthocentric-circumcenter-normals-concur", "Normals at the circumcenters concur.",
            Orthocentric, list(&["X3"]), prop(NormalsConcur), Expect::Nothing, 100),
        case("orthocentric-centroid-normals-concur", "Normals at the centroids concur.",
            Orthocentric, list(&["X2"]), prop(NormalsConcur), Expect::Nothing, 100),
        case("orthocentric-orthocenter-normals-concur", "Normals at the orthocenters concur.",
            Orthocentric, list(&["X4"]), prop(NormalsConcur), Expect::Nothing, 100),
        case("orthocentric-nine-point-normals-concur", "Normals at the nine-point centers concur.",
            Orthocentric, list(&["X5"]), prop(NormalsConcur), Expect::Nothing, 100),
        case("orthocentric-de-longchamps-normals-concur", "Normals at the de Longchamps points concur.",
            Orthocentric, list(&["X20"]), prop(NormalsConcur), Expect::Nothing, 100),
        case("orthocentric-circumcenter-hyperbolic", "Circumcenters form a hyperbolic group.",
            Orthocentric, list(&["X3"]), prop(Hyperbolic), Expect::Nothing, 100),
        case("orthocentric-crucial-point-hyperbolic", "Crucial points and their inverses form hyperbolic groups.",
            Orthocentric, with_inverses(&["X69"]), prop(Hyperbolic), Expect::Nothing, 100),
        case("orthocentric-x25-hyperbolic", "X25 points form a hyperbolic group.",
            Orthocentric, list(&["X25"]), prop(Hyperbolic), Expect::Nothing, 100),
        case("orthocentric-x48-hyperbolic", "X48 points and their inverses form hyperbolic groups.",
            Orthocentric, with_inverses(&["X48"]), prop(Hyperbolic), Expect::Nothing, 100),
        // harmonic
        case("harmonic-feuerbach-coplanar", "The Feuerbach points are coplanar.",
            Harmonic, list(&["X11"]), prop(Coplanar), Expect::Nothing, 100),
        case("harmonic-x117-concur", "Cevians to the X117 points and to their isotomic conjugates concur.",
            Harmonic, list(&["X117", "isotomic(X117)"]), prop(Concur), Expect::Nothing, 100),
        case("harmonic-x43-hyperbolic", "X43 points and their inverses form hyperbolic groups.",
            Harmonic, with_inverses(&["X43"]), prop(Hyperbolic), Expect::Nothing, 100),
        case("harmonic-x102-hyperbolic", "X102 points form a hyperbolic group.",
            Harmonic, list(&["X102"]), prop(Hyperbolic), Expect::Nothing, 100),
        case("harmonic-x117-hyperbolic", "X117 points form a hyperbolic group.",
            Harmonic, list(&["X117"]), prop(Hyperbolic), Expect::Nothing, 100),
    ];
    // the edge determinant and the families it covers
    for (id, fam) in [
        ("feuerbach-determinant-circumscriptible", Circumscriptible),
        ("feuerbach-determinant-isodynamic", Isodynamic),
        ("feuerbach-determinant-harmonic", Harmonic),
        ("feuerbach-determinant-product-plus-sum", ProductPlusSum),
    ] {
        v.push(case(
            id,
            "The Feuerbach determinant vanishes and the Feuerbach points are coplanar.",
            fam,
            list(&["X11"]),
            Target::FeuerbachDeterminant,
            Expect::Nothing,
            50,
        ));
    }
    v.push(case(
        "tabov-biconditional",
        "Normals at P1 and P2 meet iff (P2A3)²+(P1A4)² = (P2A4)²+(P1A3)².",
        General,
        Centers::None,
        Target::TabovBiconditional,
        Expect::Nothing,
        100,
    ));
    for c in &mut v {
        match c.id {
            "isodynamic-power-points-concur" => {
                c.observe = vec![
                    Observation { name: "(a1^s, a2^s, a3^s, (a1a2a3/t)^s), s = r+1", point: pow_point_direct },
                    Observation { name: "stated 4th coordinate a1·a2^s·a3, s = r+1", point: pow_point_stated },
                ];
                c.note = Some("the stated 4th coordinate is asymmetric in a1, a3; both forms are reported, neither asserted");
            }
            "circumscriptible-nagel-concur" => {
                c.note = Some("the alternative form S/2 - S4 is not proportional to a1+a2+a3-2t; only the latter is checked")
            }
            "harmonic-x117-concur" => {
                c.note = Some("the isotomic conjugate of X117 is checked directly; the catalog X102 is not that conjugate")
            }
            "isodynamic-x107-hyperbolic" | "isodynamic-x108-hyperbolic" | "isodynamic-x109-hyperbolic" => {
                c.note = Some("no curated angle-free formula for this center")
            }
            "general-power-points-hyperbolic" | "isosceles-hyperbolic" | "circumscriptible-gergonne-hyperbolic"
            | "circumscriptible-nagel-hyperbolic" => {
                c.note = Some("where the cevians concur the group is degenerate; the spear conditions are still required to hold")
            }
            _ => {}
        }
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseFailure {
    pub center: Option<String>,
    pub instance: usize,
    pub edges: EdgeLengths,
    pub verdict: Verdict,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub id: String,
    pub statement: String,
    pub family: TetraFamily,
    pub centers: Vec<String>,
    pub n: usize,
    pub seed: u64,
    pub status: CaseStatus,
    pub mode: String,
    pub tally: Tally,
    /// Trials where the cevians concur and the spear conditions hold.
    pub degenerate_holds: usize,
    /// Trials on which the center is undefined or the central points are
    /// degenerate; they neither confirm nor refute.
    pub inapplicable: usize,
    /// Trials that refute the statement.
    pub failing: usize,
    pub failures: Vec<CaseFailure>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub observations: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        self.status == CaseStatus::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub cases: Vec<CaseReport>,
}

const MAX_FAILURES: usize = 3;

struct Trial {
    center: Option<usize>,
    instance: usize,
    verdict: Verdict,
    judgement: Judgement,
    reason: String,
    observed: Vec<bool>,
}

fn numeric_width_ok(w: &Rational) -> bool {
    // width below 2^-64
    w < &Rational::new(One::one(), num_bigint::BigInt::from(1u8) << 64)
}

fn check_expect(expect: &Expect, e: &EdgeLengths, p: &Payload) -> Result<(), String> {
    let proj = |got: &Option<TetraPoint>, want: TetraPoint| -> Result<(), String> {
        let got = got.as_ref().ok_or("no point in payload")?;
        match got.proj_eq(&want) {
            Ok(true) => Ok(()),
            Ok(false) => Err(format!("point {got:?} is not {want:?}")),
            Err(err) => Err(format!("point comparison undecided: {err}")),
        }
    };
    match expect {
        Expect::Nothing => Ok(()),
        Expect::Point(f) => proj(&p.point, f(e)),
        Expect::FourthCoordinate(f) => proj(&p.point, symmetric_point(e, *f)),
        Expect::EulerParam(kind, num, den) => {
            let want = rat(*num, *den);
            let t = p
                .euler_params
                .iter()
                .find(|(k, _)| k == kind)
                .map(|(_, t)| t)
                .ok_or("no Euler parameter in payload")?;
            let close = match t {
                Scalar::Exact(q) => *q == want,
                approx => approx.to_interval(64).contains(&want),
            };
            if close {
                Ok(())
            } else {
                Err(format!("Euler parameter {t:?} is not {num}/{den}"))
            }
        }
        Expect::SimilarityRatio2(num, den) => match &p.similarity_ratio2 {
            Some(Scalar::Exact(q)) if *q == rat(*num, *den) => Ok(()),
            other => Err(format!("squared ratio {other:?} is not {num}/{den}")),
        },
        Expect::HyperboloidInvariant => match p.center_invariant {
            Some(true) => Ok(()),
            other => Err(format!("hyperboloid center invariance: {other:?}")),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Judgement {
    Holds,
    /// Hyperbolic with concurrent cevians but the spear conditions satisfied.
    DegenerateHolds,
    /// The center is undefined on this instance, or the central points are
    /// too degenerate for the statement to say anything.
    Inapplicable,
    Fails,
}

fn judge(case: &TheoremCase, e: &EdgeLengths, o: &Outcome) -> (Judgement, String) {
    match &o.verdict {
        Verdict::HoldsExact => {}
        Verdict::HoldsNumeric { width, .. } if numeric_width_ok(width) => {}
        Verdict::HoldsNumeric { .. } => {
            return (Judgement::Fails, "enclosure wider than 2^-64".into())
        }
        Verdict::Degenerate {
            condition_holds: Some(true),
            reason,
        } if case.target == Target::Property(PropertyId::Hyperbolic) => {
            return (Judgement::DegenerateHolds, reason.clone());
        }
        Verdict::Degenerate {
            condition_holds: Some(false),
            reason,
        } => return (Judgement::Fails, reason.clone()),
        Verdict::Degenerate { reason, .. } | Verdict::Skipped { reason } => {
            return (Judgement::Inapplicable, reason.clone())
        }
        other => return (Judgement::Fails, other.label().to_string()),
    }
    match check_expect(&case.expect, e, &o.payload) {
        Ok(()) => (Judgement::Holds, String::new()),
        Err(msg) => (Judgement::Fails, msg),
    }
}

/// Random positive point on face `i`.
fn random_face_point(rng: &mut ChaCha8Rng, i: usize) -> TetraPoint {
    let mut v = [0i64; 4];
    for (k, x) in v.iter_mut().enumerate() {
        if k != i {
            *x = rng.gen_range(1..=20);
        }
    }
    TetraPoint::from_ints(v)
}

/// Tabov trials for one instance: a pair built to satisfy the distance
/// condition, then an unconstrained pair. Each trial passes iff the
/// condition and the normals meeting agree.
fn tabov_trials(e: &EdgeLengths, seed: u64, index: usize) -> Vec<(Verdict, bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7ab0_7ab0);
    rng.set_stream(index as u64);
    let i = rng.gen_range(0..4);
    let j = (i + rng.gen_range(1..4)) % 4;
    let pi = random_face_point(&mut rng, i);
    let u = random_face_point(&mut rng, j).normalize().unwrap();
    let w = random_face_point(&mut rng, j).normalize().unwrap();
    let ru = tabov_residual(e, i, &pi, j, &u).unwrap();
    let rw = tabov_residual(e, i, &pi, j, &w).unwrap();
    let mut pairs = Vec::new();
    if ru != rw {
        // the residual is affine along the segment u→w
        let lambda = ru
            .checked_div(&(&ru - &rw))
            .unwrap_or_else(|_| Scalar::zero());
        let p = TetraPoint(std::array::from_fn(|k| {
            &u.0[k] + &(&lambda * &(&w.0[k] - &u.0[k]))
        }));
        pairs.push((p, "conforming pair"));
    }
    pairs.push((random_face_point(&mut rng, j), "random pair"));
    pairs
        .into_iter()
        .map(|(pj, kind)| {
            let cond = tabov_residual(e, i, &pi, j, &pj).unwrap();
            let ni = face_normal_line(e, i, &pi).unwrap();
            let nj = face_normal_line(e, j, &pj).unwrap();
            let meet = intersect_residual(&ni, &nj);
            let agree = (cond.is_zero() == ZeroTest::Zero) == (meet.is_zero() == ZeroTest::Zero);
            let conforming = kind == "conforming pair";
            if agree && (!conforming || cond.is_zero() == ZeroTest::Zero) {
                (Verdict::HoldsExact, true, kind.to_string())
            } else {
                (
                    Verdict::Fails { residual: meet },
                    false,
                    format!("{kind}: condition and normals disagree"),
                )
            }
        })
        .collect()
}

fn resolve_centers(case: &TheoremCase, cat: &Catalog) -> Result<Vec<Center>, ScreenError> {
    Ok(match &case.centers {
        Centers::List(ids) => ids
            .iter()
            .map(|id| cat.resolve(id))
            .collect::<Result<_, _>>()?,
        Centers::RationalCatalog => instantiate_all(cat, &SAMPLE_R)
            .into_iter()
            .filter(|c| c.rational_only() && !at_infinity_everywhere(c))
            .collect(),
        Centers::None => Vec::new(),
    })
}

/// Instantiations like Z4 at r = -1 have coordinates summing to zero
/// identically; they are directions, not centers.
pub(super) fn at_infinity_everywhere(c: &Center) -> bool {
    [(3, 4, 5), (5, 6, 7), (7, 8, 13)]
        .iter()
        .all(|&(a, b, cc)| {
            let s = TriangleSides::from_ints(a, b, cc).expect("probe triangle");
            c.areal(&s, EvalMode::Exact).is_ok_and(|p| {
                let sum = &(&p.0[0] + &p.0[1]) + &p.0[2];
                sum.is_zero() == ZeroTest::Zero
            })
        })
}

fn run_target(
    case: &TheoremCase,
    e: &EdgeLengths,
    center: Option<&Center>,
    prec: &Precision,
) -> Outcome {
    match case.target {
        Target::Property(p) => check(e, center.expect("center"), p, prec),
        Target::Relation(rel) => check_with(e, center.expect("center"), prec, |pts, mode| {
            space_relation(e, pts, rel, mode)
        }),
        Target::FeuerbachDeterminant => {
            let det = feuerbach_planarity_condition(e);
            if det.is_zero() {
                check(e, center.expect("center"), PropertyId::Coplanar, prec)
            } else {
                Outcome {
                    verdict: Verdict::Fails {
                        residual: Scalar::Exact(det),
                    },
                    payload: Payload::default(),
                }
            }
        }
        Target::LemoineAxes => drive(prec, |_| Ok(lemoine_axes_coplanar(e))),
        Target::TabovBiconditional => unreachable!("handled separately"),
    }
}

/// Runs one case on `n` instances of its family.
pub fn verify_case(
    case: &TheoremCase,
    n: usize,
    seed: u64,
    cat: &Catalog,
    prec: &Precision,
) -> Result<CaseReport, ScreenError> {
    let centers = resolve_centers(case, cat)?;
    let labels: Vec<String> = centers.iter().map(Center::label).collect();
    let mut report = CaseReport {
        id: case.id.to_string(),
        statement: case.statement.to_string(),
        family: case.family,
        centers: labels.clone(),
        n,
        seed,
        status: CaseStatus::Skipped,
        mode: "none".into(),
        tally: Tally::default(),
        degenerate_holds: 0,
        inapplicable: 0,
        failing: 0,
        failures: Vec::new(),
        observations: BTreeMap::new(),
        note: case.note.map(str::to_string),
    };
    let needs_center = !matches!(
        case.target,
        Target::LemoineAxes | Target::TabovBiconditional
    );
    if needs_center && centers.is_empty() {
        return Ok(report);
    }
    let instances = generate(case.family, seed, n)?;
    let jobs: Vec<(usize, Option<usize>)> = if needs_center {
        (0..instances.len())
            .flat_map(|i| (0..centers.len()).map(move |c| (i, Some(c))))
            .collect()
    } else {
        (0..instances.len()).map(|i| (i, None)).collect()
    };
    let trials: Vec<Trial> = jobs
        .par_iter()
        .flat_map_iter(|&(i, c)| {
            let e = &instances[i];
            if case.target == Target::TabovBiconditional {
                return tabov_trials(e, seed, i)
                    .into_iter()
                    .map(|(verdict, ok, reason)| Trial {
                        center: None,
                        instance: i,
                        verdict,
                        judgement: if ok {
                            Judgement::Holds
                        } else {
                            Judgement::Fails
                        },
                        reason,
                        observed: Vec::new(),
                    })
                    .collect::<Vec<_>>();
            }
            let center = c.map(|c| &centers[c]);
            let o = run_target(case, e, center, prec);
            let (judgement, reason) = judge(case, e, &o);
            let observed = case
                .observe
                .iter()
                .map(|obs| {
                    let want = (obs.point)(e, center.and_then(|c| c.r.as_ref()));
                    o.payload
                        .point
                        .as_ref()
                        .is_some_and(|p| p.proj_eq(&want) == Ok(true))
                })
                .collect();
            vec![Trial {
                center: c,
                instance: i,
                verdict: o.verdict,
                judgement,
                reason,
                observed,
            }]
        })
        .collect();

    let mut all_ok = true;
    let mut seen = vec![0usize; case.observe.len()];
    let mut applicable = vec![0usize; centers.len().max(1)];
    let record = |report: &mut CaseReport,
                  center: Option<usize>,
                  instance: usize,
                  verdict: Verdict,
                  reason: String| {
        if report.failures.len() < MAX_FAILURES {
            report.failures.push(CaseFailure {
                center: center.map(|c| labels[c].clone()),
                instance,
                edges: instances[instance].clone(),
                verdict,
                reason,
            });
        }
    };
    for t in &trials {
        report.tally.add(&t.verdict);
        for (k, &hit) in t.observed.iter().enumerate() {
            seen[k] += hit as usize;
        }
        match t.judgement {
            Judgement::Holds => applicable[t.center.unwrap_or(0)] += 1,
            Judgement::DegenerateHolds => {
                report.degenerate_holds += 1;
                applicable[t.center.unwrap_or(0)] += 1;
            }
            Judgement::Inapplicable => report.inapplicable += 1,
            Judgement::Fails => {
                all_ok = false;
                report.failing += 1;
                record(
                    &mut report,
                    t.center,
                    t.instance,
                    t.verdict.clone(),
                    t.reason.clone(),
                );
            }
        }
    }
    // a center never defined on the family verifies nothing
    for (c, &k) in applicable.iter().enumerate() {
        if k == 0 && !trials.is_empty() {
            all_ok = false;
            let center = needs_center.then_some(c);
            let first = trials
                .iter()
                .find(|t| t.center == center)
                .expect("trial for center");
            record(
                &mut report,
                center,
                first.instance,
                first.verdict.clone(),
                "no applicable instance".into(),
            );
        }
    }
    for (k, obs) in case.observe.iter().enumerate() {
        report.observations.insert(
            obs.name.to_string(),
            format!("matched {}/{} trials", seen[k], trials.len()),
        );
    }
    report.status = if all_ok {
        CaseStatus::Pass
    } else {
        CaseStatus::Fail
    };
    report.mode = if report.tally.holds_numeric > 0 {
        format!("interval (cap {} bits)", prec.cap_bits)
    } else {
        "randomized exact".into()
    };
    Ok(report)
}

/// Verifies the registered case `id` on `n` instances (the case default when `None`).
pub fn verify_theorem(
    id: &str,
    n: Option<usize>,
    seed: u64,
    cat: &Catalog,
    prec: &Precision,
) -> Result<CaseReport, ScreenError> {
    let case = registry()
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| ScreenError::UnknownCase(id.to_string()))?;
    verify_case(&case, n.unwrap_or(case.default_n), seed, cat, prec)
}

/// Verifies the listed cases (every case when `ids` is empty).
pub fn verify_all(
    ids: &[String],
    n: Option<usize>,
    seed: u64,
    cat: &Catalog,
    prec: &Precision,
) -> Result<VerifyReport, ScreenError> {
    let reg = registry();
    for id in ids {
        if !reg.iter().any(|c| c.id == id) {
            return Err(ScreenError::UnknownCase(id.clone()));
        }
    }
    let mut cases = Vec::new();
    for case in reg
        .iter()
        .filter(|c| ids.is_empty() || ids.iter().any(|id| id == c.id))
    {
        cases.push(verify_case(
            case,
            n.unwrap_or(case.default_n),
            seed,
            cat,
            prec,
        )?);
    }
    let count = |s: CaseStatus| cases.iter().filter(|c| c.status == s).count();
    Ok(VerifyReport {
        seed,
        passed: count(CaseStatus::Pass),
        failed: count(CaseStatus::Fail),
        skipped: count(CaseStatus::Skipped),
        cases,
    })
}
