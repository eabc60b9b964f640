//! The center library: built-in entries plus a line-oriented file format
//!
//! ```text
//! # comment
//! id | trilinear|areal | expression | takes_r (yes/no) [| name]
//! ```

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::expr::{parse_center_expr, CenterExpr, ExprError};
use crate::scalar::{format_rational, int, parse_rational, EvalMode, Rational, Scalar};
use crate::triangle::{
    eval_center_areal, isogonal_conjugate, isotomic_conjugate, Areal, CoordForm, TriangleError,
    TriangleSides,
};

const BUILTIN: &str = include_str!("catalog/builtin.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line} ({id}): {error}")]
    Syntax {
        line: usize,
        id: String,
        error: ExprError,
    },
    #[error("entry {id} failed validation: {error}")]
    Validation { id: String, error: ExprError },
    #[error("duplicate entry id {0}")]
    Duplicate(String),
    #[error("unknown center `{0}`")]
    UnknownCenter(String),
    #[error("center {0} takes the parameter r; write it as {0}[r=<value>]")]
    MissingParameter(String),
    #[error("center {0} does not take a parameter")]
    UnexpectedParameter(String),
    #[error("cannot read catalog file: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub id: String,
    pub name: String,
    pub form: CoordForm,
    pub expr: CenterExpr,
    pub takes_r: bool,
    pub rational_only: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Catalog {
    entries: Vec<Arc<CatalogEntry>>,
    index: HashMap<String, usize>,
}

impl Catalog {
    pub fn entries(&self) -> &[Arc<CatalogEntry>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Arc<CatalogEntry>> {
        self.index.get(id).map(|&i| &self.entries[i])
    }

    pub fn push(&mut self, entry: CatalogEntry) -> Result<(), CatalogError> {
        if self.index.contains_key(&entry.id) {
            return Err(CatalogError::Duplicate(entry.id));
        }
        self.index.insert(entry.id.clone(), self.entries.len());
        self.entries.push(Arc::new(entry));
        Ok(())
    }

    /// Appends every entry of `other`, rejecting id clashes.
    pub fn extend(&mut self, other: &Catalog) -> Result<(), CatalogError> {
        for e in other.entries() {
            self.push((**e).clone())?;
        }
        Ok(())
    }

    /// Resolves a center specification such as `X7`, `POW[r=2]`,
    /// `isotomic(X7)`, `power(X8,2)` or `sidepow(X9,-1)`.
    pub fn resolve(&self, spec: &str) -> Result<Center, CatalogError> {
        let spec = spec.trim();
        let unknown = || CatalogError::UnknownCenter(spec.to_string());
        if let Some((head, rest)) = spec.split_once('(') {
            let inner = rest.strip_suffix(')').ok_or_else(unknown)?;
            let (inner, arg) = match head {
                "power" | "sidepow" => {
                    let (i, a) = inner.rsplit_once(',').ok_or_else(unknown)?;
                    (i, Some(a.trim().parse::<i64>().map_err(|_| unknown())?))
                }
                _ => (inner, None),
            };
            let base = self.resolve(inner)?;
            let t = match (head, arg) {
                ("isotomic", None) => Transform::Isotomic,
                ("isogonal", None) => Transform::Isogonal,
                ("power", Some(q)) => Transform::Power(q),
                ("sidepow", Some(k)) => Transform::SidePower(k),
                _ => return Err(unknown()),
            };
            return Ok(base.with(t));
        }
        let (id, r) = match spec.split_once('[') {
            Some((id, rest)) => {
                let value = rest
                    .strip_suffix(']')
                    .and_then(|v| v.trim().strip_prefix("r="))
                    .ok_or_else(unknown)?;
                (
                    id.trim(),
                    Some(parse_rational(value).map_err(|_| unknown())?),
                )
            }
            None => (spec, None),
        };
        let entry = self.get(id).ok_or_else(unknown)?.clone();
        Center::new(entry, r)
    }
}

fn validation_error(line: usize, id: &str, error: ExprError) -> CatalogError {
    match error {
        ExprError::SyntaxError { .. } => CatalogError::Syntax {
            line,
            id: id.to_string(),
            error,
        },
        _ => CatalogError::Validation {
            id: id.to_string(),
            error,
        },
    }
}

/// Parses catalog text; every entry is validated before acceptance.
pub fn parse_catalog(text: &str) -> Result<Catalog, CatalogError> {
    let mut cat = Catalog::default();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split('|').map(str::trim).collect();
        if !(4..=5).contains(&fields.len()) {
            return Err(CatalogError::Malformed {
                line,
                msg: format!(
                    "expected 4 or 5 `|`-separated fields, found {}",
                    fields.len()
                ),
            });
        }
        let id = fields[0];
        if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(CatalogError::Malformed {
                line,
                msg: format!("bad id `{id}`"),
            });
        }
        let form: CoordForm = fields[1]
            .parse()
            .map_err(|msg| CatalogError::Malformed { line, msg })?;
        let takes_r = match fields[3].to_ascii_lowercase().as_str() {
            "yes" => true,
            "no" => false,
            other => {
                return Err(CatalogError::Malformed {
                    line,
                    msg: format!("takes_r must be yes or no, found `{other}`"),
                })
            }
        };
        let expr = parse_center_expr(fields[2]).map_err(|e| validation_error(line, id, e))?;
        if expr.uses_r != takes_r {
            return Err(CatalogError::Malformed {
                line,
                msg: format!(
                    "takes_r is {} but the expression {} the parameter r",
                    fields[3],
                    if expr.uses_r { "uses" } else { "does not use" }
                ),
            });
        }
        let name = fields.get(4).copied().unwrap_or(id).to_string();
        cat.push(CatalogEntry {
            id: id.to_string(),
            name,
            form,
            rational_only: expr.rational_only,
            expr,
            takes_r,
        })?;
    }
    Ok(cat)
}

pub fn load_catalog_file(path: impl AsRef<Path>) -> Result<Catalog, CatalogError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| CatalogError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_catalog(&text)
}

/// The built-in library (parsed once).
pub fn builtin_catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| parse_catalog(BUILTIN).expect("built-in catalog is valid"))
}

/// Parameter values used when a parametric entry has to be instantiated
/// without a user-supplied `r`.
pub const SAMPLE_R: [i64; 2] = [-1, 2];

/// Post-processing applied to a center's areal coordinates on each face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Transform {
    /// (x, y, z) ↦ (1/x, 1/y, 1/z)
    Isotomic,
    /// (x, y, z) ↦ (a²/x, b²/y, c²/z)
    Isogonal,
    /// (x, y, z) ↦ (x^q, y^q, z^q)
    Power(i64),
    /// (x, y, z) ↦ (a^k x, b^k y, c^k z)
    SidePower(i64),
}

/// A concrete center: a catalog entry, its parameter, and transforms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Center {
    pub entry: Arc<CatalogEntry>,
    pub r: Option<Rational>,
    pub transforms: Vec<Transform>,
}

impl Center {
    pub fn new(entry: Arc<CatalogEntry>, r: Option<Rational>) -> Result<Self, CatalogError> {
        match (entry.takes_r, &r) {
            (true, None) => return Err(CatalogError::MissingParameter(entry.id.clone())),
            (false, Some(_)) => return Err(CatalogError::UnexpectedParameter(entry.id.clone())),
            _ => {}
        }
        Ok(Center {
            entry,
            r,
            transforms: Vec::new(),
        })
    }

    pub fn with(mut self, t: Transform) -> Self {
        self.transforms.push(t);
        self
    }

    pub fn isotomic(self) -> Self {
        self.with(Transform::Isotomic)
    }

    pub fn isogonal(self) -> Self {
        self.with(Transform::Isogonal)
    }

    /// Exact evaluation is possible on every rational triangle.
    pub fn rational_only(&self) -> bool {
        self.entry.rational_only && self.r.as_ref().is_none_or(|r| r.is_integer())
    }

    pub fn label(&self) -> String {
        let mut s = match &self.r {
            None => self.entry.id.clone(),
            Some(r) if r.is_integer() => format!("{}[r={}]", self.entry.id, r.numer()),
            Some(r) => format!("{}[r={}]", self.entry.id, format_rational(r)),
        };
        for t in &self.transforms {
            s = match t {
                Transform::Isotomic => format!("isotomic({s})"),
                Transform::Isogonal => format!("isogonal({s})"),
                Transform::Power(q) => format!("power({s},{q})"),
                Transform::SidePower(k) => format!("sidepow({s},{k})"),
            };
        }
        s
    }

    /// Areal coordinates of this center in the given triangle.
    pub fn areal(&self, s: &TriangleSides, mode: EvalMode) -> Result<Areal, TriangleError> {
        let mut p = eval_center_areal(&self.entry.expr, self.entry.form, s, self.r.as_ref(), mode)?;
        for t in &self.transforms {
            p = match t {
                Transform::Isotomic => isotomic_conjugate(&p)?,
                Transform::Isogonal => isogonal_conjugate(&p, s)?,
                Transform::Power(q) => {
                    let mut v = Vec::with_capacity(3);
                    for x in &p.0 {
                        v.push(x.powi(*q).map_err(|_| TriangleError::EvaluationSingular)?);
                    }
                    Areal(v.try_into().unwrap())
                }
                Transform::SidePower(k) => {
                    let sides = s.as_array();
                    let mut v = Vec::with_capacity(3);
                    for (x, side) in p.0.iter().zip(sides) {
                        let f = Scalar::Exact(side.clone()).powi(*k)?;
                        v.push(x * &f);
                    }
                    Areal(v.try_into().unwrap())
                }
            };
        }
        Ok(p)
    }
}

impl fmt::Display for Center {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Every builtin entry as a concrete center; parametric entries are
/// instantiated at each value in `rs`.
pub fn instantiate_all(cat: &Catalog, rs: &[i64]) -> Vec<Center> {
    let mut out = Vec::new();
    for e in cat.entries() {
        if e.takes_r {
            for &r in rs {
                out.push(Center::new(e.clone(), Some(int(r))).unwrap());
            }
        } else {
            out.push(Center::new(e.clone(), None).unwrap());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::triangle::proj_eq;

    fn triangles() -> Vec<TriangleSides> {
        [(3, 4, 5), (5, 6, 7), (7, 8, 13), (4, 9, 11), (10, 11, 12)]
            .iter()
            .map(|&(a, b, c)| TriangleSides::from_ints(a, b, c).unwrap())
            .collect()
    }

    fn areal(c: &str, s: &TriangleSides) -> Areal {
        builtin_catalog()
            .resolve(c)
            .unwrap()
            .areal(s, EvalMode::Interval { bits: 128 })
            .unwrap()
    }

    #[test]
    fn builtin_has_required_entries() {
        let cat = builtin_catalog();
        for id in [
            "X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8", "X9", "X10", "X11", "X20", "X25",
            "X37", "X38", "X39", "X40", "X41", "X42", "X43", "X44", "X48", "X53", "X57", "X63",
            "X69", "X76", "POW", "W1", "W2", "W3", "W4", "W5", "W6", "W7",
        ] {
            assert!(cat.get(id).is_some(), "missing {id}");
        }
        for i in 1..=14 {
            assert!(cat.get(&format!("Y{i}")).is_some());
        }
        for i in 1..=11 {
            assert!(cat.get(&format!("Z{i}")).is_some());
        }
    }

    #[test]
    fn lookup_y9() {
        let e = builtin_catalog().get("Y9").unwrap();
        assert_eq!(e.form, CoordForm::Trilinear);
        assert_eq!(e.expr.source, "a*(b+c-2*a)");
    }

    #[test]
    fn x43_family_note() {
        let cat = builtin_catalog();
        assert_eq!(cat.get("X43").unwrap().expr.source, "1/b+1/c-1/a");
        assert_eq!(cat.get("X102").unwrap().expr.source, "a*(1/b+1/c-1/a)");
        assert_eq!(cat.get("X117").unwrap().expr.source, "(1/b+1/c-1/a)/a");
    }

    #[test]
    fn rational_only_flags() {
        let cat = builtin_catalog();
        for id in ["X1", "X5", "X11", "X53", "Z8", "POW", "Y14"] {
            assert!(cat.get(id).unwrap().rational_only, "{id}");
        }
        for id in ["X371", "X372", "X485", "X486"] {
            assert!(!cat.get(id).unwrap().rational_only, "{id}");
        }
    }

    #[test]
    fn power_point_special_cases() {
        for s in triangles() {
            assert_eq!(
                proj_eq(&areal("POW[r=0]", &s).0, &areal("X1", &s).0),
                Some(true)
            );
            assert_eq!(
                proj_eq(&areal("POW[r=-1]", &s).0, &areal("X2", &s).0),
                Some(true)
            );
            assert_eq!(
                proj_eq(&areal("POW[r=1]", &s).0, &areal("X6", &s).0),
                Some(true)
            );
        }
    }

    #[test]
    fn gergonne_nagel_isotomic_pair() {
        for s in triangles() {
            let g = areal("isotomic(X7)", &s);
            assert_eq!(proj_eq(&g.0, &areal("X8", &s).0), Some(true));
        }
    }

    #[test]
    fn orthocenter_and_x69_are_isotomic() {
        for s in triangles().into_iter().skip(1) {
            let h = areal("X4", &s);
            assert_eq!(proj_eq(&areal("isotomic(X69)", &s).0, &h.0), Some(true));
            let sq = |x: &Rational| x * x;
            let pattern = [
                Scalar::Exact((sq(s.b()) + sq(s.c()) - sq(s.a())).recip()),
                Scalar::Exact((sq(s.c()) + sq(s.a()) - sq(s.b())).recip()),
                Scalar::Exact((sq(s.a()) + sq(s.b()) - sq(s.c())).recip()),
            ];
            assert_eq!(proj_eq(&h.0, &pattern), Some(true));
        }
    }

    #[test]
    fn x117_x102_are_not_isotomic_as_written() {
        let s = TriangleSides::from_ints(5, 6, 7).unwrap();
        let iso = areal("isotomic(X117)", &s);
        assert_eq!(proj_eq(&iso.0, &areal("X102", &s).0), Some(false));
    }

    #[test]
    fn resolve_specs() {
        let cat = builtin_catalog();
        assert_eq!(cat.resolve("Z8[r=2]").unwrap().label(), "Z8[r=2]");
        assert_eq!(cat.resolve("isogonal(X7)").unwrap().label(), "isogonal(X7)");
        assert_eq!(cat.resolve("power(X8,2)").unwrap().label(), "power(X8,2)");
        assert_eq!(
            cat.resolve("sidepow(X9,-1)").unwrap().label(),
            "sidepow(X9,-1)"
        );
        assert!(matches!(
            cat.resolve("X999"),
            Err(CatalogError::UnknownCenter(_))
        ));
        assert!(matches!(
            cat.resolve("POW"),
            Err(CatalogError::MissingParameter(_))
        ));
        assert!(matches!(
            cat.resolve("X1[r=2]"),
            Err(CatalogError::UnexpectedParameter(_))
        ));
        assert_eq!(cat.resolve("POW[r=1/2]").unwrap().r, Some(rat(1, 2)));
    }

    #[test]
    fn file_format() {
        let cat = parse_catalog("# comment\nX7 | areal | (b+c-a) | no\n\n").unwrap();
        assert_eq!(cat.len(), 1);
        assert!(parse_catalog("").unwrap().is_empty());
        assert!(matches!(
            parse_catalog("Q1 | areal | b+a | no"),
            Err(CatalogError::Validation {
                error: ExprError::NotSymmetric,
                ..
            })
        ));
        assert!(matches!(
            parse_catalog("Q1 | areal | b+c | no\nQ1 | areal | b+c | no"),
            Err(CatalogError::Duplicate(_))
        ));
        assert!(matches!(
            parse_catalog("Q1 | areal | b+* | no"),
            Err(CatalogError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_catalog("Q1 | areal | a^r | no"),
            Err(CatalogError::Malformed { .. })
        ));
    }
}
