//! Witness sequences: the certificates behind every dimension value.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::ratio::{format_rational, parse_rational, rat_i64};
use crate::table::{FunctionClassTable, Kind};

/// A reference function: either a member column or an explicit value vector
/// (the all-ones reference used against sampled matrices is not a member).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReferenceFunction {
    Column(usize),
    Vector(Vec<BigRational>),
}

impl ReferenceFunction {
    pub fn ones(n: usize) -> Self {
        ReferenceFunction::Vector(vec![rat_i64(1); n])
    }

    pub fn minus_ones(n: usize) -> Self {
        ReferenceFunction::Vector(vec![rat_i64(-1); n])
    }

    pub fn zeros(n: usize) -> Self {
        ReferenceFunction::Vector(vec![BigRational::zero(); n])
    }

    /// Materialize the reference as a value per point.
    pub fn resolve(&self, table: &FunctionClassTable) -> Result<Vec<BigRational>> {
        match self {
            ReferenceFunction::Column(j) => {
                if *j >= table.n_funcs() {
                    return Err(Error::InvalidParameter(format!(
                        "reference column {} out of range (|F| = {})",
                        j,
                        table.n_funcs()
                    )));
                }
                Ok(table.column(*j))
            }
            ReferenceFunction::Vector(v) => {
                if v.len() != table.n_points() {
                    return Err(Error::InvalidParameter(format!(
                        "reference vector length {} != |X| = {}",
                        v.len(),
                        table.n_points()
                    )));
                }
                if table.kind() == Kind::Binary {
                    for (i, x) in v.iter().enumerate() {
                        if x != &rat_i64(1) && x != &rat_i64(-1) {
                            return Err(Error::InvalidParameter(format!(
                                "binary reference entry {i} must be ±1, got {}",
                                format_rational(x)
                            )));
                        }
                    }
                }
                Ok(v.clone())
            }
        }
    }

    /// Whether the reference is a member column of the table.
    pub fn is_member(&self) -> bool {
        matches!(self, ReferenceFunction::Column(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    Eluder,
    Star,
    Threshold,
}

impl WitnessKind {
    pub fn name(&self) -> &'static str {
        match self {
            WitnessKind::Eluder => "eluder",
            WitnessKind::Star => "star",
            WitnessKind::Threshold => "threshold",
        }
    }
}

/// An ordered list of (point index, function index) pairs certifying a
/// dimension lower bound at a given scale (scale 0 = combinatorial).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSequence {
    pub kind: WitnessKind,
    pub reference: ReferenceFunction,
    pub scale: BigRational,
    pub entries: Vec<(usize, usize)>,
}

/// Outcome of `verify_witness`: either the witness checks out, or the first
/// violated condition with its location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Valid,
    Violation { position: usize, msg: String },
}

impl Verification {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verification::Valid)
    }
}

/// Check every condition of the claimed kind exactly, in rational arithmetic.
///
/// At scale 0 on a binary table this coincides with the combinatorial
/// conditions (a squared deviation sum that must be ≤ 0 forces agreement).
pub fn verify_witness(table: &FunctionClassTable, witness: &WitnessSequence) -> Result<Verification> {
    if witness.scale.is_negative() {
        return Err(Error::InvalidWitness("scale must be nonnegative".into()));
    }
    let reference = witness.reference.resolve(table)?;
    for (pos, &(x, f)) in witness.entries.iter().enumerate() {
        if x >= table.n_points() || f >= table.n_funcs() {
            return Err(Error::InvalidWitness(format!(
                "entry {pos} = ({x}, {f}) out of range for a {}x{} table",
                table.n_points(),
                table.n_funcs()
            )));
        }
    }
    if witness.scale.is_zero() {
        // combinatorial: repeated points cannot both agree and disagree
        let mut seen = std::collections::HashSet::new();
        for (pos, &(x, _)) in witness.entries.iter().enumerate() {
            if !seen.insert(x) {
                return Ok(Verification::Violation {
                    position: pos,
                    msg: format!("point {x} repeats in a combinatorial witness"),
                });
            }
        }
    }
    let eps = &witness.scale;
    let eps2 = eps * eps;
    let dev = |x: usize, f: usize| table.entry(x, f) - &reference[x];
    for (i, &(xi, fi)) in witness.entries.iter().enumerate() {
        match witness.kind {
            WitnessKind::Eluder => {
                if dev(xi, fi).abs() <= *eps {
                    return Ok(Verification::Violation {
                        position: i,
                        msg: format!("|f_{fi}(x_{xi}) - ref(x_{xi})| <= scale"),
                    });
                }
                let sum: BigRational =
                    witness.entries[..i].iter().map(|&(xj, _)| { let d = dev(xj, fi); &d * &d }).sum();
                if sum > eps2 {
                    return Ok(Verification::Violation {
                        position: i,
                        msg: "prefix squared deviation exceeds scale^2".into(),
                    });
                }
            }
            WitnessKind::Star => {
                if dev(xi, fi).abs() <= *eps {
                    return Ok(Verification::Violation {
                        position: i,
                        msg: format!("|f_{fi}(x_{xi}) - ref(x_{xi})| <= scale"),
                    });
                }
                let sum: BigRational = witness
                    .entries
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &(xj, _))| { let d = dev(xj, fi); &d * &d })
                    .sum();
                if sum > eps2 {
                    return Ok(Verification::Violation {
                        position: i,
                        msg: "off-position squared deviation exceeds scale^2".into(),
                    });
                }
            }
            WitnessKind::Threshold => {
                for (k, &(xk, _)) in witness.entries.iter().enumerate().skip(i) {
                    if dev(xk, fi).abs() <= *eps {
                        return Ok(Verification::Violation {
                            position: i,
                            msg: format!("|f_{fi}(x_{xk}) - ref(x_{xk})| <= scale at suffix position {k}"),
                        });
                    }
                }
                let sum: BigRational =
                    witness.entries[..i].iter().map(|&(xj, _)| { let d = dev(xj, fi); &d * &d }).sum();
                if sum > eps2 {
                    return Ok(Verification::Violation {
                        position: i,
                        msg: "prefix squared deviation exceeds scale^2".into(),
                    });
                }
            }
        }
    }
    Ok(Verification::Valid)
}

/// A dimension value with its witness and search statistics.
#[derive(Debug, Clone)]
pub struct DimensionReport {
    pub measure: String,
    pub reference: ReferenceFunction,
    pub scale: BigRational,
    pub value: usize,
    pub witness: WitnessSequence,
    pub nodes_explored: u64,
    /// false when a length cap truncated the search; the value is then only
    /// a lower bound
    pub exact: bool,
}

// ---------------------------------------------------------------------------
// JSON forms

pub fn reference_to_json(r: &ReferenceFunction) -> serde_json::Value {
    match r {
        ReferenceFunction::Column(j) => serde_json::json!({ "column": j }),
        ReferenceFunction::Vector(v) => {
            serde_json::json!({ "vector": v.iter().map(format_rational).collect::<Vec<_>>() })
        }
    }
}

pub fn reference_from_json(v: &serde_json::Value) -> Result<ReferenceFunction> {
    if let Some(j) = v.get("column").and_then(|c| c.as_u64()) {
        return Ok(ReferenceFunction::Column(j as usize));
    }
    if let Some(arr) = v.get("vector").and_then(|c| c.as_array()) {
        let vals = arr
            .iter()
            .map(|x| match x {
                serde_json::Value::String(s) => parse_rational(s),
                serde_json::Value::Number(n) => parse_rational(&n.to_string()),
                other => Err(Error::Malformed(format!("bad reference entry {other}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(ReferenceFunction::Vector(vals));
    }
    Err(Error::Malformed("reference must be {\"column\": j} or {\"vector\": [...]}".into()))
}

pub fn witness_to_json(w: &WitnessSequence) -> serde_json::Value {
    serde_json::json!({
        "kind": w.kind.name(),
        "reference": reference_to_json(&w.reference),
        "scale": format_rational(&w.scale),
        "entries": w.entries.iter().map(|&(x, f)| vec![x, f]).collect::<Vec<_>>(),
    })
}

pub fn witness_from_json(v: &serde_json::Value) -> Result<WitnessSequence> {
    let kind = match v.get("kind").and_then(|k| k.as_str()) {
        Some("eluder") => WitnessKind::Eluder,
        Some("star") => WitnessKind::Star,
        Some("threshold") => WitnessKind::Threshold,
        other => return Err(Error::Malformed(format!("bad witness kind {other:?}"))),
    };
    let reference =
        reference_from_json(v.get("reference").ok_or_else(|| Error::Malformed("missing reference".into()))?)?;
    let scale = match v.get("scale") {
        Some(serde_json::Value::String(s)) => parse_rational(s)?,
        Some(serde_json::Value::Number(n)) => parse_rational(&n.to_string())?,
        _ => return Err(Error::Malformed("missing scale".into())),
    };
    let entries = v
        .get("entries")
        .and_then(|e| e.as_array())
        .ok_or_else(|| Error::Malformed("missing entries".into()))?
        .iter()
        .map(|pair| {
            let pair = pair.as_array().filter(|p| p.len() == 2);
            match pair {
                Some(p) => {
                    let x = p[0].as_u64().ok_or_else(|| Error::Malformed("bad entry index".into()))?;
                    let f = p[1].as_u64().ok_or_else(|| Error::Malformed("bad entry index".into()))?;
                    Ok((x as usize, f as usize))
                }
                None => Err(Error::Malformed("witness entry must be [point, function]".into())),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WitnessSequence { kind, reference, scale, entries })
}

pub fn report_to_json(r: &DimensionReport) -> serde_json::Value {
    serde_json::json!({
        "measure": r.measure,
        "reference": reference_to_json(&r.reference),
        "scale": format_rational(&r.scale),
        "value": r.value,
        "witness": witness_to_json(&r.witness),
        "nodes_explored": r.nodes_explored,
        "exact": r.exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::gen_thresholds;

    #[test]
    fn empty_witness_is_valid() {
        let t = gen_thresholds(3).unwrap();
        let w = WitnessSequence {
            kind: WitnessKind::Eluder,
            reference: ReferenceFunction::Column(3),
            scale: BigRational::zero(),
            entries: vec![],
        };
        assert!(verify_witness(&t, &w).unwrap().is_valid());
    }

    #[test]
    fn out_of_range_entry_errors() {
        let t = gen_thresholds(2).unwrap();
        let w = WitnessSequence {
            kind: WitnessKind::Eluder,
            reference: ReferenceFunction::Column(2),
            scale: BigRational::zero(),
            entries: vec![(5, 0)],
        };
        assert!(matches!(verify_witness(&t, &w), Err(Error::InvalidWitness(_))));
    }

    #[test]
    fn witness_json_round_trip() {
        let w = WitnessSequence {
            kind: WitnessKind::Star,
            reference: ReferenceFunction::ones(3),
            scale: crate::ratio::rat_frac(1, 2),
            entries: vec![(0, 1), (2, 3)],
        };
        let j = witness_to_json(&w);
        assert_eq!(witness_from_json(&j).unwrap(), w);
    }
}
