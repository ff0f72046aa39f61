//! Finite function classes as value matrices, plus the explicit generators
//! for every concrete class used elsewhere in the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratio::{decimal12, format_rational, parse_rational, rat_i64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Binary,
    Real,
}

/// A finite function class: rows are points, columns are functions, entry
/// `(i, j)` is `f_j(x_i)` as an exact rational (±1 for binary classes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionClassTable {
    points: Vec<String>,
    functions: Vec<String>,
    values: Vec<Vec<BigRational>>, // row-major, values[point][function]
    kind: Kind,
}

impl FunctionClassTable {
    pub fn new(
        points: Vec<String>,
        functions: Vec<String>,
        values: Vec<Vec<BigRational>>,
        kind: Kind,
    ) -> Result<Self> {
        if points.is_empty() || functions.is_empty() {
            return Err(Error::Malformed("table must have at least one point and one function".into()));
        }
        if values.len() != points.len() {
            return Err(Error::Malformed(format!(
                "value matrix has {} rows, expected {}",
                values.len(),
                points.len()
            )));
        }
        for (i, row) in values.iter().enumerate() {
            if row.len() != functions.len() {
                return Err(Error::Parse {
                    row: i,
                    col: row.len(),
                    msg: format!("ragged row: {} entries, expected {}", row.len(), functions.len()),
                });
            }
            if kind == Kind::Binary {
                for (j, v) in row.iter().enumerate() {
                    if !(v == &rat_i64(1) || v == &rat_i64(-1)) {
                        return Err(Error::Parse {
                            row: i,
                            col: j,
                            msg: format!("binary table entry must be ±1, got {}", format_rational(v)),
                        });
                    }
                }
            }
        }
        for (axis, labels) in [("point", &points), ("function", &functions)] {
            let mut seen = std::collections::HashSet::new();
            for l in labels.iter() {
                if !seen.insert(l) {
                    return Err(Error::Malformed(format!("duplicate {axis} label {l:?}")));
                }
            }
        }
        Ok(Self { points, functions, values, kind })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn n_funcs(&self) -> usize {
        self.functions.len()
    }

    pub fn point_labels(&self) -> &[String] {
        &self.points
    }

    pub fn function_labels(&self) -> &[String] {
        &self.functions
    }

    pub fn entry(&self, point: usize, func: usize) -> &BigRational {
        &self.values[point][func]
    }

    pub fn column(&self, func: usize) -> Vec<BigRational> {
        self.values.iter().map(|row| row[func].clone()).collect()
    }

    /// Sign of every entry as ±1, for binary tables.
    pub fn sign_entry(&self, point: usize, func: usize) -> i8 {
        if self.values[point][func].is_positive() {
            1
        } else {
            -1
        }
    }
}

fn pm_label(v: i8) -> BigRational {
    rat_i64(v as i64)
}

/// Threshold class over `[n]`: `f_i(x) = +1` iff `x >= i`, together with the
/// identically −1 function `f_{n+1}`.
pub fn gen_thresholds(n: usize) -> Result<FunctionClassTable> {
    if n == 0 {
        return Err(Error::InvalidParameter("thresholds: n must be >= 1".into()));
    }
    let points: Vec<String> = (1..=n).map(|x| x.to_string()).collect();
    let functions: Vec<String> = (1..=n + 1).map(|i| format!("f{i}")).collect();
    let values = (1..=n)
        .map(|x| (1..=n + 1).map(|i| pm_label(if x >= i { 1 } else { -1 })).collect())
        .collect();
    FunctionClassTable::new(points, functions, values, Kind::Binary)
}

/// Singleton class over `[n]`: `f_i(x) = +1` iff `x = i`, plus the
/// identically −1 function.
pub fn gen_singletons(n: usize) -> Result<FunctionClassTable> {
    if n == 0 {
        return Err(Error::InvalidParameter("singletons: n must be >= 1".into()));
    }
    let points: Vec<String> = (1..=n).map(|x| x.to_string()).collect();
    let functions: Vec<String> = (1..=n + 1).map(|i| format!("f{i}")).collect();
    let values = (1..=n)
        .map(|x| (1..=n + 1).map(|i| pm_label(if x == i { 1 } else { -1 })).collect())
        .collect();
    FunctionClassTable::new(points, functions, values, Kind::Binary)
}

/// Parity class over the cube `{−1,+1}^d`: functions are indexed by subsets
/// `S ⊆ [d]` in binary-counter order, entry is `∏_{i∈S} x_i`. Points are laid
/// out in lexicographic cube order with +1 sorting before −1.
pub fn gen_parities(d: usize) -> Result<FunctionClassTable> {
    if d == 0 {
        return Err(Error::InvalidParameter("parities: d must be >= 1".into()));
    }
    if d > 12 {
        return Err(Error::ResourceLimit(format!("parities: d = {d} gives a 2^{d} x 2^{d} table")));
    }
    let size = 1usize << d;
    let coord = |pt: usize, j: usize| -> i8 {
        // coordinate j of point pt; bit 0 of pt is the first coordinate
        if (pt >> (d - 1 - j)) & 1 == 0 {
            1
        } else {
            -1
        }
    };
    let points: Vec<String> = (0..size)
        .map(|pt| (0..d).map(|j| if coord(pt, j) == 1 { '+' } else { '-' }).collect())
        .collect();
    let functions: Vec<String> = (0..size)
        .map(|s| {
            let members: Vec<String> =
                (0..d).filter(|j| (s >> j) & 1 == 1).map(|j| (j + 1).to_string()).collect();
            format!("S{{{}}}", members.join(","))
        })
        .collect();
    let values = (0..size)
        .map(|pt| {
            (0..size)
                .map(|s| {
                    let mut v = 1i8;
                    for j in 0..d {
                        if (s >> j) & 1 == 1 {
                            v *= coord(pt, j);
                        }
                    }
                    pm_label(v)
                })
                .collect()
        })
        .collect();
    FunctionClassTable::new(points, functions, values, Kind::Binary)
}

/// The N×N real class where the exact eluder dimension at scale ε is N while
/// star number is 2 and threshold dimension is 1: entries are 0 above the
/// diagonal, `diag_margin·ε` on it, and `0.99·ε` below.
///
/// The diagonal carries a margin strictly above 1 so that the strict
/// disagreement inequality holds at scale exactly ε.
pub fn gen_scale_counterexample(
    n: usize,
    eps: &BigRational,
    diag_margin: &BigRational,
) -> Result<FunctionClassTable> {
    if n == 0 {
        return Err(Error::InvalidParameter("scale counterexample: N must be >= 1".into()));
    }
    if !eps.is_positive() {
        return Err(Error::InvalidParameter("scale counterexample: eps must be > 0".into()));
    }
    if diag_margin <= &BigRational::one() {
        return Err(Error::InvalidParameter(
            "scale counterexample: diag_margin must be > 1 (strict disagreement at scale eps)".into(),
        ));
    }
    let points: Vec<String> = (1..=n).map(|x| x.to_string()).collect();
    let functions: Vec<String> = (1..=n).map(|i| format!("f{i}")).collect();
    let below = BigRational::new(BigInt::from(99), BigInt::from(100)) * eps;
    let diag = diag_margin * eps;
    let values = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i < j {
                        BigRational::zero()
                    } else if i == j {
                        diag.clone()
                    } else {
                        below.clone()
                    }
                })
                .collect()
        })
        .collect();
    FunctionClassTable::new(points, functions, values, Kind::Real)
}

/// Exponential family `exp(θ_i · x_j)` on a uniform grid of `[0,1]`; its
/// value matrix is Vandermonde, so the numeric rank equals `min(points, funcs)`.
/// Entries are rounded to 12 significant decimal digits and stored exactly.
pub fn gen_exp_class(n_points: usize, n_funcs: usize) -> Result<FunctionClassTable> {
    if n_points == 0 || n_funcs == 0 {
        return Err(Error::InvalidParameter("exp class: sizes must be >= 1".into()));
    }
    let points: Vec<String> = (1..=n_points).map(|j| format!("{j}/{n_points}")).collect();
    let functions: Vec<String> = (1..=n_funcs).map(|i| format!("theta={i}/{n_funcs}")).collect();
    let values = (1..=n_points)
        .map(|j| {
            (1..=n_funcs)
                .map(|i| {
                    let z = (i as f64 / n_funcs as f64) * (j as f64 / n_points as f64);
                    decimal12(z.exp())
                })
                .collect()
        })
        .collect();
    FunctionClassTable::new(points, functions, values, Kind::Real)
}

// ---------------------------------------------------------------------------
// serialization

fn value_to_json(v: &BigRational, kind: Kind) -> serde_json::Value {
    match kind {
        Kind::Binary => {
            serde_json::Value::from(if v.is_positive() { 1i64 } else { -1i64 })
        }
        Kind::Real => serde_json::Value::from(format_rational(v)),
    }
}

fn value_from_json(v: &serde_json::Value, row: usize, col: usize) -> Result<BigRational> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(rat_i64(i))
            } else {
                // non-integer literal: go through its decimal text
                parse_rational(&n.to_string()).map_err(|e| Error::Parse {
                    row,
                    col,
                    msg: e.to_string(),
                })
            }
        }
        serde_json::Value::String(s) => parse_rational(s).map_err(|e| Error::Parse {
            row,
            col,
            msg: e.to_string(),
        }),
        other => Err(Error::Parse {
            row,
            col,
            msg: format!("expected number or string, got {other}"),
        }),
    }
}

pub fn serialize_class(table: &FunctionClassTable) -> String {
    let values: Vec<Vec<serde_json::Value>> = (0..table.n_points())
        .map(|i| (0..table.n_funcs()).map(|j| value_to_json(table.entry(i, j), table.kind())).collect())
        .collect();
    let doc = serde_json::json!({
        "kind": match table.kind() { Kind::Binary => "binary", Kind::Real => "real" },
        "points": table.point_labels(),
        "functions": table.function_labels(),
        "values": values,
    });
    serde_json::to_string_pretty(&doc).expect("table json")
}

pub fn parse_class(bytes: &[u8]) -> Result<FunctionClassTable> {
    let doc: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| Error::Malformed(format!("invalid JSON: {e}")))?;
    let kind = match doc.get("kind").and_then(|k| k.as_str()) {
        Some("binary") => Kind::Binary,
        Some("real") => Kind::Real,
        other => return Err(Error::Malformed(format!("kind must be \"binary\" or \"real\", got {other:?}"))),
    };
    let labels = |key: &str| -> Result<Vec<String>> {
        doc.get(key)
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::Malformed(format!("missing {key:?} array")))?
            .iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| Error::Malformed(format!("{key:?} labels must be strings")))
            })
            .collect()
    };
    let points = labels("points")?;
    let functions = labels("functions")?;
    let rows = doc
        .get("values")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::Malformed("missing \"values\" matrix".into()))?;
    let mut values = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse { row: i, col: 0, msg: "matrix row must be an array".into() })?;
        let mut out = Vec::with_capacity(row.len());
        for (j, v) in row.iter().enumerate() {
            out.push(value_from_json(v, i, j)?);
        }
        values.push(out);
    }
    FunctionClassTable::new(points, functions, values, kind)
}

/// CSV form: header row is `point` followed by function labels; each data row
/// is a point label followed by the entries. Kind is binary iff every entry
/// is ±1.
pub fn serialize_class_csv(table: &FunctionClassTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["point".to_string()];
    header.extend(table.function_labels().iter().cloned());
    w.write_record(&header).expect("csv header");
    for i in 0..table.n_points() {
        let mut rec = vec![table.point_labels()[i].clone()];
        for j in 0..table.n_funcs() {
            rec.push(format_rational(table.entry(i, j)));
        }
        w.write_record(&rec).expect("csv row");
    }
    String::from_utf8(w.into_inner().expect("csv buffer")).expect("csv utf8")
}

pub fn parse_class_csv(bytes: &[u8]) -> Result<FunctionClassTable> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(bytes);
    let mut records = r.records();
    let header = records
        .next()
        .ok_or_else(|| Error::Malformed("empty CSV".into()))?
        .map_err(|e| Error::Malformed(format!("CSV: {e}")))?;
    if header.len() < 2 {
        return Err(Error::Malformed("CSV header must list at least one function".into()));
    }
    let functions: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let mut points = Vec::new();
    let mut values: Vec<Vec<BigRational>> = Vec::new();
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(|e| Error::Parse { row: i, col: 0, msg: e.to_string() })?;
        if rec.len() != functions.len() + 1 {
            return Err(Error::Parse {
                row: i,
                col: rec.len(),
                msg: format!("expected {} fields, got {}", functions.len() + 1, rec.len()),
            });
        }
        points.push(rec[0].to_owned());
        let mut row = Vec::with_capacity(functions.len());
        for (j, field) in rec.iter().skip(1).enumerate() {
            row.push(parse_rational(field).map_err(|e| Error::Parse { row: i, col: j, msg: e.to_string() })?);
        }
        values.push(row);
    }
    let one = rat_i64(1);
    let minus = rat_i64(-1);
    let binary = values.iter().flatten().all(|v| v == &one || v == &minus);
    FunctionClassTable::new(points, functions, values, if binary { Kind::Binary } else { Kind::Real })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat_frac;

    #[test]
    fn thresholds_small() {
        let t = gen_thresholds(2).unwrap();
        assert_eq!(t.n_points(), 2);
        assert_eq!(t.n_funcs(), 3);
        assert_eq!(t.column(0), vec![rat_i64(1), rat_i64(1)]);
        assert_eq!(t.column(1), vec![rat_i64(-1), rat_i64(1)]);
        assert_eq!(t.column(2), vec![rat_i64(-1), rat_i64(-1)]);
        let t1 = gen_thresholds(1).unwrap();
        assert_eq!(t1.n_points(), 1);
        assert_eq!(t1.n_funcs(), 2);
        assert!(gen_thresholds(0).is_err());
    }

    #[test]
    fn thresholds_columns_monotone() {
        let t = gen_thresholds(9).unwrap();
        for j in 0..t.n_funcs() - 1 {
            for i in 0..t.n_points() {
                assert!(t.entry(i, j + 1) <= t.entry(i, j));
            }
            // each column is a monotone step in x
            for i in 0..t.n_points() - 1 {
                assert!(t.entry(i, j) <= t.entry(i + 1, j));
            }
        }
    }

    #[test]
    fn singletons_identity_like() {
        let t = gen_singletons(3).unwrap();
        assert_eq!(t.n_funcs(), 4);
        for i in 0..3 {
            for j in 0..4 {
                let expect = if i == j { 1 } else { -1 };
                assert_eq!(t.sign_entry(i, j), expect);
            }
        }
    }

    #[test]
    fn parities_d1_d2() {
        let t = gen_parities(1).unwrap();
        assert_eq!(t.sign_entry(0, 0), 1);
        assert_eq!(t.sign_entry(1, 0), 1);
        assert_eq!(t.sign_entry(0, 1), 1);
        assert_eq!(t.sign_entry(1, 1), -1);
        let t2 = gen_parities(2).unwrap();
        assert_eq!(t2.n_points(), 4);
        // character orthogonality: every non-constant column sums to zero
        for j in 1..4 {
            let s: i32 = (0..4).map(|i| t2.sign_entry(i, j) as i32).sum();
            assert_eq!(s, 0);
        }
        assert!(gen_parities(13).is_err());
    }

    #[test]
    fn parity_orthogonality_d6() {
        let t = gen_parities(6).unwrap();
        for j in 1..t.n_funcs() {
            let s: i32 = (0..t.n_points()).map(|i| t.sign_entry(i, j) as i32).sum();
            assert_eq!(s, 0, "column {j} should sum to zero");
        }
        for i in 1..t.n_points() {
            let s: i32 = (0..t.n_funcs()).map(|j| t.sign_entry(i, j) as i32).sum();
            assert_eq!(s, 0, "row {i} should sum to zero");
        }
    }

    #[test]
    fn scale_counterexample_values() {
        let eps = rat_i64(1);
        let margin = rat_frac(101, 100);
        let t = gen_scale_counterexample(3, &eps, &margin).unwrap();
        assert_eq!(t.entry(0, 0), &rat_frac(101, 100));
        assert_eq!(t.entry(0, 1), &rat_i64(0));
        assert_eq!(t.entry(1, 0), &rat_frac(99, 100));
        assert_eq!(t.entry(2, 2), &rat_frac(101, 100));
        let t1 = gen_scale_counterexample(1, &eps, &margin).unwrap();
        assert_eq!(t1.entry(0, 0), &rat_frac(101, 100));
        assert!(gen_scale_counterexample(2, &eps, &rat_i64(1)).is_err());
    }

    #[test]
    fn exp_class_single_entry() {
        let t = gen_exp_class(1, 1).unwrap();
        let v = crate::ratio::to_f64(t.entry(0, 0));
        assert!((v - std::f64::consts::E).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip() {
        for t in [gen_thresholds(2).unwrap(), gen_parities(2).unwrap(),
                  gen_scale_counterexample(3, &rat_frac(1, 2), &rat_frac(101, 100)).unwrap()] {
            let s = serialize_class(&t);
            let back = parse_class(s.as_bytes()).unwrap();
            assert_eq!(t, back);
        }
    }

    #[test]
    fn csv_cross_format() {
        let t = gen_parities(2).unwrap();
        let csv = serialize_class_csv(&t);
        let back = parse_class_csv(csv.as_bytes()).unwrap();
        assert_eq!(t, back);
    }

    proptest::proptest! {
        #[test]
        fn random_table_round_trips_both_formats(
            np in 1usize..6,
            nf in 1usize..6,
            seed in proptest::num::u64::ANY,
        ) {
            let t = crate::testutil::random_rational_table(np, nf, seed);
            let json = parse_class(serialize_class(&t).as_bytes()).unwrap();
            proptest::prop_assert_eq!(&t, &json);
            // CSV re-infers the kind, so compare labels and entries only
            let csv = parse_class_csv(serialize_class_csv(&t).as_bytes()).unwrap();
            proptest::prop_assert_eq!(t.point_labels(), csv.point_labels());
            proptest::prop_assert_eq!(t.function_labels(), csv.function_labels());
            for i in 0..np {
                for j in 0..nf {
                    proptest::prop_assert_eq!(t.entry(i, j), csv.entry(i, j));
                }
            }
        }
    }

    #[test]
    fn binary_rejects_bad_entry() {
        let doc = r#"{"kind":"binary","points":["a"],"functions":["f"],"values":[[2]]}"#;
        match parse_class(doc.as_bytes()) {
            Err(Error::Parse { row: 0, col: 0, .. }) => {}
            other => panic!("expected located parse error, got {other:?}"),
        }
    }
}
