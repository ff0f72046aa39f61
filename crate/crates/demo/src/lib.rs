//! Browser playground: thin JSON-string wrappers around the core library,
//! exported through wasm-bindgen. Everything takes and returns strings so the
//! same functions are directly testable on the host.

use wasm_bindgen::prelude::*;

use dimkit::combodim::{dim_comb, dim_sup_over_refs, ldim, vcdim, Measure};
use dimkit::ramsey::{color_from_witness, equivalence_audit, Color};
use dimkit::ratio::parse_rational;
use dimkit::scaledim::gen_relu_star_witness;
use dimkit::table::{parse_class, parse_class_csv, serialize_class, FunctionClassTable, Kind};
use dimkit::witness::{report_to_json, verify_witness, witness_to_json, ReferenceFunction};

fn err_json(msg: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": msg.to_string() }).to_string()
}

/// Accept either the JSON document or the CSV form of a class.
fn parse_any(input: &str) -> dimkit::Result<FunctionClassTable> {
    let trimmed = input.trim_start();
    if trimmed.starts_with('{') {
        parse_class(input.as_bytes())
    } else {
        parse_class_csv(input.as_bytes())
    }
}

/// `"ones"`, `"minus-ones"`, `"zeros"`, or `"col:K"`; anything else is an error.
fn parse_ref(spec: &str, table: &FunctionClassTable) -> dimkit::Result<ReferenceFunction> {
    let n = table.n_points();
    match spec.trim() {
        "ones" => Ok(ReferenceFunction::ones(n)),
        "minus-ones" => Ok(ReferenceFunction::minus_ones(n)),
        "zeros" => Ok(ReferenceFunction::zeros(n)),
        other => {
            let k = other
                .strip_prefix("col:")
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| {
                    dimkit::Error::InvalidParameter(format!("unknown reference {other:?}"))
                })?;
            if k >= table.n_funcs() {
                return Err(dimkit::Error::InvalidParameter(format!(
                    "col:{k} out of range for {} functions",
                    table.n_funcs()
                )));
            }
            Ok(ReferenceFunction::Column(k))
        }
    }
}

/// Parse a class and report its combinatorial dimensions with respect to the
/// given reference, or (with `"sup"`) the maximum over member references.
/// Binary classes also get VC and Littlestone dimensions.
#[wasm_bindgen]
pub fn analyze_class(input: &str, reference: &str) -> String {
    let run = || -> dimkit::Result<serde_json::Value> {
        let table = parse_any(input)?;
        let sup = reference.trim() == "sup";
        let mut reports = serde_json::Map::new();
        for m in [Measure::Eluder, Measure::Star, Measure::Threshold] {
            let r = if sup {
                dim_sup_over_refs(&table, m)?
            } else {
                let fr = parse_ref(reference, &table)?;
                dim_comb(&table, &fr, m)?
            };
            reports.insert(r.measure.clone(), report_to_json(&r));
        }
        let mut out = serde_json::json!({
            "points": table.n_points(),
            "functions": table.n_funcs(),
            "measures": reports,
        });
        if table.kind() == Kind::Binary {
            out["vc"] = serde_json::json!(vcdim(&table)?);
            out["littlestone"] = serde_json::json!(ldim(&table)?);
        }
        Ok(out)
    };
    match run() {
        Ok(v) => v.to_string(),
        Err(e) => err_json(e),
    }
}

/// Run the two-coloring argument on a class: compute the eluder value, color
/// the witness pairs, find the largest monochromatic clique, and extract the
/// star or threshold subsequence it certifies.
#[wasm_bindgen]
pub fn ramsey_report(input: &str, reference: &str) -> String {
    let run = || -> dimkit::Result<serde_json::Value> {
        let table = parse_any(input)?;
        let fr = parse_ref(reference, &table)?;
        let audit = equivalence_audit(&table, &fr)?;
        let eluder = dim_comb(&table, &fr, Measure::Eluder)?;
        let coloring = color_from_witness(&table, &eluder.witness)?.to_json();
        Ok(serde_json::json!({
            "edim": audit.edim,
            "sdim": audit.sdim,
            "tdim": audit.tdim,
            "guaranteed_clique": audit.guaranteed,
            "clique": audit.clique,
            "color": if audit.color == Color::Red { "red" } else { "blue" },
            "extracted": witness_to_json(&audit.extracted),
            "sandwich_holds": audit.sandwich_holds,
            "extraction_holds": audit.extraction_holds,
            "coloring": coloring,
        }))
    };
    match run() {
        Ok(v) => v.to_string(),
        Err(e) => err_json(e),
    }
}

/// Build the packed ReLU class in dimension `d` at scale `eps` with radius `r`
/// and return the generated table plus its verified star witness.
#[wasm_bindgen]
pub fn relu_star(d: usize, eps: &str, r: &str) -> String {
    let run = || -> dimkit::Result<serde_json::Value> {
        let eps = parse_rational(eps)?;
        let r = parse_rational(r)?;
        let (table, witness) = gen_relu_star_witness(d, &eps, &r)?;
        let check = verify_witness(&table, &witness)?;
        Ok(serde_json::json!({
            "points": table.n_points(),
            "functions": table.n_funcs(),
            "witness_length": witness.entries.len(),
            "witness_valid": check.is_valid(),
            "witness": witness_to_json(&witness),
            "class": serde_json::from_str::<serde_json::Value>(&serialize_class(&table))
                .expect("serializer emits valid JSON"),
        }))
    };
    match run() {
        Ok(v) => v.to_string(),
        Err(e) => err_json(e),
    }
}
