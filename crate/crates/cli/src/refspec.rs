//! Parsing of `--ref` values: `col:K`, `ones`, `minus-ones`, or `file:PATH`
//! pointing at a reference JSON document.

use dimkit::table::FunctionClassTable;
use dimkit::witness::{reference_from_json, ReferenceFunction};
use dimkit::{Error, Result};

pub fn parse_ref(spec: &str, table: &FunctionClassTable) -> Result<ReferenceFunction> {
    if let Some(k) = spec.strip_prefix("col:") {
        let j: usize = k
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad column index in --ref {spec:?}")))?;
        if j >= table.n_funcs() {
            return Err(Error::InvalidParameter(format!(
                "--ref column {j} out of range (|F| = {})",
                table.n_funcs()
            )));
        }
        return Ok(ReferenceFunction::Column(j));
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)?;
        let v: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::Malformed(format!("reference file {path}: {e}")))?;
        return reference_from_json(&v);
    }
    match spec {
        "ones" => Ok(ReferenceFunction::ones(table.n_points())),
        "minus-ones" => Ok(ReferenceFunction::minus_ones(table.n_points())),
        "zeros" => Ok(ReferenceFunction::zeros(table.n_points())),
        _ => Err(Error::InvalidParameter(format!(
            "--ref must be col:K, ones, minus-ones, zeros or file:PATH; got {spec:?}"
        ))),
    }
}

/// Load a class table from JSON or CSV, chosen by file extension.
pub fn load_class(path: &str) -> Result<FunctionClassTable> {
    let bytes = std::fs::read(path)?;
    if path.ends_with(".csv") {
        dimkit::table::parse_class_csv(&bytes)
    } else {
        dimkit::table::parse_class(&bytes)
    }
}

pub fn save_class(table: &FunctionClassTable, path: &str) -> Result<()> {
    let text = if path.ends_with(".csv") {
        dimkit::table::serialize_class_csv(table)
    } else {
        dimkit::table::serialize_class(table)
    };
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use dimkit::table::gen_thresholds;

    #[test]
    fn column_and_constant_refs() {
        let t = gen_thresholds(4).unwrap();
        assert_eq!(parse_ref("col:4", &t).unwrap(), ReferenceFunction::Column(4));
        assert_eq!(parse_ref("ones", &t).unwrap(), ReferenceFunction::ones(4));
        assert!(parse_ref("col:9", &t).is_err());
        assert!(parse_ref("nonsense", &t).is_err());
    }
}
