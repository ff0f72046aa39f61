//! Run manifests: every artifact-producing command drops a JSON record of
//! what was run, with digests of the files it read and wrote.

use sha2::{Digest, Sha256};
use std::time::Instant;

use dimkit::Result;

pub struct ManifestBuilder {
    command: Vec<String>,
    seeds: Vec<u64>,
    inputs: Vec<(String, String)>,
    outputs: Vec<(String, String)>,
    started: Instant,
}

fn digest_file(path: &str) -> Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

impl ManifestBuilder {
    pub fn new(command: impl IntoIterator<Item = String>) -> Self {
        Self {
            command: command.into_iter().collect(),
            seeds: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn seed(&mut self, s: u64) -> &mut Self {
        self.seeds.push(s);
        self
    }

    pub fn input(&mut self, path: &str) -> Result<&mut Self> {
        self.inputs.push((path.to_string(), digest_file(path)?));
        Ok(self)
    }

    /// Record an output file (digest taken now, so call after writing it).
    pub fn output(&mut self, path: &str) -> Result<&mut Self> {
        self.outputs.push((path.to_string(), digest_file(path)?));
        Ok(self)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let files = |list: &[(String, String)]| {
            list.iter()
                .map(|(p, d)| serde_json::json!({ "path": p, "sha256": d }))
                .collect::<Vec<_>>()
        };
        serde_json::json!({
            "tool": "dimkit",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "seeds": self.seeds,
            "inputs": files(&self.inputs),
            "outputs": files(&self.outputs),
            "wall_ms": self.started.elapsed().as_millis() as u64,
        })
    }

    /// Write `<path>.manifest.json` next to the primary output.
    pub fn write_alongside(&self, primary_output: &str) -> Result<()> {
        let path = format!("{primary_output}.manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&self.to_json()).expect("serializable"))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_records_digests() {
        let dir = std::env::temp_dir().join("dimkit-manifest-test");
        std::fs::create_dir_all(&dir).unwrap();
        let out = dir.join("out.json");
        std::fs::write(&out, "{}").unwrap();
        let mut m = ManifestBuilder::new(["gen".to_string()]);
        m.seed(7);
        m.output(out.to_str().unwrap()).unwrap();
        let j = m.to_json();
        assert_eq!(j["seeds"], serde_json::json!([7]));
        assert_eq!(
            j["outputs"][0]["sha256"],
            serde_json::json!(format!("{:x}", Sha256::digest(b"{}")))
        );
    }
}
