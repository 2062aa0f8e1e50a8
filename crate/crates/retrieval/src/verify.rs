//! Re-checks a saved report against its input file.

use serde_json::Value;

use crate::cert::Certificate;
use crate::input::RunConfig;
use crate::runner::sha256_hex;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub checked: usize,
    /// Certificates without a compact exact check.
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl VerifyOutcome {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_report(config: &RunConfig, input_bytes: &[u8], report: &Value) -> VerifyOutcome {
    let mut out = VerifyOutcome::default();
    let digest = sha256_hex(input_bytes);
    if report["input_sha256"].as_str() != Some(digest.as_str()) {
        out.failures.push(format!(
            "input digest mismatch: report has {}, input is {digest}",
            report["input_sha256"]
        ));
    }
    let Some(tasks) = report["tasks"].as_array() else {
        out.failures.push("report has no task list".into());
        return out;
    };
    for t in tasks {
        let index = &t["index"];
        for (k, c) in t["certificates"].as_array().into_iter().flatten().enumerate() {
            let cert = match Certificate::from_json(c) {
                Ok(cert) => cert,
                Err(e) => {
                    out.failures.push(format!("task {index} certificate {k}: {e}"));
                    continue;
                }
            };
            match cert.verify(config.frame.as_ref(), config.fusion.as_ref()) {
                Some(true) => out.checked += 1,
                Some(false) => out
                    .failures
                    .push(format!("task {index} certificate {k} does not verify")),
                None => out.skipped += 1,
            }
        }
    }
    out
}
