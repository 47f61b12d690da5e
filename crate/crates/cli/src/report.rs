//! Report documents.
//!
//! The structured form is a JSON object with sorted keys and no timing or
//! path information, so identical runs give byte-identical output. Field
//! elements appear as coefficient vectors such as `"[3]"` or `"[1,4]"`.

use serde_json::{json, Value};

use crate::config::{Format, RunConfig};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct Report {
    pub value: Value,
    pub text: String,
}

impl Report {
    pub fn new(command: &str, config: Value, result: Value, text: String) -> Self {
        let value = json!({
            "format": "bianchi-report",
            "version": REPORT_VERSION,
            "command": command,
            "config": config,
            "result": result,
        });
        Report { value, text }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(&self.value).expect("reports serialize");
                s.push('\n');
                s
            }
        }
    }
}

/// The parts of a configuration that affect results.
pub fn config_echo(cfg: &RunConfig) -> Value {
    json!({
        "level": cfg.level.to_string(),
        "ell": cfg.ell,
        "weight": cfg.weight.to_string(),
        "character": cfg.character.to_string(),
        "bound": cfg.bound,
        "eig_ext": cfg.eig_ext,
    })
}
