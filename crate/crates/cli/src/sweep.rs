//! `--sweep key=start:stop:steps` over one config key.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{from_table, ConfigError, Experiment, INTEGER_KEYS};
use crate::run::{execute, Outcome, RunError};

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub section: String,
    pub key: String,
    pub values: Vec<f64>,
}

fn bad(spec: &str, reason: &str) -> ConfigError {
    ConfigError::Invalid {
        key: "--sweep".into(),
        reason: format!("`{spec}`: {reason}"),
    }
}

/// Parse `key=start:stop:steps`. A bare key is looked up in `table`.
pub fn parse_sweep(spec: &str, table: &toml::Table) -> Result<Sweep, ConfigError> {
    let (key, range) = spec
        .split_once('=')
        .ok_or_else(|| bad(spec, "expected key=start:stop:steps"))?;
    let parts: Vec<&str> = range.split(':').collect();
    let [start, stop, steps] = parts[..] else {
        return Err(bad(spec, "expected start:stop:steps"));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| bad(spec, "start and stop must be numbers"))
    };
    let (start, stop) = (num(start)?, num(stop)?);
    let steps: usize = steps
        .trim()
        .parse()
        .map_err(|_| bad(spec, "steps must be a positive integer"))?;
    if steps == 0 {
        return Err(bad(spec, "steps must be a positive integer"));
    }
    let values = if steps == 1 {
        vec![start]
    } else {
        (0..steps)
            .map(|k| start + (stop - start) * k as f64 / (steps - 1) as f64)
            .collect()
    };

    let (section, key) = match key.trim().split_once('.') {
        Some((s, k)) => (s.to_string(), k.to_string()),
        None => {
            let key = key.trim();
            let hits: Vec<&String> = table
                .iter()
                .filter(|(_, v)| v.as_table().is_some_and(|t| t.contains_key(key)))
                .map(|(s, _)| s)
                .collect();
            match hits[..] {
                [s] => (s.clone(), key.to_string()),
                [] => return Err(bad(spec, "key not present in the config; use section.key")),
                _ => return Err(bad(spec, "key is ambiguous; use section.key")),
            }
        }
    };
    Ok(Sweep {
        section,
        key,
        values,
    })
}

impl Sweep {
    pub fn name(&self) -> String {
        format!("{}.{}", self.section, self.key)
    }

    fn apply(&self, table: &toml::Table, v: f64) -> Result<toml::Table, ConfigError> {
        let mut t = table.clone();
        let section = t
            .entry(self.section.clone())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        let Some(section) = section.as_table_mut() else {
            return Err(bad(&self.name(), "section is not a table"));
        };
        let value = if INTEGER_KEYS.contains(&self.key.as_str()) {
            if (v - v.round()).abs() > 1e-9 || v < 0.0 {
                return Err(bad(
                    &self.name(),
                    &format!("{v} is not a valid integer value"),
                ));
            }
            toml::Value::Integer(v.round() as i64)
        } else {
            toml::Value::Float(v)
        };
        section.insert(self.key.clone(), value);
        Ok(t)
    }

    /// Run every point in parallel and stack the tables in sweep order.
    pub fn run(&self, table: &toml::Table, experiment: Experiment) -> Result<Outcome, RunError> {
        let outcomes: Vec<Outcome> = self
            .values
            .par_iter()
            .map(|&v| {
                let parsed = from_table(self.apply(table, v)?)?;
                let mut out = execute(&parsed.config, experiment)?;
                out.warnings.splice(0..0, parsed.warnings);
                Ok(out)
            })
            .collect::<Result<_, RunError>>()?;
        let name = self.name();
        let mut columns = vec![format!("sweep_{name}")];
        columns.extend(outcomes[0].columns.iter().cloned());
        let mut rows = Vec::new();
        let mut warnings = Vec::new();
        let mut runs = Vec::new();
        for (&v, out) in self.values.iter().zip(outcomes) {
            rows.extend(
                out.rows
                    .into_iter()
                    .map(|r| std::iter::once(v).chain(r).collect()),
            );
            warnings.extend(
                out.warnings
                    .into_iter()
                    .map(|w| format!("{name} = {v}: {w}")),
            );
            runs.push(out.metadata);
        }
        let metadata = json!({
            "sweep": { "key": name, "values": self.values },
            "runs": Value::Array(runs),
        });
        Ok(Outcome {
            metadata,
            columns,
            rows,
            warnings,
        })
    }
}
