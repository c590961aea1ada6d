//! TOML configuration for `siegel verify`.
//!
//! ```toml
//! seed = 7
//! samples = 500
//! [tolerances]
//! moment = 1e-7
//! [quadrature]
//! t_nodes = 1200
//! ```

use anyhow::{bail, Context, Result};
use siegel_core::bergman::QuadratureSpec;
use siegel_core::suite::SuiteConfig;
use std::path::Path;
use toml::{Table, Value};

fn number(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => bail!("{key}: expected a number"),
    }
}

fn count(key: &str, v: &Value) -> Result<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        _ => bail!("{key}: expected a non-negative integer"),
    }
}

pub fn parse(text: &str) -> Result<SuiteConfig> {
    let table: Table = text.parse()?;
    let mut cfg = SuiteConfig::default();
    for (key, value) in &table {
        match key.as_str() {
            "seed" => cfg.seed = count(key, value)?,
            "samples" => cfg.samples = count(key, value)? as usize,
            "n" => cfg.n = count(key, value)? as usize,
            "lambda" => cfg.lambda = number(key, value)?,
            "tolerances" => {
                let Value::Table(t) = value else { bail!("tolerances: expected a table") };
                for (k, v) in t {
                    cfg.tolerances.set(k, number(k, v)?)?;
                }
            }
            "quadrature" => {
                let Value::Table(t) = value else { bail!("quadrature: expected a table") };
                let lines: Vec<String> = t.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                cfg.quadrature = QuadratureSpec::default().merge_text(&lines.join("\n"))?;
            }
            _ => bail!("unknown key {key:?}"),
        }
    }
    if cfg.n == 0 {
        bail!("n must be at least 1");
    }
    if !(cfg.lambda > -1.0) {
        bail!("lambda must exceed -1");
    }
    Ok(cfg)
}

pub fn load(path: &Path) -> Result<SuiteConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("in {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tables() {
        let cfg = parse("seed = 7\n[tolerances]\nmoment = 1e-7\n[quadrature]\nt_nodes = 1200\ntol = 1e-5\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.tolerances.moment, 1e-7);
        assert_eq!((cfg.quadrature.t_nodes, cfg.quadrature.tol), (1200, 1e-5));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(parse("[tolerances]\nmoment = 0\n").is_err());
        assert!(parse("[tolerances]\nbogus = 1\n").is_err());
        assert!(parse("[quadrature]\nt_nodes = 1\n").is_err());
        assert!(parse("colour = 1\n").is_err());
        assert!(parse("n = 0\n").is_err());
    }
}
