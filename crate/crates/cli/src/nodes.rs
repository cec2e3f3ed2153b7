//! Node-set arguments: `roots:<d>`, `counter:<d>` or `file:<path>`.

use std::path::Path;

use riesz_core::spectra::{counterexample_family, roots_of_unity};
use riesz_core::NodeSet;

use crate::error::CliError;

/// Largest generated dimension; the SVD is cubic in d.
pub const MAX_GENERATED_D: usize = 4096;

pub fn parse_node_spec(spec: &str) -> Result<NodeSet, CliError> {
    let (kind, rest) = spec.split_once(':').ok_or_else(|| {
        CliError::parse(format!(
            "--nodes '{spec}': expected roots:<d>, counter:<d> or file:<path>"
        ))
    })?;
    let count = || {
        rest.trim()
            .parse::<usize>()
            .map_err(|_| {
                CliError::parse(format!(
                    "--nodes '{spec}': '{rest}' is not a positive integer"
                ))
            })
            .and_then(|d| {
                if d > MAX_GENERATED_D {
                    Err(CliError::parse(format!(
                        "--nodes '{spec}': d exceeds {MAX_GENERATED_D}"
                    )))
                } else {
                    Ok(d)
                }
            })
    };
    match kind {
        "roots" => Ok(roots_of_unity(count()?)?),
        "counter" => Ok(counterexample_family(count()?)?),
        "file" => read_node_file(Path::new(rest)),
        other => Err(CliError::parse(format!(
            "--nodes '{spec}': unknown kind '{other}' (expected roots, counter or file)"
        ))),
    }
}

/// One decimal per line (blank lines and `#` comments skipped) or a JSON
/// array of numbers.
pub fn read_node_file(path: &Path) -> Result<NodeSet, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(NodeSet::new(parse_node_text(
        &text,
        &path.display().to_string(),
    )?)?)
}

pub fn parse_node_text(text: &str, origin: &str) -> Result<Vec<f64>, CliError> {
    if text.trim_start().starts_with('[') {
        return serde_json::from_str::<Vec<f64>>(text)
            .map_err(|e| CliError::parse(format!("{origin}:{}:{}: {e}", e.line(), e.column())));
    }
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v = t.parse::<f64>().map_err(|_| {
            CliError::parse(format!("{origin}:{}: cannot read '{t}' as a number", i + 1))
        })?;
        out.push(v);
    }
    Ok(out)
}
