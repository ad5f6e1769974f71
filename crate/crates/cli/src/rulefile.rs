//! Rule files in two interchangeable formats.
//!
//! Text: a header line naming the manifold ("circle", "torus:d", "sphere2"),
//! then one row per node with the coordinates followed by the weight,
//! whitespace- or comma-separated; `#` starts a comment. Angles are radians,
//! sphere nodes are unit 3-vectors. Values are written with 17 significant
//! digits, so a write/read round trip reproduces every f64.
//!
//! JSON: {"manifold": "...", "points": [[...], ...], "weights": [...]},
//! which round-trips bit-exactly through serde.

use std::path::Path;

use serde::{Deserialize, Serialize};

use qspec_core::{ManifoldSpec, Point, QuadratureRule};

use crate::errors::{CliError, CliResult};

#[derive(Serialize, Deserialize)]
struct RuleFileJson {
    manifold: String,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

pub fn read_rule_file(path: &Path) -> CliResult<QuadratureRule> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if is_json(path, &text) {
        parse_json(&text)
    } else {
        parse_text(&text)
    }
}

fn is_json(path: &Path, text: &str) -> bool {
    path.extension().map(|e| e == "json").unwrap_or(false) || text.trim_start().starts_with('{')
}

fn parse_json(text: &str) -> CliResult<QuadratureRule> {
    let file: RuleFileJson =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("bad JSON rule: {e}")))?;
    let manifold = ManifoldSpec::parse(&file.manifold)?;
    if file.points.len() != file.weights.len() {
        return Err(CliError::Input(format!(
            "{} points but {} weights",
            file.points.len(),
            file.weights.len()
        )));
    }
    let mut points = Vec::with_capacity(file.points.len());
    for (row, coords) in file.points.into_iter().enumerate() {
        validate_row(&coords, file.weights[row], row + 1, &manifold)?;
        points.push(Point::new(&manifold, coords).map_err(CliError::from)?);
    }
    QuadratureRule::new(manifold, points, file.weights).map_err(CliError::from)
}

fn parse_text(text: &str) -> CliResult<QuadratureRule> {
    let mut manifold: Option<ManifoldSpec> = None;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some(m) = manifold else {
            manifold = Some(
                ManifoldSpec::parse(line)
                    .map_err(|e| CliError::Input(format!("line {line_no}: {e}")))?,
            );
            continue;
        };
        let fields: Vec<&str> = line
            .split([' ', '\t', ','])
            .filter(|f| !f.is_empty())
            .collect();
        let expected = m.coord_len() + 1;
        if fields.len() != expected {
            return Err(CliError::Input(format!(
                "line {line_no}: expected {expected} values for {}, found {}",
                m.name(),
                fields.len()
            )));
        }
        let values: Vec<f64> = fields
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| CliError::Input(format!("line {line_no}: bad number {f:?}")))
            })
            .collect::<CliResult<_>>()?;
        let (coords, weight) = values.split_at(m.coord_len());
        validate_row(coords, weight[0], line_no, &m)?;
        points.push(
            Point::new(&m, coords.to_vec())
                .map_err(|e| CliError::Input(format!("line {line_no}: {e}")))?,
        );
        weights.push(weight[0]);
    }
    let manifold =
        manifold.ok_or_else(|| CliError::Input("rule file has no manifold header".into()))?;
    if points.is_empty() {
        return Err(CliError::Input("rule file has no nodes".into()));
    }
    QuadratureRule::new(manifold, points, weights).map_err(CliError::from)
}

fn validate_row(coords: &[f64], weight: f64, line_no: usize, m: &ManifoldSpec) -> CliResult<()> {
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(CliError::Input(format!(
            "line {line_no}: non-finite coordinate for {}",
            m.name()
        )));
    }
    if !weight.is_finite() {
        return Err(CliError::Input(format!(
            "line {line_no}: weight is not finite"
        )));
    }
    if weight < 0.0 {
        return Err(CliError::Input(format!(
            "line {line_no}: negative weight {weight}"
        )));
    }
    Ok(())
}

/// Write in the format selected by the path extension (.json or text).
pub fn write_rule_file(path: &Path, rule: &QuadratureRule) -> CliResult<()> {
    let body = if path.extension().map(|e| e == "json").unwrap_or(false) {
        let file = RuleFileJson {
            manifold: rule.manifold().name(),
            points: rule.points().iter().map(|p| p.coords().to_vec()).collect(),
            weights: rule.weights().to_vec(),
        };
        serde_json::to_string_pretty(&file)
            .map_err(|e| CliError::Other(format!("serializing rule: {e}")))?
    } else {
        let mut out = String::new();
        out.push_str(&format!(
            "# {} rule, {} nodes\n",
            rule.manifold().name(),
            rule.len()
        ));
        out.push_str(&rule.manifold().name());
        out.push('\n');
        for (p, w) in rule.points().iter().zip(rule.weights()) {
            for c in p.coords() {
                out.push_str(&format!("{c:.16e} "));
            }
            out.push_str(&format!("{w:.16e}\n"));
        }
        out
    };
    std::fs::write(path, body).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_parse_rejects_negative_weight_with_line_number() {
        let text = "circle\n0.0 1.0\n1.0 -0.5\n";
        let err = parse_text(text).unwrap_err();
        assert!(
            matches!(&err, CliError::Input(m) if m.contains("line 3")),
            "{err}"
        );
    }

    #[test]
    fn text_parse_rejects_nan() {
        let text = "circle\nNaN 1.0\n";
        assert!(parse_text(text).is_err());
    }

    #[test]
    fn text_parse_accepts_commas_and_comments() {
        let text = "# a rule\ntorus:2\n0.1, 0.2, 3.0\n0.4 0.5 4.0 # trailing\n";
        let rule = parse_text(text).unwrap();
        assert_eq!(rule.len(), 2);
        assert_eq!(rule.weights(), &[3.0, 4.0]);
    }

    #[test]
    fn arity_mismatch_names_the_line() {
        let text = "sphere2\n1.0 0.0 0.0\n";
        let err = parse_text(text).unwrap_err();
        assert!(
            matches!(&err, CliError::Input(m) if m.contains("line 2")),
            "{err}"
        );
    }

    fn awkward_rule() -> QuadratureRule {
        let m = ManifoldSpec::torus(2).unwrap();
        let points = vec![
            Point::new(&m, vec![0.1 + 1e-13, std::f64::consts::E]).unwrap(),
            Point::new(&m, vec![1.0 / 3.0, 5.234_987_234_987]).unwrap(),
        ];
        let w = m.volume() / 2.0 + 1.7e-12;
        QuadratureRule::new(m, points, vec![w, w - 3.4e-12]).unwrap()
    }

    #[test]
    fn text_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rule.txt");
        let rule = awkward_rule();
        write_rule_file(&path, &rule).unwrap();
        let back = read_rule_file(&path).unwrap();
        // 17 significant digits round-trip every f64; the contract is 1e-15
        for (p, q) in rule.points().iter().zip(back.points()) {
            for (a, b) in p.coords().iter().zip(q.coords()) {
                assert!((a - b).abs() <= 1e-15 * a.abs());
            }
        }
        for (a, b) in rule.weights().iter().zip(back.weights()) {
            assert!((a - b).abs() <= 1e-15 * a.abs());
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rule.json");
        let rule = awkward_rule();
        write_rule_file(&path, &rule).unwrap();
        let back = read_rule_file(&path).unwrap();
        for (p, q) in rule.points().iter().zip(back.points()) {
            assert_eq!(p.coords(), q.coords());
        }
        assert_eq!(rule.weights(), back.weights());
    }
}
