//! On-disk formats: progression families, sieve approximations and CSV series.

use std::path::Path;

use anyhow::{Context, Result};
use primewalk::sieve::{parse_family, Progression, SieveApprox};
use serde::{Deserialize, Serialize};

/// One term `c · 1_R` of a sieve approximation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    #[serde(rename = "R")]
    pub r: String,
    pub c: i64,
}

/// Terms in progression order.
pub fn approx_terms(approx: &SieveApprox) -> Vec<Term> {
    approx.coeffs().iter().map(|(r, &c)| Term { r: r.to_string(), c }).collect()
}

pub fn approx_to_json(approx: &SieveApprox) -> Result<String> {
    Ok(serde_json::to_string_pretty(&approx_terms(approx))?)
}

/// Parses the output of [`approx_to_json`] back into `(R, c_R)` pairs.
pub fn approx_from_json(text: &str) -> Result<Vec<(Progression, i64)>> {
    let terms: Vec<Term> = serde_json::from_str(text)?;
    terms.into_iter().map(|t| Ok((t.r.parse::<Progression>().map_err(anyhow::Error::msg)?, t.c))).collect()
}

/// Reads a family written one `a mod q` per line.
pub fn read_family(path: &Path) -> Result<Vec<Progression>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_family(&text).map_err(anyhow::Error::msg)
}

/// CSV with a header row; floats use the shortest round-trip form.
pub fn csv(columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = columns.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use primewalk::sieve::build_fd;

    #[test]
    fn approx_json_round_trip() {
        let fam = vec![Progression::new(1, 6).unwrap(), Progression::new(2, 5).unwrap()];
        let a = build_fd(&fam, 2).unwrap();
        let text = approx_to_json(&a).unwrap();
        assert!(text.contains("\"R\": \"1 mod 6\""));
        let back = approx_from_json(&text).unwrap();
        let want: Vec<(Progression, i64)> = a.coeffs().iter().map(|(r, &c)| (*r, c)).collect();
        assert_eq!(back, want);
    }

    #[test]
    fn csv_layout() {
        assert_eq!(csv(&["x", "y"], &[vec!["1".into(), "2".into()]]), "x,y\n1,2\n");
    }
}
