//! JSON problem files and built-in fixtures.
//!
//! ```json
//! {"dim": 3,
//!  "mu": [[1, 2, 3, 1.0]],
//!  "H": [[1, 2, 3, 0.5]],
//!  "g_diag": [1, 1, 1],
//!  "theta": [0, 0, 1]}
//! ```
//!
//! Indices are 1-based. `mu` lists `[i, j, k, value]` meaning
//! `mu(e_i, e_j) = value e_k + ...`, `H` lists `[i, j, k, value]` for
//! `H(e_i, e_j, e_k)`; both are skew completed. The metric is either `"g"`
//! (rows) or `"g_diag"`.

use std::path::Path;

use serde::Deserialize;

use crate::hodge::Metric;
use crate::lie::LieBracket;
use crate::{Error, KForm, Result};

/// Parsed input data. Only shapes and skew consistency are validated here;
/// Jacobi and closedness are left to the consumer.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub name: String,
    pub mu: LieBracket,
    pub g: Option<Metric>,
    pub h: Option<KForm>,
    pub theta: Option<KForm>,
}

impl Problem {
    pub fn dim(&self) -> usize {
        self.mu.dim()
    }

    pub fn metric_or_identity(&self) -> Metric {
        self.g
            .clone()
            .unwrap_or_else(|| Metric::identity(self.dim()))
    }

    pub fn h_or_zero(&self) -> KForm {
        self.h.clone().unwrap_or_else(|| KForm::zero(self.dim(), 3))
    }

    pub fn theta_or_zero(&self) -> KForm {
        self.theta
            .clone()
            .unwrap_or_else(|| KForm::zero(self.dim(), 1))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    dim: usize,
    #[serde(default)]
    mu: Vec<(usize, usize, usize, f64)>,
    #[serde(default, rename = "H")]
    h: Option<Vec<(usize, usize, usize, f64)>>,
    #[serde(default)]
    g: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    g_diag: Option<Vec<f64>>,
    #[serde(default)]
    theta: Option<Vec<f64>>,
}

fn zero_based(i: usize, dim: usize) -> Result<usize> {
    if i == 0 || i > dim {
        return Err(Error::IndexOutOfRange { index: i, dim });
    }
    Ok(i - 1)
}

impl RawProblem {
    fn build(self, name: String) -> Result<Problem> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::InvalidArgument("dim must be positive".into()));
        }
        let mut entries = Vec::with_capacity(self.mu.len());
        for (i, j, k, v) in self.mu {
            entries.push((zero_based(i, n)?, zero_based(j, n)?, zero_based(k, n)?, v));
        }
        let mu = LieBracket::from_entries(n, &entries)?;
        let h = match self.h {
            None => None,
            Some(list) => {
                let mut entries = Vec::with_capacity(list.len());
                for (i, j, k, v) in list {
                    entries.push((
                        vec![zero_based(i, n)?, zero_based(j, n)?, zero_based(k, n)?],
                        v,
                    ));
                }
                Some(KForm::from_entries(n, 3, &entries)?)
            }
        };
        let g = match (self.g, self.g_diag) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidArgument(
                    "give either \"g\" or \"g_diag\", not both".into(),
                ))
            }
            (Some(rows), None) => Some(Metric::from_rows(&rows)?),
            (None, Some(d)) => Some(Metric::diagonal(&d)?),
            (None, None) => None,
        };
        if let Some(g) = &g {
            if g.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: g.dim(),
                });
            }
        }
        let theta = match self.theta {
            None => None,
            Some(t) => {
                if t.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: t.len(),
                    });
                }
                Some(KForm::from_packed(n, 1, t)?)
            }
        };
        Ok(Problem {
            name,
            mu,
            g,
            h,
            theta,
        })
    }
}

/// Parses a problem from JSON text; `path` only labels errors.
pub fn parse_problem(text: &str, path: &Path) -> Result<Problem> {
    let raw: RawProblem = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    raw.build(path.display().to_string())
}

/// Loads a built-in fixture by name, or else a JSON file.
pub fn load_problem(spec: &str) -> Result<Problem> {
    if let Some(p) = builtin(spec)? {
        return Ok(p);
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_problem(&text, path)
}

/// Built-in fixtures:
///
/// * `heisenberg3`: `mu = e^{12} ⊗ e_3`, `g = Id`.
/// * `heisenberg3+H(a)`: the same with `H = a e^{123}`.
/// * `abelian(n)`: the zero bracket on `R^n`, `g = Id`.
/// * `nonclosed4`: the 4-dimensional Lie algebra `mu(e_4, e_i) = e_i`
///   (`i ≤ 3`) with `H = e^{123}`, for which `dH = 3 e^{1234}`.
///
/// Returns `Ok(None)` for names that are not fixtures.
pub fn builtin(name: &str) -> Result<Option<Problem>> {
    let name = name.trim();
    let bad = |msg: String| Error::InvalidArgument(msg);
    let problem = if name == "heisenberg3" {
        Problem {
            name: name.into(),
            mu: LieBracket::heisenberg3(),
            g: Some(Metric::identity(3)),
            h: None,
            theta: None,
        }
    } else if let Some(arg) = name
        .strip_prefix("heisenberg3+H(")
        .and_then(|r| r.strip_suffix(')'))
    {
        let a: f64 = arg
            .trim()
            .parse()
            .map_err(|_| bad(format!("invalid parameter in {name}")))?;
        if !a.is_finite() {
            return Err(bad(format!("invalid parameter in {name}")));
        }
        Problem {
            name: name.into(),
            mu: LieBracket::heisenberg3(),
            g: Some(Metric::identity(3)),
            h: Some(KForm::basis(3, &[0, 1, 2])?.scaled(a)),
            theta: None,
        }
    } else if let Some(arg) = name
        .strip_prefix("abelian(")
        .and_then(|r| r.strip_suffix(')'))
    {
        let n: usize = arg
            .trim()
            .parse()
            .map_err(|_| bad(format!("invalid dimension in {name}")))?;
        if n == 0 {
            return Err(bad("abelian dimension must be positive".into()));
        }
        Problem {
            name: name.into(),
            mu: LieBracket::zero(n),
            g: Some(Metric::identity(n)),
            h: None,
            theta: None,
        }
    } else if name == "nonclosed4" {
        let (mu, h) = nonclosed4();
        Problem {
            name: name.into(),
            mu,
            g: Some(Metric::identity(4)),
            h: Some(h),
            theta: None,
        }
    } else {
        return Ok(None);
    };
    Ok(Some(problem))
}

/// A Lie bracket with a non-closed 3-form: `mu(e_4, e_i) = e_i` for
/// `i = 1, 2, 3` and `H = e^{123}`.
///
/// On a nilpotent 4-dimensional algebra every 3-form is closed (the
/// differential vanishes on `Λ^{n-1}` for unimodular brackets), so the
/// example is necessarily non-nilpotent.
pub fn nonclosed4() -> (LieBracket, KForm) {
    let mu = LieBracket::from_entries(4, &[(3, 0, 0, 1.0), (3, 1, 1, 1.0), (3, 2, 2, 1.0)])
        .expect("consistent entries");
    let h = KForm::basis(4, &[0, 1, 2]).expect("valid indices");
    (mu, h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_problem() {
        let text = r#"{"dim": 3, "mu": [[1,2,3,1.0]], "H": [[1,2,3,0.5]],
                       "g_diag": [1,2,3], "theta": [0,0,1]}"#;
        let p = parse_problem(text, Path::new("x.json")).unwrap();
        assert_eq!(p.mu, LieBracket::heisenberg3());
        assert_eq!(p.h.unwrap().get(&[0, 1, 2]), 0.5);
        assert_eq!(p.g.unwrap().get(1, 1), 2.0);
        assert_eq!(p.theta.unwrap().get(&[2]), 1.0);
    }

    #[test]
    fn empty_mu_is_abelian() {
        let p = parse_problem(r#"{"dim": 4, "mu": []}"#, Path::new("a.json")).unwrap();
        assert_eq!(p.mu, LieBracket::zero(4));
    }

    #[test]
    fn inconsistent_skew_rejected() {
        let text = r#"{"dim": 3, "mu": [[1,2,3,1.0],[2,1,3,1.0]]}"#;
        assert!(matches!(
            parse_problem(text, Path::new("bad.json")),
            Err(Error::SkewViolation(_))
        ));
    }

    #[test]
    fn parse_error_has_position() {
        let text = "{\"dim\": 3,\n \"mu\": [[1,2,3,]]}";
        match parse_problem(text, Path::new("broken.json")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn builtins() {
        assert_eq!(load_problem("heisenberg3").unwrap().mu.get(0, 1, 2), 1.0);
        let p = load_problem("heisenberg3+H(0.25)").unwrap();
        assert_eq!(p.h.unwrap().get(&[0, 1, 2]), 0.25);
        assert_eq!(load_problem("abelian(5)").unwrap().mu, LieBracket::zero(5));
        assert!(load_problem("heisenberg3+H(x)").is_err());
        let (mu, h) = nonclosed4();
        assert_eq!(mu.jacobi_residual(), 0.0);
        assert_eq!(mu.ce_differential(&h).unwrap().get(&[0, 1, 2, 3]), 3.0);
    }
}
