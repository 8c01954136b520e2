//! JSON descriptions of analytic objects.
//!
//! Gaussian sum:
//! `{"dim": 1, "terms": [{"coeff": [1.0, 0.0], "factors": [{"power": 0, "width": 3.14, "center": 0.0}]}]}`
//!
//! Operator, one of
//! - `{"antiwick": <gaussian sum on the phase space>}`
//! - `{"antiwick": {"field": "symbol.json"}}`
//! - `{"coherent": [{"c_re": 1, "c_im": 0, "X": [x, ξ], "Y": [y, η]}]}`
//! - `{"kernel": "kernel.json"}`
//!
//! Paths are relative to the file that names them. Command-line arguments
//! taking a spec accept either a path or the JSON text itself.

use std::fs;
use std::path::{Path, PathBuf};

use antiwick_core::quantize::{
    kernel_grid_for_phase, AntiWickFromSymbol, CoherentCombo, OperatorRep, PhasePoint,
};
use antiwick_core::{AnalyticGaussianSum, AxisFactor, Complex64, GaussianTerm, Grid};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::format::{read_field, read_kernel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSpec {
    #[serde(default)]
    pub power: u32,
    pub width: f64,
    #[serde(default)]
    pub center: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub coeff: [f64; 2],
    pub factors: Vec<FactorSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSumSpec {
    pub dim: usize,
    pub terms: Vec<TermSpec>,
}

impl GaussianSumSpec {
    pub fn build(&self) -> CliResult<AnalyticGaussianSum> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                GaussianTerm::new(
                    Complex64::new(t.coeff[0], t.coeff[1]),
                    t.factors
                        .iter()
                        .map(|f| AxisFactor::new(f.power, f.width, f.center))
                        .collect(),
                )
            })
            .collect();
        Ok(AnalyticGaussianSum::from_terms(self.dim, terms)?)
    }

    pub fn from_sum(u: &AnalyticGaussianSum) -> Self {
        Self {
            dim: u.dim(),
            terms: u
                .terms()
                .iter()
                .map(|t| TermSpec {
                    coeff: [t.coeff.re, t.coeff.im],
                    factors: t
                        .factors
                        .iter()
                        .map(|f| FactorSpec {
                            power: f.power,
                            width: f.width,
                            center: f.center,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentTermSpec {
    pub c_re: f64,
    pub c_im: f64,
    /// `[x_1..x_n, ξ_1..ξ_n]`
    #[serde(rename = "X")]
    pub x: Vec<f64>,
    #[serde(rename = "Y")]
    pub y: Vec<f64>,
}

fn phase_point(v: &[f64]) -> CliResult<PhasePoint> {
    if !v.len().is_multiple_of(2) || v.is_empty() {
        return Err(CliError::Usage(format!(
            "phase point needs 2n coordinates, got {}",
            v.len()
        )));
    }
    let n = v.len() / 2;
    Ok(PhasePoint::new(v[..n].to_vec(), v[n..].to_vec())?)
}

pub fn coherent_combo(terms: &[CoherentTermSpec]) -> CliResult<CoherentCombo> {
    let mut combo = CoherentCombo::new();
    for t in terms {
        combo = combo.with_term(Complex64::new(t.c_re, t.c_im), phase_point(&t.x)?, phase_point(&t.y)?);
    }
    Ok(combo)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolSource {
    Field { field: String },
    Analytic(GaussianSumSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorSpec {
    Antiwick(SymbolSource),
    Coherent(Vec<CoherentTermSpec>),
    Kernel(String),
}

/// A parsed spec with the directory its relative paths refer to.
#[derive(Debug, Clone)]
pub struct Loaded<T> {
    pub value: T,
    pub base: PathBuf,
    /// File the spec came from, if any.
    pub source: Option<PathBuf>,
}

/// Parses `arg` as inline JSON when it starts with `{` or `[`, else reads it
/// as a file.
pub fn load<T: for<'de> Deserialize<'de>>(arg: &str) -> CliResult<Loaded<T>> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        let value = serde_json::from_str(trimmed).map_err(|e| CliError::json("inline spec", e))?;
        return Ok(Loaded {
            value,
            base: PathBuf::from("."),
            source: None,
        });
    }
    let path = PathBuf::from(arg);
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let value = serde_json::from_str(&text).map_err(|e| CliError::json(arg, e))?;
    Ok(Loaded {
        value,
        base: path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(".")),
        source: Some(path),
    })
}

/// Builds the operator; analytic symbols are sampled on `phase_grid`.
/// Returns the operator and every file it was read from.
pub fn build_operator(spec: &Loaded<OperatorSpec>, phase_grid: &Grid) -> CliResult<(OperatorRep, Vec<PathBuf>)> {
    let mut inputs: Vec<PathBuf> = spec.source.iter().cloned().collect();
    let op = match &spec.value {
        OperatorSpec::Antiwick(SymbolSource::Analytic(s)) => {
            let f = s.build()?;
            if f.dim() != phase_grid.dim() {
                return Err(CliError::Usage(format!(
                    "symbol has dim {}, phase grid has dim {}",
                    f.dim(),
                    phase_grid.dim()
                )));
            }
            let sampled = f.sample(phase_grid, &vec![0.0; phase_grid.dim()])?;
            OperatorRep::AntiWick(AntiWickFromSymbol::new(sampled)?)
        }
        OperatorSpec::Antiwick(SymbolSource::Field { field }) => {
            let path = spec.base.join(field);
            let f = read_field(&path)?;
            inputs.push(path);
            OperatorRep::AntiWick(AntiWickFromSymbol::new(f)?)
        }
        OperatorSpec::Coherent(terms) => OperatorRep::Coherent(coherent_combo(terms)?),
        OperatorSpec::Kernel(file) => {
            let path = spec.base.join(file);
            let k = read_kernel(&path)?;
            if !k.grid().compatible(&kernel_grid_for_phase(phase_grid)?) {
                return Err(CliError::Core(antiwick_core::Error::GridMismatch));
            }
            inputs.push(path);
            OperatorRep::Kernel(k)
        }
    };
    Ok((op, inputs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_sum_spec_round_trip() {
        let text = r#"{"dim": 1, "terms": [{"coeff": [1.0, 0.5], "factors": [{"width": 3.0}]}]}"#;
        let s: Loaded<GaussianSumSpec> = load(text).unwrap();
        let u = s.value.build().unwrap();
        assert_eq!(u.terms()[0].factors[0], AxisFactor::new(0, 3.0, 0.0));
        assert_eq!(GaussianSumSpec::from_sum(&u).build().unwrap(), u);
    }

    #[test]
    fn operator_specs_parse() {
        let g = Grid::new(2, 16, 2.0).unwrap();
        let one: Loaded<OperatorSpec> =
            load(r#"{"antiwick": {"dim": 2, "terms": [{"coeff": [1, 0], "factors": [{"width": 0}, {"width": 0}]}]}}"#).unwrap();
        let (op, inputs) = build_operator(&one, &g).unwrap();
        assert!(matches!(op, OperatorRep::AntiWick(_)) && inputs.is_empty());
        let coh: Loaded<OperatorSpec> =
            load(r#"{"coherent": [{"c_re": 1, "c_im": 0, "X": [0, 0], "Y": [0.5, 0]}]}"#).unwrap();
        assert!(matches!(build_operator(&coh, &g).unwrap().0, OperatorRep::Coherent(_)));
        let bad: Loaded<OperatorSpec> =
            load(r#"{"coherent": [{"c_re": 1, "c_im": 0, "X": [0], "Y": [0.5, 0]}]}"#).unwrap();
        assert!(matches!(build_operator(&bad, &g), Err(CliError::Usage(_))));
    }
}
