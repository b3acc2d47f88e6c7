//! Sweep descriptions, as read from `--spec` files or assembled from flags.

use std::path::PathBuf;

use compass_core::states::{canonical_pscs, default_cutoff};
use compass_core::{
    ComplexAmplitude, Error, GcsParams, PhaseSpaceGrid, PhaseTriple, Result, SubtractionIndex,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Wigner,
    Negativity,
    Stats,
    Pnd,
    Squeezing,
    Quadrature,
    Sensitivity,
    Tiles,
    NegativityVsL,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
    /// JSON header plus raw little-endian `f64`; single-field quantities only.
    Bin,
}

/// Which states to sweep. Canonical selectors use the phase triple of each
/// listed `l` with `β = ratio·α` (default `i`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSelector {
    Canonical {
        l: Vec<u8>,
        #[serde(default)]
        beta_ratio: Option<[f64; 2]>,
    },
    Explicit {
        phases: [f64; 3],
        #[serde(default)]
        beta: Option<[f64; 2]>,
        #[serde(default)]
        beta_ratio: Option<[f64; 2]>,
    },
}

/// `α` values: a fixed complex number, a magnitude range or a magnitude list
/// (the latter two along direction `arg`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum AlphaSpec {
    Fixed([f64; 2]),
    Range {
        start: f64,
        stop: f64,
        count: usize,
        #[serde(default)]
        arg: f64,
    },
    List {
        values: Vec<f64>,
        #[serde(default)]
        arg: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub quantity: Quantity,
    pub state: StateSelector,
    pub alpha: AlphaSpec,
    #[serde(default)]
    pub grid: Option<PhaseSpaceGrid>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub cutoff: Option<usize>,
    /// Quadrature angle `θ′` for squeezing sweeps.
    #[serde(default)]
    pub angle: f64,
    /// Largest photon number for PND sweeps (defaults to the cutoff).
    #[serde(default)]
    pub n_max: Option<usize>,
}

/// One state template: phases plus how `β` follows from `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateTemplate {
    pub l: Option<SubtractionIndex>,
    pub phases: PhaseTriple,
    pub beta: BetaRule,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaRule {
    Ratio(Complex64),
    Fixed(Complex64),
}

impl StateTemplate {
    pub fn beta_for(&self, alpha: Complex64) -> Complex64 {
        match self.beta {
            BetaRule::Ratio(r) => r * alpha,
            BetaRule::Fixed(b) => b,
        }
    }

    pub fn build(&self, alpha: Complex64) -> Result<GcsParams> {
        match (self.l, self.beta) {
            (Some(l), BetaRule::Ratio(r)) if r == Complex64::new(0.0, 1.0) => {
                canonical_pscs(ComplexAmplitude::try_from(alpha)?, l)
            }
            _ => GcsParams::from_complex(alpha, self.beta_for(alpha), self.phases),
        }
    }
}

fn finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("non-finite {what}")))
    }
}

impl StateSelector {
    pub fn templates(&self) -> Result<Vec<StateTemplate>> {
        match self {
            StateSelector::Canonical { l, beta_ratio } => {
                if l.is_empty() {
                    return Err(Error::InvalidSpec("empty l list".into()));
                }
                let ratio = beta_ratio.unwrap_or([0.0, 1.0]);
                finite(&ratio, "beta_ratio")?;
                l.iter()
                    .map(|&l| {
                        let idx = SubtractionIndex::new(l)?;
                        Ok(StateTemplate {
                            l: Some(idx),
                            phases: PhaseTriple::canonical(idx),
                            beta: BetaRule::Ratio(Complex64::new(ratio[0], ratio[1])),
                        })
                    })
                    .collect()
            }
            StateSelector::Explicit {
                phases,
                beta,
                beta_ratio,
            } => {
                finite(phases, "phases")?;
                let rule = match (beta, beta_ratio) {
                    (Some(_), Some(_)) => {
                        return Err(Error::InvalidSpec(
                            "give beta or beta_ratio, not both".into(),
                        ))
                    }
                    (Some(b), None) => {
                        finite(b, "beta")?;
                        BetaRule::Fixed(Complex64::new(b[0], b[1]))
                    }
                    (None, r) => {
                        let r = r.unwrap_or([0.0, 1.0]);
                        finite(&r, "beta_ratio")?;
                        BetaRule::Ratio(Complex64::new(r[0], r[1]))
                    }
                };
                Ok(vec![StateTemplate {
                    l: None,
                    phases: PhaseTriple::new(phases[0], phases[1], phases[2])?,
                    beta: rule,
                }])
            }
        }
    }
}

impl AlphaSpec {
    pub fn points(&self) -> Result<Vec<Complex64>> {
        match self {
            AlphaSpec::Fixed(a) => {
                finite(a, "alpha")?;
                Ok(vec![Complex64::new(a[0], a[1])])
            }
            AlphaSpec::Range {
                start,
                stop,
                count,
                arg,
            } => {
                finite(&[*start, *stop, *arg], "alpha range")?;
                if *count == 0 {
                    return Err(Error::InvalidSpec("alpha count must be at least 1".into()));
                }
                if stop < start {
                    return Err(Error::InvalidSpec(
                        "alpha range must satisfy start <= stop".into(),
                    ));
                }
                Ok((0..*count)
                    .map(|i| {
                        let r = if *count == 1 {
                            *start
                        } else if i + 1 == *count {
                            *stop
                        } else {
                            start + (stop - start) * i as f64 / (*count - 1) as f64
                        };
                        Complex64::from_polar(r, *arg)
                    })
                    .collect())
            }
            AlphaSpec::List { values, arg } => {
                finite(values, "alpha values")?;
                finite(&[*arg], "alpha arg")?;
                if values.is_empty() {
                    return Err(Error::InvalidSpec("empty alpha list".into()));
                }
                Ok(values
                    .iter()
                    .map(|&r| Complex64::from_polar(r, *arg))
                    .collect())
            }
        }
    }
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    /// Checks everything that does not need evaluation.
    pub fn validate(&self) -> Result<()> {
        self.state.templates()?;
        self.alpha.points()?;
        if self.quantity == Quantity::NegativityVsL
            && !matches!(self.state, StateSelector::Canonical { .. })
        {
            return Err(Error::InvalidSpec(
                "negativity_vs_l needs a canonical selector".into(),
            ));
        }
        if !self.angle.is_finite() {
            return Err(Error::InvalidSpec("non-finite angle".into()));
        }
        if self.format == Format::Bin {
            let single = self.state.templates()?.len() == 1 && self.alpha.points()?.len() == 1;
            if !matches!(self.quantity, Quantity::Wigner | Quantity::Sensitivity) || !single {
                return Err(Error::InvalidSpec(
                    "bin format needs a wigner or sensitivity field for one state".into(),
                ));
            }
        }
        Ok(())
    }

    /// Number-basis cutoff reported in output metadata and used for PND.
    pub fn effective_cutoff(&self) -> Result<usize> {
        if let Some(c) = self.cutoff {
            return Ok(c);
        }
        let templates = self.state.templates()?;
        let peak = self
            .alpha
            .points()?
            .iter()
            .flat_map(|a| {
                templates
                    .iter()
                    .map(move |t| a.norm_sqr().max(t.beta_for(*a).norm_sqr()))
            })
            .fold(0.0, f64::max);
        Ok(default_cutoff(peak))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_and_toml_agree() {
        let json = r#"{
            "quantity": "stats",
            "state": {"canonical": {"l": [0, 1]}},
            "alpha": {"start": 0.5, "stop": 2.0, "count": 4}
        }"#;
        let toml_text = r#"
            quantity = "stats"
            alpha = { start = 0.5, stop = 2.0, count = 4 }
            [state.canonical]
            l = [0, 1]
        "#;
        let a = SweepSpec::from_json(json).unwrap();
        let b = SweepSpec::from_toml(toml_text).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.alpha.points().unwrap().len(), 4);
        assert_eq!(a.state.templates().unwrap().len(), 2);
    }

    #[test]
    fn malformed_specs_are_rejected() {
        let bad_range = SweepSpec {
            quantity: Quantity::Stats,
            state: StateSelector::Canonical {
                l: vec![0],
                beta_ratio: None,
            },
            alpha: AlphaSpec::Range {
                start: 2.0,
                stop: 1.0,
                count: 3,
                arg: 0.0,
            },
            grid: None,
            output: None,
            format: Format::Csv,
            cutoff: None,
            angle: 0.0,
            n_max: None,
        };
        assert!(matches!(bad_range.validate(), Err(Error::InvalidSpec(_))));
        let bad_l = SweepSpec {
            state: StateSelector::Canonical {
                l: vec![4],
                beta_ratio: None,
            },
            alpha: AlphaSpec::Fixed([1.0, 0.0]),
            ..bad_range.clone()
        };
        assert!(bad_l.validate().is_err());
        assert!(SweepSpec::from_json(r#"{"quantity": "stats"}"#).is_err());
    }
}
