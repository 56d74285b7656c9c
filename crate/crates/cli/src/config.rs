//! TOML experiment documents.
//!
//! ```toml
//! sparsity_m = 4            # required
//! channel_length = 16
//! snr_db = 30.0
//! iterations = 1000         # default 1000, or 2000 for tracking
//! trials = 200
//! master_seed = 1
//! unit_energy = true
//! tail_fraction = 0.1
//! margin_db = 1.0
//!
//! [scenario]
//! kind = "tracking"         # or "stationary"
//! change_at = 1000          # default: iterations / 2
//!
//! [[algorithm]]             # omit all blocks to use the tabulated presets
//! label = "LMMN"
//! kind = "lmmn"             # lms | za-lms | nlms | lmmn
//! mu = 4e-3
//! alpha0 = 0.85
//! gamma = 0.03
//! beta = 0.9
//! delta = 0.95
//! variable = true
//! ```

use serde::{Deserialize, Serialize};
use sparse_afe::filters::DEFAULT_NLMS_EPSILON;
use sparse_afe::harness::{
    DEFAULT_CHANNEL_LENGTH, DEFAULT_SEED, DEFAULT_SNR_DB, DEFAULT_STATIONARY_ITERATIONS,
    DEFAULT_TRACKING_ITERATIONS, DEFAULT_TRIALS,
};
use sparse_afe::metrics::{DEFAULT_MARGIN_DB, DEFAULT_TAIL_FRACTION};
use sparse_afe::{
    table_presets, AlgorithmSpec, ExperimentConfig, LmmnParams, LmsParams, NlmsParams, RosterEntry,
    Scenario, ZaLmsParams,
};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub sparsity_m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel_length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit_energy: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioDocument>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub algorithm: Vec<AlgorithmDocument>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Stationary,
    Tracking,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub kind: ScenarioKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub change_at: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    Lms,
    ZaLms,
    Nlms,
    Lmmn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub kind: AlgorithmKind,
    pub mu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variable: Option<bool>,
}

impl AlgorithmDocument {
    fn into_entry(self, index: usize) -> Result<RosterEntry, CliError> {
        let path = |key: &str| format!("algorithm[{index}].{key}");
        let require = |value: Option<f64>, key: &str| {
            value.ok_or_else(|| CliError::Config(format!("{}: missing key", path(key))))
        };
        let forbid = |present: bool, key: &str| {
            if present {
                Err(CliError::Config(format!(
                    "{}: not a parameter of `{:?}`",
                    path(key),
                    self.kind
                )))
            } else {
                Ok(())
            }
        };
        let mixing_keys = self.alpha0.is_some()
            || self.gamma.is_some()
            || self.beta.is_some()
            || self.delta.is_some()
            || self.variable.is_some();

        let spec = match self.kind {
            AlgorithmKind::Lms => {
                forbid(self.rho.is_some(), "rho")?;
                forbid(self.epsilon.is_some(), "epsilon")?;
                forbid(mixing_keys, "alpha0")?;
                AlgorithmSpec::Lms(LmsParams { mu: self.mu })
            }
            AlgorithmKind::ZaLms => {
                forbid(self.epsilon.is_some(), "epsilon")?;
                forbid(mixing_keys, "alpha0")?;
                AlgorithmSpec::ZaLms(ZaLmsParams {
                    mu: self.mu,
                    rho: require(self.rho, "rho")?,
                })
            }
            AlgorithmKind::Nlms => {
                forbid(self.rho.is_some(), "rho")?;
                forbid(mixing_keys, "alpha0")?;
                AlgorithmSpec::Nlms(NlmsParams {
                    mu: self.mu,
                    epsilon: self.epsilon.unwrap_or(DEFAULT_NLMS_EPSILON),
                })
            }
            AlgorithmKind::Lmmn => {
                forbid(self.rho.is_some(), "rho")?;
                forbid(self.epsilon.is_some(), "epsilon")?;
                let alpha0 = require(self.alpha0, "alpha0")?;
                if self.variable == Some(false) {
                    AlgorithmSpec::Lmmn(LmmnParams {
                        gamma: self.gamma.unwrap_or(0.0),
                        beta: self.beta.unwrap_or(0.0),
                        delta: self.delta.unwrap_or(1.0),
                        ..LmmnParams::fixed(self.mu, alpha0)
                    })
                } else {
                    AlgorithmSpec::Lmmn(LmmnParams {
                        mu: self.mu,
                        alpha0,
                        gamma: require(self.gamma, "gamma")?,
                        beta: require(self.beta, "beta")?,
                        delta: require(self.delta, "delta")?,
                        variable: true,
                    })
                }
            }
        };
        let label = self.label.unwrap_or_else(|| spec.name().to_string());
        spec.validate()
            .map_err(|e| CliError::Config(format!("algorithm[{index}] (`{label}`): {e}")))?;
        Ok(RosterEntry::new(label, spec))
    }

    fn from_entry(entry: &RosterEntry) -> Self {
        let mut doc = Self {
            label: Some(entry.label.clone()),
            kind: AlgorithmKind::Lms,
            mu: entry.spec.mu(),
            rho: None,
            epsilon: None,
            alpha0: None,
            gamma: None,
            beta: None,
            delta: None,
            variable: None,
        };
        match entry.spec {
            AlgorithmSpec::Lms(_) => {}
            AlgorithmSpec::ZaLms(p) => {
                doc.kind = AlgorithmKind::ZaLms;
                doc.rho = Some(p.rho);
            }
            AlgorithmSpec::Nlms(p) => {
                doc.kind = AlgorithmKind::Nlms;
                doc.epsilon = Some(p.epsilon);
            }
            AlgorithmSpec::Lmmn(p) => {
                doc.kind = AlgorithmKind::Lmmn;
                doc.alpha0 = Some(p.alpha0);
                doc.gamma = Some(p.gamma);
                doc.beta = Some(p.beta);
                doc.delta = Some(p.delta);
                doc.variable = Some(p.variable);
            }
        }
        doc
    }
}

impl ConfigDocument {
    /// Fills defaults and validates.
    pub fn resolve(self) -> Result<ExperimentConfig, CliError> {
        let scenario_kind = self
            .scenario
            .as_ref()
            .map_or(ScenarioKind::Stationary, |s| s.kind);
        let iterations = self.iterations.unwrap_or(match scenario_kind {
            ScenarioKind::Stationary => DEFAULT_STATIONARY_ITERATIONS,
            ScenarioKind::Tracking => DEFAULT_TRACKING_ITERATIONS,
        });
        let scenario = match &self.scenario {
            None => Scenario::Stationary,
            Some(ScenarioDocument {
                kind: ScenarioKind::Stationary,
                change_at: Some(_),
            }) => {
                return Err(CliError::Config(
                    "scenario.change_at: only valid for tracking".into(),
                ))
            }
            Some(ScenarioDocument {
                kind: ScenarioKind::Stationary,
                ..
            }) => Scenario::Stationary,
            Some(ScenarioDocument {
                kind: ScenarioKind::Tracking,
                change_at,
            }) => Scenario::Tracking {
                change_at: change_at.unwrap_or(iterations / 2),
            },
        };

        let roster = if self.algorithm.is_empty() {
            table_presets(self.sparsity_m).map_err(|e| {
                CliError::Config(format!("algorithm: none given and {e}"))
            })?
        } else {
            self.algorithm
                .into_iter()
                .enumerate()
                .map(|(i, doc)| doc.into_entry(i))
                .collect::<Result<_, _>>()?
        };

        let config = ExperimentConfig {
            channel_length: self.channel_length.unwrap_or(DEFAULT_CHANNEL_LENGTH),
            sparsity_m: self.sparsity_m,
            snr_db: self.snr_db.unwrap_or(DEFAULT_SNR_DB),
            iterations,
            trials: self.trials.unwrap_or(DEFAULT_TRIALS),
            master_seed: self.master_seed.unwrap_or(DEFAULT_SEED),
            unit_energy: self.unit_energy.unwrap_or(true),
            scenario,
            tail_fraction: self.tail_fraction.unwrap_or(DEFAULT_TAIL_FRACTION),
            margin_db: self.margin_db.unwrap_or(DEFAULT_MARGIN_DB),
            roster,
        };
        config.validate()?;
        Ok(config)
    }

    /// Fully explicit document for a resolved config.
    pub fn from_config(config: &ExperimentConfig) -> Self {
        Self {
            sparsity_m: config.sparsity_m,
            channel_length: Some(config.channel_length),
            snr_db: Some(config.snr_db),
            iterations: Some(config.iterations),
            trials: Some(config.trials),
            master_seed: Some(config.master_seed),
            unit_energy: Some(config.unit_energy),
            tail_fraction: Some(config.tail_fraction),
            margin_db: Some(config.margin_db),
            scenario: Some(match config.scenario {
                Scenario::Stationary => ScenarioDocument {
                    kind: ScenarioKind::Stationary,
                    change_at: None,
                },
                Scenario::Tracking { change_at } => ScenarioDocument {
                    kind: ScenarioKind::Tracking,
                    change_at: Some(change_at),
                },
            }),
            algorithm: config.roster.iter().map(AlgorithmDocument::from_entry).collect(),
        }
    }
}

/// Parses and validates a TOML experiment document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let de = toml::de::Deserializer::parse(text)
        .map_err(|e| CliError::Config(format!("malformed document: {e}")))?;
    let doc: ConfigDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("{path}: {}", e.into_inner().message().trim()))
    })?;
    doc.resolve()
}

/// Serializes a resolved config as an explicit document that parses back to
/// the same config.
pub fn serialize_config(config: &ExperimentConfig) -> Result<String, CliError> {
    toml::to_string(&ConfigDocument::from_config(config))
        .map_err(|e| CliError::Config(format!("cannot serialize config: {e}")))
}

/// Roster document for the tabulated presets.
pub fn presets_document(sparsity_m: usize) -> Result<String, CliError> {
    let roster = table_presets(sparsity_m)?;
    let doc = ConfigDocument {
        sparsity_m,
        algorithm: roster.iter().map(AlgorithmDocument::from_entry).collect(),
        ..Default::default()
    };
    toml::to_string(&doc).map_err(|e| CliError::Config(format!("cannot serialize presets: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_uses_table_one() {
        let c = parse_config("sparsity_m = 1\n").unwrap();
        assert_eq!(c.channel_length, 16);
        assert_eq!(c.snr_db, 30.0);
        assert_eq!(c.trials, 200);
        assert_eq!(c.iterations, 1000);
        assert_eq!(c.scenario, Scenario::Stationary);
        assert_eq!(c.roster, table_presets(1).unwrap());
    }

    #[test]
    fn sparsity_without_preset_needs_roster() {
        let err = parse_config("sparsity_m = 3\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("sparsity 3"), "{err}");

        let ok = parse_config(
            "sparsity_m = 3\n[[algorithm]]\nkind = \"lms\"\nmu = 0.01\n",
        )
        .unwrap();
        assert_eq!(ok.roster[0].label, "LMS");
    }

    #[test]
    fn unknown_keys_report_their_path() {
        let err = parse_config("sparsity_m = 1\nbogus = 3\n").unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");

        let err = parse_config("sparsity_m = 1\n[[algorithm]]\nkind = \"lms\"\nmu = 0.1\nstep = 2\n")
            .unwrap_err();
        assert!(err.to_string().contains("algorithm[0]"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn invariant_violations_are_config_errors() {
        let err = parse_config("sparsity_m = 20\n[[algorithm]]\nkind = \"lms\"\nmu = 0.1\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = parse_config("sparsity_m = 1\n[[algorithm]]\nkind = \"za-lms\"\nmu = 0.1\n").unwrap_err();
        assert!(err.to_string().contains("algorithm[0].rho"), "{err}");
        let err = parse_config("sparsity_m = 1\n[[algorithm]]\nkind = \"lms\"\nmu = -0.1\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = parse_config("sparsity_m = 1\n[[algorithm]]\nkind = \"lms\"\nmu = 0.1\nrho = 0.1\n").unwrap_err();
        assert!(err.to_string().contains("rho"), "{err}");
        assert!(parse_config("sparsity_m = ").is_err());
    }

    #[test]
    fn tracking_defaults() {
        let c = parse_config("sparsity_m = 4\n[scenario]\nkind = \"tracking\"\n").unwrap();
        assert_eq!(c.iterations, 2000);
        assert_eq!(c.scenario, Scenario::Tracking { change_at: 1000 });
        assert!(parse_config("sparsity_m = 4\n[scenario]\nkind = \"stationary\"\nchange_at = 5\n").is_err());
    }

    #[test]
    fn fixed_mixing_needs_only_alpha0() {
        let c = parse_config(
            "sparsity_m = 4\n[[algorithm]]\nlabel = \"MN\"\nkind = \"lmmn\"\nmu = 4e-3\nalpha0 = 0.5\nvariable = false\n",
        )
        .unwrap();
        assert_eq!(c.roster[0].spec, AlgorithmSpec::Lmmn(LmmnParams::fixed(4e-3, 0.5)));
    }

    #[test]
    fn serialized_config_reparses_to_itself() {
        let docs = [
            "sparsity_m = 1\n",
            "sparsity_m = 4\ntrials = 7\nmaster_seed = 99\n[scenario]\nkind = \"tracking\"\nchange_at = 300\n",
            "sparsity_m = 2\nsnr_db = 12.5\n[[algorithm]]\nkind = \"nlms\"\nmu = 0.5\n[[algorithm]]\nlabel = \"fixed\"\nkind = \"lmmn\"\nmu = 1e-3\nalpha0 = 0.25\nvariable = false\n",
        ];
        for doc in docs {
            let parsed = parse_config(doc).unwrap();
            let text = serialize_config(&parsed).unwrap();
            assert_eq!(parse_config(&text).unwrap(), parsed, "{text}");
        }
    }

    #[test]
    fn presets_document_lists_tables() {
        let text = presets_document(4).unwrap();
        assert_eq!(parse_config(&text).unwrap().roster, table_presets(4).unwrap());
        assert!(presets_document(2).is_err());
    }
}
