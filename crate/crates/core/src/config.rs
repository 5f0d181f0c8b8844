//! Experiment configuration files.
//!
//! The format is TOML with SI units throughout. Materials and sections are
//! declared once by name and referenced from elements; every hypothesis
//! shares the top-level `[prior]` unless it supplies its own.
//!
//! ```toml
//! comparisons = [["1A", "1B"]]
//!
//! [sampler]
//! n_live = 100
//! max_iterations = 250
//! rng_seed = 42
//!
//! [likelihood]
//! precision_beta = 10.0
//!
//! [[measured]]
//! mode_index = 7
//! frequency_hz = 53.9
//!
//! [prior]
//! mean = 7.2e10
//! inverse_variance = 4.0e-20
//! lower_bound = 6.8e10
//! upper_bound = 8.0e10
//!
//! [structure.materials.aluminium]
//! youngs_modulus = 7.2e10
//! density = 2700.0
//! shear_modulus = 2.7e10
//!
//! [structure.sections.bar]
//! width = 0.0098
//! height = 0.0322
//!
//! [[structure.nodes]]
//! id = 1
//! position = [0.0, 0.0, 0.0]
//!
//! [[structure.elements]]
//! id = 1
//! nodes = [1, 2]
//! material = "aluminium"
//! section = "bar"
//!
//! [[hypotheses]]
//! name = "1A"
//! free_elements = [2, 3, 5, 10, 11]
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bayes::{LikelihoodSpec, MeasuredModalData, MeasuredMode, PriorSpec, UpdatingHypothesis, UpdatingProblem};
use crate::fem::{BeamSection, Element, Material, Node, StructureModel};
use crate::sampler::SamplerConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub comparisons: Vec<(String, String)>,
    pub sampler: SamplerConfig,
    pub likelihood: LikelihoodSection,
    pub measured: Vec<MeasuredMode>,
    pub prior: PriorSpec,
    #[serde(default)]
    pub output: OutputSection,
    pub structure: StructureSection,
    #[serde(default)]
    pub hypotheses: Vec<HypothesisSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LikelihoodSection {
    pub precision_beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Posterior draws written per hypothesis.
    #[serde(default = "default_posterior_samples")]
    pub posterior_samples: usize,
}

fn default_posterior_samples() -> usize {
    1000
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            posterior_samples: default_posterior_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSection {
    #[serde(default)]
    pub constrained_dofs: Vec<usize>,
    #[serde(default)]
    pub materials: BTreeMap<String, Material>,
    #[serde(default)]
    pub sections: BTreeMap<String, BeamSection>,
    #[serde(default)]
    pub nodes: Vec<Node>,
    #[serde(default)]
    pub elements: Vec<ElementSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementSection {
    pub id: usize,
    pub nodes: [usize; 2],
    pub material: String,
    pub section: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesisSection {
    pub name: String,
    pub free_elements: Vec<usize>,
    /// Young's modulus of the elements that are not free; defaults to the prior mean.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<PriorSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub element_priors: Vec<ElementPrior>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementPrior {
    pub element: usize,
    pub mean: f64,
    pub inverse_variance: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

impl ElementPrior {
    fn spec(&self) -> PriorSpec {
        PriorSpec {
            mean: self.mean,
            inverse_variance: self.inverse_variance,
            lower_bound: self.lower_bound,
            upper_bound: self.upper_bound,
        }
    }
}

/// A configuration problem, anchored to a source line when one is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
}

/// Locates the `n`-th line (1-based result) equal to a table header such as
/// `[[hypotheses]]`.
fn header_line(source: Option<&str>, header: &str, n: usize) -> Option<usize> {
    source?
        .lines()
        .enumerate()
        .filter(|(_, l)| l.trim() == header)
        .nth(n)
        .map(|(i, _)| i + 1)
}

/// The first line starting a table whose name begins with `prefix`.
fn table_line(source: Option<&str>, prefix: &str) -> Option<usize> {
    source?
        .lines()
        .position(|l| {
            let t = l.trim_start();
            t.strip_prefix('[')
                .is_some_and(|r| r.trim_start_matches('[').starts_with(prefix))
        })
        .map(|i| i + 1)
}

/// A fully resolved experiment ready to run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub problems: Vec<UpdatingProblem>,
    pub sampler: SamplerConfig,
    pub comparisons: Vec<(String, String)>,
    pub posterior_samples: usize,
}

impl ExperimentConfig {
    pub fn from_toml_str(source: &str) -> Result<Self, ConfigError> {
        toml::from_str(source).map_err(|e| {
            let line = e
                .span()
                .map(|s| source[..s.start.min(source.len())].matches('\n').count() + 1);
            ConfigError::Invalid(vec![Diagnostic {
                line,
                message: e.message().trim().to_string(),
            }])
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config values are always representable in TOML")
    }

    pub fn read(path: &Path) -> Result<(Self, String), ConfigError> {
        let source = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let cfg = Self::from_toml_str(&source)?;
        Ok((cfg, source))
    }

    /// Resolve material and section names into a structure model.
    pub fn structure_model(&self) -> Result<StructureModel, Vec<Diagnostic>> {
        self.structure_model_with(None)
    }

    fn structure_model_with(&self, source: Option<&str>) -> Result<StructureModel, Vec<Diagnostic>> {
        let s = &self.structure;
        let mut diags = Vec::new();
        for (name, m) in &s.materials {
            if let Err(e) = m.validate() {
                diags.push(Diagnostic {
                    line: table_line(source, &format!("structure.materials.{name}")),
                    message: format!("material {name}: {e}"),
                });
            }
        }
        for (name, sec) in &s.sections {
            if let Err(e) = sec.validate() {
                diags.push(Diagnostic {
                    line: table_line(source, &format!("structure.sections.{name}")),
                    message: format!("section {name}: {e}"),
                });
            }
        }
        let mut elements = Vec::with_capacity(s.elements.len());
        for (i, e) in s.elements.iter().enumerate() {
            let line = header_line(source, "[[structure.elements]]", i);
            let material = s.materials.get(&e.material);
            let section = s.sections.get(&e.section);
            if material.is_none() {
                diags.push(Diagnostic {
                    line,
                    message: format!("element {}: unknown material {:?}", e.id, e.material),
                });
            }
            if section.is_none() {
                diags.push(Diagnostic {
                    line,
                    message: format!("element {}: unknown section {:?}", e.id, e.section),
                });
            }
            if let (Some(&material), Some(&section)) = (material, section) {
                elements.push(Element {
                    id: e.id,
                    node_a: e.nodes[0],
                    node_b: e.nodes[1],
                    material,
                    section,
                    orientation: e.orientation,
                });
            }
        }
        if !diags.is_empty() {
            return Err(diags);
        }
        let model = StructureModel {
            nodes: s.nodes.clone(),
            elements,
            constrained_dofs: s.constrained_dofs.clone(),
        };
        let problems = model.diagnostics();
        if problems.is_empty() {
            Ok(model)
        } else {
            let line = table_line(source, "structure");
            Err(problems
                .into_iter()
                .map(|message| {
                    let element_line = message
                        .strip_prefix("element ")
                        .and_then(|r| r.split(|c: char| !c.is_ascii_digit()).next())
                        .and_then(|id| id.parse::<usize>().ok())
                        .and_then(|id| s.elements.iter().position(|e| e.id == id))
                        .and_then(|i| header_line(source, "[[structure.elements]]", i));
                    Diagnostic {
                        line: element_line.or(line),
                        message,
                    }
                })
                .collect())
        }
    }

    /// Every problem `build` would hit, without running the sampler.
    pub fn validate(&self, source: Option<&str>) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let at = |prefix: &str| table_line(source, prefix);

        if let Err(e) = self.sampler.validate() {
            diags.push(Diagnostic {
                line: at("sampler"),
                message: format!("sampler: {e}"),
            });
        }
        let measured = MeasuredModalData {
            entries: self.measured.clone(),
        };
        let likelihood = LikelihoodSpec {
            measured,
            precision_beta: self.likelihood.precision_beta,
        };
        let likelihood_ok = match likelihood.validate() {
            Ok(()) => true,
            Err(e) => {
                let line = if likelihood.precision_beta > 0.0 {
                    at("measured")
                } else {
                    at("likelihood")
                };
                diags.push(Diagnostic {
                    line,
                    message: e.to_string(),
                });
                false
            }
        };
        if let Err(e) = self.prior.validate() {
            diags.push(Diagnostic {
                line: at("prior"),
                message: format!("prior: {e}"),
            });
        }

        let structure = match self.structure_model_with(source) {
            Ok(s) => Some(s),
            Err(d) => {
                diags.extend(d);
                None
            }
        };

        if self.hypotheses.is_empty() {
            diags.push(Diagnostic {
                line: None,
                message: "at least one [[hypotheses]] entry is required".into(),
            });
        }
        let mut names = BTreeSet::new();
        for (i, h) in self.hypotheses.iter().enumerate() {
            let line = header_line(source, "[[hypotheses]]", i);
            if !names.insert(h.name.as_str()) {
                diags.push(Diagnostic {
                    line,
                    message: format!("hypothesis name {:?} is used more than once", h.name),
                });
            }
            // names become parts of output file names
            let name_ok = !h.name.is_empty()
                && h.name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
                && !h.name.starts_with('.');
            if !name_ok {
                diags.push(Diagnostic {
                    line,
                    message: format!(
                        "hypothesis name {:?} must be non-empty ASCII letters, digits, '_', '-' or '.'",
                        h.name
                    ),
                });
            }
            let Some(structure) = &structure else { continue };
            let missing: Vec<usize> = h
                .free_elements
                .iter()
                .copied()
                .filter(|&id| structure.element(id).is_none())
                .collect();
            for &id in &missing {
                {
                    diags.push(Diagnostic {
                        line,
                        message: format!(
                            "hypothesis {}: free element {id} does not exist (structure has elements 1..={})",
                            h.name,
                            structure.elements.len()
                        ),
                    });
                }
            }
            if !missing.is_empty() {
                continue;
            }
            match self.hypothesis(h, structure) {
                Ok(hyp) if likelihood_ok && self.prior.validate().is_ok() => {
                    if let Err(e) = UpdatingProblem::new(hyp, likelihood.clone()) {
                        diags.push(Diagnostic {
                            line: at("measured").or(line),
                            message: format!("hypothesis {}: {e}", h.name),
                        });
                    }
                }
                Ok(_) => {}
                Err(e) => diags.push(Diagnostic {
                    line,
                    message: e.to_string(),
                }),
            }
        }

        for (p, q) in &self.comparisons {
            for n in [p, q] {
                if !names.contains(n.as_str()) {
                    diags.push(Diagnostic {
                        line: source.and_then(|s| s.lines().position(|l| l.contains("comparisons")).map(|i| i + 1)),
                        message: format!("comparison {p}/{q} names unknown hypothesis {n:?}"),
                    });
                }
            }
        }
        diags
    }

    fn hypothesis(&self, h: &HypothesisSection, structure: &StructureModel) -> crate::Result<UpdatingHypothesis> {
        let prior = h.prior.unwrap_or(self.prior);
        let hyp = UpdatingHypothesis {
            name: h.name.clone(),
            base_structure: structure.clone(),
            free_elements: h.free_elements.clone(),
            prior,
            element_priors: h.element_priors.iter().map(|p| (p.element, p.spec())).collect(),
            fixed_value: h.fixed_value.unwrap_or(prior.mean),
        };
        hyp.validate()?;
        Ok(hyp)
    }

    /// Validate and resolve into runnable problems.
    pub fn build(&self, source: Option<&str>) -> Result<Experiment, ConfigError> {
        let diags = self.validate(source);
        if !diags.is_empty() {
            return Err(ConfigError::Invalid(diags));
        }
        let structure = self.structure_model().map_err(ConfigError::Invalid)?;
        let likelihood = LikelihoodSpec {
            measured: MeasuredModalData {
                entries: self.measured.clone(),
            },
            precision_beta: self.likelihood.precision_beta,
        };
        let problems = self
            .hypotheses
            .iter()
            .map(|h| {
                self.hypothesis(h, &structure)
                    .and_then(|hyp| UpdatingProblem::new(hyp, likelihood.clone()))
                    .map_err(|e| {
                        ConfigError::Invalid(vec![Diagnostic {
                            line: None,
                            message: e.to_string(),
                        }])
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Experiment {
            problems,
            sampler: self.sampler.clone(),
            comparisons: self.comparisons.clone(),
            posterior_samples: self.output.posterior_samples,
        })
    }
}

/// Validate a config file on disk.
pub fn validate_config(path: &Path) -> Result<Vec<Diagnostic>, ConfigError> {
    let (cfg, source) = match ExperimentConfig::read(path) {
        Ok(v) => v,
        Err(ConfigError::Invalid(d)) => return Ok(d),
        Err(e) => return Err(e),
    };
    Ok(cfg.validate(Some(&source)))
}
