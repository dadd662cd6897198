use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use todashape_core::curve::Background;
use todashape_core::{ModelParams, Theory};

use crate::CliError;

/// Tolerance keys understood by `verify` and `sample`, with defaults.
pub const TOLERANCES: &[(&str, f64)] = &[
    ("rh_interior", 1e-8),
    ("rh_jump", 1e-8),
    ("rh_asymptotic", 1e-4),
    ("rh_periodicity", 1e-10),
    ("gse_string", 1e-10),
    ("gse_w_m", 1e-11),
    ("lax_flow", 1e-5),
    ("prep_density_contour", 1e-6),
    ("prep_contour_fd", 1e-4),
    ("prep_radius", 1e-9),
    ("prep_hessian", 1e-4),
    ("prep_period", 1e-8),
    ("sample_sup", 0.05),
];

fn default_hbar() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cutoffs {
    #[serde(default = "Cutoffs::partition_sum")]
    pub partition_sum: usize,
    /// Highest coupling index; `t_k = 0` beyond it. Defaults to
    /// `max(len(t), 2)`.
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[serde(default = "Cutoffs::n_grid")]
    pub n_grid: usize,
    #[serde(default = "Cutoffs::n_quad")]
    pub n_quad: usize,
    #[serde(default = "Cutoffs::contour_nodes")]
    pub contour_nodes: usize,
}

impl Cutoffs {
    fn partition_sum() -> usize {
        12
    }
    fn n_grid() -> usize {
        200
    }
    fn n_quad() -> usize {
        200
    }
    fn contour_nodes() -> usize {
        512
    }
}

impl Default for Cutoffs {
    fn default() -> Self {
        Cutoffs {
            partition_sum: Self::partition_sum(),
            k: None,
            n_grid: Self::n_grid(),
            n_quad: Self::n_quad(),
            contour_nodes: Self::contour_nodes(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub xi: f64,
    pub n_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub theory: Theory,
    pub lambda0: f64,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    /// Rescaled charge; the discrete models use `s/ħ`.
    #[serde(default)]
    pub s: f64,
    #[serde(default)]
    pub t: Vec<f64>,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default)]
    pub cutoffs: Cutoffs,
    pub sampler: Option<SamplerConfig>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn k_max(&self) -> usize {
        self.cutoffs.k.unwrap_or(self.t.len().max(2))
    }

    pub fn r(&self) -> f64 {
        self.r.unwrap_or(0.0)
    }

    /// Checks everything a command could touch, before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.lambda0 > 0.0 && self.lambda0.is_finite()) {
            return Err(invalid(format!("lambda0 must be positive, got {}", self.lambda0)));
        }
        if !self.s.is_finite() {
            return Err(invalid("s must be finite"));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(invalid(format!("hbar must be positive, got {}", self.hbar)));
        }
        if self.t.iter().any(|x| !x.is_finite()) {
            return Err(invalid("t must be finite"));
        }
        match (self.theory, self.r) {
            (Theory::FourD, Some(_)) => return Err(invalid("R is only allowed for theory 5d")),
            (Theory::FiveD, None) => return Err(invalid("theory 5d needs R")),
            (Theory::FiveD, Some(r)) => {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(invalid(format!("R must be positive, got {r}")));
                }
                if r * self.lambda0 >= 1.0 {
                    return Err(invalid(format!("R*lambda0 must be < 1, got {}", r * self.lambda0)));
                }
            }
            (Theory::FourD, None) => {}
        }
        let k = self.k_max();
        if k == 0 {
            return Err(invalid("K must be at least 1"));
        }
        if let Some(j) = self.t.iter().rposition(|&x| x != 0.0) {
            if j + 1 > k {
                return Err(invalid(format!("t_{} is nonzero but K = {k}", j + 1)));
            }
        }
        let c = &self.cutoffs;
        if c.n_grid < 16 {
            return Err(invalid(format!("n_grid must be at least 16, got {}", c.n_grid)));
        }
        if c.n_quad < 8 {
            return Err(invalid(format!("n_quad must be at least 8, got {}", c.n_quad)));
        }
        if c.contour_nodes < 16 {
            return Err(invalid(format!("contour_nodes must be at least 16, got {}", c.contour_nodes)));
        }
        for (key, v) in &self.tolerances {
            if !TOLERANCES.iter().any(|(name, _)| name == key) {
                return Err(invalid(format!("unknown tolerance key {key:?}")));
            }
            if !(*v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("tolerance {key} must be positive, got {v}")));
            }
        }
        if let Some(sm) = &self.sampler {
            if !(sm.xi > 0.0 && sm.xi.is_finite()) {
                return Err(invalid(format!("sampler.xi must be positive, got {}", sm.xi)));
            }
            if sm.n_samples == 0 {
                return Err(invalid("sampler.n_samples must be at least 1"));
            }
        }
        Ok(())
    }

    pub fn tolerance(&self, key: &str) -> f64 {
        self.tolerances.get(key).copied().unwrap_or_else(|| {
            TOLERANCES.iter().find(|(name, _)| *name == key).map(|(_, v)| *v).expect("known tolerance key")
        })
    }

    pub fn background(&self) -> Background {
        Background { theory: self.theory, s: self.s, t: self.t.clone(), lambda0: self.lambda0, r: self.r() }
    }

    /// Integer charge `s/ħ` of the discrete model at spacing `hbar`.
    pub fn charge(&self, hbar: f64) -> Result<i64, CliError> {
        let c = self.s / hbar;
        let n = c.round();
        if (c - n).abs() > 1e-9 || n.abs() > 1e6 {
            return Err(invalid(format!("s/hbar = {c} must be an integer")));
        }
        Ok(n as i64)
    }

    pub fn model_params(&self) -> Result<ModelParams, CliError> {
        let s = self.charge(self.hbar)?;
        let p = ModelParams {
            theory: self.theory,
            hbar: self.hbar,
            r: self.r(),
            lambda0: self.lambda0,
            s,
            t: self.t.clone(),
        };
        p.validate().map_err(|e| invalid(e.to_string()))?;
        Ok(p)
    }
}
