use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use squeeze_core::markov::{qstr::parse_rational, Q};

use crate::error::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SQUEEZE_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "squeeze-out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    pub symplecticity: usize,
    pub containment: usize,
    pub defect: usize,
    pub lipschitz: usize,
    pub minkowski: usize,
    pub toric: usize,
    pub ou_points: usize,
    pub ou_rotations: usize,
    /// Base count for the σ-halving check (the second run uses 4x).
    pub sigma: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub symplectic_analytic: f64,
    pub symplectic_fd: f64,
    pub containment: f64,
    pub defect_ratio: f64,
    pub defect_sigmas: f64,
    pub lipschitz_ratio: f64,
    pub spectral: f64,
    pub dimension: f64,
    pub content: f64,
    pub theorem_slack: f64,
    pub sigma_halving: f64,
    pub ou_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Not part of the config hash.
    pub out_dir: PathBuf,
    pub samples: Samples,
    pub tolerances: Tolerances,
    /// Largest Markov number for the tree enumeration, as a decimal string.
    pub tree_max: String,
    pub branch_length: usize,
    pub triangle_count: usize,
    pub triangle_alphas: Vec<String>,
    pub fit_alphas: Vec<String>,
    pub no_fit_alphas: Vec<String>,
    pub toric_alphas: Vec<String>,
    pub radii: Vec<f64>,
    pub lipschitz: Vec<f64>,
    pub containment_lipschitz: Vec<f64>,
    pub disk_radius: f64,
    pub curve_t: Vec<f64>,
    pub obstruction_t: Vec<f64>,
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

impl RunConfig {
    /// Sample counts of the acceptance criteria.
    pub fn full(seed: u64) -> Self {
        RunConfig {
            seed,
            out_dir: PathBuf::from(DEFAULT_OUT_DIR),
            samples: Samples {
                symplecticity: 10_000,
                containment: 1_000_000,
                defect: 1_000_000,
                lipschitz: 100_000,
                minkowski: 10_000_000,
                toric: 100_000,
                ou_points: 1000,
                ou_rotations: 100,
                sigma: 250_000,
            },
            tolerances: Tolerances {
                symplectic_analytic: 1e-9,
                symplectic_fd: 1e-4,
                containment: 1e-10,
                defect_ratio: 2.0,
                defect_sigmas: 3.0,
                lipschitz_ratio: 3.0,
                spectral: 1e-12,
                dimension: 0.15,
                content: 0.05,
                theorem_slack: 0.15,
                sigma_halving: 0.1,
                ou_step: 1e-5,
            },
            tree_max: "10000".into(),
            branch_length: 12,
            triangle_count: 20,
            triangle_alphas: strings(&["1/2", "1", "2", "29/10"]),
            fit_alphas: strings(&["1/2", "2", "5/2", "29/10", "299/100"]),
            no_fit_alphas: strings(&["3", "4"]),
            toric_alphas: strings(&["2", "29/10"]),
            radii: vec![1.0, 2.0],
            lipschitz: vec![8.0, 32.0, 128.0],
            containment_lipschitz: vec![8.0, 32.0],
            disk_radius: std::f64::consts::SQRT_2,
            curve_t: vec![0.1, 0.05, 0.02, 0.01],
            obstruction_t: vec![0.05, 0.02, 0.01],
        }
    }

    /// Reduced sample counts for `report all`.
    pub fn desk(seed: u64) -> Self {
        let mut c = Self::full(seed);
        c.samples = Samples {
            symplecticity: 2000,
            containment: 100_000,
            defect: 200_000,
            lipschitz: 20_000,
            minkowski: 1_000_000,
            toric: 20_000,
            ou_points: 1000,
            ou_rotations: 100,
            sigma: 100_000,
        };
        c
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        let tols = [
            t.symplectic_analytic,
            t.symplectic_fd,
            t.containment,
            t.defect_ratio,
            t.defect_sigmas,
            t.lipschitz_ratio,
            t.spectral,
            t.dimension,
            t.content,
            t.theorem_slack,
            t.sigma_halving,
            t.ou_step,
        ];
        if tols.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(CliError::Domain("tolerances must be positive and finite".into()));
        }
        for a in self.triangle_alphas.iter().chain(&self.fit_alphas).chain(&self.no_fit_alphas).chain(&self.toric_alphas) {
            parse_alpha(a)?;
        }
        parse_alpha(&self.tree_max)?;
        let positive = |v: &[f64]| v.iter().all(|x| *x > 0.0 && x.is_finite());
        if !positive(&self.radii) || !positive(&self.curve_t) || !positive(&self.obstruction_t) || !(self.disk_radius > 0.0) {
            return Err(CliError::Domain("radii and t-values must be positive".into()));
        }
        if self.lipschitz.iter().chain(&self.containment_lipschitz).any(|l| !(*l >= 2.0)) {
            return Err(CliError::Domain("Lipschitz scales must be >= 2".into()));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Domain(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| CliError::Domain(format!("bad config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// SHA-256 of the canonical JSON of everything but `out_dir`.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out_dir = PathBuf::new();
        config_hash(&c)
    }
}

/// SHA-256 (hex) of the JSON serialization of `value`.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("config serializes");
    format!("{:x}", Sha256::digest(&json))
}

/// Exact positive rational from a `"p/q"` string.
pub fn parse_alpha(s: &str) -> Result<Q, CliError> {
    let q = parse_rational(s).map_err(CliError::Domain)?;
    if q <= Q::from_integer(0.into()) {
        return Err(CliError::Domain(format!("expected a positive rational, got {s:?}")));
    }
    Ok(q)
}
