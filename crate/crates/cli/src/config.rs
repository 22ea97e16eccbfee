use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use hyperfill::generators::{generate_example, Example};
use hyperfill::io::read_space;
use hyperfill::nets::default_depth;
use hyperfill::solver::{beta_for, check_exponents, Method, SolveOptions};
use hyperfill::space::FiniteSpace;

use crate::Failure;

/// Where the sample space comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceSource {
    Generator { name: String, depth: u32 },
    File(PathBuf),
}

impl SpaceSource {
    /// An existing path is read as a space file; anything else names a generator.
    pub fn parse(spec: &str, depth: u32) -> Self {
        if Path::new(spec).is_file() {
            SpaceSource::File(PathBuf::from(spec))
        } else {
            SpaceSource::Generator { name: spec.to_string(), depth }
        }
    }

    pub fn load(&self) -> Result<FiniteSpace, Failure> {
        let space = match self {
            SpaceSource::Generator { name, depth } => {
                let example: Example = name.parse()?;
                generate_example(example, *depth)?
            }
            SpaceSource::File(path) => read_space(path)?,
        };
        if space.is_rescaled() {
            Ok(space)
        } else {
            Ok(space.rescale()?)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub space: SpaceSource,
    pub alpha: f64,
    pub tau: f64,
    /// Finest level `N`; chosen from the sample resolution when absent.
    pub levels: Option<usize>,
    pub p: f64,
    pub theta: f64,
    /// Overrides the codimension stored with the space.
    pub sigma: Option<f64>,
    pub band_width: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub method: Method,
    pub seed: u64,
    #[serde(skip)]
    pub out: PathBuf,
}

/// The part of a configuration that determines nets and filling.
#[derive(Serialize)]
struct BuildKey<'a> {
    space: &'a SpaceSource,
    alpha: f64,
    tau: f64,
    levels: usize,
    sigma: Option<f64>,
    /// Digest of the space file's contents, so edits invalidate the cache.
    content: Option<String>,
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunConfig {
    pub fn validate_geometry(&self) -> Result<(), Failure> {
        if !(self.alpha > 2.0) {
            return Err(Failure::Usage(format!("alpha must exceed 2, got {}", self.alpha)));
        }
        if !(self.tau > 2.0) {
            return Err(Failure::Usage(format!("tau must exceed 2, got {}", self.tau)));
        }
        if !(self.tol > 0.0) {
            return Err(Failure::Usage(format!("tol must be positive, got {}", self.tol)));
        }
        if let Some(s) = self.sigma {
            if !(s > 0.0) {
                return Err(Failure::Usage(format!("sigma must be positive, got {s}")));
            }
        }
        Ok(())
    }

    /// Checks `0 < θ < 1` and `p > max(1, σ/θ)` against the loaded space.
    pub fn validate_exponents(&self, space: &FiniteSpace) -> Result<(), Failure> {
        check_exponents(space.sigma(), self.p, self.theta).map_err(|e| Failure::Usage(e.to_string()))
    }

    pub fn epsilon(&self) -> f64 {
        self.alpha.ln()
    }

    pub fn beta(&self) -> f64 {
        beta_for(self.epsilon(), self.p, self.theta)
    }

    pub fn solve_opts(&self) -> SolveOptions {
        SolveOptions { tol: self.tol, max_iter: self.max_iter, method: self.method }
    }

    pub fn load_space(&self) -> Result<FiniteSpace, Failure> {
        let space = self.space.load()?;
        match self.sigma {
            Some(s) => Ok(space.with_sigma(s)?),
            None => Ok(space),
        }
    }

    pub fn levels_for(&self, space: &FiniteSpace) -> usize {
        self.levels.unwrap_or_else(|| default_depth(space, self.alpha))
    }

    /// Hash of everything that determines the nets and the filling.
    pub fn build_hash(&self, levels: usize) -> Result<String, Failure> {
        let content = match &self.space {
            SpaceSource::File(path) => Some(hex_digest(&std::fs::read(path)?)),
            SpaceSource::Generator { .. } => None,
        };
        let key = BuildKey { space: &self.space, alpha: self.alpha, tau: self.tau, levels, sigma: self.sigma, content };
        Ok(hex_digest(&serde_json::to_vec(&key)?))
    }

    /// Hash of the full configuration, embedded in every report.
    pub fn hash(&self) -> String {
        hex_digest(&serde_json::to_vec(self).expect("config serializes"))
    }
}
