//! String-keyed builders for command-line use.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    build_h_cosmo, build_h_fd, build_h_osc, gauss_bosonic, penalty_hamiltonian, BasisKind, DeformationParams,
    FermionConvention, ModelParams, DEFAULT_PENALTY,
};
use crate::brst::{build_brst_laplacian, BrstConfig};
use crate::error::{Error, Result};
use crate::operator::Operator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelId {
    Osc,
    Fd,
    Cosmo,
    BrstUnitary,
    Gauss,
    Penalty,
}

impl ModelId {
    pub const ALL: [ModelId; 6] =
        [ModelId::Osc, ModelId::Fd, ModelId::Cosmo, ModelId::BrstUnitary, ModelId::Gauss, ModelId::Penalty];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Osc => "osc",
            ModelId::Fd => "fd",
            ModelId::Cosmo => "cosmo",
            ModelId::BrstUnitary => "brst-unitary",
            ModelId::Gauss => "gauss",
            ModelId::Penalty => "penalty",
        }
    }

    /// Levels per bosonic direction when none is given.
    pub fn default_levels(self) -> usize {
        match self {
            ModelId::BrstUnitary => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown model id {s:?}")))
    }
}

/// Union of the parameters any builder reads; each builder ignores the rest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildParams {
    pub g: f64,
    pub levels: Option<usize>,
    pub include_fermions: bool,
    pub fermions: FermionConvention,
    /// Time at which the cosmology Hamiltonian is sampled.
    pub t: f64,
    pub deformation: DeformationParams,
    /// Penalty strength λ.
    pub lambda: f64,
    /// Gauss generator index, 1..=3.
    pub component: usize,
}

impl Default for BuildParams {
    fn default() -> Self {
        Self {
            g: 0.1,
            levels: None,
            include_fermions: true,
            fermions: FermionConvention::Literal,
            t: 1.0,
            deformation: DeformationParams::from_k_squared(0.25).expect("finite"),
            lambda: DEFAULT_PENALTY,
            component: 1,
        }
    }
}

pub fn build_model(id: ModelId, params: &BuildParams) -> Result<Operator> {
    let levels = params.levels.unwrap_or(id.default_levels());
    if levels < 2 {
        return Err(Error::InvalidParameter(format!("levels must be at least 2, got {levels}")));
    }
    if !params.g.is_finite() {
        return Err(Error::InvalidParameter(format!("g must be finite, got {}", params.g)));
    }
    let model = ModelParams {
        g: params.g,
        levels,
        include_fermions: params.include_fermions,
        fermions: params.fermions,
    };
    match id {
        ModelId::Osc => Ok(build_h_osc(&model)),
        ModelId::Fd => Ok(build_h_fd(&model)),
        ModelId::Cosmo => build_h_cosmo(params.t, &params.deformation, levels),
        ModelId::BrstUnitary => build_brst_laplacian(&BrstConfig::new(levels, params.g)),
        ModelId::Gauss => {
            if !(1..=3).contains(&params.component) {
                return Err(Error::InvalidParameter(format!("component must be 1, 2 or 3, got {}", params.component)));
            }
            let g = gauss_bosonic(BasisKind::oscillator(levels))?;
            Ok(g[params.component - 1].clone())
        }
        ModelId::Penalty => {
            let g = gauss_bosonic(BasisKind::oscillator(levels))?;
            let h = build_h_osc(&model.bosonic());
            penalty_hamiltonian(&h, params.lambda, &g)
        }
    }
}
