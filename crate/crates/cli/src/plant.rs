use std::fmt;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rshaper_core::{
    nominal_params, paper_verbatim_statespace, two_mass_statespace, RationalTransferF64,
    StateSpaceModelF64, TemplateParams, TwoMassParamsF64,
};
use serde::Deserialize;

pub const BUILTIN_PAPER: &str = "builtin:paper-two-mass";
pub const BUILTIN_NOMINAL: &str = "builtin:two-mass-nominal";

#[derive(Debug, Clone)]
pub enum Plant {
    StateSpace(StateSpaceModelF64),
    Transfer(RationalTransferF64),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PlantFile {
    StateSpace(StateSpaceModelF64),
    Transfer(RationalTransferF64),
    TwoMass(TwoMassParamsF64),
    Template(TemplateParams<f64>),
}

impl Plant {
    /// `builtin:paper-two-mass`, `builtin:two-mass-nominal`, or a JSON file holding
    /// `{"A","B","F"}`, `{"num","den"}`, two-mass parameters or template parameters.
    pub fn resolve(reference: &str) -> Result<Self> {
        match reference {
            BUILTIN_PAPER => return Ok(Plant::StateSpace(paper_verbatim_statespace())),
            BUILTIN_NOMINAL => {
                return Ok(Plant::StateSpace(two_mass_statespace(&nominal_params())?))
            }
            r if r.starts_with("builtin:") => {
                bail!("unknown builtin plant {r:?} (known: {BUILTIN_PAPER}, {BUILTIN_NOMINAL})")
            }
            _ => {}
        }
        let text = std::fs::read_to_string(Path::new(reference))
            .with_context(|| format!("reading plant file {reference}"))?;
        let parsed: PlantFile = serde_json::from_str(&text).with_context(|| {
            format!("{reference}: not a state-space, transfer, two-mass or template plant")
        })?;
        Ok(match parsed {
            PlantFile::StateSpace(m) => Plant::StateSpace(m),
            PlantFile::Transfer(g) => Plant::Transfer(g),
            PlantFile::TwoMass(p) => Plant::StateSpace(two_mass_statespace(&p)?),
            PlantFile::Template(p) => {
                Plant::Transfer(RationalTransferF64::fourth_order_template(p)?)
            }
        })
    }

    pub fn transfer(&self) -> Result<RationalTransferF64> {
        match self {
            Plant::StateSpace(m) => Ok(RationalTransferF64::from_statespace(m)?),
            Plant::Transfer(g) => Ok(g.clone()),
        }
    }

    pub fn statespace(&self) -> Result<&StateSpaceModelF64> {
        match self {
            Plant::StateSpace(m) => Ok(m),
            Plant::Transfer(_) => {
                bail!("simulation needs a state-space plant, got a transfer function")
            }
        }
    }
}

impl fmt::Display for Plant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Plant::StateSpace(m) => write!(f, "state-space model of order {}", m.order()),
            Plant::Transfer(g) => write!(
                f,
                "transfer function of degree {}/{}",
                g.num().degree(),
                g.den().degree()
            ),
        }
    }
}
