//! Perturbation-determinant quantities `alpha(kappa)` and `beta(kappa)`.

mod operator;
mod quadratic;
mod quartic;

pub use operator::{
    alpha_full, alpha_full_with, beta_full, beta_full_with, build_operator, OperatorMatrix, OperatorSpec,
};
pub(crate) use quadratic::weighted_mass as quadratic_weighted_mass;
pub use quadratic::{alpha2, beta2, tail_bound};
pub use quartic::{alpha4, alpha4_direct, alpha4_direct_permuted, beta4, quartic_form, QuarticPermutation};

use crate::error::{Error, Result};

/// Sign of the nonlinearity; selects the alternating or plain trace series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Defocusing,
    Focusing,
}

impl Sign {
    /// `+1` for defocusing, `-1` for focusing.
    pub fn value(self) -> f64 {
        match self {
            Sign::Defocusing => 1.0,
            Sign::Focusing => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sign::Defocusing => "defocusing",
            Sign::Focusing => "focusing",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralParameter {
    pub kappa: f64,
    pub sign: Sign,
}

impl SpectralParameter {
    pub fn new(kappa: f64, sign: Sign) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(Self { kappa, sign })
    }

    pub fn doubled(self) -> Self {
        Self { kappa: 2.0 * self.kappa, sign: self.sign }
    }
}

pub(crate) fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::Kappa(kappa))
    }
}
