//! Cyclic indexing, coefficient and error-term sequences, and the
//! hypothesis checks (i)-(v) on a schedule.

mod conditions;
mod index;
mod sequence;

use serde::{Deserialize, Serialize};

pub use conditions::{
    validate_conditions, ConditionCheck, ConditionReport, HypothesisSet, Verdict, DEFAULT_VALIDATION_HORIZON,
};
pub use index::{index_decompose, IndexDecomposition};
pub use sequence::{generate_error_term, ErrorTermSpec, Extremum, SeqSpec};

use crate::error::Result;

/// The four free coefficient sequences and the two error-term sequences.
///
/// `alpha_n = 1 - beta_n - gamma_n` and `alpha^_n = 1 - beta^_n - gamma^_n`
/// are derived, so the sum-to-one condition holds by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub beta: SeqSpec,
    pub gamma: SeqSpec,
    pub beta_hat: SeqSpec,
    pub gamma_hat: SeqSpec,
    #[serde(default = "zero_errors")]
    pub error_u: ErrorTermSpec,
    #[serde(default = "zero_errors")]
    pub error_v: ErrorTermSpec,
}

fn zero_errors() -> ErrorTermSpec {
    ErrorTermSpec::Zero
}

/// All six coefficients at one index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub gamma_hat: f64,
}

impl ScheduleParams {
    pub fn validate(&self) -> Result<()> {
        self.beta.validate()?;
        self.gamma.validate()?;
        self.beta_hat.validate()?;
        self.gamma_hat.validate()?;
        self.error_u.validate()?;
        self.error_v.validate()
    }

    pub fn coefficients(&self, n: usize) -> Result<Coefficients> {
        let beta = self.beta.value(n, "beta")?;
        let gamma = self.gamma.value(n, "gamma")?;
        let beta_hat = self.beta_hat.value(n, "beta_hat")?;
        let gamma_hat = self.gamma_hat.value(n, "gamma_hat")?;
        Ok(Coefficients {
            alpha: 1.0 - beta - gamma,
            beta,
            gamma,
            alpha_hat: 1.0 - beta_hat - gamma_hat,
            beta_hat,
            gamma_hat,
        })
    }

    /// Longest run the explicit sequences allow, if any is finite.
    pub fn max_horizon(&self) -> Option<usize> {
        [
            self.beta.explicit_len(),
            self.gamma.explicit_len(),
            self.beta_hat.explicit_len(),
            self.gamma_hat.explicit_len(),
            self.error_u.explicit_len(),
            self.error_v.explicit_len(),
        ]
        .into_iter()
        .flatten()
        .min()
    }
}
