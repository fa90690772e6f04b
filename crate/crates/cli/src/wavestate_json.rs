//! JSON wire format for wave states:
//! {"mass": m, "terms": [{"re_amp", "im_amp", "center", "width_coeff",
//! "energy", "momentum"}, ...]}.

use collapse_core::wavefunction::{GaussianTerm, WaveState};
use collapse_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize, Deserialize)]
pub struct WaveStateDoc {
    pub mass: f64,
    pub terms: Vec<TermDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TermDoc {
    pub re_amp: f64,
    pub im_amp: f64,
    pub center: f64,
    pub width_coeff: f64,
    pub energy: f64,
    pub momentum: f64,
}

impl From<&WaveState> for WaveStateDoc {
    fn from(state: &WaveState) -> Self {
        WaveStateDoc {
            mass: state.mass(),
            terms: state
                .terms()
                .iter()
                .map(|t| TermDoc {
                    re_amp: t.amplitude.re,
                    im_amp: t.amplitude.im,
                    center: t.center,
                    width_coeff: t.width_coeff,
                    energy: t.energy,
                    momentum: t.momentum,
                })
                .collect(),
        }
    }
}

impl WaveStateDoc {
    pub fn into_state(self) -> CliResult<WaveState> {
        let terms = self
            .terms
            .into_iter()
            .map(|t| {
                GaussianTerm::new(
                    Complex64::new(t.re_amp, t.im_amp),
                    t.center,
                    t.width_coeff,
                    t.energy,
                    t.momentum,
                )
            })
            .collect();
        WaveState::new(terms, self.mass).map_err(|e| CliError::validation(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut body =
            serde_json::to_string_pretty(self).expect("plain structs serialize infallibly");
        body.push('\n');
        body
    }

    pub fn from_json(body: &str) -> CliResult<Self> {
        serde_json::from_str(body).map_err(|e| CliError::validation(format!("wave state: {e}")))
    }
}
