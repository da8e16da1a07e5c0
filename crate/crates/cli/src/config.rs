//! Flat `key = value` run configuration with `#` comments.
//!
//! Unknown keys are rejected outright; missing model keys are only an error
//! for the subcommands that need them. Flag overrides (`--set key=value`)
//! reuse the same parser line by line.

use crusoe_core::dynamics::{CompanionLaw, IntegratorConfig};
use crusoe_core::exchange::ExchangeScenario;
use crusoe_core::mechanics::HamiltonianVariant;
use crusoe_core::{ConsumptionModel, ValidatedModel};

use crate::error::CliError;

const NUMERIC_KEYS: &[&str] = &[
    "E",
    "p_B",
    "p_C",
    "k",
    "m_B",
    "m_C",
    "Q_B0",
    "Q_C0",
    "dt",
    "t_end",
    "exchange.k",
    "exchange.l",
    "exchange.r",
    "exchange.m",
    "exchange.endow_RC_B",
    "exchange.endow_RC_C",
    "exchange.endow_D_B",
    "exchange.endow_D_C",
];

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub e: Option<f64>,
    pub p_b: Option<f64>,
    pub p_c: Option<f64>,
    pub k: Option<f64>,
    pub m_b: Option<f64>,
    pub m_c: Option<f64>,
    pub q_b0: f64,
    pub q_c0: f64,
    pub dt: f64,
    pub t_end: f64,
    pub companion: CompanionLaw,
    pub hamiltonian: HamiltonianVariant,
    pub exchange_k: Option<f64>,
    pub exchange_l: Option<f64>,
    pub exchange_r: Option<f64>,
    pub exchange_m: Option<f64>,
    pub exchange_endow_rc_b: Option<f64>,
    pub exchange_endow_rc_c: Option<f64>,
    pub exchange_endow_d_b: Option<f64>,
    pub exchange_endow_d_c: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            e: None,
            p_b: None,
            p_c: None,
            k: None,
            m_b: None,
            m_c: None,
            q_b0: 0.0,
            q_c0: 0.0,
            dt: 1e-3,
            t_end: 10.0,
            companion: CompanionLaw::Symmetric,
            hamiltonian: HamiltonianVariant::KineticOnly,
            exchange_k: None,
            exchange_l: None,
            exchange_r: None,
            exchange_m: None,
            exchange_endow_rc_b: None,
            exchange_endow_rc_c: None,
            exchange_endow_d_b: None,
            exchange_endow_d_c: None,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Validation(format!(
                    "malformed line {line_no}: expected `key = value`, got `{raw}`"
                )));
            };
            cfg.assign(key.trim(), value.trim(), Some(line_no))?;
        }
        Ok(cfg)
    }

    /// Applies one `key=value` flag override.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), CliError> {
        let Some((key, value)) = spec.split_once('=') else {
            return Err(CliError::Validation(format!(
                "malformed --set override `{spec}`: expected key=value"
            )));
        };
        self.assign(key.trim(), value.trim(), None)
    }

    fn assign(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<(), CliError> {
        let at = |line: Option<usize>| match line {
            Some(n) => format!(" (line {n})"),
            None => String::new(),
        };
        match key {
            "companion" => {
                self.companion = match value {
                    "symmetric" => CompanionLaw::Symmetric,
                    "budget_residual" => CompanionLaw::BudgetResidual,
                    other => {
                        return Err(CliError::Validation(format!(
                            "invalid value `{other}` for companion{}: \
                             expected symmetric or budget_residual",
                            at(line)
                        )))
                    }
                };
                return Ok(());
            }
            "hamiltonian" => {
                self.hamiltonian = match value {
                    "kinetic_only" => HamiltonianVariant::KineticOnly,
                    "paper_literal" => HamiltonianVariant::PaperLiteral,
                    other => {
                        return Err(CliError::Validation(format!(
                            "invalid value `{other}` for hamiltonian{}: \
                             expected kinetic_only or paper_literal",
                            at(line)
                        )))
                    }
                };
                return Ok(());
            }
            _ => {}
        }
        if !NUMERIC_KEYS.contains(&key) {
            return Err(CliError::Validation(format!(
                "unknown key `{key}`{}",
                at(line)
            )));
        }
        let parsed: f64 = value.parse().map_err(|_| {
            CliError::Validation(format!("invalid number for key `{key}`: `{value}`"))
        })?;
        if !parsed.is_finite() {
            return Err(CliError::Validation(format!(
                "invalid number for key `{key}`: `{value}` is not finite"
            )));
        }
        let slot = match key {
            "E" => &mut self.e,
            "p_B" => &mut self.p_b,
            "p_C" => &mut self.p_c,
            "k" => &mut self.k,
            "m_B" => &mut self.m_b,
            "m_C" => &mut self.m_c,
            "Q_B0" => {
                self.q_b0 = parsed;
                return Ok(());
            }
            "Q_C0" => {
                self.q_c0 = parsed;
                return Ok(());
            }
            "dt" => {
                self.dt = parsed;
                return Ok(());
            }
            "t_end" => {
                self.t_end = parsed;
                return Ok(());
            }
            "exchange.k" => &mut self.exchange_k,
            "exchange.l" => &mut self.exchange_l,
            "exchange.r" => &mut self.exchange_r,
            "exchange.m" => &mut self.exchange_m,
            "exchange.endow_RC_B" => &mut self.exchange_endow_rc_b,
            "exchange.endow_RC_C" => &mut self.exchange_endow_rc_c,
            "exchange.endow_D_B" => &mut self.exchange_endow_d_b,
            "exchange.endow_D_C" => &mut self.exchange_endow_d_c,
            _ => unreachable!("key set checked above"),
        };
        *slot = Some(parsed);
        Ok(())
    }

    fn require(value: Option<f64>, key: &str) -> Result<f64, CliError> {
        value.ok_or_else(|| CliError::Validation(format!("missing required key `{key}`")))
    }

    pub fn model(&self) -> Result<ValidatedModel, CliError> {
        let model = ConsumptionModel {
            e: Self::require(self.e, "E")?,
            p_b: Self::require(self.p_b, "p_B")?,
            p_c: Self::require(self.p_c, "p_C")?,
            k: Self::require(self.k, "k")?,
            m_b: Self::require(self.m_b, "m_B")?,
            m_c: Self::require(self.m_c, "m_C")?,
            q_b0: self.q_b0,
            q_c0: self.q_c0,
        };
        Ok(model.validate()?)
    }

    pub fn integrator(&self) -> Result<IntegratorConfig, CliError> {
        Ok(IntegratorConfig::new(self.dt, self.t_end)?)
    }

    pub fn exchange_scenario(&self) -> Result<ExchangeScenario, CliError> {
        let s = ExchangeScenario {
            k: Self::require(self.exchange_k, "exchange.k")?,
            l: Self::require(self.exchange_l, "exchange.l")?,
            r: Self::require(self.exchange_r, "exchange.r")?,
            m: Self::require(self.exchange_m, "exchange.m")?,
            endow_rc: (
                Self::require(self.exchange_endow_rc_b, "exchange.endow_RC_B")?,
                Self::require(self.exchange_endow_rc_c, "exchange.endow_RC_C")?,
            ),
            endow_d: (
                Self::require(self.exchange_endow_d_b, "exchange.endow_D_B")?,
                Self::require(self.exchange_endow_d_c, "exchange.endow_D_C")?,
            ),
        };
        s.validate()?;
        Ok(s)
    }
}
