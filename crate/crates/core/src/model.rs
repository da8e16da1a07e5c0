//! Domain types shared by every other module: the two-good consumption model,
//! bundles, sampled trajectories, and utility specifications.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// Identifier of a good. Short, non-empty, unique within a model.
///
/// The consumption model is a two-good economy; the conventional ids are
/// [`GoodId::b`] ("B") and [`GoodId::c`] ("C").
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GoodId(String);

impl GoodId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::MissingGood("<empty>".into()));
        }
        Ok(GoodId(name))
    }

    /// The first good of the two-good model.
    pub fn b() -> Self {
        GoodId("B".into())
    }

    /// The second good of the two-good model.
    pub fn c() -> Self {
        GoodId("C".into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for GoodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Non-negative quantities of goods, keyed by id.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    q: BTreeMap<GoodId, f64>,
}

impl Bundle {
    pub fn new(q: BTreeMap<GoodId, f64>) -> Result<Self> {
        for v in q.values() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue);
            }
            if *v < 0.0 {
                return Err(Error::NegativeInitialQuantity("bundle quantity"));
            }
        }
        Ok(Bundle { q })
    }

    /// Bundle of the two standard goods.
    pub fn two_goods(q_b: f64, q_c: f64) -> Result<Self> {
        let mut q = BTreeMap::new();
        q.insert(GoodId::b(), q_b);
        q.insert(GoodId::c(), q_c);
        Bundle::new(q)
    }

    /// Bundle that skips the non-negativity check. Finite-difference probes
    /// step a half-step past zero on boundary bundles and need this.
    pub(crate) fn two_goods_unchecked(q_b: f64, q_c: f64) -> Self {
        let mut q = BTreeMap::new();
        q.insert(GoodId::b(), q_b);
        q.insert(GoodId::c(), q_c);
        Bundle { q }
    }

    pub fn quantity(&self, good: &GoodId) -> Result<f64> {
        self.q
            .get(good)
            .copied()
            .ok_or_else(|| Error::MissingGood(good.to_string()))
    }

    pub fn goods(&self) -> impl Iterator<Item = &GoodId> {
        self.q.keys()
    }
}

/// Parameters of the one-agent two-good economy.
///
/// Units: `e` is an energy budget, `p_b`/`p_c` are picking costs per unit
/// good, `k` scales utility (utils per good-pair), `m_b`/`m_c` are inertial
/// constants tying marginal utility to the consumption rate. Only the ratios
/// `k/m` are observable in the resulting dynamics; the utility unit itself
/// drops out and is carried as an opaque tag in documentation only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsumptionModel {
    pub e: f64,
    pub p_b: f64,
    pub p_c: f64,
    pub k: f64,
    pub m_b: f64,
    pub m_c: f64,
    pub q_b0: f64,
    pub q_c0: f64,
}

impl ConsumptionModel {
    /// Checks every invariant and wraps the model as [`ValidatedModel`].
    pub fn validate(self) -> Result<ValidatedModel> {
        let positive: [(&'static str, f64); 6] = [
            ("E", self.e),
            ("p_B", self.p_b),
            ("p_C", self.p_c),
            ("k", self.k),
            ("m_B", self.m_b),
            ("m_C", self.m_c),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::NonPositiveParameter(name));
            }
        }
        let non_negative: [(&'static str, f64); 2] = [("Q_B0", self.q_b0), ("Q_C0", self.q_c0)];
        for (name, v) in non_negative {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NegativeInitialQuantity(name));
            }
        }
        Ok(ValidatedModel(self))
    }
}

/// A [`ConsumptionModel`] whose invariants have been checked.
///
/// Every operation downstream takes a `ValidatedModel`, so invalid parameter
/// regions are rejected exactly once, at the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidatedModel(ConsumptionModel);

impl ValidatedModel {
    pub fn params(&self) -> &ConsumptionModel {
        &self.0
    }
}

impl std::ops::Deref for ValidatedModel {
    type Target = ConsumptionModel;
    fn deref(&self) -> &ConsumptionModel {
        &self.0
    }
}

/// Evaluation step for central finite differences: `max(1e-6, 1e-6*|q|)`.
///
/// Balances truncation against round-off for desk-scale magnitudes.
pub(crate) fn fd_step(q: f64) -> f64 {
    (1e-6 * q.abs()).max(1e-6)
}

type Evaluator = Arc<dyn Fn(&Bundle) -> f64 + Send + Sync>;

/// A utility function over bundles.
///
/// `CobbDouglas` is the multiplicative form `k·Q_B·Q_C` with exact gradients.
/// `Custom` wraps an opaque evaluator; gradients fall back to central finite
/// differences, which probe a half-step past zero on boundary bundles; the
/// evaluator should tolerate quantities down to `-1e-6`.
#[derive(Clone)]
pub enum UtilitySpec {
    CobbDouglas { k: f64 },
    Custom { eval: Evaluator },
}

impl fmt::Debug for UtilitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UtilitySpec::CobbDouglas { k } => write!(f, "CobbDouglas {{ k: {k} }}"),
            UtilitySpec::Custom { .. } => f.write_str("Custom {{ .. }}"),
        }
    }
}

impl UtilitySpec {
    pub fn cobb_douglas(k: f64) -> Self {
        UtilitySpec::CobbDouglas { k }
    }

    pub fn custom(eval: impl Fn(&Bundle) -> f64 + Send + Sync + 'static) -> Self {
        UtilitySpec::Custom {
            eval: Arc::new(eval),
        }
    }

    /// Total utility of a bundle, in utils.
    pub fn value(&self, bundle: &Bundle) -> Result<f64> {
        let q_b = bundle.quantity(&GoodId::b())?;
        let q_c = bundle.quantity(&GoodId::c())?;
        match self {
            UtilitySpec::CobbDouglas { k } => Ok(k * q_b * q_c),
            UtilitySpec::Custom { eval } => Ok(eval(bundle)),
        }
    }

    /// Marginal utility per good.
    ///
    /// Exact for `CobbDouglas`; central finite difference with step
    /// `max(1e-6, 1e-6*|q|)` per coordinate for `Custom`.
    pub fn gradient(&self, bundle: &Bundle) -> Result<BTreeMap<GoodId, f64>> {
        let q_b = bundle.quantity(&GoodId::b())?;
        let q_c = bundle.quantity(&GoodId::c())?;
        let mut grad = BTreeMap::new();
        match self {
            UtilitySpec::CobbDouglas { k } => {
                grad.insert(GoodId::b(), k * q_c);
                grad.insert(GoodId::c(), k * q_b);
            }
            UtilitySpec::Custom { eval } => {
                let h_b = fd_step(q_b);
                let up = eval(&Bundle::two_goods_unchecked(q_b + h_b, q_c));
                let down = eval(&Bundle::two_goods_unchecked(q_b - h_b, q_c));
                grad.insert(GoodId::b(), (up - down) / (2.0 * h_b));
                let h_c = fd_step(q_c);
                let up = eval(&Bundle::two_goods_unchecked(q_b, q_c + h_c));
                let down = eval(&Bundle::two_goods_unchecked(q_b, q_c - h_c));
                grad.insert(GoodId::c(), (up - down) / (2.0 * h_c));
            }
        }
        Ok(grad)
    }
}

/// A sampled time series of one or more quantity signals.
///
/// Times are strictly increasing (not necessarily uniform) and every signal
/// has one value per sample. Times are in the model's time unit, signals in
/// goods.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    signals: BTreeMap<GoodId, Vec<f64>>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, signals: BTreeMap<GoodId, Vec<f64>>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: times.len(),
            });
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotoneTime);
        }
        for series in signals.values() {
            if series.len() != times.len() {
                return Err(Error::LengthMismatch);
            }
            if series.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValue);
            }
        }
        Ok(Trajectory { times, signals })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn signal(&self, good: &GoodId) -> Result<&[f64]> {
        self.signals
            .get(good)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingGood(good.to_string()))
    }

    pub fn goods(&self) -> impl Iterator<Item = &GoodId> {
        self.signals.keys()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least two samples
    }
}
