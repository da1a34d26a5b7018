//! Latent count distributions `[x | θ]` and their conjugate conditionals.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::models::{Family, ModelSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaPrior {
    pub a: f64,
    pub b: f64,
}

impl BetaPrior {
    pub const UNIFORM: BetaPrior = BetaPrior { a: 1.0, b: 1.0 };

    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidModel(format!("beta parameters must be positive (got {a}, {b})")));
        }
        Ok(BetaPrior { a, b })
    }

    /// Posterior after `successes` and `failures`.
    pub fn update(self, successes: f64, failures: f64) -> BetaPrior {
        BetaPrior { a: self.a + successes, b: self.b + failures }
    }
}

/// Prior on the population size `N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AbundancePrior {
    /// Uniform on `{0, 1, …, n_max}`.
    DiscreteUniform { n_max: u64 },
}

impl AbundancePrior {
    pub fn n_max(&self) -> u64 {
        match *self {
            AbundancePrior::DiscreteUniform { n_max } => n_max,
        }
    }

    pub fn ln_pmf(&self, n: u64) -> f64 {
        match *self {
            AbundancePrior::DiscreteUniform { n_max } if n <= n_max => -((n_max as f64) + 1.0).ln(),
            AbundancePrior::DiscreteUniform { .. } => f64::NEG_INFINITY,
        }
    }
}

/// Which distribution governs the latent counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MassModel {
    /// `[x|θ] ∝ 1` on the fiber.
    Uniform,
    /// Closed population with time-varying capture and misidentification.
    /// `N = Σx` includes the null history, so the abundance prior enters the mass.
    Mta { abundance: AbundancePrior, capture: BetaPrior, identification: BetaPrior },
    /// Model M_t on the nonzero capture histories, with `N` a parameter and
    /// the unobserved count `N − Σx`.
    Mt { abundance: AbundancePrior, capture: BetaPrior },
}

impl MassModel {
    /// Defaults: `Beta(1,1)` capture priors, `Beta(19,1)` on correct identification.
    pub fn mta(n_max: u64) -> Self {
        MassModel::Mta {
            abundance: AbundancePrior::DiscreteUniform { n_max },
            capture: BetaPrior::UNIFORM,
            identification: BetaPrior { a: 19.0, b: 1.0 },
        }
    }

    pub fn mt(n_max: u64) -> Self {
        MassModel::Mt { abundance: AbundancePrior::DiscreteUniform { n_max }, capture: BetaPrior::UNIFORM }
    }
}

/// Parameter block `θ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Theta {
    None,
    Mta { capture: Vec<f64>, identification: f64 },
    Mt { abundance: u64, capture: Vec<f64> },
}

impl Theta {
    /// Named scalar components (`p1..pK`, `alpha`, `N`).
    pub fn components(&self) -> Vec<(String, f64)> {
        let caps = |c: &[f64]| c.iter().enumerate().map(|(j, &p)| (format!("p{}", j + 1), p)).collect::<Vec<_>>();
        match self {
            Theta::None => Vec::new(),
            Theta::Mta { capture, identification } => {
                let mut v = caps(capture);
                v.push(("alpha".into(), *identification));
                v
            }
            Theta::Mt { abundance, capture } => {
                let mut v = vec![("N".to_string(), *abundance as f64)];
                v.extend(caps(capture));
                v
            }
        }
    }
}

fn check_prob(name: String, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::ParameterRange { name, value })
    }
}

/// `x·ln π` with `0·ln 0 = 0`.
fn weighted_ln(count: i64, ln_prob: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * ln_prob
    }
}

/// A configuration matrix together with the distribution of its latent counts.
#[derive(Clone, Debug)]
pub struct LatentModel {
    pub spec: ModelSpec,
    pub mass: MassModel,
}

impl LatentModel {
    pub fn new(spec: ModelSpec, mass: MassModel) -> Result<Self> {
        match (&mass, spec.family) {
            (MassModel::Uniform, _) => {}
            (MassModel::Mta { .. }, Family::Mta { .. }) => {}
            (MassModel::Mt { .. }, Family::SuffStats { .. }) => {}
            (m, f) => {
                return Err(Error::UnsupportedFamily(format!(
                    "{} mass on a {} model",
                    match m {
                        MassModel::Uniform => "uniform",
                        MassModel::Mta { .. } => "mta",
                        MassModel::Mt { .. } => "M_t",
                    },
                    f.name()
                )))
            }
        }
        Ok(LatentModel { spec, mass })
    }

    pub fn uniform(spec: ModelSpec) -> Self {
        LatentModel { spec, mass: MassModel::Uniform }
    }

    pub fn occasions(&self) -> usize {
        match self.spec.family {
            Family::Mta { k } | Family::SuffStats { k } | Family::BandMisread { k } => k,
            _ => 0,
        }
    }

    fn check_theta(&self, theta: &Theta) -> Result<()> {
        let k = self.occasions();
        let caps = |c: &[f64]| -> Result<()> {
            if c.len() != k {
                return Err(Error::Dimension { expected: k, found: c.len() });
            }
            for (j, &p) in c.iter().enumerate() {
                check_prob(format!("p{}", j + 1), p)?;
            }
            Ok(())
        };
        match (&self.mass, theta) {
            (MassModel::Uniform, _) => Ok(()),
            (MassModel::Mta { .. }, Theta::Mta { capture, identification }) => {
                caps(capture)?;
                check_prob("alpha".into(), *identification).map(|_| ())
            }
            (MassModel::Mt { .. }, Theta::Mt { capture, .. }) => caps(capture),
            _ => Err(Error::InvalidModel("parameter block does not match the mass model".into())),
        }
    }

    /// `ln π_ω` for every column under `theta`.
    pub fn ln_cell_probabilities(&self, theta: &Theta) -> Result<Vec<f64>> {
        self.check_theta(theta)?;
        let hist = &self.spec.histories;
        Ok(match theta {
            Theta::Mta { capture, identification: alpha } => hist
                .iter()
                .map(|h| {
                    h.digits()
                        .iter()
                        .zip(capture)
                        .map(|(&d, &p)| match d {
                            0 => (1.0 - p).ln(),
                            1 => (p * alpha).ln(),
                            _ => (p * (1.0 - alpha)).ln(),
                        })
                        .sum()
                })
                .collect(),
            Theta::Mt { capture, .. } => hist
                .iter()
                .map(|h| {
                    h.digits()
                        .iter()
                        .zip(capture)
                        .map(|(&d, &p)| if d == 1 { p.ln() } else { (1.0 - p).ln() })
                        .sum()
                })
                .collect(),
            Theta::None => vec![0.0; self.spec.matrix.cols()],
        })
    }

    /// `ln [x | θ]` up to a constant that does not depend on `x`; `−∞` when any
    /// entry is negative or the abundance exceeds its prior support.
    pub fn log_mass(&self, theta: &Theta, x: &[i64]) -> Result<f64> {
        let ln_pi = self.ln_cell_probabilities(theta)?;
        self.log_mass_with(theta, &ln_pi, x)
    }

    /// As [`log_mass`](Self::log_mass) with precomputed `ln π`.
    pub fn log_mass_with(&self, theta: &Theta, ln_pi: &[f64], x: &[i64]) -> Result<f64> {
        let d = self.spec.matrix.cols();
        if x.len() != d {
            return Err(Error::Dimension { expected: d, found: x.len() });
        }
        if x.iter().any(|&v| v < 0) {
            return Ok(f64::NEG_INFINITY);
        }
        let multinomial_body =
            |x: &[i64]| -> f64 { x.iter().zip(ln_pi).map(|(&c, &lp)| weighted_ln(c, lp) - ln_factorial(c as u64)).sum() };
        match (&self.mass, theta) {
            (MassModel::Uniform, _) => Ok(0.0),
            (MassModel::Mta { abundance, .. }, Theta::Mta { .. }) => {
                let n: u64 = x.iter().map(|&v| v as u64).sum();
                let prior = abundance.ln_pmf(n);
                if prior == f64::NEG_INFINITY {
                    return Ok(f64::NEG_INFINITY);
                }
                Ok(prior + ln_factorial(n) + multinomial_body(x))
            }
            (MassModel::Mt { .. }, Theta::Mt { abundance, capture }) => {
                let seen: u64 = x.iter().map(|&v| v as u64).sum();
                let Some(unseen) = abundance.checked_sub(seen) else {
                    return Ok(f64::NEG_INFINITY);
                };
                let ln_pi0: f64 = capture.iter().map(|p| (1.0 - p).ln()).sum();
                Ok(ln_factorial(*abundance) - ln_factorial(unseen)
                    + weighted_ln(unseen as i64, ln_pi0)
                    + multinomial_body(x))
            }
            _ => Err(Error::InvalidModel("parameter block does not match the mass model".into())),
        }
    }

    /// Full conditionals of the capture probabilities (and, for `mta`, the
    /// identification probability as the last entry) given the counts.
    pub fn beta_conditionals(&self, theta: &Theta, x: &[i64]) -> Result<Vec<BetaPrior>> {
        let hist = &self.spec.histories;
        let k = self.occasions();
        let total = |pred: &dyn Fn(&crate::models::HistoryCode) -> f64| -> f64 {
            hist.iter().zip(x).map(|(h, &c)| c as f64 * pred(h)).sum()
        };
        match (&self.mass, theta) {
            (MassModel::Mta { capture, identification, .. }, _) => {
                let n = x.iter().sum::<i64>() as f64;
                let mut out: Vec<BetaPrior> = (0..k)
                    .map(|j| {
                        let caught = total(&|h| f64::from(h.digits()[j] != 0));
                        capture.update(caught, n - caught)
                    })
                    .collect();
                let ones = total(&|h| h.count(1) as f64);
                let twos = total(&|h| h.count(2) as f64);
                out.push(identification.update(ones, twos));
                Ok(out)
            }
            (MassModel::Mt { capture, .. }, Theta::Mt { abundance, .. }) => Ok((0..k)
                .map(|j| {
                    let caught = total(&|h| f64::from(h.digits()[j]));
                    capture.update(caught, *abundance as f64 - caught)
                })
                .collect()),
            (MassModel::Mt { .. }, _) => Err(Error::InvalidModel("M_t conditionals need an abundance".into())),
            (MassModel::Uniform, _) => Err(Error::UnsupportedFamily("parameter updates under a uniform mass".into())),
        }
    }

    /// Log weights of `N = seen + u`, `u = 0..=n_max − seen`, under model M_t
    /// given the capture probabilities: `ln C(seen + u, u) + u·ln π₀`.
    pub fn abundance_log_weights(&self, capture: &[f64], seen: u64) -> Result<Vec<f64>> {
        let MassModel::Mt { abundance, .. } = &self.mass else {
            return Err(Error::UnsupportedFamily("abundance updates outside model M_t".into()));
        };
        let n_max = abundance.n_max();
        if n_max < seen {
            return Err(Error::InvalidModel(format!("abundance bound {n_max} below observed total {seen}")));
        }
        let ln_pi0: f64 = capture.iter().map(|p| (1.0 - p).ln()).sum();
        // ln C(seen + u, u) accumulated term by term.
        let mut ln_binom = 0.0;
        Ok((0..=n_max - seen)
            .map(|u| {
                if u > 0 {
                    ln_binom += ((seen + u) as f64 / u as f64).ln();
                }
                ln_binom + weighted_ln(u as i64, ln_pi0) + abundance.ln_pmf(seen + u)
            })
            .collect())
    }
}
