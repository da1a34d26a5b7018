//! Metropolis–Hastings updates of the latent counts inside a Gibbs loop over
//! `(x, θ)`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiber::error_count;
use crate::mass::{LatentModel, MassModel, Theta};
use crate::matrix::Fingerprint;
use crate::models::Family;
use crate::moves::{MoveSet, Provenance};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveSelection {
    /// One proposal per sweep with the move drawn uniformly.
    #[default]
    UniformRandom,
    /// One proposal per move per sweep, in move order.
    Cycle,
}

fn one() -> u64 {
    1
}

fn one_u32() -> u32 {
    1
}

/// Chain settings. Iteration `i` (1-based) is recorded when `i > burn_in`
/// and `(i − burn_in)` is a multiple of `thinning`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub iterations: u64,
    #[serde(default)]
    pub burn_in: u64,
    #[serde(default = "one")]
    pub thinning: u64,
    pub seed: u64,
    #[serde(default)]
    pub selection: MoveSelection,
    /// `c` is drawn uniformly from `{−C, …, −1, 1, …, C}`.
    #[serde(default = "one_u32")]
    pub coefficient_cap: u32,
    /// Per-move overrides of `coefficient_cap`.
    #[serde(default)]
    pub move_caps: Option<Vec<u32>>,
    /// x-update sweeps between consecutive θ updates.
    #[serde(default = "one_u32")]
    pub sweeps_per_iteration: u32,
    /// Field names; see [`RecordField::parse`].
    #[serde(default)]
    pub record: Vec<String>,
    /// Count visits to each distinct recorded state.
    #[serde(default)]
    pub track_states: bool,
    /// Starting θ; drawn from the prior when absent.
    #[serde(default)]
    pub initial_theta: Option<Theta>,
}

impl SamplerConfig {
    pub fn new(iterations: u64, seed: u64) -> Self {
        SamplerConfig {
            iterations,
            burn_in: 0,
            thinning: 1,
            seed,
            selection: MoveSelection::UniformRandom,
            coefficient_cap: 1,
            move_caps: None,
            sweeps_per_iteration: 1,
            record: Vec::new(),
            track_states: false,
            initial_theta: None,
        }
    }

    pub fn validate(&self, n_moves: usize) -> Result<()> {
        if self.iterations < self.burn_in {
            return Err(Error::Config(format!("burn-in {} exceeds iterations {}", self.burn_in, self.iterations)));
        }
        if self.thinning == 0 {
            return Err(Error::Config("thinning must be at least 1".into()));
        }
        if self.coefficient_cap == 0 {
            return Err(Error::Config("coefficient cap must be at least 1".into()));
        }
        if self.sweeps_per_iteration == 0 {
            return Err(Error::Config("sweeps per iteration must be at least 1".into()));
        }
        if let Some(caps) = &self.move_caps {
            if caps.len() != n_moves {
                return Err(Error::Config(format!("{} move caps for {n_moves} moves", caps.len())));
            }
            if caps.contains(&0) {
                return Err(Error::Config("move caps must be at least 1".into()));
            }
        }
        Ok(())
    }

    /// Rows a run with this configuration emits.
    pub fn recorded_rows(&self) -> u64 {
        (self.iterations - self.burn_in) / self.thinning
    }

    fn cap(&self, k: usize) -> u32 {
        self.move_caps.as_ref().map_or(self.coefficient_cap, |c| c[k])
    }
}

/// A scalar recorded once per retained iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecordField {
    /// Population size: `Σx` under `mta` and uniform masses, the parameter
    /// `N` under model M_t.
    Abundance,
    /// `Σx`.
    Total,
    /// One coordinate of `x`, by column.
    Cell(usize),
    /// A named θ component (`p1`, …, `alpha`).
    Theta(String),
    /// Misidentification events carried by `x`.
    Errors,
    /// Accepted x-proposals in the iteration.
    Accepted,
}

impl RecordField {
    /// Accepts `N`, `total`, `x_<label>`, `errors`, `accepted` and θ
    /// component names.
    pub fn parse(name: &str, model: &LatentModel) -> Result<Self> {
        let spec = &model.spec;
        let field = match name {
            "N" => RecordField::Abundance,
            "total" => RecordField::Total,
            "errors" => {
                if !matches!(spec.family, Family::Mta { .. } | Family::BandMisread { .. }) {
                    return Err(Error::UnknownField(format!("errors (no error model for {})", spec.family.name())));
                }
                RecordField::Errors
            }
            "accepted" => RecordField::Accepted,
            _ => {
                if let Some(label) = name.strip_prefix("x_") {
                    let j = spec.column(label).ok_or_else(|| Error::UnknownField(name.into()))?;
                    RecordField::Cell(j)
                } else {
                    let known = match &model.mass {
                        MassModel::Uniform => false,
                        MassModel::Mta { .. } => {
                            name == "alpha" || parse_capture_index(name).is_some_and(|j| j < model.occasions())
                        }
                        MassModel::Mt { .. } => parse_capture_index(name).is_some_and(|j| j < model.occasions()),
                    };
                    if !known {
                        return Err(Error::UnknownField(name.into()));
                    }
                    RecordField::Theta(name.into())
                }
            }
        };
        Ok(field)
    }

    fn is_integer(&self) -> bool {
        !matches!(self, RecordField::Theta(_))
    }
}

fn parse_capture_index(name: &str) -> Option<usize> {
    let j: usize = name.strip_prefix('p')?.parse().ok()?;
    j.checked_sub(1)
}

/// Current position of a chain.
#[derive(Clone, Debug)]
pub struct ChainState {
    pub x: Vec<i64>,
    pub theta: Theta,
    pub iteration: u64,
    pub rng: ChaCha8Rng,
    cursor: usize,
    ln_pi: Vec<f64>,
    log_mass: f64,
    y: Vec<i64>,
}

impl ChainState {
    /// Checks the starting point and draws θ from the prior unless
    /// `config.initial_theta` is set.
    pub fn new(model: &LatentModel, config: &SamplerConfig, x: Vec<i64>) -> Result<Self> {
        let a = &model.spec.matrix;
        if x.len() != a.cols() {
            return Err(Error::Dimension { expected: a.cols(), found: x.len() });
        }
        if x.iter().any(|&v| v < 0) {
            return Err(Error::InfeasibleInit("negative entry in the initial state".into()));
        }
        let y = a.mul_vec(&x)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let theta = match &config.initial_theta {
            Some(t) => t.clone(),
            None => prior_theta(model, &x, &mut rng)?,
        };
        let ln_pi = model.ln_cell_probabilities(&theta)?;
        let log_mass = model.log_mass_with(&theta, &ln_pi, &x)?;
        if log_mass == f64::NEG_INFINITY {
            return Err(Error::InfeasibleInit("initial state has zero mass".into()));
        }
        Ok(ChainState { x, theta, iteration: 0, rng, cursor: 0, ln_pi, log_mass, y })
    }

    pub fn log_mass(&self) -> f64 {
        self.log_mass
    }

    /// The observed vector `A·x₀` the chain is confined to.
    pub fn y(&self) -> &[i64] {
        &self.y
    }
}

fn draw_beta(rng: &mut ChaCha8Rng, a: f64, b: f64) -> Result<f64> {
    let dist = Beta::new(a, b).map_err(|e| Error::InvalidModel(format!("Beta({a}, {b}): {e}")))?;
    Ok(dist.sample(rng))
}

/// Index drawn with probability proportional to `exp(ln_w)`.
fn draw_log_weighted(rng: &mut ChaCha8Rng, ln_w: &[f64]) -> usize {
    let max = ln_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = ln_w.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, &wi) in w.iter().enumerate() {
        if u < wi {
            return i;
        }
        u -= wi;
    }
    w.iter().rposition(|&wi| wi > 0.0).unwrap_or(0)
}

fn draw_abundance(model: &LatentModel, capture: &[f64], x: &[i64], rng: &mut ChaCha8Rng) -> Result<u64> {
    let seen: u64 = x.iter().map(|&v| v as u64).sum();
    let ln_w = model.abundance_log_weights(capture, seen)?;
    Ok(seen + draw_log_weighted(rng, &ln_w) as u64)
}

fn prior_theta(model: &LatentModel, x: &[i64], rng: &mut ChaCha8Rng) -> Result<Theta> {
    let k = model.occasions();
    match &model.mass {
        MassModel::Uniform => Ok(Theta::None),
        MassModel::Mta { capture, identification, .. } => Ok(Theta::Mta {
            capture: (0..k).map(|_| draw_beta(rng, capture.a, capture.b)).collect::<Result<_>>()?,
            identification: draw_beta(rng, identification.a, identification.b)?,
        }),
        MassModel::Mt { capture, .. } => {
            let p: Vec<f64> = (0..k).map(|_| draw_beta(rng, capture.a, capture.b)).collect::<Result<_>>()?;
            // N has no proper prior draw that respects N ≥ Σx, so it starts
            // from its full conditional.
            let n = draw_abundance(model, &p, x, rng)?;
            Ok(Theta::Mt { abundance: n, capture: p })
        }
    }
}

/// One proposal `x + c·a_k`, accepted with probability
/// `min(1, [x_cand|θ] / [x|θ])`; negative entries give mass zero. Returns
/// whether the proposal was accepted.
pub fn x_update(state: &mut ChainState, model: &LatentModel, moves: &MoveSet<i64>, config: &SamplerConfig) -> Result<bool> {
    if moves.is_empty() {
        return Err(Error::EmptyMoveSet);
    }
    let k = match config.selection {
        MoveSelection::UniformRandom => state.rng.random_range(0..moves.len()),
        MoveSelection::Cycle => {
            let k = state.cursor;
            state.cursor = (k + 1) % moves.len();
            k
        }
    };
    let cap = config.cap(k) as i64;
    let magnitude = if cap == 1 { 1 } else { state.rng.random_range(1..=cap) };
    let c = if state.rng.random::<bool>() { magnitude } else { -magnitude };

    let v = moves.get(k);
    let mut cand = Vec::with_capacity(state.x.len());
    for (&xi, &vi) in state.x.iter().zip(v) {
        cand.push(vi.checked_mul(c).and_then(|s| xi.checked_add(s)).ok_or(Error::Overflow)?);
    }
    let cand_mass = model.log_mass_with(&state.theta, &state.ln_pi, &cand)?;
    if cand_mass == f64::NEG_INFINITY {
        return Ok(false);
    }
    let diff = cand_mass - state.log_mass;
    let accept = diff >= 0.0 || state.rng.random::<f64>() < diff.exp();
    if accept {
        state.x = cand;
        state.log_mass = cand_mass;
    }
    Ok(accept)
}

/// One draw of θ from its full conditional given `x`.
pub fn theta_update(state: &mut ChainState, model: &LatentModel) -> Result<()> {
    let conds = model.beta_conditionals(&state.theta, &state.x)?;
    let k = model.occasions();
    let theta = match &model.mass {
        MassModel::Mta { .. } => Theta::Mta {
            capture: conds[..k].iter().map(|b| draw_beta(&mut state.rng, b.a, b.b)).collect::<Result<_>>()?,
            identification: draw_beta(&mut state.rng, conds[k].a, conds[k].b)?,
        },
        MassModel::Mt { .. } => {
            let p: Vec<f64> = conds.iter().map(|b| draw_beta(&mut state.rng, b.a, b.b)).collect::<Result<_>>()?;
            let n = draw_abundance(model, &p, &state.x, &mut state.rng)?;
            Theta::Mt { abundance: n, capture: p }
        }
        MassModel::Uniform => return Err(Error::UnsupportedFamily("parameter updates under a uniform mass".into())),
    };
    state.ln_pi = model.ln_cell_probabilities(&theta)?;
    state.log_mass = model.log_mass_with(&theta, &state.ln_pi, &state.x)?;
    state.theta = theta;
    Ok(())
}

fn check_feasible(state: &ChainState, model: &LatentModel) -> Result<()> {
    if model.spec.matrix.mul_vec(&state.x)? != state.y || state.x.iter().any(|&v| v < 0) {
        return Err(Error::NotInFiber);
    }
    Ok(())
}

/// Metadata written next to a chain's CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub config: SamplerConfig,
    pub family: Family,
    pub matrix_fingerprint: Fingerprint,
    pub moves_fingerprint: Fingerprint,
    pub moves_provenance: Provenance,
    pub moves: usize,
    pub mass: MassModel,
    pub initial_x: Vec<i64>,
    pub y: Vec<i64>,
    pub proposals: u64,
    pub accepted: u64,
    pub final_x: Vec<i64>,
}

/// Retained records of one chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainOutput {
    pub fields: Vec<String>,
    integer: Vec<bool>,
    pub iterations: Vec<u64>,
    /// `values[f][r]` is field `f` at record `r`.
    pub values: Vec<Vec<f64>>,
    /// Visit counts per distinct recorded `x`, when tracked.
    pub state_counts: Option<BTreeMap<Vec<i64>, u64>>,
    pub metadata: RunMetadata,
}

impl ChainOutput {
    pub fn len(&self) -> usize {
        self.iterations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterations.is_empty()
    }

    pub fn field(&self, name: &str) -> Result<&[f64]> {
        let i = self.fields.iter().position(|f| f == name).ok_or_else(|| Error::UnknownField(name.into()))?;
        Ok(&self.values[i])
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.metadata.proposals == 0 {
            0.0
        } else {
            self.metadata.accepted as f64 / self.metadata.proposals as f64
        }
    }

    /// CSV with an `iteration` column followed by the recorded fields.
    /// Integer fields are written exactly, θ components with 17
    /// significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["iteration".to_string()];
        header.extend(self.fields.iter().cloned());
        w.write_record(&header).map_err(csv_error)?;
        for (r, it) in self.iterations.iter().enumerate() {
            let mut rec = vec![it.to_string()];
            for (f, col) in self.values.iter().enumerate() {
                rec.push(if self.integer[f] { format!("{}", col[r] as i64) } else { format!("{:.16e}", col[r]) });
            }
            w.write_record(&rec).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn metadata_json(&self) -> String {
        serde_json::to_string_pretty(&self.metadata).expect("metadata serializes")
    }

    /// Writes `<prefix>.csv` and `<prefix>.json`.
    pub fn write(&self, prefix: impl AsRef<Path>) -> Result<()> {
        let prefix = prefix.as_ref();
        std::fs::write(prefix.with_extension("csv"), self.to_csv())?;
        std::fs::write(prefix.with_extension("json"), self.metadata_json() + "\n")?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Runs one chain from `init_x`. Identical inputs give identical output.
pub fn run_chain(model: &LatentModel, moves: &MoveSet<i64>, config: &SamplerConfig, init_x: &[i64]) -> Result<ChainOutput> {
    if moves.is_empty() {
        return Err(Error::EmptyMoveSet);
    }
    let fp = model.spec.matrix.fingerprint();
    if moves.fingerprint() != &fp {
        return Err(Error::FingerprintMismatch { left: fp.to_string(), right: moves.fingerprint().to_string() });
    }
    config.validate(moves.len())?;
    let fields: Vec<RecordField> = config.record.iter().map(|n| RecordField::parse(n, model)).collect::<Result<_>>()?;
    let mut state = ChainState::new(model, config, init_x.to_vec())?;

    let update_theta = !matches!(model.mass, MassModel::Uniform);
    let proposals_per_sweep = match config.selection {
        MoveSelection::UniformRandom => 1,
        MoveSelection::Cycle => moves.len(),
    };
    let check_every = if cfg!(debug_assertions) { 1 } else { 1000 };
    let rows = config.recorded_rows() as usize;
    let mut values = vec![Vec::with_capacity(rows); fields.len()];
    let mut iterations = Vec::with_capacity(rows);
    let mut state_counts = config.track_states.then(BTreeMap::new);
    let (mut proposals, mut accepted_total) = (0u64, 0u64);

    for it in 1..=config.iterations {
        let mut accepted = 0u64;
        for _ in 0..config.sweeps_per_iteration {
            for _ in 0..proposals_per_sweep {
                accepted += u64::from(x_update(&mut state, model, moves, config)?);
            }
        }
        proposals += u64::from(config.sweeps_per_iteration) * proposals_per_sweep as u64;
        accepted_total += accepted;
        if update_theta {
            theta_update(&mut state, model)?;
        }
        state.iteration = it;
        if it % check_every == 0 {
            check_feasible(&state, model)?;
        }
        if it > config.burn_in && (it - config.burn_in).is_multiple_of(config.thinning) {
            iterations.push(it);
            let comps = state.theta.components();
            for (f, field) in fields.iter().enumerate() {
                let v = match field {
                    RecordField::Abundance => match state.theta {
                        Theta::Mt { abundance, .. } => abundance as f64,
                        _ => state.x.iter().sum::<i64>() as f64,
                    },
                    RecordField::Total => state.x.iter().sum::<i64>() as f64,
                    RecordField::Cell(j) => state.x[*j] as f64,
                    RecordField::Theta(name) => comps
                        .iter()
                        .find(|(n, _)| n == name)
                        .map(|(_, v)| *v)
                        .ok_or_else(|| Error::UnknownField(name.clone()))?,
                    RecordField::Errors => error_count(&model.spec, &state.x)? as f64,
                    RecordField::Accepted => accepted as f64,
                };
                values[f].push(v);
            }
            if let Some(counts) = state_counts.as_mut() {
                *counts.entry(state.x.clone()).or_insert(0) += 1;
            }
        }
    }
    check_feasible(&state, model)?;

    let metadata = RunMetadata {
        seed: config.seed,
        config: config.clone(),
        family: model.spec.family,
        matrix_fingerprint: fp,
        moves_fingerprint: moves.fingerprint().clone(),
        moves_provenance: moves.provenance(),
        moves: moves.len(),
        mass: model.mass.clone(),
        initial_x: init_x.to_vec(),
        y: state.y.clone(),
        proposals,
        accepted: accepted_total,
        final_x: state.x.clone(),
    };
    Ok(ChainOutput {
        fields: config.record.clone(),
        integer: fields.iter().map(RecordField::is_integer).collect(),
        iterations,
        values,
        state_counts,
        metadata,
    })
}

/// Runs independent chains concurrently, one thread each; results come back
/// in input order.
pub fn run_chains(
    model: &LatentModel,
    moves: &MoveSet<i64>,
    chains: &[(SamplerConfig, Vec<i64>)],
) -> Vec<Result<ChainOutput>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = chains
            .iter()
            .map(|(config, x0)| s.spawn(move || run_chain(model, moves, config, x0)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("chain thread panicked")).collect()
    })
}
