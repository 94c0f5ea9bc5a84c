//! Per-UAV learners: the leaky-integrator echo state network, its
//! conventional (non-leaky) special case, and stateless Q-learning.
//!
//! All learners share [`Learner`] and are driven in lockstep by
//! [`learner_step`], which plays one round of the repeated game.

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Action, ActionCatalog, JointOutcome, World};
use crate::scalar::Real;

/// How [`select_action`] resolves equal maxima during exploitation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    Lowest,
    Random,
}

/// Leaky ESN hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EsnParams<T> {
    pub reservoir_size: usize,
    /// δ
    pub step_size: T,
    /// C
    pub time_constant: T,
    /// z
    pub leak_rate: T,
    /// λ, applied to the normalized feature vector.
    pub learning_rate: T,
    /// Half-width of the uniform input weight distribution.
    pub input_scale: T,
    /// Recurrent weights are scaled so that their largest singular value is
    /// `radius_scale * leak_rate`.
    pub radius_scale: T,
}

impl<T: Real> Default for EsnParams<T> {
    fn default() -> Self {
        Self {
            reservoir_size: 1000,
            step_size: T::lit(1.0),
            time_constant: T::lit(0.44),
            leak_rate: T::lit(0.04),
            learning_rate: T::lit(0.5),
            input_scale: T::lit(0.1),
            radius_scale: T::lit(0.1),
        }
    }
}

impl<T: Real> EsnParams<T> {
    /// Non-leaky network: δ = C = z = 1, so the update reduces to μ ← tanh(Wμ + W_in x).
    pub fn conventional(&self) -> Self {
        Self {
            step_size: T::one(),
            time_constant: T::one(),
            leak_rate: T::one(),
            radius_scale: T::lit(0.9),
            ..self.clone()
        }
    }

    /// 1 − δCz
    pub fn leak_coefficient(&self) -> T {
        T::one() - self.step_size * self.time_constant * self.leak_rate
    }

    pub fn validate(&self, section: &str) -> Result<()> {
        let key = |k: &str| format!("{section}.{k}");
        if self.reservoir_size == 0 {
            return Err(Error::config(key("reservoir_size"), "must be at least 1"));
        }
        let dcz = self.step_size * self.time_constant * self.leak_rate;
        if !(self.step_size > T::zero() && self.time_constant > T::zero() && self.leak_rate > T::zero()) {
            return Err(Error::config(key("leak_rate"), "step_size, time_constant and leak_rate must be positive"));
        }
        if dcz > T::one() {
            return Err(Error::config(key("leak_rate"), "step_size * time_constant * leak_rate must not exceed 1"));
        }
        if !(self.learning_rate > T::zero() && self.learning_rate.is_finite()) {
            return Err(Error::config(key("learning_rate"), "must be positive"));
        }
        if !(self.input_scale >= T::zero() && self.input_scale.is_finite()) {
            return Err(Error::config(key("input_scale"), "must be nonnegative"));
        }
        if !(self.radius_scale >= T::zero() && self.radius_scale < T::one()) {
            return Err(Error::config(key("radius_scale"), "must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Echo state network with leaky-integrator reservoir units and a linear
/// readout with one row per catalog action.
///
/// Matrices are dense, row-major.
#[derive(Clone, Debug)]
pub struct LeakyEsn<T> {
    n_w: usize,
    n_in: usize,
    n_actions: usize,
    /// N_w × (B + 1)
    pub w_in: Vec<T>,
    /// N_w × N_w
    pub w_rec: Vec<T>,
    /// |A| × (N_w + B + 1)
    pub w_out: Vec<T>,
    pub reservoir: Vec<T>,
    pub step_size: T,
    pub time_constant: T,
    pub leak_rate: T,
    pub learning_rate: T,
}

impl<T: Real> LeakyEsn<T> {
    /// Zero-weight network; useful for hand-built examples.
    pub fn zeros(n_w: usize, n_uavs: usize, n_actions: usize, params: &EsnParams<T>) -> Self {
        let n_in = n_uavs + 1;
        Self {
            n_w,
            n_in,
            n_actions,
            w_in: vec![T::zero(); n_w * n_in],
            w_rec: vec![T::zero(); n_w * n_w],
            w_out: vec![T::zero(); n_actions * (n_w + n_in)],
            reservoir: vec![T::zero(); n_w],
            step_size: params.step_size,
            time_constant: params.time_constant,
            leak_rate: params.leak_rate,
            learning_rate: params.learning_rate,
        }
    }

    /// Random input and recurrent weights, zero readout and reservoir.
    pub fn new(params: &EsnParams<T>, n_uavs: usize, n_actions: usize, rng: &mut impl Rng) -> Result<Self> {
        params.validate("learner")?;
        if n_actions == 0 {
            return Err(Error::contract("LeakyEsn::new", "empty catalog"));
        }
        let n_w = params.reservoir_size;
        let mut esn = Self::zeros(n_w, n_uavs, n_actions, params);
        let scale = params.input_scale.to_f64_lossy();
        if scale > 0.0 {
            let d = Uniform::new_inclusive(-scale, scale);
            esn.w_in.iter_mut().for_each(|w| *w = T::lit(d.sample(rng)));
        }
        let d = Uniform::new_inclusive(-1.0, 1.0);
        esn.w_rec.iter_mut().for_each(|w| *w = T::lit(d.sample(rng)));
        let sigma = largest_singular_value(&esn.w_rec, n_w);
        let target = params.radius_scale * params.leak_rate;
        let factor = if sigma > T::zero() { target / sigma } else { T::zero() };
        esn.w_rec.iter_mut().for_each(|w| *w = *w * factor);
        Ok(esn)
    }

    pub fn reservoir_size(&self) -> usize {
        self.n_w
    }

    pub fn input_len(&self) -> usize {
        self.n_in
    }

    pub fn num_actions(&self) -> usize {
        self.n_actions
    }

    pub fn feature_len(&self) -> usize {
        self.n_w + self.n_in
    }

    pub fn leak_coefficient(&self) -> T {
        T::one() - self.step_size * self.time_constant * self.leak_rate
    }

    pub fn out_row(&self, a: usize) -> &[T] {
        let f = self.feature_len();
        &self.w_out[a * f..(a + 1) * f]
    }

    /// μ ← (1 − δCz)μ + δC·tanh(W μ + W_in x). Returns the new state.
    pub fn update_reservoir(&mut self, input: &[T]) -> Result<&[T]> {
        if input.len() != self.n_in {
            return Err(Error::contract(
                "esn_update_reservoir",
                format!("input has length {}, expected {}", input.len(), self.n_in),
            ));
        }
        let leak = self.leak_coefficient();
        let gain = self.step_size * self.time_constant;
        let next: Vec<T> = (0..self.n_w)
            .map(|i| {
                let pre = dot(&self.w_rec[i * self.n_w..(i + 1) * self.n_w], &self.reservoir)
                    + dot(&self.w_in[i * self.n_in..(i + 1) * self.n_in], input);
                leak * self.reservoir[i] + gain * pre.tanh()
            })
            .collect();
        debug_assert!(next.iter().all(|m| m.is_finite()), "reservoir diverged");
        self.reservoir = next;
        Ok(&self.reservoir)
    }

    /// [μ; x]
    pub fn features(&self, input: &[T]) -> Vec<T> {
        let mut phi = Vec::with_capacity(self.feature_len());
        phi.extend_from_slice(&self.reservoir);
        phi.extend_from_slice(input);
        phi
    }

    /// y = W_out [μ; x]
    pub fn estimate_utilities(&self, input: &[T]) -> Result<Vec<T>> {
        if input.len() != self.n_in {
            return Err(Error::contract(
                "esn_estimate_utilities",
                format!("input has length {}, expected {}", input.len(), self.n_in),
            ));
        }
        Ok(self.estimate_from_features(&self.features(input)))
    }

    pub fn estimate_from_features(&self, phi: &[T]) -> Vec<T> {
        (0..self.n_actions).map(|a| dot(self.out_row(a), phi)).collect()
    }

    /// row_a += rate·(û − y)·φ. Other rows are untouched.
    pub fn train_output(&mut self, action: usize, realized: T, estimate: T, phi: &[T], rate: T) -> Result<()> {
        if action >= self.n_actions {
            return Err(Error::contract("esn_train_output", format!("action {action} out of range")));
        }
        if phi.len() != self.feature_len() {
            return Err(Error::contract("esn_train_output", "feature length mismatch"));
        }
        let f = self.feature_len();
        let step = rate * (realized - estimate);
        for (w, &p) in self.w_out[a_range(action, f)].iter_mut().zip(phi) {
            *w = *w + step * p;
        }
        Ok(())
    }
}

fn a_range(a: usize, f: usize) -> std::ops::Range<usize> {
    a * f..(a + 1) * f
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Largest singular value of a square row-major matrix by power iteration on WᵀW.
pub fn largest_singular_value<T: Real>(w: &[T], n: usize) -> T {
    if n == 0 {
        return T::zero();
    }
    let mut v: Vec<T> = (0..n).map(|i| T::one() + T::lit(i as f64 / n as f64)).collect();
    let mut sigma = T::zero();
    for _ in 0..500 {
        let wv: Vec<T> = (0..n).map(|i| dot(&w[i * n..(i + 1) * n], &v)).collect();
        let mut wtwv = vec![T::zero(); n];
        for (i, &x) in wv.iter().enumerate() {
            for (j, out) in wtwv.iter_mut().enumerate() {
                *out = *out + w[i * n + j] * x;
            }
        }
        let norm = dot(&wtwv, &wtwv).sqrt();
        if norm == T::zero() {
            return T::zero();
        }
        let next = norm.sqrt();
        v = wtwv.into_iter().map(|x| x / norm).collect();
        let converged = (next - sigma).abs() <= T::lit(1e-12) * next;
        sigma = next;
        if converged {
            break;
        }
    }
    sigma
}

/// ε-greedy: exploit the best estimate with probability 1 − ε, otherwise
/// draw uniformly from the whole catalog.
pub fn select_action<T: Real>(estimates: &[T], epsilon: f64, tie: TieBreak, rng: &mut impl Rng) -> Result<usize> {
    if estimates.is_empty() {
        return Err(Error::contract("esn_select_action", "empty catalog"));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::contract("esn_select_action", format!("epsilon {epsilon} outside [0, 1]")));
    }
    if estimates.iter().any(|e| !e.is_finite()) {
        return Err(Error::contract("esn_select_action", "non-finite estimate"));
    }
    let n = estimates.len();
    if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
        return Ok(rng.gen_range(0..n));
    }
    let best = estimates.iter().copied().fold(T::neg_infinity(), T::max);
    Ok(match tie {
        TieBreak::Lowest => estimates.iter().position(|&e| e == best).unwrap_or(0),
        TieBreak::Random => {
            let ties: Vec<usize> = (0..n).filter(|&i| estimates[i] == best).collect();
            ties[rng.gen_range(0..ties.len())]
        }
    })
}

/// Stateless Q-table.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    pub values: Vec<f64>,
    pub learning_rate: f64,
}

impl QTable {
    pub fn new(n_actions: usize, learning_rate: f64) -> Self {
        Self {
            values: vec![0.0; n_actions],
            learning_rate,
        }
    }
}

/// Q[a] ← (1 − α)Q[a] + α·û
pub fn q_update(table: &mut QTable, action: usize, realized: f64) -> Result<()> {
    let alpha = table.learning_rate;
    let q = table
        .values
        .get_mut(action)
        .ok_or_else(|| Error::contract("q_update", format!("action {action} out of range")))?;
    *q = (1.0 - alpha) * *q + alpha * realized;
    Ok(())
}

/// Exploration rate over the horizon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EpsilonSchedule {
    Fixed(f64),
    /// Geometric interpolation from `start` at t = 0 to `end` at t = horizon − 1.
    Exponential { start: f64, end: f64, horizon: usize },
}

impl EpsilonSchedule {
    pub fn at(&self, t: usize) -> f64 {
        match *self {
            Self::Fixed(e) => e,
            Self::Exponential { start, end, horizon } => {
                if horizon <= 1 || start <= 0.0 {
                    return start;
                }
                let frac = (t.min(horizon - 1)) as f64 / (horizon - 1) as f64;
                start * (end / start).powf(frac)
            }
        }
    }
}

/// What a learner chose and what it expected to get.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Choice {
    pub action: usize,
    pub estimate: f64,
}

/// One UAV's learning agent.
pub trait Learner: Send {
    fn num_actions(&self) -> usize;

    /// Estimate, then select an action with exploration rate `epsilon`.
    fn choose(&mut self, epsilon: f64) -> Result<Choice>;

    /// Feed back the realized utility of `choice` and the indices every UAV
    /// played this round (own included).
    fn observe(&mut self, choice: Choice, realized: f64, indices: &[usize], catalog_sizes: &[usize]) -> Result<()>;
}

/// Strategy indices scaled to [0, 1) plus a constant bias entry.
pub fn normalized_input<T: Real>(indices: &[usize], catalog_sizes: &[usize]) -> Vec<T> {
    let mut x: Vec<T> = indices
        .iter()
        .zip(catalog_sizes)
        .map(|(&i, &n)| if n == 0 { T::zero() } else { T::lit(i as f64 / n as f64) })
        .collect();
    x.push(T::one());
    x
}

/// ESN-driven learner. The readout is trained with LMS on the features that
/// produced the estimate, using step λ/‖φ‖².
pub struct EsnLearner<T> {
    pub esn: LeakyEsn<T>,
    input: Vec<T>,
    features: Vec<T>,
    tie: TieBreak,
    rng: ChaCha8Rng,
}

impl<T: Real> EsnLearner<T> {
    /// Builds a learner for a game among `n_uavs` UAVs. Weights come from
    /// `init_seed`, exploration draws from `explore_seed`.
    pub fn new(params: &EsnParams<T>, n_uavs: usize, n_actions: usize, init_seed: u64, explore_seed: u64) -> Result<Self> {
        let mut init = ChaCha8Rng::seed_from_u64(init_seed);
        let esn = LeakyEsn::new(params, n_uavs, n_actions, &mut init)?;
        Ok(Self::from_esn(esn, explore_seed))
    }

    pub fn from_esn(esn: LeakyEsn<T>, explore_seed: u64) -> Self {
        let mut input = vec![T::zero(); esn.input_len()];
        *input.last_mut().expect("bias entry") = T::one();
        Self {
            esn,
            input,
            features: vec![],
            tie: TieBreak::Lowest,
            rng: ChaCha8Rng::seed_from_u64(explore_seed),
        }
    }

    pub fn with_tie_break(mut self, tie: TieBreak) -> Self {
        self.tie = tie;
        self
    }

    /// Current readout for every action, from the last observed input.
    pub fn estimates(&self) -> Vec<f64> {
        self.esn
            .estimate_from_features(&self.esn.features(&self.input))
            .into_iter()
            .map(|y| y.to_f64_lossy())
            .collect()
    }
}

impl<T: Real> Learner for EsnLearner<T> {
    fn num_actions(&self) -> usize {
        self.esn.num_actions()
    }

    fn choose(&mut self, epsilon: f64) -> Result<Choice> {
        self.features = self.esn.features(&self.input);
        let y = self.esn.estimate_from_features(&self.features);
        let action = select_action(&y, epsilon, self.tie, &mut self.rng)?;
        Ok(Choice {
            action,
            estimate: y[action].to_f64_lossy(),
        })
    }

    fn observe(&mut self, choice: Choice, realized: f64, indices: &[usize], catalog_sizes: &[usize]) -> Result<()> {
        let x = normalized_input::<T>(indices, catalog_sizes);
        self.esn.update_reservoir(&x)?;
        self.input = x;
        let norm = dot(&self.features, &self.features);
        let rate = self.esn.learning_rate / norm.max(T::lit(1e-12));
        self.esn.train_output(
            choice.action,
            T::lit(realized),
            T::lit(choice.estimate),
            &self.features,
            rate,
        )
    }
}

/// Stateless ε-greedy Q-learning.
pub struct QLearner {
    pub table: QTable,
    tie: TieBreak,
    rng: ChaCha8Rng,
}

impl QLearner {
    pub fn new(n_actions: usize, learning_rate: f64, explore_seed: u64) -> Self {
        Self {
            table: QTable::new(n_actions, learning_rate),
            tie: TieBreak::Lowest,
            rng: ChaCha8Rng::seed_from_u64(explore_seed),
        }
    }

    pub fn with_tie_break(mut self, tie: TieBreak) -> Self {
        self.tie = tie;
        self
    }
}

impl Learner for QLearner {
    fn num_actions(&self) -> usize {
        self.table.values.len()
    }

    fn choose(&mut self, epsilon: f64) -> Result<Choice> {
        let action = select_action(&self.table.values, epsilon, self.tie, &mut self.rng)?;
        Ok(Choice {
            action,
            estimate: self.table.values[action],
        })
    }

    fn observe(&mut self, choice: Choice, realized: f64, _: &[usize], _: &[usize]) -> Result<()> {
        q_update(&mut self.table, choice.action, realized)
    }
}

/// Plays a fixed catalog index; used for UAVs with nobody to serve and for
/// frozen opponents in tests.
pub struct FixedLearner {
    pub action: usize,
    pub n_actions: usize,
}

impl Learner for FixedLearner {
    fn num_actions(&self) -> usize {
        self.n_actions
    }

    fn choose(&mut self, _: f64) -> Result<Choice> {
        Ok(Choice {
            action: self.action,
            estimate: 0.0,
        })
    }

    fn observe(&mut self, _: Choice, _: f64, _: &[usize], _: &[usize]) -> Result<()> {
        Ok(())
    }
}

/// Result of one round for one UAV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub action: usize,
    pub utility: f64,
    pub estimate: f64,
}

impl StepRecord {
    pub fn estimate_error(&self) -> f64 {
        self.utility - self.estimate
    }
}

/// Everything that happened in one round.
#[derive(Clone, Debug)]
pub struct Round {
    pub records: Vec<StepRecord>,
    pub outcome: JointOutcome,
}

/// One synchronized round: every learner estimates and picks, indices are
/// exchanged, the joint action is evaluated, and every learner updates.
pub fn learner_step(
    learners: &mut [Box<dyn Learner>],
    catalogs: &[ActionCatalog],
    world: &World,
    epsilon: f64,
) -> Result<Round> {
    if learners.len() != catalogs.len() || learners.len() != world.num_uavs() {
        return Err(Error::contract("learner_step", "learners, catalogs and UAVs differ in number"));
    }
    let choices = learners
        .iter_mut()
        .map(|l| l.choose(epsilon))
        .collect::<Result<Vec<_>>>()?;
    let indices: Vec<usize> = choices.iter().map(|c| c.action).collect();
    let sizes: Vec<usize> = catalogs.iter().map(ActionCatalog::len).collect();
    let joint: Vec<&Action> = indices.iter().zip(catalogs).map(|(&i, c)| c.get(i)).collect();
    let outcome = world.evaluate(&joint)?;
    for ((learner, choice), &u) in learners.iter_mut().zip(&choices).zip(&outcome.utilities) {
        learner.observe(*choice, u, &indices, &sizes)?;
    }
    let records = choices
        .iter()
        .zip(&outcome.utilities)
        .map(|(c, &utility)| StepRecord {
            action: c.action,
            utility,
            estimate: c.estimate,
        })
        .collect();
    Ok(Round { records, outcome })
}
