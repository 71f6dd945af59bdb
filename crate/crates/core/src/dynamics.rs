//! Reliable-learner generational map and the stochastic linear reward–penalty learner.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::advantage::AdvantageMatrix;
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};
use crate::simplex::PopulationState;

/// One generation of reliable learners: `p_i' = Π_{j≠i} c_j / Σ_j Π_{k≠j} c_k`.
///
/// The product form stays exact at the vertices, where one penalty vanishes.
pub fn reliable_map(a: &AdvantageMatrix, p: &PopulationState) -> Result<PopulationState> {
    check_inputs(a, p)?;
    let mut out = vec![0.0; a.n()];
    map_into(a, p.as_slice(), &mut out);
    Ok(PopulationState::from_raw(out))
}

/// Reciprocal form `p_i' = c_i^{-1} / Σ_j c_j^{-1}`; defined only where every penalty is positive.
pub fn reliable_map_reciprocal(
    a: &AdvantageMatrix,
    p: &PopulationState,
) -> Result<PopulationState> {
    check_inputs(a, p)?;
    let c = a.penalties(p)?;
    if let Some(i) = c.as_slice().iter().position(|&v| v <= 0.0) {
        return Err(Error::param(
            "p",
            p[i],
            "reciprocal form requires every penalty to be positive",
        ));
    }
    let inv: Vec<f64> = c.as_slice().iter().map(|v| 1.0 / v).collect();
    let total: f64 = inv.iter().sum();
    Ok(PopulationState::from_raw(
        inv.into_iter().map(|v| v / total).collect(),
    ))
}

/// `p' − p`, componentwise.
pub fn increment(a: &AdvantageMatrix, p: &PopulationState) -> Result<Vec<f64>> {
    let next = reliable_map(a, p)?;
    Ok(next
        .as_slice()
        .iter()
        .zip(p.as_slice())
        .map(|(x, y)| x - y)
        .collect())
}

fn check_inputs(a: &AdvantageMatrix, p: &PopulationState) -> Result<()> {
    a.require_proper()?;
    if p.dim() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            actual: p.dim(),
        });
    }
    Ok(())
}

/// Evaluates the map without any checks. Works off the simplex too (used for
/// finite differences); yields NaN where the denominator vanishes.
pub(crate) fn map_into(a: &AdvantageMatrix, p: &[f64], out: &mut [f64]) {
    let n = a.n();
    let mut c = vec![0.0; n];
    a.penalties_into(p, &mut c);
    // The map is invariant under c -> λc; rescaling keeps the products away from underflow.
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale > 0.0 {
        c.iter_mut().for_each(|v| *v /= scale);
    }
    // out[i] = prod_{j<i} c_j * prod_{j>i} c_j
    let mut prefix = 1.0;
    for i in 0..n {
        out[i] = prefix;
        prefix *= c[i];
    }
    let mut suffix = 1.0;
    for i in (0..n).rev() {
        out[i] *= suffix;
        suffix *= c[i];
    }
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= total);
}

/// A time-ordered run of population states; `states[t]` is generation `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<PopulationState>,
    pub generations: usize,
}

impl Trajectory {
    pub fn last(&self) -> &PopulationState {
        self.states.last().expect("trajectory always holds its start state")
    }
}

pub fn trajectory(
    a: &AdvantageMatrix,
    p0: &PopulationState,
    generations: usize,
) -> Result<Trajectory> {
    if generations == 0 {
        return Err(Error::param("generations", 0.0, "must be >= 1"));
    }
    check_inputs(a, p0)?;
    let mut states = Vec::with_capacity(generations + 1);
    states.push(p0.clone());
    for _ in 0..generations {
        let next = reliable_map(a, states.last().unwrap())?;
        states.push(next);
    }
    Ok(Trajectory {
        states,
        generations,
    })
}

/// A learner's grammar probabilities `π` under linear reward–penalty learning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerState {
    pub pi: Vec<f64>,
    pub gamma: f64,
    pub tokens_seen: u64,
}

impl LearnerState {
    /// Uniform start `π_i = 1/n`.
    pub fn new(n: usize, gamma: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::BadShape { rows: n });
        }
        check_gamma(gamma, true)?;
        Ok(Self {
            pi: vec![1.0 / n as f64; n],
            gamma,
            tokens_seen: 0,
        })
    }

    pub fn with_pi(pi: Vec<f64>, gamma: f64) -> Result<Self> {
        if pi.len() < 2 {
            return Err(Error::BadShape { rows: pi.len() });
        }
        check_gamma(gamma, true)?;
        PopulationState::with_tolerance(pi.clone(), 1e-9)?;
        Ok(Self {
            pi,
            gamma,
            tokens_seen: 0,
        })
    }

    /// Applies one reward (`parsed`) or penalty step for the grammar the learner used.
    pub fn update(&mut self, chosen: usize, parsed: bool) -> Result<()> {
        let n = self.pi.len();
        if chosen >= n {
            return Err(Error::IndexOutOfRange {
                index: chosen,
                len: n,
            });
        }
        lrp_step(&mut self.pi, self.gamma, chosen, parsed);
        self.tokens_seen += 1;
        Ok(())
    }
}

/// Functional form of [`LearnerState::update`].
pub fn lrp_update(s: &LearnerState, chosen: usize, parsed: bool) -> Result<LearnerState> {
    let mut next = s.clone();
    next.update(chosen, parsed)?;
    Ok(next)
}

/// Success: `π_k += γ(1−π_k)`, `π_j *= 1−γ`.
/// Failure: `π_k *= 1−γ`, `π_j = γ/(n−1) + (1−γ)π_j`.
#[inline(always)]
fn lrp_step(pi: &mut [f64], gamma: f64, chosen: usize, parsed: bool) {
    let keep = 1.0 - gamma;
    if parsed {
        for v in pi.iter_mut() {
            *v *= keep;
        }
        pi[chosen] += gamma;
    } else {
        let share = gamma / (pi.len() - 1) as f64;
        for v in pi.iter_mut() {
            *v = share + keep * *v;
        }
        pi[chosen] -= share;
    }
}

fn check_gamma(gamma: f64, allow_zero: bool) -> Result<()> {
    let lower_ok = if allow_zero { gamma >= 0.0 } else { gamma > 0.0 };
    if !(lower_ok && gamma < 1.0) {
        return Err(Error::param("gamma", gamma, "learning rate must lie in (0, 1)"));
    }
    Ok(())
}

/// Per-grammar failure probability in a stationary environment `p`:
/// the chosen grammar `G_k` fails on a token from `G_g` with probability `a_kg`,
/// so overall it fails with probability `c_k = Σ_g a_kg p_g`.
fn failure_probabilities(a: &AdvantageMatrix, p: &PopulationState) -> Result<Vec<f64>> {
    let c = a.penalties(p)?;
    if let Some((k, &v)) = c
        .as_slice()
        .iter()
        .enumerate()
        .find(|(_, v)| !(0.0..=1.0 + 1e-12).contains(*v))
    {
        return Err(Error::InvalidMatrix(format!(
            "penalty of grammar {k} is {v}, outside [0, 1]"
        )));
    }
    Ok(c.0.into_iter().map(|v| v.min(1.0)).collect())
}

/// Learners stepped together by the token loop. Their updates are independent,
/// so interleaving them hides the latency of each learner's serial chain.
const LANES: usize = 4;

/// Runs one learner per generator for `tokens` steps; returns final `π` per learner.
///
/// Each token consumes one `u64` from the learner's generator: the high half
/// picks the grammar, the low half decides the parse.
fn run_learners(failure: &[f64], gamma: f64, tokens: u64, rngs: &mut [StreamRng]) -> Vec<Vec<f64>> {
    macro_rules! dispatch {
        ($($n:literal),*) => {
            match failure.len() {
                $($n => run_fixed::<$n>(failure.try_into().unwrap(), gamma, tokens, rngs),)*
                _ => run_dynamic(failure, gamma, tokens, rngs),
            }
        };
    }
    dispatch!(2, 3, 4, 5, 6, 7, 8)
}

const U32_SCALE: f64 = 1.0 / (1u64 << 32) as f64;

#[inline(always)]
fn split_uniforms(bits: u64) -> (f64, f64) {
    (
        (bits >> 32) as f64 * U32_SCALE,
        (bits & 0xffff_ffff) as f64 * U32_SCALE,
    )
}

fn run_fixed<const N: usize>(
    failure: &[f64; N],
    gamma: f64,
    tokens: u64,
    rngs: &mut [StreamRng],
) -> Vec<Vec<f64>> {
    let keep = 1.0 - gamma;
    let share = gamma / (N - 1) as f64;
    let mut out = Vec::with_capacity(rngs.len());
    for chunk in rngs.chunks_mut(LANES) {
        let mut pi = [[1.0 / N as f64; N]; LANES];
        let lanes = chunk.len();
        for _ in 0..tokens {
            for (lane, r) in chunk.iter_mut().enumerate() {
                let (u_choice, u_parse) = split_uniforms(r.next_u64());
                let p = &mut pi[lane];
                let mut k = 0usize;
                let mut acc = 0.0;
                for &v in &p[..N - 1] {
                    acc += v;
                    k += (u_choice >= acc) as usize;
                }
                let parsed = u_parse >= failure[k];
                let floor = if parsed { 0.0 } else { share };
                for v in p.iter_mut() {
                    *v = floor + keep * *v;
                }
                p[k] += if parsed { gamma } else { -share };
            }
        }
        out.extend(pi[..lanes].iter().map(|p| p.to_vec()));
    }
    out
}

fn run_dynamic(failure: &[f64], gamma: f64, tokens: u64, rngs: &mut [StreamRng]) -> Vec<Vec<f64>> {
    let n = failure.len();
    rngs.iter_mut()
        .map(|r| {
            let mut pi = vec![1.0 / n as f64; n];
            for _ in 0..tokens {
                let (u_choice, u_parse) = split_uniforms(r.next_u64());
                let mut k = 0usize;
                let mut acc = 0.0;
                for &v in &pi[..n - 1] {
                    acc += v;
                    k += (u_choice >= acc) as usize;
                }
                lrp_step(&mut pi, gamma, k, u_parse >= failure[k]);
            }
            pi
        })
        .collect()
}

fn check_schedule(gamma: f64, tokens: u64) -> Result<()> {
    check_gamma(gamma, false)?;
    if tokens == 0 {
        return Err(Error::param("tokens", 0.0, "must be >= 1"));
    }
    Ok(())
}

/// One LRP learner in the stationary environment `p`, starting from `π_i = 1/n`.
///
/// Each token is generated by `G_g ~ p`; the learner picks `G_k ~ π`, which fails
/// with probability `a_kg`. Marginalizing over `g`, this is a single Bernoulli
/// draw with probability `c_k`, which is how it is sampled.
pub fn simulate_lrp_learner(
    a: &AdvantageMatrix,
    p: &PopulationState,
    gamma: f64,
    tokens: u64,
    seed: u64,
) -> Result<LearnerState> {
    check_schedule(gamma, tokens)?;
    let failure = failure_probabilities(a, p)?;
    let pi = run_learners(&failure, gamma, tokens, &mut [rng::stream(seed, &[])])
        .pop()
        .unwrap();
    Ok(LearnerState {
        pi,
        gamma,
        tokens_seen: tokens,
    })
}

/// `learners` independent LRP learners in environment `p`; learner `l` uses stream `[l]`.
pub fn lrp_ensemble(
    a: &AdvantageMatrix,
    p: &PopulationState,
    gamma: f64,
    tokens: u64,
    learners: usize,
    seed: u64,
) -> Result<Vec<LearnerState>> {
    check_schedule(gamma, tokens)?;
    if learners == 0 {
        return Err(Error::param("learners", 0.0, "must be >= 1"));
    }
    let failure = failure_probabilities(a, p)?;
    Ok(run_ensemble(&failure, gamma, tokens, learners, seed, None))
}

fn run_ensemble(
    failure: &[f64],
    gamma: f64,
    tokens: u64,
    learners: usize,
    seed: u64,
    generation: Option<u64>,
) -> Vec<LearnerState> {
    let mut rngs: Vec<StreamRng> = (0..learners as u64)
        .map(|l| match generation {
            Some(g) => rng::stream(seed, &[g, l]),
            None => rng::stream(seed, &[l]),
        })
        .collect();
    rngs.par_chunks_mut(LANES)
        .flat_map_iter(|chunk| run_learners(failure, gamma, tokens, chunk))
        .map(|pi| LearnerState {
            pi,
            gamma,
            tokens_seen: tokens,
        })
        .collect()
}

/// Componentwise mean of the learners' final `π`, summed in learner order.
pub fn ensemble_mean(learners: &[LearnerState]) -> Vec<f64> {
    let n = learners[0].pi.len();
    let mut mean = vec![0.0; n];
    for s in learners {
        for (m, v) in mean.iter_mut().zip(&s.pi) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= learners.len() as f64);
    mean
}

/// Settings for stochastic generational runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StochasticSchedule {
    pub gamma: f64,
    pub tokens: u64,
    pub learners: usize,
    pub seed: u64,
}

impl Default for StochasticSchedule {
    fn default() -> Self {
        Self {
            gamma: 0.001,
            tokens: 1_000_000,
            learners: 1,
            seed: 0,
        }
    }
}

/// Generations of finite-sample LRP learners; each generation learns from the
/// previous one and the next state is the mean of its learners' final `π`.
pub fn generational_simulation(
    a: &AdvantageMatrix,
    p0: &PopulationState,
    generations: usize,
    schedule: &StochasticSchedule,
) -> Result<Trajectory> {
    generational_simulation_with(a, p0, generations, schedule, |_, _| {})
}

/// As [`generational_simulation`], calling `observe(generation, learners)` for
/// every generation's learner ensemble.
pub fn generational_simulation_with<F>(
    a: &AdvantageMatrix,
    p0: &PopulationState,
    generations: usize,
    schedule: &StochasticSchedule,
    mut observe: F,
) -> Result<Trajectory>
where
    F: FnMut(usize, &[LearnerState]),
{
    check_schedule(schedule.gamma, schedule.tokens)?;
    if schedule.learners == 0 {
        return Err(Error::param("learners", 0.0, "must be >= 1"));
    }
    if p0.dim() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            actual: p0.dim(),
        });
    }
    let mut states = vec![p0.clone()];
    for g in 1..=generations {
        let failure = failure_probabilities(a, states.last().unwrap())?;
        let learners = run_ensemble(
            &failure,
            schedule.gamma,
            schedule.tokens,
            schedule.learners,
            schedule.seed,
            Some(g as u64),
        );
        observe(g, &learners);
        states.push(PopulationState::normalized(ensemble_mean(&learners))?);
    }
    Ok(Trajectory {
        states,
        generations,
    })
}
