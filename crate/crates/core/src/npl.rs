//! The Naive Parameter Learner on small parametric grammar spaces.
//!
//! A grammar is a bit-vector `σ` of `N` binary parameters. Grammars are listed
//! in canonical order: descending by the label read as a binary number with
//! `σ(1)` most significant, so the two-parameter order is `G11, G10, G01, G00`.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};

pub const MAX_PARAMS: usize = 8;
/// Tolerance for output distributions summing to 1.
pub const DIST_TOL: f64 = 1e-12;

/// One grammar of a [`ToyUgSpec`] in its serialized form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrammarEntry {
    /// Label such as `"10"`; character `i` is `σ(i + 1)`.
    pub sigma: String,
    pub parses: Vec<String>,
    pub generates: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    num_params: usize,
    strings: Vec<String>,
    grammars: Vec<GrammarEntry>,
}

/// A parametric grammar space: strings, parse table and per-grammar output distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct ToyUgSpec {
    num_params: usize,
    strings: Vec<String>,
    /// `parses[k][s]` for grammar `k` in canonical order.
    parses: Vec<Vec<bool>>,
    /// `output[k][s]`.
    output: Vec<Vec<f64>>,
}

impl ToyUgSpec {
    /// The two-parameter space over `N`, `DN`, `ND` (null determiner, head direction).
    pub fn toy_ug() -> Self {
        let g = |sigma: &str, parses: &[&str], generates: &[(&str, f64)]| GrammarEntry {
            sigma: sigma.into(),
            parses: parses.iter().map(|s| s.to_string()).collect(),
            generates: generates.iter().map(|(s, w)| (s.to_string(), *w)).collect(),
        };
        Self::from_entries(
            2,
            vec!["N".into(), "DN".into(), "ND".into()],
            vec![
                g("11", &["N", "DN"], &[("N", 0.5), ("DN", 0.5)]),
                g("10", &["N", "ND"], &[("N", 0.5), ("ND", 0.5)]),
                g("01", &["DN"], &[("DN", 1.0)]),
                g("00", &["ND"], &[("ND", 1.0)]),
            ],
        )
        .expect("preset is valid")
    }

    pub fn from_entries(
        num_params: usize,
        strings: Vec<String>,
        grammars: Vec<GrammarEntry>,
    ) -> Result<Self> {
        Self::try_from(RawSpec {
            num_params,
            strings,
            grammars,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidGrammarSpace(e.to_string()))
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn num_grammars(&self) -> usize {
        1 << self.num_params
    }

    pub fn strings(&self) -> &[String] {
        &self.strings
    }

    /// Labels in canonical order.
    pub fn grammar_labels(&self) -> Vec<String> {
        (0..self.num_grammars())
            .map(|k| label(&sigma_of(k, self.num_params)))
            .collect()
    }

    pub fn parses(&self, grammar: usize, string: usize) -> bool {
        self.parses[grammar][string]
    }

    pub fn output_distribution(&self, grammar: usize) -> &[f64] {
        &self.output[grammar]
    }
}

impl TryFrom<RawSpec> for ToyUgSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidGrammarSpace(msg));
        let n = raw.num_params;
        if n == 0 || n > MAX_PARAMS {
            return bad(format!("num_params must be in 1..={MAX_PARAMS}, got {n}"));
        }
        let index: BTreeMap<&str, usize> = raw
            .strings
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        if index.len() != raw.strings.len() || raw.strings.is_empty() {
            return bad("strings must be non-empty and unique".into());
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::InvalidGrammarSpace(format!("unknown string `{s}`")))
        };
        let m = 1usize << n;
        let mut parses: Vec<Option<Vec<bool>>> = vec![None; m];
        let mut output = vec![Vec::new(); m];
        for entry in &raw.grammars {
            let sigma = parse_label(&entry.sigma, n)?;
            let k = canonical_index(&sigma);
            if parses[k].is_some() {
                return bad(format!("grammar `{}` listed twice", entry.sigma));
            }
            let mut row = vec![false; raw.strings.len()];
            for s in &entry.parses {
                row[lookup(s)?] = true;
            }
            let mut dist = vec![0.0; raw.strings.len()];
            for (s, &w) in &entry.generates {
                let i = lookup(s)?;
                if !(w >= 0.0 && w <= 1.0) {
                    return bad(format!("grammar `{}`: weight {w} for `{s}`", entry.sigma));
                }
                if w > 0.0 && !row[i] {
                    return bad(format!(
                        "grammar `{}` generates `{s}` but does not parse it",
                        entry.sigma
                    ));
                }
                dist[i] = w;
            }
            let total: f64 = dist.iter().sum();
            if (total - 1.0).abs() > DIST_TOL {
                return bad(format!(
                    "grammar `{}` output distribution sums to {total}",
                    entry.sigma
                ));
            }
            parses[k] = Some(row);
            output[k] = dist;
        }
        let parses = parses
            .into_iter()
            .enumerate()
            .map(|(k, row)| {
                row.ok_or_else(|| {
                    Error::InvalidGrammarSpace(format!(
                        "grammar `{}` missing",
                        label(&sigma_of(k, n))
                    ))
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            num_params: n,
            strings: raw.strings,
            parses,
            output,
        })
    }
}

impl From<ToyUgSpec> for RawSpec {
    fn from(spec: ToyUgSpec) -> Self {
        let grammars = (0..spec.num_grammars())
            .map(|k| GrammarEntry {
                sigma: label(&sigma_of(k, spec.num_params)),
                parses: spec
                    .strings
                    .iter()
                    .zip(&spec.parses[k])
                    .filter(|(_, &p)| p)
                    .map(|(s, _)| s.clone())
                    .collect(),
                generates: spec
                    .strings
                    .iter()
                    .zip(&spec.output[k])
                    .filter(|(_, &w)| w > 0.0)
                    .map(|(s, &w)| (s.clone(), w))
                    .collect(),
            })
            .collect();
        RawSpec {
            num_params: spec.num_params,
            strings: spec.strings,
            grammars,
        }
    }
}

/// Parameter bits of the grammar at canonical position `k`.
pub fn sigma_of(k: usize, n: usize) -> Vec<bool> {
    let value = (1usize << n) - 1 - k;
    (0..n).map(|i| (value >> (n - 1 - i)) & 1 == 1).collect()
}

/// Canonical position of the grammar with parameter bits `sigma`.
pub fn canonical_index(sigma: &[bool]) -> usize {
    let n = sigma.len();
    let value = sigma.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    (1usize << n) - 1 - value
}

fn label(sigma: &[bool]) -> String {
    sigma.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn parse_label(s: &str, n: usize) -> Result<Vec<bool>> {
    if s.len() != n {
        return Err(Error::InvalidGrammarSpace(format!(
            "label `{s}` must have {n} digits"
        )));
    }
    s.chars()
        .map(|c| match c {
            '1' => Ok(true),
            '0' => Ok(false),
            _ => Err(Error::InvalidGrammarSpace(format!("bad label `{s}`"))),
        })
        .collect()
}

/// Parameter probabilities together with a learning rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamState {
    pub xi: Vec<f64>,
    pub gamma: f64,
}

impl ParamState {
    pub fn new(xi: Vec<f64>, gamma: f64) -> Result<Self> {
        check_params(&xi)?;
        check_gamma(gamma)?;
        Ok(Self { xi, gamma })
    }

    /// The initial learner state: every `ξ_i = 0.5`.
    pub fn initial(n: usize, gamma: f64) -> Result<Self> {
        Self::new(vec![0.5; n], gamma)
    }
}

fn check_params(x: &[f64]) -> Result<()> {
    if x.is_empty() || x.len() > MAX_PARAMS {
        return Err(Error::InvalidGrammarSpace(format!(
            "expected 1..={MAX_PARAMS} parameters, got {}",
            x.len()
        )));
    }
    match x.iter().find(|v| !(**v >= 0.0 && **v <= 1.0)) {
        Some(&v) => Err(Error::param("x", v, "parameter probabilities must lie in [0, 1]")),
        None => Ok(()),
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma >= 0.0 && gamma <= 1.0 {
        Ok(())
    } else {
        Err(Error::param("gamma", gamma, "must lie in [0, 1]"))
    }
}

fn check_spec_params(spec: &ToyUgSpec, x: &[f64]) -> Result<()> {
    check_params(x)?;
    if x.len() != spec.num_params {
        return Err(Error::DimensionMismatch {
            expected: spec.num_params,
            actual: x.len(),
        });
    }
    Ok(())
}

/// `P(G_σ) = Π x_i^σ(i) (1 − x_i)^(1 − σ(i))` in canonical order.
pub fn grammar_distribution(x: &[f64]) -> Result<Vec<f64>> {
    check_params(x)?;
    let n = x.len();
    Ok((0..1usize << n)
        .map(|k| {
            sigma_of(k, n)
                .iter()
                .zip(x)
                .map(|(&on, &xi)| if on { xi } else { 1.0 - xi })
                .product()
        })
        .collect())
}

/// Mixture `Σ_σ P(G_σ) · output(G_σ)` over the spec's strings.
pub fn string_distribution(spec: &ToyUgSpec, x: &[f64]) -> Result<Vec<f64>> {
    check_spec_params(spec, x)?;
    let weights = grammar_distribution(x)?;
    let mut dist = vec![0.0; spec.strings.len()];
    for (w, out) in weights.iter().zip(&spec.output) {
        for (d, o) in dist.iter_mut().zip(out) {
            *d += w * o;
        }
    }
    Ok(dist)
}

/// Penalty of each grammar (canonical order): `Σ_s P(s) · [G fails s]`.
pub fn npl_penalties(spec: &ToyUgSpec, x: &[f64]) -> Result<Vec<f64>> {
    let strings = string_distribution(spec, x)?;
    Ok(spec
        .parses
        .iter()
        .map(|row| {
            row.iter()
                .zip(&strings)
                .filter(|(&p, _)| !p)
                .map(|(_, &w)| w)
                .sum()
        })
        .collect())
}

/// Closed-form string probabilities `(P(N), P(DN), P(ND))` of the preset.
pub fn preset_string_distribution(x1: f64, x2: f64) -> [f64; 3] {
    let rest = 1.0 - 0.5 * x1;
    [0.5 * x1, x2 * rest, (1.0 - x2) * rest]
}

/// Closed-form penalties `(c(G11), c(G10), c(G01), c(G00))` of the preset.
pub fn preset_penalties(x1: f64, x2: f64) -> [f64; 4] {
    let rest = 1.0 - 0.5 * x1;
    [
        (1.0 - x2) * rest,
        x2 * rest,
        0.5 * x1 + (1.0 - x2) * rest,
        0.5 * x1 + x2 * rest,
    ]
}

/// Rewards parameter `i` when `parsed == σ(i)` and penalizes it otherwise.
pub fn npl_update(s: &ParamState, sigma: &[bool], parsed: bool) -> Result<ParamState> {
    if sigma.len() != s.xi.len() {
        return Err(Error::DimensionMismatch {
            expected: s.xi.len(),
            actual: sigma.len(),
        });
    }
    let mut next = s.clone();
    npl_step(&mut next.xi, s.gamma, sigma, parsed);
    Ok(next)
}

fn npl_step(xi: &mut [f64], gamma: f64, sigma: &[bool], parsed: bool) {
    for (v, &on) in xi.iter_mut().zip(sigma) {
        if on == parsed {
            *v += gamma * (1.0 - *v);
        } else {
            *v *= 1.0 - gamma;
        }
    }
}

fn check_schedule(gamma: f64, tokens: u64) -> Result<()> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::param("gamma", gamma, "must lie in (0, 1]"));
    }
    if tokens == 0 {
        return Err(Error::param("tokens", 0.0, "must be >= 1"));
    }
    Ok(())
}

/// Cumulative string distribution for inverse-CDF sampling.
fn cumulative(strings: &[f64]) -> Vec<f64> {
    strings
        .iter()
        .scan(0.0, |acc, &w| {
            *acc += w;
            Some(*acc)
        })
        .collect()
}

fn run_learner(spec: &ToyUgSpec, cdf: &[f64], gamma: f64, tokens: u64, r: &mut StreamRng) -> Vec<f64> {
    let n = spec.num_params;
    let last = cdf.len() - 1;
    let mut xi = vec![0.5; n];
    let mut sigma = vec![false; n];
    for _ in 0..tokens {
        let u: f64 = r.random::<f64>() * cdf[last];
        let s = cdf.iter().position(|&c| u < c).unwrap_or(last);
        for (bit, &v) in sigma.iter_mut().zip(&xi) {
            *bit = r.random::<f64>() < v;
        }
        let parsed = spec.parses[canonical_index(&sigma)][s];
        npl_step(&mut xi, gamma, &sigma, parsed);
    }
    xi
}

/// One learner starting from `ξ = 0.5` and exposed to `tokens` strings from population `x`.
pub fn simulate_npl_learner(
    spec: &ToyUgSpec,
    x: &[f64],
    gamma: f64,
    tokens: u64,
    seed: u64,
) -> Result<ParamState> {
    check_spec_params(spec, x)?;
    check_schedule(gamma, tokens)?;
    let cdf = cumulative(&string_distribution(spec, x)?);
    let xi = run_learner(spec, &cdf, gamma, tokens, &mut rng::stream(seed, &[]));
    Ok(ParamState { xi, gamma })
}

/// Independent learners against a fixed population; learner `l` uses stream `[l]`.
pub fn npl_ensemble(
    spec: &ToyUgSpec,
    x: &[f64],
    schedule: &NplSchedule,
) -> Result<Vec<ParamState>> {
    check_spec_params(spec, x)?;
    schedule.check()?;
    Ok(run_ensemble(spec, x, schedule, None))
}

fn run_ensemble(
    spec: &ToyUgSpec,
    x: &[f64],
    schedule: &NplSchedule,
    generation: Option<u64>,
) -> Vec<ParamState> {
    let cdf = cumulative(&string_distribution(spec, x).expect("inputs checked"));
    (0..schedule.learners)
        .into_par_iter()
        .map(|l| {
            let mut r = match generation {
                Some(g) => rng::stream(schedule.seed, &[g, l as u64]),
                None => rng::stream(schedule.seed, &[l as u64]),
            };
            ParamState {
                xi: run_learner(spec, &cdf, schedule.gamma, schedule.tokens, &mut r),
                gamma: schedule.gamma,
            }
        })
        .collect()
}

pub fn mean_params(learners: &[ParamState]) -> Vec<f64> {
    let n = learners.first().map_or(0, |s| s.xi.len());
    let mut mean = vec![0.0; n];
    for s in learners {
        for (m, v) in mean.iter_mut().zip(&s.xi) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= learners.len() as f64);
    mean
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NplSchedule {
    pub gamma: f64,
    pub tokens: u64,
    /// Learners per generation; 1 gives the single-learner chain.
    pub learners: usize,
    pub seed: u64,
}

impl Default for NplSchedule {
    fn default() -> Self {
        Self {
            gamma: 0.01,
            tokens: 100_000,
            learners: 100,
            seed: 0,
        }
    }
}

impl NplSchedule {
    fn check(&self) -> Result<()> {
        check_schedule(self.gamma, self.tokens)?;
        if self.learners == 0 {
            return Err(Error::param("learners", 0.0, "must be >= 1"));
        }
        Ok(())
    }
}

/// Population parameter probabilities per generation, starting with `x0`.
pub fn npl_generations(
    spec: &ToyUgSpec,
    x0: &[f64],
    generations: usize,
    schedule: &NplSchedule,
) -> Result<Vec<Vec<f64>>> {
    npl_generations_with(spec, x0, generations, schedule, |_, _| {})
}

/// As [`npl_generations`], handing each generation's learners to `observe`.
pub fn npl_generations_with<F>(
    spec: &ToyUgSpec,
    x0: &[f64],
    generations: usize,
    schedule: &NplSchedule,
    mut observe: F,
) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(usize, &[ParamState]),
{
    check_spec_params(spec, x0)?;
    schedule.check()?;
    let mut states = vec![x0.to_vec()];
    for g in 1..=generations {
        let learners = run_ensemble(spec, states.last().unwrap(), schedule, Some(g as u64));
        observe(g, &learners);
        states.push(mean_params(&learners));
    }
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn grid(k: usize) -> impl Iterator<Item = (f64, f64)> {
        (0..k).flat_map(move |i| {
            (0..k).map(move |j| (i as f64 / (k - 1) as f64, j as f64 / (k - 1) as f64))
        })
    }

    #[test]
    fn grammar_distribution_examples() {
        assert_eq!(grammar_distribution(&[1.0, 1.0]).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        assert!((grammar_distribution(&[0.99, 0.99]).unwrap()[0] - 0.9801).abs() < 1e-15);
        assert_eq!(grammar_distribution(&[0.5, 0.5]).unwrap(), vec![0.25; 4]);
        for (x1, x2) in grid(50) {
            let s: f64 = grammar_distribution(&[x1, x2]).unwrap().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn canonical_order() {
        let spec = ToyUgSpec::toy_ug();
        assert_eq!(spec.grammar_labels(), vec!["11", "10", "01", "00"]);
        for k in 0..8 {
            assert_eq!(canonical_index(&sigma_of(k, 3)), k);
        }
    }

    #[test]
    fn string_distribution_examples() {
        let spec = ToyUgSpec::toy_ug();
        assert_eq!(string_distribution(&spec, &[1.0, 1.0]).unwrap(), vec![0.5, 0.5, 0.0]);
        assert_eq!(string_distribution(&spec, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0, 1.0]);
        assert_eq!(string_distribution(&spec, &[1.0, 0.0]).unwrap(), vec![0.5, 0.0, 0.5]);
    }

    #[test]
    fn closed_forms_match_mixture_on_grid() {
        let spec = ToyUgSpec::toy_ug();
        for (x1, x2) in grid(50) {
            let mix = string_distribution(&spec, &[x1, x2]).unwrap();
            let closed = preset_string_distribution(x1, x2);
            for (a, b) in mix.iter().zip(closed) {
                assert!((a - b).abs() < 1e-12);
            }
            assert!((mix.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let c = npl_penalties(&spec, &[x1, x2]).unwrap();
            for (a, b) in c.iter().zip(preset_penalties(x1, x2)) {
                assert!((a - b).abs() < 1e-12, "x = ({x1}, {x2})");
            }
        }
    }

    #[test]
    fn penalty_examples() {
        let spec = ToyUgSpec::toy_ug();
        assert_eq!(npl_penalties(&spec, &[1.0, 1.0]).unwrap(), vec![0.0, 0.5, 0.5, 1.0]);
        assert_eq!(preset_penalties(1.0, 1.0), [0.0, 0.5, 0.5, 1.0]);
        assert_eq!(npl_penalties(&spec, &[0.0, 1.0]).unwrap(), vec![0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn update_examples() {
        let s = ParamState::new(vec![0.5, 0.5], 0.1).unwrap();
        let up = npl_update(&s, &[true, false], true).unwrap();
        assert!((up.xi[0] - 0.55).abs() < 1e-15 && (up.xi[1] - 0.45).abs() < 1e-15);
        let down = npl_update(&s, &[true, false], false).unwrap();
        assert!((down.xi[0] - 0.45).abs() < 1e-15 && (down.xi[1] - 0.55).abs() < 1e-15);
        let frozen = ParamState::new(vec![0.3, 0.8], 0.0).unwrap();
        assert_eq!(npl_update(&frozen, &[false, true], true).unwrap(), frozen);
        assert!(npl_update(&s, &[true], true).is_err());
    }

    #[test]
    fn random_updates_stay_in_unit_interval() {
        let mut r = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(3);
        let mut s = ParamState::new(vec![0.5, 0.5, 0.5], 0.0).unwrap();
        for _ in 0..1_000_000 {
            s.gamma = r.random();
            let sigma: Vec<bool> = (0..3).map(|_| r.random()).collect();
            s = npl_update(&s, &sigma, r.random()).unwrap();
            assert!(s.xi.iter().all(|v| (0.0..=1.0).contains(v)), "{:?}", s.xi);
        }
    }

    #[test]
    fn spec_validation() {
        let ok = ToyUgSpec::toy_ug();
        let json = serde_json::to_string(&ok).unwrap();
        assert_eq!(ToyUgSpec::from_json_str(&json).unwrap(), ok);
        let raw: RawSpec = ok.into();
        let mut missing = raw.clone();
        missing.grammars.pop();
        assert!(ToyUgSpec::try_from(missing).is_err());
        let mut unparsed = raw.clone();
        unparsed.grammars[2].generates.insert("N".into(), 0.0);
        unparsed.grammars[2].generates.insert("ND".into(), 0.5);
        assert!(ToyUgSpec::try_from(unparsed).is_err());
        let mut short = raw.clone();
        short.grammars[0].generates.insert("N".into(), 0.25);
        assert!(ToyUgSpec::try_from(short).is_err());
        let mut dup = raw;
        dup.grammars[3].sigma = "11".into();
        assert!(ToyUgSpec::try_from(dup).is_err());
    }

    #[test]
    fn learner_is_deterministic_given_seed() {
        let spec = ToyUgSpec::toy_ug();
        let a = simulate_npl_learner(&spec, &[0.7, 0.4], 0.01, 10_000, 9).unwrap();
        assert_eq!(a, simulate_npl_learner(&spec, &[0.7, 0.4], 0.01, 10_000, 9).unwrap());
        assert_ne!(a, simulate_npl_learner(&spec, &[0.7, 0.4], 0.01, 10_000, 10).unwrap());
    }

    #[test]
    fn learns_the_vertices() {
        let spec = ToyUgSpec::toy_ug();
        let hi = simulate_npl_learner(&spec, &[1.0, 1.0], 0.01, 100_000, 1).unwrap();
        assert!(hi.xi.iter().all(|&v| v > 0.95), "{:?}", hi.xi);
        let lo = simulate_npl_learner(&spec, &[0.0, 0.0], 0.01, 100_000, 1).unwrap();
        assert!(lo.xi.iter().all(|&v| v < 0.05), "{:?}", lo.xi);
    }

    #[test]
    fn near_vertex_population_is_not_reproduced() {
        let spec = ToyUgSpec::toy_ug();
        let learners = npl_ensemble(&spec, &[0.99, 0.99], &NplSchedule::default()).unwrap();
        let mean = mean_params(&learners);
        assert!(mean.iter().any(|&m| 1.0 - m >= 0.02), "{mean:?}");
    }

    #[test]
    fn relabeling_symmetry() {
        // Flip every parameter: G11 <-> G00, G10 <-> G01, DN <-> ND.
        let spec = ToyUgSpec::toy_ug();
        let flipped = ToyUgSpec::from_entries(
            2,
            vec!["N".into(), "DN".into(), "ND".into()],
            RawSpec::from(spec.clone())
                .grammars
                .into_iter()
                .map(|g| {
                    let swap = |s: &String| match s.as_str() {
                        "DN" => "ND".to_string(),
                        "ND" => "DN".to_string(),
                        _ => s.clone(),
                    };
                    GrammarEntry {
                        sigma: g.sigma.chars().map(|c| if c == '1' { '0' } else { '1' }).collect(),
                        parses: g.parses.iter().map(swap).collect(),
                        generates: g.generates.iter().map(|(s, w)| (swap(s), *w)).collect(),
                    }
                })
                .collect(),
        )
        .unwrap();
        let schedule = NplSchedule {
            tokens: 20_000,
            ..NplSchedule::default()
        };
        for x in [[0.8, 0.6], [0.3, 0.9]] {
            let a = mean_params(&npl_ensemble(&spec, &x, &schedule).unwrap());
            let y = [1.0 - x[0], 1.0 - x[1]];
            let b = mean_params(
                &npl_ensemble(&flipped, &y, &NplSchedule { seed: 1, ..schedule }).unwrap(),
            );
            for i in 0..2 {
                assert!((a[i] - (1.0 - b[i])).abs() < 0.02, "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn generations_zero_is_start() {
        let spec = ToyUgSpec::toy_ug();
        let xs = npl_generations(&spec, &[0.3, 0.6], 0, &NplSchedule::default()).unwrap();
        assert_eq!(xs, vec![vec![0.3, 0.6]]);
        let bad = NplSchedule {
            learners: 0,
            ..NplSchedule::default()
        };
        assert!(npl_generations(&spec, &[0.3, 0.6], 1, &bad).is_err());
        assert!(npl_generations(&spec, &[0.3], 1, &NplSchedule::default()).is_err());
        assert!(npl_generations(&spec, &[1.3, 0.5], 1, &NplSchedule::default()).is_err());
    }

    proptest! {
        #[test]
        fn update_preserves_range(
            xi in prop::collection::vec(0.0f64..=1.0, 1..=8),
            gamma in 0.0f64..=1.0,
            bits in any::<u8>(),
            parsed: bool,
        ) {
            let sigma: Vec<bool> = (0..xi.len()).map(|i| (bits >> i) & 1 == 1).collect();
            let s = ParamState::new(xi, gamma).unwrap();
            let next = npl_update(&s, &sigma, parsed).unwrap();
            prop_assert!(next.xi.iter().all(|v| (0.0..=1.0).contains(v)));
        }

        #[test]
        fn generic_penalties_match_closed_form(x1 in 0.0f64..=1.0, x2 in 0.0f64..=1.0) {
            let c = npl_penalties(&ToyUgSpec::toy_ug(), &[x1, x2]).unwrap();
            for (a, b) in c.iter().zip(preset_penalties(x1, x2)) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
