//! Advantage matrices: construction, validation and penalty probabilities.
//!
//! Entry `a_ij` is the probability of a sentence that grammar `G_j` parses
//! but `G_i` does not. The penalty probability of `G_i` in population state
//! `p` is `c_i = Σ_{j≠i} a_ij p_j`.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::PopulationState;

/// Residual tolerance for the three-grammar cyclical balance check.
pub const CYCLICAL_BALANCE_TOL: f64 = 1e-12;
/// Tolerance on the sum of region weights.
pub const REGION_SUM_TOL: f64 = 1e-9;
/// Largest grammar count for which region measures are enumerated.
pub const MAX_REGION_GRAMMARS: usize = 10;

/// Dense row-major `n×n` matrix of pairwise advantages.
#[derive(Debug, Clone, PartialEq)]
pub struct AdvantageMatrix {
    n: usize,
    entries: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    ZeroDiagonal,
    Range,
    CyclicalBalance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub indices: Vec<usize>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    /// All off-diagonal entries strictly positive.
    pub proper: bool,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return write!(f, "ok (proper = {})", self.proper);
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{:?} at {:?} (residual {:e})", v.rule, v.indices, v.residual)?;
        }
        Ok(())
    }
}

/// Penalty probabilities `c_i`, one per grammar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PenaltyVector(pub Vec<f64>);

impl PenaltyVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Index<usize> for PenaltyVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl AdvantageMatrix {
    /// Builds a matrix and requires it to pass [`validate`](Self::validate).
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = Self::unchecked(rows)?;
        let report = m.validate();
        if !report.ok {
            return Err(Error::InvalidMatrix(report.to_string()));
        }
        Ok(m)
    }

    /// Builds a matrix checking only its shape. Used for scaled or otherwise
    /// non-admissible matrices, on which the dynamics remain well defined.
    pub fn unchecked(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::BadShape { rows: n });
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self { n, entries })
    }

    /// Classical two-grammar system with advantages `a1` (of `G_1`) and `a2` (of `G_2`):
    /// `a_12 = a2`, `a_21 = a1`.
    pub fn two_grammar(a1: f64, a2: f64) -> Result<Self> {
        positive_probability("a1", a1)?;
        positive_probability("a2", a2)?;
        Self::new(vec![vec![0.0, a2], vec![a1, 0.0]])
    }

    /// All off-diagonal entries equal to `a`.
    pub fn babelian(n: usize, a: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::BadShape { rows: n });
        }
        positive_probability("a", a)?;
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { a }).collect())
            .collect();
        Self::new(rows)
    }

    /// Three-grammar symmetric system: `a12 = a21 = a`, `a13 = a31 = b`, `a23 = a32 = c`.
    pub fn symmetric(a: f64, b: f64, c: f64) -> Result<Self> {
        positive_probability("a", a)?;
        positive_probability("b", b)?;
        positive_probability("c", c)?;
        Self::new(vec![
            vec![0.0, a, b],
            vec![a, 0.0, c],
            vec![b, c, 0.0],
        ])
    }

    /// Canonical quasi-Babelian system: `G_1` has advantage `b` over each
    /// competitor, every other pairwise advantage is `a`.
    pub fn quasi_babelian(a: f64, b: f64) -> Result<Self> {
        positive_probability("a", a)?;
        positive_probability("b", b)?;
        Self::new(vec![
            vec![0.0, a, a],
            vec![b, 0.0, a],
            vec![b, a, 0.0],
        ])
    }

    /// `a_ij = Σ α_I` over regions `I` containing `j` but not `i`.
    pub fn from_regions(m: &RegionMeasure) -> Result<Self> {
        let n = m.n;
        let mut entries = vec![0.0; n * n];
        for (mask, &alpha) in m.weights.iter().enumerate().skip(1) {
            if alpha == 0.0 {
                continue;
            }
            for i in 0..n {
                if mask & (1 << i) != 0 {
                    continue;
                }
                for j in 0..n {
                    if mask & (1 << j) != 0 {
                        entries[i * n + j] += alpha;
                    }
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// `λA`, unchecked.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|v| v * lambda).collect(),
        }
    }

    pub fn is_proper(&self) -> bool {
        self.first_improper().is_none()
    }

    fn first_improper(&self) -> Option<(usize, usize, f64)> {
        (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j)
            .map(|(i, j)| (i, j, self.get(i, j)))
            .find(|&(_, _, v)| !(v > 0.0))
    }

    pub(crate) fn require_proper(&self) -> Result<()> {
        match self.first_improper() {
            Some((i, j, value)) => Err(Error::Improper { i, j, value }),
            None => Ok(()),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.n;
        let mut violations = Vec::new();
        for i in 0..n {
            let d = self.get(i, i);
            if d != 0.0 {
                violations.push(Violation {
                    rule: Rule::ZeroDiagonal,
                    indices: vec![i, i],
                    residual: d,
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let v = self.get(i, j);
                if !(0.0..=1.0).contains(&v) {
                    let residual = if v.is_nan() {
                        f64::NAN
                    } else if v < 0.0 {
                        v
                    } else {
                        v - 1.0
                    };
                    violations.push(Violation {
                        rule: Rule::Range,
                        indices: vec![i, j],
                        residual,
                    });
                }
            }
        }
        if n == 3 {
            let residual = self.cyclical_balance_residual();
            if !(residual.abs() <= CYCLICAL_BALANCE_TOL) {
                violations.push(Violation {
                    rule: Rule::CyclicalBalance,
                    indices: vec![0, 1, 2],
                    residual,
                });
            }
        }
        ValidationReport {
            ok: violations.is_empty(),
            violations,
            proper: self.is_proper(),
        }
    }

    /// `δ12 + δ23 + δ31` with `δ_ij = a_ji − a_ij`; only meaningful for `n = 3`.
    pub fn cyclical_balance_residual(&self) -> f64 {
        let d = |i: usize, j: usize| self.get(j, i) - self.get(i, j);
        d(0, 1) + d(1, 2) + d(2, 0)
    }

    pub fn penalties(&self, p: &PopulationState) -> Result<PenaltyVector> {
        if p.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: p.dim(),
            });
        }
        let mut c = vec![0.0; self.n];
        self.penalties_into(p.as_slice(), &mut c);
        Ok(PenaltyVector(c))
    }

    /// Unchecked penalty evaluation; also valid for points off the simplex.
    #[inline]
    pub(crate) fn penalties_into(&self, p: &[f64], out: &mut [f64]) {
        for (i, c) in out.iter_mut().enumerate() {
            let row = self.row(i);
            *c = row
                .iter()
                .zip(p)
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, (a, pj))| a * pj)
                .sum();
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: MatrixFile =
            serde_json::from_str(s).map_err(|e| Error::MatrixFile(e.to_string()))?;
        file.into_matrix()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({ "n": self.n, "entries": self.rows() })
    }
}

impl Serialize for AdvantageMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixFile {
            n: Some(self.n),
            entries: Some(self.rows()),
            regions: None,
        }
        .serialize(s)
    }
}

fn positive_probability(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0) {
        return Err(Error::param(name, v, "must be > 0"));
    }
    if v > 1.0 {
        return Err(Error::param(name, v, "must be <= 1"));
    }
    Ok(())
}

/// Probability weights `α_I` over the non-empty subsets `I` of the grammars:
/// `α_I` is the probability of a sentence parsed by exactly the grammars in `I`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMeasure {
    n: usize,
    /// Indexed by subset bitmask (bit `i` = grammar `i`); entry 0 is unused.
    weights: Vec<f64>,
}

impl RegionMeasure {
    /// `weights` is indexed by bitmask and must have length `2^n`.
    pub fn from_masks(n: usize, weights: Vec<f64>) -> Result<Self> {
        if !(1..=MAX_REGION_GRAMMARS).contains(&n) {
            return Err(Error::param("n", n as f64, "region measures need 1 <= n <= 10"));
        }
        if weights.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                actual: weights.len(),
            });
        }
        if weights[0] != 0.0 {
            return Err(Error::RegionKey("empty subset carries weight".into()));
        }
        if let Some(&v) = weights.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::param("alpha", v, "region weights must lie in [0, 1]"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > REGION_SUM_TOL {
            return Err(Error::RegionSum { sum });
        }
        Ok(Self { n, weights })
    }

    /// Builds from `(subset, α)` pairs where subsets hold 1-based grammar indices.
    pub fn from_subsets<I>(n: usize, subsets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        if !(1..=MAX_REGION_GRAMMARS).contains(&n) {
            return Err(Error::param("n", n as f64, "region measures need 1 <= n <= 10"));
        }
        let mut weights = vec![0.0; 1 << n];
        for (subset, alpha) in subsets {
            let mut mask = 0usize;
            for g in subset {
                if g == 0 || g > n {
                    return Err(Error::RegionKey(format!("grammar {g} outside 1..={n}")));
                }
                mask |= 1 << (g - 1);
            }
            if mask == 0 {
                return Err(Error::RegionKey("empty subset".into()));
            }
            weights[mask] += alpha;
        }
        Self::from_masks(n, weights)
    }

    /// Uniform draw from the simplex of region measures (flat Dirichlet).
    pub fn sample_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if !(1..=MAX_REGION_GRAMMARS).contains(&n) {
            return Err(Error::param("n", n as f64, "region measures need 1 <= n <= 10"));
        }
        let mut weights = vec![0.0; 1 << n];
        for w in weights.iter_mut().skip(1) {
            let u: f64 = rng.random();
            *w = -(1.0 - u).ln();
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self::from_masks(n, weights)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, mask: usize) -> f64 {
        self.weights[mask]
    }

    /// Region key for a bitmask, e.g. `0b101 -> "13"`.
    pub fn key(mask: usize, n: usize) -> String {
        let members: Vec<String> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| (i + 1).to_string())
            .collect();
        if n > 9 {
            members.join(",")
        } else {
            members.concat()
        }
    }

    /// Parses a key of sorted digits (`"12"`) or, for `n >= 10`, comma-separated indices.
    pub fn parse_key(key: &str) -> Result<Vec<usize>> {
        let parts: Vec<usize> = if key.contains(',') {
            key.split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::RegionKey(key.to_string()))?
        } else {
            key.chars()
                .map(|ch| ch.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::RegionKey(key.to_string()))?
        };
        if parts.is_empty() || parts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::RegionKey(key.to_string()));
        }
        Ok(parts)
    }

    fn to_key_map(&self) -> BTreeMap<String, f64> {
        (1..self.weights.len())
            .filter(|&m| self.weights[m] != 0.0)
            .map(|m| (Self::key(m, self.n), self.weights[m]))
            .collect()
    }
}

impl Serialize for RegionMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixFile {
            n: Some(self.n),
            entries: None,
            regions: Some(self.to_key_map()),
        }
        .serialize(s)
    }
}

/// On-disk form: `{"n": 3, "entries": [[...]]}` or `{"regions": {"1": α, "12": α, ...}}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regions: Option<BTreeMap<String, f64>>,
}

impl MatrixFile {
    fn into_matrix(self) -> Result<AdvantageMatrix> {
        match (self.entries, self.regions) {
            (Some(entries), None) => {
                if let Some(n) = self.n {
                    if n != entries.len() {
                        return Err(Error::MatrixFile(format!(
                            "n = {n} but entries has {} rows",
                            entries.len()
                        )));
                    }
                }
                AdvantageMatrix::new(entries)
            }
            (None, Some(regions)) => {
                let subsets = regions
                    .into_iter()
                    .map(|(k, v)| RegionMeasure::parse_key(&k).map(|s| (s, v)))
                    .collect::<Result<Vec<_>>>()?;
                let inferred = subsets
                    .iter()
                    .flat_map(|(s, _)| s.iter().copied())
                    .max()
                    .unwrap_or(0);
                let n = self.n.unwrap_or(inferred);
                let measure = RegionMeasure::from_subsets(n, subsets)?;
                AdvantageMatrix::from_regions(&measure)
            }
            _ => Err(Error::MatrixFile(
                "exactly one of \"entries\" or \"regions\" must be present".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn cyc(a12: f64, a21: f64, a23: f64, a32: f64, a31: f64, a13: f64) -> AdvantageMatrix {
        AdvantageMatrix::unchecked(vec![
            vec![0.0, a12, a13],
            vec![a21, 0.0, a23],
            vec![a31, a32, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn validate_balanced() {
        let r = cyc(0.3, 0.1, 0.2, 0.2, 0.1, 0.3).validate();
        assert!(r.ok);
        assert!(r.proper);
    }

    #[test]
    fn validate_unbalanced() {
        let r = cyc(0.3, 0.1, 0.2, 0.2, 0.1, 0.4).validate();
        assert!(!r.ok);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].rule, Rule::CyclicalBalance);
        assert!((r.violations[0].residual - 0.1).abs() < 1e-12);
    }

    #[test]
    fn validate_babelian_with_zero_entry() {
        let r = cyc(0.0, 0.1, 0.1, 0.1, 0.1, 0.1).validate();
        assert!(!r.ok);
        assert!(!r.proper);
        assert!((r.violations[0].residual - 0.1).abs() < 1e-12);
    }

    #[test]
    fn validate_flags_diagonal_and_range() {
        let m = AdvantageMatrix::unchecked(vec![vec![0.2, 1.5], vec![-0.1, 0.0]]).unwrap();
        let r = m.validate();
        assert!(!r.ok);
        let rules: Vec<Rule> = r.violations.iter().map(|v| v.rule).collect();
        assert_eq!(rules, vec![Rule::ZeroDiagonal, Rule::Range, Rule::Range]);
        assert!(!r.proper);
    }

    #[test]
    fn validate_skips_balance_for_n4() {
        let mut rows = vec![vec![0.1; 4]; 4];
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] = 0.0;
        }
        rows[0][1] = 0.9;
        assert!(AdvantageMatrix::unchecked(rows).unwrap().validate().ok);
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            AdvantageMatrix::unchecked(vec![vec![0.0]]),
            Err(Error::BadShape { rows: 1 })
        ));
        assert!(matches!(
            AdvantageMatrix::unchecked(vec![vec![0.0, 0.1], vec![0.1]]),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn regions_symmetric_measure_is_babelian() {
        let m = RegionMeasure::from_subsets(
            3,
            [
                (vec![1], 0.2),
                (vec![2], 0.2),
                (vec![3], 0.2),
                (vec![1, 2], 0.1),
                (vec![1, 3], 0.1),
                (vec![2, 3], 0.1),
                (vec![1, 2, 3], 0.1),
            ],
        )
        .unwrap();
        let a = AdvantageMatrix::from_regions(&m).unwrap();
        let b = AdvantageMatrix::babelian(3, 0.3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((a.get(i, j) - b.get(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn regions_two_grammar() {
        let (a1, a2) = (0.2, 0.1);
        let m = RegionMeasure::from_subsets(
            2,
            [(vec![1], a1), (vec![2], a2), (vec![1, 2], 1.0 - a1 - a2)],
        )
        .unwrap();
        let a = AdvantageMatrix::from_regions(&m).unwrap();
        assert_eq!(a.rows(), vec![vec![0.0, a2], vec![a1, 0.0]]);
    }

    #[test]
    fn regions_two_term_sum() {
        let m = RegionMeasure::from_subsets(
            3,
            [(vec![2], 0.1), (vec![2, 3], 0.05), (vec![1, 2, 3], 0.85)],
        )
        .unwrap();
        let a = AdvantageMatrix::from_regions(&m).unwrap();
        assert!((a.get(0, 1) - 0.15).abs() < 1e-15);
    }

    #[test]
    fn regions_reject_bad_sum() {
        let r = RegionMeasure::from_subsets(2, [(vec![1], 0.5), (vec![2], 0.4)]);
        assert!(matches!(r, Err(Error::RegionSum { .. })));
    }

    #[test]
    fn constructors() {
        let b = AdvantageMatrix::babelian(3, 0.1).unwrap();
        assert_eq!(
            (0..3)
                .flat_map(|i| (0..3).map(move |j| (i, j)))
                .filter(|(i, j)| i != j && b.get(*i, *j) == 0.1)
                .count(),
            6
        );
        assert_eq!(
            AdvantageMatrix::babelian(2, 0.5).unwrap().rows(),
            vec![vec![0.0, 0.5], vec![0.5, 0.0]]
        );
        assert!(AdvantageMatrix::babelian(3, 0.0).is_err());
        assert!(AdvantageMatrix::babelian(3, 1.2).is_err());

        let s = AdvantageMatrix::symmetric(0.05, 0.01, 0.02).unwrap();
        assert_eq!(s.get(0, 1), 0.05);
        assert_eq!(s.get(2, 0), 0.01);
        assert_eq!(s.get(2, 1), 0.02);
        assert_eq!(
            AdvantageMatrix::symmetric(0.1, 0.1, 0.1).unwrap(),
            AdvantageMatrix::babelian(3, 0.1).unwrap()
        );
        assert!(AdvantageMatrix::symmetric(1.0, 1.0, 1.0).is_ok());
        assert!(AdvantageMatrix::symmetric(0.0, 0.1, 0.1).is_err());

        assert_eq!(
            AdvantageMatrix::quasi_babelian(0.1, 0.1).unwrap(),
            AdvantageMatrix::babelian(3, 0.1).unwrap()
        );
        let q = AdvantageMatrix::quasi_babelian(0.1, 0.2).unwrap();
        assert_eq!(q.get(1, 0), 0.2);
        assert_eq!(q.get(2, 0), 0.2);
        assert_eq!(q.get(0, 1), 0.1);
        assert!(AdvantageMatrix::quasi_babelian(0.1, 0.05).is_ok());
        assert!(AdvantageMatrix::quasi_babelian(-0.1, 0.05).is_err());
    }

    #[test]
    fn penalty_examples() {
        let two = AdvantageMatrix::two_grammar(0.2, 0.1).unwrap();
        let c = two.penalties(&PopulationState::uniform(2)).unwrap();
        assert!((c[0] - 0.05).abs() < 1e-15);
        assert!((c[1] - 0.10).abs() < 1e-15);

        let b = AdvantageMatrix::babelian(3, 0.1).unwrap();
        let c = b.penalties(&PopulationState::vertex(3, 0).unwrap()).unwrap();
        assert_eq!(c.as_slice(), &[0.0, 0.1, 0.1]);
        let c = b.penalties(&PopulationState::uniform(3)).unwrap();
        for v in c.as_slice() {
            assert!((v - 1.0 / 15.0).abs() < 1e-15);
        }

        assert!(matches!(
            b.penalties(&PopulationState::uniform(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn from_regions_always_balanced() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let m = RegionMeasure::sample_uniform(3, &mut rng).unwrap();
            let a = AdvantageMatrix::from_regions(&m).unwrap();
            let r = a.validate();
            assert!(r.ok, "{r}");
        }
    }

    #[test]
    fn constructor_outputs_validate() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (a, b, c): (f64, f64, f64) = (
                rng.random_range(1e-3..1.0),
                rng.random_range(1e-3..1.0),
                rng.random_range(1e-3..1.0),
            );
            for m in [
                AdvantageMatrix::babelian(3, a).unwrap(),
                AdvantageMatrix::symmetric(a, b, c).unwrap(),
                AdvantageMatrix::quasi_babelian(a, b).unwrap(),
            ] {
                let r = m.validate();
                assert!(r.ok && r.proper, "{r}");
            }
        }
    }

    #[test]
    fn matrix_file_formats() {
        let a = AdvantageMatrix::from_json_str(r#"{"n": 2, "entries": [[0, 0.1], [0.2, 0]]}"#)
            .unwrap();
        assert_eq!(a, AdvantageMatrix::two_grammar(0.2, 0.1).unwrap());

        let a = AdvantageMatrix::from_json_str(
            r#"{"regions": {"1": 0.2, "2": 0.2, "3": 0.2, "12": 0.1, "13": 0.1, "23": 0.1, "123": 0.1}}"#,
        )
        .unwrap();
        assert!((a.get(1, 2) - 0.3).abs() < 1e-15);

        for bad in [
            r#"{"n": 2}"#,
            r#"{"entries": [[0, 0.1], [0.2, 0]], "regions": {"1": 1.0}}"#,
            r#"{"regions": {"21": 1.0}}"#,
            r#"{"n": 3, "entries": [[0, 0.1], [0.2, 0]]}"#,
            r#"{"entries": [[0, 0.3, 0.4], [0.1, 0, 0.2], [0.1, 0.2, 0]]}"#,
        ] {
            assert!(AdvantageMatrix::from_json_str(bad).is_err(), "{bad}");
        }

        let json = serde_json::to_string(&AdvantageMatrix::babelian(2, 0.5).unwrap()).unwrap();
        assert_eq!(json, r#"{"n":2,"entries":[[0.0,0.5],[0.5,0.0]]}"#);
    }

    #[test]
    fn region_keys() {
        assert_eq!(RegionMeasure::key(0b101, 3), "13");
        assert_eq!(RegionMeasure::parse_key("123").unwrap(), vec![1, 2, 3]);
        assert_eq!(RegionMeasure::parse_key("1,10").unwrap(), vec![1, 10]);
        assert!(RegionMeasure::parse_key("").is_err());
        assert!(RegionMeasure::parse_key("1a").is_err());
    }

    fn simplex3() -> impl Strategy<Value = Vec<f64>> {
        (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0).prop_filter_map("nonzero", |(a, b, c)| {
            let s = a + b + c;
            (s > 1e-6).then(|| vec![a / s, b / s, c / s])
        })
    }

    proptest! {
        #[test]
        fn penalties_are_linear(p in simplex3(), q in simplex3(), lambda in 0.0f64..1.0,
                                a in 0.01f64..1.0, b in 0.01f64..1.0) {
            let m = AdvantageMatrix::quasi_babelian(a, b).unwrap();
            let mix: Vec<f64> = p.iter().zip(&q).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect();
            let mut cp = [0.0; 3];
            let mut cq = [0.0; 3];
            let mut cm = [0.0; 3];
            m.penalties_into(&p, &mut cp);
            m.penalties_into(&q, &mut cq);
            m.penalties_into(&mix, &mut cm);
            for i in 0..3 {
                prop_assert!((cm[i] - (lambda * cp[i] + (1.0 - lambda) * cq[i])).abs() < 1e-12);
            }
        }

        #[test]
        fn babelian_penalty_closed_form(p in simplex3(), a in 0.01f64..1.0) {
            let m = AdvantageMatrix::babelian(3, a).unwrap();
            let mut c = [0.0; 3];
            m.penalties_into(&p, &mut c);
            for i in 0..3 {
                prop_assert!((c[i] - a * (1.0 - p[i])).abs() < 1e-15);
            }
        }
    }
}
