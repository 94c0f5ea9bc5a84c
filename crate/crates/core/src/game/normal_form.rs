//! Finite normal-form games: mixed strategies, expected utility and
//! per-player regret. Generic over [`Scalar`] so exact rationals work too.

use std::io::Write;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default cap on joint-action cells for the brute-force oracle.
pub const DEFAULT_CELL_CAP: u128 = 1_000_000;

/// Probability distribution over one player's catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy<T> {
    probs: Vec<T>,
}

impl<T: Scalar> MixedStrategy<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        let op = "MixedStrategy::new";
        if probs.is_empty() {
            return Err(Error::contract(op, "empty strategy"));
        }
        if probs.iter().any(|p| *p < T::zero()) {
            return Err(Error::contract(op, "negative probability"));
        }
        let sum = probs.iter().fold(T::zero(), |a, &p| a + p);
        if (sum - T::one()).abs() > T::lit(1e-9) {
            return Err(Error::contract(op, format!("probabilities sum to {sum:?}")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform strategy over an empty catalog");
        Self {
            probs: vec![T::one() / T::from_count(n); n],
        }
    }

    pub fn pure(n: usize, action: usize) -> Self {
        assert!(action < n, "pure action outside catalog");
        let mut probs = vec![T::zero(); n];
        probs[action] = T::one();
        Self { probs }
    }

    /// Empirical frequencies of play.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::contract("MixedStrategy::from_counts", "no plays recorded"));
        }
        let t = T::from_u64(total).expect("count fits");
        Self::new(counts.iter().map(|&c| T::from_u64(c).expect("count fits") / t).collect())
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Full utility table of a finite game. Joint actions are indexed in
/// row-major order with the last player varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormGame<T> {
    action_counts: Vec<usize>,
    /// `utilities[joint][player]`.
    utilities: Vec<Vec<T>>,
}

impl<T: Scalar> NormalFormGame<T> {
    pub fn from_fn<F>(action_counts: Vec<usize>, cell_cap: u128, mut utility: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Result<Vec<T>>,
    {
        let cells = action_counts
            .iter()
            .fold(1u128, |acc, &n| acc.saturating_mul(n as u128));
        if cells > cell_cap {
            return Err(Error::TableTooLarge { cells, cap: cell_cap });
        }
        if action_counts.is_empty() || action_counts.contains(&0) {
            return Err(Error::contract("NormalFormGame", "every player needs at least one action"));
        }
        let players = action_counts.len();
        let mut utilities = Vec::with_capacity(cells as usize);
        let mut joint = vec![0usize; players];
        for _ in 0..cells {
            let u = utility(&joint)?;
            if u.len() != players {
                return Err(Error::contract("NormalFormGame", "one utility per player is required"));
            }
            utilities.push(u);
            for p in (0..players).rev() {
                joint[p] += 1;
                if joint[p] < action_counts[p] {
                    break;
                }
                joint[p] = 0;
            }
        }
        Ok(Self {
            action_counts,
            utilities,
        })
    }

    /// Two-player game from row and column payoff matrices.
    pub fn bimatrix(row: &[Vec<T>], col: &[Vec<T>]) -> Result<Self> {
        let n = row.len();
        let m = row.first().map_or(0, |r| r.len());
        NormalFormGame::from_fn(vec![n, m], DEFAULT_CELL_CAP, |a| Ok(vec![row[a[0]][a[1]], col[a[0]][a[1]]]))
    }

    pub fn num_players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn utilities(&self, joint: &[usize]) -> &[T] {
        &self.utilities[self.joint_index(joint)]
    }

    pub fn joint_index(&self, joint: &[usize]) -> usize {
        joint
            .iter()
            .zip(&self.action_counts)
            .fold(0, |idx, (&a, &n)| idx * n + a)
    }

    fn joint_of(&self, mut index: usize) -> Vec<usize> {
        let mut joint = vec![0; self.num_players()];
        for p in (0..self.num_players()).rev() {
            joint[p] = index % self.action_counts[p];
            index /= self.action_counts[p];
        }
        joint
    }

    fn check_profile(&self, profile: &[MixedStrategy<T>]) -> Result<()> {
        if profile.len() != self.num_players()
            || profile.iter().zip(&self.action_counts).any(|(s, &n)| s.len() != n)
        {
            return Err(Error::contract("expected_utility", "profile does not match the game shape"));
        }
        Ok(())
    }

    /// Expected utility of `player` under independent mixed strategies.
    pub fn expected_utility(&self, player: usize, profile: &[MixedStrategy<T>]) -> Result<T> {
        self.check_profile(profile)?;
        let mut total = T::zero();
        for (idx, u) in self.utilities.iter().enumerate() {
            let joint = self.joint_of(idx);
            let weight = joint
                .iter()
                .zip(profile)
                .fold(T::one(), |w, (&a, s)| w * s.probs[a]);
            total = total + u[player] * weight;
        }
        Ok(total)
    }

    /// `u_j(a_j, pi_{-j})` for every pure action `a_j` of `player`.
    pub fn deviation_utilities(&self, player: usize, profile: &[MixedStrategy<T>]) -> Result<Vec<T>> {
        self.check_profile(profile)?;
        let mut out = vec![T::zero(); self.action_counts[player]];
        for (idx, u) in self.utilities.iter().enumerate() {
            let joint = self.joint_of(idx);
            let weight = joint
                .iter()
                .zip(profile)
                .enumerate()
                .filter(|(p, _)| *p != player)
                .fold(T::one(), |w, (_, (&a, s))| w * s.probs[a]);
            out[joint[player]] = out[joint[player]] + u[player] * weight;
        }
        Ok(out)
    }

    /// Gain each player could obtain by the best unilateral pure deviation.
    /// The profile is an epsilon-equilibrium iff every entry is `<= epsilon`.
    pub fn ne_regret(&self, profile: &[MixedStrategy<T>]) -> Result<Vec<T>> {
        (0..self.num_players())
            .map(|p| {
                let devs = self.deviation_utilities(p, profile)?;
                let current = devs
                    .iter()
                    .zip(profile[p].probs())
                    .fold(T::zero(), |acc, (&u, &pr)| acc + u * pr);
                let best = devs
                    .iter()
                    .copied()
                    .fold(devs[0], |m, u| if u > m { u } else { m });
                let gap = best - current;
                Ok(if gap < T::zero() { T::zero() } else { gap })
            })
            .collect()
    }

    /// Lowest-index best response of `player` to the profile.
    pub fn best_response(&self, player: usize, profile: &[MixedStrategy<T>]) -> Result<usize> {
        let devs = self.deviation_utilities(player, profile)?;
        Ok(argmax_lowest(&devs))
    }

    /// CSV with one row per joint action: `joint_index,uav<j>_action...,uav<j>_utility...`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let players = self.num_players();
        let mut header = vec!["joint_index".to_string()];
        header.extend((0..players).map(|p| format!("uav{p}_action")));
        header.extend((0..players).map(|p| format!("uav{p}_utility")));
        w.write_record(&header)?;
        for (idx, u) in self.utilities.iter().enumerate() {
            let mut row = vec![idx.to_string()];
            row.extend(self.joint_of(idx).iter().map(|a| a.to_string()));
            row.extend(u.iter().map(|x| format!("{}", x.to_f64_lossy())));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Index of the first maximal entry.
pub fn argmax_lowest<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
