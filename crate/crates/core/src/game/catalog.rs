use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::action::Action;
use crate::error::{Error, Result};
use crate::vr_traffic::{Format, QualityLevel};

/// Largest share-level count accepted (`lcm(1..=12) = 27720` budget units).
pub const MAX_SHARE_LEVELS: usize = 12;

/// Dimensions of one UAV's action space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSpace {
    pub n_users: usize,
    pub dl_rbs: usize,
    pub ul_rbs: usize,
    /// `M`: number of nonzero unlicensed share levels. `0` disables the band.
    pub share_levels: usize,
    pub quality_levels: usize,
    pub formats: Vec<Format>,
}

impl ActionSpace {
    fn validate(&self) -> Result<()> {
        let op = "build_action_catalog";
        if self.n_users == 0 {
            return Err(Error::contract(op, "at least one associated user is required"));
        }
        if self.dl_rbs == 0 || self.ul_rbs == 0 {
            return Err(Error::contract(op, "resource block counts must be >= 1"));
        }
        if self.quality_levels == 0 || self.formats.is_empty() {
            return Err(Error::contract(op, "need at least one quality level and one format"));
        }
        if self.share_levels > MAX_SHARE_LEVELS {
            return Err(Error::contract(op, format!("at most {MAX_SHARE_LEVELS} share levels")));
        }
        Ok(())
    }

    /// Round-robin blocks, evenly shared unlicensed airtime, and the given
    /// quality and format for every user.
    fn uniform_action(&self, quality: QualityLevel, format: Format) -> Action {
        let u = self.n_users;
        let share_level = if self.share_levels == 0 {
            vec![0; u]
        } else if u <= self.share_levels {
            vec![u; u]
        } else {
            (0..u).map(|i| if i < self.share_levels { self.share_levels } else { 0 }).collect()
        };
        Action {
            dl_owner: (0..self.dl_rbs).map(|k| k % u).collect(),
            ul_owner: (0..self.ul_rbs).map(|k| k % u).collect(),
            share_level,
            quality: vec![quality; u],
            format: vec![format; u],
        }
    }

    /// Every user at the highest quality, equirectangular.
    pub fn max_qoe_action(&self) -> Action {
        let top = QualityLevel(self.quality_levels - 1);
        let fmt = *self.formats.iter().max().expect("validated");
        self.uniform_action(top, fmt)
    }

    /// Every user at the lowest quality, pyramid.
    pub fn min_size_action(&self) -> Action {
        let fmt = *self.formats.iter().min().expect("validated");
        self.uniform_action(QualityLevel(0), fmt)
    }
}

/// Exact counter and uniform sampler for share vectors with `sum <= 1`.
///
/// Shares `1/s` are scaled to integer units of `lcm(1..=M)`, so the cap
/// becomes an integer budget and feasible vectors can be counted by DP.
struct ShareSpace {
    units: Vec<(usize, u64)>,
    budget: u64,
    /// `ways[i][b]`: completions for users `i..` with `b` units left.
    ways: Vec<Vec<u128>>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl ShareSpace {
    fn new(users: usize, levels: usize) -> Self {
        let budget = (1..=levels as u64).fold(1, |l, s| l / gcd(l, s) * s);
        let mut units = vec![(0usize, 0u64)];
        units.extend((1..=levels).map(|s| (s, budget / s as u64)));
        let b = budget as usize;
        let mut ways = vec![vec![0u128; b + 1]; users + 1];
        ways[users].iter_mut().for_each(|w| *w = 1);
        for i in (0..users).rev() {
            for left in 0..=b {
                ways[i][left] = units
                    .iter()
                    .filter(|(_, c)| *c as usize <= left)
                    .map(|(_, c)| ways[i + 1][left - *c as usize])
                    .fold(0u128, |acc, w| acc.saturating_add(w));
            }
        }
        Self { units, budget, ways }
    }

    fn count(&self) -> u128 {
        self.ways[0][self.budget as usize]
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        let users = self.ways.len() - 1;
        let mut left = self.budget as usize;
        let mut out = Vec::with_capacity(users);
        for i in 0..users {
            let total = self.ways[i][left];
            let mut pick = rng.gen_range(0..total);
            for &(level, cost) in &self.units {
                let cost = cost as usize;
                if cost > left {
                    continue;
                }
                let w = self.ways[i + 1][left - cost];
                if pick < w {
                    out.push(level);
                    left -= cost;
                    break;
                }
                pick -= w;
            }
        }
        out
    }

    /// All feasible vectors in lexicographic order of level indices.
    fn enumerate(&self) -> Vec<Vec<usize>> {
        let users = self.ways.len() - 1;
        let mut out = vec![];
        let mut cur = Vec::with_capacity(users);
        self.walk(0, self.budget as usize, &mut cur, &mut out);
        out
    }

    fn walk(&self, i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == self.ways.len() - 1 {
            out.push(cur.clone());
            return;
        }
        let mut levels: Vec<(usize, u64)> = self.units.clone();
        levels.sort();
        for (level, cost) in levels {
            if cost as usize <= left {
                cur.push(level);
                self.walk(i + 1, left - cost as usize, cur, out);
                cur.pop();
            }
        }
    }
}

/// Immutable, duplicate-free list of one UAV's feasible actions.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionCatalog {
    actions: Vec<Action>,
    exhaustive: bool,
}

impl ActionCatalog {
    /// Catalog of an idle UAV: the single no-op action.
    pub fn idle() -> Self {
        Self {
            actions: vec![Action::idle()],
            exhaustive: true,
        }
    }

    pub fn from_actions(actions: Vec<Action>) -> Result<Self> {
        if actions.is_empty() {
            return Err(Error::contract("ActionCatalog::from_actions", "catalog is empty"));
        }
        let unique: HashSet<&Action> = actions.iter().collect();
        if unique.len() != actions.len() {
            return Err(Error::contract("ActionCatalog::from_actions", "duplicate actions"));
        }
        Ok(Self {
            actions,
            exhaustive: false,
        })
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn get(&self, i: usize) -> &Action {
        &self.actions[i]
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }
}

/// Size of the full feasible product for a space, saturating at `u128::MAX`.
pub fn action_space_size(space: &ActionSpace) -> Result<u128> {
    space.validate()?;
    let shares = ShareSpace::new(space.n_users, space.share_levels);
    Ok(product_size(space, shares.count()))
}

fn product_size(space: &ActionSpace, share_vectors: u128) -> u128 {
    let u = space.n_users as u128;
    let pow = |base: u128, exp: usize| (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base));
    pow(u, space.dl_rbs)
        .saturating_mul(pow(u, space.ul_rbs))
        .saturating_mul(share_vectors)
        .saturating_mul(pow(space.quality_levels as u128, space.n_users))
        .saturating_mul(pow(space.formats.len() as u128, space.n_users))
}

/// Builds the catalog: exhaustive in lexicographic order when the product
/// fits in `max_actions`, otherwise `max_actions` distinct uniform samples
/// led by the max-QoE and min-size actions.
pub fn build_action_catalog(space: &ActionSpace, max_actions: usize, seed: u64) -> Result<ActionCatalog> {
    space.validate()?;
    if max_actions == 0 {
        return Err(Error::contract("build_action_catalog", "max_actions must be >= 1"));
    }
    let shares = ShareSpace::new(space.n_users, space.share_levels);
    let size = product_size(space, shares.count());
    if size <= max_actions as u128 {
        return Ok(ActionCatalog {
            actions: enumerate_all(space, &shares),
            exhaustive: true,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(max_actions);
    let mut actions = Vec::with_capacity(max_actions);
    for a in [space.max_qoe_action(), space.min_size_action()] {
        if actions.len() < max_actions && seen.insert(a.clone()) {
            actions.push(a);
        }
    }
    let u = space.n_users;
    while actions.len() < max_actions {
        let a = Action {
            dl_owner: (0..space.dl_rbs).map(|_| rng.gen_range(0..u)).collect(),
            ul_owner: (0..space.ul_rbs).map(|_| rng.gen_range(0..u)).collect(),
            share_level: shares.sample(&mut rng),
            quality: (0..u).map(|_| QualityLevel(rng.gen_range(0..space.quality_levels))).collect(),
            format: (0..u).map(|_| space.formats[rng.gen_range(0..space.formats.len())]).collect(),
        };
        if seen.insert(a.clone()) {
            actions.push(a);
        }
    }
    Ok(ActionCatalog {
        actions,
        exhaustive: false,
    })
}

fn odometer(radix: usize, len: usize) -> Vec<Vec<usize>> {
    let total = (0..len).fold(1usize, |acc, _| acc * radix);
    (0..total)
        .map(|mut n| {
            let mut digits = vec![0; len];
            for d in digits.iter_mut().rev() {
                *d = n % radix;
                n /= radix;
            }
            digits
        })
        .collect()
}

fn enumerate_all(space: &ActionSpace, shares: &ShareSpace) -> Vec<Action> {
    let u = space.n_users;
    let dl = odometer(u, space.dl_rbs);
    let ul = odometer(u, space.ul_rbs);
    let sh = shares.enumerate();
    let ql = odometer(space.quality_levels, u);
    let fm = odometer(space.formats.len(), u);
    let mut out = vec![];
    for d in &dl {
        for v in &ul {
            for e in &sh {
                for q in &ql {
                    for f in &fm {
                        out.push(Action {
                            dl_owner: d.clone(),
                            ul_owner: v.clone(),
                            share_level: e.clone(),
                            quality: q.iter().map(|&l| QualityLevel(l)).collect(),
                            format: f.iter().map(|&i| space.formats[i]).collect(),
                        });
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space(users: usize, q: usize, v: usize, m: usize, k: usize, formats: Vec<Format>) -> ActionSpace {
        ActionSpace {
            n_users: users,
            dl_rbs: q,
            ul_rbs: v,
            share_levels: m,
            quality_levels: k,
            formats,
        }
    }

    #[test]
    fn degenerate_space_has_one_action() {
        let s = space(1, 1, 1, 0, 1, vec![Format::Equirect]);
        let cat = build_action_catalog(&s, 60, 1).unwrap();
        assert_eq!(cat.len(), 1);
        assert!(cat.is_exhaustive());
        // With one nonzero share level the lone user may also take the whole airtime.
        let s = space(1, 1, 1, 1, 1, vec![Format::Equirect]);
        assert_eq!(build_action_catalog(&s, 60, 1).unwrap().len(), 2);
    }

    #[test]
    fn two_users_two_blocks_partition_count() {
        let s = space(2, 2, 2, 0, 1, vec![Format::Equirect]);
        let cat = build_action_catalog(&s, 1000, 1).unwrap();
        // 2^2 downlink partitions times 2^2 uplink partitions.
        assert_eq!(cat.len(), 16);
        let dl: HashSet<_> = cat.actions().iter().map(|a| a.dl_owner.clone()).collect();
        let ul: HashSet<_> = cat.actions().iter().map(|a| a.ul_owner.clone()).collect();
        assert_eq!(dl.len(), 4);
        assert_eq!(ul.len(), 4);
        let mut sorted = cat.actions().to_vec();
        sorted.sort();
        assert_eq!(sorted, cat.actions());
    }

    #[test]
    fn share_dp_matches_brute_force() {
        for users in 1..=4 {
            for m in 0..=5 {
                let dp = ShareSpace::new(users, m);
                let brute = odometer(m + 1, users)
                    .into_iter()
                    .filter(|v| {
                        let sum: f64 = v.iter().filter(|&&s| s > 0).map(|&s| 1.0 / s as f64).sum();
                        sum <= 1.0 + 1e-12
                    })
                    .count();
                assert_eq!(dp.count(), brute as u128, "users={users} m={m}");
                assert_eq!(dp.enumerate().len(), brute);
            }
        }
    }

    #[test]
    fn share_sampler_is_uniform() {
        let dp = ShareSpace::new(2, 3);
        let all = dp.enumerate();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let draws = 120_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..draws {
            *counts.entry(dp.sample(&mut rng)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), all.len());
        let expect = draws as f64 / all.len() as f64;
        let sigma = (expect * (1.0 - 1.0 / all.len() as f64)).sqrt();
        for c in counts.values() {
            assert!((*c as f64 - expect).abs() < 4.0 * sigma, "{c} vs {expect}");
        }
    }

    #[test]
    fn large_space_is_capped_and_reproducible() {
        let s = space(4, 5, 5, 5, 3, Format::ALL.to_vec());
        assert!(action_space_size(&s).unwrap() > 1_000_000);
        let a = build_action_catalog(&s, 50, 42).unwrap();
        let b = build_action_catalog(&s, 50, 42).unwrap();
        let c = build_action_catalog(&s, 50, 43).unwrap();
        assert_eq!(a.len(), 50);
        assert_eq!(a, b);
        assert_ne!(a, c);
        let unique: HashSet<_> = a.actions().iter().collect();
        assert_eq!(unique.len(), 50);
        assert_eq!(a.get(0), &s.max_qoe_action());
        assert_eq!(a.get(1), &s.min_size_action());
    }

    #[test]
    fn empty_user_list_errors() {
        let s = space(0, 5, 5, 5, 3, Format::ALL.to_vec());
        assert!(matches!(build_action_catalog(&s, 50, 1), Err(Error::Contract { .. })));
    }

    #[test]
    fn more_users_than_blocks_is_feasible() {
        let s = space(7, 2, 2, 0, 1, vec![Format::Pyramid]);
        let cat = build_action_catalog(&s, 5, 3).unwrap();
        for a in cat.actions() {
            a.check(7, 2, 2, 0, 1).unwrap();
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn catalog_entries_are_feasible(users in 1usize..6, q in 1usize..6, v in 1usize..6, m in 0usize..6, cap in 2usize..80, seed in any::<u64>()) {
            let s = space(users, q, v, m, 3, Format::ALL.to_vec());
            let cat = build_action_catalog(&s, cap, seed).unwrap();
            prop_assert!(cat.len() <= cap);
            for a in cat.actions() {
                prop_assert!(a.check(users, q, v, m, 3).is_ok());
            }
        }
    }
}
