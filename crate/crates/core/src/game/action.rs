use std::fmt;

use num_rational::Ratio;

use crate::vr_traffic::{Format, QualityLevel};

/// One UAV's joint allocation for its associated users.
///
/// Resource blocks are stored by owner: `dl_owner[k]` is the local index of
/// the user holding downlink block `k`, so every block goes to exactly one
/// user. An idle UAV (no associated users) has empty vectors and transmits
/// nothing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action {
    pub dl_owner: Vec<usize>,
    pub ul_owner: Vec<usize>,
    /// Unlicensed share level per user: `0` means no airtime, `s >= 1` means a
    /// share of `1/s` of the duty-cycle airtime.
    pub share_level: Vec<usize>,
    pub quality: Vec<QualityLevel>,
    pub format: Vec<Format>,
}

impl Action {
    pub fn idle() -> Self {
        Self {
            dl_owner: vec![],
            ul_owner: vec![],
            share_level: vec![],
            quality: vec![],
            format: vec![],
        }
    }

    pub fn is_idle(&self) -> bool {
        self.quality.is_empty()
    }

    pub fn num_users(&self) -> usize {
        self.quality.len()
    }

    /// Unlicensed share of user `u` as a fraction of the duty cycle.
    pub fn share(&self, u: usize) -> f64 {
        match self.share_level[u] {
            0 => 0.0,
            s => 1.0 / s as f64,
        }
    }

    pub fn uses_unlicensed(&self) -> bool {
        self.share_level.iter().any(|&s| s > 0)
    }

    /// Binary downlink assignment vector of user `u` over all blocks.
    pub fn dl_assignment(&self, u: usize) -> Vec<bool> {
        self.dl_owner.iter().map(|&o| o == u).collect()
    }

    pub fn ul_assignment(&self, u: usize) -> Vec<bool> {
        self.ul_owner.iter().map(|&o| o == u).collect()
    }

    /// Sum of the unlicensed shares, exact.
    pub fn share_sum(&self) -> Ratio<i64> {
        self.share_level
            .iter()
            .filter(|&&s| s > 0)
            .map(|&s| Ratio::new(1, s as i64))
            .sum()
    }

    /// Checks the full-allocation and share-cap constraints for `users` users.
    pub fn check(&self, users: usize, dl_rbs: usize, ul_rbs: usize, max_share_level: usize, num_quality: usize) -> Result<(), String> {
        if users == 0 {
            return if self.is_idle() {
                Ok(())
            } else {
                Err("a UAV without users must be idle".into())
            };
        }
        if self.quality.len() != users || self.format.len() != users || self.share_level.len() != users {
            return Err(format!("per-user vectors must have length {users}"));
        }
        if self.dl_owner.len() != dl_rbs || self.ul_owner.len() != ul_rbs {
            return Err("every resource block must be allocated".into());
        }
        // Column sums of the binary assignment matrices must be exactly 1.
        for (owners, name) in [(&self.dl_owner, "downlink"), (&self.ul_owner, "uplink")] {
            for k in 0..owners.len() {
                let holders = (0..users).filter(|&u| owners[k] == u).count();
                if holders != 1 {
                    return Err(format!("{name} block {k} has {holders} holders"));
                }
            }
        }
        if self.share_level.iter().any(|&s| s > max_share_level) {
            return Err(format!("share level above {max_share_level}"));
        }
        if self.share_sum() > Ratio::from_integer(1) {
            return Err("unlicensed shares sum above 1".into());
        }
        if self.quality.iter().any(|q| q.0 >= num_quality) {
            return Err("unknown quality level".into());
        }
        Ok(())
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_idle() {
            return write!(f, "idle");
        }
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("");
        let q: Vec<usize> = self.quality.iter().map(|q| q.0).collect();
        let fm: Vec<usize> = self.format.iter().map(|f| f.index()).collect();
        write!(
            f,
            "dl={} ul={} e={} l={} f={}",
            join(&self.dl_owner),
            join(&self.ul_owner),
            join(&self.share_level),
            join(&q),
            join(&fm)
        )
    }
}
