use crate::channel::{self, Band, ChannelParams, Link};
use crate::error::{Error, Result};
use crate::scalar::dbm_to_mw;
use crate::vr_traffic::{self, VrImageModel, VrParams};

use super::action::Action;

/// Horizontal position in metres.
pub type Point = (f64, f64);

/// Static radio and traffic state of one run: who serves whom and the mean
/// received powers of every UAV-user pair.
#[derive(Debug, Clone)]
pub struct World {
    channel: ChannelParams<f64>,
    image: VrImageModel<f64>,
    tracking_bits: f64,
    delay_budget: f64,
    duty_cycle: f64,
    uav_users: Vec<Vec<usize>>,
    n_users: usize,
    noise_mw: f64,
    /// `[user][uav]`, mW at the user on a licensed downlink block.
    dl_licensed_mw: Vec<Vec<f64>>,
    /// `[user][uav]`, mW at the user on the unlicensed band.
    dl_unlicensed_mw: Vec<Vec<f64>>,
    /// `[user][uav]`, mW at the UAV from the user on an uplink block.
    ul_mw: Vec<Vec<f64>>,
}

/// Per-user outcome of a joint action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserOutcome {
    pub uav: usize,
    pub downlink_rate: f64,
    pub uplink_rate: f64,
    pub delay: f64,
    pub qoe: f64,
    pub meets_deadline: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointOutcome {
    pub utilities: Vec<f64>,
    /// `None` for users no UAV serves.
    pub users: Vec<Option<UserOutcome>>,
}

pub struct WorldBuilder<'a> {
    pub channel: &'a ChannelParams<f64>,
    pub vr: &'a VrParams<f64>,
    pub duty_cycle: f64,
    /// `(x, y, altitude)` per UAV.
    pub uavs: &'a [(f64, f64, f64)],
    pub users: &'a [Point],
    pub association: &'a [Option<usize>],
}

impl WorldBuilder<'_> {
    pub fn build(self) -> Result<World> {
        self.channel.validate()?;
        self.vr.validate()?;
        if !(0.0..=1.0).contains(&self.duty_cycle) {
            return Err(Error::contract("World::build", "duty cycle must lie in [0, 1]"));
        }
        if self.association.len() != self.users.len() {
            return Err(Error::contract("World::build", "association must cover every user"));
        }
        let mut uav_users = vec![vec![]; self.uavs.len()];
        for (i, a) in self.association.iter().enumerate() {
            if let Some(j) = *a {
                if j >= self.uavs.len() {
                    return Err(Error::contract("World::build", format!("user {i} points at missing UAV {j}")));
                }
                uav_users[j].push(i);
            }
        }
        let p = self.channel;
        let mut dl_l = vec![vec![0.0; self.uavs.len()]; self.users.len()];
        let mut dl_u = dl_l.clone();
        let mut ul = dl_l.clone();
        for (i, &(ux, uy)) in self.users.iter().enumerate() {
            for (j, &(x, y, h)) in self.uavs.iter().enumerate() {
                let link = Link::new((ux - x).hypot(uy - y), h)?;
                let loss_l = channel::average_path_loss(&link, Band::Licensed, p)?;
                let loss_u = channel::average_path_loss(&link, Band::Unlicensed, p)?;
                dl_l[i][j] = channel::received_power_mw(p.tx_power_uav_dbm, loss_l);
                dl_u[i][j] = channel::received_power_mw(p.tx_power_uav_dbm, loss_u);
                ul[i][j] = channel::received_power_mw(p.tx_power_user_dbm, loss_l);
            }
        }
        Ok(World {
            channel: *p,
            image: self.vr.image_model()?,
            tracking_bits: self.vr.tracking_bits,
            delay_budget: self.vr.delay_budget,
            duty_cycle: self.duty_cycle,
            uav_users,
            n_users: self.users.len(),
            noise_mw: dbm_to_mw(p.noise_power_dbm),
            dl_licensed_mw: dl_l,
            dl_unlicensed_mw: dl_u,
            ul_mw: ul,
        })
    }
}

impl World {
    pub fn num_uavs(&self) -> usize {
        self.uav_users.len()
    }

    pub fn num_users(&self) -> usize {
        self.n_users
    }

    /// Global user indices served by `uav`, in ascending order.
    pub fn users_of(&self, uav: usize) -> &[usize] {
        &self.uav_users[uav]
    }

    pub fn channel(&self) -> &ChannelParams<f64> {
        &self.channel
    }

    pub fn image_model(&self) -> &VrImageModel<f64> {
        &self.image
    }

    pub fn duty_cycle(&self) -> f64 {
        self.duty_cycle
    }

    pub fn delay_budget(&self) -> f64 {
        self.delay_budget
    }

    /// UAVs transmitting on downlink block `k` (the set `R^k`).
    pub fn dl_block_users(joint: &[&Action], k: usize) -> Vec<usize> {
        joint
            .iter()
            .enumerate()
            .filter(|(_, a)| a.dl_owner.get(k).is_some())
            .map(|(j, _)| j)
            .collect()
    }

    /// Global users transmitting on uplink block `k` (the set `U^k`), with their UAV.
    pub fn ul_block_users(&self, joint: &[&Action], k: usize) -> Vec<(usize, usize)> {
        joint
            .iter()
            .enumerate()
            .filter_map(|(j, a)| a.ul_owner.get(k).map(|&u| (j, self.uav_users[j][u])))
            .collect()
    }

    fn check_joint(&self, joint: &[&Action]) -> Result<()> {
        if joint.len() != self.num_uavs() {
            return Err(Error::contract("evaluate_utility", "one action per UAV is required"));
        }
        for (j, a) in joint.iter().enumerate() {
            a.check(
                self.uav_users[j].len(),
                self.channel.num_downlink_rbs,
                self.channel.num_uplink_rbs,
                crate::game::catalog::MAX_SHARE_LEVELS,
                self.image.num_levels(),
            )
            .map_err(|e| Error::contract("evaluate_utility", format!("UAV {j}: {e}")))?;
        }
        Ok(())
    }

    /// Outcome of every user under a joint action.
    pub fn evaluate(&self, joint: &[&Action]) -> Result<JointOutcome> {
        self.check_joint(joint)?;
        let mut utilities = vec![0.0; self.num_uavs()];
        let mut users = vec![None; self.n_users];
        let bw = self.channel.rb_bandwidth;
        let unlicensed_active: Vec<bool> = joint.iter().map(|a| a.uses_unlicensed()).collect();

        for (j, action) in joint.iter().enumerate() {
            for (u, &i) in self.uav_users[j].iter().enumerate() {
                let mut dl_rate = 0.0;
                for (k, &owner) in action.dl_owner.iter().enumerate() {
                    if owner != u {
                        continue;
                    }
                    let interference: f64 = joint
                        .iter()
                        .enumerate()
                        .filter(|&(l, a)| l != j && a.dl_owner.get(k).is_some())
                        .map(|(l, _)| self.dl_licensed_mw[i][l])
                        .sum();
                    let sinr = self.dl_licensed_mw[i][j] / (self.noise_mw + interference);
                    dl_rate += bw * sinr.log2_1p();
                }
                let share = action.share(u);
                if share > 0.0 && self.duty_cycle > 0.0 {
                    let interference: f64 = (0..joint.len())
                        .filter(|&l| l != j && unlicensed_active[l])
                        .map(|l| self.dl_unlicensed_mw[i][l])
                        .sum();
                    let sinr = self.dl_unlicensed_mw[i][j] / (self.noise_mw + interference);
                    dl_rate += channel::downlink_unlicensed_rate(share, self.duty_cycle, sinr, &self.channel)?;
                }
                let mut ul_rate = 0.0;
                for (k, &owner) in action.ul_owner.iter().enumerate() {
                    if owner != u {
                        continue;
                    }
                    let interference: f64 = joint
                        .iter()
                        .enumerate()
                        .filter(|&(l, _)| l != j)
                        .filter_map(|(l, a)| a.ul_owner.get(k).map(|&o| self.ul_mw[self.uav_users[l][o]][j]))
                        .sum();
                    let sinr = self.ul_mw[i][j] / (self.noise_mw + interference);
                    ul_rate += bw * sinr.log2_1p();
                }
                let bits = self.image.image_size(action.quality[u], action.format[u])?;
                let delay = vr_traffic::total_delay(bits, dl_rate, self.tracking_bits, ul_rate);
                let qoe = self.image.qoe(action.quality[u], action.format[u])?;
                let meets = delay <= self.delay_budget;
                if meets {
                    utilities[j] += qoe;
                }
                users[i] = Some(UserOutcome {
                    uav: j,
                    downlink_rate: dl_rate,
                    uplink_rate: ul_rate,
                    delay,
                    qoe,
                    meets_deadline: meets,
                });
            }
        }
        Ok(JointOutcome { utilities, users })
    }

    /// Utility of one UAV: summed QoE of its users that meet the delay budget.
    pub fn evaluate_utility(&self, uav: usize, joint: &[&Action]) -> Result<f64> {
        if uav >= self.num_uavs() {
            return Err(Error::contract("evaluate_utility", format!("no UAV {uav}")));
        }
        Ok(self.evaluate(joint)?.utilities[uav])
    }
}

trait Log2OnePlus {
    fn log2_1p(self) -> f64;
}

impl Log2OnePlus for f64 {
    fn log2_1p(self) -> f64 {
        self.ln_1p() / std::f64::consts::LN_2
    }
}
