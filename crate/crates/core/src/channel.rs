//! Air-to-ground channel: probabilistic LoS/NLoS path loss, SINR and the
//! licensed, unlicensed and uplink rate equations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Real, SPEED_OF_LIGHT};

/// Radio parameters shared by every link of a run.
///
/// Powers are in dBm, attenuations in dB, frequencies and bandwidths in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelParams<T> {
    pub carrier_freq_licensed: T,
    pub carrier_freq_unlicensed: T,
    /// Bandwidth of one licensed resource block.
    pub rb_bandwidth: T,
    pub unlicensed_bandwidth: T,
    /// Environment constant `X` of the LoS probability curve.
    pub env_x: T,
    /// Environment constant `Y` of the LoS probability curve.
    pub env_y: T,
    pub eta_los_licensed: T,
    pub eta_nlos_licensed: T,
    pub eta_los_unlicensed: T,
    pub eta_nlos_unlicensed: T,
    pub tx_power_uav_dbm: T,
    pub tx_power_user_dbm: T,
    pub noise_power_dbm: T,
    pub num_downlink_rbs: usize,
    pub num_uplink_rbs: usize,
}

impl<T: Real> Default for ChannelParams<T> {
    fn default() -> Self {
        Self {
            carrier_freq_licensed: T::lit(2.0e9),
            carrier_freq_unlicensed: T::lit(5.18e9),
            rb_bandwidth: T::lit(180.0e3),
            unlicensed_bandwidth: T::lit(20.0e6),
            env_x: T::lit(11.9),
            env_y: T::lit(0.13),
            eta_los_licensed: T::lit(1.0),
            eta_nlos_licensed: T::lit(20.0),
            eta_los_unlicensed: T::lit(1.2),
            eta_nlos_unlicensed: T::lit(23.0),
            tx_power_uav_dbm: T::lit(15.0),
            tx_power_user_dbm: T::lit(20.0),
            noise_power_dbm: T::lit(-94.0),
            num_downlink_rbs: 5,
            num_uplink_rbs: 5,
        }
    }
}

impl<T: Real> ChannelParams<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_freq_licensed", self.carrier_freq_licensed),
            ("carrier_freq_unlicensed", self.carrier_freq_unlicensed),
            ("rb_bandwidth", self.rb_bandwidth),
            ("unlicensed_bandwidth", self.unlicensed_bandwidth),
        ];
        for (key, v) in positive {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::config(format!("channel.{key}"), "must be finite and > 0"));
            }
        }
        if !(self.env_x > T::zero()) || !(self.env_y >= T::zero()) {
            return Err(Error::config(
                "channel.env_x",
                "environment constants need env_x > 0 and env_y >= 0",
            ));
        }
        if !(self.eta_nlos_licensed > self.eta_los_licensed) {
            return Err(Error::config(
                "channel.eta_nlos_licensed",
                "NLoS attenuation must exceed channel.eta_los_licensed",
            ));
        }
        if !(self.eta_nlos_unlicensed > self.eta_los_unlicensed) {
            return Err(Error::config(
                "channel.eta_nlos_unlicensed",
                "NLoS attenuation must exceed channel.eta_los_unlicensed",
            ));
        }
        for (key, v) in [
            ("tx_power_uav_dbm", self.tx_power_uav_dbm),
            ("tx_power_user_dbm", self.tx_power_user_dbm),
            ("noise_power_dbm", self.noise_power_dbm),
        ] {
            if !v.is_finite() {
                return Err(Error::config(format!("channel.{key}"), "must be finite"));
            }
        }
        if self.num_downlink_rbs == 0 {
            return Err(Error::config("channel.num_downlink_rbs", "must be >= 1"));
        }
        if self.num_uplink_rbs == 0 {
            return Err(Error::config("channel.num_uplink_rbs", "must be >= 1"));
        }
        Ok(())
    }

    pub fn carrier(&self, band: Band) -> T {
        match band {
            Band::Licensed => self.carrier_freq_licensed,
            Band::Unlicensed => self.carrier_freq_unlicensed,
        }
    }

    /// `(eta_los, eta_nlos)` for a band.
    pub fn attenuation(&self, band: Band) -> (T, T) {
        match band {
            Band::Licensed => (self.eta_los_licensed, self.eta_nlos_licensed),
            Band::Unlicensed => (self.eta_los_unlicensed, self.eta_nlos_unlicensed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    Licensed,
    Unlicensed,
}

/// Geometry of one UAV-user link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link<T> {
    pub horizontal_distance: T,
    pub uav_altitude: T,
    pub distance_3d: T,
    /// Elevation angle seen from the user, in degrees.
    pub elevation_angle: T,
}

impl<T: Real> Link<T> {
    pub fn new(horizontal_distance: T, uav_altitude: T) -> Result<Self> {
        if !(horizontal_distance >= T::zero()) || !(uav_altitude >= T::zero()) {
            return Err(Error::domain("Link::new", "distances must be nonnegative"));
        }
        let distance_3d = horizontal_distance.hypot(uav_altitude);
        if !(distance_3d > T::zero()) {
            return Err(Error::domain("Link::new", "UAV and user coincide"));
        }
        let elevation_angle = (uav_altitude / distance_3d).asin().to_degrees();
        if !(elevation_angle > T::zero()) {
            return Err(Error::domain(
                "Link::new",
                "elevation angle must lie in (0, 90] degrees",
            ));
        }
        Ok(Self {
            horizontal_distance,
            uav_altitude,
            distance_3d,
            elevation_angle,
        })
    }
}

/// `20 log10(4 pi d f / c)` in dB.
pub fn free_space_path_loss<T: Real>(distance: T, freq: T) -> Result<T> {
    if !(distance > T::zero()) || !(freq > T::zero()) {
        return Err(Error::domain(
            "free_space_path_loss",
            format!("distance and frequency must be > 0 (got {distance:?}, {freq:?})"),
        ));
    }
    let four_pi = T::lit(4.0) * T::PI();
    Ok(T::lit(20.0) * (four_pi * distance * freq / T::lit(SPEED_OF_LIGHT)).log10())
}

/// Probability of a line-of-sight link at the given elevation (degrees).
pub fn los_probability<T: Real>(elevation_deg: T, env_x: T, env_y: T) -> T {
    T::one() / (T::one() + env_x * (-env_y * (elevation_deg - env_x)).exp())
}

/// LoS-probability-weighted path loss in dB.
pub fn average_path_loss<T: Real>(link: &Link<T>, band: Band, params: &ChannelParams<T>) -> Result<T> {
    let fspl = free_space_path_loss(link.distance_3d, params.carrier(band))?;
    let (eta_los, eta_nlos) = params.attenuation(band);
    let p_los = los_probability(link.elevation_angle, params.env_x, params.env_y);
    Ok(p_los * (fspl + eta_los) + (T::one() - p_los) * (fspl + eta_nlos))
}

/// Received power in mW for a transmit power in dBm over a path loss in dB.
pub fn received_power_mw<T: Real>(tx_dbm: T, path_loss_db: T) -> T {
    crate::scalar::dbm_to_mw(tx_dbm - path_loss_db)
}

/// Linear SINR: serving / (noise + sum of interferers), powers in mW.
pub fn compute_sinr<T: Real>(serving: T, interferers: &[T], noise: T) -> Result<T> {
    if !(noise > T::zero()) {
        return Err(Error::domain("compute_sinr", "noise power must be > 0"));
    }
    if serving < T::zero() || interferers.iter().any(|&p| p < T::zero()) {
        return Err(Error::domain("compute_sinr", "powers must be nonnegative"));
    }
    let interference = interferers.iter().fold(T::zero(), |acc, &p| acc + p);
    Ok(serving / (noise + interference))
}

fn rb_rate<T: Real>(op: &'static str, assignment: &[bool], sinr: &[T], rbs: usize, bandwidth: T) -> Result<T> {
    if assignment.len() != rbs || sinr.len() != rbs {
        return Err(Error::contract(
            op,
            format!(
                "expected {rbs} resource blocks, got assignment of {} and {} SINR values",
                assignment.len(),
                sinr.len()
            ),
        ));
    }
    let mut rate = T::zero();
    for (&used, &gamma) in assignment.iter().zip(sinr) {
        if gamma < T::zero() {
            return Err(Error::contract(op, "SINR must be nonnegative"));
        }
        if used {
            rate = rate + bandwidth * gamma.ln_1p() / T::LN_2();
        }
    }
    Ok(rate)
}

/// Licensed downlink rate summed over the assigned resource blocks, bit/s.
pub fn downlink_licensed_rate<T: Real>(assignment: &[bool], sinr: &[T], params: &ChannelParams<T>) -> Result<T> {
    rb_rate(
        "downlink_licensed_rate",
        assignment,
        sinr,
        params.num_downlink_rbs,
        params.rb_bandwidth,
    )
}

/// Uplink rate summed over the assigned uplink resource blocks, bit/s.
pub fn uplink_rate<T: Real>(assignment: &[bool], sinr: &[T], params: &ChannelParams<T>) -> Result<T> {
    rb_rate(
        "uplink_rate",
        assignment,
        sinr,
        params.num_uplink_rbs,
        params.rb_bandwidth,
    )
}

/// Unlicensed downlink rate for a user holding share `share` of the
/// duty-cycle airtime.
pub fn downlink_unlicensed_rate<T: Real>(
    share: T,
    duty_cycle: T,
    sinr: T,
    params: &ChannelParams<T>,
) -> Result<T> {
    if !(share >= T::zero() && share <= T::one()) {
        return Err(Error::contract(
            "downlink_unlicensed_rate",
            format!("share must lie in [0, 1], got {share:?}"),
        ));
    }
    if !(duty_cycle >= T::zero() && duty_cycle <= T::one()) {
        return Err(Error::contract(
            "downlink_unlicensed_rate",
            format!("duty cycle must lie in [0, 1], got {duty_cycle:?}"),
        ));
    }
    if sinr < T::zero() {
        return Err(Error::contract("downlink_unlicensed_rate", "SINR must be nonnegative"));
    }
    Ok(share * duty_cycle * params.unlicensed_bandwidth * sinr.ln_1p() / T::LN_2())
}
