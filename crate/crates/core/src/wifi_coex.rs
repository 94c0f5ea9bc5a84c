//! WiFi saturation capacity and the LTE-U duty-cycle bound.
//!
//! Capacity follows Bianchi's saturation model for RTS/CTS access with
//! binary slotted exponential backoff.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// WiFi MAC timing and load. Durations are in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WifiMacParams<T> {
    pub n_users: usize,
    pub difs_us: T,
    pub sifs_us: T,
    pub rts_us: T,
    pub cts_us: T,
    pub ack_us: T,
    /// Mean frame payload E[S].
    pub payload_bytes: T,
    pub slot_time_us: T,
    pub cw_min: usize,
    /// Maximum backoff stage `m`; the window at stage `i` is `2^i * cw_min`.
    pub backoff_stages: u32,
    /// Data-frame PHY rate, bit/s.
    pub phy_rate: T,
    pub mac_header_bits: T,
    /// Per-user WiFi rate guarantee, bit/s.
    pub rate_requirement: T,
    /// WiFi slots per LTE slot. Accepted for completeness; the airtime-fraction
    /// model does not depend on it.
    pub slots_per_lte_slot: usize,
}

impl<T: Real> Default for WifiMacParams<T> {
    fn default() -> Self {
        Self {
            n_users: 8,
            difs_us: T::lit(50.0),
            sifs_us: T::lit(16.0),
            rts_us: T::lit(352.0),
            cts_us: T::lit(304.0),
            ack_us: T::lit(304.0),
            payload_bytes: T::lit(1500.0),
            slot_time_us: T::lit(9.0),
            cw_min: 16,
            backoff_stages: 6,
            phy_rate: T::lit(54.0e6),
            mac_header_bits: T::lit(272.0),
            rate_requirement: T::lit(4.0e6),
            slots_per_lte_slot: 10,
        }
    }
}

impl<T: Real> WifiMacParams<T> {
    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("difs_us", self.difs_us),
            ("sifs_us", self.sifs_us),
            ("rts_us", self.rts_us),
            ("cts_us", self.cts_us),
            ("ack_us", self.ack_us),
            ("payload_bytes", self.payload_bytes),
            ("slot_time_us", self.slot_time_us),
            ("phy_rate", self.phy_rate),
        ] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::config(format!("wifi.{key}"), "must be finite and > 0"));
            }
        }
        if !(self.mac_header_bits >= T::zero()) {
            return Err(Error::config("wifi.mac_header_bits", "must be >= 0"));
        }
        if !(self.rate_requirement >= T::zero()) {
            return Err(Error::config("wifi.rate_requirement", "must be >= 0"));
        }
        if self.n_users == 0 {
            return Err(Error::config("wifi.n_users", "must be >= 1"));
        }
        if self.cw_min == 0 {
            return Err(Error::config("wifi.cw_min", "must be >= 1"));
        }
        if self.backoff_stages > 30 {
            return Err(Error::config("wifi.backoff_stages", "must be <= 30"));
        }
        Ok(())
    }

    /// Duration of a successful RTS/CTS exchange, seconds.
    pub fn success_time(&self) -> T {
        let us = T::lit(1e-6);
        let frame = (self.mac_header_bits + self.payload_bytes * T::lit(8.0)) / self.phy_rate;
        (self.rts_us + self.sifs_us + self.cts_us + self.sifs_us + self.sifs_us + self.ack_us + self.difs_us)
            * us
            + frame
    }

    /// Duration of an RTS collision, seconds.
    pub fn collision_time(&self) -> T {
        (self.rts_us + self.difs_us) * T::lit(1e-6)
    }

    pub fn slot_time(&self) -> T {
        self.slot_time_us * T::lit(1e-6)
    }

    pub fn payload_bits(&self) -> T {
        self.payload_bytes * T::lit(8.0)
    }
}

/// Fixed point of the Bianchi chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BianchiPoint<T> {
    /// Per-slot transmission probability of one station.
    pub tau: T,
    /// Conditional collision probability.
    pub collision: T,
    /// Aggregate saturation throughput, bit/s.
    pub throughput: T,
}

/// Transmission probability as a function of collision probability.
///
/// Uses `(1 - (2p)^m) / (1 - 2p) = sum_{k<m} (2p)^k` to stay finite at `p = 1/2`.
pub fn transmit_probability<T: Real>(collision: T, cw_min: usize, stages: u32) -> T {
    let w = T::from_count(cw_min);
    let two_p = collision + collision;
    let mut geometric = T::zero();
    let mut term = T::one();
    for _ in 0..stages {
        geometric = geometric + term;
        term = term * two_p;
    }
    T::lit(2.0) / (w + T::one() + collision * w * geometric)
}

const MAX_BISECTION_STEPS: usize = 200;

/// Solves the `(tau, p)` fixed point by bisection on `p`.
pub fn solve_bianchi<T: Real>(params: &WifiMacParams<T>) -> Result<BianchiPoint<T>> {
    solve_bianchi_with(params, MAX_BISECTION_STEPS)
}

pub fn solve_bianchi_with<T: Real>(params: &WifiMacParams<T>, max_steps: usize) -> Result<BianchiPoint<T>> {
    params.validate()?;
    let n = params.n_users;
    let others = (n - 1) as i32;
    // g(p) = p - (1 - (1 - tau(p))^(n-1)) is strictly increasing with g(0) <= 0 < g(1).
    let residual = |p: T| {
        let tau = transmit_probability(p, params.cw_min, params.backoff_stages);
        p - (T::one() - (T::one() - tau).powi(others))
    };
    let (mut lo, mut hi) = (T::zero(), T::one());
    let tol = T::epsilon() * T::lit(16.0);
    let mut steps = 0;
    if n > 1 {
        while hi - lo > tol {
            if steps == max_steps {
                let mid = (lo + hi) / T::lit(2.0);
                return Err(Error::NoConvergence {
                    solver: "bianchi fixed point",
                    iterations: steps,
                    residual: residual(mid).abs().to_f64_lossy(),
                });
            }
            let mid = (lo + hi) / T::lit(2.0);
            if residual(mid) > T::zero() {
                hi = mid;
            } else {
                lo = mid;
            }
            steps += 1;
        }
    } else {
        hi = T::zero();
    }
    let p = if n > 1 { (lo + hi) / T::lit(2.0) } else { T::zero() };
    let tau = transmit_probability(p, params.cw_min, params.backoff_stages);

    let nf = T::from_count(n);
    let idle = (T::one() - tau).powi(n as i32);
    let busy = T::one() - idle;
    let success = nf * tau * (T::one() - tau).powi(others);
    let collision_slot = busy - success;
    let mean_slot = idle * params.slot_time() + success * params.success_time() + collision_slot * params.collision_time();
    let throughput = success * params.payload_bits() / mean_slot;
    Ok(BianchiPoint {
        tau,
        collision: p,
        throughput,
    })
}

/// Saturation capacity `R(N)` in bit/s.
pub fn saturation_capacity<T: Real>(params: &WifiMacParams<T>) -> Result<T> {
    solve_bianchi(params).map(|pt| pt.throughput)
}

/// Rate each WiFi user keeps when LTE-U takes a fraction `duty_cycle` of airtime.
pub fn per_wifi_user_rate<T: Real>(duty_cycle: T, capacity: T, n_users: usize) -> T {
    capacity * (T::one() - duty_cycle) / T::from_count(n_users)
}

/// Largest duty cycle that still leaves every WiFi user its guaranteed rate,
/// clamped to `[0, 1]`.
pub fn max_duty_cycle_for<T: Real>(capacity: T, n_users: usize, requirement: T) -> T {
    let bound = T::one() - T::from_count(n_users) * requirement / capacity;
    bound.max(T::zero()).min(T::one())
}

pub fn max_duty_cycle<T: Real>(params: &WifiMacParams<T>) -> Result<T> {
    let capacity = saturation_capacity(params)?;
    Ok(max_duty_cycle_for(capacity, params.n_users, params.rate_requirement))
}
