//! Slot-by-slot simulation of saturated stations running RTS/CTS with binary
//! exponential backoff. Shares no code with the analytical model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uav_vr_alloc::WifiMacParams64;

pub struct MacEstimate {
    /// Delivered payload bits per second.
    pub throughput: f64,
    /// Fraction of attempts that collided.
    pub collision_rate: f64,
}

/// Runs `slots` backoff slots (idle, success or collision) for `p.n_users` stations.
pub fn simulate(p: &WifiMacParams64, slots: u64, seed: u64) -> MacEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window = |stage: u32| p.cw_min << stage;
    let n = p.n_users;
    let mut stage = vec![0u32; n];
    let mut counter: Vec<usize> = (0..n).map(|_| rng.gen_range(0..window(0))).collect();

    let t_slot = p.slot_time_us * 1e-6;
    let t_success = (p.rts_us + 3.0 * p.sifs_us + p.cts_us + p.ack_us + p.difs_us) * 1e-6
        + (p.mac_header_bits + 8.0 * p.payload_bytes) / p.phy_rate;
    let t_collision = (p.rts_us + p.difs_us) * 1e-6;

    let (mut elapsed, mut successes, mut attempts, mut collided) = (0.0, 0u64, 0u64, 0u64);
    let mut senders = Vec::with_capacity(n);
    for _ in 0..slots {
        senders.clear();
        senders.extend((0..n).filter(|&i| counter[i] == 0));
        for i in 0..n {
            if counter[i] > 0 {
                counter[i] -= 1;
            }
        }
        attempts += senders.len() as u64;
        match senders.len() {
            0 => elapsed += t_slot,
            1 => {
                elapsed += t_success;
                successes += 1;
                stage[senders[0]] = 0;
            }
            _ => {
                elapsed += t_collision;
                collided += senders.len() as u64;
                for &i in &senders {
                    stage[i] = (stage[i] + 1).min(p.backoff_stages);
                }
            }
        }
        for &i in &senders {
            counter[i] = rng.gen_range(0..window(stage[i]));
        }
    }
    MacEstimate {
        throughput: successes as f64 * 8.0 * p.payload_bytes / elapsed,
        collision_rate: if attempts == 0 { 0.0 } else { collided as f64 / attempts as f64 },
    }
}
