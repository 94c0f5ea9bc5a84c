//! A learner facing a frozen pure opponent settles on a best response.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uav_vr_alloc::game::{argmax_lowest, build_action_catalog, ActionCatalog, ActionSpace, World, WorldBuilder};
use uav_vr_alloc::learners::{learner_step, EsnLearner, EsnParams, FixedLearner, Learner};
use uav_vr_alloc::vr_traffic::{Format, VrParams};
use uav_vr_alloc::ChannelParams64;

const SEEDS: u64 = 100;
const HORIZON: usize = 500;
const REQUIRED: usize = 95;
/// Stationary exploration, as in the equilibrium checks.
const EPSILON: f64 = 0.1;

/// Two UAVs 3 km apart with one nearby user each; UAV 1 is frozen.
fn world(seed: u64) -> (World, Vec<ActionCatalog>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uavs = [(0.0, 0.0, 100.0), (3000.0, 0.0, 100.0)];
    let mut users = vec![];
    for &(x, y, _) in &uavs {
        let r: f64 = rng.gen_range(0.0..400.0);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        users.push((x + r * phi.cos(), y + r * phi.sin()));
    }
    let vr = VrParams::<f64>::default();
    let w = WorldBuilder {
        channel: &ChannelParams64::default(),
        vr: &vr,
        duty_cycle: 0.0,
        uavs: &uavs,
        users: &users,
        association: &[Some(0), Some(1)],
    }
    .build()
    .unwrap();
    let space = ActionSpace {
        n_users: 1,
        dl_rbs: 5,
        ul_rbs: 5,
        share_levels: 0,
        quality_levels: 3,
        formats: Format::ALL.to_vec(),
    };
    let cats: Vec<ActionCatalog> = (0..2).map(|j| build_action_catalog(&space, 40, seed + j).unwrap()).collect();
    let frozen = rng.gen_range(0..cats[1].len());
    (w, cats, frozen)
}

fn best_responses(w: &World, cats: &[ActionCatalog], frozen: usize) -> Vec<usize> {
    let u: Vec<f64> = (0..cats[0].len())
        .map(|a| w.evaluate_utility(0, &[cats[0].get(a), cats[1].get(frozen)]).unwrap())
        .collect();
    let best = u[argmax_lowest(&u)];
    (0..u.len()).filter(|&a| u[a] == best).collect()
}

/// Seeds whose learner ends with its greedy choice in the best-response set.
fn converged(make: impl Fn(u64, &[ActionCatalog]) -> Box<dyn Learner>) -> usize {
    let mut hits = 0;
    for seed in 0..SEEDS {
        let (w, cats, frozen) = world(seed);
        let br = best_responses(&w, &cats, frozen);
        let mut learners: Vec<Box<dyn Learner>> = vec![
            make(seed, &cats),
            Box::new(FixedLearner { action: frozen, n_actions: cats[1].len() }),
        ];
        for _ in 0..HORIZON {
            learner_step(&mut learners, &cats, &w, EPSILON).unwrap();
        }
        if br.contains(&learners[0].choose(0.0).unwrap().action) {
            hits += 1;
        }
    }
    hits
}

#[test]
fn leaky_esn_finds_the_best_response() {
    let params = EsnParams::<f64> { reservoir_size: 200, ..Default::default() };
    let hits = converged(|seed, cats| Box::new(EsnLearner::new(&params, 2, cats[0].len(), seed, seed + 1000).unwrap()));
    assert!(hits >= REQUIRED, "{hits}/{SEEDS}");
}
