//! Structural invariants as proptest properties, sized for 10^4 cases each.

use num_rational::Ratio;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uav_vr_alloc::game::{build_action_catalog, ActionSpace};
use uav_vr_alloc::learners::{EsnParams, LeakyEsn};
use uav_vr_alloc::vr_traffic::Format;
use uav_vr_alloc::{ExactStrategy, Strategy as Mixed};

pub const CASES: u32 = 10_000;

/// An action space, a catalog cap and a sampling seed.
pub fn catalog_case() -> impl Strategy<Value = (ActionSpace, usize, u64)> {
    (1usize..=6, 1usize..=8, 1usize..=8, 0usize..=6, 1usize..=4, 1usize..=3, 1usize..=40, any::<u64>()).prop_map(
        |(n_users, dl_rbs, ul_rbs, share_levels, quality_levels, n_formats, cap, seed)| {
            let space = ActionSpace {
                n_users,
                dl_rbs,
                ul_rbs,
                share_levels,
                quality_levels,
                formats: Format::ALL[..n_formats].to_vec(),
            };
            (space, cap, seed)
        },
    )
}

/// Every block of every catalog action is held by exactly one user.
pub fn column_sums((space, cap, seed): (ActionSpace, usize, u64)) -> Result<(), TestCaseError> {
    let cat = build_action_catalog(&space, cap, seed).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(cat.len() <= cap);
    for a in cat.actions() {
        for (rbs, assign) in [(space.dl_rbs, 0), (space.ul_rbs, 1)] {
            for k in 0..rbs {
                let holders: usize = (0..space.n_users)
                    .map(|u| {
                        let v = if assign == 0 { a.dl_assignment(u) } else { a.ul_assignment(u) };
                        usize::from(v[k])
                    })
                    .sum();
                prop_assert_eq!(holders, 1, "block {} in {:?}", k, a);
            }
        }
    }
    Ok(())
}

/// Unlicensed shares of every catalog action add up to at most one, exactly.
pub fn share_cap((space, cap, seed): (ActionSpace, usize, u64)) -> Result<(), TestCaseError> {
    let cat = build_action_catalog(&space, cap, seed).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for a in cat.actions() {
        prop_assert!(a.share_sum() <= Ratio::from_integer(1), "{:?}", a);
        prop_assert!(a.share_level.iter().all(|&s| s <= space.share_levels));
        if space.share_levels == 0 {
            prop_assert!(!a.uses_unlicensed());
        }
    }
    Ok(())
}

pub fn play_counts() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..5_000, 1..40).prop_filter("some play", |c| c.iter().any(|&x| x > 0))
}

/// Empirical strategies are nonnegative and sum to one.
pub fn strategy_normalization(counts: Vec<u64>) -> Result<(), TestCaseError> {
    let float = Mixed::from_counts(&counts).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(float.probs().iter().all(|&p| (0.0..=1.0).contains(&p)));
    prop_assert!((float.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let exact = ExactStrategy::from_counts(&counts).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(exact.probs().iter().sum::<Ratio<i64>>(), Ratio::from_integer(1));
    Ok(())
}

/// Hyperparameters, network seed and a driving input sequence.
pub fn reservoir_case() -> impl Strategy<Value = (EsnParams<f64>, usize, u64, Vec<f64>)> {
    (1usize..=24, 1e-3f64..=1.0, 1e-3f64..=1.0, 1e-3f64..=1.0, 0.0f64..=5.0, 0.0f64..0.99, 1usize..=5, any::<u64>())
        .prop_flat_map(|(n_w, delta, c, z, input_scale, radius_scale, b, seed)| {
            let params = EsnParams {
                reservoir_size: n_w,
                step_size: delta,
                time_constant: c,
                leak_rate: z,
                input_scale,
                radius_scale,
                ..EsnParams::default()
            };
            let inputs = prop::collection::vec(-1e3f64..1e3, 60 * (b + 1));
            (Just(params), Just(b), Just(seed), inputs)
        })
}

/// Reservoir states stay finite and inside |mu| <= 1/z from a zero start.
pub fn reservoir_finiteness((params, b, seed, inputs): (EsnParams<f64>, usize, u64, Vec<f64>)) -> Result<(), TestCaseError> {
    let mut esn = LeakyEsn::new(&params, b, 3, &mut ChaCha8Rng::seed_from_u64(seed))
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let bound = 1.0 / params.leak_rate * (1.0 + 1e-12);
    for x in inputs.chunks(b + 1) {
        let mu = esn.update_reservoir(x).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(mu.iter().all(|m| m.is_finite() && m.abs() <= bound), "{:?}", mu);
    }
    Ok(())
}
