//! The resource-allocation game between UAVs.

pub mod action;
pub mod catalog;
pub mod normal_form;
pub mod world;

pub use action::Action;
pub use catalog::{action_space_size, build_action_catalog, ActionCatalog, ActionSpace};
pub use normal_form::{argmax_lowest, MixedStrategy, NormalFormGame, DEFAULT_CELL_CAP};
pub use world::{JointOutcome, UserOutcome, World, WorldBuilder};

use crate::error::Result;

/// Enumerates the full utility table of the game induced by `world` and the
/// per-UAV catalogs. Desk-scale only: refuses tables above `cell_cap`.
pub fn enumerate_game(world: &World, catalogs: &[ActionCatalog], cell_cap: u128) -> Result<NormalFormGame<f64>> {
    let counts = catalogs.iter().map(|c| c.len()).collect();
    NormalFormGame::from_fn(counts, cell_cap, |joint| {
        let actions: Vec<&Action> = joint.iter().zip(catalogs).map(|(&a, c)| c.get(a)).collect();
        Ok(world.evaluate(&actions)?.utilities)
    })
}
