//! Resource allocation for UAV-served VR users over licensed and unlicensed
//! LTE spectrum, modelled as a game between UAVs.

pub mod channel;
pub mod config;
pub mod error;
pub mod game;
pub mod learners;
pub mod output;
pub mod scalar;
pub mod sim;
pub mod vr_traffic;
pub mod wifi_coex;

pub use config::{load_config, Algorithm, ExperimentConfig};
pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

pub type ChannelParams64 = channel::ChannelParams<f64>;
pub type VrParams64 = vr_traffic::VrParams<f64>;
pub type WifiMacParams64 = wifi_coex::WifiMacParams<f64>;
pub type Strategy = game::MixedStrategy<f64>;
pub type ExactStrategy = game::MixedStrategy<num_rational::Ratio<i64>>;
pub type Esn64 = learners::LeakyEsn<f64>;
pub type EsnParams64 = learners::EsnParams<f64>;
