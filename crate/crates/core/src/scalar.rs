//! Scalar abstractions shared by the numeric modules.
//!
//! [`Scalar`] is the minimal field-like bound used by the normal-form game
//! code, which also runs on exact rationals. [`Real`] adds the transcendental
//! functions needed by the channel, traffic, WiFi and reservoir models.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};

/// Ordered signed number usable for utilities and probabilities.
pub trait Scalar:
    Num + Signed + FromPrimitive + ToPrimitive + PartialOrd + Copy + Debug + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal. Panics if the value is not representable.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(|| panic!("{x} is not representable"))
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(|| panic!("{n} is not representable"))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Num
        + Signed
        + FromPrimitive
        + ToPrimitive
        + PartialOrd
        + Copy
        + Debug
        + Send
        + Sync
        + 'static
{
}

/// Floating point scalar: `f32` or `f64`.
pub trait Real: Scalar + Float + FloatConst {}

impl Real for f32 {}
impl Real for f64 {}

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// dBm to milliwatts.
pub fn dbm_to_mw<T: Real>(dbm: T) -> T {
    T::lit(10.0).powf(dbm / T::lit(10.0))
}

/// Milliwatts to dBm.
pub fn mw_to_dbm<T: Real>(mw: T) -> T {
    T::lit(10.0) * mw.log10()
}

/// Linear power ratio from decibels.
pub fn db_to_linear<T: Real>(db: T) -> T {
    dbm_to_mw(db)
}
