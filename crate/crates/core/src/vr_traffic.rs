//! VR image sizes, QoE and end-to-end transmission delay.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// 360-degree image projection formats, ordered by data size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Format {
    Pyramid,
    Cube,
    Equirect,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Pyramid, Format::Cube, Format::Equirect];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Format> {
        Self::ALL.get(i).copied()
    }
}

/// Index into the ordered quality levels, `0` being the lowest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QualityLevel(pub usize);

/// Data-size model `m(l, f) = base * quality_scale(l) * format_factor(f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VrImageModel<T> {
    quality_scale: Vec<T>,
    format_factors: [T; 3],
    base_size_bits: T,
}

impl<T: Real> VrImageModel<T> {
    pub fn new(quality_scale: Vec<T>, format_factors: [T; 3], base_size_bits: T) -> Result<Self> {
        let op = "VrImageModel::new";
        if quality_scale.is_empty() {
            return Err(Error::contract(op, "at least one quality level is required"));
        }
        if quality_scale.windows(2).any(|w| !(w[0] < w[1])) || !(quality_scale[0] > T::zero()) {
            return Err(Error::contract(op, "quality scale must be positive and strictly increasing"));
        }
        if quality_scale[quality_scale.len() - 1] != T::one() {
            return Err(Error::contract(op, "the highest quality level must have scale 1"));
        }
        if format_factors.windows(2).any(|w| !(w[0] < w[1]))
            || !(format_factors[0] > T::zero())
            || format_factors[2] != T::one()
        {
            return Err(Error::contract(
                op,
                "format factors must be positive, strictly increasing and end at 1",
            ));
        }
        if !(base_size_bits > T::zero() && base_size_bits.is_finite()) {
            return Err(Error::contract(op, "base size must be finite and > 0"));
        }
        Ok(Self {
            quality_scale,
            format_factors,
            base_size_bits,
        })
    }

    pub fn num_levels(&self) -> usize {
        self.quality_scale.len()
    }

    pub fn highest(&self) -> QualityLevel {
        QualityLevel(self.quality_scale.len() - 1)
    }

    pub fn base_size_bits(&self) -> T {
        self.base_size_bits
    }

    fn scale(&self, level: QualityLevel) -> Result<T> {
        self.quality_scale.get(level.0).copied().ok_or_else(|| {
            Error::contract(
                "image_size",
                format!("quality level {} outside 0..{}", level.0, self.quality_scale.len()),
            )
        })
    }

    /// Data size of one image in bits.
    pub fn image_size(&self, level: QualityLevel, format: Format) -> Result<T> {
        Ok(self.base_size_bits * self.scale(level)? * self.format_factors[format.index()])
    }

    /// QoE in (0, 1]: image size relative to the highest-quality equirectangular image.
    pub fn qoe(&self, level: QualityLevel, format: Format) -> Result<T> {
        Ok(self.scale(level)? * self.format_factors[format.index()])
    }
}

/// Size of the tracking report a user sends on the uplink each frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingPayload<T> {
    pub size_bits: T,
}

fn transfer_time<T: Real>(bits: T, rate: T) -> T {
    if bits == T::zero() {
        T::zero()
    } else if rate > T::zero() {
        bits / rate
    } else {
        T::infinity()
    }
}

/// Downlink image time plus uplink tracking time. A zero rate carrying a
/// nonzero payload yields `+inf`: the user cannot be served.
pub fn total_delay<T: Real>(image_bits: T, downlink_rate: T, tracking_bits: T, uplink_rate: T) -> T {
    transfer_time(image_bits, downlink_rate) + transfer_time(tracking_bits, uplink_rate)
}

/// Flat traffic parameters as they appear in the `[vr]` config section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VrParams<T> {
    /// Pixel-count scale per quality level, lowest first; the last entry is 1.
    pub quality_scale: Vec<T>,
    /// Size factors for pyramid, cube and equirectangular.
    pub format_factors: [T; 3],
    pub base_size_bits: T,
    pub tracking_bits: T,
    /// Maximal tolerable total delay, seconds.
    pub delay_budget: T,
}

impl<T: Real> Default for VrParams<T> {
    fn default() -> Self {
        Self {
            quality_scale: vec![T::lit(0.44), T::lit(0.69), T::one()],
            format_factors: [T::lit(0.20), T::lit(0.75), T::one()],
            base_size_bits: T::lit(DEFAULT_BASE_SIZE_BITS),
            tracking_bits: T::lit(DEFAULT_TRACKING_BITS),
            delay_budget: T::lit(0.020),
        }
    }
}

/// Default full-quality image size, bits. Sized so that a few users per UAV
/// can meet the 20 ms budget over five licensed 180 kHz blocks; a 51.2 Mb/s
/// stream (1.024 Mbit per 20 ms) cannot be carried by the licensed band alone.
pub const DEFAULT_BASE_SIZE_BITS: f64 = 20_000.0;
/// Default tracking report size, bits.
pub const DEFAULT_TRACKING_BITS: f64 = 2_000.0;

impl<T: Real> VrParams<T> {
    pub fn image_model(&self) -> Result<VrImageModel<T>> {
        VrImageModel::new(self.quality_scale.clone(), self.format_factors, self.base_size_bits)
    }

    pub fn tracking(&self) -> TrackingPayload<T> {
        TrackingPayload {
            size_bits: self.tracking_bits,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.image_model().map_err(|e| match e {
            Error::Contract { detail, .. } => Error::config("vr", detail),
            other => other,
        })?;
        if !(self.tracking_bits > T::zero()) {
            return Err(Error::config("vr.tracking_bits", "must be > 0"));
        }
        if !(self.delay_budget > T::zero()) {
            return Err(Error::config("vr.delay_budget", "must be > 0"));
        }
        Ok(())
    }
}
