//! Planar system geometry and per-link path-loss amplitudes.
//!
//! All path-loss functions return *amplitude* factors; the corresponding power
//! gain is the square. Direct links follow a log-distance law with exponent
//! `η_pl`. IRS links use a plate-scattering model where the two hops of a
//! reflected path combine as
//!
//! ```text
//! a(d_in, d_out) = A_e √(cos_in · cos_out) / (4π · d_in · d_out),   A_e = w²
//! ```
//!
//! and each hop is stored separately as `√(A_e cos / 4π) / d`, so the product
//! of the two stored hop amplitudes equals the cascade amplitude. The
//! [`PathLoss`] trait lets a different model be dropped in.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Carrier wavelength for a frequency in Hz.
pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position2D {
    pub x: f64,
    pub y: f64,
}

impl Position2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// A planar IRS. `orientation` is the unit normal on the reflecting side.
#[derive(Debug, Clone, PartialEq)]
pub struct IrsGeometry {
    pub center: Position2D,
    pub orientation: [f64; 2],
    pub element_count: usize,
    /// Element edge length in meters.
    pub element_width: f64,
}

impl IrsGeometry {
    pub fn new(
        center: Position2D,
        orientation: [f64; 2],
        element_count: usize,
        element_width: f64,
    ) -> Result<Self> {
        let norm = orientation[0].hypot(orientation[1]);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(domain("IRS orientation must be a nonzero finite vector"));
        }
        let geometry = Self {
            center,
            orientation: [orientation[0] / norm, orientation[1] / norm],
            element_count,
            element_width,
        };
        geometry.validate()?;
        Ok(geometry)
    }

    pub fn validate(&self) -> Result<()> {
        if self.element_count == 0 {
            return Err(domain("IRS needs at least one element"));
        }
        if !(self.element_width.is_finite() && self.element_width > 0.0) {
            return Err(domain("IRS element width must be positive"));
        }
        if !self.center.is_finite() {
            return Err(domain("IRS center must be finite"));
        }
        let norm = self.orientation[0].hypot(self.orientation[1]);
        if (norm - 1.0).abs() > 1e-9 {
            return Err(domain("IRS orientation must have unit norm"));
        }
        Ok(())
    }

    /// Element aperture `A_e = w²`.
    pub fn element_area(&self) -> f64 {
        self.element_width * self.element_width
    }

    /// Obliquity factor `max(0, cos ∠(normal, point − element))`.
    pub fn obliquity(&self, element: &Position2D, point: &Position2D) -> f64 {
        let dx = point.x - element.x;
        let dy = point.y - element.y;
        let d = dx.hypot(dy);
        if d == 0.0 {
            return 0.0;
        }
        ((self.orientation[0] * dx + self.orientation[1] * dy) / d).clamp(0.0, 1.0)
    }
}

/// Positions of the IRS elements: a grid with `⌈√N⌉` columns filled row-major.
///
/// Columns run along the surface (perpendicular to the orientation) and
/// successive rows are offset along the orientation. The grid's bounding box
/// is centered on `irs.center`; a partial last row stays left-aligned.
pub fn element_positions(irs: &IrsGeometry) -> Vec<Position2D> {
    let n = irs.element_count;
    if n == 0 {
        return Vec::new();
    }
    let cols = (n as f64).sqrt().ceil() as usize;
    let rows = n.div_ceil(cols);
    let [ox, oy] = irs.orientation;
    let (tx, ty) = (-oy, ox);
    let w = irs.element_width;
    let c0 = (cols as f64 - 1.0) / 2.0;
    let r0 = (rows as f64 - 1.0) / 2.0;
    (0..n)
        .map(|k| {
            let along = (k % cols) as f64 - c0;
            let normal = (k / cols) as f64 - r0;
            Position2D::new(
                irs.center.x + w * (along * tx + normal * ox),
                irs.center.y + w * (along * ty + normal * oy),
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    Bistatic,
    /// Reader doubles as the carrier emitter, single antenna.
    Monostatic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemLayout {
    pub ce_position: Position2D,
    pub reader_position: Position2D,
    pub tag_position: Position2D,
    pub irs: IrsGeometry,
    pub wavelength: f64,
    pub ce_antennas: usize,
    pub architecture: Architecture,
}

impl SystemLayout {
    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(domain("wavelength must be positive"));
        }
        if self.ce_antennas == 0 {
            return Err(domain("carrier emitter needs at least one antenna"));
        }
        for (name, p) in [
            ("CE", &self.ce_position),
            ("reader", &self.reader_position),
            ("tag", &self.tag_position),
        ] {
            if !p.is_finite() {
                return Err(domain(format!("{name} position must be finite")));
            }
        }
        self.irs.validate()?;
        if self.architecture == Architecture::Monostatic {
            if self.ce_position != self.reader_position {
                return Err(domain("monostatic layout requires the CE at the reader"));
            }
            if self.ce_antennas != 1 {
                return Err(domain("monostatic layout uses a single-antenna reader"));
            }
        }
        Ok(())
    }
}

/// Amplitude path-loss model. Implementations must return strictly positive
/// amplitudes for positive distances.
pub trait PathLoss: Send + Sync {
    /// Amplitude of a direct (non-IRS) link of length `d`.
    fn direct(&self, d: f64, wavelength: f64) -> Result<f64>;

    /// Amplitude of one hop between a node and an IRS element.
    fn irs_hop(&self, d: f64, obliquity: f64, element_area: f64, wavelength: f64) -> Result<f64>;
}

/// Default model: log-distance direct links, plate-scattering IRS hops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandInPathLoss {
    pub exponent: f64,
}

impl Default for StandInPathLoss {
    fn default() -> Self {
        Self { exponent: 2.1 }
    }
}

impl StandInPathLoss {
    pub fn new(exponent: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent >= 2.0) {
            return Err(domain("path-loss exponent must be at least 2"));
        }
        Ok(Self { exponent })
    }
}

fn check_distance(d: f64) -> Result<()> {
    if d.is_finite() && d > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("distance must be positive, got {d}")))
    }
}

/// `(λ/4π) · d^(−η/2)`.
pub fn path_loss_direct(d: f64, exponent: f64, wavelength: f64) -> Result<f64> {
    check_distance(d)?;
    Ok(wavelength / (4.0 * PI) * d.powf(-exponent / 2.0))
}

/// Cascade amplitude of a reflected path through one IRS element.
pub fn path_loss_irs_element(
    d_in: f64,
    d_out: f64,
    incidence_cos: f64,
    departure_cos: f64,
    element_area: f64,
) -> Result<f64> {
    check_distance(d_in)?;
    check_distance(d_out)?;
    let power = element_area * element_area * incidence_cos * departure_cos
        / ((4.0 * PI).powi(2) * d_in * d_in * d_out * d_out);
    Ok(power.max(0.0).sqrt())
}

/// One hop of [`path_loss_irs_element`]: `√(A_e cos / 4π) / d`.
pub fn irs_hop_amplitude(d: f64, obliquity: f64, element_area: f64) -> Result<f64> {
    check_distance(d)?;
    Ok((element_area * obliquity.max(0.0) / (4.0 * PI)).sqrt() / d)
}

impl PathLoss for StandInPathLoss {
    fn direct(&self, d: f64, wavelength: f64) -> Result<f64> {
        path_loss_direct(d, self.exponent, wavelength)
    }

    fn irs_hop(&self, d: f64, obliquity: f64, element_area: f64, _wavelength: f64) -> Result<f64> {
        irs_hop_amplitude(d, obliquity, element_area)
    }
}
