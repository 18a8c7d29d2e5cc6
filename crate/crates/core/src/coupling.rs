//! Position/orientation coupling imposed by leg I.
//!
//! Eliminating the leg I slider between its two rod equations leaves one
//! relation between `x_p`, `y_p` and the roll `alpha`; for fixed `alpha` it is
//! an ellipse centred at `x_p = d1 - D1` on `y_p = 0`.

use thiserror::Error;

use crate::params::MachineParams;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum CouplingError {
    #[error("EmptyLocus: no platform position reachable at alpha = {0}")]
    EmptyLocus(f64),
}

/// Which coordinate axis carries the larger semi-axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MajorAxis {
    X,
    Y,
}

/// Locus of platform positions `(x_p, y_p)` reachable at a fixed roll.
///
/// `a` is always the semi-axis along x and `b` the one along y; which of them
/// is the larger is reported by [`IsoOrientationEllipse::major_axis`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoOrientationEllipse<T> {
    pub alpha: T,
    pub center_x: T,
    pub a: T,
    pub b: T,
}

impl<T: Real> IsoOrientationEllipse<T> {
    pub fn major_axis(&self) -> MajorAxis {
        if self.a >= self.b {
            MajorAxis::X
        } else {
            MajorAxis::Y
        }
    }

    pub fn is_point(&self) -> bool {
        self.a == T::zero()
    }

    pub fn is_segment(&self) -> bool {
        self.b == T::zero()
    }
}

/// `R1² + r1² - 2 R1 r1 cos(alpha)`: squared distance between matching leg I joints projected on the yz plane.
#[inline]
pub(crate) fn leg1_chord_sq<T: Real>(cos_alpha: T, p: &MachineParams<T>) -> T {
    let (big_r, r) = (p.leg1_platform_half_span, p.leg1_slider_half_span);
    big_r * big_r + r * r - T::two() * big_r * r * cos_alpha
}

/// Raw coupling residual (mm⁴); zero iff `(x_p, y_p, alpha)` is consistent for leg I.
pub fn coupling_residual<T: Real>(x_p: T, y_p: T, alpha: T, p: &MachineParams<T>) -> T {
    let (s, c) = alpha.sin_cos();
    coupling_residual_sc(x_p, y_p, s, c, p)
}

/// [`coupling_residual`] with the roll given by its sine and cosine.
pub(crate) fn coupling_residual_sc<T: Real>(x_p: T, y_p: T, s: T, c: T, p: &MachineParams<T>) -> T {
    let big_r = p.leg1_platform_half_span;
    let l1 = p.rod_length[0];
    let m = leg1_chord_sq(c, p);
    let dx = x_p + p.leg1_dx();
    let k = big_r * big_r * s * s;
    k * dx * dx + m * y_p * y_p - k * (l1 * l1 - m)
}

/// Coupling residual divided by `R1² L1²`.
pub fn coupling_residual_scaled<T: Real>(x_p: T, y_p: T, alpha: T, p: &MachineParams<T>) -> T {
    coupling_residual(x_p, y_p, alpha, p) / coupling_scale(p)
}

pub(crate) fn coupling_scale<T: Real>(p: &MachineParams<T>) -> T {
    let big_r = p.leg1_platform_half_span;
    let l1 = p.rod_length[0];
    big_r * big_r * l1 * l1
}

/// Iso-orientation ellipse for roll `alpha`.
///
/// A radicand within a few ulps of zero is treated as zero and gives a single
/// point; a clearly negative radicand is an empty locus.
pub fn iso_orientation_ellipse<T: Real>(alpha: T, p: &MachineParams<T>) -> Result<IsoOrientationEllipse<T>, CouplingError> {
    let (s, c) = alpha.sin_cos();
    let l1 = p.rod_length[0];
    let m = leg1_chord_sq(c, p);
    let radicand = l1 * l1 - m;
    let slack = T::epsilon() * T::lit(16.0) * l1 * l1;
    if radicand < -slack {
        return Err(CouplingError::EmptyLocus(alpha.to_f64().unwrap_or(f64::NAN)));
    }
    let a_sq = radicand.max(T::zero());
    let big_r = p.leg1_platform_half_span;
    let b_sq = big_r * big_r * s * s * a_sq / m;
    Ok(IsoOrientationEllipse { alpha, center_x: -p.leg1_dx(), a: a_sq.sqrt(), b: b_sq.sqrt() })
}

/// Point of the ellipse at parameter `t`: `(center_x + a cos t, b sin t)`.
pub fn ellipse_point<T: Real>(e: &IsoOrientationEllipse<T>, t: T) -> (T, T) {
    let (s, c) = t.sin_cos();
    (e.center_x + e.a * c, e.b * s)
}

/// Ellipse point from a precomputed `(sin t, cos t)` pair.
pub fn ellipse_point_sc<T: Real>(e: &IsoOrientationEllipse<T>, sin_t: T, cos_t: T) -> (T, T) {
    (e.center_x + e.a * cos_t, e.b * sin_t)
}
