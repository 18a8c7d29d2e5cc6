//! Rod-length constraint equations of the parallel module and the per-leg
//! geometric predicates shared by the solvers.

use crate::params::{JointCoords, MachineParams};
use crate::scalar::Real;
use crate::transforms::{rod_endpoints, PlatformPose, RodEndpoints, Vec3, ROD_LEG};

/// Residuals of the four independent constraint equations, in mm²:
/// leg I rod 1, leg I rod 2, leg II, leg III.
pub fn closed_form_residuals<T: Real>(pose: &PlatformPose<T>, rho: &JointCoords<T>, p: &MachineParams<T>) -> [T; 4] {
    let (s, c) = pose.alpha.sin_cos();
    let (x, y, z) = (pose.x, pose.y, pose.z);
    let (big_r1, r1) = (p.leg1_platform_half_span, p.leg1_slider_half_span);
    let (big_r2, r4) = (p.leg23_platform_y, p.leg23_slider_y);
    let [l1, l2, l3] = p.rod_length;
    let x1 = x + p.leg1_dx();
    let x2 = x + p.leg23_dx();
    let sq = |v: T| v * v;
    [
        sq(x1) + sq(y + big_r1 * c - r1) + sq(z + big_r1 * s - rho.rho1) - sq(l1),
        sq(x1) + sq(y - big_r1 * c + r1) + sq(z - big_r1 * s - rho.rho1) - sq(l1),
        sq(x2) + sq(y - big_r2 * c + r4) + sq(z - big_r2 * s - rho.rho2) - sq(l2),
        sq(x2) + sq(y + big_r2 * c - r4) + sq(z + big_r2 * s - rho.rho3) - sq(l3),
    ]
}

/// Same four residuals evaluated from transformed joint positions, `|B - A|² - L²`.
pub fn chain_residuals<T: Real>(pose: &PlatformPose<T>, rho: &JointCoords<T>, p: &MachineParams<T>) -> [T; 4] {
    let rods = rod_endpoints(pose, rho, p);
    let r = |i: usize| {
        let d = sub(rods.platform[i], rods.slider[i]);
        dot(d, d) - p.rod_length[ROD_LEG[i]] * p.rod_length[ROD_LEG[i]]
    };
    [r(0), r(1), r(2), r(4)]
}

/// Closed-form residuals divided by the squared rod length of their leg.
pub fn dimensionless_residuals<T: Real>(pose: &PlatformPose<T>, rho: &JointCoords<T>, p: &MachineParams<T>) -> [T; 4] {
    let r = closed_form_residuals(pose, rho, p);
    let l = p.rod_length;
    [r[0] / (l[0] * l[0]), r[1] / (l[0] * l[0]), r[2] / (l[1] * l[1]), r[3] / (l[2] * l[2])]
}

pub fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

/// The two slider positions that put a rod of length `length` between a
/// platform joint `b` and a guideway at `(ax, ay)`: `[upper, lower]`, where
/// upper is the smaller base z (the slider above the platform joint).
/// `None` when the rod cannot reach the guideway.
pub fn slider_solutions<T: Real>(b: Vec3<T>, ax: T, ay: T, length: T) -> Option<[T; 2]> {
    let dx = b[0] - ax;
    let dy = b[1] - ay;
    let h = length * length - dx * dx - dy * dy;
    if h < T::zero() {
        return None;
    }
    let root = h.sqrt();
    Some([b[2] - root, b[2] + root])
}

/// Base z points downward, so a slider joint is above its platform joint when
/// its z is strictly smaller.
#[inline]
pub fn is_above<T: Real>(slider_joint: Vec3<T>, platform_joint: Vec3<T>) -> bool {
    slider_joint[2] < platform_joint[2]
}

/// Whether every rod of `leg` (0, 1, 2) has its slider joint above its platform joint.
pub fn leg_slider_above<T: Real>(rods: &RodEndpoints<T>, leg: usize) -> bool {
    (0..6).filter(|&i| ROD_LEG[i] == leg).all(|i| is_above(rods.slider[i], rods.platform[i]))
}

/// Smallest elevation of the rods of `leg` above the horizontal plane (rad).
/// A rod at zero elevation is a serial singularity of the leg.
pub fn leg_elevation<T: Real>(rods: &RodEndpoints<T>, leg: usize) -> T {
    (0..6)
        .filter(|&i| ROD_LEG[i] == leg)
        .map(|i| {
            let d = sub(rods.platform[i], rods.slider[i]);
            let len = dot(d, d).sqrt();
            (d[2].abs() / len).min(T::one()).asin()
        })
        .fold(T::infinity(), T::min)
}

/// Rod crossing test of leg I: the rods stay apart while `R1 cos(alpha) > r1`.
#[inline]
pub fn leg1_rods_clear<T: Real>(alpha: T, p: &MachineParams<T>) -> bool {
    p.leg1_platform_half_span * alpha.cos() > p.leg1_slider_half_span
}

#[inline]
pub fn sub<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn dot<T: Real>(a: Vec3<T>, b: Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
