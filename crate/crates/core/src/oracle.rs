//! Brute-force reference solvers.
//!
//! Both scan the orientation over a uniform grid, bracket sign changes of a
//! residual evaluated directly from the constraint equations and bisect. Grid
//! points where the residual touches zero without changing sign are refined by
//! a golden-section search so tangential zeros are not lost. Meant for tests
//! and debugging, not for production paths.

use rayon::prelude::*;

use crate::constraints::closed_form_residuals;
use crate::coupling::{coupling_residual, coupling_scale};
use crate::fk::fk_back_substitute;
use crate::ik::{joint_solutions, Branch};
use crate::params::{JointCoords, MachineParams};
use crate::scalar::{angle_diff, wrap_angle, Real};
use crate::transforms::PlatformPose;

pub const DEFAULT_GRID: usize = 4096;

/// Golden-section searches for tangential zeros stop at this bracket width (rad).
/// Sign-change brackets are bisected down to adjacent floating-point values.
pub const ANGLE_RESOLUTION: f64 = 1e-10;

/// A tangential zero is accepted when the residual minimum is below this.
pub const TANGENT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleFk<T> {
    pub solutions: Vec<PlatformPose<T>>,
    /// Grid angles where back-substitution hit a denominator guard.
    pub guard_band_angles: Vec<T>,
    /// Zeros whose bracket collapsed onto a guard band; not part of `solutions`.
    pub guard_band_zeros: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleIkCandidate<T> {
    pub alpha: T,
    pub rho: JointCoords<T>,
    pub branch_tags: [Branch; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleIk<T> {
    pub alphas: Vec<T>,
    pub candidates: Vec<OracleIkCandidate<T>>,
}

fn grid<T: Real>(n: usize) -> Vec<T> {
    let n = n.max(3);
    (0..n).map(|i| -T::PI() + T::TAU() * T::lit((i + 1) as f64) / T::lit(n as f64)).collect()
}

enum Zero<T> {
    Regular(T),
    Guard(T),
}

/// Zeros of `f` over the circle from a sampled grid; `f` returns `None`
/// inside guard bands.
fn scan_zeros<T: Real, F: Fn(T) -> Option<T> + Sync>(f: &F, n: usize) -> (Vec<Zero<T>>, Vec<T>) {
    let angles = grid::<T>(n);
    let values: Vec<Option<T>> = angles.par_iter().map(|&a| f(a)).collect();
    let len = angles.len();
    let step = T::TAU() / T::lit(len as f64);
    let mut zeros = Vec::new();
    let guards: Vec<T> = angles.iter().zip(&values).filter(|(_, v)| v.is_none()).map(|(a, _)| *a).collect();

    for i in 0..len {
        let j = (i + 1) % len;
        let (a, b) = (angles[i], if j == 0 { angles[0] + T::TAU() } else { angles[j] });
        let (Some(fa), Some(fb)) = (values[i], values[j]) else { continue };
        if fa == T::zero() {
            zeros.push(Zero::Regular(a));
            continue;
        }
        if (fa < T::zero()) != (fb < T::zero()) && fb != T::zero() {
            zeros.push(bisect(f, a, b, fa));
            continue;
        }
        // touching without crossing: local minimum of |f| at a grid point
        let h = (i + len - 1) % len;
        if let Some(fh) = values[h] {
            if fa.abs() <= fh.abs() && fa.abs() <= fb.abs() && (fh < T::zero()) == (fa < T::zero()) {
                if let Some(z) = golden_touch(f, a - step, a + step) {
                    zeros.push(z);
                }
            }
        }
    }
    (zeros, guards)
}

fn bisect<T: Real, F: Fn(T) -> Option<T>>(f: &F, mut a: T, mut b: T, mut fa: T) -> Zero<T> {
    loop {
        let m = a + (b - a) * T::half();
        if !(m > a && m < b) {
            break;
        }
        let Some(fm) = f(m) else { return Zero::Guard(wrap_angle(m)) };
        if fm == T::zero() {
            return Zero::Regular(wrap_angle(m));
        }
        if (fm < T::zero()) == (fa < T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Zero::Regular(wrap_angle(a + (b - a) * T::half()))
}

fn golden_touch<T: Real, F: Fn(T) -> Option<T>>(f: &F, mut a: T, mut b: T) -> Option<Zero<T>> {
    let ratio = T::lit(0.618_033_988_749_894_9);
    let res = T::tol(ANGLE_RESOLUTION, 8.0);
    let g = |x: T| f(x).map(|v| v.abs());
    while b - a > res {
        let x1 = b - ratio * (b - a);
        let x2 = a + ratio * (b - a);
        let (g1, g2) = (g(x1)?, g(x2)?);
        if g1 <= g2 {
            b = x2;
        } else {
            a = x1;
        }
    }
    let m = a + (b - a) * T::half();
    match f(m) {
        None => Some(Zero::Guard(wrap_angle(m))),
        Some(v) if v.abs() <= T::tol(TANGENT_TOLERANCE, 64.0) => Some(Zero::Regular(wrap_angle(m))),
        _ => None,
    }
}

fn dedupe_angles<T: Real>(mut v: Vec<T>) -> Vec<T> {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut out: Vec<T> = Vec::new();
    for a in v {
        if !out.iter().any(|&b| angle_diff(a, b).abs() < T::tol(1e-8, 64.0)) {
            out.push(a);
        }
    }
    out
}

/// Reference forward kinematics by dense scan of the roll.
pub fn oracle_fk<T: Real>(rho: &JointCoords<T>, p: &MachineParams<T>, n: usize) -> OracleFk<T> {
    let l1sq = p.rod_length[0] * p.rod_length[0];
    let f = |a: T| fk_back_substitute(a, rho, p).ok().map(|pose| closed_form_residuals(&pose, rho, p)[0] / l1sq);
    let (zeros, guard_band_angles) = scan_zeros(&f, n);
    let mut regular = Vec::new();
    let mut guard_band_zeros = Vec::new();
    for z in zeros {
        match z {
            Zero::Regular(a) => regular.push(a),
            Zero::Guard(a) => guard_band_zeros.push(a),
        }
    }
    let solutions = dedupe_angles(regular)
        .into_iter()
        .filter_map(|a| fk_back_substitute(a, rho, p).ok())
        .collect();
    OracleFk { solutions, guard_band_angles, guard_band_zeros: dedupe_angles(guard_band_zeros) }
}

/// Reference inverse kinematics of the parallel module by dense scan of the roll.
pub fn oracle_ik<T: Real>(x: T, y: T, z: T, p: &MachineParams<T>, n: usize) -> OracleIk<T> {
    let scale = coupling_scale(p);
    let f = |a: T| Some(coupling_residual(x, y, a, p) / scale);
    let (zeros, _) = scan_zeros(&f, n);
    let alphas = dedupe_angles(
        zeros
            .into_iter()
            .map(|z| match z {
                Zero::Regular(a) | Zero::Guard(a) => a,
            })
            .collect(),
    );
    let candidates = alphas
        .iter()
        .flat_map(|&alpha| {
            joint_solutions(&PlatformPose::new(x, y, z, alpha), p)
                .into_iter()
                .map(move |(rho, branch_tags)| OracleIkCandidate { alpha, rho, branch_tags })
        })
        .collect();
    OracleIk { alphas, candidates }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fk::fk_parallel;
    use crate::ik::ik_parallel;
    use crate::params::reference_params;

    #[test]
    fn agrees_with_inverse_at_reference_pose() {
        let p = reference_params::<f64>();
        let o = oracle_ik(-240.0, -86.0, 1000.0, &p, DEFAULT_GRID);
        let a = ik_parallel(-240.0, -86.0, 1000.0, &p).unwrap();
        assert_eq!(o.candidates.len(), a.len());
        assert_eq!(o.alphas.len(), 4);
    }

    #[test]
    fn symmetric_target_has_zero_roll() {
        let p = reference_params::<f64>();
        let o = oracle_ik(-240.0, 0.0, 1000.0, &p, DEFAULT_GRID);
        assert!(o.alphas.iter().any(|a| a.abs() < 1e-9));
    }

    #[test]
    fn agrees_with_forward_at_reference_joints() {
        let p = reference_params::<f64>();
        let rho = JointCoords::new(674.0, 685.0, 250.0);
        let o = oracle_fk(&rho, &p, DEFAULT_GRID);
        let a = fk_parallel(&rho, &p).unwrap();
        assert_eq!(o.solutions.len(), a.len());
        for (s, q) in a.iter().zip(&o.solutions) {
            assert!((s.pose.alpha - q.alpha).abs() < 1e-6);
        }
    }

    #[test]
    fn unreachable_joints_give_nothing() {
        let p = reference_params::<f64>();
        let o = oracle_fk(&JointCoords::new(100.0, 5000.0, -4000.0), &p, DEFAULT_GRID);
        assert!(o.solutions.is_empty());
    }
}
