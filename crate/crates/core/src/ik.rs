//! Inverse kinematics of the parallel module and of the whole machine.
//!
//! Leg I couples the platform roll to its position. Eliminating the leg I
//! slider leaves a trigonometric relation of degree three in the orientation
//! angle, i.e. a polynomial of degree six in the tangent of the half angle.
//! Its coefficients are recovered by interpolation, its real roots give the
//! orientations, and every orientation then yields up to two slider positions
//! per leg.

use thiserror::Error;

use crate::constraints::{dimensionless_residuals, leg1_rods_clear, leg_elevation, leg_slider_above, max_abs, slider_solutions};
use crate::coupling::{coupling_residual, coupling_scale};
use crate::params::{JointCoords, MachineParams};
use crate::polyroots::{chebyshev_nodes, interpolate_coeffs, real_roots, refine_on_function, Poly, PolyError};
use crate::scalar::{angle_diff, wrap_angle, Real};
use crate::transforms::{platform_attachments, platform_from_tool, rod_endpoints, PlatformPose, ToolPose};

/// Default angular margin (rad) a rod must keep from the horizontal.
pub const DEFAULT_SINGULARITY_MARGIN: f64 = 0.1;

/// Absolute agreement (mm) required between the slider positions that the
/// two rods of leg I independently imply.
pub const RHO1_CONSISTENCY: f64 = 1e-7;

/// Nominal degree of the orientation polynomial.
pub const ORIENTATION_DEGREE: usize = 6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IkError {
    #[error("Unreachable: no real orientation and slider positions satisfy all legs")]
    Unreachable,
    #[error("DegenerateTarget: orientation relation vanishes identically")]
    DegenerateTarget,
    #[error("NoFeasibleSolution: every candidate fails a feasibility check")]
    NoFeasibleSolution,
    #[error("MultipleFeasible: candidates {0:?} all pass the feasibility checks")]
    MultipleFeasible(Vec<usize>),
    #[error("Interpolation: {0}")]
    Interpolation(#[from] PolyError),
}

/// What the orientation is solved for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrientationTarget<T> {
    /// Platform position; the unknown is the roll `alpha`.
    Platform { x: T, y: T, z: T },
    /// Tool pose in the table frame; the unknown is the tilt `theta1`.
    Tool(ToolPose<T>),
}

/// Which root of a slider quadratic was taken. `Upper` is the smaller base z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Upper => "upper",
            Branch::Lower => "lower",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkCandidate<T> {
    pub alpha: T,
    /// Table angles, present for machine solutions only.
    pub theta1: Option<T>,
    pub theta2: Option<T>,
    pub pose: PlatformPose<T>,
    pub rho: JointCoords<T>,
    pub branch_tags: [Branch; 3],
    /// Dimensionless residuals of the four constraint equations.
    pub residuals: [T; 4],
}

impl<T: Real> IkCandidate<T> {
    /// The solved orientation: `theta1` for the machine, `alpha` for the module.
    pub fn angle(&self) -> T {
        self.theta1.unwrap_or(self.alpha)
    }

    pub fn max_residual(&self) -> T {
        max_abs(&self.residuals)
    }
}

/// Checks applied by [`filter_feasible`], in application order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityCheck {
    SliderAbove,
    RodCrossing,
    Stroke,
    SerialSingularity,
    OrientationRange,
}

/// Per-candidate outcome of every feasibility check; `true` means passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub slider_above: [bool; 3],
    pub rod_crossing: bool,
    pub stroke: [bool; 3],
    pub serial_singularity: [bool; 3],
    pub orientation_in_range: bool,
}

impl FeasibilityReport {
    pub fn first_failure(&self) -> Option<FeasibilityCheck> {
        if !self.slider_above.iter().all(|&b| b) {
            Some(FeasibilityCheck::SliderAbove)
        } else if !self.rod_crossing {
            Some(FeasibilityCheck::RodCrossing)
        } else if !self.stroke.iter().all(|&b| b) {
            Some(FeasibilityCheck::Stroke)
        } else if !self.serial_singularity.iter().all(|&b| b) {
            Some(FeasibilityCheck::SerialSingularity)
        } else if !self.orientation_in_range {
            Some(FeasibilityCheck::OrientationRange)
        } else {
            None
        }
    }

    pub fn feasible(&self) -> bool {
        self.first_failure().is_none()
    }
}

/// Coupling residual (dimensionless) as a function of the unknown angle.
fn orientation_relation<T: Real>(target: &OrientationTarget<T>, angle: T, p: &MachineParams<T>) -> T {
    let scale = coupling_scale(p);
    match target {
        OrientationTarget::Platform { x, y, .. } => coupling_residual(*x, *y, angle, p) / scale,
        OrientationTarget::Tool(tool) => {
            let pose = platform_from_tool(tool, angle, p);
            coupling_residual(pose.x, pose.y, angle + tool.phi1, p) / scale
        }
    }
}

fn half_angle_value<T: Real, F: Fn(T) -> T>(f: &F, t: T, degree: usize) -> T {
    let angle = T::two() * t.atan();
    f(angle) * (T::one() + t * t).powi((degree / 2) as i32)
}

/// Interpolates `f(2 atan t) (1 + t²)^(degree/2)` at Chebyshev nodes and
/// audits the result at out-of-sample nodes.
pub(crate) fn half_angle_polynomial<T: Real, F: Fn(T) -> T>(f: &F, degree: usize) -> Result<Poly<T>, PolyError> {
    let samples: Vec<(T, T)> = chebyshev_nodes::<T>(degree + 1)
        .into_iter()
        .map(|t| (t, half_angle_value(f, t, degree)))
        .collect();
    let poly = interpolate_coeffs(&samples, degree)?;
    let audit_tol = T::tol(1e-9, 1e3);
    for k in 0..12 {
        let t = T::lit(-4.0 + 8.0 * (k as f64 + 0.37) / 12.0);
        let err = (half_angle_value(f, t, degree) - poly.eval(t)).abs();
        if err > audit_tol * poly.abs_bound(t).max(T::one()) {
            let ratio = (err / poly.abs_bound(t).max(T::one())).to_f64().unwrap_or(f64::INFINITY);
            return Err(PolyError::IllConditioned(ratio));
        }
    }
    Ok(poly)
}

/// Orientation polynomial in `t = tan(angle / 2)`, ascending coefficients,
/// nominal degree six.
pub fn orientation_polynomial<T: Real>(target: &OrientationTarget<T>, p: &MachineParams<T>) -> Result<Poly<T>, IkError> {
    let f = |a: T| orientation_relation(target, a, p);
    let poly = half_angle_polynomial(&f, ORIENTATION_DEGREE)?;
    if poly.effective_degree().is_none() || poly.max_abs_coeff() <= T::tol(1e-14, 16.0) {
        return Err(IkError::DegenerateTarget);
    }
    Ok(poly)
}

/// Real zeros of an angle-valued relation from its half-angle polynomial,
/// polished on the relation itself, deduplicated and sorted.
pub(crate) fn angles_from_polynomial<T: Real, F: Fn(T) -> T>(f: &F, poly: &Poly<T>, nominal: usize, accept: T) -> Vec<T> {
    let mut raw: Vec<(T, usize)> = match real_roots(poly, T::tol(1e-13, 64.0)) {
        Ok(r) => r.into_iter().map(|r| (T::two() * r.value.atan(), r.multiplicity)).collect(),
        Err(_) => Vec::new(),
    };
    // a dropped leading coefficient means a root escaped to t = infinity
    if poly.effective_degree().map_or(true, |d| d < nominal) {
        raw.push((T::PI(), nominal - poly.effective_degree().unwrap_or(0)));
    }
    let mut polished: Vec<T> = Vec::new();
    for (a0, mult) in raw {
        if mult == 1 {
            polished.push(refine_on_function(f, a0, T::tol(1e-9, 16.0), T::lit(1e-4)).unwrap_or(a0));
        } else {
            // a cluster may hide simple zeros on either side of the estimate
            let split = split_cluster(f, a0);
            if split.is_empty() {
                polished.push(a0);
            } else {
                polished.extend(split);
            }
        }
    }
    let mut out: Vec<T> = Vec::new();
    for a in polished {
        if !(f(a).abs() <= accept) {
            continue;
        }
        let a = wrap_angle(a);
        if !out.iter().any(|&b| angle_diff(a, b).abs() <= T::tol(1e-10, 64.0)) {
            out.push(a);
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite angles"));
    out
}

/// Sign changes of `f` just left and just right of `a0`, each refined.
fn split_cluster<T: Real, F: Fn(T) -> T>(f: &F, a0: T) -> Vec<T> {
    let f0 = f(a0);
    let mut out = Vec::new();
    for dir in [-T::one(), T::one()] {
        let mut h = T::tol(1e-10, 16.0);
        while h <= T::lit(1e-3) {
            let b = a0 + dir * h;
            let fb = f(b);
            if fb == T::zero() {
                out.push(b);
                break;
            }
            if (fb < T::zero()) != (f0 < T::zero()) && f0 != T::zero() {
                let (lo, hi) = if dir < T::zero() { (b, a0) } else { (a0, b) };
                if let Some(r) = refine_on_function(f, lo + (hi - lo) * T::half(), (hi - lo) * T::half(), (hi - lo) * T::half()) {
                    out.push(r);
                }
                break;
            }
            h = h * T::two();
        }
    }
    out
}

/// Real orientations (rad) satisfying the leg I coupling for `target`.
pub fn orientation_roots<T: Real>(target: &OrientationTarget<T>, p: &MachineParams<T>) -> Result<Vec<T>, IkError> {
    let poly = orientation_polynomial(target, p)?;
    let f = |a: T| orientation_relation(target, a, p);
    Ok(angles_from_polynomial(&f, &poly, ORIENTATION_DEGREE, T::tol(1e-9, 64.0)))
}

/// Every slider combination placing the platform at `pose`, with the
/// per-leg root choices that produced it.
pub fn joint_solutions<T: Real>(pose: &PlatformPose<T>, p: &MachineParams<T>) -> Vec<(JointCoords<T>, [Branch; 3])> {
    let b = platform_attachments(pose, p);
    let [l1, l2, l3] = p.rod_length;
    let w = p.parallelogram_half_width;
    let (d1, r1) = (p.leg1_slider_x, p.leg1_slider_half_span);
    let (d2, r4) = (p.leg23_slider_x, p.leg23_slider_y);
    let branches = [Branch::Upper, Branch::Lower];

    let mut rho1 = Vec::new();
    if let (Some(first), Some(second)) = (slider_solutions(b[0], d1, r1, l1), slider_solutions(b[1], d1, -r1, l1)) {
        let tol = T::tol(RHO1_CONSISTENCY, 1e6);
        for (i, &v) in first.iter().enumerate() {
            if second.iter().any(|&u| (u - v).abs() <= tol) {
                rho1.push((v, branches[i]));
            }
        }
    }
    let rho2 = slider_solutions(b[2], d2 + w, -r4, l2);
    let rho3 = slider_solutions(b[4], d2 + w, r4, l3);
    let (Some(rho2), Some(rho3)) = (rho2, rho3) else { return Vec::new() };

    let mut out = Vec::with_capacity(rho1.len() * 4);
    for &(v1, t1) in &rho1 {
        for (i2, &v2) in rho2.iter().enumerate() {
            for (i3, &v3) in rho3.iter().enumerate() {
                out.push((JointCoords::new(v1, v2, v3), [t1, branches[i2], branches[i3]]));
            }
        }
    }
    out
}

fn candidates_at<T: Real>(pose: PlatformPose<T>, theta: Option<(T, T)>, p: &MachineParams<T>) -> Vec<IkCandidate<T>> {
    joint_solutions(&pose, p)
        .into_iter()
        .map(|(rho, tags)| IkCandidate {
            alpha: pose.alpha,
            theta1: theta.map(|t| t.0),
            theta2: theta.map(|t| t.1),
            pose,
            rho,
            branch_tags: tags,
            residuals: dimensionless_residuals(&pose, &rho, p),
        })
        .collect()
}

fn sort_candidates<T: Real>(cands: &mut [IkCandidate<T>]) {
    cands.sort_by(|a, b| {
        a.angle()
            .partial_cmp(&b.angle())
            .expect("finite angles")
            .then_with(|| a.branch_tags.cmp(&b.branch_tags))
    });
}

/// All inverse kinematic solutions of the parallel module for a platform position.
pub fn ik_parallel<T: Real>(x: T, y: T, z: T, p: &MachineParams<T>) -> Result<Vec<IkCandidate<T>>, IkError> {
    let target = OrientationTarget::Platform { x, y, z };
    let mut cands: Vec<IkCandidate<T>> = orientation_roots(&target, p)?
        .into_iter()
        .flat_map(|alpha| candidates_at(PlatformPose::new(x, y, z, alpha), None, p))
        .collect();
    if cands.is_empty() {
        return Err(IkError::Unreachable);
    }
    sort_candidates(&mut cands);
    Ok(cands)
}

/// All inverse kinematic solutions of the machine for a tool pose given in
/// the table frame. The table rotation is fixed to `theta2 = -phi2`.
pub fn ik_machine<T: Real>(tool: &ToolPose<T>, p: &MachineParams<T>) -> Result<Vec<IkCandidate<T>>, IkError> {
    let target = OrientationTarget::Tool(*tool);
    let theta2 = -tool.phi2;
    let mut cands: Vec<IkCandidate<T>> = orientation_roots(&target, p)?
        .into_iter()
        .flat_map(|theta1| candidates_at(platform_from_tool(tool, theta1, p), Some((theta1, theta2)), p))
        .collect();
    if cands.is_empty() {
        return Err(IkError::Unreachable);
    }
    sort_candidates(&mut cands);
    Ok(cands)
}

/// Evaluates every feasibility check on one candidate.
pub fn feasibility_report<T: Real>(cand: &IkCandidate<T>, p: &MachineParams<T>, singularity_margin: T) -> FeasibilityReport {
    let rods = rod_endpoints(&cand.pose, &cand.rho, p);
    let rho = cand.rho.as_array();
    FeasibilityReport {
        slider_above: [0, 1, 2].map(|leg| leg_slider_above(&rods, leg)),
        rod_crossing: leg1_rods_clear(cand.alpha, p),
        stroke: [0, 1, 2].map(|i| p.in_stroke(i, rho[i])),
        serial_singularity: [0, 1, 2].map(|leg| leg_elevation(&rods, leg) >= singularity_margin),
        orientation_in_range: cand.theta1.map_or(true, |t| p.tilt_in_range(t)),
    }
}

/// Reports for every candidate with the default singularity margin.
pub fn feasibility_reports<T: Real>(cands: &[IkCandidate<T>], p: &MachineParams<T>) -> Vec<FeasibilityReport> {
    let margin = T::lit(DEFAULT_SINGULARITY_MARGIN);
    cands.iter().map(|c| feasibility_report(c, p, margin)).collect()
}

/// The unique physically valid candidate, with the report of every candidate.
pub fn filter_feasible<T: Real>(
    cands: &[IkCandidate<T>],
    p: &MachineParams<T>,
) -> Result<(IkCandidate<T>, Vec<FeasibilityReport>), IkError> {
    filter_feasible_with_margin(cands, p, T::lit(DEFAULT_SINGULARITY_MARGIN))
}

pub fn filter_feasible_with_margin<T: Real>(
    cands: &[IkCandidate<T>],
    p: &MachineParams<T>,
    singularity_margin: T,
) -> Result<(IkCandidate<T>, Vec<FeasibilityReport>), IkError> {
    let reports: Vec<FeasibilityReport> = cands.iter().map(|c| feasibility_report(c, p, singularity_margin)).collect();
    let survivors: Vec<usize> = reports.iter().enumerate().filter(|(_, r)| r.feasible()).map(|(i, _)| i).collect();
    match survivors.as_slice() {
        [] => Err(IkError::NoFeasibleSolution),
        [i] => Ok((cands[*i], reports)),
        _ => Err(IkError::MultipleFeasible(survivors)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::reference_params;
    use crate::transforms::{tool_pose_from_platform, TableOrientation};

    #[test]
    fn reference_pose_has_sixteen_candidates_and_one_survivor() {
        let p = reference_params::<f64>();
        let cands = ik_parallel(-240.0, -86.0, 1000.0, &p).unwrap();
        assert_eq!(cands.len(), 16);
        assert!(cands.iter().all(|c| c.max_residual() < 1e-9));
        let (best, reports) = filter_feasible(&cands, &p).unwrap();
        assert_eq!(reports.len(), 16);
        assert!((best.alpha - 0.0468687).abs() < 1e-6, "{}", best.alpha);
        assert_eq!(best.branch_tags, [Branch::Upper; 3]);
    }

    #[test]
    fn symmetric_pose_admits_zero_roll() {
        let p = reference_params::<f64>();
        let roots = orientation_roots(&OrientationTarget::Platform { x: -240.0, y: 0.0, z: 1000.0 }, &p).unwrap();
        assert!(roots.iter().any(|a| a.abs() < 1e-12));
        let cands = ik_parallel(-240.0, 0.0, 1000.0, &p).unwrap();
        let k = p.leg1_platform_half_span - p.leg1_slider_half_span;
        let h = (p.rod_length[0].powi(2) - (-240.0 + p.leg1_dx()).powi(2) - k * k).sqrt();
        let at_zero: Vec<_> = cands.iter().filter(|c| c.alpha.abs() < 1e-12).collect();
        assert!(at_zero.iter().any(|c| (c.rho.rho1 - (1000.0 - h)).abs() < 1e-9));
        assert!(at_zero.iter().any(|c| (c.rho.rho1 - (1000.0 + h)).abs() < 1e-9));
    }

    #[test]
    fn far_point_is_unreachable() {
        let p = reference_params::<f64>();
        assert_eq!(ik_parallel(5000.0, 0.0, 1000.0, &p), Err(IkError::Unreachable));
    }

    #[test]
    fn machine_round_trip() {
        let p = reference_params::<f64>();
        let pose = PlatformPose::new(-231.0, -64.0, 980.0, 0.0);
        let cands = ik_parallel(pose.x, pose.y, pose.z, &p).unwrap();
        let (best, _) = filter_feasible(&cands, &p).unwrap();
        let orient = TableOrientation::new(0.2, 0.4);
        let tool = tool_pose_from_platform(&best.pose, &orient, &p);
        let mcands = ik_machine(&tool, &p).unwrap();
        assert!(mcands.iter().all(|c| c.theta2 == Some(-tool.phi2)));
        assert!(mcands.iter().any(|c| (c.theta1.unwrap() - 0.2).abs() < 1e-9
            && (0..3).all(|i| (c.rho.as_array()[i] - best.rho.as_array()[i]).abs() < 1e-9)));
    }

    #[test]
    fn report_order() {
        let mut r = FeasibilityReport {
            slider_above: [true; 3],
            rod_crossing: false,
            stroke: [true, false, true],
            serial_singularity: [true; 3],
            orientation_in_range: true,
        };
        assert_eq!(r.first_failure(), Some(FeasibilityCheck::RodCrossing));
        r.rod_crossing = true;
        assert_eq!(r.first_failure(), Some(FeasibilityCheck::Stroke));
        r.stroke = [true; 3];
        assert!(r.feasible());
    }
}
