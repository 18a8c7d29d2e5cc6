//! Forward kinematics of the parallel module and of the machine.
//!
//! For a fixed roll `alpha` the differences of the constraint equations are
//! linear in `(x_p, y_p, z_p)`: leg I rod 1 minus rod 2, leg II minus leg III,
//! and leg I minus leg II. Solving them and substituting into one remaining
//! rod equation leaves a scalar relation in `alpha`. Cleared of its
//! denominator it is a polynomial of degree eight in `s = tan(alpha / 2)`.
//!
//! Two denominators appear along the way. `R1 cos(alpha) - r1` (the leg I rods
//! perpendicular to the slider plane) cancels out of the final formulas and is
//! reported but harmless. The elimination denominator `D(alpha)` is genuine:
//! when it vanishes the linear system loses rank and the solutions form a
//! one-parameter family cut by a rod sphere, which is solved separately.

use thiserror::Error;

use crate::constraints::{dimensionless_residuals, leg1_rods_clear, leg_slider_above, max_abs};
use crate::ik::{angles_from_polynomial, half_angle_polynomial};
use crate::params::{JointCoords, MachineParams};
use crate::polyroots::{Poly, PolyError};
use crate::scalar::{angle_diff, wrap_angle, Real};
use crate::transforms::{rod_endpoints, tool_pose_from_platform, PlatformPose, TableOrientation, ToolPose};

/// Nominal degree of the forward kinematics polynomial.
pub const OCTIC_DEGREE: usize = 8;

/// Relative width of the denominator guard bands.
pub const DENOMINATOR_GUARD: f64 = 1e-8;

/// The two denominators of the elimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Denominator {
    /// `R1 cos(alpha) - r1`: leg I rods perpendicular to the slider plane.
    LegOnePerpendicular,
    /// `(rho2 - rho3)(R1 cos(alpha) - r1) + 2 sin(alpha)(R1 r4 - r1 R2)`.
    Elimination,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FkError {
    #[error("SingularDenominator: {0:?}")]
    SingularDenominator(Denominator),
    #[error("NoAssembly: no real configuration matches the joint values")]
    NoAssembly,
    #[error("DegenerateInput: the orientation relation vanishes identically")]
    DegenerateInput,
    #[error("Interpolation: {0}")]
    Interpolation(#[from] PolyError),
}

/// Whether the sliders of a leg sit above or below their platform joints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LegMode {
    Above,
    Below,
}

impl LegMode {
    pub fn as_str(self) -> &'static str {
        match self {
            LegMode::Above => "above",
            LegMode::Below => "below",
        }
    }
}

/// How an orientation was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootSource {
    /// Real root of the octic.
    Octic,
    /// `alpha = pi`, where the half-angle parameter is infinite.
    HalfTurn,
    /// Inside the elimination guard band, solved on the rank-deficient system.
    SingularBand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssemblyLabels {
    pub legs: [LegMode; 3],
    pub machine_reachable: bool,
}

/// Normalised distance of a solution from both denominators and whether it
/// lies inside their guard bands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularFlags<T> {
    pub leg_one_margin: T,
    pub elimination_margin: T,
    pub leg_one_perpendicular: bool,
    pub elimination: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkSolution<T> {
    pub pose: PlatformPose<T>,
    pub rho: JointCoords<T>,
    pub assembly_mode: AssemblyLabels,
    pub singular_flags: SingularFlags<T>,
    pub source: RootSource,
    pub residuals: [T; 4],
}

impl<T: Real> FkSolution<T> {
    pub fn max_residual(&self) -> T {
        max_abs(&self.residuals)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkMachineSolution<T> {
    pub platform: FkSolution<T>,
    pub orient: TableOrientation<T>,
    pub tool: ToolPose<T>,
}

/// Quantities shared by the elimination at one orientation.
struct Elimination<T> {
    s: T,
    k: T,
    q: T,
    e1: T,
    e2: T,
    a1: T,
    a2: T,
    d: T,
    m: T,
}

impl<T: Real> Elimination<T> {
    fn new(s: T, c: T, rho: &JointCoords<T>, p: &MachineParams<T>) -> Self {
        let (big_r1, r1) = (p.leg1_platform_half_span, p.leg1_slider_half_span);
        let (big_r2, r4) = (p.leg23_platform_y, p.leg23_slider_y);
        let [_, l2, l3] = p.rod_length;
        let (rho1, rho2, rho3) = (rho.rho1, rho.rho2, rho.rho3);
        let k = big_r1 * c - r1;
        let q = big_r2 * c - r4;
        let d = (rho2 - rho3) * k + T::two() * s * (big_r1 * r4 - r1 * big_r2);
        let g = rho3 - rho2 - T::two() * big_r2 * s;
        let m = (l2 * l2 - l3 * l3) - g * (T::two() * rho1 - rho2 - rho3);
        Elimination {
            s,
            k,
            q,
            e1: p.leg1_dx(),
            e2: p.leg23_dx(),
            a1: big_r1 * s - rho1,
            a2: -rho2 - big_r2 * s,
            d,
            m,
        }
    }

    /// Constant side of the leg I minus leg II difference, which reads
    /// `2(e1 - e2) x + 2(k + q) y + 2(a1 - a2) z = rhs`.
    fn cross_rhs(&self, p: &MachineParams<T>) -> T {
        let (l1, l2) = (p.rod_length[0], p.rod_length[1]);
        (l1 * l1 - l2 * l2) - (self.e1 * self.e1 - self.e2 * self.e2) - (self.k + self.q) * (self.k - self.q)
            - (self.a1 - self.a2) * (self.a1 + self.a2)
    }

    /// `(x D, y D, (z - rho1) D)`, free of any division.
    fn scaled_position(&self, rho: &JointCoords<T>, p: &MachineParams<T>) -> (T, T, T) {
        let big_r1 = p.leg1_platform_half_span;
        let y = big_r1 * self.s * self.m * T::half();
        let zr = -self.k * self.m * T::half();
        let z = zr + rho.rho1 * self.d;
        let x = (self.cross_rhs(p) * self.d - T::two() * (self.k + self.q) * y - T::two() * (self.a1 - self.a2) * z)
            / (T::two() * (self.e1 - self.e2));
        (x, y, zr)
    }
}

fn guard_leg_one<T: Real>(p: &MachineParams<T>) -> T {
    T::tol(DENOMINATOR_GUARD, 64.0) * (p.leg1_platform_half_span + p.leg1_slider_half_span)
}

fn guard_elimination<T: Real>(p: &MachineParams<T>) -> T {
    let lmax = p.rod_length.iter().fold(T::zero(), |m, &l| m.max(l));
    guard_leg_one(p) * lmax
}

fn relation_scale<T: Real>(p: &MachineParams<T>) -> T {
    let l1 = p.rod_length[0];
    let ds = l1 * (p.leg1_platform_half_span + p.leg1_slider_half_span);
    l1 * l1 * ds * ds
}

/// Leg I rod 1 equation after substitution, multiplied by `D²` and made
/// dimensionless. Its zeros in `alpha` are the assembly orientations.
pub fn fk_relation<T: Real>(alpha: T, rho: &JointCoords<T>, p: &MachineParams<T>) -> T {
    let (s, c) = alpha.sin_cos();
    let el = Elimination::new(s, c, rho, p);
    let (xd, yd, zd) = el.scaled_position(rho, p);
    let l1 = p.rod_length[0];
    let big_r1 = p.leg1_platform_half_span;
    let sq = |v: T| v * v;
    let f = sq(xd + el.e1 * el.d) + sq(yd + el.k * el.d) + sq(zd + big_r1 * s * el.d) - sq(l1 * el.d);
    f / relation_scale(p)
}

/// Platform position for a known roll, by successive linear eliminations.
pub fn fk_back_substitute<T: Real>(alpha: T, rho: &JointCoords<T>, p: &MachineParams<T>) -> Result<PlatformPose<T>, FkError> {
    let (s, c) = alpha.sin_cos();
    let el = Elimination::new(s, c, rho, p);
    if el.k.abs() < guard_leg_one(p) {
        return Err(FkError::SingularDenominator(Denominator::LegOnePerpendicular));
    }
    if el.d.abs() < guard_elimination(p) {
        return Err(FkError::SingularDenominator(Denominator::Elimination));
    }
    let (xd, yd, zd) = el.scaled_position(rho, p);
    Ok(PlatformPose::new(xd / el.d, yd / el.d, rho.rho1 + zd / el.d, alpha))
}

/// Solves the three linear differences and the leg I sphere at a fixed roll,
/// without dividing by either denominator. Returns 0, 1 or 2 positions.
pub fn solve_at_orientation<T: Real>(alpha: T, rho: &JointCoords<T>, p: &MachineParams<T>) -> Vec<PlatformPose<T>> {
    let (s, c) = alpha.sin_cos();
    let el = Elimination::new(s, c, rho, p);
    let big_r1 = p.leg1_platform_half_span;
    let [l1, l2, l3] = p.rod_length;
    let g = rho.rho3 - rho.rho2 - T::two() * p.leg23_platform_y * s;
    // rows in (y, z)
    let (u1, v1, b1) = (el.k, big_r1 * s, big_r1 * s * rho.rho1);
    let (u2, v2, b2) = (-T::lit(4.0) * el.q, T::two() * g, (l2 * l2 - l3 * l3) + g * (rho.rho2 + rho.rho3));
    let ex = T::two() * (el.e1 - el.e2);
    let x_of = |y: T, z: T| (el.cross_rhs(p) - T::two() * (el.k + el.q) * y - T::two() * (el.a1 - el.a2) * z) / ex;

    let det = u1 * v2 - u2 * v1;
    if det.abs() >= T::two() * guard_elimination(p) {
        let y = (b1 * v2 - b2 * v1) / det;
        let z = (u1 * b2 - u2 * b1) / det;
        return vec![PlatformPose::new(x_of(y, z), y, z, alpha)];
    }

    // rank-deficient: (y, z) = base + lambda * dir along the first row
    let n1 = u1 * u1 + v1 * v1;
    let base = (b1 * u1 / n1, b1 * v1 / n1);
    let dir = (-v1, u1);
    let mismatch = u2 * base.0 + v2 * base.1 - b2;
    let row_scale = (u2.abs() + v2.abs()) * (base.0.abs() + base.1.abs()) + b2.abs() + l1 * l1;
    if mismatch.abs() > T::tol(1e-9, 1e4) * row_scale {
        return Vec::new();
    }
    let x0 = x_of(base.0, base.1);
    let xd = x_of(base.0 + dir.0, base.1 + dir.1) - x0;
    let (px, py, pz) = (x0 + el.e1, base.0 + el.k, base.1 + el.a1);
    let qa = xd * xd + dir.0 * dir.0 + dir.1 * dir.1;
    let qb = T::two() * (px * xd + py * dir.0 + pz * dir.1);
    let qc = px * px + py * py + pz * pz - l1 * l1;
    let disc = qb * qb - T::lit(4.0) * qa * qc;
    let disc_floor = -T::tol(1e-12, 64.0) * qb * qb.max(qa * qc.abs());
    if disc < disc_floor {
        return Vec::new();
    }
    let root = disc.max(T::zero()).sqrt();
    let mut lambdas = vec![(-qb - root) / (T::two() * qa)];
    if root > T::zero() {
        lambdas.push((-qb + root) / (T::two() * qa));
    }
    lambdas
        .into_iter()
        .map(|lam| {
            let (y, z) = (base.0 + lam * dir.0, base.1 + lam * dir.1);
            PlatformPose::new(x_of(y, z), y, z, alpha)
        })
        .collect()
}

/// Octic in `s = tan(alpha / 2)`, ascending coefficients.
pub fn fk_octic<T: Real>(rho: &JointCoords<T>, p: &MachineParams<T>) -> Result<Poly<T>, FkError> {
    let f = |a: T| fk_relation(a, rho, p);
    let poly = half_angle_polynomial(&f, OCTIC_DEGREE)?;
    if poly.effective_degree().is_none() || poly.max_abs_coeff() <= T::tol(1e-14, 16.0) {
        return Err(FkError::DegenerateInput);
    }
    Ok(poly)
}

/// Zero of the elimination denominator closest to `alpha`, if it has any.
fn nearest_elimination_zero<T: Real>(alpha: T, rho: &JointCoords<T>, p: &MachineParams<T>) -> Option<T> {
    let (big_r1, r1) = (p.leg1_platform_half_span, p.leg1_slider_half_span);
    let (big_r2, r4) = (p.leg23_platform_y, p.leg23_slider_y);
    let dr = rho.rho2 - rho.rho3;
    let (a, b, c) = (dr * big_r1, T::two() * (big_r1 * r4 - r1 * big_r2), -dr * r1);
    let r = a.hypot(b);
    if r == T::zero() || (c / r).abs() > T::one() {
        return None;
    }
    let phi = b.atan2(a);
    let w = (-c / r).acos();
    [phi + w, phi - w]
        .into_iter()
        .map(wrap_angle)
        .min_by(|x, y| angle_diff(*x, alpha).abs().partial_cmp(&angle_diff(*y, alpha).abs()).expect("finite"))
}

/// Above/below label of every leg and the machine-reachability verdict.
pub fn classify_assembly_mode<T: Real>(pose: &PlatformPose<T>, rho: &JointCoords<T>, p: &MachineParams<T>) -> AssemblyLabels {
    let rods = rod_endpoints(pose, rho, p);
    let legs = [0, 1, 2].map(|leg| if leg_slider_above(&rods, leg) { LegMode::Above } else { LegMode::Below });
    let r = rho.as_array();
    let machine_reachable = legs.iter().all(|&m| m == LegMode::Above)
        && (0..3).all(|i| p.in_stroke(i, r[i]))
        && leg1_rods_clear(pose.alpha, p);
    AssemblyLabels { legs, machine_reachable }
}

fn singular_flags<T: Real>(alpha: T, rho: &JointCoords<T>, p: &MachineParams<T>) -> SingularFlags<T> {
    let (s, c) = alpha.sin_cos();
    let el = Elimination::new(s, c, rho, p);
    let (gk, gd) = (guard_leg_one(p), guard_elimination(p));
    SingularFlags {
        leg_one_margin: el.k.abs() / (p.leg1_platform_half_span + p.leg1_slider_half_span),
        elimination_margin: el.d.abs() / (gd / T::tol(DENOMINATOR_GUARD, 64.0)),
        leg_one_perpendicular: el.k.abs() < gk,
        elimination: el.d.abs() < gd,
    }
}

fn make_solution<T: Real>(pose: PlatformPose<T>, rho: &JointCoords<T>, source: RootSource, p: &MachineParams<T>) -> FkSolution<T> {
    FkSolution {
        pose,
        rho: *rho,
        assembly_mode: classify_assembly_mode(&pose, rho, p),
        singular_flags: singular_flags(pose.alpha, rho, p),
        source,
        residuals: dimensionless_residuals(&pose, rho, p),
    }
}

/// All assembly modes of the parallel module for the given slider positions.
pub fn fk_parallel<T: Real>(rho: &JointCoords<T>, p: &MachineParams<T>) -> Result<Vec<FkSolution<T>>, FkError> {
    let poly = fk_octic(rho, p)?;
    let f = |a: T| fk_relation(a, rho, p);
    let alphas = angles_from_polynomial(&f, &poly, OCTIC_DEGREE, T::tol(1e-8, 1e4));
    let residual_tol = T::tol(1e-9, 1e4);
    let mut out: Vec<FkSolution<T>> = Vec::new();
    for alpha in alphas {
        let (s, c) = alpha.sin_cos();
        let el = Elimination::new(s, c, rho, p);
        let near_singular = el.d.abs() < T::lit(1e3) * guard_elimination(p);
        let candidates: Vec<(PlatformPose<T>, RootSource)> = if near_singular {
            let exact = nearest_elimination_zero(alpha, rho, p).unwrap_or(alpha);
            let mut v: Vec<_> = solve_at_orientation(exact, rho, p).into_iter().map(|q| (q, RootSource::SingularBand)).collect();
            // a regular root that merely sits close to the band
            if let Ok(q) = fk_back_substitute(alpha, rho, p) {
                v.push((q, RootSource::Octic));
            }
            v
        } else {
            let source = if (alpha.abs() - T::PI()).abs() < T::tol(1e-12, 16.0) { RootSource::HalfTurn } else { RootSource::Octic };
            solve_at_orientation(alpha, rho, p).into_iter().map(|q| (q, source)).collect()
        };
        for (pose, source) in candidates {
            let sol = make_solution(pose, rho, source, p);
            if !(sol.max_residual() < residual_tol) {
                continue;
            }
            let dup = out.iter().any(|o| {
                angle_diff(o.pose.alpha, pose.alpha).abs() < T::tol(1e-8, 64.0)
                    && (0..3).all(|i| (o.pose.position()[i] - pose.position()[i]).abs() < T::tol(1e-6, 1e6))
            });
            if !dup {
                out.push(sol);
            }
        }
    }
    if out.is_empty() {
        return Err(FkError::NoAssembly);
    }
    out.sort_by(|a, b| {
        a.pose
            .alpha
            .partial_cmp(&b.pose.alpha)
            .expect("finite")
            .then_with(|| a.pose.y.partial_cmp(&b.pose.y).expect("finite"))
    });
    Ok(out)
}

/// Machine forward kinematics: tool poses in the table frame for every
/// assembly mode of the parallel module.
pub fn fk_machine<T: Real>(
    rho: &JointCoords<T>,
    orient: &TableOrientation<T>,
    p: &MachineParams<T>,
) -> Result<Vec<FkMachineSolution<T>>, FkError> {
    Ok(fk_parallel(rho, p)?
        .into_iter()
        .map(|sol| FkMachineSolution { platform: sol, orient: *orient, tool: tool_pose_from_platform(&sol.pose, orient, p) })
        .collect())
}
