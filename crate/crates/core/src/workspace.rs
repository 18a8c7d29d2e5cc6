//! Workspace of the parallel module and manufacturing workspace of the machine.
//!
//! Leg I confines the platform to one iso-orientation ellipse per roll, so the
//! sweep samples those ellipses (for a grid of rolls and heights) instead of a
//! Cartesian lattice, checks every sample against the mechanical constraints
//! and rasterizes the results into voxels.

use std::collections::HashMap;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::constraints::{dot, leg1_rods_clear, leg_elevation, leg_slider_above, sub};
use crate::coupling::{ellipse_point_sc, iso_orientation_ellipse};
use crate::ik::{joint_solutions, Branch, DEFAULT_SINGULARITY_MARGIN};
use crate::params::{JointCoords, MachineParams};
use crate::report::fmt12;
use crate::scalar::Real;
use crate::transforms::{rod_endpoints, tcp_in_base, tool_pose_from_platform, PlatformPose, RodEndpoints, TableOrientation, Vec3, ROD_LEG};

/// Limits used by [`check_constraints`]; strokes come from the machine parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintLimits<T> {
    /// Minimum distance between any two rods (mm).
    pub rod_clearance: T,
    /// Maximum angle between a rod and the axis of either of its sockets (rad).
    pub passive_cone_half_angle: T,
    /// Minimum elevation of every rod above the horizontal (rad).
    pub singularity_margin: T,
}

impl<T: Real> ConstraintLimits<T> {
    pub fn from_params(p: &MachineParams<T>) -> Self {
        ConstraintLimits {
            rod_clearance: p.rod_clearance,
            passive_cone_half_angle: p.passive_cone_half_angle,
            singularity_margin: T::lit(DEFAULT_SINGULARITY_MARGIN),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.rod_clearance >= T::zero() && self.passive_cone_half_angle > T::zero() && self.singularity_margin > T::zero()
    }
}

/// Outcome of the constraint checks, in checking order. `Ok` sorts last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReasonCode {
    Interference,
    LegLength,
    SerialSingularity,
    PassiveJoint,
    Stroke,
    CouplingEmpty,
    Ok,
}

impl ReasonCode {
    pub const ALL: [ReasonCode; 7] = [
        ReasonCode::Interference,
        ReasonCode::LegLength,
        ReasonCode::SerialSingularity,
        ReasonCode::PassiveJoint,
        ReasonCode::Stroke,
        ReasonCode::CouplingEmpty,
        ReasonCode::Ok,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ReasonCode::Interference => "interference",
            ReasonCode::LegLength => "leg_length",
            ReasonCode::SerialSingularity => "serial_singularity",
            ReasonCode::PassiveJoint => "passive_joint",
            ReasonCode::Stroke => "stroke",
            ReasonCode::CouplingEmpty => "coupling_empty",
            ReasonCode::Ok => "ok",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Minimum distance between segments `[p1, q1]` and `[p2, q2]`.
pub fn segment_distance<T: Real>(p1: Vec3<T>, q1: Vec3<T>, p2: Vec3<T>, q2: Vec3<T>) -> T {
    let d1 = sub(q1, p1);
    let d2 = sub(q2, p2);
    let r = sub(p1, p2);
    let (a, e, f) = (dot(d1, d1), dot(d2, d2), dot(d2, r));
    let tiny = T::epsilon() * T::epsilon();
    let clamp = |v: T| v.max(T::zero()).min(T::one());
    let (s, t) = if a <= tiny && e <= tiny {
        (T::zero(), T::zero())
    } else if a <= tiny {
        (T::zero(), clamp(f / e))
    } else {
        let c = dot(d1, r);
        if e <= tiny {
            (clamp(-c / a), T::zero())
        } else {
            let b = dot(d1, d2);
            let denom = a * e - b * b;
            let s = if denom > T::zero() { clamp((b * f - c * e) / denom) } else { T::zero() };
            let t = (b * s + f) / e;
            if t < T::zero() {
                (clamp(-c / a), T::zero())
            } else if t > T::one() {
                (clamp((b - c) / a), T::one())
            } else {
                (s, t)
            }
        }
    };
    let c1 = [p1[0] + d1[0] * s, p1[1] + d1[1] * s, p1[2] + d1[2] * s];
    let c2 = [p2[0] + d2[0] * t, p2[1] + d2[1] * t, p2[2] + d2[2] * t];
    let d = sub(c1, c2);
    dot(d, d).sqrt()
}

/// Smallest distance between any two of the six rods.
pub fn min_rod_distance<T: Real>(rods: &RodEndpoints<T>) -> T {
    let mut m = T::infinity();
    for i in 0..6 {
        for j in (i + 1)..6 {
            m = m.min(segment_distance(rods.slider[i], rods.platform[i], rods.slider[j], rods.platform[j]));
        }
    }
    m
}

/// First failing check among interference, leg length, serial singularity,
/// passive joints and stroke; `Ok` when all pass.
pub fn check_constraints<T: Real>(
    pose: &PlatformPose<T>,
    rho: &JointCoords<T>,
    p: &MachineParams<T>,
    lim: &ConstraintLimits<T>,
) -> ReasonCode {
    let rods = rod_endpoints(pose, rho, p);

    if !leg1_rods_clear(pose.alpha, p) || min_rod_distance(&rods) < lim.rod_clearance {
        return ReasonCode::Interference;
    }

    let length_tol = T::tol(1e-9, 1e4);
    for i in 0..6 {
        let d = sub(rods.platform[i], rods.slider[i]);
        let l = p.rod_length[ROD_LEG[i]];
        if !((dot(d, d) - l * l).abs() <= length_tol * l * l) {
            return ReasonCode::LegLength;
        }
    }

    for leg in 0..3 {
        if !leg_slider_above(&rods, leg) || leg_elevation(&rods, leg) < lim.singularity_margin {
            return ReasonCode::SerialSingularity;
        }
    }

    // slider sockets are aligned with the base z axis, platform sockets with the platform normal
    let (s, c) = pose.alpha.sin_cos();
    let platform_normal = [T::zero(), -s, c];
    let min_cos = lim.passive_cone_half_angle.cos();
    for i in 0..6 {
        let d = sub(rods.platform[i], rods.slider[i]);
        let len = dot(d, d).sqrt();
        let cos_slider = d[2] / len;
        let cos_platform = dot(d, platform_normal) / len;
        if cos_slider < min_cos || cos_platform < min_cos {
            return ReasonCode::PassiveJoint;
        }
    }

    let r = rho.as_array();
    if !(0..3).all(|i| p.in_stroke(i, r[i])) {
        return ReasonCode::Stroke;
    }
    ReasonCode::Ok
}

/// Classifies one platform pose with a known roll: picks the slider-above
/// branch when it exists and checks it.
pub fn evaluate_pose<T: Real>(
    pose: &PlatformPose<T>,
    p: &MachineParams<T>,
    lim: &ConstraintLimits<T>,
) -> (ReasonCode, Option<JointCoords<T>>) {
    let sols = joint_solutions(pose, p);
    let pick = sols.iter().find(|(_, tags)| *tags == [Branch::Upper; 3]).or(sols.first());
    match pick {
        None => (ReasonCode::LegLength, None),
        Some((rho, _)) => (check_constraints(pose, rho, p, lim), Some(*rho)),
    }
}

/// `(sin, cos)` of `2 pi j / n` for `j < n`, exactly antisymmetric in sine
/// between `j` and `n - j`.
fn circle_table<T: Real>(n: usize) -> Vec<(T, T)> {
    let mut v: Vec<(T, T)> = Vec::with_capacity(n);
    for j in 0..n {
        if 2 * j == n {
            v.push((T::zero(), -T::one()));
        } else if 2 * j < n {
            v.push((T::TAU() * T::lit(j as f64) / T::lit(n as f64)).sin_cos());
        } else {
            let (s, c) = v[n - j];
            v.push((-s, c));
        }
    }
    v
}

/// Accepted platform pose of a slice together with its slider positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicePoint<T> {
    pub pose: PlatformPose<T>,
    pub rho: JointCoords<T>,
}

/// Every ellipse sample of one `(alpha, z_p)` slice with its reason code.
pub fn classify_slice<T: Real>(
    alpha: T,
    z: T,
    p: &MachineParams<T>,
    lim: &ConstraintLimits<T>,
    resolution: usize,
) -> Vec<(PlatformPose<T>, ReasonCode, Option<JointCoords<T>>)> {
    let Ok(ellipse) = iso_orientation_ellipse(alpha, p) else { return Vec::new() };
    circle_table::<T>(resolution.max(2))
        .into_iter()
        .map(|(s, c)| {
            let (x, y) = ellipse_point_sc(&ellipse, s, c);
            let pose = PlatformPose { x, y, z, alpha };
            let (code, rho) = evaluate_pose(&pose, p, lim);
            (pose, code, rho)
        })
        .collect()
}

/// Accepted points of the constant-orientation slice at `(alpha, z_p)`.
/// Empty when the iso-orientation locus is empty.
pub fn constant_orientation_slice<T: Real>(
    alpha: T,
    z: T,
    p: &MachineParams<T>,
    lim: &ConstraintLimits<T>,
    resolution: usize,
) -> Vec<SlicePoint<T>> {
    classify_slice(alpha, z, p, lim, resolution)
        .into_iter()
        .filter(|(_, code, _)| *code == ReasonCode::Ok)
        .map(|(pose, _, rho)| SlicePoint { pose, rho: rho.expect("accepted sample has joints") })
        .collect()
}

/// Discretization of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig<T> {
    pub alpha_steps: usize,
    pub z_steps: usize,
    /// Samples per iso-orientation ellipse.
    pub resolution: usize,
    /// Voxel edge length (mm).
    pub cell_size: T,
}

impl<T: Real> Default for SweepConfig<T> {
    fn default() -> Self {
        SweepConfig { alpha_steps: 181, z_steps: 101, resolution: 720, cell_size: T::lit(20.0) }
    }
}

impl<T: Real> SweepConfig<T> {
    /// A sweep of exactly 10⁵ pose evaluations.
    pub fn desk_budget() -> Self {
        SweepConfig { alpha_steps: 25, z_steps: 20, resolution: 200, cell_size: T::lit(20.0) }
    }

    pub fn evaluations(&self) -> usize {
        self.alpha_steps * self.z_steps * self.resolution
    }
}

/// Rolls swept: symmetric about zero and bounded by the leg I crossing limit.
pub fn alpha_grid<T: Real>(p: &MachineParams<T>, steps: usize) -> Vec<T> {
    let n = steps.max(2);
    let lim = p.rod_crossing_limit();
    let den = T::lit((n - 1) as f64);
    (0..n).map(|i| lim * T::lit(2.0 * i as f64 - (n - 1) as f64) / den).collect()
}

/// Platform heights swept: from the highest slider position down to the
/// lowest a rod can reach.
pub fn z_grid<T: Real>(p: &MachineParams<T>, steps: usize) -> Vec<T> {
    let n = steps.max(2);
    let lo = p.stroke_min.iter().fold(T::infinity(), |m, &v| m.min(v));
    let hi = p.stroke_max.iter().fold(T::neg_infinity(), |m, &v| m.max(v))
        + p.rod_length.iter().fold(T::zero(), |m, &v| m.max(v));
    let den = T::lit((n - 1) as f64);
    (0..n).map(|k| lo + (hi - lo) * T::lit(k as f64) / den).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Base,
    Table,
}

impl Frame {
    pub fn as_str(self) -> &'static str {
        match self {
            Frame::Base => "base",
            Frame::Table => "table",
        }
    }
}

/// Accepted sample that marked a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSample<T> {
    pub pose: PlatformPose<T>,
    pub rho: JointCoords<T>,
    /// Mapped point in the grid frame.
    pub point: Vec3<T>,
    /// `(alpha index, z index, ellipse index)` of the sample.
    pub key: [u32; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub code: ReasonCode,
    /// Index into [`WorkspaceGrid::samples`] for `Ok` cells.
    pub sample: Option<u32>,
}

/// Voxelized workspace. Cells are stored x fastest, then y, then z.
///
/// A cell is `Ok` when at least one accepted sample fell into it; otherwise
/// it carries the first-in-order code among its samples, or `CouplingEmpty`
/// when no sample reached it.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceGrid<T> {
    pub frame: Frame,
    pub origin: Vec3<T>,
    pub cell_size: T,
    pub dims: [usize; 3],
    pub cells: Vec<Cell>,
    pub samples: Vec<CellSample<T>>,
    /// Number of pose evaluations per reason code.
    pub sample_counts: [usize; 7],
}

impl<T: Real> WorkspaceGrid<T> {
    pub fn cell_index(&self, i: [usize; 3]) -> usize {
        i[0] + self.dims[0] * (i[1] + self.dims[1] * i[2])
    }

    pub fn cell_coords(&self, idx: usize) -> [usize; 3] {
        let x = idx % self.dims[0];
        let y = (idx / self.dims[0]) % self.dims[1];
        [x, y, idx / (self.dims[0] * self.dims[1])]
    }

    pub fn cell_center(&self, idx: usize) -> Vec3<T> {
        let c = self.cell_coords(idx);
        [0, 1, 2].map(|k| self.origin[k] + (T::lit(c[k] as f64) + T::half()) * self.cell_size)
    }

    pub fn ok_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.code == ReasonCode::Ok).count()
    }

    pub fn volume(&self) -> T {
        T::lit(self.ok_cells() as f64) * self.cell_size.powi(3)
    }

    /// Cells per reason code, indexed like [`ReasonCode::ALL`].
    pub fn code_counts(&self) -> [usize; 7] {
        let mut counts = [0; 7];
        for c in &self.cells {
            counts[c.code.index()] += 1;
        }
        counts
    }

    pub fn evaluations(&self) -> usize {
        self.sample_counts.iter().sum()
    }

    /// Accepted samples in cell order.
    pub fn accepted(&self) -> impl Iterator<Item = &CellSample<T>> + '_ {
        self.cells.iter().filter_map(|c| c.sample.map(|i| &self.samples[i as usize]))
    }

    /// `frame,x,y,z,alpha`: one representative accepted point per ok cell.
    pub fn write_accepted_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "frame,x,y,z,alpha")?;
        for s in self.accepted() {
            let v = s.point.map(|c| fmt12(c.to_f64().unwrap_or(f64::NAN)));
            writeln!(w, "{},{},{},{},{}", self.frame.as_str(), v[0], v[1], v[2], fmt12(s.pose.alpha.to_f64().unwrap_or(f64::NAN)))?;
        }
        Ok(())
    }

    /// `x,y,z,alpha` for the ok cells of layer `iz`.
    pub fn write_slice_csv<W: Write>(&self, w: &mut W, iz: usize) -> io::Result<()> {
        writeln!(w, "x,y,z,alpha")?;
        let per_layer = self.dims[0] * self.dims[1];
        for c in &self.cells[iz * per_layer..(iz + 1) * per_layer] {
            if let Some(i) = c.sample {
                let s = &self.samples[i as usize];
                let v = s.point.map(|c| fmt12(c.to_f64().unwrap_or(f64::NAN)));
                writeln!(w, "{},{},{},{}", v[0], v[1], v[2], fmt12(s.pose.alpha.to_f64().unwrap_or(f64::NAN)))?;
            }
        }
        Ok(())
    }

    pub fn write_summary<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let f = |v: T| fmt12(v.to_f64().unwrap_or(f64::NAN));
        writeln!(w, "frame = {}", self.frame.as_str())?;
        writeln!(w, "origin = {},{},{}", f(self.origin[0]), f(self.origin[1]), f(self.origin[2]))?;
        writeln!(w, "cell_size = {}", f(self.cell_size))?;
        writeln!(w, "dims = {},{},{}", self.dims[0], self.dims[1], self.dims[2])?;
        writeln!(w, "total_cells = {}", self.cells.len())?;
        writeln!(w, "ok_cells = {}", self.ok_cells())?;
        writeln!(w, "volume_mm3 = {}", f(self.volume()))?;
        writeln!(w, "evaluations = {}", self.evaluations())?;
        let counts = self.code_counts();
        for code in ReasonCode::ALL {
            writeln!(w, "cells.{} = {}", code.as_str(), counts[code.index()])?;
        }
        for code in ReasonCode::ALL {
            writeln!(w, "samples.{} = {}", code.as_str(), self.sample_counts[code.index()])?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct Acc<T> {
    code: ReasonCode,
    sample: Option<CellSample<T>>,
}

fn merge_acc<T: Real>(a: &mut Acc<T>, b: Acc<T>) {
    match (a.sample, b.sample) {
        (Some(x), Some(y)) => {
            if y.key < x.key {
                a.sample = Some(y);
            }
        }
        (None, Some(_)) => *a = b,
        (Some(_), None) => {}
        (None, None) => a.code = a.code.min(b.code),
    }
}

struct Partial<T> {
    cells: HashMap<[i64; 3], Acc<T>>,
    counts: [usize; 7],
}

impl<T: Real> Partial<T> {
    fn empty() -> Self {
        Partial { cells: HashMap::new(), counts: [0; 7] }
    }

    fn merge(mut self, other: Self) -> Self {
        for (k, v) in other.cells {
            match self.cells.get_mut(&k) {
                Some(acc) => merge_acc(acc, v),
                None => {
                    self.cells.insert(k, v);
                }
            }
        }
        for i in 0..7 {
            self.counts[i] += other.counts[i];
        }
        self
    }
}

fn sweep<T: Real, M: Fn(&PlatformPose<T>) -> Vec3<T> + Sync>(
    p: &MachineParams<T>,
    lim: &ConstraintLimits<T>,
    cfg: &SweepConfig<T>,
    frame: Frame,
    map: M,
) -> WorkspaceGrid<T> {
    let alphas = alpha_grid(p, cfg.alpha_steps);
    let zs = z_grid(p, cfg.z_steps);
    let resolution = cfg.resolution.max(2);
    let circle = circle_table::<T>(resolution);
    let cell = cfg.cell_size;
    let key_of = |v: Vec3<T>| v.map(|c| (c / cell).floor().to_i64().unwrap_or(i64::MIN));

    let merged = alphas
        .par_iter()
        .enumerate()
        .map(|(ia, &alpha)| {
            let mut part = Partial::<T>::empty();
            let Ok(ellipse) = iso_orientation_ellipse(alpha, p) else {
                part.counts[ReasonCode::CouplingEmpty.index()] += zs.len() * resolution;
                return part;
            };
            for (iz, &z) in zs.iter().enumerate() {
                for (j, &(s, c)) in circle.iter().enumerate() {
                    let (x, y) = ellipse_point_sc(&ellipse, s, c);
                    let pose = PlatformPose { x, y, z, alpha };
                    let (code, rho) = evaluate_pose(&pose, p, lim);
                    part.counts[code.index()] += 1;
                    let point = map(&pose);
                    let acc = if code == ReasonCode::Ok {
                        let rho = rho.expect("accepted sample has joints");
                        Acc { code, sample: Some(CellSample { pose, rho, point, key: [ia as u32, iz as u32, j as u32] }) }
                    } else {
                        Acc { code, sample: None }
                    };
                    match part.cells.get_mut(&key_of(point)) {
                        Some(a) => merge_acc(a, acc),
                        None => {
                            part.cells.insert(key_of(point), acc);
                        }
                    }
                }
            }
            part
        })
        .reduce(Partial::empty, Partial::merge);

    if merged.cells.is_empty() {
        return WorkspaceGrid {
            frame,
            origin: [T::zero(); 3],
            cell_size: cell,
            dims: [0; 3],
            cells: Vec::new(),
            samples: Vec::new(),
            sample_counts: merged.counts,
        };
    }
    let mut lo = [i64::MAX; 3];
    let mut hi = [i64::MIN; 3];
    for k in merged.cells.keys() {
        for a in 0..3 {
            lo[a] = lo[a].min(k[a]);
            hi[a] = hi[a].max(k[a]);
        }
    }
    let dims = [0, 1, 2].map(|a| (hi[a] - lo[a] + 1) as usize);
    let mut grid = WorkspaceGrid {
        frame,
        origin: lo.map(|v| T::lit(v as f64) * cell),
        cell_size: cell,
        dims,
        cells: vec![Cell { code: ReasonCode::CouplingEmpty, sample: None }; dims[0] * dims[1] * dims[2]],
        samples: Vec::new(),
        sample_counts: merged.counts,
    };
    let mut keys: Vec<_> = merged.cells.into_iter().collect();
    keys.sort_by_key(|(k, _)| (k[2], k[1], k[0]));
    for (k, acc) in keys {
        let idx = grid.cell_index([0, 1, 2].map(|a| (k[a] - lo[a]) as usize));
        let sample = acc.sample.map(|s| {
            grid.samples.push(s);
            (grid.samples.len() - 1) as u32
        });
        grid.cells[idx] = Cell { code: if sample.is_some() { ReasonCode::Ok } else { acc.code }, sample };
    }
    grid
}

/// Workspace of the tool centre point in the base frame for a tool of length `delta`.
pub fn full_workspace<T: Real>(
    p: &MachineParams<T>,
    lim: &ConstraintLimits<T>,
    delta: T,
    cfg: &SweepConfig<T>,
) -> WorkspaceGrid<T> {
    sweep(p, lim, cfg, Frame::Base, |pose| tcp_in_base(pose, delta))
}

/// Workspace of the tool centre point in the table frame with a fixed tool
/// orientation `(phi1, phi2)` relative to the part.
pub fn manufacturing_workspace<T: Real>(
    p: &MachineParams<T>,
    lim: &ConstraintLimits<T>,
    delta: T,
    phi1: T,
    phi2: T,
    cfg: &SweepConfig<T>,
) -> WorkspaceGrid<T> {
    let mut q = p.clone();
    q.tool_offset = delta;
    sweep(p, lim, cfg, Frame::Table, move |pose| {
        let orient = TableOrientation::new(pose.alpha - phi1, -phi2);
        let tool = tool_pose_from_platform(pose, &orient, &q);
        [tool.x, tool.y, tool.z]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::reference_params;

    #[test]
    fn segment_distance_cases() {
        let d: f64 = segment_distance([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, 1.0, 0.0], [0.5, 2.0, 0.0]);
        assert!((d - 1.0).abs() < 1e-15);
        let d: f64 = segment_distance([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.5, -1.0, 0.0], [0.5, 1.0, 0.0]);
        assert_eq!(d, 0.0);
        let d: f64 = segment_distance([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [3.0, 0.0, 0.0], [4.0, 0.0, 0.0]);
        assert!((d - 2.0).abs() < 1e-15);
        let d: f64 = segment_distance([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [1.0, 2.0, 0.0]);
        assert!((d - 2.0).abs() < 1e-15);
    }

    #[test]
    fn reference_pose_is_ok() {
        let p = reference_params::<f64>();
        let lim = ConstraintLimits::from_params(&p);
        let cands = crate::ik::ik_parallel(-240.0, -86.0, 1000.0, &p).unwrap();
        let (best, _) = crate::ik::filter_feasible(&cands, &p).unwrap();
        assert_eq!(check_constraints(&best.pose, &best.rho, &p, &lim), ReasonCode::Ok);
        assert_eq!(evaluate_pose(&best.pose, &p, &lim).0, ReasonCode::Ok);
    }

    #[test]
    fn stroke_and_crossing_codes() {
        let p = reference_params::<f64>();
        let lim = ConstraintLimits::from_params(&p);
        let pose = PlatformPose::new(-240.0, 0.0, 1000.0, 0.0);
        let (code, rho) = evaluate_pose(&pose, &p, &lim);
        assert_eq!(code, ReasonCode::Ok);
        let mut tight = p.clone();
        tight.stroke_max[1] = rho.unwrap().rho2 - 1.0;
        assert_eq!(evaluate_pose(&pose, &tight, &lim).0, ReasonCode::Stroke);
        let crossed = PlatformPose::new(-240.0, 0.0, 1000.0, p.rod_crossing_limit() + 0.01);
        assert_eq!(check_constraints(&crossed, &rho.unwrap(), &p, &lim), ReasonCode::Interference);
    }

    #[test]
    fn zero_roll_slice_is_on_symmetry_plane() {
        let p = reference_params::<f64>();
        let lim = ConstraintLimits::from_params(&p);
        let s = constant_orientation_slice(0.0, 1000.0, &p, &lim, 90);
        assert!(!s.is_empty());
        assert!(s.iter().all(|q| q.pose.y == 0.0));
    }

    #[test]
    fn small_sweep_accounts_for_every_cell() {
        let p = reference_params::<f64>();
        let lim = ConstraintLimits::from_params(&p);
        let cfg = SweepConfig { alpha_steps: 5, z_steps: 6, resolution: 40, cell_size: 50.0 };
        let g = full_workspace(&p, &lim, 0.0, &cfg);
        assert_eq!(g.code_counts().iter().sum::<usize>(), g.cells.len());
        assert_eq!(g.evaluations(), cfg.evaluations());
        assert!(g.ok_cells() > 0);
    }
}
