//! Homogeneous transforms between the base frame, the tilting-table frame,
//! the platform frame and the tool centre point.

use std::ops::Mul;

use crate::params::{JointCoords, MachineParams};
use crate::scalar::{wrap_angle, Real};

pub type Vec3<T> = [T; 3];

/// Rigid transform stored as a rotation block and a translation column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform4<T> {
    pub rot: [[T; 3]; 3],
    pub trans: Vec3<T>,
}

impl<T: Real> Transform4<T> {
    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Transform4 { rot: [[o, z, z], [z, o, z], [z, z, o]], trans: [z, z, z] }
    }

    pub fn translation(x: T, y: T, z: T) -> Self {
        Transform4 { trans: [x, y, z], ..Self::identity() }
    }

    pub fn rot_x(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Transform4 { rot: [[o, z, z], [z, c, -s], [z, s, c]], trans: [z, z, z] }
    }

    pub fn rot_z(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Transform4 { rot: [[c, -s, z], [s, c, z], [z, z, o]], trans: [z, z, z] }
    }

    /// Half-turn about x, built exactly rather than through `sin(pi)`.
    pub fn flip_x() -> Self {
        let (o, z) = (T::one(), T::zero());
        Transform4 { rot: [[o, z, z], [z, -o, z], [z, z, -o]], trans: [z, z, z] }
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        let mut rot = [[T::zero(); 3]; 3];
        for (i, row) in rot.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.rot[i][k] * rhs.rot[k][j]).sum();
            }
        }
        let moved = self.apply_vector(rhs.trans);
        let trans = [moved[0] + self.trans[0], moved[1] + self.trans[1], moved[2] + self.trans[2]];
        Transform4 { rot, trans }
    }

    pub fn inverse(&self) -> Self {
        let mut rot = [[T::zero(); 3]; 3];
        for (i, row) in rot.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.rot[j][i];
            }
        }
        let t = self.trans;
        let trans = [0, 1, 2].map(|i| -(rot[i][0] * t[0] + rot[i][1] * t[1] + rot[i][2] * t[2]));
        Transform4 { rot, trans }
    }

    pub fn apply_vector(&self, v: Vec3<T>) -> Vec3<T> {
        [0, 1, 2].map(|i| self.rot[i][0] * v[0] + self.rot[i][1] * v[1] + self.rot[i][2] * v[2])
    }

    pub fn apply_point(&self, p: Vec3<T>) -> Vec3<T> {
        let v = self.apply_vector(p);
        [v[0] + self.trans[0], v[1] + self.trans[1], v[2] + self.trans[2]]
    }

    /// Full 4×4 matrix with bottom row `(0, 0, 0, 1)`.
    pub fn to_matrix(&self) -> [[T; 4]; 4] {
        let mut m = [[T::zero(); 4]; 4];
        for i in 0..3 {
            m[i][..3].copy_from_slice(&self.rot[i]);
            m[i][3] = self.trans[i];
        }
        m[3][3] = T::one();
        m
    }

    /// `max |RᵀR - I|` over all entries.
    pub fn orthonormality_error(&self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let dot: T = (0..3).map(|k| self.rot[k][i] * self.rot[k][j]).sum();
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> T {
        let r = &self.rot;
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    }

    /// Roll angle of a rotation about x, read as `atan2(R[2][1], R[1][1])`.
    /// Only meaningful when the rotation is a pure x-rotation.
    pub fn x_rotation_angle(&self) -> T {
        wrap_angle(self.rot[2][1].atan2(self.rot[1][1]))
    }

    /// Largest deviation of the rotation block from the x-rotation family
    /// (entries that must be exactly 0 or 1).
    pub fn x_rotation_defect(&self) -> T {
        let r = &self.rot;
        [(r[0][0] - T::one()).abs(), r[0][1].abs(), r[0][2].abs(), r[1][0].abs(), r[2][0].abs()]
            .into_iter()
            .fold(T::zero(), T::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.rot[i][j] - other.rot[i][j]).abs());
            }
            worst = worst.max((self.trans[i] - other.trans[i]).abs());
        }
        worst
    }
}

impl<T: Real> Mul for Transform4<T> {
    type Output = Transform4<T>;

    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

/// Platform position and its coupled roll about the base x axis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlatformPose<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub alpha: T,
}

impl<T: Real> PlatformPose<T> {
    pub fn new(x: T, y: T, z: T, alpha: T) -> Self {
        PlatformPose { x, y, z, alpha: wrap_angle(alpha) }
    }

    pub fn position(&self) -> Vec3<T> {
        [self.x, self.y, self.z]
    }

    /// Reflection across the plane `y = 0`.
    pub fn mirrored(&self) -> Self {
        PlatformPose { x: self.x, y: -self.y, z: self.z, alpha: wrap_angle(-self.alpha) }
    }
}

/// Tilting table angles: `theta1` about the horizontal axis, `theta2` about the table normal.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TableOrientation<T> {
    pub theta1: T,
    pub theta2: T,
}

impl<T: Real> TableOrientation<T> {
    pub fn new(theta1: T, theta2: T) -> Self {
        TableOrientation { theta1, theta2: wrap_angle(theta2) }
    }
}

/// Tool centre point and tool orientation expressed in the table frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ToolPose<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub phi1: T,
    pub phi2: T,
}

impl<T: Real> ToolPose<T> {
    pub fn new(x: T, y: T, z: T, phi1: T, phi2: T) -> Self {
        ToolPose { x, y, z, phi1: wrap_angle(phi1), phi2: wrap_angle(phi2) }
    }
}

/// `Trans(x, y, z) · Rot(x, alpha)`: platform frame to base frame.
pub fn base_from_platform<T: Real>(pose: &PlatformPose<T>) -> Transform4<T> {
    Transform4::translation(pose.x, pose.y, pose.z) * Transform4::rot_x(pose.alpha)
}

/// `trans(z, d_a) rot(x, θ1) trans(z, d_t) rot(x, π) rot(z, θ2)`: table frame to base frame.
pub fn base_from_table<T: Real>(orient: &TableOrientation<T>, p: &MachineParams<T>) -> Transform4<T> {
    let z = T::zero();
    Transform4::translation(z, z, p.table_axis_z)
        * Transform4::rot_x(orient.theta1)
        * Transform4::translation(z, z, p.table_height)
        * Transform4::flip_x()
        * Transform4::rot_z(orient.theta2)
}

/// `trans(X_u, Y_u, Z_u) rot(z, φ2) rot(x, π + φ1) trans(z, -Δ)`: platform frame to table frame.
pub fn table_from_platform<T: Real>(tool: &ToolPose<T>, p: &MachineParams<T>) -> Transform4<T> {
    let z = T::zero();
    Transform4::translation(tool.x, tool.y, tool.z)
        * Transform4::rot_z(tool.phi2)
        * Transform4::flip_x()
        * Transform4::rot_x(tool.phi1)
        * Transform4::translation(z, z, -p.tool_offset)
}

/// Tool centre point in the base frame for a tool of length `delta`.
pub fn tcp_in_base<T: Real>(pose: &PlatformPose<T>, delta: T) -> Vec3<T> {
    let (s, c) = pose.alpha.sin_cos();
    [pose.x, pose.y - delta * s, pose.z + delta * c]
}

/// Closed-form tool pose in the table frame for a platform pose and table angles.
pub fn tool_pose_from_platform<T: Real>(
    pose: &PlatformPose<T>,
    orient: &TableOrientation<T>,
    p: &MachineParams<T>,
) -> ToolPose<T> {
    let (s1, c1) = orient.theta1.sin_cos();
    let (s2, c2) = orient.theta2.sin_cos();
    let delta = p.tool_offset;
    let tilt_gap = pose.alpha - orient.theta1;
    let v1 = delta * tilt_gap.sin() - c1 * pose.y - s1 * (pose.z - p.table_axis_z);
    let v2 = p.table_height - c1 * pose.z + p.table_axis_z * c1 - delta * tilt_gap.cos();
    ToolPose {
        x: c2 * pose.x + v1 * s2,
        y: -s2 * pose.x + v1 * c2,
        z: s1 * pose.y + v2,
        phi1: wrap_angle(tilt_gap),
        phi2: wrap_angle(-orient.theta2),
    }
}

/// Same quantity as [`tool_pose_from_platform`] computed by chaining
/// `inverse(base_from_table) · base_from_platform` on the platform-frame TCP.
pub fn tool_pose_by_chain<T: Real>(
    pose: &PlatformPose<T>,
    orient: &TableOrientation<T>,
    p: &MachineParams<T>,
) -> ToolPose<T> {
    let chain = base_from_table(orient, p).inverse() * base_from_platform(pose);
    let u = chain.apply_point([T::zero(), T::zero(), p.tool_offset]);
    ToolPose { x: u[0], y: u[1], z: u[2], phi1: wrap_angle(pose.alpha - orient.theta1), phi2: wrap_angle(-orient.theta2) }
}

/// Platform pose producing a tool pose once the table angles are known.
/// The table rotation about its normal must satisfy `theta2 = -phi2`.
pub fn platform_from_tool<T: Real>(tool: &ToolPose<T>, theta1: T, p: &MachineParams<T>) -> PlatformPose<T> {
    let orient = TableOrientation { theta1, theta2: -tool.phi2 };
    let chain = base_from_table(&orient, p) * table_from_platform(tool, p);
    PlatformPose {
        x: chain.trans[0],
        y: chain.trans[1],
        z: chain.trans[2],
        alpha: wrap_angle(theta1 + tool.phi1),
    }
}

/// The six rods as `(slider joint A, platform joint B)` pairs in the base frame,
/// ordered leg I rod 1, leg I rod 2, leg II rod 1, leg II rod 2, leg III rod 1, leg III rod 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RodEndpoints<T> {
    pub slider: [Vec3<T>; 6],
    pub platform: [Vec3<T>; 6],
}

/// Index of the leg (0, 1, 2) each rod belongs to.
pub const ROD_LEG: [usize; 6] = [0, 0, 1, 1, 2, 2];

/// Platform-frame coordinates of the six platform joints.
pub fn platform_joints_local<T: Real>(p: &MachineParams<T>) -> [Vec3<T>; 6] {
    let z = T::zero();
    let w = p.parallelogram_half_width;
    let (x1, r1) = (p.leg1_platform_x, p.leg1_platform_half_span);
    let (x2, r2) = (p.leg23_platform_x, p.leg23_platform_y);
    [[x1, r1, z], [x1, -r1, z], [x2 + w, -r2, z], [x2 - w, -r2, z], [x2 + w, r2, z], [x2 - w, r2, z]]
}

/// Platform joints `B_ij` in the base frame.
pub fn platform_attachments<T: Real>(pose: &PlatformPose<T>, p: &MachineParams<T>) -> [Vec3<T>; 6] {
    let t = base_from_platform(pose);
    platform_joints_local(p).map(|b| t.apply_point(b))
}

/// Slider joints `A_ij` in the base frame.
pub fn slider_attachments<T: Real>(rho: &JointCoords<T>, p: &MachineParams<T>) -> [Vec3<T>; 6] {
    let w = p.parallelogram_half_width;
    let (x1, r1) = (p.leg1_slider_x, p.leg1_slider_half_span);
    let (x2, r4) = (p.leg23_slider_x, p.leg23_slider_y);
    [
        [x1, r1, rho.rho1],
        [x1, -r1, rho.rho1],
        [x2 + w, -r4, rho.rho2],
        [x2 - w, -r4, rho.rho2],
        [x2 + w, r4, rho.rho3],
        [x2 - w, r4, rho.rho3],
    ]
}

pub fn rod_endpoints<T: Real>(pose: &PlatformPose<T>, rho: &JointCoords<T>, p: &MachineParams<T>) -> RodEndpoints<T> {
    RodEndpoints { slider: slider_attachments(rho, p), platform: platform_attachments(pose, p) }
}
