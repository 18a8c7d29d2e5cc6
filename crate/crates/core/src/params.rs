//! Machine geometry, motion limits and the `key = value` parameter file.
//!
//! Frames follow the machine convention: the base frame has its z axis
//! pointing downward, sliders travel along vertical guideways and a slider
//! position is the base-frame z coordinate of its spherical joint centres.
//!
//! Leg I joins one slider to the platform through two rods whose slider-side
//! joints sit at `y = ±leg1_slider_half_span` and platform-side joints at
//! `y = ±leg1_platform_half_span`; the two spans differ, which is what couples
//! the platform roll to its position. Legs II and III are parallelograms whose
//! rods sit at `y = ∓leg23_slider_y` (slider) and `y = ∓leg23_platform_y`
//! (platform), offset by `±parallelogram_half_width` along x.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::Real;

/// Errors raised while reading or validating a parameter set.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("MissingField: {0}")]
    MissingField(String),
    #[error("InvalidValue: {name} ({reason})")]
    InvalidValue { name: String, reason: String },
    #[error("ParseError: line {line}: {message}")]
    ParseError { line: usize, message: String },
}

impl ParamsError {
    fn invalid(name: &str, reason: impl Into<String>) -> Self {
        ParamsError::InvalidValue { name: name.to_string(), reason: reason.into() }
    }
}

/// Slider positions along the three guideways (mm).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JointCoords<T> {
    pub rho1: T,
    pub rho2: T,
    pub rho3: T,
}

impl<T: Real> JointCoords<T> {
    pub fn new(rho1: T, rho2: T, rho3: T) -> Self {
        JointCoords { rho1, rho2, rho3 }
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.rho1, self.rho2, self.rho3]
    }

    pub fn from_array(a: [T; 3]) -> Self {
        JointCoords { rho1: a[0], rho2: a[1], rho3: a[2] }
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }
}

/// Complete geometric description of the machine plus its motion limits.
///
/// Lengths are millimetres, angles radians. Construct through
/// [`MachineParams::validated`], [`load_params`] or [`reference_params`].
#[derive(Debug, Clone, PartialEq)]
pub struct MachineParams<T> {
    /// `D1`: x of the leg I joints in the platform frame.
    pub leg1_platform_x: T,
    /// `d1`: x of the leg I guideway in the base frame.
    pub leg1_slider_x: T,
    /// `R1`: half the distance between the two leg I platform joints.
    pub leg1_platform_half_span: T,
    /// `r1`: half the distance between the two leg I slider joints.
    pub leg1_slider_half_span: T,
    /// `D2`: x of the leg II/III joints in the platform frame.
    pub leg23_platform_x: T,
    /// `d2`: x of the leg II/III guideways in the base frame.
    pub leg23_slider_x: T,
    /// `R2`: |y| of the leg II/III platform joints.
    pub leg23_platform_y: T,
    /// `r4`: |y| of the leg II/III guideways.
    pub leg23_slider_y: T,
    /// `L1, L2, L3`.
    pub rod_length: [T; 3],
    /// `delta`: tool centre point offset along the platform z axis.
    pub tool_offset: T,
    /// `d_a`: base z of the tilting axis.
    pub table_axis_z: T,
    /// `d_t`: distance from the tilting axis to the table frame origin.
    pub table_height: T,
    pub stroke_min: [T; 3],
    pub stroke_max: [T; 3],
    /// Admissible tilting angle interval `[min, max]`.
    pub tilt_range: [T; 2],
    pub passive_cone_half_angle: T,
    pub rod_clearance: T,
    /// x half-offset between the two rods of a parallelogram leg.
    pub parallelogram_half_width: T,
}

impl<T: Real> MachineParams<T> {
    /// Checks every invariant and returns the set unchanged on success.
    pub fn validated(self) -> Result<Self, ParamsError> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        let zero = T::zero();
        let all: [(&str, T); 17] = [
            ("D1", self.leg1_platform_x),
            ("d1", self.leg1_slider_x),
            ("R1", self.leg1_platform_half_span),
            ("r1", self.leg1_slider_half_span),
            ("D2", self.leg23_platform_x),
            ("d2", self.leg23_slider_x),
            ("R2", self.leg23_platform_y),
            ("r4", self.leg23_slider_y),
            ("L1", self.rod_length[0]),
            ("L2", self.rod_length[1]),
            ("L3", self.rod_length[2]),
            ("delta", self.tool_offset),
            ("d_a", self.table_axis_z),
            ("d_t", self.table_height),
            ("passive_cone_half_angle", self.passive_cone_half_angle),
            ("rod_clearance", self.rod_clearance),
            ("parallelogram_half_width", self.parallelogram_half_width),
        ];
        for (name, v) in all {
            if !v.is_finite() {
                return Err(ParamsError::invalid(name, "must be finite"));
            }
        }
        let positive: [(&str, T); 9] = [
            ("R1", self.leg1_platform_half_span),
            ("r1", self.leg1_slider_half_span),
            ("R2", self.leg23_platform_y),
            ("r4", self.leg23_slider_y),
            ("L1", self.rod_length[0]),
            ("L2", self.rod_length[1]),
            ("L3", self.rod_length[2]),
            ("d_t", self.table_height),
            ("parallelogram_half_width", self.parallelogram_half_width),
        ];
        for (name, v) in positive {
            if v <= zero {
                return Err(ParamsError::invalid(name, "must be strictly positive"));
            }
        }
        if self.tool_offset < zero {
            return Err(ParamsError::invalid("delta", "must be non-negative"));
        }
        let (big_r, small_r) = (self.leg1_platform_half_span, self.leg1_slider_half_span);
        if big_r == small_r {
            return Err(ParamsError::invalid("R1", "leg I must be asymmetric"));
        }
        let l1 = self.rod_length[0];
        if l1 * l1 - (big_r - small_r) * (big_r - small_r) <= zero {
            return Err(ParamsError::invalid("L1", "coupling ellipse empty at zero roll"));
        }
        if self.leg1_dx() == self.leg23_dx() {
            return Err(ParamsError::invalid(
                "D2",
                "D1 - d1 and D2 - d2 must differ (platform x is otherwise unobservable)",
            ));
        }
        for i in 0..3 {
            let (lo, hi) = (self.stroke_min[i], self.stroke_max[i]);
            if !lo.is_finite() || !hi.is_finite() {
                return Err(ParamsError::invalid("rho_min", "must be finite"));
            }
            if lo >= hi {
                return Err(ParamsError::invalid("rho_min", format!("rho_min >= rho_max on slider {}", i + 1)));
            }
        }
        let [t_lo, t_hi] = self.tilt_range;
        if !t_lo.is_finite() || !t_hi.is_finite() || t_lo >= t_hi {
            return Err(ParamsError::invalid("theta1_range", "needs min < max"));
        }
        let c = self.passive_cone_half_angle;
        if c <= zero || c >= T::FRAC_PI_2() {
            return Err(ParamsError::invalid("passive_cone_half_angle", "must lie in (0, pi/2)"));
        }
        if self.rod_clearance < zero {
            return Err(ParamsError::invalid("rod_clearance", "must be non-negative"));
        }
        if self.rod_clearance >= self.parallelogram_half_width + self.parallelogram_half_width {
            return Err(ParamsError::invalid(
                "rod_clearance",
                "parallelogram rods would always interfere",
            ));
        }
        Ok(())
    }

    /// `D1 - d1`: x offset entering the leg I constraint equations.
    #[inline]
    pub fn leg1_dx(&self) -> T {
        self.leg1_platform_x - self.leg1_slider_x
    }

    /// `D2 - d2`: x offset entering the leg II/III constraint equations.
    #[inline]
    pub fn leg23_dx(&self) -> T {
        self.leg23_platform_x - self.leg23_slider_x
    }

    /// Whether slider `i` (0-based) lies inside its stroke.
    pub fn in_stroke(&self, i: usize, rho: T) -> bool {
        rho >= self.stroke_min[i] && rho <= self.stroke_max[i]
    }

    pub fn tilt_in_range(&self, theta1: T) -> bool {
        theta1 >= self.tilt_range[0] && theta1 <= self.tilt_range[1]
    }

    /// Orientation beyond which the two rods of leg I cross: `|alpha| < acos(r1 / R1)`.
    pub fn rod_crossing_limit(&self) -> T {
        let ratio = self.leg1_slider_half_span / self.leg1_platform_half_span;
        if ratio >= T::one() {
            T::zero()
        } else {
            ratio.acos()
        }
    }

    pub fn cast<U: Real>(&self) -> MachineParams<U> {
        let c = |v: T| U::from_f64(v.to_f64().expect("finite")).expect("representable");
        MachineParams {
            leg1_platform_x: c(self.leg1_platform_x),
            leg1_slider_x: c(self.leg1_slider_x),
            leg1_platform_half_span: c(self.leg1_platform_half_span),
            leg1_slider_half_span: c(self.leg1_slider_half_span),
            leg23_platform_x: c(self.leg23_platform_x),
            leg23_slider_x: c(self.leg23_slider_x),
            leg23_platform_y: c(self.leg23_platform_y),
            leg23_slider_y: c(self.leg23_slider_y),
            rod_length: self.rod_length.map(c),
            tool_offset: c(self.tool_offset),
            table_axis_z: c(self.table_axis_z),
            table_height: c(self.table_height),
            stroke_min: self.stroke_min.map(c),
            stroke_max: self.stroke_max.map(c),
            tilt_range: self.tilt_range.map(c),
            passive_cone_half_angle: c(self.passive_cone_half_angle),
            rod_clearance: c(self.rod_clearance),
            parallelogram_half_width: c(self.parallelogram_half_width),
        }
    }

    /// Renders the set in the parameter file format. `load_params` of the
    /// result reproduces `self` exactly.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        out.push_str("# VERNE machine parameters (lengths mm, angles rad)\n");
        let mut line = |key: &str, vals: &[T], unit: &str| {
            let joined = vals.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ");
            let _ = writeln!(out, "{key} = {joined} {unit}");
        };
        line("D1", &[self.leg1_platform_x], "mm");
        line("d1", &[self.leg1_slider_x], "mm");
        line("R1", &[self.leg1_platform_half_span], "mm");
        line("r1", &[self.leg1_slider_half_span], "mm");
        line("D2", &[self.leg23_platform_x], "mm");
        line("d2", &[self.leg23_slider_x], "mm");
        line("R2", &[self.leg23_platform_y], "mm");
        line("r4", &[self.leg23_slider_y], "mm");
        line("L1", &[self.rod_length[0]], "mm");
        line("L2", &[self.rod_length[1]], "mm");
        line("L3", &[self.rod_length[2]], "mm");
        line("delta", &[self.tool_offset], "mm");
        line("d_a", &[self.table_axis_z], "mm");
        line("d_t", &[self.table_height], "mm");
        line("rho_min", &self.stroke_min, "mm");
        line("rho_max", &self.stroke_max, "mm");
        line("theta1_range", &self.tilt_range, "rad");
        line("passive_cone_half_angle", &[self.passive_cone_half_angle], "rad");
        line("rod_clearance", &[self.rod_clearance], "mm");
        line("parallelogram_half_width", &[self.parallelogram_half_width], "mm");
        out
    }
}

/// Built-in desk-scale reference machine.
///
/// The pose `(-240, -86, 1000)` mm sits inside its workspace with
/// sixteen inverse solutions, and the joint values `(674, 685, 250)` mm are in
/// stroke.
pub fn reference_params<T: Real>() -> MachineParams<T> {
    let l = T::lit;
    MachineParams {
        leg1_platform_x: l(200.0),
        leg1_slider_x: l(260.0),
        leg1_platform_half_span: l(200.0),
        leg1_slider_half_span: l(120.0),
        leg23_platform_x: l(-200.0),
        leg23_slider_x: l(-740.0),
        leg23_platform_y: l(150.0),
        leg23_slider_y: l(250.0),
        rod_length: [l(800.0), l(800.0), l(800.0)],
        tool_offset: l(100.0),
        table_axis_z: l(1300.0),
        table_height: l(150.0),
        stroke_min: [l(100.0); 3],
        stroke_max: [l(1100.0); 3],
        tilt_range: [-T::FRAC_PI_2(), T::FRAC_PI_2()],
        passive_cone_half_angle: l(0.9),
        rod_clearance: l(20.0),
        parallelogram_half_width: l(60.0),
    }
}

const LIST_KEYS: [&str; 3] = ["rho_min", "rho_max", "theta1_range"];
const DEFAULT_PARALLELOGRAM_HALF_WIDTH: f64 = 60.0;

/// Parses and validates a parameter file.
///
/// Lines are `key = value unit`; `#` starts a comment. Per-slider strokes and
/// `theta1_range` take comma-separated lists sharing one unit suffix.
/// `parallelogram_half_width` is optional.
pub fn load_params<T: Real>(source: &str) -> Result<MachineParams<T>, ParamsError> {
    let mut fields: Vec<(String, Vec<T>)> = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ParamsError::ParseError {
            line: line_no,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        let unit = expected_unit(key).ok_or_else(|| ParamsError::ParseError {
            line: line_no,
            message: format!("unknown key `{key}`"),
        })?;
        if fields.iter().any(|(k, _)| k == key) {
            return Err(ParamsError::ParseError { line: line_no, message: format!("duplicate key `{key}`") });
        }
        let value = value.trim();
        let body = value
            .strip_suffix(unit)
            .ok_or_else(|| ParamsError::invalid(key, format!("missing unit `{unit}`")))?;
        let mut vals = Vec::new();
        for item in body.split(',') {
            let item = item.trim();
            let v = T::from_str(item).map_err(|_| ParamsError::ParseError {
                line: line_no,
                message: format!("`{item}` is not a number"),
            })?;
            vals.push(v);
        }
        let want = match key {
            "rho_min" | "rho_max" => 3,
            "theta1_range" => 2,
            _ => 1,
        };
        // a single stroke value applies to all three sliders
        if vals.len() == 1 && (key == "rho_min" || key == "rho_max") {
            vals = vec![vals[0]; 3];
        }
        if vals.len() != want {
            return Err(ParamsError::invalid(key, format!("expected {want} value(s), got {}", vals.len())));
        }
        fields.push((key.to_string(), vals));
    }

    let get = |name: &str| -> Result<Vec<T>, ParamsError> {
        fields
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| ParamsError::MissingField(name.to_string()))
    };
    let one = |name: &str| get(name).map(|v| v[0]);
    let three = |name: &str| get(name).map(|v| [v[0], v[1], v[2]]);

    let params = MachineParams {
        leg1_platform_x: one("D1")?,
        leg1_slider_x: one("d1")?,
        leg1_platform_half_span: one("R1")?,
        leg1_slider_half_span: one("r1")?,
        leg23_platform_x: one("D2")?,
        leg23_slider_x: one("d2")?,
        leg23_platform_y: one("R2")?,
        leg23_slider_y: one("r4")?,
        rod_length: [one("L1")?, one("L2")?, one("L3")?],
        tool_offset: one("delta")?,
        table_axis_z: one("d_a")?,
        table_height: one("d_t")?,
        stroke_min: three("rho_min")?,
        stroke_max: three("rho_max")?,
        tilt_range: {
            let v = get("theta1_range")?;
            [v[0], v[1]]
        },
        passive_cone_half_angle: one("passive_cone_half_angle")?,
        rod_clearance: one("rod_clearance")?,
        parallelogram_half_width: one("parallelogram_half_width")
            .unwrap_or_else(|_| T::lit(DEFAULT_PARALLELOGRAM_HALF_WIDTH)),
    };
    params.validated()
}

fn expected_unit(key: &str) -> Option<&'static str> {
    match key {
        "D1" | "d1" | "R1" | "r1" | "D2" | "d2" | "R2" | "r4" | "L1" | "L2" | "L3" | "delta" | "d_a"
        | "d_t" | "rod_clearance" | "parallelogram_half_width" => Some("mm"),
        k if LIST_KEYS[..2].contains(&k) => Some("mm"),
        "theta1_range" | "passive_cone_half_angle" => Some("rad"),
        _ => None,
    }
}

impl<T: Real> FromStr for MachineParams<T> {
    type Err = ParamsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        load_params(s)
    }
}
