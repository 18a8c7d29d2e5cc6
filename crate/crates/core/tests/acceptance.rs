//! Acceptance suite. Prints one PASS/FAIL line per criterion, followed by
//! indented detail lines, and exits non-zero on any unexpected failure.
//!
//! Two criteria contain a sub-claim that does not hold mathematically. They
//! are reported as `FAIL (known)` with the evidence and do not fail the run;
//! if one of them ever starts passing, the run fails so the list is revisited.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use verne_core::constraints::{chain_residuals, closed_form_residuals, leg_slider_above};
use verne_core::coupling::{coupling_residual_scaled, ellipse_point, iso_orientation_ellipse};
use verne_core::fk::{fk_machine, fk_octic, fk_parallel, RootSource};
use verne_core::ik::{filter_feasible, ik_machine, ik_parallel, orientation_roots, IkError, OrientationTarget};
use verne_core::oracle::{oracle_fk, oracle_ik, DEFAULT_GRID};
use verne_core::params::{reference_params, JointCoords, MachineParams};
use verne_core::polyroots::{certify, real_roots, Poly};
use verne_core::scalar::{angle_diff, wrap_angle};
use verne_core::transforms::{
    base_from_platform, base_from_table, rod_endpoints, table_from_platform, tool_pose_by_chain, tool_pose_from_platform,
    PlatformPose, TableOrientation, ToolPose,
};
use verne_core::workspace::{
    alpha_grid, check_constraints, constant_orientation_slice, full_workspace, manufacturing_workspace, z_grid,
    ConstraintLimits, ReasonCode, SweepConfig,
};

type P = MachineParams<f64>;

#[derive(Default)]
struct Outcome {
    failures: Vec<String>,
    known: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.notes.push(format!("ok   {what}"));
        } else {
            self.failures.push(what);
        }
    }

    /// A sub-claim expected to fail; `holds` is what was observed.
    fn known_failure(&mut self, holds: bool, what: impl Into<String>) {
        let what = what.into();
        if holds {
            self.failures.push(format!("expected failure now holds, revisit: {what}"));
        } else {
            self.known.push(what);
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(format!("info {}", what.into()));
    }

    fn timed(&mut self, elapsed: Duration, limit: Duration, what: &str) {
        self.check(elapsed < limit, format!("{what} runtime {elapsed:.2?} < {limit:?}"));
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_pose(r: &mut ChaCha8Rng) -> PlatformPose<f64> {
    PlatformPose::new(
        r.random_range(-900.0..400.0),
        r.random_range(-700.0..700.0),
        r.random_range(0.0..1900.0),
        r.random_range(-PI..PI),
    )
}

fn random_stroke(r: &mut ChaCha8Rng, p: &P) -> JointCoords<f64> {
    JointCoords::new(
        r.random_range(p.stroke_min[0]..p.stroke_max[0]),
        r.random_range(p.stroke_min[1]..p.stroke_max[1]),
        r.random_range(p.stroke_min[2]..p.stroke_max[2]),
    )
}

fn criterion_1(p: &P, o: &mut Outcome) {
    let mut r = rng(1);
    let t = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let pose = random_pose(&mut r);
        let rho = JointCoords::new(r.random_range(-500.0..2000.0), r.random_range(-500.0..2000.0), r.random_range(-500.0..2000.0));
        let a = closed_form_residuals(&pose, &rho, p);
        let b = chain_residuals(&pose, &rho, p);
        for i in 0..4 {
            let l = p.rod_length[[0, 0, 1, 2][i]];
            let scale = (l * l).max(a[i].abs()).max(b[i].abs());
            worst = worst.max((a[i] - b[i]).abs() / scale);
        }
    }
    let elapsed = t.elapsed();
    o.check(worst < 1e-12, format!("max relative gap between chain and closed-form residuals {worst:.3e} < 1e-12 over 1e4 poses"));
    o.timed(elapsed, Duration::from_secs(1), "fidelity");
}

fn criterion_2(p: &P, o: &mut Outcome) {
    let mut r = rng(2);
    let (mut machine_outputs, mut identity_breaks) = (0usize, 0usize);
    for _ in 0..300 {
        let tool = ToolPose::new(
            r.random_range(-300.0..300.0),
            r.random_range(-300.0..300.0),
            r.random_range(-500.0..300.0),
            r.random_range(-1.0..1.0),
            r.random_range(-PI..PI),
        );
        let Ok(cands) = ik_machine(&tool, p) else { continue };
        for c in &cands {
            machine_outputs += 1;
            let th1 = c.theta1.expect("machine candidate has theta1");
            let th2 = c.theta2.expect("machine candidate has theta2");
            if th2 != -tool.phi2 || c.alpha != wrap_angle(th1 + tool.phi1) || c.pose.alpha != c.alpha {
                identity_breaks += 1;
            }
        }
    }
    for _ in 0..300 {
        let rho = random_stroke(&mut r, p);
        let orient = TableOrientation::new(r.random_range(-1.5..1.5), r.random_range(-PI..PI));
        let Ok(sols) = fk_machine(&rho, &orient, p) else { continue };
        for s in &sols {
            machine_outputs += 1;
            if s.tool.phi2 != wrap_angle(-orient.theta2) || s.tool.phi1 != wrap_angle(s.platform.pose.alpha - orient.theta1) {
                identity_breaks += 1;
            }
        }
    }
    o.check(
        identity_breaks == 0 && machine_outputs > 100,
        format!("theta2 = -phi2 and alpha = theta1 + phi1 bit-exact on {machine_outputs} machine IK/FK outputs"),
    );

    let (mut ortho, mut det, mut chain_gap) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let pose = random_pose(&mut r);
        let orient = TableOrientation::new(r.random_range(-PI..PI), r.random_range(-PI..PI));
        let tool = ToolPose::new(r.random_range(-500.0..500.0), r.random_range(-500.0..500.0), r.random_range(-500.0..500.0), r.random_range(-PI..PI), r.random_range(-PI..PI));
        for m in [base_from_platform(&pose), base_from_table(&orient, p), table_from_platform(&tool, p), base_from_table(&orient, p).inverse() * base_from_platform(&pose)] {
            ortho = ortho.max(m.orthonormality_error());
            det = det.max((m.determinant() - 1.0).abs());
        }
        let a = tool_pose_from_platform(&pose, &orient, p);
        let b = tool_pose_by_chain(&pose, &orient, p);
        chain_gap = chain_gap.max((a.x - b.x).abs().max((a.y - b.y).abs()).max((a.z - b.z).abs()));
    }
    o.check(ortho < 1e-12 && det < 1e-12, format!("rotation blocks orthonormal ({ortho:.1e}) with det +1 ({det:.1e}) at 100 inputs"));
    o.check(chain_gap < 1e-9, format!("closed-form tool pose equals the transform chain to {chain_gap:.2e} mm"));
}

fn criterion_3(p: &P, o: &mut Outcome) {
    let limit = p.rod_crossing_limit();
    let mut worst = 0.0f64;
    let mut ellipses = 0;
    for k in 0..50 {
        let alpha = -limit + 2.0 * limit * (k as f64 + 0.5) / 50.0;
        let e = iso_orientation_ellipse(alpha, p).expect("reference ellipses are nonempty");
        ellipses += 1;
        for j in 0..360 {
            let (x, y) = ellipse_point(&e, 2.0 * PI * j as f64 / 360.0);
            worst = worst.max(coupling_residual_scaled(x, y, alpha, p).abs());
        }
    }
    o.check(worst < 1e-12, format!("max dimensionless residual {worst:.2e} < 1e-12 over {ellipses} ellipses x 360 points"));

    let e0 = iso_orientation_ellipse(0.0, p).unwrap();
    o.check(e0.b == 0.0 && e0.is_segment() && e0.a > 0.0, "sin(alpha) = 0 gives b = 0 (segment on y = 0)");

    // a short leg I rod makes the radicand vanish at a finite roll
    let mut q = p.clone();
    q.rod_length[0] = 150.0;
    let (big_r, small_r, l) = (q.leg1_platform_half_span, q.leg1_slider_half_span, q.rod_length[0]);
    let tangent = ((big_r * big_r + small_r * small_r - l * l) / (2.0 * big_r * small_r)).acos();
    let point = iso_orientation_ellipse(tangent, &q).unwrap();
    o.check(point.is_point() && point.b.abs() < 1e-6, format!("radicand 0 at alpha = {tangent:.6} gives a single point"));
    o.check(iso_orientation_ellipse(tangent + 1e-3, &q).is_err(), "negative radicand reports EmptyLocus");
}

fn criterion_4(p: &P, o: &mut Outcome) {
    let reference = ik_parallel(-240.0, -86.0, 1000.0, p).expect("reference pose is reachable");
    o.check(reference.len() == 16, format!("reference pose (-240, -86, 1000) has {} candidates (16 expected)", reference.len()));

    let mut r = rng(4);
    let (mut max_roots, mut max_cands, mut reachable) = (0, 0, 0);
    let t = Instant::now();
    for _ in 0..10_000 {
        let (x, y, z) = (r.random_range(-900.0..400.0), r.random_range(-700.0..700.0), r.random_range(0.0..1900.0));
        if let Ok(roots) = orientation_roots(&OrientationTarget::Platform { x, y, z }, p) {
            max_roots = max_roots.max(roots.len());
        }
        if let Ok(c) = ik_parallel(x, y, z, p) {
            reachable += 1;
            max_cands = max_cands.max(c.len());
        }
    }
    let solve_time = t.elapsed();
    o.check(max_roots <= 4, format!("max real orientation roots over 1e4 targets: {max_roots} (<= 4)"));
    o.check(max_cands <= 16, format!("max candidates over 1e4 targets: {max_cands} (<= 16), {reachable} reachable"));

    let mut mismatches = 0;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (x, y, z) = (r.random_range(-600.0..100.0), r.random_range(-400.0..400.0), r.random_range(500.0..1500.0));
        let oracle = oracle_ik(x, y, z, p, DEFAULT_GRID);
        let analytic = ik_parallel(x, y, z, p).unwrap_or_default();
        if oracle.candidates.len() != analytic.len() {
            mismatches += 1;
            continue;
        }
        for c in &analytic {
            let best = oracle
                .candidates
                .iter()
                .filter(|q| q.branch_tags == c.branch_tags)
                .map(|q| {
                    let d = q.rho.as_array().iter().zip(c.rho.as_array()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                    angle_diff(q.alpha, c.alpha).abs().max(d)
                })
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
    }
    o.check(mismatches == 0 && worst < 1e-6, format!("oracle agreement on 100 targets: {mismatches} count mismatches, max deviation {worst:.2e}"));
    o.timed(solve_time, Duration::from_secs(10), "1e4 inverse solves");
}

fn criterion_5(p: &P, o: &mut Outcome) {
    let lim = ConstraintLimits::from_params(p);
    let grid = full_workspace(p, &lim, 0.0, &SweepConfig::desk_budget());
    let (mut unique, mut none, mut multiple, mut bad_survivor, mut other) = (0, 0, 0, 0, 0);
    let mut tried = 0;
    for s in grid.accepted().take(1000) {
        tried += 1;
        let cands = match ik_parallel(s.pose.x, s.pose.y, s.pose.z, p) {
            Ok(c) => c,
            Err(_) => {
                other += 1;
                continue;
            }
        };
        match filter_feasible(&cands, p) {
            Ok((best, _)) => {
                unique += 1;
                let rods = rod_endpoints(&best.pose, &best.rho, p);
                let above = (0..3).all(|leg| leg_slider_above(&rods, leg));
                let clear = p.leg1_platform_half_span * best.alpha.cos() > p.leg1_slider_half_span;
                if !above || !clear {
                    bad_survivor += 1;
                }
            }
            Err(IkError::NoFeasibleSolution) => none += 1,
            Err(IkError::MultipleFeasible(_)) => multiple += 1,
            Err(_) => other += 1,
        }
    }
    o.check(tried == 1000, format!("{tried} workspace poses sampled"));
    o.check(
        unique == tried && multiple == 0,
        format!("exactly one survivor: {unique} unique, {none} none, {multiple} multiple, {other} errors"),
    );
    o.check(bad_survivor == 0, format!("survivors slider-above with R1 cos(theta1 + phi1) > r1: {bad_survivor} violations"));
}

fn criterion_6(p: &P, o: &mut Outcome) {
    let mut r = rng(6);
    let (mut max_real_roots, mut max_sols, mut worst_res, mut multi_reachable) = (0, 0, 0.0f64, 0);
    let mut close_pairs = 0;
    let grid_step = 2.0 * PI / DEFAULT_GRID as f64;
    let mut solve_time = Duration::ZERO;
    for _ in 0..10_000 {
        let rho = random_stroke(&mut r, p);
        if let Ok(poly) = fk_octic(&rho, p) {
            if let Ok(roots) = real_roots(&poly, 1e-13) {
                max_real_roots = max_real_roots.max(roots.len());
            }
        }
        let t = Instant::now();
        let sols = fk_parallel(&rho, p);
        solve_time += t.elapsed();
        let Ok(sols) = sols else { continue };
        max_sols = max_sols.max(sols.len());
        worst_res = sols.iter().fold(worst_res, |m, s| m.max(s.max_residual()));
        if sols.iter().filter(|s| s.assembly_mode.machine_reachable).count() > 1 {
            multi_reachable += 1;
        }
        if sols.windows(2).any(|w| angle_diff(w[1].pose.alpha, w[0].pose.alpha).abs() < grid_step) {
            close_pairs += 1;
        }
    }
    o.check(max_real_roots <= 8, format!("max real octic roots over 1e4 in-stroke joint sets: {max_real_roots} (<= 8)"));
    o.check(worst_res < 1e-9, format!("max back-substituted residual {worst_res:.2e} < 1e-9"));
    o.check(max_sols <= 6, format!("observed in-stroke maximum of {max_sols} assembly modes (<= 6)"));
    o.check(multi_reachable == 0, format!("joint sets with more than one machine-reachable mode: {multi_reachable}"));
    o.note(format!("{close_pairs} joint sets have two modes closer than the oracle grid step {grid_step:.2e} rad"));

    // equal parallelogram sliders
    let (mut samples, mut off_axis, mut reachable_off_axis) = (0, 0, 0);
    let mut example = None;
    let on_axis = |s: &PlatformPose<f64>| s.y.abs() < 1e-9 && (s.alpha.abs() < 1e-9 || (s.alpha.abs() - PI).abs() < 1e-9);
    for _ in 0..500 {
        let (r1, r23) = (r.random_range(100.0..1100.0), r.random_range(100.0..1100.0));
        let Ok(sols) = fk_parallel(&JointCoords::new(r1, r23, r23), p) else { continue };
        samples += 1;
        let band_ok = sols.iter().filter(|s| s.source == RootSource::SingularBand).all(|s| on_axis(&s.pose));
        if sols.iter().any(|s| !on_axis(&s.pose)) {
            off_axis += 1;
            if example.is_none() {
                let s = sols.iter().find(|s| !on_axis(&s.pose)).unwrap();
                example = Some(format!("rho = ({r1:.3}, {r23:.3}, {r23:.3}) has alpha = {:.6}, y = {:.3}", s.pose.alpha, s.pose.y));
            }
        }
        if !band_ok || sols.iter().any(|s| s.assembly_mode.machine_reachable && !on_axis(&s.pose)) {
            reachable_off_axis += 1;
        }
        let mirrored = sols.iter().all(|s| {
            let m = s.pose.mirrored();
            sols.iter().any(|q| angle_diff(q.pose.alpha, m.alpha).abs() < 1e-9 && (q.pose.y - m.y).abs() < 1e-6)
        });
        if !mirrored {
            reachable_off_axis += 1;
        }
    }
    o.check(
        reachable_off_axis == 0,
        format!("rho2 = rho3: machine-reachable and singular-band modes lie on y = 0, alpha in {{0, pi}}, and the mode set is mirror symmetric ({samples} joint sets)"),
    );
    o.known_failure(
        off_axis == 0,
        format!(
            "rho2 = rho3 forces y = 0 for every mode: {off_axis}/{samples} joint sets carry an off-axis mirror pair, e.g. {}",
            example.unwrap_or_default()
        ),
    );

    let (mut mismatches, mut escalated) = (0, 0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let rho = random_stroke(&mut r, p);
        let analytic = fk_parallel(&rho, p).unwrap_or_default();
        // modes closer than the grid step are invisible to the default scan
        let sub_grid = analytic.windows(2).any(|w| angle_diff(w[1].pose.alpha, w[0].pose.alpha).abs() < grid_step);
        let oracle = oracle_fk(&rho, p, if sub_grid { 1 << 20 } else { DEFAULT_GRID });
        escalated += sub_grid as usize;
        if oracle.solutions.len() != analytic.len() {
            mismatches += 1;
            continue;
        }
        for (a, q) in analytic.iter().zip(&oracle.solutions) {
            let d = angle_diff(a.pose.alpha, q.alpha)
                .abs()
                .max((a.pose.x - q.x).abs())
                .max((a.pose.y - q.y).abs())
                .max((a.pose.z - q.z).abs());
            worst = worst.max(d);
        }
    }
    o.check(mismatches == 0 && worst < 1e-6, format!("oracle agreement on 100 joint sets: {mismatches} count mismatches, max deviation {worst:.2e}"));
    o.note(format!("{escalated} of them needed a 2^20-point oracle grid to separate close modes"));
    o.timed(solve_time, Duration::from_secs(10), "1e4 forward solves");
}

fn criterion_7(p: &P, o: &mut Outcome) {
    let lim = ConstraintLimits::from_params(p);
    let grid = full_workspace(p, &lim, 0.0, &SweepConfig::desk_budget());
    let (mut n, mut worst_pos, mut worst_ang, mut lost) = (0, 0.0f64, 0.0f64, 0);
    for s in grid.accepted().take(1000) {
        n += 1;
        let Ok((best, _)) = ik_parallel(s.pose.x, s.pose.y, s.pose.z, p).and_then(|c| filter_feasible(&c, p)) else {
            lost += 1;
            continue;
        };
        let sols = fk_parallel(&best.rho, p).unwrap_or_default();
        match sols.iter().find(|m| m.assembly_mode.machine_reachable) {
            Some(m) => {
                let d = (m.pose.x - s.pose.x).abs().max((m.pose.y - s.pose.y).abs()).max((m.pose.z - s.pose.z).abs());
                worst_pos = worst_pos.max(d);
                worst_ang = worst_ang.max(angle_diff(m.pose.alpha, s.pose.alpha).abs());
            }
            None => lost += 1,
        }
    }
    o.check(
        lost == 0 && worst_pos < 1e-6 && worst_ang < 1e-9,
        format!("FK after IK on {n} interior poses: {lost} lost, max {worst_pos:.2e} mm, {worst_ang:.2e} rad"),
    );

    let mut r = rng(7);
    let (mut tried, mut worst_rho, mut missing) = (0, 0.0f64, 0);
    while tried < 1000 {
        let rho = random_stroke(&mut r, p);
        let Ok(sols) = fk_parallel(&rho, p) else { continue };
        let Some(m) = sols.iter().find(|m| m.assembly_mode.machine_reachable) else { continue };
        tried += 1;
        let cands = ik_parallel(m.pose.x, m.pose.y, m.pose.z, p).unwrap_or_default();
        let best = cands
            .iter()
            .filter(|c| angle_diff(c.alpha, m.pose.alpha).abs() < 1e-6)
            .map(|c| c.rho.as_array().iter().zip(rho.as_array()).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs())))
            .fold(f64::INFINITY, f64::min);
        if best.is_finite() {
            worst_rho = worst_rho.max(best);
        } else {
            missing += 1;
        }
    }
    o.check(
        missing == 0 && worst_rho < 1e-7,
        format!("IK after FK on {tried} joint sets recovers the reachable mode's joints: {missing} missing, max {worst_rho:.2e} mm"),
    );
}

fn criterion_8(p: &P, o: &mut Outcome) {
    let lim = ConstraintLimits::from_params(p);
    let cfg = SweepConfig::desk_budget();
    let t = Instant::now();
    let grid = full_workspace(p, &lim, 0.0, &cfg);
    let elapsed = t.elapsed();
    o.check(grid.evaluations() >= 100_000, format!("sweep evaluated {} samples", grid.evaluations()));
    o.timed(elapsed, Duration::from_secs(10), "1e5-evaluation sweep");

    let revalidated = grid.accepted().filter(|s| check_constraints(&s.pose, &s.rho, p, &lim) == ReasonCode::Ok).count();
    let accepted = grid.accepted().count();
    o.check(accepted > 0 && revalidated == accepted, format!("{revalidated}/{accepted} accepted cells re-validate against all checks"));

    let counts = grid.code_counts();
    let total: usize = counts.iter().sum();
    let cells = grid.dims.iter().product::<usize>();
    o.check(total == cells, format!("rejection codes sum to {total} of {cells} cells"));

    let alphas = alpha_grid(p, cfg.alpha_steps);
    let zs = z_grid(p, cfg.z_steps);
    let mut asymmetric = 0;
    for (i, &a) in alphas.iter().enumerate() {
        if alphas[alphas.len() - 1 - i] != -a {
            asymmetric += 1;
            continue;
        }
        for &z in &zs {
            let key = |v: Vec<(u64, u64)>| {
                let mut v = v;
                v.sort_unstable();
                v
            };
            let left = key(constant_orientation_slice(a, z, p, &lim, cfg.resolution).iter().map(|q| (q.pose.x.to_bits(), (-q.pose.y).to_bits())).collect());
            let right = key(constant_orientation_slice(-a, z, p, &lim, cfg.resolution).iter().map(|q| (q.pose.x.to_bits(), q.pose.y.to_bits())).collect());
            if left != right {
                asymmetric += 1;
            }
        }
    }
    o.check(asymmetric == 0, format!("+alpha / -alpha slices are exact mirror images ({} slice pairs)", alphas.len() * zs.len()));

    let m = manufacturing_workspace(p, &lim, 50.0, 0.0, 0.0, &cfg);
    o.check(m.ok_cells() > 0, format!("manufacturing workspace with delta = 50 mm has {} accepted cells", m.ok_cells()));
}

fn separated_roots(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| r.random_range(-10.0..10.0)).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if v.windows(2).all(|w| w[1] - w[0] >= 1e-3) {
            return v;
        }
    }
}

fn criterion_9(o: &mut Outcome) {
    let mut r = rng(9);
    let (mut exact, mut loose, mut lost, mut missed) = (0, 0, 0, 0);
    let (mut worst, mut worst_ratio) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let n = r.random_range(1..=8);
        let roots = separated_roots(&mut r, n);
        let poly = Poly::from_roots(&roots).unwrap();
        let found = real_roots(&poly, 1e-13).unwrap();
        missed += certify(&poly, &found).missed;
        if found.len() != n {
            lost += 1;
            continue;
        }
        let err = found.iter().zip(&roots).fold(0.0f64, |m, (f, t)| m.max((f.value - t).abs()));
        worst = worst.max(err);
        if err <= 1e-9 {
            exact += 1;
        } else {
            loose += 1;
        }
        // forward error bound from the conditioning of the stored coefficients
        for (f, &t) in found.iter().zip(&roots) {
            let d = poly.derivative().eval(t).abs();
            let bound = f64::EPSILON * poly.abs_bound(t.abs()) / d;
            worst_ratio = worst_ratio.max((f.value - t).abs() / bound.max(f64::MIN_POSITIVE));
        }
    }

    // Sturm certification also on polynomials with complex pairs
    for _ in 0..1000 {
        let n = r.random_range(0..=3);
        let roots = separated_roots(&mut r, n.max(1))[..n].to_vec();
        let mut c = Poly::from_roots(&roots).unwrap().coeffs().to_vec();
        for _ in 0..(8 - n) / 2 {
            let (re, im) = (r.random_range(-5.0..5.0), r.random_range(0.1..5.0));
            let q = [re * re + im * im, -2.0 * re, 1.0];
            let mut next = vec![0.0; c.len() + 2];
            for (i, a) in c.iter().enumerate() {
                for (j, b) in q.iter().enumerate() {
                    next[i + j] += a * b;
                }
            }
            c = next;
        }
        let poly = Poly::new(c).unwrap();
        let found = real_roots(&poly, 1e-13).unwrap();
        missed += certify(&poly, &found).missed;
        if found.len() != n {
            lost += 1;
        }
    }
    o.check(lost == 0, format!("every trial returns the right number of real roots ({lost} off)"));
    o.check(missed == 0, format!("Sturm certification: {missed} missed real roots over 2000 polynomials"));
    o.check(worst_ratio < 100.0, format!("root errors stay within {worst_ratio:.1}x the coefficient-conditioning bound"));
    o.known_failure(
        loose == 0,
        format!("all roots to 1e-9: {exact}/1000 trials pass, {loose} exceed it (worst {worst:.2e}); clustered roots near |x| = 10 are more sensitive than 1e-9 in double precision"),
    );
}

fn main() -> ExitCode {
    let p = reference_params::<f64>();
    let criteria: [(&str, Box<dyn Fn(&mut Outcome)>); 9] = [
        ("constraint-equation fidelity", Box::new(|o| criterion_1(&p, o))),
        ("table identities and rotation structure", Box::new(|o| criterion_2(&p, o))),
        ("coupling ellipse", Box::new(|o| criterion_3(&p, o))),
        ("inverse kinematics counts and oracle", Box::new(|o| criterion_4(&p, o))),
        ("feasibility filter", Box::new(|o| criterion_5(&p, o))),
        ("forward kinematics", Box::new(|o| criterion_6(&p, o))),
        ("round trips", Box::new(|o| criterion_7(&p, o))),
        ("workspace", Box::new(|o| criterion_8(&p, o))),
        ("polynomial kernel", Box::new(criterion_9)),
    ];
    let mut unexpected = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let mut o = Outcome::default();
        let t = Instant::now();
        run(&mut o);
        let status = if !o.failures.is_empty() {
            unexpected += 1;
            "FAIL"
        } else if !o.known.is_empty() {
            "FAIL (known)"
        } else {
            "PASS"
        };
        println!("criterion {}: {status} - {name} [{:.2?}]", i + 1, t.elapsed());
        for n in &o.notes {
            println!("    {n}");
        }
        for k in &o.known {
            println!("    known {k}");
        }
        for f in &o.failures {
            println!("    FAIL {f}");
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
