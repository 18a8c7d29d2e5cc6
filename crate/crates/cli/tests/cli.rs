use std::fs;
use std::process::{Command, Output};

fn verne(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verne"))
        .args(args)
        .env_remove("VERNE_PARAMS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn inverse_at_reference_pose_lists_sixteen_candidates_and_a_survivor() {
    let o = verne(&["ik", "--x", "-240", "--y", "-86", "--z", "1000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("row,index,angle,"));
    assert_eq!(lines.iter().filter(|l| l.starts_with("candidate,")).count(), 16);
    let survivor: Vec<&str> = lines.iter().filter(|l| l.starts_with("survivor,")).copied().collect();
    assert_eq!(survivor.len(), 1);
    assert!(survivor[0].ends_with(",1,1,1,1,1,1"));
    let angle: f64 = survivor[0].split(',').nth(2).unwrap().parse().unwrap();
    assert!((angle - 0.046868371699).abs() < 1e-11);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["fk", "--rho1", "674", "--rho2", "685", "--rho3", "250"];
    let a = verne(&args);
    let b = verne(&args);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 5);
    assert!(stderr(&a).contains("4 assembly mode(s)"));
    let reachable: Vec<&str> = text.lines().skip(1).filter(|l| l.split(',').nth(8) == Some("1")).collect();
    assert_eq!(reachable.len(), 1);
    assert!(reachable[0].starts_with("0,-0.537950363508,"));
}

#[test]
fn forward_with_table_angles_adds_tool_columns() {
    let o = verne(&["fk", "--rho1", "674", "--rho2", "685", "--rho3", "250", "--theta1", "0.1", "--theta2", "-0.4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().ends_with(",theta1,theta2,tool_x,tool_y,tool_z,phi1,phi2"));
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 23);
        assert_eq!(cols[22], "0.4");
    }
}

#[test]
fn machine_inverse_in_tool_frame() {
    let o = verne(&["ik", "--x", "0", "--y", "0", "--z", "-200", "--phi1", "0.2", "--phi2", "0.5", "--tool-frame"]);
    let text = stdout(&o);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(5) == Some("-0.5")), "{text}");
}

#[test]
fn symmetric_leg_one_is_rejected_with_its_name() {
    let dir = tempfile::tempdir().unwrap();
    let good = verne(&["validate"]);
    assert_eq!(good.status.code(), Some(0));
    let bad = stdout(&good).replace("r1 = 120 mm", "r1 = 200 mm");
    let path = dir.path().join("bad.cfg");
    fs::write(&path, bad).unwrap();
    let o = verne(&["validate", "--params", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("InvalidValue: R1"), "{}", stderr(&o));
}

#[test]
fn params_come_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&verne(&["validate"])).replace("L1 = 800 mm", "L1 = 810 mm");
    let path = dir.path().join("machine.cfg");
    fs::write(&path, text).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_verne")).arg("validate").env("VERNE_PARAMS", &path).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("L1 = 810 mm"));
}

#[test]
fn usage_and_domain_errors_have_distinct_codes() {
    assert_eq!(verne(&["ik", "--x", "1"]).status.code(), Some(2));
    assert_eq!(verne(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(verne(&["workspace", "--delta", "0"]).status.code(), Some(2));

    let far = verne(&["ik", "--x", "5000", "--y", "0", "--z", "0"]);
    assert_eq!(far.status.code(), Some(1));
    assert!(stderr(&far).starts_with("Unreachable"));

    let none = verne(&["fk", "--rho1", "100", "--rho2", "5000", "--rho3", "-4000"]);
    assert_eq!(none.status.code(), Some(1));
    assert!(stderr(&none).starts_with("NoAssembly"));

    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&verne(&["validate"])).replace("L1 = 800 mm", "L1 = 150 mm");
    let path = dir.path().join("short.cfg");
    fs::write(&path, text).unwrap();
    let empty = verne(&["ellipse", "--alpha", "1.2", "--params", path.to_str().unwrap()]);
    assert_eq!(empty.status.code(), Some(1));
    assert!(stderr(&empty).starts_with("EmptyLocus"), "{}", stderr(&empty));
}

#[test]
fn ellipse_prints_axes_and_samples() {
    let o = verne(&["ellipse", "--alpha", "0.3", "--samples", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("center_x,a,b"));
    let axes: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(axes[0], 60.0);
    assert!(axes[1] > axes[2] && axes[2] > 0.0);
    assert_eq!(text.lines().filter(|l| !l.is_empty()).count(), 2 + 1 + 8);
}

#[test]
fn out_flag_writes_the_table_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("modes.csv");
    let o = verne(&["fk", "--rho1", "674", "--rho2", "685", "--rho3", "250", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 5);
}

#[test]
fn workspace_writes_points_slices_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ws");
    let o = verne(&["workspace", "--delta", "50", "--desk", "--frame", "table", "--phi1", "0.1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let accepted = fs::read_to_string(out.join("accepted.csv")).unwrap();
    assert!(accepted.starts_with("frame,x,y,z,alpha\n"));
    let points = accepted.lines().count() - 1;
    assert!(points > 0);
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("frame = table"));
    assert!(summary.contains(&format!("ok_cells = {points}")));
    let total: usize = summary.lines().find_map(|l| l.strip_prefix("total_cells = ")).unwrap().parse().unwrap();
    let coded: usize = summary
        .lines()
        .filter(|l| l.starts_with("cells."))
        .map(|l| l.split(" = ").nth(1).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(coded, total);
    let slice_points: usize = fs::read_dir(out.join("slices"))
        .unwrap()
        .map(|e| fs::read_to_string(e.unwrap().path()).unwrap().lines().count() - 1)
        .sum();
    assert_eq!(slice_points, points);
}

#[test]
fn seeded_oracle_comparisons_agree_and_repeat() {
    let a = verne(&["oracle", "fk", "--random", "5", "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let b = verne(&["oracle", "fk", "--random", "5", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().skip(1).all(|l| l.ends_with(",1")));

    let ik = verne(&["oracle", "ik", "--random", "5", "--seed", "3"]);
    assert_eq!(ik.status.code(), Some(0), "{}", stdout(&ik));

    let single = verne(&["oracle", "ik", "--x", "-240", "--y", "-86", "--z", "1000"]);
    assert_eq!(stdout(&single).lines().count(), 17);
    assert_eq!(verne(&["oracle", "fk", "--rho1", "1"]).status.code(), Some(2));
}
