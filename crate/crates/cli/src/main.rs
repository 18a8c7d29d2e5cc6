use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use verne_core::coupling::{ellipse_point, iso_orientation_ellipse};
use verne_core::fk::{fk_machine, fk_parallel, FkSolution, RootSource};
use verne_core::ik::{feasibility_reports, filter_feasible, ik_machine, ik_parallel, IkCandidate, IkError};
use verne_core::oracle::{oracle_fk, oracle_ik, DEFAULT_GRID};
use verne_core::params::{load_params, reference_params, JointCoords};
use verne_core::report::fmt12;
use verne_core::scalar::angle_diff;
use verne_core::transforms::{TableOrientation, ToolPose};
use verne_core::workspace::{full_workspace, manufacturing_workspace, ConstraintLimits, SweepConfig};
use verne_core::{JointCoords64, MachineParams64};

/// Kinematics of the VERNE hybrid five-axis machine.
#[derive(Debug, Parser)]
#[command(name = "verne", version, about)]
struct Cli {
    /// Parameter file (`key = value unit` lines). Defaults to the built-in reference machine.
    #[arg(long, global = true, env = "VERNE_PARAMS")]
    params: Option<PathBuf>,

    /// Largest dimensionless residual a reported solution may carry.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Output file (directory for `workspace`). Standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for randomized runs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load and validate the parameter set, then print it.
    Validate,
    /// Inverse kinematics: every candidate, its feasibility flags and the unique survivor.
    Ik {
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long, allow_hyphen_values = true)]
        z: f64,
        /// Tool tilt relative to the part (needs --tool-frame).
        #[arg(long, allow_hyphen_values = true, requires = "tool_frame")]
        phi1: Option<f64>,
        /// Tool rotation about the table normal (needs --tool-frame).
        #[arg(long, allow_hyphen_values = true, requires = "tool_frame")]
        phi2: Option<f64>,
        /// Interpret x, y, z as the tool centre point in the table frame.
        #[arg(long)]
        tool_frame: bool,
    },
    /// Forward kinematics: every assembly mode for the given slider positions.
    Fk {
        #[arg(long, allow_hyphen_values = true)]
        rho1: f64,
        #[arg(long, allow_hyphen_values = true)]
        rho2: f64,
        #[arg(long, allow_hyphen_values = true)]
        rho3: f64,
        /// Table tilt; with --theta2 adds the tool pose in the table frame.
        #[arg(long, allow_hyphen_values = true, requires = "theta2")]
        theta1: Option<f64>,
        #[arg(long, allow_hyphen_values = true, requires = "theta1")]
        theta2: Option<f64>,
    },
    /// Iso-orientation ellipse of the platform position for a fixed roll.
    Ellipse {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// Also print this many points sampled uniformly in the ellipse parameter.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Workspace by discretization; writes accepted.csv, slices/ and summary.txt into --out.
    Workspace {
        /// Tool length along the platform normal (mm).
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = FrameArg::Base)]
        frame: FrameArg,
        /// Tool orientation relative to the part (table frame only).
        #[arg(long, allow_hyphen_values = true)]
        phi1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        phi2: Option<f64>,
        /// Use the 1e5-evaluation desk budget instead of the default discretization.
        #[arg(long)]
        desk: bool,
        #[arg(long)]
        alpha_steps: Option<usize>,
        #[arg(long)]
        z_steps: Option<usize>,
        /// Ellipse samples per slice.
        #[arg(long)]
        resolution: Option<usize>,
        /// Voxel edge length (mm).
        #[arg(long)]
        cell_size: Option<f64>,
    },
    /// Brute-force reference solvers.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    /// Dense-scan forward kinematics, or a randomized comparison with --random.
    Fk {
        #[arg(long, allow_hyphen_values = true, required_unless_present = "random")]
        rho1: Option<f64>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "random")]
        rho2: Option<f64>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "random")]
        rho3: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Compare with the analytic solver on this many random in-stroke joint sets.
        #[arg(long, conflicts_with_all = ["rho1", "rho2", "rho3"])]
        random: Option<usize>,
    },
    /// Dense-scan inverse kinematics, or a randomized comparison with --random.
    Ik {
        #[arg(long, allow_hyphen_values = true, required_unless_present = "random")]
        x: Option<f64>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "random")]
        y: Option<f64>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "random")]
        z: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Compare with the analytic solver on this many random platform positions.
        #[arg(long, conflicts_with_all = ["x", "y", "z"])]
        random: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FrameArg {
    Base,
    Table,
}

/// Failure reported on standard error; the message starts with the error name.
struct Failure {
    message: String,
    /// Output produced before the failure, still worth emitting.
    partial: Option<String>,
}

impl Failure {
    fn new(e: impl ToString) -> Self {
        Failure { message: e.to_string(), partial: None }
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    if let Some(msg) = usage_problem(&cli) {
        Cli::command().error(clap::error::ErrorKind::ArgumentConflict, msg).exit();
    }
    let result = load(&cli).and_then(|p| run(&cli, &p));
    let (text, failure) = match result {
        Ok(text) => (Some(text), None),
        Err(f) => (f.partial.clone(), Some(f)),
    };
    if let Some(text) = text {
        if let Err(e) = emit(&cli, &text) {
            eprintln!("IoError: {e}");
            return ExitCode::from(1);
        }
    }
    match failure {
        None => ExitCode::SUCCESS,
        Some(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(1)
        }
    }
}

fn usage_problem(cli: &Cli) -> Option<&'static str> {
    match &cli.command {
        Command::Workspace { frame, phi1, phi2, .. } => {
            if cli.out.is_none() {
                Some("workspace needs --out <directory>")
            } else if *frame == FrameArg::Base && (phi1.is_some() || phi2.is_some()) {
                Some("--phi1/--phi2 apply to --frame table only")
            } else {
                None
            }
        }
        _ if !(cli.tol > 0.0) => Some("--tol must be positive"),
        _ => None,
    }
}

fn load(cli: &Cli) -> Result<MachineParams64, Failure> {
    match &cli.params {
        None => Ok(reference_params()),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::new(format!("IoError: {}: {e}", path.display())))?;
            load_params(&text).map_err(Failure::new)
        }
    }
}

fn emit(cli: &Cli, text: &str) -> io::Result<()> {
    match (&cli.out, &cli.command) {
        (_, Command::Workspace { .. }) | (None, _) => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()
        }
        (Some(path), _) => fs::write(path, text),
    }
}

fn run(cli: &Cli, p: &MachineParams64) -> Outcome {
    match &cli.command {
        Command::Validate => Ok(p.to_file_string()),
        Command::Ik { x, y, z, phi1, phi2, tool_frame } => {
            let cands = if *tool_frame {
                ik_machine(&ToolPose::new(*x, *y, *z, phi1.unwrap_or(0.0), phi2.unwrap_or(0.0)), p)
            } else {
                ik_parallel(*x, *y, *z, p)
            };
            ik_report(cands.map_err(Failure::new)?, p, cli.tol)
        }
        Command::Fk { rho1, rho2, rho3, theta1, theta2 } => {
            let rho = JointCoords::new(*rho1, *rho2, *rho3);
            let orient = theta1.zip(*theta2).map(|(a, b)| TableOrientation::new(a, b));
            fk_report(&rho, orient, p, cli.tol)
        }
        Command::Ellipse { alpha, samples } => ellipse_report(*alpha, *samples, p),
        Command::Workspace { delta, frame, phi1, phi2, desk, alpha_steps, z_steps, resolution, cell_size } => {
            let mut cfg = if *desk { SweepConfig::desk_budget() } else { SweepConfig::default() };
            cfg.alpha_steps = alpha_steps.unwrap_or(cfg.alpha_steps);
            cfg.z_steps = z_steps.unwrap_or(cfg.z_steps);
            cfg.resolution = resolution.unwrap_or(cfg.resolution);
            cfg.cell_size = cell_size.unwrap_or(cfg.cell_size);
            let out = cli.out.as_deref().expect("checked before running");
            workspace_run(p, *delta, *frame, (phi1.unwrap_or(0.0), phi2.unwrap_or(0.0)), &cfg, out)
        }
        Command::Oracle { which } => match which {
            OracleCommand::Fk { random: Some(n), grid, .. } => oracle_fk_random(p, *n, *grid, cli.seed),
            OracleCommand::Fk { rho1, rho2, rho3, grid, .. } => {
                let rho = JointCoords::new(rho1.unwrap(), rho2.unwrap(), rho3.unwrap());
                Ok(oracle_fk_report(&rho, p, *grid))
            }
            OracleCommand::Ik { random: Some(n), grid, .. } => oracle_ik_random(p, *n, *grid, cli.seed),
            OracleCommand::Ik { x, y, z, grid, .. } => Ok(oracle_ik_report(x.unwrap(), y.unwrap(), z.unwrap(), p, *grid)),
        },
    }
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt12).unwrap_or_default()
}

fn ik_report(cands: Vec<IkCandidate<f64>>, p: &MachineParams64, tol: f64) -> Outcome {
    let total = cands.len();
    let cands: Vec<_> = cands.into_iter().filter(|c| c.max_residual() <= tol).collect();
    if cands.len() < total {
        eprintln!("dropped {} candidate(s) with residual above {}", total - cands.len(), fmt12(tol));
    }
    let reports = feasibility_reports(&cands, p);
    let mut out = String::from(
        "row,index,angle,alpha,theta1,theta2,rho1,rho2,rho3,branch1,branch2,branch3,res1,res2,res3,res4,\
         slider_above,rod_crossing,stroke,serial_singularity,orientation_in_range,feasible\n",
    );
    let row = |out: &mut String, kind: &str, i: usize, c: &IkCandidate<f64>| {
        let r = &reports[i];
        let _ = writeln!(
            out,
            "{kind},{i},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt12(c.angle()),
            fmt12(c.alpha),
            opt(c.theta1),
            opt(c.theta2),
            fmt12(c.rho.rho1),
            fmt12(c.rho.rho2),
            fmt12(c.rho.rho3),
            c.branch_tags[0].as_str(),
            c.branch_tags[1].as_str(),
            c.branch_tags[2].as_str(),
            fmt12(c.residuals[0]),
            fmt12(c.residuals[1]),
            fmt12(c.residuals[2]),
            fmt12(c.residuals[3]),
            flag(r.slider_above.iter().all(|&b| b)),
            flag(r.rod_crossing),
            flag(r.stroke.iter().all(|&b| b)),
            flag(r.serial_singularity.iter().all(|&b| b)),
            flag(r.orientation_in_range),
            flag(r.feasible()),
        );
    };
    for (i, c) in cands.iter().enumerate() {
        row(&mut out, "candidate", i, c);
    }
    eprintln!("{} candidate(s)", cands.len());
    match filter_feasible(&cands, p) {
        Ok((best, _)) => {
            let i = cands.iter().position(|c| *c == best).expect("survivor is a candidate");
            row(&mut out, "survivor", i, &best);
            Ok(out)
        }
        Err(e @ (IkError::NoFeasibleSolution | IkError::MultipleFeasible(_))) => {
            Err(Failure { message: e.to_string(), partial: Some(out) })
        }
        Err(e) => Err(Failure::new(e)),
    }
}

fn source_name(s: RootSource) -> &'static str {
    match s {
        RootSource::Octic => "octic",
        RootSource::HalfTurn => "half_turn",
        RootSource::SingularBand => "singular_band",
    }
}

fn fk_row(out: &mut String, i: usize, s: &FkSolution<f64>) {
    let m = &s.assembly_mode;
    let _ = write!(
        out,
        "{i},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        fmt12(s.pose.alpha),
        fmt12(s.pose.x),
        fmt12(s.pose.y),
        fmt12(s.pose.z),
        m.legs[0].as_str(),
        m.legs[1].as_str(),
        m.legs[2].as_str(),
        flag(m.machine_reachable),
        source_name(s.source),
        fmt12(s.singular_flags.leg_one_margin),
        fmt12(s.singular_flags.elimination_margin),
        fmt12(s.residuals[0]),
        fmt12(s.residuals[1]),
        fmt12(s.residuals[2]),
        fmt12(s.residuals[3]),
    );
}

const FK_HEADER: &str = "index,alpha,x,y,z,leg1,leg2,leg3,machine_reachable,source,leg_one_margin,elimination_margin,res1,res2,res3,res4";

fn fk_report(rho: &JointCoords64, orient: Option<TableOrientation<f64>>, p: &MachineParams64, tol: f64) -> Outcome {
    let mut out = String::from(FK_HEADER);
    let count = match orient {
        None => {
            out.push('\n');
            let sols: Vec<_> = fk_parallel(rho, p).map_err(Failure::new)?.into_iter().filter(|s| s.max_residual() <= tol).collect();
            for (i, s) in sols.iter().enumerate() {
                fk_row(&mut out, i, s);
                out.push('\n');
            }
            sols.len()
        }
        Some(orient) => {
            out.push_str(",theta1,theta2,tool_x,tool_y,tool_z,phi1,phi2\n");
            let sols: Vec<_> = fk_machine(rho, &orient, p)
                .map_err(Failure::new)?
                .into_iter()
                .filter(|s| s.platform.max_residual() <= tol)
                .collect();
            for (i, s) in sols.iter().enumerate() {
                fk_row(&mut out, i, &s.platform);
                let t = &s.tool;
                let _ = writeln!(
                    out,
                    ",{},{},{},{},{},{},{}",
                    fmt12(orient.theta1),
                    fmt12(orient.theta2),
                    fmt12(t.x),
                    fmt12(t.y),
                    fmt12(t.z),
                    fmt12(t.phi1),
                    fmt12(t.phi2)
                );
            }
            sols.len()
        }
    };
    eprintln!("{count} assembly mode(s)");
    if count == 0 {
        return Err(Failure { message: "NoAssembly: no configuration within the residual tolerance".into(), partial: Some(out) });
    }
    Ok(out)
}

fn ellipse_report(alpha: f64, samples: usize, p: &MachineParams64) -> Outcome {
    let e = iso_orientation_ellipse(alpha, p).map_err(Failure::new)?;
    let mut out = format!("center_x,a,b\n{},{},{}\n", fmt12(e.center_x), fmt12(e.a), fmt12(e.b));
    if samples > 0 {
        out.push_str("\nt,x,y\n");
        for j in 0..samples {
            let t = std::f64::consts::TAU * j as f64 / samples as f64;
            let (x, y) = ellipse_point(&e, t);
            let _ = writeln!(out, "{},{},{}", fmt12(t), fmt12(x), fmt12(y));
        }
    }
    Ok(out)
}

fn workspace_run(
    p: &MachineParams64,
    delta: f64,
    frame: FrameArg,
    (phi1, phi2): (f64, f64),
    cfg: &SweepConfig<f64>,
    dir: &Path,
) -> Outcome {
    let lim = ConstraintLimits::from_params(p);
    let grid = match frame {
        FrameArg::Base => full_workspace(p, &lim, delta, cfg),
        FrameArg::Table => manufacturing_workspace(p, &lim, delta, phi1, phi2, cfg),
    };
    let io_fail = |e: io::Error| Failure::new(format!("IoError: {e}"));
    fs::create_dir_all(dir.join("slices")).map_err(io_fail)?;

    let mut w = BufWriter::new(fs::File::create(dir.join("accepted.csv")).map_err(io_fail)?);
    grid.write_accepted_csv(&mut w).and_then(|_| w.flush()).map_err(io_fail)?;
    for iz in 0..grid.dims[2] {
        let mut w = BufWriter::new(fs::File::create(dir.join("slices").join(format!("slice_z{iz}.csv"))).map_err(io_fail)?);
        grid.write_slice_csv(&mut w, iz).and_then(|_| w.flush()).map_err(io_fail)?;
    }

    let mut summary = String::new();
    let _ = writeln!(summary, "delta = {}", fmt12(delta));
    if frame == FrameArg::Table {
        let _ = writeln!(summary, "phi1 = {}\nphi2 = {}", fmt12(phi1), fmt12(phi2));
    }
    let _ = writeln!(summary, "alpha_steps = {}\nz_steps = {}\nresolution = {}", cfg.alpha_steps, cfg.z_steps, cfg.resolution);
    let mut grid_summary = Vec::new();
    grid.write_summary(&mut grid_summary).map_err(io_fail)?;
    summary.push_str(&String::from_utf8_lossy(&grid_summary));
    fs::write(dir.join("summary.txt"), &summary).map_err(io_fail)?;
    Ok(summary)
}

fn oracle_fk_report(rho: &JointCoords64, p: &MachineParams64, grid: usize) -> String {
    let o = oracle_fk(rho, p, grid);
    let mut out = String::from("index,alpha,x,y,z\n");
    for (i, s) in o.solutions.iter().enumerate() {
        let _ = writeln!(out, "{i},{},{},{},{}", fmt12(s.alpha), fmt12(s.x), fmt12(s.y), fmt12(s.z));
    }
    eprintln!("{} solution(s), {} zero(s) inside guard bands", o.solutions.len(), o.guard_band_zeros.len());
    out
}

fn oracle_ik_report(x: f64, y: f64, z: f64, p: &MachineParams64, grid: usize) -> String {
    let o = oracle_ik(x, y, z, p, grid);
    let mut out = String::from("index,alpha,rho1,rho2,rho3,branch1,branch2,branch3\n");
    for (i, c) in o.candidates.iter().enumerate() {
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{},{},{}",
            fmt12(c.alpha),
            fmt12(c.rho.rho1),
            fmt12(c.rho.rho2),
            fmt12(c.rho.rho3),
            c.branch_tags[0].as_str(),
            c.branch_tags[1].as_str(),
            c.branch_tags[2].as_str()
        );
    }
    eprintln!("{} orientation(s), {} candidate(s)", o.alphas.len(), o.candidates.len());
    out
}

const AGREEMENT: f64 = 1e-6;

fn comparison_result(out: String, trials: usize, disagree: usize) -> Outcome {
    eprintln!("{} of {trials} trial(s) agree", trials - disagree);
    if disagree == 0 {
        Ok(out)
    } else {
        Err(Failure { message: format!("OracleMismatch: {disagree} of {trials} trial(s) disagree"), partial: Some(out) })
    }
}

fn oracle_fk_random(p: &MachineParams64, n: usize, grid: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from("trial,rho1,rho2,rho3,analytic,oracle,max_deviation,agree\n");
    let mut disagree = 0;
    for trial in 0..n {
        let rho = JointCoords::from_array([0, 1, 2].map(|i| rng.random_range(p.stroke_min[i]..=p.stroke_max[i])));
        let analytic = fk_parallel(&rho, p).unwrap_or_default();
        let o = oracle_fk(&rho, p, grid);
        let dev = if analytic.len() == o.solutions.len() {
            analytic.iter().zip(&o.solutions).fold(0.0f64, |m, (a, q)| {
                m.max(angle_diff(a.pose.alpha, q.alpha).abs())
                    .max((a.pose.x - q.x).abs())
                    .max((a.pose.y - q.y).abs())
                    .max((a.pose.z - q.z).abs())
            })
        } else {
            f64::INFINITY
        };
        let agree = dev <= AGREEMENT;
        disagree += usize::from(!agree);
        let _ = writeln!(
            out,
            "{trial},{},{},{},{},{},{},{}",
            fmt12(rho.rho1),
            fmt12(rho.rho2),
            fmt12(rho.rho3),
            analytic.len(),
            o.solutions.len(),
            fmt12(dev),
            flag(agree)
        );
    }
    comparison_result(out, n, disagree)
}

fn oracle_ik_random(p: &MachineParams64, n: usize, grid: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reach = p.rod_length[0];
    let cx = -p.leg1_dx();
    let (zlo, zhi) = (p.stroke_min.iter().cloned().fold(f64::INFINITY, f64::min), p.stroke_max.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + reach);
    let mut out = String::from("trial,x,y,z,analytic,oracle,max_deviation,agree\n");
    let mut disagree = 0;
    for trial in 0..n {
        let x = rng.random_range(cx - 0.75 * reach..cx + 0.75 * reach);
        let y = rng.random_range(-0.5 * reach..0.5 * reach);
        let z = rng.random_range(zlo..zhi);
        let analytic = ik_parallel(x, y, z, p).unwrap_or_default();
        let o = oracle_ik(x, y, z, p, grid);
        let dev = if analytic.len() == o.candidates.len() {
            analytic.iter().fold(0.0f64, |m, c| {
                let best = o
                    .candidates
                    .iter()
                    .filter(|q| q.branch_tags == c.branch_tags)
                    .map(|q| {
                        let d = q.rho.as_array().iter().zip(c.rho.as_array()).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
                        angle_diff(q.alpha, c.alpha).abs().max(d)
                    })
                    .fold(f64::INFINITY, f64::min);
                m.max(best)
            })
        } else {
            f64::INFINITY
        };
        let agree = dev <= AGREEMENT;
        disagree += usize::from(!agree);
        let _ = writeln!(out, "{trial},{},{},{},{},{},{},{}", fmt12(x), fmt12(y), fmt12(z), analytic.len(), o.candidates.len(), fmt12(dev), flag(agree));
    }
    comparison_result(out, n, disagree)
}
