//! Batch front-end: scenario loading, verification runs, Maxwell reports,
//! and frame tabulation from a magnetic field.
//!
//! Exit codes: 0 on success, 2 on schema/configuration errors (including
//! unknown cases and unparsable inputs), 3 on numerical failures (residual
//! above tolerance, rank failure, integration abort). Reports are JSON with
//! a fixed field order, so re-running a scenario reproduces byte-identical
//! summaries.

use crate::catalog::{catalog_maxwell_check, CatalogCase, S7Form};
use crate::coords::{CoordSystemId, Family, ShiftSign};
use crate::fields::{FCoefficients, GridSpec};
use crate::frame::{EulerFrame, FrameSpec};
use crate::linalg::{unhat, C64, Spinor2, Vec3};
use crate::separation::{
    euler_angles_from_rotation, fixed_potential_frame, pauli_residual, rank_check,
    solve_scenario, Corruption, Scenario, RESIDUAL_FD_STEP,
};
use crate::timefn::TimeFunction;
use crate::{Error, Result};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Verifier for separable Pauli-equation scenarios.
#[derive(Debug, Parser)]
#[command(name = "pauli-separator", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the eleven coordinate families with parameters and domains.
    ListSystems,
    /// Run the full separation pipeline on a JSON scenario and verify the
    /// PDE residual.
    Verify {
        /// Path to the scenario JSON file.
        scenario: PathBuf,
        /// Write grid samples of psi (both spinor components) as CSV.
        #[arg(long)]
        dump_psi: Option<PathBuf>,
        /// Write the JSON report here in addition to stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Maxwell residual report for a catalog case.
    Maxwell {
        /// Case id: non_stationary, s1, ..., s7.
        case: String,
        /// Magnetic field constant k (stationary cases).
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Geometric parameter / Coulomb charge a, where applicable.
        #[arg(long)]
        a: Option<f64>,
        /// Field slope A (non-stationary case).
        #[arg(long, default_value_t = 0.5)]
        slope: f64,
        /// Field offset B (non-stationary case).
        #[arg(long, default_value_t = 0.3)]
        offset: f64,
        /// Quadratic coefficient q (case s7).
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long, default_value_t = 0.3)]
        a1: f64,
        #[arg(long, default_value_t = 0.2)]
        a2: f64,
        #[arg(long, default_value_t = 0.1)]
        a3: f64,
        /// Evaluate case s7 exactly as printed (default).
        #[arg(long, conflicts_with = "amended")]
        verbatim: bool,
        /// Evaluate case s7 in the amended reading (non-canonical).
        #[arg(long)]
        amended: bool,
        /// Residual tolerance.
        #[arg(long, default_value_t = 1e-4)]
        tolerance: f64,
    },
    /// Tabulate the moving frame solving dO/dt = -[eH]_x O for a closed-form
    /// field, as CSV.
    FrameFromField {
        /// JSON array of three closed-form functions of t for eH, or
        /// @path to a file holding it.
        field: String,
        /// End of the integration interval [0, t1].
        t1: f64,
        /// Number of uniform steps.
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

// ---------------------------------------------------------------------------
// Scenario files.
// ---------------------------------------------------------------------------

/// Coordinate-system section of a scenario file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemRecord {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant2: Option<ShiftSign>,
}

impl SystemRecord {
    pub fn to_system(&self) -> Result<CoordSystemId> {
        CoordSystemId::new(self.family, self.a, self.modulus, self.variant2)
    }
}

/// Numerical knobs with the documented defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    /// RK4 step for the spin propagator.
    pub ode_step: f64,
    /// FD step h_x = h_t of the residual verifier.
    pub fd_step: f64,
    /// Pass threshold on the relative residual.
    pub tolerance: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics { ode_step: 1e-3, fd_step: RESIDUAL_FD_STEP, tolerance: 1e-4 }
    }
}

/// A scenario document. Unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub system: SystemRecord,
    pub frame: FrameSpec,
    /// Validity interval of the frame, [t0, t1].
    pub frame_interval: [f64; 2],
    /// Evaluation window for the residual, inside the frame interval.
    pub time_window: [f64; 2],
    pub coefficients: FCoefficients,
    pub lambda: [f64; 3],
    /// Constant spinor chi as [[re, im], [re, im]].
    pub chi: [[f64; 2]; 2],
    /// Omega-space evaluation grid.
    pub grid: GridSpec,
    #[serde(default)]
    pub numerics: Numerics,
    /// Deliberate defect for negative-control runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corruption: Option<Corruption>,
}

impl ScenarioFile {
    pub fn to_scenario(&self) -> Result<Scenario> {
        let sys = self.system.to_system()?;
        let frame = EulerFrame::new(
            sys,
            self.frame.clone(),
            self.frame_interval[0],
            self.frame_interval[1],
        )?;
        if self.time_window[0] >= self.time_window[1] {
            return Err(Error::Config("time_window must be increasing".into()));
        }
        Ok(Scenario {
            sys,
            frame,
            coeffs: self.coefficients.clone(),
            lambda: Vec3::new(self.lambda[0], self.lambda[1], self.lambda[2]),
            chi: Spinor2::new(
                C64::new(self.chi[0][0], self.chi[0][1]),
                C64::new(self.chi[1][0], self.chi[1][1]),
            ),
            grid: self.grid.clone(),
            time_window: (self.time_window[0], self.time_window[1]),
            ode_step: self.numerics.ode_step,
            corruption: self.corruption,
        })
    }
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    system: String,
    rank_ok: bool,
    max_rel: f64,
    mean_rel: f64,
    tolerance: f64,
    fd_step: f64,
    ode_step: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct MaxwellReport {
    case: CatalogCase,
    r_a0: f64,
    r_a: f64,
    r_gauge: f64,
    tolerance: f64,
    unverified: bool,
    passed: bool,
}

fn exit_for_error(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Schema(_) | Error::Io(_) => EXIT_SCHEMA,
        _ => EXIT_NUMERIC,
    }
}

fn fail(e: &Error) -> i32 {
    eprintln!("error: {e}");
    exit_for_error(e)
}

// ---------------------------------------------------------------------------
// Subcommand implementations.
// ---------------------------------------------------------------------------

fn cmd_list_systems() -> i32 {
    println!("The eleven orthogonal coordinate families:");
    for family in Family::all() {
        let sys = representative(family);
        let (lo, hi) = sys.sample_box();
        let mut params = Vec::new();
        if family.needs_a() {
            params.push("a > 0 (geometric scale)".to_string());
        }
        if family.needs_modulus() {
            params.push("modulus k in (0,1)".to_string());
        }
        if family == Family::ProlateSpheroidal {
            params.push("variant II: z3 offset by +-a".to_string());
        }
        let params = if params.is_empty() { "-".to_string() } else { params.join("; ") };
        println!(
            "{:>2}. {:<22} split: {:<15} params: {:<40} sample domain: \
             [{:.2},{:.2}]x[{:.2},{:.2}]x[{:.2},{:.2}]",
            family.index(),
            family.name(),
            format!("{:?}", family.split_class()),
            params,
            lo[0], hi[0], lo[1], hi[1], lo[2], hi[2],
        );
    }
    EXIT_OK
}

fn representative(family: Family) -> CoordSystemId {
    crate::coords::representative_systems()
        .into_iter()
        .find(|s| s.family() == family)
        .expect("every family has a representative")
}

fn cmd_verify(path: &PathBuf, dump_psi: Option<&PathBuf>, report_path: Option<&PathBuf>) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(&Error::Io(e)),
    };
    let file: ScenarioFile = match serde_json::from_str(&text) {
        Ok(f) => f,
        Err(e) => return fail(&Error::from(e)),
    };
    let s = match file.to_scenario() {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };

    // Structural precondition: the lambda-coupling matrix must have full
    // column rank over the window and grid.
    let mut samples = Vec::new();
    let points = match s.grid.points() {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    for i in 0..5 {
        let t = s.time_window.0
            + (s.time_window.1 - s.time_window.0) * (i as f64 + 0.5) / 5.0;
        for w in points.iter().step_by(7) {
            samples.push((t, *w));
        }
    }
    match rank_check(&s, &samples) {
        Ok(true) => {}
        Ok(false) => {
            eprintln!(
                "error: rank_check failed — the lambda-coupling matrix \
                 [T_b; S_ab] is rank-deficient; the separation constants are \
                 not independent"
            );
            return EXIT_NUMERIC;
        }
        Err(e) => return fail(&e),
    }

    let sol = match solve_scenario(&s) {
        Ok(sol) => sol,
        Err(e) => return fail(&e),
    };
    let (max_rel, mean_rel) = match pauli_residual(&s, &sol, file.numerics.fd_step, None) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let report = VerifyReport {
        system: s.sys.family().name().to_string(),
        rank_ok: true,
        max_rel,
        mean_rel,
        tolerance: file.numerics.tolerance,
        fd_step: file.numerics.fd_step,
        ode_step: file.numerics.ode_step,
        passed: max_rel < file.numerics.tolerance,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{json}");
    if let Some(p) = report_path {
        if let Err(e) = std::fs::write(p, format!("{json}\n")) {
            return fail(&Error::Io(e));
        }
    }
    if let Some(p) = dump_psi {
        if let Err(e) = write_psi_dump(&s, &sol, p) {
            return fail(&e);
        }
    }
    if report.passed {
        EXIT_OK
    } else {
        eprintln!(
            "error: residual {max_rel:.6e} exceeds tolerance {:.1e}",
            file.numerics.tolerance
        );
        EXIT_NUMERIC
    }
}

/// CSV columns: omega1..3, x1..3, re/im of both spinor components, at the
/// time-window midpoint.
fn write_psi_dump(
    s: &Scenario,
    sol: &crate::separation::SeparatedSolution,
    path: &PathBuf,
) -> Result<()> {
    let t = 0.5 * (s.time_window.0 + s.time_window.1);
    let mut out = String::from("omega1,omega2,omega3,x1,x2,x3,re0,im0,re1,im1\n");
    for w in s.grid.points()? {
        let x = s.frame.x_of_omega(t, w)?;
        let psi = crate::separation::assemble_solution(s, sol, t, x)?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            w.x, w.y, w.z, x.x, x.y, x.z, psi[0].re, psi[0].im, psi[1].re, psi[1].im
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn build_case(
    id: &str,
    k: f64,
    a: Option<f64>,
    slope: f64,
    offset: f64,
    q: f64,
    a1: f64,
    a2: f64,
    a3: f64,
    amended: bool,
) -> Result<CatalogCase> {
    let case = match id {
        "non_stationary" => CatalogCase::NonStationary { a: slope, b: offset, k, a1, a2, a3 },
        "s1" => CatalogCase::S1 { k, a1, a2, a3 },
        "s2" => CatalogCase::S2 { k, a: a.unwrap_or(1.0) },
        "s3" => CatalogCase::S3 { k, a1, a2, a3 },
        "s4" => CatalogCase::S4 { k, a: a.unwrap_or(0.8), a1, a2, a3 },
        "s5" => CatalogCase::S5 { k, a: a.unwrap_or(0.8), a1, a2, a3 },
        "s6" => CatalogCase::S6 { k, a1, a2, a3 },
        "s7" => CatalogCase::S7 {
            k,
            q,
            a: a.unwrap_or(0.6),
            a3,
            form: if amended { S7Form::Amended } else { S7Form::Verbatim },
        },
        other => {
            return Err(Error::Config(format!(
                "unknown catalog case '{other}' (expected non_stationary or s1..s7)"
            )))
        }
    };
    case.validate()?;
    Ok(case)
}

fn cmd_maxwell(case: CatalogCase, tolerance: f64) -> i32 {
    let grid = case.default_grid();
    let unverified = matches!(case, CatalogCase::S7 { .. });
    let (r_a0, r_a, r_gauge) = match catalog_maxwell_check(&case, &grid, 0.3) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let passed = r_a0 < tolerance && r_a < tolerance && r_gauge < tolerance;
    let report = MaxwellReport { case, r_a0, r_a, r_gauge, tolerance, unverified, passed };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    // S7 is reported but never gated: its printed form is an open question.
    if unverified || passed {
        EXIT_OK
    } else {
        eprintln!("error: Maxwell residual exceeds tolerance {tolerance:.1e}");
        EXIT_NUMERIC
    }
}

fn cmd_frame_from_field(field: &str, t1: f64, steps: usize, out: Option<&PathBuf>) -> i32 {
    let text = if let Some(path) = field.strip_prefix('@') {
        match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail(&Error::Io(e)),
        }
    } else {
        field.to_string()
    };
    let components: [TimeFunction; 3] = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => return fail(&Error::from(e)),
    };
    let eh = move |t: f64| {
        Vec3::new(components[0].eval(t), components[1].eval(t), components[2].eval(t))
    };
    let tab = match fixed_potential_frame(&eh, 0.0, t1, steps) {
        Ok(tab) => tab,
        Err(e) => return fail(&e),
    };
    // Cross-check: the reconstructed angular velocity must equal -eH.
    let h = tab.t[1] - tab.t[0];
    let mut csv = String::from(
        "t,o11,o12,o13,o21,o22,o23,o31,o32,o33,alpha,beta,gamma,\
         eh1,eh2,eh3,omega1,omega2,omega3\n",
    );
    for i in 0..tab.t.len() {
        let t = tab.t[i];
        let o = &tab.o[i];
        let (alpha, beta, gamma) = euler_angles_from_rotation(o);
        let field = eh(t);
        let omega = if i > 0 && i + 1 < tab.t.len() {
            let rate = (tab.o[i + 1] - tab.o[i - 1]) / (2.0 * h) * o.transpose();
            let w = unhat(&((rate - rate.transpose()) * 0.5));
            if (w + field).norm() > 1e-5 * (1.0 + field.norm()) {
                eprintln!(
                    "error: angular velocity at t = {t} deviates from -eH by {:.3e}",
                    (w + field).norm()
                );
                return EXIT_NUMERIC;
            }
            w
        } else {
            -field
        };
        csv.push_str(&format!(
            "{t},{},{},{},{},{},{},{},{},{},{alpha},{beta},{gamma},{},{},{},{},{},{}\n",
            o[(0, 0)], o[(0, 1)], o[(0, 2)],
            o[(1, 0)], o[(1, 1)], o[(1, 2)],
            o[(2, 0)], o[(2, 1)], o[(2, 2)],
            field.x, field.y, field.z,
            omega.x, omega.y, omega.z,
        ));
    }
    match out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, csv) {
                return fail(&Error::Io(e));
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(csv.as_bytes()).is_err() {
                return EXIT_NUMERIC;
            }
        }
    }
    EXIT_OK
}

/// Parses argv and runs the selected subcommand, returning the process exit
/// code. Clap itself exits with code 2 on usage errors, matching the schema
/// error convention.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match cli.command {
        Command::ListSystems => cmd_list_systems(),
        Command::Verify { scenario, dump_psi, report } => {
            cmd_verify(&scenario, dump_psi.as_ref(), report.as_ref())
        }
        Command::Maxwell {
            case, k, a, slope, offset, q, a1, a2, a3, verbatim, amended, tolerance,
        } => {
            let _ = verbatim; // verbatim is the default; flag exists for clarity
            match build_case(&case, k, a, slope, offset, q, a1, a2, a3, amended) {
                Ok(c) => cmd_maxwell(c, tolerance),
                Err(e) => fail(&e),
            }
        }
        Command::FrameFromField { field, t1, steps, out } => {
            cmd_frame_from_field(&field, t1, steps, out.as_ref())
        }
    }
}
