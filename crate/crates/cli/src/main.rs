//! `gmas-stab`: stability analysis of generalized mass-action systems.
//!
//! Exit codes: 0 analysis completed (whatever the verdicts), 1 internal error,
//! 2 input error, 3 resource cap exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gmas_core::analysis::{analyze_weakly_reversible, full_report, render_text, uniqueness_check};
use gmas_core::catalog;
use gmas_core::dynamics::{construct_rates, integrate, Halt, IntegrateOptions};
use gmas_core::linalg::{is_p0plus_matrix, is_p_matrix, Subspace, MAX_MINOR_DIM};
use gmas_core::network::{
    enumerate_cycles, parse_network_file, stoichiometric_subspace, to_text, weakly_reversible, GmasNetwork,
    RateAssignment,
};
use gmas_core::stability::{notion_lattice_check_with, StabilityOptions, StabilityVerdict, Status};
use nalgebra::{DMatrix, DVector};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "gmas-stab", version, about = "Stability of complex-balanced equilibria in generalized mass-action systems")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Seed for all sampling.
    #[arg(long, default_value_t = StabilityOptions::default().seed, global = true)]
    seed: u64,
    /// Random D samples drawn by the falsifier.
    #[arg(long, default_value_t = StabilityOptions::default().samples, global = true)]
    samples: usize,
    /// Starting points of the diagonal Lyapunov search.
    #[arg(long, default_value_t = StabilityOptions::default().diag_starts, global = true)]
    diag_starts: usize,
    /// Iterations per start of the diagonal Lyapunov search.
    #[arg(long, default_value_t = StabilityOptions::default().diag_iters, global = true)]
    diag_iters: usize,
    /// Sampled D for diagonal D-stability on a proper subspace.
    #[arg(long, default_value_t = StabilityOptions::default().diag_sweep_samples, global = true)]
    sweep_samples: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full report for a network file.
    Analyze { path: PathBuf },
    /// The eight stability notions for a matrix given as CSV rows.
    Stability {
        path: PathBuf,
        /// CSV file with one basis vector of S per row.
        #[arg(long)]
        subspace: Option<PathBuf>,
    },
    /// Integrate the mass-action ODE and write the trajectory as CSV.
    Simulate {
        path: PathBuf,
        /// Rate constants in edge order (overrides the file).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        rates: Option<Vec<f64>>,
        /// Initial state.
        #[arg(long, value_delimiter = ',', conflicts_with = "perturb_equilibrium")]
        x0: Option<Vec<f64>>,
        /// `x1,...,xn,magnitude`: start at x* moved by magnitude·|x*| within S.
        /// Without rates, rates making x* complex balanced are constructed.
        #[arg(long, value_delimiter = ',')]
        perturb_equilibrium: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = IntegrateOptions::default().rtol)]
        rtol: f64,
        #[arg(long, default_value_t = IntegrateOptions::default().atol)]
        atol: f64,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simple cycles and the per-cycle D-semistability conditions.
    Cycles { path: PathBuf },
    /// Uniqueness of complex-balanced equilibria.
    Uniqueness { path: PathBuf },
    /// Write bundled example networks.
    Examples {
        #[arg(value_enum)]
        name: ExampleName,
        /// Target directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExampleName {
    Planar3cycle,
    Ivanova3cycle,
    Fourcycle,
    Revchain,
    Ssystem,
    XyUnique,
    All,
}

/// An error with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<gmas_core::Error> for Failure {
    fn from(e: gmas_core::Error) -> Self {
        let code = if e.is_input() {
            2
        } else if e.is_resource() {
            3
        } else if matches!(e, gmas_core::Error::Precondition(_)) {
            2
        } else {
            1
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn options(cli: &Cli) -> StabilityOptions {
    StabilityOptions {
        samples: cli.samples.max(1),
        seed: cli.seed,
        diag_starts: cli.diag_starts,
        diag_iters: cli.diag_iters,
        diag_sweep_samples: cli.sweep_samples,
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> CliResult<(GmasNetwork, Option<RateAssignment>)> {
    let file = parse_network_file(&read(path)?).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })?;
    let rates = file.rates();
    Ok((file.network, rates))
}

fn to_json<T: serde::Serialize>(v: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn run(cli: &Cli) -> CliResult<String> {
    let opts = options(cli);
    match &cli.command {
        Command::Analyze { path } => {
            let (net, _) = load(path)?;
            let report = full_report(&net, &opts)?;
            match cli.format {
                Format::Json => to_json(&report),
                Format::Text => Ok(render_text(&report)),
            }
        }
        Command::Stability { path, subspace } => cmd_stability(cli.format, path, subspace.as_deref(), &opts),
        Command::Simulate { path, rates, x0, perturb_equilibrium, t_end, rtol, atol, out } => {
            let integ = IntegrateOptions { rtol: *rtol, atol: *atol, ..IntegrateOptions::default() };
            cmd_simulate(path, rates.as_deref(), x0.as_deref(), perturb_equilibrium.as_deref(), *t_end, &integ, out.as_deref())
        }
        Command::Cycles { path } => {
            let (net, _) = load(path)?;
            cmd_cycles(cli.format, &net, &opts)
        }
        Command::Uniqueness { path } => {
            let (net, _) = load(path)?;
            let r = uniqueness_check(&net)?;
            match cli.format {
                Format::Json => to_json(&r),
                Format::Text => {
                    let mut s = format!("uniqueness: {}\n", if r.unique { "unique" } else { "not unique" });
                    if let Some(w) = &r.witness {
                        let _ = writeln!(s, "sign vector: {}", w.sign);
                        let _ = writeln!(s, "u = {:?}\nv = {:?}\nx* = {:?}\nk = {:?}", w.u, w.v, w.x_star, w.k);
                        let _ = writeln!(s, "|Jv| = {:.3e} (|J| = {:.3e}, |v| = {:.3e})", w.jv_norm, w.j_norm, w.v_norm);
                    }
                    Ok(s)
                }
            }
        }
        Command::Examples { name, out } => cmd_examples(*name, out),
    }
}

fn parse_csv_matrix(text: &str, what: &str) -> CliResult<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::input(format!("{what}, line {}: {e}", i + 1)))?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Failure::input(format!("{what}: no rows")));
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(Failure::input(format!("{what}: rows have different lengths")));
    }
    Ok(rows)
}

fn verdict_summary(v: &StabilityVerdict) -> String {
    let status = match v.status {
        Status::Holds => "holds",
        Status::Fails => "fails",
        Status::Inconclusive => "inconclusive",
    };
    let mut s = format!("{:<18} {:<13} {:<18} {}", v.notion.name(), status, v.method.name(), if v.certified { "certified" } else { "sampled" });
    if let Some(d) = v.counterexample() {
        let _ = write!(s, "  D = {d:?}");
    }
    if let Some(p) = v.diagonal_p() {
        let _ = write!(s, "  P = {p:?}");
    }
    s
}

fn cmd_stability(format: Format, path: &Path, subspace: Option<&Path>, opts: &StabilityOptions) -> CliResult<String> {
    let rows = parse_csv_matrix(&read(path)?, &path.display().to_string())?;
    let n = rows.len();
    if rows[0].len() != n {
        return Err(Failure::input(format!("matrix is {}x{}, not square", n, rows[0].len())));
    }
    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let s = match subspace {
        Some(p) => {
            let basis = parse_csv_matrix(&read(p)?, &p.display().to_string())?;
            if basis[0].len() != n {
                return Err(Failure::input(format!("subspace vectors have length {}, expected {n}", basis[0].len())));
            }
            let vectors: Vec<DVector<f64>> = basis.iter().map(|r| DVector::from_column_slice(r)).collect();
            Some(Subspace::from_vectors(n, &vectors)?)
        }
        None => None,
    };
    let verdicts = notion_lattice_check_with(&a, s.as_ref(), opts)?;
    let (p0plus, p) = if n <= MAX_MINOR_DIM { (Some(is_p0plus_matrix(&a)?), Some(is_p_matrix(&a)?)) } else { (None, None) };
    match format {
        Format::Json => to_json(&json!({ "verdicts": verdicts, "p0plus": p0plus, "p_matrix": p })),
        Format::Text => {
            let mut out = String::new();
            if let Some(s) = &s {
                let _ = writeln!(out, "on a subspace of dimension {}", s.dim());
            }
            for v in &verdicts {
                let _ = writeln!(out, "{}", verdict_summary(v));
            }
            let yn = |b: Option<bool>| b.map_or("n/a", |b| if b { "holds" } else { "fails" });
            let _ = writeln!(out, "{:<18} {}", "P0+", yn(p0plus));
            let _ = writeln!(out, "{:<18} {}", "P", yn(p));
            Ok(out)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    path: &Path,
    rates: Option<&[f64]>,
    x0: Option<&[f64]>,
    perturb: Option<&[f64]>,
    t_end: f64,
    integ: &IntegrateOptions,
    out: Option<&Path>,
) -> CliResult<String> {
    let (net, file_rates) = load(path)?;
    let n = net.n_species();
    let mut k = match rates {
        Some(r) => Some(RateAssignment::new(r.to_vec())?),
        None => file_rates,
    };
    let (start, reference) = match (x0, perturb) {
        (Some(x0), _) => (x0.to_vec(), x0.to_vec()),
        (None, Some(p)) => {
            if p.len() != n + 1 {
                return Err(Failure::input(format!("--perturb-equilibrium needs {n} coordinates and a magnitude")));
            }
            let (x_star, mag) = (p[..n].to_vec(), p[n]);
            if k.is_none() {
                k = Some(construct_rates(&net, &x_star)?.k);
            }
            let s = stoichiometric_subspace(&net);
            let dir = s.basis() * DVector::from_element(s.dim(), 1.0);
            let norm = DVector::from_column_slice(&x_star).norm();
            let start = if dir.norm() > 0.0 {
                let step = &dir * (mag * norm / dir.norm());
                x_star.iter().zip(step.iter()).map(|(x, d)| x + d).collect()
            } else {
                x_star.clone()
            };
            (start, x_star)
        }
        (None, None) => return Err(Failure::input("give --x0 or --perturb-equilibrium")),
    };
    let k = k.ok_or_else(|| Failure::input("no rate constants: give --rates or k = ... in the file"))?;
    let traj = match integrate(&net, &k, &start, t_end, integ) {
        Ok(t) => t,
        Err(gmas_core::Error::StepSizeUnderflow { t, partial }) => {
            eprintln!("warning: step size underflow at t = {t}; trajectory truncated");
            *partial
        }
        Err(e) => return Err(e.into()),
    };
    let dist = |x: &[f64]| x.iter().zip(&reference).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let final_dist = traj.final_state().map_or(0.0, dist);
    let max_dist = traj.x.iter().map(|x| dist(x)).fold(0.0, f64::max);
    let mut summary = format!(
        "steps: {}, t_final: {}, final distance to reference: {final_dist:.6e}, max distance: {max_dist:.6e}",
        traj.len(),
        traj.t.last().copied().unwrap_or(0.0)
    );
    if let Some(Halt::PositivityFloor { t, species }) = &traj.halted {
        let _ = write!(summary, "\nwarning: species {} reached the positivity floor at t = {t}", net.species()[*species]);
    }
    let csv = traj.to_csv();
    match out {
        Some(p) => {
            std::fs::write(p, csv)?;
            Ok(summary + "\n")
        }
        None => {
            eprintln!("{summary}");
            Ok(csv)
        }
    }
}

fn cmd_cycles(format: Format, net: &GmasNetwork, opts: &StabilityOptions) -> CliResult<String> {
    if weakly_reversible(net) {
        let r = analyze_weakly_reversible(net, opts)?;
        return match format {
            Format::Json => to_json(&r),
            Format::Text => {
                let mut out = String::new();
                for c in &r.cycles {
                    let _ = writeln!(out, "{}: dim S^C = {}", c.description, c.subspace_dim);
                    let _ = writeln!(out, "  {}", verdict_summary(&c.d_semistable));
                }
                let _ = writeln!(out, "=> {}", r.conclusion);
                if let Some(w) = &r.witness {
                    let _ = writeln!(out, "witness: x* = {:?}, k = {:?}, eps = {:?}, eigenvalue {} {:+}i", w.x_star, w.k, w.epsilon, w.eigenvalue.re, w.eigenvalue.im);
                }
                Ok(out)
            }
        };
    }
    let cycles = enumerate_cycles(net)?;
    match format {
        Format::Json => to_json(&json!({ "cycles": cycles, "weakly_reversible": false })),
        Format::Text => {
            let mut out = String::new();
            for c in &cycles {
                let _ = writeln!(out, "{}", c.describe(net));
            }
            let _ = writeln!(out, "network is not weakly reversible; per-cycle conditions not evaluated");
            Ok(out)
        }
    }
}

fn example_files(name: ExampleName) -> Vec<(String, String)> {
    let ones = |net: &GmasNetwork| RateAssignment::ones(net);
    let file = |header: &str, net: GmasNetwork| format!("{header}{}", to_text(&net, Some(&ones(&net))));
    let mut files = Vec::new();
    let all = name == ExampleName::All;
    if all || name == ExampleName::Planar3cycle {
        files.push((
            "planar3cycle.gcrn".into(),
            file(
                "# irreversible three-cycle in X, Y: vertex i is a_i X + b_i Y with kinetic orders alpha_i X + beta_i Y\n",
                catalog::planar_three_cycle_default(),
            ),
        ));
    }
    if all || name == ExampleName::Ivanova3cycle {
        files.push((
            "ivanova3cycle.gcrn".into(),
            file(
                "# three-cycle X -> Y -> Z -> X; kinetic orders (alpha_i, beta_i, gamma_i) per vertex\n",
                catalog::three_species_cycle_default(),
            ),
        ));
    }
    if all || name == ExampleName::Fourcycle {
        for (a, b, g, label) in catalog::FOUR_CYCLE_TABLE {
            let fname = format!("fourcycle_a{}_b{}_g{}.gcrn", tag(a), tag(b), tag(g));
            let header = format!(
                "# four-cycle 0 (gamma Z) -> X (X) -> Y (alpha X + Y) -> Z (beta Y + Z) -> 0\n# alpha = {a}, beta = {b}, gamma = {g}: {label}\n"
            );
            files.push((fname, file(&header, catalog::four_cycle(a, b, g))));
        }
    }
    if all || name == ExampleName::Revchain {
        files.push((
            "revchain.gcrn".into(),
            file(
                "# reversible chain c1 <-> c2 <-> c3 <-> c4; a link violates the sign condition when\n# (y(i+1) - y(i))_s (y~(i+1) - y~(i))_s < 0 for some species s\n",
                catalog::reversible_chain_default(0.5),
            ),
        ));
    }
    if all || name == ExampleName::Ssystem {
        files.push((
            "ssystem.gcrn".into(),
            file(
                "# S-system dx_i/dt = alpha_i x^g_i - beta_i x^h_i\n# vertex z_i carries g_i (row i of G), x_i carries h_i (row i of H); edge z_i -> x_i has rate alpha_i, x_i -> z_i has rate beta_i\n",
                catalog::s_system_default(0.0),
            ),
        ));
    }
    if all || name == ExampleName::XyUnique {
        files.push(("xy_unique.gcrn".into(), file("# X (X) <-> Y (0)\n", catalog::xy_unique())));
    }
    files
}

fn tag(v: f64) -> String {
    if v < 0.0 {
        format!("m{}", -v)
    } else {
        format!("{v}")
    }
}

fn cmd_examples(name: ExampleName, dir: &Path) -> CliResult<String> {
    std::fs::create_dir_all(dir)?;
    let mut out = String::new();
    for (fname, text) in example_files(name) {
        let path = dir.join(&fname);
        std::fs::write(&path, text)?;
        let _ = writeln!(out, "{}", path.display());
    }
    Ok(out)
}
