use clap::{Args, Parser, Subcommand};
use moyal_torus::bargmann::{intertwiner_apply, BargmannConfig};
use moyal_torus::fock::{torus_action, u_bf, FockVector, KernelQuadrature};
use moyal_torus::heisenberg::GroupElement;
use moyal_torus::nctorus::{norm_estimate, Generator, TorusElement};
use moyal_torus::numerics::csv::read_wavefunction;
use moyal_torus::numerics::{Grid1D, PositionWavefunction, QuantizationParams};
use moyal_torus::schrodinger::u_kw;
use moyal_torus::starexp::star_exp;
use moyal_torus::verify;
use moyal_torus::Error;
use num_complex::Complex64;
use serde_json::json;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const THREADS_ENV: &str = "MOYAL_TORUS_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "moyal-torus",
    version,
    about = "Heisenberg-group quantization and noncommutative-torus checks"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Orbit parameter μ; θ = 1/μ.
    #[arg(long, global = true, conflicts_with = "theta")]
    mu: Option<f64>,
    /// Deformation parameter θ; μ = 1/θ.
    #[arg(long, global = true)]
    theta: Option<f64>,
    /// Points of the position grid (power of two).
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Half-width of the position grid, or the v-window radius for `bargmann`.
    #[arg(long, global = true)]
    window: Option<f64>,
    /// Pass/fail tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Input file.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check UV = e^{iθ}VU in the torus algebra.
    TorusCommutator,
    /// Star-exponentials of group elements as a CSV table.
    StarexpTable,
    /// Apply the Bargmann transform to a sampled state.
    Bargmann(BargmannArgs),
    /// Act with a torus element on a Fock vector.
    BfAction(BfActionArgs),
    /// Estimate the operator norm of a torus element.
    NormEstimate(NormArgs),
    /// Run the full acceptance suite.
    VerifyAll,
}

#[derive(Args, Debug)]
struct BargmannArgs {
    /// Width of the mother state e^{−αx²}.
    #[arg(long, default_value_t = 1.5 * PI)]
    alpha: f64,
    /// Emit the intertwining residual table instead of the transform.
    #[arg(long)]
    check_intertwining: bool,
}

#[derive(Args, Debug)]
struct BfActionArgs {
    /// Torus element as JSON.
    #[arg(long)]
    element: PathBuf,
}

#[derive(Args, Debug)]
struct NormArgs {
    /// Torus element as JSON; U + U* + V + V* when absent.
    #[arg(long)]
    element: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Numeric(String, Error),
    Check(String),
}

type Run = Result<(), Failure>;

fn numeric(op: &str) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::Numeric(op.to_string(), e)
}

impl Common {
    fn params(&self, default_mu: f64) -> Result<QuantizationParams, Error> {
        match (self.mu, self.theta) {
            (Some(mu), _) => QuantizationParams::from_mu(mu),
            (None, Some(theta)) => QuantizationParams::from_theta(theta),
            (None, None) => QuantizationParams::from_mu(default_mu),
        }
    }

    fn grid(&self, half_width: f64, count: usize) -> Result<Grid1D, Error> {
        Grid1D::centered(
            self.window.unwrap_or(half_width),
            self.grid_n.unwrap_or(count),
        )
    }

    fn emit(&self, text: &str) -> Result<(), Error> {
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn to_json(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

fn check(label: &str, measured: f64, tol: f64) -> Run {
    if measured <= tol {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "{label}: {measured:.3e} exceeds {tol:.1e}"
        )))
    }
}

fn torus_commutator(c: &Common) -> Run {
    let op = "torus-commutator";
    let pr = c.params(2.0 * PI).map_err(numeric(op))?;
    let theta = pr.theta;
    let u = TorusElement::generator(Generator::U, theta);
    let v = TorusElement::generator(Generator::V, theta);
    let uv = u.multiply(&v).map_err(numeric(op))?;
    let vu = v.multiply(&u).map_err(numeric(op))?;
    let ratio = uv.coeff(1, 1) / vu.coeff(1, 1);
    let deviation = (ratio - Complex64::from_polar(1.0, theta)).norm();
    let report = json!({
        "theta": theta,
        "ratio": [ratio.re, ratio.im],
        "expected": [theta.cos(), theta.sin()],
        "deviation": deviation,
    });
    c.emit(&to_json(&report)).map_err(numeric(op))?;
    check(
        "UV/VU deviation",
        deviation,
        c.tol.unwrap_or(verify::TORUS_ALGEBRA_TOL),
    )
}

fn default_elements(theta: f64) -> Vec<(f64, f64, f64)> {
    let t2 = theta * theta;
    vec![
        (0.0, 0.0, 0.0),
        (t2, 0.0, 0.0),
        (0.0, t2, 0.0),
        (0.0, 0.0, 1.0),
        (0.5, -0.25, 0.1),
        (-1.0, 1.0, 0.0),
    ]
}

fn parse_elements(text: &str) -> Result<Vec<(f64, f64, f64)>, Error> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some("q,p,z") {
        return Err(Error::Parse("expected header q,p,z".into()));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let cols: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| Error::Parse(format!("row {}: {e}", i + 1)))?;
            match cols[..] {
                [q, p, z] => Ok((q, p, z)),
                _ => Err(Error::Parse(format!("row {}: expected 3 columns", i + 1))),
            }
        })
        .collect()
}

fn starexp_table(c: &Common) -> Run {
    let op = "starexp-table";
    let pr = c.params(2.0 * PI).map_err(numeric(op))?;
    let elements = match &c.input {
        Some(path) => parse_elements(&read(path).map_err(numeric(op))?).map_err(numeric(op))?,
        None => default_elements(pr.theta),
    };
    let mut out = String::from("q,p,z,a_q,a_p,phase_re,phase_im\n");
    for (q, p, z) in elements {
        let e = star_exp(&GroupElement::from_qpz(q, p, z), &pr).map_err(numeric(op))?;
        let [aq, ap] = e.frequency();
        let ph = e.central_phase;
        let _ = writeln!(
            out,
            "{q:.16e},{p:.16e},{z:.16e},{aq:.16e},{ap:.16e},{:.16e},{:.16e}",
            ph.re, ph.im
        );
    }
    c.emit(&out).map_err(numeric(op))
}

fn bargmann(c: &Common, args: &BargmannArgs) -> Run {
    let op = "bargmann";
    let pr = c.params(2.0 * PI).map_err(numeric(op))?;
    let mut cfg = BargmannConfig::new(args.alpha, pr.mu).map_err(numeric(op))?;
    if let Some(r) = c.window {
        cfg = cfg.with_radius(r);
    }
    let u = match &c.input {
        Some(path) => read_wavefunction(&read(path).map_err(numeric(op))?).map_err(numeric(op))?,
        None => {
            let grid = Grid1D::centered(12.0, c.grid_n.unwrap_or(256)).map_err(numeric(op))?;
            PositionWavefunction::from_real_fn(grid, |x| (-args.alpha * x * x).exp())
        }
    };
    let tu = intertwiner_apply(&u, &cfg).map_err(numeric(op))?;
    if !args.check_intertwining {
        return c.emit(&to_json(&tu)).map_err(numeric(op));
    }
    let mut out = String::from("q,p,residual\n");
    let mut worst = 0.0f64;
    for (q, p) in [
        (0.5, -0.3),
        (-1.2, 0.8),
        (1.0, 1.0),
        (0.0, 1.5),
        (-1.5, 0.0),
    ] {
        let w = GroupElement::from_qpz(q, p, 0.0);
        let lhs = intertwiner_apply(&u_kw(&w, &u, &pr).map_err(numeric(op))?, &cfg)
            .map_err(numeric(op))?;
        let rhs = u_bf(&w, &tu, &pr).map_err(numeric(op))?;
        let rel = lhs.distance(&rhs).map_err(numeric(op))? / tu.norm();
        worst = worst.max(rel);
        let _ = writeln!(out, "{q:.16e},{p:.16e},{rel:.16e}");
    }
    c.emit(&out).map_err(numeric(op))?;
    check(
        "intertwining residual",
        worst,
        c.tol.unwrap_or(verify::BARGMANN_TOL),
    )
}

fn bf_action(c: &Common, args: &BfActionArgs) -> Run {
    let op = "bf-action";
    let Some(input) = &c.input else {
        return Err(Failure::Usage(
            "bf-action needs --input with a Fock vector".into(),
        ));
    };
    let phi: FockVector = parse_json(input).map_err(numeric(op))?;
    let a: TorusElement = parse_json(&args.element).map_err(numeric(op))?;
    let pr = c.params(phi.mu()).map_err(numeric(op))?;
    let out = torus_action(&a, &phi, &pr, &KernelQuadrature::default()).map_err(numeric(op))?;
    c.emit(&to_json(&out)).map_err(numeric(op))
}

// q ≤ 16 with θq/2π integral, when there is one
fn rational_denominator(theta: f64) -> Option<(usize, usize)> {
    (1..=16).find_map(|q| {
        let p = theta * q as f64 / (2.0 * PI);
        ((p - p.round()).abs() < 1e-12 && p.round() >= 0.0).then_some((p.round() as usize, q))
    })
}

fn norm(c: &Common, args: &NormArgs) -> Run {
    let op = "norm-estimate";
    let pr = c.params(1.5 / PI).map_err(numeric(op))?;
    let theta = pr.theta;
    let a = match &args.element {
        Some(path) => parse_json(path).map_err(numeric(op))?,
        None => {
            let u = TorusElement::generator(Generator::U, theta);
            let v = TorusElement::generator(Generator::V, theta);
            u.add(&u.adjoint())
                .and_then(|s| s.add(&v))
                .and_then(|s| s.add(&v.adjoint()))
                .map_err(numeric(op))?
        }
    };
    let grid = c.grid(PI, 512).map_err(numeric(op))?;
    let est = norm_estimate(&a, &pr, &grid).map_err(numeric(op))?;
    let mut report = json!({
        "theta": theta,
        "norm": est.norm,
        "half_grid_norm": est.coarse,
        "refinement_delta": est.refinement_delta,
        "basis_dim": est.basis_dim,
    });
    let oracle = match (args.element.is_none(), rational_denominator(theta)) {
        (true, Some((p, q))) => Some(verify::matrix_model_norm(p, q, 64).map_err(numeric(op))?),
        _ => None,
    };
    if let Some(m) = oracle {
        report["matrix_model_norm"] = json!(m);
    }
    c.emit(&to_json(&report)).map_err(numeric(op))?;
    match oracle {
        Some(m) => check(
            "norm vs matrix model",
            (est.norm - m).abs(),
            c.tol.unwrap_or(verify::NORM_ORACLE_TOL),
        ),
        None => Ok(()),
    }
}

fn verify_all(c: &Common) -> Run {
    let reports = verify::run_all();
    let mut text = String::new();
    for r in &reports {
        let _ = writeln!(text, "{r}");
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    let _ = writeln!(text, "{passed} of {} criteria pass", reports.len());
    if let Some(path) = &c.out {
        let mut csv = String::from("id,criterion,check,measured,tolerance,pass\n");
        for r in &reports {
            for k in &r.checks {
                let _ = writeln!(
                    csv,
                    "{},\"{}\",{},{:.6e},{:.1e},{}",
                    r.id,
                    r.name,
                    k.label,
                    k.measured,
                    k.tolerance,
                    k.passed()
                );
            }
        }
        std::fs::write(path, csv)
            .map_err(|e| Failure::Numeric("verify-all".into(), Error::Io(e.to_string())))?;
    }
    print!("{text}");
    if passed == reports.len() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "{} criteria failed",
            reports.len() - passed
        )))
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let c = &cli.common;
    let outcome = match &cli.command {
        Command::TorusCommutator => torus_commutator(c),
        Command::StarexpTable => starexp_table(c),
        Command::Bargmann(a) => bargmann(c, a),
        Command::BfAction(a) => bf_action(c, a),
        Command::NormEstimate(a) => norm(c, a),
        Command::VerifyAll => verify_all(c),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(op, e)) => {
            eprintln!("error: {op}: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
    }
}
