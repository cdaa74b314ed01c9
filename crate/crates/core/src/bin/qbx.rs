use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qbx::expansion::{eval_on_surface, Density, Geometry, KernelFamily, KernelSpec, QbxParams};
use qbx::geometry::Side;
use qbx::harness::checks::{oracle_checks, special_function_checks};
use qbx::harness::{
    demo_bie, parse_geometry, parse_target, run_sweep, write_csv, BieParams, BieRadius, SweepConfig,
};
use qbx::quadrature::SphereLayout;
use qbx::reference::onsurface_reference;
use qbx::{QbxError, Result};

#[derive(Parser)]
#[command(
    name = "qbx",
    version,
    about = "Quadrature by expansion: on-surface layer potentials and convergence sweeps"
)]
struct Cli {
    /// Maximum number of worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence sweep described by a config file and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output path; defaults to the config's `output`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Omit the commented timestamp line.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Evaluate one on-surface value.
    Eval(EvalArgs),
    /// Run the special-function and oracle invariant suites.
    Selftest {
        /// Random interior points per kernel in the oracle comparison.
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Solve an interior Dirichlet Laplace problem and report the error.
    DemoBie {
        #[arg(long, default_value = "circle(1)")]
        geometry: String,
        /// Boundary data: `zero`, `constant:c` or `repower:n` (Re z^n).
        #[arg(long, default_value = "repower:3")]
        data: String,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        m: usize,
        #[arg(long, default_value_t = 8)]
        q: usize,
        /// Expansion radius; defaults to 4h, clamped by curvature.
        #[arg(long)]
        r: Option<f64>,
    },
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    kernel: String,
    #[arg(long, default_value_t = 0.0)]
    k: f64,
    #[arg(long, default_value = "circle(1)")]
    geometry: String,
    #[arg(long, default_value = "constant:1")]
    density: String,
    /// Truncation order.
    #[arg(long)]
    n: usize,
    /// Expansion radius.
    #[arg(long)]
    r: f64,
    /// Panel count (curves).
    #[arg(long, default_value_t = 64)]
    m: usize,
    /// Gauss points per panel (curves).
    #[arg(long, default_value_t = 16)]
    q: usize,
    /// `n_phi,n_theta` (spheres).
    #[arg(long, default_value = "48,96")]
    sphere_rule: String,
    #[arg(long, default_value = "standard")]
    sphere_layout: String,
    /// Curve parameter `t`, or `theta:phi` on a sphere.
    #[arg(long)]
    target: String,
    #[arg(long, default_value = "interior")]
    side: String,
    /// Also compute the reference value and the error.
    #[arg(long)]
    reference: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Sweep {
            config,
            out,
            no_timestamp,
        } => {
            let cfg = SweepConfig::load(&config)?;
            let records = run_sweep(&cfg, cli.jobs)?;
            match out.or_else(|| cfg.output.clone()) {
                Some(path) => {
                    let file = File::create(&path).map_err(|e| {
                        QbxError::Io(format!("cannot create '{}': {e}", path.display()))
                    })?;
                    let mut w = BufWriter::new(file);
                    write_csv(&mut w, &records, !no_timestamp)?;
                    w.flush().map_err(|e| QbxError::Io(e.to_string()))?;
                    eprintln!("wrote {} rows to {}", records.len(), path.display());
                }
                None => write_csv(&mut io::stdout().lock(), &records, !no_timestamp)?,
            }
            Ok(0)
        }
        Command::Eval(args) => eval(args),
        Command::Selftest { points } => {
            let mut checks = special_function_checks()?;
            checks.extend(oracle_checks(points)?);
            let mut failed = 0;
            for c in &checks {
                let verdict = if c.passed() { "ok  " } else { "FAIL" };
                println!(
                    "{verdict} {:<52} {:.3e} (tol {:.0e})",
                    c.name, c.residual, c.tolerance
                );
                failed += usize::from(!c.passed());
            }
            println!("{} checks, {failed} failed", checks.len());
            Ok(if failed == 0 { 0 } else { 1 })
        }
        Command::DemoBie {
            geometry,
            data,
            n,
            m,
            q,
            r,
        } => {
            let curve = match parse_geometry(&geometry)? {
                Geometry::Curve(c) => c,
                Geometry::Surface(_) => {
                    return Err(QbxError::Capability(
                        "the integral-equation demo is 2D only".into(),
                    ))
                }
            };
            let data: Density = data.parse()?;
            let radius = r.map_or(BieRadius::FourH, BieRadius::Fixed);
            let report = demo_bie(
                &curve,
                0.0,
                &data,
                &BieParams {
                    order: n,
                    panels: m,
                    q,
                    radius,
                },
            )?;
            println!(
                "unknowns {}  min r {:.4e}  boundary residual {:.3e}  interior max error {:.3e} at {} probes",
                report.unknowns, report.min_radius, report.boundary_residual, report.interior_error, report.probes
            );
            Ok(0)
        }
    }
}

fn eval(args: EvalArgs) -> Result<u8> {
    let geometry = parse_geometry(&args.geometry)?;
    let surface = matches!(geometry, Geometry::Surface(_));
    let family: KernelFamily = args.kernel.parse()?;
    let kernel = KernelSpec::new(family, if surface { 3 } else { 2 }, args.k)?;
    let density: Density = args.density.parse()?;
    let target = parse_target(&args.target, surface)?;
    let side = match args.side.as_str() {
        "interior" => Side::Interior,
        "exterior" => Side::Exterior,
        other => {
            return Err(QbxError::Domain(format!(
                "side must be interior or exterior, got '{other}'"
            )))
        }
    };
    let params = if surface {
        let bad = || {
            QbxError::Domain(format!(
                "sphere rule must be 'n_phi,n_theta', got '{}'",
                args.sphere_rule
            ))
        };
        let (a, b) = args.sphere_rule.split_once(',').ok_or_else(bad)?;
        let layout: SphereLayout = args.sphere_layout.parse()?;
        QbxParams::sphere(
            args.n,
            args.r,
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )
        .with_sphere_layout(layout)
    } else {
        QbxParams::curve(args.n, args.r, args.m, args.q)
    }
    .with_side(side);
    let value = eval_on_surface(&kernel, &geometry, &density, target, &params)?;
    println!("value     {:+.16e} {:+.16e}i", value.re, value.im);
    if args.reference {
        let reference = onsurface_reference(&kernel, &geometry, &density, target, 1e-10, &params)?;
        println!(
            "reference {:+.16e} {:+.16e}i ({:?})",
            reference.value.re, reference.value.im, reference.method
        );
        println!("error     {:.3e}", (value - reference.value).norm());
    }
    Ok(0)
}
