use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fracwrm::basis::{BasisFamily, DerivativeBcMode};
use fracwrm::harness::{paper_preset, resolve_problem, run_matrix, HarnessError, MatrixEntry, RunConfig};
use fracwrm::metrics::{full, Format};
use fracwrm::quadrature::QuadConfig;
use fracwrm::wrm::{Method, NewtonConfig};

#[derive(Parser)]
#[command(name = "fracwrm", version, about = "Weighted-residual solvers for nonlinear fractional boundary value problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem with one method and basis.
    Solve {
        /// Builtin id (1, 2, 3, 3c, 4) or path to a problem file.
        problem: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Galerkin)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = FamilyArg::Legendre)]
        family: FamilyArg,
        /// Number of raw basis members before boundary constraints.
        #[arg(long, default_value_t = 3)]
        count: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Constrain)]
        bc_mode: ModeArg,
        #[command(flatten)]
        common: Common,
    },
    /// Run a matrix of problems, methods, bases and sizes.
    Run {
        /// Builtin ids or problem files.
        #[arg(long = "problem", required = true)]
        problems: Vec<String>,
        #[arg(long = "method", value_enum, required = true)]
        methods: Vec<MethodArg>,
        #[arg(long = "family", value_enum, default_values_t = [FamilyArg::Legendre, FamilyArg::Bernoulli])]
        families: Vec<FamilyArg>,
        #[arg(long = "count", required = true)]
        counts: Vec<usize>,
        #[arg(long = "bc-mode", value_enum, default_values_t = [ModeArg::Constrain])]
        bc_modes: Vec<ModeArg>,
        #[command(flatten)]
        common: Common,
    },
    /// Reproduce the benchmark tables.
    Reproduce {
        /// Use the published run configuration.
        #[arg(long, required = true)]
        paper: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Output directory; nothing is written when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::All)]
    format: FormatArg,
    /// Gauss-Legendre points per panel.
    #[arg(long)]
    quad_points: Option<usize>,
    /// Number of graded panels.
    #[arg(long)]
    quad_panels: Option<usize>,
    /// Newton residual tolerance.
    #[arg(long)]
    newton_tol: Option<f64>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Galerkin,
    GalerkinWeak,
    LeastSquares,
    Collocation,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Galerkin => Method::Galerkin,
            MethodArg::GalerkinWeak => Method::GalerkinWeak,
            MethodArg::LeastSquares => Method::LeastSquares,
            MethodArg::Collocation => Method::Collocation,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Legendre,
    Bernoulli,
}

impl From<FamilyArg> for BasisFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Legendre => BasisFamily::ModifiedLegendre,
            FamilyArg::Bernoulli => BasisFamily::ModifiedBernoulli,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Derivative conditions also constrain the basis.
    Constrain,
    /// Derivative conditions are carried by the lift only.
    LiftOnly,
}

impl From<ModeArg> for DerivativeBcMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Constrain => DerivativeBcMode::Constrain,
            ModeArg::LiftOnly => DerivativeBcMode::LiftOnly,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Md,
    Plot,
    All,
}

impl Common {
    fn config(&self, entries: Vec<MatrixEntry>) -> RunConfig {
        let mut quad = QuadConfig::default();
        if let Some(p) = self.quad_points {
            quad.points = p;
        }
        if let Some(p) = self.quad_panels {
            quad.panels = p;
        }
        let mut newton = NewtonConfig::default();
        if let Some(t) = self.newton_tol {
            newton.residual_tol = t;
        }
        let formats = match self.format {
            FormatArg::Csv => vec![Format::Csv],
            FormatArg::Md => vec![Format::Markdown],
            FormatArg::Plot => vec![Format::PlotData],
            FormatArg::All => vec![Format::Csv, Format::Markdown, Format::PlotData],
        };
        RunConfig { entries, quad, newton, out: self.out.clone(), formats, jobs: self.jobs }
    }
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    let (cfg, single) = match cli.command {
        Command::Solve { problem, method, family, count, bc_mode, common } => {
            let entry = MatrixEntry {
                problem: resolve_problem(&problem)?,
                methods: vec![method.into()],
                families: vec![family.into()],
                counts: vec![count],
                bc_modes: vec![bc_mode.into()],
            };
            (common.config(vec![entry]), true)
        }
        Command::Run { problems, methods, families, counts, bc_modes, common } => {
            let entries = problems
                .iter()
                .map(|p| {
                    Ok(MatrixEntry {
                        problem: resolve_problem(p)?,
                        methods: methods.iter().map(|&m| m.into()).collect(),
                        families: families.iter().map(|&f| f.into()).collect(),
                        counts: counts.clone(),
                        bc_modes: bc_modes.iter().map(|&m| m.into()).collect(),
                    })
                })
                .collect::<Result<Vec<_>, HarnessError>>()?;
            (common.config(entries), false)
        }
        Command::Reproduce { paper: _, common } => (common.config(paper_preset()?), false),
    };
    let summary = run_matrix(&cfg)?;
    if single {
        let cell = &summary.cells[0];
        match &cell.result {
            Ok(r) => {
                let d = &r.solution.diagnostics;
                println!("converged: {} after {} iterations (residual {:e})", d.converged, d.iterations, d.residual_norm);
                println!("u(x) = {}", r.solution.approx);
                let coeffs: Vec<String> = r.solution.coeffs.iter().map(|c| full(*c)).collect();
                println!("coefficients: {}", coeffs.join(" "));
                if let Some(rep) = &r.report {
                    println!("L_inf (11 points) = {:e}", rep.linf_table);
                    println!("L_inf (1001 points) = {:e}", rep.linf_dense);
                    println!("L2 (no root) = {:e}", rep.l2);
                }
            }
            Err(e) => eprintln!("error: {e}"),
        }
    } else {
        print!("{}", summary.index);
    }
    if summary.errored() > 0 {
        eprintln!("{} cell(s) failed", summary.errored());
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
