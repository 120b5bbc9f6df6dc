use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::basis::{BasisFamily, DerivativeBcMode};
use crate::fracpoly::{caputo_series, FracOrder, FracSeries};
use crate::metrics::{emit, error_report, full, l2_error, sci3, ErrorColumn, ErrorReport, ErrorTable, Format, Grid};
use crate::quadrature::QuadConfig;
use crate::wrm::{solve, Method, NewtonConfig, ProblemSpec, Solution, SolveError, SolveOptions};

use super::{builtin_problem, HarnessError};

/// One problem with the axes to sweep for it.
#[derive(Debug, Clone)]
pub struct MatrixEntry {
    pub problem: ProblemSpec,
    pub methods: Vec<Method>,
    pub families: Vec<BasisFamily>,
    pub counts: Vec<usize>,
    pub bc_modes: Vec<DerivativeBcMode>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub entries: Vec<MatrixEntry>,
    pub quad: QuadConfig,
    pub newton: NewtonConfig,
    /// No files are written when `None`.
    pub out: Option<PathBuf>,
    pub formats: Vec<Format>,
    /// Worker threads; `None` lets the pool decide.
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.entries.is_empty() {
            return Err(HarnessError::InvalidRun("no problems given".into()));
        }
        for e in &self.entries {
            let what = if e.methods.is_empty() {
                "method"
            } else if e.families.is_empty() {
                "family"
            } else if e.counts.is_empty() {
                "count"
            } else if e.bc_modes.is_empty() {
                "boundary-condition mode"
            } else {
                continue;
            };
            return Err(HarnessError::InvalidRun(format!("empty {what} list for {}", e.problem.name)));
        }
        if self.jobs == Some(0) {
            return Err(HarnessError::InvalidRun("--jobs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellKey {
    pub problem: String,
    pub method: Method,
    pub family: BasisFamily,
    pub count: usize,
    pub bc_mode: DerivativeBcMode,
}

impl CellKey {
    fn mode_suffix(&self) -> &'static str {
        match self.bc_mode {
            DerivativeBcMode::Constrain => "",
            DerivativeBcMode::LiftOnly => "-liftonly",
        }
    }

    pub fn file_stem(&self) -> String {
        format!("{}-{}-n{}{}", self.method.name(), self.family.name(), self.count, self.mode_suffix())
    }

    /// Column label, e.g. `gwr_legendre`.
    pub fn label(&self) -> String {
        format!("{}_{}{}", self.method.short_name(), self.family.name(), self.mode_suffix().replace('-', "_"))
    }
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub solution: Solution,
    pub report: Option<ErrorReport>,
    /// |L2 - L2 with doubled panels|, the quadrature check on the error metric.
    pub l2_doubling_change: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub key: CellKey,
    pub result: Result<CellResult, String>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub cells: Vec<CellOutcome>,
    /// Rendered `index.md`.
    pub index: String,
}

impl RunSummary {
    pub fn errored(&self) -> usize {
        self.cells.iter().filter(|c| c.result.is_err()).count()
    }

    pub fn not_converged(&self) -> usize {
        self.cells.iter().filter(|c| matches!(&c.result, Ok(r) if !r.solution.diagnostics.converged)).count()
    }
}

/// Residual of the problem's exact solution, `sum_t c_t (D^o u)^e - f`, at
/// `x`. Needs an exact solution that lowers to a power sum and a domain
/// starting at 0.
pub fn exact_residual(problem: &ProblemSpec, x: f64) -> Result<f64, SolveError> {
    let exact = problem
        .exact
        .as_ref()
        .ok_or_else(|| SolveError::InvalidProblem(format!("{} has no exact solution", problem.name)))?;
    if problem.domain.0 != 0.0 {
        return Err(SolveError::InvalidProblem("exact residual needs a domain starting at 0".into()));
    }
    let u = exact
        .to_frac_series()
        .map_err(|_| SolveError::InvalidProblem("exact solution is not a sum of powers of x".into()))?;
    let mut r = -problem
        .rhs
        .eval(x)
        .map_err(|e| SolveError::Evaluation { what: "right-hand side".into(), source: e })?;
    for (i, t) in problem.terms.iter().enumerate() {
        let d: FracSeries = if t.order == 0.0 { u.clone() } else { caputo_series(&u, FracOrder::new(t.order)?)? };
        let c = t
            .coefficient
            .eval(x)
            .map_err(|e| SolveError::Evaluation { what: format!("coefficient of term {i}"), source: e })?;
        r += c * d.eval(x).powi(t.exponent as i32);
    }
    Ok(r)
}

fn one(method: Method, entry_methods: &[Method]) -> Vec<Method> {
    let mut v = vec![method];
    v.extend_from_slice(entry_methods);
    v
}

/// The benchmark reproduction matrix: three methods times two families at
/// the published sizes, weak-form Galerkin where the operator has a plain
/// second-derivative term. Problem 2 is additionally run with derivative
/// conditions carried by the lift only, and problem 3 in both its printed
/// and its consistent transcription.
pub fn paper_preset() -> Result<Vec<MatrixEntry>, HarnessError> {
    let rest = [Method::LeastSquares, Method::Collocation];
    let families = BasisFamily::all().to_vec();
    let entry = |id: &str, galerkin: Method, count: usize, bc_modes: Vec<DerivativeBcMode>| {
        Ok::<_, HarnessError>(MatrixEntry {
            problem: builtin_problem(id)?,
            methods: one(galerkin, &rest),
            families: families.clone(),
            counts: vec![count],
            bc_modes,
        })
    };
    let constrain = || vec![DerivativeBcMode::Constrain];
    Ok(vec![
        entry("1", Method::Galerkin, 3, constrain())?,
        entry("2", Method::Galerkin, 3, vec![DerivativeBcMode::Constrain, DerivativeBcMode::LiftOnly])?,
        entry("3", Method::Galerkin, 5, constrain())?,
        entry("3c", Method::Galerkin, 5, constrain())?,
        entry("4", Method::GalerkinWeak, 3, constrain())?,
    ])
}

fn run_cell(problem: &ProblemSpec, key: &CellKey, quad: &QuadConfig, newton: &NewtonConfig) -> Result<CellResult, String> {
    let opts = SolveOptions { quad: *quad, newton: newton.clone(), bc_mode: key.bc_mode };
    let solution = solve(problem, key.method, key.family, key.count, &opts).map_err(|e| e.to_string())?;
    let (a, b) = problem.domain;
    let (report, l2_doubling_change) = match &problem.exact {
        Some(exact) => {
            let rule = quad.build(a, b).map_err(|e| e.to_string())?;
            let rep = error_report(exact, &solution.approx, &rule).map_err(|e| e.to_string())?;
            let fine = quad.doubled().build(a, b).map_err(|e| e.to_string())?;
            let l2_fine = l2_error(exact, &solution.approx, &fine).map_err(|e| e.to_string())?;
            let change = (l2_fine - rep.l2).abs();
            (Some(rep), Some(change))
        }
        None => (None, None),
    };
    Ok(CellResult { solution, report, l2_doubling_change })
}

fn column(key: &CellKey, r: &CellResult) -> Option<ErrorColumn> {
    let rep = r.report.as_ref()?;
    Some(ErrorColumn {
        label: key.label(),
        errors: rep.abs_errors.clone(),
        linf: rep.linf_table,
        l2: Some(rep.l2),
        mark: (!r.solution.diagnostics.converged).then(|| "not converged".to_string()),
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.display().to_string(), source }
}

fn write_table(dir: &Path, stem: &str, table: &ErrorTable, formats: &[Format]) -> Result<(), HarnessError> {
    for &f in formats {
        let path = dir.join(format!("{stem}.{}", f.extension()));
        let mut buf = Vec::new();
        emit(table, f, &mut buf).map_err(io_err(&path))?;
        fs::write(&path, buf).map_err(io_err(&path))?;
    }
    Ok(())
}

fn table_for(rep: &ErrorReport, columns: Vec<ErrorColumn>) -> ErrorTable {
    ErrorTable { points: rep.sample_points.clone(), exact: rep.exact_values.clone(), columns }
}

fn cell_text(c: &CellOutcome, f: impl Fn(&CellResult) -> Option<String>) -> String {
    match &c.result {
        Ok(r) => {
            let v = f(r).unwrap_or_else(|| "n/a".into());
            if r.solution.diagnostics.converged {
                v
            } else {
                format!("{v} †")
            }
        }
        Err(_) => "error".into(),
    }
}

fn render_index(entries: &[MatrixEntry], cells: &[CellOutcome]) -> String {
    let mut s = String::from("# Error summary\n\n");
    s.push_str("L∞ is the largest absolute error on the 11-point grid (and on 1001 points);\n");
    s.push_str("L2 is the integral of the squared error, without a square root.\n");
    s.push_str("† marks a Newton run that did not reach its tolerance.\n");
    for entry in entries {
        let name = &entry.problem.name;
        let mine: Vec<&CellOutcome> = cells.iter().filter(|c| &c.key.problem == name).collect();
        let _ = writeln!(s, "\n## {name}\n");
        let _ = write!(s, "| |");
        for c in &mine {
            let _ = write!(s, " {} n={} |", c.key.label(), c.key.count);
        }
        let _ = write!(s, "\n|---|");
        for _ in &mine {
            s.push_str("---|");
        }
        s.push('\n');
        let rows: [(&str, &dyn Fn(&CellResult) -> Option<String>); 5] = [
            ("L∞ (11 points)", &|r| r.report.as_ref().map(|p| sci3(p.linf_table))),
            ("L∞ (1001 points)", &|r| r.report.as_ref().map(|p| sci3(p.linf_dense))),
            ("L2", &|r| r.report.as_ref().map(|p| sci3(p.l2))),
            ("Newton iterations", &|r| Some(r.solution.diagnostics.iterations.to_string())),
            ("residual", &|r| Some(sci3(r.solution.diagnostics.residual_norm))),
        ];
        for (label, f) in rows {
            let _ = write!(s, "| {label} |");
            for c in &mine {
                let _ = write!(s, " {} |", cell_text(c, f));
            }
            s.push('\n');
        }
        for c in &mine {
            if let Err(e) = &c.result {
                let _ = writeln!(s, "\n{} failed: {e}", c.key.file_stem());
            }
        }
        let tiny: Vec<String> = mine
            .iter()
            .filter(|c| matches!(&c.result, Ok(r) if r.report.as_ref().is_some_and(|p| p.linf_table <= 1e-12)))
            .map(|c| c.key.file_stem())
            .collect();
        let _ = writeln!(
            s,
            "\nCells with 11-point L∞ at or below 1e-12: {}",
            if tiny.is_empty() { "none".to_string() } else { tiny.join(", ") }
        );
    }
    s
}

fn render_diagnostics(problem: &ProblemSpec, cells: &[&CellOutcome]) -> String {
    let mut s = format!("# {} diagnostics\n\n", problem.name);
    if problem.exact.is_some() {
        s.push_str("Residual of the exact solution (operator applied to it minus the right-hand side):\n\n");
        s.push_str("| x | residual |\n|---|---|\n");
        let (a, b) = problem.domain;
        for x in Grid::Table11.points(problem.domain).into_iter().filter(|&x| x > a && x <= b) {
            let v = match exact_residual(problem, x) {
                Ok(v) => full(v),
                Err(e) => format!("unavailable: {e}"),
            };
            let _ = writeln!(s, "| {x:.1} | {v} |");
        }
        s.push('\n');
    }
    for c in cells {
        let _ = writeln!(s, "## {}\n", c.key.file_stem());
        match &c.result {
            Err(e) => {
                let _ = writeln!(s, "error: {e}\n");
            }
            Ok(r) => {
                let d = &r.solution.diagnostics;
                let _ = writeln!(s, "- converged: {}", d.converged);
                let _ = writeln!(s, "- iterations: {}", d.iterations);
                let _ = writeln!(s, "- residual: {} (threshold {})", full(d.residual_norm), full(d.residual_threshold));
                let _ = writeln!(s, "- dimension: {} ({} active constraints)", d.dim, d.active_constraints);
                if let Some(p) = &d.collocation_points {
                    let pts: Vec<String> = p.iter().map(|x| full(*x)).collect();
                    let _ = writeln!(s, "- collocation points: {}", pts.join(", "));
                }
                if !d.weak_terms.is_empty() {
                    let _ = writeln!(s, "- weak-form terms: {:?}", d.weak_terms);
                }
                let a: Vec<String> = r.solution.coeffs.iter().map(|x| full(*x)).collect();
                let _ = writeln!(s, "- coefficients: {}", a.join(", "));
                let p: Vec<String> = r.solution.approx.coeffs().iter().map(|x| full(*x)).collect();
                let _ = writeln!(s, "- approximation (ascending powers): {}", p.join(", "));
                if let Some(rep) = &r.report {
                    let _ = writeln!(
                        s,
                        "- L∞ 11 points {}, L∞ 1001 points {}, L2 {}",
                        full(rep.linf_table),
                        full(rep.linf_dense),
                        full(rep.l2)
                    );
                }
                if let Some(c) = r.l2_doubling_change {
                    let _ = writeln!(s, "- L2 change with doubled quadrature panels: {}", full(c));
                }
                s.push('\n');
            }
        }
    }
    s
}

/// Runs every cell of the matrix and, if an output directory is set,
/// writes per-cell tables, a per-problem table and diagnostics, and
/// `index.md`. Cells run in parallel; results are joined in matrix order.
pub fn run_matrix(cfg: &RunConfig) -> Result<RunSummary, HarnessError> {
    cfg.validate()?;
    let mut jobs: Vec<(usize, CellKey)> = Vec::new();
    for (i, e) in cfg.entries.iter().enumerate() {
        for &method in &e.methods {
            for &family in &e.families {
                for &count in &e.counts {
                    for &bc_mode in &e.bc_modes {
                        jobs.push((i, CellKey { problem: e.problem.name.clone(), method, family, count, bc_mode }));
                    }
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::InvalidRun(e.to_string()))?;
    let cells: Vec<CellOutcome> = pool.install(|| {
        jobs.par_iter()
            .map(|(i, key)| CellOutcome {
                key: key.clone(),
                result: run_cell(&cfg.entries[*i].problem, key, &cfg.quad, &cfg.newton),
            })
            .collect()
    });

    let index = render_index(&cfg.entries, &cells);
    if let Some(out) = &cfg.out {
        for entry in &cfg.entries {
            let dir = out.join(&entry.problem.name);
            fs::create_dir_all(&dir).map_err(io_err(&dir))?;
            let mine: Vec<&CellOutcome> = cells.iter().filter(|c| c.key.problem == entry.problem.name).collect();
            let mut columns = Vec::new();
            let mut base: Option<&ErrorReport> = None;
            for c in &mine {
                if let Ok(r) = &c.result {
                    if let (Some(col), Some(rep)) = (column(&c.key, r), r.report.as_ref()) {
                        write_table(&dir, &c.key.file_stem(), &table_for(rep, vec![col.clone()]), &cfg.formats)?;
                        base.get_or_insert(rep);
                        columns.push(col);
                    }
                }
            }
            if let Some(rep) = base {
                write_table(&dir, "table", &table_for(rep, columns), &cfg.formats)?;
            }
            let path = dir.join("diagnostics.md");
            fs::write(&path, render_diagnostics(&entry.problem, &mine)).map_err(io_err(&path))?;
        }
        fs::create_dir_all(out).map_err(io_err(out))?;
        let path = out.join("index.md");
        fs::write(&path, &index).map_err(io_err(&path))?;
    }
    Ok(RunSummary { cells, index })
}
