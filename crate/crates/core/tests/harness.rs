use std::fs;
use std::path::Path;

use fracwrm::basis::{BasisFamily, DerivativeBcMode};
use fracwrm::harness::{
    builtin_problem, load_problem_config, paper_preset, parse_problem_config, run_matrix, HarnessError, MatrixEntry,
    RunConfig,
};
use fracwrm::metrics::{emit, error_table, Format};
use fracwrm::quadrature::QuadConfig;
use fracwrm::wrm::{solve, Method, NewtonConfig, SolveOptions};

fn problems_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/problems"))
}

#[test]
fn shipped_configs_equal_builtins() {
    for id in ["1", "2", "3", "3c", "4"] {
        let from_file = load_problem_config(&problems_dir().join(format!("problem{id}.toml"))).unwrap();
        assert_eq!(from_file, builtin_problem(id).unwrap(), "problem {id}");
    }
}

#[test]
fn builtin_shapes() {
    let p1 = builtin_problem("1").unwrap();
    assert_eq!(p1.bcs.len(), 2);
    assert_eq!((p1.bcs[0].value, p1.bcs[1].value), (-1.0, 0.0));
    let p3 = builtin_problem("3").unwrap();
    let conds: Vec<(u32, f64)> = p3.bcs.iter().map(|b| (b.derivative_order, b.value)).collect();
    assert_eq!(conds, vec![(0, 0.0), (1, 0.0), (0, 1.0), (1, 1.0)]);
    let p4 = builtin_problem("4").unwrap();
    assert_eq!(p4.terms.len(), 4);
    let orders: Vec<f64> = p4.terms.iter().map(|t| t.order).collect();
    assert_eq!(orders, vec![2.0, 1.2, 1.0 / 6.0, 1.0]);
    assert!(matches!(builtin_problem("5"), Err(HarnessError::UnknownProblem(_))));
}

const MINIMAL: &str = r#"
rhs = "0"

[domain]
a = 0
b = 1

[[term]]
coefficient = "1"
order = 1.5

[[bc]]
location = "left"
order = 0
value = 0

[[bc]]
location = "right"
order = 0
value = 1
"#;

#[test]
fn config_errors_name_field_and_line() {
    assert!(parse_problem_config(MINIMAL, "ok.toml").is_ok());

    let missing = MINIMAL.replace("rhs = \"0\"", "");
    let err = parse_problem_config(&missing, "m.toml").unwrap_err().to_string();
    assert!(err.contains("rhs"), "{err}");

    let one_bc = MINIMAL.split("[[bc]]").take(2).collect::<Vec<_>>().join("[[bc]]");
    let err = parse_problem_config(&one_bc, "bc.toml").unwrap_err().to_string();
    assert!(err.contains("boundary conditions"), "{err}");

    let bad_expr = MINIMAL.replace("coefficient = \"1\"", "coefficient = \"1 +\"");
    match parse_problem_config(&bad_expr, "e.toml").unwrap_err() {
        HarnessError::Config { line, message, .. } => {
            assert_eq!(line, Some(9));
            assert!(message.contains("term.coefficient"));
        }
        other => panic!("{other}"),
    }

    let bad_side = MINIMAL.replace("\"left\"", "\"middle\"");
    assert!(parse_problem_config(&bad_side, "s.toml").unwrap_err().to_string().contains("bc.location"));
    assert!(parse_problem_config("rhs = ", "syntax.toml").unwrap_err().to_string().starts_with("syntax.toml:1"));
}

fn small_config(out: Option<&Path>) -> RunConfig {
    RunConfig {
        entries: vec![MatrixEntry {
            problem: builtin_problem("4").unwrap(),
            methods: vec![Method::GalerkinWeak, Method::Collocation],
            families: BasisFamily::all().to_vec(),
            counts: vec![3],
            bc_modes: vec![DerivativeBcMode::Constrain],
        }],
        quad: QuadConfig::default(),
        newton: NewtonConfig::default(),
        out: out.map(Path::to_path_buf),
        formats: vec![Format::Csv, Format::Markdown, Format::PlotData],
        jobs: Some(2),
    }
}

#[test]
fn empty_axes_are_rejected() {
    let mut cfg = small_config(None);
    cfg.entries[0].methods.clear();
    assert!(matches!(run_matrix(&cfg), Err(HarnessError::InvalidRun(_))));
    cfg.entries.clear();
    assert!(matches!(run_matrix(&cfg), Err(HarnessError::InvalidRun(_))));
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn artifacts_layout_and_idempotence() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let sa = run_matrix(&small_config(Some(a.path()))).unwrap();
    run_matrix(&small_config(Some(b.path()))).unwrap();
    assert_eq!(sa.errored(), 0);
    let ta = read_tree(a.path());
    assert_eq!(ta, read_tree(b.path()));
    let names: Vec<&str> = ta.iter().map(|(n, _)| n.as_str()).collect();
    for expected in [
        "index.md",
        "problem4/galerkin-weak-legendre-n3.csv",
        "problem4/galerkin-weak-legendre-n3.md",
        "problem4/galerkin-weak-legendre-n3.dat",
        "problem4/collocation-bernoulli-n3.csv",
        "problem4/table.csv",
        "problem4/diagnostics.md",
    ] {
        assert!(names.contains(&expected), "missing {expected} in {names:?}");
    }
    let table = String::from_utf8(fs::read(a.path().join("problem4/table.csv")).unwrap()).unwrap();
    assert!(table.starts_with("x,exact,gwr_weak_legendre,gwr_weak_bernoulli,col_legendre,col_bernoulli\r\n"));
}

#[test]
fn paper_preset_shape() {
    let preset = paper_preset().unwrap();
    let names: Vec<&str> = preset.iter().map(|e| e.problem.name.as_str()).collect();
    assert_eq!(names, ["problem1", "problem2", "problem3", "problem3c", "problem4"]);
    let counts: Vec<usize> = preset.iter().map(|e| e.counts[0]).collect();
    assert_eq!(counts, [3, 3, 5, 5, 3]);
    for e in &preset {
        assert_eq!(e.methods.len(), 3);
        assert_eq!(e.families.len(), 2);
        let want = if e.problem.name == "problem4" { Method::GalerkinWeak } else { Method::Galerkin };
        assert_eq!(e.methods[0], want);
    }
    assert_eq!(preset[1].bc_modes.len(), 2);
}

#[test]
fn table_emission() {
    let p1 = builtin_problem("1").unwrap();
    let opts = SolveOptions::default();
    let sols: Vec<_> = [Method::Galerkin, Method::LeastSquares, Method::Collocation]
        .into_iter()
        .map(|m| solve(&p1, m, BasisFamily::ModifiedLegendre, 3, &opts).unwrap())
        .collect();
    let labels = ["gwr_legendre", "ls_legendre", "col_legendre"];
    let cols: Vec<(String, &fracwrm::poly::Polynomial)> =
        labels.iter().zip(&sols).map(|(l, s)| (l.to_string(), &s.approx)).collect();
    let rule = QuadConfig::default().build(0.0, 1.0).unwrap();
    let table = error_table(&cols, p1.exact.as_ref().unwrap(), &rule).unwrap();

    // the lift interpolates u(0) = -1 exactly
    assert!(table.columns.iter().all(|c| c.errors[0] == 0.0));
    for c in &table.columns {
        assert_eq!(c.linf, c.errors.iter().copied().fold(0.0, f64::max));
    }

    let mut csv = Vec::new();
    emit(&table, Format::Csv, &mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    let mut lines = csv.split("\r\n");
    assert_eq!(lines.next(), Some("x,exact,gwr_legendre,ls_legendre,col_legendre"));
    for (i, line) in lines.filter(|l| !l.is_empty()).enumerate() {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(v[0].to_bits(), table.points[i].to_bits());
        assert_eq!(v[1].to_bits(), table.exact[i].to_bits());
        for (k, c) in table.columns.iter().enumerate() {
            assert_eq!(v[2 + k].to_bits(), c.errors[i].to_bits());
        }
    }

    let mut plot = Vec::new();
    emit(&table, Format::PlotData, &mut plot).unwrap();
    let plot = String::from_utf8(plot).unwrap();
    assert_eq!(plot.split("\n\n").count(), 3);

    let mut md = Vec::new();
    emit(&table, Format::Markdown, &mut md).unwrap();
    let md = String::from_utf8(md).unwrap();
    assert!(md.lines().next().unwrap().contains("gwr_legendre"));
    assert!(md.contains("×10^-"));

    let single = error_table(&cols[..1], p1.exact.as_ref().unwrap(), &rule).unwrap();
    let mut csv = Vec::new();
    emit(&single, Format::Csv, &mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().next().unwrap().split(',').count(), 3);
}
