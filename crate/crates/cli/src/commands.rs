use std::path::Path;

use markov2::analysis::{diagnose, ConditionReport, Irreducibility, MAX_EXACT_IRREDUCIBILITY_DIM};
use markov2::format::{CsvTable, TensorFile, TraceFile};
use markov2::generator::{fixture, random_positive, random_simplex, Fixture, RandomTensorSpec};
use markov2::solvers::{
    markov_process, markov_x_bound, power_contraction_bound, power_method, reference_solution, run_seed, solve_2x2x2,
    Quadratic222, Solution, SolveOptions,
};
use markov2::{Error, SimplexVector, TransitionTensor};
use rayon::prelude::*;

use crate::output::{self, command_line, output_path, prepare_parent, run_path, short, significant, Failure};
use crate::{Command, DiagnoseArgs, FigureArgs, GenerateArgs, MethodArg, SolveArgs, ValidateArgs};

const ORACLE_NOTE: &str = "oracle power method run from the barycenter to residual 1e-13";

pub fn run(command: &Command) -> Result<(), Failure> {
    match command {
        Command::Validate(a) => validate(a),
        Command::Diagnose(a) => diagnose_cmd(a),
        Command::Solve(a) => solve(a),
        Command::Generate(a) => generate(a),
        Command::Figure(a) => figure(a),
    }
}

struct Loaded {
    tensor: TransitionTensor,
    label: String,
    tolerance: f64,
}

fn read_file(path: &Path) -> Result<TensorFile, Failure> {
    TensorFile::read(path).map_err(|e| match e {
        Error::Io(io) => Failure::usage(format!("cannot read {}: {io}", path.display())),
        other => Failure::from(other),
    })
}

fn load(path: &Path, tol: Option<f64>) -> Result<Loaded, Failure> {
    let file = read_file(path)?;
    let tolerance = tol.unwrap_or(file.tolerance);
    let tensor = file.to_tensor(Some(tolerance))?;
    let label = file.name.clone().unwrap_or_else(|| path.display().to_string());
    Ok(Loaded {
        tensor,
        label,
        tolerance,
    })
}

fn validate(a: &ValidateArgs) -> Result<(), Failure> {
    let Loaded {
        tensor: p,
        label,
        tolerance,
    } = load(&a.path, a.tol)?;
    let n = p.dim();
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            let sum: f64 = p.fiber(j, k).iter().sum();
            worst = worst.max((sum - 1.0).abs());
            if !a.quiet {
                println!(
                    "fiber ({},{}): sum = {} (deviation {:.1e})",
                    j + 1,
                    k + 1,
                    significant(sum, 12),
                    (sum - 1.0).abs()
                );
            }
        }
    }
    println!(
        "valid: {label}, n = {n}, {} fibers within {tolerance:e} (max deviation {worst:.1e}), min entry {}",
        n * n,
        short(p.min_entry())
    );
    Ok(())
}

fn delta_line(r: &ConditionReport) -> String {
    match r.contraction {
        Some(c) => format!(
            "delta-condition: HOLDS (delta={} > {}), contraction={}",
            short(r.delta),
            short(r.threshold),
            short(c)
        ),
        None => format!(
            "delta-condition: FAILS (delta={} <= {})",
            short(r.delta),
            short(r.threshold)
        ),
    }
}

fn diagnose_cmd(a: &DiagnoseArgs) -> Result<(), Failure> {
    let loaded = load(&a.path, a.tol)?;
    let r = diagnose(&loaded.tensor, a.samples, a.seed)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
    } else {
        let excluded = r.samples.iter().filter(|s| s.eigen_one_excluded).count();
        let pointwise = r.samples.iter().filter(|s| s.pointwise_margin > 0.0).count();
        println!("tensor: {} (n = {})", loaded.label, r.n);
        println!("delta (min entry): {}", r.delta);
        println!("1/(2n): {}", r.threshold);
        println!("{}", delta_line(&r));
        println!("positive: {}", if r.is_positive { "yes" } else { "no" });
        println!(
            "irreducible: {}",
            match r.irreducibility {
                Irreducibility::Irreducible => "yes".to_string(),
                Irreducibility::Reducible => "no".to_string(),
                Irreducibility::UnknownCapped =>
                    format!("unknown (zero entries and n > {})", MAX_EXACT_IRREDUCIBILITY_DIM),
            }
        );
        println!(
            "eigenvalue 1 of the Jacobian: excluded at {excluded} of {} sampled points, min sigma_min(J - I) = {:.3e}",
            r.samples.len(),
            r.min_eigen_one_margin
        );
        println!(
            "pointwise condition: holds at {pointwise} of {} sampled points",
            r.samples.len()
        );
    }
    if a.require_delta && !r.delta_condition_holds {
        return Err(Failure {
            code: output::EXIT_HYPOTHESIS,
            message: delta_line(&r),
        });
    }
    Ok(())
}

enum Start {
    Random,
    Uniform,
    Map,
    File(SimplexVector),
}

fn parse_start(spec: &str, n: usize, allow_map: bool) -> Result<Start, Failure> {
    match spec {
        "random" => Ok(Start::Random),
        "uniform" => Ok(Start::Uniform),
        "map" if allow_map => Ok(Start::Map),
        "map" => Err(Failure::usage("`map` is only valid for --x1")),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {path}: {e}")))?;
            let v: Vec<f64> = serde_json::from_str(&text)
                .map_err(|e| Failure::from(Error::Parse(format!("{path}: expected a JSON array of numbers: {e}"))))?;
            if v.len() != n {
                return Err(Failure::usage(format!(
                    "{path} has {} entries, the tensor has n = {n}",
                    v.len()
                )));
            }
            Ok(Start::File(SimplexVector::new(v)?))
        }
    }
}

fn start_vector(start: &Start, n: usize, seed: u64) -> SimplexVector {
    match start {
        Start::Random => random_simplex(n, seed),
        Start::Uniform => SimplexVector::uniform(n),
        Start::File(v) => v.clone(),
        Start::Map => unreachable!("resolved by the caller"),
    }
}

struct RunOutcome {
    seed: u64,
    solution: Solution,
    converged: bool,
}

fn solve(a: &SolveArgs) -> Result<(), Failure> {
    if a.runs == 0 {
        return Err(Failure::usage("--runs must be at least 1"));
    }
    let Loaded { tensor: p, label, .. } = load(&a.path, a.file_tol)?;
    let n = p.dim();
    if a.method == MethodArg::Quadratic {
        return solve_quadratic(&p, a);
    }
    let x0 = parse_start(&a.x0, n, false)?;
    let x1 = parse_start(&a.x1, n, true)?;
    let reference = if a.oracle { Some(reference_solution(&p)?) } else { None };
    let opts = SolveOptions {
        tolerance: a.tol,
        max_iterations: a.max_iter,
        record_trace: a.trace.is_some(),
        reference,
    };

    let outcomes: Vec<RunOutcome> = (0..a.runs)
        .into_par_iter()
        .map(|r| {
            let seed = run_seed(a.seed, r);
            let start0 = start_vector(&x0, n, seed);
            let result = match a.method {
                MethodArg::Power => power_method(&p, &start0, &opts),
                _ => {
                    let start1 = match &x1 {
                        Start::Map => p.f_p(&start0)?,
                        // A different stream from x^(0).
                        other => start_vector(other, n, !seed),
                    };
                    markov_process(&p, &start0, &start1, &opts)
                }
            };
            match result {
                Ok(solution) => Ok(RunOutcome {
                    seed,
                    solution,
                    converged: true,
                }),
                Err(Error::MaxIterationsExceeded { partial, .. }) => Ok(RunOutcome {
                    seed,
                    solution: *partial,
                    converged: false,
                }),
                Err(e) => Err(Failure::from(e)),
            }
        })
        .collect::<Result<_, _>>()?;

    if let Some(trace) = &a.trace {
        let base = output_path(Some(trace), "trace.csv");
        prepare_parent(&base)?;
        for (r, o) in outcomes.iter().enumerate() {
            let path = if a.runs > 1 { run_path(&base, r) } else { base.clone() };
            let mut meta = vec![
                ("tensor".to_string(), label.clone()),
                ("n".to_string(), n.to_string()),
                ("delta".to_string(), p.min_entry().to_string()),
                ("seed".to_string(), o.seed.to_string()),
                ("run".to_string(), r.to_string()),
                ("tolerance".to_string(), a.tol.to_string()),
                ("x0".to_string(), a.x0.clone()),
            ];
            if a.method == MethodArg::Markov {
                meta.push(("x1".into(), a.x1.clone()));
            }
            let reference = if a.oracle { ORACLE_NOTE } else { "none" };
            meta.push(("reference".into(), reference.into()));
            meta.push(("command".into(), command_line()));
            TraceFile::from_trace(&o.solution.trace, meta)
                .write(&path)
                .map_err(Failure::from)?;
        }
    }

    let first = &outcomes[0].solution;
    if a.runs == 1 {
        println!("x* = {}", output::vector(first.x.as_slice()));
        println!("iterations: {}", first.trace.iterations_used);
    } else {
        for (r, o) in outcomes.iter().enumerate() {
            println!(
                "run {r}: seed {}, iterations {}{}",
                o.seed,
                o.solution.trace.iterations_used,
                if o.converged { "" } else { " (not converged)" }
            );
        }
        let mean = outcomes
            .iter()
            .map(|o| o.solution.trace.iterations_used as f64)
            .sum::<f64>()
            / a.runs as f64;
        println!("x* (run 0) = {}", output::vector(first.x.as_slice()));
        println!("mean iterations: {mean}");
    }
    let residual = p.f_p(&first.x)?.l1_distance(&first.x);
    println!("fixed-point residual: {residual:.3e}");

    let failed = outcomes.iter().filter(|o| !o.converged).count();
    if failed > 0 {
        return Err(Failure {
            code: output::EXIT_NO_CONVERGENCE,
            message: format!(
                "{failed} of {} runs did not converge within {} iterations",
                a.runs, a.max_iter
            ),
        });
    }
    Ok(())
}

fn solve_quadratic(p: &TransitionTensor, a: &SolveArgs) -> Result<(), Failure> {
    if p.dim() != 2 {
        return Err(Failure::usage(format!(
            "--method quadratic needs n = 2, the tensor has n = {}",
            p.dim()
        )));
    }
    if a.trace.is_some() || a.runs > 1 {
        return Err(Failure::usage("--trace and --runs need an iterative method"));
    }
    let sol = solve_2x2x2(&Quadratic222::from_tensor(p)?)?;
    let (qa, qb, qc) = sol.coefficients;
    println!("x* = {}", output::vector(sol.x.as_slice()));
    println!("equation: {qa} s^2 + {qb} s + {qc} = 0");
    if let Some(d) = sol.discriminant {
        println!("discriminant: {d}");
    }
    println!("kind: {:?}", sol.kind);
    if !sol.boundary_roots.is_empty() {
        println!("boundary roots: {:?}", sol.boundary_roots);
    }
    println!("fixed-point residual: {:.3e}", p.f_p(&sol.x)?.l1_distance(&sol.x));
    Ok(())
}

fn generate(a: &GenerateArgs) -> Result<(), Failure> {
    let spec = match a.delta {
        Some(d) => RandomTensorSpec::with_delta(a.n, d, a.seed),
        None => RandomTensorSpec::new(a.n, a.seed),
    };
    let p = random_positive(&spec)?;
    let name = format!("random_n{}_seed{}", a.n, a.seed);
    let source = format!("random positive tensor, delta = {}, seed = {}", spec.delta, a.seed);
    let path = output_path(a.output.as_deref(), &format!("{name}.json"));
    prepare_parent(&path)?;
    TensorFile::from_tensor(&p, Some(&name), Some(&source)).write(&path)?;
    println!("wrote {} (n = {}, min entry {})", path.display(), a.n, p.min_entry());
    Ok(())
}

fn figure(a: &FigureArgs) -> Result<(), Failure> {
    let path = output_path(a.output.as_deref(), &format!("figure{}.csv", a.which));
    prepare_parent(&path)?;
    match a.which {
        1 | 2 => figure_fixture(a, &path),
        _ => figure_random(a, &path),
    }
}

fn figure_fixture(a: &FigureArgs, path: &Path) -> Result<(), Failure> {
    let (p, label) = match &a.path {
        Some(file) => {
            let l = load(file, None)?;
            (l.tensor, l.label)
        }
        None => (fixture(Fixture::DnaI), Fixture::DnaI.name().to_string()),
    };
    let rate = power_contraction_bound(&p)?;
    let reference = reference_solution(&p)?;
    let opts = SolveOptions::default().traced(Some(reference));
    let x0 = random_simplex(p.dim(), a.seed);
    let sol = if a.which == 1 {
        power_method(&p, &x0, &opts)?
    } else {
        markov_process(&p, &x0, &p.f_p(&x0)?, &opts)?
    };
    let meta = vec![
        ("figure".to_string(), a.which.to_string()),
        ("tensor".to_string(), label),
        ("n".to_string(), p.dim().to_string()),
        ("delta".to_string(), p.min_entry().to_string()),
        ("rate".to_string(), rate.to_string()),
        ("seed".to_string(), a.seed.to_string()),
        ("tolerance".to_string(), opts.tolerance.to_string()),
        ("reference".to_string(), ORACLE_NOTE.to_string()),
        ("command".to_string(), command_line()),
    ];
    TraceFile::from_trace(&sol.trace, meta).write(path)?;
    let last = sol.trace.steps.last().and_then(|s| s.error).unwrap_or(f64::NAN);
    println!(
        "wrote {} ({} rows, rate {}, final error {last:.3e})",
        path.display(),
        sol.trace.steps.len(),
        short(rate)
    );
    Ok(())
}

fn figure_random(a: &FigureArgs, path: &Path) -> Result<(), Failure> {
    if a.count == 0 {
        return Err(Failure::usage("--count must be at least 1"));
    }
    let spec_delta = markov2::generator::default_delta(a.n);
    let rate = 2.0 - 2.0 * a.n as f64 * spec_delta;
    let runs: Vec<Solution> = (0..a.count)
        .into_par_iter()
        .map(|t| {
            let seed = run_seed(a.seed, t);
            let p = random_positive(&RandomTensorSpec::new(a.n, seed))?;
            let opts = SolveOptions::default().traced(Some(reference_solution(&p)?));
            let x0 = random_simplex(a.n, seed);
            markov_process(&p, &x0, &p.f_p(&x0)?, &opts)
        })
        .collect::<Result<_, _>>()?;
    // The latest origin gives the bound every run satisfies.
    let s0 = runs.iter().filter_map(|s| s.trace.bound_origin).max().unwrap_or(2);
    let k_max = runs.iter().map(|s| s.trace.iterations_used).max().unwrap_or(2);
    let mut columns = vec!["k".to_string()];
    columns.extend((0..a.count).map(|t| format!("error_l1_run{t}")));
    columns.push("bound".into());
    let rows = (2..=k_max)
        .map(|k| {
            let mut row = vec![Some(k as f64)];
            row.extend(
                runs.iter()
                    .map(|s| s.trace.steps.iter().find(|st| st.k == k).and_then(|st| st.error)),
            );
            row.push((k + 1 >= s0).then(|| markov_x_bound(rate, k + 1 - s0)));
            row
        })
        .collect();
    let table = CsvTable {
        metadata: vec![
            ("figure".into(), "3".into()),
            ("method".into(), "markov".into()),
            ("n".into(), a.n.to_string()),
            ("delta".into(), spec_delta.to_string()),
            ("rate".into(), rate.to_string()),
            ("seed".into(), a.seed.to_string()),
            (
                "tensors".into(),
                format!("run t uses seed {} + t for the tensor and for x0", a.seed),
            ),
            ("bound_origin".into(), s0.to_string()),
            ("reference".into(), ORACLE_NOTE.into()),
            ("command".into(), command_line()),
        ],
        columns,
        rows,
    };
    table.write(path)?;
    println!(
        "wrote {} ({} tensors, n = {}, rate {})",
        path.display(),
        a.count,
        a.n,
        short(rate)
    );
    Ok(())
}
