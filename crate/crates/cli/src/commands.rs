use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use stcvrp::exact::{self, MilpCounts};
use stcvrp::ga::{self, convergence_csv};
use stcvrp::instances::{self, GeneratorSpec};
use stcvrp::model::ScheduleDocument;
use stcvrp::{read_instance, validate_schedule, write_instance, GaConfig, Instance, Solution};

use crate::output::{
    read_json, read_text, to_json, write_json, write_text, CliError, CliResult, Manifest, EXIT_VIOLATION,
};
use crate::{BruteArgs, EvaluateArgs, ExportArgs, GenerateArgs, SolveArgs, ValidateArgs};

fn load_instance(path: &Path) -> CliResult<Instance> {
    Ok(read_instance(&read_text(path)?)?)
}

pub fn generate(a: GenerateArgs) -> CliResult<ExitCode> {
    let started = Instant::now();
    let mut spec = GeneratorSpec::new(a.pattern, a.n.unwrap_or(0), a.k, a.dmax, a.seed);
    spec.noise_sigma = a.sigma;
    spec.target_avg_nn = a.target;

    let (inst, text) = match &a.import {
        Some(src) => {
            let imported = instances::import_coordinates(&read_text(src)?)?;
            let inst = instances::instance_from_import(&imported, &spec)?;
            let source = src.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            let comments = vec![
                format!("imported from {source}"),
                format!("target_avg_nn={}", spec.target_avg_nn),
            ];
            let text = write_instance(&inst, &comments);
            (inst, text)
        }
        None => {
            if a.n.is_none() {
                return Err(CliError::Usage("--n is required unless --import is given".into()));
            }
            instances::generate_file(&spec)?
        }
    };

    let path = a.out.join(format!("{}.stcvrp", inst.name()));
    write_text(&path, &text)?;
    let mut manifest = Manifest::new("generate", None);
    manifest.seeds = vec![a.seed];
    manifest.config = serde_json::to_value(&spec).expect("serializable spec");
    manifest.outputs = vec![path.display().to_string()];
    manifest.write_beside(&path, started)?;
    println!("{}", path.display());
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct RunRecord {
    seed: u64,
    best_makespan: f64,
    initial_best: f64,
    /// total waiting time of the best schedule
    total_wait: f64,
    generations: usize,
    evaluations: u64,
    elapsed_s: f64,
    routes: Solution,
}

#[derive(Debug, Serialize)]
struct Aggregate {
    runs: usize,
    best: f64,
    worst: f64,
    mean: f64,
    /// sample standard deviation, zero for a single run
    std: f64,
    t_avg: f64,
    /// total waiting time of the best run
    #[serde(rename = "T_W")]
    t_w: f64,
}

#[derive(Debug, Serialize)]
struct SolveReport {
    instance: String,
    config: GaConfig,
    runs: Vec<RunRecord>,
    aggregate: Aggregate,
}

fn aggregate(runs: &[RunRecord]) -> Aggregate {
    let n = runs.len() as f64;
    let values: Vec<f64> = runs.iter().map(|r| r.best_makespan).collect();
    let mean = values.iter().sum::<f64>() / n;
    let std = if runs.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    // first run wins ties so the choice does not depend on scheduling
    let best_run = runs
        .iter()
        .min_by(|a, b| a.best_makespan.total_cmp(&b.best_makespan))
        .expect("at least one run");
    Aggregate {
        runs: runs.len(),
        best: best_run.best_makespan,
        worst: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean,
        std,
        t_avg: runs.iter().map(|r| r.elapsed_s).sum::<f64>() / n,
        t_w: best_run.total_wait,
    }
}

pub fn solve(a: SolveArgs) -> CliResult<ExitCode> {
    let started = Instant::now();
    let inst = load_instance(&a.instance)?;
    if a.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    let mut config = GaConfig::for_instance(&inst).with_seed(a.seed);
    macro_rules! apply {
        ($($flag:ident => $field:ident),*) => {$(
            if let Some(v) = a.$flag { config.$field = v; }
        )*};
    }
    apply!(
        population => population_size,
        crossover_rate => crossover_rate,
        mutation_rate => mutation_rate,
        elite => elite_count,
        tournament => tournament_size,
        stagnation => stagnation_limit,
        max_generations => max_generations,
        mutation_mix => mutation_mix
    );
    config.validate()?;

    let seeds: Vec<u64> = (0..a.runs as u64).map(|r| a.seed.wrapping_add(r)).collect();
    let results = seeds
        .par_iter()
        .map(|&seed| ga::solve(&inst, &config.clone().with_seed(seed)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut runs = Vec::with_capacity(results.len());
    for (&seed, r) in seeds.iter().zip(&results) {
        let schedule = stcvrp::evaluate(&inst, &r.best)?;
        runs.push(RunRecord {
            seed,
            best_makespan: r.best_makespan,
            initial_best: r.initial_best,
            total_wait: schedule.total_wait,
            generations: r.generations,
            evaluations: r.evaluations,
            elapsed_s: r.elapsed_s,
            routes: r.best.clone(),
        });
    }
    let report = SolveReport {
        instance: inst.name().to_string(),
        aggregate: aggregate(&runs),
        config,
        runs,
    };

    if let Some(dir) = &a.out {
        let name = inst.name();
        let result_path = dir.join(format!("{name}.result.json"));
        let mut outputs = vec![result_path.clone()];
        write_json(&result_path, &report)?;
        for (&seed, r) in seeds.iter().zip(&results) {
            let csv = dir.join(format!("{name}.seed{seed}.convergence.csv"));
            write_text(&csv, &convergence_csv(&r.log))?;
            outputs.push(csv);
        }
        let best = report
            .runs
            .iter()
            .find(|r| r.best_makespan == report.aggregate.best)
            .expect("best run exists");
        let best_path = dir.join(format!("{name}.best.json"));
        write_json(&best_path, &best.routes)?;
        outputs.push(best_path);

        let mut manifest = Manifest::new("solve", Some(&a.instance));
        manifest.seeds = seeds;
        manifest.config = serde_json::to_value(&report.config).expect("serializable config");
        manifest.outputs = outputs.iter().map(|p| p.display().to_string()).collect();
        manifest.write_beside(&result_path, started)?;
    }
    print!("{}", to_json(&report));
    Ok(ExitCode::SUCCESS)
}

pub fn evaluate(a: EvaluateArgs) -> CliResult<ExitCode> {
    let started = Instant::now();
    let inst = load_instance(&a.instance)?;
    let solution: Solution = read_json(&a.solution)?;
    let schedule = stcvrp::evaluate(&inst, &solution)?;
    let doc = schedule.to_document(&solution, inst.service_time());
    if let Some(out) = &a.out {
        write_json(out, &doc)?;
        let mut manifest = Manifest::new("evaluate", Some(&a.instance));
        manifest.outputs = vec![out.display().to_string()];
        manifest.write_beside(out, started)?;
    }
    print!("{}", to_json(&doc));
    Ok(ExitCode::SUCCESS)
}

pub fn validate(a: ValidateArgs) -> CliResult<ExitCode> {
    let inst = load_instance(&a.instance)?;
    let solution: Solution = read_json(&a.solution)?;
    let schedule = match &a.schedule {
        Some(path) => read_json::<ScheduleDocument>(path)?.into_schedule(inst.n_tasks())?,
        None => stcvrp::evaluate(&inst, &solution)?,
    };
    let report = validate_schedule(&inst, &solution, &schedule)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for v in &report.violations {
        eprintln!("violation: {v}");
    }
    print!("{}", to_json(&report));
    Ok(if report.is_feasible() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VIOLATION)
    })
}

#[derive(Debug, Serialize)]
struct ExportSummary {
    instance: String,
    big_m: f64,
    n_variables: usize,
    n_constraints: usize,
    counts: CountsView,
}

#[derive(Debug, Serialize)]
struct CountsView {
    variables: std::collections::BTreeMap<String, usize>,
    constraints: std::collections::BTreeMap<String, usize>,
}

impl From<&MilpCounts> for CountsView {
    fn from(c: &MilpCounts) -> Self {
        Self {
            variables: c.variables.clone(),
            constraints: c.constraints.clone(),
        }
    }
}

pub fn export_milp(a: ExportArgs) -> CliResult<ExitCode> {
    let started = Instant::now();
    let inst = load_instance(&a.instance)?;
    let model = exact::build_milp(&inst, a.bigm)?;
    write_text(&a.out, &model.text)?;
    let summary = ExportSummary {
        instance: inst.name().to_string(),
        big_m: model.big_m,
        n_variables: model.counts.n_variables(),
        n_constraints: model.counts.n_constraints(),
        counts: (&model.counts).into(),
    };
    let mut manifest = Manifest::new("export-milp", Some(&a.instance));
    manifest.config = serde_json::json!({ "big_m": model.big_m });
    manifest.outputs = vec![a.out.display().to_string()];
    manifest.write_beside(&a.out, started)?;
    print!("{}", to_json(&summary));
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct BruteReport {
    instance: String,
    makespan: f64,
    total_wait: f64,
    enumerated: u128,
    routes: Solution,
}

pub fn brute_force(a: BruteArgs) -> CliResult<ExitCode> {
    let started = Instant::now();
    let inst = load_instance(&a.instance)?;
    let (solution, makespan) = exact::brute_force(&inst, a.limit)?;
    let report = BruteReport {
        instance: inst.name().to_string(),
        makespan,
        total_wait: stcvrp::evaluate(&inst, &solution)?.total_wait,
        enumerated: exact::enumeration_size(inst.n_tasks(), inst.k_max()).unwrap_or(u128::MAX),
        routes: solution,
    };
    if let Some(out) = &a.out {
        write_json(out, &report)?;
        let mut manifest = Manifest::new("brute-force", Some(&a.instance));
        manifest.config = serde_json::json!({ "limit": a.limit.to_string() });
        manifest.outputs = vec![out.display().to_string()];
        manifest.write_beside(out, started)?;
    }
    print!("{}", to_json(&report));
    Ok(ExitCode::SUCCESS)
}
