use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use mdreduce::docking::{bundled_instance, lga_run, validate_pair, DockResult, EnergySummary, LigandInstance, Scorer};
use mdreduce::io::{derive_rng, read_instance, write_results, ResultRow};
use mdreduce::simblock::{
    estimate_cost, scaling_sweep, simulate_block, BlockConfig, BlockInputs, CostWeights, Reduced,
};
use mdreduce::{AccumMode, Method, SyncStats, Vec4};

use crate::report::{Report, Table};
use crate::{Cli, CliError, Command, DockArgs, InstanceArgs, LgaArgs, ReduceBenchArgs, SweepArgs, ValidateArgs};

type CliResult<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> CliResult<()> {
    let (report, verdict) = match &cli.command {
        Command::ReduceBench(args) => (reduce_bench(cli, args)?, Ok(())),
        Command::Validate(args) => validate(cli, args)?,
        Command::Dock(args) => (dock(cli, args)?, Ok(())),
        Command::Sweep(args) => (sweep(cli, args)?, Ok(())),
    };
    emit(cli, &report.render(cli.format))?;
    verdict
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.output {
        Some(path) => write_file(path, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Input(format!("stdout: {e}"))),
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn base_config(cli: &Cli, command: &str) -> Vec<(String, String)> {
    vec![
        ("command".into(), command.into()),
        ("seed".into(), cli.seed.to_string()),
        ("format".into(), format!("{:?}", cli.format).to_lowercase()),
    ]
}

fn push(config: &mut Vec<(String, String)>, key: &str, value: impl ToString) {
    config.push((key.to_string(), value.to_string()));
}

fn joined<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn stats_cells(s: &SyncStats) -> Vec<String> {
    [
        s.block_syncs,
        s.warp_shuffles,
        s.atomic_adds,
        s.memory_fences,
        s.mma_ops,
        s.shared_mem_bytes,
        s.precision_conversions,
    ]
    .iter()
    .map(u64::to_string)
    .collect()
}

const STATS_COLUMNS: [&str; 7] = [
    "block_syncs",
    "warp_shuffles",
    "atomic_adds",
    "memory_fences",
    "mma_ops",
    "shared_mem_bytes",
    "precision_conversions",
];

fn reduce_bench(cli: &Cli, args: &ReduceBenchArgs) -> CliResult<Report> {
    let accum: AccumMode = args.accum.into();
    let methods: Vec<Method> = args.methods.iter().map(|&m| m.into()).collect();
    // Reject every bad size before doing any work.
    for &size in &args.sizes {
        for &method in &methods {
            BlockConfig::new(size, method, accum)?;
        }
    }

    let mut config = base_config(cli, "reduce-bench");
    push(&mut config, "sizes", joined(&args.sizes));
    push(&mut config, "methods", joined(&methods));
    push(&mut config, "accum_mode", accum);
    push(&mut config, "dims", args.dims);
    push(&mut config, "trials", args.trials);
    push(&mut config, "cost_weights", format!("{:?}", CostWeights::default()));
    let mut report = Report::new("reduce-bench", config);

    let mut columns = vec![
        "threads",
        "method",
        "accum_mode",
        "dims",
        "trials",
        "wall_us_mean_emulated",
    ];
    columns.extend(STATS_COLUMNS);
    columns.extend(["cost", "max_abs_error"]);
    let mut table = Table::new("reductions", &columns);

    let weights = CostWeights::default();
    for &size in &args.sizes {
        for &method in &methods {
            let cfg = BlockConfig::new(size, method, accum)?;
            let mut rng = derive_rng(cli.seed, &format!("reduce-bench/{size}/{}", args.dims));
            let mut elapsed = 0.0f64;
            let mut stats = SyncStats::default();
            let mut max_err = 0.0f64;
            for _ in 0..args.trials {
                let rows: Vec<Vec<f32>> = (0..size)
                    .map(|_| (0..args.dims).map(|_| rng.uniform(-1.0, 1.0) as f32).collect())
                    .collect();
                let inputs = if args.dims == 4 {
                    BlockInputs::Vec4(rows.iter().map(|r| Vec4::new(r[0], r[1], r[2], r[3])).collect())
                } else {
                    BlockInputs::Seven(rows.iter().map(|r| std::array::from_fn(|c| r[c])).collect())
                };
                let start = Instant::now();
                let (out, s) = simulate_block(&cfg, &inputs)?;
                elapsed += start.elapsed().as_secs_f64();
                stats = s;
                let got: Vec<f32> = match out {
                    Reduced::Vec4(v) => v.to_array().to_vec(),
                    Reduced::Seven(a) => a.to_vec(),
                };
                for (c, g) in got.iter().enumerate() {
                    let exact: f64 = rows.iter().map(|r| r[c] as f64).sum();
                    max_err = max_err.max((*g as f64 - exact).abs());
                }
            }
            let mut row = vec![
                size.to_string(),
                method.to_string(),
                accum.to_string(),
                args.dims.to_string(),
                args.trials.to_string(),
                format!("{:.3}", 1e6 * elapsed / args.trials as f64),
            ];
            row.extend(stats_cells(&stats));
            row.push(format!("{}", estimate_cost(&stats, &weights)));
            row.push(format!("{max_err:.3e}"));
            table.push(row);
        }
    }
    report.tables.push(table);
    report.note(
        "note",
        "wall times are the emulator's own runtime on this host, not device measurements",
    );
    Ok(report)
}

fn load_instance(source: &InstanceArgs) -> CliResult<(String, LigandInstance)> {
    match (&source.instance, &source.bundled) {
        (Some(path), _) => {
            let inst = read_instance(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Ok((path.display().to_string(), inst))
        }
        (None, Some(name)) => {
            let inst = bundled_instance(name).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok((name.clone(), inst))
        }
        (None, None) => Err(CliError::Usage("one of --instance or --bundled is required".into())),
    }
}

fn push_lga(config: &mut Vec<(String, String)>, lga: &LgaArgs) {
    let s = lga.settings();
    push(config, "population", s.population_size);
    push(config, "generations", s.max_generations);
    push(config, "max_evaluations", s.max_evaluations);
    push(config, "ls_fraction", s.ls_fraction);
    push(config, "crossover_rate", s.crossover_rate);
    push(config, "mutation_rate", s.mutation_rate);
    push(config, "mutation_sigma_translation", s.mutation_sigma_translation);
    push(config, "mutation_sigma_angle", s.mutation_sigma_angle);
    push(config, "box_margin", s.box_margin);
    push(config, "ls_max_iters", s.local_search.max_iters);
    push(config, "ls_convergence_tol", s.local_search.convergence_tol);
    push(config, "ls_window", s.local_search.window);
    push(config, "adadelta_rho", s.local_search.rho);
    push(config, "adadelta_epsilon", s.local_search.epsilon);
}

fn summary_row(path: &str, method: Method, accum: AccumMode, s: &EnergySummary) -> Vec<String> {
    let mut row = vec![path.to_string(), method.to_string(), accum.to_string()];
    row.extend(
        [s.min, s.q1, s.median, s.q3, s.max, s.mean]
            .iter()
            .map(|v| format!("{v:.6}")),
    );
    row.push(format!("{:.4}", s.nonconverged_fraction));
    row.push(format!("{:.1}", s.mean_evaluations));
    row
}

fn result_row(instance: &str, method: Method, accum: AccumMode, r: &DockResult) -> ResultRow {
    ResultRow {
        seed: r.runs[0].seed,
        method,
        accum_mode: accum,
        instance: instance.to_string(),
        best_energy: r.best_energy,
        evaluations: r.evaluations,
        converged: r.converged,
        block_syncs: r.stats.block_syncs,
        atomic_adds: r.stats.atomic_adds,
        mma_ops: r.stats.mma_ops,
    }
}

fn validate(cli: &Cli, args: &ValidateArgs) -> CliResult<(Report, CliResult<()>)> {
    if !(args.threshold.is_finite() && args.threshold >= 0.0) {
        return Err(CliError::Usage(format!(
            "--threshold must be finite and >= 0, got {}",
            args.threshold
        )));
    }
    let (name, inst) = load_instance(&args.source)?;
    let (method, accum): (Method, AccumMode) = (args.method.into(), args.accum.into());
    let (ref_method, ref_accum): (Method, AccumMode) = (args.ref_method.into(), args.ref_accum.into());
    let candidate = Scorer::Block(BlockConfig::new(args.threads, method, accum)?);
    let reference = Scorer::Block(BlockConfig::new(args.threads, ref_method, ref_accum)?);
    let settings = args.lga.settings();

    let mut config = base_config(cli, "validate");
    push(&mut config, "instance", &name);
    push(&mut config, "runs", args.runs);
    push(&mut config, "threshold", args.threshold);
    push(&mut config, "threads", args.threads);
    push(&mut config, "reference", format!("{ref_method}/{ref_accum}"));
    push(&mut config, "candidate", format!("{method}/{accum}"));
    push_lga(&mut config, &args.lga);
    let mut report = Report::new("validate", config);

    let start = Instant::now();
    let r = validate_pair(&inst, args.runs as usize, cli.seed, &settings, &reference, &candidate)?;
    let wall = start.elapsed().as_secs_f64();

    let mut table = Table::new(
        "best energy distribution",
        &[
            "path",
            "method",
            "accum_mode",
            "min",
            "q1",
            "median",
            "q3",
            "max",
            "mean",
            "nonconverged_fraction",
            "mean_evaluations",
        ],
    );
    table.push(summary_row("reference", ref_method, ref_accum, &r.reference));
    table.push(summary_row("candidate", method, accum, &r.candidate));
    report.tables.push(table);

    let pass = r.relative_error < args.threshold;
    report.note("abs_diff_of_means", format!("{:.6}", r.abs_diff_of_means));
    report.note("mean_paired_abs_diff", format!("{:.6}", r.mean_paired_abs_diff));
    report.note("relative_error", format!("{:.6}", r.relative_error));
    report.note("relative_error_percent", format!("{:.4}", 100.0 * r.relative_error));
    report.note("threshold", args.threshold);
    report.note("verdict", if pass { "pass" } else { "fail" });
    report.note("wall_s_emulated", format!("{wall:.3}"));

    if let Some(path) = &args.runs_csv {
        let mut rows: Vec<ResultRow> = Vec::with_capacity(2 * r.n_runs);
        for (a, b) in r.reference_runs.iter().zip(&r.candidate_runs) {
            rows.push(result_row(&name, ref_method, ref_accum, a));
            rows.push(result_row(&name, method, accum, b));
        }
        write_file(path, &write_results(&rows)?)?;
    }

    let verdict = if pass {
        Ok(())
    } else {
        Err(CliError::Threshold {
            error: r.relative_error,
            threshold: args.threshold,
        })
    };
    Ok((report, verdict))
}

fn dock(cli: &Cli, args: &DockArgs) -> CliResult<Report> {
    let (name, inst) = load_instance(&args.source)?;
    let (method, accum): (Method, AccumMode) = (args.method.into(), args.accum.into());
    let scorer = Scorer::Block(BlockConfig::new(args.threads, method, accum)?);

    let mut config = base_config(cli, "dock");
    push(&mut config, "instance", &name);
    push(&mut config, "method", method);
    push(&mut config, "accum_mode", accum);
    push(&mut config, "threads", args.threads);
    push_lga(&mut config, &args.lga);
    let mut report = Report::new("dock", config);

    let start = Instant::now();
    let r = lga_run(&inst, &args.lga.settings(), &scorer, cli.seed)?;
    let wall = start.elapsed().as_secs_f64();

    let row = result_row(&name, method, accum, &r);
    let mut table = Table::new(
        "run",
        &[
            "seed",
            "method",
            "accum_mode",
            "instance",
            "best_energy",
            "evaluations",
            "converged",
            "generations",
            "ls_calls",
            "ls_nonconverged",
            "block_syncs",
            "warp_shuffles",
            "atomic_adds",
            "memory_fences",
            "mma_ops",
            "wall_s_emulated",
        ],
    );
    table.push(vec![
        row.seed.to_string(),
        method.to_string(),
        accum.to_string(),
        name.clone(),
        format!("{}", r.best_energy),
        r.evaluations.to_string(),
        r.converged.to_string(),
        r.generations.to_string(),
        r.ls_calls.to_string(),
        r.ls_nonconverged.to_string(),
        r.stats.block_syncs.to_string(),
        r.stats.warp_shuffles.to_string(),
        r.stats.atomic_adds.to_string(),
        r.stats.memory_fences.to_string(),
        r.stats.mma_ops.to_string(),
        format!("{wall:.3}"),
    ]);
    report.tables.push(table);

    report.note("best_energy", r.best_energy);
    report.note("evaluations", r.evaluations);
    report.note("converged", r.converged);
    report.note("wall_s_emulated", format!("{wall:.3}"));
    report.note("best_genotype", format!("{:?}", r.best_genotype.to_vec()));
    let csv_row = write_results(std::slice::from_ref(&row))?;
    report.note("result_row", csv_row.lines().nth(1).unwrap_or_default());
    Ok(report)
}

fn sweep(cli: &Cli, args: &SweepArgs) -> CliResult<Report> {
    let d = CostWeights::default();
    let weights = CostWeights {
        block_sync: args.w_sync.unwrap_or(d.block_sync),
        shuffle: args.w_shuffle.unwrap_or(d.shuffle),
        atomic: args.w_atomic.unwrap_or(d.atomic),
        mma: args.w_mma.unwrap_or(d.mma),
        fence: args.w_fence.unwrap_or(d.fence),
    };
    let accum: AccumMode = args.accum.into();
    let rows = scaling_sweep(&args.sizes, accum, &weights)?;

    let mut config = base_config(cli, "sweep");
    push(&mut config, "sizes", joined(&args.sizes));
    push(&mut config, "accum_mode", accum);
    push(
        &mut config,
        "weights",
        format!(
            "sync={} shuffle={} atomic={} mma={} fence={}",
            weights.block_sync, weights.shuffle, weights.atomic, weights.mma, weights.fence
        ),
    );
    let mut report = Report::new("sweep", config);

    let mut table = Table::new(
        "scaling",
        &[
            "threads",
            "baseline_calls",
            "baseline_block_syncs",
            "baseline_warp_shuffles",
            "baseline_atomic_adds",
            "baseline_memory_fences",
            "tcu_block_syncs",
            "tcu_mma_ops",
            "tcu_atomic_adds",
            "baseline_cost",
            "tcu_cost",
            "cost_ratio",
            "degenerate",
        ],
    );
    for r in &rows {
        let total = r.baseline_per_call.times(r.baseline_calls);
        table.push(vec![
            r.threads.to_string(),
            r.baseline_calls.to_string(),
            total.block_syncs.to_string(),
            total.warp_shuffles.to_string(),
            total.atomic_adds.to_string(),
            total.memory_fences.to_string(),
            r.tcu.block_syncs.to_string(),
            r.tcu.mma_ops.to_string(),
            r.tcu.atomic_adds.to_string(),
            format!("{}", r.baseline_cost),
            format!("{}", r.tcu_cost),
            format!("{:.4}", r.cost_ratio),
            r.degenerate.to_string(),
        ]);
    }
    report.tables.push(table);
    if rows.iter().any(|r| r.degenerate) {
        eprintln!("warning: matrix cost is zero for some sizes; their cost ratio is reported as 1.0");
        report.note("warning", "zero matrix cost; degenerate rows report cost_ratio 1.0");
    }
    Ok(report)
}
