use arw_core::estimators::{activity_row, mu_c_bracket, trial_inputs, MuBracket, TrialParams};
use arw_core::greens::{GreenSolver, GreenTable};
use arw_core::stabilization::{stabilize_with, ToppleOrder};
use arw_core::verify::{run_suite, SuiteConfig};
use arw_core::{ArwError, EstimateRecord, FiniteRegion};
use log::info;

use crate::args::{Command, ExperimentConfig};
use crate::output::{Cell, Table};

/// Outcome of a command that ran to completion.
pub struct Report {
    pub table: Table,
    /// False when `verify` found a failing check.
    pub passed: bool,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, ArwError> {
    let table = match cfg.subcommand {
        Command::Stabilize => stabilize(cfg)?,
        Command::Sweep => sweep(cfg)?,
        Command::Greens => greens(cfg)?,
        Command::Phase => phase(cfg)?,
        Command::Verify => return verify(cfg),
    };
    Ok(Report { table, passed: true })
}

fn region(cfg: &ExperimentConfig, radius: usize) -> Result<FiniteRegion, ArwError> {
    FiniteRegion::new(cfg.family, cfg.d, radius)
}

fn stabilize(cfg: &ExperimentConfig) -> Result<Table, ArwError> {
    let k = region(cfg, cfg.radius())?;
    let params = TrialParams::new(cfg.mu(), cfg.lambda(), 1, cfg.seed).with_budget(cfg.budget);
    let (config, tape) = trial_inputs(&k, &params, 0)?;
    let r = stabilize_with(&k, &config, &tape, ToppleOrder::Fifo, cfg.budget)?;
    info!(
        "stabilized {} sites: {} instructions, {} absorbed",
        k.len(),
        r.total_instructions(),
        r.absorbed
    );
    let mut t = Table::new(&[
        "family",
        "d",
        "L",
        "lambda",
        "mu",
        "seed",
        "vertex",
        "distance",
        "initial",
        "final",
        "instructions",
        "jumps",
        "absorbed",
    ]);
    for v in k.vertices() {
        t.push(vec![
            cfg.family.to_string().into(),
            cfg.d.into(),
            k.radius().into(),
            cfg.lambda().into(),
            cfg.mu().into(),
            cfg.seed.into(),
            v.into(),
            k.distance(v).into(),
            config.get(v).to_string().into(),
            r.final_config.get(v).to_string().into(),
            r.instructions[v].into(),
            r.jumps[v].into(),
            r.absorbed.into(),
        ]);
    }
    Ok(t)
}

fn estimate_cells(r: &EstimateRecord) -> [Cell; 4] {
    [r.mean.into(), r.stderr.into(), r.trials.into(), r.master_seed.into()]
}

fn sweep(cfg: &ExperimentConfig) -> Result<Table, ArwError> {
    let mut t = Table::new(&[
        "estimand", "family", "d", "L", "vertices", "lambda", "mu", "mean", "stderr", "trials", "seed",
    ]);
    for &lambda in &cfg.lambdas {
        for &mu in &cfg.mus {
            for &radius in &cfg.radii {
                let k = region(cfg, radius)?;
                let params = TrialParams::new(mu, lambda, cfg.trials, cfg.seed).with_budget(cfg.budget);
                let row = activity_row(&k, &params)?;
                info!("sweep lambda={lambda} mu={mu} L={radius}: leaving {:.4}", row.leaving_density.mean);
                for rec in [&row.q_origin, &row.toppled, &row.leaving_density, &row.sleeping_density] {
                    let mut cells = vec![
                        rec.estimand.clone().into(),
                        cfg.family.to_string().into(),
                        cfg.d.into(),
                        radius.into(),
                        k.len().into(),
                        lambda.into(),
                        mu.into(),
                    ];
                    cells.extend(estimate_cells(rec));
                    t.push(cells);
                }
            }
        }
    }
    Ok(t)
}

fn greens(cfg: &ExperimentConfig) -> Result<Table, ArwError> {
    let mut t = Table::new(&["family", "d", "L", "x_index", "y_index", "distance_x", "distance_y", "value"]);
    for &radius in &cfg.radii {
        let k = region(cfg, radius)?;
        let mut push = |x: usize, y: usize, g: f64| {
            t.push(vec![
                cfg.family.to_string().into(),
                cfg.d.into(),
                radius.into(),
                x.into(),
                y.into(),
                k.distance(x).into(),
                k.distance(y).into(),
                g.into(),
            ])
        };
        if cfg.all_pairs {
            let table = GreenTable::compute(&k, &[])?;
            for x in k.vertices() {
                for y in k.vertices() {
                    push(x, y, table.get(x, y));
                }
            }
        } else {
            let column = GreenSolver::new(&k, &[])?.column(k.origin())?;
            for x in k.vertices() {
                push(x, k.origin(), column[x]);
            }
        }
    }
    Ok(t)
}

fn phase(cfg: &ExperimentConfig) -> Result<Table, ArwError> {
    let mut t = Table::new(&[
        "family",
        "d",
        "L",
        "lambda",
        "threshold",
        "trials",
        "seed",
        "mu_lo",
        "mu_hi",
        "degenerate",
        "warning",
        "label",
    ]);
    for &lambda in &cfg.lambdas {
        for &radius in &cfg.radii {
            let k = region(cfg, radius)?;
            let b = mu_c_bracket(&k, lambda, cfg.trials, cfg.threshold, cfg.seed, cfg.budget, 20)?;
            if let Some(w) = &b.warning {
                log::warn!("lambda={lambda} L={radius}: {w}");
            }
            t.push(vec![
                cfg.family.to_string().into(),
                cfg.d.into(),
                radius.into(),
                lambda.into(),
                cfg.threshold.into(),
                cfg.trials.into(),
                cfg.seed.into(),
                b.mu_lo.into(),
                b.mu_hi.into(),
                b.is_degenerate().into(),
                b.warning.clone().unwrap_or_default().into(),
                MuBracket::LABEL.into(),
            ]);
        }
    }
    Ok(t)
}

fn verify(cfg: &ExperimentConfig) -> Result<Report, ArwError> {
    let suite = if cfg.quick {
        SuiteConfig::quick(cfg.seed)
    } else {
        SuiteConfig::full(cfg.seed)
    };
    let outcomes = run_suite(&suite)?;
    let mut t = Table::new(&["check", "passed", "cases", "failures", "z", "detail", "seed", "quick"]);
    for c in &outcomes {
        eprintln!(
            "{} {:<22} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        t.push(vec![
            c.name.clone().into(),
            c.passed.into(),
            c.cases.into(),
            c.failures.into(),
            c.z.map_or(Cell::from(""), Cell::from),
            c.detail.clone().into(),
            cfg.seed.into(),
            cfg.quick.into(),
        ]);
    }
    Ok(Report {
        table: t,
        passed: outcomes.iter().all(|c| c.passed),
    })
}
