//! The four subcommands: models, converge, price, calibrate-bm.

use std::fs;
use std::time::Instant;

use cirheston::{
    bias_curve, bm_max_calibration, bm_max_gap_asymptotic, bm_max_mean_exact, error_table_multi,
    fit_rate, model::BUILTIN_MODEL_IDS, plot_rows, report, BiasRecord, BiasRun, ErrorRecord,
    FitTarget, Model, RateRow,
};

use crate::config::RunConfig;
use crate::Failure;

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

/// Prints the built-in parameter sets with their Feller indices.
pub fn cmd_models() {
    println!(
        "{:<6} {:>9} {:>7} {:>7} {:>7} {:>7} {:>8} {:>6} {:>4} {:>8}",
        "model", "v0", "kappa", "theta", "sigma", "rho", "mu", "s0", "T", "nu"
    );
    for id in BUILTIN_MODEL_IDS {
        let m = Model::builtin(id).expect("builtin id");
        let p = m.params;
        println!(
            "{:<6} {:>9} {:>7} {:>7} {:>7} {:>7} {:>8} {:>6} {:>4} {:>8.4}",
            m.name, p.v0, p.kappa, p.theta, p.sigma, p.rho, p.mu, p.s0, p.horizon,
            p.feller_index()
        );
    }
}

/// Error tables plus fitted rates for every (scheme, model) pair; writes
/// errors.csv, rates.csv and plot.csv under the output directory and prints
/// a per-model rate summary.
pub fn cmd_converge(cfg: &RunConfig) -> Result<(), Failure> {
    let models = cfg.models()?;
    let schemes = cfg.schemes()?;
    let n_list = cfg.n_list();

    fs::create_dir_all(&cfg.out).map_err(runtime)?;
    let mut all_records: Vec<ErrorRecord> = Vec::new();
    let mut all_rates: Vec<RateRow> = Vec::new();

    for model in &models {
        let started = Instant::now();
        let tables =
            error_table_multi(&schemes, model, &n_list, cfg.paths, cfg.seed).map_err(runtime)?;
        println!(
            "model {} (nu = {:.4}), {} paths, N in {}..{}, {:.1?}",
            model.name,
            model.params.feller_index(),
            cfg.paths,
            cfg.n_min,
            cfg.n_max,
            started.elapsed()
        );
        println!("{:<10} {:>9} {:>12}", "scheme", "rate CIR", "rate Heston");
        for table in &tables {
            let cir = fit_rate(table, FitTarget::Cir, cfg.fit_min, cfg.fit_max).map_err(runtime)?;
            let heston =
                fit_rate(table, FitTarget::Heston, cfg.fit_min, cfg.fit_max).map_err(runtime)?;
            let scheme = &table[0].scheme;
            println!("{:<10} {:>9.4} {:>12.4}", scheme, cir.slope, heston.slope);
            all_rates.push(RateRow::from_estimate(scheme, &model.name, "cir", &cir));
            all_rates.push(RateRow::from_estimate(scheme, &model.name, "heston", &heston));
            all_records.extend(table.iter().cloned());
        }
        println!();
    }

    let errors_path = cfg.out.join("errors.csv");
    report::write_error_csv(&errors_path, &all_records).map_err(runtime)?;
    report::write_rates_csv(cfg.out.join("rates.csv"), &all_rates).map_err(runtime)?;
    report::write_plot_csv(cfg.out.join("plot.csv"), &plot_rows(&all_records)).map_err(runtime)?;
    println!("wrote {}, rates.csv, plot.csv", errors_path.display());
    Ok(())
}

/// Bias curves for the configured payoffs; writes bias.csv.
pub fn cmd_price(cfg: &RunConfig) -> Result<(), Failure> {
    let models = cfg.models()?;
    let schemes = cfg.schemes()?;
    let payoffs = cfg.payoffs()?;
    let run = BiasRun { n_max: cfg.n_max, product_cap: cfg.bias_cap };
    // Levels must stay a factor 4 below the reference resolution 2 * n_max.
    let n_list: Vec<usize> =
        cfg.n_list().into_iter().filter(|&n| n <= cfg.n_max / 2).collect();
    if n_list.is_empty() {
        return Err(Failure::Usage(format!(
            "no levels to price: need powers of two in {}..{}",
            cfg.n_min,
            cfg.n_max / 2
        )));
    }

    fs::create_dir_all(&cfg.out).map_err(runtime)?;
    let mut rows: Vec<BiasRecord> = Vec::new();
    for model in &models {
        for scheme in &schemes {
            for pay in &payoffs {
                let curve = bias_curve(scheme, model, pay, &n_list, cfg.paths, cfg.seed, &run)
                    .map_err(runtime)?;
                println!(
                    "model {} scheme {} payoff {} (reference level {})",
                    model.name,
                    scheme.label(),
                    pay.label(),
                    2 * cfg.n_max
                );
                println!("{:>8} {:>14} {:>12}", "N", "bias", "se");
                for pt in &curve {
                    println!("{:>8} {:>14.6e} {:>12.3e}", pt.n, pt.bias, pt.se);
                    rows.push(BiasRecord::from_point(
                        pay.label(),
                        &scheme.label(),
                        &model.name,
                        cfg.seed,
                        pt,
                    ));
                }
                println!();
            }
        }
    }
    let path = cfg.out.join("bias.csv");
    report::write_bias_csv(&path, &rows).map_err(runtime)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Discrete Brownian-maximum calibration: measured gap against the
/// zeta(1/2) asymptotic, per level.
pub fn cmd_calibrate_bm(cfg: &RunConfig) -> Result<(), Failure> {
    let continuous = bm_max_mean_exact(1.0);
    let coeff = bm_max_gap_asymptotic(1, 1.0);
    println!("E[max W] on [0,1] = sqrt(2/pi) = {continuous:.6}");
    println!("asymptotic gap coefficient sqrt(1/(2 pi)) |zeta(1/2)| = {coeff:.6}");
    println!(
        "{:>8} {:>12} {:>10} {:>12} {:>12} {:>8}",
        "N", "estimate", "se", "gap", "asymptotic", "ratio"
    );
    for n in cfg.n_list() {
        let (est, se) = bm_max_calibration(n, cfg.paths, cfg.seed).map_err(runtime)?;
        let gap = continuous - est;
        let asym = bm_max_gap_asymptotic(n, 1.0);
        println!(
            "{:>8} {:>12.6} {:>10.2e} {:>12.6} {:>12.6} {:>8.3}",
            n,
            est,
            se,
            gap,
            asym,
            gap / asym
        );
    }
    Ok(())
}
