//! Run configuration: profile defaults, config file, and flag overrides.
//!
//! Precedence, lowest to highest: profile defaults, config file values,
//! command-line flags. The resolved configuration is printable as TOML via
//! `--print-config`, and a run is a pure function of it plus the seed.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use cirheston::{Model, ModelParams, Payoff, SchemeSpec};

use crate::Failure;

/// Built-in parameter profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// M = 10^4 paths, N up to 2^12; minutes of runtime.
    Desk,
    /// M = 10^5 paths, N up to 2^15; reproduces the reference tables but
    /// runs for hours.
    Paper,
}

impl Profile {
    fn defaults(self) -> (usize, usize, usize, usize, usize) {
        // (paths, n_min, n_max, fit_min, fit_max)
        match self {
            Profile::Desk => (10_000, 2, 1 << 12, 64, 1 << 12),
            Profile::Paper => (100_000, 2, 1 << 15, 64, 1 << 15),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Profile::Desk => "desk",
            Profile::Paper => "paper",
        }
    }
}

/// Flags shared by the experiment commands.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Config file (TOML); flags override file values
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Built-in model id 1-5, `all`, or the name of a `[models.<name>]`
    /// section in the config file
    #[arg(long)]
    pub model: Option<String>,

    /// Scheme name (AE|SE|HM|PTE|FTE) or an f1,f2,f3 triple of id|abs|sym
    /// (e.g. `id,abs,abs`); repeatable. Default: all five named schemes
    #[arg(long)]
    pub scheme: Vec<String>,

    /// Smallest step count N (power of two)
    #[arg(long)]
    pub n_min: Option<usize>,

    /// Largest step count N (power of two)
    #[arg(long)]
    pub n_max: Option<usize>,

    /// Monte Carlo paths per measurement
    #[arg(long)]
    pub paths: Option<usize>,

    /// Master seed (default 0)
    #[arg(long)]
    pub seed: Option<u64>,

    /// Lower end of the rate-fit range in N
    #[arg(long)]
    pub fit_min: Option<usize>,

    /// Upper end of the rate-fit range in N
    #[arg(long)]
    pub fit_max: Option<usize>,

    /// Output directory for CSV files (created if missing)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Parameter profile
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,

    /// Cap engine parallelism; results do not depend on this
    #[arg(long)]
    pub threads: Option<usize>,

    /// Print the fully resolved run configuration and exit
    #[arg(long)]
    pub print_config: bool,
}

/// Payoff-specific flags for `price`.
#[derive(Debug, Clone, Args)]
pub struct PriceArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Payoff kind: lookback-put | asian-put | terminal; repeatable.
    /// Default: lookback-put
    #[arg(long)]
    pub payoff: Vec<String>,

    /// Strike for the put payoffs (default 100, the initial price)
    #[arg(long)]
    pub strike: Option<f64>,
}

/// Config file schema. All keys optional; `[models.<name>]` sections define
/// custom parameter sets (keys: v0, kappa, theta, sigma, rho, mu, s0, T).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<String>,
    pub schemes: Option<Vec<String>>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub paths: Option<usize>,
    pub seed: Option<u64>,
    pub fit_min: Option<usize>,
    pub fit_max: Option<usize>,
    pub out: Option<PathBuf>,
    pub profile: Option<Profile>,
    pub threads: Option<usize>,
    pub payoff: Option<Vec<String>>,
    pub strike: Option<f64>,
    /// Cap on n_max * paths for bias runs.
    pub bias_cap: Option<u128>,
    #[serde(default)]
    pub models: BTreeMap<String, ModelParams>,
}

impl FileConfig {
    pub fn load(path: &PathBuf) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| Failure::Usage(format!("bad config {}: {e}", path.display())))
    }
}

/// A named model as it appears in the resolved configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedModel {
    pub name: String,
    pub params: ModelParams,
}

/// Everything a run depends on, after merging defaults, file and flags.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub profile: String,
    pub models: Vec<ResolvedModel>,
    pub schemes: Vec<String>,
    pub n_min: usize,
    pub n_max: usize,
    pub paths: usize,
    pub seed: u64,
    pub fit_min: usize,
    pub fit_max: usize,
    pub out: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub payoffs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strike: Option<f64>,
    pub bias_cap: u128,
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("run config serializes")
    }

    pub fn models(&self) -> Result<Vec<Model>, Failure> {
        self.models
            .iter()
            .map(|m| {
                Model::custom(m.name.clone(), m.params)
                    .map_err(|e| Failure::Usage(format!("model {}: {e}", m.name)))
            })
            .collect()
    }

    pub fn schemes(&self) -> Result<Vec<SchemeSpec>, Failure> {
        if self.schemes.is_empty() {
            return Err(Failure::Usage("empty scheme list".to_string()));
        }
        self.schemes
            .iter()
            .map(|s| SchemeSpec::from_name(s).map_err(|e| Failure::Usage(e.to_string())))
            .collect()
    }

    pub fn payoffs(&self) -> Result<Vec<Payoff>, Failure> {
        if self.payoffs.is_empty() {
            return Err(Failure::Usage("empty payoff list".to_string()));
        }
        let strike = self.strike.unwrap_or(100.0);
        self.payoffs
            .iter()
            .map(|name| {
                let pay = match name.as_str() {
                    "lookback-put" | "lookback" => Payoff::LookbackPut { strike },
                    "asian-put" | "asian" => Payoff::AsianPut { strike },
                    "terminal" => Payoff::Terminal,
                    other => {
                        return Err(Failure::Usage(format!(
                            "unknown payoff {other:?} (valid: lookback-put, asian-put, terminal)"
                        )))
                    }
                };
                pay.validate().map_err(|e| Failure::Usage(e.to_string()))?;
                Ok(pay)
            })
            .collect()
    }

    /// Powers of two from n_min through n_max.
    pub fn n_list(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut n = self.n_min;
        while n <= self.n_max {
            out.push(n);
            n *= 2;
        }
        out
    }
}

fn parse_model_selection(
    selection: &str,
    file: &FileConfig,
) -> Result<Vec<ResolvedModel>, Failure> {
    if selection == "all" {
        return (1..=5)
            .map(|id| {
                let m = Model::builtin(id).expect("builtin id");
                Ok(ResolvedModel { name: m.name, params: m.params })
            })
            .collect();
    }
    if let Ok(id) = selection.parse::<u32>() {
        let m = Model::builtin(id).map_err(|e| Failure::Usage(e.to_string()))?;
        return Ok(vec![ResolvedModel { name: m.name, params: m.params }]);
    }
    match file.models.get(selection) {
        Some(&params) => {
            params
                .validate()
                .map_err(|e| Failure::Usage(format!("model {selection}: {e}")))?;
            Ok(vec![ResolvedModel { name: selection.to_string(), params }])
        }
        None => Err(Failure::Usage(format!(
            "unknown model {selection:?}: not a built-in id (1-5, all) and no [models.{selection}] section in the config"
        ))),
    }
}

/// Merges profile defaults, the config file and the flags into a run
/// configuration, validating as it goes.
pub fn resolve(command: &str, args: &CommonArgs, price: Option<&PriceArgs>) -> Result<RunConfig, Failure> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };

    let profile = args.profile.or(file.profile).unwrap_or(Profile::Desk);
    let (d_paths, d_n_min, d_n_max, d_fit_min, d_fit_max) = profile.defaults();

    let n_min = args.n_min.or(file.n_min).unwrap_or(d_n_min);
    let n_max = args.n_max.or(file.n_max).unwrap_or(d_n_max);
    let paths = args.paths.or(file.paths).unwrap_or(d_paths);
    let fit_min = args.fit_min.or(file.fit_min).unwrap_or(d_fit_min);
    let fit_max = args.fit_max.or(file.fit_max).unwrap_or(d_fit_max);
    let seed = args.seed.or(file.seed).unwrap_or(0);

    for (name, n) in [("--n-min", n_min), ("--n-max", n_max)] {
        if !n.is_power_of_two() {
            return Err(Failure::Usage(format!("{name} must be a power of two, got {n}")));
        }
    }
    if n_min > n_max {
        return Err(Failure::Usage(format!("--n-min {n_min} exceeds --n-max {n_max}")));
    }
    if paths < 2 {
        return Err(Failure::Usage(format!("--paths must be at least 2, got {paths}")));
    }

    let selection = args
        .model
        .clone()
        .or_else(|| file.model.clone())
        .unwrap_or_else(|| "1".to_string());
    let models = parse_model_selection(&selection, &file)?;

    let scheme_inputs: Vec<String> = if !args.scheme.is_empty() {
        args.scheme.clone()
    } else if let Some(s) = &file.schemes {
        s.clone()
    } else {
        SchemeSpec::all_named().iter().map(|s| s.label()).collect()
    };
    // Canonicalize to labels so the echoed config names the schemes.
    let schemes: Vec<String> = scheme_inputs
        .iter()
        .map(|s| {
            SchemeSpec::from_name(s)
                .map(|spec| spec.label())
                .map_err(|e| Failure::Usage(e.to_string()))
        })
        .collect::<Result<_, _>>()?;

    let payoffs: Vec<String> = match price {
        Some(p) => {
            if !p.payoff.is_empty() {
                p.payoff.clone()
            } else if let Some(f) = &file.payoff {
                f.clone()
            } else {
                vec!["lookback-put".to_string()]
            }
        }
        None => Vec::new(),
    };
    let strike = price.and_then(|p| p.strike.or(file.strike).or(Some(100.0)));

    let cfg = RunConfig {
        command: command.to_string(),
        profile: profile.name().to_string(),
        models,
        schemes,
        n_min,
        n_max,
        paths,
        seed,
        fit_min,
        fit_max,
        out: args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
        threads: args.threads.or(file.threads),
        payoffs,
        strike,
        bias_cap: file.bias_cap.unwrap_or((1 << 12) * 10_000),
    };

    // Fail early on anything the engines would reject later.
    cfg.models()?;
    cfg.schemes()?;
    if price.is_some() {
        cfg.payoffs()?;
    }
    Ok(cfg)
}
