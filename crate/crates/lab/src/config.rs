//! Experiment configuration: a TOML file, then command-line overrides, then
//! per-experiment defaults for anything still unset.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    HybridsCheck,
    AttackRun,
    TomographyBench,
    VerifyCorrectness,
    CommitDemo,
    BindingSearch,
    OtpDemo,
    SmallrangeStats,
    Fixtures,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::HybridsCheck => "hybrids-check",
            Experiment::AttackRun => "attack-run",
            Experiment::TomographyBench => "tomography-bench",
            Experiment::VerifyCorrectness => "verify-correctness",
            Experiment::CommitDemo => "commit-demo",
            Experiment::BindingSearch => "binding-search",
            Experiment::OtpDemo => "otp-demo",
            Experiment::SmallrangeStats => "smallrange-stats",
            Experiment::Fixtures => "fixtures",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Paper,
    #[default]
    Desk,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackChoice {
    Gram,
    Purity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckChoice {
    SameInput,
    DifferentInput,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeChoice {
    Analytic,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantChoice {
    Mixer,
    Hmac,
}

/// Experiment parameters. Unset entries take per-experiment defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub lambda: Option<usize>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    /// Qudit dimension `N` for hybrids-check.
    pub n_dim: Option<usize>,
    pub t: Option<usize>,
    pub s: Option<u64>,
    /// Boosting repetitions for tomography-bench.
    pub reps: Option<usize>,
    pub copies: Option<usize>,
    pub eta: Option<f64>,
    pub attack: Option<AttackChoice>,
    pub instantiation: Option<u8>,
    pub check: Option<CheckChoice>,
    pub mode: Option<ModeChoice>,
    pub variant: Option<VariantChoice>,
    pub mixer_seed: Option<u64>,
    pub r: Option<usize>,
    pub domain: Option<usize>,
    pub base: Option<usize>,
    pub message_bits: Option<usize>,
    pub tcp: Option<bool>,
    pub check_only: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub csv: bool,
    #[serde(default)]
    pub svg: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub preset: Option<Preset>,
    pub workers: Option<usize>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub experiment: Option<Experiment>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub preset: Option<Preset>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub csv: bool,
    pub svg: bool,
    /// `key=value` pairs for `[params]`, values in TOML syntax.
    pub params: Vec<String>,
}

/// Fully specified configuration; this is what reports echo.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub trials: usize,
    pub preset: Preset,
    pub workers: Option<usize>,
    pub params: Params,
    pub output: OutputConfig,
}

fn parse_table(text: &str, origin: &str) -> Result<toml::Table> {
    text.parse::<toml::Table>()
        .map_err(|e| LabError::usage(origin, e.message().to_string()))
}

/// Reads the file (if any), applies overrides and fills defaults.
pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<ResolvedConfig> {
    let mut table = match path {
        Some(p) => parse_table(&std::fs::read_to_string(p)?, &p.display().to_string())?,
        None => toml::Table::new(),
    };
    if !overrides.params.is_empty() {
        let params = table
            .entry("params")
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        let toml::Value::Table(params) = params else {
            return Err(LabError::usage("params", "must be a table"));
        };
        for kv in &overrides.params {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| LabError::usage("--param", format!("expected key=value, got {kv:?}")))?;
            let parsed = parse_table(&format!("v = {}", value.trim()), &format!("params.{}", key.trim()))
                .or_else(|_| parse_table(&format!("v = {:?}", value.trim()), &format!("params.{}", key.trim())))?;
            params.insert(key.trim().to_string(), parsed["v"].clone());
        }
    }
    let cfg: ExperimentConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| LabError::usage("config", e.message().to_string()))?;
    resolve(cfg, overrides)
}

pub fn resolve(cfg: ExperimentConfig, o: &Overrides) -> Result<ResolvedConfig> {
    let experiment = o
        .experiment
        .or(cfg.experiment)
        .ok_or_else(|| LabError::usage("experiment", "no experiment selected"))?;
    if let (Some(a), Some(b)) = (o.experiment, cfg.experiment) {
        if a != b {
            return Err(LabError::usage(
                "experiment",
                format!("config is for {} but {} was requested", b.name(), a.name()),
            ));
        }
    }
    let seed = o
        .seed
        .or(cfg.seed)
        .ok_or_else(|| LabError::usage("seed", "a seed is required; runs never draw ambient randomness"))?;
    let preset = o.preset.or(cfg.preset).unwrap_or_default();
    let workers = o.workers.or(cfg.workers);
    if workers == Some(0) {
        return Err(LabError::usage("workers", "must be at least 1"));
    }
    let mut output = cfg.output;
    if let Some(dir) = &o.out {
        output.dir = Some(dir.clone());
    }
    output.csv |= o.csv;
    output.svg |= o.svg;
    let trials = o.trials.or(cfg.trials).unwrap_or(default_trials(experiment));
    let params = fill_defaults(experiment, preset, cfg.params)?;
    Ok(ResolvedConfig {
        experiment,
        seed,
        trials,
        preset,
        workers,
        params,
        output,
    })
}

fn default_trials(e: Experiment) -> usize {
    match e {
        Experiment::HybridsCheck | Experiment::Fixtures => 1,
        Experiment::AttackRun => 1000,
        Experiment::TomographyBench => 200,
        Experiment::VerifyCorrectness => 100,
        Experiment::CommitDemo => 50,
        Experiment::BindingSearch => 4,
        Experiment::OtpDemo => 20,
        Experiment::SmallrangeStats => 10_000,
    }
}

fn fill_defaults(e: Experiment, preset: Preset, mut p: Params) -> Result<Params> {
    macro_rules! default {
        ($field:ident, $value:expr) => {
            if p.$field.is_none() {
                p.$field = Some($value);
            }
        };
    }
    default!(variant, VariantChoice::Hmac);
    default!(mixer_seed, 0);
    match e {
        Experiment::HybridsCheck => {
            default!(n_dim, 4);
            default!(t, 2);
        }
        Experiment::AttackRun => {
            default!(attack, AttackChoice::Gram);
            default!(lambda, 8);
            default!(n, 3);
            default!(d, 1);
            match p.attack {
                Some(AttackChoice::Gram) => default!(t, 9),
                _ => default!(eta, 0.5),
            }
        }
        Experiment::TomographyBench => {
            default!(n, 1);
            default!(s, 4096);
            default!(reps, 16);
        }
        Experiment::VerifyCorrectness => {
            default!(instantiation, 2);
            default!(check, CheckChoice::SameInput);
            default!(lambda, 8);
            default!(n, 3);
            default!(mode, ModeChoice::Sampled);
        }
        Experiment::CommitDemo => {
            default!(lambda, 8);
            default!(d, 1);
            default!(n, 3);
            default!(mode, ModeChoice::Analytic);
            default!(tcp, false);
        }
        Experiment::BindingSearch => {
            default!(lambda, 6);
            default!(d, 1);
            default!(n, 3);
        }
        Experiment::OtpDemo => {
            default!(lambda, 16);
            default!(d, 3);
            default!(n, 4);
            default!(mode, ModeChoice::Sampled);
            default!(message_bits, 8);
        }
        Experiment::SmallrangeStats => {
            default!(r, 8);
            default!(domain, 32);
            default!(base, 16);
        }
        Experiment::Fixtures => {
            default!(check_only, false);
        }
    }
    if preset == Preset::Paper && matches!(e, Experiment::CommitDemo | Experiment::OtpDemo) && p.mode.is_some() {
        // Full-scale protocol presets only report budget arithmetic.
        p.mode = None;
    }
    if let Some(i) = p.instantiation {
        if !(1..=2).contains(&i) {
            return Err(LabError::usage("params.instantiation", "must be 1 or 2"));
        }
    }
    if let Some(eta) = p.eta {
        if !(0.0..=1.0).contains(&eta) {
            return Err(LabError::usage("params.eta", "must lie in [0, 1]"));
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn overrides(e: Experiment) -> Overrides {
        Overrides {
            experiment: Some(e),
            seed: Some(1),
            ..Default::default()
        }
    }

    #[test]
    fn flags_win_over_file() {
        let dir = std::env::temp_dir().join(format!("prs-lab-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.toml");
        std::fs::write(&path, "experiment = \"hybrids-check\"\nseed = 5\ntrials = 3\n[params]\nn_dim = 8\nt = 2\n").unwrap();
        let mut o = overrides(Experiment::HybridsCheck);
        o.params = vec!["t=3".into()];
        let c = load(Some(&path), &o).unwrap();
        assert_eq!(c.seed, 1);
        assert_eq!(c.trials, 3);
        assert_eq!(c.params.n_dim, Some(8));
        assert_eq!(c.params.t, Some(3));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn errors_name_the_field() {
        let o = Overrides {
            experiment: Some(Experiment::HybridsCheck),
            ..Default::default()
        };
        match load(None, &o) {
            Err(LabError::Usage { field, .. }) => assert_eq!(field, "seed"),
            other => panic!("{other:?}"),
        }
        let mut o = overrides(Experiment::VerifyCorrectness);
        o.params = vec!["instantiation=3".into()];
        match load(None, &o) {
            Err(LabError::Usage { field, .. }) => assert_eq!(field, "params.instantiation"),
            other => panic!("{other:?}"),
        }
        let mut o = overrides(Experiment::HybridsCheck);
        o.params = vec!["bogus=1".into()];
        assert!(matches!(load(None, &o), Err(LabError::Usage { .. })));
    }

    #[test]
    fn string_values_need_no_quotes() {
        let mut o = overrides(Experiment::AttackRun);
        o.params = vec!["attack=purity".into()];
        let c = load(None, &o).unwrap();
        assert_eq!(c.params.attack, Some(AttackChoice::Purity));
        assert_eq!(c.params.eta, Some(0.5));
        assert_eq!(c.params.t, None);
    }
}
