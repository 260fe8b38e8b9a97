use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use sharedcache::delivery::Scheme;
use sharedcache::indexcoding::{OracleOptions, DEFAULT_ALPHA_LIMIT, DEFAULT_KAPPA_LIMIT};
use sharedcache::model::{System, SystemSpec};
use sharedcache::sim::{DemandSource, ErrorMode, DEFAULT_SWEEP_LIMIT};

/// Optional `"options"` object of a config file. Flags override it.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileOptions {
    pub scheme: Option<String>,
    pub delta: Option<usize>,
    pub code_delta: Option<usize>,
    pub errors: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub skip_oracles: Option<bool>,
    pub alpha_limit: Option<usize>,
    pub kappa_limit: Option<usize>,
    pub sweep: Option<String>,
    pub sweep_limit: Option<u128>,
}

/// Command-line overrides, all optional.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Delivery scheme: sc or improved.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Packets the channel may corrupt.
    #[arg(long)]
    pub delta: Option<usize>,
    /// Errors the code is sized for; defaults to --delta.
    #[arg(long)]
    pub code_delta: Option<usize>,
    /// exhaustive or random:N.
    #[arg(long)]
    pub errors: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report bounds without running the exhaustive α/κ searches.
    #[arg(long)]
    pub skip_oracles: bool,
    #[arg(long)]
    pub alpha_limit: Option<usize>,
    #[arg(long)]
    pub kappa_limit: Option<usize>,
    /// exhaustive or sampled:N.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Largest exhaustive sweep, in demand vectors.
    #[arg(long)]
    pub sweep_limit: Option<u128>,
}

/// Validated system plus resolved options.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub system: System,
    pub scheme: Scheme,
    pub delta: usize,
    pub code_delta: usize,
    pub errors: ErrorMode,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub oracles: OracleOptions,
    pub sweep: DemandSource,
}

pub fn parse_scheme(text: &str) -> Result<Scheme> {
    match text {
        "sc" | "sc-worst" => Ok(Scheme::ScWorst),
        "improved" => Ok(Scheme::Improved),
        other => bail!(InvalidOption("scheme", format!("unknown scheme `{other}`, expected sc or improved"))),
    }
}

pub fn parse_errors(text: &str) -> Result<ErrorMode> {
    if text == "exhaustive" {
        return Ok(ErrorMode::Exhaustive);
    }
    match text.strip_prefix("random:").map(str::parse) {
        Some(Ok(count)) => Ok(ErrorMode::Random { count }),
        _ => bail!(InvalidOption("errors", format!("`{text}` is not exhaustive or random:N"))),
    }
}

fn parse_sweep(text: &str, limit: u128, seed: u64) -> Result<DemandSource> {
    if text == "exhaustive" {
        return Ok(DemandSource::Exhaustive { limit });
    }
    match text.strip_prefix("sampled:").map(str::parse) {
        Some(Ok(count)) => Ok(DemandSource::Sampled { count, seed }),
        _ => bail!(InvalidOption("sweep", format!("`{text}` is not exhaustive or sampled:N"))),
    }
}

/// A bad option value, reported with the option name.
#[derive(Debug)]
pub struct InvalidOption(pub &'static str, pub String);

impl std::fmt::Display for InvalidOption {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid `{}`: {}", self.0, self.1)
    }
}

impl std::error::Error for InvalidOption {}

impl RunConfig {
    pub fn load(path: &Path, flags: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_text(&text, flags)
    }

    pub fn from_text(text: &str, flags: &Overrides) -> Result<Self> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| sharedcache::Error::InvalidField {
                field: "config",
                reason: e.to_string(),
            })?;
        let file: FileOptions = match value.as_object_mut().and_then(|o| o.remove("options")) {
            Some(opts) => serde_json::from_value(opts).map_err(|e| sharedcache::Error::InvalidField {
                field: "options",
                reason: e.to_string(),
            })?,
            None => FileOptions::default(),
        };
        let spec: SystemSpec = serde_json::from_value(value).map_err(|e| sharedcache::Error::InvalidField {
            field: "config",
            reason: e.to_string(),
        })?;
        let system = spec.validate()?;

        let scheme = parse_scheme(flags.scheme.as_deref().or(file.scheme.as_deref()).unwrap_or("sc"))?;
        let delta = flags.delta.or(file.delta).unwrap_or(0);
        let code_delta = flags.code_delta.or(file.code_delta).unwrap_or(delta);
        let errors = parse_errors(flags.errors.as_deref().or(file.errors.as_deref()).unwrap_or("exhaustive"))?;
        let seed = flags.seed.or(file.seed).unwrap_or(0);
        let skip = flags.skip_oracles || file.skip_oracles.unwrap_or(false);
        let oracles = OracleOptions {
            run: !skip,
            alpha_limit: flags.alpha_limit.or(file.alpha_limit).unwrap_or(DEFAULT_ALPHA_LIMIT),
            kappa_limit: flags.kappa_limit.or(file.kappa_limit).unwrap_or(DEFAULT_KAPPA_LIMIT),
        };
        let sweep_limit = flags.sweep_limit.or(file.sweep_limit).unwrap_or(DEFAULT_SWEEP_LIMIT);
        let sweep = parse_sweep(
            flags.sweep.as_deref().or(file.sweep.as_deref()).unwrap_or("exhaustive"),
            sweep_limit,
            seed,
        )?;
        Ok(RunConfig {
            system,
            scheme,
            delta,
            code_delta,
            errors,
            seed,
            out: flags.out.clone().or(file.out),
            oracles,
            sweep,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "num_files": 2, "num_users": 2, "num_caches": 2, "cache_memory": 1,
        "association": [[1], [2]], "demands": [1, 2],
        "options": {"scheme": "improved", "delta": 1, "seed": 9}
    }"#;

    #[test]
    fn flags_override_file_options() {
        let flags = Overrides {
            delta: Some(0),
            ..Overrides::default()
        };
        let cfg = RunConfig::from_text(EXAMPLE, &flags).unwrap();
        assert_eq!(cfg.scheme, Scheme::Improved);
        assert_eq!((cfg.delta, cfg.code_delta, cfg.seed), (0, 0, 9));
        assert!(cfg.oracles.run);
    }

    #[test]
    fn unknown_option_rejected() {
        let text = EXAMPLE.replace("\"seed\": 9", "\"sed\": 9");
        let err = RunConfig::from_text(&text, &Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("options"), "{err}");
    }

    #[test]
    fn option_parsers() {
        assert_eq!(parse_errors("random:7").unwrap(), ErrorMode::Random { count: 7 });
        assert!(parse_errors("random:x").is_err());
        assert_eq!(parse_scheme("sc").unwrap(), Scheme::ScWorst);
        assert!(parse_scheme("fast").is_err());
        assert_eq!(
            parse_sweep("sampled:10", 5, 3).unwrap(),
            DemandSource::Sampled { count: 10, seed: 3 }
        );
    }
}
