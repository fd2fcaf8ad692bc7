use std::path::Path;

use frameforge::linalg::C64;
use frameforge::{Error, MultiplierSpec, RunConfig, SequenceSpec, Vector};

use crate::error::CliError;
use crate::GlobalArgs;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Defaults, then the config file, then flags, then the environment cap.
pub fn resolve_config(global: &GlobalArgs, max_dim_env: Option<&str>) -> Result<RunConfig, CliError> {
    let mut config = match &global.config {
        Some(path) => serde_json::from_str(&read(path)?).map_err(Error::from)?,
        None => RunConfig::default(),
    };
    if let Some(ns) = &global.ns {
        config.ns = ns.clone();
    }
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    if let Some(raw) = max_dim_env {
        config.max_dim = raw
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{} must be a positive integer, got `{raw}`", crate::MAX_DIM_ENV)))?;
    }
    config.validate()?;
    Ok(config)
}

/// Loads a sequence spec: JSON, or an explicit-sequence CSV with columns
/// `member,component,re,im` (both indices from 1).
pub fn load_spec(path: &Path) -> Result<SequenceSpec, CliError> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        return load_csv_sequence(path);
    }
    Ok(SequenceSpec::from_json(&read(path)?)?)
}

pub fn load_multiplier(path: &Path) -> Result<MultiplierSpec, CliError> {
    Ok(MultiplierSpec::from_json(&read(path)?)?)
}

fn load_csv_sequence(path: &Path) -> Result<SequenceSpec, CliError> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut entries: Vec<(usize, usize, C64)> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let field = |i: usize| record.get(i).ok_or_else(|| CliError::Usage(format!("short csv row {record:?}")));
        let index = |i: usize| {
            field(i)?
                .parse::<usize>()
                .ok()
                .filter(|v| *v >= 1)
                .ok_or_else(|| CliError::Usage(format!("bad index in csv row {record:?}")))
        };
        let value = |i: usize| {
            field(i)?.parse::<f64>().map_err(|_| CliError::Usage(format!("bad number in csv row {record:?}")))
        };
        entries.push((index(0)?, index(1)?, C64::new(value(2)?, value(3)?)));
    }
    let count = entries.iter().map(|e| e.0).max().ok_or_else(|| CliError::Usage("empty csv sequence".into()))?;
    let dim = entries.iter().map(|e| e.1).max().expect("non-empty");
    let mut vectors = vec![Vector::zeros(dim); count];
    for (n, k, z) in entries {
        vectors[n - 1][k - 1] = z;
    }
    Ok(SequenceSpec::explicit(vectors)?)
}

/// Rejects truncations whose ambient dimension exceeds the cap.
pub fn check_dims(shape: impl Fn(usize) -> frameforge::Result<(usize, usize)>, ns: &[usize], cap: usize) -> Result<(), CliError> {
    for &n in ns {
        let (dim, _) = shape(n)?;
        if dim > cap {
            return Err(Error::DimensionOverflow { dim, cap }.into());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_cap_overrides() {
        let c = resolve_config(&GlobalArgs::default(), Some("64")).unwrap();
        assert_eq!(c.max_dim, 64);
        assert_eq!(resolve_config(&GlobalArgs::default(), Some("x")).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn flags_override_defaults() {
        let g = GlobalArgs { ns: Some(vec![2, 3, 5]), seed: Some(9), ..Default::default() };
        let c = resolve_config(&g, None).unwrap();
        assert_eq!(c.ns, vec![2, 3, 5]);
        assert_eq!(c.seed, 9);
        let bad = GlobalArgs { ns: Some(vec![3, 2]), ..Default::default() };
        assert_eq!(resolve_config(&bad, None).unwrap_err().exit_code(), 2);
    }
}
