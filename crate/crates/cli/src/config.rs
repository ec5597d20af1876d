//! Run configuration: command-line flags over an optional `key = value`
//! file, over defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use bipi::wcsph::InitMode;
use thiserror::Error;

/// Every key accepted in a configuration file. Flags use the same names with
/// dashes.
pub const KEYS: &[&str] = &[
    "geometry",
    "dx",
    "h_ratio",
    "j",
    "tol",
    "window",
    "min_iters",
    "max_iters_2a",
    "max_iters_2c",
    "k_b",
    "out",
    "t_end",
    "init",
    "mu",
    "c0",
    "pb",
    "gravity",
    "surface",
    "r0",
    "a0",
    "sample_every",
    "resolutions",
    "seed",
];

pub const H_RATIO_RANGE: (f64, f64) = (1.2, 3.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Seed,
    Pack,
    Hydrostatic,
    Drop,
    Bench,
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subcommand::Seed => "seed",
            Subcommand::Pack => "pack",
            Subcommand::Hydrostatic => "hydrostatic",
            Subcommand::Drop => "drop",
            Subcommand::Bench => "bench",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for {key}: {reason}")]
    Invalid { key: String, value: String, reason: String },
    #[error("{key} = {value} is outside the accepted range {range}")]
    OutOfRange { key: String, value: String, range: String },
    #[error("{0} needs a geometry (--geometry or `geometry = ...`)")]
    MissingGeometry(Subcommand),
}

/// Fully resolved parameters. Scenario values that depend on the geometry
/// (`c0`, `surface`) stay optional until the geometry is loaded.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Subcommand,
    pub geometry: Option<PathBuf>,
    pub dx: f64,
    /// `h / dx_r`.
    pub h_ratio: f64,
    pub j: f64,
    pub tol: f64,
    pub window: usize,
    pub min_iters: usize,
    pub max_iters_2a: usize,
    pub max_iters_2c: usize,
    /// Freeze distance in units of `dx_r`.
    pub k_b: f64,
    pub out: PathBuf,
    pub t_end: f64,
    pub init: InitMode,
    pub mu: f64,
    pub c0: Option<f64>,
    pub pb: f64,
    pub gravity: f64,
    pub surface: Option<f64>,
    pub r0: f64,
    pub a0: f64,
    pub sample_every: usize,
    pub resolutions: Vec<f64>,
    /// Reserved; nothing in the pipeline is random.
    pub seed: u64,
}

impl RunConfig {
    pub fn h(&self) -> f64 {
        self.h_ratio * self.dx
    }

    pub fn packing(&self) -> bipi::packing::PackingConfig {
        let mut p = bipi::packing::PackingConfig::new(self.dx, self.h_ratio);
        p.j = self.j;
        p.tol = self.tol;
        p.window = self.window;
        p.min_iters = self.min_iters;
        p.max_iters_2a = self.max_iters_2a;
        p.max_iters_2c = self.max_iters_2c;
        p.k_b = self.k_b * self.dx;
        p
    }
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Malformed {
                line: i + 1,
                text: raw.to_string(),
            });
        };
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(key));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

/// Merges flags over file entries. Returns the merged map and a warning for
/// every key set differently in both.
pub fn merge(
    flags: &BTreeMap<String, String>,
    file: &BTreeMap<String, String>,
) -> Result<(BTreeMap<String, String>, Vec<String>), ConfigError> {
    let mut merged = file.clone();
    let mut warnings = Vec::new();
    for (k, v) in flags {
        if !KEYS.contains(&k.as_str()) {
            return Err(ConfigError::UnknownKey(k.clone()));
        }
        if let Some(old) = file.get(k) {
            if old != v {
                warnings.push(format!(
                    "--{} {} overrides `{} = {}` from the config file",
                    k.replace('_', "-"),
                    v,
                    k,
                    old
                ));
            }
        }
        merged.insert(k.clone(), v.clone());
    }
    Ok((merged, warnings))
}

fn get<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    match map.get(key) {
        None => Ok(None),
        Some(v) => v.parse::<T>().map(Some).map_err(|e| ConfigError::Invalid {
            key: key.to_string(),
            value: v.clone(),
            reason: e.to_string(),
        }),
    }
}

fn check(key: &str, value: f64, ok: bool, range: &str) -> Result<(), ConfigError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::OutOfRange {
            key: key.to_string(),
            value: value.to_string(),
            range: range.to_string(),
        })
    }
}

/// Resolves a configuration for `command` from a merged key map.
pub fn resolve(command: Subcommand, map: &BTreeMap<String, String>) -> Result<RunConfig, ConfigError> {
    let geometry: Option<PathBuf> = get(map, "geometry")?;
    if geometry.is_none() && command != Subcommand::Drop {
        return Err(ConfigError::MissingGeometry(command));
    }
    let r0: f64 = get(map, "r0")?.unwrap_or(1.0);
    let a0: f64 = get(map, "a0")?.unwrap_or(1.0);
    check("r0", r0, r0 > 0.0, "(0, inf)")?;
    check("a0", a0, a0 > 0.0, "(0, inf)")?;
    let default_dx = if command == Subcommand::Drop { r0 / 25.0 } else { 0.02 };
    let dx: f64 = get(map, "dx")?.unwrap_or(default_dx);
    check("dx", dx, dx > 0.0, "(0, inf)")?;
    let h_ratio: f64 = get(map, "h_ratio")?.unwrap_or(2.0);
    let (lo, hi) = H_RATIO_RANGE;
    check("h_ratio", h_ratio, (lo..=hi).contains(&h_ratio), "[1.2, 3]")?;

    let j: f64 = get(map, "j")?.unwrap_or(0.5);
    check("j", j, j > 0.0, "(0, inf)")?;
    let tol: f64 = get(map, "tol")?.unwrap_or(0.01);
    check("tol", tol, tol > 0.0, "(0, inf)")?;
    let window: usize = get(map, "window")?.unwrap_or(50);
    check("window", window as f64, window >= 1, "[1, inf)")?;
    let min_iters: usize = get(map, "min_iters")?.unwrap_or(200);
    let max_iters_2a: usize = get(map, "max_iters_2a")?.unwrap_or(20_000);
    let max_iters_2c: usize = get(map, "max_iters_2c")?.unwrap_or(40_000);
    check("max_iters_2a", max_iters_2a as f64, max_iters_2a >= 1, "[1, inf)")?;
    check("max_iters_2c", max_iters_2c as f64, max_iters_2c >= 1, "[1, inf)")?;
    let k_b: f64 = get(map, "k_b")?.unwrap_or(0.6);
    check("k_b", k_b, k_b > 0.5 && k_b < 2.0 * h_ratio, "(0.5, 2 h_ratio) in units of dx")?;

    let out: PathBuf = get(map, "out")?.unwrap_or_else(|| PathBuf::from("out"));
    let default_t_end = match command {
        Subcommand::Hydrostatic => 5.0,
        Subcommand::Drop => 2.0 / a0,
        _ => 0.0,
    };
    let t_end: f64 = get(map, "t_end")?.unwrap_or(default_t_end);
    check("t_end", t_end, t_end >= 0.0, "[0, inf)")?;
    let init: InitMode = get(map, "init")?.unwrap_or(InitMode::Bipi);
    let default_mu = if command == Subcommand::Hydrostatic { 10.0 } else { 0.0 };
    let mu: f64 = get(map, "mu")?.unwrap_or(default_mu);
    check("mu", mu, mu >= 0.0, "[0, inf)")?;
    let c0: Option<f64> = get(map, "c0")?;
    if let Some(c) = c0 {
        check("c0", c, c > 0.0, "(0, inf)")?;
    }
    let pb: f64 = get(map, "pb")?.unwrap_or(0.0);
    check("pb", pb, pb >= 0.0, "[0, inf)")?;
    let gravity: f64 = get(map, "gravity")?.unwrap_or(9.81);
    check("gravity", gravity, gravity >= 0.0, "[0, inf)")?;
    let surface: Option<f64> = get(map, "surface")?;
    if let Some(s) = surface {
        check("surface", s, true, "finite")?;
    }
    let sample_every: usize = get(map, "sample_every")?.unwrap_or(50);
    check("sample_every", sample_every as f64, sample_every >= 1, "[1, inf)")?;

    let resolutions = match map.get("resolutions") {
        None => vec![0.04, 0.028, 0.02, 0.014, 0.01],
        Some(list) => list
            .split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|e| ConfigError::Invalid {
                    key: "resolutions".into(),
                    value: list.clone(),
                    reason: e.to_string(),
                })
            })
            .collect::<Result<Vec<f64>, _>>()?,
    };
    for &r in &resolutions {
        check("resolutions", r, r > 0.0, "(0, inf)")?;
    }
    if command == Subcommand::Bench && resolutions.len() < 3 {
        return Err(ConfigError::Invalid {
            key: "resolutions".into(),
            value: format!("{resolutions:?}"),
            reason: "a scaling fit needs at least 3 resolutions".into(),
        });
    }
    let seed: u64 = get(map, "seed")?.unwrap_or(0);

    Ok(RunConfig {
        command,
        geometry,
        dx,
        h_ratio,
        j,
        tol,
        window,
        min_iters,
        max_iters_2a,
        max_iters_2c,
        k_b,
        out,
        t_end,
        init,
        mu,
        c0,
        pb,
        gravity,
        surface,
        r0,
        a0,
        sample_every,
        resolutions,
        seed,
    })
}

/// Flags over file over defaults. Returns the configuration and any
/// precedence warnings.
pub fn parse_config(
    command: Subcommand,
    flags: &BTreeMap<String, String>,
    file: Option<&str>,
) -> Result<(RunConfig, Vec<String>), ConfigError> {
    let file_map = match file {
        Some(text) => parse_file(text)?,
        None => BTreeMap::new(),
    };
    let (merged, warnings) = merge(flags, &file_map)?;
    Ok((resolve(command, &merged)?, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn minimal_pack_gets_defaults() {
        let (cfg, warn) = parse_config(Subcommand::Pack, &flags(&[("geometry", "g.bnd"), ("dx", "0.02")]), None).unwrap();
        assert!(warn.is_empty());
        assert_eq!(cfg.h(), 0.04);
        assert_eq!(cfg.j, 0.5);
        assert_eq!(cfg.tol, 0.01);
        assert!((cfg.packing().k_b - 0.012).abs() < 1e-15);
        assert_eq!(cfg.init, InitMode::Bipi);
    }

    #[test]
    fn h_ratio_range() {
        let err = parse_config(Subcommand::Pack, &flags(&[("geometry", "g"), ("h_ratio", "0.5")]), None).unwrap_err();
        assert!(matches!(err, ConfigError::OutOfRange { .. }));
        for ok in ["1.2", "3", "2.5"] {
            assert!(parse_config(Subcommand::Pack, &flags(&[("geometry", "g"), ("h_ratio", ok)]), None).is_ok());
        }
    }

    #[test]
    fn flag_beats_file_with_warning() {
        let file = "# spacing\ngeometry = a.bnd\ndx = 0.04\nj = 0.4\n";
        let (cfg, warn) = parse_config(Subcommand::Pack, &flags(&[("dx", "0.02")]), Some(file)).unwrap();
        assert_eq!(cfg.dx, 0.02);
        assert_eq!(cfg.j, 0.4);
        assert_eq!(warn.len(), 1);
        assert!(warn[0].contains("--dx"));
        let (_, warn) = parse_config(Subcommand::Pack, &flags(&[("dx", "0.04")]), Some(file)).unwrap();
        assert!(warn.is_empty());
    }

    #[test]
    fn unknown_key_and_missing_geometry() {
        assert_eq!(
            parse_config(Subcommand::Pack, &BTreeMap::new(), Some("geometry = g\nspeed = 3\n")).unwrap_err(),
            ConfigError::UnknownKey("speed".into())
        );
        assert!(matches!(
            parse_config(Subcommand::Pack, &BTreeMap::new(), Some("geometry g\n")).unwrap_err(),
            ConfigError::Malformed { line: 1, .. }
        ));
        assert_eq!(
            parse_config(Subcommand::Seed, &flags(&[("dx", "0.02")]), None).unwrap_err(),
            ConfigError::MissingGeometry(Subcommand::Seed)
        );
        assert!(parse_config(Subcommand::Drop, &BTreeMap::new(), None).is_ok());
    }

    #[test]
    fn scenario_defaults() {
        let (drop, _) = parse_config(Subcommand::Drop, &flags(&[("a0", "2")]), None).unwrap();
        assert_eq!(drop.dx, 0.04);
        assert_eq!(drop.t_end, 1.0);
        assert_eq!(drop.mu, 0.0);
        let (tank, _) = parse_config(Subcommand::Hydrostatic, &flags(&[("geometry", "t.bnd")]), None).unwrap();
        assert_eq!(tank.mu, 10.0);
        assert_eq!(tank.t_end, 5.0);
        assert_eq!(tank.c0, None);
        let bad = parse_config(Subcommand::Drop, &flags(&[("init", "packed")]), None).unwrap_err();
        assert!(matches!(bad, ConfigError::Invalid { .. }));
    }

    #[test]
    fn bench_needs_three_resolutions() {
        let err = parse_config(Subcommand::Bench, &flags(&[("geometry", "g"), ("resolutions", "0.02")]), None);
        assert!(err.is_err());
        let (cfg, _) =
            parse_config(Subcommand::Bench, &flags(&[("geometry", "g"), ("resolutions", "0.04, 0.02,0.01")]), None)
                .unwrap();
        assert_eq!(cfg.resolutions, vec![0.04, 0.02, 0.01]);
    }
}
