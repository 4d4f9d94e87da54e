//! Flat `key = value` configuration files.
//!
//! One assignment per line, `#` starts a comment, lists are comma separated
//! (`n = 1024, 2048, 4096`). Unknown keys and repeated keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use fwcap::capacity::{ContactMode, DestinationRule, DistanceMode, SweepSpec};
use fwcap::grid::GridParams;
use fwcap::netgen::{ContactModel, NetworkConfig, TieRule};

pub const KNOWN_KEYS: &[&str] = &[
    "n",
    "gamma",
    "epsilon",
    "seed",
    "dest_rule",
    "beta",
    "trials",
    "replicates",
    "c1",
    "range_const",
    "delta",
    "reuse",
    "bandwidth",
    "tie_rule",
    "distance",
    "contacts",
    "lb",
    "orderings",
    "per_component",
    "input",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<fwcap::Error> for ConfigError {
    fn from(e: fwcap::Error) -> Self {
        Self(e.to_string())
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("line {}: expected `key = value`", i + 1));
            };
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return err(format!("line {}: unknown key `{key}`", i + 1));
            }
            if value.is_empty() {
                return err(format!("line {}: empty value for `{key}`", i + 1));
            }
            if values.insert(key.to_string(), value.to_string()).is_some() {
                return err(format!("line {}: duplicate key `{key}`", i + 1));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    fn parse_one<T: FromStr>(key: &str, s: &str) -> Result<T> {
        s.trim().parse().map_err(|_| ConfigError(format!("cannot parse `{key}` from `{}`", s.trim())))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.values.get(key).map(|v| Self::parse_one(key, v)).transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?.ok_or_else(|| ConfigError(format!("missing required key `{key}`")))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.values.get(key).map(|v| v.split(',').map(|s| Self::parse_one(key, s)).collect()).transpose()
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.values.get(key).map(String::as_str) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(other) => err(format!("`{key}` must be true or false, got `{other}`")),
        }
    }

    pub fn seed(&self) -> Result<u64> {
        self.get_or("seed", 1)
    }

    pub fn replicates(&self) -> Result<usize> {
        self.get_or("replicates", 8)
    }

    /// A single-`n` network configuration. Constraint violations are reported
    /// with the violated inequality.
    pub fn network(&self) -> Result<NetworkConfig> {
        let ns: Vec<usize> = self.list("n")?.ok_or_else(|| ConfigError("missing required key `n`".into()))?;
        let [n] = ns[..] else {
            return err("`n` must be a single value for this command");
        };
        Ok(NetworkConfig::new(n, self.get_or("gamma", 2.5)?, self.get_or("epsilon", 2.6)?, self.seed()?)?)
    }

    pub fn tie_rule(&self) -> Result<TieRule> {
        match self.values.get("tie_rule").map(String::as_str) {
            None | Some("strict") => Ok(TieRule::StrictSmaller),
            Some("equal") => Ok(TieRule::AllowEqual),
            Some(other) => err(format!("`tie_rule` must be strict or equal, got `{other}`")),
        }
    }

    pub fn contact_model(&self, epsilon: f64) -> Result<ContactModel> {
        Ok(ContactModel { epsilon, tie_rule: self.tie_rule()? })
    }

    pub fn grid(&self) -> Result<GridParams> {
        let d = GridParams::default();
        Ok(GridParams {
            c1: self.get_or("c1", d.c1)?,
            range_const: self.get_or("range_const", d.range_const)?,
            delta: self.get_or("delta", d.delta)?,
            reuse: self.get("reuse")?,
        })
    }

    pub fn distance(&self) -> Result<DistanceMode> {
        match self.values.get("distance").map(String::as_str) {
            None | Some("euclidean") => Ok(DistanceMode::Euclidean),
            Some("ring") => Ok(DistanceMode::RingApprox),
            Some(other) => err(format!("`distance` must be euclidean or ring, got `{other}`")),
        }
    }

    pub fn contacts(&self) -> Result<ContactMode> {
        match self.values.get("contacts").map(String::as_str) {
            None | Some("fixed") => Ok(ContactMode::Fixed),
            Some("resample") => Ok(ContactMode::Resample),
            Some(other) => err(format!("`contacts` must be fixed or resample, got `{other}`")),
        }
    }

    /// Destination rules: `uniform`, or one power-law rule per `beta` entry.
    /// Without `dest_rule`, a `beta` list selects the power-law rule.
    pub fn rules(&self) -> Result<Vec<DestinationRule>> {
        let betas: Option<Vec<f64>> = self.list("beta")?;
        let kind = self.values.get("dest_rule").map(String::as_str);
        let rules = match (kind, betas) {
            (Some("uniform"), Some(_)) => return err("`beta` only applies to dest_rule = powerlaw"),
            (Some("uniform"), None) | (None, None) => vec![DestinationRule::Uniform],
            (Some("powerlaw") | None, Some(bs)) => bs.into_iter().map(|beta| DestinationRule::PowerLaw { beta }).collect(),
            (Some("powerlaw"), None) => return err("dest_rule = powerlaw needs a `beta` value"),
            (Some(other), _) => return err(format!("`dest_rule` must be uniform or powerlaw, got `{other}`")),
        };
        for r in &rules {
            r.validate()?;
        }
        Ok(rules)
    }

    pub fn sweep(&self) -> Result<SweepSpec> {
        let ns: Vec<usize> = self.list("n")?.ok_or_else(|| ConfigError("missing required key `n`".into()))?;
        let mut spec = SweepSpec::new(ns, self.rules()?, self.get_or("trials", 10_000)?, self.seed()?);
        spec.gamma = self.get_or("gamma", spec.gamma)?;
        spec.epsilon = self.get_or("epsilon", spec.epsilon)?;
        spec.tie_rule = self.tie_rule()?;
        spec.grid = self.grid()?;
        spec.distance = self.distance()?;
        spec.contacts = self.contacts()?;
        spec.replicates = self.replicates()?;
        spec.bandwidth = self.get_or("bandwidth", spec.bandwidth)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn box_sizes(&self) -> Result<Option<Vec<usize>>> {
        self.list("lb")
    }

    pub fn orderings(&self) -> Result<usize> {
        self.get_or("orderings", fwcap::fractal::DEFAULT_ORDERINGS)
    }

    pub fn per_component(&self) -> Result<bool> {
        self.bool_or("per_component", false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_comments() {
        let c = Config::parse("# sweep\nn = 1024, 2048 # two sizes\nbeta=0,2.5\n\ntrials = 500\n").unwrap();
        assert_eq!(c.list::<usize>("n").unwrap(), Some(vec![1024, 2048]));
        assert_eq!(c.rules().unwrap().len(), 2);
        let spec = c.sweep().unwrap();
        assert_eq!(spec.trials, 500);
        assert_eq!(spec.replicates, 8);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Config::parse("colour = red\n").unwrap_err().0.contains("unknown key"));
        assert!(Config::parse("n = 1\nn = 2\n").unwrap_err().0.contains("duplicate"));
        assert!(Config::parse("n 100\n").is_err());
        assert!(Config::parse("n =\n").is_err());
        let c = Config::parse("n = 100\ngamma = 1.0\n").unwrap();
        assert!(c.network().unwrap_err().0.contains("gamma > 1"));
        let c = Config::parse("n = 100\nepsilon = 2\n").unwrap();
        assert!(c.network().unwrap_err().0.contains("epsilon > 2"));
        let c = Config::parse("n = x\n").unwrap();
        assert!(c.network().is_err());
        let c = Config::parse("n = 100, 200\n").unwrap();
        assert!(c.network().is_err());
    }

    #[test]
    fn rule_selection() {
        let c = Config::parse("dest_rule = uniform\n").unwrap();
        assert_eq!(c.rules().unwrap(), vec![DestinationRule::Uniform]);
        assert!(Config::parse("dest_rule = uniform\nbeta = 1\n").unwrap().rules().is_err());
        assert!(Config::parse("dest_rule = powerlaw\n").unwrap().rules().is_err());
        assert!(Config::parse("beta = -1\n").unwrap().rules().is_err());
        assert!(Config::parse("dest_rule = other\n").unwrap().rules().is_err());
    }
}
