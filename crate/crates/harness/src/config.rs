//! Campaign configuration file.

use std::collections::HashSet;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use etmof_core::metrics::Distance;
use etmof_core::optimizer::{Mode, SolverConfig};
use serde::Deserialize;

fn default_runs() -> usize {
    21
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    pub instances: Vec<usize>,
    /// Relative paths resolve against the output root.
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub workers: Option<usize>,
    /// Evaluations per task; protocol budget when absent.
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub front_size: Option<usize>,
    #[serde(default)]
    pub distance: Option<String>,
    #[serde(rename = "optimizer")]
    pub optimizers: Vec<OptimizerConfig>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub name: String,
    pub mode: String,
    #[serde(default)]
    pub rmp: Option<f64>,
    #[serde(default)]
    pub population: Option<usize>,
    #[serde(default)]
    pub dynamic_population: Option<usize>,
    #[serde(default)]
    pub eta_c: Option<f64>,
    #[serde(default)]
    pub eta_m: Option<f64>,
    #[serde(default)]
    pub mutation_rate: Option<f64>,
}

impl OptimizerConfig {
    pub fn mode(&self) -> anyhow::Result<Mode> {
        self.mode.parse().map_err(|e| anyhow!("optimizer {}: {e}", self.name))
    }

    /// Solver settings for one run.
    pub fn solver(&self, seed: u64, budget: Option<u64>) -> SolverConfig {
        let base = SolverConfig::default();
        SolverConfig {
            population: self.population.unwrap_or(base.population),
            dynamic_population: self.dynamic_population.unwrap_or(base.dynamic_population),
            rmp: self.rmp.unwrap_or(base.rmp),
            eta_c: self.eta_c.unwrap_or(base.eta_c),
            eta_m: self.eta_m.unwrap_or(base.eta_m),
            mutation_rate: self.mutation_rate.or(base.mutation_rate),
            seed,
            budget,
        }
    }
}

impl CampaignConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: CampaignConfig = toml::from_str(text).context("malformed campaign config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn distance(&self) -> anyhow::Result<Distance> {
        match &self.distance {
            None => Ok(Distance::Manhattan),
            Some(s) => s.parse().map_err(|e| anyhow!("{e}")),
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.runs == 0 {
            bail!("runs must be at least 1");
        }
        if self.instances.is_empty() {
            bail!("no instances listed");
        }
        if let Some(bad) = self.instances.iter().find(|&&i| !(1..=40).contains(&i)) {
            bail!("instance {bad} is outside 1..=40");
        }
        let mut seen = HashSet::new();
        if let Some(dup) = self.instances.iter().find(|&&i| !seen.insert(i)) {
            bail!("instance {dup} listed twice");
        }
        if self.optimizers.is_empty() {
            bail!("no optimizers configured");
        }
        let mut names = HashSet::new();
        for o in &self.optimizers {
            if o.name.is_empty()
                || !o
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
            {
                bail!("optimizer name {:?} must be nonempty and use [A-Za-z0-9_-]", o.name);
            }
            if !names.insert(o.name.as_str()) {
                bail!("optimizer name {:?} used twice", o.name);
            }
            o.mode()?;
        }
        if self.workers == Some(0) {
            bail!("workers must be at least 1");
        }
        if self.budget == Some(0) {
            bail!("budget must be positive");
        }
        if matches!(self.front_size, Some(n) if n < 100) {
            bail!("front_size must be at least 100");
        }
        self.distance()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
master_seed = 7
runs = 3
instances = [1, 7]
budget = 2000

[[optimizer]]
name = "mfea"
mode = "transfer"
rmp = 0.3

[[optimizer]]
name = "single"
mode = "independent"
"#;

    #[test]
    fn parses_sample() {
        let c = CampaignConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.runs, 3);
        assert_eq!(c.optimizers.len(), 2);
        assert_eq!(c.optimizers[1].mode().unwrap(), Mode::Independent);
        assert_eq!(c.optimizers[0].solver(5, c.budget).budget, Some(2000));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(CampaignConfig::parse("runs = 3").is_err());
        assert!(CampaignConfig::parse(&SAMPLE.replace("[1, 7]", "[41]")).is_err());
        assert!(CampaignConfig::parse(&SAMPLE.replace("runs = 3", "runs = 0")).is_err());
        assert!(CampaignConfig::parse(&SAMPLE.replace("\"single\"", "\"mfea\"")).is_err());
        assert!(CampaignConfig::parse(&SAMPLE.replace("\"independent\"", "\"greedy\"")).is_err());
        assert!(CampaignConfig::parse(&format!("{SAMPLE}\ncolour = 1")).is_err());
    }
}
