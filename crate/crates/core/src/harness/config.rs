//! `key=value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! functions = sphere, rastrigin
//! algorithms = pso, rlam-pso
//! dim = 10
//! runs = 20
//! budget = 10000
//! seed = 1
//! out_dir = results
//! model.rlam-pso = models/pso.rlamw
//! ```
//!
//! Relative paths are resolved against the directory holding the config file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::benchmarks::FunctionId;
use crate::swarm::DEFAULT_SWARM_SIZE;

use super::algorithms::Algorithm;
use super::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub functions: Vec<FunctionId>,
    pub algorithms: Vec<Algorithm>,
    pub dim: usize,
    pub runs: usize,
    pub budget: usize,
    /// Run `k` uses swarm seed `seed + k`.
    pub seed: u64,
    /// Seed of every function's shift and rotation.
    pub fn_seed: u64,
    pub swarm_size: usize,
    pub out_dir: PathBuf,
    /// Reference algorithm for improvement, wins/losses and p-values.
    pub baseline: Algorithm,
    pub models: BTreeMap<Algorithm, PathBuf>,
}

impl ExperimentConfig {
    /// Desk-scale defaults for the given functions and algorithms.
    pub fn new(functions: Vec<FunctionId>, algorithms: Vec<Algorithm>, out_dir: PathBuf) -> Self {
        let baseline = algorithms.first().copied().unwrap_or(Algorithm::Pso);
        ExperimentConfig {
            functions,
            algorithms,
            dim: 10,
            runs: 20,
            budget: 10_000,
            seed: 0,
            fn_seed: 0,
            swarm_size: DEFAULT_SWARM_SIZE,
            out_dir,
            baseline,
            models: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, HarnessError> {
        let bad = |line: usize, msg: String| HarnessError::Config { line, msg };
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(idx + 1, "expected key=value".into()))?;
            let key = k.trim().to_string();
            if entries.insert(key.clone(), (idx + 1, v.trim().to_string())).is_some() {
                return Err(bad(idx + 1, format!("duplicate key `{key}`")));
            }
        }

        let mut take = |key: &str| entries.remove(key);
        let list = |(line, v): (usize, String)| -> Vec<(usize, String)> {
            v.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .map(|s| (line, s))
                .collect()
        };
        let functions = take("functions")
            .map(list)
            .ok_or_else(|| bad(0, "missing key `functions`".into()))?
            .into_iter()
            .map(|(line, s)| s.parse::<FunctionId>().map_err(|e| bad(line, e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let algorithms = take("algorithms")
            .map(list)
            .ok_or_else(|| bad(0, "missing key `algorithms`".into()))?
            .into_iter()
            .map(|(line, s)| s.parse::<Algorithm>().map_err(|e| bad(line, e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let out_dir = take("out_dir")
            .map(|(_, v)| base.join(v))
            .ok_or_else(|| bad(0, "missing key `out_dir`".into()))?;

        let mut config = ExperimentConfig::new(functions, algorithms, out_dir);
        fn int<T: std::str::FromStr>(entry: Option<(usize, String)>, key: &str) -> Result<Option<T>, HarnessError> {
            entry
                .map(|(line, v)| {
                    v.parse::<T>().map_err(|_| HarnessError::Config {
                        line,
                        msg: format!("`{key}` expects a non-negative integer, got `{v}`"),
                    })
                })
                .transpose()
        }
        if let Some(v) = int(take("dim"), "dim")? {
            config.dim = v;
        }
        if let Some(v) = int(take("runs"), "runs")? {
            config.runs = v;
        }
        if let Some(v) = int(take("budget"), "budget")? {
            config.budget = v;
        }
        if let Some(v) = int(take("seed"), "seed")? {
            config.seed = v;
        }
        if let Some(v) = int(take("fn_seed"), "fn_seed")? {
            config.fn_seed = v;
        }
        if let Some(v) = int(take("swarm_size"), "swarm_size")? {
            config.swarm_size = v;
        }
        if let Some((line, v)) = take("baseline") {
            config.baseline = v.parse().map_err(|e: HarnessError| bad(line, e.to_string()))?;
        }
        let model_keys: Vec<String> = entries.keys().filter(|k| k.starts_with("model.")).cloned().collect();
        for key in model_keys {
            let (line, path) = entries.remove(&key).expect("listed key");
            let algo: Algorithm = key["model.".len()..]
                .parse()
                .map_err(|e: HarnessError| bad(line, e.to_string()))?;
            config.models.insert(algo, base.join(path));
        }
        if let Some((key, (line, _))) = entries.into_iter().next() {
            return Err(bad(line, format!("unknown key `{key}`")));
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: &str| HarnessError::Config { line: 0, msg: msg.into() };
        if self.functions.is_empty() {
            return Err(bad("no functions listed"));
        }
        if self.algorithms.is_empty() {
            return Err(bad("no algorithms listed"));
        }
        if !self.algorithms.contains(&self.baseline) {
            return Err(bad("baseline must be one of the listed algorithms"));
        }
        if self.dim < 2 {
            return Err(bad("dim must be at least 2"));
        }
        if self.runs == 0 {
            return Err(bad("runs must be positive"));
        }
        if self.budget < self.swarm_size {
            return Err(bad("budget must cover at least one evaluation per particle"));
        }
        let mut seen = self.algorithms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.algorithms.len() {
            return Err(bad("algorithms listed more than once"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = "\
# desk run
functions = sphere, rastrigin
algorithms = pso,rlam-pso
dim = 5
runs = 3
budget = 2000
seed = 7
out_dir = out
baseline = pso
model.rlam-pso = m/actor.rlamw
";
        let cfg = ExperimentConfig::parse(text, Path::new("/cfg")).unwrap();
        assert_eq!(cfg.functions, vec![FunctionId::Sphere, FunctionId::Rastrigin]);
        assert_eq!(cfg.algorithms, vec![Algorithm::Pso, Algorithm::RlamPso]);
        assert_eq!((cfg.dim, cfg.runs, cfg.budget, cfg.seed), (5, 3, 2000, 7));
        assert_eq!(cfg.out_dir, PathBuf::from("/cfg/out"));
        assert_eq!(cfg.models[&Algorithm::RlamPso], PathBuf::from("/cfg/m/actor.rlamw"));
    }

    #[test]
    fn defaults_apply() {
        let cfg = ExperimentConfig::parse("functions=sphere\nalgorithms=clpso\nout_dir=o", Path::new(".")).unwrap();
        assert_eq!((cfg.dim, cfg.runs, cfg.budget, cfg.swarm_size), (10, 20, 10_000, 40));
        assert_eq!(cfg.baseline, Algorithm::Clpso);
    }

    #[test]
    fn rejects_bad_configs() {
        let base = Path::new(".");
        for text in [
            "functions=sphere\nalgorithms=pso",
            "functions=sphere\nalgorithms=pso\nout_dir=o\ncolour=red",
            "functions=sphere\nalgorithms=foo\nout_dir=o",
            "functions=sphere\nalgorithms=pso\nout_dir=o\nruns=-3",
            "functions=sphere\nalgorithms=pso\nout_dir=o\nbaseline=clpso",
            "functions=sphere\nalgorithms=pso,pso\nout_dir=o",
            "functions=sphere\nfunctions=sphere\nalgorithms=pso\nout_dir=o",
            "just text",
        ] {
            assert!(ExperimentConfig::parse(text, base).is_err(), "{text}");
        }
    }
}
