//! Cross-product experiments and the comparison summary.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;

use crate::benchmarks::{make_objective, FunctionId};
use crate::ddpg::load_model;

use super::algorithms::{run_algorithm, Algorithm, LoadedModel};
use super::config::ExperimentConfig;
use super::record::RunRecord;
use super::stats::{improvement, mean, median, normalize_pair, std_dev, wilcoxon_signed_rank};
use super::HarnessError;

pub const SUMMARY_HEADER: &str = "function,algorithm,median,mean,std,improvement_pct,wins,losses,p_value";
/// Function column of the per-algorithm aggregate rows.
pub const AGGREGATE_LABEL: &str = "ALL";

/// One summary line. Per-function rows compare final fitness over paired
/// runs against the baseline: wins/losses count runs, the p-value is the
/// paired Wilcoxon test. Aggregate rows count functions by median and pool
/// every (function, run) pair, normalized per function, into one test.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub function: String,
    pub algorithm: Algorithm,
    pub median: Option<f64>,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub improvement_pct: Option<f64>,
    pub wins: usize,
    pub losses: usize,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonSummary {
    pub baseline: Algorithm,
    pub rows: Vec<SummaryRow>,
}

impl ComparisonSummary {
    pub fn aggregate(&self, algorithm: Algorithm) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.function == AGGREGATE_LABEL && r.algorithm == algorithm)
    }

    pub fn row(&self, function: FunctionId, algorithm: Algorithm) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.function == function.name() && r.algorithm == algorithm)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(SUMMARY_HEADER);
        out.push('\n');
        let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.function,
                r.algorithm,
                opt(r.median),
                opt(r.mean),
                opt(r.std),
                opt(r.improvement_pct),
                r.wins,
                r.losses,
                opt(r.p_value)
            ));
        }
        out
    }
}

/// Final fitness values keyed by (function, algorithm), ordered by run index.
pub type FinalFits = BTreeMap<(FunctionId, Algorithm), Vec<f64>>;

pub fn summarize(functions: &[FunctionId], algorithms: &[Algorithm], baseline: Algorithm, fits: &FinalFits) -> ComparisonSummary {
    let mut rows = Vec::new();
    for &f in functions {
        let base = &fits[&(f, baseline)];
        let best = f.bias();
        for &a in algorithms {
            let vals = &fits[&(f, a)];
            let (wins, losses) = vals.iter().zip(base).fold((0, 0), |(w, l), (v, b)| {
                (w + usize::from(v < b), l + usize::from(v > b))
            });
            let p_value = if a == baseline {
                None
            } else {
                wilcoxon_signed_rank(vals, base).ok().map(|r| r.p_value)
            };
            rows.push(SummaryRow {
                function: f.name().to_string(),
                algorithm: a,
                median: Some(median(vals)),
                mean: Some(mean(vals)),
                std: Some(std_dev(vals)),
                improvement_pct: improvement(mean(base), mean(vals), best),
                wins,
                losses,
                p_value,
            });
        }
    }
    for &a in algorithms {
        let mut wins = 0;
        let mut losses = 0;
        let mut improvements = Vec::new();
        let mut pooled_a = Vec::new();
        let mut pooled_b = Vec::new();
        for &f in functions {
            let vals = &fits[&(f, a)];
            let base = &fits[&(f, baseline)];
            let (ma, mb) = (median(vals), median(base));
            wins += usize::from(ma < mb);
            losses += usize::from(ma > mb);
            if let Some(i) = improvement(mean(base), mean(vals), f.bias()) {
                improvements.push(i);
            }
            let (na, nb) = normalize_pair(vals, base);
            pooled_a.extend(na);
            pooled_b.extend(nb);
        }
        let p_value = if a == baseline {
            None
        } else {
            wilcoxon_signed_rank(&pooled_a, &pooled_b).ok().map(|r| r.p_value)
        };
        rows.push(SummaryRow {
            function: AGGREGATE_LABEL.to_string(),
            algorithm: a,
            median: None,
            mean: None,
            std: None,
            improvement_pct: (!improvements.is_empty()).then(|| mean(&improvements)),
            wins,
            losses,
            p_value,
        });
    }
    ComparisonSummary { baseline, rows }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    /// In (function, algorithm, run) order.
    pub records: Vec<(Algorithm, usize, RunRecord)>,
    pub summary: ComparisonSummary,
}

pub fn curve_file_name(function: FunctionId, algorithm: Algorithm, run: usize) -> String {
    format!("{}_{}_run{:03}.csv", function.name(), algorithm.name(), run)
}

fn load_models(config: &ExperimentConfig) -> Result<BTreeMap<Algorithm, LoadedModel>, HarnessError> {
    let mut models = BTreeMap::new();
    for &algo in config.algorithms.iter().filter(|a| a.needs_model()) {
        let path = config.models.get(&algo).ok_or(HarnessError::MissingModel(algo))?;
        let (actor, meta) = load_model(path).map_err(|source| HarnessError::LoadModel {
            path: path.clone(),
            source,
        })?;
        let model = LoadedModel { actor, meta };
        if Some(model.meta.variant) != algo.model_variant() {
            return Err(HarnessError::ModelMismatch {
                algorithm: algo,
                trained_for: model.meta.variant,
            });
        }
        models.insert(algo, model);
    }
    Ok(models)
}

/// Runs every (function, algorithm, run) combination; runs are independent
/// and execute in parallel.
pub fn execute(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    config.validate()?;
    let models = load_models(config)?;
    let objectives: BTreeMap<FunctionId, Arc<_>> = config
        .functions
        .iter()
        .map(|&f| Ok((f, Arc::new(make_objective(f, config.dim, config.fn_seed)?))))
        .collect::<Result<_, HarnessError>>()?;
    let jobs: Vec<(FunctionId, Algorithm, usize)> = config
        .functions
        .iter()
        .flat_map(|&f| {
            config
                .algorithms
                .iter()
                .flat_map(move |&a| (0..config.runs).map(move |k| (f, a, k)))
        })
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(f, a, k)| {
            let seed = config.seed.wrapping_add(k as u64);
            run_algorithm(
                a,
                Arc::clone(&objectives[&f]),
                config.budget,
                config.swarm_size,
                seed,
                models.get(&a),
            )
            .map(|rec| (a, k, rec))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut fits: FinalFits = BTreeMap::new();
    for (a, _, rec) in &records {
        fits.entry((rec.function, *a)).or_default().push(rec.final_fit);
    }
    let summary = summarize(&config.functions, &config.algorithms, config.baseline, &fits);
    Ok(ExperimentOutput { records, summary })
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), HarnessError> {
    let mut file = fs::File::create(path).map_err(|source| HarnessError::WriteOutput {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(contents).map_err(|source| HarnessError::WriteOutput {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `curves/<function>_<algorithm>_runNNN.csv` and `summary.csv`
/// under `out_dir`. Returns the summary path.
pub fn write_outputs(out_dir: &Path, output: &ExperimentOutput) -> Result<PathBuf, HarnessError> {
    let curves = out_dir.join("curves");
    fs::create_dir_all(&curves).map_err(|source| HarnessError::WriteOutput {
        path: curves.clone(),
        source,
    })?;
    for (algo, run, rec) in &output.records {
        let path = curves.join(curve_file_name(rec.function, *algo, *run));
        write_file(&path, rec.curve_csv().as_bytes())?;
    }
    let summary = out_dir.join("summary.csv");
    write_file(&summary, output.summary.to_csv().as_bytes())?;
    Ok(summary)
}

/// [`execute`] followed by [`write_outputs`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    let output = execute(config)?;
    write_outputs(&config.out_dir, &output)?;
    Ok(output)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fits(pairs: &[((FunctionId, Algorithm), Vec<f64>)]) -> FinalFits {
        pairs.iter().cloned().collect()
    }

    #[test]
    fn baseline_against_itself_is_all_ties() {
        let f = fits(&[
            ((FunctionId::Sphere, Algorithm::Pso), vec![1.0, 2.0, 3.0]),
            ((FunctionId::Rastrigin, Algorithm::Pso), vec![4.0, 5.0, 6.0]),
        ]);
        let s = summarize(&[FunctionId::Sphere, FunctionId::Rastrigin], &[Algorithm::Pso], Algorithm::Pso, &f);
        let agg = s.aggregate(Algorithm::Pso).unwrap();
        assert_eq!((agg.wins, agg.losses), (0, 0));
        assert!(s.rows.iter().all(|r| r.wins == 0 && r.losses == 0 && r.p_value.is_none()));
    }

    #[test]
    fn wins_losses_and_ties_cover_every_function() {
        let f = fits(&[
            ((FunctionId::Sphere, Algorithm::Pso), vec![1.0; 5]),
            ((FunctionId::Sphere, Algorithm::Clpso), vec![0.5; 5]),
            ((FunctionId::Rastrigin, Algorithm::Pso), vec![1.0; 5]),
            ((FunctionId::Rastrigin, Algorithm::Clpso), vec![2.0; 5]),
            ((FunctionId::Griewank, Algorithm::Pso), vec![1.0; 5]),
            ((FunctionId::Griewank, Algorithm::Clpso), vec![1.0; 5]),
        ]);
        let functions = [FunctionId::Sphere, FunctionId::Rastrigin, FunctionId::Griewank];
        let s = summarize(&functions, &[Algorithm::Pso, Algorithm::Clpso], Algorithm::Pso, &f);
        let agg = s.aggregate(Algorithm::Clpso).unwrap();
        assert_eq!((agg.wins, agg.losses), (1, 1));
        let row = s.row(FunctionId::Sphere, Algorithm::Clpso).unwrap();
        assert_eq!((row.wins, row.losses), (5, 0));
        let csv = s.to_csv();
        assert!(csv.starts_with(SUMMARY_HEADER));
        assert_eq!(csv.lines().count(), 1 + 3 * 2 + 2);
    }
}
