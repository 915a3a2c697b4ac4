//! k-fold cross-validation with rotating train/prune/test roles.
//!
//! In run `r` of `k`, fold `r` is the test fold, fold `(r + 1) % k` is the
//! pruning fold and the remaining folds form the training corpus. Each
//! pipeline configuration extracts a grammar from training, optionally
//! drops singleton rules, prunes, brackets the test fold, optionally
//! repairs, and is scored against the test fold's reference NPs.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use crate::bracketer::bracket_corpus;
use crate::corpus::{fold_assignment, select, Corpus};
use crate::error::{Error, Result};
use crate::grammar::{drop_singletons, extract_grammar, Grammar, RuleTrie};
use crate::num::{mean, percent};
use crate::pruner::{
    prune_by_class, prune_incremental, prune_threshold, IncrementalConfig, RuleClassFilter,
    TagsetMap,
};
use crate::repair::{repair, RepairConfig};
use crate::scorer::{evaluate, EvalReport};
use crate::{Fraction, Real};

#[derive(Clone, Debug, PartialEq)]
pub enum PruneMethod {
    /// The extracted grammar as is.
    Initial,
    Threshold {
        threshold: i64,
    },
    Incremental(IncrementalConfig),
    /// Rule-class filtering with a tag classification.
    Classes {
        filters: BTreeSet<RuleClassFilter>,
        tagset: TagsetMap,
    },
}

impl PruneMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PruneMethod::Initial => "initial",
            PruneMethod::Threshold { .. } => "threshold",
            PruneMethod::Incremental(_) => "incremental",
            PruneMethod::Classes { .. } => "classes",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub method: PruneMethod,
    pub drop_singletons: bool,
    pub repair: bool,
}

impl PipelineConfig {
    pub fn new(method: PruneMethod) -> Self {
        PipelineConfig {
            method,
            drop_singletons: false,
            repair: false,
        }
    }

    /// e.g. `incremental`, `threshold+repair`, `classes+nosingletons+repair`.
    pub fn name(&self) -> String {
        let mut name = self.method.name().to_string();
        if self.drop_singletons {
            name.push_str("+nosingletons");
        }
        if self.repair {
            name.push_str("+repair");
        }
        name
    }
}

/// Parameters shared by the pruning methods of a configuration grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PruneParams {
    pub threshold: i64,
    pub incremental: IncrementalConfig,
    pub filters: BTreeSet<RuleClassFilter>,
    pub tagset: TagsetMap,
}

impl Default for PruneParams {
    fn default() -> Self {
        PruneParams {
            threshold: 1,
            incremental: IncrementalConfig::default(),
            filters: RuleClassFilter::ALL.into_iter().collect(),
            tagset: TagsetMap::penn(),
        }
    }
}

impl PruneParams {
    pub fn methods(&self) -> Vec<PruneMethod> {
        vec![
            PruneMethod::Initial,
            PruneMethod::Threshold {
                threshold: self.threshold,
            },
            PruneMethod::Incremental(self.incremental),
            PruneMethod::Classes {
                filters: self.filters.clone(),
                tagset: self.tagset.clone(),
            },
        ]
    }
}

/// Which configurations to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConfigGrid {
    /// Initial, threshold, incremental and class-filtered grammars.
    Methods,
    /// Threshold and incremental, each with and without repair.
    Repair,
    /// Every method with and without repair and singleton dropping.
    Full,
}

impl ConfigGrid {
    pub fn configs(self, params: &PruneParams) -> Vec<PipelineConfig> {
        let methods = params.methods();
        match self {
            ConfigGrid::Methods => methods.into_iter().map(PipelineConfig::new).collect(),
            ConfigGrid::Repair => methods[1..3]
                .iter()
                .flat_map(|m| {
                    [false, true].map(|repair| PipelineConfig {
                        repair,
                        ..PipelineConfig::new(m.clone())
                    })
                })
                .collect(),
            ConfigGrid::Full => {
                let mut out = Vec::new();
                for drop in [false, true] {
                    for m in &methods {
                        for repair in [false, true] {
                            out.push(PipelineConfig {
                                method: m.clone(),
                                drop_singletons: drop,
                                repair,
                            });
                        }
                    }
                }
                out
            }
        }
    }
}

/// Fold roles for one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldRoles {
    pub test: usize,
    pub prune: usize,
    pub train: Vec<usize>,
}

/// Role rotation over `k` folds.
pub fn fold_plan(k: usize) -> Result<Vec<FoldRoles>> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "cross-validation needs at least 3 folds, got {k}"
        )));
    }
    Ok((0..k)
        .map(|test| {
            let prune = (test + 1) % k;
            FoldRoles {
                test,
                prune,
                train: (0..k).filter(|&f| f != test && f != prune).collect(),
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigResult {
    pub config: String,
    /// Test-fold counts.
    pub test: EvalReport,
    /// Precision of the final grammar on the pruning corpus.
    pub prune_precision: Fraction,
    pub rules: usize,
    /// Scoring passes made by the pruner (0 for methods without scoring).
    pub passes: usize,
}

/// A fold: its sentences and their ids in the original data.
#[derive(Clone, Debug)]
pub struct Fold {
    pub corpus: Corpus,
    pub ids: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub roles: FoldRoles,
    /// Sentence ids used in each role, for provenance checks.
    pub train_ids: Vec<usize>,
    pub prune_ids: Vec<usize>,
    pub test_ids: Vec<usize>,
    pub initial_rules: usize,
    pub results: Vec<ConfigResult>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigSummary {
    pub config: String,
    /// Mean of the per-fold precisions.
    pub precision: Real,
    /// Mean of the per-fold recalls.
    pub recall: Real,
    /// Counts pooled over folds.
    pub micro: EvalReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossvalResult {
    pub corpus: String,
    pub runs: Vec<RunRecord>,
    pub summary: Vec<ConfigSummary>,
}

#[derive(Clone, Debug, Default)]
pub struct CrossvalOptions {
    pub repair: RepairConfig,
    /// Worker threads for the runs; 0 or 1 runs them in sequence.
    pub jobs: usize,
}

/// Applies one pruning method to `grammar`, returning the pruned grammar
/// and the number of scoring passes.
pub fn apply_method(
    grammar: &Grammar,
    pruning: &Corpus,
    method: &PruneMethod,
) -> Result<(Grammar, usize)> {
    Ok(match method {
        PruneMethod::Initial => (grammar.clone(), 0),
        PruneMethod::Threshold { threshold } => {
            let out = prune_threshold(grammar, pruning, *threshold);
            (out.grammar, out.passes)
        }
        PruneMethod::Incremental(config) => {
            let out = prune_incremental(grammar, pruning, *config);
            (out.grammar, out.passes)
        }
        PruneMethod::Classes { filters, tagset } => (prune_by_class(grammar, filters, tagset)?, 0),
    })
}

/// Runs every configuration with fixed training, pruning and test corpora.
pub fn run_single(
    train: &Corpus,
    pruning: &Corpus,
    test: &Corpus,
    configs: &[PipelineConfig],
    repair_config: &RepairConfig,
) -> Result<Vec<ConfigResult>> {
    let initial = extract_grammar(train);
    let reduced = drop_singletons(&initial);
    let unbracketed = test.unbracketed();
    // Repair toggles share a pruned grammar.
    let mut cache: Vec<(PruneMethod, bool, Grammar, usize, Fraction)> = Vec::new();
    let mut results = Vec::with_capacity(configs.len());
    for config in configs {
        let cached = cache
            .iter()
            .position(|(m, d, ..)| *m == config.method && *d == config.drop_singletons);
        let index = match cached {
            Some(i) => i,
            None => {
                let base = if config.drop_singletons {
                    &reduced
                } else {
                    &initial
                };
                let (grammar, passes) = apply_method(base, pruning, &config.method)?;
                let trie = RuleTrie::compile(&grammar);
                let precision =
                    evaluate(&bracket_corpus(pruning, &trie), pruning)?.exact_precision();
                cache.push((
                    config.method.clone(),
                    config.drop_singletons,
                    grammar,
                    passes,
                    precision,
                ));
                cache.len() - 1
            }
        };
        let (_, _, grammar, passes, prune_precision) = &cache[index];
        let mut proposed = bracket_corpus(&unbracketed, &RuleTrie::compile(grammar));
        if config.repair {
            proposed = repair(&proposed, repair_config);
        }
        results.push(ConfigResult {
            config: config.name(),
            test: evaluate(&proposed, test)?,
            prune_precision: *prune_precision,
            rules: grammar.len(),
            passes: *passes,
        });
    }
    Ok(results)
}

fn run_fold_roles(
    folds: &[Fold],
    roles: FoldRoles,
    configs: &[PipelineConfig],
    options: &CrossvalOptions,
) -> Result<RunRecord> {
    let train = Corpus::concat(roles.train.iter().map(|&f| &folds[f].corpus), "train");
    let train_ids = roles
        .train
        .iter()
        .flat_map(|&f| folds[f].ids.iter().copied())
        .collect();
    let pruning = &folds[roles.prune].corpus;
    let test = &folds[roles.test].corpus;
    let results = run_single(&train, pruning, test, configs, &options.repair)?;
    Ok(RunRecord {
        train_ids,
        prune_ids: folds[roles.prune].ids.clone(),
        test_ids: folds[roles.test].ids.clone(),
        initial_rules: extract_grammar(&train).len(),
        roles,
        results,
    })
}

/// Cross-validation over explicit folds (e.g. one file per fold).
pub fn run_crossval_folds(
    folds: &[Fold],
    configs: &[PipelineConfig],
    options: &CrossvalOptions,
    corpus_name: &str,
) -> Result<CrossvalResult> {
    let plan = fold_plan(folds.len())?;
    if configs.is_empty() {
        return Err(Error::InvalidArgument("no pipeline configurations".into()));
    }
    options.repair.validate()?;
    let runs: Vec<RunRecord> = if options.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.jobs)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        pool.install(|| {
            plan.into_par_iter()
                .map(|roles| run_fold_roles(folds, roles, configs, options))
                .collect::<Result<_>>()
        })?
    } else {
        plan.into_iter()
            .map(|roles| run_fold_roles(folds, roles, configs, options))
            .collect::<Result<_>>()?
    };
    let summary = configs
        .iter()
        .enumerate()
        .map(|(i, config)| {
            let per_fold: Vec<&EvalReport> = runs.iter().map(|r| &r.results[i].test).collect();
            let mut micro = EvalReport::default();
            for r in &per_fold {
                micro.merge(r);
            }
            ConfigSummary {
                config: config.name(),
                precision: mean(per_fold.iter().map(|r| r.precision_as::<Real>())),
                recall: mean(per_fold.iter().map(|r| r.recall_as::<Real>())),
                micro,
            }
        })
        .collect();
    Ok(CrossvalResult {
        corpus: corpus_name.to_string(),
        runs,
        summary,
    })
}

/// Seeded k-fold cross-validation over one corpus.
pub fn run_crossval(
    corpus: &Corpus,
    k: usize,
    seed: u64,
    configs: &[PipelineConfig],
    options: &CrossvalOptions,
) -> Result<CrossvalResult> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "cross-validation needs at least 3 folds, got {k}"
        )));
    }
    let folds: Vec<Fold> = fold_assignment(corpus.len(), k, seed)?
        .into_iter()
        .enumerate()
        .map(|(i, ids)| Fold {
            corpus: select(corpus, &ids, &format!("{}#fold{i}", corpus.source)),
            ids,
        })
        .collect();
    run_crossval_folds(&folds, configs, options, &corpus.source)
}

impl CrossvalResult {
    pub fn summary_for(&self, config: &str) -> Option<&ConfigSummary> {
        self.summary.iter().find(|s| s.config == config)
    }

    /// Per-run rows: `run,test_fold,prune_fold,config,rules,proposed,correct,reference,precision,recall,prune_precision`.
    pub fn write_runs_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "run,test_fold,prune_fold,config,rules,proposed,correct,reference,precision,recall,prune_precision"
        )?;
        for (i, run) in self.runs.iter().enumerate() {
            for r in &run.results {
                writeln!(
                    out,
                    "{i},{},{},{},{},{},{},{},{:.6},{:.6},{:.6}",
                    run.roles.test,
                    run.roles.prune,
                    r.config,
                    r.rules,
                    r.test.proposed,
                    r.test.correct,
                    r.test.reference,
                    r.test.precision(),
                    r.test.recall(),
                    crate::num::Scalar::to_f64(r.prune_precision),
                )?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Averaged rows: `corpus,config,P,R,micro_P,micro_R` (percentages).
    pub fn write_summary_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "corpus,config,P,R,micro_P,micro_R")?;
        for s in &self.summary {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                self.corpus,
                s.config,
                percent(s.precision),
                percent(s.recall),
                percent(s.micro.precision()),
                percent(s.micro.recall()),
            )?;
        }
        out.flush()?;
        Ok(())
    }

    /// Aligned text table with columns `corpus, config, P, R`.
    pub fn table(&self) -> String {
        let corpus_w = self.corpus.len().max("corpus".len());
        let config_w = self
            .summary
            .iter()
            .map(|s| s.config.len())
            .max()
            .unwrap_or(0)
            .max("config".len());
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<corpus_w$}  {:<config_w$}  {:>5}  {:>5}",
            "corpus", "config", "P", "R"
        );
        for s in &self.summary {
            let _ = writeln!(
                out,
                "{:<corpus_w$}  {:<config_w$}  {:>5}  {:>5}",
                self.corpus,
                s.config,
                percent(s.precision),
                percent(s.recall)
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, SyntheticConfig};

    #[test]
    fn plan_rotation() {
        let plan = fold_plan(5).unwrap();
        assert_eq!(plan.len(), 5);
        for (r, roles) in plan.iter().enumerate() {
            assert_eq!(roles.test, r);
            assert_eq!(roles.prune, (r + 1) % 5);
            assert_eq!(roles.train.len(), 3);
            let mut all: Vec<usize> = roles.train.clone();
            all.extend([roles.test, roles.prune]);
            all.sort_unstable();
            assert_eq!(all, vec![0, 1, 2, 3, 4]);
        }
        assert!(matches!(fold_plan(2), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn config_names_and_grids() {
        let params = PruneParams::default();
        assert_eq!(ConfigGrid::Methods.configs(&params).len(), 4);
        let repair: Vec<String> = ConfigGrid::Repair
            .configs(&params)
            .iter()
            .map(PipelineConfig::name)
            .collect();
        assert_eq!(
            repair,
            [
                "threshold",
                "threshold+repair",
                "incremental",
                "incremental+repair"
            ]
        );
        let full = ConfigGrid::Full.configs(&params);
        assert_eq!(full.len(), 16);
        let names: BTreeSet<String> = full.iter().map(PipelineConfig::name).collect();
        assert_eq!(names.len(), 16);
        assert!(names.contains("classes+nosingletons+repair"));
    }

    #[test]
    fn too_few_folds() {
        let c = generate(&SyntheticConfig {
            sentences: 20,
            ..Default::default()
        });
        let configs = ConfigGrid::Methods.configs(&PruneParams::default());
        assert!(run_crossval(&c, 2, 0, &configs, &CrossvalOptions::default()).is_err());
    }

    #[test]
    fn table_layout() {
        let c = generate(&SyntheticConfig {
            sentences: 60,
            ..Default::default()
        });
        let configs = vec![PipelineConfig::new(PruneMethod::Initial)];
        let result = run_crossval(&c, 3, 1, &configs, &CrossvalOptions::default()).unwrap();
        let table = result.table();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("corpus"));
        assert!(lines[1].contains("initial"));
        let mut csv = Vec::new();
        result.write_runs_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 4);
    }
}
