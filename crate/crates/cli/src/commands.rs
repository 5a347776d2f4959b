use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use langxfer::boosting::{Ensemble, TrainConfig, MODEL_FORMAT};
use langxfer::features::{
    assemble_all_pairs, default_seen_set, DatasetTable, FeatureSources, FeatureTable, ProfileTable, DSSTATS_FORMAT,
    FEATVEC_FORMAT, LANGPROF_FORMAT,
};
use langxfer::lexing::{build_histogram, DefinitionSet, TokenHistogram, LANGDEF_FORMAT, TOKHIST_FORMAT};
use langxfer::ranking::{loo_cv, rank_sources, train_ranker, EvalConfig, HistoryGraph, Method, PLHIST_FORMAT};
use langxfer::shap::{aggregate_importance, SHAPIMP_FORMAT, SHAP_VARIANT};
use langxfer::stats::{
    best_source_per_target, best_sources_csv, hierarchical_cluster, load_scores, rank_sources as rank_source_langs,
    rank_targets, render_svg, summary_csv, summary_scores, Axis, ScoreMatrix, TargetFilter, DISTANCE, LINKAGE,
    SCORES_FORMAT,
};
use serde_json::json;

use crate::manifest::{beside, Recorder};
use crate::{
    AxisArg, CliError, ClusterArgs, EvaluateArgs, ExplainArgs, FeaturesArgs, PairsArgs, RankArgs, StatsArgs,
    TrainArgs, TrainingOpts,
};

type Res = Result<(), CliError>;

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    out.sort();
    Ok(out)
}

fn warn(msg: impl AsRef<str>) {
    eprintln!("langxfer: warning: {}", msg.as_ref());
}

pub fn features(a: &FeaturesArgs) -> Res {
    if !a.corpus.is_dir() {
        return Err(CliError::Data(format!("{}: corpus root is not a directory", a.corpus.display())));
    }
    let mut rec = Recorder::new(
        "features",
        a.out.join("manifest.json"),
        json!({ "max_files": a.max_files, "langdefs": a.langdefs.as_ref().map(|p| p.display().to_string()) }),
        Some(a.seed),
    );
    let defs = match &a.langdefs {
        Some(dir) => {
            for p in sorted_entries(dir)?.into_iter().filter(|p| p.extension().is_some_and(|x| x == "toml")) {
                rec.input(&p, LANGDEF_FORMAT)?;
            }
            DefinitionSet::load_dir(dir)?
        }
        None => DefinitionSet::shipped(),
    };

    let mut built = 0;
    for dir in sorted_entries(&a.corpus)?.into_iter().filter(|p| p.is_dir()) {
        let lang = dir.file_name().unwrap_or_default().to_string_lossy().to_string();
        let Some(def) = defs.get(&lang) else {
            warn(format!("{}: no language definition for `{lang}`; skipped", dir.display()));
            continue;
        };
        let build = match build_histogram(&dir, def, a.max_files, a.seed) {
            Ok(b) => b,
            Err(langxfer::Error::EmptyCorpus(_)) => {
                warn(format!("{}: no readable `{lang}` files; skipped", dir.display()));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        for d in &build.diagnostics {
            warn(d);
        }
        for f in &build.files {
            rec.input(f, "source")?;
        }
        rec.write(&a.out.join(format!("{lang}.tokhist")), &build.histogram.to_tokhist())?;
        built += 1;
    }
    if built == 0 {
        return Err(langxfer::Error::EmptyCorpus(a.corpus.clone()).into());
    }
    rec.finish()?;
    Ok(())
}

fn read_seen(path: &Path) -> Result<BTreeSet<String>, CliError> {
    Ok(read_text(path)?
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

pub fn pairs(a: &PairsArgs) -> Res {
    let mut rec = Recorder::new("pairs", beside(&a.out), json!({}), None);
    let profiles = match &a.profiles {
        Some(p) => {
            rec.input(p, LANGPROF_FORMAT)?;
            ProfileTable::load(p)?
        }
        None => ProfileTable::shipped(),
    };
    for w in profiles.warnings() {
        warn(w);
    }
    let mut histograms = BTreeMap::new();
    for p in sorted_entries(&a.histograms)?.into_iter().filter(|p| p.extension().is_some_and(|x| x == "tokhist")) {
        rec.input(&p, TOKHIST_FORMAT)?;
        let h = TokenHistogram::load(&p)?;
        if histograms.insert(h.language().to_string(), h).is_some() {
            return Err(CliError::Data(format!("{}: second histogram for one language", p.display())));
        }
    }
    let dataset = match &a.dataset {
        Some(p) => {
            rec.input(p, DSSTATS_FORMAT)?;
            Some(DatasetTable::load(p)?)
        }
        None => None,
    };
    let seen = match &a.seen {
        Some(p) => {
            rec.input(p, "text")?;
            read_seen(p)?
        }
        None => default_seen_set(),
    };
    for lang in histograms.keys().filter(|l| profiles.get(l).is_none()) {
        warn(format!("`{lang}` has a histogram but no profile; left out"));
    }
    let languages: Vec<String> =
        profiles.languages().filter(|l| histograms.contains_key(*l)).map(str::to_string).collect();
    if languages.is_empty() {
        return Err(CliError::Data("no language has both a profile and a histogram".into()));
    }
    let sources = FeatureSources { profiles: &profiles, histograms: &histograms, dataset: dataset.as_ref(), seen: &seen };
    let table = assemble_all_pairs(&sources, &languages)?;
    rec.write(&a.out, &table.to_csv())?;
    rec.finish()?;
    Ok(())
}

fn pick_task(matrices: Vec<ScoreMatrix>, task: Option<&str>, path: &Path) -> Result<ScoreMatrix, CliError> {
    match task {
        Some(t) => matrices
            .into_iter()
            .find(|m| m.task() == t)
            .ok_or_else(|| CliError::Data(format!("{}: no task `{t}`", path.display()))),
        None if matrices.len() == 1 => Ok(matrices.into_iter().next().expect("one matrix")),
        None => Err(CliError::Usage(format!("{} holds several tasks; pass --task", path.display()))),
    }
}

fn eval_config(t: &TrainingOpts, k: usize, graph: Option<HistoryGraph>) -> Result<EvalConfig, CliError> {
    let train = TrainConfig {
        num_trees: t.trees,
        max_leaves: t.leaves,
        learning_rate: t.learning_rate,
        seed: t.seed,
        ..TrainConfig::default()
    };
    train.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    if t.grades < 2 {
        return Err(CliError::Usage("--grades must be at least 2".into()));
    }
    Ok(EvalConfig { k, num_grades: t.grades, include_mono: t.include_mono, train, graph })
}

pub fn train(a: &TrainArgs) -> Res {
    let method = Method::from(a.method);
    if method == Method::History {
        return Err(CliError::Usage("the history method has nothing to train; use `evaluate`".into()));
    }
    let config = eval_config(&a.training, 3, None)?;
    let mut rec = Recorder::new(
        "train",
        beside(&a.out),
        json!({ "method": method.as_str(), "task": a.task, "num_grades": config.num_grades,
                "include_mono": config.include_mono, "train": config.train }),
        Some(a.training.seed),
    );
    rec.input(&a.scores, SCORES_FORMAT)?;
    rec.input(&a.features, FEATVEC_FORMAT)?;
    let matrix = pick_task(load_scores(&a.scores)?, a.task.as_deref(), &a.scores)?;
    let features = FeatureTable::load(&a.features)?;
    let targets: Vec<String> = matrix.targets().map(str::to_string).collect();
    let mut warnings = Vec::new();
    let model = train_ranker(&matrix, &features, &targets, method, &config, &mut warnings)?;
    warnings.iter().for_each(warn);
    rec.write(&a.out, &model.to_json()?)?;
    rec.finish()?;
    Ok(())
}

pub fn rank(a: &RankArgs) -> Res {
    if a.k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let mut rec = Recorder::new(
        "rank",
        beside(&a.out),
        json!({ "target": a.target, "k": a.k, "include_mono": a.include_mono }),
        None,
    );
    rec.input(&a.model, MODEL_FORMAT)?;
    rec.input(&a.features, FEATVEC_FORMAT)?;
    let model = Ensemble::load(&a.model)?;
    let features = FeatureTable::load(&a.features)?;
    let candidates: Vec<_> =
        features.for_target(&a.target).filter(|v| a.include_mono || v.source != a.target).collect();
    if candidates.is_empty() {
        return Err(CliError::Data(format!("no candidate sources for target `{}`", a.target)));
    }
    let ranked = rank_sources(&model, &a.target, &candidates, a.k)?;
    let mut out = String::from("rank,source,score\n");
    for (i, (s, v)) in ranked.iter().enumerate() {
        out.push_str(&format!("{},{s},{v}\n", i + 1));
    }
    rec.write(&a.out, &out)?;
    rec.finish()?;
    Ok(())
}

pub fn evaluate(a: &EvaluateArgs) -> Res {
    let method = Method::from(a.method);
    let mut rec = Recorder::new(
        "evaluate",
        beside(&a.out),
        json!({ "method": method.as_str(), "task": a.task, "k": a.k, "num_grades": a.training.grades,
                "include_mono": a.training.include_mono,
                "graph": a.graph.as_ref().map(|p| p.display().to_string()) }),
        Some(a.training.seed),
    );
    let graph = match &a.graph {
        Some(p) => {
            rec.input(p, PLHIST_FORMAT)?;
            Some(HistoryGraph::load(p)?)
        }
        None => None,
    };
    let config = eval_config(&a.training, a.k, graph)?;
    rec.input(&a.scores, SCORES_FORMAT)?;
    rec.input(&a.features, FEATVEC_FORMAT)?;
    let matrix = pick_task(load_scores(&a.scores)?, a.task.as_deref(), &a.scores)?;
    let features = FeatureTable::load(&a.features)?;
    let report = loo_cv(&matrix, &features, method, &config)?;
    report.warnings.iter().for_each(warn);
    rec.write(&a.out, &report.to_csv())?;
    rec.finish()?;
    Ok(())
}

pub fn explain(a: &ExplainArgs) -> Res {
    let mut rec = Recorder::new("explain", beside(&a.out), json!({ "task": a.task, "variant": SHAP_VARIANT, "output_format": SHAPIMP_FORMAT }), None);
    rec.input(&a.model, MODEL_FORMAT)?;
    rec.input(&a.features, FEATVEC_FORMAT)?;
    let model = Ensemble::load(&a.model)?;
    let features = FeatureTable::load(&a.features)?;
    let scored: Option<ScoreMatrix> = match &a.scores {
        Some(p) => {
            rec.input(p, SCORES_FORMAT)?;
            Some(pick_task(load_scores(p)?, Some(&a.task), p)?)
        }
        None => None,
    };
    let rows: Vec<&[f64]> = features
        .iter()
        .filter(|v| scored.as_ref().is_none_or(|m| m.get(&v.source, &v.target).is_some()))
        .map(|v| v.values.as_slice())
        .collect();
    if rows.is_empty() {
        return Err(CliError::Data(format!("task `{}`: no pairs to explain", a.task)));
    }
    let table = aggregate_importance(&model, &rows, &a.task)?;
    if table.all_zero {
        warn(format!("task `{}`: every importance is zero", a.task));
    }
    rec.write(&a.out, &table.to_csv())?;
    rec.finish()?;
    Ok(())
}

/// Concatenates CSV documents that share a header.
fn concat_csv(parts: impl IntoIterator<Item = String>) -> String {
    let mut out = String::new();
    for (i, p) in parts.into_iter().enumerate() {
        if i == 0 {
            out.push_str(&p);
        } else {
            out.push_str(p.split_once('\n').map_or("", |x| x.1));
        }
    }
    out
}

pub fn stats(a: &StatsArgs) -> Res {
    let mut rec = Recorder::new("stats", a.out.join("manifest.json"), json!({}), None);
    rec.input(&a.scores, SCORES_FORMAT)?;
    let matrices = load_scores(&a.scores)?;
    if matrices.is_empty() {
        return Err(CliError::Data(format!("{}: no scores", a.scores.display())));
    }
    let summary: Vec<_> = matrices.iter().map(summary_scores).collect::<Result<_, _>>()?;
    rec.write(&a.out.join("summary.csv"), &summary_csv(&summary))?;

    let all = rank_source_langs(&matrices, None, TargetFilter::All)?;
    let targets = rank_targets(&matrices, None)?;
    for w in all.warnings.iter().chain(&targets.warnings) {
        warn(w);
    }
    rec.write(&a.out.join("source_ranks.csv"), &all.to_csv())?;
    rec.write(&a.out.join("target_ranks.csv"), &targets.to_csv())?;
    if matrices.iter().any(|m| m.targets().any(|t| m.is_low_resource(t))) {
        let low = rank_source_langs(&matrices, None, TargetFilter::LowResourceOnly)?;
        low.warnings.iter().for_each(warn);
        rec.write(&a.out.join("source_ranks_low_resource.csv"), &low.to_csv())?;
    } else {
        warn("no low-resource targets; low-resource source ranking not written");
    }

    let best = concat_csv(matrices.iter().map(|m| best_sources_csv(m.task(), &best_source_per_target(m))));
    rec.write(&a.out.join("best_sources.csv"), &best)?;
    for m in &matrices {
        let sources: Vec<&str> = m.sources().collect();
        let targets: Vec<&str> = m.targets().collect();
        let name: String = m.task().chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
        rec.write(&a.out.join(format!("heatmap_{name}.svg")), &render_svg(m, &sources, &targets))?;
    }
    rec.finish()?;
    Ok(())
}

pub fn cluster(a: &ClusterArgs) -> Res {
    let axis = match a.axis {
        AxisArg::Sources => Axis::Rows,
        AxisArg::Targets => Axis::Columns,
    };
    let mut rec = Recorder::new(
        "cluster",
        beside(&a.out),
        json!({ "task": a.task, "axis": format!("{:?}", a.axis).to_lowercase(), "linkage": LINKAGE, "distance": DISTANCE }),
        None,
    );
    rec.input(&a.scores, SCORES_FORMAT)?;
    let matrix = pick_task(load_scores(&a.scores)?, a.task.as_deref(), &a.scores)?;
    let d = hierarchical_cluster(&matrix, axis)?;
    let out = format!("tree\t{}\norder\t{}\n", d.to_tree_string(), d.ordered_labels().join(","));
    rec.write(&a.out, &out)?;
    rec.finish()?;
    Ok(())
}
