use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use afsdf::cascade::{fit_cascade, LayerRecord};
use afsdf::dataset::{
    load_csv, load_csv_with_schema, load_feature_matrix, stratified_holdout, synth_generate,
    SyntheticSpec,
};
use afsdf::evaluation::{
    crossval_evaluate_with, evaluate_probabilities, EvaluationReport, FoldMetrics, LogRegConfig,
    ModelSpec, RocCurve,
};
use afsdf::forest::ForestConfig;
use afsdf::persistence::{load_model, save_model};
use afsdf::{CascadeModel, Dataset};
use anyhow::{bail, Context, Result};
use serde::Serialize;

use crate::args::{
    CvArgs, EvaluateArgs, ImportanceArgs, ModelArg, PredictArgs, SynthArgs, TrainArgs,
};

/// Opens `path` for writing, or stdout when absent.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn load_labeled(path: &Path, label_col: &str) -> Result<Dataset> {
    load_csv(path, label_col).with_context(|| format!("cannot load {}", path.display()))
}

fn load_archive(path: &Path) -> Result<CascadeModel> {
    load_model(path).with_context(|| format!("cannot load model {}", path.display()))
}

#[derive(Serialize)]
struct Metrics {
    acc: f64,
    sen: f64,
    spe: f64,
    auc: f64,
}

impl From<&EvaluationReport> for Metrics {
    fn from(r: &EvaluationReport) -> Self {
        Metrics {
            acc: r.acc,
            sen: r.sen,
            spe: r.spe,
            auc: r.auc,
        }
    }
}

#[derive(Serialize)]
struct TrainReport<'a> {
    model: String,
    n_train: usize,
    n_holdout: usize,
    n_original_features: usize,
    class_names: &'a [String],
    forests: String,
    discard_ratio: f64,
    selection_enabled: bool,
    mask_scope: afsdf::MaskScope,
    seed: u64,
    layers: &'a [LayerRecord],
    n_layers: usize,
    best_layer: usize,
    best_score: f64,
    carried_features: usize,
    output_dim: usize,
    holdout: Option<Metrics>,
}

pub fn train(args: &TrainArgs) -> Result<()> {
    let run = &args.run;
    let config = run.cascade_config(run.folds)?;
    let data = load_labeled(&run.data, &run.label_col)?;
    let (train_set, test_set) = match args.holdout {
        Some(frac) => {
            let (tr, te) = stratified_holdout(data.labels(), data.n_classes(), frac, run.seed)?;
            (data.subset(&tr)?, Some(data.subset(&te)?))
        }
        None => (data, None),
    };
    let model = fit_cascade(&train_set, &config)?;
    save_model(&model, &args.model)
        .with_context(|| format!("cannot write model {}", args.model.display()))?;

    let holdout = match &test_set {
        Some(test) => {
            if model.n_classes != 2 {
                bail!(
                    "--holdout metrics need a binary label column, found {} classes",
                    model.n_classes
                );
            }
            let probas = model.predict_proba(test.features())?;
            Some(Metrics::from(&evaluate_probabilities(
                test.labels(),
                &probas,
                1,
            )?))
        }
        None => None,
    };
    let report = TrainReport {
        model: args.model.display().to_string(),
        n_train: train_set.n_samples(),
        n_holdout: test_set.as_ref().map_or(0, Dataset::n_samples),
        n_original_features: model.n_original_features,
        class_names: &model.class_names,
        forests: run.forests_canonical()?,
        discard_ratio: config.discard_ratio,
        selection_enabled: config.selection_enabled(),
        mask_scope: config.mask_scope,
        seed: config.seed,
        layers: &model.training_log,
        n_layers: model.n_layers(),
        best_layer: model.n_layers() - 1,
        best_score: model.best_score(),
        carried_features: model.last_layer().mask.len(),
        output_dim: model.last_layer().output_dim,
        holdout,
    };
    write_json(&report, args.out.as_deref())
}

pub fn predict(args: &PredictArgs) -> Result<()> {
    let model = load_archive(&args.model)?;
    let (features, raw, header) = load_feature_matrix(&args.data, &model.feature_names)
        .with_context(|| format!("cannot read features from {}", args.data.display()))?;
    let probas = model.predict_proba(&features)?;
    let labels = model.predict_label(&features)?;
    let id_col = header.iter().position(|h| h == "id");

    let mut out = csv::Writer::from_writer(sink(args.out.as_deref())?);
    let mut head = vec!["id".to_owned()];
    head.extend(model.class_names.iter().map(|c| format!("p_{c}")));
    head.push("label".into());
    out.write_record(&head)?;
    for (i, row) in probas.rows().enumerate() {
        let mut record = vec![id_col.map_or_else(|| i.to_string(), |c| raw[i][c].clone())];
        record.extend(row.iter().map(f64::to_string));
        record.push(model.class_names[labels[i]].clone());
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

fn write_roc(curves: &[(&str, &RocCurve)], path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = csv::Writer::from_writer(file);
    let named = curves.len() > 1;
    if named {
        out.write_record(["model", "fpr", "tpr", "threshold"])?;
    } else {
        out.write_record(["fpr", "tpr", "threshold"])?;
    }
    for (name, curve) in curves {
        for p in &curve.points {
            let threshold = p
                .threshold
                .map_or_else(|| "inf".to_owned(), |t| t.to_string());
            let mut record = vec![p.fpr.to_string(), p.tpr.to_string(), threshold];
            if named {
                record.insert(0, name.to_string());
            }
            out.write_record(&record)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct EvaluateReport<'a> {
    n_samples: usize,
    positive_class: &'a str,
    confusion: afsdf::evaluation::ConfusionMatrix,
    #[serde(flatten)]
    metrics: Metrics,
}

pub fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let model = load_archive(&args.model)?;
    let data = load_csv_with_schema(
        &args.data,
        &args.label_col,
        &model.feature_names,
        &model.class_names,
    )
    .with_context(|| format!("cannot load {}", args.data.display()))?;
    let Some(positive) = model.class_names.get(args.positive_class) else {
        bail!(
            "--positive-class {} out of range for {} classes",
            args.positive_class,
            model.n_classes
        );
    };
    let probas = model.predict_proba(data.features())?;
    let report = evaluate_probabilities(data.labels(), &probas, args.positive_class)?;
    if let Some(path) = &args.roc_out {
        write_roc(&[("model", &report.roc)], path)?;
    }
    write_json(
        &EvaluateReport {
            n_samples: data.n_samples(),
            positive_class: positive,
            confusion: report.confusion,
            metrics: Metrics::from(&report),
        },
        args.out.as_deref(),
    )
}

#[derive(Serialize)]
struct CvRow {
    model: String,
    mean: FoldMetrics,
    std: FoldMetrics,
    per_fold: Vec<FoldMetrics>,
}

#[derive(Serialize)]
struct CvSummary {
    data: String,
    k: usize,
    seed: u64,
    rows: Vec<CvRow>,
}

pub fn cv(args: &CvArgs) -> Result<()> {
    let run = &args.run;
    let cascade = run.cascade_config(args.aug_folds)?;
    let data = load_labeled(&run.data, &run.label_col)?;
    let logreg = LogRegConfig {
        l2: args.l2,
        ..LogRegConfig::default()
    };
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    for m in &args.models {
        let spec = match m {
            ModelArg::AfsDf => ModelSpec::Cascade(cascade.clone()),
            ModelArg::Df => ModelSpec::Cascade(cascade.without_selection()),
            ModelArg::Logreg => ModelSpec::LogReg(logreg.clone()),
            ModelArg::Rf => {
                ModelSpec::Forest(ForestConfig::random_forest(args.rf_trees).with_seed(run.seed))
            }
            ModelArg::AfsdfLr => ModelSpec::CascadeLogReg {
                cascade: cascade.clone(),
                logreg: logreg.clone(),
            },
        };
        let report =
            crossval_evaluate_with(&data, &spec, run.folds, run.seed, args.positive_class)?;
        eprintln!(
            "{:<10} ACC {:.4}±{:.4}  SEN {:.4}±{:.4}  SPE {:.4}±{:.4}  AUC {:.4}±{:.4}",
            report.model,
            report.mean.acc,
            report.std.acc,
            report.mean.sen,
            report.std.sen,
            report.mean.spe,
            report.std.spe,
            report.mean.auc,
            report.std.auc
        );
        if args.roc_out.is_some() {
            let curve = afsdf::evaluation::roc_auc(
                &report.oof_scores,
                &report.labels,
                args.positive_class,
            )?;
            curves.push((report.model.clone(), curve));
        }
        rows.push(CvRow {
            model: report.model,
            mean: report.mean,
            std: report.std,
            per_fold: report.per_fold,
        });
    }
    if let Some(path) = &args.roc_out {
        let refs: Vec<(&str, &RocCurve)> = curves.iter().map(|(n, c)| (n.as_str(), c)).collect();
        write_roc(&refs, path)?;
    }
    write_json(
        &CvSummary {
            data: run.data.display().to_string(),
            k: run.folds,
            seed: run.seed,
            rows,
        },
        args.out.as_deref(),
    )
}

pub fn importance(args: &ImportanceArgs) -> Result<()> {
    let model = load_archive(&args.model)?;
    let imp = model.original_feature_importance();
    let mut order: Vec<usize> = (0..imp.len()).collect();
    order.sort_by(|&a, &b| imp[b].total_cmp(&imp[a]).then(a.cmp(&b)));
    let mut out = csv::Writer::from_writer(sink(args.out.as_deref())?);
    out.write_record(["rank", "feature", "importance"])?;
    for (rank, &j) in order.iter().take(args.top_k).enumerate() {
        out.write_record([
            (rank + 1).to_string(),
            model.feature_names[j].clone(),
            imp[j].to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    let data = synth_generate(&SyntheticSpec {
        n_samples: args.n_samples,
        n_informative: args.n_informative,
        n_redundant: args.n_redundant,
        n_noise: args.n_noise,
        n_classes: args.n_classes,
        class_separation: args.separation,
        seed: args.seed,
    })?;
    let file =
        File::create(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let mut out = csv::Writer::from_writer(file);
    let mut head = data.feature_names().to_vec();
    head.push(args.label_col.clone());
    out.write_record(&head)?;
    for (i, row) in data.features().rows().enumerate() {
        let mut record: Vec<String> = row.iter().map(f64::to_string).collect();
        record.push(data.class_names()[data.labels()[i]].clone());
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}
