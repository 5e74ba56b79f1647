use std::path::PathBuf;

use afsdf::cascade::ValidationMetric;
use afsdf::forest::{parse_roster, roster_string};
use afsdf::{CascadeConfig, MaskScope};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_FORESTS: &str = "gbdt:20,rf:20,et:20,et:50";

#[derive(Debug, Parser)]
#[command(
    name = "afsdf",
    version,
    about = "Deep forest with adaptive feature selection for tabular data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a cascade on a labeled CSV and write the model archive.
    Train(TrainArgs),
    /// Write class probabilities and labels for every row of a CSV.
    Predict(PredictArgs),
    /// Score a saved model on a labeled CSV.
    Evaluate(EvaluateArgs),
    /// Stratified k-fold comparison of one or more models.
    Cv(CvArgs),
    /// Rank the original features by last-layer importance.
    Importance(ImportanceArgs),
    /// Write a synthetic dataset with known informative/redundant/noise columns.
    Synth(SynthArgs),
}

/// Options shared by every command that fits a cascade.
#[derive(Debug, Clone, PartialEq, Args)]
pub struct RunConfig {
    /// Labeled input CSV.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "label")]
    pub label_col: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fraction of the lowest-importance carried features dropped per layer.
    #[arg(long, default_value_t = 0.2)]
    pub discard_ratio: f64,
    /// Forests per layer as kind:n_trees, kind one of gbdt, rf, et.
    #[arg(long, default_value = DEFAULT_FORESTS)]
    pub forests: String,
    #[arg(long, default_value_t = 10)]
    pub max_layers: usize,
    #[arg(long, default_value_t = 1)]
    pub patience: usize,
    #[arg(long, default_value_t = 16)]
    pub min_features: usize,
    /// Folds; for `train` the cross-fitting folds, for `cv` the outer folds.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, value_enum, default_value_t = ScopeArg::CarriedOnly)]
    pub mask_scope: ScopeArg,
    #[arg(long, value_enum, default_value_t = MetricArg::Accuracy)]
    pub layer_metric: MetricArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    CarriedOnly,
    FullInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Accuracy,
    Auc,
}

impl RunConfig {
    /// Cascade settings; `aug_folds` is the number of cross-fitting folds.
    pub fn cascade_config(&self, aug_folds: usize) -> afsdf::Result<CascadeConfig> {
        let config = CascadeConfig {
            forests: parse_roster(&self.forests)?,
            discard_ratio: self.discard_ratio,
            n_aug_folds: aug_folds,
            max_layers: self.max_layers,
            patience: self.patience,
            min_features: self.min_features,
            mask_scope: match self.mask_scope {
                ScopeArg::CarriedOnly => MaskScope::CarriedOnly,
                ScopeArg::FullInput => MaskScope::FullInput,
            },
            validation_metric: match self.layer_metric {
                MetricArg::Accuracy => ValidationMetric::Accuracy,
                MetricArg::Auc => ValidationMetric::Auc,
            },
            seed: self.seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn forests_canonical(&self) -> afsdf::Result<String> {
        Ok(roster_string(&parse_roster(&self.forests)?))
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub run: RunConfig,
    /// Where to write the model archive.
    #[arg(long)]
    pub model: PathBuf,
    /// Training report (JSON); printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Hold out this fraction of rows (stratified) and report metrics on it.
    #[arg(long)]
    pub holdout: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// CSV holding every feature column the model was trained on.
    #[arg(long)]
    pub data: PathBuf,
    /// Predictions CSV; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "label")]
    pub label_col: String,
    /// Metrics report (JSON); printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// ROC points as CSV (fpr, tpr, threshold).
    #[arg(long)]
    pub roc_out: Option<PathBuf>,
    /// Index of the positive class for SEN/SPE/AUC.
    #[arg(long, default_value_t = 1)]
    pub positive_class: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    AfsDf,
    Df,
    Logreg,
    Rf,
    AfsdfLr,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub run: RunConfig,
    /// Models to compare, one report row each.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "afs-df")]
    pub models: Vec<ModelArg>,
    /// Cross-fitting folds inside each cascade fit.
    #[arg(long, default_value_t = 5)]
    pub aug_folds: usize,
    /// Trees in the `rf` baseline.
    #[arg(long, default_value_t = 500)]
    pub rf_trees: usize,
    /// L2 penalty of the logistic-regression models.
    #[arg(long, default_value_t = 0.01)]
    pub l2: f64,
    #[arg(long, default_value_t = 1)]
    pub positive_class: usize,
    /// Report (JSON); printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Pooled out-of-fold ROC points per model as CSV.
    #[arg(long)]
    pub roc_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ImportanceArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 30)]
    pub top_k: usize,
    /// Ranked CSV (rank, feature, importance); printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub n_samples: usize,
    #[arg(long, default_value_t = 10)]
    pub n_informative: usize,
    #[arg(long, default_value_t = 10)]
    pub n_redundant: usize,
    #[arg(long, default_value_t = 30)]
    pub n_noise: usize,
    #[arg(long, default_value_t = 2)]
    pub n_classes: usize,
    #[arg(long, default_value_t = 1.5)]
    pub separation: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "label")]
    pub label_col: String,
}
