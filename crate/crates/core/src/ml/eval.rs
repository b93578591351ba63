//! Confusion matrices, precision/recall, k-fold cross-validation and the
//! all-family sweep.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::format_real;
use crate::ml::data::{kfold, LabeledDataset};
use crate::ml::{fit, Family, ModelSpec, TrainedModel};
use crate::solver::SolverId;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub labels: Vec<SolverId>,
    /// `confusion[true][predicted]`
    pub confusion: Vec<Vec<usize>>,
    pub total: usize,
    pub accuracy: f64,
    pub precision: Vec<f64>,
    /// False where nothing was predicted as the class (precision reported as 0).
    pub precision_defined: Vec<bool>,
    pub recall: Vec<f64>,
    /// False where the class has no true rows (recall reported as 0).
    pub recall_defined: Vec<bool>,
    pub macro_precision: f64,
    pub macro_recall: f64,
}

fn ratio(num: usize, den: usize) -> (f64, bool) {
    if den == 0 {
        (0.0, false)
    } else {
        (num as f64 / den as f64, true)
    }
}

impl EvalReport {
    pub fn from_confusion(labels: Vec<SolverId>, confusion: Vec<Vec<usize>>) -> Self {
        let k = labels.len();
        let total: usize = confusion.iter().flatten().sum();
        let trace: usize = (0..k).map(|c| confusion[c][c]).sum();
        let col = |c: usize| (0..k).map(|r| confusion[r][c]).sum::<usize>();
        let (precision, precision_defined): (Vec<f64>, Vec<bool>) =
            (0..k).map(|c| ratio(confusion[c][c], col(c))).unzip();
        let (recall, recall_defined): (Vec<f64>, Vec<bool>) = (0..k)
            .map(|c| ratio(confusion[c][c], confusion[c].iter().sum()))
            .unzip();
        let mean = |v: &[f64]| if k == 0 { 0.0 } else { v.iter().sum::<f64>() / k as f64 };
        EvalReport {
            macro_precision: mean(&precision),
            macro_recall: mean(&recall),
            accuracy: ratio(trace, total).0,
            labels,
            confusion,
            total,
            precision,
            precision_defined,
            recall,
            recall_defined,
        }
    }

    pub fn from_predictions(truth: &[SolverId], pred: &[SolverId]) -> Self {
        let labels: Vec<SolverId> = SolverId::ALL
            .into_iter()
            .filter(|s| truth.contains(s) || pred.contains(s))
            .collect();
        let at = |s: &SolverId| labels.iter().position(|l| l == s).expect("label listed");
        let mut confusion = vec![vec![0; labels.len()]; labels.len()];
        for (t, p) in truth.iter().zip(pred) {
            confusion[at(t)][at(p)] += 1;
        }
        EvalReport::from_confusion(labels, confusion)
    }

    pub fn write_confusion<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["true\\predicted".to_string()];
        header.extend(self.labels.iter().map(|l| l.tag().to_string()));
        wr.write_record(&header)?;
        for (l, row) in self.labels.iter().zip(&self.confusion) {
            let mut rec = vec![l.tag().to_string()];
            rec.extend(row.iter().map(|c| c.to_string()));
            wr.write_record(&rec)?;
        }
        wr.flush().map_err(|e| Error::io("<confusion>", e))?;
        Ok(())
    }

    /// `key = value` lines.
    pub fn summary(&self) -> String {
        let mut s = format!("total = {}\naccuracy = {}\n", self.total, format_real(self.accuracy));
        for (c, l) in self.labels.iter().enumerate() {
            let flag = |ok: bool| if ok { "" } else { " # undefined" };
            s += &format!(
                "precision.{l} = {}{}\n",
                format_real(self.precision[c]),
                flag(self.precision_defined[c])
            );
            s += &format!(
                "recall.{l} = {}{}\n",
                format_real(self.recall[c]),
                flag(self.recall_defined[c])
            );
        }
        s += &format!("macro_precision = {}\n", format_real(self.macro_precision));
        s += &format!("macro_recall = {}\n", format_real(self.macro_recall));
        s
    }

    /// Writes `confusion.csv` and `summary.txt` into `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("confusion.csv");
        let f = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        self.write_confusion(f)?;
        let path = dir.join("summary.txt");
        std::fs::write(&path, self.summary()).map_err(|e| Error::io(&path, e))
    }
}

pub fn evaluate(model: &TrainedModel, test: &LabeledDataset) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(Error::Config("empty evaluation set".into()));
    }
    let pred = model.predict_all(&test.x)?;
    Ok(EvalReport::from_predictions(&test.y, &pred))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvReport {
    pub family: String,
    pub fold_accuracies: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation over folds.
    pub std: f64,
}

impl CvReport {
    fn new(family: &str, fold_accuracies: Vec<f64>) -> Self {
        let n = fold_accuracies.len() as f64;
        let mean = fold_accuracies.iter().sum::<f64>() / n;
        let std = (fold_accuracies.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n).sqrt();
        CvReport {
            family: family.to_string(),
            fold_accuracies,
            mean,
            std,
        }
    }
}

type Folds = Vec<(Vec<usize>, Vec<usize>)>;

fn run_folds(spec: &ModelSpec, data: &LabeledDataset, folds: &Folds) -> Result<CvReport> {
    let acc = folds
        .iter()
        .map(|(train, val)| {
            let m = fit(spec, &data.subset(train))?;
            Ok(evaluate(&m, &data.subset(val))?.accuracy)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(CvReport::new(spec.family.name(), acc))
}

pub fn cross_validate(spec: &ModelSpec, data: &LabeledDataset, k: usize, seed: u64) -> Result<CvReport> {
    data.check_trainable()?;
    run_folds(spec, data, &kfold(data, k, seed)?)
}

/// Cross-validates every family with default hyperparameters on shared folds,
/// best mean accuracy first (ties keep family order).
pub fn sweep(data: &LabeledDataset, k: usize, seed: u64) -> Result<Vec<CvReport>> {
    data.check_trainable()?;
    let folds = kfold(data, k, seed)?;
    let mut out = Family::all_defaults()
        .into_iter()
        .map(|f| run_folds(&ModelSpec::new(f, seed), data, &folds))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| b.mean.total_cmp(&a.mean));
    Ok(out)
}

pub fn write_sweep<W: Write>(w: W, reports: &[CvReport]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let k = reports.first().map_or(0, |r| r.fold_accuracies.len());
    let mut header: Vec<String> = ["rank", "family", "mean_accuracy", "std_accuracy"]
        .map(String::from)
        .to_vec();
    header.extend((1..=k).map(|f| format!("fold_{f}")));
    wr.write_record(&header)?;
    for (i, r) in reports.iter().enumerate() {
        let mut rec = vec![
            (i + 1).to_string(),
            r.family.clone(),
            format_real(r.mean),
            format_real(r.std),
        ];
        rec.extend(r.fold_accuracies.iter().map(|a| format_real(*a)));
        wr.write_record(&rec)?;
    }
    wr.flush().map_err(|e| Error::io("<sweep>", e))?;
    Ok(())
}
