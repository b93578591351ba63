//! Solver-selection classifiers written from scratch, with splits,
//! cross-validation and evaluation.

pub mod bayes;
pub mod boost;
pub mod data;
pub mod eval;
pub mod knn;
pub mod linear;
pub mod mlp;
pub mod select;
pub mod tree;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::stream;
use crate::solver::SolverId;

pub use data::{kfold, stratified_split, LabeledDataset, Standardizer};
pub use eval::{cross_validate, evaluate, sweep, CvReport, EvalReport};
pub use select::{select_and_solve, Selection};

use bayes::GaussianNb;
use boost::Boosted;
use knn::Knn;
use linear::Logistic;
use mlp::Mlp;
use tree::{argmax, grow_classifier, Tree, TreeParams};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// A model family with its hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Logistic {
        l2: f64,
        learning_rate: f64,
        epochs: usize,
    },
    GaussianNb {
        var_smoothing: f64,
    },
    DecisionTree {
        max_depth: Option<usize>,
        min_split: usize,
    },
    Knn {
        k: usize,
    },
    RandomForest {
        n_trees: usize,
        max_depth: Option<usize>,
        /// `None` considers every feature at each split.
        max_features: Option<usize>,
        bootstrap: bool,
    },
    GradientBoostedTrees {
        rounds: usize,
        max_depth: usize,
        learning_rate: f64,
    },
    Mlp {
        hidden: usize,
        learning_rate: f64,
        epochs: usize,
    },
}

pub const FAMILY_NAMES: [&str; 7] = [
    "logistic",
    "gaussian_nb",
    "decision_tree",
    "knn",
    "random_forest",
    "gradient_boosted_trees",
    "mlp",
];

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Logistic { .. } => "logistic",
            Family::GaussianNb { .. } => "gaussian_nb",
            Family::DecisionTree { .. } => "decision_tree",
            Family::Knn { .. } => "knn",
            Family::RandomForest { .. } => "random_forest",
            Family::GradientBoostedTrees { .. } => "gradient_boosted_trees",
            Family::Mlp { .. } => "mlp",
        }
    }

    /// Default hyperparameters of every family, in `FAMILY_NAMES` order.
    pub fn all_defaults() -> Vec<Family> {
        FAMILY_NAMES.iter().map(|n| n.parse().expect("known family")).collect()
    }

    fn standardizes(&self) -> bool {
        matches!(self, Family::Logistic { .. } | Family::Knn { .. } | Family::Mlp { .. })
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Family name with default hyperparameters.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "logistic" => Family::Logistic {
                l2: 1e-4,
                learning_rate: 0.1,
                epochs: 500,
            },
            "gaussian_nb" => Family::GaussianNb { var_smoothing: 1e-9 },
            "decision_tree" => Family::DecisionTree {
                max_depth: Some(12),
                min_split: 2,
            },
            "knn" => Family::Knn { k: 5 },
            "random_forest" => Family::RandomForest {
                n_trees: 100,
                max_depth: None,
                max_features: Some(4),
                bootstrap: true,
            },
            "gradient_boosted_trees" | "gbt" => Family::GradientBoostedTrees {
                rounds: 100,
                max_depth: 4,
                learning_rate: 0.1,
            },
            "mlp" => Family::Mlp {
                hidden: 64,
                learning_rate: 0.01,
                epochs: 200,
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown model family `{other}` (expected one of {})",
                    FAMILY_NAMES.join(", ")
                )))
            }
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub family: Family,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        ModelSpec { family, seed }
    }

    pub fn named(name: &str, seed: u64) -> Result<Self> {
        Ok(ModelSpec::new(name.parse()?, seed))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Params {
    Logistic(Logistic),
    GaussianNb(GaussianNb),
    Tree(Tree),
    Knn(Knn),
    Forest { trees: Vec<Tree> },
    Boosted(Boosted),
    Mlp(Mlp),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub spec: ModelSpec,
    /// Class index to solver.
    pub labels: Vec<SolverId>,
    pub n_features: usize,
    pub standardizer: Option<Standardizer>,
    pub params: Params,
}

const FOREST_STREAM: u64 = 31;
const MLP_STREAM: u64 = 32;

pub fn fit(spec: &ModelSpec, train: &LabeledDataset) -> Result<TrainedModel> {
    train.check_trainable()?;
    let labels = train.labels();
    let k = labels.len();
    let y: Vec<usize> = train
        .y
        .iter()
        .map(|s| labels.iter().position(|l| l == s).expect("label present"))
        .collect();
    let standardizer = spec.family.standardizes().then(|| Standardizer::fit(&train.x));
    let x = match &standardizer {
        Some(s) => s.transform(&train.x),
        None => train.x.clone(),
    };
    let n = x.len();
    let params = match spec.family {
        Family::Logistic {
            l2,
            learning_rate,
            epochs,
        } => Params::Logistic(Logistic::fit(&x, &y, k, l2, learning_rate, epochs)),
        Family::GaussianNb { var_smoothing } => Params::GaussianNb(GaussianNb::fit(&x, &y, k, var_smoothing)),
        Family::DecisionTree { max_depth, min_split } => {
            let p = TreeParams {
                max_depth,
                min_split,
                max_features: None,
            };
            Params::Tree(grow_classifier::<ChaCha8Rng>(&x, &y, k, (0..n).collect(), p, None))
        }
        Family::Knn { k: neighbours } => Params::Knn(Knn {
            k: neighbours,
            n_classes: k,
            x,
            y,
        }),
        Family::RandomForest {
            n_trees,
            max_depth,
            max_features,
            bootstrap,
        } => {
            use rand::Rng;
            let mut rng = stream(spec.seed, FOREST_STREAM);
            let p = TreeParams {
                max_depth,
                min_split: 2,
                max_features,
            };
            let trees = (0..n_trees)
                .map(|_| {
                    let rows = if bootstrap {
                        (0..n).map(|_| rng.gen_range(0..n)).collect()
                    } else {
                        (0..n).collect()
                    };
                    grow_classifier(&x, &y, k, rows, p, Some(&mut rng))
                })
                .collect();
            Params::Forest { trees }
        }
        Family::GradientBoostedTrees {
            rounds,
            max_depth,
            learning_rate,
        } => Params::Boosted(Boosted::fit(&x, &y, k, rounds, max_depth, learning_rate)),
        Family::Mlp {
            hidden,
            learning_rate,
            epochs,
        } => {
            let mut rng = stream(spec.seed, MLP_STREAM);
            Params::Mlp(Mlp::fit(&x, &y, k, hidden, learning_rate, epochs, &mut rng))
        }
    };
    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        spec: spec.clone(),
        labels,
        n_features: train.n_features(),
        standardizer,
        params,
    })
}

impl TrainedModel {
    /// Per-class scores in `labels` order; larger is better.
    pub fn scores(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                actual: features.len(),
            });
        }
        let z;
        let x = match &self.standardizer {
            Some(s) => {
                z = s.transform_row(features);
                &z[..]
            }
            None => features,
        };
        Ok(match &self.params {
            Params::Logistic(m) => m.scores(x),
            Params::GaussianNb(m) => m.scores(x),
            Params::Tree(t) => t.leaf(x).to_vec(),
            Params::Knn(m) => m.scores(x),
            Params::Forest { trees } => {
                let mut votes = vec![0.0; self.labels.len()];
                for t in trees {
                    votes[t.predict_class(x)] += 1.0;
                }
                votes
            }
            Params::Boosted(m) => m.scores(x),
            Params::Mlp(m) => m.scores(x),
        })
    }

    pub fn predict(&self, features: &[f64]) -> Result<SolverId> {
        Ok(self.labels[argmax(&self.scores(features)?)])
    }

    pub fn predict_all(&self, x: &[Vec<f64>]) -> Result<Vec<SolverId>> {
        x.iter().map(|r| self.predict(r)).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: TrainedModel = serde_json::from_str(text)?;
        if m.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "model format version {} is not supported (expected {MODEL_FORMAT_VERSION})",
                m.format_version
            )));
        }
        Ok(m)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        TrainedModel::from_json(&text).map_err(|e| Error::format(path, e.to_string()))
    }
}
