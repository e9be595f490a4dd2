//! Classical classifiers on feature matrices.

mod boost;
mod forest;
mod io;
mod linear;
pub(crate) mod tree;

pub use boost::{fit_boosting, fit_boosting_traced, predict_boost, BoostConfig, BoostModel};
pub use forest::{fit_forest, predict_forest, FeatureSubsample, ForestConfig, ForestModel};
pub use io::{load_model, save_model, BaselineModel, MODEL_FORMAT, MODEL_VERSION};
pub use linear::{
    fit_linear_svm, fit_logistic, hinge_loss, logistic_loss_and_grad, predict_logistic, predict_svm,
    LinearModel, LogisticConfig, SvmConfig,
};
pub use tree::{best_gini_split, fit_tree, gini, midpoint, predict_tree, split_score, BestSplit, TreeConfig, TreeNode};

use ndarray::ArrayView1;

impl BaselineModel {
    /// Class scores for one row; probabilities except for the SVM, which
    /// returns raw margins.
    pub fn scores(&self, x: ArrayView1<f64>) -> Vec<f64> {
        match self {
            BaselineModel::Logistic(m) => predict_logistic(m, x),
            BaselineModel::LinearSvm(m) => predict_svm(m, x).1,
            BaselineModel::Tree { root, .. } => predict_tree(root, x),
            BaselineModel::Forest(m) => predict_forest(m, x),
            BaselineModel::Boosting(m) => predict_boost(m, x),
        }
    }

    pub fn predict(&self, x: ArrayView1<f64>) -> usize {
        crate::nn::argmax(&ndarray::Array1::from(self.scores(x)))
    }
}
