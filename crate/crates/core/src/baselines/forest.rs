use ndarray::ArrayView1;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::tree::{grow_classifier, FeatureSampler, TreeConfig, TreeNode};
use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, splitmix64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum FeatureSubsample {
    /// ⌈√n_features⌉ candidates per split.
    #[default]
    Sqrt,
    Fraction(f64),
    All,
}

impl FeatureSubsample {
    fn count(self, n_features: usize) -> Option<usize> {
        match self {
            FeatureSubsample::Sqrt => Some(((n_features as f64).sqrt().ceil() as usize).max(1)),
            FeatureSubsample::Fraction(f) => Some(((f * n_features as f64).ceil() as usize).clamp(1, n_features)),
            FeatureSubsample::All => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub tree: TreeConfig,
    pub feature_subsample: FeatureSubsample,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            tree: TreeConfig {
                max_depth: 12,
                min_leaf: 1,
            },
            feature_subsample: FeatureSubsample::Sqrt,
            bootstrap: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<TreeNode>,
    /// Seed each tree was grown from; lets one tree be regrown in isolation.
    pub tree_seeds: Vec<u64>,
    pub n_classes: usize,
}

/// Bootstrap rows of one tree.
fn bootstrap_rows(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

pub fn fit_forest(ds: &Dataset, cfg: &ForestConfig) -> Result<ForestModel> {
    if cfg.n_trees == 0 {
        return Err(Error::Config("forest needs at least one tree".into()));
    }
    if ds.n_examples() == 0 {
        return Err(Error::EmptyDataset("cannot fit a forest on zero examples".into()));
    }
    // Seeds are fixed before any tree is grown, so trees are independent of
    // the order in which they are built.
    let tree_seeds: Vec<u64> = (0..cfg.n_trees as u64)
        .map(|i| splitmix64(cfg.seed ^ splitmix64(i)))
        .collect();
    let n = ds.n_examples();
    let trees = tree_seeds
        .iter()
        .map(|&seed| {
            let rows = if cfg.bootstrap {
                bootstrap_rows(n, seed)
            } else {
                (0..n).collect()
            };
            let mut rng = rng_from_seed(splitmix64(seed));
            let mut sampler = cfg
                .feature_subsample
                .count(ds.n_features())
                .map(|k| FeatureSampler { k, rng: &mut rng });
            grow_classifier(&ds.features, &ds.labels, ds.n_classes(), &rows, &cfg.tree, 0, &mut sampler)
        })
        .collect();
    Ok(ForestModel {
        trees,
        tree_seeds,
        n_classes: ds.n_classes(),
    })
}

/// Mean of the trees' leaf probability vectors.
pub fn predict_forest(model: &ForestModel, x: ArrayView1<f64>) -> Vec<f64> {
    let mut p = vec![0.0; model.n_classes];
    for t in &model.trees {
        for (acc, v) in p.iter_mut().zip(t.leaf_value(x)) {
            *acc += v;
        }
    }
    let k = model.trees.len() as f64;
    p.iter_mut().for_each(|v| *v /= k);
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::tree::{fit_tree, predict_tree};
    use ndarray::Array2;

    fn noisy_dataset() -> Dataset {
        let x = Array2::from_shape_fn((40, 3), |(i, j)| ((i * 7 + j * 13) % 11) as f64 + 0.1 * j as f64);
        let labels = (0..40).map(|i| (i * 7 % 11 + i % 3) % 3).collect();
        Dataset::new(
            x,
            labels,
            vec!["A".into(), "B".into(), "C".into()],
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap()
    }

    #[test]
    fn degenerate_forest_equals_tree() {
        let ds = noisy_dataset();
        let cfg = ForestConfig {
            n_trees: 1,
            bootstrap: false,
            feature_subsample: FeatureSubsample::All,
            ..ForestConfig::default()
        };
        let forest = fit_forest(&ds, &cfg).unwrap();
        let tree = fit_tree(&ds, &cfg.tree).unwrap();
        assert_eq!(forest.trees[0], tree);
        for row in ds.features.rows() {
            assert_eq!(predict_forest(&forest, row), predict_tree(&tree, row));
        }
    }

    #[test]
    fn seeded_determinism() {
        let ds = noisy_dataset();
        let cfg = ForestConfig {
            n_trees: 5,
            seed: 3,
            ..ForestConfig::default()
        };
        assert_eq!(fit_forest(&ds, &cfg).unwrap(), fit_forest(&ds, &cfg).unwrap());
        let other = fit_forest(&ds, &ForestConfig { seed: 4, ..cfg.clone() }).unwrap();
        let a = fit_forest(&ds, &cfg).unwrap();
        assert_ne!(a.tree_seeds, other.tree_seeds);
        let counts = |seed| {
            let mut c = vec![0; 40];
            bootstrap_rows(40, seed).into_iter().for_each(|r| c[r] += 1);
            c
        };
        assert_ne!(counts(a.tree_seeds[0]), counts(other.tree_seeds[0]));
    }

    #[test]
    fn probabilities_on_simplex() {
        let ds = noisy_dataset();
        let f = fit_forest(&ds, &ForestConfig { n_trees: 7, ..ForestConfig::default() }).unwrap();
        for row in ds.features.rows() {
            let p = predict_forest(&f, row);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(p.iter().all(|&v| v >= 0.0));
        }
        assert!(fit_forest(&ds, &ForestConfig { n_trees: 0, ..ForestConfig::default() }).is_err());
    }
}
