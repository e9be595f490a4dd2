use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{write_feature_csv, Dataset};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub val_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.6,
            val_fraction: 0.2,
            test_fraction: 0.2,
            seed: 0,
            stratified: true,
        }
    }
}

impl SplitSpec {
    pub fn fractions(&self) -> [f64; 3] {
        [self.train_fraction, self.val_fraction, self.test_fraction]
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.fractions();
        if f.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::Config(format!("split fractions must lie in (0,1), got {f:?}")));
        }
        let sum: f64 = f.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("split fractions sum to {sum}, not 1")));
        }
        Ok(())
    }
}

/// Largest-remainder allocation of `n` items over `fractions`; remainder ties
/// go to the earlier split.
fn allocate(n: usize, fractions: &[f64; 3]) -> [usize; 3] {
    let ideal = fractions.map(|f| f * n as f64);
    // The epsilon keeps products like 0.6·10 = 5.999… from flooring down.
    let mut counts = ideal.map(|x| (x + 1e-9).floor() as usize);
    let mut left = n - counts.iter().sum::<usize>();
    let mut order = [0usize, 1, 2];
    let rem = |i: usize| ideal[i] - counts[i] as f64;
    order.sort_by(|&a, &b| rem(b).total_cmp(&rem(a)).then(a.cmp(&b)));
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts
}

/// Per-class counts of each split, indexed `[class]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded train/validation/test partition. Rows keep their original relative
/// order inside each split.
pub fn stratified_split(ds: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset, Dataset)> {
    spec.validate()?;
    let fractions = spec.fractions();
    let mut rng = rng_from_seed(spec.seed);

    let groups: Vec<Vec<usize>> = if spec.stratified {
        let mut by_class = vec![Vec::new(); ds.n_classes()];
        for (i, &l) in ds.labels.iter().enumerate() {
            by_class[l].push(i);
        }
        for (c, g) in by_class.iter().enumerate() {
            if !g.is_empty() && g.len() < 3 {
                return Err(Error::Data(format!(
                    "class '{}' has {} examples; stratified splitting needs at least 3",
                    ds.class_names[c],
                    g.len()
                )));
            }
        }
        by_class
    } else {
        vec![(0..ds.n_examples()).collect()]
    };

    let mut parts: [Vec<usize>; 3] = Default::default();
    for mut group in groups {
        group.shuffle(&mut rng);
        let counts = allocate(group.len(), &fractions);
        let mut rest = group.as_slice();
        for (part, &k) in parts.iter_mut().zip(&counts) {
            let (take, tail) = rest.split_at(k);
            part.extend_from_slice(take);
            rest = tail;
        }
    }
    for (part, name) in parts.iter_mut().zip(["train", "validation", "test"]) {
        if part.is_empty() {
            return Err(Error::Data(format!("split fractions leave the {name} split empty")));
        }
        part.sort_unstable();
    }
    Ok((ds.select(&parts[0]), ds.select(&parts[1]), ds.select(&parts[2])))
}

/// Metadata written next to the three split CSVs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSidecar {
    pub seed: u64,
    pub fractions: [f64; 3],
    pub class_names: Vec<String>,
    pub counts_per_class: SplitCounts,
}

/// Writes `train.csv`, `val.csv`, `test.csv` and `split.json` into `dir`.
pub fn write_split(
    dir: &Path,
    spec: &SplitSpec,
    splits: (&Dataset, &Dataset, &Dataset),
    label_column: &str,
) -> Result<SplitSidecar> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_feature_csv(&dir.join("train.csv"), splits.0, label_column)?;
    write_feature_csv(&dir.join("val.csv"), splits.1, label_column)?;
    write_feature_csv(&dir.join("test.csv"), splits.2, label_column)?;
    let sidecar = SplitSidecar {
        seed: spec.seed,
        fractions: spec.fractions(),
        class_names: splits.0.class_names.clone(),
        counts_per_class: SplitCounts {
            train: splits.0.class_counts(),
            val: splits.1.class_counts(),
            test: splits.2.class_counts(),
        },
    };
    let path = dir.join("split.json");
    std::fs::write(&path, serde_json::to_string_pretty(&sidecar)?).map_err(|e| Error::io(&path, e))?;
    Ok(sidecar)
}
