use eeg_gru::eval::{confusion, metrics, ConfusionMatrix};
use proptest::prelude::*;

fn names(k: usize) -> Vec<String> {
    (0..k).map(|c| format!("c{c}")).collect()
}

fn pairs() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..6).prop_flat_map(|k| (Just(k), prop::collection::vec((0..k, 0..k), 1..80)))
}

proptest! {
    #[test]
    fn conservation((k, ps) in pairs()) {
        let (preds, truth): (Vec<_>, Vec<_>) = ps.iter().copied().unzip();
        let cm = confusion(&preds, &truth, &names(k)).unwrap();
        prop_assert_eq!(cm.total() as usize, ps.len());
        for c in 0..k {
            prop_assert_eq!(cm.row_sums()[c] as usize, truth.iter().filter(|&&t| t == c).count());
            prop_assert_eq!(cm.col_sums()[c] as usize, preds.iter().filter(|&&p| p == c).count());
        }
        let m = metrics(&cm).unwrap();
        prop_assert_eq!(m.accuracy, cm.trace() as f64 / ps.len() as f64);
        // Micro recall: Σ tp / Σ support.
        let tp: u64 = (0..k).map(|c| cm.counts[c][c]).sum();
        let support: u64 = m.per_class.iter().map(|c| c.support).sum();
        prop_assert_eq!(tp as f64 / support as f64, m.accuracy);
        for c in &m.per_class {
            for v in [c.precision, c.recall, c.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn order_independent((k, ps) in pairs(), seed in any::<u64>()) {
        let mut shuffled = ps.clone();
        // Deterministic Fisher–Yates driven by the proptest seed.
        let mut s = seed;
        for i in (1..shuffled.len()).rev() {
            s = eeg_gru::rng::splitmix64(s);
            shuffled.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let a: (Vec<_>, Vec<_>) = ps.into_iter().unzip();
        let b: (Vec<_>, Vec<_>) = shuffled.into_iter().unzip();
        prop_assert_eq!(
            confusion(&a.0, &a.1, &names(k)).unwrap(),
            confusion(&b.0, &b.1, &names(k)).unwrap()
        );
    }

    #[test]
    fn relabel_equivariance((k, ps) in pairs(), perm_seed in any::<u64>()) {
        let mut pi: Vec<usize> = (0..k).collect();
        let mut s = perm_seed;
        for i in (1..k).rev() {
            s = eeg_gru::rng::splitmix64(s);
            pi.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let (preds, truth): (Vec<_>, Vec<_>) = ps.iter().copied().unzip();
        let cm = confusion(&preds, &truth, &names(k)).unwrap();
        let mapped_p: Vec<usize> = preds.iter().map(|&p| pi[p]).collect();
        let mapped_t: Vec<usize> = truth.iter().map(|&t| pi[t]).collect();
        let mut permuted_names = vec![String::new(); k];
        for c in 0..k {
            permuted_names[pi[c]] = names(k)[c].clone();
        }
        let cm2 = confusion(&mapped_p, &mapped_t, &permuted_names).unwrap();
        for i in 0..k {
            for j in 0..k {
                prop_assert_eq!(cm2.counts[pi[i]][pi[j]], cm.counts[i][j]);
            }
        }
        let (m, m2) = (metrics(&cm).unwrap(), metrics(&cm2).unwrap());
        for c in 0..k {
            prop_assert_eq!(&m.per_class[c], &m2.per_class[pi[c]]);
        }
        prop_assert_eq!(m.accuracy, m2.accuracy);
    }
}

#[test]
fn closed_form_case() {
    let cm = ConfusionMatrix {
        counts: vec![vec![1, 1], vec![0, 2]],
        class_names: names(2),
    };
    let m = metrics(&cm).unwrap();
    assert_eq!(m.per_class[0].f1, 2.0 / 3.0);
    assert_eq!(m.per_class[1].f1, 0.8);
}
