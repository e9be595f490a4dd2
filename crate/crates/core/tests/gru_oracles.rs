use eeg_gru::nn::{
    gradient_check, gru_forward, train, GruParams, ModelConfig, ModelParams, SequenceSet, TrainConfig,
};
use eeg_gru::rng::rng_from_seed;
use ndarray::{array, Array1, Array2};
use rand::Rng as _;

fn sig(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Hidden-2 / input-1 GRU stepped with plain scalar arithmetic.
fn scalar_gru(
    w: [[f64; 2]; 3],
    u: [[[f64; 2]; 2]; 3],
    b: [[f64; 2]; 3],
    xs: &[f64],
) -> Vec<[f64; 2]> {
    let mut h = [0.0f64; 2];
    let mut out = Vec::new();
    for &x in xs {
        let mut z = [0.0; 2];
        let mut r = [0.0; 2];
        for i in 0..2 {
            z[i] = sig(w[0][i] * x + u[0][i][0] * h[0] + u[0][i][1] * h[1] + b[0][i]);
            r[i] = sig(w[1][i] * x + u[1][i][0] * h[0] + u[1][i][1] * h[1] + b[1][i]);
        }
        let rh = [r[0] * h[0], r[1] * h[1]];
        let mut next = [0.0; 2];
        for i in 0..2 {
            let c = (w[2][i] * x + u[2][i][0] * rh[0] + u[2][i][1] * rh[1] + b[2][i]).tanh();
            next[i] = z[i] * h[i] + (1.0 - z[i]) * c;
        }
        h = next;
        out.push(h);
    }
    out
}

#[test]
fn forward_matches_scalar_oracle() {
    let w = [[0.5, -0.3], [0.2, 0.7], [-0.4, 0.9]];
    let u = [
        [[0.1, -0.2], [0.3, 0.05]],
        [[-0.15, 0.25], [0.4, -0.35]],
        [[0.6, -0.1], [0.2, 0.3]],
    ];
    let b = [[0.05, -0.1], [0.0, 0.2], [-0.05, 0.1]];
    let p = GruParams {
        w_z: Array2::from_shape_fn((2, 1), |(i, _)| w[0][i]),
        w_r: Array2::from_shape_fn((2, 1), |(i, _)| w[1][i]),
        w_h: Array2::from_shape_fn((2, 1), |(i, _)| w[2][i]),
        u_z: Array2::from_shape_fn((2, 2), |(i, j)| u[0][i][j]),
        u_r: Array2::from_shape_fn((2, 2), |(i, j)| u[1][i][j]),
        u_h: Array2::from_shape_fn((2, 2), |(i, j)| u[2][i][j]),
        b_z: Array1::from(b[0].to_vec()),
        b_r: Array1::from(b[1].to_vec()),
        b_h: Array1::from(b[2].to_vec()),
    };
    let xs = [1.0, -0.5, 2.0];
    let seq: Vec<Array1<f64>> = xs.iter().map(|&x| array![x]).collect();
    let (hs, _) = gru_forward(&p, &seq, None).unwrap();
    let oracle = scalar_gru(w, u, b, &xs);
    for (h, o) in hs.iter().zip(&oracle) {
        for i in 0..2 {
            assert!((h[i] - o[i]).abs() < 1e-12, "{} vs {}", h[i], o[i]);
        }
    }
}

#[test]
fn gradient_check_ten_seeds() {
    for seed in 0..10u64 {
        let cfg = ModelConfig {
            input_dim: 3,
            hidden_dim: 4,
            sequence_length: 5,
            n_classes: 3,
            seed,
        };
        let params = ModelParams::init(&cfg).unwrap();
        let mut rng = rng_from_seed(1000 + seed);
        let xs: Vec<Array1<f64>> = (0..5)
            .map(|_| Array1::from_shape_fn(3, |_| rng.random_range(-1.0..1.0)))
            .collect();
        let label = (seed % 3) as usize;
        let report = gradient_check(&params, &xs, label, 1e-5).unwrap();
        assert_eq!(report.n_checked, 3 * (12 + 16 + 4) + 3 * 20 + 3);
        assert!(report.max_rel_error < 1e-4, "seed {seed}: {report:?}");
    }
}

/// Hidden states `(h1, h2)` of a hidden-1, input-2 GRU for the four XOR
/// prototypes `x1 = (a, 0)`, `x2 = (0, b)` with `a, b ∈ {-1, 1}`.
fn xor_states(theta: &[f64; 12]) -> [[f64; 2]; 4] {
    let p = GruParams {
        w_z: Array2::from_shape_vec((1, 2), theta[0..2].to_vec()).unwrap(),
        w_r: Array2::from_shape_vec((1, 2), theta[2..4].to_vec()).unwrap(),
        w_h: Array2::from_shape_vec((1, 2), theta[4..6].to_vec()).unwrap(),
        u_z: array![[theta[6]]],
        u_r: array![[theta[7]]],
        u_h: array![[theta[8]]],
        b_z: array![theta[9]],
        b_r: array![theta[10]],
        b_h: array![theta[11]],
    };
    let mut out = [[0.0; 2]; 4];
    for (k, (a, b)) in [(-1.0, -1.0), (1.0, 1.0), (-1.0, 1.0), (1.0, -1.0)].into_iter().enumerate() {
        let (hs, _) = gru_forward(&p, &[array![a, 0.0], array![0.0, b]], None).unwrap();
        out[k] = [hs[0][0], hs[1][0]];
    }
    out
}

#[test]
fn xor_sequence_task() {
    // Oracle: a grid search finds a hidden-1 GRU whose flattened states for
    // the XOR prototypes are linearly separable, so a dense head can reach
    // 100% on them. Points are ordered [(-,-), (+,+), (-,+), (+,-)]; the
    // first two are class 0. With h1 taking two distinct values the classes
    // separate iff class 1 sits on the same side in h2 at both h1 values.
    let grid = [-3.0, 0.0, 3.0];
    let mut found = false;
    let mut theta = [0.0; 12];
    'search: for code in 0..3usize.pow(12) {
        let mut c = code;
        for t in theta.iter_mut() {
            *t = grid[c % 3];
            c /= 3;
        }
        let s = xor_states(&theta);
        let (u0, u1) = (s[0][0], s[1][0]);
        if (u0 - s[2][0]).abs() > 1e-12 || (u1 - s[3][0]).abs() > 1e-12 || (u0 - u1).abs() < 1e-3 {
            continue;
        }
        let d0 = s[2][1] - s[0][1];
        let d1 = s[3][1] - s[1][1];
        if d0 * d1 > 1e-6 {
            found = true;
            break 'search;
        }
    }
    assert!(found, "no separating hidden-1 GRU on the grid");

    let mut rng = rng_from_seed(42);
    let mut xs = Vec::new();
    let mut labels = Vec::new();
    for i in 0..200 {
        let a = if i % 2 == 0 { 1.0 } else { -1.0 };
        let b = if (i / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let j = |rng: &mut eeg_gru::rng::Rng| rng.random_range(-0.1..0.1);
        xs.push(vec![array![a + j(&mut rng), j(&mut rng)], array![j(&mut rng), b + j(&mut rng)]]);
        labels.push(usize::from(a != b));
    }
    let set = SequenceSet::new(xs, labels).unwrap();
    let model = ModelConfig {
        input_dim: 2,
        hidden_dim: 8,
        sequence_length: 2,
        n_classes: 2,
        seed: 3,
    };
    let cfg = TrainConfig {
        learning_rate: 0.01,
        max_epochs: 200,
        patience: 200,
        ..TrainConfig::default()
    };
    let (_, history) = train(&model, &set, &set, &cfg).unwrap();
    assert!(history.len() <= 200);
    assert!(history.train_acc.contains(&1.0), "best train accuracy {:?}", history.train_acc.last());
}
