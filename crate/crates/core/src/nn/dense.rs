use ndarray::{Array1, Array2};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Affine output layer `W v + b`, `W: [classes × flat_dim]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseParams {
    pub w: Array2<f64>,
    pub b: Array1<f64>,
}

impl DenseParams {
    pub fn zeros(n_out: usize, n_in: usize) -> Self {
        Self {
            w: Array2::zeros((n_out, n_in)),
            b: Array1::zeros(n_out),
        }
    }

    pub fn init(n_out: usize, n_in: usize, rng: &mut Rng) -> Self {
        let k = 1.0 / (n_in as f64).sqrt();
        let mut p = Self::zeros(n_out, n_in);
        p.w.mapv_inplace(|_| rng.random_range(-k..k));
        p
    }
}

pub fn dense_forward(p: &DenseParams, v: &Array1<f64>) -> Result<Array1<f64>> {
    if v.len() != p.w.ncols() {
        return Err(Error::dim("dense input", p.w.ncols(), v.len()));
    }
    Ok(p.w.dot(v) + &p.b)
}

/// Returns the parameter gradients and ∂L/∂v.
pub fn dense_backward(
    p: &DenseParams,
    v: &Array1<f64>,
    grad_out: &Array1<f64>,
) -> Result<(DenseParams, Array1<f64>)> {
    if grad_out.len() != p.w.nrows() {
        return Err(Error::dim("dense output gradient", p.w.nrows(), grad_out.len()));
    }
    if v.len() != p.w.ncols() {
        return Err(Error::dim("dense input", p.w.ncols(), v.len()));
    }
    let gw = Array2::from_shape_fn(p.w.raw_dim(), |(i, j)| grad_out[i] * v[j]);
    let gv = p.w.t().dot(grad_out);
    Ok((
        DenseParams {
            w: gw,
            b: grad_out.clone(),
        },
        gv,
    ))
}

/// Time-major concatenation of the hidden sequence.
pub fn flatten(hs: &[Array1<f64>]) -> Array1<f64> {
    hs.iter().flat_map(|h| h.iter().copied()).collect()
}

/// Inverse of [`flatten`].
pub fn unflatten(v: &Array1<f64>, hidden_dim: usize) -> Result<Vec<Array1<f64>>> {
    if hidden_dim == 0 || !v.len().is_multiple_of(hidden_dim) {
        return Err(Error::Data(format!(
            "cannot reshape {} values into frames of {hidden_dim}",
            v.len()
        )));
    }
    Ok(v
        .as_slice()
        .expect("contiguous")
        .chunks(hidden_dim)
        .map(|c| Array1::from(c.to_vec()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn identity_weights() {
        let p = DenseParams {
            w: Array2::eye(3),
            b: Array1::zeros(3),
        };
        let v = array![1.5, -2.0, 0.25];
        assert_eq!(dense_forward(&p, &v).unwrap(), v);
    }

    #[test]
    fn bias_gradient_is_upstream() {
        let p = DenseParams::init(4, 6, &mut rng_from_seed(1));
        let v = Array1::linspace(-1.0, 1.0, 6);
        let up = array![0.1, -0.2, 0.3, 0.05];
        let (g, gv) = dense_backward(&p, &v, &up).unwrap();
        assert_eq!(g.b, up);
        assert_eq!(gv.len(), 6);
    }

    #[test]
    fn finite_difference_4x6() {
        // L = <u, W v + b> for a fixed random u.
        let mut rng = rng_from_seed(11);
        let p = DenseParams::init(4, 6, &mut rng);
        let mut other = DenseParams::init(4, 6, &mut rng);
        other.b.mapv_inplace(|_| rng.random_range(-1.0..1.0));
        let v = other.w.row(0).to_owned();
        let u = other.b.clone();
        let loss = |p: &DenseParams, v: &Array1<f64>| dense_forward(p, v).unwrap().dot(&u);
        let (g, gv) = dense_backward(&p, &v, &u).unwrap();
        let eps = 1e-5;
        let rel = |a: f64, n: f64| (a - n).abs() / a.abs().max(n.abs()).max(1e-6);
        for i in 0..4 {
            for j in 0..6 {
                let mut pp = p.clone();
                pp.w[[i, j]] += eps;
                let mut pm = p.clone();
                pm.w[[i, j]] -= eps;
                let num = (loss(&pp, &v) - loss(&pm, &v)) / (2.0 * eps);
                assert!(rel(g.w[[i, j]], num) < 1e-6);
            }
            let mut pp = p.clone();
            pp.b[i] += eps;
            let mut pm = p.clone();
            pm.b[i] -= eps;
            assert!(rel(g.b[i], (loss(&pp, &v) - loss(&pm, &v)) / (2.0 * eps)) < 1e-6);
        }
        for j in 0..6 {
            let mut vp = v.clone();
            vp[j] += eps;
            let mut vm = v.clone();
            vm[j] -= eps;
            assert!(rel(gv[j], (loss(&p, &vp) - loss(&p, &vm)) / (2.0 * eps)) < 1e-6);
        }
    }

    #[test]
    fn flatten_examples() {
        assert_eq!(flatten(&[array![1.0, 2.0], array![3.0, 4.0]]), array![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(flatten(&[array![7.0, 8.0]]), array![7.0, 8.0]);
        assert!(unflatten(&array![1.0, 2.0, 3.0], 2).is_err());
        assert!(dense_forward(&DenseParams::zeros(2, 3), &array![1.0]).is_err());
    }

    proptest! {
        #[test]
        fn flatten_bijection(t in 1usize..6, h in 1usize..5, seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            let hs: Vec<Array1<f64>> = (0..t)
                .map(|_| Array1::from_shape_fn(h, |_| rng.random_range(-1.0..1.0)))
                .collect();
            let flat = flatten(&hs);
            prop_assert_eq!(flat.len(), t * h);
            prop_assert_eq!(unflatten(&flat, h).unwrap(), hs);
        }
    }
}
