//! GRU layer with hand-written backpropagation through time.
//!
//! Update rule, with `z → 1` keeping the previous state:
//!
//! ```text
//! z_t = σ(W_z x_t + U_z h_{t-1} + b_z)
//! r_t = σ(W_r x_t + U_r h_{t-1} + b_r)
//! c_t = tanh(W_h x_t + U_h (r_t ⊙ h_{t-1}) + b_h)
//! h_t = z_t ⊙ h_{t-1} + (1 - z_t) ⊙ c_t
//! ```

use ndarray::{Array1, Array2};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct GruParams {
    /// Input weights `[hidden × input]` for the update gate, reset gate and
    /// candidate state.
    pub w_z: Array2<f64>,
    pub w_r: Array2<f64>,
    pub w_h: Array2<f64>,
    /// Recurrent weights `[hidden × hidden]`.
    pub u_z: Array2<f64>,
    pub u_r: Array2<f64>,
    pub u_h: Array2<f64>,
    pub b_z: Array1<f64>,
    pub b_r: Array1<f64>,
    pub b_h: Array1<f64>,
}

impl GruParams {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        let w = || Array2::zeros((hidden_dim, input_dim));
        let u = || Array2::zeros((hidden_dim, hidden_dim));
        let b = || Array1::zeros(hidden_dim);
        Self {
            w_z: w(),
            w_r: w(),
            w_h: w(),
            u_z: u(),
            u_r: u(),
            u_h: u(),
            b_z: b(),
            b_r: b(),
            b_h: b(),
        }
    }

    /// Uniform(-1/√fan_in, 1/√fan_in) weights, zero biases.
    pub fn init(input_dim: usize, hidden_dim: usize, rng: &mut Rng) -> Self {
        let mut p = Self::zeros(input_dim, hidden_dim);
        let kw = 1.0 / (input_dim as f64).sqrt();
        let ku = 1.0 / (hidden_dim as f64).sqrt();
        for m in [&mut p.w_z, &mut p.w_r, &mut p.w_h] {
            m.mapv_inplace(|_| rng.random_range(-kw..kw));
        }
        for m in [&mut p.u_z, &mut p.u_r, &mut p.u_h] {
            m.mapv_inplace(|_| rng.random_range(-ku..ku));
        }
        p
    }

    pub fn input_dim(&self) -> usize {
        self.w_z.ncols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w_z.nrows()
    }
}

/// Values kept from the forward pass of one step.
#[derive(Debug, Clone)]
pub struct CellCache {
    pub x: Array1<f64>,
    pub h_prev: Array1<f64>,
    pub z: Array1<f64>,
    pub r: Array1<f64>,
    /// Candidate state.
    pub c: Array1<f64>,
}

fn sigmoid(v: f64) -> f64 {
    if v >= 0.0 {
        1.0 / (1.0 + (-v).exp())
    } else {
        let e = v.exp();
        e / (1.0 + e)
    }
}

pub fn gru_cell_forward(p: &GruParams, x: &Array1<f64>, h_prev: &Array1<f64>) -> Result<(Array1<f64>, CellCache)> {
    if x.len() != p.input_dim() {
        return Err(Error::dim("GRU input", p.input_dim(), x.len()));
    }
    if h_prev.len() != p.hidden_dim() {
        return Err(Error::dim("GRU hidden state", p.hidden_dim(), h_prev.len()));
    }
    let z = (p.w_z.dot(x) + p.u_z.dot(h_prev) + &p.b_z).mapv(sigmoid);
    let r = (p.w_r.dot(x) + p.u_r.dot(h_prev) + &p.b_r).mapv(sigmoid);
    let c = (p.w_h.dot(x) + p.u_h.dot(&(&r * h_prev)) + &p.b_h).mapv(f64::tanh);
    let h = &z * h_prev + &(1.0 - &z) * &c;
    Ok((
        h,
        CellCache {
            x: x.clone(),
            h_prev: h_prev.clone(),
            z,
            r,
            c,
        },
    ))
}

/// Runs the recurrence over `xs`; `h0` defaults to zeros.
pub fn gru_forward(
    p: &GruParams,
    xs: &[Array1<f64>],
    h0: Option<&Array1<f64>>,
) -> Result<(Vec<Array1<f64>>, Vec<CellCache>)> {
    if xs.is_empty() {
        return Err(Error::Data("GRU forward on an empty sequence".into()));
    }
    let mut h = h0.cloned().unwrap_or_else(|| Array1::zeros(p.hidden_dim()));
    let mut hs = Vec::with_capacity(xs.len());
    let mut caches = Vec::with_capacity(xs.len());
    for x in xs {
        let (next, cache) = gru_cell_forward(p, x, &h)?;
        hs.push(next.clone());
        caches.push(cache);
        h = next;
    }
    Ok((hs, caches))
}

fn add_outer(acc: &mut Array2<f64>, a: &Array1<f64>, b: &Array1<f64>) {
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (dst, &bj) in acc.row_mut(i).iter_mut().zip(b) {
            *dst += ai * bj;
        }
    }
}

/// Reverse-mode gradients of the recurrence. `grad_hs[t]` is ∂L/∂h_t from
/// outside the layer; parameter gradients accumulate over all steps.
pub fn gru_backward(
    p: &GruParams,
    caches: &[CellCache],
    grad_hs: &[Array1<f64>],
) -> Result<(GruParams, Vec<Array1<f64>>)> {
    if caches.len() != grad_hs.len() {
        return Err(Error::dim("GRU backward steps", caches.len(), grad_hs.len()));
    }
    let mut g = GruParams::zeros(p.input_dim(), p.hidden_dim());
    let mut grad_xs = vec![Array1::zeros(p.input_dim()); caches.len()];
    let mut carry: Array1<f64> = Array1::zeros(p.hidden_dim());

    for t in (0..caches.len()).rev() {
        let CellCache { x, h_prev, z, r, c } = &caches[t];
        if grad_hs[t].len() != p.hidden_dim() {
            return Err(Error::dim("GRU backward gradient", p.hidden_dim(), grad_hs[t].len()));
        }
        let dh = &grad_hs[t] + &carry;

        let da_z = &dh * &(h_prev - c) * z * &(1.0 - z);
        let da_h = &dh * &(1.0 - z) * &(1.0 - &(c * c));
        let rh = r * h_prev;
        let d_rh = p.u_h.t().dot(&da_h);
        let da_r = &d_rh * h_prev * r * &(1.0 - r);

        add_outer(&mut g.w_z, &da_z, x);
        add_outer(&mut g.w_r, &da_r, x);
        add_outer(&mut g.w_h, &da_h, x);
        add_outer(&mut g.u_z, &da_z, h_prev);
        add_outer(&mut g.u_r, &da_r, h_prev);
        add_outer(&mut g.u_h, &da_h, &rh);
        g.b_z += &da_z;
        g.b_r += &da_r;
        g.b_h += &da_h;

        grad_xs[t] = p.w_z.t().dot(&da_z) + p.w_r.t().dot(&da_r) + p.w_h.t().dot(&da_h);
        carry = &dh * z + &d_rh * r + p.u_z.t().dot(&da_z) + p.u_r.t().dot(&da_r);
    }
    Ok((g, grad_xs))
}
