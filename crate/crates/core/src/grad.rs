//! Loss and gradients: softmax cross-entropy, adjoint-mode derivatives of
//! the circuit coefficients, and their composition with the head.

use crate::circuit::{apply_heisenberg_sum, heisenberg_features, CircuitParams, FeatureMatrix, QuantumCircuit};
use crate::encoder::Point3;
use crate::error::{Error, Result};
use crate::group::Sign;
use crate::head::{head_backward, head_forward, HeadParams};
use crate::qcore::StateVector;
use crate::scalar::Scalar;

/// Gradients of one loss evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientBundle<T> {
    pub d_quantum: Vec<T>,
    pub d_head: Vec<T>,
    pub loss: T,
}

impl<T: Scalar> GradientBundle<T> {
    pub fn is_finite(&self) -> bool {
        self.loss.is_finite() && self.d_quantum.iter().chain(&self.d_head).all(|v| v.is_finite())
    }
}

/// `-log softmax(logits)[label]` and its gradient `softmax - onehot`.
pub fn cross_entropy<T: Scalar>(logits: &[T], label: usize) -> Result<(T, Vec<T>)> {
    if label >= logits.len() {
        return Err(Error::LabelOutOfRange { label, classes: logits.len() });
    }
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    let loss = total.ln() - (logits[label] - max);
    let mut d: Vec<T> = exps.iter().map(|&e| e / total).collect();
    d[label] -= T::one();
    Ok((loss, d))
}

/// Reverse sweep from output states `psis = C E psi_0`, with the adjoint
/// seeded from `upstream` (one feature gradient per sample). Returns one
/// coefficient gradient per sample; `psis` is consumed.
pub fn adjoint_sweep<T: Scalar>(
    circuit: &QuantumCircuit<T>,
    mut psis: Vec<StateVector<T>>,
    params: &CircuitParams<T>,
    upstream: &[FeatureMatrix<T>],
) -> Result<Vec<Vec<T>>> {
    if upstream.len() != psis.len() {
        return Err(Error::DimensionMismatch { expected: psis.len(), got: upstream.len() });
    }
    let cfg = circuit.config();
    if params.len() != cfg.n_params() {
        return Err(Error::DimensionMismatch { expected: cfg.n_params(), got: params.len() });
    }
    let mut lams = psis.iter().zip(upstream).map(|(psi, g)| apply_heisenberg_sum(psi, g)).collect::<Result<Vec<_>>>()?;
    let mut grads = vec![vec![T::zero(); params.len()]; psis.len()];
    let mut scratch = vec![T::zero(); psis.len()];
    let gens = circuit.generators();
    for l in (0..cfg.blocks()).rev() {
        for k in (2..=cfg.n_points()).rev() {
            for sign in [Sign::Minus, Sign::Plus] {
                let idx = params.index(l, k, sign);
                scratch.iter_mut().for_each(|g| *g = T::zero());
                gens.get(k, sign)?.reverse_step(params.values()[idx], &mut psis, &mut lams, &mut scratch);
                for (g, s) in grads.iter_mut().zip(&scratch) {
                    g[idx] = *s;
                }
            }
        }
    }
    Ok(grads)
}

/// `dL/dc` for a single point set given `dL/dfeatures`.
pub fn quantum_grads<T: Scalar>(
    circuit: &QuantumCircuit<T>,
    points: &[Point3<T>],
    params: &CircuitParams<T>,
    upstream: &FeatureMatrix<T>,
) -> Result<Vec<T>> {
    let psis = circuit.output_states(&[points], params)?;
    Ok(adjoint_sweep(circuit, psis, params, std::slice::from_ref(upstream))?.remove(0))
}

/// Summed loss and gradients of the hybrid model over a labelled batch,
/// together with each sample's logits.
pub fn hybrid_loss_and_grad<T: Scalar, P: AsRef<[Point3<T>]>>(
    circuit: &QuantumCircuit<T>,
    quantum: &CircuitParams<T>,
    head: &HeadParams<T>,
    batch: &[P],
    labels: &[usize],
) -> Result<(GradientBundle<T>, Vec<Vec<T>>)> {
    if batch.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: batch.len(), got: labels.len() });
    }
    let psis = circuit.output_states(batch, quantum)?;
    let mut bundle = GradientBundle { d_quantum: vec![T::zero(); quantum.len()], d_head: vec![T::zero(); head.len()], loss: T::zero() };
    let mut upstream = Vec::with_capacity(batch.len());
    let mut all_logits = Vec::with_capacity(batch.len());
    for (psi, &label) in psis.iter().zip(labels) {
        let feats = heisenberg_features(psi)?;
        let (logits, cache) = head_forward(feats.rows(), head)?;
        let (loss, dlogits) = cross_entropy(&logits, label)?;
        let (dh, df) = head_backward(&dlogits, head, &cache)?;
        bundle.loss += loss;
        for (a, b) in bundle.d_head.iter_mut().zip(dh) {
            *a += b;
        }
        upstream.push(FeatureMatrix::from_rows(feats.n_points(), df)?);
        all_logits.push(logits);
    }
    for g in adjoint_sweep(circuit, psis, quantum, &upstream)? {
        for (a, b) in bundle.d_quantum.iter_mut().zip(g) {
            *a += b;
        }
    }
    Ok((bundle, all_logits))
}

/// Denominator floor for gradient checks: central differences with step
/// `1e-5` resolve derivatives to roughly `1e-10` absolute, so relative error
/// is only meaningful above this magnitude.
pub const GRADIENT_CHECK_FLOOR: f64 = 1e-4;

/// `|a - b| / max(|a|, |b|, floor)`.
pub fn relative_error<T: Scalar>(a: T, b: T, floor: T) -> T {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}
