//! End-to-end classifiers over point sets: the hybrid quantum model and the
//! two classical baselines (Set-MLP and a plain MLP on concatenated points).

use rand::Rng;

use crate::circuit::{heisenberg_features, CircuitConfig, CircuitParams, QuantumCircuit};
use crate::encoder::Point3;
use crate::error::{Error, Result};
use crate::grad::{cross_entropy, hybrid_loss_and_grad};
use crate::head::{head_backward, head_forward, HeadConfig, HeadParams, Mlp};
use crate::scalar::Scalar;

/// Quantum coefficients start uniform in `(-s, s)` with this `s`. Generator
/// spectra reach a few tens at N = 4, so larger values scramble the
/// initial state.
pub const QUANTUM_INIT_SCALE: f64 = 0.05;

/// Hidden widths of the plain MLP baseline.
pub const MLP_HIDDEN: [usize; 2] = [32, 32];

/// Common interface the trainer drives. Parameters are exposed as one flat
/// vector whose layout is fixed per model kind.
pub trait Classifier<T: Scalar> {
    fn kind(&self) -> &'static str;

    fn n_points(&self) -> usize;

    fn classes(&self) -> usize;

    fn params(&self) -> Vec<T>;

    fn set_params(&mut self, values: &[T]) -> Result<()>;

    fn n_params(&self) -> usize {
        self.params().len()
    }

    fn logits_batch(&self, batch: &[Vec<Point3<T>>]) -> Result<Vec<Vec<T>>>;

    /// Summed cross-entropy over the batch, its gradient with respect to the
    /// flat parameters, and the logits of every sample.
    fn loss_and_grad(&self, batch: &[Vec<Point3<T>>], labels: &[usize]) -> Result<(T, Vec<T>, Vec<Vec<T>>)>;
}

fn check_batch<T>(batch: &[Vec<Point3<T>>], n: usize) -> Result<()> {
    match batch.iter().find(|p| p.len() != n) {
        Some(p) => Err(Error::DimensionMismatch { expected: n, got: p.len() }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone)]
pub struct HybridModel<T> {
    circuit: QuantumCircuit<T>,
    quantum: CircuitParams<T>,
    head: HeadParams<T>,
}

impl<T: Scalar> HybridModel<T> {
    pub fn new<R: Rng + ?Sized>(cfg: CircuitConfig<T>, head: &HeadConfig, rng: &mut R) -> Result<Self> {
        let circuit = QuantumCircuit::new(cfg)?;
        let s = QUANTUM_INIT_SCALE;
        let c = (0..cfg.n_params()).map(|_| T::of(rng.random_range(-s..s))).collect();
        let quantum = CircuitParams::from_vec(&cfg, c)?;
        let head = HeadParams::init(head, rng);
        Ok(HybridModel { circuit, quantum, head })
    }

    pub fn from_parts(circuit: QuantumCircuit<T>, quantum: CircuitParams<T>, head: HeadParams<T>) -> Result<Self> {
        if quantum.len() != circuit.config().n_params() {
            return Err(Error::DimensionMismatch { expected: circuit.config().n_params(), got: quantum.len() });
        }
        Ok(HybridModel { circuit, quantum, head })
    }

    pub fn circuit(&self) -> &QuantumCircuit<T> {
        &self.circuit
    }

    pub fn quantum(&self) -> &CircuitParams<T> {
        &self.quantum
    }

    pub fn head(&self) -> &HeadParams<T> {
        &self.head
    }

    pub fn quantum_mut(&mut self) -> &mut CircuitParams<T> {
        &mut self.quantum
    }
}

impl<T: Scalar> Classifier<T> for HybridModel<T> {
    fn kind(&self) -> &'static str {
        "hyqurp"
    }

    fn n_points(&self) -> usize {
        self.circuit.config().n_points()
    }

    fn classes(&self) -> usize {
        self.head.config().classes()
    }

    fn params(&self) -> Vec<T> {
        let mut v = self.quantum.values().to_vec();
        v.extend_from_slice(self.head.values());
        v
    }

    fn n_params(&self) -> usize {
        self.quantum.len() + self.head.len()
    }

    fn set_params(&mut self, values: &[T]) -> Result<()> {
        if values.len() != self.n_params() {
            return Err(Error::DimensionMismatch { expected: self.n_params(), got: values.len() });
        }
        let (q, h) = values.split_at(self.quantum.len());
        self.quantum.values_mut().copy_from_slice(q);
        self.head.values_mut().copy_from_slice(h);
        Ok(())
    }

    fn logits_batch(&self, batch: &[Vec<Point3<T>>]) -> Result<Vec<Vec<T>>> {
        check_batch(batch, self.n_points())?;
        self.circuit
            .forward_batch(batch, &self.quantum)?
            .iter()
            .map(|f| Ok(head_forward(f.rows(), &self.head)?.0))
            .collect()
    }

    fn loss_and_grad(&self, batch: &[Vec<Point3<T>>], labels: &[usize]) -> Result<(T, Vec<T>, Vec<Vec<T>>)> {
        check_batch(batch, self.n_points())?;
        let (bundle, logits) = hybrid_loss_and_grad(&self.circuit, &self.quantum, &self.head, batch, labels)?;
        let mut grad = bundle.d_quantum;
        grad.extend(bundle.d_head);
        Ok((bundle.loss, grad, logits))
    }
}

/// Logits of a batch of quantum features, exposed for checks that need the
/// features themselves.
pub fn hybrid_features<T: Scalar>(model: &HybridModel<T>, batch: &[Vec<Point3<T>>]) -> Result<Vec<crate::circuit::FeatureMatrix<T>>> {
    let states = model.circuit.output_states(batch, &model.quantum)?;
    states.iter().map(heisenberg_features).collect()
}

/// Classical Set-MLP: a linear `3 -> 2` map on each point (no activation)
/// feeding the same head as the hybrid model. Parameters: the map's weight
/// (2 x 3) and bias, then the head.
#[derive(Debug, Clone)]
pub struct SetMlp<T> {
    n_points: usize,
    input: Vec<T>,
    head: HeadParams<T>,
}

const INPUT_MAP: usize = 2 * 3 + 2;

impl<T: Scalar> SetMlp<T> {
    pub fn new<R: Rng + ?Sized>(n_points: usize, head: &HeadConfig, rng: &mut R) -> Result<Self> {
        let input = Mlp::new(vec![3, 2], true)?.init(rng);
        Ok(SetMlp { n_points, input, head: HeadParams::init(head, rng) })
    }

    fn rows(&self, points: &[Point3<T>]) -> Vec<[T; 2]> {
        let w = &self.input;
        points
            .iter()
            .map(|p| {
                let v = p.to_array();
                let r = |o: usize| w[6 + o] + w[3 * o] * v[0] + w[3 * o + 1] * v[1] + w[3 * o + 2] * v[2];
                [r(0), r(1)]
            })
            .collect()
    }
}

impl<T: Scalar> Classifier<T> for SetMlp<T> {
    fn kind(&self) -> &'static str {
        "setmlp"
    }

    fn n_points(&self) -> usize {
        self.n_points
    }

    fn classes(&self) -> usize {
        self.head.config().classes()
    }

    fn params(&self) -> Vec<T> {
        let mut v = self.input.clone();
        v.extend_from_slice(self.head.values());
        v
    }

    fn n_params(&self) -> usize {
        INPUT_MAP + self.head.len()
    }

    fn set_params(&mut self, values: &[T]) -> Result<()> {
        if values.len() != self.n_params() {
            return Err(Error::DimensionMismatch { expected: self.n_params(), got: values.len() });
        }
        self.input.copy_from_slice(&values[..INPUT_MAP]);
        self.head.values_mut().copy_from_slice(&values[INPUT_MAP..]);
        Ok(())
    }

    fn logits_batch(&self, batch: &[Vec<Point3<T>>]) -> Result<Vec<Vec<T>>> {
        check_batch(batch, self.n_points)?;
        batch.iter().map(|p| Ok(head_forward(&self.rows(p), &self.head)?.0)).collect()
    }

    fn loss_and_grad(&self, batch: &[Vec<Point3<T>>], labels: &[usize]) -> Result<(T, Vec<T>, Vec<Vec<T>>)> {
        check_batch(batch, self.n_points)?;
        if batch.len() != labels.len() {
            return Err(Error::DimensionMismatch { expected: batch.len(), got: labels.len() });
        }
        let mut grad = vec![T::zero(); self.n_params()];
        let mut total = T::zero();
        let mut all = Vec::with_capacity(batch.len());
        for (points, &label) in batch.iter().zip(labels) {
            let (logits, cache) = head_forward(&self.rows(points), &self.head)?;
            let (loss, dlogits) = cross_entropy(&logits, label)?;
            let (dh, drows) = head_backward(&dlogits, &self.head, &cache)?;
            total += loss;
            for (p, d) in points.iter().zip(&drows) {
                let v = p.to_array();
                for o in 0..2 {
                    for i in 0..3 {
                        grad[3 * o + i] += d[o] * v[i];
                    }
                    grad[6 + o] += d[o];
                }
            }
            for (a, b) in grad[INPUT_MAP..].iter_mut().zip(dh) {
                *a += b;
            }
            all.push(logits);
        }
        Ok((total, grad, all))
    }
}

/// Plain MLP on the concatenated coordinates, `3N -> 32 -> 32 -> K`, `tanh`
/// hidden layers. Neither rotation nor permutation invariant.
#[derive(Debug, Clone)]
pub struct MlpBaseline<T> {
    n_points: usize,
    net: Mlp,
    params: Vec<T>,
}

impl<T: Scalar> MlpBaseline<T> {
    pub fn new<R: Rng + ?Sized>(n_points: usize, classes: usize, rng: &mut R) -> Result<Self> {
        let mut widths = vec![3 * n_points];
        widths.extend(MLP_HIDDEN);
        widths.push(classes);
        let net = Mlp::new(widths, true)?;
        let params = net.init(rng);
        Ok(MlpBaseline { n_points, net, params })
    }

    fn flatten(points: &[Point3<T>]) -> Vec<T> {
        points.iter().flat_map(|p| p.to_array()).collect()
    }
}

impl<T: Scalar> Classifier<T> for MlpBaseline<T> {
    fn kind(&self) -> &'static str {
        "mlp"
    }

    fn n_points(&self) -> usize {
        self.n_points
    }

    fn classes(&self) -> usize {
        self.net.output_dim()
    }

    fn params(&self) -> Vec<T> {
        self.params.clone()
    }

    fn n_params(&self) -> usize {
        self.params.len()
    }

    fn set_params(&mut self, values: &[T]) -> Result<()> {
        if values.len() != self.params.len() {
            return Err(Error::DimensionMismatch { expected: self.params.len(), got: values.len() });
        }
        self.params.copy_from_slice(values);
        Ok(())
    }

    fn logits_batch(&self, batch: &[Vec<Point3<T>>]) -> Result<Vec<Vec<T>>> {
        check_batch(batch, self.n_points)?;
        Ok(batch
            .iter()
            .map(|p| self.net.forward(&self.params, &Self::flatten(p), 1).pop().expect("output layer"))
            .collect())
    }

    fn loss_and_grad(&self, batch: &[Vec<Point3<T>>], labels: &[usize]) -> Result<(T, Vec<T>, Vec<Vec<T>>)> {
        check_batch(batch, self.n_points)?;
        if batch.len() != labels.len() {
            return Err(Error::DimensionMismatch { expected: batch.len(), got: labels.len() });
        }
        let mut grad = vec![T::zero(); self.params.len()];
        let mut total = T::zero();
        let mut all = Vec::with_capacity(batch.len());
        for (points, &label) in batch.iter().zip(labels) {
            let acts = self.net.forward(&self.params, &Self::flatten(points), 1);
            let logits = acts.last().expect("output layer").clone();
            let (loss, dlogits) = cross_entropy(&logits, label)?;
            self.net.backward(&self.params, &acts, 1, &dlogits, &mut grad);
            total += loss;
            all.push(logits);
        }
        Ok((total, grad, all))
    }
}
