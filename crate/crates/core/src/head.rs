//! Permutation-invariant Set-MLP head: a shared row-wise MLP, six symmetric
//! column statistics, then a classifier MLP. Gradients are hand-derived.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Number of aggregation statistics: mean, max, min, sum, var, std.
pub const N_STATS: usize = 6;

/// Fully connected stack with `tanh` after every layer except, optionally,
/// the last. Parameters are laid out per layer as the `out x in` weight
/// matrix row-major followed by the bias.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mlp {
    widths: Vec<usize>,
    linear_output: bool,
}

impl Mlp {
    pub fn new(widths: Vec<usize>, linear_output: bool) -> Result<Self> {
        if widths.len() < 2 {
            return Err(Error::Shape(format!("an MLP needs at least two widths, got {widths:?}")));
        }
        if widths.contains(&0) {
            return Err(Error::Shape(format!("zero layer width in {widths:?}")));
        }
        Ok(Mlp { widths, linear_output })
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().expect("at least two widths")
    }

    pub fn n_layers(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn n_params(&self) -> usize {
        self.widths.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    fn activated(&self, layer: usize) -> bool {
        !(self.linear_output && layer + 1 == self.n_layers())
    }

    /// PyTorch-style default: weights and biases uniform in
    /// `(-1/sqrt(fan_in), 1/sqrt(fan_in))`.
    pub fn init<T: Scalar, R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        let mut out = Vec::with_capacity(self.n_params());
        for w in self.widths.windows(2) {
            let bound = 1.0 / (w[0] as f64).sqrt();
            for _ in 0..w[0] * w[1] + w[1] {
                out.push(T::of(rng.random_range(-bound..bound)));
            }
        }
        out
    }

    /// Row-wise forward pass over `m` rows. Returns every layer's output,
    /// starting with the input itself.
    pub fn forward<T: Scalar>(&self, params: &[T], input: &[T], m: usize) -> Vec<Vec<T>> {
        assert_eq!(params.len(), self.n_params(), "MLP parameter count");
        assert_eq!(input.len(), m * self.input_dim(), "MLP input shape");
        let mut acts = vec![input.to_vec()];
        let mut off = 0;
        for (l, w) in self.widths.windows(2).enumerate() {
            let (n_in, n_out) = (w[0], w[1]);
            let (weights, bias) = (&params[off..off + n_in * n_out], &params[off + n_in * n_out..off + n_in * n_out + n_out]);
            off += n_in * n_out + n_out;
            let x = acts.last().expect("input pushed");
            let mut y = vec![T::zero(); m * n_out];
            for r in 0..m {
                let xr = &x[r * n_in..(r + 1) * n_in];
                for o in 0..n_out {
                    let wo = &weights[o * n_in..(o + 1) * n_in];
                    let z = bias[o] + wo.iter().zip(xr).map(|(&a, &b)| a * b).sum::<T>();
                    y[r * n_out + o] = if self.activated(l) { z.tanh() } else { z };
                }
            }
            acts.push(y);
        }
        acts
    }

    /// Accumulates parameter gradients into `dparams` and returns the input
    /// gradient, given the activations of the matching forward pass.
    pub fn backward<T: Scalar>(&self, params: &[T], acts: &[Vec<T>], m: usize, dout: &[T], dparams: &mut [T]) -> Vec<T> {
        assert_eq!(dparams.len(), self.n_params(), "MLP gradient buffer");
        let mut offsets = Vec::with_capacity(self.n_layers());
        let mut off = 0;
        for w in self.widths.windows(2) {
            offsets.push(off);
            off += w[0] * w[1] + w[1];
        }
        let mut delta = dout.to_vec();
        for l in (0..self.n_layers()).rev() {
            let (n_in, n_out) = (self.widths[l], self.widths[l + 1]);
            let off = offsets[l];
            if self.activated(l) {
                for (d, &a) in delta.iter_mut().zip(&acts[l + 1]) {
                    *d *= T::one() - a * a;
                }
            }
            let x = &acts[l];
            let mut dx = vec![T::zero(); m * n_in];
            for r in 0..m {
                for o in 0..n_out {
                    let g = delta[r * n_out + o];
                    if g == T::zero() {
                        continue;
                    }
                    dparams[off + n_in * n_out + o] += g;
                    for i in 0..n_in {
                        dparams[off + o * n_in + i] += g * x[r * n_in + i];
                        dx[r * n_in + i] += g * params[off + o * n_in + i];
                    }
                }
            }
            delta = dx;
        }
        delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Light,
    Mid,
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "light" => Ok(Profile::Light),
            "mid" => Ok(Profile::Mid),
            other => Err(Error::Shape(format!("unknown head profile {other:?}, expected light or mid"))),
        }
    }
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Profile::Light => "light",
            Profile::Mid => "mid",
        })
    }
}

/// Widths of the two stacks. The row-wise stack maps 2 -> d with `tanh`
/// on every layer; the classifier maps 6d -> K with linear logits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadConfig {
    pre: Mlp,
    post: Mlp,
}

impl HeadConfig {
    pub fn new(pre_widths: Vec<usize>, post_hidden: Vec<usize>, classes: usize) -> Result<Self> {
        if pre_widths.first() != Some(&2) {
            return Err(Error::Shape(format!("row-wise widths must start at 2, got {pre_widths:?}")));
        }
        if classes < 2 {
            return Err(Error::TooSmall { what: "class count", value: classes, min: 2 });
        }
        let d = *pre_widths.last().expect("non-empty");
        let mut post = vec![N_STATS * d];
        post.extend(post_hidden);
        post.push(classes);
        Ok(HeadConfig { pre: Mlp::new(pre_widths, false)?, post: Mlp::new(post, true)? })
    }

    pub fn profile(profile: Profile, classes: usize) -> Result<Self> {
        match profile {
            Profile::Light => Self::new(vec![2, 4, 4], vec![24, 24], classes),
            Profile::Mid => Self::new(vec![2, 8, 16, 32], vec![32, 16, 8], classes),
        }
    }

    pub fn pre(&self) -> &Mlp {
        &self.pre
    }

    pub fn post(&self) -> &Mlp {
        &self.post
    }

    pub fn row_dim(&self) -> usize {
        self.pre.output_dim()
    }

    pub fn classes(&self) -> usize {
        self.post.output_dim()
    }

    pub fn n_params(&self) -> usize {
        self.pre.n_params() + self.post.n_params()
    }
}

static NEXT_STAMP: AtomicU64 = AtomicU64::new(1);

fn fresh_stamp() -> u64 {
    NEXT_STAMP.fetch_add(1, Ordering::Relaxed)
}

/// Head weights, flat: the row-wise stack then the classifier. Every
/// mutable borrow re-stamps the parameters so caches from earlier forward
/// passes are recognised as stale.
#[derive(Debug, Clone)]
pub struct HeadParams<T> {
    cfg: HeadConfig,
    values: Vec<T>,
    stamp: u64,
}

impl<T: Scalar> PartialEq for HeadParams<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cfg == other.cfg && self.values == other.values
    }
}

impl<T: Scalar> HeadParams<T> {
    pub fn zeros(cfg: &HeadConfig) -> Self {
        HeadParams { cfg: cfg.clone(), values: vec![T::zero(); cfg.n_params()], stamp: fresh_stamp() }
    }

    pub fn init<R: Rng + ?Sized>(cfg: &HeadConfig, rng: &mut R) -> Self {
        let mut values = cfg.pre.init(rng);
        values.extend(cfg.post.init::<T, _>(rng));
        HeadParams { cfg: cfg.clone(), values, stamp: fresh_stamp() }
    }

    pub fn from_vec(cfg: &HeadConfig, values: Vec<T>) -> Result<Self> {
        if values.len() != cfg.n_params() {
            return Err(Error::DimensionMismatch { expected: cfg.n_params(), got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("head parameter"));
        }
        Ok(HeadParams { cfg: cfg.clone(), values, stamp: fresh_stamp() })
    }

    pub fn config(&self) -> &HeadConfig {
        &self.cfg
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        self.stamp = fresh_stamp();
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn split(&self) -> (&[T], &[T]) {
        self.values.split_at(self.cfg.pre.n_params())
    }
}

/// Column statistics of an `m x d` matrix in stat-major order
/// `(mean, max, min, sum, var, std)`, population variance.
pub fn aggregate<T: Scalar>(y: &[T], m: usize, d: usize) -> Result<Vec<T>> {
    if m == 0 {
        return Err(Error::TooSmall { what: "row count", value: 0, min: 1 });
    }
    if y.len() != m * d {
        return Err(Error::DimensionMismatch { expected: m * d, got: y.len() });
    }
    let mut out = vec![T::zero(); N_STATS * d];
    let mf = T::of_usize(m);
    let mut col = vec![T::zero(); m];
    for c in 0..d {
        // reducing in sorted order makes every statistic bitwise independent
        // of the row order
        for (r, v) in col.iter_mut().enumerate() {
            *v = y[r * d + c];
        }
        col.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let sum = col.iter().fold(T::zero(), |a, &v| a + v);
        let mean = sum / mf;
        let (min, max) = (col[0], col[m - 1]);
        let var = col.iter().fold(T::zero(), |a, &v| a + (v - mean) * (v - mean)) / mf;
        for (s, v) in [mean, max, min, sum, var, var.sqrt()].into_iter().enumerate() {
            out[s * d + c] = v;
        }
    }
    Ok(out)
}

/// Gradient of [`aggregate`] with respect to its input. `max`/`min` route
/// to the first attaining row; `std` contributes nothing at zero variance.
pub fn aggregate_backward<T: Scalar>(y: &[T], m: usize, d: usize, stats: &[T], dstats: &[T]) -> Vec<T> {
    let mut dy = vec![T::zero(); m * d];
    let mf = T::of_usize(m);
    let two = T::of(2.0);
    for c in 0..d {
        let g = |s: usize| dstats[s * d + c];
        let (mean, max, min, std) = (stats[c], stats[d + c], stats[2 * d + c], stats[5 * d + c]);
        let dvar = g(4) + if std > T::zero() { g(5) / (two * std) } else { T::zero() };
        for r in 0..m {
            dy[r * d + c] += g(0) / mf + g(3) + dvar * two * (y[r * d + c] - mean) / mf;
        }
        if let Some(r) = (0..m).find(|&r| y[r * d + c] == max) {
            dy[r * d + c] += g(1);
        }
        if let Some(r) = (0..m).find(|&r| y[r * d + c] == min) {
            dy[r * d + c] += g(2);
        }
    }
    dy
}

/// Activations retained by [`head_forward`] for the backward pass.
#[derive(Debug, Clone)]
pub struct HeadCache<T> {
    stamp: u64,
    rows: usize,
    pre_acts: Vec<Vec<T>>,
    stats: Vec<T>,
    post_acts: Vec<Vec<T>>,
}

impl<T> HeadCache<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }
}

/// Logits for one set of 2-vectors.
pub fn head_forward<T: Scalar>(rows: &[[T; 2]], params: &HeadParams<T>) -> Result<(Vec<T>, HeadCache<T>)> {
    let m = rows.len();
    if m == 0 {
        return Err(Error::TooSmall { what: "row count", value: 0, min: 1 });
    }
    let cfg = &params.cfg;
    let (pre_p, post_p) = params.split();
    let input: Vec<T> = rows.iter().flatten().copied().collect();
    let pre_acts = cfg.pre.forward(pre_p, &input, m);
    let stats = aggregate(pre_acts.last().expect("output layer"), m, cfg.row_dim())?;
    let post_acts = cfg.post.forward(post_p, &stats, 1);
    let logits = post_acts.last().expect("output layer").clone();
    Ok((logits, HeadCache { stamp: params.stamp, rows: m, pre_acts, stats, post_acts }))
}

/// Parameter and input gradients from `dL/dlogits`.
pub fn head_backward<T: Scalar>(dlogits: &[T], params: &HeadParams<T>, cache: &HeadCache<T>) -> Result<(Vec<T>, Vec<[T; 2]>)> {
    if cache.stamp != params.stamp {
        return Err(Error::StaleCache);
    }
    let cfg = &params.cfg;
    if dlogits.len() != cfg.classes() {
        return Err(Error::DimensionMismatch { expected: cfg.classes(), got: dlogits.len() });
    }
    let (pre_p, post_p) = params.split();
    let mut grads = vec![T::zero(); cfg.n_params()];
    let (g_pre, g_post) = grads.split_at_mut(cfg.pre.n_params());
    let dstats = cfg.post.backward(post_p, &cache.post_acts, 1, dlogits, g_post);
    let m = cache.rows;
    let y = cache.pre_acts.last().expect("output layer");
    let dy = aggregate_backward(y, m, cfg.row_dim(), &cache.stats, &dstats);
    let dx = cfg.pre.backward(pre_p, &cache.pre_acts, m, &dy, g_pre);
    let dfeat = dx.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
    Ok((grads, dfeat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grad::{relative_error, GRADIENT_CHECK_FLOOR};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn profile_parameter_counts() {
        // hand arithmetic: pre 2*4+4 + 4*4+4, post 24*24+24 twice, then 24*5+5
        let light = HeadConfig::profile(Profile::Light, 5).unwrap();
        assert_eq!(light.pre().n_params(), 12 + 20);
        assert_eq!(light.post().n_params(), 600 + 600 + 125);
        assert_eq!(light.n_params(), 1357);
        assert_eq!(light.post().widths(), &[24, 24, 24, 5]);
        let mid = HeadConfig::profile(Profile::Mid, 5).unwrap();
        assert_eq!(mid.post().widths(), &[192, 32, 16, 8, 5]);
        assert_eq!(mid.n_params(), 24 + 144 + 544 + 6176 + 528 + 136 + 45);
    }

    #[test]
    fn aggregate_examples() {
        let s = aggregate(&[1.0, 3.0], 2, 1).unwrap();
        assert_eq!(s, vec![2.0, 3.0, 1.0, 4.0, 1.0, 1.0]);
        let s = aggregate(&[0.5, -2.0], 1, 2).unwrap();
        assert_eq!(s, vec![0.5, -2.0, 0.5, -2.0, 0.5, -2.0, 0.5, -2.0, 0.0, 0.0, 0.0, 0.0]);
        let s = aggregate(&[0.7f64; 3], 3, 1).unwrap();
        assert!((s[0] - 0.7).abs() < 1e-15 && s[1] == 0.7 && s[2] == 0.7 && (s[3] - 2.1).abs() < 1e-15);
        assert!(s[4].abs() < 1e-30 && s[5].abs() < 1e-15);
        assert!(aggregate::<f64>(&[], 0, 1).is_err());
    }

    #[test]
    fn zero_weights_give_zero_logits() {
        let cfg = HeadConfig::profile(Profile::Light, 3).unwrap();
        let p = HeadParams::<f64>::zeros(&cfg);
        let (logits, _) = head_forward(&[[0.3, -0.2], [1.0, 2.0]], &p).unwrap();
        assert_eq!(logits, vec![0.0; 3]);
    }

    #[test]
    fn hand_set_three_row_case() {
        // pre 2 -> 2 (tanh), post 12 -> 2 linear; oracle evaluated scalar by scalar
        let cfg = HeadConfig::new(vec![2, 2], vec![], 2).unwrap();
        let pre = [0.5, -0.25, 0.1, 0.3, 0.05, -0.1];
        let post: Vec<f64> = (0..26).map(|i| ((i as f64) * 0.37).sin() * 0.2).collect();
        let mut values = pre.to_vec();
        values.extend(&post);
        let p = HeadParams::from_vec(&cfg, values).unwrap();
        let rows = [[0.2, -0.4], [1.1, 0.3], [-0.6, 0.9]];
        let (logits, _) = head_forward(&rows, &p).unwrap();

        let h: Vec<[f64; 2]> = rows
            .iter()
            .map(|r| [(0.5 * r[0] - 0.25 * r[1] + 0.05).tanh(), (0.1 * r[0] + 0.3 * r[1] - 0.1).tanh()])
            .collect();
        let mut agg = Vec::new();
        let col = |c: usize| h.iter().map(move |r| r[c]);
        let means: Vec<f64> = (0..2).map(|c| col(c).sum::<f64>() / 3.0).collect();
        for c in 0..2 {
            agg.push(means[c]);
        }
        for c in 0..2 {
            agg.push(col(c).fold(f64::MIN, f64::max));
        }
        for c in 0..2 {
            agg.push(col(c).fold(f64::MAX, f64::min));
        }
        for c in 0..2 {
            agg.push(col(c).sum::<f64>());
        }
        let vars: Vec<f64> = (0..2).map(|c| col(c).map(|v| (v - means[c]).powi(2)).sum::<f64>() / 3.0).collect();
        agg.extend(&vars);
        agg.extend(vars.iter().map(|v| v.sqrt()));
        for k in 0..2 {
            let want = post[24 + k] + (0..12).map(|i| post[k * 12 + i] * agg[i]).sum::<f64>();
            assert!((logits[k] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn rows_permute_exactly() {
        let cfg = HeadConfig::profile(Profile::Light, 4).unwrap();
        let p = HeadParams::<f64>::init(&cfg, &mut ChaCha8Rng::seed_from_u64(1));
        let rows = [[0.2, -0.4], [1.1, 0.3], [-0.6, 0.9], [0.0, 0.5]];
        let perm = [[0.0, 0.5], [-0.6, 0.9], [0.2, -0.4], [1.1, 0.3]];
        let (a, ca) = head_forward(&rows, &p).unwrap();
        let (b, cb) = head_forward(&perm, &p).unwrap();
        assert_eq!(a, b);
        let up = [0.3, -1.0, 0.2, 0.5];
        let (ga, fa) = head_backward(&up, &p, &ca).unwrap();
        let (gb, fb) = head_backward(&up, &p, &cb).unwrap();
        for (x, y) in ga.iter().zip(&gb) {
            assert!((x - y).abs() < 1e-14);
        }
        for (i, j) in [(0, 2), (1, 3), (2, 1), (3, 0)] {
            assert!((fa[i][0] - fb[j][0]).abs() < 1e-14 && (fa[i][1] - fb[j][1]).abs() < 1e-14);
        }
    }

    #[test]
    fn stale_cache_is_rejected() {
        let cfg = HeadConfig::profile(Profile::Light, 2).unwrap();
        let mut p = HeadParams::<f64>::init(&cfg, &mut ChaCha8Rng::seed_from_u64(1));
        let (_, cache) = head_forward(&[[0.1, 0.2]], &p).unwrap();
        p.values_mut()[0] += 1.0;
        assert!(matches!(head_backward(&[1.0, 0.0], &p, &cache), Err(Error::StaleCache)));
    }

    #[test]
    fn zero_upstream_zero_gradient() {
        let cfg = HeadConfig::profile(Profile::Light, 3).unwrap();
        let p = HeadParams::<f64>::init(&cfg, &mut ChaCha8Rng::seed_from_u64(2));
        let (_, cache) = head_forward(&[[0.1, 0.2], [0.3, -0.1]], &p).unwrap();
        let (g, f) = head_backward(&[0.0; 3], &p, &cache).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
        assert!(f.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn finite_difference_gradients() {
        let cfg = HeadConfig::profile(Profile::Light, 5).unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = HeadParams::<f64>::init(&cfg, &mut rng);
            let rows: Vec<[f64; 2]> = (0..6).map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]).collect();
            let up: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
            let loss = |p: &HeadParams<f64>, rows: &[[f64; 2]]| -> f64 {
                head_forward(rows, p).unwrap().0.iter().zip(&up).map(|(a, b)| a * b).sum()
            };
            let (_, cache) = head_forward(&rows, &p).unwrap();
            let (g, gf) = head_backward(&up, &p, &cache).unwrap();
            let h = 1e-5;
            for i in 0..p.len() {
                let mut plus = p.clone();
                plus.values_mut()[i] += h;
                let mut minus = p.clone();
                minus.values_mut()[i] -= h;
                let fd = (loss(&plus, &rows) - loss(&minus, &rows)) / (2.0 * h);
                assert!(relative_error(fd, g[i], GRADIENT_CHECK_FLOOR) < 1e-5, "param {i}: {fd} vs {}", g[i]);
            }
            for r in 0..rows.len() {
                for c in 0..2 {
                    let mut a = rows.clone();
                    a[r][c] += h;
                    let mut b = rows.clone();
                    b[r][c] -= h;
                    let fd = (loss(&p, &a) - loss(&p, &b)) / (2.0 * h);
                    assert!(relative_error(fd, gf[r][c], GRADIENT_CHECK_FLOOR) < 1e-5);
                }
            }
        }
    }
}
