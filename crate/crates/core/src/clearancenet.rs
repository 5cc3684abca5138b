//! The learned clearance regressor.
//!
//! A three-layer fully connected network maps a standardized extended
//! configuration to a scalar signed-clearance estimate. Everything is
//! hand-rolled in f64: Glorot-uniform init, inverted dropout on both hidden
//! layers, Adam with bias correction, and an analytic gradient of the
//! output with respect to the raw input (through the standardization), the
//! quantity the planner's repair phase pushes configurations along.
//!
//! Batched inference is the planner's throughput workhorse: one weight
//! matrix is shared across every row of a batch, so screening a thousand
//! edge points costs far less than a thousand single calls. Batches are
//! processed in fixed-size row chunks so results never depend on thread
//! count or the `parallel` feature.

use crate::cspace::{Environment, ExtendedConfig, Rng};
use crate::dataset::ClearanceDataset;
use crate::error::{Error, Result};
use crate::exec;
use ndarray::{Array1, Array2, Axis, Zip};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Rows processed per chunk in batched inference.
const ROW_CHUNK: usize = 256;

/// Checkpoint format version written by [`save_model`].
const CHECKPOINT_VERSION: u32 = 1;

/// Guard against degenerate (constant) input dimensions when
/// standardizing.
const MIN_STD: f64 = 1e-12;

/// Hidden-layer nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Rectifier,
    Softplus,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Rectifier => z.max(0.0),
            // max(z,0) + ln(1+e^-|z|) never overflows.
            Activation::Softplus => z.max(0.0) + (-z.abs()).exp().ln_1p(),
        }
    }

    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Rectifier => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Softplus => sigmoid(z),
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Training hyperparameters; the defaults are the tuned operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub lr: f64,
    pub batch: usize,
    pub dropout: f64,
    pub seed: u64,
    pub activation: Activation,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden: 256,
            epochs: 50,
            lr: 1.7495e-4,
            batch: 191,
            dropout: 0.01,
            seed: 0,
            activation: Activation::Rectifier,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.hidden == 0 {
            return Err(Error::InvalidConstruction("hidden width is zero".into()));
        }
        if self.batch == 0 {
            return Err(Error::InvalidConstruction("batch size is zero".into()));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::InvalidConstruction(format!(
                "learning rate {} must be positive and finite",
                self.lr
            )));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::InvalidConstruction(format!(
                "dropout rate {} must lie in [0, 1)",
                self.dropout
            )));
        }
        Ok(())
    }
}

/// Per-epoch mean squared errors: training average over the epoch's
/// minibatches (with dropout active), evaluation over the held-out split
/// (dropout off). `eval_mse` entries are NaN when the dataset has no
/// evaluation split.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LossHistory {
    pub train_mse: Vec<f64>,
    pub eval_mse: Vec<f64>,
}

/// A batch of model inputs, one extended configuration per row.
#[derive(Debug, Clone, PartialEq)]
pub struct DataBatch {
    rows: Array2<f64>,
}

impl DataBatch {
    /// Collect configurations into a batch; all must share one shape and
    /// the batch must be nonempty.
    pub fn from_configs<'a, I>(configs: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a ExtendedConfig>,
    {
        let configs: Vec<&ExtendedConfig> = configs.into_iter().collect();
        let n = configs.len();
        if n == 0 {
            return Err(Error::InvalidConstruction("batch has no rows".into()));
        }
        let d = configs[0].dim();
        let mut rows = Array2::zeros((n, d));
        for (i, cfg) in configs.iter().enumerate() {
            if cfg.dim() != d {
                return Err(Error::DimensionMismatch {
                    context: "batch row",
                    expected: d,
                    actual: cfg.dim(),
                });
            }
            cfg.flatten_into(rows.row_mut(i).as_slice_mut().expect("row is contiguous"));
        }
        Ok(DataBatch { rows })
    }

    pub fn from_rows(rows: Array2<f64>) -> Result<Self> {
        if rows.nrows() == 0 {
            return Err(Error::InvalidConstruction("batch has no rows".into()));
        }
        Ok(DataBatch { rows })
    }

    pub fn n(&self) -> usize {
        self.rows.nrows()
    }

    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }

    pub fn rows(&self) -> &Array2<f64> {
        &self.rows
    }
}

/// The regressor: standardization statistics plus three dense layers.
///
/// Weight matrices are stored input-major (`fan_in` rows by `fan_out`
/// columns), so a batch forward is plain row-matrix times weight-matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ClearanceModel {
    env_name: String,
    layer_sizes: [usize; 4],
    activation: Activation,
    input_mean: Array1<f64>,
    input_std: Array1<f64>,
    weights: [Array2<f64>; 3],
    biases: [Array1<f64>; 3],
    train_config: Option<TrainConfig>,
    final_train_mse: Option<f64>,
    final_eval_mse: Option<f64>,
}

impl ClearanceModel {
    /// Fresh Glorot-uniform model with identity standardization.
    ///
    /// Weights are drawn row-major layer by layer from `seed`'s stream;
    /// biases start at zero.
    pub fn init(
        env_name: impl Into<String>,
        d_e: usize,
        hidden: usize,
        activation: Activation,
        seed: u64,
    ) -> Result<Self> {
        if d_e == 0 || hidden == 0 {
            return Err(Error::InvalidConstruction(format!(
                "layer sizes ({d_e}, {hidden}) must be positive"
            )));
        }
        let layer_sizes = [d_e, hidden, hidden, 1];
        let mut rng = Rng::from_seed(seed);
        let mut weights = Vec::with_capacity(3);
        let mut biases = Vec::with_capacity(3);
        for l in 0..3 {
            let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let w = Array2::from_shape_fn((fan_in, fan_out), |_| rng.uniform(-limit, limit));
            weights.push(w);
            biases.push(Array1::zeros(fan_out));
        }
        Ok(ClearanceModel {
            env_name: env_name.into(),
            layer_sizes,
            activation,
            input_mean: Array1::zeros(d_e),
            input_std: Array1::ones(d_e),
            weights: weights.try_into().expect("three layers"),
            biases: biases.try_into().expect("three layers"),
            train_config: None,
            final_train_mse: None,
            final_eval_mse: None,
        })
    }

    pub fn env_name(&self) -> &str {
        &self.env_name
    }

    pub fn d_e(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn hidden(&self) -> usize {
        self.layer_sizes[1]
    }

    pub fn layer_sizes(&self) -> [usize; 4] {
        self.layer_sizes
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn final_train_mse(&self) -> Option<f64> {
        self.final_train_mse
    }

    pub fn final_eval_mse(&self) -> Option<f64> {
        self.final_eval_mse
    }

    pub fn train_config(&self) -> Option<&TrainConfig> {
        self.train_config.as_ref()
    }

    fn check_dim(&self, actual: usize) -> Result<()> {
        if actual != self.d_e() {
            return Err(Error::DimensionMismatch {
                context: "model input",
                expected: self.d_e(),
                actual,
            });
        }
        Ok(())
    }

    /// Estimated clearance for one configuration.
    pub fn forward(&self, cfg: &ExtendedConfig) -> Result<f64> {
        self.check_dim(cfg.dim())?;
        Ok(self.forward_flat_unchecked(&cfg.flatten()))
    }

    /// Estimated clearance for one raw input vector laid out as
    /// `[robot, workspace]`.
    pub fn forward_flat(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.forward_flat_unchecked(x))
    }

    fn forward_flat_unchecked(&self, x: &[f64]) -> f64 {
        let mut a: Array1<f64> = Array1::from_shape_fn(x.len(), |i| {
            (x[i] - self.input_mean[i]) / self.input_std[i]
        });
        for l in 0..2 {
            let mut z = a.dot(&self.weights[l]);
            z += &self.biases[l];
            z.mapv_inplace(|v| self.activation.apply(v));
            a = z;
        }
        a.dot(&self.weights[2].column(0)) + self.biases[2][0]
    }

    /// Estimated clearances for a whole batch, row per input.
    ///
    /// Equals [`Self::forward`] on each row to within 1e-9; rows are
    /// processed in fixed chunks so the output is identical however much
    /// parallelism is available.
    pub fn forward_batch(&self, batch: &DataBatch) -> Result<Vec<f64>> {
        self.check_dim(batch.dim())?;
        let n = batch.n();
        let outputs = exec::map_chunks(n, ROW_CHUNK, |range| {
            let block = batch.rows.slice(ndarray::s![range.start..range.end, ..]);
            let mut a = (&block - &self.input_mean) / &self.input_std;
            for l in 0..2 {
                let mut z = a.dot(&self.weights[l]);
                z += &self.biases[l];
                z.mapv_inplace(|v| self.activation.apply(v));
                a = z;
            }
            let out = a.dot(&self.weights[2]) + self.biases[2][0];
            out.column(0).to_vec()
        });
        let mut flat = Vec::with_capacity(n);
        for chunk in outputs {
            flat.extend_from_slice(&chunk);
        }
        Ok(flat)
    }

    /// Analytic gradient of the estimate with respect to the raw input,
    /// including the standardization Jacobian. Length `d_e`, ordered
    /// `[robot, workspace]`.
    pub fn input_gradient(&self, cfg: &ExtendedConfig) -> Result<Vec<f64>> {
        self.check_dim(cfg.dim())?;
        let x = cfg.flatten();
        let xs: Array1<f64> = Array1::from_shape_fn(x.len(), |i| {
            (x[i] - self.input_mean[i]) / self.input_std[i]
        });

        let mut z1 = xs.dot(&self.weights[0]);
        z1 += &self.biases[0];
        let a1 = z1.mapv(|v| self.activation.apply(v));
        let mut z2 = a1.dot(&self.weights[1]);
        z2 += &self.biases[1];

        // dy/dz2 = w3 ⊙ act'(z2); pull back through each layer in turn.
        let mut g2 = self.weights[2].column(0).to_owned();
        Zip::from(&mut g2).and(&z2).for_each(|g, &z| {
            *g *= self.activation.derivative(z);
        });
        let mut g1 = self.weights[1].dot(&g2);
        Zip::from(&mut g1).and(&z1).for_each(|g, &z| {
            *g *= self.activation.derivative(z);
        });
        let gx = self.weights[0].dot(&g1);
        Ok(gx
            .iter()
            .zip(self.input_std.iter())
            .map(|(&g, &s)| g / s)
            .collect())
    }
}

/// Train a model on the dataset's training split.
///
/// Standardization statistics come from the training split alone. The
/// entire procedure is a function of the dataset order and `cfg.seed`:
/// initialization, epoch shuffles, and dropout masks all come from one
/// seeded stream.
pub fn train(
    env: &Environment,
    dataset: &ClearanceDataset,
    cfg: &TrainConfig,
) -> Result<(ClearanceModel, LossHistory)> {
    cfg.validate()?;
    if dataset.env_name() != env.name() {
        return Err(Error::InvalidConstruction(format!(
            "dataset was collected in {:?}, not {:?}",
            dataset.env_name(),
            env.name()
        )));
    }
    if dataset.d_e() != env.d_e() {
        return Err(Error::DimensionMismatch {
            context: "dataset extended dimension",
            expected: env.d_e(),
            actual: dataset.d_e(),
        });
    }
    let train_split = dataset.train_split();
    if train_split.is_empty() {
        return Err(Error::InvalidConstruction(
            "training split is empty".into(),
        ));
    }

    let d_e = dataset.d_e();
    let n = train_split.len();
    let mut model =
        ClearanceModel::init(env.name(), d_e, cfg.hidden, cfg.activation, cfg.seed)?;
    // The init consumed the head of the seed stream; training draws
    // continue from an offset stream of the same seed.
    let mut rng = Rng::from_seed(crate::cspace::derive_seed(cfg.seed, &[1]));

    // Standardization from the training split; constant dimensions fall
    // back to unit scale.
    let mut mean = Array1::<f64>::zeros(d_e);
    for s in train_split {
        for (m, v) in mean.iter_mut().zip(s.cfg.flatten()) {
            *m += v;
        }
    }
    mean /= n as f64;
    let mut var = Array1::<f64>::zeros(d_e);
    for s in train_split {
        for (vv, (v, m)) in var.iter_mut().zip(s.cfg.flatten().iter().zip(&mean)) {
            let d = v - m;
            *vv += d * d;
        }
    }
    var /= n as f64;
    let std = var.mapv(|v| if v.sqrt() > MIN_STD { v.sqrt() } else { 1.0 });
    model.input_mean = mean;
    model.input_std = std;

    // Pre-standardized training matrix and label vector.
    let mut xs = Array2::<f64>::zeros((n, d_e));
    let mut ys = Array1::<f64>::zeros(n);
    for (i, s) in train_split.iter().enumerate() {
        for (j, v) in s.cfg.flatten().into_iter().enumerate() {
            xs[(i, j)] = (v - model.input_mean[j]) / model.input_std[j];
        }
        ys[i] = s.d;
    }

    let eval_batch = if dataset.eval_split().is_empty() {
        None
    } else {
        Some(DataBatch::from_configs(
            dataset.eval_split().iter().map(|s| &s.cfg),
        )?)
    };
    let eval_labels: Vec<f64> = dataset.eval_split().iter().map(|s| s.d).collect();

    let mut adam = Adam::new(cfg.lr, &model);
    let mut history = LossHistory::default();
    let mut order: Vec<usize> = (0..n).collect();
    let keep = 1.0 - cfg.dropout;

    for _epoch in 0..cfg.epochs {
        rng.shuffle(&mut order);
        let mut epoch_sq_err = 0.0;
        for mb in order.chunks(cfg.batch) {
            let m = mb.len();
            let xb = select_rows(&xs, mb);
            let yb = Array1::from_shape_fn(m, |i| ys[mb[i]]);

            // Forward with inverted dropout on both hidden activations.
            let mut z1 = xb.dot(&model.weights[0]);
            z1 += &model.biases[0];
            let mut a1 = z1.mapv(|v| model.activation.apply(v));
            let mask1 = dropout_mask(&mut rng, a1.dim(), keep);
            a1 *= &mask1;
            let mut z2 = a1.dot(&model.weights[1]);
            z2 += &model.biases[1];
            let mut a2 = z2.mapv(|v| model.activation.apply(v));
            let mask2 = dropout_mask(&mut rng, a2.dim(), keep);
            a2 *= &mask2;
            let pred = a2.dot(&model.weights[2].column(0)) + model.biases[2][0];

            let diff = &pred - &yb;
            epoch_sq_err += diff.mapv(|e| e * e).sum();

            // Backward pass.
            let dpred = diff.mapv(|e| 2.0 * e / m as f64);
            let gw3 = a2
                .t()
                .dot(&dpred)
                .insert_axis(Axis(1));
            let gb3 = Array1::from_elem(1, dpred.sum());
            let mut dz2 = dpred
                .insert_axis(Axis(1))
                .dot(&model.weights[2].t());
            dz2 *= &mask2;
            Zip::from(&mut dz2).and(&z2).for_each(|d, &z| {
                *d *= model.activation.derivative(z);
            });
            let gw2 = a1.t().dot(&dz2);
            let gb2 = dz2.sum_axis(Axis(0));
            let mut dz1 = dz2.dot(&model.weights[1].t());
            dz1 *= &mask1;
            Zip::from(&mut dz1).and(&z1).for_each(|d, &z| {
                *d *= model.activation.derivative(z);
            });
            let gw1 = xb.t().dot(&dz1);
            let gb1 = dz1.sum_axis(Axis(0));

            adam.step(&mut model, [gw1, gw2, gw3], [gb1, gb2, gb3]);
        }
        history.train_mse.push(epoch_sq_err / n as f64);

        let eval_mse = match &eval_batch {
            Some(batch) => {
                let preds = model.forward_batch(batch)?;
                preds
                    .iter()
                    .zip(&eval_labels)
                    .map(|(p, y)| (p - y) * (p - y))
                    .sum::<f64>()
                    / preds.len() as f64
            }
            None => f64::NAN,
        };
        history.eval_mse.push(eval_mse);
    }

    model.train_config = Some(cfg.clone());
    model.final_train_mse = history.train_mse.last().copied();
    model.final_eval_mse = history.eval_mse.last().copied().filter(|v| !v.is_nan());
    Ok((model, history))
}

fn select_rows(xs: &Array2<f64>, indices: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros((indices.len(), xs.ncols()));
    for (r, &i) in indices.iter().enumerate() {
        out.row_mut(r).assign(&xs.row(i));
    }
    out
}

/// Elementwise inverted-dropout mask: `1/keep` with probability `keep`,
/// else zero. Drawn row-major for determinism.
fn dropout_mask(rng: &mut Rng, dim: (usize, usize), keep: f64) -> Array2<f64> {
    if keep >= 1.0 {
        return Array2::ones(dim);
    }
    Array2::from_shape_fn(dim, |_| {
        if rng.chance(keep) {
            1.0 / keep
        } else {
            0.0
        }
    })
}

struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: i32,
    mw: [Array2<f64>; 3],
    vw: [Array2<f64>; 3],
    mb: [Array1<f64>; 3],
    vb: [Array1<f64>; 3],
}

impl Adam {
    fn new(lr: f64, model: &ClearanceModel) -> Self {
        let zero2 = |l: usize| Array2::zeros(model.weights[l].dim());
        let zero1 = |l: usize| Array1::zeros(model.biases[l].dim());
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            mw: [zero2(0), zero2(1), zero2(2)],
            vw: [zero2(0), zero2(1), zero2(2)],
            mb: [zero1(0), zero1(1), zero1(2)],
            vb: [zero1(0), zero1(1), zero1(2)],
        }
    }

    fn step(&mut self, model: &mut ClearanceModel, gw: [Array2<f64>; 3], gb: [Array1<f64>; 3]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for l in 0..3 {
            update(
                &mut model.weights[l],
                &mut self.mw[l],
                &mut self.vw[l],
                &gw[l],
                self.lr,
                self.beta1,
                self.beta2,
                self.eps,
                c1,
                c2,
            );
            update_1d(
                &mut model.biases[l],
                &mut self.mb[l],
                &mut self.vb[l],
                &gb[l],
                self.lr,
                self.beta1,
                self.beta2,
                self.eps,
                c1,
                c2,
            );
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn update(
    p: &mut Array2<f64>,
    m: &mut Array2<f64>,
    v: &mut Array2<f64>,
    g: &Array2<f64>,
    lr: f64,
    b1: f64,
    b2: f64,
    eps: f64,
    c1: f64,
    c2: f64,
) {
    Zip::from(p).and(m).and(v).and(g).for_each(|p, m, v, &g| {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        let mh = *m / c1;
        let vh = *v / c2;
        *p -= lr * mh / (vh.sqrt() + eps);
    });
}

#[allow(clippy::too_many_arguments)]
fn update_1d(
    p: &mut Array1<f64>,
    m: &mut Array1<f64>,
    v: &mut Array1<f64>,
    g: &Array1<f64>,
    lr: f64,
    b1: f64,
    b2: f64,
    eps: f64,
    c1: f64,
    c2: f64,
) {
    Zip::from(p).and(m).and(v).and(g).for_each(|p, m, v, &g| {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        let mh = *m / c1;
        let vh = *v / c2;
        *p -= lr * mh / (vh.sqrt() + eps);
    });
}

#[derive(Serialize, Deserialize)]
struct LayerFile {
    weight: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    version: u32,
    env_name: String,
    layer_sizes: Vec<usize>,
    activation: Activation,
    input_mean: Vec<f64>,
    input_std: Vec<f64>,
    layers: Vec<LayerFile>,
    train_config: Option<TrainConfig>,
    final_train_mse: Option<f64>,
    final_eval_mse: Option<f64>,
}

/// Write a model checkpoint as JSON. Doubles are printed in shortest
/// round-trip decimal form, so loading reproduces them bit-exactly.
pub fn save_model(path: impl AsRef<Path>, model: &ClearanceModel) -> Result<()> {
    let file = CheckpointFile {
        version: CHECKPOINT_VERSION,
        env_name: model.env_name.clone(),
        layer_sizes: model.layer_sizes.to_vec(),
        activation: model.activation,
        input_mean: model.input_mean.to_vec(),
        input_std: model.input_std.to_vec(),
        layers: model
            .weights
            .iter()
            .zip(&model.biases)
            .map(|(w, b)| LayerFile {
                weight: w.outer_iter().map(|row| row.to_vec()).collect(),
                bias: b.to_vec(),
            })
            .collect(),
        train_config: model.train_config.clone(),
        final_train_mse: model.final_train_mse,
        final_eval_mse: model.final_eval_mse,
    };
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Load a checkpoint written by [`save_model`], validating version and
/// every array shape.
pub fn load_model(path: impl AsRef<Path>) -> Result<ClearanceModel> {
    let text = std::fs::read_to_string(path)?;
    let file: CheckpointFile = serde_json::from_str(&text)?;
    if file.version != CHECKPOINT_VERSION {
        return Err(Error::UnsupportedVersion {
            what: "checkpoint",
            found: file.version,
            expected: CHECKPOINT_VERSION,
        });
    }
    if file.layer_sizes.len() != 4 || file.layer_sizes[3] != 1 {
        return Err(Error::InvalidConstruction(format!(
            "checkpoint layer sizes {:?} are not (d_e, h, h, 1)",
            file.layer_sizes
        )));
    }
    let sizes = [
        file.layer_sizes[0],
        file.layer_sizes[1],
        file.layer_sizes[2],
        file.layer_sizes[3],
    ];
    if sizes[1] != sizes[2] {
        return Err(Error::InvalidConstruction(format!(
            "checkpoint hidden sizes {} and {} differ",
            sizes[1], sizes[2]
        )));
    }
    if file.input_mean.len() != sizes[0] || file.input_std.len() != sizes[0] {
        return Err(Error::InvalidConstruction(
            "checkpoint standardization length does not match input size".into(),
        ));
    }
    if file.input_std.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::InvalidConstruction(
            "checkpoint input_std entries must be positive and finite".into(),
        ));
    }
    if file.layers.len() != 3 {
        return Err(Error::InvalidConstruction(format!(
            "checkpoint has {} layers, expected 3",
            file.layers.len()
        )));
    }
    let mut weights = Vec::with_capacity(3);
    let mut biases = Vec::with_capacity(3);
    for (l, layer) in file.layers.into_iter().enumerate() {
        let (fan_in, fan_out) = (sizes[l], sizes[l + 1]);
        if layer.weight.len() != fan_in
            || layer.weight.iter().any(|row| row.len() != fan_out)
        {
            return Err(Error::InvalidConstruction(format!(
                "checkpoint layer {l} weight shape is not {fan_in}x{fan_out}"
            )));
        }
        if layer.bias.len() != fan_out {
            return Err(Error::InvalidConstruction(format!(
                "checkpoint layer {l} bias length is not {fan_out}"
            )));
        }
        let flat: Vec<f64> = layer.weight.into_iter().flatten().collect();
        weights.push(
            Array2::from_shape_vec((fan_in, fan_out), flat).expect("shape checked above"),
        );
        biases.push(Array1::from_vec(layer.bias));
    }
    Ok(ClearanceModel {
        env_name: file.env_name,
        layer_sizes: sizes,
        activation: file.activation,
        input_mean: Array1::from_vec(file.input_mean),
        input_std: Array1::from_vec(file.input_std),
        weights: weights.try_into().expect("three layers"),
        biases: biases.try_into().expect("three layers"),
        train_config: file.train_config,
        final_train_mse: file.final_train_mse,
        final_eval_mse: file.final_eval_mse,
    })
}
