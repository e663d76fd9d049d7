use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::net::{Network, Pass};
use super::optim::Adam;
use super::spec::NetSpec;
use crate::dataset::Sample;
use crate::seed::{self, stage};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub max_epochs: usize,
    pub batch_size: usize,
    pub initial_lr: f64,
    pub lr_drop_factor: f64,
    pub lr_drop_period_epochs: usize,
    pub l2: f64,
    pub validation_frequency_iters: usize,
    /// Validation checks without improvement before stopping.
    pub early_stop_patience: usize,
    /// Drives shuffling and dropout.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_epochs: 30,
            batch_size: 64,
            initial_lr: 1e-4,
            lr_drop_factor: 0.1,
            lr_drop_period_epochs: 5,
            l2: 1e-4,
            validation_frequency_iters: 30,
            early_stop_patience: 5,
            seed: 0x5EED_2016,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("max_epochs", self.max_epochs),
            ("batch_size", self.batch_size),
            ("lr_drop_period_epochs", self.lr_drop_period_epochs),
            (
                "validation_frequency_iters",
                self.validation_frequency_iters,
            ),
            ("early_stop_patience", self.early_stop_patience),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::param(format!("{name} must be ≥ 1")));
            }
        }
        let rates = [
            ("initial_lr", self.initial_lr),
            ("lr_drop_factor", self.lr_drop_factor),
        ];
        for (name, v) in rates {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(Error::param(format!("l2 must be ≥ 0, got {}", self.l2)));
        }
        Ok(())
    }

    /// Learning rate for 1-based `epoch`: step decay every
    /// `lr_drop_period_epochs` epochs.
    pub fn lr_at_epoch(&self, epoch: usize) -> f64 {
        let drops = epoch.saturating_sub(1) / self.lr_drop_period_epochs.max(1);
        self.initial_lr * self.lr_drop_factor.powi(drops as i32)
    }
}

/// Patience counter over validation losses.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    best: Option<f64>,
    stale: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        EarlyStopping {
            patience,
            best: None,
            stale: 0,
        }
    }

    /// Records one check. Returns `(improved, stop)`.
    pub fn observe(&mut self, loss: f64) -> (bool, bool) {
        let improved = self.best.is_none_or(|b| loss < b);
        if improved {
            self.best = Some(loss);
            self.stale = 0;
        } else {
            self.stale += 1;
        }
        (improved, self.stale >= self.patience)
    }

    pub fn best(&self) -> Option<f64> {
        self.best
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub iteration: usize,
    pub epoch: usize,
    pub lr: f64,
    /// Mean objective over the iterations since the previous check.
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    MaxEpochs,
    EarlyStopping,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub rows: Vec<HistoryRow>,
    pub best_iteration: usize,
    pub best_val_loss: f64,
    pub iterations: usize,
    pub stop: StopReason,
}

impl History {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iteration,epoch,lr,train_loss,val_loss,val_accuracy\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{:e},{:.6},{:.6},{:.4}\n",
                r.iteration, r.epoch, r.lr, r.train_loss, r.val_loss, r.val_accuracy
            ));
        }
        s
    }
}

fn split(samples: &[Sample]) -> (Vec<&[f64]>, Vec<usize>) {
    samples
        .iter()
        .map(|s| (s.pixels.as_slice(), s.label))
        .unzip()
}

pub fn train(
    spec: &NetSpec,
    cfg: &TrainConfig,
    train_set: &[Sample],
    val_set: &[Sample],
) -> Result<(Network, History)> {
    train_with(spec, cfg, train_set, val_set, |_| {})
}

/// Like [`train`], calling `on_check` after every validation check.
pub fn train_with(
    spec: &NetSpec,
    cfg: &TrainConfig,
    train_set: &[Sample],
    val_set: &[Sample],
    mut on_check: impl FnMut(&HistoryRow),
) -> Result<(Network, History)> {
    cfg.validate()?;
    if train_set.is_empty() {
        return Err(Error::EmptyInput("training set"));
    }
    if val_set.is_empty() {
        return Err(Error::EmptyInput("validation set"));
    }
    let mut net = Network::new(spec.clone())?;
    let (val_x, val_y) = split(val_set);
    // fail on bad shapes or labels before spending any compute
    net.loss_and_accuracy(&val_x[..1], &val_y[..1])?;

    let mut adam = Adam::new(net.params());
    let mut stopper = EarlyStopping::new(cfg.early_stop_patience);
    let mut best = net.clone();
    let mut rows = Vec::new();
    let mut best_iteration = 0;
    let mut iteration = 0;
    let mut pending = (0.0, 0usize);
    let mut stop = StopReason::MaxEpochs;
    let mut order: Vec<usize> = (0..train_set.len()).collect();

    let mut check = |net: &Network,
                     iteration: usize,
                     epoch: usize,
                     pending: &mut (f64, usize)|
     -> Result<bool> {
        let (val_loss, val_accuracy) = net.loss_and_accuracy(&val_x, &val_y)?;
        if !val_loss.is_finite() {
            return Err(Error::Diverged {
                iteration,
                loss: val_loss,
            });
        }
        let row = HistoryRow {
            iteration,
            epoch,
            lr: cfg.lr_at_epoch(epoch),
            train_loss: pending.0 / pending.1.max(1) as f64,
            val_loss,
            val_accuracy,
        };
        *pending = (0.0, 0);
        on_check(&row);
        rows.push(row);
        let (improved, halt) = stopper.observe(val_loss);
        if improved {
            best = net.clone();
            best_iteration = iteration;
        }
        Ok(halt)
    };

    'epochs: for epoch in 1..=cfg.max_epochs {
        let lr = cfg.lr_at_epoch(epoch);
        order.shuffle(&mut seed::rng(seed::derive(
            cfg.seed,
            &[stage::SHUFFLE, epoch as u64],
        )));
        for idx in order.chunks(cfg.batch_size) {
            iteration += 1;
            let xs: Vec<&[f64]> = idx
                .iter()
                .map(|&i| train_set[i].pixels.as_slice())
                .collect();
            let ys: Vec<usize> = idx.iter().map(|&i| train_set[i].label).collect();
            let pass = Pass::Training {
                dropout_seed: seed::derive(cfg.seed, &[stage::DROPOUT, iteration as u64]),
            };
            let (loss, grads) = net.loss_and_grads(&xs, &ys, cfg.l2, pass)?;
            if !loss.is_finite() || grads.iter().flatten().any(|g| !g.is_finite()) {
                return Err(Error::Diverged { iteration, loss });
            }
            adam.step(net.params_mut(), &grads, lr);
            pending.0 += loss;
            pending.1 += 1;
            if iteration % cfg.validation_frequency_iters == 0
                && check(&net, iteration, epoch, &mut pending)?
            {
                stop = StopReason::EarlyStopping;
                break 'epochs;
            }
        }
    }
    if iteration % cfg.validation_frequency_iters != 0 {
        let epoch = cfg.max_epochs;
        check(&net, iteration, epoch, &mut pending)?;
    }
    let history = History {
        best_val_loss: stopper.best().unwrap_or(f64::INFINITY),
        rows,
        best_iteration,
        iterations: iteration,
        stop,
    };
    Ok((best, history))
}
