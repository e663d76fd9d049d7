use std::collections::BTreeMap;

use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use super::net::{argmax, Network};
use crate::dataset::Sample;
use crate::stft::colormap;
use crate::{Error, Result};

/// Rows are true classes, columns predictions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(classes: Vec<String>) -> Self {
        let k = classes.len();
        ConfusionMatrix {
            classes,
            counts: vec![vec![0; k]; k],
        }
    }

    pub fn from_predictions(
        classes: Vec<String>,
        truth: &[usize],
        predicted: &[usize],
    ) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::Length(format!(
                "{} labels but {} predictions",
                truth.len(),
                predicted.len()
            )));
        }
        let mut cm = ConfusionMatrix::new(classes);
        for (&t, &p) in truth.iter().zip(predicted) {
            cm.record(t, p)?;
        }
        Ok(cm)
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn record(&mut self, truth: usize, predicted: usize) -> Result<()> {
        let k = self.num_classes();
        if truth >= k || predicted >= k {
            return Err(Error::param(format!(
                "class index ({truth}, {predicted}) out of range for {k} classes"
            )));
        }
        self.counts[truth][predicted] += 1;
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.num_classes()).map(|i| self.counts[i][i]).sum()
    }

    /// `None` when the matrix is empty.
    pub fn accuracy(&self) -> Option<f64> {
        let total = self.total();
        (total > 0).then(|| self.trace() as f64 / total as f64)
    }

    pub fn class_accuracy(&self, class: usize) -> Option<f64> {
        let row: u64 = self.counts[class].iter().sum();
        (row > 0).then(|| self.counts[class][class] as f64 / row as f64)
    }

    /// Relabels class `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let k = self.num_classes();
        let mut seen = vec![false; k];
        if perm.len() != k
            || perm
                .iter()
                .any(|&p| p >= k || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::param("not a permutation of the class indices"));
        }
        let mut classes = vec![String::new(); k];
        let mut counts = vec![vec![0; k]; k];
        for i in 0..k {
            classes[perm[i]] = self.classes[i].clone();
            for j in 0..k {
                counts[perm[i]][perm[j]] = self.counts[i][j];
            }
        }
        Ok(ConfusionMatrix { classes, counts })
    }

    /// Header row plus one row per true class.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("true\\predicted");
        for c in &self.classes {
            s.push(',');
            s.push_str(c);
        }
        s.push('\n');
        for (name, row) in self.classes.iter().zip(&self.counts) {
            s.push_str(name);
            for v in row {
                s.push_str(&format!(",{v}"));
            }
            s.push('\n');
        }
        s
    }

    /// Row-normalized heatmap, one `cell`×`cell` square per entry, true
    /// classes down the side.
    pub fn heatmap(&self, cell: u32) -> RgbImage {
        let k = self.num_classes() as u32;
        let cell = cell.max(1);
        let mut img = RgbImage::from_pixel(k * cell, k * cell, Rgb([255, 255, 255]));
        for i in 0..k as usize {
            let row: u64 = self.counts[i].iter().sum();
            for j in 0..k as usize {
                let frac = if row == 0 {
                    0.0
                } else {
                    self.counts[i][j] as f64 / row as f64
                };
                let color = colormap((frac * 255.0).round() as u8);
                for y in 0..cell {
                    for x in 0..cell {
                        // 1-px grid lines
                        let px = if x == cell - 1 || y == cell - 1 {
                            Rgb([255, 255, 255])
                        } else {
                            color
                        };
                        img.put_pixel(j as u32 * cell + x, i as u32 * cell + y, px);
                    }
                }
            }
        }
        img
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAccuracy {
    pub group: String,
    pub correct: u64,
    pub total: u64,
}

impl GroupAccuracy {
    pub fn accuracy(&self) -> Option<f64> {
        (self.total > 0).then(|| self.correct as f64 / self.total as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub confusion: ConfusionMatrix,
    pub overall: f64,
    pub per_class: Vec<GroupAccuracy>,
    /// Ascending SNR.
    pub per_snr: Vec<(i32, GroupAccuracy)>,
}

/// Confusable pairs and headline accuracies of the large pretrained
/// networks the small net stands in for. Printed for context only.
const REFERENCE_NOTES: &str = "\
Reference notes (context, not asserted):
  confusable pairs: QAM16 <-> QAM64 (near-identical spectra under noise),
                    AM-DSB <-> AM-SSB
  pretrained large-CNN results on this task:
    best model, 11 classes: 91.1% (also quoted as 91.2%)
    weakest model, 11 classes: 77.2%
    10 classes without QAM64: 96%
";

impl EvalReport {
    pub fn per_class_csv(&self) -> String {
        group_csv("class", self.per_class.iter())
    }

    pub fn per_snr_csv(&self) -> String {
        group_csv("snr_db", self.per_snr.iter().map(|(_, g)| g))
    }

    pub fn to_text(&self) -> String {
        let fmt =
            |a: Option<f64>| a.map_or_else(|| "    n/a".into(), |v| format!("{:6.2}%", 100.0 * v));
        let mut s = format!(
            "overall accuracy: {} ({} / {})\n\nper class:\n",
            fmt(Some(self.overall)),
            self.confusion.trace(),
            self.confusion.total()
        );
        for g in &self.per_class {
            s.push_str(&format!(
                "  {:<8} {}  ({}/{})\n",
                g.group,
                fmt(g.accuracy()),
                g.correct,
                g.total
            ));
        }
        s.push_str("\nper SNR:\n");
        for (_, g) in &self.per_snr {
            s.push_str(&format!(
                "  {:>4} dB {}  ({}/{})\n",
                g.group,
                fmt(g.accuracy()),
                g.correct,
                g.total
            ));
        }
        s.push_str("\nconfusion matrix (rows true, columns predicted):\n");
        s.push_str(&self.confusion.to_csv());
        s.push('\n');
        s.push_str(REFERENCE_NOTES);
        s
    }
}

fn group_csv<'a>(key: &str, groups: impl Iterator<Item = &'a GroupAccuracy>) -> String {
    let mut s = format!("{key},correct,total,accuracy\n");
    for g in groups {
        let acc = g.accuracy().map_or(String::new(), |a| format!("{a:.6}"));
        s.push_str(&format!("{},{},{},{}\n", g.group, g.correct, g.total, acc));
    }
    s
}

/// Argmax predictions for `samples`.
pub fn predict(net: &Network, samples: &[Sample]) -> Result<Vec<usize>> {
    let xs: Vec<&[f64]> = samples.iter().map(|s| s.pixels.as_slice()).collect();
    Ok(net.forward(&xs)?.iter().map(|p| argmax(p)).collect())
}

pub fn evaluate(net: &Network, test_set: &[Sample], classes: &[String]) -> Result<EvalReport> {
    if test_set.is_empty() {
        return Err(Error::EmptyInput("test set"));
    }
    if classes.len() != net.num_classes() {
        return Err(Error::Shape(format!(
            "{} class names for a {}-way net",
            classes.len(),
            net.num_classes()
        )));
    }
    let pred = predict(net, test_set)?;
    report_from_predictions(test_set, &pred, classes)
}

/// Builds the report from precomputed predictions, e.g. pooled over folds.
pub fn report_from_predictions(
    test_set: &[Sample],
    pred: &[usize],
    classes: &[String],
) -> Result<EvalReport> {
    if test_set.is_empty() {
        return Err(Error::EmptyInput("test set"));
    }
    let truth: Vec<usize> = test_set.iter().map(|s| s.label).collect();
    let confusion = ConfusionMatrix::from_predictions(classes.to_vec(), &truth, pred)?;
    let per_class = (0..classes.len())
        .map(|c| GroupAccuracy {
            group: classes[c].clone(),
            correct: confusion.counts[c][c],
            total: confusion.counts[c].iter().sum(),
        })
        .collect();
    let mut by_snr: BTreeMap<i32, (u64, u64)> = BTreeMap::new();
    for (s, &p) in test_set.iter().zip(pred) {
        let e = by_snr.entry(s.snr_db).or_default();
        e.0 += (p == s.label) as u64;
        e.1 += 1;
    }
    let per_snr = by_snr
        .into_iter()
        .map(|(snr, (correct, total))| {
            (
                snr,
                GroupAccuracy {
                    group: snr.to_string(),
                    correct,
                    total,
                },
            )
        })
        .collect();
    Ok(EvalReport {
        overall: confusion.accuracy().unwrap_or(0.0),
        confusion,
        per_class,
        per_snr,
    })
}
