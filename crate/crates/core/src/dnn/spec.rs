use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Activation volume, channel-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
}

impl Shape {
    pub fn new(channels: usize, height: usize, width: usize) -> Self {
        Shape {
            channels,
            height,
            width,
        }
    }

    pub fn len(&self) -> usize {
        self.channels * self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LayerSpec {
    /// "Same" padding of `kernel / 2` on every side.
    Conv {
        kernel: usize,
        out_channels: usize,
        #[serde(default = "one")]
        stride: usize,
    },
    Relu,
    MaxPool {
        kernel: usize,
        stride: usize,
    },
    Dense {
        units: usize,
    },
    /// Inverted dropout; identity at inference.
    Dropout {
        rate: f64,
    },
    Softmax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetSpec {
    /// Input as `(channels, height, width)`.
    pub input: Shape,
    pub layers: Vec<LayerSpec>,
    pub init_seed: u64,
}

impl NetSpec {
    /// Three conv/relu/pool stages (16, 32, 64 filters), a 128-unit hidden
    /// layer and a softmax head.
    pub fn default_for(num_classes: usize, input: Shape, init_seed: u64) -> Self {
        use LayerSpec::*;
        let mut layers = Vec::new();
        for filters in [16, 32, 64] {
            layers.push(Conv {
                kernel: 3,
                out_channels: filters,
                stride: 1,
            });
            layers.push(Relu);
            layers.push(MaxPool {
                kernel: 2,
                stride: 2,
            });
        }
        layers.extend([
            Dense { units: 128 },
            Relu,
            Dense { units: num_classes },
            Softmax,
        ]);
        NetSpec {
            input,
            layers,
            init_seed,
        }
    }

    /// Output shape of every layer, in order. Fails on the first layer whose
    /// input does not fit, or when the net does not end in a softmax.
    pub fn shapes(&self) -> Result<Vec<Shape>> {
        if self.input.is_empty() {
            return Err(Error::Shape("input shape has a zero dimension".into()));
        }
        let mut cur = self.input;
        let mut out = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            let bad = |msg: String| Error::Shape(format!("layer {i} ({layer:?}): {msg}"));
            cur = match *layer {
                LayerSpec::Conv {
                    kernel,
                    out_channels,
                    stride,
                } => {
                    if kernel == 0 || out_channels == 0 || stride == 0 {
                        return Err(bad("kernel, out_channels and stride must be ≥ 1".into()));
                    }
                    let pad = kernel / 2;
                    let fit = |n: usize| (n + 2 * pad).checked_sub(kernel).map(|d| d / stride + 1);
                    match (fit(cur.height), fit(cur.width)) {
                        (Some(h), Some(w)) => Shape::new(out_channels, h, w),
                        _ => return Err(bad(format!("kernel larger than padded input {cur:?}"))),
                    }
                }
                LayerSpec::MaxPool { kernel, stride } => {
                    if kernel == 0 || stride == 0 {
                        return Err(bad("kernel and stride must be ≥ 1".into()));
                    }
                    if kernel > cur.height || kernel > cur.width {
                        return Err(bad(format!("pool window larger than input {cur:?}")));
                    }
                    Shape::new(
                        cur.channels,
                        (cur.height - kernel) / stride + 1,
                        (cur.width - kernel) / stride + 1,
                    )
                }
                LayerSpec::Dense { units } => {
                    if units == 0 {
                        return Err(bad("units must be ≥ 1".into()));
                    }
                    Shape::new(units, 1, 1)
                }
                LayerSpec::Dropout { rate } => {
                    if !(0.0..1.0).contains(&rate) {
                        return Err(bad(format!("rate {rate} outside [0, 1)")));
                    }
                    cur
                }
                LayerSpec::Relu => cur,
                LayerSpec::Softmax => {
                    if i + 1 != self.layers.len() {
                        return Err(bad("softmax must be the last layer".into()));
                    }
                    cur
                }
            };
            out.push(cur);
        }
        if self.layers.last() != Some(&LayerSpec::Softmax) {
            return Err(Error::Shape("net must end with a softmax layer".into()));
        }
        Ok(out)
    }

    /// Width of the softmax layer.
    pub fn num_classes(&self) -> Result<usize> {
        Ok(self.shapes()?.last().map(Shape::len).unwrap_or(0))
    }

    /// Shape check plus the class-count requirement.
    pub fn validate_for(&self, num_classes: usize) -> Result<()> {
        let k = self.num_classes()?;
        if k != num_classes {
            return Err(Error::Shape(format!(
                "final layer has {k} units but there are {num_classes} classes"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_net_shapes() {
        let spec = NetSpec::default_for(11, Shape::new(1, 64, 64), 0);
        let shapes = spec.shapes().unwrap();
        assert_eq!(shapes[0], Shape::new(16, 64, 64));
        assert_eq!(shapes[2], Shape::new(16, 32, 32));
        assert_eq!(shapes[8], Shape::new(64, 8, 8));
        assert_eq!(spec.num_classes().unwrap(), 11);
        assert!(spec.validate_for(11).is_ok());
        assert!(matches!(spec.validate_for(10), Err(Error::Shape(_))));
    }

    #[test]
    fn rejects_malformed_nets() {
        let input = Shape::new(1, 4, 4);
        let mut spec = NetSpec {
            input,
            layers: vec![
                LayerSpec::MaxPool {
                    kernel: 5,
                    stride: 1,
                },
                LayerSpec::Softmax,
            ],
            init_seed: 0,
        };
        assert!(matches!(spec.shapes(), Err(Error::Shape(_))));
        spec.layers = vec![LayerSpec::Dense { units: 3 }];
        assert!(matches!(spec.shapes(), Err(Error::Shape(_))));
        spec.layers = vec![LayerSpec::Softmax, LayerSpec::Dense { units: 3 }];
        assert!(matches!(spec.shapes(), Err(Error::Shape(_))));
    }

    #[test]
    fn serde_round_trip() {
        let spec = NetSpec::default_for(4, Shape::new(1, 32, 32), 9);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<NetSpec>(&text).unwrap(), spec);
    }
}
