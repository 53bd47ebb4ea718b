use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::NUM_CLASSES;

/// One layer of the classifier. Convolutions are 3x3, stride 1, zero padding 1;
/// pooling is 2x2 with stride 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LayerSpec {
    Conv2d { in_channels: usize, out_channels: usize },
    Relu,
    MaxPool,
    GlobalAvgPool,
    Dense { inputs: usize, outputs: usize },
}

impl LayerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LayerSpec::Conv2d { .. } => "conv2d",
            LayerSpec::Relu => "relu",
            LayerSpec::MaxPool => "max_pool",
            LayerSpec::GlobalAvgPool => "global_avg_pool",
            LayerSpec::Dense { .. } => "dense",
        }
    }

    /// Shapes of this layer's parameter tensors (weight, bias), if any.
    pub fn param_shapes(&self) -> Vec<Vec<usize>> {
        match *self {
            LayerSpec::Conv2d {
                in_channels,
                out_channels,
            } => vec![vec![out_channels, in_channels, 3, 3], vec![out_channels]],
            LayerSpec::Dense { inputs, outputs } => vec![vec![outputs, inputs], vec![outputs]],
            _ => Vec::new(),
        }
    }

    pub fn fan_in(&self) -> usize {
        match *self {
            LayerSpec::Conv2d { in_channels, .. } => in_channels * 9,
            LayerSpec::Dense { inputs, .. } => inputs,
            _ => 0,
        }
    }
}

/// Activation shape between layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActShape {
    Spatial { channels: usize, height: usize, width: usize },
    Flat(usize),
}

impl ActShape {
    pub fn len(&self) -> usize {
        match *self {
            ActShape::Spatial {
                channels,
                height,
                width,
            } => channels * height * width,
            ActShape::Flat(n) => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub input_channels: usize,
    pub input_height: usize,
    pub input_width: usize,
    pub layers: Vec<LayerSpec>,
}

impl ModelSpec {
    /// Three conv/relu/pool stages (8, 16, 32 filters), global average pooling,
    /// and a dense head with one output per class.
    pub fn spray_net(channels: usize, height: usize, width: usize) -> Self {
        let mut layers = Vec::new();
        let mut c = channels;
        for out in [8, 16, 32] {
            layers.push(LayerSpec::Conv2d {
                in_channels: c,
                out_channels: out,
            });
            layers.push(LayerSpec::Relu);
            layers.push(LayerSpec::MaxPool);
            c = out;
        }
        layers.push(LayerSpec::GlobalAvgPool);
        layers.push(LayerSpec::Dense {
            inputs: c,
            outputs: NUM_CLASSES,
        });
        ModelSpec {
            input_channels: channels,
            input_height: height,
            input_width: width,
            layers,
        }
    }

    pub fn input_shape(&self) -> ActShape {
        ActShape::Spatial {
            channels: self.input_channels,
            height: self.input_height,
            width: self.input_width,
        }
    }

    /// Activation shapes entering each layer, followed by the output shape.
    /// Fails with the index of the first layer that does not compose.
    pub fn activation_shapes(&self) -> Result<Vec<ActShape>> {
        let mut shapes = vec![self.input_shape()];
        let mut cur = self.input_shape();
        for (i, layer) in self.layers.iter().enumerate() {
            let err = |detail: String| Error::LayerShape { layer: i, detail };
            cur = match (*layer, cur) {
                (
                    LayerSpec::Conv2d {
                        in_channels,
                        out_channels,
                    },
                    ActShape::Spatial {
                        channels,
                        height,
                        width,
                    },
                ) => {
                    if in_channels != channels {
                        return Err(err(format!(
                            "conv2d expects {in_channels} input channels, got {channels}"
                        )));
                    }
                    if out_channels == 0 {
                        return Err(err("conv2d with zero output channels".into()));
                    }
                    ActShape::Spatial {
                        channels: out_channels,
                        height,
                        width,
                    }
                }
                (LayerSpec::Relu, s) => s,
                (
                    LayerSpec::MaxPool,
                    ActShape::Spatial {
                        channels,
                        height,
                        width,
                    },
                ) => {
                    if height < 2 || width < 2 {
                        return Err(err(format!("cannot pool a {height}x{width} map")));
                    }
                    ActShape::Spatial {
                        channels,
                        height: height / 2,
                        width: width / 2,
                    }
                }
                (LayerSpec::GlobalAvgPool, ActShape::Spatial { channels, .. }) => {
                    ActShape::Flat(channels)
                }
                (LayerSpec::Dense { inputs, outputs }, ActShape::Flat(n)) => {
                    if inputs != n {
                        return Err(err(format!("dense expects {inputs} inputs, got {n}")));
                    }
                    ActShape::Flat(outputs)
                }
                (l, s) => {
                    return Err(err(format!("{} cannot follow activation {s:?}", l.name())));
                }
            };
            shapes.push(cur);
        }
        Ok(shapes)
    }

    pub fn validate(&self) -> Result<()> {
        let shapes = self.activation_shapes()?;
        match (self.layers.last(), shapes.last()) {
            (Some(LayerSpec::Dense { .. }), Some(ActShape::Flat(NUM_CLASSES))) => Ok(()),
            _ => Err(Error::LayerShape {
                layer: self.layers.len().saturating_sub(1),
                detail: format!("model must end in a dense layer with {NUM_CLASSES} outputs"),
            }),
        }
    }

    /// Parameter tensor shapes in declaration order.
    pub fn param_shapes(&self) -> Vec<Vec<usize>> {
        self.layers.iter().flat_map(|l| l.param_shapes()).collect()
    }

    pub fn num_parameters(&self) -> usize {
        self.param_shapes()
            .iter()
            .map(|s| s.iter().product::<usize>())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spray_net_composes() {
        let spec = ModelSpec::spray_net(3, 64, 64);
        spec.validate().unwrap();
        let shapes = spec.activation_shapes().unwrap();
        assert_eq!(*shapes.last().unwrap(), ActShape::Flat(4));
        assert_eq!(spec.num_parameters(), 8 * 27 + 8 + 16 * 72 + 16 + 32 * 144 + 32 + 32 * 4 + 4);
    }

    #[test]
    fn mismatch_reports_layer_index() {
        let mut spec = ModelSpec::spray_net(3, 8, 8);
        spec.layers[3] = LayerSpec::Conv2d {
            in_channels: 5,
            out_channels: 16,
        };
        match spec.validate() {
            Err(Error::LayerShape { layer, .. }) => assert_eq!(layer, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn head_must_have_four_outputs() {
        let mut spec = ModelSpec::spray_net(1, 8, 8);
        spec.layers[10] = LayerSpec::Dense {
            inputs: 32,
            outputs: 3,
        };
        assert!(matches!(spec.validate(), Err(Error::LayerShape { layer: 10, .. })));
    }
}
