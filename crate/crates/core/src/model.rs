//! CNN layer chain with tensor shapes and sliding-window parameters.
//!
//! A [`NetworkModel`] is an ordered chain of layers. Every layer consumes the
//! previous layer's output tensor; shapes are always derived by
//! [`infer_shapes`] and never trusted from input documents.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::document;
use crate::error::{layer_err, parse_err, Error, Result};

/// Tensor dimensions in `[height, width, channels]` layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TensorShape {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

impl TensorShape {
    pub fn new(height: usize, width: usize, channels: usize) -> Self {
        Self { height, width, channels }
    }

    pub fn element_count(&self) -> u64 {
        self.height as u64 * self.width as u64 * self.channels as u64
    }

    /// Elements in one row along the height axis (`width × channels`).
    pub fn row_elements(&self) -> u64 {
        self.width as u64 * self.channels as u64
    }

    fn is_valid(&self) -> bool {
        self.height >= 1 && self.width >= 1 && self.channels >= 1
    }
}

impl fmt::Display for TensorShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.height, self.width, self.channels)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    Input,
    Convolution,
    Pooling,
    Activation,
    FullyConnected,
    Softmax,
}

impl LayerKind {
    /// Kinds that carry trainable neurons (`neurons = output channels`).
    pub fn is_weighted(self) -> bool {
        matches!(self, LayerKind::Convolution | LayerKind::FullyConnected)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSpec {
    /// 1-based position in the chain.
    pub id: usize,
    pub kind: LayerKind,
    pub window_h: usize,
    pub window_w: usize,
    pub stride: usize,
    pub padding: usize,
    /// Zero for weightless kinds.
    pub neurons: usize,
    pub in_shape: TensorShape,
    pub out_shape: TensorShape,
}

impl LayerSpec {
    /// Builds a layer with placeholder shapes; run [`infer_shapes`] afterwards.
    pub fn new(id: usize, kind: LayerKind, window: (usize, usize), stride: usize, padding: usize, neurons: usize) -> Self {
        let unset = TensorShape::new(0, 0, 0);
        Self {
            id,
            kind,
            window_h: window.0,
            window_w: window.1,
            stride,
            padding,
            neurons,
            in_shape: unset,
            out_shape: unset,
        }
    }

    /// Volume of one window application: `H × W` taps, times input channels
    /// for weighted kinds.
    pub fn window_volume(&self) -> u64 {
        let taps = self.window_h as u64 * self.window_w as u64;
        if self.kind.is_weighted() {
            taps * self.in_shape.channels as u64
        } else {
            taps
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkModel {
    pub name: String,
    pub input_shape: TensorShape,
    pub layers: Vec<LayerSpec>,
}

impl NetworkModel {
    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn layer(&self, id: usize) -> &LayerSpec {
        &self.layers[id - 1]
    }

    pub fn to_document(&self) -> Result<String> {
        let header = ModelHeader {
            name: self.name.clone(),
            input_height: self.input_shape.height,
            input_width: self.input_shape.width,
            input_channels: self.input_shape.channels,
        };
        let records: Vec<LayerRecord> = self.layers.iter().map(LayerRecord::from).collect();
        document::write(&header, &records)
    }
}

/// Output extent along one axis, or `None` when the window does not fit.
pub fn output_extent(input: usize, window: usize, stride: usize, padding: usize) -> Option<usize> {
    let padded = input + 2 * padding;
    if window == 0 || stride == 0 || window > padded {
        return None;
    }
    Some((padded - window) / stride + 1)
}

/// Populates every layer's input and output shape from `model.input_shape`
/// and validates the chain. Idempotent on already-inferred models.
pub fn infer_shapes(mut model: NetworkModel) -> Result<NetworkModel> {
    if !model.input_shape.is_valid() {
        return Err(Error::Validation(format!("input shape {} has a zero dimension", model.input_shape)));
    }
    if model.layers.is_empty() {
        return Err(Error::Validation("model has no layers".into()));
    }

    let mut current = model.input_shape;
    for (idx, layer) in model.layers.iter_mut().enumerate() {
        let id = idx + 1;
        if layer.id != id {
            return Err(layer_err(layer.id, format!("expected id {id}; ids must be 1..L in order")));
        }
        if layer.stride == 0 {
            return Err(layer_err(id, "stride must be at least 1"));
        }
        if layer.window_h == 0 || layer.window_w == 0 {
            return Err(layer_err(id, "window must be at least 1x1"));
        }
        if layer.kind.is_weighted() && layer.neurons == 0 {
            return Err(layer_err(id, format!("{:?} layer needs at least one neuron", layer.kind)));
        }
        if !layer.kind.is_weighted() && layer.neurons != 0 {
            return Err(layer_err(id, format!("{:?} layer must have neurons = 0", layer.kind)));
        }
        if layer.kind == LayerKind::Input && id != 1 {
            return Err(layer_err(id, "input layer must be the first layer"));
        }

        layer.in_shape = current;
        layer.out_shape = if layer.kind == LayerKind::Input {
            current
        } else {
            let too_big = || {
                layer_err(
                    id,
                    format!(
                        "window {}x{} (padding {}) larger than input {}",
                        layer.window_h, layer.window_w, layer.padding, current
                    ),
                )
            };
            let h = output_extent(current.height, layer.window_h, layer.stride, layer.padding).ok_or_else(too_big)?;
            let w = output_extent(current.width, layer.window_w, layer.stride, layer.padding).ok_or_else(too_big)?;
            let c = if layer.kind.is_weighted() { layer.neurons } else { current.channels };
            TensorShape::new(h, w, c)
        };
        if layer.kind == LayerKind::FullyConnected && (layer.out_shape.height != 1 || layer.out_shape.width != 1) {
            return Err(layer_err(
                id,
                format!("fully connected window must cover the whole {current} input"),
            ));
        }
        current = layer.out_shape;
    }
    Ok(model)
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelHeader {
    name: String,
    input_height: usize,
    input_width: usize,
    input_channels: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerRecord {
    id: usize,
    kind: LayerKind,
    window_h: usize,
    window_w: usize,
    stride: usize,
    padding: usize,
    neurons: usize,
}

impl From<&LayerSpec> for LayerRecord {
    fn from(l: &LayerSpec) -> Self {
        Self {
            id: l.id,
            kind: l.kind,
            window_h: l.window_h,
            window_w: l.window_w,
            stride: l.stride,
            padding: l.padding,
            neurons: l.neurons,
        }
    }
}

/// Parses a model document and infers every layer shape.
pub fn parse_model(text: &str) -> Result<NetworkModel> {
    let doc = document::read::<ModelHeader, LayerRecord>(text)?;
    let mut layers = Vec::with_capacity(doc.records.len());
    for (line, r) in doc.records {
        if r.id != layers.len() + 1 {
            return Err(parse_err(line, format!("layer id {} out of order; expected {}", r.id, layers.len() + 1)));
        }
        layers.push(LayerSpec::new(r.id, r.kind, (r.window_h, r.window_w), r.stride, r.padding, r.neurons));
    }
    let h = doc.header;
    infer_shapes(NetworkModel {
        name: h.name,
        input_shape: TensorShape::new(h.input_height, h.input_width, h.input_channels),
        layers,
    })
}
