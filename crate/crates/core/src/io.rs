//! JSON encodings for block codes and convolutional codes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::blockcode::{DistanceBound, LinearCode};
use crate::combinators::TransformRecord;
use crate::convolutional::{ConvCode, ConvParams, PolyMatrix};
use crate::galois::{Field, FieldSpec};
use crate::matrix::Matrix;
use crate::{Error, Guards, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// A distance the file asserts; verified by `code check`, never trusted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_d: Option<usize>,
    /// Distance interval established when the file was written.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<DistanceBound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformRecord>,
}

/// `{"field": {...}, "generator": [[...], ...], "meta": {...}}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeJson {
    pub field: FieldSpec,
    pub generator: Vec<Vec<u32>>,
    #[serde(default)]
    pub meta: CodeMeta,
}

impl CodeJson {
    pub fn from_code(code: &LinearCode) -> CodeJson {
        let d = code.distance();
        CodeJson {
            field: code.field().spec(),
            generator: code.generator().to_rows(),
            meta: CodeMeta {
                name: Some(code.name().to_string()),
                claimed_d: None,
                distance: (!code.is_zero()).then_some(d),
                transform: None,
            },
        }
    }

    pub fn to_code(&self) -> Result<LinearCode> {
        let field = Field::from_spec(&self.field)?;
        let n = self.generator.first().map_or(0, Vec::len);
        if self.generator.is_empty() || n == 0 {
            return Err(Error::InvalidArgument("generator matrix is empty".into()));
        }
        let m = Matrix::from_rows(&field, &self.generator)?;
        let mut code = LinearCode::from_generator(&m)?;
        if let Some(name) = &self.meta.name {
            code = code.with_name(name.clone());
        }
        if let Some(b) = self.meta.distance {
            code = code.with_distance_bound(b).map_err(|_| {
                Error::InvalidArgument(format!("recorded distance interval [{}, {}] is impossible", b.lo, b.hi))
            })?;
        }
        Ok(code)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    /// Generator-row order of the source block code.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_order: Option<Vec<usize>>,
}

/// `{"field": {...}, "coeffs": [A_0, A_1, ...], "params": {...}}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvJson {
    pub field: FieldSpec,
    pub coeffs: Vec<Vec<Vec<u32>>>,
    pub params: ConvParams,
    #[serde(default)]
    pub meta: ConvMeta,
}

impl ConvJson {
    pub fn from_conv(conv: &ConvCode) -> ConvJson {
        let g = conv.generator();
        ConvJson {
            field: g.field().spec(),
            coeffs: g.coeffs().iter().map(Matrix::to_rows).collect(),
            params: conv.params().clone(),
            meta: ConvMeta { source: conv.source.clone(), row_order: conv.row_order.clone() },
        }
    }

    /// Rebuilds and re-certifies the generator; structural parameters must
    /// match the recomputed ones.
    pub fn to_conv(&self, guards: &Guards) -> Result<ConvCode> {
        let field = Field::from_spec(&self.field)?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| Matrix::from_rows(&field, a))
            .collect::<Result<Vec<_>>>()?;
        let g = PolyMatrix::new(coeffs)?;
        let mut conv = ConvCode::new(g, guards)?;
        let (p, q) = (conv.params().clone(), &self.params);
        if (p.n, p.k, p.gamma, p.memory, p.s, p.r) != (q.n, q.k, q.gamma, q.memory, q.s, q.r) {
            return Err(Error::InvalidArgument(format!(
                "recorded parameters {q:?} do not match the generator ({p:?})"
            )));
        }
        if let Some(lb) = q.df_lb {
            conv = conv.with_lower_bound(lb).map_err(|_| {
                Error::InvalidArgument(format!("recorded lower bound {lb} exceeds s = {}", p.s))
            })?;
        }
        if let Some(df) = q.df {
            conv = conv.with_recorded_free_distance(df).map_err(|_| {
                Error::InvalidArgument(format!("recorded free distance {df} is outside its bounds"))
            })?;
        }
        conv.source = self.meta.source.clone();
        conv.row_order = self.meta.row_order.clone();
        Ok(conv)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

pub fn read_code(path: &Path) -> Result<LinearCode> {
    read_json::<CodeJson>(path)?.to_code()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
