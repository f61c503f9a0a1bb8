//! JSON instance files.
//!
//! Complex numbers are two-element `[re, im]` arrays and matrices are nested
//! row-major arrays of them. Floats round-trip bit-exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use zpreal_core::model::ZeroPoleData;
use zpreal_core::{Complex, ComplexMatrix};

use crate::error::{CliError, CliResult, EXIT_VALIDATION};

pub const FORMAT_VERSION: u32 = 1;

pub type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format_version: u32,
    pub k: usize,
    pub n: usize,
    pub poles: Vec<Pair>,
    pub zeros: Vec<Pair>,
    #[serde(rename = "F_P")]
    pub f_p: Vec<Vec<Pair>>,
    #[serde(rename = "G_P")]
    pub g_p: Vec<Vec<Pair>>,
    #[serde(rename = "F_N")]
    pub f_n: Vec<Vec<Pair>>,
    #[serde(rename = "G_N")]
    pub g_n: Vec<Vec<Pair>>,
    /// `R(∞)` when the stored data is not normalized. Ingestion normalizes
    /// and drops it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_at_infinity: Option<Vec<Vec<Pair>>>,
    #[serde(default, skip_serializing_if = "Metadata::is_empty")]
    pub metadata: Metadata,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionMeta>,
}

impl Metadata {
    pub fn is_empty(&self) -> bool {
        *self == Metadata::default()
    }
}

/// Where a factor file came from: which factor, the contour, and the original
/// indices of its poles and zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionMeta {
    pub factor: String,
    pub center: Pair,
    pub radius: f64,
    pub pole_indices: Vec<usize>,
    pub zero_indices: Vec<usize>,
}

fn pair(z: Complex) -> Pair {
    [z.re, z.im]
}

fn complex(p: &Pair) -> Complex {
    Complex::new(p[0], p[1])
}

fn rows_of(m: &ComplexMatrix) -> Vec<Vec<Pair>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| pair(*z)).collect())
        .collect()
}

fn matrix(name: &str, rows: &[Vec<Pair>], shape: (usize, usize)) -> CliResult<ComplexMatrix> {
    let bad = || {
        CliError::new(
            EXIT_VALIDATION,
            format!("field `{name}`: expected a {}x{} matrix", shape.0, shape.1),
        )
    };
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(bad());
    }
    let data = rows.iter().flatten().map(complex).collect();
    ComplexMatrix::new(shape.0, shape.1, data)
        .map_err(|e| CliError::new(EXIT_VALIDATION, format!("field `{name}`: {e}")))
}

impl InstanceFile {
    pub fn from_data(d: &ZeroPoleData, metadata: Metadata) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            k: d.k(),
            n: d.n(),
            poles: d.poles().iter().map(|z| pair(*z)).collect(),
            zeros: d.zeros().iter().map(|z| pair(*z)).collect(),
            f_p: rows_of(d.f_p()),
            g_p: rows_of(d.g_p()),
            f_n: rows_of(d.f_n()),
            g_n: rows_of(d.g_n()),
            value_at_infinity: None,
            metadata,
        }
    }

    /// Validated, normalized zero-pole data.
    pub fn to_data(&self) -> CliResult<ZeroPoleData> {
        let (k, n) = (self.k, self.n);
        if k == 0 {
            return Err(CliError::new(EXIT_VALIDATION, "field `k`: must be at least 1"));
        }
        for (name, list) in [("poles", &self.poles), ("zeros", &self.zeros)] {
            if list.len() != n {
                return Err(CliError::new(
                    EXIT_VALIDATION,
                    format!("field `{name}`: expected {n} entries, found {}", list.len()),
                ));
            }
        }
        let poles = self.poles.iter().map(complex).collect();
        let zeros = self.zeros.iter().map(complex).collect();
        let f_p = matrix("F_P", &self.f_p, (k, n))?;
        let g_p = matrix("G_P", &self.g_p, (n, k))?;
        let f_n = matrix("F_N", &self.f_n, (k, n))?;
        let g_n = matrix("G_N", &self.g_n, (n, k))?;
        let d = match &self.value_at_infinity {
            None => ZeroPoleData::new(poles, zeros, f_p, g_p, f_n, g_n)?,
            Some(rows) => {
                let dinf = matrix("value_at_infinity", rows, (k, k))?;
                ZeroPoleData::from_unnormalized(&dinf, poles, zeros, f_p, g_p, f_n, g_n)?
            }
        };
        Ok(d)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| CliError::parse(format!("instance file: {e}")))?;
        if file.format_version != FORMAT_VERSION {
            return Err(CliError::parse(format!(
                "field `format_version`: unsupported version {} (expected {FORMAT_VERSION})",
                file.format_version
            )));
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::parse(format!("{}: {}", path.display(), e.message)))
    }

    /// Indented JSON with every `[re, im]` pair kept on one line.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("instance files always serialize");
        let mut s = String::new();
        write_value(&v, 0, &mut s);
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.to_json()).map_err(|e| CliError::io(path, e))
    }
}

fn is_scalar(v: &Value) -> bool {
    !v.is_array() && !v.is_object()
}

// A scalar or an array of scalars: printed on one line.
fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(is_scalar),
        other => is_scalar(other),
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::Array(items) => {
            let inner: Vec<String> = items.iter().map(|x| x.to_string()).collect();
            format!("[{}]", inner.join(", "))
        }
        other => other.to_string(),
    }
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Array(items) if items.iter().all(is_flat) => {
            let inner: Vec<String> = items.iter().map(inline).collect();
            out.push_str(&format!("[{}]", inner.join(", ")));
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(x, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(&format!("{}{}: ", pad(depth + 1), Value::String(k.clone())));
                write_value(x, depth + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}
