//! Serialization helpers and the binary field format.
//!
//! A field file is a little-endian `u32` header length, a UTF-8 JSON header
//! of that many bytes, then the complex samples as little-endian `f32` pairs.

use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sobolev::{GridField, TorusGrid};

const MAX_HEADER: usize = 1 << 16;

pub fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub fn ser_root_list<S: Serializer>(
    roots: &[(Complex64, usize)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Root {
        re: f64,
        im: f64,
        multiplicity: usize,
    }
    let mut seq = s.serialize_seq(Some(roots.len()))?;
    for &(z, mu) in roots {
        seq.serialize_element(&Root {
            re: z.re,
            im: z.im,
            multiplicity: mu,
        })?;
    }
    seq.end()
}

/// Complex numbers as `[re, im]` pairs.
pub mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        super::ser_complex(z, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub kind: String,
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xn: Option<Vec<f64>>,
}

pub fn encode_field(header: &FieldHeader, values: &[Complex64]) -> Result<Vec<u8>> {
    let json = serde_json::to_vec(header)?;
    let mut out = Vec::with_capacity(4 + json.len() + 8 * values.len());
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    for z in values {
        out.extend_from_slice(&(z.re as f32).to_le_bytes());
        out.extend_from_slice(&(z.im as f32).to_le_bytes());
    }
    Ok(out)
}

pub fn decode_field(bytes: &[u8]) -> Result<(FieldHeader, Vec<Complex64>)> {
    if bytes.len() < 4 {
        return Err(Error::Format("truncated header length".into()));
    }
    let hlen = u32::from_le_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]) as usize;
    if hlen > MAX_HEADER || 4 + hlen > bytes.len() {
        return Err(Error::Format(format!("header length {hlen} out of range")));
    }
    let header: FieldHeader = serde_json::from_slice(&bytes[4..4 + hlen])?;
    let grid = TorusGrid::new(header.n, header.points, header.length)?;
    let rows = match &header.xn {
        Some(xn) => {
            if xn.is_empty() || xn.iter().any(|x| !x.is_finite()) {
                return Err(Error::Format("invalid x_n samples".into()));
            }
            xn.len()
        }
        None => 1,
    };
    let count = grid.len().checked_mul(rows).ok_or_else(|| Error::Format("size overflow".into()))?;
    let body = &bytes[4 + hlen..];
    if body.len() != 8 * count {
        return Err(Error::Format(format!(
            "expected {} payload bytes, found {}",
            8 * count,
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex64::new(re as f64, im as f64)
        })
        .collect();
    Ok((header, values))
}

pub fn encode_grid_field(u: &GridField, kind: &str) -> Result<Vec<u8>> {
    let header = FieldHeader {
        kind: kind.to_string(),
        n: u.grid.n,
        points: u.grid.points,
        length: u.grid.length,
        xn: None,
    };
    encode_field(&header, &u.values)
}

pub fn decode_grid_field(bytes: &[u8]) -> Result<GridField> {
    let (h, values) = decode_field(bytes)?;
    if h.xn.is_some() {
        return Err(Error::Format("expected a grid field without x_n samples".into()));
    }
    GridField::new(TorusGrid::new(h.n, h.points, h.length)?, values)
}
