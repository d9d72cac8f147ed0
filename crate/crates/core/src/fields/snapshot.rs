//! Binary field snapshots.
//!
//! Layout: magic `AURSNAP\0`, `u32` version, `u32` header length, UTF-8 JSON
//! header, then every component as little-endian `f64` in row-major order.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Bc, ScalarField};
use crate::error::{Error, Result};
use crate::geometry::Domain;

pub const MAGIC: &[u8; 8] = b"AURSNAP\0";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    pub bc: Bc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub name: String,
    pub t: f64,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub components: Vec<Component>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub header: Header,
    pub fields: Vec<ScalarField>,
}

impl Snapshot {
    pub fn new(name: &str, t: f64, fields: Vec<(String, ScalarField)>) -> Result<Self> {
        let first = fields.first().ok_or_else(|| Error::Format("snapshot needs a component".into()))?;
        let d = *first.1.domain();
        if fields.iter().any(|(_, f)| *f.domain() != d) {
            return Err(Error::Shape("snapshot components on different grids".into()));
        }
        let header = Header {
            name: name.to_string(),
            t,
            nx: d.nx,
            ny: d.ny,
            lx: d.lx,
            ly: d.ly,
            components: fields.iter().map(|(n, f)| Component { name: n.clone(), bc: f.bc() }).collect(),
        };
        Ok(Self { header, fields: fields.into_iter().map(|(_, f)| f).collect() })
    }

    pub fn field(&self, name: &str) -> Option<&ScalarField> {
        self.header.components.iter().position(|c| c.name == name).map(|i| &self.fields[i])
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        let json = serde_json::to_vec(&self.header).map_err(std::io::Error::other)?;
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(json.len() as u32).to_le_bytes())?;
        w.write_all(&json)?;
        for f in &self.fields {
            for v in f.data() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let io = |e: std::io::Error| Error::Format(e.to_string());
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word).map_err(io)?;
        let version = u32::from_le_bytes(word);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        r.read_exact(&mut word).map_err(io)?;
        let mut json = vec![0u8; u32::from_le_bytes(word) as usize];
        r.read_exact(&mut json).map_err(io)?;
        let header: Header = serde_json::from_slice(&json).map_err(|e| Error::Format(e.to_string()))?;
        let domain = Domain::new(header.lx, header.ly, header.nx, header.ny)?;
        let mut fields = Vec::with_capacity(header.components.len());
        let mut buf = [0u8; 8];
        for c in &header.components {
            let mut data = Vec::with_capacity(domain.len());
            for _ in 0..domain.len() {
                r.read_exact(&mut buf).map_err(io)?;
                data.push(f64::from_le_bytes(buf));
            }
            fields.push(ScalarField::new(domain, c.bc, data)?);
        }
        Ok(Self { header, fields })
    }
}
