//! Binary wave-function snapshots.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |---|---|
//! | 8 | magic `RBECWF01` |
//! | 4 | `u32` N_x |
//! | 4 | `u32` N_y |
//! | 8 | `f64` L (grid is `[-L, L)^2`) |
//! | 8 | `f64` time |
//! | 4 | `u32` comment length in bytes |
//! | n | UTF-8 comment |
//! | 16 N_x N_y | `(re, im)` `f64` pairs, index `ix * N_y + iy` |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, RotError};
use crate::grid::{Grid, GridSpec};
use crate::wave::{Space, WaveFunction};

pub const MAGIC: &[u8; 8] = b"RBECWF01";

/// Decoded snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub spec: GridSpec,
    pub time: f64,
    pub comment: String,
    pub values: Vec<Complex64>,
}

impl Snapshot {
    pub fn from_wave(psi: &WaveFunction, time: f64, comment: impl Into<String>) -> Result<Self> {
        if psi.space() != Space::Xy {
            return Err(RotError::Space { expected: "coordinate space", found: psi.space() });
        }
        Ok(Snapshot { spec: psi.grid.spec, time, comment: comment.into(), values: psi.values.clone() })
    }

    /// The state on a fresh grid, or on `grid` if its spec matches.
    pub fn to_wave(&self, grid: Option<&Arc<Grid>>) -> Result<WaveFunction> {
        let grid = match grid {
            Some(g) if g.spec == self.spec => g.clone(),
            Some(g) => {
                return Err(RotError::Invalid(format!(
                    "snapshot grid {:?} does not match {:?}",
                    self.spec, g.spec
                )))
            }
            None => Grid::new(self.spec)?,
        };
        WaveFunction::from_values(grid, self.values.clone())
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.spec.nx as u32).to_le_bytes())?;
        w.write_all(&(self.spec.ny as u32).to_le_bytes())?;
        w.write_all(&self.spec.l.to_le_bytes())?;
        w.write_all(&self.time.to_le_bytes())?;
        w.write_all(&(self.comment.len() as u32).to_le_bytes())?;
        w.write_all(self.comment.as_bytes())?;
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        w.flush()
    }

    /// Decodes; `Err(message)` on malformed input.
    pub fn read_from(mut r: impl Read) -> std::result::Result<Self, String> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(|e| format!("header: {e}"))?;
        if &magic != MAGIC {
            return Err(format!("bad magic {magic:?}"));
        }
        let nx = read_u32(&mut r)? as usize;
        let ny = read_u32(&mut r)? as usize;
        let l = read_f64(&mut r)?;
        let time = read_f64(&mut r)?;
        let spec = GridSpec::new(l, nx, ny).map_err(|e| e.to_string())?;
        let len = read_u32(&mut r)? as usize;
        let mut comment = vec![0u8; len];
        r.read_exact(&mut comment).map_err(|e| format!("comment: {e}"))?;
        let comment = String::from_utf8(comment).map_err(|e| format!("comment: {e}"))?;
        let mut values = Vec::with_capacity(nx * ny);
        for _ in 0..nx * ny {
            let re = read_f64(&mut r)?;
            let im = read_f64(&mut r)?;
            values.push(Complex64::new(re, im));
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest).map_err(|e| e.to_string())? != 0 {
            return Err("trailing bytes after values".into());
        }
        Ok(Snapshot { spec, time, comment, values })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path)?;
        self.write_to(BufWriter::new(file))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path)?;
        Self::read_from(BufReader::new(file))
            .map_err(|message| RotError::Snapshot { path: path.to_path_buf(), message })
    }
}

fn read_u32(r: &mut impl Read) -> std::result::Result<u32, String> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(|e| format!("truncated: {e}"))?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> std::result::Result<f64, String> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|e| format!("truncated: {e}"))?;
    Ok(f64::from_le_bytes(b))
}
