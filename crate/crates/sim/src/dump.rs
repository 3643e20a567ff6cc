//! Little-endian binary snapshots: `N` (u64), `L` (f64), `t` (f64), then
//! `N²` pairs `(re, im)` of f64 in row-major order.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::field::WaveField;
use crate::grid::Grid2D;
use crate::SimError;

pub fn write_dump(w: &mut impl Write, psi: &WaveField, t: f64) -> Result<(), SimError> {
    w.write_all(&(psi.grid.n as u64).to_le_bytes())?;
    w.write_all(&psi.grid.l.to_le_bytes())?;
    w.write_all(&t.to_le_bytes())?;
    for z in &psi.data {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

fn read8(r: &mut impl Read) -> Result<[u8; 8], SimError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|e| SimError::BadDump(e.to_string()))?;
    Ok(b)
}

pub fn read_dump(r: &mut impl Read) -> Result<(WaveField, f64), SimError> {
    let n = u64::from_le_bytes(read8(r)?) as usize;
    let l = f64::from_le_bytes(read8(r)?);
    let t = f64::from_le_bytes(read8(r)?);
    let grid = Grid2D::new(n, l).map_err(|e| SimError::BadDump(e.to_string()))?;
    let mut data = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = f64::from_le_bytes(read8(r)?);
        let im = f64::from_le_bytes(read8(r)?);
        data.push(Complex64::new(re, im));
    }
    Ok((WaveField { grid, data }, t))
}
