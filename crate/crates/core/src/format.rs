//! Binary `QTF1` (fields) and `QTG1` (tomograms) formats, plus CSV export.
//! All multi-byte values are little-endian.
//!
//! `QTF1`: magic, u32 ndim, per axis {f64 min, f64 step, u64 count}, u8 dtype
//! (0 real f64, 1 complex f64 as re,im), row-major payload.
//!
//! `QTG1`: magic, u64 angle count, f64 angles, x axis {f64 min, f64 step,
//! u64 count}, f64 payload angle-major.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Axis, SampledField};
use crate::tomography::Tomogram;

pub const QTF_MAGIC: &[u8; 4] = b"QTF1";
pub const QTG_MAGIC: &[u8; 4] = b"QTG1";

const DTYPE_REAL: u8 = 0;
const DTYPE_COMPLEX: u8 = 1;

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| format_err(format!("truncated at byte {}", self.pos)))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn axis(&mut self) -> Result<Axis> {
        let (min, step, count) = (self.f64()?, self.f64()?, self.u64()?);
        let count = usize::try_from(count).map_err(|_| format_err("axis count overflows"))?;
        Axis::new(min, step, count).map_err(|e| format_err(format!("bad axis: {e}")))
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(format_err(format!("{} trailing bytes", self.buf.len() - self.pos)));
        }
        Ok(())
    }
}

fn put_axis(out: &mut Vec<u8>, a: &Axis) {
    out.extend_from_slice(&a.min.to_le_bytes());
    out.extend_from_slice(&a.step.to_le_bytes());
    out.extend_from_slice(&(a.count as u64).to_le_bytes());
}

pub fn encode_qtf(field: &SampledField) -> Vec<u8> {
    let real = field.data().iter().all(|z| z.im == 0.0);
    let width = if real { 8 } else { 16 };
    let mut out = Vec::with_capacity(9 + 24 * field.ndim() + width * field.len());
    out.extend_from_slice(QTF_MAGIC);
    out.extend_from_slice(&(field.ndim() as u32).to_le_bytes());
    for a in field.axes() {
        put_axis(&mut out, a);
    }
    out.push(if real { DTYPE_REAL } else { DTYPE_COMPLEX });
    for z in field.data() {
        out.extend_from_slice(&z.re.to_le_bytes());
        if !real {
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

pub fn decode_qtf(buf: &[u8]) -> Result<SampledField> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4)? != QTF_MAGIC {
        return Err(format_err("not a QTF1 file"));
    }
    let ndim = r.u32()?;
    if !(1..=2).contains(&ndim) {
        return Err(format_err(format!("unsupported dimension count {ndim}")));
    }
    let axes = (0..ndim).map(|_| r.axis()).collect::<Result<Vec<_>>>()?;
    let len = axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.count))
        .ok_or_else(|| format_err("payload size overflows"))?;
    let complex = match r.u8()? {
        DTYPE_REAL => false,
        DTYPE_COMPLEX => true,
        d => return Err(format_err(format!("unknown dtype {d}"))),
    };
    let width = if complex { 16 } else { 8 };
    if buf.len() - r.pos != len * width {
        return Err(format_err(format!(
            "payload holds {} bytes, expected {}",
            buf.len() - r.pos,
            len * width
        )));
    }
    let data = (0..len)
        .map(|_| {
            let re = r.f64()?;
            let im = if complex { r.f64()? } else { 0.0 };
            Ok(Complex64::new(re, im))
        })
        .collect::<Result<Vec<_>>>()?;
    r.finish()?;
    SampledField::new(axes, data).map_err(|e| format_err(e.to_string()))
}

pub fn encode_qtg(tom: &Tomogram) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 8 * tom.angles().len() + 24 + 8 * tom.omega().len());
    out.extend_from_slice(QTG_MAGIC);
    out.extend_from_slice(&(tom.angles().len() as u64).to_le_bytes());
    for a in tom.angles() {
        out.extend_from_slice(&a.to_le_bytes());
    }
    put_axis(&mut out, tom.x_axis());
    for v in tom.omega() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_qtg(buf: &[u8]) -> Result<Tomogram> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4)? != QTG_MAGIC {
        return Err(format_err("not a QTG1 file"));
    }
    let k = usize::try_from(r.u64()?).map_err(|_| format_err("angle count overflows"))?;
    if k.checked_mul(8).is_none_or(|b| b > buf.len()) {
        return Err(format_err("angle count exceeds file size"));
    }
    let angles = (0..k).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    let x_axis = r.axis()?;
    let len = k
        .checked_mul(x_axis.count)
        .filter(|l| l.checked_mul(8) == Some(buf.len() - r.pos))
        .ok_or_else(|| format_err("payload size does not match the header"))?;
    let omega = (0..len).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    r.finish()?;
    Tomogram::new(x_axis, angles, omega).map_err(|e| format_err(e.to_string()))
}

/// A decoded file of either kind.
#[derive(Clone, Debug, PartialEq)]
pub enum Artifact {
    Field(SampledField),
    Tomogram(Tomogram),
}

pub fn decode(buf: &[u8]) -> Result<Artifact> {
    match buf.get(..4) {
        Some(m) if m == QTF_MAGIC => decode_qtf(buf).map(Artifact::Field),
        Some(m) if m == QTG_MAGIC => decode_qtg(buf).map(Artifact::Tomogram),
        _ => Err(format_err("unrecognized magic")),
    }
}

pub fn read(path: &Path) -> Result<Artifact> {
    decode(&fs::read(path)?)
}

pub fn write_qtf(path: &Path, field: &SampledField) -> Result<()> {
    Ok(fs::write(path, encode_qtf(field))?)
}

pub fn write_qtg(path: &Path, tom: &Tomogram) -> Result<()> {
    Ok(fs::write(path, encode_qtg(tom))?)
}

/// One row per node: coordinates, then `re`, `im`.
pub fn write_field_csv(mut out: impl Write, field: &SampledField) -> Result<()> {
    let names = ["x", "y"];
    for name in &names[..field.ndim()] {
        write!(out, "{name},")?;
    }
    writeln!(out, "re,im")?;
    for (k, z) in field.data().iter().enumerate() {
        for c in field.point(k) {
            write!(out, "{c},")?;
        }
        writeln!(out, "{},{}", z.re, z.im)?;
    }
    Ok(())
}

/// One row per sample: `x`, `alpha`, `omega`.
pub fn write_tomogram_csv(mut out: impl Write, tom: &Tomogram) -> Result<()> {
    writeln!(out, "x,alpha,omega")?;
    for (i, alpha) in tom.angles().iter().enumerate() {
        for (x, v) in tom.x_axis().coords().zip(tom.row(i)) {
            writeln!(out, "{x},{alpha},{v}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_axis;

    fn complex_field() -> SampledField {
        let a = make_axis(2.0, 8).unwrap();
        let b = make_axis(3.0, 6).unwrap();
        SampledField::from_fn(vec![a, b], |p| Complex64::new(p[0].sin(), p[1] * p[0])).unwrap()
    }

    #[test]
    fn qtf_roundtrip_complex() {
        let f = complex_field();
        let bytes = encode_qtf(&f);
        assert_eq!(bytes[4 + 4 + 48], DTYPE_COMPLEX);
        assert_eq!(decode_qtf(&bytes).unwrap(), f);
    }

    #[test]
    fn qtf_roundtrip_real() {
        let a = make_axis(2.0, 8).unwrap();
        let f = SampledField::from_fn(vec![a], |p| Complex64::new(p[0].exp(), 0.0)).unwrap();
        let bytes = encode_qtf(&f);
        assert_eq!(bytes.len(), 4 + 4 + 24 + 1 + 8 * 8);
        assert_eq!(decode_qtf(&bytes).unwrap(), f);
    }

    #[test]
    fn qtf_rejects_corruption() {
        let bytes = encode_qtf(&complex_field());
        assert!(decode_qtf(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_qtf(&extra).is_err());
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(decode_qtf(&magic).is_err());
        let mut dtype = bytes;
        dtype[56] = 7;
        assert!(decode_qtf(&dtype).is_err());
    }

    #[test]
    fn qtg_roundtrip() {
        let axis = make_axis(4.0, 16).unwrap();
        let angles = vec![0.0, 0.5, 1.5];
        let omega = (0..48).map(|i| (i as f64).sqrt()).collect();
        let tom = Tomogram::new(axis, angles, omega).unwrap();
        let bytes = encode_qtg(&tom);
        assert_eq!(decode(&bytes).unwrap(), Artifact::Tomogram(tom));
        assert!(decode_qtg(&bytes[..bytes.len() - 8]).is_err());
    }

    #[test]
    fn csv_layout() {
        let a = make_axis(1.0, 2).unwrap();
        let f = SampledField::from_fn(vec![a], |p| Complex64::new(p[0], 1.0)).unwrap();
        let mut out = Vec::new();
        write_field_csv(&mut out, &f).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "x,re,im\n-1,-1,1\n0,0,1\n");
        let tom = Tomogram::new(a, vec![0.0], vec![0.25, 0.75]).unwrap();
        let mut out = Vec::new();
        write_tomogram_csv(&mut out, &tom).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "x,alpha,omega\n-1,0,0.25\n0,0,0.75\n");
    }
}
