//! Binary field files and slice export.
//!
//! Layout (little endian):
//!
//! ```text
//! b"GFLD"  u32 version = 1  u32 n  f64 L  u8 rep (0 physical, 1 fourier)
//! n³ records in flat-index order (x fastest), each 3 × (re f64, im f64)
//! ```

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::io::format_real;
use crate::scalar::Real;

use super::field::{GridField, Rep};
use super::grid::GridSpec;

pub const MAGIC: &[u8; 4] = b"GFLD";
pub const VERSION: u32 = 1;

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_field<T: Real, W: Write>(field: &GridField<T>, mut w: W) -> Result<()> {
    let spec = field.spec();
    let n = u32::try_from(spec.n).map_err(|_| Error::InvalidGrid("n too large".into()))?;
    w.write_all(MAGIC).map_err(io_err)?;
    w.write_all(&VERSION.to_le_bytes()).map_err(io_err)?;
    w.write_all(&n.to_le_bytes()).map_err(io_err)?;
    w.write_all(&spec.box_length.to_f64_lossy().to_le_bytes()).map_err(io_err)?;
    w.write_all(&[match field.rep() {
        Rep::Physical => 0u8,
        Rep::Fourier => 1u8,
    }])
    .map_err(io_err)?;
    let mut buf = Vec::with_capacity(48 * spec.len());
    for idx in 0..spec.len() {
        for v in field.value(idx) {
            buf.extend_from_slice(&v.re.to_f64_lossy().to_le_bytes());
            buf.extend_from_slice(&v.im.to_f64_lossy().to_le_bytes());
        }
    }
    w.write_all(&buf).map_err(io_err)?;
    w.flush().map_err(io_err)
}

pub fn read_field<T: Real, R: Read>(mut r: R) -> Result<GridField<T>> {
    let mut head = [0u8; 21];
    r.read_exact(&mut head).map_err(|e| Error::Parse(format!("truncated field header: {e}")))?;
    if &head[0..4] != MAGIC {
        return Err(Error::Parse("not a GFLD file".into()));
    }
    let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Parse(format!("unsupported GFLD version {version}")));
    }
    let n = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
    let box_length = f64::from_le_bytes(head[12..20].try_into().unwrap());
    let rep = match head[20] {
        0 => Rep::Physical,
        1 => Rep::Fourier,
        other => return Err(Error::Parse(format!("unknown representation tag {other}"))),
    };
    let spec = GridSpec::new(n, T::lit(box_length))?;
    let mut body = Vec::new();
    r.read_to_end(&mut body).map_err(io_err)?;
    if body.len() != 48 * spec.len() {
        return Err(Error::Parse(format!("expected {} payload bytes, found {}", 48 * spec.len(), body.len())));
    }
    let mut data: [Vec<Complex<T>>; 3] = Default::default();
    for c in data.iter_mut() {
        c.reserve_exact(spec.len());
    }
    for rec in body.chunks_exact(48) {
        for (c, comp) in data.iter_mut().enumerate() {
            let re = f64::from_le_bytes(rec[16 * c..16 * c + 8].try_into().unwrap());
            let im = f64::from_le_bytes(rec[16 * c + 8..16 * c + 16].try_into().unwrap());
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::NonFinite { name: "field value" });
            }
            comp.push(Complex::new(T::lit(re), T::lit(im)));
        }
    }
    GridField::from_components(spec, rep, data)
}

pub fn save_field<T: Real>(field: &GridField<T>, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_field(field, std::io::BufWriter::new(f))
}

pub fn load_field<T: Real>(path: &Path) -> Result<GridField<T>> {
    let f = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_field(std::io::BufReader::new(f))
}

/// CSV of the plane `x₃ = x₃[l]`: `x1,x2,re1,im1,re2,im2,re3,im3`.
pub fn write_slice_csv<T: Real, W: Write>(field: &GridField<T>, l: usize, mut w: W) -> Result<()> {
    field.expect_rep(Rep::Physical)?;
    let spec = field.spec();
    if l >= spec.n {
        return Err(Error::InvalidArgument(format!("slice index {l} outside 0..{}", spec.n)));
    }
    writeln!(w, "x1,x2,re1,im1,re2,im2,re3,im3").map_err(io_err)?;
    for j in 0..spec.n {
        for i in 0..spec.n {
            let v = field.value(spec.index(i, j, l));
            let mut row = vec![format_real(spec.coordinate(i)), format_real(spec.coordinate(j))];
            for c in v {
                row.push(format_real(c.re));
                row.push(format_real(c.im));
            }
            writeln!(w, "{}", row.join(",")).map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vec3;

    fn sample() -> GridField<f64> {
        let spec = GridSpec::new(8, 5.0).unwrap();
        GridField::from_fn(spec, |x| [Complex::new(x.0[0], -x.0[1]), Complex::new(x.0[2], 0.5), Complex::new(1e-300, 3.0)])
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let f = sample();
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 21 + 48 * 512);
        assert_eq!(&buf[..4], b"GFLD");
        let g: GridField<f64> = read_field(&buf[..]).unwrap();
        assert_eq!(f, g);
        let h = f.to_fourier().unwrap();
        buf.clear();
        write_field(&h, &mut buf).unwrap();
        assert_eq!(read_field::<f64, _>(&buf[..]).unwrap().rep(), Rep::Fourier);
    }

    #[test]
    fn rejects_corrupt_input() {
        let mut buf = Vec::new();
        write_field(&sample(), &mut buf).unwrap();
        assert!(read_field::<f64, _>(&buf[..100]).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_field::<f64, _>(&bad[..]).is_err());
        let mut bad = buf.clone();
        bad[20] = 7;
        assert!(read_field::<f64, _>(&bad[..]).is_err());
        let mut bad = buf;
        bad[21..29].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(read_field::<f64, _>(&bad[..]), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn slice_csv_has_one_row_per_node() {
        let f = GridField::from_real_fn(GridSpec::new(8, 4.0).unwrap(), |x| Vec3::new(x.0[0], x.0[1], x.0[2]));
        let mut out = Vec::new();
        write_slice_csv(&f, 4, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 65);
        assert!(lines[1].starts_with("-2.0000000000000000e0,-2.0000000000000000e0,"));
        assert!(write_slice_csv(&f, 8, Vec::new()).is_err());
    }
}
