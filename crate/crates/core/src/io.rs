//! Matrix and vector files.
//!
//! Matrices are CSV (one row per line, comma-separated decimals, `#` starts a
//! comment line) or binary: the 8-byte magic `LCCMAT01`, `u32` rows, `u32`
//! cols (little-endian), then `rows·cols` little-endian `f64` in row-major
//! order. Vectors use the same binary layout with one column, or CSV with one
//! value per line given either as an exact decimal (`-0.375`) or as a
//! `mantissa,exponent` integer pair meaning `mantissa·2^exponent`.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{malformed, Error, Result};
use crate::matrix::Matrix;
use crate::pot_arith::Dyadic;

pub const MATRIX_MAGIC: &[u8; 8] = b"LCCMAT01";
const HEADER_LEN: usize = 16;

fn parse_binary(bytes: &[u8]) -> Result<Matrix<f64>> {
    if bytes.len() < HEADER_LEN {
        return Err(malformed("binary matrix header is truncated"));
    }
    let rows = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let cols = u32::from_le_bytes(bytes[12..16].try_into().expect("4 bytes")) as usize;
    let body = &bytes[HEADER_LEN..];
    let expected = rows.checked_mul(cols).and_then(|n| n.checked_mul(8));
    if expected != Some(body.len()) {
        return Err(malformed(format!("{rows}x{cols} binary matrix with {} payload bytes", body.len())));
    }
    let values: Vec<f64> = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    check_finite(&values)?;
    Matrix::from_row_major(rows, cols, &values)
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(malformed(format!("non-finite value at position {i}"))),
        None => Ok(()),
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses a CSV matrix.
pub fn parse_matrix_csv(text: &str) -> Result<Matrix<f64>> {
    let mut values = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (line_no, line) in data_lines(text) {
        let row = line
            .split(',')
            .map(|f| f.trim().parse::<f64>().map_err(|_| malformed(format!("line {line_no}: bad number {f:?}"))))
            .collect::<Result<Vec<_>>>()?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(malformed(format!("line {line_no}: {} fields, expected {c}", row.len())));
            }
            Some(_) => {}
        }
        values.extend(row);
        rows += 1;
    }
    check_finite(&values)?;
    let cols = cols.ok_or_else(|| malformed("empty matrix file"))?;
    Matrix::from_row_major(rows, cols, &values)
}

/// Parses matrix bytes, choosing the format by magic.
pub fn parse_matrix(bytes: &[u8]) -> Result<Matrix<f64>> {
    if bytes.starts_with(MATRIX_MAGIC) {
        return parse_binary(bytes);
    }
    let text = std::str::from_utf8(bytes).map_err(|_| malformed("matrix file is neither binary nor UTF-8 text"))?;
    parse_matrix_csv(text)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix<f64>> {
    parse_matrix(&fs::read(path)?)
}

/// Shortest round-trip decimal rendering, one row per line.
pub fn write_matrix_csv<W: Write>(mut out: W, m: &Matrix<f64>) -> Result<()> {
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format!("{:?}", m.get(i, j))).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn matrix_to_binary(m: &Matrix<f64>) -> Result<Vec<u8>> {
    let too_big = |d: usize| u32::try_from(d).map_err(|_| Error::Domain(format!("dimension {d} exceeds u32")));
    let (rows, cols) = (too_big(m.rows())?, too_big(m.cols())?);
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * m.rows() * m.cols());
    out.extend_from_slice(MATRIX_MAGIC);
    out.extend_from_slice(&rows.to_le_bytes());
    out.extend_from_slice(&cols.to_le_bytes());
    for v in m.row_major() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Writes CSV, or binary when the path ends in `.bin`.
pub fn write_matrix(path: impl AsRef<Path>, m: &Matrix<f64>) -> Result<()> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e == "bin") {
        fs::write(path, matrix_to_binary(m)?)?;
    } else {
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, m)?;
        fs::write(path, buf)?;
    }
    Ok(())
}

/// Parses a vector file (binary `K × 1` matrix or CSV lines).
pub fn parse_vector(bytes: &[u8]) -> Result<Vec<Dyadic>> {
    if bytes.starts_with(MATRIX_MAGIC) {
        let m = parse_binary(bytes)?;
        if m.cols() != 1 {
            return Err(malformed(format!("binary vector must have one column, got {}", m.cols())));
        }
        return Ok(m.as_col_major().iter().map(|&v| Dyadic::from_f64(v).expect("finite")).collect());
    }
    let text = std::str::from_utf8(bytes).map_err(|_| malformed("vector file is neither binary nor UTF-8 text"))?;
    data_lines(text)
        .filter(|(_, line)| !line.starts_with("mantissa"))
        .map(|(line_no, line)| {
            let at = |e: Error| malformed(format!("line {line_no}: {e}"));
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            match fields[..] {
                [decimal] => Dyadic::parse_decimal(decimal).map_err(at),
                [m, e] | [m, e, _] => {
                    let m: num_bigint::BigInt =
                        m.parse().map_err(|_| malformed(format!("line {line_no}: bad mantissa {m:?}")))?;
                    let e: i64 = e.parse().map_err(|_| malformed(format!("line {line_no}: bad exponent {e:?}")))?;
                    let d = Dyadic::new(m, e);
                    if let [_, _, decimal] = fields[..] {
                        if Dyadic::parse_decimal(decimal).map_err(at)? != d {
                            return Err(malformed(format!("line {line_no}: decimal column disagrees with mantissa/exponent")));
                        }
                    }
                    Ok(d)
                }
                _ => Err(malformed(format!("line {line_no}: expected 1 to 3 fields, got {}", fields.len()))),
            }
        })
        .collect()
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<Dyadic>> {
    parse_vector(&fs::read(path)?)
}

/// CSV with header `mantissa,exponent,decimal`, one entry per line.
pub fn write_vector_csv<W: Write>(mut out: W, v: &[Dyadic]) -> Result<()> {
    writeln!(out, "mantissa,exponent,decimal")?;
    for d in v {
        writeln!(out, "{},{},{}", d.mantissa(), d.exponent(), d)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let m = Matrix::from_row_major(2, 3, &[0.1, -2.5, 1e-300, 3.0, 0.0, -0.0]).unwrap();
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, &m).unwrap();
        assert_eq!(parse_matrix(&buf).unwrap(), m);
    }

    #[test]
    fn binary_round_trip() {
        let m = Matrix::from_row_major(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let bytes = matrix_to_binary(&m).unwrap();
        assert_eq!(bytes.len(), 16 + 32);
        assert_eq!(&bytes[16..24], &1.0f64.to_le_bytes());
        assert_eq!(&bytes[24..32], &2.0f64.to_le_bytes());
        assert_eq!(parse_matrix(&bytes).unwrap(), m);
        assert!(matches!(parse_matrix(&bytes[..40]), Err(Error::Malformed(_))));
        assert!(matches!(parse_matrix(&bytes[..10]), Err(Error::Malformed(_))));
    }

    #[test]
    fn malformed_csv() {
        for bad in ["1,2\n3\n", "1,x\n", "", "# only a comment\n", "1,nan\n"] {
            assert!(matches!(parse_matrix(bad.as_bytes()), Err(Error::Malformed(_))), "{bad:?}");
        }
        let m = parse_matrix(b"# header\n1, 2\n\n3,4\n").unwrap();
        assert_eq!(m.row_major(), vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn vectors() {
        let v = parse_vector(b"3,-2\n-0.375\n# note\n12\n-5, 4\n").unwrap();
        assert_eq!(v, vec![Dyadic::new(3, -2), Dyadic::new(-3, -3), Dyadic::from_i64(12), Dyadic::new(-5, 4)]);
        assert!(parse_vector(b"0.1\n").is_err());
        let mut buf = Vec::new();
        write_vector_csv(&mut buf, &v).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "mantissa,exponent,decimal\n3,-2,0.75\n-3,-3,-0.375\n3,2,12\n-5,4,-80\n"
        );
        let bin = matrix_to_binary(&Matrix::from_col_major(2, 1, vec![0.5, -3.0]).unwrap()).unwrap();
        assert_eq!(parse_vector(&bin).unwrap(), vec![Dyadic::new(1, -1), Dyadic::from_i64(-3)]);
    }
}
