//! Matrix Market (array format) and CSV exchange.
//!
//! Numbers are written as `{:.16e}`, 17 significant digits, which round-trips
//! every finite `f64` exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{BseError, Result};
use crate::matrix::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmField {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmSymmetry {
    General,
    Symmetric,
    Hermitian,
    SkewSymmetric,
}

impl MmSymmetry {
    fn name(self) -> &'static str {
        match self {
            MmSymmetry::General => "general",
            MmSymmetry::Symmetric => "symmetric",
            MmSymmetry::Hermitian => "hermitian",
            MmSymmetry::SkewSymmetric => "skew-symmetric",
        }
    }

    /// Whether entry `(i, j)` is stored: everything for general, otherwise the
    /// lower triangle (strictly lower for skew-symmetric).
    fn stores(self, i: usize, j: usize) -> bool {
        match self {
            MmSymmetry::General => true,
            MmSymmetry::SkewSymmetric => i > j,
            _ => i >= j,
        }
    }

    fn mirror(self, z: Complex64) -> Complex64 {
        match self {
            MmSymmetry::General | MmSymmetry::Symmetric => z,
            MmSymmetry::Hermitian => z.conj(),
            MmSymmetry::SkewSymmetric => -z,
        }
    }
}

/// A dense matrix read from Matrix Market, with the header it declared.
#[derive(Debug, Clone, PartialEq)]
pub struct MmMatrix {
    pub matrix: ComplexMatrix,
    pub field: MmField,
    pub symmetry: MmSymmetry,
}

fn parse_err(line: usize, msg: impl Into<String>) -> BseError {
    BseError::Parse { line, msg: msg.into() }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("invalid number {tok:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value {tok:?}")));
    }
    Ok(v)
}

/// Parses an array-format Matrix Market stream.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<MmMatrix> {
    let mut lines = reader.lines().enumerate().map(|(k, l)| (k + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header = header?;
    let words: Vec<String> = header.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(parse_err(1, "expected '%%MatrixMarket matrix array <field> <symmetry>'"));
    }
    if words[2] != "array" {
        return Err(parse_err(1, format!("only array format is supported, got {:?}", words[2])));
    }
    let field = match words[3].as_str() {
        "real" | "double" | "integer" => MmField::Real,
        "complex" => MmField::Complex,
        other => return Err(parse_err(1, format!("unsupported field {other:?}"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => MmSymmetry::General,
        "symmetric" => MmSymmetry::Symmetric,
        "hermitian" => MmSymmetry::Hermitian,
        "skew-symmetric" => MmSymmetry::SkewSymmetric,
        other => return Err(parse_err(1, format!("unsupported symmetry {other:?}"))),
    };
    if symmetry == MmSymmetry::Hermitian && field == MmField::Real {
        return Err(parse_err(1, "hermitian qualifier needs a complex field"));
    }

    let mut data = lines.filter(|(_, l)| match l {
        Ok(s) => {
            let t = s.trim();
            !t.is_empty() && !t.starts_with('%')
        }
        Err(_) => true,
    });
    let (size_line, size) = data.next().ok_or_else(|| parse_err(2, "missing size line"))?;
    let size = size?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(parse_err(size_line, "size line must be 'rows cols'"));
    }
    let rows: usize = dims[0].parse().map_err(|_| parse_err(size_line, "invalid row count"))?;
    let cols: usize = dims[1].parse().map_err(|_| parse_err(size_line, "invalid column count"))?;
    if symmetry != MmSymmetry::General && rows != cols {
        return Err(parse_err(size_line, "symmetric qualifiers need a square matrix"));
    }

    let per_entry = if field == MmField::Complex { 2 } else { 1 };
    let mut m = ComplexMatrix::zeros(rows, cols);
    let mut last_line = size_line;
    for j in 0..cols {
        for i in 0..rows {
            if !symmetry.stores(i, j) {
                continue;
            }
            let (ln, text) = data
                .next()
                .ok_or_else(|| parse_err(last_line + 1, format!("missing entry ({}, {})", i + 1, j + 1)))?;
            let text = text?;
            last_line = ln;
            let toks: Vec<&str> = text.split_whitespace().collect();
            if toks.len() != per_entry {
                return Err(parse_err(ln, format!("expected {per_entry} value(s), found {}", toks.len())));
            }
            let re = parse_f64(toks[0], ln)?;
            let im = if per_entry == 2 { parse_f64(toks[1], ln)? } else { 0.0 };
            let z = Complex64::new(re, im);
            if symmetry == MmSymmetry::Hermitian && i == j && im != 0.0 {
                return Err(parse_err(ln, "hermitian diagonal entry has nonzero imaginary part"));
            }
            m[(i, j)] = z;
            if i != j && symmetry != MmSymmetry::General {
                m[(j, i)] = symmetry.mirror(z);
            }
        }
    }
    if let Some((ln, _)) = data.next() {
        return Err(parse_err(ln, "trailing data after the last entry"));
    }
    Ok(MmMatrix {
        matrix: m,
        field,
        symmetry,
    })
}

/// Writes `m` in array format. Entries outside the stored triangle are not
/// written; the caller chooses a qualifier that `m` satisfies.
pub fn write_matrix_market<W: Write>(
    mut out: W,
    m: &ComplexMatrix,
    field: MmField,
    symmetry: MmSymmetry,
) -> Result<()> {
    if field == MmField::Real && !m.is_real() {
        return Err(BseError::InvalidArgument("matrix has imaginary parts; write it as complex".into()));
    }
    if symmetry != MmSymmetry::General && !m.is_square() {
        return Err(BseError::InvalidArgument("symmetric qualifiers need a square matrix".into()));
    }
    let field_name = match field {
        MmField::Real => "real",
        MmField::Complex => "complex",
    };
    writeln!(out, "%%MatrixMarket matrix array {field_name} {}", symmetry.name())?;
    writeln!(out, "{} {}", m.rows(), m.cols())?;
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            if !symmetry.stores(i, j) {
                continue;
            }
            let z = m[(i, j)];
            match field {
                MmField::Real => writeln!(out, "{:.16e}", z.re)?,
                MmField::Complex => writeln!(out, "{:.16e} {:.16e}", z.re, z.im)?,
            }
        }
    }
    Ok(())
}

pub fn read_matrix_market_file(path: &Path) -> Result<MmMatrix> {
    read_matrix_market(BufReader::new(File::open(path)?))
}

pub fn write_matrix_market_file(path: &Path, m: &ComplexMatrix, field: MmField, symmetry: MmSymmetry) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix_market(&mut w, m, field, symmetry)?;
    w.flush()?;
    Ok(())
}

/// Writes `index,eigenvalue` rows (1-based index).
pub fn write_eigenvalues<W: Write>(mut out: W, values: &[f64]) -> Result<()> {
    writeln!(out, "index,eigenvalue")?;
    for (k, v) in values.iter().enumerate() {
        writeln!(out, "{},{v:.16e}", k + 1)?;
    }
    Ok(())
}

/// Reads the `eigenvalue` column of a CSV written by [`write_eigenvalues`];
/// also accepts a bare one-column file.
pub fn read_eigenvalues<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let last = t.rsplit(',').next().unwrap_or(t).trim();
        if k == 0 && last.parse::<f64>().is_err() {
            continue;
        }
        values.push(parse_f64(last, k + 1)?);
    }
    if values.is_empty() {
        return Err(parse_err(1, "no eigenvalues found"));
    }
    Ok(values)
}

pub fn write_eigenvalues_file(path: &Path, values: &[f64]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_eigenvalues(&mut w, values)?;
    w.flush()?;
    Ok(())
}

pub fn read_eigenvalues_file(path: &Path) -> Result<Vec<f64>> {
    read_eigenvalues(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn roundtrip(m: &ComplexMatrix, field: MmField, sym: MmSymmetry) -> MmMatrix {
        let mut buf = Vec::new();
        write_matrix_market(&mut buf, m, field, sym).unwrap();
        read_matrix_market(&buf[..]).unwrap()
    }

    #[test]
    fn hermitian_roundtrip_is_exact() {
        let m = ComplexMatrix::from_rows(&[
            &[c(2.0, 0.0), c(0.1, 1.0 / 3.0)],
            &[c(0.1, -1.0 / 3.0), c(std::f64::consts::PI, 0.0)],
        ]);
        let r = roundtrip(&m, MmField::Complex, MmSymmetry::Hermitian);
        assert_eq!(r.matrix, m);
        assert_eq!(r.symmetry, MmSymmetry::Hermitian);
    }

    #[test]
    fn general_and_skew_roundtrip() {
        let g = ComplexMatrix::from_fn(2, 3, |i, j| c(i as f64 + 0.1, j as f64 * 1e-300));
        assert_eq!(roundtrip(&g, MmField::Complex, MmSymmetry::General).matrix, g);
        let s = ComplexMatrix::from_rows(&[&[c(0.0, 0.0), c(-1.5, 0.0)], &[c(1.5, 0.0), c(0.0, 0.0)]]);
        let r = roundtrip(&s, MmField::Real, MmSymmetry::SkewSymmetric);
        assert_eq!(r.matrix, s);
        assert_eq!(r.field, MmField::Real);
    }

    #[test]
    fn reads_symmetric_lower_triangle() {
        let text = "%%MatrixMarket matrix array real symmetric\n% comment\n2 2\n1\n2\n3\n";
        let r = read_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(r.matrix, ComplexMatrix::from_rows(&[&[c(1.0, 0.0), c(2.0, 0.0)], &[c(2.0, 0.0), c(3.0, 0.0)]]));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let short = "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n";
        assert!(matches!(read_matrix_market(short.as_bytes()), Err(BseError::Parse { line: 6, .. })));
        let bad = "%%MatrixMarket matrix array real general\n1 1\nabc\n";
        assert!(matches!(read_matrix_market(bad.as_bytes()), Err(BseError::Parse { line: 3, .. })));
        let coord = "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 1\n";
        assert!(matches!(read_matrix_market(coord.as_bytes()), Err(BseError::Parse { line: 1, .. })));
        let extra = "%%MatrixMarket matrix array real general\n1 1\n1\n2\n";
        assert!(read_matrix_market(extra.as_bytes()).is_err());
    }

    #[test]
    fn refuses_to_write_complex_as_real() {
        let m = ComplexMatrix::from_rows(&[&[c(1.0, 1.0)]]);
        assert!(write_matrix_market(Vec::new(), &m, MmField::Real, MmSymmetry::General).is_err());
    }

    #[test]
    fn eigenvalue_csv_roundtrip() {
        let v = vec![3.0f64.sqrt(), 1.0 / 3.0, -2.5e-17, -(3.0f64.sqrt())];
        let mut buf = Vec::new();
        write_eigenvalues(&mut buf, &v).unwrap();
        assert_eq!(read_eigenvalues(&buf[..]).unwrap(), v);
        assert_eq!(read_eigenvalues("1.5\n-1.5\n".as_bytes()).unwrap(), vec![1.5, -1.5]);
        assert!(read_eigenvalues("index,eigenvalue\n".as_bytes()).is_err());
    }
}
