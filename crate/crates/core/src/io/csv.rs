//! CSV with 17-significant-digit floats (lossless for `f64`).

use nalgebra::DMatrix;

use crate::error::{NsfError, Result};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Matrix rows as CSV lines.
pub fn matrix_csv(m: &DMatrix<f64>) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt_f64(m[(i, j)])).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Row-major slice of an `nx x ny` matrix as CSV.
pub fn slab_csv(values: &[f64], ny: usize) -> String {
    let mut s = String::new();
    for row in values.chunks(ny.max(1)) {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn parse_matrix_csv(text: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| NsfError::Parse { line: i + 1, msg: e.to_string() }))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(NsfError::Format("ragged CSV matrix".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lossless() {
        let m = DMatrix::from_fn(3, 4, |i, j| ((i * 7 + j) as f64).exp().sin() / 3.0 + 1e-310 * j as f64);
        let back = parse_matrix_csv(&matrix_csv(&m)).unwrap();
        assert!(m.iter().zip(back.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert_eq!(slab_csv(&[1.0, 2.0, 3.0, 4.0], 2), matrix_csv(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0])));
    }
}
