//! Matrix CSV: one line per row, comma separated, 17 significant digits,
//! no header.

use std::fmt::Write as _;

use nisvp_core::DenseMatrix;

pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_csv(a: &DenseMatrix) -> String {
    let mut out = String::new();
    for row in a.iter_rows() {
        let cells: Vec<String> = row.iter().map(|&x| format_value(x)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn from_csv(text: &str) -> Result<DenseMatrix, String> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .enumerate()
            .map(|(col, cell)| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("line {}, column {}: {e}", lineno + 1, col + 1))
            })
            .collect::<Result<Vec<f64>, String>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err("empty matrix file".into());
    }
    DenseMatrix::from_rows(&rows).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lossless_round_trip() {
        let a = DenseMatrix::from_rows(&[[0.1, 1.0 / 3.0], [2.0f64.sqrt(), 0.0], [1e-300, 123456.789]]).unwrap();
        let text = to_csv(&a);
        assert_eq!(text.lines().count(), 3);
        assert_eq!(from_csv(&text).unwrap(), a);
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_value(0.1), "1.0000000000000001e-1");
        assert_eq!(format_value(0.0), "0.0000000000000000e0");
    }

    #[test]
    fn rejects_ragged_and_garbage() {
        assert!(from_csv("1,2\n3\n").is_err());
        let err = from_csv("1,2\n3,x\n").unwrap_err();
        assert!(err.contains("line 2, column 2"), "{err}");
        assert!(from_csv("\n").is_err());
    }
}
