//! Small complex-matrix helpers shared across the crate.
//!
//! Everything operates on dynamically sized `nalgebra` matrices over
//! `Complex<f64>`. Norms are measured as the maximum absolute entry: all
//! algebra checks in this crate compare against exact zeros or identities,
//! so a basis-stable entrywise norm is the right yardstick.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used for coins, representations and oracles.
pub type CMatrix = DMatrix<Complex64>;

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Maximum absolute entry of a matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, c| acc.max(c.norm()))
}

/// `max_abs(a - b)` without materializing the difference twice.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Deviation from the identity, `max_abs(m - I)`.
pub fn identity_residual(m: &CMatrix) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { ONE } else { Complex64::ZERO };
            worst = worst.max((m[(i, j)] - target).norm());
        }
    }
    worst
}

/// Deviation from Hermiticity, `max_abs(m - m†)`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Deviation from unitarity, `max(‖m†m - I‖, ‖mm† - I‖)`.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let left = identity_residual(&(m.adjoint() * m));
    let right = identity_residual(&(m * m.adjoint()));
    left.max(right)
}

/// Anticommutator `{a, b} = ab + ba`.
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

/// Require a square matrix of dimension `d`.
pub fn expect_square(m: &CMatrix, d: usize, what: &str) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be {d}x{d}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Format a matrix in the plain-text exchange format: one row per line,
/// entries written as `re+imi` pairs separated by single spaces.
pub fn format_matrix(m: &CMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_complex(m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn format_complex(c: Complex64) -> String {
    if c.im.is_sign_negative() {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

/// Parse a single `re+imi` token. Accepts plain reals (`1.5`, `-2`),
/// pure imaginaries (`2i`, `-0.5i`, `i`) and full pairs (`1-2e-3i`).
pub fn parse_complex(token: &str) -> std::result::Result<Complex64, String> {
    let t = token.trim();
    if t.is_empty() {
        return Err("empty entry".into());
    }
    if let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('I')) {
        // Split off the imaginary part at the last sign that is not an
        // exponent sign and not the leading sign.
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let c = bytes[idx] as char;
            if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
                split = Some(idx);
                break;
            }
        }
        match split {
            Some(idx) => {
                let re: f64 = body[..idx]
                    .parse()
                    .map_err(|_| format!("bad real part in `{t}`"))?;
                let im_str = &body[idx..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str
                        .parse()
                        .map_err(|_| format!("bad imaginary part in `{t}`"))?
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = if body.is_empty() {
                    1.0
                } else if body == "-" {
                    -1.0
                } else {
                    body.parse()
                        .map_err(|_| format!("bad imaginary part in `{t}`"))?
                };
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = t.parse().map_err(|_| format!("bad real number `{t}`"))?;
        Ok(Complex64::new(re, 0.0))
    }
}

/// Parse one matrix from lines of whitespace-separated `re+imi` entries.
pub fn parse_matrix(lines: &[&str]) -> std::result::Result<CMatrix, String> {
    let rows: Vec<Vec<Complex64>> = lines
        .iter()
        .map(|line| {
            line.split_whitespace()
                .map(parse_complex)
                .collect::<std::result::Result<Vec<_>, _>>()
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let n = rows.len();
    if n == 0 {
        return Err("empty matrix block".into());
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(format!("matrix block is not square ({n} rows)"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}
