//! Graph Fourier transform, orthonormal 1-D DCT and uniform scalar
//! quantisation.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{cos, round_half_away, sqrt};
use crate::spectral::EigenBasis;

/// Forward GFT `U^T f`.
pub fn gft(basis: &EigenBasis, f: &[f64]) -> Result<Vec<f64>> {
    let n = basis.dim();
    if f.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: f.len() });
    }
    Ok((0..n).map(|k| basis.column(k).iter().zip(f).map(|(u, x)| u * x).sum()).collect())
}

/// Inverse GFT `U c`.
pub fn igft(basis: &EigenBasis, coeffs: &[f64]) -> Result<Vec<f64>> {
    let n = basis.dim();
    if coeffs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: coeffs.len() });
    }
    let mut out = vec![0.0; n];
    for (k, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for (o, u) in out.iter_mut().zip(basis.column(k)) {
            *o += c * u;
        }
    }
    Ok(out)
}

/// Orthonormal DCT-II.
pub fn dct1d(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::invalid("DCT of an empty vector"));
    }
    let table = cosine_table(n);
    Ok((0..n)
        .map(|k| {
            let s: f64 = x.iter().enumerate().map(|(i, v)| v * table[(2 * i + 1) * k % (4 * n)]).sum();
            s * dct_scale(k, n)
        })
        .collect())
}

/// Orthonormal DCT-III, the inverse of [`dct1d`].
pub fn idct1d(c: &[f64]) -> Result<Vec<f64>> {
    let n = c.len();
    if n == 0 {
        return Err(Error::invalid("DCT of an empty vector"));
    }
    let table = cosine_table(n);
    Ok((0..n)
        .map(|i| c.iter().enumerate().map(|(k, v)| v * dct_scale(k, n) * table[(2 * i + 1) * k % (4 * n)]).sum())
        .collect())
}

/// `cos(pi * m / (2n))` for `m` in `0..4n`.
fn cosine_table(n: usize) -> Vec<f64> {
    (0..4 * n).map(|m| cos(core::f64::consts::PI * m as f64 / (2 * n) as f64)).collect()
}

#[inline]
fn dct_scale(k: usize, n: usize) -> f64 {
    if k == 0 {
        sqrt(1.0 / n as f64)
    } else {
        sqrt(2.0 / n as f64)
    }
}

/// Quantisation levels with their step.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedVector {
    pub levels: Vec<i64>,
    pub step: f64,
}

/// `round_half_away(x / q)` for every element.
pub fn quantize(x: &[f64], step: f64) -> Result<QuantizedVector> {
    check_step(step)?;
    Ok(QuantizedVector { levels: x.iter().map(|&v| quantize_value(v, step)).collect(), step })
}

pub fn dequantize(q: &QuantizedVector) -> Vec<f64> {
    q.levels.iter().map(|&l| l as f64 * q.step).collect()
}

#[inline]
pub fn quantize_value(x: f64, step: f64) -> i64 {
    round_half_away(x / step) as i64
}

pub(crate) fn check_step(step: f64) -> Result<()> {
    if step > 0.0 && step.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("quantiser step must be positive"))
    }
}
