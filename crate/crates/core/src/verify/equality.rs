use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Samples below this fraction of the maximum are outside the effective support.
pub const SUPPORT_FLOOR: f64 = 1e-12;

/// Minimum number of support points for a fit.
pub const MIN_SUPPORT: usize = 8;

/// Weighted quadratic fit of `ln f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub is_gaussian: bool,
    /// `−1/(2b)` for the fitted `ln f = b x² + c x + d`; infinite when `b ≥ 0`.
    pub fitted_variance: f64,
    pub fitted_mean: f64,
    /// `f`-weighted RMS of the log residual.
    pub fit_residual: f64,
}

/// Decides Gaussianity with the default residual threshold `1e-4`.
pub fn equality_case_detect(f: &GridFunction) -> Result<GaussianFit> {
    equality_case_detect_with(f, 1e-4)
}

pub fn equality_case_detect_with(f: &GridFunction, threshold: f64) -> Result<GaussianFit> {
    let cut = SUPPORT_FLOOR * f.max();
    let pts: Vec<(f64, f64, f64)> = f
        .samples()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= cut && v > 0.0)
        .map(|(i, &v)| (f.grid().x(i), v.ln(), v))
        .collect();
    if pts.len() < MIN_SUPPORT {
        return Err(Error::DegenerateSupport {
            found: pts.len(),
            needed: MIN_SUPPORT,
        });
    }
    let wsum: f64 = pts.iter().map(|p| p.2).sum();
    let xbar = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / wsum;
    let spread = (pts.iter().map(|p| p.2 * (p.0 - xbar).powi(2)).sum::<f64>() / wsum)
        .sqrt()
        .max(f.grid().dx());

    // Normal equations in z = (x − x̄)/s for y = c0 + c1 z + c2 z².
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for &(x, y, w) in &pts {
        let z = (x - xbar) / spread;
        let basis = [1.0, z, z * z];
        for a in 0..3 {
            rhs[a] += w * basis[a] * y;
            for b in 0..3 {
                m[a][b] += w * basis[a] * basis[b];
            }
        }
    }
    let c = solve3(m, rhs).ok_or(Error::DegenerateSupport {
        found: pts.len(),
        needed: MIN_SUPPORT,
    })?;
    let ss: f64 = pts
        .iter()
        .map(|&(x, y, w)| {
            let z = (x - xbar) / spread;
            let r = y - (c[0] + c[1] * z + c[2] * z * z);
            w * r * r
        })
        .sum();
    let residual = (ss / wsum).sqrt();
    let b = c[2] / (spread * spread);
    let (variance, mean) = if b < 0.0 {
        (-1.0 / (2.0 * b), xbar - c[1] * spread / (2.0 * c[2]))
    } else {
        (f64::INFINITY, xbar)
    };
    Ok(GaussianFit {
        is_gaussian: b < 0.0 && residual <= threshold,
        fitted_variance: variance,
        fitted_mean: mean,
        fit_residual: residual,
    })
}

fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        v.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            v[row] -= f * v[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (v[row] - s) / m[row][row];
    }
    Some(x)
}
