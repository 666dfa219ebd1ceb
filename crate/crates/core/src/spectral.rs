//! Continuous Fourier transform of grid samples on a zero-padded period.
//!
//! Coefficients approximate `f̂(k) = ∫ f(x) e^{-ikx} dx` at `k_m = 2πm/(P·dx)`,
//! `P = 2·n_points`, stored in FFT order. Resampling under `x ↦ λx + c` is done
//! with a chirp-z transform whose phases are reduced in double-double
//! arithmetic, so accuracy does not degrade with the index range.

use std::cell::RefCell;
use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::grid::Grid;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft(buf: &mut [Complex64], inverse: bool) {
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        }
    });
    plan.process(buf);
}

/// Unevaluated sum `hi + lo`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn recip(x: f64) -> Dd {
        let hi = 1.0 / x;
        let lo = (-hi).mul_add(x, 1.0) / x;
        Dd { hi, lo }
    }

    /// Exact when `s` is a power of two.
    fn scale(self, s: f64) -> Dd {
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    fn mul_f64(self, b: f64) -> Dd {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p) + self.lo * b;
        let hi = p + e;
        Dd {
            hi,
            lo: e - (hi - p),
        }
    }
}

/// Fractional part of `n·c`, in [-1/2, 1/2]. `n` must be an exactly represented integer.
fn frac_mul(n: f64, c: Dd) -> f64 {
    let p = n * c.hi;
    let e = n.mul_add(c.hi, -p);
    let r = p - p.round();
    let f = r + (e + n * c.lo);
    f - f.round()
}

fn cis_turns(turns: f64) -> Complex64 {
    let (s, c) = (2.0 * PI * turns).sin_cos();
    Complex64::new(c, s)
}

fn signed_index(i: usize, period: usize) -> i64 {
    if i < period / 2 {
        i as i64
    } else {
        i as i64 - period as i64
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    fn period(grid: &Grid) -> usize {
        2 * grid.n_points()
    }

    /// Wavenumber of the coefficient stored at FFT index `i`.
    pub fn wavenumber(&self, i: usize) -> f64 {
        let p = self.coeffs.len();
        2.0 * PI * signed_index(i, p) as f64 / (p as f64 * self.grid.dx())
    }

    pub fn analyze(grid: &Grid, samples: &[f64]) -> Spectrum {
        Spectrum::analyze_affine(grid, samples, 1.0, 0.0)
    }

    /// Spectrum of `U(x) = λ·f(λx + c)` where `f` is given by its samples.
    pub fn analyze_affine(grid: &Grid, samples: &[f64], lambda: f64, c: f64) -> Spectrum {
        debug_assert_eq!(samples.len(), grid.n_points());
        debug_assert!(lambda > 0.0);
        let n = grid.n_points();
        let p = Spectrum::period(grid);
        let dx = grid.dx();
        let s = (c - grid.x_min()) / dx;

        let mut coeffs = vec![Complex64::new(0.0, 0.0); p];
        if lambda == 1.0 {
            let mut buf: Vec<Complex64> = samples
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
                .take(p)
                .collect();
            fft(&mut buf, false);
            let sp = Dd::from_f64(s).scale(1.0 / p as f64);
            for (i, z) in buf.into_iter().enumerate() {
                let m = signed_index(i, p) as f64;
                coeffs[i] = z * cis_turns(frac_mul(m, sp)) * dx;
            }
            return Spectrum {
                grid: *grid,
                coeffs,
            };
        }

        // X_m = Σ_j f_j e^{-2πi w m j}, w = 1/(Pλ), m = m0 + l, l ∈ [0, P).
        let w = Dd::recip(lambda).scale(1.0 / p as f64);
        let half_w = w.scale(0.5);
        let m0 = -((p / 2) as f64);
        let len = (n + p - 1).next_power_of_two();
        let zero = Complex64::new(0.0, 0.0);

        let mut y = vec![zero; len];
        for (j, &v) in samples.iter().enumerate() {
            if v != 0.0 {
                let jf = j as f64;
                let turns = frac_mul(m0 * jf, w) + frac_mul(jf * jf, half_w);
                y[j] = cis_turns(-turns) * v;
            }
        }
        let mut chirp = vec![zero; len];
        for (k, slot) in chirp.iter_mut().enumerate().take(p) {
            let kf = k as f64;
            *slot = cis_turns(frac_mul(kf * kf, half_w));
        }
        for k in 1..n {
            let kf = k as f64;
            chirp[len - k] = cis_turns(frac_mul(kf * kf, half_w));
        }
        fft(&mut y, false);
        fft(&mut chirp, false);
        for (a, b) in y.iter_mut().zip(&chirp) {
            *a *= b;
        }
        fft(&mut y, true);

        let ws = w.mul_f64(s);
        let norm = dx / len as f64;
        for (l, &z) in y.iter().enumerate().take(p) {
            let lf = l as f64;
            let m = m0 + lf;
            let turns = frac_mul(m, ws) - frac_mul(lf * lf, half_w);
            let idx = if m < 0.0 { (m as i64 + p as i64) as usize } else { m as usize };
            // Source frequency m/λ beyond Nyquist would alias back; f is band-limited.
            if m.abs() / lambda < (p / 2) as f64 {
                coeffs[idx] = z * cis_turns(turns) * norm;
            }
        }
        Spectrum {
            grid: *grid,
            coeffs,
        }
    }

    /// Samples on the grid of the inverse transform.
    pub fn synthesize(&self) -> Vec<f64> {
        let p = self.coeffs.len();
        let dx = self.grid.dx();
        let s0 = Dd::from_f64(self.grid.x_min() / dx).scale(1.0 / p as f64);
        let mut buf: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &z)| z * cis_turns(frac_mul(signed_index(i, p) as f64, s0)))
            .collect();
        fft(&mut buf, true);
        let norm = 1.0 / (p as f64 * dx);
        buf.iter()
            .take(self.grid.n_points())
            .map(|z| z.re * norm)
            .collect()
    }

    /// Total integral `f̂(0)`.
    pub fn mass(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn times(&self, other: &Spectrum) -> Spectrum {
        Spectrum {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    /// Multiplies by `exp(-a·k²)`: the heat kernel of variance `2a`.
    pub fn heat(&self, a: f64) -> Spectrum {
        let mut out = self.clone();
        if a != 0.0 {
            for i in 0..out.coeffs.len() {
                let k = self.wavenumber(i);
                out.coeffs[i] *= (-a * k * k).exp();
            }
        }
        out
    }

    /// Multiplies by `ik`; the unpaired Nyquist coefficient is dropped.
    pub fn derivative(&self) -> Spectrum {
        let p = self.coeffs.len();
        let mut out = self.clone();
        for i in 0..p {
            out.coeffs[i] = if i == p / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                self.coeffs[i] * Complex64::new(0.0, self.wavenumber(i))
            };
        }
        out
    }
}
