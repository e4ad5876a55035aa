//! Fourier analysis on finite abelian groups and the spectral route to the
//! `U(2)` norm, its dual, and the `A(2)` (Wiener) norm.
//!
//! The transform is normalized as an average:
//! `fhat(xi) = E_x f(x) conj(chi_xi(x))` with
//! `chi_xi(x) = exp(2 pi i sum_j x_j xi_j / N_j)`. Frequencies are indexed by
//! the same mixed-radix flat indices as group elements.

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupFunction, GroupSpec};
use crate::norms::cubic_convolution;
use crate::numeric;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

/// The normalized Fourier coefficients of a real function.
#[derive(Clone, Debug)]
pub struct Spectrum {
    group: GroupSpec,
    coeffs: Vec<Complex<f64>>,
}

impl Spectrum {
    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn coeffs(&self) -> &[Complex<f64>] {
        &self.coeffs
    }

    pub fn get(&self, xi: GroupElement) -> Complex<f64> {
        self.coeffs[xi]
    }

    /// `sum_xi |fhat(xi)|^p` raised to `1/p`, the plain (unnormalized)
    /// little-`l^p` norm of the coefficient sequence.
    pub fn lp_coeff_norm(&self, p: f64) -> f64 {
        let terms: Vec<f64> = self.coeffs.iter().map(|c| c.norm().powf(p)).collect();
        numeric::sum(terms).powf(1.0 / p)
    }
}

/// Value of the character indexed by `xi` at the element `x`.
pub fn character_value(group: &GroupSpec, xi: GroupElement, x: GroupElement) -> Complex<f64> {
    let xc = group.to_tuple(x);
    let fc = group.to_tuple(xi);
    let mut phase = 0.0;
    for ((&xj, &fj), &nj) in xc.iter().zip(&fc).zip(group.orders()) {
        phase += (xj * fj) as f64 / nj as f64;
    }
    let theta = 2.0 * PI * phase;
    Complex::new(theta.cos(), theta.sin())
}

fn fft_axes(group: &GroupSpec, data: &mut [Complex<f64>], inverse: bool) {
    let mut planner = FftPlanner::new();
    let orders = group.orders();
    let k = orders.len();
    let mut stride = 1usize;
    let mut strides = vec![1usize; k];
    for i in (0..k).rev() {
        strides[i] = stride;
        stride *= orders[i];
    }
    let n = group.order();
    for axis in 0..k {
        let len = orders[axis];
        if len == 1 {
            continue;
        }
        let fft = if inverse {
            planner.plan_fft_inverse(len)
        } else {
            planner.plan_fft_forward(len)
        };
        let s = strides[axis];
        let mut line = vec![Complex::new(0.0, 0.0); len];
        let block = len * s;
        let mut base = 0;
        while base < n {
            for off in 0..s {
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + off + j * s];
                }
                fft.process(&mut line);
                for (j, &v) in line.iter().enumerate() {
                    data[base + off + j * s] = v;
                }
            }
            base += block;
        }
    }
}

/// Fast normalized transform (FFT along each cyclic factor).
pub fn dft(f: &GroupFunction) -> Spectrum {
    let group = f.group().clone();
    let n = group.order();
    let mut data: Vec<Complex<f64>> =
        f.values().iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_axes(&group, &mut data, false);
    let scale = 1.0 / n as f64;
    for c in &mut data {
        *c *= scale;
    }
    Spectrum { group, coeffs: data }
}

/// Direct `O(N^2)` transform kept as an oracle for [`dft`].
pub fn dft_direct(f: &GroupFunction) -> Spectrum {
    let group = f.group().clone();
    let n = group.order();
    let coeffs = (0..n)
        .map(|xi| {
            let mut re = numeric::CompensatedSum::new();
            let mut im = numeric::CompensatedSum::new();
            for x in 0..n {
                let chi = character_value(&group, xi, x).conj();
                re.add(f.get(x) * chi.re);
                im.add(f.get(x) * chi.im);
            }
            Complex::new(re.value() / n as f64, im.value() / n as f64)
        })
        .collect();
    Spectrum { group, coeffs }
}

/// Inverse transform; fails if the reconstruction has a non-negligible
/// imaginary part (i.e. the spectrum was not conjugate-symmetric).
pub fn idft(spectrum: &Spectrum) -> Result<GroupFunction> {
    let group = spectrum.group.clone();
    let mut data = spectrum.coeffs.clone();
    fft_axes(&group, &mut data, true);
    let scale: f64 = data.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    if data.iter().any(|c| c.im.abs() > 1e-9 * scale) {
        return Err(Error::Numerical(
            "inverse transform produced a complex function".into(),
        ));
    }
    GroupFunction::from_values(group, data.iter().map(|c| c.re).collect())
}

/// `||f||_{U(2)}` via the spectrum: the `l^4` norm of the coefficients.
pub fn u2_norm_spectral(f: &GroupFunction) -> f64 {
    dft(f).lp_coeff_norm(4.0)
}

/// `||f||_{U(2)*}` via the spectrum: the `l^{4/3}` norm of the coefficients.
pub fn u2_dual_norm_spectral(f: &GroupFunction) -> f64 {
    dft(f).lp_coeff_norm(4.0 / 3.0)
}

/// The `A(2)` (Wiener algebra) norm: `sum_xi |fhat(xi)|`.
pub fn a2_norm(f: &GroupFunction) -> f64 {
    dft(f).lp_coeff_norm(1.0)
}

/// Report of the spectral identity and coefficient bound for a cubic
/// convolution `g` of three functions on the 2-cube.
#[derive(Clone, Debug, Serialize)]
pub struct CubicBoundCheck {
    /// `sum_xi |ghat(xi)|^{2/3}`.
    pub lhs: f64,
    /// `prod_eps ||f_eps||_2^{2/3}`.
    pub rhs: f64,
    /// Largest deviation between `ghat(xi)` and
    /// `fhat_1(xi) fhat_2(xi) conj(fhat_3(xi))`.
    pub max_coeff_deviation: f64,
}

/// Verifies the spectral description of a 2-dimensional cubic convolution
/// `g(x) = E_t f1(x+t1) f2(x+t2) f3(x+t1+t2)` and evaluates the
/// `l^{2/3}` coefficient bound.
pub fn spectral_cubic_bound_check(
    f1: &GroupFunction,
    f2: &GroupFunction,
    f3: &GroupFunction,
) -> Result<CubicBoundCheck> {
    let g = cubic_convolution(&[f1.clone(), f2.clone(), f3.clone()])?;
    let ghat = dft(&g);
    let s1 = dft(f1);
    let s2 = dft(f2);
    let s3 = dft(f3);
    let mut max_dev = 0.0f64;
    let mut lhs_terms = Vec::with_capacity(ghat.coeffs.len());
    for xi in 0..ghat.coeffs.len() {
        let predicted = s1.get(xi) * s2.get(xi) * s3.get(xi).conj();
        max_dev = max_dev.max((ghat.get(xi) - predicted).norm());
        lhs_terms.push(ghat.get(xi).norm().powf(2.0 / 3.0));
    }
    let lhs = numeric::sum(lhs_terms);
    let rhs = (f1.lp_norm(2.0)? * f2.lp_norm(2.0)? * f3.lp_norm(2.0)?).powf(2.0 / 3.0);
    Ok(CubicBoundCheck { lhs, rhs, max_coeff_deviation: max_dev })
}
