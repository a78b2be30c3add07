//! Naive triple-loop JSA quadrature.

use std::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Gaussian,
    Lorentzian,
}

/// Pump line by centre angular frequency and power-spectrum FWHM. Overall
/// scale is irrelevant since every result is normalized.
#[derive(Debug, Clone, Copy)]
pub struct Line {
    pub center: f64,
    pub fwhm: f64,
    pub shape: Shape,
    pub amplitude: Complex64,
}

impl Line {
    pub fn at(&self, w: f64) -> Complex64 {
        let d = w - self.center;
        match self.shape {
            Shape::Gaussian => {
                // |α|² = exp(−4 ln2 d²/fwhm²)
                let e = (-2.0 * 2f64.ln() * d * d / (self.fwhm * self.fwhm)).exp();
                self.amplitude * e
            }
            Shape::Lorentzian => {
                let g = self.fwhm / 2.0;
                self.amplitude * Complex64::new(g * g, g * d) / (g * g + d * d)
            }
        }
    }
}

/// Cavity line with amplitude (Γ/2)/(Γ/2 − i(ω − ωr)), Γ = ωr/Q.
#[derive(Debug, Clone, Copy)]
pub struct Resonance {
    pub center: f64,
    pub q: f64,
}

impl Resonance {
    pub fn at(&self, w: f64) -> Complex64 {
        let h = self.center / self.q / 2.0;
        let d = w - self.center;
        Complex64::new(h * h, h * d) / (h * h + d * d)
    }
}

/// Propagation constant from its Taylor coefficients about `w0`.
pub fn k(betas: &[f64], w0: f64, w: f64) -> f64 {
    let d = w - w0;
    let mut total = 0.0;
    let mut fact = 1.0;
    for (n, b) in betas.iter().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        total += b * d.powi(n as i32) / fact;
    }
    total
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

fn normalize(mut f: Vec<Vec<Complex64>>, dw: f64) -> Vec<Vec<Complex64>> {
    let norm: f64 = f.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>() * dw * dw;
    let s = 1.0 / norm.sqrt();
    for row in &mut f {
        for v in row {
            *v *= s;
        }
    }
    f
}

/// F(ωs, ωi) = Σ_m w_m α(ω_m) β(ωs+ωi−ω_m) e^{ix} sinc x, x = ΔkL/2, normalized.
///
/// `nodes` holds (ω_m, w_m) pairs; `points` is the common signal/idler axis.
pub fn waveguide_jsa(
    points: &[f64],
    nodes: &[(f64, f64)],
    p1: &Line,
    p2: &Line,
    betas: &[f64],
    w0: f64,
    length: f64,
) -> Vec<Vec<Complex64>> {
    let mut f = vec![vec![Complex64::new(0.0, 0.0); points.len()]; points.len()];
    for (j, &ws) in points.iter().enumerate() {
        for (l, &wi) in points.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(w, weight) in nodes {
                let w2 = ws + wi - w;
                let dk = k(betas, w0, ws) + k(betas, w0, wi) - k(betas, w0, w) - k(betas, w0, w2);
                let x = dk * length / 2.0;
                let phi = Complex64::new(x.cos(), x.sin()) * sinc(x);
                acc += p1.at(w) * p2.at(w2) * phi * weight;
            }
            f[j][l] = acc;
        }
    }
    normalize(f, points[1] - points[0])
}

/// l(ωs) l(ωi) Σ_m w_m α(ω_m) l₁(ω_m) β(ωs+ωi−ω_m) l₂(ωs+ωi−ω_m), normalized.
pub fn ring_jsa(
    points: &[f64],
    nodes: &[(f64, f64)],
    p1: &Line,
    p2: &Line,
    pair: &Resonance,
    r1: &Resonance,
    r2: &Resonance,
) -> Vec<Vec<Complex64>> {
    let mut f = vec![vec![Complex64::new(0.0, 0.0); points.len()]; points.len()];
    for (j, &ws) in points.iter().enumerate() {
        for (l, &wi) in points.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(w, weight) in nodes {
                let w2 = ws + wi - w;
                acc += p1.at(w) * r1.at(w) * p2.at(w2) * r2.at(w2) * weight;
            }
            f[j][l] = acc * pair.at(ws) * pair.at(wi);
        }
    }
    normalize(f, points[1] - points[0])
}

/// Trapezoid nodes on `n` equally spaced points over [a, b].
pub fn trapezoid(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|m| {
            let w = if m == 0 || m == n - 1 { h / 2.0 } else { h };
            (a + m as f64 * h, w)
        })
        .collect()
}

/// Gaussian with power FWHM `fwhm`, used to sanity-check the line shape.
pub fn gaussian_power(d: f64, fwhm: f64) -> f64 {
    let sigma = fwhm / (2.0 * (2.0 * 2f64.ln()).sqrt());
    (-d * d / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma).sqrt()
}
