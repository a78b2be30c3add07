//! Brute-force reference computations for cross-checking `sfwm-core`.
//!
//! Everything here is written directly from the defining sums with nested
//! loops and no shared code with the main crate. It is slow on purpose and
//! only meant for small grids.

use num_complex::Complex64;

pub mod quadrature;
pub mod state;

/// Σ_{j,k,l,m} F_jk F̄_lk F_lm F̄_jm (dωs dωi)² for a normalized JSA given as
/// rows of signal samples.
pub fn purity_quadruple_sum(f: &[Vec<Complex64>], ds: f64, di: f64) -> f64 {
    let n = f.len();
    let m = f[0].len();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for l in 0..n {
            for k in 0..m {
                for q in 0..m {
                    acc += f[j][k] * f[l][k].conj() * f[l][q] * f[j][q].conj();
                }
            }
        }
    }
    (acc * (ds * di) * (ds * di)).re
}
