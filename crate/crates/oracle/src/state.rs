//! Explicit two-photon state evolution through linear optics.
//!
//! The state Σ A[x][y] a†ₓ a†ᵧ |0⟩ is stored as a dense symmetric amplitude
//! matrix over composite (spatial mode, frequency bin) indices. Components
//! act on creation operators as a†ₘ → Σₙ U[n][m] a†ₙ, independent of frequency.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

type Matrix = Vec<Vec<Complex64>>;

fn zero(n: usize) -> Matrix {
    vec![vec![Complex64::new(0.0, 0.0); n]; n]
}

fn identity(n: usize) -> Matrix {
    let mut u = zero(n);
    for (i, row) in u.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    u
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut c = zero(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// Phase e^{iφ} on mode `m`.
pub fn phase(modes: usize, m: usize, phi: f64) -> Matrix {
    let mut u = identity(modes);
    u[m][m] = Complex64::from_polar(1.0, phi);
    u
}

/// 2×2 coupler on modes (a, b): a† → (a† + i b†)/√2, b† → (b† + i a†)/√2.
pub fn coupler(modes: usize, a: usize, b: usize) -> Matrix {
    let mut u = identity(modes);
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let t = Complex64::new(0.0, FRAC_1_SQRT_2);
    u[a][a] = r;
    u[b][b] = r;
    u[b][a] = t;
    u[a][b] = t;
    u
}

#[derive(Debug, Clone)]
pub struct TwoPhotonState {
    modes: usize,
    bins: usize,
    amp: Matrix,
}

impl TwoPhotonState {
    /// Superposition of pairs, one term per (mode, JSA) entry; each JSA is a
    /// bins×bins matrix.
    pub fn from_sources(modes: usize, sources: &[(usize, &Matrix)]) -> Self {
        let bins = sources[0].1.len();
        let mut amp = zero(modes * bins);
        for &(m, f) in sources {
            for k in 0..bins {
                for q in 0..bins {
                    amp[m * bins + k][m * bins + q] += f[k][q];
                }
            }
        }
        Self { modes, bins, amp }
    }

    /// Applies a mode transformation to both photons.
    pub fn apply(&mut self, u: &Matrix) {
        let n = self.modes * self.bins;
        let mut big = zero(n);
        for a in 0..self.modes {
            for b in 0..self.modes {
                for k in 0..self.bins {
                    big[a * self.bins + k][b * self.bins + k] = u[a][b];
                }
            }
        }
        let mut big_t = zero(n);
        for i in 0..n {
            for j in 0..n {
                big_t[i][j] = big[j][i];
            }
        }
        self.amp = matmul(&matmul(&big, &self.amp), &big_t);
    }

    fn symmetric(&self, x: usize, y: usize) -> Complex64 {
        0.5 * (self.amp[x][y] + self.amp[y][x])
    }

    /// ⟨ψ|ψ⟩ = 2 Σ |A_sym|².
    pub fn norm_sqr(&self) -> f64 {
        let n = self.modes * self.bins;
        let mut s = 0.0;
        for x in 0..n {
            for y in 0..n {
                s += self.symmetric(x, y).norm_sqr();
            }
        }
        2.0 * s
    }

    /// Probability of one photon in mode `j` and one in mode `l` (j ≠ l).
    pub fn coincidence(&self, j: usize, l: usize) -> f64 {
        assert_ne!(j, l);
        let mut s = 0.0;
        for k in 0..self.bins {
            for q in 0..self.bins {
                s += (2.0 * self.symmetric(j * self.bins + k, l * self.bins + q)).norm_sqr();
            }
        }
        s / self.norm_sqr()
    }

    /// Probability that both photons leave in mode `j`.
    pub fn bunched(&self, j: usize) -> f64 {
        let mut s = 0.0;
        for k in 0..self.bins {
            for q in 0..self.bins {
                s += self.symmetric(j * self.bins + k, j * self.bins + q).norm_sqr();
            }
        }
        2.0 * s / self.norm_sqr()
    }
}

/// Reverse-HOM circuit: sources in modes 0 and 1, phase φ on mode 0, then a 2×2 coupler.
pub fn reverse_hom(f1: &Matrix, f2: &Matrix, phi: f64) -> TwoPhotonState {
    let mut s = TwoPhotonState::from_sources(2, &[(0, f1), (1, f2)]);
    s.apply(&phase(2, 0, phi));
    s.apply(&coupler(2, 0, 1));
    s
}

/// Two-MZI circuit over modes 0..4 (channels 1..4): the reverse-HOM section
/// with phase φ1, taps a₁ → (a₁ + a₃)/√2 and a₂ → (a₄ + a₂)/√2, then an MZI
/// on modes (3, 4) with phase φ2 on mode 3 between two couplers.
pub fn two_mzi(f1: &Matrix, f2: &Matrix, phi1: f64, phi2: f64) -> TwoPhotonState {
    let mut s = TwoPhotonState::from_sources(4, &[(0, f1), (1, f2)]);
    s.apply(&phase(4, 0, phi1));
    s.apply(&coupler(4, 0, 1));
    let mut tap = zero(4);
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    tap[0][0] = h;
    tap[2][0] = h;
    tap[1][1] = h;
    tap[3][1] = h;
    s.apply(&tap);
    s.apply(&coupler(4, 2, 3));
    s.apply(&phase(4, 2, phi2));
    s.apply(&coupler(4, 2, 3));
    s
}
