//! Builder, purity and fringe results compared against the brute-force oracle.
//! Each check returns the worst deviation found.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sfwm_core::dispersion::DispersionModel;
use sfwm_core::fringes::{reverse_hom_coincidence, two_mzi_coincidences, ChannelPair};
use sfwm_core::jsa::{build_ring_jsa, build_waveguide_jsa, JointSpectralAmplitude, PumpQuadrature, RingSource};
use sfwm_core::schmidt::{jsa_overlap, purity};
use sfwm_core::spectral::{make_grid, FilterSpec, FrequencyGrid, LineShape, PumpLine};
use sfwm_oracle::quadrature::{self, Line, Resonance, Shape};
use sfwm_oracle::{purity_quadruple_sum, state};

const NM: f64 = 1e-9;
const C: f64 = 299_792_458.0;

fn omega(lambda: f64) -> f64 {
    2.0 * std::f64::consts::PI * C / lambda
}

fn oracle_line(p: &PumpLine) -> Line {
    Line {
        center: omega(p.center_wavelength()),
        fwhm: p.linewidth_fwhm(),
        shape: match p.shape() {
            LineShape::Gaussian => Shape::Gaussian,
            LineShape::Lorentzian => Shape::Lorentzian,
        },
        amplitude: p.relative_amplitude(),
    }
}

fn max_weighted_difference(jsa: &JointSpectralAmplitude, reference: &[Vec<Complex64>]) -> f64 {
    let dw = jsa.grid_s().step();
    let mut worst = 0.0f64;
    for (j, row) in reference.iter().enumerate() {
        for (k, r) in row.iter().enumerate() {
            worst = worst.max((jsa.values()[(j, k)] - r).norm() * dw);
        }
    }
    worst
}

fn small_quadrature() -> PumpQuadrature {
    PumpQuadrature {
        points_per_fwhm: 8.0,
        half_span_fwhm: Some(1.25),
    }
}

/// Max |ΔF|·dω of the waveguide builder over three dispersion cases.
pub fn waveguide_builder_error() -> f64 {
    let fwhm = 2.0 * std::f64::consts::PI * 50e9;
    let p1 = PumpLine::gaussian(1544.08 * NM, fwhm).unwrap();
    let p2 = PumpLine::new(1556.18 * NM, fwhm, LineShape::Gaussian, Complex64::from_polar(0.7, 0.4)).unwrap();
    let w1 = omega(1544.08 * NM);
    let w2 = omega(1556.18 * NM);
    let w0 = 0.5 * (w1 + w2);
    let half = 0.5 * (w1 - w2);

    let a = -2e-22;
    let matched = vec![
        0.0,
        0.0,
        a,
        0.0,
        -24.0 * a / (half * half),
        0.0,
        360.0 * a / half.powi(4),
    ];
    let generic = vec![1.1e7, 4.2e-8, -2e-24, 3e-38];
    let grid = make_grid(1550.12 * NM, 1.0 * NM, 11).unwrap();
    let points: Vec<f64> = (0..11).map(|k| grid.point(k)).collect();
    let nodes = quadrature::trapezoid(w1 - 1.25 * fwhm, w1 + 1.25 * fwhm, 21);

    let mut worst = 0.0f64;
    for (betas, length) in [(matched, 0.015), (generic.clone(), 0.015), (generic, 0.0)] {
        let model = DispersionModel::new(w0, betas.clone()).unwrap();
        let jsa = build_waveguide_jsa(&p1, &p2, &model, length, &grid, &small_quadrature()).unwrap();
        let reference = quadrature::waveguide_jsa(
            &points,
            &nodes,
            &oracle_line(&p1),
            &oracle_line(&p2),
            &betas,
            w0,
            length,
        );
        worst = worst.max(max_weighted_difference(&jsa, &reference));
    }
    worst
}

/// Max |ΔF|·dω of the ring builder for Gaussian and Lorentzian pumps.
pub fn ring_builder_error() -> f64 {
    let fwhm = 2.0 * std::f64::consts::PI * 40e9;
    let mut worst = 0.0f64;
    for shape in [LineShape::Gaussian, LineShape::Lorentzian] {
        let p1 = PumpLine::new(1543.78 * NM, fwhm, shape, Complex64::new(1.0, 0.0)).unwrap();
        let p2 = PumpLine::new(1556.53 * NM, fwhm, shape, Complex64::new(1.0, 0.0)).unwrap();
        let q = 3e4;
        let ring = RingSource::new(q, 3.2 * NM, None).unwrap();
        let grid = make_grid(1550.15 * NM, 0.4 * NM, 15).unwrap();
        let quad = PumpQuadrature {
            points_per_fwhm: 8.0,
            half_span_fwhm: Some(2.0),
        };
        let jsa = build_ring_jsa(&p1, &p2, &ring, &grid, &quad).unwrap();

        // Independent comb: anchor at the mean pump frequency, FSR converted at the anchor.
        let w1 = omega(1543.78 * NM);
        let w2 = omega(1556.53 * NM);
        let anchor = 0.5 * (w1 + w2);
        let lam = 2.0 * std::f64::consts::PI * C / anchor;
        let fsr = 2.0 * std::f64::consts::PI * C * 3.2 * NM / (lam * lam);
        let pair = Resonance { center: anchor, q };
        let r1 = Resonance {
            center: anchor + ((w1 - anchor) / fsr).round() * fsr,
            q,
        };
        let r2 = Resonance {
            center: anchor + ((w2 - anchor) / fsr).round() * fsr,
            q,
        };
        let step_target = fwhm.min(r1.center / q).min(r2.center / q) / 8.0;
        let intervals = (4.0 * fwhm / step_target).ceil() as usize;
        let nodes = quadrature::trapezoid(w1 - 2.0 * fwhm, w1 + 2.0 * fwhm, intervals + 1);

        let points: Vec<f64> = (0..15).map(|k| grid.point(k)).collect();
        let reference = quadrature::ring_jsa(&points, &nodes, &oracle_line(&p1), &oracle_line(&p2), &pair, &r1, &r2);
        worst = worst.max(max_weighted_difference(&jsa, &reference));
    }
    worst
}

fn random_jsa(rng: &mut ChaCha8Rng, ns: usize, ni: usize) -> JointSpectralAmplitude {
    let gs = FrequencyGrid::new(1.2e15, 1.2e15 + 1e12, ns).unwrap();
    let gi = FrequencyGrid::new(1.21e15, 1.21e15 + 2e12, ni).unwrap();
    let values = DMatrix::from_fn(ns, ni, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    JointSpectralAmplitude::from_values(gs, gi, values)
        .unwrap()
        .normalized()
        .unwrap()
}

/// Max |ΔP| between SVD purity and the quadruple sum over `draws` random JSAs up to 15×15.
pub fn svd_purity_error(draws: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let ns = rng.random_range(2..=15);
        let ni = rng.random_range(2..=15);
        let jsa = random_jsa(&mut rng, ns, ni);
        let rows: Vec<Vec<Complex64>> = (0..ns)
            .map(|j| (0..ni).map(|k| jsa.values()[(j, k)]).collect())
            .collect();
        let reference = purity_quadruple_sum(&rows, jsa.grid_s().step(), jsa.grid_i().step());
        worst = worst.max((purity(&jsa).unwrap() - reference).abs());
    }
    worst
}

#[allow(clippy::needless_range_loop)]
fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<Complex64>> {
    let mut f = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for j in 0..n {
        for k in j..n {
            let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            f[j][k] = v;
            f[k][j] = v;
        }
    }
    let norm: f64 = f.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    f.iter().map(|r| r.iter().map(|v| v / norm).collect()).collect()
}

fn to_jsa(f: &[Vec<Complex64>]) -> JointSpectralAmplitude {
    let n = f.len();
    let g = FrequencyGrid::new(1.2e15, 1.2e15 + 2e11, n).unwrap();
    JointSpectralAmplitude::from_values(g, g, DMatrix::from_fn(n, n, |j, k| f[j][k]))
        .unwrap()
        .normalized()
        .unwrap()
}

/// Max deviation of the closed-form reverse-HOM and two-MZI coincidences from
/// state evolution over a 3-frequency basis.
pub fn fringe_closed_form_error(draws: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let all = FilterSpec::all_pass();
    let pairs = [
        (ChannelPair::P12, 0, 1),
        (ChannelPair::P13, 0, 2),
        (ChannelPair::P14, 0, 3),
        (ChannelPair::P23, 1, 2),
        (ChannelPair::P24, 1, 3),
        (ChannelPair::P34, 2, 3),
    ];
    for _ in 0..draws {
        let f1 = random_symmetric(&mut rng, 3);
        let f2 = random_symmetric(&mut rng, 3);
        let o = jsa_overlap(&to_jsa(&f1), &to_jsa(&f2), &all, &all).unwrap();
        let phi1 = rng.random_range(-4.0..4.0);
        let phi2 = rng.random_range(-4.0..4.0);

        let hom = state::reverse_hom(&f1, &f2, phi1);
        let closed = reverse_hom_coincidence(o.magnitude, o.phase, phi1).unwrap();
        worst = worst.max((hom.coincidence(0, 1) - closed).abs());

        let s = state::two_mzi(&f1, &f2, phi1, phi2);
        let closed = two_mzi_coincidences(o.magnitude, o.phase, phi1, phi2).unwrap();
        for (pair, a, b) in pairs {
            worst = worst.max((s.coincidence(a, b) - closed.get(pair)).abs());
        }
    }
    worst
}
