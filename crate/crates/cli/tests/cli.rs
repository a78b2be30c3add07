use std::path::Path;
use std::process::Command as Process;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sfwm_cli::bundled;
use sfwm_cli::jsi_file::JsiFile;
use sfwm_cli::scenario::{
    Circuit, DispersionConfig, FilterConfig, FilterShape, FringeConfig, GridConfig, MeasuredConfig, Pair, PumpConfig,
    Scanned, Shape, SourceConfig, SqueezingConfig,
};
use sfwm_cli::{commands, main_with, Scenario};
use sfwm_core::jsa::jsi;
use sfwm_core::spectral::{fwhm, omega_to_wavelength};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["sfwm"];
    full.extend_from_slice(args);
    let code = main_with(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn report_value(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| {
            if let Some((k, v)) = l.strip_prefix("# ").and_then(|c| c.split_once('=')) {
                return (k == key).then(|| v.parse().unwrap());
            }
            let mut parts = l.split_whitespace();
            (parts.next() == Some(key)).then(|| parts.next().unwrap().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("no `{key}` in\n{report}"))
}

const L0_WAVEGUIDE: &str = r#"
[[pumps]]
wavelength_nm = 1544.08
linewidth_ghz = 50.0
[[pumps]]
wavelength_nm = 1556.18
linewidth_ghz = 50.0
[source]
kind = "waveguide"
length_mm = 0.0
[source.dispersion]
model = "taylor"
betas = [0.0]
[grid]
span_nm = 2.0
points = 41
"#;

#[test]
fn bundled_scenarios_carry_device_parameters() {
    let s = bundled::load("sipic1_waveguide_15mm").unwrap();
    assert_eq!(s.pumps[0].wavelength_nm, 1544.08);
    assert_eq!(s.pumps[1].wavelength_nm, 1556.18);
    assert!(matches!(s.source, SourceConfig::Waveguide { length_mm, .. } if length_mm == 15.0));
    let f = s.filter.as_ref().unwrap();
    assert_eq!((f.center_nm, f.bandwidth_nm), (1550.12, 0.8));

    let s = bundled::load("sipic2_ring").unwrap();
    assert!(matches!(s.source, SourceConfig::Ring { q, fsr_nm, .. } if q == 3e4 && fsr_nm == 3.2));
    assert_eq!((s.pumps[0].wavelength_nm, s.pumps[1].wavelength_nm), (1543.78, 1556.53));
}

#[test]
fn bundled_scenarios_round_trip() {
    for (name, _) in bundled::SCENARIOS {
        let s = bundled::load(name).unwrap();
        let back = Scenario::from_toml(&s.to_toml(), "other").unwrap();
        assert_eq!(back, s);
        assert_eq!(back.hash(), s.hash());
    }
}

fn random_f64(rng: &mut ChaCha8Rng) -> f64 {
    // Positive finite values across the full exponent range.
    loop {
        let x = f64::from_bits(rng.random::<u64>() >> 1);
        if x.is_finite() && x > 0.0 {
            return x;
        }
    }
}

#[test]
fn random_scenarios_round_trip_bit_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let mut r = || random_f64(&mut rng);
        let pump = |w: f64, lw: f64, a: f64, ph: f64| PumpConfig {
            wavelength_nm: w,
            linewidth_ghz: Some(lw),
            shape: Some(Shape::Lorentzian),
            amplitude: Some(a),
            phase_rad: Some(ph),
        };
        let s = Scenario {
            pumps: vec![pump(r(), r(), r(), r()), pump(r(), r(), r(), -r())],
            source: SourceConfig::Pair {
                first: Box::new(SourceConfig::Waveguide {
                    length_mm: r(),
                    dispersion: Some(DispersionConfig::Taylor {
                        betas: vec![r(), -r(), r(), 0.0],
                        reference_nm: Some(r()),
                    }),
                }),
                second: Box::new(SourceConfig::Ring {
                    q: r(),
                    fsr_nm: r(),
                    anchor_nm: Some(r()),
                }),
            },
            name: Some("random".into()),
            car: Some(r()),
            filter: Some(FilterConfig {
                center_nm: r(),
                bandwidth_nm: r(),
                profile: Some(FilterShape::RaisedCosine),
                rolloff: Some(r().fract()),
            }),
            grid: Some(GridConfig {
                center_nm: Some(r()),
                span_nm: Some(r()),
                points: Some(401),
            }),
            fringe: Some(FringeConfig {
                circuit: Some(Circuit::TwoMzi),
                pair: Some(Pair::P14),
                scanned: Some(Scanned::Phi2),
                fixed_phase_rad: Some(-r()),
                phase_start_rad: Some(-r()),
                phase_stop_rad: Some(r()),
                phase_step_rad: Some(r()),
                overlap: Some(r().fract()),
                delta_rad: Some(r()),
                classical_offset: Some(true),
            }),
            measured: Some(MeasuredConfig {
                visibility: r().fract(),
                label: Some("row".into()),
            }),
            squeezing: Some(SqueezingConfig {
                xi: r(),
                transmission: Some(r().fract()),
                max_n: Some(7),
            }),
        };
        let text = s.to_toml();
        let de = toml::Deserializer::parse(&text).unwrap();
        let back: Scenario = serde::Deserialize::deserialize(de).unwrap();
        assert_eq!(back, s, "{text}");
        assert_eq!(back.to_toml(), text);
    }
}

#[test]
fn config_errors_exit_2_with_key_paths() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.toml", "");
    let (code, _, err) = run(&["purity", "--scenario", &empty]);
    assert_eq!(code, 2);
    assert!(err.contains("missing field `pumps`"), "{err}");

    let unknown = write(
        dir.path(),
        "unknown.toml",
        &format!("{L0_WAVEGUIDE}\n[filter]\ncenter_nm = 1550.12\nbandwidth_nm = 0.8\nshape = \"flat\"\n"),
    );
    let (code, _, err) = run(&["purity", "--scenario", &unknown]);
    assert_eq!(code, 2);
    assert!(err.contains("filter") && err.contains("shape"), "{err}");

    let (code, _, err) = run(&["purity", "--scenario", dir.path().join("absent.toml").to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("absent.toml"), "{err}");

    let (code, _, _) = run(&["purity"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["bogus"]);
    assert_eq!(code, 2);
}

#[test]
fn numeric_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocked = write(
        dir.path(),
        "blocked.toml",
        &format!("{L0_WAVEGUIDE}\n[filter]\ncenter_nm = 1500.0\nbandwidth_nm = 0.8\n"),
    );
    let (code, _, err) = run(&["purity", "--scenario", &blocked]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_sfwm");
    let status = Process::new(exe)
        .args(["purity", "--scenario", "no_such_scenario"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    let status = Process::new(exe).arg("--help").output().unwrap();
    assert_eq!(status.status.code(), Some(0));
}

#[test]
fn zero_length_waveguide_jsi_is_an_anti_diagonal_ridge() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "l0.toml", L0_WAVEGUIDE);
    let out = dir.path().join("jsi.csv");
    let (code, report, _) = run(&["jsi", "--scenario", &path, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(report.contains("41x41"));
    let file = JsiFile::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let n = file.nx();
    for j in 0..n {
        let argmax = (0..n).max_by(|&a, &b| file.at(j, a).total_cmp(&file.at(j, b))).unwrap();
        assert!((j + argmax).abs_diff(n - 1) <= 1, "row {j}: ridge at {argmax}");
        // The ridge is constant along the anti-diagonal.
        assert!((file.at(j, n - 1 - j) - file.at(0, n - 1)).abs() <= 1e-9 * file.at(0, n - 1));
    }
}

#[test]
fn jsi_file_round_trips_bit_exactly() {
    let s = Scenario::from_toml(
        L0_WAVEGUIDE.replace("length_mm = 0.0", "length_mm = 3.0").as_str(),
        "rt",
    )
    .unwrap();
    let sources = commands::Sources::build(&s).unwrap();
    let filtered = sources.filtered_first().unwrap();
    let output = commands::jsi(&s).unwrap();
    let text = output.data.unwrap();
    assert!(text.starts_with(&commands::header("jsi", &s)));
    let file = JsiFile::parse(&text).unwrap();
    assert_eq!(&file.grid_s, filtered.grid_s());
    assert_eq!(&file.grid_i, filtered.grid_i());
    let expect = jsi(&filtered);
    for j in 0..file.nx() {
        for k in 0..file.ny() {
            assert_eq!(file.at(j, k).to_bits(), expect[(j, k)].to_bits());
        }
    }
}

fn ring_marginal_fwhm_nm(q: f64) -> f64 {
    let text = bundled::text("sipic1_ring")
        .unwrap()
        .replace("q = 1.5e4", &format!("q = {q:e}"));
    let s = Scenario::from_toml(&text, "ring").unwrap();
    let file = JsiFile::parse(&commands::jsi(&s).unwrap().data.unwrap()).unwrap();
    let omegas = file.grid_s.points();
    let marginal: Vec<f64> = (0..file.nx())
        .map(|j| (0..file.ny()).map(|k| file.at(j, k)).sum())
        .collect();
    let width = fwhm(&omegas, &marginal).unwrap();
    let center = omegas[marginal.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0];
    let lambda = omega_to_wavelength(center);
    lambda * lambda * width / (2.0 * std::f64::consts::PI * 299_792_458.0) * 1e9
}

#[test]
fn ring_marginal_width_follows_q() {
    let w = ring_marginal_fwhm_nm(1.5e4);
    assert!((w - 0.1).abs() <= 0.015, "{w}");
}

#[test]
fn separable_synthetic_scenario_is_pure() {
    let dir = tempfile::tempdir().unwrap();
    let text = L0_WAVEGUIDE
        .replace("linewidth_ghz = 50.0", "linewidth_ghz = 2000.0")
        .replace("span_nm = 2.0", "span_nm = 0.4")
        + "\n[filter]\ncenter_nm = 1550.12\nbandwidth_nm = 0.1\n";
    let path = write(dir.path(), "sep.toml", &text);
    let (code, report, err) = run(&["purity", "--scenario", &path]);
    assert_eq!(code, 0, "{err}");
    let p = report_value(&report, "purity");
    assert_eq!(format!("{p:.3}"), "1.000");
}

#[test]
fn fringe_reports() {
    let dir = tempfile::tempdir().unwrap();
    let pair = format!(
        "{}\n[source]\nkind = \"pair\"\n[source.first]\nkind = \"ring\"\nq = 3e4\nfsr_nm = 3.2\n[source.second]\nkind = \"ring\"\nq = 3e4\nfsr_nm = 3.2\n[grid]\npoints = 61\n",
        L0_WAVEGUIDE.split("[source]").next().unwrap()
    );
    let path = write(dir.path(), "pair.toml", &pair);
    let (code, report, err) = run(&["fringe", "--scenario", &path]);
    assert_eq!(code, 0, "{err}");
    assert!((report_value(&report, "visibility") - 1.0).abs() < 1e-12);
    assert!((report_value(&report, "overlap") - 1.0).abs() < 1e-12);

    let forced = write(
        dir.path(),
        "forced.toml",
        &format!("{L0_WAVEGUIDE}\n[fringe]\noverlap = 0.887\n"),
    );
    let (code, report, _) = run(&["fringe", "--scenario", &forced, "--car", "74"]);
    assert_eq!(code, 0);
    let v = report_value(&report, "visibility");
    assert!((v - 0.940).abs() < 1e-3, "{v}");
    let corrected = report_value(&report, "visibility_corrected");
    assert!((corrected - v / (1.0 - 1.0 / 75.0)).abs() < 1e-11);

    let out = dir.path().join("fringe.csv");
    let (code, _, _) = run(&["fringe", "--scenario", &forced, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("# sfwm schema=1 command=fringe"));
    assert!(csv.contains("phase_rad,p12_raw,p12_norm,classical_a,classical_b\n"));
}

#[test]
fn ring_far_from_resonance_warns() {
    let dir = tempfile::tempdir().unwrap();
    let text = bundled::text("sipic2_ring")
        .unwrap()
        .replace("fsr_nm = 3.2", "fsr_nm = 2.5")
        .replace("points = 401", "points = 41");
    let path = write(dir.path(), "detuned.toml", &text);
    let (code, _, err) = run(&["purity", "--scenario", &path]);
    assert_eq!(code, 0);
    assert!(err.contains("warning") && err.contains("linewidths"), "{err}");
}

#[test]
fn overrides_change_the_header_hash() {
    let (_, a, _) = run(&["purity", "--scenario", "sipic2_ring", "--grid-points", "101"]);
    let (_, b, _) = run(&["purity", "--scenario", "sipic2_ring", "--grid-points", "121"]);
    let first = |s: &str| s.lines().next().unwrap().to_string();
    assert!(first(&a).starts_with("# sfwm schema=1 command=purity scenario=sipic2_ring sha256="));
    assert_ne!(first(&a), first(&b));
}

#[test]
fn schmidt_and_stats_outputs() {
    let (code, csv, _) = run(&["schmidt", "--scenario", "sipic2_ring", "--grid-points", "101"]);
    assert_eq!(code, 0);
    let coeffs: Vec<f64> = csv
        .lines()
        .skip_while(|l| *l != "mode,coefficient")
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(coeffs.windows(2).all(|w| w[0] >= w[1]));
    assert!((coeffs.iter().sum::<f64>() - 1.0).abs() < 1e-9);

    let (code, report, _) = run(&[
        "stats",
        "--scenario",
        "sipic2_ring",
        "--grid-points",
        "101",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = report.lines().collect();
    assert!(lines[1].starts_with(
        "scenario,xi,transmission,schmidt_modes,purity,mean_photon_number,trigger_probability,p0_leading_mode"
    ));
}

#[test]
fn table1_csv_is_deterministic_and_ordered() {
    let (code, a, _) = run(&["table1", "--format", "csv", "--grid-points", "201"]);
    assert_eq!(code, 0);
    let (_, b, _) = run(&["table1", "--format", "csv", "--grid-points", "201"]);
    assert_eq!(a, b);
    let rows: Vec<Vec<&str>> = a.lines().skip(2).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    let purity: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(purity[1] > purity[2] && purity[2] > purity[0]);
    let expected = [0.976, 0.666, 0.976, 0.98, 0.887];
    for (r, e) in rows.iter().zip(expected) {
        let n: f64 = r[3].parse().unwrap();
        assert!((n - e).abs() <= 1e-3 + 1e-12, "{}: {n}", r[0]);
    }
}
