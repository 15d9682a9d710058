use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mzlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mzlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Vec<u8> {
    let out = mzlab(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn parse(bytes: &[u8]) -> Table {
        let text = String::from_utf8(bytes.to_vec()).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap().split(',').map(str::to_string).collect();
        let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
        Table { header, rows }
    }

    fn col(&self, name: &str) -> Vec<f64> {
        let i = self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }

    fn text(&self, name: &str) -> Vec<String> {
        let i = self.header.iter().position(|h| h == name).unwrap();
        self.rows.iter().map(|r| r[i].clone()).collect()
    }
}

fn scenario_file(dir: &Path, json: &str) -> String {
    let path = dir.join("scenario.json");
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn fig2_fringes() {
    let t = Table::parse(&ok(&["fringes", "--preset", "fig2"]));
    assert_eq!(t.header, ["delta0", "n_ordinary", "n_extraordinary"]);
    let d0 = t.col("delta0");
    let o = t.col("n_ordinary");
    let e = t.col("n_extraordinary");
    let zero = d0.iter().position(|&d| d == 0.0).expect("grid contains zero shift");
    assert!((o[zero] - 1.0).abs() < 1e-12);
    for (a, b) in o.iter().zip(&e) {
        assert!((a + b - 1.0).abs() < 1e-12);
    }
    let envelope = o.iter().zip(&e).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!((envelope - 1.0).abs() <= 1e-6);
}

#[test]
fn csv_uses_seventeen_significant_digits() {
    let t = Table::parse(&ok(&["fringes", "--preset", "fig2"]));
    let cell = &t.rows[1][0];
    let mantissa = cell.split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{cell}");
}

#[test]
fn fig3_operational_surface() {
    let t = Table::parse(&ok(&["decoherence-surface", "--preset", "fig3"]));
    let delta = t.col("delta");
    let sigma = t.col("sigma");
    let eps = t.col("epsilon");
    for i in 0..eps.len() {
        if sigma[i] == 0.0 {
            assert_eq!(eps[i], 0.0);
        }
        if i > 0 && delta[i] == delta[i - 1] {
            assert!(eps[i] >= eps[i - 1], "row delta={} not monotone", delta[i]);
        }
    }
}

#[test]
fn fig4_visibility_curves() {
    let t = Table::parse(&ok(&["visibility-curve", "--preset", "fig4"]));
    let ks = t.col("k_sigma");
    let g = t.col("epsilon_gaussian");
    let a = t.col("epsilon_arcsine");
    assert_eq!((ks[0], g[0], a[0]), (0.0, 0.0, 0.0));
    let one = ks.iter().position(|&k| (k - 1.0).abs() < 1e-12).unwrap();
    assert!((g[one] - 0.393469).abs() < 1e-6);
    assert!((g[one] - (1.0 - (-0.5f64).exp())).abs() < 1e-9);
    let peak = (0..a.len()).max_by(|&i, &j| a[i].total_cmp(&a[j])).unwrap();
    assert!((ks[peak] - 1.70047).abs() <= 0.01);
    assert!(a[peak] > 0.999);
    assert!(a.last().unwrap() < &a[peak]);
}

#[test]
fn fig5_classical_shapes() {
    let t = Table::parse(&ok(&["classical", "--preset", "fig5"]));
    let shape = t.text("shape");
    let index: Vec<f64> = t.col("shape_index");
    let ds = t.col("path_diff");
    let v = t.col("visibility");
    let gaussian: Vec<f64> = (0..v.len()).filter(|&i| shape[i] == "gaussian").map(|i| v[i]).collect();
    assert!(gaussian.windows(2).all(|w| w[1] <= w[0]));
    let sym: Vec<(f64, f64)> = (0..v.len()).filter(|&i| index[i] == 2.0).map(|i| (ds[i], v[i])).collect();
    let node = PI / 0.2;
    let near_node = sym.iter().filter(|(d, _)| (d - node).abs() < 0.2).map(|p| p.1).fold(1.0, f64::min);
    let revival = sym.iter().filter(|(d, _)| (d - 2.0 * node).abs() < 0.2).map(|p| p.1).fold(0.0, f64::max);
    assert!(near_node < 0.05 && revival > 0.7, "node {near_node}, revival {revival}");

    let dir = tempfile::tempdir().unwrap();
    let half_width = 3f64.sqrt() * 0.05;
    let nodes: Vec<f64> = (1..=5).map(|n| n as f64 * PI / half_width).collect();
    let path = scenario_file(
        dir.path(),
        &format!(
            r#"{{"k0": 50.0, "shapes": [{{"kind": "rect", "sigma": 0.05}}], "path_diff": {nodes:?}}}"#
        ),
    );
    let t = Table::parse(&ok(&["classical", "--scenario", &path]));
    for v in t.col("visibility") {
        assert!(v < 1e-6);
    }
}

#[test]
fn fig6_wigner_grids() {
    let summary: Value = serde_json::from_slice(&ok(&["wigner-map", "--preset", "fig6", "--format", "json"])).unwrap();
    let grids = summary.as_array().unwrap();
    let sigmas: Vec<f64> = grids.iter().map(|g| g["sigma"].as_f64().unwrap()).collect();
    assert_eq!(sigmas, [0.0, 0.9, 1.8]);
    let (k0, delta, d0) = (1.7f64, 1.1f64, 16.1f64);
    let expected = 0.5 * (1.0 + (-d0 * d0 / (8.0 * delta * delta)).exp() * (k0 * d0).cos());
    assert!((grids[0]["trace"].as_f64().unwrap() - expected).abs() < 1e-6);
    for g in grids {
        assert!(g["boundary_ratio"].as_f64().unwrap() <= 1e-10);
    }
    assert!(grids[0]["epsilon_purity"].as_f64().unwrap() < 1e-4);

    let binary = ok(&["wigner-map", "--preset", "fig6", "--format", "binary"]);
    let mut cursor = std::io::Cursor::new(binary);
    let mut count = 0;
    while let Some(grid) = mzlab::wigner::read_binary(&mut cursor).unwrap() {
        assert_eq!((grid.nx, grid.nk), (256, 256));
        assert_eq!(grid.sigma, sigmas[count]);
        count += 1;
    }
    assert_eq!(count, 3);

    let csv = ok(&["wigner-map", "--preset", "fig6"]);
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("grid,sigma,x,k,w\n"));
    assert_eq!(text.lines().count(), 1 + 3 * 256 * 256);
}

#[test]
fn fig7_purity_surface() {
    let t = Table::parse(&ok(&["decoherence-surface", "--preset", "fig7"]));
    let delta = t.col("delta");
    let sigma = t.col("sigma");
    let eps = t.col("epsilon");
    assert!(eps.iter().cloned().fold(f64::MIN, f64::max) <= 0.751);
    let mut largest_drop: f64 = 0.0;
    let mut running = f64::MIN;
    for i in 0..eps.len() {
        if sigma[i] == 0.0 {
            assert!(eps[i].abs() <= 1e-4);
            running = eps[i];
        } else {
            assert_eq!(delta[i], delta[i - 1]);
            running = running.max(eps[i]);
            largest_drop = largest_drop.max(running - eps[i]);
        }
    }
    assert!(largest_drop >= 0.01, "largest drop {largest_drop}");
}

#[test]
fn entropy_report() {
    let out = mzlab(&["entropy", "--preset", "entropy"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("lower by ln(pi)"));
    let t = Table::parse(&out.stdout);
    let dist = t.text("distribution");
    let scale = t.col("scale");
    let s = t.col("entropy");
    let lit = t.text("literature_entropy");
    for (i, name) in dist.iter().enumerate() {
        if name == "gaussian" && scale[i] == 1.0 {
            assert!((s[i] - 1.418939).abs() < 1e-6);
        }
        let unit = (0..dist.len()).find(|&j| dist[j] == *name && scale[j] == 1.0).unwrap();
        assert!((s[i] - s[unit] - scale[i].ln()).abs() < 1e-8, "{name} at {}", scale[i]);
        assert_eq!(lit[i].is_empty(), name != "arcsine");
    }
}

#[test]
fn montecarlo_is_deterministic_and_passes() {
    let a = ok(&["montecarlo", "--preset", "montecarlo"]);
    let b = ok(&["montecarlo", "--preset", "montecarlo", "--threads", "1"]);
    assert_eq!(a, b);
    let report: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["generator"], "chacha8-v1");
    assert_eq!(report["pass"], true);
    let cases = report["cases"].as_array().unwrap();
    let first = &cases[0];
    assert!((first["analytic"].as_f64().unwrap() - 0.5 * (1.0 + (-0.5f64).exp())).abs() < 1e-12);
    let single = cases.iter().find(|c| c["n_samples"] == 1).unwrap();
    assert!(single["abs_error"].as_f64().unwrap() < 1e-12);

    let reseeded = ok(&["montecarlo", "--preset", "montecarlo", "--seed", "7"]);
    assert_ne!(a, reseeded);
}

#[test]
fn presets_write_identical_bytes_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    ok(&["classical", "--preset", "fig5", "--out", first.to_str().unwrap()]);
    ok(&["classical", "--preset", "fig5", "--out", second.to_str().unwrap()]);
    assert_eq!(std::fs::read(first).unwrap(), std::fs::read(second).unwrap());
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = scenario_file(
        dir.path(),
        r#"{"k": 1.0, "k_sigma": [0.0, 1.0], "colour": "blue"}"#,
    );
    assert_eq!(mzlab(&["visibility-curve", "--scenario", &unknown]).status.code(), Some(2));

    let negative = scenario_file(
        dir.path(),
        r#"{"packet": {"kind": "gaussian", "k0": 1.0, "delta": -1.0}, "delta0": [0.0]}"#,
    );
    assert_eq!(mzlab(&["fringes", "--scenario", &negative]).status.code(), Some(2));

    assert_eq!(mzlab(&["fringes", "--preset", "fig7"]).status.code(), Some(2));
    assert_eq!(mzlab(&["fringes", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(mzlab(&["fringes"]).status.code(), Some(2));
    assert_eq!(mzlab(&["fringes", "--preset", "fig2", "--format", "binary"]).status.code(), Some(2));

    let atomic = scenario_file(dir.path(), r#"{"laws": [{"kind": "delta"}], "scale": [1.0]}"#);
    assert_eq!(mzlab(&["entropy", "--scenario", &atomic]).status.code(), Some(2));
}

#[test]
fn io_errors_exit_with_four() {
    assert_eq!(mzlab(&["fringes", "--scenario", "/nonexistent/scenario.json"]).status.code(), Some(4));
    assert_eq!(
        mzlab(&["fringes", "--preset", "fig2", "--out", "/nonexistent/dir/out.csv"]).status.code(),
        Some(4)
    );
}

#[test]
fn vanishing_channel_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let k0 = 1.7;
    let path = scenario_file(
        dir.path(),
        &format!(
            r#"{{"packet": {{"k0": {k0}, "delta": 1.0e6}}, "delta0": {}, "sigma": [0.0], "grid": {{"nx": 64, "nk": 64}}}}"#,
            PI / k0
        ),
    );
    let out = mzlab(&["wigner-map", "--scenario", &path]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
