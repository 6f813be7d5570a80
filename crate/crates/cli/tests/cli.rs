use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use weldfrac_core::io::{read_csv, read_residual_state};
use weldfrac_core::mesh::load_mesh;

const BIN: &str = env!("CARGO_BIN_EXE_weldfrac");

const COARSE: &str = "[pipe]
half_angle_deg = 8.0
radial_divisions = 6
fine_half_width = 10.0
fine_spacing = 1.0
coarse_spacing = 5.0
";

fn weldfrac(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().expect("spawn")
}

fn config(dir: &Path, name: &str, text: &str) -> String {
    fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn unknown_config_key_exits_with_config_code() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "bad.toml", "[scenario]\ngrade = \"X80\"\nresidual_stres = true\n");
    let o = weldfrac(d.path(), &["screen", "-c", &c]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_config_file_exits_with_config_code() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(weldfrac(d.path(), &["genmesh", "-c", "nowhere.toml"]).status.code(), Some(2));
}

#[test]
fn residual_stress_without_state_file_is_a_config_error() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "p.toml", &format!("[scenario]\nresidual_stress = true\n{COARSE}"));
    assert_eq!(weldfrac(d.path(), &["pressurize", "-c", &c]).status.code(), Some(2));
    let c = config(d.path(), "q.toml", &format!("residual_state = \"gone.csv\"\n[scenario]\nresidual_stress = true\n{COARSE}"));
    assert_eq!(weldfrac(d.path(), &["pressurize", "-c", &c]).status.code(), Some(2));
}

#[test]
fn screen_writes_curves_and_yield_pressures() {
    let d = tempfile::tempdir().unwrap();
    let o = weldfrac(d.path(), &["screen", "-o", "s"]);
    assert!(o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("X80 p_y = 45.0 MPa"), "{stdout}");
    let (names, rows) = read_csv(&d.path().join("s/screen.csv")).unwrap();
    assert_eq!(names, ["C", "JIc_X80", "JIc_X52", "Gc_X80", "Gc_X52"]);
    assert_eq!(rows.len(), 200);
    assert_eq!(rows[0][3], 60.0);
    let text = fs::read_to_string(d.path().join("s/yield_pressure.csv")).unwrap();
    assert!(text.starts_with("# analytic yield pressure"));
    assert!(text.lines().any(|l| l.starts_with("# config_hash: ")));
}

#[test]
fn genmesh_round_trips_through_the_mesh_format() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "m.toml", COARSE);
    assert!(weldfrac(d.path(), &["genmesh", "-c", &c, "-o", "m"]).status.success());
    let m = load_mesh(d.path().join("m/mesh.txt")).unwrap();
    assert!(m.element_count() > 50);
    assert!(m.region_index("weld_pass_1").is_ok() && m.region_index("weld_pass_2").is_ok());
    assert!(d.path().join("m/mesh.vtk").is_file());
}

#[test]
fn weld_then_pressurize_to_a_small_cap() {
    let d = tempfile::tempdir().unwrap();
    let w = config(d.path(), "w.toml", COARSE);
    let o = weldfrac(d.path(), &["weld", "-c", &w, "-o", "weld"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&d.path().join("weld/weld_summary.json"));
    assert_eq!(summary["passes"], 2);
    assert!(summary["config_hash"].as_str().unwrap().len() >= 16);
    let mesh = load_mesh(d.path().join("weld/mesh.txt")).unwrap();
    let state = read_residual_state(&d.path().join("weld/residual_state.csv"), &mesh).unwrap();
    assert!(state.sigma.iter().any(|s| s.von_mises() > 1.0));

    let p = config(
        d.path(),
        "p.toml",
        &format!(
            "residual_state = \"weld/residual_state.csv\"\n[scenario]\nresidual_stress = true\nlength_scale_factor = 4.0\n[scenario.schedule]\np_cap = 1.0\n{COARSE}"
        ),
    );
    let o = weldfrac(d.path(), &["pressurize", "-c", &p, "-o", "press"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&d.path().join("press/report.json"));
    assert_eq!(r["mode"], "cap_reached");
    assert_eq!(r["p_max"], 1.0);
    assert!((r["p_y"].as_f64().unwrap() - 45.0).abs() < 1e-12);
    for key in ["crack_path", "load_drop", "seeded_nodes", "mass_closure", "increments"] {
        assert!(r.get(key).is_some(), "{key}");
    }
    let (_, rows) = read_csv(&d.path().join("press/increments.csv")).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(d.path().join("press/fields.vtk").is_file());
}

#[test]
fn zero_expansion_leaves_no_residual_stress() {
    let d = tempfile::tempdir().unwrap();
    let w = config(d.path(), "w.toml", &format!("[weld]\nalpha_scale = 0.0\n{COARSE}"));
    let o = weldfrac(d.path(), &["weld", "-c", &w, "-o", "weld"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mesh = load_mesh(d.path().join("weld/mesh.txt")).unwrap();
    let state = read_residual_state(&d.path().join("weld/residual_state.csv"), &mesh).unwrap();
    assert!(state.sigma.iter().all(|s| s.von_mises() < 1e-6));
    assert!(state.eps_bar.iter().all(|&e| e == 0.0));
}

#[test]
fn strict_escalates_validity_warnings() {
    // the coarse test mesh violates the ell/5 resolution rule
    let d = tempfile::tempdir().unwrap();
    let text = format!("[scenario]\nresidual_stress = false\n[scenario.schedule]\np_cap = 0.25\n{COARSE}");
    let c = config(d.path(), "p.toml", &text);
    assert_eq!(weldfrac(d.path(), &["pressurize", "-c", &c, "-o", "a"]).status.code(), Some(0));
    assert_eq!(weldfrac(d.path(), &["pressurize", "-c", &c, "-o", "b", "--strict"]).status.code(), Some(4));
    assert!(d.path().join("b/report.json").is_file());
}

#[test]
fn seed_flag_overrides_the_config() {
    let d = tempfile::tempdir().unwrap();
    let c = config(d.path(), "s.toml", "seed = 3\n");
    for (out, extra) in [("a", None), ("b", Some("3")), ("c", Some("4"))] {
        let mut args = vec!["screen", "-c", &c, "-o", out];
        if let Some(s) = extra {
            args.extend(["--seed", s]);
        }
        assert!(weldfrac(d.path(), &args).status.success());
    }
    let read = |o: &str| fs::read(d.path().join(o).join("yield_pressure.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
}
