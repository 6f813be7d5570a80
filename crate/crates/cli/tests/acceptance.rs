//! Acceptance suite. Every check prints one PASS/FAIL line; the process exits
//! non-zero when a check fails that is not listed in `KNOWN_RED`.
//!
//! The weld, pressurization and R-curve checks drive the `weldfrac` binary
//! and take the better part of an hour on one core. `WELDFRAC_ACCEPTANCE`
//! selects a subset by number, e.g. `WELDFRAC_ACCEPTANCE=1,2,3,7`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;
use weldfrac_core::fem::{interpolate_at_qps, Geometry};
use weldfrac_core::hydrogen::{total_mass, TransportSolver, TransportStep};
use weldfrac_core::io::read_csv;
use weldfrac_core::materials::{Grade, Table, ThermalProps};
use weldfrac_core::mech::return_map::{uniaxial_stress_curve, QpParams};
use weldfrac_core::mesh::{grid, load_mesh, Mesh2D, Point};
use weldfrac_core::thermal::{count_peaks, ThermalOptions, ThermalSolver, ThermalState};
use weldfrac_core::coupling::Defect;
use weldfrac_core::fracture::PhaseFieldSolver;

const BIN: &str = env!("CARGO_BIN_EXE_weldfrac");

/// Checks expected to fail at desk scale.
const KNOWN_RED: &[&str] = &["10a"];

struct Suite {
    lines: Vec<(String, bool)>,
}

impl Suite {
    fn record(&mut self, id: &str, name: &str, pass: bool, elapsed: Duration, detail: String) {
        let tag = match (pass, KNOWN_RED.contains(&id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("[{tag}] {id:>3} {name}: {detail} ({:.1} s)", elapsed.as_secs_f64());
        self.lines.push((id.to_string(), pass));
    }
}

fn selected() -> BTreeSet<u32> {
    match std::env::var("WELDFRAC_ACCEPTANCE") {
        Ok(s) if !s.trim().is_empty() => s.split(',').filter_map(|t| t.trim().parse().ok()).collect(),
        _ => (1..=11).collect(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Runs the binary in `root`; returns stdout or the failure text.
fn weldfrac(root: &Path, cmd: &str, config: &str, out: &str) -> Result<String, String> {
    let o = Command::new(BIN)
        .current_dir(root)
        .args([cmd, "-c", config, "-o", out])
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&o.stdout).into_owned();
    if o.status.success() {
        Ok(stdout)
    } else {
        Err(format!("{cmd} exited with {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr).trim()))
    }
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (names, rows) = read_csv(path).expect("csv");
    let k = names.iter().position(|n| n == name).expect("column");
    rows.iter().map(|r| r[k]).collect()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).expect("json")).expect("json")
}

// ---------------------------------------------------------------- 1 to 3

fn yield_pressures(s: &mut Suite, scratch: &Path) {
    let t = Instant::now();
    let out = weldfrac(scratch, "screen", "none.toml", "screen");
    let el = t.elapsed();
    let (pass, detail) = match out {
        Ok(stdout) => {
            let rows = read_csv(&scratch.join("screen/yield_pressure.csv")).expect("csv").1;
            // σ_y b / R with b = 7.5, R = 110
            let x80 = rows[0][3];
            let x52 = rows[1][3];
            let printed = stdout.contains("X80 p_y = 45.0 MPa") && stdout.contains("X52 p_y = 29.3 MPa");
            let exact = x80 == 660.0 * 7.5 / 110.0 && x52 == 430.0 * 7.5 / 110.0;
            (printed && exact && el < Duration::from_secs(1), format!("X80 {x80:.4} MPa, X52 {x52:.4} MPa"))
        }
        Err(e) => (false, e),
    };
    s.record("1", "analytic yield pressure", pass, el, detail);
}

fn degradation_goldens(s: &mut Suite, scratch: &Path) {
    let t = Instant::now();
    let path = scratch.join("screen/screen.csv");
    if !path.exists() {
        let _ = weldfrac(scratch, "screen", "none.toml", "screen");
    }
    let c = column(&path, "C");
    let mut worst: f64 = 0.0;
    let mut pass = c.len() == 200;
    let mut detail = String::new();
    for (col, (j0, jmin, q1, q2)) in [("JIc_X80", (289.0, 20.0, 9.0, 0.8)), ("JIc_X52", (400.0, 50.0, 25.0, 2.0))] {
        let j = column(&path, col);
        let fit = |x: f64| jmin + (j0 - jmin) * f64::exp(-q1 * f64::powf(x, q2));
        for (x, v) in c.iter().zip(&j) {
            worst = worst.max(rel(*v, fit(*x)));
        }
        let start = (j[0] - j0).abs();
        let end = (j[j.len() - 1] - jmin).abs();
        let mono = j.windows(2).all(|w| w[1] <= w[0]);
        pass &= start <= 1e-9 && end <= 1e-9 && mono;
        detail += &format!("{col} {:.6}..{:.9} ", j[0], j[j.len() - 1]);
    }
    pass &= worst < 1e-12 && t.elapsed() < Duration::from_secs(1);
    s.record("2", "J_Ic degradation fit", pass, t.elapsed(), format!("{detail}max rel dev {worst:.1e}"));
}

fn length_scales(s: &mut Suite) {
    let t = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    for (g, expected) in [(Grade::X80, 0.17), (Grade::X52, 0.40)] {
        let m = g.base();
        let (e, gc, sh) = (m.mech.e_at(20.0), m.fracture.gc0, m.fracture.sigma_hat);
        let ell = 27.0 / 256.0 * e * gc / (sh * sh);
        let lib = weldfrac_core::materials::length_scale_from_strength(e, gc, sh);
        pass &= rel(ell, expected) < 0.02 && rel(lib, ell) < 1e-12 && sh == 4.0 * m.mech.sigma_y_at(20.0);
        detail += &format!("{} {ell:.4} mm ", g.name());
    }
    s.record("3", "length-scale consistency", pass && t.elapsed() < Duration::from_secs(1), t.elapsed(), detail);
}

// ---------------------------------------------------------------- 4 to 7

fn bar_strength(s: &mut Suite) {
    let t = Instant::now();
    let m = Grade::X80.base();
    let (e, gc, ell) = (m.mech.e_at(20.0), m.fracture.gc0, m.fracture.ell);
    let h = ell / 5.0;
    let len = 20.0 * ell;
    let mesh = grid::rectangle(-0.5 * len, 0.5 * len, 0.0, h, (len / h).round() as usize, 1);
    let geom = Geometry::new(&mesh);
    let nq = mesh.quad_point_count();
    let mut solver = PhaseFieldSolver::new(&mesh);
    let mut phi = vec![0.0; mesh.node_count()];
    let mut hist = vec![0.0f64; nq];
    let sigma_hat = (27.0 * e * gc / (256.0 * ell)).sqrt();
    let eps_c = (gc / (3.0 * ell * e)).sqrt();
    let mut peak: f64 = 0.0;
    let steps = 400;
    for k in 1..=steps {
        let eps = 2.0 * eps_c * k as f64 / steps as f64;
        for _ in 0..50 {
            hist.iter_mut().for_each(|v| *v = v.max(0.5 * e * eps * eps));
            let next = solver.solve(&mesh, &geom, &hist, &vec![gc; nq], &vec![ell; nq], &phi, &[]).expect("phase field");
            let change = next.iter().zip(&phi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            phi = next;
            if change < 1e-10 {
                break;
            }
        }
        let pq = interpolate_at_qps(&mesh, &geom, &phi);
        let sig = pq.iter().map(|p| (1.0 - p).powi(2) * e * eps).sum::<f64>() / nq as f64;
        peak = peak.max(sig);
    }
    let err = rel(peak, sigma_hat);
    let pass = err < 0.02 && t.elapsed() < Duration::from_secs(30);
    s.record("4", "1D AT2 strength", pass, t.elapsed(), format!("peak {peak:.1} MPa vs {sigma_hat:.1} MPa, {:.2}%", 100.0 * err));
}

fn drift_diffusion(s: &mut Suite) {
    let t = Instant::now();
    // steady state on [0, 1] with C(0) = 1, C(1) = 0 and constant drift κ
    let mesh = grid::rectangle(0.0, 1.0, 0.0, 0.05, 100, 1);
    let geom = Geometry::new(&mesh);
    let nq = mesh.quad_point_count();
    let (kappa, vbar_rt) = (2.0, 8.2e-4);
    let d = vec![1.0; nq];
    let grad = vec![[kappa / vbar_rt, 0.0]; nq];
    let mut bc: Vec<(usize, f64)> = mesh.node_set("left").unwrap().iter().map(|&n| (n, 1.0)).collect();
    bc.extend(mesh.node_set("right").unwrap().iter().map(|&n| (n, 0.0)));
    let mut solver = TransportSolver::new(&mesh);
    let step = TransportStep { dt: 1e12, d: &d, grad_sigma_h: &grad, drift: vbar_rt, dirichlet: &bc };
    let c = solver.step(&mesh, &geom, &vec![0.0; mesh.node_count()], &step).expect("transport").c;
    let exact = |x: f64| ((kappa * x).exp() - kappa.exp()) / (1.0 - kappa.exp());
    let linf = mesh.nodes.iter().zip(&c).map(|(p, v)| (v - exact(p[0])).abs()).fold(0.0, f64::max);

    // sealed square, non-uniform stress gradient
    let sq = grid::rectangle(0.0, 1.0, 0.0, 1.0, 10, 10);
    let g2 = Geometry::new(&sq);
    let nq2 = sq.quad_point_count();
    let d2 = vec![0.3; nq2];
    let grad2: Vec<[f64; 2]> = g2.qps.iter().map(|q| [200.0 * q.x[1], -80.0 * q.x[0]]).collect();
    let mut c2: Vec<f64> = sq.nodes.iter().map(|p| 1.0 + (4.0 * p[0]).sin() * p[1]).collect();
    let m0 = total_mass(&sq, &g2, &c2);
    let mut s2 = TransportSolver::new(&sq);
    for _ in 0..20 {
        let st = TransportStep { dt: 0.05, d: &d2, grad_sigma_h: &grad2, drift: vbar_rt, dirichlet: &[] };
        c2 = s2.step(&sq, &g2, &c2, &st).expect("transport").c;
    }
    let drift = rel(total_mass(&sq, &g2, &c2), m0);
    let pass = linf <= 0.01 && drift <= 1e-10 && t.elapsed() < Duration::from_secs(30);
    s.record("5", "drift-diffusion oracle", pass, t.elapsed(), format!("L-inf {linf:.2e} of C*, sealed mass drift {drift:.1e}"));
}

/// L2 error of T = sin(πx) f(t) on a slab of unit heat capacity.
fn mms_error(nx: usize, dt: f64, f: &dyn Fn(f64) -> f64, df: &dyn Fn(f64) -> f64, t_end: f64) -> f64 {
    let k = 0.1;
    let props = ThermalProps {
        rho: 1.0,
        c: Table::constant(1.0),
        k: Table::constant(k),
        alpha: Table::constant(0.0),
        h_c: 0.0,
        emissivity: 0.0,
        t0: 0.0,
        ..ThermalProps::default()
    };
    let height = 0.02;
    let mesh = grid::rectangle(0.0, 1.0, 0.0, height, nx, 1);
    let geom = Geometry::new(&mesh);
    let mut solver = ThermalSolver::new(&mesh, props, ThermalOptions::default(), &[]).expect("thermal");
    let exact = |x: f64, t: f64| (PI * x).sin() * f(t);
    let src = |p: Point, t: f64| (PI * p[0]).sin() * (df(t) + k * PI * PI * f(t));
    let mut bc: Vec<(usize, f64)> = mesh.node_set("left").unwrap().iter().map(|&n| (n, 0.0)).collect();
    bc.extend(mesh.node_set("right").unwrap().iter().map(|&n| (n, 0.0)));
    let mut st = ThermalState { t: mesh.nodes.iter().map(|p| exact(p[0], 0.0)).collect(), time: 0.0 };
    for _ in 0..(t_end / dt).round() as usize {
        st = solver.step(&mesh, &geom, &st, dt, &bc, Some(&src)).expect("thermal step");
    }
    let th = interpolate_at_qps(&mesh, &geom, &st.t);
    let err: f64 = geom.qps.iter().zip(&th).map(|(q, v)| q.w * (v - exact(q.x[0], st.time)).powi(2)).sum();
    (err / height).sqrt()
}

fn thermal_mms(s: &mut Suite) {
    let t = Instant::now();
    let lam = 2.0;
    let f = move |t: f64| (-lam * t).exp();
    let df = move |t: f64| -lam * (-lam * t).exp();
    let et: Vec<f64> = [0.1, 0.05, 0.025].iter().map(|&dt| mms_error(400, dt, &f, &df, 0.5)).collect();
    let p_t = (et[1] / et[2]).log2();
    // linear in time: backward Euler is exact, only the spatial error is left
    let g = |t: f64| 1.0 + t;
    let dg = |_: f64| 1.0;
    let eh: Vec<f64> = [8, 16, 32].iter().map(|&n| mms_error(n, 0.1, &g, &dg, 0.5)).collect();
    let p_h = (eh[1] / eh[2]).log2();
    let pass = p_t >= 0.9 && p_h >= 1.9 && t.elapsed() < Duration::from_secs(120);
    s.record("6", "thermal manufactured solution", pass, t.elapsed(), format!("order {p_t:.3} in dt, {p_h:.3} in h"));
}

/// Uniaxial stress from total strain for σ_f = σ_y (1 + E ε̄/σ_y)^n.
fn power_law_stress(q: &QpParams, exx: f64) -> f64 {
    if q.e * exx <= q.sigma_y {
        return q.e * exx;
    }
    let strain = |sig: f64| sig / q.e + q.sigma_y / q.e * ((sig / q.sigma_y).powf(1.0 / q.n) - 1.0);
    let (mut lo, mut hi) = (q.sigma_y, q.e * exx);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if strain(mid) < exx {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn uniaxial_power_law(s: &mut Suite) {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut min_diss = f64::INFINITY;
    for m in [Grade::X80.base(), Grade::X80.weld(), Grade::X52.base()] {
        let q = QpParams { e: m.mech.e_at(20.0), nu: 0.3, sigma_y: m.mech.sigma_y_at(20.0), n: m.mech.n };
        let strains: Vec<f64> = (1..=500).map(|i| i as f64 * 1e-4).collect();
        for (exx, sxx, _, diss) in uniaxial_stress_curve(&q, &strains) {
            worst = worst.max(rel(sxx, power_law_stress(&q, exx)));
            min_diss = min_diss.min(diss);
        }
    }
    let pass = worst < 5e-3 && min_diss >= 0.0 && t.elapsed() < Duration::from_secs(5);
    s.record("7", "elastoplastic uniaxial response", pass, t.elapsed(), format!("max rel dev {worst:.2e}, min dissipation {min_diss:.2e}"));
}

// ---------------------------------------------------------------- 8 to 11

const WELD_X80: &str = "seed = 0\n[scenario]\ngrade = \"X80\"\n";
const WELD_X52: &str = "seed = 0\n[scenario]\ngrade = \"X52\"\n";

fn pressure_config(grade: &str, residual: bool, extra: &str) -> String {
    let weld = if grade == "X80" { "weld_x80" } else { "weld_x52" };
    let mut s = String::from("seed = 0\n");
    if residual {
        s += &format!("residual_state = \"{weld}/residual_state.csv\"\n");
    }
    s += &format!("[scenario]\ngrade = \"{grade}\"\nresidual_stress = {residual}\nlength_scale_factor = 4.0\n");
    s + extra
}

fn flaw_config() -> String {
    let d = Defect::from_start([-6.8, 0.0], 3.0, 60.0);
    pressure_config(
        "X80",
        true,
        &format!(
            "[[scenario.defects]]\ncenter = [{:?}, {:?}]\nlength = {:?}\nangle_deg = {:?}\n",
            d.center[0], d.center[1], d.length, d.angle_deg
        ),
    )
}

const RC_AIR: &str = "seed = 0\n[rcurve]\ngrade = \"X80\"\n";
const RC_H: &str = "seed = 0\n[rcurve]\ngrade = \"X80\"\n[rcurve.model.hydrogen]\nkind = \"uniform\"\nc = 20.0\n";

/// Every run of the long checks: (config name, contents, command, output dir).
fn runs() -> Vec<(&'static str, String, &'static str, &'static str)> {
    vec![
        ("weld_x80.toml", WELD_X80.into(), "weld", "weld_x80"),
        ("weld_x52.toml", WELD_X52.into(), "weld", "weld_x52"),
        ("x80_rs.toml", pressure_config("X80", true, ""), "pressurize", "x80_rs"),
        ("x80_free.toml", pressure_config("X80", false, ""), "pressurize", "x80_free"),
        ("x52_rs.toml", pressure_config("X52", true, ""), "pressurize", "x52_rs"),
        ("x80_por.toml", pressure_config("X80", true, "[scenario.porosity]\nfraction = 0.005\n"), "pressurize", "x80_por"),
        ("x80_flaw.toml", flaw_config(), "pressurize", "x80_flaw"),
        ("rc_air.toml", RC_AIR.into(), "rcurve", "rc_air"),
        ("rc_h.toml", RC_H.into(), "rcurve", "rc_h"),
    ]
}

fn write_configs(root: &Path) {
    for (name, text, _, _) in runs() {
        fs::write(root.join(name), text).expect("write config");
    }
}

fn run(root: &Path, out: &str) -> (Result<String, String>, Duration) {
    let (_, _, cmd, _) = runs().into_iter().find(|r| r.3 == out).expect("run");
    let config = format!("{out}.toml");
    let t = Instant::now();
    let r = weldfrac(root, cmd, &config, out);
    (r, t.elapsed())
}

fn weld_stage(s: &mut Suite, root: &Path) {
    let (r, el) = run(root, "weld_x80");
    let (pass, detail) = match r {
        Err(e) => (false, e),
        Ok(_) => {
            let dir = root.join("weld_x80");
            let elements = load_mesh(dir.join("mesh.txt")).map(|m: Mesh2D| m.element_count()).unwrap_or(0);
            let t = column(&dir.join("thermal_history.csv"), "t");
            let temp = column(&dir.join("thermal_history.csv"), "T");
            let samples: Vec<(f64, f64)> = t.into_iter().zip(temp).collect();
            let peaks = count_peaks(&samples, 100.0);
            let eps = column(&dir.join("probe_plastic_strain.csv"), "eps_p");
            let monotone = eps.windows(2).all(|w| w[1] >= w[0]);
            let hoop = column(&dir.join("residual_hoop.csv"), "sigma_hoop");
            let big = hoop.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let sign_change = hoop.iter().any(|&v| v > 0.05 * big) && hoop.iter().any(|&v| v < -0.05 * big);
            let pass = elements >= 2000 && peaks == 2 && monotone && big > 10.0 && sign_change && el < Duration::from_secs(600);
            let detail = format!(
                "{elements} elements, {peaks} probe peaks, eps_p {} to {:.4}, hoop {:.0}..{:.0} MPa",
                if monotone { "non-decreasing" } else { "DECREASING" },
                eps.last().copied().unwrap_or(0.0),
                hoop.iter().copied().fold(f64::INFINITY, f64::min),
                hoop.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            );
            (pass, detail)
        }
    };
    s.record("8", "weld stage", pass, el, detail);
}

struct Outcome {
    mode: String,
    p_max: f64,
    p_y: f64,
}

fn outcome(root: &Path, out: &str) -> Option<Outcome> {
    let v = json(&root.join(out).join("report.json"));
    Some(Outcome { mode: v["mode"].as_str()?.to_string(), p_max: v["p_max"].as_f64()?, p_y: v["p_y"].as_f64()? })
}

fn failure_suite(s: &mut Suite, root: &Path) {
    let t = Instant::now();
    let mut errors = Vec::new();
    for out in ["weld_x52", "x80_rs", "x80_free", "x52_rs", "x80_por", "x80_flaw"] {
        let (r, el) = run(root, out);
        match r {
            Ok(stdout) => println!("      {out}: {} ({:.0} s)", stdout.trim(), el.as_secs_f64()),
            Err(e) => errors.push(format!("{out}: {e}")),
        }
    }
    let el = t.elapsed();
    if !errors.is_empty() {
        s.record("9", "failure modes and ordering", false, el, errors.join("; "));
        return;
    }
    let get = |o: &str| outcome(root, o).expect("report fields");
    let (rs, free, x52, por, flaw) = (get("x80_rs"), get("x80_free"), get("x52_rs"), get("x80_por"), get("x80_flaw"));
    let checks = [
        ("X80 RS cracks below p_y", rs.mode == "cracking" && rs.p_max < rs.p_y),
        ("X80 without RS yields", free.mode == "yielding"),
        ("X52 yields under pressure", x52.mode == "yielding" && x52.p_max > 0.0),
        ("porosity does not raise p_max", por.p_max <= rs.p_max),
        ("flaw lowers p_max", flaw.p_max < rs.p_max),
        ("under one hour", el < Duration::from_secs(3600)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let detail = format!(
        "X80 RS {} {:.3}/{:.1}, no RS {} {:.3}, X52 {} {:.3}, porosity {:.3}, flaw {:.3} MPa{}",
        rs.mode,
        rs.p_max,
        rs.p_y,
        free.mode,
        free.p_max,
        x52.mode,
        x52.p_max,
        por.p_max,
        flaw.p_max,
        if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
    );
    s.record("9", "failure modes and ordering", failed.is_empty(), el, detail);
}

fn rcurve_check(s: &mut Suite, root: &Path) {
    let (air, el_air) = run(root, "rc_air");
    let (h, el_h) = run(root, "rc_h");
    let el = el_air + el_h;
    let read = |out: &str| {
        let v = json(&root.join(out).join("rcurve.json"));
        (v["j0"].as_f64(), v["slope"].as_f64())
    };
    let m = Grade::X80.base();
    let (gc0, gcmin) = (m.fracture.gc0, m.fracture.gc_min);
    let (j_air, slope_air) = if air.is_ok() { read("rc_air") } else { (None, None) };
    let (j_h, slope_h) = if h.is_ok() { read("rc_h") } else { (None, None) };
    let fmt = |j: Option<f64>, g: f64| j.map_or("no initiation".to_string(), |j| format!("J0 {j:.2} N/mm = {:.3} G_c", j / g));

    let a = j_air.is_some_and(|j| rel(j, gc0) <= 0.15);
    s.record("10a", "R-curve initiation in air", a, el_air, format!("{} (G_c(0) {gc0})", fmt(j_air, gc0)));
    let b = j_h.is_some_and(|j| rel(j, gcmin) <= 0.15);
    s.record("10b", "R-curve initiation with hydrogen", b, el_h, format!("{} (G_c^min {gcmin})", fmt(j_h, gcmin)));
    let c = matches!((slope_h, slope_air), (Some(x), Some(y)) if x < y);
    s.record(
        "10c",
        "R-curve slope lower with hydrogen",
        c,
        el,
        format!("dJ/da {:.3} vs {:.3} N/mm²", slope_h.unwrap_or(f64::NAN), slope_air.unwrap_or(f64::NAN)),
    );
    s.record("10d", "R-curve runtime", el < Duration::from_secs(1800), el, format!("{:.1} min", el.as_secs_f64() / 60.0));
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .map(|d| d.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x == "csv")).collect())
        .unwrap_or_default();
    v.sort();
    v
}

fn determinism(s: &mut Suite, first: &Path, second: &Path) {
    let t = Instant::now();
    write_configs(second);
    let mut errors = Vec::new();
    for (_, _, _, out) in runs() {
        if let Err(e) = run(second, out).0 {
            errors.push(e);
        }
    }
    let mut compared = 0;
    let mut differ = Vec::new();
    for (_, _, _, out) in runs() {
        let a = csv_files(&first.join(out));
        let b = csv_files(&second.join(out));
        if a.is_empty() || a.iter().map(|p| p.file_name()).ne(b.iter().map(|p| p.file_name())) {
            differ.push(format!("{out}/ (file set)"));
            continue;
        }
        for (x, y) in a.iter().zip(&b) {
            compared += 1;
            if fs::read(x).ok() != fs::read(y).ok() {
                differ.push(format!("{out}/{}", x.file_name().unwrap().to_string_lossy()));
            }
        }
    }
    let pass = errors.is_empty() && differ.is_empty();
    let detail = if pass {
        format!("{compared} CSV files byte-identical across two runs")
    } else {
        format!("errors: {errors:?}; differing: {differ:?}")
    };
    s.record("11", "determinism", pass, t.elapsed(), detail);
}

fn main() {
    let which = selected();
    let scratch = tempfile::tempdir().expect("tempdir");
    let first = scratch.path().join("first");
    let second = scratch.path().join("second");
    fs::create_dir_all(&first).unwrap();
    fs::create_dir_all(&second).unwrap();
    fs::write(scratch.path().join("none.toml"), "").unwrap();
    write_configs(&first);

    let mut s = Suite { lines: Vec::new() };
    let on = |k: u32| which.contains(&k);
    if on(1) {
        yield_pressures(&mut s, scratch.path());
    }
    if on(2) {
        degradation_goldens(&mut s, scratch.path());
    }
    if on(3) {
        length_scales(&mut s);
    }
    if on(4) {
        bar_strength(&mut s);
    }
    if on(5) {
        drift_diffusion(&mut s);
    }
    if on(6) {
        thermal_mms(&mut s);
    }
    if on(7) {
        uniaxial_power_law(&mut s);
    }
    if on(8) || on(9) || on(11) {
        weld_stage(&mut s, &first);
    }
    if on(9) || on(11) {
        failure_suite(&mut s, &first);
    }
    if on(10) || on(11) {
        rcurve_check(&mut s, &first);
    }
    if on(11) {
        determinism(&mut s, &first, &second);
    }

    let unexpected: Vec<&str> = s.lines.iter().filter(|(id, p)| !p && !KNOWN_RED.contains(&id.as_str())).map(|(id, _)| id.as_str()).collect();
    let known: Vec<&str> = s.lines.iter().filter(|(id, p)| !p && KNOWN_RED.contains(&id.as_str())).map(|(id, _)| id.as_str()).collect();
    let passed = s.lines.iter().filter(|l| l.1).count();
    println!("acceptance: {passed}/{} passed, known red {known:?}, unexpected failures {unexpected:?}", s.lines.len());
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
