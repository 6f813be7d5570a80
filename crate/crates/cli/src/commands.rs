//! Subcommand implementations. Each writes its artifacts into `out` and
//! returns the validity warnings raised along the way.

use std::fs;
use std::path::Path;

use weldfrac_core::coupling::{
    analytic_yield_pressure, pressurize_case, simulate_weld, through_wall_hoop, FieldSnapshot, ResidualState,
    Scenario, WeldSetup,
};
use weldfrac_core::fem::Geometry;
use weldfrac_core::io::{col, element_average, read_residual_state, write_csv, write_json, write_residual_state, write_vtk, VtkField};
use weldfrac_core::materials::{degraded_gc, FieldMap, Grade};
use weldfrac_core::mech::Sym;
use weldfrac_core::mesh::{load_mesh, write_mesh};
use weldfrac_core::mesh::Mesh2D;
use weldfrac_core::rcurve::{irwin_plastic_zone, run_rcurve, MPA_SQRT_M};
use weldfrac_core::thermal::count_peaks;
use weldfrac_core::{Error, Result};

use crate::config::{effective_hash, LoadedConfig, RunConfig};

/// Exit status of a finished command.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_WARNING: i32 = 4;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Newton(_)
        | Error::ReturnMap(_)
        | Error::LinearSolve(_)
        | Error::StepCollapse(_)
        | Error::NonFinite(_) => EXIT_SOLVER,
        _ => EXIT_CONFIG,
    }
}

#[derive(Debug, Default)]
pub struct Warnings(pub Vec<String>);

impl Warnings {
    fn push(&mut self, msg: String) {
        log::warn!("{msg}");
        self.0.push(msg);
    }
}

fn prepare_out(out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::Config(format!("output directory {}: {e}", out.display())))
}

fn load_or_generate(cfg: &LoadedConfig) -> Result<Mesh2D> {
    match cfg.input(&cfg.config.mesh)? {
        Some(p) => load_mesh(p),
        None => cfg.config.pipe.generate(),
    }
}

/// Scenario with the run seed and the hardness map applied.
fn scenario(cfg: &LoadedConfig, warnings: &mut Warnings) -> Result<Scenario> {
    let c: &RunConfig = &cfg.config;
    let mut s = c.scenario.clone();
    if let Some(p) = &mut s.porosity {
        p.seed = c.seed;
        p.validate()?;
        if !(4.0..=10.0).contains(&p.diameter_um) {
            warnings.push(format!("void diameter {} µm outside 4-10 µm", p.diameter_um));
        }
    }
    if let Some(path) = cfg.input(&c.hardness_map)? {
        s.hardness = Some(FieldMap::from_csv(path)?);
    }
    Ok(s)
}

fn check_resolution(mesh: &Mesh2D, scenario: &Scenario, warnings: &mut Warnings) -> Result<()> {
    let f = scenario.length_scale_factor;
    for (region, ell) in [("base", scenario.grade.base().fracture.ell), ("weld", scenario.grade.weld().fracture.ell)] {
        let name = if region == "base" {
            Some("base".to_string())
        } else {
            mesh.region_names().iter().find(|n| n.starts_with("weld")).cloned()
        };
        if let Some(name) = name {
            if mesh.region_index(&name).is_ok() && !mesh.check_resolution(&name, ell * f)? {
                warnings.push(format!("region `{name}` is coarser than ell/5"));
            }
        }
    }
    Ok(())
}

pub fn genmesh(cfg: &LoadedConfig, out: &Path) -> Result<Warnings> {
    prepare_out(out)?;
    let mesh = load_or_generate(cfg)?;
    fs::write(out.join("mesh.txt"), write_mesh(&mesh))?;
    let region: Vec<f64> = mesh.elements.iter().map(|e| e.region as f64).collect();
    write_vtk(&out.join("mesh.vtk"), "pipe section mesh", &mesh, &[VtkField::CellScalar("region", &region)])?;
    log::info!("{} nodes, {} elements", mesh.node_count(), mesh.element_count());
    Ok(Warnings::default())
}

pub fn weld(cfg: &LoadedConfig, out: &Path) -> Result<Warnings> {
    prepare_out(out)?;
    let c = &cfg.config;
    let hash = effective_hash("weld", c)?;
    let mut warnings = Warnings::default();
    let scenario = scenario(cfg, &mut warnings)?;
    let mut mesh = load_or_generate(cfg)?;
    let geom = Geometry::new(&mesh);
    let field = scenario.material_field(&mesh, &geom, &c.pipe)?;
    let mut setup = WeldSetup::for_pipe(&c.pipe);
    setup.schedule = weldfrac_core::thermal::WeldSchedule::standard(c.pipe.passes.len(), c.weld.torch_duration, c.weld.dwell);
    setup.thermal.alpha = setup.thermal.alpha.scaled(c.weld.alpha_scale);
    setup.thermal_options = c.weld.thermal;
    setup.probe = Some(c.pipe.to_global(c.weld.probe));
    let res = simulate_weld(&mut mesh, &geom, &field, &setup)?;

    fs::write(out.join("mesh.txt"), write_mesh(&mesh))?;
    write_residual_state(&out.join("residual_state.csv"), &mesh, &res.residual, &hash)?;
    let probe = &res.thermal.probes[0].samples;
    let rows: Vec<Vec<f64>> = probe.iter().map(|&(t, v)| vec![t, v]).collect();
    write_csv(&out.join("thermal_history.csv"), "probe temperature", &hash, &[col("t", "s"), col("T", "degC")], &rows)?;
    let rows: Vec<Vec<f64>> = res.probe_plastic_strain.iter().map(|&(t, v)| vec![t, v]).collect();
    write_csv(
        &out.join("probe_plastic_strain.csv"),
        "probe accumulated plastic strain",
        &hash,
        &[col("t", "s"), col("eps_p", "-")],
        &rows,
    )?;
    let hoop = through_wall_hoop(&geom, &c.pipe, &res.residual.sigma, c.weld.hoop_line, c.weld.hoop_samples);
    let rows: Vec<Vec<f64>> = hoop.iter().map(|p| p.to_vec()).collect();
    write_csv(
        &out.join("residual_hoop.csv"),
        &format!("residual circumferential stress at x = {}", c.weld.hoop_line),
        &hash,
        &[col("depth", "mm"), col("sigma_hoop", "MPa")],
        &rows,
    )?;
    let hoop_qp = hoop_at_qps(&geom, &res.residual.sigma);
    write_vtk(
        &out.join("weld.vtk"),
        "weld residual state",
        &mesh,
        &[
            VtkField::PointScalar("temperature", &res.thermal.final_state.t),
            VtkField::PointVector("displacement", &res.displacement),
            VtkField::CellScalar("sigma_hoop", &element_average(&mesh, &hoop_qp)),
            VtkField::CellScalar("eps_p", &element_average(&mesh, &res.residual.eps_bar)),
        ],
    )?;
    #[derive(serde::Serialize)]
    struct Summary {
        passes: usize,
        probe_temperature_peaks: usize,
        probe_plastic_strain: f64,
        thermal_steps: usize,
        end_time: f64,
    }
    let summary = Summary {
        passes: setup.schedule.passes.len(),
        probe_temperature_peaks: count_peaks(probe, 100.0),
        probe_plastic_strain: res.probe_plastic_strain.last().map_or(0.0, |p| p.1),
        thermal_steps: res.thermal.steps,
        end_time: res.thermal.final_state.time,
    };
    write_json(&out.join("weld_summary.json"), &hash, &summary)?;
    log::info!("{} passes, {} probe peaks, probe eps_p {:.4}", summary.passes, summary.probe_temperature_peaks, summary.probe_plastic_strain);
    Ok(warnings)
}

fn hoop_at_qps(geom: &Geometry, sigma: &[Sym]) -> Vec<f64> {
    geom.qps.iter().zip(sigma).map(|(q, s)| s.rotated(q.x[1].atan2(q.x[0])).0[1]).collect()
}

pub fn pressurize(cfg: &LoadedConfig, out: &Path) -> Result<Warnings> {
    prepare_out(out)?;
    let c = &cfg.config;
    let hash = effective_hash("pressurize", c)?;
    let mut warnings = Warnings::default();
    let scenario = scenario(cfg, &mut warnings)?;
    let mesh = load_or_generate(cfg)?;
    let geom = Geometry::new(&mesh);
    let residual: Option<ResidualState> = if scenario.residual_stress {
        let path = cfg.input(&c.residual_state)?.ok_or_else(|| {
            Error::Config("scenario.residual_stress is on but no residual_state file was given; run `weld` first".into())
        })?;
        Some(read_residual_state(&path, &mesh)?)
    } else {
        None
    };
    check_resolution(&mesh, &scenario, &mut warnings)?;
    let outcome = pressurize_case(&mesh, &geom, &c.pipe, &scenario, residual.as_ref())?;
    let r = &outcome.report;
    if r.load_drop && r.crack_path.is_empty() {
        warnings.push(format!("cracking declared from load drop at {:.3} MPa without a through-wall path", r.p_max));
    }
    if r.mass_closure > 1e-6 {
        warnings.push(format!("hydrogen mass closure {:.2e} exceeds 1e-6", r.mass_closure));
    }

    let rows: Vec<Vec<f64>> =
        r.increments.iter().map(|i| vec![i.p, i.max_phi, i.max_epsp_base, i.mass_h, i.passes as f64, i.newton_iterations as f64]).collect();
    write_csv(
        &out.join("increments.csv"),
        "pressure increments",
        &hash,
        &[
            col("p", "MPa"),
            col("max_phi", "-"),
            col("max_epsp_base", "-"),
            col("mass_H", "wppm mm2"),
            col("passes", "-"),
            col("newton_iterations", "-"),
        ],
        &rows,
    )?;
    write_json(&out.join("report.json"), &hash, r)?;
    write_fields(&out.join("fields.vtk"), &mesh, &geom, &outcome.snapshot)?;
    println!("mode = {} p_max = {} MPa p_y = {} MPa", r.mode.as_str(), r.p_max, r.p_y);
    Ok(warnings)
}

fn write_fields(path: &Path, mesh: &Mesh2D, geom: &Geometry, s: &FieldSnapshot) -> Result<()> {
    let hoop = hoop_at_qps(geom, &s.states.sigma);
    write_vtk(
        path,
        &format!("fields at p = {} MPa", s.p),
        mesh,
        &[
            VtkField::PointVector("displacement", &s.u),
            VtkField::PointScalar("phi", &s.phi),
            VtkField::PointScalar("C", &s.c),
            VtkField::CellScalar("sigma_hoop", &element_average(mesh, &hoop)),
            VtkField::CellScalar("eps_p", &element_average(mesh, &s.states.eps_bar)),
        ],
    )
}

pub fn rcurve(cfg: &LoadedConfig, out: &Path) -> Result<Warnings> {
    prepare_out(out)?;
    let c = &cfg.config;
    let hash = effective_hash("rcurve", c)?;
    let mut warnings = Warnings::default();
    let spec = c.rcurve.spec();
    let material = c.rcurve.material();
    if let Some(h) = spec.tip_size {
        if h > material.fracture.ell / 5.0 * (1.0 + 1e-12) {
            warnings.push(format!("tip element size {h} mm exceeds ell/5"));
        }
    }
    let res = run_rcurve(&spec, &material)?;
    if res.ssy_flag {
        let k = res.points.last().map_or(0.0, |p| p.k);
        let rp = irwin_plastic_zone(k, material.mech.sigma_y_at(20.0));
        warnings.push(format!("plastic zone {rp:.2} mm exceeds R/20 = {:.2} mm", spec.outer_radius / 20.0));
    }
    let rows: Vec<Vec<f64>> = res
        .points
        .iter()
        .map(|p| vec![p.k / MPA_SQRT_M, p.j, p.delta_a, if p.ssy_violated { 1.0 } else { 0.0 }])
        .collect();
    write_csv(
        &out.join("rcurve.csv"),
        "crack growth resistance",
        &hash,
        &[col("K", "MPa m^0.5"), col("J", "N/mm"), col("delta_a", "mm"), col("ssy_violated", "-")],
        &rows,
    )?;
    #[derive(serde::Serialize)]
    struct Summary {
        j0: Option<f64>,
        slope: Option<f64>,
        gc_tip: f64,
        j_ratio_elastic: f64,
        element_size: f64,
        ssy_flag: bool,
    }
    let summary = Summary {
        j0: res.j0,
        slope: res.slope,
        gc_tip: res.gc_tip,
        j_ratio_elastic: res.j_ratio_elastic,
        element_size: res.element_size,
        ssy_flag: res.ssy_flag,
    };
    write_json(&out.join("rcurve.json"), &hash, &summary)?;
    match res.j0 {
        Some(j0) => println!("J0 = {j0} N/mm (G_c at tip {} N/mm)", res.gc_tip),
        None => println!("no crack growth up to J = {} N/mm", res.points.last().map_or(0.0, |p| p.j)),
    }
    Ok(warnings)
}

pub fn screen(cfg: &LoadedConfig, out: &Path) -> Result<Warnings> {
    prepare_out(out)?;
    let c = &cfg.config;
    let hash = effective_hash("screen", c)?;
    let s = &c.screen;
    if s.points < 2 || !(s.c_max > 0.0) {
        return Err(Error::Config("screen needs at least 2 points and c_max > 0".into()));
    }
    let grades = [Grade::X80, Grade::X52];
    let rows: Vec<Vec<f64>> = (0..s.points)
        .map(|i| {
            let conc = s.c_max * i as f64 / (s.points - 1) as f64;
            let mut row = vec![conc];
            row.extend(grades.iter().map(|g| g.jic_fit().eval(conc)));
            row.extend(grades.iter().map(|g| degraded_gc(conc, &g.base().fracture)));
            row
        })
        .collect();
    write_csv(
        &out.join("screen.csv"),
        "hydrogen degradation curves",
        &hash,
        &[
            col("C", "wppm"),
            col("JIc_X80", "N/mm"),
            col("JIc_X52", "N/mm"),
            col("Gc_X80", "N/mm"),
            col("Gc_X52", "N/mm"),
        ],
        &rows,
    )?;
    let (b, r) = (c.pipe.wall_thickness, c.pipe.inner_radius);
    let rows: Vec<Vec<f64>> = grades
        .iter()
        .map(|g| {
            let sy = g.jic_fit().sigma_y;
            vec![sy, b, r, analytic_yield_pressure(sy, b, r)]
        })
        .collect();
    write_csv(
        &out.join("yield_pressure.csv"),
        "analytic yield pressure, rows X80 then X52",
        &hash,
        &[col("sigma_y", "MPa"), col("b", "mm"), col("R", "mm"), col("p_y", "MPa")],
        &rows,
    )?;
    for (g, row) in grades.iter().zip(&rows) {
        println!("{} p_y = {:.1} MPa", g.name(), row[3]);
    }
    Ok(Warnings::default())
}
