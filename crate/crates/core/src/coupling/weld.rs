//! Sequential thermo-mechanical weld simulation with element birth.

use std::sync::Arc;

use super::field::MaterialField;
use crate::fem::{interpolate_at_qps, Geometry, LinearSolver, NewtonOptions, Pattern};
use crate::materials::ThermalProps;
use crate::mech::{thermal_strain, MechInputs, MechModel, QpParams, QuadStates, Sym};
use crate::mesh::pipe::PipeSectionSpec;
use crate::mesh::{Mesh2D, Point};
use crate::thermal::{run_schedule, ScheduleResult, ThermalObserver, ThermalOptions, ThermalSolver, ThermalState, WeldSchedule};
use crate::{Error, Result};

/// Mechanical state left by the weld, per quadrature point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualState {
    pub eps_e: Vec<Sym>,
    pub eps_p: Vec<Sym>,
    pub eps_bar: Vec<f64>,
    pub sigma: Vec<Sym>,
}

impl ResidualState {
    pub fn from_states(s: &QuadStates) -> Self {
        Self { eps_e: s.eps_e.clone(), eps_p: s.eps_p.clone(), eps_bar: s.eps_bar.clone(), sigma: s.sigma.clone() }
    }

    pub fn len(&self) -> usize {
        self.eps_bar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps_bar.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct WeldOutcome {
    pub residual: ResidualState,
    pub thermal: ScheduleResult,
    /// Nodal Cartesian displacement at the end of cooling.
    pub displacement: Vec<[f64; 2]>,
    /// (t, ε̄_p) at the monitored quadrature point after every step.
    pub probe_plastic_strain: Vec<(f64, f64)>,
    pub probe_qp: Option<usize>,
}

/// Configuration of the weld stage.
#[derive(Debug, Clone)]
pub struct WeldSetup {
    pub schedule: WeldSchedule,
    pub thermal: ThermalProps,
    pub thermal_options: ThermalOptions,
    pub newton: NewtonOptions,
    /// Node sets whose circumferential displacement is fixed.
    pub symmetry_sets: Vec<String>,
    /// Node sets whose frame component 0 is fixed (rigid-body anchors).
    pub anchor_sets: Vec<String>,
    /// Pipe centre for nodal frames.
    pub center: Point,
    pub probe: Option<Point>,
}

impl WeldSetup {
    /// Standard schedule for a pipe section: one pass per bead polygon, cut
    /// faces as symmetry planes, probe in the HAZ beside the last pass.
    pub fn for_pipe(pipe: &PipeSectionSpec) -> Self {
        Self {
            schedule: WeldSchedule::standard(pipe.passes.len(), 5.0, 10.0),
            thermal: ThermalProps::default(),
            thermal_options: ThermalOptions::default(),
            newton: NewtonOptions::default(),
            symmetry_sets: vec!["symmetry_left".into(), "symmetry_right".into()],
            anchor_sets: Vec::new(),
            center: [0.0, 0.0],
            probe: Some(pipe.to_global([5.6, 5.5])),
        }
    }
}

struct WeldMech<'f> {
    geom: &'f Geometry,
    field: &'f MaterialField,
    thermal: &'f ThermalProps,
    newton: NewtonOptions,
    pattern: Arc<Pattern>,
    frames: Vec<f64>,
    fixed: Vec<(usize, f64)>,
    linear: LinearSolver,
    u: Vec<f64>,
    states: QuadStates,
    probe: Option<usize>,
    probe_hist: Vec<(f64, f64)>,
    failures: usize,
}

impl WeldMech<'_> {
    fn inputs_at(&self, temps: &[f64]) -> (Vec<QpParams>, Vec<Sym>) {
        let params = (0..temps.len()).map(|k| self.field.params(k, temps[k])).collect();
        let eps_t = temps.iter().map(|&t| thermal_strain(t, self.thermal)).collect();
        (params, eps_t)
    }
}

impl ThermalObserver for WeldMech<'_> {
    fn activated(&mut self, mesh: &Mesh2D, state: &ThermalState, elements: &[usize]) -> Result<()> {
        let model = MechModel::with_pattern(mesh, self.geom, self.frames.clone(), self.pattern.clone());
        let strains = model.strains(&self.u);
        let born = thermal_strain(self.thermal.t_melt, self.thermal);
        let temps = interpolate_at_qps(mesh, self.geom, &state.t);
        for &e in elements {
            for k in mesh.quad_points(e) {
                self.states.reset_point(k);
                // Stress-free at birth: ε(u) + shift − ε_T = 0.
                self.states.shift[k] = born - strains[k];
                self.states.eps[k] = born;
                self.states.eps_t[k] = born;
                self.states.temp[k] = temps[k];
            }
        }
        Ok(())
    }

    fn step(&mut self, mesh: &Mesh2D, _prev: &ThermalState, next: &ThermalState) -> Result<bool> {
        let temps = interpolate_at_qps(mesh, self.geom, &next.t);
        let (params, eps_t) = self.inputs_at(&temps);
        let g = vec![(1.0, 1.0); temps.len()];
        let model = MechModel::with_pattern(mesh, self.geom, self.frames.clone(), self.pattern.clone());
        let inp = MechInputs { params: &params, eps_t: &eps_t, g: &g, committed: &self.states };
        match model.solve(&self.u, &self.fixed, &inp, &self.newton, &mut self.linear) {
            Ok((u, _)) => {
                let mut next_states = self.states.clone();
                model.commit(&u, &inp, &mut next_states)?;
                for (k, &t) in temps.iter().enumerate() {
                    if mesh.is_active(mesh_element_of(mesh, k)) {
                        next_states.temp[k] = t;
                    }
                }
                self.states = next_states;
                self.u = u;
                if let Some(k) = self.probe {
                    self.probe_hist.push((next.time, self.states.eps_bar[k]));
                }
                Ok(true)
            }
            Err(Error::Newton(_) | Error::ReturnMap(_) | Error::LinearSolve(_)) => {
                self.failures += 1;
                log::debug!("weld mechanics rejected step at t = {:.3}", next.time);
                Ok(false)
            }
            Err(e) => Err(e),
        }
    }
}

fn mesh_element_of(mesh: &Mesh2D, k: usize) -> usize {
    // quadrature offsets are monotone in the element index
    let (mut lo, mut hi) = (0, mesh.element_count());
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if mesh.quad_points(mid).start <= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Runs the weld schedule with the sequentially coupled mechanics and returns
/// the cooled residual state. The mesh is left with every element active.
pub fn simulate_weld(mesh: &mut Mesh2D, geom: &Geometry, field: &MaterialField, setup: &WeldSetup) -> Result<WeldOutcome> {
    let frames = mesh.polar_frames(setup.center);
    let mut fixed = Vec::new();
    for name in &setup.symmetry_sets {
        for &n in mesh.node_set(name)? {
            fixed.push((2 * n + 1, 0.0));
        }
    }
    for name in &setup.anchor_sets {
        for &n in mesh.node_set(name)? {
            fixed.push((2 * n, 0.0));
        }
    }
    let probe_qp = setup.probe.map(|p| {
        (0..geom.qps.len())
            .min_by(|&a, &b| dist2(geom.qps[a].x, p).total_cmp(&dist2(geom.qps[b].x, p)))
            .unwrap_or(0)
    });
    let nq = mesh.quad_point_count();
    let mut obs = WeldMech {
        geom,
        field,
        thermal: &setup.thermal,
        newton: setup.newton,
        pattern: Pattern::from_mesh(mesh, 2),
        frames,
        fixed,
        linear: LinearSolver::default(),
        u: vec![0.0; 2 * mesh.node_count()],
        states: QuadStates::new(nq, setup.thermal.t0),
        probe: probe_qp,
        probe_hist: Vec::new(),
        failures: 0,
    };
    let adiabatic: Vec<&str> = setup.symmetry_sets.iter().map(String::as_str).collect();
    let mut solver = ThermalSolver::new(mesh, setup.thermal.clone(), setup.thermal_options, &adiabatic)?;
    let probes: Vec<(String, Point)> = setup.probe.iter().map(|&p| ("probe".to_string(), p)).collect();
    let thermal = run_schedule(mesh, geom, &mut solver, &setup.schedule, &probes, &[], &mut obs)?;
    if obs.failures > 0 {
        log::info!("weld mechanics forced {} step reductions", obs.failures);
    }
    let model = MechModel::with_pattern(mesh, geom, obs.frames.clone(), obs.pattern.clone());
    let displacement = model.to_cartesian(&obs.u);
    Ok(WeldOutcome {
        residual: ResidualState::from_states(&obs.states),
        thermal,
        displacement,
        probe_plastic_strain: obs.probe_hist,
        probe_qp,
    })
}

/// Circumferential stress sampled through the wall at local lateral
/// position `x`: `(depth, σ_θθ)` at `n` depths, nearest quadrature point each.
pub fn through_wall_hoop(geom: &Geometry, pipe: &PipeSectionSpec, sigma: &[Sym], x: f64, n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|i| {
            let d = (i as f64 + 0.5) / n as f64 * pipe.wall_thickness;
            let p = pipe.to_global([x, d]);
            let k = (0..geom.qps.len())
                .min_by(|&a, &b| dist2(geom.qps[a].x, p).total_cmp(&dist2(geom.qps[b].x, p)))
                .unwrap_or(0);
            let q = geom.qps[k].x;
            [d, sigma[k].rotated(q[1].atan2(q[0])).0[1]]
        })
        .collect()
}

fn dist2(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}
