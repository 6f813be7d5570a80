//! Pressurization: rising internal gas pressure with staggered
//! transport / deformation / phase-field solves and failure detection.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::failure::{analytic_yield_pressure, crack_path, FailureMode, FailureThresholds, YieldRays};
use super::field::MaterialField;
use super::weld::ResidualState;
use crate::fem::{
    extrapolate_to_nodes, gradient_at_qps, interpolate_at_qps, norm_inf, Geometry, LinearSolver, NewtonOptions,
    Pattern,
};
use crate::fracture::{degradation, split_energy, update_history, with_residual, PhaseFieldSolver, RESIDUAL_STIFFNESS};
use crate::hydrogen::{diffusivity_field, total_mass, MassAudit, TransportSolver, TransportStep};
use crate::materials::{plastic_energy, sievert_concentration, HydrogenProps, ROOM_T};
use crate::mech::{MechInputs, MechModel, QpParams, QuadStates, Sym};
use crate::mesh::pipe::PipeSectionSpec;
use crate::mesh::{Mesh2D, Point};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PressureSchedule {
    /// Loading rate [MPa/s].
    pub rate: f64,
    pub p_start: f64,
    pub p_cap: f64,
    /// Pressure increment [MPa].
    pub dp: f64,
}

impl Default for PressureSchedule {
    fn default() -> Self {
        Self { rate: 21e-6, p_start: 0.0, p_cap: 60.0, dp: 0.25 }
    }
}

impl PressureSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate > 0.0 && self.dp > 0.0 && self.p_start >= 0.0 && self.p_cap >= self.p_start) {
            return Err(Error::Invalid("pressure schedule needs rate > 0, dp > 0 and 0 <= p_start <= p_cap".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StaggerOptions {
    /// ‖Δφ‖∞ between passes that ends the fixed-point loop.
    pub tol_phi: f64,
    pub max_passes: usize,
    /// Halvings of a failed increment before declaring a load drop.
    pub bisections: usize,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl Default for StaggerOptions {
    fn default() -> Self {
        Self { tol_phi: 1e-3, max_passes: 10, bisections: 2, newton_tol: 1e-8, newton_max_iter: 25 }
    }
}

impl StaggerOptions {
    fn newton(&self) -> NewtonOptions {
        NewtonOptions { tol: self.newton_tol, max_iter: self.newton_max_iter, ..NewtonOptions::default() }
    }
}

/// Inner-surface radial displacement from the thin-wall elastic relation and
/// the Sievert boundary concentration at pressure `p`.
pub fn apply_pressure_step(p: f64, pipe: &PipeSectionSpec, e: f64, nu: f64, solubility: f64) -> (f64, f64) {
    let r = pipe.inner_radius;
    let u = p * r * r / (pipe.wall_thickness * e) * (1.0 - nu / 2.0);
    (u, sievert_concentration(p, solubility))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncrementRecord {
    pub p: f64,
    pub max_phi: f64,
    pub max_epsp_base: f64,
    pub mass_h: f64,
    pub passes: usize,
    pub newton_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureReport {
    pub mode: FailureMode,
    pub p_max: f64,
    /// Thin-wall yield pressure of the base metal.
    pub p_y: f64,
    /// Broken-node chain from the inner to the outer surface (Cartesian).
    pub crack_path: Vec<Point>,
    /// A failed increment survived no bisection.
    pub load_drop: bool,
    /// Pressure at which the plastic ligament criterion was met, if it was.
    pub p_yield_ligament: Option<f64>,
    pub seeded_nodes: usize,
    pub mass_closure: f64,
    pub increments: Vec<IncrementRecord>,
}

/// Nodal and quadrature fields at the end of the run.
#[derive(Debug, Clone)]
pub struct FieldSnapshot {
    pub p: f64,
    pub u: Vec<[f64; 2]>,
    pub phi: Vec<f64>,
    pub c: Vec<f64>,
    pub states: QuadStates,
}

#[derive(Debug, Clone)]
pub struct PressureOutcome {
    pub report: FailureReport,
    pub snapshot: FieldSnapshot,
}

/// Everything the pressurization stage needs besides mesh and materials.
#[derive(Debug, Clone)]
pub struct PressureInput<'a> {
    pub schedule: PressureSchedule,
    pub stagger: StaggerOptions,
    pub thresholds: FailureThresholds,
    pub residual: Option<&'a ResidualState>,
    /// Nodes held at φ = 1 (pores and defects).
    pub seeded: Vec<usize>,
    pub center: Point,
}

struct Committed {
    p: f64,
    u: Vec<f64>,
    phi: Vec<f64>,
    c: Vec<f64>,
    states: QuadStates,
}

struct Trial {
    u: Vec<f64>,
    phi: Vec<f64>,
    c: Vec<f64>,
    states: QuadStates,
    inflow: crate::hydrogen::StepOutcome,
    passes: usize,
    newton: usize,
}

struct Driver<'a> {
    mesh: &'a Mesh2D,
    geom: &'a Geometry,
    pipe: &'a PipeSectionSpec,
    field: &'a MaterialField,
    input: &'a PressureInput<'a>,
    h2: HydrogenProps,
    e_ref: f64,
    nu_ref: f64,
    frames: Vec<f64>,
    pattern: Arc<Pattern>,
    inner: Vec<usize>,
    outer: Vec<usize>,
    tangential: Vec<usize>,
    params: Vec<QpParams>,
    betas: Vec<f64>,
    ell: Vec<f64>,
    d0: Vec<f64>,
    eps_t: Vec<Sym>,
    mech_linear: LinearSolver,
    pf: PhaseFieldSolver,
    transport: TransportSolver,
}

impl<'a> Driver<'a> {
    fn new(
        mesh: &'a Mesh2D,
        geom: &'a Geometry,
        pipe: &'a PipeSectionSpec,
        field: &'a MaterialField,
        input: &'a PressureInput<'a>,
    ) -> Result<Self> {
        let base = &field.regions[mesh.region_index("base")?];
        let mut tangential = Vec::new();
        for name in ["symmetry_left", "symmetry_right"] {
            tangential.extend_from_slice(mesh.node_set(name)?);
        }
        let nq = geom.qps.len();
        Ok(Self {
            mesh,
            geom,
            pipe,
            field,
            input,
            h2: base.hydrogen.clone(),
            e_ref: base.mech.e.eval(ROOM_T),
            nu_ref: base.mech.nu,
            frames: mesh.polar_frames(input.center),
            pattern: Pattern::from_mesh(mesh, 2),
            inner: mesh.node_set("inner_surface")?.to_vec(),
            outer: mesh.node_set("outer_surface")?.to_vec(),
            tangential,
            params: (0..nq).map(|k| field.params(k, ROOM_T)).collect(),
            betas: (0..nq).map(|k| field.beta(k)).collect(),
            ell: field.ell(),
            d0: field.d0(),
            eps_t: vec![Sym::ZERO; nq],
            mech_linear: LinearSolver::default(),
            pf: PhaseFieldSolver::new(mesh),
            transport: TransportSolver::new(mesh),
        })
    }

    fn model(&self) -> MechModel<'a> {
        MechModel::with_pattern(self.mesh, self.geom, self.frames.clone(), self.pattern.clone())
    }

    fn mech_bcs(&self, p: f64) -> Vec<(usize, f64)> {
        let (ur, _) = apply_pressure_step(p, self.pipe, self.e_ref, self.nu_ref, self.h2.solubility);
        let mut fixed: Vec<(usize, f64)> = self.inner.iter().map(|&n| (2 * n, ur)).collect();
        fixed.extend(self.tangential.iter().map(|&n| (2 * n + 1, 0.0)));
        fixed
    }

    fn initial_states(&self) -> QuadStates {
        let nq = self.geom.qps.len();
        let mut s = QuadStates::new(nq, ROOM_T);
        if let Some(r) = self.input.residual {
            for k in 0..nq {
                s.shift[k] = r.eps_e[k] + r.eps_p[k];
                s.eps[k] = s.shift[k];
                s.eps_e[k] = r.eps_e[k];
                s.eps_p[k] = r.eps_p[k];
                s.eps_bar[k] = r.eps_bar[k];
                s.sigma[k] = r.sigma[k];
            }
        }
        s
    }

    fn driving_energy(&self, states: &QuadStates, h_old: &[f64]) -> Vec<f64> {
        (0..states.len())
            .map(|k| {
                let q = &self.params[k];
                let kb = q.e / (3.0 * (1.0 - 2.0 * q.nu));
                let g = q.e / (2.0 * (1.0 + q.nu));
                let (pos, _) = split_energy(&states.eps_e[k], kb, g);
                let psi_p = plastic_energy(states.eps_bar[k], q.e, q.sigma_y, q.n);
                update_history(h_old[k], pos, psi_p, self.betas[k])
            })
            .collect()
    }

    /// One staggered increment to pressure `p` over wall time `dt`
    /// (no transport when `dt` is zero).
    fn increment(&mut self, from: &Committed, p: f64, dt: f64) -> Result<Trial> {
        let mesh = self.mesh;
        let geom = self.geom;
        let (_, c_star) = apply_pressure_step(p, self.pipe, self.e_ref, self.nu_ref, self.h2.solubility);
        let mut step_out = crate::hydrogen::StepOutcome { c: from.c.clone(), inflow: 0.0, clipped: 0.0 };
        if dt > 0.0 {
            let sh = extrapolate_to_nodes(mesh, &from.states.hydrostatic());
            let grad = gradient_at_qps(mesh, geom, &sh);
            let d = diffusivity_field(mesh, geom, &from.phi, &self.d0, self.h2.k_d, self.h2.phi_th);
            let mut dir: Vec<(usize, f64)> = self.inner.iter().map(|&n| (n, c_star)).collect();
            dir.extend(self.outer.iter().map(|&n| (n, 0.0)));
            let ts = TransportStep { dt, d: &d, grad_sigma_h: &grad, drift: self.h2.drift_coefficient(), dirichlet: &dir };
            step_out = self.transport.step(mesh, geom, &from.c, &ts)?;
        }
        let cq = interpolate_at_qps(mesh, geom, &step_out.c);
        let gc: Vec<f64> = cq.iter().enumerate().map(|(k, &c)| self.field.gc(k, c)).collect();

        let fixed = self.mech_bcs(p);
        let opts = self.input.stagger.newton();
        let mut phi = from.phi.clone();
        let mut u = from.u.clone();
        let mut states = from.states.clone();
        let mut passes = 0;
        let mut newton = 0;
        let model = self.model();
        for _ in 0..self.input.stagger.max_passes {
            passes += 1;
            let phq = interpolate_at_qps(mesh, geom, &phi);
            let g: Vec<(f64, f64)> = phq
                .iter()
                .zip(&self.betas)
                .map(|(&f, &b)| {
                    let (g, gbar) = degradation(f.clamp(0.0, 1.0), b);
                    (with_residual(g, RESIDUAL_STIFFNESS), gbar)
                })
                .collect();
            let inp = MechInputs { params: &self.params, eps_t: &self.eps_t, g: &g, committed: &from.states };
            let (u_new, it) = model.solve(&u, &fixed, &inp, &opts, &mut self.mech_linear)?;
            newton += it;
            let mut next = from.states.clone();
            model.commit(&u_new, &inp, &mut next)?;
            next.history = self.driving_energy(&next, &from.states.history);
            let phi_new =
                self.pf.solve(mesh, geom, &next.history, &gc, &self.ell, &from.phi, &self.input.seeded)?;
            let change = norm_inf(&phi_new.iter().zip(&phi).map(|(a, b)| a - b).collect::<Vec<_>>());
            phi = phi_new;
            u = u_new;
            states = next;
            if change <= self.input.stagger.tol_phi {
                break;
            }
        }
        Ok(Trial { u, phi, c: step_out.c.clone(), states, inflow: step_out, passes, newton })
    }
}

fn is_mech_failure(e: &Error) -> bool {
    matches!(e, Error::Newton(_) | Error::ReturnMap(_) | Error::LinearSolve(_))
}

/// Runs the pressurization stage until cracking, yielding or the pressure cap.
pub fn pressurize(
    mesh: &Mesh2D,
    geom: &Geometry,
    pipe: &PipeSectionSpec,
    field: &MaterialField,
    input: &PressureInput,
) -> Result<PressureOutcome> {
    input.schedule.validate()?;
    let sched = input.schedule;
    let th = input.thresholds;
    let mut drv = Driver::new(mesh, geom, pipe, field, input)?;
    let base_idx = mesh.region_index("base")?;
    let base_sigma_y = field.regions[base_idx].mech.sigma_y.eval(ROOM_T);
    let p_y = analytic_yield_pressure(base_sigma_y, pipe.wall_thickness, pipe.inner_radius);
    let rays = YieldRays::new(mesh, geom, pipe, "base", &th)?;
    let base_qp: Vec<usize> = (0..mesh.element_count())
        .filter(|&e| mesh.elements[e].region == base_idx)
        .flat_map(|e| mesh.quad_points(e))
        .collect();

    let nn = mesh.node_count();
    let mut phi0 = vec![0.0; nn];
    for &n in &input.seeded {
        phi0[n] = 1.0;
    }
    let init = Committed { p: sched.p_start, u: vec![0.0; 2 * nn], phi: phi0, c: vec![0.0; nn], states: drv.initial_states() };
    // Yielding counts plastic strain added by the pressure, not the weld.
    let eps_bar0 = init.states.eps_bar.clone();
    let first = drv.increment(&init, sched.p_start, 0.0).map_err(|e| {
        if is_mech_failure(&e) {
            log::error!("initial equilibrium at p = {} failed", sched.p_start);
        }
        e
    })?;
    let mut audit = MassAudit::new(total_mass(mesh, geom, &init.c));
    let mut cur = Committed { p: sched.p_start, u: first.u, phi: first.phi, c: first.c, states: first.states };
    let mut records = Vec::new();
    let record = |cur: &Committed, passes: usize, newton: usize| IncrementRecord {
        p: cur.p,
        max_phi: cur.phi.iter().fold(0.0, |m: f64, &v| m.max(v)),
        max_epsp_base: base_qp.iter().map(|&k| cur.states.eps_bar[k]).fold(0.0, f64::max),
        mass_h: total_mass(mesh, geom, &cur.c),
        passes,
        newton_iterations: newton,
    };
    records.push(record(&cur, first.passes, first.newton));

    let mut load_drop = false;
    let mut yield_p = None;
    let mut path = None;
    let mode = loop {
        if let Some(pth) = crack_path(mesh, &cur.phi, th.crack_phi, &drv.inner, &drv.outer) {
            path = Some(pth);
            break FailureMode::Cracking;
        }
        let added: Vec<f64> = cur.states.eps_bar.iter().zip(&eps_bar0).map(|(a, b)| a - b).collect();
        if rays.yielded(&added, th.yield_strain).is_some() {
            yield_p = Some(cur.p);
            break FailureMode::Yielding;
        }
        if th.arrest_at_analytic_yield && cur.p >= p_y - 1e-12 {
            break FailureMode::Yielding;
        }
        if cur.p >= sched.p_cap - 1e-12 {
            break FailureMode::CapReached;
        }
        let mut limit = sched.p_cap;
        if th.arrest_at_analytic_yield {
            limit = limit.min(p_y);
        }
        let mut dp = (limit - cur.p).min(sched.dp);
        let mut accepted = None;
        for attempt in 0..=input.stagger.bisections {
            let p = cur.p + dp;
            match drv.increment(&cur, p, dp / sched.rate) {
                Ok(t) => {
                    accepted = Some((p, t));
                    break;
                }
                Err(e) if is_mech_failure(&e) => {
                    log::debug!("increment to p = {p:.4} failed (attempt {}): {e}", attempt + 1);
                    dp *= 0.5;
                }
                Err(e) => return Err(e),
            }
        }
        let Some((p, t)) = accepted else {
            load_drop = true;
            break FailureMode::Cracking;
        };
        audit.record(total_mass(mesh, geom, &t.c), &t.inflow);
        cur = Committed { p, u: t.u, phi: t.phi, c: t.c, states: t.states };
        records.push(record(&cur, t.passes, t.newton));
        log::debug!(
            "p = {:.3} MPa: max φ {:.3}, max ε̄p base {:.4}, passes {}",
            cur.p,
            records.last().map_or(0.0, |r| r.max_phi),
            records.last().map_or(0.0, |r| r.max_epsp_base),
            t.passes
        );
    };
    if mode == FailureMode::Cracking && load_drop {
        path = crack_path(mesh, &cur.phi, th.crack_phi, &drv.inner, &drv.outer);
        if path.is_none() {
            log::info!("load drop at p = {:.3} MPa without a connected crack path", cur.p);
        }
    }
    let model = drv.model();
    let report = FailureReport {
        mode,
        p_max: cur.p,
        p_y,
        crack_path: path.unwrap_or_default(),
        load_drop,
        p_yield_ligament: yield_p,
        seeded_nodes: input.seeded.len(),
        mass_closure: audit.closure(),
        increments: records,
    };
    let snapshot = FieldSnapshot { p: cur.p, u: model.to_cartesian(&cur.u), phi: cur.phi, c: cur.c, states: cur.states };
    Ok(PressureOutcome { report, snapshot })
}
