//! Transient heat conduction for multi-pass welding: backward Euler with
//! lagged properties, Newton on the radiative surface loss, torch phases as
//! Dirichlet data on the weld cavity and bead birth at the melt temperature.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fem::{apply_dirichlet, edge_gauss, norm, CscMatrix, Geometry, LinearSolver, Pattern};
use crate::materials::ThermalProps;
use crate::mesh::{Mesh2D, Point};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeldPass {
    /// Node set receiving the torch temperature.
    pub cavity_set: String,
    pub bead_region: String,
    /// Torch temperature; defaults to the melt temperature.
    pub torch_temperature: Option<f64>,
    pub torch_duration: f64,
    pub dwell: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeldSchedule {
    pub passes: Vec<WeldPass>,
    /// Cool-down stops when max |T − T₀| ≤ tol_t.
    pub tol_t: f64,
}

impl WeldSchedule {
    /// Passes named `weld_pass_k` / `weld_cavity_pass_k` as produced by the
    /// pipe mesher, with the given torch time and dwell.
    pub fn standard(n: usize, torch_duration: f64, dwell: f64) -> Self {
        let passes = (1..=n)
            .map(|k| WeldPass {
                cavity_set: format!("weld_cavity_pass_{k}"),
                bead_region: format!("weld_pass_{k}"),
                torch_temperature: None,
                torch_duration,
                dwell,
            })
            .collect();
        Self { passes, tol_t: 0.5 }
    }

    pub fn validate(&self, mesh: &Mesh2D) -> Result<()> {
        let mut seen = HashSet::new();
        for p in &self.passes {
            mesh.node_set(&p.cavity_set)?;
            mesh.region_index(&p.bead_region)?;
            if !seen.insert(p.bead_region.as_str()) {
                return Err(Error::Invalid(format!("bead region `{}` used twice", p.bead_region)));
            }
            if !(p.torch_duration >= 0.0) || !(p.dwell > 0.0) {
                return Err(Error::Invalid("torch duration must be ≥ 0 and dwell > 0".into()));
            }
        }
        if !(self.tol_t > 0.0) {
            return Err(Error::Invalid("cool-down tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalOptions {
    pub lumped: bool,
    pub dt_initial: f64,
    pub dt_max: f64,
    pub growth: f64,
    pub max_halvings: usize,
    /// Target nodal temperature change per step [°C].
    pub dtemp_target: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl Default for ThermalOptions {
    fn default() -> Self {
        Self {
            lumped: false,
            dt_initial: 0.05,
            dt_max: 200.0,
            growth: 1.3,
            max_halvings: 6,
            dtemp_target: 60.0,
            newton_tol: 1e-9,
            newton_max_iter: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalState {
    pub t: Vec<f64>,
    pub time: f64,
}

/// Volumetric source term q(x, t) [mW/mm³] for verification problems.
pub type Source<'a> = &'a dyn Fn(Point, f64) -> f64;

pub struct ThermalSolver {
    pub props: ThermalProps,
    pub opts: ThermalOptions,
    pattern: Arc<Pattern>,
    linear: LinearSolver,
    adiabatic: HashSet<(usize, usize)>,
}

impl ThermalSolver {
    /// `adiabatic_sets` name edge sets that never exchange heat (symmetry
    /// planes).
    pub fn new(mesh: &Mesh2D, props: ThermalProps, opts: ThermalOptions, adiabatic_sets: &[&str]) -> Result<Self> {
        props.validate()?;
        let mut adiabatic = HashSet::new();
        for name in adiabatic_sets {
            for &(e, k) in mesh.edge_set(name)? {
                let (a, b) = mesh.elements[e].edge(k);
                adiabatic.insert((a.min(b), a.max(b)));
            }
        }
        Ok(Self { props, opts, pattern: Pattern::from_mesh(mesh, 1), linear: LinearSolver::default(), adiabatic })
    }

    /// Exterior edges of the active domain that exchange heat.
    pub fn flux_edges(&self, mesh: &Mesh2D) -> Vec<(usize, usize)> {
        mesh.exterior_edges()
            .into_iter()
            .map(|(e, k)| mesh.elements[e].edge(k))
            .filter(|&(a, b)| !self.adiabatic.contains(&(a.min(b), a.max(b))))
            .collect()
    }

    /// One backward-Euler step of length `dt` from `state`.
    pub fn step(
        &mut self,
        mesh: &Mesh2D,
        geom: &Geometry,
        state: &ThermalState,
        dt: f64,
        dirichlet: &[(usize, f64)],
        source: Option<Source>,
    ) -> Result<ThermalState> {
        let nn = mesh.node_count();
        let t_new = state.time + dt;
        let p = &self.props;
        // Linear part with lagged properties: (C/dt + K) T = C/dt T_old + F.
        let mut base = CscMatrix::zeros(self.pattern.clone());
        let mut rhs = vec![0.0; nn];
        let mut ke = [0.0; 16];
        for e in 0..mesh.element_count() {
            if !mesh.is_active(e) {
                continue;
            }
            let nodes = mesh.elements[e].nodes();
            let m = nodes.len();
            ke[..m * m].iter_mut().for_each(|v| *v = 0.0);
            for q in geom.element(mesh, e) {
                let t_q: f64 = (0..m).map(|a| q.n[a] * state.t[nodes[a]]).sum();
                let cap = p.rho * p.c.eval(t_q) / dt;
                let k = p.k.eval(t_q);
                let f = source.map_or(0.0, |s| s(q.x, t_new));
                for a in 0..m {
                    let old = if self.opts.lumped { state.t[nodes[a]] } else { t_q };
                    rhs[nodes[a]] += q.w * q.n[a] * (f + cap * old);
                    for b in 0..m {
                        let mass = match (self.opts.lumped, a == b) {
                            (true, true) => q.n[a],
                            (true, false) => 0.0,
                            _ => q.n[a] * q.n[b],
                        };
                        ke[a * m + b] += q.w
                            * (cap * mass + k * (q.dn[a][0] * q.dn[b][0] + q.dn[a][1] * q.dn[b][1]));
                    }
                }
            }
            base.add_block(e, nodes, &ke[..m * m])?;
        }
        let edges = self.flux_edges(mesh);
        let active = mesh.active_nodes();
        let mut fixed: Vec<(usize, f64)> = (0..nn).filter(|&n| !active[n]).map(|n| (n, state.t[n])).collect();
        fixed.extend(dirichlet.iter().copied());

        let mut t = state.t.clone();
        for &(n, v) in &fixed {
            t[n] = v;
        }
        let has_flux = p.h_c > 0.0 || p.emissivity > 0.0;
        let mut r0 = None;
        for _ in 0..self.opts.newton_max_iter {
            let mut jac = base.clone();
            let mut res = jac.matvec(&t);
            for (r, f) in res.iter_mut().zip(&rhs) {
                *r -= f;
            }
            if has_flux {
                for &(a, b) in &edges {
                    for (na, nb, w) in edge_gauss(mesh.nodes[a], mesh.nodes[b]) {
                        let ts = na * t[a] + nb * t[b];
                        let q = p.surface_flux(ts);
                        let dq = p.surface_flux_slope(ts);
                        res[a] += w * na * q;
                        res[b] += w * nb * q;
                        jac.add(a, a, w * na * na * dq);
                        jac.add(a, b, w * na * nb * dq);
                        jac.add(b, a, w * nb * na * dq);
                        jac.add(b, b, w * nb * nb * dq);
                    }
                }
            }
            let zero: Vec<(usize, f64)> = fixed.iter().map(|&(d, _)| (d, 0.0)).collect();
            apply_dirichlet(&mut jac, &mut res, &zero);
            let rn = norm(&res);
            let scale = *r0.get_or_insert(rn.max(1e-300));
            if !rn.is_finite() {
                break;
            }
            if rn <= self.opts.newton_tol * scale.max(1.0) {
                return Ok(ThermalState { t, time: t_new });
            }
            let neg: Vec<f64> = res.iter().map(|v| -v).collect();
            let dx = self.linear.solve_spd(&jac, &neg)?;
            for (ti, d) in t.iter_mut().zip(&dx) {
                *ti += d;
            }
            if !has_flux {
                return Ok(ThermalState { t, time: t_new });
            }
        }
        Err(Error::Newton(Box::new(crate::error::NewtonFailure {
            last_iterate: t,
            iterations: self.opts.newton_max_iter,
            residual_norm: f64::NAN,
        })))
    }

    /// Heat content ∫ρcT over the active domain with properties at `t`.
    pub fn enthalpy(&self, mesh: &Mesh2D, geom: &Geometry, t: &[f64]) -> f64 {
        let mut total = 0.0;
        for e in 0..mesh.element_count() {
            if !mesh.is_active(e) {
                continue;
            }
            let nodes = mesh.elements[e].nodes();
            for q in geom.element(mesh, e) {
                let tq: f64 = nodes.iter().enumerate().map(|(a, &n)| q.n[a] * t[n]).sum();
                total += q.w * self.props.rho * self.props.c.eval(tq) * tq;
            }
        }
        total
    }
}

/// Hooks called by [`run_schedule`].
pub trait ThermalObserver {
    /// Elements just born at the melt temperature.
    fn activated(&mut self, _mesh: &Mesh2D, _state: &ThermalState, _elements: &[usize]) -> Result<()> {
        Ok(())
    }

    /// A thermal step was computed. Returning `false` rejects it and the step
    /// is retried with half the time increment.
    fn step(&mut self, _mesh: &Mesh2D, _previous: &ThermalState, _state: &ThermalState) -> Result<bool> {
        Ok(true)
    }
}

impl ThermalObserver for () {}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSeries {
    pub name: String,
    pub node: usize,
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct ScheduleResult {
    pub final_state: ThermalState,
    pub probes: Vec<ProbeSeries>,
    pub snapshots: Vec<ThermalState>,
    pub steps: usize,
    /// (torch start, bead birth, dwell end) per pass.
    pub pass_times: Vec<(f64, f64, f64)>,
}

fn nearest_node(mesh: &Mesh2D, p: Point) -> usize {
    (0..mesh.node_count())
        .min_by(|&a, &b| {
            let da = (mesh.nodes[a][0] - p[0]).powi(2) + (mesh.nodes[a][1] - p[1]).powi(2);
            let db = (mesh.nodes[b][0] - p[0]).powi(2) + (mesh.nodes[b][1] - p[1]).powi(2);
            da.total_cmp(&db)
        })
        .unwrap_or(0)
}

struct Runner<'a, 'o> {
    solver: &'a mut ThermalSolver,
    geom: &'a Geometry,
    observer: &'o mut dyn ThermalObserver,
    probes: Vec<ProbeSeries>,
    sample_times: Vec<f64>,
    snapshots: Vec<ThermalState>,
    steps: usize,
    dt: f64,
}

impl Runner<'_, '_> {
    fn record(&mut self, state: &ThermalState) {
        for p in &mut self.probes {
            p.samples.push((state.time, state.t[p.node]));
        }
        while let Some(&ts) = self.sample_times.first() {
            if state.time + 1e-9 >= ts {
                self.snapshots.push(state.clone());
                self.sample_times.remove(0);
            } else {
                break;
            }
        }
    }

    /// Advances until `until` (or until `stop` holds when `until` is infinite).
    fn advance(
        &mut self,
        mesh: &Mesh2D,
        state: &mut ThermalState,
        until: f64,
        dirichlet: &[(usize, f64)],
        stop: &dyn Fn(&ThermalState) -> bool,
    ) -> Result<()> {
        let o = self.solver.opts;
        while state.time < until - 1e-9 && !stop(state) {
            let mut dt = self.dt.min(o.dt_max).min(until - state.time);
            let mut halvings = 0;
            loop {
                let attempt = self.solver.step(mesh, self.geom, state, dt, dirichlet, None);
                let ok = match attempt {
                    Ok(next) => {
                        let change = next.t.iter().zip(&state.t).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                        if change > 2.0 * o.dtemp_target && halvings < o.max_halvings {
                            None
                        } else if self.observer.step(mesh, state, &next)? {
                            Some((next, change))
                        } else {
                            None
                        }
                    }
                    Err(Error::Newton(_)) | Err(Error::LinearSolve(_)) => None,
                    Err(e) => return Err(e),
                };
                match ok {
                    Some((next, change)) => {
                        let factor = if change > 0.0 { (o.dtemp_target / change).min(o.growth) } else { o.growth };
                        self.dt = (dt * factor.max(0.5)).min(o.dt_max);
                        *state = next;
                        self.steps += 1;
                        self.record(state);
                        break;
                    }
                    None => {
                        halvings += 1;
                        if halvings > o.max_halvings {
                            return Err(Error::StepCollapse(dt));
                        }
                        dt *= 0.5;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Runs the weld schedule on `mesh`. Bead regions are deactivated first and
/// born in order; the observer sees every accepted step.
pub fn run_schedule(
    mesh: &mut Mesh2D,
    geom: &Geometry,
    solver: &mut ThermalSolver,
    schedule: &WeldSchedule,
    probes: &[(String, Point)],
    sample_times: &[f64],
    observer: &mut dyn ThermalObserver,
) -> Result<ScheduleResult> {
    schedule.validate(mesh)?;
    for p in &schedule.passes {
        mesh.deactivate(&p.bead_region)?;
    }
    let t0 = solver.props.t0;
    let t_melt = solver.props.t_melt;
    let mut state = ThermalState { t: vec![t0; mesh.node_count()], time: 0.0 };
    let mut sample_times = sample_times.to_vec();
    sample_times.sort_by(f64::total_cmp);
    let dt0 = solver.opts.dt_initial;
    let mut run = Runner {
        solver,
        geom,
        observer,
        probes: probes
            .iter()
            .map(|(name, p)| ProbeSeries { name: name.clone(), node: nearest_node(mesh, *p), samples: Vec::new() })
            .collect(),
        sample_times,
        snapshots: Vec::new(),
        steps: 0,
        dt: dt0,
    };
    run.record(&state);
    let never = |_: &ThermalState| false;
    let mut pass_times = Vec::new();
    for pass in &schedule.passes {
        let start = state.time;
        let tstar = pass.torch_temperature.unwrap_or(t_melt);
        if pass.torch_duration > 0.0 {
            let cavity: Vec<(usize, f64)> = mesh.node_set(&pass.cavity_set)?.iter().map(|&n| (n, tstar)).collect();
            for &(n, v) in &cavity {
                state.t[n] = v;
            }
            run.dt = dt0;
            let end = state.time + pass.torch_duration;
            run.advance(mesh, &mut state, end, &cavity, &never)?;
        }
        let born = mesh.activate(&pass.bead_region)?;
        for &e in &born {
            for &n in mesh.elements[e].nodes() {
                state.t[n] = t_melt;
            }
        }
        let birth = state.time;
        run.observer.activated(mesh, &state, &born)?;
        run.record(&state);
        run.dt = dt0;
        let end = state.time + pass.dwell;
        run.advance(mesh, &mut state, end, &[], &never)?;
        pass_times.push((start, birth, state.time));
    }
    let tol = schedule.tol_t;
    let cooled = move |s: &ThermalState| s.t.iter().all(|&v| (v - t0).abs() <= tol);
    run.advance(mesh, &mut state, f64::INFINITY, &[], &cooled)?;
    let steps = run.steps;
    Ok(ScheduleResult { final_state: state, probes: run.probes, snapshots: run.snapshots, steps, pass_times })
}

/// Number of strict local maxima above `threshold` in a sampled history.
pub fn count_peaks(samples: &[(f64, f64)], threshold: f64) -> usize {
    let mut count = 0;
    let mut rising = false;
    let mut last = f64::NEG_INFINITY;
    for &(_, v) in samples {
        if v > last + 1e-9 {
            rising = true;
        } else if v < last - 1e-9 {
            if rising && last > threshold {
                count += 1;
            }
            rising = false;
        }
        last = v;
    }
    if rising && last > threshold {
        count += 1;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::Table;
    use crate::mesh::grid;
    use std::f64::consts::PI;

    fn unit_props(k: f64) -> ThermalProps {
        ThermalProps {
            rho: 1.0,
            c: Table::constant(1.0),
            k: Table::constant(k),
            alpha: Table::constant(0.0),
            h_c: 0.0,
            emissivity: 0.0,
            t0: 0.0,
            ..ThermalProps::default()
        }
    }

    #[test]
    fn equilibrium_is_preserved() {
        let m = grid::rectangle(0.0, 4.0, 0.0, 2.0, 4, 2);
        let g = Geometry::new(&m);
        let mut s = ThermalSolver::new(&m, ThermalProps::default(), ThermalOptions::default(), &[]).unwrap();
        let st = ThermalState { t: vec![20.0; m.node_count()], time: 0.0 };
        let next = s.step(&m, &g, &st, 1.0, &[], None).unwrap();
        assert!(next.t.iter().all(|&v| (v - 20.0).abs() < 1e-12));
    }

    #[test]
    fn radiative_flux_at_melt() {
        let p = ThermalProps::default();
        assert!((p.radiative_flux(1500.0) - 449.5).abs() < 0.5, "{}", p.radiative_flux(1500.0));
    }

    /// L2 error of T = sin(πx)·f(t) on a 1D slab with Dirichlet ends.
    fn mms_error(nx: usize, dt: f64, f: &dyn Fn(f64) -> f64, df: &dyn Fn(f64) -> f64, t_end: f64) -> f64 {
        let k = 0.1;
        let m = grid::rectangle(0.0, 1.0, 0.0, 0.02, nx, 1);
        let g = Geometry::new(&m);
        let mut s = ThermalSolver::new(&m, unit_props(k), ThermalOptions::default(), &[]).unwrap();
        let exact = |x: f64, t: f64| (PI * x).sin() * f(t);
        let src = |p: Point, t: f64| (PI * p[0]).sin() * (df(t) + k * PI * PI * f(t));
        let ends: Vec<usize> = (0..m.node_count()).filter(|&n| m.nodes[n][0] < 1e-12 || m.nodes[n][0] > 1.0 - 1e-12).collect();
        let bc: Vec<(usize, f64)> = ends.iter().map(|&n| (n, 0.0)).collect();
        let mut st = ThermalState { t: m.nodes.iter().map(|p| exact(p[0], 0.0)).collect(), time: 0.0 };
        let steps = (t_end / dt).round() as usize;
        for _ in 0..steps {
            st = s.step(&m, &g, &st, dt, &bc, Some(&src)).unwrap();
        }
        let mut err = 0.0;
        for e in 0..m.element_count() {
            let nodes = m.elements[e].nodes();
            for q in g.element(&m, e) {
                let th: f64 = nodes.iter().enumerate().map(|(a, &n)| q.n[a] * st.t[n]).sum();
                err += q.w * (th - exact(q.x[0], st.time)).powi(2);
            }
        }
        (err / 0.02).sqrt()
    }

    #[test]
    fn manufactured_solution_first_order_in_time() {
        let lam = 2.0;
        let f = move |t: f64| (-lam * t).exp();
        let df = move |t: f64| -lam * (-lam * t).exp();
        let e: Vec<f64> = [0.1, 0.05, 0.025].iter().map(|&dt| mms_error(400, dt, &f, &df, 0.5)).collect();
        let r1 = (e[0] / e[1]).log2();
        let r2 = (e[1] / e[2]).log2();
        assert!(r1 > 0.85 && r1 < 1.2 && r2 > 0.85 && r2 < 1.2, "{e:?}");
    }

    #[test]
    fn manufactured_solution_second_order_in_space() {
        // linear in time: backward Euler is exact, only the mesh error remains
        let f = |t: f64| 1.0 + t;
        let df = |_: f64| 1.0;
        let e: Vec<f64> = [8, 16, 32].iter().map(|&n| mms_error(n, 0.1, &f, &df, 0.5)).collect();
        let r = (e[1] / e[2]).log2();
        assert!(r > 1.8 && r < 2.2, "{e:?}");
    }

    #[test]
    fn insulated_body_conserves_enthalpy() {
        let m = grid::rectangle(0.0, 3.0, 0.0, 1.0, 12, 4);
        let g = Geometry::new(&m);
        let mut s = ThermalSolver::new(&m, unit_props(0.5), ThermalOptions::default(), &[]).unwrap();
        let mut st = ThermalState { t: m.nodes.iter().map(|p| 100.0 * (p[0] - 1.0).abs() + 20.0).collect(), time: 0.0 };
        let h0 = s.enthalpy(&m, &g, &st.t);
        for _ in 0..10 {
            st = s.step(&m, &g, &st, 0.3, &[], None).unwrap();
        }
        assert!((s.enthalpy(&m, &g, &st.t) - h0).abs() / h0 < 1e-10);
    }

    #[test]
    fn lumped_maximum_principle() {
        let m = grid::rectangle(0.0, 2.0, 0.0, 1.0, 16, 8);
        let g = Geometry::new(&m);
        let opts = ThermalOptions { lumped: true, ..Default::default() };
        let mut s = ThermalSolver::new(&m, ThermalProps::default(), opts, &[]).unwrap();
        let left: Vec<(usize, f64)> = m.node_set("left").unwrap().iter().map(|&n| (n, 1500.0)).collect();
        let mut st = ThermalState { t: vec![20.0; m.node_count()], time: 0.0 };
        for &(n, v) in &left {
            st.t[n] = v;
        }
        for _ in 0..20 {
            st = s.step(&m, &g, &st, 0.5, &left, None).unwrap();
            assert!(st.t.iter().all(|&v| (20.0 - 1e-9..=1500.0 + 1e-9).contains(&v)));
        }
    }

    fn two_pass_plate() -> Mesh2D {
        // 10 x 4 plate, two stacked beads in a notch at the top middle
        let mut m = grid::rectangle(-5.0, 5.0, 0.0, 4.0, 20, 8);
        let pass = |m: &Mesh2D, y0: f64, y1: f64| -> Vec<usize> {
            (0..m.element_count())
                .filter(|&e| {
                    let c = m.centroid(e);
                    c[0].abs() < 1.0 && c[1] > y0 && c[1] < y1
                })
                .collect()
        };
        let p1 = pass(&m, 2.0, 3.0);
        let p2 = pass(&m, 3.0, 4.0);
        m.assign_region("weld_pass_1", &p1);
        m.assign_region("weld_pass_2", &p2);
        for (k, els) in [(1, &p1), (2, &p2)] {
            let later: HashSet<usize> = if k == 1 { p1.iter().chain(&p2).copied().collect() } else { p2.iter().copied().collect() };
            let inside: HashSet<usize> = els.iter().flat_map(|&e| m.elements[e].nodes().to_vec()).collect();
            let outside: HashSet<usize> = (0..m.element_count())
                .filter(|e| !later.contains(e))
                .flat_map(|e| m.elements[e].nodes().to_vec())
                .collect();
            let mut cav: Vec<usize> = inside.intersection(&outside).copied().collect();
            cav.sort_unstable();
            m.add_node_set(&format!("weld_cavity_pass_{k}"), cav).unwrap();
        }
        m
    }

    #[test]
    fn schedule_peaks_once_per_pass_and_cools() {
        let mut m = two_pass_plate();
        let g = Geometry::new(&m);
        let mut s = ThermalSolver::new(&m, ThermalProps::default(), ThermalOptions::default(), &["left", "right"]).unwrap();
        let sched = WeldSchedule::standard(2, 1.0, 10.0);
        let probes = vec![("near".to_string(), [1.5, 2.5])];
        let res = run_schedule(&mut m, &g, &mut s, &sched, &probes, &[], &mut ()).unwrap();
        assert!(res.final_state.t.iter().all(|&v| (v - 20.0).abs() <= 0.5));
        assert_eq!(count_peaks(&res.probes[0].samples, 100.0), 2);
        assert_eq!(res.pass_times.len(), 2);
    }

    #[test]
    fn beads_are_born_at_melt_temperature() {
        struct Check(bool);
        impl ThermalObserver for Check {
            fn activated(&mut self, mesh: &Mesh2D, st: &ThermalState, els: &[usize]) -> Result<()> {
                self.0 = els.iter().all(|&e| mesh.elements[e].nodes().iter().all(|&n| st.t[n] == 1500.0));
                Ok(())
            }
        }
        let mut m = two_pass_plate();
        let g = Geometry::new(&m);
        let mut s = ThermalSolver::new(&m, ThermalProps::default(), ThermalOptions::default(), &[]).unwrap();
        let mut sched = WeldSchedule::standard(1, 0.0, 10.0);
        sched.tol_t = 400.0;
        let mut chk = Check(false);
        run_schedule(&mut m, &g, &mut s, &sched, &[], &[], &mut chk).unwrap();
        assert!(chk.0);
    }
}
