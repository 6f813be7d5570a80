//! Boundary-layer crack growth resistance harness: a half model with a
//! remote mode-I K-field on the outer boundary, a traction-free crack face
//! and a symmetric ligament.

use serde::{Deserialize, Serialize};

use crate::coupling::{MaterialField, StaggerOptions};
use crate::fem::{interpolate_at_qps, norm_inf, Geometry, LinearSolver, NewtonOptions, Pattern};
use crate::fracture::{
    degradation, split_energy, update_history, with_residual, PhaseFieldSolver, CRACK_THRESHOLD, RESIDUAL_STIFFNESS,
};
use crate::hydrogen::{diffusivity_field, TransportSolver, TransportStep};
use crate::materials::{plastic_energy, RegionMaterial, ROOM_T};
use crate::mech::{MechInputs, MechModel, QpParams, QuadStates, Sym};
use crate::mesh::grid::{graded_line, tensor};
use crate::mesh::Mesh2D;
use crate::{Error, Result};

/// 1 MPa√m in MPa√mm.
pub const MPA_SQRT_M: f64 = 31.622776601683793;

/// Williams mode-I displacement at polar position (r, θ) about the tip.
pub fn k_field_displacement(k: f64, r: f64, theta: f64, e: f64, nu: f64) -> (f64, f64) {
    let a = k / e * r.sqrt() * (1.0 + nu) / (2.0 * std::f64::consts::PI).sqrt() * (3.0 - 4.0 * nu - theta.cos());
    (a * (0.5 * theta).cos(), a * (0.5 * theta).sin())
}

/// Irwin plastic zone length (1/3π)(K/σ_y)².
pub fn irwin_plastic_zone(k: f64, sigma_y: f64) -> f64 {
    (k / sigma_y).powi(2) / (3.0 * std::f64::consts::PI)
}

/// Plane-strain J from K.
pub fn j_from_k(k: f64, e: f64, nu: f64) -> f64 {
    k * k * (1.0 - nu * nu) / e
}

pub fn k_from_j(j: f64, e: f64, nu: f64) -> f64 {
    (j * e / (1.0 - nu * nu)).sqrt()
}

/// Hydrogen in the specimen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum RcurveHydrogen {
    /// Uniform pre-charge [wppm].
    Uniform { c: f64 },
    /// Initially hydrogen-free, crack faces held at `c` [wppm].
    Transient { c: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundaryLayerSpec {
    /// Half-width and height of the model [mm].
    pub outer_radius: f64,
    /// Element size near the ligament [mm]; defaults to ℓ/10.
    pub tip_size: Option<f64>,
    /// Refined band: behind the tip, ahead of it and above the ligament [mm].
    pub fine_behind: f64,
    pub fine_ahead: f64,
    pub fine_height: f64,
    pub growth: f64,
    pub coarse_size: f64,
    /// Loading rate [MPa√mm/s].
    pub k_rate: f64,
    /// J increment as a fraction of G_c(C) [-].
    pub dj_fraction: f64,
    /// First J as a fraction of G_c(C) [-].
    pub j_start_fraction: f64,
    pub delta_a_max: f64,
    /// Give up at this multiple of G_c(C).
    pub j_max_fraction: f64,
    pub hydrogen: RcurveHydrogen,
    pub stagger: StaggerOptions,
    /// Hold φ = 1 on the initial crack faces.
    pub damaged_notch: bool,
}

impl Default for BoundaryLayerSpec {
    fn default() -> Self {
        Self {
            outer_radius: 400.0,
            tip_size: None,
            fine_behind: 0.3,
            fine_ahead: 2.0,
            fine_height: 0.3,
            growth: 1.15,
            coarse_size: 25.0,
            k_rate: 0.05 * MPA_SQRT_M,
            dj_fraction: 0.025,
            j_start_fraction: 0.1,
            delta_a_max: 1.5,
            j_max_fraction: 8.0,
            hydrogen: RcurveHydrogen::Uniform { c: 0.0 },
            stagger: StaggerOptions::default(),
            damaged_notch: true,
        }
    }
}

/// Builds the half model. Node sets: `crack_face`, `ligament`, `outer`.
pub fn boundary_layer_mesh(spec: &BoundaryLayerSpec, h: f64) -> Result<Mesh2D> {
    let r = spec.outer_radius;
    if !(r > spec.fine_ahead && r > spec.fine_behind && r > spec.fine_height && h > 0.0) {
        return Err(Error::Invalid("boundary layer refinement must fit inside the model".into()));
    }
    // Fine band bounds on multiples of h so the tip is a node.
    let behind = (spec.fine_behind / h).round().max(1.0) * h;
    let ahead = (spec.fine_ahead / h).round().max(1.0) * h;
    let mut xs = graded_line(-r, r, -behind, ahead, h, spec.growth, spec.coarse_size);
    xs.iter_mut().filter(|x| x.abs() < 1e-9 * h).for_each(|x| *x = 0.0);
    let ys = graded_line(0.0, r, 0.0, spec.fine_height, h, spec.growth, spec.coarse_size);
    let mut m = tensor(&xs, &ys);
    let bottom = m.node_set("bottom")?.to_vec();
    let (lig, face): (Vec<usize>, Vec<usize>) = bottom.into_iter().partition(|&n| m.nodes[n][0] >= -1e-12);
    let mut outer: Vec<usize> = ["left", "right", "top"]
        .iter()
        .map(|s| m.node_set(s).map(<[usize]>::to_vec))
        .collect::<Result<Vec<_>>>()?
        .concat();
    outer.sort_unstable();
    outer.dedup();
    m.add_node_set("crack_face", face)?;
    m.add_node_set("ligament", lig)?;
    m.add_node_set("outer", outer)?;
    Ok(m)
}

/// Length of the broken band along the ligament that starts at the tip.
pub fn measure_crack_extension(mesh: &Mesh2D, phi: &[f64]) -> Result<f64> {
    let mut lig: Vec<usize> = mesh.node_set("ligament")?.to_vec();
    lig.sort_by(|&a, &b| mesh.nodes[a][0].total_cmp(&mesh.nodes[b][0]));
    let mut da = 0.0;
    for &n in &lig {
        if phi[n] < CRACK_THRESHOLD {
            break;
        }
        da = mesh.nodes[n][0];
    }
    Ok(da)
}

/// Equivalent-domain J over the annulus r1 < r < r2 about the tip, doubled
/// for the half model. Uses the recoverable energy ½σ:ε_e as W.
pub fn domain_j(mesh: &Mesh2D, geom: &Geometry, u: &[[f64; 2]], states: &QuadStates, r1: f64, r2: f64) -> f64 {
    let q_of = |p: [f64; 2]| {
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        ((r2 - r) / (r2 - r1)).clamp(0.0, 1.0)
    };
    let mut j = 0.0;
    for e in 0..mesh.element_count() {
        let nodes = mesh.elements[e].nodes();
        let qn: Vec<f64> = nodes.iter().map(|&n| q_of(mesh.nodes[n])).collect();
        if qn.iter().all(|&v| v == qn[0]) {
            continue;
        }
        for (k, q) in mesh.quad_points(e).zip(geom.element(mesh, e)) {
            let mut du = [[0.0; 2]; 2];
            let mut dq = [0.0; 2];
            for (a, &n) in nodes.iter().enumerate() {
                for i in 0..2 {
                    du[i][0] += q.dn[a][0] * u[n][i];
                    du[i][1] += q.dn[a][1] * u[n][i];
                }
                dq[0] += q.dn[a][0] * qn[a];
                dq[1] += q.dn[a][1] * qn[a];
            }
            let s = states.sigma[k];
            let w = 0.5 * s.ddot(&states.eps_e[k]);
            let sig = [[s.0[0], s.0[3]], [s.0[3], s.0[1]]];
            let mut integrand = 0.0;
            for jj in 0..2 {
                let mut t = 0.0;
                for i in 0..2 {
                    t += sig[i][jj] * du[i][0];
                }
                if jj == 0 {
                    t -= w;
                }
                integrand += t * dq[jj];
            }
            j += q.w * integrand;
        }
    }
    2.0 * j
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RcurvePoint {
    pub k: f64,
    pub j: f64,
    pub delta_a: f64,
    /// Plastic zone estimate exceeds R_bl/20.
    pub ssy_violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RcurveResult {
    pub points: Vec<RcurvePoint>,
    /// J at the first nonzero extension.
    pub j0: Option<f64>,
    /// Least-squares dJ/dΔa over the grown part of the curve.
    pub slope: Option<f64>,
    pub ssy_flag: bool,
    /// Domain J over K-field J at the first (elastic) load step.
    pub j_ratio_elastic: f64,
    /// Smallest G_c in the model at the start of loading.
    pub gc_tip: f64,
    pub element_size: f64,
}

/// Least-squares slope of J against Δa using points with Δa > 0.
pub fn rcurve_slope(points: &[RcurvePoint]) -> Option<f64> {
    let grown: Vec<&RcurvePoint> = points.iter().filter(|p| p.delta_a > 0.0).collect();
    if grown.len() < 3 {
        return None;
    }
    let n = grown.len() as f64;
    let mx = grown.iter().map(|p| p.delta_a).sum::<f64>() / n;
    let my = grown.iter().map(|p| p.j).sum::<f64>() / n;
    let sxy: f64 = grown.iter().map(|p| (p.delta_a - mx) * (p.j - my)).sum();
    let sxx: f64 = grown.iter().map(|p| (p.delta_a - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

struct Solver<'a> {
    mesh: &'a Mesh2D,
    geom: &'a Geometry,
    model: MechModel<'a>,
    params: Vec<QpParams>,
    betas: Vec<f64>,
    ell: Vec<f64>,
    eps_t: Vec<Sym>,
    ligament: Vec<usize>,
    outer: Vec<usize>,
    notch: Vec<usize>,
    linear: LinearSolver,
    pf: PhaseFieldSolver,
    newton: NewtonOptions,
    stagger: StaggerOptions,
    e: f64,
    nu: f64,
}

struct Step {
    u: Vec<f64>,
    phi: Vec<f64>,
    states: QuadStates,
}

impl Solver<'_> {
    fn fixed(&self, k: f64) -> Vec<(usize, f64)> {
        let mut f: Vec<(usize, f64)> = self.ligament.iter().map(|&n| (2 * n + 1, 0.0)).collect();
        for &n in &self.outer {
            let p = self.mesh.nodes[n];
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            let (ux, uy) = k_field_displacement(k, r, p[1].atan2(p[0]), self.e, self.nu);
            f.push((2 * n, ux));
            if p[1] > 0.0 || p[0] < 0.0 {
                f.push((2 * n + 1, uy));
            }
        }
        f
    }

    /// Displacement guess: the elastic K-field from rest, otherwise the last
    /// solution scaled with K.
    fn predictor(&self, from: &Step, k_from: f64, k: f64) -> Vec<f64> {
        if k_from > 0.0 {
            return from.u.iter().map(|v| v * k / k_from).collect();
        }
        let mut u = vec![0.0; 2 * self.mesh.node_count()];
        for (n, p) in self.mesh.nodes.iter().enumerate() {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            if r > 0.0 {
                let (ux, uy) = k_field_displacement(k, r, p[1].atan2(p[0]), self.e, self.nu);
                u[2 * n] = ux;
                u[2 * n + 1] = uy;
            }
        }
        u
    }

    /// Advances from `k_from` to `k`, halving the load step up to `depth`
    /// times when the equilibrium solve fails.
    fn advance(&mut self, from: &Step, k_from: f64, k: f64, gc: &[f64], depth: usize) -> Result<Step> {
        match self.step(from, k_from, k, gc) {
            Err(e) if depth > 0 && matches!(e, Error::Newton(_) | Error::ReturnMap(_) | Error::LinearSolve(_)) => {
                let mid = (0.5 * (k_from * k_from + k * k)).sqrt();
                log::debug!("K step {k_from:.1} -> {k:.1} split at {mid:.1}");
                let half = self.advance(from, k_from, mid, gc, depth - 1)?;
                self.advance(&half, mid, k, gc, depth - 1)
            }
            other => other,
        }
    }

    fn step(&mut self, from: &Step, k_from: f64, k: f64, gc: &[f64]) -> Result<Step> {
        let fixed = self.fixed(k);
        let mut u = self.predictor(from, k_from, k);
        let mut phi = from.phi.clone();
        let mut states = from.states.clone();
        for _ in 0..self.stagger.max_passes {
            let phq = interpolate_at_qps(self.mesh, self.geom, &phi);
            let g: Vec<(f64, f64)> = phq
                .iter()
                .zip(&self.betas)
                .map(|(&f, &b)| {
                    let (g, gb) = degradation(f.clamp(0.0, 1.0), b);
                    (with_residual(g, RESIDUAL_STIFFNESS), gb)
                })
                .collect();
            let inp = MechInputs { params: &self.params, eps_t: &self.eps_t, g: &g, committed: &from.states };
            let (un, _) = self.model.solve(&u, &fixed, &inp, &self.newton, &mut self.linear)?;
            let mut next = from.states.clone();
            self.model.commit(&un, &inp, &mut next)?;
            for kq in 0..next.len() {
                let q = &self.params[kq];
                let kb = q.e / (3.0 * (1.0 - 2.0 * q.nu));
                let gm = q.e / (2.0 * (1.0 + q.nu));
                let (pos, _) = split_energy(&next.eps_e[kq], kb, gm);
                let psi_p = plastic_energy(next.eps_bar[kq], q.e, q.sigma_y, q.n);
                next.history[kq] = update_history(from.states.history[kq], pos, psi_p, self.betas[kq]);
            }
            let pn = self.pf.solve(self.mesh, self.geom, &next.history, gc, &self.ell, &from.phi, &self.notch)?;
            let change = norm_inf(&pn.iter().zip(&phi).map(|(a, b)| a - b).collect::<Vec<_>>());
            phi = pn;
            u = un;
            states = next;
            if change <= self.stagger.tol_phi {
                break;
            }
        }
        Ok(Step { u, phi, states })
    }
}

/// Ramps the remote K until the crack has grown by `delta_a_max` (or J hits
/// `j_max_fraction`·G_c) and records the R-curve.
pub fn run_rcurve(spec: &BoundaryLayerSpec, material: &RegionMaterial) -> Result<RcurveResult> {
    material.validate()?;
    let h = spec.tip_size.unwrap_or(material.fracture.ell / 10.0);
    let mesh = boundary_layer_mesh(spec, h)?;
    let geom = Geometry::new(&mesh);
    let field = MaterialField::by_region(&mesh, &|_| Some(material.clone()))?;
    let nq = geom.qps.len();
    let nn = mesh.node_count();
    let e = material.mech.e.eval(ROOM_T);
    let nu = material.mech.nu;
    let sigma_y = material.mech.sigma_y.eval(ROOM_T);

    let mut c = vec![0.0; nn];
    let (c_face, transient) = match spec.hydrogen {
        RcurveHydrogen::Uniform { c: cb } => {
            c.iter_mut().for_each(|v| *v = cb);
            (cb, false)
        }
        RcurveHydrogen::Transient { c: cb } => (cb, true),
    };
    let gc_of = |c: &[f64]| -> Vec<f64> {
        interpolate_at_qps(&mesh, &geom, c).iter().enumerate().map(|(k, &v)| field.gc(k, v)).collect()
    };
    let gc_ref = material.fracture.gc(c_face);

    let mut solver = Solver {
        mesh: &mesh,
        geom: &geom,
        model: MechModel::with_pattern(&mesh, &geom, vec![0.0; nn], Pattern::from_mesh(&mesh, 2)),
        params: (0..nq).map(|k| field.params(k, ROOM_T)).collect(),
        betas: (0..nq).map(|k| field.beta(k)).collect(),
        ell: field.ell(),
        eps_t: vec![Sym::ZERO; nq],
        ligament: mesh.node_set("ligament")?.to_vec(),
        outer: mesh.node_set("outer")?.to_vec(),
        notch: if spec.damaged_notch { mesh.node_set("crack_face")?.to_vec() } else { Vec::new() },
        linear: LinearSolver::default(),
        pf: PhaseFieldSolver::new(&mesh),
        newton: NewtonOptions {
            tol: spec.stagger.newton_tol,
            max_iter: spec.stagger.newton_max_iter,
            floor: e * h,
        },
        stagger: spec.stagger,
        e,
        nu,
    };
    let mut transport = TransportSolver::new(&mesh);
    let face = mesh.node_set("crack_face")?.to_vec();
    let d0 = field.d0();
    let h2 = &material.hydrogen;

    let mut phi0 = vec![0.0; nn];
    for &n in &solver.notch {
        phi0[n] = 1.0;
    }
    let mut cur = Step { u: vec![0.0; 2 * nn], phi: phi0, states: QuadStates::new(nq, ROOM_T) };
    let mut points = Vec::new();
    let mut j0 = None;
    let mut ssy_flag = false;
    let mut j_ratio = f64::NAN;
    let dj = spec.dj_fraction * gc_ref;
    let mut j = spec.j_start_fraction * gc_ref;
    let mut k_prev = 0.0;
    let gc_tip = gc_of(&c).iter().copied().fold(f64::INFINITY, f64::min);
    while j <= spec.j_max_fraction * gc_ref {
        let k = k_from_j(j, e, nu);
        if transient {
            let dt = (k - k_prev) / spec.k_rate;
            let dir: Vec<(usize, f64)> = face.iter().map(|&n| (n, c_face)).collect();
            let sh = crate::fem::extrapolate_to_nodes(&mesh, &cur.states.hydrostatic());
            let grad = crate::fem::gradient_at_qps(&mesh, &geom, &sh);
            let d = diffusivity_field(&mesh, &geom, &cur.phi, &d0, h2.k_d, h2.phi_th);
            let ts = TransportStep { dt, d: &d, grad_sigma_h: &grad, drift: h2.drift_coefficient(), dirichlet: &dir };
            c = transport.step(&mesh, &geom, &c, &ts)?.c;
        }
        let gc = gc_of(&c);
        cur = solver.advance(&cur, k_prev, k, &gc, 4)?;
        if points.is_empty() {
            let uc = solver.model.to_cartesian(&cur.u);
            let r1 = (0.25 * spec.outer_radius).min(20.0 * h).max(spec.fine_ahead);
            j_ratio = domain_j(&mesh, &geom, &uc, &cur.states, r1, 2.0 * r1) / j;
        }
        let da = measure_crack_extension(&mesh, &cur.phi)?;
        let violated = irwin_plastic_zone(k, sigma_y) > spec.outer_radius / 20.0;
        ssy_flag |= violated;
        if da > 0.0 && j0.is_none() {
            j0 = Some(j);
        }
        points.push(RcurvePoint { k, j, delta_a: da, ssy_violated: violated });
        log::debug!("K = {k:.1} J = {j:.2} Δa = {da:.3}");
        if da >= spec.delta_a_max {
            break;
        }
        k_prev = k;
        j += dj;
    }
    if ssy_flag {
        log::warn!("plastic zone exceeded R/20 of the boundary layer; small-scale yielding is questionable");
    }
    Ok(RcurveResult { slope: rcurve_slope(&points), points, j0, ssy_flag, j_ratio_elastic: j_ratio, gc_tip, element_size: h })
}

/// Elastic K-field solution on the boundary-layer mesh (no fracture); returns
/// the domain J over the K-field J.
pub fn elastic_j_check(spec: &BoundaryLayerSpec, h: f64, k: f64, e: f64, nu: f64) -> Result<f64> {
    let mesh = boundary_layer_mesh(spec, h)?;
    let geom = Geometry::new(&mesh);
    let nq = geom.qps.len();
    let nn = mesh.node_count();
    let params = vec![QpParams { e, nu, sigma_y: 1e12, n: 1.0 }; nq];
    let mut solver = Solver {
        mesh: &mesh,
        geom: &geom,
        model: MechModel::with_pattern(&mesh, &geom, vec![0.0; nn], Pattern::from_mesh(&mesh, 2)),
        params,
        betas: vec![0.0; nq],
        ell: vec![1.0; nq],
        eps_t: vec![Sym::ZERO; nq],
        ligament: mesh.node_set("ligament")?.to_vec(),
        outer: mesh.node_set("outer")?.to_vec(),
        notch: Vec::new(),
        linear: LinearSolver::default(),
        pf: PhaseFieldSolver::new(&mesh),
        newton: NewtonOptions::default(),
        stagger: StaggerOptions::default(),
        e,
        nu,
    };
    let fixed = solver.fixed(k);
    let g = vec![(1.0, 1.0); nq];
    let states = QuadStates::new(nq, ROOM_T);
    let inp = MechInputs { params: &solver.params, eps_t: &solver.eps_t, g: &g, committed: &states };
    let (u, _) = solver.model.solve(&vec![0.0; 2 * nn], &fixed, &inp, &solver.newton, &mut solver.linear)?;
    let mut out = states.clone();
    solver.model.commit(&u, &inp, &mut out)?;
    let uc = solver.model.to_cartesian(&u);
    let r1 = 0.2 * spec.outer_radius;
    Ok(domain_j(&mesh, &geom, &uc, &out, r1, 2.0 * r1) / j_from_k(k, e, nu))
}
