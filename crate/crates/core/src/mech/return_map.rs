//! Radial return on the von Mises surface with power-law hardening and
//! phase-field degradation of stiffness (g) and yield surface (ḡ).

use super::tensor::Sym;
use crate::materials::{flow_stress_raw, hardening_slope};

/// Elastoplastic parameters at one quadrature point (already evaluated at
/// the current temperature).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpParams {
    pub e: f64,
    pub nu: f64,
    pub sigma_y: f64,
    pub n: f64,
}

impl QpParams {
    pub fn bulk(&self) -> f64 {
        self.e / (3.0 * (1.0 - 2.0 * self.nu))
    }

    pub fn shear(&self) -> f64 {
        self.e / (2.0 * (1.0 + self.nu))
    }

    pub fn flow_stress(&self, eps_bar: f64) -> f64 {
        flow_stress_raw(eps_bar, self.e, self.sigma_y, self.n)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ReturnResult {
    pub sigma: Sym,
    pub eps_p: Sym,
    pub eps_bar: f64,
    /// Consistent tangent in Mandel components.
    pub tangent: [[f64; 4]; 4],
    pub plastic: bool,
}

/// Elastic stiffness K 1⊗1 + 2G I_dev in Mandel components.
pub fn elastic_tangent(k: f64, g: f64) -> [[f64; 4]; 4] {
    let mut c = [[0.0; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = k - 2.0 * g / 3.0;
        }
        c[i][i] += 2.0 * g;
    }
    c[3][3] = 2.0 * g;
    c
}

pub fn elastic_stress(eps_e: Sym, k: f64, g: f64) -> Sym {
    k * eps_e.trace() * Sym::iso(1.0) + (2.0 * g) * eps_e.dev()
}

/// Updates the plastic state from the trial elastic strain
/// `eps_e_trial = ε − ε_p(old) − ε_T`. `g` scales the elastic moduli, `gbar`
/// the flow stress. Returns `None` if the scalar solve fails.
pub fn return_map(
    eps_e_trial: Sym,
    eps_p_old: Sym,
    eps_bar_old: f64,
    m: &QpParams,
    g: f64,
    gbar: f64,
) -> Option<ReturnResult> {
    let kk = g * m.bulk();
    let gg = g * m.shear();
    let p = kk * eps_e_trial.trace();
    let s_tr = (2.0 * gg) * eps_e_trial.dev();
    let q_tr = (1.5 * s_tr.ddot(&s_tr)).sqrt();
    let sf0 = gbar * m.flow_stress(eps_bar_old);
    if q_tr <= sf0 * (1.0 + 1e-12) || gg <= 0.0 {
        return Some(ReturnResult {
            sigma: p * Sym::iso(1.0) + s_tr,
            eps_p: eps_p_old,
            eps_bar: eps_bar_old,
            tangent: elastic_tangent(kk, gg),
            plastic: false,
        });
    }
    // r(Δ) = q_tr − 3GΔ − ḡ σ_f(ε̄ + Δ), decreasing in Δ, root in [0, q_tr/3G].
    let resid = |d: f64| q_tr - 3.0 * gg * d - gbar * m.flow_stress(eps_bar_old + d);
    let mut lo = 0.0;
    let mut hi = q_tr / (3.0 * gg);
    let mut d = 0.0;
    let tol = 1e-12 * m.sigma_y.max(1.0);
    let mut converged = false;
    for _ in 0..200 {
        let r = resid(d);
        if r.abs() <= tol {
            converged = true;
            break;
        }
        if r > 0.0 {
            lo = d;
        } else {
            hi = d;
        }
        let slope = -3.0 * gg - gbar * hardening_slope(eps_bar_old + d, m.e, m.sigma_y, m.n);
        let mut next = d - r / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (hi - lo) <= 1e-15 * hi.max(1e-300) {
            d = next;
            converged = resid(d).abs() <= 1e3 * tol;
            break;
        }
        d = next;
    }
    if !converged {
        return None;
    }
    let nhat = (1.0 / s_tr.norm()) * s_tr;
    let theta = 1.0 - 3.0 * gg * d / q_tr;
    let h = gbar * hardening_slope(eps_bar_old + d, m.e, m.sigma_y, m.n);
    let theta_bar = 1.0 / (1.0 + h / (3.0 * gg)) - (1.0 - theta);
    let dep = (1.5f64.sqrt() * d) * nhat;
    let sigma = p * Sym::iso(1.0) + theta * s_tr;

    let mut c = [[0.0; 4]; 4];
    let nm = nhat.mandel();
    for i in 0..4 {
        for j in 0..4 {
            let vol = if i < 3 && j < 3 { kk - 2.0 * gg * theta / 3.0 } else { 0.0 };
            let id = if i == j { 2.0 * gg * theta } else { 0.0 };
            c[i][j] = vol + id - 2.0 * gg * theta_bar * nm[i] * nm[j];
        }
    }
    Some(ReturnResult { sigma, eps_p: eps_p_old + dep, eps_bar: eps_bar_old + d, tangent: c, plastic: true })
}

/// Plane-strain 3x3 tangent acting on (ε_xx, ε_yy, γ_xy) and returning
/// (σ_xx, σ_yy, σ_xy).
pub fn plane_tangent(c: &[[f64; 4]; 4]) -> [[f64; 3]; 3] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // engineering strain -> Mandel: (xx, yy, 0, γ/√2); Mandel stress -> (xx, yy, m3/√2)
    let map = [(0usize, 1.0), (1, 1.0), (3, s)];
    let mut d = [[0.0; 3]; 3];
    for (a, &(ia, fa)) in map.iter().enumerate() {
        for (b, &(ib, fb)) in map.iter().enumerate() {
            d[a][b] = fa * c[ia][ib] * fb;
        }
    }
    d
}

/// Material-point driver under uniaxial stress: prescribes ε_xx, enforces
/// σ_yy = σ_zz = 0 and zero shear. Returns (ε_xx, σ_xx, ε̄_p, dissipation
/// increment) per step.
pub fn uniaxial_stress_curve(m: &QpParams, strains: &[f64]) -> Vec<(f64, f64, f64, f64)> {
    let mut eps_p = Sym::ZERO;
    let mut eps_bar = 0.0;
    let mut lat = [0.0, 0.0];
    let mut out = Vec::with_capacity(strains.len());
    for &exx in strains {
        let mut res = None;
        for _ in 0..50 {
            let eps = Sym::new(exx, lat[0], lat[1], 0.0);
            let r = return_map(eps - eps_p, eps_p, eps_bar, m, 1.0, 1.0).expect("return map");
            let f = [r.sigma.0[1], r.sigma.0[2]];
            let done = f[0].abs().max(f[1].abs()) <= 1e-10 * m.sigma_y;
            let c = r.tangent;
            res = Some(r);
            if done {
                break;
            }
            let (a, b, cc, d) = (c[1][1], c[1][2], c[2][1], c[2][2]);
            let det = a * d - b * cc;
            lat[0] -= (d * f[0] - b * f[1]) / det;
            lat[1] -= (-cc * f[0] + a * f[1]) / det;
        }
        let r = res.unwrap();
        let diss = r.sigma.ddot(&(r.eps_p - eps_p));
        eps_p = r.eps_p;
        eps_bar = r.eps_bar;
        out.push((exx, r.sigma.0[0], eps_bar, diss));
    }
    out
}
