//! Elastoplastic mechanics: constitutive update, equilibrium solver and the
//! per-quadrature-point state it carries.

pub mod return_map;
pub mod solver;
pub mod tensor;

pub use return_map::{return_map, QpParams, ReturnResult};
pub use solver::{MechInputs, MechModel};
pub use tensor::Sym;

use crate::materials::{MechProps, ThermalProps, ROOM_T};

/// Mechanical state at every quadrature point of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadStates {
    /// Total strain ε(u) + shift.
    pub eps: Vec<Sym>,
    pub eps_e: Vec<Sym>,
    pub eps_p: Vec<Sym>,
    pub eps_t: Vec<Sym>,
    pub eps_bar: Vec<f64>,
    pub sigma: Vec<Sym>,
    pub temp: Vec<f64>,
    /// Strain offset added to ε(u); sets the reference configuration of
    /// late-born material and of transferred residual states.
    pub shift: Vec<Sym>,
    /// Crack driving history H.
    pub history: Vec<f64>,
}

impl QuadStates {
    pub fn new(n: usize, temp: f64) -> Self {
        Self {
            eps: vec![Sym::ZERO; n],
            eps_e: vec![Sym::ZERO; n],
            eps_p: vec![Sym::ZERO; n],
            eps_t: vec![Sym::ZERO; n],
            eps_bar: vec![0.0; n],
            sigma: vec![Sym::ZERO; n],
            temp: vec![temp; n],
            shift: vec![Sym::ZERO; n],
            history: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    pub fn hydrostatic(&self) -> Vec<f64> {
        self.sigma.iter().map(hydrostatic_stress).collect()
    }

    pub fn von_mises(&self) -> Vec<f64> {
        self.sigma.iter().map(Sym::von_mises).collect()
    }

    /// Resets a point to a virgin, stress-free state.
    pub fn reset_point(&mut self, k: usize) {
        self.eps_e[k] = Sym::ZERO;
        self.eps_p[k] = Sym::ZERO;
        self.eps_bar[k] = 0.0;
        self.sigma[k] = Sym::ZERO;
        self.history[k] = 0.0;
    }
}

/// Isotropic secant thermal strain α(T)(T − T_room).
pub fn thermal_strain(temp: f64, th: &ThermalProps) -> Sym {
    Sym::iso(th.alpha.eval(temp) * (temp - ROOM_T))
}

pub fn hydrostatic_stress(s: &Sym) -> f64 {
    s.trace() / 3.0
}

/// Constitutive parameters of a region evaluated at temperature `temp`.
pub fn params_at(m: &MechProps, temp: f64) -> QpParams {
    QpParams { e: m.e_at(temp), nu: m.nu, sigma_y: m.sigma_y_at(temp), n: m.n }
}
