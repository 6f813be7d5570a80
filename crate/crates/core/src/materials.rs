//! Constitutive data and closed-form material laws.
//!
//! Units: N, mm, MPa, s, tonne, mJ. Temperatures in tables and fields are in
//! degrees Celsius; absolute temperature enters only through `T - T_abs`.

use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Room temperature used for property floors [°C].
pub const ROOM_T: f64 = 20.0;
/// Universal gas constant [mJ/(mol·K)].
pub const GAS_CONSTANT: f64 = 8314.462618;

/// Piecewise-linear table in temperature. Out-of-range arguments clamp to the
/// end knots; excursions beyond 10 °C log a warning once per table.
#[derive(Debug, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct Table {
    t: Vec<f64>,
    v: Vec<f64>,
    #[serde(skip)]
    warned: AtomicBool,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    t: Vec<f64>,
    v: Vec<f64>,
}

impl TryFrom<TableRepr> for Table {
    type Error = Error;
    fn try_from(r: TableRepr) -> Result<Self> {
        Table::new(r.t, r.v)
    }
}

impl From<Table> for TableRepr {
    fn from(t: Table) -> Self {
        TableRepr { t: t.t, v: t.v }
    }
}

impl Clone for Table {
    fn clone(&self) -> Self {
        Self { t: self.t.clone(), v: self.v.clone(), warned: AtomicBool::new(false) }
    }
}

impl PartialEq for Table {
    fn eq(&self, other: &Self) -> bool {
        self.t == other.t && self.v == other.v
    }
}

impl Table {
    pub fn new(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.len() < 2 || t.len() != v.len() {
            return Err(Error::Invalid("property table needs at least 2 rows".into()));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("property table temperatures must strictly increase".into()));
        }
        if t.iter().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Invalid("property table has non-finite entries".into()));
        }
        Ok(Self { t, v, warned: AtomicBool::new(false) })
    }

    pub fn constant(v: f64) -> Self {
        Self::new(vec![-273.0, 5000.0], vec![v, v]).expect("constant table")
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect())
    }

    /// Reads a `T,value` CSV.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_path(path)?;
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "T" || &headers[1] != "value" {
            return Err(Error::Invalid("property table header must be `T,value`".into()));
        }
        let mut t = Vec::new();
        let mut v = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::Invalid(format!("bad number `{s}` in property table")))
            };
            t.push(parse(&rec[0])?);
            v.push(parse(&rec[1])?);
        }
        Self::new(t, v)
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.t, &self.v)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.t[0], *self.t.last().unwrap())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.t.clone(), self.v.iter().map(|x| x * factor).collect()).expect("scaled table")
    }

    pub fn eval(&self, temp: f64) -> f64 {
        let (lo, hi) = self.domain();
        if temp < lo || temp > hi {
            // Small excursions are ordinary solver undershoot.
            let far = temp < lo - 10.0 || temp > hi + 10.0;
            if far && !self.warned.swap(true, Ordering::Relaxed) {
                log::warn!("temperature {temp:.1} outside table domain [{lo}, {hi}]; clamping");
            }
            return if temp < lo { self.v[0] } else { *self.v.last().unwrap() };
        }
        let k = self.t.partition_point(|&x| x <= temp).clamp(1, self.t.len() - 1);
        let (t0, t1) = (self.t[k - 1], self.t[k]);
        let w = (temp - t0) / (t1 - t0);
        self.v[k - 1] + w * (self.v[k] - self.v[k - 1])
    }

    /// Slope of the interpolant at `temp` (left-continuous at knots, zero
    /// outside the domain).
    pub fn slope(&self, temp: f64) -> f64 {
        let (lo, hi) = self.domain();
        if temp < lo || temp > hi {
            return 0.0;
        }
        let k = self.t.partition_point(|&x| x < temp).clamp(1, self.t.len() - 1);
        (self.v[k] - self.v[k - 1]) / (self.t[k] - self.t[k - 1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalProps {
    /// Density [tonne/mm³].
    pub rho: f64,
    /// Specific heat [mJ/(tonne·K)].
    pub c: Table,
    /// Conductivity [mW/(mm·K)].
    pub k: Table,
    /// Secant thermal expansion coefficient from T0 [1/K].
    pub alpha: Table,
    /// Convection coefficient [mW/(mm²·K)].
    pub h_c: f64,
    pub emissivity: f64,
    /// Stefan–Boltzmann constant [mW/(mm²·K⁴)].
    pub sigma_sb: f64,
    pub t0: f64,
    pub t_melt: f64,
    pub t_abs: f64,
}

impl Default for ThermalProps {
    fn default() -> Self {
        Self {
            rho: 7.85e-9,
            c: Table::from_pairs(&[(20.0, 450.0), (400.0, 560.0), (700.0, 900.0), (800.0, 650.0), (1500.0, 650.0)])
                .unwrap()
                .scaled(1e6),
            k: Table::from_pairs(&[(20.0, 51.0), (400.0, 42.0), (800.0, 26.0), (1500.0, 30.0)]).unwrap(),
            alpha: Table::from_pairs(&[(20.0, 1.15e-5), (400.0, 1.35e-5), (800.0, 1.45e-5), (1500.0, 1.5e-5)])
                .unwrap(),
            h_c: 0.025,
            emissivity: 0.8,
            sigma_sb: 5.69e-11,
            t0: 20.0,
            t_melt: 1500.0,
            t_abs: -273.0,
        }
    }
}

impl ThermalProps {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) || !(0.0..=1.0).contains(&self.emissivity) || self.h_c < 0.0 {
            return Err(Error::Invalid("thermal properties out of range".into()));
        }
        for (name, tab) in [("c", &self.c), ("k", &self.k)] {
            if tab.knots().1.iter().any(|&v| v <= 0.0) {
                return Err(Error::Invalid(format!("thermal table `{name}` must be positive")));
            }
        }
        for (name, tab) in [("c", &self.c), ("k", &self.k), ("alpha", &self.alpha)] {
            let (lo, hi) = tab.domain();
            if lo > self.t0 || hi < self.t_melt {
                log::warn!("thermal table `{name}` does not cover [{}, {}]", self.t0, self.t_melt);
            }
        }
        Ok(())
    }

    /// Surface flux q_c + q_r at surface temperature `t` [mW/mm²].
    pub fn surface_flux(&self, t: f64) -> f64 {
        self.h_c * (t - self.t0) + self.radiative_flux(t)
    }

    pub fn radiative_flux(&self, t: f64) -> f64 {
        let a = t - self.t_abs;
        let b = self.t0 - self.t_abs;
        self.emissivity * self.sigma_sb * (a.powi(4) - b.powi(4))
    }

    /// d(surface_flux)/dT.
    pub fn surface_flux_slope(&self, t: f64) -> f64 {
        self.h_c + 4.0 * self.emissivity * self.sigma_sb * (t - self.t_abs).powi(3)
    }
}

/// Default E(T)/E(20 °C) ratio, illustrative.
pub fn default_modulus_ratio() -> Table {
    Table::from_pairs(&[
        (20.0, 1.0),
        (200.0, 0.94),
        (400.0, 0.85),
        (600.0, 0.70),
        (800.0, 0.45),
        (1000.0, 0.2),
        (1500.0, 0.05),
    ])
    .unwrap()
}

/// Default σ_y(T)/σ_y(20 °C) ratio, illustrative.
pub fn default_yield_ratio() -> Table {
    Table::from_pairs(&[
        (20.0, 1.0),
        (200.0, 0.9),
        (400.0, 0.75),
        (600.0, 0.5),
        (800.0, 0.2),
        (1000.0, 0.05),
        (1500.0, 0.01),
    ])
    .unwrap()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechProps {
    /// Young's modulus [MPa].
    pub e: Table,
    pub nu: f64,
    /// Initial yield stress [MPa].
    pub sigma_y: Table,
    /// Hardening exponent.
    pub n: f64,
    /// Taylor–Quinney coefficient.
    pub beta: f64,
}

impl MechProps {
    /// Room-temperature values scaled by the default temperature ratios.
    pub fn with_default_tables(e: f64, nu: f64, sigma_y: f64, n: f64) -> Self {
        Self {
            e: default_modulus_ratio().scaled(e),
            nu,
            sigma_y: default_yield_ratio().scaled(sigma_y),
            n,
            beta: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let e0 = self.e.eval(ROOM_T);
        let s0 = self.sigma_y.eval(ROOM_T);
        if !(e0 > 0.0 && s0 > 0.0 && self.nu > 0.0 && self.nu < 0.5 && self.n >= 0.0 && self.n <= 1.0) {
            return Err(Error::Invalid("mechanical properties out of range".into()));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::Invalid("Taylor-Quinney coefficient must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// E(T), floored at 1% of the room-temperature value.
    pub fn e_at(&self, t: f64) -> f64 {
        self.e.eval(t).max(0.01 * self.e.eval(ROOM_T))
    }

    /// σ_y(T), floored at 1% of the room-temperature value.
    pub fn sigma_y_at(&self, t: f64) -> f64 {
        self.sigma_y.eval(t).max(0.01 * self.sigma_y.eval(ROOM_T))
    }

    pub fn bulk_modulus(&self, t: f64) -> f64 {
        self.e_at(t) / (3.0 * (1.0 - 2.0 * self.nu))
    }

    pub fn shear_modulus(&self, t: f64) -> f64 {
        self.e_at(t) / (2.0 * (1.0 + self.nu))
    }
}

/// Power-law flow stress σ_y (1 + E ε_p / σ_y)^n.
pub fn flow_stress_raw(eps_p: f64, e: f64, sigma_y: f64, n: f64) -> f64 {
    sigma_y * (1.0 + e * eps_p / sigma_y).powf(n)
}

/// dσ_f/dε_p.
pub fn hardening_slope(eps_p: f64, e: f64, sigma_y: f64, n: f64) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    n * e * (1.0 + e * eps_p / sigma_y).powf(n - 1.0)
}

pub fn flow_stress(eps_p: f64, t: f64, m: &MechProps) -> f64 {
    flow_stress_raw(eps_p.max(0.0), m.e_at(t), m.sigma_y_at(t), m.n)
}

/// Plastic work ∫σ_f dε_p from 0 to `eps_p`.
pub fn plastic_energy(eps_p: f64, e: f64, sigma_y: f64, n: f64) -> f64 {
    let x = 1.0 + e * eps_p.max(0.0) / sigma_y;
    sigma_y * sigma_y / (e * (n + 1.0)) * (x.powf(n + 1.0) - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractureProps {
    /// Hydrogen-free fracture energy [N/mm].
    pub gc0: f64,
    /// Saturated fracture energy [N/mm].
    pub gc_min: f64,
    pub q1: f64,
    pub q2: f64,
    /// Fracture strength [MPa].
    pub sigma_hat: f64,
    /// Phase-field length scale [mm].
    pub ell: f64,
}

impl FractureProps {
    pub fn gc(&self, c: f64) -> f64 {
        degraded_gc(c, self)
    }

    pub fn validate(&self, e: f64) -> Result<()> {
        if !(self.ell > 0.0 && self.gc0 > 0.0 && self.gc_min > 0.0 && self.gc_min <= self.gc0) {
            return Err(Error::Invalid("fracture properties out of range".into()));
        }
        let ell = length_scale_from_strength(e, self.gc0, self.sigma_hat);
        if ((ell - self.ell) / ell).abs() > 0.05 {
            log::warn!(
                "length scale {} mm differs from strength-consistent value {ell:.4} mm by more than 5%",
                self.ell
            );
        }
        Ok(())
    }
}

/// Exponential degradation between `v0` at C = 0 and `vmin` as C grows.
pub fn degradation_fit(c: f64, v0: f64, vmin: f64, q1: f64, q2: f64) -> f64 {
    let r = vmin / v0;
    (r + (1.0 - r) * (-q1 * c.max(0.0).powf(q2)).exp()) * v0
}

pub fn degraded_gc(c: f64, f: &FractureProps) -> f64 {
    degradation_fit(c, f.gc0, f.gc_min, f.q1, f.q2)
}

/// Equilibrium lattice concentration C = S √p [wppm].
pub fn sievert_concentration(p: f64, s: f64) -> f64 {
    s * p.max(0.0).sqrt()
}

/// ℓ = 27/256 · E G_c / σ̂².
pub fn length_scale_from_strength(e: f64, gc: f64, sigma_hat: f64) -> f64 {
    27.0 / 256.0 * e * gc / (sigma_hat * sigma_hat)
}

/// Inverse of [`length_scale_from_strength`].
pub fn strength_from_length_scale(e: f64, gc: f64, ell: f64) -> f64 {
    (27.0 / 256.0 * e * gc / ell).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HydrogenProps {
    /// Lattice diffusivity [mm²/s].
    pub d0: f64,
    /// Sievert solubility [wppm/√MPa].
    pub solubility: f64,
    /// Partial molar volume [mm³/mol].
    pub v_h: f64,
    pub k_d: f64,
    pub phi_th: f64,
    /// Diffusion temperature [K].
    pub t_diff: f64,
}

impl Default for HydrogenProps {
    fn default() -> Self {
        Self { d0: 4.5e-4, solubility: 0.077, v_h: 2000.0, k_d: 1e4, phi_th: 0.8, t_diff: 293.15 }
    }
}

impl HydrogenProps {
    pub fn validate(&self) -> Result<()> {
        if !(self.d0 > 0.0 && self.k_d >= 0.0 && (0.0..1.0).contains(&self.phi_th) && self.t_diff > 0.0) {
            return Err(Error::Invalid("hydrogen properties out of range".into()));
        }
        Ok(())
    }

    /// V̄_H / (R T) [1/MPa].
    pub fn drift_coefficient(&self) -> f64 {
        self.v_h / (GAS_CONSTANT * self.t_diff)
    }
}

/// Material of one region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMaterial {
    pub mech: MechProps,
    pub fracture: FractureProps,
    pub hydrogen: HydrogenProps,
}

impl RegionMaterial {
    pub fn validate(&self) -> Result<()> {
        self.mech.validate()?;
        self.fracture.validate(self.mech.e_at(ROOM_T))?;
        self.hydrogen.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Grade {
    X80,
    X52,
}

impl std::str::FromStr for Grade {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "X80" => Ok(Grade::X80),
            "X52" => Ok(Grade::X52),
            _ => Err(Error::Config(format!("unknown steel grade `{s}`"))),
        }
    }
}

/// Fit parameters of the J_Ic(C) degradation curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JicFit {
    pub sigma_y: f64,
    pub jic0: f64,
    pub jic_min: f64,
    pub q1: f64,
    pub q2: f64,
}

impl JicFit {
    pub fn eval(&self, c: f64) -> f64 {
        degradation_fit(c, self.jic0, self.jic_min, self.q1, self.q2)
    }
}

impl Grade {
    pub fn name(self) -> &'static str {
        match self {
            Grade::X80 => "X80",
            Grade::X52 => "X52",
        }
    }

    pub fn jic_fit(self) -> JicFit {
        match self {
            Grade::X80 => JicFit { sigma_y: 660.0, jic0: 289.0, jic_min: 20.0, q1: 9.0, q2: 0.8 },
            Grade::X52 => JicFit { sigma_y: 430.0, jic0: 400.0, jic_min: 50.0, q1: 25.0, q2: 2.0 },
        }
    }

    /// Fracture-to-yield strength ratio σ̂/σ_y.
    pub fn strength_ratio(self) -> f64 {
        4.0
    }

    fn region(self, weld: bool) -> RegionMaterial {
        let fit = self.jic_fit();
        // (E, σ_y, n, G_c(0), G_c^min, ℓ, D)
        let (e, sy, n, gc0, gcmin, ell, d0) = match (self, weld) {
            (Grade::X80, false) => (187000.0, 660.0, 0.1, 60.0, 7.0, 0.17, 4.5e-4),
            (Grade::X80, true) => (196350.0, 726.0, 0.05, 54.0, 6.3, 0.13, 3e-4),
            (Grade::X52, false) => (187000.0, 430.0, 0.1, 60.0, 16.0, 0.40, 4.5e-4),
            (Grade::X52, true) => (196350.0, 473.0, 0.05, 54.0, 14.4, 0.31, 3e-4),
        };
        RegionMaterial {
            mech: MechProps::with_default_tables(e, 0.3, sy, n),
            fracture: FractureProps {
                gc0,
                gc_min: gcmin,
                q1: fit.q1,
                q2: fit.q2,
                sigma_hat: self.strength_ratio() * sy,
                ell,
            },
            hydrogen: HydrogenProps { d0, ..Default::default() },
        }
    }

    pub fn base(self) -> RegionMaterial {
        self.region(false)
    }

    pub fn weld(self) -> RegionMaterial {
        self.region(true)
    }

    /// Hardness calibration ranges (σ_y span) for the grade.
    pub fn hardness_calibration(self, hv_min: f64, hv_max: f64) -> HardnessCalibration {
        let base = self.base();
        let (sy_lo, sy_hi) = match self {
            Grade::X80 => (660.0, 990.0),
            Grade::X52 => (430.0, 645.0),
        };
        HardnessCalibration {
            hv_min,
            hv_max,
            sigma_y: (sy_lo, sy_hi),
            gc0: (base.fracture.gc0, self.weld().fracture.gc0),
            d0: (base.hydrogen.d0, self.weld().hydrogen.d0),
            strength_ratio: self.strength_ratio(),
        }
    }
}

/// Affine hardness-to-property calibration. Pairs are (value at HV_min,
/// value at HV_max).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardnessCalibration {
    pub hv_min: f64,
    pub hv_max: f64,
    pub sigma_y: (f64, f64),
    pub gc0: (f64, f64),
    pub d0: (f64, f64),
    pub strength_ratio: f64,
}

/// Raster of Vickers hardness, row-major with x fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMap {
    pub nx: usize,
    pub ny: usize,
    pub origin: [f64; 2],
    pub spacing: [f64; 2],
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardnessProps {
    pub sigma_y: f64,
    pub gc0: f64,
    pub sigma_hat: f64,
    pub d0: f64,
}

impl HardnessProps {
    pub fn ell(&self, e: f64) -> f64 {
        length_scale_from_strength(e, self.gc0, self.sigma_hat)
    }
}

impl FieldMap {
    pub fn new(nx: usize, ny: usize, origin: [f64; 2], spacing: [f64; 2], values: Vec<f64>) -> Result<Self> {
        if nx < 2 || ny < 2 || values.len() != nx * ny || spacing[0] <= 0.0 || spacing[1] <= 0.0 {
            return Err(Error::Invalid("hardness map dimensions are inconsistent".into()));
        }
        if values.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::Invalid("hardness values must be positive".into()));
        }
        Ok(Self { nx, ny, origin, spacing, values })
    }

    /// Reads the raster CSV: header `nx,ny,x0,y0,dx,dy`, one row with those
    /// values, then `ny` rows of `nx` values.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = rows.next().unwrap_or("");
        if header.replace(' ', "") != "nx,ny,x0,y0,dx,dy" {
            return Err(Error::Invalid("hardness map header must be `nx,ny,x0,y0,dx,dy`".into()));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("bad number `{s}` in hardness map")));
        let dims: Vec<f64> = rows.next().unwrap_or("").split(',').map(num).collect::<Result<_>>()?;
        if dims.len() != 6 {
            return Err(Error::Invalid("hardness map needs 6 header values".into()));
        }
        let mut values = Vec::new();
        for row in rows {
            for v in row.split(',') {
                values.push(num(v)?);
            }
        }
        Self::new(dims[0] as usize, dims[1] as usize, [dims[2], dims[3]], [dims[4], dims[5]], values)
    }

    pub fn covers(&self, p: [f64; 2]) -> bool {
        let x1 = self.origin[0] + self.spacing[0] * (self.nx - 1) as f64;
        let y1 = self.origin[1] + self.spacing[1] * (self.ny - 1) as f64;
        (self.origin[0]..=x1).contains(&p[0]) && (self.origin[1]..=y1).contains(&p[1])
    }

    /// Bilinear hardness at `p`; points outside clamp to the nearest cell.
    pub fn hardness(&self, p: [f64; 2]) -> f64 {
        let fx = (p[0] - self.origin[0]) / self.spacing[0];
        let fy = (p[1] - self.origin[1]) / self.spacing[1];
        let maxx = (self.nx - 1) as f64;
        let maxy = (self.ny - 1) as f64;
        if fx < 0.0 || fy < 0.0 || fx > maxx || fy > maxy {
            log::warn!("point ({}, {}) outside hardness map; clamping", p[0], p[1]);
        }
        let fx = fx.clamp(0.0, maxx);
        let fy = fy.clamp(0.0, maxy);
        let i = (fx.floor() as usize).min(self.nx - 2);
        let j = (fy.floor() as usize).min(self.ny - 2);
        let (s, t) = (fx - i as f64, fy - j as f64);
        let v = |a: usize, b: usize| self.values[b * self.nx + a];
        (1.0 - s) * (1.0 - t) * v(i, j) + s * (1.0 - t) * v(i + 1, j) + (1.0 - s) * t * v(i, j + 1) + s * t * v(i + 1, j + 1)
    }
}

fn affine(w: f64, pair: (f64, f64)) -> f64 {
    pair.0 + w * (pair.1 - pair.0)
}

pub fn properties_from_hardness(map: &FieldMap, cal: &HardnessCalibration, p: [f64; 2]) -> HardnessProps {
    let hv = map.hardness(p);
    let w = ((hv - cal.hv_min) / (cal.hv_max - cal.hv_min)).clamp(0.0, 1.0);
    let sigma_y = affine(w, cal.sigma_y);
    HardnessProps { sigma_y, gc0: affine(w, cal.gc0), sigma_hat: cal.strength_ratio * sigma_y, d0: affine(w, cal.d0) }
}
