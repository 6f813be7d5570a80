//! Two-stage workflow: weld simulation, residual-state transfer and
//! pressurization with staggered deformation, transport and fracture.

pub mod failure;
pub mod field;
pub mod pressure;
pub mod seed;
pub mod weld;

pub use failure::{analytic_yield_pressure, crack_path, FailureMode, FailureThresholds, YieldRays};
pub use field::{MaterialField, PointMaterial};
pub use pressure::{
    apply_pressure_step, pressurize, FailureReport, FieldSnapshot, IncrementRecord, PressureInput, PressureOutcome,
    PressureSchedule, StaggerOptions,
};
pub use seed::{seed_defects, seed_porosity, Defect, PorositySeed, PorositySpec};
pub use weld::{simulate_weld, through_wall_hoop, ResidualState, WeldOutcome, WeldSetup};

use serde::{Deserialize, Serialize};

use crate::fem::Geometry;
use crate::materials::{FieldMap, Grade};
use crate::mesh::pipe::PipeSectionSpec;
use crate::mesh::Mesh2D;
use crate::{Error, Result};

/// One pressurization case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub grade: Grade,
    pub residual_stress: bool,
    pub defects: Vec<Defect>,
    pub porosity: Option<PorositySpec>,
    /// Multiplier on every phase-field length scale (coarse-mesh runs).
    pub length_scale_factor: f64,
    pub schedule: PressureSchedule,
    pub stagger: StaggerOptions,
    pub thresholds: FailureThresholds,
    /// Hardness raster in local (lateral, depth) coordinates.
    #[serde(skip)]
    pub hardness: Option<FieldMap>,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            grade: Grade::X80,
            residual_stress: true,
            defects: Vec::new(),
            porosity: None,
            length_scale_factor: 1.0,
            schedule: PressureSchedule::default(),
            stagger: StaggerOptions::default(),
            thresholds: FailureThresholds::default(),
            hardness: None,
        }
    }
}

impl Scenario {
    /// Material field for the scenario on `mesh`.
    pub fn material_field(&self, mesh: &Mesh2D, geom: &Geometry, pipe: &PipeSectionSpec) -> Result<MaterialField> {
        let mut field = MaterialField::for_grade(mesh, self.grade)?;
        if let Some(map) = &self.hardness {
            let lo = map.values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = map.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let cal = self.grade.hardness_calibration(lo, hi);
            field.apply_hardness(geom, map, &cal, &|p| pipe.to_local(p));
        }
        if !(self.length_scale_factor > 0.0) {
            return Err(Error::Invalid("length scale factor must be positive".into()));
        }
        field.scale_length(self.length_scale_factor);
        Ok(field)
    }

    /// Nodes seeded with φ = 1 by porosity and defects.
    pub fn seeded_nodes(&self, mesh: &Mesh2D, pipe: &PipeSectionSpec) -> Result<Vec<usize>> {
        let mut nodes = seed_defects(mesh, pipe, &self.defects)?;
        if let Some(p) = &self.porosity {
            nodes.extend(seed_porosity(mesh, p)?.nodes);
        }
        nodes.sort_unstable();
        nodes.dedup();
        Ok(nodes)
    }
}

#[derive(Debug, Clone)]
pub struct CaseOutcome {
    pub mesh: Mesh2D,
    pub weld: Option<WeldOutcome>,
    pub pressure: PressureOutcome,
}

/// Stage II on an existing mesh with an optional transferred residual state.
pub fn pressurize_case(
    mesh: &Mesh2D,
    geom: &Geometry,
    pipe: &PipeSectionSpec,
    scenario: &Scenario,
    residual: Option<&ResidualState>,
) -> Result<PressureOutcome> {
    if scenario.residual_stress && residual.is_none() {
        return Err(Error::Config("scenario requests residual stresses but no residual state was given".into()));
    }
    if let Some(r) = residual {
        if r.len() != mesh.quad_point_count() {
            return Err(Error::Config(format!(
                "residual state has {} points, mesh has {}",
                r.len(),
                mesh.quad_point_count()
            )));
        }
    }
    let field = scenario.material_field(mesh, geom, pipe)?;
    let input = PressureInput {
        schedule: scenario.schedule,
        stagger: scenario.stagger,
        thresholds: scenario.thresholds,
        residual: if scenario.residual_stress { residual } else { None },
        seeded: scenario.seeded_nodes(mesh, pipe)?,
        center: [0.0, 0.0],
    };
    pressurize(mesh, geom, pipe, &field, &input)
}

/// Full case: mesh generation, the weld stage when residual stresses are on,
/// then pressurization.
pub fn run_case(pipe: &PipeSectionSpec, scenario: &Scenario, weld: &WeldSetup) -> Result<CaseOutcome> {
    let mut mesh = pipe.generate()?;
    let geom = Geometry::new(&mesh);
    let weld_out = if scenario.residual_stress {
        let field = scenario.material_field(&mesh, &geom, pipe)?;
        Some(simulate_weld(&mut mesh, &geom, &field, weld)?)
    } else {
        None
    };
    let residual = weld_out.as_ref().map(|w| &w.residual);
    let pressure = pressurize_case(&mesh, &geom, pipe, scenario, residual)?;
    Ok(CaseOutcome { mesh, weld: weld_out, pressure })
}
