//! Material data resolved at every quadrature point.

use std::collections::HashMap;

use crate::fem::Geometry;
use crate::materials::{
    degradation_fit, properties_from_hardness, FieldMap, Grade, HardnessCalibration, RegionMaterial, ROOM_T,
};
use crate::mech::QpParams;
use crate::mesh::{Mesh2D, Point};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMaterial {
    /// Index into [`MaterialField::regions`].
    pub region: usize,
    /// Room-temperature yield stress; temperature tables are scaled to it.
    pub sigma_y: f64,
    pub gc0: f64,
    pub gc_min: f64,
    pub ell: f64,
    pub d0: f64,
}

#[derive(Debug, Clone)]
pub struct MaterialField {
    pub regions: Vec<RegionMaterial>,
    pub points: Vec<PointMaterial>,
}

impl MaterialField {
    /// One material per mesh region, looked up by region name.
    pub fn by_region(mesh: &Mesh2D, lookup: &dyn Fn(&str) -> Option<RegionMaterial>) -> Result<Self> {
        let mut regions = Vec::new();
        for name in mesh.region_names() {
            let m = lookup(name).ok_or_else(|| Error::UnknownRegion(name.clone()))?;
            m.validate()?;
            regions.push(m);
        }
        let mut points = vec![
            PointMaterial { region: 0, sigma_y: 0.0, gc0: 0.0, gc_min: 0.0, ell: 0.0, d0: 0.0 };
            mesh.quad_point_count()
        ];
        for e in 0..mesh.element_count() {
            let r = mesh.elements[e].region;
            let m = &regions[r];
            for k in mesh.quad_points(e) {
                points[k] = PointMaterial {
                    region: r,
                    sigma_y: m.mech.sigma_y.eval(ROOM_T),
                    gc0: m.fracture.gc0,
                    gc_min: m.fracture.gc_min,
                    ell: m.fracture.ell,
                    d0: m.hydrogen.d0,
                };
            }
        }
        Ok(Self { regions, points })
    }

    /// Weld passes get weld-metal properties, everything else (base and HAZ)
    /// base-metal properties.
    pub fn for_grade(mesh: &Mesh2D, grade: Grade) -> Result<Self> {
        Self::by_region(mesh, &|name| Some(if name.starts_with("weld") { grade.weld() } else { grade.base() }))
    }

    /// Overrides yield stress, G_c(0), ℓ and D₀ at points covered by the
    /// hardness map. `to_map` converts a Cartesian point to map coordinates.
    pub fn apply_hardness(
        &mut self,
        geom: &Geometry,
        map: &FieldMap,
        cal: &HardnessCalibration,
        to_map: &dyn Fn(Point) -> Point,
    ) {
        for (k, q) in geom.qps.iter().enumerate() {
            let p = to_map(q.x);
            if !map.covers(p) {
                continue;
            }
            let h = properties_from_hardness(map, cal, p);
            let pm = &mut self.points[k];
            let e = self.regions[pm.region].mech.e.eval(ROOM_T);
            pm.gc_min *= h.gc0 / pm.gc0;
            pm.sigma_y = h.sigma_y;
            pm.gc0 = h.gc0;
            pm.ell = h.ell(e);
            pm.d0 = h.d0;
        }
    }

    /// Multiplies every length scale by `factor`.
    pub fn scale_length(&mut self, factor: f64) {
        for p in &mut self.points {
            p.ell *= factor;
        }
    }

    pub fn region(&self, k: usize) -> &RegionMaterial {
        &self.regions[self.points[k].region]
    }

    /// Constitutive parameters at point `k` and temperature `temp`.
    pub fn params(&self, k: usize, temp: f64) -> QpParams {
        let pm = &self.points[k];
        let m = &self.regions[pm.region].mech;
        let scale = pm.sigma_y / m.sigma_y.eval(ROOM_T);
        QpParams { e: m.e_at(temp), nu: m.nu, sigma_y: m.sigma_y_at(temp) * scale, n: m.n }
    }

    pub fn beta(&self, k: usize) -> f64 {
        self.region(k).mech.beta
    }

    /// Hydrogen-degraded fracture energy at point `k`.
    pub fn gc(&self, k: usize, c: f64) -> f64 {
        let pm = &self.points[k];
        let f = &self.regions[pm.region].fracture;
        degradation_fit(c, pm.gc0, pm.gc_min, f.q1, f.q2)
    }

    pub fn ell(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.ell).collect()
    }

    pub fn d0(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.d0).collect()
    }

    /// Region names mapped to their material (for reports).
    pub fn summary(&self, mesh: &Mesh2D) -> HashMap<String, RegionMaterial> {
        mesh.region_names().iter().cloned().zip(self.regions.iter().cloned()).collect()
    }
}
