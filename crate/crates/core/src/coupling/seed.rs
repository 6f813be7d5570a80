//! Initial damage: random weld porosity and sharp defects, both imposed as
//! φ = 1 on selected nodes.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::mesh::pipe::{segment_distance, PipeSectionSpec};
use crate::mesh::{Mesh2D, Point};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PorositySpec {
    /// Void diameter [µm].
    pub diameter_um: f64,
    /// Target area fraction of the weld metal.
    pub fraction: f64,
    pub seed: u64,
}

impl Default for PorositySpec {
    fn default() -> Self {
        Self { diameter_um: 7.0, fraction: 0.0, seed: 0 }
    }
}

impl PorositySpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.01).contains(&self.fraction) {
            return Err(Error::Invalid(format!("void fraction {} outside [0, 0.01]", self.fraction)));
        }
        if !(self.diameter_um > 0.0) {
            return Err(Error::Invalid("void diameter must be positive".into()));
        }
        if !(4.0..=10.0).contains(&self.diameter_um) {
            log::warn!("void diameter {} µm outside the usual 4-10 µm range", self.diameter_um);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PorositySeed {
    pub nodes: Vec<usize>,
    pub target_fraction: f64,
    pub achieved_fraction: f64,
}

/// Lumped nodal area over active elements.
fn nodal_areas(mesh: &Mesh2D, elements: &[usize]) -> Vec<f64> {
    let mut a = vec![0.0; mesh.node_count()];
    for &e in elements {
        let nodes = mesh.elements[e].nodes();
        let share = mesh.element_area(e) / nodes.len() as f64;
        for &n in nodes {
            a[n] += share;
        }
    }
    a
}

/// Picks pairwise non-adjacent nodes inside the weld metal (regions whose name
/// starts with `weld`) until their void area is within ±10% of the target
/// fraction. A seeded node stands for a void of area max(πd²/4, nodal area),
/// since a single node cannot represent anything smaller.
pub fn seed_porosity(mesh: &Mesh2D, spec: &PorositySpec) -> Result<PorositySeed> {
    spec.validate()?;
    let weld: Vec<bool> = (0..mesh.element_count())
        .map(|e| mesh.region_of(e).starts_with("weld") && mesh.is_active(e))
        .collect();
    let weld_elems: Vec<usize> = (0..mesh.element_count()).filter(|&e| weld[e]).collect();
    let weld_area: f64 = weld_elems.iter().map(|&e| mesh.element_area(e)).sum();
    if spec.fraction == 0.0 {
        return Ok(PorositySeed { nodes: Vec::new(), target_fraction: 0.0, achieved_fraction: 0.0 });
    }
    if weld_area == 0.0 {
        return Err(Error::Porosity("mesh has no active weld metal".into()));
    }
    // Interior weld nodes: every adjacent element is weld metal.
    let mut inside = vec![true; mesh.node_count()];
    let mut touched = vec![false; mesh.node_count()];
    for e in 0..mesh.element_count() {
        for &n in mesh.elements[e].nodes() {
            if weld[e] {
                touched[n] = true;
            } else {
                inside[n] = false;
            }
        }
    }
    let area = nodal_areas(mesh, &weld_elems);
    let void = std::f64::consts::PI * (spec.diameter_um * 1e-3).powi(2) / 4.0;
    let mut candidates: Vec<usize> = (0..mesh.node_count()).filter(|&n| inside[n] && touched[n]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    candidates.shuffle(&mut rng);

    let target = spec.fraction * weld_area;
    let neighbors = mesh.node_neighbors();
    let mut blocked = vec![false; mesh.node_count()];
    let mut picked = Vec::new();
    let mut total = 0.0;
    for n in candidates {
        if total >= 0.9 * target {
            break;
        }
        let a = void.max(area[n]);
        if blocked[n] || total + a > 1.1 * target {
            continue;
        }
        picked.push(n);
        total += a;
        blocked[n] = true;
        for &m in &neighbors[n] {
            blocked[m] = true;
        }
    }
    if total < 0.9 * target {
        return Err(Error::Porosity(format!(
            "reached void fraction {:.5} of target {:.5} with disjoint patches",
            total / weld_area,
            spec.fraction
        )));
    }
    picked.sort_unstable();
    Ok(PorositySeed { nodes: picked, target_fraction: spec.fraction, achieved_fraction: total / weld_area })
}

/// Straight defect in local pipe coordinates (lateral x, depth).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defect {
    pub center: Point,
    /// [mm]
    pub length: f64,
    /// Angle from the lateral axis towards the outer surface [°].
    pub angle_deg: f64,
}

impl Defect {
    /// Defect of `length` starting at `start` and heading at `angle_deg`.
    pub fn from_start(start: Point, length: f64, angle_deg: f64) -> Self {
        let (s, c) = angle_deg.to_radians().sin_cos();
        Self { center: [start[0] + 0.5 * length * c, start[1] + 0.5 * length * s], length, angle_deg }
    }

    pub fn endpoints(&self) -> (Point, Point) {
        let (s, c) = self.angle_deg.to_radians().sin_cos();
        let h = 0.5 * self.length;
        ([self.center[0] - h * c, self.center[1] - h * s], [self.center[0] + h * c, self.center[1] + h * s])
    }
}

/// Mean edge length of the elements around every node.
fn local_size(mesh: &Mesh2D) -> Vec<f64> {
    let mut sum = vec![0.0; mesh.node_count()];
    let mut cnt = vec![0usize; mesh.node_count()];
    for e in 0..mesh.element_count() {
        let h = mesh.element_area(e).sqrt();
        for &n in mesh.elements[e].nodes() {
            sum[n] += h;
            cnt[n] += 1;
        }
    }
    sum.iter().zip(&cnt).map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 }).collect()
}

/// Nodes within one local element size of any defect segment.
pub fn seed_defects(mesh: &Mesh2D, pipe: &PipeSectionSpec, defects: &[Defect]) -> Result<Vec<usize>> {
    let half_width = pipe.inner_radius * pipe.half_angle_deg.to_radians();
    let tol = 1e-9;
    for d in defects {
        let (a, b) = d.endpoints();
        for p in [a, b] {
            if p[1] < -tol || p[1] > pipe.wall_thickness + tol || p[0].abs() >= half_width || !(d.length > 0.0) {
                return Err(Error::DefectOutsideWall(format!(
                    "defect at ({}, {}) of length {} leaves the wall",
                    d.center[0], d.center[1], d.length
                )));
            }
        }
    }
    if defects.is_empty() {
        return Ok(Vec::new());
    }
    let h = local_size(mesh);
    let mut out: Vec<usize> = (0..mesh.node_count())
        .filter(|&n| {
            let q = pipe.to_local(mesh.nodes[n]);
            defects.iter().any(|d| {
                let (a, b) = d.endpoints();
                segment_distance(q, a, b) <= h[n]
            })
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}
