//! Failure criteria: a through-wall crack path and a through-wall plastic
//! ligament in the base metal.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::fem::Geometry;
use crate::mesh::pipe::PipeSectionSpec;
use crate::mesh::{Mesh2D, Point};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureMode {
    Cracking,
    Yielding,
    CapReached,
}

impl FailureMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureMode::Cracking => "cracking",
            FailureMode::Yielding => "yielding",
            FailureMode::CapReached => "cap_reached",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FailureThresholds {
    /// φ above which a node counts as broken.
    pub crack_phi: f64,
    /// Plastic strain added during pressurization that marks a yielded sample.
    pub yield_strain: f64,
    /// Samples per through-wall ray.
    pub ray_samples: usize,
    /// Lateral spacing of candidate rays [mm].
    pub ray_spacing: f64,
    /// Stop as yielded once the thin-wall yield pressure is reached.
    pub arrest_at_analytic_yield: bool,
}

impl Default for FailureThresholds {
    fn default() -> Self {
        Self {
            crack_phi: crate::fracture::CRACK_THRESHOLD,
            yield_strain: 0.02,
            ray_samples: 16,
            ray_spacing: 0.5,
            arrest_at_analytic_yield: true,
        }
    }
}

/// Thin-wall yield pressure σ_y b / R.
pub fn analytic_yield_pressure(sigma_y: f64, wall: f64, radius: f64) -> f64 {
    sigma_y * wall / radius
}

/// Shortest chain of broken nodes joining two node sets, as coordinates.
/// Nodes are linked when they share an active element.
pub fn crack_path(mesh: &Mesh2D, phi: &[f64], threshold: f64, from: &[usize], to: &[usize]) -> Option<Vec<Point>> {
    let nn = mesh.node_count();
    let broken: Vec<bool> = phi.iter().map(|&p| p >= threshold).collect();
    let mut goal = vec![false; nn];
    for &n in to {
        goal[n] = true;
    }
    let neighbors = mesh.node_neighbors();
    let mut prev = vec![usize::MAX; nn];
    let mut seen = vec![false; nn];
    let mut queue = VecDeque::new();
    for &n in from {
        if broken[n] && !seen[n] {
            seen[n] = true;
            queue.push_back(n);
        }
    }
    while let Some(n) = queue.pop_front() {
        if goal[n] {
            let mut path = vec![mesh.nodes[n]];
            let mut k = n;
            while prev[k] != usize::MAX {
                k = prev[k];
                path.push(mesh.nodes[k]);
            }
            path.reverse();
            return Some(path);
        }
        for &m in &neighbors[n] {
            if broken[m] && !seen[m] {
                seen[m] = true;
                prev[m] = n;
                queue.push_back(m);
            }
        }
    }
    None
}

/// Radial sampling rays through the wall, each a list of quadrature points
/// that all lie in the named region.
#[derive(Debug, Clone)]
pub struct YieldRays {
    pub rays: Vec<Vec<usize>>,
    pub positions: Vec<f64>,
}

impl YieldRays {
    pub fn new(mesh: &Mesh2D, geom: &Geometry, pipe: &PipeSectionSpec, region: &str, th: &FailureThresholds) -> Result<Self> {
        let reg = mesh.region_index(region)?;
        let mut owner = vec![0; geom.qps.len()];
        for e in 0..mesh.element_count() {
            for k in mesh.quad_points(e) {
                owner[k] = e;
            }
        }
        let local: Vec<Point> = geom.qps.iter().map(|q| pipe.to_local(q.x)).collect();
        let half = pipe.inner_radius * pipe.half_angle_deg.to_radians();
        let n = ((2.0 * half) / th.ray_spacing).floor() as usize;
        let mut rays = Vec::new();
        let mut positions = Vec::new();
        for i in 1..n {
            let x = -half + i as f64 * th.ray_spacing;
            let mut ray = Vec::with_capacity(th.ray_samples);
            for j in 0..th.ray_samples {
                let d = (j as f64 + 0.5) / th.ray_samples as f64 * pipe.wall_thickness;
                let k = nearest(&local, [x, d]);
                ray.push(k);
            }
            if ray.iter().all(|&k| mesh.elements[owner[k]].region == reg && mesh.is_active(owner[k])) {
                rays.push(ray);
                positions.push(x);
            }
        }
        Ok(Self { rays, positions })
    }

    /// Lateral position of the first ray whose every sample reached `limit`.
    pub fn yielded(&self, eps_bar: &[f64], limit: f64) -> Option<f64> {
        self.rays.iter().zip(&self.positions).find(|(r, _)| r.iter().all(|&k| eps_bar[k] >= limit)).map(|(_, &x)| x)
    }

    /// Largest over rays of the smallest sample value.
    pub fn weakest_ligament(&self, eps_bar: &[f64]) -> f64 {
        self.rays.iter().map(|r| r.iter().map(|&k| eps_bar[k]).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    }
}

fn nearest(pts: &[Point], p: Point) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (k, q) in pts.iter().enumerate() {
        let d = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
        if d < best.0 {
            best = (d, k);
        }
    }
    best.1
}
