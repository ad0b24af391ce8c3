//! Incident plane waves and their Galerkin load vectors.
//!
//! Fields are kept in the normalized form E(x) = p e^{ik d·x},
//! H = (1/ik) ∇×E = (d×p) e^{ik d·x}; impedance scaling cancels in every
//! reported quantity.

use std::sync::Arc;

use crate::bem::WaveContext;
use crate::geom::{vec3, Vec3};
use crate::mesh::RwgSpace;
use crate::quadrature::triangle_rule;
use crate::C64;

/// Default rule size for load-vector and radiation quadrature: the
/// twelve-point (degree 6) rule keeps order-raising changes below 1e-8 for
/// both load vectors on wavelength/10 meshes.
pub const PROJECTION_ORDER: usize = 12;

/// Which spherical unit vector carries the electric field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Theta,
    Phi,
}

#[derive(Debug, Clone, Copy)]
pub struct PlaneWave {
    /// Propagation direction, unit.
    pub direction: Vec3,
    /// Electric polarization, unit, orthogonal to `direction`.
    pub polarization: Vec3,
    pub ctx: WaveContext,
}

impl PlaneWave {
    pub fn new(direction: Vec3, polarization: Vec3, ctx: WaveContext) -> PlaneWave {
        assert!((direction.norm() - 1.0).abs() < 1e-12, "direction not unit");
        assert!(
            (polarization.norm() - 1.0).abs() < 1e-12,
            "polarization not unit"
        );
        assert!(
            direction.dot(polarization).abs() < 1e-12,
            "polarization not transverse"
        );
        PlaneWave {
            direction,
            polarization,
            ctx,
        }
    }

    /// Propagation along the (θ, φ) spherical direction with the electric
    /// field on the θ̂ or φ̂ unit vector.
    pub fn from_angles(theta_deg: f64, phi_deg: f64, pol: Polarization, ctx: WaveContext) -> PlaneWave {
        let (st, ct) = theta_deg.to_radians().sin_cos();
        let (sp, cp) = phi_deg.to_radians().sin_cos();
        let d = vec3(st * cp, st * sp, ct);
        let p = match pol {
            Polarization::Theta => vec3(ct * cp, ct * sp, -st),
            Polarization::Phi => vec3(-sp, cp, 0.0),
        };
        PlaneWave::new(d, p, ctx)
    }

    fn phase(&self, x: Vec3) -> C64 {
        let (s, c) = (self.ctx.wavenumber * self.direction.dot(x)).sin_cos();
        C64::new(c, s)
    }

    /// E(x) = p e^{ik d·x}.
    pub fn eval_e(&self, x: Vec3) -> [C64; 3] {
        let ph = self.phase(x);
        [
            ph * self.polarization.x,
            ph * self.polarization.y,
            ph * self.polarization.z,
        ]
    }

    /// H(x) = (d×p) e^{ik d·x}.
    pub fn eval_h(&self, x: Vec3) -> [C64; 3] {
        let h = self.direction.cross(self.polarization);
        let ph = self.phase(x);
        [ph * h.x, ph * h.y, ph * h.z]
    }
}

fn project(
    space: &Arc<RwgSpace>,
    order: usize,
    field: impl Fn(Vec3, Vec3) -> [C64; 3],
) -> Vec<C64> {
    let rule = triangle_rule(order);
    let mut out = vec![C64::new(0.0, 0.0); space.dof_count()];
    for (t, dofs) in space.tri_dofs.iter().enumerate() {
        if dofs.is_empty() {
            continue;
        }
        let verts = space.shell.tri_coords(t);
        let area = crate::geom::triangle_area(verts);
        let normal = crate::geom::triangle_normal(verts);
        for &(s, tt, w) in &rule.points {
            let x = crate::geom::triangle_point(verts, s, tt);
            let f = field(x, normal);
            for dof in dofs {
                let e = &space.edges[dof.edge];
                let c = dof.sign * e.length / (2.0 * area) * w * area;
                let th = x - verts[dof.opp];
                out[dof.edge] += (f[0] * th.x + f[1] * th.y + f[2] * th.z) * c;
            }
        }
    }
    out
}

/// Load vector bᵢ = ∫ E_inc · θᵢ (the tangential part is implicit: θᵢ is
/// tangential).
pub fn project_tangential_e(space: &Arc<RwgSpace>, wave: &PlaneWave, order: usize) -> Vec<C64> {
    project(space, order, |x, _| wave.eval_e(x))
}

/// Load vector cᵢ = ∫ (n × H_inc) · θᵢ with the shell's own normals.
pub fn project_rotated_h(space: &Arc<RwgSpace>, wave: &PlaneWave, order: usize) -> Vec<C64> {
    project(space, order, |x, n| {
        let h = wave.eval_h(x);
        // n × h with complex components of h
        [
            h[2] * n.y - h[1] * n.z,
            h[0] * n.z - h[2] * n.x,
            h[1] * n.x - h[0] * n.y,
        ]
    })
}
