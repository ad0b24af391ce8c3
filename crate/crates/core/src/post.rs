//! Far fields, radar cross sections and monolithic reference solves.
//!
//! Radiating fields are evaluated in the radiation zone from their boundary
//! traces. With I[u](r̂) = ∫ e^{-ik r̂·y} u(y) dy, the amplitudes of the two
//! potentials (E ~ (e^{ikr}/r) A(r̂)) are
//!
//! ```text
//!     A_T[j](r̂) = (ik/4π) ( I[j] - r̂ (r̂·I[j]) )
//!     A_K[m](r̂) = -(ik/4π) r̂ × I[m]
//! ```
//!
//! so a field represented as E = 𝒯 j - 𝒦 m radiates
//! A = (ik/4π) ( I[j]_⊥ + r̂ × I[m] ).

use std::sync::Arc;

use ndarray::Array2;

use crate::bem::{assemble_t, WaveContext};
use crate::excitation::{project_tangential_e, PlaneWave};
use crate::geom::{vec3, Vec3};
use crate::linalg::{frobenius, LuFactor};
use crate::mesh::{RwgSpace, ShellMesh};
use crate::quadrature::{triangle_rule, QuadratureRule};
use crate::C64;

/// Radiation-zone amplitudes A(r̂) over a list of directions.
#[derive(Debug, Clone)]
pub struct FarFieldPattern {
    pub directions: Vec<Vec3>,
    pub e_far: Vec<[C64; 3]>,
}

impl FarFieldPattern {
    pub fn zeros(directions: Vec<Vec3>) -> FarFieldPattern {
        let e_far = vec![[C64::new(0.0, 0.0); 3]; directions.len()];
        FarFieldPattern { directions, e_far }
    }

    pub fn add(&mut self, other: &FarFieldPattern) {
        assert_eq!(self.directions.len(), other.directions.len());
        for (a, b) in self.e_far.iter_mut().zip(&other.e_far) {
            for i in 0..3 {
                a[i] += b[i];
            }
        }
    }

    pub fn amplitude_norm(&self, i: usize) -> f64 {
        self.e_far[i]
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Spherical direction grid helper: (θ°, φ°) pairs to unit vectors.
pub fn directions_from_angles(angles: &[(f64, f64)]) -> Vec<Vec3> {
    angles
        .iter()
        .map(|&(theta, phi)| {
            let (st, ct) = theta.to_radians().sin_cos();
            let (sp, cp) = phi.to_radians().sin_cos();
            vec3(st * cp, st * sp, ct)
        })
        .collect()
}

/// Radiated amplitude of boundary traces carried by an RWG space.
///
/// `electric` holds RWG coefficients of j = n×H; `magnetic` holds RWG
/// coefficients of the tangential electric trace, whose rotation by the
/// shell normal (m = n×E) is applied pointwise inside the integral.
pub fn far_field(
    space: &RwgSpace,
    electric: Option<&[C64]>,
    magnetic: Option<&[C64]>,
    ctx: &WaveContext,
    directions: &[Vec3],
    order: usize,
) -> FarFieldPattern {
    for d in directions {
        assert!((d.norm() - 1.0).abs() < 1e-9, "direction not unit");
    }
    let k = ctx.wavenumber;
    let rule = triangle_rule(order);
    use rayon::prelude::*;
    let e_far: Vec<[C64; 3]> = directions
        .par_iter()
        .map(|&r_hat| {
            let mut int_j = [C64::new(0.0, 0.0); 3];
            let mut int_m = [C64::new(0.0, 0.0); 3];
            for (t, dofs) in space.tri_dofs.iter().enumerate() {
                if dofs.is_empty() {
                    continue;
                }
                let verts = space.shell.tri_coords(t);
                let area = crate::geom::triangle_area(verts);
                let normal = crate::geom::triangle_normal(verts);
                for &(s, tt, w) in &rule.points {
                    let y = crate::geom::triangle_point(verts, s, tt);
                    let (sn, cs) = (-k * r_hat.dot(y)).sin_cos();
                    let phase = C64::new(cs, sn) * (w * area);
                    // tangential RWG field at y
                    let mut u = [C64::new(0.0, 0.0); 3];
                    for dof in dofs {
                        let e = &space.edges[dof.edge];
                        let c = dof.sign * e.length / (2.0 * area);
                        let th = y - verts[dof.opp];
                        if let Some(j) = electric {
                            let cj = j[dof.edge] * c;
                            int_j[0] += phase * cj * th.x;
                            int_j[1] += phase * cj * th.y;
                            int_j[2] += phase * cj * th.z;
                        }
                        if let Some(m) = magnetic {
                            let cm = m[dof.edge] * c;
                            u[0] += cm * th.x;
                            u[1] += cm * th.y;
                            u[2] += cm * th.z;
                        }
                    }
                    if magnetic.is_some() {
                        // n × u
                        let rot = [
                            u[2] * normal.y - u[1] * normal.z,
                            u[0] * normal.z - u[2] * normal.x,
                            u[1] * normal.x - u[0] * normal.y,
                        ];
                        for i in 0..3 {
                            int_m[i] += phase * rot[i];
                        }
                    }
                }
            }
            // A = (ik/4π) ( I[j] - r̂(r̂·I[j]) + r̂ × I[m] )
            let rj = int_j[0] * r_hat.x + int_j[1] * r_hat.y + int_j[2] * r_hat.z;
            let r_cross_m = [
                int_m[2] * r_hat.y - int_m[1] * r_hat.z,
                int_m[0] * r_hat.z - int_m[2] * r_hat.x,
                int_m[1] * r_hat.x - int_m[0] * r_hat.y,
            ];
            let pref = C64::new(0.0, k / (4.0 * std::f64::consts::PI));
            let mut a = [C64::new(0.0, 0.0); 3];
            let rv = [r_hat.x, r_hat.y, r_hat.z];
            for i in 0..3 {
                a[i] = pref * (int_j[i] - rj * rv[i] + r_cross_m[i]);
            }
            a
        })
        .collect();
    FarFieldPattern {
        directions: directions.to_vec(),
        e_far,
    }
}

/// σ(r̂) = 4π ‖A(r̂)‖² in dB relative to 1 m², for unit incident amplitude.
pub fn rcs(pattern: &FarFieldPattern) -> Vec<f64> {
    pattern
        .e_far
        .iter()
        .map(|a| {
            let norm_sqr: f64 = a.iter().map(|z| z.norm_sqr()).sum();
            10.0 * (4.0 * std::f64::consts::PI * norm_sqr).log10()
        })
        .collect()
}

/// `rcs.csv`: one row per direction, 15 significant digits.
pub fn write_rcs_csv(
    path: impl AsRef<std::path::Path>,
    angles: &[(f64, f64)],
    rcs_db: &[f64],
) -> std::io::Result<()> {
    use std::io::Write;
    assert_eq!(angles.len(), rcs_db.len());
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "theta_deg,phi_deg,rcs_dbsm")?;
    for (&(t, p), &v) in angles.iter().zip(rcs_db) {
        writeln!(f, "{t:.15e},{p:.15e},{v:.15e}")?;
    }
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum PostError {
    #[error(transparent)]
    Mesh(#[from] crate::mesh::MeshError),
    #[error(transparent)]
    Solve(#[from] crate::linalg::SolveError),
    #[error("interior resonance suspected on the reference shell (σ ratio {0:.3e})")]
    InteriorResonance(f64),
}

/// Reference solution on a surface without any interface decomposition:
/// the metallic integral equation [T] u = -(load of E_inc) on the given
/// shell (closed, or an open screen whose interior edges carry the dofs).
pub struct MonolithicSolution {
    pub space: Arc<RwgSpace>,
    /// n×H_total coefficients (total current; the current jump on screens).
    pub current: Vec<C64>,
}

pub fn monolithic_efie(
    shell: ShellMesh,
    ctx: &WaveContext,
    wave: &PlaneWave,
    quad: &QuadratureRule,
) -> Result<MonolithicSolution, PostError> {
    let space = Arc::new(crate::mesh::RwgSpace::build(Arc::new(shell))?);
    let t = assemble_t(&space, ctx, quad);
    let scale = frobenius(&t.data) / (t.data.nrows() as f64).sqrt();
    let lu = LuFactor::new(t.data)?;
    let ratio = lu.smallest_singular_value(6) / scale;
    if ratio < crate::admittance::DEFAULT_RESONANCE_THRESHOLD {
        return Err(PostError::InteriorResonance(ratio));
    }
    let mut load = project_tangential_e(
        &space,
        wave,
        quad.regular_order.max(crate::excitation::PROJECTION_ORDER),
    );
    for v in load.iter_mut() {
        *v = -*v;
    }
    let current = lu.solve(&load);
    Ok(MonolithicSolution { space, current })
}

impl MonolithicSolution {
    /// Scattered far field of the metallic solution: E_s = 𝒯(n×H_total).
    pub fn far_field(
        &self,
        ctx: &WaveContext,
        directions: &[Vec3],
        order: usize,
    ) -> FarFieldPattern {
        far_field(&self.space, Some(&self.current), None, ctx, directions, order)
    }
}

/// Total scattered far field of a solved interface system: the radiation of
/// the outer-subdomain field (both traces on the outer shell) plus the
/// radiation of the short-cut field (𝒯 of the short-cut current).
pub fn ddm_far_field(
    system: &crate::ddm::DdmSystem,
    e_tan: &[C64],
    directions: &[Vec3],
    order: usize,
) -> Result<FarFieldPattern, crate::ddm::DdmError> {
    let u_plus = system.a_plus.apply_shell(e_tan)?;
    let e_ext = system.maps.extend(e_tan, crate::mesh::Side::Plus);
    let space = &system.maps.plus_space;
    let mut pattern = far_field(
        space,
        Some(&u_plus),
        Some(&e_ext),
        &system.ctx,
        directions,
        order,
    );
    let shortcut = far_field(
        space,
        Some(&system.shortcut_current),
        None,
        &system.ctx,
        directions,
        order,
    );
    pattern.add(&shortcut);
    Ok(pattern)
}

/// Dense far-field check matrix used in tests; re-exported for the bench
/// crate.
pub fn pattern_matrix(pattern: &FarFieldPattern) -> Array2<C64> {
    let n = pattern.directions.len();
    Array2::from_shape_fn((n, 3), |(i, j)| pattern.e_far[i][j])
}
