//! Subdomain admittance operators on the interface.
//!
//! The admittance map A±_Σ sends interface tangential-field coefficients v₀
//! to the magnetic trace n±×H± of the subdomain field whose tangential
//! trace is the extension-by-zero of v₀. It is realized by one inner
//! integral-equation solve per application on the closed shell:
//!
//! ```text
//!     [T±] u± = [½ Id + K± n±×] (P± v₀),     A±_Σ v₀ = R± u±
//! ```
//!
//! The inner solve factorizes `[T±]` once by default (every outer iteration
//! then costs two triangular solves per shell); a nested GMRES inner solver
//! is available behind a flag.
//!
//! Both shells keep the interface triangles in the same stored orientation;
//! the cavity shell's opposite normal enters analytically as a sign on the
//! double-layer block. When the two shells are the same surface seen from
//! opposite sides (thin scatterers), their single-layer matrices coincide
//! and the factorization is shared.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use ndarray::Array2;

use crate::bem::{assemble_t_and_d, WaveContext};
use crate::linalg::{
    frobenius, gmres, matvec, GmresConfig, LinearOperator, LuFactor, SparseRealMat,
};
use crate::mesh::{InterfaceMaps, Side};
use crate::quadrature::QuadratureRule;
use crate::C64;

#[derive(Debug, thiserror::Error)]
pub enum AdmittanceError {
    #[error("interface has no degrees of freedom")]
    EmptyInterface,
    #[error(
        "interior resonance suspected on the {side} shell: σ_min/σ_max ≈ {sigma_ratio:.3e} below threshold {threshold:.3e}"
    )]
    InteriorResonance {
        side: Side,
        sigma_ratio: f64,
        threshold: f64,
    },
    #[error("shell matrix factorization failed: {0}")]
    Factorization(#[from] crate::linalg::SolveError),
    #[error("inner iterative solve did not converge (residual {residual:.3e})")]
    InnerNoConvergence { residual: f64 },
}

/// How the inner EFIE systems are solved.
#[derive(Debug, Clone)]
pub enum InnerSolver {
    /// Dense LU, factorized once and reused for every application.
    Direct,
    /// Nested GMRES on the unfactorized shell matrix.
    Gmres(GmresConfig),
}

impl Default for InnerSolver {
    fn default() -> Self {
        InnerSolver::Direct
    }
}

/// Assembled operators of one closed shell.
pub struct ShellSystem {
    /// Kept for the iterative inner solver (and diagnostics).
    pub t_matrix: Option<Array2<C64>>,
    pub t_lu: Option<LuFactor>,
    /// Principal-value double-layer block with this shell's own normals.
    pub d: Array2<C64>,
    pub mass: SparseRealMat,
    /// Estimated σ_min/σ_max of [T] when factorized.
    pub sigma_ratio: f64,
}

impl ShellSystem {
    fn build(
        space: &Arc<crate::mesh::RwgSpace>,
        ctx: &WaveContext,
        quad: &QuadratureRule,
        inner: &InnerSolver,
        side: Side,
        resonance_threshold: f64,
    ) -> Result<ShellSystem, AdmittanceError> {
        let (t, d) = assemble_t_and_d(space, ctx, quad);
        let mass = crate::bem::assemble_mass_sparse(space);
        let scale = frobenius(&t) / (t.nrows() as f64).sqrt();
        match inner {
            InnerSolver::Direct => {
                let lu = LuFactor::new(t)?;
                let sigma_ratio = lu.smallest_singular_value(6) / scale;
                if sigma_ratio < resonance_threshold {
                    return Err(AdmittanceError::InteriorResonance {
                        side,
                        sigma_ratio,
                        threshold: resonance_threshold,
                    });
                }
                Ok(ShellSystem {
                    t_matrix: None,
                    t_lu: Some(lu),
                    d,
                    mass,
                    sigma_ratio,
                })
            }
            InnerSolver::Gmres(_) => Ok(ShellSystem {
                t_matrix: Some(t),
                t_lu: None,
                d,
                mass,
                sigma_ratio: f64::NAN,
            }),
        }
    }

    /// rhs = (½ M + sign·D) v on the shell.
    fn kn_apply(&self, v: &[C64], d_sign: f64) -> Vec<C64> {
        let n = v.len();
        let mut dv = vec![C64::new(0.0, 0.0); n];
        matvec(&self.d, v, &mut dv);
        let mut mv = vec![C64::new(0.0, 0.0); n];
        self.mass.apply(v, &mut mv);
        for i in 0..n {
            dv[i] = dv[i] * d_sign + mv[i] * 0.5;
        }
        dv
    }

    fn t_solve(&self, rhs: &[C64], inner: &InnerSolver) -> Result<Vec<C64>, AdmittanceError> {
        match inner {
            InnerSolver::Direct => Ok(self
                .t_lu
                .as_ref()
                .expect("direct inner solver carries a factorization")
                .solve(rhs)),
            InnerSolver::Gmres(cfg) => {
                let t = self
                    .t_matrix
                    .as_ref()
                    .expect("iterative inner solver keeps the matrix");
                let (u, report) = gmres(&crate::linalg::DenseOp(t), rhs, cfg, None);
                if !report.converged {
                    return Err(AdmittanceError::InnerNoConvergence {
                        residual: *report.residual_history.last().unwrap_or(&f64::NAN),
                    });
                }
                Ok(u)
            }
        }
    }
}

/// One subdomain admittance map, ready for repeated application.
pub struct AdmittanceOperator {
    pub side: Side,
    pub maps: Arc<InterfaceMaps>,
    shell: Arc<ShellSystem>,
    /// +1 for the shell whose normals match the stored interface winding,
    /// -1 when the double-layer block is reused from the opposite side.
    d_sign: f64,
    inner: InnerSolver,
    /// Set when an inner iterative solve fails inside a LinearOperator
    /// application (which cannot return an error).
    poisoned: AtomicBool,
}

impl AdmittanceOperator {
    /// Full-shell current u± for an interface input: the inner EFIE solve.
    pub fn apply_shell(&self, v0: &[C64]) -> Result<Vec<C64>, AdmittanceError> {
        let extended = self.maps.extend(v0, self.side);
        let rhs = self.shell.kn_apply(&extended, self.d_sign);
        self.shell.t_solve(&rhs, &self.inner)
    }

    /// A±_Σ v₀ = R± u±.
    pub fn apply_interface(&self, v0: &[C64]) -> Result<Vec<C64>, AdmittanceError> {
        Ok(self.maps.restrict(&self.apply_shell(v0)?, self.side))
    }

    /// Solve `[T±] x = rhs` on the shell with this operator's inner solver
    /// (reusing the cached factorization when direct).
    pub fn solve_t(&self, rhs: &[C64]) -> Result<Vec<C64>, AdmittanceError> {
        self.shell.t_solve(rhs, &self.inner)
    }

    pub fn interface_dim(&self) -> usize {
        self.maps.interface_dim()
    }

    pub fn poisoned(&self) -> bool {
        self.poisoned.load(Ordering::Relaxed)
    }

    pub fn shell_sigma_ratio(&self) -> f64 {
        self.shell.sigma_ratio
    }
}

impl LinearOperator for AdmittanceOperator {
    fn dim(&self) -> usize {
        self.interface_dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        match self.apply_interface(x) {
            Ok(v) => y.copy_from_slice(&v),
            Err(_) => {
                // keep the outer iteration alive; the caller checks the flag
                self.poisoned.store(true, Ordering::Relaxed);
                y.fill(C64::new(0.0, 0.0));
            }
        }
    }
}

/// Spec-level entry point: admittance operator realized directly from the
/// interface maps (spec operation `build_admittance`).
pub fn build_admittance(
    maps: &Arc<InterfaceMaps>,
    ctx: &WaveContext,
    quad: &QuadratureRule,
    side: Side,
    inner: InnerSolver,
) -> Result<AdmittanceOperator, AdmittanceError> {
    build_admittance_with_threshold(maps, ctx, quad, side, inner, DEFAULT_RESONANCE_THRESHOLD)
}

/// σ_min/σ_max below this is treated as an interior resonance.
pub const DEFAULT_RESONANCE_THRESHOLD: f64 = 1e-10;

pub fn build_admittance_with_threshold(
    maps: &Arc<InterfaceMaps>,
    ctx: &WaveContext,
    quad: &QuadratureRule,
    side: Side,
    inner: InnerSolver,
    resonance_threshold: f64,
) -> Result<AdmittanceOperator, AdmittanceError> {
    if maps.interface_dim() == 0 {
        return Err(AdmittanceError::EmptyInterface);
    }
    let space = maps.shell_space(side);
    let shell = ShellSystem::build(space, ctx, quad, &inner, side, resonance_threshold)?;
    Ok(AdmittanceOperator {
        side,
        maps: Arc::clone(maps),
        shell: Arc::new(shell),
        d_sign: 1.0,
        inner,
        poisoned: AtomicBool::new(false),
    })
}

/// Both admittance operators, sharing the assembled shell system (and its
/// factorization) when the two shells are the same surface with opposite
/// orientation.
pub fn build_admittance_pair(
    maps: &Arc<InterfaceMaps>,
    ctx: &WaveContext,
    quad: &QuadratureRule,
    inner: InnerSolver,
    resonance_threshold: f64,
) -> Result<(AdmittanceOperator, AdmittanceOperator), AdmittanceError> {
    if maps.interface_dim() == 0 {
        return Err(AdmittanceError::EmptyInterface);
    }
    let plus_shell = Arc::new(ShellSystem::build(
        &maps.plus_space,
        ctx,
        quad,
        &inner,
        Side::Plus,
        resonance_threshold,
    )?);
    let plus = AdmittanceOperator {
        side: Side::Plus,
        maps: Arc::clone(maps),
        shell: Arc::clone(&plus_shell),
        d_sign: 1.0,
        inner: inner.clone(),
        poisoned: AtomicBool::new(false),
    };
    let minus = if shells_congruent(maps) {
        AdmittanceOperator {
            side: Side::Minus,
            maps: Arc::clone(maps),
            shell: plus_shell,
            d_sign: -1.0,
            inner,
            poisoned: AtomicBool::new(false),
        }
    } else {
        let shell = ShellSystem::build(
            &maps.minus_space,
            ctx,
            quad,
            &inner,
            Side::Minus,
            resonance_threshold,
        )?;
        AdmittanceOperator {
            side: Side::Minus,
            maps: Arc::clone(maps),
            shell: Arc::new(shell),
            d_sign: 1.0,
            inner,
            poisoned: AtomicBool::new(false),
        }
    };
    Ok((plus, minus))
}

/// True when the two shells carry the same basis functions on the same
/// geometry with everywhere-opposite normals, so that [T⁻] = [T⁺],
/// [M⁻] = [M⁺] and [D⁻] = -[D⁺].
pub fn shells_congruent(maps: &InterfaceMaps) -> bool {
    let p = &maps.plus_space;
    let m = &maps.minus_space;
    if p.dof_count() != m.dof_count() || p.shell.triangles.len() != m.shell.triangles.len() {
        return false;
    }
    let eps = 1e-14;
    for (ep, em) in p.edges.iter().zip(&m.edges) {
        if ep.verts != em.verts {
            return false;
        }
        for slot in 0..2 {
            let tp = p.shell.tri_coords(ep.tri[slot]);
            let tm = m.shell.tri_coords(em.tri[slot]);
            // same free vertex, same vertex set
            if tp[ep.opp[slot]].distance(tm[em.opp[slot]]) > eps {
                return false;
            }
            let mut matched = [false; 3];
            for a in tp {
                let Some(j) = (0..3).find(|&j| !matched[j] && a.distance(tm[j]) <= eps) else {
                    return false;
                };
                matched[j] = true;
            }
            // opposite windings
            let np = crate::geom::triangle_normal(tp);
            let nm = crate::geom::triangle_normal(tm);
            if (np + nm).norm() > 1e-10 {
                return false;
            }
        }
    }
    true
}
