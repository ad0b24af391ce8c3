//! Green-kernel evaluation and dense Galerkin assembly of the boundary
//! operators on RWG spaces.
//!
//! The scalar kernel is
//!
//! ```text
//!     g(x,y) = -(1/4π) e^{ik‖x-y‖} / ‖x-y‖
//! ```
//!
//! (note the leading minus sign, kept consistently in operators and
//! right-hand sides). The single-layer operator T = (1/ik)∇×(∇× G) has the
//! weak form
//!
//! ```text
//!     ⟨Tu,v⟩ = (1/ik) [ k² ∬ g u(y)·v(x) - ∬ g div u(y) div v(x) ]
//! ```
//!
//! obtained from ∇×∇× = ∇div - Δ and moving the surface divergences onto
//! the densities. The rotated double-layer operator is assembled as
//! `½ [Id] + [D]` where D is the convergent principal-value part
//!
//! ```text
//!     D_ij = ∬ θ_i(x) · ( ∇ₓg(x,y) × ( n(y) × θ_j(y) ) )
//! ```
//!
//! and the `½ [Id]` accounts for the trace jump of the double-layer
//! potential on its own surface.

use ndarray::Array2;
use std::sync::Arc;

use crate::geom::Vec3;
use crate::linalg::SparseRealMat;
use crate::mesh::{InterfaceMaps, RwgSpace, Side};
use crate::quadrature::{
    self, classify_pair, singular_nodes, triangle_rule, PairConfig, QuadratureRule,
};
use crate::C64;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Wavenumber/frequency pair for a time-harmonic problem.
#[derive(Debug, Clone, Copy)]
pub struct WaveContext {
    /// k in rad/m, positive.
    pub wavenumber: f64,
    /// Frequency in Hz.
    pub frequency: f64,
}

impl WaveContext {
    pub fn from_frequency_hz(f: f64) -> WaveContext {
        assert!(f > 0.0, "frequency must be positive");
        WaveContext {
            wavenumber: 2.0 * std::f64::consts::PI * f / SPEED_OF_LIGHT,
            frequency: f,
        }
    }

    pub fn from_frequency_mhz(f: f64) -> WaveContext {
        Self::from_frequency_hz(f * 1e6)
    }

    pub fn from_wavenumber(k: f64) -> WaveContext {
        assert!(k > 0.0, "wavenumber must be positive");
        WaveContext {
            wavenumber: k,
            frequency: k * SPEED_OF_LIGHT / (2.0 * std::f64::consts::PI),
        }
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavenumber
    }
}

/// g(x,y) = -(1/4π) e^{ikr}/r.
pub fn green_kernel(x: Vec3, y: Vec3, ctx: &WaveContext) -> C64 {
    let r = x.distance(y);
    assert!(r > 0.0, "green kernel at coincident points");
    let (s, c) = (ctx.wavenumber * r).sin_cos();
    C64::new(c, s) * (-0.25 / std::f64::consts::PI / r)
}

/// ∇ₓ g(x,y) = g(x,y) (ik - 1/r) (x-y)/r.
pub fn green_gradient(x: Vec3, y: Vec3, ctx: &WaveContext) -> [C64; 3] {
    let d = x - y;
    let r = d.norm();
    assert!(r > 0.0, "green kernel gradient at coincident points");
    let (s, c) = (ctx.wavenumber * r).sin_cos();
    let g = C64::new(c, s) * (-0.25 / std::f64::consts::PI / r);
    let coef = g * C64::new(-1.0 / r, ctx.wavenumber) * (1.0 / r);
    [coef * d.x, coef * d.y, coef * d.z]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    SingleLayerT,
    DoubleLayerKn,
    Mass,
}

/// Dense Galerkin matrix of a boundary operator on an RWG space.
#[derive(Debug, Clone)]
pub struct BoundaryOperatorMatrix {
    pub kind: OperatorKind,
    pub space: Arc<RwgSpace>,
    pub data: Array2<C64>,
}

// ---------------------------------------------------------------------------
// Pair engine
// ---------------------------------------------------------------------------

struct TriangleData {
    verts: [Vec3; 3],
    /// Vertex indices and coordinates in ascending index order. Quadrature
    /// nodes are generated from this ordering so that integrals are
    /// bit-identical regardless of the winding a shell stores.
    sorted_idx: [usize; 3],
    sorted_verts: [Vec3; 3],
    area: f64,
    normal: Vec3,
    centroid: Vec3,
    circumradius: f64,
    /// Precomputed regular-rule points (from the canonical ordering).
    points: Vec<Vec3>,
    /// (edge, sᵢℓᵢ/(2A)) per local free vertex; `None` when the vertex is
    /// not the free vertex of a dof on this triangle.
    dof_of_vertex: [Option<(usize, f64)>; 3],
}

struct PairAccumulator {
    m0: C64,
    mx: [C64; 3],
    my: [C64; 3],
    mxy: C64,
    d_ab: [[C64; 3]; 3],
    d_ba: [[C64; 3]; 3],
}

impl PairAccumulator {
    fn new() -> Self {
        let z = C64::new(0.0, 0.0);
        PairAccumulator {
            m0: z,
            mx: [z; 3],
            my: [z; 3],
            mxy: z,
            d_ab: [[z; 3]; 3],
            d_ba: [[z; 3]; 3],
        }
    }

    #[inline]
    fn add_node(
        &mut self,
        ta: &TriangleData,
        tb: &TriangleData,
        x: Vec3,
        y: Vec3,
        w: f64,
        k: f64,
        want_d: bool,
        same_triangle: bool,
    ) {
        let d = x - y;
        let r = d.norm();
        let (s, c) = (k * r).sin_cos();
        let g = C64::new(c, s) * (-0.25 / std::f64::consts::PI / r);
        let wg = g * w;
        self.m0 += wg;
        self.mx[0] += wg * x.x;
        self.mx[1] += wg * x.y;
        self.mx[2] += wg * x.z;
        self.my[0] += wg * y.x;
        self.my[1] += wg * y.y;
        self.my[2] += wg * y.z;
        self.mxy += wg * x.dot(y);
        if !want_d {
            return;
        }
        // ∇ₓg = coef·(x-y): a complex scalar times a real vector, so the
        // triple products below reduce to real dot products
        let coef = g * C64::new(-1.0 / r, k) * (1.0 / r);
        let wc = coef * w;
        let nb = tb.normal;
        let r_dot_nb = d.dot(nb);
        for j in 0..3 {
            let cj = y - tb.verts[j];
            let r_dot_cj = d.dot(cj);
            for i in 0..3 {
                let xp = x - ta.verts[i];
                let val = xp.dot(nb) * r_dot_cj - xp.dot(cj) * r_dot_nb;
                self.d_ab[i][j] += wc * val;
            }
        }
        if same_triangle {
            return;
        }
        // reverse block: ∇ₓg(y,x) = -coef·(x-y); test on b, trial on a
        let na = ta.normal;
        let r_dot_na = d.dot(na);
        for j in 0..3 {
            let cj = x - ta.verts[j];
            let r_dot_cj = d.dot(cj);
            for i in 0..3 {
                let yp = y - tb.verts[i];
                let val = yp.dot(na) * r_dot_cj - yp.dot(cj) * r_dot_na;
                self.d_ba[i][j] -= wc * val;
            }
        }
    }
}

struct AssemblyWant {
    t: bool,
    d: bool,
}

fn triangle_data(space: &RwgSpace, rule_points: &[(f64, f64, f64)]) -> Vec<TriangleData> {
    let shell = &space.shell;
    (0..shell.triangles.len())
        .map(|i| {
            let verts = shell.tri_coords(i);
            let area = crate::geom::triangle_area(verts);
            let mut dof_of_vertex = [None; 3];
            for dof in &space.tri_dofs[i] {
                let e = &space.edges[dof.edge];
                dof_of_vertex[dof.opp] = Some((dof.edge, dof.sign * e.length / (2.0 * area)));
            }
            let mut order = [0usize, 1, 2];
            order.sort_by_key(|&k| shell.triangles[i][k]);
            let sorted_idx = order.map(|k| shell.triangles[i][k]);
            let sorted_verts = order.map(|k| verts[k]);
            TriangleData {
                verts,
                sorted_idx,
                sorted_verts,
                area,
                normal: crate::geom::triangle_normal(verts),
                centroid: crate::geom::triangle_centroid(verts),
                circumradius: crate::geom::triangle_circumradius(verts),
                points: rule_points
                    .iter()
                    .map(|&(s, t, _)| crate::geom::triangle_point(sorted_verts, s, t))
                    .collect(),
                dof_of_vertex,
            }
        })
        .collect()
}

/// Assemble the requested operators in one sweep over unordered triangle
/// pairs. Kernel evaluations are shared between the single-layer moments
/// and both orientations of the double-layer block; the node sets of every
/// pair class are symmetric under argument swap, which supplies the
/// transposed contributions exactly.
fn assemble_pair_operators(
    space: &RwgSpace,
    ctx: &WaveContext,
    quad: &QuadratureRule,
    want: AssemblyWant,
) -> (Option<Array2<C64>>, Option<Array2<C64>>) {
    let n = space.dof_count();
    let k = ctx.wavenumber;
    let regular = triangle_rule(quad.regular_order);
    let near = triangle_rule(quad.near_order);
    let tris = triangle_data(space, &regular.points);
    let nt = tris.len();

    let mut t_mat = want.t.then(|| Array2::<C64>::zeros((n, n)));
    let mut d_mat = want.d.then(|| Array2::<C64>::zeros((n, n)));

    let inv_ik = C64::new(0.0, -1.0 / k); // 1/(ik)
    let k2 = k * k;

    for a in 0..nt {
        for b in a..nt {
            let mut acc = PairAccumulator::new();
            let (ta, tb) = (&tris[a], &tris[b]);
            let config = if a == b {
                PairConfig::Identical
            } else {
                classify_pair(ta.sorted_idx, tb.sorted_idx)
                    .expect("validated shell has no degenerate pairs")
            };
            match config {
                PairConfig::Separated => {
                    let dist = ta.centroid.distance(tb.centroid);
                    let rmax = ta.circumradius.max(tb.circumradius);
                    if dist < quad.near_threshold * rmax {
                        for &(sx, tx, wx) in &near.points {
                            let x = crate::geom::triangle_point(ta.sorted_verts, sx, tx);
                            for &(sy, ty, wy) in &near.points {
                                let y = crate::geom::triangle_point(tb.sorted_verts, sy, ty);
                                acc.add_node(
                                    ta,
                                    tb,
                                    x,
                                    y,
                                    ta.area * tb.area * wx * wy,
                                    k,
                                    want.d,
                                    false,
                                );
                            }
                        }
                    } else {
                        let wts = &regular.points;
                        for (ix, &x) in ta.points.iter().enumerate() {
                            let wx = wts[ix].2 * ta.area * tb.area;
                            for (iy, &y) in tb.points.iter().enumerate() {
                                acc.add_node(ta, tb, x, y, wx * wts[iy].2, k, want.d, false);
                            }
                        }
                    }
                }
                PairConfig::Identical => {
                    singular_nodes(
                        &config,
                        ta.sorted_verts,
                        ta.sorted_verts,
                        quad.singular_order,
                        |x, y, w| acc.add_node(ta, tb, x, y, w, k, want.d, true),
                    );
                }
                PairConfig::SharedEdge { perm_x, perm_y }
                | PairConfig::SharedVertex { perm_x, perm_y } => {
                    let vx = quadrature::apply_perm(ta.sorted_verts, perm_x);
                    let vy = quadrature::apply_perm(tb.sorted_verts, perm_y);
                    singular_nodes(&config, vx, vy, quad.singular_order, |x, y, w| {
                        acc.add_node(ta, tb, x, y, w, k, want.d, false)
                    });
                }
            }

            // scatter into the edge dofs
            for (ia, dof_a) in ta.dof_of_vertex.iter().enumerate() {
                let Some((ea, ca)) = *dof_a else { continue };
                for (ib, dof_b) in tb.dof_of_vertex.iter().enumerate() {
                    let Some((eb, cb)) = *dof_b else { continue };
                    let coef = ca * cb;
                    if let Some(t) = t_mat.as_mut() {
                        let pa = ta.verts[ia];
                        let qb = tb.verts[ib];
                        let v = acc.mxy
                            - (acc.mx[0] * qb.x + acc.mx[1] * qb.y + acc.mx[2] * qb.z)
                            - (acc.my[0] * pa.x + acc.my[1] * pa.y + acc.my[2] * pa.z)
                            + acc.m0 * pa.dot(qb);
                        let entry = inv_ik * (v * k2 - acc.m0 * 4.0) * coef;
                        t[[ea, eb]] += entry;
                        if a != b {
                            t[[eb, ea]] += entry;
                        }
                    }
                    if let Some(dm) = d_mat.as_mut() {
                        dm[[ea, eb]] += acc.d_ab[ia][ib] * coef;
                        if a != b {
                            dm[[eb, ea]] += acc.d_ba[ib][ia] * coef;
                        }
                    }
                }
            }
        }
    }

    (t_mat, d_mat)
}

/// Galerkin matrix of the single-layer operator T on the space.
pub fn assemble_t(
    space: &Arc<RwgSpace>,
    ctx: &WaveContext,
    quad: &QuadratureRule,
) -> BoundaryOperatorMatrix {
    let (t, _) = assemble_pair_operators(space, ctx, quad, AssemblyWant { t: true, d: false });
    BoundaryOperatorMatrix {
        kind: OperatorKind::SingleLayerT,
        space: Arc::clone(space),
        data: t.unwrap(),
    }
}

/// Single-layer matrix and principal-value double-layer block in one sweep.
pub fn assemble_t_and_d(
    space: &Arc<RwgSpace>,
    ctx: &WaveContext,
    quad: &QuadratureRule,
) -> (Array2<C64>, Array2<C64>) {
    let (t, d) = assemble_pair_operators(space, ctx, quad, AssemblyWant { t: true, d: true });
    (t.unwrap(), d.unwrap())
}

/// Principal-value double-layer block alone.
pub fn assemble_double_layer(
    space: &Arc<RwgSpace>,
    ctx: &WaveContext,
    quad: &QuadratureRule,
) -> Array2<C64> {
    let (_, d) = assemble_pair_operators(space, ctx, quad, AssemblyWant { t: false, d: true });
    d.unwrap()
}

/// Galerkin matrix of ½ Id + K n× (the admittance right-hand-side operator).
/// Requires a closed shell: the ½ Id term is the trace-jump contribution.
pub fn assemble_kn(
    space: &Arc<RwgSpace>,
    ctx: &WaveContext,
    quad: &QuadratureRule,
) -> BoundaryOperatorMatrix {
    let mut d = assemble_double_layer(space, ctx, quad);
    for (i, j, v) in mass_triplets(space) {
        d[[i, j]] += C64::new(0.5 * v, 0.0);
    }
    BoundaryOperatorMatrix {
        kind: OperatorKind::DoubleLayerKn,
        space: Arc::clone(space),
        data: d,
    }
}

fn mass_triplets(space: &RwgSpace) -> Vec<(usize, usize, f64)> {
    // the integrand θi·θj is quadratic; a degree-2 rule integrates exactly
    let rule = triangle_rule(3);
    let mut out = Vec::new();
    for (t, dofs) in space.tri_dofs.iter().enumerate() {
        if dofs.is_empty() {
            continue;
        }
        let verts = space.shell.tri_coords(t);
        let area = crate::geom::triangle_area(verts);
        for a in dofs {
            let ca = a.sign * space.edges[a.edge].length / (2.0 * area);
            let pa = verts[a.opp];
            for b in dofs {
                let cb = b.sign * space.edges[b.edge].length / (2.0 * area);
                let pb = verts[b.opp];
                let mut acc = 0.0;
                for &(s, tt, w) in &rule.points {
                    let x = crate::geom::triangle_point(verts, s, tt);
                    acc += w * (x - pa).dot(x - pb);
                }
                out.push((a.edge, b.edge, ca * cb * acc * area));
            }
        }
    }
    out
}

/// Dense real-SPD mass matrix ∫ θi·θj (stored complex for composition).
pub fn assemble_mass(space: &Arc<RwgSpace>) -> BoundaryOperatorMatrix {
    let n = space.dof_count();
    let mut data = Array2::<C64>::zeros((n, n));
    for (i, j, v) in mass_triplets(space) {
        data[[i, j]] += C64::new(v, 0.0);
    }
    BoundaryOperatorMatrix {
        kind: OperatorKind::Mass,
        space: Arc::clone(space),
        data,
    }
}

/// Sparse mass matrix for large shells.
pub fn assemble_mass_sparse(space: &RwgSpace) -> SparseRealMat {
    let mut triplets = mass_triplets(space);
    SparseRealMat::from_triplets(space.dof_count(), &mut triplets)
}

/// Single-layer matrix on the interface space (the preconditioner block).
/// The kernel is a convolution, so the result depends only on the interface
/// triangles, not on which shell the interface is viewed from.
pub fn assemble_t_sigma(
    maps: &InterfaceMaps,
    ctx: &WaveContext,
    quad: &QuadratureRule,
) -> BoundaryOperatorMatrix {
    assert!(maps.interface_dim() >= 1);
    assemble_t(&maps.sigma_space, ctx, quad)
}

/// Extract the interface block R [A] P of a shell operator matrix.
pub fn interface_block(
    maps: &InterfaceMaps,
    shell_matrix: &Array2<C64>,
    side: Side,
) -> Array2<C64> {
    let embed = match side {
        Side::Plus => &maps.embed_plus,
        Side::Minus => &maps.embed_minus,
    };
    let n = embed.len();
    Array2::from_shape_fn((n, n), |(i, j)| shell_matrix[[embed[i], embed[j]]])
}

// ---------------------------------------------------------------------------
// Binary matrix dump (cross-language regression format)
// ---------------------------------------------------------------------------

/// Write `n: u64` followed by n² (re, im) f64 pairs, row-major, little
/// endian.
pub fn dump_matrix(path: impl AsRef<std::path::Path>, m: &Array2<C64>) -> std::io::Result<()> {
    use std::io::Write;
    assert_eq!(m.nrows(), m.ncols());
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(&(m.nrows() as u64).to_le_bytes())?;
    for z in m.iter() {
        f.write_all(&z.re.to_le_bytes())?;
        f.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn load_matrix(path: impl AsRef<std::path::Path>) -> std::io::Result<Array2<C64>> {
    use std::io::Read;
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut b8 = [0u8; 8];
    f.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8) as usize;
    let mut data = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        f.read_exact(&mut b8)?;
        let re = f64::from_le_bytes(b8);
        f.read_exact(&mut b8)?;
        let im = f64::from_le_bytes(b8);
        data.push(C64::new(re, im));
    }
    Ok(Array2::from_shape_vec((n, n), data).expect("shape matches header"))
}
