//! Quadrature for Galerkin boundary-element integrals.
//!
//! Regular (well-separated) triangle pairs use a tensor product of symmetric
//! triangle Gauss rules. Pairs that touch — identical panels, a shared edge,
//! or a shared vertex — are integrated with relative-coordinate transforms
//! that remove the kernel singularity: the four-dimensional parameter domain
//! is decomposed into subregions on which a scaled substitution turns the
//! integrand into a smooth function of quadrature variables on `[0,1]⁴`.
//! Each transform is measure-exact (it is a reparameterization of the full
//! parameter domain), so it may also be applied to smooth integrands, which
//! is how the tests validate it.
//!
//! All node generators hand `(x, y, w)` triples to a closure, where `x` lies
//! on the test triangle and `y` on the trial triangle, and `w` contains the
//! full Jacobian including both surface measures.

use crate::geom::{triangle_circumradius, triangle_point, Vec3};

/// Integration parameters used by every assembly routine.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureRule {
    /// Points per triangle for well-separated pairs (symmetric rule).
    pub regular_order: usize,
    /// Scheme for touching pairs. Only one is implemented.
    pub singular_scheme: SingularScheme,
    /// 1D Gauss points per dimension of the transformed 4D integrals.
    pub singular_order: usize,
    /// Points per triangle for near (but not touching) pairs.
    pub near_order: usize,
    /// Pairs closer than `near_threshold × max circumradius` (centroid
    /// distance) use the near rule.
    pub near_threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularScheme {
    /// Relative-coordinate subdivision with radial scaling per subregion.
    RelativeCoordinates,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule {
            regular_order: 4,
            singular_scheme: SingularScheme::RelativeCoordinates,
            singular_order: 4,
            near_order: 12,
            near_threshold: 1.5,
        }
    }
}

impl QuadratureRule {
    pub fn with_orders(regular: usize, singular: usize) -> Self {
        assert!(regular >= 1 && singular >= 1, "orders must be >= 1");
        QuadratureRule {
            regular_order: regular,
            singular_order: singular,
            ..Default::default()
        }
    }
}

// ---------------------------------------------------------------------------
// Symmetric triangle rules
// ---------------------------------------------------------------------------

/// Quadrature rule on the reference triangle {s,t >= 0, s+t <= 1}.
/// Weights sum to 1; integrals scale as `area × Σ w f(point)`.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    /// (s, t, w) triples.
    pub points: Vec<(f64, f64, f64)>,
}

fn orbit1(pts: &mut Vec<(f64, f64, f64)>, w: f64) {
    pts.push((1.0 / 3.0, 1.0 / 3.0, w));
}

/// Orbit of (1-2a, a, a) in barycentric coordinates: three permutations.
fn orbit3(pts: &mut Vec<(f64, f64, f64)>, a: f64, w: f64) {
    let b = 1.0 - 2.0 * a;
    // barycentric (l0,l1,l2) maps to (s,t) = (l1,l2)
    pts.push((a, a, w));
    pts.push((b, a, w));
    pts.push((a, b, w));
}

/// Orbit of (a, b, c) with all six permutations.
fn orbit6(pts: &mut Vec<(f64, f64, f64)>, a: f64, b: f64, w: f64) {
    let c = 1.0 - a - b;
    for (l1, l2) in [(b, c), (c, b), (a, c), (c, a), (a, b), (b, a)] {
        pts.push((l1, l2, w));
    }
}

/// Symmetric rule with (at least) the requested number of points.
/// Available sizes: 1, 3, 4, 6, 7, 12, 13, 16.
pub fn triangle_rule(points: usize) -> TriangleRule {
    let mut p = Vec::new();
    match points {
        0 | 1 => orbit1(&mut p, 1.0),
        2 | 3 => orbit3(&mut p, 1.0 / 6.0, 1.0 / 3.0),
        4 => {
            // degree 3
            orbit1(&mut p, -27.0 / 48.0);
            orbit3(&mut p, 0.2, 25.0 / 48.0);
        }
        5 | 6 => {
            // degree 4 (Dunavant)
            orbit3(&mut p, 0.445_948_490_915_965, 0.223_381_589_678_011);
            orbit3(&mut p, 0.091_576_213_509_771, 0.109_951_743_655_322);
        }
        7 => {
            // degree 5
            orbit1(&mut p, 0.225);
            orbit3(&mut p, 0.470_142_064_105_115, 0.132_394_152_788_506);
            orbit3(&mut p, 0.101_286_507_323_456, 0.125_939_180_544_827);
        }
        8..=12 => {
            // degree 6, all weights positive
            orbit3(&mut p, 0.249_286_745_170_910, 0.116_786_275_726_379);
            orbit3(&mut p, 0.063_089_014_491_502, 0.050_844_906_370_207);
            orbit6(
                &mut p,
                0.053_145_049_844_816,
                0.310_352_451_033_785,
                0.082_851_075_618_374,
            );
        }
        13 => {
            // degree 7
            orbit1(&mut p, -0.149_570_044_467_670);
            orbit3(&mut p, 0.260_345_966_079_038, 0.175_615_257_433_204);
            orbit3(&mut p, 0.065_130_102_902_216, 0.053_347_235_608_839);
            orbit6(
                &mut p,
                0.048_690_315_425_316,
                0.312_865_496_004_875,
                0.077_113_760_890_257,
            );
        }
        _ => {
            // degree 8, all weights positive
            orbit1(&mut p, 0.144_315_607_677_787);
            orbit3(&mut p, 0.170_569_307_751_760, 0.103_217_370_534_718);
            orbit3(&mut p, 0.050_547_228_317_031, 0.032_458_497_623_198);
            orbit3(&mut p, 0.459_292_588_292_723, 0.095_091_634_267_285);
            orbit6(
                &mut p,
                0.008_394_777_409_958,
                0.263_112_829_634_638,
                0.027_230_314_174_435,
            );
        }
    }
    TriangleRule { points: p }
}

// ---------------------------------------------------------------------------
// 1D Gauss-Legendre on [0,1]
// ---------------------------------------------------------------------------

/// Gauss-Legendre nodes/weights on [0,1]; weights sum to 1.
pub fn gauss_legendre_01(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // initial guess (Chebyshev-like), then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((1.0 - x) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

// ---------------------------------------------------------------------------
// Pair classification
// ---------------------------------------------------------------------------

/// How a pair of triangles touches, with local permutations that bring the
/// shared simplex to the leading positions expected by the node generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairConfig {
    Identical,
    /// Shared edge first (same order in both permutations), free vertex last.
    SharedEdge { perm_x: [usize; 3], perm_y: [usize; 3] },
    /// Shared vertex first.
    SharedVertex { perm_x: [usize; 3], perm_y: [usize; 3] },
    Separated,
}

#[derive(Debug, thiserror::Error)]
pub enum QuadratureError {
    #[error("no integration scheme for triangles sharing {0} vertices without being identical")]
    DegeneratePair(usize),
}

/// Classify by shared global vertex indices. `x == y` must be passed as the
/// same index triple to be recognized as identical.
pub fn classify_pair(tx: [usize; 3], ty: [usize; 3]) -> Result<PairConfig, QuadratureError> {
    if tx == ty {
        return Ok(PairConfig::Identical);
    }
    let mut shared: Vec<(usize, usize)> = Vec::with_capacity(3);
    for (i, &a) in tx.iter().enumerate() {
        for (j, &b) in ty.iter().enumerate() {
            if a == b {
                shared.push((i, j));
            }
        }
    }
    match shared.len() {
        0 => Ok(PairConfig::Separated),
        1 => {
            let (i, j) = shared[0];
            Ok(PairConfig::SharedVertex {
                perm_x: rotate_to_front(i),
                perm_y: rotate_to_front(j),
            })
        }
        2 => {
            let (i0, j0) = shared[0];
            let (i1, j1) = shared[1];
            Ok(PairConfig::SharedEdge {
                perm_x: edge_first(i0, i1),
                perm_y: edge_first(j0, j1),
            })
        }
        _ => Err(QuadratureError::DegeneratePair(shared.len())),
    }
}

fn rotate_to_front(i: usize) -> [usize; 3] {
    [i, (i + 1) % 3, (i + 2) % 3]
}

fn edge_first(a: usize, b: usize) -> [usize; 3] {
    let free = 3 - a - b;
    [a, b, free]
}

pub fn apply_perm(v: [Vec3; 3], p: [usize; 3]) -> [Vec3; 3] {
    [v[p[0]], v[p[1]], v[p[2]]]
}

/// Centroid-distance near-pair test at the rule's threshold.
pub fn is_near(vx: [Vec3; 3], vy: [Vec3; 3], threshold: f64) -> bool {
    let cx = crate::geom::triangle_centroid(vx);
    let cy = crate::geom::triangle_centroid(vy);
    let r = triangle_circumradius(vx).max(triangle_circumradius(vy));
    cx.distance(cy) < threshold * r
}

// ---------------------------------------------------------------------------
// Node generation
// ---------------------------------------------------------------------------

/// Tensor rule for separated pairs. Weight includes both triangle areas.
pub fn regular_nodes(
    vx: [Vec3; 3],
    vy: [Vec3; 3],
    rule: &TriangleRule,
    mut f: impl FnMut(Vec3, Vec3, f64),
) {
    let ax = crate::geom::triangle_area(vx);
    let ay = crate::geom::triangle_area(vy);
    for &(sx, tx, wx) in &rule.points {
        let x = triangle_point(vx, sx, tx);
        for &(sy, ty, wy) in &rule.points {
            let y = triangle_point(vy, sy, ty);
            f(x, y, ax * ay * wx * wy);
        }
    }
}

/// Singular nodes for a touching pair. Triangles must already be permuted
/// per [`classify_pair`]: shared edge = vertices 0,1 of both, shared vertex
/// = vertex 0 of both. Weights include both surface measures.
pub fn singular_nodes(
    config: &PairConfig,
    vx: [Vec3; 3],
    vy: [Vec3; 3],
    order: usize,
    mut f: impl FnMut(Vec3, Vec3, f64),
) {
    let g = gauss_legendre_01(order);
    let jac = 4.0 * crate::geom::triangle_area(vx) * crate::geom::triangle_area(vy);
    match config {
        PairConfig::Identical => identical_nodes(vx, &g, jac, &mut f),
        PairConfig::SharedEdge { .. } => shared_edge_nodes(vx, vy, &g, jac, &mut f),
        PairConfig::SharedVertex { .. } => shared_vertex_nodes(vx, vy, &g, jac, &mut f),
        PairConfig::Separated => panic!("singular_nodes called for a separated pair"),
    }
}

/// Identical panels. Relative coordinate z = v - u splits the difference
/// hexagon into six sectors; in each, z = ρ·((1-τ)w₁ + τw₂) and the section
/// of admissible u is a corner simplex of size exactly (1-ρ).
fn identical_nodes(
    v: [Vec3; 3],
    g: &[(f64, f64)],
    jac: f64,
    f: &mut impl FnMut(Vec3, Vec3, f64),
) {
    const SECTORS: [[(f64, f64); 2]; 6] = [
        [(1.0, 0.0), (0.0, 1.0)],
        [(-1.0, 0.0), (0.0, -1.0)],
        [(1.0, 0.0), (1.0, -1.0)],
        [(1.0, -1.0), (0.0, -1.0)],
        [(0.0, 1.0), (-1.0, 1.0)],
        [(-1.0, 1.0), (-1.0, 0.0)],
    ];
    for sector in SECTORS {
        for &(rho, wr) in g {
            for &(tau, wt) in g {
                let z1 = rho * ((1.0 - tau) * sector[0].0 + tau * sector[1].0);
                let z2 = rho * ((1.0 - tau) * sector[0].1 + tau * sector[1].1);
                let c1 = (-z1).max(0.0);
                let c2 = (-z2).max(0.0);
                let h = 1.0 - rho;
                for &(lam, wl) in g {
                    for &(nu, wn) in g {
                        let u1 = c1 + h * lam * (1.0 - nu);
                        let u2 = c2 + h * lam * nu;
                        let w = jac * wr * wt * wl * wn * rho * h * h * lam;
                        let x = triangle_point(v, u1, u2);
                        let y = triangle_point(v, u1 + z1, u2 + z2);
                        f(x, y, w);
                    }
                }
            }
        }
    }
}

/// Shared edge: both parameterizations put the common edge on the first
/// coordinate axis. After anchoring the edge coordinate and rescaling the
/// three vanishing coordinates by the slack σ = 1-α, the scaled domain is
/// radially decomposed from its singular corner (two faces per ordering of
/// the edge parameters, hence four terms).
fn shared_edge_nodes(
    vx: [Vec3; 3],
    vy: [Vec3; 3],
    g: &[(f64, f64)],
    jac: f64,
    f: &mut impl FnMut(Vec3, Vec3, f64),
) {
    for &(alpha, wa) in g {
        let sig = 1.0 - alpha;
        for &(rho, wr) in g {
            let sr = sig * rho;
            let base = jac * wa * wr * sig * sig * sig * rho * rho;
            for &(p, wp) in g {
                for &(q, wq) in g {
                    // term A1: x anchored, gauge face βx = 1; (δ,βy) ∈ Δ
                    let (d, by) = (p * (1.0 - q), p * q);
                    let x = triangle_point(vx, alpha, sr);
                    let y = triangle_point(vy, alpha + sr * d, sr * by);
                    f(x, y, base * wp * wq * p);
                    // term B1: roles swapped
                    let x2 = triangle_point(vx, alpha + sr * d, sr * by);
                    let y2 = triangle_point(vy, alpha, sr);
                    f(x2, y2, base * wp * wq * p);
                    // term A2: gauge face δ + βy = 1
                    let x3 = triangle_point(vx, alpha, sr * q);
                    let y3 = triangle_point(vy, alpha + sr * (1.0 - p), sr * p);
                    f(x3, y3, base * wp * wq);
                    // term B2
                    let x4 = triangle_point(vx, alpha + sr * (1.0 - p), sr * p);
                    let y4 = triangle_point(vy, alpha, sr * q);
                    f(x4, y4, base * wp * wq);
                }
            }
        }
    }
}

/// Shared vertex: the four parameters vanish jointly at the common corner;
/// scale by the larger simplex norm (two symmetric terms).
fn shared_vertex_nodes(
    vx: [Vec3; 3],
    vy: [Vec3; 3],
    g: &[(f64, f64)],
    jac: f64,
    f: &mut impl FnMut(Vec3, Vec3, f64),
) {
    for &(rho, wr) in g {
        let r3 = rho * rho * rho;
        for &(a, wa) in g {
            for &(b, wb) in g {
                for &(c, wc) in g {
                    let w = jac * wr * wa * wb * wc * r3 * b;
                    let u = (rho * (1.0 - a), rho * a);
                    let v = (rho * b * (1.0 - c), rho * b * c);
                    let x1 = triangle_point(vx, u.0, u.1);
                    let y1 = triangle_point(vy, v.0, v.1);
                    f(x1, y1, w);
                    let x2 = triangle_point(vx, v.0, v.1);
                    let y2 = triangle_point(vy, u.0, u.1);
                    f(x2, y2, w);
                }
            }
        }
    }
}
