//! Tagged surface meshes, subdomain shells and RWG spaces.
//!
//! A [`SurfaceMesh`] is a triangle soup in which every triangle carries a
//! region tag: `GDP`/`GDM` for metal walls seen from the outer/cavity side
//! and `SIG` for the fictitious interface. The outer shell consists of the
//! `GDP` and `SIG` triangles, the cavity shell of the `GDM` and `SIG`
//! triangles; each must be a closed, consistently oriented surface. Thin
//! metal walls are represented by coincident `GDP`/`GDM` triangle pairs with
//! opposite windings.
//!
//! Interface triangles are stored once, wound so that the right-hand-rule
//! normal points into the outer subdomain. The cavity shell views them with
//! reversed winding; the flip is applied when the shell is extracted, never
//! by duplicating interface geometry.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::geom::{triangle_area, triangle_centroid, triangle_normal, vec3, Vec3};

pub const MIN_TRIANGLE_AREA: f64 = 1e-14;

/// Per-triangle region tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Metal wall on the boundary of the outer subdomain.
    GdPlus,
    /// Metal wall on the boundary of the cavity subdomain.
    GdMinus,
    /// Fictitious interface, shared by both shells.
    Sigma,
}

impl Region {
    pub fn tag(self) -> &'static str {
        match self {
            Region::GdPlus => "GDP",
            Region::GdMinus => "GDM",
            Region::Sigma => "SIG",
        }
    }

    pub fn from_tag(s: &str) -> Option<Region> {
        match s {
            "GDP" => Some(Region::GdPlus),
            "GDM" => Some(Region::GdMinus),
            "SIG" => Some(Region::Sigma),
            _ => None,
        }
    }
}

/// Which subdomain shell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("io error reading mesh: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown region tag '{tag}' at line {line}")]
    UnknownTag { line: usize, tag: String },
    #[error("vertex index {index} out of range at line {line}")]
    IndexOutOfRange { line: usize, index: usize },
    #[error("degenerate triangle {index} (area {area:.3e} m^2)")]
    DegenerateTriangle { index: usize, area: f64 },
    #[error("{side} shell not closed: edge ({v0},{v1}) belongs to {count} triangles")]
    ShellNotClosed { side: Side, v0: usize, v1: usize, count: usize },
    #[error("{side} shell has inconsistent orientation across edge ({v0},{v1})")]
    InconsistentOrientation { side: Side, v0: usize, v1: usize },
    #[error("{side} shell encloses volume of unexpected sign ({volume:.3e} m^3)")]
    WrongVolumeSign { side: Side, volume: f64 },
    #[error("interface has no interior edges (N = 0)")]
    EmptyInterface,
    #[error("open surface has no interior edges")]
    NoInteriorEdges,
    #[error("resolution too coarse to mesh a face ({count} < 2 elements across)")]
    ResolutionTooCoarse { count: usize },
}

/// Tagged triangulation. Validated on construction via [`SurfaceMesh::new`]
/// or [`SurfaceMesh::load`].
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub vertices: Arc<Vec<Vec3>>,
    pub triangles: Vec<[usize; 3]>,
    pub regions: Vec<Region>,
}

impl SurfaceMesh {
    pub fn new(
        vertices: Vec<Vec3>,
        triangles: Vec<[usize; 3]>,
        regions: Vec<Region>,
    ) -> Result<SurfaceMesh, MeshError> {
        assert_eq!(triangles.len(), regions.len());
        let mesh = SurfaceMesh {
            vertices: Arc::new(vertices),
            triangles,
            regions,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Line-oriented ASCII format:
    /// ```text
    /// ddm-mesh 1
    /// vertices <V>
    /// x y z            (V lines)
    /// triangles <F>
    /// i j k TAG        (F lines, 0-based, TAG in {GDP, GDM, SIG})
    /// ```
    /// `#` starts a comment.
    pub fn load(path: impl AsRef<Path>) -> Result<SurfaceMesh, MeshError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<SurfaceMesh, MeshError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let perr = |line: usize, msg: &str| MeshError::Parse {
            line,
            msg: msg.to_string(),
        };

        let (line, header) = lines.next().ok_or_else(|| perr(0, "empty file"))?;
        if header != "ddm-mesh 1" {
            return Err(perr(line, "expected header 'ddm-mesh 1'"));
        }

        let (line, vhead) = lines.next().ok_or_else(|| perr(0, "missing vertex count"))?;
        let vcount: usize = vhead
            .strip_prefix("vertices ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| perr(line, "expected 'vertices <V>'"))?;
        let mut vertices = Vec::with_capacity(vcount);
        for _ in 0..vcount {
            let (line, l) = lines.next().ok_or_else(|| perr(0, "truncated vertex list"))?;
            let mut it = l.split_whitespace().map(|t| t.parse::<f64>());
            let mut next = || -> Result<f64, MeshError> {
                it.next()
                    .and_then(|r| r.ok())
                    .ok_or_else(|| perr(line, "expected 'x y z'"))
            };
            vertices.push(vec3(next()?, next()?, next()?));
        }

        let (line, thead) = lines.next().ok_or_else(|| perr(0, "missing triangle count"))?;
        let tcount: usize = thead
            .strip_prefix("triangles ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| perr(line, "expected 'triangles <F>'"))?;
        let mut triangles = Vec::with_capacity(tcount);
        let mut regions = Vec::with_capacity(tcount);
        for _ in 0..tcount {
            let (line, l) = lines.next().ok_or_else(|| perr(0, "truncated triangle list"))?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 4 {
                return Err(perr(line, "expected 'i j k TAG'"));
            }
            let mut tri = [0usize; 3];
            for (slot, tok) in tri.iter_mut().zip(&toks[..3]) {
                *slot = tok
                    .parse()
                    .map_err(|_| perr(line, "triangle indices must be integers"))?;
                if *slot >= vertices.len() {
                    return Err(MeshError::IndexOutOfRange { line, index: *slot });
                }
            }
            let region = Region::from_tag(toks[3]).ok_or_else(|| MeshError::UnknownTag {
                line,
                tag: toks[3].to_string(),
            })?;
            triangles.push(tri);
            regions.push(region);
        }

        SurfaceMesh::new(vertices, triangles, regions)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        use std::io::Write;
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "ddm-mesh 1")?;
        writeln!(f, "vertices {}", self.vertices.len())?;
        for v in self.vertices.iter() {
            writeln!(f, "{:.17e} {:.17e} {:.17e}", v.x, v.y, v.z)?;
        }
        writeln!(f, "triangles {}", self.triangles.len())?;
        for (t, r) in self.triangles.iter().zip(&self.regions) {
            writeln!(f, "{} {} {} {}", t[0], t[1], t[2], r.tag())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        for (i, t) in self.triangles.iter().enumerate() {
            let area = triangle_area(self.tri_coords_raw(*t));
            if area <= MIN_TRIANGLE_AREA {
                return Err(MeshError::DegenerateTriangle { index: i, area });
            }
        }
        for side in [Side::Plus, Side::Minus] {
            let shell = self.shell(side);
            shell.validate_closed(side)?;
            let vol = shell.signed_volume();
            // normals point into the subdomain: away from the enclosed
            // region for the outer shell, into it for the cavity shell
            let ok = match side {
                Side::Plus => vol > 0.0,
                Side::Minus => vol < 0.0,
            };
            if !ok {
                return Err(MeshError::WrongVolumeSign { side, volume: vol });
            }
        }
        Ok(())
    }

    fn tri_coords_raw(&self, t: [usize; 3]) -> [Vec3; 3] {
        [
            self.vertices[t[0]],
            self.vertices[t[1]],
            self.vertices[t[2]],
        ]
    }

    /// Extract a subdomain shell with effective winding. Interface triangles
    /// are reversed for the cavity side so that every shell triangle's
    /// right-hand normal points into its subdomain.
    pub fn shell(&self, side: Side) -> ShellMesh {
        let mut triangles = Vec::new();
        let mut source = Vec::new();
        for (i, (&t, &r)) in self.triangles.iter().zip(&self.regions).enumerate() {
            let keep = match (side, r) {
                (_, Region::Sigma) => true,
                (Side::Plus, Region::GdPlus) => true,
                (Side::Minus, Region::GdMinus) => true,
                _ => false,
            };
            if !keep {
                continue;
            }
            let flip = side == Side::Minus && r == Region::Sigma;
            triangles.push(if flip { [t[0], t[2], t[1]] } else { t });
            source.push(i);
        }
        ShellMesh {
            vertices: Arc::clone(&self.vertices),
            triangles,
            source,
        }
    }

    /// Shell made of the triangles whose region passes the predicate, as
    /// stored (no winding flip). Used for monolithic reference solves.
    pub fn sub_shell(&self, pred: impl Fn(Region) -> bool) -> ShellMesh {
        let mut triangles = Vec::new();
        let mut source = Vec::new();
        for (i, (&t, &r)) in self.triangles.iter().zip(&self.regions).enumerate() {
            if pred(r) {
                triangles.push(t);
                source.push(i);
            }
        }
        ShellMesh {
            vertices: Arc::clone(&self.vertices),
            triangles,
            source,
        }
    }
}

/// One subdomain boundary (or an open screen for reference solves) with the
/// winding that makes right-hand normals point into its domain.
#[derive(Debug, Clone)]
pub struct ShellMesh {
    pub vertices: Arc<Vec<Vec3>>,
    pub triangles: Vec<[usize; 3]>,
    /// Index of each shell triangle in the originating mesh.
    pub source: Vec<usize>,
}

impl ShellMesh {
    pub fn tri_coords(&self, i: usize) -> [Vec3; 3] {
        let t = self.triangles[i];
        [
            self.vertices[t[0]],
            self.vertices[t[1]],
            self.vertices[t[2]],
        ]
    }

    pub fn normal(&self, i: usize) -> Vec3 {
        triangle_normal(self.tri_coords(i))
    }

    pub fn area(&self, i: usize) -> f64 {
        triangle_area(self.tri_coords(i))
    }

    /// Map (min vertex, max vertex) -> adjacent shell triangles.
    fn edge_map(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                map.entry((a.min(b), a.max(b))).or_default().push(i);
            }
        }
        map
    }

    pub fn validate_closed(&self, side: Side) -> Result<(), MeshError> {
        for ((v0, v1), tris) in self.edge_map() {
            if tris.len() != 2 {
                return Err(MeshError::ShellNotClosed {
                    side,
                    v0,
                    v1,
                    count: tris.len(),
                });
            }
            // consistent orientation: the edge is traversed once each way
            let dir = |i: usize| {
                let t = self.triangles[i];
                (0..3).any(|k| t[k] == v0 && t[(k + 1) % 3] == v1)
            };
            if dir(tris[0]) == dir(tris[1]) {
                return Err(MeshError::InconsistentOrientation { side, v0, v1 });
            }
        }
        Ok(())
    }

    /// V - E + F for the referenced vertices.
    pub fn euler_characteristic(&self) -> i64 {
        let mut verts = std::collections::BTreeSet::new();
        for t in &self.triangles {
            verts.extend(t.iter().copied());
        }
        let e = self.edge_map().len() as i64;
        verts.len() as i64 - e + self.triangles.len() as i64
    }

    /// Signed enclosed volume by the divergence theorem; positive when the
    /// winding normals point away from the enclosed region.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = [
                    self.vertices[t[0]],
                    self.vertices[t[1]],
                    self.vertices[t[2]],
                ];
                a.cross(b).dot(c) / 6.0
            })
            .sum()
    }
}

// ---------------------------------------------------------------------------
// RWG spaces
// ---------------------------------------------------------------------------

/// One div-conforming edge element: the basis function is
/// `±ℓ/(2A±) (x - p±)` on its two triangles, with constant surface
/// divergence `±ℓ/A±`.
#[derive(Debug, Clone, Copy)]
pub struct RwgEdge {
    /// Vertex indices, ascending.
    pub verts: (usize, usize),
    /// Shell-local plus/minus triangle indices.
    pub tri: [usize; 2],
    /// Local index (0..3) of the free vertex within each triangle.
    pub opp: [usize; 2],
    /// Edge length in meters.
    pub length: f64,
}

/// Role of a triangle for one of its basis functions.
#[derive(Debug, Clone, Copy)]
pub struct TriangleDof {
    pub edge: usize,
    /// +1 when the triangle is the plus triangle of the edge.
    pub sign: f64,
    /// Local index of the free vertex.
    pub opp: usize,
}

/// Lowest-order Rao-Wilton-Glisson space on a shell. Basis functions are
/// carried by the interior edges, ordered by ascending vertex pair.
#[derive(Debug, Clone)]
pub struct RwgSpace {
    pub shell: Arc<ShellMesh>,
    pub edges: Vec<RwgEdge>,
    /// Per-triangle list of the basis functions supported on it.
    pub tri_dofs: Vec<Vec<TriangleDof>>,
}

impl RwgSpace {
    /// Build on all interior edges (edges with exactly two adjacent
    /// triangles). The plus triangle of an edge is the adjacent triangle
    /// with the smaller source index, which makes the choice independent of
    /// winding and consistent between shells that share triangles.
    pub fn build(shell: Arc<ShellMesh>) -> Result<RwgSpace, MeshError> {
        let mut edges = Vec::new();
        for ((v0, v1), tris) in shell.edge_map() {
            if tris.len() != 2 {
                continue;
            }
            let (mut tp, mut tm) = (tris[0], tris[1]);
            if shell.source[tp] > shell.source[tm] {
                std::mem::swap(&mut tp, &mut tm);
            }
            let opp_of = |ti: usize| {
                let t = shell.triangles[ti];
                (0..3)
                    .find(|&k| t[k] != v0 && t[k] != v1)
                    .expect("edge vertices span the triangle")
            };
            edges.push(RwgEdge {
                verts: (v0, v1),
                tri: [tp, tm],
                opp: [opp_of(tp), opp_of(tm)],
                length: shell.vertices[v0].distance(shell.vertices[v1]),
            });
        }
        if edges.is_empty() {
            return Err(MeshError::NoInteriorEdges);
        }
        let mut tri_dofs = vec![Vec::new(); shell.triangles.len()];
        for (e, edge) in edges.iter().enumerate() {
            for (slot, sign) in [(0usize, 1.0), (1, -1.0)] {
                tri_dofs[edge.tri[slot]].push(TriangleDof {
                    edge: e,
                    sign,
                    opp: edge.opp[slot],
                });
            }
        }
        Ok(RwgSpace {
            shell,
            edges,
            tri_dofs,
        })
    }

    pub fn dof_count(&self) -> usize {
        self.edges.len()
    }

    /// Evaluate the interpolated tangential field Σ cᵢ θᵢ at a point of
    /// triangle `tri` (the point must lie on that triangle).
    pub fn eval(&self, coeffs: &[crate::C64], tri: usize, x: Vec3) -> [crate::C64; 3] {
        let verts = self.shell.tri_coords(tri);
        let area = triangle_area(verts);
        let mut out = [crate::C64::new(0.0, 0.0); 3];
        for dof in &self.tri_dofs[tri] {
            let e = &self.edges[dof.edge];
            let scale = dof.sign * e.length / (2.0 * area);
            let p = verts[dof.opp];
            let c = coeffs[dof.edge] * scale;
            out[0] += c * (x.x - p.x);
            out[1] += c * (x.y - p.y);
            out[2] += c * (x.z - p.z);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Interface maps
// ---------------------------------------------------------------------------

/// The interface space X together with the shell spaces X± and the
/// embeddings that realize extension-by-zero / restriction.
#[derive(Debug, Clone)]
pub struct InterfaceMaps {
    pub sigma_space: Arc<RwgSpace>,
    pub plus_space: Arc<RwgSpace>,
    pub minus_space: Arc<RwgSpace>,
    /// For interface dof i, its index in the plus / minus shell space.
    pub embed_plus: Vec<usize>,
    pub embed_minus: Vec<usize>,
}

/// Build the interface and shell spaces of a partitioned mesh.
///
/// The interface space contains exactly the edges whose two adjacent
/// triangles are both tagged `SIG`; edges on the interface rim belong to the
/// shell spaces only.
pub fn build_spaces(mesh: &SurfaceMesh) -> Result<InterfaceMaps, MeshError> {
    let sigma_shell = Arc::new(mesh.sub_shell(|r| r == Region::Sigma));
    let sigma_space = RwgSpace::build(Arc::clone(&sigma_shell)).map_err(|e| match e {
        MeshError::NoInteriorEdges => MeshError::EmptyInterface,
        other => other,
    })?;
    let plus_space = RwgSpace::build(Arc::new(mesh.shell(Side::Plus)))?;
    let minus_space = RwgSpace::build(Arc::new(mesh.shell(Side::Minus)))?;

    let index_of = |space: &RwgSpace| -> BTreeMap<(usize, usize), usize> {
        space
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.verts, i))
            .collect()
    };
    let plus_idx = index_of(&plus_space);
    let minus_idx = index_of(&minus_space);

    let mut embed_plus = Vec::with_capacity(sigma_space.edges.len());
    let mut embed_minus = Vec::with_capacity(sigma_space.edges.len());
    for e in &sigma_space.edges {
        embed_plus.push(plus_idx[&e.verts]);
        embed_minus.push(minus_idx[&e.verts]);
    }

    Ok(InterfaceMaps {
        sigma_space: Arc::new(sigma_space),
        plus_space: Arc::new(plus_space),
        minus_space: Arc::new(minus_space),
        embed_plus,
        embed_minus,
    })
}

impl InterfaceMaps {
    pub fn interface_dim(&self) -> usize {
        self.sigma_space.dof_count()
    }

    pub fn shell_space(&self, side: Side) -> &Arc<RwgSpace> {
        match side {
            Side::Plus => &self.plus_space,
            Side::Minus => &self.minus_space,
        }
    }

    fn embedding(&self, side: Side) -> &[usize] {
        match side {
            Side::Plus => &self.embed_plus,
            Side::Minus => &self.embed_minus,
        }
    }

    /// Extension by zero: interface coefficients into shell coefficients.
    pub fn extend(&self, coeffs: &[crate::C64], side: Side) -> Vec<crate::C64> {
        assert_eq!(coeffs.len(), self.interface_dim(), "length mismatch");
        let mut out = vec![crate::C64::new(0.0, 0.0); self.shell_space(side).dof_count()];
        for (i, &j) in self.embedding(side).iter().enumerate() {
            out[j] = coeffs[i];
        }
        out
    }

    /// Restriction to the interface entries.
    pub fn restrict(&self, coeffs: &[crate::C64], side: Side) -> Vec<crate::C64> {
        assert_eq!(
            coeffs.len(),
            self.shell_space(side).dof_count(),
            "length mismatch"
        );
        self.embedding(side).iter().map(|&j| coeffs[j]).collect()
    }
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

fn latitude_deg(p: Vec3) -> f64 {
    (p.z / p.norm()).asin().to_degrees()
}

/// Emit metal triangles as coincident outer/cavity pairs and interface
/// triangles once. `tris` must be wound with outward normals.
fn tag_and_duplicate(
    vertices: Vec<Vec3>,
    tris: Vec<[usize; 3]>,
    is_sigma: impl Fn(&[Vec3], [usize; 3]) -> bool,
) -> SurfaceMesh {
    let mut triangles = Vec::new();
    let mut regions = Vec::new();
    let mut metal = Vec::new();
    for t in tris {
        if is_sigma(&vertices, t) {
            triangles.push(t);
            regions.push(Region::Sigma);
        } else {
            metal.push(t);
        }
    }
    for &t in &metal {
        triangles.push(t);
        regions.push(Region::GdPlus);
    }
    for &t in &metal {
        triangles.push([t[0], t[2], t[1]]);
        regions.push(Region::GdMinus);
    }
    SurfaceMesh {
        vertices: Arc::new(vertices),
        triangles,
        regions,
    }
}

/// Icosphere: `refinement` quadrisections of the icosahedron, projected to
/// the radius. With `cap_latitude_deg`, triangles whose centroid latitude
/// exceeds it become the interface and the rest form the (thin) metal
/// sphere; otherwise the whole sphere is the interface.
pub fn generate_sphere(
    radius: f64,
    refinement: usize,
    cap_latitude_deg: Option<f64>,
) -> Result<SurfaceMesh, MeshError> {
    assert!(radius > 0.0, "radius must be positive");
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vec3> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| vec3(x, y, z).normalized() * radius)
    .collect();
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..refinement {
        let mut midpoints: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        for t in &tris {
            let mut mid = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mid[k] = *midpoints.entry(key).or_insert_with(|| {
                    let m = (vertices[a] + vertices[b]) * 0.5;
                    vertices.push(m.normalized() * radius);
                    vertices.len() - 1
                });
            }
            next.push([t[0], mid[0], mid[2]]);
            next.push([t[1], mid[1], mid[0]]);
            next.push([t[2], mid[2], mid[1]]);
            next.push([mid[0], mid[1], mid[2]]);
        }
        tris = next;
    }
    let mesh = match cap_latitude_deg {
        None => tag_and_duplicate(vertices, tris, |_, _| true),
        Some(lat) => tag_and_duplicate(vertices, tris, |verts, t| {
            latitude_deg(triangle_centroid([verts[t[0]], verts[t[1]], verts[t[2]]])) > lat
        }),
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Latitude-longitude sphere with `n_phi` longitude sectors and `n_bands`
/// latitude bands between the poles, wound outward. This family matches the
/// DoF counts of the reference experiments exactly: the closed sphere has
/// `3·n_phi·(n_bands-1)` edges, e.g. (8,8) -> 168, (32,33) -> 3072,
/// (72,25) -> 5184.
///
/// When a cap latitude is given, the grid poles are placed on the ±y axis
/// so that the interface cap (around +z) is covered by the quasi-uniform
/// mid-band cells instead of the polar fans; the interface mass matrix
/// stays well conditioned that way.
pub fn generate_sphere_uv(
    radius: f64,
    n_phi: usize,
    n_bands: usize,
    cap_latitude_deg: Option<f64>,
) -> Result<SurfaceMesh, MeshError> {
    assert!(radius > 0.0 && n_phi >= 3 && n_bands >= 2);
    // rotation x -> x, z -> y, y -> -z when the cap is in play
    let orient = |p: Vec3| -> Vec3 {
        if cap_latitude_deg.is_some() {
            vec3(p.x, p.z, -p.y)
        } else {
            p
        }
    };
    let mut vertices = vec![orient(vec3(0.0, 0.0, radius))];
    for i in 1..n_bands {
        let theta = std::f64::consts::PI * i as f64 / n_bands as f64;
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            vertices.push(orient(vec3(
                radius * theta.sin() * phi.cos(),
                radius * theta.sin() * phi.sin(),
                radius * theta.cos(),
            )));
        }
    }
    vertices.push(orient(vec3(0.0, 0.0, -radius)));
    let south = vertices.len() - 1;
    let ring = |i: usize, j: usize| 1 + (i - 1) * n_phi + (j % n_phi);

    let mut tris = Vec::new();
    for j in 0..n_phi {
        // outward winding seen from outside: counterclockwise from +z
        tris.push([0, ring(1, j), ring(1, j + 1)]);
    }
    for i in 1..(n_bands - 1) {
        for j in 0..n_phi {
            let (a, b) = (ring(i, j), ring(i, j + 1));
            let (c, d) = (ring(i + 1, j), ring(i + 1, j + 1));
            // alternate the quad diagonal for a symmetric pattern
            if (i + j) % 2 == 0 {
                tris.push([a, c, d]);
                tris.push([a, d, b]);
            } else {
                tris.push([a, c, b]);
                tris.push([c, d, b]);
            }
        }
    }
    for j in 0..n_phi {
        tris.push([south, ring(n_bands - 1, j + 1), ring(n_bands - 1, j)]);
    }

    let mesh = match cap_latitude_deg {
        None => tag_and_duplicate(vertices, tris, |_, _| true),
        Some(lat) => tag_and_duplicate(vertices, tris, |verts, t| {
            latitude_deg(triangle_centroid([verts[t[0]], verts[t[1]], verts[t[2]]])) > lat
        }),
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Axis and side of the open face of the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpenFace {
    /// 0 = x, 1 = y, 2 = z.
    pub axis: usize,
    /// Opening on the positive-coordinate side of the axis?
    pub positive: bool,
}

impl OpenFace {
    pub fn parse(s: &str) -> Option<OpenFace> {
        let (sign, ax) = s.split_at(1);
        let axis = match ax {
            "x" => 0,
            "y" => 1,
            "z" => 2,
            _ => return None,
        };
        match sign {
            "+" => Some(OpenFace { axis, positive: true }),
            "-" => Some(OpenFace { axis, positive: false }),
            _ => None,
        }
    }
}

/// Open parallelepiped: five thin metal faces plus a flat rectangular
/// interface across the opening. `resolution` is the target edge length;
/// every face direction gets at least two elements.
pub fn generate_open_box(
    dimensions: [f64; 3],
    open_face: OpenFace,
    resolution: f64,
) -> Result<SurfaceMesh, MeshError> {
    assert!(dimensions.iter().all(|&d| d > 0.0) && resolution > 0.0);
    let divisions: Vec<usize> = dimensions
        .iter()
        .map(|&d| (d / resolution).round().max(1.0) as usize)
        .collect();
    if let Some(&n) = divisions.iter().find(|&&n| n < 2) {
        return Err(MeshError::ResolutionTooCoarse { count: n });
    }

    // vertex grid over the box surface, deduplicated by integer key
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut lookup: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    let mut vertex = |ix: usize, iy: usize, iz: usize| -> usize {
        *lookup.entry((ix, iy, iz)).or_insert_with(|| {
            vertices.push(vec3(
                dimensions[0] * ix as f64 / divisions[0] as f64,
                dimensions[1] * iy as f64 / divisions[1] as f64,
                dimensions[2] * iz as f64 / divisions[2] as f64,
            ));
            vertices.len() - 1
        })
    };

    let mut tris: Vec<[usize; 3]> = Vec::new();
    let mut sigma_flags: Vec<bool> = Vec::new();
    // each face: fixed axis at 0 or max, u/v axes vary
    for axis in 0..3 {
        let (ua, va) = ([1, 2, 0][axis], [2, 0, 1][axis]);
        for positive in [false, true] {
            let fixed = if positive { divisions[axis] } else { 0 };
            let is_open = axis == open_face.axis && positive == open_face.positive;
            for iu in 0..divisions[ua] {
                for iv in 0..divisions[va] {
                    let mut at = |du: usize, dv: usize| {
                        let mut idx = [0usize; 3];
                        idx[axis] = fixed;
                        idx[ua] = iu + du;
                        idx[va] = iv + dv;
                        vertex(idx[0], idx[1], idx[2])
                    };
                    let (p00, p10, p01, p11) = (at(0, 0), at(1, 0), at(0, 1), at(1, 1));
                    // wind both triangles so the normal points outward;
                    // alternate the diagonal by cell parity for a symmetric
                    // pattern
                    let flip_diag = (iu + iv) % 2 == 1;
                    let quads = match (positive, flip_diag) {
                        (true, false) => [[p00, p10, p11], [p00, p11, p01]],
                        (true, true) => [[p00, p10, p01], [p10, p11, p01]],
                        (false, false) => [[p00, p11, p10], [p00, p01, p11]],
                        (false, true) => [[p00, p01, p10], [p10, p01, p11]],
                    };
                    for q in quads {
                        tris.push(q);
                        sigma_flags.push(is_open);
                    }
                }
            }
        }
    }

    let mut triangles = Vec::new();
    let mut regions = Vec::new();
    let mut metal = Vec::new();
    for (t, &sig) in tris.iter().zip(&sigma_flags) {
        if sig {
            triangles.push(*t);
            regions.push(Region::Sigma);
        } else {
            metal.push(*t);
        }
    }
    for &t in &metal {
        triangles.push(t);
        regions.push(Region::GdPlus);
    }
    for &t in &metal {
        triangles.push([t[0], t[2], t[1]]);
        regions.push(Region::GdMinus);
    }
    let mesh = SurfaceMesh {
        vertices: Arc::new(vertices),
        triangles,
        regions,
    };
    mesh.validate()?;
    Ok(mesh)
}
