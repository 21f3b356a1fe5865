//! Geometric realization of the dual complex by surgery on the
//! permutohedron.
//!
//! Facet labels map to permutohedron vertices through `psi` (cut the cyclic
//! order at `n`, drop `n`, read the rest as a linear order). Every cell then
//! realizes as a translate of a virtual zonotope spanned by the `Q`/`R`
//! generator segments of its label: `Q_ij` for `i<j<n` sharing a part,
//! subtracted `R_i` for `i<n` sharing the part of `n`. The surgery keeps the
//! permutohedron faces whose extended label stays admissible and patches a
//! zonotope translate over every cell whose `n`-part is not a singleton.
//!
//! Vertex sets of virtual zonotopes are computed from realizable sign
//! patterns of directions in the generator span. With at most twelve
//! generators every pattern is decided exactly (strict feasibility over the
//! rationals); beyond that a fixed-seed sampling of rational directions
//! plus perturbed generator normals stands in, which is probabilistically
//! complete but no longer a proof.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::complex::CellComplex;
use crate::exact::{affine_dim, rank_int, strictly_feasible};
use crate::linkage::LinkageError;
use crate::partition::{CyclicPartition, PartitionError};
use crate::polytope::{permutohedron_vertex_coords, PermutohedronLattice, PolytopeError};

/// Above this many generators the exact sign-pattern sweep gives way to
/// seeded sampling.
pub const EXACT_SIGN_PATTERN_LIMIT: usize = 12;

const SAMPLE_DIRECTIONS: usize = 1000;
const SAMPLE_SEED: u64 = 0x11b4_ce11_ab1e_5eedu64;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RealizationError {
    #[error("label {0} is not a facet label (needs all singleton parts)")]
    NotAFacetLabel(String),

    #[error("index pair ({i},{j}) out of range for n={n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },

    #[error("generators of {label} span dimension {found}, cell has dimension {expected}")]
    SpanDimensionMismatch {
        label: String,
        expected: usize,
        found: usize,
    },

    #[error("realization check failed at cell {label}: {detail}")]
    CellRealization { label: String, detail: String },

    #[error("kept-face bookkeeping broken: {0}")]
    SurgeryMismatch(String),

    #[error("boundary of 2-face {0} is not a single cycle")]
    BoundaryNotACycle(String),

    #[error("OFF export is defined for n=5 only (got n={0})")]
    OffRequiresN5(usize),

    #[error(transparent)]
    Partition(#[from] PartitionError),

    #[error(transparent)]
    Linkage(#[from] LinkageError),

    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// The vector with +1 at position `i`, -1 at position `j` in R^(n-1).
pub fn q_vector(i: usize, j: usize, n: usize) -> Result<Vec<i64>, RealizationError> {
    if i == 0 || j == 0 || i >= j || j >= n {
        return Err(RealizationError::IndexOutOfRange { i, j, n });
    }
    let mut v = vec![0i64; n - 1];
    v[i - 1] = 1;
    v[j - 1] = -1;
    Ok(v)
}

/// The vector with `2-n` at position `i` and 1 elsewhere in R^(n-1).
pub fn r_vector(i: usize, n: usize) -> Result<Vec<i64>, RealizationError> {
    if i == 0 || i >= n {
        return Err(RealizationError::IndexOutOfRange { i, j: i, n });
    }
    let mut v = vec![1i64; n - 1];
    v[i - 1] = 2 - n as i64;
    Ok(v)
}

/// The generator segments of one cell label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    pub n: usize,
    /// Pairs `i < j < n` lying in one part: positive segments `q_ij`.
    pub positives: Vec<(usize, usize)>,
    /// Indices `i < n` sharing the part of `n`: subtracted segments `r_i`.
    pub negatives: Vec<usize>,
}

impl GeneratorSet {
    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positives.is_empty() && self.negatives.is_empty()
    }

    /// Generator vectors, positives first.
    pub fn vectors(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::with_capacity(self.len());
        for &(i, j) in &self.positives {
            out.push(q_vector(i, j, self.n).expect("validated"));
        }
        for &i in &self.negatives {
            out.push(r_vector(i, self.n).expect("validated"));
        }
        out
    }
}

/// Read the generator set off a label.
pub fn generators(label: &CyclicPartition) -> GeneratorSet {
    let n = label.ground_size();
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    for part in label.parts() {
        for (a_pos, &a) in part.iter().enumerate() {
            for &b in &part[a_pos + 1..] {
                // parts are sorted, so a < b
                if b < n {
                    positives.push((a, b));
                } else {
                    negatives.push(a);
                }
            }
        }
    }
    positives.sort_unstable();
    negatives.sort_unstable();
    GeneratorSet {
        n,
        positives,
        negatives,
    }
}

/// The permutohedron vertex realizing a facet label: cut the cyclic order
/// at `n`, omit `n`, and take the vertex of that linear order.
pub fn psi(label: &CyclicPartition) -> Result<Vec<i64>, RealizationError> {
    if !label.is_all_singletons() {
        return Err(RealizationError::NotAFacetLabel(label.to_string()));
    }
    let n = label.ground_size();
    let word: Vec<usize> = label.parts()[..n - 1].iter().map(|p| p[0]).collect();
    Ok(permutohedron_vertex_coords(n - 1, &word)?)
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A maximal linearly independent subset of the generators (over Q).
fn span_basis(vectors: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut basis: Vec<Vec<i64>> = Vec::new();
    for v in vectors {
        let mut candidate = basis.clone();
        candidate.push(v.clone());
        if rank_int(&candidate) > basis.len() {
            basis.push(v.clone());
        }
    }
    basis
}

/// The support vertex of the virtual zonotope for one sign pattern: sum the
/// positive generators on the pattern's positive side, subtract the
/// negative generators on their positive side.
fn pattern_vertex(gens: &GeneratorSet, vectors: &[Vec<i64>], signs: &[bool]) -> Vec<i64> {
    let n_pos = gens.positives.len();
    let dim = gens.n - 1;
    let mut v = vec![0i64; dim];
    for (idx, vector) in vectors.iter().enumerate() {
        if signs[idx] {
            if idx < n_pos {
                for (c, x) in v.iter_mut().zip(vector) {
                    *c += x;
                }
            } else {
                for (c, x) in v.iter_mut().zip(vector) {
                    *c -= x;
                }
            }
        }
    }
    v
}

/// Vertex set of the virtual zonotope spanned by a generator set, as exact
/// integer points (one per realizable sign pattern of a generic direction
/// in the generator span).
pub fn virtual_zonotope_vertices(gens: &GeneratorSet) -> BTreeSet<Vec<i64>> {
    let vectors = gens.vectors();
    let m = vectors.len();
    if m == 0 {
        return BTreeSet::from([vec![0i64; gens.n - 1]]);
    }
    let basis = span_basis(&vectors);
    if m <= EXACT_SIGN_PATTERN_LIMIT {
        exact_pattern_vertices(gens, &vectors, &basis)
    } else {
        sampled_pattern_vertices(gens, &vectors, &basis)
    }
}

fn exact_pattern_vertices(
    gens: &GeneratorSet,
    vectors: &[Vec<i64>],
    basis: &[Vec<i64>],
) -> BTreeSet<Vec<i64>> {
    let m = vectors.len();
    let mut out = BTreeSet::new();
    let mut signs = vec![false; m];
    for mask in 0u32..(1u32 << m) {
        for (i, s) in signs.iter_mut().enumerate() {
            *s = mask >> i & 1 == 1;
        }
        // Strict feasibility of sign_i * <c, g_i> > 0 for c in the span,
        // parametrized by the basis coordinates.
        let rows: Vec<Vec<i64>> = vectors
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let sign = if signs[i] { 1 } else { -1 };
                basis.iter().map(|b| sign * dot(b, g)).collect()
            })
            .collect();
        if strictly_feasible(&rows) {
            out.insert(pattern_vertex(gens, vectors, &signs));
        }
    }
    out
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn sampled_pattern_vertices(
    gens: &GeneratorSet,
    vectors: &[Vec<i64>],
    basis: &[Vec<i64>],
) -> BTreeSet<Vec<i64>> {
    let m = vectors.len();
    let mut out = BTreeSet::new();
    let mut visit = |c: &[BigInt]| {
        let mut signs = vec![false; m];
        for (i, g) in vectors.iter().enumerate() {
            let d: BigInt = c.iter().zip(g).map(|(x, &y)| x * BigInt::from(y)).sum();
            if d.is_zero() {
                return; // degenerate direction, skip
            }
            signs[i] = d.is_positive();
        }
        out.insert(pattern_vertex(gens, vectors, &signs));
    };

    let mut state = SAMPLE_SEED;
    for _ in 0..SAMPLE_DIRECTIONS {
        let coeffs: Vec<i64> = basis
            .iter()
            .map(|_| (splitmix64(&mut state) % 2001) as i64 - 1000)
            .collect();
        let dim = gens.n - 1;
        let mut c = vec![BigInt::zero(); dim];
        for (b, &w) in basis.iter().zip(&coeffs) {
            for (cc, &x) in c.iter_mut().zip(b) {
                *cc += BigInt::from(x) * BigInt::from(w);
            }
        }
        visit(&c);
    }
    // Deterministic perturbed normals: near each generator's hyperplane,
    // approach from both sides along a fixed lexicographic perturbation.
    let k = BigInt::from(1u64 << 20);
    for i in 0..m {
        for sign in [1i64, -1] {
            let dim = gens.n - 1;
            let mut c = vec![BigInt::zero(); dim];
            let mut weight = k.pow(m as u32);
            for (j, g) in vectors.iter().enumerate() {
                let w = if j == i {
                    &weight * BigInt::from(sign) * k.pow(m as u32)
                } else {
                    weight.clone()
                };
                for (cc, &x) in c.iter_mut().zip(g) {
                    *cc += &w * BigInt::from(x);
                }
                weight /= &k;
            }
            visit(&c);
        }
    }
    out
}

fn lex_min(points: &BTreeSet<Vec<i64>>) -> Vec<i64> {
    points.iter().next().expect("nonempty").clone()
}

/// The dual-cell vertex ids of a cell: the facets whose label refines it.
pub fn dual_cell_vertices(complex: &CellComplex, cell: usize) -> Vec<usize> {
    let top = complex.top_dim();
    complex
        .upper_interval(cell)
        .into_iter()
        .filter(|&c| complex.cell(c).dim == top)
        .collect()
}

/// Check the realization property of one cell: the psi-images of its dual
/// vertices span an affine space of the dual dimension and coincide, up to
/// one translation, with the virtual zonotope vertex set of its generators.
pub fn verify_cell_realization(
    complex: &CellComplex,
    cell: usize,
) -> Result<bool, RealizationError> {
    let label = &complex.cell(cell).label;
    let n = complex.n();
    let expected_dim = n - label.part_count();

    let mut images: BTreeSet<Vec<i64>> = BTreeSet::new();
    for facet in dual_cell_vertices(complex, cell) {
        images.insert(psi(&complex.cell(facet).label)?);
    }
    let points: Vec<Vec<i64>> = images.iter().cloned().collect();
    if affine_dim(&points) != expected_dim {
        return Ok(false);
    }

    let gens = generators(label);
    let span = rank_int(&gens.vectors());
    if span != expected_dim {
        return Err(RealizationError::SpanDimensionMismatch {
            label: label.to_string(),
            expected: expected_dim,
            found: span,
        });
    }
    let zonotope = virtual_zonotope_vertices(&gens);
    if zonotope.len() != images.len() {
        return Ok(false);
    }
    let shift: Vec<i64> = lex_min(&images)
        .iter()
        .zip(lex_min(&zonotope))
        .map(|(a, b)| a - b)
        .collect();
    let translated: BTreeSet<Vec<i64>> = zonotope
        .iter()
        .map(|v| v.iter().zip(&shift).map(|(x, t)| x + t).collect())
        .collect();
    Ok(translated == images)
}

/// Where a realized face comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceOrigin {
    /// A face of the permutohedron that survived step 3.
    Kept,
    /// A zonotope translate patched in at step 4.
    Patched,
}

impl FaceOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            FaceOrigin::Kept => "kept-permutohedron-face",
            FaceOrigin::Patched => "patched-zonotope",
        }
    }
}

/// One realized face of the dual complex.
#[derive(Clone, Debug)]
pub struct GeometricFace {
    /// Id of the underlying cell in the source complex.
    pub cell: usize,
    pub label: CyclicPartition,
    /// Geometric dimension (`n` minus the label's part count).
    pub dim: usize,
    /// Vertex cell ids; boundary-cycle order for 2-faces, ascending
    /// otherwise.
    pub vertices: Vec<usize>,
    pub origin: FaceOrigin,
}

/// A face of the permutohedron removed at step 3.
#[derive(Clone, Debug)]
pub struct RemovedFace {
    pub dim: usize,
    /// The ordered-partition label of the removed face.
    pub label: Vec<Vec<usize>>,
}

/// The realization of the dual complex in the hyperplane of the
/// permutohedron on `{1..n-1}`.
#[derive(Clone, Debug)]
pub struct GeometricComplex {
    pub n: usize,
    /// Vertex cell id -> integer coordinates in R^(n-1).
    pub points: BTreeMap<usize, Vec<i64>>,
    /// Every dual cell exactly once, ordered by cell id.
    pub faces: Vec<GeometricFace>,
    pub removed: Vec<RemovedFace>,
}

impl GeometricComplex {
    /// Ambient affine dimension (`n - 2`): the construction lives in the
    /// hyperplane of the permutohedron.
    pub fn ambient_affine_dim(&self) -> usize {
        self.n - 2
    }

    pub fn kept_count(&self, dim: usize) -> usize {
        self.faces
            .iter()
            .filter(|f| f.dim == dim && f.origin == FaceOrigin::Kept)
            .count()
    }

    pub fn patched_count(&self, dim: usize) -> usize {
        self.faces
            .iter()
            .filter(|f| f.dim == dim && f.origin == FaceOrigin::Patched)
            .count()
    }

    pub fn removed_count(&self, dim: usize) -> usize {
        self.removed.iter().filter(|f| f.dim == dim).count()
    }

    /// Face counts per geometric dimension.
    pub fn face_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n - 2];
        for f in &self.faces {
            counts[f.dim] += 1;
        }
        counts
    }

    /// JSON export: points as `p/q` strings keyed by vertex id in numeric
    /// order, faces by cell id.
    pub fn to_json(&self) -> serde_json::Value {
        let mut points = serde_json::Map::new();
        for (id, coords) in &self.points {
            points.insert(
                id.to_string(),
                json!(coords.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
            );
        }
        let faces: Vec<serde_json::Value> = self
            .faces
            .iter()
            .map(|f| {
                json!({
                    "cell": f.cell,
                    "label": f.label.parts(),
                    "dim": f.dim,
                    "vertices": f.vertices,
                    "origin": f.origin.as_str(),
                })
            })
            .collect();
        json!({
            "points": serde_json::Value::Object(points),
            "faces": faces,
            "n": self.n,
            "ambient_affine_dim": self.ambient_affine_dim(),
        })
    }

    /// OFF export of the 2-skeleton for n=5, where the ambient hull is
    /// 3-dimensional. Exact coordinates are mapped isometrically onto an
    /// orthonormal basis of the sum-zero space; floats appear only here.
    pub fn to_off(&self) -> Result<String, RealizationError> {
        if self.n != 5 {
            return Err(RealizationError::OffRequiresN5(self.n));
        }
        // Orthonormal directions of {x : sum x = 0} in R^4, un-normalized:
        let basis: [[i64; 4]; 3] = [[1, -1, 0, 0], [1, 1, -2, 0], [1, 1, 1, -3]];
        let norms = [2f64.sqrt(), 6f64.sqrt(), 12f64.sqrt()];
        // Anchor at the barycenter (all points sum to 10 = 1+2+3+4).
        let project = |p: &[i64]| -> [f64; 3] {
            let centered: Vec<f64> = p.iter().map(|&x| x as f64 - 2.5).collect();
            let mut out = [0f64; 3];
            for (k, b) in basis.iter().enumerate() {
                let d: f64 = centered.iter().zip(b).map(|(x, &y)| x * y as f64).sum();
                out[k] = d / norms[k];
            }
            out
        };
        let ids: Vec<usize> = self.points.keys().copied().collect();
        let off_index: HashMap<usize, usize> =
            ids.iter().enumerate().map(|(k, &id)| (id, k)).collect();
        let two_faces: Vec<&GeometricFace> = self.faces.iter().filter(|f| f.dim == 2).collect();
        let edge_count = self.faces.iter().filter(|f| f.dim == 1).count();

        let mut out = String::new();
        out.push_str("OFF\n");
        out.push_str(&format!(
            "{} {} {}\n",
            ids.len(),
            two_faces.len(),
            edge_count
        ));
        for &id in &ids {
            let [x, y, z] = project(&self.points[&id]);
            out.push_str(&format!("{:.16e} {:.16e} {:.16e}\n", x, y, z));
        }
        for face in two_faces {
            out.push_str(&face.vertices.len().to_string());
            for v in &face.vertices {
                out.push_str(&format!(" {}", off_index[v]));
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// Boundary cycle of a 2-dimensional dual face: its edges are the dual
/// 1-cells above the cell, each contributing a vertex pair; the pairs must
/// chain into a single cycle. Starts at the smallest vertex id and moves
/// toward its smaller neighbor.
fn boundary_cycle(
    complex: &CellComplex,
    cell: usize,
    vertices: &[usize],
) -> Result<Vec<usize>, RealizationError> {
    let n = complex.n();
    let label = &complex.cell(cell).label;
    let mut adjacency: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for edge_cell in complex.upper_interval(cell) {
        if complex.cell(edge_cell).label.part_count() != n - 1 {
            continue;
        }
        let ends = dual_cell_vertices(complex, edge_cell);
        if ends.len() != 2 {
            return Err(RealizationError::BoundaryNotACycle(label.to_string()));
        }
        adjacency.entry(ends[0]).or_default().push(ends[1]);
        adjacency.entry(ends[1]).or_default().push(ends[0]);
    }
    if adjacency.len() != vertices.len() || adjacency.values().any(|v| v.len() != 2) {
        return Err(RealizationError::BoundaryNotACycle(label.to_string()));
    }
    let start = *vertices.iter().min().expect("nonempty");
    let mut cycle = vec![start];
    let mut prev = start;
    let mut here = *adjacency[&start].iter().min().expect("two neighbors");
    while here != start {
        cycle.push(here);
        let next = adjacency[&here]
            .iter()
            .copied()
            .find(|&v| v != prev)
            .expect("cycle");
        prev = here;
        here = next;
    }
    if cycle.len() != vertices.len() {
        return Err(RealizationError::BoundaryNotACycle(label.to_string()));
    }
    Ok(cycle)
}

/// Run the surgery: place the dual vertices on the permutohedron, keep the
/// faces whose extended label is admissible, patch a zonotope translate
/// over every cell whose `n`-part has more than one element. Every cell is
/// first checked for the realization property; any failure aborts.
pub fn surgery(complex: &CellComplex) -> Result<GeometricComplex, RealizationError> {
    let n = complex.n();

    let verdicts: Vec<Result<bool, RealizationError>> = complex
        .cells()
        .par_iter()
        .map(|cell| verify_cell_realization(complex, cell.id))
        .collect();
    for (cell, verdict) in complex.cells().iter().zip(verdicts) {
        if !verdict? {
            return Err(RealizationError::CellRealization {
                label: cell.label.to_string(),
                detail: "psi-images do not match the virtual zonotope".into(),
            });
        }
    }

    // Step 2: vertices.
    let mut points = BTreeMap::new();
    for facet in complex.facets() {
        points.insert(facet.id, psi(&facet.label)?);
    }

    // Step 3: walk the boundary faces of the permutohedron, keep or remove.
    // (The top face is the solid polytope, not part of the boundary
    // complex; its extended label is never admissible anyway.)
    let lattice = PermutohedronLattice::new(n - 1)?;
    let mut kept_cells: BTreeSet<usize> = BTreeSet::new();
    let mut removed = Vec::new();
    for (dim, face) in lattice.all_faces().filter(|(d, _)| *d < n - 2) {
        let mut parts = face.parts().to_vec();
        parts.push(vec![n]);
        let extended = CyclicPartition::new(parts, n)?;
        match complex.lookup(&extended) {
            Some(cell) => {
                if !kept_cells.insert(cell) {
                    return Err(RealizationError::SurgeryMismatch(format!(
                        "cell {extended} kept twice"
                    )));
                }
            }
            None => removed.push(RemovedFace {
                dim,
                label: face.parts().to_vec(),
            }),
        }
    }
    let singleton_cells: Vec<usize> = complex
        .cells()
        .iter()
        .filter(|c| c.label.last_part().len() == 1)
        .map(|c| c.id)
        .collect();
    if kept_cells != singleton_cells.iter().copied().collect() {
        return Err(RealizationError::SurgeryMismatch(
            "kept faces are not exactly the singleton-{n} cells".into(),
        ));
    }

    // Steps 3+4: emit every dual cell once.
    let mut faces = Vec::with_capacity(complex.cell_count());
    for cell in complex.cells() {
        let label = &cell.label;
        let dim = n - label.part_count();
        let origin = if label.last_part().len() == 1 {
            FaceOrigin::Kept
        } else {
            FaceOrigin::Patched
        };
        let mut vertices = dual_cell_vertices(complex, cell.id);
        vertices.sort_unstable();
        if dim == 2 {
            vertices = boundary_cycle(complex, cell.id, &vertices)?;
        }
        faces.push(GeometricFace {
            cell: cell.id,
            label: label.clone(),
            dim,
            vertices,
            origin,
        });
    }

    Ok(GeometricComplex {
        n,
        points,
        faces,
        removed,
    })
}
