//! Reference polytope combinatorics: the permutohedron face lattice as
//! ordered set partitions under linear refinement, and cyclic polytope
//! facets by the Gale evenness condition. Purely combinatorial; the only
//! geometry is the integer vertex coordinates of the permutohedron.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::complex::{factorial, CellComplex, ComplexError, EquilateralEmbedding};
use crate::partition::CyclicPartition;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("not a permutation of 1..={0}")]
    NotAPermutation(usize),

    #[error("cyclic polytope needs n > d >= 2, got n={n}, d={d}")]
    BadCyclicParameters { n: usize, d: usize },

    #[error("ground size must be at least 1")]
    EmptyGround,

    #[error(transparent)]
    Complex(#[from] ComplexError),

    #[error("complex is not equilateral with odd n >= 3")]
    NotEquilateralOdd,

    #[error("equilateral host complex on {0} edges is beyond desk scale")]
    HostTooLarge(usize),
}

/// A linearly ordered partition of a finite index set; the face label of a
/// permutohedron.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct OrderedPartition {
    parts: Vec<Vec<usize>>,
}

impl fmt::Debug for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|p| {
                p.iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "({})", parts.join("|"))
    }
}

impl OrderedPartition {
    pub fn new(parts: Vec<Vec<usize>>) -> Self {
        let mut parts = parts;
        for p in &mut parts {
            p.sort_unstable();
        }
        Self { parts }
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn part_count(&self) -> usize {
        self.parts.len()
    }

    /// Total number of elements.
    pub fn ground_size(&self) -> usize {
        self.parts.iter().map(|p| p.len()).sum()
    }

    /// Singleton sequence as a permutation word, if this is a vertex label.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        if self.parts.iter().all(|p| p.len() == 1) {
            Some(self.parts.iter().map(|p| p[0]).collect())
        } else {
            None
        }
    }
}

/// Linear refinement of ordered partitions: consecutive runs of `fine`'s
/// parts union to `coarse`'s parts, in order (no rotation). Reflexive.
pub fn linear_refines(fine: &OrderedPartition, coarse: &OrderedPartition) -> bool {
    let mut idx = 0usize;
    for coarse_part in &coarse.parts {
        let mut need = coarse_part.len();
        while need > 0 {
            let Some(part) = fine.parts.get(idx) else {
                return false;
            };
            if part.len() > need || !part.iter().all(|i| coarse_part.contains(i)) {
                return false;
            }
            need -= part.len();
            idx += 1;
        }
    }
    idx == fine.parts.len()
}

/// All ordered partitions of an arbitrary index set, deterministic order.
pub fn ordered_partitions_of(elements: &[usize]) -> Vec<OrderedPartition> {
    fn rec(remaining: &[usize], current: &mut Vec<Vec<usize>>, out: &mut Vec<OrderedPartition>) {
        if remaining.is_empty() {
            out.push(OrderedPartition::new(current.clone()));
            return;
        }
        // Any nonempty subset of the remaining elements can be the next part.
        for mask in 1..(1u64 << remaining.len()) {
            let mut part = Vec::new();
            let mut left = Vec::new();
            for (i, &e) in remaining.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    part.push(e);
                } else {
                    left.push(e);
                }
            }
            current.push(part);
            rec(&left, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(elements, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// The face lattice of the permutohedron on `{1..m}`: faces grouped by
/// dimension (`m - #parts`), ordered by linear refinement. The top face
/// (one part) is included.
#[derive(Clone, Debug)]
pub struct PermutohedronLattice {
    m: usize,
    faces_by_dim: Vec<Vec<OrderedPartition>>,
}

impl PermutohedronLattice {
    pub fn new(m: usize) -> Result<Self, PolytopeError> {
        if m == 0 {
            return Err(PolytopeError::EmptyGround);
        }
        let ground: Vec<usize> = (1..=m).collect();
        let mut faces_by_dim: Vec<Vec<OrderedPartition>> = vec![Vec::new(); m];
        for op in ordered_partitions_of(&ground) {
            faces_by_dim[m - op.part_count()].push(op);
        }
        Ok(Self { m, faces_by_dim })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Dimension of the polytope, `m - 1`.
    pub fn dim(&self) -> usize {
        self.m - 1
    }

    pub fn faces_of_dim(&self, d: usize) -> &[OrderedPartition] {
        &self.faces_by_dim[d]
    }

    pub fn all_faces(&self) -> impl Iterator<Item = (usize, &OrderedPartition)> {
        self.faces_by_dim
            .iter()
            .enumerate()
            .flat_map(|(d, faces)| faces.iter().map(move |f| (d, f)))
    }

    /// f-vector including the top face.
    pub fn f_vector(&self) -> Vec<usize> {
        self.faces_by_dim.iter().map(|f| f.len()).collect()
    }

    pub fn vertices(&self) -> &[OrderedPartition] {
        &self.faces_by_dim[0]
    }

    /// Number of vertices below a face: the product of factorials of the
    /// part sizes (each face is a product of smaller permutohedra).
    pub fn vertices_below(&self, face: &OrderedPartition) -> usize {
        self.vertices()
            .iter()
            .filter(|v| linear_refines(v, face))
            .count()
    }

    /// JSON export mirroring the complex schema.
    pub fn to_json(&self) -> serde_json::Value {
        let mut cells = Vec::new();
        let mut ids: BTreeMap<&OrderedPartition, usize> = BTreeMap::new();
        for (dim, face) in self.all_faces() {
            let id = cells.len();
            ids.insert(face, id);
            cells.push(json!({
                "id": id,
                "dim": dim,
                "label": face.parts(),
            }));
        }
        // Incidence between consecutive dimensions, as in the complex.
        let mut incidence: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
        for (dim, face) in self.all_faces() {
            if dim == 0 {
                continue;
            }
            let id = ids[face];
            for lower in self.faces_of_dim(dim - 1) {
                if linear_refines(lower, face) {
                    incidence[id].push(ids[lower]);
                }
            }
        }
        json!({
            "m": self.m,
            "cells": cells,
            "incidence": incidence,
        })
    }
}

/// Coordinates of the permutohedron vertex labeled by a permutation word:
/// the coordinate at position `perm[j]` is `j+1` (the inverse permutation
/// applied to `(1..m)`).
pub fn permutohedron_vertex_coords(m: usize, perm: &[usize]) -> Result<Vec<i64>, PolytopeError> {
    if perm.len() != m {
        return Err(PolytopeError::NotAPermutation(m));
    }
    let mut coords = vec![0i64; m];
    let mut seen = vec![false; m + 1];
    for (j, &p) in perm.iter().enumerate() {
        if p == 0 || p > m || seen[p] {
            return Err(PolytopeError::NotAPermutation(m));
        }
        seen[p] = true;
        coords[p - 1] = (j + 1) as i64;
    }
    Ok(coords)
}

/// Facets of the cyclic polytope `C(n, d)` on vertices `x_1 < ... < x_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicPolytopeFacets {
    pub n: usize,
    pub d: usize,
    pub facets: Vec<Vec<usize>>,
}

/// Gale evenness: a d-subset F is a facet iff any two elements outside F
/// are separated by an even number of elements of F in the linear sequence
/// (endpoints not counted).
pub fn gale_even(subset: &[usize], n: usize) -> bool {
    let members: BTreeSet<usize> = subset.iter().copied().collect();
    let outside: Vec<usize> = (1..=n).filter(|i| !members.contains(i)).collect();
    for (a_pos, &a) in outside.iter().enumerate() {
        for &b in &outside[a_pos + 1..] {
            let between = subset.iter().filter(|&&f| a < f && f < b).count();
            if between % 2 != 0 {
                return false;
            }
        }
    }
    true
}

/// All Gale-even d-subsets of `{1..n}`, lexicographic.
pub fn cyclic_facets(n: usize, d: usize) -> Result<CyclicPolytopeFacets, PolytopeError> {
    if d < 2 || n <= d {
        return Err(PolytopeError::BadCyclicParameters { n, d });
    }
    let mut facets = Vec::new();
    let mut subset: Vec<usize> = Vec::new();
    fn rec(
        start: usize,
        n: usize,
        d: usize,
        subset: &mut Vec<usize>,
        facets: &mut Vec<Vec<usize>>,
    ) {
        if subset.len() == d {
            if gale_even(subset, n) {
                facets.push(subset.clone());
            }
            return;
        }
        for i in start..=n {
            subset.push(i);
            rec(i + 1, n, d, subset, facets);
            subset.pop();
        }
    }
    rec(1, n, d, &mut subset, &mut facets);
    Ok(CyclicPolytopeFacets { n, d, facets })
}

impl CyclicPolytopeFacets {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n": self.n,
            "d": self.d,
            "facets": self.facets,
        })
    }
}

/// The starlike images for the canonical facet `({1}{2}...{n})` of the odd
/// equilateral complex: vertex `x_i` of `C(n, n-3)` maps to the codim-1
/// face merging the cyclically adjacent pair starting at `(i-1)k mod n + 1`
/// where `n = 2k+1`. The first images are `({1,2}{3}...{n})`,
/// `({1}...{k+1,k+2}...{n})`, `({2}...{n-1}{1,n})`, continuing around the
/// star; the duality check below validates the inferred pattern.
pub fn starlike_images(n: usize) -> Result<Vec<CyclicPartition>, PolytopeError> {
    if n < 5 || n.is_multiple_of(2) {
        return Err(PolytopeError::NotEquilateralOdd);
    }
    let k = (n - 1) / 2;
    let mut images = Vec::with_capacity(n);
    for i in 0..n {
        let start = (i * k) % n + 1;
        let next = start % n + 1;
        let mut parts: Vec<Vec<usize>> = Vec::with_capacity(n - 1);
        for j in 1..=n {
            if j == next {
                continue;
            }
            if j == start {
                parts.push(vec![start, next]);
            } else {
                parts.push(vec![j]);
            }
        }
        images.push(CyclicPartition::new(parts, n).map_err(ComplexError::from)?);
    }
    Ok(images)
}

/// Duality data for one facet of the equilateral complex: the transported
/// starlike bijection from cyclic-polytope vertices to the facet's
/// codimension-1 faces.
fn facet_starlike_faces(complex: &CellComplex, facet: usize) -> Result<Vec<usize>, PolytopeError> {
    let n = complex.n();
    let word: Vec<usize> = complex
        .cell(facet)
        .label
        .parts()
        .iter()
        .map(|p| p[0])
        .collect();
    // sigma relabels the canonical facet onto this one.
    let mut sigma = vec![0usize; n];
    for (pos, &value) in word.iter().enumerate() {
        sigma[pos] = value;
    }
    let mut faces = Vec::with_capacity(n);
    for image in starlike_images(n)? {
        let relabeled = image.relabeled(&sigma).map_err(ComplexError::from)?;
        let id = complex
            .lookup(&relabeled)
            .ok_or(PolytopeError::NotEquilateralOdd)?;
        faces.push(id);
    }
    Ok(faces)
}

/// Full combinatorial duality check of one facet's boundary against
/// `C(n, n-3)`: a subset S of cyclic-polytope vertices is Gale-even iff the
/// corresponding codim-1 faces share exactly one boundary vertex, and the
/// map from Gale-even subsets to those common vertices is a bijection onto
/// the facet's boundary vertices.
pub fn facet_dual_to_cyclic(
    complex: &CellComplex,
    facet: usize,
    vertex_sets: &[BTreeSet<usize>],
) -> Result<bool, PolytopeError> {
    let n = complex.n();
    if n == 3 {
        return Ok(true); // point facet, degenerate duality
    }
    let d = n - 3;
    let face_ids = facet_starlike_faces(complex, facet)?;
    let boundary: &BTreeSet<usize> = &vertex_sets[facet];
    let mut matched: BTreeSet<usize> = BTreeSet::new();
    let mut subset: Vec<usize> = Vec::new();
    fn subsets_rec(
        start: usize,
        n: usize,
        d: usize,
        subset: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if subset.len() == d {
            out.push(subset.clone());
            return;
        }
        for i in start..=n {
            subset.push(i);
            subsets_rec(i + 1, n, d, subset, out);
            subset.pop();
        }
    }
    let mut all_subsets = Vec::new();
    subsets_rec(1, n, d, &mut subset, &mut all_subsets);
    for s in &all_subsets {
        let mut common: Option<BTreeSet<usize>> = None;
        for &xi in s {
            let set = &vertex_sets[face_ids[xi - 1]];
            common = Some(match common {
                None => set.clone(),
                Some(prev) => prev.intersection(set).copied().collect(),
            });
        }
        let common = common.expect("d >= 1");
        if gale_even(s, n) {
            if common.len() != 1 {
                return Ok(false);
            }
            let v = *common.iter().next().expect("one vertex");
            if !boundary.contains(&v) || !matched.insert(v) {
                return Ok(false);
            }
        } else if !common.is_empty() {
            return Ok(false);
        }
    }
    Ok(matched == *boundary)
}

/// Check every facet of an odd equilateral complex against the dual cyclic
/// polytope via the (transported) starlike bijection.
pub fn equilateral_facet_duality_check(complex: &CellComplex) -> Result<bool, PolytopeError> {
    let n = complex.n();
    let one = num_rational::BigRational::from_integer(1.into());
    if n.is_multiple_of(2) || complex.linkage().lengths().iter().any(|l| *l != one) {
        return Err(PolytopeError::NotEquilateralOdd);
    }
    if n == 3 {
        return Ok(true);
    }
    let vertex_sets = complex.closure_vertex_sets();
    for facet in complex.facets() {
        if !facet_dual_to_cyclic(complex, facet.id, &vertex_sets)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Locate a cell of an integer-length, odd-total linkage complex as a face
/// of the dual cyclic polytope `C(D+3, D)*`: embed into the equilateral
/// complex, certify the host facet's duality, and verify the cell is the
/// intersection of the codim-1 faces containing it.
pub fn cell_is_dual_cyclic_face(complex: &CellComplex, cell: usize) -> Result<bool, PolytopeError> {
    let embedding = EquilateralEmbedding::new(complex.linkage())?;
    if embedding.target_n() > 9 {
        // The host complex has (target_n - 1)! facets.
        return Err(PolytopeError::HostTooLarge(embedding.target_n()));
    }
    let target = CellComplex::build(&embedding.target_linkage())?;
    let image_label = embedding.map_label(&complex.cell(cell).label)?;
    let image = target
        .lookup(&image_label)
        .ok_or_else(|| ComplexError::EmbeddingNotAdmissible(image_label.to_string()))?;
    cell_is_dual_cyclic_face_in(&target, image)
}

/// The same check with the equilateral host complex already built.
pub fn cell_is_dual_cyclic_face_in(
    target: &CellComplex,
    image: usize,
) -> Result<bool, PolytopeError> {
    let big_n = target.n();
    if big_n == 3 {
        return Ok(true);
    }

    // Host facet: refine every part into singletons in index order.
    let image_label = &target.cell(image).label;
    let singletons: Vec<Vec<usize>> = image_label
        .parts()
        .iter()
        .flat_map(|p| p.iter().map(|&i| vec![i]))
        .collect();
    let host_label = CyclicPartition::new(singletons, big_n).map_err(ComplexError::from)?;
    let host = target
        .lookup(&host_label)
        .ok_or(PolytopeError::NotEquilateralOdd)?;

    let vertex_sets = target.closure_vertex_sets();
    if !facet_dual_to_cyclic(target, host, &vertex_sets)? {
        return Ok(false);
    }
    let face_ids = facet_starlike_faces(target, host)?;

    // Codim-1 faces of the host facet containing the cell.
    let mut containing: Vec<usize> = Vec::new();
    for (xi, &face) in face_ids.iter().enumerate() {
        if target
            .cell(face)
            .label
            .refines(&target.cell(image).label)
            .map_err(ComplexError::from)?
        {
            containing.push(xi);
        }
    }
    // A k-face of a simple (N-3)-polytope lies in exactly N-3-k facets and
    // equals the intersection of their vertex sets.
    let cell_dim = target.cell(image).dim;
    if containing.len() != big_n - 3 - cell_dim {
        return Ok(false);
    }
    let mut common: BTreeSet<usize> = vertex_sets[host].clone();
    for &xi in &containing {
        common = common
            .intersection(&vertex_sets[face_ids[xi]])
            .copied()
            .collect();
    }
    Ok(common == vertex_sets[image])
}

/// For the long-edge family the complex poset is anti-isomorphic to the
/// proper face lattice of the permutohedron on `{1..n-1}`, by dropping the
/// singleton `{n}` from every label.
pub fn long_edge_anti_isomorphism_check(complex: &CellComplex) -> Result<bool, PolytopeError> {
    let n = complex.n();
    let lattice = PermutohedronLattice::new(n - 1)?;
    // Bijection: cells of dim d <-> proper faces of dim (n-3) - d... the
    // reversal sends complex dimension d to lattice dimension n-3-d.
    let mut pairs: Vec<(usize, OrderedPartition)> = Vec::new();
    for cell in complex.cells() {
        let label = &cell.label;
        if label.last_part() != [n] {
            return Ok(false);
        }
        let dropped = OrderedPartition::new(label.parts()[..label.part_count() - 1].to_vec());
        if n - 1 - dropped.part_count() != complex.top_dim() - cell.dim {
            return Ok(false);
        }
        pairs.push((cell.id, dropped));
    }
    // Counts per dimension must match the reversed proper f-vector.
    let f = complex.f_vector();
    let lattice_f = lattice.f_vector();
    for d in 0..=complex.top_dim() {
        if f[d] != lattice_f[complex.top_dim() - d] {
            return Ok(false);
        }
    }
    // Order reversal: a covers b in the complex iff the image of a is
    // covered by the image of b in the lattice.
    let images: BTreeMap<usize, &OrderedPartition> =
        pairs.iter().map(|(id, op)| (*id, op)).collect();
    for cell in complex.cells() {
        for &face in complex.faces_of(cell.id) {
            if !linear_refines(images[&cell.id], images[&face]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Count of ordered partitions of `{1..m}` into exactly `p` parts
/// (`p! * S(m, p)`), used as an independent counting oracle in tests.
pub fn ordered_partition_count(m: usize, p: usize) -> usize {
    // Stirling numbers of the second kind by recurrence.
    let mut s = vec![vec![0usize; p + 1]; m + 1];
    s[0][0] = 1;
    for i in 1..=m {
        for j in 1..=p.min(i) {
            s[i][j] = s[i - 1][j - 1] + j * s[i - 1][j];
        }
    }
    factorial(p) * s[m][p]
}
