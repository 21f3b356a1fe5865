//! The regular cell complex on the moduli space of a linkage.
//!
//! Cells are labeled by admissible cyclically ordered partitions of the edge
//! set: a partition into `k+3` parts labels a `k`-cell, and a cell lies in
//! the boundary of another exactly when the finer label refines the coarser
//! one. The complex stores incidence only between consecutive dimensions;
//! everything else (closures, intervals, homology) is derived on demand.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::exact::{sparse_gf2_rank, BitMatrix};
use crate::linkage::{rational_to_string, Linkage, LinkageError};
use crate::partition::{enumerate_admissible, CyclicPartition, PartitionError};
use crate::polytope::{linear_refines, ordered_partitions_of, OrderedPartition};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error(transparent)]
    Linkage(#[from] LinkageError),

    #[error(transparent)]
    Partition(#[from] PartitionError),

    #[error("linkage is non-generic; pass the override to build anyway")]
    NonGeneric,

    #[error("boundary of boundary is nonzero at cell {cell} over codim-2 cell {lower}")]
    BoundarySquareNonzero { cell: usize, lower: usize },

    #[error("diamond property fails between cell {upper} and cell {lower}: {count} cells strictly between")]
    DiamondViolation {
        upper: usize,
        lower: usize,
        count: usize,
    },

    #[error("cell {0} is not a vertex")]
    NotAVertex(usize),

    #[error("vertex {vertex}: expected {expected} incident facets, found {found}")]
    VertexFigureMismatch {
        vertex: usize,
        expected: usize,
        found: usize,
    },

    #[error("lengths must agree: projection requires L' = L with one edge appended")]
    ProjectionLengthMismatch,

    #[error("projected label {0} is not a cell of the base complex (epsilon too large)")]
    ProjectionNotAdmissible(String),

    #[error("embedding requires integer lengths, got {0}")]
    NonIntegerLength(String),

    #[error("embedding requires an odd total length, got {0}")]
    EvenTotalLength(String),

    #[error("embedded label {0} is not admissible in the equilateral linkage")]
    EmbeddingNotAdmissible(String),
}

/// One cell: a dense id, its label, and its dimension (`#parts - 3`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub id: usize,
    pub dim: usize,
    #[serde(serialize_with = "serialize_label")]
    pub label: CyclicPartition,
}

fn serialize_label<S: serde::Serializer>(label: &CyclicPartition, s: S) -> Result<S::Ok, S::Error> {
    label.parts().serialize(s)
}

/// Options for `CellComplex::build_with`.
#[derive(Clone, Copy, Debug, Default)]
pub struct BuildOptions {
    /// Build even for a non-generic linkage, using the nonsingular
    /// admissibility rule; the manifold interpretation fails on walls.
    pub allow_non_generic: bool,
}

/// The face poset of the moduli-space complex, cells grouped by dimension.
#[derive(Clone, Debug)]
pub struct CellComplex {
    linkage: Linkage,
    cells: Vec<Cell>,
    /// Start of each dimension's id range; `dim_start[d]..dim_start[d+1]`.
    dim_start: Vec<usize>,
    index: HashMap<CyclicPartition, usize>,
    /// Codimension-1 faces per cell id, ascending.
    faces: Vec<Vec<usize>>,
    /// Codimension-1 cofaces per cell id, ascending.
    cofaces: Vec<Vec<usize>>,
}

impl CellComplex {
    /// Build the complex of a generic linkage.
    pub fn build(linkage: &Linkage) -> Result<Self, ComplexError> {
        Self::build_with(linkage, BuildOptions::default())
    }

    pub fn build_with(linkage: &Linkage, options: BuildOptions) -> Result<Self, ComplexError> {
        if !options.allow_non_generic && !linkage.is_generic()? {
            return Err(ComplexError::NonGeneric);
        }
        let n = linkage.n();
        let per_dim: Vec<Vec<CyclicPartition>> = (3..=n)
            .into_par_iter()
            .map(|m| enumerate_admissible(linkage, m))
            .collect::<Result<_, _>>()?;

        let mut cells = Vec::new();
        let mut dim_start = Vec::with_capacity(n - 1);
        let mut index = HashMap::new();
        for (dim, labels) in per_dim.into_iter().enumerate() {
            dim_start.push(cells.len());
            for label in labels {
                let id = cells.len();
                index.insert(label.clone(), id);
                cells.push(Cell { id, dim, label });
            }
        }
        dim_start.push(cells.len());

        let mut faces: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
        let mut cofaces: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
        for cell in &cells {
            if cell.dim == 0 {
                continue;
            }
            let mut ids: Vec<usize> = cell
                .label
                .adjacent_merges()
                .into_iter()
                .filter_map(|merged| index.get(&merged).copied())
                .collect();
            ids.sort_unstable();
            ids.dedup();
            for &f in &ids {
                cofaces[f].push(cell.id);
            }
            faces[cell.id] = ids;
        }

        Ok(Self {
            linkage: linkage.clone(),
            cells,
            dim_start,
            index,
            faces,
            cofaces,
        })
    }

    pub fn linkage(&self) -> &Linkage {
        &self.linkage
    }

    pub fn n(&self) -> usize {
        self.linkage.n()
    }

    /// Dimension of the complex (`n - 3`).
    pub fn top_dim(&self) -> usize {
        self.linkage.n() - 3
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, id: usize) -> &Cell {
        &self.cells[id]
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cells_of_dim(&self, dim: usize) -> &[Cell] {
        &self.cells[self.dim_start[dim]..self.dim_start[dim + 1]]
    }

    pub fn facets(&self) -> &[Cell] {
        self.cells_of_dim(self.top_dim())
    }

    pub fn lookup(&self, label: &CyclicPartition) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Codimension-1 faces of a cell.
    pub fn faces_of(&self, id: usize) -> &[usize] {
        &self.faces[id]
    }

    /// Codimension-1 cofaces of a cell.
    pub fn cofaces_of(&self, id: usize) -> &[usize] {
        &self.cofaces[id]
    }

    /// Per-dimension cell counts.
    pub fn f_vector(&self) -> Vec<usize> {
        (0..=self.top_dim())
            .map(|d| self.dim_start[d + 1] - self.dim_start[d])
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &count)| {
                if d % 2 == 0 {
                    count as i64
                } else {
                    -(count as i64)
                }
            })
            .sum()
    }

    /// Connected components of the poset graph (equivalently of the facet
    /// adjacency graph: every cell refines down to a vertex).
    pub fn connected_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.cells.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (id, faces) in self.faces.iter().enumerate() {
            for &f in faces {
                let (a, b) = (find(&mut parent, id), find(&mut parent, f));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let mut roots = BTreeSet::new();
        for id in 0..self.cells.len() {
            roots.insert(find(&mut parent, id));
        }
        roots.len()
    }

    /// For every cell, the number of incidence paths of length two down to
    /// each codim-2 cell. Used by both the boundary-square and the diamond
    /// checks.
    fn two_step_counts(&self, id: usize) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for &f in &self.faces[id] {
            for &g in &self.faces[f] {
                *counts.entry(g).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Verify that the mod-2 boundary squares to zero.
    pub fn check_boundary_square(&self) -> Result<(), ComplexError> {
        for cell in &self.cells {
            if cell.dim < 2 {
                continue;
            }
            for (lower, count) in self.two_step_counts(cell.id) {
                if count % 2 != 0 {
                    return Err(ComplexError::BoundarySquareNonzero {
                        cell: cell.id,
                        lower,
                    });
                }
            }
        }
        Ok(())
    }

    /// Verify the diamond property: between a cell and any codim-2 cell in
    /// its closure lie exactly two intermediate cells. Also confirms the
    /// two-step descent reaches exactly the refinement-related pairs.
    pub fn check_diamond_property(&self) -> Result<(), ComplexError> {
        for cell in &self.cells {
            if cell.dim < 2 {
                continue;
            }
            let counts = self.two_step_counts(cell.id);
            for (&lower, &count) in &counts {
                if count != 2 {
                    return Err(ComplexError::DiamondViolation {
                        upper: cell.id,
                        lower,
                        count,
                    });
                }
            }
            for lower in self.cells_of_dim(cell.dim - 2) {
                let related = cell.label.refines(&lower.label)?;
                let reached = counts.contains_key(&lower.id);
                if related != reached {
                    return Err(ComplexError::DiamondViolation {
                        upper: cell.id,
                        lower: lower.id,
                        count: usize::from(reached),
                    });
                }
            }
        }
        Ok(())
    }

    /// Mod-2 Betti numbers from the cellular chain complex. Fails if the
    /// boundary does not square to zero (an incidence bug). Boundary ranks
    /// run on dense bitsets up to about 1e5 incidences and switch to sparse
    /// elimination beyond that.
    pub fn betti_mod2(&self) -> Result<Vec<usize>, ComplexError> {
        const DENSE_NONZERO_LIMIT: usize = 100_000;
        self.check_boundary_square()?;
        let top = self.top_dim();
        let f = self.f_vector();
        // ranks[d] = rank of the boundary map from dimension d to d-1
        let mut ranks = vec![0usize; top + 2];
        #[allow(clippy::needless_range_loop)]
        for d in 1..=top {
            let rows = self.dim_start[d + 1] - self.dim_start[d];
            let cols = self.dim_start[d] - self.dim_start[d - 1];
            let nonzeros: usize = self
                .cells_of_dim(d)
                .iter()
                .map(|c| self.faces[c.id].len())
                .sum();
            ranks[d] = if nonzeros <= DENSE_NONZERO_LIMIT {
                let mut matrix = BitMatrix::new(rows, cols);
                for (r, cell) in self.cells_of_dim(d).iter().enumerate() {
                    for &face in &self.faces[cell.id] {
                        matrix.set(r, face - self.dim_start[d - 1]);
                    }
                }
                matrix.rank()
            } else {
                let sparse: Vec<Vec<usize>> = self
                    .cells_of_dim(d)
                    .iter()
                    .map(|cell| {
                        self.faces[cell.id]
                            .iter()
                            .map(|&face| face - self.dim_start[d - 1])
                            .collect()
                    })
                    .collect();
                sparse_gf2_rank(&sparse)
            };
        }
        Ok((0..=top).map(|d| f[d] - ranks[d] - ranks[d + 1]).collect())
    }

    /// Vertex ids (0-cells) in the closure of every cell, bottom-up.
    pub fn closure_vertex_sets(&self) -> Vec<BTreeSet<usize>> {
        let mut sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.cells.len()];
        for cell in &self.cells {
            if cell.dim == 0 {
                sets[cell.id].insert(cell.id);
            } else {
                let mut set = BTreeSet::new();
                for &f in &self.faces[cell.id] {
                    set.extend(sets[f].iter().copied());
                }
                sets[cell.id] = set;
            }
        }
        sets
    }

    /// All cells in the closed upper interval above `id` (cells whose label
    /// refines this cell's label), including `id` itself.
    pub fn upper_interval(&self, id: usize) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(c) = stack.pop() {
            if seen.insert(c) {
                stack.extend(self.cofaces[c].iter().copied());
            }
        }
        seen.into_iter().collect()
    }

    /// Part sizes of a vertex label and the number of facets containing the
    /// vertex, verified against the vertex-figure product formula k!l!m!.
    pub fn vertex_figure_signature(
        &self,
        vertex: usize,
    ) -> Result<(Vec<usize>, usize), ComplexError> {
        let cell = &self.cells[vertex];
        if cell.dim != 0 {
            return Err(ComplexError::NotAVertex(vertex));
        }
        let sizes: Vec<usize> = cell.label.parts().iter().map(|p| p.len()).collect();
        let expected: usize = sizes.iter().map(|&s| factorial(s)).product();
        let top = self.top_dim();
        let found = self
            .upper_interval(vertex)
            .into_iter()
            .filter(|&c| self.cells[c].dim == top)
            .count();
        if found != expected {
            return Err(ComplexError::VertexFigureMismatch {
                vertex,
                expected,
                found,
            });
        }
        if !self.face_figure_check(vertex)? {
            return Err(ComplexError::VertexFigureMismatch {
                vertex,
                expected,
                found: usize::MAX,
            });
        }
        Ok((sizes, found))
    }

    /// Check that the interval above a cell is isomorphic to the product of
    /// the face lattices of one permutohedron per part: cells above
    /// correspond to tuples of ordered partitions refining the parts
    /// independently, and the order relation is the product order.
    pub fn face_figure_check(&self, id: usize) -> Result<bool, ComplexError> {
        let label = &self.cells[id].label;
        let parts = label.parts();
        // Every tuple of ordered partitions of the parts, spliced in place
        // of the parts, must be a cell above; and nothing else may be.
        let choices: Vec<Vec<OrderedPartition>> =
            parts.iter().map(|p| ordered_partitions_of(p)).collect();
        let mut tuple_cells: Vec<(Vec<usize>, usize)> = Vec::new();
        let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
        while let Some(choice) = stack.pop() {
            if choice.len() == parts.len() {
                let mut spliced: Vec<Vec<usize>> = Vec::new();
                for (part_idx, &c) in choice.iter().enumerate() {
                    for sub in choices[part_idx][c].parts() {
                        spliced.push(sub.clone());
                    }
                }
                let refined = CyclicPartition::new(spliced, label.ground_size())?;
                match self.lookup(&refined) {
                    Some(cell) => tuple_cells.push((choice, cell)),
                    None => return Ok(false),
                }
                continue;
            }
            let part_idx = choice.len();
            for c in (0..choices[part_idx].len()).rev() {
                let mut next = choice.clone();
                next.push(c);
                stack.push(next);
            }
        }
        // Exactly the upper interval, no repeats.
        let interval = self.upper_interval(id);
        let mut seen: Vec<usize> = tuple_cells.iter().map(|(_, c)| *c).collect();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != tuple_cells.len() || seen != interval {
            return Ok(false);
        }
        // Product order matches the refinement order.
        for (choice_a, cell_a) in &tuple_cells {
            for (choice_b, cell_b) in &tuple_cells {
                let product_le = choice_a
                    .iter()
                    .zip(choice_b)
                    .enumerate()
                    .all(|(i, (&a, &b))| linear_refines(&choices[i][a], &choices[i][b]));
                let poset_le = self.cells[*cell_a]
                    .label
                    .refines(&self.cells[*cell_b].label)?;
                if product_le != poset_le {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Apply an index relabeling to every cell; returns the induced map on
    /// cell ids if it is an automorphism of the poset, `None` otherwise.
    pub fn relabeling_automorphism(&self, sigma: &[usize]) -> Option<Vec<usize>> {
        let mut map = vec![usize::MAX; self.cells.len()];
        for cell in &self.cells {
            let image = cell.label.relabeled(sigma).ok()?;
            map[cell.id] = self.lookup(&image)?;
        }
        let mut seen = vec![false; self.cells.len()];
        for &m in &map {
            if seen[m] {
                return None;
            }
            seen[m] = true;
        }
        for cell in &self.cells {
            let mut mapped: Vec<usize> = self.faces[cell.id].iter().map(|&f| map[f]).collect();
            mapped.sort_unstable();
            if mapped != self.faces[map[cell.id]] {
                return None;
            }
        }
        Some(map)
    }

    /// JSON export: `{n, lengths, cells, incidence}` with labels in
    /// canonical form and stable field order.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n": self.n(),
            "lengths": self
                .linkage
                .lengths()
                .iter()
                .map(rational_to_string)
                .collect::<Vec<_>>(),
            "cells": self.cells,
            "incidence": self.faces,
        })
    }

    /// Deliberately break one incidence entry. Fault-injection hook for the
    /// verification suite tests; never called by library code.
    #[doc(hidden)]
    pub fn corrupt_incidence_for_tests(&mut self) {
        if let Some(faces) = self.faces.iter_mut().find(|f| !f.is_empty()) {
            faces.pop();
        }
    }
}

pub fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// The forgetting projection from the complex of `L' = L ++ (eps)` onto the
/// complex of `L`: delete the extra index from every label. Returns the
/// cell-id map after verifying it is well-defined and monotone.
pub fn forget_projection(
    extended: &CellComplex,
    base: &CellComplex,
) -> Result<Vec<usize>, ComplexError> {
    let n = base.n();
    if extended.n() != n + 1 || extended.linkage().lengths()[..n] != base.linkage().lengths()[..] {
        return Err(ComplexError::ProjectionLengthMismatch);
    }
    let mut map = Vec::with_capacity(extended.cell_count());
    for cell in extended.cells() {
        let image = cell.label.delete_index(n + 1)?;
        let target = base
            .lookup(&image)
            .ok_or_else(|| ComplexError::ProjectionNotAdmissible(image.to_string()))?;
        map.push(target);
    }
    // Monotone: codim-1 incidence maps to (possibly equal) closure relations.
    for cell in extended.cells() {
        for &face in extended.faces_of(cell.id) {
            let upper = &base.cell(map[cell.id]).label;
            let lower = &base.cell(map[face]).label;
            if !upper.refines(lower)? {
                return Err(ComplexError::ProjectionNotAdmissible(lower.to_string()));
            }
        }
    }
    Ok(map)
}

/// Block substitution into the equilateral complex: edge `i` expands to a
/// run of `l_i` consecutive unit edges. Works on labels; the image complex
/// need not be materialized.
#[derive(Clone, Debug)]
pub struct EquilateralEmbedding {
    /// blocks[i-1] = the target indices replacing source index i.
    blocks: Vec<Vec<usize>>,
    target_n: usize,
}

impl EquilateralEmbedding {
    pub fn new(linkage: &Linkage) -> Result<Self, ComplexError> {
        let mut blocks = Vec::with_capacity(linkage.n());
        let mut next = 1usize;
        for l in linkage.lengths() {
            if !l.is_integer() {
                return Err(ComplexError::NonIntegerLength(l.to_string()));
            }
            let len: usize = l
                .to_integer()
                .try_into()
                .map_err(|_| ComplexError::NonIntegerLength(l.to_string()))?;
            blocks.push((next..next + len).collect());
            next += len;
        }
        let target_n = next - 1;
        if target_n.is_multiple_of(2) {
            return Err(ComplexError::EvenTotalLength(target_n.to_string()));
        }
        Ok(Self { blocks, target_n })
    }

    pub fn target_n(&self) -> usize {
        self.target_n
    }

    /// The equilateral linkage `(1, ..., 1)` with `target_n` edges.
    pub fn target_linkage(&self) -> Linkage {
        let one = num_rational::BigRational::from_integer(1.into());
        Linkage::new(vec![one; self.target_n]).expect("equilateral n >= 3")
    }

    /// Map a label by replacing each part with the union of its blocks.
    pub fn map_label(&self, label: &CyclicPartition) -> Result<CyclicPartition, ComplexError> {
        let parts = label
            .parts()
            .iter()
            .map(|part| {
                part.iter()
                    .flat_map(|&i| self.blocks[i - 1].iter().copied())
                    .collect()
            })
            .collect();
        Ok(CyclicPartition::new(parts, self.target_n)?)
    }

    /// Check the embedding on a whole complex: admissibility of every image
    /// and preservation (both ways) of the refinement relation.
    pub fn check_complex(&self, complex: &CellComplex) -> Result<(), ComplexError> {
        let target = self.target_linkage();
        let images: Vec<CyclicPartition> = complex
            .cells()
            .iter()
            .map(|c| self.map_label(&c.label))
            .collect::<Result<_, _>>()?;
        let mut distinct: BTreeSet<&CyclicPartition> = BTreeSet::new();
        for image in &images {
            if !target.is_admissible(image)? {
                return Err(ComplexError::EmbeddingNotAdmissible(image.to_string()));
            }
            distinct.insert(image);
        }
        if distinct.len() != images.len() {
            return Err(ComplexError::EmbeddingNotAdmissible(
                "image labels collide".into(),
            ));
        }
        for a in complex.cells() {
            for b in complex.cells() {
                let source = a.label.refines(&b.label)?;
                let mapped = images[a.id].refines(&images[b.id])?;
                if source != mapped {
                    return Err(ComplexError::EmbeddingNotAdmissible(format!(
                        "incidence not preserved between {} and {}",
                        a.label, b.label
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkage::parse_lengths;

    fn complex(text: &str) -> CellComplex {
        CellComplex::build(&parse_lengths(text).unwrap()).unwrap()
    }

    #[test]
    fn two_circles() {
        let k = complex("1,1,1,1/2");
        assert_eq!(k.f_vector(), vec![6, 6]);
        assert_eq!(k.euler_characteristic(), 0);
        assert_eq!(k.connected_components(), 2);
        assert_eq!(k.betti_mod2().unwrap(), vec![2, 2]);
    }

    #[test]
    fn long_edge_sphere() {
        let k = complex("1,1,1,1,3.5");
        assert_eq!(k.f_vector(), vec![14, 36, 24]);
        assert_eq!(k.euler_characteristic(), 2);
        assert_eq!(k.connected_components(), 1);
        assert_eq!(k.betti_mod2().unwrap(), vec![1, 0, 1]);
    }

    #[test]
    fn torus() {
        let k = complex("1.2,1,1,0.8,2.2");
        assert_eq!(k.f_vector(), vec![18, 42, 24]);
        assert_eq!(k.euler_characteristic(), 0);
        assert_eq!(k.connected_components(), 1);
        assert_eq!(k.betti_mod2().unwrap(), vec![1, 2, 1]);
    }

    #[test]
    fn genus_four_surface() {
        let k = complex("1,1,1,1,1");
        assert_eq!(k.f_vector(), vec![30, 60, 24]);
        assert_eq!(k.euler_characteristic(), -6);
        assert_eq!(k.connected_components(), 1);
        assert_eq!(k.betti_mod2().unwrap(), vec![1, 8, 1]);
    }

    #[test]
    fn triangle_is_two_points() {
        let k = complex("3,4,5");
        assert_eq!(k.f_vector(), vec![2]);
        assert_eq!(k.connected_components(), 2);
        assert_eq!(k.betti_mod2().unwrap(), vec![2]);
    }

    #[test]
    fn non_generic_refused_without_override() {
        let l = parse_lengths("1,1,1,1").unwrap();
        assert!(matches!(
            CellComplex::build(&l),
            Err(ComplexError::NonGeneric)
        ));
        let k = CellComplex::build_with(
            &l,
            BuildOptions {
                allow_non_generic: true,
            },
        )
        .unwrap();
        // With ties admitted the square counts as admissible: {1,2} etc.
        assert_eq!(k.f_vector().len(), 2);
    }

    #[test]
    fn regularity_checks() {
        for text in ["1,1,1,1/2", "1,1,1,1,3.5", "1.2,1,1,0.8,2.2", "1,1,1,1,1"] {
            let k = complex(text);
            k.check_boundary_square().unwrap();
            k.check_diamond_property().unwrap();
        }
    }

    #[test]
    fn corrupted_incidence_detected() {
        let mut k = complex("1,1,1,1,1");
        k.corrupt_incidence_for_tests();
        assert!(k.check_boundary_square().is_err() || k.check_diamond_property().is_err());
    }

    #[test]
    fn vertex_figures() {
        let k = complex("1,1,1,1,1");
        for v in k.cells_of_dim(0) {
            let (sizes, count) = k.vertex_figure_signature(v.id).unwrap();
            let mut sorted = sizes.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, vec![1, 2, 2]);
            assert_eq!(count, 4);
        }
        // Long edge: vertex {1,2}{3,4}{5} has 2!2!1! = 4 incident facets.
        let k = complex("1,1,1,1,3.5");
        let v = k
            .lookup(&CyclicPartition::parse("1,2|3,4|5", 5).unwrap())
            .unwrap();
        let (_, count) = k.vertex_figure_signature(v).unwrap();
        assert_eq!(count, 4);

        let k3 = complex("3,4,5");
        let v = k3.cells_of_dim(0)[0].id;
        let (sizes, count) = k3.vertex_figure_signature(v).unwrap();
        assert_eq!(sizes, vec![1, 1, 1]);
        assert_eq!(count, 1);
    }

    #[test]
    fn face_figures() {
        // A facet's interval is a point.
        let k = complex("1,1,1,1,1");
        let facet = k.facets()[0].id;
        assert!(k.face_figure_check(facet).unwrap());
        // An edge with part sizes (2,1,1,1) has two facets above.
        let edge = k
            .lookup(&CyclicPartition::parse("1,2|3|4|5", 5).unwrap())
            .unwrap();
        assert_eq!(k.upper_interval(edge).len(), 3);
        assert!(k.face_figure_check(edge).unwrap());

        // The hexagonal face example: interval of ({1}{4}{235}) has the face
        // lattice of Pi_1 x Pi_1 x Pi_3 above it, with 6 facets.
        let k = complex("3,1,1,4,4");
        let c = k
            .lookup(&CyclicPartition::parse("1|4|2,3,5", 5).unwrap())
            .unwrap();
        assert!(k.face_figure_check(c).unwrap());
        let top = k.top_dim();
        let facets_above = k
            .upper_interval(c)
            .into_iter()
            .filter(|&x| k.cell(x).dim == top)
            .count();
        assert_eq!(facets_above, 6);
    }

    #[test]
    fn forgetting_projection() {
        let base = complex("1,1,1,1/2");
        let extended = complex("1,1,1,1/2,1/100");
        let map = forget_projection(&extended, &base).unwrap();
        // Spot checks from the construction.
        let c = extended
            .lookup(&CyclicPartition::parse("1|2|3|4|5", 5).unwrap())
            .unwrap();
        assert_eq!(
            base.cell(map[c]).label,
            CyclicPartition::parse("1|2|3|4", 4).unwrap()
        );
        let c = extended
            .lookup(&CyclicPartition::parse("1|2|3|4,5", 5).unwrap())
            .unwrap();
        assert_eq!(
            base.cell(map[c]).label,
            CyclicPartition::parse("1|2|3|4", 4).unwrap()
        );
        // Surjective on facets.
        let image: BTreeSet<usize> = extended.facets().iter().map(|f| map[f.id]).collect();
        for facet in base.facets() {
            assert!(image.contains(&facet.id));
        }
    }

    #[test]
    fn projection_rejects_mismatched_linkages() {
        let base = complex("1,1,1,1/2");
        let other = complex("1,1,1,1,1");
        assert!(matches!(
            forget_projection(&other, &base),
            Err(ComplexError::ProjectionLengthMismatch)
        ));
    }

    #[test]
    fn equilateral_embedding_labels() {
        // (2,2,2,1): the scaled two-circles linkage, total 7.
        let l = parse_lengths("2,2,2,1").unwrap();
        let emb = EquilateralEmbedding::new(&l).unwrap();
        assert_eq!(emb.target_n(), 7);
        let label = CyclicPartition::parse("1|2|3|4", 4).unwrap();
        assert_eq!(
            emb.map_label(&label).unwrap(),
            CyclicPartition::parse("1,2|3,4|5,6|7", 7).unwrap()
        );

        let l = parse_lengths("3,1,1,4,4").unwrap();
        let emb = EquilateralEmbedding::new(&l).unwrap();
        assert_eq!(emb.target_n(), 13);
        let label = CyclicPartition::parse("1|4|2,3,5", 5).unwrap();
        assert_eq!(
            emb.map_label(&label).unwrap(),
            CyclicPartition::parse("1,2,3|6,7,8,9|4,5,10,11,12,13", 13).unwrap()
        );

        // Equilateral input maps identically.
        let l = parse_lengths("1,1,1,1,1").unwrap();
        let emb = EquilateralEmbedding::new(&l).unwrap();
        let label = CyclicPartition::parse("1|3|2|4|5", 5).unwrap();
        assert_eq!(emb.map_label(&label).unwrap(), label);
    }

    #[test]
    fn equilateral_embedding_checks() {
        let l = parse_lengths("2,2,2,1").unwrap();
        let k = CellComplex::build(&l).unwrap();
        let emb = EquilateralEmbedding::new(&l).unwrap();
        emb.check_complex(&k).unwrap();

        let k5 = complex("3,1,1,4,4");
        let emb5 = EquilateralEmbedding::new(k5.linkage()).unwrap();
        emb5.check_complex(&k5).unwrap();
    }

    #[test]
    fn embedding_rejects_bad_lengths() {
        let l = parse_lengths("1,1,1,1/2").unwrap();
        assert!(matches!(
            EquilateralEmbedding::new(&l),
            Err(ComplexError::NonIntegerLength(_))
        ));
        let l = parse_lengths("2,2,2,2,2").unwrap();
        assert!(matches!(
            EquilateralEmbedding::new(&l),
            Err(ComplexError::EvenTotalLength(_))
        ));
    }

    #[test]
    fn meet_matches_vertex_intersection() {
        use crate::partition::meet;
        let k = complex("1,1,1,1/2");
        let vertex_sets = k.closure_vertex_sets();
        for a in k.cells() {
            for b in k.cells() {
                let inter: BTreeSet<usize> = vertex_sets[a.id]
                    .intersection(&vertex_sets[b.id])
                    .copied()
                    .collect();
                match meet(&a.label, &b.label, k.linkage()).unwrap() {
                    Some(m) => {
                        let cell = k.lookup(&m).expect("meet is a cell");
                        assert_eq!(inter, vertex_sets[cell]);
                    }
                    None => assert!(inter.is_empty()),
                }
            }
        }
    }

    #[test]
    fn json_export_shape() {
        let k = complex("1,1,1,1/2");
        let v = k.to_json();
        assert_eq!(v["n"], 4);
        assert_eq!(v["lengths"][3], "1/2");
        assert_eq!(v["cells"].as_array().unwrap().len(), 12);
        assert_eq!(v["incidence"].as_array().unwrap().len(), 12);
        // Edges have two endpoints each here.
        let edge = &v["incidence"][6];
        assert_eq!(edge.as_array().unwrap().len(), 2);
    }
}
