//! Exact combinatorics of planar polygonal linkages: the regular cell
//! complex on the moduli space, its topological invariants, the geometric
//! realization of the dual complex by surgery on the permutohedron, and
//! numeric planar witnesses for every cell.

pub mod complex;
pub mod exact;
pub mod linkage;
pub mod partition;
pub mod polytope;
pub mod realization;
pub mod verify;
pub mod witness;

pub use complex::{BuildOptions, Cell, CellComplex, ComplexError, EquilateralEmbedding};
pub use linkage::{parse_lengths, Linkage, LinkageError};
pub use partition::{enumerate_admissible, meet, CyclicPartition, PartitionError};
pub use polytope::{
    cyclic_facets, CyclicPolytopeFacets, OrderedPartition, PermutohedronLattice, PolytopeError,
};
pub use realization::{surgery, GeneratorSet, GeometricComplex, GeometricFace, RealizationError};
pub use witness::{convex_polygon, label_of, witness_of, PlanarConfiguration, WitnessError};
