//! Weighted graphs, their Laplacian matrices and the hyperacute simplices
//! they correspond to.
//!
//! The crate covers effective resistances and the resistance matrix, the
//! bordered identity linking that matrix to the Laplacian, Kron reduction by
//! Schur complement, simplex geometry (embedding, canonical Gram matrices,
//! dihedral angles, faces, circumsphere, volume) and metric checks.

pub mod cli;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod resistance;
pub mod schur;
pub mod simplex;
pub mod tolerance;

pub use error::{Error, Result};
pub use graph::{
    build_laplacian, graph_from_laplacian, parse_graph, spanning_tree_count, validate_laplacian, LaplacianMatrix,
    LaplacianProperty, ValidationReport, WeightedGraph,
};
pub use linalg::{determinant, eigh, laplacian_pseudoinverse, EigenDecomposition, SymmetricMatrix};
pub use resistance::{
    bordered_distance_matrix, check_metric, effective_resistance, fiedler_blocks, inverse_resistance_matrix,
    resistance_matrix, verify_fiedler_identity, verify_identity_general, FiedlerBlocks, IdentityResidual, MetricMode,
    MetricReport, ResistanceMatrix,
};
pub use schur::{
    check_quotient, check_resistance_preservation, kron_reduce_single, schur_complement, schur_via_pinv, Partition,
    QuotientReport, Reduction,
};
pub use simplex::{
    canonical_gram, cayley_menger_volume, circumsphere_check, dihedral_angles, embed_from_laplacian, face_distance,
    face_gram, is_hyperacute, AngleClassification, AngleKind, GramPair, SimplexEmbedding, SquaredDistanceMatrix,
};
pub use tolerance::Tolerances;
