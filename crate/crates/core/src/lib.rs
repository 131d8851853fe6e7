//! Exact spectral radii of bipartite graphs, the phi_{s,t} family of sharp
//! degree-sequence upper bounds with equality-case detection, the extremal
//! constructions K_{p,q}^{[e]} and K_{p,q}^{{e}}, a row-sum scaling
//! certificate, and isomorphism-reduced exhaustive search over K(p,q,e).

pub mod bounds;
pub mod canonical;
pub mod error;
pub mod graph;
pub mod io;
pub mod search;
pub mod spectral;

pub use canonical::{CanonicalForm, labeled_orbit_size};
pub use error::{Error, Result};
pub use graph::{BipartiteGraph, Decomposition, DegreeProfile};
pub use search::{CellRecord, ConjectureVerdict, EnumerationSpec, SearchRecord, Verdict};
pub use spectral::{CertificateReport, QuotientMatrix, QuotientOf};
