//! Homology, cohomology and the verifiers built on them.

pub mod duality;
pub mod homology;
pub mod maps;
pub mod report;
pub mod sequences;
pub mod suite;
pub mod uct;

pub use duality::{verify_commutative_diagram, verify_duality};
pub use homology::{cohomology, homology, loops_homologous, relative_homology, HomologySummary};
pub use maps::{
    exp_alpha, frustration_class, kappa, link_mod2, two_cochain_phi, vartheta, wall_components, zeta,
    DomainWallSet, FrustrationClass,
};
pub use report::{Check, Report};
pub use sequences::{verify_cohomology_exactness, verify_homology_exactness};
pub use suite::{verify_instance, verify_linking};
pub use uct::verify_universal_coefficients;
