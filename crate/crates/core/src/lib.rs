//! Numerical toolkit for (G,f)-divergences, the mutual-information measures
//! they induce, subadditivity checking, and the bounds built on top of them.
//!
//! The crate is organised bottom-up:
//!
//! * [`probcore`]: finite distributions, channels, products and push-forwards.
//! * [`generators`]: f-generators, G-transforms, admissible pairs and `D_m(f)`.
//! * [`divergence`]: `D_f`, `G(D_f)` and the Rényi divergence.
//! * [`information`]: `I_{G,f}(X;Y)` as a convex program over output distributions.
//! * [`subadditivity`]: gap scans and the class checkers for `g = x² f''`.
//! * [`bounds`]: Fano-type, blocklength and hypothesis-testing bounds.
//! * [`exponent`]: the sphere-packing style exponent and a classical oracle.

pub mod bounds;
pub mod divergence;
pub mod error;
pub mod exponent;
pub mod generators;
pub mod information;
pub mod numeric;
pub mod probcore;
pub mod subadditivity;

pub use error::{Error, Result};
pub use generators::{
    catalog_lookup, dm_of, make_pair, AdmissiblePair, CatalogItem, Curvature, Curve, FGenerator,
    GTransform, GeneratorSpec, Normalization, Params,
};
pub use probcore::{Channel, Dist};
