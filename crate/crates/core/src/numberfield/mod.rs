//! Exact arithmetic in the fields `Q(alpha_i)` of the special Pisot numbers.

mod element;
mod field;
mod registry;

pub use element::{beta_of, sign_at_dominant_root, verify_dependency, Conjugate, FieldElement};
pub use field::{field, NumberField};
pub use registry::{registry, registry_lookup, unit_indices, MinimalPolynomial, SpecialPisotRecord};
