//! Equal-area double bubbles in the Grushin plane with the contact interface
//! constrained to a coordinate axis.
//!
//! The crate computes the closed-form minimizers for vertical and horizontal
//! interfaces, the isoperimetric profile they are built from, the horizontal
//! rearrangement of polyhedral sets that drives the existence argument, and an
//! independent discretized minimizer used to cross-check the closed forms.

pub mod error;
pub mod geometry;
pub mod horizontal;
pub mod isoperimetric;
pub mod quadrature;
pub mod rearrange;
pub mod variational;
pub mod vertical;

pub use error::{Error, Result};
pub use geometry::{Alpha, Point, SampledProfile};

pub use isoperimetric::IsoperimetricProfile;
pub use horizontal::HorizontalBubble;
pub use vertical::VerticalBubble;
pub use quadrature::QuadratureSpec;

