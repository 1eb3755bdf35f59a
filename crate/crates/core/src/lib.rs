//! John-Nirenberg constants of BMO^p for p > 2.
//!
//! For an interval Q, BMO^p(Q) carries the norm
//! `sup_J <|phi - <phi>_J|^p>_J^{1/p}` over subintervals J, and the
//! John-Nirenberg constant eps0(p) is the largest threshold such that every
//! phi with norm below it has e^phi in A_infty. For p > 2 this constant
//! equals
//!
//! ```text
//! eps0(p) = [ (p/e) (Gamma(p) - int_0^1 t^{p-1} e^t dt) + 1 ]^{1/p}
//! ```
//!
//! and the crate computes it together with the finite-parameter machinery
//! behind it: the domain Omega_C between the curves x2 = e^{x1} and
//! x2 = C e^{x1}, the largest locally convex function on Omega_C with
//! boundary data |x1|^p along the lower curve, the foliation of Omega_C into
//! two tangential regimes, an affine patch and a chord-foliated cup, explicit
//! optimizing test functions with closed-form moments, and a verification
//! suite covering every numerically checkable identity and inequality of the
//! construction.

// Precondition guards are written as `!(x > 0.0)` on purpose: the negated
// form rejects NaN, which `x <= 0.0` would silently let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod candidate;
pub mod cup;
pub mod domain;
pub mod error;
pub mod optimizer;
pub mod quad;
pub mod special;
pub mod transition;
pub mod verify;

pub use domain::{Parameters, Point, SubdomainLabel};
pub use error::{Error, Result};
pub use quad::QuadratureConfig;
pub use transition::TransitionConstants;
