//! Small numerical kernels shared by the model: adaptive quadrature and bracketed root finding.

pub mod quad;
pub mod roots;

pub use quad::{integrate, integrate_fallible, Estimate, Tolerance};
pub use roots::{bisect_newton, scan_brackets};
