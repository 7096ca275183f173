//! Pseudo-Riemannian geometry induced by a transportation cost on a product
//! of coordinate charts: the cross-derivative metric, its Christoffel symbols
//! and curvature, cost exponentials and their vertical/horizontal geodesics,
//! regularity classification with maximum-principle and contact-connectivity
//! checks, and a semidiscrete transport solver with c-convex analysis.

pub mod cost;
pub mod dual;
pub mod envelopes;
pub mod error;
pub mod geodesics;
pub mod geometry;
pub mod regularity;
pub mod report;

pub use cost::{
    CostChart, CostFunction, CostSpec, Covector, CrossHessian, DerivMode, DomainSpec, MultiIndex,
    NormHints, Side, TangentVector,
};
pub use error::{Error, Result};
