pub mod means;
pub mod expr;
pub mod quadrature;
pub mod sampling;
pub mod convexity;
pub mod inequalities;
pub mod report;
