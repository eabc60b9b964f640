pub mod catalog;
pub mod expr;
pub mod geom;
pub mod linalg;
pub mod model;
pub mod properties;
pub mod scalar;
pub mod screen;
pub mod triangle;
