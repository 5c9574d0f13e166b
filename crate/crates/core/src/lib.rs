//! Hat-flavored knot Floer homology at desk scale: GF(2) homological
//! algebra, mapping cones, combinatorial Heegaard diagrams, grid diagrams,
//! classical knot polynomials, Legendrian fronts and contact surgery rules.

pub mod cone;
pub mod diagram;
pub mod gf2;
pub mod grid;
pub mod knotpoly;
pub mod legendrian;
pub mod ranks;
pub mod surgery;
