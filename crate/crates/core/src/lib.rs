//! Exact evaluation of equivariant Gromov-Witten series of Calabi-Yau
//! fivefolds with locally anti-diagonal torus actions, via the topological
//! vertex, and extraction of membrane indices by plethystic logarithm.

pub mod diagram;
pub mod evaluator;
pub mod examples;
pub mod partitions;
pub mod ring;
pub mod schur;
pub mod selftest;
pub mod series;
