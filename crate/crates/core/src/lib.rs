pub mod concentration;
pub mod eigen;
pub mod ensemble;
pub mod error;
pub mod geometry;
pub mod lcd;
pub mod matrix;
pub mod nodal;
pub mod rng;
pub mod stats;
pub mod structure;
pub mod trials;
