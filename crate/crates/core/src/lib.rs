pub mod little;
pub mod eval;
pub mod solver;
pub mod features;
pub mod relate;
pub mod group;
pub mod livesync;
pub mod draw;
pub mod session;
