pub mod canon;
pub mod cyclotomic;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod oracle;
pub mod refinement;
pub mod sampling;
pub mod spectral;
pub mod walk;
pub mod wl2;
