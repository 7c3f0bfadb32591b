pub mod error;
pub(crate) mod fixed;
pub(crate) mod poly;
pub mod charring;
pub mod fusion;
pub mod genfun;
pub mod spectral;
pub mod theta;
pub mod limitfn;
pub mod tiltbound;
