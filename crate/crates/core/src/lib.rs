pub mod error;
pub mod grid;
pub mod params;
pub mod spectral;
pub mod stencil;

pub use error::{Error, Result};
pub use grid::{check_depth, discrete_norm, spatial_derivative, Differentiator, Grid1D, Norm, WaveField};
pub use params::ModelParams;
pub mod corrector;
pub mod jet;
pub mod ode;
pub mod oplab;
pub mod quadrature;
pub mod refwaves;
pub mod residuals;
pub mod solitary;
