pub mod action;
pub mod model;
pub mod quadrature;
pub mod quantization;
pub mod spectral;
pub mod wkb;
pub mod harness;
