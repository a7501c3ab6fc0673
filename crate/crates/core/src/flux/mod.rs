//! Flux of field momentum and angular momentum through surfaces around the
//! worldline.

pub mod closed;
pub mod fit;
pub mod hyperplane;
pub mod quadrature;
pub mod sphere;
pub mod tube;

pub use quadrature::{gauss_legendre, integrate_adaptive, AdaptiveOptions, AdaptiveResult, CompensatedSum};
pub use sphere::{sphere_area, sphere_moments, AngularRule, SphereMoments, SphereNode, SphereQuadrature};
pub use tube::{surface_element, tube_flux_numeric, tube_rate, TubeFlux, TubeRate};
pub use closed::{
    bound_angular_momentum, bound_angular_terms, bound_momentum, bound_momentum_terms, coupling, flux_report,
    radiated_angular_rate, radiated_rate, radiated_spin_rate, radiative_angular_momentum, radiative_momentum, BoundAngularTerms,
    FluxReport, FluxResiduals,
};
pub use hyperplane::{hyperplane_bound_momentum, hyperplane_flux_oracle};
pub use fit::{fit_inverse_powers, loglog_slope, sweep_radius, BinExponent, RadiusSweep};
