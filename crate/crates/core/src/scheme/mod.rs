//! The nonlinear DDFV scheme: parameters, residual and Jacobian, energy
//! functionals, initial data projection and time stepping.

mod functionals;
mod params;
mod projection;
mod system;
mod time;

pub use functionals::{
    dissipation, dissipation_b, energy, entropy_density, fisher_norm, mass, penalization_term, relative_energy,
    split_masses, stationary_state, stationary_state_split,
};
pub use params::{Potential, SchemeParams};
pub use projection::{project_initial, project_potential, NEGATIVE_MEAN_TOL};
pub use system::Scheme;
pub use time::{RunFailure, RunReport, StateRecord, ENERGY_SLACK, MASS_TOL};
