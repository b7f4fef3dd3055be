//! Fast-reaction predator-prey systems and their cross-diffusion limits.
//!
//! The crate covers pointwise kinetics ([`model`]), homogeneous equilibria
//! ([`equilibria`]), linear Turing analysis ([`turing`]), finite-difference
//! simulation ([`pde`]) and the epsilon-sweep harness ([`convergence`]).

pub mod convergence;
pub mod equilibria;
pub mod error;
pub mod model;
pub mod params;
pub mod pde;
pub mod turing;

pub use error::{Error, Result};
pub use model::{AuxQuantities, EvalMode, Exchange, LimitKinetics, PredatorSplit};
pub use params::{dimensionalize, nondimensionalize, ModelParams, NondimMap, NondimParams};
pub use convergence::{epsilon_sweep, rate_fit, ConvergenceReport, RateFit, SweepSetup};
pub use equilibria::{classify_equilibria, classify_holling, coexistence_dimensional, Classification, Equilibrium, EquilibriumKind, JacobianStar, StabilityReport};
pub use pde::grid::Grid;
pub use pde::limit::LimitState;
pub use pde::micro::MicroState;
pub use pde::{simulate, InitialSplit, SimState, Simulation, SolverConfig, System, TimeSeries};
pub use turing::{parameter_scan, ScanAxis, ScanBase, ScanCell, ScanLabel};
pub use turing::{compare_regions, Interval, Linearization, RegionComparison, TuringCase};
