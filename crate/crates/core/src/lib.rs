//! Measurement dimension and information dimension of finite generalized
//! probabilistic theory systems, computed over exact rationals, together with
//! the boxworld constructions and protocols built on hypercube bits.

pub mod clique;
pub mod composition;
pub mod dimensions;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod protocols;
pub mod rational;
pub mod system;
pub mod thermo;

pub use error::{Error, Result};
pub use rational::Rational;
pub use system::{
    atomic_effect, evaluate, is_valid_effect, is_valid_measurement, make_classical, make_gbit,
    make_hypercube, mix, Effect, GbitLabel, GptSystem, Measurement, PureStateLabel, State,
    SystemShape,
};
