//! Exact continued-fraction arithmetic, the hyperbola criterion for bounded
//! partial quotients, bounded-quotient set enumeration, the folding
//! construction for prime-power denominators, large-deviation sampling for
//! random quotients, and small-scale SL2 experiments.

pub mod cf;
pub mod deviations;
pub mod error;
pub mod folding;
pub mod korobov;
pub mod sl2;
pub mod smallcf;
pub mod zm;

pub use error::{Error, Result};
