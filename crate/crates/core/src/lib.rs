//! Connections, curvature, parallel transport, covering-projection lifts and
//! generalized Wilson lines on the smooth noncommutative torus.
//!
//! The algebra is modelled exactly as twisted Laurent polynomials in the
//! unitaries `u`, `v` (see [`algebra`]); forms, connections and transports
//! are built on top of it, and [`coverings`] / [`infinitecover`] provide the
//! deck-group side needed to turn transports into Wilson lines.

pub mod algebra;
pub mod connections;
pub mod coverings;
pub mod error;
pub mod exec;
pub mod forms;
pub mod infinitecover;
pub mod linalg;
pub mod scenario;

pub use algebra::{TorusElement, TorusParams, WeightVector};
pub use connections::{Connection, TransportOperator};
pub use coverings::{CoveringSpec, DeckElement};
pub use error::{Error, Result};
pub use exec::Exec;
