//! Concurrent regenerating codes for erasure-coded distributed storage.
//!
//! - [`gf`]: exact arithmetic in prime fields F_p.
//! - [`matrix`]: dense matrices over F_p (rank, inverse, determinant, random).
//! - [`bounds`]: cut-set capacities, the storage-bandwidth tradeoff, and the
//!   single-repair / cooperative / MFR reference bounds, all in exact
//!   rational arithmetic.
//! - [`codec`]: an executable codec — distribute, reconstruct, concurrent
//!   multi-node repair, (n,k) -> (n+s,k) upgrade, MDS and strong-MDS checks.
//! - [`cluster`]: a deterministic scenario simulator with a bandwidth ledger.

pub mod bounds;
pub mod cluster;
pub mod codec;
pub mod gf;
pub mod matrix;
