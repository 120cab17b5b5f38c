//! Numerical audit of the a priori estimates: explicit constants, barrier
//! checks, sublevel profiles and the De Giorgi iteration.

pub mod barrier;
pub mod chain;
pub mod coupled;
pub mod degiorgi;
pub mod ledger;
pub mod linearized;
pub mod mean_value;
pub mod sup_bound;
pub mod young;

pub use chain::{ChainInputs, ConstantChain};
pub use ledger::{Ledger, LedgerEntry, Provenance};
