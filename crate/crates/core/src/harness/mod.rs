//! Convergence sweeps driven by a flat config file, CSV output, order fits
//! and a small integral-equation demo.

mod bie;
pub mod checks;
mod config;
mod fit;
mod sweep;

pub use bie::{demo_bie, BieParams, BieRadius, BieReport};
pub use config::{label, parse_geometry, parse_target, target_label, Coupling, SweepConfig};
pub use fit::{fit_order, OrderFit, ERROR_FLOOR};
pub use sweep::{
    parse_csv, reference_base, run_sweep, write_csv, RowStatus, SweepRecord, CSV_HEADER,
};
