//! Scenario runner behind the `paramp` binary: figure presets, parameter
//! sweeps and oracle checks, all written as CSV against `gt`.

pub mod figures;
pub mod runs;
pub mod scenario;
pub mod table;

pub use scenario::{Grid, InitialState, Observable, Scenario, Series};
pub use table::Table;
