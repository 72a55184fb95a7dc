//! Problem files, built-in fixtures and result serialization.

mod problem;
mod svg;
mod table;

pub use problem::{builtin, load_problem, nonclosed4, parse_problem, Problem};
pub use svg::{emit_phase_svg, phase_svg};
pub use table::{emit_trajectory_csv, format_float, read_trajectory_csv, trajectory_csv, CsvTable};
