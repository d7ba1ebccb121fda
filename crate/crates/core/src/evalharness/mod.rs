//! Experimental protocols (in-session cross-validation and out-of-session
//! evaluation), the guess-yes and linear baselines, and report writers.

mod linear;
mod metrics;
mod protocol;
mod report;

pub use linear::LinearBaseline;
pub use metrics::{accuracy, guess_yes};
pub use protocol::{
    fit, run_in_session_cv, run_out_of_session, EvalResult, Experiment, Fitted, Setting, TestBlock,
};
pub use report::{
    read_results, render_csv, render_json, render_table, sort_results, write_report, ReportFiles,
    CSV_HEADER,
};
