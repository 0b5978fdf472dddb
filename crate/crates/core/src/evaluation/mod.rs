//! Cross-validated pipeline evaluation under a time budget.

mod budget;
mod cv;
mod log;
mod validity;

pub use self::log::{append_log, read_log, read_records, write_records, LogContents};
pub use budget::{seconds_to_us, us_to_seconds, Budget, Clock};
pub use cv::{charge_landmarkers, cross_validate, cross_validate_with, EvaluationRecord, FoldPlan, Status, DEFAULT_FOLDS};
pub use validity::{check_components, check_validity, InvalidReason, Validity};
