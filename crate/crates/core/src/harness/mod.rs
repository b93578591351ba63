//! Experiment runs over instance sets and the artifacts built from them.

pub mod dataset;
pub mod export;
pub mod matrix;
pub mod report;

pub use dataset::{
    format_real, label_of, label_rows, read_dataset, read_dataset_from, read_results, read_results_from, round12,
    write_dataset, write_dataset_to, write_results, write_results_to, DatasetCell, DatasetRow, Labeled, DATASET_HEADER,
};
pub use export::export_instance;
pub use matrix::{
    load_instances, read_journal, run_matrix, run_matrix_on, JournalRecord, MatrixOptions, ResultRow, SolverCell,
};
pub use report::{
    summarize_means, summarize_status, write_means, write_status_counts, CellMeans, MeansRow, StatusCounts,
    TIMEOUT_MARKER,
};
