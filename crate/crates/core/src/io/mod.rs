pub mod dataset_dir;
pub mod npy;
pub mod report;

pub use dataset_dir::{read_dataset, write_dataset};
pub use npy::{read_npy, write_npy, NpyArray, NpyData, NpyDtype};
pub use report::{render_csv, render_json, write_report, ReportFormat};
