//! Bit-exact file formats: PCM16 WAV audio, portable bitmaps, the binary
//! watermark key file, and CSV evaluation reports.

mod key;
mod pbm;
mod report;
mod wav;

pub use key::{read_key, write_key, KeyFile, KEY_MAGIC, KEY_VERSION};
pub use pbm::{read_pbm, write_pbm, write_pbm_p1};
pub use report::{write_feature_dump, write_report, CellStatus, EvalCell};
pub use wav::{read_wav, write_wav};

use crate::clip::ClipError;
use crate::watermark::WatermarkError;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: malformed WAV: {reason}")]
    MalformedWav { path: PathBuf, reason: String },
    #[error("{path}: malformed PBM: {reason}")]
    MalformedPbm { path: PathBuf, reason: String },
    #[error("{path}: malformed key file: {reason}")]
    MalformedKey { path: PathBuf, reason: String },
    #[error("report needs at least one result row")]
    EmptyReport,
    #[error(transparent)]
    Clip(#[from] ClipError),
    #[error(transparent)]
    Watermark(#[from] WatermarkError),
}

impl IoError {
    pub(crate) fn file(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::File {
            path: path.to_path_buf(),
            source,
        }
    }
}
