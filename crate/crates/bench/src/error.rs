use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config: {0}")]
    Config(String),
    #[error("cell {cell}: {source}")]
    Cell {
        cell: String,
        #[source]
        source: gfk_mimo::Error,
    },
    #[error(transparent)]
    Core(#[from] gfk_mimo::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, BenchError>;

pub(crate) fn config_err(msg: impl Into<String>) -> BenchError {
    BenchError::Config(msg.into())
}
