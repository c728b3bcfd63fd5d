use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain the operation accepts.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// A precondition relating several arguments does not hold.
    #[error("contract violation: {0}")]
    Contract(String),
    /// A closed-form expression is undefined at the requested point.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} = {p} is not a probability in [0, 1]")))
    }
}
