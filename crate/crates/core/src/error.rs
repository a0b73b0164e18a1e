use thiserror::Error;

/// Errors raised when inputs fall outside the domain of a computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is out of range (expected {expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("overlap matrix does not describe a symmetric state set: {0}")]
    Structure(String),

    #[error("invalid photon-number distribution: {0}")]
    Distribution(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            expected: "0 <= value <= 1",
        })
    }
}
