use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exhaustive enumeration of {count} subsets exceeds the limit of {limit}")]
    EnumerationLimit { count: u128, limit: u128 },

    /// The delay-QoS requirement of `user` cannot be met even with every BS
    /// transmitting at full power.
    #[error("infeasible: user {user} needs {required:.4} nats/frame but at most {c_max:.4} is supported")]
    Infeasible {
        user: usize,
        c_max: f64,
        required: f64,
    },

    #[error("numerical fault: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
