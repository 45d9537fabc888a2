use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{key} = {value} is out of range (expected {expected})")]
    OutOfRange {
        key: &'static str,
        value: String,
        expected: &'static str,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("event at t={time} precedes the simulation clock t={clock}")]
    InPast { time: f64, clock: f64 },
    #[error("event time {0} is not a finite number")]
    NotFinite(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CryptoError {
    #[error("the two primes must differ")]
    EqualPrimes,
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("public exponent shares a factor with the totient")]
    ExponentNotCoprime,
    #[error("public exponent must satisfy 1 < e < totient")]
    ExponentOutOfRange,
    #[error("value is not smaller than the modulus")]
    MessageTooLarge,
    #[error("key halves have different lengths ({0} vs {1} bytes)")]
    HalfLengthMismatch(usize, usize),
    #[error("ciphertext is too short to hold nonce and tag")]
    Truncated,
    #[error("authentication tag mismatch")]
    AuthenticationFailed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("run has zero duration")]
    ZeroDuration,
    #[error("no traffic: no data packets were sent")]
    NoTraffic,
    #[error("elapsed time must be positive")]
    ZeroElapsed,
}
