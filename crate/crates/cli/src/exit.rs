use twistlab::Error;

pub const RUNTIME: u8 = 1;
pub const PARSE: u8 = 2;
pub const NORMALIZATION: u8 = 3;
pub const DIMENSION: u8 = 4;
pub const INVARIANT: u8 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(PARSE, message)
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self::new(RUNTIME, message)
    }

    pub fn dimension(message: impl Into<String>) -> Self {
        Self::new(DIMENSION, message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unnormalized { .. } => NORMALIZATION,
            Error::DimensionTooLarge { .. } => DIMENSION,
            Error::InvalidInput(_) | Error::Json(_) | Error::Io(_) | Error::ReferenceAmplitudeZero { .. } => PARSE,
            _ => RUNTIME,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::runtime(e.to_string())
    }
}
