use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("level {requested} exceeds the cap of {cap} for {what}")]
    LevelCap {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("coefficient a_{index} is zero; ratio undefined")]
    ZeroCoefficient { index: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole proximity: {0}")]
    PoleProximity(String),

    #[error("inconclusive at current precision ({precision} bits): {detail}; raise the precision")]
    Inconclusive { precision: u32, detail: String },

    #[error("no sign change: d({lo}) has sign {sign_lo:+} and d({hi}) has sign {sign_hi:+}")]
    NoSignChange {
        lo: String,
        hi: String,
        sign_lo: i8,
        sign_hi: i8,
    },

    #[error("precision ceiling reached at {precision} bits: {detail}")]
    PrecisionCeiling { precision: u32, detail: String },

    #[error("cannot certify: {0}")]
    CannotCertify(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
