use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{role} timed out waiting for message {tag} from {from}")]
    Timeout {
        role: String,
        tag: u32,
        from: String,
    },

    #[error("unknown role `{0}`")]
    UnknownRole(String),

    #[error("{role} rejected message {tag}: verification failed")]
    VerificationFailed { role: String, tag: u32 },

    #[error("certificate for {subject} is {age} s old, outside the {window} s window")]
    StaleCertificate {
        subject: String,
        age: u64,
        window: u64,
    },

    #[error("malformed message: {0}")]
    Protocol(String),

    #[error("aborted after another role failed")]
    Aborted,

    #[error("role panicked: {0}")]
    Panicked(String),

    #[error(transparent)]
    Crypto(#[from] secalgo::Error),
}

impl From<secalgo::codec::CodecError> for HarnessError {
    fn from(e: secalgo::codec::CodecError) -> Self {
        HarnessError::Protocol(e.to_string())
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
