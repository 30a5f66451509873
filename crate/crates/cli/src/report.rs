//! Report envelope and error-to-exit-code mapping. Every invocation
//! prints exactly one JSON document; with identical inputs and seed the
//! bytes are identical, which is what the golden files rely on.

use serde::Serialize;
use serde_json::Value;

use agres::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug, Serialize)]
pub struct Envelope {
    pub command: String,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario_sha256: Option<String>,
    pub exit: i32,
    pub result: Value,
}

pub fn envelope(
    command: &str,
    seed: Option<u64>,
    scenario_sha256: Option<String>,
    exit: i32,
    result: Value,
) -> Envelope {
    Envelope {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION"),
        seed,
        scenario_sha256,
        exit,
        result,
    }
}

/// A failed command: exit code plus a machine-readable error object.
#[derive(Debug)]
pub struct CmdError {
    pub exit: i32,
    pub kind: String,
    pub message: String,
}

impl CmdError {
    pub fn schema(message: String) -> Self {
        CmdError {
            exit: EXIT_SCHEMA,
            kind: "schema".into(),
            message,
        }
    }

    pub fn precondition(kind: &str, message: String) -> Self {
        CmdError {
            exit: EXIT_PRECONDITION,
            kind: kind.into(),
            message,
        }
    }

    pub fn verification(message: String) -> Self {
        CmdError {
            exit: EXIT_VERIFICATION,
            kind: "verification".into(),
            message,
        }
    }

    pub fn to_value(&self) -> Value {
        serde_json::json!({
            "error": { "kind": self.kind, "message": self.message }
        })
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::Uncertified { .. } => "uncertified-intersection",
            Error::NonRationalPoint => "non-rational-point",
            Error::NotRectifying(_) => "not-rectifying",
            Error::SupportMeetsPoints => "support-meets-points",
            Error::NotOnIntersection => "not-on-intersection",
            Error::SearchExhausted { .. } => "search-exhausted",
            Error::NotRegular { .. } => "not-regular",
            Error::Internal(_) => "internal",
            Error::Parse { .. } => "parse",
            _ => "precondition",
        };
        CmdError::precondition(kind, e.to_string())
    }
}
