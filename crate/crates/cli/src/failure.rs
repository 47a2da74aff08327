use serde_json::{json, Value};

/// Domain errors come from the library and exit with 1; usage errors
/// (bad flags, unreadable or malformed input files) exit with 2.
#[derive(Debug)]
pub enum Failure {
    Domain(mmqo::Error),
    Usage { code: &'static str, message: String, context: Value },
}

impl From<mmqo::Error> for Failure {
    fn from(e: mmqo::Error) -> Self {
        Failure::Domain(e)
    }
}

impl Failure {
    pub fn usage(code: &'static str, message: impl Into<String>, context: Value) -> Self {
        Failure::Usage { code, message: message.into(), context }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Usage { .. } => 2,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Failure::Domain(e) => e.to_json(),
            Failure::Usage { code, message, context } => json!({ "code": code, "message": message, "context": context }),
        }
    }
}
