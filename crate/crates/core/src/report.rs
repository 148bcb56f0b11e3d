use serde::Serialize;
use serde_json::Value;

/// One verification outcome. Serializes as
/// `{"check":…,"params":…,"ok":…,"counterexample":…}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub params: Value,
    pub ok: bool,
    pub counterexample: Option<String>,
    /// Set when the check does not apply to this input.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl Report {
    pub fn pass(check: &str, params: Value) -> Self {
        Report {
            check: check.to_string(),
            params,
            ok: true,
            counterexample: None,
            skipped: None,
        }
    }

    pub fn skip(check: &str, params: Value, reason: impl Into<String>) -> Self {
        Report {
            skipped: Some(reason.into()),
            ..Report::pass(check, params)
        }
    }

    pub fn fail(check: &str, params: Value, counterexample: impl Into<String>) -> Self {
        Report {
            check: check.to_string(),
            params,
            ok: false,
            counterexample: Some(counterexample.into()),
            skipped: None,
        }
    }

    /// `pass` when `witness` is `None`, `fail` with that key otherwise.
    pub fn from_first_failure(check: &str, params: Value, witness: Option<String>) -> Self {
        match witness {
            None => Report::pass(check, params),
            Some(k) => Report::fail(check, params, k),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report encodes")
    }
}

/// True when every report passed.
pub fn all_ok(reports: &[Report]) -> bool {
    reports.iter().all(|r| r.ok)
}
