use std::path::Path;

use fronts::report::{self, ScalarRepr};
use fronts::{Error, Tolerances};
use serde::Serialize;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_NONDIAGNOSABLE: u8 = 2;
pub const EXIT_VIOLATION: u8 = 3;

/// Everything one run produces.
pub struct Outcome {
    pub report: String,
    /// Extra files as `(extension, contents)`.
    pub files: Vec<(&'static str, String)>,
    pub exit: u8,
    /// Lines for stderr.
    pub problems: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Input {
    pub path: String,
    /// The parsed map, printed back in canonical form.
    pub map: Option<String>,
    pub point: Option<String>,
}

/// Options echoed into the report; absent ones are omitted.
#[derive(Debug, Default, Serialize)]
pub struct Settings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<report::Real17>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub dual: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub regular: bool,
}

#[derive(Debug, Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    input: &'a Input,
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<Vec<ScalarRepr>>,
    settings: &'a Settings,
    exit_code: u8,
    result: T,
}

#[derive(Debug, Serialize)]
struct ErrorRepr {
    code: &'static str,
    message: String,
}

pub fn render<T: Serialize>(
    command: &'static str,
    input: &Input,
    point: Option<Vec<ScalarRepr>>,
    settings: &Settings,
    exit: u8,
    result: T,
) -> String {
    report::to_json(&Envelope {
        tool: "fronts",
        version: env!("CARGO_PKG_VERSION"),
        command,
        input,
        point,
        settings,
        exit_code: exit,
        result,
    })
}

/// Exit code for a library error: failed hypotheses exit 3, everything else
/// is an input problem.
pub fn error_exit(e: &Error) -> u8 {
    match e {
        Error::Hypothesis(_) | Error::RankDeficient | Error::VanishingNormal => EXIT_VIOLATION,
        _ => EXIT_INPUT,
    }
}

pub fn failure(command: &'static str, input: &Input, settings: &Settings, code: &'static str, e: &dyn std::fmt::Display, exit: u8) -> Outcome {
    let err = ErrorRepr {
        code,
        message: e.to_string(),
    };
    Outcome {
        report: render(command, input, None, settings, exit, serde_error(err)),
        files: Vec::new(),
        exit,
        problems: vec![format!("error[{code}]: {e}")],
    }
}

fn serde_error(err: ErrorRepr) -> impl Serialize {
    #[derive(Serialize)]
    struct Wrap {
        error: ErrorRepr,
    }
    Wrap { error: err }
}

pub fn write_files(dir: &Path, command: &str, outcome: &Outcome) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(format!("{command}.json")), &outcome.report)?;
    for (ext, body) in &outcome.files {
        std::fs::write(dir.join(format!("{command}.{ext}")), body)?;
    }
    Ok(())
}
