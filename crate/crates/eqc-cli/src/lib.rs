//! Command-line front end: the description language, JSON and DOT exporters, and input loading.

pub mod app;
pub mod dot;
pub mod dsl;
pub mod json;

use doctrines::doctrine::Doctrine;
use doctrines::fixtures::FixtureSpec;
use std::io::Read;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{0}")]
    Io(String),
    #[error("{source_name}: {err}")]
    Dsl {
        source_name: String,
        err: dsl::DslError,
    },
    #[error("{source_name}: {err}")]
    Json {
        source_name: String,
        err: json::JsonError,
    },
    #[error("unknown fixture '{0}' (finset-sub:N, finset-weaksub:N, posetal:CHAIN:FIBER, terminal, two, blur)")]
    Fixture(String),
}

/// `finset-sub 4`, `posetal 2 2`, `blur`, ... as a fixture.
pub fn parse_fixture(words: &[&str]) -> Result<FixtureSpec, LoadError> {
    let bad = || LoadError::Fixture(words.join(":"));
    let num = |i: usize| -> Result<usize, LoadError> {
        words.get(i).and_then(|w| w.parse().ok()).ok_or_else(bad)
    };
    let spec = match words.first().copied() {
        Some("finset-sub") if words.len() == 2 => FixtureSpec::FinsetSub(num(1)?),
        Some("finset-weaksub") if words.len() == 2 => FixtureSpec::FinsetWeaksub(num(1)?),
        Some("posetal") if words.len() == 3 => FixtureSpec::Posetal {
            chain: num(1)?,
            fiber: num(2)?,
        },
        Some("terminal") if words.len() == 1 => FixtureSpec::Terminal,
        Some("two") if words.len() == 1 => FixtureSpec::Two,
        Some("blur") if words.len() == 1 => FixtureSpec::Blur,
        _ => return Err(bad()),
    };
    Ok(spec)
}

/// Parse text as JSON when it starts with `{`, as the description language otherwise.
pub fn load_text(
    text: &str,
    source_name: &str,
    name: &str,
) -> Result<(Doctrine, String), LoadError> {
    if text.trim_start().starts_with('{') {
        json::from_json(text).map_err(|err| LoadError::Json {
            source_name: source_name.into(),
            err,
        })
    } else {
        dsl::parse_doctrine(text, name)
            .map(|p| (p, format!("file {source_name}")))
            .map_err(|err| LoadError::Dsl {
                source_name: source_name.into(),
                err,
            })
    }
}

/// A file path, `-` for standard input, or `fixture:NAME[:ARGS]`.
pub fn load(input: &str) -> Result<(Doctrine, String), LoadError> {
    load_from(input, &mut std::io::stdin().lock())
}

/// As [`load`], reading `-` from `stdin`.
pub fn load_from(input: &str, stdin: &mut dyn Read) -> Result<(Doctrine, String), LoadError> {
    if let Some(rest) = input.strip_prefix("fixture:") {
        let words: Vec<&str> = rest.split(':').collect();
        let spec = parse_fixture(&words)?;
        return Ok((spec.build(), format!("fixture {}", words.join(" "))));
    }
    if input == "-" {
        let mut text = String::new();
        stdin
            .read_to_string(&mut text)
            .map_err(|e| LoadError::Io(format!("stdin: {e}")))?;
        return load_text(&text, "stdin", "stdin");
    }
    let text =
        std::fs::read_to_string(input).map_err(|e| LoadError::Io(format!("{input}: {e}")))?;
    let stem = Path::new(input)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(input);
    load_text(&text, input, stem)
}
