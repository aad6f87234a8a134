//! The `eqc` command line, runnable in-process against arbitrary streams.

use crate::{dot, dsl, json, load_from, LoadError};
use clap::{Parser, Subcommand, ValueEnum};
use doctrines::completions::{
    complete_d, complete_gr, complete_q, complete_x, eqc, CompletionResult, EqcMode,
};
use doctrines::doctrine::Doctrine;
use doctrines::fixtures::FixtureSpec;
use doctrines::report::Report;
use doctrines::verify::{base_suite, check_universal_q, check_universal_x, run_suite, SuiteConfig};
use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "eqc",
    version,
    about = "Check finite doctrine windows and build their completions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Q,
    X,
    Gr,
    D,
    Eqc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Universal {
    Q,
    X,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Json,
    Dot,
    Dsl,
}

#[derive(Clone, Copy, ValueEnum)]
enum DocFormat {
    Json,
    Dsl,
}

#[derive(Subcommand)]
enum Cmd {
    /// Structural, elementary and closure checks on one doctrine.
    Check {
        /// File, `-` for stdin, or `fixture:NAME[:ARGS]`.
        input: String,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Build a completion and write it out.
    Complete {
        #[arg(long, value_enum)]
        kind: Kind,
        input: String,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: DocFormat,
        /// For `eqc`: skip the comprehension completion.
        #[arg(long)]
        without_gr: bool,
    },
    /// The full suite, or a universal property against a target.
    Verify {
        input: String,
        /// Target doctrine for the universal property of the unit.
        #[arg(long)]
        universal: Option<String>,
        /// Which unit to test against the target.
        #[arg(long, value_enum, default_value = "q")]
        property: Universal,
        /// Search-node budget for enumerations.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Only check the input, without building completions.
        #[arg(long)]
        no_completions: bool,
        #[arg(long)]
        without_gr: bool,
        #[arg(long)]
        json: bool,
    },
    /// Write a doctrine as JSON, description language, or Graphviz.
    Export {
        #[arg(long, value_enum)]
        format: ExportFormat,
        input: String,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Print a built-in fixture.
    Fixture {
        #[arg(long, value_enum, default_value = "json")]
        format: DocFormat,
        #[command(subcommand)]
        which: FixtureCmd,
    },
}

#[derive(Subcommand)]
enum FixtureCmd {
    /// Subsets over finite sets 0..=N.
    FinsetSub {
        n: usize,
    },
    /// Weak subobjects over finite sets 0..=N.
    FinsetWeaksub {
        n: usize,
    },
    /// A chain as a category with constant chain fibers.
    Posetal {
        chain: usize,
        fiber: usize,
    },
    Terminal,
    Two,
    Blur,
}

enum Failure {
    Checks,
    Usage(String),
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn load(&mut self, input: &str) -> Result<(Doctrine, String), LoadError> {
        load_from(input, self.stdin)
    }

    fn print(&mut self, text: &str) -> Result<(), Failure> {
        self.out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Usage(format!("stdout: {e}")))
    }

    fn note(&mut self, text: &str) {
        let _ = self.err.write_all(text.as_bytes());
    }

    fn emit(&mut self, text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
        match out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
            None => self.print(text),
        }
    }

    fn show(&mut self, r: &Report, as_json: bool) -> Result<(), Failure> {
        if as_json {
            let text = serde_json::to_string_pretty(r).expect("reports serialize");
            self.print(&(text + "\n"))?;
        } else {
            self.print(&r.to_string())?;
        }
        if r.passed() {
            Ok(())
        } else {
            Err(Failure::Checks)
        }
    }
}

fn render(p: &Doctrine, format: DocFormat, provenance: &str) -> Result<String, Failure> {
    match format {
        DocFormat::Json => Ok(json::to_json(p, provenance) + "\n"),
        DocFormat::Dsl => dsl::to_dsl(p).map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn dispatch(cli: Cli, io: &mut Io) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Check { input, json } => {
            let (p, _) = io.load(&input)?;
            io.show(&base_suite(&p, &[]), json)
        }
        Cmd::Complete {
            kind,
            input,
            out,
            format,
            without_gr,
        } => {
            let (p, prov) = io.load(&input)?;
            let p = Arc::new(p);
            let built: Result<CompletionResult, _> = match kind {
                Kind::Q => complete_q(&p),
                Kind::X => complete_x(&p),
                Kind::Gr => complete_gr(&p),
                Kind::D => complete_d(&p),
                Kind::Eqc => {
                    let mode = if without_gr {
                        EqcMode::WithoutComprehensions
                    } else {
                        EqcMode::WithComprehensions
                    };
                    eqc(&p, mode).map(|e| e.result)
                }
            };
            let res = built.map_err(|e| {
                io.note(&format!("construction failed: {e}\n"));
                Failure::Checks
            })?;
            io.note(&res.construction.to_string());
            let label = match kind {
                Kind::Q => "q",
                Kind::X => "x",
                Kind::Gr => "gr",
                Kind::D => "d",
                Kind::Eqc => "eqc",
            };
            io.emit(
                &render(
                    &res.doctrine,
                    format,
                    &format!("complete {label} of {prov}"),
                )?,
                out.as_ref(),
            )?;
            if res.construction.passed() {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Cmd::Verify {
            input,
            universal,
            property,
            budget,
            no_completions,
            without_gr,
            json,
        } => {
            let (p, _) = io.load(&input)?;
            let p = Arc::new(p);
            let r = match universal {
                Some(z) => {
                    let (z, _) = io.load(&z)?;
                    match property {
                        Universal::Q => check_universal_q(&p, &z, budget),
                        Universal::X => check_universal_x(&p, &z, budget),
                    }
                }
                None => run_suite(
                    &p,
                    SuiteConfig {
                        completions: !no_completions,
                        with_gr: !without_gr,
                    },
                ),
            };
            io.show(&r, json)
        }
        Cmd::Export { format, input, out } => {
            let (p, prov) = io.load(&input)?;
            let text = match format {
                ExportFormat::Json => json::to_json(&p, &prov) + "\n",
                ExportFormat::Dsl => dsl::to_dsl(&p).map_err(|e| Failure::Usage(e.to_string()))?,
                ExportFormat::Dot => dot::to_dot(&p.name, p.base()),
            };
            io.emit(&text, out.as_ref())
        }
        Cmd::Fixture { format, which } => {
            let (spec, words) = match which {
                FixtureCmd::FinsetSub { n } => {
                    (FixtureSpec::FinsetSub(n), format!("finset-sub {n}"))
                }
                FixtureCmd::FinsetWeaksub { n } => {
                    (FixtureSpec::FinsetWeaksub(n), format!("finset-weaksub {n}"))
                }
                FixtureCmd::Posetal { chain, fiber } => (
                    FixtureSpec::Posetal { chain, fiber },
                    format!("posetal {chain} {fiber}"),
                ),
                FixtureCmd::Terminal => (FixtureSpec::Terminal, "terminal".into()),
                FixtureCmd::Two => (FixtureSpec::Two, "two".into()),
                FixtureCmd::Blur => (FixtureSpec::Blur, "blur".into()),
            };
            let text = render(&spec.build(), format, &format!("fixture {words}"))?;
            io.emit(&text, None)
        }
    }
}

/// Run one command line; returns the process exit code (0 pass, 1 failed checks, 2 usage,
/// parse or load errors).
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code() as u8;
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let mut io = Io { stdin, out, err };
    match dispatch(cli, &mut io) {
        Ok(()) => 0,
        Err(Failure::Checks) => 1,
        Err(Failure::Usage(msg)) => {
            io.note(&format!("error: {msg}\n"));
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_doctrine, to_dsl};
    use crate::json::from_json;
    use std::path::Path;

    struct Ran {
        code: u8,
        out: String,
        err: String,
    }

    fn eqc(args: &[&str], input: &str) -> Ran {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let argv = std::iter::once("eqc").chain(args.iter().copied());
        let code = run(argv, &mut input.as_bytes(), &mut out, &mut err);
        Ran {
            code,
            out: String::from_utf8(out).unwrap(),
            err: String::from_utf8(err).unwrap(),
        }
    }

    fn golden(name: &str) -> String {
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(name)
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn json_export_round_trips_through_the_dsl() {
        for (words, spec) in [
            (vec!["terminal"], FixtureSpec::Terminal),
            (vec!["two"], FixtureSpec::Two),
            (vec!["blur"], FixtureSpec::Blur),
            (
                vec!["posetal", "3", "2"],
                FixtureSpec::Posetal { chain: 3, fiber: 2 },
            ),
            (vec!["finset-sub", "2"], FixtureSpec::FinsetSub(2)),
            (vec!["finset-sub", "3"], FixtureSpec::FinsetSub(3)),
            (vec!["finset-weaksub", "2"], FixtureSpec::FinsetWeaksub(2)),
        ] {
            let want = spec.build().to_data();
            let mut args = vec!["fixture", "--format", "json"];
            args.extend(&words);
            let r = eqc(&args, "");
            assert_eq!(r.code, 0, "{words:?}");
            let (p, prov) = from_json(&r.out).unwrap();
            assert_eq!(prov, format!("fixture {}", words.join(" ")));
            assert_eq!(p.to_data(), want, "{words:?} via json");
            let back = parse_doctrine(&to_dsl(&p).unwrap(), &p.name).unwrap();
            assert_eq!(back.to_data(), want, "{words:?} via dsl");
        }
    }

    #[test]
    fn golden_files_are_bit_stable() {
        for (file, spec) in [
            ("blur.eqc", FixtureSpec::Blur),
            ("two.eqc", FixtureSpec::Two),
            ("finset_sub_2.eqc", FixtureSpec::FinsetSub(2)),
            (
                "posetal_2_2.eqc",
                FixtureSpec::Posetal { chain: 2, fiber: 2 },
            ),
        ] {
            let text = std::fs::read_to_string(golden(file)).unwrap();
            let built = spec.build();
            let p = parse_doctrine(&text, &built.name).unwrap();
            assert_eq!(to_dsl(&p).unwrap(), text, "{file} reprints differently");
            assert_eq!(
                to_dsl(&built).unwrap(),
                text,
                "{file} drifted from its builder"
            );
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(eqc(&["check", &golden("two.eqc")], "").code, 0);
        let bad = eqc(&["check", &golden("not_meet_preserving.eqc")], "");
        assert_eq!(bad.code, 1);
        assert!(bad.out.contains("FAIL] doctrine.reindex-homomorphism"));
        let broken = eqc(&["check", &golden("missing_compose.eqc")], "");
        assert_eq!(broken.code, 2);
        assert!(broken.err.contains("missing composite g . f"));
        assert_eq!(eqc(&["check", "no/such/file.eqc"], "").code, 2);
        assert_eq!(eqc(&["frobnicate"], "").code, 2);
        assert_eq!(eqc(&["fixture", "finset-sub"], "").code, 2);
        assert_eq!(eqc(&["check", "fixture:nonsense"], "").code, 2);
        assert_eq!(eqc(&["check", "-"], "object A;\nobject A;\n").code, 2);
        assert_eq!(eqc(&["check", "-"], "{\"schema\": 9}").code, 2);
        let help = eqc(&["--help"], "");
        assert_eq!(help.code, 0);
        assert!(help.out.contains("Usage"));
    }

    #[test]
    fn fixture_pipes_into_verify() {
        let fx = eqc(&["fixture", "blur"], "");
        assert_eq!(fx.code, 0);
        let r = eqc(&["verify", "-", "--json"], &fx.out);
        assert_eq!(r.code, 0, "{}", r.err);
        let rep: Report = serde_json::from_str(&r.out).unwrap();
        assert!(rep.passed());
        assert!(rep.line("x/x.well-defined").is_some());
    }

    #[test]
    fn universal_property_from_the_command_line() {
        let r = eqc(
            &[
                "verify",
                "fixture:posetal:2:2",
                "--universal",
                "fixture:finset-sub:2",
                "--property",
                "q",
            ],
            "",
        );
        assert_eq!(r.code, 0, "{}", r.out);
        assert!(r.out.contains("universal.full-faithful"));
    }

    #[test]
    fn complete_writes_a_loadable_document() {
        let dir = std::env::temp_dir().join(format!("eqc-app-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("x.json");
        let path = path.to_str().unwrap();
        let r = eqc(&["complete", "--kind", "x", "fixture:blur", "-o", path], "");
        assert_eq!(r.code, 0, "{}", r.err);
        assert!(r.err.contains("x.well-defined"));
        let (p, prov) = from_json(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(prov, "complete x of fixture blur");
        // one arrow per hom-set of A, AA
        assert_eq!(p.base().n_arrows(), 4);
        assert_eq!(eqc(&["check", path], "").code, 0);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn dot_export_lists_non_identity_arrows() {
        let r = eqc(
            &["export", "--format", "dot", &golden("posetal_2_2.eqc")],
            "",
        );
        assert_eq!(r.code, 0);
        assert!(r.out.starts_with("digraph"));
        assert_eq!(r.out.matches(" -> ").count(), 1);
    }
}
