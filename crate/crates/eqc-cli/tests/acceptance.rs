//! One line per acceptance criterion. Exits non-zero when any criterion fails.

use doctrines::completions::{complete_q, complete_x, eqc, CompletionResult, EqcMode};
use doctrines::doctrine::Doctrine;
use doctrines::fixtures::{blur, finset_sub, finset_weaksub, posetal, FixtureSpec};
use doctrines::infsl::InfSemilattice;
use doctrines::logic::{has_comprehensive_diagonals, has_full_comprehensions, quotient_sweep};
use doctrines::mutants::battery;
use doctrines::report::{Report, Status};
use doctrines::verify::{
    base_suite, check_equivalence_arrow, check_universal_with, doctrine_equivalence, UniversalKind,
};
use eqc_cli::dsl::{parse_doctrine, to_dsl};
use eqc_cli::json::from_json;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};
use std::sync::Arc;
use std::time::{Duration, Instant};

const SUITE_LIMIT: Duration = Duration::from_secs(60);
const Q_LIMIT: Duration = Duration::from_secs(120);
const EQC_LIMIT: Duration = Duration::from_secs(180);
const BUDGET: u64 = 5_000_000;

struct Outcome {
    pass: bool,
    summary: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            summary: String::new(),
            notes: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, note: impl Into<String>) {
        let note = note.into();
        self.notes
            .push(format!("{} {note}", if ok { "ok  " } else { "FAIL" }));
        self.pass &= ok;
    }
}

fn eqc_bin(args: &[&str], input: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_eqc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("eqc runs");
    let mut stdin = child.stdin.take().unwrap();
    if let Some(bytes) = input {
        stdin.write_all(bytes).unwrap();
    }
    drop(stdin);
    child.wait_with_output().unwrap()
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn passes(r: &Report, check: &str) -> bool {
    r.line(check).is_some_and(|l| l.status == Status::Pass)
}

fn first_failure(r: &Report) -> String {
    r.failures()
        .next()
        .map(|l| format!("{}: {}", l.check, l.witness.clone().unwrap_or_default()))
        .unwrap_or_else(|| "none".into())
}

/// Set partitions of `0..n`, counted by restricted growth strings.
fn bell(n: usize) -> usize {
    fn go(i: usize, n: usize, max: usize) -> usize {
        if i == n {
            return 1;
        }
        (0..=max + 1).map(|b| go(i + 1, n, max.max(b))).sum()
    }
    if n == 0 {
        1
    } else {
        go(1, n, 0)
    }
}

fn unit_mutants(res: &CompletionResult) -> Vec<CompletionResult> {
    let mut out = Vec::new();
    for (a, comp) in res.unit.b.iter().enumerate() {
        let target = res.doctrine.fiber(res.unit.functor.objects[a]).len();
        for (x, &y) in comp.iter().enumerate() {
            for v in (0..target).filter(|&v| v != y) {
                let mut m = res.clone();
                m.unit.b[a][x] = v;
                out.push(m);
            }
        }
    }
    out
}

fn core_of(p: &Doctrine) -> Doctrine {
    p.restrict(&p.elementary_core()).0
}

fn criterion_1() -> (Outcome, Option<Report>) {
    let mut o = Outcome::new();
    let t = Instant::now();
    let fx = eqc_bin(&["fixture", "finset-sub", "4"], None);
    let out = eqc_bin(&["verify", "-", "--json"], Some(&fx.stdout));
    let took = t.elapsed();
    let report: Option<Report> = serde_json::from_slice(&out.stdout).ok();
    o.require(fx.status.code() == Some(0), "fixture exits 0");
    o.require(out.status.code() == Some(0), "verify exits 0");
    let Some(r) = report else {
        o.require(false, "verify emits a JSON report");
        return (o, None);
    };
    let totals = r.totals();
    o.require(r.passed(), format!("zero failures ({})", first_failure(&r)));
    for check in [
        "elementary.diagonal-adjunction",
        "elementary.e-adjunction",
        "elementary.top-below-diagonal",
        "elementary.delta-stable",
        "elementary.boxtimes-law",
        "kernel.equivalence",
        "reindex.preserves-equivalence",
        "reindex.lands-in-descent",
        "quotient.exists",
        "quotient.descent",
        "quotient.stable",
        "quotient.effective-descent",
        "relation.effective",
        "comprehension.exists",
        "comprehension.full",
        "diagonal.comprehensive",
    ] {
        o.require(passes(&r, check), check);
    }
    o.require(
        took < SUITE_LIMIT,
        format!("{:.1?} < {SUITE_LIMIT:?}", took),
    );
    o.summary = format!(
        "{} lines, {} instances checked, {:.1?}",
        r.lines.len(),
        totals.checked,
        took
    );
    (o, Some(r))
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let p = Arc::new(finset_sub(4));
    let t = Instant::now();
    let q = match complete_q(&p) {
        Ok(q) => q,
        Err(e) => {
            o.require(false, format!("construction: {e}"));
            return o;
        }
    };
    let mut counts = vec![0usize; 5];
    for &a in &q.object_under {
        counts[a] += 1;
    }
    let want: Vec<usize> = (0..=4).map(bell).collect();
    o.require(
        counts == want,
        format!("objects over 0..4 = {counts:?}, partitions = {want:?}"),
    );
    let suite = base_suite(&q.doctrine, &[]);
    for check in [
        "quotient.exists",
        "quotient.stable",
        "quotient.effective-descent",
        "relation.effective",
    ] {
        o.require(passes(&suite, check), format!("Q(FS4) {check}"));
    }
    let took = t.elapsed();
    o.require(took < Q_LIMIT, format!("{:.1?} < {Q_LIMIT:?}", took));
    o.summary = format!("object counts {counts:?} against {want:?}");
    o
}

fn criterion_3(suite: Option<&Report>) -> Outcome {
    let mut o = Outcome::new();
    let Some(r) = suite else {
        o.require(false, "suite report from criterion 1");
        return o;
    };
    for (check, what) in [
        ("q/unit.full-faithful", "J full and faithful"),
        (
            "q/q.units-projective",
            "every (A, delta_A) projective w.r.t. quotients",
        ),
        (
            "q/q.covered-by-units",
            "every object a quotient of some (A, delta_A)",
        ),
    ] {
        let cov = r.line(check).map(|l| l.coverage.checked).unwrap_or(0);
        o.require(passes(r, check), format!("{what} ({cov} instances)"));
    }
    o.summary = "unit of Q(FS4)".into();
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let p = Arc::new(blur());
    let x = complete_x(&p).expect("Blur collapses");
    let c = p.base();
    let a = c.find_object("A").unwrap();
    let cell = c.product(a, a).unwrap();
    let da = p.delta(a).unwrap();
    let class = |f: usize| x.unit.functor.arrows[f];
    let (mut related, mut stateable, mut agree) = (0, 0, true);
    for &f in c.hom(a, a) {
        for &g in c.hom(a, a) {
            if f >= g {
                continue;
            }
            // f x g as the arrow commuting with both projections
            let fg: Vec<usize> = c
                .hom(cell.apex, cell.apex)
                .iter()
                .copied()
                .filter(|&u| {
                    c.compose(cell.pr1, u) == c.compose(f, cell.pr1)
                        && c.compose(cell.pr2, u) == c.compose(g, cell.pr2)
                })
                .collect();
            if fg.len() != 1 {
                continue;
            }
            stateable += 1;
            let rel = p.leq(cell.apex, da, p.re(fg[0], da));
            related += rel as usize;
            agree &= rel == (class(f) == class(g));
        }
    }
    o.require(
        agree && stateable > 0,
        format!("{stateable} stateable parallel pairs, {related} related, identified exactly when related"),
    );
    o.require(
        passes(&x.construction, "x.well-defined"),
        "well-definedness precheck on related pairs",
    );
    o.require(
        passes(&x.construction, "x.congruence-agrees"),
        "construction agrees with the relation",
    );
    let diag = has_comprehensive_diagonals(&x.doctrine);
    o.require(
        passes(&diag, "diagonal.comprehensive"),
        "X(Blur) has comprehensive diagonals",
    );
    o.summary = format!(
        "{} arrows collapse to {}",
        c.n_arrows(),
        x.doctrine.base().n_arrows()
    );
    o
}

fn criterion_5() -> Vec<(&'static str, Outcome)> {
    let mut o = Outcome::new();
    let p = Arc::new(finset_sub(4));
    let t = Instant::now();
    let e = match eqc(&p, EqcMode::WithComprehensions) {
        Ok(e) => e,
        Err(err) => {
            o.require(false, format!("construction: {err}"));
            return vec![("5", o)];
        }
    };
    let d = &e.result.doctrine;
    let comp = has_full_comprehensions(d);
    let quo = quotient_sweep(d);
    let diag = has_comprehensive_diagonals(d);
    o.require(passes(&comp, "comprehension.exists"), "comprehensions");
    o.require(
        passes(&quo, "quotient.exists") && passes(&quo, "quotient.descent"),
        "descent quotients",
    );
    o.require(
        passes(&diag, "diagonal.comprehensive"),
        "comprehensive diagonals",
    );
    let took = t.elapsed();
    o.require(took < EQC_LIMIT, format!("{:.1?} < {EQC_LIMIT:?}", took));
    o.summary = format!(
        "eqc(FS4): {} objects, {} arrows",
        d.base().n_objects(),
        d.base().n_arrows()
    );

    let core = core_of(&p);
    let mut w = Outcome::new();
    let t = Instant::now();
    let search = doctrine_equivalence(&core, d, BUDGET);
    w.require(
        search.witness.is_some(),
        format!(
            "equivalence witness FS4|core ({} objects) ~ eqc(FS4) ({} objects); {} x {} candidates, exhaustive {}",
            core.base().n_objects(),
            d.base().n_objects(),
            search.candidates.0,
            search.candidates.1,
            search.exhaustive
        ),
    );
    if search.witness.is_none() {
        w.notes.push(format!(
            "     first obstruction: {}",
            first_failure(&search.report)
        ));
    }
    w.summary = format!("common-window equivalence, {:.1?}", t.elapsed());

    let mut xq = Outcome::new();
    match eqc(&p, EqcMode::WithoutComprehensions) {
        Ok(r) => {
            let s = doctrine_equivalence(&core, &r.result.doctrine, BUDGET);
            xq.require(
                s.witness.is_some(),
                format!(
                    "XQ(FS4) ({} objects) ~ FS4|core ({} objects)",
                    r.result.doctrine.base().n_objects(),
                    core.base().n_objects()
                ),
            );
            xq.summary = "quotient completion then collapse, without comprehension step".into();
        }
        Err(err) => xq.require(false, format!("construction: {err}")),
    }

    let mut unit = Outcome::new();
    let r = check_equivalence_arrow(&e.result.source, d, &e.result.unit);
    unit.require(
        passes(&r, "equivalence.full-faithful"),
        "eqc unit full and faithful",
    );
    unit.require(
        passes(&r, "equivalence.fiber-iso"),
        "eqc unit is an iso on fibers",
    );
    unit.summary = format!(
        "essentially surjective: {}",
        r.line("equivalence.essentially-surjective")
            .map(|l| l.status.label())
            .unwrap_or("n/a")
    );
    vec![("5", o), ("5b", w), ("5c", xq), ("5d", unit)]
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let mut total = 0;
    let pq = Arc::new(posetal(
        &InfSemilattice::chain(2),
        &InfSemilattice::chain(2),
    ));
    let q = complete_q(&pq).unwrap();
    let pb = Arc::new(blur());
    let x = complete_x(&pb).unwrap();
    let xz = x.doctrine.as_ref().clone();
    for (name, res, z, kind) in [
        (
            "Q: posetal(2,2) into FS2",
            &q,
            finset_sub(2),
            UniversalKind::Quotients,
        ),
        ("X: Blur into X(Blur)", &x, xz, UniversalKind::Extensional),
    ] {
        let r = check_universal_with(res, &z, kind, BUDGET);
        o.require(
            r.passed() && passes(&r, "universal.enumeration-exhaustive"),
            format!(
                "{name}: {}",
                r.line("universal.enumeration-exhaustive")
                    .map(|l| l.detail.clone())
                    .unwrap_or_default()
            ),
        );
        let ms = unit_mutants(res);
        let survivors = ms
            .iter()
            .filter(|m| check_universal_with(m, &z, kind, BUDGET).passed())
            .count();
        total += ms.len();
        o.require(
            !ms.is_empty() && survivors == 0,
            format!("{name}: {} unit mutants, {survivors} survive", ms.len()),
        );
    }
    o.summary = format!("two pairs, {total} unit mutations");
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let s = doctrine_equivalence(&finset_sub(2), &finset_weaksub(2), BUDGET);
    o.require(s.witness.is_some(), "witness found");
    o.summary = format!(
        "FS2 ~ WS2, {} x {} candidates",
        s.candidates.0, s.candidates.1
    );
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let ms = battery();
    for m in &ms {
        o.require(
            m.caught(),
            format!(
                "{} ({}) -> {}: {}",
                m.name,
                m.fault,
                m.check,
                m.witness().unwrap_or("no witness")
            ),
        );
    }
    let caught = ms.iter().filter(|m| m.caught()).count();
    o.summary = format!("{caught}/{} mutants caught", ms.len());
    o
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    let fixtures: Vec<(Vec<&str>, FixtureSpec)> = vec![
        (vec!["terminal"], FixtureSpec::Terminal),
        (vec!["two"], FixtureSpec::Two),
        (vec!["blur"], FixtureSpec::Blur),
        (
            vec!["posetal", "2", "2"],
            FixtureSpec::Posetal { chain: 2, fiber: 2 },
        ),
        (
            vec!["posetal", "4", "3"],
            FixtureSpec::Posetal { chain: 4, fiber: 3 },
        ),
        (vec!["finset-sub", "1"], FixtureSpec::FinsetSub(1)),
        (vec!["finset-sub", "2"], FixtureSpec::FinsetSub(2)),
        (vec!["finset-sub", "3"], FixtureSpec::FinsetSub(3)),
        (vec!["finset-sub", "4"], FixtureSpec::FinsetSub(4)),
        (vec!["finset-weaksub", "2"], FixtureSpec::FinsetWeaksub(2)),
        (vec!["finset-weaksub", "3"], FixtureSpec::FinsetWeaksub(3)),
    ];
    let mut same = 0;
    for (words, spec) in &fixtures {
        let want = spec.build();
        let mut args = vec!["export", "--format", "json"];
        let target = format!("fixture:{}", words.join(":"));
        args.push(&target);
        let out = eqc_bin(&args, None);
        let ok = out.status.code() == Some(0)
            && from_json(&String::from_utf8_lossy(&out.stdout))
                .ok()
                .and_then(|(p, _)| {
                    let text = to_dsl(&p).ok()?;
                    parse_doctrine(&text, &p.name).ok()
                })
                .is_some_and(|back| back.to_data() == want.to_data());
        same += ok as usize;
        if !ok {
            o.require(false, format!("{target} does not round-trip"));
        }
    }
    o.require(
        same == fixtures.len(),
        format!(
            "{same}/{} fixtures reproduce identically (json -> parse -> elaborate)",
            fixtures.len()
        ),
    );
    let mut stable = true;
    for file in ["blur.eqc", "two.eqc", "finset_sub_2.eqc", "posetal_2_2.eqc"] {
        let text = std::fs::read_to_string(golden(file)).unwrap();
        let name = text.lines().next().unwrap_or("").trim_start_matches("# ");
        stable &= parse_doctrine(&text, name)
            .ok()
            .and_then(|p| to_dsl(&p).ok())
            .is_some_and(|t| t == text);
    }
    o.require(stable, "golden DSL files reprint byte for byte");
    let code = |args: &[&str]| eqc_bin(args, None).status.code();
    let codes = [
        (code(&["check", golden("two.eqc").to_str().unwrap()]), 0),
        (
            code(&["check", golden("not_meet_preserving.eqc").to_str().unwrap()]),
            1,
        ),
        (
            code(&["check", golden("missing_compose.eqc").to_str().unwrap()]),
            2,
        ),
        (code(&["check", "no/such/file.eqc"]), 2),
        (code(&["no-such-command"]), 2),
    ];
    o.require(
        codes.iter().all(|&(got, want)| got == Some(want)),
        format!(
            "exit codes {:?}",
            codes.iter().map(|c| c.0.unwrap_or(-1)).collect::<Vec<_>>()
        ),
    );
    o.summary = "json/dsl round trip, golden files, exit codes".into();
    o
}

fn main() {
    let started = Instant::now();
    let mut rows: Vec<(&str, Outcome)> = Vec::new();
    let (c1, suite) = criterion_1();
    rows.push(("1", c1));
    rows.push(("2", criterion_2()));
    rows.push(("3", criterion_3(suite.as_ref())));
    rows.push(("4", criterion_4()));
    rows.extend(criterion_5());
    rows.push(("6", criterion_6()));
    rows.push(("7", criterion_7()));
    rows.push(("8", criterion_8()));
    rows.push(("9", criterion_9()));
    println!();
    for (id, o) in &rows {
        println!(
            "criterion {id:<3} {}  {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.summary
        );
        for n in &o.notes {
            println!("      {n}");
        }
    }
    let failed: Vec<&str> = rows.iter().filter(|r| !r.1.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {} criteria, {} pass, {} fail {:?} in {:.1?}",
        rows.len(),
        rows.len() - failed.len(),
        failed.len(),
        failed,
        started.elapsed()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
