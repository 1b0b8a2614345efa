//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use sheargeo::kahler::BaseKind;
use sheargeo::report::Report;
use sheargeo::suite::{run_suite, Command, RunConfig};

struct Run {
    report: Report,
    secs: f64,
}

fn run(command: Command, edit: impl FnOnce(&mut RunConfig)) -> Run {
    let mut cfg = RunConfig::defaults(command);
    edit(&mut cfg);
    let start = Instant::now();
    let report = run_suite(&cfg);
    Run {
        report,
        secs: start.elapsed().as_secs_f64(),
    }
}

/// Every record whose name starts with one of `prefixes` passes, and at
/// least one such record exists.
fn passes(r: &Report, prefixes: &[&str]) -> (bool, String) {
    let picked: Vec<_> = r
        .checks
        .iter()
        .filter(|c| prefixes.iter().any(|p| c.name.starts_with(p)))
        .collect();
    let failed: Vec<String> = picked
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} ({:e} > {:e})", c.name, c.max_residual, c.tolerance))
        .collect();
    let ok = !picked.is_empty() && failed.is_empty();
    let detail = if failed.is_empty() {
        format!("{} records", picked.len())
    } else {
        format!("failing: {}", failed.join(", "))
    };
    (ok, detail)
}

struct Ledger {
    lines: Vec<String>,
    all: bool,
}

impl Ledger {
    fn record(&mut self, k: usize, title: &str, ok: bool, detail: String) {
        let line = format!("[{k:>2}] {} {title}: {detail}", if ok { "PASS" } else { "FAIL" });
        println!("{line}");
        self.lines.push(line);
        self.all &= ok;
    }
}

fn main() -> ExitCode {
    let mut l = Ledger {
        lines: Vec::new(),
        all: true,
    };

    let sphere = run(Command::Einstein, |_| {});
    let torus = run(Command::Einstein, |c| {
        c.base = BaseKind::Torus;
        c.lambda0 = 0.0;
        c.lambda = -1.0;
        c.c = 1.0;
        c.b = 2.0;
    });
    let six = run(Command::Einstein, |c| {
        c.base = BaseKind::s2xs2();
        c.n = 6;
        c.c = 0.5;
        c.grid = 6;
    });
    let instances = [&sphere, &torus, &six];

    // 1
    let mut ok = true;
    let mut details = Vec::new();
    for (label, r) in [("sphere", &sphere), ("torus", &torus)] {
        let (pass, d) = passes(&r.report, &["einstein.full."]);
        let max = r
            .report
            .get("einstein.full.coordinate")
            .map_or(f64::INFINITY, |c| c.max_residual);
        ok &= pass && r.secs <= 30.0;
        details.push(format!("{label} max {max:.2e} in {:.1} s ({d})", r.secs));
    }
    l.record(1, "4D Einstein instances on 10^3 grids", ok, details.join("; "));

    // 2
    let (pass, d) = passes(&six.report, &["einstein.full."]);
    let max = six
        .report
        .get("einstein.full.coordinate")
        .map_or(f64::INFINITY, |c| c.max_residual);
    l.record(
        2,
        "6D Einstein instance on a 6^5 grid",
        pass && six.secs <= 120.0,
        format!("max {max:.2e} in {:.1} s ({d})", six.secs),
    );

    // 3
    let general = &sphere.report;
    let mut ok = passes(general, &["shearfree.general.frame_crosscheck"]).0;
    let mut worst = general
        .get("shearfree.general.frame_crosscheck")
        .map_or(f64::INFINITY, |c| c.max_residual);
    for r in instances {
        ok &= passes(&r.report, &["einstein.frame_crosscheck"]).0;
        worst = worst.max(
            r.report
                .get("einstein.frame_crosscheck")
                .map_or(f64::INFINITY, |c| c.max_residual),
        );
    }
    l.record(
        3,
        "frame and coordinate connections agree at 50 random points",
        ok,
        format!("max {worst:.2e}"),
    );

    // 4
    let (mut ok, mut d) = (true, String::new());
    for r in instances {
        let (p, dd) = passes(&r.report, &["einstein.reduced.", "einstein.exact."]);
        ok &= p;
        d = dd;
    }
    l.record(4, "reduced equations, exact (p_o, p_o) block and discriminant", ok, d);

    // 5
    let mut ok = passes(&sphere.report, &["einstein.beta.taub_nut_form"]).0;
    for r in instances {
        ok &= passes(
            &r.report,
            &["einstein.beta.ode", "einstein.beta.rk4", "einstein.beta.origin"],
        )
        .0;
    }
    l.record(
        5,
        "closed-form β̃: equation, RK4, origin value, Taub-NUT form",
        ok,
        "3 instances".into(),
    );

    // 6
    let tn = run(Command::Taubnut, |_| {});
    let (pass, d) = passes(&tn.report, &["taubnut.components", "taubnut.ell", "taubnut.m"]);
    let ell = tn.report.get("taubnut.ell").map(|c| c.grid.clone()).unwrap_or_default();
    let m = tn.report.get("taubnut.m").map(|c| c.grid.clone()).unwrap_or_default();
    l.record(
        6,
        "Taub-NUT coordinate recovery",
        pass && ell == "ell = 0.5" && m == "m = 0",
        format!("{ell}, {m}, {d}"),
    );

    // 7
    let wave4 = run(Command::Wave, |_| {});
    let wave6 = run(Command::Wave, |c| {
        c.base = BaseKind::s2xs2();
        c.n = 6;
        c.c = 0.5;
        c.grid = 4;
    });
    let keys = ["wave.closed", "wave.coclosed", "wave.kernel_"];
    let (p4, d4) = passes(&wave4.report, &keys);
    let (p6, d6) = passes(&wave6.report, &keys);
    l.record(
        7,
        "plane wave harmonic with joint kernel ⟨∂_t⟩",
        p4 && p6,
        format!("4D {d4}; 6D {d6}"),
    );

    // 8
    let cr = run(Command::CrRoundtrip, |_| {});
    let (pass, d) = passes(&cr.report, &["cr."]);
    l.record(8, "CR round trip on 200 random pairs per dimension", pass, d);

    // 9
    let mut ok = true;
    for r in instances {
        ok &= passes(&r.report, &["shearfree."]).0;
    }
    l.record(
        9,
        "shearfree decomposition, geodesic factor, Killing field",
        ok,
        "3 instances".into(),
    );

    // 10
    let sas = run(Command::VerifySasaki, |_| {});
    let (pass, d) = passes(&sas.report, &["sasaki."]);
    l.record(10, "Sasaki structure of the circle bundle", pass, d);

    // 11
    let (p1, _) = passes(
        &sphere.report,
        &["control.perturbed_sigma", "control.non_einstein_base"],
    );
    let (p2, _) = passes(&wave4.report, &["control.broken_wave"]);
    let observed: Vec<String> = [
        (&sphere.report, "control.perturbed_sigma"),
        (&sphere.report, "control.non_einstein_base"),
        (&wave4.report, "control.broken_wave"),
    ]
    .iter()
    .map(|(r, name)| format!("{name}: {}", r.get(name).map_or("missing", |c| c.grid.as_str())))
    .collect();
    l.record(
        11,
        "negative controls fail their identities",
        p1 && p2,
        observed.join("; "),
    );

    // 12
    let a = run(Command::All, |_| {});
    let b = run(Command::All, |_| {});
    let same = a.report.to_json() == b.report.to_json();
    l.record(
        12,
        "end-to-end run with defaults",
        a.report.all_pass() && a.secs <= 60.0 && same,
        format!(
            "{} records, {:.1} s, all pass {}, byte-identical JSON {}",
            a.report.checks.len(),
            a.secs,
            a.report.all_pass(),
            same
        ),
    );

    let passed = l.lines.iter().filter(|s| s.contains("PASS")).count();
    println!("{passed}/{} acceptance criteria passed", l.lines.len());
    if l.all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
