//! One PASS/FAIL line per acceptance criterion. Lines go straight to stdout so that they show
//! up in the test log without `--nocapture`.

use gspecies::counterexample::{counterexample_search, DualConvention};
use gspecies::fixtures::{c3_gsp, rank2_gsp};
use gspecies::poly::IntPoly;
use gspecies::seed::compute_fg;
use gspecies::species::c3_species;
use gspecies::verify::{self, SuiteReport};
use gspecies::gsp::Gsp;
use gspecies::Exec;
use num_bigint::BigInt;
use std::io::Write;
use std::time::{Duration, Instant};

struct Line {
    name: &'static str,
    pass: bool,
    detail: String,
    took: Duration,
}

fn emit(l: &Line) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{} {:<28} [{:>7.2?}] {}", if l.pass { "PASS" } else { "FAIL" }, l.name, l.took, l.detail).unwrap();
}

fn summarize(suites: &[SuiteReport]) -> (bool, String) {
    let pass = suites.iter().all(|s| s.passed());
    let parts: Vec<String> = suites
        .iter()
        .map(|s| {
            let mut p = format!("{}: {} cases", s.suite, s.cases);
            if s.skipped > 0 {
                p.push_str(&format!(", {} skipped", s.skipped));
            }
            if !s.failures.is_empty() {
                p.push_str(&format!(", {} failures (first: {} {})", s.failures.len(), s.failures[0].case, s.failures[0].detail));
            }
            p
        })
        .collect();
    (pass, parts.join("; "))
}

fn golden_fg() -> Line {
    let t = Instant::now();
    let b = c3_species().exchange_matrix().unwrap();
    let r = compute_fg(&b, &[1, 0, 2], 2).unwrap();
    let took = t.elapsed();
    let one = |e: [u32; 3]| (e.to_vec(), BigInt::from(1));
    let want = IntPoly::from_terms(3, [one([0, 0, 0]), one([0, 0, 1]), one([0, 1, 1]), one([1, 1, 1])]);
    let pass = r.f == want && r.g == vec![0, 0, -1] && took < Duration::from_secs(1);
    let names: Vec<String> = (1..=3).map(|i| format!("z{i}")).collect();
    Line { name: "golden-c3-fg", pass, detail: format!("F = {}, g = {:?}", r.f.render(&names), r.g), took }
}

fn c3_matrix_exact() -> Line {
    let t = Instant::now();
    let b = c3_species().exchange_matrix().unwrap();
    let pass = b.rows == vec![vec![0, -1, 0], vec![1, 0, -1], vec![0, 2, 0]];
    Line { name: "c3-exchange-matrix", pass, detail: format!("{:?}", b.rows), took: t.elapsed() }
}

#[test]
fn acceptance() {
    let mut lines = Vec::new();
    let exec = Exec::Parallel;

    lines.push(golden_fg());
    emit(lines.last().unwrap());
    lines.push(c3_matrix_exact());
    emit(lines.last().unwrap());

    // dual engine: C3 up to length 6, rank 2 up to length 8
    let t = Instant::now();
    let (c3_eng, c3_ids, c3_real) = verify::dual_engine_suite("c3", &c3_gsp(), 6, exec);
    let (r2_eng, r2_ids, r2_real) = verify::dual_engine_suite("rank2", &rank2_gsp(), 8, exec);
    let took = t.elapsed();
    let (pass, detail) = summarize(&[c3_eng, r2_eng, c3_ids, r2_ids]);
    lines.push(Line { name: "dual-engine", pass: pass && took < Duration::from_secs(300), detail, took });
    emit(lines.last().unwrap());

    let t = Instant::now();
    let inputs: Vec<(String, Gsp)> = verify::involution_inputs(100, 2024);
    let inv = verify::involution_suites(&inputs, exec, 3);
    let (pass, detail) = summarize(&inv);
    lines.push(Line { name: "involution", pass, detail, took: t.elapsed() });
    emit(lines.last().unwrap());

    let t = Instant::now();
    let (pass, detail) = summarize(&[verify::b_compat_suite(&inputs, exec)]);
    lines.push(Line { name: "b-compatibility", pass, detail, took: t.elapsed() });
    emit(lines.last().unwrap());

    let t = Instant::now();
    let conj = verify::conjecture_suites(&c3_species().exchange_matrix().unwrap(), 6, exec, 2);
    let (pass, detail) = summarize(&conj);
    lines.push(Line { name: "conjectures", pass, detail, took: t.elapsed() });
    emit(lines.last().unwrap());

    let t = Instant::now();
    let e = [verify::e_invariant_suite("c3", &c3_real, exec), verify::e_invariant_suite("rank2", &r2_real, exec)];
    let (pass, detail) = summarize(&e);
    lines.push(Line { name: "e-invariant", pass, detail, took: t.elapsed() });
    emit(lines.last().unwrap());

    let t = Instant::now();
    let r = counterexample_search(&[1, 2], DualConvention::Transpose, exec);
    let took = t.elapsed();
    let robust = counterexample_search(&[1, 2], DualConvention::InvertedTranspose, exec).confirms();
    let counts: Vec<String> = r.instances.iter().chain(&r.controls).map(|i| format!("d={:?}: {}/{}", i.d, i.satisfying, i.assignments)).collect();
    lines.push(Line {
        name: "counterexample-instance",
        pass: r.confirms() && took < Duration::from_secs(120),
        detail: format!("{}; inverted-dual convention agrees: {robust}; {}", counts.join(", "), r.scope),
        took,
    });
    emit(lines.last().unwrap());

    let t = Instant::now();
    let (pass, detail) = summarize(&[verify::derivative_oracle_suite(3, 5)]);
    lines.push(Line { name: "derivative-oracle", pass, detail, took: t.elapsed() });
    emit(lines.last().unwrap());

    let failed: Vec<&str> = lines.iter().filter(|l| !l.pass).map(|l| l.name).collect();
    writeln!(std::io::stdout().lock(), "acceptance: {}/{} criteria pass", lines.len() - failed.len(), lines.len()).unwrap();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
