use std::process::ExitCode;

use fglab::verify;

fn main() -> ExitCode {
    let report = verify::run_all();
    for c in &report.criteria {
        println!("{c}");
    }
    let status = if report.passed { "PASS" } else { "FAIL" };
    println!(
        "{status} suite: {}/{} criteria in {:.1} s (limit {} s)",
        report.criteria.iter().filter(|c| c.passed).count(),
        report.criteria.len(),
        report.seconds,
        report.time_limit
    );
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
