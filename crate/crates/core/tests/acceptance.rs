//! Acceptance suite: one PASS/FAIL line per criterion. A criterion fails if
//! its check disagrees or it runs past the limit in `CRITERIA`.

use std::process::ExitCode;

use lph::acceptance::{run, CRITERIA};

const SEED: u64 = 0;

fn main() -> ExitCode {
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for id in 1..=CRITERIA.len() {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        match run(id, SEED) {
            Ok(report) => {
                println!("{report}");
                failed += usize::from(!report.passed);
            }
            Err(e) => {
                println!("[FAIL] criterion {id:>2}: {} (error: {e})", CRITERIA[id - 1].0);
                failed += 1;
            }
        }
    }
    println!("acceptance: {failed} failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
