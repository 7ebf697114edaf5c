//! Run the fast verification suite and print one line per check.

use thirdgrade::verify::{run_suite, Level};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let report = run_suite(Level::Fast, seed);
    for check in &report.checks {
        println!("{}", check.summary_line());
        if std::env::var("VERBOSE").is_ok() {
            println!("  {}", serde_json::to_string(&check.details).unwrap());
        }
    }
    println!("overall: {}", if report.passed { "PASS" } else { "FAIL" });
}
