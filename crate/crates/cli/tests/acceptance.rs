//! The full acceptance suite at default scales, one line per criterion.

use levy_spde_cli::acceptance::{self, check_id};
use levy_spde_cli::report::Status;
use levy_spde_cli::Config;

#[test]
fn acceptance_suite() {
    let report = acceptance::run(&Config::default());
    for c in &report.checks {
        let verdict = if c.status == Status::Pass { "PASS" } else { "FAIL" };
        println!("{verdict} {:<32} estimate={:?} reference={:?} tol={:?} {}", c.check_id, c.estimate, c.reference, c.se_or_tol, c.detail);
    }
    let ids: Vec<&str> = report.checks.iter().map(|c| c.check_id.as_str()).collect();
    let want: Vec<String> = (1..=15).map(check_id).collect();
    assert_eq!(ids, want.iter().map(String::as_str).collect::<Vec<_>>(), "one check per criterion, in order");
    let failed: Vec<&str> = report.checks.iter().filter(|c| c.status != Status::Pass).map(|c| c.check_id.as_str()).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
    assert_eq!(report.exit_code(), 0);
}
