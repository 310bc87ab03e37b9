//! One line per acceptance criterion; exits nonzero if any criterion fails.

use floquet_core::validation::{run_all, CRITERIA};

fn main() {
    let report = run_all();
    assert_eq!(report.rows.len(), CRITERIA);
    for r in &report.rows {
        println!(
            "criterion {:>2} {} | {} | measured {:.6e} vs {:.6e} | {:.1} s | {}",
            r.id,
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.measured,
            r.predicted,
            r.seconds,
            r.detail
        );
    }
    let failed = report.failures();
    println!(
        "acceptance: {} of {} criteria pass",
        CRITERIA - failed,
        CRITERIA
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
