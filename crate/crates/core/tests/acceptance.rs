//! The acceptance gate: every criterion runs at its pinned tolerance and
//! prints one pass/fail line. Run with `cargo test --test acceptance`
//! (add `-- --nocapture` to see the lines for passing criteria too).

use eqindex_core::acceptance::run_all;

#[test]
fn acceptance_criteria() {
    let outcomes = run_all();
    let mut all_ok = true;
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("[{status}] criterion {:2}: {} — {}", o.id, o.name, o.detail);
        all_ok &= o.passed;
    }
    assert!(all_ok, "acceptance criteria failed; see the lines above");
}
