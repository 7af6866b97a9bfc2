//! End-to-end acceptance run: executes every numbered criterion of the
//! verification suite and prints one pass/fail line per criterion.

use catena::verify;

#[test]
fn acceptance_suite() {
    let outcome = verify::run_all();
    for c in &outcome.criteria {
        println!(
            "criterion {:2} [{}] {} — {}",
            c.id,
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    assert!(outcome.all_passed, "acceptance criteria failed");
}
