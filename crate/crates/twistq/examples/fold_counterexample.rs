//! Folding and its limits: the dimension counterexample, the window that
//! folds to the wrong character, and the normalized repair.
//!
//! Run with: cargo run --release --example fold_counterexample

use twistq::identities::verify_counterexamples;

fn main() {
    for r in verify_counterexamples(5).unwrap() {
        println!("{:<36} {}", r.id, if r.ok() { "confirmed" } else { "FAILS" });
        if let Some(w) = &r.first_failure {
            println!("  {w}");
        }
    }
}
