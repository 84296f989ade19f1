//! Tensor products through the coproduct: the phi series on the highest
//! tensor vector is the product of the two highest l-weights, and raising
//! modes annihilate it.
//!
//! Run with: cargo run --release --example coproduct_highest

use twistq::repcheck::{module_ctx, pos_prefund_a2t, predicted_weight, verify_coproduct_on_highest, x_a2t};

fn main() {
    let pos = pos_prefund_a2t(5);
    let x = x_a2t(5);
    let ctx = module_ctx(&pos);
    let wpos = predicted_weight(&ctx, &pos, pos.highest);
    let wx = predicted_weight(&ctx, &x, x.highest);
    for (m2, w2, label) in [(&pos, &wpos, "pos"), (&x, &wx, "X")] {
        println!("pos (x) {label}:");
        for r in verify_coproduct_on_highest(&pos, m2, &wpos, w2, 2).unwrap() {
            println!("  {:<30} {}", r.id, if r.ok() { "verified" } else { "FAILS" });
        }
    }
}
