//! Bethe Ansatz equations emitted from the QQ~ system, with the exact
//! numeric consistency check over Q(zeta)(sqrt 5) at q0 = 5/4.
//!
//! Run with: cargo run --release --example bethe_ansatz

use twistq::identities::{bethe_equations, numeric_consistency};
use twistq::root_data::Ctx;

fn main() {
    for name in ["A2^2", "A3^2", "D3^2", "D4^3"] {
        let ctx = Ctx::twisted(name).unwrap();
        println!("== {name}");
        for orbit in 0..ctx.n_orbits() {
            let sys = bethe_equations(&ctx, orbit);
            println!("  {}", sys.render());
            let r = numeric_consistency(&ctx, orbit, 42).unwrap();
            println!(
                "  consistency: {}{}",
                if r.ok() { "exact" } else { "FAILED" },
                r.notes.first().map(|n| format!(" ({n})")).unwrap_or_default()
            );
        }
    }
}
