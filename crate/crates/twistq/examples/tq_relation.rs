//! The TQ relation generated from a fundamental character, rendered in its
//! normalized-class form and verified in the character ring.
//!
//! Run with: cargo run --release --example tq_relation

use twistq::identities::tq_relation;
use twistq::lweight::SpectralParam;
use twistq::root_data::Ctx;

fn main() {
    for name in ["A2^2", "A3^2"] {
        let ctx = Ctx::twisted(name).unwrap();
        for orbit in 0..ctx.n_orbits() {
            let (identity, reports) = tq_relation(&ctx, orbit, SpectralParam::one(ctx.lattice), 4).unwrap();
            println!("{}", identity.render());
            for r in reports {
                println!("  {:<28} {}", r.id, if r.ok() { "verified" } else { "FAILS" });
            }
        }
    }
}
