//! The QQ~ system verified exactly in the truncated character ring, across
//! the supported twisted types, orbits, and spectral parameters.
//!
//! Run with: cargo run --release --example qq_system

use twistq::field::Half;
use twistq::identities::{verify_qq, verify_qq_fold_consistency};
use twistq::lweight::SpectralParam;
use twistq::root_data::Ctx;

fn main() {
    for name in ["A2^2", "A3^2", "D3^2", "D4^3"] {
        let ctx = Ctx::twisted(name).unwrap();
        let l = ctx.lattice;
        for orbit in 0..ctx.n_orbits() {
            for a in [
                SpectralParam::one(l),
                SpectralParam::q_pow(l, Half::from_int(1)),
                SpectralParam::one(l).negate(),
            ] {
                let r = verify_qq(&ctx, orbit, a, 4);
                println!("{:<40} {}", r.id, if r.ok() { "holds exactly" } else { "FAILS" });
            }
        }
        let r = verify_qq_fold_consistency(&ctx, 0, SpectralParam::one(l), 3);
        println!("{:<40} {}", r.id, if r.ok() { "holds exactly" } else { "FAILS" });
    }
}
