//! Truncated q-characters of fundamental and Kirillov-Reshetikhin modules:
//! the rank-two untwisted expansions, their folds, and the dimension
//! counterexample 6 vs 9.
//!
//! Run with: cargo run --release --example fundamental_characters

use twistq::field::Half;
use twistq::lweight::SpectralParam;
use twistq::qchar::{fm_qcharacter, kr_qcharacter, mono_insert, Mono};
use twistq::root_data::{Ctx, FiniteType};

fn main() {
    let sl3 = Ctx::untwisted(FiniteType::A(2), 2);
    let one = SpectralParam::one(2);
    let mut m0 = Mono::new();
    mono_insert(&mut m0, 0, one, 1);
    let fund = fm_qcharacter(&sl3, &m0, 6, 1_000_000).unwrap();
    println!("untwisted rank-two fundamental: {} terms", fund.total_multiplicity());

    let a2t = Ctx::twisted("A2^2").unwrap();
    for k in 1..=3 {
        let c = kr_qcharacter(&a2t, 0, k, one, 16, 1_000_000).unwrap();
        println!("twisted KR k={k}: total multiplicity {}", c.total_multiplicity());
    }

    // the folded two-node highest weight has dimension 6, its unfolded
    // preimage dimension 9
    let mut m9 = Mono::new();
    mono_insert(&mut m9, 0, one, 1);
    mono_insert(&mut m9, 1, SpectralParam::q_pow(2, Half::from_int(2)).negate(), 1);
    let c9 = fm_qcharacter(&sl3, &m9, 16, 1_000_000).unwrap();
    let c6 = kr_qcharacter(&a2t, 0, 2, one, 16, 1_000_000).unwrap();
    println!("folded module: {}   unfolded module: {}", c6.total_multiplicity(), c9.total_multiplicity());
}
