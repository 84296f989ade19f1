//! Prefundamental characters as stabilized limits of normalized KR windows,
//! and the equality of the usual characters of both prefundamentals.
//!
//! Run with: cargo run --release --example prefundamental_limits

use twistq::lweight::SpectralParam;
use twistq::qchar::{neg_prefund_qchar, normalized_kr_window, pos_prefund_qchar};
use twistq::root_data::Ctx;

fn main() {
    let ctx = Ctx::twisted("A2^2").unwrap();
    let one = SpectralParam::one(ctx.lattice);
    for h in 0..=4u32 {
        let w1 = normalized_kr_window(&ctx, 0, h + 1, one, h, 1_000_000).unwrap();
        let w2 = normalized_kr_window(&ctx, 0, h + 2, one, h, 1_000_000).unwrap();
        println!("height {h}: window stable from k = {}: {}", h + 1, w1.terms == w2.terms);
    }
    let neg = neg_prefund_qchar(&ctx, 0, one, 5, 1_000_000).unwrap();
    println!(
        "negative prefundamental window: {} terms (limit stabilized at k = {})",
        neg.character.terms.len(),
        neg.stabilized_at
    );
    let pos = pos_prefund_qchar(&ctx, 0, one, 5, 1_000_000).unwrap();
    println!("positive prefundamental window: {} terms", pos.terms.len());
    let nu = neg.character.normalized().usual_character();
    let pu = pos.normalized().usual_character();
    println!("usual characters agree: {}", nu.terms == pu.terms);
}
