//! Structure-constant matrices F(k) of the twisted types and their exact
//! determinants, swept against the closed forms.
//!
//! Run with: cargo run --release --example determinants

use twistq::root_data::{det_closed_form, det_f, det_f_prime, det_prime_closed_form, f_matrix, Ctx};

fn main() {
    for name in ["A3^2", "A5^2", "D3^2", "D4^2", "E6^2", "D4^3"] {
        let ctx = Ctx::twisted(name).unwrap();
        let m = ctx.fd.m_order as i64;
        println!("== {name} (orbits: {:?}, symmetrizers: {:?})", ctx.fd.orbits, ctx.tc.d);
        let f = f_matrix(&ctx, m).unwrap();
        println!("F({m}):");
        for row in &f.entries {
            println!("  [{}]", row.iter().map(|x| x.render()).collect::<Vec<_>>().join(" , "));
        }
        for k in 1..=3 {
            let det = det_f(&ctx, m * k).unwrap();
            let cf = det_closed_form(&ctx, k).unwrap().unwrap();
            println!("  det F({}) == closed form: {}", m * k, det == cf);
        }
        let kp = (1..).find(|x| x % m != 0).unwrap();
        let detp = det_f_prime(&ctx, kp).unwrap();
        let cfp = det_prime_closed_form(&ctx, kp).unwrap().unwrap();
        println!("  det F'({kp}) = {}  (closed form match: {})", detp.render(), detp == cfp);
    }
}
