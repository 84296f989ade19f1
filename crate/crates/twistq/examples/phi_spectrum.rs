//! Drinfeld generators on a built-in module: the bracket recursion, the phi
//! family, and the diagonal eigenvalue series against the closed formula.
//!
//! Run with: cargo run --release --example phi_spectrum

use twistq::repcheck::{drinfeld_a2t, module_ctx, neg_prefund_a2t, predicted_weight, Label};

fn main() {
    let module = neg_prefund_a2t(10);
    let ctx = module_ctx(&module);
    let d = drinfeld_a2t(&module, 4);
    println!("phi eigenvalue series on the lowest few basis vectors:");
    for v in 0..module.dim() {
        if module.level(v) > 2 {
            continue;
        }
        let Label::Pair(i, j) = module.labels[v] else { unreachable!() };
        let predicted = predicted_weight(&ctx, &module, v);
        let series = predicted.component_series(&ctx, 0, 3);
        print!("  v({i},{j}):");
        for (p, op) in d.phi.iter().take(4).enumerate() {
            let diag = op.cols[v]
                .entries
                .iter()
                .find(|(r, _)| *r == v)
                .map(|(_, x)| x.render())
                .unwrap_or_else(|| "0".into());
            let matches = op.cols[v]
                .entries
                .iter()
                .find(|(r, _)| *r == v)
                .map(|(_, x)| *x == series[p])
                .unwrap_or(series[p].is_zero());
            print!("  phi_{p} = {diag} ({})", if matches { "ok" } else { "MISMATCH" });
        }
        println!();
    }
}
