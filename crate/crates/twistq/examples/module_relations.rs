//! The built-in graded modules and their defining relations: Weyl relations,
//! the central relation, and both Serre relations, verified exactly on the
//! interior of the window.
//!
//! Run with: cargo run --release --example module_relations

use twistq::repcheck::{load_builtin, verify_presentation, BUILTIN_MODULES};

fn main() {
    for name in BUILTIN_MODULES {
        let module = load_builtin(name, 8).unwrap();
        println!("== {name} (dimension {} at bound 8)", module.dim());
        for check in verify_presentation(&module) {
            println!(
                "  {:<28} {} ({} vectors)",
                check.id.trim_start_matches("relation/"),
                if check.ok() { "holds" } else { "FAILS" },
                check.checked
            );
        }
    }
}
