//! The full verification suite: one function per acceptance criterion, each
//! returning a bundle of pass/fail reports. The command-line `verify-all`
//! and the acceptance test target both run these.

use crate::field::{qnumber, CycloRational, Half};
use crate::identities::{
    bethe_equations, degenerate_constant_q_fails, numeric_consistency, tq_relation, verify_counterexamples,
    verify_qq, verify_qq_fold_consistency, BetheFactor, TqTerm,
};
use crate::lweight::{LWeight, QCharacter, SpectralParam};
use crate::qchar::{
    fold_char, kr_qcharacter, neg_prefund_qchar, normalized_kr_window, pos_prefund_qchar, QcharError,
    DEFAULT_BUDGET,
};
use crate::repcheck::{
    drinfeld_a2t, load_builtin, module_ctx, neg_prefund_a2t, pos_prefund_a2t, predicted_weight,
    qchar_from_module, spectrum_matches, verify_coproduct_on_highest, verify_phi_vanishing,
    verify_presentation, x_a2t, BUILTIN_MODULES,
};
use crate::report::{CheckReport, ReportBundle};
use crate::root_data::{det_closed_form, det_f, det_f_prime, det_prime_closed_form, parse_type_name, Ctx};
use std::collections::BTreeMap;

fn sp(l: u32, h: i64) -> SpectralParam {
    SpectralParam::q_pow(l, Half::from_int(h))
}

/// Criterion 1: the structure-constant determinants match their closed
/// forms for k = 1..4 in each divisibility class, with the one-factor
/// deviation of the E6 full determinant pinned explicitly.
pub fn criterion_determinants() -> ReportBundle {
    let mut out = ReportBundle::default();
    // the gate is k = 1..4 per divisibility class; the sweep runs to 6 to
    // cover the stated invariant range
    for name in ["A3^2", "A5^2", "D3^2", "D4^2", "E6^2", "D4^3"] {
        let ctx = Ctx::twisted(name).unwrap();
        let m = ctx.fd.m_order as i64;
        for k in 1..=6i64 {
            let det = det_f(&ctx, m * k).unwrap();
            let cf = det_closed_form(&ctx, k).unwrap().unwrap();
            out.push(if det == cf {
                CheckReport::pass(
                    format!("detf/{name}/k={k}"),
                    "full determinant equals its closed form",
                    1,
                )
            } else {
                CheckReport::fail(
                    format!("detf/{name}/k={k}"),
                    "full determinant equals its closed form",
                    1,
                    format!("det = {}", det.render()),
                )
            });
            let kp = (1..).filter(|x| x % m != 0).nth(k as usize - 1).unwrap();
            let detp = det_f_prime(&ctx, kp).unwrap();
            let cfp = det_prime_closed_form(&ctx, kp).unwrap().unwrap();
            out.push(if detp == cfp {
                CheckReport::pass(
                    format!("detf-prime/{name}/k={kp}"),
                    "non-fixed submatrix determinant equals its closed form",
                    1,
                )
            } else {
                CheckReport::fail(
                    format!("detf-prime/{name}/k={kp}"),
                    "non-fixed submatrix determinant equals its closed form",
                    1,
                    format!("det = {}", detp.render()),
                )
            });
        }
    }
    // the E6 full determinant differs from the widely quoted product with a
    // [3]-type middle factor by exactly that factor's middle sign
    let ctx = Ctx::twisted("E6^2").unwrap();
    for k in 1..=2i64 {
        let det = det_f(&ctx, 2 * k).unwrap();
        let printed = {
            let n2 = |mm: i64, dd: i64| qnumber(1, mm, Half::from_int(dd)).unwrap();
            CycloRational::from_int(1, 4)
                .mul(&n2(2, k).pow(2).unwrap())
                .mul(&n2(3, 4 * k))
                .mul(&qnumber(1, k, Half::from_int(1)).unwrap().pow(2).unwrap())
                .mul(&qnumber(1, k, Half::from_int(2)).unwrap().pow(2).unwrap())
        };
        let ratio_expected = {
            // derived / printed = (q^{8k} - 1 + q^{-8k}) / (q^{8k} + 1 + q^{-8k})
            let n2 = |mm: i64, dd: i64| qnumber(1, mm, Half::from_int(dd)).unwrap();
            n2(2, 12 * k).div(&n2(2, 4 * k)).unwrap().div(&n2(3, 4 * k)).unwrap()
        };
        let ok = det != printed && det.div(&printed).unwrap() == ratio_expected;
        out.push(if ok {
            CheckReport::pass(
                format!("detf/E6^2/printed-variant/k={k}"),
                "the plus-sign variant of the middle factor differs from the determinant by exactly that factor",
                1,
            )
        } else {
            CheckReport::fail(
                format!("detf/E6^2/printed-variant/k={k}"),
                "the plus-sign variant of the middle factor differs from the determinant by exactly that factor",
                1,
                "unexpected relation between the two products",
            )
        });
    }
    // doubled family: invertibility at sampled numeric q only
    for name in ["A2^2", "A4^2"] {
        let (ft, sigma) = parse_type_name(name).unwrap();
        let ctx = Ctx::twisted_from(ft, &sigma).unwrap();
        let mut ok = true;
        for k in 1..=4i64 {
            let v = if k % 2 == 0 { det_f(&ctx, k).unwrap() } else { det_f_prime(&ctx, k).unwrap() };
            let num = v.eval_at_q(num_complex::Complex64::new(1.25, 0.0)).unwrap();
            ok &= !v.is_zero() && num.norm() > 1e-9;
        }
        out.push(if ok {
            CheckReport::pass(
                format!("detf/{name}/invertibility"),
                "determinants are nonzero symbolically and at q = 5/4",
                4,
            )
        } else {
            CheckReport::fail(
                format!("detf/{name}/invertibility"),
                "determinants are nonzero symbolically and at q = 5/4",
                4,
                "a determinant vanished",
            )
        });
    }
    out
}

/// Criterion 2: every defining relation of all four built-in modules holds
/// on the interior of the N = 10 window.
pub fn criterion_presentations() -> ReportBundle {
    let mut out = ReportBundle::default();
    for name in BUILTIN_MODULES {
        let m = load_builtin(name, 10).unwrap();
        for mut check in verify_presentation(&m) {
            check.id = format!("presentation/{name}/{}", check.id.trim_start_matches("relation/"));
            out.push(check);
        }
    }
    out
}

/// Criterion 3: the diagonal phi eigenvalue series on the negative
/// prefundamental window matches the closed rational formula for i + j <= 8.
pub fn criterion_phi_spectrum() -> ReportBundle {
    let mut out = ReportBundle::default();
    let module = neg_prefund_a2t(16);
    let ctx = module_ctx(&module);
    let p_max = 8usize;
    let d = drinfeld_a2t(&module, p_max);
    // the closed rational formula per vector, as a factored weight
    let formula = |i: i64, j: i64| -> LWeight {
        let l = ctx.lattice;
        let mut w = LWeight::identity(&ctx);
        w.consts[0] = sp(l, -(i + j));
        let num = [
            sp(l, 3).negate(),      // 1 + q^3 u
            sp(l, -2 * i + 2),      // 1 - q^{-2i+2} u
            sp(l, -2 * j + 1).negate(), // 1 + q^{-2j+1} u
        ];
        let den = [
            sp(l, -2 * i + 1).negate(),
            sp(l, -2 * i + 3).negate(),
            sp(l, -2 * j),
            sp(l, -2 * j + 2),
        ];
        for a in num {
            let e = w.roots[0].entry(a).or_insert(0);
            *e += 1;
        }
        for a in den {
            let e = w.roots[0].entry(a).or_insert(0);
            *e -= 1;
        }
        w.roots[0].retain(|_, v| *v != 0);
        w
    };
    let mut formula_ok = true;
    let mut series_ok = true;
    let mut diag_ok = true;
    let mut checked = 0usize;
    let mut witness = String::new();
    for v in 0..module.dim() {
        let (i, j) = match module.labels[v] {
            crate::repcheck::Label::Pair(i, j) => (i, j),
            _ => unreachable!(),
        };
        if i + j > 8 {
            continue;
        }
        let predicted = predicted_weight(&ctx, &module, v);
        if formula(i, j) != predicted {
            formula_ok = false;
            witness = format!("closed formula vs A-chain mismatch at ({i},{j})");
        }
        let series = predicted.component_series(&ctx, 0, p_max);
        for (p, op) in d.phi.iter().take(p_max + 1).enumerate() {
            let col = &op.cols[v];
            if col.overflow {
                series_ok = false;
                witness = format!("vector ({i},{j}) not interior for phi_{p}");
                continue;
            }
            if col.entries.iter().any(|(r, _)| *r != v) {
                diag_ok = false;
                witness = format!("off-diagonal phi_{p} at ({i},{j})");
            }
            let got = col
                .entries
                .iter()
                .find(|(r, _)| *r == v)
                .map(|(_, x)| x.clone())
                .unwrap_or_else(|| CycloRational::zero(1));
            checked += 1;
            if got != series[p] {
                series_ok = false;
                witness = format!("phi_{p} eigenvalue mismatch at ({i},{j})");
            }
        }
    }
    let all = formula_ok && series_ok && diag_ok;
    out.push(if all {
        CheckReport::pass(
            "phi-spectrum/neg_prefund_A2t",
            "generalized phi eigenvalues equal the closed rational formula for i+j <= 8",
            checked,
        )
    } else {
        CheckReport::fail(
            "phi-spectrum/neg_prefund_A2t",
            "generalized phi eigenvalues equal the closed rational formula for i+j <= 8",
            checked,
            witness,
        )
    });
    out
}

/// Criterion 4: the l-weight decompositions computed from the module
/// matrices equal the four closed-form character windows up to height 8.
pub fn criterion_module_characters() -> ReportBundle {
    let mut out = ReportBundle::default();
    // the series depth per module is the smallest that still separates all
    // expected l-weights in the window; the separation assertion inside
    // spectrum_matches guards the choice
    let cases: Vec<(&str, i64, usize)> = vec![
        ("neg_prefund_A2t", 8, 5),
        ("pos_prefund_A2t", 8, 2),
        ("X_A2t", 8, 4),
        ("Xtilde_sl3", 8, 3),
    ];
    for (name, level, p_max) in cases {
        let module = load_builtin(name, (level + 4).max(12)).unwrap();
        let ctx = module_ctx(&module);
        match qchar_from_module(&module, level, p_max) {
            Ok(spect) => {
                let mut expected = QCharacter {
                    base: predicted_weight(&ctx, &module, module.highest),
                    terms: BTreeMap::new(),
                    trunc: level as u32,
                };
                for v in 0..module.dim() {
                    if module.level(v) <= level {
                        *expected.terms.entry(predicted_weight(&ctx, &module, v)).or_insert(0) += 1;
                    }
                }
                let mut r = spectrum_matches(&ctx, &spect, &expected);
                r.id = format!("module-char/{name}");
                out.push(r);
            }
            Err(e) => out.push(CheckReport::fail(
                format!("module-char/{name}"),
                "module spectrum equals the closed-form window",
                0,
                e.to_string(),
            )),
        }
    }
    out
}

/// Criterion 5: the dimension counterexample and the normalized repair.
pub fn criterion_counterexamples() -> ReportBundle {
    let mut out = ReportBundle::default();
    match verify_counterexamples(6) {
        Ok(rs) => out.extend(rs),
        Err(e) => out.push(CheckReport::fail("counterexample/suite", "counterexample checks", 0, e.to_string())),
    }
    out
}

/// Criterion 6: the QQ~ system at every orbit of the four types, at three
/// spectral parameters, truncation height 6, exactly.
pub fn criterion_qq() -> ReportBundle {
    let mut out = ReportBundle::default();
    for name in ["A2^2", "A3^2", "D3^2", "D4^3"] {
        let ctx = Ctx::twisted(name).unwrap();
        let l = ctx.lattice;
        for orbit in 0..ctx.n_orbits() {
            for a in [sp(l, 0), sp(l, 1), sp(l, 0).negate()] {
                out.push(verify_qq(&ctx, orbit, a, 6));
            }
        }
        // the fold path gives the same identity
        out.push(verify_qq_fold_consistency(&ctx, 0, sp(l, 0), 3));
    }
    out
}

/// Criterion 7: the TQ relation of the rank-one type matches the three-term
/// template exactly and balances at truncation 4; the rank-two type balances
/// as well.
pub fn criterion_tq() -> ReportBundle {
    let mut out = ReportBundle::default();
    let ctx = Ctx::twisted("A2^2").unwrap();
    let a = sp(ctx.lattice, 0);
    match tq_relation(&ctx, 0, a, 4) {
        Ok((id, reports)) => {
            out.extend(reports);
            let expect = vec![
                TqTerm { omegas: vec![(0, 1)], q_classes: vec![(0, sp(2, -1), 1), (0, sp(2, 1), -1)] },
                TqTerm {
                    omegas: vec![],
                    q_classes: vec![
                        (0, sp(2, 0).negate(), 1),
                        (0, sp(2, 1), -1),
                        (0, sp(2, 2).negate(), -1),
                        (0, sp(2, 3), 1),
                    ],
                },
                TqTerm {
                    omegas: vec![(0, -1)],
                    q_classes: vec![(0, sp(2, 2).negate(), -1), (0, sp(2, 4).negate(), 1)],
                },
            ];
            let ok = id.terms.len() == 3 && expect.iter().all(|t| id.terms.contains(t));
            out.push(if ok {
                CheckReport::pass(
                    "tq/A2^2/template",
                    "three-term identity matches the canonical template symbol for symbol",
                    3,
                )
            } else {
                CheckReport::fail(
                    "tq/A2^2/template",
                    "three-term identity matches the canonical template symbol for symbol",
                    3,
                    id.render(),
                )
            });
        }
        Err(e) => out.push(CheckReport::fail("tq/A2^2", "TQ relation", 0, e.to_string())),
    }
    for name in ["A3^2"] {
        let ctx = Ctx::twisted(name).unwrap();
        for orbit in 0..ctx.n_orbits() {
            match tq_relation(&ctx, orbit, sp(ctx.lattice, 0), 4) {
                Ok((_, reports)) => {
                    for mut r in reports {
                        r.id = format!("{}/orbit{}", r.id, orbit + 1);
                        out.push(r);
                    }
                }
                Err(e) => out.push(CheckReport::fail(
                    format!("tq/{name}/orbit{}", orbit + 1),
                    "TQ relation",
                    0,
                    e.to_string(),
                )),
            }
        }
    }
    out
}

/// Criterion 8: normalized twisted characters equal folded normalized
/// untwisted characters, for KR modules with k <= 3 and prefundamental
/// windows to height 6.
pub fn criterion_folding_instances() -> ReportBundle {
    let mut out = ReportBundle::default();
    let ctx = Ctx::twisted("A2^2").unwrap();
    let src = Ctx::untwisted(ctx.fd.finite_type, ctx.lattice);
    let one = SpectralParam::one(ctx.lattice);
    let trunc = 6u32;
    let normalize = |c: &QCharacter, cx: &Ctx| -> Result<QCharacter, QcharError> {
        let usual = c.normalized().usual_character();
        let inv = usual.inverse_series(cx)?;
        Ok(c.mul(cx, &inv.scale_weight(&c.base.varpi_weight().inv())))
    };
    for k in 1..=3u32 {
        let check = (|| -> Result<CheckReport, QcharError> {
            let twisted = kr_qcharacter(&ctx, 0, k, one, trunc, DEFAULT_BUDGET)?;
            let untw = kr_qcharacter(&src, 0, k, one, trunc, DEFAULT_BUDGET)?;
            let lhs = normalize(&twisted, &ctx)?;
            let rhs = fold_char(&src, &ctx, &normalize(&untw, &src)?);
            Ok(if lhs.terms == rhs.terms {
                CheckReport::pass(
                    format!("folding/kr-k{k}"),
                    "normalized twisted KR character equals the folded normalized untwisted one",
                    lhs.terms.len(),
                )
            } else {
                CheckReport::fail(
                    format!("folding/kr-k{k}"),
                    "normalized twisted KR character equals the folded normalized untwisted one",
                    lhs.terms.len(),
                    "term mismatch",
                )
            })
        })();
        out.push(check.unwrap_or_else(|e| CheckReport::fail(format!("folding/kr-k{k}"), "folding instance", 0, e.to_string())));
    }
    // prefundamental windows: both limit paths agree after normalization
    let check = (|| -> Result<Vec<CheckReport>, QcharError> {
        let mut rs = Vec::new();
        let tneg = neg_prefund_qchar(&ctx, 0, one, trunc, DEFAULT_BUDGET)?;
        let uneg = neg_prefund_qchar(&src, 0, one, trunc, DEFAULT_BUDGET)?;
        let lhs = normalize(&tneg.character, &ctx)?;
        let rhs = fold_char(&src, &ctx, &normalize(&uneg.character, &src)?);
        rs.push(if lhs.terms == rhs.terms {
            CheckReport::pass(
                "folding/neg-prefund",
                "normalized negative prefundamental window equals the folded untwisted one",
                lhs.terms.len(),
            )
            .with_note(format!("twisted limit stabilized at k = {}", tneg.stabilized_at))
        } else {
            CheckReport::fail(
                "folding/neg-prefund",
                "normalized negative prefundamental window equals the folded untwisted one",
                lhs.terms.len(),
                "term mismatch",
            )
        });
        let tpos = pos_prefund_qchar(&ctx, 0, one, trunc, DEFAULT_BUDGET)?;
        let upos = pos_prefund_qchar(&src, 0, one, trunc, DEFAULT_BUDGET)?;
        let lhs = normalize(&tpos, &ctx)?;
        let rhs = fold_char(&src, &ctx, &normalize(&upos, &src)?);
        rs.push(if lhs.terms == rhs.terms {
            CheckReport::pass(
                "folding/pos-prefund",
                "normalized positive prefundamental window equals the folded untwisted one",
                lhs.terms.len(),
            )
        } else {
            CheckReport::fail(
                "folding/pos-prefund",
                "normalized positive prefundamental window equals the folded untwisted one",
                lhs.terms.len(),
                "term mismatch",
            )
        });
        Ok(rs)
    })();
    match check {
        Ok(rs) => out.extend(rs),
        Err(e) => out.push(CheckReport::fail("folding/prefund", "folding instances", 0, e.to_string())),
    }
    out
}

/// Criterion 9: vanishing at the roots of the highest-weight polynomial on
/// the N = 10 windows, plus the coproduct behavior on highest vectors.
pub fn criterion_vanishing() -> ReportBundle {
    let mut out = ReportBundle::default();
    let pos = pos_prefund_a2t(10);
    match verify_phi_vanishing(&pos, 8) {
        Ok(rs) => {
            for mut r in rs {
                r.id = format!("pos_prefund_A2t/{}", r.id);
                out.push(r);
            }
        }
        Err(e) => out.push(CheckReport::fail("vanishing/pos", "vanishing checks", 0, e.to_string())),
    }
    let x = x_a2t(10);
    match verify_phi_vanishing(&x, 6) {
        Ok(rs) => {
            for mut r in rs {
                r.id = format!("X_A2t/{}", r.id);
                out.push(r);
            }
        }
        Err(e) => out.push(CheckReport::fail("vanishing/x", "vanishing checks", 0, e.to_string())),
    }
    // precondition: the negative prefundamental is rejected
    let neg = neg_prefund_a2t(6);
    out.push(match verify_phi_vanishing(&neg, 4) {
        Err(_) => CheckReport::pass(
            "vanishing/neg-rejected",
            "non-polynomial highest weight is rejected by precondition",
            1,
        ),
        Ok(_) => CheckReport::fail(
            "vanishing/neg-rejected",
            "non-polynomial highest weight is rejected by precondition",
            1,
            "the check ran where it should not",
        ),
    });
    // coproduct on highest vectors
    let ctx = module_ctx(&pos);
    let pos6 = pos_prefund_a2t(6);
    let x6 = x_a2t(6);
    let wpos = predicted_weight(&ctx, &pos6, pos6.highest);
    let wx = predicted_weight(&ctx, &x6, x6.highest);
    for (m2, w2, label) in [(&pos6, &wpos, "pos"), (&x6, &wx, "x")] {
        match verify_coproduct_on_highest(&pos6, m2, &wpos, w2, 3) {
            Ok(rs) => {
                for mut r in rs {
                    r.id = format!("coproduct/pos-{label}/{}", r.id.trim_start_matches("coproduct/"));
                    out.push(r);
                }
            }
            Err(e) => out.push(CheckReport::fail(
                format!("coproduct/pos-{label}"),
                "coproduct on highest vectors",
                0,
                e.to_string(),
            )),
        }
    }
    out
}

/// Criterion 10: height-h windows of normalized KR characters are
/// k-independent for k >= h+1, h <= 6.
pub fn criterion_stabilization() -> ReportBundle {
    let mut out = ReportBundle::default();
    for name in ["A2^2", "A3^2", "D4^3"] {
        let ctx = Ctx::twisted(name).unwrap();
        for orbit in 0..ctx.n_orbits() {
            let mut ok = true;
            let mut witness = String::new();
            let mut checked = 0usize;
            for h in 0..=6u32 {
                let base = normalized_kr_window(&ctx, orbit, h + 1, sp(ctx.lattice, 0), h, DEFAULT_BUDGET);
                let next = normalized_kr_window(&ctx, orbit, h + 2, sp(ctx.lattice, 0), h, DEFAULT_BUDGET);
                let further = normalized_kr_window(&ctx, orbit, h + 3, sp(ctx.lattice, 0), h, DEFAULT_BUDGET);
                match (base, next, further) {
                    (Ok(a), Ok(b), Ok(c)) => {
                        checked += 1;
                        if a.terms != b.terms || b.terms != c.terms {
                            ok = false;
                            witness = format!("window differs at height {h}");
                        }
                    }
                    _ => {
                        ok = false;
                        witness = format!("window computation failed at height {h}");
                    }
                }
            }
            out.push(if ok {
                CheckReport::pass(
                    format!("stabilization/{name}/orbit{}", orbit + 1),
                    "normalized KR windows are k-independent for k >= h+1, h <= 6",
                    checked,
                )
            } else {
                CheckReport::fail(
                    format!("stabilization/{name}/orbit{}", orbit + 1),
                    "normalized KR windows are k-independent for k >= h+1, h <= 6",
                    checked,
                    witness,
                )
            });
        }
    }
    out
}

/// Criterion 11: the emitted Bethe systems match their structural templates
/// and the exact numeric consistency holds at q0 = 5/4.
pub fn criterion_bae() -> ReportBundle {
    let mut out = ReportBundle::default();
    // A3^2 templates: non-fixed orbit sees the fixed neighbor once; the
    // fixed orbit sees the non-fixed neighbor at +-a0
    let ctx = Ctx::twisted("A3^2").unwrap();
    let l = ctx.lattice;
    let sys0 = bethe_equations(&ctx, 0);
    let expect0 = vec![BetheFactor { orbit: 1, num_shift: sp(l, 1), den_shift: sp(l, -1) }];
    out.push(CheckReport::from_eq(
        "bae/A3^2/orbit1",
        "ratio template matches the instantiated column of the Cartan data",
        1,
        &sys0.rhs,
        &expect0,
    ));
    let sys1 = bethe_equations(&ctx, 1);
    let mut expect1 = vec![
        BetheFactor { orbit: 0, num_shift: sp(l, 1), den_shift: sp(l, -1) },
        BetheFactor { orbit: 0, num_shift: sp(l, 1).negate(), den_shift: sp(l, -1).negate() },
    ];
    expect1.sort();
    out.push(CheckReport::from_eq(
        "bae/A3^2/orbit2",
        "ratio template matches the instantiated column of the Cartan data",
        1,
        &sys1.rhs,
        &expect1,
    ));
    // D4^3 fixed orbit: neighbor ratios at a0 q, a0 q w, a0 q w^2
    let ctx3 = Ctx::twisted("D4^3").unwrap();
    let l3 = ctx3.lattice;
    let sys = bethe_equations(&ctx3, 1);
    let w = SpectralParam { l: l3, s_exp: 0, zeta_exp: ctx3.omega_exp() };
    let mut expect = vec![
        BetheFactor { orbit: 0, num_shift: sp(l3, 1), den_shift: sp(l3, -1) },
        BetheFactor { orbit: 0, num_shift: sp(l3, 1).mul(w), den_shift: sp(l3, -1).mul(w) },
        BetheFactor { orbit: 0, num_shift: sp(l3, 1).mul(w).mul(w), den_shift: sp(l3, -1).mul(w).mul(w) },
    ];
    expect.sort();
    out.push(CheckReport::from_eq(
        "bae/D4^3/orbit2",
        "fixed-orbit template carries the three omega-twisted neighbor ratios",
        1,
        &sys.rhs,
        &expect,
    ));
    for name in ["A3^2", "D4^3"] {
        let ctx = Ctx::twisted(name).unwrap();
        for orbit in 0..ctx.n_orbits() {
            match numeric_consistency(&ctx, orbit, 42) {
                Ok(r) => out.push(r),
                Err(e) => out.push(CheckReport::fail(
                    format!("bae-numeric/{name}/orbit{}", orbit + 1),
                    "numeric consistency",
                    0,
                    e.to_string(),
                )),
            }
        }
        out.push(degenerate_constant_q_fails(&ctx, 0));
    }
    out
}

pub const SECTIONS: [&str; 11] = [
    "detf",
    "repcheck",
    "spectrum",
    "characters",
    "counterexamples",
    "qq",
    "tq",
    "folding",
    "vanishing",
    "stabilization",
    "bae",
];

/// Run the full suite, or the named section only.
pub fn run_suite(only: Option<&str>) -> ReportBundle {
    let mut out = ReportBundle::default();
    let want = |s: &str| only.map(|o| o == s).unwrap_or(true);
    if want("detf") {
        out.extend(criterion_determinants().checks);
    }
    if want("repcheck") {
        out.extend(criterion_presentations().checks);
    }
    if want("spectrum") {
        out.extend(criterion_phi_spectrum().checks);
    }
    if want("characters") {
        out.extend(criterion_module_characters().checks);
    }
    if want("counterexamples") {
        out.extend(criterion_counterexamples().checks);
    }
    if want("qq") {
        out.extend(criterion_qq().checks);
    }
    if want("tq") {
        out.extend(criterion_tq().checks);
    }
    if want("folding") {
        out.extend(criterion_folding_instances().checks);
    }
    if want("vanishing") {
        out.extend(criterion_vanishing().checks);
    }
    if want("stabilization") {
        out.extend(criterion_stabilization().checks);
    }
    if want("bae") {
        out.extend(criterion_bae().checks);
    }
    out
}
