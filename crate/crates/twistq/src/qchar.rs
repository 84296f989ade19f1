//! Truncated q-character computations: monomial expansion for the untwisted
//! simply-laced types, twisted characters by folding, prefundamental
//! characters as stabilized limits, and the normalized X characters.

use crate::field::Half;
use crate::lweight::{
    fold_weight, height_between, make_a, make_psi, make_psi_tilde, make_y, weight_alpha, LWeight,
    QCharacter, SpectralParam, WeightError,
};
use crate::root_data::Ctx;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QcharError {
    NotDominant,
    BudgetExceeded(usize),
    Inconsistent(String),
    NoStabilization { tried: usize },
    Weight(WeightError),
}

impl fmt::Display for QcharError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QcharError::NotDominant => write!(f, "expansion requires a dominant monomial"),
            QcharError::BudgetExceeded(n) => write!(f, "term budget of {n} monomials exceeded"),
            QcharError::Inconsistent(s) => write!(f, "internal consistency failure: {s}"),
            QcharError::NoStabilization { tried } => {
                write!(f, "normalized windows did not stabilize within {tried} steps")
            }
            QcharError::Weight(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for QcharError {}

impl From<WeightError> for QcharError {
    fn from(e: WeightError) -> Self {
        QcharError::Weight(e)
    }
}

pub const DEFAULT_BUDGET: usize = 1_000_000;

/// A Laurent monomial in the variables Y_{i,a} of an untwisted context.
pub type Mono = BTreeMap<(usize, SpectralParam), i64>;

pub fn mono_insert(m: &mut Mono, node: usize, a: SpectralParam, e: i64) {
    let k = (node, a);
    let v = m.entry(k).or_insert(0);
    *v += e;
    if *v == 0 {
        m.remove(&k);
    }
}

pub fn mono_is_dominant(m: &Mono) -> bool {
    m.values().all(|&e| e > 0)
}

/// Dominant monomial of the Kirillov-Reshetikhin type: Y_{i,a} Y_{i,aq^2}
/// ... Y_{i,aq^{2k-2}}.
pub fn kr_monomial(node: usize, k: u32, a: SpectralParam) -> Mono {
    let mut m = Mono::new();
    let mut b = a;
    for _ in 0..k {
        mono_insert(&mut m, node, b, 1);
        b = b.times_q(Half::from_int(2));
    }
    m
}

/// Multiply by A_{i,b}^{-1} in monomial coordinates:
/// removes Y_{i,bq} Y_{i,bq^{-1}}, adds Y_{j,b} for each neighbor j of i.
fn apply_a_inverse(ctx: &Ctx, m: &Mono, node: usize, b: SpectralParam) -> Mono {
    let c = ctx.fd.finite_type.cartan();
    let mut out = m.clone();
    mono_insert(&mut out, node, b.times_q(Half::from_int(1)), -1);
    mono_insert(&mut out, node, b.times_q(Half::from_int(-1)), -1);
    for j in 0..ctx.fd.finite_type.rank() {
        if c[node][j] == -1 {
            mono_insert(&mut out, j, b, 1);
        }
    }
    out
}

/// The i-restriction of a monomial: parameters and exponents of Y_{i,*}.
fn i_part(m: &Mono, node: usize) -> Vec<(SpectralParam, i64)> {
    m.iter()
        .filter(|((i, _), _)| *i == node)
        .map(|((_, a), &e)| (*a, e))
        .collect()
}

/// Canonical factorization of a dominant sl2 parameter multiset into q-strings
/// (greedy maximal strings from the lowest parameter in each q^2-class).
fn string_decomposition(params: &[(SpectralParam, i64)]) -> Vec<(SpectralParam, u32)> {
    let mut remaining: BTreeMap<SpectralParam, i64> = params.iter().cloned().collect();
    let mut strings = Vec::new();
    while let Some((&start, _)) = remaining.iter().next() {
        let mut len = 0u32;
        let mut cur = start;
        loop {
            match remaining.get_mut(&cur) {
                Some(v) if *v > 0 => {
                    *v -= 1;
                    if *v == 0 {
                        remaining.remove(&cur);
                    }
                    len += 1;
                    cur = cur.times_q(Half::from_int(2));
                }
                _ => break,
            }
        }
        strings.push((start, len));
    }
    strings
}

/// Terms of the sl2 string character below the highest weight: for each depth
/// r >= 1 the product A^{-1}_{b q^{2s-1}}, s = l-r+1..l.
fn string_tails(start: SpectralParam, len: u32) -> Vec<Vec<SpectralParam>> {
    let mut tails = Vec::new();
    for r in 1..=len {
        let mut tail = Vec::new();
        for s in (len - r + 1)..=len {
            tail.push(start.times_q(Half::halves(4 * s as i64 - 2)));
        }
        tails.push(tail);
    }
    tails
}

/// The multiset of A^{-1}-tails of the simple sl2 character of a dominant
/// i-part (product over the canonical strings), with multiplicities; the
/// empty tail (the highest term) is omitted.
fn sl2_tails(params: &[(SpectralParam, i64)]) -> BTreeMap<Vec<SpectralParam>, i64> {
    let strings = string_decomposition(params);
    let mut acc: BTreeMap<Vec<SpectralParam>, i64> = BTreeMap::new();
    acc.insert(Vec::new(), 1);
    for (start, len) in strings {
        let tails = string_tails(start, len);
        let mut next: BTreeMap<Vec<SpectralParam>, i64> = BTreeMap::new();
        for (prefix, mult) in &acc {
            next.entry(prefix.clone()).and_modify(|v| *v += mult).or_insert(*mult);
            for tail in &tails {
                let mut merged = prefix.clone();
                merged.extend_from_slice(tail);
                merged.sort_unstable();
                next.entry(merged).and_modify(|v| *v += mult).or_insert(*mult);
            }
        }
        acc = next;
    }
    acc.remove(&Vec::new());
    acc
}

/// Iterative completion of the truncated q-character of L(m0) for a dominant
/// monomial over a simply-laced untwisted context. Every monomial strictly
/// below the top must be consistent with the sl2 decomposition through each
/// node; inconsistency is a hard error.
pub fn expand_dominant(
    ctx: &Ctx,
    m0: &Mono,
    trunc: u32,
    budget: usize,
) -> Result<BTreeMap<Mono, i64>, QcharError> {
    assert_eq!(ctx.fd.m_order, 1, "expansion runs on the untwisted source");
    if !mono_is_dominant(m0) {
        return Err(QcharError::NotDominant);
    }
    let rank = ctx.fd.finite_type.rank();
    let mut mults: BTreeMap<Mono, i64> = BTreeMap::new();
    let mut demand: HashMap<Mono, Vec<i64>> = HashMap::new();
    let mut agenda: BTreeMap<u32, BTreeSet<Mono>> = BTreeMap::new();
    agenda.entry(0).or_default().insert(m0.clone());

    for h in 0..=trunc {
        let Some(level) = agenda.remove(&h) else { continue };
        for m in level {
            let d = demand.remove(&m).unwrap_or_else(|| vec![0; rank]);
            let mult = if h == 0 { 1 } else { *d.iter().max().unwrap() };
            if mult == 0 {
                continue;
            }
            mults.insert(m.clone(), mult);
            if mults.len() > budget {
                return Err(QcharError::BudgetExceeded(budget));
            }
            for node in 0..rank {
                let part = i_part(&m, node);
                let dominant = part.iter().all(|&(_, e)| e > 0);
                if !dominant {
                    if d[node] != mult {
                        return Err(QcharError::Inconsistent(format!(
                            "non-dominant direction {node} explains {} of {} at height {h}",
                            d[node], mult
                        )));
                    }
                    continue;
                }
                let fresh = mult - d[node];
                if fresh < 0 {
                    return Err(QcharError::Inconsistent(format!(
                        "direction {node} over-explained at height {h}"
                    )));
                }
                if fresh == 0 || part.is_empty() {
                    continue;
                }
                for (tail, tmult) in sl2_tails(&part) {
                    let hh = h + tail.len() as u32;
                    if hh > trunc {
                        continue;
                    }
                    let mut mm = m.clone();
                    for b in &tail {
                        mm = apply_a_inverse(ctx, &mm, node, *b);
                    }
                    demand.entry(mm.clone()).or_insert_with(|| vec![0; rank])[node] += fresh * tmult;
                    agenda.entry(hh).or_default().insert(mm);
                }
            }
        }
    }
    Ok(mults)
}

/// Interpret a Y-monomial as an l-weight through the standard identification.
pub fn mono_to_weight(ctx: &Ctx, m: &Mono) -> LWeight {
    let mut w = LWeight::identity(ctx);
    for (&(node, a), &e) in m {
        w = w.mul(&make_y(ctx, node, a).pow(e));
    }
    w
}

/// The truncated q-character of L(m0) over an untwisted simply-laced context.
pub fn fm_qcharacter(
    ctx: &Ctx,
    m0: &Mono,
    trunc: u32,
    budget: usize,
) -> Result<QCharacter, QcharError> {
    let monos = expand_dominant(ctx, m0, trunc, budget)?;
    let base = mono_to_weight(ctx, m0);
    let mut out = QCharacter { base, terms: BTreeMap::new(), trunc };
    for (m, mult) in monos {
        let w = mono_to_weight(ctx, &m);
        *out.terms.entry(w).or_insert(0) += mult;
    }
    Ok(out)
}

/// Truncated q-character of the Kirillov-Reshetikhin module W^{(i)}_{k,a}.
///
/// Over a twisted context this is the fold of the untwisted character at the
/// fixed representative; over an untwisted context it is the plain expansion.
pub fn kr_qcharacter(
    ctx: &Ctx,
    orbit: usize,
    k: u32,
    a: SpectralParam,
    trunc: u32,
    budget: usize,
) -> Result<QCharacter, QcharError> {
    if ctx.fd.m_order == 1 {
        let m0 = kr_monomial(orbit, k, a);
        return fm_qcharacter(ctx, &m0, trunc, budget);
    }
    let src = Ctx::untwisted(ctx.fd.finite_type, ctx.lattice);
    let rep = ctx.fd.fixed_reps[orbit];
    let m0 = kr_monomial(rep, k, a);
    let monos = expand_dominant(&src, &m0, trunc, budget)?;
    let base = fold_weight(&src, ctx, &mono_to_weight(&src, &m0));
    let mut out = QCharacter { base, terms: BTreeMap::new(), trunc };
    for (m, mult) in monos {
        let w = fold_weight(&src, ctx, &mono_to_weight(&src, &m));
        *out.terms.entry(w).or_insert(0) += mult;
    }
    Ok(out)
}

/// Result of a stabilized limit computation.
pub struct Stabilized {
    pub character: QCharacter,
    /// the first k at which two consecutive normalized windows agreed
    pub stabilized_at: u32,
}

/// Normalized KR window: chi(W^{(i)}_{k, a q^{-2k+1}}) divided by its top
/// term, at the given truncation height.
pub fn normalized_kr_window(
    ctx: &Ctx,
    orbit: usize,
    k: u32,
    a: SpectralParam,
    trunc: u32,
    budget: usize,
) -> Result<QCharacter, QcharError> {
    let start = a.times_q(Half::from_int(-(2 * k as i64) + 1));
    Ok(kr_qcharacter(ctx, orbit, k, start, trunc, budget)?.normalized())
}

/// chi_q of the negative prefundamental representation, computed as the
/// stabilized limit of normalized KR characters times [Psi^-].
pub fn neg_prefund_qchar(
    ctx: &Ctx,
    orbit: usize,
    a: SpectralParam,
    trunc: u32,
    budget: usize,
) -> Result<Stabilized, QcharError> {
    let margin = 4;
    let mut prev: Option<QCharacter> = None;
    for k in 1..=(trunc + margin) {
        let window = normalized_kr_window(ctx, orbit, k, a, trunc, budget)?;
        if let Some(p) = &prev {
            if p.terms == window.terms {
                let psi = make_psi(ctx, orbit, a, false);
                return Ok(Stabilized { character: window.scale_weight(&psi), stabilized_at: k });
            }
        }
        prev = Some(window);
    }
    Err(QcharError::NoStabilization { tried: (trunc + margin) as usize })
}

/// chi_q of the positive prefundamental representation: [Psi^+] times the
/// usual character extracted from the negative one.
pub fn pos_prefund_qchar(
    ctx: &Ctx,
    orbit: usize,
    a: SpectralParam,
    trunc: u32,
    budget: usize,
) -> Result<QCharacter, QcharError> {
    let neg = neg_prefund_qchar(ctx, orbit, a, trunc, budget)?;
    let usual = neg.character.normalized().usual_character();
    let psi = make_psi(ctx, orbit, a, true);
    Ok(usual.scale_weight(&psi))
}

/// The chain sum_{r>=0} (A_{i,a} A_{i,aq^{-2}} ... A_{i,aq^{-2r+2}})^{-1},
/// truncated at the given height.
pub fn chi_chain(ctx: &Ctx, orbit: usize, a: SpectralParam, trunc: u32) -> QCharacter {
    let mut out = QCharacter::single(LWeight::identity(ctx), trunc);
    let mut acc = LWeight::identity(ctx);
    let mut b = a;
    for _ in 1..=trunc {
        acc = acc.mul(&make_a(ctx, orbit, b).inv());
        b = b.times_q(Half::from_int(-2));
        out.insert(acc.clone(), 1);
    }
    out
}

/// 1 + w + w^2 + ... for a pure weight strictly inside the cone, truncated.
pub fn geometric_weight_series(ctx: &Ctx, w: &LWeight, trunc: u32) -> QCharacter {
    let mut out = QCharacter::single(LWeight::identity(ctx), trunc);
    let mut acc = LWeight::identity(ctx);
    for _ in 1..=trunc {
        acc = acc.mul(w);
        if height_between(ctx, &out.base, &acc).map(|h| h <= trunc) != Some(true) {
            break;
        }
        out.insert(acc.clone(), 1);
    }
    out
}

/// The normalized character of X_{i,a}:
/// [Psi~_{i,a}] chi_{i,a} (1 - [-alpha_i]), truncated.
pub fn normalized_x_qchar(ctx: &Ctx, orbit: usize, a: SpectralParam, trunc: u32) -> QCharacter {
    let psi_tilde = make_psi_tilde(ctx, orbit, a);
    let chain = chi_chain(ctx, orbit, a, trunc);
    let mut correction = QCharacter::single(LWeight::identity(ctx), trunc);
    correction.insert(weight_alpha(ctx, orbit, -1), -1);
    chain.mul(ctx, &correction).scale_weight(&psi_tilde)
}

/// Fold an untwisted truncated character termwise.
pub fn fold_char(src: &Ctx, dst: &Ctx, c: &QCharacter) -> QCharacter {
    let base = fold_weight(src, dst, &c.base);
    let mut terms = BTreeMap::new();
    for (w, &m) in &c.terms {
        *terms.entry(fold_weight(src, dst, w)).or_insert(0) += m;
    }
    terms.retain(|_, v| *v != 0);
    QCharacter { base, terms, trunc: c.trunc }
}

/// Every non-leading term must be the leading term times a product of A^{-1}
/// factors: checkable as cone membership of the t-weight offsets.
pub fn cone_property_holds(ctx: &Ctx, c: &QCharacter) -> bool {
    c.terms.keys().all(|w| height_between(ctx, &c.base, w).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_data::FiniteType;

    fn sp(l: u32, h: i64) -> SpectralParam {
        SpectralParam::q_pow(l, Half::from_int(h))
    }

    #[test]
    fn sl2_string_character() {
        // W_2(a): exactly three terms at heights 0,1,2
        let ctx = Ctx::untwisted(FiniteType::A(1), 2);
        let m0 = kr_monomial(0, 2, sp(2, 0));
        let monos = expand_dominant(&ctx, &m0, 5, 10_000).unwrap();
        assert_eq!(monos.len(), 3);
        assert!(monos.values().all(|&m| m == 1));
        // the doubled parameter gives the 4-dimensional tensor square
        let mut sq = Mono::new();
        mono_insert(&mut sq, 0, sp(2, 0), 2);
        let monos = expand_dominant(&ctx, &sq, 5, 10_000).unwrap();
        let total: i64 = monos.values().sum();
        assert_eq!(total, 4);
    }

    #[test]
    fn sl3_fundamental_three_terms() {
        let ctx = Ctx::untwisted(FiniteType::A(2), 2);
        let mut m0 = Mono::new();
        mono_insert(&mut m0, 0, sp(2, 0), 1);
        let c = fm_qcharacter(&ctx, &m0, 3, 10_000).unwrap();
        assert_eq!(c.total_multiplicity(), 3);
        assert!(cone_property_holds(&ctx, &c));
        // truncation at height 0 keeps only the dominant term
        let c0 = fm_qcharacter(&ctx, &m0, 0, 10_000).unwrap();
        assert_eq!(c0.total_multiplicity(), 1);
        // explicit monomials: Y_{1,a}, Y_{1,aq^2}^{-1} Y_{2,aq}, Y_{2,aq^3}^{-1}
        let monos = expand_dominant(&ctx, &m0, 3, 10_000).unwrap();
        let mut expect1 = Mono::new();
        mono_insert(&mut expect1, 0, sp(2, 2), -1);
        mono_insert(&mut expect1, 1, sp(2, 1), 1);
        let mut expect2 = Mono::new();
        mono_insert(&mut expect2, 1, sp(2, 3), -1);
        assert!(monos.contains_key(&m0));
        assert!(monos.contains_key(&expect1));
        assert!(monos.contains_key(&expect2));
    }

    #[test]
    fn sl3_two_node_dimension_nine() {
        // L(Y_{1,1} Y_{2,-q^2}) has dimension 9
        let ctx = Ctx::untwisted(FiniteType::A(2), 2);
        let mut m0 = Mono::new();
        mono_insert(&mut m0, 0, sp(2, 0), 1);
        mono_insert(&mut m0, 1, sp(2, 2).negate(), 1);
        let c = fm_qcharacter(&ctx, &m0, 12, 10_000).unwrap();
        assert_eq!(c.total_multiplicity(), 9);
    }

    #[test]
    fn a2t_kr_dimension_six() {
        // the twisted KR module with top Z_{1,1} Z_{1,q^2} has dimension 6
        let ctx = Ctx::twisted("A2^2").unwrap();
        let c = kr_qcharacter(&ctx, 0, 2, sp(2, 0), 12, 10_000).unwrap();
        assert_eq!(c.total_multiplicity(), 6);
        assert!(cone_property_holds(&ctx, &c));
        assert!(c.terms.keys().all(|w| w.twist_ok(&ctx)));
        // k = 1 is the fold of the sl3 fundamental: 3 terms
        let c1 = kr_qcharacter(&ctx, 0, 1, sp(2, 0), 8, 10_000).unwrap();
        assert_eq!(c1.total_multiplicity(), 3);
        // trunc 0 keeps the dominant term only
        let c0 = kr_qcharacter(&ctx, 0, 2, sp(2, 0), 0, 10_000).unwrap();
        assert_eq!(c0.total_multiplicity(), 1);
    }

    #[test]
    fn d4_trivalent_fundamental_dimension() {
        // the loop-algebra fundamental at the trivalent node of D4 restricts
        // to adjoint + trivial, dimension 29, with a multiplicity-2 l-weight
        // in the 5-dimensional zero-weight space
        let ctx = Ctx::untwisted(FiniteType::D(4), 2);
        let mut m0 = Mono::new();
        mono_insert(&mut m0, 1, sp(2, 0), 1);
        let c = fm_qcharacter(&ctx, &m0, 16, 100_000).unwrap();
        assert_eq!(c.total_multiplicity(), 29);
        assert!(c.terms.values().any(|&m| m == 2));
        // zero-weight space: the identity t-weight carries multiplicity 5
        let zero: i64 = c
            .normalized()
            .usual_character()
            .terms
            .iter()
            .filter(|(w, _)| {
                w.consts
                    == c.normalized()
                        .usual_character()
                        .base
                        .mul(&weight_alpha(&ctx, 0, -1).mul(&weight_alpha(&ctx, 2, -1)).mul(
                            &weight_alpha(&ctx, 3, -1).mul(&weight_alpha(&ctx, 1, -2)),
                        ))
                        .consts
            })
            .map(|(_, &m)| m)
            .sum();
        assert_eq!(zero, 5);
    }

    #[test]
    fn neg_prefund_a2t_matches_double_sum() {
        // the L^- character window equals the double A-chain sum over
        // 0 <= i <= j times [Psi^-]
        let ctx = Ctx::twisted("A2^2").unwrap();
        let trunc = 4;
        let got = neg_prefund_qchar(&ctx, 0, sp(2, 0), trunc, 100_000).unwrap();
        let psi = make_psi(&ctx, 0, sp(2, 0), false);
        let mut expect: BTreeMap<LWeight, i64> = BTreeMap::new();
        for j in 0..=(trunc as i64) {
            for i in 0..=j {
                if i + j > trunc as i64 {
                    continue;
                }
                let mut w = psi.clone();
                for m in 0..j {
                    w = w.mul(&make_a(&ctx, 0, sp(2, -2 * m)).inv());
                }
                for m in 0..i {
                    w = w.mul(&make_a(&ctx, 0, sp(2, 1 - 2 * m).negate()).inv());
                }
                *expect.entry(w).or_insert(0) += 1;
            }
        }
        assert_eq!(got.character.terms, expect);
    }

    #[test]
    fn pos_prefund_usual_coefficients() {
        // usual character coefficients at heights 0,1,2,3 are 1,1,2,2
        let ctx = Ctx::twisted("A2^2").unwrap();
        let c = pos_prefund_qchar(&ctx, 0, sp(2, 0), 3, 100_000).unwrap();
        let psi = make_psi(&ctx, 0, sp(2, 0), true);
        for (k, expect) in [(0i64, 1i64), (1, 1), (2, 2), (3, 2)] {
            let w = psi.mul(&weight_alpha(&ctx, 0, -k));
            assert_eq!(c.terms.get(&w).copied().unwrap_or(0), expect, "height {k}");
        }
        assert_eq!(c.terms.len(), 4);
        // trunc 0 is [Psi^+] alone
        let c0 = pos_prefund_qchar(&ctx, 0, sp(2, 0), 0, 100_000).unwrap();
        assert_eq!(c0, QCharacter::single(psi, 0));
    }

    #[test]
    fn usual_characters_of_prefundamentals_agree() {
        let ctx = Ctx::twisted("A2^2").unwrap();
        let neg = neg_prefund_qchar(&ctx, 0, sp(2, 0), 4, 100_000).unwrap();
        let pos = pos_prefund_qchar(&ctx, 0, sp(2, 0), 4, 100_000).unwrap();
        assert_eq!(
            neg.character.normalized().usual_character().terms,
            pos.normalized().usual_character().terms
        );
    }

    #[test]
    fn normalized_x_shapes() {
        let ctx = Ctx::twisted("A2^2").unwrap();
        let a = sp(2, 0);
        // trunc 0 keeps [Psi~] alone
        let c0 = normalized_x_qchar(&ctx, 0, a, 0);
        assert_eq!(c0, QCharacter::single(make_psi_tilde(&ctx, 0, a), 0));
        // leading structure [Psi~](1 + A^{-1}_{1,1} + ...)(1 - [-alpha])
        let c2 = normalized_x_qchar(&ctx, 0, a, 2);
        let psi = make_psi_tilde(&ctx, 0, a);
        assert_eq!(c2.terms.get(&psi), Some(&1));
        assert_eq!(c2.terms.get(&psi.mul(&weight_alpha(&ctx, 0, -1))), Some(&-1));
        assert_eq!(c2.terms.get(&psi.mul(&make_a(&ctx, 0, a).inv())), Some(&1));
    }

    #[test]
    fn limit_stabilization_windows() {
        // the height-h window of the normalized KR character is constant for
        // k >= h+1
        for name in ["A2^2", "A3^2"] {
            let ctx = Ctx::twisted(name).unwrap();
            for orbit in 0..ctx.n_orbits() {
                for h in 0..=3u32 {
                    let w1 =
                        normalized_kr_window(&ctx, orbit, h + 1, sp(ctx.lattice, 0), h, 100_000).unwrap();
                    let w2 =
                        normalized_kr_window(&ctx, orbit, h + 2, sp(ctx.lattice, 0), h, 100_000).unwrap();
                    assert_eq!(w1.terms, w2.terms, "{name} orbit {orbit} height {h}");
                }
            }
        }
    }

    #[test]
    fn fold_is_a_ring_homomorphism() {
        // fold(x * y) = fold(x) * fold(y) on randomized truncated characters
        let ctx = Ctx::twisted("A2^2").unwrap();
        let src = Ctx::untwisted(ctx.fd.finite_type, ctx.lattice);
        let mut seed = 0x2718u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..10 {
            let mut x = QCharacter::single(LWeight::identity(&src), 4);
            let mut y = QCharacter::single(LWeight::identity(&src), 4);
            for c in [&mut x, &mut y] {
                for _ in 0..3 {
                    let node = (next() % 2) as usize;
                    let h = (next() % 5) as i64 - 2;
                    let depth = (next() % 3) as usize + 1;
                    let mut w = LWeight::identity(&src);
                    for d in 0..depth {
                        w = w.mul(&make_a(&src, node, sp(2, h - 2 * d as i64)).inv());
                    }
                    c.insert(w, (next() % 3) as i64 + 1);
                }
            }
            let lhs = fold_char(&src, &ctx, &x.mul(&src, &y));
            let rhs = fold_char(&src, &ctx, &x).mul(&ctx, &fold_char(&src, &ctx, &y));
            assert_eq!(lhs.terms, rhs.terms);
        }
    }

    #[test]
    fn budget_guard_fires() {
        let ctx = Ctx::untwisted(FiniteType::A(2), 2);
        let m0 = kr_monomial(0, 3, sp(2, 0));
        assert!(matches!(expand_dominant(&ctx, &m0, 10, 2), Err(QcharError::BudgetExceeded(2))));
        let mut neg = Mono::new();
        mono_insert(&mut neg, 0, sp(2, 0), -1);
        assert!(matches!(expand_dominant(&ctx, &neg, 3, 100), Err(QcharError::NotDominant)));
    }
}
