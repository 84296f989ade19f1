//! The monomial calculus of l-weights and the truncated character ring.
//!
//! An l-weight is stored per orbit as a constant term on the lattice
//! q^{(1/2)Z} zeta_L^Z together with a factored rational function
//! prod (1 - a u)^{mult} whose root parameters a live on the same lattice.
//! Formal t-weights ([alpha/2] powers, fundamental-weight factors) are the
//! special case with no roots, so the whole ring multiplies componentwise.

use crate::field::{CycloNum, CycloRational, FieldError, Half};
use crate::root_data::Ctx;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightError {
    LatticeMismatch,
    NotComparable,
    TwistViolation,
    NonUnitLeading,
    PoleAtPoint,
    Parse(String),
    Field(FieldError),
}

impl fmt::Display for WeightError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightError::LatticeMismatch => write!(f, "spectral parameters on different lattices"),
            WeightError::NotComparable => write!(f, "t-weights not comparable in the root cone"),
            WeightError::TwistViolation => write!(f, "root multiset not stable under omega at a fixed orbit"),
            WeightError::NonUnitLeading => write!(f, "series has non-unit leading coefficient"),
            WeightError::PoleAtPoint => write!(f, "rational component has a pole at the evaluation point"),
            WeightError::Parse(s) => write!(f, "parse error: {s}"),
            WeightError::Field(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for WeightError {}

impl From<FieldError> for WeightError {
    fn from(e: FieldError) -> Self {
        WeightError::Field(e)
    }
}

/// A point of the lattice q^{(1/2)Z} * zeta_L^Z: q^{s_exp/2} zeta_L^{zeta_exp}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SpectralParam {
    pub l: u32,
    /// exponent of s = q^{1/2}
    pub s_exp: i64,
    /// exponent of the primitive L-th root of unity, reduced mod L
    pub zeta_exp: u32,
}

impl SpectralParam {
    pub fn one(l: u32) -> SpectralParam {
        SpectralParam { l, s_exp: 0, zeta_exp: 0 }
    }

    pub fn q_pow(l: u32, h: Half) -> SpectralParam {
        SpectralParam { l, s_exp: h.doubled(), zeta_exp: 0 }
    }

    pub fn new(l: u32, h: Half, zeta_exp: u32) -> SpectralParam {
        SpectralParam { l, s_exp: h.doubled(), zeta_exp: zeta_exp % l }
    }

    pub fn mul(self, other: SpectralParam) -> SpectralParam {
        assert_eq!(self.l, other.l, "lattice mismatch");
        SpectralParam {
            l: self.l,
            s_exp: self.s_exp + other.s_exp,
            zeta_exp: (self.zeta_exp + other.zeta_exp) % self.l,
        }
    }

    pub fn inv(self) -> SpectralParam {
        SpectralParam {
            l: self.l,
            s_exp: -self.s_exp,
            zeta_exp: (self.l - self.zeta_exp) % self.l,
        }
    }

    pub fn pow(self, e: i64) -> SpectralParam {
        let base = if e < 0 { self.inv() } else { self };
        let n = e.unsigned_abs();
        SpectralParam {
            l: base.l,
            s_exp: base.s_exp * n as i64,
            zeta_exp: ((base.zeta_exp as u64 * n) % base.l as u64) as u32,
        }
    }

    pub fn times_q(self, h: Half) -> SpectralParam {
        SpectralParam { s_exp: self.s_exp + h.doubled(), ..self }
    }

    /// Multiply by -1 = zeta_L^{L/2}.
    pub fn negate(self) -> SpectralParam {
        SpectralParam { zeta_exp: (self.zeta_exp + self.l / 2) % self.l, ..self }
    }

    /// Multiply by omega = zeta_L^{L/M}.
    pub fn times_omega(self, ctx: &Ctx) -> SpectralParam {
        SpectralParam { zeta_exp: (self.zeta_exp + ctx.omega_exp()) % self.l, ..self }
    }

    pub fn is_one(self) -> bool {
        self.s_exp == 0 && self.zeta_exp == 0
    }

    /// Move to a lattice of order `l_new` (a multiple of the current order).
    pub fn widen(self, l_new: u32) -> SpectralParam {
        assert_eq!(l_new % self.l, 0, "lattice widening must preserve roots of unity");
        SpectralParam { l: l_new, s_exp: self.s_exp, zeta_exp: self.zeta_exp * (l_new / self.l) }
    }

    /// The scalar value as an element of Q(zeta_m)(s).
    pub fn to_scalar(self, m: u8) -> CycloRational {
        let base = CycloRational::s_pow(m, self.s_exp);
        base.mul(&CycloRational::from_cyclo(zeta_l_power(m, self.l, self.zeta_exp)))
    }

    pub fn render(self) -> String {
        let mut out = String::new();
        if self.s_exp == 0 && self.zeta_exp == 0 {
            return "q^0".into();
        }
        if self.zeta_exp != 0 {
            // a leading sign covers the -1 subgroup
            if self.zeta_exp == self.l / 2 {
                out.push('-');
            } else {
                out.push_str(&format!("w^{}*", self.zeta_exp));
            }
        }
        if self.s_exp % 2 == 0 {
            out.push_str(&format!("q^{}", self.s_exp / 2));
        } else {
            out.push_str(&format!("q^{{{}/2}}", self.s_exp));
        }
        out
    }
}

/// zeta_L^e as an element of Q(zeta_M): L = 2 gives signs, L = 6 maps
/// zeta_6 = 1 + zeta_3.
pub fn zeta_l_power(m: u8, l: u32, e: u32) -> CycloNum {
    let e = e % l;
    match l {
        1 => CycloNum::one(m),
        2 => {
            if e == 0 {
                CycloNum::one(m)
            } else {
                CycloNum::one(m).neg()
            }
        }
        6 => {
            assert_eq!(m, 3, "zeta_6 needs the cubic cyclotomic field");
            let z = CycloNum::zeta(3);
            let z6 = CycloNum::one(3).add(&z); // zeta_6 = 1 + zeta_3
            let mut acc = CycloNum::one(3);
            for _ in 0..e {
                acc = acc.mul(&z6);
            }
            acc
        }
        _ => panic!("unsupported lattice order {l}"),
    }
}

/// Parse "q^{n/2}*w^{m}" style spectral parameters; also accepts a leading
/// '-' for the order-2 part and plain "q^n".
pub fn parse_param(l: u32, text: &str) -> Result<SpectralParam, WeightError> {
    let mut t = text.trim();
    let mut zeta: i64 = 0;
    if let Some(rest) = t.strip_prefix('-') {
        zeta += l as i64 / 2;
        t = rest.trim();
    }
    let mut s_exp: i64 = 0;
    for factor in t.split('*') {
        let f = factor.trim();
        if f.is_empty() || f == "1" {
            continue;
        }
        if let Some(e) = f.strip_prefix("q^") {
            let e = e.trim().trim_start_matches('{').trim_end_matches('}');
            if let Some((num, den)) = e.split_once('/') {
                let n: i64 = num.trim().parse().map_err(|_| WeightError::Parse(text.into()))?;
                let d: i64 = den.trim().parse().map_err(|_| WeightError::Parse(text.into()))?;
                if d != 2 {
                    return Err(WeightError::Parse(text.into()));
                }
                s_exp += n;
            } else {
                let n: i64 = e.parse().map_err(|_| WeightError::Parse(text.into()))?;
                s_exp += 2 * n;
            }
        } else if f == "q" {
            s_exp += 2;
        } else if let Some(e) = f.strip_prefix("w^") {
            let e = e.trim().trim_start_matches('{').trim_end_matches('}');
            let n: i64 = e.parse().map_err(|_| WeightError::Parse(text.into()))?;
            zeta += n;
        } else if f == "w" {
            zeta += 1;
        } else {
            return Err(WeightError::Parse(text.into()));
        }
    }
    Ok(SpectralParam { l, s_exp, zeta_exp: zeta.rem_euclid(l as i64) as u32 })
}

/// An l-weight: per orbit a lattice constant and a factored rational function.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LWeight {
    pub consts: Vec<SpectralParam>,
    pub roots: Vec<BTreeMap<SpectralParam, i64>>,
}

impl LWeight {
    pub fn identity(ctx: &Ctx) -> LWeight {
        let n = ctx.n_orbits();
        LWeight {
            consts: vec![SpectralParam::one(ctx.lattice); n],
            roots: vec![BTreeMap::new(); n],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.consts.iter().all(|c| c.is_one()) && self.roots.iter().all(|r| r.is_empty())
    }

    fn insert_root(map: &mut BTreeMap<SpectralParam, i64>, a: SpectralParam, mult: i64) {
        let e = map.entry(a).or_insert(0);
        *e += mult;
        if *e == 0 {
            map.remove(&a);
        }
    }

    pub fn mul(&self, other: &LWeight) -> LWeight {
        let mut out = self.clone();
        for (i, c) in other.consts.iter().enumerate() {
            out.consts[i] = out.consts[i].mul(*c);
        }
        for (i, rm) in other.roots.iter().enumerate() {
            for (&a, &m) in rm {
                Self::insert_root(&mut out.roots[i], a, m);
            }
        }
        out
    }

    pub fn inv(&self) -> LWeight {
        LWeight {
            consts: self.consts.iter().map(|c| c.inv()).collect(),
            roots: self
                .roots
                .iter()
                .map(|rm| rm.iter().map(|(&a, &m)| (a, -m)).collect())
                .collect(),
        }
    }

    pub fn pow(&self, e: i64) -> LWeight {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = LWeight {
            consts: self.consts.iter().map(|c| SpectralParam::one(c.l)).collect(),
            roots: vec![BTreeMap::new(); self.roots.len()],
        };
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// The t-weight: the tuple of constant terms.
    pub fn varpi(&self) -> Vec<SpectralParam> {
        self.consts.clone()
    }

    /// Forget the rational part, keeping only the t-weight.
    pub fn varpi_weight(&self) -> LWeight {
        LWeight { consts: self.consts.clone(), roots: vec![BTreeMap::new(); self.roots.len()] }
    }

    /// At fixed orbits the root multiset must be stable under a -> a omega.
    pub fn twist_ok(&self, ctx: &Ctx) -> bool {
        for (orbit, rm) in self.roots.iter().enumerate() {
            if !ctx.fd.is_fixed(orbit) || ctx.fd.m_order == 1 {
                continue;
            }
            for (&a, &m) in rm {
                let shifted = a.times_omega(ctx);
                if rm.get(&shifted).copied().unwrap_or(0) != m {
                    return false;
                }
            }
        }
        true
    }

    /// Series expansion of the component at `orbit` in powers of u, to the
    /// given order inclusive: const * prod (1 - a u)^mult.
    pub fn component_series(&self, ctx: &Ctx, orbit: usize, order: usize) -> Vec<CycloRational> {
        let m = ctx.cyclo_m();
        let mut series = vec![CycloRational::zero(m); order + 1];
        series[0] = CycloRational::one(m);
        for (&a, &mult) in &self.roots[orbit] {
            let av = a.to_scalar(m);
            if mult > 0 {
                for _ in 0..mult {
                    // multiply by (1 - a u)
                    for k in (1..=order).rev() {
                        let sub = series[k - 1].mul(&av);
                        series[k] = series[k].sub(&sub);
                    }
                }
            } else {
                for _ in 0..(-mult) {
                    // multiply by the geometric series of 1/(1 - a u)
                    for k in 1..=order {
                        let add = series[k - 1].mul(&av);
                        series[k] = series[k].add(&add);
                    }
                }
            }
        }
        let c = self.consts[orbit].to_scalar(m);
        for x in series.iter_mut() {
            *x = x.mul(&c);
        }
        series
    }

    /// Exact value of the component at u = point (a lattice scalar).
    pub fn eval_component_at(
        &self,
        ctx: &Ctx,
        orbit: usize,
        point: SpectralParam,
    ) -> Result<CycloRational, WeightError> {
        let m = ctx.cyclo_m();
        let mut acc = self.consts[orbit].to_scalar(m);
        for (&a, &mult) in &self.roots[orbit] {
            let v = CycloRational::one(m).sub(&a.mul(point).to_scalar(m));
            if mult >= 0 {
                acc = acc.mul(&v.pow(mult)?);
            } else {
                if v.is_zero() {
                    return Err(WeightError::PoleAtPoint);
                }
                acc = acc.mul(&v.pow(mult)?);
            }
        }
        Ok(acc)
    }
}

/// Z_{i,a} in the twisted setting (Y_{i,a} when the context is untwisted).
pub fn make_z(ctx: &Ctx, orbit: usize, a: SpectralParam) -> LWeight {
    let mut w = LWeight::identity(ctx);
    let mm = ctx.fd.m_order as i64;
    if ctx.fd.is_fixed(orbit) && mm > 1 {
        w.consts[orbit] = SpectralParam::q_pow(ctx.lattice, Half::from_int(mm));
        let mut b_plus = a.times_q(Half::from_int(-1));
        let mut b_minus = a.times_q(Half::from_int(1));
        for _ in 0..mm {
            LWeight::insert_root(&mut w.roots[orbit], b_plus, 1);
            LWeight::insert_root(&mut w.roots[orbit], b_minus, -1);
            b_plus = b_plus.times_omega(ctx);
            b_minus = b_minus.times_omega(ctx);
        }
    } else {
        w.consts[orbit] = SpectralParam::q_pow(ctx.lattice, Half::from_int(1));
        LWeight::insert_root(&mut w.roots[orbit], a.times_q(Half::from_int(-1)), 1);
        LWeight::insert_root(&mut w.roots[orbit], a.times_q(Half::from_int(1)), -1);
    }
    w
}

/// Y_{i,a} for an untwisted context (alias of make_z at the singleton orbit).
pub fn make_y(ctx: &Ctx, node: usize, a: SpectralParam) -> LWeight {
    assert_eq!(ctx.fd.m_order, 1, "make_y expects an untwisted context");
    make_z(ctx, node, a)
}

/// The generalized simple root A_{i,a}, built from the Z at the fixed
/// representative: A_{i,a} = Z_{i,aq} Z_{i,aq^-1} prod_{j ~ i} Z_{j,a}^{-1}.
pub fn make_a(ctx: &Ctx, orbit: usize, a: SpectralParam) -> LWeight {
    let rep = ctx.fd.fixed_reps[orbit];
    let c = ctx.fd.finite_type.cartan();
    let mut w = make_z(ctx, orbit, a.times_q(Half::from_int(1)));
    w = w.mul(&make_z(ctx, orbit, a.times_q(Half::from_int(-1))));
    for j in 0..ctx.fd.finite_type.rank() {
        if c[rep][j] == -1 {
            let jo = ctx.fd.orbit_of[j];
            let shift = ctx.fd.shift_from_rep(j);
            let mut b = a;
            for _ in 0..shift {
                b = b.times_omega(ctx);
            }
            w = w.mul(&make_z(ctx, jo, b).inv());
        }
    }
    w
}

/// The prefundamental weight with component (1 - a u)^{sign} at the orbit
/// (omega-completed at fixed orbits).
pub fn make_psi(ctx: &Ctx, orbit: usize, a: SpectralParam, positive: bool) -> LWeight {
    let mut w = LWeight::identity(ctx);
    let mult = if positive { 1 } else { -1 };
    let mm = ctx.fd.m_order as i64;
    if ctx.fd.is_fixed(orbit) && mm > 1 {
        let mut b = a;
        for _ in 0..mm {
            LWeight::insert_root(&mut w.roots[orbit], b, mult);
            b = b.times_omega(ctx);
        }
    } else {
        LWeight::insert_root(&mut w.roots[orbit], a, mult);
    }
    w
}

/// The weight of X_{i,a} in a simply-laced untwisted context:
/// Psi_{i,a}^{-1} prod_{j ~ i} Psi_{j, a q}.
pub fn make_psi_tilde_untwisted(ctx: &Ctx, node: usize, a: SpectralParam) -> LWeight {
    assert_eq!(ctx.fd.m_order, 1, "untwisted psi-tilde expects an untwisted context");
    let c = ctx.fd.finite_type.cartan();
    let mut w = make_psi(ctx, node, a, false);
    for j in 0..ctx.fd.finite_type.rank() {
        if c[node][j] == -1 {
            w = w.mul(&make_psi(ctx, j, a.times_q(Half::from_int(1)), true));
        }
    }
    w
}

/// The twisted X-weight: the fold of the untwisted one at the representative.
pub fn make_psi_tilde(ctx: &Ctx, orbit: usize, a: SpectralParam) -> LWeight {
    if ctx.fd.m_order == 1 {
        return make_psi_tilde_untwisted(ctx, orbit, a);
    }
    let src = Ctx::untwisted(ctx.fd.finite_type, ctx.lattice);
    let rep = ctx.fd.fixed_reps[orbit];
    let unfolded = make_psi_tilde_untwisted(&src, rep, a);
    fold_weight(&src, ctx, &unfolded)
}

/// [alpha_i/2]^e as a pure t-weight.
pub fn weight_alpha_half(ctx: &Ctx, orbit: usize, e: i64) -> LWeight {
    let mut w = LWeight::identity(ctx);
    for j in 0..ctx.n_orbits() {
        let num = e * ctx.tc.d[orbit].doubled() * ctx.tc.c_sigma[orbit][j];
        assert_eq!(num % 2, 0, "alpha/2 exponent leaves the half-integer lattice");
        w.consts[j] = SpectralParam { l: ctx.lattice, s_exp: num / 2, zeta_exp: 0 };
    }
    w
}

/// [alpha_i]^e.
pub fn weight_alpha(ctx: &Ctx, orbit: usize, e: i64) -> LWeight {
    weight_alpha_half(ctx, orbit, 2 * e)
}

/// [omega_i]^e: the t-weight of Z_{i,a}, with value q^{N_i} at the orbit.
pub fn weight_omega(ctx: &Ctx, orbit: usize, e: i64) -> LWeight {
    let rep = ctx.fd.fixed_reps[orbit];
    let n = ctx.tc.n_map[rep] as i64;
    let mut w = LWeight::identity(ctx);
    w.consts[orbit] = SpectralParam { l: ctx.lattice, s_exp: 2 * n * e, zeta_exp: 0 };
    w
}

/// Fold an l-weight of the untwisted source into the twisted context:
/// component at orbit i becomes prod_r Psi_{sigma^r(i)}(omega^r u).
pub fn fold_weight(src: &Ctx, dst: &Ctx, w: &LWeight) -> LWeight {
    assert_eq!(src.fd.m_order, 1, "fold source must be untwisted");
    assert_eq!(src.fd.finite_type, dst.fd.finite_type, "fold requires matching source diagram");
    assert_eq!(src.lattice, dst.lattice, "fold requires a shared lattice");
    let mut out = LWeight::identity(dst);
    for orbit in 0..dst.n_orbits() {
        let rep = dst.fd.fixed_reps[orbit];
        let mut node = rep;
        let mut omega_r = SpectralParam::one(dst.lattice);
        for _ in 0..dst.fd.m_order {
            out.consts[orbit] = out.consts[orbit].mul(w.consts[node]);
            for (&a, &mult) in &w.roots[node] {
                LWeight::insert_root(&mut out.roots[orbit], a.mul(omega_r), mult);
            }
            node = dst.fd.sigma[node];
            omega_r = omega_r.times_omega(dst);
        }
    }
    debug_assert!(out.twist_ok(dst));
    out
}

/// A truncated element of the character ring: integer multiplicities of
/// l-weights, all lying within `trunc` of the reference weight in the
/// negative root cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QCharacter {
    pub base: LWeight,
    pub terms: BTreeMap<LWeight, i64>,
    pub trunc: u32,
}

impl QCharacter {
    pub fn single(w: LWeight, trunc: u32) -> QCharacter {
        let mut terms = BTreeMap::new();
        terms.insert(w.clone(), 1);
        QCharacter { base: w, terms, trunc }
    }

    pub fn constant_one(ctx: &Ctx, trunc: u32) -> QCharacter {
        Self::single(LWeight::identity(ctx), trunc)
    }

    pub fn insert(&mut self, w: LWeight, mult: i64) {
        let e = self.terms.entry(w).or_insert(0);
        *e += mult;
        if *e == 0 {
            self.terms.remove_entry_zero();
        }
    }

    pub fn total_multiplicity(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Height of `w` below the reference weight, if it lies in the cone.
    pub fn height_of(&self, ctx: &Ctx, w: &LWeight) -> Option<u32> {
        height_between(ctx, &self.base, w)
    }

    pub fn mul(&self, ctx: &Ctx, other: &QCharacter) -> QCharacter {
        let trunc = self.trunc.min(other.trunc);
        let base = self.base.mul(&other.base);
        let mut terms: BTreeMap<LWeight, i64> = BTreeMap::new();
        for (w1, m1) in &self.terms {
            for (w2, m2) in &other.terms {
                let w = w1.mul(w2);
                if let Some(h) = height_between(ctx, &base, &w) {
                    if h <= trunc {
                        *terms.entry(w).or_insert(0) += m1 * m2;
                    }
                }
            }
        }
        terms.retain(|_, v| *v != 0);
        QCharacter { base, terms, trunc }
    }

    /// Multiply every term (and the base) by a fixed weight.
    pub fn scale_weight(&self, w: &LWeight) -> QCharacter {
        QCharacter {
            base: self.base.mul(w),
            terms: self.terms.iter().map(|(t, &m)| (t.mul(w), m)).collect(),
            trunc: self.trunc,
        }
    }

    /// Divide by the reference weight, so the leading term becomes 1.
    pub fn normalized(&self) -> QCharacter {
        self.scale_weight(&self.base.inv())
    }

    /// Projection to the usual character: collapse each term to its t-weight.
    pub fn usual_character(&self) -> QCharacter {
        let base = self.base.varpi_weight();
        let mut terms: BTreeMap<LWeight, i64> = BTreeMap::new();
        for (w, &m) in &self.terms {
            *terms.entry(w.varpi_weight()).or_insert(0) += m;
        }
        terms.retain(|_, v| *v != 0);
        QCharacter { base, terms, trunc: self.trunc }
    }

    /// Multiplicative inverse of a series with unit leading coefficient,
    /// computed degree by degree in the height filtration.
    pub fn inverse_series(&self, ctx: &Ctx) -> Result<QCharacter, WeightError> {
        let c0 = *self.terms.get(&self.base).ok_or(WeightError::NonUnitLeading)?;
        if c0 != 1 && c0 != -1 {
            return Err(WeightError::NonUnitLeading);
        }
        // order the nontrivial terms by height once
        let mut by_height: Vec<(u32, LWeight, i64)> = Vec::new();
        for (w, &m) in &self.terms {
            let h = self.height_of(ctx, w).ok_or(WeightError::NotComparable)?;
            if h > 0 {
                by_height.push((h, w.clone(), m));
            }
        }
        by_height.sort_by_key(|(h, _, _)| *h);

        let inv_base = self.base.inv();
        let mut inv = QCharacter {
            base: inv_base.clone(),
            terms: BTreeMap::new(),
            trunc: self.trunc,
        };
        inv.terms.insert(inv_base.clone(), c0);
        // heights strictly increase along the recursion, so iterate levels
        for _level in 1..=self.trunc {
            let mut additions: BTreeMap<LWeight, i64> = BTreeMap::new();
            for (h, w, m) in &by_height {
                for (t, &tm) in &inv.terms {
                    let prod = w.mul(t).mul(&self.base.inv());
                    // only create the next level, never rewrite old ones
                    if let Some(hh) = height_between(ctx, &inv.base, &prod) {
                        if hh == _level && *h + height_between(ctx, &inv.base, t).unwrap() == _level {
                            *additions.entry(prod).or_insert(0) += m * tm;
                        }
                    }
                }
            }
            for (w, m) in additions {
                if m != 0 {
                    *inv.terms.entry(w).or_insert(0) -= c0 * m;
                }
            }
            inv.terms.retain(|_, v| *v != 0);
        }
        Ok(inv)
    }
}

trait RetainZero {
    fn remove_entry_zero(&mut self);
}

impl RetainZero for BTreeMap<LWeight, i64> {
    fn remove_entry_zero(&mut self) {
        self.retain(|_, v| *v != 0);
    }
}

/// The nonnegative root-cone coordinates of base/w, when they exist: solves
/// w = base * prod [alpha_i]^{-n_i} for n in N^{I_sigma}.
pub fn height_vector(ctx: &Ctx, base: &LWeight, w: &LWeight) -> Option<Vec<i64>> {
    let n = ctx.n_orbits();
    let mut delta = Vec::with_capacity(n);
    for j in 0..n {
        if base.consts[j].zeta_exp != w.consts[j].zeta_exp {
            return None;
        }
        delta.push(w.consts[j].s_exp - base.consts[j].s_exp);
    }
    // delta_j = -sum_i n_i d_i.doubled * C_{i,j} = -2 sum_i n_i B_{i,j}
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = num_rational::BigRational::zero();
        for j in 0..n {
            let t = &ctx.b_inv[j][i] * num_rational::BigRational::from_integer(delta[j].into());
            acc += t;
        }
        // n_i = -delta . B^{-1} / 2
        let v = -acc / num_rational::BigRational::from_integer(2.into());
        if !v.is_integer() || v.is_negative() {
            return None;
        }
        out.push(v.to_integer().to_i64()?);
    }
    Some(out)
}

pub fn height_between(ctx: &Ctx, base: &LWeight, w: &LWeight) -> Option<u32> {
    height_vector(ctx, base, w).map(|v| v.iter().sum::<i64>() as u32)
}

/// JSON form of a character: deterministic term order, integer exponents.
#[derive(Serialize)]
pub struct QCharacterJson {
    pub trunc: u32,
    pub terms: Vec<TermJson>,
}

#[derive(Serialize)]
pub struct TermJson {
    /// per-orbit constant: [s_exp, zeta_exp]
    pub prefactor: Vec<(i64, u32)>,
    /// per-orbit factored rational part: (root_s_exp, root_zeta_exp, mult)
    pub orbits: Vec<Vec<(i64, u32, i64)>>,
    pub multiplicity: i64,
}

impl QCharacter {
    pub fn to_json(&self) -> QCharacterJson {
        let terms = self
            .terms
            .iter()
            .map(|(w, &m)| TermJson {
                prefactor: w.consts.iter().map(|c| (c.s_exp, c.zeta_exp)).collect(),
                orbits: w
                    .roots
                    .iter()
                    .map(|rm| rm.iter().map(|(a, &mu)| (a.s_exp, a.zeta_exp, mu)).collect())
                    .collect(),
                multiplicity: m,
            })
            .collect();
        QCharacterJson { trunc: self.trunc, terms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Half;

    fn a2t() -> Ctx {
        Ctx::twisted("A2^2").unwrap()
    }

    fn p(ctx: &Ctx, h: i64) -> SpectralParam {
        SpectralParam::q_pow(ctx.lattice, Half::from_int(h))
    }

    #[test]
    fn z_fixed_orbit_omega_invariance() {
        // at fixed orbits Z_{i,a} = Z_{i,a omega} exactly
        let ctx = Ctx::twisted("D4^3").unwrap();
        let fixed = (0..ctx.n_orbits()).find(|&o| ctx.fd.is_fixed(o)).unwrap();
        let a = p(&ctx, 0);
        assert_eq!(make_z(&ctx, fixed, a), make_z(&ctx, fixed, a.times_omega(&ctx)));
        assert_eq!(make_a(&ctx, fixed, a), make_a(&ctx, fixed, a.times_omega(&ctx)));
        // and psi too
        assert_eq!(
            make_psi(&ctx, fixed, a, false),
            make_psi(&ctx, fixed, a.times_omega(&ctx), false)
        );
    }

    #[test]
    fn a2t_z_expansion() {
        // the single orbit of A2^2 is non-fixed… its Z has prefactor q and a
        // root pair at q^{-1} and q
        let ctx = a2t();
        let z = make_z(&ctx, 0, p(&ctx, 0));
        assert_eq!(z.consts[0], p(&ctx, 1));
        let roots: Vec<(SpectralParam, i64)> = z.roots[0].iter().map(|(&a, &m)| (a, m)).collect();
        assert_eq!(roots, vec![(p(&ctx, -1), 1), (p(&ctx, 1), -1)]);
        // group inverse
        assert!(z.mul(&z.inv()).is_identity());
    }

    #[test]
    fn a2t_a_variable_shape() {
        // A_{1,a} = Z_{1,aq} Z_{1,aq^-1} Z_{1,-a}^{-1} since the neighbor of the
        // representative is its own sigma-image
        let ctx = a2t();
        let a = p(&ctx, 0);
        let av = make_a(&ctx, 0, a);
        let direct = make_z(&ctx, 0, a.times_q(Half::from_int(1)))
            .mul(&make_z(&ctx, 0, a.times_q(Half::from_int(-1))))
            .mul(&make_z(&ctx, 0, a.negate()).inv());
        assert_eq!(av, direct);
        // t-weight of A is [alpha]
        assert_eq!(av.varpi_weight(), weight_alpha(&ctx, 0, 1));
    }

    #[test]
    fn psi_inverse_pair() {
        let ctx = a2t();
        let plus = make_psi(&ctx, 0, p(&ctx, 0), true);
        let minus = make_psi(&ctx, 0, p(&ctx, 0), false);
        assert!(plus.mul(&minus).is_identity());
        assert_eq!(plus.varpi_weight(), LWeight::identity(&ctx));
    }

    #[test]
    fn psi_tilde_a2t() {
        // psi-tilde at the A2^2 orbit is Psi_{1}^{-1} Psi_{-q}: component
        // (1 + q u)/(1 - u) after omega-completion of the sl3 fold
        let ctx = a2t();
        let w = make_psi_tilde(&ctx, 0, p(&ctx, 0));
        let expected = make_psi(&ctx, 0, p(&ctx, 0), false)
            .mul(&make_psi(&ctx, 0, p(&ctx, 1).negate(), true));
        assert_eq!(w, expected);
    }

    #[test]
    fn fold_example_monomials() {
        // pi(Y_{1,1} Y_{2,-q^2}) = Z_{1,1} Z_{1,q^2} for A2^2
        let ctx = a2t();
        let src = Ctx::untwisted(ctx.fd.finite_type, ctx.lattice);
        let y1 = make_y(&src, 0, p(&src, 0));
        let y2 = make_y(&src, 1, p(&src, 2).negate());
        let folded = fold_weight(&src, &ctx, &y1.mul(&y2));
        let direct = make_z(&ctx, 0, p(&ctx, 0)).mul(&make_z(&ctx, 0, p(&ctx, 2)));
        assert_eq!(folded, direct);
    }

    #[test]
    fn fold_preserves_weights() {
        // pi([omega_i]) = [omega_ibar], pi([alpha_i]) = [alpha_ibar]
        for name in ["A2^2", "A3^2", "D4^3"] {
            let ctx = Ctx::twisted(name).unwrap();
            let src = Ctx::untwisted(ctx.fd.finite_type, ctx.lattice);
            for orbit in 0..ctx.n_orbits() {
                let rep = ctx.fd.fixed_reps[orbit];
                let folded = fold_weight(&src, &ctx, &weight_alpha(&src, rep, 1));
                assert_eq!(folded, weight_alpha(&ctx, orbit, 1), "{name} orbit {orbit} alpha");
                let folded_om = fold_weight(&src, &ctx, &weight_omega(&src, rep, 1));
                assert_eq!(folded_om, weight_omega(&ctx, orbit, 1), "{name} orbit {orbit} omega");
            }
        }
        // identity folds to identity
        let ctx = a2t();
        let src = Ctx::untwisted(ctx.fd.finite_type, ctx.lattice);
        assert!(fold_weight(&src, &ctx, &LWeight::identity(&src)).is_identity());
    }

    #[test]
    fn heights_and_cone() {
        let ctx = a2t();
        let base = make_z(&ctx, 0, p(&ctx, 0));
        let lower = base.mul(&make_a(&ctx, 0, p(&ctx, -1)).inv());
        assert_eq!(height_between(&ctx, &base, &lower), Some(1));
        assert_eq!(height_vector(&ctx, &base, &lower), Some(vec![1]));
        assert_eq!(height_between(&ctx, &base, &base), Some(0));
        // moving up is not in the cone
        assert_eq!(height_between(&ctx, &lower, &base), None);
    }

    #[test]
    fn character_products_truncate() {
        let ctx = a2t();
        let a_inv = make_a(&ctx, 0, p(&ctx, 0)).inv();
        // 1 + A^{-1} + A^{-2} as a toy character
        let mut c = QCharacter::single(LWeight::identity(&ctx), 2);
        c.insert(a_inv.clone(), 1);
        c.insert(a_inv.mul(&a_inv), 1);
        let sq = c.mul(&ctx, &c);
        // heights 0..2 survive: 1, 2*A^{-1}, 3*A^{-2}
        assert_eq!(sq.terms.get(&LWeight::identity(&ctx)), Some(&1));
        assert_eq!(sq.terms.get(&a_inv), Some(&2));
        assert_eq!(sq.terms.get(&a_inv.mul(&a_inv)), Some(&3));
        assert_eq!(sq.terms.len(), 3);
        // [Psi][Psi'] = [Psi Psi'] on single weights
        let w1 = make_psi(&ctx, 0, p(&ctx, 0), true);
        let w2 = make_psi(&ctx, 0, p(&ctx, 2), true);
        let prod = QCharacter::single(w1.clone(), 3).mul(&ctx, &QCharacter::single(w2.clone(), 3));
        assert_eq!(prod, QCharacter::single(w1.mul(&w2), 3));
    }

    #[test]
    fn series_inverse_round_trip() {
        let ctx = a2t();
        let a_inv = make_a(&ctx, 0, p(&ctx, 0)).inv();
        let mut c = QCharacter::single(LWeight::identity(&ctx), 4);
        c.insert(a_inv.varpi_weight(), 2);
        c.insert(a_inv.varpi_weight().pow(2), 1);
        let inv = c.inverse_series(&ctx).unwrap();
        let prod = c.mul(&ctx, &inv);
        assert_eq!(prod, QCharacter::constant_one(&ctx, 4));
    }

    #[test]
    fn param_grammar_round_trip() {
        let l = 6;
        for text in ["q^0", "q^2", "q^{-3/2}", "-q^1", "w^2*q^3", "q^{5/2}*w^4"] {
            let v = parse_param(l, text).unwrap();
            let back = parse_param(l, &v.render()).unwrap();
            assert_eq!(v, back, "{text}");
        }
        assert!(parse_param(2, "x^2").is_err());
    }
}
