//! Exact arithmetic over the coefficient field Q(zeta_M)(s), where q = s^2.
//!
//! Every scalar in the calculus lives here: q-integers, q-factorials, the
//! structure constants of the defining relations, and the action coefficients
//! of the built-in modules. Coefficients are kept exact; equality is decided
//! on canonical forms (reduced fractions with monic denominator).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

/// A half-integer, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Half(pub i64);

impl Half {
    pub const ZERO: Half = Half(0);
    pub const ONE: Half = Half(2);

    pub fn from_int(n: i64) -> Half {
        Half(2 * n)
    }

    pub fn halves(n: i64) -> Half {
        Half(n)
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn as_integer(self) -> Option<i64> {
        if self.is_integer() {
            Some(self.0 / 2)
        } else {
            None
        }
    }

    pub fn doubled(self) -> i64 {
        self.0
    }
}

impl std::ops::Add for Half {
    type Output = Half;
    fn add(self, rhs: Half) -> Half {
        Half(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Half {
    type Output = Half;
    fn sub(self, rhs: Half) -> Half {
        Half(self.0 - rhs.0)
    }
}

impl std::ops::Neg for Half {
    type Output = Half;
    fn neg(self) -> Half {
        Half(-self.0)
    }
}

impl std::ops::Mul<i64> for Half {
    type Output = Half;
    fn mul(self, rhs: i64) -> Half {
        Half(self.0 * rhs)
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Errors raised by the field kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    DivisionByZero,
    NegativeFactorial(i64),
    ZeroQuantumBase,
    PoleAtEvaluationPoint,
    Parse(String),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::DivisionByZero => write!(f, "division by zero"),
            FieldError::NegativeFactorial(m) => write!(f, "q-factorial of negative integer {m}"),
            FieldError::ZeroQuantumBase => write!(f, "q-number with d = 0"),
            FieldError::PoleAtEvaluationPoint => write!(f, "denominator vanishes at evaluation point"),
            FieldError::Parse(s) => write!(f, "parse error: {s}"),
        }
    }
}

impl std::error::Error for FieldError {}

/// An element of Q(zeta_M) = Q[z]/(Phi_M(z)), M in {1,2,3}.
///
/// For M <= 2 the field degenerates to Q (zeta is a rational sign), so only
/// the `a` coordinate is used. For M = 3 the element is a + b*z with
/// z^2 = -1 - z. Equality ignores the order tag: a rational value is the
/// same element in every Q(zeta_M).
#[derive(Debug, Clone)]
pub struct CycloNum {
    pub m: u8,
    pub a: BigRational,
    pub b: BigRational,
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b
    }
}

impl Eq for CycloNum {}

impl std::hash::Hash for CycloNum {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
    }
}

fn brat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl CycloNum {
    pub fn zero(m: u8) -> CycloNum {
        CycloNum { m, a: BigRational::zero(), b: BigRational::zero() }
    }

    pub fn one(m: u8) -> CycloNum {
        CycloNum { m, a: BigRational::one(), b: BigRational::zero() }
    }

    pub fn from_rational(m: u8, a: BigRational) -> CycloNum {
        CycloNum { m, a, b: BigRational::zero() }
    }

    pub fn from_int(m: u8, n: i64) -> CycloNum {
        Self::from_rational(m, brat(n))
    }

    /// The distinguished primitive M-th root of unity (only sensible for M = 3;
    /// for M = 2 this is -1, for M = 1 it is 1).
    pub fn zeta(m: u8) -> CycloNum {
        match m {
            1 => CycloNum::one(1),
            2 => CycloNum { m: 2, a: -BigRational::one(), b: BigRational::zero() },
            3 => CycloNum { m: 3, a: BigRational::zero(), b: BigRational::one() },
            _ => panic!("unsupported cyclotomic order {m}"),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn promote(m1: u8, m2: u8) -> u8 {
        m1.max(m2)
    }

    pub fn add(&self, other: &CycloNum) -> CycloNum {
        CycloNum {
            m: Self::promote(self.m, other.m),
            a: &self.a + &other.a,
            b: &self.b + &other.b,
        }
    }

    pub fn sub(&self, other: &CycloNum) -> CycloNum {
        CycloNum {
            m: Self::promote(self.m, other.m),
            a: &self.a - &other.a,
            b: &self.b - &other.b,
        }
    }

    pub fn neg(&self) -> CycloNum {
        CycloNum { m: self.m, a: -self.a.clone(), b: -self.b.clone() }
    }

    pub fn mul(&self, other: &CycloNum) -> CycloNum {
        // (a1 + b1 z)(a2 + b2 z) with z^2 = -1 - z (M = 3); b = 0 otherwise.
        let m = Self::promote(self.m, other.m);
        let a = &self.a * &other.a;
        let cross = &self.a * &other.b + &self.b * &other.a;
        let bb = &self.b * &other.b;
        CycloNum { m, a: a - &bb, b: cross - bb }
    }

    pub fn inv(&self) -> Result<CycloNum, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.b.is_zero() {
            return Ok(CycloNum {
                m: self.m,
                a: self.a.recip(),
                b: BigRational::zero(),
            });
        }
        // (a + b z)^-1 = (a - b - b z) / (a^2 - a b + b^2)
        let norm = &self.a * &self.a - &self.a * &self.b + &self.b * &self.b;
        Ok(CycloNum {
            m: self.m,
            a: (&self.a - &self.b) / &norm,
            b: -(&self.b / &norm),
        })
    }

    /// Complex embedding with zeta -> exp(2 pi i / M).
    pub fn eval(&self) -> Complex64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let zeta = match self.m {
            3 => Complex64::new(-0.5, (3.0f64).sqrt() / 2.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(1.0, 0.0),
        };
        Complex64::new(a, 0.0) + zeta * Complex64::new(b, 0.0)
    }

    pub fn render(&self) -> String {
        if self.b.is_zero() {
            format!("{}", self.a)
        } else if self.a.is_zero() {
            format!("{}*z", self.b)
        } else {
            format!("({}+{}*z)", self.a, self.b)
        }
    }
}

/// Dense polynomial in s with CycloNum coefficients; coeffs[k] multiplies s^k.
#[derive(Debug, Clone)]
pub struct SPoly {
    pub m: u8,
    pub coeffs: Vec<CycloNum>,
}

impl PartialEq for SPoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for SPoly {}

impl std::hash::Hash for SPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl SPoly {
    pub fn zero(m: u8) -> SPoly {
        SPoly { m, coeffs: vec![] }
    }

    pub fn one(m: u8) -> SPoly {
        SPoly { m, coeffs: vec![CycloNum::one(m)] }
    }

    pub fn constant(c: CycloNum) -> SPoly {
        let m = c.m;
        let mut p = SPoly { m, coeffs: vec![c] };
        p.trim();
        p
    }

    pub fn monomial(m: u8, c: CycloNum, deg: usize) -> SPoly {
        if c.is_zero() {
            return SPoly::zero(m);
        }
        let mut coeffs = vec![CycloNum::zero(m); deg + 1];
        coeffs[deg] = c;
        SPoly { m, coeffs }
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading(&self) -> Option<&CycloNum> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &SPoly) -> SPoly {
        let m = CycloNum::promote(self.m, other.m);
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = CycloNum::zero(m);
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            let x = self.coeffs.get(k).unwrap_or(&z);
            let y = other.coeffs.get(k).unwrap_or(&z);
            coeffs.push(x.add(y));
        }
        let mut p = SPoly { m, coeffs };
        p.trim();
        p
    }

    pub fn sub(&self, other: &SPoly) -> SPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SPoly {
        SPoly { m: self.m, coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn mul(&self, other: &SPoly) -> SPoly {
        let m = CycloNum::promote(self.m, other.m);
        if self.is_zero() || other.is_zero() {
            return SPoly::zero(m);
        }
        let mut coeffs = vec![CycloNum::zero(m); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&x.mul(y));
            }
        }
        let mut p = SPoly { m, coeffs };
        p.trim();
        p
    }

    pub fn scale(&self, c: &CycloNum) -> SPoly {
        let mut p = SPoly {
            m: CycloNum::promote(self.m, c.m),
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
        };
        p.trim();
        p
    }

    /// Euclidean division; panics only if `div` is zero.
    pub fn divrem(&self, div: &SPoly) -> (SPoly, SPoly) {
        assert!(!div.is_zero(), "polynomial division by zero");
        let m = CycloNum::promote(self.m, div.m);
        let mut rem = self.clone();
        rem.m = m;
        let dd = div.degree();
        if self.degree() < dd {
            return (SPoly::zero(m), rem);
        }
        let lead_inv = div.leading().unwrap().inv().expect("nonzero leading");
        let mut quot = vec![CycloNum::zero(m); (self.degree() - dd + 1) as usize];
        while !rem.is_zero() && rem.degree() >= dd {
            let shift = (rem.degree() - dd) as usize;
            let c = rem.leading().unwrap().mul(&lead_inv);
            quot[shift] = c.clone();
            let sub = div.mul(&SPoly::monomial(m, c, shift));
            rem = rem.sub(&sub);
        }
        let mut q = SPoly { m, coeffs: quot };
        q.trim();
        (q, rem)
    }

    /// Clear denominators and strip the integer content, returning a
    /// primitive polynomial with integral coefficients (up to cyclotomic
    /// units) proportional to self.
    fn primitive_integral(&self) -> SPoly {
        use num_integer::Integer;
        if self.is_zero() {
            return self.clone();
        }
        let mut denom_lcm = BigInt::from(1);
        for c in &self.coeffs {
            denom_lcm = denom_lcm.lcm(c.a.denom());
            denom_lcm = denom_lcm.lcm(c.b.denom());
        }
        let scale = BigRational::from_integer(denom_lcm);
        let mut content = BigInt::from(0);
        let ints: Vec<CycloNum> = self
            .coeffs
            .iter()
            .map(|c| {
                let a = &c.a * &scale;
                let b = &c.b * &scale;
                content = content.gcd(a.numer());
                content = content.gcd(b.numer());
                CycloNum { m: c.m, a, b }
            })
            .collect();
        if content.is_zero() {
            content = BigInt::from(1);
        }
        let inv_content = BigRational::new(BigInt::from(1), content);
        let coeffs = ints
            .into_iter()
            .map(|c| CycloNum { m: c.m, a: &c.a * &inv_content, b: &c.b * &inv_content })
            .collect();
        SPoly { m: self.m, coeffs }
    }

    /// Pseudo-remainder of primitive integral polynomials: the remainder of
    /// lc(b)^{da-db+1} a by b, computed without rational division.
    fn pseudo_rem(&self, div: &SPoly) -> SPoly {
        let m = CycloNum::promote(self.m, div.m);
        let dd = div.degree();
        let mut rem = self.clone();
        rem.m = m;
        let lead = div.leading().unwrap().clone();
        while !rem.is_zero() && rem.degree() >= dd {
            let shift = (rem.degree() - dd) as usize;
            let c = rem.leading().unwrap().clone();
            // rem <- lead * rem - c x^shift * div cancels the top term
            rem = rem.scale(&lead).sub(&div.mul(&SPoly::monomial(m, c, shift)));
        }
        rem
    }

    /// Degree of the unique nonzero term, for monomials.
    fn monomial_degree(&self) -> Option<usize> {
        let mut deg = None;
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                if deg.is_some() {
                    return None;
                }
                deg = Some(k);
            }
        }
        deg
    }

    /// Monic gcd. Monomial operands short-circuit through valuations; the
    /// general path computes the gcd modulo word-size primes with rational
    /// reconstruction and verifies the candidate by exact division, which is
    /// sound for any prime; the primitive pseudo-remainder sequence remains
    /// as a fallback.
    pub fn gcd(&self, other: &SPoly) -> SPoly {
        let m = CycloNum::promote(self.m, other.m);
        if self.is_zero() {
            return normalize_monic(other.clone());
        }
        if other.is_zero() {
            return normalize_monic(self.clone());
        }
        if self.monomial_degree().is_some() || other.monomial_degree().is_some() {
            let k = self.valuation().min(other.valuation());
            return SPoly::monomial(m, CycloNum::one(m), k);
        }
        if self.degree() == 0 || other.degree() == 0 {
            return SPoly::one(m);
        }
        let a = self.primitive_integral();
        let b = other.primitive_integral();
        if let Some(g) = modular::gcd(&a, &b) {
            return g;
        }
        self.gcd_prs(&a, &b)
    }

    fn gcd_prs(&self, a0: &SPoly, b0: &SPoly) -> SPoly {
        let mut a = a0.clone();
        let mut b = b0.clone();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_integral();
            a = b;
            b = r;
        }
        normalize_monic(a)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * s + c.eval();
        }
        acc
    }

    /// Substitute s -> 1/s and clear denominators: returns (p(1/s) * s^deg).
    pub fn reverse(&self) -> SPoly {
        let mut coeffs: Vec<CycloNum> = self.coeffs.iter().rev().cloned().collect();
        let mut p = SPoly { m: self.m, coeffs: std::mem::take(&mut coeffs) };
        p.trim();
        p
    }

    /// Lowest nonzero exponent.
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }
}

/// An element of Q(zeta_M)(s): a reduced fraction of polynomials in s with
/// monic denominator. q = s^2 throughout.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycloRational {
    pub num: SPoly,
    pub den: SPoly,
}

impl fmt::Display for CycloRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl CycloRational {
    pub fn zero(m: u8) -> CycloRational {
        CycloRational { num: SPoly::zero(m), den: SPoly::one(m) }
    }

    pub fn one(m: u8) -> CycloRational {
        CycloRational { num: SPoly::one(m), den: SPoly::one(m) }
    }

    pub fn m(&self) -> u8 {
        self.num.m.max(self.den.m)
    }

    pub fn from_int(m: u8, n: i64) -> CycloRational {
        CycloRational { num: SPoly::constant(CycloNum::from_int(m, n)), den: SPoly::one(m) }
    }

    pub fn from_rational(m: u8, r: BigRational) -> CycloRational {
        CycloRational { num: SPoly::constant(CycloNum::from_rational(m, r)), den: SPoly::one(m) }
    }

    pub fn from_cyclo(c: CycloNum) -> CycloRational {
        let m = c.m;
        CycloRational { num: SPoly::constant(c), den: SPoly::one(m) }
    }

    pub fn new(num: SPoly, den: SPoly) -> Result<CycloRational, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let mut r = CycloRational { num, den };
        r.normalize();
        Ok(r)
    }

    /// s^k for k of either sign.
    pub fn s_pow(m: u8, k: i64) -> CycloRational {
        if k >= 0 {
            CycloRational {
                num: SPoly::monomial(m, CycloNum::one(m), k as usize),
                den: SPoly::one(m),
            }
        } else {
            CycloRational {
                num: SPoly::one(m),
                den: SPoly::monomial(m, CycloNum::one(m), (-k) as usize),
            }
        }
    }

    /// q^h for a half-integer h (q = s^2, so q^{n/2} = s^n).
    pub fn q_pow(m: u8, h: Half) -> CycloRational {
        Self::s_pow(m, h.doubled())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            let m = self.m();
            self.num = SPoly::zero(m);
            self.den = SPoly::one(m);
            return;
        }
        if self.den.degree() > 0 {
            let g = self.num.gcd(&self.den);
            if g.degree() > 0 {
                self.num = self.num.divrem(&g).0;
                self.den = self.den.divrem(&g).0;
            }
        }
        if self.den.degree() == 0 {
            let lead_inv = self.den.leading().unwrap().inv().unwrap();
            self.num = self.num.scale(&lead_inv);
            self.den = SPoly::one(self.m());
            return;
        }
        let lead_inv = self.den.leading().unwrap().inv().unwrap();
        self.num = self.num.scale(&lead_inv);
        self.den = self.den.scale(&lead_inv);
    }

    pub fn add(&self, other: &CycloRational) -> CycloRational {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den.degree() == 0 && other.den.degree() == 0 {
            // both denominators are monic constants, hence exactly one
            let mut r = CycloRational { num: self.num.add(&other.num), den: SPoly::one(self.m()) };
            if r.num.is_zero() {
                r = CycloRational::zero(self.m());
            }
            return r;
        }
        // factor the common part of the denominators first
        let g = self.den.gcd(&other.den);
        if g.degree() > 0 {
            let d1 = self.den.divrem(&g).0;
            let d2 = other.den.divrem(&g).0;
            let num = self.num.mul(&d2).add(&other.num.mul(&d1));
            let den = self.den.mul(&d2);
            CycloRational::new(num, den).unwrap()
        } else {
            let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
            let den = self.den.mul(&other.den);
            CycloRational::new(num, den).unwrap()
        }
    }

    pub fn sub(&self, other: &CycloRational) -> CycloRational {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CycloRational {
        CycloRational { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &CycloRational) -> CycloRational {
        if self.is_zero() || other.is_zero() {
            return CycloRational::zero(self.m().max(other.m()));
        }
        // polynomial times polynomial never needs reduction
        if self.den.degree() == 0 && other.den.degree() == 0 {
            let mut r = CycloRational { num: self.num.mul(&other.num), den: SPoly::one(self.m()) };
            let scale = self.den.leading().unwrap().mul(other.den.leading().unwrap()).inv().unwrap();
            r.num = r.num.scale(&scale);
            return r;
        }
        // cancel across the fraction before multiplying out
        let g1 = if other.den.degree() > 0 { self.num.gcd(&other.den) } else { SPoly::one(1) };
        let g2 = if self.den.degree() > 0 { other.num.gcd(&self.den) } else { SPoly::one(1) };
        let n1 = if g1.degree() > 0 { self.num.divrem(&g1).0 } else { self.num.clone() };
        let d2 = if g1.degree() > 0 { other.den.divrem(&g1).0 } else { other.den.clone() };
        let n2 = if g2.degree() > 0 { other.num.divrem(&g2).0 } else { other.num.clone() };
        let d1 = if g2.degree() > 0 { self.den.divrem(&g2).0 } else { self.den.clone() };
        CycloRational::new(n1.mul(&n2), d1.mul(&d2)).unwrap()
    }

    pub fn inv(&self) -> Result<CycloRational, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        CycloRational::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &CycloRational) -> Result<CycloRational, FieldError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<CycloRational, FieldError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = CycloRational::one(self.m());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Substitute s -> 1/s (exact, stays in the field).
    pub fn subst_s_inverse(&self) -> CycloRational {
        let nd = self.num.degree().max(0) as usize;
        let dd = self.den.degree().max(0) as usize;
        let mut num = self.num.reverse();
        let mut den = self.den.reverse();
        // rebalance with powers of s so that num/den = f(1/s)
        if nd > dd {
            den = den.mul(&SPoly::monomial(den.m, CycloNum::one(den.m), nd - dd));
        } else if dd > nd {
            num = num.mul(&SPoly::monomial(num.m, CycloNum::one(num.m), dd - nd));
        }
        CycloRational::new(num, den).unwrap()
    }

    /// Numeric evaluation with s -> sqrt(q0) (principal branch), zeta -> e^{2 pi i/M}.
    pub fn eval_at_q(&self, q0: Complex64) -> Result<Complex64, FieldError> {
        let s = q0.sqrt();
        let d = self.den.eval(s);
        if d.norm() < 1e-9 {
            return Err(FieldError::PoleAtEvaluationPoint);
        }
        Ok(self.num.eval(s) / d)
    }

    pub fn render(&self) -> String {
        let num = render_poly(&self.num);
        if self.den.degree() == 0 && self.den.leading().map(|c| c == &CycloNum::one(c.m)).unwrap_or(false) {
            num
        } else {
            format!("({}) / ({})", num, render_poly(&self.den))
        }
    }
}

fn normalize_monic(mut p: SPoly) -> SPoly {
    if p.is_zero() {
        return p;
    }
    let inv = p.leading().unwrap().inv().unwrap();
    p = p.scale(&inv);
    p
}

/// Modular gcd over Q(zeta)[s]: reduce modulo word-size primes p = 2 mod 3
/// (so the cyclotomic relation stays irreducible), run the Euclidean
/// algorithm in F_p[z]/(z^2+z+1)[s], lift by rational reconstruction, and
/// certify by exact division. A candidate of degree zero needs no
/// certification; an uncertified prime is discarded.
mod modular {
    use super::{CycloNum, SPoly};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{Signed, ToPrimitive, Zero};

    const PRIMES: [u64; 4] = [
        4611686018427387847, // 2^62 - 57, = 2 mod 3
        4611686018427387617, // = 2 mod 3
        2305843009213693951, // 2^61 - 1, = 1 mod 3? checked at runtime
        2305843009213693487,
    ];

    #[derive(Clone, Copy, PartialEq, Eq)]
    struct Fz {
        a: u64,
        b: u64,
    }

    struct Field {
        p: u64,
    }

    impl Field {

        fn sub(&self, x: Fz, y: Fz) -> Fz {
            Fz { a: subm(x.a, y.a, self.p), b: subm(x.b, y.b, self.p) }
        }

        fn mul(&self, x: Fz, y: Fz) -> Fz {
            // (a1 + b1 z)(a2 + b2 z), z^2 = -1 - z
            let p = self.p;
            let aa = mulm(x.a, y.a, p);
            let bb = mulm(x.b, y.b, p);
            let cross = addm(mulm(x.a, y.b, p), mulm(x.b, y.a, p), p);
            Fz { a: subm(aa, bb, p), b: subm(cross, bb, p) }
        }

        fn is_zero(&self, x: Fz) -> bool {
            x.a == 0 && x.b == 0
        }

        fn inv(&self, x: Fz) -> Option<Fz> {
            if self.is_zero(x) {
                return None;
            }
            // (a + b z)^{-1} = (a - b - b z) / (a^2 - a b + b^2)
            let p = self.p;
            let norm = subm(addm(mulm(x.a, x.a, p), mulm(x.b, x.b, p), p), mulm(x.a, x.b, p), p);
            let ninv = invm(norm, p)?;
            Some(Fz { a: mulm(subm(x.a, x.b, p), ninv, p), b: mulm(subm(0, x.b, p), ninv, p) })
        }
    }

    fn addm(x: u64, y: u64, p: u64) -> u64 {
        let s = x as u128 + y as u128;
        (s % p as u128) as u64
    }

    fn subm(x: u64, y: u64, p: u64) -> u64 {
        let s = x as u128 + (p - y % p) as u128;
        (s % p as u128) as u64
    }

    fn mulm(x: u64, y: u64, p: u64) -> u64 {
        ((x as u128 * y as u128) % p as u128) as u64
    }

    fn invm(x: u64, p: u64) -> Option<u64> {
        if x == 0 {
            return None;
        }
        // Fermat
        let mut acc = 1u64;
        let mut base = x % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulm(acc, base, p);
            }
            base = mulm(base, base, p);
            e >>= 1;
        }
        Some(acc)
    }

    fn rational_to_fz(c: &CycloNum, p: u64) -> Option<Fz> {
        let conv = |r: &BigRational| -> Option<u64> {
            let pn = BigInt::from(p);
            let num = ((r.numer() % &pn) + &pn) % &pn;
            let den = ((r.denom() % &pn) + &pn) % &pn;
            let den = den.to_u64()?;
            let deninv = invm(den, p)?;
            Some(mulm(num.to_u64()?, deninv, p))
        };
        Some(Fz { a: conv(&c.a)?, b: conv(&c.b)? })
    }

    /// Wang rational reconstruction in the symmetric range.
    fn reconstruct(c: u64, p: u64) -> Option<BigRational> {
        if c == 0 {
            return Some(BigRational::zero());
        }
        let bound = ((p as f64 / 2.0).sqrt()) as i128;
        let (mut r0, mut r1) = (p as i128, c as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1.abs() > bound {
            let q = r0 / r1;
            let r2 = r0 - q * r1;
            let t2 = t0 - q * t1;
            r0 = r1;
            r1 = r2;
            t0 = t1;
            t1 = t2;
        }
        if t1 == 0 || t1.abs() > bound {
            return None;
        }
        let num = BigInt::from(r1);
        let den = BigInt::from(t1);
        if den.is_negative() {
            Some(BigRational::new(-num, -den))
        } else {
            Some(BigRational::new(num, den))
        }
    }

    fn poly_to_fz(poly: &SPoly, p: u64) -> Option<Vec<Fz>> {
        poly.coeffs.iter().map(|c| rational_to_fz(c, p)).collect()
    }

    fn trim(v: &mut Vec<Fz>) {
        while matches!(v.last(), Some(x) if x.a == 0 && x.b == 0) {
            v.pop();
        }
    }

    pub fn gcd(a: &SPoly, b: &SPoly) -> Option<SPoly> {
        let m = CycloNum::promote(a.m, b.m);
        'prime: for &p in &PRIMES {
            if p % 3 != 2 {
                continue;
            }
            let fld = Field { p };
            let Some(mut fa) = poly_to_fz(a, p) else { continue };
            let Some(mut fb) = poly_to_fz(b, p) else { continue };
            trim(&mut fa);
            trim(&mut fb);
            // a bad prime may kill the leading terms
            if fa.len() != (a.degree() + 1) as usize || fb.len() != (b.degree() + 1) as usize {
                continue;
            }
            // Euclid with monic normalization
            while !fb.is_empty() {
                // fa mod fb
                let lb_inv = match fld.inv(*fb.last().unwrap()) {
                    Some(v) => v,
                    None => continue 'prime,
                };
                while fa.len() >= fb.len() && !fa.is_empty() {
                    let shift = fa.len() - fb.len();
                    let c = fld.mul(*fa.last().unwrap(), lb_inv);
                    for (i, &x) in fb.iter().enumerate() {
                        let sub = fld.mul(c, x);
                        fa[shift + i] = fld.sub(fa[shift + i], sub);
                    }
                    trim(&mut fa);
                }
                std::mem::swap(&mut fa, &mut fb);
            }
            if fa.len() <= 1 {
                // gcd degree is bounded by the modular degree, so it is 1
                return Some(SPoly::one(m));
            }
            // make monic and lift
            let linv = fld.inv(*fa.last().unwrap())?;
            let mut coeffs = Vec::with_capacity(fa.len());
            for &c in &fa {
                let cm = fld.mul(c, linv);
                let ar = reconstruct(cm.a, p);
                let br = reconstruct(cm.b, p);
                match (ar, br) {
                    (Some(ar), Some(br)) => coeffs.push(CycloNum { m, a: ar, b: br }),
                    _ => continue 'prime,
                }
            }
            let mut g = SPoly { m, coeffs };
            g.trim();
            if g.is_zero() {
                continue;
            }
            // certify by exact division
            if a.divrem(&g).1.is_zero() && b.divrem(&g).1.is_zero() {
                return Some(g);
            }
        }
        None
    }
}

fn render_poly(p: &SPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (k, c) in p.coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let cs = c.render();
        let part = match k {
            0 => cs,
            1 => format!("{cs}*s"),
            _ => format!("{cs}*s^{k}"),
        };
        parts.push(part);
    }
    parts.join(" + ")
}

/// Parse the canonical rendering produced by `CycloRational::render`.
pub fn parse_cyclo_rational(m: u8, text: &str) -> Result<CycloRational, FieldError> {
    let t = text.trim();
    if let Some(idx) = split_top_level_div(t) {
        let num = parse_poly(m, strip_parens(&t[..idx]))?;
        let den = parse_poly(m, strip_parens(&t[idx + 1..]))?;
        CycloRational::new(num, den)
    } else {
        Ok(CycloRational { num: parse_poly(m, strip_parens(t))?, den: SPoly::one(m) })
    }
}

fn split_top_level_div(t: &str) -> Option<usize> {
    let mut depth = 0;
    for (i, ch) in t.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => {
                // distinguish a top-level fraction bar from rational coefficients:
                // coefficients only contain '/' inside parentheses or directly
                // between digits; the canonical form always parenthesizes both
                // sides of the bar, so require a following '('.
                if t[i + 1..].trim_start().starts_with('(') {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

fn strip_parens(t: &str) -> &str {
    let t = t.trim();
    if t.starts_with('(') && t.ends_with(')') {
        let inner = &t[1..t.len() - 1];
        let mut depth = 0;
        for ch in inner.chars() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth < 0 {
                        return t;
                    }
                }
                _ => {}
            }
        }
        inner
    } else {
        t
    }
}

fn parse_poly(m: u8, text: &str) -> Result<SPoly, FieldError> {
    let mut acc = SPoly::zero(m);
    for term in split_terms(text) {
        let term = term.trim();
        if term.is_empty() {
            continue;
        }
        acc = acc.add(&parse_term(m, term)?);
    }
    Ok(acc)
}

fn split_terms(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    let mut prev: Option<char> = None;
    for ch in text.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                prev = Some(ch);
                continue;
            }
            '-' if depth == 0 && prev.map(|p| p != '^' && p != '*').unwrap_or(false) && !cur.trim().is_empty() => {
                out.push(std::mem::take(&mut cur));
                cur.push('-');
                prev = Some(ch);
                continue;
            }
            _ => {}
        }
        cur.push(ch);
        prev = Some(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out
}

fn parse_term(m: u8, term: &str) -> Result<SPoly, FieldError> {
    let mut coeff = CycloNum::one(m);
    let mut neg = false;
    let mut deg = 0usize;
    let mut rest = term.trim();
    if let Some(r) = rest.strip_prefix('-') {
        neg = true;
        rest = r.trim();
    }
    if rest.is_empty() {
        return Err(FieldError::Parse(term.into()));
    }
    for factor in split_factors(rest) {
        let f = factor.trim();
        if f.is_empty() {
            continue;
        }
        if let Some(exp) = f.strip_prefix("s^") {
            deg += exp
                .trim()
                .parse::<usize>()
                .map_err(|_| FieldError::Parse(f.into()))?;
        } else if f == "s" {
            deg += 1;
        } else {
            coeff = coeff.mul(&parse_cyclo_coeff(m, f)?);
        }
    }
    if neg {
        coeff = coeff.neg();
    }
    Ok(SPoly::monomial(m, coeff, deg))
}

fn split_factors(term: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    for ch in term.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_cyclo_coeff(m: u8, text: &str) -> Result<CycloNum, FieldError> {
    let t = strip_parens(text.trim());
    if t == "z" {
        return Ok(CycloNum::zeta(m));
    }
    // forms: "p", "p/q", "p+r*z", "p/q+r/t*z", "r*z"
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    for part in split_terms(t) {
        let p = part.trim();
        if p.is_empty() {
            continue;
        }
        if let Some(rat) = p.strip_suffix("*z") {
            b += parse_big_rational(rat)?;
        } else if p == "z" {
            b += BigRational::one();
        } else if p == "-z" {
            b -= BigRational::one();
        } else {
            a += parse_big_rational(p)?;
        }
    }
    Ok(CycloNum { m, a, b })
}

fn parse_big_rational(text: &str) -> Result<BigRational, FieldError> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| FieldError::Parse(t.into()))?;
        let d: BigInt = d.trim().parse().map_err(|_| FieldError::Parse(t.into()))?;
        if d.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = t.parse().map_err(|_| FieldError::Parse(t.into()))?;
        Ok(BigRational::from_integer(n))
    }
}

/// The q-integer [m]_{q^d} as an element of Q(zeta)(s), with d a half-integer.
pub fn qnumber(mm: u8, m: i64, d: Half) -> Result<CycloRational, FieldError> {
    if d == Half::ZERO {
        return Err(FieldError::ZeroQuantumBase);
    }
    if m == 0 {
        return Ok(CycloRational::zero(mm));
    }
    // [m]_{q^d} = (s^{2dm} - s^{-2dm}) / (s^{2d} - s^{-2d})
    let num = CycloRational::s_pow(mm, d.doubled() * m).sub(&CycloRational::s_pow(mm, -d.doubled() * m));
    let den = CycloRational::s_pow(mm, d.doubled()).sub(&CycloRational::s_pow(mm, -d.doubled()));
    num.div(&den)
}

/// [m]_{q^d}! = [m] [m-1] ... [1].
pub fn qfactorial(mm: u8, m: i64, d: Half) -> Result<CycloRational, FieldError> {
    if m < 0 {
        return Err(FieldError::NegativeFactorial(m));
    }
    let mut acc = CycloRational::one(mm);
    for k in 1..=m {
        acc = acc.mul(&qnumber(mm, k, d)?);
    }
    Ok(acc)
}

/// Exact evaluation target Q(zeta_M)(sqrt 5): values x + y*sqrt(5).
///
/// Used by the numeric consistency checks at q0 = 5/4, where s = sqrt(5)/2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadExt {
    pub x: CycloNum,
    pub y: CycloNum,
}

impl QuadExt {
    pub fn zero(m: u8) -> QuadExt {
        QuadExt { x: CycloNum::zero(m), y: CycloNum::zero(m) }
    }

    pub fn one(m: u8) -> QuadExt {
        QuadExt { x: CycloNum::one(m), y: CycloNum::zero(m) }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn add(&self, o: &QuadExt) -> QuadExt {
        QuadExt { x: self.x.add(&o.x), y: self.y.add(&o.y) }
    }

    pub fn sub(&self, o: &QuadExt) -> QuadExt {
        QuadExt { x: self.x.sub(&o.x), y: self.y.sub(&o.y) }
    }

    pub fn neg(&self) -> QuadExt {
        QuadExt { x: self.x.neg(), y: self.y.neg() }
    }

    pub fn mul(&self, o: &QuadExt) -> QuadExt {
        let five = CycloNum::from_int(self.x.m, 5);
        QuadExt {
            x: self.x.mul(&o.x).add(&five.mul(&self.y.mul(&o.y))),
            y: self.x.mul(&o.y).add(&self.y.mul(&o.x)),
        }
    }

    pub fn inv(&self) -> Result<QuadExt, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let five = CycloNum::from_int(self.x.m, 5);
        let norm = self.x.mul(&self.x).sub(&five.mul(&self.y.mul(&self.y)));
        let ninv = norm.inv()?;
        Ok(QuadExt { x: self.x.mul(&ninv), y: self.y.neg().mul(&ninv) })
    }

    pub fn eval(&self) -> Complex64 {
        self.x.eval() + self.y.eval() * (5.0f64).sqrt()
    }
}

/// Evaluate at s = sqrt(5)/2 exactly, landing in Q(zeta_M)(sqrt 5).
pub fn eval_at_sqrt5_over_2(v: &CycloRational) -> Result<QuadExt, FieldError> {
    let num = eval_poly_sqrt5(&v.num);
    let den = eval_poly_sqrt5(&v.den);
    if den.is_zero() {
        return Err(FieldError::PoleAtEvaluationPoint);
    }
    Ok(num.mul(&den.inv()?))
}

fn eval_poly_sqrt5(p: &SPoly) -> QuadExt {
    // s^{2t} = (5/4)^t, s^{2t+1} = (5/4)^t * (1/2) * sqrt(5)
    let m = p.m;
    let mut acc = QuadExt::zero(m);
    let mut pow = BigRational::one(); // (5/4)^t
    let five_quarters = BigRational::new(BigInt::from(5), BigInt::from(4));
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let mut k = 0usize;
    while k < p.coeffs.len() {
        let even = &p.coeffs[k];
        if !even.is_zero() {
            let c = even.mul(&CycloNum::from_rational(m, pow.clone()));
            acc.x = acc.x.add(&c);
        }
        if k + 1 < p.coeffs.len() {
            let odd = &p.coeffs[k + 1];
            if !odd.is_zero() {
                let c = odd.mul(&CycloNum::from_rational(m, &pow * &half));
                acc.y = acc.y.add(&c);
            }
        }
        pow *= &five_quarters;
        k += 2;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Deterministic xorshift for randomized identity checks.
    pub struct Rng(u64);

    impl Rng {
        pub fn new(seed: u64) -> Rng {
            Rng(seed.max(1))
        }

        pub fn next(&mut self) -> u64 {
            let mut x = self.0;
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            self.0 = x;
            x
        }

        pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
            lo + (self.next() % ((hi - lo + 1) as u64)) as i64
        }
    }

    fn random_elem(rng: &mut Rng, m: u8) -> CycloRational {
        let mut num = SPoly::zero(m);
        for _ in 0..3 {
            let c = CycloNum {
                m,
                a: brat(rng.int(-4, 4)),
                b: if m == 3 { brat(rng.int(-2, 2)) } else { BigRational::zero() },
            };
            num = num.add(&SPoly::monomial(m, c, rng.int(0, 5) as usize));
        }
        let mut den = SPoly::zero(m);
        while den.is_zero() {
            den = SPoly::monomial(m, CycloNum::from_int(m, rng.int(1, 3)), rng.int(0, 3) as usize)
                .add(&SPoly::one(m));
        }
        CycloRational::new(num, den).unwrap()
    }

    /// Independent oracle: expand (x^m - x^-m)/(x - x^-1) by long division over
    /// integer Laurent coefficients, with x = s^{d.doubled()}.
    fn qnumber_oracle(mm: u8, m: i64, d: Half) -> CycloRational {
        // exponents of s present in the expansion sum_{k=0}^{|m|-1} x^{m-1-2k}
        let sign = if m >= 0 { 1 } else { -1 };
        let ma = m.abs();
        let mut acc = CycloRational::zero(mm);
        for k in 0..ma {
            let e = (ma - 1 - 2 * k) * d.doubled();
            acc = acc.add(&CycloRational::s_pow(mm, e));
        }
        if sign < 0 {
            acc = acc.neg();
        }
        acc
    }

    #[test]
    fn qnumber_basic_values() {
        // [2]_q = q + q^-1
        let v = qnumber(1, 2, Half::from_int(1)).unwrap();
        let expected = CycloRational::s_pow(1, 2).add(&CycloRational::s_pow(1, -2));
        assert_eq!(v, expected);
        // [0]_q = 0 by convention
        assert!(qnumber(1, 0, Half::from_int(1)).unwrap().is_zero());
        // [5]_{q^{1/2}} = s^4 + s^2 + 1 + s^-2 + s^-4, from the division oracle
        let v = qnumber(1, 5, Half::halves(1)).unwrap();
        assert_eq!(v, qnumber_oracle(1, 5, Half::halves(1)));
        let direct = [4i64, 2, 0, -2, -4]
            .iter()
            .fold(CycloRational::zero(1), |acc, &e| acc.add(&CycloRational::s_pow(1, e)));
        assert_eq!(v, direct);
    }

    #[test]
    fn qnumber_matches_oracle_on_range() {
        for m in -7..=7 {
            for dd in [-2i64, -1, 1, 2, 3, 4, 6] {
                let d = Half::halves(dd);
                assert_eq!(qnumber(3, m, d).unwrap(), qnumber_oracle(3, m, d), "m={m} d={dd}/2");
            }
        }
    }

    #[test]
    fn qfactorial_values() {
        assert_eq!(qfactorial(1, 0, Half::ONE).unwrap(), CycloRational::one(1));
        assert_eq!(
            qfactorial(1, 2, Half::ONE).unwrap(),
            qnumber(1, 2, Half::ONE).unwrap()
        );
        // [3]_{q^{1/2}}! = (s^2 + 1 + s^-2)(s + s^-1)
        let h = Half::halves(1);
        let f3 = qfactorial(1, 3, h).unwrap();
        let product = qnumber(1, 3, h)
            .unwrap()
            .mul(&qnumber(1, 2, h).unwrap())
            .mul(&qnumber(1, 1, h).unwrap());
        assert_eq!(f3, product);
        let direct = CycloRational::s_pow(1, 2)
            .add(&CycloRational::one(1))
            .add(&CycloRational::s_pow(1, -2))
            .mul(&CycloRational::s_pow(1, 1).add(&CycloRational::s_pow(1, -1)));
        assert_eq!(f3, direct);
        assert!(qfactorial(1, -1, h).is_err());
    }

    #[test]
    fn numeric_evaluation() {
        let q0 = Complex64::new(2.0, 0.0);
        let v = qnumber(1, 2, Half::ONE).unwrap().eval_at_q(q0).unwrap();
        assert!((v - Complex64::new(2.5, 0.0)).norm() < 1e-12);

        // zeta_3^2 + zeta_3 + 1 = 0
        let z = CycloNum::zeta(3);
        let expr = z.mul(&z).add(&z).add(&CycloNum::one(3));
        assert!(expr.is_zero());

        let v = qnumber(1, 3, Half::ONE).unwrap().eval_at_q(Complex64::new(3.0, 0.0)).unwrap();
        assert!((v.re - (9.0 + 1.0 + 1.0 / 9.0)).abs() < 1e-12);

        // pole detection: 1/(s^2 - 2) at q0 = 2
        let den = SPoly::monomial(1, CycloNum::one(1), 2).add(&SPoly::constant(CycloNum::from_int(1, -2)));
        let f = CycloRational::new(SPoly::one(1), den).unwrap();
        assert!(matches!(f.eval_at_q(q0), Err(FieldError::PoleAtEvaluationPoint)));
    }

    #[test]
    fn field_axioms_randomized() {
        let mut rng = Rng::new(0x5eed);
        for _ in 0..40 {
            let m = if rng.int(0, 1) == 0 { 1 } else { 3 };
            let a = random_elem(&mut rng, m);
            let b = random_elem(&mut rng, m);
            let c = random_elem(&mut rng, m);
            assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            assert_eq!(a.add(&b), b.add(&a));
            assert_eq!(a.mul(&b), b.mul(&a));
            if !a.is_zero() {
                assert_eq!(a.mul(&a.inv().unwrap()), CycloRational::one(m));
            }
            // a == b iff a - b normalizes to zero
            let d = a.sub(&b);
            assert_eq!(d.is_zero(), a == b);
        }
    }

    #[test]
    fn qnumber_symmetries() {
        for m in 1..=6 {
            for dd in [1i64, 2, 3] {
                let d = Half::halves(dd);
                let plus = qnumber(1, m, d).unwrap();
                let minus = qnumber(1, -m, d).unwrap();
                assert_eq!(minus, plus.neg());
                // bar-invariance: substituting s -> s^-1 fixes q-integers
                assert_eq!(plus.subst_s_inverse(), plus);
            }
        }
    }

    #[test]
    fn render_parse_round_trip() {
        let mut rng = Rng::new(0xfeed);
        for _ in 0..30 {
            let m = if rng.int(0, 1) == 0 { 1 } else { 3 };
            let a = random_elem(&mut rng, m);
            let text = a.render();
            let back = parse_cyclo_rational(m, &text).unwrap();
            assert_eq!(a, back, "round trip failed for {text}");
        }
        let v = qnumber(3, 5, Half::halves(1)).unwrap();
        assert_eq!(parse_cyclo_rational(3, &v.render()).unwrap(), v);
    }

    #[test]
    fn quad_ext_exact_eval() {
        // (s^2) at s = sqrt5/2 is 5/4
        let q = CycloRational::s_pow(1, 2);
        let v = eval_at_sqrt5_over_2(&q).unwrap();
        assert_eq!(v.x, CycloNum::from_rational(1, BigRational::new(BigInt::from(5), BigInt::from(4))));
        assert!(v.y.is_zero());
        // s * s = s^2 consistency through the quadratic extension
        let s = CycloRational::s_pow(1, 1);
        let vs = eval_at_sqrt5_over_2(&s).unwrap();
        assert_eq!(vs.mul(&vs), v);
        // inverse round trip
        let r = qnumber(1, 3, Half::halves(1)).unwrap();
        let e = eval_at_sqrt5_over_2(&r).unwrap();
        assert_eq!(e.mul(&e.inv().unwrap()), QuadExt::one(1));
    }
}
