//! Simply-laced Dynkin diagrams, diagram automorphisms, and the Cartan data
//! of the twisted affine types obtained by folding, together with the
//! structure-constant matrices F(k) and their determinants.

use crate::field::{qnumber, CycloNum, CycloRational, FieldError, Half};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootDataError {
    NotAnAutomorphism,
    IdentityAutomorphism,
    BadOrder(u8),
    UnknownType(String),
    BadDivisibility { k: i64, m: u8, want_divisible: bool },
    ZeroK,
    Field(FieldError),
}

impl fmt::Display for RootDataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootDataError::NotAnAutomorphism => write!(f, "permutation is not a diagram automorphism"),
            RootDataError::IdentityAutomorphism => write!(f, "identity permutation gives no twisted type"),
            RootDataError::BadOrder(m) => write!(f, "automorphism order {m} not in {{2,3}}"),
            RootDataError::UnknownType(s) => write!(f, "unknown type name {s}"),
            RootDataError::BadDivisibility { k, m, want_divisible } => {
                if *want_divisible {
                    write!(f, "k = {k} must be divisible by M = {m}")
                } else {
                    write!(f, "k = {k} must not be divisible by M = {m}")
                }
            }
            RootDataError::ZeroK => write!(f, "k = 0 not allowed"),
            RootDataError::Field(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RootDataError {}

impl From<FieldError> for RootDataError {
    fn from(e: FieldError) -> Self {
        RootDataError::Field(e)
    }
}

/// Finite simply-laced types with standard node labels 1..n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiniteType {
    A(usize),
    D(usize),
    E6,
}

impl FiniteType {
    pub fn rank(&self) -> usize {
        match self {
            FiniteType::A(n) => *n,
            FiniteType::D(n) => *n,
            FiniteType::E6 => 6,
        }
    }

    /// Edges of the Dynkin diagram, 0-indexed.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        match self {
            FiniteType::A(n) => (0..n - 1).map(|i| (i, i + 1)).collect(),
            FiniteType::D(n) => {
                assert!(*n >= 3);
                let mut e: Vec<(usize, usize)> = (0..n - 3).map(|i| (i, i + 1)).collect();
                e.push((n - 3, n - 2));
                e.push((n - 3, n - 1));
                e
            }
            FiniteType::E6 => vec![(0, 2), (2, 3), (3, 4), (4, 5), (1, 3)],
        }
    }

    /// Cartan matrix with C[i][j] = <alpha_j, alpha_i^vee>, 0-indexed.
    pub fn cartan(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut c = vec![vec![0i64; n]; n];
        for i in 0..n {
            c[i][i] = 2;
        }
        for (i, j) in self.edges() {
            c[i][j] = -1;
            c[j][i] = -1;
        }
        c
    }
}

impl fmt::Display for FiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiniteType::A(n) => write!(f, "A{n}"),
            FiniteType::D(n) => write!(f, "D{n}"),
            FiniteType::E6 => write!(f, "E6"),
        }
    }
}

/// A simply-laced diagram together with an automorphism and its orbit data.
#[derive(Debug, Clone)]
pub struct FoldingDatum {
    pub finite_type: FiniteType,
    /// 0-indexed permutation of the nodes.
    pub sigma: Vec<usize>,
    /// Order of sigma (1 for the untwisted degenerate case).
    pub m_order: u8,
    /// Orbits sorted by representative; each orbit lists its nodes ascending.
    pub orbits: Vec<Vec<usize>>,
    /// Representative (minimum) of each orbit.
    pub fixed_reps: Vec<usize>,
    /// Orbit index of each node.
    pub orbit_of: Vec<usize>,
}

impl FoldingDatum {
    pub fn n_orbits(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_fixed(&self, orbit: usize) -> bool {
        self.orbits[orbit].len() == 1
    }

    /// For node i, the exponent k with i = sigma^k(rep(orbit(i))).
    pub fn shift_from_rep(&self, node: usize) -> u32 {
        let rep = self.fixed_reps[self.orbit_of[node]];
        let mut cur = rep;
        for k in 0..self.m_order as u32 {
            if cur == node {
                return k;
            }
            cur = self.sigma[cur];
        }
        unreachable!("node not in its own orbit")
    }
}

/// Cartan data of the folded affine diagram. Orbits come first in the index
/// order (sorted by representative), the affine node is last.
#[derive(Debug, Clone)]
pub struct TwistedCartan {
    pub name: String,
    /// (n_orbits + 1) x (n_orbits + 1), affine node last.
    pub c_sigma: Vec<Vec<i64>>,
    /// Symmetrizers d, one per label (affine node last); half-integers.
    pub d: Vec<Half>,
    /// N_i over the unfolded nodes: M at fixed nodes, 1 elsewhere.
    pub n_map: Vec<u8>,
    /// Kac marks a_i with a_eps = 1 (affine node last).
    pub marks: Vec<i64>,
}

impl TwistedCartan {
    pub fn eps_index(&self) -> usize {
        self.c_sigma.len() - 1
    }
}

/// The working context for one (possibly degenerate) folded type.
#[derive(Debug, Clone)]
pub struct Ctx {
    pub fd: FoldingDatum,
    pub tc: TwistedCartan,
    /// Order of the root-of-unity lattice: lcm(2, M), possibly widened so the
    /// characters of a source type can be folded into a larger lattice.
    pub lattice: u32,
    /// Inverse of the finite symmetrized block (d_i C_ij) over the orbits.
    pub b_inv: Vec<Vec<BigRational>>,
}

impl Ctx {
    pub fn n_orbits(&self) -> usize {
        self.fd.n_orbits()
    }

    pub fn m_order(&self) -> u8 {
        self.fd.m_order
    }

    /// Exponent of the primitive lattice root giving omega = e^{2 pi i / M}.
    pub fn omega_exp(&self) -> u32 {
        self.lattice / self.fd.m_order as u32
    }

    /// Cyclotomic order used for coefficients (3 if omega is a cube root).
    pub fn cyclo_m(&self) -> u8 {
        if self.fd.m_order == 3 {
            3
        } else {
            1
        }
    }
}

fn validate_sigma(ft: FiniteType, sigma: &[usize]) -> Result<u8, RootDataError> {
    let n = ft.rank();
    if sigma.len() != n {
        return Err(RootDataError::NotAnAutomorphism);
    }
    let mut seen = vec![false; n];
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(RootDataError::NotAnAutomorphism);
        }
        seen[s] = true;
    }
    let c = ft.cartan();
    for i in 0..n {
        for j in 0..n {
            if c[sigma[i]][sigma[j]] != c[i][j] {
                return Err(RootDataError::NotAnAutomorphism);
            }
        }
    }
    // order
    let mut order = 1u8;
    let mut cur: Vec<usize> = sigma.to_vec();
    while cur.iter().enumerate().any(|(i, &s)| s != i) {
        cur = cur.iter().map(|&i| sigma[i]).collect();
        order += 1;
        if order > 3 {
            return Err(RootDataError::BadOrder(order));
        }
    }
    Ok(order)
}

fn orbit_data(ft: FiniteType, sigma: &[usize], m: u8) -> FoldingDatum {
    let n = ft.rank();
    let mut orbit_of = vec![usize::MAX; n];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let mut orb = vec![i];
        let mut cur = sigma[i];
        while cur != i {
            orb.push(cur);
            cur = sigma[cur];
        }
        orb.sort_unstable();
        let idx = orbits.len();
        for &x in &orb {
            orbit_of[x] = idx;
        }
        orbits.push(orb);
    }
    // orbits are discovered in order of their minimum, hence already sorted by rep
    let fixed_reps = orbits.iter().map(|o| o[0]).collect();
    FoldingDatum { finite_type: ft, sigma: sigma.to_vec(), m_order: m, orbits, fixed_reps, orbit_of }
}

/// Enumerate the roots of the folded finite system as integer vectors over the
/// simple roots, via closure under simple reflections.
fn finite_roots(c: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = c.len();
    let mut roots: Vec<Vec<i64>> = Vec::new();
    let mut queue: Vec<Vec<i64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = 1;
        roots.push(e.clone());
        queue.push(e);
    }
    while let Some(beta) = queue.pop() {
        for i in 0..n {
            let pairing: i64 = (0..n).map(|j| beta[j] * c[i][j]).sum();
            let mut refl = beta.clone();
            refl[i] -= pairing;
            if !roots.contains(&refl) {
                roots.push(refl.clone());
                queue.push(refl);
            }
        }
    }
    roots
}

/// Build the full twisted Cartan data for a valid nontrivial automorphism.
pub fn build_twisted(ft: FiniteType, sigma: &[usize]) -> Result<(FoldingDatum, TwistedCartan), RootDataError> {
    let m = validate_sigma(ft, sigma)?;
    if m == 1 {
        return Err(RootDataError::IdentityAutomorphism);
    }
    Ok(build_cartan(ft, sigma, m))
}

fn build_cartan(ft: FiniteType, sigma: &[usize], m: u8) -> (FoldingDatum, TwistedCartan) {
    let fd = orbit_data(ft, sigma, m);
    let c = ft.cartan();
    let n_orb = fd.n_orbits();
    // A_{2n}^{(2)} is signalled by an orbit whose representative is adjacent
    // to its image.
    let doubled_family = (0..ft.rank()).any(|i| sigma[i] != i && c[i][sigma[i]] == -1);

    // symmetrizers over the orbits
    let mut d: Vec<Half> = Vec::with_capacity(n_orb + 1);
    for orb in 0..n_orb {
        let rep = fd.fixed_reps[orb];
        if fd.is_fixed(orb) {
            d.push(Half::from_int(m as i64));
        } else if c[rep][sigma[rep]] == -1 {
            d.push(Half::halves(1));
        } else {
            d.push(Half::from_int(1));
        }
    }

    // finite block: d_j * C^sigma_{j,i} = sum_r C_{rep(i), sigma^r(rep(j))}
    let mut cs = vec![vec![0i64; n_orb + 1]; n_orb + 1];
    for jo in 0..n_orb {
        for io in 0..n_orb {
            let i = fd.fixed_reps[io];
            let j = fd.fixed_reps[jo];
            let mut sum = 0i64;
            let mut cur = sigma[j];
            for _ in 0..m {
                sum += c[i][cur];
                cur = sigma[cur];
            }
            let doubled = 2 * sum;
            assert_eq!(doubled % d[jo].doubled(), 0, "non-integral Cartan entry");
            cs[jo][io] = doubled / d[jo].doubled();
        }
    }

    // affine node from the highest short root of the folded finite block
    let kappa: i64 = if doubled_family { 2 } else { 1 };
    let finite_block: Vec<Vec<i64>> = (0..n_orb).map(|i| cs[i][..n_orb].to_vec()).collect();
    let roots = finite_roots(&finite_block);
    let len2_doubled = |beta: &[i64]| -> i64 {
        let mut acc = 0i64;
        for i in 0..n_orb {
            for j in 0..n_orb {
                acc += beta[i] * beta[j] * d[i].doubled() * finite_block[i][j];
            }
        }
        acc
    };
    let min_len = roots.iter().map(|b| len2_doubled(b)).min().unwrap();
    let theta = roots
        .iter()
        .filter(|b| len2_doubled(b) == min_len)
        .max_by_key(|b| b.iter().sum::<i64>())
        .unwrap()
        .clone();
    let tt2 = len2_doubled(&theta);
    let eps = n_orb;
    cs[eps][eps] = 2;
    for j in 0..n_orb {
        // 2 (theta, alpha_j), in doubled units
        let ta2: i64 = (0..n_orb).map(|i| theta[i] * d[i].doubled() * finite_block[i][j]).sum();
        let num_eps_row = -2 * ta2;
        assert_eq!(num_eps_row % (kappa * tt2), 0);
        cs[eps][j] = num_eps_row / (kappa * tt2);
        let num_eps_col = -kappa * ta2;
        assert_eq!(num_eps_col % d[j].doubled(), 0);
        cs[j][eps] = num_eps_col / d[j].doubled();
    }
    let d_eps_doubled = kappa * kappa * tt2 / 2;
    assert_eq!(kappa * kappa * tt2 % 2, 0);
    d.push(Half(d_eps_doubled));

    let n_map: Vec<u8> = (0..ft.rank()).map(|i| if sigma[i] == i { m } else { 1 }).collect();
    let marks = solve_marks(&cs, &d);
    let name = type_name(ft, m);
    let tc = TwistedCartan { name, c_sigma: cs, d, n_map, marks };
    (fd, tc)
}

/// Unique positive-integer solution of sum_i a_i d_i C_{i,j} = 0 with a_eps = 1.
fn solve_marks(cs: &[Vec<i64>], d: &[Half]) -> Vec<i64> {
    let n = cs.len();
    // B[i][j] = d_i C_{i,j} (doubled); solve a^T B = 0 with a[n-1] = 1.
    // Equivalently solve the linear system over the first n-1 unknowns.
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for j in 0..n {
        let mut row: Vec<BigRational> = (0..n - 1)
            .map(|i| BigRational::from_integer(BigInt::from(d[i].doubled() * cs[i][j])))
            .collect();
        // move the a_eps = 1 contribution to the right-hand side
        row.push(BigRational::from_integer(BigInt::from(-d[n - 1].doubled() * cs[n - 1][j])));
        rows.push(row);
    }
    let sol = solve_linear(rows, n - 1).expect("marks system is solvable");
    let mut marks: Vec<i64> = sol
        .iter()
        .map(|r| {
            assert!(r.is_integer(), "non-integral mark");
            r.to_integer().to_i64().unwrap()
        })
        .collect();
    marks.push(1);
    assert!(marks.iter().all(|&a| a > 0), "marks must be positive");
    marks
}

/// Gaussian elimination for a possibly overdetermined consistent system.
fn solve_linear(mut rows: Vec<Vec<BigRational>>, unknowns: usize) -> Option<Vec<BigRational>> {
    let mut pivot_row = 0;
    let mut pivots: Vec<usize> = Vec::new();
    for col in 0..unknowns {
        let Some(r) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, r);
        let p = rows[pivot_row][col].clone();
        for x in rows[pivot_row].iter_mut() {
            *x /= &p;
        }
        for r in 0..rows.len() {
            if r != pivot_row && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for cidx in 0..=unknowns {
                    let sub = &rows[pivot_row][cidx] * &f;
                    rows[r][cidx] -= sub;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    if pivots.len() != unknowns {
        return None;
    }
    // consistency of remaining rows
    for r in pivot_row..rows.len() {
        if !rows[r][unknowns].is_zero() {
            return None;
        }
    }
    let mut sol = vec![BigRational::zero(); unknowns];
    for (row, &col) in pivots.iter().enumerate() {
        sol[col] = rows[row][unknowns].clone();
    }
    Some(sol)
}

fn type_name(ft: FiniteType, m: u8) -> String {
    match (ft, m) {
        (_, 1) => format!("{ft}^1"),
        (FiniteType::A(n), 2) => format!("A{n}^2"),
        (FiniteType::D(n), 2) => format!("D{n}^2"),
        (FiniteType::D(4), 3) => "D4^3".into(),
        (FiniteType::E6, 2) => "E6^2".into(),
        _ => format!("{ft}^{m}"),
    }
}

/// Twisted affine families, used to pick determinant closed forms and QQ~
/// branch shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwistedFamily {
    /// A_{2n}^{(2)}
    ADoubled { n: usize },
    /// A_{2n-1}^{(2)}
    AOdd { n: usize },
    /// D_{n+1}^{(2)}
    DTwo { n: usize },
    /// E_6^{(2)}
    ESix,
    /// D_4^{(3)}
    DFour3,
}

pub fn family_of(ctx: &Ctx) -> Option<TwistedFamily> {
    let ft = ctx.fd.finite_type;
    let m = ctx.fd.m_order;
    let c = ft.cartan();
    match (ft, m) {
        (FiniteType::A(nn), 2) => {
            let doubled = (0..nn).any(|i| ctx.fd.sigma[i] != i && c[i][ctx.fd.sigma[i]] == -1);
            if doubled {
                Some(TwistedFamily::ADoubled { n: nn / 2 })
            } else {
                Some(TwistedFamily::AOdd { n: (nn + 1) / 2 })
            }
        }
        (FiniteType::D(nn), 2) => Some(TwistedFamily::DTwo { n: nn - 1 }),
        (FiniteType::E6, 2) => Some(TwistedFamily::ESix),
        (FiniteType::D(4), 3) => Some(TwistedFamily::DFour3),
        _ => None,
    }
}

/// Resolve a CLI/config type name like "A3^2" into its source diagram and
/// the canonical automorphism.
pub fn parse_type_name(name: &str) -> Result<(FiniteType, Vec<usize>), RootDataError> {
    let err = || RootDataError::UnknownType(name.into());
    let (base, order) = name.split_once('^').ok_or_else(err)?;
    let order: u8 = order.trim().parse().map_err(|_| err())?;
    let fam = base.trim();
    let (letter, n) = fam.split_at(1);
    let n: usize = n.parse().map_err(|_| err())?;
    match (letter, order) {
        ("A", 2) => {
            if n < 2 {
                return Err(err());
            }
            let sigma: Vec<usize> = (0..n).map(|i| n - 1 - i).collect();
            Ok((FiniteType::A(n), sigma))
        }
        ("D", 2) => {
            if n < 3 {
                return Err(err());
            }
            let mut sigma: Vec<usize> = (0..n).collect();
            sigma.swap(n - 2, n - 1);
            Ok((FiniteType::D(n), sigma))
        }
        ("D", 3) => {
            if n != 4 {
                return Err(err());
            }
            // cycle the three outer nodes 1 -> 3 -> 4 -> 1 (0-indexed 0 -> 2 -> 3 -> 0)
            Ok((FiniteType::D(4), vec![2, 1, 3, 0]))
        }
        ("E", 2) => {
            if n != 6 {
                return Err(err());
            }
            Ok((FiniteType::E6, vec![5, 1, 4, 3, 2, 0]))
        }
        _ => Err(err()),
    }
}

impl Ctx {
    pub fn twisted(name: &str) -> Result<Ctx, RootDataError> {
        let (ft, sigma) = parse_type_name(name)?;
        let (fd, mut tc) = build_twisted(ft, &sigma)?;
        tc.name = name.to_string();
        let lattice = lcm(2, fd.m_order as u32);
        let b_inv = invert_symmetrized(&tc, fd.n_orbits());
        Ok(Ctx { fd, tc, lattice, b_inv })
    }

    pub fn twisted_from(ft: FiniteType, sigma: &[usize]) -> Result<Ctx, RootDataError> {
        let (fd, tc) = build_twisted(ft, sigma)?;
        let lattice = lcm(2, fd.m_order as u32);
        let b_inv = invert_symmetrized(&tc, fd.n_orbits());
        Ok(Ctx { fd, tc, lattice, b_inv })
    }

    /// Degenerate untwisted context over a simply-laced diagram, on a lattice
    /// of the given order (so its characters can be folded into a twisted
    /// context sharing that lattice).
    pub fn untwisted(ft: FiniteType, lattice: u32) -> Ctx {
        let sigma: Vec<usize> = (0..ft.rank()).collect();
        let (fd, tc) = build_cartan(ft, &sigma, 1);
        let b_inv = invert_symmetrized(&tc, fd.n_orbits());
        Ctx { fd, tc, lattice, b_inv }
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    let gcd = |mut x: u32, mut y: u32| {
        while y != 0 {
            let t = x % y;
            x = y;
            y = t;
        }
        x
    };
    a / gcd(a, b) * b
}

fn invert_symmetrized(tc: &TwistedCartan, n_orb: usize) -> Vec<Vec<BigRational>> {
    // B[i][j] = d_i C_{i,j} over the finite block; invert over Q.
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for i in 0..n_orb {
        let mut row: Vec<BigRational> = (0..n_orb)
            .map(|j| BigRational::new(BigInt::from(tc.d[i].doubled() * tc.c_sigma[i][j]), BigInt::from(2)))
            .collect();
        for k in 0..n_orb {
            row.push(if k == i { BigRational::one() } else { BigRational::zero() });
        }
        rows.push(row);
    }
    // Gauss-Jordan
    for col in 0..n_orb {
        let pr = (col..n_orb).find(|&r| !rows[r][col].is_zero()).expect("invertible");
        rows.swap(col, pr);
        let p = rows[col][col].clone();
        for x in rows[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..n_orb {
            if r != col && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in 0..2 * n_orb {
                    let sub = &rows[col][c] * &f;
                    rows[r][c] -= sub;
                }
            }
        }
    }
    rows.into_iter().map(|r| r[n_orb..].to_vec()).collect()
}

/// The matrix F(k) of structure constants over the orbits.
#[derive(Debug, Clone)]
pub struct FkMatrix {
    pub k: i64,
    pub entries: Vec<Vec<CycloRational>>,
}

pub fn f_matrix(ctx: &Ctx, k: i64) -> Result<FkMatrix, RootDataError> {
    if k == 0 {
        return Err(RootDataError::ZeroK);
    }
    let n_orb = ctx.n_orbits();
    let m = ctx.fd.m_order;
    let cm = ctx.cyclo_m();
    let c = ctx.fd.finite_type.cartan();
    let omega = CycloNum::zeta(cm.max(if m == 2 { 2 } else { 1 }));
    let mut entries = vec![vec![CycloRational::zero(cm); n_orb]; n_orb];
    for io in 0..n_orb {
        let i = ctx.fd.fixed_reps[io];
        let di = ctx.tc.d[io];
        // [x]_{q_i} with d_i x = k C: (s^{2kC} - s^{-2kC}) / (s^{2 d_i} - s^{-2 d_i})
        let den = CycloRational::s_pow(cm, di.doubled()).sub(&CycloRational::s_pow(cm, -di.doubled()));
        for jo in 0..n_orb {
            let j = ctx.fd.fixed_reps[jo];
            let mut acc = CycloRational::zero(cm);
            let mut cur = ctx.fd.sigma[j];
            for r in 1..=m {
                let kc = k * c[i][cur];
                if kc != 0 {
                    let num = CycloRational::s_pow(cm, 2 * kc).sub(&CycloRational::s_pow(cm, -2 * kc));
                    let term = num.div(&den)?.mul(&CycloRational::from_cyclo(omega_pow(&omega, k, r as u32, m)));
                    acc = acc.add(&term);
                }
                cur = ctx.fd.sigma[cur];
            }
            entries[io][jo] = acc;
        }
    }
    Ok(FkMatrix { k, entries })
}

fn omega_pow(omega: &CycloNum, k: i64, r: u32, m: u8) -> CycloNum {
    let e = (k * r as i64).rem_euclid(m as i64) as u32;
    let mut acc = CycloNum::one(omega.m);
    for _ in 0..e {
        acc = acc.mul(omega);
    }
    acc
}

pub fn determinant(mat: &[Vec<CycloRational>]) -> CycloRational {
    let n = mat.len();
    if n == 0 {
        return CycloRational::one(1);
    }
    if n == 1 {
        return mat[0][0].clone();
    }
    // cofactor expansion along the first row; sizes here are at most 6
    let mut acc = CycloRational::zero(mat[0][0].m());
    for j in 0..n {
        if mat[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<CycloRational>> = (1..n)
            .map(|r| (0..n).filter(|&c| c != j).map(|c| mat[r][c].clone()).collect())
            .collect();
        let mut term = mat[0][j].mul(&determinant(&minor));
        if j % 2 == 1 {
            term = term.neg();
        }
        acc = acc.add(&term);
    }
    acc
}

/// det F(k), defined when M | k.
pub fn det_f(ctx: &Ctx, k: i64) -> Result<CycloRational, RootDataError> {
    let m = ctx.fd.m_order;
    if k == 0 {
        return Err(RootDataError::ZeroK);
    }
    if k % m as i64 != 0 {
        return Err(RootDataError::BadDivisibility { k, m, want_divisible: true });
    }
    let f = f_matrix(ctx, k)?;
    Ok(determinant(&f.entries))
}

/// det F'(k) over the non-fixed orbits, defined when M does not divide k.
pub fn det_f_prime(ctx: &Ctx, k: i64) -> Result<CycloRational, RootDataError> {
    let m = ctx.fd.m_order;
    if k == 0 {
        return Err(RootDataError::ZeroK);
    }
    if k % m as i64 == 0 {
        return Err(RootDataError::BadDivisibility { k, m, want_divisible: false });
    }
    let f = f_matrix(ctx, k)?;
    let idx: Vec<usize> = (0..ctx.n_orbits()).filter(|&o| !ctx.fd.is_fixed(o)).collect();
    let sub: Vec<Vec<CycloRational>> = idx
        .iter()
        .map(|&r| idx.iter().map(|&c| f.entries[r][c].clone()).collect())
        .collect();
    Ok(determinant(&sub))
}

/// Closed form for det F(Mk) per twisted family (excluding A_{2n}^{(2)}).
pub fn det_closed_form(ctx: &Ctx, k: i64) -> Result<Option<CycloRational>, RootDataError> {
    let cm = ctx.cyclo_m();
    let n2 = |mm: i64, dd: i64| qnumber(cm, mm, Half::from_int(dd));
    let fam = family_of(ctx);
    let v = match fam {
        Some(TwistedFamily::AOdd { n }) => {
            // 2 ([2]_{q^k})^{n-1} [2]_{q^{2nk}} [k]_q^{n-1} [k]_{q^2}
            let mut acc = CycloRational::from_int(cm, 2);
            acc = acc.mul(&n2(2, k)?.pow(n as i64 - 1)?);
            acc = acc.mul(&n2(2, 2 * n as i64 * k)?);
            acc = acc.mul(&qnumber(cm, k, Half::from_int(1))?.pow(n as i64 - 1)?);
            acc = acc.mul(&qnumber(cm, k, Half::from_int(2))?);
            Some(acc)
        }
        Some(TwistedFamily::DTwo { n }) => {
            // 2^{n-1} [2]_{q^k} [2]_{q^{2nk}} [k]_q [k]_{q^2}^{n-1}
            let mut acc = CycloRational::from_int(cm, 1 << (n - 1));
            acc = acc.mul(&n2(2, k)?);
            acc = acc.mul(&n2(2, 2 * n as i64 * k)?);
            acc = acc.mul(&qnumber(cm, k, Half::from_int(1))?);
            acc = acc.mul(&qnumber(cm, k, Half::from_int(2))?.pow(n as i64 - 1)?);
            Some(acc)
        }
        Some(TwistedFamily::ESix) => {
            // 4 ([2]_{q^k})^2 [2]_{q^{12k}} [k]_q^2 [k]_{q^2}^2 / [2]_{q^{4k}}
            //
            // The middle factor is (q^{8k} - 1 + q^{-8k}); see
            // e6_reference_product_differs_in_one_factor in the acceptance
            // suite for the variant with + in place of the middle sign.
            let mut acc = CycloRational::from_int(cm, 4);
            acc = acc.mul(&n2(2, k)?.pow(2)?);
            acc = acc.mul(&n2(2, 12 * k)?);
            acc = acc.mul(&qnumber(cm, k, Half::from_int(1))?.pow(2)?);
            acc = acc.mul(&qnumber(cm, k, Half::from_int(2))?.pow(2)?);
            acc = acc.div(&n2(2, 4 * k)?)?;
            Some(acc)
        }
        Some(TwistedFamily::DFour3) => {
            // 3 [3]_{q^k} [2]_{q^{9k}} [k]_q [k]_{q^3} / [2]_{q^{3k}}
            let mut acc = CycloRational::from_int(cm, 3);
            acc = acc.mul(&n2(3, k)?);
            acc = acc.mul(&n2(2, 9 * k)?);
            acc = acc.mul(&qnumber(cm, k, Half::from_int(1))?);
            acc = acc.mul(&qnumber(cm, k, Half::from_int(3))?);
            acc = acc.div(&n2(2, 3 * k)?)?;
            Some(acc)
        }
        _ => None,
    };
    Ok(v)
}

/// Closed form for det F'(k) per twisted family (excluding A_{2n}^{(2)}).
pub fn det_prime_closed_form(ctx: &Ctx, k: i64) -> Result<Option<CycloRational>, RootDataError> {
    let cm = ctx.cyclo_m();
    let fam = family_of(ctx);
    let v = match fam {
        Some(TwistedFamily::AOdd { n }) => {
            // [n]_{q^k} [k]_q^{n-1}
            let acc = qnumber(cm, n as i64, Half::from_int(k))?
                .mul(&qnumber(cm, k, Half::from_int(1))?.pow(n as i64 - 1)?);
            Some(acc)
        }
        Some(TwistedFamily::DTwo { .. }) | Some(TwistedFamily::DFour3) => {
            // [2]_{q^k} [k]_q
            let acc = qnumber(cm, 2, Half::from_int(k))?.mul(&qnumber(cm, k, Half::from_int(1))?);
            Some(acc)
        }
        Some(TwistedFamily::ESix) => {
            // [3]_{q^k} [k]_q^2
            let acc = qnumber(cm, 3, Half::from_int(k))?.mul(&qnumber(cm, k, Half::from_int(1))?.pow(2)?);
            Some(acc)
        }
        _ => None,
    };
    Ok(v)
}

pub const SUPPORTED_TYPES: [&str; 7] = ["A2^2", "A3^2", "A5^2", "D3^2", "D4^2", "E6^2", "D4^3"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::qfactorial;

    #[test]
    fn a2_folding_shape() {
        let ctx = Ctx::twisted("A2^2").unwrap();
        assert_eq!(ctx.fd.m_order, 2);
        assert_eq!(ctx.n_orbits(), 1);
        assert_eq!(ctx.fd.orbits[0], vec![0, 1]);
        // matrix over (orbit, eps): rows scaled by d give a symmetric matrix
        assert_eq!(ctx.tc.c_sigma, vec![vec![2, -4], vec![-1, 2]]);
        assert_eq!(ctx.tc.d, vec![Half::halves(1), Half::from_int(2)]);
        assert_eq!(ctx.tc.marks, vec![2, 1]);
        assert_eq!(ctx.tc.n_map, vec![1, 1]);
    }

    #[test]
    fn d4_triality_shape() {
        let ctx = Ctx::twisted("D4^3").unwrap();
        assert_eq!(ctx.fd.m_order, 3);
        assert_eq!(ctx.n_orbits(), 2);
        assert_eq!(ctx.fd.orbits[0], vec![0, 2, 3]);
        assert_eq!(ctx.fd.orbits[1], vec![1]);
        // G2 block with the affine node attached to the non-fixed orbit
        assert_eq!(ctx.tc.c_sigma, vec![vec![2, -3, -1], vec![-1, 2, 0], vec![-1, 0, 2]]);
        assert_eq!(ctx.tc.d, vec![Half::from_int(1), Half::from_int(3), Half::from_int(1)]);
        assert_eq!(ctx.tc.marks, vec![2, 1, 1]);
    }

    #[test]
    fn symmetrizer_and_kernel_invariants() {
        for name in SUPPORTED_TYPES {
            let ctx = Ctx::twisted(name).unwrap();
            let n = ctx.n_orbits() + 1;
            let cs = &ctx.tc.c_sigma;
            for i in 0..n {
                assert_eq!(cs[i][i], 2, "{name}");
                for j in 0..n {
                    if i != j {
                        assert!(cs[i][j] <= 0, "{name}");
                        assert_eq!(cs[i][j] == 0, cs[j][i] == 0, "{name}");
                    }
                    // diag(d) C symmetric
                    assert_eq!(
                        ctx.tc.d[i].doubled() * cs[i][j],
                        ctx.tc.d[j].doubled() * cs[j][i],
                        "{name} ({i},{j})"
                    );
                }
            }
            // kernel condition with a_eps = 1
            assert_eq!(*ctx.tc.marks.last().unwrap(), 1, "{name}");
            for j in 0..n {
                let s: i64 = (0..n).map(|i| ctx.tc.marks[i] * ctx.tc.d[i].doubled() * cs[i][j]).sum();
                assert_eq!(s, 0, "{name} column {j}");
            }
            // affine type: rank of the full matrix is n-1 (checked via marks kernel)
        }
    }

    #[test]
    fn a3_marks_brute_force() {
        // cross-check the kernel solver against brute-force search over small
        // positive integers for A3^2
        let ctx = Ctx::twisted("A3^2").unwrap();
        let n = ctx.n_orbits() + 1;
        let cs = &ctx.tc.c_sigma;
        let d = &ctx.tc.d;
        let mut found = None;
        for a0 in 1..=6i64 {
            for a1 in 1..=6i64 {
                let a = [a0, a1, 1];
                let ok = (0..n).all(|j| (0..n).map(|i| a[i] * d[i].doubled() * cs[i][j]).sum::<i64>() == 0);
                if ok {
                    found = Some(vec![a0, a1, 1]);
                }
            }
        }
        assert_eq!(found.unwrap(), ctx.tc.marks);
    }

    #[test]
    fn rejects_bad_sigma() {
        // not an automorphism of A3: swapping nodes 0,1 breaks the edge pattern
        assert!(build_twisted(FiniteType::A(3), &[1, 0, 2]).is_err());
        let id: Vec<usize> = (0..3).collect();
        assert!(matches!(
            build_twisted(FiniteType::A(3), &id),
            Err(RootDataError::IdentityAutomorphism)
        ));
    }

    #[test]
    fn f_matrix_fixed_zero_rows() {
        // when M does not divide k, entries at fixed orbits vanish
        for name in ["A3^2", "D3^2", "D4^2", "E6^2", "D4^3"] {
            let ctx = Ctx::twisted(name).unwrap();
            let m = ctx.fd.m_order as i64;
            for k in 1..=(2 * m) {
                if k % m == 0 {
                    continue;
                }
                let f = f_matrix(&ctx, k).unwrap();
                for io in 0..ctx.n_orbits() {
                    for jo in 0..ctx.n_orbits() {
                        if ctx.fd.is_fixed(io) || ctx.fd.is_fixed(jo) {
                            assert!(f.entries[io][jo].is_zero(), "{name} k={k} ({io},{jo})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn f_matrix_diagonal_value() {
        // diagonal entry at a non-fixed orbit is [2k]_q whenever the orbit
        // members are pairwise non-adjacent (every family except A_{2n}^{(2)},
        // whose middle orbit has d = 1/2 and an extra cross term)
        for name in ["A3^2", "A5^2", "D3^2", "D4^2", "E6^2", "D4^3"] {
            let ctx = Ctx::twisted(name).unwrap();
            let cm = ctx.cyclo_m();
            for k in 1..=4 {
                let f = f_matrix(&ctx, k).unwrap();
                for io in 0..ctx.n_orbits() {
                    if ctx.fd.is_fixed(io) {
                        continue;
                    }
                    let expect = qnumber(cm, 2 * k, Half::from_int(1)).unwrap();
                    assert_eq!(f.entries[io][io], expect, "{name} k={k} orbit {io}");
                }
            }
        }
    }

    #[test]
    fn f2_a3_matches_direct_sum() {
        // independent term-by-term evaluation of the defining sum for A3^2, k=2
        let ctx = Ctx::twisted("A3^2").unwrap();
        let f = f_matrix(&ctx, 2).unwrap();
        let c = ctx.fd.finite_type.cartan();
        let sigma = &ctx.fd.sigma;
        for io in 0..2 {
            let i = ctx.fd.fixed_reps[io];
            for jo in 0..2 {
                let j = ctx.fd.fixed_reps[jo];
                // sum_r [2 C_{i, sigma^r(j)} / d_i]_{q_i} * (-1)^{2r}
                let mut acc = CycloRational::zero(1);
                let mut cur = sigma[j];
                for _ in 0..2 {
                    let kc = 2 * c[i][cur];
                    if kc != 0 {
                        let num = CycloRational::s_pow(1, 2 * kc).sub(&CycloRational::s_pow(1, -2 * kc));
                        let den = CycloRational::s_pow(1, ctx.tc.d[io].doubled())
                            .sub(&CycloRational::s_pow(1, -ctx.tc.d[io].doubled()));
                        acc = acc.add(&num.div(&den).unwrap());
                    }
                    cur = sigma[cur];
                }
                assert_eq!(f.entries[io][jo], acc);
            }
        }
    }

    #[test]
    fn determinant_closed_forms_small() {
        // spot check at k = 1 and k = 2 (the full k = 1..4 sweep lives in the
        // acceptance suite)
        for name in ["A3^2", "A5^2", "D3^2", "D4^2", "E6^2", "D4^3"] {
            let ctx = Ctx::twisted(name).unwrap();
            let m = ctx.fd.m_order as i64;
            for k in [1i64, 2] {
                let det = det_f(&ctx, m * k).unwrap();
                let cf = det_closed_form(&ctx, k).unwrap().unwrap();
                assert_eq!(det, cf, "{name} det F({}) vs closed form", m * k);
                let kp = (1..).filter(|x| x % m != 0).nth(k as usize - 1).unwrap();
                let detp = det_f_prime(&ctx, kp).unwrap();
                let cfp = det_prime_closed_form(&ctx, kp).unwrap().unwrap();
                assert_eq!(detp, cfp, "{name} det F'({kp}) vs closed form");
            }
        }
    }

    #[test]
    fn divisibility_preconditions() {
        let ctx = Ctx::twisted("D4^3").unwrap();
        assert!(matches!(det_f(&ctx, 2), Err(RootDataError::BadDivisibility { .. })));
        assert!(matches!(det_f_prime(&ctx, 3), Err(RootDataError::BadDivisibility { .. })));
        assert!(matches!(det_f(&ctx, 0), Err(RootDataError::ZeroK)));
    }

    #[test]
    fn a2n2_invertibility_at_sampled_q() {
        // closed forms exclude A_{2n}^{(2)}; check invertibility numerically
        use num_complex::Complex64;
        for name in ["A2^2", "A4^2"] {
            let (ft, sigma) = parse_type_name(name).unwrap();
            let ctx = Ctx::twisted_from(ft, &sigma).unwrap();
            for k in 1..=4 {
                let v = if k % 2 == 0 { det_f(&ctx, k).unwrap() } else { det_f_prime(&ctx, k).unwrap() };
                assert!(!v.is_zero(), "{name} k={k} determinant vanishes symbolically");
                let num = v.eval_at_q(Complex64::new(1.25, 0.0)).unwrap();
                assert!(num.norm() > 1e-9, "{name} k={k} determinant vanishes at q=5/4");
            }
        }
    }

    #[test]
    fn serre_constant_sanity() {
        // the A2^2 data must reproduce the q^{1/2} and q^2 Serre denominators
        let ctx = Ctx::twisted("A2^2").unwrap();
        assert_eq!(ctx.tc.d[0], Half::halves(1));
        assert_eq!(ctx.tc.d[1], Half::from_int(2));
        assert!(!qfactorial(1, 5, ctx.tc.d[0]).unwrap().is_zero());
    }
}
