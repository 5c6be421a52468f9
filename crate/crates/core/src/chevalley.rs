//! Chevalley groups of adjoint type over prime fields.
//!
//! At `v = 1` the generators `E_i`, `F_i` become nilpotent integer matrices
//! `e_i`, `f_i`, and `x_i(z) = exp(z e_i)`, `y_i(z) = exp(z f_i)` have
//! integer closed forms in `z`. Reducing those mod `p` gives the generators
//! of the group over `F_p`, whose order is found by breadth-first closure.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::adjoint::{Basis, ModuleOperator};
use crate::cartan::{CartanType, Family};
use crate::roots::RootSystem;

/// Default bound on the number of group elements enumerated.
pub const DEFAULT_CAP: u64 = 20_000_000;

/// Largest modulus for the exhaustive one-parameter check.
pub const ONE_PARAM_MAX_P: u32 = 101;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChevalleyError {
    #[error("{0} is not a prime in [2, 2^31)")]
    InvalidModulus(u64),
    #[error("one-parameter check is exhaustive and needs p <= {ONE_PARAM_MAX_P}, got {0}")]
    ModulusTooLarge(u32),
    #[error("generators must be nonempty and share dimension and modulus")]
    MismatchedGenerators,
    #[error("group order formula overflows for {0} over F_{1}")]
    Overflow(CartanType, u64),
}

/// The prime field `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, ChevalleyError> {
        if !(2..1 << 31).contains(&p) || !is_prime(p) {
            return Err(ChevalleyError::InvalidModulus(p));
        }
        Ok(Self { p: p as u32 })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 { 0 } else { self.p - a }
    }

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        (!a.is_multiple_of(self.p)).then(|| self.pow(a, self.p as u64 - 2))
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Square matrix of residues mod `p`, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: PrimeField,
    dim: usize,
    data: Vec<u32>,
}

impl FieldMatrix {
    pub fn zero(field: PrimeField, dim: usize) -> Self {
        Self { field, dim, data: vec![0; dim * dim] }
    }

    pub fn identity(field: PrimeField, dim: usize) -> Self {
        let mut m = Self::zero(field, dim);
        for k in 0..dim {
            m.data[k * dim + k] = 1 % field.p;
        }
        m
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> u32 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u32) {
        self.data[row * self.dim + col] = value % self.field.p;
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.field, self.dim)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!((self.dim, self.field), (rhs.dim, rhs.field), "matrix shape or modulus mismatch");
        let n = self.dim;
        let p = self.field.p as u128;
        let mut out = Self::zero(self.field, n);
        for r in 0..n {
            for c in 0..n {
                let acc: u128 = (0..n)
                    .map(|k| self.data[r * n + k] as u128 * rhs.data[k * n + c] as u128)
                    .sum();
                out.data[r * n + c] = (acc % p) as u32;
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a = self.field.add(*a, self.field.neg(*b));
        }
        out
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut acc = Self::identity(self.field, self.dim);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.dim;
        let f = self.field;
        let mut a = self.clone();
        let mut inv = Self::identity(f, n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.entry(r, col) != 0)?;
            if pivot != col {
                for c in 0..n {
                    a.data.swap(pivot * n + c, col * n + c);
                    inv.data.swap(pivot * n + c, col * n + c);
                }
            }
            let s = f.inv(a.entry(col, col))?;
            for c in 0..n {
                a.data[col * n + c] = f.mul(a.data[col * n + c], s);
                inv.data[col * n + c] = f.mul(inv.data[col * n + c], s);
            }
            for r in (0..n).filter(|&r| r != col) {
                let factor = a.entry(r, col);
                if factor == 0 {
                    continue;
                }
                let m = f.neg(factor);
                for c in 0..n {
                    a.data[r * n + c] = f.add(a.data[r * n + c], f.mul(m, a.data[col * n + c]));
                    inv.data[r * n + c] = f.add(inv.data[r * n + c], f.mul(m, inv.data[col * n + c]));
                }
            }
        }
        Some(inv)
    }

    /// `(M - I)^4 = 0`.
    pub fn is_unipotent(&self) -> bool {
        let n = self.sub(&Self::identity(self.field, self.dim));
        n.pow(4).data.iter().all(|&x| x == 0)
    }

    /// Canonical key: residues row-major, one byte each when `p <= 256`,
    /// otherwise four little-endian bytes.
    pub fn key(&self) -> Vec<u8> {
        if self.field.p <= 256 {
            self.data.iter().map(|&x| x as u8).collect()
        } else {
            self.data.iter().flat_map(|x| x.to_le_bytes()).collect()
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.data.chunks(self.dim)
    }
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FieldMatrix mod {}:", self.field.p)?;
        for row in self.rows() {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

/// Square integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    dim: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zero(dim: usize) -> Self {
        Self { dim, data: vec![0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for k in 0..dim {
            m.data[k * dim + k] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Self { dim, data: rows.into_iter().flatten().collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: i64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> {
        self.data.chunks(self.dim)
    }

    pub fn reduce(&self, field: PrimeField) -> FieldMatrix {
        FieldMatrix { field, dim: self.dim, data: self.data.iter().map(|&x| field.reduce(x)).collect() }
    }
}

/// Entrywise evaluation at `v = 1`.
pub fn specialize(op: &ModuleOperator) -> IntMatrix {
    let dim = op.dim();
    let mut m = IntMatrix::zero(dim);
    for (r, c, p) in op.nonzero_entries() {
        m.set(r, c, p.eval_at_one().expect("generator entries are small"));
    }
    m
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, j| acc * (n - j) as i64 / (j + 1) as i64)
}

/// Integer coefficient matrices `A_0..A_3` with `x_i(z) = Σ z^k A_k`
/// (`raise = true`) or `y_i(z) = Σ z^k A_k` (`raise = false`), read off the
/// closed formulas: root columns carry `C(q+k, k)` (resp. `C(p+k, k)`), the
/// column of `∓i'` is `X_{∓i'} + z t_i + z^2 X_{±i'}`, and the column of
/// `t_j` is `t_j + |<j,i'>| z X_{±i'}`.
pub fn exp_terms(rs: &RootSystem, i: usize, raise: bool) -> [IntMatrix; 4] {
    let basis = Basis::new(rs);
    let dim = basis.dim();
    let d = rs.datum();
    let mut terms: [IntMatrix; 4] = std::array::from_fn(|_| IntMatrix::zero(dim));
    let sign: i64 = if raise { 1 } else { -1 };
    let simple = rs.simple_index(i);
    let (target, source) = if raise {
        (simple, rs.negation(simple))
    } else {
        (rs.negation(simple), simple)
    };
    for col in 0..rs.len() {
        let c = basis.root_position(col);
        if col == source {
            terms[0].set(c, c, 1);
            terms[1].set(basis.zero_position(i), c, 1);
            terms[2].set(basis.root_position(target), c, 1);
            continue;
        }
        let (ahead, behind) = if raise { (rs.p(i, col), rs.q(i, col)) } else { (rs.q(i, col), rs.p(i, col)) };
        for k in 0..=ahead {
            let row = rs.shifted(col, i, sign * k as i64).expect("string stays in R");
            terms[k as usize].set(basis.root_position(row), c, binomial(behind + k, k));
        }
    }
    for j in d.nodes() {
        let c = basis.zero_position(j);
        terms[0].set(c, c, 1);
        terms[1].set(basis.root_position(target), c, d.cartan_entry(j, i).abs());
    }
    terms
}

fn evaluate(terms: &[IntMatrix; 4], z: u32, field: PrimeField) -> FieldMatrix {
    let dim = terms[0].dim();
    let mut m = FieldMatrix::zero(field, dim);
    for (k, a) in terms.iter().enumerate() {
        let zk = field.pow(z, k as u64);
        for (n, &x) in a.data.iter().enumerate() {
            if x != 0 {
                m.data[n] = field.add(m.data[n], field.mul(field.reduce(x), zk));
            }
        }
    }
    m
}

/// `x_i(z)` over `F_p`.
pub fn x_gen(rs: &RootSystem, i: usize, z: u32, field: PrimeField) -> FieldMatrix {
    evaluate(&exp_terms(rs, i, true), z % field.p(), field)
}

/// `y_i(z)` over `F_p`.
pub fn y_gen(rs: &RootSystem, i: usize, z: u32, field: PrimeField) -> FieldMatrix {
    evaluate(&exp_terms(rs, i, false), z % field.p(), field)
}

/// `x_i(1)` and `y_i(1)` for every node. Over `F_p` every `x_i(z)` is a
/// power of `x_i(1)`, so these generate the whole group.
pub fn generators(rs: &RootSystem, field: PrimeField) -> Vec<FieldMatrix> {
    let nodes = rs.datum().nodes();
    nodes
        .clone()
        .map(|i| x_gen(rs, i, 1, field))
        .chain(nodes.map(|i| y_gen(rs, i, 1, field)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OneParamFailure {
    pub generator: String,
    pub z: u32,
    pub z_prime: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OneParamReport {
    pub node: usize,
    pub p: u32,
    pub pairs_checked: u64,
    pub failures: Vec<OneParamFailure>,
}

impl OneParamReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `g(z) g(z') = g(z + z')` over all `z, z'` for one family `g`.
/// Returns the failing pairs.
pub fn check_homomorphism(
    field: PrimeField,
    name: &str,
    family: impl Fn(u32) -> FieldMatrix,
) -> (u64, Vec<OneParamFailure>) {
    let p = field.p();
    let table: Vec<FieldMatrix> = (0..p).map(family).collect();
    let mut failures = Vec::new();
    let mut checked = 0;
    for z in 0..p {
        for w in 0..p {
            checked += 1;
            if table[z as usize].mul(&table[w as usize]) != table[field.add(z, w) as usize] {
                failures.push(OneParamFailure { generator: name.to_string(), z, z_prime: w });
            }
        }
    }
    (checked, failures)
}

/// `x_i(z) x_i(z') = x_i(z+z')` and the same for `y_i`, exhaustively.
pub fn one_param_check(rs: &RootSystem, i: usize, field: PrimeField) -> Result<OneParamReport, ChevalleyError> {
    if field.p() > ONE_PARAM_MAX_P {
        return Err(ChevalleyError::ModulusTooLarge(field.p()));
    }
    let (x_checked, mut failures) =
        check_homomorphism(field, &format!("x_{}", i + 1), |z| x_gen(rs, i, z, field));
    let (y_checked, y_failures) =
        check_homomorphism(field, &format!("y_{}", i + 1), |z| y_gen(rs, i, z, field));
    failures.extend(y_failures);
    Ok(OneParamReport { node: i + 1, p: field.p(), pairs_checked: x_checked + y_checked, failures })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    Order(u64),
    Exceeded { cap: u64 },
}

/// Column-sparse form of a generator: for each column, its nonzero rows.
struct Sparse(Vec<Vec<(usize, u64)>>);

impl Sparse {
    fn new(m: &FieldMatrix) -> Self {
        let n = m.dim();
        Sparse(
            (0..n)
                .map(|c| (0..n).filter(|&r| m.entry(r, c) != 0).map(|r| (r, m.entry(r, c) as u64)).collect())
                .collect(),
        )
    }

    /// `m * self`.
    fn right_mul(&self, m: &FieldMatrix) -> FieldMatrix {
        let n = m.dim;
        let p = m.field.p as u128;
        let mut out = FieldMatrix::zero(m.field, n);
        for r in 0..n {
            let row = &m.data[r * n..(r + 1) * n];
            for (c, col) in self.0.iter().enumerate() {
                let acc: u128 = col.iter().map(|&(k, g)| row[k] as u128 * g as u128).sum();
                out.data[r * n + c] = (acc % p) as u32;
            }
        }
        out
    }
}

/// Order of the group generated by `gens`, by breadth-first search from the
/// identity under right multiplication by the generators and their inverses.
/// Stops with [`Closure::Exceeded`] once more than `cap` elements are seen.
pub fn group_closure(gens: &[FieldMatrix], cap: u64) -> Result<Closure, ChevalleyError> {
    let first = gens.first().ok_or(ChevalleyError::MismatchedGenerators)?;
    let (field, dim) = (first.field(), first.dim());
    if gens.iter().any(|g| g.field() != field || g.dim() != dim) {
        return Err(ChevalleyError::MismatchedGenerators);
    }
    let mut steps: Vec<Sparse> = Vec::with_capacity(2 * gens.len());
    for g in gens {
        steps.push(Sparse::new(g));
        let inv = g.inverse().ok_or(ChevalleyError::MismatchedGenerators)?;
        steps.push(Sparse::new(&inv));
    }
    let start = FieldMatrix::identity(field, dim);
    let mut seen: HashSet<Vec<u8>> = HashSet::from([start.key()]);
    let mut queue = VecDeque::from([start]);
    while let Some(m) = queue.pop_front() {
        for step in &steps {
            let next = step.right_mul(&m);
            if seen.insert(next.key()) {
                if seen.len() as u64 > cap {
                    return Ok(Closure::Exceeded { cap });
                }
                queue.push_back(next);
            }
        }
    }
    Ok(Closure::Order(seen.len() as u64))
}

/// Degrees of the basic invariants of the Weyl group.
pub fn invariant_degrees(ty: CartanType) -> Vec<u32> {
    let n = ty.rank as u32;
    match ty.family {
        Family::A => (2..=n + 1).collect(),
        Family::B | Family::C => (1..=n).map(|k| 2 * k).collect(),
        Family::D => (1..n).map(|k| 2 * k).chain([n]).collect(),
        Family::E => match n {
            6 => vec![2, 5, 6, 8, 9, 12],
            7 => vec![2, 6, 8, 10, 12, 14, 18],
            _ => vec![2, 8, 12, 14, 18, 20, 24, 30],
        },
        Family::F => vec![2, 6, 8, 12],
        Family::G => vec![2, 6],
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Order of the adjoint Chevalley group of type `ty` over `F_q`:
/// `q^N ∏ (q^{d_i} - 1) / d`, with `N` the number of positive roots,
/// `d_i` the invariant degrees and `d` the order of the center of the simply
/// connected group over `F_q`. Standard formulas, used only as a cross-check.
pub fn classical_order(ty: CartanType, q: u64) -> Result<u128, ChevalleyError> {
    let overflow = || ChevalleyError::Overflow(ty, q);
    let q = q as u128;
    let degrees = invariant_degrees(ty);
    let positive: u32 = degrees.iter().map(|d| d - 1).sum();
    let qpow = |k: u32| q.checked_pow(k).ok_or_else(overflow);
    let mut order = qpow(positive)?;
    for &d in &degrees {
        order = order.checked_mul(qpow(d)? - 1).ok_or_else(overflow)?;
    }
    let n = ty.rank as u128;
    let center = match ty.family {
        Family::A => gcd(n + 1, q - 1),
        Family::B | Family::C => gcd(2, q - 1),
        Family::D => gcd(4, qpow(ty.rank as u32)? - 1),
        Family::E if n == 6 => gcd(3, q - 1),
        Family::E if n == 7 => gcd(2, q - 1),
        Family::E | Family::F | Family::G => 1,
    };
    Ok(order / center)
}
