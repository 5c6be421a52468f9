//! The quantum adjoint module with its canonical basis `{X_α} ∪ {t_i}` and the
//! matrices of `E_i`, `F_i`, `K_y` and the divided powers in that basis.
//!
//! Basis order: the roots in [`RootSystem`] order, then `t_1, ..., t_n`.
//! Matrices are dense; entry `(r, c)` is the coefficient of basis element `r`
//! in the image of basis element `c`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cartan::Weight;
use crate::qpoly::{q_binomial, q_int, LaurentPoly};
use crate::roots::RootSystem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdjointError {
    #[error("dimension mismatch: operator has dimension {expected}, vector has length {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisElement {
    /// `X_α`, by root index.
    Root(usize),
    /// `t_i`, by node.
    Zero(usize),
}

/// The ordered basis and its weight table.
#[derive(Debug, Clone)]
pub struct Basis {
    elements: Vec<BasisElement>,
    weights: Vec<Weight>,
    labels: Vec<String>,
    n_roots: usize,
}

impl Basis {
    pub fn new(rs: &RootSystem) -> Self {
        let rank = rs.rank();
        let mut elements: Vec<BasisElement> = (0..rs.len()).map(BasisElement::Root).collect();
        elements.extend((0..rank).map(BasisElement::Zero));
        let weights = elements
            .iter()
            .map(|b| match *b {
                BasisElement::Root(n) => rs.root(n).clone(),
                BasisElement::Zero(_) => Weight::zero(rank),
            })
            .collect();
        let labels = elements
            .iter()
            .map(|b| match *b {
                BasisElement::Root(n) => format!("X{}", rs.root(n)),
                BasisElement::Zero(i) => format!("t[{}]", i + 1),
            })
            .collect();
        Self { elements, weights, labels, n_roots: rs.len() }
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn element(&self, idx: usize) -> BasisElement {
        self.elements[idx]
    }

    pub fn weight(&self, idx: usize) -> &Weight {
        &self.weights[idx]
    }

    /// `"X[1,0]"` or `"t[2]"`.
    pub fn label(&self, idx: usize) -> &str {
        &self.labels[idx]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn root_position(&self, root: usize) -> usize {
        root
    }

    pub fn zero_position(&self, node: usize) -> usize {
        self.n_roots + node
    }
}

/// Which generator (or derived operator) a matrix represents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Label {
    E { node: usize },
    F { node: usize },
    K { y: Vec<i64> },
    EDivided { node: usize, k: u32 },
    FDivided { node: usize, k: u32 },
    Identity,
    Derived { description: String },
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::E { node } => write!(f, "E_{}", node + 1),
            Label::F { node } => write!(f, "F_{}", node + 1),
            Label::K { y } => write!(f, "K_{}", Weight(y.clone())),
            Label::EDivided { node, k } => write!(f, "E_{}^({k})", node + 1),
            Label::FDivided { node, k } => write!(f, "F_{}^({k})", node + 1),
            Label::Identity => write!(f, "Id"),
            Label::Derived { description } => f.write_str(description),
        }
    }
}

/// Square matrix over `Z[v, v^-1]` acting on the adjoint module.
#[derive(Clone, PartialEq, Eq)]
pub struct ModuleOperator {
    label: Label,
    dim: usize,
    entries: Vec<LaurentPoly>,
}

impl fmt::Debug for ModuleOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModuleOperator({}, dim {})", self.label, self.dim)
    }
}

impl ModuleOperator {
    pub fn zero(dim: usize, label: Label) -> Self {
        Self { label, dim, entries: vec![LaurentPoly::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zero(dim, Label::Identity);
        for i in 0..dim {
            op.set(i, i, LaurentPoly::one());
        }
        op
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = label;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> &LaurentPoly {
        &self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: LaurentPoly) {
        self.entries[row * self.dim + col] = value;
    }

    /// Rows as vectors of polynomials.
    pub fn rows(&self) -> impl Iterator<Item = &[LaurentPoly]> {
        self.entries.chunks(self.dim)
    }

    /// `(row, col, value)` for every nonzero entry, row-major.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, &LaurentPoly)> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(move |(n, p)| (n / self.dim, n % self.dim, p))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_zero)
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        let n = self.dim;
        let mut out = Self::zero(
            n,
            Label::Derived { description: format!("{}*{}", self.label, rhs.label) },
        );
        for r in 0..n {
            for k in 0..n {
                let a = &self.entries[r * n + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = &rhs.entries[k * n + c];
                    if !b.is_zero() {
                        let slot = &mut out.entries[r * n + c];
                        *slot = &*slot + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.dim);
        for _ in 0..k {
            acc = acc.compose(self);
        }
        acc.with_label(Label::Derived { description: format!("({})^{k}", self.label) })
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a + b, "+")
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a - b, "-")
    }

    fn zip_with(
        &self,
        rhs: &Self,
        f: impl Fn(&LaurentPoly, &LaurentPoly) -> LaurentPoly,
        op: &str,
    ) -> Self {
        assert_eq!(self.dim, rhs.dim, "operator dimensions differ");
        Self {
            label: Label::Derived { description: format!("{} {op} {}", self.label, rhs.label) },
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: &LaurentPoly) -> Self {
        Self {
            label: Label::Derived { description: format!("({c})*{}", self.label) },
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, vec: &[LaurentPoly]) -> Result<Vec<LaurentPoly>, AdjointError> {
        if vec.len() != self.dim {
            return Err(AdjointError::DimensionMismatch { expected: self.dim, got: vec.len() });
        }
        Ok(self
            .rows()
            .map(|row| {
                row.iter()
                    .zip(vec)
                    .filter(|(a, x)| !a.is_zero() && !x.is_zero())
                    .fold(LaurentPoly::zero(), |acc, (a, x)| acc + a * x)
            })
            .collect())
    }

    /// Image of a single basis element, as `(row, coefficient)` pairs.
    pub fn column(&self, col: usize) -> Vec<(usize, &LaurentPoly)> {
        (0..self.dim)
            .map(|r| (r, self.entry(r, col)))
            .filter(|(_, p)| !p.is_zero())
            .collect()
    }

    /// First entry where the two operators differ, row-major.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        self.entries
            .iter()
            .zip(&other.entries)
            .position(|(a, b)| a != b)
            .map(|n| (n / self.dim, n % self.dim))
    }
}

/// `E_i`: the four action lines on `X_α` and `t_j`.
pub fn build_e(rs: &RootSystem, i: usize) -> ModuleOperator {
    build_raising(rs, i, 1, Direction::Up)
}

/// `F_i`, mirror of [`build_e`].
pub fn build_f(rs: &RootSystem, i: usize) -> ModuleOperator {
    build_raising(rs, i, 1, Direction::Down)
}

/// `E_i^{(k)}` from the closed formula with Gaussian binomial coefficients.
pub fn build_e_divided(rs: &RootSystem, i: usize, k: u32) -> ModuleOperator {
    assert!(k >= 1, "divided power order must be positive");
    build_raising(rs, i, k, Direction::Up)
}

/// `F_i^{(k)}` from the closed formula.
pub fn build_f_divided(rs: &RootSystem, i: usize, k: u32) -> ModuleOperator {
    assert!(k >= 1, "divided power order must be positive");
    build_raising(rs, i, k, Direction::Down)
}

/// `K_y`: diagonal with `v^{<y, λ>}` on the weight-`λ` basis element.
pub fn build_k(rs: &RootSystem, y: &[i64]) -> ModuleOperator {
    let basis = Basis::new(rs);
    let d = rs.datum();
    let mut op = ModuleOperator::zero(basis.dim(), Label::K { y: y.to_vec() });
    for b in 0..basis.dim() {
        let exp = d.pairing_y(y, basis.weight(b));
        op.set(b, b, LaurentPoly::v_pow(exp as i32));
    }
    op
}

/// `K_i^{s}`, i.e. `K_y` with `y = s·i`.
pub fn build_k_node(rs: &RootSystem, i: usize, s: i64) -> ModuleOperator {
    let mut y = vec![0; rs.rank()];
    y[i] = s;
    build_k(rs, &y)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Up,
    Down,
}

fn build_raising(rs: &RootSystem, i: usize, k: u32, dir: Direction) -> ModuleOperator {
    let basis = Basis::new(rs);
    let d = rs.datum();
    let di = d.v_exponent(i);
    let label = match (dir, k) {
        (Direction::Up, 1) => Label::E { node: i },
        (Direction::Down, 1) => Label::F { node: i },
        (Direction::Up, k) => Label::EDivided { node: i, k },
        (Direction::Down, k) => Label::FDivided { node: i, k },
    };
    let mut op = ModuleOperator::zero(basis.dim(), label);
    let plus = rs.simple_index(i);
    let minus = rs.negation(plus);
    // `from` is the simple root the string through zero starts at, `to` where it ends.
    let (from, to, sign) = match dir {
        Direction::Up => (minus, plus, 1i64),
        Direction::Down => (plus, minus, -1i64),
    };
    let t_i = basis.zero_position(i);

    for n in 0..rs.len() {
        let col = basis.root_position(n);
        if n == from {
            match k {
                1 => op.set(t_i, col, LaurentPoly::one()),
                2 => op.set(basis.root_position(to), col, LaurentPoly::one()),
                _ => {}
            }
            continue;
        }
        // Upward the relevant arms are (room to move, distance already travelled) = (p, q).
        let (room, travelled) = match dir {
            Direction::Up => (rs.p(i, n), rs.q(i, n)),
            Direction::Down => (rs.q(i, n), rs.p(i, n)),
        };
        if k <= room {
            let target = rs.shifted(n, i, sign * k as i64).expect("string stays inside R");
            let coeff = q_binomial(travelled + k, k, di).expect("Gaussian binomials are exact");
            op.set(basis.root_position(target), col, coeff);
        }
    }
    if k == 1 {
        let target = basis.root_position(to);
        for j in d.nodes() {
            let coeff = q_int(d.cartan_entry(j, i).abs(), d.v_exponent(j));
            op.set(target, basis.zero_position(j), coeff);
        }
    }
    op
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::CartanDatum;
    use crate::qpoly::q_factorial;

    fn rs(name: &str) -> RootSystem {
        RootSystem::generate(CartanDatum::from_name(name).unwrap()).unwrap()
    }

    fn unit(dim: usize, idx: usize) -> Vec<LaurentPoly> {
        let mut v = vec![LaurentPoly::zero(); dim];
        v[idx] = LaurentPoly::one();
        v
    }

    fn root_pos(r: &RootSystem, coords: &[i64]) -> usize {
        r.index_of(&Weight(coords.to_vec())).unwrap()
    }

    #[test]
    fn dimensions() {
        for (name, dim) in [("A2", 8), ("G2", 14), ("B2", 10), ("E8", 248)] {
            assert_eq!(Basis::new(&rs(name)).dim(), dim);
        }
    }

    #[test]
    fn weight_table() {
        let r = rs("C3");
        let basis = Basis::new(&r);
        for n in 0..r.len() {
            assert_eq!(basis.weight(basis.root_position(n)), r.root(n));
        }
        for i in 0..3 {
            assert!(basis.weight(basis.zero_position(i)).is_zero());
        }
        assert_eq!(basis.label(basis.zero_position(1)), "t[2]");
    }

    #[test]
    fn a2_generator_lines() {
        let r = rs("A2");
        let basis = Basis::new(&r);
        let e1 = build_e(&r, 0);
        let f1 = build_f(&r, 0);
        let x2 = root_pos(&r, &[0, 1]);
        let x12 = root_pos(&r, &[1, 1]);
        assert_eq!(e1.entry(x12, x2), &LaurentPoly::one());
        assert_eq!(e1.column(x2).len(), 1);
        assert_eq!(f1.entry(x2, x12), &LaurentPoly::one());
        // E_1 t_2 = [1] X_1, E_1 t_1 = [2] X_1
        let x1 = root_pos(&r, &[1, 0]);
        assert_eq!(e1.entry(x1, basis.zero_position(1)), &LaurentPoly::one());
        assert_eq!(e1.entry(x1, basis.zero_position(0)), &q_int(2, 1));
    }

    #[test]
    fn special_lines_through_zero_weight() {
        for name in ["A1", "B2", "G2", "F4"] {
            let r = rs(name);
            let basis = Basis::new(&r);
            let dim = basis.dim();
            let d = r.datum();
            for i in d.nodes() {
                let plus = r.simple_index(i);
                let minus = r.negation(plus);
                let t_i = basis.zero_position(i);
                let e = build_e(&r, i);
                let f = build_f(&r, i);
                assert_eq!(e.apply(&unit(dim, minus)).unwrap(), unit(dim, t_i));
                assert_eq!(f.apply(&unit(dim, plus)).unwrap(), unit(dim, t_i));
                assert_eq!(e.entry(plus, t_i), &q_int(2, d.v_exponent(i)));
                for j in d.nodes() {
                    let expected = q_int(d.cartan_entry(j, i).abs(), d.v_exponent(j));
                    assert_eq!(f.entry(minus, basis.zero_position(j)), &expected);
                    assert_eq!(f.column(basis.zero_position(j)).len(), usize::from(!expected.is_zero()));
                }
                let e2 = build_e_divided(&r, i, 2);
                let e3 = build_e_divided(&r, i, 3);
                let f2 = build_f_divided(&r, i, 2);
                assert_eq!(e2.apply(&unit(dim, minus)).unwrap(), unit(dim, plus));
                assert!(e3.column(minus).is_empty());
                assert_eq!(f2.apply(&unit(dim, plus)).unwrap(), unit(dim, minus));
                for j in d.nodes() {
                    assert!(e2.column(basis.zero_position(j)).is_empty());
                    assert!(f2.column(basis.zero_position(j)).is_empty());
                }
                assert_eq!(build_f_divided(&r, i, 1), f);
            }
        }
    }

    #[test]
    fn g2_divided_square_on_long_simple_root() {
        let r = rs("G2");
        let e2 = build_e_divided(&r, 0, 2);
        let x = root_pos(&r, &[0, 1]);
        let target = root_pos(&r, &[2, 1]);
        assert_eq!(e2.entry(target, x), &LaurentPoly::one());
        let e = build_e(&r, 0);
        // [q+1] with q = 1 at 1'+2'
        assert_eq!(e.entry(target, root_pos(&r, &[1, 1])), &q_int(2, 1));
    }

    #[test]
    fn k_operators() {
        let g2 = rs("G2");
        let basis = Basis::new(&g2);
        let k1 = build_k_node(&g2, 0, 1);
        let x2 = root_pos(&g2, &[0, 1]);
        assert_eq!(k1.entry(x2, x2), &LaurentPoly::v_pow(-3));
        let x1 = root_pos(&g2, &[1, 0]);
        assert_eq!(k1.entry(x1, x1), &LaurentPoly::v_pow(2));
        let t2 = basis.zero_position(1);
        assert!(build_k(&g2, &[3, -5]).entry(t2, t2).is_one());
        let k0 = build_k(&g2, &[0, 0]);
        assert_eq!(k0, ModuleOperator::identity(14).with_label(Label::K { y: vec![0, 0] }));
    }

    #[test]
    fn apply_checks_dimensions() {
        let r = rs("A2");
        let e = build_e(&r, 0);
        assert_eq!(
            e.apply(&[LaurentPoly::one()]),
            Err(AdjointError::DimensionMismatch { expected: 8, got: 1 })
        );
        let zero = vec![LaurentPoly::zero(); 8];
        assert_eq!(e.apply(&zero).unwrap(), zero);
        let k0 = build_k(&r, &[0, 0]);
        assert_eq!(k0.apply(&unit(8, 3)).unwrap(), unit(8, 3));
    }

    #[test]
    fn weight_shift_and_nilpotency() {
        for name in ["A3", "B3", "C3", "G2", "F4"] {
            let r = rs(name);
            let basis = Basis::new(&r);
            let e_exp = r.datum().e();
            for i in r.datum().nodes() {
                let e = build_e(&r, i);
                let f = build_f(&r, i);
                for (row, col, _) in e.nonzero_entries() {
                    assert_eq!(basis.weight(row), &basis.weight(col).add_simple(i, 1));
                }
                for (row, col, _) in f.nonzero_entries() {
                    assert_eq!(basis.weight(row), &basis.weight(col).add_simple(i, -1));
                }
                assert!(e.pow(e_exp + 2).is_zero(), "{name}");
                assert!(f.pow(e_exp + 2).is_zero(), "{name}");
            }
        }
    }

    #[test]
    fn divided_powers_match_scaled_powers() {
        for name in ["A2", "B2", "G2"] {
            let r = rs(name);
            for i in r.datum().nodes() {
                let di = r.datum().v_exponent(i);
                for k in 1..=4 {
                    let fact = q_factorial(k, di).unwrap();
                    assert_eq!(
                        build_e_divided(&r, i, k).scale(&fact).entries,
                        build_e(&r, i).pow(k).entries
                    );
                    assert_eq!(
                        build_f_divided(&r, i, k).scale(&fact).entries,
                        build_f(&r, i).pow(k).entries
                    );
                }
            }
        }
    }
}
