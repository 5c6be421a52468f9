//! Finite-type irreducible Cartan data.
//!
//! A datum is a symmetric integer matrix `i·j` over the node set. Nodes are
//! indexed from 0 internally and printed from 1. Preset types use the Bourbaki
//! numbering:
//!
//! * `A_n`: chain `1 - 2 - ... - n`.
//! * `B_n`: chain, nodes `1..n-1` long, node `n` short.
//! * `C_n`: chain, nodes `1..n-1` short, node `n` long.
//! * `D_n`: chain `1 - ... - (n-2)`, with `n-1` and `n` both attached to `n-2`.
//! * `E_n`: chain `1 - 3 - 4 - ... - n`, with `2` attached to `4`.
//! * `F_4`: chain, nodes `1, 2` long, nodes `3, 4` short.
//! * `G_2`: node `1` short, node `2` long.
//!
//! Short nodes always have `i·i = 2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub fn from_letter(letter: char) -> Option<Self> {
        Some(match letter.to_ascii_uppercase() {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            _ => return None,
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A preset Cartan type such as `G2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CartanType {
    pub family: Family,
    pub rank: usize,
}

impl CartanType {
    pub fn new(family: Family, rank: usize) -> Result<Self, CartanError> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(Self { family, rank })
        } else {
            Err(CartanError::UnknownPreset { family: family.to_string(), rank })
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

impl FromStr for CartanType {
    type Err = CartanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CartanError::BadPresetName(s.to_string());
        let mut chars = s.trim().chars();
        let family = chars.next().and_then(Family::from_letter).ok_or_else(bad)?;
        let rank: usize = chars.as_str().parse().map_err(|_| bad())?;
        Self::new(family, rank)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CartanError {
    #[error("no preset Cartan type {family}{rank}")]
    UnknownPreset { family: String, rank: usize },
    #[error("cannot parse preset name {0:?} (expected e.g. \"A2\", \"G2\")")]
    BadPresetName(String),
    #[error("invalid Cartan datum: {0}")]
    Invalid(ValidationReport),
}

/// One violated axiom of a finite-type irreducible Cartan datum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Violation {
    Empty,
    NotSquare { row: usize, len: usize, expected: usize },
    NotSymmetric { i: usize, j: usize },
    DiagonalNotPositiveEven { i: usize, value: i64 },
    LengthRatioAboveThree { i: usize, half_norm: i64 },
    NoUnitNode,
    NonIntegralOrPositivePairing { i: usize, j: usize },
    NotPositiveDefinite { order: usize, minor: i128 },
    Reducible { components: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "empty matrix"),
            Violation::NotSquare { row, len, expected } => {
                write!(f, "row {} has length {len}, expected {expected}", row + 1)
            }
            Violation::NotSymmetric { i, j } => {
                write!(f, "entries ({}, {}) and ({}, {}) differ", i + 1, j + 1, j + 1, i + 1)
            }
            Violation::DiagonalNotPositiveEven { i, value } => {
                write!(f, "i·i = {value} at node {} is not a positive even integer", i + 1)
            }
            Violation::LengthRatioAboveThree { i, half_norm } => {
                write!(f, "i·i/2 = {half_norm} at node {} exceeds 3", i + 1)
            }
            Violation::NoUnitNode => write!(f, "no node has i·i/2 = 1"),
            Violation::NonIntegralOrPositivePairing { i, j } => write!(
                f,
                "2(i·j)/(i·i) for i={}, j={} is not a nonpositive integer",
                i + 1,
                j + 1
            ),
            Violation::NotPositiveDefinite { order, minor } => {
                write!(f, "leading principal minor of order {order} is {minor}, not positive")
            }
            Violation::Reducible { components } => {
                write!(f, "Dynkin graph has {components} connected components (not irreducible)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, v) in self.violations.iter().enumerate() {
            if n > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// Element of the root lattice in simple-root coordinates: `Σ n_i i'`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    /// The simple root `i'`.
    pub fn simple(rank: usize, i: usize) -> Self {
        let mut coords = vec![0; rank];
        coords[i] = 1;
        Weight(coords)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Sum of coordinates; the height for positive roots.
    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }

    /// `self + k * i'`
    pub fn add_simple(&self, i: usize, k: i64) -> Weight {
        let mut out = self.clone();
        out.0[i] += k;
        out
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (n, c) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanDatum {
    name: String,
    preset: Option<CartanType>,
    dot: Vec<Vec<i64>>,
    cartan: Vec<Vec<i64>>,
    e: u32,
    short_nodes: Vec<usize>,
    long_nodes: Vec<usize>,
}

impl CartanDatum {
    pub fn preset(ty: CartanType) -> Self {
        let dot = preset_dot(ty);
        let mut datum = validate(&dot).expect("preset tables satisfy every axiom");
        datum.name = ty.to_string();
        datum.preset = Some(ty);
        datum
    }

    pub fn make_preset(family: Family, rank: usize) -> Result<Self, CartanError> {
        Ok(Self::preset(CartanType::new(family, rank)?))
    }

    /// Preset by name, e.g. `"E6"`.
    pub fn from_name(name: &str) -> Result<Self, CartanError> {
        Ok(Self::preset(name.parse()?))
    }

    /// A display name: the preset name, or `"custom"`.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn preset_type(&self) -> Option<CartanType> {
        self.preset
    }

    pub fn rank(&self) -> usize {
        self.dot.len()
    }

    pub fn nodes(&self) -> std::ops::Range<usize> {
        0..self.rank()
    }

    pub fn dot(&self) -> &[Vec<i64>] {
        &self.dot
    }

    pub fn dot_entry(&self, i: usize, j: usize) -> i64 {
        self.dot[i][j]
    }

    /// `e = max i·i/2`.
    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn short_nodes(&self) -> &[usize] {
        &self.short_nodes
    }

    pub fn long_nodes(&self) -> &[usize] {
        &self.long_nodes
    }

    pub fn is_short(&self, i: usize) -> bool {
        self.v_exponent(i) == 1
    }

    pub fn is_long(&self, i: usize) -> bool {
        self.v_exponent(i) == self.e
    }

    /// `i·i/2`, so that `v_i = v^{i·i/2}`.
    pub fn v_exponent(&self, i: usize) -> u32 {
        (self.dot[i][i] / 2) as u32
    }

    /// `<i, j'> = 2 (i·j)/(i·i)`.
    pub fn cartan_entry(&self, i: usize, j: usize) -> i64 {
        self.cartan[i][j]
    }

    /// `<i, λ>` for `λ` in simple-root coordinates.
    pub fn pairing(&self, i: usize, lambda: &Weight) -> i64 {
        self.cartan[i].iter().zip(lambda.coords()).map(|(a, n)| a * n).sum()
    }

    /// `<y, λ> = Σ y_i <i, λ>` for `y` in `Z[I]`.
    pub fn pairing_y(&self, y: &[i64], lambda: &Weight) -> i64 {
        y.iter().enumerate().map(|(i, &yi)| yi * self.pairing(i, lambda)).sum()
    }

    /// The symmetric form extended bilinearly to the root lattice.
    pub fn form(&self, a: &Weight, b: &Weight) -> i64 {
        let mut total = 0;
        for (i, &ai) in a.coords().iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.coords().iter().enumerate() {
                total += ai * bj * self.dot[i][j];
            }
        }
        total
    }

    /// The simple reflection `s_i(λ) = λ - <i, λ> i'`.
    pub fn reflect(&self, i: usize, lambda: &Weight) -> Weight {
        lambda.add_simple(i, -self.pairing(i, lambda))
    }
}

fn preset_dot(ty: CartanType) -> Vec<Vec<i64>> {
    let n = ty.rank;
    let mut dot = vec![vec![0i64; n]; n];
    let mut half_norm = vec![1i64; n];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let chain = |len: usize, edges: &mut Vec<(usize, usize)>| {
        for k in 1..len {
            edges.push((k - 1, k));
        }
    };
    match ty.family {
        Family::A => chain(n, &mut edges),
        Family::B => {
            chain(n, &mut edges);
            half_norm[..n - 1].fill(2);
        }
        Family::C => {
            chain(n, &mut edges);
            half_norm[n - 1] = 2;
        }
        Family::D => {
            chain(n - 1, &mut edges);
            edges.push((n - 3, n - 1));
        }
        Family::E => {
            edges.push((0, 2));
            edges.push((1, 3));
            for k in 3..n {
                edges.push((k - 1, k));
            }
        }
        Family::F => {
            chain(4, &mut edges);
            half_norm[0] = 2;
            half_norm[1] = 2;
        }
        Family::G => {
            edges.push((0, 1));
            half_norm[1] = 3;
        }
    }
    for i in 0..n {
        dot[i][i] = 2 * half_norm[i];
    }
    // i·j = -max(i·i, j·j)/2 makes the longer node's Cartan entry -1.
    for (a, b) in edges {
        let value = -half_norm[a].max(half_norm[b]);
        dot[a][b] = value;
        dot[b][a] = value;
    }
    dot
}

/// Checks every axiom of an irreducible finite-type Cartan datum and
/// reports all violations at once.
pub fn validate(raw: &[Vec<i64>]) -> Result<CartanDatum, ValidationReport> {
    let mut violations = Vec::new();
    let n = raw.len();
    if n == 0 {
        violations.push(Violation::Empty);
        return Err(ValidationReport { violations });
    }
    for (row, r) in raw.iter().enumerate() {
        if r.len() != n {
            violations.push(Violation::NotSquare { row, len: r.len(), expected: n });
        }
    }
    if !violations.is_empty() {
        return Err(ValidationReport { violations });
    }

    for i in 0..n {
        for j in i + 1..n {
            if raw[i][j] != raw[j][i] {
                violations.push(Violation::NotSymmetric { i, j });
            }
        }
    }
    let mut diagonal_ok = true;
    for (i, row) in raw.iter().enumerate() {
        let d = row[i];
        if d <= 0 || d % 2 != 0 {
            violations.push(Violation::DiagonalNotPositiveEven { i, value: d });
            diagonal_ok = false;
        } else if d / 2 > 3 {
            violations.push(Violation::LengthRatioAboveThree { i, half_norm: d / 2 });
        }
    }
    if !raw.iter().enumerate().any(|(i, r)| r[i] == 2) {
        violations.push(Violation::NoUnitNode);
    }
    let mut cartan = vec![vec![0i64; n]; n];
    if diagonal_ok {
        for i in 0..n {
            for j in 0..n {
                let num = 2 * raw[i][j];
                let den = raw[i][i];
                if num % den != 0 || (i != j && num > 0) {
                    violations.push(Violation::NonIntegralOrPositivePairing { i, j });
                } else {
                    cartan[i][j] = num / den;
                }
            }
        }
    }
    for order in 1..=n {
        let minor = leading_minor(raw, order);
        if minor <= 0 {
            violations.push(Violation::NotPositiveDefinite { order, minor });
        }
    }
    let components = count_components(raw);
    if components != 1 {
        violations.push(Violation::Reducible { components });
    }
    if !violations.is_empty() {
        return Err(ValidationReport { violations });
    }

    let half: Vec<u32> = (0..n).map(|i| (raw[i][i] / 2) as u32).collect();
    let e = *half.iter().max().unwrap();
    let short_nodes = (0..n).filter(|&i| half[i] == 1).collect();
    let long_nodes = (0..n).filter(|&i| half[i] == e).collect();
    Ok(CartanDatum {
        name: "custom".to_string(),
        preset: None,
        dot: raw.to_vec(),
        cartan,
        e,
        short_nodes,
        long_nodes,
    })
}

/// Exact determinant of the leading `order x order` block (Bareiss, with row pivoting).
fn leading_minor(raw: &[Vec<i64>], order: usize) -> i128 {
    let mut m: Vec<Vec<i128>> =
        raw[..order].iter().map(|r| r[..order].iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..order {
        let Some(pivot) = (k..order).find(|&r| m[r][k] != 0) else {
            return 0;
        };
        if pivot != k {
            m.swap(pivot, k);
            sign = -sign;
        }
        for r in k + 1..order {
            for c in k + 1..order {
                m[r][c] = (m[r][c] * m[k][k] - m[r][k] * m[k][c]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[order - 1][order - 1]
}

fn count_components(raw: &[Vec<i64>]) -> usize {
    let n = raw.len();
    let mut seen = vec![false; n];
    let mut components = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && (raw[i][j] != 0 || raw[j][i] != 0) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const ALL_PRESETS: &[&str] = &[
        "A1", "A2", "A3", "A4", "A5", "B2", "B3", "B4", "C2", "C3", "C4", "D4", "D5", "E6", "E7",
        "E8", "F4", "G2",
    ];

    #[test]
    fn a2_and_g2_presets() {
        let a2 = CartanDatum::make_preset(Family::A, 2).unwrap();
        assert_eq!(a2.dot(), &[vec![2, -1], vec![-1, 2]]);
        assert_eq!(a2.e(), 1);

        let g2 = CartanDatum::make_preset(Family::G, 2).unwrap();
        assert_eq!(g2.dot(), &[vec![2, -3], vec![-3, 6]]);
        assert_eq!(g2.e(), 3);
        assert_eq!(g2.cartan_entry(0, 1), -3);
        assert_eq!(g2.cartan_entry(1, 0), -1);
        assert_eq!(g2.short_nodes(), &[0]);
        assert_eq!(g2.long_nodes(), &[1]);
    }

    #[test]
    fn unknown_presets_are_rejected() {
        assert_eq!(
            CartanDatum::make_preset(Family::D, 3).unwrap_err(),
            CartanError::UnknownPreset { family: "D".into(), rank: 3 }
        );
        assert!(CartanDatum::from_name("E9").is_err());
        assert!(CartanDatum::from_name("G3").is_err());
        assert!(matches!(
            CartanDatum::from_name("Bogus"),
            Err(CartanError::BadPresetName(_))
        ));
    }

    #[test]
    fn pairing_and_v_exponents() {
        let a2 = CartanDatum::from_name("A2").unwrap();
        assert_eq!(a2.pairing(0, &Weight::simple(2, 0)), 2);
        let g2 = CartanDatum::from_name("G2").unwrap();
        assert_eq!(g2.pairing(0, &Weight::simple(2, 1)), -3);
        assert_eq!(g2.pairing(1, &Weight::simple(2, 0)), -1);
        assert_eq!(a2.v_exponent(0), 1);
        assert_eq!(g2.v_exponent(1), 3);
        let b2 = CartanDatum::from_name("B2").unwrap();
        assert_eq!(b2.dot(), &[vec![4, -2], vec![-2, 2]]);
        assert_eq!(b2.v_exponent(b2.long_nodes()[0]), 2);
        let c2 = CartanDatum::from_name("C2").unwrap();
        assert_eq!(c2.dot(), &[vec![2, -2], vec![-2, 4]]);
    }

    #[test]
    fn validation_of_raw_matrices() {
        let ok = validate(&[vec![2, -1], vec![-1, 2]]).unwrap();
        assert_eq!(ok.e(), 1);
        assert_eq!(ok.short_nodes(), &[0, 1]);
        assert_eq!(ok.long_nodes(), &[0, 1]);

        let affine = validate(&[vec![2, -2], vec![-2, 2]]).unwrap_err();
        assert_eq!(
            affine.violations,
            vec![Violation::NotPositiveDefinite { order: 2, minor: 0 }]
        );

        let split = validate(&[vec![2, 0], vec![0, 2]]).unwrap_err();
        assert_eq!(split.violations, vec![Violation::Reducible { components: 2 }]);
    }

    #[test]
    fn every_violation_is_reported() {
        let bad = validate(&[vec![3, 1, 0], vec![0, 4, -2], vec![0, -2, 4]]).unwrap_err();
        assert_eq!(
            bad.violations,
            vec![
                Violation::NotSymmetric { i: 0, j: 1 },
                Violation::DiagonalNotPositiveEven { i: 0, value: 3 },
                Violation::NoUnitNode,
            ]
        );
        let no_unit = validate(&[vec![4, -2], vec![-2, 4]]).unwrap_err();
        assert!(no_unit.violations.contains(&Violation::NoUnitNode));
        let ragged = validate(&[vec![2, -1], vec![-1]]).unwrap_err();
        assert!(matches!(ragged.violations[0], Violation::NotSquare { row: 1, .. }));
        assert_eq!(validate(&[]).unwrap_err().violations, vec![Violation::Empty]);
        let nonint = validate(&[vec![2, -1], vec![-1, 6]]).unwrap_err();
        assert!(nonint
            .violations
            .contains(&Violation::NonIntegralOrPositivePairing { i: 1, j: 0 }));
    }

    #[test]
    fn presets_round_trip_through_validation() {
        for name in ALL_PRESETS {
            let d = CartanDatum::from_name(name).unwrap();
            let again = validate(d.dot()).unwrap();
            assert_eq!(again.e(), d.e(), "{name}");
            assert_eq!(again.short_nodes(), d.short_nodes(), "{name}");
            assert_eq!(again.long_nodes(), d.long_nodes(), "{name}");
            for i in d.nodes() {
                for j in d.nodes() {
                    assert_eq!(again.cartan_entry(i, j), d.cartan_entry(i, j));
                }
            }
        }
    }

    #[test]
    fn cartan_entry_properties() {
        for name in ALL_PRESETS {
            let d = CartanDatum::from_name(name).unwrap();
            for i in d.nodes() {
                assert_eq!(d.cartan_entry(i, i), 2);
                for j in d.nodes() {
                    if i != j {
                        assert!(d.cartan_entry(i, j) <= 0);
                        assert_eq!(d.cartan_entry(i, j) == 0, d.cartan_entry(j, i) == 0);
                    }
                }
            }
            if d.e() == 1 {
                assert_eq!(d.short_nodes(), d.long_nodes());
            } else {
                let mut all: Vec<usize> =
                    d.short_nodes().iter().chain(d.long_nodes()).copied().collect();
                all.sort();
                assert_eq!(all, d.nodes().collect::<Vec<_>>(), "{name}");
            }
        }
    }
}
