//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use qadjoint::adjoint::Basis;
use qadjoint::cartan::{CartanDatum, Weight};
use qadjoint::roots::RootSystem;

pub const RELATION_PRESETS: &[&str] = &["A1", "A2", "A3", "A4", "B2", "B3", "C3", "D4", "F4", "G2", "E6"];

pub const SMALL_RANK_PRESETS: &[&str] =
    &["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D4", "F4", "G2"];

pub const ALL_PRESETS: &[&str] = &[
    "A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "B2", "B3", "B4", "B5", "B6", "B7", "B8", "C2", "C3", "C4",
    "C5", "C6", "C7", "C8", "D4", "D5", "D6", "D7", "D8", "E6", "E7", "E8", "F4", "G2",
];

pub fn rs(name: &str) -> RootSystem {
    RootSystem::generate(CartanDatum::from_name(name).unwrap()).unwrap()
}

pub type RatMatrix = Vec<Vec<BigRational>>;

fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.len();
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    (0..n)
                        .filter(|&k| !a[r][k].is_zero() && !b[k][c].is_zero())
                        .fold(BigRational::zero(), |acc, k| acc + &a[r][k] * &b[k][c])
                })
                .collect()
        })
        .collect()
}

/// The integer matrix of `e_i` (raise) or `f_i` at `v = 1`, built only from
/// the dot matrix and membership in the root set: a root `α` goes to
/// `(q+1) X_{α±i'}` where `q` counts how far the string extends backwards;
/// `X_{∓i'}` goes to `t_i`; `t_j` goes to `|2 i·j / j·j| X_{±i'}`.
pub fn integer_generator(rs: &RootSystem, i: usize, raise: bool) -> Vec<Vec<i64>> {
    let d = rs.datum();
    let basis = Basis::new(rs);
    let n = basis.dim();
    let rank = d.rank();
    let step: i64 = if raise { 1 } else { -1 };
    let simple = Weight::simple(rank, i);
    let target = if raise { simple.clone() } else { simple.neg() };
    let pos = |w: &Weight| rs.index_of(w).map(|k| basis.root_position(k));
    let mut m = vec![vec![0i64; n]; n];
    for alpha in rs.roots() {
        let col = pos(alpha).unwrap();
        if *alpha == target.neg() {
            m[basis.zero_position(i)][col] = 1;
            continue;
        }
        let next = alpha.add_simple(i, step);
        if let Some(row) = pos(&next) {
            let mut back = 0;
            while rs.contains(&alpha.add_simple(i, -step * (back + 1))) {
                back += 1;
            }
            m[row][col] = back + 1;
        }
    }
    for j in d.nodes() {
        let coeff = (2 * d.dot_entry(i, j) / d.dot_entry(j, j)).abs();
        m[pos(&target).unwrap()][basis.zero_position(j)] = coeff;
    }
    m
}

/// Terms `m^k / k!` of the exponential series over `Q`, stopping at the
/// first vanishing power; `None` if a term is not integral or `m` is not
/// nilpotent of order `<= 5`.
pub fn exp_series(m: &[Vec<i64>]) -> Option<Vec<Vec<Vec<i64>>>> {
    let n = m.len();
    let rat = |x: i64| BigRational::from_integer(BigInt::from(x));
    let base: RatMatrix = m.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
    let mut power: RatMatrix =
        (0..n).map(|r| (0..n).map(|c| if r == c { BigRational::one() } else { BigRational::zero() }).collect()).collect();
    let mut terms = Vec::new();
    for k in 1..=6i64 {
        let term = power
            .iter()
            .map(|row| row.iter().map(|x| x.is_integer().then(|| x.to_integer().to_i64()).flatten()).collect())
            .collect::<Option<Vec<Vec<i64>>>>()?;
        terms.push(term);
        power = mat_mul(&power, &base);
        for x in power.iter_mut().flatten() {
            *x /= rat(k);
        }
        if power.iter().flatten().all(Zero::is_zero) {
            return Some(terms);
        }
    }
    None
}

/// `exp(z m) = Σ z^k m^k / k!` with integer `z`.
pub fn exp_oracle(series: &[Vec<Vec<i64>>], z: i64) -> Vec<Vec<i64>> {
    let n = series[0].len();
    let mut total = vec![vec![0i64; n]; n];
    for (k, term) in series.iter().enumerate() {
        let zk = z.pow(k as u32);
        for (tr, mr) in total.iter_mut().zip(term) {
            for (t, x) in tr.iter_mut().zip(mr) {
                *t += zk * x;
            }
        }
    }
    total
}

pub fn reduce(m: &[Vec<i64>], p: u32) -> Vec<Vec<u32>> {
    m.iter().map(|r| r.iter().map(|&x| x.rem_euclid(p as i64) as u32).collect()).collect()
}
