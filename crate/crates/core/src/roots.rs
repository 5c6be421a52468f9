//! The root system of a Cartan datum, generated by closing the simple roots
//! under the simple reflections, together with root strings, heights, the
//! highest root and the long/short classification.
//!
//! Root order: positive roots sorted by `(height, coordinates)`, followed by
//! their negatives in the same order.
//!
//! String lengths follow the literal membership definition: `p_{i,α}` is the
//! largest `k >= 0` with `α, α + i', ..., α + k i'` all in `R`. Since `0` is
//! not a root, the string through `±i'` in direction `i'` stops there, so
//! `p_{i,i'} = q_{i,i'} = 0`. The pairing identity `<i,α> = q - p` is
//! therefore checked only for `α ≠ ±i'`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::cartan::{CartanDatum, Weight};

/// Upper bound on the size of a reflection closure.
pub const CLOSURE_LIMIT: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("reflection closure exceeded {0} elements")]
    ClosureTooLarge(usize),
    #[error("{0} is not a root")]
    NotARoot(Weight),
    #[error("node {0} is out of range")]
    BadNode(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthClass {
    Short,
    Long,
    /// Simply-laced case: every root is both short and long.
    Uniform,
}

#[derive(Debug, Clone)]
pub struct RootSystem {
    datum: CartanDatum,
    roots: Vec<Weight>,
    index: HashMap<Weight, usize>,
    n_positive: usize,
    // indexed [node][root]
    p: Vec<Vec<u32>>,
    q: Vec<Vec<u32>>,
    alpha0: usize,
    classes: Vec<LengthClass>,
}

impl RootSystem {
    pub fn generate(datum: CartanDatum) -> Result<Self, RootError> {
        let rank = datum.rank();
        let closure = reflection_closure(&datum, (0..rank).map(|i| Weight::simple(rank, i)))?;

        let mut positive: Vec<Weight> = closure.iter().filter(|w| w.is_nonneg()).cloned().collect();
        positive.sort_by(|a, b| a.height().cmp(&b.height()).then_with(|| a.cmp(b)));
        let negative: Vec<Weight> = positive.iter().map(Weight::neg).collect();
        let n_positive = positive.len();
        let roots: Vec<Weight> = positive.into_iter().chain(negative).collect();
        let index: HashMap<Weight, usize> =
            roots.iter().cloned().enumerate().map(|(n, w)| (w, n)).collect();

        let mut p = vec![vec![0u32; roots.len()]; rank];
        let mut q = vec![vec![0u32; roots.len()]; rank];
        for i in 0..rank {
            for (n, alpha) in roots.iter().enumerate() {
                p[i][n] = arm_length(&index, alpha, i, 1);
                q[i][n] = arm_length(&index, alpha, i, -1);
            }
        }

        let e = datum.e() as i64;
        let classes = roots
            .iter()
            .map(|a| {
                let norm = datum.form(a, a);
                if e == 1 {
                    LengthClass::Uniform
                } else if norm == 2 {
                    LengthClass::Short
                } else {
                    debug_assert_eq!(norm, 2 * e);
                    LengthClass::Long
                }
            })
            .collect();

        Ok(Self {
            datum,
            alpha0: n_positive - 1,
            roots,
            index,
            n_positive,
            p,
            q,
            classes,
        })
    }

    pub fn datum(&self) -> &CartanDatum {
        &self.datum
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    pub fn roots(&self) -> &[Weight] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn positive(&self) -> &[Weight] {
        &self.roots[..self.n_positive]
    }

    pub fn n_positive(&self) -> usize {
        self.n_positive
    }

    pub fn root(&self, idx: usize) -> &Weight {
        &self.roots[idx]
    }

    pub fn index_of(&self, w: &Weight) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn contains(&self, w: &Weight) -> bool {
        self.index.contains_key(w)
    }

    /// Index of the negated root.
    pub fn negation(&self, idx: usize) -> usize {
        if idx < self.n_positive {
            idx + self.n_positive
        } else {
            idx - self.n_positive
        }
    }

    /// Index of the simple root `i'`.
    pub fn simple_index(&self, i: usize) -> usize {
        self.index[&Weight::simple(self.rank(), i)]
    }

    pub fn p(&self, i: usize, idx: usize) -> u32 {
        self.p[i][idx]
    }

    pub fn q(&self, i: usize, idx: usize) -> u32 {
        self.q[i][idx]
    }

    /// `(p_{i,α}, q_{i,α})`.
    pub fn string(&self, i: usize, alpha: &Weight) -> Result<(u32, u32), RootError> {
        if i >= self.rank() {
            return Err(RootError::BadNode(i));
        }
        let idx = self.index_of(alpha).ok_or_else(|| RootError::NotARoot(alpha.clone()))?;
        Ok((self.p[i][idx], self.q[i][idx]))
    }

    /// Index of `α + k i'` if that is a root.
    pub fn shifted(&self, idx: usize, i: usize, k: i64) -> Option<usize> {
        self.index_of(&self.roots[idx].add_simple(i, k))
    }

    pub fn height(&self, idx: usize) -> i64 {
        self.roots[idx].height()
    }

    pub fn alpha0(&self) -> &Weight {
        &self.roots[self.alpha0]
    }

    pub fn alpha0_index(&self) -> usize {
        self.alpha0
    }

    pub fn class(&self, idx: usize) -> LengthClass {
        self.classes[idx]
    }

    /// Membership in `R¹`.
    pub fn is_short(&self, idx: usize) -> bool {
        self.classes[idx] != LengthClass::Long
    }

    /// Membership in `Rᵉ`.
    pub fn is_long(&self, idx: usize) -> bool {
        self.classes[idx] != LengthClass::Short
    }

    /// Checks the structural facts about root strings and the highest root
    /// for every node and root. Violations become failing entries; nothing
    /// short-circuits.
    pub fn check_root_facts(&self) -> RootReport {
        let d = &self.datum;
        let e = d.e();
        let mut entries = Vec::new();
        let mut push = |check: &str, location: String, pass: bool| {
            entries.push(RootCheck { check: check.to_string(), location, pass });
        };

        for i in d.nodes() {
            let plus = self.simple_index(i);
            let minus = self.negation(plus);
            for (n, alpha) in self.roots.iter().enumerate() {
                let (p, q) = (self.p[i][n], self.q[i][n]);
                let loc = format!("i={} alpha={alpha}", i + 1);
                if n != plus && n != minus {
                    push("string_pairing", loc.clone(), d.pairing(i, alpha) == q as i64 - p as i64);
                }
                push("string_length_bound", loc.clone(), p + q <= 3);
                let bottom = self.shifted(n, i, -(q as i64));
                let top = self.shifted(n, i, p as i64);
                let (Some(bottom), Some(top)) = (bottom, top) else {
                    push("string_endpoints_exist", loc, false);
                    continue;
                };
                if p + q > 1 {
                    let mut ok = p + q == e && d.is_short(i) && e > 1;
                    ok &= self.is_long(bottom) && self.is_long(top);
                    for k in -(q as i64) + 1..p as i64 {
                        ok &= self.shifted(n, i, k).is_some_and(|m| self.is_short(m));
                    }
                    push("long_string_shape", loc, ok);
                } else if p + q == 1 {
                    let both_long = self.is_long(bottom) && self.is_long(top);
                    let both_short = self.is_short(bottom) && self.is_short(top);
                    push("unit_string_endpoints", loc, both_long || both_short);
                }
            }
        }

        let a0 = self.alpha0();
        let max_height = a0.height();
        let unique = self.positive().iter().filter(|a| a.height() == max_height).count() == 1;
        push("highest_root_unique", format!("alpha0={a0}"), unique);
        for i in d.nodes() {
            let loc = format!("i={} alpha0={a0}", i + 1);
            let ok = self.p[i][self.alpha0] == 0 && d.pairing(i, a0) >= 0;
            push("highest_root_dominant", loc, ok);
        }
        push("highest_root_long", format!("alpha0={a0}"), self.is_long(self.alpha0));

        // R¹ and Rᵉ are the W-orbits of the short and long simple roots.
        let rank = d.rank();
        for (label, nodes, member) in [
            ("orbit_short", d.short_nodes(), LengthClass::Short),
            ("orbit_long", d.long_nodes(), LengthClass::Long),
        ] {
            let orbit = reflection_closure(d, nodes.iter().map(|&i| Weight::simple(rank, i)));
            let expected: BTreeSet<Weight> = self
                .roots
                .iter()
                .enumerate()
                .filter(|(n, _)| match member {
                    LengthClass::Short => self.is_short(*n),
                    _ => self.is_long(*n),
                })
                .map(|(_, w)| w.clone())
                .collect();
            let pass = orbit.is_ok_and(|o| o.into_iter().collect::<BTreeSet<_>>() == expected);
            push(label, format!("type={}", d.name()), pass);
        }

        RootReport { entries }
    }
}

/// Smallest set containing `seeds` and stable under every simple reflection.
/// Returned in discovery order.
pub fn reflection_closure<I>(datum: &CartanDatum, seeds: I) -> Result<Vec<Weight>, RootError>
where
    I: IntoIterator<Item = Weight>,
{
    let mut seen: BTreeSet<Weight> = BTreeSet::new();
    let mut order = Vec::new();
    let mut queue: VecDeque<Weight> = VecDeque::new();
    for s in seeds {
        if seen.insert(s.clone()) {
            order.push(s.clone());
            queue.push_back(s);
        }
    }
    while let Some(w) = queue.pop_front() {
        for i in datum.nodes() {
            let image = datum.reflect(i, &w);
            if seen.insert(image.clone()) {
                if seen.len() > CLOSURE_LIMIT {
                    return Err(RootError::ClosureTooLarge(CLOSURE_LIMIT));
                }
                order.push(image.clone());
                queue.push_back(image);
            }
        }
    }
    Ok(order)
}

fn arm_length(index: &HashMap<Weight, usize>, alpha: &Weight, i: usize, step: i64) -> u32 {
    let mut k = 0u32;
    while index.contains_key(&alpha.add_simple(i, step * (k as i64 + 1))) {
        k += 1;
    }
    k
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootCheck {
    pub check: String,
    pub location: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootReport {
    pub entries: Vec<RootCheck>,
}

impl RootReport {
    pub fn failures(&self) -> impl Iterator<Item = &RootCheck> {
        self.entries.iter().filter(|c| !c.pass)
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|c| c.pass)
    }
}

impl fmt::Display for RootReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let total = self.entries.len();
        let failed = self.failures().count();
        writeln!(f, "{} checks, {} failed", total, failed)?;
        for c in self.failures() {
            writeln!(f, "FAIL {} at {}", c.check, c.location)?;
        }
        Ok(())
    }
}
