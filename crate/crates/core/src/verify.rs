//! Exact verification of the adjoint module.
//!
//! Every check compares Laurent polynomials or matrices over `Z[v, v^-1]`
//! for equality; nothing is approximate. A failing check records a witness
//! naming the instance, the matrix entry and both sides.
//!
//! Suites:
//! * `relations`: the defining relations of the quantized enveloping
//!   algebra as matrix identities, plus positivity, divided-power
//!   consistency, weight shifts and nilpotency of the generator matrices.
//! * `form`: the contravariant form. The closed-form Gram matrix is compared
//!   with the unique solution of the linear system given by the
//!   normalization `(η,η) = 1` and the adjunction identities, solved over `Q(v)`.
//! * `strings`: raising/lowering along `i`-strings and the norm recursion.
//! * `bar`: bar-invariance of every `E`/`F` matrix entry.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::adjoint::{
    build_e, build_e_divided, build_f, build_f_divided, build_k, build_k_node, Basis, Label,
    ModuleOperator,
};
use crate::qpoly::{q_factorial, q_int, LaurentPoly};
use crate::ratfunc::RatFunc;
use crate::roots::RootSystem;

/// Highest divided power exercised by the checks.
pub const MAX_DIVIDED: u32 = 4;

/// Failures recorded per check before further ones are only counted.
const MAX_WITNESSES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub instance: String,
    pub location: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub scope: String,
    pub instances_checked: u64,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    fn new(name: &str, scope: &str) -> Self {
        Self {
            name: name.to_string(),
            scope: scope.to_string(),
            instances_checked: 0,
            failure_count: 0,
            failures: Vec::new(),
            note: None,
        }
    }

    fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }

    fn record(&mut self, failure: Option<Failure>) {
        self.instances_checked += 1;
        if let Some(f) = failure {
            self.failure_count += 1;
            if self.failures.len() < MAX_WITNESSES {
                self.failures.push(f);
            }
        }
    }

    fn check(&mut self, ok: bool, failure: impl FnOnce() -> Failure) {
        self.record((!ok).then(failure));
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    fn from_checks(checks: Vec<CheckResult>) -> Self {
        let mut report = Self { checks };
        report.sort();
        report
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.sort();
    }

    fn sort(&mut self) {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name).then_with(|| a.scope.cmp(&b.scope)));
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn failure_count(&self) -> u64 {
        self.checks.iter().map(|c| c.failure_count).sum()
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        writeln!(f, "{:<width$}  {:<6}  {:>9}  {:>8}  result", "check", "scope", "instances", "failures")?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<width$}  {:<6}  {:>9}  {:>8}  {}",
                c.name,
                c.scope,
                c.instances_checked,
                c.failure_count,
                if c.passed() { "PASS" } else { "FAIL" }
            )?;
            for w in &c.failures {
                writeln!(f, "    {} at {}: {} != {}", w.instance, w.location, w.lhs, w.rhs)?;
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Relations,
    Form,
    Strings,
    Bar,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "relations" => Suite::Relations,
            "form" => Suite::Form,
            "strings" => Suite::Strings,
            "bar" => Suite::Bar,
            "all" => Suite::All,
            _ => return Err(format!("unknown suite {s:?}")),
        })
    }
}

/// The generator matrices used by the checks. Public fields so a test can
/// corrupt an entry and watch the checks fail.
#[derive(Debug, Clone)]
pub struct Generators {
    pub basis: Basis,
    pub e: Vec<ModuleOperator>,
    pub f: Vec<ModuleOperator>,
    /// `e_div[i][k] = E_i^{(k)}` for `k = 0..=MAX_DIVIDED`, with `k = 0` the identity.
    pub e_div: Vec<Vec<ModuleOperator>>,
    pub f_div: Vec<Vec<ModuleOperator>>,
}

impl Generators {
    pub fn build(rs: &RootSystem) -> Self {
        let basis = Basis::new(rs);
        let dim = basis.dim();
        let nodes = rs.datum().nodes();
        let divided = |raise: fn(&RootSystem, usize, u32) -> ModuleOperator, i: usize| {
            std::iter::once(ModuleOperator::identity(dim))
                .chain((1..=MAX_DIVIDED).map(|k| raise(rs, i, k)))
                .collect::<Vec<_>>()
        };
        Self {
            e: nodes.clone().map(|i| build_e(rs, i)).collect(),
            f: nodes.clone().map(|i| build_f(rs, i)).collect(),
            e_div: nodes.clone().map(|i| divided(build_e_divided, i)).collect(),
            f_div: nodes.map(|i| divided(build_f_divided, i)).collect(),
            basis,
        }
    }
}

fn matrix_failure(
    basis: &Basis,
    instance: String,
    lhs: &ModuleOperator,
    rhs: &ModuleOperator,
) -> Option<Failure> {
    let (r, c) = lhs.first_difference(rhs)?;
    Some(Failure {
        instance,
        location: format!("row {}, col {}", basis.label(r), basis.label(c)),
        lhs: lhs.entry(r, c).to_string(),
        rhs: rhs.entry(r, c).to_string(),
    })
}

fn node_name(i: usize) -> usize {
    i + 1
}

/// The six families of defining relations, as matrix identities.
pub fn check_relations(rs: &RootSystem) -> VerificationReport {
    check_relations_with(rs, &Generators::build(rs))
}

pub fn check_relations_with(rs: &RootSystem, gens: &Generators) -> VerificationReport {
    let d = rs.datum();
    let scope = d.name();
    let basis = &gens.basis;
    let dim = basis.dim();
    let rank = d.rank();

    let mut k_product = CheckResult::new("relation_k_product", scope).with_note(
        "K is diagonal with entries v^<y,λ>, multiplicative in y; checking unit vectors y, y' \
         (all ordered pairs, and y' = -y) is sufficient",
    );
    let unit = |i: usize, s: i64| {
        let mut y = vec![0i64; rank];
        y[i] = s;
        y
    };
    for a in 0..rank {
        for b in 0..rank {
            let lhs = build_k(rs, &unit(a, 1)).compose(&build_k(rs, &unit(b, 1)));
            let mut sum = unit(a, 1);
            sum[b] += 1;
            let rhs = build_k(rs, &sum);
            let instance = format!("K_{} K_{}", node_name(a), node_name(b));
            k_product.record(matrix_failure(basis, instance, &lhs, &rhs));
        }
        let lhs = build_k(rs, &unit(a, 1)).compose(&build_k(rs, &unit(a, -1)));
        let rhs = ModuleOperator::identity(dim).with_label(Label::K { y: vec![0; rank] });
        let instance = format!("K_{} K_-{}", node_name(a), node_name(a));
        k_product.record(matrix_failure(basis, instance, &lhs, &rhs));
    }

    let mut k_e = CheckResult::new("relation_k_e", scope);
    let mut k_f = CheckResult::new("relation_k_f", scope);
    let mut commutator = CheckResult::new("relation_ef_commutator", scope).with_note(
        "right side realized as the diagonal operator with entry [<i,λ>]_i",
    );
    for i in d.nodes() {
        let k_i = build_k_node(rs, i, 1);
        for j in d.nodes() {
            let a = d.cartan_entry(i, j) as i32;
            let lhs = k_i.compose(&gens.e[j]);
            let rhs = gens.e[j].compose(&k_i).scale(&LaurentPoly::v_pow(a));
            let inst = format!("K_{} E_{}", node_name(i), node_name(j));
            k_e.record(matrix_failure(basis, inst, &lhs, &rhs));

            let lhs = k_i.compose(&gens.f[j]);
            let rhs = gens.f[j].compose(&k_i).scale(&LaurentPoly::v_pow(-a));
            let inst = format!("K_{} F_{}", node_name(i), node_name(j));
            k_f.record(matrix_failure(basis, inst, &lhs, &rhs));

            let lhs = gens.e[i].compose(&gens.f[j]).sub(&gens.f[j].compose(&gens.e[i]));
            let mut rhs = ModuleOperator::zero(dim, Label::Derived { description: "delta".into() });
            if i == j {
                let di = d.v_exponent(i);
                for b in 0..dim {
                    rhs.set(b, b, q_int(d.pairing(i, basis.weight(b)), di));
                }
            }
            let inst = format!("E_{} F_{} - F_{} E_{}", i + 1, j + 1, j + 1, i + 1);
            commutator.record(matrix_failure(basis, inst, &lhs, &rhs));
        }
    }

    let mut serre_e = CheckResult::new("relation_serre_e", scope);
    let mut serre_f = CheckResult::new("relation_serre_f", scope);
    let zero = ModuleOperator::zero(dim, Label::Derived { description: "0".into() });
    for i in d.nodes() {
        for j in d.nodes() {
            if i == j {
                continue;
            }
            let n = (1 - d.cartan_entry(i, j)) as u32;
            assert!(n <= MAX_DIVIDED, "Serre degree {n} exceeds the divided powers built");
            for (out, single, div, letter) in [
                (&mut serre_e, &gens.e, &gens.e_div, "E"),
                (&mut serre_f, &gens.f, &gens.f_div, "F"),
            ] {
                let mut total = zero.clone();
                for p in 0..=n {
                    let term = div[i][p as usize]
                        .compose(&single[j])
                        .compose(&div[i][(n - p) as usize]);
                    total = if (n - p).is_multiple_of(2) { total.add(&term) } else { total.sub(&term) };
                }
                let inst = format!("{letter}-Serre i={} j={} degree {n}", i + 1, j + 1);
                out.record(matrix_failure(basis, inst, &total, &zero));
            }
        }
    }

    VerificationReport::from_checks(vec![k_product, k_e, k_f, commutator, serre_e, serre_f])
}

/// Positivity, divided-power consistency, weight shifts and nilpotency of
/// the generator matrices.
pub fn check_operator_properties(rs: &RootSystem, gens: &Generators) -> VerificationReport {
    let d = rs.datum();
    let scope = d.name();
    let basis = &gens.basis;
    let mut positivity = CheckResult::new("positivity", scope);
    let mut consistency = CheckResult::new("divided_power_consistency", scope);
    let mut shift = CheckResult::new("weight_shift", scope);
    let mut nilpotent = CheckResult::new("nilpotency", scope);

    for i in d.nodes() {
        let di = d.v_exponent(i);
        for (single, div, letter, sign) in
            [(&gens.e[i], &gens.e_div[i], "E", 1i64), (&gens.f[i], &gens.f_div[i], "F", -1i64)]
        {
            for k in 1..=MAX_DIVIDED {
                let op = &div[k as usize];
                for (r, c, p) in op.nonzero_entries() {
                    positivity.check(p.is_nonneg(), || Failure {
                        instance: format!("{letter}_{}^({k})", i + 1),
                        location: format!("row {}, col {}", basis.label(r), basis.label(c)),
                        lhs: p.to_string(),
                        rhs: "coefficients >= 0".into(),
                    });
                    let expected = basis.weight(c).add_simple(i, sign * k as i64);
                    shift.check(basis.weight(r) == &expected, || Failure {
                        instance: format!("{letter}_{}^({k})", i + 1),
                        location: format!("row {}, col {}", basis.label(r), basis.label(c)),
                        lhs: basis.weight(r).to_string(),
                        rhs: expected.to_string(),
                    });
                }
                let fact = q_factorial(k, di).expect("small factorial");
                let lhs = op.scale(&fact);
                let rhs = single.pow(k);
                let inst = format!("[{k}]!_{} {letter}_{}^({k}) = {letter}_{}^{k}", i + 1, i + 1, i + 1);
                consistency.record(matrix_failure(basis, inst, &lhs, &rhs));
            }
            let power = d.e() + 2;
            let p = single.pow(power);
            let inst = format!("{letter}_{}^{power}", i + 1);
            let zero = ModuleOperator::zero(basis.dim(), Label::Identity);
            nilpotent.record(matrix_failure(basis, inst, &p, &zero));
        }
    }
    VerificationReport::from_checks(vec![positivity, consistency, shift, nilpotent])
}

/// Bar-invariance of every entry of `E_i`, `F_i` and their divided powers.
pub fn check_bar_compatibility(rs: &RootSystem) -> VerificationReport {
    check_bar_compatibility_with(rs, &Generators::build(rs))
}

pub fn check_bar_compatibility_with(rs: &RootSystem, gens: &Generators) -> VerificationReport {
    let basis = &gens.basis;
    let mut check = CheckResult::new("bar_invariance", rs.datum().name()).with_note(
        "K_y entries v^<y,λ> are not bar-invariant and are excluded",
    );
    for i in rs.datum().nodes() {
        for ops in [&gens.e_div[i], &gens.f_div[i]] {
            for op in &ops[1..] {
                for (r, c, p) in op.nonzero_entries() {
                    check.check(p.is_bar_invariant(), || Failure {
                        instance: op.label().to_string(),
                        location: format!("row {}, col {}", basis.label(r), basis.label(c)),
                        lhs: p.bar().to_string(),
                        rhs: p.to_string(),
                    });
                }
            }
        }
    }
    VerificationReport::from_checks(vec![check])
}

/// Along every `i`-string starting at `α` (`q_{i,α} = 0`, `p = p_{i,α} >= 1`):
/// `E_i X_{α+(k-1)i'} = [k]_i X_{α+k i'}` and `F_i X_{α+k i'} = [p-k+1]_i X_{α+(k-1)i'}`.
pub fn check_string_identities(rs: &RootSystem, gens: &Generators) -> VerificationReport {
    let d = rs.datum();
    let scope = d.name();
    let basis = &gens.basis;
    let dim = basis.dim();
    let mut raising = CheckResult::new("string_raising", scope);
    let mut lowering = CheckResult::new("string_lowering", scope);
    let unit = |idx: usize, c: LaurentPoly| {
        let mut v = vec![LaurentPoly::zero(); dim];
        v[idx] = c;
        v
    };
    let render = |v: &[LaurentPoly]| {
        v.iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(n, p)| format!("({p}) {}", basis.label(n)))
            .collect::<Vec<_>>()
            .join(" + ")
    };
    for i in d.nodes() {
        let di = d.v_exponent(i);
        for start in 0..rs.len() {
            let p = rs.p(i, start);
            if rs.q(i, start) != 0 || p == 0 {
                continue;
            }
            let z = |k: u32| basis.root_position(rs.shifted(start, i, k as i64).unwrap());
            for k in 1..=p {
                let inst = format!("i={} alpha={} k={k}", i + 1, rs.root(start));
                let lhs = gens.e[i].apply(&unit(z(k - 1), LaurentPoly::one())).unwrap();
                let rhs = unit(z(k), q_int(k as i64, di));
                raising.check(lhs == rhs, || Failure {
                    instance: inst.clone(),
                    location: "E_i Z^(k-1)".into(),
                    lhs: render(&lhs),
                    rhs: render(&rhs),
                });
                let lhs = gens.f[i].apply(&unit(z(k), LaurentPoly::one())).unwrap();
                let rhs = unit(z(k - 1), q_int((p - k + 1) as i64, di));
                lowering.check(lhs == rhs, || Failure {
                    instance: inst,
                    location: "F_i Z^k".into(),
                    lhs: render(&lhs),
                    rhs: render(&rhs),
                });
            }
        }
    }
    VerificationReport::from_checks(vec![raising, lowering])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    ContractSolved,
}

/// Matrix of the contravariant form in the canonical basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramMatrix {
    dim: usize,
    entries: Vec<LaurentPoly>,
    provenance: Provenance,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn entry(&self, a: usize, b: usize) -> &LaurentPoly {
        &self.entries[a * self.dim + b]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[LaurentPoly]> {
        self.entries.chunks(self.dim)
    }

    /// `(x, y)` for coefficient vectors.
    pub fn pair(&self, x: &[LaurentPoly], y: &[LaurentPoly]) -> LaurentPoly {
        let mut total = LaurentPoly::zero();
        for (a, xa) in x.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
            for (b, yb) in y.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
                let g = self.entry(a, b);
                if !g.is_zero() {
                    total = total + xa * &(g * yb);
                }
            }
        }
        total
    }

    /// Entries `(a, b)` where the two matrices disagree, row-major.
    pub fn differences(&self, other: &GramMatrix) -> Vec<(usize, usize)> {
        self.entries
            .iter()
            .zip(&other.entries)
            .enumerate()
            .filter(|(_, (x, y))| x != y)
            .map(|(n, _)| (n / self.dim, n % self.dim))
            .collect()
    }
}

/// `1 + v^-2 + ... + v^-2(e-1) = v^{1-e} [e]`.
fn short_norm(e: u32) -> LaurentPoly {
    q_int(e as i64, 1).shift(1 - e as i32)
}

/// The Gram matrix from the closed formulas for root vectors and the
/// zero-weight block.
pub fn gram_closed_form(rs: &RootSystem) -> GramMatrix {
    let d = rs.datum();
    let basis = Basis::new(rs);
    let dim = basis.dim();
    let e = d.e();
    let ei = e as i32;
    let mut entries = vec![LaurentPoly::zero(); dim * dim];
    for n in 0..rs.len() {
        let pos = basis.root_position(n);
        entries[pos * dim + pos] =
            if rs.is_long(n) { LaurentPoly::one() } else { short_norm(e) };
    }
    for i in d.nodes() {
        for j in d.nodes() {
            let value = if i == j {
                if d.is_long(i) {
                    LaurentPoly::one() + LaurentPoly::v_pow(-2 * ei)
                } else {
                    (LaurentPoly::one() + LaurentPoly::v_pow(-2)) * short_norm(e)
                }
            } else if d.dot_entry(i, j) == 0 {
                LaurentPoly::zero()
            } else if d.is_long(i) && d.is_long(j) {
                LaurentPoly::v_pow(-ei)
            } else {
                q_int(e as i64, 1).shift(-ei)
            };
            entries[basis.zero_position(i) * dim + basis.zero_position(j)] = value;
        }
    }
    GramMatrix { dim, entries, provenance: Provenance::ClosedForm }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("form system is underdetermined; free entries: {0:?}")]
    Underdetermined(Vec<String>),
    #[error("form system is inconsistent at equation {0}")]
    Inconsistent(String),
    #[error("solved entry {entry} = {value} is not in Z[v, v^-1]")]
    NotLaurent { entry: String, value: String },
    #[error("string norm check needs a contract-solved Gram matrix")]
    WrongProvenance,
}

/// Sparse linear system over `Q(v)` kept in reduced row echelon form.
struct Solver {
    // pivot column -> row with coefficient 1 at the pivot and no other pivot columns
    pivots: BTreeMap<usize, (BTreeMap<usize, RatFunc>, RatFunc)>,
}

impl Solver {
    fn new() -> Self {
        Self { pivots: BTreeMap::new() }
    }

    /// Adds `Σ coeffs[k] u_k = rhs`. Returns false if it contradicts the
    /// equations already present.
    fn add(&mut self, mut coeffs: BTreeMap<usize, RatFunc>, mut rhs: RatFunc) -> bool {
        coeffs.retain(|_, c| !c.is_zero());
        let hits: Vec<usize> =
            coeffs.keys().filter(|k| self.pivots.contains_key(k)).copied().collect();
        for col in hits {
            let Some(factor) = coeffs.get(&col).cloned() else { continue };
            let (row, row_rhs) = &self.pivots[&col];
            for (k, c) in row {
                let updated = coeffs.get(k).cloned().unwrap_or_else(RatFunc::zero).sub(&factor.mul(c));
                if updated.is_zero() {
                    coeffs.remove(k);
                } else {
                    coeffs.insert(*k, updated);
                }
            }
            rhs = rhs.sub(&factor.mul(row_rhs));
        }
        let Some((&pivot, lead)) = coeffs.iter().next() else {
            return rhs.is_zero();
        };
        let inv = lead.inv().expect("nonzero coefficient");
        let row: BTreeMap<usize, RatFunc> =
            coeffs.iter().map(|(k, c)| (*k, c.mul(&inv))).collect();
        let rhs = rhs.mul(&inv);
        for (other, other_rhs) in self.pivots.values_mut() {
            let Some(factor) = other.remove(&pivot) else { continue };
            for (k, c) in &row {
                if *k == pivot {
                    continue;
                }
                let updated = other.get(k).cloned().unwrap_or_else(RatFunc::zero).sub(&factor.mul(c));
                if updated.is_zero() {
                    other.remove(k);
                } else {
                    other.insert(*k, updated);
                }
            }
            *other_rhs = other_rhs.sub(&factor.mul(&rhs));
        }
        self.pivots.insert(pivot, (row, rhs));
        true
    }

    /// Unique solution, or the unknowns left undetermined.
    fn solve(&self, n_unknowns: usize) -> Result<Vec<RatFunc>, Vec<usize>> {
        let mut values = Vec::with_capacity(n_unknowns);
        let mut free = Vec::new();
        for k in 0..n_unknowns {
            match self.pivots.get(&k) {
                Some((row, rhs)) if row.len() == 1 => values.push(rhs.clone()),
                _ => {
                    free.push(k);
                    values.push(RatFunc::zero());
                }
            }
        }
        if free.is_empty() {
            Ok(values)
        } else {
            Err(free)
        }
    }
}

/// Solves for the Gram matrix from the defining properties of the form:
/// `(η,η) = 1` with `η = X_{α₀}`, symmetry, `(K_i x, x') = (x, K_i x')`,
/// `(E_i x, x') = (x, v_i K_i^{i·i/2} F_i x')` and
/// `(F_i x, x') = (x, v_i K_i^{-i·i/2} E_i x')` on all basis pairs. The
/// solution must be unique and lie in `Z[v, v^-1]`.
pub fn gram_from_contract(rs: &RootSystem) -> Result<GramMatrix, FormError> {
    let d = rs.datum();
    let basis = Basis::new(rs);
    let dim = basis.dim();
    // unknown for the unordered pair {a, b}
    let unknown = |a: usize, b: usize| {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        a * (2 * dim - a + 1) / 2 + (b - a)
    };
    let n_unknowns = dim * (dim + 1) / 2;
    let describe = |k: usize| {
        let a = (0..dim).rfind(|&a| unknown(a, a) <= k).unwrap();
        let b = a + (k - unknown(a, a));
        format!("({}, {})", basis.label(a), basis.label(b))
    };

    let mut solver = Solver::new();
    let eta = basis.root_position(rs.alpha0_index());
    solver.add(BTreeMap::from([(unknown(eta, eta), RatFunc::one())]), RatFunc::one());

    for i in d.nodes() {
        for a in 0..dim {
            for b in a..dim {
                let ka = d.pairing(i, basis.weight(a)) as i32;
                let kb = d.pairing(i, basis.weight(b)) as i32;
                let c = LaurentPoly::v_pow(ka) - LaurentPoly::v_pow(kb);
                if !c.is_zero() {
                    let eq = BTreeMap::from([(unknown(a, b), RatFunc::from_laurent(&c))]);
                    if !solver.add(eq, RatFunc::zero()) {
                        return Err(FormError::Inconsistent(format!(
                            "K_{} adjunction at ({}, {})",
                            i + 1,
                            basis.label(a),
                            basis.label(b)
                        )));
                    }
                }
            }
        }
    }

    for i in d.nodes() {
        let di = d.v_exponent(i) as i64;
        let e = build_e(rs, i);
        let f = build_f(rs, i);
        // (X x, x') = (x, v_i K_i^{±di} Y x'): (X, Y, sign) = (E, F, +1) and (F, E, -1)
        for (x_op, y_op, sign, name) in [(&e, &f, 1i64, "E"), (&f, &e, -1i64, "F")] {
            let x_cols: Vec<Vec<(usize, LaurentPoly)>> = (0..dim)
                .map(|c| x_op.column(c).into_iter().map(|(r, p)| (r, p.clone())).collect())
                .collect();
            let y_cols: Vec<Vec<(usize, LaurentPoly)>> = (0..dim)
                .map(|c| {
                    y_op.column(c)
                        .into_iter()
                        .map(|(s, p)| {
                            let exp = di * (1 + sign * d.pairing(i, basis.weight(s)));
                            (s, p.shift(exp as i32))
                        })
                        .collect()
                })
                .collect();
            for a in 0..dim {
                for b in 0..dim {
                    if x_cols[a].is_empty() && y_cols[b].is_empty() {
                        continue;
                    }
                    let mut eq: BTreeMap<usize, LaurentPoly> = BTreeMap::new();
                    for (r, p) in &x_cols[a] {
                        let slot = eq.entry(unknown(*r, b)).or_default();
                        *slot = &*slot + p;
                    }
                    for (s, p) in &y_cols[b] {
                        let slot = eq.entry(unknown(a, *s)).or_default();
                        *slot = &*slot - p;
                    }
                    let eq = eq.into_iter().map(|(k, p)| (k, RatFunc::from_laurent(&p))).collect();
                    if !solver.add(eq, RatFunc::zero()) {
                        return Err(FormError::Inconsistent(format!(
                            "{name}_{} adjunction at ({}, {})",
                            i + 1,
                            basis.label(a),
                            basis.label(b)
                        )));
                    }
                }
            }
        }
    }

    let values = solver
        .solve(n_unknowns)
        .map_err(|free| FormError::Underdetermined(free.into_iter().take(16).map(describe).collect()))?;
    let mut entries = vec![LaurentPoly::zero(); dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            let value = &values[unknown(a, b)];
            entries[a * dim + b] = value.to_laurent().ok_or_else(|| FormError::NotLaurent {
                entry: describe(unknown(a, b)),
                value: value.to_string(),
            })?;
        }
    }
    Ok(GramMatrix { dim, entries, provenance: Provenance::ContractSolved })
}

/// Norm recursion along strings, cross-multiplied:
/// `(1 - v_i^{-2k-2}) (Z^{k+1}, Z^{k+1}) = (1 - v_i^{-2p+2k}) (Z^k, Z^k)`.
pub fn check_string_norms(rs: &RootSystem, gram: &GramMatrix) -> Result<VerificationReport, FormError> {
    if gram.provenance() != Provenance::ContractSolved {
        return Err(FormError::WrongProvenance);
    }
    let d = rs.datum();
    let basis = Basis::new(rs);
    let mut check = CheckResult::new("string_norm_recursion", d.name());
    for i in d.nodes() {
        let di = d.v_exponent(i) as i32;
        for start in 0..rs.len() {
            let p = rs.p(i, start) as i32;
            if rs.q(i, start) != 0 || p == 0 {
                continue;
            }
            let norm = |k: i32| {
                let pos = basis.root_position(rs.shifted(start, i, k as i64).unwrap());
                gram.entry(pos, pos).clone()
            };
            for k in 0..p {
                let lhs = (LaurentPoly::one() - LaurentPoly::v_pow(di * (-2 * k - 2))) * norm(k + 1);
                let rhs = (LaurentPoly::one() - LaurentPoly::v_pow(di * (-2 * p + 2 * k))) * norm(k);
                check.check(lhs == rhs, || Failure {
                    instance: format!("i={} alpha={} k={k}", i + 1, rs.root(start)),
                    location: format!("p={p}"),
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                });
            }
        }
    }
    Ok(VerificationReport::from_checks(vec![check]))
}

/// Closed form against the solved system, plus structural properties and
/// both adjunctions evaluated with the closed-form matrix.
pub fn check_form(rs: &RootSystem) -> VerificationReport {
    let d = rs.datum();
    let scope = d.name();
    let basis = Basis::new(rs);
    let dim = basis.dim();
    let closed = gram_closed_form(rs);

    let mut agreement = CheckResult::new("form_oracle_agreement", scope);
    match gram_from_contract(rs) {
        Ok(solved) => {
            let diffs = solved.differences(&closed);
            agreement.instances_checked = (dim * dim) as u64;
            agreement.failure_count = diffs.len() as u64;
            agreement.failures = diffs
                .into_iter()
                .take(MAX_WITNESSES)
                .map(|(a, b)| Failure {
                    instance: "contract vs closed form".into(),
                    location: format!("({}, {})", basis.label(a), basis.label(b)),
                    lhs: solved.entry(a, b).to_string(),
                    rhs: closed.entry(a, b).to_string(),
                })
                .collect();
        }
        Err(err) => agreement.record(Some(Failure {
            instance: "solve contract system".into(),
            location: "-".into(),
            lhs: err.to_string(),
            rhs: "unique solution in Z[v, v^-1]".into(),
        })),
    }

    let mut structure = CheckResult::new("form_symmetric_weight_orthogonal", scope);
    let mut almost = CheckResult::new("form_almost_orthonormal", scope);
    for a in 0..dim {
        for b in 0..dim {
            let g = closed.entry(a, b);
            let ok = g == closed.entry(b, a) && (basis.weight(a) == basis.weight(b) || g.is_zero());
            structure.check(ok, || Failure {
                instance: "symmetry and weight orthogonality".into(),
                location: format!("({}, {})", basis.label(a), basis.label(b)),
                lhs: g.to_string(),
                rhs: closed.entry(b, a).to_string(),
            });
            if basis.weight(a) != basis.weight(b) {
                continue;
            }
            let ok = if a == b {
                (g - &LaurentPoly::one()).max_exp_at_most(-1)
            } else {
                g.max_exp_at_most(-1)
            };
            almost.check(ok, || Failure {
                instance: if a == b { "diagonal in 1 + v^-1 Z[v^-1]" } else { "off-diagonal in v^-1 Z[v^-1]" }
                    .into(),
                location: format!("({}, {})", basis.label(a), basis.label(b)),
                lhs: g.to_string(),
                rhs: "-".into(),
            });
        }
    }

    let mut adj_e = CheckResult::new("form_adjunction_e", scope);
    let mut adj_f = CheckResult::new("form_adjunction_f", scope);
    let unit = |idx: usize| {
        let mut v = vec![LaurentPoly::zero(); dim];
        v[idx] = LaurentPoly::one();
        v
    };
    for i in d.nodes() {
        let di = d.v_exponent(i) as i64;
        let e = build_e(rs, i);
        let f = build_f(rs, i);
        let twist = |sign: i64| {
            let mut k = build_k_node(rs, i, sign * di);
            for b in 0..dim {
                let scaled = k.entry(b, b).shift(di as i32);
                k.set(b, b, scaled);
            }
            k
        };
        let e_adjoint = twist(1).compose(&f);
        let f_adjoint = twist(-1).compose(&e);
        for (out, x_op, y_op, name) in
            [(&mut adj_e, &e, &e_adjoint, "E"), (&mut adj_f, &f, &f_adjoint, "F")]
        {
            for a in 0..dim {
                let xa = x_op.apply(&unit(a)).unwrap();
                for b in 0..dim {
                    let yb = y_op.apply(&unit(b)).unwrap();
                    let lhs = closed.pair(&xa, &unit(b));
                    let rhs = closed.pair(&unit(a), &yb);
                    out.check(lhs == rhs, || Failure {
                        instance: format!("{name}_{}", i + 1),
                        location: format!("({}, {})", basis.label(a), basis.label(b)),
                        lhs: lhs.to_string(),
                        rhs: rhs.to_string(),
                    });
                }
            }
        }
    }

    VerificationReport::from_checks(vec![agreement, structure, almost, adj_e, adj_f])
}

/// Runs one suite (or all of them) for a root system.
pub fn run_suite(rs: &RootSystem, suite: Suite) -> VerificationReport {
    let gens = Generators::build(rs);
    let mut report = VerificationReport::default();
    let want = |s: Suite| suite == Suite::All || suite == s;
    if want(Suite::Relations) {
        report.merge(check_relations_with(rs, &gens));
        report.merge(check_operator_properties(rs, &gens));
    }
    if want(Suite::Form) {
        report.merge(check_form(rs));
    }
    if want(Suite::Strings) {
        report.merge(check_string_identities(rs, &gens));
        match gram_from_contract(rs).and_then(|g| check_string_norms(rs, &g)) {
            Ok(r) => report.merge(r),
            Err(err) => {
                let mut c = CheckResult::new("string_norm_recursion", rs.datum().name());
                c.record(Some(Failure {
                    instance: "solve contract system".into(),
                    location: "-".into(),
                    lhs: err.to_string(),
                    rhs: "unique solution".into(),
                }));
                report.merge(VerificationReport::from_checks(vec![c]));
            }
        }
    }
    if want(Suite::Bar) {
        report.merge(check_bar_compatibility_with(rs, &gens));
    }
    report
}
