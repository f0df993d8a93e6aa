//! Spectral properties of deformed Laplacians of trees as executable checks,
//! plus tree generators and a parallel sweep.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dense::{dense_adjacency, DEFAULT_ORACLE_CAP};
use crate::diagonalize::{count_eigenvalues, default_radius_bracket, RadiusBisector};
use crate::error::{Error, Result};
use crate::scalar::{PrecisionContext, Scalar};
use crate::tree::{caterpillar_to_tree, Caterpillar, Tree};

/// Largest order accepted for exhaustive enumeration.
pub const EXHAUSTIVE_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyId {
    /// `0` is an eigenvalue iff `s = ±1`.
    ZeroEigenvalue,
    /// Positive definite iff `|s| < 1`.
    PositiveDefinite,
    /// `rho > 1`.
    RadiusAboveOne,
    /// A pendant path on two vertices forces `rho > 1 + s^2`.
    PendantPath,
    /// Deleting any leaf strictly lowers the radius.
    LeafDeletion,
    /// `rho > (1+|s|)^2` when `Delta >= 4`; `rho > 1 + sqrt(3)|s| + s^2` when `Delta = 3`.
    MaxDegree,
    /// Starlike trees with `k` arms: `rho <= 1 + s^2(Delta-1) + |s| k/sqrt(k-1)`.
    StarlikeUpper,
    /// For `s <= 0` or `s >= 1`: `rho >= (s^2(Delta-1) + 2 + |s| sqrt(s^2(Delta-1)^2 + 4 Delta))/2`,
    /// with equality exactly for stars.
    StarLowerBound,
    /// `rho <= 1 + s^2(Delta-1) + |s| rho(A)`.
    AdjacencyUpperBound,
    /// `Delta >= 3` and `|s| > 1`: `s` is adapted to every `lambda >= rho`.
    SuperLaplacianAdapted,
    /// `Delta >= 4` and `0 < |s| < 1`: `s` is adapted to every `lambda >= rho`.
    SubLaplacianAdapted,
    /// `Delta = 3`, `0 < |s| < 1` and `T_{1,4,4}` inside: `s` is adapted to every `lambda >= rho`.
    Degree3Adapted,
}

impl PropertyId {
    pub const ALL: [PropertyId; 12] = [
        PropertyId::ZeroEigenvalue,
        PropertyId::PositiveDefinite,
        PropertyId::RadiusAboveOne,
        PropertyId::PendantPath,
        PropertyId::LeafDeletion,
        PropertyId::MaxDegree,
        PropertyId::StarlikeUpper,
        PropertyId::StarLowerBound,
        PropertyId::AdjacencyUpperBound,
        PropertyId::SuperLaplacianAdapted,
        PropertyId::SubLaplacianAdapted,
        PropertyId::Degree3Adapted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyId::ZeroEigenvalue => "zero-eigenvalue",
            PropertyId::PositiveDefinite => "positive-definite",
            PropertyId::RadiusAboveOne => "radius-above-one",
            PropertyId::PendantPath => "pendant-path",
            PropertyId::LeafDeletion => "leaf-deletion",
            PropertyId::MaxDegree => "max-degree",
            PropertyId::StarlikeUpper => "starlike-upper",
            PropertyId::StarLowerBound => "star-lower-bound",
            PropertyId::AdjacencyUpperBound => "adjacency-upper-bound",
            PropertyId::SuperLaplacianAdapted => "super-laplacian-adapted",
            PropertyId::SubLaplacianAdapted => "sub-laplacian-adapted",
            PropertyId::Degree3Adapted => "degree3-adapted",
        }
    }

    pub fn parse(text: &str) -> Result<PropertyId> {
        let t = text.trim();
        PropertyId::ALL
            .into_iter()
            .find(|id| id.name() == t)
            .ok_or_else(|| Error::Parse(format!("unknown property {t:?}")))
    }

    /// `all` or a comma-separated list of names.
    pub fn parse_list(text: &str) -> Result<Vec<PropertyId>> {
        if text.trim() == "all" {
            return Ok(PropertyId::ALL.to_vec());
        }
        text.split(',').map(PropertyId::parse).collect()
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Named values (as decimal strings) that break the claim.
    pub values: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Outcome {
    Holds,
    Violated(Witness),
    NotApplicable { reason: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub property: PropertyId,
    pub vertices: usize,
    /// Edge list `u-v u-v ...`.
    pub tree: String,
    pub s: String,
    pub outcome: Outcome,
}

impl PropertyReport {
    /// `None` when the property does not apply.
    pub fn holds(&self) -> Option<bool> {
        match self.outcome {
            Outcome::Holds => Some(true),
            Outcome::Violated(_) => Some(false),
            Outcome::NotApplicable { .. } => None,
        }
    }
}

pub fn edge_string(t: &Tree) -> String {
    let edges = t.edges();
    if edges.is_empty() {
        return "K1".to_string();
    }
    edges
        .iter()
        .map(|(a, b)| format!("{}-{}", a.min(b), a.max(b)))
        .collect::<Vec<_>>()
        .join(" ")
}

const SHOW_DIGITS: usize = 20;

fn show(x: &Scalar) -> String {
    x.to_sig_string(SHOW_DIGITS)
}

fn na(reason: &str) -> Outcome {
    Outcome::NotApplicable {
        reason: reason.to_string(),
    }
}

/// Largest eigenvalue of `M_T(s)`, bisected until the bracket is at most
/// `tol / 10` wide.
fn radius(t: &Tree, s: &Scalar, tol: &Scalar) -> Result<Scalar> {
    if t.vertex_count() == 1 {
        return Ok(1i64 - s.square());
    }
    let (a, b) = default_radius_bracket(t, s);
    let mut bisector = RadiusBisector::new(t, s, &a, &b)?;
    let target = tol / 10i64;
    let max_steps = s.prec() + 64;
    while bisector.state().width() > target {
        if bisector.state().iterations >= max_steps {
            return Err(Error::Precision {
                needed: s.digits() * 2,
            });
        }
        bisector.step();
    }
    Ok(bisector.finish().estimate())
}

/// One `(tree, s)` pair with its radius computed on first use.
struct Case<'a> {
    tree: &'a Tree,
    s: &'a Scalar,
    tol: &'a Scalar,
    rho: Option<Scalar>,
}

impl<'a> Case<'a> {
    fn new(tree: &'a Tree, s: &'a Scalar, tol: &'a Scalar) -> Self {
        Case { tree, s, tol, rho: None }
    }

    fn rho(&mut self) -> Result<Scalar> {
        if self.rho.is_none() {
            self.rho = Some(radius(self.tree, self.s, self.tol)?);
        }
        Ok(self.rho.clone().expect("just set"))
    }

    /// Holds when `rho - bound > tol`.
    fn strictly_above(&mut self, bound: &Scalar, label: &str) -> Result<Outcome> {
        let rho = self.rho()?;
        if &rho - bound > *self.tol {
            Ok(Outcome::Holds)
        } else {
            Ok(Outcome::Violated(Witness {
                values: vec![
                    ("rho".into(), show(&rho)),
                    (label.into(), show(bound)),
                    ("tol".into(), show(self.tol)),
                ],
            }))
        }
    }

    /// Holds when `rho <= bound + slack`.
    fn at_most(&mut self, bound: &Scalar, slack: &Scalar, label: &str) -> Result<Outcome> {
        let rho = self.rho()?;
        if rho <= bound + slack {
            Ok(Outcome::Holds)
        } else {
            Ok(Outcome::Violated(Witness {
                values: vec![
                    ("rho".into(), show(&rho)),
                    (label.into(), show(bound)),
                    ("tol".into(), show(slack)),
                ],
            }))
        }
    }

    fn check(&mut self, id: PropertyId) -> Result<Outcome> {
        let t = self.tree;
        let s = self.s;
        let n = t.vertex_count();
        let abs = s.abs();
        let s2 = s.square();
        let delta = t.max_degree() as i64;
        let one_plus_abs_sq = (&abs + 1i64).square();
        let needs_tree = n < 2;
        match id {
            PropertyId::ZeroEigenvalue => {
                if needs_tree {
                    return Ok(na("single vertex"));
                }
                let counts = count_eigenvalues(t, s, &s.int_like(0));
                let unit = abs == 1;
                if (counts.equal > 0) == unit {
                    Ok(Outcome::Holds)
                } else {
                    Ok(Outcome::Violated(Witness {
                        values: vec![("zero_multiplicity".into(), counts.equal.to_string())],
                    }))
                }
            }
            PropertyId::PositiveDefinite => {
                if needs_tree {
                    return Ok(na("single vertex"));
                }
                let counts = count_eigenvalues(t, s, &s.int_like(0));
                let pd = counts.smaller == 0 && counts.equal == 0;
                if pd == (abs < 1) {
                    Ok(Outcome::Holds)
                } else {
                    Ok(Outcome::Violated(Witness {
                        values: vec![
                            ("nonpositive".into(), (counts.smaller + counts.equal).to_string()),
                        ],
                    }))
                }
            }
            PropertyId::RadiusAboveOne => {
                if needs_tree {
                    return Ok(na("single vertex"));
                }
                if s.is_zero() {
                    return Ok(na("s = 0 gives the identity"));
                }
                self.strictly_above(&s.int_like(1), "bound")
            }
            PropertyId::PendantPath => {
                if !t.has_pendant_p2() {
                    return Ok(na("no pendant path on two vertices"));
                }
                if s.is_zero() {
                    return Ok(na("s = 0 gives the identity"));
                }
                self.strictly_above(&(&s2 + 1i64), "bound")
            }
            PropertyId::LeafDeletion => {
                if needs_tree {
                    return Ok(na("single vertex"));
                }
                if s.is_zero() {
                    return Ok(na("s = 0 gives the identity"));
                }
                let rho = self.rho()?;
                for leaf in t.leaves() {
                    let sub = t.remove_leaf(leaf)?;
                    let sub_rho = radius(&sub, s, self.tol)?;
                    if &rho - &sub_rho <= *self.tol {
                        return Ok(Outcome::Violated(Witness {
                            values: vec![
                                ("leaf".into(), leaf.to_string()),
                                ("rho".into(), show(&rho)),
                                ("rho_without_leaf".into(), show(&sub_rho)),
                            ],
                        }));
                    }
                }
                Ok(Outcome::Holds)
            }
            PropertyId::MaxDegree => {
                if s.is_zero() {
                    return Ok(na("s = 0 gives the identity"));
                }
                if delta >= 4 {
                    self.strictly_above(&one_plus_abs_sq, "bound")
                } else if delta == 3 {
                    let bound = &abs * s.int_like(3).sqrt()? + &s2 + 1i64;
                    self.strictly_above(&bound, "bound")
                } else {
                    Ok(na("maximum degree below 3"))
                }
            }
            PropertyId::StarlikeUpper => {
                let Some(k) = t.starlike_arms() else {
                    return Ok(na("not starlike"));
                };
                let k = k as i64;
                let bound = &s2 * (delta - 1) + 1i64 + &abs * k / s.int_like(k - 1).sqrt()?;
                self.at_most(&bound, self.tol, "bound")
            }
            PropertyId::StarLowerBound => {
                if needs_tree {
                    return Ok(na("single vertex"));
                }
                if s.is_zero() {
                    return Ok(na("s = 0 gives equality for every tree"));
                }
                if s.is_positive() && s < &s.int_like(1) {
                    return Ok(na("s in (0, 1)"));
                }
                let inner = (&s2 * (delta - 1).pow(2) + 4 * delta).sqrt()?;
                let bound = (&s2 * (delta - 1) + 2i64 + &abs * inner) / 2i64;
                if t.is_star() {
                    let rho = self.rho()?;
                    if (&rho - &bound).abs() <= *self.tol {
                        Ok(Outcome::Holds)
                    } else {
                        Ok(Outcome::Violated(Witness {
                            values: vec![
                                ("rho".into(), show(&rho)),
                                ("star_value".into(), show(&bound)),
                            ],
                        }))
                    }
                } else {
                    self.strictly_above(&bound, "bound")
                }
            }
            PropertyId::AdjacencyUpperBound => {
                if n > DEFAULT_ORACLE_CAP {
                    return Ok(na("too large for the dense oracle"));
                }
                let ctx = PrecisionContext::new(s.digits())?;
                let eigs = dense_adjacency(t, &ctx, DEFAULT_ORACLE_CAP)?.eigenvalues();
                let rho_a = eigs.last().cloned().unwrap_or_else(|| ctx.zero());
                let bound = &s2 * (delta - 1) + 1i64 + &abs * &rho_a;
                let slack = self.tol + ctx.pow10(10 - s.digits() as i32);
                self.at_most(&bound, &slack, "bound")
            }
            PropertyId::SuperLaplacianAdapted => {
                if delta < 3 || abs <= 1 {
                    return Ok(na("needs Delta >= 3 and |s| > 1"));
                }
                self.strictly_above(&one_plus_abs_sq, "adapted_threshold")
            }
            PropertyId::SubLaplacianAdapted => {
                if delta < 4 || s.is_zero() || abs >= 1 {
                    return Ok(na("needs Delta >= 4 and 0 < |s| < 1"));
                }
                self.strictly_above(&one_plus_abs_sq, "adapted_threshold")
            }
            PropertyId::Degree3Adapted => {
                if delta != 3 || s.is_zero() || abs >= 1 || !t.contains_t1nn(4) {
                    return Ok(na("needs Delta = 3, 0 < |s| < 1 and a T_{1,4,4} subtree"));
                }
                self.strictly_above(&one_plus_abs_sq, "adapted_threshold")
            }
        }
    }
}

fn report(id: PropertyId, t: &Tree, s: &Scalar, outcome: Outcome) -> PropertyReport {
    PropertyReport {
        property: id,
        vertices: t.vertex_count(),
        tree: edge_string(t),
        s: s.to_sig_string(SHOW_DIGITS),
        outcome,
    }
}

/// Checks one property. Strict inequalities need a margin above `tol`;
/// equalities and upper bounds allow `tol`. Radii are bisected to `tol / 10`.
pub fn check_property(id: PropertyId, t: &Tree, s: &Scalar, tol: &Scalar) -> Result<PropertyReport> {
    let outcome = Case::new(t, s, tol).check(id)?;
    Ok(report(id, t, s, outcome))
}

/// `10` times a bisection width of `10^-(digits - 8)`.
pub fn default_tolerance(ctx: &PrecisionContext) -> Scalar {
    ctx.pow10(8 - ctx.digits() as i32) * 10i64
}

/// Trees to sweep over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeSource {
    /// Every free tree with `1..=max_n` vertices.
    Exhaustive { max_n: usize },
    /// Uniform labelled trees from Prüfer sequences, `2..=max_n` vertices.
    Random { count: usize, max_n: usize, seed: u64 },
    /// Caterpillars with `2..=max_k` back nodes and up to `max_leaves` leaves each.
    Caterpillars {
        count: usize,
        max_k: usize,
        max_leaves: u64,
        seed: u64,
    },
}

impl TreeSource {
    pub fn generate(&self) -> Result<Vec<Tree>> {
        match *self {
            TreeSource::Exhaustive { max_n } => {
                let mut out = Vec::new();
                for n in 1..=max_n {
                    out.extend(free_trees(n)?);
                }
                Ok(out)
            }
            TreeSource::Random { count, max_n, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count)
                    .map(|_| {
                        let n = rng.gen_range(2..=max_n.max(2));
                        random_tree(n, &mut rng)
                    })
                    .collect()
            }
            TreeSource::Caterpillars {
                count,
                max_k,
                max_leaves,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count)
                    .map(|_| {
                        let k = rng.gen_range(2..=max_k.max(2));
                        let counts = (0..k).map(|_| rng.gen_range(0..=max_leaves)).collect();
                        caterpillar_to_tree(&Caterpillar::new(counts)?)
                    })
                    .collect()
            }
        }
    }
}

/// Uniform labelled tree on `n >= 2` vertices decoded from a random Prüfer
/// sequence.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Result<Tree> {
    if n < 2 {
        return Err(Error::Domain("random trees need at least two vertices".into()));
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in &code {
        let leaf = leaves.pop_first().expect("a Prüfer step always has a leaf");
        edges.push((leaf, c));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.insert(c);
        }
    }
    let last: Vec<usize> = leaves.into_iter().collect();
    edges.push((last[0], last[1]));
    Tree::from_edges(n, &edges, 0)
}

/// Rooted trees on `n` vertices as level sequences, in the successor order
/// of Beyer and Hedetniemi.
fn rooted_level_sequences(n: usize) -> Vec<Vec<usize>> {
    let mut levels: Vec<usize> = (0..n).collect();
    let mut out = vec![levels.clone()];
    loop {
        let Some(p) = levels.iter().rposition(|&l| l > 1) else {
            break;
        };
        let q = levels[..p]
            .iter()
            .rposition(|&l| l == levels[p] - 1)
            .expect("a parent level precedes every vertex");
        for i in p..n {
            levels[i] = levels[i - (p - q)];
        }
        out.push(levels.clone());
    }
    out
}

fn parents_from_levels(levels: &[usize]) -> Vec<Option<usize>> {
    let mut parents = vec![None; levels.len()];
    for i in 1..levels.len() {
        parents[i] = (0..i).rev().find(|&j| levels[j] + 1 == levels[i]);
    }
    parents
}

fn centers(t: &Tree) -> Vec<usize> {
    let n = t.vertex_count();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree = t.degrees().to_vec();
    let mut layer = t.leaves();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for u in t.neighbors(v) {
                degree[u] -= 1;
                if degree[u] == 1 {
                    next.push(u);
                }
            }
        }
        layer = next;
    }
    layer
}

/// Parenthesis encoding of the subtree at `v`, children sorted.
fn rooted_code(t: &Tree, v: usize, from: Option<usize>) -> String {
    let mut parts: Vec<String> = t
        .neighbors(v)
        .filter(|&u| Some(u) != from)
        .map(|u| rooted_code(t, u, Some(v)))
        .collect();
    parts.sort();
    format!("({})", parts.concat())
}

/// Isomorphism-invariant code of a free tree.
pub fn canonical_code(t: &Tree) -> String {
    centers(t)
        .into_iter()
        .map(|c| rooted_code(t, c, None))
        .min()
        .unwrap_or_default()
}

/// One representative of every free tree on `n` vertices.
pub fn free_trees(n: usize) -> Result<Vec<Tree>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if n > EXHAUSTIVE_CAP {
        return Err(Error::TooLarge {
            n,
            cap: EXHAUSTIVE_CAP,
        });
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for levels in rooted_level_sequences(n) {
        let t = Tree::from_parents(&parents_from_levels(&levels))?;
        if seen.insert(canonical_code(&t)) {
            out.push(t);
        }
    }
    Ok(out)
}

/// Per-property tallies; not-applicable results count neither way.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub property: Option<PropertyId>,
    pub holds: usize,
    pub violated: usize,
    pub not_applicable: usize,
}

pub fn summarize(reports: &[PropertyReport], ids: &[PropertyId]) -> Vec<SweepSummary> {
    ids.iter()
        .map(|&id| {
            let mut sum = SweepSummary {
                property: Some(id),
                ..SweepSummary::default()
            };
            for r in reports.iter().filter(|r| r.property == id) {
                match r.holds() {
                    Some(true) => sum.holds += 1,
                    Some(false) => sum.violated += 1,
                    None => sum.not_applicable += 1,
                }
            }
            sum
        })
        .collect()
}

/// Checks every property on every `(tree, s)` pair in parallel; reports come
/// back ordered by tree, then `s`, then property.
pub fn sweep(ids: &[PropertyId], trees: &[Tree], s_grid: &[Scalar], tol: &Scalar) -> Result<Vec<PropertyReport>> {
    sweep_with(ids, trees, s_grid, tol, |id, t, s, tol| check_property(id, t, s, tol))
}

/// [`sweep`] with a substitute check, used to exercise the harness itself.
pub fn sweep_with<F>(
    ids: &[PropertyId],
    trees: &[Tree],
    s_grid: &[Scalar],
    tol: &Scalar,
    check: F,
) -> Result<Vec<PropertyReport>>
where
    F: Fn(PropertyId, &Tree, &Scalar, &Scalar) -> Result<PropertyReport> + Sync,
{
    let pairs: Vec<(&Tree, &Scalar)> = trees
        .iter()
        .flat_map(|t| s_grid.iter().map(move |s| (t, s)))
        .collect();
    let nested: Vec<Result<Vec<PropertyReport>>> = pairs
        .par_iter()
        .map(|(t, s)| ids.iter().map(|&id| check(id, t, s, tol)).collect())
        .collect();
    let mut out = Vec::new();
    for chunk in nested {
        out.extend(chunk?);
    }
    Ok(out)
}

/// Sweep that shares each radius across all properties of a `(tree, s)` pair.
pub fn sweep_shared(ids: &[PropertyId], trees: &[Tree], s_grid: &[Scalar], tol: &Scalar) -> Result<Vec<PropertyReport>> {
    let pairs: Vec<(&Tree, &Scalar)> = trees
        .iter()
        .flat_map(|t| s_grid.iter().map(move |s| (t, s)))
        .collect();
    let nested: Vec<Result<Vec<PropertyReport>>> = pairs
        .par_iter()
        .map(|(t, s)| {
            let mut case = Case::new(t, s, tol);
            ids.iter()
                .map(|&id| Ok(report(id, t, s, case.check(id)?)))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for chunk in nested {
        out.extend(chunk?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::starlike_t1nn;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(50).unwrap()
    }

    #[test]
    fn free_tree_counts() {
        let expected = [1, 1, 1, 2, 3, 6, 11, 23, 47, 106];
        for (n, &e) in (1..=10).zip(expected.iter()) {
            assert_eq!(free_trees(n).unwrap().len(), e, "n = {n}");
        }
    }

    #[test]
    fn canonical_code_ignores_labels() {
        let a = Tree::from_edges(4, &[(0, 1), (1, 2), (2, 3)], 0).unwrap();
        let b = Tree::from_edges(4, &[(2, 0), (0, 3), (3, 1)], 1).unwrap();
        assert_eq!(canonical_code(&a), canonical_code(&b));
        assert_ne!(canonical_code(&a), canonical_code(&Tree::star(3)));
    }

    #[test]
    fn random_trees_are_deterministic() {
        let src = TreeSource::Random {
            count: 20,
            max_n: 12,
            seed: 7,
        };
        let a: Vec<String> = src.generate().unwrap().iter().map(edge_string).collect();
        let b: Vec<String> = src.generate().unwrap().iter().map(edge_string).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_eigenvalue_on_p3() {
        let c = ctx();
        let tol = default_tolerance(&c);
        let p3 = Tree::path(3).unwrap();
        let at_one = check_property(PropertyId::ZeroEigenvalue, &p3, &c.one(), &tol).unwrap();
        assert_eq!(at_one.holds(), Some(true));
        let counts = count_eigenvalues(&p3, &c.one(), &c.zero());
        assert_eq!(counts.equal, 1);
        let counts = count_eigenvalues(&p3, &c.parse("0.9").unwrap(), &c.zero());
        assert_eq!(counts.equal, 0);
    }

    #[test]
    fn star_equality_case() {
        let c = ctx();
        let tol = default_tolerance(&c);
        let r = check_property(PropertyId::StarLowerBound, &Tree::star(4), &c.parse("-0.7").unwrap(), &tol).unwrap();
        assert_eq!(r.outcome, Outcome::Holds);
        let not_star = starlike_t1nn(2).unwrap();
        let r = check_property(PropertyId::StarLowerBound, &not_star, &c.parse("-0.7").unwrap(), &tol).unwrap();
        assert_eq!(r.outcome, Outcome::Holds);
        let r = check_property(PropertyId::StarLowerBound, &not_star, &c.parse("0.5").unwrap(), &tol).unwrap();
        assert_eq!(r.holds(), None);
    }

    #[test]
    fn degree_four_bound() {
        let c = ctx();
        let tol = default_tolerance(&c);
        let r = check_property(PropertyId::MaxDegree, &Tree::star(4), &c.parse("0.5").unwrap(), &tol).unwrap();
        assert_eq!(r.outcome, Outcome::Holds);
        let r = check_property(PropertyId::PendantPath, &Tree::star(4), &c.parse("0.5").unwrap(), &tol).unwrap();
        assert_eq!(r.holds(), None);
    }

    #[test]
    fn degree3_adapted_on_t144() {
        let c = ctx();
        let tol = default_tolerance(&c);
        let t = starlike_t1nn(4).unwrap();
        for s in ["0.1", "-0.6", "0.95"] {
            let r = check_property(PropertyId::Degree3Adapted, &t, &c.parse(s).unwrap(), &tol).unwrap();
            assert_eq!(r.outcome, Outcome::Holds, "s = {s}");
        }
    }

    #[test]
    fn small_exhaustive_sweep() {
        let c = ctx();
        let tol = default_tolerance(&c);
        let trees = TreeSource::Exhaustive { max_n: 6 }.generate().unwrap();
        let grid: Vec<Scalar> = ["0.3", "0.5", "1.5", "-1"].iter().map(|s| c.parse(s).unwrap()).collect();
        let reports = sweep_shared(&PropertyId::ALL, &trees, &grid, &tol).unwrap();
        let bad: Vec<_> = reports.iter().filter(|r| r.holds() == Some(false)).collect();
        assert!(bad.is_empty(), "{bad:?}");
    }

    #[test]
    fn harness_detects_injected_violation() {
        let c = ctx();
        let tol = default_tolerance(&c);
        let trees = TreeSource::Exhaustive { max_n: 5 }.generate().unwrap();
        let grid = vec![c.parse("0.5").unwrap()];
        let target = canonical_code(&Tree::star(4));
        let reports = sweep_with(&[PropertyId::RadiusAboveOne], &trees, &grid, &tol, |id, t, s, tol| {
            if canonical_code(t) == target {
                // claim rho > rho + 1 on one tree
                let mut case = Case::new(t, s, tol);
                let rho = case.rho()?;
                let outcome = case.strictly_above(&(rho + 1i64), "bound")?;
                return Ok(report(id, t, s, outcome));
            }
            check_property(id, t, s, tol)
        })
        .unwrap();
        let bad: Vec<_> = reports.iter().filter(|r| r.holds() == Some(false)).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].vertices, 5);
        match &bad[0].outcome {
            Outcome::Violated(w) => assert!(w.values.iter().any(|(k, _)| k == "rho")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn leaf_deletion_on_random_caterpillars() {
        let c = ctx();
        let tol = default_tolerance(&c);
        let trees = TreeSource::Caterpillars {
            count: 15,
            max_k: 6,
            max_leaves: 3,
            seed: 3,
        }
        .generate()
        .unwrap();
        let grid: Vec<Scalar> = ["0.4", "-1.3"].iter().map(|s| c.parse(s).unwrap()).collect();
        let reports = sweep(&[PropertyId::LeafDeletion], &trees, &grid, &tol).unwrap();
        assert!(reports.iter().all(|r| r.holds() != Some(false)));
    }

    #[test]
    fn property_names_round_trip() {
        for id in PropertyId::ALL {
            assert_eq!(PropertyId::parse(id.name()).unwrap(), id);
        }
        assert_eq!(PropertyId::parse_list("all").unwrap().len(), 12);
        assert!(PropertyId::parse("P2.5-1").is_err());
    }
}
