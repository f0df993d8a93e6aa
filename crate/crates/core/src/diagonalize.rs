//! Eigenvalue location on trees by congruence diagonalization, and spectral
//! radius bisection built on it.
//!
//! Diagonalizing `M + xI` bottom-up along a tree yields a diagonal matrix
//! congruent to it, so by Sylvester's law of inertia the signs of the
//! diagonal count the eigenvalues of `M` above, below and at `-x`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tree::{Caterpillar, Tree};

/// Signs of a diagonal: how many entries are positive, negative and zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Inertia {
    pub positive: u64,
    pub negative: u64,
    pub zero: u64,
}

impl Inertia {
    fn record(&mut self, value: &Scalar, multiplicity: u64) {
        if value.is_positive() {
            self.positive += multiplicity;
        } else if value.is_negative() {
            self.negative += multiplicity;
        } else {
            self.zero += multiplicity;
        }
    }

    pub fn total(&self) -> u64 {
        self.positive + self.negative + self.zero
    }
}

/// Eigenvalue counts relative to a probe point `c`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EigenCounts {
    pub greater: u64,
    pub smaller: u64,
    pub equal: u64,
}

impl From<Inertia> for EigenCounts {
    fn from(i: Inertia) -> Self {
        EigenCounts {
            greater: i.positive,
            smaller: i.negative,
            equal: i.zero,
        }
    }
}

/// Diagonal produced by the diagonalization, one entry per vertex.
#[derive(Debug, Clone)]
pub struct DiagOutcome {
    pub outputs: Vec<Scalar>,
    pub inertia: Inertia,
}

/// Diagonalizes `M_T(s) + xI` following the tree's bottom-up order.
///
/// A vertex whose children all have nonzero values absorbs `s^2 / d_c` from
/// each child. When some child `j` has value zero, the vertex becomes
/// `-s^2/2`, `j` becomes 2, and the edge from the vertex to its own parent is
/// removed. At `s = 0` the matrix is the identity and no elimination happens.
pub fn diagonalize_tree(t: &Tree, s: &Scalar, x: &Scalar) -> DiagOutcome {
    let n = t.vertex_count();
    let s2 = s.square();
    let mut d: Vec<Scalar> = (0..n)
        .map(|v| &s2 * (t.degree(v) as i64 - 1) + 1i64 + x)
        .collect();
    if !s.is_zero() {
        let mut cut = vec![false; n];
        for &v in t.order() {
            let kids: Vec<usize> = t.children(v).iter().copied().filter(|&c| !cut[c]).collect();
            if kids.is_empty() {
                continue;
            }
            if let Some(&j) = kids.iter().find(|&&c| d[c].is_zero()) {
                d[v] = -(&s2 / 2i64);
                d[j] = s.int_like(2);
                if t.parent(v).is_some() {
                    cut[v] = true;
                }
            } else {
                let absorbed = kids
                    .iter()
                    .fold(s.int_like(0), |acc, &c| acc + &s2 / &d[c]);
                d[v] = &d[v] - absorbed;
            }
        }
    }
    let mut inertia = Inertia::default();
    for value in &d {
        inertia.record(value, 1);
    }
    DiagOutcome { outputs: d, inertia }
}

/// Exact counts of eigenvalues of `M_T(s)` greater than, smaller than and
/// equal to `c`.
pub fn count_eigenvalues(t: &Tree, s: &Scalar, c: &Scalar) -> EigenCounts {
    diagonalize_tree(t, s, &-c).inertia.into()
}

/// Back-node outputs `b_1..b_k` of the diagonalization of a caterpillar at
/// `x = -lambda`, in closed form:
///
/// `b_1 = 1 - lambda + r_1 delta`, `b_j = phi(b_{j-1}) + r_j delta`, and
/// `b_k = -s^2 + phi(b_{k-1}) + r_k delta`, with `delta = s^2 lambda /
/// (lambda - 1)` and `phi(t) = 1 + s^2 - lambda - s^2 / t`.
pub fn caterpillar_outputs(c: &Caterpillar, s: &Scalar, lambda: &Scalar) -> Result<Vec<Scalar>> {
    s.same_precision(lambda)?;
    let lm1 = lambda - 1i64;
    if lm1.is_zero() {
        return Err(Error::Pole("delta is undefined at lambda = 1"));
    }
    let s2 = s.square();
    let delta = &s2 * lambda / &lm1;
    let alpha = &s2 + 1i64 - lambda;
    let k = c.k();
    let mut b = Vec::with_capacity(k);
    b.push(-&lm1 + &delta * c.counts()[0]);
    for j in 1..k {
        let prev = &b[j - 1];
        if prev.is_zero() {
            return Err(Error::ZeroChild { index: j - 1 });
        }
        let phi = &alpha - &s2 / prev;
        let mut value = phi + &delta * c.counts()[j];
        if j == k - 1 {
            value = value - &s2;
        }
        b.push(value);
    }
    Ok(b)
}

/// Full diagonalization of a caterpillar in `O(k)`: the `r_j` leaves of a
/// back node share one value and are never materialized.
#[derive(Debug, Clone)]
pub struct CaterpillarDiag {
    /// Final value at each back node.
    pub back: Vec<Scalar>,
    /// Value shared by every leaf not reset by a zero-child step.
    pub leaf_value: Scalar,
    /// Leaves set to 2 by zero-child steps.
    pub leaves_reset: u64,
    pub inertia: Inertia,
}

pub fn diagonalize_caterpillar(c: &Caterpillar, s: &Scalar, x: &Scalar) -> CaterpillarDiag {
    let k = c.k();
    let s2 = s.square();
    let leaf = x + 1i64;
    let mut back: Vec<Scalar> = Vec::with_capacity(k);
    let mut leaves_reset = 0u64;
    let mut prev_cut = false;
    for j in 0..k {
        let r = c.counts()[j];
        let mut d = &s2 * (c.back_degree(j) as i64 - 1) + 1i64 + x;
        let prev_attached = j > 0 && !prev_cut;
        let mut cut = false;
        if !s.is_zero() && (r > 0 || prev_attached) {
            let leaf_zero = r > 0 && leaf.is_zero();
            let prev_zero = prev_attached && back[j - 1].is_zero();
            if leaf_zero || prev_zero {
                d = -(&s2 / 2i64);
                if leaf_zero {
                    leaves_reset += 1;
                } else {
                    back[j - 1] = s.int_like(2);
                }
                cut = j + 1 < k;
            } else {
                if r > 0 {
                    d = d - &s2 * r / &leaf;
                }
                if prev_attached {
                    d = d - &s2 / &back[j - 1];
                }
            }
        }
        back.push(d);
        prev_cut = cut;
    }
    let leaves: u64 = c.counts().iter().sum();
    let mut inertia = Inertia::default();
    inertia.record(&leaf, leaves - leaves_reset);
    inertia.positive += leaves_reset;
    for value in &back {
        inertia.record(value, 1);
    }
    CaterpillarDiag {
        back,
        leaf_value: leaf,
        leaves_reset,
        inertia,
    }
}

pub fn count_caterpillar_eigenvalues(c: &Caterpillar, s: &Scalar, point: &Scalar) -> EigenCounts {
    diagonalize_caterpillar(c, s, &-point).inertia.into()
}

/// Result of one bisection probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeOutcome {
    /// Every output was negative: all eigenvalues lie below the probe.
    AllNegative,
    /// The computation stopped at the first nonnegative output, so some
    /// eigenvalue is at least the probe. `exact_zero` marks a zero output.
    Nonnegative { exact_zero: bool },
}

/// Something whose `M(s)` spectrum can be probed against a point.
pub trait RadiusProbe {
    /// Runs the diagonalization at `x = -point`, stopping at the first
    /// nonnegative output.
    fn probe(&self, s: &Scalar, point: &Scalar) -> ProbeOutcome;
    fn counts(&self, s: &Scalar, point: &Scalar) -> EigenCounts;
}

fn nonnegative(value: &Scalar) -> Option<ProbeOutcome> {
    if value.is_negative() {
        None
    } else {
        Some(ProbeOutcome::Nonnegative {
            exact_zero: value.is_zero(),
        })
    }
}

impl RadiusProbe for Tree {
    fn probe(&self, s: &Scalar, point: &Scalar) -> ProbeOutcome {
        let s2 = s.square();
        let mut d: Vec<Option<Scalar>> = vec![None; self.vertex_count()];
        for &v in self.order() {
            let mut value = &s2 * (self.degree(v) as i64 - 1) + 1i64 - point;
            if !s.is_zero() {
                for &c in self.children(v) {
                    let child = d[c].as_ref().expect("children precede parents");
                    value = value - &s2 / child;
                }
            }
            if let Some(outcome) = nonnegative(&value) {
                return outcome;
            }
            d[v] = Some(value);
        }
        ProbeOutcome::AllNegative
    }

    fn counts(&self, s: &Scalar, point: &Scalar) -> EigenCounts {
        count_eigenvalues(self, s, point)
    }
}

impl RadiusProbe for Caterpillar {
    fn probe(&self, s: &Scalar, point: &Scalar) -> ProbeOutcome {
        let s2 = s.square();
        let leaf = 1i64 - point;
        if self.counts().iter().any(|&r| r > 0) {
            if let Some(outcome) = nonnegative(&leaf) {
                return outcome;
            }
        }
        let mut prev: Option<Scalar> = None;
        for (j, &r) in self.counts().iter().enumerate() {
            let mut d = &s2 * (self.back_degree(j) as i64 - 1) + 1i64 - point;
            if !s.is_zero() {
                if r > 0 {
                    d = d - &s2 * r / &leaf;
                }
                if let Some(p) = &prev {
                    d = d - &s2 / p;
                }
            }
            if let Some(outcome) = nonnegative(&d) {
                return outcome;
            }
            prev = Some(d);
        }
        ProbeOutcome::AllNegative
    }

    fn counts(&self, s: &Scalar, point: &Scalar) -> EigenCounts {
        count_caterpillar_eigenvalues(self, s, point)
    }
}

/// Bracket `[low, high]` around the largest eigenvalue.
#[derive(Debug, Clone)]
pub struct RadiusEstimate {
    pub low: Scalar,
    pub high: Scalar,
    pub iterations: u32,
    /// Probes that stopped at a nonnegative output and raised `low`.
    pub early_breaks: u32,
    /// Early breaks whose stopping output was exactly zero: the probe point
    /// was itself an eigenvalue.
    pub exact_hits: u32,
}

impl RadiusEstimate {
    pub fn estimate(&self) -> Scalar {
        Scalar::midpoint(&self.low, &self.high)
    }

    pub fn width(&self) -> Scalar {
        &self.high - &self.low
    }
}

/// Stepwise bisection for the spectral radius; each step halves the bracket.
pub struct RadiusBisector<'a, P: RadiusProbe + ?Sized> {
    target: &'a P,
    s: Scalar,
    state: RadiusEstimate,
}

impl<'a, P: RadiusProbe + ?Sized> RadiusBisector<'a, P> {
    /// Checks that the largest eigenvalue lies in `(a, b]` before any
    /// bisection step.
    pub fn new(target: &'a P, s: &Scalar, a: &Scalar, b: &Scalar) -> Result<Self> {
        s.same_precision(a)?;
        a.same_precision(b)?;
        if a >= b {
            return Err(Error::Domain(format!(
                "radius bracket needs A < B, got [{}, {}]",
                a.to_sig_string(12),
                b.to_sig_string(12)
            )));
        }
        if target.counts(s, b).greater > 0 {
            return Err(Error::InvalidBracket(format!(
                "spectral radius exceeds B = {}",
                b.to_sig_string(15)
            )));
        }
        if target.counts(s, a).greater == 0 {
            return Err(Error::InvalidBracket(format!(
                "spectral radius does not exceed A = {}",
                a.to_sig_string(15)
            )));
        }
        Ok(Self {
            target,
            s: s.clone(),
            state: RadiusEstimate {
                low: a.clone(),
                high: b.clone(),
                iterations: 0,
                early_breaks: 0,
                exact_hits: 0,
            },
        })
    }

    pub fn step(&mut self) {
        let mid = self.state.estimate();
        match self.target.probe(&self.s, &mid) {
            ProbeOutcome::AllNegative => self.state.high = mid,
            ProbeOutcome::Nonnegative { exact_zero } => {
                self.state.low = mid;
                self.state.early_breaks += 1;
                if exact_zero {
                    self.state.exact_hits += 1;
                }
            }
        }
        self.state.iterations += 1;
    }

    pub fn state(&self) -> &RadiusEstimate {
        &self.state
    }

    pub fn finish(self) -> RadiusEstimate {
        self.state
    }
}

/// `N` bisection steps on `[a, b]`; the midpoint of the result is within
/// `(b - a) / 2^N` of the spectral radius.
pub fn approximate_radius<P: RadiusProbe + ?Sized>(
    target: &P,
    s: &Scalar,
    a: &Scalar,
    b: &Scalar,
    iterations: u32,
) -> Result<RadiusEstimate> {
    let mut bisector = RadiusBisector::new(target, s, a, b)?;
    for _ in 0..iterations {
        bisector.step();
    }
    Ok(bisector.finish())
}

/// `ceil(log2((b - a) 10^digits))`, the step count for `digits` decimals.
pub fn iterations_for_target(a: &Scalar, b: &Scalar, digits: u32) -> u32 {
    crate::scalar::iterations_for_digits(&(b - a), digits)
}

/// A bracket valid for any tree: the largest diagonal entry, at least 1,
/// bounds the radius from below (0 is strictly below it), and Gershgorin
/// discs plus one bound it strictly from above.
pub fn default_radius_bracket(t: &Tree, s: &Scalar) -> (Scalar, Scalar) {
    let d = t.max_degree() as i64;
    let s2 = s.square();
    let upper = &s2 * (d - 1).max(0) + s.abs() * d + 2i64;
    (s.int_like(0), upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::PrecisionContext;
    use crate::tree::{caterpillar_to_tree, Tree};

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(50).unwrap()
    }

    #[test]
    fn p2_eigenvalue_hit() {
        let c = ctx();
        let s = c.parse("0.5").unwrap();
        let x = -(&s + 1i64);
        let out = diagonalize_tree(&Tree::path(2).unwrap(), &s, &x);
        let mut vals: Vec<Scalar> = out.outputs.clone();
        vals.sort_by(|a, b| a.total_cmp(b));
        assert_eq!(vals[0], -&s);
        assert!(vals[1].is_zero());
        assert_eq!(out.inertia.zero, 1);
    }

    #[test]
    fn identity_at_zero_s() {
        let c = ctx();
        let t = crate::tree::starlike_t1nn(3).unwrap();
        let out = diagonalize_tree(&t, &c.zero(), &c.int(-1));
        assert!(out.outputs.iter().all(Scalar::is_zero));
        assert_eq!(count_eigenvalues(&t, &c.zero(), &c.one()).equal, 8);
    }

    #[test]
    fn p2_counts() {
        let c = ctx();
        let counts = count_eigenvalues(
            &Tree::path(2).unwrap(),
            &c.parse("0.5").unwrap(),
            &c.parse("1.5").unwrap(),
        );
        assert_eq!(
            counts,
            EigenCounts {
                greater: 0,
                smaller: 1,
                equal: 1
            }
        );
    }

    #[test]
    fn zero_child_branch() {
        // Laplacian of P_3 at c = 1: leaves give 0, so the middle vertex
        // takes the zero-child branch.
        let c = ctx();
        let t = Tree::path(3).unwrap();
        let counts = count_eigenvalues(&t, &c.one(), &c.one());
        assert_eq!(
            counts,
            EigenCounts {
                greater: 1,
                smaller: 1,
                equal: 1
            }
        );
    }

    #[test]
    fn closed_form_matches_tree() {
        let c = ctx();
        let cat = Caterpillar::parse("[3,1,4]").unwrap();
        let s = c.parse("0.3").unwrap();
        let lambda = c.int(4);
        let b = caterpillar_outputs(&cat, &s, &lambda).unwrap();
        let tree = caterpillar_to_tree(&cat).unwrap();
        let full = diagonalize_tree(&tree, &s, &-&lambda);
        for (j, bj) in b.iter().enumerate() {
            assert!((bj - &full.outputs[j]).abs() < c.pow10(-40));
        }
        let fast = diagonalize_caterpillar(&cat, &s, &-&lambda);
        assert_eq!(fast.inertia, full.inertia);
    }

    #[test]
    fn pole_and_zero_child_errors() {
        let c = ctx();
        let cat = Caterpillar::parse("[1,1,1]").unwrap();
        assert!(matches!(
            caterpillar_outputs(&cat, &c.parse("0.3").unwrap(), &c.one()),
            Err(Error::Pole(_))
        ));
        // s = 1/2, lambda = 2: delta = 1/2 and b_1 = -1 + 2 delta = 0 exactly.
        let cat = Caterpillar::parse("[2,0,0]").unwrap();
        assert!(matches!(
            caterpillar_outputs(&cat, &c.parse("0.5").unwrap(), &c.int(2)),
            Err(Error::ZeroChild { index: 0 })
        ));
        // The full fast path handles the same input through the zero-child branch.
        let fast = diagonalize_caterpillar(&cat, &c.parse("0.5").unwrap(), &c.int(-2));
        let tree = caterpillar_to_tree(&cat).unwrap();
        let full = diagonalize_tree(&tree, &c.parse("0.5").unwrap(), &c.int(-2));
        assert_eq!(fast.inertia, full.inertia);
    }

    #[test]
    fn radius_of_p2() {
        let c = ctx();
        let s = c.parse("0.25").unwrap();
        let t = Tree::path(2).unwrap();
        let est = approximate_radius(&t, &s, &c.zero(), &c.int(2), 100).unwrap();
        assert!((est.estimate() - c.parse("1.25").unwrap()).abs() < c.pow10(-28));
        assert!(est.low <= c.parse("1.25").unwrap());
    }

    #[test]
    fn invalid_brackets() {
        let c = ctx();
        let s = c.parse("0.25").unwrap();
        let t = Tree::path(2).unwrap();
        assert!(matches!(
            approximate_radius(&t, &s, &c.zero(), &c.one(), 10),
            Err(Error::InvalidBracket(_))
        ));
        assert!(matches!(
            approximate_radius(&t, &s, &c.int(2), &c.int(3), 10),
            Err(Error::InvalidBracket(_))
        ));
        assert!(matches!(
            approximate_radius(&t, &s, &c.int(2), &c.int(1), 10),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn caterpillar_table_row() {
        let c = ctx();
        let cat = Caterpillar::parse("[31,23,9,17,23]").unwrap();
        let lambda = c.parse("5.4").unwrap();
        let s = crate::limits::s_star(&lambda).unwrap() / 2i64;
        let est = approximate_radius(&cat, &s, &c.one(), &lambda, 120).unwrap();
        let err = &lambda - est.estimate();
        let rel = ((err / c.parse("2.18e-7").unwrap()) - 1i64).abs();
        assert!(rel < c.parse("0.02").unwrap(), "relative error {rel:?}");
    }
}
