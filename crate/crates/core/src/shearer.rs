//! Shearer caterpillar sequences: the greedy caterpillars `[r_1, ..., r_k]`
//! whose spectral radii increase toward a target `lambda`, with the
//! convergence diagnostics `beta_j` and `epsilon_k`.
//!
//! Each count is the largest `r_j` keeping the back-node output below the
//! repelling fixed point `theta'`, so every output lands in the window
//! `(theta' - delta, theta')`.

use rayon::prelude::*;

use crate::diagonalize::{ProbeOutcome, RadiusBisector, RadiusEstimate};
use crate::error::{Error, Result};
use crate::limits::s_star;
use crate::recurrence::RecurrenceParams;
use crate::scalar::{PrecisionContext, Scalar};
use crate::tree::Caterpillar;

/// Decimal digits of slack required between a floor argument and the
/// nearest integer, on top of the accumulated rounding amplification.
const FLOOR_GUARD_DIGITS: f64 = 10.0;
/// Precision is never escalated past this many digits.
pub const MAX_DIGITS: u32 = 20_000;

/// A generated Shearer caterpillar with its traces.
#[derive(Debug, Clone)]
pub struct ShearerRun {
    pub lambda: Scalar,
    pub s: Scalar,
    pub counts: Vec<u64>,
    /// Back-node outputs at `x = -lambda`.
    pub b_trace: Vec<Scalar>,
    pub beta_trace: Vec<Scalar>,
    pub params: RecurrenceParams,
    /// `log10` of the worst-case growth of rounding errors along the run.
    pub amplification_digits: f64,
}

impl ShearerRun {
    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn caterpillar(&self) -> Caterpillar {
        Caterpillar::new(self.counts.clone()).expect("runs have k >= 2")
    }

    pub fn vertex_count(&self) -> u64 {
        self.counts.len() as u64 + self.counts.iter().sum::<u64>()
    }
}

/// `floor(arg)` as a count, refusing when `arg` is too close to an integer
/// for the working precision to decide.
fn guarded_floor(arg: &Scalar, amplification: f64) -> Result<u64> {
    let fl = arg.floor();
    let frac = arg - &fl;
    let dist = frac.min(&(1i64 - &frac)).clone();
    let digits = f64::from(arg.digits());
    let scale = (arg.abs() + 1i64).log10_abs();
    let reliable = digits - amplification - scale - FLOOR_GUARD_DIGITS;
    let dist_digits = -dist.log10_abs();
    if dist_digits >= reliable {
        let needed = (dist_digits + amplification + scale + FLOOR_GUARD_DIGITS).ceil() as u32 + 10;
        return Err(Error::Precision {
            needed: needed.max(arg.digits() + 10),
        });
    }
    if fl.is_negative() {
        return Err(Error::Consistency(format!(
            "negative count floor({})",
            arg.to_sig_string(20)
        )));
    }
    fl.to_u64()
        .ok_or_else(|| Error::Consistency(format!("count {} does not fit", fl.to_sig_string(20))))
}

/// Generates the first `k` caterpillar counts:
/// `r_1 = floor((theta' + lambda - 1)/delta)`,
/// `r_j = floor((theta' - phi(b_{j-1}))/delta)` for `1 < j < k`, and
/// `r_k = floor((theta' - phi(b_{k-1}) + s^2)/delta)`.
///
/// Returns [`Error::Precision`] when a floor is too close to call at the
/// working precision; [`generate_auto`] escalates automatically.
pub fn generate(lambda: &Scalar, s: &Scalar, k: usize) -> Result<ShearerRun> {
    if k < 2 {
        return Err(Error::Domain(format!("Shearer runs need k >= 2, got {k}")));
    }
    let params = RecurrenceParams::new(s, lambda)?;
    if s.is_zero() {
        return Err(Error::Degenerate("delta vanishes at s = 0"));
    }
    let theta_prime = params.fixed_points()?.theta_prime.clone();
    let delta = params.delta.clone();
    let s2 = s.square();
    let lower = &theta_prime - &delta;

    let mut counts = Vec::with_capacity(k);
    let mut b_trace: Vec<Scalar> = Vec::with_capacity(k);
    let mut amplification = 0.0f64;
    for j in 0..k {
        let (base, arg) = if j == 0 {
            let base = 1i64 - lambda;
            let arg = (&theta_prime - &base) / &delta;
            (base, arg)
        } else {
            let prev = &b_trace[j - 1];
            let growth = (&s2 / prev.square()).log10_abs();
            amplification = (amplification + growth).max(0.0);
            let mut base = params.phi(prev)?;
            if j == k - 1 {
                base = base - &s2;
            }
            let arg = (&theta_prime - &base) / &delta;
            (base, arg)
        };
        let r = guarded_floor(&arg, amplification)?;
        let b = base + &delta * r;
        if !(b < theta_prime && b > lower) {
            return Err(Error::Consistency(format!(
                "output b_{} = {} left the window",
                j + 1,
                b.to_sig_string(20)
            )));
        }
        counts.push(r);
        b_trace.push(b);
    }
    let mut run = ShearerRun {
        lambda: lambda.clone(),
        s: s.clone(),
        counts,
        b_trace,
        beta_trace: Vec::new(),
        params,
        amplification_digits: amplification,
    };
    run.beta_trace = beta_sequence(&run)?;
    Ok(run)
}

/// How `s` is chosen for a run: a literal value, or `s*(lambda)/d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SChoice {
    Value(String),
    StarOver(u32),
}

impl SChoice {
    /// `auto` means `s*/2`; `star` means `s*`; `star/N` means `s*/N`.
    pub fn parse(text: &str) -> Result<SChoice> {
        let t = text.trim();
        match t {
            "auto" => Ok(SChoice::StarOver(2)),
            "star" => Ok(SChoice::StarOver(1)),
            _ => {
                if let Some(d) = t.strip_prefix("star/") {
                    let d: u32 = d
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad divisor in {t:?}")))?;
                    if d == 0 {
                        return Err(Error::Parse("divisor must be positive".into()));
                    }
                    Ok(SChoice::StarOver(d))
                } else {
                    Ok(SChoice::Value(t.to_string()))
                }
            }
        }
    }
}

/// Run inputs kept in text form so they can be re-resolved at a higher
/// precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSpec {
    pub lambda: String,
    pub s: SChoice,
}

impl RunSpec {
    pub fn new(lambda: &str, s: SChoice) -> RunSpec {
        RunSpec {
            lambda: lambda.trim().to_string(),
            s,
        }
    }

    pub fn resolve(&self, ctx: &PrecisionContext) -> Result<(Scalar, Scalar)> {
        let lambda = ctx.parse(&self.lambda)?;
        let s = match &self.s {
            SChoice::Value(v) => ctx.parse(v)?,
            SChoice::StarOver(d) => s_star(&lambda)? / u64::from(*d),
        };
        Ok((lambda, s))
    }
}

/// Runs `f` at increasing precision until it stops asking for more.
pub fn with_escalation<T>(
    ctx: &PrecisionContext,
    mut f: impl FnMut(&PrecisionContext) -> Result<T>,
) -> Result<(T, PrecisionContext)> {
    let mut current = *ctx;
    loop {
        match f(&current) {
            Err(Error::Precision { needed }) => {
                let next = needed.max(current.digits() + current.digits() / 2);
                if next > MAX_DIGITS {
                    return Err(Error::Precision { needed });
                }
                current = PrecisionContext::new(next)?;
            }
            other => return other.map(|v| (v, current)),
        }
    }
}

/// [`generate`] with automatic precision escalation.
pub fn generate_auto(spec: &RunSpec, k: usize, ctx: &PrecisionContext) -> Result<(ShearerRun, PrecisionContext)> {
    with_escalation(ctx, |c| {
        let (lambda, s) = spec.resolve(c)?;
        generate(&lambda, &s, k)
    })
}

fn beta_c(run: &ShearerRun, j: usize, lm1_sq: &Scalar) -> Scalar {
    let s2 = run.s.square();
    (&s2 * run.counts[j] / lm1_sq + 1i64) / -&run.b_trace[j]
}

fn beta_gamma(run: &ShearerRun, j: usize) -> Scalar {
    run.s.square() / (&run.b_trace[j - 1] * &run.b_trace[j])
}

fn require_negative_outputs(run: &ShearerRun) -> Result<()> {
    if let Some(j) = run.b_trace.iter().position(|b| !b.is_negative()) {
        return Err(Error::InvalidRun(format!("b_{} is not negative", j + 1)));
    }
    Ok(())
}

/// `beta_1 = (1 + r_1 s^2/(lambda-1)^2)/(lambda - 1 - r_1 delta)` and
/// `beta_j = c_j + gamma_j beta_{j-1}` with
/// `c_j = (1 + r_j s^2/(lambda-1)^2)/(-b_j)`, `gamma_j = s^2/(b_{j-1} b_j)`.
/// `beta_j` is the logarithmic derivative `b_j'(0)/(-b_j(0))` of the outputs
/// at `lambda - epsilon`.
pub fn beta_sequence(run: &ShearerRun) -> Result<Vec<Scalar>> {
    require_negative_outputs(run)?;
    let lm1 = &run.lambda - 1i64;
    let lm1_sq = lm1.square();
    let s2 = run.s.square();
    let mut beta = Vec::with_capacity(run.k());
    let first = (&s2 * run.counts[0] / &lm1_sq + 1i64) / (&lm1 - &run.params.delta * run.counts[0]);
    beta.push(first);
    for j in 1..run.k() {
        let next = beta_c(run, j, &lm1_sq) + beta_gamma(run, j) * &beta[j - 1];
        beta.push(next);
    }
    Ok(beta)
}

/// The same sequence summed directly:
/// `beta_j = sum_i c_i prod_{m = i+1..j} gamma_m`.
pub fn beta_explicit(run: &ShearerRun) -> Result<Vec<Scalar>> {
    require_negative_outputs(run)?;
    let lm1_sq = (&run.lambda - 1i64).square();
    let c: Vec<Scalar> = (0..run.k()).map(|j| beta_c(run, j, &lm1_sq)).collect();
    let gamma: Vec<Option<Scalar>> = (0..run.k())
        .map(|j| (j > 0).then(|| beta_gamma(run, j)))
        .collect();
    let mut out = Vec::with_capacity(run.k());
    for j in 0..run.k() {
        let mut total = run.s.int_like(0);
        for (i, ci) in c.iter().enumerate().take(j + 1) {
            let mut term = ci.clone();
            for g in gamma.iter().take(j + 1).skip(i + 1) {
                term = term * g.as_ref().expect("gamma defined past the first node");
            }
            total = total + term;
        }
        out.push(total);
    }
    Ok(out)
}

/// `1/(delta - theta') + (k-2) s^2/(delta - theta')^3 + s^2 beta_1/(delta - theta')^2`,
/// a lower bound for `beta_k` while `F(s, lambda) > 0`.
pub fn beta_lower_bound(run: &ShearerRun, k: usize) -> Result<Scalar> {
    let theta_prime = &run.params.fixed_points()?.theta_prime;
    let gap = &run.params.delta - theta_prime;
    let s2 = run.s.square();
    let beta1 = run
        .beta_trace
        .first()
        .ok_or_else(|| Error::InvalidRun("empty run".into()))?;
    Ok(gap.recip() + &s2 * (k as i64 - 2) / (&gap * gap.square()) + &s2 * beta1 / gap.square())
}

/// Certified bound on `lambda - rho(T_k)`.
#[derive(Debug, Clone)]
pub struct EpsilonBound {
    pub k: usize,
    /// Upper end of the final bracket: `lambda - rho < epsilon` when certified.
    pub epsilon: Scalar,
    /// Lower end of the final bracket: `lambda - rho > lower`.
    pub lower: Scalar,
    /// The nested roots `epsilon_1 >= ... >= epsilon_k` (upper ends).
    pub nested: Vec<Scalar>,
    /// The output that turned nonnegative at `epsilon` was strictly positive.
    pub certified: bool,
}

/// Early-break evaluation of `b_1..b_m` at `lambda - eps` in the caterpillar
/// with `total` back nodes (the last one carries the `-s^2` term).
fn prefix_outcome(run: &ShearerRun, eps: &Scalar, m: usize) -> ProbeOutcome {
    let point = &run.lambda - eps;
    let leaf = 1i64 - &point;
    if !leaf.is_negative() {
        return ProbeOutcome::Nonnegative {
            exact_zero: leaf.is_zero(),
        };
    }
    let s2 = run.s.square();
    let delta = &s2 * &point / (&point - 1i64);
    let alpha = &s2 + 1i64 - &point;
    let k = run.k();
    let mut prev: Option<Scalar> = None;
    for j in 0..m {
        let mut b = match &prev {
            None => leaf.clone(),
            Some(p) => &alpha - &s2 / p,
        } + &delta * run.counts[j];
        if j == k - 1 && k > 1 {
            b = b - &s2;
        }
        if !b.is_negative() {
            return ProbeOutcome::Nonnegative {
                exact_zero: b.is_zero(),
            };
        }
        prev = Some(b);
    }
    ProbeOutcome::AllNegative
}

/// Nested bisection for `epsilon_1 >= ... >= epsilon_k`: `epsilon_j` is where
/// some output among `b_1..b_j` at `lambda - epsilon` first becomes
/// nonnegative, searched in `[0, epsilon_{j-1}]` from `epsilon_0 = lambda - 1`.
/// Each bracket is refined to `relative_digits` significant digits.
pub fn epsilon_k(run: &ShearerRun, relative_digits: u32) -> Result<EpsilonBound> {
    let k = run.k();
    let zero = run.s.int_like(0);
    if prefix_outcome(run, &zero, k) != ProbeOutcome::AllNegative {
        return Err(Error::InvalidRun("some output is nonnegative at epsilon = 0".into()));
    }
    let available = f64::from(run.s.digits()) - run.amplification_digits - 10.0;
    if f64::from(relative_digits) > available {
        return Err(Error::Precision {
            needed: (run.amplification_digits + f64::from(relative_digits) + 20.0).ceil() as u32,
        });
    }
    let rel = run.s.pow10_like(-(relative_digits as i32));
    let mut hi = &run.lambda - 1i64;
    let mut lo = zero.clone();
    let mut nested = Vec::with_capacity(k);
    let mut certified = true;
    let max_steps = run.s.prec() as usize * 4 + 256;
    for m in 1..=k {
        lo = zero.clone();
        let mut hit_zero = false;
        let mut steps = 0;
        while &hi - &lo > &hi * &rel {
            let mid = Scalar::midpoint(&lo, &hi);
            if mid == lo || mid == hi {
                break;
            }
            match prefix_outcome(run, &mid, m) {
                ProbeOutcome::AllNegative => lo = mid,
                ProbeOutcome::Nonnegative { exact_zero } => {
                    hi = mid;
                    hit_zero = exact_zero;
                }
            }
            steps += 1;
            if steps > max_steps {
                return Err(Error::Precision {
                    needed: run.s.digits() * 2,
                });
            }
        }
        if m == k {
            certified = !hit_zero;
        }
        nested.push(hi.clone());
    }
    Ok(EpsilonBound {
        k,
        epsilon: hi,
        lower: lo,
        nested,
        certified,
    })
}

/// One row of a convergence table.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub k: usize,
    pub counts: Vec<u64>,
    pub vertex_count: u64,
    pub rho: Scalar,
    /// `lambda - rho`, with `rho` the bracket midpoint.
    pub error: Scalar,
    pub radius: RadiusEstimate,
    /// Working precision the row was finally computed at.
    pub digits: u32,
}

/// Bisects `[1, lambda]` until the bracket width is at most
/// `10^-target_digits` times `lambda - high`, so the error `lambda - rho` is
/// known to `target_digits` significant digits.
pub fn radius_to_relative_digits(run: &ShearerRun, target_digits: u32) -> Result<RadiusEstimate> {
    let cat = run.caterpillar();
    let one = run.s.int_like(1);
    let mut bisector = RadiusBisector::new(&cat, &run.s, &one, &run.lambda)?;
    let rel = run.s.pow10_like(-(target_digits as i32));
    let max_steps = run.s.prec() + 64;
    loop {
        let st = bisector.state();
        let gap = &run.lambda - &st.high;
        if gap.is_positive() && st.width() <= &gap * &rel {
            break;
        }
        if st.iterations >= max_steps {
            return Err(Error::Precision {
                needed: run.s.digits() * 2,
            });
        }
        bisector.step();
    }
    Ok(bisector.finish())
}

/// Generates the run for each `k`, then brackets its radius with `A = 1`,
/// `B = lambda`. Precision is raised per row until the error `lambda - rho`
/// is resolved to `target_digits` significant digits with a margin of
/// `target_digits + 15` digits below the working precision. Rows run in
/// parallel and come back in input order.
pub fn convergence_report(
    spec: &RunSpec,
    ks: &[usize],
    target_digits: u32,
    ctx: &PrecisionContext,
) -> Result<Vec<ReportRow>> {
    ks.par_iter()
        .map(|&k| report_row(spec, k, target_digits, ctx))
        .collect()
}

pub fn report_row(spec: &RunSpec, k: usize, target_digits: u32, ctx: &PrecisionContext) -> Result<ReportRow> {
    let (row, _) = with_escalation(ctx, |c| {
        let (run, used) = generate_auto(spec, k, c)?;
        let radius = radius_to_relative_digits(&run, target_digits)?;
        let rho = radius.estimate();
        let error = &run.lambda - &rho;
        let needed = (-error.log10_abs() + f64::from(target_digits) + 15.0).ceil();
        if f64::from(used.digits()) < needed {
            return Err(Error::Precision {
                needed: needed as u32,
            });
        }
        Ok(ReportRow {
            k,
            vertex_count: run.vertex_count(),
            counts: run.counts,
            rho,
            error,
            radius,
            digits: used.digits(),
        })
    })?;
    Ok(row)
}
