//! The rational recurrence `x_{j+1} = phi(x_j)` with `phi(t) = alpha + gamma / t`,
//! `alpha = 1 + s^2 - lambda` and `gamma = -s^2`, produced by diagonalizing
//! pendant paths at `x = -lambda`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The two fixed points of `phi`, present when `s` is adapted to `lambda`.
#[derive(Debug, Clone)]
pub struct FixedPoints {
    /// Attracting fixed point, the smaller one.
    pub theta: Scalar,
    /// Repelling fixed point.
    pub theta_prime: Scalar,
}

#[derive(Debug, Clone)]
pub struct RecurrenceParams {
    pub s: Scalar,
    pub lambda: Scalar,
    pub alpha: Scalar,
    pub gamma: Scalar,
    pub discriminant: Scalar,
    /// Per-leaf contribution `s^2 lambda / (lambda - 1)`.
    pub delta: Scalar,
    /// `-gamma / alpha`, the largest point mapped to 0; absent when `alpha = 0`.
    pub c1: Option<Scalar>,
    /// `Some` exactly when `lambda > (1 + |s|)^2`.
    pub fixed: Option<FixedPoints>,
}

impl RecurrenceParams {
    pub fn new(s: &Scalar, lambda: &Scalar) -> Result<Self> {
        s.same_precision(lambda)?;
        if *lambda <= 1 {
            return Err(Error::Domain(format!(
                "recurrence parameters need lambda > 1, got {}",
                lambda.to_sig_string(15)
            )));
        }
        let s2 = s.square();
        let alpha = &s2 + 1i64 - lambda;
        let gamma = -&s2;
        let discriminant = alpha.square() + &gamma * 4i64;
        let delta = &s2 * lambda / (lambda - 1i64);
        let c1 = (!alpha.is_zero()).then(|| &s2 / &alpha);
        let adapted = *lambda > (s.abs() + 1i64).square();
        let fixed = if adapted {
            let root = discriminant.sqrt()?;
            Some(FixedPoints {
                theta: (&alpha - &root) / 2i64,
                theta_prime: (&alpha + &root) / 2i64,
            })
        } else {
            None
        };
        Ok(Self {
            s: s.clone(),
            lambda: lambda.clone(),
            alpha,
            gamma,
            discriminant,
            delta,
            c1,
            fixed,
        })
    }

    pub fn is_adapted(&self) -> bool {
        self.fixed.is_some()
    }

    /// Fixed points, or a not-adapted error.
    pub fn fixed_points(&self) -> Result<&FixedPoints> {
        self.fixed.as_ref().ok_or_else(|| Error::NotAdapted {
            s: self.s.to_sig_string(15),
            lambda: self.lambda.to_sig_string(15),
        })
    }

    pub fn phi(&self, t: &Scalar) -> Result<Scalar> {
        if t.is_zero() {
            return Err(Error::Pole("phi(0)"));
        }
        Ok(&self.alpha + &self.gamma / t)
    }
}

/// Convenience wrapper for [`RecurrenceParams::new`].
pub fn params(s: &Scalar, lambda: &Scalar) -> Result<RecurrenceParams> {
    RecurrenceParams::new(s, lambda)
}

/// Which region the starting point lies in, relative to the fixed points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitCase {
    /// `x_1 < theta`: increases to `theta`.
    BelowTheta,
    /// `x_1 = theta`: constant.
    AtTheta,
    /// `theta < x_1 < theta'`: decreases to `theta`.
    BetweenFixedPoints,
    /// `x_1 = theta'`: constant.
    AtThetaPrime,
    /// `theta' < x_1 < 0`: increases, turns positive at some step `m`, drops
    /// below `theta` and then increases to `theta`.
    AboveRepelling,
    /// `x_1 > 0`: the next value is below `theta`, then increases to `theta`.
    Positive,
}

impl OrbitCase {
    pub fn describe(self) -> &'static str {
        match self {
            OrbitCase::BelowTheta => "below theta: increasing to theta",
            OrbitCase::AtTheta => "at theta: constant",
            OrbitCase::BetweenFixedPoints => "between theta and theta': decreasing to theta",
            OrbitCase::AtThetaPrime => "at theta': constant",
            OrbitCase::AboveRepelling => "between theta' and 0: turns positive, then increases to theta",
            OrbitCase::Positive => "positive: jumps below theta, then increases to theta",
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrbitReport {
    pub case: OrbitCase,
    /// `x_1, x_2, ...` as iterated.
    pub values: Vec<Scalar>,
    /// First step (1-based) with a positive value.
    pub sign_change_step: Option<usize>,
    /// Whether each stretch of the orbit moved in the predicted direction.
    pub monotone_as_predicted: bool,
    /// First step (1-based) within `10^-target_digits` of `theta`.
    pub converged_at: Option<usize>,
}

impl OrbitReport {
    pub fn steps(&self) -> usize {
        self.values.len()
    }
}

/// Iterates `phi` from `x1` for at most `max_steps` values, stopping early
/// once within `10^-target_digits` of `theta`.
pub fn classify_orbit(
    p: &RecurrenceParams,
    x1: &Scalar,
    max_steps: usize,
    target_digits: u32,
) -> Result<OrbitReport> {
    let fp = p.fixed_points()?;
    if x1.is_zero() {
        return Err(Error::NullSet { step: 1 });
    }
    let case = if x1.is_positive() {
        OrbitCase::Positive
    } else if *x1 < fp.theta {
        OrbitCase::BelowTheta
    } else if *x1 == fp.theta {
        OrbitCase::AtTheta
    } else if *x1 < fp.theta_prime {
        OrbitCase::BetweenFixedPoints
    } else if *x1 == fp.theta_prime {
        OrbitCase::AtThetaPrime
    } else {
        OrbitCase::AboveRepelling
    };
    if matches!(case, OrbitCase::AtTheta | OrbitCase::AtThetaPrime) {
        return Ok(OrbitReport {
            case,
            values: vec![x1.clone()],
            sign_change_step: None,
            monotone_as_predicted: true,
            converged_at: (case == OrbitCase::AtTheta).then_some(1),
        });
    }
    let tol = x1.pow10_like(-(target_digits as i32));
    let mut values = vec![x1.clone()];
    let mut sign_change_step = x1.is_positive().then_some(1);
    let mut converged_at = None;
    let mut monotone = true;
    // After the orbit turns positive and drops below theta it increases.
    let mut phase_increasing = !matches!(case, OrbitCase::BetweenFixedPoints);
    let mut after_jump = false;
    while values.len() < max_steps.max(1) {
        let last = values.last().expect("nonempty");
        if (last - &fp.theta).abs() < tol {
            converged_at = Some(values.len());
            break;
        }
        let next = p.phi(last)?;
        if next.is_zero() {
            return Err(Error::NullSet {
                step: values.len() + 1,
            });
        }
        if last.is_positive() {
            // The jump from a positive value is not part of a monotone stretch.
            if next >= fp.theta {
                monotone = false;
            }
            phase_increasing = true;
            after_jump = true;
        } else if next.is_positive() {
            if sign_change_step.is_none() {
                sign_change_step = Some(values.len() + 1);
            }
            if !phase_increasing || after_jump {
                monotone = false;
            }
        } else {
            let increased = next > *last;
            if increased != phase_increasing && next != *last {
                monotone = false;
            }
        }
        values.push(next);
    }
    if converged_at.is_none() {
        if let Some(last) = values.last() {
            if (last - &fp.theta).abs() < tol {
                converged_at = Some(values.len());
            }
        }
    }
    Ok(OrbitReport {
        case,
        values,
        sign_change_step,
        monotone_as_predicted: monotone,
        converged_at,
    })
}
