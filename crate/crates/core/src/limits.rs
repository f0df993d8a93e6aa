//! Closed-form and root-finding limits: `tau0(s)`, the limit of the
//! spectral radius of `T_{1,n,n}`; the Laplacian value at `s = 1`; the margin
//! function `F(s, lambda)` and its positive root `s*(lambda)`.

use crate::error::{Error, Result};
use crate::recurrence::RecurrenceParams;
use crate::scalar::{iterations_for_digits, try_bisect, Scalar};

/// Slack, in decimal digits, allowed in residual checks of closed forms.
const RESIDUAL_SLACK_DIGITS: i32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitSource {
    Tau0,
    SStar,
    LaplacianClosedForm,
}

#[derive(Debug, Clone)]
pub struct LimitPoint {
    pub value: Scalar,
    pub source: LimitSource,
    pub s: Option<Scalar>,
    pub lambda: Option<Scalar>,
}

/// `h(t) = (1 + s^2 - t)^2 - 4 s^2 - s^4 (1 + 1/(t - 1))^2`, increasing on
/// `(1, inf)` for `s != 0`.
pub fn h(t: &Scalar, s: &Scalar) -> Result<Scalar> {
    let tm1 = t - 1i64;
    if tm1.is_zero() {
        return Err(Error::Pole("h(1)"));
    }
    let s2 = s.square();
    let a = (&s2 + 1i64 - t).square();
    let b = (tm1.recip() + 1i64).square() * s2.square();
    Ok(a - &s2 * 4i64 - b)
}

/// `p(t) = t^4 - (2s^2 + 4) t^3 + (2s^2 + 6) t^2 - (2s^4 - 2s^2 + 4) t + s^4 - 2s^2 + 1`.
pub fn tau0_quartic_residual(t: &Scalar, s: &Scalar) -> Scalar {
    let coeffs = tau0_quartic(s);
    horner(&coeffs, t)
}

fn tau0_quartic(s: &Scalar) -> [Scalar; 5] {
    let s2 = s.square();
    let s4 = s2.square();
    [
        &s4 - &s2 * 2i64 + 1i64,
        -(&s4 * 2i64) + &s2 * 2i64 - 4i64,
        &s2 * 2i64 + 6i64,
        -(&s2 * 2i64) - 4i64,
        s.int_like(1),
    ]
}

/// Evaluates `sum c_i x^i` with coefficients in ascending order.
fn horner(coeffs: &[Scalar], x: &Scalar) -> Scalar {
    coeffs
        .iter()
        .rev()
        .fold(x.int_like(0), |acc, c| acc * x + c)
}

/// `sum |c_i| |x|^i`, the scale against which a residual is judged.
fn magnitude(coeffs: &[Scalar], x: &Scalar) -> Scalar {
    let ax = x.abs();
    coeffs
        .iter()
        .rev()
        .fold(x.int_like(0), |acc, c| acc * &ax + c.abs())
}

fn check_residual(residual: &Scalar, scale: &Scalar, what: &str) -> Result<()> {
    let digits = residual.digits() as i32;
    let tol = scale.max(&scale.int_like(1)) * residual.pow10_like(-(digits - RESIDUAL_SLACK_DIGITS));
    if residual.abs() > tol {
        return Err(Error::Consistency(format!(
            "{what} residual {} exceeds {}",
            residual.to_sig_string(6),
            tol.to_sig_string(3)
        )));
    }
    Ok(())
}

/// The unique root of `h` in `(1, inf)`, by bisection on
/// `[1 + 10^(-P/2), 2 + 2s^2 + 3|s|]`, then checked against the quartic.
pub fn tau0(s: &Scalar) -> Result<Scalar> {
    if s.is_zero() {
        return Err(Error::Degenerate("tau0 is undefined at s = 0: the radius is identically 1"));
    }
    let digits = s.digits();
    let lower = s.pow10_like(-((digits / 2) as i32)) + 1i64;
    let upper = s.square() * 2i64 + s.abs() * 3i64 + 2i64;
    let iters = iterations_for_digits(&(&upper - &lower), digits + 2);
    let bracket = try_bisect(|t| h(t, s), &lower, &upper, iters)?;
    let root = bracket.midpoint();
    let coeffs = tau0_quartic(s);
    check_residual(&horner(&coeffs, &root), &magnitude(&coeffs, &root), "tau0 quartic")?;
    Ok(root)
}

pub fn tau0_limit(s: &Scalar) -> Result<LimitPoint> {
    Ok(LimitPoint {
        value: tau0(s)?,
        source: LimitSource::Tau0,
        s: Some(s.clone()),
        lambda: None,
    })
}

/// `cbrt(54 + 6 sqrt 33)/3 + 4/cbrt(54 + 6 sqrt 33) + 2`, the limit of the
/// Laplacian spectral radius of `T_{1,n,n}`.
pub fn laplacian_closed_form(like: &Scalar) -> Scalar {
    let r33 = like.int_like(33).sqrt().expect("positive");
    let c = (r33 * 6i64 + 54i64).cbrt();
    &c / 3i64 + 4i64 / &c + 2i64
}

/// `F(s, lambda) = theta'(s) - s^2 lambda / (lambda - 1) + s`. While it is
/// positive, every back-node output `b` of a Shearer caterpillar satisfies
/// `s^2 / b^2 > 1`.
pub fn margin_f(s: &Scalar, lambda: &Scalar) -> Result<Scalar> {
    let p = RecurrenceParams::new(s, lambda)?;
    let fp = p.fixed_points().map_err(|_| {
        Error::Domain(format!(
            "F needs s adapted to lambda; s = {}, lambda = {}",
            s.to_sig_string(15),
            lambda.to_sig_string(15)
        ))
    })?;
    Ok(&fp.theta_prime - &p.delta + s)
}

/// Coefficients, ascending in `s`, of
/// `-4 lambda s^4 + (4 lambda^2 - 4) s^3 + (-4 lambda^3 + 12 lambda - 8) s^2
///  + (4 lambda^3 - 12 lambda^2 + 12 lambda - 4) s`.
fn s_star_quartic(lambda: &Scalar) -> [Scalar; 5] {
    let l2 = lambda.square();
    let l3 = &l2 * lambda;
    [
        lambda.int_like(0),
        &l3 * 4i64 - &l2 * 12i64 + lambda * 12i64 - 4i64,
        -(&l3 * 4i64) + lambda * 12i64 - 8i64,
        &l2 * 4i64 - 4i64,
        -(lambda * 4i64),
    ]
}

pub fn s_star_quartic_residual(s: &Scalar, lambda: &Scalar) -> Scalar {
    horner(&s_star_quartic(lambda), s)
}

/// The positive root of `F(., lambda)` by the Cardano closed form
/// `s* = (l/2 - (4 lambda^2 + 8 lambda - 2)/l + lambda + 1)(lambda - 1)/(3 lambda)`,
/// where `l` is the real cube root of
/// `12 sqrt3 sqrt((3 lambda^3 + 4 lambda^2 + 20 lambda - 4)/lambda) lambda^2
///  - 28 lambda^3 + 24 lambda^2 - 48 lambda + 8`.
///
/// The result is checked against `F = 0` and the quartic before returning.
pub fn s_star(lambda: &Scalar) -> Result<Scalar> {
    if *lambda <= 1 {
        return Err(Error::Domain(format!(
            "s* needs lambda > 1, got {}",
            lambda.to_sig_string(15)
        )));
    }
    let l2 = lambda.square();
    let l3 = &l2 * lambda;
    let inner = (&l3 * 3i64 + &l2 * 4i64 + lambda * 20i64 - 4i64) / lambda;
    let radicand = lambda.int_like(3).sqrt()? * 12i64 * inner.sqrt()? * &l2 - &l3 * 28i64
        + &l2 * 24i64
        - lambda * 48i64
        + 8i64;
    let ell = radicand.cbrt();
    if ell.is_zero() {
        return Err(Error::Consistency("cube root vanished in s*".into()));
    }
    let s = (&ell / 2i64 - (&l2 * 4i64 + lambda * 8i64 - 2i64) / &ell + lambda + 1i64)
        * (lambda - 1i64)
        / (lambda * 3i64);
    let bound = lambda.sqrt()? - 1i64;
    if !s.is_positive() || s >= bound {
        return Err(Error::Consistency(format!(
            "s* = {} outside (0, sqrt(lambda) - 1)",
            s.to_sig_string(15)
        )));
    }
    let f = margin_f(&s, lambda)?;
    let p = RecurrenceParams::new(&s, lambda)?;
    let f_scale = p.delta.abs() + p.fixed_points()?.theta_prime.abs() + s.abs();
    check_residual(&f, &f_scale, "F(s*)")?;
    let coeffs = s_star_quartic(lambda);
    check_residual(&horner(&coeffs, &s), &magnitude(&coeffs, &s), "s* quartic")?;
    Ok(s)
}

pub fn s_star_limit(lambda: &Scalar) -> Result<LimitPoint> {
    Ok(LimitPoint {
        value: s_star(lambda)?,
        source: LimitSource::SStar,
        s: None,
        lambda: Some(lambda.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::PrecisionContext;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(50).unwrap()
    }

    fn close(a: &Scalar, b: &str, tol: i32) -> bool {
        let b = a.int_like(0) + &ctx().parse(b).unwrap();
        (a - b).abs() < a.pow10_like(tol)
    }

    #[test]
    fn tau0_examples() {
        let c = ctx();
        assert!(close(&tau0(&c.parse("0.5").unwrap()).unwrap(), "2.341081806", -9));
        assert!(close(&tau0(&c.one()).unwrap(), "4.382975768", -9));
        assert!(close(&tau0(&c.int(10)).unwrap(), "203.4647577", -7));
        assert!(matches!(tau0(&c.zero()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn tau0_even_and_sign_change() {
        let c = ctx();
        let s = c.parse("0.5").unwrap();
        let t = tau0(&s).unwrap();
        assert_eq!(t, tau0(&-&s).unwrap());
        let eps = c.pow10(-6);
        assert!(h(&(&t - &eps), &s).unwrap().is_negative());
        assert!(h(&(&t + &eps), &s).unwrap().is_positive());
        assert!(h(&t, &s).unwrap().abs() < c.pow10(-40));
    }

    #[test]
    fn quartic_at_s_zero() {
        let c = ctx();
        assert!(tau0_quartic_residual(&c.one(), &c.zero()).is_zero());
    }

    #[test]
    fn laplacian_value() {
        let c = ctx();
        let v = laplacian_closed_form(&c.one());
        assert!(v > 4);
        assert!((&v - tau0(&c.one()).unwrap()).abs() < c.pow10(-40));
        assert!(tau0_quartic_residual(&v, &c.one()).abs() < c.pow10(-40));
    }

    #[test]
    fn s_star_examples() {
        let c = ctx();
        assert!(close(&s_star(&c.parse("1.5").unwrap()).unwrap(), "0.17869088547", -11));
        assert!(close(&s_star(&c.parse("5.4").unwrap()).unwrap(), "0.6718978964", -10));
        assert!(close(&s_star(&c.int(2025)).unwrap(), "0.9990125897", -10));
        let seven = c.int(7);
        let s7 = s_star(&seven).unwrap();
        assert!(close(&s7, "0.7388", -4));
        assert!(margin_f(&s7, &seven).unwrap().abs() < c.pow10(-40));
        assert!(s_star(&c.one()).is_err());
    }

    #[test]
    fn margin_at_zero_and_inside() {
        let c = ctx();
        for l in ["1.5", "5.4", "30"] {
            let lambda = c.parse(l).unwrap();
            assert!(margin_f(&c.zero(), &lambda).unwrap().is_zero());
            let half = s_star(&lambda).unwrap() / 2i64;
            assert!(margin_f(&half, &lambda).unwrap().is_positive());
        }
        assert!(margin_f(&c.parse("0.3").unwrap(), &c.parse("1.5").unwrap()).is_err());
    }

    #[test]
    fn s_star_monotone_and_limits() {
        let c = ctx();
        let grid = ["1.1", "1.5", "2", "5", "10", "100", "2025"];
        let values: Vec<Scalar> = grid.iter().map(|l| s_star(&c.parse(l).unwrap()).unwrap()).collect();
        for w in values.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(s_star(&c.parse("1.000001").unwrap()).unwrap() < c.parse("0.01").unwrap());
        assert!(s_star(&c.parse("1e9").unwrap()).unwrap() > c.parse("0.99").unwrap());
    }

    #[test]
    fn tau0_increasing_in_s() {
        let c = ctx();
        let grid = ["0.001", "0.01", "0.1", "0.5", "1", "2", "5", "10"];
        let values: Vec<Scalar> = grid.iter().map(|s| tau0(&c.parse(s).unwrap()).unwrap()).collect();
        for w in values.windows(2) {
            assert!(w[0] < w[1]);
        }
    }
}
