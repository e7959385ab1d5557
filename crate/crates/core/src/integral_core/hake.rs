
use super::distribution::Distribution;
use crate::error::{Error, Result, Side};
use crate::function_core::continuous::{audit_continuity, detect_limit, DEFAULT_DEPTH};
use crate::function_core::{evaluator, ContinuousFunctionBar, Evaluator};
use crate::numerics::{bisect, gk15, integrate, wynn_epsilon};

/// Beyond this abscissa the primitive of an integrand is evaluated as the
/// limit minus an accelerated tail.
const DIRECT_RANGE: f64 = 40.0;
const TAIL_SEGMENTS: usize = 48;

/// Builds the distribution whose primitive is the continuous `F` on `ℝ`,
/// provided both limits at infinity exist.
pub fn hake_extend(f: Evaluator, tol: f64) -> Result<Distribution> {
    let lim_neg = detect_limit(&*f, Side::Negative, tol, DEFAULT_DEPTH)?;
    let lim_pos = detect_limit(&*f, Side::Positive, tol, DEFAULT_DEPTH)?;
    Distribution::from_primitive_fn(f, lim_neg, lim_pos, tol)
}

/// Sum of `∫ f` over consecutive sign-constant segments starting at `x0`
/// and marching in direction `dir`, extrapolated by the epsilon algorithm.
/// Returns the oriented tail `∫_{x0}^{dir·∞} f`.
fn accelerated_tail(f: &dyn Fn(f64) -> f64, x0: f64, dir: f64, tol: f64) -> Result<f64> {
    let side = if dir > 0.0 { Side::Positive } else { Side::Negative };
    let mut edge = x0;
    let mut seg = 1e-3 / (1.0 + x0.abs());
    let mut sums = Vec::with_capacity(TAIL_SEGMENTS + 1);
    let mut terms = Vec::with_capacity(TAIL_SEGMENTS);
    let mut acc = 0.0;
    sums.push(0.0);
    for _ in 0..TAIL_SEGMENTS {
        let reach = edge.abs().max(1.0);
        // the scan step starts at a fraction of the last segment and doubles
        // after every 32 samples without a sign change
        let mut step = (seg / 16.0).max(1e-12 * reach);
        let mut prev = f(edge + dir * step);
        let mut next = None;
        let mut t = 2.0 * step;
        let mut quiet = 0;
        while t <= reach {
            let v = f(edge + dir * t);
            if v * prev < 0.0 {
                let (p, q) = (edge + dir * (t - step), edge + dir * t);
                let (a, b) = (p.min(q), p.max(q));
                let sa = f(a);
                next = Some(bisect(&|x| f(x) * sa.signum(), a, b, 200));
                break;
            }
            if v != 0.0 {
                prev = v;
            }
            quiet += 1;
            if quiet == 32 {
                quiet = 0;
                step *= 2.0;
            }
            t += step;
        }
        let end = next.unwrap_or(edge + dir * reach);
        let (lo, hi) = if dir > 0.0 { (edge, end) } else { (end, edge) };
        let piece = segment_integral(f, lo, hi, 1e-3 * tol)? * dir;
        acc += piece;
        sums.push(acc);
        terms.push(piece.abs());
        seg = (end - edge).abs();
        edge = end;
    }
    let k = terms.len();
    let window = &terms[k / 2..];
    let last = window[window.len() - 1];
    let shrinking = window.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    let decaying = (shrinking && last < (1.0 - 1e-9) * window[0]) || last < tol;
    if !decaying {
        return Err(Error::NoLimitAtInfinity { side, deviation: window[window.len() - 1] });
    }
    let (est, err) = wynn_epsilon(&sums[sums.len() / 2..]).ok_or(Error::NoLimitAtInfinity { side, deviation: f64::INFINITY })?;
    if err.is_finite() && err < tol {
        Ok(est)
    } else {
        Err(Error::NoLimitAtInfinity { side, deviation: err })
    }
}

/// Far out, rounding in the argument of the integrand sets a noise floor that
/// adaptive refinement cannot beat; a fixed composite rule is used there.
fn segment_integral(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    match integrate(f, lo, hi, tol) {
        Err(Error::BudgetExceeded(_)) => {
            let h = (hi - lo) / 16.0;
            Ok((0..16).map(|i| gk15(f, lo + i as f64 * h, lo + (i + 1) as f64 * h).0).sum())
        }
        other => other,
    }
}

/// The distribution with primitive `F(x) = ∫_0^x f`, for an integrand that is
/// only conditionally integrable at infinity. Both limits of `F` are
/// extrapolated from segment sums; far out the primitive is the limit minus
/// the tail.
pub fn hake_from_integrand(f: Evaluator, tol: f64) -> Result<Distribution> {
    let direct = |x: f64| -> Result<f64> {
        if x >= 0.0 {
            integrate(&*f, 0.0, x, 1e-2 * tol)
        } else {
            Ok(-integrate(&*f, x, 0.0, 1e-2 * tol)?)
        }
    };
    let pos_base = direct(DIRECT_RANGE)?;
    let neg_base = direct(-DIRECT_RANGE)?;
    let lim_pos = pos_base + accelerated_tail(&*f, DIRECT_RANGE, 1.0, tol)?;
    let lim_neg = neg_base + accelerated_tail(&*f, -DIRECT_RANGE, -1.0, tol)?;
    let g = f.clone();
    let eval = evaluator(move |x: f64| {
        if x.abs() <= DIRECT_RANGE {
            let r = if x >= 0.0 { integrate(&*g, 0.0, x, 1e-2 * tol) } else { integrate(&*g, x, 0.0, 1e-2 * tol).map(|v| -v) };
            r.unwrap_or(f64::NAN)
        } else if x > 0.0 {
            accelerated_tail(&*g, x, 1.0, tol).map(|t| lim_pos - t).unwrap_or(f64::NAN)
        } else {
            accelerated_tail(&*g, x, -1.0, tol).map(|t| lim_neg - t).unwrap_or(f64::NAN)
        }
    });
    // continuity is checked on the directly integrated core only
    let grid: Vec<f64> = (0..=64).map(|i| -DIRECT_RANGE + 2.0 * DIRECT_RANGE * i as f64 / 64.0).collect();
    audit_continuity(&*eval, &grid, tol.max(1e-9), 12).map_err(|(at, oscillation)| Error::NotContinuous { at, oscillation })?;
    let bar = ContinuousFunctionBar::trusted(eval, lim_neg, lim_pos).with_knots([0.0]);
    Distribution::try_from_primitive(bar)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_core::ExtendedReal as E;

    #[test]
    fn fresnel_limit() {
        let d = hake_from_integrand(evaluator(|t: f64| (t * t).sin()), 1e-10).unwrap();
        let v = d.integral(E::Finite(0.0), E::PosInf);
        assert!((v - 0.626_657_068_657_750_1).abs() < 1e-9, "{v}");
        // far out the primitive follows cos(x²)/(2x)
        for x in [100.0, 1000.0] {
            let tail = d.total() - d.primitive_at(x);
            let asy = (x * x).cos() / (2.0 * x) + (x * x).sin() / (4.0 * x * x * x);
            assert!((tail - asy).abs() < 1e-9);
        }
    }

    #[test]
    fn non_oscillatory_integrand() {
        let d = hake_from_integrand(evaluator(|t: f64| 1.0 / (1.0 + t * t)), 1e-10).unwrap();
        assert!((d.total() - std::f64::consts::PI).abs() < 1e-8, "{}", d.total());
        for x in [-1e3f64, -41.0, -39.0, 0.0, 39.0, 41.0, 1e3] {
            let want = x.atan() + std::f64::consts::FRAC_PI_2;
            assert!((d.primitive_at(x) - want).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn rejects_missing_limits() {
        assert!(matches!(hake_extend(evaluator(f64::sin), 1e-10), Err(Error::NoLimitAtInfinity { .. })));
        assert!(matches!(hake_from_integrand(evaluator(f64::cos), 1e-10), Err(Error::NoLimitAtInfinity { .. })));
    }

    #[test]
    fn rational_primitive() {
        let d = hake_extend(evaluator(|x: f64| x / (1.0 + x * x)), 1e-10).unwrap();
        assert!(d.total().abs() < 1e-10);
    }
}
