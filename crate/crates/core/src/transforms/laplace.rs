use num_complex::Complex64;

use crate::bv_stieltjes::{BvFunction, Piece};
use crate::convergence_lab::Verdict;
use crate::error::{Error, Result, Side};
use crate::function_core::chart::{from_u, jacobian, to_u};
use crate::function_core::continuous::{detect_limit, DEFAULT_DEPTH};
use crate::function_core::{evaluator, Evaluator};
use crate::integral_core::Distribution;
use crate::numerics::{bisect, integrate};
use crate::product_calculus::integral_product;

pub type ComplexPoint = Complex64;

fn check_point(z: ComplexPoint, n: u32) -> Result<()> {
    let ok = z.re > 0.0 || (n == 0 && z.re == 0.0 && z.im == 0.0);
    if !ok || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("Laplace transform needs Re z > 0 or z = 0, got {z}")));
    }
    Ok(())
}

fn check_half_line(f: &Distribution) -> Result<()> {
    for x in [-1e6, -100.0, -10.0, -1.0, -0.5, -1e-3, 0.0] {
        if f.primitive_at(x) != 0.0 {
            return Err(Error::Domain(format!("distribution is not supported on [0, ∞): F({x}) ≠ 0")));
        }
    }
    Ok(())
}

/// Cutoff `T` for the kernel `tⁿ e^{-zt}`: past it the truncation error
/// `2‖F‖ (|g(T)| + V_{[T,∞]} g)` stays below `tol/2`.
fn tail_cutoff(z: ComplexPoint, n: u32, sup_f: f64, tol: f64) -> f64 {
    let (x, k) = (z.re, n as f64);
    let modz = z.norm();
    // ln of 2‖F‖ (2/x) e^{-xT} (n T^{n-1} + |z| Tⁿ), a bound on ‖F - F(∞)‖ V_{[T,∞]} g
    let log_bound = |t: f64| {
        let poly = if n == 0 { modz } else { k * t.powf(k - 1.0) + modz * t.powf(k) };
        (2.0 * sup_f.max(1e-300)).ln() + (2.0 / x).ln() - x * t + poly.max(1e-300).ln()
    };
    let mut t = (2.0 * k / x).max(1.0 / x).max(1e-3);
    while log_bound(t) > (0.5 * tol).ln() && t < 1e8 {
        t *= 1.25;
    }
    t
}

/// The kernel `t ↦ tⁿ e^{-zt}` (real or imaginary part via `part`) as a BV
/// function: constant `g(0)` on `(-∞, 0]`, monotone pieces between its
/// turning points on `[0, T]`, constant `g(T)` after.
fn kernel(z: ComplexPoint, n: u32, imaginary: bool, cutoff: f64) -> Result<BvFunction> {
    let k = n as i32;
    let g = move |t: f64| {
        let v = t.powi(k) * (-z * t).exp();
        if imaginary {
            v.im
        } else {
            v.re
        }
    };
    let dg = move |t: f64| {
        let e = (-z * t).exp();
        let d = if n == 0 { -z * e } else { (n as f64 * t.powi(k - 1)) * e - z * t.powi(k) * e };
        if imaginary {
            d.im
        } else {
            d.re
        }
    };
    let mut step = cutoff / 256.0;
    if z.im != 0.0 {
        step = step.min(std::f64::consts::PI / (16.0 * z.im.abs()));
    }
    let cells = (cutoff / step).ceil() as usize;
    let grid: Vec<f64> = (0..=cells).map(|i| cutoff * i as f64 / cells as f64).collect();
    let mut turning = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &t in &grid[1..grid.len() - 1] {
        let d = dg(t);
        if d == 0.0 {
            continue;
        }
        if let Some((tp, dp)) = prev {
            if (dp > 0.0) != (d > 0.0) {
                let s = dp.signum();
                turning.push(bisect(&|u| s * dg(u), tp, t, 200));
            }
        }
        prev = Some((t, d));
    }
    let mut bounds = vec![0.0];
    bounds.extend(turning.into_iter().filter(|&t| t > 0.0 && t < cutoff));
    bounds.push(cutoff);
    bounds.dedup();
    let (ge, de): (Evaluator, Evaluator) = (evaluator(g), evaluator(dg));
    let mut pieces = vec![Piece::constant(f64::NEG_INFINITY, 0.0, g(0.0))];
    for w in bounds.windows(2) {
        pieces.push(Piece::with_limits(w[0], w[1], ge.clone(), Some(de.clone()), g(w[0]), g(w[1])));
    }
    pieces.push(Piece::constant(cutoff, f64::INFINITY, g(cutoff)));
    BvFunction::trusted(pieces, bounds.iter().map(|&t| g(t)).collect(), g(0.0), g(cutoff))
}

fn transform(f: &Distribution, z: ComplexPoint, n: u32, tol: f64) -> Result<ComplexPoint> {
    check_point(z, n)?;
    check_half_line(f)?;
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(f.total(), 0.0));
    }
    let sup_f = f.primitive().sup_norm(tol)?;
    let cutoff = tail_cutoff(z, n, sup_f, tol);
    let re = integral_product(f, &kernel(z, n, false, cutoff)?, tol / 2.0)?;
    let im = if z.im == 0.0 { 0.0 } else { integral_product(f, &kernel(z, n, true, cutoff)?, tol / 2.0)? };
    Ok(Complex64::new(re, im))
}

/// `f̂(z) = ∫_0^∞ f(t) e^{-zt} dt` for `Re z > 0`, or `z = 0`.
pub fn laplace(f: &Distribution, z: ComplexPoint, tol: f64) -> Result<ComplexPoint> {
    transform(f, z, 0, tol)
}

/// `dⁿ f̂ / dzⁿ = (-1)ⁿ ∫_0^∞ f(t) tⁿ e^{-zt} dt`.
pub fn laplace_derivative(f: &Distribution, z: ComplexPoint, n: u32, tol: f64) -> Result<ComplexPoint> {
    let v = transform(f, z, n, tol)?;
    Ok(if n.is_multiple_of(2) { v } else { -v })
}

/// Maxima of `|f̂|` on arcs `|z| = r`, `|arg z| ≤ α`, sampled at 33 angles.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub alpha: f64,
    pub maxima: Vec<(f64, f64)>,
    /// Holds when the maxima strictly decrease with the radius.
    pub trend: Verdict,
}

pub fn growth_probe(f: &Distribution, alpha: f64, radii: &[f64], tol: f64) -> Result<GrowthReport> {
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&alpha) {
        return Err(Error::Domain(format!("cone half-angle must lie in [0, π/2), got {alpha}")));
    }
    let mut maxima = Vec::new();
    for &r in radii {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("radius must be positive, got {r}")));
        }
        let mut best: f64 = 0.0;
        for i in 0..33 {
            let theta = if alpha == 0.0 { 0.0 } else { -alpha + 2.0 * alpha * i as f64 / 32.0 };
            best = best.max(laplace(f, Complex64::from_polar(r, theta), tol)?.norm());
            if alpha == 0.0 {
                break;
            }
        }
        maxima.push((r, best));
    }
    let trend = if maxima.len() < 2 {
        Verdict::Inconclusive
    } else if maxima.windows(2).all(|w| w[1].1 < w[0].1) {
        Verdict::Holds
    } else {
        Verdict::Inconclusive
    };
    Ok(GrowthReport { alpha, maxima, trend })
}

/// `∫_0^∞ f(t) e^{-rt} dt = lim_{x→∞} F_r(x)` for `f = F'` with `F`
/// continuous on `[0, ∞)`, where
/// `F_r(x) = F(x) e^{-rx} - F(0) + r ∫_0^x F(t) e^{-rt} dt`.
pub fn weighted_integral(f_loc: &Evaluator, r: f64, tol: f64) -> Result<f64> {
    let f0 = f_loc(0.0);
    let fr = |x: f64| {
        let x = x.max(0.0);
        let boundary = f_loc(x) * (-r * x).exp() - f0;
        if r == 0.0 {
            return boundary;
        }
        let ux = to_u(x);
        let g = |u: f64| {
            let t = from_u(u);
            let v = f_loc(t) * (-r * t).exp() * jacobian(u);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        match integrate(g, 0.0, ux, tol * 1e-2) {
            Ok(v) => boundary + r * v,
            Err(_) => f64::NAN,
        }
    };
    detect_limit(&fr, Side::Positive, tol.max(1e-12), DEFAULT_DEPTH)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::f64::consts::FRAC_PI_4;

    const TOL: f64 = 1e-11;

    fn c(re: f64, im: f64) -> ComplexPoint {
        Complex64::new(re, im)
    }

    #[test]
    fn exponential_closed_form() {
        let f = fixtures::exp_decay();
        for z in [c(1.0, 0.0), c(0.5, 2.0), c(3.0, -7.0), c(0.1, 30.0)] {
            let v = laplace(&f, z, TOL).unwrap();
            let exact = 1.0 / (z + 1.0);
            assert!((v - exact).norm() < 1e-9, "{z} {v} {exact}");
        }
        assert!((laplace(&f, c(1.0, 0.0), TOL).unwrap().re - 0.5).abs() < 1e-10);
    }

    #[test]
    fn sinc_closed_form() {
        let f = fixtures::sinc_positive();
        for x in [0.5, 1.0, 3.0] {
            let v = laplace(&f, c(x, 0.0), 1e-10).unwrap();
            assert!((v.re - (1.0 / x).atan()).abs() < 1e-8, "{x} {v}");
        }
        assert!((laplace(&f, c(1.0, 0.0), 1e-10).unwrap().re - FRAC_PI_4).abs() < 1e-8);
        // cross-check by direct quadrature of sin t / t e^{-t}
        let q = crate::numerics::integrate_to_infinity(|t| if t == 0.0 { 1.0 } else { t.sin() / t * (-t).exp() }, 0.0, 1e-12).unwrap();
        assert!((q - FRAC_PI_4).abs() < 1e-10);
    }

    #[test]
    fn origin_is_total_integral() {
        for f in [fixtures::exp_decay(), fixtures::sinc_positive(), fixtures::ramp_indicator(0.0, 2.0)] {
            assert_eq!(laplace(&f, c(0.0, 0.0), TOL).unwrap(), c(f.total(), 0.0));
        }
    }

    #[test]
    fn domain_errors() {
        let f = fixtures::exp_decay();
        assert!(matches!(laplace(&f, c(0.0, 1.0), TOL), Err(Error::Domain(_))));
        assert!(matches!(laplace(&f, c(-1.0, 0.0), TOL), Err(Error::Domain(_))));
        assert!(matches!(laplace_derivative(&f, c(0.0, 0.0), 1, TOL), Err(Error::Domain(_))));
        assert!(matches!(laplace(&fixtures::arctan(), c(1.0, 0.0), TOL), Err(Error::Domain(_))));
    }

    #[test]
    fn derivative_closed_form_and_degenerate() {
        let f = fixtures::exp_decay();
        let d = laplace_derivative(&f, c(1.0, 0.0), 1, TOL).unwrap();
        assert!((d.re + 0.25).abs() < 1e-10 && d.im.abs() < 1e-15);
        for n in 2..=4u32 {
            let z = c(0.7, 1.3);
            let exact = (1.0 / (z + 1.0).powi(n as i32 + 1)) * (if n % 2 == 0 { 1.0 } else { -1.0 }) * (1..=n).product::<u32>() as f64;
            assert!((laplace_derivative(&f, z, n, TOL).unwrap() - exact).norm() < 1e-9);
        }
        let z = c(2.0, 0.5);
        assert_eq!(laplace_derivative(&f, z, 0, TOL).unwrap(), laplace(&f, z, TOL).unwrap());
    }

    #[test]
    fn derivative_matches_central_differences() {
        let h = 1e-3;
        for f in [fixtures::exp_decay(), fixtures::sinc_positive(), fixtures::ramp_indicator(0.5, 2.0)] {
            for z in [c(1.0, 0.0), c(0.8, 2.0)] {
                let d = laplace_derivative(&f, z, 1, 1e-12).unwrap();
                let fd = (laplace(&f, z + h, 1e-12).unwrap() - laplace(&f, z - h, 1e-12).unwrap()) / (2.0 * h);
                assert!((d - fd).norm() < 1e-5, "{z} {d} {fd}");
            }
        }
    }

    #[test]
    fn linearity_and_conjugate_symmetry() {
        let (f, g) = (fixtures::exp_decay(), fixtures::ramp_indicator(1.0, 3.0));
        let h = Distribution::linear_combine(2.5, &f, &g);
        for z in [c(0.5, 1.0), c(2.0, -3.0)] {
            let lhs = laplace(&h, z, TOL).unwrap();
            let rhs = laplace(&f, z, TOL).unwrap() * 2.5 + laplace(&g, z, TOL).unwrap();
            assert!((lhs - rhs).norm() < 1e-9);
            let a = laplace(&f, z.conj(), TOL).unwrap();
            assert!((a - laplace(&f, z, TOL).unwrap().conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn cone_growth() {
        let f = fixtures::exp_decay();
        let r = growth_probe(&f, FRAC_PI_4, &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0], 1e-10).unwrap();
        assert_eq!(r.trend, Verdict::Holds);
        for &(rad, m) in &r.maxima {
            // max over the arc of 1/|z + 1| is at the edge of the cone
            let edge = 1.0 / (Complex64::from_polar(rad, FRAC_PI_4) + 1.0).norm();
            assert!((m - edge).abs() < 1e-9);
        }
        let s = growth_probe(&fixtures::sinc_positive(), 0.0, &[1.0, 10.0, 100.0], 1e-10).unwrap();
        assert_eq!(s.trend, Verdict::Holds);
        for &(rad, m) in &s.maxima {
            assert!((m - (1.0 / rad).atan()).abs() < 1e-8);
        }
        let one = growth_probe(&f, 0.3, &[5.0], 1e-10).unwrap();
        assert_eq!(one.trend, Verdict::Inconclusive);
        assert_eq!(one.maxima.len(), 1);
    }

    #[test]
    fn weighted_integrals() {
        let v = weighted_integral(&evaluator(|x| x), 1.0, 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        let v = weighted_integral(&evaluator(|x| x * x), 1.0, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
        let v = weighted_integral(&evaluator(|x| x.sin()), 0.5, 1e-10).unwrap();
        assert!((v - 0.5 / 1.25).abs() < 1e-9);
        assert!(matches!(weighted_integral(&evaluator(|x| x), 0.0, 1e-10), Err(Error::NoLimitAtInfinity { .. })));
        assert!(matches!(weighted_integral(&evaluator(|x| x), -0.1, 1e-10), Err(Error::NoLimitAtInfinity { .. })));
    }
}
