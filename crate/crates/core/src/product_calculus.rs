//! Products of integrable distributions with BV multipliers, and the
//! theorems built on them: Hölder, change of variables, the second mean value
//! theorem and Taylor's theorem.

use crate::bv_stieltjes::{rs_integral, BvFunction, Piece, StieltjesTable};
use crate::error::{Error, Result};
use crate::function_core::chart::{from_u, to_u, uniform_u_grid};
use crate::function_core::continuous::{audit_continuity, extrema_on_interval, refine_max, AUDIT_CELLS, DEFAULT_DEPTH};
use crate::function_core::{evaluator, ContinuousFunctionBar, Evaluator, ExtendedReal, TestFunction};
use crate::integral_core::{Distribution, NormKind};
use crate::numerics::bisect;

/// `fg = H'` with `H(x) = F(x) g(x) - ∫_{[-∞, x]} F dg`.
pub fn multiply_bv(f: &Distribution, g: &BvFunction, tol: f64) -> Result<Distribution> {
    let table = StieltjesTable::build(f.primitive(), g, tol)?;
    let (big_f, gg) = (f.primitive().clone(), g.clone());
    let limit_pos = big_f.limit_pos() * g.value_pos_inf() - table.total();
    let eval = evaluator(move |x| big_f.eval(x) * gg.eval(x) - table.cumulative(x));
    let knots: Vec<f64> = f.primitive().knots().iter().copied().chain(g.breakpoints()).collect();
    Ok(Distribution::from_trusted(eval, 0.0, limit_pos).with_knots(knots))
}

/// `∫ fg = F(∞) g(∞) - ∫_{-∞}^{∞} F dg`.
pub fn integral_product(f: &Distribution, g: &BvFunction, tol: f64) -> Result<f64> {
    let dg = rs_integral(f.primitive(), g, ExtendedReal::NegInf, ExtendedReal::PosInf, tol)?;
    Ok(f.total() * g.value_pos_inf() - dg)
}

/// `⟨f, φ⟩ = ∫ fφ` for a test function.
pub fn pair_test_function(f: &Distribution, phi: &TestFunction, tol: f64) -> Result<f64> {
    integral_product(f, &BvFunction::from_test_function(phi), tol)
}

/// Both forms of the Hölder inequality for `|∫ fg|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderBound {
    /// `|∫ f| inf |g̃| + 2‖f‖ V g̃`.
    pub infimum_form: f64,
    /// `2‖f‖ (|g̃(-∞)| + V g̃)`.
    pub bv_norm_form: f64,
}

impl HolderBound {
    pub fn tightest(&self) -> f64 {
        self.infimum_form.min(self.bv_norm_form)
    }
}

pub fn holder_bound(f: &Distribution, g: &BvFunction, tol: f64) -> Result<HolderBound> {
    let gn = g.normalize_nbv();
    let norm = f.norm(NormKind::Alexiewicz, tol)?;
    let v = gn.variation();
    Ok(HolderBound { infimum_form: f.total().abs() * gn.inf_abs() + 2.0 * norm * v, bv_norm_form: 2.0 * norm * gn.bv_norm() })
}

/// `∫_{G(a)}^{G(b)} f = (F∘G)(b) - (F∘G)(a)` for any `G` continuous into the
/// extended line. The continuity of `G` is audited in the compact chart, so
/// `G` may run off to `±∞` at the ends.
pub fn change_of_variables(f: &Distribution, g: &Evaluator, a: ExtendedReal, b: ExtendedReal, tol: f64) -> Result<f64> {
    let (a, b) = (a.to_f64(), b.to_f64());
    if a == b {
        return Ok(0.0);
    }
    if !(a < b) {
        return Err(Error::IntervalEmpty { lo: a, hi: b });
    }
    let (ga, gb) = (g(a), g(b));
    let img = |x: f64| -> f64 {
        if x <= a {
            to_u(ga)
        } else if x >= b {
            to_u(gb)
        } else {
            to_u(g(x))
        }
    };
    let finite = a.is_finite() && b.is_finite();
    let grid: Vec<f64> = if finite {
        (0..=AUDIT_CELLS).map(|i| a + (b - a) * i as f64 / AUDIT_CELLS as f64).collect()
    } else {
        let (ua, ub) = (to_u(a), to_u(b));
        uniform_u_grid(AUDIT_CELLS).into_iter().map(|u| ua + (ub - ua) * (u + 1.0) / 2.0).collect()
    };
    let audited = if finite {
        audit_continuity(&img, &grid, tol, DEFAULT_DEPTH)
    } else {
        audit_continuity(&|s| img(from_u(s)), &grid, tol, DEFAULT_DEPTH)
    };
    audited.map_err(|(at, oscillation)| Error::NotContinuous { at: if finite { at } else { from_u(at) }, oscillation })?;
    if ga.is_nan() || gb.is_nan() {
        return Err(Error::Eval(if ga.is_nan() { a } else { b }));
    }
    Ok(f.primitive_at(gb) - f.primitive_at(ga))
}

/// Residual allowed in the second mean value identity.
pub const MVT_RESIDUAL: f64 = 1e-8;

/// The leftmost `ξ` in `[-∞, ∞]` with
/// `∫ fg = g(-∞) ∫_{-∞}^ξ f + g(∞) ∫_ξ^∞ f` for monotone `g`.
pub fn second_mvt_xi(f: &Distribution, g: &BvFunction, tol: f64) -> Result<ExtendedReal> {
    if !g.is_monotone() {
        return Err(Error::NonMonotone);
    }
    let (gl, gr) = (g.value_neg_inf(), g.value_pos_inf());
    if gl == gr {
        return Ok(ExtendedReal::NegInf);
    }
    let prod = integral_product(f, g, tol)?;
    let total = f.total();
    let target = (gr * total - prod) / (gr - gl);
    let big_f = f.primitive();
    let h = |u: f64| big_f.eval(from_u(u)) - target;
    let residual = |x: f64| {
        let fx = big_f.eval(x);
        (prod - gl * fx - gr * (total - fx)).abs()
    };
    let pts = big_f.sample_u(4 * AUDIT_CELLS);
    let vals: Vec<f64> = pts.iter().map(|&u| h(u)).collect();
    let mut xi = None;
    for i in 0..pts.len() {
        if vals[i] == 0.0 {
            xi = Some(from_u(pts[i]));
            break;
        }
        if i + 1 < pts.len() && (vals[i] < 0.0) != (vals[i + 1] < 0.0) && vals[i + 1] != 0.0 {
            let sign = vals[i].signum();
            let u = bisect(&|u| sign * h(u), pts[i], pts[i + 1], 200);
            xi = Some(from_u(u));
            break;
        }
    }
    let xi = match xi {
        Some(x) => x,
        None => {
            // the target is touched without a sign change: minimise |F - target|
            let (u, _) = refine_max(&|u| -h(u).abs(), &pts)?;
            from_u(u)
        }
    };
    let r = residual(xi);
    if r < MVT_RESIDUAL.max(100.0 * tol) {
        Ok(ExtendedReal::from_f64(xi))
    } else {
        Err(Error::ResidualTooLarge(r))
    }
}

/// Data for Taylor's theorem on `[a, b]`: the top derivative `f^{(n)}`, which
/// need only be continuous, and the values `f^{(k)}(a)` for `k = 0..=n`.
#[derive(Clone, Debug)]
pub struct TaylorInput {
    pub n: u32,
    pub a: f64,
    pub b: f64,
    pub top_derivative: ContinuousFunctionBar,
    pub coefficients: Vec<f64>,
}

impl TaylorInput {
    /// Audits the continuity of `f^{(n)}` on `[a, b]`.
    pub fn new(n: u32, a: f64, b: f64, top: Evaluator, coefficients: Vec<f64>, tol: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a <= b) {
            return Err(Error::IntervalEmpty { lo: a, hi: b });
        }
        if coefficients.len() != n as usize + 1 {
            return Err(Error::Domain(format!("expected {} coefficients, got {}", n + 1, coefficients.len())));
        }
        if a < b {
            let grid: Vec<f64> = (0..=AUDIT_CELLS).map(|i| a + (b - a) * i as f64 / AUDIT_CELLS as f64).collect();
            audit_continuity(&*top, &grid, tol, DEFAULT_DEPTH).map_err(|(at, oscillation)| Error::NotContinuous { at, oscillation })?;
        }
        let (ta, tb) = (top(a), top(b));
        let t = top.clone();
        let clamped = evaluator(move |x: f64| t(x.clamp(a, b)));
        Ok(TaylorInput { n, a, b, top_derivative: ContinuousFunctionBar::trusted(clamped, ta, tb), coefficients })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorOutput {
    pub polynomial: f64,
    pub remainder: f64,
    pub bound_pointwise: f64,
    pub bound_uniform: f64,
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `P_n(x)` and `R_n(x) = (1/n!) ∫_a^x f^{(n+1)}(t) (x - t)^n dt`, the latter
/// through one integration by parts against the monotone kernel `(x - t)^n`,
/// so `f^{(n+1)}` is never formed.
pub fn taylor_expand(input: &TaylorInput, x: f64, tol: f64) -> Result<TaylorOutput> {
    let (n, a, b) = (input.n, input.a, input.b);
    if !(a <= x && x <= b) {
        return Err(Error::Domain(format!("x = {x} outside [{a}, {b}]")));
    }
    let h = x - a;
    let poly = input.coefficients.iter().enumerate().map(|(k, c)| c * h.powi(k as i32) / factorial(k as u32)).sum();
    let top = &input.top_derivative;
    let fa = top.eval(a);
    let nf = factorial(n);
    if h == 0.0 {
        return Ok(TaylorOutput { polynomial: poly, remainder: 0.0, bound_pointwise: 0.0, bound_uniform: 0.0 });
    }
    let remainder = if n == 0 {
        top.eval(x) - fa
    } else {
        let ni = n as i32;
        let kernel = Piece::with_limits(
            a,
            x,
            evaluator(move |t: f64| (x - t).powi(ni)),
            Some(evaluator(move |t: f64| -(n as f64) * (x - t).powi(ni - 1))),
            h.powi(ni),
            0.0,
        );
        let g = BvFunction::trusted(
            vec![Piece::constant(f64::NEG_INFINITY, a, h.powi(ni)), kernel, Piece::constant(x, f64::INFINITY, 0.0)],
            vec![h.powi(ni), 0.0],
            h.powi(ni),
            0.0,
        )?;
        let dg = rs_integral(top, &g, ExtendedReal::Finite(a), ExtendedReal::Finite(x), tol)?;
        (-fa * h.powi(ni) - dg) / nf
    };
    let dev = |lo: f64, hi: f64| -> Result<f64> {
        let (mx, mn) = extrema_on_interval(&|t| top.eval(t) - fa, lo, hi)?;
        Ok(mx.abs().max(mn.abs()))
    };
    let scale = h.powi(n as i32) / nf;
    let bound_pointwise = scale * dev(a, x)?;
    let bound_uniform = scale * dev(a, b)?.max(dev(a, x)?);
    Ok(TaylorOutput { polynomial: poly, remainder, bound_pointwise, bound_uniform })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bv_stieltjes::indicator;
    use crate::fixtures;
    use crate::function_core::{bump, ExtendedReal as E};
    use crate::numerics::integrate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    const TOL: f64 = 1e-10;

    #[test]
    fn multiply_by_one_is_identity() {
        for (name, f) in fixtures::named() {
            let h = multiply_bv(&f, &BvFunction::constant(1.0), TOL).unwrap();
            assert!(h.approx_eq(&f, 1e-12), "{name}");
        }
    }

    #[test]
    fn indicator_multiplier_gives_interval_integral() {
        let f = fixtures::arctan();
        let g = indicator(E::Finite(-1.0), E::Finite(2.0), true, true).unwrap();
        let v = integral_product(&f, &g, TOL).unwrap();
        assert!((v - (2f64.atan() - (-1f64).atan())).abs() < 1e-14);
        let h = multiply_bv(&f, &g, TOL).unwrap();
        assert!((h.total() - v).abs() < 2.0 * TOL);
    }

    #[test]
    fn nbv_insensitivity() {
        let f = fixtures::gaussian(0.5);
        let mut g = fixtures::random_bv(&mut ChaCha8Rng::seed_from_u64(3));
        for (x, v) in [(-1.0, 7.0), (0.25, -3.0), (2.0, 11.0)] {
            g = g.with_point_change(x, v).unwrap();
        }
        let a = multiply_bv(&f, &g, TOL).unwrap();
        let b = multiply_bv(&f, &g.normalize_nbv(), TOL).unwrap();
        assert!(a.approx_eq(&b, 1e-9));
    }

    #[test]
    fn product_examples() {
        let v = integral_product(&fixtures::arctan(), &BvFunction::heaviside(), TOL).unwrap();
        assert!((v - FRAC_PI_2).abs() < 1e-15);
        let si = fixtures::sinc_positive();
        assert_eq!(integral_product(&si, &BvFunction::constant(1.0), TOL).unwrap(), FRAC_PI_2);
    }

    #[test]
    fn pairing_with_test_functions_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pool = fixtures::smooth_named();
        for k in 0..20 {
            let f = &pool[k % pool.len()].1;
            let phi = bump(rng.gen_range(-2.0..2.0), rng.gen_range(0.3..2.0));
            let (lo, hi) = phi.support();
            let oracle = -integrate(|x| f.primitive_at(x) * phi.deriv(x), lo, hi, 1e-13).unwrap();
            let v = pair_test_function(f, &phi, 1e-12).unwrap();
            assert!((v - oracle).abs() < 1e-8, "{k}: {v} vs {oracle}");
        }
        for f in [fixtures::cantor(), fixtures::x2cos()] {
            let phi = bump(0.5, 0.6);
            let oracle = -integrate(|x| f.primitive_at(x) * phi.deriv(x), -0.1, 1.1, 1e-9).unwrap();
            let v = pair_test_function(&f, &phi, 1e-8).unwrap();
            assert!((v - oracle).abs() < 1e-6, "{v} vs {oracle}");
        }
    }

    #[test]
    fn holder_examples_and_suite() {
        let f = fixtures::arctan();
        let b = holder_bound(&f, &BvFunction::constant(1.0), TOL).unwrap();
        assert!((b.infimum_form - PI).abs() < 1e-12);
        let b = holder_bound(&f, &BvFunction::heaviside(), TOL).unwrap();
        assert!((b.infimum_form - 2.0 * PI).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let f = fixtures::random_distribution(&mut rng);
            let g = fixtures::random_bv(&mut rng);
            let v = integral_product(&f, &g, TOL).unwrap().abs();
            let b = holder_bound(&f, &g, TOL).unwrap();
            assert!(v <= b.infimum_form + 1e-9 && v <= b.bv_norm_form + 1e-9);
        }
    }

    #[test]
    fn dual_continuity() {
        let f = fixtures::cantor();
        for k in 1..6 {
            let c = 10f64.powi(-k);
            let g = BvFunction::heaviside().scale(c);
            let v = integral_product(&f, &g, TOL).unwrap().abs();
            assert!(v <= 2.0 * f.alexiewicz(TOL).unwrap() * g.bv_norm() + 1e-15);
        }
    }

    fn sine_primitive() -> Distribution {
        Distribution::from_trusted(evaluator(|x: f64| x.clamp(-FRAC_PI_2, FRAC_PI_2).sin()), -1.0, 1.0)
    }

    #[test]
    fn change_of_variables_examples() {
        let f = sine_primitive();
        let sq = evaluator(|t: f64| t * t);
        let v = change_of_variables(&f, &sq, E::Finite(0.0), E::Finite(1.0), TOL).unwrap();
        assert!((v - 1f64.sin()).abs() < 1e-15);
        let cantor = evaluator(crate::numerics::cantor);
        for (name, f) in fixtures::named().into_iter().take(5) {
            let v = change_of_variables(&f, &cantor, E::Finite(0.0), E::Finite(1.0), TOL).unwrap();
            assert_eq!(v, f.primitive_at(1.0) - f.primitive_at(0.0), "{name}");
        }
        let tan = evaluator(f64::tan);
        let f = fixtures::arctan();
        let v = change_of_variables(&f, &tan, E::Finite(-FRAC_PI_2), E::Finite(FRAC_PI_2), TOL).unwrap();
        assert!((v - PI).abs() < 1e-15);
        let step = evaluator(|t| if t < 0.5 { 0.0 } else { 1.0 });
        assert!(matches!(change_of_variables(&f, &step, E::Finite(0.0), E::Finite(1.0), TOL), Err(Error::NotContinuous { .. })));
    }

    #[test]
    fn smooth_change_of_variables_matches_quadrature() {
        let f = fixtures::arctan();
        for (g, dg) in [
            (evaluator(|t: f64| t * t * t - t), evaluator(|t: f64| 3.0 * t * t - 1.0)),
            (evaluator(|t: f64| (2.0 * t).sin() * 3.0), evaluator(|t: f64| 6.0 * (2.0 * t).cos())),
        ] {
            let v = change_of_variables(&f, &g, E::Finite(-1.5), E::Finite(2.0), TOL).unwrap();
            let q = integrate(|t| dg(t) / (1.0 + g(t) * g(t)), -1.5, 2.0, 1e-12).unwrap();
            assert!((v - q).abs() < 1e-6);
        }
    }

    #[test]
    fn second_mvt_examples() {
        let f = fixtures::arctan();
        assert_eq!(second_mvt_xi(&f, &BvFunction::heaviside(), TOL).unwrap(), E::Finite(0.0));
        assert_eq!(second_mvt_xi(&f, &BvFunction::constant(3.0), TOL).unwrap(), E::NegInf);
        let g = indicator(E::Finite(0.0), E::Finite(1.0), true, true).unwrap();
        assert!(matches!(second_mvt_xi(&f, &g, TOL), Err(Error::NonMonotone)));
    }

    #[test]
    fn second_mvt_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let f = fixtures::random_distribution(&mut rng);
            let g = fixtures::random_monotone_bv(&mut rng);
            let xi = second_mvt_xi(&f, &g, TOL).unwrap();
            let lhs = integral_product(&f, &g, TOL).unwrap();
            let fx = f.primitive().at(xi);
            let rhs = g.value_neg_inf() * fx + g.value_pos_inf() * (f.total() - fx);
            assert!((lhs - rhs).abs() < MVT_RESIDUAL);
        }
    }

    #[test]
    fn taylor_examples() {
        let cube = TaylorInput::new(2, 0.0, 3.0, evaluator(|t| 6.0 * t), vec![0.0, 0.0, 0.0], TOL).unwrap();
        for x in [0.0, 0.5, 1.7, 3.0] {
            let o = taylor_expand(&cube, x, TOL).unwrap();
            assert_eq!(o.polynomial, 0.0);
            assert!((o.remainder - x * x * x).abs() < 1e-10 * (1.0 + x * x * x));
        }
        let kink = TaylorInput::new(1, 0.0, 2.0, evaluator(|t: f64| 2.0 * t.abs()), vec![0.0, 0.0], TOL).unwrap();
        for x in [0.3, 1.0, 2.0] {
            let o = taylor_expand(&kink, x, TOL).unwrap();
            assert!((o.remainder - x * x).abs() < 1e-10);
            assert!(o.remainder.abs() <= 2.0 * x * x + 1e-12);
            assert!(o.remainder.abs() <= o.bound_pointwise + 1e-12);
        }
        let f = fixtures::cantor();
        let zero = TaylorInput::new(0, 0.0, 1.0, f.primitive_evaluator(), vec![f.primitive_at(0.0)], TOL).unwrap();
        for x in [0.2, 0.5, 0.9] {
            let o = taylor_expand(&zero, x, TOL).unwrap();
            assert_eq!(o.remainder, f.integral(E::Finite(0.0), E::Finite(x)));
        }
    }

    #[test]
    fn taylor_polynomial_exactness() {
        // f(x) = x^d expanded at a = 0.5 with n = d - 1
        for d in 1..=6u32 {
            let n = d - 1;
            let a = 0.5f64;
            let falling = |k: u32| (0..k).map(|j| (d - j) as f64).product::<f64>();
            let coeffs: Vec<f64> = (0..=n).map(|k| falling(k) * a.powi((d - k) as i32)).collect();
            let c = falling(n);
            let input = TaylorInput::new(n, a, 2.0, evaluator(move |t: f64| c * t), coeffs, TOL).unwrap();
            for x in [0.5, 0.9, 1.3, 2.0] {
                let o = taylor_expand(&input, x, 1e-13).unwrap();
                let tail = (x - a).powi(d as i32);
                assert!((o.remainder - tail).abs() < 1e-10, "d={d} x={x}: {} vs {tail}", o.remainder);
                assert!((o.polynomial + o.remainder - x.powi(d as i32)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn taylor_bounds_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let tops: Vec<(Evaluator, f64)> = vec![
            (evaluator(f64::sin), TOL),
            (evaluator(|t: f64| t.abs().sqrt()), TOL),
            (evaluator(crate::numerics::cantor), 1e-7),
            (evaluator(fixtures::x2cos_primitive), 1e-7),
        ];
        for (top, tol) in tops {
            for n in 0..4u32 {
                let coeffs = vec![0.3; n as usize + 1];
                let input = TaylorInput::new(n, -0.5, 1.5, top.clone(), coeffs, TOL).unwrap();
                for _ in 0..25 {
                    let x = rng.gen_range(-0.5..1.5);
                    let o = taylor_expand(&input, x, tol).unwrap();
                    assert!(o.remainder.abs() <= o.bound_pointwise + 10.0 * tol);
                    assert!(o.bound_pointwise <= o.bound_uniform + 1e-15);
                }
            }
        }
    }
}
