//! Closed-form distributions used across tests, the acceptance suite and the
//! command line.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::bv_stieltjes::BvFunction;
use crate::function_core::evaluator;
use crate::integral_core::{hake_from_integrand, piecewise_linear, Distribution};
use crate::numerics::{cantor as cantor_fn, sine_integral};

/// `f = 1/(1 + x²)`, primitive `arctan x + π/2`.
pub fn arctan() -> Distribution {
    Distribution::from_trusted(evaluator(f64::atan), -FRAC_PI_2, FRAC_PI_2)
}

/// The Cantor–Lebesgue function on `[0, 1]` as a primitive.
pub fn cantor() -> Distribution {
    Distribution::from_trusted(evaluator(cantor_fn), 0.0, 1.0).with_knots([0.0, 1.0])
}

/// `f(t) = sin t / t` on `t > 0`, primitive `Si(x)` for `x ≥ 0` and `0` before.
pub fn sinc_positive() -> Distribution {
    Distribution::from_trusted(evaluator(|x| if x <= 0.0 { 0.0 } else { sine_integral(x) }), 0.0, FRAC_PI_2)
        .with_knots([0.0, PI])
}

/// Primitive `x² cos(x⁻²)` on `[0, 1]`, `0` before and `cos 1` after.
pub fn x2cos() -> Distribution {
    let c1 = 1f64.cos();
    Distribution::from_trusted(evaluator(x2cos_primitive), 0.0, c1).with_knots([0.0, 1.0])
}

pub fn x2cos_primitive(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1f64.cos()
    } else {
        x * x * (x * x).recip().cos()
    }
}

/// Primitive `exp(-(x - c)²)`; `f(t) = -2(t - c) e^{-(t - c)²}`.
pub fn gaussian(c: f64) -> Distribution {
    Distribution::from_trusted(evaluator(move |x: f64| (-(x - c) * (x - c)).exp()), 0.0, 0.0).with_knots([c])
}

/// `χ_{[a, b]}`, primitive `clamp(x - a, 0, b - a)`.
pub fn ramp_indicator(a: f64, b: f64) -> Distribution {
    piecewise_linear(&[(a, 0.0), (b, b - a)])
}

/// `f(t) = e^{-t}` on `t ≥ 0`, primitive `1 - e^{-x}`.
pub fn exp_decay() -> Distribution {
    Distribution::from_trusted(evaluator(|x: f64| if x <= 0.0 { 0.0 } else { -(-x).exp_m1() }), 0.0, 1.0).with_knots([0.0])
}

/// Primitive `sin x` on `[0, 2π]`, zero elsewhere; takes both signs.
pub fn sine_bump() -> Distribution {
    Distribution::from_trusted(evaluator(|x: f64| if (0.0..=2.0 * PI).contains(&x) { x.sin() } else { 0.0 }), 0.0, 0.0)
        .with_knots([0.0, FRAC_PI_2, PI, 1.5 * PI, 2.0 * PI])
}

/// Primitive `x / (1 + x²)`.
pub fn rational_bump() -> Distribution {
    Distribution::from_trusted(evaluator(|x: f64| x / (1.0 + x * x)), 0.0, 0.0).with_knots([-1.0, 1.0])
}

/// `f(t) = sin(t²)` on the whole line through its extrapolated primitive.
pub fn fresnel(tol: f64) -> crate::Result<Distribution> {
    hake_from_integrand(evaluator(|t: f64| (t * t).sin()), tol)
}

/// Named fixtures, each with its closed-form primitive on the finite line.
pub fn named() -> Vec<(&'static str, Distribution)> {
    vec![
        ("arctan", arctan()),
        ("cantor", cantor()),
        ("sinc_positive", sinc_positive()),
        ("x2cos", x2cos()),
        ("gaussian", gaussian(0.0)),
        ("gaussian_shifted", gaussian(1.0)),
        ("ramp_indicator", ramp_indicator(-1.0, 1.0)),
        ("exp_decay", exp_decay()),
        ("sine_bump", sine_bump()),
        ("rational_bump", rational_bump()),
    ]
}

/// The fixtures whose primitives are piecewise smooth. Stieltjes integrals
/// against them converge fast enough for tight tolerances; the Cantor and
/// `x² cos(x⁻²)` primitives need tolerances near `1e-6`.
pub fn smooth_named() -> Vec<(&'static str, Distribution)> {
    named().into_iter().filter(|(n, _)| !matches!(*n, "cantor" | "x2cos")).collect()
}

pub fn by_name(name: &str) -> Option<Distribution> {
    named().into_iter().find(|(n, _)| *n == name).map(|(_, d)| d)
}

/// A random element: a scaled, translated smooth fixture, or a sum of two.
pub fn random_distribution<R: Rng>(rng: &mut R) -> Distribution {
    let pool = smooth_named();
    let pick = |rng: &mut R| {
        let (_, d) = &pool[rng.gen_range(0..pool.len())];
        d.scale(rng.gen_range(-2.0..2.0)).translate(rng.gen_range(-3.0..3.0))
    };
    if rng.gen_bool(0.3) {
        let a = pick(rng);
        a.add(&pick(rng))
    } else {
        pick(rng)
    }
}

/// A random smooth-or-stepped BV function: a monotone arctan profile, a step
/// function, or their sum.
pub fn random_bv<R: Rng>(rng: &mut R) -> BvFunction {
    let smooth = |rng: &mut R| {
        let (c, s, a) = (rng.gen_range(-3.0..3.0), rng.gen_range(0.3..3.0), rng.gen_range(-2.0..2.0));
        let shift = rng.gen_range(-1.0..1.0);
        BvFunction::monotone(
            evaluator(move |x: f64| shift + a * ((x - c) / s).atan()),
            Some(evaluator(move |x: f64| a / (s * (1.0 + ((x - c) / s).powi(2))))),
            shift - a * FRAC_PI_2,
            shift + a * FRAC_PI_2,
        )
        .expect("monotone profile")
    };
    let steps = |rng: &mut R| {
        let k = rng.gen_range(1..4);
        let mut locs: Vec<f64> = (0..k).map(|_| rng.gen_range(-4.0..4.0)).collect();
        locs.sort_by(f64::total_cmp);
        locs.dedup();
        let vals: Vec<f64> = (0..=locs.len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        BvFunction::step(&locs, &vals).expect("step function")
    };
    match rng.gen_range(0..3) {
        0 => smooth(rng),
        1 => steps(rng),
        _ => smooth(rng).add(&steps(rng)),
    }
}

/// A random monotone BV function with jumps allowed.
pub fn random_monotone_bv<R: Rng>(rng: &mut R) -> BvFunction {
    let up = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let (c, s, a) = (rng.gen_range(-3.0..3.0), rng.gen_range(0.3..3.0), rng.gen_range(0.1..2.0) * up);
    let base = rng.gen_range(-1.0..1.0);
    let smooth = BvFunction::monotone(
        evaluator(move |x: f64| base + a * ((x - c) / s).atan()),
        Some(evaluator(move |x: f64| a / (s * (1.0 + ((x - c) / s).powi(2))))),
        base - a * FRAC_PI_2,
        base + a * FRAC_PI_2,
    )
    .expect("monotone profile");
    if rng.gen_bool(0.5) {
        return smooth;
    }
    let loc = rng.gen_range(-3.0..3.0);
    let jump = rng.gen_range(0.1..1.5) * up;
    smooth.add(&BvFunction::step(&[loc], &[0.0, jump]).expect("step"))
}

/// A piecewise constant BV function from explicit pieces, used by tests that
/// need a staircase of known variation.
pub fn staircase(levels: &[(f64, f64)]) -> BvFunction {
    let locs: Vec<f64> = levels.iter().map(|l| l.0).collect();
    let mut vals = vec![0.0];
    vals.extend(levels.iter().map(|l| l.1));
    BvFunction::step(&locs, &vals).expect("increasing locations")
}

