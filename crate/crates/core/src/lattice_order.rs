//! The order `f ≤ g ⟺ F ≤ G`, the lattice operations, Jordan-type parts and
//! the variation norm of absolutely integrable elements.

use std::fmt;

use crate::error::{Error, Result};
use crate::function_core::chart::from_u;
use crate::function_core::continuous::AUDIT_CELLS;
use crate::function_core::ExtendedReal;
use crate::integral_core::Distribution;
use crate::numerics::bisect;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    LessOrEqual,
    GreaterOrEqual,
    Equal,
    Incomparable,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::LessOrEqual => "less_or_equal",
            Relation::GreaterOrEqual => "greater_or_equal",
            Relation::Equal => "equal",
            Relation::Incomparable => "incomparable",
        })
    }
}

/// Outcome of [`compare`]. For incomparable pairs `above` is a point with
/// `F > G + tol`, `below` one with `F < G - tol`, and `crossings` lists the
/// sign changes of `F - G` found on the audit grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderResult {
    pub relation: Relation,
    pub above: Option<ExtendedReal>,
    pub below: Option<ExtendedReal>,
    pub crossings: Vec<f64>,
}

/// Pointwise comparison of the primitives over `[-∞, ∞]` with a tolerance band.
pub fn compare(f: &Distribution, g: &Distribution, tol: f64) -> Result<OrderResult> {
    let d = f.sub(g);
    let e = d.primitive().extrema(tol)?;
    let above = (e.max > tol).then_some(e.argmax);
    let below = (e.min < -tol).then_some(e.argmin);
    let relation = match (above.is_some(), below.is_some()) {
        (false, false) => Relation::Equal,
        (false, true) => Relation::LessOrEqual,
        (true, false) => Relation::GreaterOrEqual,
        (true, true) => Relation::Incomparable,
    };
    let mut crossings = Vec::new();
    if relation == Relation::Incomparable {
        let pts = d.primitive().sample_u(4 * AUDIT_CELLS);
        let h = |u: f64| d.primitive_at(from_u(u));
        let vals: Vec<f64> = pts.iter().map(|&u| h(u)).collect();
        let mut last: Option<(usize, f64)> = None;
        for (i, &v) in vals.iter().enumerate() {
            if v.abs() <= tol {
                continue;
            }
            if let Some((j, w)) = last {
                if (w > 0.0) != (v > 0.0) {
                    let s = w.signum();
                    crossings.push(from_u(bisect(&|u| s * h(u), pts[j], pts[i], 200)));
                }
            }
            last = Some((i, v));
        }
    }
    Ok(OrderResult { relation, above, below, crossings })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeOp {
    Join,
    Meet,
}

/// `f ∨ g = (F ∨ G)'` and `f ∧ g = (F ∧ G)'`.
pub fn lattice_op(f: &Distribution, g: &Distribution, op: LatticeOp) -> Distribution {
    match op {
        LatticeOp::Join => f.zip_primitive(g, f64::max),
        LatticeOp::Meet => f.zip_primitive(g, f64::min),
    }
}

pub fn join(f: &Distribution, g: &Distribution) -> Distribution {
    lattice_op(f, g, LatticeOp::Join)
}

pub fn meet(f: &Distribution, g: &Distribution) -> Distribution {
    lattice_op(f, g, LatticeOp::Meet)
}

/// `f⁺ = (F ∨ 0)'`, `f⁻ = (-(F ∧ 0))'` and `|f| = |F|'`, so that
/// `F = F⁺ - F⁻` and `|F| = F⁺ + F⁻`.
#[derive(Debug, Clone)]
pub struct Parts {
    pub plus: Distribution,
    pub minus: Distribution,
    pub abs: Distribution,
}

pub fn parts(f: &Distribution) -> Parts {
    Parts {
        plus: f.map_primitive(|v| v.max(0.0)),
        minus: f.map_primitive(|v| -(v.min(0.0))),
        abs: f.map_primitive(f64::abs),
    }
}

/// `‖f‖_ABS = V F` when finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AbsNorm {
    Finite(f64),
    Divergent { lower_bound: f64 },
}

const ABS_MAX_CELLS: usize = 2_000_000;
const DIVERGENCE_RUN: usize = 8;

/// Estimates `V F` by refining partition sums in the compact chart. Only
/// cells whose bisection still increases the sum are refined further. The
/// sum is accepted once two successive refinements add less than `tol`; it is
/// declared divergent when eight successive refinements each add more than
/// `tol` without the increments shrinking, or when `levels` refinements pass
/// while it is still growing. The lower bound is the last partition sum.
pub fn abs_norm(f: &Distribution, levels: u32, tol: f64) -> Result<AbsNorm> {
    let big_f = f.primitive();
    let pts = big_f.sample_u(AUDIT_CELLS);
    let val = |u: f64| big_f.eval(from_u(u));
    // active cells: (u_l, u_r, F_l, F_r, quiet levels)
    let mut cells: Vec<(f64, f64, f64, f64, u8)> = Vec::with_capacity(pts.len());
    let vals: Vec<f64> = pts.iter().map(|&u| val(u)).collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eval(f64::NAN));
    }
    let mut sum = 0.0;
    for i in 0..pts.len() - 1 {
        sum += (vals[i + 1] - vals[i]).abs();
        cells.push((pts[i], pts[i + 1], vals[i], vals[i + 1], 0));
    }
    let mut increments: Vec<f64> = Vec::new();
    for _ in 0..levels {
        let mut next = Vec::with_capacity(cells.len() * 2);
        let mut inc = 0.0;
        for &(l, r, fl, fr, quiet) in &cells {
            let m = 0.5 * (l + r);
            if m <= l || m >= r {
                continue;
            }
            let fm = val(m);
            let delta = (fl - fm).abs() + (fm - fr).abs() - (fl - fr).abs();
            inc += delta;
            let eps = 1e-15 * (1.0 + fl.abs().max(fr.abs()));
            let q = if delta <= eps { quiet + 1 } else { 0 };
            if q < 2 {
                next.push((l, m, fl, fm, q));
                next.push((m, r, fm, fr, q));
            }
        }
        sum += inc;
        increments.push(inc);
        cells = next;
        let k = increments.len();
        if k >= 2 && increments[k - 1] < tol && increments[k - 2] < tol {
            return Ok(AbsNorm::Finite(sum));
        }
        if cells.is_empty() {
            return Ok(AbsNorm::Finite(sum));
        }
        if k > DIVERGENCE_RUN {
            let run = &increments[k - DIVERGENCE_RUN..];
            let steady = run.iter().all(|&i| i > tol) && run[DIVERGENCE_RUN - 1] >= 0.5 * increments[k - DIVERGENCE_RUN - 1];
            if steady {
                return Ok(AbsNorm::Divergent { lower_bound: sum });
            }
        }
        if cells.len() > ABS_MAX_CELLS {
            return Err(Error::BudgetExceeded("variation refinement"));
        }
    }
    Ok(AbsNorm::Divergent { lower_bound: sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::function_core::{bump, ExtendedReal as E};
    use crate::integral_core::{piecewise_linear, NormKind};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    const TOL: f64 = 1e-10;

    fn brute_variation(d: &Distribution, lo: f64, hi: f64, n: usize) -> f64 {
        let mut v = 0.0;
        let mut prev = d.primitive_at(lo);
        for i in 1..=n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            let y = d.primitive_at(x);
            v += (y - prev).abs();
            prev = y;
        }
        v
    }

    #[test]
    fn sinc_is_nonnegative() {
        let r = compare(&fixtures::sinc_positive(), &Distribution::zero(), TOL).unwrap();
        assert_eq!(r.relation, Relation::GreaterOrEqual);
    }

    #[test]
    fn shifted_gaussian_derivatives_are_incomparable() {
        let f = fixtures::gaussian(0.0);
        let g = fixtures::gaussian(1.0);
        let r = compare(&f, &g, TOL).unwrap();
        assert_eq!(r.relation, Relation::Incomparable);
        let above = r.above.unwrap().to_f64();
        let below = r.below.unwrap().to_f64();
        assert!(f.primitive_at(above) - g.primitive_at(above) > TOL);
        assert!(f.primitive_at(below) - g.primitive_at(below) < -TOL);
        assert_eq!(r.crossings.len(), 1);
        assert!((r.crossings[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn reflexive() {
        for (_, f) in fixtures::named() {
            assert_eq!(compare(&f, &f, TOL).unwrap().relation, Relation::Equal);
        }
    }

    #[test]
    fn join_identities() {
        for (_, f) in fixtures::named() {
            assert!(join(&f, &f).approx_eq(&f, 1e-15));
        }
        let g = fixtures::gaussian(0.0);
        assert!(join(&g, &Distribution::zero()).approx_eq(&g, 1e-15));
    }

    #[test]
    fn meet_is_below_both() {
        let all = fixtures::named();
        for (_, f) in &all {
            for (_, g) in &all {
                let m = meet(f, g);
                for h in [f, g] {
                    let r = compare(&m, h, TOL).unwrap().relation;
                    assert!(matches!(r, Relation::LessOrEqual | Relation::Equal));
                }
            }
        }
    }

    #[test]
    fn parts_of_sinc_and_sine_bump() {
        let f = fixtures::sinc_positive();
        let p = parts(&f);
        assert!(p.plus.approx_eq(&f, 1e-15));
        assert!(p.abs.approx_eq(&f, 1e-15));
        assert!(p.minus.approx_eq(&Distribution::zero(), 1e-15));

        let s = fixtures::sine_bump();
        let p = parts(&s);
        for q in [&p.plus, &p.minus, &p.abs] {
            assert!(q.alexiewicz(TOL).unwrap() > 0.5);
        }
        for i in 0..=400 {
            let x = -1.0 + 9.0 * i as f64 / 400.0;
            let v = s.primitive_at(x);
            assert_eq!(p.plus.primitive_at(x), v.max(0.0));
            assert_eq!(p.minus.primitive_at(x), (-v).max(0.0));
            assert!((p.plus.primitive_at(x) - p.minus.primitive_at(x) - v).abs() < 1e-15);
            assert!((p.plus.primitive_at(x) + p.minus.primitive_at(x) - v.abs()).abs() < 1e-15);
        }
        let z = parts(&Distribution::zero());
        for q in [z.plus, z.minus, z.abs] {
            assert!(q.approx_eq(&Distribution::zero(), 0.0));
        }
    }

    #[test]
    fn triangle_variation() {
        for n in 1..=5 {
            let nf = n as f64;
            let a = nf.powi(3);
            let d = piecewise_linear(&[(nf - 1.0, 0.0), (nf, a), (nf + 1.0, 0.0)]);
            let v = match abs_norm(&d, 40, TOL).unwrap() {
                AbsNorm::Finite(v) => v,
                other => panic!("{other:?}"),
            };
            assert!((v - 2.0 * a).abs() < 1e-9 * a);
            assert!((brute_variation(&d, nf - 2.0, nf + 2.0, 4000) - v).abs() < 1e-9 * a);
        }
    }

    #[test]
    fn arctan_variation_is_pi() {
        match abs_norm(&fixtures::arctan(), 40, TOL).unwrap() {
            AbsNorm::Finite(v) => assert!((v - PI).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sinc_variation_diverges() {
        match abs_norm(&fixtures::sinc_positive(), 40, TOL).unwrap() {
            AbsNorm::Divergent { lower_bound } => assert!(lower_bound > PI / 2.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn x2cos_variation_diverges() {
        assert!(matches!(abs_norm(&fixtures::x2cos(), 40, TOL).unwrap(), AbsNorm::Divergent { .. }));
    }

    #[test]
    fn abs_norm_bounds_bump_pairings() {
        for (name, f) in fixtures::smooth_named() {
            let v = match abs_norm(&f, 40, TOL).unwrap() {
                AbsNorm::Finite(v) => v,
                AbsNorm::Divergent { .. } => continue,
            };
            for (c, w) in [(0.0, 1.0), (0.5, 0.3), (-2.0, 3.0), (3.0, 0.5)] {
                let phi = bump(c, w);
                let pair = crate::product_calculus::pair_test_function(&f, &phi, TOL).unwrap();
                assert!(pair.abs() <= 2.0 * v * phi.sup() + 1e-8, "{name}");
            }
        }
    }

    #[test]
    fn abs_norm_of_abs_matches_norm() {
        for (name, f) in fixtures::named() {
            let a = f.norm(NormKind::Alexiewicz, TOL).unwrap();
            let b = parts(&f).abs.norm(NormKind::Alexiewicz, TOL).unwrap();
            assert!((a - b).abs() < 1e-12, "{name}");
        }
    }

    #[test]
    fn integral_dominated_by_abs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let f = fixtures::random_distribution(&mut rng);
            let p = parts(&f);
            for _ in 0..10 {
                let x: f64 = rand::Rng::gen_range(&mut rng, -20.0..20.0);
                assert!(f.integral(E::NegInf, E::Finite(x)).abs() <= p.abs.integral(E::NegInf, E::Finite(x)) + 1e-15);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn lattice_axioms(seed in any::<u64>(), a in 0.0f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = fixtures::random_distribution(&mut rng);
            let g0 = fixtures::random_distribution(&mut rng);
            let h = fixtures::random_distribution(&mut rng);
            // force an ordered pair
            let g = join(&f, &g0);
            let r = compare(&f, &g, TOL).unwrap().relation;
            prop_assert!(matches!(r, Relation::LessOrEqual | Relation::Equal));
            let r = compare(&f.add(&h), &g.add(&h), TOL).unwrap().relation;
            prop_assert!(matches!(r, Relation::LessOrEqual | Relation::Equal));
            let r = compare(&f.scale(a), &g.scale(a), TOL * (1.0 + a)).unwrap().relation;
            prop_assert!(matches!(r, Relation::LessOrEqual | Relation::Equal));
            for u in crate::function_core::chart::uniform_u_grid(64) {
                let x = from_u(u);
                prop_assert!(f.primitive_at(x) <= g.primitive_at(x) + TOL);
            }
            let fa = parts(&f).abs;
            let ga = parts(&g0).abs;
            if matches!(compare(&fa, &ga, TOL).unwrap().relation, Relation::LessOrEqual | Relation::Equal) {
                prop_assert!(f.alexiewicz(TOL).unwrap() <= g0.alexiewicz(TOL).unwrap() + 2.0 * TOL);
            }
        }
    }
}
