use std::fmt;
use std::str::FromStr;

use crate::bv_stieltjes::{indicator, rs_integral};
use crate::error::{Error, Result};
use crate::function_core::chart::from_u;
use crate::function_core::{build_continuous, evaluator, ContinuousFunctionBar, Evaluator, ExtendedReal};

/// Agreement threshold for deciding equality of two distributions.
pub const EQUALITY_TOL: f64 = 1e-9;

/// An integrable distribution `f = F'`, carried by its primitive `F`, which is
/// continuous on `[-∞, ∞]` with `F(-∞) = 0`.
#[derive(Clone, Debug)]
pub struct Distribution {
    primitive: ContinuousFunctionBar,
}

/// The three norms computed from the primitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    /// `sup |F|`.
    Alexiewicz,
    /// `sup_I |∫_I f| = sup F - inf F`.
    IntervalSup,
    /// `sup_x |∫ f χ_{(-∞, x]}|`, a lower bound for the dual BV norm.
    DualBvLower,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::Alexiewicz, NormKind::IntervalSup, NormKind::DualBvLower];

    pub fn name(self) -> &'static str {
        match self {
            NormKind::Alexiewicz => "alexiewicz",
            NormKind::IntervalSup => "interval_sup",
            NormKind::DualBvLower => "dual_bv_lower",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        NormKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown norm kind `{s}`")))
    }
}

impl Distribution {
    /// Shifts an audited primitive by `-F(-∞)`.
    pub fn try_from_primitive(f: ContinuousFunctionBar) -> Result<Self> {
        let c = f.limit_neg();
        if c == 0.0 {
            return Ok(Distribution { primitive: f });
        }
        Ok(Distribution { primitive: f.map(move |v| v - c) })
    }

    /// Audits `eval` as an element of `C⁰(ℝ̄)` and shifts it into `B_C`.
    pub fn from_primitive_fn(eval: Evaluator, limit_neg: f64, limit_pos: f64, tol: f64) -> Result<Self> {
        Self::try_from_primitive(build_continuous(eval, limit_neg, limit_pos, tol)?)
    }

    /// Wraps a primitive known to be continuous, with `F(-∞)` given.
    pub fn from_trusted(eval: Evaluator, limit_neg: f64, limit_pos: f64) -> Self {
        Self::try_from_primitive(ContinuousFunctionBar::trusted(eval, limit_neg, limit_pos)).expect("shift never fails")
    }

    pub fn zero() -> Self {
        Distribution { primitive: ContinuousFunctionBar::constant(0.0) }
    }

    pub fn primitive(&self) -> &ContinuousFunctionBar {
        &self.primitive
    }

    /// `F(x)`, the integral over `[-∞, x]`.
    #[inline]
    pub fn primitive_at(&self, x: f64) -> f64 {
        self.primitive.eval(x)
    }

    /// `∫_a^b f = F(b) - F(a)`.
    pub fn integral(&self, a: ExtendedReal, b: ExtendedReal) -> f64 {
        if a == b {
            return 0.0;
        }
        self.primitive.at(b) - self.primitive.at(a)
    }

    /// `∫_{-∞}^{∞} f = F(∞)`.
    pub fn total(&self) -> f64 {
        self.primitive.limit_pos()
    }

    pub fn with_knots<I: IntoIterator<Item = f64>>(self, knots: I) -> Self {
        Distribution { primitive: self.primitive.with_knots(knots) }
    }

    pub fn norm(&self, kind: NormKind, tol: f64) -> Result<f64> {
        let e = self.primitive.extrema(tol)?;
        match kind {
            NormKind::Alexiewicz => Ok(e.max.abs().max(e.min.abs())),
            NormKind::IntervalSup => Ok(e.max - e.min),
            NormKind::DualBvLower => {
                // pair f with χ_{[-∞, x]} at the two extremal abscissae
                let pair = |x: ExtendedReal| -> Result<f64> {
                    let g = indicator(ExtendedReal::NegInf, x, true, true)?;
                    let dg = rs_integral(&self.primitive, &g, ExtendedReal::NegInf, ExtendedReal::PosInf, tol)?;
                    Ok(self.total() * g.value_pos_inf() - dg)
                };
                let hi = pair(e.argmax)?;
                let lo = pair(e.argmin)?;
                Ok(hi.max(-lo).max(0.0))
            }
        }
    }

    /// `‖f‖ = sup |F|`.
    pub fn alexiewicz(&self, tol: f64) -> Result<f64> {
        self.norm(NormKind::Alexiewicz, tol)
    }

    /// `τ_t f`, with primitive `x ↦ F(x - t)`.
    pub fn translate(&self, t: f64) -> Self {
        if t == 0.0 {
            return self.clone();
        }
        Distribution { primitive: self.primitive.shifted(t) }
    }

    /// `a f + g`.
    pub fn linear_combine(a: f64, f: &Distribution, g: &Distribution) -> Self {
        if a == 0.0 {
            return g.clone();
        }
        Distribution { primitive: f.primitive.zip(&g.primitive, move |x, y| a * x + y) }
    }

    pub fn scale(&self, a: f64) -> Self {
        Distribution { primitive: self.primitive.map(move |v| a * v) }
    }

    pub fn add(&self, other: &Distribution) -> Self {
        Self::linear_combine(1.0, self, other)
    }

    pub fn sub(&self, other: &Distribution) -> Self {
        Self::linear_combine(-1.0, other, self)
    }

    /// Replaces the primitive by `h(F)` for a continuous `h` with `h(0) = 0`.
    pub(crate) fn map_primitive<H: Fn(f64) -> f64 + Send + Sync + 'static>(&self, h: H) -> Self {
        Distribution { primitive: self.primitive.map(h) }
    }

    pub(crate) fn zip_primitive<H: Fn(f64, f64) -> f64 + Send + Sync + 'static>(&self, other: &Self, h: H) -> Self {
        Distribution { primitive: self.primitive.zip(&other.primitive, h) }
    }

    /// Semi-decision of equality: primitives agree within `tol` on the audit
    /// grid and the knots.
    pub fn approx_eq(&self, other: &Distribution, tol: f64) -> bool {
        let mut us = self.primitive.sample_u(crate::function_core::continuous::AUDIT_CELLS);
        us.extend(other.primitive.sample_u(0));
        us.iter().all(|&u| {
            let x = from_u(u);
            (self.primitive.eval(x) - other.primitive.eval(x)).abs() <= tol
        })
    }

    /// The evaluator of the primitive, extended to `±inf`.
    pub fn primitive_evaluator(&self) -> Evaluator {
        self.primitive.evaluator()
    }
}

impl PartialEq for Distribution {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, EQUALITY_TOL)
    }
}

/// `f ↦ ∫_a^b f`.
pub fn integral(f: &Distribution, a: ExtendedReal, b: ExtendedReal) -> f64 {
    f.integral(a, b)
}

pub fn norm(f: &Distribution, kind: NormKind, tol: f64) -> Result<f64> {
    f.norm(kind, tol)
}

pub fn translate(f: &Distribution, t: f64) -> Distribution {
    f.translate(t)
}

pub fn linear_combine(a: f64, f: &Distribution, g: &Distribution) -> Distribution {
    Distribution::linear_combine(a, f, g)
}

pub fn try_from_primitive(f: ContinuousFunctionBar) -> Result<Distribution> {
    Distribution::try_from_primitive(f)
}

/// A primitive given piecewise-linearly by its nodes; constant outside them.
pub fn piecewise_linear(nodes: &[(f64, f64)]) -> Distribution {
    let nodes: Vec<(f64, f64)> = nodes.to_vec();
    let (first, last) = (nodes[0].1, nodes[nodes.len() - 1].1);
    let knots: Vec<f64> = nodes.iter().map(|n| n.0).collect();
    let eval = evaluator(move |x: f64| {
        if x <= nodes[0].0 {
            return nodes[0].1;
        }
        let i = nodes.partition_point(|n| n.0 <= x);
        if i >= nodes.len() {
            return nodes[nodes.len() - 1].1;
        }
        let (x0, y0) = nodes[i - 1];
        let (x1, y1) = nodes[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    });
    Distribution::from_trusted(eval, first, last).with_knots(knots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::function_core::ExtendedReal as E;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    const TOL: f64 = 1e-10;

    fn sine_burst(n: u32) -> Distribution {
        let nf = n as f64;
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        Distribution::from_trusted(
            evaluator(move |x: f64| if x.abs() >= PI { 0.0 } else { nf * (sign - (nf * x).cos()) }),
            0.0,
            0.0,
        )
        .with_knots((0..=2 * n).map(move |k| -PI + k as f64 * PI / nf))
    }

    #[test]
    fn shifts_into_b_c() {
        let d = fixtures::arctan();
        assert_eq!(d.primitive_at(f64::NEG_INFINITY), 0.0);
        assert!((d.primitive_at(0.0) - FRAC_PI_2).abs() < 1e-15);
        let h = evaluator(|x| if x >= 0.0 { 1.0 } else { 0.0 });
        assert!(matches!(Distribution::from_primitive_fn(h, 0.0, 1.0, TOL), Err(Error::NotContinuous { .. })));
        assert!(Distribution::from_primitive_fn(evaluator(crate::numerics::cantor), 0.0, 1.0, TOL).is_ok());
    }

    #[test]
    fn endpoint_integrals() {
        let v = fixtures::x2cos().integral(E::Finite(0.0), E::Finite(1.0));
        assert!((v - 1f64.cos()).abs() < 1e-12);
        assert_eq!(fixtures::cantor().integral(E::Finite(0.0), E::Finite(1.0)), 1.0);
        for n in 1..10 {
            let p = Distribution::from_trusted(evaluator(move |x: f64| x.clamp(0.0, 1.0).powi(n)), 0.0, 1.0);
            assert_eq!(p.integral(E::Finite(0.0), E::Finite(1.0)), 1.0);
        }
        assert_eq!(fixtures::arctan().integral(E::Finite(2.0), E::Finite(2.0)), 0.0);
    }

    #[test]
    fn norm_of_sine_burst() {
        for n in 1..=8 {
            let v = sine_burst(n).norm(NormKind::Alexiewicz, TOL).unwrap();
            assert!((v - 2.0 * n as f64).abs() < 1e-9, "n={n}: {v}");
        }
    }

    #[test]
    fn norm_of_shrinking_triangle() {
        for n in 1..=6 {
            let nf = n as f64;
            let a = nf * nf;
            let d = piecewise_linear(&[(0.0, 0.0), (1.0 / nf, a / nf), (2.0 / nf, 0.0)]);
            assert!((d.alexiewicz(TOL).unwrap() - a / nf).abs() < 1e-12);
        }
    }

    #[test]
    fn equivalent_norm_sandwich() {
        for (name, f) in fixtures::named() {
            let a = f.norm(NormKind::Alexiewicz, TOL).unwrap();
            let i = f.norm(NormKind::IntervalSup, TOL).unwrap();
            let d = f.norm(NormKind::DualBvLower, TOL).unwrap();
            assert!(a <= i + 1e-12 && i <= 2.0 * a + 1e-12, "{name}");
            assert!(d <= a + 1e-9, "{name}: {d} > {a}");
            assert!((d - a).abs() < 1e-9, "{name}: {d} vs {a}");
        }
    }

    #[test]
    fn translation() {
        let f = fixtures::arctan();
        assert!(f.translate(0.0) == f);
        assert!((f.translate(5.0).alexiewicz(TOL).unwrap() - PI).abs() < 1e-12);
        let c = fixtures::cantor();
        let gaps: Vec<f64> = [1e-1, 1e-2, 1e-3].iter().map(|&t| c.sub(&c.translate(t)).alexiewicz(TOL).unwrap()).collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
        for (name, f) in fixtures::named() {
            let n = f.alexiewicz(TOL).unwrap();
            for t in [-10.0, -1.0, -0.1, 0.1, 1.0, 10.0] {
                assert!((f.translate(t).alexiewicz(TOL).unwrap() - n).abs() < 1e-9, "{name} t={t}");
            }
        }
    }

    #[test]
    fn linear_combinations() {
        let (f, g) = (fixtures::arctan(), fixtures::cantor());
        assert!(Distribution::linear_combine(0.0, &f, &g) == g);
        let z = Distribution::linear_combine(-1.0, &f, &f);
        assert_eq!(z.alexiewicz(TOL).unwrap(), 0.0);
        let h = Distribution::linear_combine(2.0, &f, &g);
        assert!((h.total() - (2.0 * f.total() + g.total())).abs() < 1e-12);
    }

    #[test]
    fn parse_norm_kind() {
        assert_eq!("interval_sup".parse::<NormKind>().unwrap(), NormKind::IntervalSup);
        assert!("sup".parse::<NormKind>().is_err());
    }

    fn arb_fixture() -> impl Strategy<Value = Distribution> {
        (0..fixtures::named().len(), -2.0f64..2.0, -3.0f64..3.0)
            .prop_map(|(i, a, t)| fixtures::named()[i].1.scale(a).translate(t))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn norm_axioms(f in arb_fixture(), g in arb_fixture(), a in -5.0f64..5.0) {
            let nf = f.alexiewicz(TOL).unwrap();
            let naf = f.scale(a).alexiewicz(TOL).unwrap();
            prop_assert!((naf - a.abs() * nf).abs() <= 1e-12 * (1.0 + naf));
            let nsum = f.add(&g).alexiewicz(TOL).unwrap();
            prop_assert!(nsum <= nf + g.alexiewicz(TOL).unwrap() + TOL);
        }

        #[test]
        fn ftc_round_trip(i in 0..10usize, xs in prop::collection::vec(-20.0f64..20.0, 50)) {
            let (_, f) = &fixtures::named()[i];
            for x in xs {
                prop_assert_eq!(f.integral(E::NegInf, E::Finite(x)), f.primitive_at(x) - f.primitive_at(f64::NEG_INFINITY));
            }
        }

        #[test]
        fn additivity(f in arb_fixture(), a in -10.0f64..0.0, b in 0.0f64..1.0, c in 1.0f64..10.0) {
            let (a, b, c) = (E::Finite(a), E::Finite(b), E::Finite(c));
            let lhs = f.integral(a, b) + f.integral(b, c);
            prop_assert!((lhs - f.integral(a, c)).abs() <= 4.0 * f64::EPSILON * (1.0 + lhs.abs()));
        }
    }
}
