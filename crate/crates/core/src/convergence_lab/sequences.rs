use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function_core::evaluator;
use crate::integral_core::{piecewise_linear, Distribution};

type Generator = Arc<dyn Fn(u32) -> Distribution + Send + Sync>;

/// A sequence `n ↦ f_n` in the space, `n ≥ 1`.
#[derive(Clone)]
pub struct DistributionSequence {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    generator: Generator,
}

impl fmt::Debug for DistributionSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistributionSequence").field("name", &self.name).field("params", &self.params).finish()
    }
}

impl DistributionSequence {
    pub fn new<G: Fn(u32) -> Distribution + Send + Sync + 'static>(name: &str, params: BTreeMap<String, f64>, g: G) -> Self {
        DistributionSequence { name: name.to_string(), params, generator: Arc::new(g) }
    }

    /// The constant sequence `f_n = f`.
    pub fn constant(name: &str, f: Distribution) -> Self {
        Self::new(name, BTreeMap::new(), move |_| f.clone())
    }

    pub fn at(&self, n: u32) -> Distribution {
        (self.generator)(n.max(1))
    }
}

pub const FIXTURE_NAMES: [&str; 8] = [
    "traveling_block",
    "signed_blocks",
    "power_ramp",
    "sine_burst",
    "triangle_out",
    "triangle_in",
    "char_interval",
    "char_symmetric",
];

/// Amplitude law `a_n = c n^p` read from `params`.
fn amplitude(params: &BTreeMap<String, f64>, p: f64, c: f64) -> (f64, f64) {
    (params.get("p").copied().unwrap_or(p), params.get("c").copied().unwrap_or(c))
}

/// The sequence families of the convergence examples. Families with an
/// amplitude take `p` and `c` in `params`, giving `a_n = c n^p`; defaults are
/// `a_n = n³` for `triangle_out`, `a_n = n²` for `triangle_in` and `a_n = 1`
/// for `char_symmetric`.
pub fn fixtures(name: &str, params: &BTreeMap<String, f64>) -> Result<DistributionSequence> {
    let mut params = params.clone();
    let seq = match name {
        // f_n = χ_[n, n+1]
        "traveling_block" => DistributionSequence::new(name, params, |n| {
            let n = n as f64;
            piecewise_linear(&[(n, 0.0), (n + 1.0, 1.0)])
        }),
        // f_n = χ_(n-1, n) - χ_(n, n+1)
        "signed_blocks" => DistributionSequence::new(name, params, |n| {
            let n = n as f64;
            piecewise_linear(&[(n - 1.0, 0.0), (n, 1.0), (n + 1.0, 0.0)])
        }),
        // F_n(t) = t^n on [0, 1]
        "power_ramp" => DistributionSequence::new(name, params, |n| {
            let k = n as i32;
            let eval = evaluator(move |x: f64| {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    x.powi(k)
                }
            });
            Distribution::from_trusted(eval, 0.0, 1.0).with_knots([0.0, 1.0])
        }),
        // f_n(t) = n² sin(nt) on |t| ≤ π
        "sine_burst" => DistributionSequence::new(name, params, |n| {
            let nf = n as f64;
            let c = (nf * PI).cos();
            let eval = evaluator(move |x: f64| if x.abs() >= PI { 0.0 } else { nf * (c - (nf * x).cos()) });
            let knots: Vec<f64> = (-(n as i64)..=n as i64).map(|k| k as f64 * PI / nf).collect();
            Distribution::from_trusted(eval, 0.0, 0.0).with_knots(knots)
        }),
        "triangle_out" => {
            let (p, c) = amplitude(&params, 3.0, 1.0);
            params.insert("p".into(), p);
            params.insert("c".into(), c);
            DistributionSequence::new(name, params, move |n| {
                let nf = n as f64;
                let a = c * nf.powf(p);
                piecewise_linear(&[(nf - 1.0, 0.0), (nf, a), (nf + 1.0, 0.0)])
            })
        }
        "triangle_in" => {
            let (p, c) = amplitude(&params, 2.0, 1.0);
            params.insert("p".into(), p);
            params.insert("c".into(), c);
            DistributionSequence::new(name, params, move |n| {
                let nf = n as f64;
                let a = c * nf.powf(p);
                piecewise_linear(&[(0.0, 0.0), (1.0 / nf, a / nf), (2.0 / nf, 0.0)])
            })
        }
        // f_n = χ_[-n, n]
        "char_interval" => DistributionSequence::new(name, params, |n| {
            let n = n as f64;
            piecewise_linear(&[(-n, 0.0), (n, 2.0 * n)])
        }),
        // f_n = a_n on [1, 2], -a_n on [-2, -1]
        "char_symmetric" => {
            let (p, c) = amplitude(&params, 0.0, 1.0);
            params.insert("p".into(), p);
            params.insert("c".into(), c);
            DistributionSequence::new(name, params, move |n| {
                let a = c * (n as f64).powf(p);
                piecewise_linear(&[(-2.0, 0.0), (-1.0, -a), (1.0, -a), (2.0, 0.0)])
            })
        }
        _ => return Err(Error::UnknownFixture(name.to_string())),
    };
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_core::ExtendedReal as E;

    fn seq(name: &str) -> DistributionSequence {
        fixtures(name, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn triangle_out_at_two() {
        let f = seq("triangle_out").at(2);
        for (x, v) in [(0.5, 0.0), (1.0, 0.0), (1.5, 4.0), (2.0, 8.0), (2.25, 6.0), (3.0, 0.0), (7.0, 0.0)] {
            assert_eq!(f.primitive_at(x), v);
        }
    }

    #[test]
    fn power_ramp_at_three() {
        let f = seq("power_ramp").at(3);
        for x in [0.1, 0.5, 0.9] {
            assert!((f.primitive_at(x) - x * x * x).abs() < 1e-15);
        }
        assert_eq!(f.total(), 1.0);
    }

    #[test]
    fn char_symmetric_unit_blocks() {
        let f = seq("char_symmetric").at(5);
        assert_eq!(f.integral(E::Finite(1.0), E::Finite(2.0)), 1.0);
        assert_eq!(f.integral(E::Finite(-2.0), E::Finite(-1.0)), -1.0);
        assert_eq!(f.total(), 0.0);
    }

    #[test]
    fn sine_burst_integral_and_norm() {
        for n in 1..=6 {
            let f = seq("sine_burst").at(n);
            assert!(f.total().abs() < 1e-12);
            assert!((f.alexiewicz(1e-10).unwrap() - 2.0 * n as f64).abs() < 1e-9);
            let direct = crate::numerics::integrate(|t| (n * n) as f64 * (n as f64 * t).sin(), -PI, 0.3, 1e-12).unwrap();
            assert!((f.primitive_at(0.3) - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn amplitude_parameters() {
        let mut p = BTreeMap::new();
        p.insert("p".to_string(), 1.0);
        p.insert("c".to_string(), 2.0);
        let s = fixtures("triangle_out", &p).unwrap();
        assert_eq!(s.at(5).primitive_at(5.0), 10.0);
        assert!(matches!(fixtures("nope", &p), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn all_fixtures_build() {
        for name in FIXTURE_NAMES {
            let s = seq(name);
            for n in [1, 2, 7] {
                let f = s.at(n);
                assert!(f.primitive_at(f64::NEG_INFINITY) == 0.0);
                assert!(f.primitive().extrema(1e-10).is_ok());
            }
        }
    }
}
