use std::sync::OnceLock;

use super::continuous::{evaluator, Evaluator};
use crate::numerics::integrate;

/// A smooth compactly supported test function `amplitude · φ((x - center)/width)`
/// built on the standard bump `φ(s) = exp(1/(|s| - 1))` for `|s| < 1`.
#[derive(Clone)]
pub struct TestFunction {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
    eval: Evaluator,
    deriv: Evaluator,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("center", &self.center)
            .field("width", &self.width)
            .field("amplitude", &self.amplitude)
            .finish()
    }
}

fn phi(s: f64) -> f64 {
    let a = s.abs();
    if a >= 1.0 {
        0.0
    } else {
        (1.0 / (a - 1.0)).exp()
    }
}

fn dphi(s: f64) -> f64 {
    let a = s.abs();
    if a >= 1.0 || s == 0.0 {
        0.0
    } else {
        let d = a - 1.0;
        -s.signum() * phi(s) / (d * d)
    }
}

/// `∫_{-1}^{1} φ`.
pub fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| integrate(phi, -1.0, 1.0, 1e-15).expect("bump mass"))
}

impl TestFunction {
    fn scaled(center: f64, width: f64, amplitude: f64) -> Self {
        assert!(width > 0.0, "bump width must be positive");
        TestFunction {
            center,
            width,
            amplitude,
            eval: evaluator(move |x| amplitude * phi((x - center) / width)),
            deriv: evaluator(move |x| amplitude * dphi((x - center) / width) / width),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    #[inline]
    pub fn deriv(&self, x: f64) -> f64 {
        (self.deriv)(x)
    }

    pub fn evaluator(&self) -> Evaluator {
        self.eval.clone()
    }

    pub fn derivative_evaluator(&self) -> Evaluator {
        self.deriv.clone()
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }

    /// `∫ φ`.
    pub fn mass(&self) -> f64 {
        self.amplitude * self.width * bump_mass()
    }

    /// `max |φ|`, attained at the centre.
    pub fn sup(&self) -> f64 {
        self.amplitude.abs() * (-1f64).exp()
    }

    /// `max |φ'|` by sampling on the support.
    pub fn sup_deriv(&self) -> f64 {
        let (a, b) = self.support();
        (0..=4000)
            .map(|i| self.deriv(a + (b - a) * i as f64 / 4000.0).abs())
            .fold(0.0, f64::max)
    }

    /// `∫ G φ` for an ordinary function `G` by adaptive quadrature.
    pub fn pair(&self, g: &dyn Fn(f64) -> f64, tol: f64) -> f64 {
        let (a, b) = self.support();
        integrate(|x| g(x) * self.eval(x), a, b, tol).unwrap_or(f64::NAN)
    }
}

/// The bump `φ((x - center)/width)` with unit amplitude.
pub fn bump(center: f64, width: f64) -> TestFunction {
    TestFunction::scaled(center, width, 1.0)
}

/// Member `n` of the delta sequence at `x0`: the bump of width `1/n`
/// normalised to unit mass.
pub fn delta_sequence(x0: f64, n: u32) -> TestFunction {
    assert!(n >= 1);
    let w = 1.0 / n as f64;
    TestFunction::scaled(x0, w, 1.0 / (w * bump_mass()))
}
