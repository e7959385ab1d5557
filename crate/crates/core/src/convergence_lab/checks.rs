use std::f64::consts::PI;

use super::{Check, ConvergenceReport, DistributionSequence, Evidence, Mode, Verdict};
use crate::bv_stieltjes::{indicator, BvFunction};
use crate::error::Result;
use crate::fixtures::staircase;
use crate::function_core::chart::{from_u, to_u};
use crate::function_core::continuous::refine_max;
use crate::function_core::{bump, evaluator, ExtendedReal, TestFunction};
use crate::integral_core::Distribution;
use crate::product_calculus::{integral_product, pair_test_function};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub n_max: u32,
    /// Quadrature tolerance for norms and pairings.
    pub tol: f64,
    /// Relative threshold of the trend rule.
    pub trend_tol: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { n_max: 64, tol: 1e-10, trend_tol: 0.05 }
    }
}

/// A witness of the quasi-uniform condition at `point`: for `epsilon` and
/// `big_n`, the index `n ≥ big_n` and radius `delta` satisfy it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiWitness {
    pub point: ExtendedReal,
    pub epsilon: f64,
    pub big_n: u32,
    pub n: u32,
    pub delta: f64,
}

/// The indices at which sequences are sampled: every `n ≤ 8`, then steps of
/// about a quarter, always ending at `n_max`.
pub fn n_ladder(n_max: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut n = 1;
    while n <= n_max {
        out.push(n);
        n += (n / 4).max(1);
    }
    if out.last() != Some(&n_max) {
        out.push(n_max);
    }
    out
}

/// The trend rule on the last five evidence values. Holds when their
/// magnitudes decrease and stay below `trend_tol (1 + |first|)`; fails when
/// they do not decrease and stay above that threshold; otherwise
/// inconclusive. `tol` is the slack of the underlying computation.
pub fn trend_verdict(values: &[Evidence], tol: f64, trend_tol: f64) -> Verdict {
    if values.len() < 5 {
        return Verdict::Inconclusive;
    }
    let slack = 10.0 * tol;
    let thr = trend_tol * (1.0 + values[0].value.abs());
    let m: Vec<f64> = values[values.len() - 5..].iter().map(|e| e.value.abs()).collect();
    let falling = m.windows(2).all(|w| w[1] <= w[0] + slack);
    let rising = m.windows(2).all(|w| w[1] >= w[0] - slack);
    if m.iter().all(|&v| v <= slack) || (falling && m.iter().all(|&v| v <= thr)) {
        Verdict::Holds
    } else if rising && m.iter().all(|&v| v > thr + slack) {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    }
}

/// Boundedness rule: holds when the last five values stay within the maximum
/// of the earlier ones; fails when they keep growing past twice it.
fn bounded_verdict(values: &[Evidence], tol: f64) -> Verdict {
    if values.len() < 6 {
        return Verdict::Inconclusive;
    }
    let k = values.len() - 5;
    let head = values[..k].iter().map(|e| e.value).fold(0.0, f64::max);
    let tail: Vec<f64> = values[k..].iter().map(|e| e.value).collect();
    if tail.iter().all(|&v| v <= head * (1.0 + 1e-9) + tol) {
        Verdict::Holds
    } else if tail.windows(2).all(|w| w[1] >= w[0]) && tail[4] > 2.0 * head {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    }
}

/// Radius rule: holds when the radii of the last five indices do not fall
/// below the earlier minimum; fails when the final radius is at most a
/// quarter of the one at the middle of the ladder.
fn radius_verdict(values: &[Evidence]) -> Verdict {
    if values.len() < 6 {
        return Verdict::Inconclusive;
    }
    let k = values.len() - 5;
    let head = values[..k].iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
    let tail: Vec<f64> = values[k..].iter().map(|e| e.value).collect();
    let mid = values[values.len() / 2].value;
    if tail.iter().all(|&v| v >= head) {
        Verdict::Holds
    } else if tail.windows(2).all(|w| w[1] <= w[0]) && tail[4] <= mid / 4.0 {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    }
}

fn report(seq: &DistributionSequence, mode: Mode, opts: &ReportOptions, checks: Vec<Check>) -> ConvergenceReport {
    let verdict = Verdict::all(checks.iter().map(|c| c.verdict));
    ConvergenceReport { sequence: seq.name.clone(), mode, n_range: (1, opts.n_max), verdict, checks, witnesses: Vec::new() }
}

/// `‖f_n - f‖`.
pub fn strong_distance(seq: &DistributionSequence, candidate: &Distribution, n: u32, tol: f64) -> Result<f64> {
    seq.at(n).sub(candidate).alexiewicz(tol)
}

pub fn strong_report(seq: &DistributionSequence, candidate: &Distribution, opts: &ReportOptions) -> Result<ConvergenceReport> {
    let mut evidence = Vec::new();
    for n in n_ladder(opts.n_max) {
        evidence.push(Evidence { n, value: strong_distance(seq, candidate, n, opts.tol)? });
    }
    let verdict = trend_verdict(&evidence, opts.tol, opts.trend_tol);
    Ok(report(seq, Mode::Strong, opts, vec![Check { label: "norm".into(), verdict, evidence }]))
}

/// Bumps at centres `{-10, -5, -2, 0, 2, 5, 10}` with widths `{0.5, 1, 2, 4}`
/// and one bump covering `[-20, 20]`.
pub fn default_test_battery() -> Vec<TestFunction> {
    let mut out = Vec::new();
    for c in [-10.0, -5.0, -2.0, 0.0, 2.0, 5.0, 10.0] {
        for w in [0.5, 1.0, 2.0, 4.0] {
            out.push(bump(c, w));
        }
    }
    out.push(bump(0.0, 20.0));
    out
}

/// `1`, Heaviside, `χ_[0,1]`, the normalised arctangent and a staircase of
/// variation 2.
pub fn default_bv_battery() -> Vec<(String, BvFunction)> {
    let atan = BvFunction::monotone(
        evaluator(|x: f64| x.atan() / PI + 0.5),
        Some(evaluator(|x: f64| 1.0 / (PI * (1.0 + x * x)))),
        0.0,
        1.0,
    )
    .expect("monotone");
    vec![
        ("one".into(), BvFunction::constant(1.0)),
        ("heaviside".into(), BvFunction::heaviside()),
        (
            "indicator[0,1]".into(),
            indicator(ExtendedReal::Finite(0.0), ExtendedReal::Finite(1.0), true, true).expect("indicator"),
        ),
        ("arctan".into(), atan),
        ("staircase".into(), staircase(&[(-1.0, 0.5), (0.0, 1.0), (1.0, 0.0)])),
    ]
}

/// `⟨f_n - f, φ⟩` for each test function; overall verdict holds when every
/// element's pairings trend to zero.
pub fn weak_d_report(
    seq: &DistributionSequence,
    candidate: &Distribution,
    battery: &[TestFunction],
    opts: &ReportOptions,
) -> Result<ConvergenceReport> {
    let mut rows: Vec<Vec<Evidence>> = vec![Vec::new(); battery.len()];
    for n in n_ladder(opts.n_max) {
        let d = seq.at(n).sub(candidate);
        for (phi, row) in battery.iter().zip(rows.iter_mut()) {
            row.push(Evidence { n, value: pair_test_function(&d, phi, opts.tol)? });
        }
    }
    let checks = battery
        .iter()
        .zip(rows)
        .map(|(phi, evidence)| Check {
            label: format!("bump({}, {})", phi.center, phi.width),
            verdict: trend_verdict(&evidence, opts.tol, opts.trend_tol),
            evidence,
        })
        .collect();
    Ok(report(seq, Mode::WeakD, opts, checks))
}

/// `∫ (f_n - f) g` for each BV function; the constant `1` is always included.
pub fn weak_bv_report(
    seq: &DistributionSequence,
    candidate: &Distribution,
    battery: &[(String, BvFunction)],
    opts: &ReportOptions,
) -> Result<ConvergenceReport> {
    let mut battery = battery.to_vec();
    let has_one = battery.iter().any(|(_, g)| g.variation() == 0.0 && g.eval(0.0) == 1.0);
    if !has_one {
        battery.insert(0, ("one".into(), BvFunction::constant(1.0)));
    }
    let mut rows: Vec<Vec<Evidence>> = vec![Vec::new(); battery.len()];
    for n in n_ladder(opts.n_max) {
        let d = seq.at(n).sub(candidate);
        for ((_, g), row) in battery.iter().zip(rows.iter_mut()) {
            row.push(Evidence { n, value: integral_product(&d, g, opts.tol)? });
        }
    }
    let checks = battery
        .iter()
        .zip(rows)
        .map(|((label, _), evidence)| Check {
            label: label.clone(),
            verdict: trend_verdict(&evidence, opts.tol, opts.trend_tol),
            evidence,
        })
        .collect();
    Ok(report(seq, Mode::WeakBv, opts, checks))
}

/// Maximum of `|h|` over `[ua, ub]` in the compact coordinate, sampled on a
/// uniform grid plus the given knots and polished.
fn sup_abs_u(h: &dyn Fn(f64) -> f64, ua: f64, ub: f64, knots: &[f64]) -> Result<f64> {
    if ua >= ub {
        return Ok(h(from_u(ua)).abs());
    }
    let mut pts: Vec<f64> = (0..=128).map(|i| ua + (ub - ua) * i as f64 / 128.0).collect();
    pts.extend(knots.iter().map(|&k| to_u(k)).filter(|&u| u > ua && u < ub));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let (_, v) = refine_max(&|u| h(from_u(u)).abs(), &pts)?;
    Ok(v)
}

/// The compact-coordinate neighbourhood of radius `delta` about `x`; at
/// `±∞` it is `{±y > 1/delta}`.
fn neighbourhood(x: ExtendedReal, delta: f64) -> (f64, f64) {
    match x {
        ExtendedReal::Finite(x) => (to_u(x - delta), to_u(x + delta)),
        ExtendedReal::PosInf => (to_u(1.0 / delta), 1.0),
        ExtendedReal::NegInf => (-1.0, to_u(-1.0 / delta)),
    }
}

const DELTA_LADDER: i32 = 40;

fn deltas() -> impl Iterator<Item = f64> {
    (0..=DELTA_LADDER).map(|k| 2f64.powi(-k))
}

fn probes() -> Vec<ExtendedReal> {
    use ExtendedReal::*;
    vec![NegInf, Finite(-10.0), Finite(-2.0), Finite(-1.0), Finite(0.0), Finite(1.0), Finite(2.0), Finite(10.0), PosInf]
}

/// Searches, for each audited point, each `ε ∈ {10⁻¹, 10⁻², 10⁻³}` and each
/// dyadic `N ≤ n_max/2`, an index `n ∈ [N, n_max]` and a dyadic `δ` with
/// `|F_n(y) - F(y)| < ε` on the `δ`-neighbourhood. Pointwise convergence at
/// each point is checked first with the trend rule. A failed search is
/// inconclusive, not a failure.
pub fn quasi_uniform_check(
    seq: &DistributionSequence,
    limit: &dyn Fn(f64) -> f64,
    points: &[ExtendedReal],
    opts: &ReportOptions,
) -> Result<ConvergenceReport> {
    let ladder = n_ladder(opts.n_max);
    let fs: Vec<(u32, Distribution)> = (1..=opts.n_max).map(|n| (n, seq.at(n))).collect();
    let mut checks = Vec::new();
    let mut witnesses = Vec::new();
    for &x in points {
        let xf = x.to_f64();
        let evidence: Vec<Evidence> =
            ladder.iter().map(|&n| Evidence { n, value: fs[n as usize - 1].1.primitive_at(xf) - limit(xf) }).collect();
        let last = evidence.last().map_or(0.0, |e| e.value.abs());
        let mut verdict = trend_verdict(&evidence, opts.tol, opts.trend_tol);
        if last <= opts.tol {
            verdict = Verdict::Holds;
        }
        if verdict == Verdict::Holds {
            'eps: for eps in [1e-1, 1e-2, 1e-3] {
                let mut big_n = 1;
                while big_n <= (opts.n_max / 2).max(1) {
                    let mut found = None;
                    'n: for (n, f) in &fs[big_n as usize - 1..] {
                        if (f.primitive_at(xf) - limit(xf)).abs() >= eps {
                            continue;
                        }
                        let knots = f.primitive().knots();
                        for delta in deltas() {
                            let (ua, ub) = neighbourhood(x, delta);
                            let dev = sup_abs_u(&|y| f.primitive_at(y) - limit(y), ua, ub, knots)?;
                            if dev < eps {
                                found = Some((*n, delta));
                                break 'n;
                            }
                        }
                    }
                    match found {
                        Some((n, delta)) => witnesses.push(QuasiWitness { point: x, epsilon: eps, big_n, n, delta }),
                        None => {
                            verdict = Verdict::Inconclusive;
                            break 'eps;
                        }
                    }
                    big_n *= 2;
                }
            }
        }
        checks.push(Check { label: format!("x={x}"), verdict, evidence });
    }
    let mut r = report(seq, Mode::QuasiUniform, opts, checks);
    r.witnesses = witnesses;
    Ok(r)
}

/// Largest dyadic `δ ≤ 1` with `|F(y) - F(x)| < eps` on the neighbourhood,
/// or `0` if none down to `2⁻⁴⁰`.
fn equicontinuity_radius(f: &Distribution, x: ExtendedReal, eps: f64) -> Result<f64> {
    let fx = f.primitive().at(x);
    let knots = f.primitive().knots();
    for delta in deltas() {
        let (ua, ub) = neighbourhood(x, delta);
        if sup_abs_u(&|y| f.primitive_at(y) - fx, ua, ub, knots)? < eps {
            return Ok(delta);
        }
    }
    Ok(0.0)
}

const EQUI_EPS: f64 = 0.1;

/// Audits the hypotheses of the sufficient conditions and, where they pass,
/// verifies the conclusions:
///
/// * uniform boundedness on each compact and pointwise convergence of the
///   primitives give `⟨f_n, φ⟩ → ⟨f, φ⟩` (checked on a small bump battery);
/// * equicontinuity of the primitives on the extended line gives
///   `‖f_n - f‖ → 0`.
pub fn theorem_checkers(
    seq: &DistributionSequence,
    candidate: &Distribution,
    compacts: &[(f64, f64)],
    opts: &ReportOptions,
) -> Result<ConvergenceReport> {
    let ladder = n_ladder(opts.n_max);
    let fs: Vec<(u32, Distribution)> = ladder.iter().map(|&n| (n, seq.at(n))).collect();
    let mut checks = Vec::new();

    let mut bound_rows = Vec::new();
    for &(a, b) in compacts {
        let mut evidence = Vec::new();
        for (n, f) in &fs {
            let knots = f.primitive().knots();
            let v = sup_abs_u(&|y| f.primitive_at(y), to_u(a), to_u(b), knots)?;
            evidence.push(Evidence { n: *n, value: v });
        }
        let verdict = bounded_verdict(&evidence, opts.tol);
        bound_rows.push(verdict);
        checks.push(Check { label: format!("bounded[{a}, {b}]"), verdict, evidence });
    }

    let mut pointwise = Vec::new();
    let mut equi = Vec::new();
    let mut equi_min = vec![f64::INFINITY; fs.len()];
    for x in probes() {
        let fx = candidate.primitive().at(x);
        let evidence: Vec<Evidence> = fs.iter().map(|(n, f)| Evidence { n: *n, value: f.primitive().at(x) - fx }).collect();
        let verdict = trend_verdict(&evidence, opts.tol, opts.trend_tol);
        pointwise.push(verdict);
        checks.push(Check { label: format!("pointwise x={x}"), verdict, evidence });

        let mut evidence = Vec::new();
        for (i, (n, f)) in fs.iter().enumerate() {
            let r = equicontinuity_radius(f, x, EQUI_EPS)?;
            equi_min[i] = equi_min[i].min(r);
            evidence.push(Evidence { n: *n, value: r });
        }
        let verdict = radius_verdict(&evidence);
        equi.push(verdict);
        checks.push(Check { label: format!("equicontinuous x={x}"), verdict, evidence });
    }

    let hyp = Verdict::all(bound_rows.iter().chain(pointwise.iter()).copied());
    let hyp_evidence: Vec<Evidence> = checks[..compacts.len()]
        .iter()
        .flat_map(|c| c.evidence.iter().copied())
        .fold(Vec::<Evidence>::new(), |mut acc, e| {
            match acc.iter_mut().find(|a| a.n == e.n) {
                Some(a) => a.value = a.value.max(e.value),
                None => acc.push(e),
            }
            acc
        });
    let hyp_evidence = if hyp_evidence.is_empty() { vec![Evidence { n: opts.n_max, value: 0.0 }] } else { hyp_evidence };
    checks.push(Check { label: "hypotheses: bounded and pointwise".into(), verdict: hyp, evidence: hyp_evidence });
    let mut conclusions = Vec::new();
    if hyp == Verdict::Holds {
        let battery: Vec<TestFunction> =
            [-5.0, 0.0, 5.0].iter().flat_map(|&c| [1.0, 4.0].map(|w| bump(c, w))).collect();
        let mut evidence = Vec::new();
        for (n, f) in &fs {
            let d = f.sub(candidate);
            let mut worst: f64 = 0.0;
            for phi in &battery {
                worst = worst.max(pair_test_function(&d, phi, opts.tol)?.abs());
            }
            evidence.push(Evidence { n: *n, value: worst });
        }
        let verdict = trend_verdict(&evidence, opts.tol, opts.trend_tol);
        conclusions.push(verdict);
        checks.push(Check { label: "conclusion: weak in D".into(), verdict, evidence });
    }

    let hyp = Verdict::all(equi.iter().copied());
    let evidence = fs.iter().zip(&equi_min).map(|((n, _), &r)| Evidence { n: *n, value: r }).collect();
    checks.push(Check { label: "hypotheses: equicontinuous".into(), verdict: hyp, evidence });
    if hyp == Verdict::Holds {
        let mut evidence = Vec::new();
        for (n, f) in &fs {
            evidence.push(Evidence { n: *n, value: f.sub(candidate).alexiewicz(opts.tol)? });
        }
        let verdict = trend_verdict(&evidence, opts.tol, opts.trend_tol);
        conclusions.push(verdict);
        checks.push(Check { label: "conclusion: strong".into(), verdict, evidence });
    }

    let verdict = if conclusions.is_empty() { Verdict::Inconclusive } else { Verdict::all(conclusions) };
    Ok(ConvergenceReport { sequence: seq.name.clone(), mode: Mode::Theorems, n_range: (1, opts.n_max), verdict, checks, witnesses: Vec::new() })
}

/// The BV-sequence variant: a uniform bound on `V g_n` and pointwise
/// convergence `g_n → g` give `∫ f g_n → ∫ f g`.
pub fn theorem_bv_checker(
    f: &Distribution,
    gs: &dyn Fn(u32) -> BvFunction,
    g: &BvFunction,
    opts: &ReportOptions,
) -> Result<ConvergenceReport> {
    let ladder = n_ladder(opts.n_max);
    let seq: Vec<(u32, BvFunction)> = ladder.iter().map(|&n| (n, gs(n))).collect();
    let mut checks = Vec::new();
    let evidence: Vec<Evidence> = seq.iter().map(|(n, gn)| Evidence { n: *n, value: gn.variation() }).collect();
    let mut hyps = vec![bounded_verdict(&evidence, opts.tol)];
    checks.push(Check { label: "variation bound".into(), verdict: hyps[0], evidence });
    for x in probes() {
        let gx = g.at(x);
        let evidence: Vec<Evidence> = seq.iter().map(|(n, gn)| Evidence { n: *n, value: gn.at(x) - gx }).collect();
        let verdict = trend_verdict(&evidence, opts.tol, opts.trend_tol);
        hyps.push(verdict);
        checks.push(Check { label: format!("pointwise x={x}"), verdict, evidence });
    }
    let hyp = Verdict::all(hyps);
    let mut verdict = Verdict::Inconclusive;
    if hyp == Verdict::Holds {
        let target = integral_product(f, g, opts.tol)?;
        let mut evidence = Vec::new();
        for (n, gn) in &seq {
            evidence.push(Evidence { n: *n, value: integral_product(f, gn, opts.tol)? - target });
        }
        verdict = trend_verdict(&evidence, opts.tol, opts.trend_tol);
        checks.push(Check { label: "conclusion: integrals".into(), verdict, evidence });
    }
    Ok(ConvergenceReport { sequence: "bv".into(), mode: Mode::Theorems, n_range: (1, opts.n_max), verdict, checks, witnesses: Vec::new() })
}
