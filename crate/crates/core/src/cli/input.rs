//! Turning command-line text into library objects: primitives from
//! expressions or named fixtures, BV functions from a small spec language,
//! and fixture files.
//!
//! BV specs:
//!
//! * `const(c)`, `heaviside`, `indicator(a, b)` (closed; ends may be `inf`)
//! * `step(v0; x1, v1; x2, v2; …)`: right-continuous, `v0` left of `x1`
//! * `mono(EXPR; b1, …, bk)`: continuous, monotone between the breakpoints
//! * `@name`: a `bv` block of the fixture file
//!
//! Fixture files are TOML, one table per fixture:
//!
//! ```toml
//! [bump]
//! kind = "primitive"
//! expr = "piecewise(0, 1, 0, x^2, 1)"
//!
//! [ramp]
//! kind = "bv"
//! spec = "mono(atan(x))"
//!
//! [tri]
//! kind = "sequence"
//! family = "triangle_out"
//! params = { p = 2.0, c = 1.0 }
//! ```
//!
//! A `primitive` block may declare `limit_neg` and `limit_pos`; otherwise the
//! limits are read off the tail ladder.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::expr::{parse_expression, Expression};
use super::CliError;
use crate::bv_stieltjes::{indicator, BvFunction, Piece};
use crate::convergence_lab::{fixtures as sequence_fixtures, DistributionSequence};
use crate::error::Side;
use crate::function_core::continuous::{audit_continuity, detect_limit};
use crate::function_core::{evaluator, ContinuousFunctionBar, Evaluator, ExtendedReal};
use crate::integral_core::Distribution;
use crate::{fixtures, numerics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixtureKind {
    Primitive,
    Bv,
    Sequence,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureSpec {
    pub kind: FixtureKind,
    pub expr: Option<String>,
    pub spec: Option<String>,
    pub family: Option<String>,
    pub limit_neg: Option<f64>,
    pub limit_pos: Option<f64>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default)]
pub struct Context {
    pub tol: f64,
    pub depth: u32,
    pub fixtures: BTreeMap<String, FixtureSpec>,
}

impl Context {
    pub fn load_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("--fixtures: cannot read {}: {e}", path.display())))?;
        self.fixtures = parse_fixture_file(&text)?;
        Ok(())
    }

    fn spec(&self, name: &str, kind: FixtureKind, flag: &str) -> Result<&FixtureSpec, CliError> {
        match self.fixtures.get(name) {
            Some(s) if s.kind == kind => Ok(s),
            Some(_) => Err(CliError::Usage(format!("{flag}: fixture `{name}` has the wrong kind"))),
            None => Err(CliError::Usage(format!("{flag}: unknown fixture `{name}`"))),
        }
    }
}

pub fn parse_fixture_file(text: &str) -> Result<BTreeMap<String, FixtureSpec>, CliError> {
    let map: BTreeMap<String, FixtureSpec> = toml::from_str(text).map_err(|e| CliError::Usage(format!("--fixtures: {e}")))?;
    for (name, s) in &map {
        let ok = match s.kind {
            FixtureKind::Primitive => s.expr.is_some(),
            FixtureKind::Bv => s.spec.is_some(),
            FixtureKind::Sequence => s.family.is_some(),
        };
        if !ok {
            return Err(CliError::Usage(format!("--fixtures: block `{name}` lacks the field its kind needs")));
        }
    }
    Ok(map)
}

pub fn expression(text: &str, flag: &str) -> Result<Expression, CliError> {
    parse_expression(text).map_err(|e| CliError::Usage(format!("{flag}: {e}")))
}

fn expr_evaluator(e: Expression) -> Evaluator {
    evaluator(move |x| e.eval(x))
}

/// Value of `f` at `a`, or its limit from the side of `b` when the evaluator
/// is not finite there (as `x² cos(x⁻²)` at `0`).
pub fn endpoint_value(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, CliError> {
    let v = f(a);
    if v.is_finite() {
        return Ok(v);
    }
    let vals: Vec<f64> = (20..=60).map(|k| f(a + (b - a) * 2f64.powi(-k))).collect();
    let tail = &vals[vals.len() - 5..];
    if tail.iter().all(|v| v.is_finite()) && tail.windows(2).all(|w| (w[1] - w[0]).abs() < tol) {
        Ok(tail[4])
    } else {
        Err(CliError::Domain(format!("primitive has no finite value or one-sided limit at {a}")))
    }
}

/// A primitive on the whole extended line: an expression whose limits at
/// `±∞` exist, or `@name` for a built-in or file fixture.
pub fn primitive(text: &str, ctx: &Context, flag: &str) -> Result<Distribution, CliError> {
    if let Some(name) = text.strip_prefix('@') {
        if name == "fresnel" {
            return Ok(fixtures::fresnel(ctx.tol)?);
        }
        if let Some(d) = fixtures::by_name(name) {
            return Ok(d);
        }
        let s = ctx.spec(name, FixtureKind::Primitive, flag)?;
        return primitive_from(s.expr.as_deref().unwrap(), s.limit_neg, s.limit_pos, ctx, flag);
    }
    primitive_from(text, None, None, ctx, flag)
}

fn primitive_from(text: &str, lim_neg: Option<f64>, lim_pos: Option<f64>, ctx: &Context, flag: &str) -> Result<Distribution, CliError> {
    let e = expression(text, flag)?;
    e.check_piecewise_continuity(1e-9).map_err(|m| CliError::Domain(format!("{flag}: {m}")))?;
    let knots = e.breakpoints();
    let f = expr_evaluator(e);
    let lim_neg = match lim_neg {
        Some(v) => v,
        None => detect_limit(&*f, Side::Negative, ctx.tol.max(1e-9), ctx.depth)?,
    };
    let lim_pos = match lim_pos {
        Some(v) => v,
        None => detect_limit(&*f, Side::Positive, ctx.tol.max(1e-9), ctx.depth)?,
    };
    let bar = ContinuousFunctionBar::build_with_depth(f, lim_neg, lim_pos, ctx.tol.max(1e-9), ctx.depth)?.with_knots(knots);
    Ok(Distribution::try_from_primitive(bar)?)
}

/// Audit cells for a primitive on a finite interval.
const LOCAL_AUDIT_CELLS: usize = 256;

/// A primitive on the finite interval `[a, b]` only, audited there.
pub fn local_primitive(text: &str, a: f64, b: f64, ctx: &Context, flag: &str) -> Result<Evaluator, CliError> {
    let e = expression(text, flag)?;
    e.check_piecewise_continuity(1e-9).map_err(|m| CliError::Domain(format!("{flag}: {m}")))?;
    let f = expr_evaluator(e);
    if a < b {
        let (fa, fb) = (endpoint_value(&*f, a, b, ctx.tol)?, endpoint_value(&*f, b, a, ctx.tol)?);
        let g = f.clone();
        let patched = move |x: f64| {
            if x <= a {
                fa
            } else if x >= b {
                fb
            } else {
                g(x)
            }
        };
        let grid: Vec<f64> = (0..=LOCAL_AUDIT_CELLS).map(|i| a + (b - a) * i as f64 / LOCAL_AUDIT_CELLS as f64).collect();
        audit_continuity(&patched, &grid, ctx.tol.max(1e-9), ctx.depth)
            .map_err(|(at, oscillation)| crate::Error::NotContinuous { at, oscillation })?;
        return Ok(evaluator(patched));
    }
    Ok(f)
}

/// An evaluator for a change of variables: an expression or `@cantor`.
pub fn inner_function(text: &str, flag: &str) -> Result<Evaluator, CliError> {
    if text == "@cantor" {
        return Ok(evaluator(numerics::cantor));
    }
    Ok(expr_evaluator(expression(text, flag)?))
}

pub fn extended(text: &str, flag: &str) -> Result<ExtendedReal, CliError> {
    text.trim().parse::<ExtendedReal>().map_err(|_| CliError::Usage(format!("{flag}: expected a number, `inf` or `-inf`, got `{text}`")))
}

pub fn number(text: &str, flag: &str) -> Result<f64, CliError> {
    text.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{flag}: expected a number, got `{text}`")))
}

pub fn number_list(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    text.split(',').filter(|s| !s.trim().is_empty()).map(|s| number(s, flag)).collect()
}

fn call<'a>(text: &'a str, name: &str) -> Option<&'a str> {
    let rest = text.strip_prefix(name)?.trim_start();
    rest.strip_prefix('(')?.strip_suffix(')')
}

pub fn bv(text: &str, ctx: &Context, flag: &str) -> Result<BvFunction, CliError> {
    let text = text.trim();
    if let Some(name) = text.strip_prefix('@') {
        let s = ctx.spec(name, FixtureKind::Bv, flag)?;
        return bv(s.spec.as_deref().unwrap(), ctx, flag);
    }
    if text == "heaviside" {
        return Ok(BvFunction::heaviside());
    }
    if let Some(arg) = call(text, "const") {
        return Ok(BvFunction::constant(number(arg, flag)?));
    }
    if let Some(args) = call(text, "indicator") {
        let parts: Vec<&str> = args.split(',').collect();
        if parts.len() != 2 {
            return Err(CliError::Usage(format!("{flag}: indicator takes two ends")));
        }
        return Ok(indicator(extended(parts[0], flag)?, extended(parts[1], flag)?, true, true)?);
    }
    if let Some(args) = call(text, "step") {
        let groups: Vec<&str> = args.split(';').collect();
        let mut values = vec![number(groups[0], flag)?];
        let mut locations = Vec::new();
        for g in &groups[1..] {
            let pair = number_list(g, flag)?;
            if pair.len() != 2 {
                return Err(CliError::Usage(format!("{flag}: step groups are `location, value`")));
            }
            locations.push(pair[0]);
            values.push(pair[1]);
        }
        return Ok(BvFunction::step(&locations, &values)?);
    }
    if let Some(args) = call(text, "mono") {
        let mut groups = args.splitn(2, ';');
        let e = expression(groups.next().unwrap_or(""), flag)?;
        let breaks = match groups.next() {
            Some(b) => number_list(b, flag)?,
            None => Vec::new(),
        };
        let f = expr_evaluator(e);
        let mut bounds = vec![f64::NEG_INFINITY];
        bounds.extend(&breaks);
        bounds.push(f64::INFINITY);
        let mut pieces = Vec::new();
        for w in bounds.windows(2) {
            pieces.push(Piece::new(w[0], w[1], f.clone(), None)?);
        }
        let points: Vec<f64> = breaks.iter().map(|&b| f(b)).collect();
        let (vn, vp) = (pieces[0].left_limit, pieces[pieces.len() - 1].right_limit);
        return Ok(BvFunction::new(pieces, points, vn, vp)?);
    }
    Err(CliError::Usage(format!("{flag}: unrecognised BV spec `{text}`")))
}

/// A sequence family, from the built-in list or a `sequence` block.
pub fn sequence(name: &str, params: &BTreeMap<String, f64>, ctx: &Context, flag: &str) -> Result<DistributionSequence, CliError> {
    if let Some(n) = name.strip_prefix('@') {
        let s = ctx.spec(n, FixtureKind::Sequence, flag)?;
        let mut p = s.params.clone();
        p.extend(params.iter().map(|(k, v)| (k.clone(), *v)));
        return Ok(sequence_fixtures(s.family.as_deref().unwrap(), &p)?);
    }
    Ok(sequence_fixtures(name, params)?)
}

/// `key=value` pairs separated by commas.
pub fn params(text: &str, flag: &str) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = BTreeMap::new();
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| CliError::Usage(format!("{flag}: expected key=value, got `{item}`")))?;
        out.insert(k.trim().to_string(), number(v, flag)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context { tol: 1e-10, depth: 40, fixtures: BTreeMap::new() }
    }

    #[test]
    fn bv_specs() {
        let c = ctx();
        assert_eq!(bv("heaviside", &c, "--bv").unwrap().variation(), 1.0);
        assert_eq!(bv("const(2.5)", &c, "--bv").unwrap().eval(3.0), 2.5);
        assert_eq!(bv("indicator(0, inf)", &c, "--bv").unwrap().variation(), 1.0);
        let s = bv("step(0; -1, 2; 1, -1)", &c, "--bv").unwrap();
        assert_eq!(s.variation(), 5.0);
        assert_eq!(s.eval(0.0), 2.0);
        let m = bv("mono(atan(x))", &c, "--bv").unwrap();
        assert!((m.variation() - std::f64::consts::PI).abs() < 1e-9);
        let m = bv("mono(x^2/(1+x^2); 0)", &c, "--bv").unwrap();
        assert!((m.variation() - 2.0).abs() < 1e-8);
        assert!(bv("mono(sin(x))", &c, "--bv").is_err());
        assert!(matches!(bv("wiggle", &c, "--bv"), Err(CliError::Usage(_))));
    }

    #[test]
    fn primitives_from_text() {
        let c = ctx();
        let f = primitive("atan(x)", &c, "--primitive").unwrap();
        assert!((f.total() - std::f64::consts::PI).abs() < 1e-9);
        assert!(primitive("@arctan", &c, "--primitive").is_ok());
        assert!(matches!(primitive("x", &c, "--primitive"), Err(CliError::Domain(_))));
        assert!(matches!(primitive("x +", &c, "--primitive"), Err(CliError::Usage(_))));
        assert!(matches!(primitive("piecewise(0, 0, 1)", &c, "--primitive"), Err(CliError::Domain(_))));
    }

    #[test]
    fn local_primitive_patches_endpoint() {
        let c = ctx();
        let f = local_primitive("x^2*cos(x^-2)", 0.0, 1.0, &c, "--primitive").unwrap();
        assert!(f(0.0).abs() < 1e-30);
        assert_eq!(f(1.0), 1f64.cos());
        assert!(matches!(local_primitive("piecewise(0.5, 0, 1)", 0.0, 1.0, &c, "--primitive"), Err(CliError::Domain(_))));
        assert!(matches!(local_primitive("atan(1/x)", -1.0, 1.0, &c, "--primitive"), Err(CliError::Domain(_))));
        assert!(matches!(local_primitive("10*x + 0.001*atan(1/(x-0.3))", -1.0, 1.0, &c, "--primitive"), Err(CliError::Domain(_))));
        assert!(matches!(local_primitive("abs(x-0.7)/(x-0.7)", 0.0, 1.0, &c, "--primitive"), Err(CliError::Domain(_))));
        assert!(local_primitive("sqrt(abs(x))", -1.0, 1.0, &c, "--primitive").is_ok());
    }

    #[test]
    fn fixture_file_blocks() {
        let text = r#"
[bump]
kind = "primitive"
expr = "piecewise(0, 1, 0, x^2, 1)"

[ramp]
kind = "bv"
spec = "mono(atan(x))"

[tri]
kind = "sequence"
family = "triangle_out"
params = { p = 2.0 }
"#;
        let mut c = ctx();
        c.fixtures = parse_fixture_file(text).unwrap();
        assert_eq!(primitive("@bump", &c, "--primitive").unwrap().total(), 1.0);
        assert!(bv("@ramp", &c, "--bv").is_ok());
        let s = sequence("@tri", &BTreeMap::new(), &c, "--fixture").unwrap();
        assert_eq!(s.at(3).primitive_at(3.0), 9.0);
        assert!(matches!(bv("@bump", &c, "--bv"), Err(CliError::Usage(_))));
        assert!(parse_fixture_file("[a]\nkind = \"bv\"\n").is_err());
        assert!(parse_fixture_file("[a]\nkind = \"wat\"\n").is_err());
    }

    #[test]
    fn parameter_lists() {
        let p = params("p=3, c=0.5", "--params").unwrap();
        assert_eq!(p["p"], 3.0);
        assert_eq!(p["c"], 0.5);
        assert!(params("p", "--params").is_err());
    }
}
