//! Command-line front end. Every subcommand writes a CSV table with a header
//! row to standard output; diagnostics go to standard error. Exit status is
//! `0` on success, `1` for domain errors and `2` for usage errors.

pub mod expr;
pub mod input;
pub mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::convergence_lab::{
    default_bv_battery, default_test_battery, n_ladder, quasi_uniform_check, strong_report, theorem_checkers, weak_bv_report,
    weak_d_report, ConvergenceReport, DistributionSequence, ReportOptions,
};
use crate::function_core::{bump, evaluator, ContinuousFunctionBar, ExtendedReal, TestFunction};
use crate::integral_core::{hake_from_integrand, Distribution, NormKind};
use crate::lattice_order::{abs_norm, compare, join, meet, parts, AbsNorm};
use crate::product_calculus::{change_of_variables, holder_bound, integral_product, second_mvt_xi, taylor_expand, TaylorInput};
use crate::transforms::{boundary_norm_gap, growth_probe, laplace_derivative, laplacian_probe, poisson, HalfPlanePoint};
use input::Context;
use output::{fmt_num, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("output error: {0}")]
    Io(String),
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cpint", version, about = "Continuous primitive integration on the extended real line")]
struct Cli {
    /// Quadrature and audit tolerance.
    #[arg(long, global = true, default_value_t = 1e-10, allow_hyphen_values = true)]
    tol: f64,
    /// Refinement depth of audits and partition refinements.
    #[arg(long, global = true, default_value_t = 40)]
    budget: u32,
    /// TOML file of named fixtures, referenced as `@name`.
    #[arg(long, global = true, value_name = "FILE")]
    fixtures: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// ∫_A^B f = F(B) - F(A), or the limit of ∫_0^x f with --hake.
    Integrate(IntegrateArgs),
    /// Norms of f computed from its primitive.
    Norm(NormArgs),
    /// ∫ f g for g of bounded variation, with Hölder bounds.
    Product(ProductArgs),
    /// ∫_{G(A)}^{G(B)} f for continuous G.
    Cov(CovArgs),
    /// Taylor polynomial and integral remainder.
    Taylor(TaylorArgs),
    /// Lattice operations on primitives.
    Lattice(LatticeArgs),
    /// Convergence report for a sequence family.
    Converge(ConvergeArgs),
    /// Poisson integral in the upper half plane.
    Poisson(PoissonArgs),
    /// Laplace transform and its derivatives.
    Laplace(LaplaceArgs),
    /// Runs the acceptance suite.
    Selftest,
}

#[derive(Debug, Args)]
struct IntegrateArgs {
    /// Primitive F as an expression or @name.
    #[arg(long, required_unless_present = "primitive_of", conflicts_with = "primitive_of")]
    primitive: Option<String>,
    /// Integrand f; its primitive from 0 is extrapolated to ±∞ (needs --hake).
    #[arg(long, requires = "hake")]
    primitive_of: Option<String>,
    #[arg(long)]
    hake: bool,
    #[arg(long, default_value = "-inf", allow_hyphen_values = true)]
    from: String,
    #[arg(long, default_value = "inf", allow_hyphen_values = true)]
    to: String,
}

#[derive(Debug, Args)]
struct NormArgs {
    #[arg(long)]
    primitive: String,
    /// alexiewicz, interval_sup, dual_bv_lower, abs or all.
    #[arg(long, default_value = "all")]
    kind: String,
}

#[derive(Debug, Args)]
struct ProductArgs {
    #[arg(long)]
    primitive: String,
    /// const(c), heaviside, indicator(a, b), step(v0; x1, v1; …), mono(EXPR; b1, …) or @name.
    #[arg(long)]
    bv: String,
}

#[derive(Debug, Args)]
struct CovArgs {
    #[arg(long)]
    primitive: String,
    /// Inner function G as an expression or @cantor.
    #[arg(long)]
    g: String,
    #[arg(long, allow_hyphen_values = true)]
    from: String,
    #[arg(long, allow_hyphen_values = true)]
    to: String,
}

#[derive(Debug, Args)]
struct TaylorArgs {
    /// The n-th derivative of the expanded function.
    #[arg(long)]
    fn_top: String,
    /// f(a), f'(a), …, f^(n)(a).
    #[arg(long, allow_hyphen_values = true)]
    coeffs: String,
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    /// Right end of the interval on which f^(n) is audited; defaults to x.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long)]
    n: u32,
}

#[derive(Debug, Args)]
struct LatticeArgs {
    /// join, meet, parts or compare.
    #[arg(long)]
    op: String,
    #[arg(long)]
    primitive: String,
    /// Second operand for join, meet and compare.
    #[arg(long)]
    other: Option<String>,
    /// Abscissae at which primitives are tabulated.
    #[arg(long, default_value = "-inf,-10,-2,-1,-0.5,0,0.5,1,2,10,inf", allow_hyphen_values = true)]
    at: String,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    #[arg(long)]
    fixture: String,
    /// key=value pairs, e.g. p=2,c=1.
    #[arg(long, default_value = "")]
    params: String,
    /// Any of strong, weakD, weakBV, quasi, theorems, integral.
    #[arg(long, default_value = "strong,weakD,weakBV")]
    modes: String,
    #[arg(long, default_value_t = 64)]
    n_max: u32,
    /// Bump test functions for weakD as center:width pairs.
    #[arg(long, allow_hyphen_values = true)]
    battery: Option<String>,
}

#[derive(Debug, Args)]
struct PoissonArgs {
    #[arg(long)]
    primitive: String,
    /// x=…, y=…, and optionally h=… for the Laplacian probe.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    params: String,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    h: Option<f64>,
    /// Also report sup_x |u(x, y) - F(x)| through the boundary gap.
    #[arg(long)]
    gap: bool,
}

#[derive(Debug, Args)]
struct LaplaceArgs {
    /// Primitive on [0, ∞) as an expression (shifted to vanish at 0 and
    /// extended by 0 to the left) or @name.
    #[arg(long)]
    primitive: String,
    /// re=…, im=…, n=…; alpha=… adds the cone growth probe.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    params: String,
    #[arg(long, allow_hyphen_values = true)]
    re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    im: Option<f64>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    if !(cli.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol: must be positive, got {}", cli.tol)));
    }
    if cli.budget == 0 {
        return Err(CliError::Usage("--budget: must be positive".into()));
    }
    let mut ctx = Context { tol: cli.tol, depth: cli.budget, fixtures: BTreeMap::new() };
    if let Some(path) = &cli.fixtures {
        ctx.load_file(path)?;
    }
    let table = match cli.command {
        Command::Integrate(a) => integrate(&a, &ctx)?,
        Command::Norm(a) => norm(&a, &ctx)?,
        Command::Product(a) => product(&a, &ctx)?,
        Command::Cov(a) => cov(&a, &ctx)?,
        Command::Taylor(a) => taylor(&a, &ctx)?,
        Command::Lattice(a) => lattice(&a, &ctx)?,
        Command::Converge(a) => converge(&a, &ctx)?,
        Command::Poisson(a) => poisson_cmd(&a, &ctx)?,
        Command::Laplace(a) => laplace_cmd(&a, &ctx)?,
        Command::Selftest => {
            let (table, passed) = selftest(&ctx)?;
            table.finish(out)?;
            return Ok(if passed { 0 } else { 1 });
        }
    };
    table.finish(out)?;
    Ok(0)
}

fn quantity_table(rows: &[(&str, f64)]) -> Result<Table, CliError> {
    let mut t = Table::new(&["quantity", "value"])?;
    for (k, v) in rows {
        t.row([k.to_string(), fmt_num(*v)])?;
    }
    Ok(t)
}

fn integrate(a: &IntegrateArgs, ctx: &Context) -> Result<Table, CliError> {
    let lo = input::extended(&a.from, "--from")?;
    let hi = input::extended(&a.to, "--to")?;
    let value = if let Some(f) = &a.primitive_of {
        let e = input::expression(f, "--primitive-of")?;
        let d = hake_from_integrand(evaluator(move |x| e.eval(x)), ctx.tol)?;
        d.integral(lo, hi)
    } else {
        let text = a.primitive.as_deref().unwrap();
        match (lo, hi) {
            (ExtendedReal::Finite(x), ExtendedReal::Finite(y)) if !text.starts_with('@') => {
                let (l, h) = (x.min(y), x.max(y));
                let f = input::local_primitive(text, l, h, ctx, "--primitive")?;
                f(y) - f(x)
            }
            _ => input::primitive(text, ctx, "--primitive")?.integral(lo, hi),
        }
    };
    quantity_table(&[("integral", value)])
}

fn norm(a: &NormArgs, ctx: &Context) -> Result<Table, CliError> {
    let f = input::primitive(&a.primitive, ctx, "--primitive")?;
    let kinds: Vec<&str> = match a.kind.as_str() {
        "all" => vec!["alexiewicz", "interval_sup", "dual_bv_lower", "abs"],
        "alexiewicz" | "interval_sup" | "dual_bv_lower" | "abs" => vec![a.kind.as_str()],
        other => return Err(CliError::Usage(format!("--kind: unknown norm `{other}`"))),
    };
    let mut t = Table::new(&["kind", "value", "status"])?;
    for k in kinds {
        let (v, status) = if k == "abs" {
            match abs_norm(&f, ctx.depth, ctx.tol)? {
                AbsNorm::Finite(v) => (v, "finite"),
                AbsNorm::Divergent { lower_bound } => (lower_bound, "divergent"),
            }
        } else {
            let kind: NormKind = k.parse()?;
            (f.norm(kind, ctx.tol)?, "finite")
        };
        t.row([k.to_string(), fmt_num(v), status.to_string()])?;
    }
    Ok(t)
}

fn product(a: &ProductArgs, ctx: &Context) -> Result<Table, CliError> {
    let f = input::primitive(&a.primitive, ctx, "--primitive")?;
    let g = input::bv(&a.bv, ctx, "--bv")?;
    let value = integral_product(&f, &g, ctx.tol)?;
    let h = holder_bound(&f, &g, ctx.tol)?;
    let mut rows = vec![
        ("integral", value),
        ("variation", g.variation()),
        ("holder_infimum_form", h.infimum_form),
        ("holder_bv_norm_form", h.bv_norm_form),
    ];
    if g.is_monotone() {
        rows.push(("mean_value_xi", second_mvt_xi(&f, &g, ctx.tol)?.to_f64()));
    }
    quantity_table(&rows)
}

fn cov(a: &CovArgs, ctx: &Context) -> Result<Table, CliError> {
    let f = input::primitive(&a.primitive, ctx, "--primitive")?;
    let g = input::inner_function(&a.g, "--g")?;
    let lo = input::extended(&a.from, "--from")?;
    let hi = input::extended(&a.to, "--to")?;
    let value = change_of_variables(&f, &g, lo, hi, ctx.tol)?;
    quantity_table(&[("g_from", g(lo.to_f64())), ("g_to", g(hi.to_f64())), ("integral", value)])
}

fn taylor(a: &TaylorArgs, ctx: &Context) -> Result<Table, CliError> {
    let top = input::expression(&a.fn_top, "--fn-top")?;
    let coeffs = input::number_list(&a.coeffs, "--coeffs")?;
    let b = a.b.unwrap_or(a.x);
    let inp = TaylorInput::new(a.n, a.a, b, evaluator(move |x| top.eval(x)), coeffs, ctx.tol)?;
    let o = taylor_expand(&inp, a.x, ctx.tol)?;
    quantity_table(&[
        ("polynomial", o.polynomial),
        ("remainder", o.remainder),
        ("value", o.polynomial + o.remainder),
        ("bound_pointwise", o.bound_pointwise),
        ("bound_uniform", o.bound_uniform),
    ])
}

fn lattice(a: &LatticeArgs, ctx: &Context) -> Result<Table, CliError> {
    let f = input::primitive(&a.primitive, ctx, "--primitive")?;
    let other = || -> Result<Distribution, CliError> {
        let g = a.other.as_deref().ok_or_else(|| CliError::Usage(format!("--other: required for --op {}", a.op)))?;
        input::primitive(g, ctx, "--other")
    };
    let points: Vec<ExtendedReal> = a.at.split(',').map(|s| input::extended(s, "--at")).collect::<Result<_, _>>()?;
    match a.op.as_str() {
        "join" | "meet" => {
            let g = other()?;
            let h = if a.op == "join" { join(&f, &g) } else { meet(&f, &g) };
            let mut t = Table::new(&["x", "primitive"])?;
            for p in points {
                t.row([p.to_string(), fmt_num(h.primitive_at(p.to_f64()))])?;
            }
            Ok(t)
        }
        "parts" => {
            let p = parts(&f);
            let mut t = Table::new(&["x", "plus", "minus", "abs"])?;
            for x in points {
                let x = x.to_f64();
                t.row([
                    ExtendedReal::from(x).to_string(),
                    fmt_num(p.plus.primitive_at(x)),
                    fmt_num(p.minus.primitive_at(x)),
                    fmt_num(p.abs.primitive_at(x)),
                ])?;
            }
            Ok(t)
        }
        "compare" => {
            let g = other()?;
            let r = compare(&f, &g, ctx.tol)?;
            let mut t = Table::new(&["quantity", "value"])?;
            t.row(["relation".to_string(), r.relation.to_string()])?;
            if let Some(x) = r.above {
                t.row(["above".to_string(), fmt_num(x.to_f64())])?;
            }
            if let Some(x) = r.below {
                t.row(["below".to_string(), fmt_num(x.to_f64())])?;
            }
            for x in r.crossings {
                t.row(["crossing".to_string(), fmt_num(x)])?;
            }
            Ok(t)
        }
        other => Err(CliError::Usage(format!("--op: expected join, meet, parts or compare, got `{other}`"))),
    }
}

const CONVERGE_MODES: [&str; 6] = ["strong", "weakD", "weakBV", "quasi", "theorems", "integral"];

fn parse_battery(text: &str) -> Result<Vec<TestFunction>, CliError> {
    let mut out = Vec::new();
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let (c, w) = item.split_once(':').ok_or_else(|| CliError::Usage(format!("--battery: expected center:width, got `{item}`")))?;
        let (c, w) = (input::number(c, "--battery")?, input::number(w, "--battery")?);
        if !(w > 0.0) {
            return Err(CliError::Usage(format!("--battery: width must be positive, got {w}")));
        }
        out.push(bump(c, w));
    }
    Ok(out)
}

fn report_rows(t: &mut Table, mode: &str, r: &ConvergenceReport) -> Result<(), CliError> {
    for c in &r.checks {
        for e in &c.evidence {
            t.row([mode.to_string(), c.label.clone(), e.n.to_string(), fmt_num(e.value), c.verdict.to_string()])?;
        }
        if c.evidence.is_empty() {
            t.row([mode.to_string(), c.label.clone(), String::new(), String::new(), c.verdict.to_string()])?;
        }
    }
    for w in &r.witnesses {
        let label = format!("witness x={} eps={} N={}", w.point, w.epsilon, w.big_n);
        t.row([mode.to_string(), label, w.n.to_string(), fmt_num(w.delta), String::new()])?;
    }
    t.row([mode.to_string(), "overall".to_string(), String::new(), String::new(), r.verdict.to_string()])
}

fn converge(a: &ConvergeArgs, ctx: &Context) -> Result<Table, CliError> {
    let params = input::params(&a.params, "--params")?;
    let seq: DistributionSequence = input::sequence(&a.fixture, &params, ctx, "--fixture")?;
    let modes: Vec<&str> = a.modes.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    for m in &modes {
        if !CONVERGE_MODES.contains(m) {
            return Err(CliError::Usage(format!("--modes: unknown mode `{m}`")));
        }
    }
    if a.n_max < 8 {
        return Err(CliError::Usage(format!("--n-max: must be at least 8, got {}", a.n_max)));
    }
    let opts = ReportOptions { n_max: a.n_max, tol: ctx.tol.max(1e-12), ..ReportOptions::default() };
    let zero = Distribution::zero();
    let battery = match &a.battery {
        Some(b) => parse_battery(b)?,
        // the primitives converge only off x = 1, so test inside (0, 1)
        None if seq.name == "power_ramp" => vec![bump(0.5, 0.4), bump(0.3, 0.25), bump(0.7, 0.25)],
        None => default_test_battery(),
    };
    let mut t = Table::new(&["mode", "check", "n", "value", "verdict"])?;
    for m in modes {
        match m {
            "strong" => report_rows(&mut t, m, &strong_report(&seq, &zero, &opts)?)?,
            "weakD" => report_rows(&mut t, m, &weak_d_report(&seq, &zero, &battery, &opts)?)?,
            "weakBV" => report_rows(&mut t, m, &weak_bv_report(&seq, &zero, &default_bv_battery(), &opts)?)?,
            "quasi" => {
                let pts = [-1.0, 0.0, 0.5, 1.0, 3.0, 10.0].map(ExtendedReal::Finite);
                let pts = [&[ExtendedReal::NegInf][..], &pts, &[ExtendedReal::PosInf]].concat();
                report_rows(&mut t, m, &quasi_uniform_check(&seq, &|_| 0.0, &pts, &opts)?)?
            }
            "theorems" => report_rows(&mut t, m, &theorem_checkers(&seq, &zero, &[(0.0, 1.0), (-3.0, 10.0)], &opts)?)?,
            _ => {
                for n in n_ladder(a.n_max) {
                    t.row([m.to_string(), "total".to_string(), n.to_string(), fmt_num(seq.at(n).total()), String::new()])?;
                }
            }
        }
    }
    Ok(t)
}

fn merged(params: &str, explicit: &[(&str, Option<f64>)]) -> Result<BTreeMap<String, f64>, CliError> {
    let mut p = input::params(params, "--params")?;
    for (k, v) in explicit {
        if let Some(v) = v {
            p.insert(k.to_string(), *v);
        }
    }
    Ok(p)
}

fn require(p: &BTreeMap<String, f64>, key: &str) -> Result<f64, CliError> {
    p.get(key).copied().ok_or_else(|| CliError::Usage(format!("--{key}: required (or pass {key}=… in --params)")))
}

fn poisson_cmd(a: &PoissonArgs, ctx: &Context) -> Result<Table, CliError> {
    let p = merged(&a.params, &[("x", a.x), ("y", a.y), ("h", a.h)])?;
    if let Some(k) = p.keys().find(|k| !["x", "y", "h"].contains(&k.as_str())) {
        return Err(CliError::Usage(format!("--params: unknown key `{k}`")));
    }
    let f = input::primitive(&a.primitive, ctx, "--primitive")?;
    let pt = HalfPlanePoint::new(require(&p, "x")?, require(&p, "y")?)?;
    let mut rows = vec![("u", poisson(&f, pt, ctx.tol)?)];
    if let Some(&h) = p.get("h") {
        rows.push(("laplacian", laplacian_probe(&f, pt, h, ctx.tol)?));
    }
    if a.gap {
        rows.push(("boundary_gap", boundary_norm_gap(&f, pt.y, ctx.tol.max(1e-8))?));
    }
    quantity_table(&rows)
}

fn half_line_primitive(text: &str, ctx: &Context) -> Result<Distribution, CliError> {
    if text.starts_with('@') {
        return input::primitive(text, ctx, "--primitive");
    }
    let e = input::expression(text, "--primitive")?;
    e.check_piecewise_continuity(1e-9).map_err(|m| CliError::Domain(format!("--primitive: {m}")))?;
    let raw = evaluator(move |x| e.eval(x));
    let f0 = input::endpoint_value(&*raw, 0.0, 1.0, ctx.tol)?;
    let shifted = evaluator(move |x: f64| if x <= 0.0 { 0.0 } else { raw(x) - f0 });
    let lim = crate::function_core::continuous::detect_limit(&*shifted, crate::error::Side::Positive, ctx.tol.max(1e-9), ctx.depth)?;
    let bar = ContinuousFunctionBar::build_with_depth(shifted, 0.0, lim, ctx.tol.max(1e-9), ctx.depth)?.with_knots([0.0]);
    Ok(Distribution::try_from_primitive(bar)?)
}

fn laplace_cmd(a: &LaplaceArgs, ctx: &Context) -> Result<Table, CliError> {
    let n_explicit = a.n.map(f64::from);
    let p = merged(&a.params, &[("re", a.re), ("im", a.im), ("n", n_explicit), ("alpha", a.alpha)])?;
    if let Some(k) = p.keys().find(|k| !["re", "im", "n", "alpha"].contains(&k.as_str())) {
        return Err(CliError::Usage(format!("--params: unknown key `{k}`")));
    }
    let n = p.get("n").copied().unwrap_or(0.0);
    if !(n >= 0.0 && n.fract() == 0.0 && n <= 64.0) {
        return Err(CliError::Usage(format!("--n: expected a small non-negative integer, got {n}")));
    }
    let f = half_line_primitive(&a.primitive, ctx)?;
    let z = Complex64::new(require(&p, "re")?, p.get("im").copied().unwrap_or(0.0));
    let v = laplace_derivative(&f, z, n as u32, ctx.tol)?;
    let mut t = Table::new(&["quantity", "value"])?;
    t.row(["re".to_string(), fmt_num(v.re)])?;
    t.row(["im".to_string(), fmt_num(v.im)])?;
    if let Some(&alpha) = p.get("alpha") {
        let g = growth_probe(&f, alpha, &[1.0, 4.0, 16.0, 64.0, 256.0], ctx.tol)?;
        for (r, m) in g.maxima {
            t.row([format!("max_abs r={r}"), fmt_num(m)])?;
        }
        t.row(["growth_trend".to_string(), g.trend.to_string()])?;
    }
    Ok(t)
}

fn selftest(ctx: &Context) -> Result<(Table, bool), CliError> {
    let seed = crate::selftest::seed_from_env();
    let results = crate::selftest::run_acceptance(seed, ctx.tol);
    let mut t = Table::new(&["criterion", "status", "detail"])?;
    let mut passed = true;
    for r in &results {
        passed &= r.passed;
        t.row([r.name.clone(), if r.passed { "pass" } else { "fail" }.to_string(), r.detail.clone()])?;
    }
    Ok((t, passed))
}

/// Runs `args` in process and captures both streams.
pub fn run_captured(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cpint").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}
