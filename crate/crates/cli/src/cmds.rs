//! One function per subcommand; each returns the full output text so
//! the dispatcher prints once and stays byte-deterministic.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use spinnet::acceptance::{self, Check};
use spinnet::asympt::{formal_solutions, spectral_radius, unitary_term, FormalSolution};
use spinnet::exact::{
    drum_closed_form, eval, eval_std, k33_closed_form, sixj_std, theta_std, unknot_std, Norm,
};
use spinnet::genfun::genfun;
use spinnet::quadnum::{rat_pair, QuadNum};
use spinnet::real::{Cx, RealCtx};
use spinnet::recurrence::{guess_recurrence, Recurrence};
use spinnet::tet::{quad_to_cx, tet_data, Geometry, TetData};
use spinnet::{Error, Result};

use crate::inputs;
use crate::render::{self, ctx_for, Format, Table};
use crate::{GraphArgs, SeqArgs, TetArgs};

fn geometry_name(g: Geometry) -> &'static str {
    match g {
        Geometry::Euclidean => "Euclidean",
        Geometry::Plane => "Plane",
        Geometry::Minkowskian => "Minkowskian",
    }
}

fn close(ctx: &RealCtx, a: &Cx, b: &Cx) -> bool {
    let d = ctx.to_f64(&a.sub(ctx, b).abs(ctx));
    d <= 1e-9 * (1.0 + ctx.to_f64(&a.abs(ctx)))
}

/// exp(+- i sum gamma theta / 2): the angle route to the growth rates.
fn angle_rates(ctx: &RealCtx, data: &TetData) -> Result<(Cx, Cx)> {
    let (_, weighted) = data.angle_sums(ctx)?;
    let half = weighted.scale(ctx, &ctx.f(0.5));
    let i_half = Cx::new(ctx.neg(&half.im), half.re.clone());
    Ok((i_half.exp(ctx), i_half.neg(ctx).exp(ctx)))
}

pub fn cmd_eval(args: &GraphArgs, digits: usize, format: Format) -> Result<String> {
    let g = inputs::load_graph(&args.builtin, &args.graph)?;
    let col = inputs::load_coloring(&g, &args.colors, &args.coloring)?;
    let ctx = ctx_for(digits);
    let mut t = Table::new(&["normalization", "exact", "decimal"]);
    for (name, norm) in [
        ("standard", Norm::Std),
        ("penrose", Norm::Penrose),
        ("edge", Norm::Edge),
        ("unitary", Norm::Unitary),
    ] {
        let v = eval(&g, &col, norm)?;
        let f = spinnet::tet::sqrtval_to_float(&ctx, &v);
        t.push(vec![
            name.into(),
            v.to_string(),
            render::dec(&ctx, &f, digits),
        ]);
    }
    Ok(t.render(format))
}

pub fn cmd_sequence(
    args: &TetArgs,
    norm: &str,
    nmax: Option<usize>,
    format: Format,
) -> Result<String> {
    let colors = inputs::tet_colors(&args.colors)?;
    let data = tet_data(&colors)?;
    let nmax = nmax.unwrap_or(100);
    let term = match Norm::parse(norm)? {
        Norm::Std => spinnet::asympt::sixj_term(&data)?,
        Norm::Unitary => unitary_term(&data)?,
        _ => {
            return Err(Error::Parse(
                "sequences are generated in the std or unitary normalization".into(),
            ))
        }
    };
    let seq = term.sequence(nmax as i64);
    let mut t = Table::new(&["n", "value"]);
    for (n, v) in seq.iter().enumerate() {
        t.push(vec![n.to_string(), v.to_string()]);
    }
    Ok(t.render(format))
}

fn mask_indices(mask: u64) -> String {
    if mask == 0 {
        return "-".into();
    }
    let mut parts = Vec::new();
    for i in 0..64 {
        if mask >> i & 1 == 1 {
            parts.push(i.to_string());
        }
    }
    parts.join(" ")
}

pub fn cmd_genfun(args: &GraphArgs, nmax: Option<usize>, format: Format) -> Result<String> {
    let g = inputs::load_graph(&args.builtin, &args.graph)?;
    let gf = genfun(&g)?;
    let mut t = Table::new(&["section", "key", "value"]);
    t.push(vec![
        "planar_form".into(),
        "-".into(),
        gf.is_planar_form().to_string(),
    ]);
    for (i, c) in gf.curves.iter().enumerate() {
        t.push(vec!["curve".into(), i.to_string(), mask_indices(*c)]);
    }
    for (mask, coef) in gf.terms() {
        t.push(vec!["term".into(), mask_indices(mask), coef.to_string()]);
    }
    if let Some(nmax) = nmax {
        for n in 0..=nmax {
            let col = vec![n as u32; g.ncolors()];
            t.push(vec![
                "diagonal".into(),
                n.to_string(),
                gf.coefficient(&col)?.to_string(),
            ]);
        }
    }
    Ok(t.render(format))
}

pub fn cmd_classify(args: &TetArgs, digits: usize, format: Format) -> Result<String> {
    let colors = inputs::tet_colors(&args.colors)?;
    let data = tet_data(&colors)?;
    let ctx = ctx_for(digits);
    let mut t = Table::new(&["key", "value"]);
    t.push(vec![
        "geometry".into(),
        geometry_name(data.geometry()).into(),
    ]);
    t.push(vec!["det_c".into(), data.detc.to_string()]);
    t.push(vec!["degenerate".into(), data.is_degenerate().to_string()]);
    t.push(vec![
        "volume".into(),
        render::dec(&ctx, &data.volume(&ctx), digits),
    ]);
    Ok(t.render(format))
}

pub fn cmd_asympt(args: &TetArgs, digits: usize, format: Format) -> Result<String> {
    let colors = inputs::tet_colors(&args.colors)?;
    let data = tet_data(&colors)?;
    let ctx = ctx_for(digits);
    let geo = data.geometry();
    let rates = data.growth_rates()?;
    let mut t = Table::new(&[
        "geometry",
        "branch",
        "lambda_exact",
        "lambda_re",
        "lambda_im",
        "alpha",
        "stokes_re",
        "stokes_im",
        "contributes",
    ]);
    let gname = geometry_name(geo);

    if geo == Geometry::Plane {
        let z = rates[0].numeric(&ctx);
        let (zr, zi) = render::cx_parts(&ctx, &z, digits);
        let exact = rates[0]
            .exact
            .as_ref()
            .map(render::quad)
            .unwrap_or_else(|| "-".into());
        let s = data.stokes_plane(&ctx)?;
        t.push(vec![
            gname.into(),
            "+".into(),
            exact.clone(),
            zr.clone(),
            zi.clone(),
            "-4/3".into(),
            render::dec(&ctx, &s, digits),
            "0".into(),
            "true".into(),
        ]);
        t.push(vec![
            gname.into(),
            "-".into(),
            exact,
            zr,
            zi,
            "-5/3".into(),
            "-".into(),
            "-".into(),
            "true".into(),
        ]);
        return Ok(t.render(format));
    }

    // The exact rates come from the critical-point route; cross-check
    // against the angle route and label the branches by it.
    let (ep, em) = angle_rates(&ctx, &data)?;
    let stokes_pair = match geo {
        Geometry::Euclidean => data.stokes_euclidean(&ctx)?,
        _ => data.stokes_minkowskian(&ctx)?,
    };
    for crit in &rates {
        let z = crit.numeric(&ctx);
        let plus = close(&ctx, &z, &ep);
        if !plus && !close(&ctx, &z, &em) {
            return Err(Error::Degenerate(
                "angle route and critical-point route disagree".into(),
            ));
        }
        let stokes = if plus {
            stokes_pair.0.clone()
        } else {
            stokes_pair.1.clone()
        };
        let contributes = match geo {
            Geometry::Euclidean => true,
            _ => ctx.to_f64(&z.abs(&ctx)) < 1.0,
        };
        if geo == Geometry::Minkowskian && contributes {
            let (bl, bs) = data.minkowskian_branch(&ctx)?;
            if !close(&ctx, &z, &bl) || !close(&ctx, &stokes, &bs) {
                return Err(Error::Degenerate(
                    "surviving-branch association disagrees".into(),
                ));
            }
        }
        let (zr, zi) = render::cx_parts(&ctx, &z, digits);
        let (sr, si) = render::cx_parts(&ctx, &stokes, digits);
        t.push(vec![
            gname.into(),
            if plus { "+".into() } else { "-".into() },
            crit.exact
                .as_ref()
                .map(render::quad)
                .unwrap_or_else(|| "-".into()),
            zr,
            zi,
            "-3/2".into(),
            sr,
            si,
            contributes.to_string(),
        ]);
    }
    Ok(t.render(format))
}

struct Branch {
    s: Cx,
    lam: Cx,
    alpha: Cx,
    mu: Vec<Cx>,
}

fn predict_at(ctx: &RealCtx, branches: &[Branch], n: usize) -> Cx {
    let nf = ctx.f(n as f64);
    let ln_n = Cx::real(ctx, ctx.ln(&nf));
    let mut pred = Cx::real(ctx, ctx.zero());
    for br in branches {
        let mut tail = Cx::real(ctx, ctx.zero());
        for (l, m) in br.mu.iter().enumerate() {
            tail = tail.add(ctx, &m.scale(ctx, &ctx.powi(&nf, -(l as i64))));
        }
        let power = br.alpha.mul(ctx, &ln_n).exp(ctx);
        let term =
            br.s.mul(ctx, &br.lam.powi(ctx, n as i64))
                .mul(ctx, &power)
                .mul(ctx, &tail);
        pred = pred.add(ctx, &term);
    }
    pred
}

fn to_cx_branch(ctx: &RealCtx, sol: &FormalSolution, s: Cx) -> Branch {
    Branch {
        s,
        lam: quad_to_cx(ctx, &sol.lambda),
        alpha: quad_to_cx(ctx, &sol.alpha),
        mu: sol.mu.iter().map(|m| quad_to_cx(ctx, m)).collect(),
    }
}

/// The contributing branches of the expansion, Stokes constants
/// attached to the formal solutions of the guessed recurrence.
fn expansion_branches(
    ctx: &RealCtx,
    data: &TetData,
    sols: &[FormalSolution],
) -> Result<Vec<Branch>> {
    match data.geometry() {
        Geometry::Euclidean => {
            let (ep, em) = angle_rates(ctx, data)?;
            let (sp, sm) = data.stokes_euclidean(ctx)?;
            sols.iter()
                .map(|sol| {
                    let lam = quad_to_cx(ctx, &sol.lambda);
                    let s = if close(ctx, &lam, &ep) {
                        sp.clone()
                    } else if close(ctx, &lam, &em) {
                        sm.clone()
                    } else {
                        return Err(Error::Degenerate(
                            "formal solution does not match either growth rate".into(),
                        ));
                    };
                    Ok(to_cx_branch(ctx, sol, s))
                })
                .collect()
        }
        Geometry::Minkowskian => {
            let (bl, bs) = data.minkowskian_branch(ctx)?;
            let sol = sols
                .iter()
                .find(|sol| close(ctx, &quad_to_cx(ctx, &sol.lambda), &bl))
                .ok_or_else(|| {
                    Error::Degenerate("no formal solution on the surviving branch".into())
                })?;
            Ok(vec![to_cx_branch(ctx, sol, bs)])
        }
        Geometry::Plane => {
            let want = QuadNum::from_rational(rat_pair(-4, 3));
            let sol = sols
                .iter()
                .find(|sol| sol.alpha == want)
                .ok_or_else(|| Error::Degenerate("no formal solution with exponent -4/3".into()))?;
            let s = Cx::real(ctx, data.stokes_plane(ctx)?);
            Ok(vec![to_cx_branch(ctx, sol, s)])
        }
    }
}

fn fit_recurrence(
    seq: &[BigRational],
    max_order: usize,
    max_degree: Option<usize>,
) -> Result<Recurrence> {
    let cap = max_degree.unwrap_or(40);
    guess_recurrence(seq, max_order, cap)
}

pub fn cmd_predict(
    args: &TetArgs,
    digits: usize,
    depth: usize,
    nmax: Option<usize>,
    format: Format,
) -> Result<String> {
    let colors = inputs::tet_colors(&args.colors)?;
    let data = tet_data(&colors)?;
    let nmax = nmax.unwrap_or(200);
    let ctx = ctx_for(digits);
    let term = unitary_term(&data)?;
    let seq = term.sequence(nmax as i64);
    let rec = fit_recurrence(&seq, 2, None)?;
    let sols = formal_solutions(&rec.coeffs, depth)?;
    let branches = expansion_branches(&ctx, &data, &sols)?;
    let mut t = Table::new(&["n", "value", "prediction", "error"]);
    for (n, a) in seq.iter().enumerate().skip(1) {
        let value = ctx.rational(a);
        let pred = predict_at(&ctx, &branches, n);
        let err = ctx.sub(&value, &pred.re);
        t.push(vec![
            n.to_string(),
            render::dec(&ctx, &value, digits),
            render::dec(&ctx, &pred.re, digits),
            render::dec(&ctx, &err, digits),
        ]);
    }
    Ok(t.render(format))
}

fn source_sequence(args: &SeqArgs, nmax: Option<usize>) -> Result<Vec<BigRational>> {
    match (&args.colors, &args.sequence) {
        (Some(colors), None) => {
            let colors = inputs::tet_colors(colors)?;
            let data = tet_data(&colors)?;
            let term = unitary_term(&data)?;
            Ok(term.sequence(nmax.unwrap_or(120) as i64))
        }
        (None, Some(path)) => inputs::load_sequence(path),
        _ => Err(Error::Parse(
            "give exactly one of --colors or --sequence".into(),
        )),
    }
}

/// Integer polynomial in n from descending coefficients.
fn poly_string(coeffs: &[BigRational]) -> String {
    let d = coeffs.len() - 1;
    let mut parts: Vec<String> = Vec::new();
    for (j, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        debug_assert!(c.denom().is_one());
        let k = d - j;
        let mag = c.numer().abs();
        let body = match k {
            0 => mag.to_string(),
            1 if mag.is_one() => "n".into(),
            1 => format!("{mag}*n"),
            _ if mag.is_one() => format!("n^{k}"),
            _ => format!("{mag}*n^{k}"),
        };
        if parts.is_empty() {
            parts.push(if c.is_negative() {
                format!("-{body}")
            } else {
                body
            });
        } else {
            parts.push(format!(
                "{} {body}",
                if c.is_negative() { "-" } else { "+" }
            ));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

pub fn cmd_guess_rec(args: &SeqArgs, nmax: Option<usize>, format: Format) -> Result<String> {
    let seq = source_sequence(args, nmax)?;
    let rec = fit_recurrence(&seq, args.max_order, args.max_degree)?;
    match format {
        Format::Csv => {
            let mut t = Table::new(&["shift", "polynomial"]);
            for (i, row) in rec.coeffs.iter().enumerate() {
                t.push(vec![i.to_string(), poly_string(row)]);
            }
            Ok(t.render(format))
        }
        Format::Json => {
            let polys: Vec<Value> = rec
                .coeffs
                .iter()
                .map(|row| Value::String(poly_string(row)))
                .collect();
            Ok(render::json_text(&json!({
                "order": rec.order(),
                "degree": rec.degree(),
                "polynomials": polys,
                "relation": rec.to_string(),
            })))
        }
    }
}

pub fn cmd_formal_series(
    args: &SeqArgs,
    depth: usize,
    nmax: Option<usize>,
    format: Format,
) -> Result<String> {
    let seq = source_sequence(args, nmax)?;
    let rec = fit_recurrence(&seq, args.max_order, args.max_degree)?;
    let sols = formal_solutions(&rec.coeffs, depth)?;
    match format {
        Format::Csv => {
            let mut t = Table::new(&["branch", "item", "value"]);
            for (b, sol) in sols.iter().enumerate() {
                let b = b.to_string();
                t.push(vec![b.clone(), "lambda".into(), render::quad(&sol.lambda)]);
                t.push(vec![b.clone(), "alpha".into(), render::quad(&sol.alpha)]);
                t.push(vec![b.clone(), "order".into(), sol.order.to_string()]);
                for (l, m) in sol.mu.iter().enumerate() {
                    t.push(vec![b.clone(), format!("mu_{l}"), render::quad(m)]);
                }
            }
            Ok(t.render(format))
        }
        Format::Json => {
            let arr: Vec<Value> = sols
                .iter()
                .map(|sol| {
                    json!({
                        "lambda": render::quad_json(&sol.lambda),
                        "alpha": render::quad_json(&sol.alpha),
                        "order": sol.order,
                        "mu": sol.mu.iter().map(render::quad_json).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok(render::json_text(&Value::Array(arr)))
        }
    }
}

/// Diagonal standard evaluation sequence a_n = <G; 2n, ..., 2n> (odd
/// uniform colors are inadmissible on a cubic graph), closed forms
/// where the general curve enumeration would not scale.
fn diagonal_sequence(
    builtin: &Option<String>,
    file: &Option<std::path::PathBuf>,
    nmax: usize,
) -> Result<Vec<BigRational>> {
    if let Some(name) = builtin {
        let fast: Option<Box<dyn Fn(u32) -> BigRational>> = match name.as_str() {
            "theta" => Some(Box::new(|n| {
                BigRational::from_integer(theta_std(2 * n, 2 * n, 2 * n))
            })),
            "tet" => Some(Box::new(|n| {
                BigRational::from_integer(sixj_std(&[2 * n; 6]))
            })),
            "circle" => Some(Box::new(|n| BigRational::from_integer(unknot_std(2 * n)))),
            "k33" => Some(Box::new(|n| k33_closed_form(2 * n))),
            _ => name
                .strip_prefix("drum")
                .and_then(|s| s.parse::<u32>().ok())
                .map(|s| -> Box<dyn Fn(u32) -> BigRational> {
                    Box::new(move |n| drum_closed_form(s, 2 * n))
                }),
        };
        if let Some(f) = fast {
            return Ok((0..=nmax as u32).map(f).collect());
        }
    }
    let g = inputs::load_graph(builtin, file)?;
    let mut seq = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax as u32 {
        let col = vec![2 * n; g.ncolors()];
        seq.push(BigRational::from_integer(eval_std(&g, &col)?));
    }
    Ok(seq)
}

pub fn cmd_radius(args: &GraphArgs, nmax: Option<usize>, format: Format) -> Result<String> {
    let nmax = nmax.unwrap_or(150);
    let seq = diagonal_sequence(&args.builtin, &args.graph, nmax)?;
    let r = spectral_radius(&seq)?;
    let mut t = Table::new(&["key", "value"]);
    t.push(vec!["terms".into(), seq.len().to_string()]);
    t.push(vec!["radius".into(), format!("{r:.6}")]);
    Ok(t.render(format))
}

pub fn cmd_selftest(jobs: usize, format: Format) -> Result<(String, i32)> {
    let n = acceptance::CHECKS.len();
    let jobs = jobs.clamp(1, n);
    let results: Vec<Check> = if jobs == 1 {
        acceptance::run_all()
    } else {
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<Check>>> = (0..n).map(|_| Mutex::new(None)).collect();
        std::thread::scope(|sc| {
            for _ in 0..jobs {
                sc.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= n {
                        break;
                    }
                    let (name, f) = acceptance::CHECKS[i];
                    let check = match f() {
                        Ok(detail) => Check {
                            name,
                            passed: true,
                            detail,
                        },
                        Err(detail) => Check {
                            name,
                            passed: false,
                            detail,
                        },
                    };
                    *slots[i].lock().unwrap() = Some(check);
                });
            }
        });
        slots
            .into_iter()
            .map(|m| m.into_inner().unwrap().unwrap())
            .collect()
    };
    let failed = results.iter().filter(|c| !c.passed).count();
    let text = match format {
        Format::Csv => {
            let mut out = String::new();
            for c in &results {
                out.push_str(&format!(
                    "{} {}: {}\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                ));
            }
            out.push_str(&format!("{} passed, {failed} failed\n", n - failed));
            out
        }
        Format::Json => {
            let arr: Vec<Value> = results
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "passed": c.passed,
                        "detail": c.detail,
                    })
                })
                .collect();
            render::json_text(&Value::Array(arr))
        }
    };
    Ok((text, if failed == 0 { 0 } else { 1 }))
}
