//! Deterministic text output: every number is printed either exactly
//! (rationals, quadratic irrationalities) or through the fixed-point
//! decimal renderer, so identical inputs give byte-identical bytes.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};
use spinnet::quadnum::QuadNum;
use spinnet::real::{Cx, RealCtx};

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A rectangular table rendered as CSV lines or as a JSON array of
/// objects keyed by the header.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = String::new();
                out.push_str(&self.header.join(","));
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let arr: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = serde_json::Map::new();
                        for (k, v) in self.header.iter().zip(row) {
                            obj.insert((*k).into(), Value::String(v.clone()));
                        }
                        Value::Object(obj)
                    })
                    .collect();
                let mut s = serde_json::to_string_pretty(&arr).expect("string table");
                s.push('\n');
                s
            }
        }
    }
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    s
}

/// Exact rendering of p + q sqrt(m).
pub fn quad(x: &QuadNum) -> String {
    if x.b.is_zero() {
        return x.a.to_string();
    }
    let root = format!("sqrt({})", x.m);
    let tail = if x.b.abs() == BigRational::from_integer(1.into()) {
        root
    } else {
        format!("{}*{root}", x.b.abs())
    };
    let sign = if x.b.is_negative() { '-' } else { '+' };
    if x.a.is_zero() {
        match sign {
            '-' => format!("-{tail}"),
            _ => tail,
        }
    } else {
        format!("{} {sign} {tail}", x.a)
    }
}

/// The (m, p, q) triple of p + q sqrt(m) as a JSON object.
pub fn quad_json(x: &QuadNum) -> Value {
    json!({
        "m": x.m,
        "p": x.a.to_string(),
        "q": x.b.to_string(),
    })
}

pub fn dec(ctx: &RealCtx, x: &spinnet::real::BigFloat, digits: usize) -> String {
    ctx.fmt_dec(x, digits)
}

pub fn cx_parts(ctx: &RealCtx, z: &Cx, digits: usize) -> (String, String) {
    (ctx.fmt_dec(&z.re, digits), ctx.fmt_dec(&z.im, digits))
}

/// Working precision for the requested number of decimal digits.
pub fn ctx_for(digits: usize) -> RealCtx {
    let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 32;
    RealCtx::new(bits)
}
