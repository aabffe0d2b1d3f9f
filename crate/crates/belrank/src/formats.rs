//! The COEFF, TABLE and DECOMP text formats.
//!
//! All three carry a `p e n` line and the modulus so files are
//! self-describing; element codes are the canonical integer encoding. A file
//! whose modulus differs from the canonical one for its parameters is
//! rejected, since its codes would mean different field elements.
//!
//! ```text
//! SEMIFIELD-COEFF v1          SEMIFIELD-TABLE v1        BEL-DECOMP v1
//! p e n                       p e n                     p e n r
//! modulus c0 ... c_en         modulus c0 ... c_en       modulus c0 ... c_en
//! n rows of n codes           q^n rows of q^n codes     f_1 .. f_r, g_1 .. g_r
//! ```

use crate::belconfig::BelDecomposition;
use crate::gf::{FFElem, FieldCtx};
use crate::linmap::LinMap;
use crate::semifield::SemifieldCoeffs;
use crate::{Ctx, Error};
use std::sync::Arc;

pub const COEFF_HEADER: &str = "SEMIFIELD-COEFF v1";
pub const TABLE_HEADER: &str = "SEMIFIELD-TABLE v1";
pub const DECOMP_HEADER: &str = "BEL-DECOMP v1";

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

struct Lines<'a> {
    iter: std::str::Lines<'a>,
    lineno: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Lines<'a> {
        Lines {
            iter: text.lines(),
            lineno: 0,
        }
    }

    /// Next non-empty line.
    fn next(&mut self, what: &str) -> Result<(usize, &'a str), Error> {
        loop {
            let line = self
                .iter
                .next()
                .ok_or_else(|| perr(self.lineno + 1, format!("missing {what}")))?;
            self.lineno += 1;
            if !line.trim().is_empty() {
                return Ok((self.lineno, line.trim()));
            }
        }
    }
}

fn parse_u32s(lineno: usize, line: &str, what: &str) -> Result<Vec<u32>, Error> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<u32>()
                .map_err(|_| perr(lineno, format!("bad {what} token {tok:?}")))
        })
        .collect()
}

fn parse_params(lines: &mut Lines<'_>, want: usize) -> Result<Vec<u32>, Error> {
    let (ln, line) = lines.next("parameter line")?;
    let vals = parse_u32s(ln, line, "parameter")?;
    if vals.len() != want {
        return Err(perr(ln, format!("expected {want} parameters, got {}", vals.len())));
    }
    Ok(vals)
}

fn parse_ctx(lines: &mut Lines<'_>, p: u32, e: u32, n: u32) -> Result<Ctx, Error> {
    let ctx: Ctx = Arc::new(FieldCtx::new(p, e, n).map_err(|err| Error::Parse {
        line: 2,
        msg: err.to_string(),
    })?);
    let (ln, line) = lines.next("modulus line")?;
    let mut toks = line.split_whitespace();
    match toks.next() {
        Some("modulus") => {}
        other => return Err(perr(ln, format!("expected 'modulus', got {other:?}"))),
    }
    let coeffs: Vec<u32> = toks
        .map(|t| t.parse::<u32>().map_err(|_| perr(ln, format!("bad modulus coefficient {t:?}"))))
        .collect::<Result<_, _>>()?;
    if coeffs != ctx.modulus() {
        return Err(perr(
            ln,
            format!(
                "modulus differs from the canonical one for (p,e,n)=({p},{e},{n}); expected {:?}",
                ctx.modulus()
            ),
        ));
    }
    Ok(ctx)
}

fn parse_row(ctx: &Ctx, lineno: usize, line: &str, want: usize) -> Result<Vec<FFElem>, Error> {
    let codes = parse_u32s(lineno, line, "element code")?;
    if codes.len() != want {
        return Err(perr(lineno, format!("expected {want} codes, got {}", codes.len())));
    }
    codes
        .into_iter()
        .map(|c| {
            ctx.elem(c)
                .map_err(|_| perr(lineno, format!("element code {c} out of range")))
        })
        .collect()
}

fn modulus_line(ctx: &Ctx) -> String {
    let coeffs: Vec<String> = ctx.modulus().iter().map(|c| c.to_string()).collect();
    format!("modulus {}", coeffs.join(" "))
}

pub fn write_coeff(s: &SemifieldCoeffs) -> String {
    let ctx = s.ctx();
    let n = ctx.n() as usize;
    let mut out = String::new();
    out.push_str(COEFF_HEADER);
    out.push('\n');
    out.push_str(&format!("{} {} {}\n", ctx.p(), ctx.e(), ctx.n()));
    out.push_str(&modulus_line(ctx));
    out.push('\n');
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| s.matrix()[(i, j)].code().to_string())
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_coeff(text: &str) -> Result<SemifieldCoeffs, Error> {
    let mut lines = Lines::new(text);
    let (ln, header) = lines.next("header")?;
    if header != COEFF_HEADER {
        return Err(perr(ln, format!("expected {COEFF_HEADER:?}")));
    }
    let params = parse_params(&mut lines, 3)?;
    let ctx = parse_ctx(&mut lines, params[0], params[1], params[2])?;
    let n = ctx.n() as usize;
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, line) = lines.next("coefficient row")?;
        rows.push(parse_row(&ctx, ln, line, n)?);
    }
    Ok(SemifieldCoeffs::from_rows(&ctx, &rows))
}

pub fn write_table(s: &SemifieldCoeffs) -> String {
    let ctx = s.ctx();
    let mut out = String::new();
    out.push_str(TABLE_HEADER);
    out.push('\n');
    out.push_str(&format!("{} {} {}\n", ctx.p(), ctx.e(), ctx.n()));
    out.push_str(&modulus_line(ctx));
    out.push('\n');
    for row in s.to_table() {
        let line: Vec<String> = row.iter().map(|v| v.code().to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_table(text: &str) -> Result<SemifieldCoeffs, Error> {
    let mut lines = Lines::new(text);
    let (ln, header) = lines.next("header")?;
    if header != TABLE_HEADER {
        return Err(perr(ln, format!("expected {TABLE_HEADER:?}")));
    }
    let params = parse_params(&mut lines, 3)?;
    let ctx = parse_ctx(&mut lines, params[0], params[1], params[2])?;
    let order = ctx.order() as usize;
    let mut rows = Vec::with_capacity(order);
    for _ in 0..order {
        let (ln, line) = lines.next("table row")?;
        rows.push(parse_row(&ctx, ln, line, order)?);
    }
    SemifieldCoeffs::from_table(&ctx, &rows)
}

pub fn write_decomp(d: &BelDecomposition) -> String {
    let ctx = d.ctx();
    let mut out = String::new();
    out.push_str(DECOMP_HEADER);
    out.push('\n');
    out.push_str(&format!("{} {} {} {}\n", ctx.p(), ctx.e(), ctx.n(), d.r()));
    out.push_str(&modulus_line(ctx));
    out.push('\n');
    for map in d.f.iter().chain(&d.g) {
        out.push_str(&map.to_text());
        out.push('\n');
    }
    out
}

pub fn read_decomp(text: &str) -> Result<BelDecomposition, Error> {
    let mut lines = Lines::new(text);
    let (ln, header) = lines.next("header")?;
    if header != DECOMP_HEADER {
        return Err(perr(ln, format!("expected {DECOMP_HEADER:?}")));
    }
    let params = parse_params(&mut lines, 4)?;
    let ctx = parse_ctx(&mut lines, params[0], params[1], params[2])?;
    let r = params[3] as usize;
    if r == 0 {
        return Err(perr(2, "r must be positive"));
    }
    let n = ctx.n() as usize;
    let mut maps = Vec::with_capacity(2 * r);
    for _ in 0..2 * r {
        let (ln, line) = lines.next("map line")?;
        maps.push(LinMap::new(&ctx, parse_row(&ctx, ln, line, n)?));
    }
    let g = maps.split_off(r);
    Ok(BelDecomposition::new(&ctx, maps, g))
}

/// Reads either a COEFF or a TABLE file, detected by header.
pub fn read_algebra(text: &str) -> Result<SemifieldCoeffs, Error> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .unwrap_or("");
    match first {
        COEFF_HEADER => read_coeff(text),
        TABLE_HEADER => read_table(text),
        other => Err(perr(1, format!("unrecognized header {other:?}"))),
    }
}
