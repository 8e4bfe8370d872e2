use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::scalar::{best_rational, parse_rational, Rational, Scalar};

use super::{Constraint, IpError, IpModel, Objective, ObjectiveSense, Sense, VarKind, Variable};

/// Largest denominator written as a decimal; beyond it rows are scaled.
const MAX_DECIMAL_DENOM: i64 = 1_000_000;
const LINE_WIDTH: usize = 200;

/// How constraint coefficients are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LpMode {
    /// Each row multiplied through by the least common multiple of its
    /// denominators; every coefficient is an integer.
    #[default]
    Scaled,
    /// Decimals with 15 significant digits; rows with a denominator above
    /// 10^6 fall back to scaling.
    Decimal,
}

fn rational_of<T: Scalar>(v: &T, what: &str) -> Result<Rational, IpError> {
    v.to_rational().ok_or_else(|| IpError::NotRational(what.to_string()))
}

fn terminating(denom: i64) -> bool {
    let mut d = denom;
    for p in [2, 5] {
        while d % p == 0 {
            d /= p;
        }
    }
    d == 1
}

/// Exact decimal when the denominator only has factors 2 and 5, otherwise
/// 15 significant digits.
fn decimal(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    if terminating(*r.denom()) {
        let mut digits = 0;
        let mut scaled = *r;
        while !scaled.is_integer() {
            scaled *= Rational::from_integer(10);
            digits += 1;
        }
        let n = scaled.numer().abs();
        let s = format!("{:0>width$}", n, width = digits + 1);
        let (int, frac) = s.split_at(s.len() - digits);
        return format!("{}{int}.{frac}", if r.is_negative() { "-" } else { "" });
    }
    let v = r.to_f64().unwrap_or(0.0);
    let magnitude = if v == 0.0 { 0 } else { v.abs().log10().floor() as i32 };
    let precision = (14 - magnitude).max(0) as usize;
    let s = format!("{v:.precision$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    s
}

fn lcm_of_denominators<'a>(values: impl Iterator<Item = &'a Rational>) -> i64 {
    values.fold(1i64, |acc, r| acc.lcm(r.denom()))
}

/// Appends ` + 3 x` style terms, wrapping long lines.
fn push_terms(line: &mut String, out: &mut String, terms: &[(String, String)]) {
    for (k, (coef, var)) in terms.iter().enumerate() {
        let (sign, magnitude) = match coef.strip_prefix('-') {
            Some(m) => ("-", m),
            None => ("+", coef.as_str()),
        };
        let body = if magnitude == "1" { var.clone() } else { format!("{magnitude} {var}") };
        let piece = match (k, sign) {
            (0, "+") => body,
            (0, _) => format!("- {body}"),
            _ => format!(" {sign} {body}"),
        };
        if line.len() + piece.len() > LINE_WIDTH && k > 0 {
            out.push_str(line);
            out.push('\n');
            line.clear();
            line.push_str("   ");
            line.push_str(piece.trim_start());
        } else {
            line.push_str(&piece);
        }
    }
}

fn format_row<T: Scalar>(model: &IpModel<T>, row: &Constraint<T>, mode: LpMode) -> Result<String, IpError> {
    let coefs = row
        .terms
        .iter()
        .map(|(c, v)| rational_of(c, &model.variables[*v].name))
        .collect::<Result<Vec<_>, _>>()?;
    let rhs = rational_of(&row.rhs, &row.name)?;
    let scale = match mode {
        LpMode::Decimal if coefs.iter().chain([&rhs]).all(|r| *r.denom() <= MAX_DECIMAL_DENOM) => None,
        _ => Some(Rational::from_integer(lcm_of_denominators(coefs.iter().chain([&rhs])))),
    };
    let render = |r: &Rational| match scale {
        Some(s) => (r * s).numer().to_string(),
        None => decimal(r),
    };
    let terms: Vec<(String, String)> =
        coefs.iter().zip(&row.terms).map(|(c, (_, v))| (render(c), model.variables[*v].name.clone())).collect();
    let mut out = String::new();
    let mut line = format!(" {}: ", row.name);
    push_terms(&mut line, &mut out, &terms);
    let _ = write!(line, " {} {}", row.sense, render(&rhs));
    out.push_str(&line);
    out.push('\n');
    Ok(out)
}

fn push_names(out: &mut String, names: &[&str]) {
    let mut line = String::new();
    for name in names {
        if !line.is_empty() && line.len() + name.len() + 1 > LINE_WIDTH {
            out.push_str(&line);
            out.push('\n');
            line.clear();
        }
        line.push(' ');
        line.push_str(name);
    }
    if !line.is_empty() {
        out.push_str(&line);
        out.push('\n');
    }
}

/// LP text with sections `Minimize`/`Maximize`, `Subject To`, `Bounds`,
/// `Generals`, `Binaries`, `End`; empty sections are left out. The objective
/// is always written in decimal.
pub fn export_lp<T: Scalar>(model: &IpModel<T>, mode: LpMode) -> Result<String, IpError> {
    let mut out = String::new();
    out.push_str(match model.objective.sense {
        ObjectiveSense::Minimize => "Minimize\n",
        ObjectiveSense::Maximize => "Maximize\n",
    });
    let obj_terms = model
        .objective
        .terms
        .iter()
        .map(|(c, v)| Ok((decimal(&rational_of(c, "objective")?), model.variables[*v].name.clone())))
        .collect::<Result<Vec<_>, IpError>>()?;
    let mut line = String::from(" obj: ");
    push_terms(&mut line, &mut out, &obj_terms);
    out.push_str(&line);
    out.push('\n');

    if !model.constraints.is_empty() {
        out.push_str("Subject To\n");
        for row in &model.constraints {
            out.push_str(&format_row(model, row, mode)?);
        }
    }

    let mut bounds = String::new();
    for var in model.variables.iter().filter(|v| v.kind != VarKind::Binary) {
        let lower = rational_of(&var.lower, &var.name)?;
        match &var.upper {
            Some(u) => {
                let _ = writeln!(bounds, " {} <= {} <= {}", decimal(&lower), var.name, decimal(&rational_of(u, &var.name)?));
            }
            None if !lower.is_zero() => {
                let _ = writeln!(bounds, " {} >= {}", var.name, decimal(&lower));
            }
            None => {}
        }
    }
    if !bounds.is_empty() {
        out.push_str("Bounds\n");
        out.push_str(&bounds);
    }
    for (header, kind) in [("Generals", VarKind::Integer), ("Binaries", VarKind::Binary)] {
        let names: Vec<&str> = model.variables.iter().filter(|v| v.kind == kind).map(|v| v.name.as_str()).collect();
        if !names.is_empty() {
            out.push_str(header);
            out.push('\n');
            push_names(&mut out, &names);
        }
    }
    out.push_str("End\n");
    Ok(out)
}

pub fn write_lp<T: Scalar>(model: &IpModel<T>, path: impl AsRef<Path>, mode: LpMode) -> Result<(), IpError> {
    std::fs::write(path, export_lp(model, mode)?)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Label(String),
    Num(Rational),
    Plus,
    Minus,
    Cmp(Sense),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Objective,
    Constraints,
    Bounds,
    Generals,
    Binaries,
    End,
}

fn section_of(line: &str) -> Option<(Section, Option<ObjectiveSense>)> {
    let key = line.trim().to_ascii_lowercase();
    let key: String = key.split_whitespace().collect::<Vec<_>>().join(" ");
    Some(match key.as_str() {
        "minimize" | "minimise" | "minimum" | "min" => (Section::Objective, Some(ObjectiveSense::Minimize)),
        "maximize" | "maximise" | "maximum" | "max" => (Section::Objective, Some(ObjectiveSense::Maximize)),
        "subject to" | "such that" | "st" | "s.t." => (Section::Constraints, None),
        "bounds" | "bound" => (Section::Bounds, None),
        "generals" | "general" | "gen" => (Section::Generals, None),
        "binaries" | "binary" | "bin" => (Section::Binaries, None),
        "end" => (Section::End, None),
        _ => return None,
    })
}

fn lp_err<T>(line: usize, message: impl Into<String>) -> Result<T, IpError> {
    Err(IpError::Parse { line, message: message.into() })
}

fn parse_number(s: &str, line: usize) -> Result<Rational, IpError> {
    match parse_rational(s) {
        Some(r) if *r.denom() > MAX_DECIMAL_DENOM => Ok(best_rational(&r, MAX_DECIMAL_DENOM)),
        Some(r) => Ok(r),
        None => lp_err(line, format!("invalid number `{s}`")),
    }
}

fn tokenize(text: &str, line: usize) -> Result<Vec<(Tok, usize)>, IpError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '+' {
            out.push((Tok::Plus, line));
            i += 1;
        } else if c == '-' {
            out.push((Tok::Minus, line));
            i += 1;
        } else if c == '<' || c == '>' || c == '=' {
            let mut j = i + 1;
            if j < chars.len() && (chars[j] == '=' || chars[j] == '<' || chars[j] == '>') {
                j += 1;
            }
            let op: String = chars[i..j].iter().collect();
            let sense = match op.as_str() {
                "<=" | "=<" | "<" => Sense::Le,
                ">=" | "=>" | ">" => Sense::Ge,
                "=" => Sense::Eq,
                _ => return lp_err(line, format!("invalid operator `{op}`")),
            };
            out.push((Tok::Cmp(sense), line));
            i = j;
        } else if c.is_ascii_digit() || c == '.' {
            let mut j = i;
            while j < chars.len()
                && (chars[j].is_ascii_digit()
                    || chars[j] == '.'
                    || ((chars[j] == 'e' || chars[j] == 'E') && j > i)
                    || ((chars[j] == '+' || chars[j] == '-') && matches!(chars[j - 1], 'e' | 'E')))
            {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            out.push((Tok::Num(parse_number(&s, line)?), line));
            i = j;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || "_.[]{}!\"#$%&()/,;?@'`|~".contains(chars[j])) {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            if j < chars.len() && chars[j] == ':' {
                out.push((Tok::Label(s), line));
                j += 1;
            } else {
                out.push((Tok::Ident(s), line));
            }
            i = j;
        } else {
            return lp_err(line, format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

struct Vars {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vars {
    fn get(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }
}

/// Linear expression up to (not including) a comparison or the end.
fn parse_expr(toks: &[(Tok, usize)], pos: &mut usize, vars: &mut Vars) -> Result<Vec<(Rational, usize)>, IpError> {
    let mut terms = Vec::new();
    let mut first = true;
    while *pos < toks.len() {
        let line = toks[*pos].1;
        let mut sign = Rational::from_integer(1);
        match &toks[*pos].0 {
            Tok::Cmp(_) | Tok::Label(_) => break,
            Tok::Plus => *pos += 1,
            Tok::Minus => {
                sign = -sign;
                *pos += 1;
            }
            _ if first => {}
            other => return lp_err(line, format!("expected `+` or `-`, found {other:?}")),
        }
        first = false;
        let mut coef = sign;
        if let Some((Tok::Num(n), _)) = toks.get(*pos) {
            coef *= *n;
            *pos += 1;
        }
        match toks.get(*pos) {
            Some((Tok::Ident(name), _)) => {
                terms.push((coef, vars.get(name)));
                *pos += 1;
            }
            _ => return lp_err(line, "expected a variable name"),
        }
    }
    Ok(terms)
}

fn parse_rhs(toks: &[(Tok, usize)], pos: &mut usize, line: usize) -> Result<Rational, IpError> {
    let mut sign = Rational::from_integer(1);
    match toks.get(*pos) {
        Some((Tok::Minus, _)) => {
            sign = -sign;
            *pos += 1;
        }
        Some((Tok::Plus, _)) => *pos += 1,
        _ => {}
    }
    match toks.get(*pos) {
        Some((Tok::Num(n), _)) => {
            *pos += 1;
            Ok(sign * n)
        }
        _ => lp_err(line, "expected a numeric right-hand side"),
    }
}

/// Strict reader for the subset of the LP format written by [`export_lp`]:
/// named rows, `Bounds`, `Generals`, `Binaries`, `\` comments.
pub fn parse_lp<T: Scalar>(text: &str) -> Result<IpModel<T>, IpError> {
    let mut sense = None;
    let mut section: Option<Section> = None;
    let mut chunks: HashMap<u8, Vec<(Tok, usize)>> = HashMap::new();
    let mut seen = HashSet::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('\\').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        if section == Some(Section::End) {
            return lp_err(line, "content after `End`");
        }
        if let Some((s, obj)) = section_of(content) {
            if !seen.insert(s as u8) {
                return lp_err(line, "repeated section");
            }
            if section.is_none() && s != Section::Objective {
                return lp_err(line, "model must start with `Minimize` or `Maximize`");
            }
            if obj.is_some() {
                sense = obj;
            }
            section = Some(s);
            continue;
        }
        let Some(current) = section else {
            return lp_err(line, "model must start with `Minimize` or `Maximize`");
        };
        chunks.entry(current as u8).or_default().extend(tokenize(content, line)?);
    }
    if section != Some(Section::End) {
        return lp_err(last_line.max(1), "missing `End`");
    }
    let sense = sense.expect("objective section seen first");
    let mut vars = Vars { names: Vec::new(), index: HashMap::new() };
    let take = |s: Section, chunks: &mut HashMap<u8, Vec<(Tok, usize)>>| chunks.remove(&(s as u8)).unwrap_or_default();

    let toks = take(Section::Objective, &mut chunks);
    let mut pos = 0;
    if let Some((Tok::Label(_), _)) = toks.first() {
        pos = 1;
    }
    let objective_terms = parse_expr(&toks, &mut pos, &mut vars)?;
    if pos != toks.len() {
        return lp_err(toks[pos].1, "unexpected token in objective");
    }

    let toks = take(Section::Constraints, &mut chunks);
    let mut rows = Vec::new();
    let mut names = HashSet::new();
    let mut pos = 0;
    while pos < toks.len() {
        let (tok, line) = &toks[pos];
        let Tok::Label(name) = tok else {
            return lp_err(*line, "constraint without a name");
        };
        if !names.insert(name.clone()) {
            return lp_err(*line, format!("duplicate constraint `{name}`"));
        }
        pos += 1;
        let terms = parse_expr(&toks, &mut pos, &mut vars)?;
        let Some((Tok::Cmp(sense), _)) = toks.get(pos) else {
            return lp_err(*line, format!("constraint `{name}` has no comparison"));
        };
        pos += 1;
        let rhs = parse_rhs(&toks, &mut pos, *line)?;
        rows.push((name.clone(), terms, *sense, rhs));
    }

    let mut lower: HashMap<usize, Rational> = HashMap::new();
    let mut upper: HashMap<usize, Rational> = HashMap::new();
    let toks = take(Section::Bounds, &mut chunks);
    let mut pos = 0;
    while pos < toks.len() {
        let line = toks[pos].1;
        let leading = matches!(toks[pos].0, Tok::Num(_) | Tok::Minus | Tok::Plus);
        if leading {
            // l <= v [<= u]
            let l = parse_rhs(&toks, &mut pos, line)?;
            let Some((Tok::Cmp(Sense::Le), _)) = toks.get(pos) else {
                return lp_err(line, "expected `<=` in bound");
            };
            let Some((Tok::Ident(name), _)) = toks.get(pos + 1) else {
                return lp_err(line, "expected a variable in bound");
            };
            let v = vars.get(name);
            lower.insert(v, l);
            pos += 2;
            if let Some((Tok::Cmp(Sense::Le), _)) = toks.get(pos) {
                pos += 1;
                upper.insert(v, parse_rhs(&toks, &mut pos, line)?);
            }
        } else if let Tok::Ident(name) = &toks[pos].0 {
            let v = vars.get(name);
            let Some((Tok::Cmp(s), _)) = toks.get(pos + 1) else {
                return lp_err(line, "expected a comparison in bound");
            };
            let s = *s;
            pos += 2;
            let value = parse_rhs(&toks, &mut pos, line)?;
            match s {
                Sense::Ge => {
                    lower.insert(v, value);
                }
                Sense::Le => {
                    upper.insert(v, value);
                }
                Sense::Eq => {
                    lower.insert(v, value);
                    upper.insert(v, value);
                }
            }
        } else {
            return lp_err(line, "malformed bound");
        }
    }

    let mut kinds: HashMap<usize, VarKind> = HashMap::new();
    let mut declared = Vec::new();
    for (section, kind) in [(Section::Generals, VarKind::Integer), (Section::Binaries, VarKind::Binary)] {
        for (tok, line) in take(section, &mut chunks) {
            match tok {
                Tok::Ident(name) => {
                    let v = vars.get(&name);
                    if kinds.insert(v, kind).is_some() {
                        return lp_err(line, format!("`{name}` declared twice"));
                    }
                    declared.push(v);
                }
                _ => return lp_err(line, "expected variable names"),
            }
        }
    }

    // Continuous variables by first appearance, then Generals, then Binaries.
    let order: Vec<usize> = (0..vars.names.len()).filter(|v| !kinds.contains_key(v)).chain(declared).collect();
    let mut position = vec![0; order.len()];
    for (p, &v) in order.iter().enumerate() {
        position[v] = p;
    }
    let conv = |r: &Rational| T::from_rational(r);
    let variables = order
        .iter()
        .map(|&i| {
            let name = &vars.names[i];
            let kind = kinds.get(&i).copied().unwrap_or(VarKind::Continuous);
            let (default_lower, default_upper) = match kind {
                VarKind::Binary => (Rational::zero(), Some(Rational::from_integer(1))),
                _ => (Rational::zero(), None),
            };
            Variable {
                name: name.clone(),
                kind,
                lower: conv(lower.get(&i).unwrap_or(&default_lower)),
                upper: upper.get(&i).or(default_upper.as_ref()).map(conv),
            }
        })
        .collect();
    let map_terms = |terms: Vec<(Rational, usize)>| terms.into_iter().map(|(c, v)| (conv(&c), position[v])).collect();
    Ok(IpModel {
        variables,
        constraints: rows
            .into_iter()
            .map(|(name, terms, sense, rhs)| Constraint { name, terms: map_terms(terms), sense, rhs: conv(&rhs) })
            .collect(),
        objective: Objective { sense, terms: map_terms(objective_terms) },
    })
}
