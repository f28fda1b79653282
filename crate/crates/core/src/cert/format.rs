//! Line-oriented certificate text.
//!
//! ```text
//! cert v1 stutter=2 src=0f3a... tgt=9b1c...
//! map 1 0 : eq x x
//! map 2 1 : eq x x
//! ```

use thiserror::Error;

use super::{Atom, Certificate, Invariant};
use crate::ir::Literal;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct CertParseError {
    pub line: usize,
    pub message: String,
}

pub(crate) fn lit_text(l: &Literal) -> String {
    match l {
        Literal::Int(n) => format!("i:{n}"),
        Literal::Float(x) => format!("f:{x:?}"),
        Literal::Bool(b) => format!("b:{b}"),
    }
}

fn parse_lit(tok: &str) -> Result<Literal, String> {
    let bad = || format!("malformed literal `{tok}`");
    let (tag, body) = tok.split_once(':').ok_or_else(bad)?;
    match tag {
        "i" => body.parse().map(Literal::Int).map_err(|_| bad()),
        "f" => body.parse::<f64>().map(Literal::float).map_err(|_| bad()),
        "b" => body.parse().map(Literal::Bool).map_err(|_| bad()),
        _ => Err(bad()),
    }
}

pub fn print_cert(c: &Certificate) -> String {
    let mut out = format!("cert v1 stutter={}", c.stutter);
    if let Some((s, t)) = &c.programs {
        out.push_str(&format!(" src={s} tgt={t}"));
    }
    out.push('\n');
    for ((s, t), inv) in &c.entries {
        out.push_str(&format!("map {s} {t} :"));
        for a in inv {
            out.push_str(&format!(" {a}"));
        }
        out.push('\n');
    }
    out
}

pub fn parse_cert(text: &str) -> Result<Certificate, CertParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(CertParseError {
        line: 1,
        message: "empty certificate".into(),
    })?;
    let herr = |message: String| CertParseError { line: hline, message };
    let mut toks = header.split_whitespace();
    if toks.next() != Some("cert") || toks.next() != Some("v1") {
        return Err(herr("expected header `cert v1 stutter=<k>`".into()));
    }
    let mut stutter = None;
    let (mut src, mut tgt) = (None, None);
    for tok in toks {
        match tok.split_once('=') {
            Some(("stutter", k)) => stutter = Some(k.parse::<usize>().map_err(|_| herr(format!("bad stutter `{k}`")))?),
            Some(("src", h)) => src = Some(h.to_string()),
            Some(("tgt", h)) => tgt = Some(h.to_string()),
            _ => return Err(herr(format!("unexpected header field `{tok}`"))),
        }
    }
    let stutter = stutter.ok_or_else(|| herr("missing stutter".into()))?;
    let programs = match (src, tgt) {
        (Some(s), Some(t)) => Some((s, t)),
        (None, None) => None,
        _ => return Err(herr("src and tgt hashes must appear together".into())),
    };
    let mut cert = Certificate {
        entries: Default::default(),
        stutter,
        programs,
    };
    for (line, text) in lines {
        let err = |message: String| CertParseError { line, message };
        let (head, atoms) = text.split_once(':').ok_or_else(|| err("expected `map <s> <t> : <atoms>`".into()))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        let [kw, s, t] = head[..] else {
            return Err(err("expected `map <s> <t> : <atoms>`".into()));
        };
        if kw != "map" {
            return Err(err(format!("expected `map`, found `{kw}`")));
        }
        let point = |x: &str| x.parse::<usize>().map_err(|_| err(format!("bad program point `{x}`")));
        let key = (point(s)?, point(t)?);
        let inv = parse_atoms(atoms).map_err(err)?;
        if cert.entries.insert(key, inv).is_some() {
            return Err(err(format!("duplicate entry ({}, {})", key.0, key.1)));
        }
    }
    Ok(cert)
}

fn parse_atoms(text: &str) -> Result<Invariant, String> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    let mut inv = Invariant::new();
    let mut k = 0;
    while k < toks.len() {
        let arg = |j: usize| toks.get(k + j).copied().ok_or_else(|| format!("truncated atom `{}`", toks[k]));
        let atom = match toks[k] {
            "eq" => Atom::EqVar(arg(1)?.into(), arg(2)?.into()),
            "eqarr" => Atom::EqArr(arg(1)?.into(), arg(2)?.into()),
            "consts" => Atom::ConstS(arg(1)?.into(), parse_lit(arg(2)?)?),
            "constt" => Atom::ConstT(arg(1)?.into(), parse_lit(arg(2)?)?),
            other => return Err(format!("unknown atom `{other}`")),
        };
        inv.insert(atom);
        k += 3;
    }
    Ok(inv)
}
