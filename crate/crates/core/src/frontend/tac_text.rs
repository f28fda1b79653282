//! Line-oriented textual form of [`Program`]s.
//!
//! ```text
//! tac v1 hash=3f1c0c8e2b7a9d10
//! decl int x out
//! decl float[8] A in
//! 0: x := 3
//! 1: goto 3
//! ...
//! ```
//!
//! The hash covers every byte after the header line. The printer is canonical,
//! so `parse_tac(print_tac(p)) == p` and printing is byte stable.

use indexmap::IndexMap;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ir::{BinOp, Cond, Instr, Literal, Operand, Program, Type, UnOp, VarInfo};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct TacParseError {
    pub line: usize,
    pub message: String,
}

const KEYWORDS: &[&str] = &[
    "true", "false", "not", "neg", "itof", "and", "or", "goto", "if", "else", "halt", "noop", "decl", "NaN",
    "inf",
];

/// Hex digest identifying a program's printed body.
pub fn content_hash(p: &Program) -> String {
    hash_text(&print_body(p))
}

pub(crate) fn hash_text(body: &str) -> String {
    Sha256::digest(body.as_bytes())
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn print_tac(p: &Program) -> String {
    let body = print_body(p);
    format!("tac v1 hash={}\n{body}", hash_text(&body))
}

fn print_body(p: &Program) -> String {
    let mut out = String::new();
    for (name, info) in &p.vars {
        out.push_str("decl ");
        out.push_str(info.ty.keyword());
        if let Some(len) = info.len {
            out.push_str(&format!("[{len}]"));
        }
        out.push(' ');
        out.push_str(name);
        if info.input {
            out.push_str(" in");
        }
        if info.output {
            out.push_str(" out");
        }
        out.push('\n');
    }
    for (i, ins) in p.instrs.iter().enumerate() {
        out.push_str(&format!("{i}: {ins}\n"));
    }
    out
}

pub fn parse_tac(text: &str) -> Result<Program, TacParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hline, header) = lines
        .by_ref()
        .find(|(_, l)| !is_blank(l))
        .ok_or(TacParseError {
            line: 1,
            message: "empty input, expected `tac v1` header".into(),
        })?;
    let expected_hash = parse_header(hline, header)?;

    let mut vars = IndexMap::new();
    let mut instrs = Vec::new();
    for (line, raw) in lines {
        if is_blank(raw) {
            continue;
        }
        let err = |message: String| TacParseError { line, message };
        let toks = tokenize(raw);
        if toks[0] == "decl" {
            if !instrs.is_empty() {
                return Err(err("declarations must precede instructions".into()));
            }
            let (name, info) = parse_decl(&toks[1..]).map_err(err)?;
            if vars.insert(name.clone(), info).is_some() {
                return Err(err(format!("duplicate declaration of {name}")));
            }
            continue;
        }
        let idx = toks[0]
            .strip_suffix(':')
            .and_then(|n| n.parse::<usize>().ok())
            .ok_or_else(|| err(format!("expected `<index>:`, found `{}`", toks[0])))?;
        if idx != instrs.len() {
            return Err(err(format!("instruction index {idx}, expected {}", instrs.len())));
        }
        instrs.push(parse_instr(&toks[1..]).map_err(err)?);
    }
    let p = Program { vars, instrs };
    if let Some(h) = expected_hash {
        let actual = content_hash(&p);
        if h != actual {
            return Err(TacParseError {
                line: hline,
                message: format!("content hash mismatch: header {h}, body {actual}"),
            });
        }
    }
    Ok(p)
}

fn is_blank(l: &str) -> bool {
    let t = l.trim();
    t.is_empty() || t.starts_with('#')
}

fn parse_header(line: usize, header: &str) -> Result<Option<String>, TacParseError> {
    let mut parts = header.split_whitespace();
    if parts.next() != Some("tac") || parts.next() != Some("v1") {
        return Err(TacParseError {
            line,
            message: "expected `tac v1` header".into(),
        });
    }
    let mut hash = None;
    for part in parts {
        match part.strip_prefix("hash=") {
            Some(h) => hash = Some(h.to_string()),
            None => {
                return Err(TacParseError {
                    line,
                    message: format!("unexpected header field `{part}`"),
                })
            }
        }
    }
    Ok(hash)
}

fn tokenize(line: &str) -> Vec<String> {
    let line = line.split('#').next().unwrap_or("");
    line.replace('[', " [ ")
        .replace(']', " ] ")
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

fn parse_decl(toks: &[String]) -> Result<(String, VarInfo), String> {
    let t: Vec<&str> = toks.iter().map(String::as_str).collect();
    let elem = match t.first() {
        Some(&"int") => Type::Int,
        Some(&"float") => Type::Float,
        Some(&"bool") => Type::Bool,
        other => return Err(format!("expected a type, found {other:?}")),
    };
    let (mut info, rest) = if t.get(1) == Some(&"[") {
        let len = t
            .get(2)
            .and_then(|n| n.parse::<usize>().ok())
            .ok_or("expected array length")?;
        if t.get(3) != Some(&"]") {
            return Err("expected `]`".into());
        }
        (VarInfo::array(elem, len), &t[4..])
    } else {
        (VarInfo::scalar(elem), &t[1..])
    };
    let name = rest.first().ok_or("expected variable name")?;
    check_name(name)?;
    for flag in &rest[1..] {
        match *flag {
            "in" => info.input = true,
            "out" => info.output = true,
            f => return Err(format!("unknown declaration flag `{f}`")),
        }
    }
    Ok((name.to_string(), info))
}

fn check_name(name: &str) -> Result<(), String> {
    let mut chars = name.chars();
    let ok_start = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_' || c == '%');
    if !ok_start || !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') || KEYWORDS.contains(&name) {
        return Err(format!("invalid variable name `{name}`"));
    }
    Ok(())
}

pub(crate) fn parse_literal(tok: &str) -> Option<Literal> {
    match tok {
        "true" => return Some(Literal::Bool(true)),
        "false" => return Some(Literal::Bool(false)),
        "NaN" | "inf" | "-inf" => return tok.parse::<f64>().ok().map(Literal::float),
        _ => {}
    }
    let digits = tok.strip_prefix('-').unwrap_or(tok);
    if !digits.starts_with(|c: char| c.is_ascii_digit()) {
        return None;
    }
    if tok.contains(['.', 'e', 'E']) {
        tok.parse::<f64>().ok().map(Literal::float)
    } else {
        tok.parse::<i64>().ok().map(Literal::Int)
    }
}

fn parse_operand(tok: &str) -> Result<Operand, String> {
    if let Some(l) = parse_literal(tok) {
        return Ok(Operand::Lit(l));
    }
    check_name(tok)?;
    Ok(Operand::Var(tok.to_string()))
}

fn parse_target(tok: Option<&&str>) -> Result<usize, String> {
    tok.and_then(|t| t.parse::<usize>().ok())
        .ok_or_else(|| format!("expected instruction index, found {tok:?}"))
}

fn parse_instr(toks: &[String]) -> Result<Instr, String> {
    let t: Vec<&str> = toks.iter().map(String::as_str).collect();
    match t.as_slice() {
        [] => Err("missing instruction".into()),
        ["halt"] => Ok(Instr::Halt),
        ["noop"] => Ok(Instr::Noop),
        ["goto", n] => Ok(Instr::Goto(parse_target(Some(n))?)),
        ["if", rest @ ..] => {
            let g = rest
                .iter()
                .position(|&x| x == "goto")
                .ok_or("expected `goto` in conditional branch")?;
            let cond = match &rest[..g] {
                [a] => Cond::Operand(parse_operand(a)?),
                ["not", a] => Cond::Not(parse_operand(a)?),
                [a, op, b] => {
                    let op = BinOp::from_symbol(op).ok_or_else(|| format!("unknown operator `{op}`"))?;
                    Cond::Bin(op, parse_operand(a)?, parse_operand(b)?)
                }
                other => return Err(format!("malformed branch condition {other:?}")),
            };
            let tail = &rest[g..];
            if tail.len() != 4 || tail[2] != "else" {
                return Err("expected `goto <n> else <m>`".into());
            }
            Ok(Instr::CondGoto {
                cond,
                then_to: parse_target(tail.get(1))?,
                else_to: parse_target(tail.get(3))?,
            })
        }
        [arr, "[", idx, "]", ":=", src] => {
            check_name(arr)?;
            Ok(Instr::Store {
                arr: arr.to_string(),
                idx: parse_operand(idx)?,
                src: parse_operand(src)?,
            })
        }
        [dst, ":=", rhs @ ..] => {
            check_name(dst)?;
            let dst = dst.to_string();
            match rhs {
                [a] => Ok(Instr::Copy {
                    dst,
                    src: parse_operand(a)?,
                }),
                [op, a] => {
                    let op = UnOp::from_keyword(op).ok_or_else(|| format!("unknown unary operator `{op}`"))?;
                    Ok(Instr::Un {
                        dst,
                        op,
                        arg: parse_operand(a)?,
                    })
                }
                [a, op, b] => {
                    let op = BinOp::from_symbol(op).ok_or_else(|| format!("unknown operator `{op}`"))?;
                    Ok(Instr::Bin {
                        dst,
                        op,
                        lhs: parse_operand(a)?,
                        rhs: parse_operand(b)?,
                    })
                }
                [arr, "[", idx, "]"] => {
                    check_name(arr)?;
                    Ok(Instr::Load {
                        dst,
                        arr: arr.to_string(),
                        idx: parse_operand(idx)?,
                    })
                }
                _ => Err(format!("malformed assignment right-hand side {rhs:?}")),
            }
        }
        _ => Err(format!("unrecognized instruction `{}`", t.join(" "))),
    }
}
