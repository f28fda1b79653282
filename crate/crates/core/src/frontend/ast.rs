use std::fmt;

use crate::ir::{BinOp, Literal, Type, UnOp};

/// Source position, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decl {
    pub name: String,
    /// Element type for arrays.
    pub ty: Type,
    pub len: Option<usize>,
    pub input: bool,
    pub output: bool,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Lit(Literal),
    Var(String),
    Index(String, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Un(UnOp, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Assign {
        name: String,
        value: Expr,
        pos: Pos,
    },
    Store {
        name: String,
        index: Expr,
        value: Expr,
        pos: Pos,
    },
    If {
        cond: Expr,
        then_body: Vec<Stmt>,
        else_body: Vec<Stmt>,
        pos: Pos,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
        pos: Pos,
    },
    /// Counted loop over `from..=to`; the bound is evaluated once.
    For {
        var: String,
        from: Expr,
        to: Expr,
        body: Vec<Stmt>,
        pos: Pos,
    },
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SourceAst {
    pub decls: Vec<Decl>,
    pub body: Vec<Stmt>,
}

impl SourceAst {
    pub fn decl(&self, name: &str) -> Option<&Decl> {
        self.decls.iter().find(|d| d.name == name)
    }
}

/// Binding strength; larger binds tighter.
pub(crate) fn precedence(op: BinOp) -> u8 {
    match op {
        BinOp::Or => 1,
        BinOp::And => 2,
        BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne => 3,
        BinOp::Add | BinOp::Sub => 4,
        BinOp::Mul | BinOp::Div | BinOp::Mod => 5,
    }
}

fn write_lit(f: &mut fmt::Formatter<'_>, l: &Literal) -> fmt::Result {
    match l {
        Literal::Int(n) => write!(f, "{n}"),
        Literal::Bool(b) => write!(f, "{b}"),
        Literal::Float(x) if x.is_finite() => {
            let s = format!("{x:?}");
            if s.starts_with('-') {
                write!(f, "({s})")
            } else {
                f.write_str(&s)
            }
        }
        // Non-finite floats have no literal syntax.
        Literal::Float(x) if x.is_nan() => f.write_str("(0.0 / 0.0)"),
        Literal::Float(x) if *x > 0.0 => f.write_str("(1.0 / 0.0)"),
        Literal::Float(_) => f.write_str("(-1.0 / 0.0)"),
    }
}

impl Expr {
    fn write_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        match &self.kind {
            ExprKind::Lit(Literal::Int(n)) if *n < 0 => write!(f, "({n})"),
            ExprKind::Lit(l) => write_lit(f, l),
            ExprKind::Var(v) => f.write_str(v),
            ExprKind::Index(a, i) => write!(f, "{a}[{i}]"),
            ExprKind::Un(UnOp::IntToFloat, e) => write!(f, "float({e})"),
            ExprKind::Un(op, e) => {
                f.write_str(if *op == UnOp::Neg { "-" } else { "not " })?;
                // `-5` would reparse as a literal rather than a negation.
                if *op == UnOp::Neg && matches!(e.kind, ExprKind::Lit(Literal::Int(_) | Literal::Float(_))) {
                    return write!(f, "({e})");
                }
                e.write_prec(f, 6)
            }
            ExprKind::Bin(op, a, b) => {
                let p = precedence(*op);
                if p < min {
                    f.write_str("(")?;
                }
                a.write_prec(f, p)?;
                write!(f, " {} ", op.symbol())?;
                b.write_prec(f, p + 1)?;
                if p < min {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}

fn write_block(f: &mut fmt::Formatter<'_>, body: &[Stmt], depth: usize) -> fmt::Result {
    for s in body {
        s.write_indented(f, depth)?;
    }
    Ok(())
}

impl Stmt {
    fn write_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match self {
            Stmt::Assign { name, value, .. } => writeln!(f, "{pad}{name} := {value};"),
            Stmt::Store {
                name, index, value, ..
            } => writeln!(f, "{pad}{name}[{index}] := {value};"),
            Stmt::If {
                cond,
                then_body,
                else_body,
                ..
            } => {
                writeln!(f, "{pad}if {cond} then")?;
                write_block(f, then_body, depth + 1)?;
                if !else_body.is_empty() {
                    writeln!(f, "{pad}else")?;
                    write_block(f, else_body, depth + 1)?;
                }
                writeln!(f, "{pad}end")
            }
            Stmt::While { cond, body, .. } => {
                writeln!(f, "{pad}while {cond} do")?;
                write_block(f, body, depth + 1)?;
                writeln!(f, "{pad}end")
            }
            Stmt::For {
                var, from, to, body, ..
            } => {
                writeln!(f, "{pad}for {var} := {from} to {to} do")?;
                write_block(f, body, depth + 1)?;
                writeln!(f, "{pad}end")
            }
        }
    }
}

/// Canonical source text; parsing it yields the same tree up to positions.
impl fmt::Display for SourceAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            write!(f, "var {} {}", d.ty.keyword(), d.name)?;
            if let Some(n) = d.len {
                write!(f, "[{n}]")?;
            }
            if d.input {
                f.write_str(" in")?;
            }
            if d.output {
                f.write_str(" out")?;
            }
            writeln!(f, ";")?;
        }
        writeln!(f, "begin")?;
        write_block(f, &self.body, 1)?;
        writeln!(f, "end")
    }
}
