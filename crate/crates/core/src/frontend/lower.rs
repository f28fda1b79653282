//! Type checking and lowering of `.knl` trees to three-address code.

use std::fmt;

use indexmap::IndexMap;

use super::ast::{Expr, ExprKind, Pos, SourceAst, Stmt};
use crate::ir::{BinOp, Cond, Instr, Literal, Operand, Program, Type, UnOp, VarInfo};

/// Prefix reserved for compiler temporaries; source identifiers cannot
/// contain it.
pub const TEMP_PREFIX: &str = "%t";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemanticError {
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for SemanticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error at {}: {}", self.pos, self.message)
    }
}

impl std::error::Error for SemanticError {}

type LResult<T> = Result<T, SemanticError>;

fn err<T>(pos: Pos, message: impl Into<String>) -> LResult<T> {
    Err(SemanticError {
        pos,
        message: message.into(),
    })
}

/// Lowers a parsed kernel. The result validates cleanly.
pub fn lower(ast: &SourceAst) -> LResult<Program> {
    let mut vars = IndexMap::new();
    for d in &ast.decls {
        if vars.contains_key(&d.name) {
            return err(d.pos, format!("{} declared twice", d.name));
        }
        let mut info = match d.len {
            Some(0) => return err(d.pos, format!("array {} must have positive length", d.name)),
            Some(n) => VarInfo::array(d.ty, n),
            None => VarInfo::scalar(d.ty),
        };
        info.input = d.input;
        info.output = d.output;
        vars.insert(d.name.clone(), info);
    }
    let mut cx = Lowering {
        vars,
        instrs: Vec::new(),
        temps: 0,
    };
    cx.block(&ast.body)?;
    cx.instrs.push(Instr::Halt);
    Ok(Program::new(cx.vars, cx.instrs))
}

struct Lowering {
    vars: IndexMap<String, VarInfo>,
    instrs: Vec<Instr>,
    temps: usize,
}

impl Lowering {
    fn here(&self) -> usize {
        self.instrs.len()
    }

    fn emit(&mut self, ins: Instr) -> usize {
        self.instrs.push(ins);
        self.instrs.len() - 1
    }

    fn temp(&mut self, ty: Type) -> String {
        let name = format!("{TEMP_PREFIX}{}", self.temps);
        self.temps += 1;
        self.vars.insert(name.clone(), VarInfo::scalar(ty));
        name
    }

    fn var_type(&self, name: &str, pos: Pos) -> LResult<Type> {
        match self.vars.get(name) {
            Some(v) => Ok(v.ty),
            None => err(pos, format!("undeclared variable {name}")),
        }
    }

    fn scalar_type(&self, name: &str, pos: Pos) -> LResult<Type> {
        let ty = self.var_type(name, pos)?;
        if ty.is_array() {
            return err(pos, format!("array {name} used as a scalar"));
        }
        Ok(ty)
    }

    fn array_elem(&self, name: &str, pos: Pos) -> LResult<Type> {
        let ty = self.var_type(name, pos)?;
        if !ty.is_array() {
            return err(pos, format!("{name} is not an array"));
        }
        Ok(ty.elem())
    }

    fn type_of(&self, e: &Expr) -> LResult<Type> {
        match &e.kind {
            ExprKind::Lit(l) => Ok(l.ty()),
            ExprKind::Var(v) => self.scalar_type(v, e.pos),
            ExprKind::Index(a, i) => {
                let elem = self.array_elem(a, e.pos)?;
                self.expect_type(i, Type::Int, "array index")?;
                Ok(elem)
            }
            ExprKind::Un(op, a) => {
                let t = self.type_of(a)?;
                match op {
                    UnOp::Neg if t.is_numeric() => Ok(t),
                    UnOp::Neg => err(e.pos, format!("cannot negate a {t} value")),
                    UnOp::Not if t == Type::Bool => Ok(t),
                    UnOp::Not => err(e.pos, format!("`not` requires bool, found {t}")),
                    UnOp::IntToFloat if t == Type::Int => Ok(Type::Float),
                    UnOp::IntToFloat => err(e.pos, format!("float() requires int, found {t}")),
                }
            }
            ExprKind::Bin(op, a, b) => {
                let (ta, tb) = (self.type_of(a)?, self.type_of(b)?);
                if ta != tb {
                    return err(e.pos, format!("operands of {op} have types {ta} and {tb}"));
                }
                if op.is_logic() && ta != Type::Bool {
                    return err(e.pos, format!("{op} requires bool operands, found {ta}"));
                }
                if (op.is_arith() || op.is_order()) && !ta.is_numeric() {
                    return err(e.pos, format!("{op} requires numeric operands, found {ta}"));
                }
                Ok(if op.is_predicate() { Type::Bool } else { ta })
            }
        }
    }

    fn expect_type(&self, e: &Expr, want: Type, what: &str) -> LResult<()> {
        let got = self.type_of(e)?;
        if got != want {
            return err(e.pos, format!("{what}: expected {want}, found {got}"));
        }
        Ok(())
    }

    /// Operand holding the value of `e`, computing it into a fresh temporary
    /// unless it is already atomic.
    fn operand(&mut self, e: &Expr) -> LResult<Operand> {
        match &e.kind {
            ExprKind::Lit(l) => Ok(Operand::Lit(*l)),
            ExprKind::Var(v) => Ok(Operand::Var(v.clone())),
            _ => {
                let t = self.temp(self.type_of(e)?);
                self.assign(&t, e)?;
                Ok(Operand::Var(t))
            }
        }
    }

    /// Emits code leaving the value of `e` in `dst`; the last instruction
    /// writes `dst` directly.
    fn assign(&mut self, dst: &str, e: &Expr) -> LResult<()> {
        let dst = dst.to_string();
        let ins = match &e.kind {
            ExprKind::Lit(_) | ExprKind::Var(_) => Instr::Copy {
                dst,
                src: self.operand(e)?,
            },
            ExprKind::Index(arr, i) => Instr::Load {
                dst,
                arr: arr.clone(),
                idx: self.operand(i)?,
            },
            ExprKind::Un(op, a) => Instr::Un {
                dst,
                op: *op,
                arg: self.operand(a)?,
            },
            ExprKind::Bin(op, a, b) => {
                let lhs = self.operand(a)?;
                let rhs = self.operand(b)?;
                Instr::Bin { dst, op: *op, lhs, rhs }
            }
        };
        self.emit(ins);
        Ok(())
    }

    fn cond(&mut self, e: &Expr) -> LResult<Cond> {
        self.expect_type(e, Type::Bool, "condition")?;
        Ok(match &e.kind {
            ExprKind::Bin(op, a, b) if op.is_predicate() => {
                let lhs = self.operand(a)?;
                let rhs = self.operand(b)?;
                Cond::Bin(*op, lhs, rhs)
            }
            ExprKind::Un(UnOp::Not, a) => Cond::Not(self.operand(a)?),
            _ => Cond::Operand(self.operand(e)?),
        })
    }

    /// Emits a branch with placeholder targets; patched by [`Self::patch`].
    fn branch(&mut self, cond: Cond) -> usize {
        self.emit(Instr::CondGoto {
            cond,
            then_to: usize::MAX,
            else_to: usize::MAX,
        })
    }

    fn patch(&mut self, at: usize, then_to: Option<usize>, else_to: Option<usize>) {
        match &mut self.instrs[at] {
            Instr::CondGoto {
                then_to: t, else_to: e, ..
            } => {
                if let Some(x) = then_to {
                    *t = x;
                }
                if let Some(x) = else_to {
                    *e = x;
                }
            }
            Instr::Goto(t) => *t = then_to.expect("goto patched with a target"),
            _ => unreachable!("only branches are patched"),
        }
    }

    fn block(&mut self, body: &[Stmt]) -> LResult<()> {
        body.iter().try_for_each(|s| self.stmt(s))
    }

    fn stmt(&mut self, s: &Stmt) -> LResult<()> {
        match s {
            Stmt::Assign { name, value, pos } => {
                let ty = self.scalar_type(name, *pos)?;
                self.expect_type(value, ty, &format!("assignment to {name}"))?;
                self.assign(name, value)
            }
            Stmt::Store {
                name,
                index,
                value,
                pos,
            } => {
                let elem = self.array_elem(name, *pos)?;
                self.expect_type(index, Type::Int, "array index")?;
                self.expect_type(value, elem, &format!("store into {name}"))?;
                let idx = self.operand(index)?;
                let src = self.operand(value)?;
                self.emit(Instr::Store {
                    arr: name.clone(),
                    idx,
                    src,
                });
                Ok(())
            }
            Stmt::If {
                cond,
                then_body,
                else_body,
                ..
            } => {
                let c = self.cond(cond)?;
                let br = self.branch(c);
                self.patch(br, Some(self.here()), None);
                self.block(then_body)?;
                if else_body.is_empty() {
                    self.patch(br, None, Some(self.here()));
                } else {
                    let skip = self.emit(Instr::Goto(usize::MAX));
                    self.patch(br, None, Some(self.here()));
                    self.block(else_body)?;
                    self.patch(skip, Some(self.here()), None);
                }
                Ok(())
            }
            Stmt::While { cond, body, .. } => {
                let head = self.here();
                let c = self.cond(cond)?;
                let br = self.branch(c);
                self.patch(br, Some(self.here()), None);
                self.block(body)?;
                self.emit(Instr::Goto(head));
                self.patch(br, None, Some(self.here()));
                Ok(())
            }
            Stmt::For {
                var,
                from,
                to,
                body,
                pos,
            } => {
                if self.scalar_type(var, *pos)? != Type::Int {
                    return err(*pos, format!("loop counter {var} must be int"));
                }
                self.expect_type(from, Type::Int, "loop start")?;
                self.expect_type(to, Type::Int, "loop bound")?;
                self.assign(var, from)?;
                let bound = match &to.kind {
                    ExprKind::Lit(l) => Operand::Lit(*l),
                    _ => {
                        let t = self.temp(Type::Int);
                        self.assign(&t, to)?;
                        Operand::Var(t)
                    }
                };
                let head = self.here();
                let br = self.branch(Cond::Bin(BinOp::Le, Operand::Var(var.clone()), bound));
                self.patch(br, Some(self.here()), None);
                self.block(body)?;
                self.emit(Instr::Bin {
                    dst: var.clone(),
                    op: BinOp::Add,
                    lhs: Operand::Var(var.clone()),
                    rhs: Operand::Lit(Literal::Int(1)),
                });
                self.emit(Instr::Goto(head));
                self.patch(br, None, Some(self.here()));
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_source, print_tac};
    use crate::ir::validate;

    fn compile(src: &str) -> Program {
        let p = lower(&parse_source(src).unwrap()).unwrap();
        assert_eq!(validate(&p), vec![]);
        p
    }

    fn body(p: &Program) -> Vec<String> {
        p.instrs.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn literal_assignment() {
        let p = compile("var int x out; begin x := 3; end");
        assert_eq!(body(&p), vec!["x := 3", "halt"]);
    }

    #[test]
    fn compound_expression_uses_one_temp() {
        let p = compile("var int a in; var int b in; var int c in; var int x out; begin x := a + b * c; end");
        assert_eq!(body(&p), vec!["%t0 := b * c", "x := a + %t0", "halt"]);
        assert!(print_tac(&p).contains("decl int %t0\n"));
    }

    #[test]
    fn while_loop_shape() {
        let p = compile("var int i; var int n in; begin while i < n do i := i + 1; end end");
        assert_eq!(
            body(&p),
            vec!["if i < n goto 1 else 3", "i := i + 1", "goto 0", "halt"]
        );
    }

    #[test]
    fn for_loop_evaluates_bound_once() {
        let p = compile("var int i; var int n in; var int s out; begin for i := 1 to n - 1 do s := s + i; end end");
        assert_eq!(
            body(&p),
            vec![
                "i := 1",
                "%t0 := n - 1",
                "if i <= %t0 goto 3 else 6",
                "s := s + i",
                "i := i + 1",
                "goto 2",
                "halt"
            ]
        );
    }

    #[test]
    fn if_else_shape() {
        let p = compile("var bool c in; var int x out; begin if not c then x := 1; else x := 2; end end");
        assert_eq!(
            body(&p),
            vec!["if not c goto 1 else 3", "x := 1", "goto 4", "x := 2", "halt"]
        );
    }

    #[test]
    fn semantic_errors_carry_positions() {
        let e = lower(&parse_source("var int x;\nbegin\n  x := y;\nend").unwrap()).unwrap_err();
        assert_eq!(e.to_string(), "error at 3:8: undeclared variable y");
        let e = lower(&parse_source("var int x; begin x := 1.5; end").unwrap()).unwrap_err();
        assert!(e.message.contains("expected int, found float"), "{e}");
        let e = lower(&parse_source("var int x; begin if x then x := 1; end end").unwrap()).unwrap_err();
        assert!(e.message.contains("condition"), "{e}");
        let e = lower(&parse_source("var float A[2]; begin A := 1.0; end").unwrap()).unwrap_err();
        assert!(e.message.contains("array A used as a scalar"), "{e}");
        let e = lower(&parse_source("var int x; var int x; begin end").unwrap()).unwrap_err();
        assert!(e.message.contains("declared twice"), "{e}");
    }

    #[test]
    fn empty_body_is_a_single_halt() {
        assert_eq!(body(&compile("begin end")), vec!["halt"]);
    }
}
