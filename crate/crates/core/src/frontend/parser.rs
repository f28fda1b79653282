use std::collections::BTreeSet;
use std::fmt;

use super::ast::{Decl, Expr, ExprKind, Pos, SourceAst, Stmt};
use super::lexer::{lex, Token, TokenKind};
use crate::ir::{BinOp, Literal, Type, UnOp};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub pos: Pos,
    /// Lexeme of the offending token (empty at end of input).
    pub found: String,
    /// Token kinds that would have been accepted; empty for malformed literals.
    pub expected: Vec<TokenKind>,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}: {}", self.pos, self.message)
    }
}

impl std::error::Error for SyntaxError {}

/// Parses `.knl` source text.
pub fn parse_source(text: &str) -> Result<SourceAst, SyntaxError> {
    let mut p = Parser {
        toks: lex(text),
        at: 0,
        expected: BTreeSet::new(),
    };
    p.program()
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    /// Kinds tried at the current position since the last advance.
    expected: BTreeSet<TokenKind>,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn pos(&self) -> Pos {
        let t = self.peek();
        Pos {
            line: t.line,
            column: t.column,
        }
    }

    fn check(&mut self, kind: TokenKind) -> bool {
        self.expected.insert(kind);
        self.peek().kind == kind
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if t.kind != TokenKind::Eof {
            self.at += 1;
        }
        self.expected.clear();
        t
    }

    fn eat(&mut self, kind: TokenKind) -> bool {
        if self.check(kind) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Token> {
        if self.check(kind) {
            Ok(self.advance())
        } else {
            Err(self.error())
        }
    }

    fn error(&self) -> SyntaxError {
        let t = self.peek();
        let expected: Vec<TokenKind> = self.expected.iter().copied().collect();
        let found = if t.kind == TokenKind::Eof {
            "end of input".to_string()
        } else {
            format!("`{}`", t.lexeme)
        };
        let names: Vec<&str> = expected.iter().map(|k| k.describe()).collect();
        let message = match names.as_slice() {
            [one] => format!("expected {one}, found {found}"),
            _ => format!("expected one of {}, found {found}", names.join(", ")),
        };
        SyntaxError {
            pos: self.pos(),
            found: t.lexeme.clone(),
            expected,
            message,
        }
    }

    fn malformed(&self, pos: Pos, lexeme: &str, what: &str) -> SyntaxError {
        SyntaxError {
            pos,
            found: lexeme.to_string(),
            expected: Vec::new(),
            message: format!("{what} `{lexeme}`"),
        }
    }

    fn program(&mut self) -> PResult<SourceAst> {
        let mut decls = Vec::new();
        while self.check(TokenKind::Var) {
            decls.push(self.decl()?);
        }
        self.expect(TokenKind::Begin)?;
        let body = self.block(&[TokenKind::End])?;
        self.expect(TokenKind::End)?;
        self.eat(TokenKind::Semi);
        self.expect(TokenKind::Eof)?;
        Ok(SourceAst { decls, body })
    }

    fn decl(&mut self) -> PResult<Decl> {
        let pos = self.pos();
        self.expect(TokenKind::Var)?;
        let ty = if self.eat(TokenKind::IntTy) {
            Type::Int
        } else if self.eat(TokenKind::FloatTy) {
            Type::Float
        } else if self.eat(TokenKind::BoolTy) {
            Type::Bool
        } else {
            return Err(self.error());
        };
        let name = self.expect(TokenKind::Ident)?.lexeme;
        let mut len = None;
        if self.eat(TokenKind::LBracket) {
            let lpos = self.pos();
            let t = self.expect(TokenKind::IntLit)?;
            len = Some(
                t.lexeme
                    .parse::<usize>()
                    .map_err(|_| self.malformed(lpos, &t.lexeme, "array length out of range"))?,
            );
            self.expect(TokenKind::RBracket)?;
        }
        let input = self.eat(TokenKind::In);
        let output = self.eat(TokenKind::Out);
        self.expect(TokenKind::Semi)?;
        Ok(Decl {
            name,
            ty,
            len,
            input,
            output,
            pos,
        })
    }

    /// Statements up to (not including) one of `terminators`.
    fn block(&mut self, terminators: &[TokenKind]) -> PResult<Vec<Stmt>> {
        let mut out = Vec::new();
        loop {
            for &t in terminators {
                if self.check(t) {
                    return Ok(out);
                }
            }
            out.push(self.stmt()?);
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let pos = self.pos();
        if self.check(TokenKind::Ident) {
            let name = self.advance().lexeme;
            if self.eat(TokenKind::LBracket) {
                let index = self.expr()?;
                self.expect(TokenKind::RBracket)?;
                self.expect(TokenKind::Assign)?;
                let value = self.expr()?;
                self.expect(TokenKind::Semi)?;
                return Ok(Stmt::Store {
                    name,
                    index,
                    value,
                    pos,
                });
            }
            self.expect(TokenKind::Assign)?;
            let value = self.expr()?;
            self.expect(TokenKind::Semi)?;
            return Ok(Stmt::Assign { name, value, pos });
        }
        if self.eat(TokenKind::If) {
            let cond = self.expr()?;
            self.expect(TokenKind::Then)?;
            let then_body = self.block(&[TokenKind::Else, TokenKind::End])?;
            let else_body = if self.eat(TokenKind::Else) {
                self.block(&[TokenKind::End])?
            } else {
                Vec::new()
            };
            self.close_block()?;
            return Ok(Stmt::If {
                cond,
                then_body,
                else_body,
                pos,
            });
        }
        if self.eat(TokenKind::While) {
            let cond = self.expr()?;
            self.expect(TokenKind::Do)?;
            let body = self.block(&[TokenKind::End])?;
            self.close_block()?;
            return Ok(Stmt::While { cond, body, pos });
        }
        if self.eat(TokenKind::For) {
            let var = self.expect(TokenKind::Ident)?.lexeme;
            self.expect(TokenKind::Assign)?;
            let from = self.expr()?;
            self.expect(TokenKind::To)?;
            let to = self.expr()?;
            self.expect(TokenKind::Do)?;
            let body = self.block(&[TokenKind::End])?;
            self.close_block()?;
            return Ok(Stmt::For {
                var,
                from,
                to,
                body,
                pos,
            });
        }
        Err(self.error())
    }

    fn close_block(&mut self) -> PResult<()> {
        self.expect(TokenKind::End)?;
        self.eat(TokenKind::Semi);
        Ok(())
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binop_at(&mut self, level: u8) -> Option<BinOp> {
        let table: &[(TokenKind, BinOp)] = match level {
            1 => &[(TokenKind::Or, BinOp::Or)],
            2 => &[(TokenKind::And, BinOp::And)],
            3 => &[
                (TokenKind::Lt, BinOp::Lt),
                (TokenKind::Le, BinOp::Le),
                (TokenKind::Gt, BinOp::Gt),
                (TokenKind::Ge, BinOp::Ge),
                (TokenKind::EqEq, BinOp::Eq),
                (TokenKind::Ne, BinOp::Ne),
            ],
            4 => &[(TokenKind::Plus, BinOp::Add), (TokenKind::Minus, BinOp::Sub)],
            _ => &[
                (TokenKind::Star, BinOp::Mul),
                (TokenKind::Slash, BinOp::Div),
                (TokenKind::Percent, BinOp::Mod),
            ],
        };
        table.iter().find(|(k, _)| self.check(*k)).map(|&(_, op)| op)
    }

    /// Left-associative binary levels; comparisons do not chain.
    fn binary(&mut self, level: u8) -> PResult<Expr> {
        if level > 5 {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        while let Some(op) = self.binop_at(level) {
            let pos = self.pos();
            self.advance();
            let rhs = self.binary(level + 1)?;
            lhs = Expr {
                kind: ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)),
                pos,
            };
            if level == 3 {
                break;
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        if self.eat(TokenKind::Minus) {
            if self.check(TokenKind::IntLit) || self.check(TokenKind::FloatLit) {
                return self.number(pos, true);
            }
            let e = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Un(UnOp::Neg, Box::new(e)),
                pos,
            });
        }
        if self.eat(TokenKind::Not) {
            let e = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Un(UnOp::Not, Box::new(e)),
                pos,
            });
        }
        self.primary()
    }

    fn number(&mut self, pos: Pos, negate: bool) -> PResult<Expr> {
        let t = self.advance();
        let lit = if t.kind == TokenKind::IntLit {
            let n: i128 = t
                .lexeme
                .parse()
                .map_err(|_| self.malformed(pos, &t.lexeme, "integer literal out of range"))?;
            let n = if negate { -n } else { n };
            Literal::Int(i64::try_from(n).map_err(|_| self.malformed(pos, &t.lexeme, "integer literal out of range"))?)
        } else {
            let x: f64 = t
                .lexeme
                .parse()
                .map_err(|_| self.malformed(pos, &t.lexeme, "malformed float literal"))?;
            Literal::float(if negate { -x } else { x })
        };
        Ok(Expr {
            kind: ExprKind::Lit(lit),
            pos,
        })
    }

    fn primary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        if self.check(TokenKind::IntLit) || self.check(TokenKind::FloatLit) {
            return self.number(pos, false);
        }
        let lit = |b| Expr {
            kind: ExprKind::Lit(Literal::Bool(b)),
            pos,
        };
        if self.eat(TokenKind::True) {
            return Ok(lit(true));
        }
        if self.eat(TokenKind::False) {
            return Ok(lit(false));
        }
        if self.check(TokenKind::Ident) {
            let name = self.advance().lexeme;
            if self.eat(TokenKind::LBracket) {
                let idx = self.expr()?;
                self.expect(TokenKind::RBracket)?;
                return Ok(Expr {
                    kind: ExprKind::Index(name, Box::new(idx)),
                    pos,
                });
            }
            return Ok(Expr {
                kind: ExprKind::Var(name),
                pos,
            });
        }
        if self.eat(TokenKind::FloatTy) {
            self.expect(TokenKind::LParen)?;
            let e = self.expr()?;
            self.expect(TokenKind::RParen)?;
            return Ok(Expr {
                kind: ExprKind::Un(UnOp::IntToFloat, Box::new(e)),
                pos,
            });
        }
        if self.eat(TokenKind::LParen) {
            let e = self.expr()?;
            self.expect(TokenKind::RParen)?;
            return Ok(e);
        }
        Err(self.error())
    }
}
