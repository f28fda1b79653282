use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TokenKind {
    Ident,
    IntLit,
    FloatLit,
    True,
    False,
    Var,
    Begin,
    End,
    If,
    Then,
    Else,
    While,
    Do,
    For,
    To,
    In,
    Out,
    IntTy,
    FloatTy,
    BoolTy,
    And,
    Or,
    Not,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    /// A character sequence no other kind matches.
    Error,
    Eof,
}

impl TokenKind {
    /// How the kind is named in diagnostics.
    pub fn describe(self) -> &'static str {
        use TokenKind::*;
        match self {
            Ident => "identifier",
            IntLit => "integer literal",
            FloatLit => "float literal",
            True => "`true`",
            False => "`false`",
            Var => "`var`",
            Begin => "`begin`",
            End => "`end`",
            If => "`if`",
            Then => "`then`",
            Else => "`else`",
            While => "`while`",
            Do => "`do`",
            For => "`for`",
            To => "`to`",
            In => "`in`",
            Out => "`out`",
            IntTy => "`int`",
            FloatTy => "`float`",
            BoolTy => "`bool`",
            And => "`and`",
            Or => "`or`",
            Not => "`not`",
            Assign => "`:=`",
            Plus => "`+`",
            Minus => "`-`",
            Star => "`*`",
            Slash => "`/`",
            Percent => "`%`",
            Lt => "`<`",
            Le => "`<=`",
            Gt => "`>`",
            Ge => "`>=`",
            EqEq => "`==`",
            Ne => "`!=`",
            LParen => "`(`",
            RParen => "`)`",
            LBracket => "`[`",
            RBracket => "`]`",
            Semi => "`;`",
            Error => "invalid token",
            Eof => "end of input",
        }
    }

    fn keyword(word: &str) -> Option<TokenKind> {
        use TokenKind::*;
        Some(match word {
            "true" => True,
            "false" => False,
            "var" => Var,
            "begin" => Begin,
            "end" => End,
            "if" => If,
            "then" => Then,
            "else" => Else,
            "while" => While,
            "do" => Do,
            "for" => For,
            "to" => To,
            "in" => In,
            "out" => Out,
            "int" => IntTy,
            "float" => FloatTy,
            "bool" => BoolTy,
            "and" => And,
            "or" => Or,
            "not" => Not,
            _ => return None,
        })
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.describe())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// 1-based.
    pub line: usize,
    /// 1-based, counted in characters.
    pub column: usize,
}

/// Splits source text into tokens. Never fails: unrecognised input becomes an
/// [`TokenKind::Error`] token. The last token is always `Eof`.
pub fn lex(src: &str) -> Vec<Token> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            TokenKind::keyword(&word).unwrap_or(TokenKind::Ident)
        } else if c.is_ascii_digit() {
            lex_number(&chars, &mut i)
        } else {
            let next = chars.get(i + 1).copied();
            let (kind, width) = match (c, next) {
                (':', Some('=')) => (TokenKind::Assign, 2),
                ('<', Some('=')) => (TokenKind::Le, 2),
                ('>', Some('=')) => (TokenKind::Ge, 2),
                ('=', Some('=')) => (TokenKind::EqEq, 2),
                ('!', Some('=')) => (TokenKind::Ne, 2),
                ('<', _) => (TokenKind::Lt, 1),
                ('>', _) => (TokenKind::Gt, 1),
                ('+', _) => (TokenKind::Plus, 1),
                ('-', _) => (TokenKind::Minus, 1),
                ('*', _) => (TokenKind::Star, 1),
                ('/', _) => (TokenKind::Slash, 1),
                ('%', _) => (TokenKind::Percent, 1),
                ('(', _) => (TokenKind::LParen, 1),
                (')', _) => (TokenKind::RParen, 1),
                ('[', _) => (TokenKind::LBracket, 1),
                (']', _) => (TokenKind::RBracket, 1),
                (';', _) => (TokenKind::Semi, 1),
                _ => (TokenKind::Error, 1),
            };
            i += width;
            kind
        };
        out.push(Token {
            kind,
            lexeme: chars[start..i].iter().collect(),
            line,
            column: col,
        });
        col += i - start;
    }
    out.push(Token {
        kind: TokenKind::Eof,
        lexeme: String::new(),
        line,
        column: col,
    });
    out
}

/// Digits, an optional fraction, and an optional exponent.
fn lex_number(chars: &[char], i: &mut usize) -> TokenKind {
    let digits = |i: &mut usize| {
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
    };
    digits(i);
    let mut kind = TokenKind::IntLit;
    if chars.get(*i) == Some(&'.') && chars.get(*i + 1).is_some_and(char::is_ascii_digit) {
        *i += 1;
        digits(i);
        kind = TokenKind::FloatLit;
    }
    if matches!(chars.get(*i), Some('e' | 'E')) {
        let mut j = *i + 1;
        if matches!(chars.get(j), Some('+' | '-')) {
            j += 1;
        }
        if chars.get(j).is_some_and(char::is_ascii_digit) {
            *i = j;
            digits(i);
            kind = TokenKind::FloatLit;
        }
    }
    if chars.get(*i).is_some_and(|c| c.is_ascii_alphabetic() || *c == '_') {
        while *i < chars.len() && (chars[*i].is_ascii_alphanumeric() || chars[*i] == '_') {
            *i += 1;
        }
        return TokenKind::Error;
    }
    kind
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        lex(src).into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn keywords_operators_and_literals() {
        use TokenKind::*;
        assert_eq!(
            kinds("var int x out; x := 3.5e2 <= 4 != y_1"),
            vec![Var, IntTy, Ident, Out, Semi, Ident, Assign, FloatLit, Le, IntLit, Ne, Ident, Eof]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let toks = lex("begin\n  x := 1; // note\nend");
        let pos: Vec<(usize, usize)> = toks.iter().map(|t| (t.line, t.column)).collect();
        assert_eq!(pos, vec![(1, 1), (2, 3), (2, 5), (2, 8), (2, 9), (3, 1), (3, 4)]);
    }

    #[test]
    fn bad_input_becomes_error_tokens() {
        use TokenKind::*;
        assert_eq!(kinds("x @ 3abc"), vec![Ident, Error, Error, Eof]);
        assert_eq!(lex("3abc")[0].lexeme, "3abc");
    }

    #[test]
    fn dot_without_fraction_is_not_float() {
        use TokenKind::*;
        assert_eq!(kinds("3."), vec![IntLit, Error, Eof]);
        assert_eq!(kinds("2e"), vec![Error, Eof]);
    }
}
