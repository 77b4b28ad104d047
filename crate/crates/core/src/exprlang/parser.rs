use super::{BinOp, Expr, Func, ParseError, ParseErrorKind, Span, Var};
use crate::jets::VarKind;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Num(v) => format!("number {v}"),
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::Caret => "`^`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Comma => "`,`".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn lex(source: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = source.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Token::Plus,
            '-' => Token::Minus,
            '*' => Token::Star,
            '/' => Token::Slash,
            '^' => Token::Caret,
            '(' => Token::LParen,
            ')' => Token::RParen,
            ',' => Token::Comma,
            '0'..='9' | '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &source[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    kind: ParseErrorKind::BadNumber(text.to_string()),
                    pos: start,
                })?;
                out.push((Token::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Token::Ident(source[start..i].to_string()), start));
                continue;
            }
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::UnexpectedChar(other),
                    pos: start,
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Token::End, source.len()));
    Ok(out)
}

pub(super) struct Parser {
    tokens: Vec<(Token, usize)>,
    cursor: usize,
    dim: usize,
    allow_fibre: bool,
}

impl Parser {
    pub(super) fn new(source: &str, dim: usize, allow_fibre: bool) -> Result<Parser, ParseError> {
        Ok(Parser {
            tokens: lex(source)?,
            cursor: 0,
            dim,
            allow_fibre,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.cursor].0
    }

    fn pos(&self) -> usize {
        self.tokens[self.cursor].1
    }

    fn bump(&mut self) -> (Token, usize) {
        let t = self.tokens[self.cursor].clone();
        if t.0 != Token::End {
            self.cursor += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let kind = match self.peek() {
            Token::End => ParseErrorKind::UnexpectedEnd(expected.to_string()),
            tok => ParseErrorKind::UnexpectedToken {
                found: tok.describe(),
                expected: expected.to_string(),
            },
        };
        ParseError {
            kind,
            pos: self.pos(),
        }
    }

    fn expect(&mut self, tok: Token, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    pub(super) fn parse_complete(mut self) -> Result<Expr, ParseError> {
        let e = self.expr()?;
        if *self.peek() != Token::End {
            return Err(self.unexpected("an operator or end of input"));
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinOp::Add,
                Token::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let (_, pos) = self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span: Span(pos),
            };
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinOp::Mul,
                Token::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            let (_, pos) = self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                span: Span(pos),
            };
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Token::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Token::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Token::Caret {
            let (_, pos) = self.bump();
            let exp = self.exponent()?;
            return Ok(Expr::Pow {
                base: Box::new(base),
                exp,
                span: Span(pos),
            });
        }
        Ok(base)
    }

    // exponent = ["+"|"-"] INTEGER ["^" exponent]
    fn exponent(&mut self) -> Result<i32, ParseError> {
        let sign = match self.peek() {
            Token::Minus => {
                self.bump();
                -1
            }
            Token::Plus => {
                self.bump();
                1
            }
            _ => 1,
        };
        let pos = self.pos();
        let value = match self.peek() {
            Token::Num(v) => *v,
            Token::End => return Err(self.unexpected("an integer exponent")),
            _ => {
                return Err(ParseError {
                    kind: ParseErrorKind::NonIntegerExponent,
                    pos,
                })
            }
        };
        if value.fract() != 0.0 || value > 64.0 {
            return Err(ParseError {
                kind: ParseErrorKind::NonIntegerExponent,
                pos,
            });
        }
        self.bump();
        let mut k = value as i32;
        if *self.peek() == Token::Caret {
            self.bump();
            let inner = self.exponent()?;
            let folded = (k as f64).powi(inner);
            if folded.fract() != 0.0 || folded.abs() > 64.0 {
                return Err(ParseError {
                    kind: ParseErrorKind::NonIntegerExponent,
                    pos,
                });
            }
            k = folded as i32;
        }
        Ok(sign * k)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (tok, pos) = match self.peek() {
            Token::Num(_) | Token::Ident(_) | Token::LParen => self.bump(),
            _ => return Err(self.unexpected("a number, identifier or `(`")),
        };
        match tok {
            Token::Num(v) => Ok(Expr::Num(v)),
            Token::LParen => {
                let e = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(e)
            }
            Token::Ident(name) => {
                if *self.peek() == Token::LParen {
                    self.call(&name, pos)
                } else {
                    self.variable(&name, pos)
                }
            }
            _ => unreachable!("filtered above"),
        }
    }

    fn call(&mut self, name: &str, pos: usize) -> Result<Expr, ParseError> {
        self.bump(); // (
        let func = match name {
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "pow" => {
                let base = self.expr()?;
                self.expect(Token::Comma, "`,` in pow(base, integer)")?;
                let exp = self.exponent()?;
                self.expect(Token::RParen, "`)`")?;
                return Ok(Expr::Pow {
                    base: Box::new(base),
                    exp,
                    span: Span(pos),
                });
            }
            _ => {
                return Err(ParseError {
                    kind: ParseErrorKind::UnknownFunction(name.to_string()),
                    pos,
                })
            }
        };
        let arg = self.expr()?;
        self.expect(Token::RParen, "`)`")?;
        Ok(Expr::Call {
            func,
            arg: Box::new(arg),
            span: Span(pos),
        })
    }

    fn variable(&mut self, name: &str, pos: usize) -> Result<Expr, ParseError> {
        let unknown = || ParseError {
            kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
            pos,
        };
        let (kind, digits) = match name.split_at(1) {
            ("x", rest) => (VarKind::Base, rest),
            ("y", rest) => (VarKind::Fibre, rest),
            _ => return Err(unknown()),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0')
        {
            return Err(unknown());
        }
        let index: usize = digits.parse().map_err(|_| unknown())?;
        if index > self.dim {
            return Err(ParseError {
                kind: ParseErrorKind::IndexOutOfRange {
                    name: name.to_string(),
                    dim: self.dim,
                },
                pos,
            });
        }
        if kind == VarKind::Fibre && !self.allow_fibre {
            return Err(ParseError {
                kind: ParseErrorKind::FibreVariable(name.to_string()),
                pos,
            });
        }
        Ok(Expr::Var(Var { kind, index }))
    }
}
