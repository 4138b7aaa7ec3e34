//! A tiny arithmetic expression grammar for checking user-supplied maps and
//! moduli from the command line without recompiling:
//!
//! ```text
//! expr  := "if" sum "<=" sum "<=" sum "then" expr "else" expr | sum
//! sum   := term (("+" | "-") term)*
//! term  := unary (("*" | "/") unary)*
//! unary := "-" unary | atom
//! atom  := NUMBER | "y" | "t" | "(" expr ")"
//! ```
//!
//! `y` and `t` both name the single free variable.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected token {0:?}")]
    UnexpectedToken(String),
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("trailing input after expression: {0:?}")]
    TrailingInput(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    If {
        lo: Box<Expr>,
        mid: Box<Expr>,
        hi: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
}

impl Expr {
    pub fn eval(&self, v: f64) -> f64 {
        match self {
            Expr::Num(x) => *x,
            Expr::Var => v,
            Expr::Add(a, b) => a.eval(v) + b.eval(v),
            Expr::Sub(a, b) => a.eval(v) - b.eval(v),
            Expr::Mul(a, b) => a.eval(v) * b.eval(v),
            Expr::Div(a, b) => a.eval(v) / b.eval(v),
            Expr::Neg(a) => -a.eval(v),
            Expr::If {
                lo,
                mid,
                hi,
                then,
                otherwise,
            } => {
                let m = mid.eval(v);
                if lo.eval(v) <= m && m <= hi.eval(v) {
                    then.eval(v)
                } else {
                    otherwise.eval(v)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Var,
    If,
    Then,
    Else,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Le,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ExprError> {
    let mut tokens = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&ch) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '+' => {
                chars.next();
                tokens.push(Token::Plus);
            }
            '-' => {
                chars.next();
                tokens.push(Token::Minus);
            }
            '*' => {
                chars.next();
                tokens.push(Token::Star);
            }
            '/' => {
                chars.next();
                tokens.push(Token::Slash);
            }
            '(' => {
                chars.next();
                tokens.push(Token::LParen);
            }
            ')' => {
                chars.next();
                tokens.push(Token::RParen);
            }
            '<' => {
                chars.next();
                if chars.next_if_eq(&'=').is_none() {
                    return Err(ExprError::UnexpectedChar('<'));
                }
                tokens.push(Token::Le);
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut text = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' {
                        text.push(d);
                        chars.next();
                        // allow a sign right after an exponent marker
                        if (d == 'e' || d == 'E') && matches!(chars.peek(), Some('+') | Some('-')) {
                            text.push(chars.next().unwrap());
                        }
                    } else {
                        break;
                    }
                }
                let value: f64 = text
                    .parse()
                    .map_err(|_| ExprError::UnexpectedToken(text.clone()))?;
                tokens.push(Token::Num(value));
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        word.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                match word.as_str() {
                    "if" => tokens.push(Token::If),
                    "then" => tokens.push(Token::Then),
                    "else" => tokens.push(Token::Else),
                    "y" | "t" => tokens.push(Token::Var),
                    _ => return Err(ExprError::UnexpectedToken(word)),
                }
            }
            other => return Err(ExprError::UnexpectedChar(other)),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<Token, ExprError> {
        let t = self.tokens.get(self.pos).cloned().ok_or(ExprError::UnexpectedEnd)?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: Token) -> Result<(), ExprError> {
        let got = self.next()?;
        if got == want {
            Ok(())
        } else {
            Err(ExprError::UnexpectedToken(format!("{got:?}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(&Token::If) {
            self.next()?;
            let lo = self.sum()?;
            self.expect(Token::Le)?;
            let mid = self.sum()?;
            self.expect(Token::Le)?;
            let hi = self.sum()?;
            self.expect(Token::Then)?;
            let then = self.expr()?;
            self.expect(Token::Else)?;
            let otherwise = self.expr()?;
            return Ok(Expr::If {
                lo: Box::new(lo),
                mid: Box::new(mid),
                hi: Box::new(hi),
                then: Box::new(then),
                otherwise: Box::new(otherwise),
            });
        }
        self.sum()
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.next()?;
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.next()?;
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.next()?;
                    acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.next()?;
                    acc = Expr::Div(Box::new(acc), Box::new(self.unary()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(&Token::Minus) {
            self.next()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.next()? {
            Token::Num(x) => Ok(Expr::Num(x)),
            Token::Var => Ok(Expr::Var),
            Token::LParen => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            other => Err(ExprError::UnexpectedToken(format!("{other:?}"))),
        }
    }
}

/// Parses an expression in the grammar above.
pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let tokens = tokenize(src)?;
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(ExprError::TrailingInput(format!(
            "{:?}",
            &parser.tokens[parser.pos..]
        )));
    }
    Ok(expr)
}
