//! A small integer expression language for coloring rules.
//!
//! ```text
//! expr    := or
//! or      := and (("or" | "||") and)*
//! and     := not (("and" | "&&") not)*
//! not     := ("not" | "!") not | cmp
//! cmp     := sum (("==" | "!=" | "<" | "<=" | ">" | ">=") sum)?
//! sum     := product (("+" | "-") product)*
//! product := unary (("*" | "/" | "%") unary)*
//! unary   := "-" unary | atom
//! atom    := INT | "n" | "(" expr ")" | "ilog2(" expr ")" | "ipow(" expr "," expr ")"
//!          | "if(" expr "," expr "," expr ")"
//! ```
//!
//! Values are `i128`; booleans are 0/1 and any non-zero value is true.
//! `/` and `%` truncate toward zero. The color of `n` is the value of the
//! expression reduced into `[0, k)`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Expr {
    Lit(i128),
    Var,
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Ilog2(Box<Expr>),
    Ipow(Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i128),
    Ident(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(v) => write!(f, "{v}"),
            Tok::Ident(s) => write!(f, "{s:?}"),
            Tok::Sym(s) => write!(f, "{s:?}"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const SYMBOLS: [&str; 19] = [
    "==", "!=", "<=", ">=", "&&", "||", "<", ">", "+", "-", "*", "/", "%", "(", ")", ",", "!", "=", "^",
];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse::<i128>().map_err(|_| Error::Syntax {
                pos: start,
                message: format!("integer literal {text} is too large"),
            })?;
            out.push((Tok::Int(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let sym = SYMBOLS
                .iter()
                .find(|s| rest.starts_with(*s))
                .ok_or_else(|| Error::Syntax {
                    pos: i,
                    message: format!("unexpected character {c:?}"),
                })?;
            if *sym == "=" || *sym == "^" {
                return Err(Error::Syntax {
                    pos: i,
                    message: format!("operator {sym:?} is not supported (use == or ipow)"),
                });
            }
            out.push((Tok::Sym(sym), i));
            i += sym.len();
        }
    }
    out.push((Tok::Eof, chars.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.is_sym(s) {
            self.bump();
            Ok(())
        } else {
            let found = self.peek().to_string();
            self.error(format!("expected {s:?}, found {found}"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.and()?;
        while self.is_word("or") || self.is_sym("||") {
            self.bump();
            lhs = Expr::Bin(BinOp::Or, Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr> {
        let mut lhs = self.not()?;
        while self.is_word("and") || self.is_sym("&&") {
            self.bump();
            lhs = Expr::Bin(BinOp::And, Box::new(lhs), Box::new(self.not()?));
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Expr> {
        if self.is_word("not") || self.is_sym("!") {
            self.bump();
            return Ok(Expr::Not(Box::new(self.not()?)));
        }
        self.cmp()
    }

    fn cmp(&mut self) -> Result<Expr> {
        let lhs = self.sum()?;
        let op = match self.peek() {
            Tok::Sym("==") => BinOp::Eq,
            Tok::Sym("!=") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        Ok(Expr::Bin(op, Box::new(lhs), Box::new(self.sum()?)))
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => BinOp::Add,
                Tok::Sym("-") => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("*") => BinOp::Mul,
                Tok::Sym("/") => BinOp::Div,
                Tok::Sym("%") => BinOp::Rem,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.is_sym("-") {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn args(&mut self, name: &str, count: usize) -> Result<Vec<Expr>> {
        self.expect_sym("(")?;
        let mut args = vec![self.expr()?];
        while self.is_sym(",") {
            self.bump();
            args.push(self.expr()?);
        }
        if args.len() != count {
            return self.error(format!("{name} takes {count} argument(s), got {}", args.len()));
        }
        self.expect_sym(")")?;
        Ok(args)
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(v) => Ok(Expr::Lit(v)),
            Tok::Sym("(") => {
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "n" => Ok(Expr::Var),
                "ilog2" => {
                    let mut a = self.args("ilog2", 1)?;
                    Ok(Expr::Ilog2(Box::new(a.remove(0))))
                }
                "ipow" => {
                    let mut a = self.args("ipow", 2)?;
                    let exp = a.remove(1);
                    Ok(Expr::Ipow(Box::new(a.remove(0)), Box::new(exp)))
                }
                "if" => {
                    let mut a = self.args("if", 3)?;
                    let no = a.remove(2);
                    let yes = a.remove(1);
                    Ok(Expr::If(Box::new(a.remove(0)), Box::new(yes), Box::new(no)))
                }
                other => Err(Error::Syntax {
                    pos,
                    message: format!("unknown identifier {other:?}"),
                }),
            },
            Tok::Eof => Err(Error::Syntax {
                pos,
                message: "expected an operand, found end of input".into(),
            }),
            t => Err(Error::Syntax {
                pos,
                message: format!("expected an operand, found {t}"),
            }),
        }
    }
}

fn overflow() -> String {
    "arithmetic overflow".to_string()
}

fn eval(e: &Expr, n: i128) -> std::result::Result<i128, String> {
    Ok(match e {
        Expr::Lit(v) => *v,
        Expr::Var => n,
        Expr::Neg(a) => eval(a, n)?.checked_neg().ok_or_else(overflow)?,
        Expr::Not(a) => (eval(a, n)? == 0) as i128,
        Expr::Ilog2(a) => {
            let x = eval(a, n)?;
            if x < 1 {
                return Err(format!("ilog2({x}) is undefined"));
            }
            x.ilog2() as i128
        }
        Expr::Ipow(a, b) => {
            let base = eval(a, n)?;
            let exp = eval(b, n)?;
            if exp < 0 {
                return Err(format!("ipow with negative exponent {exp}"));
            }
            let exp = u32::try_from(exp).map_err(|_| overflow())?;
            base.checked_pow(exp).ok_or_else(overflow)?
        }
        Expr::If(c, yes, no) => {
            if eval(c, n)? != 0 {
                eval(yes, n)?
            } else {
                eval(no, n)?
            }
        }
        Expr::Bin(BinOp::And, a, b) => (eval(a, n)? != 0 && eval(b, n)? != 0) as i128,
        Expr::Bin(BinOp::Or, a, b) => (eval(a, n)? != 0 || eval(b, n)? != 0) as i128,
        Expr::Bin(op, a, b) => {
            let x = eval(a, n)?;
            let y = eval(b, n)?;
            match op {
                BinOp::Add => x.checked_add(y).ok_or_else(overflow)?,
                BinOp::Sub => x.checked_sub(y).ok_or_else(overflow)?,
                BinOp::Mul => x.checked_mul(y).ok_or_else(overflow)?,
                BinOp::Div | BinOp::Rem if y == 0 => return Err("division by zero".into()),
                BinOp::Div => x.checked_div(y).ok_or_else(overflow)?,
                BinOp::Rem => x.checked_rem(y).ok_or_else(overflow)?,
                BinOp::Eq => (x == y) as i128,
                BinOp::Ne => (x != y) as i128,
                BinOp::Lt => (x < y) as i128,
                BinOp::Le => (x <= y) as i128,
                BinOp::Gt => (x > y) as i128,
                BinOp::Ge => (x >= y) as i128,
                BinOp::And | BinOp::Or => unreachable!("handled above"),
            }
        }
    })
}

/// A parsed rule assigning each natural one of `k` cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorRule {
    source: String,
    k: usize,
    expr: Expr,
}

impl ColorRule {
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Raw value of the expression at `n`.
    pub fn value_at(&self, n: i128) -> Result<i128> {
        eval(&self.expr, n).map_err(|message| Error::Eval {
            n: n.to_string(),
            message,
        })
    }

    /// Cell of `n`, in `[0, k)`.
    pub fn color_of(&self, n: i128) -> Result<usize> {
        Ok(self.value_at(n)?.rem_euclid(self.k as i128) as usize)
    }
}

pub fn parse_rule(source: &str, k: usize) -> Result<ColorRule> {
    if k < 1 {
        return Err(Error::domain("a rule needs at least one cell"));
    }
    let mut p = Parser {
        toks: lex(source)?,
        at: 0,
    };
    let expr = p.expr()?;
    if *p.peek() != Tok::Eof {
        let found = p.peek().to_string();
        return p.error(format!("unexpected {found} after expression"));
    }
    Ok(ColorRule {
        source: source.to_string(),
        k,
        expr,
    })
}
