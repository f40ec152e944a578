//! Pulse-program text format.
//!
//! One item per line:
//!
//! ```text
//! % comment, kept verbatim
//! R(pi/2, -pi/2, all)
//! MS(J Delta_t, 0, all)
//! Z((2m+2J)Delta_t, 1)
//! HidingB(0.04pi, 0.65pi, 2)!
//! ```
//!
//! Pulses are `NAME(theta, phi, target)`; `Z` takes no phase. A trailing
//! `!` marks a crosstalk-correction pulse. Angles are arithmetic
//! expressions over numbers, `pi` and free symbols such as `m`, `J`, `w`
//! and `Delta_t`; a number or closing parenthesis directly followed by a
//! symbol or opening parenthesis multiplies (`0.07pi`, `(2m+J)Delta_t`,
//! `J Delta_t`). Blank lines are ignored.

use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::angle::{Angle, STEP_SYMBOL};
use crate::{Error, Result};

/// Parameter values for the free symbols of angle expressions.
pub type Bindings = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    /// `pi`.
    Pi,
    Symbol(String),
    Neg(Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Op(char),
    Open,
    Close,
}

fn tokenize(text: &str) -> core::result::Result<Vec<Token>, String> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() || c == '.' {
            let mut end = start;
            while let Some(&(i, d)) = chars.peek() {
                if d.is_ascii_digit() || d == '.' {
                    end = i + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let lit = &text[start..end];
            let value = lit
                .parse::<f64>()
                .map_err(|_| alloc::format!("bad number {lit:?}"))?;
            tokens.push(Token::Number(value));
        } else if c.is_alphabetic() || c == '_' {
            let mut end = start;
            while let Some(&(i, d)) = chars.peek() {
                if d.is_alphanumeric() || d == '_' {
                    end = i + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            tokens.push(Token::Ident(text[start..end].to_string()));
        } else {
            chars.next();
            tokens.push(match c {
                '+' | '-' | '*' | '/' => Token::Op(c),
                '(' => Token::Open,
                ')' => Token::Close,
                other => return Err(alloc::format!("unexpected character {other:?}")),
            });
        }
    }
    Ok(tokens)
}

struct ExprParser {
    tokens: Vec<Token>,
    pos: usize,
}

impl ExprParser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> core::result::Result<Expr, String> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinaryOp::Add } else { BinaryOp::Sub };
            self.pos += 1;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> core::result::Result<Expr, String> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Op('*')) => {
                    self.pos += 1;
                    BinaryOp::Mul
                }
                Some(Token::Op('/')) => {
                    self.pos += 1;
                    BinaryOp::Div
                }
                // Juxtaposition: `2m`, `(2m+J)Delta_t`, `J Delta_t`.
                Some(Token::Ident(_)) | Some(Token::Open) => BinaryOp::Mul,
                _ => return Ok(lhs),
            };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> core::result::Result<Expr, String> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> core::result::Result<Expr, String> {
        match self.next() {
            Some(Token::Number(x)) => Ok(Expr::Number(x)),
            Some(Token::Ident(name)) => Ok(match name.as_str() {
                "pi" | "π" => Expr::Pi,
                "Δt" => Expr::Symbol(STEP_SYMBOL.to_string()),
                _ => Expr::Symbol(name),
            }),
            Some(Token::Open) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token::Close) => Ok(inner),
                    _ => Err("missing closing parenthesis".into()),
                }
            }
            Some(t) => Err(alloc::format!("unexpected {t:?}")),
            None => Err("unexpected end of expression".into()),
        }
    }
}

impl Expr {
    pub fn parse(text: &str) -> core::result::Result<Expr, String> {
        let mut p = ExprParser {
            tokens: tokenize(text)?,
            pos: 0,
        };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(alloc::format!("trailing input in {text:?}"));
        }
        Ok(e)
    }

    pub fn eval(&self, bindings: &Bindings) -> Result<f64> {
        Ok(match self {
            Expr::Number(x) => *x,
            Expr::Pi => PI,
            Expr::Symbol(s) => *bindings
                .get(s)
                .ok_or_else(|| Error::UnboundSymbol(s.clone()))?,
            Expr::Neg(e) => -e.eval(bindings)?,
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(bindings)?, b.eval(bindings)?);
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => a / b,
                }
            }
        })
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Symbol(s) => {
                out.insert(s.clone());
            }
            Expr::Neg(e) => e.collect_symbols(out),
            Expr::Binary(_, a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Expr::Number(_) | Expr::Pi => {}
        }
    }
}

/// An angle argument: its source text, kept for printing, and the parsed
/// expression.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleExpr {
    text: String,
    expr: Expr,
}

impl AngleExpr {
    pub fn parse(text: &str) -> core::result::Result<Self, String> {
        let text = text.trim();
        Ok(Self {
            expr: Expr::parse(text)?,
            text: text.to_string(),
        })
    }

    /// Prints a gate angle, symbolically when it carries a symbol and
    /// `symbolic` is set.
    pub fn from_angle(angle: &Angle, symbolic: bool) -> Self {
        let text = match angle.symbol {
            Some(s) if symbolic => s.to_string(),
            _ => super::angle::format_radians(angle.radians),
        };
        Self::parse(&text).expect("printed angles parse")
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn eval(&self, bindings: &Bindings) -> Result<f64> {
        self.expr.eval(bindings)
    }
}

impl fmt::Display for AngleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PulseName {
    R,
    MS,
    Z,
    HidingA,
    HidingB,
    HidingC,
}

impl PulseName {
    pub fn as_str(self) -> &'static str {
        match self {
            PulseName::R => "R",
            PulseName::MS => "MS",
            PulseName::Z => "Z",
            PulseName::HidingA => "HidingA",
            PulseName::HidingB => "HidingB",
            PulseName::HidingC => "HidingC",
        }
    }

    pub fn is_hiding(self) -> bool {
        matches!(self, PulseName::HidingA | PulseName::HidingB | PulseName::HidingC)
    }
}

impl FromStr for PulseName {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        Ok(match s {
            "R" => PulseName::R,
            "MS" => PulseName::MS,
            "Z" => PulseName::Z,
            "HidingA" => PulseName::HidingA,
            "HidingB" => PulseName::HidingB,
            "HidingC" => PulseName::HidingC,
            other => return Err(alloc::format!("unknown pulse {other:?}")),
        })
    }
}

impl fmt::Display for PulseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    All,
    Site(usize),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::All => f.write_str("all"),
            Target::Site(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    pub name: PulseName,
    pub theta: AngleExpr,
    /// Absent for `Z`.
    pub phi: Option<AngleExpr>,
    pub target: Target,
    pub crosstalk: bool,
    /// 1-based source line, 0 for generated pulses.
    pub line: usize,
}

impl fmt::Display for Pulse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}", self.name, self.theta)?;
        if let Some(phi) = &self.phi {
            write!(f, ", {phi}")?;
        }
        write!(f, ", {})", self.target)?;
        if self.crosstalk {
            f.write_str("!")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    /// A `%` line, stored with its leading `%`.
    Comment(String),
    Pulse(Pulse),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseProgram {
    pub n_sites: usize,
    pub items: Vec<Item>,
}

impl PulseProgram {
    pub fn new(n_sites: usize) -> Self {
        Self {
            n_sites,
            items: Vec::new(),
        }
    }

    pub fn pulses(&self) -> impl Iterator<Item = &Pulse> {
        self.items.iter().filter_map(|i| match i {
            Item::Pulse(p) => Some(p),
            Item::Comment(_) => None,
        })
    }

    pub fn pulse_count(&self) -> usize {
        self.pulses().count()
    }

    pub fn crosstalk_count(&self) -> usize {
        self.pulses().filter(|p| p.crosstalk).count()
    }

    pub fn comments(&self) -> impl Iterator<Item = &str> {
        self.items.iter().filter_map(|i| match i {
            Item::Comment(c) => Some(c.as_str()),
            Item::Pulse(_) => None,
        })
    }

    /// Free symbols used by any angle.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for p in self.pulses() {
            out.extend(p.theta.expr().symbols());
            if let Some(phi) = &p.phi {
                out.extend(phi.expr().symbols());
            }
        }
        out
    }
}

fn split_args(args: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in args.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(args[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(args[start..].trim());
    out
}

fn parse_pulse(line: &str, line_no: usize, n_sites: usize) -> core::result::Result<Pulse, String> {
    let (body, crosstalk) = match line.strip_suffix('!') {
        Some(b) => (b.trim_end(), true),
        None => (line, false),
    };
    let open = body.find('(').ok_or("expected NAME(arguments)")?;
    let inner = body[open + 1..]
        .strip_suffix(')')
        .ok_or("missing closing parenthesis")?;
    let name: PulseName = body[..open].trim().parse()?;
    let args = split_args(inner);
    let arity = if name == PulseName::Z { 2 } else { 3 };
    if args.len() != arity {
        return Err(alloc::format!(
            "{name} takes {arity} arguments, found {}",
            args.len()
        ));
    }
    let target = match args[arity - 1] {
        "all" => Target::All,
        t => {
            let site: usize = t.parse().map_err(|_| alloc::format!("bad target {t:?}"))?;
            if site == 0 || site > n_sites {
                return Err(alloc::format!("target {site} outside 1..={n_sites}"));
            }
            Target::Site(site)
        }
    };
    match (name, target) {
        (PulseName::MS, Target::Site(_)) => return Err("MS acts on all unhidden ions".into()),
        (PulseName::Z | PulseName::HidingA | PulseName::HidingB | PulseName::HidingC, Target::All) => {
            return Err(alloc::format!("{name} needs an addressed target"))
        }
        _ => {}
    }
    let theta = AngleExpr::parse(args[0])?;
    let phi = if arity == 3 {
        Some(AngleExpr::parse(args[1])?)
    } else {
        None
    };
    Ok(Pulse {
        name,
        theta,
        phi,
        target,
        crosstalk,
        line: line_no,
    })
}

/// Parses a pulse program for `n_sites` ions.
pub fn parse_pulse_program(text: &str, n_sites: usize) -> Result<PulseProgram> {
    let mut program = PulseProgram::new(n_sites);
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('%') {
            program.items.push(Item::Comment(line.to_string()));
            continue;
        }
        let pulse = parse_pulse(line, k + 1, n_sites).map_err(|message| Error::Parse {
            line: k + 1,
            message,
        })?;
        program.items.push(Item::Pulse(pulse));
    }
    Ok(program)
}

/// Prints one item per line.
pub fn format_pulse_program(program: &PulseProgram) -> String {
    let mut out = String::new();
    for item in &program.items {
        match item {
            Item::Comment(c) => out.push_str(c),
            Item::Pulse(p) => out.push_str(&p.to_string()),
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bind(pairs: &[(&str, f64)]) -> Bindings {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn expressions() {
        let b = bind(&[("m", 0.5), ("J", 1.0), ("Delta_t", 0.2)]);
        let eval = |s: &str| Expr::parse(s).unwrap().eval(&b).unwrap();
        assert!((eval("0.07pi") - 0.07 * PI).abs() < 1e-15);
        assert!((eval("-pi/2") + PI / 2.0).abs() < 1e-15);
        assert!((eval("(2m+2J)Delta_t") - 0.6).abs() < 1e-15);
        assert!((eval("J Delta_t") - 0.2).abs() < 1e-15);
        assert!((eval("(2m+J)Δt") - 0.4).abs() < 1e-15);
        assert!((eval("2*3 - 4/2") - 4.0).abs() < 1e-15);
        assert!(matches!(
            Expr::parse("x").unwrap().eval(&b),
            Err(Error::UnboundSymbol(s)) if s == "x"
        ));
        assert!(Expr::parse("(1").is_err());
        assert!(Expr::parse("1 2").is_err());
        assert!(Expr::parse("").is_err());
    }

    #[test]
    fn empty_text_gives_empty_program() {
        let p = parse_pulse_program("", 4).unwrap();
        assert!(p.items.is_empty());
    }

    #[test]
    fn target_out_of_range_cites_line() {
        assert_eq!(
            parse_pulse_program("R(pi, 0, 5)", 4),
            Err(Error::Parse {
                line: 1,
                message: "target 5 outside 1..=4".into()
            })
        );
    }

    #[test]
    fn other_parse_errors() {
        for bad in ["Q(pi, 0, 1)", "R(pi, 1)", "Z(pi, 0, 1)", "MS(pi, 0, 2)", "Z(pi, all)", "R(pi, 0, 1"] {
            let text = alloc::format!("% header\n\n{bad}");
            match parse_pulse_program(&text, 4) {
                Err(Error::Parse { line: 3, .. }) => {}
                other => panic!("{bad}: {other:?}"),
            }
        }
    }

    #[test]
    fn round_trip_keeps_text() {
        let text = "% PREP\nR(pi, 0, 1)\nR(0.07pi, 0.65pi, 2)!\nZ((2m+2J)Delta_t, 1)\nMS(Delta_t, pi/2, all)\n";
        let p = parse_pulse_program(text, 4).unwrap();
        assert_eq!(p.pulse_count(), 4);
        assert_eq!(p.crosstalk_count(), 1);
        assert_eq!(format_pulse_program(&p), text);
        assert_eq!(
            p.symbols().into_iter().collect::<Vec<_>>(),
            ["Delta_t", "J", "m"]
        );
    }
}
