//! The sequence expression language.
//!
//! ```text
//! sequence := expr | '(' expr (',' expr)+ ')'
//! expr     := term (('+'|'-') term)*
//! term     := factor (('*'|'/') factor)*
//! factor   := base ('^' base)?
//! base     := number | variable | func '(' expr ')' | '(' expr ')' | '-' base
//! func     := log | sqrt | sin | cos | alt | harm
//! ```
//!
//! Expressions compile to a small postfix program evaluated in double
//! precision. A tuple literal at the top level yields a vector-valued
//! sequence.

use std::sync::OnceLock;

use smallvec::SmallVec;

use crate::{EvalFailure, SyntaxError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Func {
    Log,
    Sqrt,
    Sin,
    Cos,
    Alt,
    Harm,
}

impl Func {
    const ALL: [(&'static str, Func); 6] = [
        ("log", Func::Log),
        ("sqrt", Func::Sqrt),
        ("sin", Func::Sin),
        ("cos", Func::Cos),
        ("alt", Func::Alt),
        ("harm", Func::Harm),
    ];

    fn lookup(name: &str) -> Option<Func> {
        Self::ALL.iter().find(|(n, _)| *n == name).map(|&(_, f)| f)
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Log => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Alt => alternating(x),
            Func::Harm => harmonic_number(x),
        }
    }
}

/// `(-1)^floor(k)`.
pub fn alternating(k: f64) -> f64 {
    if k.floor().rem_euclid(2.0) == 0.0 {
        1.0
    } else {
        -1.0
    }
}

const HARMONIC_TABLE_LEN: usize = 1 << 16;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn harmonic_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(HARMONIC_TABLE_LEN + 1);
        let mut acc = 0.0;
        table.push(acc);
        for i in 1..=HARMONIC_TABLE_LEN {
            acc += 1.0 / i as f64;
            table.push(acc);
        }
        table
    })
}

/// `H_k = sum_{i=1}^{floor(k)} 1/i`, zero for `k < 1`.
///
/// Exact ascending sums up to `2^16`; beyond that the asymptotic expansion,
/// whose first omitted term is below `1e-28` there.
pub fn harmonic_number(k: f64) -> f64 {
    if k.is_nan() {
        return f64::NAN;
    }
    let k = k.floor();
    if k < 1.0 {
        return 0.0;
    }
    if k <= HARMONIC_TABLE_LEN as f64 {
        return harmonic_table()[k as usize];
    }
    let inv = 1.0 / k;
    let inv2 = inv * inv;
    k.ln() + EULER_GAMMA + 0.5 * inv - inv2 / 12.0 + inv2 * inv2 / 120.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Const(f64),
    Var(u8),
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Call(Func),
}

#[derive(Debug, Clone, PartialEq)]
struct Program {
    ops: Vec<Op>,
}

impl Program {
    fn eval(&self, vars: &[f64]) -> Result<f64, EvalFailure> {
        let mut stack: SmallVec<[f64; 16]> = SmallVec::new();
        for op in &self.ops {
            match *op {
                Op::Const(c) => stack.push(c),
                Op::Var(i) => stack.push(vars[i as usize]),
                Op::Neg => {
                    let a = stack.pop().unwrap();
                    stack.push(-a);
                }
                Op::Call(f) => {
                    let a = stack.pop().unwrap();
                    stack.push(f.apply(a));
                }
                bin => {
                    let b = stack.pop().unwrap();
                    let a = stack.pop().unwrap();
                    let v = match bin {
                        Op::Add => a + b,
                        Op::Sub => a - b,
                        Op::Mul => a * b,
                        Op::Div => {
                            if b == 0.0 {
                                return Err(EvalFailure::DivisionByZero);
                            }
                            a / b
                        }
                        Op::Pow => a.powf(b),
                        _ => unreachable!(),
                    };
                    stack.push(v);
                }
            }
        }
        let v = stack.pop().unwrap();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalFailure::NonFinite)
        }
    }
}

/// A compiled expression over a fixed list of variables.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledExpr {
    text: String,
    variables: Vec<String>,
    components: Vec<Program>,
}

impl CompiledExpr {
    pub fn text(&self) -> &str {
        &self.text
    }

    /// Output dimension (number of tuple components).
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    /// Evaluates every component at `vars` (in declaration order).
    pub fn eval_into(&self, vars: &[f64], out: &mut [f64]) -> Result<(), EvalFailure> {
        for (slot, prog) in out.iter_mut().zip(&self.components) {
            *slot = prog.eval(vars)?;
        }
        Ok(())
    }

    /// Scalar shortcut; evaluates the first component.
    pub fn eval_scalar(&self, vars: &[f64]) -> Result<f64, EvalFailure> {
        self.components[0].eval(vars)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    column: usize,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of input".to_string(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lit: String = chars[start..i].iter().collect();
            let value = lit.parse::<f64>().map_err(|_| SyntaxError {
                column,
                message: format!("malformed number `{lit}`"),
                expected: vec!["number".into()],
            })?;
            out.push(Token { tok: Tok::Num(value), column });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), column });
        } else if "+-*/^(),".contains(c) {
            out.push(Token { tok: Tok::Sym(c), column });
            i += 1;
        } else {
            return Err(SyntaxError {
                column,
                message: format!("unexpected character `{c}`"),
                expected: vec!["operator".into(), "operand".into()],
            });
        }
    }
    out.push(Token { tok: Tok::End, column: chars.len() + 1 });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    variables: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn operand_expected(&self) -> Vec<String> {
        let mut v = vec!["number".to_string()];
        v.extend(self.variables.iter().map(|s| s.to_string()));
        v.push("function".into());
        v.push("`(`".into());
        v.push("`-`".into());
        v
    }

    fn error(&self, expected: Vec<String>) -> SyntaxError {
        let t = self.peek();
        let message = if t.tok == Tok::End {
            "unexpected end of input".to_string()
        } else {
            format!("unexpected {}", describe(&t.tok))
        };
        SyntaxError { column: t.column, message, expected }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.is_sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(vec![format!("`{c}`")]))
        }
    }

    fn sequence(&mut self) -> Result<Vec<Program>, SyntaxError> {
        if self.is_sym('(') {
            let save = self.pos;
            self.bump();
            let mut first = Vec::new();
            self.expr(&mut first)?;
            if self.is_sym(',') {
                let mut comps = vec![Program { ops: first }];
                while self.is_sym(',') {
                    self.bump();
                    let mut ops = Vec::new();
                    self.expr(&mut ops)?;
                    comps.push(Program { ops });
                }
                self.expect_sym(')')?;
                self.expect_end(false)?;
                return Ok(comps);
            }
            self.pos = save;
        }
        let mut ops = Vec::new();
        self.expr(&mut ops)?;
        self.expect_end(true)?;
        Ok(vec![Program { ops }])
    }

    fn expect_end(&self, operators_allowed: bool) -> Result<(), SyntaxError> {
        if self.peek().tok == Tok::End {
            return Ok(());
        }
        let expected = if operators_allowed {
            ["`+`", "`-`", "`*`", "`/`", "`^`", "end of input"].map(String::from).to_vec()
        } else {
            vec!["end of input".to_string()]
        };
        Err(self.error(expected))
    }

    fn expr(&mut self, ops: &mut Vec<Op>) -> Result<(), SyntaxError> {
        self.term(ops)?;
        loop {
            let op = if self.is_sym('+') {
                Op::Add
            } else if self.is_sym('-') {
                Op::Sub
            } else {
                return Ok(());
            };
            self.bump();
            self.term(ops)?;
            ops.push(op);
        }
    }

    fn term(&mut self, ops: &mut Vec<Op>) -> Result<(), SyntaxError> {
        self.factor(ops)?;
        loop {
            let op = if self.is_sym('*') {
                Op::Mul
            } else if self.is_sym('/') {
                Op::Div
            } else {
                return Ok(());
            };
            self.bump();
            self.factor(ops)?;
            ops.push(op);
        }
    }

    fn factor(&mut self, ops: &mut Vec<Op>) -> Result<(), SyntaxError> {
        self.base(ops)?;
        if self.is_sym('^') {
            self.bump();
            self.base(ops)?;
            ops.push(Op::Pow);
        }
        Ok(())
    }

    fn base(&mut self, ops: &mut Vec<Op>) -> Result<(), SyntaxError> {
        let tok = self.peek().tok.clone();
        match tok {
            Tok::Num(v) => {
                self.bump();
                ops.push(Op::Const(v));
                Ok(())
            }
            Tok::Sym('-') => {
                self.bump();
                self.base(ops)?;
                ops.push(Op::Neg);
                Ok(())
            }
            Tok::Sym('(') => {
                self.bump();
                self.expr(ops)?;
                self.expect_sym(')')
            }
            Tok::Ident(name) => {
                if let Some(i) = self.variables.iter().position(|v| *v == name) {
                    self.bump();
                    ops.push(Op::Var(i as u8));
                    Ok(())
                } else if let Some(f) = Func::lookup(&name) {
                    self.bump();
                    self.expect_sym('(')?;
                    self.expr(ops)?;
                    self.expect_sym(')')?;
                    ops.push(Op::Call(f));
                    Ok(())
                } else {
                    let mut err = self.error(self.operand_expected());
                    err.message = format!("unknown identifier `{name}`");
                    Err(err)
                }
            }
            _ => Err(self.error(self.operand_expected())),
        }
    }
}

/// Compiles `text` over the given variable names.
pub fn compile(text: &str, variables: &[&str]) -> Result<CompiledExpr, SyntaxError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0, variables };
    let components = parser.sequence()?;
    Ok(CompiledExpr {
        text: text.to_string(),
        variables: variables.iter().map(|s| s.to_string()).collect(),
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(text: &str, m: f64, n: f64) -> f64 {
        compile(text, &["m", "n"]).unwrap().eval_scalar(&[m, n]).unwrap()
    }

    #[test]
    fn basic_values() {
        assert_eq!(eval("alt(m+n)", 2.0, 3.0), -1.0);
        assert_eq!(eval("1/(m+n+1)", 0.0, 0.0), 1.0);
        assert_eq!(eval("harm(m)+harm(n)", 2.0, 1.0), 2.5);
        assert_eq!(eval("2^3", 0.0, 0.0), 8.0);
        assert_eq!(eval("-2^2", 0.0, 0.0), 4.0);
        assert_eq!(eval("1 - 2 - 3", 0.0, 0.0), -4.0);
        assert_eq!(eval("8/4/2", 0.0, 0.0), 1.0);
        assert_eq!(eval("1.5e1 + .5", 0.0, 0.0), 15.5);
        assert_eq!(eval("sqrt(m)*sqrt(m)", 4.0, 0.0), 4.0);
        assert_eq!(eval("cos(0) + sin(0) + log(1)", 0.0, 0.0), 1.0);
    }

    #[test]
    fn tuples() {
        let e = compile("(m, n, m*n)", &["m", "n"]).unwrap();
        assert_eq!(e.dim(), 3);
        let mut out = [0.0; 3];
        e.eval_into(&[2.0, 5.0], &mut out).unwrap();
        assert_eq!(out, [2.0, 5.0, 10.0]);
        assert_eq!(compile("(m+n)*2", &["m", "n"]).unwrap().dim(), 1);
    }

    #[test]
    fn syntax_errors_carry_columns() {
        let err = compile("alt(m+", &["m", "n"]).unwrap_err();
        assert_eq!(err.column, 7);
        assert!(err.expected.iter().any(|e| e == "number"));
        assert_eq!(compile("m + * n", &["m", "n"]).unwrap_err().column, 5);
        assert_eq!(compile("foo(m)", &["m", "n"]).unwrap_err().column, 1);
        assert_eq!(compile("m $ n", &["m", "n"]).unwrap_err().column, 3);
        assert_eq!(compile("2^3^2", &["m", "n"]).unwrap_err().column, 4);
        assert_eq!(compile("(m, n", &["m", "n"]).unwrap_err().column, 6);
        assert!(compile("j + 1", &["m", "n"]).is_err());
        assert!(compile("j + 1", &["j"]).is_ok());
    }

    #[test]
    fn evaluation_failures() {
        let e = compile("1/(m-n)", &["m", "n"]).unwrap();
        assert_eq!(e.eval_scalar(&[3.0, 3.0]), Err(EvalFailure::DivisionByZero));
        let e = compile("log(m)", &["m", "n"]).unwrap();
        assert_eq!(e.eval_scalar(&[0.0, 0.0]), Err(EvalFailure::NonFinite));
    }

    #[test]
    fn harmonic_numbers() {
        assert_eq!(harmonic_number(0.0), 0.0);
        assert_eq!(harmonic_number(-3.0), 0.0);
        assert_eq!(harmonic_number(1.0), 1.0);
        assert_eq!(harmonic_number(2.9), 1.5);
        // Table and asymptotic branches meet smoothly.
        let k = HARMONIC_TABLE_LEN as f64;
        let below = harmonic_number(k);
        let above = harmonic_number(k + 1.0);
        assert!(((above - below) - 1.0 / (k + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn alternating_sign() {
        assert_eq!(alternating(0.0), 1.0);
        assert_eq!(alternating(5.0), -1.0);
        assert_eq!(alternating(-1.0), -1.0);
        assert_eq!(alternating(2.5), 1.0);
    }
}
