//! Recursive-descent parser for MiniC programs and invariant conditions.
//!
//! Grammar:
//! ```text
//! program := decl* stmt*
//! decl    := "int" "*"? ident ";"
//! stmt    := lval "=" "nondet" "(" ")" ";"
//!          | lval "=" exp ";"
//!          | "if" "(" cond ")" block ("else" block)?
//!          | "while" "(" cond ")" block
//!          | "assert" "(" cond ")" ";"
//! block   := "{" stmt* "}"
//! lval    := ident | "*" ident
//! exp     := term (("+" | "-") term)*
//! term    := factor ("*" factor)*
//! factor  := int | "-" factor | "&" ident | lval | "(" exp ")"
//! cond    := conj ("||" conj)*
//! conj    := atom ("&&" atom)*
//! atom    := exp cmp exp | "!" atom | "(" cond ")"
//! ```
//! `//` starts a line comment. Identifiers are ASCII `[A-Za-z_][A-Za-z0-9_]*`.

use crate::ast::*;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{pos}: {msg}")]
pub struct ParseError {
    pub pos: SourcePos,
    pub msg: String,
}

impl ParseError {
    fn new(pos: SourcePos, msg: impl Into<String>) -> Self {
        ParseError { pos, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Punct(&'static str),
    Eof,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(k) => write!(f, "integer `{k}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourcePos)>, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = SourcePos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '/' {
            let mut look = chars.clone();
            look.next();
            if look.peek() == Some(&'/') {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
                continue;
            }
            return Err(ParseError::new(pos, "unexpected character `/`"));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            toks.push((Tok::Ident(s), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    s.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            let k: i64 = s
                .parse()
                .map_err(|_| ParseError::new(pos, format!("integer literal `{s}` out of range")))?;
            toks.push((Tok::Int(k), pos));
            continue;
        }
        // multi-char punctuation first
        let two: String = chars.clone().take(2).collect();
        let p2 = match two.as_str() {
            "==" => Some("=="),
            "!=" => Some("!="),
            "<=" => Some("<="),
            ">=" => Some(">="),
            "&&" => Some("&&"),
            "||" => Some("||"),
            _ => None,
        };
        if let Some(p) = p2 {
            bump(&mut chars);
            bump(&mut chars);
            toks.push((Tok::Punct(p), pos));
            continue;
        }
        let p1 = match c {
            '=' => "=",
            '!' => "!",
            '<' => "<",
            '>' => ">",
            '&' => "&",
            '+' => "+",
            '-' => "-",
            '*' => "*",
            '(' => "(",
            ')' => ")",
            '{' => "{",
            '}' => "}",
            ';' => ";",
            _ => return Err(ParseError::new(pos, format!("unexpected character `{c}`"))),
        };
        bump(&mut chars);
        toks.push((Tok::Punct(p1), pos));
    }
    toks.push((Tok::Eof, SourcePos { line, col }));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, SourcePos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> SourcePos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, SourcePos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, p: &'static str) -> Result<(), ParseError> {
        if self.peek() == &Tok::Punct(p) {
            self.next();
            Ok(())
        } else {
            Err(ParseError::new(self.pos(), format!("expected `{p}`, found {}", self.peek())))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if let Tok::Ident(s) = self.peek() {
            if s == kw {
                self.next();
                return true;
            }
        }
        false
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.next() {
            (Tok::Ident(s), _) => Ok(s),
            (t, pos) => Err(ParseError::new(pos, format!("expected identifier, found {t}"))),
        }
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut decls = Vec::new();
        loop {
            let pos = self.pos();
            if !self.eat_keyword("int") {
                break;
            }
            let ty = if self.peek() == &Tok::Punct("*") {
                self.next();
                VarType::PtrInt
            } else {
                VarType::Int
            };
            let name = self.ident()?;
            if is_keyword(&name) {
                return Err(ParseError::new(pos, format!("`{name}` is a reserved word")));
            }
            self.eat(";")?;
            decls.push(Decl { name, ty, pos });
        }
        let mut body = Vec::new();
        while self.peek() != &Tok::Eof {
            body.push(self.stmt()?);
        }
        Ok(Program { decls, body })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.eat("{")?;
        let mut stmts = Vec::new();
        while self.peek() != &Tok::Punct("}") {
            if self.peek() == &Tok::Eof {
                return Err(ParseError::new(self.pos(), "unterminated block, expected `}`"));
            }
            stmts.push(self.stmt()?);
        }
        self.eat("}")?;
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let pos = self.pos();
        if let Tok::Ident(kw) = self.peek().clone() {
            match kw.as_str() {
                "if" => {
                    self.next();
                    self.eat("(")?;
                    let c = self.cond()?;
                    self.eat(")")?;
                    let then = self.block()?;
                    let els = if self.eat_keyword("else") { self.block()? } else { Vec::new() };
                    return Ok(Stmt::If(c, then, els, pos));
                }
                "while" => {
                    self.next();
                    self.eat("(")?;
                    let c = self.cond()?;
                    self.eat(")")?;
                    let body = self.block()?;
                    return Ok(Stmt::While(c, body, pos));
                }
                "assert" => {
                    self.next();
                    self.eat("(")?;
                    let c = self.cond()?;
                    self.eat(")")?;
                    self.eat(";")?;
                    return Ok(Stmt::Assert(c, pos));
                }
                "int" => {
                    return Err(ParseError::new(pos, "declarations must precede all statements"));
                }
                _ => {}
            }
        }
        let lv = self.lval()?;
        self.eat("=")?;
        if let Tok::Ident(name) = self.peek() {
            if name == "nondet" {
                self.next();
                self.eat("(")?;
                self.eat(")")?;
                self.eat(";")?;
                return Ok(Stmt::Nondet(lv, pos));
            }
        }
        let e = self.exp()?;
        self.eat(";")?;
        Ok(Stmt::Assign(lv, e, pos))
    }

    fn lval(&mut self) -> Result<Lval, ParseError> {
        if self.peek() == &Tok::Punct("*") {
            self.next();
            Ok(Lval::Deref(self.ident()?))
        } else {
            Ok(Lval::Var(self.ident()?))
        }
    }

    fn exp(&mut self) -> Result<Exp, ParseError> {
        let mut e = self.term()?;
        loop {
            match self.peek() {
                Tok::Punct("+") => {
                    self.next();
                    e = Exp::Bin(BinOp::Add, Box::new(e), Box::new(self.term()?));
                }
                Tok::Punct("-") => {
                    self.next();
                    e = Exp::Bin(BinOp::Sub, Box::new(e), Box::new(self.term()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self) -> Result<Exp, ParseError> {
        let mut e = self.factor()?;
        while self.peek() == &Tok::Punct("*") {
            self.next();
            e = Exp::Bin(BinOp::Mul, Box::new(e), Box::new(self.factor()?));
        }
        Ok(e)
    }

    fn factor(&mut self) -> Result<Exp, ParseError> {
        match self.peek().clone() {
            Tok::Int(k) => {
                self.next();
                Ok(Exp::Const(k))
            }
            Tok::Punct("-") => {
                self.next();
                Ok(Exp::Neg(Box::new(self.factor()?)))
            }
            Tok::Punct("&") => {
                self.next();
                Ok(Exp::AddrOf(self.ident()?))
            }
            Tok::Punct("*") => {
                self.next();
                Ok(Exp::Lval(Lval::Deref(self.ident()?)))
            }
            Tok::Ident(x) => {
                if is_keyword(&x) {
                    return Err(ParseError::new(
                        self.pos(),
                        format!("unexpected keyword `{x}` in expression"),
                    ));
                }
                self.next();
                Ok(Exp::Lval(Lval::Var(x)))
            }
            Tok::Punct("(") => {
                self.next();
                let e = self.exp()?;
                self.eat(")")?;
                Ok(e)
            }
            t => Err(ParseError::new(self.pos(), format!("expected expression, found {t}"))),
        }
    }

    fn cond(&mut self) -> Result<Cond, ParseError> {
        let mut c = self.conj()?;
        while self.peek() == &Tok::Punct("||") {
            self.next();
            c = Cond::Or(Box::new(c), Box::new(self.conj()?));
        }
        Ok(c)
    }

    fn conj(&mut self) -> Result<Cond, ParseError> {
        let mut c = self.atom()?;
        while self.peek() == &Tok::Punct("&&") {
            self.next();
            c = Cond::And(Box::new(c), Box::new(self.atom()?));
        }
        Ok(c)
    }

    fn atom(&mut self) -> Result<Cond, ParseError> {
        // Try a comparison first; `(` is ambiguous between a parenthesized
        // expression and a parenthesized condition, so backtrack on failure.
        let save = self.at;
        match self.comparison() {
            Ok(c) => return Ok(c),
            Err(e) => {
                self.at = save;
                if self.peek() == &Tok::Punct("!") {
                    self.next();
                    return Ok(Cond::Not(Box::new(self.atom()?)));
                }
                if self.peek() == &Tok::Punct("(") {
                    self.next();
                    let c = self.cond()?;
                    self.eat(")")?;
                    return Ok(c);
                }
                Err(e)
            }
        }
    }

    fn comparison(&mut self) -> Result<Cond, ParseError> {
        let a = self.exp()?;
        let op = match self.peek() {
            Tok::Punct("==") => CmpOp::Eq,
            Tok::Punct("!=") => CmpOp::Ne,
            Tok::Punct("<") => CmpOp::Lt,
            Tok::Punct("<=") => CmpOp::Le,
            Tok::Punct(">") => CmpOp::Gt,
            Tok::Punct(">=") => CmpOp::Ge,
            Tok::Punct("=") => {
                return Err(ParseError::new(
                    self.pos(),
                    "`=` is assignment, not a comparison (use `==`)",
                ))
            }
            t => {
                return Err(ParseError::new(self.pos(), format!("expected comparison, found {t}")))
            }
        };
        self.next();
        let b = self.exp()?;
        Ok(Cond::Cmp(op, a, b))
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "int" | "if" | "else" | "while" | "assert" | "nondet")
}

/// Parse and type-check a MiniC program.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let prog = p.program()?;
    if p.peek() != &Tok::Eof {
        return Err(ParseError::new(p.pos(), format!("unexpected {}", p.peek())));
    }
    typecheck(&prog)?;
    Ok(prog)
}

/// Parse an invariant condition. Name binding against a program's
/// declarations happens later, when the witness is bound to the CFG.
pub fn parse_condition(text: &str) -> Result<Cond, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let c = p.cond()?;
    if p.peek() != &Tok::Eof {
        return Err(ParseError::new(p.pos(), format!("unexpected {}", p.peek())));
    }
    Ok(c)
}

fn typecheck(prog: &Program) -> Result<(), ParseError> {
    let mut vars: BTreeMap<&str, VarType> = BTreeMap::new();
    for d in &prog.decls {
        if vars.insert(&d.name, d.ty).is_some() {
            return Err(ParseError::new(d.pos, format!("`{}` declared twice", d.name)));
        }
    }
    check_stmts(&prog.body, &vars)
}

fn check_stmts(stmts: &[Stmt], vars: &BTreeMap<&str, VarType>) -> Result<(), ParseError> {
    for s in stmts {
        let pos = s.pos();
        match s {
            Stmt::Assign(lv, e, _) => {
                let lt = lval_type(lv, vars, pos)?;
                let et = exp_type(e, vars, pos)?;
                if lt != et {
                    return Err(ParseError::new(
                        pos,
                        format!("type mismatch: assigning {} to {}", type_name(et), type_name(lt)),
                    ));
                }
            }
            Stmt::Nondet(lv, _) => {
                if lval_type(lv, vars, pos)? != VarType::Int {
                    return Err(ParseError::new(pos, "nondet() only produces integers"));
                }
            }
            Stmt::If(c, a, b, _) => {
                check_cond(c, vars, pos)?;
                check_stmts(a, vars)?;
                check_stmts(b, vars)?;
            }
            Stmt::While(c, body, _) => {
                check_cond(c, vars, pos)?;
                check_stmts(body, vars)?;
            }
            Stmt::Assert(c, _) => check_cond(c, vars, pos)?,
        }
    }
    Ok(())
}

fn type_name(t: VarType) -> &'static str {
    match t {
        VarType::Int => "int",
        VarType::PtrInt => "int*",
    }
}

fn var_type(x: &str, vars: &BTreeMap<&str, VarType>, pos: SourcePos) -> Result<VarType, ParseError> {
    vars.get(x)
        .copied()
        .ok_or_else(|| ParseError::new(pos, format!("`{x}` used before declaration")))
}

fn lval_type(
    lv: &Lval,
    vars: &BTreeMap<&str, VarType>,
    pos: SourcePos,
) -> Result<VarType, ParseError> {
    match lv {
        Lval::Var(x) => var_type(x, vars, pos),
        Lval::Deref(x) => match var_type(x, vars, pos)? {
            VarType::PtrInt => Ok(VarType::Int),
            VarType::Int => {
                Err(ParseError::new(pos, format!("cannot dereference integer variable `{x}`")))
            }
        },
    }
}

fn exp_type(e: &Exp, vars: &BTreeMap<&str, VarType>, pos: SourcePos) -> Result<VarType, ParseError> {
    match e {
        Exp::Const(_) => Ok(VarType::Int),
        Exp::AddrOf(x) => match var_type(x, vars, pos)? {
            VarType::Int => Ok(VarType::PtrInt),
            VarType::PtrInt => {
                Err(ParseError::new(pos, format!("`&{x}`: multi-level pointers are not supported")))
            }
        },
        Exp::Lval(lv) => lval_type(lv, vars, pos),
        Exp::Neg(a) => {
            if exp_type(a, vars, pos)? != VarType::Int {
                return Err(ParseError::new(pos, "pointer arithmetic is not supported"));
            }
            Ok(VarType::Int)
        }
        Exp::Bin(_, a, b) => {
            if exp_type(a, vars, pos)? != VarType::Int || exp_type(b, vars, pos)? != VarType::Int {
                return Err(ParseError::new(pos, "pointer arithmetic is not supported"));
            }
            Ok(VarType::Int)
        }
    }
}

fn check_cond(c: &Cond, vars: &BTreeMap<&str, VarType>, pos: SourcePos) -> Result<(), ParseError> {
    match c {
        Cond::Cmp(op, a, b) => {
            let ta = exp_type(a, vars, pos)?;
            let tb = exp_type(b, vars, pos)?;
            if ta != tb {
                return Err(ParseError::new(pos, "comparison between int and pointer"));
            }
            if ta == VarType::PtrInt && !matches!(op, CmpOp::Eq | CmpOp::Ne) {
                return Err(ParseError::new(pos, "pointers only support == and != comparisons"));
            }
            Ok(())
        }
        Cond::And(a, b) | Cond::Or(a, b) => {
            check_cond(a, vars, pos)?;
            check_cond(b, vars, pos)
        }
        Cond::Not(a) => check_cond(a, vars, pos),
    }
}

/// Bind a free-standing condition against a program's declarations,
/// reporting the first undeclared variable or type error.
pub fn check_condition(c: &Cond, prog: &Program) -> Result<(), ParseError> {
    let mut vars: BTreeMap<&str, VarType> = BTreeMap::new();
    for d in &prog.decls {
        vars.insert(&d.name, d.ty);
    }
    check_cond(c, &vars, SourcePos { line: 1, col: 1 })
}
