use std::collections::HashMap;

use super::lexer::{Tok, Token, tokenize};
use super::{QasmError, QasmErrorKind};
use crate::circuit::{Circuit, GateOp};
use crate::error::Error;
use crate::gate::GateKind;

/// Parses OpenQASM 2.0 text into a circuit named `"qasm"`.
pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    parse_qasm_named(text, "qasm")
}

pub fn parse_qasm_named(text: &str, name: &str) -> Result<Circuit, QasmError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        qregs: HashMap::new(),
        cregs: HashMap::new(),
        num_qubits: 0,
        num_clbits: 0,
        ops: Vec::new(),
    };
    p.program()?;
    p.build(name)
}

#[derive(Debug, Clone, Copy)]
struct Register {
    start: usize,
    size: usize,
}

/// A resolved operand: one index, or a whole register (broadcast).
#[derive(Debug, Clone)]
enum Operand {
    Single(usize),
    Whole(Register),
}

impl Operand {
    fn len(&self) -> Option<usize> {
        match self {
            Operand::Single(_) => None,
            Operand::Whole(r) => Some(r.size),
        }
    }

    fn at(&self, i: usize) -> usize {
        match self {
            Operand::Single(q) => *q,
            Operand::Whole(r) => r.start + i,
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    qregs: HashMap<String, Register>,
    cregs: HashMap<String, Register>,
    num_qubits: usize,
    num_clbits: usize,
    /// Ops with the position of the statement that produced them.
    ops: Vec<(GateOp, usize, usize)>,
}

type PResult<T> = Result<T, QasmError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: &Token, kind: QasmErrorKind) -> QasmError {
        QasmError {
            line: t.line,
            col: t.col,
            kind,
        }
    }

    fn expect(&mut self, want: Tok) -> PResult<Token> {
        let t = self.next();
        if t.tok == want {
            Ok(t)
        } else {
            Err(self.error_at(
                &t,
                QasmErrorKind::Syntax(format!("expected {}, found {}", want.describe(), t.tok.describe())),
            ))
        }
    }

    fn ident(&mut self) -> PResult<(String, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            other => Err(self.error_at(
                &t,
                QasmErrorKind::Syntax(format!("expected identifier, found {}", other.describe())),
            )),
        }
    }

    fn int(&mut self) -> PResult<usize> {
        let t = self.next();
        match t.tok {
            Tok::Int(i) => Ok(i),
            ref other => Err(self.error_at(
                &t,
                QasmErrorKind::Syntax(format!("expected integer, found {}", other.describe())),
            )),
        }
    }

    fn program(&mut self) -> PResult<()> {
        self.header()?;
        while self.peek().tok != Tok::Eof {
            self.statement()?;
        }
        Ok(())
    }

    fn header(&mut self) -> PResult<()> {
        let t = self.next();
        if t.tok != Tok::Ident("OPENQASM".into()) {
            return Err(self.error_at(
                &t,
                QasmErrorKind::Syntax("program must start with `OPENQASM 2.0;`".into()),
            ));
        }
        let v = self.next();
        let ok = match v.tok {
            Tok::Real(x) => x == 2.0,
            Tok::Int(x) => x == 2,
            _ => false,
        };
        if !ok {
            return Err(self.error_at(
                &v,
                QasmErrorKind::Unsupported(format!("OpenQASM version {}", v.tok.describe())),
            ));
        }
        self.expect(Tok::Semi)?;
        Ok(())
    }

    fn statement(&mut self) -> PResult<()> {
        let (word, t) = self.ident()?;
        match word.as_str() {
            "OPENQASM" => Err(self.error_at(&t, QasmErrorKind::Syntax("duplicate OPENQASM header".into()))),
            "include" => self.include(&t),
            "qreg" | "creg" => self.register(word == "qreg"),
            "measure" => self.measure(&t),
            "barrier" => self.barrier(&t),
            "gate" => Err(self.error_at(&t, QasmErrorKind::Unsupported("user-defined `gate` definitions".into()))),
            "opaque" => Err(self.error_at(&t, QasmErrorKind::Unsupported("`opaque` gate declarations".into()))),
            "if" => Err(self.error_at(&t, QasmErrorKind::Unsupported("classically controlled `if`".into()))),
            "reset" => Err(self.error_at(&t, QasmErrorKind::Unsupported("`reset`".into()))),
            _ => self.gate_call(word, &t),
        }
    }

    fn include(&mut self, at: &Token) -> PResult<()> {
        let t = self.next();
        match &t.tok {
            Tok::Str(file) if file == "qelib1.inc" => {}
            Tok::Str(file) => {
                return Err(self.error_at(at, QasmErrorKind::Unsupported(format!("include of {file:?}"))));
            }
            other => {
                return Err(self.error_at(
                    &t,
                    QasmErrorKind::Syntax(format!("expected file name, found {}", other.describe())),
                ));
            }
        }
        self.expect(Tok::Semi)?;
        Ok(())
    }

    fn register(&mut self, quantum: bool) -> PResult<()> {
        let (name, t) = self.ident()?;
        self.expect(Tok::LBracket)?;
        let size_tok = self.peek().clone();
        let size = self.int()?;
        self.expect(Tok::RBracket)?;
        self.expect(Tok::Semi)?;
        if size == 0 {
            return Err(self.error_at(&size_tok, QasmErrorKind::Semantic("register size must be positive".into())));
        }
        if self.qregs.contains_key(&name) || self.cregs.contains_key(&name) {
            return Err(self.error_at(&t, QasmErrorKind::DuplicateRegister(name)));
        }
        if quantum {
            self.qregs.insert(name, Register { start: self.num_qubits, size });
            self.num_qubits += size;
        } else {
            self.cregs.insert(name, Register { start: self.num_clbits, size });
            self.num_clbits += size;
        }
        Ok(())
    }

    fn operand(&mut self, quantum: bool) -> PResult<Operand> {
        let (name, t) = self.ident()?;
        let table = if quantum { &self.qregs } else { &self.cregs };
        let Some(reg) = table.get(&name).copied() else {
            let kind = if (if quantum { &self.cregs } else { &self.qregs }).contains_key(&name) {
                QasmErrorKind::Semantic(format!(
                    "`{name}` is a {} register here a {} one is required",
                    if quantum { "classical" } else { "quantum" },
                    if quantum { "quantum" } else { "classical" },
                ))
            } else {
                QasmErrorKind::UndeclaredRegister(name)
            };
            return Err(self.error_at(&t, kind));
        };
        if self.peek().tok != Tok::LBracket {
            return Ok(Operand::Whole(reg));
        }
        self.next();
        let idx_tok = self.peek().clone();
        let index = self.int()?;
        self.expect(Tok::RBracket)?;
        if index >= reg.size {
            return Err(self.error_at(
                &idx_tok,
                QasmErrorKind::IndexOutOfRange { register: name, index, size: reg.size },
            ));
        }
        Ok(Operand::Single(reg.start + index))
    }

    fn operand_list(&mut self) -> PResult<Vec<Operand>> {
        let mut args = vec![self.operand(true)?];
        while self.peek().tok == Tok::Comma {
            self.next();
            args.push(self.operand(true)?);
        }
        Ok(args)
    }

    fn measure(&mut self, at: &Token) -> PResult<()> {
        let q = self.operand(true)?;
        self.expect(Tok::Arrow)?;
        let c = self.operand(false)?;
        self.expect(Tok::Semi)?;
        match (q.len(), c.len()) {
            (None, None) => self.emit(GateOp::measure(q.at(0), c.at(0)), at),
            (Some(a), Some(b)) if a == b => {
                for i in 0..a {
                    self.emit(GateOp::measure(q.at(i), c.at(i)), at);
                }
            }
            _ => {
                return Err(self.error_at(
                    at,
                    QasmErrorKind::Semantic("measure operands must both be bits or equal-size registers".into()),
                ));
            }
        }
        Ok(())
    }

    fn barrier(&mut self, at: &Token) -> PResult<()> {
        let args = self.operand_list()?;
        self.expect(Tok::Semi)?;
        let mut qubits = Vec::new();
        for a in &args {
            let n = a.len().unwrap_or(1);
            for i in 0..n {
                let q = a.at(i);
                if !qubits.contains(&q) {
                    qubits.push(q);
                }
            }
        }
        self.emit(GateOp::new(GateKind::Barrier, &qubits, &[]), at);
        Ok(())
    }

    fn gate_call(&mut self, name: String, at: &Token) -> PResult<()> {
        let kind = match name.as_str() {
            "U" => Some(GateKind::U3),
            "CX" => Some(GateKind::Cx),
            n => GateKind::from_name(n).filter(|k| k.is_unitary()),
        };
        let Some(kind) = kind else {
            return Err(self.error_at(at, QasmErrorKind::UnknownGate(name)));
        };
        let mut params = Vec::new();
        if self.peek().tok == Tok::LParen {
            self.next();
            if self.peek().tok != Tok::RParen {
                params.push(self.expr()?);
                while self.peek().tok == Tok::Comma {
                    self.next();
                    params.push(self.expr()?);
                }
            }
            self.expect(Tok::RParen)?;
        }
        if params.len() != kind.num_params() {
            return Err(self.error_at(
                at,
                QasmErrorKind::Semantic(format!(
                    "`{name}` takes {} parameter(s), got {}",
                    kind.num_params(),
                    params.len()
                )),
            ));
        }
        let args = self.operand_list()?;
        self.expect(Tok::Semi)?;
        let arity = kind.arity().expect("unitary kinds have fixed arity");
        if args.len() != arity {
            return Err(self.error_at(
                at,
                QasmErrorKind::Semantic(format!("`{name}` acts on {arity} qubit(s), got {}", args.len())),
            ));
        }
        let sizes: Vec<usize> = args.iter().filter_map(Operand::len).collect();
        let reps = match sizes.first() {
            None => 1,
            Some(&s) if sizes.iter().all(|&x| x == s) => s,
            Some(_) => {
                return Err(self.error_at(
                    at,
                    QasmErrorKind::Semantic("broadcast registers differ in size".into()),
                ));
            }
        };
        for i in 0..reps {
            let qubits: Vec<usize> = args.iter().map(|a| a.at(i)).collect();
            self.emit(GateOp::new(kind, &qubits, &params), at);
        }
        Ok(())
    }

    fn emit(&mut self, op: GateOp, at: &Token) {
        self.ops.push((op, at.line, at.col));
    }

    // expr   := term (('+' | '-') term)*
    // term   := unary (('*' | '/') unary)*
    // unary  := '-' unary | primary
    // primary:= number | 'pi' | '(' expr ')'
    fn expr(&mut self) -> PResult<f64> {
        let mut v = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    v += self.term()?;
                }
                Tok::Minus => {
                    self.next();
                    v -= self.term()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn term(&mut self) -> PResult<f64> {
        let mut v = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    v *= self.unary()?;
                }
                Tok::Slash => {
                    self.next();
                    v /= self.unary()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn unary(&mut self) -> PResult<f64> {
        if self.peek().tok == Tok::Minus {
            self.next();
            return Ok(-self.unary()?);
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<f64> {
        let t = self.next();
        match &t.tok {
            Tok::Int(i) => Ok(*i as f64),
            Tok::Real(r) => Ok(*r),
            Tok::Ident(s) if s == "pi" => Ok(std::f64::consts::PI),
            Tok::LParen => {
                let v = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(v)
            }
            other => Err(self.error_at(
                &t,
                QasmErrorKind::Syntax(format!("malformed expression at {}", other.describe())),
            )),
        }
    }

    fn build(self, name: &str) -> PResult<Circuit> {
        if self.num_qubits == 0 {
            let t = &self.tokens[self.pos];
            return Err(self.error_at(t, QasmErrorKind::Semantic("no quantum register declared".into())));
        }
        let mut c = Circuit::new(self.num_qubits, name).with_clbits(self.num_clbits);
        for (op, line, col) in self.ops {
            c.push(op).map_err(|e| QasmError {
                line,
                col,
                kind: match e {
                    Error::MidCircuitMeasurement { .. } => {
                        QasmErrorKind::Unsupported(format!("mid-circuit measurement ({e})"))
                    }
                    other => QasmErrorKind::Semantic(other.to_string()),
                },
            })?;
        }
        Ok(c)
    }
}
