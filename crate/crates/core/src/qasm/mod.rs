//! OpenQASM 2.0 subset: hand-written tokenizer, recursive-descent parser
//! and emitter.
//!
//! Accepted: the `OPENQASM 2.0;` header, `include "qelib1.inc";` (resolved
//! internally), `qreg`/`creg`, applications of the built-in gates
//! (`id x y z h s sdg t tdg rx ry rz u1 u2 u3 cx cz swap ccx`, plus the
//! language built-ins `U` and `CX`), `measure` (single or whole-register),
//! and `barrier`. Gate arguments may be whole registers, which broadcast.
//! Angle expressions support numeric literals, `pi`, parentheses, unary
//! minus and binary `+ - * /`.
//!
//! Rejected with a positioned diagnostic: `gate` and `opaque`
//! definitions, `if`, `reset`, other includes, unknown gates, and any
//! unitary that follows a measurement of the same qubit.
//!
//! Multiple registers are flattened in declaration order: the first
//! declared `qreg` owns the lowest qubit indices.

mod emit;
mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

pub use emit::emit_qasm;
pub use parser::{parse_qasm, parse_qasm_named};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QasmErrorKind {
    /// Construct outside the supported subset (`gate`, `if`, `reset`, ...).
    Unsupported(String),
    UnknownGate(String),
    IndexOutOfRange { register: String, index: usize, size: usize },
    UndeclaredRegister(String),
    DuplicateRegister(String),
    /// Malformed token stream or expression.
    Syntax(String),
    /// Valid syntax that builds an invalid circuit.
    Semantic(String),
}

impl QasmErrorKind {
    /// Stable short name, used by the conformance listing.
    pub fn code(&self) -> &'static str {
        match self {
            QasmErrorKind::Unsupported(_) => "unsupported",
            QasmErrorKind::UnknownGate(_) => "unknown-gate",
            QasmErrorKind::IndexOutOfRange { .. } => "index-out-of-range",
            QasmErrorKind::UndeclaredRegister(_) => "undeclared-register",
            QasmErrorKind::DuplicateRegister(_) => "duplicate-register",
            QasmErrorKind::Syntax(_) => "syntax",
            QasmErrorKind::Semantic(_) => "semantic",
        }
    }
}

impl fmt::Display for QasmErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QasmErrorKind::Unsupported(what) => write!(f, "unsupported statement: {what}"),
            QasmErrorKind::UnknownGate(name) => write!(f, "unsupported gate `{name}`"),
            QasmErrorKind::IndexOutOfRange { register, index, size } => {
                write!(f, "index {index} out of range for register {register}[{size}]")
            }
            QasmErrorKind::UndeclaredRegister(name) => write!(f, "undeclared register `{name}`"),
            QasmErrorKind::DuplicateRegister(name) => write!(f, "register `{name}` already declared"),
            QasmErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            QasmErrorKind::Semantic(msg) => f.write_str(msg),
        }
    }
}

/// Parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct QasmError {
    pub line: usize,
    pub col: usize,
    pub kind: QasmErrorKind,
}
