//! Circuit description format, parser, and circuit builders.
//!
//! The text format is line oriented, one statement per line:
//!
//! ```text
//! # comment
//! qubits 3
//! state 0 0.6 0.0        # optional: amplitude at basis index 0
//! state 4 0.0 0.8
//! h 0
//! cx 0 1
//! rz 2 1.5708
//! ```
//!
//! `qubits <n>` must come first. Optional `state <index> <re> <im>` lines
//! override the default `|0...0>` initial state; unlisted indices stay
//! zero. A gate statement is `<name> <target> [<target2>] [<param>]` with
//! case-insensitive names; controlled gates list the control first and must
//! act on an adjacent pair (`target = control + 1`). Qubit 0 is the most
//! significant bit of the state index.

use std::fmt::Write as _;

use thiserror::Error;

use crate::gates::{GateError, GateKind, GateSpec};

/// Hard cap on qubit count; index arithmetic and the cost models use u32.
pub const MAX_QUBITS: u32 = 32;

#[derive(Debug, Error, PartialEq)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            col,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("qubit count {0} outside supported range {1}..={2}")]
    QubitRange(u32, u32, u32),
    #[error("depth must be at least 1")]
    ZeroDepth,
}

/// An ordered list of validated gates on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n: u32,
    pub ops: Vec<GateSpec>,
    pub name: String,
}

impl Circuit {
    /// Validates every gate: targets in range, controlled gates adjacent.
    /// Gate-shape errors (arity, parameter presence) are caught earlier by
    /// [`GateSpec::new`].
    pub fn new(n: u32, ops: Vec<GateSpec>, name: impl Into<String>) -> Result<Self, GateError> {
        for g in &ops {
            debug_assert!(!g.targets.is_empty());
            if g.targets.iter().any(|&t| t >= n) || g.position() + g.span() > n {
                return Err(GateError::TargetOutOfRange {
                    kind: g.kind.name(),
                    target: *g.targets.iter().max().expect("non-empty targets"),
                    n,
                });
            }
        }
        Ok(Self {
            n,
            ops,
            name: name.into(),
        })
    }

    pub fn gate_count(&self) -> usize {
        self.ops.len()
    }
}

/// One explicit amplitude of an initial state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialAmplitude {
    pub index: u64,
    pub re: f64,
    pub im: f64,
}

/// A parsed `.qc` file: the circuit plus any explicit initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitFile {
    pub circuit: Circuit,
    /// Empty means the default `|0...0>`.
    pub initial: Vec<InitialAmplitude>,
}

/// Parses circuit text, ignoring any `state` lines. See [`parse_file`] when
/// the initial state matters.
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    parse_file(text).map(|f| f.circuit)
}

/// Parses a full `.qc` source including optional `state` lines.
pub fn parse_file(text: &str) -> Result<CircuitFile, ParseError> {
    let mut n: Option<u32> = None;
    let mut ops = Vec::new();
    let mut initial = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut pos = 0;
        for tok in line.split_whitespace() {
            // Byte offset of the token start, for column-accurate errors.
            let col = line[pos..].find(tok).map(|o| pos + o).unwrap_or(pos);
            tokens.push((tok, col + 1));
            pos = col + tok.len();
        }
        if tokens.is_empty() {
            continue;
        }
        let (head, head_col) = tokens[0];
        match head.to_ascii_lowercase().as_str() {
            "qubits" => {
                if n.is_some() {
                    return Err(ParseError::new(lineno, head_col, "duplicate qubits line"));
                }
                let (val, col) = expect_one_arg(&tokens, lineno, "qubits <n>")?;
                let count: u32 = val
                    .parse()
                    .map_err(|_| ParseError::new(lineno, col, format!("invalid qubit count '{val}'")))?;
                if count == 0 || count > MAX_QUBITS {
                    return Err(ParseError::new(
                        lineno,
                        col,
                        format!("qubit count must be in 1..={MAX_QUBITS}"),
                    ));
                }
                n = Some(count);
            }
            "state" => {
                let n = n.ok_or_else(|| {
                    ParseError::new(lineno, head_col, "state line before qubits line")
                })?;
                if tokens.len() != 4 {
                    return Err(ParseError::new(
                        lineno,
                        head_col,
                        "expected: state <index> <re> <im>",
                    ));
                }
                let index: u64 = parse_num(tokens[1], lineno, "basis index")?;
                if index >= 1u64 << n {
                    return Err(ParseError::new(
                        lineno,
                        tokens[1].1,
                        format!("basis index {index} out of range for {n} qubits"),
                    ));
                }
                let re: f64 = parse_num(tokens[2], lineno, "real part")?;
                let im: f64 = parse_num(tokens[3], lineno, "imaginary part")?;
                if !re.is_finite() || !im.is_finite() {
                    return Err(ParseError::new(lineno, tokens[2].1, "non-finite amplitude"));
                }
                initial.push(InitialAmplitude { index, re, im });
            }
            _ => {
                let n = n.ok_or_else(|| {
                    ParseError::new(lineno, head_col, "first statement must be 'qubits <n>'")
                })?;
                let gate = parse_gate_line(&tokens, lineno, n)?;
                ops.push(gate);
            }
        }
    }
    let n = n.ok_or_else(|| ParseError::new(1, 1, "missing 'qubits <n>' header"))?;
    let circuit = Circuit::new(n, ops, "circuit")
        .map_err(|e| ParseError::new(1, 1, e.to_string()))?;
    Ok(CircuitFile { circuit, initial })
}

fn expect_one_arg<'a>(
    tokens: &[(&'a str, usize)],
    lineno: usize,
    usage: &str,
) -> Result<(&'a str, usize), ParseError> {
    if tokens.len() != 2 {
        return Err(ParseError::new(lineno, tokens[0].1, format!("expected: {usage}")));
    }
    Ok(tokens[1])
}

fn parse_num<T: std::str::FromStr>(
    (tok, col): (&str, usize),
    lineno: usize,
    what: &str,
) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| ParseError::new(lineno, col, format!("invalid {what} '{tok}'")))
}

fn parse_gate_line(tokens: &[(&str, usize)], lineno: usize, n: u32) -> Result<GateSpec, ParseError> {
    let (head, head_col) = tokens[0];
    let kind = GateKind::parse(head).map_err(|e| ParseError::new(lineno, head_col, e.to_string()))?;
    let span = kind.span() as usize;
    let want_param = kind.is_parameterized();
    let expected = 1 + span + usize::from(want_param);
    if tokens.len() != expected {
        let mut usage = format!("{} <target>", kind.name());
        if span == 2 {
            usage.push_str(" <target2>");
        }
        if want_param {
            usage.push_str(" <angle>");
        }
        return Err(ParseError::new(
            lineno,
            head_col,
            format!("expected: {usage}"),
        ));
    }
    let mut targets = Vec::with_capacity(span);
    for t in &tokens[1..=span] {
        let q: u32 = parse_num(*t, lineno, "qubit index")?;
        if q >= n {
            return Err(ParseError::new(
                lineno,
                t.1,
                format!("qubit index {q} out of range for {n} qubits"),
            ));
        }
        targets.push(q);
    }
    let param = if want_param {
        let p: f64 = parse_num(tokens[span + 1], lineno, "angle")?;
        if !p.is_finite() {
            return Err(ParseError::new(lineno, tokens[span + 1].1, "non-finite angle"));
        }
        Some(p)
    } else {
        None
    };
    GateSpec::new(kind, targets, param).map_err(|e| ParseError::new(lineno, head_col, e.to_string()))
}

/// Serializes back to the text format; `parse_file(print_file(f))` returns
/// an equal [`CircuitFile`].
pub fn print_file(file: &CircuitFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "qubits {}", file.circuit.n);
    for a in &file.initial {
        let _ = writeln!(out, "state {} {} {}", a.index, a.re, a.im);
    }
    for g in &file.circuit.ops {
        let _ = writeln!(out, "{g}");
    }
    out
}

pub fn print_circuit(circuit: &Circuit) -> String {
    print_file(&CircuitFile {
        circuit: circuit.clone(),
        initial: Vec::new(),
    })
}

/// Logical gate count of the QFT builder before adjacency expansion:
/// one H per qubit plus one controlled phase per qubit pair.
pub fn qft_logical_gate_count(n: u32) -> u64 {
    u64::from(n) + u64::from(n) * u64::from(n - 1) / 2
}

/// Builds the transform circuit: for each qubit q (most significant first)
/// an H, then controlled phases `cp(pi/2^k)` towards each lower qubit
/// `q + k`. No trailing swap layer, so the output appears in bit-reversed
/// index order.
///
/// Controlled phases between non-adjacent qubits are realized by chains of
/// adjacent swaps (each swap built from the available control-high `cx` via
/// Hadamard conjugation), applying the phase at distance one, then
/// unwinding.
pub fn build_qft(n: u32) -> Result<Circuit, BuildError> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(BuildError::QubitRange(n, 2, MAX_QUBITS));
    }
    let mut ops = Vec::new();
    for q in 0..n {
        ops.push(GateSpec::single(GateKind::H, q));
        for k in 1..(n - q) {
            let lam = std::f64::consts::PI / f64::from(1u32 << k);
            // Bring qubit q+k next to q at position q+1.
            for j in (q + 1..q + k).rev() {
                push_swap(&mut ops, j);
            }
            ops.push(GateSpec::controlled(GateKind::Cp, q, Some(lam)));
            for j in q + 1..q + k {
                push_swap(&mut ops, j);
            }
        }
    }
    Circuit::new(n, ops, format!("qft{n}")).map_err(|_| BuildError::QubitRange(n, 2, MAX_QUBITS))
}

/// Swap of the adjacent pair `(a, a+1)`: cx(a,a+1) conjugated by Hadamards
/// stands in for the reversed-control cx.
fn push_swap(ops: &mut Vec<GateSpec>, a: u32) {
    ops.push(GateSpec::controlled(GateKind::Cx, a, None));
    ops.push(GateSpec::single(GateKind::H, a));
    ops.push(GateSpec::single(GateKind::H, a + 1));
    ops.push(GateSpec::controlled(GateKind::Cx, a, None));
    ops.push(GateSpec::single(GateKind::H, a));
    ops.push(GateSpec::single(GateKind::H, a + 1));
    ops.push(GateSpec::controlled(GateKind::Cx, a, None));
}

/// H on the top qubit followed by a ladder of adjacent cx gates.
pub fn build_ghz(n: u32) -> Result<Circuit, BuildError> {
    if !(1..=MAX_QUBITS).contains(&n) {
        return Err(BuildError::QubitRange(n, 1, MAX_QUBITS));
    }
    let mut ops = vec![GateSpec::single(GateKind::H, 0)];
    for q in 0..n - 1 {
        ops.push(GateSpec::controlled(GateKind::Cx, q, None));
    }
    Circuit::new(n, ops, format!("ghz{n}")).map_err(|_| BuildError::QubitRange(n, 1, MAX_QUBITS))
}

/// Gates eligible for random circuits (the identity is excluded as inert).
const RANDOM_SINGLE: [GateKind; 13] = [
    GateKind::P,
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::S,
    GateKind::Sdg,
    GateKind::T,
    GateKind::Tdg,
    GateKind::Rz,
    GateKind::H,
    GateKind::Sx,
    GateKind::Rx,
    GateKind::Ry,
];
const RANDOM_CONTROLLED: [GateKind; 8] = [
    GateKind::Cx,
    GateKind::Cy,
    GateKind::Cz,
    GateKind::Cp,
    GateKind::Crx,
    GateKind::Cry,
    GateKind::Crz,
    GateKind::Ch,
];

/// Deterministic random circuit: `depth` gates drawn uniformly from the
/// supported set, controlled gates restricted to adjacent pairs. The same
/// seed always yields the same circuit; sampling uses raw generator output
/// so the stream does not depend on distribution-library internals.
pub fn build_random(n: u32, depth: u32, seed: u64) -> Result<Circuit, BuildError> {
    use rand_chacha::rand_core::{RngCore, SeedableRng};

    if !(1..=MAX_QUBITS).contains(&n) {
        return Err(BuildError::QubitRange(n, 1, MAX_QUBITS));
    }
    if depth == 0 {
        return Err(BuildError::ZeroDepth);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut pick = |m: u64| -> u64 { rng.next_u64() % m };
    let total = if n == 1 {
        RANDOM_SINGLE.len()
    } else {
        RANDOM_SINGLE.len() + RANDOM_CONTROLLED.len()
    };
    let mut ops = Vec::with_capacity(depth as usize);
    for _ in 0..depth {
        let choice = pick(total as u64) as usize;
        let (kind, controlled) = if choice < RANDOM_SINGLE.len() {
            (RANDOM_SINGLE[choice], false)
        } else {
            (RANDOM_CONTROLLED[choice - RANDOM_SINGLE.len()], true)
        };
        let param = kind.is_parameterized().then(|| {
            let unit = (pick(u64::MAX) >> 11) as f64 / (1u64 << 53) as f64;
            unit * 2.0 * std::f64::consts::PI
        });
        let gate = if controlled {
            let control = pick(u64::from(n - 1)) as u32;
            GateSpec::controlled(kind, control, param)
        } else {
            let q = pick(u64::from(n)) as u32;
            GateSpec::new(kind, vec![q], param).expect("valid random gate")
        };
        ops.push(gate);
    }
    Circuit::new(n, ops, format!("random-n{n}-d{depth}-s{seed}"))
        .map_err(|_| BuildError::QubitRange(n, 1, MAX_QUBITS))
}
