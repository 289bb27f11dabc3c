//! Naive dense reference simulator.
//!
//! Ground truth for every equivalence test: each gate is expanded to its
//! full `2^n x 2^n` unitary by explicit Kronecker products with identities
//! and applied by dense mat-vec. No fusion, no sparsity, no shared code
//! with the optimized path - the gate matrices below are written out
//! independently of [`crate::gates`] so the two cannot share a bug.

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::Circuit;
use crate::gates::{GateKind, GateSpec};

/// Largest qubit count `dense_run` accepts; the full unitary of a gate is
/// materialized, so memory grows as `4^n`.
pub const MAX_RUN_QUBITS: u32 = 14;
/// Largest qubit count for whole-circuit unitaries.
pub const MAX_UNITARY_QUBITS: u32 = 10;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("{got} qubits exceeds the dense reference limit of {limit}")]
    TooManyQubits { got: u32, limit: u32 },
    #[error("initial state has {got} amplitudes, expected {want}")]
    BadInitialState { got: usize, want: usize },
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseOperator {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, entries }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "must be square");
        Self {
            dim,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        self.entries.chunks(self.dim).map(<[_]>::to_vec).collect()
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let dim = self.dim * rhs.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..self.dim {
            for j in 0..self.dim {
                let g = self.at(i, j);
                for k in 0..rhs.dim {
                    for l in 0..rhs.dim {
                        entries[(i * rhs.dim + k) * dim + (j * rhs.dim + l)] = g * rhs.at(k, l);
                    }
                }
            }
        }
        Self { dim, entries }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let dim = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let a = self.at(i, k);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    entries[i * dim + j] += a * rhs.at(k, j);
                }
            }
        }
        Self { dim, entries }
    }

    #[allow(clippy::needless_range_loop)]
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len());
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for i in 0..self.dim {
            let row = &self.entries[i * self.dim..(i + 1) * self.dim];
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn conj_transpose(&self) -> Self {
        let dim = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                entries[j * dim + i] = self.at(i, j).conj();
            }
        }
        Self { dim, entries }
    }

    /// Largest entry-wise distance from the identity.
    pub fn max_dev_from_identity(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.at(i, j) - Complex64::new(want, 0.0)).norm());
            }
        }
        worst
    }
}

/// Dense matrix of a single gate, written out longhand.
pub fn gate_dense(spec: &GateSpec) -> DenseOperator {
    let q = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let theta = spec.param.unwrap_or(0.0);
    let phase = Complex64::new(theta.cos(), theta.sin());
    let (c, d) = (
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::new((theta / 2.0).sin(), 0.0),
    );
    let i = Complex64::new(0.0, 1.0);
    let rows: Vec<Vec<Complex64>> = match spec.kind {
        GateKind::I => vec![vec![one, z], vec![z, one]],
        GateKind::P => vec![vec![one, z], vec![z, phase]],
        GateKind::X => vec![vec![z, one], vec![one, z]],
        GateKind::Y => vec![vec![z, -i], vec![i, z]],
        GateKind::Z => vec![vec![one, z], vec![z, -one]],
        GateKind::S => vec![vec![one, z], vec![z, i]],
        GateKind::Sdg => vec![vec![one, z], vec![z, -i]],
        GateKind::T => vec![vec![one, z], vec![z, Complex64::new(q, q)]],
        GateKind::Tdg => vec![vec![one, z], vec![z, Complex64::new(q, -q)]],
        GateKind::Rz => vec![vec![c - i * d, z], vec![z, c + i * d]],
        GateKind::Rx => vec![vec![c, -i * d], vec![-i * d, c]],
        GateKind::Ry => vec![vec![c, -d], vec![d, c]],
        GateKind::H => vec![
            vec![Complex64::new(q, 0.0), Complex64::new(q, 0.0)],
            vec![Complex64::new(q, 0.0), Complex64::new(-q, 0.0)],
        ],
        GateKind::Sx => vec![
            vec![Complex64::new(0.5, 0.5), Complex64::new(0.5, -0.5)],
            vec![Complex64::new(0.5, -0.5), Complex64::new(0.5, 0.5)],
        ],
        GateKind::Cx => vec![
            vec![one, z, z, z],
            vec![z, one, z, z],
            vec![z, z, z, one],
            vec![z, z, one, z],
        ],
        GateKind::Cy => vec![
            vec![one, z, z, z],
            vec![z, one, z, z],
            vec![z, z, z, -i],
            vec![z, z, i, z],
        ],
        GateKind::Cz => vec![
            vec![one, z, z, z],
            vec![z, one, z, z],
            vec![z, z, one, z],
            vec![z, z, z, -one],
        ],
        GateKind::Cp => vec![
            vec![one, z, z, z],
            vec![z, one, z, z],
            vec![z, z, one, z],
            vec![z, z, z, phase],
        ],
        GateKind::Crz => vec![
            vec![one, z, z, z],
            vec![z, one, z, z],
            vec![z, z, c - i * d, z],
            vec![z, z, z, c + i * d],
        ],
        GateKind::Crx => vec![
            vec![one, z, z, z],
            vec![z, one, z, z],
            vec![z, z, c, -i * d],
            vec![z, z, -i * d, c],
        ],
        GateKind::Cry => vec![
            vec![one, z, z, z],
            vec![z, one, z, z],
            vec![z, z, c, -d],
            vec![z, z, d, c],
        ],
        GateKind::Ch => vec![
            vec![one, z, z, z],
            vec![z, one, z, z],
            vec![z, z, Complex64::new(q, 0.0), Complex64::new(q, 0.0)],
            vec![z, z, Complex64::new(q, 0.0), Complex64::new(-q, 0.0)],
        ],
    };
    DenseOperator::from_rows(&rows)
}

/// Full `2^n` unitary of one gate: identities tensored around the gate
/// matrix, qubit 0 leftmost (most significant).
fn embed(spec: &GateSpec, n: u32) -> DenseOperator {
    let mut out = DenseOperator::identity(1);
    let mut qubit = 0;
    while qubit < n {
        if qubit == spec.position() {
            out = out.kron(&gate_dense(spec));
            qubit += spec.span();
        } else {
            out = out.kron(&DenseOperator::identity(2));
            qubit += 1;
        }
    }
    out
}

/// Runs a circuit gate by gate on `initial`, expanding every gate to its
/// full unitary. Quadratic in the state size by design.
pub fn dense_run(circuit: &Circuit, initial: &[Complex64]) -> Result<Vec<Complex64>, OracleError> {
    if circuit.n > MAX_RUN_QUBITS {
        return Err(OracleError::TooManyQubits {
            got: circuit.n,
            limit: MAX_RUN_QUBITS,
        });
    }
    let want = 1usize << circuit.n;
    if initial.len() != want {
        return Err(OracleError::BadInitialState {
            got: initial.len(),
            want,
        });
    }
    let mut state = initial.to_vec();
    for gate in &circuit.ops {
        state = embed(gate, circuit.n).matvec(&state);
    }
    Ok(state)
}

/// Product unitary of the whole circuit (or of a gate subsequence wrapped
/// in a [`Circuit`]), for unitarity and fusion-correctness checks.
pub fn dense_unitary(circuit: &Circuit) -> Result<DenseOperator, OracleError> {
    if circuit.n > MAX_UNITARY_QUBITS {
        return Err(OracleError::TooManyQubits {
            got: circuit.n,
            limit: MAX_UNITARY_QUBITS,
        });
    }
    let mut u = DenseOperator::identity(1usize << circuit.n);
    for gate in &circuit.ops {
        u = embed(gate, circuit.n).matmul(&u);
    }
    Ok(u)
}

/// `|0...0>` as a dense amplitude vector.
pub fn dense_zero_state(n: u32) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << n];
    v[0] = Complex64::new(1.0, 0.0);
    v
}
