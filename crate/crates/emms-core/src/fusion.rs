//! Gate fusion, operator partitioning, and block-wise state evolution.
//!
//! A circuit is first fused greedily into groups that each hold at most one
//! parameterized gate and touch each qubit position at most once. Instead
//! of expanding a group's operator to a full `2^n x 2^n` matrix, it is kept
//! split at a dividing point `n_bar`: the gates on qubits `0..n_bar` form
//! the high factor and the rest form the low factor, with the group
//! operator equal to their tensor product.
//!
//! The dividing point is chosen so the high factor has exactly one non-zero
//! per row (gates with denser rows - `H`, `RX`, `RY`, `SX`, `CRX`, `CRY`,
//! `CH` - are pushed into the low factor by lowering `n_bar`, never by
//! reordering gates). Evolution then walks the high factor's rows: output
//! block `i` is the low factor, scaled by the row's single value, applied
//! to input block `j`. Blocks are distributed round-robin over a pool of
//! processing elements; because each block's accumulation order is fixed,
//! the result is bit-identical for any pool size.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::circuit::Circuit;
use crate::coo::{CooError, CooMatrix, StateVector};
use crate::gates::{gate_matrix, GateKind, GateSpec};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum FusionError {
    #[error("high factor row {row} holds {nnz} non-zeros, expected exactly 1")]
    NotUnitRow { row: u64, nnz: usize },
    #[error("partition covers {part} qubits but the state has {state}")]
    QubitMismatch { part: u32, state: u32 },
    #[error(transparent)]
    Coo(#[from] CooError),
}

/// A fused run of gates covering disjoint qubit positions, identity-padded
/// so every position in `0..n` is owned by exactly one gate.
#[derive(Clone, Debug, PartialEq)]
pub struct FusedGroup {
    /// Gates sorted by position; uncovered positions carry explicit `i`.
    pub gates: Vec<GateSpec>,
    /// Number of parameterized gates in the group (at most 1).
    pub param_count: u32,
    /// Qubit count of the enclosing circuit.
    pub n: u32,
}

impl FusedGroup {
    /// Gates that were actually fused (identity padding excluded).
    pub fn real_gates(&self) -> impl Iterator<Item = &GateSpec> {
        self.gates.iter().filter(|g| g.kind != GateKind::I)
    }
}

/// Processing-element array shape: pool size and per-element memory depths
/// in 128-bit words. All three are powers of two.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PEConfig {
    pub pe_count: u64,
    pub ldm_depth: u64,
    pub tgbar_depth: u64,
}

#[derive(Debug, Error, PartialEq)]
#[error("{field} = {value} is not a power of two")]
pub struct PEConfigError {
    pub field: &'static str,
    pub value: u64,
}

impl PEConfig {
    pub fn new(pe_count: u64, ldm_depth: u64, tgbar_depth: u64) -> Result<Self, PEConfigError> {
        for (field, value) in [
            ("pe_count", pe_count),
            ("ldm_depth", ldm_depth),
            ("tgbar_depth", tgbar_depth),
        ] {
            if !value.is_power_of_two() {
                return Err(PEConfigError { field, value });
            }
        }
        Ok(Self {
            pe_count,
            ldm_depth,
            tgbar_depth,
        })
    }
}

impl Default for PEConfig {
    /// One worker with generous memories; behaviour-neutral because results
    /// do not depend on the pool size.
    fn default() -> Self {
        Self {
            pe_count: 1,
            ldm_depth: 1 << 16,
            tgbar_depth: 1 << 16,
        }
    }
}

/// A fused group's operator factored at dividing point `n_bar`.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition<S> {
    /// Qubits `0..n_bar` belong to the high factor.
    pub n_bar: u32,
    /// High factor, dimension `2^n_bar`, exactly one non-zero per row.
    pub g_bar: CooMatrix<S>,
    /// Low factor, dimension `2^(n - n_bar)`.
    pub g_low: CooMatrix<S>,
}

impl<S: Scalar> Partition<S> {
    pub fn n(&self) -> u32 {
        self.n_bar + self.g_low.dim().trailing_zeros()
    }
}

/// Greedy left-to-right fusion. A group closes when the next gate would
/// occupy an already-taken position or add a second parameterized gate;
/// open positions are then padded with identities.
pub fn fuse(circuit: &Circuit) -> Vec<FusedGroup> {
    let n = circuit.n;
    let mut groups = Vec::new();
    let mut gates: Vec<GateSpec> = Vec::new();
    let mut occupied: u64 = 0;
    let mut param_count = 0u32;

    let close = |gates: &mut Vec<GateSpec>, occupied: &mut u64, param_count: &mut u32,
                 groups: &mut Vec<FusedGroup>| {
        if gates.is_empty() {
            return;
        }
        let mut padded = std::mem::take(gates);
        for q in 0..n {
            if *occupied & (1u64 << q) == 0 {
                padded.push(GateSpec::single(GateKind::I, q));
            }
        }
        padded.sort_by_key(GateSpec::position);
        groups.push(FusedGroup {
            gates: padded,
            param_count: *param_count,
            n,
        });
        *occupied = 0;
        *param_count = 0;
    };

    for gate in &circuit.ops {
        let mut mask = 0u64;
        for &t in &gate.targets {
            mask |= 1u64 << t;
        }
        let conflict = occupied & mask != 0;
        let second_param = gate.kind.is_parameterized() && param_count == 1;
        if conflict || second_param {
            close(&mut gates, &mut occupied, &mut param_count, &mut groups);
        }
        occupied |= mask;
        param_count += u32::from(gate.kind.is_parameterized());
        gates.push(gate.clone());
    }
    close(&mut gates, &mut occupied, &mut param_count, &mut groups);
    groups
}

/// Splits a group at the largest admissible dividing point at or below the
/// hint (default `ceil(n/2)`). A dividing point is admissible when no gate
/// straddles it and every gate strictly below it is unit-row sparse; 0 is
/// always admissible and degenerates to a plain mat-vec with the low
/// factor.
pub fn partition<S: Scalar>(
    group: &FusedGroup,
    n_bar_hint: Option<u32>,
) -> Result<Partition<S>, FusionError> {
    let n = group.n;
    let start = n_bar_hint.unwrap_or(n.div_ceil(2)).min(n);
    let n_bar = (0..=start)
        .rev()
        .find(|&cut| admissible(group, cut))
        .expect("cut 0 is always admissible");

    let mut g_bar = CooMatrix::<S>::scalar_one();
    let mut g_low = CooMatrix::<S>::scalar_one();
    for gate in &group.gates {
        let m = gate_matrix::<S>(gate);
        if gate.position() < n_bar {
            g_bar = g_bar.tensor_product(&m)?;
        } else {
            g_low = g_low.tensor_product(&m)?;
        }
    }
    Ok(Partition { n_bar, g_bar, g_low })
}

fn admissible(group: &FusedGroup, cut: u32) -> bool {
    group.gates.iter().all(|g| {
        let lo = g.position();
        let hi = lo + g.span(); // exclusive
        let straddles = lo < cut && hi > cut;
        let below = hi <= cut;
        !straddles && (!below || g.kind.is_unit_row_sparse())
    })
}

/// Applies a partitioned group operator to a state, block by block.
///
/// For each row `i` of the high factor with single entry `(i, j, v)`,
/// output block `i` is `scale(g_low, v) * input block j`. Block rows are
/// dealt round-robin over `cfg.pe_count` workers; per-block arithmetic
/// order is fixed, so the result is identical for every pool size.
pub fn evolve_group<S: Scalar>(
    part: &Partition<S>,
    psi: &StateVector<S>,
    cfg: &PEConfig,
) -> Result<StateVector<S>, FusionError> {
    if part.n() != psi.n() {
        return Err(FusionError::QubitMismatch {
            part: part.n(),
            state: psi.n(),
        });
    }
    let rows = unit_rows(&part.g_bar)?;
    let block = part.g_low.dim() as usize;
    let mut out = StateVector::from_amps(psi.n(), vec![S::zero(); psi.len()])
        .expect("same length as input");

    // Block results are independent of which worker computes them, so the
    // OS thread count is capped by the host without changing the output.
    let host = std::thread::available_parallelism().map_or(1, usize::from).max(2);
    let workers = (cfg.pe_count.max(1) as usize).min(host);
    let input = psi.amps();
    let out_blocks: Vec<&mut [S]> = out.amps_mut().chunks_mut(block).collect();

    if workers == 1 || rows.len() == 1 {
        for (i, out_block) in out_blocks.into_iter().enumerate() {
            let (j, v) = rows[i];
            part.g_low
                .scale(v)
                .matvec_into(&input[j * block..(j + 1) * block], out_block);
        }
    } else {
        // Deal blocks round-robin; each worker owns disjoint output slices.
        let mut per_worker: Vec<Vec<(usize, &mut [S])>> = (0..workers).map(|_| Vec::new()).collect();
        for (i, ob) in out_blocks.into_iter().enumerate() {
            per_worker[i % workers].push((i, ob));
        }
        std::thread::scope(|scope| {
            let handles: Vec<_> = per_worker
                .into_iter()
                .map(|blocks| {
                    let rows = &rows;
                    let g_low = &part.g_low;
                    scope.spawn(move || {
                        for (i, out_block) in blocks {
                            let (j, v) = rows[i];
                            g_low
                                .scale(v)
                                .matvec_into(&input[j * block..(j + 1) * block], out_block);
                        }
                        crate::fixedpoint::saturation_seen()
                    })
                })
                .collect();
            for h in handles {
                let saturated = h.join().expect("worker panicked");
                crate::fixedpoint::merge_saturation(saturated);
            }
        });
    }
    Ok(out)
}

/// Extracts `(col, value)` per row, enforcing exactly one non-zero per row.
/// With that check passed, the sorted tuple list has tuple `k` on row `k`.
fn unit_rows<S: Scalar>(g_bar: &CooMatrix<S>) -> Result<Vec<(usize, S)>, FusionError> {
    let mut counts = vec![0usize; g_bar.dim() as usize];
    for t in g_bar.tuples() {
        counts[t.row as usize] += 1;
    }
    if let Some(row) = counts.iter().position(|&c| c != 1) {
        return Err(FusionError::NotUnitRow {
            row: row as u64,
            nnz: counts[row],
        });
    }
    Ok(g_bar
        .tuples()
        .iter()
        .map(|t| (t.col as usize, t.val))
        .collect())
}

/// Fuses and runs a whole circuit from `|0...0>`.
pub fn run_circuit<S: Scalar>(
    circuit: &Circuit,
    cfg: &PEConfig,
) -> Result<StateVector<S>, FusionError> {
    run_circuit_from(circuit, cfg, StateVector::zero_state(circuit.n), None)
}

/// Fuses and runs a circuit from an explicit initial state, optionally
/// overriding the dividing-point hint used for every group.
pub fn run_circuit_from<S: Scalar>(
    circuit: &Circuit,
    cfg: &PEConfig,
    initial: StateVector<S>,
    n_bar_hint: Option<u32>,
) -> Result<StateVector<S>, FusionError> {
    if initial.n() != circuit.n {
        return Err(FusionError::QubitMismatch {
            part: circuit.n,
            state: initial.n(),
        });
    }
    let mut psi = initial;
    for group in fuse(circuit) {
        let part = partition::<S>(&group, n_bar_hint)?;
        psi = evolve_group(&part, &psi, cfg)?;
    }
    Ok(psi)
}

/// Per-group summary of fusion and partitioning, for inspection tooling.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct GroupReport {
    pub index: usize,
    pub gates: Vec<String>,
    pub param_count: u32,
    pub n_bar: u32,
    pub nnz_g_bar: usize,
    pub nnz_g_low: usize,
    pub unit_row_ok: bool,
}

/// Fuses and partitions without evolving, reporting each group's shape.
pub fn fusion_report(
    circuit: &Circuit,
    n_bar_hint: Option<u32>,
) -> Result<Vec<GroupReport>, FusionError> {
    fuse(circuit)
        .iter()
        .enumerate()
        .map(|(index, group)| {
            let part = partition::<num_complex::Complex64>(group, n_bar_hint)?;
            Ok(GroupReport {
                index,
                gates: group.gates.iter().map(ToString::to_string).collect(),
                param_count: group.param_count,
                n_bar: part.n_bar,
                nnz_g_bar: part.g_bar.nnz(),
                nnz_g_low: part.g_low.nnz(),
                unit_row_ok: part.g_bar.is_unit_row_sparse(),
            })
        })
        .collect()
}

/// Qubit positions a group's non-identity gates occupy (for tests and
/// reporting).
pub fn occupied_positions(group: &FusedGroup) -> BTreeSet<u32> {
    group
        .real_gates()
        .flat_map(|g| g.targets.iter().copied())
        .collect()
}
