//! Closed-form cost models for the accelerator: operator-storage memory,
//! execution cycles, and FPGA resource usage, plus parameter sweeps that
//! emit CSV and JSON tables.
//!
//! Conventions shared by every model:
//!
//! - one COO word (two 32-bit indices plus a 64-bit complex value) is
//!   16 bytes and moves over the bus in one cycle;
//! - `N = 2^n` amplitudes, `N_bar = 2^n_bar` rows in the high factor;
//! - per-worker cycle terms use ceiling division (no fractional cycles).

use serde::Serialize;
use thiserror::Error;

use crate::fusion::PEConfig;

/// Bytes per stored COO tuple: 32-bit row, 32-bit col, 2 x 32-bit value.
pub const COO_WORD_BYTES: u64 = 16;

/// Largest qubit count the memory model covers.
pub const MAX_MEMORY_QUBITS: u32 = 32;
/// Cycle-model range (bounded by the 4 GB external memory of the reference
/// board: two 26-qubit state buffers already need 2 GB).
pub const MIN_CYCLE_QUBITS: u32 = 2;
pub const MAX_CYCLE_QUBITS: u32 = 26;

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("qubit count {0} outside {1}..={2}")]
    QubitRange(u32, u32, u32),
    #[error("dividing point {n_bar} outside 1..={n}")]
    DividingPoint { n_bar: u32, n: u32 },
    #[error("empty sweep range")]
    EmptyRange,
}

/// Storage comparison between the full fused operator (one tuple per row
/// at best, `N` tuples) and the factored form (`N_bar + N / N_bar` tuples).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MemoryReport {
    pub n: u32,
    pub n_bar: u32,
    pub traditional_bytes: u64,
    pub emms_bytes: u64,
    /// `traditional / emms`; exactly `2^(n_bar - 1)` on the even diagonal.
    pub efficiency_factor: f64,
}

pub fn memory_model(n: u32, n_bar: u32) -> Result<MemoryReport, CostError> {
    if n == 0 || n > MAX_MEMORY_QUBITS {
        return Err(CostError::QubitRange(n, 1, MAX_MEMORY_QUBITS));
    }
    if n_bar == 0 || n_bar > n {
        return Err(CostError::DividingPoint { n_bar, n });
    }
    let traditional_bytes = (1u64 << n) * COO_WORD_BYTES;
    let emms_bytes = ((1u64 << n_bar) + (1u64 << (n - n_bar))) * COO_WORD_BYTES;
    Ok(MemoryReport {
        n,
        n_bar,
        traditional_bytes,
        emms_bytes,
        efficiency_factor: traditional_bytes as f64 / emms_bytes as f64,
    })
}

/// Whether the whole state vector fits in the workers' local memories or
/// must stream through external memory every step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Resident,
    Streaming,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Resident => write!(f, "resident"),
            Regime::Streaming => write!(f, "streaming"),
        }
    }
}

/// Cycle-count breakdown for `m` group applications on `n` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CycleReport {
    pub regime: Regime,
    pub c_write: u64,
    pub c_tp: u64,
    pub c_mm: u64,
    pub c_read: u64,
    pub total: u64,
    pub io_fraction: f64,
}

/// Evaluates the cycle model.
///
/// The state is resident when `2^n < pe_count * ldm_depth` (strictly; at
/// equality the double-buffered state update no longer fits and every step
/// streams). Resident runs pay one write and one read of `N` words total;
/// streaming runs pay them on every one of the `m` steps. Each step also
/// costs `ceil((N_bar + N/N_bar) / P)` tensor-product cycles and
/// `ceil(N / P)` multiply cycles across `P` workers.
pub fn cycle_model(n: u32, m: u64, cfg: &PEConfig, n_bar: u32) -> Result<CycleReport, CostError> {
    if !(MIN_CYCLE_QUBITS..=MAX_CYCLE_QUBITS).contains(&n) {
        return Err(CostError::QubitRange(n, MIN_CYCLE_QUBITS, MAX_CYCLE_QUBITS));
    }
    if n_bar == 0 || n_bar > n {
        return Err(CostError::DividingPoint { n_bar, n });
    }
    let big_n = 1u64 << n;
    let n_bar_words = 1u64 << n_bar;
    let operator_words = n_bar_words + (big_n >> n_bar);
    let p = cfg.pe_count;
    let tp_step = operator_words.div_ceil(p);
    let mm_step = big_n.div_ceil(p);
    let resident = big_n < cfg.pe_count * cfg.ldm_depth;
    let (regime, c_write, c_read) = if resident {
        (Regime::Resident, big_n, big_n)
    } else {
        (Regime::Streaming, m * big_n, m * big_n)
    };
    let c_tp = m * tp_step;
    let c_mm = m * mm_step;
    let total = c_write + c_tp + c_mm + c_read;
    Ok(CycleReport {
        regime,
        c_write,
        c_tp,
        c_mm,
        c_read,
        total,
        io_fraction: (c_write + c_read) as f64 / total as f64,
    })
}

/// Tunable constants of the resource model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResourceParams {
    /// DSP blocks consumed by one 32-bit multiplier.
    pub dsp_per_multiplier: u64,
    /// Capacity of one block RAM in bits (36 Kb parts).
    pub bram_block_bits: u64,
}

impl Default for ResourceParams {
    fn default() -> Self {
        Self {
            dsp_per_multiplier: 4,
            bram_block_bits: 36 * 1024,
        }
    }
}

/// FPGA resource estimate for one accelerator configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResourceReport {
    pub bram_blocks: u64,
    pub dsp_count: u64,
    /// Capacity exponent of the pooled local memories: `log2(P * ldm_depth)`
    /// amplitudes. Only the local-data-memory constraint is modeled; the
    /// high-factor memory depth may bind earlier for extreme splits.
    pub max_resident_qubits: u32,
}

/// Estimates block-RAM and DSP usage: every worker carries eight
/// multipliers and three local memories of 128-bit words; one shared
/// memory holds the high factor.
pub fn resource_model(cfg: &PEConfig, params: &ResourceParams) -> ResourceReport {
    let blocks = |depth_words: u64| (depth_words * 128).div_ceil(params.bram_block_bits);
    ResourceReport {
        bram_blocks: blocks(cfg.tgbar_depth) + cfg.pe_count * 3 * blocks(cfg.ldm_depth),
        dsp_count: cfg.pe_count * 8 * params.dsp_per_multiplier,
        max_resident_qubits: (cfg.pe_count * cfg.ldm_depth).trailing_zeros(),
    }
}

/// The four reference accelerator configurations used for cycle sweeps:
/// 4 to 32 workers with paired local-memory depths (2^16 down to 2^10) and
/// a shared high-factor memory of 2^16 words.
pub fn reference_configs() -> Vec<PEConfig> {
    [(4u64, 1u64 << 16), (8, 1 << 14), (16, 1 << 12), (32, 1 << 10)]
        .into_iter()
        .map(|(pes, ldm)| PEConfig::new(pes, ldm, 1 << 16).expect("powers of two"))
        .collect()
}

/// A memory-sweep row: model inputs then report fields.
pub type MemoryRow = MemoryReport;

/// A cycle-sweep row: model inputs then report fields.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CycleRow {
    pub n: u32,
    pub n_bar: u32,
    pub m: u64,
    pub pe_count: u64,
    pub ldm_depth: u64,
    pub tgbar_depth: u64,
    pub regime: Regime,
    pub c_write: u64,
    pub c_tp: u64,
    pub c_mm: u64,
    pub c_read: u64,
    pub total: u64,
    pub io_fraction: f64,
}

/// A resource-sweep row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResourceRow {
    pub pe_count: u64,
    pub ldm_depth: u64,
    pub tgbar_depth: u64,
    pub bram_blocks: u64,
    pub dsp_count: u64,
    pub max_resident_qubits: u32,
}

/// How a sweep picks the dividing point for each `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NBarChoice {
    /// The balanced split `ceil(n/2)`.
    Diagonal,
    /// Every value `1..=n` (memory sweeps only).
    Grid,
    /// A fixed value, clamped to `n`.
    Fixed(u32),
}

impl NBarChoice {
    fn values(self, n: u32) -> Vec<u32> {
        match self {
            NBarChoice::Diagonal => vec![n.div_ceil(2)],
            NBarChoice::Grid => (1..=n).collect(),
            NBarChoice::Fixed(k) => vec![k.min(n)],
        }
    }
}

/// Memory sweep over a qubit range.
pub fn memory_sweep(
    n_range: std::ops::RangeInclusive<u32>,
    n_bar: NBarChoice,
) -> Result<Vec<MemoryRow>, CostError> {
    if n_range.is_empty() {
        return Err(CostError::EmptyRange);
    }
    let mut rows = Vec::new();
    for n in n_range {
        for nb in n_bar.values(n) {
            rows.push(memory_model(n, nb)?);
        }
    }
    Ok(rows)
}

/// Cycle sweep: Cartesian product of the qubit range and configurations.
pub fn cycle_sweep(
    n_range: std::ops::RangeInclusive<u32>,
    m: u64,
    configs: &[PEConfig],
    n_bar: NBarChoice,
) -> Result<Vec<CycleRow>, CostError> {
    if n_range.is_empty() || configs.is_empty() {
        return Err(CostError::EmptyRange);
    }
    let mut rows = Vec::new();
    for cfg in configs {
        for n in n_range.clone() {
            for nb in n_bar.values(n) {
                let r = cycle_model(n, m, cfg, nb)?;
                rows.push(CycleRow {
                    n,
                    n_bar: nb,
                    m,
                    pe_count: cfg.pe_count,
                    ldm_depth: cfg.ldm_depth,
                    tgbar_depth: cfg.tgbar_depth,
                    regime: r.regime,
                    c_write: r.c_write,
                    c_tp: r.c_tp,
                    c_mm: r.c_mm,
                    c_read: r.c_read,
                    total: r.total,
                    io_fraction: r.io_fraction,
                });
            }
        }
    }
    Ok(rows)
}

/// Resource sweep over a list of configurations.
pub fn resource_sweep(
    configs: &[PEConfig],
    params: &ResourceParams,
) -> Result<Vec<ResourceRow>, CostError> {
    if configs.is_empty() {
        return Err(CostError::EmptyRange);
    }
    Ok(configs
        .iter()
        .map(|cfg| {
            let r = resource_model(cfg, params);
            ResourceRow {
                pe_count: cfg.pe_count,
                ldm_depth: cfg.ldm_depth,
                tgbar_depth: cfg.tgbar_depth,
                bram_blocks: r.bram_blocks,
                dsp_count: r.dsp_count,
                max_resident_qubits: r.max_resident_qubits,
            }
        })
        .collect())
}
