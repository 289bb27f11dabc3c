//! The supported gate set, constructed directly in COO form.
//!
//! Single-qubit gates are 2x2, controlled gates are 4x4 and act on an
//! adjacent qubit pair with the control on the higher-significance
//! (lower-index) qubit. Larger matrices are never emitted; the evolution
//! engine composes everything else out of these via tensor products.
//!
//! Two classifications matter downstream:
//!
//! - [`is_sparse`]: false exactly for `{H, RX, RY, SX}`. Sparse gates are
//!   preferred for the high-qubit factor during partitioning.
//! - [`GateKind::is_unit_row_sparse`]: true when the matrix has exactly one
//!   non-zero per row for generic parameters. `CRX`, `CRY` and `CH` are
//!   sparse by the first classification but not unit-row, so they must stay
//!   in the low-qubit factor.

use std::f64::consts::FRAC_1_SQRT_2;

use thiserror::Error;

use crate::coo::{CooMatrix, CooTuple};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum GateError {
    #[error("unknown gate name '{0}'")]
    UnknownGate(String),
    #[error("gate {0} requires a parameter")]
    MissingParameter(&'static str),
    #[error("gate {0} takes no parameter")]
    UnexpectedParameter(&'static str),
    #[error("gate {kind} takes {expected} target(s), got {got}")]
    WrongTargetCount {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("controlled gate {0} must act on an adjacent pair with the control first: control = target - 1")]
    NotAdjacent(&'static str),
    #[error("gate {kind} touches qubit {target}, outside a {n}-qubit circuit")]
    TargetOutOfRange { kind: &'static str, target: u32, n: u32 },
}

/// Every gate the emulator accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    P,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rz,
    Crz,
    Crx,
    Cx,
    Cy,
    Cz,
    Cp,
    Cry,
    Ch,
    H,
    Sx,
    Rx,
    Ry,
    I,
}

impl GateKind {
    pub const ALL: [GateKind; 22] = [
        GateKind::P,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Rz,
        GateKind::Crz,
        GateKind::Crx,
        GateKind::Cx,
        GateKind::Cy,
        GateKind::Cz,
        GateKind::Cp,
        GateKind::Cry,
        GateKind::Ch,
        GateKind::H,
        GateKind::Sx,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::I,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::P => "p",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rz => "rz",
            GateKind::Crz => "crz",
            GateKind::Crx => "crx",
            GateKind::Cx => "cx",
            GateKind::Cy => "cy",
            GateKind::Cz => "cz",
            GateKind::Cp => "cp",
            GateKind::Cry => "cry",
            GateKind::Ch => "ch",
            GateKind::H => "h",
            GateKind::Sx => "sx",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::I => "i",
        }
    }

    pub fn parse(name: &str) -> Result<Self, GateError> {
        let lower = name.to_ascii_lowercase();
        GateKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == lower)
            .ok_or_else(|| GateError::UnknownGate(name.to_string()))
    }

    /// Whether the gate takes an angle argument.
    pub fn is_parameterized(self) -> bool {
        matches!(
            self,
            GateKind::P
                | GateKind::Rz
                | GateKind::Rx
                | GateKind::Ry
                | GateKind::Cp
                | GateKind::Crx
                | GateKind::Cry
                | GateKind::Crz
        )
    }

    /// Number of qubit positions the gate occupies (1 or 2).
    pub fn span(self) -> u32 {
        match self {
            GateKind::Crz
            | GateKind::Crx
            | GateKind::Cx
            | GateKind::Cy
            | GateKind::Cz
            | GateKind::Cp
            | GateKind::Cry
            | GateKind::Ch => 2,
            _ => 1,
        }
    }

    /// True when the matrix has exactly one non-zero per row regardless of
    /// parameter value (structural property; a parameter may zero out extra
    /// entries, but never introduces new ones).
    pub fn is_unit_row_sparse(self) -> bool {
        !matches!(
            self,
            GateKind::H
                | GateKind::Rx
                | GateKind::Ry
                | GateKind::Sx
                | GateKind::Crx
                | GateKind::Cry
                | GateKind::Ch
        )
    }
}

impl std::fmt::Display for GateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Grouping classification: dense gates are `{H, RX, RY, SX}`, everything
/// else counts as sparse and is preferred for the high-qubit factor.
pub fn is_sparse(kind: GateKind) -> bool {
    !matches!(
        kind,
        GateKind::H | GateKind::Rx | GateKind::Ry | GateKind::Sx
    )
}

/// A gate applied at concrete qubit positions.
///
/// `targets` holds one index for single-qubit gates and `[control, target]`
/// for controlled gates, where `target == control + 1` (qubit 0 is the most
/// significant bit of the state index, so the control is the
/// higher-significance neighbor).
#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub param: Option<f64>,
    pub targets: Vec<u32>,
}

impl GateSpec {
    pub fn new(kind: GateKind, targets: Vec<u32>, param: Option<f64>) -> Result<Self, GateError> {
        if kind.is_parameterized() && param.is_none() {
            return Err(GateError::MissingParameter(kind.name()));
        }
        if !kind.is_parameterized() && param.is_some() {
            return Err(GateError::UnexpectedParameter(kind.name()));
        }
        let expected = kind.span() as usize;
        if targets.len() != expected {
            return Err(GateError::WrongTargetCount {
                kind: kind.name(),
                expected,
                got: targets.len(),
            });
        }
        if expected == 2 && targets[1] != targets[0] + 1 {
            return Err(GateError::NotAdjacent(kind.name()));
        }
        Ok(Self {
            kind,
            param,
            targets,
        })
    }

    pub fn single(kind: GateKind, qubit: u32) -> Self {
        Self::new(kind, vec![qubit], None).expect("valid single-qubit gate")
    }

    pub fn single_param(kind: GateKind, qubit: u32, param: f64) -> Self {
        Self::new(kind, vec![qubit], Some(param)).expect("valid parameterized gate")
    }

    pub fn controlled(kind: GateKind, control: u32, param: Option<f64>) -> Self {
        Self::new(kind, vec![control, control + 1], param).expect("valid controlled gate")
    }

    /// Lowest qubit position the gate touches.
    pub fn position(&self) -> u32 {
        self.targets[0]
    }

    pub fn span(&self) -> u32 {
        self.kind.span()
    }
}

impl std::fmt::Display for GateSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.kind)?;
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        if let Some(p) = self.param {
            write!(f, " {p}")?;
        }
        Ok(())
    }
}

/// Raw `(row, col, re, im)` entries of a gate matrix before scalar-mode
/// conversion. Entries that are exactly zero for the given parameter are
/// produced here and filtered during conversion.
fn entries(kind: GateKind, param: Option<f64>) -> Vec<(u32, u32, f64, f64)> {
    const Q: f64 = FRAC_1_SQRT_2;
    const HALF: f64 = 0.5;
    let theta = param.unwrap_or(0.0);
    // a/b for phase angles, c/d for half-angle rotations.
    let (a, b) = (theta.cos(), theta.sin());
    let (c, d) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    match kind {
        GateKind::I => vec![(0, 0, 1.0, 0.0), (1, 1, 1.0, 0.0)],
        GateKind::P => vec![(0, 0, 1.0, 0.0), (1, 1, a, b)],
        GateKind::X => vec![(0, 1, 1.0, 0.0), (1, 0, 1.0, 0.0)],
        GateKind::Y => vec![(0, 1, 0.0, -1.0), (1, 0, 0.0, 1.0)],
        GateKind::Z => vec![(0, 0, 1.0, 0.0), (1, 1, -1.0, 0.0)],
        GateKind::S => vec![(0, 0, 1.0, 0.0), (1, 1, 0.0, 1.0)],
        GateKind::Sdg => vec![(0, 0, 1.0, 0.0), (1, 1, 0.0, -1.0)],
        GateKind::T => vec![(0, 0, 1.0, 0.0), (1, 1, Q, Q)],
        GateKind::Tdg => vec![(0, 0, 1.0, 0.0), (1, 1, Q, -Q)],
        GateKind::Rz => vec![(0, 0, c, -d), (1, 1, c, d)],
        GateKind::H => vec![(0, 0, Q, 0.0), (0, 1, Q, 0.0), (1, 0, Q, 0.0), (1, 1, -Q, 0.0)],
        GateKind::Sx => vec![
            (0, 0, HALF, HALF),
            (0, 1, HALF, -HALF),
            (1, 0, HALF, -HALF),
            (1, 1, HALF, HALF),
        ],
        GateKind::Rx => vec![(0, 0, c, 0.0), (0, 1, 0.0, -d), (1, 0, 0.0, -d), (1, 1, c, 0.0)],
        GateKind::Ry => vec![(0, 0, c, 0.0), (0, 1, -d, 0.0), (1, 0, d, 0.0), (1, 1, c, 0.0)],
        GateKind::Cx => vec![
            (0, 0, 1.0, 0.0),
            (1, 1, 1.0, 0.0),
            (2, 3, 1.0, 0.0),
            (3, 2, 1.0, 0.0),
        ],
        GateKind::Cy => vec![
            (0, 0, 1.0, 0.0),
            (1, 1, 1.0, 0.0),
            (2, 3, 0.0, -1.0),
            (3, 2, 0.0, 1.0),
        ],
        GateKind::Cz => vec![
            (0, 0, 1.0, 0.0),
            (1, 1, 1.0, 0.0),
            (2, 2, 1.0, 0.0),
            (3, 3, -1.0, 0.0),
        ],
        GateKind::Cp => vec![
            (0, 0, 1.0, 0.0),
            (1, 1, 1.0, 0.0),
            (2, 2, 1.0, 0.0),
            (3, 3, a, b),
        ],
        GateKind::Crz => vec![
            (0, 0, 1.0, 0.0),
            (1, 1, 1.0, 0.0),
            (2, 2, c, -d),
            (3, 3, c, d),
        ],
        GateKind::Crx => vec![
            (0, 0, 1.0, 0.0),
            (1, 1, 1.0, 0.0),
            (2, 2, c, 0.0),
            (2, 3, 0.0, -d),
            (3, 2, 0.0, -d),
            (3, 3, c, 0.0),
        ],
        GateKind::Cry => vec![
            (0, 0, 1.0, 0.0),
            (1, 1, 1.0, 0.0),
            (2, 2, c, 0.0),
            (2, 3, -d, 0.0),
            (3, 2, d, 0.0),
            (3, 3, c, 0.0),
        ],
        GateKind::Ch => vec![
            (0, 0, 1.0, 0.0),
            (1, 1, 1.0, 0.0),
            (2, 2, Q, 0.0),
            (2, 3, Q, 0.0),
            (3, 2, Q, 0.0),
            (3, 3, -Q, 0.0),
        ],
    }
}

/// Builds the COO matrix of a gate in the requested scalar mode: dimension
/// 2 for single-qubit gates, 4 for controlled gates. Entries that convert
/// to zero (e.g. `sin 0` terms) are dropped.
pub fn gate_matrix<S: Scalar>(spec: &GateSpec) -> CooMatrix<S> {
    let dim = 1u64 << spec.kind.span();
    let tuples = entries(spec.kind, spec.param)
        .into_iter()
        .map(|(r, c, re, im)| CooTuple::new(r, c, S::from_complex(re, im)))
        .filter(|t| !t.val.is_zero())
        .collect();
    CooMatrix::new(dim, tuples).expect("gate tables are sorted and in bounds")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::FixedComplex;
    use num_complex::Complex64;

    #[allow(clippy::needless_range_loop)]
    fn unitarity_defect(m: &CooMatrix<Complex64>) -> f64 {
        let d = m.to_dense();
        let n = d.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += d[i][k] * d[j][k].conj();
                }
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - Complex64::new(want, 0.0)).norm());
            }
        }
        worst
    }

    fn spec_for(kind: GateKind, param: f64) -> GateSpec {
        let p = kind.is_parameterized().then_some(param);
        if kind.span() == 2 {
            GateSpec::controlled(kind, 0, p)
        } else {
            GateSpec::new(kind, vec![0], p).unwrap()
        }
    }

    #[test]
    fn literal_table_entries() {
        let x = gate_matrix::<Complex64>(&GateSpec::single(GateKind::X, 0));
        assert_eq!(
            x.tuples(),
            &[
                CooTuple::new(0, 1, Complex64::new(1.0, 0.0)),
                CooTuple::new(1, 0, Complex64::new(1.0, 0.0)),
            ]
        );

        let theta = 0.7f64;
        let (c, d) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let rz = gate_matrix::<Complex64>(&GateSpec::single_param(GateKind::Rz, 0, theta));
        assert_eq!(
            rz.tuples(),
            &[
                CooTuple::new(0, 0, Complex64::new(c, -d)),
                CooTuple::new(1, 1, Complex64::new(c, d)),
            ]
        );

        let q = FRAC_1_SQRT_2;
        let h = gate_matrix::<Complex64>(&GateSpec::single(GateKind::H, 0));
        assert_eq!(h.nnz(), 4);
        assert_eq!(h.tuples()[3], CooTuple::new(1, 1, Complex64::new(-q, 0.0)));

        let t = gate_matrix::<Complex64>(&GateSpec::single(GateKind::T, 0));
        assert_eq!(t.tuples()[1], CooTuple::new(1, 1, Complex64::new(q, q)));
        let tdg = gate_matrix::<Complex64>(&GateSpec::single(GateKind::Tdg, 0));
        assert_eq!(tdg.tuples()[1], CooTuple::new(1, 1, Complex64::new(q, -q)));

        let cx = gate_matrix::<Complex64>(&GateSpec::controlled(GateKind::Cx, 0, None));
        assert_eq!(cx.dim(), 4);
        assert_eq!(cx.tuples()[2], CooTuple::new(2, 3, Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn rz_zero_is_identity() {
        let rz0 = gate_matrix::<Complex64>(&GateSpec::single_param(GateKind::Rz, 0, 0.0));
        assert_eq!(rz0, CooMatrix::identity(2));
    }

    #[test]
    fn all_gates_unitary_in_both_modes() {
        let params = [0.0, 0.3, 1.0, std::f64::consts::PI, 5.7, -2.2];
        for kind in GateKind::ALL {
            for p in params {
                let spec = spec_for(kind, p);
                let float = gate_matrix::<Complex64>(&spec);
                assert!(
                    unitarity_defect(&float) < 1e-12,
                    "{kind} not unitary in float mode"
                );
                let fixed = gate_matrix::<FixedComplex>(&spec);
                let decoded: CooMatrix<Complex64> =
                    CooMatrix::from_dense(&fixed.to_dense()).unwrap();
                assert!(
                    unitarity_defect(&decoded) < 2f64.powi(-26),
                    "{kind} not unitary in fixed mode"
                );
                if !kind.is_parameterized() {
                    break;
                }
            }
        }
    }

    #[test]
    fn fixed_matches_float_within_grid_resolution() {
        for kind in GateKind::ALL {
            let spec = spec_for(kind, 1.234);
            let float = gate_matrix::<Complex64>(&spec).to_dense();
            let fixed = gate_matrix::<FixedComplex>(&spec).to_dense();
            for (fr, xr) in float.iter().zip(&fixed) {
                for (f, x) in fr.iter().zip(xr) {
                    assert!((f.re - x.re).abs() <= 2f64.powi(-30));
                    assert!((f.im - x.im).abs() <= 2f64.powi(-30));
                }
            }
        }
    }

    #[test]
    fn sparse_classification_is_exact() {
        for kind in GateKind::ALL {
            let expect = !matches!(
                kind,
                GateKind::H | GateKind::Rx | GateKind::Ry | GateKind::Sx
            );
            assert_eq!(is_sparse(kind), expect, "{kind}");
        }
        assert!(!is_sparse(GateKind::H));
        assert!(is_sparse(GateKind::Cx));
        assert!(is_sparse(GateKind::I));
    }

    #[test]
    fn unit_row_classification_matches_matrices() {
        // The structural flag must agree with the actual matrix at a generic
        // parameter value.
        for kind in GateKind::ALL {
            let spec = spec_for(kind, 0.913);
            let m = gate_matrix::<Complex64>(&spec);
            assert_eq!(
                m.is_unit_row_sparse(),
                kind.is_unit_row_sparse(),
                "{kind} structural unit-row flag disagrees with matrix"
            );
        }
    }

    #[test]
    fn sparse_single_qubit_gates_have_one_nnz_per_row_and_col() {
        for kind in GateKind::ALL {
            if !is_sparse(kind) || !kind.is_unit_row_sparse() {
                continue;
            }
            let m = gate_matrix::<Complex64>(&spec_for(kind, 0.913));
            let dim = m.dim() as usize;
            let mut row_counts = vec![0u32; dim];
            let mut col_counts = vec![0u32; dim];
            for t in m.tuples() {
                row_counts[t.row as usize] += 1;
                col_counts[t.col as usize] += 1;
            }
            assert!(row_counts.iter().all(|&c| c == 1), "{kind}");
            assert!(col_counts.iter().all(|&c| c == 1), "{kind}");
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn rotation_inverse_property() {
        let parameterized: Vec<GateKind> = GateKind::ALL
            .into_iter()
            .filter(|k| k.is_parameterized())
            .collect();
        let mut seed = 0x1357u64;
        for _ in 0..20 {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let theta = (seed >> 11) as f64 / (1u64 << 53) as f64 * 12.0 - 6.0;
            for &kind in &parameterized {
                let spec = |t: f64| {
                    if kind.span() == 2 {
                        GateSpec::controlled(kind, 0, Some(t))
                    } else {
                        GateSpec::single_param(kind, 0, t)
                    }
                };
                let df = gate_matrix::<Complex64>(&spec(theta)).to_dense();
                let db = gate_matrix::<Complex64>(&spec(-theta)).to_dense();
                // Dense product must be the identity.
                let dim = df.len();
                for i in 0..dim {
                    for j in 0..dim {
                        let acc: Complex64 = (0..dim).map(|k| df[i][k] * db[k][j]).sum();
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!(
                            (acc - Complex64::new(want, 0.0)).norm() < 1e-12,
                            "{kind} at theta {theta}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn spec_validation_errors() {
        assert_eq!(
            GateKind::parse("bogus").unwrap_err(),
            GateError::UnknownGate("bogus".into())
        );
        assert_eq!(GateKind::parse("CX").unwrap(), GateKind::Cx);
        assert_eq!(
            GateSpec::new(GateKind::Rz, vec![0], None).unwrap_err(),
            GateError::MissingParameter("rz")
        );
        assert_eq!(
            GateSpec::new(GateKind::X, vec![0], Some(1.0)).unwrap_err(),
            GateError::UnexpectedParameter("x")
        );
        assert_eq!(
            GateSpec::new(GateKind::Cx, vec![0, 2], None).unwrap_err(),
            GateError::NotAdjacent("cx")
        );
        assert_eq!(
            GateSpec::new(GateKind::Cx, vec![1, 0], None).unwrap_err(),
            GateError::NotAdjacent("cx")
        );
        assert!(matches!(
            GateSpec::new(GateKind::Cx, vec![0], None).unwrap_err(),
            GateError::WrongTargetCount { .. }
        ));
    }
}
