//! Coordinate-format sparse matrices and the two core kernels: tensor
//! (Kronecker) product and operator-state multiplication.
//!
//! Only non-zero entries are stored, each as a `(row, col, value)` tuple.
//! Tuples are kept sorted row-major with no duplicate coordinates, which
//! pins the accumulation order of the mat-vec kernel: within each output
//! row, contributions are added in ascending column order. In fixed mode
//! that makes every result bit-reproducible.

use num_complex::Complex64;
use thiserror::Error;

use crate::scalar::Scalar;

/// Matrix dimensions above this are rejected; indices are 32-bit.
const MAX_DIM: u64 = 1 << 32;

#[derive(Debug, Error, PartialEq)]
pub enum CooError {
    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(u64),
    #[error("tuple index ({row}, {col}) outside a {dim} x {dim} matrix")]
    IndexOutOfBounds { row: u32, col: u32, dim: u64 },
    #[error("tuples not sorted row-major or duplicate coordinates at position {0}")]
    BadOrder(usize),
    #[error("explicit zero value stored at ({0}, {1})")]
    ZeroValue(u32, u32),
    #[error("tensor product dimension {0} * {1} exceeds 2^32")]
    DimensionOverflow(u64, u64),
    #[error("operator dimension {dim} does not match state length {len}")]
    ShapeMismatch { dim: u64, len: usize },
    #[error("dense input is not square: {rows} rows x {cols} cols")]
    NotSquare { rows: usize, cols: usize },
}

/// One non-zero element of a sparse operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CooTuple<S> {
    pub row: u32,
    pub col: u32,
    pub val: S,
}

impl<S> CooTuple<S> {
    pub fn new(row: u32, col: u32, val: S) -> Self {
        Self { row, col, val }
    }
}

/// Sparse square matrix of power-of-two dimension in coordinate format.
#[derive(Clone, Debug, PartialEq)]
pub struct CooMatrix<S> {
    dim: u64,
    tuples: Vec<CooTuple<S>>,
}

impl<S: Scalar> CooMatrix<S> {
    /// Builds a matrix from row-major-sorted tuples, validating every
    /// invariant (power-of-two dimension, in-bounds indices, strict order,
    /// no stored zeros).
    pub fn new(dim: u64, tuples: Vec<CooTuple<S>>) -> Result<Self, CooError> {
        if dim == 0 || dim > MAX_DIM || !dim.is_power_of_two() {
            return Err(CooError::NotPowerOfTwo(dim));
        }
        for (k, t) in tuples.iter().enumerate() {
            if u64::from(t.row) >= dim || u64::from(t.col) >= dim {
                return Err(CooError::IndexOutOfBounds {
                    row: t.row,
                    col: t.col,
                    dim,
                });
            }
            if t.val.is_zero() {
                return Err(CooError::ZeroValue(t.row, t.col));
            }
            if k > 0 {
                let prev = &tuples[k - 1];
                if (t.row, t.col) <= (prev.row, prev.col) {
                    return Err(CooError::BadOrder(k));
                }
            }
        }
        Ok(Self { dim, tuples })
    }

    /// Builds from tuples in any order, merging duplicate coordinates by
    /// summation and dropping entries that cancel to zero.
    pub fn from_unsorted(dim: u64, mut tuples: Vec<CooTuple<S>>) -> Result<Self, CooError> {
        tuples.sort_unstable_by_key(|t| (t.row, t.col));
        let mut merged: Vec<CooTuple<S>> = Vec::with_capacity(tuples.len());
        for t in tuples {
            match merged.last_mut() {
                Some(last) if (last.row, last.col) == (t.row, t.col) => {
                    last.val = last.val.add(t.val);
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.val.is_zero());
        Self::new(dim, merged)
    }

    pub fn identity(dim: u64) -> Self {
        let tuples = (0..dim)
            .map(|i| CooTuple::new(i as u32, i as u32, S::one()))
            .collect();
        Self::new(dim, tuples).expect("identity is always valid")
    }

    /// The 1x1 identity, the neutral element of the tensor product.
    pub fn scalar_one() -> Self {
        Self::identity(1)
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.tuples.len()
    }

    pub fn tuples(&self) -> &[CooTuple<S>] {
        &self.tuples
    }

    /// True when every row holds exactly one non-zero entry.
    pub fn is_unit_row_sparse(&self) -> bool {
        if self.tuples.len() as u64 != self.dim {
            return false;
        }
        // Sorted row-major, so rows must read 0, 1, 2, ...
        self.tuples
            .iter()
            .enumerate()
            .all(|(k, t)| u64::from(t.row) == k as u64)
    }

    /// Kronecker product `self (x) rhs`.
    ///
    /// Each pair of non-zeros `(i, j, g)` and `(k, l, h)` contributes
    /// `(i * |rhs| + k, j * |rhs| + l, g * h)`; the result is re-sorted
    /// row-major. `nnz` multiplies exactly unless a fixed-mode product
    /// rounds to zero, in which case the entry is dropped.
    pub fn tensor_product(&self, rhs: &Self) -> Result<Self, CooError> {
        let dim = self
            .dim
            .checked_mul(rhs.dim)
            .filter(|&d| d <= MAX_DIM)
            .ok_or(CooError::DimensionOverflow(self.dim, rhs.dim))?;
        let mut out = Vec::with_capacity(self.tuples.len() * rhs.tuples.len());
        let rd = rhs.dim as u32;
        for g in &self.tuples {
            for h in &rhs.tuples {
                out.push(CooTuple::new(
                    g.row * rd + h.row,
                    g.col * rd + h.col,
                    g.val.mul(h.val),
                ));
            }
        }
        Self::from_unsorted(dim, out)
    }

    /// Multiplies every stored value by `c`, dropping entries that round to
    /// zero in fixed mode.
    pub fn scale(&self, c: S) -> Self {
        let tuples = self
            .tuples
            .iter()
            .map(|t| CooTuple::new(t.row, t.col, c.mul(t.val)))
            .filter(|t| !t.val.is_zero())
            .collect();
        Self {
            dim: self.dim,
            tuples,
        }
    }

    /// Operator-state multiplication: `res_i = sum_j U_ij * psi_j`.
    ///
    /// Iterating the sorted tuple list accumulates each output row in
    /// ascending column order, so repeated runs round identically.
    pub fn matvec(&self, psi: &StateVector<S>) -> Result<StateVector<S>, CooError> {
        if self.dim != psi.amps.len() as u64 {
            return Err(CooError::ShapeMismatch {
                dim: self.dim,
                len: psi.amps.len(),
            });
        }
        let mut out = vec![S::zero(); psi.amps.len()];
        self.matvec_into(&psi.amps, &mut out);
        Ok(StateVector {
            n: psi.n,
            amps: out,
        })
    }

    /// Mat-vec on raw slices; `out` must be zeroed and the same length as
    /// `input`, both of length `dim`.
    pub(crate) fn matvec_into(&self, input: &[S], out: &mut [S]) {
        debug_assert_eq!(input.len() as u64, self.dim);
        debug_assert_eq!(out.len(), input.len());
        for t in &self.tuples {
            let acc = &mut out[t.row as usize];
            *acc = acc.add(t.val.mul(input[t.col as usize]));
        }
    }

    /// Converts a dense square matrix into COO, keeping entries that remain
    /// non-zero after conversion to the scalar mode (exact zero test, no
    /// epsilon dropping).
    pub fn from_dense(dense: &[Vec<Complex64>]) -> Result<Self, CooError> {
        let rows = dense.len();
        if dense.iter().any(|r| r.len() != rows) {
            return Err(CooError::NotSquare {
                rows,
                cols: dense.iter().map(Vec::len).max().unwrap_or(0),
            });
        }
        let mut tuples = Vec::new();
        for (i, row) in dense.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let val = S::from_complex(v.re, v.im);
                if !val.is_zero() {
                    tuples.push(CooTuple::new(i as u32, j as u32, val));
                }
            }
        }
        Self::new(rows as u64, tuples)
    }

    /// Expands to a dense matrix of `Complex64` (decoding in fixed mode).
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.dim as usize;
        let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for t in &self.tuples {
            out[t.row as usize][t.col as usize] = t.val.to_complex();
        }
        out
    }
}

/// Dense vector of `2^n` amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<S> {
    n: u32,
    amps: Vec<S>,
}

impl<S: Scalar> StateVector<S> {
    /// The all-zeros computational basis state: amplitude 1 at index 0.
    pub fn zero_state(n: u32) -> Self {
        let mut amps = vec![S::zero(); 1usize << n];
        amps[0] = S::one();
        Self { n, amps }
    }

    pub fn from_amps(n: u32, amps: Vec<S>) -> Result<Self, CooError> {
        if amps.len() != 1usize << n {
            return Err(CooError::ShapeMismatch {
                dim: 1u64 << n,
                len: amps.len(),
            });
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amps(&self) -> &[S] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [S] {
        &mut self.amps
    }

    pub fn to_complex_vec(&self) -> Vec<Complex64> {
        self.amps.iter().map(|a| a.to_complex()).collect()
    }

    /// Sum of squared amplitude magnitudes, evaluated in f64.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.to_complex().norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixedpoint::FixedComplex;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mat(dim: u64, entries: &[(u32, u32, f64, f64)]) -> CooMatrix<Complex64> {
        let tuples = entries
            .iter()
            .map(|&(r, cl, re, im)| CooTuple::new(r, cl, c(re, im)))
            .collect();
        CooMatrix::new(dim, tuples).unwrap()
    }

    /// Dense Kronecker oracle, independent of the COO path.
    fn dense_kron(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let (na, nb) = (a.len(), b.len());
        let n = na * nb;
        let mut out = vec![vec![c(0.0, 0.0); n]; n];
        for i in 0..na {
            for j in 0..na {
                for k in 0..nb {
                    for l in 0..nb {
                        out[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        out
    }

    #[test]
    fn constructor_enforces_invariants() {
        assert_eq!(
            CooMatrix::<Complex64>::new(3, vec![]).unwrap_err(),
            CooError::NotPowerOfTwo(3)
        );
        let dup = vec![
            CooTuple::new(0, 0, c(1.0, 0.0)),
            CooTuple::new(0, 0, c(2.0, 0.0)),
        ];
        assert_eq!(
            CooMatrix::new(2, dup).unwrap_err(),
            CooError::BadOrder(1)
        );
        assert!(matches!(
            CooMatrix::new(2, vec![CooTuple::new(0, 5, c(1.0, 0.0))]).unwrap_err(),
            CooError::IndexOutOfBounds { .. }
        ));
        assert_eq!(
            CooMatrix::new(2, vec![CooTuple::new(0, 0, c(0.0, 0.0))]).unwrap_err(),
            CooError::ZeroValue(0, 0)
        );
    }

    #[test]
    fn kron_z_y_worked_example() {
        let z = mat(2, &[(0, 0, 1.0, 0.0), (1, 1, -1.0, 0.0)]);
        let y = mat(2, &[(0, 1, 0.0, -1.0), (1, 0, 0.0, 1.0)]);
        let zy = z.tensor_product(&y).unwrap();
        let expect = mat(
            4,
            &[
                (0, 1, 0.0, -1.0),
                (1, 0, 0.0, 1.0),
                (2, 3, 0.0, 1.0),
                (3, 2, 0.0, -1.0),
            ],
        );
        assert_eq!(zy, expect);
    }

    #[test]
    fn kron_identity_block_structure() {
        let g = mat(2, &[(0, 1, 0.5, 0.0), (1, 0, 0.0, -0.5)]);
        let i2 = CooMatrix::<Complex64>::identity(2);
        let ig = i2.tensor_product(&g).unwrap();
        assert_eq!(ig.dim(), 4);
        assert_eq!(ig.nnz(), 4);
        assert_eq!(
            i2.tensor_product(&i2).unwrap(),
            CooMatrix::<Complex64>::identity(4)
        );
        // Dense cross-check of the block layout.
        assert_eq!(ig.to_dense(), dense_kron(&i2.to_dense(), &g.to_dense()));
    }

    #[test]
    fn kron_matches_dense_oracle_on_random_matrices() {
        let mut rng = SplitMix::new(0x5eed);
        for _ in 0..200 {
            let da = 1u64 << (rng.next() % 4);
            let db = 1u64 << (rng.next() % 4);
            let a = random_mat(&mut rng, da);
            let b = random_mat(&mut rng, db);
            let got = a.tensor_product(&b).unwrap().to_dense();
            let want = dense_kron(&a.to_dense(), &b.to_dense());
            for (gr, wr) in got.iter().zip(&want) {
                for (g, w) in gr.iter().zip(wr) {
                    assert!((g - w).norm() < 1e-12);
                }
            }
            assert_eq!(
                a.tensor_product(&b).unwrap().nnz(),
                a.nnz() * b.nnz(),
                "nnz must multiply"
            );
        }
    }

    #[test]
    fn kron_is_associative_up_to_ordering() {
        let mut rng = SplitMix::new(42);
        for _ in 0..50 {
            let a = random_mat(&mut rng, 2);
            let b = random_mat(&mut rng, 4);
            let d = random_mat(&mut rng, 2);
            let left = a.tensor_product(&b).unwrap().tensor_product(&d).unwrap();
            let right = a.tensor_product(&b.tensor_product(&d).unwrap()).unwrap();
            // Same sparsity structure; values agree up to the float
            // rounding of the two association orders.
            assert_eq!(left.dim(), right.dim());
            assert_eq!(left.nnz(), right.nnz());
            for (l, r) in left.tuples().iter().zip(right.tuples()) {
                assert_eq!((l.row, l.col), (r.row, r.col));
                assert!((l.val - r.val).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn kron_rejects_dimension_overflow() {
        let a = CooMatrix::<Complex64>::new(1 << 17, vec![]).unwrap();
        let b = CooMatrix::<Complex64>::new(1 << 16, vec![]).unwrap();
        assert_eq!(
            a.tensor_product(&b).unwrap_err(),
            CooError::DimensionOverflow(1 << 17, 1 << 16)
        );
        // 2^16 x 2^16 = 2^32 is still representable.
        let c = CooMatrix::<Complex64>::new(1 << 16, vec![]).unwrap();
        assert_eq!(c.tensor_product(&c).unwrap().dim(), 1 << 32);
    }

    #[test]
    fn kron_preserves_unit_row_sparsity() {
        let x = mat(2, &[(0, 1, 1.0, 0.0), (1, 0, 1.0, 0.0)]);
        let z = mat(2, &[(0, 0, 1.0, 0.0), (1, 1, -1.0, 0.0)]);
        let xz = x.tensor_product(&z).unwrap();
        assert!(x.is_unit_row_sparse());
        assert!(z.is_unit_row_sparse());
        assert!(xz.is_unit_row_sparse());
        let h = mat(
            2,
            &[
                (0, 0, 0.7, 0.0),
                (0, 1, 0.7, 0.0),
                (1, 0, 0.7, 0.0),
                (1, 1, -0.7, 0.0),
            ],
        );
        assert!(!h.is_unit_row_sparse());
        assert!(!x.tensor_product(&h).unwrap().is_unit_row_sparse());
    }

    #[test]
    fn matvec_bell_style_worked_example() {
        let z = mat(2, &[(0, 0, 1.0, 0.0), (1, 1, -1.0, 0.0)]);
        let y = mat(2, &[(0, 1, 0.0, -1.0), (1, 0, 0.0, 1.0)]);
        let zy = z.tensor_product(&y).unwrap();
        let q = std::f64::consts::FRAC_1_SQRT_2;
        let psi =
            StateVector::from_amps(2, vec![c(q, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(q, 0.0)])
                .unwrap();
        let out = zy.matvec(&psi).unwrap();
        let want = [c(0.0, 0.0), c(0.0, q), c(0.0, q), c(0.0, 0.0)];
        for (a, w) in out.amps().iter().zip(&want) {
            assert!((a - w).norm() < 1e-15);
        }
    }

    #[test]
    fn matvec_identity_and_swap() {
        let mut rng = SplitMix::new(7);
        let psi = random_state(&mut rng, 3);
        let id = CooMatrix::<Complex64>::identity(8);
        assert_eq!(id.matvec(&psi).unwrap(), psi);

        let x = mat(2, &[(0, 1, 1.0, 0.0), (1, 0, 1.0, 0.0)]);
        let ab = StateVector::from_amps(1, vec![c(0.3, 0.1), c(-0.2, 0.9)]).unwrap();
        let swapped = x.matvec(&ab).unwrap();
        assert_eq!(swapped.amps()[0], ab.amps()[1]);
        assert_eq!(swapped.amps()[1], ab.amps()[0]);
    }

    #[test]
    fn matvec_rejects_shape_mismatch() {
        let x = mat(2, &[(0, 1, 1.0, 0.0), (1, 0, 1.0, 0.0)]);
        let psi = StateVector::<Complex64>::zero_state(2);
        assert!(matches!(
            x.matvec(&psi).unwrap_err(),
            CooError::ShapeMismatch { .. }
        ));
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn matvec_agrees_with_dense_up_to_1024() {
        let mut rng = SplitMix::new(99);
        for nbits in [1u32, 2, 5, 10] {
            let dim = 1u64 << nbits;
            let m = random_mat(&mut rng, dim);
            let psi = random_state(&mut rng, nbits);
            let got = m.matvec(&psi).unwrap();
            // Dense oracle.
            let dense = m.to_dense();
            for i in 0..dim as usize {
                let mut acc = c(0.0, 0.0);
                for j in 0..dim as usize {
                    acc += dense[i][j] * psi.amps()[j];
                }
                assert!((got.amps()[i] - acc).norm() < 1e-10);
            }
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn fixed_mode_matvec_error_bound() {
        // Per-amplitude error <= nnz-per-row * 2^-29 against the f64 oracle.
        let mut rng = SplitMix::new(1234);
        for _ in 0..20 {
            let dim = 1u64 << (1 + rng.next() % 5);
            let mf = random_mat(&mut rng, dim);
            let psif = random_state(&mut rng, dim.trailing_zeros());
            let mx: CooMatrix<FixedComplex> =
                CooMatrix::from_dense(&mf.to_dense()).unwrap();
            let psix: StateVector<FixedComplex> = StateVector::from_amps(
                psif.n(),
                psif.amps()
                    .iter()
                    .map(|a| FixedComplex::encode_saturating(a.re, a.im))
                    .collect(),
            )
            .unwrap();
            let gotx = mx.matvec(&psix).unwrap();
            let dense = mf.to_dense();
            let mut per_row_nnz = vec![0usize; dim as usize];
            for t in mf.tuples() {
                per_row_nnz[t.row as usize] += 1;
            }
            for i in 0..dim as usize {
                let mut acc = c(0.0, 0.0);
                for j in 0..dim as usize {
                    acc += dense[i][j] * psif.amps()[j];
                }
                let gx = gotx.amps()[i].to_complex();
                let bound = (per_row_nnz[i].max(1) as f64) * 2f64.powi(-29);
                assert!(
                    (gx.re - acc.re).abs() <= bound && (gx.im - acc.im).abs() <= bound,
                    "row {i}: got {gx}, want {acc}, bound {bound}"
                );
            }
        }
    }

    #[test]
    fn dense_bridge_round_trips() {
        let id = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ];
        let m: CooMatrix<Complex64> = CooMatrix::from_dense(&id).unwrap();
        assert_eq!(m, CooMatrix::identity(2));
        assert_eq!(m.to_dense(), id);

        let zero = vec![vec![c(0.0, 0.0); 4]; 4];
        let mz: CooMatrix<Complex64> = CooMatrix::from_dense(&zero).unwrap();
        assert_eq!(mz.nnz(), 0);

        let q = std::f64::consts::FRAC_1_SQRT_2;
        let h = vec![vec![c(q, 0.0), c(q, 0.0)], vec![c(q, 0.0), c(-q, 0.0)]];
        let mh: CooMatrix<Complex64> = CooMatrix::from_dense(&h).unwrap();
        assert_eq!(mh.nnz(), 4);
        assert_eq!(mh.to_dense(), h);

        let rect = vec![vec![c(1.0, 0.0)], vec![c(0.0, 0.0)]];
        assert!(matches!(
            CooMatrix::<Complex64>::from_dense(&rect).unwrap_err(),
            CooError::NotSquare { .. }
        ));
    }

    #[test]
    fn from_unsorted_merges_duplicates_by_summation() {
        let tuples = vec![
            CooTuple::new(1, 0, c(0.5, 0.0)),
            CooTuple::new(0, 0, c(1.0, 0.0)),
            CooTuple::new(1, 0, c(0.25, 0.0)),
            CooTuple::new(0, 1, c(1.0, 0.0)),
            CooTuple::new(0, 1, c(-1.0, 0.0)), // cancels away
        ];
        let m = CooMatrix::<Complex64>::from_unsorted(2, tuples).unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.tuples()[0], CooTuple::new(0, 0, c(1.0, 0.0)));
        assert_eq!(m.tuples()[1], CooTuple::new(1, 0, c(0.75, 0.0)));
    }

    // Tiny deterministic generator for the in-module tests.
    pub(crate) struct SplitMix(u64);

    impl SplitMix {
        pub fn new(seed: u64) -> Self {
            Self(seed)
        }

        pub fn next(&mut self) -> u64 {
            self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        }

        pub fn unit(&mut self) -> f64 {
            (self.next() >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    fn random_mat(rng: &mut SplitMix, dim: u64) -> CooMatrix<Complex64> {
        let mut tuples = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                if rng.unit() < 0.4 {
                    tuples.push(CooTuple::new(
                        i as u32,
                        j as u32,
                        c(rng.unit() - 0.5, rng.unit() - 0.5),
                    ));
                }
            }
        }
        CooMatrix::new(dim, tuples).unwrap()
    }

    fn random_state(rng: &mut SplitMix, n: u32) -> StateVector<Complex64> {
        let amps = (0..1usize << n)
            .map(|_| c(rng.unit() - 0.5, rng.unit() - 0.5))
            .collect();
        StateVector::from_amps(n, amps).unwrap()
    }
}
