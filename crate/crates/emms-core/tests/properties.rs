//! Property-based checks of the arithmetic and kernel invariants.

use emms_core::circuit::{build_random, parse_circuit, print_circuit};
use emms_core::coo::{CooMatrix, CooTuple, StateVector};
use emms_core::fixedpoint::{FixedComplex, Q2_30};
use emms_core::fusion::{fuse, partition, PEConfig};
use emms_core::gates::{gate_matrix, GateKind, GateSpec};
use num_complex::Complex64;
use proptest::prelude::*;

/// Exact reference for the fixed-point multiply: full-width product,
/// round half away from zero, saturate.
fn mul_oracle(a: i32, b: i32) -> i32 {
    let p = i128::from(a) * i128::from(b);
    let q = p.div_euclid(1 << 30);
    let r = p.rem_euclid(1 << 30);
    let rounded = if 2 * r > (1 << 30) || (2 * r == (1 << 30) && p > 0) {
        q + 1
    } else {
        q
    };
    rounded.clamp(i128::from(i32::MIN), i128::from(i32::MAX)) as i32
}

proptest! {
    #[test]
    fn fixed_mul_matches_exact_oracle(a in any::<i32>(), b in any::<i32>()) {
        let got = Q2_30::from_raw(a).mul(Q2_30::from_raw(b));
        prop_assert_eq!(got.raw(), mul_oracle(a, b));
    }

    #[test]
    fn fixed_mul_accuracy_bound(a in -2.0..1.999f64, b in -1.0..1.0f64) {
        // |decode(mul) - a*b| <= 2^-30 when nothing saturates, counting the
        // encoding error of both operands.
        let fa = Q2_30::encode(a).unwrap();
        let fb = Q2_30::encode(b).unwrap();
        if (fa.decode() * fb.decode()).abs() < 1.99 {
            let got = fa.mul(fb).decode();
            prop_assert!((got - fa.decode() * fb.decode()).abs() <= 2f64.powi(-30));
        }
    }

    #[test]
    fn fixed_mul_one_is_identity(a in any::<i32>()) {
        let x = Q2_30::from_raw(a);
        prop_assert_eq!(Q2_30::ONE.mul(x), x);
    }

    #[test]
    fn fixed_encode_within_half_raw_ulp(x in -2.0..1.999999f64) {
        let v = Q2_30::encode(x).unwrap();
        prop_assert!((v.decode() - x).abs() <= 2f64.powi(-31));
    }

    #[test]
    fn fixed_round_trip_on_grid(raw in any::<i32>()) {
        let x = Q2_30::from_raw(raw);
        prop_assert_eq!(Q2_30::encode(x.decode()).unwrap(), x);
    }

    #[test]
    fn complex_mul_commutes_on_raw_bits(
        ar in any::<i32>(), ai in any::<i32>(),
        br in any::<i32>(), bi in any::<i32>(),
    ) {
        let a = FixedComplex::new(Q2_30::from_raw(ar), Q2_30::from_raw(ai));
        let b = FixedComplex::new(Q2_30::from_raw(br), Q2_30::from_raw(bi));
        prop_assert_eq!(a.mul(b), b.mul(a));
    }
}

fn arb_coo(max_bits: u32) -> impl Strategy<Value = CooMatrix<Complex64>> {
    (0..=max_bits).prop_flat_map(|bits| {
        let dim = 1u64 << bits;
        let cells = (dim * dim) as usize;
        proptest::collection::vec(
            (proptest::bool::weighted(0.4), -1.0..1.0f64, -1.0..1.0f64),
            cells,
        )
        .prop_map(move |cells| {
            let tuples = cells
                .into_iter()
                .enumerate()
                .filter(|(_, (keep, re, im))| *keep && (*re != 0.0 || *im != 0.0))
                .map(|(k, (_, re, im))| {
                    CooTuple::new(
                        (k as u64 / dim) as u32,
                        (k as u64 % dim) as u32,
                        Complex64::new(re, im),
                    )
                })
                .collect();
            CooMatrix::new(dim, tuples).expect("generated in order")
        })
    })
}

fn dense_kron(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let (na, nb) = (a.len(), b.len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); na * nb]; na * nb];
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_matches_dense_and_multiplies_nnz(a in arb_coo(3), b in arb_coo(3)) {
        let got = a.tensor_product(&b).unwrap();
        prop_assert_eq!(got.nnz(), a.nnz() * b.nnz());
        let want = dense_kron(&a.to_dense(), &b.to_dense());
        let gd = got.to_dense();
        for (gr, wr) in gd.iter().zip(&want) {
            for (g, w) in gr.iter().zip(wr) {
                prop_assert!((g - w).norm() < 1e-12);
            }
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn matvec_matches_dense(m in arb_coo(4), seed in any::<u64>()) {
        let n = m.dim().trailing_zeros();
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let amps: Vec<Complex64> = (0..m.dim()).map(|_| Complex64::new(next(), next())).collect();
        let psi = StateVector::from_amps(n, amps.clone()).unwrap();
        let got = m.matvec(&psi).unwrap();
        let dense = m.to_dense();
        for i in 0..m.dim() as usize {
            let want: Complex64 = (0..m.dim() as usize).map(|j| dense[i][j] * amps[j]).sum();
            prop_assert!((got.amps()[i] - want).norm() < 1e-10);
        }
    }

    #[test]
    fn parse_print_identity_on_random_circuits(
        n in 1u32..8,
        depth in 1u32..60,
        seed in any::<u64>(),
    ) {
        let c = build_random(n, depth, seed).unwrap();
        let reparsed = parse_circuit(&print_circuit(&c)).unwrap();
        prop_assert_eq!(c.n, reparsed.n);
        prop_assert_eq!(c.ops, reparsed.ops);
    }

    #[test]
    fn every_partition_high_factor_is_unit_row(
        n in 1u32..9,
        depth in 1u32..40,
        seed in any::<u64>(),
        hint in proptest::option::of(0u32..9),
    ) {
        let c = build_random(n, depth, seed).unwrap();
        for group in fuse(&c) {
            let part = partition::<Complex64>(&group, hint.map(|h| h.min(n))).unwrap();
            prop_assert!(part.g_bar.is_unit_row_sparse());
            prop_assert_eq!(part.g_bar.dim() * part.g_low.dim(), 1u64 << n);
        }
    }

    #[test]
    fn gate_unitarity_for_random_parameters(theta in -10.0..10.0f64) {
        for kind in GateKind::ALL {
            let p = kind.is_parameterized().then_some(theta);
            let spec = if kind.span() == 2 {
                GateSpec::controlled(kind, 0, p)
            } else {
                GateSpec::new(kind, vec![0], p).unwrap()
            };
            let m = gate_matrix::<Complex64>(&spec);
            let d = m.to_dense();
            let dim = d.len();
            for i in 0..dim {
                for j in 0..dim {
                    let acc: Complex64 = (0..dim).map(|k| d[i][k] * d[j][k].conj()).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((acc - Complex64::new(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn evolution_determinism_does_not_depend_on_worker_count() {
    // Fewer blocks than workers, odd block/worker ratios, single-block runs.
    for (n, depth, seed) in [(5u32, 13u32, 42u64), (7, 31, 9), (3, 50, 77)] {
        let c = build_random(n, depth, seed).unwrap();
        let base = emms_core::run_circuit::<Complex64>(&c, &PEConfig::default()).unwrap();
        for pes in [2u64, 4, 8, 16, 32] {
            let cfg = PEConfig::new(pes, 1 << 12, 1 << 12).unwrap();
            let out = emms_core::run_circuit::<Complex64>(&c, &cfg).unwrap();
            assert_eq!(base.amps(), out.amps());
        }
    }
}
