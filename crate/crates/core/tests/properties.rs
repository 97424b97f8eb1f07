mod common;

use ergogap::dobrushin::{
    dobrushin_coefficient, dobrushin_coefficient_with, seminorm_q, tightness_witness,
    CoefficientForm, DEFAULT_PAIR_CAP,
};
use ergogap::oracle;
use ergogap::spectral_bound::{certificate_sequence, closed_subsets, mixture_bound};
use ergogap::stationary::stationary_distribution;
use ergogap::stochastic_core::{
    build_google, norm1, parse_edge_list, read_vector, validate_stochastic, write_vector,
    DanglingPolicy, DenseMatrix, SimplexVector, Teleport, TransitionMatrix, ZeroSumVector,
};
use proptest::prelude::*;
use rand::RngExt;

use common::*;

fn seeded() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 2usize..=16)
}

fn arbitrary_dense(seed: u64, n: usize) -> DenseMatrix {
    let mut r = rng(seed);
    let rows = (0..n)
        .map(|_| (0..n).map(|_| r.random_range(-2.0..2.0)).collect())
        .collect();
    DenseMatrix::from_rows(rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    // stochastic_core

    #[test]
    fn validated_rows_sum_to_one(
        rows in prop::collection::vec(prop::collection::vec(0.0f64..10.0, 6), 1..6),
        jitter in -1e-11f64..1e-11,
    ) {
        let n = rows.len();
        let input: Vec<Vec<(usize, f64)>> = rows
            .iter()
            .map(|w| {
                let s: f64 = w.iter().take(n).sum::<f64>() + 1.0;
                let mut row: Vec<(usize, f64)> =
                    w.iter().take(n).map(|x| x * (1.0 + jitter) / s).enumerate().collect();
                row.push((0, (1.0 + jitter) / s));
                row
            })
            .collect();
        let m = validate_stochastic(input, n, 1e-10).unwrap();
        for row in m.rows() {
            let s: f64 = row.iter().map(|(_, w)| w).sum();
            prop_assert!((s - 1.0).abs() <= 1e-10);
            prop_assert!(row.iter().all(|(_, w)| w > 0.0));
        }
    }

    #[test]
    fn zero_sum_stays_zero_sum((seed, n) in seeded()) {
        let mut r = rng(seed);
        let m = to_sparse(&varied_stochastic(&mut r, n));
        let y = ZeroSumVector::new(zero_sum(&mut r, n)).unwrap();
        let s: f64 = m.apply_transpose(y.as_slice()).unwrap().iter().sum();
        prop_assert!(s.abs() <= 1e-10 * n as f64);
    }

    #[test]
    fn simplex_stays_on_simplex((seed, n) in seeded()) {
        let mut r = rng(seed);
        let m = to_sparse(&varied_stochastic(&mut r, n));
        let out = m.apply_transpose(simplex(&mut r, n).as_slice()).unwrap();
        prop_assert!(out.iter().all(|&v| v >= -1e-14));
        prop_assert!((out.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn google_matches_dense(seed in any::<u64>(), n in 1usize..=32, c in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let p = to_sparse(&varied_stochastic(&mut r, n));
        let g = build_google(p, c, simplex(&mut r, n)).unwrap();
        let dense = g.densify(32).unwrap();
        let x: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        for (a, b) in g.apply_transpose(&x).unwrap().iter().zip(transpose_apply(&dense, &x)) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        for (a, b) in g.apply(&x).unwrap().iter().zip(apply(&dense, &x)) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn vector_files_round_trip(x in prop::collection::vec(-1e300f64..1e300, 1..40)) {
        let back = read_vector(&write_vector(&x), x.len()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn edge_lists_give_stochastic_rows(
        edges in prop::collection::vec((0u64..20, 0u64..20, 0.0f64..5.0), 1..60),
    ) {
        let text: String = edges.iter().map(|(s, d, w)| format!("{s} {d} {w}\n")).collect();
        match parse_edge_list(&text, DanglingPolicy::Uniform) {
            Ok(g) => {
                for row in g.matrix.rows() {
                    let s: f64 = row.iter().map(|(_, w)| w).sum();
                    prop_assert!((s - 1.0).abs() <= 1e-12);
                }
            }
            Err(e) => prop_assert!(matches!(e, ergogap::Error::EmptyGraph), "{e}"),
        }
    }

    // dobrushin

    #[test]
    fn forms_agree_and_lie_in_unit_interval((seed, n) in seeded()) {
        let d = varied_stochastic(&mut rng(seed), n);
        let h = dobrushin_coefficient_with(&d, CoefficientForm::HalfL1, DEFAULT_PAIR_CAP).unwrap().q;
        let o = dobrushin_coefficient_with(&d, CoefficientForm::OneMinusOverlap, DEFAULT_PAIR_CAP)
            .unwrap()
            .q;
        let s = dobrushin_coefficient(&to_sparse(&d)).unwrap().q;
        prop_assert!((h - o).abs() <= 1e-12 && (h - s).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&h));
    }

    #[test]
    fn coefficient_is_the_norm_on_zero_sum_vectors((seed, n) in seeded()) {
        let mut r = rng(seed);
        let d = varied_stochastic(&mut r, n);
        let res = dobrushin_coefficient(&d).unwrap();
        for _ in 0..50 {
            let y = zero_sum(&mut r, n);
            prop_assert!(norm1(&transpose_apply(&d, &y)) <= res.q * norm1(&y) + 1e-12);
        }
        let w = tightness_witness(n, res.argmax_pair);
        prop_assert!((norm1(&transpose_apply(&d, &w)) - res.q).abs() <= 1e-9);
    }

    #[test]
    fn seminorm_axioms(seed in any::<u64>(), n in 1usize..=10, alpha in -5.0f64..5.0) {
        let b = arbitrary_dense(seed, n);
        let c = arbitrary_dense(seed.wrapping_add(1), n);
        let (qb, qc) = (seminorm_q(&b), seminorm_q(&c));
        prop_assert!(seminorm_q(&b.add(&c).unwrap()) <= qb + qc + 1e-12);
        prop_assert!((seminorm_q(&b.scale(alpha)) - alpha.abs() * qb).abs() <= 1e-12 * (1.0 + qb * alpha.abs()));
        prop_assert!(qb >= 0.0);
        // Vanishes exactly on matrices with identical rows.
        let row = b.row(0).to_vec();
        prop_assert_eq!(seminorm_q(&DenseMatrix::from_fn(n, |_, j| row[j])), 0.0);
    }

    #[test]
    fn submultiplicative_on_stochastic((seed, n) in seeded()) {
        let mut r = rng(seed);
        let b = varied_stochastic(&mut r, n);
        let c = varied_stochastic(&mut r, n);
        let qbc = dobrushin_coefficient(&b.matmul(&c).unwrap()).unwrap().q;
        let qb = dobrushin_coefficient(&b).unwrap().q;
        let qc = dobrushin_coefficient(&c).unwrap().q;
        prop_assert!(qbc <= qb * qc + 1e-12);
    }

    // spectral_bound

    #[test]
    fn power_bounds_dominate_second_eigenvalue(seed in any::<u64>(), n in 2usize..=8) {
        let a = varied_stochastic(&mut rng(seed), n);
        let l2 = oracle::second_modulus(&a).unwrap();
        let cert = certificate_sequence(&a, 20).unwrap();
        for e in &cert.entries {
            prop_assert!(e.bound_k >= l2 - 1e-9, "k = {}: {} < {}", e.k, e.bound_k, l2);
        }
        let mut running = f64::INFINITY;
        for e in &cert.entries {
            running = running.min(e.bound_k);
        }
        prop_assert_eq!(running.min(1.0), cert.best_bound);
    }

    #[test]
    fn mixture_bounds_are_sound(seed in any::<u64>(), n in 2usize..=10, c in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let p = varied_stochastic(&mut r, n);
        let e = varied_stochastic(&mut r, n);
        let z = simplex(&mut r, n);
        let rank1 = mixture_bound(&to_sparse(&p), &Teleport::Rank1(z.clone()), c).unwrap();
        prop_assert!(rank1.best_bound <= c);
        prop_assert!(oracle::second_modulus(&mixture(&p, &rank_one(&z), c)).unwrap() <= rank1.best_bound + 1e-9);
        let general = mixture_bound(&to_sparse(&p), &Teleport::General(to_sparse(&e)), c).unwrap();
        prop_assert!(oracle::second_modulus(&mixture(&p, &e, c)).unwrap() <= general.best_bound + 1e-9);
    }

    #[test]
    fn closed_subsets_match_fixed_space(seed in any::<u64>(), closed in 1usize..=3, transient in 0usize..=4) {
        let p = structured(&mut rng(seed), closed, 4, transient);
        let report = closed_subsets(&to_sparse(&p), 0.0);
        prop_assert_eq!(report.count, closed);
        prop_assert_eq!(oracle::fixed_space_dimension_dense(&p).unwrap(), closed);
        let covered: usize = report.terminal_components.iter().map(Vec::len).sum();
        prop_assert!(covered <= p.n());
    }

    // stationary

    #[test]
    fn transpose_contracts_by_q((seed, n) in seeded()) {
        let mut r = rng(seed);
        let a = to_sparse(&stochastic(&mut r, n, 0.2));
        let q = dobrushin_coefficient(&a).unwrap().q;
        let (x, y) = (simplex(&mut r, n), simplex(&mut r, n));
        let ax = a.apply_transpose(x.as_slice()).unwrap();
        let ay = a.apply_transpose(y.as_slice()).unwrap();
        prop_assert!(l1_diff(&ax, &ay) <= q * l1_diff(x.as_slice(), y.as_slice()) + 1e-12);
    }

    #[test]
    fn iteration_decrements_contract(seed in any::<u64>(), n in 2usize..=16, c in 0.5f64..0.99) {
        let mut r = rng(seed);
        let p = to_sparse(&varied_stochastic(&mut r, n));
        let g = build_google(p, c, SimplexVector::uniform(n).unwrap()).unwrap();
        let x0 = simplex(&mut r, n);
        let cert = stationary_distribution(&g, &x0, 1e-12, 8, 100_000).unwrap();
        for w in cert.decrements.windows(2) {
            prop_assert!(w[1] <= cert.kappa * w[0] + 1e-12);
        }
        prop_assert!(cert.x_star.as_slice().iter().all(|&v| v >= -1e-14));
        prop_assert!((cert.x_star.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        let v = oracle::stationary_dense(&g.densify(64).unwrap()).unwrap();
        prop_assert!(l1_diff(cert.x_star.as_slice(), &v) <= 1e-12);
    }

    // oracle

    #[test]
    fn stochastic_spectral_facts((seed, n) in seeded()) {
        let a = varied_stochastic(&mut rng(seed), n);
        let s = oracle::eigenvalues_dense(&a).unwrap();
        prop_assert!((s.eigenvalues[0].re - 1.0).abs() <= 1e-8 && s.eigenvalues[0].im.abs() <= 1e-8);
        prop_assert!(s.moduli()[0] <= 1.0 + 1e-8);
        let ae = apply(&a, &vec![1.0; n]);
        prop_assert!(ae.iter().map(|v| (v - 1.0).abs()).sum::<f64>() <= 1e-10);
        prop_assert!((a.transpose().norm1() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn fixed_space_counts_unit_eigenvalues(seed in any::<u64>(), blocks in 1usize..=4) {
        // Block diagonal with positive blocks: eigenvalue 1 is semisimple.
        let mut r = rng(seed);
        let sizes: Vec<usize> = (0..blocks).map(|_| r.random_range(1..=4)).collect();
        let n: usize = sizes.iter().sum();
        let mut a = DenseMatrix::zeros(n);
        let mut off = 0;
        for &s in &sizes {
            let b = stochastic(&mut r, s, 0.0);
            for i in 0..s {
                for j in 0..s {
                    a[(off + i, off + j)] = b[(i, j)];
                }
            }
            off += s;
        }
        let ones = oracle::eigenvalues_dense(&a)
            .unwrap()
            .eigenvalues
            .iter()
            .filter(|z| (*z - 1.0).norm() <= 1e-7)
            .count();
        prop_assert_eq!(oracle::fixed_space_dimension_dense(&a).unwrap(), ones);
        prop_assert_eq!(ones, blocks);
    }
}
