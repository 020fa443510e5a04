use proptest::prelude::*;

use ptbh::classify::{
    block_index_set, count_partitions, enumerate_models, is_admissible, parse_index_notation,
    partitions_min2, render_index_notation,
};
use ptbh::epn::jordan_chain;
use ptbh::hubbard::{
    bh_block, closed_form_spectrum, fock_block, model_matrix, parity_matrix, scaled_block,
    BlockSpec, ModelConfig,
};
use ptbh::linalg::{
    eigenvalues, numerical_rank, solve, ComplexMatrix, ComplexScalar, DEFAULT_RANK_TOL,
};

fn c(re: f64, im: f64) -> ComplexScalar {
    ComplexScalar::new(re, im)
}

fn complex_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n * n).prop_map(move |v| {
        ComplexMatrix::new(n, n, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap()
    })
}

fn sized_matrix() -> impl Strategy<Value = ComplexMatrix> {
    (2usize..9).prop_flat_map(complex_matrix)
}

/// Greedy matching of two eigenvalue lists; returns the worst pair distance.
fn spectrum_distance(a: &[ComplexScalar], b: &[ComplexScalar]) -> f64 {
    let mut rest = b.to_vec();
    let mut worst: f64 = 0.0;
    for z in a {
        let (k, d) = rest
            .iter()
            .enumerate()
            .map(|(k, w)| (k, (z - w).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        worst = worst.max(d);
        rest.swap_remove(k);
    }
    worst
}

/// Number of partitions of `n` into parts >= 2, by the usual coin-change recurrence.
fn partition_oracle(n: usize) -> usize {
    let mut ways = vec![0usize; n + 1];
    ways[0] = 1;
    for part in 2..=n {
        for total in part..=n {
            ways[total] += ways[total - part];
        }
    }
    ways[n]
}

/// Counts the ways to tile `{1-n, 3-n, .., n-1}` by centred arithmetic
/// progressions of length >= 2, always covering the smallest free level next.
fn model_count_oracle(n: usize) -> usize {
    fn go(free: &mut Vec<i64>) -> usize {
        let Some(&low) = free.first() else { return 1 };
        if low >= 0 {
            return 0;
        }
        let span = -low;
        let mut total = 0;
        for len in 2..=free.len() {
            let gaps = (len - 1) as i64;
            if (2 * span) % gaps != 0 {
                continue;
            }
            let step = 2 * span / gaps;
            let members: Vec<i64> = (0..len as i64).map(|k| low + k * step).collect();
            if members.iter().all(|m| free.binary_search(m).is_ok()) {
                let saved = free.clone();
                free.retain(|x| !members.contains(x));
                total += go(free);
                *free = saved;
            }
        }
        total
    }
    let n = n as i64;
    let mut free: Vec<i64> = (0..n).map(|k| 2 * k + 1 - n).collect();
    go(&mut free)
}

#[test]
fn partition_counts_match_oracle() {
    for n in 2..=20 {
        assert_eq!(count_partitions(n).unwrap(), partition_oracle(n), "N={n}");
        let parts = partitions_min2(n).unwrap();
        assert!(parts
            .iter()
            .all(|p| p.total() == n && p.parts().iter().all(|&x| x >= 2)));
        assert!(
            parts.windows(2).all(|w| w[0].parts() > w[1].parts()),
            "reverse lex order"
        );
    }
}

#[test]
fn partitions_gain_by_removing_a_two() {
    // a partition of N with a part 2 is a partition of N-2 plus that part
    for n in 4..=20 {
        let with_two = partitions_min2(n)
            .unwrap()
            .iter()
            .filter(|p| p.parts().contains(&2))
            .count();
        assert_eq!(with_two, partition_oracle(n - 2));
    }
}

#[test]
fn model_counts_match_tiling_oracle() {
    for n in 2..=15 {
        assert_eq!(
            enumerate_models(n).unwrap().len(),
            model_count_oracle(n),
            "N={n}"
        );
    }
}

#[test]
fn model_count_at_fifteen() {
    assert_eq!(model_count_oracle(15), 45);
    assert_eq!(enumerate_models(15).unwrap().len(), 45);
}

#[test]
fn enumerated_models_are_admissible_and_distinct() {
    for n in 2..=16 {
        let models = enumerate_models(n).unwrap();
        assert!(models.iter().all(is_admissible));
        let mut keys: Vec<_> = models.iter().map(|m| (m.partition(), m.scales())).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), models.len());
    }
}

#[test]
fn single_block_always_present() {
    for n in 2..=20 {
        let models = enumerate_models(n).unwrap();
        assert_eq!(models[0], ModelConfig::single_block(n).unwrap());
    }
}

#[test]
fn index_notation_roundtrip() {
    for n in 2..=14 {
        for m in enumerate_models(n).unwrap() {
            let text = render_index_notation(&m).unwrap();
            let mut parsed: Vec<Vec<i64>> = parse_index_notation(&text)
                .unwrap()
                .iter()
                .map(|s| s.elements().to_vec())
                .collect();
            let mut want: Vec<Vec<i64>> = m
                .blocks()
                .iter()
                .map(|&b| block_index_set(b).elements().to_vec())
                .collect();
            parsed.sort();
            want.sort();
            assert_eq!(parsed, want, "{m} -> {text}");
        }
    }
}

#[test]
fn chain_scaling_covariance() {
    for m in 2..=7 {
        let base = jordan_chain(&bh_block(m, 1.0).unwrap()).unwrap();
        for k in [2u32, 3, 5] {
            let h = scaled_block(BlockSpec::new(m, k).unwrap(), 1.0).unwrap();
            let kf = k as f64;
            for j in 0..m {
                let v: Vec<ComplexScalar> =
                    base[j].iter().map(|z| z / kf.powi(j as i32 + 1)).collect();
                let hv = h.mul_vec(&v).unwrap();
                let want = if j == 0 {
                    vec![c(0.0, 0.0); m]
                } else {
                    base[j - 1].iter().map(|z| z / kf.powi(j as i32)).collect()
                };
                let err = hv
                    .iter()
                    .zip(&want)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(err < 1e-9, "M={m} c={k} j={j}: {err}");
            }
        }
    }
}

fn admissible_model() -> impl Strategy<Value = ModelConfig> {
    (2usize..=10).prop_flat_map(|n| {
        let models = enumerate_models(n).unwrap();
        let len = models.len();
        (0..len).prop_map(move |i| models[i].clone())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_invariant_under_permutation_similarity(
        m in sized_matrix(),
        seed in any::<u64>(),
    ) {
        let n = m.n_rows();
        let mut perm: Vec<usize> = (0..n).collect();
        // deterministic shuffle driven by the seed
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let p = m.permute_symmetric(&perm).unwrap();
        let a = eigenvalues(&m).unwrap();
        let b = eigenvalues(&p).unwrap();
        let d = spectrum_distance(&a, &b);
        prop_assert!(d < 1e-7 * m.frobenius_norm().max(1.0), "distance {d}");
    }

    #[test]
    fn trace_equals_eigenvalue_sum(m in sized_matrix()) {
        let trace: ComplexScalar = m.diagonal().iter().sum();
        let sum: ComplexScalar = eigenvalues(&m).unwrap().iter().sum();
        prop_assert!((trace - sum).norm() < 1e-9 * m.frobenius_norm().max(1.0));
    }

    #[test]
    fn low_rank_products_have_expected_rank(
        n in 3usize..8,
        r in 1usize..3,
        entries in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 2 * 8 * 3),
    ) {
        let mut it = entries.into_iter().map(|(a, b)| c(a, b));
        let left = ComplexMatrix::from_fn(n, r, |_, _| it.next().unwrap()).unwrap();
        let right = ComplexMatrix::from_fn(r, n, |_, _| it.next().unwrap()).unwrap();
        let full_left = numerical_rank(&left, DEFAULT_RANK_TOL).unwrap();
        let full_right = numerical_rank(&right, DEFAULT_RANK_TOL).unwrap();
        prop_assume!(full_left == r && full_right == r);
        let a = left.matmul(&right).unwrap();
        let rank = numerical_rank(&a, DEFAULT_RANK_TOL).unwrap();
        prop_assert_eq!(rank, r);
        prop_assert_eq!(n - rank, n - r);
    }

    #[test]
    fn solve_roundtrip(m in sized_matrix(), x in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 8)) {
        let n = m.n_rows();
        // diagonal shift keeps the system comfortably nonsingular
        let a = m.shifted(c(20.0, 0.0)).unwrap();
        let x = ComplexMatrix::from_fn(n, 1, |i, _| c(x[i].0, x[i].1)).unwrap();
        let b = a.matmul(&x).unwrap();
        let got = solve(&a, &b).unwrap();
        let err = got.sub(&x).unwrap().frobenius_norm();
        prop_assert!(err < 1e-10, "error {err}");
    }

    #[test]
    fn fock_oracle_agrees(n in 2usize..=12, g in 0.0..=1.0f64) {
        let a = fock_block(n - 1, g).unwrap();
        let b = bh_block(n, g).unwrap();
        prop_assert!(a.sub(&b).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn models_are_isospectral_with_closed_form(m in admissible_model(), g in 0.0..0.95f64) {
        let n = m.dimension() as i64;
        let root = (1.0 - g * g).sqrt();
        let exact: Vec<ComplexScalar> = (0..n).map(|k| c((2 * k + 1 - n) as f64 * root, 0.0)).collect();
        let ev = eigenvalues(&model_matrix(&m, g).unwrap()).unwrap();
        prop_assert!(spectrum_distance(&ev, &exact) < 1e-8);
        let lib: Vec<ComplexScalar> =
            closed_form_spectrum(m.dimension(), g).unwrap().into_iter().map(|x| c(x, 0.0)).collect();
        prop_assert!(spectrum_distance(&lib, &exact) < 1e-14);
    }

    #[test]
    fn models_are_complex_and_pt_symmetric(m in admissible_model(), g in 0.0..=1.0f64) {
        let h = model_matrix(&m, g).unwrap();
        let p = parity_matrix(h.n_rows());
        let pt = p.matmul(&h.conj()).unwrap().matmul(&p).unwrap();
        prop_assert!(h.sub(&h.transpose()).unwrap().max_abs() == 0.0);
        prop_assert!(pt.sub(&h).unwrap().max_abs() <= 1e-12 * h.frobenius_norm());
    }

    #[test]
    fn diagonal_follows_level_convention(m in admissible_model(), g in 0.0..=1.0f64) {
        let h = model_matrix(&m, g).unwrap();
        let n = h.n_rows() as f64;
        for (j, z) in h.diagonal().iter().enumerate() {
            let want = g * (2.0 * (j + 1) as f64 - n - 1.0);
            prop_assert!(z.re == 0.0 && (z.im - want).abs() <= 1e-12, "{j}: {z}");
        }
    }

    #[test]
    fn block_order_does_not_matter(m in admissible_model(), rot in 0usize..8) {
        let mut parts = m.partition();
        let mut scales = m.scales();
        let k = parts.len();
        parts.rotate_left(rot % k);
        scales.rotate_left(rot % k);
        let again = ModelConfig::from_parts(m.dimension(), &parts, &scales).unwrap();
        prop_assert_eq!(again, m);
    }

    #[test]
    fn block_levels_are_centred_progressions(size in 2usize..12, scale in 1u32..12) {
        let set = block_index_set(BlockSpec::new(size, scale).unwrap());
        let e = set.elements();
        prop_assert_eq!(e.len(), size);
        prop_assert!(set.is_centrally_symmetric());
        prop_assert!(e.windows(2).all(|w| w[1] - w[0] == 2 * scale as i64));
    }
}
