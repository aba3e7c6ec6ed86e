use num_complex::Complex64;
use proptest::prelude::*;

use nnpc::distances::{l1_distance, DistanceMatrix};
use nnpc::km::{farthest_point_centers, km_from_distances};
use nnpc::metrics::{clustering_error, confusion_entropy};
use nnpc::nnpc::{
    build_adjacency, nearest_neighbor_sets, nnpc_from_distances, spectral_cluster, ClusterCount, NnpcConfig,
};
use nnpc::numerics::{eig_symmetric, fft_real, ifft_real, kmeans, min_cost_assignment, RngStream, SymmetricMatrix};
use nnpc::spectra::{bt_psd, default_grid_size, estimate_acf, make_window, Observation, PsdEstimate, WindowKind};
use nnpc::theory::{check_nfc, check_separation, h_sequence, noise_term};

fn pow2_vec() -> impl Strategy<Value = Vec<f64>> {
    (1u32..=16).prop_flat_map(|bits| prop::collection::vec(-1e3f64..1e3, 1usize << bits))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fft_round_trip_and_parseval(x in pow2_vec()) {
        let spectrum = fft_real(&x).unwrap();
        let back = ifft_real(&spectrum).unwrap();
        let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let err: f64 = x.iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-10 * norm.max(1e-300));
        let energy: f64 = x.iter().map(|v| v * v).sum();
        let spec_energy: f64 = spectrum.iter().map(Complex64::norm_sqr).sum::<f64>() / x.len() as f64;
        prop_assert!((energy - spec_energy).abs() <= 1e-10 * energy.max(1e-300));
    }

    #[test]
    fn eig_reconstructs(n in 1usize..20, entries in prop::collection::vec(-5.0f64..5.0, 400)) {
        let m = SymmetricMatrix::from_fn(n, |i, j| entries[i * 20 + j]).unwrap();
        let e = eig_symmetric(&m).unwrap();
        let scale = m.frobenius_norm().max(1e-300);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        for i in 0..n {
            for j in 0..n {
                let rec: f64 = (0..n).map(|k| e.component(i, k) * e.values[k] * e.component(j, k)).sum();
                prop_assert!((rec - m.get(i, j)).abs() <= 1e-8 * scale);
                let gram: f64 = (0..n).map(|k| e.component(k, i) * e.component(k, j)).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram - want).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn kmeans_objective_never_increases(
        pts in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 3), 5..60),
        k in 1usize..5,
        seed in any::<u64>(),
    ) {
        let k = k.min(pts.len());
        let r = kmeans(&pts, k, 3, &RngStream::new(seed, 0)).unwrap();
        prop_assert!(r.objective_trace.windows(2).all(|w| w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0)));
        prop_assert!(r.labels.iter().all(|&l| l < k));
        prop_assert!(r.iterations <= nnpc::numerics::MAX_LLOYD_ITERATIONS);
    }

    #[test]
    fn assignment_matches_brute_force(n in 1usize..=6, entries in prop::collection::vec(-20i32..20, 36)) {
        let cost: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| entries[i * 6 + j] as f64).collect()).collect();
        let got = min_cost_assignment(&cost).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        permutations(&mut perm, 0, &mut |p| {
            best = best.min(p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum());
        });
        prop_assert_eq!(got.cost, best);
        let mut sorted = got.permutation.clone();
        sorted.sort();
        prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn psd_power_and_nonnegativity(
        x in prop::collection::vec(-3.0f64..3.0, 2..300),
        kind in prop_oneof![
            Just(WindowKind::Bartlett),
            Just(WindowKind::Rectangular),
            (1.0f64..60.0).prop_map(|std| WindowKind::Gaussian { std }),
        ],
    ) {
        let m = x.len();
        let w = make_window(kind, m).unwrap();
        let psd = bt_psd(&Observation::new(0, x).unwrap(), &w, default_grid_size(m)).unwrap();
        let r0 = psd.source_acf_zero;
        prop_assert!((psd.power() - r0).abs() <= 1e-8 * r0.max(1e-300));
        if matches!(kind, WindowKind::Bartlett) {
            prop_assert!(w.theory_valid);
        }
        if w.theory_valid {
            let max = psd.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = psd.values().iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assert!(min >= -1e-8 * max.max(0.0));
        }
        prop_assert!(w.spectral_bound >= 1.0 - 1e-12);
    }

    #[test]
    fn acf_matches_direct_sum(x in prop::collection::vec(-3.0f64..3.0, 2..200)) {
        let m = x.len();
        let r = estimate_acf(&Observation::new(0, x.clone()).unwrap());
        for lag in 0..m {
            let direct: f64 = (0..m - lag).map(|n| x[n + lag] * x[n]).sum::<f64>() / m as f64;
            prop_assert!((r[lag] - direct).abs() <= 1e-10 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn distance_is_homogeneous(
        a in prop::collection::vec(0.0f64..5.0, 64),
        b in prop::collection::vec(0.0f64..5.0, 64),
        lambda in 0.01f64..100.0,
    ) {
        let d = l1_distance(&PsdEstimate::from_values(a.clone(), 0.0), &PsdEstimate::from_values(b.clone(), 0.0)).unwrap();
        let scaled = l1_distance(
            &PsdEstimate::from_values(a.iter().map(|v| v * lambda).collect(), 0.0),
            &PsdEstimate::from_values(b.iter().map(|v| v * lambda).collect(), 0.0),
        ).unwrap();
        prop_assert!((scaled - lambda * d).abs() <= 1e-12 * (1.0 + lambda * d));
    }

    #[test]
    fn distance_obeys_triangle_inequality(v in prop::collection::vec(0.0f64..5.0, 3 * 64)) {
        let s: Vec<PsdEstimate> = v.chunks(64).map(|c| PsdEstimate::from_values(c.to_vec(), 0.0)).collect();
        let d = |i: usize, j: usize| l1_distance(&s[i], &s[j]).unwrap();
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-12);
        prop_assert_eq!(d(0, 1), d(1, 0));
        prop_assert_eq!(d(2, 2), 0.0);
    }

    #[test]
    fn neighbor_sets_are_nearest(d in distance_matrix_strategy(3..25), q_frac in 0.0f64..1.0) {
        let n = d.order();
        let q = 1 + ((n - 2) as f64 * q_frac) as usize;
        let t = nearest_neighbor_sets(&d, q).unwrap();
        for i in 0..n {
            prop_assert_eq!(t.get(i).len(), q);
            prop_assert!(!t.contains(i, i));
            let worst_in = t.get(i).iter().map(|&j| d.get(i, j)).fold(f64::NEG_INFINITY, f64::max);
            let best_out = (0..n).filter(|&p| p != i && !t.contains(i, p)).map(|p| d.get(i, p)).fold(f64::INFINITY, f64::min);
            prop_assert!(worst_in <= best_out);
        }
    }

    #[test]
    fn separation_implies_nfc_and_km_recovery(case in separated_strategy()) {
        let (d, labels, n_clusters, min_block) = case;
        prop_assert!(check_separation(&d, &labels).unwrap().holds);
        for q in 1..min_block {
            let a = build_adjacency(&d, &nearest_neighbor_sets(&d, q).unwrap()).unwrap();
            prop_assert!(check_nfc(&a, &labels).unwrap());
        }
        let centers = farthest_point_centers(&d, n_clusters).unwrap();
        let mut models: Vec<usize> = centers.iter().map(|&c| labels[c]).collect();
        models.sort();
        models.dedup();
        prop_assert_eq!(models.len(), n_clusters);
        prop_assert!(km_from_distances(&d, n_clusters).unwrap().same_partition(&labels));
    }

    #[test]
    fn block_diagonal_spectral_recovery(sizes in prop::collection::vec(1usize..5, 1..4), seed in any::<u64>()) {
        let labels: Vec<usize> = sizes.iter().enumerate().flat_map(|(l, &s)| vec![l; s]).collect();
        let n = labels.len();
        prop_assume!(n <= 12);
        // Complete graph inside each block; singletons get a self loop so
        // they are not isolated.
        let a = SymmetricMatrix::from_fn(n, |i, j| {
            if labels[i] != labels[j] { 0.0 } else if i != j || sizes[labels[i]] == 1 { 1.0 } else { 0.0 }
        }).unwrap();
        let sc = spectral_cluster(&a, sizes.len(), &RngStream::new(seed, 1), None).unwrap();
        prop_assert!(sc.labeling.same_partition(&labels));
    }

    #[test]
    fn nnpc_is_permutation_equivariant(
        block in 2usize..6,
        n_clusters in 2usize..4,
        cut in 0.05f64..0.9,
        seed in any::<u64>(),
        perm_seed in any::<u64>(),
    ) {
        // Equal blocks with q = block - 1 make every block a clique.
        let (d, labels) = separated(&vec![block; n_clusters], cut, seed);
        let n = d.order();
        let perm = shuffled(n, perm_seed);
        let config = NnpcConfig::new(block - 1, ClusterCount::Known(n_clusters));
        let base = nnpc_from_distances(&d, &config, &RngStream::new(5, 5)).unwrap();
        let moved = nnpc_from_distances(&d.permuted(&perm), &config, &RngStream::new(5, 5)).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(moved.adjacency.get(i, j), base.adjacency.get(perm[i], perm[j]));
            }
        }
        let mut pulled = vec![0; n];
        for (new_pos, &old) in perm.iter().enumerate() {
            pulled[old] = moved.labeling.labels()[new_pos];
        }
        prop_assert!(base.labeling.same_partition(&labels));
        prop_assert!(base.labeling.same_partition(&pulled));
    }

    #[test]
    fn metric_invariants(
        truth in prop::collection::vec(0usize..4, 1..40),
        pred_seed in prop::collection::vec(0usize..4, 40),
    ) {
        let pred: Vec<usize> = pred_seed[..truth.len()].to_vec();
        let ce = clustering_error(&pred, &truth).unwrap();
        let s = confusion_entropy(&pred, &truth).unwrap();
        let distinct = |v: &[usize]| { let mut u = v.to_vec(); u.sort(); u.dedup(); u.len() };
        let l = distinct(&pred).max(distinct(&truth));
        prop_assert!(ce <= 1.0 - 1.0 / l as f64 + 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&s));
        if ce == 0.0 {
            prop_assert_eq!(s, 0.0);
        }
        if s == 0.0 && ce > 0.0 {
            // Pure rows with errors: some predicted cluster merges true ones.
            prop_assert!(distinct(&pred) < distinct(&truth));
        }
        prop_assert_eq!(clustering_error(&truth, &truth).unwrap(), 0.0);
    }

    #[test]
    fn wider_gaussian_lowers_h(len in 8usize..2000, std in 1.0f64..100.0, extra in 0.1f64..50.0) {
        let narrow = make_window(WindowKind::Gaussian { std }, len).unwrap();
        let wide = make_window(WindowKind::Gaussian { std: std + extra }, len).unwrap();
        prop_assume!(narrow.theory_valid && wide.theory_valid);
        let (hn, hw) = (h_sequence(&narrow, len - 1).unwrap(), h_sequence(&wide, len - 1).unwrap());
        for m in 0..len {
            prop_assert!(hw[m] <= hn[m] + 1e-15);
        }
    }
}

#[test]
fn noise_term_decreases_in_m() {
    let mut prev = f64::INFINITY;
    for m in 3..5000 {
        let v = noise_term(10.0, 1.0, 0.25, m);
        assert!(v < prev, "M = {m}");
        prev = v;
    }
}

fn permutations(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}

fn distance_matrix_strategy(n: std::ops::Range<usize>) -> impl Strategy<Value = DistanceMatrix> {
    n.prop_flat_map(|n| {
        prop::collection::vec(0.0f64..1.0, n * n)
            .prop_map(move |v| DistanceMatrix::from_fn(n, |i, j| v[i * n + j]).unwrap())
    })
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut s = seed;
    for i in (1..n).rev() {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        perm.swap(i, (s >> 33) as usize % (i + 1));
    }
    perm
}

/// Distance matrix over shuffled blocks of the given sizes in which every
/// intra-block distance is below `cut` and every inter-block one above it.
fn separated(sizes: &[usize], cut: f64, seed: u64) -> (DistanceMatrix, Vec<usize>) {
    let ordered: Vec<usize> = sizes.iter().enumerate().flat_map(|(l, &s)| vec![l; s]).collect();
    let labels: Vec<usize> = shuffled(ordered.len(), seed).into_iter().map(|i| ordered[i]).collect();
    let mut rng = seed ^ 0x9e37_79b9_7f4a_7c15;
    let mut next = move || {
        rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (rng >> 11) as f64 / (1u64 << 53) as f64
    };
    let d = DistanceMatrix::from_fn(labels.len(), |i, j| {
        if labels[i] == labels[j] {
            next() * cut
        } else {
            cut + 1e-6 + next() * (1.0 - cut)
        }
    })
    .unwrap();
    (d, labels)
}

/// Returns `(d, labels, L, smallest block size)`.
fn separated_strategy() -> impl Strategy<Value = (DistanceMatrix, Vec<usize>, usize, usize)> {
    (prop::collection::vec(2usize..8, 2..5), 0.05f64..0.9, any::<u64>()).prop_map(|(sizes, cut, seed)| {
        let (d, labels) = separated(&sizes, cut, seed);
        (d, labels, sizes.len(), *sizes.iter().min().unwrap())
    })
}
