use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng as _;

use sector_snake::experiments::banding::mean_band;
use sector_snake::graphs::{laplacian, path_window_graph};
use sector_snake::hamiltonian::{
    barrier_potential_by_position, banding_family, hybrid_driver, BandingFamily, BarrierTargetConfig, DriverBasis,
    DriverConfig,
};
use sector_snake::linalg::{eigh, evolve_step, HermitianOperator, StateVector};
use sector_snake::ordering::{
    build_ordering, fixed_prefix, hamming, skeleton, standard_ordering, strict_ordering, OrderingKind,
};
use sector_snake::rng::seeded_rng;

fn kind() -> impl Strategy<Value = OrderingKind> {
    prop::sample::select(OrderingKind::ALL.to_vec())
}

fn random_hermitian(dim: usize, seed: u64) -> HermitianOperator {
    let mut rng = seeded_rng(seed);
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        data[i * dim + i] = Complex64::new(rng.random_range(-2.0..2.0), 0.0);
        for j in i + 1..dim {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            data[i * dim + j] = z;
            data[j * dim + i] = z.conj();
        }
    }
    HermitianOperator::from_complex(dim, data).unwrap()
}

fn random_state(dim: usize, seed: u64) -> StateVector {
    let mut rng = seeded_rng(seed ^ 0x5eed);
    let amps = (0..dim).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    StateVector::normalized(amps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gray_steps_flip_one_bit(n in 1u32..=16) {
        let o = standard_ordering(OrderingKind::Gray, n, None).unwrap();
        prop_assert!(o.states().windows(2).all(|w| hamming(w[0], w[1]) == 1));
    }

    #[test]
    fn every_kind_is_a_bijection(kind in kind(), n in 1u32..=10, seed in any::<u64>()) {
        // Strict search beyond eight bits is unbounded.
        let n = if kind == OrderingKind::Strict { n.min(8) } else { n };
        let o = build_ordering(kind, n, Some(seed)).unwrap();
        let mut sorted = o.states().to_vec();
        sorted.sort_unstable();
        prop_assert!(sorted.iter().enumerate().all(|(i, &x)| x == i as u32));
        for (t, &x) in o.states().iter().enumerate() {
            prop_assert_eq!(o.position(x), t);
        }
    }

    #[test]
    fn sector_preserving_random_shares_skeleton(n in 2u32..=10, seed in any::<u64>()) {
        let o = standard_ordering(OrderingKind::SectorPreservingRandom, n, Some(seed)).unwrap();
        prop_assert_eq!(o.weights(), skeleton(n).unwrap().weights);
        let prefix = fixed_prefix(n);
        prop_assert_eq!(&o.states()[..prefix.len()], &prefix[..]);
    }

    #[test]
    fn path_window_edges_grow_with_w(kind in kind(), n in 2u32..=6, seed in any::<u64>(), w in 1usize..12) {
        let o = build_ordering(kind, n, Some(seed)).unwrap();
        let small = path_window_graph(&o, w).unwrap();
        let large = path_window_graph(&o, w + 1).unwrap();
        prop_assert!(small.edges().iter().all(|&(x, y)| large.contains(x, y)));
        prop_assert!(small.edge_count() <= large.edge_count());
    }

    #[test]
    fn matched_window_mean_band_at_most_w(kind in kind(), n in 2u32..=7, seed in any::<u64>(), w in 1usize..10) {
        let o = build_ordering(kind, n, Some(seed)).unwrap();
        let h = banding_family(BandingFamily::PathWindow, n, Some(&o), w).unwrap();
        prop_assert!(mean_band(&h, &o).unwrap() <= w as f64 + 1e-12);
    }

    #[test]
    fn path_laplacian_psd_kernel_tracks_connectivity(kind in kind(), n in 2u32..=6, seed in any::<u64>(), w in 1usize..6) {
        let o = build_ordering(kind, n, Some(seed)).unwrap();
        let graph = path_window_graph(&o, w).unwrap();
        let lap = laplacian(&graph, true).unwrap();
        let values = eigh(&lap.operator).unwrap().eigenvalues().to_vec();
        prop_assert!(values[0] >= -1e-10);
        prop_assert_eq!(values[1] > 1e-8, graph.is_connected());
        if matches!(kind, OrderingKind::Strict | OrderingKind::Gray) {
            prop_assert!(graph.is_connected());
        }
        let ones = StateVector::uniform(lap.operator.dim());
        let image = lap.operator.apply(ones.amplitudes()).unwrap();
        prop_assert!(image.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn hybrid_driver_ground_state_is_uniform(alpha in 0.0f64..=1.0, epsilon in 0.0f64..=1.0, w in 1usize..10) {
        let n = 5;
        let basis = DriverBasis::new(n).unwrap();
        let strict = strict_ordering(n).unwrap();
        let path = basis.path(&strict, w).unwrap();
        let cfg = DriverConfig::new(alpha, epsilon, w).unwrap();
        let h = hybrid_driver(&cfg, &basis, Some(&path)).unwrap();
        prop_assert!(h.max_hermiticity_defect() <= 1e-12);
        let ones = StateVector::uniform(h.dim());
        prop_assert!(h.apply(ones.amplitudes()).unwrap().iter().all(|z| z.norm() < 1e-12));
        prop_assert!(eigh(&h).unwrap().eigenvalues()[0] > -1e-10);
    }

    #[test]
    fn barrier_potential_matches_formula(h in 0.0f64..1.0, sigma in 0.01f64..0.3, p_star_frac in 0.0f64..=1.0, n in 3u32..=8) {
        let cfg = BarrierTargetConfig { h, sigma, p_star_frac, ..Default::default() };
        let len = 1usize << n;
        let got = barrier_potential_by_position(&cfg, len).unwrap();
        let span = (len - 1) as f64;
        let p_star = (p_star_frac * span).round();
        let raw: Vec<f64> = (0..len)
            .map(|p| {
                let p = p as f64;
                let g = (p - 0.35 * span) / (sigma * len as f64);
                (p - p_star).abs() / span + h * (-g * g).exp()
            })
            .collect();
        let lo = raw.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (a, b) in got.iter().zip(&raw) {
            prop_assert!((a - (b - lo) / (hi - lo)).abs() <= 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn propagation_is_unitary(dim in 2usize..=12, seed in any::<u64>(), dt in -5.0f64..5.0) {
        let h = random_hermitian(dim, seed);
        let psi = random_state(dim, seed);
        let out = evolve_step(&h, dt, &psi).unwrap();
        prop_assert!((out.norm() - 1.0).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn eigenvalue_sum_equals_trace(dim in 1usize..=24, seed in any::<u64>()) {
        let h = random_hermitian(dim, seed);
        let trace: f64 = h.diagonal().iter().sum();
        let sum: f64 = eigh(&h).unwrap().eigenvalues().iter().sum();
        prop_assert!((trace - sum).abs() <= 1e-9 * dim as f64);
    }

    #[test]
    fn evolution_composes_and_reverses(dim in 2usize..=10, seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let h = random_hermitian(dim, seed);
        let psi = random_state(dim, seed);
        let joint = evolve_step(&h, a + b, &psi).unwrap();
        let split = evolve_step(&h, b, &evolve_step(&h, a, &psi).unwrap()).unwrap();
        let back = evolve_step(&h, -a, &evolve_step(&h, a, &psi).unwrap()).unwrap();
        for i in 0..dim {
            prop_assert!((joint.amplitudes()[i] - split.amplitudes()[i]).norm() <= 1e-9);
            prop_assert!((back.amplitudes()[i] - psi.amplitudes()[i]).norm() <= 1e-9);
        }
    }
}
