use mdreduce::reduction::{baseline_block_reduce, reduce4, reduce7};
use mdreduce::simblock::{
    estimate_cost, scaling_sweep, simulate_block, BlockConfig, BlockInputs, CostWeights, Reduced, SWEEP_SIZES,
};
use mdreduce::{AccumMode, Error, Method, SyncStats, Vec4};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_vec4s(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec4> {
    (0..n)
        .map(|_| Vec4::from_array([(); 4].map(|_| rng.gen_range(-1.0f32..1.0))))
        .collect()
}

#[test]
fn dispatch_matches_direct_calls_bit_for_bit() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for threads in [64, 96, 256, 1024] {
        for accum in [AccumMode::Half, AccumMode::Single] {
            let vs = random_vec4s(&mut rng, threads);
            let cfg = BlockConfig::new(threads, Method::Tcu, accum).unwrap();
            let (got, stats) = simulate_block(&cfg, &BlockInputs::Vec4(vs.clone())).unwrap();
            let (direct, direct_stats) = reduce4(&vs, accum).unwrap();
            assert_eq!(got, Reduced::Vec4(direct));
            assert_eq!(stats, direct_stats);

            let cfg = BlockConfig::new(threads, Method::Baseline, accum).unwrap();
            let (got, stats) = simulate_block(&cfg, &BlockInputs::Vec4(vs.clone())).unwrap();
            let mut expect = [0.0f32; 4];
            let mut expect_stats = SyncStats::default();
            for (c, slot) in expect.iter_mut().enumerate() {
                let column: Vec<f32> = vs.iter().map(|v| v.to_array()[c]).collect();
                let (s, st) = baseline_block_reduce(&column, threads).unwrap();
                *slot = s;
                expect_stats += st;
            }
            let Reduced::Vec4(got) = got else { panic!() };
            assert_eq!(got.to_array().map(f32::to_bits), expect.map(f32::to_bits));
            assert_eq!(stats, expect_stats);

            let recs: Vec<[f32; 7]> = (0..threads)
                .map(|_| [(); 7].map(|_| rng.gen_range(-1.0f32..1.0)))
                .collect();
            for method in [Method::Baseline, Method::Tcu] {
                let cfg = BlockConfig::new(threads, method, accum).unwrap();
                let (got, stats) = simulate_block(&cfg, &BlockInputs::Seven(recs.clone())).unwrap();
                let (direct, direct_stats) = reduce7(&recs, method, accum).unwrap();
                let Reduced::Seven(got) = got else { panic!() };
                assert_eq!(got.map(f32::to_bits), direct.map(f32::to_bits));
                assert_eq!(stats, direct_stats);
            }
        }
    }
}

#[test]
fn documented_examples() {
    let cfg = BlockConfig::new(64, Method::Tcu, AccumMode::Half).unwrap();
    let (out, _) = simulate_block(&cfg, &BlockInputs::Vec4(vec![Vec4::new(1.0, 1.0, 1.0, 1.0); 64])).unwrap();
    assert_eq!(out, Reduced::Vec4(Vec4::new(64.0, 64.0, 64.0, 64.0)));

    let cfg = BlockConfig::new(1024, Method::Baseline, AccumMode::Single).unwrap();
    let (_, stats) = simulate_block(&cfg, &BlockInputs::Seven(vec![[1.0; 7]; 1024])).unwrap();
    assert_eq!(stats.block_syncs, 21);

    let cfg = BlockConfig::new(1024, Method::Tcu, AccumMode::Half).unwrap();
    let (_, stats) = simulate_block(&cfg, &BlockInputs::Vec4(vec![Vec4::ZERO; 1024])).unwrap();
    assert_eq!((stats.block_syncs, stats.mma_ops), (2, 17));

    let unit = SyncStats {
        block_syncs: 2,
        mma_ops: 2,
        ..SyncStats::default()
    };
    assert_eq!(estimate_cost(&unit, &CostWeights::unit()), 4.0);
    assert_eq!(estimate_cost(&SyncStats::default(), &CostWeights::default()), 0.0);
}

#[test]
fn size_errors() {
    assert!(matches!(
        BlockConfig::new(32, Method::Tcu, AccumMode::Half),
        Err(Error::UnsupportedBlockSize { threads: 32, .. })
    ));
    let msg = BlockConfig::new(32, Method::Tcu, AccumMode::Half)
        .unwrap_err()
        .to_string();
    assert!(msg.contains("64"), "{msg}");
    let cfg = BlockConfig::new(128, Method::Baseline, AccumMode::Half).unwrap();
    assert!(matches!(
        simulate_block(&cfg, &BlockInputs::Seven(vec![[0.0; 7]; 64])),
        Err(Error::SizeMismatch { got: 64, .. })
    ));
    assert!(scaling_sweep(&[64, 2048], AccumMode::Half, &CostWeights::default()).is_err());
    assert!(scaling_sweep(&[32], AccumMode::Half, &CostWeights::default()).is_err());
}

#[test]
fn sweep_counters() {
    let rows = scaling_sweep(&SWEEP_SIZES, AccumMode::Half, &CostWeights::default()).unwrap();
    assert_eq!(rows.iter().map(|r| r.threads).collect::<Vec<_>>(), SWEEP_SIZES);
    for r in &rows {
        assert_eq!(r.baseline_per_call.atomic_adds, (r.threads / 32) as u64);
        assert_eq!(r.baseline_per_call.block_syncs, 3);
        assert_eq!(r.baseline_calls, 4);
        assert_eq!(r.tcu.atomic_adds, 0);
        assert_eq!(r.tcu.block_syncs, 2);
        assert_eq!(r.tcu.mma_ops, (r.threads / 64) as u64 + 1);
        assert!(r.cost_ratio >= 1.0);
        assert!(!r.degenerate);
    }
    assert_eq!(rows[0].tcu.mma_ops, 2);
    assert_eq!(rows[4].tcu.mma_ops, 17);
    assert_eq!(rows[4].baseline_per_call.atomic_adds, 32);
    for pair in rows[..4].windows(2) {
        assert!(pair[1].cost_ratio > pair[0].cost_ratio);
    }
    assert_eq!(
        rows,
        scaling_sweep(&SWEEP_SIZES, AccumMode::Half, &CostWeights::default()).unwrap()
    );
}

#[test]
fn zero_weights_are_degenerate() {
    let zero = CostWeights {
        block_sync: 0.0,
        shuffle: 0.0,
        atomic: 0.0,
        mma: 0.0,
        fence: 0.0,
    };
    for r in scaling_sweep(&SWEEP_SIZES, AccumMode::Single, &zero).unwrap() {
        assert!(r.degenerate);
        assert_eq!(r.cost_ratio, 1.0);
    }
    let negative = CostWeights {
        atomic: -1.0,
        ..CostWeights::default()
    };
    assert!(scaling_sweep(&SWEEP_SIZES, AccumMode::Half, &negative).is_err());
}

proptest! {
    #[test]
    fn cost_is_linear(
        syncs in 0u64..1000, shuffles in 0u64..1000, atomics in 0u64..1000, mmas in 0u64..1000, fences in 0u64..1000,
        k in 0u64..10,
    ) {
        let s = SyncStats { block_syncs: syncs, warp_shuffles: shuffles, atomic_adds: atomics, mma_ops: mmas, memory_fences: fences, ..SyncStats::default() };
        let w = CostWeights::default();
        prop_assert_eq!(estimate_cost(&s.times(k), &w), k as f64 * estimate_cost(&s, &w));
        prop_assert_eq!(estimate_cost(&s, &CostWeights::unit()), (syncs + shuffles + atomics + mmas + fences) as f64);
    }

    #[test]
    fn counters_do_not_depend_on_values(warps in 2usize..=32, seed in any::<u64>()) {
        let threads = warps * 32;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vs = random_vec4s(&mut rng, threads);
        for method in [Method::Baseline, Method::Tcu] {
            let cfg = BlockConfig::new(threads, method, AccumMode::Half).unwrap();
            let (_, a) = simulate_block(&cfg, &BlockInputs::Vec4(vs.clone())).unwrap();
            let (_, b) = simulate_block(&cfg, &BlockInputs::Vec4(vec![Vec4::ZERO; threads])).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
