mod common;

use common::{random_genotype, random_instance};
use mdreduce::docking::{
    bundled_instance, lga_run, lga_run_from, local_search, validate_pair, Genotype, LgaSettings, LigandAtom,
    LigandInstance, LocalSearchSettings, ReceptorSite, Scorer,
};
use mdreduce::simblock::BlockConfig;
use mdreduce::{AccumMode, Method};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tcu_half() -> Scorer {
    Scorer::Block(BlockConfig::new(64, Method::Tcu, AccumMode::Half).unwrap())
}

fn baseline() -> Scorer {
    Scorer::Block(BlockConfig::new(64, Method::Baseline, AccumMode::Single).unwrap())
}

fn quick() -> LgaSettings {
    LgaSettings {
        max_generations: 4,
        ..LgaSettings::default()
    }
}

#[test]
fn bowl_reaches_the_analytic_minimum() {
    let inst = LigandInstance::new(
        vec![LigandAtom {
            position: [0.0; 3],
            weight: 1.25,
            torsion: None,
        }],
        vec![ReceptorSite {
            position: [0.0; 3],
            depth: 0.8,
            d0: 3.0,
        }],
        0,
    )
    .unwrap();
    let settings = LocalSearchSettings {
        max_iters: 2000,
        convergence_tol: 1e-6,
        ..LocalSearchSettings::default()
    };
    for start in [[3.6, 0.0, 0.0], [2.8, 0.4, -0.3], [0.5, 3.9, 0.2]] {
        let g = Genotype::new(start, [0.3, 1.0, -0.4], vec![]);
        let out = local_search(&inst, &g, &settings, &Scorer::Reference).unwrap();
        assert!((out.energy + 1.0).abs() < 1e-3, "{start:?}: {}", out.energy);
    }
}

#[test]
fn best_trace_is_a_running_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for trial in 0..20 {
        let nrot = trial % 4;
        let inst = random_instance(&mut rng, nrot);
        let g = random_genotype(&mut rng, nrot);
        for scorer in [Scorer::Reference, tcu_half()] {
            let out = local_search(&inst, &g, &LocalSearchSettings::default(), &scorer).unwrap();
            assert_eq!(out.best_trace.len(), out.iterations);
            assert!(out.best_trace.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(*out.best_trace.last().unwrap(), out.energy);
            assert!(out.converged || out.iterations == LocalSearchSettings::default().max_iters);
        }
    }
}

#[test]
fn local_search_is_deterministic() {
    let inst = bundled_instance("S2").unwrap();
    let g = random_genotype(&mut ChaCha8Rng::seed_from_u64(52), inst.nrot());
    let a = local_search(&inst, &g, &LocalSearchSettings::default(), &tcu_half()).unwrap();
    let b = local_search(&inst, &g, &LocalSearchSettings::default(), &tcu_half()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn same_seed_gives_the_same_run() {
    let inst = bundled_instance("S3").unwrap();
    for scorer in [Scorer::Reference, baseline(), tcu_half()] {
        let a = lga_run(&inst, &quick(), &scorer, 77).unwrap();
        let b = lga_run(&inst, &quick(), &scorer, 77).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.best_energy.to_bits(), b.best_energy.to_bits());
    }
}

#[test]
fn two_identical_individuals_reduce_to_one_local_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for trial in 0..10 {
        let nrot = trial % 4;
        let inst = random_instance(&mut rng, nrot);
        let g = random_genotype(&mut rng, nrot);
        let settings = LgaSettings {
            population_size: 2,
            max_generations: 1,
            ls_fraction: 1.0,
            mutation_rate: 0.0,
            ..LgaSettings::default()
        };
        let run = lga_run_from(
            &inst,
            vec![g.clone(), g.clone()],
            &settings,
            &Scorer::Reference,
            trial as u64,
        )
        .unwrap();
        let ls = local_search(&inst, &g, &settings.local_search, &Scorer::Reference).unwrap();
        assert_eq!(run.best_energy, ls.energy);
        assert_eq!(run.best_genotype, ls.genotype);
        assert_eq!(run.converged, ls.converged);
        assert_eq!(run.generations, 1);
        assert_eq!(run.evaluations, 3 + ls.iterations as u64);
    }
}

#[test]
fn evaluation_cap_is_respected() {
    let inst = bundled_instance("S1").unwrap();
    let settings = LgaSettings {
        max_evaluations: 500,
        max_generations: 1000,
        ..LgaSettings::default()
    };
    let out = lga_run(&inst, &settings, &Scorer::Reference, 3).unwrap();
    assert!(out.evaluations <= 500);
    assert!(out.generations < 1000);
}

#[test]
fn tcu_runs_never_count_atomics_or_fences() {
    let inst = bundled_instance("S2").unwrap();
    let out = lga_run(&inst, &quick(), &tcu_half(), 5).unwrap();
    assert_eq!(out.stats.atomic_adds, 0);
    assert_eq!(out.stats.memory_fences, 0);
    assert_eq!(out.stats.block_syncs, 4 * out.evaluations);
    let base = lga_run(&inst, &quick(), &baseline(), 5).unwrap();
    assert_eq!(base.stats.block_syncs, 21 * base.evaluations);
}

#[test]
fn invalid_settings_are_rejected() {
    let inst = bundled_instance("S1").unwrap();
    let bad = [
        LgaSettings {
            population_size: 1,
            ..LgaSettings::default()
        },
        LgaSettings {
            ls_fraction: 1.5,
            ..LgaSettings::default()
        },
        LgaSettings {
            mutation_sigma_angle: -1.0,
            ..LgaSettings::default()
        },
    ];
    for s in bad {
        assert!(lga_run(&inst, &s, &Scorer::Reference, 1).is_err());
    }
    let g = Genotype::origin(2);
    assert!(lga_run_from(&inst, vec![g; 16], &LgaSettings::default(), &Scorer::Reference, 1).is_err());
}

#[test]
fn identical_methods_validate_with_zero_error() {
    let inst = bundled_instance("S1").unwrap();
    let report = validate_pair(&inst, 6, 100, &quick(), &baseline(), &baseline()).unwrap();
    assert_eq!(report.relative_error, 0.0);
    assert_eq!(report.abs_diff_of_means, 0.0);
    assert_eq!(report.mean_paired_abs_diff, 0.0);
    assert_eq!(report.reference, report.candidate);
    assert_eq!(
        report.reference.nonconverged_fraction,
        report.candidate.nonconverged_fraction
    );
    assert_eq!(report.reference_runs.len(), 6);
    let seeds: Vec<u64> = report.candidate_runs.iter().map(|r| r.runs[0].seed).collect();
    assert_eq!(seeds, (100..106).collect::<Vec<_>>());
    assert!(validate_pair(&inst, 0, 1, &quick(), &baseline(), &baseline()).is_err());
}

#[test]
fn summary_is_ordered() {
    let inst = bundled_instance("S2").unwrap();
    let report = validate_pair(&inst, 8, 7, &quick(), &Scorer::Reference, &tcu_half()).unwrap();
    for s in [&report.reference, &report.candidate] {
        assert!(s.min <= s.q1 && s.q1 <= s.median && s.median <= s.q3 && s.q3 <= s.max);
        assert!(s.min <= s.mean && s.mean <= s.max);
        assert!((0.0..=1.0).contains(&s.nonconverged_fraction));
    }
}
