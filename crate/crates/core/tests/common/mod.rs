#![allow(dead_code)]

use mdreduce::docking::{Genotype, LigandAtom, LigandInstance, ReceptorSite};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A small random ligand with `nrot` rotatable groups facing a shell of sites.
pub fn random_instance(rng: &mut ChaCha8Rng, nrot: usize) -> LigandInstance {
    let n_atoms = rng.gen_range(nrot.max(1) * 2..=nrot * 2 + 8);
    let mut atoms: Vec<LigandAtom> = (0..n_atoms)
        .map(|_| LigandAtom {
            position: [(); 3].map(|_| rng.gen_range(-2.0..2.0)),
            weight: rng.gen_range(0.5..1.5),
            torsion: None,
        })
        .collect();
    // Two atoms per group guarantees every group has a pivot and a mover.
    for k in 0..nrot {
        atoms[2 * k].torsion = Some(k);
        atoms[2 * k + 1].torsion = Some(k);
    }
    for a in atoms.iter_mut().skip(2 * nrot) {
        if rng.gen_bool(0.3) && nrot > 0 {
            a.torsion = Some(rng.gen_range(0..nrot));
        }
    }
    let n_sites = rng.gen_range(4..=12);
    let sites = (0..n_sites)
        .map(|_| ReceptorSite {
            position: [(); 3].map(|_| rng.gen_range(-5.0..5.0)),
            depth: rng.gen_range(0.2..1.0),
            d0: rng.gen_range(3.0..4.0),
        })
        .collect();
    LigandInstance::new(atoms, sites, nrot).unwrap()
}

pub fn random_genotype(rng: &mut ChaCha8Rng, nrot: usize) -> Genotype {
    let pi = std::f64::consts::PI;
    Genotype::new(
        [(); 3].map(|_| rng.gen_range(-1.5..1.5)),
        [(); 3].map(|_| rng.gen_range(-pi..pi)),
        (0..nrot).map(|_| rng.gen_range(-pi..pi)).collect(),
    )
}

/// Central differences of the reference energy, one genotype dimension at a
/// time.
pub fn finite_difference_gradient(inst: &LigandInstance, g: &Genotype, h: f64) -> Vec<f64> {
    let base = g.to_vec();
    (0..base.len())
        .map(|d| {
            let mut plus = base.clone();
            let mut minus = base.clone();
            plus[d] += h;
            minus[d] -= h;
            let e = |v: &[f64]| {
                let g = Genotype::from_slice(v, inst.nrot()).unwrap();
                mdreduce::docking::score_reference(inst, &g).energy
            };
            (e(&plus) - e(&minus)) / (2.0 * h)
        })
        .collect()
}
