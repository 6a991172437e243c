//! ADADELTA local search and a small Lamarckian genetic algorithm.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::io::{derive_rng, StreamRng};
use crate::reduction::SyncStats;

use super::adadelta::{adadelta_step, AdadeltaState, DEFAULT_EPSILON, DEFAULT_RHO};
use super::genotype::{normalize_angle, Genotype};
use super::instance::LigandInstance;
use super::scoring::{score, Scorer};

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSearchSettings {
    pub max_iters: usize,
    /// Converged once the best energy improved by less than
    /// `convergence_tol * max(|best|, 1)` over the last `window` evaluations.
    /// Relative, so the rule reads the same in binary16 arithmetic, whose
    /// spacing grows with the magnitude of the energy.
    pub convergence_tol: f64,
    pub window: usize,
    pub rho: f64,
    pub epsilon: f64,
}

impl Default for LocalSearchSettings {
    fn default() -> Self {
        LocalSearchSettings {
            max_iters: 300,
            convergence_tol: 1.5e-3,
            window: 32,
            rho: DEFAULT_RHO,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSearchOutcome {
    /// Best genotype seen.
    pub genotype: Genotype,
    pub energy: f64,
    /// Score evaluations performed.
    pub iterations: usize,
    pub converged: bool,
    pub stats: SyncStats,
    /// Running minimum of the energy after each evaluation.
    pub best_trace: Vec<f64>,
}

pub fn local_search(
    inst: &LigandInstance,
    start: &Genotype,
    settings: &LocalSearchSettings,
    scorer: &Scorer,
) -> Result<LocalSearchOutcome> {
    if settings.max_iters == 0 {
        return Err(Error::Config("local search needs max_iters >= 1".into()));
    }
    if settings.window == 0 {
        return Err(Error::Config("local search window must be >= 1".into()));
    }
    if !(settings.convergence_tol >= 0.0 && settings.convergence_tol.is_finite()) {
        return Err(Error::Config(
            "local search convergence_tol must be finite and >= 0".into(),
        ));
    }
    let mut state = AdadeltaState::new(start.dims(), settings.rho, settings.epsilon)?;
    let mut current = start.clone();
    let mut best = start.clone();
    let mut best_energy = f64::INFINITY;
    let mut trace = Vec::with_capacity(settings.max_iters);
    let mut stats = SyncStats::default();
    let mut converged = false;

    for _ in 0..settings.max_iters {
        let r = score(inst, &current, scorer)?;
        stats += r.reduce_stats;
        if r.energy < best_energy {
            best_energy = r.energy;
            best = current.clone();
        }
        trace.push(best_energy);
        let n = trace.len();
        let tol = settings.convergence_tol * best_energy.abs().max(1.0);
        if n > settings.window && trace[n - 1 - settings.window] - best_energy < tol {
            converged = true;
            break;
        }
        let (next_state, next) = adadelta_step(state, &current, &r.gradient)?;
        state = next_state;
        current = next;
    }

    Ok(LocalSearchOutcome {
        genotype: best,
        energy: best_energy,
        iterations: trace.len(),
        converged,
        stats,
        best_trace: trace,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LgaSettings {
    pub population_size: usize,
    pub max_generations: usize,
    /// Hard cap on score evaluations in one run.
    pub max_evaluations: u64,
    /// Fraction of each generation's offspring refined by local search.
    pub ls_fraction: f64,
    pub crossover_rate: f64,
    /// Per-dimension mutation probability.
    pub mutation_rate: f64,
    pub mutation_sigma_translation: f64,
    pub mutation_sigma_angle: f64,
    /// Margin added around the receptor sites when drawing initial poses.
    pub box_margin: f64,
    pub local_search: LocalSearchSettings,
}

impl Default for LgaSettings {
    fn default() -> Self {
        LgaSettings {
            population_size: 16,
            max_generations: 12,
            max_evaluations: 20_000,
            ls_fraction: 0.25,
            crossover_rate: 0.8,
            mutation_rate: 0.1,
            mutation_sigma_translation: 1.0,
            mutation_sigma_angle: 0.5,
            box_margin: 1.0,
            local_search: LocalSearchSettings::default(),
        }
    }
}

impl LgaSettings {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.population_size < 2 {
            return bad("population_size must be >= 2");
        }
        if self.max_evaluations < self.population_size as u64 {
            return bad("max_evaluations must cover the initial population");
        }
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.ls_fraction) || !unit(self.crossover_rate) || !unit(self.mutation_rate) {
            return bad("ls_fraction, crossover_rate and mutation_rate must lie in [0, 1]");
        }
        if !(self.mutation_sigma_translation >= 0.0 && self.mutation_sigma_angle >= 0.0 && self.box_margin >= 0.0) {
            return bad("mutation sigmas and box margin must be >= 0");
        }
        Ok(())
    }
}

/// Summary of one LGA run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub best_energy: f64,
    pub evaluations: u64,
    pub generations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DockResult {
    pub best_energy: f64,
    pub best_genotype: Genotype,
    pub evaluations: u64,
    pub generations: usize,
    /// Whether the local search that produced the best pose converged.
    pub converged: bool,
    pub runs: Vec<RunRecord>,
    /// Reduction counters summed over every score evaluation.
    pub stats: SyncStats,
    pub ls_calls: u64,
    pub ls_nonconverged: u64,
}

#[derive(Debug, Clone)]
struct Individual {
    genotype: Genotype,
    energy: f64,
    /// Convergence of the local search that last refined it, if any.
    ls_converged: Option<bool>,
}

struct Run<'a> {
    inst: &'a LigandInstance,
    settings: &'a LgaSettings,
    scorer: &'a Scorer,
    evaluations: u64,
    stats: SyncStats,
    ls_calls: u64,
    ls_nonconverged: u64,
}

impl Run<'_> {
    fn remaining(&self) -> u64 {
        self.settings.max_evaluations.saturating_sub(self.evaluations)
    }

    fn evaluate(&mut self, genotype: Genotype) -> Result<Individual> {
        let r = score(self.inst, &genotype, self.scorer)?;
        self.evaluations += 1;
        self.stats += r.reduce_stats;
        Ok(Individual {
            genotype,
            energy: r.energy,
            ls_converged: None,
        })
    }

    fn refine(&mut self, ind: &mut Individual) -> Result<()> {
        let budget = self.remaining().min(self.settings.local_search.max_iters as u64) as usize;
        if budget == 0 {
            return Ok(());
        }
        let ls = LocalSearchSettings {
            max_iters: budget,
            ..self.settings.local_search.clone()
        };
        let out = local_search(self.inst, &ind.genotype, &ls, self.scorer)?;
        self.evaluations += out.iterations as u64;
        self.stats += out.stats;
        self.ls_calls += 1;
        if !out.converged {
            self.ls_nonconverged += 1;
        }
        // Lamarckian write-back.
        if out.energy <= ind.energy {
            ind.genotype = out.genotype;
            ind.energy = out.energy;
        }
        ind.ls_converged = Some(out.converged);
        Ok(())
    }
}

fn random_genotype(inst: &LigandInstance, rng: &mut StreamRng, margin: f64) -> Genotype {
    let (center, half) = inst.search_box(margin);
    let translation = [0, 1, 2].map(|c| rng.uniform(center[c] - half[c], center[c] + half[c]));
    let rotation = [(); 3].map(|_| rng.uniform(-PI, PI));
    let torsions = (0..inst.nrot()).map(|_| rng.uniform(-PI, PI)).collect();
    Genotype::new(translation, rotation, torsions)
}

fn tournament<'p>(pop: &'p [Individual], rng: &mut StreamRng) -> &'p Individual {
    let a = &pop[rng.index(pop.len())];
    let b = &pop[rng.index(pop.len())];
    if b.energy < a.energy {
        b
    } else {
        a
    }
}

/// Arithmetic crossover and Gaussian mutation. Draws the same number of
/// random values whatever the outcome, so paired runs stay aligned.
fn breed(a: &Genotype, b: &Genotype, settings: &LgaSettings, rng: &mut StreamRng) -> Result<Genotype> {
    let cross = rng.unit() < settings.crossover_rate;
    let lambda = rng.unit();
    let va = a.to_vec();
    let vb = b.to_vec();
    let mut child: Vec<f64> = va
        .iter()
        .zip(&vb)
        .enumerate()
        .map(|(d, (&x, &y))| {
            if !cross {
                return x;
            }
            let diff = if Genotype::is_angle(d) {
                normalize_angle(y - x)
            } else {
                y - x
            };
            x + (1.0 - lambda) * diff
        })
        .collect();
    for (d, value) in child.iter_mut().enumerate() {
        let mutate = rng.unit() < settings.mutation_rate;
        let z = rng.normal();
        if mutate {
            let sigma = if Genotype::is_angle(d) {
                settings.mutation_sigma_angle
            } else {
                settings.mutation_sigma_translation
            };
            *value += sigma * z;
        }
    }
    Genotype::from_slice(&child, a.nrot())
}

fn sort_by_energy(pop: &mut [Individual]) {
    pop.sort_by(|x, y| x.energy.total_cmp(&y.energy));
}

/// One LGA run from a random initial population drawn from `seed`.
pub fn lga_run(inst: &LigandInstance, settings: &LgaSettings, scorer: &Scorer, seed: u64) -> Result<DockResult> {
    settings.validate()?;
    let mut rng = derive_rng(seed, "lga/init");
    let initial = (0..settings.population_size)
        .map(|_| random_genotype(inst, &mut rng, settings.box_margin))
        .collect();
    lga_run_from(inst, initial, settings, scorer, seed)
}

/// One LGA run from a given initial population.
pub fn lga_run_from(
    inst: &LigandInstance,
    initial: Vec<Genotype>,
    settings: &LgaSettings,
    scorer: &Scorer,
    seed: u64,
) -> Result<DockResult> {
    settings.validate()?;
    if initial.len() != settings.population_size {
        return Err(Error::size(
            "initial population",
            settings.population_size.to_string(),
            initial.len(),
        ));
    }
    if let Some(g) = initial.iter().find(|g| g.nrot() != inst.nrot()) {
        return Err(Error::size("genotype torsions", inst.nrot().to_string(), g.nrot()));
    }
    let mut rng = derive_rng(seed, "lga/ga");
    let mut run = Run {
        inst,
        settings,
        scorer,
        evaluations: 0,
        stats: SyncStats::default(),
        ls_calls: 0,
        ls_nonconverged: 0,
    };

    let mut pop = Vec::with_capacity(initial.len());
    for g in initial {
        pop.push(run.evaluate(g)?);
    }
    sort_by_energy(&mut pop);

    let n_offspring = settings.population_size - 1;
    let n_refine = (settings.ls_fraction * n_offspring as f64).ceil() as usize;
    let mut generations = 0;
    while generations < settings.max_generations && run.remaining() >= n_offspring as u64 {
        let mut offspring = Vec::with_capacity(n_offspring);
        for _ in 0..n_offspring {
            let a = tournament(&pop, &mut rng).genotype.clone();
            let b = tournament(&pop, &mut rng).genotype.clone();
            let child = breed(&a, &b, settings, &mut rng)?;
            offspring.push(run.evaluate(child)?);
        }
        sort_by_energy(&mut offspring);
        for ind in offspring.iter_mut().take(n_refine) {
            run.refine(ind)?;
        }
        // Elitism of one.
        let elite = pop.swap_remove(0);
        pop = std::iter::once(elite).chain(offspring).collect();
        sort_by_energy(&mut pop);
        generations += 1;
    }

    let best = &pop[0];
    let record = RunRecord {
        seed,
        best_energy: best.energy,
        evaluations: run.evaluations,
        generations,
        converged: best.ls_converged.unwrap_or(false),
    };
    Ok(DockResult {
        best_energy: best.energy,
        best_genotype: best.genotype.clone(),
        evaluations: run.evaluations,
        generations,
        converged: record.converged,
        runs: vec![record],
        stats: run.stats,
        ls_calls: run.ls_calls,
        ls_nonconverged: run.ls_nonconverged,
    })
}
