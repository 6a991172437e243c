//! Synthetic pairwise scoring with an analytic gradient.
//!
//! Every ligand atom interacts with every receptor site through a 12-6 well
//!
//! ```text
//! E(d) = w * depth * ((d0/d)^12 - 2 (d0/d)^6)
//! ```
//!
//! whose minimum `-w * depth` sits at `d = d0`. Repulsive values are squashed
//! by `C * tanh(E / C)` so overlapping poses stay finite and fit in binary16.
//!
//! The block path splits atoms round-robin over simulated threads. Each thread
//! accumulates `(E, dE/dx, dE/dy, dE/dz, torque)` in binary32 and the block
//! reduces the seven components. Rotation gradients are the reduced torque
//! projected on the Euler axes. Each torsion gradient is its group's torque
//! projected on the torsion axis; group torques are summed per group outside
//! the seven-component reduction.

use crate::error::Result;
use crate::reduction::{dim7, reduce7, SyncStats};
use crate::simblock::BlockConfig;

use super::genotype::Genotype;
use super::geom::{add, cross, dot, euler_zyz, euler_zyz_axes, mat_vec, norm, rotate_about, scale, sub, Vec3};
use super::instance::LigandInstance;

/// Saturation level for repulsive pair energies.
pub const PAIR_ENERGY_CAP: f64 = 8.0;
/// Distances are clamped below this to avoid the singularity at `d = 0`.
pub const MIN_DISTANCE: f64 = 1e-6;

/// How the per-atom terms are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scorer {
    /// Double precision, summed directly with no block reduction.
    Reference,
    /// Binary32 per-thread partials combined by a simulated block reduction.
    Block(BlockConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreResult {
    pub energy: f64,
    /// `dE/d(genotype)`, length `6 + nrot`.
    pub gradient: Vec<f64>,
    /// `sum (p_a - t) x dE/dp_a` over all atoms.
    pub torque: Vec3,
    pub reduce_stats: SyncStats,
}

/// Pair energy and its derivative with respect to distance.
pub fn pair_energy(d: f64, weight: f64, depth: f64, d0: f64) -> (f64, f64) {
    let d = d.max(MIN_DISTANCE);
    let s = d0 / d;
    let s6 = s * s * s * s * s * s;
    let scale_e = weight * depth;
    let raw = scale_e * (s6 * s6 - 2.0 * s6);
    let draw = scale_e * 12.0 * (s6 - s6 * s6) / d;
    if raw <= 0.0 {
        (raw, draw)
    } else {
        let t = libm::tanh(raw / PAIR_ENERGY_CAP);
        (PAIR_ENERGY_CAP * t, (1.0 - t * t) * draw)
    }
}

struct Pose {
    /// World positions.
    positions: Vec<Vec3>,
    translation: Vec3,
    euler_axes: [Vec3; 3],
    /// Torsion axes rotated into the world frame.
    torsion_axes: Vec<Vec3>,
}

fn build_pose(inst: &LigandInstance, g: &Genotype) -> Pose {
    let [phi, theta, alpha] = g.rotation();
    let rot = euler_zyz(phi, theta, alpha);
    let t = g.translation();
    let torsions = g.torsions();
    let positions = inst
        .atoms()
        .iter()
        .map(|a| {
            let local = match a.torsion {
                Some(k) => rotate_about(a.position, inst.torsion_axis(k), torsions[k]),
                None => a.position,
            };
            add(mat_vec(&rot, local), t)
        })
        .collect();
    let torsion_axes = (0..inst.nrot()).map(|k| mat_vec(&rot, inst.torsion_axis(k))).collect();
    Pose {
        positions,
        translation: t,
        euler_axes: euler_zyz_axes(phi, theta),
        torsion_axes,
    }
}

/// Energy and position gradient of one atom against all sites.
fn atom_terms(inst: &LigandInstance, atom: usize, p: Vec3) -> (f64, Vec3) {
    let w = inst.atoms()[atom].weight;
    let mut e = 0.0;
    let mut grad = [0.0; 3];
    for site in inst.sites() {
        let r = sub(p, site.position);
        let d = norm(r);
        let (pe, dpe) = pair_energy(d, w, site.depth, site.d0);
        e += pe;
        // Below the clamp the energy is flat.
        if d >= MIN_DISTANCE {
            grad = add(grad, scale(r, dpe / d));
        }
    }
    (e, grad)
}

fn assemble_gradient(pose: &Pose, force: Vec3, torque: Vec3, torsion_torques: &[Vec3]) -> Vec<f64> {
    let mut gradient = Vec::with_capacity(6 + torsion_torques.len());
    gradient.extend_from_slice(&force);
    gradient.extend(pose.euler_axes.iter().map(|axis| dot(*axis, torque)));
    gradient.extend(
        torsion_torques
            .iter()
            .zip(&pose.torsion_axes)
            .map(|(tq, axis)| dot(*axis, *tq)),
    );
    gradient
}

/// Double-precision energy and gradient, no reduction.
pub fn score_reference(inst: &LigandInstance, g: &Genotype) -> ScoreResult {
    let pose = build_pose(inst, g);
    let mut energy = 0.0;
    let mut force = [0.0; 3];
    let mut torque = [0.0; 3];
    let mut torsion_torques = vec![[0.0; 3]; inst.nrot()];
    for (i, &p) in pose.positions.iter().enumerate() {
        let (e, grad) = atom_terms(inst, i, p);
        let tq = cross(sub(p, pose.translation), grad);
        energy += e;
        force = add(force, grad);
        torque = add(torque, tq);
        if let Some(k) = inst.atoms()[i].torsion {
            torsion_torques[k] = add(torsion_torques[k], tq);
        }
    }
    ScoreResult {
        energy,
        gradient: assemble_gradient(&pose, force, torque, &torsion_torques),
        torque,
        reduce_stats: SyncStats::default(),
    }
}

/// Energy and gradient through a simulated block reduction.
pub fn score_block(inst: &LigandInstance, g: &Genotype, config: &BlockConfig) -> Result<ScoreResult> {
    let pose = build_pose(inst, g);
    let mut partials = vec![[0.0f32; 7]; config.threads()];
    let mut torsion_torques = vec![[0.0f32; 3]; inst.nrot()];
    for (i, &p) in pose.positions.iter().enumerate() {
        let (e, grad) = atom_terms(inst, i, p);
        let tq = cross(sub(p, pose.translation), grad);
        let slot = &mut partials[i % config.threads()];
        slot[dim7::ENERGY] += e as f32;
        slot[dim7::GX] += grad[0] as f32;
        slot[dim7::GY] += grad[1] as f32;
        slot[dim7::GZ] += grad[2] as f32;
        slot[dim7::TX] += tq[0] as f32;
        slot[dim7::TY] += tq[1] as f32;
        slot[dim7::TZ] += tq[2] as f32;
        if let Some(k) = inst.atoms()[i].torsion {
            for c in 0..3 {
                torsion_torques[k][c] += tq[c] as f32;
            }
        }
    }

    let (total, reduce_stats) = reduce7(&partials, config.method(), config.accum())?;
    let widen = |a: f32, b: f32, c: f32| [a as f64, b as f64, c as f64];
    let force = widen(total[dim7::GX], total[dim7::GY], total[dim7::GZ]);
    let torque = widen(total[dim7::TX], total[dim7::TY], total[dim7::TZ]);
    let torsion_torques: Vec<Vec3> = torsion_torques.iter().map(|t| widen(t[0], t[1], t[2])).collect();
    Ok(ScoreResult {
        energy: total[dim7::ENERGY] as f64,
        gradient: assemble_gradient(&pose, force, torque, &torsion_torques),
        torque,
        reduce_stats,
    })
}

pub fn score(inst: &LigandInstance, g: &Genotype, scorer: &Scorer) -> Result<ScoreResult> {
    match scorer {
        Scorer::Reference => Ok(score_reference(inst, g)),
        Scorer::Block(config) => score_block(inst, g, config),
    }
}
