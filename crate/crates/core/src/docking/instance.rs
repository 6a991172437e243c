use crate::error::{Error, Result};

use super::geom::{norm, scale, Vec3};

/// A ligand atom in the ligand's local frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LigandAtom {
    pub position: Vec3,
    /// Interaction weight multiplying every pair term of this atom.
    pub weight: f64,
    /// Rotatable group this atom belongs to, if any.
    pub torsion: Option<usize>,
}

/// A fixed receptor interaction site.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceptorSite {
    pub position: Vec3,
    /// Well depth: the pair energy at `d0` is `-weight * depth`.
    pub depth: f64,
    /// Preferred atom-site distance.
    pub d0: f64,
}

/// Synthetic docking problem: a ligand with rotatable groups and a set of
/// receptor sites.
///
/// Torsion `k` rotates the atoms tagged with `k` about the axis through the
/// ligand origin and the first such atom (its pivot). Groups are disjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct LigandInstance {
    atoms: Vec<LigandAtom>,
    sites: Vec<ReceptorSite>,
    nrot: usize,
    torsion_groups: Vec<Vec<usize>>,
    torsion_axes: Vec<Vec3>,
}

impl LigandInstance {
    pub fn new(atoms: Vec<LigandAtom>, sites: Vec<ReceptorSite>, nrot: usize) -> Result<LigandInstance> {
        if atoms.is_empty() {
            return Err(Error::InvalidInstance("at least one atom is required".into()));
        }
        if sites.is_empty() {
            return Err(Error::InvalidInstance("at least one receptor site is required".into()));
        }
        for (i, a) in atoms.iter().enumerate() {
            if !a.position.iter().all(|c| c.is_finite()) || !a.weight.is_finite() {
                return Err(Error::InvalidInstance(format!("atom {i} has non-finite values")));
            }
            if let Some(t) = a.torsion {
                if t >= nrot {
                    return Err(Error::InvalidInstance(format!(
                        "atom {i} references torsion {t} but nrot is {nrot}"
                    )));
                }
            }
        }
        for (i, s) in sites.iter().enumerate() {
            if !s.position.iter().all(|c| c.is_finite()) || !s.depth.is_finite() || s.depth < 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "site {i} needs finite position and depth >= 0"
                )));
            }
            if !(s.d0.is_finite() && s.d0 > 0.0) {
                return Err(Error::InvalidInstance(format!("site {i} needs d0 > 0")));
            }
        }

        let mut torsion_groups = vec![Vec::new(); nrot];
        for (i, a) in atoms.iter().enumerate() {
            if let Some(t) = a.torsion {
                torsion_groups[t].push(i);
            }
        }
        let mut torsion_axes = Vec::with_capacity(nrot);
        for (k, group) in torsion_groups.iter().enumerate() {
            let axis = match group.first() {
                Some(&pivot) => {
                    let p = atoms[pivot].position;
                    let len = norm(p);
                    if len < 1e-9 {
                        return Err(Error::InvalidInstance(format!(
                            "torsion {k}: pivot atom {pivot} lies on the ligand origin"
                        )));
                    }
                    scale(p, 1.0 / len)
                }
                // Empty groups move nothing; any unit axis will do.
                None => [0.0, 0.0, 1.0],
            };
            torsion_axes.push(axis);
        }

        Ok(LigandInstance {
            atoms,
            sites,
            nrot,
            torsion_groups,
            torsion_axes,
        })
    }

    pub fn atoms(&self) -> &[LigandAtom] {
        &self.atoms
    }

    pub fn sites(&self) -> &[ReceptorSite] {
        &self.sites
    }

    pub fn nrot(&self) -> usize {
        self.nrot
    }

    /// Genotype dimension, `6 + nrot`.
    pub fn dims(&self) -> usize {
        6 + self.nrot
    }

    pub fn torsion_group(&self, k: usize) -> &[usize] {
        &self.torsion_groups[k]
    }

    /// Unit axis of torsion `k` in the local frame.
    pub fn torsion_axis(&self, k: usize) -> Vec3 {
        self.torsion_axes[k]
    }

    /// Same instance with atoms listed in a different order.
    ///
    /// Torsion pivots follow the first atom of each group in the new order, so
    /// callers that need identical geometry should keep pivots in place.
    pub fn with_atom_order(&self, order: &[usize]) -> Result<LigandInstance> {
        let atoms = order.iter().map(|&i| self.atoms[i].clone()).collect();
        LigandInstance::new(atoms, self.sites.clone(), self.nrot)
    }

    /// Center and half-extent of the box that initial poses are drawn from.
    ///
    /// Ligand atoms sit about `d0` inside the sites, so the sites' bounding
    /// box is shrunk by the mean `d0` (not below zero) and then grown by
    /// `margin` on every side.
    pub fn search_box(&self, margin: f64) -> (Vec3, Vec3) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for s in &self.sites {
            for c in 0..3 {
                lo[c] = lo[c].min(s.position[c]);
                hi[c] = hi[c].max(s.position[c]);
            }
        }
        let center = [0, 1, 2].map(|c| 0.5 * (lo[c] + hi[c]));
        let mean_d0 = self.sites.iter().map(|s| s.d0).sum::<f64>() / self.sites.len() as f64;
        let half = [0, 1, 2].map(|c| (0.5 * (hi[c] - lo[c]) - mean_d0).max(0.0) + margin);
        (center, half)
    }
}
