use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

use super::geom::Vec3;

/// Wraps an angle into `[-pi, pi)`.
pub fn normalize_angle(a: f64) -> f64 {
    if (-PI..PI).contains(&a) {
        return a;
    }
    let mut r = a - TAU * libm::floor((a + PI) / TAU);
    if r >= PI {
        r -= TAU;
    }
    if r < -PI {
        r = -PI;
    }
    r
}

/// Ligand pose: translation, z-y-z Euler rotation and torsion angles.
///
/// Flattened as `[x, y, z, phi, theta, alpha, psi_1 .. psi_nrot]`. Angles are
/// kept in `[-pi, pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Genotype {
    translation: Vec3,
    rotation: Vec3,
    torsions: Vec<f64>,
}

impl Genotype {
    pub fn new(translation: Vec3, rotation: Vec3, torsions: Vec<f64>) -> Genotype {
        Genotype {
            translation,
            rotation: rotation.map(normalize_angle),
            torsions: torsions.into_iter().map(normalize_angle).collect(),
        }
    }

    /// The identity pose with `nrot` zero torsions.
    pub fn origin(nrot: usize) -> Genotype {
        Genotype::new([0.0; 3], [0.0; 3], vec![0.0; nrot])
    }

    pub fn from_slice(values: &[f64], nrot: usize) -> Result<Genotype> {
        if values.len() != 6 + nrot {
            return Err(Error::size("genotype", (6 + nrot).to_string(), values.len()));
        }
        Ok(Genotype::new(
            [values[0], values[1], values[2]],
            [values[3], values[4], values[5]],
            values[6..].to_vec(),
        ))
    }

    pub fn dims(&self) -> usize {
        6 + self.torsions.len()
    }

    pub fn nrot(&self) -> usize {
        self.torsions.len()
    }

    pub fn translation(&self) -> Vec3 {
        self.translation
    }

    /// `(phi, theta, alpha)`.
    pub fn rotation(&self) -> Vec3 {
        self.rotation
    }

    pub fn torsions(&self) -> &[f64] {
        &self.torsions
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dims());
        v.extend_from_slice(&self.translation);
        v.extend_from_slice(&self.rotation);
        v.extend_from_slice(&self.torsions);
        v
    }

    /// Dimension `d` is an angle (rotation or torsion).
    pub fn is_angle(d: usize) -> bool {
        d >= 3
    }

    /// Adds `delta` and re-wraps angles.
    pub fn displaced(&self, delta: &[f64]) -> Result<Genotype> {
        if delta.len() != self.dims() {
            return Err(Error::size("genotype delta", self.dims().to_string(), delta.len()));
        }
        let v: Vec<f64> = self.to_vec().iter().zip(delta).map(|(a, b)| a + b).collect();
        Genotype::from_slice(&v, self.nrot())
    }
}
