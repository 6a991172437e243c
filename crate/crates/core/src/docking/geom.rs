//! Small fixed-size vector helpers and the z-y-z Euler rotation.

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn mat_vec(m: &Mat3, v: Vec3) -> Vec3 {
    [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn rot_z(a: f64) -> Mat3 {
    let (s, c) = (libm::sin(a), libm::cos(a));
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

pub fn rot_y(a: f64) -> Mat3 {
    let (s, c) = (libm::sin(a), libm::cos(a));
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

/// `Rz(phi) · Ry(theta) · Rz(alpha)`.
pub fn euler_zyz(phi: f64, theta: f64, alpha: f64) -> Mat3 {
    mat_mul(&mat_mul(&rot_z(phi), &rot_y(theta)), &rot_z(alpha))
}

/// World-frame axes whose cross product with `p - t` gives the derivative of
/// `p` with respect to `phi`, `theta` and `alpha`.
pub fn euler_zyz_axes(phi: f64, theta: f64) -> [Vec3; 3] {
    let (sp, cp) = (libm::sin(phi), libm::cos(phi));
    let (st, ct) = (libm::sin(theta), libm::cos(theta));
    [[0.0, 0.0, 1.0], [-sp, cp, 0.0], [cp * st, sp * st, ct]]
}

/// Rotates `v` by `angle` about the unit `axis` (Rodrigues).
pub fn rotate_about(v: Vec3, axis: Vec3, angle: f64) -> Vec3 {
    let (s, c) = (libm::sin(angle), libm::cos(angle));
    let k_cross_v = cross(axis, v);
    let k_dot_v = dot(axis, v);
    [0, 1, 2].map(|i| v[i] * c + k_cross_v[i] * s + axis[i] * k_dot_v * (1.0 - c))
}
