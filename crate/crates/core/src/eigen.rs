//! Eigen-decomposition of small real symmetric matrices.
//!
//! The 3×3 solver computes eigenvalues from the trigonometric solution of
//! the characteristic cubic, builds an orthonormal eigenbasis with the
//! cross-product construction (the most isolated eigenvalue first, the
//! second inside its orthogonal complement, the third by a cross product),
//! and finishes with Jacobi sweeps that push the residual off-diagonal mass
//! down to rounding level. Nearly scalar matrices skip straight to Jacobi.

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// Real symmetric 3×3 matrix stored as its upper triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricMatrix3 {
    pub m00: f64,
    pub m01: f64,
    pub m02: f64,
    pub m11: f64,
    pub m12: f64,
    pub m22: f64,
}

impl SymmetricMatrix3 {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0);

    pub const fn new(m00: f64, m01: f64, m02: f64, m11: f64, m12: f64, m22: f64) -> Self {
        Self {
            m00,
            m01,
            m02,
            m11,
            m12,
            m22,
        }
    }

    pub fn to_array(&self) -> [[f64; 3]; 3] {
        [
            [self.m00, self.m01, self.m02],
            [self.m01, self.m11, self.m12],
            [self.m02, self.m12, self.m22],
        ]
    }

    pub fn max_abs(&self) -> f64 {
        [self.m00, self.m01, self.m02, self.m11, self.m12, self.m22]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn scaled(&self, s: f64) -> Self {
        Self::new(
            self.m00 * s,
            self.m01 * s,
            self.m02 * s,
            self.m11 * s,
            self.m12 * s,
            self.m22 * s,
        )
    }

    fn mul_vec(&self, v: &Vec3) -> Vec3 {
        [
            self.m00 * v[0] + self.m01 * v[1] + self.m02 * v[2],
            self.m01 * v[0] + self.m11 * v[1] + self.m12 * v[2],
            self.m02 * v[0] + self.m12 * v[1] + self.m22 * v[2],
        ]
    }
}

/// Eigenpairs; `vectors[j]` belongs to `values[j]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigen3 {
    pub values: Vec3,
    pub vectors: [Vec3; 3],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigen2 {
    pub values: [f64; 2],
    pub vectors: [[f64; 2]; 2],
}

/// Below this spread of the scaled spectrum the matrix is treated as scalar
/// and handed to Jacobi directly.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

const MAX_JACOBI_SWEEPS: usize = 32;

#[inline]
fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
fn normalize(a: &Vec3) -> Vec3 {
    scale(a, 1.0 / dot(a, a).sqrt())
}

/// Closed-form eigen decomposition of a symmetric 2×2 `[[a, b], [b, c]]`.
pub fn eigen_symmetric2(a: f64, b: f64, c: f64) -> Eigen2 {
    let mean = 0.5 * (a + c);
    let half_diff = 0.5 * (a - c);
    let radius = half_diff.hypot(b);
    let phi = 0.5 * b.atan2(half_diff);
    let (s, co) = phi.sin_cos();
    Eigen2 {
        values: [mean + radius, mean - radius],
        vectors: [[co, s], [-s, co]],
    }
}

/// Unit vector orthogonal to the rows of `m − λI`, picked from the largest
/// pairwise cross product of those rows.
fn null_vector(m: &SymmetricMatrix3, lambda: f64) -> Vec3 {
    let r0 = [m.m00 - lambda, m.m01, m.m02];
    let r1 = [m.m01, m.m11 - lambda, m.m12];
    let r2 = [m.m02, m.m12, m.m22 - lambda];
    let candidates = [cross(&r0, &r1), cross(&r0, &r2), cross(&r1, &r2)];
    let best = candidates
        .iter()
        .max_by(|x, y| dot(x, x).total_cmp(&dot(y, y)))
        .expect("three candidates");
    if dot(best, best) == 0.0 {
        // Rank below 2: every vector orthogonal to a nonzero row works.
        let rows = [r0, r1, r2];
        let row = rows
            .iter()
            .max_by(|x, y| dot(x, x).total_cmp(&dot(y, y)))
            .unwrap();
        if dot(row, row) == 0.0 {
            return [1.0, 0.0, 0.0];
        }
        return orthogonal_complement(&normalize(row)).0;
    }
    normalize(best)
}

/// Two unit vectors completing `w` to a right-handed orthonormal basis.
fn orthogonal_complement(w: &Vec3) -> (Vec3, Vec3) {
    let u = if w[0].abs() > w[1].abs() {
        let inv = 1.0 / (w[0] * w[0] + w[2] * w[2]).sqrt();
        [-w[2] * inv, 0.0, w[0] * inv]
    } else {
        let inv = 1.0 / (w[1] * w[1] + w[2] * w[2]).sqrt();
        [0.0, w[2] * inv, -w[1] * inv]
    };
    let v = cross(w, &u);
    (u, v)
}

/// Eigenvector for `lambda` inside the plane orthogonal to `known`.
fn second_vector(m: &SymmetricMatrix3, known: &Vec3, lambda: f64) -> Vec3 {
    let (u, v) = orthogonal_complement(known);
    let au = m.mul_vec(&u);
    let av = m.mul_vec(&v);
    // 2×2 restriction of m − λI to span{u, v}
    let m00 = dot(&u, &au) - lambda;
    let m01 = dot(&u, &av);
    let m11 = dot(&v, &av) - lambda;
    let (a00, a01, a11) = (m00.abs(), m01.abs(), m11.abs());
    if a00 >= a11 {
        let max = a00.max(a01);
        if max > 0.0 {
            let (x, y) = if a00 >= a01 {
                let t = m01 / m00;
                (-t, 1.0)
            } else {
                let t = m00 / m01;
                (1.0, -t)
            };
            return normalize(&[x * u[0] + y * v[0], x * u[1] + y * v[1], x * u[2] + y * v[2]]);
        }
    } else {
        let max = a11.max(a01);
        if max > 0.0 {
            let (x, y) = if a11 >= a01 {
                let t = m01 / m11;
                (1.0, -t)
            } else {
                let t = m11 / m01;
                (-t, 1.0)
            };
            return normalize(&[x * u[0] + y * v[0], x * u[1] + y * v[1], x * u[2] + y * v[2]]);
        }
    }
    u
}

/// Cyclic Jacobi on `m`, starting from the orthonormal basis `vectors`
/// (columns of the accumulated rotation). Returns refined eigenpairs.
fn jacobi(m: &SymmetricMatrix3, vectors: [Vec3; 3]) -> Result<Eigen3> {
    // d = Qᵀ m Q with Q's columns = vectors
    let mut q = vectors;
    let mut d = [[0.0f64; 3]; 3];
    for i in 0..3 {
        let mq = m.mul_vec(&q[i]);
        for j in 0..3 {
            d[j][i] = dot(&q[j], &mq);
        }
    }
    for i in 0..3 {
        for j in 0..i {
            let s = 0.5 * (d[i][j] + d[j][i]);
            d[i][j] = s;
            d[j][i] = s;
        }
    }
    let norm = m.max_abs();
    for _ in 0..MAX_JACOBI_SWEEPS {
        let off = d[0][1].abs().max(d[0][2].abs()).max(d[1][2].abs());
        if off <= f64::EPSILON * norm * 0.5 || off == 0.0 {
            return Ok(Eigen3 {
                values: [d[0][0], d[1][1], d[2][2]],
                vectors: q,
            });
        }
        for &(p, r) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            let apr = d[p][r];
            if apr == 0.0 {
                continue;
            }
            let theta = (d[r][r] - d[p][p]) / (2.0 * apr);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // d ← Jᵀ d J with J the (p, r) rotation
            for k in 0..3 {
                let dkp = d[k][p];
                let dkr = d[k][r];
                d[k][p] = c * dkp - s * dkr;
                d[k][r] = s * dkp + c * dkr;
            }
            for k in 0..3 {
                let dpk = d[p][k];
                let drk = d[r][k];
                d[p][k] = c * dpk - s * drk;
                d[r][k] = s * dpk + c * drk;
            }
            d[p][r] = 0.0;
            d[r][p] = 0.0;
            let qp = q[p];
            let qr = q[r];
            for k in 0..3 {
                q[p][k] = c * qp[k] - s * qr[k];
                q[r][k] = s * qp[k] + c * qr[k];
            }
        }
    }
    Err(Error::EigenSolver)
}

/// Eigen-decomposition of a real symmetric 3×3 matrix.
pub fn eigen_symmetric3(m: &SymmetricMatrix3) -> Result<Eigen3> {
    let norm = m.max_abs();
    if !norm.is_finite() {
        return Err(Error::EigenSolver);
    }
    if norm == 0.0 {
        return Ok(Eigen3 {
            values: [0.0; 3],
            vectors: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        });
    }
    let b = m.scaled(1.0 / norm);
    let shift = (b.m00 + b.m11 + b.m22) / 3.0;
    let c = SymmetricMatrix3::new(
        b.m00 - shift,
        b.m01,
        b.m02,
        b.m11 - shift,
        b.m12,
        b.m22 - shift,
    );
    let off = c.m01 * c.m01 + c.m02 * c.m02 + c.m12 * c.m12;
    let spread = (c.m00 * c.m00 + c.m11 * c.m11 + c.m22 * c.m22 + 2.0 * off) / 6.0;
    if spread < DEGENERACY_THRESHOLD {
        return jacobi(m, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    }
    let p = spread.sqrt();
    let d = c.scaled(1.0 / p);
    let det = d.m00 * (d.m11 * d.m22 - d.m12 * d.m12) - d.m01 * (d.m01 * d.m22 - d.m12 * d.m02)
        + d.m02 * (d.m01 * d.m12 - d.m11 * d.m02);
    let half_det = (0.5 * det).clamp(-1.0, 1.0);
    let angle = half_det.acos() / 3.0;
    let two_pi_3 = 2.0 * std::f64::consts::FRAC_PI_3;
    let beta_hi = 2.0 * angle.cos();
    let beta_lo = 2.0 * (angle + two_pi_3).cos();
    let beta_mid = -(beta_hi + beta_lo);
    // eigenvalues of c, scaled back onto c's units
    let (first, second) = if half_det >= 0.0 {
        (beta_hi, beta_mid)
    } else {
        (beta_lo, beta_mid)
    };
    let v0 = null_vector(&c, first * p);
    let v1 = second_vector(&c, &v0, second * p);
    let v2 = cross(&v0, &v1);
    jacobi(m, [v0, v1, v2])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &SymmetricMatrix3, e: &Eigen3, tol: f64) {
        let a = m.to_array();
        let scale = m.max_abs().max(1.0);
        for j in 0..3 {
            let v = e.vectors[j];
            for i in 0..3 {
                let av: f64 = (0..3).map(|k| a[i][k] * v[k]).sum();
                assert!((av - e.values[j] * v[i]).abs() < tol * scale, "residual {m:?}");
            }
            for k in 0..3 {
                let d = dot(&e.vectors[j], &e.vectors[k]);
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((d - expect).abs() < 1e-14, "orthonormality {m:?}");
            }
        }
    }

    #[test]
    fn tridiagonal_rabi_spectrum() {
        for n in 0..=10 {
            let a = ((n + 1) as f64).sqrt();
            let b = ((n + 2) as f64).sqrt();
            let m = SymmetricMatrix3::new(0.0, a, 0.0, 0.0, b, 0.0);
            let e = eigen_symmetric3(&m).unwrap();
            let mut v = e.values;
            v.sort_by(f64::total_cmp);
            let omega = ((2 * n + 3) as f64).sqrt();
            assert!((v[0] + omega).abs() < 1e-13);
            assert!(v[1].abs() < 1e-13);
            assert!((v[2] - omega).abs() < 1e-13);
            check(&m, &e, 1e-14);
        }
    }

    /// With a detuning on the middle element the spectrum is
    /// `{0, (Δ ± √(Δ² + 4Ω²))/2}` and `(b, 0, −a)` is the zero mode.
    #[test]
    fn detuned_chain_matches_dark_state_formula() {
        for &(lam, delta) in &[(1.0, 20.0), (1e-3, 20.0), (0.7, -3.0), (1e-7, 20.0)] {
            let a = lam * 3.0f64.sqrt();
            let b = lam * 2.0;
            let m = SymmetricMatrix3::new(0.0, a, 0.0, delta, b, 0.0);
            let e = eigen_symmetric3(&m).unwrap();
            let mut v = e.values;
            v.sort_by(f64::total_cmp);
            let om2 = a * a + b * b;
            let disc = (delta * delta + 4.0 * om2).sqrt();
            let mut expect = [0.0, 0.5 * (delta + disc), 0.5 * (delta - disc)];
            expect.sort_by(f64::total_cmp);
            for k in 0..3 {
                assert!((v[k] - expect[k]).abs() < 1e-14 * delta.abs().max(1.0), "{lam} {delta}: {v:?} vs {expect:?}");
            }
            check(&m, &e, 1e-14);
        }
    }

    #[test]
    fn degenerate_and_scalar_inputs() {
        let cases = [
            SymmetricMatrix3::ZERO,
            SymmetricMatrix3::new(2.0, 0.0, 0.0, 2.0, 0.0, 2.0),
            SymmetricMatrix3::new(1.0, 0.0, 0.0, 1.0, 0.0, 3.0),
            SymmetricMatrix3::new(2.0, 1e-9, 0.0, 2.0, 0.0, 2.0),
            SymmetricMatrix3::new(0.0, 1.0, 1.0, 0.0, 1.0, 0.0),
        ];
        for m in &cases {
            let e = eigen_symmetric3(m).unwrap();
            check(m, &e, 1e-14);
        }
    }

    #[test]
    fn two_by_two() {
        let e = eigen_symmetric2(0.0, 1.0, 0.0);
        assert!((e.values[0] - 1.0).abs() < 1e-15 && (e.values[1] + 1.0).abs() < 1e-15);
        let e = eigen_symmetric2(3.0, 0.0, -1.0);
        assert_eq!(e.values, [3.0, -1.0]);
        for &(a, b, c) in &[(20.0, 1.0, 0.0), (0.0, 1e-9, 1e-9), (5.0, -2.0, 1.0)] {
            let e = eigen_symmetric2(a, b, c);
            for j in 0..2 {
                let v = e.vectors[j];
                let r0 = a * v[0] + b * v[1] - e.values[j] * v[0];
                let r1 = b * v[0] + c * v[1] - e.values[j] * v[1];
                assert!(r0.abs() < 1e-14 * a.abs().max(1.0) && r1.abs() < 1e-14 * a.abs().max(1.0));
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn random_symmetric_matrices(
            d in proptest::array::uniform6(-30.0f64..30.0),
            exp in -6i32..3,
        ) {
            let s = 10f64.powi(exp);
            let m = SymmetricMatrix3::new(d[0] * s, d[1] * s, d[2] * s, d[3] * s, d[4] * s, d[5] * s);
            let e = eigen_symmetric3(&m).unwrap();
            check(&m, &e, 1e-13);
        }
    }
}
