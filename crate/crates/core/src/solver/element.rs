//! Planar Euler-Bernoulli frame element.

use nalgebra::{Matrix6, Vector6};

/// Direction cosines and length of a member from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub length: f64,
    pub c: f64,
    pub s: f64,
}

impl Geometry {
    pub fn between(a: [f64; 2], b: [f64; 2]) -> Self {
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let length = dx.hypot(dy);
        Self {
            length,
            c: dx / length,
            s: dy / length,
        }
    }

    /// Global to local rotation for both ends.
    pub fn rotation(&self) -> Matrix6<f64> {
        let (c, s) = (self.c, self.s);
        let mut t = Matrix6::zeros();
        for k in [0, 3] {
            t[(k, k)] = c;
            t[(k, k + 1)] = s;
            t[(k + 1, k)] = -s;
            t[(k + 1, k + 1)] = c;
            t[(k + 2, k + 2)] = 1.0;
        }
        t
    }

    /// Global-y line load `w` resolved onto the local axes.
    pub fn local_line_load(&self, w: f64) -> (f64, f64) {
        (self.s * w, self.c * w)
    }
}

/// Local stiffness in (u_i, v_i, r_i, u_j, v_j, r_j).
pub fn local_stiffness(e: f64, a: f64, i: f64, l: f64) -> Matrix6<f64> {
    let ea = e * a / l;
    let k1 = 12.0 * e * i / l.powi(3);
    let k2 = 6.0 * e * i / l.powi(2);
    let k3 = 4.0 * e * i / l;
    let k4 = 2.0 * e * i / l;
    #[rustfmt::skip]
    let k = Matrix6::new(
         ea, 0.0, 0.0, -ea, 0.0, 0.0,
        0.0,  k1,  k2, 0.0, -k1,  k2,
        0.0,  k2,  k3, 0.0, -k2,  k4,
        -ea, 0.0, 0.0,  ea, 0.0, 0.0,
        0.0, -k1, -k2, 0.0,  k1, -k2,
        0.0,  k2,  k4, 0.0, -k2,  k3,
    );
    k
}

/// Equivalent nodal loads of a uniform local load (wx, wy).
pub fn equivalent_loads(wx: f64, wy: f64, l: f64) -> Vector6<f64> {
    Vector6::new(
        wx * l / 2.0,
        wy * l / 2.0,
        wy * l * l / 12.0,
        wx * l / 2.0,
        wy * l / 2.0,
        -wy * l * l / 12.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stiffness_is_symmetric_with_rigid_body_null_space() {
        let k = local_stiffness(2e8, 0.04, 2e-4, 3.0);
        assert!((k - k.transpose()).norm() == 0.0);
        // translation in x and y, and rotation about end i
        let modes = [
            Vector6::new(1.0, 0.0, 0.0, 1.0, 0.0, 0.0),
            Vector6::new(0.0, 1.0, 0.0, 0.0, 1.0, 0.0),
            Vector6::new(0.0, 0.0, 1.0, 0.0, 3.0, 1.0),
        ];
        for m in modes {
            assert!((k * m).norm() < 1e-6 * k.norm());
        }
    }

    #[test]
    fn rotation_is_orthogonal() {
        let g = Geometry::between([1.0, 2.0], [4.0, 6.0]);
        assert_eq!(g.length, 5.0);
        let t = g.rotation();
        assert!((t * t.transpose() - Matrix6::identity()).norm() < 1e-15);
    }

    #[test]
    fn fixed_end_forces_balance_the_load() {
        let f = equivalent_loads(0.0, -5.0, 6.0);
        assert_eq!(f[1] + f[4], -30.0);
        assert_eq!(f[2], -15.0);
        assert_eq!(f[5], 15.0);
    }
}
