//! Fixed-size dense complex matrices for the 2- and 3-level subsystem blocks.

use num_complex::Complex64 as C64;

/// 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

/// 3x3 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[C64; 3]; 3]);

macro_rules! impl_mat {
    ($name:ident, $n:expr) => {
        impl $name {
            pub const DIM: usize = $n;

            pub fn zero() -> Self {
                Self([[C64::ZERO; $n]; $n])
            }

            pub fn identity() -> Self {
                let mut m = Self::zero();
                for i in 0..$n {
                    m.0[i][i] = C64::ONE;
                }
                m
            }

            pub fn get(&self, i: usize, j: usize) -> C64 {
                self.0[i][j]
            }

            pub fn mul(&self, rhs: &Self) -> Self {
                let mut out = Self::zero();
                for i in 0..$n {
                    for j in 0..$n {
                        let mut acc = C64::ZERO;
                        for k in 0..$n {
                            acc += self.0[i][k] * rhs.0[k][j];
                        }
                        out.0[i][j] = acc;
                    }
                }
                out
            }

            pub fn adjoint(&self) -> Self {
                let mut out = Self::zero();
                for i in 0..$n {
                    for j in 0..$n {
                        out.0[i][j] = self.0[j][i].conj();
                    }
                }
                out
            }

            /// Largest entry-wise modulus of `self - rhs`.
            pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
                let mut worst = 0.0_f64;
                for i in 0..$n {
                    for j in 0..$n {
                        worst = worst.max((self.0[i][j] - rhs.0[i][j]).norm());
                    }
                }
                worst
            }

            /// Max-norm of U^dagger U - I.
            pub fn unitarity_defect(&self) -> f64 {
                self.adjoint().mul(self).max_abs_diff(&Self::identity())
            }

            /// Right-multiplies a column vector.
            pub fn apply(&self, v: &[C64; $n]) -> [C64; $n] {
                let mut out = [C64::ZERO; $n];
                for i in 0..$n {
                    for k in 0..$n {
                        out[i] += self.0[i][k] * v[k];
                    }
                }
                out
            }
        }
    };
}

impl_mat!(Mat2, 2);
impl_mat!(Mat3, 3);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_neutral() {
        let m = Mat3([
            [C64::new(0.3, 0.1), C64::new(0.0, 1.0), C64::new(0.2, 0.0)],
            [C64::new(1.0, -0.5), C64::new(0.7, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.2), C64::new(0.1, 0.1), C64::new(-0.4, 0.0)],
        ]);
        assert_eq!(m.mul(&Mat3::identity()), m);
        assert_eq!(Mat3::identity().mul(&m), m);
    }

    #[test]
    fn adjoint_of_product() {
        let a = Mat2([
            [C64::new(0.0, 1.0), C64::new(0.5, 0.0)],
            [C64::new(0.2, -0.3), C64::new(0.0, 0.0)],
        ]);
        let b = Mat2([
            [C64::new(1.0, 0.0), C64::new(0.0, -0.7)],
            [C64::new(0.4, 0.4), C64::new(0.9, 0.0)],
        ]);
        let lhs = a.mul(&b).adjoint();
        let rhs = b.adjoint().mul(&a.adjoint());
        assert!(lhs.max_abs_diff(&rhs) < 1e-15);
    }

    #[test]
    fn unitarity_defect_of_identity_is_zero() {
        assert_eq!(Mat2::identity().unitarity_defect(), 0.0);
        assert_eq!(Mat3::identity().unitarity_defect(), 0.0);
    }
}
