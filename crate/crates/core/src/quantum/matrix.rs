//! Dense complex matrices of dimension 2 and 4, with a cyclic Jacobi
//! eigensolver for Hermitian inputs. The dimensions are fixed and tiny, so
//! no external linear-algebra dependency is needed.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// Row-major square complex matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct CMat {
    dim: usize,
    data: Vec<Complex64>,
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        CMat { dim, data: vec![Complex64::ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = cr(1.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "matrix must be square");
            data.extend_from_slice(row);
        }
        CMat { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn dagger(&self) -> CMat {
        let mut out = CMat::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, factor: Complex64) -> CMat {
        CMat { dim: self.dim, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        let n = self.dim * other.dim;
        let mut out = CMat::zeros(n);
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        out[(i * other.dim + k, j * other.dim + l)] =
                            self[(i, j)] * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &CMat) -> CMat {
        self * other - other * self
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max_ij |A_ij − (A†)_ij|, the Hermiticity defect.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> Complex64 {
        let n = self.dim;
        let mut a = self.clone();
        let mut det = cr(1.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a[(i, col)].norm().partial_cmp(&a[(j, col)].norm()).unwrap()
                })
                .unwrap();
            if a[(pivot, col)].norm() == 0.0 {
                return Complex64::ZERO;
            }
            if pivot != col {
                for j in 0..n {
                    let tmp = a[(col, j)];
                    a[(col, j)] = a[(pivot, j)];
                    a[(pivot, j)] = tmp;
                }
                det = -det;
            }
            det *= a[(col, col)];
            for i in col + 1..n {
                let factor = a[(i, col)] / a[(col, col)];
                for j in col..n {
                    let delta = factor * a[(col, j)];
                    a[(i, j)] -= delta;
                }
            }
        }
        det
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    /// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Off-diagonal pairs are annihilated by the exact eigenbasis of each
    /// 2×2 Hermitian sub-block; sweeps continue until the off-diagonal
    /// Frobenius norm drops below 1e−12 (relative to the matrix scale).
    /// Returns eigenvalues in ascending order and the matching orthonormal
    /// eigenvector columns.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, CMat) {
        debug_assert!(self.hermiticity_defect() <= 1e-9 * (1.0 + self.frobenius_norm()));
        let n = self.dim;
        let mut h = self.clone();
        let mut v = CMat::identity(n);
        let scale = self.frobenius_norm().max(1.0);
        let target = 1e-12 * scale;
        for _sweep in 0..100 {
            if h.off_diagonal_norm() <= target {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let beta = h[(p, q)];
                    if beta.norm() <= 1e-300 {
                        continue;
                    }
                    let alpha = h[(p, p)].re;
                    let gamma = h[(q, q)].re;
                    let d = (alpha - gamma) / 2.0;
                    let r = (d * d + beta.norm_sqr()).sqrt();
                    // mu1 >= mu2; differences computed without cancellation.
                    let (m1a, m2a) = if d >= 0.0 {
                        (beta.norm_sqr() / (r + d), -(d + r))
                    } else {
                        (r - d, -beta.norm_sqr() / (r - d))
                    };
                    let n1 = (beta.norm_sqr() + m1a * m1a).sqrt();
                    let n2 = (beta.norm_sqr() + m2a * m2a).sqrt();
                    let u11 = beta / n1;
                    let u21 = cr(m1a / n1);
                    let u12 = beta / n2;
                    let u22 = cr(m2a / n2);
                    // Rows: H ← U† H (U acts on coordinates p, q only).
                    for k in 0..n {
                        let hpk = h[(p, k)];
                        let hqk = h[(q, k)];
                        h[(p, k)] = u11.conj() * hpk + u21.conj() * hqk;
                        h[(q, k)] = u12.conj() * hpk + u22.conj() * hqk;
                    }
                    // Columns: H ← H U.
                    for k in 0..n {
                        let hkp = h[(k, p)];
                        let hkq = h[(k, q)];
                        h[(k, p)] = hkp * u11 + hkq * u21;
                        h[(k, q)] = hkp * u12 + hkq * u22;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * u11 + vkq * u21;
                        v[(k, q)] = vkp * u12 + vkq * u22;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        let eigs: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
        order.sort_by(|&i, &j| eigs[i].partial_cmp(&eigs[j]).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| eigs[i]).collect();
        let mut vectors = CMat::zeros(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for k in 0..n {
                vectors[(k, new_col)] = v[(k, old_col)];
            }
        }
        (values, vectors)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.hermitian_eigen().0
    }

    /// Spectral norm of a Hermitian matrix: max |eigenvalue|.
    pub fn operator_norm(&self) -> f64 {
        self.eigenvalues().into_iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

macro_rules! elementwise {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &CMat {
            type Output = CMat;
            fn $method(self, rhs: &CMat) -> CMat {
                assert_eq!(self.dim, rhs.dim);
                CMat {
                    dim: self.dim,
                    data: self
                        .data
                        .iter()
                        .zip(rhs.data.iter())
                        .map(|(a, b)| a $op b)
                        .collect(),
                }
            }
        }
        impl $trait for CMat {
            type Output = CMat;
            fn $method(self, rhs: CMat) -> CMat {
                (&self).$method(&rhs)
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Mul for CMat {
    type Output = CMat;
    fn mul(self, rhs: CMat) -> CMat {
        &self * &rhs
    }
}

impl Neg for &CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        self.scale(cr(-1.0))
    }
}
