//! Dense LU factorization of the basis with a product-form eta file.

use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct LuFactor<T> {
    n: usize,
    // L (unit lower, below diagonal) and U (upper) packed row-major.
    lu: Vec<T>,
    // Row `i` of the factored matrix is row `perm[i]` of the input.
    perm: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Singular;

impl<T: Scalar> LuFactor<T> {
    /// Factors a dense row-major `n x n` matrix with partial pivoting.
    pub fn factor(n: usize, mut a: Vec<T>) -> Result<Self, Singular> {
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut best: Option<usize> = None;
            for i in k..n {
                let v = &a[i * n + k];
                if v.is_zero() || v.abs() <= T::pivot_tol() {
                    continue;
                }
                match best {
                    None => best = Some(i),
                    Some(b) if !T::EXACT && v.abs() > a[b * n + k].abs() => best = Some(i),
                    _ => {}
                }
                if T::EXACT {
                    break;
                }
            }
            let p = best.ok_or(Singular)?;
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let piv = a[k * n + k].clone();
            for i in (k + 1)..n {
                if a[i * n + k].is_zero() {
                    continue;
                }
                let l = a[i * n + k].clone() / piv.clone();
                for c in (k + 1)..n {
                    if a[k * n + c].is_zero() {
                        continue;
                    }
                    let t = l.clone() * a[k * n + c].clone();
                    a[i * n + c] = a[i * n + c].clone() - t;
                }
                a[i * n + k] = l;
            }
        }
        Ok(LuFactor { n, lu: a, perm })
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            let mut s = x[i].clone();
            for k in 0..i {
                if !self.lu[i * n + k].is_zero() && !x[k].is_zero() {
                    s = s - self.lu[i * n + k].clone() * x[k].clone();
                }
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i].clone();
            for k in (i + 1)..n {
                if !self.lu[i * n + k].is_zero() && !x[k].is_zero() {
                    s = s - self.lu[i * n + k].clone() * x[k].clone();
                }
            }
            x[i] = s / self.lu[i * n + i].clone();
        }
        x
    }

    /// Solves `A^T y = c`.
    pub fn solve_transpose(&self, c: &[T]) -> Vec<T> {
        let n = self.n;
        let mut w: Vec<T> = c.to_vec();
        for i in 0..n {
            let mut s = w[i].clone();
            for k in 0..i {
                if !self.lu[k * n + i].is_zero() && !w[k].is_zero() {
                    s = s - self.lu[k * n + i].clone() * w[k].clone();
                }
            }
            w[i] = s / self.lu[i * n + i].clone();
        }
        for i in (0..n).rev() {
            let mut s = w[i].clone();
            for k in (i + 1)..n {
                if !self.lu[k * n + i].is_zero() && !w[k].is_zero() {
                    s = s - self.lu[k * n + i].clone() * w[k].clone();
                }
            }
            w[i] = s;
        }
        let mut y = vec![T::zero(); n];
        for (i, v) in w.into_iter().enumerate() {
            y[self.perm[i]] = v;
        }
        y
    }
}

/// LU of a reference basis followed by the eta matrices of later pivots.
#[derive(Debug, Clone)]
pub struct BasisFactor<T> {
    lu: LuFactor<T>,
    etas: Vec<(usize, Vec<T>)>,
}

impl<T: Scalar> BasisFactor<T> {
    pub fn new(n: usize, dense: Vec<T>) -> Result<Self, Singular> {
        Ok(BasisFactor {
            lu: LuFactor::factor(n, dense)?,
            etas: Vec::new(),
        })
    }

    pub fn num_updates(&self) -> usize {
        self.etas.len()
    }

    /// Records that basis position `pos` was replaced by a column whose
    /// FTRAN image is `alpha`.
    pub fn update(&mut self, pos: usize, alpha: Vec<T>) {
        self.etas.push((pos, alpha));
    }

    pub fn ftran(&self, b: &[T]) -> Vec<T> {
        let mut x = self.lu.solve(b);
        for (r, d) in &self.etas {
            if x[*r].is_zero() {
                continue;
            }
            let xr = x[*r].clone() / d[*r].clone();
            for (i, di) in d.iter().enumerate() {
                if i != *r && !di.is_zero() {
                    x[i] = x[i].clone() - di.clone() * xr.clone();
                }
            }
            x[*r] = xr;
        }
        x
    }

    pub fn btran(&self, c: &[T]) -> Vec<T> {
        let mut y = c.to_vec();
        for (r, d) in self.etas.iter().rev() {
            let mut s = y[*r].clone();
            for (i, di) in d.iter().enumerate() {
                if i != *r && !di.is_zero() && !y[i].is_zero() {
                    s = s - y[i].clone() * di.clone();
                }
            }
            y[*r] = s / d[*r].clone();
        }
        self.lu.solve_transpose(&y)
    }
}
