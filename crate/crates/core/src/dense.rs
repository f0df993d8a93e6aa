//! Dense matrices for small trees, used as an independent eigenvalue oracle.

use crate::error::{Error, Result};
use crate::scalar::{PrecisionContext, Scalar};
use crate::tree::Tree;

/// Largest order accepted by default.
pub const DEFAULT_ORACLE_CAP: usize = 64;

const MAX_SWEEPS: usize = 100;

/// Symmetric `n x n` matrix stored row-major.
#[derive(Debug, Clone)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Scalar>,
}

impl DenseMatrix {
    pub fn zeros(ctx: &PrecisionContext, n: usize) -> DenseMatrix {
        DenseMatrix {
            n,
            data: vec![ctx.zero(); n * n],
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.n + j] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// All eigenvalues in ascending order, by cyclic Jacobi rotations carried
    /// out at the matrix precision.
    pub fn eigenvalues(&self) -> Vec<Scalar> {
        let n = self.n;
        if n == 0 {
            return Vec::new();
        }
        let mut a = self.data.clone();
        let idx = |i: usize, j: usize| i * n + j;
        let prec_digits = self.data[0].digits() as i32;
        let zero = self.data[0].int_like(0);
        let frob: Scalar = a.iter().fold(zero.clone(), |acc, x| acc + x.square());
        let threshold = frob * zero.pow10_like(-2 * (prec_digits - 3));
        for _ in 0..MAX_SWEEPS {
            let mut off = zero.clone();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off = off + a[idx(i, j)].square();
                    }
                }
            }
            if off <= threshold {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[idx(p, q)].clone();
                    if apq.is_zero() {
                        continue;
                    }
                    let theta = (&a[idx(q, q)] - &a[idx(p, p)]) / (apq.clone() * 2i64);
                    let root = (theta.square() + 1i64).sqrt().expect("positive radicand");
                    let t = if theta.is_negative() {
                        -((theta.abs() + root).recip())
                    } else {
                        (theta.abs() + root).recip()
                    };
                    let c = (t.square() + 1i64).sqrt().expect("positive radicand").recip();
                    let s = &t * &c;
                    let tau = &s / (c.clone() + 1i64);
                    let tapq = &t * &apq;
                    a[idx(p, p)] = &a[idx(p, p)] - &tapq;
                    a[idx(q, q)] = &a[idx(q, q)] + &tapq;
                    a[idx(p, q)] = zero.clone();
                    a[idx(q, p)] = zero.clone();
                    for r in 0..n {
                        if r == p || r == q {
                            continue;
                        }
                        let g = a[idx(r, p)].clone();
                        let h = a[idx(r, q)].clone();
                        let new_rp = &g - &s * (&h + &g * &tau);
                        let new_rq = &h + &s * (&g - &h * &tau);
                        a[idx(r, p)] = new_rp.clone();
                        a[idx(p, r)] = new_rp;
                        a[idx(r, q)] = new_rq.clone();
                        a[idx(q, r)] = new_rq;
                    }
                }
            }
        }
        let mut eigs: Vec<Scalar> = (0..n).map(|i| a[idx(i, i)].clone()).collect();
        eigs.sort_by(|x, y| x.total_cmp(y));
        eigs
    }
}

/// `M_T(s) = I - sA + s^2 (D - I)` as a dense matrix, for trees of order at
/// most [`DEFAULT_ORACLE_CAP`].
pub fn dense_deformed_laplacian(t: &Tree, s: &Scalar) -> Result<DenseMatrix> {
    dense_deformed_laplacian_capped(t, s, DEFAULT_ORACLE_CAP)
}

pub fn dense_deformed_laplacian_capped(t: &Tree, s: &Scalar, cap: usize) -> Result<DenseMatrix> {
    let n = t.vertex_count();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    let zero = s.int_like(0);
    let s2 = s.square();
    let mut m = DenseMatrix {
        n,
        data: vec![zero; n * n],
    };
    for v in 0..n {
        let diag = &s2 * (t.degree(v) as i64 - 1) + 1i64;
        m.set(v, v, diag);
    }
    for (u, v) in t.edges() {
        m.set(u, v, -s);
        m.set(v, u, -s);
    }
    Ok(m)
}

/// Adjacency matrix of a tree.
pub fn dense_adjacency(t: &Tree, ctx: &PrecisionContext, cap: usize) -> Result<DenseMatrix> {
    let n = t.vertex_count();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    let mut m = DenseMatrix::zeros(ctx, n);
    for (u, v) in t.edges() {
        m.set(u, v, ctx.one());
        m.set(v, u, ctx.one());
    }
    Ok(m)
}

/// Counts of eigenvalues greater than, smaller than and equal to `c`, where
/// eigenvalues within `cluster` of `c` count as equal.
pub fn classify_eigenvalues(eigs: &[Scalar], c: &Scalar, cluster: &Scalar) -> (usize, usize, usize) {
    let mut counts = (0, 0, 0);
    for e in eigs {
        let diff = e - c;
        if diff.abs() <= *cluster {
            counts.2 += 1;
        } else if diff.is_positive() {
            counts.0 += 1;
        } else {
            counts.1 += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{starlike_t1nn, Tree};

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(50).unwrap()
    }

    #[test]
    fn p2_matrix() {
        let c = ctx();
        let s = c.parse("0.37").unwrap();
        let m = dense_deformed_laplacian(&Tree::path(2).unwrap(), &s).unwrap();
        assert_eq!(*m.get(0, 0), 1);
        assert_eq!(*m.get(1, 1), 1);
        assert_eq!(*m.get(0, 1), -&s);
        assert!(m.is_symmetric());
    }

    #[test]
    fn zero_s_is_identity() {
        let c = ctx();
        let m = dense_deformed_laplacian(&starlike_t1nn(3).unwrap(), &c.zero()).unwrap();
        for i in 0..m.order() {
            for j in 0..m.order() {
                assert_eq!(*m.get(i, j), i64::from(i == j));
            }
        }
    }

    #[test]
    fn k13_center_diagonal() {
        let c = ctx();
        let s = c.parse("0.6").unwrap();
        let m = dense_deformed_laplacian(&Tree::star(3), &s).unwrap();
        assert_eq!(*m.get(0, 0), s.square() * 2i64 + 1i64);
        for leaf in 1..4 {
            assert_eq!(*m.get(leaf, leaf), 1);
        }
    }

    #[test]
    fn cap_enforced() {
        let c = ctx();
        let t = Tree::path(65).unwrap();
        assert!(matches!(
            dense_deformed_laplacian(&t, &c.one()),
            Err(Error::TooLarge { n: 65, cap: 64 })
        ));
    }

    #[test]
    fn jacobi_matches_known_spectra() {
        let c = ctx();
        // Laplacian of K_{1,3}: {0, 1, 1, 4}
        let m = dense_deformed_laplacian(&Tree::star(3), &c.one()).unwrap();
        let eigs = m.eigenvalues();
        let expected = [0i64, 1, 1, 4];
        for (e, x) in eigs.iter().zip(expected) {
            assert!((e - c.int(x)).abs() < c.pow10(-45), "{e:?} vs {x}");
        }
        // adjacency of P_3: {-sqrt2, 0, sqrt2}
        let a = dense_adjacency(&Tree::path(3).unwrap(), &c, 64).unwrap();
        let eigs = a.eigenvalues();
        let r2 = c.int(2).sqrt().unwrap();
        assert!((&eigs[2] - &r2).abs() < c.pow10(-45));
        assert!((&eigs[0] + &r2).abs() < c.pow10(-45));
    }

    #[test]
    fn spectrum_symmetric_in_s() {
        let c = ctx();
        let t = starlike_t1nn(2).unwrap();
        let s = c.parse("0.83").unwrap();
        let plus = dense_deformed_laplacian(&t, &s).unwrap().eigenvalues();
        let minus = dense_deformed_laplacian(&t, &-&s).unwrap().eigenvalues();
        for (a, b) in plus.iter().zip(&minus) {
            assert!((a - b).abs() < c.pow10(-40));
        }
    }
}
