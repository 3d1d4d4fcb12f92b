//! Brute-force oracles built from raw matrices and ranks only.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rlab_core::complex::BigradedComplex;
use rlab_core::connection::EquivariantConnection;
use rlab_core::multifilt::MultiFilteredSpace;
use rlab_core::{Matrix, Scalar};

pub fn stack(vs: &[Vec<Scalar>], ambient: usize) -> Matrix {
    Matrix::from_rows(vs.to_vec(), ambient)
}

pub fn rank_of(vs: &[Vec<Scalar>], ambient: usize) -> usize {
    if vs.is_empty() {
        0
    } else {
        stack(vs, ambient).rank()
    }
}

/// Total complex assembled from the bigraded blocks, `p` ascending.
pub struct Total {
    pub bound: i64,
    /// `cols[k]`: column index -> filtration degree `p`.
    pub degrees: BTreeMap<i64, Vec<i64>>,
    pub d: BTreeMap<i64, Matrix>,
}

impl Total {
    pub fn of(x: &BigradedComplex) -> Total {
        Total::twisted(x, &Scalar::one())
    }

    /// Total complex of `h ∂ + ∂̄`.
    pub fn twisted(x: &BigradedComplex, h: &Scalar) -> Total {
        let b = x.bound();
        let mut degrees = BTreeMap::new();
        for k in -1..=(2 * b + 2) {
            let mut ps = Vec::new();
            for p in 0..=b {
                let q = k - p;
                if (0..=b).contains(&q) {
                    ps.extend(std::iter::repeat(p).take(x.dim((p, q))));
                }
            }
            degrees.insert(k, ps);
        }
        let offset = |k: i64, p: i64| -> usize { degrees[&k].iter().filter(|&&t| t < p).count() };
        let mut d = BTreeMap::new();
        for k in -1..=(2 * b + 1) {
            let mut m = Matrix::zeros(degrees[&(k + 1)].len(), degrees[&k].len());
            for p in 0..=b {
                let q = k - p;
                if !(0..=b).contains(&q) || x.dim((p, q)) == 0 {
                    continue;
                }
                let c0 = offset(k, p);
                for (blk, tp) in [(x.del_at((p, q)).scale(h), p + 1), (x.delbar_at((p, q)), p)] {
                    if blk.rows() == 0 {
                        continue;
                    }
                    let r0 = offset(k + 1, tp);
                    for r in 0..blk.rows() {
                        for c in 0..blk.cols() {
                            m[(r0 + r, c0 + c)] = &m[(r0 + r, c0 + c)] + &blk[(r, c)];
                        }
                    }
                }
            }
            d.insert(k, m);
        }
        Total { bound: b, degrees, d }
    }

    fn cols_at_least(&self, k: i64, p: i64) -> Vec<usize> {
        self.degrees.get(&k).map_or(vec![], |v| (0..v.len()).filter(|&i| v[i] >= p).collect())
    }

    fn rows_below(&self, k: i64, p: i64) -> Vec<usize> {
        self.degrees.get(&k).map_or(vec![], |v| (0..v.len()).filter(|&i| v[i] < p).collect())
    }

    pub fn d(&self, k: i64) -> Matrix {
        self.d.get(&k).cloned().unwrap_or_else(|| {
            let rows = self.degrees.get(&(k + 1)).map_or(0, Vec::len);
            let cols = self.degrees.get(&k).map_or(0, Vec::len);
            Matrix::zeros(rows, cols)
        })
    }

    fn sub_rank(&self, m: &Matrix, rows: &[usize], cols: &[usize]) -> usize {
        if rows.is_empty() || cols.is_empty() {
            0
        } else {
            m.select(rows, cols).rank()
        }
    }

    pub fn f_dim(&self, k: i64, p: i64) -> usize {
        self.cols_at_least(k, p).len()
    }

    /// `dim Z_r^p(C^k)`; `r` large gives `ker d ∩ F^p`.
    pub fn z_dim(&self, k: i64, p: i64, r: i64) -> usize {
        let cols = self.cols_at_least(k, p);
        let rows = self.rows_below(k + 1, p + r);
        cols.len() - self.sub_rank(&self.d(k), &rows, &cols)
    }

    pub fn e_dim(&self, p: i64, q: i64, r: i64) -> usize {
        let k = p + q;
        let a = self.z_dim(k, p, r) + self.z_dim(k - 1, p - r + 1, r);
        let b = self.z_dim(k, p + 1, r - 1) + self.z_dim(k - 1, p - r + 1, r - 1);
        a - b
    }

    pub fn page(&self, r: i64) -> BTreeMap<(i64, i64), usize> {
        let mut out = BTreeMap::new();
        for p in 0..=self.bound {
            for q in 0..=self.bound {
                let e = self.e_dim(p, q, r);
                if e > 0 {
                    out.insert((p, q), e);
                }
            }
        }
        out
    }

    pub fn rank_d(&self, k: i64) -> usize {
        self.d(k).rank()
    }

    pub fn betti(&self, k: i64) -> usize {
        self.degrees[&k].len() - self.rank_d(k) - self.rank_d(k - 1)
    }

    /// `dim F^p H^k`.
    pub fn hodge_dim(&self, k: i64, p: i64) -> usize {
        let big = 10 * (self.bound + 2);
        let cycles = self.z_dim(k, p, big);
        let prev = self.d(k - 1);
        let all_cols: Vec<usize> = (0..prev.cols()).collect();
        let below = self.rows_below(k, p);
        let in_f = self.rank_d(k - 1) - self.sub_rank(&prev, &below, &all_cols);
        cycles - in_f
    }

    /// `dim H^k(F^{-m} C)` and its image in `H^k`.
    pub fn rees_cohomology_dim(&self, k: i64, m: i64) -> usize {
        let big = 10 * (self.bound + 2);
        let cycles = self.z_dim(k, -m, big);
        let cols = self.cols_at_least(k - 1, -m);
        let rows: Vec<usize> = (0..self.degrees[&k].len()).collect();
        cycles - self.sub_rank(&self.d(k - 1), &rows, &cols)
    }
}

/// `dim F^p` for the multi-index `p` by intersecting via ranks.
pub fn f_dim(v: &MultiFilteredSpace, p: &[i64]) -> usize {
    let mut acc: Vec<Vec<Scalar>> = (0..v.dim())
        .map(|i| (0..v.dim()).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
        .collect();
    for (i, f) in v.filtrations().iter().enumerate() {
        acc = intersect(&acc, &f.at(p[i]).basis_vectors(), v.dim());
    }
    rank_of(&acc, v.dim())
}

/// Basis of `span(a) ∩ span(b)` from the kernel of `[a; -b]^T`.
pub fn intersect(a: &[Vec<Scalar>], b: &[Vec<Scalar>], n: usize) -> Vec<Vec<Scalar>> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut cols: Vec<Vec<Scalar>> = a.to_vec();
    cols.extend(b.iter().map(|v| v.iter().map(|x| -x.clone()).collect()));
    let m = Matrix::from_columns(&cols, n);
    m.nullspace()
        .into_iter()
        .map(|c| {
            let mut v = vec![Scalar::zero(); n];
            for (j, coef) in c.iter().take(a.len()).enumerate() {
                for t in 0..n {
                    v[t] = &v[t] + &(coef * &a[j][t]);
                }
            }
            v
        })
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .collect()
}

/// `dim D^p = dim F^p - dim Σ_i F^{p + e_i}`.
pub fn d_dim(v: &MultiFilteredSpace, p: &[i64]) -> usize {
    let n = v.dim();
    let top = {
        let mut acc: Vec<Vec<Scalar>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
            .collect();
        for (i, f) in v.filtrations().iter().enumerate() {
            acc = intersect(&acc, &f.at(p[i]).basis_vectors(), n);
        }
        acc
    };
    let mut sum: Vec<Vec<Scalar>> = Vec::new();
    for i in 0..v.n() {
        let mut q = p.to_vec();
        q[i] += 1;
        let mut acc = top.clone();
        for (j, f) in v.filtrations().iter().enumerate() {
            acc = intersect(&acc, &f.at(q[j]).basis_vectors(), n);
        }
        sum.extend(acc);
    }
    rank_of(&top, n) - rank_of(&sum, n)
}

/// Laurent polynomial matrices keyed by exponent.
pub type Laurent = BTreeMap<Vec<i64>, Matrix>;

fn l_add(a: &mut Laurent, e: Vec<i64>, m: Matrix) {
    let dim = m.rows();
    let entry = a.entry(e).or_insert_with(|| Matrix::zeros(dim, dim));
    *entry = entry.add(&m);
}

fn l_mul(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (ea, ma) in a {
        for (eb, mb) in b {
            let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            l_add(&mut out, e, ma.mul(mb));
        }
    }
    out
}

fn l_partial(a: &Laurent, i: usize) -> Laurent {
    let mut out = Laurent::new();
    for (e, m) in a {
        if e[i] != 0 {
            let mut f = e.clone();
            f[i] -= 1;
            l_add(&mut out, f, m.scale(&Scalar::from(e[i])));
        }
    }
    out
}

/// Curvature in the `dz` frame, `∂_i B_j - ∂_j B_i + [B_i, B_j]` with
/// `B_i = Σ_p A_{p,i} z^{p - e_i}`, re-indexed by `p = exponent + e_i + e_j`.
pub fn dz_frame_curvature(c: &EquivariantConnection) -> BTreeMap<(Vec<i64>, usize, usize), Matrix> {
    let n = c.n();
    let b: Vec<Laurent> = (0..n)
        .map(|i| {
            let mut l = Laurent::new();
            for ((p, j), m) in c.coeffs() {
                if *j == i {
                    let mut e = p.clone();
                    e[i] -= 1;
                    l_add(&mut l, e, m.clone());
                }
            }
            l
        })
        .collect();
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut f = l_partial(&b[j], i);
            for (e, m) in l_partial(&b[i], j) {
                l_add(&mut f, e, m.scale(&Scalar::from(-1)));
            }
            for (e, m) in l_mul(&b[i], &b[j]) {
                l_add(&mut f, e, m);
            }
            for (e, m) in l_mul(&b[j], &b[i]) {
                l_add(&mut f, e, m.scale(&Scalar::from(-1)));
            }
            for (mut e, m) in f {
                if m.is_zero() {
                    continue;
                }
                e[i] += 1;
                e[j] += 1;
                out.insert((e, i, j), m);
            }
        }
    }
    out
}
