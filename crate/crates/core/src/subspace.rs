//! Subspaces of `k^n` in canonical form.
//!
//! A [`Subspace`] stores its basis as the rows of a matrix in reduced
//! row-echelon form, so two subspaces are equal as sets exactly when the
//! stored values are equal. Coordinates of a vector with respect to that basis
//! are read off at the pivot columns.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace(dim {} in k^{}, {:?})", self.dim(), self.ambient, self.basis)
    }
}

/// A chosen quotient `W / U` with `projection * lift = Id`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient {
    pub dim: usize,
    /// `dim x ambient`; kills `U` and maps `W` onto the quotient coordinates.
    pub projection: Matrix,
    /// `ambient x dim`; its columns span a complement of `U` in `W`.
    pub lift: Matrix,
}

impl Quotient {
    pub fn project(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.projection.apply(v)
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of the rows of `m`.
    pub fn from_rows(m: &Matrix) -> Self {
        let r = m.rref();
        let keep: Vec<usize> = (0..r.rank).collect();
        Subspace {
            ambient: m.cols(),
            basis: r.reduced.select_rows(&keep),
            pivots: r.pivots,
        }
    }

    pub fn span(ambient: usize, vectors: &[Vec<Scalar>]) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(ambient);
        }
        Subspace::from_rows(&Matrix::from_rows(vectors.to_vec(), ambient))
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(ambient: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let vecs: Vec<Vec<Scalar>> = indices
            .into_iter()
            .map(|j| {
                let mut v = vec![Scalar::zero(); ambient];
                v[j] = Scalar::one();
                v
            })
            .collect();
        Subspace::span(ambient, &vecs)
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// Basis rows in reduced row-echelon form.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Scalar>> {
        self.basis.row_vectors()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(())
    }

    /// Coordinates of `v` in the stored basis, or `None` if `v` is outside.
    pub fn coords(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        let c: Vec<Scalar> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut rebuilt = vec![Scalar::zero(); self.ambient];
        for (k, coef) in c.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            for (j, b) in self.basis.row(k).iter().enumerate() {
                if !b.is_zero() {
                    rebuilt[j] += &(coef * b);
                }
            }
        }
        (rebuilt == v).then_some(c)
    }

    pub fn contains_vector(&self, v: &[Scalar]) -> bool {
        self.coords(v).is_some()
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient
            && other.dim() <= self.dim()
            && (0..other.dim()).all(|k| self.contains_vector(other.basis.row(k)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        if other.is_zero() || self.is_full() {
            return Ok(self.clone());
        }
        if self.is_zero() || other.is_full() {
            return Ok(other.clone());
        }
        Ok(Subspace::from_rows(&self.basis.vstack(&other.basis)))
    }

    /// Annihilator under the bilinear pairing `x . y = sum x_j y_j`.
    pub fn annihilator(&self) -> Subspace {
        if self.is_zero() {
            return Subspace::full(self.ambient);
        }
        Subspace::span(self.ambient, &self.basis.nullspace())
    }

    /// Intersection via `U ∩ W = ann(ann U + ann W)`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        if self.contains(other) {
            return Ok(other.clone());
        }
        if other.contains(self) {
            return Ok(self.clone());
        }
        Ok(self.annihilator().sum(&other.annihilator())?.annihilator())
    }

    /// Image under `m` (`m.cols()` must equal the ambient dimension).
    pub fn image(&self, m: &Matrix) -> Result<Subspace> {
        if m.cols() != self.ambient {
            return Err(Error::AmbientMismatch {
                left: m.cols(),
                right: self.ambient,
            });
        }
        if self.is_zero() {
            return Ok(Subspace::zero(m.rows()));
        }
        Ok(Subspace::from_rows(&self.basis.mul(&m.transpose())))
    }

    /// Image under the antilinear map `x -> m * conj(x)`.
    pub fn antilinear_image(&self, m: &Matrix) -> Result<Subspace> {
        Subspace::from_rows(&self.basis.conj()).image(m)
    }

    /// `{x : m x ∈ target}`.
    pub fn preimage(m: &Matrix, target: &Subspace) -> Result<Subspace> {
        if m.rows() != target.ambient {
            return Err(Error::AmbientMismatch {
                left: m.rows(),
                right: target.ambient,
            });
        }
        let ann = target.annihilator();
        if ann.is_zero() {
            return Ok(Subspace::full(m.cols()));
        }
        Ok(Subspace::span(m.cols(), &ann.basis.mul(m).nullspace()))
    }

    pub fn kernel(m: &Matrix) -> Subspace {
        Subspace::span(m.cols(), &m.nullspace())
    }

    pub fn column_space(m: &Matrix) -> Subspace {
        Subspace::from_rows(&m.transpose())
    }

    /// Coordinates of `self`'s basis in `outer`'s basis: `outer.dim() x self.dim()`.
    pub fn inclusion_matrix(&self, outer: &Subspace) -> Result<Matrix> {
        self.check_ambient(outer)?;
        let mut cols = Vec::with_capacity(self.dim());
        for k in 0..self.dim() {
            cols.push(outer.coords(self.basis.row(k)).ok_or(Error::NotContained)?);
        }
        Ok(Matrix::from_columns(&cols, outer.dim()))
    }

    /// Expresses a subspace of `k^{self.dim()}` (in basis coordinates) back in the ambient.
    pub fn embed(&self, inner: &Subspace) -> Result<Subspace> {
        if inner.ambient != self.dim() {
            return Err(Error::AmbientMismatch {
                left: inner.ambient,
                right: self.dim(),
            });
        }
        inner.image(&self.basis.transpose())
    }

    /// Inverse of [`Subspace::embed`]: coordinates of `sub ⊆ self` in the stored basis.
    pub fn restrict(&self, sub: &Subspace) -> Result<Subspace> {
        Ok(Subspace::column_space(&sub.inclusion_matrix(self)?))
    }

    /// Basis vectors of `self` extending `inner` to all of `self`, chosen
    /// greedily in row-echelon order.
    pub fn complement_of(&self, inner: &Subspace) -> Result<Vec<Vec<Scalar>>> {
        if !self.contains(inner) {
            return Err(Error::NotContained);
        }
        let mut acc = inner.clone();
        let mut chosen = Vec::new();
        for k in 0..self.dim() {
            if acc.dim() == self.dim() {
                break;
            }
            let v = self.basis.row(k);
            if !acc.contains_vector(v) {
                chosen.push(v.to_vec());
                acc = Subspace::from_rows(&acc.basis.vstack(&Matrix::from_rows(vec![v.to_vec()], self.ambient)));
            }
        }
        Ok(chosen)
    }

    /// `self / inner` with a concrete projection and lift.
    pub fn quotient(&self, inner: &Subspace) -> Result<Quotient> {
        quotient(self, inner)
    }

    /// `self ⊗ other` inside `k^{a*b}` (Kronecker index convention).
    pub fn tensor(&self, other: &Subspace) -> Subspace {
        let amb = self.ambient * other.ambient;
        if self.is_zero() || other.is_zero() {
            return Subspace::zero(amb);
        }
        Subspace::from_rows(&self.basis.kron(&other.basis))
    }

    /// `self ⊕ other` inside `k^{a+b}`.
    pub fn direct_sum(&self, other: &Subspace) -> Subspace {
        Subspace::from_rows(&self.basis.direct_sum(&other.basis))
    }
}

/// Quotient `W / U` for `U ⊆ W`.
///
/// The lift spans the greedy complement of `U` in `W`; the projection is
/// zero on `U` and on the coordinate complement of `W` given by the
/// non-pivot columns of `W`.
pub fn quotient(w: &Subspace, u: &Subspace) -> Result<Quotient> {
    w.check_ambient(u)?;
    let comp = w.complement_of(u)?;
    let n = w.ambient;
    let m = comp.len();
    let mut rows = comp.clone();
    rows.extend(u.basis_vectors());
    let mut is_pivot = vec![false; n];
    for &p in &w.pivots {
        is_pivot[p] = true;
    }
    for j in (0..n).filter(|&j| !is_pivot[j]) {
        let mut e = vec![Scalar::zero(); n];
        e[j] = Scalar::one();
        rows.push(e);
    }
    let lift = Matrix::from_columns(&comp, n);
    if m == 0 {
        return Ok(Quotient {
            dim: 0,
            projection: Matrix::zeros(0, n),
            lift,
        });
    }
    let full = Matrix::from_rows(rows, n).transpose();
    let inv = full
        .inverse()
        .ok_or_else(|| Error::Defect("quotient basis not invertible".into()))?;
    let keep: Vec<usize> = (0..m).collect();
    Ok(Quotient {
        dim: m,
        projection: inv.select_rows(&keep),
        lift,
    })
}

/// Free-function forms of the lattice operations.
pub fn sum(u: &Subspace, w: &Subspace) -> Result<Subspace> {
    u.sum(w)
}

pub fn intersect(u: &Subspace, w: &Subspace) -> Result<Subspace> {
    u.intersect(w)
}
