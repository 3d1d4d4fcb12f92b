//! Equivariant connections `d + Σ_{p,i} A_{p,i} z^p dz_i/z_i` on split
//! toric bundles over `A^n`.

use std::collections::BTreeMap;

use crate::degree::{self, Degree, DegreeBox};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Polynomial matrix `Σ_p M_p z^p` with `p ∈ Z^n_{>=0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatPoly {
    n: usize,
    dim: usize,
    terms: BTreeMap<Degree, Matrix>,
}

impl MatPoly {
    pub fn zero(n: usize, dim: usize) -> Self {
        MatPoly {
            n,
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, m: Matrix) -> Self {
        let dim = m.rows();
        let mut p = MatPoly::zero(n, dim);
        p.add_term(vec![0; n], m);
        p
    }

    pub fn identity(n: usize, dim: usize) -> Self {
        MatPoly::constant(n, Matrix::identity(dim))
    }

    pub fn from_terms(n: usize, dim: usize, terms: impl IntoIterator<Item = (Degree, Matrix)>) -> Result<Self> {
        let mut p = MatPoly::zero(n, dim);
        for (d, m) in terms {
            if d.len() != n || d.iter().any(|&x| x < 0) {
                return Err(Error::InvalidGauge(format!("exponent {d:?} is not in N^{n}")));
            }
            if m.shape() != (dim, dim) {
                return Err(Error::InvalidGauge(format!("coefficient at {d:?} is not {dim}x{dim}")));
            }
            p.add_term(d, m);
        }
        Ok(p)
    }

    fn add_term(&mut self, d: Degree, m: Matrix) {
        let sum = match self.terms.remove(&d) {
            Some(old) => old.add(&m),
            None => m,
        };
        if !sum.is_zero() {
            self.terms.insert(d, sum);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<Degree, Matrix> {
        &self.terms
    }

    pub fn coeff(&self, d: &[i64]) -> Matrix {
        self.terms.get(d).cloned().unwrap_or_else(|| Matrix::zeros(self.dim, self.dim))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|d| d.iter().all(|&x| x == 0))
    }

    pub fn add(&self, other: &MatPoly) -> MatPoly {
        let mut out = self.clone();
        for (d, m) in &other.terms {
            out.add_term(d.clone(), m.clone());
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> MatPoly {
        let mut out = MatPoly::zero(self.n, self.dim);
        for (d, m) in &self.terms {
            out.add_term(d.clone(), m.scale(s));
        }
        out
    }

    pub fn mul(&self, other: &MatPoly) -> MatPoly {
        let mut out = MatPoly::zero(self.n, self.dim);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(degree::add(a, b), x.mul(y));
            }
        }
        out
    }

    /// `z_i ∂_i`.
    pub fn euler(&self, i: usize) -> MatPoly {
        let mut out = MatPoly::zero(self.n, self.dim);
        for (d, m) in &self.terms {
            out.add_term(d.clone(), m.scale(&Scalar::from(d[i])));
        }
        out
    }

    /// Inverse when the constant term is invertible and the rest is
    /// nilpotent; `None` otherwise.
    pub fn inverse(&self) -> Option<MatPoly> {
        let c0 = self.coeff(&vec![0; self.n]);
        let c0_inv = c0.inverse()?;
        let mut rest = self.clone();
        rest.terms.remove(&vec![0; self.n]);
        let minus_n = MatPoly::constant(self.n, c0_inv.scale(&Scalar::from(-1))).mul(&rest);
        let mut series = MatPoly::identity(self.n, self.dim);
        let mut power = MatPoly::identity(self.n, self.dim);
        let bound = self.dim * (1 + self.terms.keys().map(|d| d.iter().sum::<i64>() as usize).max().unwrap_or(0));
        for _ in 0..=bound + 1 {
            power = power.mul(&minus_n);
            if power.is_zero() {
                let inv = series.mul(&MatPoly::constant(self.n, c0_inv.clone()));
                return (inv.mul(self) == MatPoly::identity(self.n, self.dim)).then_some(inv);
            }
            series = series.add(&power);
        }
        None
    }
}

/// `∇ = d + Σ_{p,i} A_{p,i} z^p dz_i/z_i` on the frame `e_1, ..., e_dim`
/// where `e_k` has degree `grading[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantConnection {
    n: usize,
    grading: Vec<Degree>,
    coeffs: BTreeMap<(Degree, usize), Matrix>,
}

/// Key `(p, i, j)` with `i < j`.
pub type Curvature = BTreeMap<(Degree, usize, usize), Matrix>;

impl EquivariantConnection {
    /// Stores the data as given; see [`EquivariantConnection::violations`].
    pub fn new(n: usize, grading: Vec<Degree>, coeffs: impl IntoIterator<Item = ((Degree, usize), Matrix)>) -> Result<Self> {
        let dim = grading.len();
        if grading.iter().any(|w| w.len() != n) {
            return Err(Error::InvalidConnection("fiber grading has the wrong length".into()));
        }
        let mut map: BTreeMap<(Degree, usize), Matrix> = BTreeMap::new();
        for ((p, i), a) in coeffs {
            if p.len() != n || i >= n {
                return Err(Error::InvalidConnection(format!("coefficient key ({p:?}, {i}) out of range")));
            }
            if a.shape() != (dim, dim) {
                return Err(Error::InvalidConnection(format!("A_{{{p:?},{}}} is not {dim}x{dim}", i + 1)));
            }
            let key = (p, i);
            let sum = match map.remove(&key) {
                Some(old) => old.add(&a),
                None => a,
            };
            if !sum.is_zero() {
                map.insert(key, sum);
            }
        }
        Ok(EquivariantConnection { n, grading, coeffs: map })
    }

    /// The canonical connection `d`.
    pub fn trivial(n: usize, grading: Vec<Degree>) -> Self {
        EquivariantConnection {
            n,
            grading,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.grading.len()
    }

    pub fn grading(&self) -> &[Degree] {
        &self.grading
    }

    pub fn coeffs(&self) -> &BTreeMap<(Degree, usize), Matrix> {
        &self.coeffs
    }

    pub fn coeff(&self, p: &[i64], i: usize) -> Matrix {
        self.coeffs
            .get(&(p.to_vec(), i))
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dim(), self.dim()))
    }

    /// Checks that `m` has pure degree `-p`: entry `(r, c)` vanishes unless
    /// `grading[r] = grading[c] - p`.
    pub fn has_degree(grading: &[Degree], m: &Matrix, p: &[i64]) -> bool {
        (0..m.rows()).all(|r| {
            (0..m.cols()).all(|c| m[(r, c)].is_zero() || grading[r] == degree::sub(&grading[c], p))
        })
    }

    /// All violated well-formedness constraints, empty when well-formed.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for ((p, i), a) in &self.coeffs {
            if p.iter().any(|&x| x < 0) {
                out.push(format!("A_{{{p:?},{}}}: exponent has a negative entry", i + 1));
            }
            if p[*i] == 0 {
                out.push(format!("A_{{{p:?},{}}} is nonzero but p_{} = 0", i + 1, i + 1));
            }
            if !Self::has_degree(&self.grading, a, p) {
                out.push(format!("A_{{{p:?},{}}} is not of degree -p", i + 1));
            }
        }
        out
    }

    pub fn check_wellformed(&self) -> bool {
        self.violations().is_empty()
    }

    fn require_wellformed(&self) -> Result<()> {
        match self.violations().first() {
            Some(v) => Err(Error::InvalidConnection(v.clone())),
            None => Ok(()),
        }
    }

    /// `Ω_i = Σ_p A_{p,i} z^p`.
    pub fn omega(&self, i: usize) -> MatPoly {
        let terms = self.coeffs.iter().filter(|((_, j), _)| *j == i).map(|((p, _), a)| (p.clone(), a.clone()));
        MatPoly::from_terms(self.n, self.dim(), terms).expect("well-formed exponents")
    }

    /// `K_{p,ij} = p_i A_{p,j} - p_j A_{p,i} + Σ_{q+r=p} [A_{q,i}, A_{r,j}]`,
    /// nonzero entries only.
    pub fn curvature(&self) -> Result<Curvature> {
        self.require_wellformed()?;
        let mut out = Curvature::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let (oi, oj) = (self.omega(i), self.omega(j));
                let k = oi.euler_pair(&oj, i, j).add(&oi.mul(&oj)).add(&oj.mul(&oi).scale(&Scalar::from(-1)));
                for (p, m) in k.terms {
                    out.insert((p, i, j), m);
                }
            }
        }
        Ok(out)
    }

    pub fn is_flat(&self) -> Result<bool> {
        Ok(self.curvature()?.is_empty())
    }

    /// `Ω^g = g^{-1} Ω g + g^{-1} (z_i ∂_i g)` in every direction.
    pub fn gauge_transform(&self, g: &MatPoly) -> Result<EquivariantConnection> {
        self.require_wellformed()?;
        if g.n() != self.n || g.dim() != self.dim() {
            return Err(Error::InvalidGauge("gauge has the wrong size".into()));
        }
        for (p, m) in g.terms() {
            if !Self::has_degree(&self.grading, m, p) {
                return Err(Error::InvalidGauge(format!("coefficient at {p:?} is not of degree -p")));
            }
        }
        let inv = g
            .inverse()
            .ok_or_else(|| Error::InvalidGauge("gauge is not invertible over the polynomial ring".into()))?;
        let mut coeffs = Vec::new();
        for i in 0..self.n {
            let new = inv.mul(&self.omega(i)).mul(g).add(&inv.mul(&g.euler(i)));
            for (p, m) in new.terms {
                coeffs.push(((p, i), m));
            }
        }
        let out = EquivariantConnection::new(self.n, self.grading.clone(), coeffs)?;
        if let Some(v) = out.violations().first() {
            return Err(Error::Defect(format!("gauge transform produced an ill-formed connection: {v}")));
        }
        Ok(out)
    }

    /// `Ω = h^{-1} dh`: the canonical connection seen in the frame `h`.
    pub fn gauge_of_trivial(n: usize, grading: Vec<Degree>, h: &MatPoly) -> Result<EquivariantConnection> {
        EquivariantConnection::trivial(n, grading).gauge_transform(h)
    }

    /// Exponents `p >= 0` that can carry a degree `-p` endomorphism.
    pub fn degree_spread(&self) -> DegreeBox {
        let mut hi = vec![0; self.n];
        for a in &self.grading {
            for b in &self.grading {
                for k in 0..self.n {
                    hi[k] = hi[k].max(a[k] - b[k]);
                }
            }
        }
        DegreeBox::new(vec![0; self.n], hi)
    }

    /// Solves `z_i ∂_i g = -Ω_i g` with `g_0 = Id` degree by degree, so that
    /// gauging by `g` gives `d`.
    pub fn trivialize_flat(&self) -> Result<MatPoly> {
        if !self.is_flat()? {
            return Err(Error::NotFlat);
        }
        let dim = self.dim();
        let spread = self.degree_spread();
        let mut degrees: Vec<Degree> = spread.iter().collect();
        degrees.sort_by_key(|p| (p.iter().sum::<i64>(), p.clone()));
        let mut g: BTreeMap<Degree, Matrix> = BTreeMap::new();
        g.insert(vec![0; self.n], Matrix::identity(dim));
        for p in degrees.iter().skip(1) {
            let rhs = |i: usize| -> Matrix {
                let mut acc = Matrix::zeros(dim, dim);
                for (r, gr) in &g {
                    let q = degree::sub(p, r);
                    if q.iter().all(|&x| x >= 0) && q.iter().any(|&x| x > 0) {
                        acc = acc.sub(&self.coeff(&q, i).mul(gr));
                    }
                }
                acc
            };
            let i0 = (0..self.n).find(|&i| p[i] > 0).expect("nonzero exponent");
            let gp = rhs(i0).scale(&Scalar::from_ratio(1, p[i0]));
            for j in 0..self.n {
                if gp.scale(&Scalar::from(p[j])) != rhs(j) {
                    return Err(Error::InconsistentRecursion { degree: p.clone() });
                }
            }
            if !gp.is_zero() {
                g.insert(p.clone(), gp);
            }
        }
        let g = MatPoly::from_terms(self.n, dim, g)?;
        let check = self.gauge_transform(&g)?;
        if !check.coeffs.is_empty() {
            return Err(Error::Defect("trivializing gauge does not reach d".into()));
        }
        Ok(g)
    }
}

impl MatPoly {
    /// `z_i ∂_i other - z_j ∂_j self` for the pair `(self, other) = (Ω_i, Ω_j)`.
    fn euler_pair(&self, other: &MatPoly, i: usize, j: usize) -> MatPoly {
        other.euler(i).add(&self.euler(j).scale(&Scalar::from(-1)))
    }
}

/// Degree-0 automorphisms commute with the grading: `c` maps each graded
/// piece to itself.
pub fn is_graded_automorphism(grading: &[Degree], c: &Matrix) -> bool {
    EquivariantConnection::has_degree(grading, c, &vec![0; grading.first().map_or(0, Vec::len)]) && c.inverse().is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank_two() -> Vec<Degree> {
        vec![vec![1, 1], vec![0, 0]]
    }

    fn nil(r: usize, c: usize) -> Matrix {
        let mut m = Matrix::zeros(2, 2);
        m[(r, c)] = Scalar::one();
        m
    }

    #[test]
    fn trivial_connection() {
        let d = EquivariantConnection::trivial(2, rank_two());
        assert!(d.check_wellformed());
        assert!(d.is_flat().unwrap());
        assert_eq!(d.trivialize_flat().unwrap(), MatPoly::identity(2, 2));
    }

    #[test]
    fn violations_are_reported() {
        let bad_pole = EquivariantConnection::new(2, rank_two(), [((vec![0, 1], 0), nil(1, 0))]).unwrap();
        assert!(!bad_pole.check_wellformed());
        let bad_degree = EquivariantConnection::new(2, rank_two(), [((vec![1, 0], 0), nil(1, 0))]).unwrap();
        assert!(!bad_degree.check_wellformed());
    }

    #[test]
    fn exact_form_is_flat_and_trivializes() {
        // Ω = N d(z_1 z_2) with N: e_1 -> e_2
        let a = nil(1, 0);
        let conn = EquivariantConnection::new(
            2,
            rank_two(),
            [((vec![1, 1], 0), a.clone()), ((vec![1, 1], 1), a.clone())],
        )
        .unwrap();
        assert!(conn.check_wellformed());
        assert!(conn.is_flat().unwrap());
        let g = conn.trivialize_flat().unwrap();
        assert_eq!(g.coeff(&[1, 1]), a.scale(&Scalar::from(-1)));
        let single = EquivariantConnection::new(2, rank_two(), [((vec![1, 1], 0), a)]).unwrap();
        assert!(!single.is_flat().unwrap());
        assert_eq!(single.trivialize_flat(), Err(Error::NotFlat));
    }

    #[test]
    fn gauge_of_trivial_round_trips() {
        let h = MatPoly::from_terms(2, 2, [(vec![0, 0], Matrix::identity(2)), (vec![1, 1], nil(1, 0).scale(&Scalar::from(3)))])
            .unwrap();
        let conn = EquivariantConnection::gauge_of_trivial(2, rank_two(), &h).unwrap();
        assert!(conn.is_flat().unwrap());
        let g = conn.trivialize_flat().unwrap();
        let c = h.mul(&g);
        assert!(c.is_constant());
        assert!(is_graded_automorphism(&rank_two(), &c.coeff(&[0, 0])));
    }

    #[test]
    fn polynomial_inverse() {
        let h = MatPoly::from_terms(1, 2, [(vec![0], Matrix::identity(2)), (vec![2], nil(1, 0))]).unwrap();
        let inv = h.inverse().unwrap();
        assert_eq!(inv.mul(&h), MatPoly::identity(1, 2));
        let not_unit = MatPoly::from_terms(1, 2, [(vec![0], Matrix::identity(2)), (vec![1], Matrix::identity(2))]).unwrap();
        assert!(not_unit.inverse().is_none());
    }
}
