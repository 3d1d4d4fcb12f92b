use std::collections::BTreeMap;

use crate::degree::{self, Degree, DegreeBox};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::subspace::Subspace;

/// A finitely generated `Z^n`-graded module over `k[z_1, ..., z_n]` with
/// `deg z_i = e_i`, stored on a window `[lo, hi]`.
///
/// Outside the window pieces are extended by clamping: `M_m = M_{clamp(m)}`
/// and multiplication by `z_i` is the identity whenever `m_i < lo_i` or
/// `m_i >= hi_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModule {
    window: DegreeBox,
    dims: Vec<usize>,
    /// `mult[i][idx]`: `M_m -> M_{m+e_i}` for the `idx`-th degree of the window.
    mult: Vec<Vec<Matrix>>,
}

/// Dimensions of a fiber, with the graded decomposition when it exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fiber {
    pub point: Vec<Scalar>,
    pub dim: usize,
    pub graded: Option<BTreeMap<Degree, usize>>,
}

impl GradedModule {
    /// Validates shapes and commutation of the multiplication maps.
    pub fn new(window: DegreeBox, dims: Vec<usize>, mult: Vec<Vec<Matrix>>) -> Result<Self> {
        let n = window.n();
        if dims.len() != window.len() || mult.len() != n {
            return Err(Error::InvalidModule("piece table does not match the window".into()));
        }
        let mut mult = mult;
        for (i, maps) in mult.iter_mut().enumerate() {
            if maps.len() != window.len() {
                return Err(Error::InvalidModule(format!("variable {} has the wrong number of maps", i + 1)));
            }
            for (idx, m) in window.iter().enumerate() {
                let d = dims[idx];
                if m[i] == window.hi[i] {
                    if maps[idx].shape() != (d, d) || maps[idx] != Matrix::identity(d) {
                        return Err(Error::InvalidModule(format!(
                            "z_{} must act as the identity on the top face at {m:?}",
                            i + 1
                        )));
                    }
                    continue;
                }
                let up = window.index_of(&degree::shift(&m, i, 1));
                if maps[idx].shape() != (dims[up], d) {
                    return Err(Error::InvalidModule(format!("z_{} at {m:?} has the wrong shape", i + 1)));
                }
            }
        }
        let module = GradedModule { window, dims, mult };
        module.check_commuting()?;
        Ok(module)
    }

    /// Module whose degree-`m` piece is `pieces(m) ⊆ k^ambient`, with `z_i`
    /// acting by inclusion. Requires `pieces(m) ⊆ pieces(m + e_i)`.
    pub fn from_subspaces(window: DegreeBox, pieces: impl Fn(&[i64]) -> Subspace) -> Result<Self> {
        let subs: Vec<Subspace> = window.iter().map(|m| pieces(&m)).collect();
        let dims = subs.iter().map(Subspace::dim).collect();
        let mut mult = Vec::with_capacity(window.n());
        for i in 0..window.n() {
            let mut maps = Vec::with_capacity(window.len());
            for (idx, m) in window.iter().enumerate() {
                if m[i] == window.hi[i] {
                    maps.push(Matrix::identity(subs[idx].dim()));
                    continue;
                }
                let up = window.index_of(&degree::shift(&m, i, 1));
                let map = subs[idx].inclusion_matrix(&subs[up]).map_err(|_| {
                    Error::InvalidModule(format!("piece at {m:?} is not contained in its z_{} shift", i + 1))
                })?;
                maps.push(map);
            }
            mult.push(maps);
        }
        Ok(GradedModule { window, dims, mult })
    }

    /// Module with pieces `num(m) / den(m)` inside a common ambient space and
    /// `z_i` induced by the identity of the ambient.
    pub fn from_quotients(
        window: DegreeBox,
        num: impl Fn(&[i64]) -> Subspace,
        den: impl Fn(&[i64]) -> Subspace,
    ) -> Result<Self> {
        let mut quots = Vec::with_capacity(window.len());
        for m in window.iter() {
            let (a, b) = (num(&m), den(&m));
            let q = a
                .quotient(&b)
                .map_err(|_| Error::InvalidModule(format!("relations at {m:?} escape the generators")))?;
            quots.push(q);
        }
        let dims = quots.iter().map(|q| q.dim).collect();
        let mut mult = Vec::with_capacity(window.n());
        for i in 0..window.n() {
            let mut maps = Vec::with_capacity(window.len());
            for (idx, m) in window.iter().enumerate() {
                if m[i] == window.hi[i] {
                    maps.push(Matrix::identity(quots[idx].dim));
                    continue;
                }
                let up = window.index_of(&degree::shift(&m, i, 1));
                maps.push(quots[up].projection.mul(&quots[idx].lift));
            }
            mult.push(maps);
        }
        let module = GradedModule { window, dims, mult };
        Ok(module)
    }

    /// The zero module on a window.
    pub fn zero(window: DegreeBox) -> Self {
        let len = window.len();
        let n = window.n();
        GradedModule {
            window,
            dims: vec![0; len],
            mult: vec![vec![Matrix::zeros(0, 0); len]; n],
        }
    }

    pub fn n(&self) -> usize {
        self.window.n()
    }

    pub fn window(&self) -> &DegreeBox {
        &self.window
    }

    pub fn dim(&self, m: &[i64]) -> usize {
        self.dims[self.window.index_of(&self.window.clamp(m))]
    }

    /// `z_i : M_m -> M_{m+e_i}`.
    pub fn mult(&self, i: usize, m: &[i64]) -> Matrix {
        let d = self.dim(m);
        if m[i] < self.window.lo[i] || m[i] >= self.window.hi[i] {
            return Matrix::identity(d);
        }
        let c = self.window.clamp(m);
        self.mult[i][self.window.index_of(&c)].clone()
    }

    /// `z^q : M_m -> M_{m+q}` for `q >= 0`.
    pub fn mult_monomial(&self, m: &[i64], q: &[i64]) -> Matrix {
        let mut cur = m.to_vec();
        let mut acc = Matrix::identity(self.dim(m));
        for i in 0..self.n() {
            assert!(q[i] >= 0, "monomial exponents must be nonnegative");
            let target = cur[i] + q[i];
            let start = cur[i].max(self.window.lo[i]);
            let stop = target.min(self.window.hi[i]);
            cur[i] = start;
            while cur[i] < stop {
                acc = self.mult(i, &cur).mul(&acc);
                cur[i] += 1;
            }
            cur[i] = target;
        }
        acc
    }

    /// `M_m -> M_hi`, the map into the top corner of the window.
    pub fn to_corner(&self, m: &[i64]) -> Matrix {
        let c = self.window.clamp(m);
        let q = degree::sub(&self.window.hi, &c);
        self.mult_monomial(&c, &q)
    }

    pub fn corner_dim(&self) -> usize {
        self.dim(&self.window.hi.clone())
    }

    pub fn check_commuting(&self) -> Result<()> {
        let n = self.n();
        for m in self.window.iter() {
            for i in 0..n {
                for j in (i + 1)..n {
                    let a = self.mult(j, &degree::shift(&m, i, 1)).mul(&self.mult(i, &m));
                    let b = self.mult(i, &degree::shift(&m, j, 1)).mul(&self.mult(j, &m));
                    if a != b {
                        return Err(Error::InvalidModule(format!(
                            "z_{} and z_{} do not commute at {m:?}",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `dim M_m` over the window, keyed by degree.
    pub fn piece_dims(&self) -> BTreeMap<Degree, usize> {
        self.window.iter().zip(self.dims.iter().copied()).collect()
    }

    /// Piece dims on an arbitrary box, using the clamping rule.
    pub fn piece_dims_on(&self, b: &DegreeBox) -> BTreeMap<Degree, usize> {
        b.iter().map(|m| {
            let d = self.dim(&m);
            (m, d)
        }).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// Ranks of every multiplication map on the window.
    pub fn mult_ranks(&self) -> Vec<BTreeMap<Degree, usize>> {
        (0..self.n())
            .map(|i| {
                self.window
                    .iter()
                    .filter(|m| m[i] < self.window.hi[i])
                    .map(|m| {
                        let r = self.mult(i, &m).rank();
                        (m, r)
                    })
                    .collect()
            })
            .collect()
    }

    /// `T_m = ker(M_m -> M_hi)`, the elements killed by some monomial.
    pub fn torsion_subspace(&self, m: &[i64]) -> Subspace {
        Subspace::kernel(&self.to_corner(m))
    }

    pub fn torsion_dims(&self) -> BTreeMap<Degree, usize> {
        self.window
            .iter()
            .filter_map(|m| {
                let d = self.torsion_subspace(&m).dim();
                (d > 0).then_some((m, d))
            })
            .collect()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.first_torsion_degree().is_none()
    }

    fn first_torsion_degree(&self) -> Option<Degree> {
        self.window.iter().find(|m| self.to_corner(m).rank() < self.dim(m))
    }

    pub fn require_torsion_free(&self) -> Result<()> {
        match self.first_torsion_degree() {
            Some(degree) => Err(Error::TorsionPresent { degree }),
            None => Ok(()),
        }
    }

    /// The torsion submodule with the restricted multiplication maps.
    pub fn torsion(&self) -> GradedModule {
        self.submodule(|m| self.torsion_subspace(m))
            .expect("torsion is a submodule")
    }

    /// Submodule given by `sub(m) ⊆ M_m`, which must be stable under every `z_i`.
    pub fn submodule(&self, sub: impl Fn(&[i64]) -> Subspace) -> Result<GradedModule> {
        let w = self.window.clone();
        let subs: Vec<Subspace> = w.iter().map(|m| sub(&m)).collect();
        let dims = subs.iter().map(Subspace::dim).collect();
        let mut mult = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            let mut maps = Vec::with_capacity(w.len());
            for (idx, m) in w.iter().enumerate() {
                if m[i] == w.hi[i] {
                    maps.push(Matrix::identity(subs[idx].dim()));
                    continue;
                }
                let up = w.index_of(&degree::shift(&m, i, 1));
                let z = self.mult(i, &m);
                let mut coords = Vec::with_capacity(subs[idx].dim());
                for v in subs[idx].basis_vectors() {
                    let c = subs[up].coords(&z.apply(&v)).ok_or_else(|| {
                        Error::InvalidModule(format!("submodule not stable under z_{} at {m:?}", i + 1))
                    })?;
                    coords.push(c);
                }
                maps.push(Matrix::from_columns(&coords, subs[up].dim()));
            }
            mult.push(maps);
        }
        Ok(GradedModule { window: w, dims, mult })
    }

    /// Images `im(M_m -> M_hi)` as subspaces of the corner piece.
    pub fn corner_images(&self) -> BTreeMap<Degree, Subspace> {
        self.window
            .iter()
            .map(|m| {
                let s = Subspace::column_space(&self.to_corner(&m));
                (m, s)
            })
            .collect()
    }

    /// `M / T`, realized inside the corner piece.
    pub fn torsion_free_quotient(&self) -> GradedModule {
        let images = self.corner_images();
        GradedModule::from_subspaces(self.window.clone(), |m| images[m].clone())
            .expect("images increase along every variable")
    }

    /// Inverts the variables in `vars`: the result is a module over the
    /// remaining variables whose pieces are those of `M` with the inverted
    /// coordinates pushed to the top of the window.
    pub fn invert_variables(&self, vars: &[usize]) -> GradedModule {
        let w = self.window.without(vars);
        let keep: Vec<usize> = (0..self.n()).filter(|i| !vars.contains(i)).collect();
        let lift = |m: &[i64]| -> Degree {
            let mut full = self.window.hi.clone();
            for (k, &i) in keep.iter().enumerate() {
                full[i] = m[k];
            }
            full
        };
        let dims = w.iter().map(|m| self.dim(&lift(&m))).collect();
        let mult = keep
            .iter()
            .map(|&i| w.iter().map(|m| self.mult(i, &lift(&m))).collect())
            .collect();
        GradedModule { window: w, dims, mult }
    }

    /// The graded fiber at the origin, `M_m / Σ_i z_i M_{m - e_i}`.
    pub fn fiber_at_zero_graded(&self) -> Result<BTreeMap<Degree, usize>> {
        self.check_lower_faces()?;
        let mut out = BTreeMap::new();
        for m in self.window.iter() {
            let d = self.dim(&m);
            if d == 0 {
                continue;
            }
            let mut relations = Matrix::zeros(d, 0);
            for i in 0..self.n() {
                let below = degree::shift(&m, i, -1);
                relations = relations.hstack(&self.mult(i, &below));
            }
            let f = d - relations.rank();
            if f > 0 {
                out.insert(m, f);
            }
        }
        Ok(out)
    }

    /// Fibers are only determined by the window when every piece on a lower
    /// face vanishes.
    fn check_lower_faces(&self) -> Result<()> {
        for m in self.window.iter() {
            if (0..self.n()).any(|i| m[i] == self.window.lo[i]) && self.dim(&m) > 0 {
                return Err(Error::WindowInsufficient(format!(
                    "piece at {m:?} on a lower face is nonzero"
                )));
            }
        }
        Ok(())
    }

    /// `dim M ⊗ k(a)`, computed from the presentation
    /// `⊕_{m, i: m_i < hi_i} M_m --(z_i - a_i)--> ⊕_m M_m`.
    pub fn fiber(&self, a: &[Scalar]) -> Result<Fiber> {
        if a.len() != self.n() {
            return Err(Error::Shape(format!("point has {} coordinates, module has {}", a.len(), self.n())));
        }
        self.check_lower_faces()?;
        if a.iter().all(Scalar::is_zero) {
            let graded = self.fiber_at_zero_graded()?;
            return Ok(Fiber {
                point: a.to_vec(),
                dim: graded.values().sum(),
                graded: Some(graded),
            });
        }
        let w = &self.window;
        let mut offsets = Vec::with_capacity(w.len());
        let mut total = 0;
        for m in w.iter() {
            offsets.push(total);
            total += self.dim(&m);
        }
        let mut columns: Vec<Vec<Scalar>> = Vec::new();
        for i in 0..self.n() {
            for (idx, m) in w.iter().enumerate() {
                if m[i] == w.hi[i] || self.dims[idx] == 0 {
                    continue;
                }
                let up = w.index_of(&degree::shift(&m, i, 1));
                let z = &self.mult[i][idx];
                for c in 0..self.dims[idx] {
                    let mut col = vec![Scalar::zero(); total];
                    for r in 0..z.rows() {
                        col[offsets[up] + r] = z[(r, c)].clone();
                    }
                    col[offsets[idx] + c] -= &a[i];
                    columns.push(col);
                }
            }
        }
        let rank = if columns.is_empty() {
            0
        } else {
            Matrix::from_columns(&columns, total).rank()
        };
        Ok(Fiber {
            point: a.to_vec(),
            dim: total - rank,
            graded: None,
        })
    }

    /// Fiber dimension through the torus orbit of `a`: invert the variables
    /// with `a_i != 0` and take the graded fiber at the origin of the rest.
    pub fn fiber_via_orbit(&self, a: &[Scalar]) -> Result<usize> {
        let inverted: Vec<usize> = (0..self.n()).filter(|&i| !a[i].is_zero()).collect();
        let local = self.invert_variables(&inverted);
        Ok(local.fiber_at_zero_graded()?.values().sum())
    }

    /// Codimension of the support of `M`: the least `|S|` such that `M`
    /// survives after inverting every variable outside `S`; `n + 1` if `M = 0`.
    pub fn support_codim(&self) -> usize {
        let n = self.n();
        for size in 0..=n {
            for s in degree::subsets_of_size(n, size) {
                let outside: Vec<usize> = (0..n).filter(|i| !s.contains(i)).collect();
                if !self.invert_variables(&outside).is_zero() {
                    return size;
                }
            }
        }
        n + 1
    }

    /// Re-expresses the module on a larger window covering the current one.
    pub fn extend_to(&self, window: &DegreeBox) -> GradedModule {
        let w = window.clone();
        let dims = w.iter().map(|m| self.dim(&m)).collect();
        let mult = (0..self.n())
            .map(|i| {
                w.iter()
                    .map(|m| if m[i] == w.hi[i] { Matrix::identity(self.dim(&m)) } else { self.mult(i, &m) })
                    .collect()
            })
            .collect();
        GradedModule { window: w, dims, mult }
    }

    /// Compares piece dims and multiplication ranks on the union of both windows.
    pub fn same_invariants(&self, other: &GradedModule) -> bool {
        if self.n() != other.n() {
            return false;
        }
        let w = self.window.union(&other.window);
        let (a, b) = (self.extend_to(&w), other.extend_to(&w));
        a.dims == b.dims && a.mult_ranks() == b.mult_ranks() && a.corner_ranks() == b.corner_ranks()
    }

    fn corner_ranks(&self) -> Vec<usize> {
        self.window.iter().map(|m| self.to_corner(&m).rank()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_module(r: i64) -> GradedModule {
        let w = DegreeBox::new(vec![-r - 1], vec![-r]);
        GradedModule::from_subspaces(w, |m| if m[0] >= -r { Subspace::full(1) } else { Subspace::zero(1) })
            .unwrap()
    }

    #[test]
    fn clamped_pieces() {
        let m = line_module(2);
        assert_eq!(m.dim(&[-10]), 0);
        assert_eq!(m.dim(&[-3]), 0);
        assert_eq!(m.dim(&[-2]), 1);
        assert_eq!(m.dim(&[7]), 1);
        assert!(m.is_torsion_free());
    }

    #[test]
    fn fibers_of_a_line() {
        let m = line_module(1);
        assert_eq!(m.fiber(&[Scalar::zero()]).unwrap().dim, 1);
        assert_eq!(m.fiber(&[Scalar::from(1)]).unwrap().dim, 1);
        assert_eq!(m.fiber(&[Scalar::i()]).unwrap().dim, 1);
        let g = m.fiber_at_zero_graded().unwrap();
        assert_eq!(g, BTreeMap::from([(vec![-1], 1)]));
    }

    #[test]
    fn skyscraper_torsion() {
        // k placed in degree -1, killed by z.
        let w = DegreeBox::new(vec![-2], vec![0]);
        let dims = vec![0, 1, 0];
        let mult = vec![vec![Matrix::zeros(1, 0), Matrix::zeros(0, 1), Matrix::identity(0)]];
        let m = GradedModule::new(w, dims, mult).unwrap();
        assert_eq!(m.torsion_dims(), BTreeMap::from([(vec![-1], 1)]));
        assert_eq!(m.support_codim(), 1);
        assert!(m.torsion_free_quotient().is_zero());
        assert_eq!(m.fiber(&[Scalar::from(1)]).unwrap().dim, 0);
        assert_eq!(m.fiber(&[Scalar::zero()]).unwrap().dim, 1);
        assert_eq!(GradedModule::zero(DegreeBox::cube(2, 0, 1)).support_codim(), 3);
    }

    #[test]
    fn rejects_non_commuting_maps() {
        let w = DegreeBox::cube(2, 0, 1);
        let one = Matrix::identity(1);
        let two = one.scale(&Scalar::from(2));
        let dims = vec![1; 4];
        let mult = vec![
            vec![one.clone(), one.clone(), one.clone(), one.clone()],
            vec![one.clone(), one.clone(), two, one.clone()],
        ];
        assert!(matches!(GradedModule::new(w, dims, mult), Err(Error::InvalidModule(_))));
    }
}
