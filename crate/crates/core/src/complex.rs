//! Bounded double complexes `(C^{p,q}, ∂, ∂̄)`, their total cohomology, the
//! Hodge filtration and the spectral sequence of the column filtration.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::multifilt::Filtration;
use crate::scalar::Scalar;
use crate::subspace::{Quotient, Subspace};

pub type Bidegree = (i64, i64);

/// A double complex supported in `0 <= p, q <= bound`.
///
/// `del[(p, q)]` maps `C^{p,q} -> C^{p+1,q}`, `delbar[(p, q)]` maps
/// `C^{p,q} -> C^{p,q+1}`, and `sigma[(p, q)]` is the matrix `S` of the
/// antilinear map `x -> S conj(x)` from `C^{p,q}` to `C^{q,p}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedComplex {
    bound: i64,
    dims: BTreeMap<Bidegree, usize>,
    del: BTreeMap<Bidegree, Matrix>,
    delbar: BTreeMap<Bidegree, Matrix>,
    sigma: Option<BTreeMap<Bidegree, Matrix>>,
}

/// `H^k` of a complex together with a chosen coordinate system.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub degree: i64,
    pub dim: usize,
    pub cycles: Subspace,
    pub boundaries: Subspace,
    /// `projection` maps cycles onto `k^dim`; `lift` gives representatives.
    pub quotient: Quotient,
}

impl Cohomology {
    /// Class of each cycle, as a subspace of `H^k` coordinates.
    pub fn classes(&self, s: &Subspace) -> Subspace {
        s.image(&self.quotient.projection).expect("same ambient")
    }
}

fn total_from<F: Fn(Bidegree) -> usize>(bound: i64, k: i64, dim: F) -> Vec<(i64, usize)> {
    let mut out = Vec::new();
    let mut off = 0;
    for p in 0..=bound {
        let q = k - p;
        if !(0..=bound).contains(&q) {
            continue;
        }
        out.push((p, off));
        off += dim((p, q));
    }
    out
}

impl BigradedComplex {
    /// Validates shapes, `∂² = ∂̄² = ∂∂̄ + ∂̄∂ = 0` and, when present, the
    /// real structure axioms.
    pub fn new(
        bound: i64,
        dims: BTreeMap<Bidegree, usize>,
        del: BTreeMap<Bidegree, Matrix>,
        delbar: BTreeMap<Bidegree, Matrix>,
        sigma: Option<BTreeMap<Bidegree, Matrix>>,
    ) -> Result<Self> {
        if bound < 0 {
            return Err(Error::InvalidComplex("bound must be nonnegative".into()));
        }
        for &(p, q) in dims.keys() {
            if !(0..=bound).contains(&p) || !(0..=bound).contains(&q) {
                return Err(Error::InvalidComplex(format!("term ({p},{q}) outside 0..={bound}")));
            }
        }
        let mut x = BigradedComplex {
            bound,
            dims,
            del: BTreeMap::new(),
            delbar: BTreeMap::new(),
            sigma: None,
        };
        x.del = x.normalize_maps(del, (1, 0), "del")?;
        x.delbar = x.normalize_maps(delbar, (0, 1), "delbar")?;
        x.check_square_zero()?;
        if let Some(s) = sigma {
            x.sigma = Some(x.normalize_sigma(s)?);
            x.check_real_structure()?;
        }
        Ok(x)
    }

    fn normalize_maps(
        &self,
        given: BTreeMap<Bidegree, Matrix>,
        step: Bidegree,
        name: &str,
    ) -> Result<BTreeMap<Bidegree, Matrix>> {
        let mut out = BTreeMap::new();
        for p in 0..=self.bound {
            for q in 0..=self.bound {
                let src = self.dim((p, q));
                let tgt = self.dim((p + step.0, q + step.1));
                let m = match given.get(&(p, q)) {
                    Some(m) => {
                        if m.shape() != (tgt, src) {
                            return Err(Error::InvalidComplex(format!(
                                "{name} at ({p},{q}) is {}x{}, expected {tgt}x{src}",
                                m.rows(),
                                m.cols()
                            )));
                        }
                        m.clone()
                    }
                    None => Matrix::zeros(tgt, src),
                };
                out.insert((p, q), m);
            }
        }
        for key in given.keys() {
            if !out.contains_key(key) {
                return Err(Error::InvalidComplex(format!("{name} given outside the support at {key:?}")));
            }
        }
        Ok(out)
    }

    fn normalize_sigma(&self, given: BTreeMap<Bidegree, Matrix>) -> Result<BTreeMap<Bidegree, Matrix>> {
        let mut out = BTreeMap::new();
        for p in 0..=self.bound {
            for q in 0..=self.bound {
                let (src, tgt) = (self.dim((p, q)), self.dim((q, p)));
                let m = match given.get(&(p, q)) {
                    Some(m) if m.shape() == (tgt, src) => m.clone(),
                    Some(m) => {
                        return Err(Error::InvalidComplex(format!(
                            "sigma at ({p},{q}) is {}x{}, expected {tgt}x{src}",
                            m.rows(),
                            m.cols()
                        )))
                    }
                    None if src == 0 => Matrix::zeros(tgt, 0),
                    None => return Err(Error::InvalidComplex(format!("sigma missing at ({p},{q})"))),
                };
                out.insert((p, q), m);
            }
        }
        Ok(out)
    }

    fn check_square_zero(&self) -> Result<()> {
        for p in 0..=self.bound {
            for q in 0..=self.bound {
                let dd = self.del_at((p + 1, q)).mul(&self.del_at((p, q)));
                if !dd.is_zero() {
                    return Err(Error::InvalidComplex(format!("del^2 != 0 at ({p},{q})")));
                }
                let bb = self.delbar_at((p, q + 1)).mul(&self.delbar_at((p, q)));
                if !bb.is_zero() {
                    return Err(Error::InvalidComplex(format!("delbar^2 != 0 at ({p},{q})")));
                }
                let a = self.delbar_at((p + 1, q)).mul(&self.del_at((p, q)));
                let b = self.del_at((p, q + 1)).mul(&self.delbar_at((p, q)));
                if !a.add(&b).is_zero() {
                    return Err(Error::InvalidComplex(format!(
                        "del delbar + delbar del != 0 at ({p},{q})"
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_real_structure(&self) -> Result<()> {
        let s = self.sigma.as_ref().expect("checked by caller");
        for p in 0..=self.bound {
            for q in 0..=self.bound {
                let there = &s[&(p, q)];
                let back = &s[&(q, p)];
                if back.mul(&there.conj()) != Matrix::identity(self.dim((p, q))) {
                    return Err(Error::InvalidComplex(format!("sigma is not an involution at ({p},{q})")));
                }
                if p < self.bound {
                    let lhs = s[&(p + 1, q)].mul(&self.del_at((p, q)).conj());
                    let rhs = self.delbar_at((q, p)).mul(there);
                    if lhs != rhs {
                        return Err(Error::InvalidComplex(format!(
                            "sigma does not swap del and delbar at ({p},{q})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn dim(&self, pq: Bidegree) -> usize {
        self.dims.get(&pq).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &BTreeMap<Bidegree, usize> {
        &self.dims
    }

    pub fn has_real_structure(&self) -> bool {
        self.sigma.is_some()
    }

    pub fn del_at(&self, pq: Bidegree) -> Matrix {
        self.del
            .get(&pq)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dim((pq.0 + 1, pq.1)), self.dim(pq)))
    }

    pub fn delbar_at(&self, pq: Bidegree) -> Matrix {
        self.delbar
            .get(&pq)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dim((pq.0, pq.1 + 1)), self.dim(pq)))
    }

    pub fn sigma_at(&self, pq: Bidegree) -> Option<&Matrix> {
        self.sigma.as_ref().map(|s| &s[&pq])
    }

    /// Total degrees carrying nonzero terms span `0..=max_degree`.
    pub fn max_degree(&self) -> i64 {
        2 * self.bound
    }

    /// `(p, offset)` of each block of `C^k`, ordered by increasing `p`.
    pub fn blocks(&self, k: i64) -> Vec<(i64, usize)> {
        total_from(self.bound, k, |pq| self.dim(pq))
    }

    pub fn total_dim(&self, k: i64) -> usize {
        self.blocks(k).iter().map(|&(p, _)| self.dim((p, k - p))).sum()
    }

    /// `a ∂ + b ∂̄ : C^k -> C^{k+1}`.
    pub fn total_differential_with(&self, k: i64, a: &Scalar, b: &Scalar) -> Matrix {
        let rows = self.total_dim(k + 1);
        let cols = self.total_dim(k);
        let mut m = Matrix::zeros(rows, cols);
        let targets: BTreeMap<i64, usize> = self.blocks(k + 1).into_iter().collect();
        for (p, off) in self.blocks(k) {
            let q = k - p;
            let src = self.dim((p, q));
            if src == 0 {
                continue;
            }
            if let Some(&t) = targets.get(&(p + 1)) {
                let d = self.del_at((p, q));
                for r in 0..d.rows() {
                    for c in 0..src {
                        m[(t + r, off + c)] += &(a * &d[(r, c)]);
                    }
                }
            }
            if let Some(&t) = targets.get(&p) {
                let d = self.delbar_at((p, q));
                for r in 0..d.rows() {
                    for c in 0..src {
                        m[(t + r, off + c)] += &(b * &d[(r, c)]);
                    }
                }
            }
        }
        m
    }

    /// `d = ∂ + ∂̄ : C^k -> C^{k+1}`.
    pub fn total_differential(&self, k: i64) -> Matrix {
        self.total_differential_with(k, &Scalar::one(), &Scalar::one())
    }

    /// `F^p C^k = ⊕_{r >= p} C^{r, k-r}`.
    pub fn f_step(&self, k: i64, p: i64) -> Subspace {
        let n = self.total_dim(k);
        let mut idx = Vec::new();
        for (r, off) in self.blocks(k) {
            if r >= p {
                idx.extend(off..off + self.dim((r, k - r)));
            }
        }
        Subspace::coordinate(n, idx)
    }

    /// `F̄^p C^k = ⊕_{s >= p} C^{k-s, s}`.
    pub fn fbar_step(&self, k: i64, p: i64) -> Subspace {
        let n = self.total_dim(k);
        let mut idx = Vec::new();
        for (r, off) in self.blocks(k) {
            if k - r >= p {
                idx.extend(off..off + self.dim((r, k - r)));
            }
        }
        Subspace::coordinate(n, idx)
    }

    /// The antilinear involution on `C^k` as the matrix `S` of `x -> S conj(x)`.
    pub fn total_sigma(&self, k: i64) -> Result<Matrix> {
        let s = self.sigma.as_ref().ok_or(Error::NoRealStructure)?;
        let n = self.total_dim(k);
        let offsets: BTreeMap<i64, usize> = self.blocks(k).into_iter().collect();
        let mut m = Matrix::zeros(n, n);
        for (&p, &off) in &offsets {
            let q = k - p;
            let block = &s[&(p, q)];
            let t = offsets[&q];
            for r in 0..block.rows() {
                for c in 0..block.cols() {
                    m[(t + r, off + c)] = block[(r, c)].clone();
                }
            }
        }
        Ok(m)
    }

    fn cohomology_of(&self, k: i64, d_in: &Matrix, d_out: &Matrix) -> Cohomology {
        let n = self.total_dim(k);
        let cycles = Subspace::kernel(d_out);
        let boundaries = if d_in.cols() == 0 { Subspace::zero(n) } else { Subspace::column_space(d_in) };
        let quotient = cycles.quotient(&boundaries).expect("d^2 = 0");
        Cohomology {
            degree: k,
            dim: quotient.dim,
            cycles,
            boundaries,
            quotient,
        }
    }

    /// `H^k(C, d)` with a chosen basis.
    pub fn total_cohomology(&self, k: i64) -> Cohomology {
        self.cohomology_of(k, &self.total_differential(k - 1), &self.total_differential(k))
    }

    pub fn betti(&self) -> Vec<usize> {
        (0..=self.max_degree()).map(|k| self.total_cohomology(k).dim).collect()
    }

    /// Cohomology of `d_h = h ∂ + ∂̄`.
    pub fn twisted_cohomology(&self, h: &Scalar, k: i64) -> Cohomology {
        let one = Scalar::one();
        self.cohomology_of(
            k,
            &self.total_differential_with(k - 1, h, &one),
            &self.total_differential_with(k, h, &one),
        )
    }

    fn filtration_on(&self, h: &Cohomology, step: impl Fn(i64) -> Subspace) -> Filtration {
        let values = (0..=self.bound + 1)
            .map(|p| h.classes(&step(p).intersect(&h.cycles).expect("same ambient")))
            .collect();
        Filtration::from_values(h.dim, 0, values).expect("images of a descending filtration")
    }

    /// `F^p H^k = im(H^k(F^p C) -> H^k(C))` in the coordinates of [`Self::total_cohomology`].
    pub fn hodge_filtration(&self, k: i64) -> Filtration {
        let h = self.total_cohomology(k);
        self.filtration_on(&h, |p| self.f_step(k, p))
    }

    /// `σ(F^p) H^k`, computed by applying the real structure to `F^p`-cycles.
    pub fn conjugate_filtration(&self, k: i64) -> Result<Filtration> {
        let s = self.total_sigma(k)?;
        let h = self.total_cohomology(k);
        Ok(self.filtration_on(&h, |p| {
            self.f_step(k, p)
                .intersect(&h.cycles)
                .expect("same ambient")
                .antilinear_image(&s)
                .expect("square")
        }))
    }

    /// `θ_h ∘ d = d_h ∘ θ_h` on every total degree, where `θ_h = h^p` on `C^{p,q}`.
    pub fn theta_intertwine_check(&self, h: &Scalar) -> bool {
        if h.is_zero() {
            return false;
        }
        let one = Scalar::one();
        (-1..=self.max_degree()).all(|k| {
            let lhs = self.theta(h, k + 1).mul(&self.total_differential(k));
            let rhs = self.total_differential_with(k, h, &one).mul(&self.theta(h, k));
            lhs == rhs
        })
    }

    /// `θ_h` on `C^k`.
    pub fn theta(&self, h: &Scalar, k: i64) -> Matrix {
        let n = self.total_dim(k);
        let mut m = Matrix::zeros(n, n);
        for (p, off) in self.blocks(k) {
            let f = h.pow(p as u32);
            for c in 0..self.dim((p, k - p)) {
                m[(off + c, off + c)] = f.clone();
            }
        }
        m
    }
}

/// Pages, differentials and degeneration data of the column-filtration
/// spectral sequence.
#[derive(Clone, Debug)]
pub struct SpectralSequenceTable {
    /// `pages[r - 1][(p, q)] = dim E_r^{p,q}` (nonzero entries).
    pub pages: Vec<BTreeMap<Bidegree, usize>>,
    /// `differentials[r - 1][(p, q)]`: the matrix of `d_r` leaving `E_r^{p,q}` (nonzero maps).
    pub differentials: Vec<BTreeMap<Bidegree, Matrix>>,
    /// Least `r` with `d_{r'} = 0` for all `r' >= r`.
    pub degeneration_page: usize,
    /// The same, restricted to maps entering or leaving total degree `k`.
    pub degeneration_by_degree: BTreeMap<i64, usize>,
    pub e_infinity: BTreeMap<Bidegree, usize>,
}

impl SpectralSequenceTable {
    pub fn page(&self, r: usize) -> &BTreeMap<Bidegree, usize> {
        let last = self.pages.len();
        &self.pages[r.min(last) - 1]
    }

    /// `Σ_{p+q=k} dim E_r^{p,q}`.
    pub fn total(&self, r: usize, k: i64) -> usize {
        self.page(r).iter().filter(|((p, q), _)| p + q == k).map(|(_, d)| d).sum()
    }

    pub fn d_rank(&self, r: usize) -> usize {
        self.differentials
            .get(r - 1)
            .map_or(0, |m| m.values().map(Matrix::rank).sum())
    }
}

struct PageEntry {
    z: Subspace,
    quotient: Quotient,
}

impl BigradedComplex {
    /// `Z_r^p(C^k) = {x ∈ F^p C^k : dx ∈ F^{p+r} C^{k+1}}`.
    pub fn z_r(&self, k: i64, p: i64, r: i64) -> Subspace {
        let d = self.total_differential(k);
        let f = self.f_step(k, p);
        let pre = Subspace::preimage(&d, &self.f_step(k + 1, p + r)).expect("shapes agree");
        f.intersect(&pre).expect("same ambient")
    }

    /// `E_r^{p,q} ≅ Z_r^p / (Z_r^p ∩ (d Z_{r-1}^{p-r+1} + F^{p+1}))`.
    fn entry(&self, p: i64, q: i64, r: i64) -> PageEntry {
        let k = p + q;
        let z = self.z_r(k, p, r);
        let prev = self.z_r(k - 1, p - r + 1, r - 1);
        let d_prev = self.total_differential(k - 1);
        let den = prev
            .image(&d_prev)
            .expect("shapes agree")
            .sum(&self.f_step(k, p + 1))
            .expect("same ambient");
        let inner = z.intersect(&den).expect("same ambient");
        let quotient = z.quotient(&inner).expect("contained");
        PageEntry { z, quotient }
    }

    /// Pages `E_1 .. E_{r_max}` plus degeneration data (computed to the last
    /// page where a differential can be nonzero regardless of `r_max`).
    pub fn spectral_sequence(&self, r_max: usize) -> SpectralSequenceTable {
        let last = (self.bound as usize + 2).max(r_max.max(1));
        let mut pages = Vec::with_capacity(last);
        let mut differentials = Vec::with_capacity(last);
        let mut nonzero_by_degree: BTreeMap<i64, usize> = BTreeMap::new();
        let mut last_nonzero = 0;
        for r in 1..=last as i64 {
            let mut dims = BTreeMap::new();
            let mut entries = BTreeMap::new();
            for p in 0..=self.bound {
                for q in 0..=self.bound {
                    let e = self.entry(p, q, r);
                    if e.quotient.dim > 0 {
                        dims.insert((p, q), e.quotient.dim);
                    }
                    entries.insert((p, q), e);
                }
            }
            let mut maps = BTreeMap::new();
            for (&(p, q), e) in &entries {
                let target = (p + r, q - r + 1);
                let Some(t) = entries.get(&target) else { continue };
                if e.quotient.dim == 0 || t.quotient.dim == 0 {
                    continue;
                }
                let d = self.total_differential(p + q);
                let image = d.mul(&e.quotient.lift);
                debug_assert!((0..image.cols()).all(|c| t.z.contains_vector(&image.column(c))));
                let m = t.quotient.projection.mul(&image);
                if !m.is_zero() {
                    last_nonzero = r as usize;
                    for k in [p + q, p + q + 1] {
                        let e = nonzero_by_degree.entry(k).or_insert(0);
                        *e = (*e).max(r as usize);
                    }
                    maps.insert((p, q), m);
                }
            }
            pages.push(dims);
            differentials.push(maps);
        }
        let e_infinity = pages.last().cloned().unwrap_or_default();
        let degeneration_by_degree = (0..=self.max_degree())
            .map(|k| (k, nonzero_by_degree.get(&k).copied().unwrap_or(0) + 1))
            .collect();
        pages.truncate(r_max.max(last_nonzero + 1));
        differentials.truncate(pages.len());
        SpectralSequenceTable {
            pages,
            differentials,
            degeneration_page: last_nonzero + 1,
            degeneration_by_degree,
            e_infinity,
        }
    }

    /// `E_∞^{p,k-p} = gr_F^p H^k` for every `p`.
    pub fn check_convergence(&self, k: i64) -> bool {
        let table = self.spectral_sequence(1);
        self.check_convergence_with(&table, k)
    }

    pub fn check_convergence_with(&self, table: &SpectralSequenceTable, k: i64) -> bool {
        let f = self.hodge_filtration(k);
        (0..=self.bound).all(|p| {
            let gr = f.at(p).dim() - f.at(p + 1).dim();
            let e = table.e_infinity.get(&(p, k - p)).copied().unwrap_or(0);
            gr == e
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// a ∈ C^{0,1}, e ∈ C^{1,0}, b ∈ C^{1,1}, c ∈ C^{2,0}; ∂a = b, ∂̄e = b, ∂e = c.
    fn staircase() -> BigradedComplex {
        let dims = BTreeMap::from([((0, 1), 1), ((1, 0), 1), ((1, 1), 1), ((2, 0), 1)]);
        let one = Matrix::identity(1);
        let del = BTreeMap::from([((0, 1), one.clone()), ((1, 0), one.clone())]);
        let delbar = BTreeMap::from([((1, 0), one.clone())]);
        BigradedComplex::new(2, dims, del, delbar, None).unwrap()
    }

    #[test]
    fn rejects_non_anticommuting() {
        let dims = BTreeMap::from([((0, 0), 1), ((1, 0), 1), ((0, 1), 1), ((1, 1), 1)]);
        let one = Matrix::identity(1);
        let del = BTreeMap::from([((0, 0), one.clone()), ((0, 1), one.clone())]);
        let delbar = BTreeMap::from([((0, 0), one.clone()), ((1, 0), one.clone())]);
        assert!(matches!(
            BigradedComplex::new(1, dims, del, delbar, None),
            Err(Error::InvalidComplex(_))
        ));
    }

    #[test]
    fn staircase_is_acyclic_with_d2() {
        let x = staircase();
        assert_eq!(x.betti(), vec![0, 0, 0, 0, 0]);
        let ss = x.spectral_sequence(4);
        assert_eq!(ss.page(1).get(&(0, 1)), Some(&1));
        assert_eq!(ss.page(2), &BTreeMap::from([((0, 1), 1), ((2, 0), 1)]));
        assert!(ss.page(3).is_empty());
        assert_eq!(ss.degeneration_page, 3);
        assert!(ss.differentials[1].contains_key(&(0, 1)));
        assert!(x.check_convergence(1) && x.check_convergence(2));
    }

    #[test]
    fn theta_conjugates_the_differentials() {
        let x = staircase();
        for h in [Scalar::one(), Scalar::from(2), Scalar::i()] {
            assert!(x.theta_intertwine_check(&h));
        }
        assert_eq!(x.twisted_cohomology(&Scalar::zero(), 1).dim, 1);
        assert_eq!(x.twisted_cohomology(&Scalar::from(3), 1).dim, 0);
    }
}
