use std::collections::BTreeMap;

use crate::degree::{self, Degree, DegreeBox};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::multifilt::{FilteredMap, Filtration, MultiFilteredSpace, Splitting};
use crate::scalar::Scalar;
use crate::subspace::Subspace;

use super::module::GradedModule;

/// Window carrying all Rees data of `v`: `lo_i = -(last_i + 1)`, `hi_i = -first_i`.
pub fn rees_window(v: &MultiFilteredSpace) -> DegreeBox {
    let jb = v.jump_box();
    DegreeBox::new(jb.hi.iter().map(|h| -h - 1).collect(), jb.lo.iter().map(|l| -l).collect())
}

/// The Rees module of a multifiltered space together with its source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReesHandle {
    source: MultiFilteredSpace,
    module: GradedModule,
}

impl ReesHandle {
    pub fn source(&self) -> &MultiFilteredSpace {
        &self.source
    }

    pub fn module(&self) -> &GradedModule {
        &self.module
    }

    pub fn window(&self) -> &DegreeBox {
        self.module.window()
    }

    /// `F^{-m} V` as a subspace of `V`.
    pub fn piece_subspace(&self, m: &[i64]) -> Subspace {
        self.source.f_intersection(&degree::neg(m))
    }

    /// The same handle re-expressed on a larger window.
    pub fn with_window(&self, window: &DegreeBox) -> Result<ReesHandle> {
        if !window.covers(&rees_window(&self.source)) {
            return Err(Error::WindowInsufficient(format!(
                "{window:?} does not cover {:?}",
                rees_window(&self.source)
            )));
        }
        Ok(ReesHandle {
            source: self.source.clone(),
            module: rees_on(&self.source, window.clone()),
        })
    }
}

fn rees_on(v: &MultiFilteredSpace, window: DegreeBox) -> GradedModule {
    GradedModule::from_subspaces(window, |m| v.f_intersection(&degree::neg(m)))
        .expect("steps increase as degrees grow")
}

/// `Rs(V)`: degree `m` carries `F^{-m} V` and `z_i` acts by inclusion.
pub fn rees_module(v: &MultiFilteredSpace) -> ReesHandle {
    ReesHandle {
        source: v.clone(),
        module: rees_on(v, rees_window(v)),
    }
}

/// Rees handle of `V` with the filtrations in `dropped` forgotten, which is
/// what inverting the corresponding variables produces.
pub fn restrict_to_subtorus(v: &MultiFilteredSpace, dropped: &[usize]) -> Result<ReesHandle> {
    if dropped.iter().any(|&i| i >= v.n()) {
        return Err(Error::Shape(format!("filtration index out of range 0..{}", v.n())));
    }
    Ok(rees_module(&v.drop_filtrations(dropped)))
}

/// Equal to `is_splittable`; cross-checked against the fiber dimensions at
/// the origin and at `(1, ..., 1)`.
pub fn is_vector_bundle(v: &MultiFilteredSpace) -> Result<bool> {
    let split = v.is_splittable();
    let h = rees_module(v);
    let at_zero = h.module.fiber(&vec![Scalar::zero(); v.n()])?.dim;
    let generic = h.module.fiber(&vec![Scalar::one(); v.n()])?.dim;
    let constant = at_zero == generic && generic == v.dim();
    if split != constant {
        return Err(Error::Defect(format!(
            "splittability {split} disagrees with fiber dims {at_zero} (origin) vs {generic} (generic)"
        )));
    }
    Ok(split)
}

/// Degreewise data of `Rs(V) ≅ ⊕_p V^p ⊗ O(p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitIso {
    /// `(p, dim V^p)`; `O(p)` has its generator in degree `-p`.
    pub twists: Vec<(Degree, usize)>,
    /// Columns: the basis of `⊕_{p >= -m} V^p` in `F^{-m}` coordinates.
    pub matrices: BTreeMap<Degree, Matrix>,
}

/// Builds and verifies the isomorphism determined by a splitting.
pub fn split_iso(v: &MultiFilteredSpace, s: &Splitting) -> Result<SplitIso> {
    s.verify(v)?;
    let h = rees_module(v);
    let window = h.window().clone();
    let mut matrices = BTreeMap::new();
    for m in window.iter() {
        let target = h.piece_subspace(&m);
        let mut cols: Vec<Vec<Scalar>> = Vec::new();
        for (p, vp) in s.components() {
            if p.iter().zip(&m).all(|(pi, mi)| *pi >= -mi) {
                for b in vp.basis_vectors() {
                    let c = target.coords(&b).ok_or_else(|| {
                        Error::InvalidSplitting(format!("component {p:?} escapes the degree {m:?} piece"))
                    })?;
                    cols.push(c);
                }
            }
        }
        let mat = Matrix::from_columns(&cols, target.dim());
        if !mat.is_square() || mat.inverse().is_none() {
            return Err(Error::InvalidSplitting(format!("degree {m:?} map is not invertible")));
        }
        matrices.insert(m, mat);
    }
    let twists = s.components().iter().map(|(p, vp)| (p.clone(), vp.dim())).collect();
    let iso = SplitIso { twists, matrices };
    let model = line_bundle_sum(&iso.twists, &window);
    if !model.same_invariants(h.module()) {
        return Err(Error::Defect("split model and Rees module differ".into()));
    }
    Ok(iso)
}

/// `⊕ O(p)^{d_p}` on a window.
pub fn line_bundle_sum(twists: &[(Degree, usize)], window: &DegreeBox) -> GradedModule {
    let total: usize = twists.iter().map(|(_, d)| d).sum();
    let mut offsets = Vec::with_capacity(twists.len());
    let mut acc = 0;
    for (_, d) in twists {
        offsets.push(acc);
        acc += d;
    }
    GradedModule::from_subspaces(window.clone(), |m| {
        let idx = twists.iter().enumerate().filter(|(_, (p, _))| p.iter().zip(m).all(|(pi, mi)| *pi >= -mi));
        Subspace::coordinate(total, idx.flat_map(|(k, (_, d))| offsets[k]..offsets[k] + d))
    })
    .expect("coordinate pieces increase")
}

/// A degree-preserving map between graded modules, given on a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    pub window: DegreeBox,
    pub matrices: BTreeMap<Degree, Matrix>,
}

fn map_window(f: &FilteredMap) -> DegreeBox {
    rees_window(f.source()).union(&rees_window(f.target()))
}

/// `Rs(f)`: on degree `m`, the restriction `F_V^{-m} -> F_W^{-m}` in basis coordinates.
pub fn rees_map(f: &FilteredMap) -> GradedMap {
    let window = map_window(f);
    let mut matrices = BTreeMap::new();
    for m in window.iter() {
        let p = degree::neg(&m);
        let src = f.source().f_intersection(&p);
        let tgt = f.target().f_intersection(&p);
        let cols: Vec<Vec<Scalar>> = src
            .basis_vectors()
            .iter()
            .map(|b| tgt.coords(&f.matrix().apply(b)).expect("filtered map"))
            .collect();
        matrices.insert(m, Matrix::from_columns(&cols, tgt.dim()));
    }
    GradedMap { window, matrices }
}

/// `ker Rs(f)`, with degree `m` piece `F_V^{-m} ∩ ker f`.
pub fn rees_kernel(f: &FilteredMap) -> GradedModule {
    let k = Subspace::kernel(f.matrix());
    GradedModule::from_subspaces(map_window(f), |m| {
        f.source().f_intersection(&degree::neg(m)).intersect(&k).expect("same ambient")
    })
    .expect("steps increase")
}

/// Torsion of a graded module: piece dims and support codimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionReport {
    pub torsion_pieces: BTreeMap<Degree, usize>,
    pub support_codim: usize,
    pub is_zero: bool,
}

impl TorsionReport {
    pub fn of(module: &GradedModule) -> TorsionReport {
        let t = module.torsion();
        let torsion_pieces: BTreeMap<Degree, usize> =
            t.piece_dims().into_iter().filter(|(_, d)| *d > 0).collect();
        TorsionReport {
            is_zero: torsion_pieces.is_empty(),
            support_codim: t.support_codim(),
            torsion_pieces,
        }
    }
}

/// `coker Rs(f)` with its torsion and the target of `φ`.
#[derive(Clone, Debug)]
pub struct ReesCokernel {
    pub coker: GradedModule,
    pub torsion: TorsionReport,
    /// Pieces `π F_W^p` inside `coker f`.
    pub phi_target: GradedModule,
    /// `dim ker φ^p`, keyed by degree `m = -p`.
    pub phi_kernel_dims: BTreeMap<Degree, usize>,
    /// `Rs(coker f)` for the image filtrations `π F_{W,i}`.
    pub coker_rees: GradedModule,
    /// `π(∩_i F_{W,i}^{p_i}) = ∩_i π F_{W,i}^{p_i}` in every degree.
    pub image_filtrations_compatible: bool,
}

pub fn rees_cokernel(f: &FilteredMap) -> Result<ReesCokernel> {
    let window = map_window(f);
    let coker = GradedModule::from_quotients(
        window.clone(),
        |m| f.target().f_intersection(&degree::neg(m)),
        |m| f.image_of_step(&degree::neg(m)),
    )?;
    let (cok_space, pi) = f.cokernel_object()?;
    let coker_rees = rees_on(&cok_space, window.clone());
    let phi_target = GradedModule::from_subspaces(window.clone(), |m| {
        f.target().f_intersection(&degree::neg(m)).image(&pi).expect("shapes agree")
    })?;
    let im = f.image();
    let mut phi_kernel_dims = BTreeMap::new();
    for m in window.iter() {
        let p = degree::neg(&m);
        let num = f.target().f_intersection(&p);
        // ker φ^p = (F_W^p ∩ im f) / f(F_V^p)
        let k = num.intersect(&im)?.dim() - f.image_of_step(&p).dim();
        if k > 0 {
            phi_kernel_dims.insert(m.clone(), k);
        }
        if num.dim() - k - f.image_of_step(&p).dim() != phi_target.dim(&m) {
            return Err(Error::Defect(format!("φ is not exact in degree {m:?}")));
        }
    }
    let image_filtrations_compatible = window.iter().all(|m| phi_target.dim(&m) == coker_rees.dim(&m));
    let torsion = TorsionReport::of(&coker);
    if torsion.torsion_pieces != phi_kernel_dims {
        return Err(Error::Defect("torsion of the cokernel differs from ker φ".into()));
    }
    Ok(ReesCokernel {
        coker,
        torsion,
        phi_target,
        phi_kernel_dims,
        coker_rees,
        image_filtrations_compatible,
    })
}

/// Degree-0 piece: the invariant sections.
pub fn invariant_sections(module: &GradedModule) -> usize {
    module.dim(&vec![0; module.n()])
}

/// Inverse of the Rees construction: `V` is the corner piece and `F_i^p` is
/// the image of the piece at `-p e_i + (hi off axis i)`.
pub fn recover_multifiltration(module: &GradedModule) -> Result<MultiFilteredSpace> {
    module.require_torsion_free()?;
    let w = module.window();
    let dim = module.corner_dim();
    let mut filtrations = Vec::with_capacity(module.n());
    for i in 0..module.n() {
        let lo = -w.hi[i];
        let values: Vec<Subspace> = (lo..=-w.lo[i])
            .map(|p| {
                let mut m = w.hi.clone();
                m[i] = -p;
                Subspace::column_space(&module.to_corner(&m))
            })
            .collect();
        let mut steps = vec![(lo - 1, Subspace::full(dim))];
        steps.extend(values.into_iter().enumerate().map(|(k, s)| (lo + k as i64, s)));
        steps.push((-w.lo[i] + 1, Subspace::zero(dim)));
        filtrations.push(Filtration::new(dim, steps).map_err(|e| {
            Error::InvalidModule(format!("recovered filtration {} is invalid: {e}", i + 1))
        })?);
    }
    let v = MultiFilteredSpace::new(dim, filtrations)?;
    let images = module.corner_images();
    for (m, s) in &images {
        if v.f_intersection(&degree::neg(m)) != *s {
            return Err(Error::InvalidModule(format!(
                "module is not a Rees module: piece {m:?} is not the intersection of its axis images"
            )));
        }
    }
    Ok(v)
}

/// Piece dims of `Rs(V) ⊗ Rs(W)` computed from splittings of both factors.
pub fn graded_tensor_dims(
    v: &MultiFilteredSpace,
    w: &MultiFilteredSpace,
    window: &DegreeBox,
) -> Result<BTreeMap<Degree, usize>> {
    let (sv, sw) = (v.compute_splitting()?, w.compute_splitting()?);
    let mut twists = Vec::new();
    for (p, a) in sv.components() {
        for (q, b) in sw.components() {
            twists.push((degree::add(p, q), a.dim() * b.dim()));
        }
    }
    Ok(line_bundle_sum(&twists, window).piece_dims())
}
