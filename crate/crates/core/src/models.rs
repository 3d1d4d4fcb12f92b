//! Built-in double complexes and seeded random generators.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{Bidegree, BigradedComplex};
use crate::connection::{EquivariantConnection, MatPoly};
use crate::degree::{Degree, DegreeBox};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::multifilt::{FilteredMap, Filtration, MultiFilteredSpace};
use crate::scalar::Scalar;
use crate::subspace::Subspace;

/// Seed for randomized suites: `RLAB_SEED` if set, else 0.
pub fn base_seed() -> u64 {
    std::env::var("RLAB_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// exterior algebras

type Form = BTreeMap<u32, Scalar>;

/// `a ∧ b` for monomials given as bitmasks, with the reordering sign.
fn wedge_monomials(a: u32, b: u32) -> Option<(bool, u32)> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0;
    let mut rest = b;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        swaps += (a >> (bit + 1)).count_ones();
        rest &= rest - 1;
    }
    Some((swaps % 2 == 1, a | b))
}

fn wedge(x: &Form, y: &Form) -> Form {
    let mut out = Form::new();
    for (a, s) in x {
        for (b, t) in y {
            if let Some((neg, m)) = wedge_monomials(*a, *b) {
                let c = if neg { -(s * t) } else { s * t };
                let e = out.entry(m).or_insert_with(Scalar::zero);
                *e += &c;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Left-invariant forms on a nilpotent Lie group with `g` holomorphic
/// generators `ω^1..ω^g` (bits `0..g`) and their conjugates (bits `g..2g`).
#[derive(Clone, Debug)]
pub struct ExteriorModel {
    g: usize,
    /// `d` of each generator as a 2-form.
    d_gen: Vec<Form>,
}

impl ExteriorModel {
    pub fn new(g: usize) -> Self {
        ExteriorModel {
            g,
            d_gen: vec![Form::new(); 2 * g],
        }
    }

    fn gen(i: usize) -> u32 {
        1 << i
    }

    /// Sets `d ω^j` to `Σ c · ω^a ∧ ω^b` over holomorphic indices (0-based)
    /// and `d ω̄^j` to the conjugate expression.
    pub fn holomorphic_relation(mut self, j: usize, terms: &[(i64, usize, usize)]) -> Self {
        let mut f = Form::new();
        let mut fbar = Form::new();
        for &(c, a, b) in terms {
            let c = Scalar::from(c);
            let one = |m| Form::from([(m, Scalar::one())]);
            let w = wedge(&one(Self::gen(a)), &one(Self::gen(b)));
            let wbar = wedge(&one(Self::gen(a + self.g)), &one(Self::gen(b + self.g)));
            for (m, s) in w {
                *f.entry(m).or_insert_with(Scalar::zero) += &(&c * &s);
            }
            for (m, s) in wbar {
                *fbar.entry(m).or_insert_with(Scalar::zero) += &(&c.conj() * &s);
            }
        }
        self.d_gen[j] = f;
        self.d_gen[j + self.g] = fbar;
        self
    }

    fn bidegree(&self, m: u32) -> Bidegree {
        let holo = m & ((1u32 << self.g) - 1);
        let anti = m >> self.g;
        (holo.count_ones() as i64, anti.count_ones() as i64)
    }

    /// `d` of a monomial by the Leibniz rule.
    fn d_monomial(&self, m: u32) -> Form {
        let mut out = Form::new();
        let mut prefix = 0u32;
        let mut sign_neg = false;
        for i in 0..(2 * self.g) {
            let bit = Self::gen(i);
            if m & bit == 0 {
                continue;
            }
            let suffix = m & !((bit << 1) - 1);
            let pre = Form::from([(prefix, if sign_neg { -Scalar::one() } else { Scalar::one() })]);
            let term = wedge(&wedge(&pre, &self.d_gen[i]), &Form::from([(suffix, Scalar::one())]));
            for (k, c) in term {
                *out.entry(k).or_insert_with(Scalar::zero) += &c;
            }
            prefix |= bit;
            sign_neg = !sign_neg;
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    fn conj_monomial(&self, m: u32) -> (bool, u32) {
        let mut acc: Form = Form::from([(0u32, Scalar::one())]);
        for i in 0..(2 * self.g) {
            if m & Self::gen(i) != 0 {
                let j = if i < self.g { i + self.g } else { i - self.g };
                acc = wedge(&acc, &Form::from([(Self::gen(j), Scalar::one())]));
            }
        }
        let (k, c) = acc.into_iter().next().expect("monomial");
        (c != Scalar::one(), k)
    }

    /// The double complex of all forms, with `σ` = conjugation.
    pub fn build(&self) -> Result<BigradedComplex> {
        let g = self.g as i64;
        let mut basis: BTreeMap<Bidegree, Vec<u32>> = BTreeMap::new();
        for m in 0u32..(1u32 << (2 * self.g)) {
            basis.entry(self.bidegree(m)).or_default().push(m);
        }
        let index = |pq: &Bidegree, m: u32| basis[pq].iter().position(|&x| x == m).expect("basis monomial");
        let dims: BTreeMap<Bidegree, usize> = basis.iter().map(|(k, v)| (*k, v.len())).collect();
        let mut del = BTreeMap::new();
        let mut delbar = BTreeMap::new();
        let mut sigma = BTreeMap::new();
        for (&(p, q), ms) in &basis {
            let dp = basis.get(&(p + 1, q)).map_or(0, Vec::len);
            let dq = basis.get(&(p, q + 1)).map_or(0, Vec::len);
            let mut a = Matrix::zeros(dp, ms.len());
            let mut b = Matrix::zeros(dq, ms.len());
            let mut s = Matrix::zeros(ms.len(), ms.len());
            for (c, &m) in ms.iter().enumerate() {
                for (k, coef) in self.d_monomial(m) {
                    match self.bidegree(k) {
                        t if t == (p + 1, q) => a[(index(&t, k), c)] = coef,
                        t if t == (p, q + 1) => b[(index(&t, k), c)] = coef,
                        t => {
                            return Err(Error::InvalidComplex(format!(
                                "d of a ({p},{q}) form has a component in bidegree {t:?}"
                            )))
                        }
                    }
                }
                let (neg, k) = self.conj_monomial(m);
                s[(index(&(q, p), k), c)] = if neg { -Scalar::one() } else { Scalar::one() };
            }
            del.insert((p, q), a);
            delbar.insert((p, q), b);
            sigma.insert((p, q), s);
        }
        BigradedComplex::new(g, dims, del, delbar, Some(sigma))
    }
}

/// Exterior algebra on `g` holomorphic and `g` antiholomorphic generators with `d = 0`.
pub fn torus(g: usize) -> Result<BigradedComplex> {
    if g == 0 {
        return Err(Error::UnknownModel("torus needs g >= 1".into()));
    }
    ExteriorModel::new(g).build()
}

/// `∂ω³ = -ω¹∧ω²`, `∂̄ω̄³ = -ω̄¹∧ω̄²`, all other generator differentials zero.
pub fn iwasawa() -> Result<BigradedComplex> {
    ExteriorModel::new(3).holomorphic_relation(2, &[(-1, 0, 1)]).build()
}

/// `a ∈ C^{0,1}, e ∈ C^{1,0}, b ∈ C^{1,1}, c ∈ C^{2,0}` with `∂a = b`,
/// `∂̄e = b`, `∂e = c`.
pub fn synthetic_d2() -> Result<BigradedComplex> {
    let dims = BTreeMap::from([((0, 1), 1), ((1, 0), 1), ((1, 1), 1), ((2, 0), 1)]);
    let one = Matrix::identity(1);
    let del = BTreeMap::from([((0, 1), one.clone()), ((1, 0), one.clone())]);
    let delbar = BTreeMap::from([((1, 0), one)]);
    BigradedComplex::new(2, dims, del, delbar, None)
}

// ---------------------------------------------------------------------------
// registry

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelDescriptor {
    pub name: String,
    pub parameters: BTreeMap<String, i64>,
    pub provenance_note: String,
}

impl ModelDescriptor {
    /// Parses `name` or `name:key=value,key=value`.
    pub fn parse(s: &str) -> Result<ModelDescriptor> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let name = name.trim().replace('_', "-");
        let mut parameters = BTreeMap::new();
        for kv in rest.split(',').filter(|t| !t.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::UnknownModel(format!("{s}: parameter {kv:?} is not key=value")))?;
            let v: i64 = v
                .trim()
                .parse()
                .map_err(|_| Error::UnknownModel(format!("{s}: parameter {k} is not an integer")))?;
            parameters.insert(k.trim().to_string(), v);
        }
        let template = builtin_descriptors()
            .into_iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::UnknownModel(s.to_string()))?;
        for k in parameters.keys() {
            if !template.parameters.contains_key(k) {
                return Err(Error::UnknownModel(format!("{s}: unknown parameter {k}")));
            }
        }
        let mut merged = template.parameters.clone();
        merged.extend(parameters);
        Ok(ModelDescriptor {
            name,
            parameters: merged,
            provenance_note: template.provenance_note,
        })
    }

    pub fn label(&self) -> String {
        if self.parameters.is_empty() {
            self.name.clone()
        } else {
            let ps: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{}:{}", self.name, ps.join(","))
        }
    }

    pub fn instantiate(&self) -> Result<BigradedComplex> {
        match self.name.as_str() {
            "torus" => {
                let g = self.parameters.get("g").copied().unwrap_or(1);
                if !(1..=3).contains(&g) {
                    return Err(Error::UnknownModel(format!("torus:g={g} (supported: 1..=3)")));
                }
                torus(g as usize)
            }
            "iwasawa" => iwasawa(),
            "synthetic-d2" => synthetic_d2(),
            _ => Err(Error::UnknownModel(self.name.clone())),
        }
    }
}

pub fn builtin_descriptors() -> Vec<ModelDescriptor> {
    vec![
        ModelDescriptor {
            name: "torus".into(),
            parameters: BTreeMap::from([("g".into(), 1)]),
            provenance_note: "exterior algebra on g holomorphic and g antiholomorphic generators, all differentials zero"
                .into(),
        },
        ModelDescriptor {
            name: "iwasawa".into(),
            parameters: BTreeMap::new(),
            provenance_note: "invariant forms on the complex Heisenberg group: del w3 = -w1^w2, delbar of its conjugate likewise"
                .into(),
        },
        ModelDescriptor {
            name: "synthetic-d2".into(),
            parameters: BTreeMap::new(),
            provenance_note: "four-dimensional acyclic complex with a nonzero second differential".into(),
        },
    ]
}

pub fn model(s: &str) -> Result<BigradedComplex> {
    ModelDescriptor::parse(s)?.instantiate()
}

// ---------------------------------------------------------------------------
// random generators

fn small_scalar(rng: &mut impl Rng) -> Scalar {
    if rng.gen_ratio(1, 8) {
        Scalar::gaussian(rng.gen_range(-1..=1), rng.gen_range(-1..=1))
    } else {
        Scalar::from(rng.gen_range(-2..=2))
    }
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| small_scalar(rng))
}

pub fn random_invertible(rng: &mut impl Rng, n: usize) -> Matrix {
    loop {
        let m = random_matrix(rng, n, n);
        if m.inverse().is_some() {
            return m;
        }
    }
}

/// Matrix of rank at most `rank`.
pub fn random_low_rank(rng: &mut impl Rng, rows: usize, cols: usize, rank: usize) -> Matrix {
    random_matrix(rng, rows, rank).mul(&random_matrix(rng, rank, cols))
}

/// A filtration from a random basis with random weights in `range`. Bases
/// are drawn either generically or from coordinate vectors to produce
/// coincidences between filtrations.
pub fn random_filtration(rng: &mut impl Rng, dim: usize, range: (i64, i64)) -> Filtration {
    if dim == 0 {
        return Filtration::new(0, vec![]).expect("zero space");
    }
    let basis = if rng.gen_bool(0.3) {
        let mut idx: Vec<usize> = (0..dim).collect();
        idx.shuffle(rng);
        Matrix::identity(dim).select_rows(&idx)
    } else {
        random_invertible(rng, dim)
    };
    let weighted: Vec<(Vec<Scalar>, i64)> = basis
        .row_vectors()
        .into_iter()
        .map(|v| (v, rng.gen_range(range.0..=range.1)))
        .collect();
    Filtration::from_weighted_basis(dim, &weighted).expect("basis spans")
}

pub fn random_multifiltration(seed: u64, n: usize, dim: usize, range: (i64, i64)) -> MultiFilteredSpace {
    let mut r = rng(seed);
    random_multifiltration_with(&mut r, n, dim, range)
}

pub fn random_multifiltration_with(rng: &mut impl Rng, n: usize, dim: usize, range: (i64, i64)) -> MultiFilteredSpace {
    let fs = (0..n).map(|_| random_filtration(rng, dim, range)).collect();
    MultiFilteredSpace::new(dim, fs).expect("shared ambient")
}

/// `f: V -> W` with `G_i^p = f(F_i^p) + R_i^p`; `R` is either a random
/// filtration or one supported on a complement of `im f`.
pub fn random_filtered_map(seed: u64, n: usize, max_dim: usize, range: (i64, i64)) -> FilteredMap {
    let mut r = rng(seed);
    random_filtered_map_with(&mut r, n, max_dim, range)
}

pub fn random_filtered_map_with(rng: &mut impl Rng, n: usize, max_dim: usize, range: (i64, i64)) -> FilteredMap {
    let dv = rng.gen_range(1..=max_dim);
    let dw = rng.gen_range(1..=max_dim);
    let v = random_multifiltration_with(rng, n, dv, range);
    let rank = rng.gen_range(0..=dv.min(dw));
    let m = random_low_rank(rng, dw, dv, rank);
    let im = Subspace::column_space(&m);
    let complement = Subspace::full(dw).complement_of(&im).expect("contained");
    let lo = range.0 - 1;
    let hi = range.1 + 1;
    let mut gs = Vec::with_capacity(n);
    for i in 0..n {
        let extra: Vec<Subspace> = if rng.gen_bool(0.5) {
            let rf = random_filtration(rng, dw, range);
            (lo..=hi).map(|p| rf.at(p)).collect()
        } else {
            let ws: Vec<i64> = complement.iter().map(|_| rng.gen_range(range.0..=range.1)).collect();
            (lo..=hi)
                .map(|p| {
                    let vs: Vec<Vec<Scalar>> =
                        complement.iter().zip(&ws).filter(|(_, w)| **w >= p).map(|(c, _)| c.clone()).collect();
                    let shift = if p <= range.0 - 1 { Subspace::full(dw) } else { Subspace::span(dw, &vs) };
                    shift
                })
                .collect()
        };
        let values: Vec<Subspace> = (lo..=hi)
            .zip(extra)
            .map(|(p, e)| v.filtration(i).at(p).image(&m).expect("shape").sum(&e).expect("ambient"))
            .collect();
        gs.push(Filtration::from_values(dw, lo, values).expect("descending and exhaustive"));
    }
    let w = MultiFilteredSpace::new(dw, gs).expect("shared ambient");
    FilteredMap::new(v, w, m).expect("compatible by construction")
}

/// `V = k^2` with two distinct lines at index 1, mapped onto `k` with both
/// target jumps at 1: strict for each filtration, not 2-strict.
pub fn two_lines_to_point() -> FilteredMap {
    let line = |v: [i64; 2]| Subspace::span(2, &[v.iter().map(|&x| Scalar::from(x)).collect()]);
    let flag = |l| Filtration::new(2, vec![(0, Subspace::full(2)), (1, l)]).expect("flag");
    let v = MultiFilteredSpace::new(2, vec![flag(line([1, 0])), flag(line([0, 1]))]).expect("space");
    let w = MultiFilteredSpace::line(&[1, 1]);
    FilteredMap::new(v, w, Matrix::from_ints(&[&[1, 1]])).expect("filtered")
}

/// `V = k^2` with three distinct lines at index 1.
pub fn three_lines() -> MultiFilteredSpace {
    let ls = [[1, 0], [0, 1], [1, 1]];
    let fs = ls
        .iter()
        .map(|v| {
            let l = Subspace::span(2, &[v.iter().map(|&x| Scalar::from(x)).collect()]);
            Filtration::new(2, vec![(0, Subspace::full(2)), (1, l)]).expect("flag")
        })
        .collect();
    MultiFilteredSpace::new(2, fs).expect("space")
}

/// Direct sum of zigzags and squares in `[0, bound]^2`, conjugated by a
/// random change of basis in every bidegree.
pub fn random_complex(seed: u64, bound: i64, pieces: usize) -> BigradedComplex {
    let mut r = rng(seed);
    random_complex_with(&mut r, bound, pieces)
}

pub fn random_complex_with(rng: &mut impl Rng, bound: i64, pieces: usize) -> BigradedComplex {
    // (bidegree) per basis element, plus (target, source, sign, is_del) entries
    let mut elems: Vec<Bidegree> = Vec::new();
    let mut arrows: Vec<(usize, usize, i64, bool)> = Vec::new();
    let inside = |(p, q): Bidegree| (0..=bound).contains(&p) && (0..=bound).contains(&q);
    for _ in 0..pieces {
        let p = rng.gen_range(0..=bound);
        let q = rng.gen_range(0..=bound);
        if rng.gen_bool(0.25) && inside((p + 1, q + 1)) {
            let x = elems.len();
            elems.extend([(p, q), (p + 1, q), (p, q + 1), (p + 1, q + 1)]);
            arrows.extend([(x + 1, x, 1, true), (x + 2, x, 1, false), (x + 3, x + 1, 1, false), (x + 3, x + 2, -1, true)]);
            continue;
        }
        // w_a ∈ (p+a, q-a), u_a ∈ (p+a, q-a+1); ∂̄w_a = u_a, ∂w_a = u_{a+1}
        let len = rng.gen_range(0..=2i64);
        let first_u = rng.gen_bool(0.5);
        let last_u = rng.gen_bool(0.5);
        if len == 0 {
            if inside((p, q)) {
                elems.push((p, q));
            }
            continue;
        }
        let ok = (0..len).all(|a| inside((p + a, q - a)))
            && (!first_u || inside((p, q + 1)))
            && (!last_u || inside((p + len, q - len + 1)))
            && (1..len).all(|a| inside((p + a, q - a + 1)));
        if !ok {
            continue;
        }
        let mut us = BTreeMap::new();
        for a in 0..=len {
            let wanted = (a > 0 && a < len) || (a == 0 && first_u) || (a == len && last_u);
            if wanted {
                us.insert(a, elems.len());
                elems.push((p + a, q - a + 1));
            }
        }
        for a in 0..len {
            let w = elems.len();
            elems.push((p + a, q - a));
            if let Some(&u) = us.get(&a) {
                arrows.push((u, w, 1, false));
            }
            if let Some(&u) = us.get(&(a + 1)) {
                arrows.push((u, w, 1, true));
            }
        }
    }
    let mut basis: BTreeMap<Bidegree, Vec<usize>> = BTreeMap::new();
    for (k, pq) in elems.iter().enumerate() {
        basis.entry(*pq).or_default().push(k);
    }
    let pos = |k: usize| basis[&elems[k]].iter().position(|&x| x == k).expect("element");
    let dims: BTreeMap<Bidegree, usize> = basis.iter().map(|(k, v)| (*k, v.len())).collect();
    let dim = |pq: Bidegree| dims.get(&pq).copied().unwrap_or(0);
    let mut del: BTreeMap<Bidegree, Matrix> = BTreeMap::new();
    let mut delbar: BTreeMap<Bidegree, Matrix> = BTreeMap::new();
    for &pq in dims.keys() {
        del.insert(pq, Matrix::zeros(dim((pq.0 + 1, pq.1)), dim(pq)));
        delbar.insert(pq, Matrix::zeros(dim((pq.0, pq.1 + 1)), dim(pq)));
    }
    for &(t, s, sign, is_del) in &arrows {
        let map = if is_del { del.get_mut(&elems[s]) } else { delbar.get_mut(&elems[s]) }.expect("source term");
        map[(pos(t), pos(s))] = Scalar::from(sign);
    }
    let change: BTreeMap<Bidegree, (Matrix, Matrix)> = dims
        .iter()
        .map(|(&pq, &d)| {
            let b = random_invertible(rng, d);
            let inv = b.inverse().expect("invertible");
            (pq, (b, inv))
        })
        .collect();
    let conj = |maps: BTreeMap<Bidegree, Matrix>, step: Bidegree| -> BTreeMap<Bidegree, Matrix> {
        maps.into_iter()
            .map(|(pq, m)| {
                let t = (pq.0 + step.0, pq.1 + step.1);
                let m = match change.get(&t) {
                    Some((b, _)) => b.mul(&m),
                    None => m,
                };
                (pq, m.mul(&change[&pq].1))
            })
            .collect()
    };
    let del = conj(del, (1, 0));
    let delbar = conj(delbar, (0, 1));
    BigradedComplex::new(bound, dims, del, delbar, None).expect("zigzags and squares are complexes")
}

/// A well-formed connection `h^{-1} dh` for a random graded gauge `h`, and `h`.
pub fn random_flat_connection(rng: &mut impl Rng, n: usize, dim: usize, spread: i64) -> (EquivariantConnection, MatPoly) {
    let grading: Vec<Degree> = (0..dim).map(|_| (0..n).map(|_| rng.gen_range(0..=spread)).collect()).collect();
    let h = random_graded_gauge(rng, &grading, n);
    let conn = EquivariantConnection::gauge_of_trivial(n, grading, &h).expect("graded gauge");
    (conn, h)
}

/// `h = h_0 (Id + N)` with `h_0` a graded automorphism and `N` supported in positive degrees.
pub fn random_graded_gauge(rng: &mut impl Rng, grading: &[Degree], n: usize) -> MatPoly {
    let dim = grading.len();
    let mut h0 = Matrix::zeros(dim, dim);
    let mut by_degree: BTreeMap<&Degree, Vec<usize>> = BTreeMap::new();
    for (k, w) in grading.iter().enumerate() {
        by_degree.entry(w).or_default().push(k);
    }
    for idx in by_degree.values() {
        let b = random_invertible(rng, idx.len());
        for (a, &r) in idx.iter().enumerate() {
            for (c, &s) in idx.iter().enumerate() {
                h0[(r, s)] = b[(a, c)].clone();
            }
        }
    }
    let mut terms: BTreeMap<Degree, Matrix> = BTreeMap::new();
    for r in 0..dim {
        for c in 0..dim {
            let p: Degree = (0..n).map(|k| grading[c][k] - grading[r][k]).collect();
            if p.iter().all(|&x| x >= 0) && p.iter().any(|&x| x > 0) && rng.gen_bool(0.7) {
                let m = terms.entry(p).or_insert_with(|| Matrix::zeros(dim, dim));
                m[(r, c)] = small_scalar(rng);
            }
        }
    }
    let mut nil = MatPoly::identity(n, dim);
    nil = nil.add(&MatPoly::from_terms(n, dim, terms).expect("nonnegative exponents"));
    MatPoly::constant(n, h0).mul(&nil)
}

/// Adds one random well-formed coefficient `A_{p,i}` to `conn`.
pub fn random_perturbation(rng: &mut impl Rng, conn: &EquivariantConnection) -> EquivariantConnection {
    let n = conn.n();
    let dim = conn.dim();
    let g = conn.grading();
    let mut candidates = Vec::new();
    for r in 0..dim {
        for c in 0..dim {
            let p: Degree = (0..n).map(|k| g[c][k] - g[r][k]).collect();
            if p.iter().all(|&x| x >= 0) {
                for i in 0..n {
                    if p[i] > 0 {
                        candidates.push((p.clone(), i, r, c));
                    }
                }
            }
        }
    }
    let mut coeffs: Vec<((Degree, usize), Matrix)> = conn.coeffs().iter().map(|(k, m)| (k.clone(), m.clone())).collect();
    if let Some((p, i, r, c)) = candidates.choose(rng).cloned() {
        let mut m = Matrix::zeros(dim, dim);
        let mut s = small_scalar(rng);
        if s.is_zero() {
            s = Scalar::one();
        }
        m[(r, c)] = s;
        coeffs.push(((p, i), m));
    }
    EquivariantConnection::new(n, g.to_vec(), coeffs).expect("same shape")
}

/// Box of exponents `[0, spread]^n`.
pub fn exponent_box(n: usize, spread: i64) -> DegreeBox {
    DegreeBox::cube(n, 0, spread)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_signs() {
        assert_eq!(wedge_monomials(0b01, 0b10), Some((false, 0b11)));
        assert_eq!(wedge_monomials(0b10, 0b01), Some((true, 0b11)));
        assert_eq!(wedge_monomials(0b11, 0b01), None);
    }

    #[test]
    fn torus_dims() {
        let t = torus(1).unwrap();
        assert_eq!((0..=2).map(|k| t.total_dim(k)).sum::<usize>(), 4);
        assert_eq!(t.betti(), vec![1, 2, 1]);
        assert_eq!(torus(2).unwrap().betti()[1], 4);
    }

    #[test]
    fn iwasawa_has_sixty_four_forms() {
        let x = iwasawa().unwrap();
        assert_eq!((0..=6).map(|k| x.total_dim(k)).sum::<usize>(), 64);
        assert!(x.has_real_structure());
        assert_eq!(x.total_cohomology(1).dim, 4);
    }

    #[test]
    fn descriptors() {
        assert_eq!(ModelDescriptor::parse("torus:g=2").unwrap().label(), "torus:g=2");
        assert_eq!(ModelDescriptor::parse("synthetic_d2").unwrap().name, "synthetic-d2");
        assert!(matches!(ModelDescriptor::parse("hopf"), Err(Error::UnknownModel(_))));
        assert!(matches!(ModelDescriptor::parse("torus:h=1"), Err(Error::UnknownModel(_))));
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(random_multifiltration(7, 3, 4, (-2, 2)), random_multifiltration(7, 3, 4, (-2, 2)));
        assert_eq!(random_complex(3, 3, 5), random_complex(3, 3, 5));
        let f = random_filtered_map(11, 2, 4, (-1, 1));
        assert_eq!(f, random_filtered_map(11, 2, 4, (-1, 1)));
    }
}
