//! Versioned JSON documents with a `kind` discriminator. Scalars are strings
//! in the literal syntax of [`Scalar`]; JSON floats are rejected.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::complex::{Bidegree, BigradedComplex};
use crate::connection::EquivariantConnection;
use crate::degree::{Degree, DegreeBox};
use crate::error::{Error, Result};
use crate::graded::GradedModule;
use crate::matrix::Matrix;
use crate::multifilt::{FilteredMap, Filtration, MultiFilteredSpace};
use crate::scalar::Scalar;
use crate::subspace::Subspace;

pub const SCHEMA_VERSION: u32 = 1;

/// JSON Schema covering every document kind.
pub const SCHEMA: &str = include_str!("../schema/rlab.schema.json");

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Multifiltration(MultiFilteredSpace),
    FilteredMap(FilteredMap),
    BigradedComplex(BigradedComplex),
    Connection(EquivariantConnection),
    GradedModule(GradedModule),
    Report(Report),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Multifiltration(_) => "multifiltration",
            Document::FilteredMap(_) => "filtered_map",
            Document::BigradedComplex(_) => "bigraded_complex",
            Document::Connection(_) => "connection",
            Document::GradedModule(_) => "graded_module_dump",
            Document::Report(_) => "report",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Scalar>>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &Matrix) -> Self {
        MatrixDoc {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.row_vectors(),
        }
    }

    fn to_matrix(&self, at: &str) -> Result<Matrix> {
        if self.entries.len() != self.rows {
            return Err(Error::Parse(format!("{at}: {} rows listed, header says {}", self.entries.len(), self.rows)));
        }
        if let Some((r, row)) = self.entries.iter().enumerate().find(|(_, row)| row.len() != self.cols) {
            return Err(Error::Parse(format!("{at}.entries[{r}]: {} entries, header says {}", row.len(), self.cols)));
        }
        Ok(Matrix::from_rows(self.entries.clone(), self.cols))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    pub index: i64,
    /// Spanning vectors of `F^index`.
    pub span: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationDoc {
    pub steps: Vec<StepDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub dim: usize,
    pub filtrations: Vec<FiltrationDoc>,
}

impl SpaceDoc {
    pub fn from_space(v: &MultiFilteredSpace) -> Self {
        SpaceDoc {
            dim: v.dim(),
            filtrations: v
                .filtrations()
                .iter()
                .map(|f| FiltrationDoc {
                    steps: f
                        .jumps()
                        .iter()
                        .map(|(p, s)| StepDoc {
                            index: *p,
                            span: s.basis_vectors(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    fn to_space(&self, at: &str) -> Result<MultiFilteredSpace> {
        let mut fs = Vec::with_capacity(self.filtrations.len());
        for (i, f) in self.filtrations.iter().enumerate() {
            let here = format!("{at}filtrations[{i}]");
            let mut steps = Vec::with_capacity(f.steps.len());
            for (j, s) in f.steps.iter().enumerate() {
                if let Some((v, row)) = s.span.iter().enumerate().find(|(_, row)| row.len() != self.dim) {
                    return Err(Error::Parse(format!(
                        "{here}.steps[{j}].span[{v}]: vector has {} entries, dim is {}",
                        row.len(),
                        self.dim
                    )));
                }
                steps.push((s.index, Subspace::span(self.dim, &s.span)));
            }
            let f = Filtration::new(self.dim, steps).map_err(|e| match e {
                Error::InvalidFiltration(msg) => Error::InvalidFiltration(format!("{here}: {msg}")),
                other => other,
            })?;
            fs.push(f);
        }
        MultiFilteredSpace::new(self.dim, fs)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultifiltrationFile {
    schema_version: u32,
    kind: String,
    dim: usize,
    filtrations: Vec<FiltrationDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilteredMapFile {
    schema_version: u32,
    kind: String,
    source: SpaceDoc,
    target: SpaceDoc,
    matrix: MatrixDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDoc {
    pub p: i64,
    pub q: i64,
    pub matrix: MatrixDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimDoc {
    pub p: i64,
    pub q: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexFile {
    schema_version: u32,
    kind: String,
    bound: i64,
    dims: Vec<DimDoc>,
    del: Vec<BlockDoc>,
    delbar: Vec<BlockDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<Vec<BlockDoc>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientDoc {
    pub degree: Degree,
    /// 1-based variable index.
    pub variable: usize,
    pub matrix: MatrixDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectionFile {
    schema_version: u32,
    kind: String,
    n: usize,
    grading: Vec<Degree>,
    coefficients: Vec<CoefficientDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowDoc {
    pub lo: Degree,
    pub hi: Degree,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    pub degree: Degree,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultDoc {
    pub variable: usize,
    pub degree: Degree,
    pub matrix: MatrixDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleFile {
    schema_version: u32,
    kind: String,
    window: WindowDoc,
    pieces: Vec<PieceDoc>,
    multiplication: Vec<MultDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Rejected,
    Error,
}

/// Result envelope of a command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub kind: String,
    pub command: String,
    pub input: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub result: serde_json::Value,
}

impl Report {
    pub fn ok(command: &str, input: &str, result: serde_json::Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            kind: "report".into(),
            command: command.into(),
            input: input.into(),
            status: Status::Ok,
            message: None,
            result,
        }
    }

    pub fn failed(command: &str, input: &str, err: &Error, result: serde_json::Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            kind: "report".into(),
            command: command.into(),
            input: input.into(),
            status: if err.is_rejection() { Status::Rejected } else { Status::Error },
            message: Some(err.to_string()),
            result,
        }
    }
}

#[derive(Deserialize)]
struct Envelope {
    schema_version: serde_json::Value,
    kind: serde_json::Value,
}

fn typed<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let text = inner.to_string();
        let msg = text.rfind(" at line ").map_or(text.as_str(), |i| &text[..i]);
        let at = if path == "?" { String::new() } else { format!("at {path} ") };
        Error::Parse(format!("{at}(line {}, column {}): {msg}", inner.line(), inner.column()))
    })
}

fn complex_map(blocks: &[BlockDoc], name: &str) -> Result<BTreeMap<Bidegree, Matrix>> {
    let mut out = BTreeMap::new();
    for (i, b) in blocks.iter().enumerate() {
        let at = format!("{name}[{i}].matrix");
        if out.insert((b.p, b.q), b.matrix.to_matrix(&at)?).is_some() {
            return Err(Error::Parse(format!("{name}[{i}]: bidegree ({}, {}) listed twice", b.p, b.q)));
        }
    }
    Ok(out)
}

pub fn parse_document(text: &str) -> Result<Document> {
    let env: Envelope = typed(text)?;
    match env.schema_version.as_u64() {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        _ => {
            return Err(Error::Parse(format!(
                "at schema_version: unsupported value {}, expected {SCHEMA_VERSION}",
                env.schema_version
            )))
        }
    }
    let kind = env.kind.as_str().unwrap_or_default().to_string();
    match kind.as_str() {
        "multifiltration" => {
            let f: MultifiltrationFile = typed(text)?;
            let doc = SpaceDoc {
                dim: f.dim,
                filtrations: f.filtrations,
            };
            Ok(Document::Multifiltration(doc.to_space("")?))
        }
        "filtered_map" => {
            let f: FilteredMapFile = typed(text)?;
            let v = f.source.to_space("source.")?;
            let w = f.target.to_space("target.")?;
            let m = f.matrix.to_matrix("matrix")?;
            Ok(Document::FilteredMap(FilteredMap::new(v, w, m)?))
        }
        "bigraded_complex" => {
            let f: ComplexFile = typed(text)?;
            let mut dims = BTreeMap::new();
            for (i, d) in f.dims.iter().enumerate() {
                if dims.insert((d.p, d.q), d.dim).is_some() {
                    return Err(Error::Parse(format!("dims[{i}]: bidegree ({}, {}) listed twice", d.p, d.q)));
                }
            }
            let del = complex_map(&f.del, "del")?;
            let delbar = complex_map(&f.delbar, "delbar")?;
            let sigma = f.sigma.as_deref().map(|s| complex_map(s, "sigma")).transpose()?;
            Ok(Document::BigradedComplex(BigradedComplex::new(f.bound, dims, del, delbar, sigma)?))
        }
        "connection" => {
            let f: ConnectionFile = typed(text)?;
            let mut coeffs = Vec::with_capacity(f.coefficients.len());
            for (i, c) in f.coefficients.iter().enumerate() {
                if c.variable == 0 || c.variable > f.n {
                    return Err(Error::Parse(format!("coefficients[{i}].variable: {} is not in 1..={}", c.variable, f.n)));
                }
                coeffs.push(((c.degree.clone(), c.variable - 1), c.matrix.to_matrix(&format!("coefficients[{i}].matrix"))?));
            }
            Ok(Document::Connection(EquivariantConnection::new(f.n, f.grading, coeffs)?))
        }
        "graded_module_dump" => {
            let f: ModuleFile = typed(text)?;
            let n = f.window.lo.len();
            if f.window.hi.len() != n || f.window.lo.iter().zip(&f.window.hi).any(|(a, b)| a > b) {
                return Err(Error::Parse("window: lo and hi must have equal length with lo <= hi".into()));
            }
            let window = DegreeBox::new(f.window.lo, f.window.hi);
            let mut dims = vec![0; window.len()];
            for (i, p) in f.pieces.iter().enumerate() {
                if !window.contains(&p.degree) {
                    return Err(Error::Parse(format!("pieces[{i}].degree: {:?} outside the window", p.degree)));
                }
                dims[window.index_of(&p.degree)] = p.dim;
            }
            let mut mult: Vec<Vec<Matrix>> = (0..n)
                .map(|i| {
                    window
                        .iter()
                        .map(|m| {
                            let up = crate::degree::shift(&m, i, 1);
                            let target = if m[i] == window.hi[i] { &m } else { &up };
                            Matrix::zeros(dims[window.index_of(target)], dims[window.index_of(&m)])
                        })
                        .collect()
                })
                .collect();
            for (i, d) in f.multiplication.iter().enumerate() {
                if d.variable == 0 || d.variable > n || !window.contains(&d.degree) {
                    return Err(Error::Parse(format!("multiplication[{i}]: variable or degree out of range")));
                }
                mult[d.variable - 1][window.index_of(&d.degree)] =
                    d.matrix.to_matrix(&format!("multiplication[{i}].matrix"))?;
            }
            for (i, maps) in mult.iter_mut().enumerate() {
                for (idx, m) in window.iter().enumerate() {
                    if m[i] == window.hi[i] {
                        maps[idx] = Matrix::identity(dims[idx]);
                    }
                }
            }
            Ok(Document::GradedModule(GradedModule::new(window, dims, mult)?))
        }
        "report" => Ok(Document::Report(typed(text)?)),
        other => Err(Error::Parse(format!(
            "at kind: unknown document kind {other:?} (expected one of multifiltration, filtered_map, bigraded_complex, connection, graded_module_dump, report)"
        ))),
    }
}

pub fn read_document(path: &std::path::Path) -> Result<Document> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_document(&text)
}

fn blocks(x: &BigradedComplex, f: impl Fn(Bidegree) -> Option<Matrix>) -> Vec<BlockDoc> {
    x.dims()
        .keys()
        .filter_map(|&pq| {
            f(pq)
                .filter(|m| m.rows() > 0 && m.cols() > 0)
                .map(|m| BlockDoc {
                    p: pq.0,
                    q: pq.1,
                    matrix: MatrixDoc::from_matrix(&m),
                })
        })
        .collect()
}

pub fn to_value(doc: &Document) -> serde_json::Value {
    let v = match doc {
        Document::Multifiltration(v) => {
            let s = SpaceDoc::from_space(v);
            serde_json::to_value(MultifiltrationFile {
                schema_version: SCHEMA_VERSION,
                kind: doc.kind().into(),
                dim: s.dim,
                filtrations: s.filtrations,
            })
        }
        Document::FilteredMap(f) => serde_json::to_value(FilteredMapFile {
            schema_version: SCHEMA_VERSION,
            kind: doc.kind().into(),
            source: SpaceDoc::from_space(f.source()),
            target: SpaceDoc::from_space(f.target()),
            matrix: MatrixDoc::from_matrix(f.matrix()),
        }),
        Document::BigradedComplex(x) => serde_json::to_value(ComplexFile {
            schema_version: SCHEMA_VERSION,
            kind: doc.kind().into(),
            bound: x.bound(),
            dims: x
                .dims()
                .iter()
                .filter(|(_, d)| **d > 0)
                .map(|(&(p, q), &dim)| DimDoc { p, q, dim })
                .collect(),
            del: blocks(x, |pq| Some(x.del_at(pq))),
            delbar: blocks(x, |pq| Some(x.delbar_at(pq))),
            sigma: x.has_real_structure().then(|| blocks(x, |pq| x.sigma_at(pq).cloned())),
        }),
        Document::Connection(c) => serde_json::to_value(ConnectionFile {
            schema_version: SCHEMA_VERSION,
            kind: doc.kind().into(),
            n: c.n(),
            grading: c.grading().to_vec(),
            coefficients: c
                .coeffs()
                .iter()
                .map(|((p, i), m)| CoefficientDoc {
                    degree: p.clone(),
                    variable: i + 1,
                    matrix: MatrixDoc::from_matrix(m),
                })
                .collect(),
        }),
        Document::GradedModule(m) => serde_json::to_value(module_file(m)),
        Document::Report(r) => serde_json::to_value(r),
    };
    v.expect("documents serialize")
}

fn module_file(m: &GradedModule) -> ModuleFile {
    let w = m.window();
    let pieces = w
        .iter()
        .filter(|d| m.dim(d) > 0)
        .map(|d| PieceDoc { dim: m.dim(&d), degree: d })
        .collect();
    let mut multiplication = Vec::new();
    for i in 0..m.n() {
        for d in w.iter() {
            if d[i] == w.hi[i] {
                continue;
            }
            let z = m.mult(i, &d);
            if z.rows() > 0 && z.cols() > 0 {
                multiplication.push(MultDoc {
                    variable: i + 1,
                    degree: d,
                    matrix: MatrixDoc::from_matrix(&z),
                });
            }
        }
    }
    ModuleFile {
        schema_version: SCHEMA_VERSION,
        kind: "graded_module_dump".into(),
        window: WindowDoc {
            lo: w.lo.clone(),
            hi: w.hi.clone(),
        },
        pieces,
        multiplication,
    }
}

/// Pretty JSON with a trailing newline.
pub fn emit(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(&to_value(doc)).expect("values serialize");
    s.push('\n');
    s
}

pub fn emit_report(r: &Report) -> String {
    emit(&Document::Report(r.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    fn round_trip(doc: Document) {
        let text = emit(&doc);
        assert_eq!(parse_document(&text).unwrap(), doc, "{text}");
    }

    #[test]
    fn documents_round_trip() {
        round_trip(Document::Multifiltration(models::three_lines()));
        round_trip(Document::FilteredMap(models::two_lines_to_point()));
        round_trip(Document::BigradedComplex(models::iwasawa().unwrap()));
        round_trip(Document::BigradedComplex(models::synthetic_d2().unwrap()));
        let mut r = models::rng(1);
        let (c, _) = models::random_flat_connection(&mut r, 2, 3, 2);
        round_trip(Document::Connection(c));
        let m = crate::graded::rees_module(&models::three_lines()).module().clone();
        round_trip(Document::GradedModule(m));
    }

    #[test]
    fn minimal_multifiltration() {
        let text = r#"{"schema_version":1,"kind":"multifiltration","dim":1,
            "filtrations":[{"steps":[{"index":0,"span":[["1"]]}]}]}"#;
        let Document::Multifiltration(v) = parse_document(text).unwrap() else { panic!() };
        assert_eq!(v.dim(), 1);
    }

    #[test]
    fn non_descending_names_the_steps() {
        let text = r#"{"schema_version":1,"kind":"multifiltration","dim":2,
            "filtrations":[{"steps":[{"index":0,"span":[["1","0"],["0","1"]]},
            {"index":1,"span":[["1","0"]]},{"index":2,"span":[["0","1"]]}]}]}"#;
        let err = parse_document(text).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::InvalidFiltration(_)));
        assert!(msg.contains("filtrations[0]") && msg.contains("step 2") && msg.contains("step 1"), "{msg}");
    }

    #[test]
    fn diagnostics_carry_paths() {
        let text = r#"{"schema_version":1,"kind":"multifiltration","dim":1,
            "filtrations":[{"steps":[{"index":0,"span":[[0.5]]}]}]}"#;
        let msg = parse_document(text).unwrap_err().to_string();
        assert!(msg.contains("filtrations[0].steps[0].span[0][0]"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
        let msg = parse_document(r#"{"schema_version":2,"kind":"report"}"#).unwrap_err().to_string();
        assert!(msg.contains("schema_version"));
        let msg = parse_document(r#"{"schema_version":1,"kind":"sheaf"}"#).unwrap_err().to_string();
        assert!(msg.contains("sheaf"));
    }
}
