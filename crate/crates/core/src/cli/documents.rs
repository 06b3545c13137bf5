//! JSON shapes read and written by the command-line front end.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channels::{channel_from_kraus, Channel, SemiLocalisation};
use crate::error::{mismatch, Error, Result};
use crate::fixtures::Fixture;
use crate::linops::{c, ComplexMatrix, Tolerance};
use crate::splitmap::{make_splitting_map, ComprehensionWitness, SplittingMap};
use crate::vnalg::{generate_algebra, VnAlgebra};

/// Dense complex matrix, row-major `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixDocument {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(mismatch(format!(
                "{}x{} matrix with {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(mismatch("matrix has a non-finite entry"));
        }
        Ok(ComplexMatrix::from_row_iterator(
            self.rows,
            self.cols,
            self.data.iter().map(|[re, im]| c(*re, *im)),
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraDocument {
    pub dim: usize,
    pub generators: Vec<MatrixDocument>,
}

impl AlgebraDocument {
    pub fn from_algebra(a: &VnAlgebra) -> Self {
        Self::from_generators(a.dim_space(), a.basis())
    }

    pub fn from_generators(dim: usize, generators: &[ComplexMatrix]) -> Self {
        Self {
            dim,
            generators: generators.iter().map(MatrixDocument::from_matrix).collect(),
        }
    }

    pub fn to_algebra(&self, tol: &Tolerance) -> Result<VnAlgebra> {
        let gens = self
            .generators
            .iter()
            .map(MatrixDocument::to_matrix)
            .collect::<Result<Vec<_>>>()?;
        generate_algebra(&gens, self.dim, tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitDocument {
    #[serde(rename = "d_H")]
    pub d_h: usize,
    #[serde(rename = "d_L")]
    pub d_l: usize,
    #[serde(rename = "d_R")]
    pub d_r: usize,
    pub isometry: MatrixDocument,
}

impl SplitDocument {
    pub fn from_map(chi: &SplittingMap) -> Self {
        Self {
            d_h: chi.d_h(),
            d_l: chi.d_l(),
            d_r: chi.d_r(),
            isometry: MatrixDocument::from_matrix(chi.isometry()),
        }
    }

    pub fn to_map(&self, tol: &Tolerance) -> Result<SplittingMap> {
        let v = self.isometry.to_matrix()?;
        if v.ncols() != self.d_h {
            return Err(mismatch(format!("isometry has {} columns but d_H = {}", v.ncols(), self.d_h)));
        }
        make_splitting_map(v, self.d_l, self.d_r, tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelDocument {
    pub d_in: usize,
    pub d_out: usize,
    pub kraus: Vec<MatrixDocument>,
}

impl ChannelDocument {
    pub fn from_channel(e: &Channel) -> Self {
        Self {
            d_in: e.d_in(),
            d_out: e.d_out(),
            kraus: e.kraus().iter().map(MatrixDocument::from_matrix).collect(),
        }
    }

    pub fn to_channel(&self, tol: &Tolerance) -> Result<Channel> {
        let kraus = self.kraus.iter().map(MatrixDocument::to_matrix).collect::<Result<Vec<_>>>()?;
        channel_from_kraus(kraus, self.d_in, self.d_out, tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessDocument {
    #[serde(rename = "d_M")]
    pub d_m: usize,
    pub black_dot: MatrixDocument,
    pub white_dot: MatrixDocument,
}

/// `ζ ⊑ χ` together with its witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComprehensionDocument {
    pub zeta: SplitDocument,
    pub chi: SplitDocument,
    pub witness: WitnessDocument,
}

impl ComprehensionDocument {
    pub fn new(zeta: &SplittingMap, chi: &SplittingMap, w: &ComprehensionWitness) -> Self {
        Self {
            zeta: SplitDocument::from_map(zeta),
            chi: SplitDocument::from_map(chi),
            witness: WitnessDocument {
                d_m: w.d_m,
                black_dot: MatrixDocument::from_matrix(&w.black_dot),
                white_dot: MatrixDocument::from_matrix(&w.white_dot),
            },
        }
    }

    pub fn parts(&self, tol: &Tolerance) -> Result<(SplittingMap, SplittingMap, ComprehensionWitness)> {
        Ok((
            self.zeta.to_map(tol)?,
            self.chi.to_map(tol)?,
            ComprehensionWitness {
                d_m: self.witness.d_m,
                black_dot: self.witness.black_dot.to_matrix()?,
                white_dot: self.witness.white_dot.to_matrix()?,
            },
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemiLocalisationDocument {
    #[serde(rename = "zeta_B")]
    pub zeta_b: SplitDocument,
    #[serde(rename = "E1")]
    pub e1: MatrixDocument,
    #[serde(rename = "d_V")]
    pub d_v: usize,
    #[serde(rename = "T")]
    pub t: MatrixDocument,
    #[serde(rename = "d_U")]
    pub d_u: usize,
}

impl SemiLocalisationDocument {
    pub fn new(s: &SemiLocalisation) -> Self {
        Self {
            zeta_b: SplitDocument::from_map(&s.zeta_b),
            e1: MatrixDocument::from_matrix(&s.e1),
            d_v: s.d_v,
            t: MatrixDocument::from_matrix(&s.e2),
            d_u: s.d_u,
        }
    }

    pub fn to_semi_localisation(&self, tol: &Tolerance) -> Result<SemiLocalisation> {
        Ok(SemiLocalisation {
            zeta_b: self.zeta_b.to_map(tol)?,
            e1: self.e1.to_matrix()?,
            d_v: self.d_v,
            e2: self.t.to_matrix()?,
            d_u: self.d_u,
        })
    }
}

/// The object emitted by `fixture <name>`.
pub fn fixture_json(f: &Fixture) -> serde_json::Value {
    let value = match f {
        Fixture::Algebra { dim, generators } => serde_json::to_value(AlgebraDocument::from_generators(*dim, generators)),
        Fixture::Split(chi) => serde_json::to_value(SplitDocument::from_map(chi)),
        Fixture::Channel(e) => serde_json::to_value(ChannelDocument::from_channel(e)),
    };
    value.expect("documents serialise")
}

/// Verdict value: a flag or a count/measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Verdict {
    Flag(bool),
    Count(u64),
    Value(f64),
}

impl From<bool> for Verdict {
    fn from(b: bool) -> Self {
        Verdict::Flag(b)
    }
}

impl From<usize> for Verdict {
    fn from(n: usize) -> Self {
        Verdict::Count(n as u64)
    }
}

impl From<f64> for Verdict {
    fn from(x: f64) -> Self {
        Verdict::Value(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<String>,
    pub verdicts: BTreeMap<String, Verdict>,
    pub artifacts: BTreeMap<String, MatrixDocument>,
    pub tolerance_used: Tolerance,
}

impl Report {
    pub fn new(command: impl Into<String>, tol: Tolerance) -> Self {
        Self {
            command: command.into(),
            inputs: Vec::new(),
            verdicts: BTreeMap::new(),
            artifacts: BTreeMap::new(),
            tolerance_used: tol,
        }
    }

    pub fn verdict(&mut self, name: &str, v: impl Into<Verdict>) -> &mut Self {
        self.verdicts.insert(name.to_string(), v.into());
        self
    }

    pub fn artifact(&mut self, name: &str, m: &ComplexMatrix) -> &mut Self {
        self.artifacts.insert(name.to_string(), MatrixDocument::from_matrix(m));
        self
    }

    /// Numbered artifacts `name_0`, `name_1`, ...
    pub fn artifact_list(&mut self, name: &str, ms: &[ComplexMatrix]) -> &mut Self {
        let width = ms.len().saturating_sub(1).to_string().len();
        for (i, m) in ms.iter().enumerate() {
            self.artifact(&format!("{name}_{i:0width$}"), m);
        }
        self
    }

    /// True unless some boolean verdict is false.
    pub fn passed(&self) -> bool {
        !self.verdicts.values().any(|v| matches!(v, Verdict::Flag(false)))
    }
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

pub fn parse_json<T: DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: format!("{:?}: {}", e.classify(), strip_position(&e.to_string())),
    })
}

fn strip_position(msg: &str) -> &str {
    msg.rsplit_once(" at line ").map_or(msg, |(head, _)| head)
}

pub fn load_matrix(path: &Path) -> Result<ComplexMatrix> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_json::<MatrixDocument>(&bytes)?.to_matrix()
}

pub fn save_matrix(m: &ComplexMatrix, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&MatrixDocument::from_matrix(m)).expect("documents serialise");
    std::fs::write(path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
