//! JSON file formats for elements and maps. Complex numbers are `[re, im]` pairs.
//!
//! ```json
//! {"shape": [2], "entries": [[[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]]}
//! ```

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ToleranceConfig, C64};
use crate::preservers::{
    build_compression, build_jordan_hom, build_sandwich, build_scalar, build_star_anti_hom,
    build_star_hom, build_transpose, identity, LinearMap, Placement,
};

type Rows = Vec<Vec<[f64; 2]>>;

/// An element of a block-diagonal algebra: one row-major matrix per block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub shape: Vec<usize>,
    pub entries: Vec<Rows>,
}

impl MatrixFile {
    pub fn from_element(x: &AlgebraElement) -> Self {
        Self {
            shape: x.shape().block_dims().to_vec(),
            entries: x.blocks().iter().map(ComplexMatrix::to_pairs).collect(),
        }
    }

    pub fn to_element(&self) -> Result<AlgebraElement> {
        let shape = AlgebraShape::new(self.shape.clone())?;
        if self.entries.len() != shape.num_blocks() {
            return Err(Error::Parse(format!(
                "shape {shape} has {} blocks but {} were given",
                shape.num_blocks(),
                self.entries.len()
            )));
        }
        let blocks = self
            .entries
            .iter()
            .map(|rows| ComplexMatrix::from_pairs(rows))
            .collect::<Result<Vec<_>>>()?;
        AlgebraElement::from_blocks(shape, blocks)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementSpec {
    pub block: usize,
    #[serde(default)]
    pub transpose: bool,
}

/// Parameters of a structural builder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BuilderSpec {
    Identity,
    StarHom {
        assignment: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unitary: Option<MatrixFile>,
    },
    StarAntiHom {
        assignment: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unitary: Option<MatrixFile>,
    },
    JordanHom {
        placements: Vec<Vec<PlacementSpec>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unitary: Option<MatrixFile>,
    },
    Transpose,
    Sandwich {
        u: MatrixFile,
        v: MatrixFile,
    },
    Scalar {
        factor: [f64; 2],
    },
    Compression {
        p: MatrixFile,
    },
}

/// A linear map given either by a builder or by its raw action on row-major vectorized
/// dense elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub domain_shape: Vec<usize>,
    pub codomain_shape: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builder: Option<BuilderSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Rows>,
}

fn same_shape(domain: &AlgebraShape, codomain: &AlgebraShape, kind: &str) -> Result<()> {
    if domain != codomain {
        return Err(Error::ShapeIncompatible(format!(
            "{kind} needs equal domain and codomain, got {domain} and {codomain}"
        )));
    }
    Ok(())
}

fn element_on(file: &MatrixFile, shape: &AlgebraShape, which: &str) -> Result<AlgebraElement> {
    let x = file.to_element()?;
    if x.shape() != shape {
        return Err(Error::ShapeIncompatible(format!(
            "{which} has shape {}, expected {shape}",
            x.shape()
        )));
    }
    Ok(x)
}

impl MapFile {
    pub fn from_builder(
        domain: &AlgebraShape,
        codomain: &AlgebraShape,
        builder: BuilderSpec,
    ) -> Self {
        Self {
            domain_shape: domain.block_dims().to_vec(),
            codomain_shape: codomain.block_dims().to_vec(),
            builder: Some(builder),
            action: None,
        }
    }

    /// Raw-action form of any map.
    pub fn from_map(map: &LinearMap) -> Self {
        let a = map.action();
        Self {
            domain_shape: map.domain().block_dims().to_vec(),
            codomain_shape: map.codomain().block_dims().to_vec(),
            builder: None,
            action: Some(
                (0..a.nrows())
                    .map(|i| (0..a.ncols()).map(|j| [a[(i, j)].re, a[(i, j)].im]).collect())
                    .collect(),
            ),
        }
    }

    pub fn to_map(&self, tol: &ToleranceConfig) -> Result<LinearMap> {
        let domain = AlgebraShape::new(self.domain_shape.clone())?;
        let codomain = AlgebraShape::new(self.codomain_shape.clone())?;
        match (&self.builder, &self.action) {
            (Some(b), None) => build(b, &domain, &codomain, tol),
            (None, Some(rows)) => {
                let nrows = rows.len();
                let ncols = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|r| r.len() != ncols) {
                    return Err(Error::Parse("action rows have different lengths".into()));
                }
                let action =
                    DMatrix::from_fn(nrows, ncols, |i, j| C64::new(rows[i][j][0], rows[i][j][1]));
                LinearMap::from_action(&domain, &codomain, action)
            }
            _ => Err(Error::Parse(
                "a map file needs exactly one of `builder` and `action`".into(),
            )),
        }
    }
}

fn build(
    spec: &BuilderSpec,
    domain: &AlgebraShape,
    codomain: &AlgebraShape,
    tol: &ToleranceConfig,
) -> Result<LinearMap> {
    let unitary_on = |u: &Option<MatrixFile>| -> Result<Option<AlgebraElement>> {
        u.as_ref()
            .map(|f| element_on(f, codomain, "unitary"))
            .transpose()
    };
    match spec {
        BuilderSpec::Identity => {
            same_shape(domain, codomain, "identity")?;
            Ok(identity(domain))
        }
        BuilderSpec::StarHom {
            assignment,
            unitary,
        } => build_star_hom(domain, codomain, assignment, unitary_on(unitary)?.as_ref(), tol),
        BuilderSpec::StarAntiHom {
            assignment,
            unitary,
        } => build_star_anti_hom(domain, codomain, assignment, unitary_on(unitary)?.as_ref(), tol),
        BuilderSpec::JordanHom {
            placements,
            unitary,
        } => {
            let placements: Vec<Vec<Placement>> = placements
                .iter()
                .map(|list| {
                    list.iter()
                        .map(|p| Placement {
                            block: p.block,
                            transpose: p.transpose,
                        })
                        .collect()
                })
                .collect();
            build_jordan_hom(domain, codomain, &placements, unitary_on(unitary)?.as_ref(), tol)
        }
        BuilderSpec::Transpose => {
            same_shape(domain, codomain, "transpose")?;
            Ok(build_transpose(domain))
        }
        BuilderSpec::Sandwich { u, v } => {
            same_shape(domain, codomain, "sandwich")?;
            build_sandwich(&element_on(u, domain, "u")?, &element_on(v, domain, "v")?, tol)
        }
        BuilderSpec::Scalar { factor } => {
            same_shape(domain, codomain, "scalar")?;
            if !factor.iter().all(|f| f.is_finite()) {
                return Err(Error::Parse("scalar factor must be finite".into()));
            }
            Ok(build_scalar(domain, C64::new(factor[0], factor[1])))
        }
        BuilderSpec::Compression { p } => {
            same_shape(domain, codomain, "compression")?;
            Ok(build_compression(&element_on(p, domain, "p")?))
        }
    }
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_json(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)? + "\n")
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_element(path: &Path) -> Result<AlgebraElement> {
    read_json::<MatrixFile>(path)?.to_element()
}

pub fn write_element(path: &Path, x: &AlgebraElement) -> Result<()> {
    write_json(path, &MatrixFile::from_element(x))
}

pub fn read_map(path: &Path, tol: &ToleranceConfig) -> Result<LinearMap> {
    read_json::<MapFile>(path)?.to_map(tol)
}
