//! JSON map documents.
//!
//! A document is an object with a `"type"` discriminator (`kraus`, `choi`,
//! `builtin`, `dilation`). Matrices are `{rows, cols, data}` with `data` a
//! row-major list of `[re, im]` pairs. Unknown fields are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use choicert_core::constructions::{builtin_oracle, DilationSpec};
use choicert_core::cp_maps::{ChoiBlockMatrix, KrausMap, MapOracle};
use choicert_core::linalg::ComplexMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self, at: &str) -> Result<ComplexMatrix, CliError> {
        if self.data.len() != self.rows * self.cols {
            return Err(CliError::Dimension(format!(
                "`{at}`: {}x{} matrix needs {} entries, found {}",
                self.rows,
                self.cols,
                self.rows * self.cols,
                self.data.len()
            )));
        }
        let data = self
            .data
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::from_vec(self.rows, self.cols, data)
            .map_err(|e| CliError::Dimension(format!("`{at}`: {e}")))
    }

    fn expect_shape(&self, at: &str, rows: usize, cols: usize) -> Result<ComplexMatrix, CliError> {
        if (self.rows, self.cols) != (rows, cols) {
            return Err(CliError::Dimension(format!(
                "`{at}` must be {rows}x{cols}, declared {}x{}",
                self.rows, self.cols
            )));
        }
        self.to_matrix(at)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausDoc {
    pub dim_in: usize,
    pub dim_out: usize,
    pub operators: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoiDoc {
    pub n: usize,
    pub m: usize,
    pub matrix: MatrixDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuiltinDoc {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// `null` for the unbounded family.
    #[serde(default)]
    pub dim_in: Option<usize>,
    #[serde(default)]
    pub dim_out: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DilationDoc {
    #[serde(rename = "dim_K")]
    pub dim_k: usize,
    #[serde(rename = "dim_H")]
    pub dim_h: usize,
    #[serde(rename = "U")]
    pub u: MatrixDoc,
    pub b: MatrixDoc,
    #[serde(rename = "Q")]
    pub q: MatrixDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MapFile {
    Kraus(KrausDoc),
    Choi(ChoiDoc),
    Builtin(BuiltinDoc),
    Dilation(DilationDoc),
}

/// Either a map document or a bare matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Map(MapFile),
    Matrix(MatrixDoc),
}

impl Document {
    /// Objects carrying a `"type"` key are map documents, anything else is
    /// parsed as a matrix.
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = read_text(path)?;
        let source = path.display().to_string();
        let is_map = matches!(
            serde_json::from_str::<Value>(&text),
            Ok(Value::Object(ref o)) if o.contains_key("type")
        );
        if is_map {
            return MapFile::parse(&text, &source).map(Document::Map);
        }
        let mut de = serde_json::Deserializer::from_str(&text);
        let doc = serde_path_to_error::deserialize(&mut de).map_err(|e| CliError::Parse {
            file: source.clone(),
            path: e.path().to_string(),
            message: e.into_inner().to_string(),
        })?;
        de.end().map_err(|e| CliError::Parse {
            file: source,
            path: ".".into(),
            message: e.to_string(),
        })?;
        Ok(Document::Matrix(doc))
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// What a document evaluates to.
#[derive(Debug, Clone)]
pub enum Loaded {
    Map(MapOracle),
    Dilation(DilationSpec),
}

impl MapFile {
    pub fn kind(&self) -> &'static str {
        match self {
            MapFile::Kraus(_) => "kraus",
            MapFile::Choi(_) => "choi",
            MapFile::Builtin(_) => "builtin",
            MapFile::Dilation(_) => "dilation",
        }
    }

    /// Parses a document; `source` names the input in error messages.
    pub fn parse(text: &str, source: &str) -> Result<Self, CliError> {
        let parse_err = |path: String, message: String| CliError::Parse {
            file: source.to_string(),
            path,
            message,
        };
        let value: Value =
            serde_json::from_str(text).map_err(|e| parse_err(".".into(), e.to_string()))?;
        let Value::Object(mut obj) = value else {
            return Err(parse_err(".".into(), "expected a JSON object".into()));
        };
        let kind = match obj.remove("type") {
            Some(Value::String(s)) => s,
            Some(_) => return Err(parse_err("type".into(), "expected a string".into())),
            None => return Err(parse_err("type".into(), "missing discriminator".into())),
        };
        let body = Value::Object(obj);
        fn typed<T: serde::de::DeserializeOwned>(
            body: Value,
            err: impl Fn(String, String) -> CliError,
        ) -> Result<T, CliError> {
            serde_path_to_error::deserialize(body).map_err(|e| {
                let path = e.path().to_string();
                err(path, e.into_inner().to_string())
            })
        }
        Ok(match kind.as_str() {
            "kraus" => MapFile::Kraus(typed(body, parse_err)?),
            "choi" => MapFile::Choi(typed(body, parse_err)?),
            "builtin" => MapFile::Builtin(typed(body, parse_err)?),
            "dilation" => MapFile::Dilation(typed(body, parse_err)?),
            other => {
                return Err(parse_err(
                    "type".into(),
                    format!("unknown type `{other}`, expected kraus, choi, builtin or dilation"),
                ))
            }
        })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        Self::parse(&read_text(path)?, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("map documents serialize");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn from_kraus(k: &KrausMap) -> Self {
        MapFile::Kraus(KrausDoc {
            dim_in: k.dim_in(),
            dim_out: k.dim_out(),
            operators: k.operators().iter().map(MatrixDoc::from_matrix).collect(),
        })
    }

    pub fn from_choi(c: &ChoiBlockMatrix) -> Self {
        MapFile::Choi(ChoiDoc {
            n: c.n(),
            m: c.m(),
            matrix: MatrixDoc::from_matrix(c.matrix()),
        })
    }

    pub fn from_dilation(d: &DilationSpec) -> Self {
        MapFile::Dilation(DilationDoc {
            dim_k: d.dim_k,
            dim_h: d.dim_h,
            u: MatrixDoc::from_matrix(&d.u),
            b: MatrixDoc::from_matrix(&d.b),
            q: MatrixDoc::from_matrix(&d.q),
        })
    }

    /// Checks declared dimensions against payloads and builds the object.
    ///
    /// `seed` fills in a missing `seed` parameter of `random-kraus`.
    pub fn load(&self, seed: u64) -> Result<Loaded, CliError> {
        match self {
            MapFile::Kraus(k) => {
                if k.operators.is_empty() {
                    return Err(CliError::Dimension("`operators` must not be empty".into()));
                }
                let ops = k
                    .operators
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m.expect_shape(&format!("operators[{i}]"), k.dim_out, k.dim_in))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Loaded::Map(MapOracle::Kraus(KrausMap::new(
                    k.dim_in, k.dim_out, ops,
                )?)))
            }
            MapFile::Choi(c) => {
                let d = c.n * c.m;
                let matrix = c.matrix.expect_shape("matrix", d, d)?;
                Ok(Loaded::Map(MapOracle::Choi(ChoiBlockMatrix::new(
                    c.n, c.m, matrix,
                )?)))
            }
            MapFile::Builtin(b) => {
                let mut params = b.params.clone();
                if b.name == "random-kraus" {
                    params.entry("seed".into()).or_insert(seed as f64);
                }
                Ok(Loaded::Map(builtin_oracle(
                    &b.name,
                    &params,
                    (b.dim_in, b.dim_out),
                )?))
            }
            MapFile::Dilation(d) => {
                let dk = d.dim_k * d.dim_h;
                let spec = DilationSpec {
                    dim_k: d.dim_k,
                    dim_h: d.dim_h,
                    u: d.u.expect_shape("U", dk, dk)?,
                    b: d.b.expect_shape("b", d.dim_h, d.dim_h)?,
                    q: d.q.expect_shape("Q", d.dim_k, d.dim_k)?,
                };
                spec.validate()?;
                Ok(Loaded::Dilation(spec))
            }
        }
    }
}
