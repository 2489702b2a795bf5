//! JSON system documents.
//!
//! ```json
//! {"name": "...", "A": [[[re, im], ...], ...], "B": ..., "C": ..., "D": ...,
//!  "candidates": [{"name": "H1", "H": [[[re, im], ...], ...]}]}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};
use crate::opcore::HermitianOperator;
use crate::sysmodel::SystemRealization;

/// Rows of `[re, im]` pairs.
pub type MatrixEntries = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Candidate {
    pub name: String,
    #[serde(rename = "H")]
    pub h: MatrixEntries,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    #[serde(default)]
    pub name: String,
    #[serde(rename = "A")]
    pub a: MatrixEntries,
    #[serde(rename = "B")]
    pub b: MatrixEntries,
    #[serde(rename = "C")]
    pub c: MatrixEntries,
    #[serde(rename = "D")]
    pub d: MatrixEntries,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<Candidate>>,
}

/// Input sequence for `simulate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub x0: Vec<[f64; 2]>,
    pub inputs: Vec<Vec<[f64; 2]>>,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn to_matrix(label: &str, rows: &MatrixEntries) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(Error::Parse { line: 0, column: 0, message: format!("matrix {label} is empty") });
    }
    if let Some(k) = rows.iter().position(|r| r.len() != ncols) {
        return Err(Error::Parse {
            line: 0,
            column: 0,
            message: format!("matrix {label}: row {k} has {} entries, expected {ncols}", rows[k].len()),
        });
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

pub fn from_matrix(m: &CMatrix) -> MatrixEntries {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn to_vector(v: &[[f64; 2]]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|z| c(z[0], z[1])))
}

pub fn from_vector(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

impl SystemDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SystemDocument = serde_json::from_str(text).map_err(parse_error)?;
        doc.realization()?;
        doc.candidate_operators()?;
        Ok(doc)
    }

    pub fn from_system(name: &str, sigma: &SystemRealization) -> Self {
        SystemDocument {
            name: name.to_string(),
            a: from_matrix(sigma.a()),
            b: from_matrix(sigma.b()),
            c: from_matrix(sigma.c()),
            d: from_matrix(sigma.d()),
            candidates: None,
        }
    }

    pub fn realization(&self) -> Result<SystemRealization> {
        SystemRealization::new(
            to_matrix("A", &self.a)?,
            to_matrix("B", &self.b)?,
            to_matrix("C", &self.c)?,
            to_matrix("D", &self.d)?,
        )
    }

    pub fn candidate_operators(&self) -> Result<Vec<(String, HermitianOperator)>> {
        let n = self.a.len();
        let mut out = Vec::new();
        for cand in self.candidates.iter().flatten() {
            let m = to_matrix(&format!("candidate {}", cand.name), &cand.h)?;
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "candidate {} is {}x{}, state dimension is {n}",
                    cand.name,
                    m.nrows(),
                    m.ncols()
                )));
            }
            out.push((cand.name.clone(), HermitianOperator::new(m)?));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents hold only finite numbers")
    }
}

pub fn parse_system(path: &Path) -> Result<SystemDocument> {
    SystemDocument::from_json(&read(path)?)
}

pub fn write_document(doc: &SystemDocument, path: &Path) -> Result<()> {
    std::fs::write(path, doc.to_json()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn parse_inputs(path: &Path) -> Result<InputDocument> {
    serde_json::from_str(&read(path)?).map_err(parse_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCALAR: &str = r#"{"A":[[[-0.125,0]]],"B":[[[1,0]]],"C":[[[0.1875,0]]],"D":[[[0.5,0]]]}"#;

    #[test]
    fn parses_scalar_system() {
        let doc = SystemDocument::from_json(SCALAR).unwrap();
        let s = doc.realization().unwrap();
        assert_eq!((s.n(), s.m(), s.p()), (1, 1, 1));
        assert_eq!(s.c()[(0, 0)].re, 0.1875);
    }

    #[test]
    fn empty_matrix_is_parse_error() {
        let text = r#"{"A":[],"B":[[[1,0]]],"C":[[[1,0]]],"D":[[[0,0]]]}"#;
        assert!(matches!(SystemDocument::from_json(text), Err(Error::Parse { .. })));
    }

    #[test]
    fn mismatched_b_rows() {
        let text = r#"{"A":[[[0,0]]],"B":[[[1,0]],[[1,0]]],"C":[[[1,0]]],"D":[[[0,0]]]}"#;
        assert!(matches!(SystemDocument::from_json(text), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn syntax_error_reports_position() {
        let text = "{\n  \"A\": [[[0, 0]]],\n  \"B\": oops\n}";
        match SystemDocument::from_json(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let mut doc = SystemDocument::from_json(SCALAR).unwrap();
        doc.a[0][0] = [0.1 + 0.2, -1.0 / 3.0];
        doc.candidates = Some(vec![Candidate { name: "h".into(), h: vec![vec![[3.0 / 64.0, 0.0]]] }]);
        let back = SystemDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.a[0][0][0].to_bits(), (0.1 + 0.2_f64).to_bits());
    }
}
