//! JSON wire formats.
//!
//! Matrix:   {"q": 2, "rows": 3, "cols": 2, "entries": [[0,1],[1,0],[1,1]]}
//! Subspace: {"q": 2, "rows": n, "cols": p, "basis": [entries, ...]}
//! Affine:   subspace fields plus "point": entries
//!
//! Entries are row arrays of integers in [0, q). Subspace bases are
//! canonicalized on load, so any spanning set round-trips to the same file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::affine::AffineMatSubspace;
use crate::error::{Error, Result};
use crate::ffmat::{Fq, FqMat};
use crate::subspace::MatSubspace;

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    q: u8,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<u8>>,
}

#[derive(Serialize, Deserialize)]
struct SubspaceJson {
    q: u8,
    rows: usize,
    cols: usize,
    basis: Vec<Vec<Vec<u8>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<Vec<Vec<u8>>>,
}

fn entries_of(m: &FqMat) -> Vec<Vec<u8>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn matrix_from_parts(q: u8, rows: usize, cols: usize, entries: &[Vec<u8>]) -> Result<FqMat> {
    let field = Fq::new(q)?;
    if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse(format!(
            "entries do not form a {rows}x{cols} matrix"
        )));
    }
    for row in entries {
        for &v in row {
            if v >= q {
                return Err(Error::Parse(format!("entry {v} out of range for F_{q}")));
            }
        }
    }
    FqMat::from_rows(field, entries)
}

pub fn matrix_to_value(m: &FqMat) -> serde_json::Value {
    serde_json::to_value(MatrixJson {
        q: m.field().modulus(),
        rows: m.rows(),
        cols: m.cols(),
        entries: entries_of(m),
    })
    .expect("matrix serializes")
}

pub fn matrix_from_value(v: &serde_json::Value) -> Result<FqMat> {
    let mj: MatrixJson =
        serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    matrix_from_parts(mj.q, mj.rows, mj.cols, &mj.entries)
}

pub fn subspace_to_value(v: &MatSubspace) -> serde_json::Value {
    serde_json::to_value(SubspaceJson {
        q: v.field().modulus(),
        rows: v.rows(),
        cols: v.cols(),
        basis: v.basis_matrices().iter().map(entries_of).collect(),
        point: None,
    })
    .expect("subspace serializes")
}

pub fn subspace_from_value(value: &serde_json::Value) -> Result<MatSubspace> {
    let sj: SubspaceJson =
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let field = Fq::new(sj.q)?;
    if sj.rows == 0 || sj.cols == 0 {
        return Err(Error::Parse("ambient dimensions must be positive".into()));
    }
    let mats: Vec<FqMat> = sj
        .basis
        .iter()
        .map(|e| matrix_from_parts(sj.q, sj.rows, sj.cols, e))
        .collect::<Result<_>>()?;
    MatSubspace::from_basis(field, sj.rows, sj.cols, &mats)
}

pub fn affine_to_value(a: &AffineMatSubspace) -> serde_json::Value {
    serde_json::to_value(SubspaceJson {
        q: a.field().modulus(),
        rows: a.rows(),
        cols: a.cols(),
        basis: a.direction().basis_matrices().iter().map(entries_of).collect(),
        point: Some(entries_of(a.point())),
    })
    .expect("affine subspace serializes")
}

pub fn affine_from_value(value: &serde_json::Value) -> Result<AffineMatSubspace> {
    let sj: SubspaceJson =
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let field = Fq::new(sj.q)?;
    let point_entries = sj
        .point
        .as_ref()
        .ok_or_else(|| Error::Parse("affine subspace file needs a \"point\" field".into()))?;
    let point = matrix_from_parts(sj.q, sj.rows, sj.cols, point_entries)?;
    let mats: Vec<FqMat> = sj
        .basis
        .iter()
        .map(|e| matrix_from_parts(sj.q, sj.rows, sj.cols, e))
        .collect::<Result<_>>()?;
    let direction = MatSubspace::from_basis(field, sj.rows, sj.cols, &mats)?;
    AffineMatSubspace::new(point, direction)
}

/// Any of the three file payloads, detected by shape.
pub enum LoadedObject {
    Matrix(FqMat),
    Subspace(MatSubspace),
    Affine(AffineMatSubspace),
}

pub fn parse_object(text: &str) -> Result<LoadedObject> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("expected a JSON object".into()))?;
    if obj.contains_key("point") {
        Ok(LoadedObject::Affine(affine_from_value(&value)?))
    } else if obj.contains_key("basis") {
        Ok(LoadedObject::Subspace(subspace_from_value(&value)?))
    } else if obj.contains_key("entries") {
        Ok(LoadedObject::Matrix(matrix_from_value(&value)?))
    } else {
        Err(Error::Parse(
            "object has none of \"entries\", \"basis\", \"point\"".into(),
        ))
    }
}

pub fn load_object(path: &Path) -> Result<LoadedObject> {
    let text = std::fs::read_to_string(path)?;
    parse_object(&text)
}

pub fn save_value(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace;

    fn f(q: u8) -> Fq {
        Fq::new(q).unwrap()
    }

    #[test]
    fn matrix_round_trip() {
        let m = FqMat::from_rows(f(3), &[vec![0, 1], vec![2, 1], vec![1, 0]]).unwrap();
        let v = matrix_to_value(&m);
        assert_eq!(matrix_from_value(&v).unwrap(), m);
        assert_eq!(v["rows"], 3);
        assert_eq!(v["cols"], 2);
        assert_eq!(v["q"], 3);
    }

    #[test]
    fn out_of_range_entries_rejected() {
        let v = serde_json::json!({"q": 2, "rows": 1, "cols": 2, "entries": [[0, 2]]});
        assert!(matrix_from_value(&v).is_err());
    }

    #[test]
    fn subspace_canonicalized_on_load() {
        // a redundant spanning set loads to the same canonical object
        let v = serde_json::json!({
            "q": 2, "rows": 2, "cols": 2,
            "basis": [
                [[1, 0], [0, 1]],
                [[0, 1], [0, 0]],
                [[1, 1], [0, 1]],
            ],
        });
        let s = subspace_from_value(&v).unwrap();
        assert_eq!(s.dim(), 2);
        let round = subspace_to_value(&s);
        assert_eq!(subspace_from_value(&round).unwrap(), s);
    }

    #[test]
    fn object_detection() {
        let sl2 = subspace::sl2_f2();
        match parse_object(&subspace_to_value(&sl2).to_string()).unwrap() {
            LoadedObject::Subspace(s) => assert_eq!(s, sl2),
            _ => panic!("expected subspace"),
        }
        let m = FqMat::identity(f(2), 2);
        match parse_object(&matrix_to_value(&m).to_string()).unwrap() {
            LoadedObject::Matrix(got) => assert_eq!(got, m),
            _ => panic!("expected matrix"),
        }
    }

    #[test]
    fn garbage_rejected_with_context() {
        assert!(parse_object("not json").is_err());
        assert!(parse_object("{\"q\": 9, \"rows\": 1, \"cols\": 1, \"entries\": [[0]]}").is_err());
    }
}
