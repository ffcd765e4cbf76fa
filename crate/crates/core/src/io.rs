//! File formats: OBJ meshes, CSV fields and histories, JSON reports, and the
//! run manifest that accompanies every output.
//!
//! OBJ files carry the manifest in a leading comment. JSON and CSV outputs
//! are written exactly as their types serialize, with the manifest in a
//! sidecar `<file>.manifest.json`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RadialGraphField;
use crate::geom::Vec3;
use crate::mesh::TriangleMesh;
use crate::solver::HistoryRow;

const MANIFEST_TAG: &str = "# manifest: ";

/// Provenance of an output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub seed: Option<u64>,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).expect("parameters serialize");
        self.parameters.insert(key.to_string(), v);
        self
    }

    pub fn input(mut self, path: &Path) -> Self {
        self.inputs.push(path.display().to_string());
        self
    }

    pub fn output(mut self, path: &Path) -> Self {
        self.outputs.push(path.display().to_string());
        self
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

/// Path of the manifest sidecar of `path`.
pub fn manifest_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Writes `value` as JSON and the manifest beside it.
pub fn write_json<T: Serialize>(path: &Path, value: &T, manifest: &RunManifest) -> Result<()> {
    write_file(path, &to_json(value))?;
    write_file(&manifest_path(path), &to_json(manifest))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: e.line(),
        message: e.to_string(),
    })
}

/// OBJ text: the manifest comment, `v x y z` lines, then `f i j k` lines
/// with 1-based indices.
pub fn obj_string(mesh: &TriangleMesh, manifest: Option<&RunManifest>) -> String {
    let mut s = String::new();
    if let Some(m) = manifest {
        let json = serde_json::to_string(m).expect("manifest serializes");
        let _ = writeln!(s, "{MANIFEST_TAG}{json}");
    }
    for v in mesh.vertices() {
        let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
    }
    for f in mesh.faces() {
        let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    s
}

pub fn write_obj(path: &Path, mesh: &TriangleMesh, manifest: &RunManifest) -> Result<()> {
    write_file(path, &obj_string(mesh, Some(manifest)))
}

/// A mesh read back from OBJ, with the embedded manifest if present.
#[derive(Debug, Clone)]
pub struct ObjFile {
    pub mesh: TriangleMesh,
    pub manifest: Option<RunManifest>,
}

/// Parses OBJ text. Accepts `f` entries of the forms `i`, `i/t`, `i//n`,
/// `i/t/n` and negative (relative) indices; polygons are fanned into
/// triangles. Other statements are ignored.
pub fn parse_obj(text: &str, path: &Path) -> Result<ObjFile> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.display().to_string(),
        line,
        message,
    };
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut manifest = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        if let Some(json) = raw.strip_prefix(MANIFEST_TAG) {
            manifest = serde_json::from_str(json).ok();
            continue;
        }
        let mut tok = raw.split_whitespace();
        match tok.next() {
            Some("v") => {
                let c: Vec<f64> = tok
                    .take(3)
                    .map(|t| t.parse::<f64>().map_err(|e| err(line, format!("bad coordinate {t:?}: {e}"))))
                    .collect::<Result<_>>()?;
                if c.len() != 3 {
                    return Err(err(line, "vertex needs three coordinates".into()));
                }
                vertices.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = tok
                    .map(|t| {
                        let head = t.split('/').next().unwrap_or("");
                        let i: i64 = head.parse().map_err(|e| err(line, format!("bad index {t:?}: {e}")))?;
                        let n = vertices.len() as i64;
                        let i0 = if i > 0 { i - 1 } else { n + i };
                        if i == 0 || i0 < 0 || i0 >= n {
                            return Err(err(line, format!("index {i} out of range")));
                        }
                        Ok(i0 as usize)
                    })
                    .collect::<Result<_>>()?;
                if idx.len() < 3 {
                    return Err(err(line, "face needs at least three vertices".into()));
                }
                for w in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[w], idx[w + 1]]);
                }
            }
            _ => {}
        }
    }
    let mesh = TriangleMesh::new(vertices, faces)?;
    Ok(ObjFile { mesh, manifest })
}

pub fn read_obj(path: &Path) -> Result<ObjFile> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_obj(&text, path)
}

#[derive(Serialize)]
struct FieldRow {
    theta: f64,
    s: f64,
    rho: f64,
}

fn csv_string<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io {
            path: "<csv>".into(),
            message: e.to_string(),
        })?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io {
        path: "<csv>".into(),
        message: e.to_string(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// `theta,s,rho` per grid node, in node order.
pub fn field_csv(field: &RadialGraphField) -> Result<String> {
    let g = field.grid();
    csv_string((0..g.node_count()).map(|k| {
        let (theta, s) = g.coords(k);
        FieldRow {
            theta,
            s,
            rho: field.rho()[k],
        }
    }))
}

pub fn write_field_csv(path: &Path, field: &RadialGraphField, manifest: &RunManifest) -> Result<()> {
    write_file(path, &field_csv(field)?)?;
    write_file(&manifest_path(path), &to_json(manifest))
}

pub fn history_csv(history: &[HistoryRow]) -> Result<String> {
    csv_string(history.iter())
}

pub fn write_history_csv(path: &Path, history: &[HistoryRow], manifest: &RunManifest) -> Result<()> {
    write_file(path, &history_csv(history)?)?;
    write_file(&manifest_path(path), &to_json(manifest))
}

/// Reads the `rho` column of a field CSV, checking the node count.
pub fn read_field_rho(path: &Path, node_count: usize) -> Result<Vec<f64>> {
    #[derive(Deserialize)]
    struct Row {
        rho: f64,
    }
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let rho = r
        .deserialize::<Row>()
        .enumerate()
        .map(|(k, row)| {
            row.map(|x| x.rho).map_err(|e| Error::Parse {
                path: path.display().to_string(),
                line: k + 2,
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if rho.len() != node_count {
        return Err(Error::Parse {
            path: path.display().to_string(),
            line: rho.len() + 1,
            message: format!("expected {node_count} rows, found {}", rho.len()),
        });
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::SphericalDomain;
    use crate::field::PolarGrid;

    fn square() -> TriangleMesh {
        let v = vec![
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(1.0, 0.0, 1.0),
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(0.0, 1.0, 1.0),
        ];
        TriangleMesh::new(v, vec![[0, 1, 2], [0, 2, 3]]).unwrap()
    }

    #[test]
    fn obj_round_trip() {
        let m = square();
        let man = RunManifest::new("construct").param("gamma", 1.5);
        let text = obj_string(&m, Some(&man));
        assert!(text.starts_with("# manifest: {\"command\":\"construct\""));
        assert!(text.contains("\nv 1 0 1\n"));
        assert!(text.ends_with("f 1 2 3\nf 1 3 4\n"));
        let back = parse_obj(&text, Path::new("x.obj")).unwrap();
        assert_eq!(back.mesh, m);
        assert_eq!(back.manifest, Some(man));
    }

    #[test]
    fn obj_variants() {
        let text = "# quad\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\n";
        let m = parse_obj(text, Path::new("q.obj")).unwrap().mesh;
        assert_eq!(m.faces(), &[[0, 1, 2], [0, 2, 3]]);
        let rel = "v 0 0 1\nv 1 0 1\nv 1 1 1\nf -3 -2 -1\n";
        assert_eq!(parse_obj(rel, Path::new("r.obj")).unwrap().mesh.faces(), &[[0, 1, 2]]);
        let bad = "v 0 0 1\nv 1 0\n";
        match parse_obj(bad, Path::new("b.obj")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_obj("v 0 0 1\nf 1 2 3\n", Path::new("c.obj")).is_err());
    }

    #[test]
    fn field_csv_layout() {
        let g = PolarGrid::new(SphericalDomain::cap(0.5), 4, 3).unwrap();
        let f = RadialGraphField::constant(g, 2.0).unwrap();
        let text = field_csv(&f).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("theta,s,rho"));
        assert_eq!(lines.next(), Some("0.0,0.0,2.0"));
        assert_eq!(text.lines().count(), 1 + 13);
    }

    #[test]
    fn sidecar_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.json");
        let man = RunManifest::new("verify").output(&p);
        write_json(&p, &serde_json::json!({"b": 1, "a": 2}), &man).unwrap();
        let back: RunManifest = read_json(&manifest_path(&p)).unwrap();
        assert_eq!(back, man);
        assert!(manifest_path(&p).ends_with("out.json.manifest.json"));
    }
}
