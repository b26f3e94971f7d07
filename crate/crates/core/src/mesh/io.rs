//! OBJ, OFF and STL input; OBJ and OFF output.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::Point3;

use super::HalfEdgeMesh;
use crate::error::MeshError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Off,
    Stl,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "obj" => Some(Self::Obj),
            "off" => Some(Self::Off),
            "stl" => Some(Self::Stl),
            _ => None,
        }
    }
}

/// Parses a mesh and builds its halfedge structure.
pub fn load_mesh<R: Read>(mut source: R, format: MeshFormat) -> Result<HalfEdgeMesh, MeshError> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    let (positions, triangles) = match format {
        MeshFormat::Obj => parse_obj(&as_text(&bytes)?)?,
        MeshFormat::Off => parse_off(&as_text(&bytes)?)?,
        MeshFormat::Stl => parse_stl(&bytes)?,
    };
    if triangles.is_empty() {
        return Err(MeshError::Empty);
    }
    HalfEdgeMesh::from_triangles(positions, &triangles)
}

pub fn load_mesh_file(path: impl AsRef<Path>) -> Result<HalfEdgeMesh, MeshError> {
    let path = path.as_ref();
    let format = MeshFormat::from_path(path)
        .ok_or_else(|| MeshError::UnknownFormat(path.display().to_string()))?;
    let file = std::fs::File::open(path)?;
    load_mesh(std::io::BufReader::new(file), format)
}

fn as_text(bytes: &[u8]) -> Result<String, MeshError> {
    String::from_utf8(bytes.to_vec()).map_err(|e| MeshError::Parse {
        line: 0,
        message: e.to_string(),
    })
}

fn parse_f64(tok: Option<&str>, line: usize) -> Result<f64, MeshError> {
    let tok = tok.ok_or_else(|| MeshError::Parse {
        line,
        message: "missing coordinate".into(),
    })?;
    tok.parse().map_err(|_| MeshError::Parse {
        line,
        message: format!("bad number {tok:?}"),
    })
}

type Soup = (Vec<Point3<f64>>, Vec<[u32; 3]>);

fn parse_obj(text: &str) -> Result<Soup, MeshError> {
    let mut positions = Vec::new();
    let mut triangles = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        match toks.next() {
            Some("v") => {
                let x = parse_f64(toks.next(), line)?;
                let y = parse_f64(toks.next(), line)?;
                let z = parse_f64(toks.next(), line)?;
                positions.push(Point3::new(x, y, z));
            }
            Some("f") => {
                let mut face = Vec::with_capacity(3);
                for tok in toks {
                    let idx = tok.split('/').next().unwrap_or("");
                    let i: i64 = idx.parse().map_err(|_| MeshError::Parse {
                        line,
                        message: format!("bad face index {tok:?}"),
                    })?;
                    let resolved = match i {
                        i if i > 0 => i - 1,
                        i if i < 0 => positions.len() as i64 + i,
                        _ => {
                            return Err(MeshError::Parse {
                                line,
                                message: "face index 0".into(),
                            })
                        }
                    };
                    if resolved < 0 {
                        return Err(MeshError::Parse {
                            line,
                            message: format!("relative index {i} out of range"),
                        });
                    }
                    face.push(resolved as u32);
                }
                if face.len() != 3 {
                    return Err(MeshError::NonTriangularFace {
                        line,
                        corners: face.len(),
                    });
                }
                triangles.push([face[0], face[1], face[2]]);
            }
            _ => {}
        }
    }
    Ok((positions, triangles))
}

fn parse_off(text: &str) -> Result<Soup, MeshError> {
    // tokens with their line numbers, comments stripped
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first_line, header) = lines.next().ok_or(MeshError::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let rest_of_header = header
        .strip_prefix("OFF")
        .ok_or(MeshError::Parse {
            line: first_line,
            message: "missing OFF header".into(),
        })?
        .trim();
    let (count_line, counts) = if rest_of_header.is_empty() {
        lines.next().ok_or(MeshError::Parse {
            line: first_line,
            message: "missing counts".into(),
        })?
    } else {
        (first_line, rest_of_header)
    };
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse())
        .collect::<Result<_, _>>()
        .map_err(|_| MeshError::Parse {
            line: count_line,
            message: "bad counts".into(),
        })?;
    if counts.len() < 2 {
        return Err(MeshError::Parse {
            line: count_line,
            message: "expected vertex and face counts".into(),
        });
    }
    let (nv, nf) = (counts[0], counts[1]);
    let mut positions = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, l) = lines.next().ok_or(MeshError::Parse {
            line: count_line,
            message: "truncated vertex list".into(),
        })?;
        let mut toks = l.split_whitespace();
        let x = parse_f64(toks.next(), line)?;
        let y = parse_f64(toks.next(), line)?;
        let z = parse_f64(toks.next(), line)?;
        positions.push(Point3::new(x, y, z));
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (line, l) = lines.next().ok_or(MeshError::Parse {
            line: count_line,
            message: "truncated face list".into(),
        })?;
        let vals: Vec<u32> = l
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<Result<_, _>>()
            .map_err(|_| MeshError::Parse {
                line,
                message: "bad face".into(),
            })?;
        let k = *vals.first().ok_or(MeshError::Parse {
            line,
            message: "empty face".into(),
        })? as usize;
        if k != 3 {
            return Err(MeshError::NonTriangularFace { line, corners: k });
        }
        if vals.len() < 4 {
            return Err(MeshError::Parse {
                line,
                message: "face has too few indices".into(),
            });
        }
        triangles.push([vals[1], vals[2], vals[3]]);
    }
    Ok((positions, triangles))
}

fn parse_stl(bytes: &[u8]) -> Result<Soup, MeshError> {
    let looks_ascii = bytes.starts_with(b"solid")
        && std::str::from_utf8(bytes)
            .map(|s| s.contains("facet"))
            .unwrap_or(false);
    let corners = if looks_ascii {
        parse_stl_ascii(std::str::from_utf8(bytes).unwrap())?
    } else {
        parse_stl_binary(bytes)?
    };
    // weld by exact coordinate equality
    let mut index: HashMap<[u32; 3], u32> = HashMap::new();
    let mut positions = Vec::new();
    let mut triangles = Vec::with_capacity(corners.len());
    for tri in corners {
        let mut ids = [0u32; 3];
        for (k, p) in tri.iter().enumerate() {
            let key = p.map(f32::to_bits);
            ids[k] = *index.entry(key).or_insert_with(|| {
                positions.push(Point3::new(p[0] as f64, p[1] as f64, p[2] as f64));
                (positions.len() - 1) as u32
            });
        }
        triangles.push(ids);
    }
    Ok((positions, triangles))
}

fn parse_stl_binary(bytes: &[u8]) -> Result<Vec<[[f32; 3]; 3]>, MeshError> {
    if bytes.len() < 84 {
        return Err(MeshError::Parse {
            line: 0,
            message: "binary STL shorter than its header".into(),
        });
    }
    let n = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    if bytes.len() < 84 + 50 * n {
        return Err(MeshError::Parse {
            line: 0,
            message: format!("binary STL truncated: {n} facets declared"),
        });
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let rec = &bytes[84 + 50 * i..84 + 50 * (i + 1)];
        let f = |o: usize| f32::from_le_bytes(rec[o..o + 4].try_into().unwrap());
        // skip the 12-byte normal
        let mut tri = [[0f32; 3]; 3];
        for (v, corner) in tri.iter_mut().enumerate() {
            for (k, c) in corner.iter_mut().enumerate() {
                *c = f(12 + 12 * v + 4 * k);
            }
        }
        out.push(tri);
    }
    Ok(out)
}

fn parse_stl_ascii(text: &str) -> Result<Vec<[[f32; 3]; 3]>, MeshError> {
    let mut out = Vec::new();
    let mut current: Vec<[f32; 3]> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let mut toks = raw.split_whitespace();
        match toks.next() {
            Some("vertex") => {
                let mut p = [0f32; 3];
                for c in &mut p {
                    let t = toks.next().ok_or(MeshError::Parse {
                        line,
                        message: "missing coordinate".into(),
                    })?;
                    *c = t.parse().map_err(|_| MeshError::Parse {
                        line,
                        message: format!("bad number {t:?}"),
                    })?;
                }
                current.push(p);
            }
            Some("endloop") => {
                if current.len() != 3 {
                    return Err(MeshError::NonTriangularFace {
                        line,
                        corners: current.len(),
                    });
                }
                out.push([current[0], current[1], current[2]]);
                current.clear();
            }
            _ => {}
        }
    }
    Ok(out)
}

/// Writes the live part of the mesh as OBJ with compacted 1-based indices.
pub fn write_obj<W: Write>(mesh: &HalfEdgeMesh, mut out: W) -> std::io::Result<()> {
    let (positions, triangles) = mesh.to_triangles();
    for p in &positions {
        writeln!(out, "v {} {} {}", p.x, p.y, p.z)?;
    }
    for t in &triangles {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}

pub fn write_off<W: Write>(mesh: &HalfEdgeMesh, mut out: W) -> std::io::Result<()> {
    let (positions, triangles) = mesh.to_triangles();
    writeln!(out, "OFF")?;
    writeln!(out, "{} {} 0", positions.len(), triangles.len())?;
    for p in &positions {
        writeln!(out, "{} {} {}", p.x, p.y, p.z)?;
    }
    for t in &triangles {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}
