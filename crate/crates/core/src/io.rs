//! Edge-list and model-file formats.
//!
//! Edge list, one edge per line: `tail head p [group]`. Header lines are
//! `#nodes N` (required) and `#weight v w` (optional, default weight 1);
//! any other line starting with `#` is a comment.
//!
//! A model file is a JSON document naming the family and where the graph
//! lives, with paths relative to the model file:
//!
//! ```json
//! {"kind": "ic", "graph_path": "tree3.edges"}
//! {"kind": "mixture", "components": [{"path": "red.model", "weight": 0.5}, ...]}
//! ```
//!
//! LT models take edge probabilities as the weights `b_uv` unless an inline
//! `lt_weights` array (one entry per edge) overrides them.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::model::{DiffusionModel, Family, LiveEdgeModel};

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut n = None;
    let mut edges = Vec::new();
    let mut weights: Vec<(usize, f64, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        if let Some(header) = line.strip_prefix('#') {
            let mut parts = header.split_whitespace();
            match parts.next() {
                Some("nodes") => {
                    let v = parts.next().ok_or_else(|| err("#nodes needs a count".into()))?;
                    n = Some(v.parse::<usize>().map_err(|e| err(format!("bad node count: {e}")))?);
                }
                Some("weight") => {
                    let (Some(v), Some(w), None) = (parts.next(), parts.next(), parts.next()) else {
                        return Err(err("expected `#weight v w`".into()));
                    };
                    let v = v.parse().map_err(|e| err(format!("bad node id: {e}")))?;
                    let w = w.parse().map_err(|e| err(format!("bad weight: {e}")))?;
                    weights.push((v, w, line_no));
                }
                _ => {}
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(err(format!("expected `tail head p [group]`, got {} fields", fields.len())));
        }
        let tail = fields[0].parse().map_err(|e| err(format!("bad tail: {e}")))?;
        let head = fields[1].parse().map_err(|e| err(format!("bad head: {e}")))?;
        let p = fields[2].parse().map_err(|e| err(format!("bad probability: {e}")))?;
        let group = match fields.get(3) {
            Some(g) => Some(g.parse().map_err(|e| err(format!("bad group id: {e}")))?),
            None => None,
        };
        edges.push(Edge { tail, head, p, group });
    }
    let n = n.ok_or_else(|| Error::Parse { line: 0, msg: "missing `#nodes N` header".into() })?;
    let mut w = vec![1.0; n];
    for (v, x, line) in weights {
        if v >= n {
            return Err(Error::Parse { line, msg: format!("weight for node {v} but only {n} nodes") });
        }
        w[v] = x;
    }
    Graph::new(n, edges, w)
}

pub fn format_edge_list(graph: &Graph) -> String {
    let mut out = format!("#nodes {}\n", graph.n());
    for (v, &w) in graph.weights().iter().enumerate() {
        if w != 1.0 {
            let _ = writeln!(out, "#weight {v} {w}");
        }
    }
    for e in graph.edges() {
        match e.group {
            Some(g) => writeln!(out, "{} {} {} {g}", e.tail, e.head, e.p),
            None => writeln!(out, "{} {} {}", e.tail, e.head, e.p),
        }
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::File { path: path.display().to_string(), source })
}

pub fn read_edge_list(path: &Path) -> Result<Graph> {
    parse_edge_list(&read_text(path)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentRef {
    pub path: String,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<ComponentRef>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lt_weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    base.parent().unwrap_or(Path::new(".")).join(rel)
}

pub fn load_model(path: &Path) -> Result<DiffusionModel> {
    let file: ModelFile = serde_json::from_str(&read_text(path)?)?;
    let graph = || -> Result<Graph> {
        let rel = file
            .graph_path
            .as_deref()
            .ok_or_else(|| Error::InvalidModel(format!("{} model needs graph_path", file.kind)))?;
        read_edge_list(&resolve(path, rel))
    };
    match file.kind.as_str() {
        "ic" => Ok(DiffusionModel::ic(graph()?)),
        "lt" => {
            let g = graph()?;
            let g = match &file.lt_weights {
                None => g,
                Some(ws) if ws.len() == g.m() => {
                    let edges = g.edges().iter().zip(ws).map(|(e, &w)| Edge { p: w, ..*e }).collect();
                    Graph::new(g.n(), edges, g.weights().to_vec())?
                }
                Some(ws) => {
                    return Err(Error::InvalidModel(format!("lt_weights has {} entries for {} edges", ws.len(), g.m())))
                }
            };
            DiffusionModel::lt(g)
        }
        "bdep" => {
            let b = file.b.ok_or_else(|| Error::InvalidModel("bdep model needs b".into()))?;
            DiffusionModel::bdep(graph()?, b)
        }
        "mixture" => {
            let comps = file
                .components
                .as_ref()
                .ok_or_else(|| Error::InvalidModel("mixture model needs components".into()))?;
            let parts = comps
                .iter()
                .map(|c| Ok((load_model(&resolve(path, &c.path))?, c.weight)))
                .collect::<Result<Vec<_>>>()?;
            DiffusionModel::mixture(parts)
        }
        other => Err(Error::InvalidModel(format!("unknown model kind `{other}`"))),
    }
}

fn file_name(path: &Path) -> Result<String> {
    path.file_name()
        .and_then(|s| s.to_str())
        .map(str::to_owned)
        .ok_or_else(|| Error::InvalidParameter(format!("bad output path {}", path.display())))
}

fn single_file(model: &LiveEdgeModel, graph_name: String) -> ModelFile {
    let (kind, b) = match model.family() {
        Family::Ic => ("ic", None),
        Family::Lt => ("lt", None),
        Family::Bdep { b } => ("bdep", Some(b)),
    };
    ModelFile { kind: kind.into(), graph_path: Some(graph_name), components: None, lt_weights: None, b }
}

fn write_json(path: &Path, file: &ModelFile) -> Result<()> {
    let mut text = serde_json::to_string_pretty(file)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Write `model` to `path` plus sibling edge-list files. Returns every file
/// written, model file first. Output is a pure function of the model.
pub fn save_model(model: &DiffusionModel, path: &Path) -> Result<Vec<PathBuf>> {
    let name = file_name(path)?;
    let stem = name.strip_suffix(".model").unwrap_or(&name).to_owned();
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut written = vec![path.to_path_buf()];
    match model {
        DiffusionModel::LiveEdge(m) => {
            let graph_name = format!("{stem}.edges");
            fs::write(dir.join(&graph_name), format_edge_list(m.graph()))?;
            write_json(path, &single_file(m, graph_name.clone()))?;
            written.push(dir.join(graph_name));
        }
        DiffusionModel::Mixture(_) => {
            let mut refs = Vec::new();
            for (i, (m, w)) in model.components().into_iter().enumerate() {
                let comp_name = format!("{stem}.c{i}.model");
                let graph_name = format!("{stem}.c{i}.edges");
                fs::write(dir.join(&graph_name), format_edge_list(m.graph()))?;
                write_json(&dir.join(&comp_name), &single_file(m, graph_name.clone()))?;
                written.push(dir.join(&comp_name));
                written.push(dir.join(graph_name));
                refs.push(ComponentRef { path: comp_name, weight: w });
            }
            let file = ModelFile { kind: "mixture".into(), graph_path: None, components: Some(refs), lt_weights: None, b: None };
            write_json(path, &file)?;
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gen_random_bdep, gen_random_ic, gen_random_lt, gen_two_world_mixture};

    #[test]
    fn edge_list_round_trip() {
        let m = gen_random_ic(7, 12, (0.1, 0.9), (0.5, 3.0), 4).unwrap();
        let DiffusionModel::LiveEdge(lm) = &m else { unreachable!() };
        let text = format_edge_list(lm.graph());
        let back = parse_edge_list(&text).unwrap();
        assert_eq!(&back, lm.graph());
        assert_eq!(format_edge_list(&back), text);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "#nodes 3\n# comment\n0 1 0.5\n1 x 0.5\n";
        match parse_edge_list(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_edge_list("0 1 0.5\n"), Err(Error::Parse { line: 0, .. })));
        assert!(parse_edge_list("#nodes 2\n0 5 0.5\n").is_err());
        assert!(parse_edge_list("#nodes 2\n#weight 1\n").is_err());
    }

    #[test]
    fn group_probability_must_agree() {
        assert!(parse_edge_list("#nodes 3\n0 1 0.5 7\n0 2 0.4 7\n").is_err());
        assert!(parse_edge_list("#nodes 3\n0 1 0.5 7\n0 2 0.5 7\n").is_ok());
    }

    #[test]
    fn models_round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let models = [
            gen_random_ic(6, 9, (0.1, 0.9), (1.0, 2.0), 1).unwrap(),
            gen_random_lt(6, 9, 2).unwrap(),
            gen_random_bdep(6, 9, 3, (0.2, 0.8), 3).unwrap(),
            gen_two_world_mixture().unwrap(),
        ];
        for (i, m) in models.iter().enumerate() {
            let path = dir.path().join(format!("m{i}.model"));
            let files = save_model(m, &path).unwrap();
            let first: Vec<Vec<u8>> = files.iter().map(|f| fs::read(f).unwrap()).collect();
            assert_eq!(&load_model(&path).unwrap(), m);
            save_model(m, &path).unwrap();
            let second: Vec<Vec<u8>> = files.iter().map(|f| fs::read(f).unwrap()).collect();
            assert_eq!(first, second);
        }
    }

    #[test]
    fn lt_weights_override_edge_probabilities() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("g.edges"), "#nodes 3\n0 2 0.9\n1 2 0.9\n").unwrap();
        let path = dir.path().join("lt.model");
        fs::write(&path, r#"{"kind": "lt", "graph_path": "g.edges"}"#).unwrap();
        assert!(load_model(&path).is_err());
        fs::write(&path, r#"{"kind": "lt", "graph_path": "g.edges", "lt_weights": [0.3, 0.6]}"#).unwrap();
        let m = load_model(&path).unwrap();
        let DiffusionModel::LiveEdge(lm) = &m else { unreachable!() };
        assert_eq!(lm.graph().edge(1).p, 0.6);
    }
}
