//! File formats: spaces and net hierarchies as JSON, fillings as JSON lines,
//! functions as `id,value` CSV, problem and diagnostics records as JSON.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filling::{Edge, EdgeKind, FillingGraph, Uniformization, Vertex};
use crate::nets::NetHierarchy;
use crate::solver::Method;
use crate::space::{FiniteSpace, Metric};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricSpec {
    Euclidean,
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub points: Vec<Option<Vec<f64>>>,
    pub metric: MetricSpec,
    pub nu: Vec<f64>,
    pub boundary: Vec<bool>,
    pub pi: Vec<f64>,
    pub sigma: f64,
    #[serde(default)]
    pub rescaled: bool,
}

impl SpaceFile {
    pub fn from_space(space: &FiniteSpace) -> Self {
        SpaceFile {
            points: space.points().to_vec(),
            metric: match space.metric() {
                Metric::Euclidean => MetricSpec::Euclidean,
                Metric::Matrix(m) => MetricSpec::Matrix(m.clone()),
            },
            nu: space.nu().to_vec(),
            boundary: space.boundary_flags().to_vec(),
            pi: space.pi().to_vec(),
            sigma: space.sigma(),
            rescaled: space.is_rescaled(),
        }
    }

    pub fn into_space(self) -> Result<FiniteSpace> {
        let metric = match self.metric {
            MetricSpec::Euclidean => Metric::Euclidean,
            MetricSpec::Matrix(m) => Metric::Matrix(m),
        };
        FiniteSpace::new(self.points, metric, self.nu, self.boundary, self.pi, self.sigma, self.rescaled)
    }
}

pub fn space_to_json(space: &FiniteSpace) -> Result<String> {
    Ok(serde_json::to_string(&SpaceFile::from_space(space))?)
}

pub fn space_from_json(s: &str) -> Result<FiniteSpace> {
    serde_json::from_str::<SpaceFile>(s)?.into_space()
}

pub fn write_space(path: &Path, space: &FiniteSpace) -> Result<()> {
    std::fs::write(path, space_to_json(space)?)?;
    Ok(())
}

pub fn read_space(path: &Path) -> Result<FiniteSpace> {
    space_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_nets(path: &Path, nets: &NetHierarchy) -> Result<()> {
    std::fs::write(path, serde_json::to_string(nets)?)?;
    Ok(())
}

pub fn read_nets(path: &Path) -> Result<NetHierarchy> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// One line of a filling file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase")]
pub enum FillingRecord {
    Meta {
        alpha: f64,
        tau: f64,
        epsilon: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<f64>,
    },
    Vertex {
        id: usize,
        point: usize,
        level: usize,
    },
    Edge {
        id: usize,
        a: usize,
        b: usize,
        kind: EdgeKind,
        d_eps_length: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mu_beta_mass: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        conductance: Option<f64>,
    },
}

/// Writes the filling as JSON lines; edge masses and conductances are
/// included when a uniformization (and `p`) is supplied.
pub fn write_filling<W: Write>(
    mut out: W,
    filling: &FillingGraph,
    uni: Option<(&Uniformization, f64)>,
) -> Result<()> {
    let line = |out: &mut W, r: &FillingRecord| -> Result<()> {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
        Ok(())
    };
    let conductances = match uni {
        Some((u, p)) => Some(u.conductances(p)?),
        None => None,
    };
    line(
        &mut out,
        &FillingRecord::Meta {
            alpha: filling.alpha,
            tau: filling.tau,
            epsilon: filling.epsilon(),
            beta: uni.map(|(u, _)| u.beta),
            p: uni.map(|(_, p)| p),
        },
    )?;
    for (id, v) in filling.vertices().iter().enumerate() {
        line(&mut out, &FillingRecord::Vertex { id, point: v.point, level: v.level })?;
    }
    for (id, e) in filling.edges().iter().enumerate() {
        line(
            &mut out,
            &FillingRecord::Edge {
                id,
                a: e.a,
                b: e.b,
                kind: e.kind,
                d_eps_length: filling.eps_length(id),
                mu_beta_mass: uni.map(|(u, _)| u.edges[id].mu_beta_mass),
                conductance: conductances.as_ref().map(|c| c[id]),
            },
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a filling written by [`write_filling`]; derived columns are ignored.
pub fn read_filling<R: Read>(input: R) -> Result<FillingGraph> {
    let mut meta = None;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (k, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<FillingRecord>(&line)? {
            FillingRecord::Meta { alpha, tau, .. } => meta = Some((alpha, tau)),
            FillingRecord::Vertex { id, point, level } => {
                if id != vertices.len() {
                    return Err(Error::param(format!("line {}: vertex ids must be consecutive", k + 1)));
                }
                vertices.push(Vertex { point, level });
            }
            FillingRecord::Edge { a, b, kind, .. } => edges.push(Edge { a, b, kind }),
        }
    }
    let (alpha, tau) = meta.ok_or_else(|| Error::param("filling file has no meta record"))?;
    FillingGraph::from_parts(alpha, tau, vertices, edges)
}

pub fn save_filling(path: &Path, filling: &FillingGraph, uni: Option<(&Uniformization, f64)>) -> Result<()> {
    write_filling(BufWriter::new(File::create(path)?), filling, uni)
}

pub fn load_filling(path: &Path) -> Result<FillingGraph> {
    read_filling(File::open(path)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    id: usize,
    value: f64,
}

/// Writes `id,value` rows with a header.
pub fn write_function<W: Write>(out: W, ids: &[usize], values: &[f64]) -> Result<()> {
    if ids.len() != values.len() {
        return Err(Error::param("ids and values differ in length"));
    }
    let mut w = csv::Writer::from_writer(out);
    for (&id, &value) in ids.iter().zip(values) {
        w.serialize(Row { id, value })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_function<R: Read>(input: R) -> Result<Vec<(usize, f64)>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in r.deserialize() {
        let row: Row = row?;
        out.push((row.id, row.value));
    }
    Ok(out)
}

/// Arranges `(id, value)` rows in the order of `ids`; every id must appear exactly once.
pub fn values_for(ids: &[usize], rows: &[(usize, f64)]) -> Result<Vec<f64>> {
    let mut slot = std::collections::HashMap::with_capacity(ids.len());
    for (k, &id) in ids.iter().enumerate() {
        slot.insert(id, k);
    }
    let mut values = vec![f64::NAN; ids.len()];
    for &(id, v) in rows {
        let k = *slot.get(&id).ok_or_else(|| Error::param(format!("id {id} is not expected here")))?;
        if !values[k].is_nan() {
            return Err(Error::param(format!("id {id} appears twice")));
        }
        values[k] = v;
    }
    if let Some(k) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::param(format!("no value for id {}", ids[k])));
    }
    Ok(values)
}

pub fn save_function(path: &Path, ids: &[usize], values: &[f64]) -> Result<()> {
    write_function(BufWriter::new(File::create(path)?), ids, values)
}

pub fn load_function(path: &Path, ids: &[usize]) -> Result<Vec<f64>> {
    values_for(ids, &read_function(File::open(path)?)?)
}

/// Dirichlet problem description consumed by the `solve` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub p: f64,
    pub theta: f64,
    pub f_csv: Option<String>,
    #[serde(rename = "G_csv")]
    pub g_csv: Option<String>,
    #[serde(default)]
    pub band_width: Option<f64>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub method: Option<Method>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub method: Method,
    pub converged: bool,
    pub el_residual: f64,
}
