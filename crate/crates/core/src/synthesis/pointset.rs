use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pcf::PcfParams;

/// Provenance carried alongside a point set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointSetMeta {
    pub method: String,
    pub seed: Option<u64>,
    pub params: Option<PcfParams>,
}

/// `n` points in `[0, 1]^d`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    d: usize,
    coords: Vec<f64>,
    pub meta: PointSetMeta,
}

impl PointSet {
    pub fn new(d: usize, coords: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("point dimension must be at least 1"));
        }
        if coords.len() % d != 0 {
            return Err(Error::invalid(format!(
                "{} coordinates do not split into {d}-dimensional points",
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::invalid(format!(
                "coordinate {c} outside the unit cube"
            )));
        }
        Ok(Self {
            d,
            coords,
            meta: PointSetMeta::default(),
        })
    }

    pub fn with_meta(mut self, method: &str, seed: Option<u64>, params: Option<PcfParams>) -> Self {
        self.meta = PointSetMeta {
            method: method.to_string(),
            seed,
            params,
        };
        self
    }

    pub fn n(&self) -> usize {
        self.coords.len() / self.d
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.d)
    }

    /// Appends one point; it must lie in the unit cube.
    pub fn push(&mut self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::invalid("point has the wrong dimension"));
        }
        if x.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::invalid("point outside the unit cube"));
        }
        self.coords.extend_from_slice(x);
        Ok(())
    }

    /// One row per point, `d` comma-separated columns, no header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for p in self.iter() {
            let row: Vec<String> = p.iter().map(|c| c.to_string()).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut d = None;
        let mut coords = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| Error::invalid(format!("line {}: {e}", lineno + 1)))?;
            match d {
                None => d = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(Error::invalid(format!(
                        "line {}: expected {d} columns, got {}",
                        lineno + 1,
                        row.len()
                    )))
                }
                _ => {}
            }
            coords.extend(row);
        }
        let d = d.ok_or_else(|| Error::invalid("point CSV is empty"))?;
        PointSet::new(d, coords)
    }
}

/// Minimum Euclidean distance over all unordered pairs.
pub fn min_pairwise_distance(points: &PointSet) -> Result<f64> {
    if points.n() < 2 {
        return Err(Error::invalid("minimum distance needs at least two points"));
    }
    let mut best = f64::INFINITY;
    for i in 0..points.n() {
        let a = points.point(i);
        for j in (i + 1)..points.n() {
            let d2 = squared_distance(a, points.point(j));
            if d2 < best {
                best = d2;
            }
        }
    }
    Ok(best.sqrt())
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Structured-text sidecar written next to a point CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub n: usize,
    pub d: usize,
    pub method: String,
    pub seed: Option<u64>,
    pub min_distance: Option<f64>,
    pub final_objective: Option<f64>,
    pub params: Option<PcfParams>,
}

impl Sidecar {
    pub fn describe(points: &PointSet, final_objective: Option<f64>) -> Self {
        Self {
            n: points.n(),
            d: points.d(),
            method: points.meta.method.clone(),
            seed: points.meta.seed,
            min_distance: min_pairwise_distance(points).ok(),
            final_objective,
            params: points.meta.params,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("sidecar fields are always representable")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(format!("bad sidecar: {e}")))
    }
}
