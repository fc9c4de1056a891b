//! Benchmark test functions on the unit cube and regular test grids.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synthesis::PointSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionKind {
    Alpine1,
    Ackley,
}

impl FunctionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FunctionKind::Alpine1 => "alpine1",
            FunctionKind::Ackley => "ackley",
        }
    }

    /// Native search box, identical on every axis.
    pub fn default_bounds(self) -> (f64, f64) {
        match self {
            FunctionKind::Alpine1 => (-10.0, 10.0),
            FunctionKind::Ackley => (-32.768, 32.768),
        }
    }
}

impl std::str::FromStr for FunctionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s
            .to_ascii_lowercase()
            .replace(['-', '_', ' ', '.'], "")
            .as_str()
        {
            "alpine1" | "alpinen1" | "alpine" => Ok(FunctionKind::Alpine1),
            "ackley" => Ok(FunctionKind::Ackley),
            other => Err(Error::invalid(format!(
                "unknown benchmark function '{other}'"
            ))),
        }
    }
}

/// A test function evaluated on `[0, 1]^d`, mapped affinely onto `bounds`.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkFunction {
    kind: FunctionKind,
    bounds: Vec<(f64, f64)>,
}

impl BenchmarkFunction {
    pub fn new(kind: FunctionKind, d: usize) -> Result<Self> {
        Self::with_bounds(kind, vec![kind.default_bounds(); d])
    }

    pub fn with_bounds(kind: FunctionKind, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::invalid(
                "benchmark function needs at least one dimension",
            ));
        }
        if let Some((lo, hi)) = bounds
            .iter()
            .find(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi))
        {
            return Err(Error::invalid(format!("bad bounds [{lo}, {hi}]")));
        }
        Ok(Self { kind, bounds })
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn d(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Value at unit-cube point `u`.
    pub fn eval(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.d() {
            return Err(Error::invalid(format!(
                "point has {} coordinates, function has {}",
                u.len(),
                self.d()
            )));
        }
        if let Some(c) = u.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::invalid(format!(
                "coordinate {c} outside the unit cube"
            )));
        }
        Ok(self.eval_unchecked(u))
    }

    pub(crate) fn eval_unchecked(&self, u: &[f64]) -> f64 {
        let x = u
            .iter()
            .zip(&self.bounds)
            .map(|(u, (lo, hi))| lo + u * (hi - lo));
        let d = self.d() as f64;
        match self.kind {
            FunctionKind::Alpine1 => x.map(|x| (x * x.sin() + 0.1 * x).abs()).sum(),
            FunctionKind::Ackley => {
                let (sq, cos) = x.fold((0.0, 0.0), |(s, c), x| {
                    (s + x * x, c + (2.0 * PI * x).cos())
                });
                -20.0 * (-0.2 * (sq / d).sqrt()).exp() - (cos / d).exp() + 20.0 + E
            }
        }
    }

    /// Values at every point of `points`.
    pub fn eval_all(&self, points: &PointSet) -> Result<Vec<f64>> {
        if points.d() != self.d() {
            return Err(Error::invalid(format!(
                "points are {}-dimensional, function is {}",
                points.d(),
                self.d()
            )));
        }
        Ok(points.iter().map(|u| self.eval_unchecked(u)).collect())
    }
}

/// Smallest `m` with `m^d >= target`.
pub fn points_per_axis(target: usize, d: usize) -> usize {
    let mut m = (target as f64).powf(1.0 / d as f64).floor().max(1.0) as usize;
    while m.checked_pow(d as u32).is_some_and(|total| total < target) {
        m += 1;
    }
    m
}

/// Regular grid with `points_per_axis(target, d)` points per axis, endpoints
/// included (a single point per axis sits at the centre), and the function
/// values on it.
pub fn grid_test_set(f: &BenchmarkFunction, target: usize) -> Result<(PointSet, Vec<f64>)> {
    if target == 0 {
        return Err(Error::invalid("test grid needs at least one point"));
    }
    let d = f.d();
    let m = points_per_axis(target, d);
    let axis: Vec<f64> = if m == 1 {
        vec![0.5]
    } else {
        (0..m).map(|i| i as f64 / (m - 1) as f64).collect()
    };
    let total = m.pow(d as u32);
    let mut coords = Vec::with_capacity(total * d);
    for flat in 0..total {
        let mut rest = flat;
        let start = coords.len();
        coords.resize(start + d, 0.0);
        for p in (0..d).rev() {
            coords[start + p] = axis[rest % m];
            rest /= m;
        }
    }
    let points = PointSet::new(d, coords)?;
    let values = f.eval_all(&points)?;
    Ok((points, values))
}
