//! Regression oracles used to score designs by function recovery.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synthesis::PointSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Knn,
    TreeEnsemble,
}

impl std::str::FromStr for OracleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "knn" => Ok(OracleKind::Knn),
            "tree_ensemble" | "forest" | "trees" => Ok(OracleKind::TreeEnsemble),
            other => Err(Error::invalid(format!("unknown oracle '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub kind: OracleKind,
    /// Neighbour count (KNN).
    pub k: usize,
    /// Ensemble size and depth limit (trees).
    pub trees: usize,
    pub max_depth: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            kind: OracleKind::Knn,
            k: 5,
            trees: 100,
            max_depth: 32,
            seed: 0,
        }
    }
}

impl OracleConfig {
    pub fn forest(seed: u64) -> Self {
        Self {
            kind: OracleKind::TreeEnsemble,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.trees == 0 || self.max_depth == 0 {
            return Err(Error::invalid(
                "oracle needs k, trees and max_depth of at least 1",
            ));
        }
        Ok(())
    }
}

/// Fits the oracle on `(train, values)` and predicts at every test point.
pub fn fit_predict(
    train: &PointSet,
    values: &[f64],
    test: &PointSet,
    cfg: &OracleConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    if train.n() == 0 {
        return Err(Error::invalid("oracle needs at least one training point"));
    }
    if values.len() != train.n() {
        return Err(Error::invalid(format!(
            "{} training values for {} points",
            values.len(),
            train.n()
        )));
    }
    if test.d() != train.d() {
        return Err(Error::invalid(
            "training and test points differ in dimension",
        ));
    }
    Ok(match cfg.kind {
        OracleKind::Knn => knn(train, values, test, cfg.k),
        OracleKind::TreeEnsemble => Forest::grow(train, values, cfg).predict_all(test),
    })
}

/// Mean squared error of `predicted` against `truth`.
pub fn mse(predicted: &[f64], truth: &[f64]) -> f64 {
    predicted
        .iter()
        .zip(truth)
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / truth.len() as f64
}

fn knn(train: &PointSet, values: &[f64], test: &PointSet, k: usize) -> Vec<f64> {
    let k = k.min(train.n());
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(train.n());
    test.iter()
        .map(|x| {
            dist.clear();
            dist.extend(train.iter().enumerate().map(|(j, t)| {
                (
                    x.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(),
                    j,
                )
            }));
            // (distance, index) order breaks distance ties by lower index
            let by = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < dist.len() {
                dist.select_nth_unstable_by(k - 1, by);
                dist.truncate(k);
            }
            dist.sort_unstable_by(by);
            if dist[0].0 == 0.0 {
                return values[dist[0].1];
            }
            let (num, den) = dist.iter().fold((0.0, 0.0), |(num, den), &(s, j)| {
                let w = 1.0 / s.sqrt();
                (num + w * values[j], den + w)
            });
            num / den
        })
        .collect()
}

#[derive(Clone, Debug)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug)]
struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }
}

struct Grower<'a> {
    train: &'a PointSet,
    values: &'a [f64],
    features: usize,
    max_depth: usize,
    nodes: Vec<Node>,
}

impl Grower<'_> {
    fn grow(&mut self, idx: &mut [usize], depth: usize, rng: &mut ChaCha8Rng) -> usize {
        let at = self.nodes.len();
        let mean = idx.iter().map(|&i| self.values[i]).sum::<f64>() / idx.len() as f64;
        self.nodes.push(Node::Leaf(mean));
        if depth >= self.max_depth
            || idx.len() < 2
            || idx.iter().all(|&i| self.values[i] == self.values[idx[0]])
        {
            return at;
        }
        let Some((feature, threshold)) = self.best_split(idx, rng) else {
            return at;
        };
        let mut cut = 0;
        for j in 0..idx.len() {
            if self.train.point(idx[j])[feature] <= threshold {
                idx.swap(cut, j);
                cut += 1;
            }
        }
        let (lo, hi) = idx.split_at_mut(cut);
        let left = self.grow(lo, depth + 1, rng);
        let right = self.grow(hi, depth + 1, rng);
        self.nodes[at] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        at
    }

    /// Split minimizing the summed squared error over a random subset of
    /// features; thresholds are midpoints between distinct coordinates.
    fn best_split(&self, idx: &[usize], rng: &mut ChaCha8Rng) -> Option<(usize, f64)> {
        let d = self.train.d();
        let mut best: Option<(f64, usize, f64)> = None;
        let mut order: Vec<(f64, f64)> = Vec::with_capacity(idx.len());
        for feature in sample(rng, d, self.features).into_iter() {
            order.clear();
            order.extend(
                idx.iter()
                    .map(|&i| (self.train.point(i)[feature], self.values[i])),
            );
            order.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (total, total_sq) = order
                .iter()
                .fold((0.0, 0.0), |(s, q), &(_, y)| (s + y, q + y * y));
            let n = order.len() as f64;
            let (mut s, mut q) = (0.0, 0.0);
            for j in 0..order.len() - 1 {
                s += order[j].1;
                q += order[j].1 * order[j].1;
                if order[j].0 == order[j + 1].0 {
                    continue;
                }
                let nl = (j + 1) as f64;
                let sse =
                    (q - s * s / nl) + ((total_sq - q) - (total - s) * (total - s) / (n - nl));
                if best.is_none_or(|(b, _, _)| sse < b) {
                    best = Some((sse, feature, 0.5 * (order[j].0 + order[j + 1].0)));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

struct Forest {
    trees: Vec<Tree>,
}

impl Forest {
    /// Trees on bootstrap resamples with `ceil(sqrt(d))` candidate features
    /// per split.
    fn grow(train: &PointSet, values: &[f64], cfg: &OracleConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let n = train.n();
        let features = ((train.d() as f64).sqrt().ceil() as usize).clamp(1, train.d());
        let trees = (0..cfg.trees)
            .map(|_| {
                let mut idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                let mut grower = Grower {
                    train,
                    values,
                    features,
                    max_depth: cfg.max_depth,
                    nodes: Vec::new(),
                };
                grower.grow(&mut idx, 0, &mut rng);
                Tree {
                    nodes: grower.nodes,
                }
            })
            .collect();
        Self { trees }
    }

    fn predict_all(&self, test: &PointSet) -> Vec<f64> {
        test.iter()
            .map(|x| self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64)
            .collect()
    }
}
