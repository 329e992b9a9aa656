use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Strictly increasing positive radii containing r = 1 as a node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RadialGrid {
    nodes: Vec<f64>,
}

impl TryFrom<Vec<f64>> for RadialGrid {
    type Error = crate::error::Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        RadialGrid::from_nodes(v)
    }
}

impl From<RadialGrid> for Vec<f64> {
    fn from(g: RadialGrid) -> Self {
        g.nodes
    }
}

impl RadialGrid {
    /// Geometric grid 10^{j/per_decade} covering [r_min, r_max]; 1 is a node.
    pub fn geometric(r_min: f64, r_max: f64, per_decade: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_min < 1.0 && r_max > 1.0 && r_max.is_finite()) {
            return invalid(format!("grid needs 0 < r_min < 1 < r_max, got [{r_min}, {r_max}]"));
        }
        if per_decade < 3 {
            return invalid(format!("at least 3 nodes per decade required, got {per_decade}"));
        }
        let pd = per_decade as f64;
        let j0 = (r_min.log10() * pd).floor() as i64;
        let j1 = (r_max.log10() * pd).ceil() as i64;
        let nodes = (j0..=j1)
            .map(|j| if j == 0 { 1.0 } else { 10f64.powf(j as f64 / pd) })
            .collect();
        Self::from_nodes(nodes)
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return invalid("grid needs at least 3 nodes");
        }
        if nodes.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return invalid("grid nodes must be positive and finite");
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("grid nodes must be strictly increasing");
        }
        if !nodes.contains(&1.0) {
            return invalid("grid must contain r = 1 as a node");
        }
        let g = Self { nodes };
        if g.max_log_gap() > 1.0 / 3.0 + 1e-12 {
            return invalid("grid must have at least 3 nodes per decade");
        }
        Ok(g)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Index of the node r = 1.
    pub fn kink_index(&self) -> usize {
        self.nodes.iter().position(|&r| r == 1.0).unwrap_or(0)
    }

    /// Largest gap between neighbours in decades.
    pub fn max_log_gap(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| (w[1] / w[0]).log10())
            .fold(0.0, f64::max)
    }

    /// Smallest local density in nodes per decade.
    pub fn min_nodes_per_decade(&self) -> f64 {
        1.0 / self.max_log_gap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_contains_one_and_density() {
        let g = RadialGrid::geometric(1e-8, 1e3, 10).unwrap();
        assert!(g.nodes().contains(&1.0));
        assert!(g.r_min() <= 1e-8 && g.r_max() >= 1e3);
        assert!((g.min_nodes_per_decade() - 10.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_missing_one() {
        assert!(RadialGrid::from_nodes(vec![0.5, 0.9, 1.1, 2.0]).is_err());
        assert!(RadialGrid::from_nodes(vec![0.5, 1.0, 0.7]).is_err());
        assert!(RadialGrid::geometric(1e-3, 1e3, 2).is_err());
    }
}
