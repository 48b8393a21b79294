//! Functions tabulated on a finite 1-D grid.

use crate::error::{Error, Result};

/// A function tabulated on a strictly increasing grid of nodes. Evaluation
/// between nodes is piecewise linear; outside the grid it takes
/// `outside_value`. Integration uses the trapezoid rule over the nodes —
/// this convention is fixed, so two `GridFunction`s on the same nodes
/// integrate consistently.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
    outside_value: f64,
}

impl GridFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, outside_value: f64) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "grid length mismatch: {} nodes vs {} values",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.len() < 2 {
            return Err(Error::InvalidParameter(
                "grid needs at least two nodes".into(),
            ));
        }
        if !nodes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "grid nodes must be strictly increasing".into(),
            ));
        }
        if nodes.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "grid nodes and values must be finite".into(),
            ));
        }
        Ok(GridFunction {
            nodes,
            values,
            outside_value,
        })
    }

    /// Tabulate `f` on `count` uniform nodes over `[lo, hi]`.
    pub fn tabulate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, count: usize, outside: f64) -> Result<Self> {
        if !(lo < hi) || count < 2 {
            return Err(Error::InvalidParameter(
                "tabulation needs lo < hi and at least two nodes".into(),
            ));
        }
        let nodes: Vec<f64> = (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect();
        let values = nodes.iter().map(|&x| f(x)).collect();
        GridFunction::new(nodes, values, outside)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn outside_value(&self) -> f64 {
        self.outside_value
    }

    pub fn lo(&self) -> f64 {
        self.nodes[0]
    }

    pub fn hi(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Piecewise-linear evaluation; `outside_value` beyond the grid.
    pub fn eval(&self, x: f64) -> f64 {
        if x < self.lo() || x > self.hi() {
            return self.outside_value;
        }
        match self
            .nodes
            .binary_search_by(|n| n.partial_cmp(&x).unwrap())
        {
            Ok(i) => self.values[i],
            Err(i) => {
                let (x0, x1) = (self.nodes[i - 1], self.nodes[i]);
                let w = (x - x0) / (x1 - x0);
                self.values[i - 1] * (1.0 - w) + self.values[i] * w
            }
        }
    }

    /// Trapezoid integral over the grid span.
    pub fn integral(&self) -> f64 {
        self.nodes
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| 0.5 * (v[0] + v[1]) * (x[1] - x[0]))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridFunction::new(vec![0.0, 0.0], vec![1.0, 1.0], 0.0).is_err());
        assert!(GridFunction::new(vec![0.0, 1.0], vec![1.0], 0.0).is_err());
        assert!(GridFunction::new(vec![1.0], vec![1.0], 0.0).is_err());
    }

    #[test]
    fn eval_interpolates_and_respects_outside() {
        let g = GridFunction::new(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 0.0], -1.0).unwrap();
        assert_eq!(g.eval(0.5), 1.0);
        assert_eq!(g.eval(1.0), 2.0);
        assert_eq!(g.eval(3.0), -1.0);
    }

    #[test]
    fn trapezoid_linear_exact() {
        let g = GridFunction::tabulate(|x| 3.0 * x + 1.0, 0.0, 2.0, 9, 0.0).unwrap();
        assert!((g.integral() - 8.0).abs() < 1e-12);
    }
}
