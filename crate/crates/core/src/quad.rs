//! Composite Gauss–Legendre rules on the unit interval.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Gauss–Legendre nodes and weights mapped to `[0, 1]`.
#[derive(Clone, Debug)]
pub struct UnitRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl UnitRule {
    pub fn new(order: usize) -> Self {
        let order = NonZeroUsize::new(order).expect("quadrature order must be positive");
        let gl = GaussLegendre::new(order);
        let (nodes, weights) = gl
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .unzip();
        UnitRule { nodes, weights }
    }

    /// `(node, weight)` pairs of the composite rule on consecutive panels
    /// `[breaks[i], breaks[i+1]]`.
    pub fn composite_nodes(&self, breaks: &[f64]) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(breaks.len().saturating_sub(1) * self.nodes.len());
        for p in breaks.windows(2) {
            let h = p[1] - p[0];
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                out.push((p[0] + h * x, w * h));
            }
        }
        out
    }
}

/// Sorted, deduplicated breakpoints.
pub fn sorted_breaks(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        let r = UnitRule::new(4);
        let one: f64 = r
            .composite_nodes(&[1.0, 3.0])
            .iter()
            .map(|(x, w)| w * x.powi(7))
            .sum();
        assert!((one - (3f64.powi(8) - 1.0) / 8.0).abs() < 1e-10);
        let c: f64 = r
            .composite_nodes(&[0.0, 0.5, 2.0])
            .iter()
            .map(|(x, w)| w * x * x)
            .sum();
        assert!((c - 8.0 / 3.0).abs() < 1e-14);
    }
}
