//! Quadrature and summation helpers shared by the integration routes.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// Gauss-Legendre rule stored as node/weight pairs on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct Rule {
    pairs: Vec<(f64, f64)>,
}

impl Rule {
    pub fn new(n: usize) -> Self {
        let n = NonZeroUsize::new(n.max(1)).unwrap();
        let pairs = GaussLegendre::new(n).as_node_weight_pairs().to_vec();
        Rule { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.pairs.iter().map(move |&(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mut acc = NeumaierSum::default();
        for (x, w) in self.mapped(a, b) {
            acc.add(w * f(x));
        }
        acc.total()
    }
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = Rule::new(5);
        let v = rule.integrate(0.0, 2.0, |x| x.powi(9));
        assert!((v - 2f64.powi(10) / 10.0).abs() < 1e-11);
    }

    #[test]
    fn neumaier_recovers_small_terms() {
        let s: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.total(), 2.0);
    }
}
