use crate::error::{Error, Result};

/// Largest rule order accepted by the rule constructors.
pub const MAX_RULE_ORDER: usize = 128;

/// A fixed quadrature rule: strictly increasing nodes with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    fn from_pairs(mut pairs: Vec<(f64, f64)>) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Σ wᵢ f(xᵢ).
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_RULE_ORDER {
        return Err(Error::invalid(format!(
            "quadrature order must be in 1..={MAX_RULE_ORDER}, got {order}"
        )));
    }
    Ok(())
}

const NEWTON_MAX_ITER: usize = 100;

/// Orthonormal Hermite recurrence at `z`: returns (p_n, p_{n-1}).
fn hermite_pair(n: usize, z: f64) -> (f64, f64) {
    // π^{-1/4}
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let mut p1 = PIM4;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, p2)
}

/// Gauss-Hermite rule for ∫ e^{−t²} f(t) dt.
///
/// Nodes are the roots of the physicists' Hermite polynomial H_order, found
/// by Newton iteration on the orthonormal recurrence from asymptotic starting
/// guesses; the result is deterministic.
pub fn gauss_hermite_rule(order: usize) -> Result<QuadratureRule> {
    check_order(order)?;
    let n = order;
    let nf = n as f64;
    let half = n.div_ceil(2);
    let mut roots: Vec<f64> = Vec::with_capacity(half);
    let mut pairs = Vec::with_capacity(n);
    let mut z = 0.0;
    for i in 0..half {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * roots[0],
            3 => 1.91 * z - 0.91 * roots[1],
            _ => 2.0 * z - roots[i - 2],
        };
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p1, p2) = hermite_pair(n, z);
            let dp = (2.0 * nf).sqrt() * p2;
            let z_prev = z;
            z = z_prev - p1 / dp;
            if (z - z_prev).abs() <= 1e-14 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence {
                estimate: z,
                error_bound: f64::NAN,
                evaluations: NEWTON_MAX_ITER,
            });
        }
        let (_, p2) = hermite_pair(n, z);
        let dp = (2.0 * nf).sqrt() * p2;
        let w = 2.0 / (dp * dp);
        roots.push(z);
        if 2 * i + 1 == n {
            // Middle root of an odd-order rule is exactly zero.
            pairs.push((0.0, w));
        } else {
            pairs.push((z, w));
            pairs.push((-z, w));
        }
    }
    Ok(QuadratureRule::from_pairs(pairs))
}

/// Gauss-Laguerre rule for ∫₀^∞ e^{−x} f(x) dx.
pub fn gauss_laguerre_rule(order: usize) -> Result<QuadratureRule> {
    check_order(order)?;
    let n = order;
    let nf = n as f64;
    let mut roots: Vec<f64> = Vec::with_capacity(n);
    let mut pairs = Vec::with_capacity(n);
    let mut z = 0.0;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - roots[i - 2])
            }
        };
        let laguerre = |z: f64| {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
            }
            (p1, p2)
        };
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p1, p2) = laguerre(z);
            let dp = (nf * p1 - nf * p2) / z;
            let z_prev = z;
            z = z_prev - p1 / dp;
            if (z - z_prev).abs() <= 1e-14 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence {
                estimate: z,
                error_bound: f64::NAN,
                evaluations: NEWTON_MAX_ITER,
            });
        }
        let (p1, p2) = laguerre(z);
        let dp = (nf * p1 - nf * p2) / z;
        let w = -1.0 / (dp * nf * p2);
        roots.push(z);
        pairs.push((z, w));
    }
    Ok(QuadratureRule::from_pairs(pairs))
}
