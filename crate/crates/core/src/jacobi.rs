//! Gauss–Jacobi rules on [-1, 1] for the weight (1-x)^α (1+x)^β.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes in increasing order with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Same rule affinely mapped to [a, b] with the weight carried along.
    pub fn mapped(&self, a: f64, b: f64, weight_degree: f64) -> Rule {
        let half = 0.5 * (b - a);
        let scale = half.powf(1.0 + weight_degree);
        Rule {
            nodes: self.nodes.iter().map(|x| a + half * (x + 1.0)).collect(),
            weights: self.weights.iter().map(|w| w * scale).collect(),
        }
    }
}

/// ∫_{-1}^{1} (1-x)^α (1+x)^β dx.
pub fn jacobi_mass(alpha: f64, beta: f64) -> f64 {
    ((alpha + beta + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(alpha + beta + 2.0))
    .exp()
}

fn golub_welsch(m: usize, alpha: f64, beta: f64) -> Rule {
    assert!(alpha > -1.0 && beta > -1.0, "Jacobi exponents must exceed -1");
    let ab = alpha + beta;
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        let kf = k as f64;
        let a = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jac[(k, k)] = a;
        if k + 1 < m {
            let j = kf + 1.0;
            let b = if k == 0 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * j * (j + alpha) * (j + beta) * (j + ab)
                    / ((2.0 * j + ab).powi(2) * (2.0 * j + ab + 1.0) * (2.0 * j + ab - 1.0))
            };
            jac[(k, k + 1)] = b.sqrt();
            jac[(k + 1, k)] = b.sqrt();
        }
    }
    let mu0 = jacobi_mass(alpha, beta);
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|j| (eig.eigenvalues[j], mu0 * eig.eigenvectors[(0, j)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

fn chebyshev(m: usize) -> Rule {
    let mut nodes: Vec<f64> = (1..=m)
        .map(|k| ((2 * k - 1) as f64 * std::f64::consts::PI / (2 * m) as f64).cos())
        .collect();
    nodes.reverse();
    Rule {
        nodes,
        weights: vec![std::f64::consts::PI / m as f64; m],
    }
}

type Key = (u64, u64, usize);

fn cache() -> &'static Mutex<HashMap<Key, Arc<Rule>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Rule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// m-point Gauss–Jacobi rule, exact for polynomials of degree ≤ 2m-1. Cached.
pub fn gauss_jacobi(m: usize, alpha: f64, beta: f64) -> Arc<Rule> {
    assert!(m > 0, "rule needs at least one node");
    let key = (alpha.to_bits(), beta.to_bits(), m);
    if let Some(r) = cache().lock().expect("rule cache").get(&key) {
        return Arc::clone(r);
    }
    let rule = if alpha == -0.5 && beta == -0.5 {
        chebyshev(m)
    } else {
        golub_welsch(m, alpha, beta)
    };
    let rule = Arc::new(rule);
    cache().lock().expect("rule cache").insert(key, Arc::clone(&rule));
    rule
}

pub fn gauss_legendre(m: usize) -> Arc<Rule> {
    gauss_jacobi(m, 0.0, 0.0)
}

/// Composite Gauss–Legendre on [a, b] with `panels` equal panels of `order` points.
pub fn composite(a: f64, b: f64, panels: usize, order: usize, f: impl Fn(f64) -> f64) -> f64 {
    let gl = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
            total += 0.5 * h * w * f(lo + 0.5 * h * (x + 1.0));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_monomials() {
        let r = gauss_legendre(6);
        for k in 0..12 {
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((r.integrate(|x| x.powi(k)) - exact).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn jacobi_mass_matches_weights() {
        for &(a, b) in &[(0.5, 0.5), (0.0, -0.5), (1.0, 0.0), (-0.5, -0.5), (0.5, -0.5)] {
            let r = gauss_jacobi(9, a, b);
            let s: f64 = r.weights.iter().sum();
            assert!((s - jacobi_mass(a, b)).abs() < 1e-12);
        }
    }

    #[test]
    fn chebyshev_first_moment_vanishes_and_second_is_half_pi() {
        let r = gauss_jacobi(5, -0.5, -0.5);
        assert!(r.integrate(|x| x).abs() < 1e-14);
        assert!((r.integrate(|x| x * x) - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
    }

    #[test]
    fn asymmetric_weight_against_closed_form() {
        // s = 1 + x turns the integral into a sum of half-integer powers.
        let r = gauss_jacobi(8, 1.0, -0.5);
        let exact = -0.4 * 2f64.powf(2.5);
        assert!((r.integrate(|x| x) - exact).abs() < 1e-13);
    }
}
