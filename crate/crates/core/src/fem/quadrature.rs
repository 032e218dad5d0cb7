/// Symmetric triangle rule in barycentric coordinates; weights sum to 1 and are scaled by
/// the triangle area when used.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `∫_T f` for a triangle of the given area, `f` taking barycentric coordinates.
    pub fn integrate(&self, area: f64, mut f: impl FnMut(&[f64; 3]) -> f64) -> f64 {
        area * self.points.iter().zip(&self.weights).map(|(l, w)| w * f(l)).sum::<f64>()
    }
}

/// Seven-point rule exact for polynomials of total degree ≤ 5.
pub fn quadrature_degree5() -> QuadratureRule {
    let s = 15f64.sqrt();
    let (a1, b1) = ((6.0 - s) / 21.0, (9.0 + 2.0 * s) / 21.0);
    let (a2, b2) = ((6.0 + s) / 21.0, (9.0 - 2.0 * s) / 21.0);
    let (w1, w2) = ((155.0 - s) / 1200.0, (155.0 + s) / 1200.0);
    let third = 1.0 / 3.0;
    QuadratureRule {
        points: vec![
            [third, third, third],
            [b1, a1, a1],
            [a1, b1, a1],
            [a1, a1, b1],
            [b2, a2, a2],
            [a2, b2, a2],
            [a2, a2, b2],
        ],
        weights: vec![0.225, w1, w1, w1, w2, w2, w2],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn weights_are_positive_and_sum_to_one() {
        let q = quadrature_degree5();
        assert!(q.weights.iter().all(|&w| w > 0.0));
        assert!((q.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        for l in &q.points {
            assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn monomials_up_to_degree_five_are_exact() {
        let q = quadrature_degree5();
        for a in 0..=5u32 {
            for b in 0..=(5 - a) {
                let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                let got = q.integrate(0.5, |l| l[1].powi(a as i32) * l[2].powi(b as i32));
                assert!((got - exact).abs() <= 1e-14, "x^{a} y^{b}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let q = quadrature_degree5();
        assert!((q.integrate(0.5, |_| 1.0) - 0.5).abs() < 1e-15);
        assert!((q.integrate(0.5, |l| l[1].powi(5)) - 1.0 / 42.0).abs() < 1e-15);
        assert!((q.integrate(0.5, |l| l[1].powi(2) * l[2].powi(3)) - 1.0 / 420.0).abs() < 1e-15);
    }

    #[test]
    fn degree_six_is_not_exact() {
        let q = quadrature_degree5();
        let exact = factorial(6) / factorial(8);
        assert!((q.integrate(0.5, |l| l[1].powi(6)) - exact).abs() > 1e-6);
    }
}
