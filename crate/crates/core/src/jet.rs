use num_complex::Complex64;

/// A complex function sampled at a point `x` together with its derivatives
/// `f(x), f'(x), ..., f^(n)(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexJet {
    pub x: f64,
    pub values: Vec<Complex64>,
}

impl ComplexJet {
    pub fn new(x: f64, values: Vec<Complex64>) -> Self {
        assert!(!values.is_empty(), "a jet carries at least the function value");
        Self { x, values }
    }

    /// Jet of a real function.
    pub fn real(x: f64, values: &[f64]) -> Self {
        Self::new(x, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(x: f64, value: Complex64, order: usize) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); order + 1];
        values[0] = value;
        Self { x, values }
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value(&self) -> Complex64 {
        self.values[0]
    }

    pub fn derivative(&self, n: usize) -> Complex64 {
        self.values[n]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Jet of the `n`-th derivative; its order drops by `n`.
    pub fn shifted(&self, n: usize) -> Self {
        Self::new(self.x, self.values[n..].to_vec())
    }

    pub fn truncated(&self, order: usize) -> Self {
        Self::new(self.x, self.values[..=order].to_vec())
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::new(self.x, self.values.iter().map(|v| v * factor).collect())
    }

    /// `(f g)^(n)` by the Leibniz rule, up to the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let binom = binomial_rows(order);
        let values = (0..=order)
            .map(|n| {
                (0..=n)
                    .map(|i| self.values[i] * other.values[n - i] * binom[n][i])
                    .sum()
            })
            .collect();
        Self::new(self.x, values)
    }

    /// `(f / g)^(n)`, solving `f = q g` order by order. `g(x)` must be non-zero.
    pub fn div(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let binom = binomial_rows(order);
        let g0 = other.values[0];
        let mut q: Vec<Complex64> = Vec::with_capacity(order + 1);
        for n in 0..=order {
            let mut acc = self.values[n];
            for i in 1..=n {
                acc -= other.values[i] * q[n - i] * binom[n][i];
            }
            q.push(acc / g0);
        }
        Self::new(self.x, q)
    }

    /// Logarithmic derivative `f'/f` as a jet of order `n - 1`.
    pub fn log_derivative(&self) -> Self {
        self.shifted(1).div(&self.truncated(self.order() - 1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self::new(
            self.x,
            (0..=order).map(|i| self.values[i] - other.values[i]).collect(),
        )
    }
}

/// Rows `0..=order` of Pascal's triangle.
pub(crate) fn binomial_rows(order: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let mut row = vec![1.0; n + 1];
        for i in 1..n {
            row[i] = rows[n - 1][i - 1] + rows[n - 1][i];
        }
        rows.push(row);
    }
    rows
}
