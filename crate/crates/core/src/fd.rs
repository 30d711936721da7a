//! Central finite differences on uniform grids. These are the verification
//! path: residual checks differentiate sampled data here instead of reusing
//! the analytic derivative engine.

use num_complex::Complex64;

const FIRST_5: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
const SECOND_5: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
const FIRST_7: [f64; 7] = [
    -1.0 / 60.0, 9.0 / 60.0, -45.0 / 60.0, 0.0, 45.0 / 60.0, -9.0 / 60.0, 1.0 / 60.0,
];
const SECOND_7: [f64; 7] = [
    2.0 / 180.0, -27.0 / 180.0, 270.0 / 180.0, -490.0 / 180.0, 270.0 / 180.0, -27.0 / 180.0,
    2.0 / 180.0,
];
const THIRD_7: [f64; 7] = [0.125, -1.0, 1.625, 0.0, -1.625, 1.0, -0.125];

/// Stencil to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    First5,
    Second5,
    First7,
    Second7,
    Third7,
}

impl Stencil {
    fn weights(self) -> (&'static [f64], i32) {
        match self {
            Stencil::First5 => (&FIRST_5, 1),
            Stencil::Second5 => (&SECOND_5, 2),
            Stencil::First7 => (&FIRST_7, 1),
            Stencil::Second7 => (&SECOND_7, 2),
            Stencil::Third7 => (&THIRD_7, 3),
        }
    }

    pub fn half_width(self) -> usize {
        self.weights().0.len() / 2
    }
}

/// Applies `stencil` to samples with spacing `h`. Points whose stencil leaves
/// the data, or touches an undefined sample, come back as `None`.
pub fn differentiate(samples: &[Option<Complex64>], h: f64, stencil: Stencil) -> Vec<Option<Complex64>> {
    let (w, power) = stencil.weights();
    let half = w.len() / 2;
    let scale = h.powi(power);
    (0..samples.len())
        .map(|i| {
            if i < half || i + half >= samples.len() {
                return None;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, wj) in w.iter().enumerate() {
                if *wj != 0.0 {
                    acc += samples[i + j - half]? * *wj;
                } else {
                    samples[i + j - half]?;
                }
            }
            Some(acc / scale)
        })
        .collect()
}

/// Convenience wrapper for fully defined data.
pub fn differentiate_all(samples: &[Complex64], h: f64, stencil: Stencil) -> Vec<Option<Complex64>> {
    let wrapped: Vec<_> = samples.iter().map(|v| Some(*v)).collect();
    differentiate(&wrapped, h, stencil)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(f: impl Fn(f64) -> f64, h: f64, n: usize) -> Vec<Complex64> {
        (0..n).map(|i| Complex64::new(f(i as f64 * h), 0.0)).collect()
    }

    #[test]
    fn stencils_are_exact_on_low_degree_polynomials() {
        let h = 0.1;
        let s = sampled(|x| x.powi(4) - 2.0 * x.powi(3) + x, h, 21);
        let x: f64 = 1.0;
        let cases = [
            (Stencil::First5, 4.0 * x.powi(3) - 6.0 * x * x + 1.0),
            (Stencil::Second5, 12.0 * x * x - 12.0 * x),
            (Stencil::First7, 4.0 * x.powi(3) - 6.0 * x * x + 1.0),
            (Stencil::Second7, 12.0 * x * x - 12.0 * x),
            (Stencil::Third7, 24.0 * x - 12.0),
        ];
        for (stencil, exact) in cases {
            let d = differentiate_all(&s, h, stencil);
            assert!((d[10].unwrap().re - exact).abs() < 1e-9, "{stencil:?}");
        }
    }

    #[test]
    fn boundaries_are_trimmed() {
        let s = sampled(|x| x, 0.1, 10);
        let d = differentiate_all(&s, 0.1, Stencil::First7);
        assert!(d[..3].iter().all(Option::is_none));
        assert!(d[7..].iter().all(Option::is_none));
        assert!(d[3..7].iter().all(Option::is_some));
    }

    #[test]
    fn undefined_samples_poison_their_neighbourhood() {
        let mut s: Vec<_> = sampled(|x| x * x, 0.1, 20).into_iter().map(Some).collect();
        s[10] = None;
        let d = differentiate(&s, 0.1, Stencil::First5);
        assert!(d[8..=12].iter().all(Option::is_none));
        assert!(d[7].is_some() && d[13].is_some());
    }
}
