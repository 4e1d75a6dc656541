use crate::error::{Error, Result};

/// Box-Cox transform: `ln(x)` for `lambda == 0`, otherwise `(x^lambda - 1) / lambda`.
pub fn box_cox(values: &[f64], lambda: f64) -> Result<Vec<f64>> {
    values
        .iter()
        .enumerate()
        .map(|(index, &x)| {
            let y = box_cox_value(x, lambda);
            if y.is_finite() {
                Ok(y)
            } else {
                Err(Error::BoxCoxDomain {
                    index,
                    value: x,
                    lambda,
                })
            }
        })
        .collect()
}

/// Inverse Box-Cox: `exp(x')` for `lambda == 0`, otherwise `(lambda x' + 1)^(1/lambda)`.
pub fn inverse_box_cox(values: &[f64], lambda: f64) -> Result<Vec<f64>> {
    values
        .iter()
        .enumerate()
        .map(|(index, &x)| {
            let base = lambda * x + 1.0;
            let y = inverse_box_cox_value(x, lambda);
            if (lambda != 0.0 && base <= 0.0) || !y.is_finite() {
                Err(Error::InverseBoxCoxDomain {
                    index,
                    value: x,
                    lambda,
                })
            } else {
                Ok(y)
            }
        })
        .collect()
}

#[inline]
pub(crate) fn box_cox_value(x: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        if x > 0.0 {
            x.ln()
        } else {
            f64::NAN
        }
    } else if lambda == 1.0 {
        x - 1.0
    } else {
        (x.powf(lambda) - 1.0) / lambda
    }
}

#[inline]
pub(crate) fn inverse_box_cox_value(x: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        x.exp()
    } else if lambda == 1.0 {
        x + 1.0
    } else {
        (lambda * x + 1.0).powf(1.0 / lambda)
    }
}

/// Box-Cox with inputs outside the domain clamped to its boundary.
pub(crate) fn box_cox_clamped(x: f64, lambda: f64) -> f64 {
    if lambda == 1.0 {
        return x - 1.0;
    }
    let floor = if lambda == 0.0 { 1e-10 } else { 0.0 };
    box_cox_value(x.max(floor), lambda)
}

/// Inverse Box-Cox mapping values below `-1/lambda` to zero.
pub(crate) fn inverse_box_cox_clamped(x: f64, lambda: f64) -> f64 {
    if lambda != 0.0 && lambda * x + 1.0 <= 0.0 {
        return 0.0;
    }
    inverse_box_cox_value(x, lambda)
}

/// Outcome of the Guerrero λ search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaEstimate {
    pub lambda: f64,
    /// The series had non-positive values or was too short, so λ = 1 was used.
    pub fallback: bool,
}

/// Chooses λ by Guerrero's method: split the series into consecutive blocks
/// of one seasonal cycle (two observations for non-seasonal data) and pick
/// the λ within `range` minimising the coefficient of variation of
/// `sd_b / mean_b^(1 - λ)` across blocks.
///
/// Ties resolve to the largest λ. A dense 101-point grid is refined with a
/// golden-section search around the best grid point.
pub fn guerrero_lambda(values: &[f64], period: usize, range: (f64, f64)) -> LambdaEstimate {
    const FALLBACK: LambdaEstimate = LambdaEstimate {
        lambda: 1.0,
        fallback: true,
    };
    let block = period.max(2);
    let blocks = values.len() / block;
    if blocks < 2 {
        return FALLBACK;
    }
    if values.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
        return FALLBACK;
    }

    // keep the most recent complete blocks
    let tail = &values[values.len() - blocks * block..];
    let stats: Vec<(f64, f64)> = tail
        .chunks_exact(block)
        .map(|chunk| {
            let mean = chunk.iter().sum::<f64>() / block as f64;
            let var = chunk.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (block - 1) as f64;
            (mean, var.sqrt())
        })
        .collect();

    let (lo, hi) = range;
    if stats.iter().all(|&(_, sd)| sd == 0.0) || lo >= hi {
        return LambdaEstimate {
            lambda: hi,
            fallback: false,
        };
    }

    let objective = |lambda: f64| -> f64 {
        let ratios: Vec<f64> = stats
            .iter()
            .map(|&(mean, sd)| sd / mean.powf(1.0 - lambda))
            .collect();
        coefficient_of_variation(&ratios)
    };

    const GRID: usize = 100;
    let step = (hi - lo) / GRID as f64;
    let mut best_lambda = hi;
    let mut best_value = objective(hi);
    for i in (0..GRID).rev() {
        let lambda = lo + step * i as f64;
        let value = objective(lambda);
        if value < best_value {
            best_value = value;
            best_lambda = lambda;
        }
    }

    let a = (best_lambda - step).max(lo);
    let b = (best_lambda + step).min(hi);
    let refined = golden_section(&objective, a, b, 1e-8);
    let refined_value = objective(refined);
    if refined_value < best_value {
        best_lambda = refined;
    }
    LambdaEstimate {
        lambda: best_lambda,
        fallback: false,
    }
}

fn coefficient_of_variation(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    var.sqrt() / mean
}

fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}
