use crate::error::{Error, Result};
use crate::types::check_finite;

/// Loess smoother over an index-based series.
///
/// At every index a degree-2 polynomial is fitted by weighted least squares to
/// the `span` nearest observations, with tricube weights
/// `(1 - (d / d_max)^3)^3`, and evaluated at that index. When the span exceeds
/// the series length the bandwidth is widened by half the excess. If too few
/// points carry positive weight for a quadratic, the local degree drops to 1
/// and then 0.
pub fn loess_smooth(values: &[f64], span: usize) -> Result<Vec<f64>> {
    if span < 2 {
        return Err(Error::InvalidParameter {
            name: "span",
            reason: format!("must be at least 2, got {span}"),
        });
    }
    check_finite(values)?;
    let n = values.len();
    if n <= 1 {
        return Ok(values.to_vec());
    }
    let q = span.min(n);
    let half = (q - 1) / 2;
    let widen = if span > n {
        (span - n) as f64 / 2.0
    } else {
        0.0
    };

    let mut out = Vec::with_capacity(n);
    let mut xs = Vec::with_capacity(q);
    let mut ws = Vec::with_capacity(q);
    for t in 0..n {
        let left = t.saturating_sub(half).min(n - q);
        let right = left + q - 1;
        let d_max = (t - left).max(right - t) as f64 + widen;
        xs.clear();
        ws.clear();
        for j in left..=right {
            let x = (j as f64 - t as f64) / d_max;
            xs.push(x);
            ws.push(tricube(x.abs()));
        }
        out.push(local_poly_at_zero(&xs, &values[left..=right], &ws, 2));
    }
    Ok(out)
}

#[inline]
pub(crate) fn tricube(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        let c = 1.0 - r * r * r;
        c * c * c
    }
}

/// Weighted least-squares polynomial of at most `degree` (≤ 2) in centred
/// abscissae `xs`, evaluated at zero. Falls back to lower degrees when the
/// weighted design is rank-deficient.
pub(crate) fn local_poly_at_zero(xs: &[f64], ys: &[f64], ws: &[f64], degree: usize) -> f64 {
    let support = ws.iter().filter(|&&w| w > 0.0).count();
    let mut degree = degree.min(2).min(support.saturating_sub(1));
    loop {
        if let Some(value) = solve_local(xs, ys, ws, degree) {
            return value;
        }
        if degree == 0 {
            // no positive weight at all: plain mean
            return ys.iter().sum::<f64>() / ys.len() as f64;
        }
        degree -= 1;
    }
}

fn solve_local(xs: &[f64], ys: &[f64], ws: &[f64], degree: usize) -> Option<f64> {
    let p = degree + 1;
    // normal equations: sum w x^(i+j) beta_j = sum w x^i y
    let mut moments = [0.0f64; 5];
    let mut rhs = [0.0f64; 3];
    for ((&x, &y), &w) in xs.iter().zip(ys).zip(ws) {
        if w <= 0.0 {
            continue;
        }
        let mut xp = 1.0;
        for (k, m) in moments.iter_mut().enumerate().take(2 * degree + 1) {
            *m += w * xp;
            if k < p {
                rhs[k] += w * xp * y;
            }
            xp *= x;
        }
    }
    if moments[0] <= 0.0 {
        return None;
    }
    let mut a = [[0.0f64; 4]; 3];
    for i in 0..p {
        for j in 0..p {
            a[i][j] = moments[i + j];
        }
        a[i][p] = rhs[i];
    }
    // Gaussian elimination with partial pivoting; reject near-singular systems.
    let norm = moments[0].abs().max(moments[2 * degree].abs());
    for col in 0..p {
        let pivot = (col..p).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[pivot][col].abs() <= 1e-10 * norm {
            return None;
        }
        a.swap(col, pivot);
        for row in col + 1..p {
            let factor = a[row][col] / a[col][col];
            for k in col..=p {
                a[row][k] -= factor * a[col][k];
            }
        }
    }
    let mut beta = [0.0f64; 3];
    for i in (0..p).rev() {
        let mut acc = a[i][p];
        for j in i + 1..p {
            acc -= a[i][j] * beta[j];
        }
        beta[i] = acc / a[i][i];
    }
    beta[0].is_finite().then_some(beta[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn reproduces_quadratic_with_full_span() {
        let x: Vec<f64> = (0..30)
            .map(|t| {
                let t = t as f64;
                0.5 * t * t - 3.0 * t + 7.0
            })
            .collect();
        let y = loess_smooth(&x, 30).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        let y = loess_smooth(&x, 45).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn reproduces_quadratic_with_local_span() {
        let x: Vec<f64> = (0..40).map(|t| (t as f64 - 20.0).powi(2)).collect();
        let y = loess_smooth(&x, 7).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn constant_unchanged() {
        let x = vec![3.25; 17];
        let y = loess_smooth(&x, 5).unwrap();
        for v in y {
            assert!((v - 3.25).abs() < 1e-12);
        }
    }

    #[test]
    fn span_below_two_rejected() {
        assert!(loess_smooth(&[1.0, 2.0, 3.0], 1).is_err());
    }

    #[test]
    fn tiny_series() {
        assert_eq!(loess_smooth(&[4.0], 3).unwrap(), vec![4.0]);
        let y = loess_smooth(&[1.0, 2.0], 2).unwrap();
        assert!(y.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn noisy_line_is_denoised() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut better = 0;
        for _ in 0..100 {
            let truth: Vec<f64> = (1..=100).map(|t| t as f64).collect();
            let noisy: Vec<f64> = truth
                .iter()
                .map(|t| t + Distribution::<f64>::sample(&StandardNormal, &mut rng))
                .collect::<Vec<f64>>();
            let smooth = loess_smooth(&noisy, 20).unwrap();
            let mse = |v: &[f64]| {
                v.iter().zip(&truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / 100.0
            };
            if mse(&smooth) < mse(&noisy) {
                better += 1;
            }
        }
        assert_eq!(better, 100);
    }
}
