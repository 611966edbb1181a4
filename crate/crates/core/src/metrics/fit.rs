use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least 3 distinct x values, got {0}")]
    TooFewPoints(usize),
    #[error("x and y lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("non-finite input value")]
    NonFinite,
}

/// Least-squares `(a, b, c)` for `a + b*x + c*x^2`.
///
/// The normal equations are solved on centered, scaled x and the result
/// mapped back to raw coefficients.
pub fn polyfit2(xs: &[f64], ys: &[f64]) -> Result<[f64; 3], FitError> {
    if xs.len() != ys.len() {
        return Err(FitError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(FitError::NonFinite);
    }
    let mut distinct = xs.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(FitError::TooFewPoints(distinct.len()));
    }
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let s = xs.iter().map(|x| (x - m).abs()).fold(0.0, f64::max);
    let us: Vec<f64> = xs.iter().map(|x| (x - m) / s).collect();

    let mut pw = [0.0f64; 5];
    let mut rhs = [0.0f64; 3];
    for (&u, &y) in us.iter().zip(ys) {
        let mut p = 1.0;
        for (k, slot) in pw.iter_mut().enumerate() {
            *slot += p;
            if k < 3 {
                rhs[k] += p * y;
            }
            p *= u;
        }
    }
    let mut a = [[0.0f64; 4]; 3];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = pw[i + j];
        }
        a[i][3] = rhs[i];
    }
    let [a0, b0, c0] = solve3(a);
    // back to raw x: u = (x - m) / s
    let c = c0 / (s * s);
    let b = b0 / s - 2.0 * c0 * m / (s * s);
    let a = a0 - b0 * m / s + c0 * m * m / (s * s);
    Ok([a, b, c])
}

/// Gaussian elimination with partial pivoting on an augmented 3x4 system.
fn solve3(mut a: [[f64; 4]; 3]) -> [f64; 3] {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        a.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let tail: f64 = (i + 1..3).map(|k| a[i][k] * x[k]).sum();
        x[i] = (a[i][3] - tail) / a[i][i];
    }
    x
}

pub fn polyval2(c: &[f64; 3], x: f64) -> f64 {
    c[0] + c[1] * x + c[2] * x * x
}
