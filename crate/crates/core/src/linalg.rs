//! Small dense solves used by the quadrature derivation and the exponential
//! fitter. Gaussian elimination with partial pivoting is plenty at these
//! sizes (a handful of unknowns).

use num_complex::Complex64;

/// Solves `A x = b` in place for real `A` (row-major `n x n`). Returns the
/// solution and the pivot ratio `|max pivot| / |min pivot|` as a cheap
/// condition estimate, or `None` if a pivot vanishes.
pub fn solve_real(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<(Vec<f64>, f64)> {
    let n = b.len();
    let mut max_piv = 0.0f64;
    let mut min_piv = f64::INFINITY;
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col][col];
        if pivot.abs() == 0.0 {
            return None;
        }
        max_piv = max_piv.max(pivot.abs());
        min_piv = min_piv.min(pivot.abs());
        for row in col + 1..n {
            let factor = a[row][col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = b[i];
        for j in i + 1..n {
            sum -= a[i][j] * x[j];
        }
        x[i] = sum / a[i][i];
    }
    Some((x, max_piv / min_piv))
}

/// Complex analogue of [`solve_real`].
pub fn solve_complex(
    mut a: Vec<Vec<Complex64>>,
    mut b: Vec<Complex64>,
) -> Option<(Vec<Complex64>, f64)> {
    let n = b.len();
    let mut max_piv = 0.0f64;
    let mut min_piv = f64::INFINITY;
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&i, &j| {
            a[i][col]
                .norm_sqr()
                .partial_cmp(&a[j][col].norm_sqr())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col][col];
        if pivot.norm() == 0.0 {
            return None;
        }
        max_piv = max_piv.max(pivot.norm());
        min_piv = min_piv.min(pivot.norm());
        for row in col + 1..n {
            let factor = a[row][col] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
            let rhs = b[col];
            b[row] -= factor * rhs;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut sum = b[i];
        for j in i + 1..n {
            sum -= a[i][j] * x[j];
        }
        x[i] = sum / a[i][i];
    }
    Some((x, max_piv / min_piv))
}

/// Least-squares solve of an overdetermined real system via the normal
/// equations; fine at these sizes and conditioning.
pub fn lstsq_real(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let rows = a.len();
    let cols = a.first()?.len();
    let mut ata = vec![vec![0.0; cols]; cols];
    let mut atb = vec![0.0; cols];
    for r in 0..rows {
        for i in 0..cols {
            atb[i] += a[r][i] * b[r];
            for j in 0..cols {
                ata[i][j] += a[r][i] * a[r][j];
            }
        }
    }
    solve_real(ata, atb).map(|(x, _)| x)
}
