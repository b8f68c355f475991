use alloc::vec;
use alloc::vec::Vec;

/// Relative residual norm below which a column counts as linearly dependent
/// on the columns before it.
const RANK_TOL: f64 = 1e-9;

/// Solution of a column-pivot-free least-squares problem.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    /// Indices of the columns that entered the decomposition.
    pub kept: Vec<usize>,
    /// One coefficient per input column; dropped columns get 0.
    pub coef: Vec<f64>,
    /// Residual sum of squares.
    pub rss: f64,
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

/// Apply the unit Householder reflector `v` (zero above `k`) to `a`.
fn reflect(v: &[f64], k: usize, a: &mut [f64]) {
    let dot: f64 = v[k..].iter().zip(&a[k..]).map(|(p, q)| p * q).sum();
    for (x, p) in a[k..].iter_mut().zip(&v[k..]) {
        *x -= 2.0 * dot * p;
    }
}

/// Minimise ‖y − Σ coef_j cols_j‖ with a Householder QR that processes
/// columns in order and skips any column whose component orthogonal to the
/// earlier kept columns is negligible. Dropping is deterministic: the later
/// of two collinear columns goes.
pub fn least_squares(cols: &[Vec<f64>], y: &[f64]) -> LeastSquares {
    let n = y.len();
    let mut reflectors: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut r_cols: Vec<Vec<f64>> = Vec::new();
    let mut kept = Vec::new();
    for (j, col) in cols.iter().enumerate() {
        let k = reflectors.len();
        if k >= n {
            break;
        }
        let mut a = col.clone();
        for (kk, v) in &reflectors {
            reflect(v, *kk, &mut a);
        }
        let tail = norm(&a[k..]);
        let scale = norm(col);
        if scale == 0.0 || tail <= RANK_TOL * scale {
            continue;
        }
        let alpha = if a[k] >= 0.0 { -tail } else { tail };
        let mut v = vec![0.0; n];
        v[k..].copy_from_slice(&a[k..]);
        v[k] -= alpha;
        let vn = norm(&v[k..]);
        for x in &mut v[k..] {
            *x /= vn;
        }
        a[k] = alpha;
        a.truncate(k + 1);
        r_cols.push(a);
        reflectors.push((k, v));
        kept.push(j);
    }
    let mut qty = y.to_vec();
    for (k, v) in &reflectors {
        reflect(v, *k, &mut qty);
    }
    let p = kept.len();
    let mut beta = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = qty[i];
        for c in i + 1..p {
            s -= r_cols[c][i] * beta[c];
        }
        beta[i] = s / r_cols[i][i];
    }
    let mut coef = vec![0.0; cols.len()];
    for (&j, b) in kept.iter().zip(beta) {
        coef[j] = b;
    }
    let rss = qty[p..].iter().map(|x| x * x).sum();
    LeastSquares { kept, coef, rss }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let ls = least_squares(&[vec![1.0; 5], x], &y);
        assert!((ls.coef[0] - 1.0).abs() < 1e-12 && (ls.coef[1] - 2.0).abs() < 1e-12);
        assert!(ls.rss < 1e-20);
    }

    #[test]
    fn collinear_column_dropped() {
        let a = vec![1.0, 2.0, 3.0, 5.0];
        let b = vec![2.0, 0.0, 1.0, 1.0];
        let c: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
        let ls = least_squares(&[vec![1.0; 4], a, b, c, vec![0.0; 4]], &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(ls.kept, [0, 1, 2]);
        assert_eq!((ls.coef[3], ls.coef[4]), (0.0, 0.0));
    }

    #[test]
    fn more_columns_than_rows() {
        let ls = least_squares(&[vec![1.0, 1.0], vec![1.0, 2.0], vec![3.0, 1.0]], &[1.0, 0.0]);
        assert_eq!(ls.kept, [0, 1]);
        assert!(ls.rss < 1e-20);
    }
}
