//! Minimal dense linear algebra: LU factorization with partial pivoting,
//! sized for the chain solves in [`crate::markov`].

/// Row-major `n x n` matrix factored in place. Returns the pivot
/// permutation, or `None` when a pivot falls below `tol` (rank
/// deficiency beyond what the caller expects).
pub fn lu_factor(a: &mut [f64], n: usize, tol: f64) -> Option<Vec<usize>> {
    debug_assert_eq!(a.len(), n * n);
    let mut piv: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut best = col;
        let mut best_abs = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > best_abs {
                best = row;
                best_abs = v;
            }
        }
        if best_abs < tol {
            return None;
        }
        if best != col {
            for k in 0..n {
                a.swap(col * n + k, best * n + k);
            }
            piv.swap(col, best);
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / pivot;
            a[row * n + col] = f;
            if f != 0.0 {
                for k in col + 1..n {
                    a[row * n + k] -= f * a[col * n + k];
                }
            }
        }
    }
    Some(piv)
}

/// Solve `LU x = P b` for one right-hand side, in place.
pub fn lu_solve(lu: &[f64], n: usize, piv: &[usize], b: &mut [f64]) {
    let mut x = vec![0.0; n];
    for i in 0..n {
        x[i] = b[piv[i]];
    }
    for i in 0..n {
        for k in 0..i {
            let f = lu[i * n + k];
            if f != 0.0 {
                x[i] -= f * x[k];
            }
        }
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            let f = lu[i * n + k];
            if f != 0.0 {
                x[i] -= f * x[k];
            }
        }
        x[i] /= lu[i * n + i];
    }
    b.copy_from_slice(&x);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // [2 1; 1 3] x = [3; 5] -> x = [0.8, 1.4]
        let mut a = vec![2.0, 1.0, 1.0, 3.0];
        let piv = lu_factor(&mut a, 2, 1e-12).unwrap();
        let mut b = vec![3.0, 5.0];
        lu_solve(&a, 2, &piv, &mut b);
        assert!((b[0] - 0.8).abs() < 1e-12);
        assert!((b[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn rejects_singular() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        assert!(lu_factor(&mut a, 2, 1e-10).is_none());
    }

    #[test]
    fn handles_permutation() {
        // First pivot is zero, needs a row swap.
        let mut a = vec![0.0, 1.0, 1.0, 0.0];
        let piv = lu_factor(&mut a, 2, 1e-12).unwrap();
        let mut b = vec![7.0, 9.0];
        lu_solve(&a, 2, &piv, &mut b);
        assert!((b[0] - 9.0).abs() < 1e-12);
        assert!((b[1] - 7.0).abs() < 1e-12);
    }
}
