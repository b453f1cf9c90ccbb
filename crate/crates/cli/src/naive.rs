//! Plain rational Gaussian elimination, independent of the library's
//! fraction-free and modular paths; reference side of the `linalg`
//! agreement check.

use num_traits::Zero;
use nwe_core::exactla::{RMatrix, Rational};

#[allow(clippy::needless_range_loop)] // pivot and target row are indexed together
pub fn rank(m: &RMatrix) -> usize {
    let mut rows: Vec<Vec<Rational>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
    let cols = m.cols();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let lead = rows[r][c].clone();
        for i in (r + 1)..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let factor = &rows[i][c] / &lead;
            for j in c..cols {
                let sub = &factor * &rows[r][j];
                rows[i][j] -= sub;
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}
