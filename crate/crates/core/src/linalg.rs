//! Exact nullspace of an integer matrix by fraction-free elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::numerics::Rational;

/// Basis of `{α : Σ_c α_c · column_c = 0}` for the matrix whose columns are
/// given. Every column must have the same length.
///
/// Rows are reduced with integer combinations only (divided back by their
/// content after each step); the pivot of each stage is the first nonzero
/// entry in the leftmost remaining column. The basis has one vector per free
/// column, normalized to integer entries with the free coordinate positive.
pub fn nullspace(columns: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    let ncols = columns.len();
    if ncols == 0 {
        return Vec::new();
    }
    let nrows = columns[0].len();
    let mut rows: Vec<Vec<BigInt>> = (0..nrows)
        .map(|i| columns.iter().map(|c| BigInt::from(c[i])).collect())
        .collect();

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next_row = 0;
    for col in 0..ncols {
        if next_row == nrows {
            break;
        }
        let Some(p) = (next_row..nrows).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(next_row, p);
        let pivot_row = rows[next_row].clone();
        let pv = pivot_row[col].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == next_row || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = &*x * &pv - &factor * y;
            }
            normalize(row);
        }
        pivots.push((next_row, col));
        next_row += 1;
    }

    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivot_cols.contains(c)) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for &(row, col) in &pivots {
            let entry = &rows[row][free];
            if !entry.is_zero() {
                v[col] = -Rational::from_big(entry.clone(), rows[row][col].clone());
            }
        }
        let scale = Rational::lcm_of_denominators(&v);
        let scale = Rational::from_big(scale, BigInt::one());
        basis.push(v.into_iter().map(|x| x * &scale).collect());
    }
    basis
}

fn normalize(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x = &*x / &g;
        }
    }
    if row.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in row.iter_mut() {
            *x = -&*x;
        }
    }
}
