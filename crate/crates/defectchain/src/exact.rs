//! Gaussian elimination over the cyclotomic field.

use crate::scalar::Scalar;

/// Reduced row echelon form in place; returns the pivot columns.
pub(crate) fn rref(rows: &mut [Vec<Scalar>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, piv);
        let inv = rows[r][col].try_inv().expect("nonzero pivot");
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..ncols {
                    let t = &f * &rows[r][j];
                    rows[i][j] -= &t;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub(crate) fn rank(rows: &[Vec<Scalar>]) -> usize {
    rref(&mut rows.to_vec()).len()
}

/// Basis of { v : M v = 0 } for `M` given by rows with `ncols` columns.
pub(crate) fn nullspace(rows: &[Vec<Scalar>], ncols: usize, order: u32) -> Vec<Vec<Scalar>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Scalar::zero(order); ncols];
            v[f] = Scalar::one(order);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&m[row][f];
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_rank_one() {
        let s = |v: i64| Scalar::from_int(v, 8);
        let rows = vec![vec![s(1), s(-1)], vec![s(2), s(-2)]];
        let ns = nullspace(&rows, 2, 8);
        assert_eq!(ns, vec![vec![s(1), s(1)]]);
        assert_eq!(rank(&rows), 1);
    }
}
