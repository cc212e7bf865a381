//! Gaussian elimination over the field of rational functions.

use crate::symexpr::{RationalExpr, Symbols};

/// Outcome of a linear solve. Underdetermined systems report the pivot
/// rank and the free unknowns; the returned solution pins those to zero.
#[derive(Debug, Clone)]
pub enum Solution {
    Unique(Vec<RationalExpr>),
    Underdetermined {
        rank: usize,
        free: Vec<usize>,
        pinned: Vec<RationalExpr>,
    },
    /// `equation` is the index of an input row reduced to 0 = nonzero.
    Inconsistent { equation: usize },
}

fn complexity(e: &RationalExpr) -> usize {
    e.numerator().num_terms() + e.denominator().num_terms()
}

/// Solve `rows * x = rhs` over the rational-function field. All entries
/// must share one symbol table.
pub fn solve(rows: &[Vec<RationalExpr>], rhs: &[RationalExpr], syms: &Symbols) -> Solution {
    let m = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    debug_assert_eq!(rhs.len(), m);
    let mut a: Vec<Vec<RationalExpr>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let mut orig: Vec<usize> = (0..m).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0usize;

    for c in 0..n {
        if r >= m {
            break;
        }
        // pivot: nonzero entry with the fewest terms
        let mut best: Option<(usize, usize)> = None;
        for j in r..m {
            if !a[j][c].is_zero() {
                let score = complexity(&a[j][c]);
                if best.map_or(true, |(_, s)| score < s) {
                    best = Some((j, score));
                }
            }
        }
        let Some((p, _)) = best else { continue };
        a.swap(r, p);
        orig.swap(r, p);
        for j in (r + 1)..m {
            if a[j][c].is_zero() {
                continue;
            }
            let factor = a[j][c].div(&a[r][c]).unwrap();
            for k in c..=n {
                if !a[r][k].is_zero() {
                    let t = factor.mul(&a[r][k]);
                    a[j][k] = a[j][k].sub(&t);
                }
            }
            a[j][c] = RationalExpr::zero(syms);
        }
        pivots.push((r, c));
        r += 1;
    }

    for j in r..m {
        if !a[j][n].is_zero() {
            return Solution::Inconsistent { equation: orig[j] };
        }
    }

    let mut x = vec![RationalExpr::zero(syms); n];
    for &(pr, pc) in pivots.iter().rev() {
        let mut v = a[pr][n].clone();
        for c in (pc + 1)..n {
            if !a[pr][c].is_zero() && !x[c].is_zero() {
                v = v.sub(&a[pr][c].mul(&x[c]));
            }
        }
        x[pc] = v.div(&a[pr][pc]).unwrap();
    }

    if pivots.len() == n {
        Solution::Unique(x)
    } else {
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let free = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
        Solution::Underdetermined {
            rank: pivots.len(),
            free,
            pinned: x,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse;

    fn e(text: &str) -> RationalExpr {
        parse(text, &["x", "y"], &[]).unwrap()
    }

    #[test]
    fn unique_over_functions() {
        // x*u + v = x^2 + y ; u - v = -y + ... pick u = x, v = y
        let syms = e("x").symbols().clone();
        let rows = vec![vec![e("x"), e("1")], vec![e("1"), e("-1")]];
        let rhs = vec![e("x^2 + y"), e("x - y")];
        match solve(&rows, &rhs, &syms) {
            Solution::Unique(sol) => {
                assert_eq!(sol[0], e("x"));
                assert_eq!(sol[1], e("y"));
            }
            other => panic!("expected unique, got {other:?}"),
        }
    }

    #[test]
    fn underdetermined_reports_free() {
        let syms = e("x").symbols().clone();
        let rows = vec![vec![e("1"), e("0")]];
        let rhs = vec![e("x")];
        match solve(&rows, &rhs, &syms) {
            Solution::Underdetermined { rank, free, pinned } => {
                assert_eq!(rank, 1);
                assert_eq!(free, vec![1]);
                assert_eq!(pinned[0], e("x"));
                assert!(pinned[1].is_zero());
            }
            other => panic!("expected underdetermined, got {other:?}"),
        }
    }

    #[test]
    fn inconsistent_reports_row() {
        let syms = e("x").symbols().clone();
        let rows = vec![
            vec![e("1"), e("1")],
            vec![e("2"), e("2")],
            vec![e("x"), e("x")],
        ];
        let rhs = vec![e("1"), e("3"), e("x")];
        match solve(&rows, &rhs, &syms) {
            Solution::Inconsistent { equation } => assert_eq!(equation, 1),
            other => panic!("expected inconsistent, got {other:?}"),
        }
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let syms = e("x").symbols().clone();
        let rows = vec![vec![e("x"), e("y")], vec![e("y"), e("x")]];
        let rhs = vec![e("0"), e("0")];
        match solve(&rows, &rhs, &syms) {
            Solution::Unique(sol) => assert!(sol.iter().all(|v| v.is_zero())),
            other => panic!("expected unique, got {other:?}"),
        }
    }
}
