//! Exact rational helpers shared by the discrete and commutative modules.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Q = BigRational;

/// Builds `num/den` as an exact rational. Panics on a zero denominator.
pub fn q(num: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(value: i64) -> Q {
    BigRational::from_integer(BigInt::from(value))
}

pub fn to_f64(value: &Q) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite float (every finite f64 is a dyadic rational).
pub fn from_f64(value: f64) -> Option<Q> {
    BigRational::from_float(value)
}

/// Reduced row echelon form of a dense row-major matrix, in place.
/// Returns the pivot columns.
pub fn rref(rows: &mut [Vec<Q>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row).take(cols) {
                    *v = &*v - &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Affine solution set `{x : A x = b}` as `particular + span(directions)`,
/// or `None` when the system is inconsistent.
pub struct AffineSolution {
    pub particular: Vec<Q>,
    pub directions: Vec<Vec<Q>>,
}

pub fn solve_affine(a: &[Vec<Q>], b: &[Q], cols: usize) -> Option<AffineSolution> {
    let mut aug: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, cols + 1);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut particular = vec![Q::zero(); cols];
    for (i, &p) in pivots.iter().enumerate() {
        particular[p] = aug[i][cols].clone();
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let directions = free
        .iter()
        .map(|&f| {
            let mut d = vec![Q::zero(); cols];
            d[f] = Q::one();
            for (i, &p) in pivots.iter().enumerate() {
                d[p] = -aug[i][f].clone();
            }
            d
        })
        .collect();
    Some(AffineSolution {
        particular,
        directions,
    })
}

/// Unique solution of a square system, `None` if singular.
pub fn solve_square(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = b.len();
    let sol = solve_affine(a, b, n)?;
    sol.directions.is_empty().then_some(sol.particular)
}

pub fn in_unit_interval(value: &Q) -> bool {
    !value.is_negative() && *value <= Q::one()
}
