//! Integer relation lattices `{k in Z^h : <k, v> in Z}` for exact vectors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{lcm_of_denominators, Gen, Rational, Scalar};

/// The lattice of integer vectors pairing integrally with `v`, kept in
/// row Hermite normal form so two runs on the same `v` compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationLattice {
    pub ambient_dim: usize,
    pub basis: Vec<Vec<BigInt>>,
}

impl RelationLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Rational basis of the real orthogonal complement of the lattice span.
    pub fn tangent_space(&self) -> Vec<Vec<Rational>> {
        let rows: Vec<Vec<Rational>> = self
            .basis
            .iter()
            .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect();
        rational_nullspace(&rows, self.ambient_dim)
    }

    pub fn pairing(k: &[BigInt], v: &[Scalar]) -> Scalar {
        k.iter()
            .zip(v)
            .map(|(ki, vi)| vi.scale(&Rational::from_integer(ki.clone())))
            .sum()
    }
}

/// Computes the relation lattice of `v` exactly: every generator coefficient
/// imposes a homogeneous rational equation, the rational part an integrality
/// condition handled by one auxiliary integer unknown.
pub fn relation_lattice(v: &[Scalar]) -> RelationLattice {
    let h = v.len();
    let mut gens: Vec<Gen> = v
        .iter()
        .flat_map(|x| x.generators().cloned().map(Gen))
        .collect();
    gens.sort();
    gens.dedup();

    let mut rows: Vec<Vec<Rational>> = gens
        .iter()
        .map(|g| {
            v.iter()
                .map(|x| {
                    x.irrational_coeffs()
                        .find(|(gg, _)| gg.id() == g.0.id())
                        .map(|(_, c)| c.clone())
                        .unwrap_or_else(Rational::zero)
                })
                .collect()
        })
        .collect();
    rows.push(v.iter().map(|x| x.rational_part().clone()).collect());

    let denom = lcm_of_denominators(rows.iter().flatten());
    let d = Rational::from_integer(denom.clone());
    let mut int_rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let mut row: Vec<BigInt> = r.iter().map(|x| (x * &d).to_integer()).collect();
            row.push(BigInt::zero());
            row
        })
        .collect();
    // <r, k> - t = 0 after scaling by the common denominator
    int_rows.last_mut().expect("rational row")[h] = -denom;

    let kernel = integer_kernel(&int_rows, h + 1);
    let projected: Vec<Vec<BigInt>> = kernel.into_iter().map(|mut k| {
        k.truncate(h);
        k
    }).collect();
    RelationLattice { ambient_dim: h, basis: row_hnf(projected) }
}

/// Basis of `{x in Z^cols : A x = 0}` via unimodular column operations.
pub fn integer_kernel(a: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut pivot = 0usize;
    for row in 0..m.len() {
        if pivot >= cols {
            break;
        }
        for c in pivot + 1..cols {
            if m[row][c].is_zero() {
                continue;
            }
            if m[row][pivot].is_zero() {
                swap_cols(&mut m, &mut u, pivot, c);
                continue;
            }
            let x = m[row][pivot].clone();
            let y = m[row][c].clone();
            let e = x.extended_gcd(&y);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let (p, q) = (-(&y / &g), &x / &g);
            combine_cols(&mut m, pivot, c, &s, &t, &p, &q);
            combine_cols(&mut u, pivot, c, &s, &t, &p, &q);
        }
        if !m[row][pivot].is_zero() {
            pivot += 1;
        }
    }
    (pivot..cols)
        .map(|c| (0..cols).map(|r| u[r][c].clone()).collect())
        .collect()
}

fn swap_cols(m: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], a: usize, b: usize) {
    for r in m.iter_mut() {
        r.swap(a, b);
    }
    for r in u.iter_mut() {
        r.swap(a, b);
    }
}

/// `col_a <- s col_a + t col_b`, `col_b <- p col_a + q col_b` (old values).
fn combine_cols(
    m: &mut [Vec<BigInt>],
    a: usize,
    b: usize,
    s: &BigInt,
    t: &BigInt,
    p: &BigInt,
    q: &BigInt,
) {
    for r in m.iter_mut() {
        let (xa, xb) = (r[a].clone(), r[b].clone());
        r[a] = s * &xa + t * &xb;
        r[b] = p * &xa + q * &xb;
    }
}

/// Row Hermite normal form with zero rows dropped.
pub fn row_hnf(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0usize;
    for c in 0..ncols {
        if r >= rows.len() {
            break;
        }
        // gcd-combine all rows at or below r in column c
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            if rows[r][c].is_zero() {
                rows.swap(r, i);
                continue;
            }
            let x = rows[r][c].clone();
            let y = rows[i][c].clone();
            let e = x.extended_gcd(&y);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let (p, q) = (-(&y / &g), &x / &g);
            let (ra, rb) = (rows[r].clone(), rows[i].clone());
            for k in 0..ncols {
                rows[r][k] = &s * &ra[k] + &t * &rb[k];
                rows[i][k] = &p * &ra[k] + &q * &rb[k];
            }
        }
        if rows[r][c].is_zero() {
            continue;
        }
        if rows[r][c].is_negative() {
            for x in rows[r].iter_mut() {
                *x = -x.clone();
            }
        }
        let piv = rows[r][c].clone();
        for i in 0..r {
            let q = rows[i][c].div_floor(&piv);
            if !q.is_zero() {
                let pr = rows[r].clone();
                for k in 0..ncols {
                    rows[i][k] -= &q * &pr[k];
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows.retain(|row| row.iter().any(|x| !x.is_zero()));
    rows
}

/// Basis of the rational nullspace `{x : rows * x = 0}` in `Q^n`.
pub fn rational_nullspace(rows: &[Vec<Rational>], n: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pr = m[r].clone();
                for k in 0..n {
                    m[i][k] -= &f * &pr[k];
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = vec![Rational::zero(); n];
            x[free] = Rational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                x[pc] = -m[i][free].clone();
            }
            x
        })
        .collect()
}
