//! Floating-point spectral clustering for numeric symplectic matrices.

use nalgebra::{Complex, DMatrix};

use super::SympError;

#[derive(Clone, Debug)]
pub struct Cluster {
    /// Mean of the member eigenvalues; far better conditioned than any member.
    pub center: Complex<f64>,
    pub multiplicity: usize,
    pub on_circle: bool,
}

impl Cluster {
    /// Argument in units of π, in `[0, 2)`.
    pub fn angle_over_pi(&self) -> f64 {
        (self.center.im.atan2(self.center.re) / std::f64::consts::PI).rem_euclid(2.0)
    }
}

/// Groups eigenvalues by single linkage. A defective eigenvalue of a Jordan
/// block of size k splits by about `eps^(1/k)`, hence the `sqrt(tol)` radius.
pub fn clusters(a: &DMatrix<f64>, tol: f64) -> Result<Vec<Cluster>, SympError> {
    let scale = a.amax().max(1.0);
    let radius = tol.sqrt() * scale;
    let eig: Vec<Complex<f64>> = a.clone().complex_eigenvalues().iter().cloned().collect();
    let n = eig.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(l: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while l[r] != r {
            r = l[r];
        }
        l[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (eig[i] - eig[j]).norm() <= radius {
                let (ri, rj) = (find(&mut label, i), find(&mut label, j));
                label[ri] = rj;
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex<f64>>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        match groups.iter_mut().find(|(k, _)| *k == r) {
            Some((_, g)) => g.push(eig[i]),
            None => groups.push((r, vec![eig[i]])),
        }
    }
    for (a_i, (_, ga)) in groups.iter().enumerate() {
        for (_, gb) in groups.iter().skip(a_i + 1) {
            for x in ga {
                for y in gb {
                    if (x - y).norm() <= 10.0 * radius {
                        return Err(SympError::AmbiguousCluster(format!("{x:.6}")));
                    }
                }
            }
        }
    }
    groups
        .into_iter()
        .map(|(_, g)| {
            let center = g.iter().sum::<Complex<f64>>() / g.len() as f64;
            let off = (center.norm() - 1.0).abs();
            if off > tol && off < radius {
                return Err(SympError::BorderlineSpectrum(center.norm()));
            }
            Ok(Cluster { center, multiplicity: g.len(), on_circle: off <= tol })
        })
        .collect()
}

/// Complex kernel dimension by singular values: zero below `tol`, nonzero
/// above `sqrt(tol)` (both relative), borderline otherwise.
pub fn numeric_nullity(z: &DMatrix<Complex<f64>>, tol: f64) -> Result<usize, SympError> {
    let sv = z.clone().singular_values();
    let scale = sv.iter().cloned().fold(1.0f64, f64::max);
    let mut null = 0;
    for &s in sv.iter() {
        if s <= tol * scale {
            null += 1;
        } else if s < tol.sqrt() * scale {
            return Err(SympError::BorderlineRank(s));
        }
    }
    Ok(null + z.ncols().saturating_sub(sv.len()))
}

/// Orthonormal basis (columns) of the numeric kernel.
pub fn numeric_kernel(z: &DMatrix<Complex<f64>>, tol: f64) -> Result<DMatrix<Complex<f64>>, SympError> {
    let k = numeric_nullity(z, tol)?;
    let n = z.ncols();
    // right singular vectors of the smallest singular values
    let svd = z.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let mut out = DMatrix::zeros(n, k);
    for (c, &i) in idx.iter().take(k).enumerate() {
        for r in 0..n {
            out[(r, c)] = v_t[(i, r)].conj();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jordan_block_is_one_cluster() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let c = clusters(&a, 1e-8).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].multiplicity, 2);
        assert!(c[0].on_circle);
    }

    #[test]
    fn hyperbolic_pair_is_off_circle() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        let c = clusters(&a, 1e-8).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|c| !c.on_circle));
    }
}
