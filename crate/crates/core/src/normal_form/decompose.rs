//! Recovering the normal-form descriptor from a matrix.
//!
//! Block types at ±1 are read off the symplectic form `ω(x, (M∓I)x)` on the
//! generalized eigenspace; rotations off the Krein form `-iJ` on eigenvectors;
//! `N₂` triviality off the Hermitian part of `-iJ(M-ω)` on the generalized
//! eigenspace. All three forms are invariant under symplectic conjugation.

use nalgebra::{Complex, DMatrix};

use super::{NormalFormDescriptor, NormalFormError};
use crate::symplectic::spectrum::{clusters, numeric_kernel, numeric_nullity};
use crate::symplectic::{j_numeric, symplectic_residual, Angle, SymplecticMatrix};

#[derive(Clone, Debug, Default)]
pub struct Certainty {
    pub certain: bool,
    /// Smallest ratio between a decisive eigenvalue and the first discarded one.
    pub min_margin: f64,
    pub notes: Vec<String>,
}

type C64 = Complex<f64>;

fn complexify(a: &DMatrix<f64>) -> DMatrix<C64> {
    a.map(|x| C64::new(x, 0.0))
}

/// Signs of the `count` largest-magnitude eigenvalues of a Hermitian matrix,
/// and the gap ratio separating them from the rest.
fn leading_signs(h: &DMatrix<C64>, count: usize) -> (usize, usize, f64) {
    if count == 0 {
        return (0, 0, f64::INFINITY);
    }
    let herm = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let pos = ev.iter().take(count).filter(|x| **x > 0.0).count();
    let neg = count.min(ev.len()) - pos;
    let kept = ev.get(count - 1).map_or(0.0, |x| x.abs());
    let dropped = ev.get(count).map_or(0.0, |x| x.abs());
    let margin = if dropped == 0.0 { f64::INFINITY } else { kept / dropped };
    (pos, neg, margin)
}

struct Ctx {
    a: DMatrix<C64>,
    j: DMatrix<C64>,
    tol: f64,
    cert: Certainty,
}

impl Ctx {
    fn note(&mut self, margin: f64, msg: String) {
        self.cert.min_margin = self.cert.min_margin.min(margin);
        if margin < 1e3 {
            self.cert.certain = false;
            self.cert.notes.push(format!("{msg} (weak margin {margin:.3e})"));
        } else {
            self.cert.notes.push(msg);
        }
    }

    fn shifted(&self, w: C64) -> DMatrix<C64> {
        let n = self.a.nrows();
        &self.a - DMatrix::<C64>::identity(n, n) * w
    }

    /// Counts at a real eigenvalue `s = ±1`: (positive size-2 blocks, identity pairs, negative size-2 blocks).
    fn real_unit(&mut self, s: f64, alg: usize) -> Result<(usize, usize, usize), NormalFormError> {
        let b = self.shifted(C64::new(s, 0.0));
        let g = numeric_nullity(&b, self.tol)?;
        let k2 = numeric_kernel(&(&b * &b), self.tol)?;
        if k2.ncols() != alg {
            return Err(NormalFormError::Unsupported(format!("Jordan block of size > 2 at {s}")));
        }
        let size2 = alg - g;
        if g < size2 || (g - size2) % 2 != 0 {
            return Err(NormalFormError::Unsupported(format!("inconsistent multiplicities at {s}: a={alg}, g={g}")));
        }
        let form = k2.adjoint() * &self.j * &b * &k2;
        let (pos, neg, margin) = leading_signs(&form, size2);
        self.note(margin, format!("eigenvalue {s}: a={alg}, g={g}, +{pos}/-{neg}"));
        Ok((pos, (g - size2) / 2, neg))
    }
}

pub fn decompose(m: &SymplecticMatrix, tol: f64) -> Result<(NormalFormDescriptor, Certainty), NormalFormError> {
    let af = m.to_f64();
    let scale = af.amax().max(1.0);
    let res = symplectic_residual(&af);
    if res > 1e-10 * scale * scale {
        return Err(crate::symplectic::SympError::NotSymplectic(res).into());
    }
    let n = af.nrows() / 2;
    let minus_i = C64::new(0.0, -1.0);
    let mut ctx = Ctx {
        a: complexify(&af),
        j: complexify(&j_numeric(n)),
        tol,
        cert: Certainty { certain: true, min_margin: f64::INFINITY, notes: Vec::new() },
    };
    let radius = tol.sqrt() * scale;
    let mut d = NormalFormDescriptor::default();
    let mut off_circle = 0usize;
    let mut negative_real = 0usize;
    for c in clusters(&af, tol)? {
        let z = c.center;
        if (z - C64::new(1.0, 0.0)).norm() <= radius {
            let (p_minus, p_zero, p_plus) = ctx.real_unit(1.0, c.multiplicity)?;
            d.p_minus += p_minus;
            d.p_zero += p_zero;
            d.p_plus += p_plus;
        } else if (z + C64::new(1.0, 0.0)).norm() <= radius {
            let (q_minus, q_zero, q_plus) = ctx.real_unit(-1.0, c.multiplicity)?;
            d.q_minus += q_minus;
            d.q_zero += q_zero;
            d.q_plus += q_plus;
        } else if !c.on_circle {
            off_circle += c.multiplicity;
            if z.re < 0.0 && z.im.abs() <= radius {
                negative_real += c.multiplicity;
            }
        } else if z.im > 0.0 {
            let phi = c.angle_over_pi();
            let alg = c.multiplicity;
            let b = ctx.shifted(z);
            let g = numeric_nullity(&b, tol)?;
            if g > alg || 2 * g < alg {
                return Err(NormalFormError::Unsupported(format!("Jordan structure at e^(i{phi}π)")));
            }
            let rot = 2 * g - alg;
            let n2 = alg - g;
            let k1 = numeric_kernel(&b, tol)?;
            let krein = k1.adjoint() * &ctx.j * &k1 * minus_i;
            let (pos, neg, margin) = leading_signs(&krein, rot);
            ctx.note(margin, format!("e^(i{phi:.9}π): {rot} rotations, Krein +{pos}/-{neg}"));
            d.theta_list.extend(std::iter::repeat_n(Angle::Numeric(phi), pos));
            d.theta_list.extend(std::iter::repeat_n(Angle::Numeric(2.0 - phi), neg));
            if n2 > 0 {
                let k2 = numeric_kernel(&(&b * &b), tol)?;
                if k2.ncols() != alg {
                    return Err(NormalFormError::Unsupported(format!("Jordan block of size > 2 at e^(i{phi}π)")));
                }
                let form = k2.adjoint() * &ctx.j * &b * &k2 * minus_i;
                let (pos, neg, margin) = leading_signs(&form, n2);
                ctx.note(margin, format!("e^(i{phi:.9}π): {n2} N2 blocks, nontrivial {pos}, trivial {neg}"));
                d.alpha_list.extend(std::iter::repeat_n(Angle::Numeric(phi), pos));
                d.beta_list.extend(std::iter::repeat_n(Angle::Numeric(phi), neg));
            }
        }
    }
    d.k = off_circle / 2;
    d.hyperbolic_sign = (negative_real / 2) % 2 == 1;
    if d.n() != n {
        return Err(NormalFormError::Unsupported(format!("recovered blocks span 2·{} of 2·{n}", d.n())));
    }
    if let SymplecticMatrix::Exact(_) = m {
        snap_exact(m, &mut d)?;
    }
    Ok((d, ctx.cert))
}

/// Replaces numeric angles by exact multiples of π/12 when the exact nullity confirms them.
fn snap_exact(m: &SymplecticMatrix, d: &mut NormalFormDescriptor) -> Result<(), NormalFormError> {
    for list in [&mut d.theta_list, &mut d.alpha_list, &mut d.beta_list] {
        for a in list.iter_mut() {
            let x = a.over_pi_f64();
            let k = (x * 12.0).round();
            if (x * 12.0 - k).abs() > 1e-6 {
                continue;
            }
            let cand = Angle::turns_pi(k as i64, 12);
            if cand.is_admissible()? && m.nullity_omega(&cand)? > 0 {
                *a = cand;
            }
        }
    }
    Ok(())
}
