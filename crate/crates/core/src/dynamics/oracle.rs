use nalgebra::DMatrix;

use super::DynError;
use crate::symplectic::{j_numeric, symplectic_residual};

/// Endpoint nullity threshold, relative to the matrix scale.
const ENDPOINT_TOL: f64 = 1e-6;
/// Crossing-form eigenvalues below this (relative) are tangential.
const TANGENT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct SampledPath {
    pub times: Vec<f64>,
    pub matrices: Vec<DMatrix<f64>>,
}

impl SampledPath {
    pub fn new(times: Vec<f64>, matrices: Vec<DMatrix<f64>>) -> Result<Self, DynError> {
        let p = SampledPath { times, matrices };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DynError> {
        let bad = |s: String| Err(DynError::Path(s));
        if self.times.len() != self.matrices.len() || self.times.len() < 3 {
            return bad("need at least three samples with one time each".into());
        }
        let dim = self.matrices[0].nrows();
        if dim % 2 != 0 || (&self.matrices[0] - DMatrix::<f64>::identity(dim, dim)).amax() > 1e-12 {
            return bad("path must start at the identity".into());
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return bad("times must increase".into());
        }
        for (k, m) in self.matrices.iter().enumerate() {
            let scale = m.amax().max(1.0);
            let r = symplectic_residual(m) / (scale * scale);
            if r > 1e-10 {
                return bad(format!("sample {k} has symplectic residual {r:.3e}"));
            }
        }
        Ok(())
    }

    pub fn end(&self) -> &DMatrix<f64> {
        self.matrices.last().expect("non-empty")
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    /// The `m`-fold iterate `γ(t - kτ)γ(τ)^k` on `[0, mτ]`.
    pub fn iterate(&self, m: usize) -> SampledPath {
        let tau = self.duration();
        let mut times = self.times.clone();
        let mut matrices = self.matrices.clone();
        let mut power = self.end().clone();
        for k in 1..m {
            for (t, g) in self.times.iter().zip(&self.matrices).skip(1) {
                times.push(t + k as f64 * tau);
                matrices.push(g * &power);
            }
            power = self.end() * &power;
        }
        SampledPath { times, matrices }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Crossing {
    pub t: f64,
    pub dim: usize,
    pub signature: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub i1: i64,
    pub crossings: Vec<Crossing>,
    pub endpoint_degenerate: bool,
    /// Half-signature contributions `(start, endpoint)`, doubled.
    pub boundary_twice: (i64, i64),
}

fn sym(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

fn inverse(g: &DMatrix<f64>, j: &DMatrix<f64>) -> DMatrix<f64> {
    -(j * g.transpose() * j)
}

/// `S` with `γ' = J S γ`: `S = -J γ' γ⁻¹`.
fn generator(dg: &DMatrix<f64>, g: &DMatrix<f64>, j: &DMatrix<f64>) -> DMatrix<f64> {
    sym(&(-(j * dg * inverse(g, j))))
}

fn signature(form: &DMatrix<f64>, t: f64) -> Result<i64, DynError> {
    let ev = form.clone().symmetric_eigenvalues();
    let scale = ev.amax().max(1e-300);
    let mut sig = 0;
    for x in ev.iter() {
        if x.abs() <= TANGENT_TOL * scale.max(1.0) {
            return Err(DynError::Tangential(t));
        }
        sig += if *x > 0.0 { 1 } else { -1 };
    }
    Ok(sig)
}

fn restricted(s: &DMatrix<f64>, k: &DMatrix<f64>) -> DMatrix<f64> {
    sym(&(k.transpose() * s * k))
}

/// Singular values ascending, with the right singular vectors as columns.
fn svd_sorted(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&x, &y| svd.singular_values[x].total_cmp(&svd.singular_values[y]));
    let vals = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let cols: Vec<_> = idx.iter().map(|&i| vt.row(i).transpose()).collect();
    (vals, DMatrix::from_columns(&cols))
}

/// `i(γ,1)` as a Robbin–Salamon count: half the signature of the generator at
/// the start, the crossing-form signatures at interior zeros of
/// `det(γ(t) - I)`, and at a degenerate endpoint half the incoming form plus
/// half the form of the closing perturbation `γ(τ)e^{-sJ}`.
pub fn crossing_oracle_i1(path: &SampledPath) -> Result<OracleReport, DynError> {
    path.validate()?;
    let dim = path.matrices[0].nrows();
    let j = j_numeric(dim / 2);
    let id = DMatrix::<f64>::identity(dim, dim);
    let ts = &path.times;
    let gs = &path.matrices;
    let last = gs.len() - 1;

    let s0 = generator(&((&gs[1] - &gs[0]) / (ts[1] - ts[0])), &gs[0], &j);
    let start = signature(&s0, 0.0)?;

    let svs: Vec<(Vec<f64>, DMatrix<f64>)> = gs.iter().map(|g| svd_sorted(&(g - &id))).collect();
    let mut crossings = Vec::new();
    for k in 1..last {
        let (prev, cur, next) = (svs[k - 1].0[0], svs[k].0[0], svs[k + 1].0[0]);
        let slope = (prev - cur).abs().max((next - cur).abs());
        if !(cur < prev && cur <= next && cur <= slope) {
            continue;
        }
        let thr = 2.0 * slope.max(1e-12);
        let d = svs[k].0.iter().take_while(|v| **v <= thr).count().max(1);
        let kernel = svs[k].1.columns(0, d).into_owned();
        let dg = (&gs[k + 1] - &gs[k - 1]) / (ts[k + 1] - ts[k - 1]);
        let s = generator(&dg, &gs[k], &j);
        let sig = signature(&restricted(&s, &kernel), ts[k])?;
        crossings.push(Crossing { t: ts[k], dim: d, signature: sig });
    }

    let g = &gs[last];
    let scale = g.amax().max(1.0);
    let (vals, vecs) = &svs[last];
    let d = vals.iter().take_while(|v| **v <= ENDPOINT_TOL * scale).count();
    let mut end_twice = 0;
    if d > 0 {
        let kernel = vecs.columns(0, d).into_owned();
        let dg = (g - &gs[last - 1]) / (ts[last] - ts[last - 1]);
        let incoming = signature(&restricted(&generator(&dg, g, &j), &kernel), ts[last])?;
        // γ(τ)e^{-sJ} has γ' = -γJ, so S = JγJγ⁻¹.
        let closing = sym(&(&j * g * &j * inverse(g, &j)));
        let outgoing = signature(&restricted(&closing, &kernel), ts[last])?;
        end_twice = incoming + outgoing;
    }
    let twice = start + 2 * crossings.iter().map(|c| c.signature).sum::<i64>() + end_twice;
    if twice % 2 != 0 {
        return Err(DynError::Path(format!("half-integral index count {twice}/2")));
    }
    Ok(OracleReport { i1: twice / 2, crossings, endpoint_degenerate: d > 0, boundary_twice: (start, end_twice) })
}
