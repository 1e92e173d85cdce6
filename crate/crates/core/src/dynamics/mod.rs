//! Ellipsoid closed characteristics: analytic records, RK4 monodromy of the
//! linearized flow and a crossing-form oracle for `i(γ,1)`.

mod oracle;

pub use oracle::{crossing_oracle_i1, Crossing, OracleReport, SampledPath};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::iteration::{mean_index, IterError, PathRecord};
use crate::normal_form::{NormalFormDescriptor, NormalFormError};
use crate::scalar::{Rational, Scalar, ScalarError};
use crate::symplectic::{diamond_all, j_numeric, symplectic_residual, Angle, SympError, SymplecticMatrix};

pub const MIN_STEPS: usize = 1000;
const PROJECT_EVERY: usize = 100;
/// Residual allowed to accumulate between two projections.
const DRIFT_BUDGET: f64 = 1e-8;
/// Residual allowed after projection.
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Error)]
pub enum DynError {
    #[error("invalid ellipsoid: {0}")]
    Invalid(String),
    #[error("drift budget exceeded: residual {0:.3e}")]
    Drift(f64),
    #[error("tangential crossing near t = {0:.6}: refine the sampling")]
    Tangential(f64),
    #[error("invalid path: {0}")]
    Path(String),
    #[error("inconsistent ellipsoid record: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Symp(#[from] SympError),
    #[error(transparent)]
    Iter(#[from] IterError),
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
}

/// `Σ (α_i/2)(p_i² + q_i²) = 1` with the gauge power `H = j(x)^β`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ellipsoid {
    pub alphas: Vec<Scalar>,
    pub beta: Rational,
}

impl Ellipsoid {
    pub fn new(alphas: Vec<Scalar>) -> Result<Self, DynError> {
        let e = Ellipsoid { alphas, beta: Rational::new(3.into(), 2.into()) };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<(), DynError> {
        if self.alphas.is_empty() {
            return Err(DynError::Invalid("no semi-axes".into()));
        }
        for a in &self.alphas {
            if a.signum()?.is_le() {
                return Err(DynError::Invalid(format!("α = {a} must be positive")));
            }
        }
        let one = Rational::from_integer(1.into());
        let two = Rational::from_integer(2.into());
        if self.beta <= one || self.beta >= two {
            return Err(DynError::Invalid(format!("exponent {} must lie in (1, 2)", self.beta)));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn non_resonant(&self) -> Result<bool, DynError> {
        for (i, a) in self.alphas.iter().enumerate() {
            for b in &self.alphas[i + 1..] {
                if b.try_div(a)?.is_rational() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn beta_f64(&self) -> f64 {
        Scalar::from_rational(self.beta.clone()).to_f64()
    }

    /// Period of the orbit in plane `i` under the `H = j^β` flow.
    pub fn flow_period(&self, i: usize) -> f64 {
        4.0 * std::f64::consts::PI / (self.beta_f64() * self.alphas[i].to_f64())
    }

    /// `JH''(x(t))` along the circular orbit in plane `i` starting at `p_i > 0`.
    fn generator(&self, i: usize, t: f64) -> DMatrix<f64> {
        let n = self.n();
        let beta = self.beta_f64();
        let ai = self.alphas[i].to_f64();
        let omega = beta * ai / 2.0;
        let r = (2.0 / ai).sqrt();
        let (p, q) = (r * (omega * t).cos(), r * (omega * t).sin());
        let mut h = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for (j, a) in self.alphas.iter().enumerate() {
            let a = a.to_f64();
            h[(j, j)] = a;
            h[(n + j, n + j)] = a;
        }
        let g = [ai * p, ai * q];
        let idx = [i, n + i];
        for x in 0..2 {
            for y in 0..2 {
                h[(idx[x], idx[y])] += (beta / 2.0 - 1.0) * g[x] * g[y];
            }
        }
        j_numeric(n) * (h * (beta / 2.0))
    }
}

/// Pulls `y` back onto the symplectic group: `Y ← Y(I - E/2)` with
/// `E = Y⁻¹Y - I` computed through `Y⁻¹ = -J Yᵀ J`.
fn project(y: &DMatrix<f64>, j: &DMatrix<f64>) -> DMatrix<f64> {
    let n = y.nrows();
    let e = -(j * y.transpose() * j) * y - DMatrix::<f64>::identity(n, n);
    y * (DMatrix::<f64>::identity(n, n) - e * 0.5)
}

/// RK4 along orbit `i` over one flow period; samples every `sample_every` steps.
pub fn linearized_path(e: &Ellipsoid, i: usize, steps: usize, sample_every: usize) -> Result<SampledPath, DynError> {
    e.validate()?;
    if i >= e.n() {
        return Err(DynError::Invalid(format!("orbit index {i} out of range")));
    }
    if steps < MIN_STEPS {
        return Err(DynError::Drift(f64::INFINITY));
    }
    let dim = 2 * e.n();
    let j = j_numeric(e.n());
    let period = e.flow_period(i);
    let h = period / steps as f64;
    let mut y = DMatrix::<f64>::identity(dim, dim);
    let mut times = vec![0.0];
    let mut mats = vec![y.clone()];
    for k in 0..steps {
        let t = k as f64 * h;
        let a1 = e.generator(i, t);
        let a2 = e.generator(i, t + h / 2.0);
        let a4 = e.generator(i, t + h);
        let k1 = &a1 * &y;
        let k2 = &a2 * (&y + &k1 * (h / 2.0));
        let k3 = &a2 * (&y + &k2 * (h / 2.0));
        let k4 = &a4 * (&y + &k3 * h);
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let last = k + 1 == steps;
        if (k + 1) % PROJECT_EVERY == 0 || last {
            let scale = y.amax().max(1.0);
            let drift = symplectic_residual(&y) / (scale * scale);
            if !drift.is_finite() || drift > DRIFT_BUDGET {
                return Err(DynError::Drift(drift));
            }
            y = project(&y, &j);
            let res = symplectic_residual(&y) / (scale * scale);
            if res > RESIDUAL_TOL {
                return Err(DynError::Drift(res));
            }
        }
        if (k + 1) % sample_every == 0 || last {
            times.push(if last { period } else { (k + 1) as f64 * h });
            mats.push(y.clone());
        }
    }
    SampledPath::new(times, mats)
}

pub fn linearized_monodromy(e: &Ellipsoid, i: usize, steps: usize) -> Result<SymplecticMatrix, DynError> {
    let path = linearized_path(e, i, steps, (steps / 10).max(1))?;
    Ok(SymplecticMatrix::numeric(path.end().clone())?)
}

/// Reduced angle `θ/π = 2α_j/α_i mod 2` of the rotation in plane `j`.
pub fn plane_angle(e: &Ellipsoid, i: usize, j: usize) -> Result<Angle, DynError> {
    let t = e.alphas[j].try_div(&e.alphas[i])?.scale_int(2);
    Ok(Angle::Exact(t).reduced()?)
}

/// Closed form: the shear `[[1,0],[2π(β-2),1]]` in plane `i`, rotations elsewhere.
pub fn analytic_monodromy(e: &Ellipsoid, i: usize) -> Result<SymplecticMatrix, DynError> {
    let c = 2.0 * std::f64::consts::PI * (e.beta_f64() - 2.0);
    let mut parts = Vec::new();
    for j in 0..e.n() {
        let block = if j == i {
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, c, 1.0])
        } else {
            let (cs, sn) = plane_angle(e, i, j)?.cos_sin_f64();
            DMatrix::from_row_slice(2, 2, &[cs, -sn, sn, cs])
        };
        parts.push(SymplecticMatrix::numeric(block)?);
    }
    Ok(diamond_all(&parts)?)
}

/// Descriptor of orbit `i`: `N₁(1,1)` plus the plane rotations; resonant
/// angles `0` and `π` become identity or `-I` blocks and produce a warning.
pub fn ellipsoid_descriptor(e: &Ellipsoid, i: usize) -> Result<(NormalFormDescriptor, Vec<String>), DynError> {
    let mut d = NormalFormDescriptor { p_minus: 1, ..Default::default() };
    let mut warnings = Vec::new();
    for j in 0..e.n() {
        if j == i {
            continue;
        }
        let a = plane_angle(e, i, j)?;
        let t = a.exact().expect("exact");
        if t.is_zero() {
            warnings.push(format!("orbit {i}: plane {j} is resonant (angle 0), counted as an identity block"));
            d.p_zero += 1;
        } else if t.is_rational() && t.as_rational() == Some(&Rational::from_integer(1.into())) {
            warnings.push(format!("orbit {i}: plane {j} is resonant (angle π), counted as a -I block"));
            d.q_zero += 1;
        } else {
            d.theta_list.push(a);
        }
    }
    Ok((d, warnings))
}

#[derive(Clone, Debug)]
pub struct EllipsoidRecords {
    pub records: Vec<PathRecord>,
    pub reports: Vec<OracleReport>,
    pub warnings: Vec<String>,
}

/// One record per plane, with `i(γ,1)` from the crossing oracle on the
/// integrated path and `ν(γ,1)` cross-checked against the numeric monodromy.
pub fn ellipsoid_characteristics(e: &Ellipsoid, steps: usize) -> Result<EllipsoidRecords, DynError> {
    e.validate()?;
    let mut out = EllipsoidRecords { records: Vec::new(), reports: Vec::new(), warnings: Vec::new() };
    let sample_every = (steps / 20_000).max(1);
    for i in 0..e.n() {
        let (d, w) = ellipsoid_descriptor(e, i)?;
        out.warnings.extend(w);
        let path = linearized_path(e, i, steps, sample_every)?;
        let report = crossing_oracle_i1(&path)?;
        // the flow direction always spans one kernel dimension; only report extra degeneracy
        if report.endpoint_degenerate && d.nullity_one() > 1 {
            out.warnings.push(format!("orbit {i}: degenerate endpoint beyond the flow direction, perturbed by e^(-εJ)"));
        }
        let numeric_nu = SymplecticMatrix::numeric(path.end().clone())?.nullity_omega(&Angle::turns_pi(0, 1))?;
        if numeric_nu != d.nullity_one() {
            return Err(DynError::Inconsistent(format!(
                "orbit {i}: descriptor ν₁ = {} but the numeric monodromy has {numeric_nu}",
                d.nullity_one()
            )));
        }
        let tau = e.alphas[i].try_inv()?.scale_int(2);
        let rec = PathRecord::new(format!("x{}", i + 1), e.n(), report.i1, d, tau)?;
        out.records.push(rec);
        out.reports.push(report);
    }
    check_mean_ratios(e, &out.records)?;
    Ok(out)
}

/// `î(x_i)·α_i` is the same for every orbit, i.e. `î(x_i)/î(x_j) = α_j/α_i`.
pub fn check_mean_ratios(e: &Ellipsoid, records: &[PathRecord]) -> Result<(), DynError> {
    let mut first: Option<Scalar> = None;
    for (rec, a) in records.iter().zip(&e.alphas) {
        let v = mean_index(rec)?.try_mul(a)?;
        match &first {
            None => first = Some(v),
            Some(f) if f == &v => {}
            Some(f) => {
                return Err(DynError::Inconsistent(format!(
                    "{}: î·α = {v} differs from {f}; the mean-index ratio property fails",
                    rec.label
                )))
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
