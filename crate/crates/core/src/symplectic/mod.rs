//! Symplectic matrices in exact and floating-point form, the basic normal
//! forms, the ⋄-product, elliptic height and ω-nullity.

mod angle;
pub mod spectrum;

pub use angle::Angle;

use nalgebra::{Complex, DMatrix};
use thiserror::Error;

use crate::linalg::{char_poly, palindromic_reduce, real_roots_with_multiplicity, CScalar, Field, Mat};
use crate::scalar::{Rational, Scalar, ScalarError};

pub const NUMERIC_TOL: f64 = 1e-8;
pub const SYMPLECTIC_RESIDUAL: f64 = 1e-10;

#[derive(Debug, Clone, Error)]
pub enum SympError {
    #[error("mode mismatch: cannot combine exact and numeric matrices")]
    ModeMismatch,
    #[error("non-symplectic input (residual {0:e})")]
    NotSymplectic(f64),
    #[error("borderline spectrum: eigenvalue modulus {0} is within tolerance of the unit circle but not certifiably on it")]
    BorderlineSpectrum(f64),
    #[error("borderline rank: singular value {0:e} between the zero and nonzero thresholds")]
    BorderlineRank(f64),
    #[error("ambiguous cluster: eigenvalue clusters near {0} overlap within tolerance")]
    AmbiguousCluster(String),
    #[error("invalid basic form: {0}")]
    InvalidForm(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Numeric,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SymplecticMatrix {
    Exact(Mat<Scalar>),
    Numeric(DMatrix<f64>),
}

pub fn j_exact(n: usize) -> Mat<Scalar> {
    let mut j = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j.set(i, n + i, Scalar::from_integer(-1));
        j.set(n + i, i, Scalar::one());
    }
    j
}

pub fn j_numeric(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

/// `max |MᵀJM - J|`.
pub fn symplectic_residual(m: &DMatrix<f64>) -> f64 {
    let j = j_numeric(m.nrows() / 2);
    (m.transpose() * &j * m - j).amax()
}

impl SymplecticMatrix {
    /// Exact matrix; `MᵀJM = J` must hold identically.
    pub fn exact(m: Mat<Scalar>) -> Result<Self, SympError> {
        if m.rows != m.cols || m.rows % 2 != 0 {
            return Err(SympError::Dimension(format!("{}x{} is not 2n x 2n", m.rows, m.cols)));
        }
        let j = j_exact(m.rows / 2);
        if m.transpose().mul(&j)?.mul(&m)? != j {
            let r = symplectic_residual(&m.to_f64());
            return Err(SympError::NotSymplectic(r));
        }
        Ok(SymplecticMatrix::Exact(m))
    }

    pub fn numeric(m: DMatrix<f64>) -> Result<Self, SympError> {
        if m.nrows() != m.ncols() || m.nrows() % 2 != 0 {
            return Err(SympError::Dimension(format!("{}x{} is not 2n x 2n", m.nrows(), m.ncols())));
        }
        let r = symplectic_residual(&m);
        if !(r <= SYMPLECTIC_RESIDUAL) {
            return Err(SympError::NotSymplectic(r));
        }
        Ok(SymplecticMatrix::Numeric(m))
    }

    pub fn identity(n: usize) -> Self {
        SymplecticMatrix::Exact(Mat::identity(2 * n))
    }

    pub fn dim(&self) -> usize {
        match self {
            SymplecticMatrix::Exact(m) => m.rows,
            SymplecticMatrix::Numeric(m) => m.nrows(),
        }
    }

    pub fn n(&self) -> usize {
        self.dim() / 2
    }

    pub fn mode(&self) -> Mode {
        match self {
            SymplecticMatrix::Exact(_) => Mode::Exact,
            SymplecticMatrix::Numeric(_) => Mode::Numeric,
        }
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        match self {
            SymplecticMatrix::Exact(m) => m.to_f64(),
            SymplecticMatrix::Numeric(m) => m.clone(),
        }
    }

    pub fn to_numeric(&self) -> SymplecticMatrix {
        SymplecticMatrix::Numeric(self.to_f64())
    }

    pub fn as_exact(&self) -> Option<&Mat<Scalar>> {
        match self {
            SymplecticMatrix::Exact(m) => Some(m),
            SymplecticMatrix::Numeric(_) => None,
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self, SympError> {
        match (self, o) {
            (SymplecticMatrix::Exact(a), SymplecticMatrix::Exact(b)) => Ok(SymplecticMatrix::Exact(a.mul(b)?)),
            (SymplecticMatrix::Numeric(a), SymplecticMatrix::Numeric(b)) => Ok(SymplecticMatrix::Numeric(a * b)),
            _ => Err(SympError::ModeMismatch),
        }
    }

    pub fn pow(&self, m: u64) -> Result<Self, SympError> {
        match self {
            SymplecticMatrix::Exact(a) => Ok(SymplecticMatrix::Exact(a.pow(m)?)),
            SymplecticMatrix::Numeric(a) => {
                let mut acc = DMatrix::identity(a.nrows(), a.ncols());
                for _ in 0..m {
                    acc = &acc * a;
                }
                Ok(SymplecticMatrix::Numeric(acc))
            }
        }
    }

    /// Symplectic inverse `-J Mᵀ J`.
    pub fn inverse(&self) -> Result<Self, SympError> {
        let n = self.n();
        match self {
            SymplecticMatrix::Exact(a) => {
                let j = j_exact(n);
                Ok(SymplecticMatrix::Exact(j.mul(&a.transpose())?.mul(&j)?.neg()))
            }
            SymplecticMatrix::Numeric(a) => {
                let j = j_numeric(n);
                Ok(SymplecticMatrix::Numeric(-(&j * a.transpose() * &j)))
            }
        }
    }

    /// `P M P⁻¹`.
    pub fn conjugate_by(&self, p: &SymplecticMatrix) -> Result<Self, SympError> {
        p.mul(self)?.mul(&p.inverse()?)
    }

    pub fn elliptic_height(&self) -> Result<usize, SympError> {
        elliptic_height(self)
    }

    pub fn nullity_omega(&self, omega: &Angle) -> Result<usize, SympError> {
        nullity_omega(self, omega)
    }
}

/// Entries of the 2x2 blocks `A, B, C, D` of a symplectic matrix in `J` coordinates.
fn blocks<T: Clone>(get: impl Fn(usize, usize) -> T, n: usize) -> [Vec<Vec<T>>; 4] {
    let sub = |r0: usize, c0: usize| -> Vec<Vec<T>> {
        (0..n).map(|i| (0..n).map(|j| get(r0 + i, c0 + j)).collect()).collect()
    };
    [sub(0, 0), sub(0, n), sub(n, 0), sub(n, n)]
}

fn interleave<T: Clone>(x: [Vec<Vec<T>>; 4], y: [Vec<Vec<T>>; 4], zero: T, n1: usize, n2: usize) -> Vec<Vec<T>> {
    let n = n1 + n2;
    let mut out = vec![vec![zero; 2 * n]; 2 * n];
    // block (bi, bj) of the 2x2 layout maps to offsets (bi*n, bj*n)
    for (b, (bx, by)) in x.iter().zip(y.iter()).enumerate() {
        let (r0, c0) = ((b / 2) * n, (b % 2) * n);
        for i in 0..n1 {
            for j in 0..n1 {
                out[r0 + i][c0 + j] = bx[i][j].clone();
            }
        }
        for i in 0..n2 {
            for j in 0..n2 {
                out[r0 + n1 + i][c0 + n1 + j] = by[i][j].clone();
            }
        }
    }
    out
}

/// The ⋄-product: `[[A1,0,B1,0],[0,A2,0,B2],[C1,0,D1,0],[0,C2,0,D2]]`.
pub fn diamond(m1: &SymplecticMatrix, m2: &SymplecticMatrix) -> Result<SymplecticMatrix, SympError> {
    let (n1, n2) = (m1.n(), m2.n());
    match (m1, m2) {
        (SymplecticMatrix::Exact(a), SymplecticMatrix::Exact(b)) => {
            let rows = interleave(
                blocks(|i, j| a.get(i, j).clone(), n1),
                blocks(|i, j| b.get(i, j).clone(), n2),
                Scalar::zero(),
                n1,
                n2,
            );
            Ok(SymplecticMatrix::Exact(Mat::from_rows(rows)))
        }
        (SymplecticMatrix::Numeric(a), SymplecticMatrix::Numeric(b)) => {
            let rows = interleave(blocks(|i, j| a[(i, j)], n1), blocks(|i, j| b[(i, j)], n2), 0.0, n1, n2);
            let n = 2 * (n1 + n2);
            Ok(SymplecticMatrix::Numeric(DMatrix::from_fn(n, n, |i, j| rows[i][j])))
        }
        _ => Err(SympError::ModeMismatch),
    }
}

/// ⋄-product of a non-empty sequence; mixed modes are promoted to numeric.
pub fn diamond_all(parts: &[SymplecticMatrix]) -> Result<SymplecticMatrix, SympError> {
    let numeric = parts.iter().any(|p| p.mode() == Mode::Numeric);
    let mut it = parts.iter().map(|p| if numeric { p.to_numeric() } else { p.clone() });
    let first = it.next().ok_or_else(|| SympError::Dimension("empty ⋄-product".into()))?;
    it.try_fold(first, |acc, p| diamond(&acc, &p))
}

/// The basic normal forms.
#[derive(Clone, Debug, PartialEq)]
pub enum BasicForm {
    /// `D(λ)`, `λ = ±2`.
    D(i8),
    /// `N₁(λ, a)`, `λ = ±1`, `a ∈ {-1, 0, 1}`.
    N1(i8, i8),
    /// `R(θ)`.
    R(Angle),
    /// `N₂(e^{iθ}, b)`; only the triviality of `b` is retained.
    N2 { angle: Angle, nontrivial: bool },
}

impl BasicForm {
    /// `N₂` from explicit `b` entries `[b1, b2, b3, b4]`; nontrivial iff `(b2 - b3) sin θ < 0`.
    pub fn n2_from_b(angle: Angle, b: [f64; 4]) -> Result<BasicForm, SympError> {
        if b[1] == b[2] {
            return Err(SympError::InvalidForm("N2 requires b2 != b3".into()));
        }
        let (_, s) = angle.cos_sin_f64();
        Ok(BasicForm::N2 { angle, nontrivial: (b[1] - b[2]) * s < 0.0 })
    }

    pub fn dim(&self) -> usize {
        match self {
            BasicForm::N2 { .. } => 4,
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<(), SympError> {
        let ok = match self {
            BasicForm::D(l) => l.abs() == 2,
            BasicForm::N1(l, a) => l.abs() == 1 && a.abs() <= 1,
            BasicForm::R(t) | BasicForm::N2 { angle: t, .. } => t.is_admissible()?,
        };
        if ok {
            Ok(())
        } else {
            Err(SympError::InvalidForm(format!("{self:?}")))
        }
    }

    /// The matrix of the form. Exact whenever the entries are.
    pub fn to_matrix(&self) -> Result<SymplecticMatrix, SympError> {
        self.validate()?;
        let s = Scalar::from_integer;
        Ok(match self {
            BasicForm::D(l) => {
                let l = *l as i64;
                SymplecticMatrix::Exact(Mat::from_rows(vec![
                    vec![s(l), s(0)],
                    vec![s(0), Scalar::ratio(1, l)],
                ]))
            }
            BasicForm::N1(l, a) => SymplecticMatrix::Exact(Mat::from_rows(vec![
                vec![s(*l as i64), s(*a as i64)],
                vec![s(0), s(*l as i64)],
            ])),
            BasicForm::R(t) => match t.exact_trig() {
                Some((c, sn)) => SymplecticMatrix::Exact(rotation(&c, &sn)),
                None => {
                    let (c, sn) = t.cos_sin_f64();
                    SymplecticMatrix::Numeric(DMatrix::from_row_slice(2, 2, &[c, -sn, sn, c]))
                }
            },
            BasicForm::N2 { angle, nontrivial } => {
                // [[R, b], [0, R]] with b = ±R: b = R·S with S symmetric keeps it
                // symplectic, and (b2 - b3) sin θ = ∓2 sin²θ fixes the triviality
                let sign = if *nontrivial { 1 } else { -1 };
                match angle.exact_trig() {
                    Some((c, sn)) => {
                        let r = rotation(&c, &sn);
                        let b = r.scale(&s(sign))?;
                        let mut m = Mat::zeros(4, 4);
                        for i in 0..2 {
                            for j in 0..2 {
                                m.set(i, j, r.get(i, j).clone());
                                m.set(2 + i, 2 + j, r.get(i, j).clone());
                                m.set(i, 2 + j, b.get(i, j).clone());
                            }
                        }
                        SymplecticMatrix::Exact(m)
                    }
                    None => {
                        let (c, sn) = angle.cos_sin_f64();
                        let k = sign as f64;
                        SymplecticMatrix::Numeric(DMatrix::from_row_slice(
                            4,
                            4,
                            &[c, -sn, k * c, -k * sn, sn, c, k * sn, k * c, 0.0, 0.0, c, -sn, 0.0, 0.0, sn, c],
                        ))
                    }
                }
            }
        })
    }
}

/// Exact random symplectic matrix: a product of integer shears
/// `[[I, S], [0, I]]` and `[[I, 0], [S, I]]` with small symmetric `S`.
pub fn random_symplectic_exact<R: rand::Rng>(rng: &mut R, n: usize, factors: usize) -> SymplecticMatrix {
    let mut acc = Mat::<Scalar>::identity(2 * n);
    for f in 0..factors {
        let mut e = Mat::<Scalar>::identity(2 * n);
        for i in 0..n {
            for j in i..n {
                let v = Scalar::from_integer(rng.gen_range(-1..=1));
                let (r0, c0) = if f % 2 == 0 { (0, n) } else { (n, 0) };
                e.set(r0 + i, c0 + j, v.clone());
                e.set(r0 + j, c0 + i, v);
            }
        }
        acc = acc.mul(&e).expect("rational product");
    }
    SymplecticMatrix::Exact(acc)
}

fn rotation(c: &Scalar, s: &Scalar) -> Mat<Scalar> {
    Mat::from_rows(vec![vec![c.clone(), -s], vec![s.clone(), c.clone()]])
}

/// Total algebraic multiplicity of unit-circle eigenvalues.
pub fn elliptic_height(m: &SymplecticMatrix) -> Result<usize, SympError> {
    match m {
        SymplecticMatrix::Exact(a) => {
            let q = palindromic_reduce(&char_poly(a)?);
            let two = Rational::from_integer(2.into());
            Ok(2 * real_roots_with_multiplicity(&q, &-two.clone(), &two)?)
        }
        SymplecticMatrix::Numeric(a) => {
            let clusters = spectrum::clusters(a, NUMERIC_TOL)?;
            Ok(clusters.iter().filter(|c| c.on_circle).map(|c| c.multiplicity).sum())
        }
    }
}

/// `dim_C ker(M - ωI)` for `ω = e^{iθ}`.
pub fn nullity_omega(m: &SymplecticMatrix, omega: &Angle) -> Result<usize, SympError> {
    match (m, omega.exact_trig()) {
        (SymplecticMatrix::Exact(a), Some((c, s))) => {
            let w = CScalar::new(c, s);
            let mut z = a.map(|x| CScalar::real(x.clone()));
            for i in 0..z.rows {
                let v = z.get(i, i).sub(&w);
                z.set(i, i, v);
            }
            Ok(z.cols - z.rank()?)
        }
        _ => {
            let a = m.to_f64();
            let (c, s) = omega.cos_sin_f64();
            let w = Complex::new(c, s);
            let z = DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| {
                Complex::new(a[(i, j)], 0.0) - if i == j { w } else { Complex::new(0.0, 0.0) }
            });
            spectrum::numeric_nullity(&z, NUMERIC_TOL)
        }
    }
}
