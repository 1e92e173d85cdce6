//! Small dense exact linear algebra over the scalar field and its complexification,
//! plus the polynomial tools behind exact elliptic heights.

use std::cmp::Ordering;
use std::fmt::Debug;

use crate::scalar::{Rational, Scalar, ScalarError};

pub trait Field: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Result<Self, ScalarError>;
    fn inv(&self) -> Result<Self, ScalarError>;
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Result<Self, ScalarError> {
        self.try_mul(o)
    }
    fn inv(&self) -> Result<Self, ScalarError> {
        self.try_inv()
    }
}

/// `re + i im` with exact real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CScalar {
    pub re: Scalar,
    pub im: Scalar,
}

impl CScalar {
    pub fn new(re: Scalar, im: Scalar) -> Self {
        CScalar { re, im }
    }

    pub fn real(re: Scalar) -> Self {
        CScalar { re, im: Scalar::zero() }
    }
}

impl Field for CScalar {
    fn zero() -> Self {
        CScalar::real(Scalar::zero())
    }
    fn one() -> Self {
        CScalar::real(Scalar::one())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        CScalar::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn sub(&self, o: &Self) -> Self {
        CScalar::new(&self.re - &o.re, &self.im - &o.im)
    }
    fn neg(&self) -> Self {
        CScalar::new(-&self.re, -&self.im)
    }
    fn mul(&self, o: &Self) -> Result<Self, ScalarError> {
        let re = self.re.try_mul(&o.re)? - self.im.try_mul(&o.im)?;
        let im = self.re.try_mul(&o.im)? + self.im.try_mul(&o.re)?;
        Ok(CScalar::new(re, im))
    }
    fn inv(&self) -> Result<Self, ScalarError> {
        let norm = self.re.try_mul(&self.re)? + self.im.try_mul(&self.im)?;
        let k = norm.try_inv()?;
        Ok(CScalar::new(self.re.try_mul(&k)?, (-&self.im).try_mul(&k)?))
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<F> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<F>,
}

impl<F: Field> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Mat<G> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(F::neg).collect() }
    }

    pub fn mul(&self, o: &Self) -> Result<Self, ScalarError> {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).add(&a.mul(b)?);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u64) -> Result<Self, ScalarError> {
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, k: &F) -> Result<Self, ScalarError> {
        let data = self.data.iter().map(|x| x.mul(k)).collect::<Result<_, _>>()?;
        Ok(Mat { rows: self.rows, cols: self.cols, data })
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).fold(F::zero(), |acc, i| acc.add(self.get(i, i)))
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&self) -> Result<(Self, Vec<usize>), ScalarError> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv()?;
            for j in 0..m.cols {
                let v = m.get(r, j).mul(&inv)?;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j).sub(&f.mul(m.get(r, j))?);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Ok((m, pivots))
    }

    pub fn rank(&self) -> Result<usize, ScalarError> {
        Ok(self.rref()?.1.len())
    }

    /// Column basis of the right kernel.
    pub fn kernel(&self) -> Result<Vec<Vec<F>>, ScalarError> {
        let (m, pivots) = self.rref()?;
        Ok((0..self.cols)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut x = vec![F::zero(); self.cols];
                x[free] = F::one();
                for (i, &pc) in pivots.iter().enumerate() {
                    x[pc] = m.get(i, free).neg();
                }
                x
            })
            .collect())
    }
}

impl Mat<Scalar> {
    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_f64())
    }
}

/// Polynomials as coefficient vectors, lowest degree first, no trailing zeros.
pub type Poly = Vec<Scalar>;

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Scalar::is_zero) {
        p.pop();
    }
    p
}

fn degree(p: &Poly) -> Option<usize> {
    p.len().checked_sub(1)
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let z = Scalar::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

fn poly_scale(p: &Poly, k: &Scalar) -> Result<Poly, ScalarError> {
    Ok(trim(p.iter().map(|c| c.try_mul(k)).collect::<Result<_, _>>()?))
}

fn derivative(p: &Poly) -> Poly {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c.scale_int(i as i64)).collect())
}

/// Euclidean division `a = q b + r`.
fn divmod(a: &Poly, b: &Poly) -> Result<(Poly, Poly), ScalarError> {
    let db = degree(b).ok_or(ScalarError::DivisionByZero)?;
    let lead_inv = b[db].try_inv()?;
    let mut r = a.clone();
    let mut q = vec![Scalar::zero(); a.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = r[dr].try_mul(&lead_inv)?;
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] = &r[i + shift] - &c.try_mul(bc)?;
        }
        r[dr] = Scalar::zero();
        q[shift] = c;
        r = trim(r);
    }
    Ok((trim(q), r))
}

fn monic(p: &Poly) -> Result<Poly, ScalarError> {
    match p.last() {
        Some(l) => poly_scale(p, &l.try_inv()?),
        None => Ok(Vec::new()),
    }
}

fn gcd(a: &Poly, b: &Poly) -> Result<Poly, ScalarError> {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let (_, r) = divmod(&a, &b)?;
        a = b;
        b = r;
    }
    monic(&a)
}

fn eval_rational(p: &Poly, x: &Rational) -> Scalar {
    p.iter().rev().fold(Scalar::zero(), |acc, c| &acc.scale(x) + c)
}

/// Yun's square-free factorisation: `p = c * f_1 f_2^2 f_3^3 ...`.
fn square_free_parts(p: &Poly) -> Result<Vec<Poly>, ScalarError> {
    let dp = derivative(p);
    let a = gcd(p, &dp)?;
    let (mut b, _) = divmod(p, &a)?;
    let (c, _) = divmod(&dp, &a)?;
    let mut d = poly_sub(&c, &derivative(&b));
    let mut out = Vec::new();
    while degree(&b).is_some_and(|x| x > 0) {
        let ai = gcd(&b, &d)?;
        let (nb, _) = divmod(&b, &ai)?;
        let (nc, _) = divmod(&d, &ai)?;
        out.push(ai);
        d = poly_sub(&nc, &derivative(&nb));
        b = nb;
    }
    Ok(out)
}

fn sign_changes(seq: &[Poly], x: &Rational) -> Result<usize, ScalarError> {
    let mut last: Option<Ordering> = None;
    let mut n = 0;
    for p in seq {
        let s = eval_rational(p, x).signum()?;
        if s == Ordering::Equal {
            continue;
        }
        if last.is_some_and(|l| l != s) {
            n += 1;
        }
        last = Some(s);
    }
    Ok(n)
}

/// Distinct real roots of a square-free polynomial in the closed interval.
fn distinct_roots_closed(p: &Poly, lo: &Rational, hi: &Rational) -> Result<usize, ScalarError> {
    if degree(p).is_none_or(|d| d == 0) {
        return Ok(0);
    }
    let mut seq = vec![p.clone(), derivative(p)];
    while degree(seq.last().expect("nonempty")).is_some_and(|d| d > 0) {
        let k = seq.len();
        let (_, r) = divmod(&seq[k - 2], &seq[k - 1])?;
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    let at_lo = usize::from(eval_rational(p, lo).is_zero());
    Ok(sign_changes(&seq, lo)? - sign_changes(&seq, hi)? + at_lo)
}

/// Real roots in `[lo, hi]` counted with multiplicity.
pub fn real_roots_with_multiplicity(
    p: &Poly,
    lo: &Rational,
    hi: &Rational,
) -> Result<usize, ScalarError> {
    let p = trim(p.clone());
    let mut total = 0;
    for (i, f) in square_free_parts(&p)?.iter().enumerate() {
        total += (i + 1) * distinct_roots_closed(f, lo, hi)?;
    }
    Ok(total)
}

/// Characteristic polynomial `det(zI - A)` by Faddeev-LeVerrier.
pub fn char_poly(a: &Mat<Scalar>) -> Result<Poly, ScalarError> {
    let n = a.rows;
    let mut c = vec![Scalar::zero(); n + 1];
    c[n] = Scalar::one();
    let mut mk = Mat::<Scalar>::zeros(n, n);
    let id = Mat::<Scalar>::identity(n);
    for k in 1..=n {
        mk = a.mul(&mk)?.add(&id.scale(&c[n - k + 1])?);
        let t = a.mul(&mk)?.trace();
        c[n - k] = t.scale(&Rational::new((-1).into(), (k as i64).into()));
    }
    Ok(c)
}

/// For a self-reciprocal `p` of degree `2n`, the degree-`n` polynomial `q`
/// with `p(z) = z^n q(z + 1/z)`.
pub fn palindromic_reduce(p: &Poly) -> Poly {
    let n = p.len().saturating_sub(1) / 2;
    // t_j(x) = z^j + z^-j as polynomials in x
    let mut t: Vec<Poly> = vec![vec![Scalar::from_integer(2)], vec![Scalar::zero(), Scalar::one()]];
    for j in 2..=n {
        let mut next: Poly = std::iter::once(Scalar::zero()).chain(t[j - 1].iter().cloned()).collect();
        next = poly_sub(&next, &t[j - 2]);
        t.push(next);
    }
    let mut q: Poly = vec![p[n].clone()];
    for j in 1..=n {
        let term: Poly = t[j].iter().map(|c| c.try_mul(&p[n + j]).expect("rational t_j")).collect();
        q.resize(q.len().max(term.len()), Scalar::zero());
        for (i, c) in term.into_iter().enumerate() {
            q[i] = &q[i] + &c;
        }
    }
    trim(q)
}
