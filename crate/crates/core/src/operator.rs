//! Small dense complex operators and the matrix exponential.
//!
//! Everything in the crate evolves 2- or 3-dimensional complex amplitude
//! vectors, so operators are stored inline (no allocation) and the matrix
//! exponential uses scaling-and-squaring with a Padé(13) approximant. The
//! Hamiltonians here are non-Hermitian and can be defective at exceptional
//! points (one coupling exactly zero), which rules out eigendecomposition
//! as the primary path.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

/// Dense square complex matrix of dimension 2 or 3, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    // stride 3 regardless of dim; slots outside dim x dim stay zero
    m: [C64; 9],
}

impl Operator {
    pub fn zero(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3, "operator dimension must be 2 or 3");
        Operator { dim, m: [C64::new(0.0, 0.0); 9] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Operator::zero(dim);
        for i in 0..dim {
            op.m[i * 3 + i] = C64::new(1.0, 0.0);
        }
        op
    }

    /// Build from row-major entries, rejecting non-finite values.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::invalid(format!("operator dimension {dim} not in {{2, 3}}")));
        }
        if entries.len() != dim * dim {
            return Err(Error::invalid(format!(
                "expected {} entries for a {dim}x{dim} operator, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let mut op = Operator::zero(dim);
        for (idx, &z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::invalid(format!("non-finite entry {z} at index {idx}")));
            }
            op.m[(idx / dim) * 3 + idx % dim] = z;
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        debug_assert!(row < self.dim && col < self.dim);
        self.m[row * 3 + col]
    }

    #[inline]
    pub(crate) fn set(&mut self, row: usize, col: usize, value: C64) {
        debug_assert!(row < self.dim && col < self.dim);
        self.m[row * 3 + col] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.entries_iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn entries_iter(&self) -> impl Iterator<Item = C64> + '_ {
        let dim = self.dim;
        (0..dim * dim).map(move |idx| self.m[(idx / dim) * 3 + idx % dim])
    }

    pub fn mul(&self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in operator product");
        let n = self.dim;
        let mut out = Operator::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(i, k) * rhs.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn add(&self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in operator sum");
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, out.get(i, j) + rhs.get(i, j));
            }
        }
        out
    }

    pub fn scale(&self, factor: C64) -> Operator {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, out.get(i, j) * factor);
            }
        }
        out
    }

    pub fn transpose(&self) -> Operator {
        let mut out = Operator::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn adjoint(&self) -> Operator {
        let mut out = Operator::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Maximum column sum of entry magnitudes.
    pub fn one_norm(&self) -> f64 {
        let mut max = 0.0f64;
        for j in 0..self.dim {
            let mut sum = 0.0;
            for i in 0..self.dim {
                sum += self.get(i, j).norm();
            }
            max = max.max(sum);
        }
        max
    }

    /// Largest entry magnitude of self - rhs.
    pub fn max_abs_diff(&self, rhs: &Operator) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        let mut max = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                max = max.max((self.get(i, j) - rhs.get(i, j)).norm());
            }
        }
        max
    }

    pub fn apply(&self, state: &AmplitudeState) -> AmplitudeState {
        assert_eq!(self.dim, state.dim(), "dimension mismatch in operator application");
        let mut v = [C64::new(0.0, 0.0); 3];
        for (i, slot) in v.iter_mut().enumerate().take(self.dim) {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.dim {
                acc += self.get(i, j) * state.amplitude(j);
            }
            *slot = acc;
        }
        AmplitudeState { dim: self.dim, v }
    }
}

/// Complex amplitude vector over the atomic basis; the third component is
/// present only for 3-level states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudeState {
    dim: usize,
    v: [C64; 3],
}

impl AmplitudeState {
    pub fn two(a: C64, b: C64) -> Result<Self> {
        Self::checked(2, [a, b, C64::new(0.0, 0.0)])
    }

    pub fn three(a: C64, b: C64, c: C64) -> Result<Self> {
        Self::checked(3, [a, b, c])
    }

    /// Unit vector along basis index `index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(dim == 2 || dim == 3);
        assert!(index < dim);
        let mut v = [C64::new(0.0, 0.0); 3];
        v[index] = C64::new(1.0, 0.0);
        AmplitudeState { dim, v }
    }

    fn checked(dim: usize, v: [C64; 3]) -> Result<Self> {
        for z in &v[..dim] {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::invalid(format!("non-finite amplitude {z}")));
            }
        }
        Ok(AmplitudeState { dim, v })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn amplitude(&self, index: usize) -> C64 {
        debug_assert!(index < self.dim);
        self.v[index]
    }

    pub fn a(&self) -> C64 {
        self.v[0]
    }

    pub fn b(&self) -> C64 {
        self.v[1]
    }

    pub fn c(&self) -> Option<C64> {
        (self.dim == 3).then(|| self.v[2])
    }

    pub fn norm_sq(&self) -> f64 {
        self.v[..self.dim].iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub(crate) fn raw(&self) -> [C64; 3] {
        self.v
    }

    pub(crate) fn from_raw(dim: usize, v: [C64; 3]) -> Self {
        AmplitudeState { dim, v }
    }
}

/// Time-evolution operator U(t) = exp(-i H t).
///
/// Scaling-and-squaring with the Padé(13) approximant of Higham (2005);
/// robust for non-normal and defective inputs, exact cost is irrelevant at
/// this size. For Hermitian `h` the result is unitary to ~1e-13.
pub fn expm(h: &Operator, t: f64) -> Result<Operator> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(format!("evolution time {t} must be finite and >= 0")));
    }
    if !h.is_finite() {
        return Err(Error::invalid("non-finite Hamiltonian entry".to_string()));
    }
    let a = h.scale(-I * t);
    exp_raw(&a)
}

/// Padé(13) coefficients, Higham (2005) Table 10.4.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371_920_351_148_152;

/// exp(A) for an already-assembled matrix A.
fn exp_raw(a: &Operator) -> Result<Operator> {
    let norm = a.one_norm();
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(C64::new((0.5f64).powi(squarings as i32), 0.0));

    let n = a.dim();
    let eye = Operator::identity(n);
    let a2 = scaled.mul(&scaled);
    let a4 = a2.mul(&a2);
    let a6 = a2.mul(&a4);

    let c = |k: usize| C64::new(PADE13[k], 0.0);

    // u = A (A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    let w1 = a6.scale(c(13)).add(&a4.scale(c(11))).add(&a2.scale(c(9)));
    let w2 = a6
        .mul(&w1)
        .add(&a6.scale(c(7)))
        .add(&a4.scale(c(5)))
        .add(&a2.scale(c(3)))
        .add(&eye.scale(c(1)));
    let u = scaled.mul(&w2);

    // v = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let z1 = a6.scale(c(12)).add(&a4.scale(c(10))).add(&a2.scale(c(8)));
    let v = a6
        .mul(&z1)
        .add(&a6.scale(c(6)))
        .add(&a4.scale(c(4)))
        .add(&a2.scale(c(2)))
        .add(&eye.scale(c(0)));

    // (v - u) X = (v + u)
    let num = v.add(&u);
    let den = v.add(&u.scale(C64::new(-1.0, 0.0)));
    let mut result = solve(&den, &num)
        .ok_or_else(|| Error::invalid("singular Pade denominator".to_string()))?;

    for _ in 0..squarings {
        result = result.mul(&result);
    }
    Ok(result)
}

/// Solve A X = B by Gaussian elimination with partial pivoting (n <= 3).
fn solve(a: &Operator, b: &Operator) -> Option<Operator> {
    let n = a.dim();
    let mut lhs = *a;
    let mut rhs = *b;

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = lhs.get(col, col).norm();
        for row in col + 1..n {
            let mag = lhs.get(row, col).norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_mag < 1e-300 {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                let (x, y) = (lhs.get(col, j), lhs.get(pivot_row, j));
                lhs.set(col, j, y);
                lhs.set(pivot_row, j, x);
                let (x, y) = (rhs.get(col, j), rhs.get(pivot_row, j));
                rhs.set(col, j, y);
                rhs.set(pivot_row, j, x);
            }
        }
        let pivot = lhs.get(col, col);
        for row in col + 1..n {
            let factor = lhs.get(row, col) / pivot;
            for j in col..n {
                let v = lhs.get(row, j) - factor * lhs.get(col, j);
                lhs.set(row, j, v);
            }
            for j in 0..n {
                let v = rhs.get(row, j) - factor * rhs.get(col, j);
                rhs.set(row, j, v);
            }
        }
    }

    let mut x = Operator::zero(n);
    for col in (0..n).rev() {
        for j in 0..n {
            let mut acc = rhs.get(col, j);
            for k in col + 1..n {
                acc -= lhs.get(col, k) * x.get(k, j);
            }
            x.set(col, j, acc / lhs.get(col, col));
        }
    }
    Some(x)
}
