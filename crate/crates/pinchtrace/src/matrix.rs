//! Dense square matrices over a scalar mode.
//!
//! Row-major storage, Hermitian-capable. Exact mode holds real symmetric
//! rational matrices; float mode holds complex Hermitian ones. The JSON
//! interchange format used by every CLI command lives here too.


use crate::error::{Error, Result};
use crate::scalar::{Cf64, Exact, Scalar, ScalarMode};

/// Relative tolerance for the float-mode Hermitian entry check.
pub const HERMITIAN_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Matrix<S: Scalar> {
    dim: usize,
    entries: Vec<S>,
    hermitian: bool,
}

// equality is entrywise; the hermitian flag is a cached property
impl<S: Scalar> PartialEq for Matrix<S> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.entries == other.entries
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            entries: vec![S::zero(); dim * dim],
            hermitian: true,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = S::one();
        }
        m
    }

    pub fn diag(values: &[S]) -> Self {
        let dim = values.len();
        let mut m = Self::zeros(dim);
        for (i, v) in values.iter().enumerate() {
            m.entries[i * dim + i] = v.clone();
        }
        m.hermitian = values.iter().all(|v| v.imag_part() == 0.0);
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::contract("matrix rows must form a square"));
        }
        let entries: Vec<S> = rows.into_iter().flatten().collect();
        let mut m = Matrix {
            dim,
            entries,
            hermitian: false,
        };
        m.hermitian = m.detect_hermitian();
        Ok(m)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        let mut m = Matrix {
            dim,
            entries,
            hermitian: false,
        };
        m.hermitian = m.detect_hermitian();
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.entries[i * self.dim + j] = v;
        self.hermitian = false;
    }

    /// Re-run the Hermitian detection (exact equality in exact mode,
    /// 1e-12 * max row sum in float mode) and update the flag.
    pub fn refresh_hermitian(&mut self) -> bool {
        self.hermitian = self.detect_hermitian();
        self.hermitian
    }

    fn detect_hermitian(&self) -> bool {
        let tol = match S::MODE {
            ScalarMode::Exact => 0.0,
            ScalarMode::Float => HERMITIAN_REL_TOL * self.max_row_sum().max(1.0),
        };
        for i in 0..self.dim {
            for j in 0..=i {
                let a = self.get(i, j).clone();
                let b = self.get(j, i).conj();
                if (a - b).magnitude() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// (M + M*)/2 — projects onto the Hermitian part and sets the flag.
    pub fn hermitian_part(&self) -> Self {
        let half = S::from_ratio(1, 2);
        let mut m = Self::from_fn(self.dim, |i, j| {
            (self.get(i, j).clone() + self.get(j, i).conj()) * half.clone()
        });
        m.hermitian = true;
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::from_fn(self.dim, |i, j| self.get(j, i).conj());
        m.hermitian = self.hermitian;
        m
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut m = Self::from_fn(self.dim, |i, j| {
            self.get(i, j).clone() + other.get(i, j).clone()
        });
        m.hermitian = self.hermitian && other.hermitian;
        Ok(m)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut m = Self::from_fn(self.dim, |i, j| {
            self.get(i, j).clone() - other.get(i, j).clone()
        });
        m.hermitian = self.hermitian && other.hermitian;
        Ok(m)
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut m = Self::from_fn(self.dim, |i, j| self.get(i, j).clone() * s.clone());
        m.hermitian = self.hermitian && s.imag_part() == 0.0;
        m
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let d = self.dim;
        let mut entries = vec![S::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let aik = self.get(i, k);
                if aik.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let v = entries[i * d + j].clone()
                        + aik.clone() * other.get(k, j).clone();
                    entries[i * d + j] = v;
                }
            }
        }
        Ok(Matrix {
            dim: d,
            entries,
            hermitian: false,
        })
    }

    /// M^k with M^0 = I.
    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::identity(self.dim);
        for _ in 0..k {
            acc = acc.matmul(self).expect("same dim");
        }
        acc
    }

    pub fn trace(&self) -> S {
        (0..self.dim).fold(S::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    /// Max row sum of |entries| — the cheap, monotone spectral-norm proxy
    /// used for all tolerance scaling.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self.get(i, j).magnitude())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.magnitude())
            .fold(0.0, f64::max)
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.entries.iter().all(|e| e.magnitude() <= tol)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = (0..self.dim)
            .map(|i| {
                serde_json::Value::Array(
                    (0..self.dim).map(|j| self.get(i, j).json_value()).collect(),
                )
            })
            .collect();
        serde_json::json!({
            "dim": self.dim,
            "mode": S::MODE.as_str(),
            "entries": rows,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let dim = v["dim"]
            .as_u64()
            .ok_or_else(|| Error::Parse("matrix json: missing dim".into()))?
            as usize;
        let mode = v["mode"]
            .as_str()
            .ok_or_else(|| Error::Parse("matrix json: missing mode".into()))?;
        if mode != S::MODE.as_str() {
            return Err(Error::Parse(format!(
                "matrix json: mode {mode:?} does not match requested {}",
                S::MODE.as_str()
            )));
        }
        let rows = v["entries"]
            .as_array()
            .ok_or_else(|| Error::Parse("matrix json: missing entries".into()))?;
        if rows.len() != dim {
            return Err(Error::Parse("matrix json: row count != dim".into()));
        }
        let mut out = Vec::with_capacity(dim);
        for row in rows {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Parse("matrix json: row is not an array".into()))?;
            if row.len() != dim {
                return Err(Error::Parse("matrix json: row length != dim".into()));
            }
            out.push(row.iter().map(S::from_json).collect::<Result<Vec<S>>>()?);
        }
        Self::from_rows(out)
    }
}

impl Matrix<Exact> {
    /// Lossy downcast for running float engines on exact inputs.
    pub fn to_float(&self) -> Matrix<Cf64> {
        let mut m = Matrix::from_fn(self.dim, |i, j| {
            Cf64::new(self.get(i, j).real_part(), 0.0)
        });
        m.hermitian = self.hermitian;
        m
    }
}

/// Mode-erased matrix for file IO; CLI commands dispatch on this.
#[derive(Debug, Clone)]
pub enum AnyMatrix {
    Exact(Matrix<Exact>),
    Float(Matrix<Cf64>),
}

impl AnyMatrix {
    pub fn mode(&self) -> ScalarMode {
        match self {
            AnyMatrix::Exact(_) => ScalarMode::Exact,
            AnyMatrix::Float(_) => ScalarMode::Float,
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v["mode"].as_str() {
            Some("exact") => Ok(AnyMatrix::Exact(Matrix::from_json(v)?)),
            Some("float") => Ok(AnyMatrix::Float(Matrix::from_json(v)?)),
            other => Err(Error::Parse(format!("matrix json: bad mode {other:?}"))),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            AnyMatrix::Exact(m) => m.to_json(),
            AnyMatrix::Float(m) => m.to_json(),
        }
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let v: serde_json::Value = serde_json::from_str(&text)?;
        Self::from_json(&v)
    }

    /// Coerce to float mode (exact entries evaluate to f64).
    pub fn into_float(self) -> Matrix<Cf64> {
        match self {
            AnyMatrix::Float(m) => m,
            AnyMatrix::Exact(m) => m.to_float(),
        }
    }

    pub fn into_exact(self) -> Result<Matrix<Exact>> {
        match self {
            AnyMatrix::Exact(m) => Ok(m),
            AnyMatrix::Float(_) => Err(Error::unsupported(
                "cannot promote a float matrix to exact mode",
            )),
        }
    }
}
