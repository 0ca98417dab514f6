//! Spectral decompositions with eigenvalue clustering, and PSD checks.
//!
//! Float mode diagonalizes numerically and merges near-degenerate
//! eigenvalues into clusters so that pinching sees a discrete eigenspace
//! structure. Exact mode factors the characteristic polynomial over the
//! rationals (verified root by root) and builds projectors by Lagrange
//! interpolation; inputs with irrational spectra are rejected unless the
//! caller supplies projectors.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Cf64, Exact, Scalar};

/// Default relative gap below which float eigenvalues merge into a cluster.
pub const CLUSTER_REL_TOL: f64 = 1e-10;

/// Relative tolerance for the float-mode projector/reconstruction checks.
pub const SPECTRAL_CHECK_REL_TOL: f64 = 1e-10;

/// Distinct eigenvalues of a Hermitian matrix with orthogonal spectral
/// projectors, sorted by descending eigenvalue.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition<S: Scalar> {
    eigenvalues: Vec<S>,
    projectors: Vec<Matrix<S>>,
}

impl<S: Scalar> SpectralDecomposition<S> {
    /// Build from caller-supplied parts, validating the projector algebra
    /// and the reconstruction against `source`.
    pub fn from_parts(
        eigenvalues: Vec<S>,
        projectors: Vec<Matrix<S>>,
        source: &Matrix<S>,
    ) -> Result<Self> {
        if eigenvalues.len() != projectors.len() || eigenvalues.is_empty() {
            return Err(Error::contract(
                "eigenvalue and projector lists must be nonempty and equal length",
            ));
        }
        let mut pairs: Vec<(S, Matrix<S>)> =
            eigenvalues.into_iter().zip(projectors).collect();
        pairs.sort_by(|a, b| {
            b.0.real_part()
                .partial_cmp(&a.0.real_part())
                .expect("real eigenvalues")
        });
        let (eigenvalues, projectors): (Vec<S>, Vec<Matrix<S>>) =
            pairs.into_iter().unzip();
        let dec = SpectralDecomposition {
            eigenvalues,
            projectors,
        };
        dec.validate(source)?;
        Ok(dec)
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn eigenvalues(&self) -> &[S] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[Matrix<S>] {
        &self.projectors
    }

    pub fn reconstruct(&self) -> Matrix<S> {
        let mut acc = Matrix::zeros(self.dim());
        for (lam, p) in self.eigenvalues.iter().zip(&self.projectors) {
            acc = acc.add(&p.scale(lam)).expect("same dim");
        }
        acc
    }

    /// Check sum-to-identity, mutual orthogonality, idempotence and the
    /// reconstruction of `source`, exactly in exact mode and within
    /// `SPECTRAL_CHECK_REL_TOL * max(1, ||source||)` in float mode.
    pub fn validate(&self, source: &Matrix<S>) -> Result<()> {
        let d = self.dim();
        let tol = match S::MODE {
            crate::scalar::ScalarMode::Exact => 0.0,
            crate::scalar::ScalarMode::Float => {
                SPECTRAL_CHECK_REL_TOL * source.max_row_sum().max(1.0)
            }
        };
        let mut sum = Matrix::zeros(d);
        for p in &self.projectors {
            if p.dim() != d {
                return Err(Error::contract("projector dimension mismatch"));
            }
            sum = sum.add(p)?;
        }
        if !sum.sub(&Matrix::identity(d))?.is_zero_within(tol) {
            return Err(Error::contract("projectors do not sum to identity"));
        }
        for (k, pk) in self.projectors.iter().enumerate() {
            for (l, pl) in self.projectors.iter().enumerate() {
                let prod = pk.matmul(pl)?;
                let expect = if k == l { pk.clone() } else { Matrix::zeros(d) };
                if !prod.sub(&expect)?.is_zero_within(tol) {
                    return Err(Error::contract(
                        "projectors are not an orthogonal resolution",
                    ));
                }
            }
        }
        if !self.reconstruct().sub(source)?.is_zero_within(tol) {
            return Err(Error::contract(
                "eigenvalue/projector pairs do not reconstruct the source",
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Float path
// ---------------------------------------------------------------------------

pub fn to_nalgebra(m: &Matrix<Cf64>) -> DMatrix<Cf64> {
    DMatrix::from_fn(m.dim(), m.dim(), |i, j| *m.get(i, j))
}

pub fn from_nalgebra(m: &DMatrix<Cf64>) -> Matrix<Cf64> {
    Matrix::from_fn(m.nrows(), |i, j| m[(i, j)])
}

/// Full Hermitian eigendecomposition, eigenvalues descending with
/// multiplicity, eigenvector matrix column-aligned. No clustering.
pub fn hermitian_eigen(m: &Matrix<Cf64>) -> Result<(Vec<f64>, Matrix<Cf64>)> {
    if !m.is_hermitian() {
        return Err(Error::contract("hermitian matrix required"));
    }
    let eig = to_nalgebra(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..m.dim()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(m.dim(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Numerically diagonalize, then merge eigenvalues whose gap falls below
/// `cluster_tol * max(1, |lambda|)` into a single cluster whose projector
/// is the sum of the rank-one eigenprojectors.
pub fn spectral_decompose_float(
    m: &Matrix<Cf64>,
    cluster_tol: f64,
) -> Result<SpectralDecomposition<Cf64>> {
    let (values, vectors) = hermitian_eigen(m)?;
    let d = m.dim();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..d {
        let start_new = match clusters.last() {
            None => true,
            Some(cluster) => {
                let prev = values[*cluster.last().unwrap()];
                let gap = prev - values[i];
                gap > cluster_tol * prev.abs().max(values[i].abs()).max(1.0)
            }
        };
        if start_new {
            clusters.push(vec![i]);
        } else {
            clusters.last_mut().unwrap().push(i);
        }
    }
    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut projectors = Vec::with_capacity(clusters.len());
    for cluster in &clusters {
        let mean = cluster.iter().map(|&i| values[i]).sum::<f64>() / cluster.len() as f64;
        eigenvalues.push(Cf64::new(mean, 0.0));
        let mut p = Matrix::zeros(d);
        for &col in cluster {
            let rank_one = Matrix::from_fn(d, |i, j| {
                *vectors.get(i, col) * vectors.get(j, col).conj()
            });
            p = p.add(&rank_one)?;
        }
        projectors.push(p.hermitian_part());
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        projectors,
    })
}

// ---------------------------------------------------------------------------
// Exact path
// ---------------------------------------------------------------------------

/// Monic characteristic polynomial det(lambda I - M) by Faddeev-LeVerrier.
/// Returned as coefficients c[0..=d] with c[d] = 1.
pub fn charpoly_exact(m: &Matrix<Exact>) -> Vec<Exact> {
    let d = m.dim();
    let mut coeffs = vec![Exact::zero(); d + 1];
    coeffs[d] = Exact::one();
    let mut aux = Matrix::<Exact>::identity(d);
    for k in 1..=d {
        let prod = m.matmul(&aux).expect("same dim");
        let c = -prod.trace() / Exact::from_int(k as i64);
        coeffs[d - k] = c.clone();
        aux = prod.add(&Matrix::identity(d).scale(&c)).expect("same dim");
    }
    coeffs
}

fn poly_eval(coeffs: &[Exact], x: &Exact) -> Exact {
    let mut acc = Exact::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x.clone() + c.clone();
    }
    acc
}

/// Synthetic division by (lambda - root); the division must be exact.
fn poly_deflate(coeffs: &[Exact], root: &Exact) -> Vec<Exact> {
    let d = coeffs.len() - 1;
    let mut out = vec![Exact::zero(); d];
    let mut carry = coeffs[d].clone();
    for k in (0..d).rev() {
        out[k] = carry.clone();
        carry = coeffs[k].clone() + carry * root.clone();
    }
    debug_assert!(carry.is_zero(), "deflation by a non-root");
    out
}

/// Best rational approximation of `v` by continued fractions, capped at
/// denominator `max_den`. Used only to propose candidates; every candidate
/// is verified exactly against the characteristic polynomial.
fn rational_candidate(v: f64, max_den: u64) -> Option<Exact> {
    if !v.is_finite() {
        return None;
    }
    let mut x = v;
    let (mut p0, mut q0) = (BigInt::from(1), BigInt::from(0));
    let (mut p1, mut q1) = (BigInt::from(x.floor() as i64), BigInt::from(1));
    x -= x.floor();
    for _ in 0..64 {
        if q1 > BigInt::from(max_den) {
            break;
        }
        if x.abs() < 1e-18 {
            break;
        }
        x = 1.0 / x;
        let a = x.floor();
        if a >= 1e18 {
            break;
        }
        x -= a;
        let a = BigInt::from(a as i64);
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
    }
    if q1.is_zero() || q1 > BigInt::from(max_den) {
        if q0.is_zero() {
            return None;
        }
        return Some(BigRational::new(p0, q0));
    }
    Some(BigRational::new(p1, q1))
}

const CANDIDATE_MAX_DEN: u64 = 10_000_000;

/// Factor the characteristic polynomial of a rational symmetric matrix over
/// the rationals. Float eigenvalues propose candidates; each is verified
/// exactly and deflated with its multiplicity. Fails with `Unsupported` if
/// any root is irrational (or has a denominator too large to recover).
fn rational_spectrum(m: &Matrix<Exact>) -> Result<Vec<(Exact, usize)>> {
    let d = m.dim();
    let coeffs = charpoly_exact(m);
    let (float_values, _) = hermitian_eigen(&m.to_float())?;
    let scale = m.max_row_sum().max(1.0);

    let mut candidates: Vec<Exact> = Vec::new();
    for v in float_values {
        // try a few nearby snaps: the value itself and a zero snap
        let mut local: Vec<Exact> = Vec::new();
        if v.abs() <= 1e-9 * scale {
            local.push(Exact::zero());
        }
        if let Some(c) = rational_candidate(v, CANDIDATE_MAX_DEN) {
            local.push(c);
        }
        for c in local {
            if !candidates.contains(&c) {
                candidates.push(c);
            }
        }
    }

    let mut remaining = coeffs;
    let mut roots: Vec<(Exact, usize)> = Vec::new();
    for cand in candidates {
        let mut mult = 0;
        while remaining.len() > 1 && poly_eval(&remaining, &cand).is_zero() {
            remaining = poly_deflate(&remaining, &cand);
            mult += 1;
        }
        if mult > 0 {
            roots.push((cand, mult));
        }
    }
    let found: usize = roots.iter().map(|(_, m)| m).sum();
    if found != d {
        return Err(Error::unsupported(format!(
            "characteristic polynomial does not factor over the rationals \
             ({found} of {d} roots found); supply projectors explicitly"
        )));
    }
    roots.sort_by(|a, b| b.0.cmp(&a.0));
    Ok(roots)
}

/// Exact spectral decomposition via Lagrange interpolation on the distinct
/// rational eigenvalues: P_k = prod_{l != k} (M - lambda_l I)/(lambda_k - lambda_l).
pub fn spectral_decompose_exact(m: &Matrix<Exact>) -> Result<SpectralDecomposition<Exact>> {
    if !m.is_hermitian() {
        return Err(Error::contract("hermitian (real symmetric) matrix required"));
    }
    let d = m.dim();
    let roots = rational_spectrum(m)?;
    let eigenvalues: Vec<Exact> = roots.iter().map(|(r, _)| r.clone()).collect();
    let mut projectors = Vec::with_capacity(eigenvalues.len());
    for k in 0..eigenvalues.len() {
        let mut p = Matrix::<Exact>::identity(d);
        for (l, lam_l) in eigenvalues.iter().enumerate() {
            if l == k {
                continue;
            }
            let shifted = m.sub(&Matrix::identity(d).scale(lam_l))?;
            let denom = eigenvalues[k].clone() - lam_l.clone();
            p = p.matmul(&shifted)?.scale(&(Exact::one() / denom));
        }
        projectors.push(p);
    }
    let dec = SpectralDecomposition {
        eigenvalues,
        projectors,
    };
    dec.validate(m)?;
    Ok(dec)
}

/// Mode-dispatching spectral decomposition.
pub trait SpectralDecompose: Scalar {
    fn spectral_decompose(
        m: &Matrix<Self>,
        cluster_tol: f64,
    ) -> Result<SpectralDecomposition<Self>>;
}

impl SpectralDecompose for Cf64 {
    fn spectral_decompose(
        m: &Matrix<Self>,
        cluster_tol: f64,
    ) -> Result<SpectralDecomposition<Self>> {
        spectral_decompose_float(m, cluster_tol)
    }
}

impl SpectralDecompose for Exact {
    fn spectral_decompose(
        m: &Matrix<Self>,
        _cluster_tol: f64,
    ) -> Result<SpectralDecomposition<Self>> {
        spectral_decompose_exact(m)
    }
}

// ---------------------------------------------------------------------------
// Positivity checks
// ---------------------------------------------------------------------------

fn max_row_sum_exact(m: &Matrix<Exact>) -> Exact {
    let mut best = Exact::zero();
    for i in 0..m.dim() {
        let mut row = Exact::zero();
        for j in 0..m.dim() {
            row += m.get(i, j).abs();
        }
        if row > best {
            best = row;
        }
    }
    best
}

/// True iff every eigenvalue of Hermitian `m` is >= -tol * max(1, ||m||).
///
/// Float mode checks the numerical spectrum directly. Exact mode shifts by
/// the tolerance and applies the coefficient sign certificate: a real-rooted
/// monic polynomial has all roots >= 0 iff (-1)^(d-k) c_k >= 0 for every k.
pub fn psd_check<S: PsdCheck>(m: &Matrix<S>, tol: f64) -> Result<bool> {
    if !m.is_hermitian() {
        return Err(Error::contract("psd_check requires a Hermitian matrix"));
    }
    S::psd_check_impl(m, tol)
}

pub trait PsdCheck: Scalar {
    fn psd_check_impl(m: &Matrix<Self>, tol: f64) -> Result<bool>;
}

impl PsdCheck for Cf64 {
    fn psd_check_impl(m: &Matrix<Self>, tol: f64) -> Result<bool> {
        let (values, _) = hermitian_eigen(m)?;
        let bound = -tol * m.max_row_sum().max(1.0);
        Ok(values.iter().all(|&v| v >= bound))
    }
}

impl PsdCheck for Exact {
    fn psd_check_impl(m: &Matrix<Self>, tol: f64) -> Result<bool> {
        let shifted = if tol == 0.0 {
            m.clone()
        } else {
            let tol_rat = Exact::from_f64(tol)
                .ok_or_else(|| Error::contract("non-finite tolerance"))?;
            let scale = max_row_sum_exact(m).max(Exact::one());
            m.add(&Matrix::identity(m.dim()).scale(&(tol_rat * scale)))?
        };
        let coeffs = charpoly_exact(&shifted);
        let d = coeffs.len() - 1;
        for (k, c) in coeffs.iter().enumerate().take(d) {
            let signed = if (d - k) % 2 == 1 { -c.clone() } else { c.clone() };
            if signed.is_negative() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn exact(p: i64, q: i64) -> Exact {
        Exact::from_ratio(p, q)
    }

    #[test]
    fn identity_decomposes_to_one_projector() {
        let m = Matrix::<Cf64>::identity(3);
        let dec = spectral_decompose_float(&m, CLUSTER_REL_TOL).unwrap();
        assert_eq!(dec.len(), 1);
        assert!((dec.eigenvalues()[0].re - 1.0).abs() < 1e-14);
        assert!(dec.projectors()[0]
            .sub(&Matrix::identity(3))
            .unwrap()
            .is_zero_within(1e-12));
    }

    #[test]
    fn repeated_eigenvalue_clusters() {
        let m = Matrix::diag(&[Cf64::new(3.0, 0.0), Cf64::new(3.0, 0.0), Cf64::new(1.0, 0.0)]);
        let dec = spectral_decompose_float(&m, CLUSTER_REL_TOL).unwrap();
        assert_eq!(dec.len(), 2);
        assert!((dec.eigenvalues()[0].re - 3.0).abs() < 1e-12);
        assert!((dec.eigenvalues()[1].re - 1.0).abs() < 1e-12);
        // ranks 2 and 1
        assert!((dec.projectors()[0].trace().re - 2.0).abs() < 1e-10);
        assert!((dec.projectors()[1].trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exact_decompose_diag_with_multiplicity() {
        let m = Matrix::diag(&[exact(3, 1), exact(3, 1), exact(1, 1)]);
        let dec = spectral_decompose_exact(&m).unwrap();
        assert_eq!(dec.eigenvalues(), &[exact(3, 1), exact(1, 1)]);
        assert_eq!(dec.projectors()[0].trace(), exact(2, 1));
        assert_eq!(dec.reconstruct(), m);
    }

    #[test]
    fn exact_decompose_rejects_irrational_spectrum() {
        // [[0,1],[1,1]] has eigenvalues (1 +- sqrt(5))/2
        let m = Matrix::from_rows(vec![
            vec![exact(0, 1), exact(1, 1)],
            vec![exact(1, 1), exact(1, 1)],
        ])
        .unwrap();
        match spectral_decompose_exact(&m) {
            Err(Error::Unsupported(_)) => {}
            other => panic!("expected Unsupported, got {other:?}"),
        }
    }

    #[test]
    fn exact_decompose_offdiagonal_rational_spectrum() {
        // [[0,1],[1,0]] has eigenvalues +-1 and rational projectors
        let m = Matrix::from_rows(vec![
            vec![exact(0, 1), exact(1, 1)],
            vec![exact(1, 1), exact(0, 1)],
        ])
        .unwrap();
        let dec = spectral_decompose_exact(&m).unwrap();
        assert_eq!(dec.eigenvalues(), &[exact(1, 1), exact(-1, 1)]);
        assert_eq!(dec.reconstruct(), m);
        assert_eq!(dec.projectors()[0].get(0, 1), &exact(1, 2));
    }

    #[test]
    fn psd_check_examples() {
        let zero = Matrix::<Exact>::zeros(3);
        assert!(psd_check(&zero, 0.0).unwrap());

        let indef = Matrix::diag(&[exact(1, 1), exact(-1, 1)]);
        assert!(!psd_check(&indef, 0.0).unwrap());

        let indef_f = Matrix::diag(&[Cf64::new(1.0, 0.0), Cf64::new(-1.0, 0.0)]);
        assert!(!psd_check(&indef_f, 0.0).unwrap());
        // within tolerance when the shift covers the dip
        assert!(psd_check(&indef_f, 1.5).unwrap());
        assert!(psd_check(&Matrix::diag(&[exact(1, 1), exact(-1, 1)]), 1.5).unwrap());

        let non_herm = Matrix::from_rows(vec![
            vec![Cf64::new(0.0, 0.0), Cf64::new(1.0, 0.0)],
            vec![Cf64::new(2.0, 0.0), Cf64::new(0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(psd_check(&non_herm, 0.0), Err(Error::Contract(_))));
    }

    #[test]
    fn charpoly_matches_known_case() {
        // diag(1,2): (l-1)(l-2) = l^2 - 3l + 2
        let m = Matrix::diag(&[exact(1, 1), exact(2, 1)]);
        let c = charpoly_exact(&m);
        assert_eq!(c, vec![exact(2, 1), exact(-3, 1), exact(1, 1)]);
    }
}
