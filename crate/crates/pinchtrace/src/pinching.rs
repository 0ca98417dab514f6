//! The pinching map E_A, the common-part decomposition, and the proved
//! two-B sandwich machinery.
//!
//! E_A(B) = sum_k P_k B P_k compresses B onto the commutant of A. The
//! word average of (A, E_A(B)) is the commuting contribution of the pair;
//! what the average carries above it is the noncommutative gap. For m = 2
//! both the average and the gap have closed forms in the h_n kernel, which
//! here are evaluated as basis-invariant block sums over the spectral
//! projectors (pairs inside one cluster count as equal eigenvalues).

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::report::InequalityReport;
use crate::scalar::Scalar;
use crate::spectral::{psd_check, PsdCheck, SpectralDecompose, SpectralDecomposition, CLUSTER_REL_TOL};
use crate::words::{clustered_trace, word_average_from_polynomial};

/// B split into its pinched part and the off-diagonal complement.
#[derive(Debug, Clone)]
pub struct PinchingDecomposition<S: Scalar> {
    pub pinched: Matrix<S>,
    pub complement: Matrix<S>,
    pub basis: SpectralDecomposition<S>,
}

/// E_A(B) = sum_k P_k B P_k.
pub fn pinch<S: Scalar>(b: &Matrix<S>, dec: &SpectralDecomposition<S>) -> Result<Matrix<S>> {
    if b.dim() != dec.dim() {
        return Err(Error::DimMismatch {
            left: b.dim(),
            right: dec.dim(),
        });
    }
    let mut acc = Matrix::<S>::zeros(b.dim());
    for p in dec.projectors() {
        acc = acc.add(&p.matmul(b)?.matmul(p)?)?;
    }
    let mut acc = acc;
    acc.refresh_hermitian();
    Ok(acc)
}

/// B = E_A(B) + (B - E_A(B)).
pub fn decompose<S: Scalar>(
    b: &Matrix<S>,
    dec: &SpectralDecomposition<S>,
) -> Result<PinchingDecomposition<S>> {
    let pinched = pinch(b, dec)?;
    let complement = b.sub(&pinched)?;
    Ok(PinchingDecomposition {
        pinched,
        complement,
        basis: dec.clone(),
    })
}

/// Tr(A^n E_A(B)^m), evaluated per eigenspace: sum_k lambda_k^n
/// Tr((P_k B P_k)^m). Equals the word average of (A, E_A(B)).
pub fn pinched_average<S: Scalar>(
    dec: &SpectralDecomposition<S>,
    b: &Matrix<S>,
    n: usize,
    m: usize,
) -> Result<S> {
    if b.dim() != dec.dim() {
        return Err(Error::DimMismatch {
            left: b.dim(),
            right: dec.dim(),
        });
    }
    let mut total = S::zero();
    for (lam, p) in dec.eigenvalues().iter().zip(dec.projectors()) {
        let weight = lam.pow_usize(n);
        let block_trace = if m == 0 {
            p.trace() // identity restricted to the eigenspace
        } else {
            p.matmul(b)?.matmul(p)?.pow(m).trace()
        };
        total = total + weight * block_trace;
    }
    Ok(total)
}

/// A_{n,m}(A,B) - A_{n,m}(A,E_A(B)); the sign of this gap is the subject
/// of the pinching refinement conjecture.
pub fn noncommutative_gap<S: Scalar + SpectralDecompose>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    n: usize,
    m: usize,
) -> Result<S> {
    let dec = S::spectral_decompose(a, CLUSTER_REL_TOL)?;
    noncommutative_gap_with(&dec, a, b, n, m)
}

pub fn noncommutative_gap_with<S: Scalar>(
    dec: &SpectralDecomposition<S>,
    a: &Matrix<S>,
    b: &Matrix<S>,
    n: usize,
    m: usize,
) -> Result<S> {
    let average = word_average_from_polynomial(a, b, n, m)?;
    let pinched = pinched_average(dec, b, n, m)?;
    Ok(average - pinched)
}

/// h_n(x, y) = sum_{r=0}^{n} x^r y^{n-r}, by direct summation (no closed
/// form: x ~ y would cancel catastrophically).
pub fn h_poly<S: Scalar>(n: usize, x: &S, y: &S) -> S {
    let mut total = S::zero();
    for r in 0..=n {
        total = total + x.pow_usize(r) * y.pow_usize(n - r);
    }
    total
}

/// The m = 2 closed forms:
///   average = (1/(n+1)) sum_{k,l} h_n(lambda_k, lambda_l) Tr(P_k B P_l B)
///   gap     = the same sum restricted to k != l.
/// Tr(P_k B P_l B) is the block Frobenius weight sum_{i in k, j in l}
/// |b_ij|^2 in any eigenbasis, so no within-eigenspace diagonalization is
/// needed and the computation is exact in exact mode.
pub fn two_b_closed_form<S: Scalar>(
    dec: &SpectralDecomposition<S>,
    b: &Matrix<S>,
    n: usize,
) -> Result<(S, S)> {
    if b.dim() != dec.dim() {
        return Err(Error::DimMismatch {
            left: b.dim(),
            right: dec.dim(),
        });
    }
    let pb: Vec<Matrix<S>> = dec
        .projectors()
        .iter()
        .map(|p| p.matmul(b))
        .collect::<Result<_>>()?;
    let inv_n1 = S::one() / S::from_int((n + 1) as i64);
    let mut average = S::zero();
    let mut gap = S::zero();
    for (k, lam_k) in dec.eigenvalues().iter().enumerate() {
        for (l, lam_l) in dec.eigenvalues().iter().enumerate() {
            let weight = h_poly(n, lam_k, lam_l) * pb[k].matmul(&pb[l])?.trace();
            average = average + weight.clone();
            if k != l {
                gap = gap + weight;
            }
        }
    }
    Ok((average * inv_n1.clone(), gap * inv_n1))
}

/// Check the two-B sandwich pinched <= average <= clustered on one pair,
/// reporting the three values and both margins.
pub fn sandwich_check<S: Scalar + SpectralDecompose + PsdCheck>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    n: usize,
    tol: f64,
) -> Result<InequalityReport<S>> {
    if !psd_check(a, tol)? {
        return Err(Error::contract("sandwich_check: A is not PSD"));
    }
    if !psd_check(b, tol)? {
        return Err(Error::contract("sandwich_check: B is not PSD"));
    }
    let dec = S::spectral_decompose(a, CLUSTER_REL_TOL)?;
    let average = word_average_from_polynomial(a, b, n, 2)?;
    let pinched = pinched_average(&dec, b, n, 2)?;
    let clustered = clustered_trace(a, b, n, 2)?;
    Ok(InequalityReport::from_values(
        0,
        0,
        a.dim(),
        n,
        2,
        average,
        pinched,
        clustered,
        tol,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::{commuting_pair, random_psd, SpectrumProfile};
    use crate::scalar::{Cf64, Exact};
    use crate::spectral::spectral_decompose_float;

    fn exact(p: i64, q: i64) -> Exact {
        Exact::from_ratio(p, q)
    }

    #[test]
    fn identity_basis_pinches_to_b_itself() {
        let a = Matrix::<Cf64>::identity(3);
        let b = random_psd(3, SpectrumProfile::Isotropic, 11).unwrap();
        let dec = spectral_decompose_float(&a, CLUSTER_REL_TOL).unwrap();
        let e = pinch(&b, &dec).unwrap();
        assert!(e.sub(&b).unwrap().is_zero_within(1e-12));
        // and Tr(A^n E^m) = Tr(B^m)
        let pa = pinched_average(&dec, &b, 4, 2).unwrap();
        let expect = b.pow(2).trace();
        assert!((pa - expect).magnitude() < 1e-12 * expect.magnitude().max(1.0));
    }

    #[test]
    fn distinct_diagonal_pinches_to_diagonal_part() {
        let a = Matrix::diag(&[Cf64::new(3.0, 0.0), Cf64::new(2.0, 0.0), Cf64::new(1.0, 0.0)]);
        let b = random_psd(3, SpectrumProfile::Isotropic, 5).unwrap();
        let dec = spectral_decompose_float(&a, CLUSTER_REL_TOL).unwrap();
        let e = pinch(&b, &dec).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { *b.get(i, j) } else { Cf64::new(0.0, 0.0) };
                assert!((*e.get(i, j) - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn complement_properties() {
        let a = random_psd(4, SpectrumProfile::Isotropic, 21).unwrap();
        let b = random_psd(4, SpectrumProfile::Isotropic, 22).unwrap();
        let dec = spectral_decompose_float(&a, CLUSTER_REL_TOL).unwrap();
        let pd = decompose(&b, &dec).unwrap();
        // pinched + complement = B
        assert!(pd
            .pinched
            .add(&pd.complement)
            .unwrap()
            .sub(&b)
            .unwrap()
            .is_zero_within(1e-12 * b.max_row_sum().max(1.0)));
        // Tr(complement) = 0 (pinching is trace-preserving)
        assert!(pd.complement.trace().magnitude() < 1e-12 * b.max_row_sum().max(1.0));
        // P_k complement P_k = 0 for every k
        for p in pd.basis.projectors() {
            let compressed = p.matmul(&pd.complement).unwrap().matmul(p).unwrap();
            assert!(compressed.is_zero_within(1e-10 * b.max_row_sum().max(1.0)));
        }
        // E_A(B) commutes with A
        let comm = a
            .matmul(&pd.pinched)
            .unwrap()
            .sub(&pd.pinched.matmul(&a).unwrap())
            .unwrap();
        assert!(comm.is_zero_within(1e-10 * a.max_row_sum() * b.max_row_sum()));
        // idempotence
        let again = pinch(&pd.pinched, &dec).unwrap();
        assert!(again
            .sub(&pd.pinched)
            .unwrap()
            .is_zero_within(1e-12 * b.max_row_sum().max(1.0)));
    }

    #[test]
    fn commuting_b_has_zero_complement_and_gap() {
        let (a, b) = commuting_pair(3, 7).unwrap();
        let dec = spectral_decompose_float(&a, CLUSTER_REL_TOL).unwrap();
        let pd = decompose(&b, &dec).unwrap();
        let scale = b.max_row_sum().max(1.0);
        assert!(pd.complement.is_zero_within(1e-10 * scale));
        let gap = noncommutative_gap(&a, &b, 3, 3).unwrap();
        assert!(gap.magnitude() < 1e-12 * scale.powi(3));
    }

    #[test]
    fn h_poly_values() {
        assert_eq!(h_poly(0, &exact(7, 1), &exact(5, 1)), exact(1, 1));
        assert_eq!(h_poly(2, &exact(1, 1), &exact(1, 1)), exact(3, 1));
        assert_eq!(h_poly(3, &exact(2, 1), &exact(1, 1)), exact(15, 1));
    }

    #[test]
    fn two_b_matches_enumeration_on_random_pairs() {
        for seed in 0..10u64 {
            let a = random_psd(4, SpectrumProfile::Isotropic, 100 + seed).unwrap();
            let b = random_psd(4, SpectrumProfile::Isotropic, 200 + seed).unwrap();
            let dec = spectral_decompose_float(&a, CLUSTER_REL_TOL).unwrap();
            for n in [0usize, 1, 3, 5] {
                let (avg, gap) = two_b_closed_form(&dec, &b, n).unwrap();
                let by_enum =
                    crate::words::word_average_enumeration(&a, &b, n, 2).unwrap();
                assert!(
                    (avg - by_enum).magnitude() < 1e-10 * by_enum.magnitude().max(1.0),
                    "closed form disagrees with enumeration at n={n}"
                );
                assert!(gap.real_part() >= -1e-10 * avg.magnitude().max(1.0));
            }
        }
    }

    #[test]
    fn two_b_gap_zero_for_diagonal_b_distinct_a() {
        let a = Matrix::diag(&[Cf64::new(4.0, 0.0), Cf64::new(2.0, 0.0), Cf64::new(1.0, 0.0)]);
        let b = Matrix::diag(&[Cf64::new(1.0, 0.0), Cf64::new(2.0, 0.0), Cf64::new(3.0, 0.0)]);
        let dec = spectral_decompose_float(&a, CLUSTER_REL_TOL).unwrap();
        let (_, gap) = two_b_closed_form(&dec, &b, 4).unwrap();
        assert!(gap.magnitude() < 1e-14);
    }

    #[test]
    fn two_b_n0_is_frobenius_norm() {
        let b = random_psd(3, SpectrumProfile::Isotropic, 33).unwrap();
        let a = random_psd(3, SpectrumProfile::Isotropic, 34).unwrap();
        let dec = spectral_decompose_float(&a, CLUSTER_REL_TOL).unwrap();
        let (avg, _) = two_b_closed_form(&dec, &b, 0).unwrap();
        let tr_b2 = b.pow(2).trace();
        assert!((avg - tr_b2).magnitude() < 1e-12 * tr_b2.magnitude().max(1.0));
    }

    #[test]
    fn scalar_am_gm_kernel_bound() {
        // (2/(n+1)) h_n(a,b) <= a^n + b^n for a, b >= 0
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let a = 3.0 * next();
            let b = 3.0 * next();
            for n in 0..=8usize {
                let h = h_poly(
                    n,
                    &Cf64::new(a, 0.0),
                    &Cf64::new(b, 0.0),
                )
                .re;
                let lhs = 2.0 / (n as f64 + 1.0) * h;
                let rhs = a.powi(n as i32) + b.powi(n as i32);
                assert!(lhs <= rhs + 1e-12 * rhs.max(1.0));
            }
        }
    }

    #[test]
    fn sandwich_check_commuting_margins_vanish() {
        let (a, b) = commuting_pair(4, 17).unwrap();
        let rep = sandwich_check(&a, &b, 5, 1e-10).unwrap();
        assert!(rep.sandwich_ok());
        let scale = rep.average.magnitude().max(1.0);
        assert!(rep.gap.magnitude() < 1e-10 * scale);
        assert!(rep.clustered_margin.magnitude() < 1e-10 * scale);
    }

    #[test]
    fn sandwich_check_rejects_non_psd() {
        let a = Matrix::diag(&[Cf64::new(1.0, 0.0), Cf64::new(-1.0, 0.0)]);
        let b = Matrix::<Cf64>::identity(2);
        assert!(sandwich_check(&a, &b, 2, 0.0).is_err());
    }
}
