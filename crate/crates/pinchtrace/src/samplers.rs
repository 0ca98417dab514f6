//! Seeded samplers for PSD matrix pairs.
//!
//! Every sampler is a pure function of (parameters, seed): same inputs,
//! bit-identical outputs. Parallel callers derive disjoint seeds with
//! [`derive_seed`].

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Cf64, Exact, Scalar};
use crate::spectral::{from_nalgebra, SpectralDecomposition};

/// SplitMix64 step; the standard cheap way to derive per-trial seeds from a
/// master seed without correlated streams.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumProfile {
    /// Eigenvalues uniform in [0, 1].
    Isotropic,
    /// Eigenvalues log-uniform over [10^-decades, 1].
    LogAnisotropic { decades: f64 },
}

fn rng_for(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Haar-ish random unitary from complex Gaussians + QR, with the column
/// phases fixed by the R diagonal so the draw is basis-uniform.
fn random_unitary(dim: usize, rng: &mut ChaCha12Rng) -> DMatrix<Cf64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Cf64::new(re, im)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Cf64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn conjugate_diag(q: &DMatrix<Cf64>, spectrum: &[f64]) -> Matrix<Cf64> {
    let d = spectrum.len();
    let diag = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Cf64::new(spectrum[i], 0.0)
        } else {
            Cf64::new(0.0, 0.0)
        }
    });
    let m = q * diag * q.adjoint();
    from_nalgebra(&m).hermitian_part()
}

/// Q diag(s) Q* with a seeded Haar unitary and a profile-driven spectrum.
pub fn random_psd(dim: usize, profile: SpectrumProfile, seed: u64) -> Result<Matrix<Cf64>> {
    if dim < 1 {
        return Err(Error::contract("random_psd requires dim >= 1"));
    }
    let mut rng = rng_for(seed);
    let q = random_unitary(dim, &mut rng);
    let spectrum: Vec<f64> = (0..dim)
        .map(|_| match profile {
            SpectrumProfile::Isotropic => rng.random::<f64>(),
            SpectrumProfile::LogAnisotropic { decades } => {
                let u: f64 = rng.random();
                10f64.powf(-decades * u)
            }
        })
        .collect();
    Ok(conjugate_diag(&q, &spectrum))
}

/// A commuting PSD pair sharing one random eigenbasis.
pub fn commuting_pair(dim: usize, seed: u64) -> Result<(Matrix<Cf64>, Matrix<Cf64>)> {
    if dim < 1 {
        return Err(Error::contract("commuting_pair requires dim >= 1"));
    }
    let mut rng = rng_for(seed);
    let q = random_unitary(dim, &mut rng);
    let a: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let b: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    Ok((conjugate_diag(&q, &a), conjugate_diag(&q, &b)))
}

/// Pair sampler used by the conjecture harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplerKind {
    Isotropic,
    LogAnisotropic { decades: f64 },
    Commuting,
}

impl SamplerKind {
    pub fn sample_pair(&self, dim: usize, seed: u64) -> Result<(Matrix<Cf64>, Matrix<Cf64>)> {
        match *self {
            SamplerKind::Isotropic => Ok((
                random_psd(dim, SpectrumProfile::Isotropic, derive_seed(seed, 0))?,
                random_psd(dim, SpectrumProfile::Isotropic, derive_seed(seed, 1))?,
            )),
            SamplerKind::LogAnisotropic { decades } => Ok((
                random_psd(
                    dim,
                    SpectrumProfile::LogAnisotropic { decades },
                    derive_seed(seed, 0),
                )?,
                random_psd(
                    dim,
                    SpectrumProfile::LogAnisotropic { decades },
                    derive_seed(seed, 1),
                )?,
            )),
            SamplerKind::Commuting => commuting_pair(dim, seed),
        }
    }

    pub fn as_str(&self) -> String {
        match *self {
            SamplerKind::Isotropic => "isotropic".into(),
            SamplerKind::LogAnisotropic { decades } => format!("log-anisotropic:{decades}"),
            SamplerKind::Commuting => "commuting".into(),
        }
    }
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "isotropic" {
            Ok(SamplerKind::Isotropic)
        } else if s == "commuting" {
            Ok(SamplerKind::Commuting)
        } else if let Some(rest) = s.strip_prefix("log-anisotropic") {
            let decades = rest
                .strip_prefix(':')
                .map(|d| {
                    d.parse::<f64>()
                        .map_err(|e| Error::Parse(format!("bad decades {d:?}: {e}")))
                })
                .transpose()?
                .unwrap_or(6.0);
            Ok(SamplerKind::LogAnisotropic { decades })
        } else {
            Err(Error::Parse(format!(
                "unknown sampler {s:?} (isotropic | log-anisotropic[:D] | commuting)"
            )))
        }
    }
}

// ---------------------------------------------------------------------------
// Exact rational instances
// ---------------------------------------------------------------------------

/// Random rational PSD matrix L L^T with small integer-over-power-of-two
/// entries; spectrum is generally irrational but the matrix is exactly PSD.
pub fn random_rational_psd(dim: usize, seed: u64) -> Matrix<Exact> {
    let mut rng = rng_for(seed);
    let l = Matrix::<Exact>::from_fn(dim, |_, _| {
        Exact::from_ratio(rng.random_range(-8i64..=8), 1 << rng.random_range(0u32..3))
    });
    l.matmul(&l.transpose()).expect("same dim").hermitian_part()
}

/// Random rational symmetric matrix with a known rational spectrum:
/// A = sum lambda_k P_k where the P_k come from rational Gram-Schmidt
/// (projectors need no square roots: P = sum g g^T / |g|^2).
pub fn random_rational_spectral(
    dim: usize,
    seed: u64,
) -> (Matrix<Exact>, SpectralDecomposition<Exact>) {
    let mut rng = rng_for(seed);
    // independent random integer vectors, orthogonalized exactly
    let mut basis: Vec<Vec<Exact>> = Vec::new();
    while basis.len() < dim {
        let v: Vec<Exact> = (0..dim)
            .map(|_| Exact::from_int(rng.random_range(-5i64..=5)))
            .collect();
        let mut g = v;
        for prev in &basis {
            let num: Exact = prev
                .iter()
                .zip(&g)
                .fold(Exact::from_int(0), |acc, (p, x)| acc + p.clone() * x.clone());
            let den: Exact = prev
                .iter()
                .fold(Exact::from_int(0), |acc, p| acc + p.clone() * p.clone());
            let coef = num / den;
            for (gi, pi) in g.iter_mut().zip(prev) {
                *gi = gi.clone() - coef.clone() * pi.clone();
            }
        }
        if g.iter().any(|x| !num_traits::Zero::is_zero(x)) {
            basis.push(g);
        }
    }
    // group directions into clusters of size 1 or 2
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < dim {
        let take = if i + 1 < dim && rng.random_bool(0.3) { 2 } else { 1 };
        clusters.push((i..i + take).collect());
        i += take;
    }
    // distinct nonnegative eigenvalues, descending
    let mut values: Vec<Exact> = Vec::new();
    while values.len() < clusters.len() {
        let cand = Exact::from_ratio(rng.random_range(0i64..=24), 8);
        if !values.contains(&cand) {
            values.push(cand);
        }
    }
    values.sort_by(|a, b| b.cmp(a));

    let projector_of = |members: &[usize]| -> Matrix<Exact> {
        let mut p = Matrix::zeros(dim);
        for &k in members {
            let g = &basis[k];
            let norm2: Exact = g
                .iter()
                .fold(Exact::from_int(0), |acc, x| acc + x.clone() * x.clone());
            let rank_one = Matrix::from_fn(dim, |r, c| {
                g[r].clone() * g[c].clone() / norm2.clone()
            });
            p = p.add(&rank_one).expect("same dim");
        }
        p
    };

    let projectors: Vec<Matrix<Exact>> =
        clusters.iter().map(|c| projector_of(c)).collect();
    let mut a = Matrix::zeros(dim);
    for (lam, p) in values.iter().zip(&projectors) {
        a = a.add(&p.scale(lam)).expect("same dim");
    }
    a.refresh_hermitian();
    let dec = SpectralDecomposition::from_parts(values, projectors, &a)
        .expect("constructed decomposition is valid");
    (a, dec)
}
