//! Noncommutative words in two letters and the word-trace average.
//!
//! The average over all words with n letters A and m letters B is computed
//! three independent ways: direct enumeration (the oracle), coefficient
//! extraction from Tr(A+tB)^(n+m), and the cyclic composition identity.
//! Enumeration is capped; the polynomial route is the workhorse.


use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
}

/// A word over {A, B} with letter counts tracked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn count_a(&self) -> usize {
        self.letters.iter().filter(|&&l| l == Letter::A).count()
    }

    pub fn count_b(&self) -> usize {
        self.letters.len() - self.count_a()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for l in &self.letters {
            write!(f, "{}", if *l == Letter::A { 'A' } else { 'B' })?;
        }
        Ok(())
    }
}

/// binom(n, k) in u128, saturating on overflow (anything that large is
/// over every cap we use).
pub fn binomial_u128(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    let mut c: u128 = 1;
    for i in 1..=k {
        c = match c.checked_mul((n - k + i) as u128) {
            Some(v) => v / i as u128,
            None => return u128::MAX,
        };
    }
    c
}

/// binom(n, k) as a scalar, built multiplicatively so exact mode stays exact.
pub fn binomial_scalar<S: Scalar>(n: usize, k: usize) -> S {
    let k = k.min(n - k.min(n));
    let mut c = S::one();
    for i in 1..=k {
        c = c * S::from_int((n - k + i) as i64) / S::from_int(i as i64);
    }
    c
}

fn next_multiset_permutation(letters: &mut [Letter]) -> bool {
    let len = letters.len();
    if len < 2 {
        return false;
    }
    let mut i = len - 1;
    while i > 0 && letters[i - 1] >= letters[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = len - 1;
    while letters[j] <= letters[i - 1] {
        j -= 1;
    }
    letters.swap(i - 1, j);
    letters[i..].reverse();
    true
}

/// All words with exactly n letters A and m letters B, lexicographic
/// (A-letter < B-letter), each exactly once.
pub fn enumerate_words(n: usize, m: usize) -> Result<Vec<Word>> {
    enumerate_words_with_cap(n, m, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_words_with_cap(n: usize, m: usize, cap: u128) -> Result<Vec<Word>> {
    if n + m < 1 {
        return Err(Error::contract("enumerate_words requires n + m >= 1"));
    }
    let count = binomial_u128(n + m, n);
    if count > cap {
        return Err(Error::EnumerationCap { n, m, count, cap });
    }
    let mut current: Vec<Letter> = std::iter::repeat(Letter::A)
        .take(n)
        .chain(std::iter::repeat(Letter::B).take(m))
        .collect();
    let mut out = Vec::with_capacity(count as usize);
    loop {
        out.push(Word::new(current.clone()));
        if !next_multiset_permutation(&mut current) {
            break;
        }
    }
    Ok(out)
}

/// Tr W(A, B): trace of the ordered product with A-letters -> A, B -> B.
pub fn evaluate_word<S: Scalar>(
    word: &Word,
    a: &Matrix<S>,
    b: &Matrix<S>,
) -> Result<S> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let mut acc = Matrix::<S>::identity(a.dim());
    for l in word.letters() {
        acc = acc.matmul(if *l == Letter::A { a } else { b })?;
    }
    Ok(acc.trace())
}

/// The word average by direct enumeration — the oracle route.
pub fn word_average_enumeration<S: Scalar>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    n: usize,
    m: usize,
) -> Result<S> {
    word_average_enumeration_with_cap(a, b, n, m, DEFAULT_ENUMERATION_CAP)
}

pub fn word_average_enumeration_with_cap<S: Scalar>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    n: usize,
    m: usize,
    cap: u128,
) -> Result<S> {
    if n + m == 0 {
        return Ok(Matrix::<S>::identity(a.dim()).trace());
    }
    let words = enumerate_words_with_cap(n, m, cap)?;
    let mut total = S::zero();
    for w in &words {
        total = total + evaluate_word(w, a, b)?;
    }
    Ok(total / binomial_scalar::<S>(n + m, n))
}

/// Coefficients c_0..c_N of Tr(A + tB)^N in t; c_k = binom(N,k) * avg(N-k,k).
#[derive(Debug, Clone, PartialEq)]
pub struct TracePolynomial<S: Scalar> {
    coeffs: Vec<S>,
}

impl<S: Scalar> TracePolynomial<S> {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &S {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }
}

// matrix-valued polynomial, index = degree in t, truncated at `cap`
fn poly_mat_mul_linear<S: Scalar>(
    p: &[Matrix<S>],
    a: &Matrix<S>,
    b: &Matrix<S>,
    cap: usize,
) -> Result<Vec<Matrix<S>>> {
    let d = a.dim();
    let out_len = (p.len() + 1).min(cap + 1);
    let mut out = vec![Matrix::<S>::zeros(d); out_len];
    for (k, pk) in p.iter().enumerate() {
        if k < out_len {
            out[k] = out[k].add(&pk.matmul(a)?)?;
        }
        if k + 1 < out_len {
            out[k + 1] = out[k + 1].add(&pk.matmul(b)?)?;
        }
    }
    Ok(out)
}

/// Tr((A + tB)^N) by carrying degree-capped matrix polynomials through N-1
/// multiplications; exact in exact mode.
pub fn trace_polynomial<S: Scalar>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    big_n: usize,
) -> Result<TracePolynomial<S>> {
    if big_n == 0 {
        return Err(Error::contract("trace_polynomial requires N >= 1"));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let mut poly = vec![a.clone(), b.clone()];
    for _ in 1..big_n {
        poly = poly_mat_mul_linear(&poly, a, b, big_n)?;
    }
    let mut coeffs = vec![S::zero(); big_n + 1];
    for (k, mk) in poly.iter().enumerate() {
        coeffs[k] = mk.trace();
    }
    Ok(TracePolynomial { coeffs })
}

/// The word average as c_m / binom(n+m, m) — the workhorse route.
pub fn word_average_from_polynomial<S: Scalar>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    n: usize,
    m: usize,
) -> Result<S> {
    if n + m == 0 {
        return Ok(Matrix::<S>::identity(a.dim()).trace());
    }
    let tp = trace_polynomial(a, b, n + m)?;
    Ok(tp.coeff(m).clone() / binomial_scalar::<S>(n + m, m))
}

/// All compositions (r_1, ..., r_m) of n into m nonnegative parts.
pub fn compositions(n: usize, m: usize) -> Vec<Vec<usize>> {
    assert!(m >= 1);
    let mut out = Vec::with_capacity(binomial_u128(n + m - 1, m - 1) as usize);
    let mut comp = vec![0usize; m];
    comp[0] = n;
    loop {
        out.push(comp.clone());
        if comp[m - 1] == n {
            break;
        }
        let i = comp[..m - 1]
            .iter()
            .position(|&c| c > 0)
            .expect("not yet final");
        let t = comp[i];
        comp[i] = 0;
        comp[0] = t - 1;
        comp[i + 1] += 1;
    }
    out
}

/// The word average via the cyclic composition identity
///   sum_W Tr W = ((n+m)/m) sum_{r_1+..+r_m=n} Tr(A^{r_1} B ... A^{r_m} B).
/// The m=2 case is the displayed (n+2)/2 factor; the general constant is
/// validated against the enumeration oracle in the acceptance suite.
pub fn word_average_compositions<S: Scalar>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    n: usize,
    m: usize,
) -> Result<S> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    if m == 0 {
        return Ok(a.pow(n).trace());
    }
    let a_pows: Vec<Matrix<S>> = (0..=n).map(|k| a.pow(k)).collect();
    let mut total = S::zero();
    for comp in compositions(n, m) {
        let mut acc = Matrix::<S>::identity(a.dim());
        for &r in &comp {
            acc = acc.matmul(&a_pows[r])?.matmul(b)?;
        }
        total = total + acc.trace();
    }
    let factor = S::from_int((n + m) as i64) / S::from_int(m as i64);
    Ok(total * factor / binomial_scalar::<S>(n + m, n))
}

/// Tr(A^n B^m) — the single clustered word.
pub fn clustered_trace<S: Scalar>(
    a: &Matrix<S>,
    b: &Matrix<S>,
    n: usize,
    m: usize,
) -> Result<S> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(a.pow(n).matmul(&b.pow(m))?.trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Cf64, Exact};

    fn exact(p: i64, q: i64) -> Exact {
        Exact::from_ratio(p, q)
    }

    #[test]
    fn smallest_mixed_case() {
        let words = enumerate_words(1, 1).unwrap();
        assert_eq!(words.len(), 2);
        assert_eq!(words[0].to_string(), "AB");
        assert_eq!(words[1].to_string(), "BA");
    }

    #[test]
    fn count_five_five() {
        assert_eq!(enumerate_words(5, 5).unwrap().len(), 252);
    }

    #[test]
    fn pure_b_word() {
        let words = enumerate_words(0, 3).unwrap();
        assert_eq!(words.len(), 1);
        assert_eq!(words[0].to_string(), "BBB");
    }

    #[test]
    fn cap_refusal_names_count() {
        let err = enumerate_words_with_cap(10, 10, 1000).unwrap_err();
        match err {
            Error::EnumerationCap { count, cap, .. } => {
                assert_eq!(count, 184756);
                assert_eq!(cap, 1000);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn evaluate_abab_with_identity_b() {
        let a = Matrix::diag(&[exact(2, 1), exact(3, 1)]);
        let b = Matrix::<Exact>::identity(2);
        let w = Word::new(vec![Letter::A, Letter::B, Letter::A, Letter::B]);
        assert_eq!(evaluate_word(&w, &a, &b).unwrap(), exact(13, 1));
    }

    #[test]
    fn trace_cyclicity_ab_vs_ba() {
        let a = crate::samplers::random_psd(3, crate::samplers::SpectrumProfile::Isotropic, 3)
            .unwrap();
        let b = crate::samplers::random_psd(3, crate::samplers::SpectrumProfile::Isotropic, 4)
            .unwrap();
        let ab = evaluate_word(&Word::new(vec![Letter::A, Letter::B]), &a, &b).unwrap();
        let ba = evaluate_word(&Word::new(vec![Letter::B, Letter::A]), &a, &b).unwrap();
        assert!((ab - ba).magnitude() < 1e-12 * ab.magnitude().max(1.0));
    }

    #[test]
    fn average_one_one_is_trace_ab() {
        let a = Matrix::diag(&[exact(1, 2), exact(3, 1)]);
        let b = Matrix::from_rows(vec![
            vec![exact(1, 1), exact(1, 1)],
            vec![exact(1, 1), exact(2, 1)],
        ])
        .unwrap();
        let avg = word_average_enumeration(&a, &b, 1, 1).unwrap();
        assert_eq!(avg, a.matmul(&b).unwrap().trace());
    }

    #[test]
    fn trace_polynomial_degenerate_ends() {
        let b = Matrix::diag(&[exact(2, 1), exact(1, 1)]);
        let zero = Matrix::<Exact>::zeros(2);
        let tp = trace_polynomial(&zero, &b, 4).unwrap();
        for k in 0..4 {
            assert!(num_traits::Zero::is_zero(tp.coeff(k)));
        }
        assert_eq!(tp.coeff(4), &exact(17, 1)); // 16 + 1

        let tp = trace_polynomial(&b, &zero, 4).unwrap();
        assert_eq!(tp.coeff(0), &exact(17, 1));
        for k in 1..=4 {
            assert!(num_traits::Zero::is_zero(tp.coeff(k)));
        }
    }

    #[test]
    fn polynomial_route_matches_enumeration_exact() {
        let a = Matrix::from_rows(vec![
            vec![exact(2, 1), exact(1, 1)],
            vec![exact(1, 1), exact(1, 1)],
        ])
        .unwrap();
        let b = Matrix::from_rows(vec![
            vec![exact(1, 1), exact(-1, 2)],
            vec![exact(-1, 2), exact(3, 1)],
        ])
        .unwrap();
        for (n, m) in [(1usize, 1usize), (2, 1), (2, 3), (3, 2), (0, 4)] {
            let by_enum = word_average_enumeration(&a, &b, n, m).unwrap();
            let by_poly = word_average_from_polynomial(&a, &b, n, m).unwrap();
            let by_comp = word_average_compositions(&a, &b, n, m).unwrap();
            assert_eq!(by_enum, by_poly, "poly mismatch at ({n},{m})");
            assert_eq!(by_enum, by_comp, "comp mismatch at ({n},{m})");
        }
    }

    #[test]
    fn compositions_count_and_m2_shape() {
        assert_eq!(compositions(5, 5).len(), 126);
        let c = compositions(3, 2);
        assert_eq!(c.len(), 4);
        for comp in &c {
            assert_eq!(comp.iter().sum::<usize>(), 3);
        }
    }

    #[test]
    fn edge_rows() {
        let a = Matrix::diag(&[exact(2, 1), exact(3, 1)]);
        let b = Matrix::diag(&[exact(1, 1), exact(4, 1)]);
        assert_eq!(
            word_average_from_polynomial(&a, &b, 3, 0).unwrap(),
            exact(8 + 27, 1)
        );
        assert_eq!(
            word_average_from_polynomial(&a, &b, 0, 2).unwrap(),
            exact(17, 1)
        );
        assert_eq!(word_average_compositions(&a, &b, 3, 0).unwrap(), exact(35, 1));
    }

    #[test]
    fn clustered_trace_edge_cases() {
        let a = Matrix::<Cf64>::identity(3);
        let b = Matrix::<Cf64>::identity(3);
        let t = clustered_trace(&a, &b, 0, 0).unwrap();
        assert!((t.re - 3.0).abs() < 1e-15);
    }

    #[test]
    fn commuting_pair_average_equals_clustered() {
        let (a, b) = crate::samplers::commuting_pair(3, 2).unwrap();
        let avg = word_average_from_polynomial(&a, &b, 2, 2).unwrap();
        let clu = clustered_trace(&a, &b, 2, 2).unwrap();
        assert!((avg - clu).magnitude() < 1e-12 * clu.magnitude().max(1.0));
    }
}
