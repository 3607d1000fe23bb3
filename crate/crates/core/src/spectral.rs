//! Spectral-radius reports with certified error bounds, and rational
//! approximation of dominant eigenvectors.
//!
//! The spectral radius of an integer matrix is bracketed exactly: the squared
//! root moduli of the characteristic polynomial `p` are among the real roots
//! of the pair-product polynomial `s(y) = prod (y - r_i r_j)` over all root
//! pairs of `p`, and the largest real root of `s` is exactly `rho^2`. That
//! largest root is isolated by Sturm bisection, which yields an interval of
//! arbitrary width around `rho` in exact arithmetic. Integer dominant roots
//! are then certified exactly, in which case the reported error bound is 0.

use crate::matrix::{IntMatrix, MatrixError, RatMatrix};
use crate::qpoly::QPoly;
use crate::util;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralError {
    Matrix(MatrixError),
    /// Power iteration did not settle within the iteration budget.
    NonConvergence { iterations: usize },
    /// A spectral hypothesis required by the operation does not hold.
    HypothesisViolated(String),
}

impl fmt::Display for SpectralError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralError::Matrix(e) => write!(f, "{e}"),
            SpectralError::NonConvergence { iterations } => {
                write!(f, "power iteration did not converge within {iterations} iterations")
            }
            SpectralError::HypothesisViolated(msg) => write!(f, "hypothesis violated: {msg}"),
        }
    }
}

impl std::error::Error for SpectralError {}

impl From<MatrixError> for SpectralError {
    fn from(e: MatrixError) -> Self {
        SpectralError::Matrix(e)
    }
}

/// Rational approximation of a dominant eigenvector together with the exact
/// relative residual `|Av - lambda v| / |v|` (reported as f64).
#[derive(Debug, Clone)]
pub struct EigvecApprox {
    pub vector: Vec<BigRational>,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// Monic characteristic polynomial, coefficients ascending.
    pub char_poly: Vec<BigInt>,
    /// Spectral radius estimate.
    pub rho: f64,
    /// `|rho - true spectral radius| <= rho_error_bound`.
    pub rho_error_bound: f64,
    /// Set exactly when an integer root of the characteristic polynomial
    /// attains the maximal modulus. Positive root preferred on ties.
    pub integer_dominant_root: Option<BigInt>,
    /// Best-effort dominant eigenvector, present when a unique simple real
    /// dominant eigenvalue is detected.
    pub dominant_eigvec: Option<EigvecApprox>,
}

const RHO_TARGET_WIDTH: f64 = 1e-10;

/// Certified spectral radius of a square integer matrix.
pub fn spectral_radius(a: &IntMatrix) -> Result<SpectrumReport, SpectralError> {
    let char_poly = a.char_poly()?;
    let p = QPoly::from_bigint_coeffs(&char_poly);

    let mut report = SpectrumReport {
        char_poly,
        rho: 0.0,
        rho_error_bound: 0.0,
        integer_dominant_root: None,
        dominant_eigvec: None,
    };

    match rho_squared_interval(&p) {
        None => {
            // Nilpotent: every eigenvalue is zero.
            report.integer_dominant_root = Some(BigInt::zero());
            return Ok(report);
        }
        Some((lo, hi)) => {
            let lo_f = util::ratio_to_f64(&lo).max(0.0).sqrt();
            let hi_f = util::ratio_to_f64(&hi).sqrt();
            report.rho = (lo_f + hi_f) / 2.0;
            report.rho_error_bound = (hi_f - lo_f) / 2.0 + 1e-12 * hi_f.max(1.0);

            // Integer dominant root: at most one integer can sit inside the
            // bracket; certify it exactly against the pair-product polynomial.
            let m = report.rho.round();
            if (m - report.rho).abs() <= report.rho_error_bound + 0.5 && m >= 0.0 {
                let m_int = BigInt::from(m as i64);
                let pos = BigRational::from_integer(m_int.clone());
                let neg = -&pos;
                let pos_is_root = p.eval(&pos).is_zero();
                let neg_is_root = p.eval(&neg).is_zero();
                if pos_is_root || neg_is_root {
                    if certify_integer_dominant(&p, &m_int) {
                        report.rho = m;
                        report.rho_error_bound = 0.0;
                        report.integer_dominant_root = Some(if pos_is_root {
                            m_int
                        } else {
                            -m_int
                        });
                    }
                }
            }
        }
    }

    // Best-effort eigenvector when the dominant eigenvalue looks unique,
    // simple and real (numeric check; the residual below is exact).
    if let DominantKind::UniqueSimpleReal(_) = dominant_structure(&p) {
        if let Ok(ev) = dominant_eigvec_approx(a, 1_000_000) {
            report.dominant_eigvec = Some(ev);
        }
    }

    Ok(report)
}

/// Exact interval `[lo, hi]` containing `rho^2`, or `None` when all
/// eigenvalues vanish.
fn rho_squared_interval(p: &QPoly) -> Option<(BigRational, BigRational)> {
    let sf = p.squarefree_part();
    // Strip the root at zero; squarefree, so multiplicity is at most one.
    let p0 = if sf.eval(&BigRational::zero()).is_zero() {
        sf.divide_out_root(&BigRational::zero(), 1)
    } else {
        sf
    };
    if p0.degree() == Some(0) {
        return None;
    }
    let s = pair_product_poly(&p0).squarefree_part();
    let chain = s.sturm_chain();

    let mut lo = BigRational::zero();
    let mut hi = s.cauchy_root_bound();
    debug_assert!(QPoly::count_roots_greater_than(&chain, &lo) >= 1);
    debug_assert_eq!(QPoly::count_roots_greater_than(&chain, &hi), 0);
    for _ in 0..256 {
        let width = util::ratio_to_f64(&(&hi - &lo));
        let rho_width = width / (1.0 + util::ratio_to_f64(&lo).max(0.0).sqrt());
        if rho_width < RHO_TARGET_WIDTH {
            break;
        }
        let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
        if QPoly::count_roots_greater_than(&chain, &mid) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo, hi))
}

/// Polynomial with roots `{ r_i * r_j }` over all ordered root pairs of the
/// monic-up-to-scale `p0`, computed by interpolating resultants.
fn pair_product_poly(p0: &QPoly) -> QPoly {
    let m = p0.degree().expect("nonzero polynomial required");
    let target_degree = m * m;
    let points: Vec<(BigRational, BigRational)> = (0..=target_degree as i64)
        .map(|t| {
            let y = BigRational::from_integer(BigInt::from(t));
            // g(x) = x^m * p0(y / x): coefficient of x^{m-k} is c_k y^k.
            let mut g = vec![BigRational::zero(); m + 1];
            for (k, c) in p0.coeffs().iter().enumerate() {
                g[m - k] = c * pow_rat(&y, k as u32);
            }
            let g = QPoly::from_coeffs(g);
            (y, p0.resultant(&g))
        })
        .collect();
    // Normalize: the resultant construction scales by a constant that does
    // not move the roots; normalization keeps coefficients small.
    let s = QPoly::interpolate(&points);
    let lc = s.leading().expect("pair-product polynomial is nonzero").clone();
    s.scale(&lc.recip())
}

fn pow_rat(base: &BigRational, exp: u32) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..exp {
        out *= base;
    }
    out
}

/// Exact check that `|m|` attains the maximal root modulus of `p`:
/// the pair-product polynomial must have no real root beyond `m^2`.
fn certify_integer_dominant(p: &QPoly, m: &BigInt) -> bool {
    let sf = p.squarefree_part();
    let p0 = if sf.eval(&BigRational::zero()).is_zero() {
        sf.divide_out_root(&BigRational::zero(), 1)
    } else {
        sf
    };
    if p0.degree() == Some(0) {
        return m.is_zero();
    }
    let s = pair_product_poly(&p0).squarefree_part();
    let chain = s.sturm_chain();
    let m_sq = BigRational::from_integer(m * m);
    QPoly::count_roots_greater_than(&chain, &m_sq) == 0
}

// ---------------------------------------------------------------------------
// Numeric root structure (used for hypothesis checks only; every value that
// feeds an exact computation is certified separately)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum DominantKind {
    /// A single simple real eigenvalue of maximal modulus (sign included).
    UniqueSimpleReal(f64),
    /// Exactly one conjugate pair of maximal modulus, both simple.
    ComplexPairSimple,
    /// Anything else (ties, repeated dominant eigenvalues, ...).
    Other,
}

pub fn dominant_structure(p: &QPoly) -> DominantKind {
    let coeffs: Vec<f64> = p
        .coeffs()
        .iter()
        .map(|c| c.to_f64().unwrap_or_else(|| util::ratio_to_f64(c)))
        .collect();
    let roots = complex_roots(&coeffs);
    if roots.is_empty() {
        return DominantKind::Other;
    }
    let max_mod = roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max_mod == 0.0 {
        return DominantKind::Other;
    }
    let tol = 1e-6 * max_mod;
    let dominant: Vec<&Complex64> = roots
        .iter()
        .filter(|z| z.norm() >= max_mod - tol)
        .collect();
    match dominant.len() {
        1 => {
            let z = dominant[0];
            if z.im.abs() <= tol {
                DominantKind::UniqueSimpleReal(z.re)
            } else {
                DominantKind::Other
            }
        }
        2 => {
            let (a, b) = (dominant[0], dominant[1]);
            let conjugate = (a.re - b.re).abs() <= tol && (a.im + b.im).abs() <= tol;
            if conjugate && a.im.abs() > tol {
                DominantKind::ComplexPairSimple
            } else {
                DominantKind::Other
            }
        }
        _ => DominantKind::Other,
    }
}

/// Durand–Kerner iteration on the monic polynomial with the given ascending
/// coefficients.
pub(crate) fn complex_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    let radius = 1.0
        + monic[..n]
            .iter()
            .map(|c| c.abs())
            .fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(radius * 0.5, angle)
        })
        .collect();
    for _ in 0..600 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() < 1e-300 {
                continue;
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-13 {
            break;
        }
    }
    roots
}

// ---------------------------------------------------------------------------
// Dominant eigenvector approximation
// ---------------------------------------------------------------------------

const POWER_ITERATION_BUDGET: usize = 20_000;

/// Power iteration followed by continued-fraction rounding to rationals with
/// denominator at most `max_denominator`. The residual is computed exactly
/// from the rounded vector. Errors out instead of returning an unconverged
/// vector.
pub fn dominant_eigvec_approx(
    a: &IntMatrix,
    max_denominator: u64,
) -> Result<EigvecApprox, SpectralError> {
    if !a.is_square() {
        return Err(MatrixError::NotSquare {
            rows: a.n_rows(),
            cols: a.n_cols(),
        }
        .into());
    }
    let n = a.n_rows();
    let af: Vec<Vec<f64>> = (0..n)
        .map(|i| a.row(i).iter().map(util::bigint_to_f64).collect())
        .collect();

    // Deterministic start; slight skew breaks symmetric ties.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 1e-4 * i as f64).collect();
    let norm0 = (v.iter().map(|x| x * x).sum::<f64>()).sqrt();
    v.iter_mut().for_each(|x| *x /= norm0);

    let mut converged = false;
    for _ in 0..POWER_ITERATION_BUDGET {
        let mut w = vec![0.0; n];
        for i in 0..n {
            w[i] = af[i].iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let dot = w.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
        let norm = (w.iter().map(|x| x * x).sum::<f64>()).sqrt();
        if norm == 0.0 {
            // A v = 0: v is an exact kernel vector and an eigenvector for 0.
            converged = true;
            break;
        }
        let sign = if dot < 0.0 { -1.0 } else { 1.0 };
        let next: Vec<f64> = w.iter().map(|x| sign * x / norm).collect();
        let delta = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        if delta < 1e-14 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SpectralError::NonConvergence {
            iterations: POWER_ITERATION_BUDGET,
        });
    }

    // Scale so the largest component is 1, then round coordinates.
    let max_abs = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if max_abs == 0.0 {
        return Err(SpectralError::NonConvergence {
            iterations: POWER_ITERATION_BUDGET,
        });
    }
    let rounded: Vec<BigRational> = v
        .iter()
        .map(|x| util::rationalize_f64(x / max_abs, max_denominator))
        .collect();
    if rounded.iter().all(|c| c.is_zero()) {
        return Err(SpectralError::NonConvergence {
            iterations: POWER_ITERATION_BUDGET,
        });
    }

    // Exact residual with the exact Rayleigh quotient of the rounded vector.
    let ar = a.to_rat();
    let av = ar.apply(&rounded)?;
    let vv: BigRational = rounded.iter().map(|x| x * x).sum();
    let vav: BigRational = rounded.iter().zip(&av).map(|(x, y)| x * y).sum();
    let lambda = &vav / &vv;
    let diff_sq: BigRational = av
        .iter()
        .zip(&rounded)
        .map(|(y, x)| {
            let d = y - &lambda * x;
            &d * &d
        })
        .sum();
    let residual = (util::ratio_to_f64(&diff_sq) / util::ratio_to_f64(&vv)).sqrt();
    Ok(EigvecApprox {
        vector: rounded,
        residual,
    })
}

/// Spectral radius of a rational matrix via integer scaling:
/// `rho(A) = rho(mA) / m` for the denominator lcm `m`.
pub fn spectral_radius_rat(a: &RatMatrix) -> Result<(f64, f64), SpectralError> {
    let m = a.denominator_lcm();
    let scaled = a.scale(&BigRational::from_integer(m.clone()));
    let int = scaled.to_int().expect("scaled matrix is integral");
    let report = spectral_radius(&int)?;
    let mf = util::bigint_to_f64(&m);
    Ok((report.rho / mf, report.rho_error_bound / mf))
}
