//! Degree sequences of monomial maps and their asymptotics: exact degree
//! lists, an independent symbolic-composition oracle, growth exponents,
//! periodic asymptotic constants, the normalized-degree scan for complex
//! spectra, and dynamical-degree estimation from matrix norms.

use crate::divisor::{homogenization_matrix, nu, nu_int, DivisorError};
use crate::fan::WeightedLattice;
use crate::matrix::{IntMatrix, MatrixError, RatMatrix};
use crate::poly::{PolyError, PolynomialMap, SparsePoly};
use crate::qpoly::QPoly;
use crate::spectral::{spectral_radius, DominantKind, SpectralError, SpectrumReport};
use crate::stability::{non_stabilizable_2x2, StabilityError, TwoByTwoStabilization};
use crate::util;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsError {
    Matrix(MatrixError),
    Divisor(String),
    Poly(PolyError),
    Spectral(String),
    SingularMatrix,
    /// The rational matrix does not map the weighted lattice into itself.
    LatticeNotPreserved,
    KMaxTooSmall { needed: u32 },
    NonConvergence(String),
    HypothesisViolated(String),
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsError::Matrix(e) => write!(f, "{e}"),
            DynamicsError::Divisor(msg) => write!(f, "{msg}"),
            DynamicsError::Poly(e) => write!(f, "{e}"),
            DynamicsError::Spectral(msg) => write!(f, "{msg}"),
            DynamicsError::SingularMatrix => write!(f, "matrix must have nonzero determinant"),
            DynamicsError::LatticeNotPreserved => {
                write!(f, "matrix does not preserve the weighted lattice")
            }
            DynamicsError::KMaxTooSmall { needed } => {
                write!(f, "k_max too small for a stable estimate (need at least {needed})")
            }
            DynamicsError::NonConvergence(msg) => write!(f, "no convergence: {msg}"),
            DynamicsError::HypothesisViolated(msg) => write!(f, "hypothesis violated: {msg}"),
        }
    }
}

impl std::error::Error for DynamicsError {}

impl From<MatrixError> for DynamicsError {
    fn from(e: MatrixError) -> Self {
        DynamicsError::Matrix(e)
    }
}

impl From<DivisorError> for DynamicsError {
    fn from(e: DivisorError) -> Self {
        DynamicsError::Divisor(e.to_string())
    }
}

impl From<PolyError> for DynamicsError {
    fn from(e: PolyError) -> Self {
        DynamicsError::Poly(e)
    }
}

impl From<SpectralError> for DynamicsError {
    fn from(e: SpectralError) -> Self {
        DynamicsError::Spectral(e.to_string())
    }
}

impl From<StabilityError> for DynamicsError {
    fn from(e: StabilityError) -> Self {
        DynamicsError::HypothesisViolated(e.to_string())
    }
}

// ---------------------------------------------------------------------------
// Degree sequences
// ---------------------------------------------------------------------------

/// Exact degrees of the iterates on projective space:
/// entry `k-1` is the degree of the k-th iterate, `k = 1..=k_max`.
pub fn degree_sequence(a: &IntMatrix, k_max: u32) -> Result<Vec<BigInt>, DynamicsError> {
    if !a.is_square() {
        return Err(MatrixError::NotSquare {
            rows: a.n_rows(),
            cols: a.n_cols(),
        }
        .into());
    }
    if a.det()?.is_zero() {
        return Err(DynamicsError::SingularMatrix);
    }
    let mut out = Vec::with_capacity(k_max as usize);
    let mut power = a.clone();
    for k in 1..=k_max {
        if k > 1 {
            power = power.mul(a)?;
        }
        out.push(nu_int(&power)?);
    }
    Ok(out)
}

/// Exact weighted degrees of the iterates on a weighted projective space.
/// The matrix is rational in the standard basis and must map the weighted
/// lattice into itself.
pub fn weighted_degree_sequence(
    a: &RatMatrix,
    lattice: &WeightedLattice,
    k_max: u32,
) -> Result<Vec<BigRational>, DynamicsError> {
    if a.det()?.is_zero() {
        return Err(DynamicsError::SingularMatrix);
    }
    if !lattice
        .preserves_lattice(a)
        .map_err(|e| DynamicsError::Divisor(e.to_string()))?
    {
        return Err(DynamicsError::LatticeNotPreserved);
    }
    let mut out = Vec::with_capacity(k_max as usize);
    let mut power = a.clone();
    for k in 1..=k_max {
        if k > 1 {
            power = power.mul(a)?;
        }
        out.push(nu(&power)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Symbolic-composition oracle
// ---------------------------------------------------------------------------

/// Degree of the k-th iterate computed without the degree formula: compose
/// the homogenized monomial components symbolically, strip the common
/// monomial factor after every step, and read off the shared total degree.
pub fn oracle_degree_by_composition(
    a: &IntMatrix,
    k: u32,
    budget: usize,
) -> Result<BigInt, DynamicsError> {
    if k == 0 {
        return Ok(BigInt::one());
    }
    if a.det()?.is_zero() {
        return Err(DynamicsError::SingularMatrix);
    }
    let h = homogenization_matrix(a)?;
    let base = PolynomialMap::from_exponent_matrix(h.matrix())?;
    let mut current = base.clone();
    for _ in 2..=k {
        current = base.compose(&current, budget)?;
        current = strip_monomial_content(&current)?;
    }
    let current = strip_monomial_content(&current)?;
    // All components are monomials of one common total degree.
    let mut degree: Option<BigInt> = None;
    for comp in current.components() {
        let (exps, _) = comp.terms().next().expect("monomial component");
        let total: i64 = exps.iter().sum();
        match &degree {
            None => degree = Some(BigInt::from(total)),
            Some(d) => {
                assert_eq!(
                    *d,
                    BigInt::from(total),
                    "homogenized components must share a total degree"
                );
            }
        }
    }
    Ok(degree.expect("nonempty map"))
}

/// Divide every (monomial) component by the common monomial factor.
fn strip_monomial_content(map: &PolynomialMap) -> Result<PolynomialMap, DynamicsError> {
    let n = map.n_vars();
    let mut content = vec![i64::MAX; n];
    for comp in map.components() {
        let (exps, _) = comp
            .terms()
            .next()
            .expect("monomial map component is a single term");
        debug_assert_eq!(comp.n_terms(), 1);
        for (slot, &e) in content.iter_mut().zip(exps) {
            *slot = (*slot).min(e);
        }
    }
    if content.iter().all(|&c| c == 0) {
        return Ok(map.clone());
    }
    let comps = map
        .components()
        .iter()
        .map(|comp| {
            let (exps, coeff) = comp.terms().next().unwrap();
            let shifted: Vec<i64> = exps.iter().zip(&content).map(|(e, c)| e - c).collect();
            SparsePoly::monomial(n, shifted, coeff.clone())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PolynomialMap::new(map.vars().to_vec(), comps)?)
}

// ---------------------------------------------------------------------------
// Growth exponent
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Derived from exact rank chains on the dominant eigenspaces.
    Exact,
    /// Least-squares fit of the log-normalized tail.
    Fitted { slope: f64, residual: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthExponent {
    pub ell: u32,
    pub provenance: Provenance,
}

/// The integer `ell` with `deg(f^k) ~ k^ell rho^k`; `ell + 1` is the largest
/// dominant Jordan block size. Exact when every eigenvalue of maximal
/// modulus is the integer `lambda` or `-lambda` (decided exactly); otherwise
/// fitted from the degree sequence tail with the residual reported.
pub fn growth_exponent(
    a: &IntMatrix,
    degrees: &[BigInt],
) -> Result<GrowthExponent, DynamicsError> {
    let report = spectral_radius(a)?;
    if let Some(lam) = &report.integer_dominant_root {
        let m = lam.abs();
        if m.is_zero() {
            return Err(DynamicsError::SingularMatrix);
        }
        let p = QPoly::from_bigint_coeffs(&report.char_poly);
        let m_rat = BigRational::from_integer(m.clone());
        let mult_pos = p.root_multiplicity(&m_rat);
        let mult_neg = p.root_multiplicity(&(-m_rat.clone()));
        let mut rest = p.clone();
        if mult_pos > 0 {
            rest = rest.divide_out_root(&m_rat, mult_pos);
        }
        if mult_neg > 0 {
            rest = rest.divide_out_root(&(-m_rat.clone()), mult_neg);
        }
        // Exact only when no further eigenvalue shares the maximal modulus.
        let exact_applicable = if rest.degree().unwrap_or(0) == 0 {
            true
        } else {
            let sf = rest.squarefree_part();
            let s = pair_product_for(&sf);
            let chain = s.sturm_chain();
            let m_sq = &m_rat * &m_rat;
            !s.eval(&m_sq).is_zero() && QPoly::count_roots_greater_than(&chain, &m_sq) == 0
        };
        if exact_applicable {
            let mut block = 0;
            if mult_pos > 0 {
                block = block.max(largest_jordan_block(a, &m)?);
            }
            if mult_neg > 0 {
                block = block.max(largest_jordan_block(a, &(-m))?);
            }
            return Ok(GrowthExponent {
                ell: (block - 1) as u32,
                provenance: Provenance::Exact,
            });
        }
    }
    fitted_growth_exponent(a.n_rows(), report.rho, degrees)
}

fn pair_product_for(p0: &QPoly) -> QPoly {
    // Same construction as the spectral module: roots are pairwise products.
    let m = p0.degree().expect("nonzero polynomial");
    let points: Vec<(BigRational, BigRational)> = (0..=(m * m) as i64)
        .map(|t| {
            let y = BigRational::from_integer(BigInt::from(t));
            let mut g = vec![BigRational::zero(); m + 1];
            for (k, c) in p0.coeffs().iter().enumerate() {
                let mut yk = BigRational::one();
                for _ in 0..k {
                    yk *= &y;
                }
                g[m - k] = c * yk;
            }
            (y.clone(), p0.resultant(&QPoly::from_coeffs(g)))
        })
        .collect();
    QPoly::interpolate(&points)
}

fn largest_jordan_block(a: &IntMatrix, lambda: &BigInt) -> Result<usize, DynamicsError> {
    let n = a.n_rows();
    let mut shifted = a.to_rat();
    for i in 0..n {
        let v = shifted.entry(i, i) - BigRational::from_integer(lambda.clone());
        shifted.set_entry(i, i, v);
    }
    let mut prev = n;
    let mut power = RatMatrix::identity(n);
    for j in 1..=n {
        power = power.mul(&shifted)?;
        let r = power.rank();
        if r == prev {
            return Ok(j - 1);
        }
        prev = r;
    }
    Ok(n)
}

/// Growth exponent for a rational (weighted-lattice) matrix: `A` and any
/// integer multiple `m A` share their Jordan structure while
/// `rho(A) = rho(mA) / m`, so the exact path runs on the scaled integer
/// matrix and the fit uses the weighted degrees directly.
pub fn growth_exponent_weighted(
    a: &RatMatrix,
    degrees: &[BigRational],
) -> Result<GrowthExponent, DynamicsError> {
    let m = a.denominator_lcm();
    let scaled = a
        .scale(&BigRational::from_integer(m.clone()))
        .to_int()
        .expect("scaled matrix is integral");
    let report = spectral_radius(&scaled)?;
    if let Some(lam) = &report.integer_dominant_root {
        let mag = lam.abs();
        if mag.is_zero() {
            return Err(DynamicsError::SingularMatrix);
        }
        let p = QPoly::from_bigint_coeffs(&report.char_poly);
        let m_rat = BigRational::from_integer(mag.clone());
        let mult_pos = p.root_multiplicity(&m_rat);
        let mult_neg = p.root_multiplicity(&(-m_rat.clone()));
        let mut rest = p.clone();
        if mult_pos > 0 {
            rest = rest.divide_out_root(&m_rat, mult_pos);
        }
        if mult_neg > 0 {
            rest = rest.divide_out_root(&(-m_rat.clone()), mult_neg);
        }
        let exact_applicable = if rest.degree().unwrap_or(0) == 0 {
            true
        } else {
            let sf = rest.squarefree_part();
            let s = pair_product_for(&sf);
            let chain = s.sturm_chain();
            let m_sq = &m_rat * &m_rat;
            !s.eval(&m_sq).is_zero() && QPoly::count_roots_greater_than(&chain, &m_sq) == 0
        };
        if exact_applicable {
            let mut block = 0;
            if mult_pos > 0 {
                block = block.max(largest_jordan_block(&scaled, &mag)?);
            }
            if mult_neg > 0 {
                block = block.max(largest_jordan_block(&scaled, &(-mag))?);
            }
            return Ok(GrowthExponent {
                ell: (block - 1) as u32,
                provenance: Provenance::Exact,
            });
        }
    }
    let rho = report.rho / util::bigint_to_f64(&m);
    let ln_degrees: Vec<f64> = degrees.iter().map(util::ratio_ln).collect();
    fitted_growth_exponent_ln(a.n_rows(), rho, &ln_degrees)
}

fn fitted_growth_exponent(
    n: usize,
    rho: f64,
    degrees: &[BigInt],
) -> Result<GrowthExponent, DynamicsError> {
    let ln_degrees: Vec<f64> = degrees.iter().map(util::bigint_ln).collect();
    fitted_growth_exponent_ln(n, rho, &ln_degrees)
}

fn fitted_growth_exponent_ln(
    n: usize,
    rho: f64,
    ln_degrees: &[f64],
) -> Result<GrowthExponent, DynamicsError> {
    let k_max = ln_degrees.len();
    if k_max < 20 {
        return Err(DynamicsError::KMaxTooSmall { needed: 20 });
    }
    let lo = k_max / 2;
    let points: Vec<(f64, f64)> = (lo..k_max)
        .map(|idx| {
            let k = (idx + 1) as f64;
            let y = ln_degrees[idx] - k * rho.ln();
            (k.ln(), y)
        })
        .collect();
    let (slope, residual) = least_squares_slope(&points);
    let ell = slope.round().clamp(0.0, (n - 1) as f64) as u32;
    Ok(GrowthExponent {
        ell,
        provenance: Provenance::Fitted { slope, residual },
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = mean_y - slope * mean_x;
    let rss: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    (slope, (rss / n).sqrt())
}

// ---------------------------------------------------------------------------
// Asymptotic constants
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct AsymptoticConstants {
    /// One limit estimate per residue class modulo the period.
    pub constants: Vec<f64>,
    /// Cauchy-tail gap per residue class (last vs previous value).
    pub convergence_gaps: Vec<f64>,
    /// Value of the spectral-projection formula when a unique positive real
    /// dominant eigenvalue exists.
    pub projection_value: Option<f64>,
}

/// Per-residue limits of `deg(f^k) / rho^k` along arithmetic progressions
/// `k = p*j + l`. Convergence is verified empirically against `tol`.
pub fn asymptotic_constants(
    a: &IntMatrix,
    degrees: &[BigInt],
    period: u32,
    tol: f64,
) -> Result<AsymptoticConstants, DynamicsError> {
    if period == 0 {
        return Err(DynamicsError::HypothesisViolated("period must be positive".into()));
    }
    let report = spectral_radius(a)?;
    let rho = report.rho;
    if rho <= 0.0 {
        return Err(DynamicsError::SingularMatrix);
    }
    let p = period as usize;
    let k_max = degrees.len();
    if k_max < 3 * p {
        return Err(DynamicsError::KMaxTooSmall {
            needed: (3 * p) as u32,
        });
    }
    let value_at = |k: usize| -> f64 {
        // deg_k / rho^k via logs; exact values can be astronomically large.
        (util::bigint_ln(&degrees[k - 1]) - (k as f64) * rho.ln()).exp()
    };
    let mut constants = Vec::with_capacity(p);
    let mut gaps = Vec::with_capacity(p);
    for l in 0..p {
        // Largest two indices congruent to l mod p (k = 1..=k_max).
        let mut ks: Vec<usize> = (1..=k_max).filter(|k| k % p == l).collect();
        if ks.len() < 2 {
            return Err(DynamicsError::KMaxTooSmall {
                needed: (2 * p) as u32,
            });
        }
        let last = ks.pop().unwrap();
        let prev = ks.pop().unwrap();
        let c_last = value_at(last);
        let c_prev = value_at(prev);
        let gap = (c_last - c_prev).abs();
        if gap > tol {
            return Err(DynamicsError::NonConvergence(format!(
                "residue {l}: gap {gap:.3e} above tolerance {tol:.1e} at k = {last}"
            )));
        }
        constants.push(c_last);
        gaps.push(gap);
    }

    // Independent check through the dominant spectral projection.
    let p_qpoly = QPoly::from_bigint_coeffs(&report.char_poly);
    let projection_value = match crate::spectral::dominant_structure(&p_qpoly) {
        DominantKind::UniqueSimpleReal(lambda) if lambda > 0.0 => {
            projection_constant(a).ok()
        }
        _ => None,
    };
    Ok(AsymptoticConstants {
        constants,
        convergence_gaps: gaps,
        projection_value,
    })
}

/// `C = sum_i -psi_0(P e_i)` where `P` projects onto the dominant
/// eigenspace along the others (computed numerically).
fn projection_constant(a: &IntMatrix) -> Result<f64, DynamicsError> {
    let n = a.n_rows();
    let af: Vec<Vec<f64>> = (0..n)
        .map(|i| a.row(i).iter().map(util::bigint_to_f64).collect())
        .collect();
    let at: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| af[j][i]).collect()).collect();
    let v = power_iterate_f64(&af)?;
    let w = power_iterate_f64(&at)?;
    let wv: f64 = w.iter().zip(&v).map(|(x, y)| x * y).sum();
    if wv.abs() < 1e-12 {
        return Err(DynamicsError::NonConvergence(
            "degenerate spectral projection".into(),
        ));
    }
    // Columns of the projector applied to e_0 = -(e_1+...+e_n) and e_i.
    let project = |e: &[f64]| -> Vec<f64> {
        let we: f64 = w.iter().zip(e).map(|(x, y)| x * y).sum();
        v.iter().map(|vi| vi * we / wv).collect()
    };
    let psi0 = |x: &[f64]| -> f64 { x.iter().fold(0.0f64, |acc, &t| acc.min(t)) };
    let mut total = 0.0;
    let e0 = vec![-1.0; n];
    total -= psi0(&project(&e0));
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        total -= psi0(&project(&e));
    }
    Ok(total)
}

fn power_iterate_f64(m: &[Vec<f64>]) -> Result<Vec<f64>, DynamicsError> {
    let n = m.len();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 1e-4 * i as f64).collect();
    for _ in 0..5_000 {
        let mut w = vec![0.0; n];
        for i in 0..n {
            w[i] = m[i].iter().zip(&v).map(|(a, b)| a * b).sum();
        }
        let norm = (w.iter().map(|x| x * x).sum::<f64>()).sqrt();
        if norm == 0.0 {
            return Err(DynamicsError::NonConvergence("zero iterate".into()));
        }
        let dot: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
        let sign = if dot < 0.0 { -1.0 } else { 1.0 };
        let next: Vec<f64> = w.iter().map(|x| sign * x / norm).collect();
        let delta = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        if delta < 1e-14 {
            return Ok(v);
        }
    }
    Err(DynamicsError::NonConvergence(
        "power iteration budget exhausted".into(),
    ))
}

// ---------------------------------------------------------------------------
// Normalized-degree scan (complex spectrum)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub k_max: u32,
    /// `deg(f^k) / |lambda|^k` for `k = 1..=k_max`.
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
    /// Exact statement `min >= 1` (computed in rational arithmetic).
    pub min_at_least_one: bool,
    /// Number of distinct exact values.
    pub distinct: usize,
    /// Largest gap between consecutive sorted values.
    pub max_gap: f64,
}

/// Normalized degrees for a 2x2 matrix with a complex eigenvalue pair whose
/// ratio is not a root of unity. `|lambda|^2 = det` makes the squared values
/// exact rationals; statistics are densities proxies, not a density proof.
pub fn normalized_degree_scan(a: &IntMatrix, k_max: u32) -> Result<ScanReport, DynamicsError> {
    match non_stabilizable_2x2(a)? {
        TwoByTwoStabilization::NoStableModel => {}
        other => {
            return Err(DynamicsError::HypothesisViolated(format!(
                "need a complex pair with non-root-of-unity ratio, got {other:?}"
            )))
        }
    }
    let det = a.det()?;
    let degrees = degree_sequence(a, k_max)?;
    let mut exact_squares: Vec<BigRational> = Vec::with_capacity(k_max as usize);
    for (idx, d) in degrees.iter().enumerate() {
        let k = (idx + 1) as u32;
        // (deg_k / |lambda|^k)^2 = deg_k^2 / det^k, exactly.
        let num = d * d;
        let mut den = BigInt::one();
        for _ in 0..k {
            den *= &det;
        }
        exact_squares.push(BigRational::new(num, den));
    }
    let values: Vec<f64> = exact_squares
        .iter()
        .map(|r| util::ratio_to_f64(r).sqrt())
        .collect();
    let one = BigRational::one();
    let min_at_least_one = exact_squares.iter().all(|r| *r >= one);
    let distinct = exact_squares.iter().collect::<BTreeSet<_>>().len();
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let max_gap = sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    Ok(ScanReport {
        k_max,
        min: sorted.first().copied().unwrap_or(f64::NAN),
        max: sorted.last().copied().unwrap_or(f64::NAN),
        min_at_least_one,
        values,
        distinct,
        max_gap,
    })
}

// ---------------------------------------------------------------------------
// Dynamical degree estimate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct DynDegreeReport {
    /// `|A^k|_1^(1/k)` for `k = 1..=k_max`.
    pub roots: Vec<f64>,
    /// Tail estimate of the limit (log-norm slope over the tail window).
    pub estimate: f64,
    /// Certified spectral radius for comparison.
    pub rho: f64,
    pub rho_error_bound: f64,
}

/// The first dynamical degree as the growth rate of `|A^k|_1`. The k-th
/// roots converge only as `O(log k / k)`, so the reported estimate is the
/// least-squares slope of `ln |A^k|_1` over the tail window
/// `k in [k_max/2, k_max]`.
pub fn dynamical_degree_estimate(
    a: &IntMatrix,
    k_max: u32,
) -> Result<DynDegreeReport, DynamicsError> {
    if a.det()?.is_zero() {
        return Err(DynamicsError::SingularMatrix);
    }
    if k_max < 4 {
        return Err(DynamicsError::KMaxTooSmall { needed: 4 });
    }
    let mut log_norms = Vec::with_capacity(k_max as usize);
    let mut power = a.clone();
    for k in 1..=k_max {
        if k > 1 {
            power = power.mul(a)?;
        }
        log_norms.push(util::bigint_ln(&power.l1_norm()));
    }
    let roots: Vec<f64> = log_norms
        .iter()
        .enumerate()
        .map(|(idx, ln)| (ln / (idx + 1) as f64).exp())
        .collect();
    let lo = (k_max as usize) / 2;
    let points: Vec<(f64, f64)> = (lo..k_max as usize)
        .map(|idx| ((idx + 1) as f64, log_norms[idx]))
        .collect();
    let (slope, _) = least_squares_slope(&points);
    let report = spectral_radius(a)?;
    Ok(DynDegreeReport {
        roots,
        estimate: slope.exp(),
        rho: report.rho,
        rho_error_bound: report.rho_error_bound,
    })
}

/// Spectrum report passthrough for callers that already depend on this
/// module.
pub fn spectrum(a: &IntMatrix) -> Result<SpectrumReport, DynamicsError> {
    Ok(spectral_radius(a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn alternating_diagonal_sequence() {
        // deg = 3^k for even k, 3^k + 2^k for odd k.
        let degrees = degree_sequence(&IntMatrix::diag(&[-3, 2]), 6).unwrap();
        assert_eq!(
            degrees,
            vec![big(5), big(9), big(35), big(81), big(275), big(729)]
        );
    }

    #[test]
    fn double_negative_diagonal_sequence() {
        // deg = 3^k for even k, 2*3^k + 2^k for odd k.
        let degrees = degree_sequence(&IntMatrix::diag(&[-3, -3, 2]), 5).unwrap();
        assert_eq!(degrees, vec![big(8), big(9), big(62), big(81), big(518)]);
    }

    #[test]
    fn jordan_block_sequence() {
        // deg = 2^k + k 2^{k-1}.
        let degrees = degree_sequence(&IntMatrix::from_i64(&[&[2, 1], &[0, 2]]), 8).unwrap();
        for (idx, d) in degrees.iter().enumerate() {
            let k = (idx + 1) as u32;
            let expected = BigInt::from(2).pow(k) + BigInt::from(k) * BigInt::from(2).pow(k - 1);
            assert_eq!(*d, expected);
        }
    }

    #[test]
    fn unstable_example_degrees() {
        let degrees = degree_sequence(&IntMatrix::from_i64(&[&[-1, -2], &[2, 0]]), 2).unwrap();
        assert_eq!(degrees, vec![big(5), big(7)]);
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = IntMatrix::from_i64(&[&[1, 1], &[1, 1]]);
        assert!(matches!(
            degree_sequence(&a, 3),
            Err(DynamicsError::SingularMatrix)
        ));
    }

    #[test]
    fn oracle_matches_reduced_square() {
        let a = IntMatrix::from_i64(&[&[-1, -2], &[2, 0]]);
        assert_eq!(oracle_degree_by_composition(&a, 2, 1 << 20).unwrap(), big(7));
        assert_eq!(oracle_degree_by_composition(&IntMatrix::identity(3), 5, 1 << 20).unwrap(), big(1));
    }

    #[test]
    fn oracle_agrees_with_degree_sequence() {
        let mut rng = ChaCha8Rng::seed_from_u64(2718);
        let mut checked = 0;
        while checked < 12 {
            let n = rng.gen_range(2..=3);
            let rows: Vec<Vec<BigInt>> = (0..n)
                .map(|_| (0..n).map(|_| big(rng.gen_range(-3..=3))).collect())
                .collect();
            let a = IntMatrix::new(rows).unwrap();
            if a.det().unwrap().is_zero() {
                continue;
            }
            checked += 1;
            let degrees = degree_sequence(&a, 4).unwrap();
            for k in 1..=4u32 {
                assert_eq!(
                    oracle_degree_by_composition(&a, k, 1 << 22).unwrap(),
                    degrees[(k - 1) as usize],
                    "matrix {a}, k = {k}"
                );
            }
        }
    }

    #[test]
    fn submultiplicativity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(31415);
        let mut checked = 0;
        while checked < 10 {
            let rows: Vec<Vec<BigInt>> = (0..2)
                .map(|_| (0..2).map(|_| big(rng.gen_range(-4..=4))).collect())
                .collect();
            let a = IntMatrix::new(rows).unwrap();
            if a.det().unwrap().is_zero() {
                continue;
            }
            checked += 1;
            let degrees = degree_sequence(&a, 12).unwrap();
            for j in 1..=6usize {
                for k in 1..=6usize {
                    let lhs = &degrees[j + k - 1];
                    let rhs = &degrees[j - 1] * &degrees[k - 1];
                    assert!(lhs <= &rhs);
                }
            }
        }
    }

    #[test]
    fn growth_exponent_exact_cases() {
        let degrees = degree_sequence(&IntMatrix::diag(&[-3, 2]), 20).unwrap();
        let g = growth_exponent(&IntMatrix::diag(&[-3, 2]), &degrees).unwrap();
        assert_eq!(g.ell, 0);
        assert_eq!(g.provenance, Provenance::Exact);

        let a = IntMatrix::from_i64(&[&[2, 1], &[0, 2]]);
        let degrees = degree_sequence(&a, 20).unwrap();
        let g = growth_exponent(&a, &degrees).unwrap();
        assert_eq!(g.ell, 1);
        assert_eq!(g.provenance, Provenance::Exact);
    }

    #[test]
    fn growth_exponent_fitted_for_complex_pair() {
        let a = IntMatrix::from_i64(&[&[-1, -2], &[2, 0]]);
        let degrees = degree_sequence(&a, 120).unwrap();
        let g = growth_exponent(&a, &degrees).unwrap();
        assert_eq!(g.ell, 0);
        match g.provenance {
            Provenance::Fitted { slope, .. } => assert!(slope.abs() < 0.4, "slope {slope}"),
            Provenance::Exact => panic!("expected fitted path"),
        }
    }

    #[test]
    fn growth_exponent_needs_enough_data() {
        let a = IntMatrix::from_i64(&[&[-1, -2], &[2, 0]]);
        let degrees = degree_sequence(&a, 8).unwrap();
        assert!(matches!(
            growth_exponent(&a, &degrees),
            Err(DynamicsError::KMaxTooSmall { .. })
        ));
    }

    #[test]
    fn constants_for_alternating_diagonals() {
        let a = IntMatrix::diag(&[-3, 2]);
        let degrees = degree_sequence(&a, 60).unwrap();
        let c = asymptotic_constants(&a, &degrees, 2, 1e-6).unwrap();
        assert!((c.constants[0] - 1.0).abs() < 1e-6);
        assert!((c.constants[1] - 1.0).abs() < 1e-6);

        let a = IntMatrix::diag(&[-3, -3, 2]);
        let degrees = degree_sequence(&a, 60).unwrap();
        let c = asymptotic_constants(&a, &degrees, 2, 1e-6).unwrap();
        // Even iterates give 1, odd iterates give 2.
        assert!((c.constants[0] - 1.0).abs() < 1e-6);
        assert!((c.constants[1] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn constants_projection_value() {
        let a = IntMatrix::diag(&[3, 2]);
        let degrees = degree_sequence(&a, 40).unwrap();
        let c = asymptotic_constants(&a, &degrees, 1, 1e-6).unwrap();
        assert!((c.constants[0] - 1.0).abs() < 1e-6);
        let proj = c.projection_value.expect("positive dominant eigenvalue");
        assert!((proj - c.constants[0]).abs() < 1e-6);
    }

    #[test]
    fn scan_requires_complex_pair() {
        assert!(matches!(
            normalized_degree_scan(&IntMatrix::from_i64(&[&[0, -1], &[1, 0]]), 50),
            Err(DynamicsError::HypothesisViolated(_))
        ));
        assert!(matches!(
            normalized_degree_scan(&IntMatrix::diag(&[2, 3]), 50),
            Err(DynamicsError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn scan_statistics() {
        let a = IntMatrix::from_i64(&[&[-1, -2], &[2, 0]]);
        let report = normalized_degree_scan(&a, 400).unwrap();
        assert!(report.min_at_least_one);
        assert!(report.min >= 0.999_999);
        assert!(report.distinct > 100);
        assert!(report.max_gap > 0.0);
    }

    #[test]
    fn dynamical_degree_examples() {
        let r = dynamical_degree_estimate(&IntMatrix::diag(&[3, 2]), 40).unwrap();
        assert!((r.estimate - 3.0).abs() < 1e-4, "estimate {}", r.estimate);

        let r = dynamical_degree_estimate(&IntMatrix::from_i64(&[&[-1, -2], &[2, 0]]), 60).unwrap();
        assert!(
            (r.estimate - 2.0).abs() < 1e-2,
            "estimate {} vs 2.0",
            r.estimate
        );

        let r = dynamical_degree_estimate(&IntMatrix::from_i64(&[&[2, 1], &[1, 1]]), 40).unwrap();
        let phi2 = (3.0 + 5f64.sqrt()) / 2.0;
        assert!(
            (r.estimate - phi2).abs() < 1e-3,
            "estimate {} vs {phi2}",
            r.estimate
        );
    }

    #[test]
    fn weighted_sequence_example() {
        let (_, lattice) = crate::fan::Fan::weighted(&[1, 2, 3]).unwrap();
        let a = RatMatrix::new(vec![
            vec![
                BigRational::from_integer(big(1)),
                BigRational::new(big(-3), big(2)),
            ],
            vec![
                BigRational::new(big(2), big(3)),
                BigRational::from_integer(big(0)),
            ],
        ])
        .unwrap();
        let seq = weighted_degree_sequence(&a, &lattice, 5).unwrap();
        assert_eq!(seq[0], BigRational::new(big(13), big(6)));
        // Every entry equals nu of the exact rational power.
        for (idx, v) in seq.iter().enumerate() {
            let p = a.pow((idx + 1) as u64).unwrap();
            assert_eq!(*v, nu(&p).unwrap());
        }
        // A matrix that breaks the lattice is rejected.
        let bad = RatMatrix::new(vec![
            vec![
                BigRational::new(big(1), big(5)),
                BigRational::from_integer(big(0)),
            ],
            vec![
                BigRational::from_integer(big(0)),
                BigRational::from_integer(big(1)),
            ],
        ])
        .unwrap();
        assert!(matches!(
            weighted_degree_sequence(&bad, &lattice, 3),
            Err(DynamicsError::LatticeNotPreserved)
        ));
    }
}
