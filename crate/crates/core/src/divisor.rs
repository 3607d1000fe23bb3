//! Torus-invariant divisors, support functions, divisor pullback, degrees,
//! and homogenization of monomial maps on projective space.
//!
//! A divisor is a rational coefficient vector over the rays of a fan. Its
//! support function is stored by ray values (`psi(v_i) = -a_i`) and evaluated
//! anywhere by simplicial interpolation: write `v` in the generators of a
//! containing maximal cone and extend linearly. Pulling back a divisor `D`
//! along the map induced by `A` produces the divisor with coefficient
//! `-psi_D(A v_i)` on the source ray `v_i`.

use crate::fan::{to_rational_vec, Fan, FanError, WeightedLattice};
use crate::matrix::{IntMatrix, MatrixError, RatMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub enum DivisorError {
    Fan(FanError),
    Matrix(MatrixError),
    CoefficientCount { expected: usize, got: usize },
    /// No cone of the fan contains the evaluation point (incomplete fan).
    NoContainingCone,
    /// Pullback requires a map that is surjective over the rationals.
    RankDeficient,
    /// The operation is specific to a named fan (projective, weighted).
    WrongFan(String),
    SingularMatrix,
}

impl fmt::Display for DivisorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivisorError::Fan(e) => write!(f, "{e}"),
            DivisorError::Matrix(e) => write!(f, "{e}"),
            DivisorError::CoefficientCount { expected, got } => {
                write!(f, "coefficient count {got} does not match ray count {expected}")
            }
            DivisorError::NoContainingCone => {
                write!(f, "no cone contains the point (fan not complete)")
            }
            DivisorError::RankDeficient => {
                write!(f, "matrix must have full rank over the rationals (dominant map)")
            }
            DivisorError::WrongFan(msg) => write!(f, "wrong fan: {msg}"),
            DivisorError::SingularMatrix => write!(f, "matrix must have nonzero determinant"),
        }
    }
}

impl std::error::Error for DivisorError {}

impl From<FanError> for DivisorError {
    fn from(e: FanError) -> Self {
        DivisorError::Fan(e)
    }
}

impl From<MatrixError> for DivisorError {
    fn from(e: MatrixError) -> Self {
        DivisorError::Matrix(e)
    }
}

// ---------------------------------------------------------------------------
// Divisors and support functions
// ---------------------------------------------------------------------------

/// Torus-invariant Weil divisor: one rational coefficient per ray of the fan.
#[derive(Debug, Clone, PartialEq)]
pub struct TWeilDivisor {
    fan: Arc<Fan>,
    coeffs: Vec<BigRational>,
}

impl TWeilDivisor {
    pub fn new(fan: Arc<Fan>, coeffs: Vec<BigRational>) -> Result<Self, DivisorError> {
        if coeffs.len() != fan.n_rays() {
            return Err(DivisorError::CoefficientCount {
                expected: fan.n_rays(),
                got: coeffs.len(),
            });
        }
        Ok(TWeilDivisor { fan, coeffs })
    }

    /// The prime divisor on ray `i` (coefficient 1 there, 0 elsewhere).
    pub fn prime(fan: Arc<Fan>, i: usize) -> Result<Self, DivisorError> {
        if i >= fan.n_rays() {
            return Err(DivisorError::CoefficientCount {
                expected: fan.n_rays(),
                got: i,
            });
        }
        let mut coeffs = vec![BigRational::zero(); fan.n_rays()];
        coeffs[i] = BigRational::one();
        Ok(TWeilDivisor { fan, coeffs })
    }

    pub fn zero(fan: Arc<Fan>) -> Self {
        let coeffs = vec![BigRational::zero(); fan.n_rays()];
        TWeilDivisor { fan, coeffs }
    }

    /// Principal divisor of the character `u`: coefficients `<u, v_i>`.
    pub fn principal(fan: Arc<Fan>, u: &[BigRational]) -> Result<Self, DivisorError> {
        if u.len() != fan.dim() {
            return Err(DivisorError::CoefficientCount {
                expected: fan.dim(),
                got: u.len(),
            });
        }
        let coeffs = fan
            .rays()
            .iter()
            .map(|v| {
                v.iter()
                    .zip(u)
                    .map(|(x, c)| c * BigRational::from_integer(x.clone()))
                    .sum()
            })
            .collect();
        Ok(TWeilDivisor { fan, coeffs })
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    pub fn add(&self, rhs: &TWeilDivisor) -> Result<TWeilDivisor, DivisorError> {
        if self.coeffs.len() != rhs.coeffs.len() {
            return Err(DivisorError::CoefficientCount {
                expected: self.coeffs.len(),
                got: rhs.coeffs.len(),
            });
        }
        Ok(TWeilDivisor {
            fan: self.fan.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &BigRational) -> TWeilDivisor {
        TWeilDivisor {
            fan: self.fan.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn support_function(&self) -> SupportFunction {
        SupportFunction {
            fan: self.fan.clone(),
            ray_values: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

/// Continuous piecewise-linear function on a fan, stored by its values on
/// the ray generators and interpolated per maximal cone.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportFunction {
    fan: Arc<Fan>,
    ray_values: Vec<BigRational>,
}

impl SupportFunction {
    pub fn from_ray_values(
        fan: Arc<Fan>,
        ray_values: Vec<BigRational>,
    ) -> Result<Self, DivisorError> {
        if ray_values.len() != fan.n_rays() {
            return Err(DivisorError::CoefficientCount {
                expected: fan.n_rays(),
                got: ray_values.len(),
            });
        }
        Ok(SupportFunction { fan, ray_values })
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn ray_values(&self) -> &[BigRational] {
        &self.ray_values
    }

    /// The divisor with coefficients `-psi(v_i)`.
    pub fn to_divisor(&self) -> TWeilDivisor {
        TWeilDivisor {
            fan: self.fan.clone(),
            coeffs: self.ray_values.iter().map(|a| -a).collect(),
        }
    }

    /// Evaluate at an arbitrary rational point: write the point in the
    /// generators of any containing maximal cone and extend linearly.
    /// Continuity across shared faces makes the choice irrelevant.
    pub fn evaluate(&self, v: &[BigRational]) -> Result<BigRational, DivisorError> {
        if v.len() != self.fan.dim() {
            return Err(DivisorError::Fan(FanError::DimensionMismatch {
                expected: self.fan.dim(),
                got: v.len(),
            }));
        }
        for id in self.fan.max_cones() {
            let cone = self.fan.cone(id);
            if let Some(coeffs) = cone.contains(v)? {
                let value = coeffs
                    .iter()
                    .zip(id.indices())
                    .map(|(c, &i)| c * &self.ray_values[i])
                    .sum();
                return Ok(value);
            }
        }
        Err(DivisorError::NoContainingCone)
    }
}

// ---------------------------------------------------------------------------
// Pullback
// ---------------------------------------------------------------------------

/// Pull a divisor on the target fan back to the source fan along the toric
/// rational map induced by `a` (a matrix from the source lattice to the
/// target lattice, surjective over the rationals).
pub fn pullback_divisor(
    a: &RatMatrix,
    source_fan: &Arc<Fan>,
    d: &TWeilDivisor,
) -> Result<TWeilDivisor, DivisorError> {
    let target_fan = d.fan();
    if a.n_cols() != source_fan.dim() || a.n_rows() != target_fan.dim() {
        return Err(DivisorError::Matrix(MatrixError::DimensionMismatch {
            expected: (target_fan.dim(), source_fan.dim()),
            got: (a.n_rows(), a.n_cols()),
        }));
    }
    if a.rank() != target_fan.dim() {
        return Err(DivisorError::RankDeficient);
    }
    let psi = d.support_function();
    let coeffs = source_fan
        .rays()
        .iter()
        .map(|v| {
            let image = a.apply(&to_rational_vec(v))?;
            Ok(-psi.evaluate(&image)?)
        })
        .collect::<Result<Vec<_>, DivisorError>>()?;
    Ok(TWeilDivisor {
        fan: source_fan.clone(),
        coeffs,
    })
}

// ---------------------------------------------------------------------------
// Degrees
// ---------------------------------------------------------------------------

fn expect_projective_fan(fan: &Fan) -> Result<usize, DivisorError> {
    let n = fan.dim();
    let reference = Fan::projective(n).map_err(DivisorError::Fan)?;
    if fan.rays() != reference.rays() || fan.max_cones() != reference.max_cones() {
        return Err(DivisorError::WrongFan(format!(
            "expected the projective {n}-space fan"
        )));
    }
    Ok(n)
}

/// Degree of a divisor on the projective-space fan: the sum of coefficients.
pub fn degree_pn(d: &TWeilDivisor) -> Result<BigRational, DivisorError> {
    expect_projective_fan(d.fan())?;
    Ok(d.coeffs().iter().sum())
}

/// Weighted degree `sum a_i d_i` of a divisor on the weighted projective fan.
pub fn weighted_degree(
    d: &TWeilDivisor,
    lattice: &WeightedLattice,
) -> Result<BigRational, DivisorError> {
    if d.coeffs().len() != lattice.weights().len() {
        return Err(DivisorError::CoefficientCount {
            expected: lattice.weights().len(),
            got: d.coeffs().len(),
        });
    }
    Ok(d.coeffs()
        .iter()
        .zip(lattice.weights())
        .map(|(a, w)| a * BigRational::from_integer(w.clone()))
        .sum())
}

/// Cartier test on a weighted projective space: the weighted degree must be
/// an integer divisible by `lcm(d_i)`.
pub fn is_cartier_weighted(
    d: &TWeilDivisor,
    lattice: &WeightedLattice,
) -> Result<bool, DivisorError> {
    let deg = weighted_degree(d, lattice)?;
    if !deg.denom().is_one() {
        return Ok(false);
    }
    let m = lattice
        .weights()
        .iter()
        .fold(BigInt::one(), |acc, w| acc.lcm(w));
    Ok(deg.to_integer().is_multiple_of(&m))
}

// ---------------------------------------------------------------------------
// The degree functional nu
// ---------------------------------------------------------------------------

/// Degree functional on square rational matrices:
/// `nu(M) = sum_j max_i{0, -m_ij} + max_i{0, sum_j m_ij}`.
/// Agrees with the degree of the monomial map for integer matrices;
/// subadditive, positively homogeneous, and zero only at `M = 0`.
pub fn nu(m: &RatMatrix) -> Result<BigRational, MatrixError> {
    if !m.is_square() {
        return Err(MatrixError::NotSquare {
            rows: m.n_rows(),
            cols: m.n_cols(),
        });
    }
    let n = m.n_rows();
    let mut total = BigRational::zero();
    for j in 0..n {
        let mut best = BigRational::zero();
        for i in 0..n {
            let candidate = -m.entry(i, j).clone();
            if candidate > best {
                best = candidate;
            }
        }
        total += best;
    }
    let mut best = BigRational::zero();
    for i in 0..n {
        let row_sum: BigRational = m.row(i).iter().sum();
        if row_sum > best {
            best = row_sum;
        }
    }
    total += best;
    Ok(total)
}

/// `nu` specialized to integer matrices; the value is a nonnegative integer.
pub fn nu_int(a: &IntMatrix) -> Result<BigInt, MatrixError> {
    let v = nu(&a.to_rat())?;
    debug_assert!(v.denom().is_one());
    Ok(v.to_integer())
}

/// Independent evaluation of `nu` through the support-function machinery:
/// `nu(M) = sum_{i=0..n} -psi(M e_i)` for the support function `psi` of the
/// degree-one prime divisor on ray `psi_index` of the projective fan
/// (`e_0 = -(e_1+...+e_n)`). The value is independent of `psi_index`.
pub fn nu_via_support(m: &RatMatrix, psi_index: usize) -> Result<BigRational, DivisorError> {
    if !m.is_square() {
        return Err(DivisorError::Matrix(MatrixError::NotSquare {
            rows: m.n_rows(),
            cols: m.n_cols(),
        }));
    }
    let n = m.n_rows();
    let fan = Arc::new(Fan::projective(n)?);
    let psi = TWeilDivisor::prime(fan.clone(), psi_index)?.support_function();
    let mut total = BigRational::zero();
    for j in 0..=n {
        let ej_vec: Vec<BigRational> = if j == 0 {
            vec![-BigRational::one(); n]
        } else {
            let mut e = vec![BigRational::zero(); n];
            e[j - 1] = BigRational::one();
            e
        };
        let image = m.apply(&ej_vec)?;
        total -= psi.evaluate(&image)?;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Homogenization
// ---------------------------------------------------------------------------

/// Exponent matrix of the homogenized monomial map on projective space.
/// Entry `(i, j)` is `-psi_i(A e_j)` for the standard support functions of
/// the prime divisors; rows are the exponent vectors of the map components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogenizationMatrix {
    matrix: IntMatrix,
}

impl HomogenizationMatrix {
    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.n_rows()
    }

    /// Row `i` as exponents of the i-th homogeneous component.
    pub fn row(&self, i: usize) -> &[BigInt] {
        self.matrix.row(i)
    }
}

/// Value of the standard projective support function `psi_i` at `w`:
/// `psi_0(w) = min{0, w_1, ..., w_n}` and
/// `psi_i(w) = min{0, -w_i, w_j - w_i (j != i)}`.
fn psi_projective(i: usize, w: &[BigInt]) -> BigInt {
    let mut best = BigInt::zero();
    if i == 0 {
        for x in w {
            if *x < best {
                best = x.clone();
            }
        }
    } else {
        let wi = &w[i - 1];
        let neg = -wi.clone();
        if neg < best {
            best = neg;
        }
        for (k, x) in w.iter().enumerate() {
            if k == i - 1 {
                continue;
            }
            let diff = x - wi;
            if diff < best {
                best = diff;
            }
        }
    }
    best
}

/// Homogenization matrix `h(A)` of the monomial map of a nonsingular integer
/// matrix, an `(n+1) x (n+1)` matrix of nonnegative exponents.
pub fn homogenization_matrix(a: &IntMatrix) -> Result<HomogenizationMatrix, DivisorError> {
    if !a.is_square() {
        return Err(DivisorError::Matrix(MatrixError::NotSquare {
            rows: a.n_rows(),
            cols: a.n_cols(),
        }));
    }
    if a.det()?.is_zero() {
        return Err(DivisorError::SingularMatrix);
    }
    let n = a.n_rows();
    // Images A e_j for j = 0..n with e_0 = -(e_1 + ... + e_n).
    let mut images: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    let e0: Vec<BigInt> = (0..n)
        .map(|i| -a.row(i).iter().sum::<BigInt>())
        .collect();
    images.push(e0);
    for j in 0..n {
        images.push(a.col(j));
    }
    let mut m = IntMatrix::zero(n + 1, n + 1);
    for i in 0..=n {
        for (j, w) in images.iter().enumerate() {
            m.set_entry(i, j, -psi_projective(i, w));
        }
    }
    // Exponents are nonnegative and no column vanishes for det != 0.
    debug_assert!((0..=n).all(|i| m.row(i).iter().all(|e| !e.is_negative())));
    debug_assert!((0..=n).all(|j| (0..=n).any(|i| !m.entry(i, j).is_zero())));
    Ok(HomogenizationMatrix { matrix: m })
}
