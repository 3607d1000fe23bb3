//! Strong algebraic stability of monomial maps on complete simplicial toric
//! varieties.
//!
//! The decision procedure follows each ray's cone orbit: starting from the
//! ray itself, repeatedly replace the current cone by the cone closure of its
//! image. The transition is deterministic and the fan finite, so each orbit
//! either hits a cone whose image lies in no single cone (a failure witness)
//! or revisits a cone and is certified. The map is strongly algebraically
//! stable exactly when every ray is certified.

use crate::divisor::{homogenization_matrix, DivisorError};
use crate::fan::{ConeId, Fan, FanError};
use crate::matrix::{IntMatrix, MatrixError, RatMatrix};
use crate::qpoly::QPoly;
use crate::spectral::{dominant_eigvec_approx, DominantKind, SpectralError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum StabilityError {
    Fan(FanError),
    Matrix(MatrixError),
    Divisor(String),
    SingularMatrix,
    IncompleteFan,
    WrongSize { expected: usize, got: usize },
    HypothesisViolated(String),
}

impl fmt::Display for StabilityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabilityError::Fan(e) => write!(f, "{e}"),
            StabilityError::Matrix(e) => write!(f, "{e}"),
            StabilityError::Divisor(msg) => write!(f, "{msg}"),
            StabilityError::SingularMatrix => write!(f, "matrix must have nonzero determinant"),
            StabilityError::IncompleteFan => write!(f, "fan must be complete"),
            StabilityError::WrongSize { expected, got } => {
                write!(f, "expected a {expected}x{expected} matrix, got {got}x{got}")
            }
            StabilityError::HypothesisViolated(msg) => write!(f, "hypothesis violated: {msg}"),
        }
    }
}

impl std::error::Error for StabilityError {}

impl From<FanError> for StabilityError {
    fn from(e: FanError) -> Self {
        StabilityError::Fan(e)
    }
}

impl From<MatrixError> for StabilityError {
    fn from(e: MatrixError) -> Self {
        StabilityError::Matrix(e)
    }
}

impl From<DivisorError> for StabilityError {
    fn from(e: DivisorError) -> Self {
        StabilityError::Divisor(e.to_string())
    }
}

impl From<SpectralError> for StabilityError {
    fn from(e: SpectralError) -> Self {
        StabilityError::HypothesisViolated(e.to_string())
    }
}

// ---------------------------------------------------------------------------
// The stability decision procedure
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    StronglyStable,
    NotStronglyStable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceOutcome {
    /// The transition from the last cone returns to `cones[entry_index]`.
    Cycle { entry_index: usize },
    /// The cone at `step` (the last one) does not map regularly.
    Failed { step: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayTrace {
    pub ray: usize,
    /// Cone orbit starting from the ray itself.
    pub cones: Vec<ConeId>,
    pub outcome: TraceOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureWitness {
    pub ray: usize,
    pub step: usize,
    pub cone: ConeId,
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub verdict: Verdict,
    pub traces: Vec<RayTrace>,
    /// First failure in ray order; `None` iff strongly stable.
    pub witness: Option<FailureWitness>,
    /// Maximum orbit length over all rays.
    pub steps_to_certify: usize,
}

fn trace_ray(ar: &RatMatrix, fan: &Fan, ray: usize) -> Result<RayTrace, FanError> {
    let mut cones = vec![ConeId::new(vec![ray])];
    loop {
        // Deterministic transition plus a finite fan: a repeat or a failure
        // must occur within #cones steps.
        assert!(cones.len() <= fan.n_cones(), "orbit exceeded the cone count");
        let current = cones.last().unwrap();
        match fan.maps_regularly_id(ar, current)? {
            None => {
                let step = cones.len() - 1;
                return Ok(RayTrace {
                    ray,
                    cones,
                    outcome: TraceOutcome::Failed { step },
                });
            }
            Some(next) => {
                if let Some(entry_index) = cones.iter().position(|c| *c == next) {
                    return Ok(RayTrace {
                        ray,
                        cones,
                        outcome: TraceOutcome::Cycle { entry_index },
                    });
                }
                cones.push(next);
            }
        }
    }
}

/// Decide strong algebraic stability of the monomial map of `a` on the
/// complete simplicial fan.
pub fn is_strongly_stable(a: &IntMatrix, fan: &Fan) -> Result<StabilityReport, StabilityError> {
    is_strongly_stable_with_threads(a, fan, 1)
}

/// Same decision with per-ray orbits computed on up to `threads` worker
/// threads. Output is merged in ray order and identical for any thread count.
pub fn is_strongly_stable_with_threads(
    a: &IntMatrix,
    fan: &Fan,
    threads: usize,
) -> Result<StabilityReport, StabilityError> {
    if !a.is_square() || a.n_rows() != fan.dim() {
        return Err(StabilityError::WrongSize {
            expected: fan.dim(),
            got: a.n_rows(),
        });
    }
    if a.det()?.is_zero() {
        return Err(StabilityError::SingularMatrix);
    }
    if !fan.is_complete() {
        return Err(StabilityError::IncompleteFan);
    }
    let ar = a.to_rat();
    let n_rays = fan.n_rays();

    let traces: Vec<Result<RayTrace, FanError>> = if threads <= 1 || n_rays < 2 {
        (0..n_rays).map(|i| trace_ray(&ar, fan, i)).collect()
    } else {
        let workers = threads.min(n_rays);
        let chunk = n_rays.div_ceil(workers);
        let mut out: Vec<Option<Result<RayTrace, FanError>>> = (0..n_rays).map(|_| None).collect();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for w in 0..workers {
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(n_rays);
                if lo >= hi {
                    break;
                }
                let ar = &ar;
                handles.push((lo, scope.spawn(move || {
                    (lo..hi).map(|i| trace_ray(ar, fan, i)).collect::<Vec<_>>()
                })));
            }
            for (lo, h) in handles {
                for (off, t) in h.join().expect("trace worker panicked").into_iter().enumerate() {
                    out[lo + off] = Some(t);
                }
            }
        });
        out.into_iter().map(|t| t.unwrap()).collect()
    };

    let mut ray_traces = Vec::with_capacity(n_rays);
    for t in traces {
        ray_traces.push(t?);
    }
    let witness = ray_traces.iter().find_map(|t| match t.outcome {
        TraceOutcome::Failed { step } => Some(FailureWitness {
            ray: t.ray,
            step,
            cone: t.cones[step].clone(),
        }),
        TraceOutcome::Cycle { .. } => None,
    });
    let steps_to_certify = ray_traces.iter().map(|t| t.cones.len()).max().unwrap_or(0);
    Ok(StabilityReport {
        verdict: if witness.is_none() {
            Verdict::StronglyStable
        } else {
            Verdict::NotStronglyStable
        },
        traces: ray_traces,
        witness,
        steps_to_certify,
    })
}

/// Re-check a failure witness: the recorded cone must indeed fail to map
/// regularly.
pub fn verify_witness(
    a: &IntMatrix,
    fan: &Fan,
    witness: &FailureWitness,
) -> Result<bool, StabilityError> {
    let ar = a.to_rat();
    Ok(fan.maps_regularly_id(&ar, &witness.cone)?.is_none())
}

// ---------------------------------------------------------------------------
// Homogenization-power falsifier
// ---------------------------------------------------------------------------

/// First `k <= k_max` with `h(A^k) != h(A)^k`, or `None` when no violation
/// shows up. A bounded falsifier: `None` is evidence, not a proof.
pub fn check_h_power(a: &IntMatrix, k_max: u32) -> Result<Option<u32>, StabilityError> {
    if a.det()?.is_zero() {
        return Err(StabilityError::SingularMatrix);
    }
    let h1 = homogenization_matrix(a)?.matrix().clone();
    let mut a_pow = a.clone();
    let mut h_pow = h1.clone();
    for k in 2..=k_max {
        a_pow = a_pow.mul(a)?;
        h_pow = h_pow.mul(&h1)?;
        let direct = homogenization_matrix(&a_pow)?;
        if direct.matrix() != &h_pow {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// The sign condition and pullback matrices on (P^1)^n
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarWitness {
    /// Entry (row, col) of the product `AB` with mixed-sign summands.
    pub row: usize,
    pub col: usize,
    /// Indices of two summands `a[row][k] * b[k][col]` of opposite sign.
    pub k1: usize,
    pub k2: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarReport {
    pub holds: bool,
    pub witness: Option<StarWitness>,
}

/// Sign condition for functoriality of pullback on (P^1)^n: in every entry
/// of `AB`, all nonzero summands `a_jk b_ki` must share one sign.
pub fn star_condition(a: &IntMatrix, b: &IntMatrix) -> Result<StarReport, StabilityError> {
    if !a.is_square() || !b.is_square() || a.n_rows() != b.n_rows() {
        return Err(StabilityError::WrongSize {
            expected: a.n_rows(),
            got: b.n_rows(),
        });
    }
    let n = a.n_rows();
    for j in 0..n {
        for i in 0..n {
            let mut first: Option<(usize, bool)> = None;
            for k in 0..n {
                let prod = a.entry(j, k) * b.entry(k, i);
                if prod.is_zero() {
                    continue;
                }
                let positive = prod.is_positive();
                match first {
                    None => first = Some((k, positive)),
                    Some((k1, sign)) => {
                        if sign != positive {
                            return Ok(StarReport {
                                holds: false,
                                witness: Some(StarWitness {
                                    row: j,
                                    col: i,
                                    k1,
                                    k2: k,
                                }),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(StarReport {
        holds: true,
        witness: None,
    })
}

/// Matrix of the divisor pullback on (P^1)^n in the basis
/// `D_1, E_1, ..., D_n, E_n`: 2x2 blocks, diagonal `|a_ji| I` for
/// `a_ji >= 0` and antidiagonal (swap) otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPullbackMatrix {
    matrix: IntMatrix,
}

impl BlockPullbackMatrix {
    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn n_blocks(&self) -> usize {
        self.matrix.n_rows() / 2
    }

    /// Block at block-position (i, j): `(value, swapped)`.
    pub fn block(&self, i: usize, j: usize) -> (BigInt, bool) {
        let diag = self.matrix.entry(2 * i, 2 * j).clone();
        if diag.is_zero() {
            let anti = self.matrix.entry(2 * i, 2 * j + 1).clone();
            if anti.is_zero() {
                (BigInt::zero(), false)
            } else {
                (anti, true)
            }
        } else {
            (diag, false)
        }
    }
}

/// Pullback matrix on torus-invariant divisors of (P^1)^n.
pub fn cdiv_pullback_matrix_p1n(a: &IntMatrix) -> Result<BlockPullbackMatrix, StabilityError> {
    if !a.is_square() {
        return Err(StabilityError::Matrix(MatrixError::NotSquare {
            rows: a.n_rows(),
            cols: a.n_cols(),
        }));
    }
    let n = a.n_rows();
    let mut m = IntMatrix::zero(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = a.entry(j, i);
            let abs = v.abs();
            if v.is_negative() {
                m.set_entry(2 * i, 2 * j + 1, abs.clone());
                m.set_entry(2 * i + 1, 2 * j, abs);
            } else {
                m.set_entry(2 * i, 2 * j, abs.clone());
                m.set_entry(2 * i + 1, 2 * j + 1, abs);
            }
        }
    }
    Ok(BlockPullbackMatrix { matrix: m })
}

/// Pullback matrix on the Picard group of (P^1)^n: entrywise absolute value
/// of the transpose.
pub fn pic_pullback_matrix_p1n(a: &IntMatrix) -> Result<IntMatrix, StabilityError> {
    if !a.is_square() {
        return Err(StabilityError::Matrix(MatrixError::NotSquare {
            rows: a.n_rows(),
            cols: a.n_cols(),
        }));
    }
    Ok(a.abs_transpose())
}

// ---------------------------------------------------------------------------
// Stabilizing fan search
// ---------------------------------------------------------------------------

/// Search for a cross-polytope fan on which some iterate of the map becomes
/// strongly algebraically stable. Requires a unique simple real dominant
/// eigenvalue (the attracting-direction hypothesis); candidates are built by
/// rounding the dominant eigenvector and sharpening integer vectors toward
/// it. Returns the first verified `(fan, k)`; `None` when the search budget
/// is exhausted (the construction is heuristic).
pub fn stabilizing_fan(
    a: &IntMatrix,
    max_denominator: u64,
    k_max: u32,
) -> Result<Option<(Fan, u32)>, StabilityError> {
    if !a.is_square() {
        return Err(StabilityError::Matrix(MatrixError::NotSquare {
            rows: a.n_rows(),
            cols: a.n_cols(),
        }));
    }
    if a.det()?.is_zero() {
        return Err(StabilityError::SingularMatrix);
    }
    let n = a.n_rows();
    let p = QPoly::from_bigint_coeffs(&a.char_poly()?);
    match crate::spectral::dominant_structure(&p) {
        DominantKind::UniqueSimpleReal(_) => {}
        other => {
            return Err(StabilityError::HypothesisViolated(format!(
                "need a unique simple real dominant eigenvalue, found {other:?}"
            )))
        }
    }

    let verify = |fan: &Fan| -> Result<Option<u32>, StabilityError> {
        let mut a_pow = a.clone();
        for k in 1..=k_max {
            if k > 1 {
                a_pow = a_pow.mul(a)?;
            }
            if is_strongly_stable(&a_pow, fan)?.verdict == Verdict::StronglyStable {
                return Ok(Some(k));
            }
        }
        Ok(None)
    };

    // Standard basis first: already sufficient for nonnegative matrices.
    let standard = Fan::p1n(n)?;
    if let Some(k) = verify(&standard)? {
        return Ok(Some((standard, k)));
    }

    // Candidates around the rounded dominant eigenvector.
    for den_bound in [1_000u64, max_denominator] {
        let ev = match dominant_eigvec_approx(a, den_bound.max(2)) {
            Ok(ev) => ev,
            Err(_) => continue,
        };
        // Clear denominators and make primitive.
        let lcm = ev
            .vector
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let w: Vec<BigInt> = ev
            .vector
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        if w.iter().all(|x| x.is_zero()) {
            continue;
        }
        let w = crate::fan::primitivize(&w);
        for scale in [1u32, 4, 16, 64, 256] {
            let ns = BigInt::from(scale);
            let basis: Vec<Vec<BigInt>> = (0..n)
                .map(|i| {
                    let mut v: Vec<BigInt> = w.iter().map(|x| x * &ns).collect();
                    let bump = if w[i].is_negative() {
                        -BigInt::one()
                    } else {
                        BigInt::one()
                    };
                    v[i] += bump;
                    v
                })
                .collect();
            let rows: Vec<Vec<BigRational>> = (0..n)
                .map(|r| {
                    basis
                        .iter()
                        .map(|b| BigRational::from_integer(b[r].clone()))
                        .collect()
                })
                .collect();
            if RatMatrix::new(rows)?.rank() != n {
                continue;
            }
            let fan = match Fan::crosspolytope(&basis) {
                Ok(f) => f,
                Err(_) => continue,
            };
            if let Some(k) = verify(&fan)? {
                return Ok(Some((fan, k)));
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// 2x2 stabilizability
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwoByTwoStabilization {
    /// Real spectrum: the complex-pair analysis does not apply.
    NotApplicable,
    /// The ratio of the conjugate eigenvalues is a root of unity of this
    /// order (smallest m with lambda^m real).
    RatioRootOfUnity { order: u32 },
    /// The ratio is not a root of unity: no toric birational model makes any
    /// iterate strongly algebraically stable.
    NoStableModel,
}

/// Exact classification for 2x2 integer matrices with a complex eigenvalue
/// pair: `lambda^m = a_m lambda + b_m` is maintained exactly from
/// `lambda^2 = t lambda - d`; `lambda^m` is real iff `a_m = 0`, and the
/// field degree bounds the possible orders so checking `m <= 12` decides.
pub fn non_stabilizable_2x2(a: &IntMatrix) -> Result<TwoByTwoStabilization, StabilityError> {
    if !a.is_square() || a.n_rows() != 2 {
        return Err(StabilityError::WrongSize {
            expected: 2,
            got: a.n_rows(),
        });
    }
    let t = a.trace()?;
    let d = a.det()?;
    let disc = &t * &t - BigInt::from(4) * &d;
    if !disc.is_negative() {
        return Ok(TwoByTwoStabilization::NotApplicable);
    }
    let mut am = BigInt::one();
    let mut bm = BigInt::zero();
    for m in 2..=12u32 {
        let next_a = &t * &am + &bm;
        let next_b = -&d * &am;
        am = next_a;
        bm = next_b;
        if am.is_zero() {
            return Ok(TwoByTwoStabilization::RatioRootOfUnity { order: m });
        }
    }
    Ok(TwoByTwoStabilization::NoStableModel)
}
