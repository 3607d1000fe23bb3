//! Rational simplicial cones and complete simplicial fans.
//!
//! A fan stores primitive ray generators plus maximal cones as sorted index
//! sets; every face is the span of a subset of a maximal cone's generators
//! (true for simplicial cones), so cone identity inside a fan is just the
//! sorted set of ray indices.
//!
//! Validation is exact: simpliciality by rational rank, the face property by
//! searching for a separating functional (a linear form vanishing on the
//! shared generators, strictly positive on the remaining generators of one
//! cone and strictly negative on those of the other) via Fourier-Motzkin
//! elimination, and completeness by facet pairing (every codimension-one
//! face of a maximal cone lies in exactly two maximal cones).

use crate::matrix::{lattice_basis, IntMatrix, MatrixError, RatMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum FanError {
    Matrix(MatrixError),
    DimensionMismatch { expected: usize, got: usize },
    BadRay { index: usize, reason: String },
    BadConeIndex { cone: usize, index: usize },
    NotSimplicial { cone: Vec<usize> },
    IntersectionNotFace { a: Vec<usize>, b: Vec<usize> },
    ConeNotMaximal { contained: Vec<usize>, containing: Vec<usize> },
    UnusedRay { index: usize },
    EmptyFan,
    BadWeights(String),
    SingularMap,
    EndomorphismContradiction(String),
}

impl fmt::Display for FanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FanError::Matrix(e) => write!(f, "{e}"),
            FanError::DimensionMismatch { expected, got } => {
                write!(f, "ambient dimension mismatch: expected {expected}, got {got}")
            }
            FanError::BadRay { index, reason } => write!(f, "ray {index}: {reason}"),
            FanError::BadConeIndex { cone, index } => {
                write!(f, "cone {cone} references ray index {index} out of range")
            }
            FanError::NotSimplicial { cone } => {
                write!(f, "cone {cone:?} is not simplicial (generators dependent)")
            }
            FanError::IntersectionNotFace { a, b } => {
                write!(f, "cones {a:?} and {b:?} do not intersect in a common face")
            }
            FanError::ConeNotMaximal { contained, containing } => write!(
                f,
                "cone {contained:?} is listed as maximal but is a face of {containing:?}"
            ),
            FanError::UnusedRay { index } => {
                write!(f, "ray {index} does not appear in any maximal cone")
            }
            FanError::EmptyFan => write!(f, "a fan needs at least one ray and one maximal cone"),
            FanError::BadWeights(msg) => write!(f, "bad weights: {msg}"),
            FanError::SingularMap => write!(f, "matrix must have nonzero determinant"),
            FanError::EndomorphismContradiction(msg) => {
                write!(f, "endomorphism structure violated: {msg}")
            }
        }
    }
}

impl std::error::Error for FanError {}

impl From<MatrixError> for FanError {
    fn from(e: MatrixError) -> Self {
        FanError::Matrix(e)
    }
}

fn is_primitive(v: &[BigInt]) -> bool {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    g.is_one()
}

pub(crate) fn primitivize(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

pub(crate) fn to_rational_vec(v: &[BigInt]) -> Vec<BigRational> {
    v.iter()
        .map(|x| BigRational::from_integer(x.clone()))
        .collect()
}

// ---------------------------------------------------------------------------
// Cone
// ---------------------------------------------------------------------------

/// A rational simplicial cone given by primitive, linearly independent ray
/// generators. The zero cone has no generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    dim_ambient: usize,
    generators: Vec<Vec<BigInt>>,
}

impl Cone {
    pub fn new(dim_ambient: usize, generators: Vec<Vec<BigInt>>) -> Result<Self, FanError> {
        for (i, g) in generators.iter().enumerate() {
            if g.len() != dim_ambient {
                return Err(FanError::DimensionMismatch {
                    expected: dim_ambient,
                    got: g.len(),
                });
            }
            if g.iter().all(|x| x.is_zero()) {
                return Err(FanError::BadRay {
                    index: i,
                    reason: "zero vector".into(),
                });
            }
            if !is_primitive(g) {
                return Err(FanError::BadRay {
                    index: i,
                    reason: "not primitive (entries share a factor)".into(),
                });
            }
        }
        let cone = Cone {
            dim_ambient,
            generators,
        };
        if !cone.generators.is_empty() {
            let m = cone.generator_matrix();
            if m.rank() != cone.generators.len() {
                return Err(FanError::NotSimplicial {
                    cone: (0..cone.generators.len()).collect(),
                });
            }
        }
        Ok(cone)
    }

    pub fn zero(dim_ambient: usize) -> Self {
        Cone {
            dim_ambient,
            generators: Vec::new(),
        }
    }

    pub fn dim_ambient(&self) -> usize {
        self.dim_ambient
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    /// Matrix whose columns are the generators.
    fn generator_matrix(&self) -> RatMatrix {
        let rows: Vec<Vec<BigRational>> = (0..self.dim_ambient)
            .map(|i| {
                self.generators
                    .iter()
                    .map(|g| BigRational::from_integer(g[i].clone()))
                    .collect()
            })
            .collect();
        RatMatrix::new(rows).expect("generators present")
    }

    /// Membership test. Returns the unique nonnegative coefficients writing
    /// `v` as a combination of the generators, or `None` when `v` is outside
    /// the cone. The zero cone contains only the origin.
    pub fn contains(&self, v: &[BigRational]) -> Result<Option<Vec<BigRational>>, FanError> {
        if v.len() != self.dim_ambient {
            return Err(FanError::DimensionMismatch {
                expected: self.dim_ambient,
                got: v.len(),
            });
        }
        if self.generators.is_empty() {
            return Ok(if v.iter().all(|x| x.is_zero()) {
                Some(Vec::new())
            } else {
                None
            });
        }
        let m = self.generator_matrix();
        match m.solve(v)? {
            None => Ok(None),
            Some(coeffs) => {
                if coeffs.iter().any(|c| c.is_negative()) {
                    Ok(None)
                } else {
                    Ok(Some(coeffs))
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// ConeId
// ---------------------------------------------------------------------------

/// Identity of a cone inside a fan: the sorted set of its ray indices.
/// The empty set is the zero cone.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConeId(Vec<usize>);

impl ConeId {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        ConeId(indices)
    }

    pub fn zero() -> Self {
        ConeId(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_face_of(&self, other: &ConeId) -> bool {
        self.0.iter().all(|i| other.0.binary_search(i).is_ok())
    }
}

impl fmt::Display for ConeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

// ---------------------------------------------------------------------------
// Fan
// ---------------------------------------------------------------------------

/// A finite simplicial fan: primitive rays plus maximal cones, with all
/// faces derived and the face/intersection axioms verified exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<BigInt>>,
    max_cones: Vec<ConeId>,
    faces: Vec<ConeId>,
    complete: bool,
}

impl Fan {
    pub fn new(rays: Vec<Vec<BigInt>>, max_cones: Vec<Vec<usize>>) -> Result<Self, FanError> {
        if rays.is_empty() || max_cones.is_empty() {
            return Err(FanError::EmptyFan);
        }
        let dim = rays[0].len();
        if dim == 0 {
            return Err(FanError::EmptyFan);
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(FanError::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            if r.iter().all(|x| x.is_zero()) {
                return Err(FanError::BadRay {
                    index: i,
                    reason: "zero vector".into(),
                });
            }
            if !is_primitive(r) {
                return Err(FanError::BadRay {
                    index: i,
                    reason: "not primitive (entries share a factor)".into(),
                });
            }
            if rays[..i].contains(r) {
                return Err(FanError::BadRay {
                    index: i,
                    reason: "duplicate ray".into(),
                });
            }
        }

        let mut ids: Vec<ConeId> = Vec::new();
        for (c, indices) in max_cones.iter().enumerate() {
            for &i in indices {
                if i >= rays.len() {
                    return Err(FanError::BadConeIndex { cone: c, index: i });
                }
            }
            let id = ConeId::new(indices.clone());
            if id.is_zero() {
                return Err(FanError::EmptyFan);
            }
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        for (a_idx, a) in ids.iter().enumerate() {
            for b in ids.iter().skip(a_idx + 1) {
                if a.is_face_of(b) {
                    return Err(FanError::ConeNotMaximal {
                        contained: a.indices().to_vec(),
                        containing: b.indices().to_vec(),
                    });
                }
                if b.is_face_of(a) {
                    return Err(FanError::ConeNotMaximal {
                        contained: b.indices().to_vec(),
                        containing: a.indices().to_vec(),
                    });
                }
            }
        }
        for i in 0..rays.len() {
            if !ids.iter().any(|id| id.indices().contains(&i)) {
                return Err(FanError::UnusedRay { index: i });
            }
        }

        let fan = Fan {
            dim,
            rays,
            max_cones: ids,
            faces: Vec::new(),
            complete: false,
        };

        // Simpliciality of every maximal cone.
        for id in &fan.max_cones {
            let cone = fan.cone(id);
            if cone.generator_matrix().rank() != id.dim() {
                return Err(FanError::NotSimplicial {
                    cone: id.indices().to_vec(),
                });
            }
        }

        // Pairwise face property via separating functionals.
        for (a_idx, a) in fan.max_cones.iter().enumerate() {
            for b in fan.max_cones.iter().skip(a_idx + 1) {
                if !fan.cones_meet_along_common_face(a, b)? {
                    return Err(FanError::IntersectionNotFace {
                        a: a.indices().to_vec(),
                        b: b.indices().to_vec(),
                    });
                }
            }
        }

        let mut fan = fan;
        fan.faces = fan.derive_faces();
        fan.complete = fan.check_complete();
        Ok(fan)
    }

    /// The fan of projective n-space: rays `e_0 = -(e_1+...+e_n), e_1, ..,
    /// e_n` in that order, maximal cones all n-element subsets.
    pub fn projective(n: usize) -> Result<Self, FanError> {
        if n == 0 {
            return Err(FanError::EmptyFan);
        }
        let mut rays = vec![vec![BigInt::from(-1); n]];
        for i in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[i] = BigInt::one();
            rays.push(e);
        }
        let max_cones = (0..=n)
            .map(|skip| (0..=n).filter(|&j| j != skip).collect())
            .collect();
        Self::new(rays, max_cones)
    }

    /// The fan of (P^1)^n: rays `e_1, -e_1, ..., e_n, -e_n` in that order,
    /// maximal cones all sign patterns.
    pub fn p1n(n: usize) -> Result<Self, FanError> {
        if n == 0 {
            return Err(FanError::EmptyFan);
        }
        let mut rays = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut plus = vec![BigInt::zero(); n];
            plus[i] = BigInt::one();
            let mut minus = vec![BigInt::zero(); n];
            minus[i] = BigInt::from(-1);
            rays.push(plus);
            rays.push(minus);
        }
        let max_cones = (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|i| 2 * i + ((mask >> i) & 1))
                    .collect::<Vec<_>>()
            })
            .collect();
        Self::new(rays, max_cones)
    }

    /// Cross-polytope fan on an arbitrary basis: rays `±b_i` (primitivized),
    /// maximal cones all sign patterns. Same combinatorics as `p1n`.
    pub fn crosspolytope(basis: &[Vec<BigInt>]) -> Result<Self, FanError> {
        let n = basis.len();
        if n == 0 {
            return Err(FanError::EmptyFan);
        }
        let mut rays = Vec::with_capacity(2 * n);
        for b in basis {
            let p = primitivize(b);
            let neg = p.iter().map(|x| -x).collect();
            rays.push(p);
            rays.push(neg);
        }
        let max_cones = (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|i| 2 * i + ((mask >> i) & 1))
                    .collect::<Vec<_>>()
            })
            .collect();
        Self::new(rays, max_cones)
    }

    /// Weighted projective fan for weights `d_0..d_n`: the projective-space
    /// fan drawn in a basis of the finer lattice generated by `e_i / d_i`.
    pub fn weighted(weights: &[u64]) -> Result<(Self, WeightedLattice), FanError> {
        let lattice = WeightedLattice::new(weights)?;
        let n = lattice.dim();
        let rays: Vec<Vec<BigInt>> = (0..=n)
            .map(|i| lattice.ray_in_lattice_coords(i))
            .collect::<Result<_, _>>()?;
        let max_cones = (0..=n)
            .map(|skip| (0..=n).filter(|&j| j != skip).collect())
            .collect();
        let fan = Self::new(rays, max_cones)?;
        Ok((fan, lattice))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn rays(&self) -> &[Vec<BigInt>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[BigInt] {
        &self.rays[i]
    }

    pub fn max_cones(&self) -> &[ConeId] {
        &self.max_cones
    }

    /// All faces, zero cone included, sorted by (dimension, indices).
    pub fn faces(&self) -> &[ConeId] {
        &self.faces
    }

    pub fn n_cones(&self) -> usize {
        self.faces.len()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn has_cone(&self, id: &ConeId) -> bool {
        self.max_cones.iter().any(|m| id.is_face_of(m))
    }

    /// Materialize the cone behind an id.
    pub fn cone(&self, id: &ConeId) -> Cone {
        Cone {
            dim_ambient: self.dim,
            generators: id.indices().iter().map(|&i| self.rays[i].clone()).collect(),
        }
    }

    fn derive_faces(&self) -> Vec<ConeId> {
        let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
        set.insert(Vec::new());
        for id in &self.max_cones {
            let idx = id.indices();
            let k = idx.len();
            for mask in 1..(1u64 << k) {
                let subset: Vec<usize> = (0..k)
                    .filter(|&b| (mask >> b) & 1 == 1)
                    .map(|b| idx[b])
                    .collect();
                set.insert(subset);
            }
        }
        let mut faces: Vec<ConeId> = set.into_iter().map(ConeId).collect();
        faces.sort_by_key(|id| (id.dim(), id.indices().to_vec()));
        faces
    }

    fn check_complete(&self) -> bool {
        if self.max_cones.iter().any(|id| id.dim() != self.dim) {
            return false;
        }
        // Every facet of a maximal cone must lie in exactly two maximal cones.
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        for id in &self.max_cones {
            let idx = id.indices();
            for skip in 0..idx.len() {
                let facet: Vec<usize> = idx
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| p != skip)
                    .map(|(_, &i)| i)
                    .collect();
                if !seen.insert(facet.clone()) {
                    continue;
                }
                let facet_id = ConeId(facet);
                let count = self
                    .max_cones
                    .iter()
                    .filter(|m| facet_id.is_face_of(m))
                    .count();
                if count != 2 {
                    return false;
                }
            }
        }
        true
    }

    /// Decide whether two cones of the fan intersect along a common face, by
    /// exhibiting a separating functional.
    fn cones_meet_along_common_face(&self, a: &ConeId, b: &ConeId) -> Result<bool, FanError> {
        let shared: Vec<usize> = a
            .indices()
            .iter()
            .copied()
            .filter(|i| b.indices().contains(i))
            .collect();
        let only_a: Vec<usize> = a
            .indices()
            .iter()
            .copied()
            .filter(|i| !shared.contains(i))
            .collect();
        let only_b: Vec<usize> = b
            .indices()
            .iter()
            .copied()
            .filter(|i| !shared.contains(i))
            .collect();
        if only_a.is_empty() && only_b.is_empty() {
            return Ok(true);
        }

        // Parametrize u in the orthogonal complement of the shared generators.
        let kernel: Vec<Vec<BigRational>> = if shared.is_empty() {
            (0..self.dim)
                .map(|i| {
                    let mut e = vec![BigRational::zero(); self.dim];
                    e[i] = BigRational::one();
                    e
                })
                .collect()
        } else {
            let rows: Vec<Vec<BigRational>> = shared
                .iter()
                .map(|&i| to_rational_vec(&self.rays[i]))
                .collect();
            RatMatrix::new(rows)?.null_space_basis()
        };
        if kernel.is_empty() {
            // No nonzero functional vanishes on the shared face, but strict
            // positivity is required on at least one generator.
            return Ok(false);
        }

        // Constraints c . t >= 1 with u = sum t_k * kernel[k].
        let mut constraints: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
        for &i in &only_a {
            let g = to_rational_vec(&self.rays[i]);
            let row: Vec<BigRational> = kernel.iter().map(|w| dot(&g, w)).collect();
            constraints.push((row, BigRational::one()));
        }
        for &i in &only_b {
            let g = to_rational_vec(&self.rays[i]);
            let row: Vec<BigRational> = kernel.iter().map(|w| -dot(&g, w)).collect();
            constraints.push((row, BigRational::one()));
        }
        Ok(fourier_motzkin_feasible(constraints, kernel.len()))
    }

    /// The unique minimal cone of the fan containing every vector of `vs`,
    /// if a single cone contains them all.
    pub fn smallest_containing_cone(
        &self,
        vs: &[Vec<BigRational>],
    ) -> Result<Option<ConeId>, FanError> {
        for v in vs {
            if v.len() != self.dim {
                return Err(FanError::DimensionMismatch {
                    expected: self.dim,
                    got: v.len(),
                });
            }
        }
        'outer: for id in &self.max_cones {
            let cone = self.cone(id);
            let mut positive = vec![false; id.dim()];
            for v in vs {
                match cone.contains(v)? {
                    None => continue 'outer,
                    Some(coeffs) => {
                        for (k, c) in coeffs.iter().enumerate() {
                            if c.is_positive() {
                                positive[k] = true;
                            }
                        }
                    }
                }
            }
            let support: Vec<usize> = id
                .indices()
                .iter()
                .enumerate()
                .filter(|&(k, _)| positive[k])
                .map(|(_, &i)| i)
                .collect();
            return Ok(Some(ConeId(support)));
        }
        Ok(None)
    }

    /// Cone closure of the image: the smallest cone of this fan containing
    /// `A(c)`, or `None` when the image lies in no single cone.
    pub fn maps_regularly(
        &self,
        a: &RatMatrix,
        c: &Cone,
    ) -> Result<Option<ConeId>, FanError> {
        if a.n_cols() != c.dim_ambient() || a.n_rows() != self.dim {
            return Err(FanError::DimensionMismatch {
                expected: c.dim_ambient(),
                got: a.n_cols(),
            });
        }
        let images: Vec<Vec<BigRational>> = c
            .generators()
            .iter()
            .map(|g| a.apply(&to_rational_vec(g)))
            .collect::<Result<_, _>>()?;
        self.smallest_containing_cone(&images)
    }

    /// Same as [`maps_regularly`] for a cone given by its id in this fan.
    pub fn maps_regularly_id(
        &self,
        a: &RatMatrix,
        id: &ConeId,
    ) -> Result<Option<ConeId>, FanError> {
        self.maps_regularly(a, &self.cone(id))
    }
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Feasibility of `{ t : row . t >= rhs for each constraint }` by
/// Fourier-Motzkin elimination. Small systems only.
fn fourier_motzkin_feasible(
    mut constraints: Vec<(Vec<BigRational>, BigRational)>,
    n_vars: usize,
) -> bool {
    for var in (0..n_vars).rev() {
        let mut lower: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
        let mut upper: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
        let mut rest: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
        for (row, rhs) in constraints {
            let c = row[var].clone();
            if c.is_zero() {
                rest.push((row, rhs));
            } else if c.is_positive() {
                lower.push((row, rhs));
            } else {
                upper.push((row, rhs));
            }
        }
        // Combine each lower bound with each upper bound.
        for (lr, lb) in &lower {
            for (ur, ub) in &upper {
                let lc = &lr[var]; // positive
                let uc = &ur[var]; // negative
                let mut row = vec![BigRational::zero(); var];
                for k in 0..var {
                    row[k] = &lr[k] * &(-uc.clone()) + &ur[k] * lc;
                }
                let rhs = lb * (-uc.clone()) + ub * lc;
                row.truncate(var);
                rest.push((row, rhs));
            }
        }
        for (row, _) in &mut rest {
            row.truncate(var);
        }
        constraints = rest;
    }
    constraints.iter().all(|(_, rhs)| !rhs.is_positive())
}

// ---------------------------------------------------------------------------
// Endomorphism analysis
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EndomorphismReport {
    pub is_morphism: bool,
    /// Present exactly when `is_morphism` holds.
    pub structure: Option<EndomorphismStructure>,
}

#[derive(Debug, Clone)]
pub struct EndomorphismStructure {
    /// `A` maps ray `i` onto ray `ray_permutation[i]`.
    pub ray_permutation: Vec<usize>,
    /// Order of the permutation.
    pub period: u64,
    /// `A^period v_i = multipliers[i] * v_i`, each strictly positive.
    pub multipliers: Vec<BigInt>,
}

/// Check whether `A` induces a toric endomorphism (every cone of the fan maps
/// regularly into the fan) and, if so, return the induced ray permutation,
/// its order `k`, and the exact multipliers of `A^k` on the rays.
pub fn analyze_endomorphism(a: &IntMatrix, fan: &Fan) -> Result<EndomorphismReport, FanError> {
    if !a.is_square() || a.n_rows() != fan.dim() {
        return Err(FanError::DimensionMismatch {
            expected: fan.dim(),
            got: a.n_rows(),
        });
    }
    if a.det()?.is_zero() {
        return Err(FanError::SingularMap);
    }
    let ar = a.to_rat();
    for id in fan.max_cones() {
        if fan.maps_regularly_id(&ar, id)?.is_none() {
            return Ok(EndomorphismReport {
                is_morphism: false,
                structure: None,
            });
        }
    }

    // Every ray must land on a ray: find the matching ray and check the
    // multiplier is a positive integer.
    let mut perm = Vec::with_capacity(fan.n_rays());
    for i in 0..fan.n_rays() {
        let image = a.apply(fan.ray(i))?;
        let target = (0..fan.n_rays()).find(|&j| {
            let w = fan.ray(j);
            // image = c * w for a positive scalar c
            let mut ratio: Option<BigRational> = None;
            for (x, y) in image.iter().zip(w) {
                if y.is_zero() {
                    if !x.is_zero() {
                        return false;
                    }
                } else {
                    let r = BigRational::new(x.clone(), y.clone());
                    match &ratio {
                        None => ratio = Some(r),
                        Some(prev) => {
                            if *prev != r {
                                return false;
                            }
                        }
                    }
                }
            }
            ratio.map(|r| r.is_positive()).unwrap_or(false)
        });
        match target {
            Some(j) => perm.push(j),
            None => {
                return Err(FanError::EndomorphismContradiction(format!(
                    "image of ray {i} is not a positive multiple of any ray"
                )))
            }
        }
    }

    // Order of the permutation.
    let mut period = 1u64;
    let mut seen = vec![false; perm.len()];
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = perm[cur];
            len += 1;
        }
        period = period.lcm(&len);
    }

    let ak = a.pow(period)?;
    let mut multipliers = Vec::with_capacity(fan.n_rays());
    for i in 0..fan.n_rays() {
        let image = ak.apply(fan.ray(i))?;
        let v = fan.ray(i);
        let mut scalar: Option<BigInt> = None;
        let mut ok = true;
        for (x, y) in image.iter().zip(v) {
            if y.is_zero() {
                if !x.is_zero() {
                    ok = false;
                    break;
                }
            } else {
                if (x % y) != BigInt::zero() {
                    ok = false;
                    break;
                }
                let c = x / y;
                match &scalar {
                    None => scalar = Some(c),
                    Some(prev) => {
                        if *prev != c {
                            ok = false;
                            break;
                        }
                    }
                }
            }
        }
        match scalar {
            Some(c) if ok && c.is_positive() => multipliers.push(c),
            _ => {
                return Err(FanError::EndomorphismContradiction(format!(
                    "A^{period} does not act on ray {i} by a positive integer"
                )))
            }
        }
    }

    Ok(EndomorphismReport {
        is_morphism: true,
        structure: Some(EndomorphismStructure {
            ray_permutation: perm,
            period,
            multipliers,
        }),
    })
}

// ---------------------------------------------------------------------------
// Weighted lattice
// ---------------------------------------------------------------------------

/// The lattice `N'` generated by `e_i / d_i` for positive weights
/// `d_0, ..., d_n` with gcd 1, no `n` of which share a common factor.
/// `e_0 = -(e_1 + ... + e_n)`.
#[derive(Debug, Clone)]
pub struct WeightedLattice {
    weights: Vec<BigInt>,
    well_formed: bool,
    /// Columns form a basis of `N'` in standard coordinates.
    basis: RatMatrix,
    basis_inv: RatMatrix,
}

impl WeightedLattice {
    pub fn new(weights: &[u64]) -> Result<Self, FanError> {
        if weights.len() < 2 {
            return Err(FanError::BadWeights("need at least two weights".into()));
        }
        if weights.iter().any(|&d| d == 0) {
            return Err(FanError::BadWeights("weights must be positive".into()));
        }
        let w: Vec<BigInt> = weights.iter().map(|&d| BigInt::from(d)).collect();
        let gcd_all = w.iter().fold(BigInt::zero(), |acc, d| acc.gcd(d));
        if !gcd_all.is_one() {
            return Err(FanError::BadWeights("gcd of all weights must be 1".into()));
        }
        // Well formed: omitting any single weight leaves gcd 1.
        let well_formed = (0..w.len()).all(|skip| {
            w.iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .fold(BigInt::zero(), |acc, (_, d)| acc.gcd(d))
                .is_one()
        });
        if !well_formed {
            return Err(FanError::BadWeights(
                "not well formed: some n of the weights share a common factor".into(),
            ));
        }
        let n = w.len() - 1;
        let m = w.iter().fold(BigInt::one(), |acc, d| acc.lcm(d));

        // Scaled generators of m * N': (m/d_i) e_i and -(m/d_0)(e_1+..+e_n).
        let mut gens: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
        let head = -(&m / &w[0]);
        gens.push(vec![head; n]);
        for i in 1..=n {
            let mut g = vec![BigInt::zero(); n];
            g[i - 1] = &m / &w[i];
            gens.push(g);
        }
        let scaled_basis = lattice_basis(n, &gens)?;
        let m_rat = BigRational::from_integer(m);
        let basis = scaled_basis.to_rat().scale(&m_rat.recip());
        let basis_inv = basis.inverse()?;
        Ok(WeightedLattice {
            weights: w,
            well_formed,
            basis,
            basis_inv,
        })
    }

    pub fn weights(&self) -> &[BigInt] {
        &self.weights
    }

    pub fn is_well_formed(&self) -> bool {
        self.well_formed
    }

    /// Ambient dimension n (one less than the number of weights).
    pub fn dim(&self) -> usize {
        self.weights.len() - 1
    }

    /// Standard coordinates of the generator `e_i / d_i` of ray `i`.
    pub fn ray_generator_standard(&self, i: usize) -> Vec<BigRational> {
        let n = self.dim();
        let d = BigRational::from_integer(self.weights[i].clone());
        if i == 0 {
            vec![-d.recip(); n]
        } else {
            let mut v = vec![BigRational::zero(); n];
            v[i - 1] = d.recip();
            v
        }
    }

    /// Coordinates of the ray generator `e_i / d_i` in the lattice basis.
    /// Primitive by well-formedness.
    pub fn ray_in_lattice_coords(&self, i: usize) -> Result<Vec<BigInt>, FanError> {
        let v = self.ray_generator_standard(i);
        let coords = self.basis_inv.apply(&v)?;
        let mut out = Vec::with_capacity(coords.len());
        for c in &coords {
            if !c.denom().is_one() {
                return Err(FanError::BadWeights(format!(
                    "ray generator {i} is not a lattice point"
                )));
            }
            out.push(c.to_integer());
        }
        if !is_primitive(&out) {
            return Err(FanError::BadWeights(format!(
                "ray generator {i} is not primitive in the weighted lattice"
            )));
        }
        Ok(out)
    }

    /// Express a standard-basis rational matrix in lattice coordinates:
    /// `B^{-1} A B`. Returns `None` when `A` does not preserve the lattice.
    pub fn to_lattice_matrix(&self, a: &RatMatrix) -> Result<Option<IntMatrix>, FanError> {
        if a.n_rows() != self.dim() || a.n_cols() != self.dim() {
            return Err(FanError::DimensionMismatch {
                expected: self.dim(),
                got: a.n_rows(),
            });
        }
        let conj = self.basis_inv.mul(a)?.mul(&self.basis)?;
        Ok(conj.to_int())
    }

    /// Whether `A` (standard coordinates) maps the weighted lattice into
    /// itself.
    pub fn preserves_lattice(&self, a: &RatMatrix) -> Result<bool, FanError> {
        Ok(self.to_lattice_matrix(a)?.is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn qv(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| q(x)).collect()
    }

    /// Brute-force oracle: scan all faces by increasing dimension, return the
    /// first containing every vector.
    fn smallest_cone_brute_force(fan: &Fan, vs: &[Vec<BigRational>]) -> Option<ConeId> {
        for id in fan.faces() {
            let cone = fan.cone(id);
            let all_in = vs
                .iter()
                .all(|v| cone.contains(v).unwrap().is_some());
            if all_in {
                return Some(id.clone());
            }
        }
        None
    }

    #[test]
    fn projective_plane_structure() {
        let fan = Fan::projective(2).unwrap();
        assert_eq!(fan.n_rays(), 3);
        assert_eq!(fan.max_cones().len(), 3);
        assert!(fan.is_complete());
        let rays: BTreeSet<Vec<BigInt>> = fan.rays().iter().cloned().collect();
        let expected: BTreeSet<Vec<BigInt>> = [
            vec![BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(-1), BigInt::from(-1)],
        ]
        .into_iter()
        .collect();
        assert_eq!(rays, expected);
    }

    #[test]
    fn projective_rays_sum_to_zero() {
        for n in 1..=4 {
            let fan = Fan::projective(n).unwrap();
            for coord in 0..n {
                let total: BigInt = fan.rays().iter().map(|r| r[coord].clone()).sum();
                assert!(total.is_zero());
            }
        }
    }

    #[test]
    fn p1n_structure() {
        let fan = Fan::p1n(2).unwrap();
        assert_eq!(fan.n_rays(), 4);
        assert_eq!(fan.max_cones().len(), 4);
        assert!(fan.is_complete());
        // 3^2 faces of (P^1)^2: coordinates in {+,-,0}.
        assert_eq!(fan.n_cones(), 9);
    }

    #[test]
    fn crosspolytope_standard_basis_matches_p1n() {
        let basis = vec![
            vec![BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(1)],
        ];
        let a = Fan::crosspolytope(&basis).unwrap();
        let b = Fan::p1n(2).unwrap();
        assert_eq!(a.rays(), b.rays());
        assert_eq!(a.max_cones(), b.max_cones());
    }

    #[test]
    fn first_quadrant_membership() {
        let cone = Cone::new(
            2,
            vec![
                vec![BigInt::from(1), BigInt::from(0)],
                vec![BigInt::from(0), BigInt::from(1)],
            ],
        )
        .unwrap();
        assert_eq!(cone.contains(&qv(&[2, 3])).unwrap(), Some(qv(&[2, 3])));
        assert_eq!(cone.contains(&qv(&[-1, 0])).unwrap(), None);
    }

    #[test]
    fn sigma02_membership_solves_system() {
        // Cone on e_0, e_2 of the projective plane.
        let cone = Cone::new(
            2,
            vec![
                vec![BigInt::from(-1), BigInt::from(-1)],
                vec![BigInt::from(0), BigInt::from(1)],
            ],
        )
        .unwrap();
        assert_eq!(cone.contains(&qv(&[-1, 2])).unwrap(), Some(qv(&[1, 3])));
    }

    #[test]
    fn zero_cone_contains_only_origin() {
        let z = Cone::zero(2);
        assert_eq!(z.contains(&qv(&[0, 0])).unwrap(), Some(vec![]));
        assert_eq!(z.contains(&qv(&[1, 0])).unwrap(), None);
    }

    #[test]
    fn smallest_cone_examples() {
        let fan = Fan::projective(2).unwrap();
        // (-1,2) lies in the interior of the cone on e_0, e_2 (indices 0, 2).
        let id = fan
            .smallest_containing_cone(&[qv(&[-1, 2])])
            .unwrap()
            .unwrap();
        assert_eq!(id, ConeId::new(vec![0, 2]));
        // The origin gives the zero cone.
        let id = fan
            .smallest_containing_cone(&[qv(&[0, 0])])
            .unwrap()
            .unwrap();
        assert!(id.is_zero());
        // (3,-2) and (-2,0) straddle cones.
        assert!(fan
            .smallest_containing_cone(&[qv(&[3, -2]), qv(&[-2, 0])])
            .unwrap()
            .is_none());
    }

    #[test]
    fn maps_regularly_examples() {
        let fan = Fan::projective(2).unwrap();
        let a = IntMatrix::from_i64(&[&[-1, -2], &[2, 0]]).to_rat();
        // Identity maps each cone to itself.
        let id_matrix = RatMatrix::identity(2);
        for id in fan.max_cones() {
            assert_eq!(
                fan.maps_regularly_id(&id_matrix, id).unwrap(),
                Some(id.clone())
            );
        }
        // Ray e_1 (index 1) maps into the cone on e_0, e_2.
        let ray = fan.cone(&ConeId::new(vec![1]));
        assert_eq!(
            fan.maps_regularly(&a, &ray).unwrap(),
            Some(ConeId::new(vec![0, 2]))
        );
        // The cone on e_0, e_2 does not map regularly.
        let sigma02 = fan.cone(&ConeId::new(vec![0, 2]));
        assert_eq!(fan.maps_regularly(&a, &sigma02).unwrap(), None);
    }

    #[test]
    fn brute_force_oracle_agreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let fans = vec![Fan::projective(2).unwrap(), Fan::p1n(2).unwrap(), Fan::projective(3).unwrap()];
        for fan in &fans {
            for _ in 0..200 {
                let v: Vec<BigRational> = (0..fan.dim())
                    .map(|_| {
                        BigRational::new(
                            BigInt::from(rng.gen_range(-30..=30)),
                            BigInt::from(rng.gen_range(1..=7)),
                        )
                    })
                    .collect();
                let fast = fan.smallest_containing_cone(&[v.clone()]).unwrap();
                let slow = smallest_cone_brute_force(fan, &[v]);
                assert_eq!(fast, slow);
                // Complete fan: someone must contain it.
                assert!(fast.is_some());
            }
        }
    }

    #[test]
    fn fan_rejects_invalid_input() {
        // Overlapping cones that do not meet along a face:
        // cone((1,0),(0,1)) and cone((1,1),(-1,2)) overlap in a 2D region.
        let rays = vec![
            vec![BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(1)],
            vec![BigInt::from(-1), BigInt::from(2)],
        ];
        let err = Fan::new(rays, vec![vec![0, 1], vec![2, 3]]).unwrap_err();
        assert!(matches!(err, FanError::IntersectionNotFace { .. }));

        // Non-simplicial listing: dependent generators.
        let rays = vec![
            vec![BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(-1), BigInt::from(0)],
        ];
        let err = Fan::new(rays, vec![vec![0, 1]]).unwrap_err();
        assert!(matches!(err, FanError::NotSimplicial { .. }));

        // Non-primitive ray.
        let rays = vec![vec![BigInt::from(2), BigInt::from(0)]];
        let err = Fan::new(rays, vec![vec![0]]).unwrap_err();
        assert!(matches!(err, FanError::BadRay { .. }));
    }

    #[test]
    fn half_plane_fan_not_complete() {
        // Upper half plane: cones ((1,0),(0,1)) and ((0,1),(-1,0)).
        let rays = vec![
            vec![BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(-1), BigInt::from(0)],
        ];
        let fan = Fan::new(rays, vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert!(!fan.is_complete());
    }

    #[test]
    fn endomorphism_scaling() {
        let fan = Fan::projective(2).unwrap();
        let a = IntMatrix::diag(&[2, 2]);
        let report = analyze_endomorphism(&a, &fan).unwrap();
        assert!(report.is_morphism);
        let s = report.structure.unwrap();
        assert_eq!(s.ray_permutation, vec![0, 1, 2]);
        assert_eq!(s.period, 1);
        assert!(s.multipliers.iter().all(|m| *m == BigInt::from(2)));
    }

    #[test]
    fn endomorphism_swap_on_p1n() {
        let fan = Fan::p1n(2).unwrap();
        let a = IntMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let report = analyze_endomorphism(&a, &fan).unwrap();
        assert!(report.is_morphism);
        let s = report.structure.unwrap();
        // Rays are e1, -e1, e2, -e2; the swap exchanges e1 <-> e2.
        assert_eq!(s.ray_permutation, vec![2, 3, 0, 1]);
        assert_eq!(s.period, 2);
        assert!(s.multipliers.iter().all(|m| m.is_one()));
    }

    #[test]
    fn endomorphism_fails_for_unstable_matrix() {
        let fan = Fan::projective(2).unwrap();
        let a = IntMatrix::from_i64(&[&[-1, -2], &[2, 0]]);
        let report = analyze_endomorphism(&a, &fan).unwrap();
        assert!(!report.is_morphism);
    }

    #[test]
    fn nonnegative_matrices_map_positive_orthant_cones() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..25 {
            let n = rng.gen_range(2..=3);
            let rows: Vec<Vec<BigInt>> = (0..n)
                .map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(0..=4))).collect())
                .collect();
            let a = IntMatrix::new(rows).unwrap();
            if a.det().unwrap().is_zero() {
                continue;
            }
            let fan = Fan::p1n(n).unwrap();
            let ar = a.to_rat();
            // Faces of the positive orthant have even ray indices.
            for id in fan.faces() {
                if id.is_zero() || id.indices().iter().any(|i| i % 2 == 1) {
                    continue;
                }
                assert!(fan.maps_regularly_id(&ar, id).unwrap().is_some());
            }
        }
    }

    #[test]
    fn weighted_lattice_123() {
        let (fan, lattice) = Fan::weighted(&[1, 2, 3]).unwrap();
        assert!(lattice.is_well_formed());
        assert!(fan.is_complete());
        assert_eq!(fan.n_rays(), 3);
        // Sum of d_i * v_i must vanish.
        for coord in 0..2 {
            let total: BigInt = fan
                .rays()
                .iter()
                .zip(lattice.weights())
                .map(|(r, d)| &r[coord] * d)
                .sum();
            assert!(total.is_zero());
        }
        // The matrix from the weighted projective example preserves the
        // lattice and becomes integral in lattice coordinates.
        let a = RatMatrix::new(vec![
            vec![q(1), BigRational::new(BigInt::from(-3), BigInt::from(2))],
            vec![BigRational::new(BigInt::from(2), BigInt::from(3)), q(0)],
        ])
        .unwrap();
        let m = lattice.to_lattice_matrix(&a).unwrap().unwrap();
        assert_eq!(m.det().unwrap().abs(), BigInt::from(1));
        // A matrix that does not preserve the lattice is rejected.
        let bad = RatMatrix::new(vec![
            vec![BigRational::new(BigInt::from(1), BigInt::from(5)), q(0)],
            vec![q(0), q(1)],
        ])
        .unwrap();
        assert!(lattice.to_lattice_matrix(&bad).unwrap().is_none());
    }

    #[test]
    fn weighted_rejects_bad_weights() {
        assert!(matches!(
            WeightedLattice::new(&[2, 4, 6]),
            Err(FanError::BadWeights(_))
        ));
        assert!(matches!(
            WeightedLattice::new(&[2, 2, 3]),
            Err(FanError::BadWeights(_))
        ));
        assert!(matches!(
            WeightedLattice::new(&[0, 1]),
            Err(FanError::BadWeights(_))
        ));
    }

    #[test]
    fn random_vectors_have_unique_minimal_cone() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let fan = Fan::p1n(3).unwrap();
        for _ in 0..300 {
            let v: Vec<BigRational> = (0..3)
                .map(|_| {
                    BigRational::new(
                        BigInt::from(rng.gen_range(-20..=20)),
                        BigInt::from(rng.gen_range(1..=5)),
                    )
                })
                .collect();
            // Complete fan: every vector lies somewhere, and the containing
            // cones have a unique minimal element.
            let minimal = fan.smallest_containing_cone(&[v.clone()]).unwrap().unwrap();
            let containing: Vec<ConeId> = fan
                .faces()
                .iter()
                .filter(|id| fan.cone(id).contains(&v).unwrap().is_some())
                .cloned()
                .collect();
            assert!(!containing.is_empty());
            for c in &containing {
                assert!(minimal.is_face_of(c));
            }
        }
    }
}
