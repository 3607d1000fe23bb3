//! Sparse multivariate Laurent polynomials over the rationals, polynomial
//! maps, degree matrices, and the dominant-term stability test on (P^1)^n.
//!
//! Terms are kept in a map from exponent vectors (entries may be negative)
//! to nonzero rational coefficients, so the representation is canonical.

mod parse;

pub use parse::{parse_poly, ParseError};

use crate::matrix::IntMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Per-variable degree matrix of a polynomial map: entry `(i, j)` is the
/// degree of component `j` in variable `i` (nonnegative by convention).
pub type DegreeMatrix = IntMatrix;

pub const DEFAULT_TERM_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum PolyError {
    VarCountMismatch { expected: usize, got: usize },
    /// Term-count budget exceeded during expansion.
    BudgetExceeded { limit: usize },
    /// Operation requires a genuine polynomial (no negative exponents).
    LaurentNotAllowed,
    /// Negative powers exist only for single-term polynomials.
    NegativePowerOfNonMonomial,
    Parse(ParseError),
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::VarCountMismatch { expected, got } => {
                write!(f, "expected {expected} variables, got {got}")
            }
            PolyError::BudgetExceeded { limit } => {
                write!(f, "term budget of {limit} exceeded during expansion")
            }
            PolyError::LaurentNotAllowed => {
                write!(f, "operation requires a polynomial without negative exponents")
            }
            PolyError::NegativePowerOfNonMonomial => {
                write!(f, "negative power of a polynomial that is not a single term")
            }
            PolyError::Parse(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for PolyError {}

impl From<ParseError> for PolyError {
    fn from(e: ParseError) -> Self {
        PolyError::Parse(e)
    }
}

// ---------------------------------------------------------------------------
// SparsePoly
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    n_vars: usize,
    terms: BTreeMap<Vec<i64>, BigRational>,
}

impl SparsePoly {
    pub fn zero(n_vars: usize) -> Self {
        SparsePoly {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(n_vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; n_vars], c);
        }
        p
    }

    pub fn one(n_vars: usize) -> Self {
        Self::constant(n_vars, BigRational::one())
    }

    pub fn monomial(n_vars: usize, exps: Vec<i64>, coeff: BigRational) -> Result<Self, PolyError> {
        if exps.len() != n_vars {
            return Err(PolyError::VarCountMismatch {
                expected: n_vars,
                got: exps.len(),
            });
        }
        let mut p = Self::zero(n_vars);
        if !coeff.is_zero() {
            p.terms.insert(exps, coeff);
        }
        Ok(p)
    }

    pub fn var(n_vars: usize, i: usize) -> Self {
        let mut exps = vec![0; n_vars];
        exps[i] = 1;
        Self::monomial(n_vars, exps, BigRational::one()).expect("exponent length matches")
    }

    /// Build from a term list; duplicate exponent vectors are summed and
    /// zero coefficients dropped.
    pub fn from_terms(
        n_vars: usize,
        terms: Vec<(Vec<i64>, BigRational)>,
    ) -> Result<Self, PolyError> {
        let mut p = Self::zero(n_vars);
        for (exps, coeff) in terms {
            if exps.len() != n_vars {
                return Err(PolyError::VarCountMismatch {
                    expected: n_vars,
                    got: exps.len(),
                });
            }
            p.insert_term(exps, coeff);
        }
        Ok(p)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[i64]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_laurent(&self) -> bool {
        self.terms.keys().any(|e| e.iter().any(|&x| x < 0))
    }

    pub(crate) fn insert_term(&mut self, exps: Vec<i64>, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, rhs: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.check_vars(rhs)?;
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> SparsePoly {
        SparsePoly {
            n_vars: self.n_vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, rhs: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.mul_budget(rhs, DEFAULT_TERM_BUDGET)
    }

    pub fn mul_budget(&self, rhs: &SparsePoly, budget: usize) -> Result<SparsePoly, PolyError> {
        self.check_vars(rhs)?;
        let mut out = SparsePoly::zero(self.n_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let exps: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.insert_term(exps, ca * cb);
                if out.terms.len() > budget {
                    return Err(PolyError::BudgetExceeded { limit: budget });
                }
            }
        }
        Ok(out)
    }

    /// Integer power. Negative exponents only for single-term polynomials.
    pub fn pow_budget(&self, k: i64, budget: usize) -> Result<SparsePoly, PolyError> {
        if k < 0 {
            if self.terms.len() != 1 {
                return Err(PolyError::NegativePowerOfNonMonomial);
            }
            let (e, c) = self.terms.iter().next().unwrap();
            let exps: Vec<i64> = e.iter().map(|x| x * k).collect();
            let mut coeff = BigRational::one();
            let inv = c.recip();
            for _ in 0..(-k) {
                coeff *= &inv;
            }
            return SparsePoly::monomial(self.n_vars, exps, coeff);
        }
        let mut result = SparsePoly::one(self.n_vars);
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_budget(&base, budget)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_budget(&base, budget)?;
            }
        }
        Ok(result)
    }

    /// Largest exponent of the variable; `None` for the zero polynomial.
    pub fn max_exp(&self, var: usize) -> Option<i64> {
        self.terms.keys().map(|e| e[var]).max()
    }

    pub fn min_exp(&self, var: usize) -> Option<i64> {
        self.terms.keys().map(|e| e[var]).min()
    }

    /// Degree in a variable clamped at zero (`deg+`); 0 for the zero
    /// polynomial.
    pub fn deg_plus(&self, var: usize) -> i64 {
        self.max_exp(var).unwrap_or(0).max(0)
    }

    /// Degree contribution of a Laurent component written as `p / q` with a
    /// monomial denominator: `max(deg_var p, deg_var q)`.
    pub fn deg_span(&self, var: usize) -> i64 {
        let hi = self.max_exp(var).unwrap_or(0).max(0);
        let lo = self.min_exp(var).unwrap_or(0).min(0);
        hi - lo
    }

    /// The unique monomial term whose exponent vector dominates every other
    /// term coordinatewise, if present. Rejects Laurent input.
    pub fn dominant_term(&self) -> Result<Option<Vec<i64>>, PolyError> {
        if self.is_laurent() {
            return Err(PolyError::LaurentNotAllowed);
        }
        if self.is_zero() {
            return Ok(None);
        }
        let candidate: Vec<i64> = (0..self.n_vars)
            .map(|v| self.max_exp(v).unwrap())
            .collect();
        Ok(if self.terms.contains_key(&candidate) {
            Some(candidate)
        } else {
            None
        })
    }

    /// Substitute `args[i]` for variable `i` and expand.
    pub fn substitute(&self, args: &[SparsePoly], budget: usize) -> Result<SparsePoly, PolyError> {
        if args.len() != self.n_vars {
            return Err(PolyError::VarCountMismatch {
                expected: self.n_vars,
                got: args.len(),
            });
        }
        let out_vars = if let Some(first) = args.first() {
            first.n_vars
        } else {
            return Ok(SparsePoly::zero(0));
        };
        for a in args {
            if a.n_vars != out_vars {
                return Err(PolyError::VarCountMismatch {
                    expected: out_vars,
                    got: a.n_vars,
                });
            }
        }
        let mut power_cache: BTreeMap<(usize, i64), SparsePoly> = BTreeMap::new();
        let mut out = SparsePoly::zero(out_vars);
        for (exps, coeff) in &self.terms {
            let mut term = SparsePoly::constant(out_vars, coeff.clone());
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = match power_cache.get(&(i, e)) {
                    Some(p) => p.clone(),
                    None => {
                        let p = args[i].pow_budget(e, budget)?;
                        power_cache.insert((i, e), p.clone());
                        p
                    }
                };
                term = term.mul_budget(&p, budget)?;
            }
            for (e, c) in term.terms {
                out.insert_term(e, c);
            }
            if out.terms.len() > budget {
                return Err(PolyError::BudgetExceeded { limit: budget });
            }
        }
        Ok(out)
    }

    /// Shift all exponents by the given vector (multiply by a monomial).
    fn shift(&self, delta: &[i64]) -> SparsePoly {
        SparsePoly {
            n_vars: self.n_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    (
                        e.iter().zip(delta).map(|(x, d)| x + d).collect(),
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    fn check_vars(&self, rhs: &SparsePoly) -> Result<(), PolyError> {
        if self.n_vars != rhs.n_vars {
            return Err(PolyError::VarCountMismatch {
                expected: self.n_vars,
                got: rhs.n_vars,
            });
        }
        Ok(())
    }

    /// Render with explicit variable names; inverse of the parser on
    /// canonical forms.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a SparsePoly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poly = self.poly;
        if poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, coeff) in poly.terms.iter().rev() {
            let negative = coeff.is_negative();
            let abs = if negative { -coeff } else { coeff.clone() };
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || exps.iter().all(|&e| e == 0) {
                factors.push(abs.to_string());
            }
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = &self.names[i];
                if e == 1 {
                    factors.push(name.clone());
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.n_vars).map(|i| format!("z{i}")).collect();
        write!(f, "{}", self.display_with(&names))
    }
}

// ---------------------------------------------------------------------------
// PolynomialMap
// ---------------------------------------------------------------------------

/// A self-map given by one (Laurent) polynomial component per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialMap {
    vars: Vec<String>,
    comps: Vec<SparsePoly>,
}

impl PolynomialMap {
    pub fn new(vars: Vec<String>, comps: Vec<SparsePoly>) -> Result<Self, PolyError> {
        if comps.len() != vars.len() {
            return Err(PolyError::VarCountMismatch {
                expected: vars.len(),
                got: comps.len(),
            });
        }
        for c in &comps {
            if c.n_vars() != vars.len() {
                return Err(PolyError::VarCountMismatch {
                    expected: vars.len(),
                    got: c.n_vars(),
                });
            }
        }
        Ok(PolynomialMap { vars, comps })
    }

    /// Parse semicolon-separated components over the given variables.
    pub fn parse(text: &str, vars: Vec<String>) -> Result<Self, PolyError> {
        let comps = text
            .split(';')
            .map(|part| parse_poly(part, &vars))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(vars, comps)
    }

    pub fn identity(n: usize) -> Self {
        let vars = (1..=n).map(|i| format!("z{i}")).collect();
        let comps = (0..n).map(|i| SparsePoly::var(n, i)).collect();
        PolynomialMap { vars, comps }
    }

    /// Monomial map of an exponent matrix: component `j` is
    /// `prod_i z_i^{a[j][i]}` (Laurent when entries are negative).
    pub fn from_exponent_matrix(a: &IntMatrix) -> Result<Self, PolyError> {
        let n = a.n_rows();
        if a.n_cols() != n {
            return Err(PolyError::VarCountMismatch {
                expected: n,
                got: a.n_cols(),
            });
        }
        let vars: Vec<String> = (1..=n).map(|i| format!("z{i}")).collect();
        let comps = (0..n)
            .map(|j| {
                let exps: Vec<i64> = a
                    .row(j)
                    .iter()
                    .map(|x| {
                        use num_traits::ToPrimitive;
                        x.to_i64().expect("exponent fits in i64")
                    })
                    .collect();
                SparsePoly::monomial(n, exps, BigRational::one())
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PolynomialMap { vars, comps })
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn components(&self) -> &[SparsePoly] {
        &self.comps
    }

    pub fn is_laurent(&self) -> bool {
        self.comps.iter().any(|c| c.is_laurent())
    }

    /// Degree matrix: entry `(i, j)` is the degree of component `j` in
    /// variable `i`, counting a monomial denominator for Laurent components.
    pub fn degree_matrix(&self) -> DegreeMatrix {
        let n = self.n_vars();
        let mut m = IntMatrix::zero(n, n);
        for j in 0..n {
            for i in 0..n {
                m.set_entry(i, j, BigInt::from(self.comps[j].deg_span(i)));
            }
        }
        m
    }

    pub fn dominant_terms(&self) -> Result<Vec<Option<Vec<i64>>>, PolyError> {
        self.comps.iter().map(|c| c.dominant_term()).collect()
    }

    /// Composition `self . g` (apply `g` first): component `j` is
    /// `self_j(g_1, ..., g_n)`.
    pub fn compose(&self, g: &PolynomialMap, budget: usize) -> Result<PolynomialMap, PolyError> {
        if self.n_vars() != g.n_vars() {
            return Err(PolyError::VarCountMismatch {
                expected: self.n_vars(),
                got: g.n_vars(),
            });
        }
        let comps = self
            .comps
            .iter()
            .map(|c| c.substitute(&g.comps, budget))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PolynomialMap {
            vars: self.vars.clone(),
            comps,
        })
    }
}

impl fmt::Display for PolynomialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.comps.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}", c.display_with(&self.vars))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Stability of polynomial maps on (P^1)^n
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyStabilityVerdict {
    /// Every component has a dominant term: algebraically stable.
    StableCertified,
    /// Some component lacks a dominant term and the iterate `f^N` has all
    /// per-variable degrees positive: certified not algebraically stable.
    UnstableCertified { iterate: u32 },
    /// Neither certificate applies within the iteration budget.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct DegComparison {
    pub k: u32,
    /// Degree matrix of the composed iterate `f^k`.
    pub deg_iterate: DegreeMatrix,
    /// Matrix power `Deg(f)^k`.
    pub deg_power: DegreeMatrix,
    pub equal: bool,
}

#[derive(Debug, Clone)]
pub struct PolyStabilityReport {
    pub verdict: PolyStabilityVerdict,
    /// Comparisons `Deg(f^k)` vs `Deg(f)^k`, attached when the verdict is
    /// inconclusive.
    pub evidence: Vec<DegComparison>,
}

/// Dominant-term stability test. Components with dominant terms certify
/// stability outright. Otherwise iterates are composed up to `k_max`: an
/// iterate with all per-variable degrees positive certifies instability
/// (cancellation in actual iterates is what the matrix-power proxy misses,
/// so the hypothesis is checked on the composed iterate, never on a power
/// of the degree matrix).
pub fn is_stable_poly(
    f: &PolynomialMap,
    k_max: u32,
    budget: usize,
) -> Result<PolyStabilityReport, PolyError> {
    if f.is_laurent() {
        return Err(PolyError::LaurentNotAllowed);
    }
    let dominant = f.dominant_terms()?;
    if dominant.iter().all(|d| d.is_some()) {
        return Ok(PolyStabilityReport {
            verdict: PolyStabilityVerdict::StableCertified,
            evidence: Vec::new(),
        });
    }
    let n = f.n_vars();
    let deg_f = f.degree_matrix();
    let mut evidence = Vec::new();
    let mut iterate = f.clone();
    let mut deg_power = deg_f.clone();
    for k in 2..=k_max {
        iterate = f.compose(&iterate, budget)?;
        deg_power = deg_power.mul(&deg_f).expect("square matrices");
        let all_positive = (0..n).all(|j| (0..n).all(|i| iterate.comps[j].deg_plus(i) > 0));
        if all_positive {
            return Ok(PolyStabilityReport {
                verdict: PolyStabilityVerdict::UnstableCertified { iterate: k },
                evidence,
            });
        }
        let deg_iterate = iterate.degree_matrix();
        let equal = deg_iterate == deg_power;
        evidence.push(DegComparison {
            k,
            deg_iterate,
            deg_power: deg_power.clone(),
            equal,
        });
    }
    Ok(PolyStabilityReport {
        verdict: PolyStabilityVerdict::Inconclusive,
        evidence,
    })
}

// ---------------------------------------------------------------------------
// Multi-homogenization
// ---------------------------------------------------------------------------

/// Homogenization of one component with respect to every coordinate pair
/// `(x_i, y_i)` of (P^1)^n. Both parts are homogeneous of the same degree in
/// each pair and share no monomial factor. Variables are ordered
/// `x_1, y_1, x_2, y_2, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiHomogeneousPair {
    pub numerator: SparsePoly,
    pub denominator: SparsePoly,
    pub pair_degrees: Vec<i64>,
}

/// Homogenize a map with (Laurent) polynomial components. A Laurent
/// component is the fraction `p / q` with the monomial denominator
/// `q = prod z_i^{-min(0, min exponent)}`; general rational maps with
/// non-monomial denominators are not representable here.
pub fn homogenize(f: &PolynomialMap) -> Result<Vec<MultiHomogeneousPair>, PolyError> {
    let n = f.n_vars();
    let mut out = Vec::with_capacity(n);
    for comp in f.components() {
        // Split into p / q with q a monomial.
        let neg_shift: Vec<i64> = (0..n)
            .map(|i| -comp.min_exp(i).unwrap_or(0).min(0))
            .collect();
        let p = comp.shift(&neg_shift);
        let q_exps = neg_shift.clone();
        let d: Vec<i64> = (0..n)
            .map(|i| p.max_exp(i).unwrap_or(0).max(q_exps[i]))
            .collect();

        let homogenize_poly = |poly: &SparsePoly| -> SparsePoly {
            let mut h = SparsePoly::zero(2 * n);
            for (e, c) in poly.terms() {
                let mut exps = vec![0i64; 2 * n];
                for i in 0..n {
                    exps[2 * i] = e[i];
                    exps[2 * i + 1] = d[i] - e[i];
                }
                h.insert_term(exps, c.clone());
            }
            h
        };
        let mut numerator = homogenize_poly(&p);
        let mut denominator = homogenize_poly(&SparsePoly::monomial(
            n,
            q_exps,
            BigRational::one(),
        )?);

        // Strip shared monomial content.
        if !numerator.is_zero() && !denominator.is_zero() {
            let mut content = vec![i64::MAX; 2 * n];
            for (e, _) in numerator.terms().chain(denominator.terms()) {
                for (slot, &x) in content.iter_mut().zip(e) {
                    *slot = (*slot).min(x);
                }
            }
            if content.iter().any(|&x| x > 0) {
                let delta: Vec<i64> = content.iter().map(|&x| -x).collect();
                numerator = numerator.shift(&delta);
                denominator = denominator.shift(&delta);
            }
        }

        // Both sides are homogeneous of equal degree in every pair.
        let pair_degrees: Vec<i64> = (0..n)
            .map(|i| {
                denominator
                    .terms()
                    .next()
                    .map(|(e, _)| e[2 * i] + e[2 * i + 1])
                    .unwrap_or(0)
            })
            .collect();
        debug_assert!(numerator.terms().all(|(e, _)| {
            (0..n).all(|i| {
                numerator.is_zero() || e[2 * i] + e[2 * i + 1] == pair_degrees[i]
            })
        }));
        out.push(MultiHomogeneousPair {
            numerator,
            denominator,
            pair_degrees,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::pic_pullback_matrix_p1n;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn vars(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("z{i}")).collect()
    }

    fn pmap(text: &str, n: usize) -> PolynomialMap {
        PolynomialMap::parse(text, vars(n)).unwrap()
    }

    #[test]
    fn degree_matrix_shift_map() {
        let f = pmap("z2; z3; z1 + z2", 3);
        let expected = IntMatrix::from_i64(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 0]]);
        assert_eq!(f.degree_matrix(), expected);
    }

    #[test]
    fn degree_matrix_zero_component_column() {
        let f = pmap("z1; 0", 2);
        assert_eq!(
            f.degree_matrix(),
            IntMatrix::from_i64(&[&[1, 0], &[0, 0]])
        );
    }

    #[test]
    fn degree_matrix_matches_picard_matrix_for_monomial_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..30 {
            let n = rng.gen_range(2..=3);
            let rows: Vec<Vec<BigInt>> = (0..n)
                .map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect())
                .collect();
            let a = IntMatrix::new(rows).unwrap();
            let f = PolynomialMap::from_exponent_matrix(&a).unwrap();
            assert_eq!(f.degree_matrix(), pic_pullback_matrix_p1n(&a).unwrap());
        }
    }

    #[test]
    fn dominant_term_examples() {
        let p = parse_poly("2*z1^2*z2 + 3*z1^2 + z1*z2 - 5*z2 - 1", &vars(2)).unwrap();
        assert_eq!(p.n_terms(), 5);
        assert_eq!(p.dominant_term().unwrap(), Some(vec![2, 1]));

        let p = parse_poly("z1 + z2", &vars(2)).unwrap();
        assert_eq!(p.dominant_term().unwrap(), None);

        let p = parse_poly("7*z1^3*z2^2", &vars(2)).unwrap();
        assert_eq!(p.dominant_term().unwrap(), Some(vec![3, 2]));

        let laurent = SparsePoly::monomial(2, vec![-1, 0], q(1)).unwrap();
        assert!(matches!(
            laurent.dominant_term(),
            Err(PolyError::LaurentNotAllowed)
        ));
    }

    #[test]
    fn compose_identity_and_shift() {
        let id = PolynomialMap::identity(3);
        let f = pmap("z2; z3; z1 + z2", 3);
        assert_eq!(f.compose(&id, DEFAULT_TERM_BUDGET).unwrap(), f);
        assert_eq!(id.compose(&f, DEFAULT_TERM_BUDGET).unwrap(), f);
        let ff = f.compose(&f, DEFAULT_TERM_BUDGET).unwrap();
        assert_eq!(ff, pmap("z3; z1 + z2; z2 + z3", 3));
    }

    #[test]
    fn compose_tracks_exponent_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..20 {
            let n = rng.gen_range(2..=3);
            let sample = |rng: &mut ChaCha8Rng| -> IntMatrix {
                IntMatrix::new(
                    (0..n)
                        .map(|_| (0..n).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect())
                        .collect(),
                )
                .unwrap()
            };
            let a = sample(&mut rng);
            let b = sample(&mut rng);
            let fa = PolynomialMap::from_exponent_matrix(&a).unwrap();
            let fb = PolynomialMap::from_exponent_matrix(&b).unwrap();
            let composed = fa.compose(&fb, DEFAULT_TERM_BUDGET).unwrap();
            let fab = PolynomialMap::from_exponent_matrix(&a.mul(&b).unwrap()).unwrap();
            assert_eq!(composed, fab);
        }
    }

    #[test]
    fn stability_verdicts() {
        // All components dominated.
        let f = pmap("z1^2*z2 + z1^2; z1*z2", 2);
        let report = is_stable_poly(&f, 4, DEFAULT_TERM_BUDGET).unwrap();
        assert_eq!(report.verdict, PolyStabilityVerdict::StableCertified);

        // Missing dominant term; second iterate has all degrees positive.
        let f = pmap("z1 + z2; z1*z2", 2);
        let report = is_stable_poly(&f, 4, DEFAULT_TERM_BUDGET).unwrap();
        assert_eq!(
            report.verdict,
            PolyStabilityVerdict::UnstableCertified { iterate: 2 }
        );

        // The shift map stays inconclusive at small depth, with matrix
        // comparisons attached.
        let f = pmap("z2; z3; z1 + z2", 3);
        let report = is_stable_poly(&f, 4, DEFAULT_TERM_BUDGET).unwrap();
        assert_eq!(report.verdict, PolyStabilityVerdict::Inconclusive);
        assert_eq!(report.evidence.len(), 3);
        assert!(report.evidence.iter().take(2).all(|c| c.equal));
        // Degrees drop behind the matrix power at the fourth iterate.
        assert!(!report.evidence[2].equal);
    }

    #[test]
    fn stable_maps_have_multiplicative_degree_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let n = rng.gen_range(2..=3);
            // Random maps, then force a dominant term onto each component.
            let comps: Vec<SparsePoly> = (0..n)
                .map(|_| {
                    let mut p = SparsePoly::zero(n);
                    for _ in 0..rng.gen_range(1..=3) {
                        let exps: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
                        p.insert_term(exps, q(rng.gen_range(1..=5)));
                    }
                    let dominant: Vec<i64> =
                        (0..n).map(|v| p.max_exp(v).unwrap_or(0)).collect();
                    p.insert_term(dominant, q(1));
                    p
                })
                .collect();
            let f = PolynomialMap::new(vars(n), comps).unwrap();
            let comps: Vec<SparsePoly> = (0..n)
                .map(|_| {
                    let mut p = SparsePoly::zero(n);
                    let exps: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
                    p.insert_term(exps.clone(), q(rng.gen_range(1..=4)));
                    let low: Vec<i64> = exps.iter().map(|&e| rng.gen_range(0..=e)).collect();
                    p.insert_term(low, q(rng.gen_range(1..=4)));
                    p
                })
                .collect();
            let g = PolynomialMap::new(vars(n), comps).unwrap();
            if f.dominant_terms().unwrap().iter().any(|d| d.is_none())
                || g.dominant_terms().unwrap().iter().any(|d| d.is_none())
            {
                continue;
            }
            let fg = f.compose(&g, DEFAULT_TERM_BUDGET).unwrap();
            let expected = g.degree_matrix().mul(&f.degree_matrix()).unwrap();
            assert_eq!(fg.degree_matrix(), expected);
        }
    }

    #[test]
    fn homogenize_monomial_map() {
        let a = IntMatrix::from_i64(&[&[-1, -2], &[2, 0]]);
        let f = PolynomialMap::from_exponent_matrix(&a).unwrap();
        let pairs = homogenize(&f).unwrap();
        let pic = pic_pullback_matrix_p1n(&a).unwrap();
        for (j, pair) in pairs.iter().enumerate() {
            for i in 0..2 {
                assert_eq!(BigInt::from(pair.pair_degrees[i]), *pic.entry(i, j));
            }
        }
        // First component 1/(z1 z2^2): numerator y1 y2^2, denominator x1 x2^2.
        assert_eq!(
            pairs[0].numerator,
            SparsePoly::monomial(4, vec![0, 1, 0, 2], q(1)).unwrap()
        );
        assert_eq!(
            pairs[0].denominator,
            SparsePoly::monomial(4, vec![1, 0, 2, 0], q(1)).unwrap()
        );
    }

    #[test]
    fn homogenize_squaring_on_p1() {
        let f = pmap("z1^2", 1);
        let pairs = homogenize(&f).unwrap();
        assert_eq!(
            pairs[0].numerator,
            SparsePoly::monomial(2, vec![2, 0], q(1)).unwrap()
        );
        assert_eq!(
            pairs[0].denominator,
            SparsePoly::monomial(2, vec![0, 2], q(1)).unwrap()
        );
    }

    #[test]
    fn homogenize_polynomial_map() {
        let f = pmap("z1 + z2; z1*z2", 2);
        let pairs = homogenize(&f).unwrap();
        // P1 = x1 y2 + x2 y1, Q1 = y1 y2.
        let mut p1 = SparsePoly::zero(4);
        p1.insert_term(vec![1, 0, 0, 1], q(1));
        p1.insert_term(vec![0, 1, 1, 0], q(1));
        assert_eq!(pairs[0].numerator, p1);
        assert_eq!(
            pairs[0].denominator,
            SparsePoly::monomial(4, vec![0, 1, 0, 1], q(1)).unwrap()
        );
        // P2 = x1 x2, Q2 = y1 y2.
        assert_eq!(
            pairs[1].numerator,
            SparsePoly::monomial(4, vec![1, 0, 1, 0], q(1)).unwrap()
        );
        assert_eq!(
            pairs[1].denominator,
            SparsePoly::monomial(4, vec![0, 1, 0, 1], q(1)).unwrap()
        );
    }

    #[test]
    fn budget_is_enforced() {
        // (z1 + z2 + 1)^k blows past a tiny budget.
        let p = parse_poly("z1 + z2 + 1", &vars(2)).unwrap();
        assert!(matches!(
            p.pow_budget(20, 50),
            Err(PolyError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn display_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let names = vars(3);
        for _ in 0..500 {
            let mut p = SparsePoly::zero(3);
            for _ in 0..rng.gen_range(0..6) {
                let exps: Vec<i64> = (0..3).map(|_| rng.gen_range(-3..=3i64)).collect();
                let num = rng.gen_range(-9..=9);
                let den = rng.gen_range(1..=4);
                p.insert_term(exps, BigRational::new(BigInt::from(num), BigInt::from(den)));
            }
            let text = p.display_with(&names).to_string();
            let reparsed = parse_poly(&text, &names).unwrap();
            assert_eq!(reparsed, p, "round trip failed for `{text}`");
        }
    }
}
