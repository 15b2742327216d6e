//! s-numbers of finite real operators (approximation numbers realized as
//! singular values on Euclidean spaces), rank-one constructors, the
//! operator-ideal quasi-norm built on the sequence-space Luxemburg norm, and
//! property suites for the s-number, quasi-norm, and operator-ideal axioms.

mod svd;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::MatrixKernel;
use crate::num::{real, widen, KahanSum, Real};
use crate::orlicz::MusielakFamily;
use crate::sampling::seeded_rng;
use crate::space::{
    membership_diagnostic, luxemburg_norm, LuxemburgResult, TruncationPolicy, VectorNorm,
    VectorSequence,
};
use svd::{jacobi_svd, reconstruct, Svd};

/// Relative cutoff under which a singular value counts as zero for rank.
const RANK_REL_TOL: f64 = 1e-10;

/// A dense real operator `T : ℓ₂^n → ℓ₂^m`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteOperator<T: Real> {
    rows: Vec<Vec<T>>,
    m: usize,
    n: usize,
}

impl<T: Real> FiniteOperator<T> {
    /// Builds an operator from row-major entries (rectangular, finite).
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::Validation("operator must have at least one row and column".into()));
        }
        let n = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Validation(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Domain(format!("entry ({i}, {j}) is not finite")));
                }
            }
        }
        let m = rows.len();
        Ok(FiniteOperator { rows, m, n })
    }

    /// The zero operator of the given shape.
    pub fn zero(m: usize, n: usize) -> Result<Self> {
        FiniteOperator::from_rows(vec![vec![T::zero(); n.max(1)]; m.max(1)])
    }

    /// The identity on `ℓ₂^k`.
    pub fn identity(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Validation("identity needs dimension at least 1".into()));
        }
        let rows = (0..k)
            .map(|i| (0..k).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        FiniteOperator::from_rows(rows)
    }

    /// Rank-one operator `x′ ⊗ y : x ↦ ⟨x′, x⟩ y` with entries `y_i x′_j`.
    pub fn rank_one(x_prime: &[T], y: &[T]) -> Result<Self> {
        if x_prime.is_empty() || y.is_empty() {
            return Err(Error::Validation("rank-one factors must be nonempty".into()));
        }
        let rows = y
            .iter()
            .map(|&yi| x_prime.iter().map(|&xj| yi * xj).collect())
            .collect();
        FiniteOperator::from_rows(rows)
    }

    pub fn nrows(&self) -> usize {
        self.m
    }

    pub fn ncols(&self) -> usize {
        self.n
    }

    /// Row-major entries.
    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    /// `T x` for `x ∈ R^n`.
    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n {
            return Err(Error::Validation(format!(
                "input has {} coordinates, operator expects {}",
                x.len(),
                self.n
            )));
        }
        Ok(self
            .rows
            .iter()
            .map(|row| {
                let mut acc = KahanSum::new();
                for (a, b) in row.iter().zip(x.iter()) {
                    acc.add(*a * *b);
                }
                acc.value()
            })
            .collect())
    }

    pub fn transpose(&self) -> Self {
        let rows = (0..self.n)
            .map(|j| (0..self.m).map(|i| self.rows[i][j]).collect())
            .collect::<Vec<Vec<T>>>();
        FiniteOperator { rows, m: self.n, n: self.m }
    }

    pub fn scale(&self, c: T) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::Domain("scale factor must be finite".into()));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&v| c * v).collect())
            .collect();
        FiniteOperator::from_rows(rows)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.m != other.m || self.n != other.n {
            return Err(Error::Precondition(format!(
                "cannot add a {}x{} operator to a {}x{} one",
                self.m, self.n, other.m, other.n
            )));
        }
        let rows = self
            .rows
            .iter()
            .zip(other.rows.iter())
            .map(|(a, b)| a.iter().zip(b.iter()).map(|(&x, &y)| x + y).collect())
            .collect();
        FiniteOperator::from_rows(rows)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-T::one())?)
    }

    /// Composition `self ∘ other` (matrix product `self · other`).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n != other.m {
            return Err(Error::Precondition(format!(
                "cannot compose {}x{} with {}x{}",
                self.m, self.n, other.m, other.n
            )));
        }
        let rows = (0..self.m)
            .map(|i| {
                (0..other.n)
                    .map(|j| {
                        let mut acc = KahanSum::new();
                        for t in 0..self.n {
                            acc.add(self.rows[i][t] * other.rows[t][j]);
                        }
                        acc.value()
                    })
                    .collect()
            })
            .collect();
        FiniteOperator::from_rows(rows)
    }

    pub fn frobenius_norm(&self) -> T {
        let mut acc = KahanSum::new();
        for row in &self.rows {
            for &v in row {
                acc.add(v * v);
            }
        }
        acc.value().sqrt()
    }

    /// SVD with a reconstruction certificate:
    /// `‖T − UΣVᵀ‖_F ≤ 1e-10 · ‖T‖_F` or the decomposition is rejected.
    fn checked_svd(&self) -> Result<Svd<T>> {
        let svd = jacobi_svd(&self.rows);
        let take = svd.sigma.len();
        let rec = reconstruct(&svd, take, self.m, self.n);
        let mut diff = KahanSum::new();
        for i in 0..self.m {
            for j in 0..self.n {
                let d = self.rows[i][j] - rec[i][j];
                diff.add(d * d);
            }
        }
        let residual = diff.value().sqrt();
        if residual > real::<T>(1e-10) * self.frobenius_norm() {
            return Err(Error::Postcondition(format!(
                "svd reconstruction residual {} exceeds certificate",
                widen(residual)
            )));
        }
        Ok(svd)
    }

    /// The s-number sequence: singular values sorted nonincreasing, length
    /// `min(m, n)`.
    pub fn s_numbers(&self) -> Result<Vec<T>> {
        Ok(self.checked_svd()?.sigma)
    }

    /// `s_j(T)` for one-based `j`, zero once `j` exceeds `min(m, n)`.
    pub fn s_number(&self, j: usize) -> Result<T> {
        if j == 0 {
            return Err(Error::Range("s-number indices are one-based".into()));
        }
        let s = self.s_numbers()?;
        Ok(s.get(j - 1).copied().unwrap_or(T::zero()))
    }

    /// Operator (spectral) norm `‖T‖ = s₁(T)`.
    pub fn operator_norm(&self) -> Result<T> {
        Ok(self.s_numbers()?[0])
    }

    /// Numerical rank: singular values above `1e-10 · σ₁`.
    pub fn rank(&self) -> Result<usize> {
        let s = self.s_numbers()?;
        let cutoff = s[0] * real(RANK_REL_TOL);
        Ok(s.iter().filter(|&&v| v > cutoff).count())
    }

    /// Best rank-`k` approximation (truncated SVD).
    pub fn best_rank_approximation(&self, k: usize) -> Result<Self> {
        let svd = self.checked_svd()?;
        FiniteOperator::from_rows(reconstruct(&svd, k, self.m, self.n))
    }
}

/// One axiom's outcome: `worst_violation ≤ 0` means satisfied with margin.
#[derive(Debug, Clone)]
pub struct AxiomCheck<T> {
    pub axiom: String,
    pub passed: bool,
    pub worst_violation: T,
    pub detail: String,
}

impl<T: Real> AxiomCheck<T> {
    fn new(axiom: &str, worst_violation: T, detail: String) -> Self {
        AxiomCheck {
            axiom: axiom.to_string(),
            passed: worst_violation <= T::zero(),
            worst_violation,
            detail,
        }
    }
}

/// Outcome of an axiom suite.
#[derive(Debug, Clone)]
pub struct AxiomSuiteReport<T> {
    pub checks: Vec<AxiomCheck<T>>,
    pub all_passed: bool,
}

impl<T: Real> AxiomSuiteReport<T> {
    fn from_checks(checks: Vec<AxiomCheck<T>>) -> Self {
        let all_passed = checks.iter().all(|c| c.passed);
        AxiomSuiteReport { checks, all_passed }
    }
}

/// Checks the s-number axioms on concrete operators.
///
/// * S1 (norming/monotonicity): the s-sequence of `t` is nonincreasing and
///   `s₁` dominates `‖t x‖/‖x‖` on probe vectors.
/// * S2 (additivity): `s_{m+n−1}(s + t) ≤ s_m(s) + s_n(t)` for the given
///   index pair (requires `s`, `t` of equal shape and `m+n−1 ≤ min dim`).
/// * S3 (ideal): `s_j(r·s·q) ≤ ‖r‖ s_j(s) ‖q‖` for every valid `j`
///   (requires the composition `r·s·q` to exist).
/// * S4 (rank): `s_j(t) = 0` whenever `rank(t) < j`. (The strict form: the
///   identity on `ℓ₂^k` has rank `k` and `s_k = 1`, so `rank ≤ j` cannot be
///   the hypothesis.)
/// * S5 (normalization): every s-number of the identity equals 1.
pub fn check_s_axioms<T: Real>(
    s: &FiniteOperator<T>,
    t: &FiniteOperator<T>,
    r: &FiniteOperator<T>,
    q: &FiniteOperator<T>,
    m: usize,
    n: usize,
) -> Result<AxiomSuiteReport<T>> {
    if s.nrows() != t.nrows() || s.ncols() != t.ncols() {
        return Err(Error::Precondition("S2 needs operators of equal shape".into()));
    }
    let min_dim = s.nrows().min(s.ncols());
    if m == 0 || n == 0 || m + n - 1 > min_dim {
        return Err(Error::Precondition(format!(
            "additivity indices need 1 ≤ m, n with m+n-1 ≤ {min_dim}, got ({m}, {n})"
        )));
    }
    let slack = real::<T>(1e-9);
    let mut checks = Vec::with_capacity(5);

    // S1: monotone sequence, and σ₁ dominates Rayleigh probes.
    let st = t.s_numbers()?;
    let mut worst = -T::one();
    for w in st.windows(2) {
        worst = worst.max(w[1] - w[0]);
    }
    worst = worst.max(-st[st.len() - 1]); // negativity check
    let l2 = VectorNorm::lp(t.ncols(), real(2.0))?;
    let l2_out = VectorNorm::lp(t.nrows(), real(2.0))?;
    let mut probes: Vec<Vec<T>> = (0..t.ncols())
        .map(|j| (0..t.ncols()).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    probes.push(vec![T::one(); t.ncols()]);
    for x in &probes {
        let nx = l2.eval(x)?;
        if nx > T::zero() {
            let image = l2_out.eval(&t.apply(x)?)?;
            worst = worst.max(image / nx - st[0] - slack);
        }
    }
    checks.push(AxiomCheck::new("S1", worst, "nonincreasing s-sequence with s1 = ‖T‖".into()));

    // S2: additivity at the requested index pair.
    let ssum = s.add(t)?;
    let lhs = ssum.s_number(m + n - 1)?;
    let rhs = s.s_number(m)? + t.s_number(n)?;
    checks.push(AxiomCheck::new(
        "S2",
        lhs - rhs - slack,
        format!("s_{}(S+T) = {} vs s_{m}(S)+s_{n}(T) = {}", m + n - 1, widen(lhs), widen(rhs)),
    ));

    // S3: two-sided ideal inequality for every index of the composite.
    let composite = r.compose(s)?.compose(q)?;
    let rn = r.operator_norm()?;
    let qn = q.operator_norm()?;
    let sc = composite.s_numbers()?;
    let mut worst3 = -T::one();
    for (j, &sj) in sc.iter().enumerate() {
        let bound = rn * s.s_number(j + 1)? * qn;
        worst3 = worst3.max(sj - bound - slack);
    }
    checks.push(AxiomCheck::new(
        "S3",
        worst3,
        format!("s_j(RSQ) ≤ ‖R‖ s_j(S) ‖Q‖ with ‖R‖ = {}, ‖Q‖ = {}", widen(rn), widen(qn)),
    ));

    // S4: beyond the numerical rank the s-numbers vanish.
    let rank = t.rank()?;
    let mut worst4 = -T::one();
    for (j, &sj) in st.iter().enumerate() {
        if j + 1 > rank {
            worst4 = worst4.max(sj - slack * (T::one() + st[0]));
        }
    }
    checks.push(AxiomCheck::new(
        "S4",
        worst4,
        format!("rank {rank}: s_j = 0 for j > rank (strict form rank(T) < j)"),
    ));

    // S5: the identity has a flat unit spectrum.
    let id = FiniteOperator::<T>::identity(min_dim)?;
    let si = id.s_numbers()?;
    let mut worst5 = -T::one();
    for &v in &si {
        worst5 = worst5.max((v - T::one()).abs() - real(1e-12));
    }
    checks.push(AxiomCheck::new("S5", worst5, format!("identity on dim {min_dim}")));

    Ok(AxiomSuiteReport::from_checks(checks))
}

/// The operator-ideal quasi-norm: the sequence-space Luxemburg norm of the
/// s-number sequence `(s_j(T))_j` placed at indices `1, 2, …`.
pub fn ideal_quasi_norm<T: Real>(
    family: &MusielakFamily<T>,
    kernel: &MatrixKernel<T>,
    op: &FiniteOperator<T>,
    tol: T,
    policy: &TruncationPolicy<T>,
) -> Result<LuxemburgResult<T>> {
    let s = op.s_numbers()?;
    let pairs = s.into_iter().enumerate().map(|(i, v)| (i + 1, v)).collect();
    let seq = VectorSequence::scalar(pairs)?;
    let vn = VectorNorm::lp(1, T::one())?;
    luxemburg_norm(family, kernel, &seq, &vn, tol, policy)
}

/// Deterministic Gaussian operator sampler (seed and shape fixed up front).
#[derive(Debug, Clone, Copy)]
pub struct OperatorSampler {
    pub seed: u64,
    pub rows: usize,
    pub cols: usize,
    /// Entries are standard normal scaled by this amplitude.
    pub amplitude: f64,
}

impl OperatorSampler {
    pub fn new(seed: u64, rows: usize, cols: usize, amplitude: f64) -> Result<Self> {
        if rows == 0 || cols == 0 || rows > 64 || cols > 64 {
            return Err(Error::Validation(
                "sampled operator shapes must lie within 1..=64".into(),
            ));
        }
        if !(amplitude > 0.0) || !amplitude.is_finite() {
            return Err(Error::Validation("sampler amplitude must be positive and finite".into()));
        }
        Ok(OperatorSampler { seed, rows, cols, amplitude })
    }

    fn draw<T: Real>(&self, rng: &mut rand_chacha::ChaCha8Rng, rows: usize, cols: usize) -> FiniteOperator<T> {
        let entries = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| real::<T>(self.amplitude * rng.sample::<f64, _>(StandardNormal)))
                    .collect()
            })
            .collect();
        FiniteOperator::from_rows(entries).expect("gaussian draws are finite")
    }

    fn draw_unit_vector<T: Real>(&self, rng: &mut rand_chacha::ChaCha8Rng, len: usize) -> Vec<T> {
        loop {
            let v: Vec<T> =
                (0..len).map(|_| real(rng.sample::<f64, _>(StandardNormal))).collect();
            let mut sq = KahanSum::new();
            for &x in &v {
                sq.add(x * x);
            }
            if sq.value().sqrt() > real(1e-6) {
                return v;
            }
        }
    }
}

/// Quasi-norm axiom suite outcome.
#[derive(Debug, Clone)]
pub struct QuasiNormAxiomReport<T> {
    pub samples: usize,
    /// Window estimate of the halving constant used as the quasi-triangle M.
    pub m_estimate: T,
    /// False when the window shows a halving violation (QN2 not applicable).
    pub qn2_applicable: bool,
    /// Measured range of `‖x′⊗y‖_Φ^A / (‖x′‖₂ ‖y‖₂)` (reported, not asserted).
    pub qn1_ratio_range: (T, T),
    pub checks: Vec<AxiomCheck<T>>,
    pub all_passed: bool,
}

/// Samples operator pairs/triples and checks the quasi-norm axioms:
/// homogeneity, the quasi-triangle inequality with the windowed halving
/// constant, the two-sided ideal bound, and the rank-one factorization
/// `‖x′⊗y‖_Φ^A = ‖x′‖₂ ‖y‖₂ · (Luxemburg norm of the kernel's first column)`.
pub fn check_quasi_norm_axioms<T: Real>(
    family: &MusielakFamily<T>,
    kernel: &MatrixKernel<T>,
    sampler: &OperatorSampler,
    samples: usize,
    tol: T,
    policy: &TruncationPolicy<T>,
) -> Result<QuasiNormAxiomReport<T>> {
    if samples == 0 {
        return Err(Error::Validation("need at least one sample".into()));
    }
    let min_dim = sampler.rows.min(sampler.cols);
    let window_rows = 64.max(4 * min_dim);
    let window_cols = 2 * min_dim;
    let m_report = kernel.estimate_condition_m(window_rows, window_cols)?;
    let qn2_applicable = !m_report.violated;
    let m_const = m_report.m_estimate;
    let col1 = kernel.column_lphi_norm(family, 1, tol, policy)?;
    let slack = real::<T>(1e-9);

    let mut worst_qn2 = -T::one();
    let mut worst_qn3 = -T::one();
    let mut worst_hom = -T::one();
    let mut worst_qn1 = -T::one();
    let mut ratio_min = T::infinity();
    let mut ratio_max = T::zero();

    for i in 0..samples {
        let mut rng = seeded_rng(sampler.seed, (i + 1) as u64);
        let s = sampler.draw::<T>(&mut rng, sampler.rows, sampler.cols);
        let t = sampler.draw::<T>(&mut rng, sampler.rows, sampler.cols);
        let r = sampler.draw::<T>(&mut rng, sampler.rows, sampler.rows);
        let right = sampler.draw::<T>(&mut rng, sampler.cols, sampler.cols);
        let alpha: T = real(rng.gen_range(0.25..4.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 });
        let xp = sampler.draw_unit_vector::<T>(&mut rng, sampler.cols);
        let y = sampler.draw_unit_vector::<T>(&mut rng, sampler.rows);

        let is = ideal_quasi_norm(family, kernel, &s, tol, policy)?.norm;
        let it = ideal_quasi_norm(family, kernel, &t, tol, policy)?.norm;

        if qn2_applicable {
            let isum = ideal_quasi_norm(family, kernel, &s.add(&t)?, tol, policy)?.norm;
            worst_qn2 = worst_qn2.max(isum - m_const * (is + it) - slack);
        }

        let irst = ideal_quasi_norm(family, kernel, &r.compose(&s)?.compose(&right)?, tol, policy)?
            .norm;
        let bound = r.operator_norm()? * is * right.operator_norm()?;
        worst_qn3 = worst_qn3.max(irst - bound - slack);

        let ia = ideal_quasi_norm(family, kernel, &s.scale(alpha)?, tol, policy)?.norm;
        let hom_slack = real::<T>(8.0) * tol * alpha.abs() * is + real(1e-12);
        worst_hom = worst_hom.max((ia - alpha.abs() * is).abs() - hom_slack);

        let l2c = VectorNorm::lp(sampler.cols, real(2.0))?;
        let l2r = VectorNorm::lp(sampler.rows, real(2.0))?;
        let denom = l2c.eval(&xp)? * l2r.eval(&y)?;
        let r1 = FiniteOperator::rank_one(&xp, &y)?;
        let i1 = ideal_quasi_norm(family, kernel, &r1, tol, policy)?.norm;
        let ratio = i1 / denom;
        ratio_min = ratio_min.min(ratio);
        ratio_max = ratio_max.max(ratio);
        let predicted = denom * col1.norm;
        worst_qn1 =
            worst_qn1.max((i1 - predicted).abs() - real::<T>(1e-8) * predicted.max(T::one()));
    }

    let mut checks = vec![
        AxiomCheck::new(
            "QN1-factorization",
            worst_qn1,
            format!("rank-one norms factor through the first-column norm {}", widen(col1.norm)),
        ),
        AxiomCheck::new("QN3", worst_qn3, "‖RST‖ ≤ ‖R‖ ‖S‖_ideal ‖T‖".into()),
        AxiomCheck::new("homogeneity", worst_hom, "‖αT‖_ideal = |α| ‖T‖_ideal".into()),
    ];
    if qn2_applicable {
        checks.insert(
            1,
            AxiomCheck::new(
                "QN2",
                worst_qn2,
                format!("quasi-triangle with window constant M = {}", widen(m_const)),
            ),
        );
    }
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(QuasiNormAxiomReport {
        samples,
        m_estimate: m_const,
        qn2_applicable,
        qn1_ratio_range: (ratio_min, ratio_max),
        checks,
        all_passed,
    })
}

/// Operator-ideal axiom suite outcome.
#[derive(Debug, Clone)]
pub struct IdealAxiomReport<T> {
    /// Whether the first kernel column has a finite certified Luxemburg norm
    /// (the theorem's standing hypothesis).
    pub hypothesis_ok: bool,
    pub first_column_norm: Option<T>,
    pub checks: Vec<AxiomCheck<T>>,
    pub all_passed: bool,
}

/// Checks the operator-ideal axioms on samples: rank-one members have finite
/// quasi-norm (OI1), sums of members stay in the ideal (OI2), and two-sided
/// compositions obey the ideal bound (OI3).
pub fn check_ideal_axioms<T: Real>(
    family: &MusielakFamily<T>,
    kernel: &MatrixKernel<T>,
    sampler: &OperatorSampler,
    samples: usize,
    tol: T,
    policy: &TruncationPolicy<T>,
) -> Result<IdealAxiomReport<T>> {
    if samples == 0 {
        return Err(Error::Validation("need at least one sample".into()));
    }
    let col1 = match kernel.column_lphi_norm(family, 1, tol, policy) {
        Ok(r) if r.certified && r.norm.is_finite() => r,
        Ok(r) => {
            return Ok(IdealAxiomReport {
                hypothesis_ok: false,
                first_column_norm: Some(r.norm),
                checks: vec![AxiomCheck::new(
                    "hypothesis",
                    T::one(),
                    "first-column Luxemburg norm is not certified".into(),
                )],
                all_passed: false,
            })
        }
        Err(e) => {
            return Ok(IdealAxiomReport {
                hypothesis_ok: false,
                first_column_norm: None,
                checks: vec![AxiomCheck::new(
                    "hypothesis",
                    T::one(),
                    format!("first-column Luxemburg norm failed: {e}"),
                )],
                all_passed: false,
            })
        }
    };
    let slack = real::<T>(1e-9);
    let mut worst_oi1 = -T::one();
    let mut worst_oi2 = -T::one();
    let mut worst_oi3 = -T::one();

    // The zero rank-one member must sit at quasi-norm exactly zero.
    let zero_r1 = FiniteOperator::<T>::zero(sampler.rows, sampler.cols)?;
    let iz = ideal_quasi_norm(family, kernel, &zero_r1, tol, policy)?.norm;
    worst_oi1 = worst_oi1.max(iz.abs() - real(1e-15));

    for i in 0..samples {
        let mut rng = seeded_rng(sampler.seed, (i + 1) as u64);
        let xp = sampler.draw_unit_vector::<T>(&mut rng, sampler.cols);
        let y = sampler.draw_unit_vector::<T>(&mut rng, sampler.rows);
        let r1 = FiniteOperator::rank_one(&xp, &y)?;
        let i1 = ideal_quasi_norm(family, kernel, &r1, tol, policy)?;
        if !(i1.norm.is_finite() && i1.certified) {
            worst_oi1 = worst_oi1.max(T::one());
        }

        let s = sampler.draw::<T>(&mut rng, sampler.rows, sampler.cols);
        let t = sampler.draw::<T>(&mut rng, sampler.rows, sampler.cols);
        let isum = ideal_quasi_norm(family, kernel, &s.add(&t)?, tol, policy)?;
        if !(isum.norm.is_finite() && isum.certified) {
            worst_oi2 = worst_oi2.max(T::one());
        }

        let r = sampler.draw::<T>(&mut rng, sampler.rows, sampler.rows);
        let right = sampler.draw::<T>(&mut rng, sampler.cols, sampler.cols);
        let comp = r.compose(&s)?.compose(&right)?;
        let icomp = ideal_quasi_norm(family, kernel, &comp, tol, policy)?;
        let is = ideal_quasi_norm(family, kernel, &s, tol, policy)?.norm;
        let bound = r.operator_norm()? * is * right.operator_norm()?;
        if !(icomp.norm.is_finite() && icomp.certified) {
            worst_oi3 = worst_oi3.max(T::one());
        }
        worst_oi3 = worst_oi3.max(icomp.norm - bound - slack);
    }

    let checks = vec![
        AxiomCheck::new("OI1", worst_oi1, "rank-one operators lie in the ideal".into()),
        AxiomCheck::new("OI2", worst_oi2, "sums of members stay in the ideal".into()),
        AxiomCheck::new("OI3", worst_oi3, "two-sided compositions obey the ideal bound".into()),
    ];
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(IdealAxiomReport {
        hypothesis_ok: true,
        first_column_norm: Some(col1.norm),
        checks,
        all_passed,
    })
}

/// Ratio of the operator norm to the ideal quasi-norm for one operator.
#[derive(Debug, Clone, Copy)]
pub struct InclusionProbe<T> {
    pub operator_norm: T,
    pub ideal_norm: T,
    /// `‖T‖ / ‖T‖_Φ^A`; bounded ratios across samples evidence continuity of
    /// the inclusion into bounded operators.
    pub ratio: T,
}

/// Probes the inclusion bound `‖T‖ ≤ C ‖T‖_Φ^A` for a nonzero operator.
pub fn inclusion_bound_probe<T: Real>(
    family: &MusielakFamily<T>,
    kernel: &MatrixKernel<T>,
    op: &FiniteOperator<T>,
    tol: T,
    policy: &TruncationPolicy<T>,
) -> Result<InclusionProbe<T>> {
    let operator_norm = op.operator_norm()?;
    if operator_norm == T::zero() {
        return Err(Error::Precondition("inclusion probe needs a nonzero operator".into()));
    }
    let ideal_norm = ideal_quasi_norm(family, kernel, op, tol, policy)?.norm;
    if !(ideal_norm > T::zero()) {
        return Err(Error::Degeneracy(
            "ideal quasi-norm vanished for a nonzero operator".into(),
        ));
    }
    Ok(InclusionProbe { operator_norm, ideal_norm, ratio: operator_norm / ideal_norm })
}

/// Closure surrogate outcome.
#[derive(Debug, Clone)]
pub struct ClosureReport<T> {
    pub samples: usize,
    pub checks: Vec<AxiomCheck<T>>,
    pub all_passed: bool,
}

/// Finite-scale surrogate for closedness of the ideal: truncated-SVD
/// approximants `T^{(k)}` converge to `T` in quasi-norm (residuals
/// nonincreasing, zero at the rank), and grid membership diagnostics of the
/// s-number sequence are preserved along the approximation.
pub fn check_h_closed<T: Real>(
    family: &MusielakFamily<T>,
    kernel: &MatrixKernel<T>,
    sampler: &OperatorSampler,
    samples: usize,
    sigma_grid: &[T],
    tol: T,
    policy: &TruncationPolicy<T>,
) -> Result<ClosureReport<T>> {
    if samples == 0 {
        return Err(Error::Validation("need at least one sample".into()));
    }
    let slack = real::<T>(1e-9);
    let vn = VectorNorm::lp(1, T::one())?;
    let mut worst_monotone = -T::one();
    let mut worst_zero = -T::one();
    let mut worst_membership = -T::one();

    for i in 0..samples {
        let mut rng = seeded_rng(sampler.seed, (i + 1) as u64);
        let t = sampler.draw::<T>(&mut rng, sampler.rows, sampler.cols);
        let rank = t.rank()?;
        let s_full = t.s_numbers()?;
        let seq_full = VectorSequence::scalar(
            s_full.iter().copied().enumerate().map(|(j, v)| (j + 1, v)).collect(),
        )?;
        let h_full = membership_diagnostic(family, kernel, &seq_full, &vn, sigma_grid, policy)?
            .h_space_on_grid;

        let mut prev = T::infinity();
        for k in 0..=rank {
            let approx = t.best_rank_approximation(k)?;
            let resid = ideal_quasi_norm(family, kernel, &t.sub(&approx)?, tol, policy)?.norm;
            worst_monotone =
                worst_monotone.max(resid - prev - slack - real::<T>(4.0) * tol * prev);
            prev = resid;
            if k == rank {
                worst_zero =
                    worst_zero.max(resid - real::<T>(1e-8) * (T::one() + t.frobenius_norm()));
            }
            let s_k = approx.s_numbers()?;
            let seq_k = VectorSequence::scalar(
                s_k.iter().copied().enumerate().map(|(j, v)| (j + 1, v)).collect(),
            )?;
            let h_k = membership_diagnostic(family, kernel, &seq_k, &vn, sigma_grid, policy)?
                .h_space_on_grid;
            if h_k != h_full {
                worst_membership = worst_membership.max(T::one());
            }
        }
    }

    let checks = vec![
        AxiomCheck::new(
            "residual-nonincreasing",
            worst_monotone,
            "‖T − T^(k)‖_ideal is nonincreasing in k".into(),
        ),
        AxiomCheck::new(
            "residual-zero-at-rank",
            worst_zero,
            "the rank-truncated residual vanishes".into(),
        ),
        AxiomCheck::new(
            "membership-preserved",
            worst_membership,
            "grid membership of the s-sequence is stable along approximants".into(),
        ),
    ];
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(ClosureReport { samples, checks, all_passed })
}
