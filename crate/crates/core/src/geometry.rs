//! Finite-scale harnesses for the geometric properties of the sequence
//! space: norm–modular agreement, uniform monotonicity, a uniform-Opial
//! surrogate, σ-Dedekind completeness, order continuity, vanishing tails
//! (AK behaviour), and the collapse of the space onto its order-continuous
//! part under the family doubling condition.
//!
//! Every harness is deterministic under a fixed seed, aggregates per-sample
//! margins by an associative minimum (so parallel evaluation cannot change
//! the result), and re-runs its own worst sample to certify that the
//! reported margin is reproducible.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::MatrixKernel;
use crate::num::{real, widen, Real};
use crate::orlicz::{check_delta2_family, check_star_condition, default_grid, MusielakFamily};
use crate::sampling::{random_nonneg_sequence, random_vector_sequence, seeded_rng};
use crate::space::{
    luxemburg_norm, membership_diagnostic, modular, LuxemburgResult, TruncationPolicy,
    VectorNorm, VectorSequence,
};

/// How random sequences are drawn inside the harnesses.
#[derive(Debug, Clone, Copy)]
pub struct SamplingParams {
    /// Maximum number of populated indices per sequence.
    pub max_support: usize,
    /// Support indices are drawn uniformly from `1..=max_index`.
    pub max_index: usize,
    /// Coordinate entries are drawn uniformly from `[-amplitude, amplitude]`.
    pub amplitude: f64,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams { max_support: 8, max_index: 64, amplitude: 1.0 }
    }
}

impl SamplingParams {
    fn validate(&self) -> Result<()> {
        if self.max_support == 0 || self.max_index == 0 {
            return Err(Error::Validation(
                "sampling needs positive support size and index range".into(),
            ));
        }
        if !(self.amplitude > 0.0) || !self.amplitude.is_finite() {
            return Err(Error::Validation("sampling amplitude must be positive and finite".into()));
        }
        Ok(())
    }
}

/// A fully specified sequence space plus solver and harness settings.
#[derive(Clone)]
pub struct SpaceConfig<T: Real> {
    pub family: MusielakFamily<T>,
    pub kernel: MatrixKernel<T>,
    pub vector_norm: VectorNorm<T>,
    /// Relative tolerance handed to the norm solver.
    pub tol: T,
    pub policy: TruncationPolicy<T>,
    pub seed: u64,
    /// Margins in `(0, margin_floor]` are inconclusive rather than passes:
    /// they sit inside accumulated solver tolerance.
    pub margin_floor: T,
    /// Downgrade hypothesis violations from errors to warnings.
    pub exploratory: bool,
    pub sampling: SamplingParams,
    /// Evaluate samples on a thread pool. Aggregation is an associative
    /// minimum over a deterministic per-sample margin, so this never changes
    /// any reported bit.
    pub parallel: bool,
}

impl<T: Real> SpaceConfig<T> {
    pub fn new(
        family: MusielakFamily<T>,
        kernel: MatrixKernel<T>,
        vector_norm: VectorNorm<T>,
    ) -> Self {
        SpaceConfig {
            family,
            kernel,
            vector_norm,
            tol: real(1e-9),
            policy: TruncationPolicy::default(),
            seed: 0,
            margin_floor: real(1e-7),
            exploratory: false,
            sampling: SamplingParams::default(),
            parallel: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero()) || !(self.tol < real(0.5)) {
            return Err(Error::Validation("solver tolerance must lie in (0, 0.5)".into()));
        }
        if !(self.margin_floor >= T::zero()) || !self.margin_floor.is_finite() {
            return Err(Error::Validation("margin floor must be nonnegative and finite".into()));
        }
        self.sampling.validate()
    }

    fn norm(&self, x: &VectorSequence<T>) -> Result<LuxemburgResult<T>> {
        luxemburg_norm(&self.family, &self.kernel, x, &self.vector_norm, self.tol, &self.policy)
    }
}

/// Which property a report is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremId {
    NormModular,
    Um,
    Opial,
    SigmaDc,
    OrderCont,
    Ak,
    Delta2Collapse,
}

impl TheoremId {
    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::NormModular => "norm_modular",
            TheoremId::Um => "um",
            TheoremId::Opial => "opial",
            TheoremId::SigmaDc => "sigma_dc",
            TheoremId::OrderCont => "order_cont",
            TheoremId::Ak => "ak",
            TheoremId::Delta2Collapse => "delta2_collapse",
        }
    }
}

/// The sample achieving the minimum margin, addressable for replay.
#[derive(Debug, Clone)]
pub struct WorstCase<T> {
    /// RNG stream that regenerates the sample under the report's seed.
    pub stream: u64,
    pub margin: T,
    pub description: String,
}

/// Outcome of one harness run.
#[derive(Debug, Clone)]
pub struct GeometryReport<T> {
    pub theorem_id: TheoremId,
    pub samples: usize,
    pub epsilon: Option<T>,
    /// For `um`/`opial` this is the estimated modulus (δ(ε) or μ); for the
    /// assertion-style harnesses it is a dimensionless worst slack,
    /// normalized so that a comfortable pass sits near 1.
    pub estimated_modulus: T,
    pub worst_case: Option<WorstCase<T>>,
    /// `estimated_modulus > margin_floor`.
    pub passed: bool,
    /// Not passed, but the margin is within `±margin_floor` of zero — inside
    /// accumulated solver tolerance, so no conclusion is drawn.
    pub inconclusive: bool,
    pub seed: u64,
    pub warnings: Vec<String>,
}

/// Margin of one evaluated sample.
struct SampleMargin<T> {
    stream: u64,
    margin: T,
    description: String,
}

/// Normalized slack `(band - deviation) / band`: 1 when the deviation is
/// zero, 0 at the tolerance boundary, negative on violation.
fn norm_slack<T: Real>(deviation: T, band: T) -> T {
    (band - deviation) / band
}

/// Runs `eval` over streams `1..=samples` (optionally in parallel), takes the
/// margin minimum, and re-evaluates the worst stream to certify that the
/// margin reproduces within 1e-10.
fn run_streams<T, F>(parallel: bool, samples: usize, eval: F) -> Result<(Vec<SampleMargin<T>>, WorstCase<T>)>
where
    T: Real,
    F: Fn(u64) -> Result<SampleMargin<T>> + Sync,
{
    if samples == 0 {
        return Err(Error::Validation("need at least one sample".into()));
    }
    let streams: Vec<u64> = (1..=samples as u64).collect();
    let margins: Vec<SampleMargin<T>> = if parallel {
        streams.par_iter().map(|&s| eval(s)).collect::<Result<_>>()?
    } else {
        streams.iter().map(|&s| eval(s)).collect::<Result<_>>()?
    };
    let worst = margins
        .iter()
        .min_by(|a, b| a.margin.partial_cmp(&b.margin).expect("margins are ordered"))
        .expect("at least one sample");
    let replay = eval(worst.stream)?;
    if (replay.margin - worst.margin).abs() > real(1e-10) {
        return Err(Error::Postcondition(format!(
            "worst-case margin failed to reproduce: {} vs {}",
            widen(worst.margin),
            widen(replay.margin)
        )));
    }
    let wc = WorstCase {
        stream: worst.stream,
        margin: worst.margin,
        description: worst.description.clone(),
    };
    Ok((margins, wc))
}

fn finish_report<T: Real>(
    theorem_id: TheoremId,
    cfg: &SpaceConfig<T>,
    samples: usize,
    epsilon: Option<T>,
    worst: WorstCase<T>,
    warnings: Vec<String>,
) -> GeometryReport<T> {
    let modulus = worst.margin;
    let passed = modulus > cfg.margin_floor;
    let inconclusive = !passed && modulus >= -cfg.margin_floor;
    GeometryReport {
        theorem_id,
        samples,
        epsilon,
        estimated_modulus: modulus,
        worst_case: Some(worst),
        passed,
        inconclusive,
        seed: cfg.seed,
        warnings,
    }
}

/// Draws a nonzero random sequence (redraws the all-zero event away).
fn draw_nonzero<T: Real>(
    rng: &mut rand_chacha::ChaCha8Rng,
    cfg: &SpaceConfig<T>,
    nonneg: bool,
) -> VectorSequence<T> {
    let s = &cfg.sampling;
    let dim = cfg.vector_norm.dim();
    for _ in 0..64 {
        let x = if nonneg {
            random_nonneg_sequence(rng, dim, s.max_support, s.max_index, s.amplitude)
        } else {
            random_vector_sequence(rng, dim, s.max_support, s.max_index, s.amplitude)
        };
        if !x.is_zero() {
            return x;
        }
    }
    unreachable!("uniform draws cannot be identically zero 64 times");
}

/// Normalizes `x` to unit norm; `None` when the norm is not certified finite
/// positive (the caller reports the sample as inconclusive).
fn normalized<T: Real>(
    cfg: &SpaceConfig<T>,
    x: &VectorSequence<T>,
) -> Result<Option<(VectorSequence<T>, LuxemburgResult<T>)>> {
    let nx = cfg.norm(x)?;
    if !nx.certified || !nx.norm.is_finite() || !(nx.norm > T::zero()) {
        return Ok(None);
    }
    Ok(Some((x.scale(T::one() / nx.norm), nx)))
}

/// Runs the family doubling falsifier with a generous constant and converts
/// a failure into a warning string.
fn delta2_preflight<T: Real>(family: &MusielakFamily<T>) -> Result<Option<String>> {
    let grid = default_grid(real::<T>(2.0))?;
    let w = check_delta2_family(family, real(16.0), T::one(), real(1e-6), 64, &grid)?;
    Ok(if w.passed() {
        None
    } else {
        Some(format!("family failed the doubling falsifier: {}", w.detail))
    })
}

fn star_preflight<T: Real>(family: &MusielakFamily<T>) -> Result<Option<String>> {
    let grid = default_grid(real::<T>(2.0))?;
    let (_, w) = check_star_condition(family, real(0.25), 64, &grid)?;
    Ok(if w.passed() {
        None
    } else {
        Some(format!("family failed the outward-scaling falsifier: {}", w.detail))
    })
}

/// Checks that unit spheres of the norm and the modular agree: for random
/// `x` normalized to `‖x‖ = 1`, the modular at scale 1 lies in
/// `[1 − band, 1 + band]` with `band = 10·tol + tail_tol`, and the modular
/// of `x/2^j` is strictly decreasing along `j = 0..=10`.
pub fn check_norm_modular<T: Real>(
    cfg: &SpaceConfig<T>,
    samples: usize,
    tol: T,
) -> Result<GeometryReport<T>> {
    cfg.validate()?;
    if !(tol > T::zero()) || !(tol < real(0.5)) {
        return Err(Error::Validation("tolerance must lie in (0, 0.5)".into()));
    }
    let mut warnings = Vec::new();
    if let Some(w) = delta2_preflight(&cfg.family)? {
        warnings.push(format!("{w}; the shrinking-ladder direction may be slow"));
    }
    let band = real::<T>(10.0) * tol + cfg.policy.tail_tol;

    let eval = |stream: u64| -> Result<SampleMargin<T>> {
        let mut rng = seeded_rng(cfg.seed, stream);
        let x = draw_nonzero(&mut rng, cfg, false);
        let Some((xhat, nx)) = normalized(cfg, &x)? else {
            return Ok(SampleMargin {
                stream,
                margin: T::zero(),
                description: "norm not certified; sample inconclusive".into(),
            });
        };
        let m1 = modular(&cfg.family, &cfg.kernel, &xhat, &cfg.vector_norm, T::one(), &cfg.policy)?;
        let margin_sphere = norm_slack((m1.value - T::one()).abs(), band);

        let mut ladder_ok = true;
        let mut prev = m1.value;
        for j in 1..=10usize {
            let sigma = real::<T>(f64::powi(2.0, j as i32));
            let mj =
                modular(&cfg.family, &cfg.kernel, &xhat, &cfg.vector_norm, sigma, &cfg.policy)?;
            if !(mj.value < prev) {
                ladder_ok = false;
            }
            prev = mj.value;
        }
        let margin = if ladder_ok { margin_sphere } else { margin_sphere.min(-T::one()) };
        Ok(SampleMargin {
            stream,
            margin,
            description: format!(
                "support {} norm {} modular-at-1 {}{}",
                x.support_len(),
                widen(nx.norm),
                widen(m1.value),
                if ladder_ok { "" } else { "; shrinking ladder not strictly decreasing" }
            ),
        })
    };

    let (_, worst) = run_streams(cfg.parallel, samples, eval)?;
    Ok(finish_report(TheoremId::NormModular, cfg, samples, None, worst, warnings))
}

/// Uniform-monotonicity probe on the nonnegative cone: for `x ≥ 0` with
/// `‖x‖ = 1` and `y ≥ 0` with `‖y‖ = ε`, measures `δ = min ‖x + y‖ − 1`.
/// The modeled theorem assumes the coordinate space is an AL-space, so the
/// vector norm must be ℓ1 (exploratory mode downgrades this to a warning).
pub fn check_uniform_monotonicity<T: Real>(
    cfg: &SpaceConfig<T>,
    epsilon: T,
    samples: usize,
) -> Result<GeometryReport<T>> {
    cfg.validate()?;
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::Validation("epsilon must be positive and finite".into()));
    }
    let mut warnings = Vec::new();
    if !cfg.vector_norm.is_l1() {
        let msg = "hypothesis violated: the coordinate norm is not l1".to_string();
        if cfg.exploratory {
            warnings.push(msg);
        } else {
            return Err(Error::Precondition(msg));
        }
    }
    if let Some(w) = delta2_preflight(&cfg.family)? {
        warnings.push(w);
    }
    if let Some(w) = star_preflight(&cfg.family)? {
        warnings.push(w);
    }

    let eval = |stream: u64| -> Result<SampleMargin<T>> {
        let mut rng = seeded_rng(cfg.seed, stream);
        let x = draw_nonzero(&mut rng, cfg, true);
        let y = draw_nonzero(&mut rng, cfg, true);
        let Some((xhat, _)) = normalized(cfg, &x)? else {
            return Ok(SampleMargin {
                stream,
                margin: T::zero(),
                description: "x-norm not certified; sample inconclusive".into(),
            });
        };
        let Some((yunit, _)) = normalized(cfg, &y)? else {
            return Ok(SampleMargin {
                stream,
                margin: T::zero(),
                description: "y-norm not certified; sample inconclusive".into(),
            });
        };
        let yeps = yunit.scale(epsilon);
        let nsum = cfg.norm(&xhat.add(&yeps)?)?;
        let margin = nsum.norm - T::one();
        Ok(SampleMargin {
            stream,
            margin,
            description: format!(
                "supports {}/{} combined norm {}",
                x.support_len(),
                y.support_len(),
                widen(nsum.norm)
            ),
        })
    };

    let (_, worst) = run_streams(cfg.parallel, samples, eval)?;
    Ok(finish_report(TheoremId::Um, cfg, samples, Some(epsilon), worst, warnings))
}

/// Uniform-Opial surrogate: replaces weakly null sequences with normalized
/// single-index blocks supported strictly past `fixed_x`'s support (so they
/// are exactly coordinatewise null), and measures
/// `μ = min over shifts of ‖block + fixed_x‖ − 1`.
///
/// Requires a triangular kernel and `‖fixed_x‖ ≥ ε`. The reported μ is a
/// surrogate estimate, not a proof of the Opial modulus.
pub fn check_uniform_opial<T: Real>(
    cfg: &SpaceConfig<T>,
    epsilon: T,
    shifts: usize,
    fixed_x: &VectorSequence<T>,
) -> Result<GeometryReport<T>> {
    cfg.validate()?;
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::Validation("epsilon must be positive and finite".into()));
    }
    if shifts == 0 {
        return Err(Error::Validation("need at least one shift".into()));
    }
    if fixed_x.dim() != cfg.vector_norm.dim() {
        return Err(Error::Validation("fixed element dimension does not match the norm".into()));
    }
    let mut warnings = Vec::new();
    if !cfg.kernel.is_triangle(64)? {
        let msg = "hypothesis violated: the kernel is not triangular".to_string();
        if cfg.exploratory {
            warnings.push(msg);
        } else {
            return Err(Error::Precondition(msg));
        }
    }
    if let Some(w) = delta2_preflight(&cfg.family)? {
        warnings.push(w);
    }
    if let Some(w) = star_preflight(&cfg.family)? {
        warnings.push(w);
    }
    let nfx = cfg.norm(fixed_x)?;
    // The norm solver answers within relative `tol`; elements normalized to
    // exactly epsilon must not trip the precondition by a rounding hair.
    let floor = epsilon * (T::one() - real::<T>(4.0) * cfg.tol);
    if !(nfx.norm >= floor) || !nfx.certified {
        return Err(Error::Precondition(format!(
            "fixed element needs certified norm at least epsilon, got {}",
            widen(nfx.norm)
        )));
    }
    let base = fixed_x
        .entries()
        .last()
        .map(|(k, _)| *k)
        .expect("norm >= epsilon > 0 implies nonempty support");
    let dim = cfg.vector_norm.dim();

    // Streams enumerate the shift l; the construction is fully deterministic.
    let eval = |stream: u64| -> Result<SampleMargin<T>> {
        let l = stream as usize;
        let idx = base + l;
        let mut unit = vec![T::zero(); dim];
        unit[0] = T::one();
        let block = VectorSequence::new(dim, vec![(idx, unit)])?;
        debug_assert!(block.entries().iter().all(|(k, _)| *k > base));
        let Some((bhat, _)) = normalized(cfg, &block)? else {
            return Ok(SampleMargin {
                stream,
                margin: T::zero(),
                description: format!("block at index {idx} has no certified norm; inconclusive"),
            });
        };
        let nsum = cfg.norm(&bhat.add(fixed_x)?)?;
        let margin = nsum.norm - T::one();
        Ok(SampleMargin {
            stream,
            margin,
            description: format!("block index {idx} combined norm {}", widen(nsum.norm)),
        })
    };

    let (_, worst) = run_streams(cfg.parallel, shifts, eval)?;
    Ok(finish_report(TheoremId::Opial, cfg, shifts, Some(epsilon), worst, warnings))
}

/// σ-Dedekind-completeness probe: samples monotone nonnegative chains
/// `x^{(1)} ≤ … ≤ x^{(L)} ≤ y`, forms the coordinatewise supremum, and checks
/// that it is the least upper bound the lattice norm respects:
/// dominated by `y`, dominating every chain element, with
/// `‖sup‖ ≤ ‖y‖ + band`.
pub fn check_sigma_dc<T: Real>(
    cfg: &SpaceConfig<T>,
    samples: usize,
    chain_length: usize,
) -> Result<GeometryReport<T>> {
    cfg.validate()?;
    if chain_length == 0 {
        return Err(Error::Validation("chains need at least one element".into()));
    }

    let eval = |stream: u64| -> Result<SampleMargin<T>> {
        let mut rng = seeded_rng(cfg.seed, stream);
        let y = draw_nonzero(&mut rng, cfg, true);
        // Per-coordinate shrink rates make the chain genuinely multi-shaped.
        let rates: Vec<(usize, Vec<T>)> = y
            .entries()
            .iter()
            .map(|(k, v)| {
                (*k, v.iter().map(|_| crate::sampling::uniform_in(&mut rng, 0.0, 1.0)).collect())
            })
            .collect();
        let element = |i: usize| -> Result<VectorSequence<T>> {
            let damp = real::<T>(f64::powi(0.5, i as i32));
            let entries = y
                .entries()
                .iter()
                .zip(rates.iter())
                .map(|((k, v), (_, r))| {
                    (*k, v.iter().zip(r.iter()).map(|(&c, &rc)| c * (T::one() - rc * damp)).collect())
                })
                .collect();
            VectorSequence::new(y.dim(), entries)
        };
        let mut chain = Vec::with_capacity(chain_length);
        for i in 0..chain_length {
            chain.push(element(i)?);
        }
        let mut supremum = chain[0].clone();
        for link in &chain[1..] {
            supremum = supremum.sup(link)?;
        }
        let mut order_ok = supremum.dominated_by(&y)?;
        for w in chain.windows(2) {
            order_ok &= w[0].dominated_by(&w[1])?;
        }
        for link in &chain {
            order_ok &= link.dominated_by(&supremum)?;
        }
        let ny = cfg.norm(&y)?.norm;
        let nsup = cfg.norm(&supremum)?.norm;
        let band = real::<T>(4.0) * cfg.tol * (T::one() + ny);
        let norm_margin = norm_slack((nsup - ny).max(T::zero()), band);
        let margin = if order_ok { norm_margin } else { norm_margin.min(-T::one()) };
        Ok(SampleMargin {
            stream,
            margin,
            description: format!(
                "chain length {chain_length}, ‖y‖ {} ‖sup‖ {}{}",
                widen(ny),
                widen(nsup),
                if order_ok { "" } else { "; lattice order violated" }
            ),
        })
    };

    let (_, worst) = run_streams(cfg.parallel, samples, eval)?;
    Ok(finish_report(TheoremId::SigmaDc, cfg, samples, None, worst, Vec::new()))
}

/// Order-continuity probe on a concrete element: three dominated
/// decreasing-to-zero ladders (left-zeroing by support index, halving, and a
/// mixed zero-then-halve ladder) must have nonincreasing norms vanishing at
/// the end. Requires a triangular kernel.
pub fn check_order_continuity<T: Real>(
    cfg: &SpaceConfig<T>,
    x: &VectorSequence<T>,
    ladder: usize,
) -> Result<GeometryReport<T>> {
    cfg.validate()?;
    if x.is_zero() {
        return Err(Error::Validation("the probe element must be nonzero".into()));
    }
    if x.dim() != cfg.vector_norm.dim() {
        return Err(Error::Validation("element dimension does not match the norm".into()));
    }
    if ladder == 0 {
        return Err(Error::Validation("the ladder needs at least one rung".into()));
    }
    let mut warnings = Vec::new();
    if !cfg.kernel.is_triangle(64)? {
        let msg = "hypothesis violated: the kernel is not triangular".to_string();
        if cfg.exploratory {
            warnings.push(msg);
        } else {
            return Err(Error::Precondition(msg));
        }
    }
    let n0 = cfg.norm(x)?.norm;
    let rel_band = real::<T>(4.0) * cfg.tol;

    // Streams: 1 = left-zeroing ladder, 2 = halving ladder, 3 = mixed.
    let eval = |stream: u64| -> Result<SampleMargin<T>> {
        match stream {
            1 => {
                let mut margin = T::one();
                let mut prev = n0;
                for (k, _) in x.entries() {
                    let tail = x.tail_section(*k);
                    let n = cfg.norm(&tail)?.norm;
                    let band = rel_band * (T::one() + prev);
                    margin = margin.min(norm_slack((n - prev).max(T::zero()), band));
                    prev = n;
                }
                if prev != T::zero() {
                    margin = margin.min(-T::one());
                }
                Ok(SampleMargin {
                    stream,
                    margin,
                    description: format!("left-zeroing ladder, final norm {}", widen(prev)),
                })
            }
            2 => {
                let mut margin = T::one();
                for m in 1..=ladder {
                    let scale = real::<T>(f64::powi(0.5, m as i32));
                    let n = cfg.norm(&x.scale(scale))?.norm;
                    let expected = n0 * scale;
                    let band = rel_band * expected + real(1e-300);
                    margin = margin.min(norm_slack((n - expected).abs(), band));
                }
                Ok(SampleMargin {
                    stream,
                    margin,
                    description: "halving ladder tracks homogeneity".into(),
                })
            }
            3 => {
                let mut margin = T::one();
                let mut z = x.clone();
                let mut prev = n0;
                while !z.is_zero() {
                    let mid = z.entries()[z.support_len() / 2].0;
                    z = z.tail_section(mid).scale(real(0.5));
                    let n = cfg.norm(&z)?.norm;
                    let band = rel_band * (T::one() + prev);
                    margin = margin.min(norm_slack((n - prev).max(T::zero()), band));
                    prev = n;
                }
                if prev != T::zero() {
                    margin = margin.min(-T::one());
                }
                Ok(SampleMargin {
                    stream,
                    margin,
                    description: format!("mixed ladder, final norm {}", widen(prev)),
                })
            }
            _ => unreachable!("three ladders"),
        }
    };

    let (_, worst) = run_streams(cfg.parallel, 3, eval)?;
    Ok(finish_report(TheoremId::OrderCont, cfg, 3, None, worst, warnings))
}

/// Vanishing-tail (AK) probe: for random `x` the residual norms
/// `‖x − x·1_{[1,m]}‖` are nonincreasing in `m` and exactly zero once `m`
/// reaches the last support index.
pub fn check_ak<T: Real>(cfg: &SpaceConfig<T>, samples: usize) -> Result<GeometryReport<T>> {
    cfg.validate()?;

    let eval = |stream: u64| -> Result<SampleMargin<T>> {
        let mut rng = seeded_rng(cfg.seed, stream);
        let x = draw_nonzero(&mut rng, cfg, false);
        let last = x.entries().last().expect("nonzero").0;
        let mut margin = T::one();
        let mut prev = T::infinity();
        let mut final_norm = T::nan();
        // Checkpoints: every support index, plus 0 and one past the end.
        let mut cuts: Vec<usize> = vec![0];
        cuts.extend(x.entries().iter().map(|(k, _)| *k));
        cuts.push(last + 5);
        for m in cuts {
            let resid = x.sub(&x.section(m))?;
            let n = cfg.norm(&resid)?.norm;
            if prev.is_finite() {
                let band = real::<T>(4.0) * cfg.tol * (T::one() + prev);
                margin = margin.min(norm_slack((n - prev).max(T::zero()), band));
            }
            prev = n;
            if m >= last {
                final_norm = n;
                if n != T::zero() {
                    margin = margin.min(-T::one());
                }
            }
        }
        Ok(SampleMargin {
            stream,
            margin,
            description: format!(
                "support {} last index {last} final residual {}",
                x.support_len(),
                widen(final_norm)
            ),
        })
    };

    let (_, worst) = run_streams(cfg.parallel, samples, eval)?;
    Ok(finish_report(TheoremId::Ak, cfg, samples, None, worst, Vec::new()))
}

/// Collapse probe: under a family passing the doubling falsifier, every
/// sampled element with a certified finite modular at some grid scale must
/// have a certified finite modular at *every* grid scale. Samples whose grid
/// evaluation is not fully certified are excluded (reported, not failed).
pub fn check_delta2_collapse<T: Real>(
    cfg: &SpaceConfig<T>,
    samples: usize,
    sigma_grid: &[T],
) -> Result<GeometryReport<T>> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    if let Some(w) = delta2_preflight(&cfg.family)? {
        if cfg.exploratory {
            warnings.push(w);
        } else {
            return Err(Error::Precondition(w));
        }
    }

    let eval = |stream: u64| -> Result<SampleMargin<T>> {
        let mut rng = seeded_rng(cfg.seed, stream);
        let x = draw_nonzero(&mut rng, cfg, false);
        let rep = membership_diagnostic(
            &cfg.family,
            &cfg.kernel,
            &x,
            &cfg.vector_norm,
            sigma_grid,
            &cfg.policy,
        )?;
        let uncertified = rep.per_sigma.iter().any(|(_, mv)| !mv.certified);
        let margin = if uncertified {
            T::zero()
        } else if rep.l_space_witness.is_some() && !rep.h_space_on_grid {
            -T::one()
        } else {
            T::one()
        };
        Ok(SampleMargin {
            stream,
            margin,
            description: if uncertified {
                "grid evaluation not fully certified; excluded".into()
            } else {
                format!(
                    "l-witness {:?}, finite on grid: {}",
                    rep.l_space_witness.map(widen),
                    rep.h_space_on_grid
                )
            },
        })
    };

    let (_, worst) = run_streams(cfg.parallel, samples, eval)?;
    Ok(finish_report(TheoremId::Delta2Collapse, cfg, samples, None, worst, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::{ExponentSeq, OrliczFunction};

    fn cfg_identity_p2(dim: usize) -> SpaceConfig<f64> {
        SpaceConfig::new(
            MusielakFamily::constant(OrliczFunction::power(2.0).unwrap()),
            MatrixKernel::identity(),
            VectorNorm::lp(dim, 2.0).unwrap(),
        )
    }

    fn cfg_cesaro_p2_l1() -> SpaceConfig<f64> {
        SpaceConfig::new(
            MusielakFamily::constant(OrliczFunction::power(2.0).unwrap()),
            MatrixKernel::cesaro1(),
            VectorNorm::lp(1, 1.0).unwrap(),
        )
    }

    #[test]
    fn norm_modular_unit_sphere_identity() {
        let mut cfg = cfg_identity_p2(1);
        cfg.seed = 5;
        let rep = check_norm_modular(&cfg, 40, 1e-9).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert_eq!(rep.theorem_id.as_str(), "norm_modular");
        // (3,4)/5 under p=2 has modular exactly 1.
        let x = VectorSequence::scalar(vec![(1, 0.6), (2, 0.8)]).unwrap();
        let m = modular(&cfg.family, &cfg.kernel, &x, &cfg.vector_norm, 1.0, &cfg.policy).unwrap();
        assert!((m.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn norm_modular_cesaro_power_log() {
        let mut cfg = SpaceConfig::new(
            MusielakFamily::power_log_seq(ExponentSeq::Const(2.0)).unwrap(),
            MatrixKernel::cesaro1(),
            VectorNorm::lp(1, 1.0).unwrap(),
        );
        cfg.seed = 6;
        let rep = check_norm_modular(&cfg, 25, 1e-9).unwrap();
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn um_margin_closed_form_on_dim1_identity() {
        // x = e₁, y = ε e₂ under the scalar identity/p=2 space:
        // ‖x+y‖ = sqrt(1+ε²). The sampled minimum can only be smaller, but
        // the deterministic closed form validates the margin arithmetic.
        let cfg = cfg_identity_p2(1);
        let x = VectorSequence::scalar(vec![(1, 1.0)]).unwrap();
        let y = VectorSequence::scalar(vec![(2, 0.5)]).unwrap();
        let n = luxemburg_norm(&cfg.family, &cfg.kernel, &x.add(&y).unwrap(), &cfg.vector_norm, 1e-10, &cfg.policy)
            .unwrap();
        assert!((n.norm - (1.25f64).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn um_passes_on_cesaro_l1() {
        let mut cfg = cfg_cesaro_p2_l1();
        cfg.seed = 7;
        let rep = check_uniform_monotonicity(&cfg, 0.5, 30).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.estimated_modulus > 0.0);
        // Nesting: a larger epsilon cannot give a smaller modulus on the
        // same seeds.
        let rep_big = check_uniform_monotonicity(&cfg, 1.0, 30).unwrap();
        assert!(rep_big.estimated_modulus >= rep.estimated_modulus - 1e-12);
    }

    #[test]
    fn um_requires_l1_unless_exploratory() {
        let mut cfg = cfg_identity_p2(2); // ℓ2 coordinate norm
        assert!(check_uniform_monotonicity(&cfg, 0.5, 3).is_err());
        cfg.exploratory = true;
        let rep = check_uniform_monotonicity(&cfg, 0.5, 3).unwrap();
        assert!(rep.warnings.iter().any(|w| w.contains("hypothesis violated")));
    }

    #[test]
    fn opial_identity_closed_form() {
        let cfg = cfg_identity_p2(1);
        let e1 = VectorSequence::scalar(vec![(1, 1.0)]).unwrap();
        let rep = check_uniform_opial(&cfg, 1.0, 6, &e1).unwrap();
        assert!(rep.passed);
        assert!(
            (rep.estimated_modulus - (2.0f64.sqrt() - 1.0)).abs() < 1e-6,
            "mu = {}",
            rep.estimated_modulus
        );
    }

    #[test]
    fn opial_mu_nonincreasing_in_epsilon_on_cesaro() {
        let mut cfg = SpaceConfig::new(
            MusielakFamily::constant(OrliczFunction::power(2.0).unwrap()),
            MatrixKernel::cesaro1(),
            VectorNorm::lp(1, 2.0).unwrap(),
        );
        cfg.tol = 1e-10;
        let e1 = VectorSequence::scalar(vec![(1, 1.0)]).unwrap();
        let mut last = f64::INFINITY;
        for eps in [1.0, 0.5, 0.25] {
            // Scale the fixed element to norm exactly eps.
            let n1 = luxemburg_norm(&cfg.family, &cfg.kernel, &e1, &cfg.vector_norm, 1e-10, &cfg.policy)
                .unwrap()
                .norm;
            let fixed = e1.scale(eps / n1);
            let rep = check_uniform_opial(&cfg, eps, 5, &fixed).unwrap();
            assert!(rep.passed, "eps {eps}: {rep:?}");
            assert!(rep.estimated_modulus <= last + 1e-9);
            last = rep.estimated_modulus;
        }
    }

    #[test]
    fn opial_rejects_non_triangle_and_small_x() {
        let cfg = SpaceConfig::new(
            MusielakFamily::constant(OrliczFunction::power(2.0).unwrap()),
            MatrixKernel::hilbert(),
            VectorNorm::lp(1, 2.0).unwrap(),
        );
        let e1 = VectorSequence::scalar(vec![(1, 1.0)]).unwrap();
        assert!(check_uniform_opial(&cfg, 0.5, 3, &e1).is_err());
        let cfg2 = cfg_identity_p2(1);
        let tiny = VectorSequence::scalar(vec![(1, 1e-4)]).unwrap();
        assert!(check_uniform_opial(&cfg2, 0.5, 3, &tiny).is_err());
    }

    #[test]
    fn sigma_dc_holds_on_cesaro() {
        let mut cfg = cfg_cesaro_p2_l1();
        cfg.seed = 11;
        let rep = check_sigma_dc(&cfg, 25, 6).unwrap();
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn order_continuity_ladders_vanish() {
        let mut cfg = cfg_cesaro_p2_l1();
        cfg.tol = 1e-10;
        let x = VectorSequence::scalar(vec![(1, 0.3), (3, -1.2), (7, 0.9), (20, 0.05)]).unwrap();
        let rep = check_order_continuity(&cfg, &x, 12).unwrap();
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn ak_residuals_vanish_exactly() {
        let mut cfg = cfg_identity_p2(2);
        cfg.seed = 13;
        let rep = check_ak(&cfg, 30).unwrap();
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn delta2_collapse_on_grid() {
        let mut cfg = cfg_cesaro_p2_l1();
        cfg.seed = 17;
        let rep = check_delta2_collapse(&cfg, 25, &[0.1, 1.0, 10.0]).unwrap();
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn parallel_matches_sequential_bitwise() {
        let mut cfg = cfg_cesaro_p2_l1();
        cfg.seed = 23;
        let seq = check_uniform_monotonicity(&cfg, 0.5, 16).unwrap();
        cfg.parallel = true;
        let par = check_uniform_monotonicity(&cfg, 0.5, 16).unwrap();
        assert_eq!(seq.estimated_modulus.to_bits(), par.estimated_modulus.to_bits());
        assert_eq!(
            seq.worst_case.as_ref().unwrap().stream,
            par.worst_case.as_ref().unwrap().stream
        );
    }

    #[test]
    fn reports_are_reproducible() {
        let mut cfg = cfg_identity_p2(1);
        cfg.seed = 29;
        let a = check_norm_modular(&cfg, 10, 1e-9).unwrap();
        let b = check_norm_modular(&cfg, 10, 1e-9).unwrap();
        assert_eq!(a.estimated_modulus.to_bits(), b.estimated_modulus.to_bits());
    }

    #[test]
    fn validation_errors() {
        let cfg = cfg_identity_p2(1);
        assert!(check_norm_modular(&cfg, 0, 1e-9).is_err());
        assert!(check_uniform_monotonicity(&cfg_cesaro_p2_l1(), 0.0, 5).is_err());
        let zero = VectorSequence::<f64>::zero(1);
        assert!(check_order_continuity(&cfg, &zero, 5).is_err());
    }
}
