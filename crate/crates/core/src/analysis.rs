//! Stability, controllability and observability of tensor systems.
//!
//! Every test runs on the unfolded matrices `M_A = unfold(A, r)` etc.,
//! so a tensor system and its order-1 twin always produce the same report.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::system::{TimeKind, TssrSystem};

/// Numerical tolerances used by the analysis routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisConfig {
    /// Singular values at or below `σ_max · q · rank_tolerance` count as zero.
    pub rank_tolerance: f64,
    /// Width of the band around the stability boundary reported as marginal.
    pub stability_margin: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            rank_tolerance: 1e-12,
            stability_margin: 1e-9,
        }
    }
}

/// Unfolded coupling matrices of a time-invariant system.
#[derive(Clone, Debug, PartialEq)]
pub struct UnfoldedSystem {
    pub time_kind: TimeKind,
    pub a: DMatrix<f64>,
    pub b: Option<DMatrix<f64>>,
    pub c: Option<DMatrix<f64>>,
    pub d: Option<DMatrix<f64>>,
}

pub fn unfold_system(system: &TssrSystem) -> Result<UnfoldedSystem> {
    if !system.is_time_invariant() {
        return Err(Error::Unsupported("analysis requires time-invariant system".into()));
    }
    let r = system.state_shape().len();
    let s = system.shapes().output.as_ref().map_or(0, |y| y.len());
    let co = &system.segments()[0].coefficients;
    Ok(UnfoldedSystem {
        time_kind: system.time_kind(),
        a: co.a.unfold_matrix(r)?,
        b: co.b.as_ref().map(|b| b.unfold_matrix(r)).transpose()?,
        c: co.c.as_ref().map(|c| c.unfold_matrix(s)).transpose()?,
        d: co.d.as_ref().map(|d| d.unfold_matrix(s)).transpose()?,
    })
}

fn require_square(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::shape(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Value("matrix has non-finite entries".into()));
    }
    Ok(())
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    require_square(m)?;
    Ok(m.complex_eigenvalues().iter().copied().collect())
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(m: &DMatrix<f64>) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Largest eigenvalue real part.
pub fn max_real_part(m: &DMatrix<f64>) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Marginal,
    Unstable,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Marginal => "marginal",
            Stability::Unstable => "unstable",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityReport {
    pub verdict: Stability,
    pub spectral_radius: f64,
    /// Only computed for continuous-time systems.
    pub max_real_part: Option<f64>,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.verdict == Stability::Stable
    }
}

/// Classifies `M_A` against the discrete (|λ| < 1) or continuous (Re λ < 0)
/// criterion. Values within `stability_margin` of the boundary are marginal.
pub fn stability_of(m_a: &DMatrix<f64>, kind: TimeKind, config: &AnalysisConfig) -> Result<StabilityReport> {
    let eps = config.stability_margin;
    let spectral_radius = spectral_radius(m_a)?;
    let classify = |value: f64, boundary: f64| {
        if value < boundary - eps {
            Stability::Stable
        } else if value <= boundary + eps {
            Stability::Marginal
        } else {
            Stability::Unstable
        }
    };
    Ok(match kind {
        TimeKind::Discrete => StabilityReport {
            verdict: classify(spectral_radius, 1.0),
            spectral_radius,
            max_real_part: None,
        },
        TimeKind::Continuous => {
            let re = max_real_part(m_a)?;
            StabilityReport {
                verdict: classify(re, 0.0),
                spectral_radius,
                max_real_part: Some(re),
            }
        }
    })
}

pub fn check_stability(system: &TssrSystem, config: &AnalysisConfig) -> Result<StabilityReport> {
    let flat = unfold_system(system)?;
    stability_of(&flat.a, flat.time_kind, config)
}

/// Rank from singular values with threshold `σ_max · dim · tolerance`.
pub fn numerical_rank(m: &DMatrix<f64>, dim: usize, tolerance: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let sigma_max = sv.iter().copied().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return 0;
    }
    let threshold = sigma_max * dim as f64 * tolerance;
    sv.iter().filter(|&&s| s > threshold).count()
}

/// `[B | A·B | … | A^{blocks-1}·B]`.
pub fn controllability_matrix(a: &DMatrix<f64>, b: &DMatrix<f64>, blocks: usize) -> Result<DMatrix<f64>> {
    require_square(a)?;
    if b.nrows() != a.nrows() {
        return Err(Error::shape(format!("B has {} rows, A has {}", b.nrows(), a.nrows())));
    }
    let (q, p) = (a.nrows(), b.ncols());
    let mut k = DMatrix::<f64>::zeros(q, p * blocks);
    let mut block = b.clone();
    for i in 0..blocks {
        k.view_mut((0, i * p), (q, p)).copy_from(&block);
        block = a * &block;
    }
    Ok(k)
}

/// `[C; C·A; …; C·A^{blocks-1}]`.
pub fn observability_matrix(a: &DMatrix<f64>, c: &DMatrix<f64>, blocks: usize) -> Result<DMatrix<f64>> {
    require_square(a)?;
    if c.ncols() != a.nrows() {
        return Err(Error::shape(format!(
            "C has {} columns, A has {} rows",
            c.ncols(),
            a.nrows()
        )));
    }
    let (q, s) = (a.nrows(), c.nrows());
    let mut o = DMatrix::<f64>::zeros(s * blocks, q);
    let mut block = c.clone();
    for i in 0..blocks {
        o.view_mut((i * s, 0), (s, q)).copy_from(&block);
        block = &block * a;
    }
    Ok(o)
}

pub fn controllability_rank_of(a: &DMatrix<f64>, b: &DMatrix<f64>, config: &AnalysisConfig) -> Result<usize> {
    let q = a.nrows();
    Ok(numerical_rank(
        &controllability_matrix(a, b, q)?,
        q,
        config.rank_tolerance,
    ))
}

pub fn observability_rank_of(a: &DMatrix<f64>, c: &DMatrix<f64>, config: &AnalysisConfig) -> Result<usize> {
    let q = a.nrows();
    Ok(numerical_rank(
        &observability_matrix(a, c, q)?,
        q,
        config.rank_tolerance,
    ))
}

pub fn controllability_rank(system: &TssrSystem, config: &AnalysisConfig) -> Result<usize> {
    let flat = unfold_system(system)?;
    let b = flat
        .b
        .ok_or_else(|| Error::argument("controllability needs a system with input"))?;
    controllability_rank_of(&flat.a, &b, config)
}

pub fn observability_rank(system: &TssrSystem, config: &AnalysisConfig) -> Result<usize> {
    let flat = unfold_system(system)?;
    let c = flat
        .c
        .ok_or_else(|| Error::argument("observability needs an output coupling C"))?;
    observability_rank_of(&flat.a, &c, config)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisReport {
    pub time_kind: TimeKind,
    pub state_dim: usize,
    pub stability: StabilityReport,
    pub controllability_rank: Option<usize>,
    pub observability_rank: Option<usize>,
}

impl AnalysisReport {
    pub fn is_stable(&self) -> bool {
        self.stability.is_stable()
    }

    pub fn controllable(&self) -> Option<bool> {
        self.controllability_rank.map(|r| r == self.state_dim)
    }

    pub fn observable(&self) -> Option<bool> {
        self.observability_rank.map(|r| r == self.state_dim)
    }
}

/// Runs every applicable test; parts that need a missing `B` or `C` are
/// left absent.
pub fn analyze(system: &TssrSystem, config: &AnalysisConfig) -> Result<AnalysisReport> {
    let flat = unfold_system(system)?;
    analyze_unfolded(&flat, config)
}

pub fn analyze_unfolded(flat: &UnfoldedSystem, config: &AnalysisConfig) -> Result<AnalysisReport> {
    Ok(AnalysisReport {
        time_kind: flat.time_kind,
        state_dim: flat.a.nrows(),
        stability: stability_of(&flat.a, flat.time_kind, config)?,
        controllability_rank: flat
            .b
            .as_ref()
            .map(|b| controllability_rank_of(&flat.a, b, config))
            .transpose()?,
        observability_rank: flat
            .c
            .as_ref()
            .map(|c| observability_rank_of(&flat.a, c, config))
            .transpose()?,
    })
}
