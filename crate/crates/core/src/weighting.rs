//! Lift weightings `ω` and their lifted maps `Γ_ω(p) = ω(p)·(1, p)`.
//!
//! Two stable families are provided, both built on the ratio
//! `λ(p) = (death − birth) / (2·||(1, p)||₂)`:
//!
//! * power-lambda: `ω(p) = λ(p)^α`
//! * arctan: `ω(p) = (2/π)·arctan(λ(p)^α / K^α)`
//!
//! with `α >= 1` and `K > 0`. Stability constants are not available in closed
//! form in general and are estimated by [`estimate_constants`].

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::DiagramPoint;

/// Default `K` for the arctan family.
pub const DEFAULT_K: f64 = 0.1;

/// Cross-validation grid for `K`.
pub const K_GRID: [f64; 9] = [1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.2, 0.3, 0.4, 0.5];

/// Multiplicative margin applied to sampled stability constants.
pub const SAFETY_MARGIN: f64 = 1.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightingError {
    #[error("alpha must be a finite value >= 1, got {0}")]
    Alpha(f64),
    #[error("k must be a finite positive value, got {0}")]
    K(f64),
    #[error("degenerate sampling box {0:?}")]
    DegenerateBox(SampleBox),
    #[error("at least {min} samples are required, got {got}")]
    TooFewSamples { min: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightingKind {
    PowerLambda,
    Arctan,
}

/// A stable lift weighting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weighting {
    kind: WeightingKind,
    alpha: f64,
    k: f64,
}

impl Weighting {
    pub fn power_lambda(alpha: f64) -> Result<Self, WeightingError> {
        check_alpha(alpha)?;
        Ok(Self { kind: WeightingKind::PowerLambda, alpha, k: 1.0 })
    }

    pub fn arctan(alpha: f64, k: f64) -> Result<Self, WeightingError> {
        check_alpha(alpha)?;
        if !(k.is_finite() && k > 0.0) {
            return Err(WeightingError::K(k));
        }
        Ok(Self { kind: WeightingKind::Arctan, alpha, k })
    }

    pub fn kind(&self) -> WeightingKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `K`; only meaningful for the arctan family.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// `ω` at raw coordinates.
    pub fn omega_at(&self, birth: f64, death: f64) -> f64 {
        let l = lambda_at(birth, death);
        let la = if self.alpha == 1.0 { l } else { l.powf(self.alpha) };
        match self.kind {
            WeightingKind::PowerLambda => la,
            WeightingKind::Arctan => {
                let ka = if self.alpha == 1.0 { self.k } else { self.k.powf(self.alpha) };
                (2.0 / PI) * (la / ka).atan()
            }
        }
    }
}

impl Default for Weighting {
    fn default() -> Self {
        Self { kind: WeightingKind::Arctan, alpha: 1.0, k: DEFAULT_K }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            WeightingKind::PowerLambda => write!(f, "lambda(alpha={})", self.alpha),
            WeightingKind::Arctan => write!(f, "arctan(alpha={}, k={})", self.alpha, self.k),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<(), WeightingError> {
    if alpha.is_finite() && alpha >= 1.0 {
        Ok(())
    } else {
        Err(WeightingError::Alpha(alpha))
    }
}

/// Any rule assigning a scalar weight to points, lifted as `ω(p)·(1, p)`.
///
/// Implemented by the stable [`Weighting`] families and by
/// [`UnstableWeight`], which only exists to reproduce the instability of
/// lifetime weighting.
pub trait LiftWeight: Sync {
    fn weight_at(&self, birth: f64, death: f64) -> f64;

    fn weight(&self, p: &DiagramPoint) -> f64 {
        self.weight_at(p.birth(), p.death())
    }

    fn gamma_at(&self, birth: f64, death: f64) -> [f64; 3] {
        let w = self.weight_at(birth, death);
        [w, w * birth, w * death]
    }

    /// Exact value of `sup ||Γ(p)|| / ||p − Δ||_∞`, when known.
    fn exact_norm_constant(&self) -> Option<f64> {
        None
    }

    /// Short parameter description recorded as provenance.
    fn describe(&self) -> String;
}

impl LiftWeight for Weighting {
    fn weight_at(&self, birth: f64, death: f64) -> f64 {
        self.omega_at(birth, death)
    }

    fn exact_norm_constant(&self) -> Option<f64> {
        // ||Γ(p)||₂ = λ(p)·||(1, p)||₂ = (death − birth) / 2
        (self.kind == WeightingKind::PowerLambda && self.alpha == 1.0).then_some(1.0)
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

/// The lifetime weighting `ω(p) = death − birth`. Not stable.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UnstableWeight;

impl LiftWeight for UnstableWeight {
    fn weight_at(&self, birth: f64, death: f64) -> f64 {
        death - birth
    }

    fn describe(&self) -> String {
        "lifetime".into()
    }
}

pub fn unstable_weight(p: &DiagramPoint) -> f64 {
    UnstableWeight.weight(p)
}

fn lambda_at(birth: f64, death: f64) -> f64 {
    (death - birth) / (2.0 * (1.0 + birth * birth + death * death).sqrt())
}

/// `λ(p) = (death − birth) / (2·sqrt(1 + birth² + death²))`.
pub fn lambda_ratio(p: &DiagramPoint) -> f64 {
    lambda_at(p.birth(), p.death())
}

pub fn omega(w: &Weighting, p: &DiagramPoint) -> f64 {
    w.omega_at(p.birth(), p.death())
}

/// `Γ_ω(p) = ω(p)·(1, birth, death)`.
pub fn gamma<W: LiftWeight + ?Sized>(w: &W, p: &DiagramPoint) -> [f64; 3] {
    w.gamma_at(p.birth(), p.death())
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Axis-aligned rectangle in birth–death coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub birth_min: f64,
    pub birth_max: f64,
    pub death_min: f64,
    pub death_max: f64,
}

impl SampleBox {
    /// The square `[lo, hi]²`.
    pub fn square(lo: f64, hi: f64) -> Self {
        Self { birth_min: lo, birth_max: hi, death_min: lo, death_max: hi }
    }

    fn validate(&self) -> Result<(), WeightingError> {
        let finite = [self.birth_min, self.birth_max, self.death_min, self.death_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite
            || self.birth_min >= self.birth_max
            || self.death_min >= self.death_max
            || self.birth_min >= self.death_max
        {
            return Err(WeightingError::DegenerateBox(*self));
        }
        Ok(())
    }

    /// Uniform sample from the part of the box strictly above the diagonal.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> (f64, f64) {
        loop {
            let b = rng.gen_range(self.birth_min..self.birth_max);
            let d = rng.gen_range(self.death_min..self.death_max);
            if b < d {
                return (b, d);
            }
        }
    }
}

/// Estimated stability constants of a weighting over a box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityConstants {
    /// Lipschitz constant of `Γ_ω` with respect to the Euclidean norm.
    pub lipschitz_c: f64,
    /// Bound on `||Γ_ω(p)||₂ / ||p − Δ||_∞`.
    pub norm_c_prime: f64,
    pub domain_box: SampleBox,
}

impl StabilityConstants {
    /// `max{C, C'}`.
    pub fn max_constant(&self) -> f64 {
        self.lipschitz_c.max(self.norm_c_prime)
    }
}

pub const MIN_SAMPLES: usize = 1000;

/// Estimates the stability constants of `w` on `domain`.
///
/// The Lipschitz constant is the largest of the secant ratios between
/// consecutive samples and the spectral norms of central-difference
/// Jacobians at every sample, inflated by [`SAFETY_MARGIN`]. The norm ratio
/// is the largest sampled `||Γ(p)|| / ||p − Δ||_∞`, inflated the same way
/// except for power-lambda with `α = 1`, where it is exactly 1.
pub fn estimate_constants<W: LiftWeight + ?Sized>(
    w: &W,
    domain: SampleBox,
    samples: usize,
    seed: u64,
) -> Result<StabilityConstants, WeightingError> {
    domain.validate()?;
    if samples < MIN_SAMPLES {
        return Err(WeightingError::TooFewSamples { min: MIN_SAMPLES, got: samples });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = (domain.birth_max - domain.birth_min).max(domain.death_max - domain.death_min);
    let h = 1e-6 * scale.max(1.0);

    let mut lip: f64 = 0.0;
    let mut ratio: f64 = 0.0;
    let mut prev: Option<(f64, f64, [f64; 3])> = None;
    for _ in 0..samples {
        let (b, d) = domain.sample(&mut rng);
        let g = w.gamma_at(b, d);
        ratio = ratio.max(norm3(g) / ((d - b) / 2.0));

        if let Some((pb, pd, pg)) = prev {
            let dist = ((b - pb).powi(2) + (d - pd).powi(2)).sqrt();
            if dist > 0.0 {
                let diff = [g[0] - pg[0], g[1] - pg[1], g[2] - pg[2]];
                lip = lip.max(norm3(diff) / dist);
            }
        }
        prev = Some((b, d, g));

        if d - b > 4.0 * h {
            let col = |db: f64, dd: f64| {
                let gp = w.gamma_at(b + db, d + dd);
                let gm = w.gamma_at(b - db, d - dd);
                [
                    (gp[0] - gm[0]) / (2.0 * h),
                    (gp[1] - gm[1]) / (2.0 * h),
                    (gp[2] - gm[2]) / (2.0 * h),
                ]
            };
            lip = lip.max(spectral_norm_3x2(col(h, 0.0), col(0.0, h)));
        }
    }

    let norm_c_prime = w.exact_norm_constant().unwrap_or(ratio * SAFETY_MARGIN);
    Ok(StabilityConstants { lipschitz_c: lip * SAFETY_MARGIN, norm_c_prime, domain_box: domain })
}

/// Largest singular value of the 3×2 matrix with columns `a`, `b`.
fn spectral_norm_3x2(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dot = |x: [f64; 3], y: [f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    let (p, q, r) = (dot(a, a), dot(a, b), dot(b, b));
    let tr = p + r;
    let disc = ((p - r) * (p - r) + 4.0 * q * q).sqrt();
    ((tr + disc) / 2.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(b: f64, d: f64) -> DiagramPoint {
        DiagramPoint::new(b, d, 1).unwrap()
    }

    #[test]
    fn lambda_values() {
        assert!((lambda_ratio(&pt(0.0, 2.0)) - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(lambda_at(3.0, 3.0), 0.0);
        let mut last = 0.0;
        for m in [1.0, 10.0, 100.0, 1e4, 1e8] {
            let l = lambda_ratio(&pt(0.0, m));
            assert!(l > last && l < 1.0);
            last = l;
        }
        assert!((last - 0.5).abs() < 1e-6);
    }

    #[test]
    fn omega_values() {
        let p = pt(0.0, 2.0);
        let w = Weighting::power_lambda(1.0).unwrap();
        assert!((omega(&w, &p) - 0.447_213_595_499_958).abs() < 1e-12);
        let w = Weighting::arctan(1.0, lambda_ratio(&p)).unwrap();
        assert!((omega(&w, &p) - 0.5).abs() < 1e-15);
        for w in [Weighting::power_lambda(2.0).unwrap(), Weighting::default()] {
            assert!(w.omega_at(1.0, 1.0 + 1e-12) < 1e-10);
        }
    }

    #[test]
    fn gamma_of_reference_point() {
        let w = Weighting::power_lambda(1.0).unwrap();
        let g = gamma(&w, &pt(0.0, 2.0));
        let s = 1.0 / 5f64.sqrt();
        assert!((g[0] - s).abs() < 1e-15);
        assert_eq!(g[1], 0.0);
        assert!((g[2] - 2.0 * s).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Weighting::power_lambda(0.5), Err(WeightingError::Alpha(0.5)));
        assert_eq!(Weighting::arctan(1.0, 0.0), Err(WeightingError::K(0.0)));
        assert!(Weighting::arctan(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn unstable_weight_values() {
        assert_eq!(unstable_weight(&pt(0.0, 2.0)), 2.0);
        for n in [1.0f64, 2.0, 4.0] {
            let p = pt(n * n, n * n + 1.0 / n);
            assert!((unstable_weight(&p) - 1.0 / n).abs() < 1e-12);
        }
        assert!(UnstableWeight.weight_at(1.0, 1.0 + 1e-12) < 1e-11);
    }

    #[test]
    fn estimate_rejects_degenerate_input() {
        let w = Weighting::default();
        assert!(matches!(
            estimate_constants(&w, SampleBox::square(1.0, 1.0), 1000, 0),
            Err(WeightingError::DegenerateBox(_))
        ));
        let below = SampleBox { birth_min: 5.0, birth_max: 6.0, death_min: 0.0, death_max: 1.0 };
        assert!(estimate_constants(&w, below, 1000, 0).is_err());
        assert!(matches!(
            estimate_constants(&w, SampleBox::square(0.0, 1.0), 10, 0),
            Err(WeightingError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn power_lambda_unit_norm_constant() {
        let w = Weighting::power_lambda(1.0).unwrap();
        let c = estimate_constants(&w, SampleBox::square(0.0, 10.0), 5000, 1).unwrap();
        assert_eq!(c.norm_c_prime, 1.0);
        assert!(c.lipschitz_c > 0.0 && c.lipschitz_c < 2.0);
    }

    #[test]
    fn arctan_norm_constant_below_one() {
        let w = Weighting::arctan(1.0, 1.0).unwrap();
        let c = estimate_constants(&w, SampleBox::square(0.0, 10.0), 5000, 2).unwrap();
        assert!(c.norm_c_prime <= 1.0);
        assert!(c.norm_c_prime <= SAFETY_MARGIN * 2.0 / PI + 1e-12);
    }

    #[test]
    fn unstable_norm_constant_diverges() {
        let mut last = 0.0;
        for side in [1.0, 10.0, 100.0, 1000.0] {
            let c = estimate_constants(&UnstableWeight, SampleBox::square(0.0, side), 2000, 3).unwrap();
            assert!(c.norm_c_prime > last);
            last = c.norm_c_prime;
        }
        assert!(last > 1000.0);
    }
}
