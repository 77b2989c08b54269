use std::f64::consts::PI;

use serde::Serialize;

use super::BaselineError;
use crate::diagram::PersistenceDiagram;

/// Rectangle in birth–persistence coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImageBounds {
    pub birth_min: f64,
    pub birth_max: f64,
    pub pers_min: f64,
    pub pers_max: f64,
}

impl ImageBounds {
    /// Smallest rectangle containing every point of every diagram, in
    /// `(birth, death − birth)` coordinates. `None` when all diagrams are
    /// empty.
    pub fn enclosing<'a, I>(diagrams: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a PersistenceDiagram>,
    {
        let mut b: Option<Self> = None;
        for d in diagrams {
            for p in d.points() {
                let (x, y) = (p.birth(), p.lifetime());
                b = Some(match b {
                    None => Self { birth_min: x, birth_max: x, pers_min: y, pers_max: y },
                    Some(r) => Self {
                        birth_min: r.birth_min.min(x),
                        birth_max: r.birth_max.max(x),
                        pers_min: r.pers_min.min(y),
                        pers_max: r.pers_max.max(y),
                    },
                });
            }
        }
        b
    }

    /// Widens every zero-length side to `±pad` around its value.
    pub fn padded(self, pad: f64) -> Self {
        let mut b = self;
        if b.birth_min >= b.birth_max {
            b.birth_min -= pad;
            b.birth_max += pad;
        }
        if b.pers_min >= b.pers_max {
            b.pers_min = (b.pers_min - pad).max(0.0);
            b.pers_max += pad;
        }
        b
    }

    fn validate(&self) -> Result<(), BaselineError> {
        let ok = [self.birth_min, self.birth_max, self.pers_min, self.pers_max]
            .iter()
            .all(|v| v.is_finite())
            && self.birth_min < self.birth_max
            && self.pers_min < self.pers_max;
        if ok {
            Ok(())
        } else {
            Err(BaselineError::DegenerateBounds)
        }
    }
}

/// Persistence image parameters.
///
/// `resolution` is `[birth pixels, persistence pixels]`; `weight_exponent`
/// is the power `n` of the persistence weight `pers^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImageParams {
    pub resolution: [usize; 2],
    pub sigma: f64,
    pub weight_exponent: u32,
    pub bounds: ImageBounds,
}

impl ImageParams {
    pub fn new(resolution: [usize; 2], sigma: f64, weight_exponent: u32, bounds: ImageBounds) -> Result<Self, BaselineError> {
        let p = Self { resolution, sigma, weight_exponent, bounds };
        p.validate()?;
        Ok(p)
    }

    /// Square pixels of side `pixel_size` covering `bounds` (extended up to a
    /// whole number of pixels), with `σ = pixel_size / m`.
    pub fn from_pixel_size(bounds: ImageBounds, pixel_size: f64, m: f64, weight_exponent: u32) -> Result<Self, BaselineError> {
        if !(pixel_size.is_finite() && pixel_size > 0.0 && m.is_finite() && m > 0.0) {
            return Err(BaselineError::Parameter("pixel size and m must be positive".into()));
        }
        bounds.validate()?;
        let nb = ((bounds.birth_max - bounds.birth_min) / pixel_size).ceil().max(1.0) as usize;
        let np = ((bounds.pers_max - bounds.pers_min) / pixel_size).ceil().max(1.0) as usize;
        let bounds = ImageBounds {
            birth_max: bounds.birth_min + nb as f64 * pixel_size,
            pers_max: bounds.pers_min + np as f64 * pixel_size,
            ..bounds
        };
        Self::new([nb, np], pixel_size / m, weight_exponent, bounds)
    }

    fn validate(&self) -> Result<(), BaselineError> {
        if self.resolution[0] == 0 || self.resolution[1] == 0 {
            return Err(BaselineError::Parameter("resolution must be at least 1".into()));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(BaselineError::Parameter(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.weight_exponent == 0 {
            return Err(BaselineError::Parameter("weight exponent must be positive".into()));
        }
        self.bounds.validate()
    }

    pub fn pixel_width(&self) -> f64 {
        (self.bounds.birth_max - self.bounds.birth_min) / self.resolution[0] as f64
    }

    pub fn pixel_height(&self) -> f64 {
        (self.bounds.pers_max - self.bounds.pers_min) / self.resolution[1] as f64
    }

    /// Center of pixel `(row, col)` = `(birth index, persistence index)`.
    pub fn pixel_center(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.bounds.birth_min + (row as f64 + 0.5) * self.pixel_width(),
            self.bounds.pers_min + (col as f64 + 0.5) * self.pixel_height(),
        )
    }
}

/// Pixel size from the enclosing rectangle of `diagrams`: the shortest side
/// divided by `n_prime`, rounded to the nearest power of ten.
pub fn pixel_size_heuristic<'a, I>(diagrams: I, n_prime: usize) -> Result<f64, BaselineError>
where
    I: IntoIterator<Item = &'a PersistenceDiagram>,
{
    let b = ImageBounds::enclosing(diagrams).ok_or(BaselineError::DegenerateBounds)?;
    pixel_size_for(&b, n_prime)
}

/// [`pixel_size_heuristic`] for a given rectangle.
pub fn pixel_size_for(b: &ImageBounds, n_prime: usize) -> Result<f64, BaselineError> {
    let side = (b.birth_max - b.birth_min).min(b.pers_max - b.pers_min);
    if !(side > 0.0) || n_prime == 0 {
        return Err(BaselineError::DegenerateBounds);
    }
    Ok(10f64.powf((side / n_prime as f64).log10().round()))
}

/// Row-major persistence image: entry `row * resolution[1] + col` is the
/// pixel at birth index `row` and persistence index `col`.
///
/// Each point contributes `c_p·pers^n·g_σ(center − (birth, pers))·area`,
/// a midpoint approximation of the Gaussian mass over the pixel.
pub fn persistence_image(d: &PersistenceDiagram, params: &ImageParams) -> Vec<f64> {
    let [nb, np] = params.resolution;
    let (w, h) = (params.pixel_width(), params.pixel_height());
    let s2 = params.sigma * params.sigma;
    let norm = w * h / (2.0 * PI * s2);
    let mut out = vec![0.0; nb * np];
    for p in d.points() {
        let (x, y) = (p.birth(), p.lifetime());
        let weight = p.multiplicity() as f64 * y.powi(params.weight_exponent as i32) * norm;
        for row in 0..nb {
            let (cx, _) = params.pixel_center(row, 0);
            let gx = (-(cx - x) * (cx - x) / (2.0 * s2)).exp();
            if gx == 0.0 {
                continue;
            }
            for col in 0..np {
                let (_, cy) = params.pixel_center(row, col);
                out[row * np + col] += weight * gx * (-(cy - y) * (cy - y) / (2.0 * s2)).exp();
            }
        }
    }
    out
}
