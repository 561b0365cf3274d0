//! Illumination-invariant grayscale intrinsic images.
//!
//! Pixels are mapped to geometric-mean log-chromaticities, projected onto the
//! plane orthogonal to `(1,1,1)`, and then collapsed onto the 1-D direction
//! whose marginal histogram has minimum Shannon entropy. Exponentiating that
//! projection removes both shading and illumination color.

use crate::error::{Error, Result};
use crate::imgcore::{clamped_rgb, FloatRgbImage, PlaneImage, RgbImage};

/// Per-pixel log-chromaticity vectors `rho = log(R_k / geometric mean)`.
/// Every vector sums to zero, i.e. lies in the plane orthogonal to `(1,1,1)`.
#[derive(Debug, Clone)]
pub struct LogChroma {
    width: u32,
    height: u32,
    rho: Vec<[f64; 3]>,
}

impl LogChroma {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn rho(&self) -> &[[f64; 3]] {
        &self.rho
    }
}

/// Per-pixel 2-vectors `chi = U rho`, the in-plane coordinates of the
/// log-chromaticities.
#[derive(Debug, Clone)]
pub struct ChiPlane {
    width: u32,
    height: u32,
    chi: Vec<[f64; 2]>,
}

impl ChiPlane {
    /// Wraps raw chromaticity points (row-major, finite).
    pub fn new(width: u32, height: u32, chi: Vec<[f64; 2]>) -> Result<Self> {
        if width == 0 || height == 0 || chi.len() != width as usize * height as usize {
            return Err(Error::InvalidArgument(
                "chi length does not match dimensions".into(),
            ));
        }
        if chi.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
            return Err(Error::InvalidArgument("chi contains non-finite points".into()));
        }
        Ok(Self { width, height, chi })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.chi
    }

    pub fn len(&self) -> usize {
        self.chi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chi.is_empty()
    }
}

/// Entropy of the projected marginal at each integer angle, 1..=180 degrees.
#[derive(Debug, Clone)]
pub struct EntropyScan {
    /// Scanned angles in degrees, always `1..=180`.
    pub angles: Vec<u32>,
    /// One entropy per angle; `+inf` marks a degenerate projection.
    pub entropies: Vec<f64>,
    /// Angle attaining the minimum entropy (smallest angle on ties).
    pub best_angle: u32,
}

impl EntropyScan {
    pub fn best_entropy(&self) -> f64 {
        self.entropies[self.best_angle as usize - 1]
    }
}

/// The canonical 2x3 projector onto the plane orthogonal to `(1,1,1)`:
/// rows `(1/sqrt(2), -1/sqrt(2), 0)` and `(1/sqrt(6), 1/sqrt(6), -2/sqrt(6))`.
pub fn projector_u() -> [[f64; 3]; 2] {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let s6 = 1.0 / 6.0_f64.sqrt();
    [[s2, -s2, 0.0], [s6, s6, -2.0 * s6]]
}

fn rho_from_linear(r: f64, g: f64, b: f64) -> [f64; 3] {
    let (lr, lg, lb) = (r.ln(), g.ln(), b.ln());
    let mean = (lr + lg + lb) / 3.0;
    [lr - mean, lg - mean, lb - mean]
}

/// Log-chromaticity of an 8-bit image, with the black-pixel clamp applied
/// before the logarithm.
pub fn log_chromaticity(img: &RgbImage) -> LogChroma {
    let rho = img
        .pixels()
        .map(|px| {
            let [r, g, b] = clamped_rgb(px);
            rho_from_linear(r, g, b)
        })
        .collect();
    LogChroma {
        width: img.width(),
        height: img.height(),
        rho,
    }
}

/// Log-chromaticity of an unquantized positive raster (no clamp needed).
pub fn log_chromaticity_float(raster: &FloatRgbImage) -> LogChroma {
    let rho = raster
        .pixels()
        .map(|[r, g, b]| rho_from_linear(r, g, b))
        .collect();
    LogChroma {
        width: raster.width(),
        height: raster.height(),
        rho,
    }
}

/// Projects the 3-D log-chromaticities onto in-plane 2-D coordinates. The
/// projection is an isometry on the rho plane, so norms are preserved.
pub fn project_chi(lc: &LogChroma) -> ChiPlane {
    let u = projector_u();
    let chi = lc
        .rho
        .iter()
        .map(|r| {
            [
                u[0][0] * r[0] + u[0][1] * r[1] + u[0][2] * r[2],
                u[1][0] * r[0] + u[1][1] * r[1] + u[1][2] * r[2],
            ]
        })
        .collect();
    ChiPlane {
        width: lc.width,
        height: lc.height,
        chi,
    }
}

/// Order statistic `k` of `scratch` under total ordering (partially sorts in
/// place).
fn nth(scratch: &mut [f64], k: usize) -> f64 {
    let (_, v, _) = scratch.select_nth_unstable_by(k, f64::total_cmp);
    *v
}

/// 5th and 95th percentiles by linear interpolation on the sorted sample.
fn percentile_bounds(scratch: &mut [f64]) -> (f64, f64) {
    let n = scratch.len();
    let mut pick = |q: f64| {
        let pos = q * (n - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(n - 1);
        let v_lo = nth(scratch, lo);
        let v_hi = if hi == lo { v_lo } else { nth(scratch, hi) };
        v_lo + (v_hi - v_lo) * (pos - lo as f64)
    };
    (pick(0.05), pick(0.95))
}

/// Shannon entropy (natural log) of the Scott-rule histogram over the middle
/// 90% of `proj`. Returns `+inf` when the trimmed sample has fewer than two
/// distinct values.
fn entropy_of_projection(proj: &[f64], scratch: &mut Vec<f64>, counts: &mut Vec<u32>) -> f64 {
    scratch.clear();
    scratch.extend_from_slice(proj);
    let (p5, p95) = percentile_bounds(scratch);

    let mut n = 0usize;
    let mut sum = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in proj {
        if x >= p5 && x <= p95 {
            n += 1;
            sum += x;
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    if n < 2 || !(hi > lo) {
        return f64::INFINITY;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let mut ss = 0.0;
    for &x in proj {
        if x >= p5 && x <= p95 {
            let d = x - mean;
            ss += d * d;
        }
    }
    let std = (ss / nf).sqrt();
    let scott = 3.5 * std / nf.cbrt();
    if !(scott > 0.0 && scott.is_finite()) {
        return f64::INFINITY;
    }
    // Scott's rule fixes the bin count; the grid then spans [lo, hi] with
    // equal widths so the histogram is symmetric under reflection.
    let bins = (((hi - lo) / scott).ceil() as usize).max(1);
    let width = (hi - lo) / bins as f64;
    counts.clear();
    counts.resize(bins, 0);
    for &x in proj {
        if x >= p5 && x <= p95 {
            let idx = (((x - lo) / width).floor() as usize).min(bins - 1);
            counts[idx] += 1;
        }
    }
    let mut acc = 0.0;
    for &c in counts.iter() {
        if c > 0 {
            let p = f64::from(c) / nf;
            acc += p * p.ln();
        }
    }
    -acc
}

fn projection_direction(omega_deg: u32) -> (f64, f64) {
    let rad = f64::from(omega_deg).to_radians();
    (rad.cos(), rad.sin())
}

/// Entropy of the marginal obtained by projecting chi onto the direction at
/// `omega_deg` degrees (valid angles are 1..=180). Degenerate marginals
/// yield `+inf`.
pub fn entropy_for_angle(chi: &ChiPlane, omega_deg: u32) -> f64 {
    let (c, s) = projection_direction(omega_deg);
    let proj: Vec<f64> = chi.chi.iter().map(|p| p[0] * c + p[1] * s).collect();
    entropy_of_projection(&proj, &mut Vec::new(), &mut Vec::new())
}

/// Scans all 180 integer angles and picks the entropy minimizer, breaking
/// ties toward the smallest angle. Errors when every angle is degenerate.
pub fn min_entropy_angle(chi: &ChiPlane) -> Result<EntropyScan> {
    let mut proj = vec![0.0; chi.len()];
    let mut scratch = Vec::with_capacity(chi.len());
    let mut counts = Vec::new();
    let mut entropies = Vec::with_capacity(180);
    for omega in 1..=180u32 {
        let (c, s) = projection_direction(omega);
        for (o, p) in proj.iter_mut().zip(&chi.chi) {
            *o = p[0] * c + p[1] * s;
        }
        entropies.push(entropy_of_projection(&proj, &mut scratch, &mut counts));
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, &eta) in entropies.iter().enumerate() {
        if eta.is_finite() && best.map_or(true, |(_, b)| eta < b) {
            best = Some((i, eta));
        }
    }
    match best {
        Some((i, _)) => Ok(EntropyScan {
            angles: (1..=180).collect(),
            entropies,
            best_angle: i as u32 + 1,
        }),
        None => Err(Error::DegenerateChromaticity),
    }
}

/// Projects chi at `angle_deg`, exponentiates relative to the maximum (so the
/// exponential cannot overflow), and min-max normalizes to `[0, 1]`.
pub fn project_intrinsic(chi: &ChiPlane, angle_deg: u32) -> PlaneImage {
    let (c, s) = projection_direction(angle_deg);
    let proj: Vec<f64> = chi.chi.iter().map(|p| p[0] * c + p[1] * s).collect();
    let max = proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let data: Vec<f64> = proj.iter().map(|&x| (x - max).exp()).collect();
    PlaneImage::new(chi.width, chi.height, data)
        .expect("projection is finite")
        .normalized()
}

/// Full pipeline on an 8-bit image: log-chromaticity, plane projection,
/// entropy scan, and exponentiated projection at the best angle.
pub fn intrinsic_image(img: &RgbImage) -> Result<PlaneImage> {
    let chi = project_chi(&log_chromaticity(img));
    let scan = min_entropy_angle(&chi)?;
    Ok(project_intrinsic(&chi, scan.best_angle))
}

/// Full pipeline on an unquantized positive raster.
pub fn intrinsic_image_float(raster: &FloatRgbImage) -> Result<PlaneImage> {
    let chi = project_chi(&log_chromaticity_float(raster));
    let scan = min_entropy_angle(&chi)?;
    Ok(project_intrinsic(&chi, scan.best_angle))
}
