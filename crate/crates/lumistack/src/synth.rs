//! Synthetic scene rendering for test oracles and fixture generation.
//!
//! Scenes follow a narrow-band imaging model: each channel response is
//!
//! ```text
//! R_k = sigma * L * k1 * lambda_k^-5 * exp(-k2 / (T * lambda_k)) * S(lambda_k) * q_k
//! ```
//!
//! with Lambertian shading `sigma`, light intensity `L`, blackbody color
//! temperature `T`, surface reflectance `S`, and sensor sensitivities `q_k`.
//! Skin surfaces replace `S` with a two-pigment absorption model, so their
//! optical densities span (at most) a plane.

use rand::Rng;

use crate::error::{Error, Result};
use crate::imgcore::{FloatRgbImage, RgbImage};

/// Second radiation constant in nm·K.
pub const K2_NM_KELVIN: f64 = 1.4388e7;

/// Default narrow-band sensor wavelengths in nm (blue, green, red).
pub const DEFAULT_WAVELENGTHS: [f64; 3] = [450.0, 550.0, 610.0];

/// Three delta-band camera sensors.
#[derive(Debug, Clone, PartialEq)]
pub struct Sensor {
    /// Center wavelengths in nm.
    pub wavelengths: [f64; 3],
    /// Sensitivities `q_k`, strictly positive.
    pub sensitivities: [f64; 3],
    pub k1: f64,
    pub k2: f64,
}

impl Default for Sensor {
    fn default() -> Self {
        Self {
            wavelengths: DEFAULT_WAVELENGTHS,
            sensitivities: [1.0; 3],
            k1: 1.0,
            k2: K2_NM_KELVIN,
        }
    }
}

impl Sensor {
    /// Sensor whose sensitivities cancel the blackbody term at `temperature`,
    /// i.e. a gray surface renders gray there. Keeps 8-bit quantization of
    /// renderings well conditioned across nearby temperatures.
    pub fn balanced_at(temperature: f64) -> Self {
        let mut s = Self::default();
        for k in 0..3 {
            let lam = s.wavelengths[k];
            s.sensitivities[k] = lam.powi(5) * (s.k2 / (temperature * lam)).exp();
        }
        s
    }

    /// Log-space lighting direction `e_k - mean(e)` with `e_k = -k2 / lambda_k`.
    /// Temperature changes move every log-chromaticity along this direction.
    pub fn log_direction(&self) -> [f64; 3] {
        let e = self.wavelengths.map(|lam| -self.k2 / lam);
        let mean = (e[0] + e[1] + e[2]) / 3.0;
        e.map(|v| v - mean)
    }

    /// Predicted log-chromaticity translation when the light temperature
    /// moves from `t_from` to `t_to`.
    pub fn chromaticity_shift(&self, t_from: f64, t_to: f64) -> [f64; 3] {
        let d = self.log_direction();
        let delta = 1.0 / t_to - 1.0 / t_from;
        d.map(|v| v * delta)
    }
}

/// Matte surface with reflectance sampled at the three sensor wavelengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    /// `S(lambda_k)` in `(0, 1]`.
    pub reflectance: [f64; 3],
}

/// A synthetic scene lit by one Planckian radiator.
#[derive(Debug, Clone)]
pub struct PlanckianScene {
    width: u32,
    height: u32,
    surfaces: Vec<Surface>,
    /// Per-pixel surface index, row-major.
    region: Vec<u16>,
    /// Per-pixel Lambertian shading, strictly positive.
    shading: Vec<f64>,
    pub light_intensity: f64,
    /// Color temperature in Kelvin.
    pub temperature: f64,
    pub sensor: Sensor,
}

impl PlanckianScene {
    pub fn new(
        width: u32,
        height: u32,
        surfaces: Vec<Surface>,
        region: Vec<u16>,
        shading: Vec<f64>,
        light_intensity: f64,
        temperature: f64,
        sensor: Sensor,
    ) -> Result<Self> {
        let n = width as usize * height as usize;
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument("zero scene dimension".into()));
        }
        if surfaces.is_empty() {
            return Err(Error::InvalidArgument("scene needs surfaces".into()));
        }
        if region.len() != n || shading.len() != n {
            return Err(Error::InvalidArgument(
                "region/shading length does not match scene dimensions".into(),
            ));
        }
        if region.iter().any(|&r| r as usize >= surfaces.len()) {
            return Err(Error::InvalidArgument("region index out of range".into()));
        }
        if shading.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return Err(Error::InvalidArgument(
                "shading must be strictly positive".into(),
            ));
        }
        if !(temperature > 0.0) || !(light_intensity > 0.0) {
            return Err(Error::InvalidArgument(
                "temperature and intensity must be positive".into(),
            ));
        }
        for s in &surfaces {
            if s.reflectance.iter().any(|&v| !(v > 0.0 && v <= 1.0)) {
                return Err(Error::InvalidArgument(
                    "reflectance samples must lie in (0, 1]".into(),
                ));
            }
        }
        if sensor.sensitivities.iter().any(|&q| !(q > 0.0))
            || sensor.wavelengths.iter().any(|&l| !(l > 0.0))
        {
            return Err(Error::InvalidArgument("invalid sensor".into()));
        }
        Ok(Self {
            width,
            height,
            surfaces,
            region,
            shading,
            light_intensity,
            temperature,
            sensor,
        })
    }

    /// Randomly parameterized scene: striped surfaces with distinct random
    /// reflectances and a smooth random shading field.
    pub fn random(
        width: u32,
        height: u32,
        n_surfaces: usize,
        temperature: f64,
        rng: &mut impl Rng,
    ) -> Self {
        let n_surfaces = n_surfaces.max(1);
        let surfaces = (0..n_surfaces)
            .map(|_| Surface {
                reflectance: [
                    rng.gen_range(0.15..1.0),
                    rng.gen_range(0.15..1.0),
                    rng.gen_range(0.15..1.0),
                ],
            })
            .collect();
        // Vertical stripes: every surface covers an equal share of columns.
        let region = (0..height)
            .flat_map(|_| (0..width))
            .map(|x| (x as usize * n_surfaces / width as usize) as u16)
            .collect();
        let shading = random_shading_field(width, height, rng);
        let sensor = Sensor::balanced_at(temperature);
        Self::new(
            width,
            height,
            surfaces,
            region,
            shading,
            rng.gen_range(0.5..2.0),
            temperature,
            sensor,
        )
        .expect("generated scene is valid")
    }

    /// Same scene rendered under a different light temperature.
    pub fn with_temperature(&self, temperature: f64) -> Self {
        let mut s = self.clone();
        s.temperature = temperature;
        s
    }

    /// Same scene with shading forced to 1 everywhere.
    pub fn with_flat_shading(&self) -> Self {
        let mut s = self.clone();
        s.shading = vec![1.0; s.shading.len()];
        s
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn shading(&self) -> &[f64] {
        &self.shading
    }
}

/// Smooth strictly positive field: unit base plus a low-frequency wave.
pub fn random_shading_field(width: u32, height: u32, rng: &mut impl Rng) -> Vec<f64> {
    let amp = rng.gen_range(0.1..0.45);
    let fx = rng.gen_range(0.5..2.0);
    let fy = rng.gen_range(0.5..2.0);
    let px = rng.gen_range(0.0..std::f64::consts::TAU);
    let py = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut field = Vec::with_capacity(width as usize * height as usize);
    for y in 0..height {
        for x in 0..width {
            let u = x as f64 / width as f64;
            let v = y as f64 / height as f64;
            let w = (std::f64::consts::TAU * fx * u + px).cos()
                * (std::f64::consts::TAU * fy * v + py).cos();
            field.push(1.0 + amp * w);
        }
    }
    field
}

/// Per-channel response factor excluding shading and reflectance:
/// `L * k1 * lambda^-5 * exp(-k2/(T lambda)) * q`.
fn channel_factors(sensor: &Sensor, light_intensity: f64, temperature: f64) -> [f64; 3] {
    let mut f = [0.0; 3];
    for k in 0..3 {
        let lam = sensor.wavelengths[k];
        f[k] = light_intensity
            * sensor.k1
            * lam.powi(-5)
            * (-sensor.k2 / (temperature * lam)).exp()
            * sensor.sensitivities[k];
    }
    f
}

/// Renders the scene to an unquantized positive raster.
pub fn render_planckian(scene: &PlanckianScene) -> FloatRgbImage {
    let factors = channel_factors(&scene.sensor, scene.light_intensity, scene.temperature);
    let mut data = Vec::with_capacity(scene.region.len() * 3);
    for (i, &surf) in scene.region.iter().enumerate() {
        let sigma = scene.shading[i];
        let refl = &scene.surfaces[surf as usize].reflectance;
        for k in 0..3 {
            data.push(sigma * factors[k] * refl[k]);
        }
    }
    FloatRgbImage::new(scene.width, scene.height, data).expect("rendering is positive")
}

/// Renders the scene and quantizes it, scaling the global maximum to 255.
pub fn render_planckian_8bit(scene: &PlanckianScene) -> RgbImage {
    render_planckian(scene).quantize_8bit()
}

/// Two-pigment skin reflectance model: per-pixel melanin and hemoglobin
/// densities with per-wavelength absorption cross-sections and photon path
/// lengths.
#[derive(Debug, Clone)]
pub struct SkinModel {
    width: u32,
    height: u32,
    melanin: Vec<f64>,
    hemoglobin: Vec<f64>,
    pub absorption_melanin: [f64; 3],
    pub absorption_hemoglobin: [f64; 3],
    pub path_melanin: [f64; 3],
    pub path_hemoglobin: [f64; 3],
}

impl SkinModel {
    pub fn new(
        width: u32,
        height: u32,
        melanin: Vec<f64>,
        hemoglobin: Vec<f64>,
        absorption_melanin: [f64; 3],
        absorption_hemoglobin: [f64; 3],
        path_melanin: [f64; 3],
        path_hemoglobin: [f64; 3],
    ) -> Result<Self> {
        let n = width as usize * height as usize;
        if melanin.len() != n || hemoglobin.len() != n {
            return Err(Error::InvalidArgument(
                "density field length does not match dimensions".into(),
            ));
        }
        let nonneg = |v: &[f64]| v.iter().all(|&x| x.is_finite() && x >= 0.0);
        if !nonneg(&melanin)
            || !nonneg(&hemoglobin)
            || !nonneg(&absorption_melanin)
            || !nonneg(&absorption_hemoglobin)
            || !nonneg(&path_melanin)
            || !nonneg(&path_hemoglobin)
        {
            return Err(Error::InvalidArgument(
                "skin model fields must be non-negative and finite".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            melanin,
            hemoglobin,
            absorption_melanin,
            absorption_hemoglobin,
            path_melanin,
            path_hemoglobin,
        })
    }

    /// Random lesion-like model: a high-melanin disk over a smooth
    /// low-density background.
    pub fn random(width: u32, height: u32, rng: &mut impl Rng) -> Self {
        let cx = width as f64 * rng.gen_range(0.35..0.65);
        let cy = height as f64 * rng.gen_range(0.35..0.65);
        let radius = width.min(height) as f64 * rng.gen_range(0.18..0.32);
        let bg = rng.gen_range(0.02..0.12);
        let lesion = rng.gen_range(0.6..1.4);
        let mut melanin = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
                melanin.push(if d <= radius { lesion } else { bg });
            }
        }
        let hb_base = rng.gen_range(0.1..0.35);
        let hb_amp = rng.gen_range(0.0..0.1);
        let mut hemoglobin = Vec::with_capacity(melanin.len());
        for y in 0..height {
            for x in 0..width {
                let u = x as f64 / width as f64 + y as f64 / height as f64;
                hemoglobin.push(hb_base + hb_amp * (std::f64::consts::TAU * u).sin().abs());
            }
        }
        // Melanin absorbs strongest at short wavelengths, hemoglobin peaks
        // in the green band.
        let absorption_melanin = [
            rng.gen_range(1.2..1.8),
            rng.gen_range(0.7..1.1),
            rng.gen_range(0.3..0.6),
        ];
        let absorption_hemoglobin = [
            rng.gen_range(0.5..0.9),
            rng.gen_range(0.9..1.4),
            rng.gen_range(0.2..0.5),
        ];
        let path_melanin = [
            rng.gen_range(0.4..1.2),
            rng.gen_range(0.4..1.2),
            rng.gen_range(0.4..1.2),
        ];
        let path_hemoglobin = [
            rng.gen_range(0.4..1.2),
            rng.gen_range(0.4..1.2),
            rng.gen_range(0.4..1.2),
        ];
        Self::new(
            width,
            height,
            melanin,
            hemoglobin,
            absorption_melanin,
            absorption_hemoglobin,
            path_melanin,
            path_hemoglobin,
        )
        .expect("generated model is valid")
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn melanin(&self) -> &[f64] {
        &self.melanin
    }

    pub fn melanin_mut(&mut self) -> &mut [f64] {
        &mut self.melanin
    }

    /// Spectral reflectance at one pixel:
    /// `exp(-rho_m a_m l_m - rho_h a_h l_h)` per channel.
    fn reflectance_at(&self, i: usize) -> [f64; 3] {
        let rm = self.melanin[i];
        let rh = self.hemoglobin[i];
        let mut s = [0.0; 3];
        for k in 0..3 {
            s[k] = (-rm * self.absorption_melanin[k] * self.path_melanin[k]
                - rh * self.absorption_hemoglobin[k] * self.path_hemoglobin[k])
                .exp();
        }
        s
    }
}

/// Renders skin reflectance under the scene's light and shading. The scene's
/// own surface list is ignored; its dimensions must match the model.
pub fn render_skin(model: &SkinModel, scene: &PlanckianScene) -> Result<FloatRgbImage> {
    if model.width != scene.width() || model.height != scene.height() {
        return Err(Error::DimensionMismatch {
            expected_width: model.width,
            expected_height: model.height,
            actual_width: scene.width(),
            actual_height: scene.height(),
        });
    }
    let factors = channel_factors(&scene.sensor, scene.light_intensity, scene.temperature);
    let n = model.width as usize * model.height as usize;
    let mut data = Vec::with_capacity(n * 3);
    for i in 0..n {
        let sigma = scene.shading()[i];
        let s = model.reflectance_at(i);
        for k in 0..3 {
            data.push(sigma * factors[k] * s[k]);
        }
    }
    FloatRgbImage::new(model.width, model.height, data)
}

/// [`render_skin`] followed by 8-bit quantization.
pub fn render_skin_8bit(model: &SkinModel, scene: &PlanckianScene) -> Result<RgbImage> {
    Ok(render_skin(model, scene)?.quantize_8bit())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn single_surface_flat_scene_renders_uniformly() {
        let scene = PlanckianScene::new(
            8,
            8,
            vec![Surface {
                reflectance: [0.4, 0.5, 0.6],
            }],
            vec![0; 64],
            vec![1.0; 64],
            1.0,
            4500.0,
            Sensor::default(),
        )
        .unwrap();
        let img = render_planckian(&scene);
        let first = img.get(0, 0);
        assert!(img.pixels().all(|px| px == first));
    }

    #[test]
    fn rendering_is_linear_in_light_intensity() {
        let mut scene = PlanckianScene::random(16, 16, 3, 5200.0, &mut rng(11));
        let base = render_planckian(&scene);
        scene.light_intensity *= 3.0;
        let scaled = render_planckian(&scene);
        for (a, b) in base.pixels().zip(scaled.pixels()) {
            for k in 0..3 {
                assert!((b[k] / a[k] - 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn renderings_are_strictly_positive() {
        let scene = PlanckianScene::random(16, 16, 4, 2500.0, &mut rng(7));
        assert!(render_planckian(&scene)
            .pixels()
            .all(|px| px.iter().all(|&v| v > 0.0)));
    }

    #[test]
    fn zero_pigment_skin_matches_unit_surface_planckian() {
        let mut r = rng(3);
        let scene = PlanckianScene::random(12, 10, 2, 4000.0, &mut r);
        let model = SkinModel::new(
            12,
            10,
            vec![0.0; 120],
            vec![0.0; 120],
            [1.0; 3],
            [1.0; 3],
            [1.0; 3],
            [1.0; 3],
        )
        .unwrap();
        let skin = render_skin(&model, &scene).unwrap();
        let unit_scene = PlanckianScene::new(
            12,
            10,
            vec![Surface {
                reflectance: [1.0; 3],
            }],
            vec![0; 120],
            scene.shading().to_vec(),
            scene.light_intensity,
            scene.temperature,
            scene.sensor.clone(),
        )
        .unwrap();
        assert_eq!(skin, render_planckian(&unit_scene));
    }

    #[test]
    fn more_melanin_darkens_every_channel() {
        let mut r = rng(5);
        let scene = PlanckianScene::random(6, 6, 1, 5000.0, &mut r).with_flat_shading();
        let model = SkinModel::random(6, 6, &mut r);
        let mut denser = model.clone();
        denser.melanin_mut()[10] += 0.5;
        let a = render_skin(&model, &scene).unwrap();
        let b = render_skin(&denser, &scene).unwrap();
        let (x, y) = (10 % 6, 10 / 6);
        let pa = a.get(x, y as u32);
        let pb = b.get(x, y as u32);
        for k in 0..3 {
            assert!(pb[k] < pa[k]);
        }
    }

    #[test]
    fn skin_render_rejects_dim_mismatch() {
        let mut r = rng(9);
        let scene = PlanckianScene::random(8, 8, 2, 4500.0, &mut r);
        let model = SkinModel::random(9, 8, &mut r);
        assert!(render_skin(&model, &scene).is_err());
    }
}
