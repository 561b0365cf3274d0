//! Image containers, color-space conversion, nearest-neighbor resizing, and
//! PNG/JPEG file I/O shared by every transform in the crate.
//!
//! All containers are immutable values: operations return new images, so
//! callers can share them across threads freely.

use std::path::Path;

use crate::error::{Error, Result};

/// 8-bit RGB raster, row-major, interleaved `R G B` triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl RgbImage {
    /// Wraps raw interleaved bytes. `data.len()` must be `width * height * 3`.
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        let expected = width as usize * height as usize * 3;
        if data.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "rgb data length {} does not match {}x{}x3",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image by evaluating `f` at every `(x, y)`.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Self {
        assert!(width >= 1 && height >= 1, "zero image dimension");
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    /// Constant-color image.
    pub fn filled(width: u32, height: u32, px: [u8; 3]) -> Self {
        Self::from_fn(width, height, |_, _| px)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Row-major pixel iterator.
    pub fn pixels(&self) -> impl Iterator<Item = [u8; 3]> + '_ {
        self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    /// Nearest-neighbor resize: each output pixel copies the source pixel at
    /// floor-scaled coordinates. Identity when dimensions already match.
    pub fn resize_nearest(&self, width: u32, height: u32) -> Result<Self> {
        check_dims(width, height)?;
        if width == self.width && height == self.height {
            return Ok(self.clone());
        }
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for y in 0..height {
            let sy = nearest_index(y, height, self.height);
            for x in 0..width {
                let sx = nearest_index(x, width, self.width);
                let i = (sy * self.width as usize + sx) * 3;
                data.extend_from_slice(&self.data[i..i + 3]);
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }
}

/// Single-channel floating-point raster, row-major. Transform outputs keep
/// values in `[0, 1]`; intermediate planes may hold any finite value.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneImage {
    width: u32,
    height: u32,
    data: Vec<f64>,
}

impl PlaneImage {
    /// Wraps raw samples. All values must be finite.
    pub fn new(width: u32, height: u32, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width as usize * height as usize {
            return Err(Error::InvalidArgument(format!(
                "plane data length {} does not match {}x{}",
                data.len(),
                width,
                height
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "plane contains non-finite samples".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> f64) -> Self {
        assert!(width >= 1 && height >= 1, "zero image dimension");
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn filled(width: u32, height: u32, v: f64) -> Self {
        Self::from_fn(width, height, |_, _| v)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.data {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    /// Min-max normalization to `[0, 1]`. A constant plane maps to all zeros.
    pub fn normalized(&self) -> Self {
        let (lo, hi) = self.min_max();
        let range = hi - lo;
        let data = if range > 0.0 {
            self.data.iter().map(|v| (v - lo) / range).collect()
        } else {
            vec![0.0; self.data.len()]
        };
        Self {
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// See [`RgbImage::resize_nearest`].
    pub fn resize_nearest(&self, width: u32, height: u32) -> Result<Self> {
        check_dims(width, height)?;
        if width == self.width && height == self.height {
            return Ok(self.clone());
        }
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            let sy = nearest_index(y, height, self.height);
            for x in 0..width {
                let sx = nearest_index(x, width, self.width);
                data.push(self.data[sy * self.width as usize + sx]);
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }
}

/// HSV raster with `H` in degrees `[0, 360)` and `S`, `V` in `[0, 1]`,
/// interleaved `H S V` triples.
#[derive(Debug, Clone, PartialEq)]
pub struct HsvImage {
    width: u32,
    height: u32,
    data: Vec<f64>,
}

impl HsvImage {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> [f64; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn pixels(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }

    /// The V channel as a standalone plane.
    pub fn value_plane(&self) -> PlaneImage {
        PlaneImage {
            width: self.width,
            height: self.height,
            data: self.data.chunks_exact(3).map(|c| c[2]).collect(),
        }
    }

    /// Same H and S with V replaced per pixel. `plane` values must lie in
    /// `[0, 1]` and dimensions must match.
    pub fn with_value_plane(&self, plane: &PlaneImage) -> Result<Self> {
        if plane.width != self.width || plane.height != self.height {
            return Err(Error::DimensionMismatch {
                expected_width: self.width,
                expected_height: self.height,
                actual_width: plane.width,
                actual_height: plane.height,
            });
        }
        if plane.data.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::InvalidArgument(
                "value plane outside [0, 1]".into(),
            ));
        }
        let mut data = self.data.clone();
        for (c, &v) in data.chunks_exact_mut(3).zip(&plane.data) {
            c[2] = v;
        }
        Ok(Self {
            width: self.width,
            height: self.height,
            data,
        })
    }
}

/// Real-valued RGB raster for the synthetic float pathway: strictly positive,
/// unquantized channel responses.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatRgbImage {
    width: u32,
    height: u32,
    data: Vec<f64>,
}

impl FloatRgbImage {
    /// Wraps raw interleaved samples; all must be finite and positive.
    pub fn new(width: u32, height: u32, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width as usize * height as usize * 3 {
            return Err(Error::InvalidArgument(format!(
                "raster data length {} does not match {}x{}x3",
                data.len(),
                width,
                height
            )));
        }
        if data.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
            return Err(Error::InvalidArgument(
                "float raster must be strictly positive and finite".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn get(&self, x: u32, y: u32) -> [f64; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn pixels(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }

    /// Multiplies every channel of pixel `i` by `field[i]` (a per-pixel
    /// positive scalar, e.g. a Lambertian shading field).
    pub fn scaled_by_field(&self, field: &[f64]) -> Result<Self> {
        if field.len() != self.pixel_count() {
            return Err(Error::InvalidArgument(format!(
                "shading field length {} does not match {} pixels",
                field.len(),
                self.pixel_count()
            )));
        }
        if field.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return Err(Error::InvalidArgument(
                "shading field must be strictly positive and finite".into(),
            ));
        }
        let mut data = self.data.clone();
        for (c, &s) in data.chunks_exact_mut(3).zip(field) {
            c[0] *= s;
            c[1] *= s;
            c[2] *= s;
        }
        Ok(Self {
            width: self.width,
            height: self.height,
            data,
        })
    }

    /// 8-bit quantization: scales the global maximum to 255 and rounds.
    pub fn quantize_8bit(&self) -> RgbImage {
        let max = self.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let scale = 255.0 / max;
        RgbImage {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .map(|&v| (v * scale).round().clamp(0.0, 255.0) as u8)
                .collect(),
        }
    }
}

fn check_dims(width: u32, height: u32) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument(format!(
            "zero image dimension: {}x{}",
            width, height
        )));
    }
    Ok(())
}

fn nearest_index(out: u32, out_len: u32, src_len: u32) -> usize {
    (out as u64 * src_len as u64 / out_len as u64) as usize
}

/// Channel values with the black-pixel clamp applied: a stored 0 is raised to
/// 1 (of 255) so later divisions and logarithms stay finite.
pub(crate) fn clamped_rgb(px: [u8; 3]) -> [f64; 3] {
    [
        f64::from(px[0].max(1)),
        f64::from(px[1].max(1)),
        f64::from(px[2].max(1)),
    ]
}

/// RGB to HSV with the standard hexcone model. `V = max(R,G,B)/255`;
/// achromatic pixels get `H = 0`, `S = 0`.
pub fn rgb_to_hsv(img: &RgbImage) -> HsvImage {
    let mut data = Vec::with_capacity(img.data.len());
    for px in img.pixels() {
        let [h, s, v] = hsv_px(px);
        data.push(h);
        data.push(s);
        data.push(v);
    }
    HsvImage {
        width: img.width,
        height: img.height,
        data,
    }
}

fn hsv_px(px: [u8; 3]) -> [f64; 3] {
    let max = px[0].max(px[1]).max(px[2]);
    let min = px[0].min(px[1]).min(px[2]);
    let v = f64::from(max) / 255.0;
    if max == 0 || max == min {
        return [0.0, 0.0, v];
    }
    let maxf = f64::from(max);
    let range = f64::from(max - min);
    let s = range / maxf;
    let r = f64::from(px[0]);
    let g = f64::from(px[1]);
    let b = f64::from(px[2]);
    let mut h = if px[0] == max {
        (g - b) / range
    } else if px[1] == max {
        (b - r) / range + 2.0
    } else {
        (r - g) / range + 4.0
    } * 60.0;
    if h < 0.0 {
        h += 360.0;
    }
    [h, s, v]
}

/// Inverse hexcone mapping; channels rounded to the nearest integer in
/// `[0, 255]`.
pub fn hsv_to_rgb(img: &HsvImage) -> RgbImage {
    let mut data = Vec::with_capacity(img.data.len());
    for [h, s, v] in img.pixels() {
        data.extend_from_slice(&rgb_px(h, s, v));
    }
    RgbImage {
        width: img.width,
        height: img.height,
        data,
    }
}

fn rgb_px(h: f64, s: f64, v: f64) -> [u8; 3] {
    let quant = |x: f64| (x * 255.0).round().clamp(0.0, 255.0) as u8;
    if s == 0.0 {
        let g = quant(v);
        return [g, g, g];
    }
    let h6 = (h / 60.0).rem_euclid(6.0);
    let sector = h6.floor();
    let f = h6 - sector;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    let (r, g, b) = match sector as u32 {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [quant(r), quant(g), quant(b)]
}

/// Loads an 8-bit PNG or baseline JPEG as RGB. Grayscale inputs are
/// replicated to three channels; alpha is dropped. Higher bit depths and
/// exotic color types are rejected.
pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    let reader = image::ImageReader::open(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let decoded = reader
        .with_guessed_format()
        .map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?
        .decode()
        .map_err(|e| Error::Format {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
    use image::DynamicImage::*;
    let rgb = match decoded {
        ImageLuma8(_) | ImageLumaA8(_) | ImageRgb8(_) | ImageRgba8(_) => decoded.to_rgb8(),
        other => {
            return Err(Error::Format {
                path: path.to_path_buf(),
                reason: format!("unsupported bit depth or color type {:?}", other.color()),
            })
        }
    };
    RgbImage::new(rgb.width(), rgb.height(), rgb.into_raw())
}

/// Writes an 8-bit RGB PNG.
pub fn save_rgb_png(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    image::save_buffer(
        path,
        &img.data,
        img.width,
        img.height,
        image::ExtendedColorType::Rgb8,
    )
    .map_err(|e| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Writes a plane as an 8-bit grayscale PNG after per-image min-max
/// normalization (visualization only). A constant plane saves as all zeros.
pub fn save_plane_png(plane: &PlaneImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let norm = plane.normalized();
    let bytes: Vec<u8> = norm
        .data
        .iter()
        .map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect();
    image::save_buffer(
        path,
        &bytes,
        plane.width,
        plane.height,
        image::ExtendedColorType::L8,
    )
    .map_err(|e| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// 32 levels per axis, endpoints included.
    fn grid_levels() -> Vec<u8> {
        (0..32).map(|i| ((i * 255 + 15) / 31) as u8).collect()
    }

    #[test]
    fn hsv_pure_red() {
        let img = RgbImage::filled(1, 1, [255, 0, 0]);
        let hsv = rgb_to_hsv(&img);
        assert_eq!(hsv.get(0, 0), [0.0, 1.0, 1.0]);
    }

    #[test]
    fn hsv_pure_green_round_trip() {
        let img = RgbImage::filled(1, 1, [0, 255, 0]);
        let hsv = rgb_to_hsv(&img);
        assert_eq!(hsv.get(0, 0)[0], 120.0);
        assert_eq!(hsv_to_rgb(&hsv).get(0, 0), [0, 255, 0]);
    }

    #[test]
    fn hsv_achromatic() {
        for g in [0u8, 1, 77, 128, 255] {
            let hsv = rgb_to_hsv(&RgbImage::filled(1, 1, [g, g, g]));
            let [h, s, v] = hsv.get(0, 0);
            assert_eq!(h, 0.0);
            assert_eq!(s, 0.0);
            assert_eq!(v, f64::from(g) / 255.0);
        }
    }

    #[test]
    fn hsv_value_is_max_over_255() {
        let hsv = rgb_to_hsv(&RgbImage::filled(1, 1, [128, 64, 32]));
        assert_eq!(hsv.get(0, 0)[2], 128.0 / 255.0);
    }

    #[test]
    fn hsv_to_rgb_achromatic_half() {
        let hsv = rgb_to_hsv(&RgbImage::filled(1, 1, [128, 128, 128]));
        let back = hsv_to_rgb(&hsv);
        assert_eq!(back.get(0, 0), [128, 128, 128]);
        // Direct 0.5 value rounds up to 128.
        assert_eq!(rgb_px(0.0, 0.0, 0.5), [128, 128, 128]);
    }

    #[test]
    fn hsv_round_trip_grid_within_one() {
        let levels = grid_levels();
        for &r in &levels {
            for &g in &levels {
                for &b in &levels {
                    let back = rgb_px_round_trip([r, g, b]);
                    for k in 0..3 {
                        let diff = (i16::from(back[k]) - i16::from([r, g, b][k])).abs();
                        assert!(diff <= 1, "({r},{g},{b}) -> {back:?}");
                    }
                }
            }
        }
    }

    fn rgb_px_round_trip(px: [u8; 3]) -> [u8; 3] {
        let [h, s, v] = hsv_px(px);
        rgb_px(h, s, v)
    }

    proptest! {
        #[test]
        fn hsv_round_trip_any_triple(r: u8, g: u8, b: u8) {
            let back = rgb_px_round_trip([r, g, b]);
            for k in 0..3 {
                prop_assert!((i16::from(back[k]) - i16::from([r, g, b][k])).abs() <= 1);
            }
        }
    }

    #[test]
    fn resize_identity_is_bit_identical() {
        let img = RgbImage::from_fn(5, 4, |x, y| [x as u8, y as u8, (x + y) as u8]);
        assert_eq!(img.resize_nearest(5, 4).unwrap(), img);
    }

    #[test]
    fn resize_checkerboard_block_replication() {
        let img = RgbImage::from_fn(2, 2, |x, y| {
            if (x + y) % 2 == 0 {
                [255, 255, 255]
            } else {
                [0, 0, 0]
            }
        });
        let up = img.resize_nearest(4, 4).unwrap();
        for y in 0..4 {
            for x in 0..4 {
                assert_eq!(up.get(x, y), img.get(x / 2, y / 2));
            }
        }
    }

    #[test]
    fn resize_to_128() {
        let img = RgbImage::filled(37, 91, [9, 9, 9]);
        let out = img.resize_nearest(128, 128).unwrap();
        assert_eq!((out.width(), out.height()), (128, 128));
    }

    #[test]
    fn resize_zero_dim_rejected() {
        let img = RgbImage::filled(2, 2, [0, 0, 0]);
        assert!(matches!(
            img.resize_nearest(0, 4),
            Err(Error::InvalidArgument(_))
        ));
        let plane = PlaneImage::filled(2, 2, 0.0);
        assert!(plane.resize_nearest(4, 0).is_err());
    }

    #[test]
    fn plane_normalized_constant_goes_to_zero() {
        let plane = PlaneImage::filled(3, 3, 0.7);
        assert!(plane.normalized().data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn plane_rejects_non_finite() {
        assert!(PlaneImage::new(1, 2, vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn png_round_trip_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.png");
        let img = RgbImage::from_fn(9, 7, |x, y| [(x * 29) as u8, (y * 41) as u8, 200]);
        save_rgb_png(&img, &path).unwrap();
        assert_eq!(load_image(&path).unwrap(), img);
    }

    #[test]
    fn constant_plane_saves_all_zero() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("flat.png");
        save_plane_png(&PlaneImage::filled(4, 4, 0.37), &path).unwrap();
        let back = load_image(&path).unwrap();
        assert!(back.pixels().all(|px| px == [0, 0, 0]));
    }

    #[test]
    fn jpeg_load_dims_match() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fix.jpg");
        let img = RgbImage::from_fn(33, 21, |x, y| [(x * 7) as u8, 128, (y * 11) as u8]);
        image::save_buffer(
            &path,
            img.as_bytes(),
            img.width(),
            img.height(),
            image::ExtendedColorType::Rgb8,
        )
        .unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!((back.width(), back.height()), (33, 21));
    }

    #[test]
    fn grayscale_load_replicates_channels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gray.png");
        image::save_buffer(&path, &[0u8, 77, 128, 255], 2, 2, image::ExtendedColorType::L8)
            .unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.get(1, 0), [77, 77, 77]);
        assert_eq!(img.get(1, 1), [255, 255, 255]);
    }

    #[test]
    fn sixteen_bit_png_rejected_with_filename() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("deep.png");
        let wide: Vec<u8> = [0u16, 12000, 65535, 30000]
            .iter()
            .flat_map(|v| v.to_be_bytes())
            .collect();
        image::save_buffer(&path, &wide, 2, 2, image::ExtendedColorType::L16).unwrap();
        match load_image(&path) {
            Err(Error::Format { path: p, .. }) => assert_eq!(p, path),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_image("/nonexistent/nothing.png"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn quantize_scales_global_max_to_255() {
        let raster =
            FloatRgbImage::new(1, 2, vec![1.0, 2.0, 4.0, 0.5, 1.0, 2.0]).unwrap();
        let img = raster.quantize_8bit();
        assert_eq!(img.get(0, 0), [64, 128, 255]);
        assert_eq!(img.get(0, 1), [32, 64, 128]);
    }
}
