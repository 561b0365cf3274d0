//! The two color bands used as extra input channels: the red channel of the
//! chromaticity-normalized image (`R'`) and the complement of the HSV value
//! channel (`V*`).

use crate::imgcore::{clamped_rgb, PlaneImage, RgbImage};

/// Both color bands of an image.
#[derive(Debug, Clone)]
pub struct BandSet {
    pub r_prime: PlaneImage,
    pub v_star: PlaneImage,
}

impl BandSet {
    pub fn compute(img: &RgbImage) -> Self {
        Self {
            r_prime: r_prime(img),
            v_star: v_star(img),
        }
    }
}

/// Normalized red band: `R' = R / (R + G + B)` with the black-pixel clamp,
/// so every output lies strictly inside `(0, 1)`.
pub fn r_prime(img: &RgbImage) -> PlaneImage {
    let data = img
        .pixels()
        .map(|px| {
            let [r, g, b] = clamped_rgb(px);
            r / (r + g + b)
        })
        .collect();
    PlaneImage::new(img.width(), img.height(), data).expect("dims preserved")
}

/// Complement of the HSV value channel, computed directly from RGB:
/// `V* = 1 - max(R, G, B) / 255`.
pub fn v_star(img: &RgbImage) -> PlaneImage {
    let data = img
        .pixels()
        .map(|px| {
            let max = px[0].max(px[1]).max(px[2]);
            1.0 - f64::from(max) / 255.0
        })
        .collect();
    PlaneImage::new(img.width(), img.height(), data).expect("dims preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgcore::rgb_to_hsv;
    use proptest::prelude::*;

    #[test]
    fn r_prime_pure_red_clamped() {
        let plane = r_prime(&RgbImage::filled(1, 1, [255, 0, 0]));
        assert_eq!(plane.get(0, 0), 255.0 / 257.0);
    }

    #[test]
    fn r_prime_equal_channels_is_third() {
        let plane = r_prime(&RgbImage::filled(1, 1, [100, 100, 100]));
        assert_eq!(plane.get(0, 0), 1.0 / 3.0);
    }

    #[test]
    fn r_prime_black_clamps_to_third() {
        let plane = r_prime(&RgbImage::filled(1, 1, [0, 0, 0]));
        assert_eq!(plane.get(0, 0), 1.0 / 3.0);
    }

    #[test]
    fn v_star_white_black_midgray() {
        assert_eq!(v_star(&RgbImage::filled(1, 1, [255, 255, 255])).get(0, 0), 0.0);
        assert_eq!(v_star(&RgbImage::filled(1, 1, [0, 0, 0])).get(0, 0), 1.0);
        let mid = v_star(&RgbImage::filled(1, 1, [128, 64, 32])).get(0, 0);
        assert_eq!(mid, 1.0 - 128.0 / 255.0);
    }

    #[test]
    fn r_prime_invariant_to_global_scaling() {
        // Scaling the clamped triple by an exact factor leaves the ratio alone.
        let base = r_prime(&RgbImage::filled(1, 1, [20, 10, 5]));
        let scaled = r_prime(&RgbImage::filled(1, 1, [80, 40, 20]));
        assert!((base.get(0, 0) - scaled.get(0, 0)).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn bands_stay_in_range(r: u8, g: u8, b: u8) {
            let img = RgbImage::filled(1, 1, [r, g, b]);
            let rp = r_prime(&img).get(0, 0);
            let vs = v_star(&img).get(0, 0);
            prop_assert!(rp > 0.0 && rp < 1.0);
            prop_assert!((0.0..=1.0).contains(&vs));
        }

        #[test]
        fn v_star_complements_hsv_value_exactly(r: u8, g: u8, b: u8) {
            let img = RgbImage::filled(1, 1, [r, g, b]);
            let v = rgb_to_hsv(&img).get(0, 0)[2];
            let vs = v_star(&img).get(0, 0);
            prop_assert_eq!(vs + v, 1.0);
        }
    }
}
