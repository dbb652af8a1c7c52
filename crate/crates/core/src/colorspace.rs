//! Conversion between 8-bit sRGB and the perceptually uniform JzAzBz space.
//!
//! The forward chain is sRGB gamma expansion, linear RGB to absolute XYZ
//! (D65, white at 100 cd/m²), the JzAzBz cone-space adaptation, the
//! perceptual-quantizer (PQ) nonlinearity, the Iz/az/bz rotation and the
//! final Jz lightness offset. Every step is double precision; the PQ curve is
//! stiff near zero and single precision loses the round trip on dark pixels.
//!
//! Conversion back to sRGB clamps out-of-gamut results to the 8-bit cube and
//! records each clamp in a process-wide counter (see [`clamp_events`]).

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

/// An 8-bit sRGB pixel. Channel range [0, 255] is enforced by the type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SrgbPixel {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl SrgbPixel {
    pub const BLACK: SrgbPixel = SrgbPixel::new(0, 0, 0);
    pub const WHITE: SrgbPixel = SrgbPixel::new(255, 255, 255);

    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b }
    }

    pub fn channels(self) -> [u8; 3] {
        [self.r, self.g, self.b]
    }
}

impl From<[u8; 3]> for SrgbPixel {
    fn from(c: [u8; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }
}

/// A JzAzBz coordinate: lightness `jz`, red-green `az`, yellow-blue `bz`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jzazbz {
    pub jz: f64,
    pub az: f64,
    pub bz: f64,
}

impl Jzazbz {
    pub const fn new(jz: f64, az: f64, bz: f64) -> Self {
        Self { jz, az, bz }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.jz, self.az, self.bz]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Euclidean distance, which approximates perceived color difference.
    pub fn distance(self, other: Jzazbz) -> f64 {
        let (dj, da, db) = (self.jz - other.jz, self.az - other.az, self.bz - other.bz);
        (dj * dj + da * da + db * db).sqrt()
    }
}

/// Nominal coordinate ranges spanned by the sRGB gamut (rounded to three
/// decimals; a few gamut corners exceed them by < 5e-4).
pub const JZ_RANGE: (f64, f64) = (0.0, 0.167);
pub const AZ_RANGE: (f64, f64) = (-0.1, 0.11);
pub const BZ_RANGE: (f64, f64) = (-0.156, 0.115);

/// Luminance of sRGB white in cd/m², which fixes the absolute PQ scale.
const WHITE_LUMINANCE: f64 = 100.0;
const PQ_PEAK: f64 = 10_000.0;

const B: f64 = 1.15;
const G: f64 = 0.66;
const C1: f64 = 3424.0 / 4096.0;
const C2: f64 = 2413.0 / 128.0;
const C3: f64 = 2392.0 / 128.0;
const N: f64 = 2610.0 / 16384.0;
const P: f64 = 1.7 * 2523.0 / 32.0;
const D: f64 = -0.56;
const D0: f64 = 1.629_549_953_282_156_6e-11;

#[derive(Debug, Clone, Copy)]
struct Mat3([[f64; 3]; 3]);

impl Mat3 {
    const fn mul(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    const fn inverse(&self) -> Mat3 {
        let m = &self.0;
        let c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
        let c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
        let c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
        let det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
        let inv = 1.0 / det;
        Mat3([
            [
                c00 * inv,
                (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv,
                (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv,
            ],
            [
                c01 * inv,
                (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv,
                (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv,
            ],
            [
                c02 * inv,
                (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv,
                (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv,
            ],
        ])
    }
}

// IEC 61966-2-1 primaries, D65 white.
const RGB_TO_XYZ: Mat3 = Mat3([
    [0.4124, 0.3576, 0.1805],
    [0.2126, 0.7152, 0.0722],
    [0.0193, 0.1192, 0.9505],
]);
const XYZ_TO_RGB: Mat3 = RGB_TO_XYZ.inverse();

const XYZ_TO_LMS: Mat3 = Mat3([
    [0.41478972, 0.579999, 0.0146480],
    [-0.2015100, 1.120649, 0.0531008],
    [-0.0166008, 0.264800, 0.6684799],
]);
const LMS_TO_XYZ: Mat3 = XYZ_TO_LMS.inverse();

const LMS_TO_IAB: Mat3 = Mat3([
    [0.5, 0.5, 0.0],
    [3.524000, -4.066708, 0.542708],
    [0.199076, 1.096799, -1.295875],
]);
const IAB_TO_LMS: Mat3 = LMS_TO_IAB.inverse();

static CLAMP_EVENTS: AtomicU64 = AtomicU64::new(0);

/// Number of inverse conversions that had to clamp since process start.
pub fn clamp_events() -> u64 {
    CLAMP_EVENTS.load(Ordering::Relaxed)
}

/// sRGB electro-optical transfer: encoded [0, 1] to linear [0, 1].
pub fn srgb_decode(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

/// Inverse of [`srgb_decode`].
pub fn srgb_encode(c: f64) -> f64 {
    if c <= 0.003_130_8 {
        c * 12.92
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    }
}

fn pq_encode(x: f64) -> f64 {
    let xn = (x / PQ_PEAK).max(0.0).powf(N);
    ((C1 + C2 * xn) / (1.0 + C3 * xn)).powf(P)
}

fn pq_decode(v: f64) -> f64 {
    let vp = v.max(0.0).powf(1.0 / P);
    // Below the PQ floor (vp < C1) the ratio turns negative: treat as zero light.
    let ratio = (C1 - vp) / (C3 * vp - C2);
    PQ_PEAK * ratio.max(0.0).powf(1.0 / N)
}

/// Linear RGB in [0, 1] to JzAzBz.
pub fn linear_rgb_to_jzazbz(rgb: [f64; 3]) -> Jzazbz {
    let [x, y, z] = RGB_TO_XYZ.mul(rgb).map(|c| c * WHITE_LUMINANCE);
    let xp = B * x - (B - 1.0) * z;
    let yp = G * y - (G - 1.0) * x;
    let lms = XYZ_TO_LMS.mul([xp, yp, z]).map(pq_encode);
    let [iz, az, bz] = LMS_TO_IAB.mul(lms);
    let jz = ((1.0 + D) * iz) / (1.0 + D * iz) - D0;
    Jzazbz { jz, az, bz }
}

/// JzAzBz to unclamped linear RGB (may leave [0, 1] for out-of-gamut input).
pub fn jzazbz_to_linear_rgb(c: Jzazbz) -> [f64; 3] {
    let jz = c.jz + D0;
    let iz = jz / (1.0 + D - D * jz);
    let lms = IAB_TO_LMS.mul([iz, c.az, c.bz]).map(pq_decode);
    let [xp, yp, z] = LMS_TO_XYZ.mul(lms);
    let x = (xp + (B - 1.0) * z) / B;
    let y = (yp + (G - 1.0) * x) / G;
    XYZ_TO_RGB.mul([x, y, z]).map(|v| v / WHITE_LUMINANCE)
}

pub fn srgb_to_jzazbz(p: SrgbPixel) -> Jzazbz {
    linear_rgb_to_jzazbz(p.channels().map(|c| srgb_decode(f64::from(c) / 255.0)))
}

/// Inverse transform with clamping; the flag reports whether any channel
/// left [0, 255] before clamping.
pub fn jzazbz_to_srgb_checked(c: Jzazbz) -> (SrgbPixel, bool) {
    let mut clamped = false;
    let ch = jzazbz_to_linear_rgb(c).map(|v| {
        let e = srgb_encode(v) * 255.0;
        if !(-0.5..255.5).contains(&e) || v.is_nan() {
            clamped = true;
        }
        if e.is_nan() {
            0
        } else {
            e.round().clamp(0.0, 255.0) as u8
        }
    });
    if clamped {
        CLAMP_EVENTS.fetch_add(1, Ordering::Relaxed);
    }
    (SrgbPixel::from(ch), clamped)
}

pub fn jzazbz_to_srgb(c: Jzazbz) -> SrgbPixel {
    jzazbz_to_srgb_checked(c).0
}
