//! Image decoding, canonical 300×300 resampling and colorgram composition.

use std::path::Path;

use image::ImageEncoder;
use rayon::prelude::*;
use thiserror::Error;

use crate::colorspace::{jzazbz_to_srgb, srgb_to_jzazbz, Jzazbz, SrgbPixel};

/// Side length every image is compressed to before measurement.
pub const CANONICAL_SIZE: usize = 300;

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("cannot decode image: {0}")]
    Decode(String),
    #[error("no images to compose")]
    EmptyInput,
    #[error("pixel buffer of length {len} does not match {width}x{height}")]
    Shape { width: usize, height: usize, len: usize },
    #[error("image has zero width or height")]
    ZeroSized,
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot encode png: {0}")]
    Encode(String),
}

/// Which colorspace the pixels of an [`ImageArray`] live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorSpace {
    Srgb,
    Jzazbz,
}

/// Pixel types that can be stored in an [`ImageArray`].
pub trait Pixel: Copy + Send + Sync {
    const SPACE: ColorSpace;
}

impl Pixel for SrgbPixel {
    const SPACE: ColorSpace = ColorSpace::Srgb;
}

impl Pixel for Jzazbz {
    const SPACE: ColorSpace = ColorSpace::Jzazbz;
}

/// Row-major `height × width` pixel grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageArray<P> {
    width: usize,
    height: usize,
    pixels: Vec<P>,
}

pub type SrgbImage = ImageArray<SrgbPixel>;
pub type JzazbzImage = ImageArray<Jzazbz>;

impl<P: Pixel> ImageArray<P> {
    pub fn new(width: usize, height: usize, pixels: Vec<P>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::ZeroSized);
        }
        if pixels.len() != width * height {
            return Err(ImagingError::Shape { width, height, len: pixels.len() });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: P) -> Self {
        assert!(width > 0 && height > 0, "image must be non-empty");
        Self { width, height, pixels: vec![value; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> P) -> Self {
        assert!(width > 0 && height > 0, "image must be non-empty");
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self { width, height, pixels }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn space(&self) -> ColorSpace {
        P::SPACE
    }

    pub fn pixels(&self) -> &[P] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> P {
        self.pixels[y * self.width + x]
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

impl SrgbImage {
    pub fn to_jzazbz(&self) -> JzazbzImage {
        let pixels = self.pixels.iter().map(|&p| srgb_to_jzazbz(p)).collect();
        JzazbzImage { width: self.width, height: self.height, pixels }
    }

    /// Encodes as an 8-bit RGB PNG.
    pub fn to_png(&self) -> Result<Vec<u8>, ImagingError> {
        let raw: Vec<u8> = self.pixels.iter().flat_map(|p| p.channels()).collect();
        let mut out = Vec::new();
        image::codecs::png::PngEncoder::new(&mut out)
            .write_image(&raw, self.width as u32, self.height as u32, image::ExtendedColorType::Rgb8)
            .map_err(|e| ImagingError::Encode(e.to_string()))?;
        Ok(out)
    }

    pub fn save_png(&self, path: &Path) -> Result<(), ImagingError> {
        let bytes = self.to_png()?;
        std::fs::write(path, bytes)
            .map_err(|source| ImagingError::Io { path: path.display().to_string(), source })
    }
}

/// Decodes PNG or JPEG bytes into an sRGB image at the original size.
///
/// Alpha is composited over white (`c·α + 255·(1−α)`); grayscale is expanded
/// to three channels.
pub fn load_image(bytes: &[u8]) -> Result<SrgbImage, ImagingError> {
    let decoded = image::load_from_memory(bytes).map_err(|e| ImagingError::Decode(e.to_string()))?;
    let rgba = decoded.to_rgba8();
    let (w, h) = (rgba.width() as usize, rgba.height() as usize);
    let pixels = rgba
        .pixels()
        .map(|px| {
            let [r, g, b, a] = px.0;
            if a == 255 {
                return SrgbPixel::new(r, g, b);
            }
            let alpha = f64::from(a) / 255.0;
            let over = |c: u8| (f64::from(c) * alpha + 255.0 * (1.0 - alpha)).round() as u8;
            SrgbPixel::new(over(r), over(g), over(b))
        })
        .collect();
    SrgbImage::new(w, h, pixels)
}

pub fn load_image_file(path: &Path) -> Result<SrgbImage, ImagingError> {
    let bytes = std::fs::read(path)
        .map_err(|source| ImagingError::Io { path: path.display().to_string(), source })?;
    load_image(&bytes)
}

/// Per-axis resampling weights: for each output index, the contributing
/// source indices and their weights (summing to 1).
fn axis_weights(src: usize, dst: usize) -> Vec<Vec<(usize, f64)>> {
    if src == dst {
        return (0..dst).map(|i| vec![(i, 1.0)]).collect();
    }
    let scale = src as f64 / dst as f64;
    if src > dst {
        // area averaging: output cell i covers [i·scale, (i+1)·scale) in source space
        (0..dst)
            .map(|i| {
                let lo = i as f64 * scale;
                let hi = lo + scale;
                let first = lo.floor() as usize;
                let last = (hi.ceil() as usize).min(src);
                (first..last)
                    .filter_map(|s| {
                        let overlap = (hi.min(s as f64 + 1.0) - lo.max(s as f64)).max(0.0);
                        (overlap > 0.0).then_some((s, overlap / scale))
                    })
                    .collect()
            })
            .collect()
    } else {
        // bilinear on pixel centers, edges clamped
        (0..dst)
            .map(|i| {
                let pos = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
                let s0 = pos.floor() as usize;
                let s1 = (s0 + 1).min(src - 1);
                let t = pos - s0 as f64;
                if s1 == s0 || t == 0.0 {
                    vec![(s0, 1.0)]
                } else {
                    vec![(s0, 1.0 - t), (s1, t)]
                }
            })
            .collect()
    }
}

/// Resamples to `width × height` in sRGB: area averaging when shrinking an
/// axis, bilinear when enlarging it.
pub fn resize(img: &SrgbImage, width: usize, height: usize) -> SrgbImage {
    assert!(width > 0 && height > 0, "target must be non-empty");
    if img.width == width && img.height == height {
        return img.clone();
    }
    let wx = axis_weights(img.width, width);
    let wy = axis_weights(img.height, height);

    // horizontal pass: img.height × width, f64
    let mut horiz = vec![[0.0f64; 3]; img.height * width];
    for y in 0..img.height {
        let row = &img.pixels[y * img.width..(y + 1) * img.width];
        for (x, taps) in wx.iter().enumerate() {
            let mut acc = [0.0; 3];
            for &(s, w) in taps {
                let c = row[s].channels();
                for k in 0..3 {
                    acc[k] += w * f64::from(c[k]);
                }
            }
            horiz[y * width + x] = acc;
        }
    }

    let mut pixels = Vec::with_capacity(width * height);
    for taps in &wy {
        for x in 0..width {
            let mut acc = [0.0; 3];
            for &(s, w) in taps {
                let c = horiz[s * width + x];
                for k in 0..3 {
                    acc[k] += w * c[k];
                }
            }
            pixels.push(SrgbPixel::from(acc.map(|v| v.round().clamp(0.0, 255.0) as u8)));
        }
    }
    SrgbImage { width, height, pixels }
}

/// Compresses to the canonical 300×300 with anti-aliasing.
pub fn resize_antialiased(img: &SrgbImage) -> SrgbImage {
    resize(img, CANONICAL_SIZE, CANONICAL_SIZE)
}

/// A word's "average image": per-pixel mean of its images in JzAzBz,
/// rendered back to sRGB.
#[derive(Debug, Clone, PartialEq)]
pub struct Colorgram {
    pub image: SrgbImage,
    pub source_count: usize,
}

/// Running per-pixel JzAzBz sums for building a colorgram incrementally.
///
/// Images must be added in a fixed order for bit-stable output.
#[derive(Debug, Clone)]
pub struct ColorgramAccumulator {
    sums: Vec<[f64; 3]>,
    count: usize,
}

impl Default for ColorgramAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl ColorgramAccumulator {
    pub fn new() -> Self {
        Self { sums: vec![[0.0; 3]; CANONICAL_SIZE * CANONICAL_SIZE], count: 0 }
    }

    /// Adds a canonical-size JzAzBz image.
    pub fn add(&mut self, img: &JzazbzImage) {
        assert_eq!(
            (img.width, img.height),
            (CANONICAL_SIZE, CANONICAL_SIZE),
            "colorgram inputs must be canonical size"
        );
        for (acc, p) in self.sums.iter_mut().zip(&img.pixels) {
            acc[0] += p.jz;
            acc[1] += p.az;
            acc[2] += p.bz;
        }
        self.count += 1;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Mean JzAzBz coordinate at every pixel position.
    pub fn mean_image(&self) -> Result<JzazbzImage, ImagingError> {
        if self.count == 0 {
            return Err(ImagingError::EmptyInput);
        }
        let n = self.count as f64;
        let pixels = self.sums.iter().map(|s| Jzazbz::new(s[0] / n, s[1] / n, s[2] / n)).collect();
        JzazbzImage::new(CANONICAL_SIZE, CANONICAL_SIZE, pixels)
    }

    pub fn finish(&self) -> Result<Colorgram, ImagingError> {
        let mean = self.mean_image()?;
        let pixels = mean.pixels.par_iter().map(|&c| jzazbz_to_srgb(c)).collect();
        Ok(Colorgram {
            image: SrgbImage::new(CANONICAL_SIZE, CANONICAL_SIZE, pixels)?,
            source_count: self.count,
        })
    }
}

/// Averages the images pixel-wise in JzAzBz and converts back to sRGB.
/// Inputs not already 300×300 are resized first.
pub fn compose_colorgram(images: &[SrgbImage]) -> Result<Colorgram, ImagingError> {
    if images.is_empty() {
        return Err(ImagingError::EmptyInput);
    }
    let converted: Vec<JzazbzImage> = images
        .par_iter()
        .map(|img| {
            if img.width == CANONICAL_SIZE && img.height == CANONICAL_SIZE {
                img.to_jzazbz()
            } else {
                resize_antialiased(img).to_jzazbz()
            }
        })
        .collect();
    let mut acc = ColorgramAccumulator::new();
    for img in &converted {
        acc.add(img);
    }
    acc.finish()
}
