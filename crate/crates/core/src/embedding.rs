//! Eight-bin JzAzBz color distributions, per-word aggregation and the
//! comparison measures that go with each embedding kind.
//!
//! Color embeddings are probability distributions, so [`ColorDistribution`]
//! only offers divergences (KL, Jensen-Shannon). Textual embeddings are plain
//! vectors and [`TextVector`] only offers cosine similarity. Neither type
//! supports vector arithmetic.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colorspace::{Jzazbz, SrgbPixel, AZ_RANGE, BZ_RANGE, JZ_RANGE};
use crate::imaging::{
    load_image_file, resize_antialiased, Colorgram, ColorgramAccumulator, ImagingError, JzazbzImage,
    SrgbImage,
};

pub const NUM_BINS: usize = 8;

/// Tolerance on the total mass of a [`ColorDistribution`].
pub const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum EmbeddingError {
    #[error("no inputs to aggregate")]
    EmptyInput,
    #[error("negative or non-finite mass {value} in bin {bin}")]
    NegativeMass { bin: usize, value: f64 },
    #[error("distribution mass sums to {0}, expected 1")]
    NotNormalized(f64),
    #[error("p has mass in bin {bin} where q has none")]
    Support { bin: usize },
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("vector dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("no usable images for {0:?}")]
    NoUsableImages(String),
}

/// Normalized mass function over the eight JzAzBz subvolumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorDistribution([f64; NUM_BINS]);

impl ColorDistribution {
    pub fn new(mass: [f64; NUM_BINS]) -> Result<Self, EmbeddingError> {
        for (bin, &value) in mass.iter().enumerate() {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(EmbeddingError::NegativeMass { bin, value });
            }
        }
        let total = pairwise_sum(&mass);
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(EmbeddingError::NotNormalized(total));
        }
        Ok(Self(mass))
    }

    pub fn from_counts(counts: &[u64; NUM_BINS]) -> Result<Self, EmbeddingError> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(EmbeddingError::EmptyInput);
        }
        Ok(Self(counts.map(|c| c as f64 / total as f64)))
    }

    /// All mass in a single bin.
    pub fn point(bin: usize) -> Self {
        let mut mass = [0.0; NUM_BINS];
        mass[bin] = 1.0;
        Self(mass)
    }

    pub fn mass(&self) -> &[f64; NUM_BINS] {
        &self.0
    }

    pub fn js_divergence(&self, other: &ColorDistribution) -> f64 {
        js_divergence(self, other)
    }

    pub fn kl_divergence(&self, other: &ColorDistribution) -> Result<f64, EmbeddingError> {
        kl_divergence(self, other)
    }
}

/// The 2×2×2 split of the JzAzBz gamut box, halved at the midpoint of each
/// axis. Bin index is `4·jz + 2·az + bz` with 0 = lower half.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinGrid {
    pub jz: (f64, f64),
    pub az: (f64, f64),
    pub bz: (f64, f64),
}

impl Default for BinGrid {
    fn default() -> Self {
        Self::CANONICAL
    }
}

impl BinGrid {
    pub const CANONICAL: BinGrid = BinGrid { jz: JZ_RANGE, az: AZ_RANGE, bz: BZ_RANGE };

    /// Half-open `[lo, mid)` / closed `[mid, hi]` split on one axis. Values
    /// outside `[lo, hi]` are clamped; the flag reports it.
    fn axis(range: (f64, f64), v: f64) -> (usize, bool) {
        let (lo, hi) = range;
        let clamped = v < lo || v > hi;
        let v = v.clamp(lo, hi);
        let mid = (lo + hi) / 2.0;
        (usize::from(v >= mid), clamped)
    }

    /// Bin index for a coordinate and whether it had to be clamped.
    pub fn bin_index(&self, c: Jzazbz) -> (usize, bool) {
        let (j, cj) = Self::axis(self.jz, c.jz);
        let (a, ca) = Self::axis(self.az, c.az);
        let (b, cb) = Self::axis(self.bz, c.bz);
        (4 * j + 2 * a + b, cj || ca || cb)
    }
}

/// Histogram plus the number of pixels that were clamped into the grid.
pub fn histogram_jzazbz_counted(img: &JzazbzImage, grid: &BinGrid) -> (ColorDistribution, usize) {
    let mut counts = [0u64; NUM_BINS];
    let mut clamped = 0;
    for &c in img.pixels() {
        let (bin, was_clamped) = grid.bin_index(c);
        counts[bin] += 1;
        clamped += usize::from(was_clamped);
    }
    let dist = ColorDistribution::from_counts(&counts).expect("images are non-empty");
    (dist, clamped)
}

pub fn histogram_jzazbz(img: &JzazbzImage, grid: &BinGrid) -> ColorDistribution {
    histogram_jzazbz_counted(img, grid).0
}

/// Same octant scheme over the sRGB cube, split at 127.5 per channel.
pub fn histogram_rgb(img: &SrgbImage) -> [f64; NUM_BINS] {
    let mut counts = [0u64; NUM_BINS];
    for p in img.pixels() {
        let hi = |c: u8| usize::from(c >= 128);
        counts[4 * hi(p.r) + 2 * hi(p.g) + hi(p.b)] += 1;
    }
    let total = img.len() as f64;
    counts.map(|c| c as f64 / total)
}

/// Component-wise mean and population standard deviation over a word's
/// images. Summation is pairwise in input order so the result does not
/// depend on thread count.
pub fn aggregate_word(
    dists: &[ColorDistribution],
) -> Result<(ColorDistribution, [f64; NUM_BINS]), EmbeddingError> {
    if dists.is_empty() {
        return Err(EmbeddingError::EmptyInput);
    }
    let rows: Vec<[f64; NUM_BINS]> = dists.iter().map(|d| d.0).collect();
    let (mean, std) = mean_and_std(&rows);
    Ok((ColorDistribution::new(mean)?, std))
}

fn mean_and_std<const K: usize>(rows: &[[f64; K]]) -> ([f64; K], [f64; K]) {
    let n = rows.len() as f64;
    let mut mean = [0.0; K];
    let mut std = [0.0; K];
    let mut column = Vec::with_capacity(rows.len());
    for k in 0..K {
        column.clear();
        column.extend(rows.iter().map(|r| r[k]));
        let m = pairwise_sum(&column) / n;
        for v in column.iter_mut() {
            *v = (*v - m) * (*v - m);
        }
        mean[k] = m;
        std[k] = (pairwise_sum(&column) / n).sqrt();
    }
    (mean, std)
}

/// 8-dim (mean) or 16-dim (mean then std) feature vector.
pub fn concat_embedding(mean: &ColorDistribution, std: &[f64; NUM_BINS], include_std: bool) -> Vec<f64> {
    let mut v = mean.0.to_vec();
    if include_std {
        v.extend_from_slice(std);
    }
    v
}

/// `Σ p_k ln(p_k / q_k)` in nats, with `0·ln(0/q) = 0`.
pub fn kl_divergence(p: &ColorDistribution, q: &ColorDistribution) -> Result<f64, EmbeddingError> {
    let mut terms = [0.0; NUM_BINS];
    for (bin, (&pk, &qk)) in p.0.iter().zip(&q.0).enumerate() {
        if pk > 0.0 {
            if qk <= 0.0 {
                return Err(EmbeddingError::Support { bin });
            }
            terms[bin] = pk * (pk / qk).ln();
        }
    }
    Ok(pairwise_sum(&terms).max(0.0))
}

/// Jensen-Shannon divergence in nats, bounded by `ln 2`. Lower values mean
/// more similar color distributions.
pub fn js_divergence(c1: &ColorDistribution, c2: &ColorDistribution) -> f64 {
    let mut terms = [0.0; NUM_BINS];
    for (k, (&p, &q)) in c1.0.iter().zip(&c2.0).enumerate() {
        let m = 0.5 * (p + q);
        let mut t = 0.0;
        if p > 0.0 {
            t += p * (p / m).ln();
        }
        if q > 0.0 {
            t += q * (q / m).ln();
        }
        terms[k] = t;
    }
    (0.5 * pairwise_sum(&terms)).clamp(0.0, std::f64::consts::LN_2)
}

/// Dense vector from a textual embedding model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextVector(pub Vec<f64>);

impl TextVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn cosine(&self, other: &TextVector) -> Result<f64, EmbeddingError> {
        cosine_similarity(self, other)
    }
}

pub fn cosine_similarity(u: &TextVector, v: &TextVector) -> Result<f64, EmbeddingError> {
    if u.dim() != v.dim() {
        return Err(EmbeddingError::DimensionMismatch(u.dim(), v.dim()));
    }
    let dot: f64 = u.0.iter().zip(&v.0).map(|(a, b)| a * b).sum();
    let nu = u.0.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.0.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(EmbeddingError::ZeroVector);
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

/// Pairwise (cascade) summation; deterministic for a given input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        values.iter().sum()
    } else {
        let (a, b) = values.split_at(values.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// One word's embedding record.
#[derive(Debug, Clone, PartialEq)]
pub struct WordColorEmbedding {
    pub word: String,
    pub jzazbz_dist: ColorDistribution,
    /// Absent when the embedding was built without the variability half.
    pub jzazbz_dist_std: Option<[f64; NUM_BINS]>,
    pub rgb_dist: [f64; NUM_BINS],
    pub jzazbz_vector: [f64; 3],
    pub rgb_vector: [f64; 3],
    /// Path of the colorgram PNG, relative to the embedding file.
    pub colorgram: Option<String>,
    pub concreteness_mean: Option<f64>,
    pub concreteness_sd: Option<f64>,
    pub image_count: usize,
}

impl WordColorEmbedding {
    /// The 8- or 16-dimensional feature vector.
    pub fn features(&self, include_std: bool) -> Vec<f64> {
        let zeros = [0.0; NUM_BINS];
        concat_embedding(&self.jzazbz_dist, self.jzazbz_dist_std.as_ref().unwrap_or(&zeros), include_std)
    }
}

/// Everything measured from one canonical-size image.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageMeasurement {
    pub dist: ColorDistribution,
    pub rgb_dist: [f64; NUM_BINS],
    pub jzazbz_mean: [f64; 3],
    pub rgb_mean: [f64; 3],
    pub clamped_pixels: usize,
}

fn channel_means<const K: usize>(pixels: impl Iterator<Item = [f64; K]>) -> [f64; K] {
    let rows: Vec<[f64; K]> = pixels.collect();
    let n = rows.len() as f64;
    let mut out = [0.0; K];
    let mut column = Vec::with_capacity(rows.len());
    for (k, slot) in out.iter_mut().enumerate() {
        column.clear();
        column.extend(rows.iter().map(|r| r[k]));
        *slot = pairwise_sum(&column) / n;
    }
    out
}

/// Measures a (resized) sRGB image; also returns its JzAzBz conversion so
/// callers can feed a colorgram without converting twice.
pub fn measure_image(img: &SrgbImage, grid: &BinGrid) -> (ImageMeasurement, JzazbzImage) {
    let jz = img.to_jzazbz();
    let (dist, clamped_pixels) = histogram_jzazbz_counted(&jz, grid);
    let m = ImageMeasurement {
        dist,
        rgb_dist: histogram_rgb(img),
        jzazbz_mean: channel_means(jz.pixels().iter().map(|c| c.to_array())),
        rgb_mean: channel_means(img.pixels().iter().map(|p: &SrgbPixel| p.channels().map(f64::from))),
        clamped_pixels,
    };
    (m, jz)
}

/// Result of embedding one word from its image files.
#[derive(Debug)]
pub struct WordBuild {
    pub embedding: WordColorEmbedding,
    pub colorgram: Colorgram,
    pub skipped: Vec<(PathBuf, ImagingError)>,
    pub clamped_pixels: usize,
}

/// Decodes, resizes and measures every image, then aggregates. Images that
/// fail to decode are skipped and reported. Work is parallel per image;
/// all reductions run in input order.
pub fn embed_word(word: &str, paths: &[PathBuf], include_std: bool) -> Result<WordBuild, EmbeddingError> {
    let grid = BinGrid::CANONICAL;
    let chunk = (rayon::current_num_threads() * 2).max(1);
    let mut measurements = Vec::with_capacity(paths.len());
    let mut colorgram = ColorgramAccumulator::new();
    let mut skipped = Vec::new();

    for batch in paths.chunks(chunk) {
        let results: Vec<Result<(ImageMeasurement, JzazbzImage), ImagingError>> = batch
            .par_iter()
            .map(|p| load_image_file(p).map(|img| measure_image(&resize_antialiased(&img), &grid)))
            .collect();
        for (path, res) in batch.iter().zip(results) {
            match res {
                Ok((m, jz)) => {
                    colorgram.add(&jz);
                    measurements.push(m);
                }
                Err(e) => {
                    log::warn!("{word}: skipping {}: {e}", path.display());
                    skipped.push((path.clone(), e));
                }
            }
        }
    }
    if measurements.is_empty() {
        return Err(EmbeddingError::NoUsableImages(word.to_string()));
    }
    let embedding = aggregate_measurements(word, &measurements, include_std)?;
    let colorgram = colorgram.finish().expect("at least one image was added");
    let clamped_pixels = measurements.iter().map(|m| m.clamped_pixels).sum();
    Ok(WordBuild { embedding, colorgram, skipped, clamped_pixels })
}

/// Builds a word's record from per-image measurements (in a fixed order).
pub fn aggregate_measurements(
    word: &str,
    measurements: &[ImageMeasurement],
    include_std: bool,
) -> Result<WordColorEmbedding, EmbeddingError> {
    let dists: Vec<ColorDistribution> = measurements.iter().map(|m| m.dist).collect();
    let (jzazbz_dist, std) = aggregate_word(&dists)?;
    let rgb_rows: Vec<[f64; NUM_BINS]> = measurements.iter().map(|m| m.rgb_dist).collect();
    let jz_rows: Vec<[f64; 3]> = measurements.iter().map(|m| m.jzazbz_mean).collect();
    let rgb_mean_rows: Vec<[f64; 3]> = measurements.iter().map(|m| m.rgb_mean).collect();
    Ok(WordColorEmbedding {
        word: word.to_string(),
        jzazbz_dist,
        jzazbz_dist_std: include_std.then_some(std),
        rgb_dist: mean_and_std(&rgb_rows).0,
        jzazbz_vector: mean_and_std(&jz_rows).0,
        rgb_vector: mean_and_std(&rgb_mean_rows).0,
        colorgram: None,
        concreteness_mean: None,
        concreteness_sd: None,
        image_count: measurements.len(),
    })
}

/// Convenience for callers holding decoded images in memory.
pub fn embed_images(word: &str, images: &[SrgbImage], include_std: bool) -> Result<WordBuild, EmbeddingError> {
    let grid = BinGrid::CANONICAL;
    let measured: Vec<(ImageMeasurement, JzazbzImage)> =
        images.par_iter().map(|img| measure_image(&resize_antialiased(img), &grid)).collect();
    let mut colorgram = ColorgramAccumulator::new();
    for (_, jz) in &measured {
        colorgram.add(jz);
    }
    let measurements: Vec<ImageMeasurement> = measured.into_iter().map(|(m, _)| m).collect();
    if measurements.is_empty() {
        return Err(EmbeddingError::NoUsableImages(word.to_string()));
    }
    let embedding = aggregate_measurements(word, &measurements, include_std)?;
    let clamped_pixels = measurements.iter().map(|m| m.clamped_pixels).sum();
    Ok(WordBuild {
        embedding,
        colorgram: colorgram.finish().expect("non-empty"),
        skipped: Vec::new(),
        clamped_pixels,
    })
}

/// Sorted image files directly inside `dir` (png/jpg/jpeg, case-insensitive).
pub fn list_image_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && is_image_path(p))
        .collect();
    files.sort();
    Ok(files)
}

pub fn is_image_path(p: &Path) -> bool {
    p.extension()
        .and_then(|e| e.to_str())
        .map(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "jpg" | "jpeg"))
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorspace::srgb_to_jzazbz;
    use std::f64::consts::LN_2;

    fn e(i: usize) -> ColorDistribution {
        ColorDistribution::point(i)
    }

    #[test]
    fn grid_edges_are_canonical() {
        let g = BinGrid::CANONICAL;
        assert_eq!(g.jz, (0.0, 0.167));
        assert_eq!(g.az, (-0.1, 0.11));
        assert_eq!(g.bz, (-0.156, 0.115));
    }

    #[test]
    fn black_image_fills_one_bin() {
        let img = JzazbzImage::filled(300, 300, srgb_to_jzazbz(SrgbPixel::BLACK));
        let d = histogram_jzazbz(&img, &BinGrid::CANONICAL);
        // jz = 0 is low; az = 0 < 0.005 is low; bz = 0 >= -0.0205 is high
        assert_eq!(d, e(1));
    }

    #[test]
    fn two_color_split() {
        let black = srgb_to_jzazbz(SrgbPixel::BLACK);
        let white = srgb_to_jzazbz(SrgbPixel::WHITE);
        let img = JzazbzImage::from_fn(10, 10, |x, _| if x < 5 { black } else { white });
        let d = histogram_jzazbz(&img, &BinGrid::CANONICAL);
        let (bb, _) = BinGrid::CANONICAL.bin_index(black);
        let (bw, _) = BinGrid::CANONICAL.bin_index(white);
        assert_ne!(bb, bw);
        assert_eq!(d.mass()[bb], 0.5);
        assert_eq!(d.mass()[bw], 0.5);
    }

    #[test]
    fn four_pixel_hand_assignment() {
        let g = BinGrid::CANONICAL;
        let mid = |r: (f64, f64)| (r.0 + r.1) / 2.0;
        let pixels = vec![
            Jzazbz::new(0.01, -0.05, -0.1),  // 0,0,0 -> 0
            Jzazbz::new(0.10, 0.05, 0.05),   // 1,1,1 -> 7
            Jzazbz::new(mid(g.jz), mid(g.az), mid(g.bz)), // on every midpoint -> 7
            Jzazbz::new(0.05, 0.08, -0.12),  // 0,1,0 -> 2
        ];
        let img = JzazbzImage::new(2, 2, pixels).unwrap();
        let d = histogram_jzazbz(&img, &BinGrid::CANONICAL);
        assert_eq!(d.mass(), &[0.25, 0.0, 0.25, 0.0, 0.0, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn out_of_range_is_clamped_and_counted() {
        let img = JzazbzImage::new(2, 1, vec![Jzazbz::new(0.1672, 0.0, -0.1563), Jzazbz::new(0.05, 0.0, 0.0)]).unwrap();
        let (d, clamped) = histogram_jzazbz_counted(&img, &BinGrid::CANONICAL);
        assert_eq!(clamped, 1);
        assert!((d.mass().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // the upper edge itself is inside the last bin
        assert_eq!(BinGrid::CANONICAL.bin_index(Jzazbz::new(0.167, 0.11, 0.115)), (7, false));
    }

    #[test]
    fn rgb_octants() {
        let img = SrgbImage::new(2, 1, vec![SrgbPixel::new(127, 128, 0), SrgbPixel::new(255, 255, 255)]).unwrap();
        let h = histogram_rgb(&img);
        assert_eq!(h[2], 0.5);
        assert_eq!(h[7], 0.5);
    }

    #[test]
    fn aggregate_identical() {
        let d = ColorDistribution::new([0.1, 0.2, 0.3, 0.4, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let (mean, std) = aggregate_word(&[d; 5]).unwrap();
        for k in 0..NUM_BINS {
            assert!((mean.mass()[k] - d.mass()[k]).abs() < 1e-15);
            assert!(std[k].abs() < 1e-15);
        }
    }

    #[test]
    fn aggregate_two_points() {
        let (mean, std) = aggregate_word(&[e(0), e(1)]).unwrap();
        assert_eq!(mean.mass(), &[0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(std, [0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn aggregate_permutation_invariant() {
        let a = [e(0), e(3), e(3), e(6)];
        let b = [e(3), e(6), e(0), e(3)];
        assert_eq!(aggregate_word(&a).unwrap(), aggregate_word(&b).unwrap());
        assert_eq!(aggregate_word(&[]), Err(EmbeddingError::EmptyInput));
    }

    #[test]
    fn concat_layout() {
        let (mean, std) = aggregate_word(&[e(2); 3]).unwrap();
        assert_eq!(concat_embedding(&mean, &std, false), mean.mass().to_vec());
        let full = concat_embedding(&mean, &std, true);
        assert_eq!(full.len(), 16);
        assert_eq!(&full[..8], mean.mass());
        assert_eq!(&full[8..], &[0.0; 8]);
    }

    #[test]
    fn kl_examples() {
        let p = ColorDistribution::new([0.2, 0.3, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let half = ColorDistribution::new([0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((kl_divergence(&e(0), &half).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(kl_divergence(&e(0), &e(1)), Err(EmbeddingError::Support { bin: 0 }));
    }

    #[test]
    fn js_examples() {
        let p = ColorDistribution::new([0.2, 0.3, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(js_divergence(&p, &p), 0.0);
        assert!((js_divergence(&e(0), &e(1)) - LN_2).abs() < 1e-15);
        assert!((js_divergence(&e(0), &e(1)) - 0.6931).abs() < 1e-4);
    }

    #[test]
    fn distribution_validation() {
        assert!(matches!(
            ColorDistribution::new([0.5, 0.5, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0]),
            Err(EmbeddingError::NotNormalized(_))
        ));
        assert!(matches!(
            ColorDistribution::new([1.5, -0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            Err(EmbeddingError::NegativeMass { bin: 1, .. })
        ));
    }

    #[test]
    fn cosine_examples() {
        let v = |x: &[f64]| TextVector(x.to_vec());
        assert!((cosine_similarity(&v(&[0.3, -2.0, 5.0]), &v(&[0.3, -2.0, 5.0])).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(cosine_similarity(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        let c = cosine_similarity(&v(&[1.0, 1.0]), &v(&[1.0, 0.0])).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(cosine_similarity(&v(&[0.0, 0.0]), &v(&[1.0, 0.0])), Err(EmbeddingError::ZeroVector));
        assert_eq!(cosine_similarity(&v(&[1.0]), &v(&[1.0, 0.0])), Err(EmbeddingError::DimensionMismatch(1, 2)));
    }

    #[test]
    fn pairwise_sum_matches_naive_for_small_inputs() {
        let xs: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(pairwise_sum(&xs), 5050.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn in_memory_embedding() {
        let red = SrgbImage::filled(300, 300, SrgbPixel::new(255, 0, 0));
        let black = SrgbImage::filled(300, 300, SrgbPixel::BLACK);
        let build = embed_images("w", &[red.clone(), black.clone()], true).unwrap();
        let e = &build.embedding;
        assert_eq!(e.image_count, 2);
        assert!(e.jzazbz_dist_std.is_some());
        assert_eq!(e.rgb_dist[4], 0.5);
        assert_eq!(e.rgb_dist[0], 0.5);
        assert_eq!(e.rgb_vector, [127.5, 0.0, 0.0]);
        let r = srgb_to_jzazbz(SrgbPixel::new(255, 0, 0));
        assert!((e.jzazbz_vector[0] - r.jz / 2.0).abs() < 1e-12);
        let without = embed_images("w", &[red, black], false).unwrap();
        assert!(without.embedding.jzazbz_dist_std.is_none());
        assert_eq!(without.embedding.jzazbz_dist, e.jzazbz_dist);
    }
}
