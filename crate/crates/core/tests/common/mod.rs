//! Fixture builders shared by the integration tests.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use chromalex::colorspace::SrgbPixel;
use chromalex::embedding::{ColorDistribution, WordColorEmbedding, NUM_BINS};
use chromalex::imaging::SrgbImage;
use chromalex::store::{save_embeddings, EmbeddingTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FIXTURE_WORDS: [&str; 5] = ["pyramid", "ocean", "concept", "forest", "ember"];
pub const FIXTURE_IMAGES: usize = 10;

pub fn write_solid_png(path: &Path, px: SrgbPixel, w: usize, h: usize) {
    SrgbImage::filled(w, h, px).save_png(path).unwrap();
}

/// Five words × ten 300×300 images of seeded blocky noise around a
/// per-word hue.
pub fn fixture_corpus(root: &Path) -> Vec<String> {
    let hues = [[200u8, 160, 90], [30, 90, 200], [128, 128, 128], [40, 140, 50], [230, 80, 20]];
    for (w, word) in FIXTURE_WORDS.iter().enumerate() {
        let dir = root.join(word);
        fs::create_dir_all(&dir).unwrap();
        for k in 0..FIXTURE_IMAGES {
            let mut rng = ChaCha8Rng::seed_from_u64((w * 100 + k) as u64);
            let blocks: Vec<[u8; 3]> = (0..100)
                .map(|_| {
                    let mut c = hues[w];
                    for ch in &mut c {
                        *ch = (*ch as i32 + rng.gen_range(-60..=60)).clamp(0, 255) as u8;
                    }
                    c
                })
                .collect();
            let img = SrgbImage::from_fn(300, 300, |x, y| SrgbPixel::from(blocks[(y / 30) * 10 + x / 30]));
            img.save_png(&dir.join(format!("img{k:02}.png"))).unwrap();
        }
    }
    FIXTURE_WORDS.iter().map(|s| s.to_string()).collect()
}

pub fn write_lines(path: &Path, lines: &[&str]) {
    fs::write(path, lines.join("\n") + "\n").unwrap();
}

pub fn record(word: &str, mass: [f64; NUM_BINS]) -> WordColorEmbedding {
    WordColorEmbedding {
        word: word.to_string(),
        jzazbz_dist: ColorDistribution::new(mass).unwrap(),
        jzazbz_dist_std: Some([0.0; NUM_BINS]),
        rgb_dist: mass,
        jzazbz_vector: [0.05, 0.0, 0.0],
        rgb_vector: [128.0, 128.0, 128.0],
        colorgram: None,
        concreteness_mean: None,
        concreteness_sd: None,
        image_count: 10,
    }
}

/// Mass spread over bins `lo..lo + 4` with small seeded jitter.
fn half_mass(rng: &mut ChaCha8Rng, lo: usize) -> [f64; NUM_BINS] {
    let mut m = [0.0; NUM_BINS];
    for b in lo..lo + 4 {
        m[b] = 1.0 + rng.gen_range(-0.05..0.05);
    }
    let s: f64 = m.iter().sum();
    m.map(|v| v / s)
}

pub struct MetaphorFixture {
    pub embeddings: PathBuf,
    pub text_vectors: PathBuf,
    pub pairs: PathBuf,
    pub n_pairs: usize,
}

/// Labeled pairs whose words' color mass sits in bins 0–3 for metaphorical
/// pairs and bins 4–7 for literal ones; text vectors are noise.
pub fn metaphor_fixture(dir: &Path, per_class: usize, seed: u64) -> MetaphorFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = EmbeddingTable::new();
    let mut text = String::new();
    let mut pairs = String::from("adjective,noun,label\n");
    for i in 0..2 * per_class {
        let metaphorical = i % 2 == 0;
        let lo = if metaphorical { 0 } else { 4 };
        let (adj, noun) = (format!("adj{i:03}"), format!("noun{i:03}"));
        for w in [&adj, &noun] {
            table.insert(w.clone(), record(w, half_mass(&mut rng, lo)));
            let v: Vec<String> = (0..10).map(|_| format!("{:.6}", rng.gen_range(-1.0..1.0))).collect();
            text.push_str(&format!("{w} {}\n", v.join(" ")));
        }
        let label = if metaphorical { "metaphorical" } else { "literal" };
        pairs.push_str(&format!("{adj},{noun},{label}\n"));
    }
    let embeddings = dir.join("metaphor-embeddings.json");
    save_embeddings(&embeddings, &table).unwrap();
    let text_vectors = dir.join("metaphor-vectors.txt");
    fs::write(&text_vectors, text).unwrap();
    let pairs_path = dir.join("metaphor-pairs.csv");
    fs::write(&pairs_path, pairs).unwrap();
    MetaphorFixture { embeddings, text_vectors, pairs: pairs_path, n_pairs: 2 * per_class }
}

pub struct PlantedConcreteness {
    pub embeddings: PathBuf,
    pub concreteness: PathBuf,
    pub pairs: PathBuf,
}

/// An anchor word paired with `n` partners whose concreteness is set so the
/// pair's summed concreteness is exactly `2 + 5·js`.
pub fn planted_concreteness(dir: &Path, n: usize, seed: u64) -> PlantedConcreteness {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = EmbeddingTable::new();
    let anchor = record("anchor", [0.125; NUM_BINS]);
    let anchor_c = 1.0;
    let mut conc = format!("word,concreteness-mean,concreteness-sd\nanchor,{anchor_c},0.1\n");
    let mut pairs = String::from("word_a,word_b\n");
    for i in 0..n {
        let w = format!("partner{i:03}");
        let mut m = [0.0; NUM_BINS];
        for v in &mut m {
            *v = rng.gen_range(0.01..1.0);
        }
        let s: f64 = m.iter().sum();
        let e = record(&w, m.map(|v| v / s));
        let js = chromalex::embedding::js_divergence(&anchor.jzazbz_dist, &e.jzazbz_dist);
        conc.push_str(&format!("{w},{:?},0.2\n", 2.0 + 5.0 * js - anchor_c));
        pairs.push_str(&format!("anchor,{w}\n"));
        table.insert(w, e);
    }
    table.insert("anchor".into(), anchor);
    let embeddings = dir.join("planted-embeddings.json");
    save_embeddings(&embeddings, &table).unwrap();
    let concreteness = dir.join("planted-concreteness.csv");
    fs::write(&concreteness, format!("# scale: -100,100\n{conc}")).unwrap();
    let pairs_path = dir.join("planted-pairs.csv");
    fs::write(&pairs_path, pairs).unwrap();
    PlantedConcreteness { embeddings, concreteness, pairs: pairs_path }
}
