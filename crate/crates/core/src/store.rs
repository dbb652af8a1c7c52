//! On-disk formats: the word–color embedding JSON, concreteness ratings and
//! plain-text word vectors. Words are lowercased on load in all three.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::embedding::{ColorDistribution, TextVector, WordColorEmbedding, MASS_TOLERANCE, NUM_BINS};

pub const FIELD_RGB_DIST: &str = "rgb-dist";
pub const FIELD_JZAZBZ_DIST: &str = "jzazbz-dist";
pub const FIELD_JZAZBZ_DIST_STD: &str = "jzazbz-dist-std";
pub const FIELD_COLORGRAM: &str = "colorgram";
pub const FIELD_RGB_VECTOR: &str = "rgb-vector";
pub const FIELD_JZAZBZ_VECTOR: &str = "jzazbz-vector";
pub const FIELD_CONCRETENESS_MEAN: &str = "concreteness-mean";
pub const FIELD_CONCRETENESS_SD: &str = "concreteness-sd";
pub const FIELD_IMAGE_COUNT: &str = "image-count";

/// Embeddings keyed by lowercase word.
pub type EmbeddingTable = BTreeMap<String, WordColorEmbedding>;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {message}")]
    Json { path: String, message: String },
    #[error("word {word:?}, field {field:?}: {message}")]
    Field { word: String, field: String, message: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: expected {expected} components, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
    #[error("missing column {0:?} in header")]
    MissingColumn(String),
    #[error("line {line}: concreteness {value} of {word:?} outside scale [{lo}, {hi}]")]
    OutOfScale { line: usize, word: String, value: f64, lo: f64, hi: f64 },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.display().to_string(), source }
}

fn field_err(word: &str, field: &str, message: impl Into<String>) -> StoreError {
    StoreError::Field { word: word.to_string(), field: field.to_string(), message: message.into() }
}

fn to_json(e: &WordColorEmbedding) -> Value {
    let mut obj = Map::new();
    obj.insert(FIELD_RGB_DIST.into(), json!(e.rgb_dist));
    obj.insert(FIELD_JZAZBZ_DIST.into(), json!(e.jzazbz_dist.mass()));
    if let Some(std) = &e.jzazbz_dist_std {
        obj.insert(FIELD_JZAZBZ_DIST_STD.into(), json!(std));
    }
    if let Some(path) = &e.colorgram {
        obj.insert(FIELD_COLORGRAM.into(), json!(path));
    }
    obj.insert(FIELD_RGB_VECTOR.into(), json!(e.rgb_vector));
    obj.insert(FIELD_JZAZBZ_VECTOR.into(), json!(e.jzazbz_vector));
    if let Some(m) = e.concreteness_mean {
        obj.insert(FIELD_CONCRETENESS_MEAN.into(), json!(m));
    }
    if let Some(sd) = e.concreteness_sd {
        obj.insert(FIELD_CONCRETENESS_SD.into(), json!(sd));
    }
    obj.insert(FIELD_IMAGE_COUNT.into(), json!(e.image_count));
    Value::Object(obj)
}

/// Serializes with sorted keys and shortest round-trip float formatting, so
/// identical tables always produce identical bytes.
pub fn embeddings_to_string(entries: &EmbeddingTable) -> String {
    let top: Map<String, Value> = entries.iter().map(|(w, e)| (w.clone(), to_json(e))).collect();
    let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("values are finite");
    s.push('\n');
    s
}

pub fn save_embeddings(path: &Path, entries: &EmbeddingTable) -> Result<(), StoreError> {
    fs::write(path, embeddings_to_string(entries)).map_err(io_err(path))
}

fn real_array<const K: usize>(word: &str, field: &str, v: &Value) -> Result<[f64; K], StoreError> {
    let arr = v.as_array().ok_or_else(|| field_err(word, field, "expected an array"))?;
    if arr.len() != K {
        return Err(field_err(word, field, format!("expected {K} values, found {}", arr.len())));
    }
    let mut out = [0.0; K];
    for (slot, x) in out.iter_mut().zip(arr) {
        *slot = x.as_f64().ok_or_else(|| field_err(word, field, format!("non-numeric value {x}")))?;
    }
    Ok(out)
}

fn optional_real(word: &str, field: &str, obj: &Map<String, Value>) -> Result<Option<f64>, StoreError> {
    match obj.get(field) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v.as_f64().map(Some).ok_or_else(|| field_err(word, field, "expected a number")),
    }
}

/// Parses one entry. A `jzazbz-dist` whose mass is off by more than the
/// normalization tolerance is rescaled; the flag reports that.
fn from_json(word: &str, v: &Value) -> Result<(WordColorEmbedding, bool), StoreError> {
    let obj = v.as_object().ok_or_else(|| field_err(word, "", "entry is not an object"))?;
    let get = |field: &str| obj.get(field).ok_or_else(|| field_err(word, field, "missing"));

    let raw: [f64; NUM_BINS] = real_array(word, FIELD_JZAZBZ_DIST, get(FIELD_JZAZBZ_DIST)?)?;
    if raw.iter().any(|&m| !(m >= 0.0)) {
        return Err(field_err(word, FIELD_JZAZBZ_DIST, "negative mass"));
    }
    let total: f64 = raw.iter().sum();
    let renormalized = (total - 1.0).abs() > MASS_TOLERANCE;
    let mass = if renormalized {
        if total <= 0.0 {
            return Err(field_err(word, FIELD_JZAZBZ_DIST, "zero total mass"));
        }
        raw.map(|m| m / total)
    } else {
        raw
    };
    let jzazbz_dist =
        ColorDistribution::new(mass).map_err(|e| field_err(word, FIELD_JZAZBZ_DIST, e.to_string()))?;

    let jzazbz_dist_std = match obj.get(FIELD_JZAZBZ_DIST_STD) {
        None | Some(Value::Null) => None,
        Some(v) => {
            let std: [f64; NUM_BINS] = real_array(word, FIELD_JZAZBZ_DIST_STD, v)?;
            if std.iter().any(|&s| !(s >= 0.0)) {
                return Err(field_err(word, FIELD_JZAZBZ_DIST_STD, "negative deviation"));
            }
            Some(std)
        }
    };

    // Non-string colorgram values (e.g. inlined pixel data) are not kept.
    let colorgram = obj.get(FIELD_COLORGRAM).and_then(Value::as_str).map(str::to_string);

    let image_count = match obj.get(FIELD_IMAGE_COUNT) {
        None | Some(Value::Null) => 0,
        Some(v) => v
            .as_u64()
            .filter(|&n| n >= 1)
            .ok_or_else(|| field_err(word, FIELD_IMAGE_COUNT, "expected a positive integer"))?
            as usize,
    };

    let embedding = WordColorEmbedding {
        word: word.to_string(),
        jzazbz_dist,
        jzazbz_dist_std,
        rgb_dist: real_array(word, FIELD_RGB_DIST, get(FIELD_RGB_DIST)?)?,
        jzazbz_vector: real_array(word, FIELD_JZAZBZ_VECTOR, get(FIELD_JZAZBZ_VECTOR)?)?,
        rgb_vector: real_array(word, FIELD_RGB_VECTOR, get(FIELD_RGB_VECTOR)?)?,
        colorgram,
        concreteness_mean: optional_real(word, FIELD_CONCRETENESS_MEAN, obj)?,
        concreteness_sd: optional_real(word, FIELD_CONCRETENESS_SD, obj)?,
        image_count,
    };
    Ok((embedding, renormalized))
}

/// Outcome of a lenient embedding load.
#[derive(Debug, Default)]
pub struct EmbeddingLoad {
    pub entries: EmbeddingTable,
    pub errors: Vec<StoreError>,
    /// Entries whose color distribution had to be rescaled to unit mass.
    pub renormalized: usize,
}

pub fn parse_embeddings(text: &str, origin: &str) -> Result<EmbeddingLoad, StoreError> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| StoreError::Json { path: origin.into(), message: e.to_string() })?;
    let top = root
        .as_object()
        .ok_or_else(|| StoreError::Json { path: origin.into(), message: "top level is not an object".into() })?;
    let mut load = EmbeddingLoad::default();
    for (word, v) in top {
        let key = word.to_lowercase();
        match from_json(&key, v) {
            Ok((e, renormalized)) => {
                load.renormalized += usize::from(renormalized);
                if load.entries.insert(key.clone(), e).is_some() {
                    log::warn!("{origin}: duplicate word {key:?} after lowercasing; keeping the later entry");
                }
            }
            Err(err) => load.errors.push(err),
        }
    }
    if load.renormalized > 0 {
        log::warn!("{origin}: rescaled {} distributions to unit mass", load.renormalized);
    }
    Ok(load)
}

/// Loads skipping malformed entries, which are returned alongside.
pub fn load_embeddings_lenient(path: &Path) -> Result<EmbeddingLoad, StoreError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_embeddings(&text, &path.display().to_string())
}

/// Loads, failing on the first malformed entry.
pub fn load_embeddings(path: &Path) -> Result<EmbeddingTable, StoreError> {
    let mut load = load_embeddings_lenient(path)?;
    match load.errors.is_empty() {
        true => Ok(load.entries),
        false => Err(load.errors.swap_remove(0)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Concreteness {
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcretenessTable {
    pub entries: BTreeMap<String, Concreteness>,
    /// Rating scale bounds; from a `# scale: lo,hi` line, default 1–5.
    pub scale: (f64, f64),
    /// Rows that overwrote an earlier row for the same word.
    pub duplicates: usize,
}

impl ConcretenessTable {
    pub fn get(&self, word: &str) -> Option<Concreteness> {
        self.entries.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub const DEFAULT_CONCRETENESS_SCALE: (f64, f64) = (1.0, 5.0);

fn find_column(headers: &csv::StringRecord, names: &[&str]) -> Result<usize, StoreError> {
    headers
        .iter()
        .position(|h| names.iter().any(|n| h.trim().eq_ignore_ascii_case(n)))
        .ok_or_else(|| StoreError::MissingColumn(names[0].to_string()))
}

fn parse_scale(line: &str) -> Option<(f64, f64)> {
    let rest = line.trim_start_matches('#').trim();
    let rest = rest.strip_prefix("scale")?.trim_start_matches([':', '=', ' ']);
    let (lo, hi) = rest.split_once([',', '-', ' '])?;
    Some((lo.trim().parse().ok()?, hi.trim().parse().ok()?))
}

/// Parses comma- or tab-separated ratings with a `word,concreteness-mean,
/// concreteness-sd` header (the `Word`/`Conc.M`/`Conc.SD` spelling of the
/// published norms is accepted too). Later rows win on duplicate words.
pub fn parse_concreteness(text: &str) -> Result<ConcretenessTable, StoreError> {
    let mut scale = DEFAULT_CONCRETENESS_SCALE;
    let mut header_line = None;
    for line in text.lines() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if t.starts_with('#') {
            if let Some(s) = parse_scale(t) {
                scale = s;
            }
            continue;
        }
        header_line = Some(line);
        break;
    }
    let Some(header_line) = header_line else {
        return Ok(ConcretenessTable { entries: BTreeMap::new(), scale, duplicates: 0 });
    };
    let delimiter = if header_line.contains('\t') { b'\t' } else { b',' };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| StoreError::Parse { line: 1, message: e.to_string() })?.clone();
    let word_col = find_column(&headers, &["word"])?;
    let mean_col = find_column(&headers, &["concreteness-mean", "conc.m", "mean"])?;
    let sd_col = find_column(&headers, &["concreteness-sd", "conc.sd", "sd"])?;

    let mut entries = BTreeMap::new();
    let mut duplicates = 0;
    for record in reader.records() {
        let record = record.map_err(|e| StoreError::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let cell = |i: usize| record.get(i).unwrap_or("");
        let word = cell(word_col).to_lowercase();
        if word.is_empty() {
            continue;
        }
        let number = |i: usize, what: &str| {
            cell(i).parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| StoreError::Parse {
                line,
                message: format!("non-numeric {what} {:?} for {word:?}", cell(i)),
            })
        };
        let mean = number(mean_col, "mean")?;
        let sd = number(sd_col, "sd")?;
        if mean < scale.0 || mean > scale.1 {
            return Err(StoreError::OutOfScale { line, word, value: mean, lo: scale.0, hi: scale.1 });
        }
        if entries.insert(word.clone(), Concreteness { mean, sd }).is_some() {
            log::warn!("concreteness: duplicate word {word:?} at line {line}; keeping the later row");
            duplicates += 1;
        }
    }
    Ok(ConcretenessTable { entries, scale, duplicates })
}

pub fn load_concreteness(path: &Path) -> Result<ConcretenessTable, StoreError> {
    parse_concreteness(&fs::read_to_string(path).map_err(io_err(path))?)
}

/// Word vectors sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct TextVectorTable {
    pub vectors: BTreeMap<String, TextVector>,
    pub dim: usize,
}

impl TextVectorTable {
    pub fn get(&self, word: &str) -> Option<&TextVector> {
        self.vectors.get(word)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Parses `word v1 … vD` lines. A first line made of exactly two integers
/// is a `count dim` header.
pub fn parse_text_vectors(text: &str) -> Result<TextVectorTable, StoreError> {
    let mut vectors = BTreeMap::new();
    let mut dim: Option<usize> = None;
    let mut first = true;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if std::mem::take(&mut first) && tokens.len() == 2 {
            if let (Ok(_count), Ok(d)) = (tokens[0].parse::<usize>(), tokens[1].parse::<usize>()) {
                dim = Some(d);
                continue;
            }
        }
        let values = tokens[1..]
            .iter()
            .map(|t| t.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| StoreError::Parse { line: lineno, message: format!("{e} in vector for {:?}", tokens[0]) })?;
        match dim {
            Some(d) if d != values.len() => {
                return Err(StoreError::DimensionMismatch { line: lineno, expected: d, found: values.len() })
            }
            None => dim = Some(values.len()),
            _ => {}
        }
        vectors.insert(tokens[0].to_lowercase(), TextVector(values));
    }
    Ok(TextVectorTable { vectors, dim: dim.unwrap_or(0) })
}

pub fn load_text_vectors(path: &Path) -> Result<TextVectorTable, StoreError> {
    parse_text_vectors(&fs::read_to_string(path).map_err(io_err(path))?)
}
