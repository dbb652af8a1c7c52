//! Per-word image acquisition with an on-disk cache.
//!
//! Two sources are supported: a local directory tree (`<root>/<word>/*.png`)
//! and an HTTP image-search endpoint given as a URL template with a
//! `{query}` placeholder. Either way, images land in
//! `<cache_dir>/<word>/<rank>.<ext>` next to a `manifest.json`; a later call
//! with the same settings is served from the manifest without touching the
//! source.

use std::collections::HashMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use regex::Regex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::embedding::is_image_path;

/// Query parameters appended verbatim to every search request.
pub const DEFAULT_EXTRA_QUERY: &str = "safe=off&site=&tbm=isch&source=hp&gs_l=img";
pub const DEFAULT_IMAGES_PER_WORD: usize = 100;
pub const MANIFEST_NAME: &str = "manifest.json";
const MAX_IMAGE_BYTES: u64 = 32 * 1024 * 1024;

static SHUTDOWN: AtomicBool = AtomicBool::new(false);

/// Asks running ingestions to stop before their next request. Files already
/// being written still complete their atomic rename.
pub fn request_shutdown() {
    SHUTDOWN.store(true, Ordering::SeqCst);
}

pub fn shutdown_requested() -> bool {
    SHUTDOWN.load(Ordering::SeqCst)
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("invalid ingestion config: {0}")]
    Config(String),
    #[error("no images found for {0:?}")]
    NotFound(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("request to {url} failed: {message}")]
    Http { url: String, message: String },
    #[error("corrupt cache manifest {path}: {message}")]
    Manifest { path: String, message: String },
    #[error("interrupted")]
    Interrupted,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io { path: path.display().to_string(), source }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SourceMode {
    LocalDir { root: PathBuf },
    HttpSearch { endpoint: String },
}

impl SourceMode {
    fn identity(&self) -> String {
        match self {
            SourceMode::LocalDir { root } => format!("local:{}", root.display()),
            SourceMode::HttpSearch { endpoint } => format!("http:{endpoint}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestionConfig {
    pub mode: SourceMode,
    pub images_per_word: usize,
    pub extra_query: String,
    /// Requests per second, shared by every fetch of an [`Ingestor`].
    pub rate_limit: f64,
    pub cache_dir: PathBuf,
    pub timeout: Duration,
    pub user_agent: String,
    /// Words ingested concurrently by [`Ingestor::ingest_corpus`].
    pub max_in_flight: usize,
}

impl IngestionConfig {
    pub fn local(root: impl Into<PathBuf>, cache_dir: impl Into<PathBuf>) -> Self {
        Self::with_mode(SourceMode::LocalDir { root: root.into() }, cache_dir.into())
    }

    pub fn http(endpoint: impl Into<String>, cache_dir: impl Into<PathBuf>) -> Self {
        Self::with_mode(SourceMode::HttpSearch { endpoint: endpoint.into() }, cache_dir.into())
    }

    fn with_mode(mode: SourceMode, cache_dir: PathBuf) -> Self {
        Self {
            mode,
            images_per_word: DEFAULT_IMAGES_PER_WORD,
            extra_query: DEFAULT_EXTRA_QUERY.to_string(),
            rate_limit: 1.0,
            cache_dir,
            timeout: Duration::from_secs(30),
            user_agent: concat!("chromalex/", env!("CARGO_PKG_VERSION")).to_string(),
            max_in_flight: 4,
        }
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if self.images_per_word == 0 {
            return Err(IngestError::Config("images_per_word must be at least 1".into()));
        }
        if self.max_in_flight == 0 {
            return Err(IngestError::Config("max_in_flight must be at least 1".into()));
        }
        if let SourceMode::HttpSearch { endpoint } = &self.mode {
            if !(self.rate_limit > 0.0 && self.rate_limit.is_finite()) {
                return Err(IngestError::Config("rate_limit must be positive in HTTP mode".into()));
            }
            if !endpoint.contains("{query}") {
                return Err(IngestError::Config("endpoint template needs a {query} placeholder".into()));
            }
        }
        Ok(())
    }

    /// The search URL for a word: template substitution plus the extra
    /// query string.
    pub fn search_url(&self, word: &str) -> Option<String> {
        let SourceMode::HttpSearch { endpoint } = &self.mode else {
            return None;
        };
        let encoded: String = url::form_urlencoded::byte_serialize(word.as_bytes()).collect();
        let mut u = endpoint.replace("{query}", &encoded);
        if !self.extra_query.is_empty() {
            u.push(if u.contains('?') { '&' } else { '?' });
            u.push_str(&self.extra_query);
        }
        Some(u)
    }
}

/// The cached images of one word, in rank order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordImageSet {
    pub word: String,
    pub image_paths: Vec<PathBuf>,
    pub fetched_at: String,
    pub requested: usize,
    pub shortfall: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub rank: usize,
    pub file: String,
    pub source_url: String,
    pub fetched_at: String,
    pub sha256: String,
}

/// Contents of `<cache_dir>/<word>/manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheManifest {
    pub word: String,
    pub source: String,
    pub requested: usize,
    pub fetched_at: String,
    pub images: Vec<ManifestEntry>,
}

/// Turns a search result page into image URLs, best first.
pub trait ResultParser: Send + Sync {
    fn image_urls(&self, body: &str) -> Vec<String>;
}

/// One result per line, either a JSON string or an object with a `url` field.
#[derive(Debug, Default, Clone, Copy)]
pub struct JsonLinesParser;

impl ResultParser for JsonLinesParser {
    fn image_urls(&self, body: &str) -> Vec<String> {
        body.lines()
            .filter_map(|line| {
                let v: serde_json::Value = serde_json::from_str(line.trim()).ok()?;
                match v {
                    serde_json::Value::String(s) => Some(s),
                    serde_json::Value::Object(o) => o.get("url")?.as_str().map(str::to_string),
                    _ => None,
                }
            })
            .collect()
    }
}

/// `src` attributes of `<img>` tags, in document order.
#[derive(Debug, Clone)]
pub struct HtmlImageParser {
    pattern: Regex,
}

impl Default for HtmlImageParser {
    fn default() -> Self {
        Self { pattern: Regex::new(r#"(?i)<img\b[^>]*?\bsrc\s*=\s*["']([^"']+)["']"#).expect("valid regex") }
    }
}

impl ResultParser for HtmlImageParser {
    fn image_urls(&self, body: &str) -> Vec<String> {
        self.pattern.captures_iter(body).map(|c| c[1].to_string()).collect()
    }
}

/// Token bucket; a caller that finds it empty reserves a future token and
/// sleeps until then, so concurrent callers queue fairly.
#[derive(Debug)]
pub struct TokenBucket {
    rate: f64,
    capacity: f64,
    state: Mutex<(f64, Instant)>,
}

impl TokenBucket {
    pub fn new(rate: f64, capacity: f64) -> Self {
        assert!(rate > 0.0 && capacity >= 1.0);
        Self { rate, capacity, state: Mutex::new((capacity, Instant::now())) }
    }

    pub fn acquire(&self) {
        let wait = {
            let mut st = self.state.lock().expect("bucket lock");
            let now = Instant::now();
            let refill = now.saturating_duration_since(st.1).as_secs_f64() * self.rate;
            st.0 = (st.0 + refill).min(self.capacity) - 1.0;
            st.1 = now;
            if st.0 < 0.0 {
                Duration::from_secs_f64(-st.0 / self.rate)
            } else {
                Duration::ZERO
            }
        };
        if !wait.is_zero() {
            std::thread::sleep(wait);
        }
    }
}

/// Directory name for a word inside the cache.
pub fn cache_key(word: &str) -> String {
    let mut key: String = word
        .chars()
        .map(|c| if c.is_alphanumeric() || matches!(c, '-' | '_' | ' ' | '.') { c } else { '_' })
        .collect();
    if key.is_empty() || key.starts_with('.') {
        key.insert(0, '_');
    }
    key
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Writes through a temporary sibling and renames into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("file");
    let tmp = dir.join(format!(
        ".{name}.tmp-{}-{}",
        std::process::id(),
        TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

fn extension_for(url: &str, content_type: Option<&str>) -> String {
    const KNOWN: [&str; 6] = ["png", "jpg", "jpeg", "gif", "webp", "bmp"];
    let path_ext = url::Url::parse(url).ok().and_then(|u| {
        Path::new(u.path()).extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase)
    });
    if let Some(ext) = path_ext.filter(|e| KNOWN.contains(&e.as_str())) {
        return ext;
    }
    match content_type.map(|c| c.split(';').next().unwrap_or("").trim().to_ascii_lowercase()) {
        Some(ct) if ct == "image/png" => "png".into(),
        Some(ct) if ct == "image/jpeg" || ct == "image/jpg" => "jpg".into(),
        Some(ct) if ct == "image/gif" => "gif".into(),
        Some(ct) if ct == "image/webp" => "webp".into(),
        _ => "img".into(),
    }
}

/// Per-word outcome of a batch ingest, in input order.
#[derive(Debug)]
pub struct CorpusReport {
    pub results: Vec<(String, Result<WordImageSet, IngestError>)>,
}

impl CorpusReport {
    pub fn sets(&self) -> impl Iterator<Item = &WordImageSet> {
        self.results.iter().filter_map(|(_, r)| r.as_ref().ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &IngestError)> {
        self.results.iter().filter_map(|(w, r)| r.as_ref().err().map(|e| (w.as_str(), e)))
    }
}

pub struct Ingestor {
    cfg: IngestionConfig,
    parser: Box<dyn ResultParser>,
    bucket: TokenBucket,
    agent: ureq::Agent,
    cache_hits: AtomicU64,
    network_requests: AtomicU64,
    word_locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl std::fmt::Debug for Ingestor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ingestor").field("cfg", &self.cfg).finish_non_exhaustive()
    }
}

impl Ingestor {
    /// Uses the JSON-lines result parser; see [`Ingestor::with_parser`].
    pub fn new(cfg: IngestionConfig) -> Result<Self, IngestError> {
        cfg.validate()?;
        let rate = if cfg.rate_limit > 0.0 { cfg.rate_limit } else { f64::MAX / 4.0 };
        let agent = ureq::AgentBuilder::new().timeout(cfg.timeout).user_agent(&cfg.user_agent).build();
        Ok(Self {
            bucket: TokenBucket::new(rate, 1.0),
            cfg,
            parser: Box::new(JsonLinesParser),
            agent,
            cache_hits: AtomicU64::new(0),
            network_requests: AtomicU64::new(0),
            word_locks: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_parser(mut self, parser: impl ResultParser + 'static) -> Self {
        self.parser = Box::new(parser);
        self
    }

    pub fn config(&self) -> &IngestionConfig {
        &self.cfg
    }

    pub fn cache_hits(&self) -> u64 {
        self.cache_hits.load(Ordering::Relaxed)
    }

    pub fn network_requests(&self) -> u64 {
        self.network_requests.load(Ordering::Relaxed)
    }

    fn word_dir(&self, word: &str) -> PathBuf {
        self.cfg.cache_dir.join(cache_key(word))
    }

    fn lock_for(&self, word: &str) -> Arc<Mutex<()>> {
        let mut locks = self.word_locks.lock().expect("lock table");
        locks.entry(word.to_string()).or_default().clone()
    }

    fn cached(&self, word: &str) -> Result<Option<WordImageSet>, IngestError> {
        let dir = self.word_dir(word);
        let path = dir.join(MANIFEST_NAME);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(io_err(&path)(e)),
        };
        let manifest: CacheManifest = serde_json::from_str(&text)
            .map_err(|e| IngestError::Manifest { path: path.display().to_string(), message: e.to_string() })?;
        if manifest.requested != self.cfg.images_per_word || manifest.source != self.cfg.mode.identity() {
            return Ok(None);
        }
        let paths: Vec<PathBuf> = manifest.images.iter().map(|e| dir.join(&e.file)).collect();
        if paths.is_empty() || !paths.iter().all(|p| p.is_file()) {
            return Ok(None);
        }
        Ok(Some(set_from_manifest(&manifest, paths)))
    }

    /// Ingests one word, serving from the cache when a matching manifest
    /// exists. Fewer images than requested is not an error.
    pub fn ingest_word(&self, word: &str) -> Result<WordImageSet, IngestError> {
        let lock = self.lock_for(word);
        let _guard = lock.lock().expect("word lock");
        if let Some(set) = self.cached(word)? {
            self.cache_hits.fetch_add(1, Ordering::Relaxed);
            return Ok(set);
        }
        let dir = self.word_dir(word);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let entries = match &self.cfg.mode {
            SourceMode::LocalDir { root } => self.copy_local(word, root, &dir)?,
            SourceMode::HttpSearch { .. } => self.fetch_http(word, &dir)?,
        };
        if entries.is_empty() {
            return Err(IngestError::NotFound(word.to_string()));
        }
        let manifest = CacheManifest {
            word: word.to_string(),
            source: self.cfg.mode.identity(),
            requested: self.cfg.images_per_word,
            fetched_at: now_rfc3339(),
            images: entries,
        };
        let manifest_path = dir.join(MANIFEST_NAME);
        let body = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        write_atomic(&manifest_path, &body).map_err(io_err(&manifest_path))?;
        let paths = manifest.images.iter().map(|e| dir.join(&e.file)).collect();
        let set = set_from_manifest(&manifest, paths);
        if set.shortfall > 0 {
            log::warn!("{word}: obtained {} of {} images", set.image_paths.len(), set.requested);
        }
        Ok(set)
    }

    fn rank_width(&self) -> usize {
        self.cfg.images_per_word.saturating_sub(1).to_string().len().max(3)
    }

    fn copy_local(&self, word: &str, root: &Path, dir: &Path) -> Result<Vec<ManifestEntry>, IngestError> {
        let src_dir = root.join(word);
        if !src_dir.is_dir() {
            return Err(IngestError::NotFound(word.to_string()));
        }
        let mut files: Vec<PathBuf> = fs::read_dir(&src_dir)
            .map_err(io_err(&src_dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && is_image_path(p))
            .collect();
        files.sort();
        files.truncate(self.cfg.images_per_word);
        let width = self.rank_width();
        let mut entries = Vec::with_capacity(files.len());
        for (rank, src) in files.iter().enumerate() {
            if shutdown_requested() {
                return Err(IngestError::Interrupted);
            }
            let bytes = fs::read(src).map_err(io_err(src))?;
            let ext = src.extension().and_then(|e| e.to_str()).unwrap_or("img").to_ascii_lowercase();
            let file = format!("{rank:0width$}.{ext}");
            let dest = dir.join(&file);
            write_atomic(&dest, &bytes).map_err(io_err(&dest))?;
            entries.push(ManifestEntry {
                rank,
                file,
                source_url: src.display().to_string(),
                fetched_at: now_rfc3339(),
                sha256: sha256_hex(&bytes),
            });
        }
        Ok(entries)
    }

    fn get(&self, url: &str) -> Result<ureq::Response, IngestError> {
        if shutdown_requested() {
            return Err(IngestError::Interrupted);
        }
        self.bucket.acquire();
        self.network_requests.fetch_add(1, Ordering::Relaxed);
        self.agent
            .get(url)
            .call()
            .map_err(|e| IngestError::Http { url: url.to_string(), message: e.to_string() })
    }

    fn fetch_http(&self, word: &str, dir: &Path) -> Result<Vec<ManifestEntry>, IngestError> {
        let search = self.cfg.search_url(word).expect("http mode");
        let body = self
            .get(&search)?
            .into_string()
            .map_err(|e| IngestError::Http { url: search.clone(), message: e.to_string() })?;
        let base = url::Url::parse(&search).ok();
        let urls: Vec<String> = self
            .parser
            .image_urls(&body)
            .into_iter()
            .filter_map(|u| match &base {
                Some(b) => b.join(&u).ok().map(|u| u.to_string()),
                None => Some(u),
            })
            .take(self.cfg.images_per_word)
            .collect();
        if urls.is_empty() {
            return Err(IngestError::NotFound(word.to_string()));
        }
        let width = self.rank_width();
        let mut entries = Vec::with_capacity(urls.len());
        for (rank, u) in urls.iter().enumerate() {
            let resp = match self.get(u) {
                Ok(r) => r,
                Err(IngestError::Interrupted) => return Err(IngestError::Interrupted),
                Err(e) => {
                    log::warn!("{word}: rank {rank}: {e}");
                    continue;
                }
            };
            let ext = extension_for(u, resp.header("content-type"));
            let mut bytes = Vec::new();
            if let Err(e) = resp.into_reader().take(MAX_IMAGE_BYTES).read_to_end(&mut bytes) {
                log::warn!("{word}: rank {rank}: reading {u}: {e}");
                continue;
            }
            let file = format!("{rank:0width$}.{ext}");
            let dest = dir.join(&file);
            write_atomic(&dest, &bytes).map_err(io_err(&dest))?;
            entries.push(ManifestEntry {
                rank,
                file,
                source_url: u.clone(),
                fetched_at: now_rfc3339(),
                sha256: sha256_hex(&bytes),
            });
        }
        Ok(entries)
    }

    /// Ingests every word with up to `max_in_flight` words at a time. One
    /// word failing never aborts the batch.
    pub fn ingest_corpus(&self, words: &[String]) -> CorpusReport {
        let slots: Vec<Mutex<Option<Result<WordImageSet, IngestError>>>> =
            words.iter().map(|_| Mutex::new(None)).collect();
        let next = AtomicUsize::new(0);
        let workers = self.cfg.max_in_flight.min(words.len()).max(1);
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(word) = words.get(i) else { break };
                    let res = self.ingest_word(word);
                    if let Err(e) = &res {
                        log::warn!("{word}: {e}");
                    }
                    *slots[i].lock().expect("slot") = Some(res);
                });
            }
        });
        let results = words
            .iter()
            .cloned()
            .zip(slots.into_iter().map(|m| m.into_inner().expect("slot").expect("every word visited")))
            .collect();
        CorpusReport { results }
    }
}

fn set_from_manifest(m: &CacheManifest, image_paths: Vec<PathBuf>) -> WordImageSet {
    WordImageSet {
        word: m.word.clone(),
        shortfall: m.requested.saturating_sub(image_paths.len()),
        image_paths,
        fetched_at: m.fetched_at.clone(),
        requested: m.requested,
    }
}

/// Image files for a word under a cache (or plain image) directory: the
/// manifest order when one exists, sorted file names otherwise.
pub fn cached_images(cache_dir: &Path, word: &str) -> Result<Vec<PathBuf>, IngestError> {
    let dir = cache_dir.join(cache_key(word));
    let manifest_path = dir.join(MANIFEST_NAME);
    if manifest_path.is_file() {
        let text = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
        let m: CacheManifest = serde_json::from_str(&text).map_err(|e| IngestError::Manifest {
            path: manifest_path.display().to_string(),
            message: e.to_string(),
        })?;
        return Ok(m.images.iter().map(|e| dir.join(&e.file)).collect());
    }
    let dir = if dir.is_dir() { dir } else { cache_dir.join(word) };
    if !dir.is_dir() {
        return Err(IngestError::NotFound(word.to_string()));
    }
    crate::embedding::list_image_files(&dir).map_err(io_err(&dir))
}

/// Convenience wrapper building a one-off [`Ingestor`].
pub fn ingest_word(word: &str, cfg: &IngestionConfig) -> Result<WordImageSet, IngestError> {
    Ingestor::new(cfg.clone())?.ingest_word(word)
}

pub fn ingest_corpus(words: &[String], cfg: &IngestionConfig) -> Result<CorpusReport, IngestError> {
    Ok(Ingestor::new(cfg.clone())?.ingest_corpus(words))
}
