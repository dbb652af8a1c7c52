use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use super::config::{parse_config, Settings};
use super::*;
use crate::analysis::metaphor::{load_labeled_pairs, MetaphorOptions, PairScore, COLOR_BACKEND, TEXT_BACKEND};
use crate::analysis::similarity::{concreteness_analysis, similarity_trend, PairSelection, DEFAULT_REFERENCE_WORDS};
use crate::analysis::trend::{TrendPoint, DEFAULT_BINS};
use crate::analysis::{metaphor_pipeline, GbtParams, RegressionReport};
use crate::embedding::{embed_word, js_divergence};
use crate::ingestion::{
    cache_key, cached_images, request_shutdown, shutdown_requested, HtmlImageParser, IngestionConfig, Ingestor,
    JsonLinesParser, SourceMode,
};
use crate::plot::{bar_chart, line_chart, mean_ci95, Bar, Series, PALETTE};
use crate::store::{
    load_concreteness, load_embeddings, load_text_vectors, save_embeddings, ConcretenessTable, EmbeddingTable,
    TextVectorTable,
};

struct Context {
    settings: Settings,
    out: PathBuf,
    seed: u64,
    arguments: Vec<String>,
    started_at: String,
    inputs: Vec<PathBuf>,
}

impl Context {
    fn out_file(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn ensure_out(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.out).map_err(|e| CliError::failure(format!("creating {}: {e}", self.out.display())))
    }

    fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
        let p = self.out_file(name);
        fs::write(&p, contents).map_err(|e| CliError::failure(format!("writing {}: {e}", p.display())))
    }

    fn finish(self, command: &str) -> Result<(), CliError> {
        let mut inputs = Vec::with_capacity(self.inputs.len());
        for p in &self.inputs {
            let sha256 = sha256_file(p).map_err(|e| CliError::failure(format!("hashing {}: {e}", p.display())))?;
            inputs.push(InputHash { path: p.display().to_string(), sha256 });
        }
        let manifest = RunManifest {
            command: command.to_string(),
            arguments: self.arguments.clone(),
            config: self.settings.snapshot.clone(),
            seed: Some(self.seed),
            inputs,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_at: self.started_at.clone(),
            finished_at: now(),
        };
        let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        self.write(MANIFEST_FILE, body)
    }
}

pub(super) fn execute(cli: Cli, arguments: Vec<String>) -> Result<(), CliError> {
    let started_at = now();
    let file = match &cli.config {
        Some(p) => {
            let text =
                fs::read_to_string(p).map_err(|e| CliError::config(format!("reading {}: {e}", p.display())))?;
            parse_config(&text).map_err(|e| CliError::config(format!("{}: {e}", p.display())))?
        }
        None => Default::default(),
    };
    let mut settings = Settings::new(file);
    let threads = settings.lookup("threads", cli.threads).map_err(CliError::config)?;
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::config("threads must be at least 1"));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let seed = settings.resolve("seed", cli.seed, 0u64).map_err(CliError::config)?;
    let out = settings
        .resolve("out", cli.out.map(|p| p.display().to_string()), DEFAULT_OUT.to_string())
        .map_err(CliError::config)?;
    let mut ctx = Context {
        settings,
        out: PathBuf::from(out),
        seed,
        arguments,
        started_at,
        inputs: cli.config.iter().cloned().collect(),
    };
    match cli.command {
        Command::Ingest(a) => ingest(&mut ctx, a).and_then(|_| ctx.finish("ingest")),
        Command::Embed(a) => embed(&mut ctx, a).and_then(|_| ctx.finish("embed")),
        Command::Compare(a) => compare(a),
        Command::Analyze { which } => match which {
            AnalyzeCommand::Concreteness(a) => {
                analyze_concreteness(&mut ctx, a).and_then(|_| ctx.finish("analyze concreteness"))
            }
            AnalyzeCommand::SimilarityTrend(a) => {
                analyze_trend(&mut ctx, a).and_then(|_| ctx.finish("analyze similarity-trend"))
            }
            AnalyzeCommand::Metaphor(a) => analyze_metaphor(&mut ctx, a).and_then(|_| ctx.finish("analyze metaphor")),
        },
    }
}

/// Words from a UTF-8 list: one per line, `#` starts a comment, duplicates
/// keep their first position.
pub fn read_words(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("reading {}: {e}", path.display())))?;
    let mut seen = std::collections::HashSet::new();
    let words: Vec<String> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
        .filter(|w| !w.is_empty() && seen.insert(w.clone()))
        .collect();
    if words.is_empty() {
        return Err(CliError::config(format!("no words in {}", path.display())));
    }
    Ok(words)
}

fn write_csv(ctx: &Context, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::failure(format!("writing {name}: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::failure(format!("writing {name}: {e}")))?;
    ctx.write(name, bytes)
}

fn write_json<T: Serialize>(ctx: &Context, name: &str, value: &T) -> Result<(), CliError> {
    ctx.write(name, serde_json::to_string_pretty(value).expect("serializable") + "\n")
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::failure(e)
}

fn ingest(ctx: &mut Context, a: IngestArgs) -> Result<(), CliError> {
    let words = read_words(&a.words)?;
    ctx.inputs.push(a.words.clone());
    let s = &mut ctx.settings;
    let mode = s.resolve("mode", a.mode, "local_dir".to_string()).map_err(CliError::config)?;
    let source_dir = s.lookup("source_dir", a.source_dir.map(|p| p.display().to_string())).map_err(CliError::config)?;
    let endpoint = s.lookup("endpoint", a.endpoint).map_err(CliError::config)?;
    let cache = s
        .resolve("cache_dir", a.cache.map(|p| p.display().to_string()), DEFAULT_CACHE.to_string())
        .map_err(CliError::config)?;
    let mode = match mode.to_ascii_lowercase().as_str() {
        "local_dir" | "local" => SourceMode::LocalDir {
            root: PathBuf::from(source_dir.ok_or_else(|| CliError::config("local_dir mode needs source_dir"))?),
        },
        "http_search" | "http" => SourceMode::HttpSearch {
            endpoint: endpoint.ok_or_else(|| CliError::config("http_search mode needs endpoint"))?,
        },
        other => return Err(CliError::config(format!("unknown mode {other:?}"))),
    };
    let mut cfg = IngestionConfig { mode, ..IngestionConfig::local("", cache) };
    cfg.images_per_word = s.resolve("images_per_word", a.images_per_word, cfg.images_per_word).map_err(CliError::config)?;
    cfg.rate_limit = s.resolve("rate_limit", a.rate_limit, cfg.rate_limit).map_err(CliError::config)?;
    cfg.extra_query = s.resolve("extra_query", None, cfg.extra_query.clone()).map_err(CliError::config)?;
    let timeout = s.resolve("timeout_secs", None, cfg.timeout.as_secs_f64()).map_err(CliError::config)?;
    if !(timeout > 0.0 && timeout.is_finite()) {
        return Err(CliError::config("timeout_secs must be positive"));
    }
    cfg.timeout = Duration::from_secs_f64(timeout);
    cfg.user_agent = s.resolve("user_agent", None, cfg.user_agent.clone()).map_err(CliError::config)?;
    cfg.max_in_flight = s.resolve("max_in_flight", a.max_in_flight, cfg.max_in_flight).map_err(CliError::config)?;
    let parser = s.resolve("parser", a.parser, "jsonl".to_string()).map_err(CliError::config)?;
    let ingestor = Ingestor::new(cfg).map_err(CliError::config)?;
    let ingestor = match parser.as_str() {
        "jsonl" | "json" => ingestor.with_parser(JsonLinesParser),
        "html" => ingestor.with_parser(HtmlImageParser::default()),
        other => return Err(CliError::config(format!("unknown parser {other:?}"))),
    };
    let _ = ctrlc::set_handler(request_shutdown);
    ctx.ensure_out()?;

    let report = ingestor.ingest_corpus(&words);
    let mut rows = Vec::new();
    println!("word\tobtained\tshortfall\tstatus");
    for (word, r) in &report.results {
        let (obtained, shortfall, status, err) = match r {
            Ok(set) => (set.image_paths.len().to_string(), set.shortfall.to_string(), "ok", String::new()),
            Err(e) => (String::new(), String::new(), "failed", e.to_string()),
        };
        println!("{word}\t{obtained}\t{shortfall}\t{status}");
        rows.push(vec![word.clone(), obtained, shortfall, status.to_string(), err]);
    }
    write_csv(ctx, "ingest-report.csv", &["word", "obtained", "shortfall", "status", "error"], &rows)?;
    let ok = report.sets().count();
    log::info!("{ok} of {} words ingested, {} from cache", words.len(), ingestor.cache_hits());
    if shutdown_requested() {
        return Err(CliError::new(EXIT_INTERRUPTED, "interrupted"));
    }
    if ok == 0 {
        return Err(CliError::failure("no word yielded any images"));
    }
    Ok(())
}

fn embed(ctx: &mut Context, a: EmbedArgs) -> Result<(), CliError> {
    let words = read_words(&a.words)?;
    ctx.inputs.push(a.words.clone());
    let s = &mut ctx.settings;
    let cache = PathBuf::from(
        s.resolve("cache_dir", a.cache.map(|p| p.display().to_string()), DEFAULT_CACHE.to_string())
            .map_err(CliError::config)?,
    );
    let flag = if a.no_std { Some(false) } else if a.std { Some(true) } else { None };
    let include_std = s.resolve("std", flag, true).map_err(CliError::config)?;
    let concreteness = match &a.concreteness {
        Some(p) => {
            ctx.inputs.push(p.clone());
            Some(load_concreteness(p).map_err(input_err)?)
        }
        None => None,
    };
    ctx.ensure_out()?;
    let output = a.output.unwrap_or_else(|| ctx.out_file("embeddings.json"));
    let json_dir = output.parent().map(Path::to_path_buf).unwrap_or_default();
    let colorgram_dir = json_dir.join("colorgrams");
    fs::create_dir_all(&colorgram_dir).map_err(|e| CliError::failure(format!("creating {}: {e}", colorgram_dir.display())))?;

    let mut table = EmbeddingTable::new();
    let mut failed = 0;
    for word in &words {
        let paths = match cached_images(&cache, word) {
            Ok(p) => p,
            Err(e) => {
                log::warn!("{word}: {e}");
                failed += 1;
                continue;
            }
        };
        let build = match embed_word(word, &paths, include_std) {
            Ok(b) => b,
            Err(e) => {
                log::warn!("{word}: {e}");
                failed += 1;
                continue;
            }
        };
        for (p, e) in &build.skipped {
            log::warn!("{word}: skipped {}: {e}", p.display());
        }
        let rel = format!("colorgrams/{}.png", cache_key(word));
        build.colorgram.image.save_png(&json_dir.join(&rel)).map_err(input_err)?;
        let mut emb = build.embedding;
        emb.colorgram = Some(rel);
        if let Some(c) = concreteness.as_ref().and_then(|t| t.get(word)) {
            emb.concreteness_mean = Some(c.mean);
            emb.concreteness_sd = Some(c.sd);
        }
        ctx.inputs.extend(paths.iter().filter(|p| !build.skipped.iter().any(|(s, _)| s == *p)).cloned());
        table.insert(word.to_lowercase(), emb);
    }
    if table.is_empty() {
        return Err(CliError::new(EXIT_EMBED, "no word had usable images"));
    }
    save_embeddings(&output, &table).map_err(input_err)?;
    println!("embedded {} words ({failed} failed) -> {}", table.len(), output.display());
    Ok(())
}

fn compare(a: CompareArgs) -> Result<(), CliError> {
    let table = load_embeddings(&a.embeddings).map_err(input_err)?;
    let get = |w: &str| {
        table.get(&w.to_lowercase()).ok_or_else(|| CliError::new(EXIT_LOOKUP, format!("word not found: {w}")))
    };
    let (x, y) = (get(&a.word_a)?, get(&a.word_b)?);
    println!("{:.6}", js_divergence(&x.jzazbz_dist, &y.jzazbz_dist));
    Ok(())
}

fn load_tables(
    ctx: &mut Context,
    embeddings: &Path,
    text: Option<&Path>,
) -> Result<(EmbeddingTable, Option<TextVectorTable>), CliError> {
    ctx.inputs.push(embeddings.to_path_buf());
    let e = load_embeddings(embeddings).map_err(input_err)?;
    let t = match text {
        Some(p) => {
            ctx.inputs.push(p.to_path_buf());
            Some(load_text_vectors(p).map_err(input_err)?)
        }
        None => None,
    };
    Ok((e, t))
}

/// Word pairs from a CSV whose first two columns are the words; a header
/// row is optional.
pub fn read_word_pairs(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::failure(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::failure(format!("{}: {e}", path.display())))?;
        let (Some(a), Some(b)) = (rec.get(0), rec.get(1)) else {
            return Err(CliError::failure(format!("{}: line {} needs two words", path.display(), i + 1)));
        };
        if i == 0 && a.eq_ignore_ascii_case("word_a") {
            continue;
        }
        out.push((a.to_string(), b.to_string()));
    }
    Ok(out)
}

fn pair_selection(ctx: &mut Context, p: &PairArgs) -> Result<PairSelection, CliError> {
    let n_bins = ctx.settings.resolve("bins", p.bins, DEFAULT_BINS).map_err(CliError::config)?;
    let n_reference =
        ctx.settings.resolve("references", p.references, DEFAULT_REFERENCE_WORDS).map_err(CliError::config)?;
    if n_bins == 0 || n_reference == 0 {
        return Err(CliError::config("bins and references must be positive"));
    }
    let pairs = match &p.pairs {
        Some(path) => {
            ctx.inputs.push(path.clone());
            Some(read_word_pairs(path)?)
        }
        None => None,
    };
    Ok(PairSelection { n_reference, seed: ctx.seed, pairs, n_bins })
}

fn num(v: f64) -> String {
    v.to_string()
}

fn regression_rows(backend: &str, models: &[RegressionReport]) -> Vec<Vec<String>> {
    models
        .iter()
        .map(|m| {
            let coef: Vec<String> = m.coefficients.iter().map(|c| num(*c)).collect();
            vec![
                backend.to_string(),
                m.model_kind.name().to_string(),
                m.n.to_string(),
                num(m.r_squared),
                num(m.log_likelihood),
                num(m.bic),
                coef.join(";"),
            ]
        })
        .collect()
}

fn trend_series(label: &str, t: &[TrendPoint], color: usize) -> Series {
    Series {
        label: label.to_string(),
        points: t.iter().map(|p| (p.mean_x, p.mean_y)).collect(),
        color: PALETTE[color % PALETTE.len()].to_string(),
    }
}

fn analyze_concreteness(ctx: &mut Context, a: ConcretenessArgs) -> Result<(), CliError> {
    let (emb, text) = load_tables(ctx, &a.embeddings, a.text_vectors.as_deref())?;
    ctx.inputs.push(a.concreteness.clone());
    let conc: ConcretenessTable = load_concreteness(&a.concreteness).map_err(input_err)?;
    let sel = pair_selection(ctx, &a.pairs)?;
    let res = concreteness_analysis(&emb, &conc, text.as_ref(), &sel)?;
    ctx.ensure_out()?;

    let mut header = vec!["bin", "count", "mean_concreteness_sum", "mean_js"];
    if res.text_trend.is_some() {
        header.push("mean_cos");
    }
    let rows: Vec<Vec<String>> = res
        .color_trend
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut r = vec![i.to_string(), p.count.to_string(), num(p.mean_x), num(p.mean_y)];
            if let Some(t) = &res.text_trend {
                r.push(num(t[i].mean_y));
            }
            r
        })
        .collect();
    write_csv(ctx, "concreteness-trend.csv", &header, &rows)?;
    let mut reg = regression_rows(COLOR_BACKEND, &res.color_models);
    reg.extend(regression_rows(TEXT_BACKEND, &res.text_models));
    write_csv(
        ctx,
        "regression.csv",
        &["backend", "model", "n", "r_squared", "log_likelihood", "bic", "coefficients"],
        &reg,
    )?;
    let cmp: Vec<Vec<String>> = res
        .comparisons
        .iter()
        .map(|c| vec![c.label.clone(), num(c.delta_log_likelihood), num(c.delta_bic)])
        .collect();
    write_csv(ctx, "model-comparison.csv", &["comparison", "delta_log_likelihood", "delta_bic"], &cmp)?;
    ctx.write(
        "concreteness-js.svg",
        line_chart(
            "Color similarity vs. concreteness",
            "summed concreteness",
            "JS divergence (lower = more similar)",
            &[trend_series("color", &res.color_trend, 0)],
        ),
    )?;
    if let Some(t) = &res.text_trend {
        ctx.write(
            "concreteness-cos.svg",
            line_chart(
                "Text similarity vs. concreteness",
                "summed concreteness",
                "cosine similarity",
                &[trend_series("text", t, 1)],
            ),
        )?;
    }
    write_json(ctx, "summary.json", &res)?;
    println!(
        "{} pairs over {} words ({} dropped); color spearman {:.4}",
        res.pairs, res.words_joined, res.words_dropped, res.color_spearman
    );
    for m in &res.color_models {
        println!("color {}: r_squared {:.6}, lnL {:.4}, bic {:.4}", m.model_kind.name(), m.r_squared, m.log_likelihood, m.bic);
    }
    Ok(())
}

fn analyze_trend(ctx: &mut Context, a: TrendArgs) -> Result<(), CliError> {
    let (emb, text) = load_tables(ctx, &a.embeddings, Some(&a.text_vectors))?;
    let text = text.expect("text vectors loaded");
    let sel = pair_selection(ctx, &a.pairs)?;
    let res = similarity_trend(&emb, &text, &sel)?;
    ctx.ensure_out()?;
    let rows: Vec<Vec<String>> = res
        .trend
        .iter()
        .enumerate()
        .map(|(i, p)| vec![i.to_string(), p.count.to_string(), num(p.mean_x), num(p.mean_y)])
        .collect();
    write_csv(ctx, "similarity-trend.csv", &["bin", "count", "mean_cos", "mean_js"], &rows)?;
    ctx.write(
        "similarity-trend.svg",
        line_chart(
            "Color similarity vs. text similarity",
            "cosine similarity",
            "JS divergence (lower = more similar)",
            &[trend_series("color", &res.trend, 0)],
        ),
    )?;
    write_json(ctx, "summary.json", &res)?;
    println!(
        "{} pairs over {} words ({} dropped); spearman {:.4}; JT {} (p increasing {:.3e}, decreasing {:.3e})",
        res.pairs,
        res.words_joined,
        res.words_dropped,
        res.spearman,
        res.jt.statistic,
        res.jt.p,
        res.jt.p_decreasing()
    );
    Ok(())
}

fn parse_dims(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|d| d.trim().parse::<usize>().ok().filter(|&d| d > 0))
        .collect::<Option<Vec<_>>>()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| CliError::config(format!("invalid dims list {s:?}")))
}

#[derive(Serialize)]
struct MetaphorSummary<'a> {
    joined: usize,
    dropped: usize,
    n_train: usize,
    n_test: usize,
    seed: u64,
    js_test: &'a crate::analysis::RankSumResult,
    cos_test: &'a crate::analysis::RankSumResult,
    reports: &'a [crate::analysis::ClassifierReport],
}

fn label_bars(scores: &[PairScore], f: fn(&PairScore) -> f64) -> Vec<Bar> {
    [(false, "literal"), (true, "metaphorical")]
        .iter()
        .enumerate()
        .map(|(k, &(met, name))| {
            let v: Vec<f64> =
                scores.iter().filter(|s| s.label.is_metaphorical() == met).map(f).filter(|x| x.is_finite()).collect();
            let (value, error) = mean_ci95(&v);
            Bar { label: name.to_string(), value, error, color: PALETTE[k].to_string() }
        })
        .collect()
}

fn analyze_metaphor(ctx: &mut Context, a: MetaphorArgs) -> Result<(), CliError> {
    let (emb, text) = load_tables(ctx, &a.embeddings, Some(&a.text_vectors))?;
    let text = text.expect("text vectors loaded");
    ctx.inputs.push(a.pairs.clone());
    let pairs = load_labeled_pairs(&a.pairs).map_err(input_err)?;
    let s = &mut ctx.settings;
    let defaults = MetaphorOptions::default();
    let default_dims: Vec<String> = defaults.dims_sweep.iter().map(|d| d.to_string()).collect();
    let dims = parse_dims(&s.resolve("dims", a.dims, default_dims.join(",")).map_err(CliError::config)?)?;
    let g = GbtParams::default();
    let gbt = GbtParams {
        rounds: s.resolve("rounds", a.rounds, g.rounds).map_err(CliError::config)?,
        max_depth: s.resolve("depth", a.depth, g.max_depth).map_err(CliError::config)?,
        learning_rate: s.resolve("learning_rate", a.learning_rate, g.learning_rate).map_err(CliError::config)?,
        ..g
    };
    let opts = MetaphorOptions { dims_sweep: dims, seed: ctx.seed, gbt, ..defaults };
    let res = metaphor_pipeline(&pairs, &emb, &text, &opts)?;
    ctx.ensure_out()?;

    let rows: Vec<Vec<String>> = res
        .reports
        .iter()
        .map(|r| {
            vec![
                r.embedding_name.clone(),
                r.pca_dims.to_string(),
                r.effective_dims.to_string(),
                num(r.train_accuracy),
                num(r.test_accuracy),
                r.seed.to_string(),
            ]
        })
        .collect();
    write_csv(
        ctx,
        "classifier-reports.csv",
        &["embedding_name", "pca_dims", "effective_dims", "train_accuracy", "test_accuracy", "seed"],
        &rows,
    )?;
    let scores: Vec<Vec<String>> = res
        .scores
        .iter()
        .map(|p| {
            let label = if p.label.is_metaphorical() { "metaphorical" } else { "literal" };
            vec![p.adjective.clone(), p.noun.clone(), label.to_string(), num(p.js), num(p.cos)]
        })
        .collect();
    write_csv(ctx, "pair-similarity.csv", &["adjective", "noun", "label", "js", "cos"], &scores)?;
    let series: Vec<Series> = [COLOR_BACKEND, TEXT_BACKEND]
        .iter()
        .enumerate()
        .map(|(k, name)| Series {
            label: name.to_string(),
            points: res
                .reports
                .iter()
                .filter(|r| r.embedding_name == *name)
                .map(|r| (r.pca_dims as f64, r.test_accuracy))
                .collect(),
            color: PALETTE[k].to_string(),
        })
        .collect();
    ctx.write("accuracy-vs-dims.svg", line_chart("Test accuracy", "PCA dimension", "test accuracy", &series))?;
    ctx.write(
        "similarity-js.svg",
        bar_chart("Color similarity by pair type", "JS divergence (lower = more similar)", &label_bars(&res.scores, |s| s.js)),
    )?;
    ctx.write(
        "similarity-cos.svg",
        bar_chart("Text similarity by pair type", "cosine similarity", &label_bars(&res.scores, |s| s.cos)),
    )?;
    write_json(
        ctx,
        "summary.json",
        &MetaphorSummary {
            joined: res.joined,
            dropped: res.dropped,
            n_train: res.n_train,
            n_test: res.n_test,
            seed: ctx.seed,
            js_test: &res.js_test,
            cos_test: &res.cos_test,
            reports: &res.reports,
        },
    )?;
    println!("{} pairs joined ({} dropped)", res.joined, res.dropped);
    for r in &res.reports {
        println!("{}\t{}\t{:.4}\t{:.4}", r.embedding_name, r.pca_dims, r.train_accuracy, r.test_accuracy);
    }
    Ok(())
}
