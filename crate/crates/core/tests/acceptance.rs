//! Acceptance checks, one PASS/FAIL/SKIP line per criterion. Runs without
//! the libtest harness so the lines always appear in `cargo test` output.
//!
//! Criterion 11 needs real data and is skipped unless these variables point
//! at the files: CHROMALEX_EMBEDDINGS, CHROMALEX_CONCRETENESS,
//! CHROMALEX_TEXT_VECTORS, CHROMALEX_METAPHOR_PAIRS.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use chromalex::analysis::metaphor::{load_labeled_pairs, MetaphorOptions};
use chromalex::analysis::similarity::{concreteness_analysis, PairSelection};
use chromalex::analysis::{
    compare_models, fit_regression, gbt_predict, gbt_train, jonckheere_terpstra, metaphor_pipeline, pca_fit,
    pca_transform, spearman, wilcoxon_rank_sum, GbtParams, ModelKind,
};
use chromalex::colorspace::{jzazbz_to_srgb, srgb_to_jzazbz, SrgbPixel, AZ_RANGE, BZ_RANGE, JZ_RANGE};
use chromalex::embedding::{histogram_jzazbz, js_divergence, BinGrid, ColorDistribution, NUM_BINS};
use chromalex::imaging::{compose_colorgram, SrgbImage};
use chromalex::store::{load_concreteness, load_embeddings, load_text_vectors};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = 0usize;
    for _ in 0..10_000 {
        let p = SrgbPixel::new(rng.gen(), rng.gen(), rng.gen());
        bad += usize::from(jzazbz_to_srgb(srgb_to_jzazbz(p)) != p);
    }
    for v in 0..=255u8 {
        for p in [SrgbPixel::new(v, 0, 0), SrgbPixel::new(0, v, 0), SrgbPixel::new(0, 0, v)] {
            bad += usize::from(jzazbz_to_srgb(srgb_to_jzazbz(p)) != p);
        }
    }
    let elapsed = start.elapsed();
    ensure(bad == 0, || format!("{bad} pixels failed to round-trip"))?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("10000 random + 768 sweep pixels exact in {elapsed:.2?}"))
}

fn range_violations(levels: &[u8]) -> Vec<(SrgbPixel, [f64; 3])> {
    let inside = |v: f64, r: (f64, f64)| v >= r.0 && v <= r.1;
    let mut out = Vec::new();
    for &r in levels {
        for &g in levels {
            for &b in levels {
                let p = SrgbPixel::new(r, g, b);
                let c = srgb_to_jzazbz(p);
                if !(inside(c.jz, JZ_RANGE) && inside(c.az, AZ_RANGE) && inside(c.bz, BZ_RANGE)) {
                    out.push((p, c.to_array()));
                }
            }
        }
    }
    out
}

fn criterion_2() -> Check {
    let stride8: Vec<u8> = (0..32).map(|i| (i * 8) as u8).collect();
    let v = range_violations(&stride8);
    ensure(v.is_empty(), || format!("{} lattice points out of range, first {:?}", v.len(), v[0]))?;
    // endpoint-inclusive lattice, reported only: the rounded ranges clip a
    // few gamut corners by < 4e-4
    let with_ends: Vec<u8> = (0..32).map(|i| ((i * 255 + 15) / 31) as u8).collect();
    let e = range_violations(&with_ends);
    let worst = e
        .iter()
        .map(|(_, c)| {
            let over = |v: f64, r: (f64, f64)| (r.0 - v).max(v - r.1).max(0.0);
            over(c[0], JZ_RANGE).max(over(c[1], AZ_RANGE)).max(over(c[2], BZ_RANGE))
        })
        .fold(0.0, f64::max);
    Ok(format!(
        "stride-8 32^3 lattice: 0 violations; endpoint-inclusive lattice: {} corner violations, max excess {worst:.1e}",
        e.len()
    ))
}

fn random_distribution(rng: &mut ChaCha8Rng) -> ColorDistribution {
    loop {
        let mut m = [0.0; NUM_BINS];
        for v in &mut m {
            if rng.gen_bool(0.7) {
                *v = rng.gen_range(0.0..1.0);
            }
        }
        let s: f64 = m.iter().sum();
        if s > 0.0 {
            return ColorDistribution::new(m.map(|v| v / s)).unwrap();
        }
    }
}

/// The divergence written out directly from its definition.
fn js_direct(p: &[f64; NUM_BINS], q: &[f64; NUM_BINS]) -> f64 {
    let mut kl_p = 0.0;
    let mut kl_q = 0.0;
    for i in 0..NUM_BINS {
        let m = 0.5 * (p[i] + q[i]);
        if p[i] > 0.0 {
            kl_p += p[i] * (p[i] / m).ln();
        }
        if q[i] > 0.0 {
            kl_q += q[i] * (q[i] / m).ln();
        }
    }
    0.5 * kl_p + 0.5 * kl_q
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ln2 = std::f64::consts::LN_2;
    for _ in 0..1000 {
        let (p, q, r) = (random_distribution(&mut rng), random_distribution(&mut rng), random_distribution(&mut rng));
        let (pq, qp) = (js_divergence(&p, &q), js_divergence(&q, &p));
        ensure(pq >= 0.0 && pq <= ln2, || format!("JS {pq} outside [0, ln 2]"))?;
        ensure((pq - qp).abs() <= 1e-12, || format!("asymmetric: {pq} vs {qp}"))?;
        ensure(js_divergence(&p, &p) == 0.0, || "JS(p, p) != 0".into())?;
        if p != q {
            ensure(pq > 0.0, || "JS of distinct distributions is 0".into())?;
        }
        let (d_pr, d_pq, d_qr) = (js_divergence(&p, &r).sqrt(), pq.sqrt(), js_divergence(&q, &r).sqrt());
        ensure(d_pr <= d_pq + d_qr + 1e-12, || format!("triangle violated: {d_pr} > {d_pq} + {d_qr}"))?;
    }
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (p, q) = (random_distribution(&mut rng), random_distribution(&mut rng));
        worst = worst.max((js_divergence(&p, &q) - js_direct(p.mass(), q.mass())).abs());
    }
    ensure(worst <= 1e-12, || format!("oracle deviation {worst:e}"))?;
    let disjoint = js_divergence(&ColorDistribution::point(0), &ColorDistribution::point(7));
    ensure((disjoint - ln2).abs() <= 1e-12, || format!("disjoint JS {disjoint}"))?;
    Ok(format!("1000 triples hold the metric properties; oracle max deviation {worst:.1e}"))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let grid = BinGrid::CANONICAL;
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let (w, h) = (rng.gen_range(1..=48), rng.gen_range(1..=48));
        let img = SrgbImage::from_fn(w, h, |_, _| SrgbPixel::new(rng.gen(), rng.gen(), rng.gen()));
        let d = histogram_jzazbz(&img.to_jzazbz(), &grid);
        ensure(d.mass().iter().all(|&v| v >= 0.0), || "negative bin mass".into())?;
        worst = worst.max((d.mass().iter().sum::<f64>() - 1.0).abs());
    }
    ensure(worst <= 1e-9, || format!("mass off by {worst:e}"))?;
    Ok(format!("500 images, max |mass - 1| = {worst:.1e}"))
}

fn max_channel_error(img: &SrgbImage, want: impl Fn(usize, usize) -> SrgbPixel) -> i32 {
    let mut worst = 0;
    for y in 0..img.height() {
        for x in 0..img.width() {
            let (a, b) = (img.get(x, y).channels(), want(x, y).channels());
            for k in 0..3 {
                worst = worst.max((a[k] as i32 - b[k] as i32).abs());
            }
        }
    }
    worst
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let base = SrgbImage::from_fn(300, 300, |_, _| SrgbPixel::new(rng.gen(), rng.gen(), rng.gen()));
    let cg = compose_colorgram(&vec![base.clone(); 6]).map_err(|e| e.to_string())?;
    let e1 = max_channel_error(&cg.image, |x, y| base.get(x, y));
    ensure(e1 <= 1, || format!("identical images drift by {e1}"))?;
    let pair = [SrgbImage::filled(300, 300, SrgbPixel::BLACK), SrgbImage::filled(300, 300, SrgbPixel::WHITE)];
    let cg = compose_colorgram(&pair).map_err(|e| e.to_string())?;
    // midpoint of black and white in JzAzBz, inverted independently:
    // (123.68, 123.64, 123.63)
    let e2 = max_channel_error(&cg.image, |_, _| SrgbPixel::new(124, 124, 124));
    ensure(e2 <= 1, || format!("black+white colorgram off by {e2}: {:?}", cg.image.get(0, 0)))?;
    Ok(format!("identical-image error {e1}, black+white error {e2}"))
}

fn criterion_6() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = tmp.path();
    let words = common::fixture_corpus(&d.join("src"));
    std::fs::write(d.join("words.txt"), words.join("\n") + "\n").map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_chromalex");
    let run = |args: &[&str]| -> Result<(), String> {
        let o = Command::new(bin).current_dir(d).args(args).output().map_err(|e| e.to_string())?;
        ensure(o.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr)))
    };
    let start = Instant::now();
    run(&["--threads", "1", "--out", "ingest", "ingest", "words.txt", "--source-dir", "src", "--cache", "cache"])?;
    run(&["--threads", "1", "--out", "a", "embed", "words.txt", "--cache", "cache"])?;
    let elapsed = start.elapsed();
    run(&["--threads", "1", "--out", "b", "embed", "words.txt", "--cache", "cache"])?;
    let a = std::fs::read(d.join("a/embeddings.json")).map_err(|e| e.to_string())?;
    let b = std::fs::read(d.join("b/embeddings.json")).map_err(|e| e.to_string())?;
    ensure(a == b, || "embedding JSON differs between runs".into())?;
    ensure(elapsed < Duration::from_secs(30), || format!("pipeline took {elapsed:?}"))?;
    Ok(format!("byte-identical {} B JSON; 5x10 pipeline in {elapsed:.2?} on one thread", a.len()))
}

fn criterion_7() -> Check {
    let x: Vec<f64> = (0..100).map(|i| i as f64 / 10.0).collect();
    let y: Vec<f64> = x.iter().map(|v| 0.7 - 1.3 * v).collect();
    let lin = fit_regression(&x, &y, ModelKind::Linear).map_err(|e| e.to_string())?;
    ensure((lin.r_squared - 1.0).abs() <= 1e-9, || format!("planted r_squared {}", lin.r_squared))?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..100 {
        let n = rng.gen_range(8..80);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| (1.5 * v).sin() + rng.gen_range(-0.4..0.4)).collect();
        let l = fit_regression(&x, &y, ModelKind::Linear).map_err(|e| e.to_string())?;
        let p = fit_regression(&x, &y, ModelKind::Poly3).map_err(|e| e.to_string())?;
        ensure(p.r_squared >= l.r_squared - 1e-12, || format!("dataset {k}: POLY3 {} < LINEAR {}", p.r_squared, l.r_squared))?;
    }

    // both models fit the planted line exactly, so their likelihoods agree
    // and the BIC gap is the two extra parameters' penalty
    let cubic = fit_regression(&x, &y, ModelKind::Poly3).map_err(|e| e.to_string())?;
    let (dl, db) = compare_models(&cubic, &lin).map_err(|e| e.to_string())?;
    let want = 2.0 * 100f64.ln();
    ensure(dl.abs() <= 1e-9, || format!("delta lnL {dl}"))?;
    ensure((db - want).abs() <= 1e-9, || format!("delta BIC {db} vs {want}"))?;
    Ok(format!("planted r_squared {:.12}; 100 nested fits ordered; delta BIC {db:.9}", lin.r_squared))
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix, descending.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[i][j] * a[i][j];
                }
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (kp, kq) = (a[k][p], a[k][q]);
                    a[k][p] = c * kp - s * kq;
                    a[k][q] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (a[p][k], a[q][k]);
                    a[p][k] = c * pk - s * qk;
                    a[q][k] = s * pk + c * qk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let data: Vec<Vec<f64>> = (0..40).map(|_| (0..6).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect();
    let m = pca_fit(&data).map_err(|e| e.to_string())?;
    let t = pca_transform(&m, &data, 6).map_err(|e| e.to_string())?;
    let mut iso: f64 = 0.0;
    for i in 0..data.len() {
        for j in 0..i {
            iso = iso.max((dist(&data[i], &data[j]) - dist(&t[i], &t[j])).abs());
        }
    }
    ensure(iso <= 1e-9, || format!("distance drift {iso:e}"))?;

    let plane: Vec<Vec<f64>> = (0..30)
        .map(|_| {
            let (s, u): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            vec![1.0 + s - u, 0.5 * s, 2.0 + u, s + 2.0 * u, -1.0]
        })
        .collect();
    let m = pca_fit(&plane).map_err(|e| e.to_string())?;
    let back = m.inverse_transform(&pca_transform(&m, &plane, 2).map_err(|e| e.to_string())?);
    let rec = plane.iter().zip(&back).map(|(a, b)| dist(a, b)).fold(0.0, f64::max);
    ensure(rec < 1e-9, || format!("reconstruction error {rec:e}"))?;

    let fixed: Vec<Vec<f64>> = [[2.5, 0.5, 1.2], [0.5, 0.7, -0.3], [2.2, 2.9, 0.8], [1.9, 2.2, 1.1], [3.1, 3.0, -0.4]]
        .iter()
        .map(|r| r.to_vec())
        .collect();
    let mean: Vec<f64> = (0..3).map(|j| fixed.iter().map(|r| r[j]).sum::<f64>() / 5.0).collect();
    let cov: Vec<Vec<f64>> = (0..3)
        .map(|i| (0..3).map(|j| fixed.iter().map(|r| (r[i] - mean[i]) * (r[j] - mean[j])).sum::<f64>() / 4.0).collect())
        .collect();
    let want = jacobi_eigenvalues(cov);
    let got = pca_fit(&fixed).map_err(|e| e.to_string())?.eigenvalues;
    let eig = got.iter().zip(&want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    ensure(eig <= 1e-8, || format!("eigenvalues {got:?} vs {want:?}"))?;
    Ok(format!("isometry {iso:.1e}, reconstruction {rec:.1e}, eigenvalue deviation {eig:.1e}"))
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x: Vec<Vec<f64>> = (0..100)
        .map(|i| {
            let c = if i % 2 == 0 { 2.5 } else { -2.5 };
            vec![c + rng.gen_range(-1.0..1.0), -c + rng.gen_range(-1.0..1.0)]
        })
        .collect();
    let y: Vec<bool> = (0..100).map(|i| i % 2 == 0).collect();
    let m = gbt_train(&x, &y, &GbtParams::default()).map_err(|e| e.to_string())?;
    let train_acc = chromalex::analysis::gbt::accuracy(&gbt_predict(&m, &x), &y);
    ensure(train_acc == 1.0, || format!("blob training accuracy {train_acc}"))?;
    ensure(m.training_loss.windows(2).all(|w| w[1] <= w[0]), || "training loss increased".into())?;

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let fx = common::metaphor_fixture(tmp.path(), 40, 9);
    let pairs = load_labeled_pairs(&fx.pairs).map_err(|e| e.to_string())?;
    let colors = load_embeddings(&fx.embeddings).map_err(|e| e.to_string())?;
    let text = load_text_vectors(&fx.text_vectors).map_err(|e| e.to_string())?;
    let opts = MetaphorOptions { dims_sweep: vec![2, 3, 4, 8, 12, 16], seed: 2024, ..MetaphorOptions::default() };
    let out = metaphor_pipeline(&pairs, &colors, &text, &opts).map_err(|e| e.to_string())?;
    let color: Vec<_> = out.reports.iter().filter(|r| r.embedding_name == "color").collect();
    ensure(color.len() == 6, || "missing color reports".into())?;
    for r in &color {
        ensure(r.test_accuracy == 1.0, || format!("dims {}: test accuracy {}", r.pca_dims, r.test_accuracy))?;
    }
    Ok(format!(
        "blobs fit exactly over {} monotone rounds; separable pairs test accuracy 1.0 at dims 2-16",
        m.training_loss.len() - 1
    ))
}

fn brute_force_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let u_of = |mask: u32| {
        let mut u = 0.0;
        for i in (0..n).filter(|i| mask >> i & 1 == 1) {
            for j in (0..n).filter(|j| mask >> j & 1 == 0) {
                u += if pooled[i] > pooled[j] { 1.0 } else if pooled[i] == pooled[j] { 0.5 } else { 0.0 };
            }
        }
        u
    };
    let obs = u_of((1u32 << a.len()) - 1);
    let (mut le, mut ge, mut total) = (0.0, 0.0, 0.0);
    for mask in (0u32..1 << n).filter(|m| m.count_ones() as usize == a.len()) {
        let u = u_of(mask);
        total += 1.0;
        if u <= obs {
            le += 1.0;
        }
        if u >= obs {
            ge += 1.0;
        }
    }
    (2.0 * f64::min(le, ge) / total).min(1.0)
}

fn criterion_10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut cases = 0;
    for na in 1..=6 {
        for nb in 1..=6 {
            for trial in 0..3 {
                let span = [3, 6, 1000][trial];
                let a: Vec<f64> = (0..na).map(|_| rng.gen_range(0..span) as f64).collect();
                let b: Vec<f64> = (0..nb).map(|_| rng.gen_range(0..span) as f64).collect();
                let got = wilcoxon_rank_sum(&a, &b).map_err(|e| e.to_string())?;
                let want = brute_force_p(&a, &b);
                ensure((got.p_two_sided - want).abs() <= 1e-12, || {
                    format!("{a:?} vs {b:?}: p {} vs {want}", got.p_two_sided)
                })?;
                cases += 1;
            }
        }
    }
    let up = jonckheere_terpstra(&[vec![1.0], vec![2.0], vec![3.0]]).map_err(|e| e.to_string())?;
    let down = jonckheere_terpstra(&[vec![3.0], vec![2.0], vec![1.0]]).map_err(|e| e.to_string())?;
    ensure(up.statistic == 3.0 && down.statistic == 0.0, || format!("JT {} / {}", up.statistic, down.statistic))?;
    Ok(format!("{cases} exact p-values match enumeration; JT 3 and 0"))
}

fn env_path(name: &str) -> Option<PathBuf> {
    std::env::var_os(name).map(PathBuf::from).filter(|p| p.is_file())
}

fn criterion_11() -> Result<Verdict, String> {
    let vars = ["CHROMALEX_EMBEDDINGS", "CHROMALEX_CONCRETENESS", "CHROMALEX_TEXT_VECTORS", "CHROMALEX_METAPHOR_PAIRS"];
    let paths: Vec<Option<PathBuf>> = vars.iter().map(|v| env_path(v)).collect();
    let missing: Vec<&str> = vars.iter().zip(&paths).filter(|(_, p)| p.is_none()).map(|(v, _)| *v).collect();
    if !missing.is_empty() {
        return Ok(Verdict::Skip(format!("dataset not available (unset: {})", missing.join(", "))));
    }
    let p: Vec<PathBuf> = paths.into_iter().flatten().collect();
    let start = Instant::now();
    let colors = load_embeddings(&p[0]).map_err(|e| e.to_string())?;
    let conc = load_concreteness(&p[1]).map_err(|e| e.to_string())?;
    let text = load_text_vectors(&p[2]).map_err(|e| e.to_string())?;
    let pairs = load_labeled_pairs(&p[3]).map_err(|e| e.to_string())?;

    let res = concreteness_analysis(&colors, &conc, None, &PairSelection::default()).map_err(|e| e.to_string())?;
    let x: Vec<f64> = res.color_trend.iter().map(|t| t.mean_x).collect();
    let sim: Vec<f64> = res.color_trend.iter().map(|t| -t.mean_y).collect();
    let rho = spearman(&x, &sim).map_err(|e| e.to_string())?;
    let r2 = res.color_models[0].r_squared;

    let opts = MetaphorOptions { dims_sweep: (1..=16).collect(), seed: 0, ..MetaphorOptions::default() };
    let out = metaphor_pipeline(&pairs, &colors, &text, &opts).map_err(|e| e.to_string())?;
    let js_of = |met: bool| -> Vec<f64> {
        out.scores.iter().filter(|s| s.label.is_metaphorical() == met).map(|s| s.js).collect()
    };
    let (lit, met) = (js_of(false), js_of(true));
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let best = out.reports.iter().filter(|r| r.embedding_name == "color").map(|r| r.test_accuracy).fold(0.0, f64::max);
    let elapsed = start.elapsed();

    let checks = [
        (rho < -0.9, format!("(a) similarity-vs-concreteness spearman {rho:.3}")),
        (r2 >= 0.9, format!("(b) linear r_squared {r2:.3}")),
        (
            mean(&lit) > mean(&met) && out.js_test.p_two_sided < 0.01,
            format!("(c) literal JS {:.4} vs metaphorical {:.4}, p {:.2e}", mean(&lit), mean(&met), out.js_test.p_two_sided),
        ),
        ((best - 0.92).abs() <= 0.05, format!("(d) limiting color test accuracy {best:.3}")),
        (elapsed < Duration::from_secs(1800), format!("runtime {elapsed:.0?}")),
    ];
    let detail: Vec<String> = checks.iter().map(|(ok, s)| format!("{s}{}", if *ok { "" } else { " [miss]" })).collect();
    if checks.iter().all(|(ok, _)| *ok) {
        Ok(Verdict::Pass(detail.join("; ")))
    } else {
        Ok(Verdict::Fail(detail.join("; ")))
    }
}

fn main() {
    // libtest flags such as --list or filters are accepted and ignored
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: Vec<(&str, Box<dyn Fn() -> Result<Verdict, String>>)> = vec![
        ("colorspace round-trip", Box::new(|| criterion_1().map(Verdict::Pass))),
        ("gamut range", Box::new(|| criterion_2().map(Verdict::Pass))),
        ("JS divergence metric suite", Box::new(|| criterion_3().map(Verdict::Pass))),
        ("histogram normalization", Box::new(|| criterion_4().map(Verdict::Pass))),
        ("colorgram fixtures", Box::new(|| criterion_5().map(Verdict::Pass))),
        ("embedding determinism", Box::new(|| criterion_6().map(Verdict::Pass))),
        ("regression suite", Box::new(|| criterion_7().map(Verdict::Pass))),
        ("PCA", Box::new(|| criterion_8().map(Verdict::Pass))),
        ("classifier", Box::new(|| criterion_9().map(Verdict::Pass))),
        ("rank tests", Box::new(|| criterion_10().map(Verdict::Pass))),
        ("dataset reproduction (conditional)", Box::new(criterion_11)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let verdict = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(Ok(v)) => v,
            Ok(Err(e)) => Verdict::Fail(e),
            Err(p) => {
                let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
                Verdict::Fail(format!("panicked: {}", msg.unwrap_or_default()))
            }
        };
        let n = i + 1;
        match verdict {
            Verdict::Pass(d) => println!("PASS criterion {n:>2} {name}: {d}"),
            Verdict::Skip(d) => println!("SKIP criterion {n:>2} {name}: {d}"),
            Verdict::Fail(d) => {
                failed += 1;
                println!("FAIL criterion {n:>2} {name}: {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
