//! One PASS/FAIL line per acceptance criterion.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use retrieval::input::{TaskKind, Theorem};
use retrieval::suites::run_suite;
use retrieval::verify::verify_report;
use retrieval::{parse_input, run, RunConfig, RunOptions};
use retrieval_core::frame::does_norm_retrieval;
use retrieval_core::fusion::{coordinate_nr_decision, t13_sign_condition, FusionFrame, NrYes};
use retrieval_core::linalg::exact::projection_matrix;
use retrieval_core::matrix::norm_sq;
use retrieval_core::perturbation::nr_failure_stability_experiment;
use retrieval_core::scalar::{int, ratio, Mode, Rational};
use retrieval_core::{Decision, SearchOptions, SubspaceBasis};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
}

fn load(path: &Path) -> (Vec<u8>, RunConfig) {
    let bytes = std::fs::read(path).expect("readable corpus file");
    let config = parse_input(std::str::from_utf8(&bytes).expect("utf-8")).expect("valid corpus file");
    (bytes, config)
}

fn e(n: usize, i: usize) -> Vec<Rational> {
    (0..n).map(|j| int((i == j) as i64)).collect()
}

fn v(xs: &[i64]) -> Vec<Rational> {
    xs.iter().copied().map(int).collect()
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    if t <= limit {
        Ok(t)
    } else {
        Err(format!("took {t:.2?}, limit {limit:?}"))
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn counterexample() -> Outcome {
    let start = Instant::now();
    let (bytes, config) = load(&corpus_dir().join("fusion-counterexample.json"));
    let report = run(&config, &bytes, RunOptions::default());
    let task = &report.json["tasks"][0];
    check(task["task"] == "fusion-nr" && task["outcome"] == "CertifiedNo", || {
        format!("fusion-nr returned {}", task["outcome"])
    })?;
    let verified = verify_report(&config, &bytes, &report.json);
    check(verified.ok() && verified.checked >= 1, || {
        format!("witness re-check: {verified:?}")
    })?;

    let ff = FusionFrame::unweighted(3, vec![vec![e(3, 1), e(3, 2)], vec![e(3, 0), e(3, 2)]]).expect("planes");
    let (x, y) = (v(&[2, 2, 1]), v(&[1, 1, 2]));
    check(ff.measurements(&x) == vec![int(5), int(5)], || {
        format!("P_i x: {:?}", ff.measurements(&x))
    })?;
    check(ff.measurements(&y) == vec![int(5), int(5)], || {
        format!("P_i y: {:?}", ff.measurements(&y))
    })?;
    check(norm_sq(&x) == int(9) && norm_sq(&y) == int(6), || {
        "norms of x, y".into()
    })?;
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!(
        "CertifiedNo, witness verified, |P_i x|^2 = |P_i y|^2 = 5, |x|^2 = 9, |y|^2 = 6 ({t:.0?})"
    ))
}

fn indicator_gap() -> Outcome {
    let start = Instant::now();
    let ff = FusionFrame::unweighted(
        4,
        vec![
            vec![e(4, 0), e(4, 3)],
            vec![e(4, 1), e(4, 3)],
            vec![e(4, 2), e(4, 3)],
            vec![e(4, 3)],
        ],
    )
    .expect("axis frame");
    let Decision::CertifiedYes(NrYes::IndicatorRowSpace(c)) = coordinate_nr_decision(&ff).map_err(|e| e.to_string())?
    else {
        return Err("coordinate rule did not certify".into());
    };
    let supports = ff.coordinate_supports().expect("axis aligned");
    let row_sum: Vec<Rational> = (0..4)
        .map(|k| {
            supports
                .iter()
                .zip(&c)
                .filter(|(s, _)| s.contains(&k))
                .map(|(_, ci)| ci.clone())
                .sum()
        })
        .collect();
    check(row_sum == vec![int(1); 4], || {
        format!("coefficients {c:?} sum to {row_sum:?}")
    })?;
    let sign = t13_sign_condition(&ff, &SearchOptions::default()).map_err(|e| e.to_string())?;
    check(sign.is_none(), || format!("sign condition found: {sign:?}"))?;
    let t = within(start, Duration::from_secs(1))?;
    let shown: Vec<String> = c.iter().map(|x| x.to_string()).collect();
    Ok(format!(
        "CertifiedYes with coefficients [{}], sign condition NotFound ({t:.0?})",
        shown.join(", ")
    ))
}

fn plane_projection() -> Outcome {
    let start = Instant::now();
    let w = SubspaceBasis::span_of(3, &[v(&[1, 1, 0]), v(&[0, 0, 1])]).map_err(|e| e.to_string())?;
    let p = projection_matrix(&w).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..100 {
        let x: Vec<Rational> = (0..3)
            .map(|_| ratio(rng.random_range(-1000..=1000), rng.random_range(1..=97)))
            .collect();
        let half = (&x[0] + &x[1]) / int(2);
        let expected = vec![half.clone(), half, x[2].clone()];
        let got = p.mul_vec(&x).map_err(|e| e.to_string())?;
        check(got == expected, || format!("input {case}: {x:?} -> {got:?}"))?;
    }
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!("100/100 inputs map to ((a+b)/2, (a+b)/2, c) exactly ({t:.0?})"))
}

fn suite(theorem: Theorem, samples: usize, seed: u64, mode: Mode, limit: Duration) -> Outcome {
    let start = Instant::now();
    let r = run_suite(theorem, samples, seed, mode, &SearchOptions::default()).map_err(|e| e.to_string())?;
    let t = within(start, limit)?;
    check(r.passed, || format!("suite failed: {}", r.details))?;
    Ok(format!("{} ({t:.1?})", r.details))
}

fn full_spark_pr() -> Outcome {
    suite(Theorem::FullSparkPr, 200, 1, Mode::Exact, Duration::from_secs(60))
}

fn orthogonality() -> Outcome {
    suite(Theorem::Tt, 500, 2, Mode::Exact, Duration::from_secs(60))
}

fn s_operator() -> Outcome {
    suite(Theorem::SOperator, 1000, 3, Mode::float(), Duration::from_secs(30))
}

fn invariance() -> Outcome {
    suite(Theorem::Invariance, 100, 4, Mode::Exact, Duration::from_secs(60))
}

fn non_density() -> Outcome {
    let start = Instant::now();
    let opts = SearchOptions::default();
    let (mut frames, mut total, mut failing) = (0, 0, 0);
    for path in corpus_files() {
        let (_, config) = load(&path);
        let Some(frame) = &config.frame else { continue };
        let samples = config.tasks.iter().find_map(|t| match t.kind {
            TaskKind::PerturbNrStability { samples } => Some(samples),
            _ => None,
        });
        let Some(samples) = samples else { continue };
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        check(frame.len() + 2 <= 2 * frame.dim(), || format!("{name}: m > 2n - 2"))?;
        check(
            does_norm_retrieval(frame, &opts).map_err(|e| e.to_string())?.kind()
                == retrieval_core::Verdict::CertifiedNo,
            || format!("{name}: frame does norm retrieval"),
        )?;
        let r = nr_failure_stability_experiment(frame, samples, config.seed, &opts).map_err(|e| e.to_string())?;
        frames += 1;
        total += r.samples;
        failing += r.still_failing;
    }
    let t = within(start, Duration::from_secs(300))?;
    check(frames == 20 && total == 4000, || {
        format!("{frames} frames, {total} perturbations")
    })?;
    check(failing == total, || {
        format!("{failing}/{total} still fail norm retrieval")
    })?;
    Ok(format!(
        "{frames} frames, {failing}/{total} perturbed frames CertifiedNo ({t:.1?})"
    ))
}

fn determinism() -> Outcome {
    let start = Instant::now();
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-determinism");
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let files = corpus_files();
    for path in &files {
        let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
        let mut outputs = Vec::new();
        for jobs in [1, 8] {
            let out = dir.join(format!("{stem}.jobs{jobs}.json"));
            let status = Command::new(env!("CARGO_BIN_EXE_retrieval"))
                .arg("--input")
                .arg(path)
                .args(["--seed", "11", "--jobs", &jobs.to_string(), "--output"])
                .arg(&out)
                .status()
                .map_err(|e| e.to_string())?;
            check(status.success(), || {
                format!("{stem}: exit status {status} with jobs = {jobs}")
            })?;
            outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        check(outputs[0] == outputs[1], || {
            format!("{stem}: reports differ between jobs = 1 and 8")
        })?;
    }
    Ok(format!(
        "{} corpus reports byte-identical for jobs 1 and 8 ({:.1?})",
        files.len(),
        start.elapsed()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("fusion counterexample reproduction", counterexample),
        ("indicator row space versus sign condition", indicator_gap),
        ("projection onto span{(1,1,0),(0,0,1)}", plane_projection),
        ("full spark and phase retrieval in R^3", full_spark_pr),
        ("norm retrieval of independent sets and orthogonality", orthogonality),
        ("S-operator perturbation bounds", s_operator),
        ("stability of norm retrieval failure", non_density),
        ("scaling, unitary and weight invariance", invariance),
        ("report determinism across job counts", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
