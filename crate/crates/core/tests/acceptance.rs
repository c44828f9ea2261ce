//! Acceptance suite. Prints one line per criterion and exits non-zero if
//! any hard check fails.
//!
//! Criteria 8 and 9 compare benchmark accuracies against published
//! figures. Those accuracy targets are reported on their line as PASS or
//! FAIL but do not fail the run; their runtime budgets, well-formed
//! outputs and rerun determinism do.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde_json::Value;

use lapdict::lapdl::{bcgd_with_observer, f_rho, grad_atom_block, init_lap_atoms, BcgdOptions, LapAtomDictionary};
use lapdict::linalg::gaussian_matrix;
use lapdict::rng::seeded;
use lapdict::sbo::{procrustes_update, sbo_represent, BlockUnion};
use lapdict::sparse::{normalize_columns, omp2d, project_simplex_type, select_threshold};

struct Outcome {
    /// Checks whose failure fails the run.
    hard: bool,
    /// Published-accuracy targets, reported only.
    targets: bool,
    detail: String,
}

impl Outcome {
    fn check(pass: bool, detail: String) -> Self {
        Outcome { hard: pass, targets: true, detail }
    }
}

// ---------------------------------------------------------------- oracles

/// Projection onto the row set by enumerating which coordinates sit at zero.
fn brute_projection(v: &[f64], ell: usize) -> Vec<f64> {
    let m = v.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << m) {
        let free: Vec<usize> = (0..m).filter(|&j| mask & (1 << j) == 0).collect();
        let mut d = vec![0.0; m];
        if !free.is_empty() {
            let mean = free.iter().map(|&j| v[j]).sum::<f64>() / free.len() as f64;
            for &j in &free {
                d[j] = v[j] - mean;
            }
        }
        let feasible = d.iter().enumerate().all(|(j, &x)| if j == ell { x >= -1e-15 } else { x <= 1e-15 });
        if !feasible {
            continue;
        }
        let dist: f64 = d.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum();
        if best.as_ref().is_none_or(|(b, _)| dist < *b) {
            best = Some((dist, d));
        }
    }
    best.expect("zero is always feasible").1
}

/// Textbook OMP: largest correlation first (lowest index on ties), least
/// squares refit on the chosen columns. Atoms already in the span of the
/// support are skipped, so rank-deficient dictionaries stop early.
fn reference_omp(d: &DMatrix<f64>, y: &DVector<f64>, s: usize) -> (Vec<usize>, Vec<f64>) {
    let mut support: Vec<usize> = Vec::new();
    let mut coef = DVector::zeros(0);
    let mut r = y.clone();
    let mut skipped = vec![false; d.ncols()];
    let fit = |support: &[usize], target: &DVector<f64>| {
        let sub = DMatrix::from_columns(&support.iter().map(|&k| d.column(k)).collect::<Vec<_>>());
        let c = sub.clone().svd(true, true).solve(target, 1e-14).unwrap();
        let resid = target - sub * &c;
        (c, resid)
    };
    while support.len() < s {
        let c = d.tr_mul(&r);
        let mut order: Vec<usize> = (0..d.ncols()).filter(|j| !skipped[*j] && c[*j] != 0.0).collect();
        order.sort_by(|&a, &b| c[b].abs().total_cmp(&c[a].abs()));
        let mut chosen = None;
        for j in order {
            skipped[j] = true;
            let atom = d.column(j).into_owned();
            let independent = support.is_empty() || fit(&support, &atom).1.norm() > 1e-10;
            if independent {
                chosen = Some(j);
                break;
            }
        }
        let Some(j) = chosen else { break };
        support.push(j);
        (coef, r) = fit(&support, y);
    }
    (support, coef.iter().copied().collect())
}

fn random_orthogonal(m: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let qr = gaussian_matrix(m, m, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for k in 0..m {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    q
}

// ---------------------------------------------------------------- 1..7

fn criterion_1() -> Outcome {
    let mut rng = seeded(101);
    let mut dev: f64 = 0.0;
    let mut idem: f64 = 0.0;
    for _ in 0..10_000 {
        let m = rng.random_range(1..=12);
        let ell = rng.random_range(0..m);
        let scale = 10f64.powf(rng.random_range(-2.0..2.0));
        let v: Vec<f64> = (0..m).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
        let p = project_simplex_type(&v, ell);
        let q = brute_projection(&v, ell);
        dev = dev.max(p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        let pp = project_simplex_type(&p, ell);
        idem = idem.max(p.iter().zip(&pp).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    Outcome::check(
        dev <= 1e-8 && idem <= 1e-12,
        format!("projection vs enumeration oracle, 10000 cases: max dev {dev:.1e}, idempotence {idem:.1e}"),
    )
}

fn feasible_point(m: usize, n: usize, rng: &mut impl Rng) -> LapAtomDictionary {
    let mut atoms = DMatrix::zeros(m * m, n);
    for i in 0..n {
        for ell in 0..m {
            let v: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = project_simplex_type(&v, ell);
            atoms.column_mut(i).rows_mut(ell * m, m).copy_from_slice(&p);
        }
    }
    LapAtomDictionary::new(m, atoms).unwrap()
}

fn criterion_2() -> Outcome {
    let mut rng = seeded(202);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let m = rng.random_range(2..=6);
        let n = rng.random_range(1..=5);
        let big_n = rng.random_range(1..=8);
        let rho = 10f64.powf(rng.random_range(-1.0..3.0));
        let d = feasible_point(m, n, &mut rng);
        let x = gaussian_matrix(n, big_n, &mut rng);
        let y = gaussian_matrix(m * m, big_n, &mut rng);
        let i = rng.random_range(0..n);
        let ell = rng.random_range(0..m);
        let g = grad_atom_block(&d, &x, &y, rho, i, ell);
        let mut fd = DVector::zeros(m);
        for k in 0..m {
            let row = ell * m + k;
            let shifted = |delta: f64| {
                let mut a = d.atoms().clone();
                a[(row, i)] += delta;
                f_rho(&LapAtomDictionary::new(m, a).unwrap(), &x, &y, rho)
            };
            fd[k] = (shifted(h) - shifted(-h)) / (2.0 * h);
        }
        let rel = (&g - &fd).norm() / g.norm().max(1e-8);
        worst = worst.max(rel);
    }
    Outcome::check(worst <= 1e-6, format!("block gradient vs central differences, 100 points: max rel err {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let mut rng = seeded(303);
    let (m, n, big_n) = (6, 8, 30);
    let mut d = init_lap_atoms(m, n, &mut rng).unwrap();
    let mut x = DMatrix::zeros(n, big_n);
    for c in 0..big_n {
        for _ in 0..3 {
            x[(rng.random_range(0..n), c)] = rng.random_range(-2.0..2.0);
        }
    }
    let y = gaussian_matrix(m * m, big_n, &mut rng);
    let opts = BcgdOptions { iters: 10_000, rho: 100.0, grad_tol: 0.0 };
    let mut prev = f_rho(&d, &x, &y, opts.rho);
    let start = prev;
    let mut worst_rise = f64::NEG_INFINITY;
    let mut worst_defect: f64 = 0.0;
    let mut steps = 0;
    bcgd_with_observer(&mut d, &x, &y, &opts, &mut seeded(304), |d, _, _| {
        let f = f_rho(d, &x, &y, opts.rho);
        worst_rise = worst_rise.max(f - prev);
        worst_defect = worst_defect.max(d.feasibility_defect());
        prev = f;
        steps += 1;
    });
    Outcome::check(
        steps == 10_000 && worst_rise <= 1e-10 && worst_defect <= 1e-10,
        format!(
            "BCGD over {steps} steps: f {start:.3} -> {prev:.3}, max rise {worst_rise:.1e}, max defect {worst_defect:.1e}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = seeded(404);
    let (m, s) = (6, 2);
    let mut beaten = 0;
    for _ in 0..1000 {
        let q = random_orthogonal(m, &mut rng);
        let y = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
        let code = select_threshold(q.tr_mul(&y).as_slice(), s);
        let err = (&y - code.synthesize(&q)).norm_squared();
        for a in 0..m {
            for b in (a + 1)..m {
                let sub = DMatrix::from_columns(&[q.column(a), q.column(b)]);
                let coef = sub.clone().svd(true, true).solve(&y, 1e-14).unwrap();
                let best = (&y - sub * coef).norm_squared();
                if best < err - 1e-12 {
                    beaten += 1;
                }
            }
        }
    }
    Outcome::check(beaten == 0, format!("thresholding vs all 15 supports, 1000 trials: beaten {beaten} times"))
}

fn criterion_5() -> Outcome {
    let mut rng = seeded(505);
    let mut mismatched = 0;
    let mut dev: f64 = 0.0;
    for _ in 0..500 {
        let (m1, m2) = (rng.random_range(1..=5), rng.random_range(1..=5));
        let (n1, n2) = (rng.random_range(1..=7), rng.random_range(1..=7));
        let s = rng.random_range(1..=3).min(m1 * m2);
        let d1 = normalize_columns(&gaussian_matrix(m1, n1, &mut rng), &mut rng).0;
        let d2 = normalize_columns(&gaussian_matrix(m2, n2, &mut rng), &mut rng).0;
        let y = gaussian_matrix(m1, m2, &mut rng);
        let code = omp2d(&d1, &d2, &y, s, 0.0).unwrap();
        let (support, values) = reference_omp(&d2.kronecker(&d1), &DVector::from_column_slice(y.as_slice()), s);
        if code.support != support {
            mismatched += 1;
            continue;
        }
        dev = dev.max(code.values.iter().zip(&values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    Outcome::check(
        mismatched == 0 && dev <= 1e-10,
        format!("2D OMP vs OMP on the Kronecker dictionary, 500 trials: {mismatched} support mismatches, max dev {dev:.1e}"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = seeded(606);
    let mut beaten = 0;
    let mut planted: f64 = 0.0;
    for _ in 0..100 {
        let m = rng.random_range(2..=6);
        let big_n = rng.random_range(m..=3 * m);
        let x = gaussian_matrix(m, big_n, &mut rng);
        let y = gaussian_matrix(m, big_n, &mut rng);
        let q = procrustes_update(&y, &x).unwrap();
        let best = (&y - &q * &x).norm();
        for _ in 0..10_000 {
            let r = random_orthogonal(m, &mut rng);
            if (&y - r * &x).norm() < best - 1e-12 {
                beaten += 1;
            }
        }
        let q0 = random_orthogonal(m, &mut rng);
        let q = procrustes_update(&(&q0 * &x), &x).unwrap();
        planted = planted.max((q - q0).amax());
    }
    Outcome::check(
        beaten == 0 && planted <= 1e-10,
        format!("Procrustes vs 10^4 random rotations x 100: beaten {beaten} times, planted map error {planted:.1e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = seeded(707);
    let mut wrong = 0;
    let mut identity: f64 = 0.0;
    for _ in 0..1000 {
        let m = rng.random_range(2..=8);
        let k = rng.random_range(1..=6);
        let s = rng.random_range(1..=m);
        let blocks: Vec<_> = (0..k).map(|_| random_orthogonal(m, &mut rng)).collect();
        let union = BlockUnion::for_class(blocks.clone(), 0).unwrap();
        let y = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
        let errors: Vec<f64> = blocks
            .iter()
            .map(|q| {
                let code = select_threshold(q.tr_mul(&y).as_slice(), s);
                let err = (&y - code.synthesize(q)).norm_squared();
                identity = identity.max((err - (y.norm_squared() - code.energy())).abs());
                err
            })
            .collect();
        let min = errors.iter().copied().fold(f64::INFINITY, f64::min);
        let (j, code) = sbo_represent(&union, &y, s).unwrap();
        let err = (&y - code.synthesize(&blocks[j])).norm_squared();
        if err > min + 1e-10 {
            wrong += 1;
        }
    }
    Outcome::check(
        wrong == 0 && identity <= 1e-10,
        format!("block choice vs exhaustive error, 1000 unions: {wrong} suboptimal, energy identity dev {identity:.1e}"),
    )
}

// ---------------------------------------------------------------- benches

/// Run `lapdict bench` and move its output to `work/name`. Every run uses
/// the same config file and output path so reruns are comparable.
fn bench(config: &str, work: &Path, name: &str) -> f64 {
    let config_path = work.join("config.json");
    let out = work.join("run");
    fs::write(&config_path, config).unwrap();
    let t = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_lapdict"))
        .arg("bench")
        .arg("--config")
        .arg(&config_path)
        .arg("--out")
        .arg(&out)
        .output()
        .expect("running lapdict");
    assert!(status.status.success(), "bench failed: {}", String::from_utf8_lossy(&status.stderr));
    let secs = t.elapsed().as_secs_f64();
    fs::rename(&out, work.join(name)).unwrap();
    secs
}

fn accuracies(out: &Path) -> BTreeMap<String, f64> {
    let reports: Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    reports
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["method"].as_str().unwrap().to_string(), r["accuracy"].as_f64().unwrap()))
        .collect()
}

fn files_under(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push(path.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

/// Files that differ between two run directories. Wall-clock timings are
/// the only output allowed to vary.
fn differing(a: &Path, b: &Path) -> Vec<String> {
    let fa = files_under(a);
    let fb = files_under(b);
    if fa != fb {
        return vec!["file lists".to_string()];
    }
    fa.iter()
        .filter(|f| f.as_os_str() != "timings.json")
        .filter(|f| fs::read(a.join(f)).unwrap() != fs::read(b.join(f)).unwrap())
        .map(|f| f.display().to_string())
        .collect()
}

const EXP1: &str = r#"{"experiment":"exp1","scale":0.2,"seed":1}"#;
const EXP2: &str = r#"{"experiment":"exp2","scale":0.2,"seed":1}"#;

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn fmt_acc(acc: &BTreeMap<String, f64>) -> String {
    acc.iter().map(|(m, a)| format!("{m} {:.2}%", 100.0 * a)).collect::<Vec<_>>().join(", ")
}

fn criterion_8(work: &Path) -> Outcome {
    let secs = bench(EXP1, work, "exp1_a");
    let acc = accuracies(&work.join("exp1_a"));
    let (lap, sep, src) = (acc["lapdl"], acc["sepdl"], acc["src"]);
    let targets = lap >= 0.80 && sep >= 0.80 && src >= 0.80 && lap >= src - 0.02 && sep >= src - 0.02;
    Outcome {
        hard: secs <= 3600.0,
        targets,
        detail: format!("exp1 scale 0.2 in {secs:.0}s: {}; accuracy targets {}", fmt_acc(&acc), verdict(targets)),
    }
}

fn criterion_9(work: &Path) -> Outcome {
    let secs = bench(EXP2, work, "exp2_a");
    bench(EXP2, work, "exp2_b");
    let acc = accuracies(&work.join("exp2_a"));
    let (sbo, src) = (acc["sbo"], acc["src"]);
    let targets = sbo >= 0.97 && src >= 0.97 && (sbo - src).abs() <= 0.015;
    let sweep_a = fs::read(work.join("exp2_a/sweep.csv")).unwrap();
    let sweep_b = fs::read(work.join("exp2_b/sweep.csv")).unwrap();
    let rows = String::from_utf8_lossy(&sweep_a).lines().count().saturating_sub(1);
    Outcome {
        hard: secs <= 1800.0 && sweep_a == sweep_b && rows == 9,
        targets,
        detail: format!(
            "exp2 scale 0.2 in {secs:.0}s: {}; sweep {rows} rows, rerun {}; accuracy targets {}",
            fmt_acc(&acc),
            if sweep_a == sweep_b { "identical" } else { "DIFFERS" },
            verdict(targets)
        ),
    }
}

fn criterion_10(work: &Path) -> Outcome {
    bench(EXP1, work, "exp1_b");
    let mut diffs = differing(&work.join("exp1_a"), &work.join("exp1_b"));
    diffs.extend(differing(&work.join("exp2_a"), &work.join("exp2_b")));
    let files = files_under(&work.join("exp1_a")).len() + files_under(&work.join("exp2_a")).len();
    Outcome::check(
        diffs.is_empty(),
        if diffs.is_empty() {
            format!("two runs of each bench byte-identical ({files} files compared)")
        } else {
            format!("differing outputs: {}", diffs.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let work = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let suites: Vec<(usize, Box<dyn Fn() -> Outcome>)> = vec![
        (1, Box::new(criterion_1)),
        (2, Box::new(criterion_2)),
        (3, Box::new(criterion_3)),
        (4, Box::new(criterion_4)),
        (5, Box::new(criterion_5)),
        (6, Box::new(criterion_6)),
        (7, Box::new(criterion_7)),
    ];
    let mut failed = 0;
    let mut short = 0;
    let mut report = |k: usize, o: Outcome| {
        println!("criterion {k:>2}: {}  {}", verdict(o.hard && o.targets), o.detail);
        if !o.hard {
            failed += 1;
        } else if !o.targets {
            short += 1;
        }
    };
    for (k, f) in suites {
        report(k, f());
    }
    println!("oracle suites took {:.1}s", t.elapsed().as_secs_f64());
    report(8, criterion_8(work.path()));
    report(9, criterion_9(work.path()));
    report(10, criterion_10(work.path()));
    if short > 0 {
        println!("{short} criteria short of their accuracy targets only");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
