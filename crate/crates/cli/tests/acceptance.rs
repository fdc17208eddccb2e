//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Expected values come from oracles in this file (direct basis formulas,
//! closed-form least squares, explicit grid enumeration) rather than from
//! the library's own evaluation paths.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use perceptlet_core::automaton::load_model;
use perceptlet_core::{
    basis_count, fit_boundary, fit_neighborhood, resolution_for, Cbit, PerceptionModel, Perceptlet, RlsState, Sample,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------- oracles

#[derive(Clone, Copy, Debug)]
enum Fam {
    Linear,
    Sin,
}

impl Fam {
    fn lib(self) -> Perceptlet {
        match self {
            Fam::Linear => Perceptlet::Linear,
            Fam::Sin => Perceptlet::Sin,
        }
    }

    fn father(self, x: f64) -> f64 {
        match self {
            Fam::Linear => (1.0 + x) / 2.0,
            Fam::Sin => (1.0 + (FRAC_PI_2 * x).sin()) / 2.0,
        }
    }
}

/// Value of the basis at `(level, center)`, straight from the construction
/// formulas: compress the daughter by `2^(level-2)` around its center.
fn oracle_basis(fam: Fam, level: u32, center: f64, x: f64) -> f64 {
    match level {
        1 if center > 0.0 => fam.father(x),
        1 => 1.0 - fam.father(x),
        _ => {
            let t = 2f64.powi(level as i32 - 2) * (x - center);
            if t.abs() > 1.0 {
                0.0
            } else if t <= 0.0 {
                fam.father(2.0 * t + 1.0)
            } else {
                1.0 - fam.father(2.0 * t - 1.0)
            }
        }
    }
}

/// Centers by the `±(2^(i-2) - 2j + 1) / 2^(i-2)` enumeration.
fn oracle_centers(level: u32) -> Vec<f64> {
    match level {
        1 => vec![-1.0, 1.0],
        2 => vec![0.0],
        i => {
            let s = 2f64.powi(i as i32 - 2);
            let mut out = Vec::new();
            for j in 1..=(1u64 << (i - 3)) {
                let c = (s - 2.0 * j as f64 + 1.0) / s;
                out.push(c);
                out.push(-c);
            }
            out
        }
    }
}

fn oracle_grid(pr: u32) -> Vec<(u32, f64)> {
    (1..=pr)
        .flat_map(|l| oracle_centers(l).into_iter().map(move |c| (l, c)))
        .collect()
}

fn oracle_eval(fam: Fam, weights: &[(u32, f64, f64)], x: f64, k: u32) -> f64 {
    weights
        .iter()
        .filter(|(l, _, _)| *l <= k)
        .map(|&(l, c, w)| w * oracle_basis(fam, l, c, x))
        .sum()
}

fn weights_of(model: &PerceptionModel) -> Vec<(u32, f64, f64)> {
    model
        .weights()
        .iter()
        .map(|(id, &w)| (id.level(), id.center().to_f64(), w))
        .collect()
}

// -------------------------------------------------------------- criteria

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact_representation() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    let mut worst = [0.0f64; 2];
    for pr in 1..=6 {
        let grid = oracle_grid(pr);
        for _ in 0..50 {
            let ys: Vec<f64> = grid.iter().map(|_| rng.gen()).collect();
            let samples: Vec<Sample> = grid
                .iter()
                .zip(&ys)
                .map(|(&(_, x), &y)| Sample::new(x, y).unwrap())
                .collect();
            for (slot, fam) in [Fam::Linear, Fam::Sin].into_iter().enumerate() {
                let (model, _) = fit_boundary(&fam.lib(), &samples, pr).map_err(|e| e.to_string())?;
                let w = weights_of(&model);
                for (&(_, x), &y) in grid.iter().zip(&ys) {
                    worst[slot] = worst[slot].max((oracle_eval(fam, &w, x, pr) - y).abs());
                }
            }
        }
    }
    let elapsed = start.elapsed();
    check(worst[0] <= 1e-12, || format!("linear max error {:e} > 1e-12", worst[0]))?;
    check(worst[1] <= 1e-9, || format!("sin max error {:e} > 1e-9", worst[1]))?;
    check(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "max error linear {:.1e}, sin {:.1e}, {:?}",
        worst[0], worst[1], elapsed
    ))
}

fn epoch_claims() -> Outcome {
    for pr in 1..=6 {
        let samples: Vec<Sample> = oracle_grid(pr)
            .iter()
            .map(|&(_, x)| Sample::new(x, 0.5).unwrap())
            .collect();
        let (_, report) = fit_boundary(&Perceptlet::Sin, &samples, pr).map_err(|e| e.to_string())?;
        check(report.epochs_used == 1, || {
            format!("pr {pr}: ordered stream used {} epochs", report.epochs_used)
        })?;
    }
    let pr = 5;
    let n = basis_count(pr).unwrap();
    let bound = 1 + ((n - 1) as f64).log2() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut samples: Vec<Sample> = oracle_grid(pr)
        .iter()
        .map(|&(_, x)| Sample::new(x, rng.gen()).unwrap())
        .collect();
    let mut most = 0;
    for _ in 0..100 {
        samples.shuffle(&mut rng);
        let (_, report) = fit_boundary(&Perceptlet::Linear, &samples, pr).map_err(|e| e.to_string())?;
        most = most.max(report.epochs_used);
    }
    check(most <= bound, || {
        format!("permuted stream used {most} > {bound} epochs")
    })?;
    Ok(format!("ordered: 1 epoch; permuted N={n}: max {most} <= {bound}"))
}

fn complexity_formulas() -> Outcome {
    let want = [2usize, 3, 5, 9, 17, 33];
    for (pr, &n) in (1..=6).zip(&want) {
        let got = basis_count(pr).map_err(|e| e.to_string())?;
        check(got == n, || format!("basis_count({pr}) = {got}, want {n}"))?;
        check(oracle_grid(pr).len() == n, || {
            format!("grid enumeration at pr {pr} disagrees")
        })?;
        let back = resolution_for(n).map_err(|e| e.to_string())?;
        check(back == pr, || format!("resolution_for({n}) = {back}"))?;
    }
    check(resolution_for(10).is_err(), || "resolution_for(10) accepted".into())?;
    Ok(format!("{want:?}"))
}

fn rls_batch_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut dw, mut dl) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let len = rng.gen_range(1..=200);
        let stream: Vec<(f64, f64)> = (0..len).map(|_| (rng.gen_range(0.05..=1.0), rng.gen())).collect();
        let state = stream.iter().fold(RlsState::Uninitialized, |s, &(a, y)| s.update(a, y));
        let RlsState::Active(est) = state else {
            return Err("state never initialized".into());
        };
        let num: f64 = stream.iter().map(|(a, y)| a * y).sum();
        let den: f64 = stream.iter().map(|(a, _)| a * a).sum();
        dw = dw.max((est.w_hat - num / den).abs());
        dl = dl.max((est.indicator - 1.0 / den).abs());
    }
    check(dw <= 1e-9, || format!("weight deviation {dw:e}"))?;
    check(dl <= 1e-9, || format!("indicator deviation {dl:e}"))?;
    Ok(format!("max |w - batch| {dw:.1e}, max |L - 1/sum b^2| {dl:.1e}"))
}

fn cbit_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let (xa, xb): (f64, f64) = (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        let (a, b) = (Cbit::from_perception(xa).unwrap(), Cbit::from_perception(xb).unwrap());
        let p = |c: Cbit| c.perception().unwrap();
        let sum = |c: Cbit| c.pos().unwrap() + c.neg().unwrap();
        let pa = p(a);
        worst = worst
            .max((p(a.complement()) + pa).abs())
            .max((p(a.or(&b)) - (pa + p(b)) / 2.0).abs())
            .max((p(a.and(&b)) - pa * p(b)).abs())
            .max((sum(a.or(&b)) - 1.0).abs())
            .max((sum(a.and(&b)) - 1.0).abs())
            .max((sum(a.complement()) - 1.0).abs());
    }
    check(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("10000 pairs, max deviation {worst:.1e}"))
}

fn telescoping_and_pinning() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pr = 5;
    let grid = oracle_grid(pr);
    let mut worst = 0.0f64;
    let mut pin = 0.0f64;
    for m in 0..100 {
        let mut text = String::from(r#"{"perceptlet":""#);
        text.push_str(if m % 2 == 0 { "sin" } else { "linear" });
        text.push_str(r#"","pr":5,"version":1,"weights":["#);
        let mut records = Vec::new();
        for &(level, c) in &grid {
            let w: f64 = if level == 1 {
                rng.gen()
            } else {
                rng.gen_range(-1.0..=1.0)
            };
            let den = if level <= 2 { 1 } else { 1u64 << (level - 2) };
            records.push(format!(
                r#"{{"level":{level},"center_num":{},"center_den":{den},"w":{w}}}"#,
                (c * den as f64).round() as i64
            ));
        }
        text.push_str(&records.join(","));
        text.push_str("]}");
        let model = load_model(text.as_bytes()).map_err(|e| e.to_string())?;
        for i in 0..=1000 {
            let x = -1.0 + 2.0 * i as f64 / 1000.0;
            for k in 2..=pr {
                let d = model.evaluate(x, k).unwrap() - model.evaluate(x, k - 1).unwrap();
                worst = worst.max((d - model.level_difference(x, k).unwrap()).abs());
            }
        }
        for x in [-1.0, 1.0] {
            let base = model.evaluate(x, 1).unwrap();
            for k in 2..=pr {
                pin = pin.max((model.evaluate(x, k).unwrap() - base).abs());
            }
        }
    }
    check(worst <= 1e-12, || format!("telescoping deviation {worst:e}"))?;
    check(pin == 0.0, || format!("boundary value moves with level by {pin:e}"))?;
    Ok(format!(
        "max telescoping deviation {worst:.1e}; boundary values level-independent"
    ))
}

fn coefficient_structure() -> Outcome {
    let doc = |ws: [f64; 5]| {
        format!(
            r#"{{"perceptlet":"sin","pr":3,"version":1,"weights":[
                {{"level":1,"center_num":-1,"center_den":1,"w":{}}},
                {{"level":1,"center_num":1,"center_den":1,"w":{}}},
                {{"level":2,"center_num":0,"center_den":1,"w":{}}},
                {{"level":3,"center_num":-1,"center_den":2,"w":{}}},
                {{"level":3,"center_num":1,"center_den":2,"w":{}}}]}}"#,
            ws[0], ws[1], ws[2], ws[3], ws[4]
        )
    };
    let eq81 = [0.8, 0.2, 0.0, -0.062, 0.062];
    let eq82 = [0.5, 0.2, 0.35, 0.088, 0.081];
    let as_oracle = |ws: [f64; 5]| -> Vec<(u32, f64, f64)> {
        vec![
            (1, -1.0, ws[0]),
            (1, 1.0, ws[1]),
            (2, 0.0, ws[2]),
            (3, -0.5, ws[3]),
            (3, 0.5, ws[4]),
        ]
    };
    let m81 = load_model(doc(eq81).as_bytes()).map_err(|e| e.to_string())?;
    let m82 = load_model(doc(eq82).as_bytes()).map_err(|e| e.to_string())?;
    let cases = [
        (&m81, eq81, -1.0, 0.8),
        (&m81, eq81, 1.0, 0.2),
        (&m81, eq81, 0.0, 0.5),
        (&m82, eq82, 0.0, 0.70),
    ];
    for (model, ws, x, want) in cases {
        let oracle = oracle_eval(Fam::Sin, &as_oracle(ws), x, 3);
        check((oracle - want).abs() <= 1e-9, || {
            format!("oracle at {x} gives {oracle}, expected {want}")
        })?;
        let got = model.evaluate(x, 3).map_err(|e| e.to_string())?;
        check((got - want).abs() <= 1e-9, || {
            format!("model at {x} gives {got}, expected {want}")
        })?;
    }
    Ok("f(-1)=0.8, f(+1)=0.2, f(0)=0.5; second model f(0)=0.70".into())
}

fn neighborhood_on_grid() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for pr in 2..=4 {
        for trial in 0..10 {
            let fam = if trial % 2 == 0 {
                Perceptlet::Sin
            } else {
                Perceptlet::Linear
            };
            let samples: Vec<Sample> = oracle_grid(pr)
                .iter()
                .map(|&(_, x)| Sample::new(x, rng.gen()).unwrap())
                .collect();
            let (b, _) = fit_boundary(&fam, &samples, pr).map_err(|e| e.to_string())?;
            let (n, _) = fit_neighborhood(&fam, &samples, pr).map_err(|e| e.to_string())?;
            for (id, &wb) in b.weights() {
                worst = worst.max((wb - n.weight(id)).abs());
            }
        }
    }
    check(worst <= 1e-9, || format!("max weight difference {worst:e}"))?;
    Ok(format!("pr 2..4, max weight difference {worst:.1e}"))
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_perceptlet"))
        .args(args)
        .output()
        .expect("spawn perceptlet");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn cli_end_to_end() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let write = |name: &str, text: &str| std::fs::write(dir.path().join(name), text).unwrap();

    write("square.csv", "x,y\n-1,1\n1,1\n0,0\n-0.5,0.25\n0.5,0.25\n");
    let fit = |input: &str, output: &str| {
        run_cli(&[
            "fit",
            "--input",
            &p(input),
            "--output",
            &p(output),
            "--family",
            "linear",
            "--pr",
            "3",
            "--mode",
            "boundary",
        ])
    };
    let (code, stdout, stderr) = fit("square.csv", "first.json");
    check(code == 0, || format!("fit exited {code}: {stderr}"))?;
    check(stdout.contains(r#""epochs_used":1"#), || format!("report: {stdout}"))?;

    let (code, _, stderr) = run_cli(&["series", "--model", &p("first.json"), "--output", &p("series.csv")]);
    check(code == 0, || format!("series exited {code}: {stderr}"))?;
    let series = std::fs::read_to_string(p("series.csv")).map_err(|e| e.to_string())?;
    let mut refit = String::from("x,y\n");
    for line in series.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        if (cols[0] * 2.0).fract() == 0.0 {
            refit.push_str(&format!("{},{}\n", cols[0], cols[3]));
        }
    }
    write("refit.csv", &refit);
    let (code, _, stderr) = fit("refit.csv", "second.json");
    check(code == 0, || format!("refit exited {code}: {stderr}"))?;

    let load = |name: &str| load_model(std::fs::File::open(p(name)).unwrap()).unwrap();
    let (a, b) = (load("first.json"), load("second.json"));
    let mut worst = 0.0f64;
    for (id, &w) in a.weights() {
        worst = worst.max((w - b.weight(id)).abs());
    }
    check(a.weights().len() == 5 && worst <= 1e-9, || {
        format!("refit weights differ by {worst:e}")
    })?;

    // exit status 1: missing model
    let (code, _, _) = run_cli(&["eval", "--model", &p("absent.json"), "0"]);
    check(code == 1, || format!("missing model exited {code}"))?;
    // exit status 2: bad cell, x out of range, N - 1 not a power of two
    write("bad.csv", "x,y\n-1,0.5\n0,zero\n1,0.5\n");
    let (code, _, stderr) = fit("bad.csv", "bad.json");
    check(code == 2 && stderr.contains("line 3"), || {
        format!("parse error exited {code}: {stderr}")
    })?;
    check(!Path::new(&p("bad.json")).exists(), || "partial output written".into())?;
    let (code, _, _) = run_cli(&["eval", "--model", &p("first.json"), "2"]);
    check(code == 2, || format!("out-of-range x exited {code}"))?;
    let (code, _, _) = run_cli(&["info", "--samples", "10"]);
    check(code == 2, || format!("info --samples 10 exited {code}"))?;
    // exit status 3: incomplete grid
    write("four.csv", "-1,1\n1,1\n0,0\n0.5,0.25\n");
    let (code, _, stderr) = fit("four.csv", "four.json");
    check(code == 3 && stderr.contains("-1/2"), || {
        format!("incomplete grid exited {code}: {stderr}")
    })?;
    check(!Path::new(&p("four.json")).exists(), || "partial output written".into())?;

    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(2), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "refit deviation {worst:.1e}; exit codes 0/1/2/3 observed; {elapsed:?}"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 exact representation on the grid", exact_representation),
        ("2 epoch counts", epoch_claims),
        ("3 basis count / resolution", complexity_formulas),
        ("4 RLS equals batch least squares", rls_batch_equivalence),
        ("5 C-bit algebra identities", cbit_identities),
        ("6 telescoping and boundary pinning", telescoping_and_pinning),
        ("7 three-level coefficient models", coefficient_structure),
        ("8 neighborhood fit on grid equals boundary fit", neighborhood_on_grid),
        ("9 CLI end to end", cli_end_to_end),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
