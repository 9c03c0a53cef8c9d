//! One line per acceptance criterion; exits non-zero if any fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use ikit_core::axioms::verify_axioms;
use ikit_core::decompose::{mixed_faithfulness_error, Objective};
use ikit_core::interactions::faithfulness_error;
use ikit_core::lattice::{self, dense, LatticeVector, Subset};
use ikit_core::shapley::{self, oracle};
use ikit_core::synthetic::{brute_force_and, brute_force_or, generate_game, random_game, random_planted_spec};
use ikit_core::{and_interactions, decompose, or_interactions, DecomposerConfig, ValueTable};

// Pinned tolerances and budgets.
const FAITHFUL_RTOL: f64 = 1e-9;
const FAITHFUL_SECS: f64 = 5.0;
const BRUTE_TOL: f64 = 1e-12;
const AXIOM_SECS: f64 = 10.0;
const BRIDGE_TOL: f64 = 1e-9;
const BRIDGE_SECS: f64 = 30.0;
const PLANTED_SLACK: f64 = 1e-3;
const MIXED_RATIO: f64 = 0.05;
const DECOMPOSE_SECS: f64 = 60.0;
const GRADIENT_RTOL: f64 = 1e-5;
const TRANSFORM_SECS: f64 = 1.0;
const MIN_SPEEDUP: f64 = 100.0;

type Outcome = Result<String, String>;
type Transform = fn(&mut [f64]);
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn seeded_games() -> impl Iterator<Item = ValueTable> {
    (0..50u64).map(|seed| random_game(3 + (seed as usize % 8), 10.0, seed).unwrap())
}

fn faithfulness(and: bool) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for vt in seeded_games() {
        let i = if and { and_interactions(&vt) } else { or_interactions(&vt) }.unwrap();
        worst = worst.max(faithfulness_error(&vt, &i).unwrap() / vt.scale());
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= FAITHFUL_RTOL && secs < FAITHFUL_SECS,
        format!("50 games n=3..10, max relative error {worst:.2e} (≤ {FAITHFUL_RTOL:e}), {secs:.3} s"),
    )
}

fn uniqueness() -> Outcome {
    let mut worst = 0.0f64;
    let mut games = 0;
    for seed in 0..60u64 {
        let n = 1 + (seed as usize % 6);
        let vt = random_game(n, 10.0, seed).unwrap();
        let pairs = [
            (and_interactions(&vt).unwrap(), brute_force_and(&vt).unwrap()),
            (or_interactions(&vt).unwrap(), brute_force_or(&vt).unwrap()),
        ];
        for (fast, slow) in pairs {
            for (a, b) in fast.effects.as_slice().iter().zip(slow.effects.as_slice()) {
                worst = worst.max((a - b).abs());
            }
        }
        games += 1;
    }
    check(worst <= BRUTE_TOL, format!("{games} games n=1..6, max |fast - brute force| {worst:.2e} (≤ {BRUTE_TOL:e})"))
}

fn axioms() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for seed in 0..50u64 {
        let n = 3 + (seed as usize % 6);
        let vt = if seed % 2 == 0 {
            random_game(n, 10.0, seed).unwrap()
        } else {
            generate_game(&random_planted_spec(n, 6, 0.01, seed).unwrap()).unwrap().0
        };
        let perm: Vec<usize> = (0..n).rev().collect();
        let report = verify_axioms(&vt, &[], &perm, seed).unwrap();
        for c in &report.checks {
            worst = worst.max(c.max_deviation / vt.scale());
            if !c.passed || !c.applicable {
                failures.push(format!("seed {seed} {:?}", c.axiom));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        failures.is_empty() && secs < AXIOM_SECS,
        format!("7 axioms x 50 games n=3..8, max relative deviation {worst:.2e}, {secs:.3} s{}", fail_list(&failures)),
    )
}

fn fail_list(f: &[String]) -> String {
    if f.is_empty() {
        String::new()
    } else {
        format!(", failures: {}", f.join("; "))
    }
}

fn bridges() -> Outcome {
    let start = Instant::now();
    let (mut shap, mut sii, mut st, mut complete) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for seed in 0..16u64 {
        let n = 1 + (seed as usize % 8);
        let vt = random_game(n, 10.0, seed).unwrap();
        let s = vt.scale();
        let phi = shapley::shapley_values(&vt).unwrap();
        for (a, b) in phi.phi.iter().zip(oracle::permutation_shapley(&vt).unwrap()) {
            shap = shap.max((a - b).abs() / s);
        }
        for t in 1..(1u32 << n) {
            let t = Subset(t);
            let d = shapley::shapley_interaction_index(&vt, t).unwrap() - oracle::direct_interaction_index(&vt, t).unwrap();
            sii = sii.max(d.abs() / s);
        }
        for k in 1..=n {
            let table = shapley::shapley_taylor(&vt, k).unwrap();
            let total = oracle::pairwise_sum(&table.entries.values().copied().collect::<Vec<_>>());
            complete = complete.max((total - vt.full_value()).abs() / s);
            for (&t, &x) in &table.entries {
                st = st.max((x - oracle::direct_shapley_taylor(&vt, k, t).unwrap()).abs() / s);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let worst = shap.max(sii).max(st).max(complete);
    check(
        worst <= BRIDGE_TOL && secs < BRIDGE_SECS,
        format!(
            "n=1..8: Shapley {shap:.1e}, interaction index {sii:.1e}, Shapley-Taylor {st:.1e}, completeness {complete:.1e} (≤ {BRIDGE_TOL:e}), {secs:.3} s"
        ),
    )
}

fn decomposer() -> Outcome {
    let mut failures = Vec::new();
    let mut slowest = 0.0f64;
    let mut worst_excess = f64::NEG_INFINITY;
    for seed in 0..20u64 {
        let spec = random_planted_spec(8, 8, 0.01, seed).unwrap();
        let (vt, _) = generate_game(&spec).unwrap();
        let start = Instant::now();
        let r = decompose(&vt, &DecomposerConfig::default()).unwrap();
        let secs = start.elapsed().as_secs_f64();
        slowest = slowest.max(secs);
        let excess = r.final_objective - spec.planted_l1();
        worst_excess = worst_excess.max(excess);
        let mixed = mixed_faithfulness_error(&vt, &r).unwrap();
        let budget = MIXED_RATIO * (vt.full_value() - vt.empty_value()).abs();
        if excess > PLANTED_SLACK || mixed > budget || secs >= DECOMPOSE_SECS {
            failures.push(format!("seed {seed}: excess {excess:.3e}, mixed {mixed:.3e}/{budget:.3e}, {secs:.2} s"));
        }
    }
    check(
        failures.is_empty(),
        format!(
            "20 planted games n=8, max (objective - planted L1) {worst_excess:.3e} (≤ {PLANTED_SLACK:e}), slowest {slowest:.3} s{}",
            fail_list(&failures)
        ),
    )
}

fn gradient() -> Outcome {
    let h = 1e-7;
    let mut worst = 0.0f64;
    let mut points = 0;
    for seed in 0..6u64 {
        let n = 1 + seed as usize;
        let vt = random_game(n, 5.0, seed).unwrap();
        let tau = DecomposerConfig::default().tau(&vt).unwrap();
        let mut obj = Objective::new(&vt, tau.clone()).unwrap();
        let dim = 1 << n;
        let mut draw = 0u64;
        let mut found = 0;
        while found < 20 {
            draw += 1;
            let p = random_game(n, 3.0, 1000 * seed + draw).unwrap().values().as_slice().to_vec();
            let e = random_game(n, 0.5, 7777 + 1000 * seed + draw).unwrap();
            let eps: Vec<f64> = e.values().as_slice().iter().zip(&tau).map(|(u, t)| u * t).collect();
            if !differentiable(&vt, &p, &eps) {
                continue;
            }
            found += 1;
            let (_, g_p, g_e) = obj.value_and_subgradient(&p, &eps).unwrap();
            for i in 0..dim {
                let fd = |obj: &mut Objective, along_p: bool| {
                    let (mut up_p, mut up_e, mut dn_p, mut dn_e) = (p.clone(), eps.clone(), p.clone(), eps.clone());
                    if along_p {
                        up_p[i] += h;
                        dn_p[i] -= h;
                    } else {
                        up_e[i] += h;
                        dn_e[i] -= h;
                    }
                    (obj.value(&up_p, &up_e).unwrap() - obj.value(&dn_p, &dn_e).unwrap()) / (2.0 * h)
                };
                worst = worst.max((fd(&mut obj, true) - g_p[i]).abs() / g_p[i].abs().max(1.0));
                worst = worst.max((fd(&mut obj, false) - g_e[i]).abs() / g_e[i].abs().max(1.0));
            }
        }
        points += found;
    }
    check(
        worst <= GRADIENT_RTOL,
        format!("{points} points over n=1..6, max relative error {worst:.2e} (≤ {GRADIENT_RTOL:e})"),
    )
}

// Every interaction entry at least 1e-3 from zero, and ε strictly inside its box.
fn differentiable(vt: &ValueTable, p: &[f64], eps: &[f64]) -> bool {
    let v = vt.values().as_slice();
    let mut a: Vec<f64> = (0..v.len()).map(|i| 0.5 * (v[i] + eps[i]) + p[i]).collect();
    let mut b: Vec<f64> = (0..v.len()).map(|i| 0.5 * (v[i] + eps[i]) - p[i]).collect();
    lattice::apply_t_and_in_place(&mut a);
    lattice::apply_t_or_in_place(&mut b);
    let tau = DecomposerConfig::default().tau(vt).unwrap();
    a.iter().chain(&b).all(|x| x.abs() >= 1e-3) && eps.iter().zip(&tau).all(|(e, t)| e.abs() + 1e-6 < *t)
}

fn best_of(reps: usize, mut f: impl FnMut()) -> f64 {
    (0..reps)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

fn performance() -> Outcome {
    let v = LatticeVector::from_fn(20, |s| ((s.0 as f64) * 0.618_033_988_749_895).fract() - 0.5).unwrap();
    let mut buf = v.as_slice().to_vec();
    let ops: [(&str, Transform); 4] = [
        ("T_and", lattice::apply_t_and_in_place),
        ("T_or", lattice::apply_t_or_in_place),
        ("T_and^T", lattice::apply_t_and_transpose_in_place),
        ("T_or^T", lattice::apply_t_or_transpose_in_place),
    ];
    let mut slowest = 0.0f64;
    for (_, op) in ops {
        let t = Instant::now();
        buf.copy_from_slice(v.as_slice());
        op(&mut buf);
        slowest = slowest.max(t.elapsed().as_secs_f64());
    }
    let small = LatticeVector::from_fn(12, |s| v.as_slice()[s.mask()]).unwrap();
    let matrix = dense::t_and(12).unwrap();
    let dense_secs = best_of(3, || {
        std::hint::black_box(matrix.matvec(small.as_slice()));
    });
    let mut sbuf = small.as_slice().to_vec();
    let fast_secs = best_of(20, || {
        sbuf.copy_from_slice(small.as_slice());
        lattice::apply_t_and_in_place(std::hint::black_box(&mut sbuf));
    });
    let speedup = dense_secs / fast_secs;
    check(
        slowest < TRANSFORM_SECS && speedup >= MIN_SPEEDUP,
        format!("n=20 slowest transform {slowest:.4} s (< {TRANSFORM_SECS} s); n=12 speedup {speedup:.0}x (≥ {MIN_SPEEDUP}x)"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let spec = random_planted_spec(7, 6, 0.01, 5).unwrap();
    let (vt, _) = generate_game(&spec).unwrap();
    let input = dir.path().join("game.json");
    vt.write_file(&input).unwrap();
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_ikit"))
            .args(["decompose", "--in"])
            .arg(&input)
            .arg("--out")
            .arg(&out)
            .args(["--tau-ratio", "0.05", "--seed", "3"])
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("ikit decompose exited with {status}"));
        }
        std::fs::read(Path::new(&out)).map_err(|e| e.to_string())
    };
    let (a, b) = (run("a.json")?, run("b.json")?);
    check(a == b, format!("two decompose runs, {} bytes, identical = {}", a.len(), a == b))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("AND faithfulness", || faithfulness(true)),
        ("OR faithfulness", || faithfulness(false)),
        ("uniqueness vs brute force", uniqueness),
        ("axiom suite", axioms),
        ("Shapley bridges", bridges),
        ("decomposer on planted games", decomposer),
        ("subgradient vs finite differences", gradient),
        ("transform performance", performance),
        ("decompose determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
