//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use discop::special::euler_polynomial;
use discop::spectrum::spectrum;
use discop::verify::{convolve_exponential, convolve_fundamental, convolve_monomial, root_weighted_fundamental_sum};
use discop::{
    build_characteristic_polynomial, construct, leading_coefficient, run_verification, Dd, DiscreteOperator, Error,
    OperatorSpec,
};

const GRID_M: [usize; 3] = [1, 2, 3];
const GRID_H: [f64; 3] = [0.1, 0.5, 1.0];
const BETA: i64 = 20;
const TOL: f64 = 1e-8;

/// Worst residual and worst route discrepancy of one identity family.
type Family = Result<(f64, f64), Error>;

fn operator(m: usize, h: f64) -> Result<DiscreteOperator<Dd>, Error> {
    construct(&OperatorSpec::new(m, h)?)
}

fn delta_family(m: usize, h: f64) -> Family {
    let op = operator(m, h)?;
    let (mut res, mut disc) = (0f64, 0f64);
    for beta in -BETA..=BETA {
        let c = convolve_fundamental(&op, beta)?;
        let delta = if beta == 0 { Dd::ONE } else { Dd::ZERO };
        res = res.max((c.value - delta).abs().to_f64());
        disc = disc.max(c.discrepancy);
    }
    Ok((res, disc))
}

fn exponential_family(m: usize, h: f64) -> Family {
    let op = operator(m, h)?;
    let (mut res, mut disc) = (0f64, 0f64);
    for sign in [1, -1] {
        for beta in -BETA..=BETA {
            let c = convolve_exponential(&op, sign, beta)?;
            res = res.max(c.value.abs().to_f64() / (h * beta.abs() as f64).exp());
            disc = disc.max(c.discrepancy);
        }
    }
    Ok((res, disc))
}

fn monomial_family(m: usize, h: f64) -> Family {
    let op = operator(m, h)?;
    let (mut res, mut disc) = (0f64, 0f64);
    for n in 0..=(2 * m).saturating_sub(3) {
        if m < 2 {
            break;
        }
        for beta in -BETA..=BETA {
            let c = convolve_monomial(&op, n, beta)?;
            let norm = (h * beta.abs() as f64).powi(n as i32).max(1.0);
            res = res.max(c.value.abs().to_f64() / norm);
            disc = disc.max(c.discrepancy);
        }
    }
    Ok((res, disc))
}

fn root_sum_family(m: usize, h: f64) -> Family {
    let op = operator(m, h)?;
    let (mut res, mut disc) = (0f64, 0f64);
    for k in 0..op.terms().len() {
        let c = root_weighted_fundamental_sum(&op, k)?;
        res = res.max(c.value.re.to_f64().hypot(c.value.im.to_f64()));
        disc = disc.max(c.discrepancy);
    }
    Ok((res, disc))
}

/// Runs `family` over the grid; passes when every point has residual below
/// `TOL`.
fn residual_sweep(ms: &[usize], family: fn(usize, f64) -> Family) -> (bool, String) {
    let start = Instant::now();
    let mut worst = 0f64;
    let mut bad = Vec::new();
    for &m in ms {
        for h in GRID_H {
            match family(m, h) {
                Ok((r, _)) => {
                    worst = worst.max(r);
                    if !(r < TOL) {
                        bad.push(format!("({m},{h}) residual {r:.2e}"));
                    }
                }
                Err(e) => bad.push(format!("({m},{h}) {e}")),
            }
        }
    }
    summary(bad, format!("worst residual {worst:.2e}, {:.2}s", start.elapsed().as_secs_f64()))
}

fn summary(bad: Vec<String>, good: String) -> (bool, String) {
    if bad.is_empty() {
        (true, good)
    } else {
        (false, format!("{}; {good}", bad.join("; ")))
    }
}

fn criterion_1() -> (bool, String) {
    residual_sweep(&GRID_M, delta_family)
}

fn criterion_2() -> (bool, String) {
    residual_sweep(&GRID_M, exponential_family)
}

fn criterion_3() -> (bool, String) {
    residual_sweep(&[2, 3], monomial_family)
}

fn criterion_4() -> (bool, String) {
    residual_sweep(&[2, 3], root_sum_family)
}

fn criterion_5() -> (bool, String) {
    let mut bad = Vec::new();
    let mut worst = 0f64;
    for h in GRID_H {
        let op = match construct::<f64>(&OperatorSpec::new(1, h).unwrap()) {
            Ok(op) => op,
            Err(e) => {
                bad.push(format!("h={h}: {e}"));
                continue;
            }
        };
        let expect = [(0, -2.0 * h.cosh() / h.sinh()), (1, 1.0 / h.sinh()), (-1, 1.0 / h.sinh())];
        for (beta, want) in expect {
            let rel = ((op.evaluate(beta) - want) / want).abs();
            worst = worst.max(rel);
            if !(rel < 1e-12) {
                bad.push(format!("h={h} β={beta} rel {rel:.2e}"));
            }
        }
        if (2..=5).any(|b| op.evaluate(b) != 0.0) {
            bad.push(format!("h={h}: nonzero value beyond |β| = 1"));
        }
    }
    summary(bad, format!("worst relative error {worst:.2e}"))
}

fn criterion_6() -> (bool, String) {
    let mut bad = Vec::new();
    for m in 2..=6 {
        for h in [0.05, 0.1, 0.5, 1.0] {
            let spec = OperatorSpec::new(m, h).unwrap();
            let cp = match build_characteristic_polynomial::<Dd>(&spec) {
                Ok(cp) => cp,
                Err(e) => {
                    bad.push(format!("({m},{h}) {e}"));
                    continue;
                }
            };
            let c = cp.poly().coeffs();
            let scale = cp.poly().max_abs_coeff().to_f64();
            let skew = (0..c.len()).map(|i| (c[i] - c[c.len() - 1 - i]).abs().to_f64()).fold(0.0, f64::max);
            if c.len() != 2 * m - 1 || skew > 1e-28 * scale {
                bad.push(format!("({m},{h}) not self-reciprocal"));
            }
            let lead: Dd = leading_coefficient(&spec);
            if ((lead - cp.poly().leading()) / lead).abs().to_f64() > 1e-25 {
                bad.push(format!("({m},{h}) leading coefficient disagrees"));
            }
            let sp = match spectrum(&cp) {
                Ok(sp) => sp,
                Err(e) => {
                    bad.push(format!("({m},{h}) {e}"));
                    continue;
                }
            };
            if sp.interior().len() != m - 1 {
                bad.push(format!("({m},{h}) {} interior roots", sp.interior().len()));
            }
            for (a, b) in sp.interior().iter().zip(sp.exterior()) {
                let p = a * b;
                let off = (p.re - Dd::ONE).to_f64().hypot(p.im.to_f64());
                if !(off < 1e-8) {
                    bad.push(format!("({m},{h}) reciprocal pairing off by {off:.2e}"));
                }
            }
            let ratio = sp.convergence_ratio(h);
            if !(ratio < 1.0) {
                bad.push(format!("({m},{h}) max|λ|e^h = {ratio:.4}"));
            }
        }
    }
    summary(bad, "20 points checked".to_string())
}

/// `E_k = (1−λ)^{k+2}/λ · (λ d/dλ)^k [λ/(1−λ)²]`, tracking the numerator
/// of `N/(1−λ)^a`: `D(N/(1−λ)^a) = λ(N′(1−λ) + aN)/(1−λ)^{a+1}`.
fn euler_by_derivatives(k: usize) -> Vec<i128> {
    let mut n: Vec<i128> = vec![0, 1];
    let mut a: i128 = 2;
    for _ in 0..k {
        let mut next = vec![0i128; n.len() + 1];
        for (i, &c) in n.iter().enumerate() {
            // λ·N′·(1−λ): i c λ^i − i c λ^{i+1}
            let d = i as i128 * c;
            next[i] += d;
            next[i + 1] -= d;
            // λ·a·N
            next[i + 1] += a * c;
        }
        n = next;
        a += 1;
    }
    while n.len() > 1 && *n.last().unwrap() == 0 {
        n.pop();
    }
    n.remove(0);
    n
}

fn criterion_7() -> (bool, String) {
    let mut bad = Vec::new();
    let mut fact: i128 = 1;
    for k in 0..=10usize {
        fact *= k as i128 + 1;
        let e = match euler_polynomial(k) {
            Ok(e) => e,
            Err(err) => {
                bad.push(format!("k={k}: {err}"));
                continue;
            }
        };
        let c = e.coeffs();
        if c.len() != k + 1 || c.iter().zip(c.iter().rev()).any(|(a, b)| a != b) {
            bad.push(format!("k={k}: not palindromic"));
        }
        if c.iter().any(|&x| x <= 0) {
            bad.push(format!("k={k}: nonpositive coefficient"));
        }
        if c.iter().sum::<i128>() != fact {
            bad.push(format!("k={k}: E_k(1) ≠ (k+1)!"));
        }
        let d = euler_by_derivatives(k);
        let eval = |p: &[i128], x: f64| p.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64);
        for s in 0..20 {
            let x = -3.0 + 6.0 * (s as f64 + 0.5) / 20.0;
            let (u, v) = (eval(c, x), eval(&d, x));
            if !(((u - v) / v.abs().max(f64::MIN_POSITIVE)).abs() < 1e-10) {
                bad.push(format!("k={k} x={x}: {u} vs {v}"));
                break;
            }
        }
    }
    summary(bad, "k = 0..=10, 20 sample points each".to_string())
}

fn criterion_8() -> (bool, String) {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut worst = 0f64;
    let families: [(&str, fn(usize, f64) -> Family); 4] = [
        ("delta", delta_family),
        ("exponential", exponential_family),
        ("monomial", monomial_family),
        ("root sum", root_sum_family),
    ];
    for m in GRID_M {
        for h in GRID_H {
            for (name, f) in families {
                match f(m, h) {
                    Ok((_, d)) => {
                        worst = worst.max(d);
                        if !(d <= 1e-10) {
                            bad.push(format!("({m},{h}) {name} discrepancy {d:.2e}"));
                        }
                    }
                    Err(e) => bad.push(format!("({m},{h}) {name}: {e}")),
                }
            }
        }
    }
    summary(
        bad,
        format!("worst discrepancy {worst:.2e}, {:.2}s", start.elapsed().as_secs_f64()),
    )
}

fn criterion_9() -> (bool, String) {
    let run = || -> Result<(bool, f64), Error> {
        let op = operator(2, 0.5)?.with_scaled_amplitude(0, Dd::from_f64(1.01))?;
        let r = run_verification(&op, BETA as u32, TOL)?;
        Ok((r.passed, r.residual_delta))
    };
    match run() {
        Ok((passed, delta)) => (
            !passed && delta > 1e-4,
            format!("passed = {passed}, residual_delta = {delta:.3e}"),
        ),
        Err(e) => (false, e.to_string()),
    }
}

fn discop(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let o = Command::new(env!("CARGO_BIN_EXE_discop"))
        .args(args)
        .env_remove("DISC_OP_TOL")
        .output()
        .expect("binary runs");
    (o.status.code(), o.stdout)
}

fn criterion_10() -> (bool, String) {
    let mut bad = Vec::new();
    let codes: [(&[&str], i32); 8] = [
        (&["construct", "--m", "1", "--h", "1.0"], 0),
        (&["construct", "--m", "7", "--h", "0.5"], 2),
        (&["verify", "--m", "3", "--h", "0.3"], 0),
        (&["verify", "--m", "2", "--h", "0.5", "--tol", "1e-15", "--precision", "double"], 1),
        (&["verify", "--m", "3", "--h", "1.0"], 3),
        (&["roots", "--m", "1", "--h", "0.5"], 2),
        (&["euler", "--k", "13"], 2),
        (&["euler", "--k", "2"], 0),
    ];
    for (args, want) in codes {
        let (got, _) = discop(args);
        if got != Some(want) {
            bad.push(format!("`{}` exited {got:?}, expected {want}", args.join(" ")));
        }
    }
    let golden_dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden"].iter().collect();
    let mut compared = 0;
    for (m, h) in [("1", "1.0"), ("2", "0.5"), ("3", "0.3")] {
        let tag = format!("m{m}_h{h}");
        let mut cases = vec![
            (vec!["construct", "--m", m, "--h", h], format!("construct_{tag}.json")),
            (vec!["construct", "--m", m, "--h", h, "--format", "csv"], format!("construct_{tag}.csv")),
            (vec!["verify", "--m", m, "--h", h], format!("verify_{tag}.json")),
        ];
        if m != "1" {
            cases.push((vec!["roots", "--m", m, "--h", h], format!("roots_{tag}.json")));
        }
        for (args, file) in cases {
            let (_, first) = discop(&args);
            let (_, second) = discop(&args);
            if first != second {
                bad.push(format!("`{}` is not deterministic", args.join(" ")));
            }
            match std::fs::read(golden_dir.join(&file)) {
                Ok(g) if g == first => compared += 1,
                Ok(_) => bad.push(format!("{file} differs")),
                Err(e) => bad.push(format!("{file}: {e}")),
            }
        }
    }
    summary(bad, format!("8 exit codes, {compared} golden files"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> (bool, String)); 10] = [
        ("delta identity", criterion_1),
        ("exponential annihilation", criterion_2),
        ("polynomial annihilation", criterion_3),
        ("root-sum identity", criterion_4),
        ("m=1 closed form", criterion_5),
        ("structural invariants", criterion_6),
        ("Euler polynomial suite", criterion_7),
        ("dual-route agreement", criterion_8),
        ("sensitivity control", criterion_9),
        ("CLI contract", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = run();
        if !ok {
            failed += 1;
        }
        println!("criterion {:>2} {} {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
