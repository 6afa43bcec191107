//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any failed.

use std::process::{Command, ExitCode, Stdio};
use std::time::Instant;

use qclrs::code::{
    build_code, distance_witness, evaluate, exhaustive_min_weight, is_member, sample_min_weight,
    verify_dimension, Codeword,
};
use qclrs::counting::{
    asymptotic_slope, bounds_S_star, closed_form_S0, deduct_q, enumerate_S_star, enumerate_S_t,
    growth_exponent, initial_level, initial_state, qc_rate_exponent, recurse_state,
    s0_by_recursion, StateVector,
};
use qclrs::monomial::{degree, in_shadow, is_qc_good, restrict_to_curve, Curve, Monomial};
use qclrs::recovery::{lrs_failure_closed_form, simulate_failure, tau_grid, SimConfig, SimEstimate};
use qclrs::{CodeSpec, Family, FieldContext};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const SEED: u64 = 20_210_521;
const MC_TRIALS: u64 = 100_000;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn dimensions() -> Check {
    let cases = [
        (Family::QcLrs, 5, 10, 0.15625),
        (Family::QcLrs, 4, 6, 0.09375),
        (Family::Lrs, 4, 10, 0.15625),
        (Family::Lrs, 3, 6, 0.09375),
    ];
    for (family, d, k, rate) in cases {
        let inst = build_code(CodeSpec::new(family, 3, d).map_err(e)?).map_err(e)?;
        ensure(inst.k() == k, || format!("{family} d={d}: k={} expected {k}", inst.k()))?;
        ensure(inst.rate() == rate, || format!("{family} d={d}: rate {}", inst.rate()))?;
    }
    Ok("k = 10, 6, 10, 6; rates 0.15625, 0.09375".into())
}

fn criterion_oracle() -> Check {
    let mut checked = 0;
    for ell in [2, 3] {
        let ctx = FieldContext::new(ell).map_err(e)?;
        let q = ctx.q();
        let curves: Vec<Curve> = Curve::all(&ctx).collect();
        for m in Monomial::all(q) {
            // Largest restricted degree over every curve; good iff below d.
            let worst = curves
                .iter()
                .filter_map(|&c| degree(&restrict_to_curve(&ctx, m, c)))
                .max()
                .unwrap_or(0);
            for d in 1..q {
                let brute = worst < d as usize;
                let bit = is_qc_good(m, q, d).map_err(e)?;
                ensure(bit == brute, || format!("q={q}, d={d}, {m}: bit {bit}, brute {brute}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (q, d, monomial) cases agree"))
}

fn dimension_theorem() -> Check {
    let mut cases = 0;
    for ell in [2, 3, 4] {
        let q = 1u32 << ell;
        let ctx = FieldContext::new(ell).map_err(e)?;
        for d in 1..q {
            let spec = CodeSpec::new(Family::QcLrs, ell, d).map_err(e)?;
            let check = verify_dimension(&spec).map_err(e)?;
            ensure(check.count == check.rank, || {
                format!("q={q}, d={d}: {} good, rank {}", check.count, check.rank)
            })?;
            for b in 0..q {
                let word: Codeword = evaluate(&ctx, |x, y| {
                    let yb = ctx.pow(y, b.into());
                    ctx.add(ctx.mul(ctx.pow(x, (q - 1).into()), yb), yb)
                });
                ensure(!is_member(&spec, &word).map_err(e)?, || {
                    format!("q={q}, d={d}: x^(q-1) y^{b} + y^{b} accepted")
                })?;
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} codes: count = rank, x^(q-1)y^b + y^b rejected"))
}

fn counting() -> Check {
    for ell in 1..=6u32 {
        for r in 1..(1u32 << ell) {
            if initial_level(r).map_err(e)? > ell {
                continue;
            }
            let rec = recurse_state(initial_state(r).map_err(e)?, ell).map_err(e)?;
            let en = StateVector::enumerate(ell, r).map_err(e)?;
            ensure(rec == en, || format!("recursion ell={ell}, r={r}: {rec:?} vs {en:?}"))?;
            let s0 = enumerate_S_t(ell, r, 0).map_err(e)?.len() as u128;
            ensure(s0 == rec.s0, || format!("S_0 ell={ell}, r={r}"))?;
        }
    }
    for (r, lo) in [(1, 1), (3, 2)] {
        for ell in lo..=10 {
            let exact = StateVector::enumerate(ell, r).map_err(e)?.s0 as f64;
            let cf = closed_form_S0(ell, r).map_err(e)?;
            ensure((cf - exact).abs() < 1e-6 * exact, || {
                format!("closed form r={r}, ell={ell}: {cf} vs {exact}")
            })?;
        }
    }
    for ell in 1..=8u32 {
        let q = 1u32 << ell;
        for r in 1..q {
            let star = enumerate_S_star(ell, r).map_err(e)?;
            let bad: Vec<(u32, u32)> = Monomial::all(q)
                .filter(|&m| !is_qc_good(m, q, q - r).unwrap())
                .map(|m| (m.a, m.b))
                .collect();
            let mut bad_sorted = bad;
            bad_sorted.sort_unstable();
            ensure(star == bad_sorted, || format!("S* complement ell={ell}, r={r}"))?;
        }
    }
    let mut sandwiches = 0;
    for ell in 2..=8u32 {
        for r in 1..=(1u32 << ell) / 4 {
            let b = bounds_S_star(ell, r).map_err(e)?;
            let count = enumerate_S_star(ell, r).map_err(e)?.len() as f64;
            ensure(b.contains(count), || {
                format!("bounds ell={ell}, r={r}: {} / {count} / {}", b.lower, b.upper)
            })?;
            sandwiches += 1;
        }
    }
    Ok(format!("recursion, closed forms, complement, {sandwiches} sandwiches"))
}

fn deduction() -> Check {
    let got = deduct_q(4, 10, 4).map_err(e)?;
    ensure(got == (0, 2), || format!("example gave {got:?}"))?;
    let mut cases = 0;
    for ell in 1..=6u32 {
        let q = 1u32 << ell;
        for i in 0..q {
            for j in (0..q).filter(|&j| i & j == 0 && 2 * i + j > q) {
                let (ip, jp) = deduct_q(i, j, ell).map_err(e)?;
                ensure(
                    in_shadow(ip.into(), i.into())
                        && in_shadow(jp.into(), j.into())
                        && (2 * i + j) - (2 * ip + jp) == q,
                    || format!("ell={ell}, i={i}, j={j} -> ({ip}, {jp})"),
                )?;
                cases += 1;
            }
        }
    }
    Ok(format!("example (0, 2); {cases} inputs satisfy the postconditions"))
}

fn slope() -> Check {
    let samples: Vec<(u32, f64)> = (4..=16)
        .map(|ell| Ok((ell, s0_by_recursion(ell, 1)? as f64)))
        .collect::<qclrs::Result<_>>()
        .map_err(e)?;
    let fit = asymptotic_slope(&samples).map_err(e)?;
    let want = (2.0 + 2f64.sqrt()).log2();
    ensure((fit - want).abs() < 0.02 && (growth_exponent() - want).abs() < 1e-12, || {
        format!("slope {fit} vs {want}")
    })?;
    let rate = fit - 2.0;
    ensure((rate - -0.2284).abs() < 0.02 && (qc_rate_exponent() - -0.2284).abs() < 0.02, || {
        format!("rate exponent {rate}")
    })?;
    Ok(format!("slope {fit:.4}, rate exponent {rate:.4}"))
}

fn distance() -> Check {
    let mut sampled = 0;
    for ell in [2, 3, 4] {
        let q = 1u32 << ell;
        for r in 1..=q / 4 {
            let spec = CodeSpec::with_redundancy(Family::QcLrs, ell, r).map_err(e)?;
            let w = distance_witness(&spec).map_err(e)?;
            ensure(w.weight() == (q * r + q) as usize, || {
                format!("witness q={q}, r={r}: weight {}", w.weight())
            })?;
            ensure(is_member(&spec, &w).map_err(e)?, || format!("witness q={q}, r={r} not a codeword"))?;
            let inst = build_code(spec).map_err(e)?;
            let min = sample_min_weight(&inst, 10_000, SEED ^ u64::from(q * 31 + r)).map_err(e)?;
            ensure(min > (q * r) as usize, || format!("sampled q={q}, r={r}: weight {min}"))?;
            sampled += 1;
        }
    }
    let spec = CodeSpec::with_redundancy(Family::QcLrs, 2, 1).map_err(e)?;
    let inst = build_code(spec).map_err(e)?;
    ensure(inst.k() <= 8, || format!("q=4 code has k={}", inst.k()))?;
    let min = exhaustive_min_weight(&inst).map_err(e)?;
    ensure((5..=8).contains(&min), || format!("exhaustive minimum {min}"))?;
    Ok(format!("{sampled} codes sampled; exhaustive q=4 minimum {min} (k={})", inst.k()))
}

fn simulate(family: Family, r: u32, tau: f64, seed: u64) -> Result<SimEstimate, String> {
    let spec = CodeSpec::with_redundancy(family, 3, r).map_err(e)?;
    simulate_failure(&SimConfig { spec, tau, trials: MC_TRIALS, seed }).map_err(e)
}

fn closed_form_vs_simulation() -> Check {
    let taus = tau_grid(0.3, 1.0, 0.02).map_err(e)?;
    let mut worst: f64 = 0.0;
    for r in [4, 5] {
        for (idx, &tau) in taus.iter().enumerate() {
            let est = simulate(Family::Lrs, r, tau, SEED + 1000 * u64::from(r) + idx as u64)?;
            let exact = lrs_failure_closed_form(8, r, tau).map_err(e)?;
            let dev = (est.failure_rate - exact).abs() / est.half_width;
            worst = worst.max(dev);
            ensure(dev <= 3.0, || {
                format!("r={r}, tau={tau}: {} vs {exact} (hw {})", est.failure_rate, est.half_width)
            })?;
        }
    }
    Ok(format!("{} points, worst deviation {worst:.2} half-widths", 2 * taus.len()))
}

fn qualitative_claim() -> Check {
    let taus: Vec<f64> = tau_grid(0.3, 1.0, 0.02).map_err(e)?.into_iter().filter(|&t| t <= 0.7).collect();
    for (qc_r, lrs_r) in [(3, 4), (4, 5)] {
        for (idx, &tau) in taus.iter().enumerate() {
            let qc = simulate(Family::QcLrs, qc_r, tau, SEED + 7 * idx as u64)?;
            let lrs = simulate(Family::Lrs, lrs_r, tau, SEED + 7 * idx as u64 + 3)?;
            let slack = 3.0 * (qc.half_width.powi(2) + lrs.half_width.powi(2)).sqrt();
            ensure(qc.failure_rate <= lrs.failure_rate + slack, || {
                format!(
                    "tau={tau}: QC r={qc_r} {} > LRS r={lrs_r} {} + {slack}",
                    qc.failure_rate, lrs.failure_rate
                )
            })?;
        }
    }
    Ok(format!("both pairs hold at {} tau values", taus.len()))
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(e)?;
    let run = |sub: &str, threads: &str| -> Result<Vec<(String, Vec<u8>)>, String> {
        let out = dir.path().join(sub);
        let status = Command::new(env!("CARGO_BIN_EXE_qclrs"))
            .args(["--threads", threads, "figures", "--trials", "5000", "--seed", "7", "--out"])
            .arg(&out)
            .stdout(Stdio::null())
            .status()
            .map_err(e)?;
        ensure(status.success(), || format!("figures exited with {status}"))?;
        let mut files = Vec::new();
        for name in ["fig1_q32.csv", "fig2_q8.csv"] {
            files.push((name.to_string(), std::fs::read(out.join(name)).map_err(e)?));
        }
        Ok(files)
    };
    let serial = run("serial", "1")?;
    let parallel = run("parallel", "4")?;
    let again = run("again", "4")?;
    for ((name, a), ((_, b), (_, c))) in serial.iter().zip(parallel.iter().zip(&again)) {
        ensure(a == b && b == c, || format!("{name} differs between runs"))?;
    }
    Ok("fig1/fig2 identical across 1 and 4 threads and reruns".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("dimension reproduction", dimensions),
        ("good-monomial oracle equivalence", criterion_oracle),
        ("dimension = good-monomial count", dimension_theorem),
        ("counting consistency", counting),
        ("q-deduction", deduction),
        ("asymptotic slope", slope),
        ("distance bounds", distance),
        ("closed form vs simulation", closed_form_vs_simulation),
        ("quadratic-curve vs line failure", qualitative_claim),
        ("figure determinism", determinism),
    ];
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {:>2} {name}: {detail} ({secs:.1}s)", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2} {name}: {why} ({secs:.1}s)", n + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
