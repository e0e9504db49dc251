use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use hskdv::diagnostics::{
    absorbing_radius, attractor_regularity_probe, ball_entry_from_trajectory,
    dissipative_energy_check, energy_series, energy_series_csv, energy_series_long,
    random_hs_field,
    smoothing_experiment,
};
use hskdv::diophantine::{min_resonance_gap, mu_of_coefficients};
use hskdv::normal_form::{
    compute_coefficients, verify_integrated_identity, Coupling, IdentityOptions,
    NormalFormOperators, ResonanceCoefficients,
};
use hskdv::oracle;
use hskdv::spectral::{
    dealiased_product, dft_forward, dft_inverse, sobolev_norm, GridSpec, SpectralField,
};
use hskdv::system::{simulate, HSParams, Trajectory};

use crate::config::{Mode, RunConfig};

pub fn run(config: &RunConfig) -> anyhow::Result<serde_json::Value> {
    fs::create_dir_all(&config.out_dir).with_context(|| {
        format!(
            "cannot create output directory {}",
            config.out_dir.display()
        )
    })?;
    match config.mode {
        Mode::Simulate => run_simulate(config),
        Mode::Dissipative => run_dissipative(config),
        Mode::VerifyNormalForm => run_verify(config),
        Mode::Smoothing => run_smoothing(config),
        Mode::ResonanceScan => run_resonance_scan(config),
        Mode::Attractor => run_attractor(config),
        Mode::OracleTest => run_oracle_test(config),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn initial_data(config: &RunConfig, n: usize) -> (SpectralField, SpectralField) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let u = random_hs_field(n, config.s, config.amplitude, true, &mut rng);
    let v = random_hs_field(n, config.s, config.amplitude, false, &mut rng);
    (u, v)
}

/// Seeded forcing pair with unit H¹ norms (f mean-zero).
fn unit_forcing(n: usize, seed: u64) -> (SpectralField, SpectralField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x666f_7263); // "forc"
    let mut f = SpectralField::zeros(n, true);
    let mut g = SpectralField::zeros(n, false);
    for k in 1..=4i64 {
        f.set_pair(
            k,
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        );
        g.set_pair(
            k,
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        );
    }
    let sf = 1.0 / sobolev_norm(&f, 1.0, false);
    let sg = 1.0 / sobolev_norm(&g, 1.0, false);
    (f.scaled(sf), g.scaled(sg))
}

fn apply_c_stab(p: HSParams, config: &RunConfig) -> HSParams {
    match config.c_stab {
        Some(c) => p.with_c_stab(c),
        None => p,
    }
}

fn sample_every(config: &RunConfig, target_samples: usize) -> usize {
    config.sample_every.unwrap_or_else(|| {
        let steps = (config.t_final / config.dt).round() as usize;
        (steps / target_samples.max(1)).max(1)
    })
}

fn write_trajectory_outputs(
    config: &RunConfig,
    traj: &Trajectory,
    a: f64,
) -> anyhow::Result<serde_json::Value> {
    let path = config.out_dir.join("trajectory.jsonl");
    let file =
        fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    traj.write_jsonl(std::io::BufWriter::new(file))?;

    let records = energy_series(traj, a, config.beta);
    fs::write(
        config.out_dir.join("energies.csv"),
        energy_series_csv(&records),
    )?;
    let mut long = String::from("t,quantity,value\n");
    for (t, quantity, value) in energy_series_long(&records) {
        long.push_str(&format!("{t:.8e},{quantity},{value:.12e}\n"));
    }
    fs::write(config.out_dir.join("energies_long.csv"), long)?;

    let first = records.first().context("empty trajectory")?;
    let last = records.last().context("empty trajectory")?;
    Ok(json!({
        "samples": traj.len(),
        "t_final": traj.times.last(),
        "e1_initial": first.e1,
        "e1_final": last.e1,
        "e2_initial": first.e2,
        "e2_final": last.e2,
        "h1_u_final": last.h1_u,
        "h1_v_final": last.h1_v,
    }))
}

fn run_simulate(config: &RunConfig) -> anyhow::Result<serde_json::Value> {
    let grid = config.grid()?;
    let a = config.coupling()?;
    let p = apply_c_stab(
        HSParams::conservative(a.as_f64(), config.beta, grid, config.dt, config.t_final)?,
        config,
    );
    let initial = initial_data(config, grid.truncation());
    let traj = simulate(&initial, &p, sample_every(config, 200))?;
    write_trajectory_outputs(config, &traj, p.a)
}

fn run_dissipative(config: &RunConfig) -> anyhow::Result<serde_json::Value> {
    let grid = config.grid()?;
    let a = config.coupling()?;
    let n = grid.truncation();
    let (f, g) = unit_forcing(n, config.seed);
    let p = apply_c_stab(
        HSParams::dissipative(
            a.as_f64(),
            config.beta,
            config.gamma,
            f,
            g,
            grid,
            config.dt,
            config.t_final,
        )?,
        config,
    );
    let initial = initial_data(config, n);
    let traj = simulate(&initial, &p, sample_every(config, 200))?;
    let mut summary = write_trajectory_outputs(config, &traj, p.a)?;

    let report = dissipative_energy_check(&traj, &p)?;
    write_json(&config.out_dir.join("l2_bound.json"), &report)?;
    let mut csv = String::from("t,lhs,rhs,margin\n");
    for s in &report.samples {
        csv.push_str(&format!(
            "{:.8e},{:.12e},{:.12e},{:.12e}\n",
            s.t, s.lhs, s.rhs, s.margin
        ));
    }
    fs::write(config.out_dir.join("l2_bound.csv"), csv)?;

    summary["l2_bound_min_margin"] = json!(report.min_margin);
    summary["l2_bound_violations"] = json!(report.violations);
    Ok(summary)
}

fn run_verify(config: &RunConfig) -> anyhow::Result<serde_json::Value> {
    let grid = config.grid()?;
    let n = grid.truncation();
    let a = config.coupling()?;
    let rc = compute_coefficients(&a)?;

    let p = if config.gamma > 0.0 {
        let (f, g) = unit_forcing(n, config.seed);
        let scale = config.amplitude;
        HSParams::dissipative(
            rc.a,
            config.beta,
            config.gamma,
            f.scaled(scale),
            g.scaled(scale),
            grid,
            config.dt,
            config.t_final,
        )?
    } else {
        HSParams::conservative(rc.a, config.beta, grid, config.dt, config.t_final)?
    };
    let p = apply_c_stab(p, config);

    // Low-mode seeded data: the identity is checked on modes |k| <= N/3, and
    // concentrating the data low keeps the spectral tail far below the
    // residual tolerance.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut u = SpectralField::zeros(n, true);
    let mut v = SpectralField::zeros(n, false);
    for k in 1..=6i64.min(n as i64) {
        let w = config.amplitude / k as f64;
        u.set_pair(
            k,
            Complex64::new(w * rng.gen_range(-1.0..1.0), w * rng.gen_range(-1.0..1.0)),
        );
        v.set_pair(
            k,
            Complex64::new(w * rng.gen_range(-1.0..1.0), w * rng.gen_range(-1.0..1.0)),
        );
    }

    let traj = simulate(&(u, v), &p, 1)?;
    let report = verify_integrated_identity(&traj, &rc, &p, &IdentityOptions::default())?;
    write_json(&config.out_dir.join("residual_report.json"), &report)?;
    let mut csv = String::from("t,residual_u,residual_v\n");
    for r in &report.per_time {
        csv.push_str(&format!(
            "{:.8e},{:.12e},{:.12e}\n",
            r.t, r.residual_u, r.residual_v
        ));
    }
    fs::write(config.out_dir.join("residuals.csv"), csv)?;
    Ok(json!({
        "max_residual": report.max_residual,
        "max_mode": report.max_mode,
        "max_rho_contribution": report.max_rho_contribution,
        "rational_case": rc.rational_case.is_some(),
    }))
}

fn run_smoothing(config: &RunConfig) -> anyhow::Result<serde_json::Value> {
    let grid = config.grid()?;
    let a = config.coupling()?;
    let p = apply_c_stab(
        HSParams::conservative(a.as_f64(), config.beta, grid, config.dt, config.t_final)?,
        config,
    );
    let report =
        smoothing_experiment(config.s, config.amplitude, config.seed, &config.s1_grid, &p)?;
    write_json(&config.out_dir.join("smoothing_report.json"), &report)?;
    fs::write(config.out_dir.join("smoothing.csv"), report.to_csv())?;
    Ok(json!({
        "gain_u": report.gain_u,
        "gain_v": report.gain_v,
        "s": report.s,
        "a": report.a,
    }))
}

fn run_resonance_scan(config: &RunConfig) -> anyhow::Result<serde_json::Value> {
    let a = config.coupling()?;
    let rc: ResonanceCoefficients = compute_coefficients(&a)?;

    // Scan the root r₁ (exactly when the coupling is exact) and ρ_a.
    let r1_target = match rc.rational_case {
        Some(roots) => Coupling::from_fraction(roots.p, roots.q)?,
        None => Coupling::Approx(rc.r1),
    };
    let r1_table = min_resonance_gap(&r1_target, config.k_max)?;
    fs::write(config.out_dir.join("gap_r1.csv"), r1_table.to_csv())?;
    let rho_table = min_resonance_gap(&Coupling::Approx(rc.rho_a), config.k_max)?;
    fs::write(config.out_dir.join("gap_rho.csv"), rho_table.to_csv())?;

    let mu = mu_of_coefficients(&rc, config.mu, true)?;
    let summary = json!({
        "a": rc.a,
        "r1": rc.r1,
        "rho_a": rc.rho_a,
        "rational_case": rc.rational_case,
        "exact_zero_count_r1": r1_table.exact_zeros().len(),
        "exact_zeros_r1": r1_table.exact_zeros(),
        "fitted_exponent_r1": r1_table.fitted_exponent,
        "fitted_exponent_rho": rho_table.fitted_exponent,
        "mu": { "value": mu.value, "provenance": mu.provenance },
    });
    write_json(&config.out_dir.join("scan_summary.json"), &summary)?;
    Ok(summary)
}

fn run_attractor(config: &RunConfig) -> anyhow::Result<serde_json::Value> {
    let grid = config.grid()?;
    let a = config.coupling()?;
    let rc = compute_coefficients(&a)?;
    let n = grid.truncation();
    let (f, g) = unit_forcing(n, config.seed);
    let p = apply_c_stab(
        HSParams::dissipative(
            rc.a,
            config.beta,
            config.gamma,
            f,
            g,
            grid,
            config.dt,
            config.t_final,
        )?,
        config,
    );
    let initial = initial_data(config, n);
    let traj = simulate(&initial, &p, sample_every(config, 500))?;

    let report = attractor_regularity_probe(&traj, &p, config.alpha, &rc)?;
    write_json(&config.out_dir.join("regularity.json"), &report)?;
    let mut csv = String::from("t,remainder_u,remainder_v,remainder_total\n");
    for i in 0..report.times.len() {
        csv.push_str(&format!(
            "{:.8e},{:.12e},{:.12e},{:.12e}\n",
            report.times[i],
            report.remainder_u[i],
            report.remainder_v[i],
            report.remainder_total[i]
        ));
    }
    fs::write(config.out_dir.join("remainder.csv"), csv)?;

    let radius = absorbing_radius(&p);
    let entry = ball_entry_from_trajectory(&traj, radius);
    let ball = json!({
        "radius": radius,
        "entry_time": entry.entry_time,
        "post_entry_sup": if entry.post_entry_sup.is_nan() { None } else { Some(entry.post_entry_sup) },
        "final_norm": entry.final_norm,
    });
    write_json(&config.out_dir.join("ball.json"), &ball)?;

    Ok(json!({
        "alpha": config.alpha,
        "second_half_slope": report.second_half_slope,
        "remainder_ceiling": report.remainder_total.iter().cloned().fold(0.0f64, f64::max),
        "ball": ball,
    }))
}

/// Runs the brute-force oracle suites in-process and fails on the first
/// disagreement beyond 1e-12.
fn run_oracle_test(config: &RunConfig) -> anyhow::Result<serde_json::Value> {
    let n = 8;
    let grid = GridSpec::for_modes(n);
    let beta = config.beta;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut suites = Vec::new();

    let mut check = |name: &str, worst: f64| -> anyhow::Result<()> {
        let pass = worst < 1e-12;
        println!(
            "oracle {name}: {} (worst {worst:.3e})",
            if pass { "pass" } else { "FAIL" }
        );
        suites.push(json!({ "suite": name, "worst": worst, "pass": pass }));
        if !pass {
            bail!("oracle suite '{name}' disagreed by {worst:.3e}");
        }
        Ok(())
    };

    // Transform round trip against the definition sums.
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let v = random_hs_field(n, 1.0, 1.0, false, &mut rng);
        let samples = dft_inverse(&v, &grid)?;
        let direct = oracle::dft_inverse_direct(&v, &grid);
        for (a, b) in samples.iter().zip(&direct) {
            worst = worst.max((a - b).abs());
        }
        let back = dft_forward(&samples, &grid)?;
        worst = worst.max(back.max_diff(&v));
        worst = worst.max(back.max_diff(&oracle::dft_forward_direct(&samples, &grid)));
    }
    check("dft round trip", worst)?;

    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let u = random_hs_field(n, 1.0, 1.0, true, &mut rng);
        let v = random_hs_field(n, 1.0, 1.0, false, &mut rng);
        let fast = dealiased_product(&u, &v, &grid)?;
        worst = worst.max(fast.max_diff(&oracle::convolve_direct(&u, &v)));
    }
    check("dealiased product", worst)?;

    for text in ["1/3", "1/2"] {
        let a: Coupling = text.parse()?;
        let rc = compute_coefficients(&a)?;
        let ops = NormalFormOperators::new(rc.clone(), beta);
        let mut worst_b: f64 = 0.0;
        let mut worst_r: f64 = 0.0;
        let mut worst_rho: f64 = 0.0;
        for _ in 0..20 {
            let u = random_hs_field(n, 1.0, 1.0, true, &mut rng);
            let v = random_hs_field(n, 1.0, 1.0, false, &mut rng);
            for j in 1..=3u8 {
                let (f, g) = match j {
                    1 => (&u, &u),
                    2 => (&v, &v),
                    _ => (&u, &v),
                };
                worst_b = worst_b.max(
                    ops.bilinear(j, f, g)?
                        .max_diff(&oracle::bilinear_direct(j, f, g, &rc, beta)),
                );
            }
            for j in 1..=5u8 {
                let (f, g, h) = match j {
                    1 | 3 => (&u, &v, &v),
                    _ => (&u, &u, &v),
                };
                worst_r = worst_r.max(
                    ops.trilinear(j, f, g, h)?
                        .max_diff(&oracle::trilinear_direct(j, f, g, h, &rc, beta)),
                );
            }
            for j in 1..=3u8 {
                worst_rho = worst_rho.max(
                    ops.resonant(j, &u, &v)?
                        .max_diff(&oracle::resonant_direct(j, &u, &v, &rc, beta)),
                );
            }
        }
        check(&format!("boundary terms (a={text})"), worst_b)?;
        check(&format!("cubic terms (a={text})"), worst_r)?;
        check(&format!("resonant terms (a={text})"), worst_rho)?;
    }

    // Right-hand side against direct convolution.
    let mut worst: f64 = 0.0;
    let p = HSParams::conservative(0.5, beta, grid, 1e-4, 1.0)?;
    for _ in 0..20 {
        let u = random_hs_field(n, 1.0, 1.0, true, &mut rng);
        let v = random_hs_field(n, 1.0, 1.0, false, &mut rng);
        let (du, dv) = hskdv::system::rhs_conservative(&u, &v, &p)?;
        let (du_o, dv_o) = oracle::rhs_direct(&u, &v, p.a, p.beta);
        worst = worst.max(du.max_diff(&du_o)).max(dv.max_diff(&dv_o));
    }
    check("right-hand side", worst)?;

    let summary = json!({ "suites": suites });
    write_json(&config.out_dir.join("oracle_report.json"), &summary)?;
    Ok(summary)
}
