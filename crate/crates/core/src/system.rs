//! Right-hand sides and time integration.
//!
//! On the Fourier side the conservative system reads
//!
//! ```text
//! ∂_t u_k = i a k³ u_k - 3iak (u·u)_k - iβk (v·v)_k
//! ∂_t v_k = i k³ v_k   - 3i Σ_{k₁+k₂=k} k₂ u_{k₁} v_{k₂}
//! ```
//!
//! and the damped-forced variant adds `-γ u_k + f_k`, `-γ v_k + g_k`. The
//! diagonal symbols `iak³ - γ` and `ik³ - γ` are integrated exactly through
//! the integrating factor; a classical RK4 advances only the nonlinearity
//! and forcing, so the stiff dispersive scale never limits the step.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{GridSpec, ProductWorkspace, SpectralField};

/// Any coefficient beyond this magnitude aborts the run as a blow-up.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

/// Default nonlinear stability budget: require `dt ≤ c_stab / N²`.
pub const DEFAULT_C_STAB: f64 = 0.5;

/// Physical and numerical parameters of a run.
#[derive(Debug, Clone)]
pub struct HSParams {
    /// Dispersion coupling, in (1/4, 1).
    pub a: f64,
    /// Quadratic coupling strength; negative for energy-coercive runs.
    pub beta: f64,
    /// Damping coefficient (one value for both components).
    pub gamma: f64,
    /// Time-independent forcing of the `u` equation; must be mean-zero.
    pub forcing_u: SpectralField,
    /// Time-independent forcing of the `v` equation.
    pub forcing_v: SpectralField,
    pub dt: f64,
    pub t_final: f64,
    pub grid: GridSpec,
    /// Stability budget for the step guard `dt ≤ c_stab / N²`.
    pub c_stab: f64,
    /// Disables the quadratic terms; used by linear-reference runs.
    pub nonlinear: bool,
}

impl HSParams {
    pub fn conservative(a: f64, beta: f64, grid: GridSpec, dt: f64, t_final: f64) -> Result<Self> {
        let n = grid.truncation();
        let p = HSParams {
            a,
            beta,
            gamma: 0.0,
            forcing_u: SpectralField::zeros(n, true),
            forcing_v: SpectralField::zeros(n, false),
            dt,
            t_final,
            grid,
            c_stab: DEFAULT_C_STAB,
            nonlinear: true,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn dissipative(
        a: f64,
        beta: f64,
        gamma: f64,
        forcing_u: SpectralField,
        forcing_v: SpectralField,
        grid: GridSpec,
        dt: f64,
        t_final: f64,
    ) -> Result<Self> {
        let p = HSParams {
            a,
            beta,
            gamma,
            forcing_u,
            forcing_v,
            dt,
            t_final,
            grid,
            c_stab: DEFAULT_C_STAB,
            nonlinear: true,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_c_stab(mut self, c_stab: f64) -> Self {
        self.c_stab = c_stab;
        self
    }

    pub fn without_nonlinearity(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    /// Structural checks run at construction time.
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.25 && self.a < 1.0) {
            return Err(Error::Domain(format!(
                "coupling a = {} outside (1/4, 1)",
                self.a
            )));
        }
        if self.gamma < 0.0 {
            return Err(Error::Config("damping γ must be nonnegative".into()));
        }
        if self.dt.is_nan() || self.dt <= 0.0 {
            return Err(Error::Config("time step dt must be positive".into()));
        }
        if self.t_final < 0.0 {
            return Err(Error::Config("final time must be nonnegative".into()));
        }
        let n = self.grid.truncation();
        if self.forcing_u.truncation() != n || self.forcing_v.truncation() != n {
            return Err(Error::Config(
                "forcing truncation does not match the grid".into(),
            ));
        }
        if self.forcing_u.coeff(0).norm() > 1e-13 * self.forcing_u.max_abs().max(1.0) {
            return Err(Error::Invariant("forcing f must be mean-zero".into()));
        }
        Ok(())
    }

    /// Step-size guard `dt ≤ c_stab/N²`, enforced when an integrator is
    /// built. Runs that are known stable at larger steps raise `c_stab`.
    pub fn check_stability_budget(&self) -> Result<()> {
        let n = self.grid.truncation();
        let budget = self.c_stab / (n * n) as f64;
        if self.dt > budget * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "dt = {} exceeds the stability budget c_stab/N² = {budget:.3e}; \
                 raise c_stab explicitly if the run is known to be stable",
                self.dt
            )));
        }
        Ok(())
    }

    fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// Time-stamped sequence of states plus the initial datum at `times[0] = 0`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<(SpectralField, SpectralField)>,
}

impl Trajectory {
    pub fn initial(&self) -> &(SpectralField, SpectralField) {
        &self.states[0]
    }

    pub fn final_state(&self) -> &(SpectralField, SpectralField) {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Spacing between consecutive samples; `None` when not uniform.
    pub fn sample_spacing(&self) -> Option<f64> {
        if self.times.len() < 2 {
            return None;
        }
        let h = self.times[1] - self.times[0];
        let uniform = self
            .times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() < 1e-9 * h.max(1.0));
        uniform.then_some(h)
    }

    /// One JSON record per sample: `{"t": .., "u": field, "v": field}`.
    pub fn write_jsonl<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        #[derive(Serialize)]
        struct Record {
            t: f64,
            u: crate::spectral::FieldJson,
            v: crate::spectral::FieldJson,
        }
        for (t, (u, v)) in self.times.iter().zip(&self.states) {
            let rec = Record {
                t: *t,
                u: u.to_json(),
                v: v.to_json(),
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// The unit-modulus semigroup symbol `e^{i a k³ t}`.
pub fn linear_phase(k: i64, a: f64, t: f64) -> Complex64 {
    let k3 = (k * k * k) as f64;
    Complex64::from_polar(1.0, a * k3 * t)
}

/// Applies the damped linear group: multiplies `c_k` by `e^{iak³t - γt}`.
/// Pass `a_or_one = a` for the `u` component and `1.0` for `v`.
pub fn propagate_linear(field: &SpectralField, a_or_one: f64, t: f64, gamma: f64) -> SpectralField {
    let n = field.truncation() as i64;
    let damp = (-gamma * t).exp();
    let mut out = field.clone();
    for k in -n..=n {
        let factor = linear_phase(k, a_or_one, t) * damp;
        let idx = (k + n) as usize;
        out.coeffs_mut()[idx] = field.coeff(k) * factor;
    }
    out
}

/// Nonlinear part of the conservative right-hand side (the stiff diagonal
/// term is handled by the integrator):
/// `(-3iak (u·u)_k - iβk (v·v)_k, -3i Σ k₂ u_{k₁} v_{k₂})`.
pub fn rhs_conservative(
    u: &SpectralField,
    v: &SpectralField,
    p: &HSParams,
) -> Result<(SpectralField, SpectralField)> {
    require_mean_zero_state(u)?;
    let mut ws = ProductWorkspace::for_grid(&p.grid);
    let uu = ws.multiply(u, u)?;
    let vv = ws.multiply(v, v)?;
    let uvx = ws.multiply(u, &v.derivative())?;
    Ok(assemble_nonlinear(&uu, &vv, &uvx, p))
}

/// Nonlinearity plus forcing for the damped-forced system. The damping term
/// `-γ u_k` is *not* included here: it lives in the integrating factor
/// together with the dispersion, so this returns exactly the part the
/// integrator advances numerically.
pub fn rhs_dissipative(
    u: &SpectralField,
    v: &SpectralField,
    p: &HSParams,
) -> Result<(SpectralField, SpectralField)> {
    let (du, dv) = rhs_conservative(u, v, p)?;
    Ok((du.add(&p.forcing_u), dv.add(&p.forcing_v)))
}

fn assemble_nonlinear(
    uu: &SpectralField,
    vv: &SpectralField,
    uvx: &SpectralField,
    p: &HSParams,
) -> (SpectralField, SpectralField) {
    let n = uu.truncation() as i64;
    let mut du = SpectralField::zeros(n as usize, true);
    let mut dv = SpectralField::zeros(n as usize, false);
    for k in -n..=n {
        let ik = Complex64::new(0.0, k as f64);
        let idx = (k + n) as usize;
        // The k multiplier annihilates mode 0 of du, keeping u mean-zero.
        du.coeffs_mut()[idx] = -3.0 * p.a * ik * uu.coeff(k) - p.beta * ik * vv.coeff(k);
        dv.coeffs_mut()[idx] = -3.0 * uvx.coeff(k);
    }
    (du, dv)
}

fn require_mean_zero_state(u: &SpectralField) -> Result<()> {
    if u.coeff(0).norm() > 1e-13 * u.max_abs().max(1.0) {
        return Err(Error::Invariant(
            "u must be mean-zero (nonzero coefficient at k = 0)".into(),
        ));
    }
    Ok(())
}

/// Integrating-factor RK4 stepper with cached exponentials and FFT plans.
pub struct Integrator {
    p: HSParams,
    ws: ProductWorkspace,
    /// `e^{L dt/2}` and `e^{L dt}` for the u symbol `L = iak³ - γ` ...
    half_u: Vec<Complex64>,
    full_u: Vec<Complex64>,
    /// ... and for the v symbol `L = ik³ - γ`.
    half_v: Vec<Complex64>,
    full_v: Vec<Complex64>,
    buf_u: Vec<Complex64>,
    buf_v: Vec<Complex64>,
    buf_w: Vec<Complex64>,
}

impl Integrator {
    pub fn new(p: HSParams) -> Result<Self> {
        p.validate()?;
        p.check_stability_budget()?;
        let n = p.grid.truncation() as i64;
        let symbol = |k: i64, a: f64| {
            let k3 = (k * k * k) as f64;
            Complex64::new(-p.gamma, a * k3)
        };
        let expv = |s: Complex64, t: f64| (s * t).exp();
        let mut half_u = Vec::with_capacity((2 * n + 1) as usize);
        let mut full_u = Vec::with_capacity((2 * n + 1) as usize);
        let mut half_v = Vec::with_capacity((2 * n + 1) as usize);
        let mut full_v = Vec::with_capacity((2 * n + 1) as usize);
        for k in -n..=n {
            half_u.push(expv(symbol(k, p.a), p.dt / 2.0));
            full_u.push(expv(symbol(k, p.a), p.dt));
            half_v.push(expv(symbol(k, 1.0), p.dt / 2.0));
            full_v.push(expv(symbol(k, 1.0), p.dt));
        }
        let ws = ProductWorkspace::for_grid(&p.grid);
        let m = ws.physical_size();
        Ok(Integrator {
            p,
            ws,
            half_u,
            full_u,
            half_v,
            full_v,
            buf_u: vec![Complex64::new(0.0, 0.0); m],
            buf_v: vec![Complex64::new(0.0, 0.0); m],
            buf_w: vec![Complex64::new(0.0, 0.0); m],
        })
    }

    pub fn params(&self) -> &HSParams {
        &self.p
    }

    /// `dt · G(u, v)` where `G` is nonlinearity plus forcing.
    fn stage(&mut self, u: &SpectralField, v: &SpectralField) -> (SpectralField, SpectralField) {
        let p_a = self.p.a;
        let p_beta = self.p.beta;
        let dt = self.p.dt;
        let n = u.truncation() as i64;
        let mut du = SpectralField::zeros(n as usize, true);
        let mut dv = SpectralField::zeros(n as usize, false);

        if self.p.nonlinear {
            let mut buf_u = std::mem::take(&mut self.buf_u);
            let mut buf_v = std::mem::take(&mut self.buf_v);
            let mut buf_w = std::mem::take(&mut self.buf_w);
            self.ws.synthesize(u, &mut buf_u);
            self.ws.synthesize(v, &mut buf_v);
            self.ws.synthesize(&v.derivative(), &mut buf_w);
            for j in 0..buf_u.len() {
                let (pu, pv, pw) = (buf_u[j].re, buf_v[j].re, buf_w[j].re);
                buf_w[j] = Complex64::new(pu * pw, 0.0); // u v_x
                buf_v[j] = Complex64::new(pv * pv, 0.0); // v²
                buf_u[j] = Complex64::new(pu * pu, 0.0); // u²
            }
            let uu = self.ws.analyze(&mut buf_u);
            let vv = self.ws.analyze(&mut buf_v);
            let uvx = self.ws.analyze(&mut buf_w);
            for k in -n..=n {
                let ik = Complex64::new(0.0, k as f64);
                let idx = (k + n) as usize;
                du.coeffs_mut()[idx] =
                    dt * (-3.0 * p_a * ik * uu.coeff(k) - p_beta * ik * vv.coeff(k));
                dv.coeffs_mut()[idx] = dt * (-3.0 * uvx.coeff(k));
            }
            self.buf_u = buf_u;
            self.buf_v = buf_v;
            self.buf_w = buf_w;
        }

        for k in -n..=n {
            let idx = (k + n) as usize;
            du.coeffs_mut()[idx] += dt * self.p.forcing_u.coeff(k);
            dv.coeffs_mut()[idx] += dt * self.p.forcing_v.coeff(k);
        }
        (du, dv)
    }

    /// One integrating-factor RK4 step.
    pub fn step(
        &mut self,
        u: &SpectralField,
        v: &SpectralField,
        t: f64,
    ) -> Result<(SpectralField, SpectralField)> {
        let (ka_u, ka_v) = self.stage(u, v);

        let su = apply(&self.half_u, &u.add(&ka_u.scaled(0.5)));
        let sv = apply(&self.half_v, &v.add(&ka_v.scaled(0.5)));
        let (kb_u, kb_v) = self.stage(&su, &sv);

        let su = apply(&self.half_u, u).add(&kb_u.scaled(0.5));
        let sv = apply(&self.half_v, v).add(&kb_v.scaled(0.5));
        let (kc_u, kc_v) = self.stage(&su, &sv);

        let su = apply(&self.full_u, u).add(&apply(&self.half_u, &kc_u));
        let sv = apply(&self.full_v, v).add(&apply(&self.half_v, &kc_v));
        let (kd_u, kd_v) = self.stage(&su, &sv);

        let combine = |full: &[Complex64],
                       half: &[Complex64],
                       x: &SpectralField,
                       ka: &SpectralField,
                       kb: &SpectralField,
                       kc: &SpectralField,
                       kd: &SpectralField| {
            let mut out = x.clone();
            let coeffs = out.coeffs_mut();
            for idx in 0..coeffs.len() {
                let e2 = full[idx];
                let e1 = half[idx];
                coeffs[idx] = e2 * coeffs[idx]
                    + (e2 * ka.coeffs_raw()[idx]
                        + 2.0 * e1 * (kb.coeffs_raw()[idx] + kc.coeffs_raw()[idx])
                        + kd.coeffs_raw()[idx])
                        / 6.0;
            }
            out
        };
        let nu = combine(&self.full_u, &self.half_u, u, &ka_u, &kb_u, &kc_u, &kd_u);
        let nv = combine(&self.full_v, &self.half_v, v, &ka_v, &kb_v, &kc_v, &kd_v);

        for (name, f) in [("u", &nu), ("v", &nv)] {
            if !f.is_finite() || f.max_abs() > BLOWUP_THRESHOLD {
                return Err(Error::BlowUp {
                    t: t + self.p.dt,
                    detail: format!("{name} coefficient magnitude {:.3e}", f.max_abs()),
                });
            }
        }
        Ok((nu, nv))
    }
}

fn apply(factors: &[Complex64], field: &SpectralField) -> SpectralField {
    let mut out = field.clone();
    for (c, f) in out.coeffs_mut().iter_mut().zip(factors) {
        *c *= f;
    }
    out
}

/// One fourth-order step of the integrating-factor scheme. Reproduces the
/// linear group exactly when nonlinearity and forcing vanish.
pub fn step_ifrk4(
    state: &(SpectralField, SpectralField),
    p: &HSParams,
) -> Result<(SpectralField, SpectralField)> {
    let mut integrator = Integrator::new(p.clone())?;
    integrator.step(&state.0, &state.1, 0.0)
}

/// Runs the flow to `t_final`, sampling every `sample_every` steps (the
/// final state is always included). Deterministic for fixed inputs.
pub fn simulate(
    initial: &(SpectralField, SpectralField),
    p: &HSParams,
    sample_every: usize,
) -> Result<Trajectory> {
    if sample_every == 0 {
        return Err(Error::Config("sample_every must be positive".into()));
    }
    require_mean_zero_state(&initial.0)?;
    initial.0.check_hermitian()?;
    initial.1.check_hermitian()?;
    if initial.0.truncation() != p.grid.truncation()
        || initial.1.truncation() != p.grid.truncation()
    {
        return Err(Error::Config(
            "initial data truncation does not match the grid".into(),
        ));
    }
    let mut integrator = Integrator::new(p.clone())?;
    let steps = p.steps();
    let mut times = vec![0.0];
    let mut states = vec![initial.clone()];
    let (mut u, mut v) = initial.clone();
    for s in 0..steps {
        let t = s as f64 * p.dt;
        let (nu, nv) = integrator.step(&u, &v, t)?;
        u = nu;
        v = nv;
        if (s + 1) % sample_every == 0 || s + 1 == steps {
            times.push((s + 1) as f64 * p.dt);
            states.push((u.clone(), v.clone()));
        }
    }
    Ok(Trajectory { times, states })
}
