//! Truncated Fourier representation of real 2π-periodic functions.
//!
//! A [`SpectralField`] stores the complex coefficients `c_k`, `|k| ≤ N`, of
//! `u(x) = Σ_k c_k e^{ikx}` with the coefficient convention
//! `c_k = (1/2π) ∫ u(x) e^{-ikx} dx` (discretely, the 1/M-normalized DFT).
//! Real-valued fields satisfy Hermitian symmetry `c_{-k} = conj(c_k)`, which
//! every operation here preserves.
//!
//! Products are computed alias-free by zero-padding onto a physical grid of
//! `M` points; `M > 3N` removes all aliasing from quadratic products of
//! band-limited fields, so the result equals the exact truncated convolution.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when validating Hermitian symmetry of raw coefficients.
const HERMITIAN_TOL: f64 = 1e-12;

/// Physical grid used for transforms and dealiased products.
///
/// `n` is the spectral truncation (modes `|k| ≤ n`), `m` the number of
/// equispaced physical points on `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    m: usize,
}

impl GridSpec {
    /// Grid with explicit physical size. `m` must be even and at least `3n`
    /// so quadratic products can be dealiased by padding.
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("truncation N must be positive".into()));
        }
        if m % 2 != 0 {
            return Err(Error::Config(format!("grid size M = {m} must be even")));
        }
        if m < 3 * n {
            return Err(Error::Config(format!(
                "grid size M = {m} too small for dealiasing (need M ≥ 3N = {})",
                3 * n
            )));
        }
        Ok(GridSpec { n, m })
    }

    /// Default grid for a truncation: the smallest even, FFT-friendly
    /// (2/3/5-smooth) size strictly above `3n`, which makes quadratic
    /// products exactly alias-free including the edge modes `±n`.
    pub fn for_modes(n: usize) -> Self {
        let mut m = 3 * n + 1;
        if m % 2 == 1 {
            m += 1;
        }
        while !is_smooth(m) {
            m += 2;
        }
        GridSpec { n, m }
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    pub fn physical_size(&self) -> usize {
        self.m
    }

    /// Physical collocation points `x_j = 2πj/M`.
    pub fn points(&self) -> Vec<f64> {
        let m = self.m as f64;
        (0..self.m)
            .map(|j| 2.0 * std::f64::consts::PI * j as f64 / m)
            .collect()
    }
}

fn is_smooth(mut m: usize) -> bool {
    for p in [2, 3, 5] {
        while m % p == 0 {
            m /= p;
        }
    }
    m == 1
}

/// Truncated complex Fourier coefficients of a real periodic function.
///
/// Coefficients are stored densely for `k ∈ [-N, N]`; everything outside the
/// truncation is identically zero. The `mean_zero` flag marks fields pinned
/// to `c_0 = 0` (the `Ḣ^s` class required of `u`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    n: usize,
    coeffs: Vec<Complex64>,
    mean_zero: bool,
}

impl SpectralField {
    pub fn zeros(n: usize, mean_zero: bool) -> Self {
        SpectralField {
            n,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * n + 1],
            mean_zero,
        }
    }

    /// Builds a field from raw coefficients indexed `k = -N..=N` (slice index
    /// `k + N`). Validates Hermitian symmetry and, if requested, `c_0 = 0`.
    pub fn from_coeffs(n: usize, coeffs: Vec<Complex64>, mean_zero: bool) -> Result<Self> {
        if coeffs.len() != 2 * n + 1 {
            return Err(Error::Config(format!(
                "coefficient vector has length {}, expected {}",
                coeffs.len(),
                2 * n + 1
            )));
        }
        let field = SpectralField {
            n,
            coeffs,
            mean_zero,
        };
        field.check_hermitian()?;
        if mean_zero && field.coeff(0).norm() != 0.0 {
            return Err(Error::Invariant(
                "mean-zero field has nonzero coefficient at k = 0".into(),
            ));
        }
        Ok(field)
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean_zero
    }

    pub fn set_mean_zero_flag(&mut self, flag: bool) {
        self.mean_zero = flag;
    }

    /// Coefficient at wavenumber `k`; zero outside the truncation.
    #[inline]
    pub fn coeff(&self, k: i64) -> Complex64 {
        let n = self.n as i64;
        if k.abs() > n {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    /// Sets the pair `(k, -k)` to `(value, conj(value))`, preserving
    /// symmetry. For `k = 0` the imaginary part must vanish.
    pub fn set_pair(&mut self, k: i64, value: Complex64) {
        let n = self.n as i64;
        assert!(k.abs() <= n, "wavenumber {k} outside truncation {n}");
        if k == 0 {
            assert!(
                value.im == 0.0,
                "coefficient at k = 0 of a real field must be real"
            );
        }
        self.coeffs[(k + n) as usize] = value;
        self.coeffs[(-k + n) as usize] = value.conj();
    }

    /// Raw mutable access used by the integrator; callers must preserve the
    /// Hermitian invariant themselves.
    #[inline]
    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    #[inline]
    pub(crate) fn coeffs_raw(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let scale = self.max_abs().max(1.0);
        for k in 0..=self.n as i64 {
            let defect = (self.coeff(k) - self.coeff(-k).conj()).norm();
            if defect > HERMITIAN_TOL * scale {
                return Err(Error::Invariant(format!(
                    "Hermitian symmetry broken at k = ±{k} (defect {defect:.3e})"
                )));
            }
        }
        Ok(())
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Spectral derivative: multiplies `c_k` by `ik`.
    pub fn derivative(&self) -> SpectralField {
        let n = self.n as i64;
        let mut out = SpectralField::zeros(self.n, true);
        for k in -n..=n {
            let c = self.coeff(k) * Complex64::new(0.0, k as f64);
            out.coeffs[(k + n) as usize] = c;
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> SpectralField {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= factor;
        }
        out
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        assert_eq!(self.n, other.n, "truncation mismatch in field addition");
        let mut out = self.clone();
        out.mean_zero = self.mean_zero && other.mean_zero;
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c += o;
        }
        out
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        assert_eq!(self.n, other.n, "truncation mismatch in field subtraction");
        let mut out = self.clone();
        out.mean_zero = self.mean_zero && other.mean_zero;
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c -= o;
        }
        out
    }

    /// Maximum coefficient-wise distance to another field.
    pub fn max_diff(&self, other: &SpectralField) -> f64 {
        let n = self.n.max(other.truncation()) as i64;
        (-n..=n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Serializable form: nonnegative modes only, negatives implied by
    /// Hermitian symmetry.
    pub fn to_json(&self) -> FieldJson {
        FieldJson {
            n: self.n,
            coeffs: (0..=self.n as i64)
                .map(|k| {
                    let c = self.coeff(k);
                    (k, c.re, c.im)
                })
                .collect(),
        }
    }

    pub fn from_json(json: &FieldJson) -> Result<Self> {
        let mut field = SpectralField::zeros(json.n, false);
        for &(k, re, im) in &json.coeffs {
            if k < 0 || k as usize > json.n {
                return Err(Error::Config(format!(
                    "serialized mode {k} outside truncation {}",
                    json.n
                )));
            }
            if k == 0 && im != 0.0 {
                return Err(Error::Invariant(
                    "serialized coefficient at k = 0 has nonzero imaginary part".into(),
                ));
            }
            field.set_pair(k, Complex64::new(re, im));
        }
        field.mean_zero = field.coeff(0).norm() == 0.0;
        Ok(field)
    }
}

/// JSON record for a field: `{N, coeffs: [[k, re, im], ...]}` with `k ≥ 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub coeffs: Vec<(i64, f64, f64)>,
}

/// Forward transform: physical samples on the grid to coefficients with the
/// 1/M normalization matching the `(1/2π)∫` convention. The output is
/// symmetrized, so Hermitian symmetry holds exactly.
pub fn dft_forward(samples: &[f64], grid: &GridSpec) -> Result<SpectralField> {
    if samples.len() != grid.physical_size() {
        return Err(Error::Config(format!(
            "sample vector has length {}, grid expects M = {}",
            samples.len(),
            grid.physical_size()
        )));
    }
    let m = grid.physical_size();
    let n = grid.truncation();
    if m < 2 * n + 1 {
        return Err(Error::Config(format!(
            "grid size M = {m} cannot resolve 2N+1 = {} modes",
            2 * n + 1
        )));
    }
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);

    let mut field = SpectralField::zeros(n, false);
    let inv_m = 1.0 / m as f64;
    for k in 0..=n as i64 {
        let pos = buf[k as usize % m] * inv_m;
        let neg = buf[((m as i64 - k) % m as i64) as usize] * inv_m;
        // Real input: project onto the Hermitian part to kill rounding skew.
        let c = 0.5 * (pos + neg.conj());
        field.set_pair(k, if k == 0 { Complex64::new(c.re, 0.0) } else { c });
    }
    Ok(field)
}

/// Inverse transform: synthesizes real samples `Σ_k c_k e^{ikx_j}` on the
/// grid. Fails if Hermitian symmetry is broken; the (tiny) imaginary residue
/// of the synthesis is discarded.
pub fn dft_inverse(field: &SpectralField, grid: &GridSpec) -> Result<Vec<f64>> {
    field.check_hermitian()?;
    let m = grid.physical_size();
    let n = field.truncation();
    if m < 2 * n + 1 {
        return Err(Error::Config(format!(
            "grid size M = {m} cannot hold 2N+1 = {} modes",
            2 * n + 1
        )));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for k in -(n as i64)..=n as i64 {
        let idx = ((k + m as i64) % m as i64) as usize;
        buf[idx] = field.coeff(k);
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    Ok(buf.into_iter().map(|c| c.re).collect())
}

/// Sobolev norm `(Σ_k ⟨k⟩^{2s} |c_k|²)^{1/2}` with `⟨k⟩ = √(1+k²)`.
/// With `homogeneous` the weight is `|k|^{2s}` and the `k = 0` term is
/// skipped (the `Ḣ^s` convention).
pub fn sobolev_norm(field: &SpectralField, s: f64, homogeneous: bool) -> f64 {
    let n = field.truncation() as i64;
    let mut sum = 0.0;
    for k in -n..=n {
        let c2 = field.coeff(k).norm_sqr();
        if c2 == 0.0 {
            continue;
        }
        let weight = if homogeneous {
            if k == 0 {
                continue;
            }
            ((k * k) as f64).powf(s)
        } else {
            (1.0 + (k * k) as f64).powf(s)
        };
        sum += weight * c2;
    }
    sum.sqrt()
}

/// Alias-free truncated convolution `(f·g)_k = Σ_{k₁+k₂=k} f_{k₁} g_{k₂}`,
/// `|k| ≤ N`, evaluated by zero-padded transforms. Agrees with the direct
/// convolution sum to rounding.
pub fn dealiased_product(
    f: &SpectralField,
    g: &SpectralField,
    grid: &GridSpec,
) -> Result<SpectralField> {
    if f.truncation() != g.truncation() {
        return Err(Error::Config(format!(
            "truncation mismatch in product: {} vs {}",
            f.truncation(),
            g.truncation()
        )));
    }
    if f.truncation() != grid.truncation() {
        return Err(Error::Config(format!(
            "field truncation {} does not match grid truncation {}",
            f.truncation(),
            grid.truncation()
        )));
    }
    let mut ws = ProductWorkspace::new(grid.truncation(), grid.physical_size());
    ws.multiply(f, g)
}

/// Reusable FFT plans and buffers for repeated products on one grid.
///
/// The work grid is grown to `> 3N` if the caller's grid sits exactly at the
/// `M = 3N` boundary, where the extreme pair `(±N, ±N)` would alias.
pub struct ProductWorkspace {
    n: usize,
    m: usize,
    forward: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inverse: std::sync::Arc<dyn rustfft::Fft<f64>>,
    scratch: Vec<Complex64>,
    buf_a: Vec<Complex64>,
    buf_b: Vec<Complex64>,
}

impl ProductWorkspace {
    pub fn new(n: usize, m: usize) -> Self {
        let m = if m > 3 * n {
            m
        } else {
            GridSpec::for_modes(n).physical_size()
        };
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        ProductWorkspace {
            n,
            m,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            buf_a: vec![Complex64::new(0.0, 0.0); m],
            buf_b: vec![Complex64::new(0.0, 0.0); m],
        }
    }

    pub fn for_grid(grid: &GridSpec) -> Self {
        Self::new(grid.truncation(), grid.physical_size())
    }

    /// Workspace on the default alias-free grid for a truncation.
    pub fn for_truncation(n: usize) -> Self {
        Self::for_grid(&GridSpec::for_modes(n))
    }

    pub fn physical_size(&self) -> usize {
        self.m
    }

    /// Fills `out` (length `M`) with the physical samples of `field`.
    pub(crate) fn synthesize(&mut self, field: &SpectralField, out: &mut [Complex64]) {
        out.fill(Complex64::new(0.0, 0.0));
        let m = self.m as i64;
        for k in -(self.n as i64)..=self.n as i64 {
            out[((k + m) % m) as usize] = field.coeff(k);
        }
        self.inverse.process_with_scratch(out, &mut self.scratch);
    }

    /// Forward-transforms physical samples in `buf` (destroyed) and returns
    /// the symmetrized truncation to `|k| ≤ N`.
    pub(crate) fn analyze(&mut self, buf: &mut [Complex64]) -> SpectralField {
        self.forward.process_with_scratch(buf, &mut self.scratch);
        let m = self.m;
        let inv_m = 1.0 / m as f64;
        let mut out = SpectralField::zeros(self.n, false);
        for k in 0..=self.n as i64 {
            let pos = buf[k as usize % m] * inv_m;
            let neg = buf[((m as i64 - k) % m as i64) as usize] * inv_m;
            let c = 0.5 * (pos + neg.conj());
            out.set_pair(k, if k == 0 { Complex64::new(c.re, 0.0) } else { c });
        }
        out
    }

    /// Physical-space samples of `field` on the workspace grid.
    pub fn to_physical(&mut self, field: &SpectralField) -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.m];
        self.synthesize(field, &mut buf);
        buf.iter().map(|c| c.re).collect()
    }

    /// Truncated alias-free product of two fields with truncation `n`.
    pub fn multiply(&mut self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        if f.truncation() != self.n || g.truncation() != self.n {
            return Err(Error::Config(format!(
                "workspace truncation {} does not match fields ({}, {})",
                self.n,
                f.truncation(),
                g.truncation()
            )));
        }
        let mut buf_a = std::mem::take(&mut self.buf_a);
        let mut buf_b = std::mem::take(&mut self.buf_b);
        self.synthesize(f, &mut buf_a);
        self.synthesize(g, &mut buf_b);
        for (x, y) in buf_a.iter_mut().zip(&buf_b) {
            // Both factors are real up to rounding; drop the imaginary parts
            // so the pointwise product stays exactly real.
            *x = Complex64::new(x.re * y.re, 0.0);
        }
        let out = self.analyze(&mut buf_a);
        self.buf_a = buf_a;
        self.buf_b = buf_b;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_field(n: usize, mean_zero: bool, rng: &mut ChaCha8Rng) -> SpectralField {
        let mut f = SpectralField::zeros(n, mean_zero);
        for k in 1..=n as i64 {
            f.set_pair(
                k,
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
        }
        if !mean_zero {
            f.set_pair(0, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
        }
        f
    }

    #[test]
    fn forward_of_constant_is_mode_zero() {
        let grid = GridSpec::for_modes(4);
        let samples = vec![1.0; grid.physical_size()];
        let field = dft_forward(&samples, &grid).unwrap();
        assert!((field.coeff(0) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        for k in 1..=4 {
            assert!(field.coeff(k).norm() < 1e-14);
        }
    }

    #[test]
    fn forward_of_cosine_hits_unit_modes() {
        // cos(x) on an 8-point grid: c_{±1} = 1/2, everything else 0.
        let grid = GridSpec::new(2, 8).unwrap();
        let samples: Vec<f64> = grid.points().iter().map(|&x| x.cos()).collect();
        let field = dft_forward(&samples, &grid).unwrap();
        assert!((field.coeff(1) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((field.coeff(-1) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!(field.coeff(0).norm() < 1e-14);
        assert!(field.coeff(2).norm() < 1e-14);
    }

    #[test]
    fn inverse_of_mode_zero_is_constant() {
        let grid = GridSpec::for_modes(3);
        let mut field = SpectralField::zeros(3, false);
        field.set_pair(0, Complex64::new(1.0, 0.0));
        let samples = dft_inverse(&field, &grid).unwrap();
        for s in samples {
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_of_unit_pair_is_cosine() {
        let grid = GridSpec::for_modes(3);
        let mut field = SpectralField::zeros(3, false);
        field.set_pair(1, Complex64::new(0.5, 0.0));
        let samples = dft_inverse(&field, &grid).unwrap();
        for (s, x) in samples.iter().zip(grid.points()) {
            assert!((s - x.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn round_trip_matches_direct_summation_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [4usize, 16, 33] {
            let grid = GridSpec::for_modes(n);
            let field = random_field(n, false, &mut rng);

            let synth = dft_inverse(&field, &grid).unwrap();
            let direct = oracle::dft_inverse_direct(&field, &grid);
            for (a, b) in synth.iter().zip(&direct) {
                assert!((a - b).abs() < 1e-12, "synthesis disagrees with direct sum");
            }

            let back = dft_forward(&synth, &grid).unwrap();
            assert!(back.max_diff(&field) < 1e-12, "round trip drifted");

            let fwd_direct = oracle::dft_forward_direct(&synth, &grid);
            assert!(back.max_diff(&fwd_direct) < 1e-12);
        }
    }

    #[test]
    fn broken_symmetry_is_rejected() {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 5];
        coeffs[0] = Complex64::new(0.3, 0.1); // k = -2
        coeffs[4] = Complex64::new(0.3, 0.1); // k = +2, should be conjugated
        assert!(matches!(
            SpectralField::from_coeffs(2, coeffs, false),
            Err(Error::Invariant(_))
        ));
    }

    #[test]
    fn sobolev_norm_examples() {
        let mut f = SpectralField::zeros(4, true);
        f.set_pair(1, Complex64::new(1.0, 0.0));
        // c_1 = 1 implies c_{-1} = 1, so the definition sum has two unit terms.
        let h0 = sobolev_norm(&f, 0.0, false);
        assert!((h0 - 2.0f64.sqrt()).abs() < 1e-14);

        let mut g = SpectralField::zeros(4, false);
        g.set_pair(2, Complex64::new(1.0, 0.0));
        // ⟨2⟩² = 5 per mode: Σ ⟨k⟩^{2s}|c_k|² = 2·25 = 50.
        let h2 = sobolev_norm(&g, 2.0, false);
        assert!((h2 - 50.0f64.sqrt()).abs() < 1e-13);

        // Homogeneous norm skips k = 0.
        let mut h = SpectralField::zeros(4, false);
        h.set_pair(0, Complex64::new(3.0, 0.0));
        h.set_pair(1, Complex64::new(1.0, 0.0));
        assert!((sobolev_norm(&h, 1.0, true) - 2.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn parseval_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 24;
        let grid = GridSpec::for_modes(n);
        let field = random_field(n, false, &mut rng);
        let samples = dft_inverse(&field, &grid).unwrap();
        let l2_phys: f64 = samples.iter().map(|s| s * s).sum::<f64>() / grid.physical_size() as f64;
        let l2_spec = sobolev_norm(&field, 0.0, false).powi(2);
        assert!((l2_phys - l2_spec).abs() < 1e-10 * l2_spec.max(1.0));
    }

    #[test]
    fn single_harmonic_squares_to_double_mode() {
        // f with only c_1 = 1 (and c_{-1} = 1): f = 2cos x, f² keeps
        // the convolution values (f·f)_2 = 1, (f·f)_0 = 2.
        let n = 4;
        let grid = GridSpec::for_modes(n);
        let mut f = SpectralField::zeros(n, true);
        f.set_pair(1, Complex64::new(1.0, 0.0));
        let p = dealiased_product(&f, &f, &grid).unwrap();
        assert!((p.coeff(2) - Complex64::new(1.0, 0.0)).norm() < 1e-13);
        assert!((p.coeff(0) - Complex64::new(2.0, 0.0)).norm() < 1e-13);
        assert!(p.coeff(1).norm() < 1e-13);
    }

    #[test]
    fn product_with_constant_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 12;
        let grid = GridSpec::for_modes(n);
        let mut one = SpectralField::zeros(n, false);
        one.set_pair(0, Complex64::new(1.0, 0.0));
        let g = random_field(n, false, &mut rng);
        let p = dealiased_product(&one, &g, &grid).unwrap();
        assert!(p.max_diff(&g) < 1e-13);
    }

    #[test]
    fn dealiased_product_matches_direct_convolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [8usize, 32, 64] {
            let grid = GridSpec::for_modes(n);
            let f = random_field(n, false, &mut rng);
            let g = random_field(n, true, &mut rng);
            let fast = dealiased_product(&f, &g, &grid).unwrap();
            let slow = oracle::convolve_direct(&f, &g);
            assert!(
                fast.max_diff(&slow) < 1e-12,
                "aliasing error at N = {n}: {:.3e}",
                fast.max_diff(&slow)
            );
        }
    }

    #[test]
    fn product_at_minimal_grid_is_still_exact() {
        // M = 3N sits exactly at the aliasing boundary for the pair (N, N);
        // the workspace pads internally so the contract still holds.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 8;
        let grid = GridSpec::new(n, 3 * n).unwrap();
        let f = random_field(n, false, &mut rng);
        let fast = dealiased_product(&f, &f, &grid).unwrap();
        let slow = oracle::convolve_direct(&f, &f);
        assert!(fast.max_diff(&slow) < 1e-12);
    }

    #[test]
    fn mismatched_truncations_are_a_config_error() {
        let f = SpectralField::zeros(4, false);
        let g = SpectralField::zeros(5, false);
        let grid = GridSpec::for_modes(4);
        assert!(matches!(
            dealiased_product(&f, &g, &grid),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn field_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let field = random_field(9, false, &mut rng);
        let json = field.to_json();
        let text = serde_json::to_string(&json).unwrap();
        let parsed: FieldJson = serde_json::from_str(&text).unwrap();
        let back = SpectralField::from_json(&parsed).unwrap();
        assert!(back.max_diff(&field) < 1e-15);
    }

    #[test]
    fn grid_validation_rejects_bad_sizes() {
        assert!(matches!(GridSpec::new(8, 23), Err(Error::Config(_)))); // odd
        assert!(matches!(GridSpec::new(8, 22), Err(Error::Config(_)))); // < 3N
        assert!(matches!(GridSpec::new(0, 24), Err(Error::Config(_))));
        assert!(GridSpec::new(8, 24).is_ok());
        // Default grids are even, alias-free and FFT-friendly.
        for n in [5usize, 16, 100, 256] {
            let g = GridSpec::for_modes(n);
            assert!(g.physical_size() > 3 * n);
            assert_eq!(g.physical_size() % 2, 0);
        }
    }

    #[test]
    fn field_json_rejects_malformed_records() {
        let json = FieldJson {
            n: 4,
            coeffs: vec![(5, 1.0, 0.0)],
        };
        assert!(matches!(
            SpectralField::from_json(&json),
            Err(Error::Config(_))
        ));
        let json = FieldJson {
            n: 4,
            coeffs: vec![(0, 1.0, 0.5)],
        };
        assert!(matches!(
            SpectralField::from_json(&json),
            Err(Error::Invariant(_))
        ));
    }
}
