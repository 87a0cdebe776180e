//! Linear hydrodynamic mode experiments: plane-wave initialization, spectral
//! amplitude extraction, frequency fitting, and the theoretical dispersion
//! relations the measurements are checked against.
//!
//! Units follow the crate convention: one step is one time unit, a grid of
//! `L` cells spans `L r` length units, so the smallest wavenumber is
//! `2π/(L r)` and fitted frequencies are directly comparable to the
//! transport formulas.

use crate::collision::RelaxationSpec;
use crate::error::{Error, Result};
use crate::fit::fit_frequencies;
use crate::solver::{GasSpec, LatticeState};
use crate::velset::VelocitySet;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

/// Perturbations above this relative size leave the linear regime.
pub const LINEAR_AMPLITUDE_BOUND: f64 = 1e-3;

/// Default perturbation amplitude: comfortably linear, comfortably above
/// round-off.
pub const DEFAULT_AMPLITUDE: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeKind {
    Shear,
    Thermal,
    Acoustic,
    All,
}

/// Relative perturbation amplitudes of the four linearized fields; velocities
/// are relative to `√θ₀`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Amplitudes {
    pub rho: f64,
    pub u_par: f64,
    pub u_perp: f64,
    pub theta: f64,
}

impl Amplitudes {
    /// Canonical excitation of one mode kind at strength `a`: transverse
    /// velocity for shear, an isobaric entropy wave for thermal, an
    /// isentropic standing compression for acoustic, and all of them for
    /// `All`.
    pub fn for_kind(kind: ModeKind, a: f64, gamma: f64) -> Self {
        match kind {
            ModeKind::Shear => Self {
                u_perp: a,
                ..Default::default()
            },
            ModeKind::Thermal => Self {
                rho: -a,
                theta: a,
                ..Default::default()
            },
            ModeKind::Acoustic => Self {
                rho: a,
                theta: (gamma - 1.0) * a,
                ..Default::default()
            },
            ModeKind::All => Self {
                rho: a,
                theta: (gamma - 1.0) * a,
                u_par: 0.0,
                u_perp: a,
            },
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.rho
            .abs()
            .max(self.u_par.abs())
            .max(self.u_perp.abs())
            .max(self.theta.abs())
    }
}

/// Full description of one mode-decay measurement.
#[derive(Clone)]
pub struct ModeExperiment {
    pub set: Arc<VelocitySet>,
    pub grid: Vec<usize>,
    pub wave_index: Vec<i64>,
    pub kind: ModeKind,
    pub amplitudes: Amplitudes,
    pub base_flow: Vec<f64>,
    pub base_theta: f64,
    pub relaxation: RelaxationSpec,
    pub gas: GasSpec,
    pub n_hermite: usize,
    /// steps discarded before fitting (kinetic transients)
    pub warmup: usize,
    /// steps in the fitting window
    pub steps: usize,
    /// overrides the internal-energy relaxation time (default `tau32`)
    pub tau_internal: Option<f64>,
}

impl ModeExperiment {
    pub fn validate(&self) -> Result<()> {
        if self.grid.len() != 2 || self.gas.dim != 2 || self.set.dim() != 2 {
            return Err(Error::InvalidExperiment(
                "mode experiments run on 2D grids".into(),
            ));
        }
        if self.wave_index.len() != 2 || self.wave_index.iter().all(|&m| m == 0) {
            return Err(Error::InvalidExperiment("wave index must be nonzero".into()));
        }
        if self.base_flow.len() != 2 {
            return Err(Error::InvalidExperiment("base flow must be 2D".into()));
        }
        let amp = self.amplitudes.max_abs();
        if amp > LINEAR_AMPLITUDE_BOUND {
            return Err(Error::AmplitudeTooLarge {
                amplitude: amp,
                bound: LINEAR_AMPLITUDE_BOUND,
            });
        }
        if !(self.base_theta > 0.0) {
            return Err(Error::NonPositiveTheta(self.base_theta));
        }
        if self.kind != ModeKind::Shear && self.n_hermite < 3 {
            return Err(Error::InvalidExperiment(
                "thermal and acoustic runs need Hermite order >= 3".into(),
            ));
        }
        Ok(())
    }

    /// Physical wave vector `k_j = 2π m_j / (L_j r)`.
    pub fn wave_vector(&self) -> Vec<f64> {
        self.wave_index
            .iter()
            .zip(&self.grid)
            .map(|(&m, &l)| 2.0 * PI * m as f64 / (l as f64 * self.set.scale()))
            .collect()
    }

    pub fn wavenumber(&self) -> f64 {
        self.wave_vector().iter().map(|k| k * k).sum::<f64>().sqrt()
    }
}

// --------------------------------------------------------------------------
// Transport coefficients and dispersion relations.

/// Transport coefficients implied by the relaxation times.
#[derive(Clone, Debug, PartialEq)]
pub struct Transport {
    pub nu: f64,
    pub nu_b: f64,
    pub kappa: f64,
    pub gamma: f64,
    /// set when a coefficient comes out non-positive
    pub advisory: Option<String>,
}

/// `ν = θ₀(τ21 - ½)`, `ν_b = 2Sθ₀/(D(D+S))(τ22 - ½)`, `κ = θ₀(τ32 - ½)`,
/// `γ = 1 + 2/(D+S)`.
pub fn transport_from_relaxation(
    spec: &RelaxationSpec,
    theta0: f64,
    gas: &GasSpec,
) -> Transport {
    let d = gas.dim as f64;
    let s = gas.s_internal as f64;
    let nu = theta0 * (spec.tau21 - 0.5);
    let nu_b = 2.0 * s * theta0 / (d * (d + s)) * (spec.tau22 - 0.5);
    let kappa = theta0 * (spec.tau32 - 0.5);
    let advisory = (nu <= 0.0 || kappa <= 0.0 || nu_b < 0.0)
        .then(|| format!("non-positive transport coefficient: nu={nu}, nu_b={nu_b}, kappa={kappa}"));
    Transport {
        nu,
        nu_b,
        kappa,
        gamma: gas.gamma(),
        advisory,
    }
}

/// The four theoretical eigenfrequencies at wavenumber `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersionTheory {
    pub omega_v: Complex64,
    pub omega_t: Complex64,
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
    /// sound attenuation rate entering `Re ω_±`
    pub alpha: f64,
    pub peclet: f64,
}

/// Dispersion relations of the four linear modes, including the leading
/// large-Péclet corrections:
///
/// ```text
/// ω_v = -ν k²
/// ω_t = -κ k² [1 + (γ-1)λ / Pe²]
/// ω_± = -α k² [1 - (γ-1)λ / ((γ-λ) Pe²)] ± i c_s k [1 - ((γ+λ)² - 4λ) / (8 Pe²)]
/// ```
///
/// with `λ = 1 - (2 - 2/D + ν_b/ν) Pr` and
/// `α = (γ-1)κ/2 + (D-1)ν/D + ν_b/2`.
pub fn theoretical_dispersion(
    nu: f64,
    nu_b: f64,
    kappa: f64,
    gamma: f64,
    dim: usize,
    k: f64,
    theta0: f64,
) -> Result<DispersionTheory> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidExperiment(format!(
            "kappa = {kappa}: Péclet number undefined"
        )));
    }
    if !(nu > 0.0) || !(k > 0.0) {
        return Err(Error::InvalidExperiment(format!(
            "need positive nu and k, got nu = {nu}, k = {k}"
        )));
    }
    let d = dim as f64;
    let cs = (gamma * theta0).sqrt();
    let pe = cs / (kappa * k);
    let pr = nu / kappa;
    let lambda = 1.0 - (2.0 - 2.0 / d + nu_b / nu) * pr;
    let alpha = 0.5 * (gamma - 1.0) * kappa + (d - 1.0) / d * nu + 0.5 * nu_b;
    if (gamma - lambda).abs() < 1e-12 {
        return Err(Error::InvalidExperiment(
            "gamma - lambda vanishes; acoustic correction undefined".into(),
        ));
    }
    let pe2 = pe * pe;
    let omega_v = Complex64::new(-nu * k * k, 0.0);
    let omega_t = Complex64::new(-kappa * k * k * (1.0 + (gamma - 1.0) * lambda / pe2), 0.0);
    let re = -alpha * k * k * (1.0 - (gamma - 1.0) * lambda / ((gamma - lambda) * pe2));
    let im = cs * k * (1.0 - ((gamma + lambda).powi(2) - 4.0 * lambda) / (8.0 * pe2));
    Ok(DispersionTheory {
        omega_v,
        omega_t,
        omega_plus: Complex64::new(re, im),
        omega_minus: Complex64::new(re, -im),
        alpha,
        peclet: pe,
    })
}

// --------------------------------------------------------------------------
// Initialization and spectral extraction.

/// Builds the perturbed initial state: every field is `base + amplitude ·
/// cos(k·x)` in its own normalization, realized as per-site truncated
/// equilibria (plus matching internal energy when `S > 0`).
pub fn init_plane_wave(exp: &ModeExperiment) -> Result<LatticeState> {
    exp.validate()?;
    let khat = unit_wave_direction(exp);
    let kperp = [-khat[1], khat[0]];
    let sqrt_theta = exp.base_theta.sqrt();
    let a = exp.amplitudes;
    let grid = exp.grid.clone();
    let wave = exp.wave_index.clone();
    let base_flow = exp.base_flow.clone();
    let base_theta = exp.base_theta;
    LatticeState::from_fields(
        &exp.grid,
        exp.set.clone(),
        exp.gas,
        exp.n_hermite,
        move |cell| {
            let phase: f64 = cell
                .iter()
                .zip(&wave)
                .zip(&grid)
                .map(|((&x, &m), &l)| 2.0 * PI * m as f64 * x as f64 / l as f64)
                .sum();
            let c = phase.cos();
            let rho = 1.0 + a.rho * c;
            let u = vec![
                base_flow[0] + sqrt_theta * (a.u_par * khat[0] + a.u_perp * kperp[0]) * c,
                base_flow[1] + sqrt_theta * (a.u_par * khat[1] + a.u_perp * kperp[1]) * c,
            ];
            let theta = base_theta * (1.0 + a.theta * c);
            (rho, u, theta)
        },
    )
}

fn unit_wave_direction(exp: &ModeExperiment) -> [f64; 2] {
    let k = exp.wave_vector();
    let norm = exp.wavenumber();
    [k[0] / norm, k[1] / norm]
}

/// Discrete Fourier amplitudes of the macroscopic perturbations at the given
/// wave index, as `(ρ̂, û_∥, û_⊥, θ̂)` in the same normalization as
/// [`Amplitudes`], with the Doppler phase of the base flow removed.
pub fn extract_amplitudes(
    state: &LatticeState,
    wave_index: &[i64],
    base_flow: &[f64],
) -> Result<[Complex64; 4]> {
    let projector = Projector::new(state, wave_index, base_flow)?;
    projector.sample(state)
}

/// Precomputed DFT phases and geometry for repeated extraction.
struct Projector {
    phases: Vec<Complex64>,
    khat: [f64; 2],
    kperp: [f64; 2],
    base_flow: [f64; 2],
    k_dot_u0: f64,
}

impl Projector {
    fn new(state: &LatticeState, wave_index: &[i64], base_flow: &[f64]) -> Result<Self> {
        let dims = state.dims();
        if dims.len() != 2 || wave_index.len() != 2 || base_flow.len() != 2 {
            return Err(Error::InvalidExperiment(
                "amplitude extraction expects a 2D state".into(),
            ));
        }
        for (&m, &l) in wave_index.iter().zip(dims) {
            if 2 * m.unsigned_abs() as usize > l {
                return Err(Error::InvalidExperiment(format!(
                    "wave index {m} beyond Nyquist for {l} cells"
                )));
            }
        }
        let r = state.set().scale();
        let k = [
            2.0 * PI * wave_index[0] as f64 / (dims[0] as f64 * r),
            2.0 * PI * wave_index[1] as f64 / (dims[1] as f64 * r),
        ];
        let norm = (k[0] * k[0] + k[1] * k[1]).sqrt();
        let khat = [k[0] / norm, k[1] / norm];
        let ncells = state.ncells();
        let mut phases = Vec::with_capacity(ncells);
        let mut cell = [0usize; 2];
        for site in 0..ncells {
            state.site_coords(site, &mut cell);
            let phase = 2.0 * PI
                * (wave_index[0] as f64 * cell[0] as f64 / dims[0] as f64
                    + wave_index[1] as f64 * cell[1] as f64 / dims[1] as f64);
            phases.push(Complex64::new(phase.cos(), -phase.sin()));
        }
        Ok(Self {
            phases,
            khat,
            kperp: [-khat[1], khat[0]],
            base_flow: [base_flow[0], base_flow[1]],
            k_dot_u0: k[0] * base_flow[0] + k[1] * base_flow[1],
        })
    }

    fn sample(&self, state: &LatticeState) -> Result<[Complex64; 4]> {
        let fields = state.macro_fields()?;
        let n = fields.rho.len() as f64;
        let rho0 = fields.rho.iter().sum::<f64>() / n;
        let theta0 = fields.theta.iter().sum::<f64>() / n;
        let sqrt_theta = theta0.sqrt();
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (site, phase) in self.phases.iter().enumerate() {
            let du = [
                fields.velocity[0][site] - self.base_flow[0],
                fields.velocity[1][site] - self.base_flow[1],
            ];
            out[0] += phase * (fields.rho[site] / rho0 - 1.0);
            out[1] += phase * ((du[0] * self.khat[0] + du[1] * self.khat[1]) / sqrt_theta);
            out[2] += phase * ((du[0] * self.kperp[0] + du[1] * self.kperp[1]) / sqrt_theta);
            out[3] += phase * (fields.theta[site] / theta0 - 1.0);
        }
        // remove the Doppler phase of the advected wave
        let doppler = Complex64::new(0.0, self.k_dot_u0 * state.time() as f64).exp();
        for v in out.iter_mut() {
            *v = *v * doppler * 2.0 / n;
        }
        Ok(out)
    }
}

// --------------------------------------------------------------------------
// The experiment driver.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeLabel {
    Viscous,
    Thermal,
    AcousticPlus,
    AcousticMinus,
}

impl ModeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModeLabel::Viscous => "viscous",
            ModeLabel::Thermal => "thermal",
            ModeLabel::AcousticPlus => "acoustic+",
            ModeLabel::AcousticMinus => "acoustic-",
        }
    }
}

/// Measured vs. theoretical eigenfrequency of one mode; `rel_error` is
/// `|measured - theoretical| / |theoretical|`.
#[derive(Clone, Copy, Debug)]
pub struct ModeMeasurement {
    pub label: ModeLabel,
    pub measured: Complex64,
    pub theoretical: Complex64,
    pub rel_error: f64,
}

/// One recorded amplitude sample.
#[derive(Clone, Copy, Debug)]
pub struct AmplitudeSample {
    pub step: u64,
    pub rho: Complex64,
    pub u_par: Complex64,
    pub u_perp: Complex64,
    pub theta: Complex64,
}

/// Outcome of a mode experiment.
#[derive(Clone, Debug)]
pub struct DispersionResult {
    pub wavenumber: f64,
    pub transport: Transport,
    pub modes: Vec<ModeMeasurement>,
    pub series: Vec<AmplitudeSample>,
    pub fit_residual: f64,
    pub warmup: usize,
}

fn rel_err(measured: Complex64, theoretical: Complex64) -> f64 {
    (measured - theoretical).norm() / theoretical.norm()
}

/// Runs the solver, records the amplitude history, fits the complex
/// frequencies and compares them with the dispersion relations.
pub fn run_mode_experiment(exp: &ModeExperiment) -> Result<DispersionResult> {
    exp.validate()?;
    let mut state = init_plane_wave(exp)?;
    let projector = Projector::new(&state, &exp.wave_index, &exp.base_flow)?;
    let total = exp.warmup + exp.steps;
    let mut series = Vec::with_capacity(total);
    for _ in 0..total {
        let v = projector.sample(&state)?;
        series.push(AmplitudeSample {
            step: state.time(),
            rho: v[0],
            u_par: v[1],
            u_perp: v[2],
            theta: v[3],
        });
        state.step(&exp.relaxation, exp.tau_internal)?;
    }

    let k = exp.wavenumber();
    let transport = transport_from_relaxation(&exp.relaxation, exp.base_theta, &exp.gas);
    let window = &series[exp.warmup..];
    let mut modes = Vec::new();
    let mut fit_residual = 0.0f64;

    if matches!(exp.kind, ModeKind::Shear | ModeKind::All) {
        let u_perp: Vec<Complex64> = window.iter().map(|s| s.u_perp).collect();
        let fit = fit_frequencies(&[&u_perp], 1)?;
        fit_residual = fit_residual.max(fit.residual);
        let theoretical = Complex64::new(-transport.nu * k * k, 0.0);
        modes.push(ModeMeasurement {
            label: ModeLabel::Viscous,
            measured: fit.frequencies[0],
            theoretical,
            rel_error: rel_err(fit.frequencies[0], theoretical),
        });
    }

    if matches!(
        exp.kind,
        ModeKind::Thermal | ModeKind::Acoustic | ModeKind::All
    ) {
        let theory = theoretical_dispersion(
            transport.nu,
            transport.nu_b,
            transport.kappa,
            transport.gamma,
            exp.gas.dim,
            k,
            exp.base_theta,
        )?;
        let rho: Vec<Complex64> = window.iter().map(|s| s.rho).collect();
        let u_par: Vec<Complex64> = window.iter().map(|s| s.u_par).collect();
        let theta: Vec<Complex64> = window.iter().map(|s| s.theta).collect();
        let fit = fit_frequencies(&[&rho, &u_par, &theta], 3)?;
        fit_residual = fit_residual.max(fit.residual);

        // the near-real root is thermal; the remaining pair is acoustic
        let mut idx: Vec<usize> = (0..3).collect();
        idx.sort_by(|&a, &b| {
            fit.frequencies[a]
                .im
                .abs()
                .partial_cmp(&fit.frequencies[b].im.abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let thermal = fit.frequencies[idx[0]];
        let (mut plus, mut minus) = (fit.frequencies[idx[1]], fit.frequencies[idx[2]]);
        if plus.im < minus.im {
            std::mem::swap(&mut plus, &mut minus);
        }
        modes.push(ModeMeasurement {
            label: ModeLabel::Thermal,
            measured: thermal,
            theoretical: theory.omega_t,
            rel_error: rel_err(thermal, theory.omega_t),
        });
        modes.push(ModeMeasurement {
            label: ModeLabel::AcousticPlus,
            measured: plus,
            theoretical: theory.omega_plus,
            rel_error: rel_err(plus, theory.omega_plus),
        });
        modes.push(ModeMeasurement {
            label: ModeLabel::AcousticMinus,
            measured: minus,
            theoretical: theory.omega_minus,
            rel_error: rel_err(minus, theory.omega_minus),
        });
    }

    Ok(DispersionResult {
        wavenumber: k,
        transport,
        modes,
        series,
        fit_residual,
        warmup: exp.warmup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::velset::d2q9;

    fn base_experiment() -> ModeExperiment {
        ModeExperiment {
            set: d2q9(),
            grid: vec![16, 16],
            wave_index: vec![1, 0],
            kind: ModeKind::Shear,
            amplitudes: Amplitudes::for_kind(ModeKind::Shear, 1e-5, 2.0),
            base_flow: vec![0.0, 0.0],
            base_theta: 1.0,
            relaxation: RelaxationSpec::uniform(0.8).unwrap(),
            gas: GasSpec::monatomic(2),
            n_hermite: 2,
            warmup: 20,
            steps: 60,
            tau_internal: None,
        }
    }

    #[test]
    fn transport_formula_values() {
        let gas = GasSpec::monatomic(2);
        let spec = RelaxationSpec::uniform(1.0).unwrap();
        let t = transport_from_relaxation(&spec, 1.0, &gas);
        assert!((t.nu - 0.5).abs() < 1e-15);
        assert!((t.kappa - 0.5).abs() < 1e-15);
        assert!(t.nu_b.abs() < 1e-15);
        assert!((t.gamma - 2.0).abs() < 1e-15);
        assert!(t.advisory.is_none());

        let gas = GasSpec::with_internal(2, 3);
        let t = transport_from_relaxation(&spec, 1.0, &gas);
        assert!((t.nu_b - 0.3).abs() < 1e-15);
        assert!((t.gamma - 1.4).abs() < 1e-15);

        let mut spec = RelaxationSpec::uniform(1.0).unwrap();
        spec.tau22 = 0.5;
        let t = transport_from_relaxation(&spec, 1.0, &gas);
        assert!(t.nu_b.abs() < 1e-15);
    }

    #[test]
    fn viscous_dispersion_is_exact_arithmetic() {
        let th = theoretical_dispersion(0.1, 0.0, 0.1, 2.0, 2, 0.2, 1.0).unwrap();
        assert!((th.omega_v.re + 0.004).abs() < 1e-15);
        assert_eq!(th.omega_v.im, 0.0);
    }

    #[test]
    fn lambda_vanishes_at_unit_prandtl_in_2d() {
        // Pr = 1, D = 2, nu_b = 0 gives lambda = 0, so the thermal correction
        // drops and alpha = (gamma-1) kappa/2 + nu/2
        let nu = 0.25;
        let th = theoretical_dispersion(nu, 0.0, nu, 2.0, 2, 0.1, 1.0).unwrap();
        let k2 = 0.01;
        assert!((th.omega_t.re + nu * k2).abs() < 1e-15);
        assert!((th.alpha - nu).abs() < 1e-15);
    }

    #[test]
    fn dispersion_rejects_zero_kappa() {
        assert!(theoretical_dispersion(0.1, 0.0, 0.0, 2.0, 2, 0.1, 1.0).is_err());
    }

    #[test]
    fn init_reproduces_configured_fields() {
        let exp = base_experiment();
        let state = init_plane_wave(&exp).unwrap();
        let got = extract_amplitudes(&state, &exp.wave_index, &exp.base_flow).unwrap();
        assert!((got[2].re - 1e-5).abs() < 1e-13);
        assert!(got[2].im.abs() < 1e-13);
        assert!(got[0].norm() < 1e-13);
        assert!(got[3].norm() < 1e-13);
    }

    #[test]
    fn zero_amplitudes_give_uniform_equilibrium() {
        let mut exp = base_experiment();
        exp.amplitudes = Amplitudes::default();
        let state = init_plane_wave(&exp).unwrap();
        let got = extract_amplitudes(&state, &exp.wave_index, &exp.base_flow).unwrap();
        for v in got {
            assert!(v.norm() < 1e-15);
        }
        let fields = state.macro_fields().unwrap();
        for &rho in &fields.rho {
            assert!((rho - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn thermal_init_keeps_mean_theta_and_uniform_pressure() {
        let mut exp = base_experiment();
        exp.kind = ModeKind::Thermal;
        exp.n_hermite = 3;
        exp.set = crate::velset::d2q37().unwrap();
        exp.amplitudes = Amplitudes::for_kind(ModeKind::Thermal, 1e-5, 2.0);
        let state = init_plane_wave(&exp).unwrap();
        let fields = state.macro_fields().unwrap();
        let n = fields.theta.len() as f64;
        let mean_theta = fields.theta.iter().sum::<f64>() / n;
        assert!((mean_theta - 1.0).abs() < 1e-12);
        for site in 0..fields.rho.len() {
            let p = fields.rho[site] * fields.theta[site];
            assert!((p - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn oversized_amplitude_is_rejected() {
        let mut exp = base_experiment();
        exp.amplitudes.u_perp = 0.01;
        assert!(matches!(
            init_plane_wave(&exp),
            Err(Error::AmplitudeTooLarge { .. })
        ));
    }

    #[test]
    fn amplitude_modulus_is_translation_invariant() {
        let exp = base_experiment();
        let state = init_plane_wave(&exp).unwrap();
        let a = extract_amplitudes(&state, &exp.wave_index, &exp.base_flow).unwrap();
        // same wave, sampled against a shifted phase origin: rebuild with a
        // phase-shifted initializer
        let shifted = LatticeState::from_fields(
            &exp.grid,
            exp.set.clone(),
            exp.gas,
            exp.n_hermite,
            |cell| {
                let phase = 2.0 * PI * ((cell[0] + 3) % 16) as f64 / 16.0;
                (
                    1.0,
                    vec![0.0, 1e-5 * phase.cos()],
                    1.0,
                )
            },
        )
        .unwrap();
        let b = extract_amplitudes(&shifted, &exp.wave_index, &exp.base_flow).unwrap();
        assert!((a[2].norm() - b[2].norm()).abs() < 1e-16);
    }
}
