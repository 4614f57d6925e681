//! Ion-trap hardware to Bose-Hubbard couplings, validity windows of the
//! phonon-number-conserving description, and fluorescence count rates.
//!
//! Frequencies in [`TrapParams`] and [`DerivedCouplings`] are cycle
//! frequencies in Hz. Formulas that need angular frequencies convert
//! internally.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::observables::ObservableSeries;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_8128e-12;
/// Atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Mass of a ¹³⁸Ba⁺ ion, kg.
pub const BARIUM_138_MASS: f64 = 137.905_247 * ATOMIC_MASS_UNIT;

/// Upper edge of the first stability region used as a guard on `q`.
pub const STABILITY_LIMIT: f64 = 0.9;

pub fn hz_to_angular(f: f64) -> f64 {
    2.0 * PI * f
}

pub fn angular_to_hz(w: f64) -> f64 {
    w / (2.0 * PI)
}

/// Hardware inputs of the linear Paul trap and the standing-wave laser.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapParams {
    pub rf_drive_freq: f64,
    pub stability_q: f64,
    /// Not used by any formula; kept for the record.
    pub axial_freq: f64,
    pub ion_spacing: f64,
    pub ion_mass: f64,
    /// Dipole strength `F` of the standing wave, Hz.
    pub standing_wave_strength: f64,
    pub standing_wave_lambda: f64,
    /// 0: ions at maxima of the standing wave, 1: at minima.
    pub delta_parity: u8,
    /// Modulation frequency `ω_0` of the quench actuator, Hz.
    pub quench_mod_freq: f64,
}

impl Default for TrapParams {
    fn default() -> Self {
        let rf = 15e6;
        let q = 0.42;
        TrapParams {
            rf_drive_freq: rf,
            stability_q: q,
            axial_freq: 180e3,
            ion_spacing: 20e-6,
            ion_mass: BARIUM_138_MASS,
            standing_wave_strength: q * rf / (2.0 * SQRT_2),
            standing_wave_lambda: 300e-9,
            delta_parity: 0,
            quench_mod_freq: 75e3,
        }
    }
}

impl TrapParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.rf_drive_freq,
            self.axial_freq,
            self.ion_spacing,
            self.ion_mass,
            self.standing_wave_strength,
            self.standing_wave_lambda,
            self.quench_mod_freq,
        ];
        if positive.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::Domain("trap parameters must be finite and strictly positive"));
        }
        if self.delta_parity > 1 {
            return Err(Error::Domain("delta parity must be 0 or 1"));
        }
        if !(self.stability_q > 0.0 && self.stability_q < STABILITY_LIMIT) {
            return Err(Error::Domain("stability parameter q must lie in (0, 0.9)"));
        }
        Ok(())
    }

    /// Evaluate every coupling from the hardware parameters.
    pub fn derive(&self) -> Result<DerivedCouplings> {
        self.validate()?;
        let omega_x = radial_frequency(self.rf_drive_freq, self.stability_q)?;
        let eta_x = lamb_dicke(self.standing_wave_lambda, self.ion_mass, omega_x)?;
        let hopping = hopping(self.ion_spacing, self.ion_mass, omega_x)?;
        let interaction = onsite_interaction(self.standing_wave_strength, eta_x, self.delta_parity)?;
        Ok(DerivedCouplings::new(omega_x, eta_x, hopping, interaction))
    }

    pub fn validity_report(&self) -> Result<ValidityReport> {
        let derived = self.derive()?;
        Ok(validity_report(
            &derived,
            self.quench_mod_freq,
            self.standing_wave_strength,
            derived.eta_x,
        ))
    }
}

/// Effective Bose-Hubbard couplings of the radial phonons, Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCouplings {
    pub omega_x: f64,
    pub eta_x: f64,
    pub hopping: f64,
    pub interaction: f64,
    pub beta_x: f64,
}

impl DerivedCouplings {
    pub fn new(omega_x: f64, eta_x: f64, hopping: f64, interaction: f64) -> Self {
        DerivedCouplings {
            omega_x,
            eta_x,
            hopping,
            interaction,
            beta_x: 2.0 * hopping / omega_x,
        }
    }

    pub fn j_over_u(&self) -> f64 {
        self.hopping / self.interaction
    }
}

/// Lowest-order pseudopotential radial frequency `q Ω_rf / (2√2)`.
pub fn radial_frequency(rf_drive_freq: f64, stability_q: f64) -> Result<f64> {
    if !(stability_q > 0.0 && stability_q < STABILITY_LIMIT) {
        return Err(Error::Domain("stability parameter q must lie in (0, 0.9)"));
    }
    if !(rf_drive_freq > 0.0 && rf_drive_freq.is_finite()) {
        return Err(Error::Domain("rf drive frequency must be positive"));
    }
    Ok(stability_q * rf_drive_freq / (2.0 * SQRT_2))
}

/// Lamb-Dicke parameter `k x_0 = (2π/λ) √(ħ / (2 m ω_x))`.
pub fn lamb_dicke(lambda: f64, ion_mass: f64, omega_x_hz: f64) -> Result<f64> {
    require_positive(&[lambda, ion_mass, omega_x_hz])?;
    let zero_point = (HBAR / (2.0 * ion_mass * hz_to_angular(omega_x_hz))).sqrt();
    Ok(2.0 * PI / lambda * zero_point)
}

/// Coulomb-mediated phonon hopping `e² / (4πε₀ d³) / (2 m ω_x)`, in Hz.
pub fn hopping(ion_spacing: f64, ion_mass: f64, omega_x_hz: f64) -> Result<f64> {
    require_positive(&[ion_spacing, ion_mass, omega_x_hz])?;
    let coulomb = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (4.0 * PI * VACUUM_PERMITTIVITY * ion_spacing.powi(3));
    let angular = coulomb / (2.0 * ion_mass * hz_to_angular(omega_x_hz));
    Ok(angular_to_hz(angular))
}

/// On-site interaction `U = 2 (-1)^δ F η⁴`, in the units of `F`.
pub fn onsite_interaction(strength: f64, eta_x: f64, delta_parity: u8) -> Result<f64> {
    require_positive(&[strength])?;
    if delta_parity > 1 {
        return Err(Error::Domain("delta parity must be 0 or 1"));
    }
    let sign = if delta_parity == 0 { 1.0 } else { -1.0 };
    Ok(2.0 * sign * strength * eta_x.powi(4))
}

fn require_positive(values: &[f64]) -> Result<()> {
    if values.iter().all(|x| x.is_finite() && *x > 0.0) {
        Ok(())
    } else {
        Err(Error::Domain("inputs must be finite and strictly positive"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    Marginal,
    Fail,
}

impl Verdict {
    pub const PASS_BELOW: f64 = 0.1;
    pub const MARGINAL_BELOW: f64 = 0.25;

    pub fn of_ratio(ratio: f64) -> Self {
        if ratio <= Self::PASS_BELOW {
            Verdict::Pass
        } else if ratio <= Self::MARGINAL_BELOW {
            Verdict::Marginal
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Marginal => "marginal",
            Verdict::Fail => "fail",
        }
    }
}

/// One separation-of-scales condition expressed as a small ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityCheck {
    pub name: &'static str,
    pub condition: &'static str,
    pub ratio: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub checks: Vec<ValidityCheck>,
}

impl ValidityReport {
    pub fn worst(&self) -> Verdict {
        self.checks.iter().map(|c| c.verdict).max().unwrap_or(Verdict::Pass)
    }

    pub fn get(&self, name: &str) -> Option<&ValidityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Evaluate the scale separations `J,U ≪ ω_x`, `ω_x ≫ ω_0 ≫ J,U` and
/// `F η² ≪ ω_x`. All frequencies in Hz.
pub fn validity_report(derived: &DerivedCouplings, omega_0: f64, strength: f64, eta_x: f64) -> ValidityReport {
    let coupling = derived.hopping.abs().max(derived.interaction.abs());
    let check = |name, condition, ratio: f64| ValidityCheck {
        name,
        condition,
        ratio,
        verdict: Verdict::of_ratio(ratio),
    };
    ValidityReport {
        checks: alloc::vec![
            check("number_conservation", "max(J,U) << omega_x", coupling / derived.omega_x),
            check("drive_below_trap", "omega_0 << omega_x", omega_0 / derived.omega_x),
            check("drive_above_couplings", "max(J,U) << omega_0", coupling / omega_0),
            check("weak_standing_wave", "F eta_x^2 << omega_x", strength * eta_x * eta_x / derived.omega_x),
        ],
    }
}

/// How the decay rate `Γ` follows from the excited-state lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Linewidth {
    /// `Γ = 1/τ`.
    #[default]
    InverseLifetime,
    /// `Γ = 2π/τ`.
    Angular,
}

/// Fluorescence collection chain.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionParams {
    pub branching: f64,
    pub numerical_aperture: f64,
    pub lifetime: f64,
    pub quantum_efficiency: f64,
    pub optics_factor: f64,
    /// Fixed solid-angle fraction replacing the value computed from the
    /// numerical aperture.
    pub solid_angle: Option<f64>,
    pub linewidth: Linewidth,
}

impl Default for DetectionParams {
    fn default() -> Self {
        DetectionParams {
            branching: 0.73,
            numerical_aperture: 0.4,
            lifetime: 7.8e-9,
            quantum_efficiency: 0.5,
            optics_factor: 0.1,
            solid_angle: None,
            linewidth: Linewidth::InverseLifetime,
        }
    }
}

impl DetectionParams {
    pub fn validate(&self) -> Result<()> {
        let unit = [
            self.branching,
            self.numerical_aperture,
            self.quantum_efficiency,
            self.optics_factor,
        ];
        if unit.iter().any(|x| !(*x > 0.0 && *x <= 1.0)) {
            return Err(Error::Domain("detection efficiencies must lie in (0, 1]"));
        }
        if !(self.lifetime > 0.0 && self.lifetime.is_finite()) {
            return Err(Error::Domain("excited-state lifetime must be positive"));
        }
        if let Some(w) = self.solid_angle {
            if !(w > 0.0 && w <= 0.5) {
                return Err(Error::Domain("solid-angle fraction must lie in (0, 0.5]"));
            }
        }
        Ok(())
    }

    pub fn solid_angle_fraction(&self) -> Result<f64> {
        match self.solid_angle {
            Some(w) => Ok(w),
            None => solid_angle_fraction(self.numerical_aperture),
        }
    }

    pub fn decay_rate(&self) -> f64 {
        match self.linewidth {
            Linewidth::InverseLifetime => 1.0 / self.lifetime,
            Linewidth::Angular => 2.0 * PI / self.lifetime,
        }
    }
}

/// Fraction of the full sphere collected by a lens, `½[1 - √(1 - NA²)]`.
pub fn solid_angle_fraction(numerical_aperture: f64) -> Result<f64> {
    if !(numerical_aperture > 0.0 && numerical_aperture < 1.0) {
        return Err(Error::Domain("numerical aperture must lie in (0, 1)"));
    }
    Ok(0.5 * (1.0 - (1.0 - numerical_aperture * numerical_aperture).sqrt()))
}

/// `<R> = f ω Γ Q_e Q_o / 2`, photons per second at unit zero-phonon population.
pub fn mean_count_rate(det: &DetectionParams) -> Result<f64> {
    det.validate()?;
    Ok(det.branching * det.solid_angle_fraction()? * det.decay_rate() * det.quantum_efficiency * det.optics_factor / 2.0)
}

/// Scale a zero-phonon series into photon counts per second.
///
/// The input time axis is dimensionless `t·U`. With `interaction_hz` set it
/// is converted to seconds using `U` (Hz) of the run; otherwise it is kept.
pub fn photon_series(
    n_series: &ObservableSeries,
    det: &DetectionParams,
    interaction_hz: Option<f64>,
) -> Result<ObservableSeries> {
    const SLACK: f64 = 1e-9;
    if n_series.values.iter().any(|v| !(*v >= -SLACK && *v <= 1.0 + SLACK)) {
        return Err(Error::Input("zero-phonon populations must lie in [0, 1]"));
    }
    let rate = mean_count_rate(det)?;
    let times = match interaction_hz {
        Some(u) => {
            require_positive(&[u.abs()])?;
            let w = hz_to_angular(u.abs());
            n_series.times.iter().map(|tu| tu / w).collect()
        }
        None => n_series.times.clone(),
    };
    Ok(ObservableSeries {
        site: n_series.site,
        times,
        values: n_series.values.iter().map(|v| v * rate).collect(),
    })
}
