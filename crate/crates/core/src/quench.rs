//! The local interaction quench `U_i → -U_i` and the J/U sweeps built on it.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dynamics::{
    evolve_krylov, evolve_spectral, expectation, full_diagonalize, ground_state, EvolvedState, KrylovOptions,
    DENSE_DIMENSION_CAP,
};
use crate::error::{Error, Result};
use crate::fock::BasisSector;
use crate::hamiltonian::{build_hamiltonian, Boundary, HamiltonianSpec};
use crate::observables::{correlation, oscillation_amplitude, ObservableSeries};

/// State the chain is in right before the quench.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialState {
    /// Ground state of the uniform Hamiltonian at `U_init`.
    #[default]
    Ground,
    /// The Fock state with one phonon per site (requires `N = L`).
    FockUnitFilling,
}

/// What happens to the interaction at the quench site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuenchProtocol {
    #[default]
    SignFlip,
    /// Post-quench Hamiltonian identical to the initial one.
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuenchSpec {
    pub sites: usize,
    pub phonons: u32,
    pub hopping: f64,
    /// Uniform interaction before the quench.
    pub interaction: f64,
    pub trap_frequency: f64,
    pub quench_site: usize,
    pub measure_site: usize,
    /// Length of the time window in units of `1/|U_init|`.
    pub t_max: f64,
    pub samples: usize,
    pub boundary: Boundary,
    pub initial_state: InitialState,
    pub protocol: QuenchProtocol,
    /// Accuracy of the Krylov path used above the dense cap.
    pub krylov_tolerance: f64,
}

impl QuenchSpec {
    pub const DEFAULT_T_MAX: f64 = 20.0;
    pub const DEFAULT_SAMPLES: usize = 400;

    /// Unit filling, central quench site, default time window.
    pub fn new(sites: usize, hopping: f64, interaction: f64) -> Self {
        let centre = Self::default_site(sites);
        QuenchSpec {
            sites,
            phonons: sites as u32,
            hopping,
            interaction,
            trap_frequency: 0.0,
            quench_site: centre,
            measure_site: centre,
            t_max: Self::DEFAULT_T_MAX,
            samples: Self::DEFAULT_SAMPLES,
            boundary: Boundary::Open,
            initial_state: InitialState::Ground,
            protocol: QuenchProtocol::SignFlip,
            krylov_tolerance: 1e-9,
        }
    }

    /// Zero-based index of the central site, `⌈L/2⌉` counted from one.
    pub fn default_site(sites: usize) -> usize {
        sites.saturating_sub(1) / 2
    }

    pub fn at_site(mut self, site: usize) -> Self {
        self.quench_site = site;
        self.measure_site = site;
        self
    }

    pub fn with_ratio(mut self, j_over_u: f64) -> Self {
        self.interaction = self.hopping / j_over_u;
        self
    }

    pub fn initial_interaction(&self) -> Vec<f64> {
        vec![self.interaction; self.sites]
    }

    pub fn final_interaction(&self) -> Vec<f64> {
        let mut u = self.initial_interaction();
        if self.protocol == QuenchProtocol::SignFlip {
            u[self.quench_site] = -self.interaction;
        }
        u
    }

    /// Uniform grid of `samples` times on `[0, t_max/|U_init|]`.
    pub fn times(&self) -> Vec<f64> {
        let end = self.t_max / self.interaction.abs();
        match self.samples {
            0 => Vec::new(),
            1 => vec![0.0],
            n => (0..n).map(|k| end * k as f64 / (n - 1) as f64).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites == 0 {
            return Err(Error::Domain("a chain needs at least one site"));
        }
        if self.quench_site >= self.sites {
            return Err(Error::Site {
                site: self.quench_site,
                sites: self.sites,
            });
        }
        if self.measure_site >= self.sites {
            return Err(Error::Site {
                site: self.measure_site,
                sites: self.sites,
            });
        }
        if !(self.interaction.is_finite() && self.interaction != 0.0) {
            return Err(Error::Domain("initial interaction must be finite and non-zero"));
        }
        if !self.hopping.is_finite() || !self.trap_frequency.is_finite() {
            return Err(Error::Domain("couplings must be finite"));
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            return Err(Error::Domain("time window must be finite and non-negative"));
        }
        if self.samples == 0 {
            return Err(Error::Input("at least one time sample is required"));
        }
        if self.initial_state == InitialState::FockUnitFilling && self.phonons as usize != self.sites {
            return Err(Error::Domain("unit filling needs as many phonons as sites"));
        }
        Ok(())
    }

    fn hamiltonian(&self, interaction: Vec<f64>) -> HamiltonianSpec {
        HamiltonianSpec {
            hopping: self.hopping,
            interaction,
            trap_frequency: self.trap_frequency,
            boundary: self.boundary,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuenchResult {
    pub spec: QuenchSpec,
    /// `<ψ(0)|H_init|ψ(0)>`; the ground energy for [`InitialState::Ground`].
    pub initial_energy: f64,
    /// `<ψ(0)|H_final|ψ(0)>`, conserved by the evolution.
    pub final_energy: f64,
    /// `|c_α|²` over the post-quench eigenbasis (empty on the Krylov path).
    pub overlap_weights: Vec<f64>,
    /// Degenerate ground levels of the initial Hamiltonian (empty if none).
    pub degenerate_levels: Vec<usize>,
    /// `t·|U_init|` for every sample.
    pub scaled_times: Vec<f64>,
    /// `n_{i0}(t)` at the measured site.
    pub zero_phonon: ObservableSeries,
    /// `<n_i>(t)` at the measured site.
    pub density: ObservableSeries,
}

impl QuenchResult {
    pub fn degeneracy_warning(&self) -> bool {
        !self.degenerate_levels.is_empty()
    }
}

/// Prepare, quench, evolve and record.
pub fn run_quench(spec: &QuenchSpec) -> Result<QuenchResult> {
    spec.validate()?;
    let sector = BasisSector::enumerate(spec.sites, spec.phonons)?;
    let initial = build_hamiltonian(&spec.hamiltonian(spec.initial_interaction()), &sector)?;
    let post = build_hamiltonian(&spec.hamiltonian(spec.final_interaction()), &sector)?;

    let (psi0, degenerate_levels) = match spec.initial_state {
        InitialState::Ground => {
            let g = ground_state(&initial)?;
            (g.complex_vector(), g.degenerate_levels)
        }
        InitialState::FockUnitFilling => {
            let mut v = vec![Complex64::new(0.0, 0.0); sector.dim()];
            v[sector.rank(&vec![1u16; spec.sites])?] = Complex64::new(1.0, 0.0);
            (v, Vec::new())
        }
    };
    let initial_energy = expectation(&initial, &psi0)?;
    let final_energy = expectation(&post, &psi0)?;

    let times = spec.times();
    let (states, overlap_weights) = if sector.dim() <= DENSE_DIMENSION_CAP {
        let sd = full_diagonalize(&post)?;
        let weights = sd.coefficients(&psi0)?.iter().map(|c| c.norm_sqr()).collect();
        (evolve_spectral(&sd, &psi0, &times)?, weights)
    } else {
        let opts = KrylovOptions::with_tolerance(spec.krylov_tolerance);
        (evolve_krylov(&post, &psi0, &times, opts)?, Vec::new())
    };

    let site = spec.measure_site;
    let (zero, density) = site_series(&states, &sector, site);
    Ok(QuenchResult {
        scaled_times: times.iter().map(|t| t * spec.interaction.abs()).collect(),
        zero_phonon: ObservableSeries {
            site,
            times: times.clone(),
            values: zero,
        },
        density: ObservableSeries {
            site,
            times,
            values: density,
        },
        spec: spec.clone(),
        initial_energy,
        final_energy,
        overlap_weights,
        degenerate_levels,
    })
}

fn site_series(states: &[EvolvedState], sector: &BasisSector, site: usize) -> (Vec<f64>, Vec<f64>) {
    let mut zero = Vec::with_capacity(states.len());
    let mut density = Vec::with_capacity(states.len());
    for s in states {
        let (mut p0, mut n) = (0.0, 0.0);
        for (k, a) in s.amplitudes.iter().enumerate() {
            let w = a.norm_sqr();
            let occ = sector.occupation(k, site);
            if occ == 0 {
                p0 += w;
            }
            n += w * f64::from(occ);
        }
        zero.push(p0);
        density.push(n);
    }
    (zero, density)
}

/// One point of the J/U sweep of the quench response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub j_over_u: f64,
    /// Peak-to-peak variation of `n_{i0}(t)`.
    pub amplitude: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub degenerate: bool,
}

/// Quench response at one J/U; `U_init` is set to `J / ratio`.
pub fn sweep_point(base: &QuenchSpec, j_over_u: f64) -> Result<SweepPoint> {
    let result = run_quench(&base.clone().with_ratio(j_over_u))?;
    let series = &result.zero_phonon;
    Ok(SweepPoint {
        j_over_u,
        amplitude: oscillation_amplitude(series)?,
        mean: series.mean().unwrap_or(0.0),
        min: series.min().unwrap_or(0.0),
        max: series.max().unwrap_or(0.0),
        degenerate: result.degeneracy_warning(),
    })
}

/// Check the ratio list of a sweep: non-empty, positive, ascending.
pub fn validate_ratios(base_hopping: f64, ratios: &[f64]) -> Result<()> {
    if ratios.is_empty() {
        return Err(Error::Input("empty J/U list"));
    }
    if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::Input("J/U values must be finite and positive"));
    }
    if ratios.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Input("J/U values must be sorted ascending"));
    }
    if !(base_hopping.is_finite() && base_hopping != 0.0) {
        return Err(Error::Domain("a J/U sweep at fixed J needs non-zero J"));
    }
    Ok(())
}

/// Quench response over a list of J/U ratios, varying `U` at fixed `J`.
/// Points are evaluated sequentially and returned in input order.
pub fn sweep_max_variation(base: &QuenchSpec, ratios: &[f64]) -> Result<Vec<SweepPoint>> {
    validate_ratios(base.hopping, ratios)?;
    ratios.iter().map(|&r| sweep_point(base, r)).collect()
}

/// Ground-state correlations at one interaction strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverPoint {
    pub j_over_u: f64,
    /// Bond-averaged nearest-neighbour `Δ`.
    pub delta_avg: f64,
    /// `Δ` on the bond between sites `(L-2)/2` and `L/2` (zero-based).
    pub delta_central: f64,
    /// Gap above the ground level, if one exists.
    pub gap: Option<f64>,
    pub degenerate: bool,
}

/// Nearest-neighbour correlations of the uniform ground state.
///
/// `Δ_{i,i+1} = <b_i^† b_{i+1}>` changes sign with `J` on a bipartite chain
/// (the gauge `b_j → (-1)^j b_j` maps `J → -J`); the reported values are
/// multiplied by `-sign(J)` so the superfluid side is positive for either
/// sign of the hopping.
pub fn crossover_point(
    sites: usize,
    phonons: u32,
    hopping: f64,
    interaction: f64,
    boundary: Boundary,
) -> Result<CrossoverPoint> {
    if sites < 2 {
        return Err(Error::Input("correlations need at least one bond (L >= 2)"));
    }
    if !(interaction.is_finite() && interaction != 0.0 && hopping.is_finite()) {
        return Err(Error::Domain("couplings must be finite with non-zero U"));
    }
    let sector = BasisSector::enumerate(sites, phonons)?;
    let h = build_hamiltonian(&HamiltonianSpec::uniform(sites, hopping, interaction).with_boundary(boundary), &sector)?;
    let g = ground_state(&h)?;
    let psi = g.complex_vector();
    let gauge = if hopping > 0.0 { -1.0 } else { 1.0 };

    let bonds: Vec<(usize, usize)> = boundary.bonds(sites).collect();
    let mut sum = 0.0;
    for &(a, b) in &bonds {
        sum += correlation(&psi, &sector, a, b)?;
    }
    let c = (sites - 2) / 2;
    let central = correlation(&psi, &sector, c, c + 1)?;
    Ok(CrossoverPoint {
        j_over_u: hopping / interaction,
        delta_avg: gauge * sum / bonds.len() as f64,
        delta_central: gauge * central,
        gap: g.gap,
        degenerate: g.is_degenerate(),
    })
}

/// Fig.-3 style crossover curve at fixed `J` over a list of `U` values.
pub fn crossover_curve(sites: usize, phonons: u32, hopping: f64, interactions: &[f64]) -> Result<Vec<CrossoverPoint>> {
    if sites < 2 {
        return Err(Error::Input("correlations need at least one bond (L >= 2)"));
    }
    if interactions.is_empty() {
        return Err(Error::Input("empty interaction list"));
    }
    if !(hopping > 0.0) || interactions.iter().any(|u| !(*u > 0.0)) {
        return Err(Error::Domain("crossover curve needs positive J and U"));
    }
    interactions
        .iter()
        .map(|&u| crossover_point(sites, phonons, hopping, u, Boundary::Open))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn final_interaction_flips_one_site() {
        let spec = QuenchSpec::new(5, 0.7, 1.0);
        assert_eq!(spec.quench_site, 2);
        assert_eq!(spec.final_interaction(), vec![1.0, 1.0, -1.0, 1.0, 1.0]);
        let same = QuenchSpec {
            protocol: QuenchProtocol::Identity,
            ..spec
        };
        assert_eq!(same.final_interaction(), vec![1.0; 5]);
    }

    #[test]
    fn time_grid() {
        let spec = QuenchSpec {
            samples: 5,
            t_max: 20.0,
            ..QuenchSpec::new(3, 1.0, 2.0)
        };
        assert_eq!(spec.times(), vec![0.0, 2.5, 5.0, 7.5, 10.0]);
        let one = QuenchSpec { samples: 1, ..spec };
        assert_eq!(one.times(), vec![0.0]);
    }

    #[test]
    fn mott_limit_has_no_response() {
        let spec = QuenchSpec {
            samples: 50,
            ..QuenchSpec::new(4, 0.0, 1.0)
        };
        let r = run_quench(&spec).unwrap();
        assert!(r.zero_phonon.values.iter().all(|&v| v.abs() < 1e-14));
        assert!(r.density.values.iter().all(|&v| (v - 1.0).abs() < 1e-14));
        assert!(!r.degeneracy_warning());
    }

    #[test]
    fn identity_quench_is_stationary() {
        let spec = QuenchSpec {
            samples: 40,
            protocol: QuenchProtocol::Identity,
            ..QuenchSpec::new(4, 0.6, 1.0)
        };
        let r = run_quench(&spec).unwrap();
        assert!(oscillation_amplitude(&r.zero_phonon).unwrap() < 1e-9);
        assert!(oscillation_amplitude(&r.density).unwrap() < 1e-9);
    }

    #[test]
    fn fock_initial_state_requires_unit_filling() {
        let spec = QuenchSpec {
            phonons: 3,
            initial_state: InitialState::FockUnitFilling,
            ..QuenchSpec::new(4, 0.5, 1.0)
        };
        assert!(matches!(run_quench(&spec), Err(Error::Domain(_))));
        let ok = QuenchSpec {
            initial_state: InitialState::FockUnitFilling,
            samples: 10,
            ..QuenchSpec::new(4, 0.5, 1.0)
        };
        let r = run_quench(&ok).unwrap();
        assert_eq!(r.zero_phonon.values[0], 0.0);
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(
            run_quench(&QuenchSpec::new(4, 0.5, 1.0).at_site(4)),
            Err(Error::Site { .. })
        ));
        assert!(matches!(run_quench(&QuenchSpec::new(4, 0.5, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn sweep_input_errors() {
        let base = QuenchSpec::new(3, 1.0, 1.0);
        assert!(matches!(sweep_max_variation(&base, &[]), Err(Error::Input(_))));
        assert!(matches!(sweep_max_variation(&base, &[0.5, 0.1]), Err(Error::Input(_))));
        assert!(matches!(sweep_max_variation(&base, &[-0.5]), Err(Error::Input(_))));
    }

    #[test]
    fn single_site_has_no_bonds() {
        assert!(matches!(crossover_curve(1, 1, 1.0, &[1.0]), Err(Error::Input(_))));
    }

    #[test]
    fn two_site_correlation_closed_form() {
        // ground state x(|20> + |02>) + y|11>, Δ = 2√2·x·y, normalized 2x² + y² = 1
        for &(j, u) in &[(0.3f64, 1.0f64), (1.0, 0.2), (2.5, 1.7)] {
            let e = u - (u * u + 4.0 * j * j).sqrt();
            // symmetric block [[2U, 2J], [2J, 0]] acting on (s, y), s = √2 x
            let (s, y): (f64, f64) = (2.0 * j, e - 2.0 * u);
            let n = (s * s + y * y).sqrt();
            let (s, y) = (s / n, y / n);
            let x = s / 2f64.sqrt();
            let delta = 2.0 * 2f64.sqrt() * x * y;
            let p = crossover_point(2, 2, j, u, Boundary::Open).unwrap();
            assert!((p.delta_avg - (-delta)).abs() < 1e-12, "{} vs {}", p.delta_avg, -delta);
            assert!(p.delta_avg > 0.0);
            assert_eq!(p.delta_avg, p.delta_central);
        }
    }
}
