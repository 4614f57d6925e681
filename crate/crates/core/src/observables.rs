//! Local observables on amplitude vectors over a [`BasisSector`].

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::dynamics::{evolve_spectral, norm, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::fock::BasisSector;

/// Imaginary part tolerated by [`correlation`] before it refuses to drop it.
pub const IMAGINARY_TOLERANCE: f64 = 1e-9;

/// A scalar observable sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub site: usize,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ObservableSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> Option<f64> {
        if self.values.is_empty() {
            None
        } else {
            Some(self.values.iter().sum::<f64>() / self.values.len() as f64)
        }
    }

    pub fn max(&self) -> Option<f64> {
        self.values.iter().copied().reduce(f64::max)
    }

    pub fn min(&self) -> Option<f64> {
        self.values.iter().copied().reduce(f64::min)
    }
}

fn check_state(state: &[Complex64], sector: &BasisSector) -> Result<()> {
    if state.len() != sector.dim() {
        return Err(Error::Dimension {
            expected: sector.dim(),
            found: state.len(),
        });
    }
    let n = norm(state);
    if (n - 1.0).abs() > 1e-6 {
        return Err(Error::Unnormalized { norm: n });
    }
    Ok(())
}

/// `<n_i>`.
pub fn local_density(state: &[Complex64], sector: &BasisSector, site: usize) -> Result<f64> {
    sector.check_site(site)?;
    check_state(state, sector)?;
    Ok(state
        .iter()
        .enumerate()
        .map(|(k, a)| a.norm_sqr() * f64::from(sector.occupation(k, site)))
        .sum())
}

/// Probability that site `site` holds exactly `m` phonons.
pub fn occupation_projection(state: &[Complex64], sector: &BasisSector, site: usize, m: u32) -> Result<f64> {
    sector.check_site(site)?;
    if m > sector.total() {
        return Err(Error::Domain("occupation exceeds the total phonon number"));
    }
    check_state(state, sector)?;
    Ok(projection_unchecked(state, sector, site, m))
}

fn projection_unchecked(state: &[Complex64], sector: &BasisSector, site: usize, m: u32) -> f64 {
    state
        .iter()
        .enumerate()
        .filter(|&(k, _)| u32::from(sector.occupation(k, site)) == m)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// `<b_i^† b_j>` for an arbitrary (complex) state.
pub fn correlation_complex(state: &[Complex64], sector: &BasisSector, i: usize, j: usize) -> Result<Complex64> {
    sector.check_site(i)?;
    sector.check_site(j)?;
    check_state(state, sector)?;
    if i == j {
        return Ok(Complex64::new(local_density(state, sector, i)?, 0.0));
    }
    let mut scratch = alloc::vec![0u16; sector.sites()];
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, occ) in sector.states().enumerate() {
        if occ[j] == 0 || state[k] == Complex64::new(0.0, 0.0) {
            continue;
        }
        let amp = (f64::from(occ[i] + 1) * f64::from(occ[j])).sqrt();
        scratch.copy_from_slice(occ);
        scratch[i] += 1;
        scratch[j] -= 1;
        let target = sector.rank_unchecked(&scratch);
        acc += state[target].conj() * state[k] * amp;
    }
    Ok(acc)
}

/// `Δ_ij = <b_i^† b_j>` for states where it is real (e.g. ground states of
/// the real symmetric Hamiltonian).
pub fn correlation(state: &[Complex64], sector: &BasisSector, i: usize, j: usize) -> Result<f64> {
    let c = correlation_complex(state, sector, i, j)?;
    if c.im.abs() > IMAGINARY_TOLERANCE {
        return Err(Error::ComplexCorrelation { imaginary: c.im });
    }
    Ok(c.re)
}

/// Peak-to-peak variation, `max - min`.
pub fn oscillation_amplitude(series: &ObservableSeries) -> Result<f64> {
    match (series.max(), series.min()) {
        (Some(hi), Some(lo)) => Ok(hi - lo),
        _ => Err(Error::Input("empty observable series")),
    }
}

/// `n_{i0}(t)` by propagating `psi0` spectrally and projecting onto the
/// zero-phonon subspace of `site`.
pub fn zero_phonon_series(
    sd: &SpectralDecomposition,
    psi0: &[Complex64],
    sector: &BasisSector,
    site: usize,
    times: &[f64],
) -> Result<ObservableSeries> {
    sector.check_site(site)?;
    let states = evolve_spectral(sd, psi0, times)?;
    Ok(ObservableSeries {
        site,
        times: times.to_vec(),
        values: states.iter().map(|s| projection_unchecked(&s.amplitudes, sector, site, 0)).collect(),
    })
}

/// Result of the literal double-eigenbasis evaluation of `n_{i0}(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiteralZeroPhonon {
    /// Cosine form, `Σ c_α^* c_β cos[(E_α - E_β)t] d_αk d_kβ`.
    pub series: ObservableSeries,
    /// `|Im Σ c_α^* c_β e^{i(E_α - E_β)t} d_αk d_kβ|` at each time.
    pub imaginary_residue: Vec<f64>,
}

/// `n_{i0}(t)` summed over pairs of eigenstates and over every basis state
/// with an empty site `site`. O(dim²) per time, meant for cross-checks.
pub fn zero_phonon_series_literal(
    sd: &SpectralDecomposition,
    psi0: &[Complex64],
    sector: &BasisSector,
    site: usize,
    times: &[f64],
) -> Result<LiteralZeroPhonon> {
    sector.check_site(site)?;
    check_state(psi0, sector)?;
    let c = sd.coefficients(psi0)?;
    let dim = sd.dim();
    let empty: Vec<usize> = (0..dim).filter(|&k| sector.occupation(k, site) == 0).collect();

    // overlap[α][β] = Σ_k0 <α|k0><k0|β>
    let mut overlap = alloc::vec![0.0; dim * dim];
    for a in 0..dim {
        let va = sd.eigenvector(a);
        for b in a..dim {
            let vb = sd.eigenvector(b);
            let s: f64 = empty.iter().map(|&k| va[k] * vb[k]).sum();
            overlap[a * dim + b] = s;
            overlap[b * dim + a] = s;
        }
    }

    let energies = sd.energies();
    let mut values = Vec::with_capacity(times.len());
    let mut residue = Vec::with_capacity(times.len());
    for &t in times {
        let mut cos_sum = 0.0;
        let mut full = Complex64::new(0.0, 0.0);
        for a in 0..dim {
            let ca = c[a].conj();
            for b in 0..dim {
                let d = overlap[a * dim + b];
                if d == 0.0 {
                    continue;
                }
                let w = ca * c[b] * d;
                let phase = (energies[a] - energies[b]) * t;
                cos_sum += (w * phase.cos()).re;
                full += w * Complex64::from_polar(1.0, phase);
            }
        }
        values.push(cos_sum);
        residue.push(full.im.abs());
    }
    Ok(LiteralZeroPhonon {
        series: ObservableSeries {
            site,
            times: times.to_vec(),
            values,
        },
        imaginary_residue: residue,
    })
}

/// `<n_i>(t)` along the spectral evolution.
pub fn density_series(
    sd: &SpectralDecomposition,
    psi0: &[Complex64],
    sector: &BasisSector,
    site: usize,
    times: &[f64],
) -> Result<ObservableSeries> {
    sector.check_site(site)?;
    let states = evolve_spectral(sd, psi0, times)?;
    let values = states
        .iter()
        .map(|s| local_density(&s.amplitudes, sector, site))
        .collect::<Result<Vec<_>>>()?;
    Ok(ObservableSeries {
        site,
        times: times.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::full_diagonalize;
    use crate::hamiltonian::{build_hamiltonian, HamiltonianSpec};
    use std::vec;
    use std::vec::Vec;

    fn fock(sector: &BasisSector, occ: &[u16]) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); sector.dim()];
        v[sector.rank(occ).unwrap()] = Complex64::new(1.0, 0.0);
        v
    }

    fn generic_state(dim: usize) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|k| Complex64::new((k as f64 * 0.71 + 0.3).sin(), (k as f64 * 1.37).cos()))
            .collect();
        let n = norm(&v);
        v.iter_mut().for_each(|z| *z /= n);
        v
    }

    #[test]
    fn density_of_fock_states() {
        let s = BasisSector::enumerate(3, 3).unwrap();
        assert_eq!(local_density(&fock(&s, &[1, 1, 1]), &s, 1).unwrap(), 1.0);
        assert!(matches!(local_density(&fock(&s, &[1, 1, 1]), &s, 3), Err(Error::Site { .. })));
    }

    #[test]
    fn density_of_uniform_superposition() {
        let s = BasisSector::enumerate(2, 2).unwrap();
        let a = 1.0 / 3f64.sqrt();
        let v = vec![Complex64::new(a, 0.0); 3];
        // (2 + 1 + 0) / 3
        assert!((local_density(&v, &s, 0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sum_rules() {
        let s = BasisSector::enumerate(4, 4).unwrap();
        let v = generic_state(s.dim());
        let total: f64 = (0..4).map(|i| local_density(&v, &s, i).unwrap()).sum();
        assert!((total - 4.0).abs() < 1e-12);
        for i in 0..4 {
            let p: f64 = (0..=4).map(|m| occupation_projection(&v, &s, i, m).unwrap()).sum();
            assert!((p - 1.0).abs() < 1e-12);
        }
        assert!(matches!(occupation_projection(&v, &s, 0, 5), Err(Error::Domain(_))));
    }

    #[test]
    fn projections_of_fock_states() {
        let s = BasisSector::enumerate(4, 4).unwrap();
        let unit = fock(&s, &[1, 1, 1, 1]);
        for i in 0..4 {
            assert_eq!(occupation_projection(&unit, &s, i, 0).unwrap(), 0.0);
        }
        let s2 = BasisSector::enumerate(2, 2).unwrap();
        assert_eq!(occupation_projection(&fock(&s2, &[2, 0]), &s2, 1, 0).unwrap(), 1.0);
    }

    #[test]
    fn correlation_identities() {
        let s = BasisSector::enumerate(3, 3).unwrap();
        let f = fock(&s, &[2, 0, 1]);
        assert_eq!(correlation(&f, &s, 0, 2).unwrap(), 0.0);
        let v = generic_state(s.dim());
        for i in 0..3 {
            let d = correlation_complex(&v, &s, i, i).unwrap();
            assert!((d.re - local_density(&v, &s, i).unwrap()).abs() < 1e-14);
            for j in 0..3 {
                let a = correlation_complex(&v, &s, i, j).unwrap();
                let b = correlation_complex(&v, &s, j, i).unwrap();
                assert!((a - b.conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn complex_correlation_is_refused() {
        let s = BasisSector::enumerate(2, 1).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let v = vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)];
        assert!(matches!(correlation(&v, &s, 0, 1), Err(Error::ComplexCorrelation { .. })));
    }

    #[test]
    fn amplitude_of_series() {
        let flat = ObservableSeries {
            site: 0,
            times: vec![0.0, 1.0],
            values: vec![0.3, 0.3],
        };
        assert_eq!(oscillation_amplitude(&flat).unwrap(), 0.0);
        let empty = ObservableSeries {
            site: 0,
            times: vec![],
            values: vec![],
        };
        assert!(matches!(oscillation_amplitude(&empty), Err(Error::Input(_))));
    }

    #[test]
    fn projector_path_matches_explicit_projector() {
        let s = BasisSector::enumerate(4, 4).unwrap();
        let spec = HamiltonianSpec {
            interaction: vec![1.0, -1.0, 1.0, 1.0],
            ..HamiltonianSpec::uniform(4, 0.6, 1.0)
        };
        let h = build_hamiltonian(&spec, &s).unwrap();
        let sd = full_diagonalize(&h).unwrap();
        let psi0 = fock(&s, &[1, 1, 1, 1]);
        let times = [0.0, 0.7, 2.9];
        let series = zero_phonon_series(&sd, &psi0, &s, 1, &times).unwrap();
        for (k, st) in evolve_spectral(&sd, &psi0, &times).unwrap().iter().enumerate() {
            // dense diagonal projector P0 on site 1, <ψ|P0|ψ>
            let d = s.dim();
            let mut p = vec![0.0; d * d];
            for r in 0..d {
                if s.state(r)[1] == 0 {
                    p[r * d + r] = 1.0;
                }
            }
            let mut expect = Complex64::new(0.0, 0.0);
            for r in 0..d {
                for c in 0..d {
                    expect += st.amplitudes[r].conj() * p[r * d + c] * st.amplitudes[c];
                }
            }
            assert!((expect.re - series.values[k]).abs() < 1e-13);
        }
    }
}
