//! Bose-Hubbard operator with per-site interaction strengths:
//!
//! `H = J Σ_<ij> (b_i^† b_j + h.c.) + Σ_j U_j n_j (n_j - 1) + ω_x Σ_j n_j`
//!
//! assembled as a real symmetric matrix on a [`BasisSector`].

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fock::BasisSector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

impl Boundary {
    /// Nearest-neighbour bonds `(j, j+1)` of a chain with `sites` sites.
    /// A two-site ring has a single bond.
    pub fn bonds(self, sites: usize) -> impl Iterator<Item = (usize, usize)> {
        let count = match self {
            Boundary::Open => sites.saturating_sub(1),
            Boundary::Periodic if sites > 2 => sites,
            Boundary::Periodic => sites.saturating_sub(1),
        };
        (0..count).map(move |j| (j, (j + 1) % sites))
    }
}

/// Couplings of one Hamiltonian. Energies are angular frequencies (ħ = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub hopping: f64,
    pub interaction: Vec<f64>,
    pub trap_frequency: f64,
    pub boundary: Boundary,
}

impl HamiltonianSpec {
    pub fn uniform(sites: usize, hopping: f64, interaction: f64) -> Self {
        HamiltonianSpec {
            hopping,
            interaction: vec![interaction; sites],
            trap_frequency: 0.0,
            boundary: Boundary::Open,
        }
    }

    pub fn with_trap_frequency(mut self, omega_x: f64) -> Self {
        self.trap_frequency = omega_x;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn sites(&self) -> usize {
        self.interaction.len()
    }

    fn validate(&self, sector: &BasisSector) -> Result<()> {
        if self.interaction.len() != sector.sites() {
            return Err(Error::Spec("interaction list length differs from the number of sites"));
        }
        if !self.hopping.is_finite() || !self.trap_frequency.is_finite() {
            return Err(Error::Spec("hopping and trap frequency must be finite"));
        }
        if self.interaction.iter().any(|u| !u.is_finite()) {
            return Err(Error::Spec("interaction strengths must be finite"));
        }
        Ok(())
    }
}

/// Real symmetric matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_offsets: Vec<usize>,
    columns: Vec<usize>,
    values: Vec<f64>,
    hermitian: bool,
}

impl SparseOperator {
    /// Compress coordinate triplets; duplicate coordinates are summed.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, f64)>, hermitian: bool) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|&&(r, c, _)| r >= dim || c >= dim) {
            return Err(Error::Range {
                index: r.max(c),
                dim,
            });
        }
        triplets.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_offsets = vec![0usize; dim + 1];
        let mut columns = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            row_offsets[r + 1] += 1;
            columns.push(c);
            values.push(v);
        }
        for r in 0..dim {
            row_offsets[r + 1] += row_offsets[r];
        }
        Ok(SparseOperator {
            dim,
            row_offsets,
            columns,
            values,
            hermitian,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Stored `(row, col, value)` entries in row order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_offsets[r]..self.row_offsets[r + 1]).map(move |k| (r, self.columns[k], self.values[k]))
        })
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for (r, c, v) in self.entries() {
            if r == c {
                d[r] += v;
            }
        }
        d
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim * self.dim];
        for (r, c, v) in self.entries() {
            m[r * self.dim + c] += v;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|H_rc - H_cr|` found by comparing against the explicit transpose.
    pub fn max_asymmetry(&self) -> f64 {
        let transposed: Vec<(usize, usize, f64)> = self.entries().map(|(r, c, v)| (c, r, v)).collect();
        let t = SparseOperator::from_triplets(self.dim, transposed, false).expect("indices already validated");
        let mut diff: Vec<(usize, usize, f64)> = self.entries().collect();
        diff.extend(t.entries().map(|(r, c, v)| (r, c, -v)));
        let d = SparseOperator::from_triplets(self.dim, diff, false).expect("indices already validated");
        d.max_abs()
    }

    /// Row-sum bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.values[self.row_offsets[r]..self.row_offsets[r + 1]].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `op · v` for a complex amplitude vector.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        self.check_len(v.len())?;
        self.check_len(out.len())?;
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_offsets[r]..self.row_offsets[r + 1] {
                acc += v[self.columns[k]] * self.values[k];
            }
            *o = acc;
        }
        Ok(())
    }

    /// `op · v` for a real vector.
    pub fn apply_real(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v.len())?;
        Ok((0..self.dim)
            .map(|r| {
                (self.row_offsets[r]..self.row_offsets[r + 1])
                    .map(|k| self.values[k] * v[self.columns[k]])
                    .sum()
            })
            .collect())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.dim {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.dim,
                found: len,
            })
        }
    }
}

/// Assemble the Bose-Hubbard operator on `sector`.
pub fn build_hamiltonian(spec: &HamiltonianSpec, sector: &BasisSector) -> Result<SparseOperator> {
    spec.validate(sector)?;
    let sites = sector.sites();
    let total = f64::from(sector.total());
    let bonds: Vec<(usize, usize)> = spec.boundary.bonds(sites).collect();
    let mut triplets = Vec::with_capacity(sector.dim() * (1 + 2 * bonds.len()));
    let mut scratch = vec![0u16; sites];

    for (col, state) in sector.states().enumerate() {
        let interaction: f64 = state
            .iter()
            .zip(&spec.interaction)
            .map(|(&n, &u)| {
                let n = f64::from(n);
                u * n * (n - 1.0)
            })
            .sum();
        triplets.push((col, col, interaction + spec.trap_frequency * total));

        if spec.hopping == 0.0 {
            continue;
        }
        for &(a, b) in &bonds {
            // b_a^† b_b and b_b^† b_a acting on this column
            for (to, from) in [(a, b), (b, a)] {
                if state[from] == 0 {
                    continue;
                }
                let amp = spec.hopping * (f64::from(state[to] + 1) * f64::from(state[from])).sqrt();
                scratch.copy_from_slice(state);
                scratch[to] += 1;
                scratch[from] -= 1;
                let row = sector.rank_unchecked(&scratch);
                triplets.push((row, col, amp));
            }
        }
    }
    SparseOperator::from_triplets(sector.dim(), triplets, true)
}
