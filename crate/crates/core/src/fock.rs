//! Fixed-particle-number Fock sector of `N` bosons on `L` sites.
//!
//! States are ordered lexicographically descending on the occupation vector,
//! so `(N, 0, …, 0)` has ordinal 0 and `(0, …, 0, N)` is last. Ranking and
//! unranking use a table of composition counts and cost O(L) and O(L·N).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Default upper bound on the number of basis states in a sector.
pub const DEFAULT_DIMENSION_CAP: usize = 200_000;

/// Occupation vector `(n_1, …, n_L)` of one basis ket.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState(Vec<u16>);

impl FockState {
    pub fn new(occupations: Vec<u16>) -> Self {
        FockState(occupations)
    }

    pub fn occupations(&self) -> &[u16] {
        &self.0
    }

    pub fn sites(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&n| u64::from(n)).sum()
    }

    pub fn into_inner(self) -> Vec<u16> {
        self.0
    }
}

impl From<Vec<u16>> for FockState {
    fn from(v: Vec<u16>) -> Self {
        FockState(v)
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, n) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str(")")
    }
}

/// Number of basis states `C(N+L-1, L-1)`, or `None` on overflow of `u128`.
pub fn sector_dimension(sites: usize, total: u32) -> Option<u128> {
    if sites == 0 {
        return Some(u128::from(total == 0));
    }
    // C(n + k, k) with k = L - 1, n = N, accumulated so every prefix is an integer.
    let k = (sites - 1) as u128;
    let n = u128::from(total);
    let k = k.min(n);
    let top = u128::from(total) + (sites as u128 - 1);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc.checked_mul(top - k + i)? / i;
    }
    Some(acc)
}

/// The enumerated sector together with its ranking table. Immutable once built.
#[derive(Debug, Clone)]
pub struct BasisSector {
    sites: usize,
    total: u16,
    dim: usize,
    occupations: Vec<u16>,
    // compositions[p * (N + 1) + m] = number of ways to put m phonons on p sites
    compositions: Vec<u64>,
}

impl BasisSector {
    /// Enumerate the sector with the default dimension cap.
    pub fn enumerate(sites: usize, total: u32) -> Result<Self> {
        Self::enumerate_with_cap(sites, total, DEFAULT_DIMENSION_CAP)
    }

    pub fn enumerate_with_cap(sites: usize, total: u32, cap: usize) -> Result<Self> {
        if sites == 0 {
            return Err(Error::Domain("a chain needs at least one site"));
        }
        let total16 = u16::try_from(total)
            .map_err(|_| Error::Domain("total phonon number exceeds the 16-bit occupation range"))?;
        let dim = sector_dimension(sites, total).unwrap_or(u128::MAX);
        if dim > cap as u128 {
            return Err(Error::Sizing {
                what: "Fock sector",
                dimension: dim,
                cap,
            });
        }
        let dim = dim as usize;
        let compositions = composition_table(sites, total16);

        let mut occupations = Vec::with_capacity(dim * sites);
        let mut state = vec![0u16; sites];
        state[0] = total16;
        loop {
            occupations.extend_from_slice(&state);
            if !advance_descending(&mut state) {
                break;
            }
        }
        debug_assert_eq!(occupations.len(), dim * sites);

        Ok(BasisSector {
            sites,
            total: total16,
            dim,
            occupations,
            compositions,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn total(&self) -> u32 {
        u32::from(self.total)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Occupations of basis state `k`. Panics if `k >= dim`.
    pub fn state(&self, k: usize) -> &[u16] {
        &self.occupations[k * self.sites..(k + 1) * self.sites]
    }

    pub fn occupation(&self, k: usize, site: usize) -> u16 {
        self.occupations[k * self.sites + site]
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = &[u16]> + '_ {
        self.occupations.chunks_exact(self.sites)
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site < self.sites {
            Ok(())
        } else {
            Err(Error::Site {
                site,
                sites: self.sites,
            })
        }
    }

    fn compositions(&self, parts: usize, phonons: usize) -> u64 {
        self.compositions[parts * (self.total as usize + 1) + phonons]
    }

    /// Ordinal of an occupation vector in the sector.
    pub fn rank(&self, occupations: &[u16]) -> Result<usize> {
        let total: u64 = occupations.iter().map(|&n| u64::from(n)).sum();
        if occupations.len() != self.sites || total != u64::from(self.total) {
            return Err(Error::Membership {
                expected_sites: self.sites,
                expected_total: u32::from(self.total),
                sites: occupations.len(),
                total,
            });
        }
        Ok(self.rank_unchecked(occupations))
    }

    /// Ordinal of a state already known to be in the sector.
    pub(crate) fn rank_unchecked(&self, occupations: &[u16]) -> usize {
        let mut remaining = self.total as usize;
        let mut ordinal = 0u64;
        for (j, &n) in occupations[..self.sites - 1].iter().enumerate() {
            let n = n as usize;
            // States with a larger occupation at position j precede this one:
            // compositions of (remaining - v) over the trailing sites, summed
            // over v > n, collapse to one count with an extra part.
            if remaining > n {
                let trailing = self.sites - 1 - j;
                ordinal += self.compositions(trailing + 1, remaining - n - 1);
            }
            remaining -= n;
        }
        ordinal as usize
    }

    pub fn rank_state(&self, state: &FockState) -> Result<usize> {
        self.rank(state.occupations())
    }

    /// Inverse of [`rank`](Self::rank), computed from the ranking table.
    pub fn unrank(&self, ordinal: usize) -> Result<FockState> {
        if ordinal >= self.dim {
            return Err(Error::Range {
                index: ordinal,
                dim: self.dim,
            });
        }
        let mut rest = ordinal as u64;
        let mut remaining = self.total as usize;
        let mut out = vec![0u16; self.sites];
        for (j, slot) in out[..self.sites - 1].iter_mut().enumerate() {
            let trailing = self.sites - 1 - j;
            let mut v = remaining;
            loop {
                let block = self.compositions(trailing, remaining - v);
                if rest < block {
                    break;
                }
                rest -= block;
                v -= 1;
            }
            *slot = v as u16;
            remaining -= v;
        }
        out[self.sites - 1] = remaining as u16;
        Ok(FockState(out))
    }
}

/// Free-function form of [`BasisSector::enumerate`].
pub fn enumerate_sector(sites: usize, total: u32) -> Result<BasisSector> {
    BasisSector::enumerate(sites, total)
}

fn composition_table(sites: usize, total: u16) -> Vec<u64> {
    let width = total as usize + 1;
    let mut table = vec![0u64; (sites + 1) * width];
    table[0] = 1;
    for p in 1..=sites {
        let mut running = 0u64;
        for m in 0..width {
            running = running.saturating_add(table[(p - 1) * width + m]);
            table[p * width + m] = running;
        }
    }
    table
}

/// Step to the next occupation vector in descending lexicographic order.
fn advance_descending(state: &mut [u16]) -> bool {
    let last = state.len() - 1;
    let Some(j) = state[..last].iter().rposition(|&n| n > 0) else {
        return false;
    };
    let tail: u16 = state[j + 1..].iter().sum();
    state[j] -= 1;
    for n in &mut state[j + 1..] {
        *n = 0;
    }
    state[j + 1] = tail + 1;
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    // Independent enumeration: recursive generation of every composition.
    fn brute_force(sites: usize, total: u16) -> Vec<Vec<u16>> {
        fn go(prefix: &mut Vec<u16>, sites: usize, left: u16, out: &mut Vec<Vec<u16>>) {
            if prefix.len() == sites - 1 {
                prefix.push(left);
                out.push(prefix.clone());
                prefix.pop();
                return;
            }
            for v in 0..=left {
                prefix.push(v);
                go(prefix, sites, left - v, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        go(&mut Vec::new(), sites, total, &mut out);
        out
    }

    #[test]
    fn single_site_holds_everything() {
        let s = BasisSector::enumerate(1, 3).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.state(0), &[3]);
        assert_eq!(s.unrank(0).unwrap().occupations(), &[3]);
        let s = BasisSector::enumerate(1, 7).unwrap();
        assert_eq!(s.unrank(0).unwrap(), FockState::new(vec![7]));
    }

    #[test]
    fn two_site_order_is_descending() {
        let s = BasisSector::enumerate(2, 2).unwrap();
        let states: Vec<_> = s.states().map(|x| x.to_vec()).collect();
        assert_eq!(states, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(s.rank(&[1, 1]).unwrap(), 1);
    }

    #[test]
    fn five_by_five_matches_recursive_enumeration() {
        let s = BasisSector::enumerate(5, 5).unwrap();
        let oracle = brute_force(5, 5);
        assert_eq!(oracle.len(), 126);
        assert_eq!(s.dim(), 126);
        let mine: BTreeSet<Vec<u16>> = s.states().map(|x| x.to_vec()).collect();
        let theirs: BTreeSet<Vec<u16>> = oracle.into_iter().collect();
        assert_eq!(mine, theirs);
    }

    #[test]
    fn exhaustive_small_sectors() {
        for sites in 1..=6usize {
            for total in 0..=6u16 {
                let s = BasisSector::enumerate(sites, u32::from(total)).unwrap();
                let expected = sector_dimension(sites, u32::from(total)).unwrap() as usize;
                assert_eq!(s.dim(), expected);
                assert_eq!(s.dim(), brute_force(sites, total).len());
                let distinct: BTreeSet<&[u16]> = s.states().collect();
                assert_eq!(distinct.len(), s.dim());
                for (k, st) in s.states().enumerate() {
                    assert_eq!(st.iter().sum::<u16>(), total);
                    assert_eq!(s.rank(st).unwrap(), k);
                    assert_eq!(s.unrank(k).unwrap().occupations(), st);
                }
                // strictly descending
                for w in s.occupations.chunks_exact(sites).collect::<Vec<_>>().windows(2) {
                    assert!(w[0] > w[1]);
                }
            }
        }
    }

    #[test]
    fn rank_matches_linear_scan() {
        let s = BasisSector::enumerate(3, 5).unwrap();
        assert_eq!(s.dim(), 21);
        let scan = s.states().position(|x| x == [0, 0, 5]).unwrap();
        let r = s.rank(&[0, 0, 5]).unwrap();
        assert_eq!(r, scan);
        assert!(r < 21);
    }

    #[test]
    fn four_by_four_round_trip() {
        let s = BasisSector::enumerate(4, 4).unwrap();
        assert_eq!(s.dim(), 35);
        for k in 0..35 {
            assert_eq!(s.rank_state(&s.unrank(k).unwrap()).unwrap(), k);
        }
    }

    #[test]
    fn membership_and_range_errors() {
        let s = BasisSector::enumerate(2, 2).unwrap();
        assert!(matches!(s.rank(&[2, 1]), Err(Error::Membership { total: 3, .. })));
        assert!(matches!(s.rank(&[2]), Err(Error::Membership { .. })));
        let s = BasisSector::enumerate(5, 5).unwrap();
        assert_eq!(s.unrank(126), Err(Error::Range { index: 126, dim: 126 }));
    }

    #[test]
    fn zero_sites_and_cap() {
        assert!(matches!(BasisSector::enumerate(0, 3), Err(Error::Domain(_))));
        match BasisSector::enumerate_with_cap(5, 5, 100) {
            Err(Error::Sizing { dimension, cap, .. }) => {
                assert_eq!(dimension, 126);
                assert_eq!(cap, 100);
            }
            other => panic!("expected sizing error, got {other:?}"),
        }
        assert!(matches!(
            BasisSector::enumerate(40, 40),
            Err(Error::Sizing { .. })
        ));
    }

    #[test]
    fn empty_sector_has_one_state() {
        let s = BasisSector::enumerate(3, 0).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.state(0), &[0, 0, 0]);
    }
}
