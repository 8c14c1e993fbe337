//! Fixed-particle-number determinant spaces.
//!
//! A determinant is a pair of per-spin occupation masks. Mode `p` of an
//! `n`-mode mask is bit `n - 1 - p`, so numeric order of masks is the
//! lexicographic order of their printed strings. The combined label is
//! `(up << n) | down`. Fermionic signs follow the mode order
//! `(0↑, …, (n-1)↑, 0↓, …, (n-1)↓)`.

use std::sync::OnceLock;

use crate::{Error, Result};

/// Largest mode count whose combined label fits in a `u64` label.
pub const MAX_MODES: usize = 31;

/// Bit carrying mode `p` in an `n`-mode mask.
#[inline]
pub fn mode_bit(n: usize, p: usize) -> u64 {
    1u64 << (n - 1 - p)
}

/// Number of occupied modes with index below `p`.
#[inline]
fn below(mask: u64, n: usize, p: usize) -> u32 {
    (mask >> (n - p)).count_ones()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];
}

/// `a_{pσ}` on the determinant `(up, down)`; returns the sign or `None`
/// when the mode is empty.
pub fn annihilate(det: &mut (u64, u64), n: usize, p: usize, spin: Spin) -> Option<f64> {
    let bit = mode_bit(n, p);
    let (mask, offset) = match spin {
        Spin::Up => (&mut det.0, 0),
        Spin::Down => (&mut det.1, det.0.count_ones()),
    };
    if *mask & bit == 0 {
        return None;
    }
    let parity = offset + below(*mask, n, p);
    *mask &= !bit;
    Some(if parity % 2 == 1 { -1.0 } else { 1.0 })
}

/// `a†_{pσ}` on the determinant `(up, down)`; `None` when the mode is full.
pub fn create(det: &mut (u64, u64), n: usize, p: usize, spin: Spin) -> Option<f64> {
    let bit = mode_bit(n, p);
    let (mask, offset) = match spin {
        Spin::Up => (&mut det.0, 0),
        Spin::Down => (&mut det.1, det.0.count_ones()),
    };
    if *mask & bit != 0 {
        return None;
    }
    let parity = offset + below(*mask, n, p);
    *mask |= bit;
    Some(if parity % 2 == 1 { -1.0 } else { 1.0 })
}

/// `a†_p a_q` within one spin species, whose sign never depends on the other
/// species. Returns the new mask and the sign.
#[inline]
pub fn hop(mask: u64, n: usize, p: usize, q: usize) -> Option<(u64, f64)> {
    let bq = mode_bit(n, q);
    if mask & bq == 0 {
        return None;
    }
    if p == q {
        return Some((mask, 1.0));
    }
    let bp = mode_bit(n, p);
    let removed = mask & !bq;
    if removed & bp != 0 {
        return None;
    }
    let parity = below(mask, n, q) + below(removed, n, p);
    Some((removed | bp, if parity % 2 == 1 { -1.0 } else { 1.0 }))
}

/// One entry of a per-spin excitation table: `a†_p a_q |s⟩ = sign |target⟩`.
#[derive(Clone, Copy, Debug)]
pub struct Excitation {
    pub target: u32,
    pub p: u8,
    pub q: u8,
    pub sign: f64,
}

/// Every `a†_p a_q` (including `p == q`) applied to every string of one spin
/// species, stored row by row.
#[derive(Debug)]
pub struct ExcitationTable {
    offsets: Vec<usize>,
    entries: Vec<Excitation>,
}

impl ExcitationTable {
    pub fn row(&self, i: usize) -> &[Excitation] {
        &self.entries[self.offsets[i]..self.offsets[i + 1]]
    }
}

/// The binomial table `C(m, k)` for `m, k ≤ MAX_MODES`.
fn binomials() -> &'static [[u64; MAX_MODES + 1]; MAX_MODES + 1] {
    static TABLE: OnceLock<[[u64; MAX_MODES + 1]; MAX_MODES + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut c = [[0u64; MAX_MODES + 1]; MAX_MODES + 1];
        for m in 0..=MAX_MODES {
            c[m][0] = 1;
            for k in 1..=m {
                c[m][k] = c[m - 1][k - 1] + if k < m { c[m - 1][k] } else { 0 };
            }
        }
        c
    })
}

pub fn binomial(m: usize, k: usize) -> u64 {
    if k > m {
        0
    } else {
        binomials()[m][k]
    }
}

/// All `n`-bit masks of weight `k`, ascending.
fn masks_of_weight(n: usize, k: usize) -> Vec<u64> {
    let count = binomial(n, k) as usize;
    let mut out = Vec::with_capacity(count);
    if k == 0 {
        out.push(0);
        return out;
    }
    let mut v: u64 = (1u64 << k) - 1;
    let limit = 1u64 << n;
    while v < limit {
        out.push(v);
        let t = v | (v - 1);
        v = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
    }
    out
}

/// Position of `mask` among the ascending weight-`k` masks.
fn rank(mask: u64) -> usize {
    let mut r = 0u64;
    let mut m = mask;
    let mut i = 1;
    while m != 0 {
        let c = m.trailing_zeros() as usize;
        r += binomial(c, i);
        i += 1;
        m &= m - 1;
    }
    r as usize
}

/// Determinants with `n_up` spin-up and `n_down` spin-down electrons in
/// `n_modes` spatial modes, ordered by combined label.
#[derive(Debug)]
pub struct DeterminantSector {
    n_modes: usize,
    n_up: usize,
    n_down: usize,
    up: Vec<u64>,
    down: Vec<u64>,
    tables: OnceLock<(ExcitationTable, ExcitationTable)>,
}

impl DeterminantSector {
    pub fn new(n_modes: usize, n_up: usize, n_down: usize) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_MODES {
            return Err(Error::InvalidSector(format!(
                "{n_modes} modes (limit {MAX_MODES})"
            )));
        }
        if n_up > n_modes || n_down > n_modes {
            return Err(Error::InvalidSector(format!(
                "({n_up}, {n_down}) electrons do not fit in {n_modes} modes"
            )));
        }
        Ok(DeterminantSector {
            n_modes,
            n_up,
            n_down,
            up: masks_of_weight(n_modes, n_up),
            down: masks_of_weight(n_modes, n_down),
            tables: OnceLock::new(),
        })
    }

    /// `n_modes / 2` electrons of each spin; `n_modes` must be even.
    pub fn half_filling(n_modes: usize) -> Result<Self> {
        if !n_modes.is_multiple_of(2) {
            return Err(Error::InvalidSector(format!(
                "half filling needs an even mode count, got {n_modes}"
            )));
        }
        Self::new(n_modes, n_modes / 2, n_modes / 2)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn n_down(&self) -> usize {
        self.n_down
    }

    pub fn dim(&self) -> usize {
        self.up.len() * self.down.len()
    }

    pub fn up_strings(&self) -> &[u64] {
        &self.up
    }

    pub fn down_strings(&self) -> &[u64] {
        &self.down
    }

    pub fn same_sector(&self, other: &DeterminantSector) -> bool {
        self.n_modes == other.n_modes && self.n_up == other.n_up && self.n_down == other.n_down
    }

    /// Split a combined label into its `(up, down)` masks.
    pub fn split(&self, bits: u64) -> (u64, u64) {
        (bits >> self.n_modes, bits & ((1u64 << self.n_modes) - 1))
    }

    pub fn join(&self, up: u64, down: u64) -> u64 {
        (up << self.n_modes) | down
    }

    pub fn bitstring(&self, i: usize) -> u64 {
        let nd = self.down.len();
        self.join(self.up[i / nd], self.down[i % nd])
    }

    pub fn determinant(&self, i: usize) -> (u64, u64) {
        let nd = self.down.len();
        (self.up[i / nd], self.down[i % nd])
    }

    pub fn up_index(&self, up: u64) -> Option<usize> {
        (up >> self.n_modes == 0 && up.count_ones() as usize == self.n_up).then(|| rank(up))
    }

    pub fn down_index(&self, down: u64) -> Option<usize> {
        (down >> self.n_modes == 0 && down.count_ones() as usize == self.n_down).then(|| rank(down))
    }

    pub fn index_of(&self, bits: u64) -> Option<usize> {
        if bits >> (2 * self.n_modes) != 0 {
            return None;
        }
        let (u, d) = self.split(bits);
        Some(self.up_index(u)? * self.down.len() + self.down_index(d)?)
    }

    /// Per-spin excitation tables `(up, down)`, built on first use.
    pub fn tables(&self) -> &(ExcitationTable, ExcitationTable) {
        self.tables
            .get_or_init(|| (self.build_table(&self.up), self.build_table(&self.down)))
    }

    fn build_table(&self, strings: &[u64]) -> ExcitationTable {
        let n = self.n_modes;
        let mut offsets = Vec::with_capacity(strings.len() + 1);
        let mut entries = Vec::new();
        offsets.push(0);
        for &s in strings {
            for q in 0..n {
                for p in 0..n {
                    if let Some((t, sign)) = hop(s, n, p, q) {
                        entries.push(Excitation {
                            target: rank(t) as u32,
                            p: p as u8,
                            q: q as u8,
                            sign,
                        });
                    }
                }
            }
            offsets.push(entries.len());
        }
        ExcitationTable { offsets, entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_and_round_trip() {
        let s = DeterminantSector::new(2, 1, 1).unwrap();
        assert_eq!(s.dim(), 4);
        let s = DeterminantSector::half_filling(8).unwrap();
        assert_eq!(s.dim(), 4900);
        for i in 0..s.dim() {
            assert_eq!(s.index_of(s.bitstring(i)), Some(i));
        }
        let labels: Vec<u64> = (0..s.dim()).map(|i| s.bitstring(i)).collect();
        assert!(labels.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(s.index_of(0), None);
        assert!(DeterminantSector::new(4, 5, 1).is_err());
        assert!(DeterminantSector::half_filling(5).is_err());
    }

    #[test]
    fn mode_zero_is_leftmost_character() {
        let s = DeterminantSector::new(3, 1, 0).unwrap();
        assert_eq!(
            crate::state::format_bits(s.bitstring(s.dim() - 1), 6),
            "100000"
        );
        assert_eq!(mode_bit(3, 0), 0b100);
    }

    #[test]
    fn ladder_signs_follow_mode_order() {
        // |0↑ 1↑⟩ = a†_{0↑} a†_{1↑} |vac⟩; annihilating 1↑ passes 0↑.
        let n = 2;
        let mut det = (0b11, 0);
        assert_eq!(annihilate(&mut det, n, 1, Spin::Up), Some(-1.0));
        assert_eq!(det, (0b10, 0));
        // down modes sit after every up mode
        let mut det = (0b10, 0b00);
        assert_eq!(create(&mut det, n, 0, Spin::Down), Some(-1.0));
        assert_eq!(create(&mut det, n, 0, Spin::Down), None);
        // hop agrees with annihilate-then-create
        for mask in 0..16u64 {
            for p in 0..4 {
                for q in 0..4 {
                    let mut d = (mask, 0);
                    let want = annihilate(&mut d, 4, q, Spin::Up)
                        .and_then(|a| create(&mut d, 4, p, Spin::Up).map(|c| (d.0, a * c)));
                    assert_eq!(hop(mask, 4, p, q), want, "mask {mask:04b} p {p} q {q}");
                }
            }
        }
    }

    #[test]
    fn tables_cover_all_hops() {
        let s = DeterminantSector::new(5, 2, 3).unwrap();
        let (up, down) = s.tables();
        for i in 0..s.up_strings().len() {
            assert_eq!(up.row(i).len(), 2 * (5 - 2) + 2);
        }
        for i in 0..s.down_strings().len() {
            assert_eq!(down.row(i).len(), 3 * 2 + 3);
        }
    }
}
