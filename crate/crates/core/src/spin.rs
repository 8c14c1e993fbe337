//! Spin Hamiltonians as weighted Pauli strings, applied through bit masks.
//!
//! Qubit `j` (1-based) is bit `n - j` of the basis index, so qubit 1 is the
//! most significant bit and `|0^n⟩` is index 0. `Z|0⟩ = |0⟩`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::hamiltonian::Hamiltonian;
use crate::linalg::LinearOperator;
use crate::state::MAX_BITS;
use crate::{Basis, Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        PauliString { ops }
    }

    pub fn identity(n: usize) -> Self {
        PauliString {
            ops: vec![Pauli::I; n],
        }
    }

    /// `ops` placed on 1-based qubits, identity elsewhere.
    pub fn from_sites(n: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n);
        for &(q, p) in sites {
            if q == 0 || q > n {
                return Err(Error::Index(format!("qubit {q} outside 1..={n}")));
            }
            s.ops[q - 1] = p;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    fn compile(&self) -> Compiled {
        let n = self.n();
        let mut c = Compiled {
            xmask: 0,
            zmask: 0,
            ny: 0,
        };
        for (j, op) in self.ops.iter().enumerate() {
            let bit = 1u64 << (n - 1 - j);
            match op {
                Pauli::I => {}
                Pauli::X => c.xmask |= bit,
                Pauli::Z => c.zmask |= bit,
                Pauli::Y => {
                    c.xmask |= bit;
                    c.zmask |= bit;
                    c.ny += 1;
                }
            }
        }
        c
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidParameter(format!("unknown Pauli {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString::new)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            let c = match op {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// `P|b⟩ = i^ny (-1)^popcount(b & zmask) |b ^ xmask⟩`.
#[derive(Clone, Copy, Debug)]
struct Compiled {
    xmask: u64,
    zmask: u64,
    ny: u32,
}

impl Compiled {
    fn phase(&self) -> C64 {
        match self.ny % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }
}

/// Real-weighted sum of Pauli strings on `n` qubits.
#[derive(Clone, Debug)]
pub struct PauliSum {
    n: usize,
    terms: Vec<(f64, PauliString)>,
    compiled: Vec<(C64, Compiled)>,
}

impl PauliSum {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_BITS {
            return Err(Error::InvalidSize(format!("{n} qubits")));
        }
        Ok(PauliSum {
            n,
            terms: Vec::new(),
            compiled: Vec::new(),
        })
    }

    pub fn push(&mut self, coeff: f64, string: PauliString) -> Result<()> {
        if string.n() != self.n {
            return Err(Error::Shape {
                expected: self.n,
                got: string.n(),
            });
        }
        if !coeff.is_finite() {
            return Err(Error::InvalidParameter(format!("coefficient {coeff}")));
        }
        let c = string.compile();
        self.compiled.push((c.phase() * coeff, c));
        self.terms.push((coeff, string));
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// `Σ |c|`, an upper bound on the spectral norm.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// `⟨b|H|b⟩` for a basis state.
    pub fn diagonal(&self, b: u64) -> f64 {
        self.compiled
            .iter()
            .filter(|(_, c)| c.xmask == 0)
            .map(|(w, c)| {
                if (b & c.zmask).count_ones() % 2 == 1 {
                    -w.re
                } else {
                    w.re
                }
            })
            .sum()
    }

    fn row(&self, b: u64, x: &[C64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (w, c) in &self.compiled {
            let src = b ^ c.xmask;
            let v = w * x[src as usize];
            if (src & c.zmask).count_ones() % 2 == 1 {
                acc -= v;
            } else {
                acc += v;
            }
        }
        acc
    }
}

impl LinearOperator for PauliSum {
    fn dim(&self) -> usize {
        1usize << self.n
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        if self.n >= 12 {
            y.par_chunks_mut(1 << 10)
                .enumerate()
                .for_each(|(k, chunk)| {
                    let base = (k << 10) as u64;
                    chunk
                        .iter_mut()
                        .enumerate()
                        .for_each(|(i, yi)| *yi = self.row(base + i as u64, x));
                });
        } else {
            y.iter_mut()
                .enumerate()
                .for_each(|(b, yi)| *yi = self.row(b as u64, x));
        }
    }
}

impl Hamiltonian for PauliSum {
    fn basis(&self) -> Basis {
        Basis::spin(self.n)
    }

    fn connections(&self, bits: u64, out: &mut Vec<(u64, C64)>) -> Result<()> {
        if bits >> self.n != 0 {
            return Err(Error::InvalidBasis(format!(
                "bitstring {bits:#b} wider than {} qubits",
                self.n
            )));
        }
        for (w, c) in &self.compiled {
            let amp = if (bits & c.zmask).count_ones() % 2 == 1 {
                -w
            } else {
                *w
            };
            out.push((bits ^ c.xmask, amp));
        }
        Ok(())
    }
}

/// `-Σ_{j<n} Z_j Z_{j+1} - h1 Σ_j X_j - h2 Z_1` with open boundaries. Field
/// terms with a zero coefficient are omitted.
pub fn build_tfim_open(n: usize, h1: f64, h2: f64) -> Result<PauliSum> {
    if n < 2 {
        return Err(Error::InvalidSize(format!(
            "open TFIM needs at least 2 qubits, got {n}"
        )));
    }
    let mut h = PauliSum::new(n)?;
    for j in 1..n {
        h.push(
            -1.0,
            PauliString::from_sites(n, &[(j, Pauli::Z), (j + 1, Pauli::Z)])?,
        )?;
    }
    if h1 != 0.0 {
        for j in 1..=n {
            h.push(-h1, PauliString::from_sites(n, &[(j, Pauli::X)])?)?;
        }
    }
    if h2 != 0.0 {
        h.push(-h2, PauliString::from_sites(n, &[(1, Pauli::Z)])?)?;
    }
    Ok(h)
}

/// `-Σ_i Z_i Z_{i+1} - h Σ_i X_i` on a ring of `n` qubits.
pub fn build_tfim_periodic(n: usize, h: f64) -> Result<PauliSum> {
    if n < 3 {
        return Err(Error::InvalidSize(format!(
            "periodic TFIM needs at least 3 qubits, got {n}"
        )));
    }
    let mut op = PauliSum::new(n)?;
    for j in 1..=n {
        let next = j % n + 1;
        op.push(
            -1.0,
            PauliString::from_sites(n, &[(j, Pauli::Z), (next, Pauli::Z)])?,
        )?;
    }
    for j in 1..=n {
        op.push(-h, PauliString::from_sites(n, &[(j, Pauli::X)])?)?;
    }
    Ok(op)
}
