//! Sample-based diagonalization: bitstrings measured from Krylov states (or
//! drawn uniformly) span a subspace, the Hamiltonian is projected onto it,
//! and the projected matrix is diagonalized.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use rand::Rng;
use rayon::prelude::*;

use crate::fermion::DeterminantSector;
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{eigh, lowest_eigenpair, LanczosOptions, LinearOperator, SparseMatrix};
use crate::propagate::{born_cdf, born_draws};
use crate::rng::substream;
use crate::state::{format_bits, parse_bits, MAX_BITS};
use crate::{Basis, Error, Result, StateVector, C64};

/// Shots taken from one source state.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ShotRecord {
    pub state_index: usize,
    pub shots: usize,
    pub seed: u64,
    pub stream: u64,
}

/// Measured bitstrings with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    n_bits: usize,
    counts: BTreeMap<u64, u64>,
    provenance: Vec<ShotRecord>,
}

impl SampleSet {
    pub fn new(n_bits: usize) -> Result<Self> {
        if n_bits == 0 || n_bits > MAX_BITS {
            return Err(Error::InvalidParameter(format!("{n_bits}-bit samples")));
        }
        Ok(SampleSet {
            n_bits,
            counts: BTreeMap::new(),
            provenance: Vec::new(),
        })
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn provenance(&self) -> &[ShotRecord] {
        &self.provenance
    }

    pub fn add(&mut self, bits: u64, count: u64) -> Result<()> {
        if bits >> self.n_bits != 0 {
            return Err(Error::InvalidParameter(format!(
                "bitstring {bits:#b} wider than {} bits",
                self.n_bits
            )));
        }
        if count > 0 {
            *self.counts.entry(bits).or_insert(0) += count;
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &SampleSet) -> Result<()> {
        if other.n_bits != self.n_bits {
            return Err(Error::Shape {
                expected: self.n_bits,
                got: other.n_bits,
            });
        }
        for (&b, &c) in &other.counts {
            *self.counts.entry(b).or_insert(0) += c;
        }
        self.provenance.extend(other.provenance.iter().cloned());
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn contains(&self, bits: u64) -> bool {
        self.counts.contains_key(&bits)
    }

    /// Distinct bitstrings, ascending.
    pub fn support(&self) -> Vec<u64> {
        self.counts.keys().copied().collect()
    }

    /// The `d_max` most frequent bitstrings (ties to the lexicographically
    /// smaller string), returned ascending.
    pub fn most_sampled(&self, d_max: usize) -> Vec<u64> {
        let mut by_count: Vec<(u64, u64)> = self.counts.iter().map(|(&b, &c)| (b, c)).collect();
        by_count.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut kept: Vec<u64> = by_count.into_iter().take(d_max).map(|(b, _)| b).collect();
        kept.sort_unstable();
        kept
    }

    /// One `bitstring<TAB>count` line per distinct bitstring, ascending.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        for (&b, &c) in &self.counts {
            writeln!(w, "{}\t{}", format_bits(b, self.n_bits), c)?;
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_tsv<R: BufRead>(r: R) -> Result<Self> {
        let mut set: Option<SampleSet> = None;
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let bad = || {
                Error::InvalidParameter(format!(
                    "line {}: expected `bitstring<TAB>count`",
                    lineno + 1
                ))
            };
            let (bits, count) = line.split_once('\t').ok_or_else(bad)?;
            let (value, width) = parse_bits(bits)?;
            let count: u64 = count.parse().map_err(|_| bad())?;
            if count == 0 {
                return Err(bad());
            }
            let s = match &mut set {
                Some(s) => s,
                None => set.insert(SampleSet::new(width)?),
            };
            if width != s.n_bits {
                return Err(Error::Shape {
                    expected: s.n_bits,
                    got: width,
                });
            }
            s.add(value, count)?;
        }
        set.ok_or_else(|| Error::InvalidParameter("empty sample file".into()))
    }
}

/// `m` Born-rule shots from each state; state `k` draws from stream `k` of
/// `seed`, so results do not depend on scheduling.
pub fn collect_samples(states: &[StateVector], m: usize, seed: u64) -> Result<SampleSet> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "need at least one shot per state".into(),
        ));
    }
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidParameter("no states to sample".into()))?;
    let draws: Vec<Vec<u64>> = states
        .par_iter()
        .enumerate()
        .map(|(k, v)| {
            let cdf = born_cdf(v)?;
            Ok(born_draws(v, &cdf, m, &mut substream(seed, k as u64)))
        })
        .collect::<Result<_>>()?;
    let mut set = SampleSet::new(first.basis().n_bits())?;
    for (k, d) in draws.into_iter().enumerate() {
        for b in d {
            set.add(b, 1)?;
        }
        set.provenance.push(ShotRecord {
            state_index: k,
            shots: m,
            seed,
            stream: k as u64,
        });
    }
    Ok(set)
}

/// Admissible bitstrings for sampling baselines and post-selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectorRule {
    /// `up` occupations followed by `down` occupations with fixed counts.
    PerSpin {
        n_modes: usize,
        n_up: usize,
        n_down: usize,
    },
    /// Fixed total Hamming weight.
    Weight(usize),
}

impl SectorRule {
    pub fn for_sector(s: &DeterminantSector) -> Self {
        SectorRule::PerSpin {
            n_modes: s.n_modes(),
            n_up: s.n_up(),
            n_down: s.n_down(),
        }
    }

    pub fn accepts(&self, bits: u64) -> bool {
        match *self {
            SectorRule::PerSpin {
                n_modes,
                n_up,
                n_down,
            } => {
                let up = bits >> n_modes;
                let down = bits & ((1u64 << n_modes) - 1);
                up >> n_modes == 0
                    && up.count_ones() as usize == n_up
                    && down.count_ones() as usize == n_down
            }
            SectorRule::Weight(w) => bits.count_ones() as usize == w,
        }
    }
}

/// `total` bitstrings drawn uniformly from all `n_bits`-bit strings, or from
/// those admitted by `rule`.
pub fn uniform_baseline(
    n_bits: usize,
    total: usize,
    seed: u64,
    rule: Option<SectorRule>,
) -> Result<SampleSet> {
    if total == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let mut set = SampleSet::new(n_bits)?;
    let mut rng = substream(seed, 0x756e_6966);
    match rule {
        None => {
            for _ in 0..total {
                let b = if n_bits == 64 {
                    rng.random::<u64>()
                } else {
                    rng.random::<u64>() & ((1u64 << n_bits) - 1)
                };
                set.add(b, 1)?;
            }
        }
        Some(rule) => {
            let admissible: Vec<u64> = match rule {
                SectorRule::PerSpin {
                    n_modes,
                    n_up,
                    n_down,
                } => {
                    if 2 * n_modes != n_bits {
                        return Err(Error::InvalidSector(format!(
                            "{n_modes} modes need {} bits",
                            2 * n_modes
                        )));
                    }
                    let s = DeterminantSector::new(n_modes, n_up, n_down)?;
                    (0..s.dim()).map(|i| s.bitstring(i)).collect()
                }
                SectorRule::Weight(w) => {
                    if n_bits > 30 {
                        return Err(Error::InvalidParameter(
                            "weight-constrained baseline limited to 30 bits".into(),
                        ));
                    }
                    (0..1u64 << n_bits)
                        .filter(|b| b.count_ones() as usize == w)
                        .collect()
                }
            };
            if admissible.is_empty() {
                return Err(Error::InvalidSector(format!(
                    "{rule:?} admits no {n_bits}-bit string"
                )));
            }
            for _ in 0..total {
                set.add(admissible[rng.random_range(0..admissible.len())], 1)?;
            }
        }
    }
    set.provenance.push(ShotRecord {
        state_index: 0,
        shots: total,
        seed,
        stream: 0x756e_6966,
    });
    Ok(set)
}

/// Keep only admissible bitstrings; returns the filtered set and the
/// discarded fraction of shots.
pub fn postselect(samples: &SampleSet, rule: SectorRule) -> (SampleSet, f64) {
    let mut kept = SampleSet {
        n_bits: samples.n_bits,
        counts: BTreeMap::new(),
        provenance: samples.provenance.clone(),
    };
    let mut dropped = 0u64;
    for (&b, &c) in &samples.counts {
        if rule.accepts(b) {
            kept.counts.insert(b, c);
        } else {
            dropped += c;
        }
    }
    let total = samples.total();
    let frac = if total == 0 {
        0.0
    } else {
        dropped as f64 / total as f64
    };
    (kept, frac)
}

/// Flip every bit of every shot independently with probability `p`.
pub fn corrupt(samples: &SampleSet, p: f64, seed: u64) -> Result<SampleSet> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("flip probability {p}")));
    }
    let mut rng = substream(seed, 0x666c_6970);
    let mut out = SampleSet {
        n_bits: samples.n_bits,
        counts: BTreeMap::new(),
        provenance: samples.provenance.clone(),
    };
    for (&b, &c) in &samples.counts {
        for _ in 0..c {
            let mut x = b;
            for i in 0..samples.n_bits {
                if rng.random::<f64>() < p {
                    x ^= 1 << i;
                }
            }
            out.add(x, 1)?;
        }
    }
    Ok(out)
}

/// `⟨b_i|H|b_j⟩` on a strictly ascending list of bitstrings.
pub fn project_hamiltonian<H: Hamiltonian + ?Sized>(h: &H, basis: &[u64]) -> Result<SparseMatrix> {
    if basis.is_empty() {
        return Err(Error::InvalidBasis("empty subspace".into()));
    }
    if basis.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidBasis(
            "basis must be strictly ascending without duplicates".into(),
        ));
    }
    let columns: Vec<Vec<(usize, usize, C64)>> = basis
        .par_iter()
        .enumerate()
        .map(|(j, &b)| {
            let mut conn = Vec::new();
            h.connections(b, &mut conn)?;
            Ok(conn
                .into_iter()
                .filter_map(|(t, a)| basis.binary_search(&t).ok().map(|i| (i, j, a)))
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(SparseMatrix::from_triplets(
        basis.len(),
        columns.into_iter().flatten().collect(),
    ))
}

/// Largest subspace dimension solved densely.
pub const DENSE_SUBSPACE_DIM: usize = 400;

/// Lowest eigenpair of a projected matrix: dense below
/// [`DENSE_SUBSPACE_DIM`], restarted Lanczos above. Returns
/// `(energy, unit vector, residual)`.
pub fn solve_subspace(m: &SparseMatrix) -> Result<(f64, Vec<C64>, f64)> {
    let d = m.dim();
    if d == 0 {
        return Err(Error::InvalidBasis("empty subspace".into()));
    }
    let (energy, mut vec) = if d <= DENSE_SUBSPACE_DIM {
        let e = eigh(&m.to_dense());
        (e.values[0], e.vector(0))
    } else {
        let opts = LanczosOptions {
            tol: 1e-11,
            max_basis: 100,
            max_restarts: 200,
            seed: 0,
        };
        let p = lowest_eigenpair(m, None, &[], &opts)?;
        (p.value, p.vector)
    };
    crate::linalg::fix_global_phase(&mut vec);
    let mut r = m.apply_vec(&vec);
    crate::linalg::axpy(C64::new(-energy, 0.0), &vec, &mut r);
    let residual = crate::linalg::norm(&r);
    if residual > 1e-9 * energy.abs().max(1.0) {
        return Err(Error::Convergence {
            iterations: 0,
            residual,
        });
    }
    Ok((energy, vec, residual))
}

/// A sampled basis, the Hamiltonian projected onto it, and its ground pair.
#[derive(Clone, Debug)]
pub struct SubspaceProblem {
    pub basis: Vec<u64>,
    pub h_proj: SparseMatrix,
    pub energy: f64,
    pub ground: Vec<C64>,
    pub residual: f64,
}

impl SubspaceProblem {
    pub fn build<H: Hamiltonian + ?Sized>(h: &H, basis: Vec<u64>) -> Result<Self> {
        let h_proj = project_hamiltonian(h, &basis)?;
        let (energy, ground, residual) = solve_subspace(&h_proj)?;
        Ok(SubspaceProblem {
            basis,
            h_proj,
            energy,
            ground,
            residual,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The subspace ground vector embedded in the full space.
    pub fn embed(&self, basis: &Basis) -> Result<StateVector> {
        let mut v = StateVector::zeros(basis.clone());
        for (&b, &c) in self.basis.iter().zip(&self.ground) {
            let i = basis.index_of(b).ok_or_else(|| {
                Error::InvalidBasis(format!(
                    "{} not in the target space",
                    format_bits(b, basis.n_bits())
                ))
            })?;
            v.amplitudes_mut()[i] = c;
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, Default)]
pub struct SkqdOptions {
    /// Keep only the `d_max` most sampled bitstrings.
    pub d_max: Option<usize>,
    /// Drop bitstrings outside this rule before projecting.
    pub postselect: Option<SectorRule>,
}

/// Subspace basis from a sample set under `opts`.
pub fn subspace_basis(samples: &SampleSet, opts: &SkqdOptions) -> Vec<u64> {
    let filtered;
    let s = match opts.postselect {
        Some(rule) => {
            filtered = postselect(samples, rule).0;
            &filtered
        }
        None => samples,
    };
    match opts.d_max {
        Some(d) => s.most_sampled(d),
        None => s.support(),
    }
}

/// Sample `m` shots from each Krylov state and diagonalize in their span.
pub fn skqd_estimate<H: Hamiltonian + ?Sized>(
    h: &H,
    states: &[StateVector],
    m: usize,
    seed: u64,
    opts: &SkqdOptions,
) -> Result<(SubspaceProblem, SampleSet)> {
    let samples = collect_samples(states, m, seed)?;
    let basis = subspace_basis(&samples, opts);
    Ok((SubspaceProblem::build(h, basis)?, samples))
}

/// Lowest-energy result among trials (safe because every estimate is an
/// upper bound on the ground energy). Returns the winning trial index.
pub fn best_of<I>(trials: I) -> Result<(usize, SubspaceProblem)>
where
    I: IntoIterator<Item = Result<SubspaceProblem>>,
{
    let mut best: Option<(usize, SubspaceProblem)> = None;
    for (i, t) in trials.into_iter().enumerate() {
        let t = t?;
        if best.as_ref().is_none_or(|(_, b)| t.energy < b.energy) {
            best = Some((i, t));
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("no trials".into()))
}

/// Basis weights of a state sorted in descending order, with the cumulative
/// weights `α_L` and the `L`-th largest weights `β_L`.
#[derive(Clone, Debug)]
pub struct SparsityProfile {
    /// Bitstrings in descending weight order (ties by label).
    pub order: Vec<u64>,
    pub sorted_weights: Vec<f64>,
    /// `alpha[L-1] = Σ_{j≤L} |g_j|²`.
    pub alpha: Vec<f64>,
    /// `beta[L-1] = |g_L|²`.
    pub beta: Vec<f64>,
}

impl SparsityProfile {
    /// `(α_L, β_L)` for `L ≥ 1`.
    pub fn at(&self, l: usize) -> (f64, f64) {
        (self.alpha[l - 1], self.beta[l - 1])
    }

    /// Smallest `L` with `α_L ≥ target`.
    pub fn smallest_l_reaching(&self, target: f64) -> usize {
        self.alpha
            .iter()
            .position(|&a| a >= target)
            .map_or(self.alpha.len(), |i| i + 1)
    }
}

pub fn sparsity_profile(v: &StateVector) -> Result<SparsityProfile> {
    v.check_normalized(1e-9)?;
    let probs = v.probabilities();
    let mut idx: Vec<usize> = (0..probs.len()).collect();
    idx.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]).then(a.cmp(&b)));
    let sorted_weights: Vec<f64> = idx.iter().map(|&i| probs[i]).collect();
    let mut acc = 0.0;
    let alpha = sorted_weights
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    Ok(SparsityProfile {
        order: idx.iter().map(|&i| v.basis().bitstring(i)).collect(),
        beta: sorted_weights.clone(),
        sorted_weights,
        alpha,
    })
}

/// Whether the `l` heaviest bitstrings of `reference` were all sampled, and
/// which were missed.
pub fn coverage_check(
    samples: &SampleSet,
    reference: &StateVector,
    l: usize,
) -> Result<(bool, Vec<u64>)> {
    let profile = sparsity_profile(reference)?;
    let support = profile.sorted_weights.iter().filter(|&&w| w > 0.0).count();
    if l == 0 || l > support {
        return Err(Error::InvalidParameter(format!(
            "L = {l} with support {support}"
        )));
    }
    let missing: Vec<u64> = profile.order[..l]
        .iter()
        .copied()
        .filter(|b| !samples.contains(*b))
        .collect();
    Ok((missing.is_empty(), missing))
}

/// Map from basis labels to positions, for callers mixing subspaces.
pub fn index_map(basis: &[u64]) -> HashMap<u64, usize> {
    basis.iter().enumerate().map(|(i, &b)| (b, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::{build_siam_position, SectorHamiltonian, SiamParams};
    use crate::hamiltonian::{spectrum_summary, SpectrumLimits};
    use crate::linalg::to_dense;
    use crate::spin::build_tfim_open;
    use std::sync::Arc;

    #[test]
    fn point_mass_collection() {
        let v = StateVector::basis_state(Basis::spin(2), 0b10).unwrap();
        let s = collect_samples(&[v.clone(), v], 25, 3).unwrap();
        assert_eq!(s.counts().len(), 1);
        assert_eq!(s.counts()[&0b10], 50);
        assert_eq!(s.total(), 50);
        assert_eq!(s.provenance().len(), 2);
    }

    #[test]
    fn tsv_round_trip() {
        let mut s = SampleSet::new(4).unwrap();
        s.add(0b0011, 5).unwrap();
        s.add(0b1000, 2).unwrap();
        s.add(0b0001, 1).unwrap();
        let text = s.to_tsv();
        assert_eq!(text, "0001\t1\n0011\t5\n1000\t2\n");
        let back = SampleSet::read_tsv(text.as_bytes()).unwrap();
        assert_eq!(back.counts(), s.counts());
        assert_eq!(back.to_tsv(), text);
        assert!(SampleSet::read_tsv("01\t1\n011\t2\n".as_bytes()).is_err());
        assert!(SampleSet::read_tsv("01 1\n".as_bytes()).is_err());
    }

    #[test]
    fn uniform_supports_and_constraints() {
        let s = uniform_baseline(2, 4, 1, None).unwrap();
        assert_eq!(s.total(), 4);
        assert!(s.support().iter().all(|&b| b < 4));
        let s = uniform_baseline(2, 100, 1, Some(SectorRule::Weight(1))).unwrap();
        assert!(s.support().iter().all(|&b| b == 0b01 || b == 0b10));
        assert!(uniform_baseline(2, 1, 1, Some(SectorRule::Weight(3))).is_err());
    }

    #[test]
    fn postselection_and_corruption() {
        let mut s = SampleSet::new(4).unwrap();
        for b in 0..16u64 {
            s.add(b, 1).unwrap();
        }
        let rule = SectorRule::PerSpin {
            n_modes: 2,
            n_up: 1,
            n_down: 1,
        };
        let (kept, frac) = postselect(&s, rule);
        assert_eq!(kept.support(), vec![0b0101, 0b0110, 0b1001, 0b1010]);
        assert!((frac - 12.0 / 16.0).abs() < 1e-15);

        let mut clean = SampleSet::new(8).unwrap();
        clean.add(0b1100_1100, 1000).unwrap();
        let rule = SectorRule::PerSpin {
            n_modes: 4,
            n_up: 2,
            n_down: 2,
        };
        assert_eq!(postselect(&clean, rule).1, 0.0);
        let dirty = corrupt(&clean, 0.01, 5).unwrap();
        assert_eq!(dirty.total(), 1000);
        assert!(postselect(&dirty, rule).1 > 0.0);
    }

    #[test]
    fn projection_examples() {
        let h = build_tfim_open(2, 0.1, 0.0).unwrap();
        let m = project_hamiltonian(&h, &[0b00, 0b11]).unwrap().to_dense();
        assert_eq!(m[(0, 0)], C64::new(-1.0, 0.0));
        assert_eq!(m[(1, 1)], C64::new(-1.0, 0.0));
        assert_eq!(m[(0, 1)], C64::new(0.0, 0.0));
        assert!(project_hamiltonian(&h, &[0b11, 0b00]).is_err());

        let h = build_tfim_open(5, 0.4, 0.1).unwrap();
        let e0 = spectrum_summary(&h, &SpectrumLimits::default()).unwrap().e0;
        let full = SubspaceProblem::build(&h, (0..32).collect()).unwrap();
        assert!((full.energy - e0).abs() < 1e-9);
    }

    #[test]
    fn siam_projection_is_a_submatrix() {
        let ham = build_siam_position(&SiamParams::symmetric(5, 2.0)).unwrap();
        let sector = Arc::new(DeterminantSector::half_filling(6).unwrap());
        let op = SectorHamiltonian::new(ham, sector.clone()).unwrap();
        let dense = to_dense(&op);
        let picks: Vec<usize> = (0..sector.dim()).step_by(8).take(50).collect();
        let basis: Vec<u64> = picks.iter().map(|&i| sector.bitstring(i)).collect();
        let m = project_hamiltonian(&op, &basis).unwrap();
        for (a, &i) in picks.iter().enumerate() {
            for (b, &j) in picks.iter().enumerate() {
                assert!((m.get(a, b) - dense[(i, j)]).norm() < 1e-12);
            }
        }
        assert!(matches!(
            project_hamiltonian(&op, &[0]),
            Err(Error::InvalidBasis(_))
        ));
    }

    #[test]
    fn subspace_solver_small_cases() {
        let r = |x: f64| C64::new(x, 0.0);
        let m = SparseMatrix::from_triplets(1, vec![(0, 0, r(4.5))]);
        assert_eq!(solve_subspace(&m).unwrap().0, 4.5);
        let m =
            SparseMatrix::from_triplets(3, vec![(0, 0, r(3.0)), (1, 1, r(-2.0)), (2, 2, r(5.0))]);
        let (e, v, _) = solve_subspace(&m).unwrap();
        assert_eq!(e, -2.0);
        assert!((v[1].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn iterative_subspace_matches_dense() {
        let d = 1200;
        let mut rng = substream(11, 0);
        let mut t = Vec::new();
        for i in 0..d {
            t.push((i, i, C64::new(rng.random::<f64>() * 10.0, 0.0)));
            for _ in 0..3 {
                let j = rng.random_range(0..d);
                if j != i {
                    let v = C64::new(rng.random::<f64>() - 0.5, 0.0);
                    t.push((i, j, v));
                    t.push((j, i, v));
                }
            }
        }
        let m = SparseMatrix::from_triplets(d, t);
        let (e, _, res) = solve_subspace(&m).unwrap();
        let want = eigh(&m.to_dense()).values[0];
        assert!((e - want).abs() < 1e-8, "{e} vs {want}");
        assert!(res < 1e-9);
    }

    #[test]
    fn sparsity_profiles() {
        let v = StateVector::new(
            Basis::spin(2),
            vec![
                C64::new(0.7f64.sqrt(), 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.3f64.sqrt(), 0.0),
            ],
        )
        .unwrap();
        let p = sparsity_profile(&v).unwrap();
        let close =
            |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12;
        assert!(close(p.at(1), (0.7, 0.7)));
        assert!(close(p.at(2), (1.0, 0.3)));
        assert_eq!(p.smallest_l_reaching(0.99), 2);

        let u =
            StateVector::new(Basis::spin(3), vec![C64::new(8f64.sqrt().recip(), 0.0); 8]).unwrap();
        let p = sparsity_profile(&u).unwrap();
        for l in 1..=8 {
            assert!(close(p.at(l), (l as f64 / 8.0, 1.0 / 8.0)));
        }
    }

    #[test]
    fn coverage_cases() {
        let v = StateVector::new(
            Basis::spin(2),
            vec![
                C64::new(0.8f64.sqrt(), 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.2f64.sqrt(), 0.0),
                C64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let mut all = SampleSet::new(2).unwrap();
        all.add(0, 1).unwrap();
        all.add(2, 1).unwrap();
        assert_eq!(coverage_check(&all, &v, 2).unwrap(), (true, vec![]));
        let empty = SampleSet::new(2).unwrap();
        assert_eq!(coverage_check(&empty, &v, 2).unwrap(), (false, vec![0, 2]));
        assert!(coverage_check(&empty, &v, 3).is_err());
    }

    #[test]
    fn truncation_by_count_then_label() {
        let mut s = SampleSet::new(3).unwrap();
        s.add(0b111, 5).unwrap();
        s.add(0b001, 2).unwrap();
        s.add(0b010, 2).unwrap();
        s.add(0b100, 1).unwrap();
        assert_eq!(s.most_sampled(2), vec![0b001, 0b111]);
        assert_eq!(s.most_sampled(10).len(), 4);
    }
}
