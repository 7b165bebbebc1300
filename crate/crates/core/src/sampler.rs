//! Uniform sampling of admissible sequences and, by rejection to
//! simplicity, uniform simple (k1,k2)-dicores.
//!
//! Degrees are drawn iid from the conditioned Poisson `Poi(z|k)` with z
//! matched to the target density and rejected until they sum to M; that
//! realizes the multinomial-restricted law exactly. Slot arrangements are
//! uniform shuffles, so conditioned on the degrees the sequence is uniform,
//! and conditioned on simplicity the induced digraph is a uniform simple
//! dicore (every simple digraph corresponds to exactly M! sequences).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::graph::{DegreeSequence, LabeledMultiDigraph};
use crate::truncated_poisson::{ln_factorial, solve_z, tail_prob};

pub const DEFAULT_DEGREE_ATTEMPTS: u64 = 1_000_000;
pub const DEFAULT_SIMPLE_ATTEMPTS: u64 = 100_000;

/// The 2M-slot vertex sequence of the sequence model: odd-numbered slots
/// (1-based) hold edge tails, even-numbered slots hold edge heads, so edge r
/// is `(slots[2r], slots[2r+1])` with 0-based indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleSequence {
    slots: Vec<usize>,
    n: usize,
    k1: usize,
    k2: usize,
}

impl AdmissibleSequence {
    /// Wraps and validates a slot vector against the admissibility
    /// invariant (every vertex at least k2 times among tails and k1 among
    /// heads, degree sums equal to M).
    pub fn new(slots: Vec<usize>, n: usize, k1: usize, k2: usize) -> Result<Self> {
        if !slots.len().is_multiple_of(2) {
            return Err(Error::Domain("slot vector must have even length".into()));
        }
        let seq = Self { slots, n, k1, k2 };
        seq.validate()?;
        Ok(seq)
    }

    pub fn slots(&self) -> &[usize] {
        &self.slots
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.slots.len() / 2
    }

    pub fn cutoffs(&self) -> (usize, usize) {
        (self.k1, self.k2)
    }

    /// In-degrees read off the head slots.
    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for pair in self.slots.chunks_exact(2) {
            deg[pair[1]] += 1;
        }
        deg
    }

    /// Out-degrees read off the tail slots.
    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for pair in self.slots.chunks_exact(2) {
            deg[pair[0]] += 1;
        }
        deg
    }

    /// Checks the admissibility invariant.
    pub fn validate(&self) -> Result<()> {
        if let Some(&v) = self.slots.iter().find(|&&v| v >= self.n) {
            return Err(Error::Domain(format!("slot value {v} out of range")));
        }
        let indeg = self.in_degrees();
        let outdeg = self.out_degrees();
        if indeg.iter().any(|&d| d < self.k1) {
            return Err(Error::Domain("an in-degree is below k1".into()));
        }
        if outdeg.iter().any(|&d| d < self.k2) {
            return Err(Error::Domain("an out-degree is below k2".into()));
        }
        Ok(())
    }
}

/// Per-replica random stream: replica j of a master seed uses stream j of a
/// ChaCha cipher seeded by the master. Streams are statistically
/// independent, so parallel replicas never share state and results do not
/// depend on scheduling.
pub fn replica_rng(master_seed: u64, replica: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(replica);
    rng
}

/// Inverse-transform sampling table for `Poi(z|k)`.
pub(crate) struct CondPoissonTable {
    k: usize,
    z: f64,
    cum: Vec<f64>,
    last_pmf: f64,
}

impl CondPoissonTable {
    pub(crate) fn new(z: f64, k: usize) -> Result<Self> {
        let norm = tail_prob(z, k as i64)?;
        let mut term = (k as f64 * z.ln() - z - ln_factorial(k as u64)).exp() / norm;
        let mut cum = Vec::with_capacity(16);
        let mut acc = 0.0f64;
        let mut j = k;
        loop {
            acc += term;
            cum.push(acc);
            if 1.0 - acc < 1e-13 && j > k {
                break;
            }
            j += 1;
            term *= z / j as f64;
            if j > k + 10_000 {
                break;
            }
        }
        Ok(Self {
            k,
            z,
            cum,
            last_pmf: term,
        })
    }

    #[inline]
    pub(crate) fn sample(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        for (i, &c) in self.cum.iter().enumerate() {
            if u <= c {
                return self.k + i;
            }
        }
        // beyond the table (mass < 1e-13): extend term by term
        let mut j = self.k + self.cum.len();
        let mut acc = *self.cum.last().expect("table nonempty");
        let mut term = self.last_pmf;
        loop {
            acc += term;
            if u <= acc || term < 1e-300 {
                return j;
            }
            j += 1;
            term *= self.z / j as f64;
        }
    }
}

/// Draws a degree sequence with `n` entries, all >= k, summing to `m`,
/// distributed proportionally to `m!/prod d_i!` (the sequence model's
/// marginal): iid conditioned-Poisson draws rejected until the sum is m.
pub fn sample_degree_sequence(
    n: usize,
    m: usize,
    k: usize,
    rng: &mut impl Rng,
) -> Result<DegreeSequence> {
    sample_degree_sequence_with(n, m, k, rng, DEFAULT_DEGREE_ATTEMPTS)
}

pub fn sample_degree_sequence_with(
    n: usize,
    m: usize,
    k: usize,
    rng: &mut impl Rng,
    max_attempts: u64,
) -> Result<DegreeSequence> {
    if n == 0 {
        return Err(Error::Precondition("need at least one vertex".into()));
    }
    if m < k * n {
        return Err(Error::Precondition(format!(
            "m = {m} cannot meet the cutoff: need at least k*n = {}",
            k * n
        )));
    }
    if m == k * n {
        // the only admissible vector is the constant one
        return DegreeSequence::new(vec![k; n], k);
    }
    let z = solve_z(m as f64 / n as f64, k as i64)?;
    let table = CondPoissonTable::new(z, k)?;
    let mut degrees = vec![0usize; n];
    for _attempt in 0..max_attempts {
        let mut sum = 0usize;
        let mut overshoot = false;
        for d in degrees.iter_mut() {
            *d = table.sample(rng);
            sum += *d;
            if sum > m {
                overshoot = true;
                break;
            }
        }
        if !overshoot && sum == m {
            return DegreeSequence::new(std::mem::take(&mut degrees), k);
        }
    }
    Err(Error::Exhausted {
        attempts: max_attempts,
    })
}

/// Uniform sample over all admissible sequences: independent in/out degree
/// draws, then uniform arrangements of the two degree multisets.
pub fn sample_admissible_sequence(
    n: usize,
    m: usize,
    k1: usize,
    k2: usize,
    rng: &mut impl Rng,
) -> Result<AdmissibleSequence> {
    let indeg = sample_degree_sequence(n, m, k1, rng)?;
    let outdeg = sample_degree_sequence(n, m, k2, rng)?;
    Ok(arrange(n, k1, k2, &indeg, &outdeg, rng))
}

fn arrange(
    n: usize,
    k1: usize,
    k2: usize,
    indeg: &DegreeSequence,
    outdeg: &DegreeSequence,
    rng: &mut impl Rng,
) -> AdmissibleSequence {
    let m = indeg.total();
    let mut heads = Vec::with_capacity(m);
    for (v, &d) in indeg.degrees().iter().enumerate() {
        heads.extend(std::iter::repeat_n(v, d));
    }
    let mut tails = Vec::with_capacity(m);
    for (v, &d) in outdeg.degrees().iter().enumerate() {
        tails.extend(std::iter::repeat_n(v, d));
    }
    heads.shuffle(rng);
    tails.shuffle(rng);
    let mut slots = Vec::with_capacity(2 * m);
    for r in 0..m {
        slots.push(tails[r]);
        slots.push(heads[r]);
    }
    AdmissibleSequence { slots, n, k1, k2 }
}

/// The multi-digraph induced by a sequence: edge r = (slots[2r], slots[2r+1]).
pub fn to_multidigraph(seq: &AdmissibleSequence) -> LabeledMultiDigraph {
    let edges = seq
        .slots
        .chunks_exact(2)
        .map(|pair| (pair[0], pair[1]))
        .collect();
    LabeledMultiDigraph::new(seq.n, edges).expect("sequence slots validated")
}

/// No loop and no repeated ordered pair.
pub fn is_simple(g: &LabeledMultiDigraph) -> bool {
    g.is_simple()
}

/// Uniform simple (k1,k2)-dicore on [n] with m edges, by rejection of
/// admissible sequences until the induced digraph is simple. Also returns
/// the number of attempts, for acceptance-rate statistics.
pub fn sample_simple_dicore(
    n: usize,
    m: usize,
    k1: usize,
    k2: usize,
    rng: &mut impl Rng,
    max_attempts: u64,
) -> Result<(LabeledMultiDigraph, u64)> {
    if m > n * n.saturating_sub(1) {
        return Err(Error::Precondition(format!(
            "no simple digraph on {n} vertices has {m} edges"
        )));
    }
    for attempt in 1..=max_attempts {
        let seq = sample_admissible_sequence(n, m, k1, k2, rng)?;
        let g = to_multidigraph(&seq);
        if g.is_simple() {
            return Ok((g, attempt));
        }
    }
    Err(Error::Exhausted {
        attempts: max_attempts,
    })
}
