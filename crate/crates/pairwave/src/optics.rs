//! Exact mode algebra for the entanglement verification step.
//!
//! Once the pair is dissociated, everything downstream is linear optics
//! on a handful of labeled guide modes: 50-50 splitters, a tunable phase
//! in one branch, and rf rotations of the spin doublet. The state space
//! is tiny, so amplitudes are stored as dense tables over explicit label
//! pairs and every interferometer identity holds to f64 roundoff — no
//! sampling, no truncation.
//!
//! The two atoms are distinguished by position in the label pair (first
//! slot = atom 1's mode), not by an exchange-symmetry rule; the spin
//! singlet carries the antisymmetry where it matters physically.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Norm slack tolerated when accepting an amplitude table.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Largest deviation from U†U = I accepted for a mode map.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Which atom of the pair an operation addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Particle {
    First,
    Second,
}

/// Pure state of the atom pair over labeled single-particle modes.
///
/// `amplitudes` maps ordered label pairs (atom-1 mode, atom-2 mode) to
/// complex amplitudes. Labels may be declared with zero amplitude; a
/// label absent from the declared sets is unknown to the state and
/// operations addressing it fail rather than silently doing nothing.
#[derive(Clone, Debug)]
pub struct TwoParticleState<L: Ord + Clone + fmt::Debug> {
    modes_first: BTreeSet<L>,
    modes_second: BTreeSet<L>,
    amplitudes: BTreeMap<(L, L), Complex64>,
}

/// A unitary acting on an ordered pair of modes of one atom.
///
/// Column `j` of `matrix` is the image of `inputs.j` expressed in the
/// `outputs` basis (row 0 = `outputs.0`). Output labels replace the
/// input labels in the state's declared mode set, so a splitter can
/// relabel guides into primed ports.
#[derive(Clone, Debug)]
pub struct TwoModeUnitary<L: Ord + Clone + fmt::Debug> {
    inputs: (L, L),
    outputs: (L, L),
    matrix: [[Complex64; 2]; 2],
}

impl<L: Ord + Clone + fmt::Debug> TwoModeUnitary<L> {
    /// Validates distinct labels and unitarity within
    /// [`UNITARY_TOLERANCE`].
    pub fn new(inputs: (L, L), outputs: (L, L), matrix: [[Complex64; 2]; 2]) -> Result<Self> {
        if inputs.0 == inputs.1 || outputs.0 == outputs.1 {
            return Err(Error::InvalidParameter(
                "mode map needs two distinct input and two distinct output labels".into(),
            ));
        }
        // deviation of M†M from the identity, entry by entry
        let mut deviation = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                let mut g = ZERO;
                for row in &matrix {
                    g += row[i].conj() * row[j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                deviation = deviation.max((g - target).norm());
            }
        }
        if deviation > UNITARY_TOLERANCE {
            return Err(Error::NonUnitary { deviation });
        }
        Ok(Self { inputs, outputs, matrix })
    }
}

/// The 50-50 guide splitter, with the quarter-wave phase on reflection:
/// `inputs.0` → (i·`outputs.0` + `outputs.1`)/√2 and
/// `inputs.1` → (`outputs.0` + i·`outputs.1`)/√2.
pub fn beam_splitter<L: Ord + Clone + fmt::Debug>(
    inputs: (L, L),
    outputs: (L, L),
) -> TwoModeUnitary<L> {
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let t = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    TwoModeUnitary::new(inputs, outputs, [[t, r], [r, t]]).expect("the 50-50 matrix is unitary")
}

/// The π/2 rf rotation on the spin doublet:
/// |↑⟩ → (|↑⟩+|↓⟩)/√2, |↓⟩ → (|↑⟩−|↓⟩)/√2. Its own inverse.
pub fn rf_half_pulse() -> TwoModeUnitary<&'static str> {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    TwoModeUnitary::new(("up", "down"), ("up", "down"), [[s, s], [s, -s]])
        .expect("the rf matrix is unitary")
}

impl<L: Ord + Clone + fmt::Debug> TwoParticleState<L> {
    /// Builds a state from an amplitude list. Duplicate label pairs are
    /// rejected, and the total probability must be 1 within
    /// [`NORM_TOLERANCE`]. Entries with zero amplitude are kept: they
    /// declare modes the state knows about.
    pub fn new(amplitudes: Vec<((L, L), Complex64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut modes_first = BTreeSet::new();
        let mut modes_second = BTreeSet::new();
        for ((m1, m2), c) in amplitudes {
            modes_first.insert(m1.clone());
            modes_second.insert(m2.clone());
            if map.insert((m1, m2), c).is_some() {
                return Err(Error::InvalidParameter(
                    "duplicate basis label pair in amplitude list".into(),
                ));
            }
        }
        let state = Self { modes_first, modes_second, amplitudes: map };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(state)
    }

    /// Total probability ∑|amplitude|².
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|c| c.norm_sqr()).sum()
    }

    /// Declared mode labels of one atom.
    pub fn modes(&self, particle: Particle) -> &BTreeSet<L> {
        match particle {
            Particle::First => &self.modes_first,
            Particle::Second => &self.modes_second,
        }
    }

    /// Amplitude on a basis pair; zero for anything not stored.
    pub fn amplitude(&self, first: &L, second: &L) -> Complex64 {
        self.amplitudes.get(&(first.clone(), second.clone())).copied().unwrap_or(ZERO)
    }

    /// Probability of finding the atoms on the given mode pair.
    pub fn probability(&self, first: &L, second: &L) -> f64 {
        self.amplitude(first, second).norm_sqr()
    }

    /// Joint detection probabilities over every stored mode pair —
    /// after the splitters these are the coincidence rates per port
    /// pair.
    pub fn probabilities(&self) -> BTreeMap<(L, L), f64> {
        self.amplitudes.iter().map(|(k, c)| (k.clone(), c.norm_sqr())).collect()
    }

    fn addressed<'a>(&self, key: &'a (L, L), particle: Particle) -> &'a L {
        match particle {
            Particle::First => &key.0,
            Particle::Second => &key.1,
        }
    }

    /// e^{iφ} on every amplitude whose addressed atom occupies `mode`.
    pub fn phase_shift(&self, particle: Particle, mode: &L, phi: f64) -> Result<Self> {
        self.phase_mapped(particle, mode, phi, |l| l.clone())
    }

    /// Applies a two-mode unitary to one atom. Modes outside the map's
    /// input pair pass through unchanged; both input labels must be
    /// declared on that atom.
    pub fn apply_single(&self, particle: Particle, u: &TwoModeUnitary<L>) -> Result<Self> {
        self.apply_mapped(particle, u, |l| l.clone(), |_, k| k.clone())
    }

    /// Same unitary on both atoms, first then second.
    pub fn apply_both(&self, u: &TwoModeUnitary<L>) -> Result<Self> {
        self.apply_single(Particle::First, u)?.apply_single(Particle::Second, u)
    }

    /// Phase on the component of the label selected by `get`.
    fn phase_mapped<K, G>(&self, particle: Particle, mode: &K, phi: f64, get: G) -> Result<Self>
    where
        K: Ord + Clone + fmt::Debug,
        G: Fn(&L) -> K,
    {
        if !self.modes(particle).iter().any(|l| get(l) == *mode) {
            return Err(Error::UnknownMode(format!("{mode:?}")));
        }
        let rot = Complex64::from_polar(1.0, phi);
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|(key, &c)| {
                let hit = get(self.addressed(key, particle)) == *mode;
                (key.clone(), if hit { c * rot } else { c })
            })
            .collect();
        Ok(Self {
            modes_first: self.modes_first.clone(),
            modes_second: self.modes_second.clone(),
            amplitudes,
        })
    }

    /// Core mode-map application. `get` projects a label onto the
    /// component the unitary acts on, `rebuild` swaps that component
    /// out; for plain labels both are the identity story.
    fn apply_mapped<K, G, R>(
        &self,
        particle: Particle,
        u: &TwoModeUnitary<K>,
        get: G,
        rebuild: R,
    ) -> Result<Self>
    where
        K: Ord + Clone + fmt::Debug,
        G: Fn(&L) -> K,
        R: Fn(&L, &K) -> L,
    {
        let declared = self.modes(particle);
        for needed in [&u.inputs.0, &u.inputs.1] {
            if !declared.iter().any(|l| get(l) == *needed) {
                return Err(Error::UnknownMode(format!("{needed:?}")));
            }
        }
        let mut amplitudes: BTreeMap<(L, L), Complex64> = BTreeMap::new();
        for (key, &c) in &self.amplitudes {
            let label = self.addressed(key, particle);
            let k = get(label);
            let column = if k == u.inputs.0 {
                Some(0)
            } else if k == u.inputs.1 {
                Some(1)
            } else {
                None
            };
            match column {
                None => {
                    *amplitudes.entry(key.clone()).or_insert(ZERO) += c;
                }
                Some(j) => {
                    for (i, out) in [&u.outputs.0, &u.outputs.1].into_iter().enumerate() {
                        let new_label = rebuild(label, out);
                        let new_key = match particle {
                            Particle::First => (new_label, key.1.clone()),
                            Particle::Second => (key.0.clone(), new_label),
                        };
                        *amplitudes.entry(new_key).or_insert(ZERO) += c * u.matrix[i][j];
                    }
                }
            }
        }
        let remapped: BTreeSet<L> = declared
            .iter()
            .flat_map(|l| {
                let k = get(l);
                if k == u.inputs.0 || k == u.inputs.1 {
                    vec![rebuild(l, &u.outputs.0), rebuild(l, &u.outputs.1)]
                } else {
                    vec![l.clone()]
                }
            })
            .collect();
        let (modes_first, modes_second) = match particle {
            Particle::First => (remapped, self.modes_second.clone()),
            Particle::Second => (self.modes_first.clone(), remapped),
        };
        Ok(Self { modes_first, modes_second, amplitudes })
    }

    /// Squared Schmidt coefficients (descending) of the amplitude
    /// matrix, for states with at most two declared modes per atom.
    ///
    /// For a 2×2 table these are the eigenvalues of M†M, computed from
    /// trace and determinant — no iteration, exact to roundoff.
    pub fn schmidt_populations(&self) -> Result<(f64, f64)> {
        if self.modes_first.len() > 2 || self.modes_second.len() > 2 {
            return Err(Error::InvalidParameter(
                "Schmidt split implemented for at most two modes per atom".into(),
            ));
        }
        let m = self.amplitude_matrix();
        let trace: f64 = m.iter().flatten().map(|c| c.norm_sqr()).sum();
        let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm_sqr();
        let disc = (trace * trace - 4.0 * det).max(0.0).sqrt();
        Ok((0.5 * (trace + disc), (0.5 * (trace - disc)).max(0.0)))
    }

    /// Entropy of entanglement in bits: −∑ λ log₂ λ over the Schmidt
    /// populations. 0 for a product state, 1 for a Bell state.
    pub fn entanglement_entropy(&self) -> Result<f64> {
        let (p, q) = self.schmidt_populations()?;
        let h = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
        Ok(h(p) + h(q))
    }

    /// Concurrence 2|det M| of the (padded) 2×2 amplitude matrix.
    pub fn concurrence(&self) -> Result<f64> {
        if self.modes_first.len() > 2 || self.modes_second.len() > 2 {
            return Err(Error::InvalidParameter(
                "concurrence implemented for at most two modes per atom".into(),
            ));
        }
        let m = self.amplitude_matrix();
        Ok(2.0 * (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm())
    }

    /// Amplitude table as a 2×2 matrix over the sorted declared modes,
    /// zero-padded when an atom declares fewer than two.
    fn amplitude_matrix(&self) -> [[Complex64; 2]; 2] {
        let mut m = [[ZERO; 2]; 2];
        for (i, r) in self.modes_first.iter().take(2).enumerate() {
            for (j, c) in self.modes_second.iter().take(2).enumerate() {
                m[i][j] = self.amplitude(r, c);
            }
        }
        m
    }
}

/// Guide-mode labels: the decay branches and the splitter output ports.
pub type PathState = TwoParticleState<&'static str>;

/// Spin labels "up"/"down" for each atom.
pub type SpinState = TwoParticleState<&'static str>;

/// Combined (guide, spin) labels per atom.
pub type SpinPathState = TwoParticleState<(&'static str, &'static str)>;

/// State of the pair right after the molecule splitter: the molecule is
/// routed into guide branch "a" with amplitude `alpha` and branch "b"
/// with `beta`, and the subsequent decay keeps the atoms together, so
/// the pair ends up in α|a,a⟩ + β|b,b⟩.
///
/// (1/√2, −1/√2) gives the maximally entangled target state.
pub fn molecule_bs(alpha: Complex64, beta: Complex64) -> Result<PathState> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm });
    }
    PathState::new(vec![(("a", "a"), alpha), (("b", "b"), beta)])
}

/// The maximally entangled branch state (|a,a⟩ − |b,b⟩)/√2.
pub fn entangled_pair() -> PathState {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    molecule_bs(s, -s).expect("balanced amplitudes are normalized")
}

/// The spin singlet (|↑↓⟩ − |↓↑⟩)/√2.
pub fn singlet() -> SpinState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    SpinState::new(vec![
        (("up", "down"), Complex64::new(s, 0.0)),
        (("down", "up"), Complex64::new(-s, 0.0)),
    ])
    .expect("the singlet is normalized")
}

/// Tensor product of a guide-mode pair state with a spin pair state,
/// over combined (guide, spin) labels.
pub fn spin_path_product<P, S>(
    path: &TwoParticleState<P>,
    spin: &TwoParticleState<S>,
) -> TwoParticleState<(P, S)>
where
    P: Ord + Clone + fmt::Debug,
    S: Ord + Clone + fmt::Debug,
{
    let mut amplitudes = Vec::new();
    for ((p1, p2), &cp) in &path.amplitudes {
        for ((s1, s2), &cs) in &spin.amplitudes {
            amplitudes.push((((p1.clone(), s1.clone()), (p2.clone(), s2.clone())), cp * cs));
        }
    }
    TwoParticleState::new(amplitudes).expect("product of normalized states is normalized")
}

impl<P, S> TwoParticleState<(P, S)>
where
    P: Ord + Clone + fmt::Debug,
    S: Ord + Clone + fmt::Debug,
{
    /// Guide-mode unitary acting on one atom of the combined state,
    /// leaving its spin untouched.
    pub fn apply_path_unitary(&self, particle: Particle, u: &TwoModeUnitary<P>) -> Result<Self> {
        self.apply_mapped(particle, u, |l| l.0.clone(), |l, k| (k.clone(), l.1.clone()))
    }

    /// Spin unitary acting on one atom, leaving its guide mode alone.
    pub fn apply_spin_unitary(&self, particle: Particle, u: &TwoModeUnitary<S>) -> Result<Self> {
        self.apply_mapped(particle, u, |l| l.1.clone(), |l, k| (l.0.clone(), k.clone()))
    }

    /// e^{iφ} on amplitudes whose addressed atom travels guide `mode`.
    pub fn path_phase_shift(&self, particle: Particle, mode: &P, phi: f64) -> Result<Self> {
        self.phase_mapped(particle, mode, phi, |l| l.0.clone())
    }

    /// Joint guide-mode statistics with the spins summed out.
    pub fn path_probabilities(&self) -> BTreeMap<(P, P), f64> {
        let mut out = BTreeMap::new();
        for (((p1, _), (p2, _)), c) in &self.amplitudes {
            *out.entry((p1.clone(), p2.clone())).or_insert(0.0) += c.norm_sqr();
        }
        out
    }

    /// Joint spin statistics with the guide modes summed out.
    pub fn spin_probabilities(&self) -> BTreeMap<(S, S), f64> {
        let mut out = BTreeMap::new();
        for (((_, s1), (_, s2)), c) in &self.amplitudes {
            *out.entry((s1.clone(), s2.clone())).or_insert(0.0) += c.norm_sqr();
        }
        out
    }
}

/// Classical mixture of pure pair states — enough density-matrix
/// machinery to express the dephased (no-coherence) reference case
/// whose fringes must vanish.
#[derive(Clone, Debug)]
pub struct Mixture<L: Ord + Clone + fmt::Debug> {
    components: Vec<(f64, TwoParticleState<L>)>,
}

impl<L: Ord + Clone + fmt::Debug> Mixture<L> {
    /// Positive weights summing to 1 within [`NORM_TOLERANCE`].
    pub fn new(components: Vec<(f64, TwoParticleState<L>)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("mixture needs at least one component".into()));
        }
        if components.iter().any(|(w, _)| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidParameter("mixture weights must be positive".into()));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm: total });
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(f64, TwoParticleState<L>)] {
        &self.components
    }

    pub fn phase_shift(&self, particle: Particle, mode: &L, phi: f64) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|(w, s)| Ok((*w, s.phase_shift(particle, mode, phi)?)))
            .collect::<Result<_>>()?;
        Ok(Self { components })
    }

    pub fn apply_single(&self, particle: Particle, u: &TwoModeUnitary<L>) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|(w, s)| Ok((*w, s.apply_single(particle, u)?)))
            .collect::<Result<_>>()?;
        Ok(Self { components })
    }

    pub fn apply_both(&self, u: &TwoModeUnitary<L>) -> Result<Self> {
        self.apply_single(Particle::First, u)?.apply_single(Particle::Second, u)
    }

    /// Weighted detection probabilities over every mode pair.
    pub fn probabilities(&self) -> BTreeMap<(L, L), f64> {
        let mut out = BTreeMap::new();
        for (w, s) in &self.components {
            for (key, p) in s.probabilities() {
                *out.entry(key).or_insert(0.0) += w * p;
            }
        }
        out
    }
}

/// The decohered counterpart of [`entangled_pair`]: an even classical
/// mixture of the two branch outcomes, with both guide labels declared.
pub fn dephased_pair() -> Mixture<&'static str> {
    let one = Complex64::new(1.0, 0.0);
    Mixture::new(vec![
        (0.5, molecule_bs(one, ZERO).expect("branch state is normalized")),
        (0.5, molecule_bs(ZERO, one).expect("branch state is normalized")),
    ])
    .expect("weights sum to one")
}

/// First-harmonic fringe visibility, 2|∑ C e^{−iφ}| / ∑ C, from samples
/// of a coincidence rate over one phase period.
///
/// For uniformly spaced φ covering [0, 2π) this reads the modulation
/// depth of A(1 + V cos(φ + θ)) exactly — provided there are at least
/// three samples, below which the harmonic aliases onto its conjugate.
pub fn fringe_visibility(phis: &[f64], values: &[f64]) -> Result<f64> {
    if phis.len() != values.len() {
        return Err(Error::InvalidParameter("phase and sample slices differ in length".into()));
    }
    if phis.len() < 3 {
        return Err(Error::InvalidParameter(
            "visibility needs at least three phase samples".into(),
        ));
    }
    let total: f64 = values.iter().sum();
    if total <= 0.0 || total.is_nan() {
        return Err(Error::InvalidParameter(
            "visibility undefined for an all-zero coincidence record".into(),
        ));
    }
    let mut harmonic = ZERO;
    for (&phi, &v) in phis.iter().zip(values) {
        harmonic += Complex64::from_polar(v, -phi);
    }
    Ok(2.0 * harmonic.norm() / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// largest amplitude difference over the union of stored keys
    fn amplitude_distance(a: &PathState, b: &PathState) -> f64 {
        let mut keys: BTreeSet<(&'static str, &'static str)> = BTreeSet::new();
        keys.extend(a.amplitudes.keys().cloned());
        keys.extend(b.amplitudes.keys().cloned());
        keys.into_iter()
            .map(|(m1, m2)| (a.amplitude(&m1, &m2) - b.amplitude(&m1, &m2)).norm())
            .fold(0.0, f64::max)
    }

    /// phase in branch a of atom 1, then a splitter on each side
    fn interfere(state: &PathState, phi: f64) -> PathState {
        let bs = beam_splitter(("a", "b"), ("a'", "b'"));
        state.phase_shift(Particle::First, &"a", phi).unwrap().apply_both(&bs).unwrap()
    }

    fn coincidences(state: &PathState) -> [f64; 4] {
        [
            state.probability(&"a'", &"a'"),
            state.probability(&"b'", &"b'"),
            state.probability(&"a'", &"b'"),
            state.probability(&"b'", &"a'"),
        ]
    }

    #[test]
    fn molecule_bs_rejects_unbalanced_probability() {
        let err = molecule_bs(c(0.9, 0.0), c(0.1, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
        assert!(molecule_bs(c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2)).is_ok());
    }

    #[test]
    fn routed_into_one_branch_is_a_product_state() {
        let s = molecule_bs(c(1.0, 0.0), ZERO).unwrap();
        assert_eq!(s.probability(&"a", &"a"), 1.0);
        assert_eq!(s.concurrence().unwrap(), 0.0);
        assert_eq!(s.entanglement_entropy().unwrap(), 0.0);
        // the empty branch is still a declared mode
        assert!(s.modes(Particle::First).contains(&"b"));
    }

    #[test]
    fn balanced_splitting_is_maximally_entangled() {
        let s = entangled_pair();
        let (p, q) = s.schmidt_populations().unwrap();
        assert!((p - 0.5).abs() < 1e-15 && (q - 0.5).abs() < 1e-15);
        assert!((s.entanglement_entropy().unwrap() - 1.0).abs() < 1e-15);
        assert!((s.concurrence().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uneven_splitting_entropy_matches_the_schmidt_value() {
        let s = molecule_bs(c(0.7_f64.sqrt(), 0.0), c(0.3_f64.sqrt(), 0.0)).unwrap();
        let expected = 0.8812908992306927; // -0.7 log2 0.7 - 0.3 log2 0.3
        assert!((s.entanglement_entropy().unwrap() - expected).abs() < 1e-12);
        let (p, q) = s.schmidt_populations().unwrap();
        assert!((p - 0.7).abs() < 1e-14 && (q - 0.3).abs() < 1e-14);
    }

    #[test]
    fn zero_and_full_turn_phases_are_identities() {
        let s = entangled_pair();
        let same = s.phase_shift(Particle::First, &"a", 0.0).unwrap();
        assert_eq!(amplitude_distance(&s, &same), 0.0);
        let turn = s.phase_shift(Particle::First, &"a", TAU).unwrap();
        assert!(amplitude_distance(&s, &turn) < 1e-15);
    }

    #[test]
    fn phases_on_unknown_branches_are_rejected() {
        let s = entangled_pair();
        let err = s.phase_shift(Particle::First, &"c", 0.4).unwrap_err();
        assert!(matches!(err, Error::UnknownMode(_)));
        // splitter addressing ports the state does not declare
        let bs = beam_splitter(("a'", "b'"), ("x", "y"));
        assert!(matches!(
            s.apply_single(Particle::Second, &bs).unwrap_err(),
            Error::UnknownMode(_)
        ));
    }

    #[test]
    fn lopsided_matrices_are_rejected() {
        let m = [[c(1.0, 0.0), c(0.5, 0.0)], [ZERO, c(1.0, 0.0)]];
        let err = TwoModeUnitary::new(("a", "b"), ("a'", "b'"), m).unwrap_err();
        match err {
            Error::NonUnitary { deviation } => assert!(deviation > 0.4),
            other => panic!("expected a unitarity failure, got {other:?}"),
        }
        assert!(matches!(
            TwoModeUnitary::new(("a", "a"), ("a'", "b'"), m).unwrap_err(),
            Error::InvalidParameter(_)
        ));
    }

    #[test]
    fn splitter_matrix_is_unitary() {
        // survives the constructor's own U†U check with slack to spare
        let bs = beam_splitter(("a", "b"), ("a'", "b'"));
        for i in 0..2 {
            for j in 0..2 {
                let mut g = ZERO;
                for k in 0..2 {
                    g += bs.matrix[k][i].conj() * bs.matrix[k][j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((g - target).norm() < 1e-15);
            }
        }
    }

    /// Two splitters back to back swap the ports: the amplitude map
    /// squares to i·(swap), so an atom entering "a" leaves through the
    /// second splitter's "b" port with unit probability.
    #[test]
    fn double_splitter_swaps_the_ports() {
        let s = TwoParticleState::new(vec![(("a", "keep"), c(1.0, 0.0)), (("b", "keep"), ZERO)])
            .unwrap();
        let first = beam_splitter(("a", "b"), ("a'", "b'"));
        let second = beam_splitter(("a'", "b'"), ("a''", "b''"));
        let out = s
            .apply_single(Particle::First, &first)
            .unwrap()
            .apply_single(Particle::First, &second)
            .unwrap();
        assert!(out.probability(&"a''", &"keep") < 1e-30);
        assert!((out.probability(&"b''", &"keep") - 1.0).abs() < 1e-14);
        // the surviving amplitude is i, not 1: the swap carries the
        // quarter-wave phase along
        assert!((out.amplitude(&"b''", &"keep") - c(0.0, 1.0)).norm() < 1e-15);
    }

    /// A full interferometer arm — splitter, crossed-over recombination,
    /// splitter — returns the atom to the port it entered (up to a
    /// global i): the crossing feeds port a' into the second splitter's
    /// b input, and U·swap·U = i·1.
    #[test]
    fn crossed_recombination_restores_the_input() {
        let s = TwoParticleState::new(vec![(("a", "keep"), c(1.0, 0.0)), (("b", "keep"), ZERO)])
            .unwrap();
        let first = beam_splitter(("a", "b"), ("a'", "b'"));
        let crossed = beam_splitter(("b'", "a'"), ("a''", "b''"));
        let out = s
            .apply_single(Particle::First, &first)
            .unwrap()
            .apply_single(Particle::First, &crossed)
            .unwrap();
        assert!((out.probability(&"a''", &"keep") - 1.0).abs() < 1e-14);
        assert!(out.probability(&"b''", &"keep") < 1e-30);
        assert!((out.amplitude(&"a''", &"keep") - c(0.0, 1.0)).norm() < 1e-15);
    }

    /// Hand expansion of the interfered pair: with the phase in branch
    /// a of atom 1, the four port-pair amplitudes are
    ///   a'a': −(e^{iφ}+1)/(2√2)   b'b': +(e^{iφ}+1)/(2√2)
    ///   a'b': i(e^{iφ}−1)/(2√2)   b'a': i(e^{iφ}−1)/(2√2)
    #[test]
    fn interferometer_matches_the_hand_expansion() {
        for &phi in &[0.0, 0.3, 1.7, PI, 4.2, 5.9] {
            let out = interfere(&entangled_pair(), phi);
            let e = Complex64::from_polar(1.0, phi);
            let scale = 1.0 / (2.0 * 2.0_f64.sqrt());
            let plus = (e + 1.0) * scale;
            let minus = (e - 1.0) * scale * c(0.0, 1.0);
            for (m1, m2, want) in
                [("a'", "a'", -plus), ("b'", "b'", plus), ("a'", "b'", minus), ("b'", "a'", minus)]
            {
                let got = out.amplitude(&m1, &m2);
                assert!(
                    (got - want).norm() < 1e-13,
                    "phi={phi}: amplitude({m1},{m2}) = {got} expected {want}"
                );
            }
        }
    }

    #[test]
    fn coincidences_follow_the_cosine_fringe() {
        // deterministic low-discrepancy phase set
        for k in 0..100 {
            let phi = (k as f64 * 0.6180339887498949).fract() * TAU;
            let [caa, cbb, cab, cba] = coincidences(&interfere(&entangled_pair(), phi));
            let same = 0.25 * (1.0 + phi.cos());
            let cross = 0.25 * (1.0 - phi.cos());
            assert!((caa - same).abs() < 1e-12, "phi={phi}");
            assert!((cbb - same).abs() < 1e-12, "phi={phi}");
            assert!((cab - cross).abs() < 1e-12, "phi={phi}");
            assert!((cba - cross).abs() < 1e-12, "phi={phi}");
            assert!((caa + cbb + cab + cba - 1.0).abs() < 1e-12, "phi={phi}");
        }
    }

    #[test]
    fn special_phases_pin_the_sign_assignment() {
        // quarter period: every pair at 1/4
        for p in coincidences(&interfere(&entangled_pair(), PI / 2.0)) {
            assert!((p - 0.25).abs() < 1e-14);
        }
        // zero phase: the same-port pairs carry everything
        let [caa, cbb, cab, cba] = coincidences(&interfere(&entangled_pair(), 0.0));
        assert!((caa - 0.5).abs() < 1e-14 && (cbb - 0.5).abs() < 1e-14);
        assert!(cab == 0.0 && cba == 0.0);
    }

    #[test]
    fn fringes_are_periodic_in_the_phase() {
        for &phi in &[0.1, 2.3, 5.1] {
            let a = coincidences(&interfere(&entangled_pair(), phi));
            let b = coincidences(&interfere(&entangled_pair(), phi + TAU));
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn every_operation_preserves_the_norm() {
        let bs = beam_splitter(("a", "b"), ("a'", "b'"));
        let s = molecule_bs(c(0.6, 0.0), c(0.0, -0.8)).unwrap();
        let steps = [
            s.phase_shift(Particle::First, &"a", 1.234).unwrap(),
            s.phase_shift(Particle::Second, &"b", -0.77).unwrap(),
            s.apply_single(Particle::First, &bs).unwrap(),
            s.apply_both(&bs).unwrap(),
            interfere(&entangled_pair(), 2.9),
        ];
        for step in &steps {
            assert!((step.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn disjoint_operations_commute() {
        let bs2 = beam_splitter(("a", "b"), ("a'", "b'"));
        let s = entangled_pair();
        let one = s
            .phase_shift(Particle::First, &"a", 0.9)
            .unwrap()
            .apply_single(Particle::Second, &bs2)
            .unwrap();
        let two = s
            .apply_single(Particle::Second, &bs2)
            .unwrap()
            .phase_shift(Particle::First, &"a", 0.9)
            .unwrap();
        let dist = one
            .probabilities()
            .iter()
            .map(|(k, p)| (p - two.probabilities()[k]).abs())
            .fold(0.0, f64::max);
        assert!(dist < 1e-15);
        let amp_dist = one
            .amplitudes
            .iter()
            .map(|(k, a)| (a - two.amplitude(&k.0, &k.1)).norm())
            .fold(0.0, f64::max);
        assert!(amp_dist < 1e-15);
    }

    #[test]
    fn dephased_mixture_shows_no_fringe() {
        let bs = beam_splitter(("a", "b"), ("a'", "b'"));
        let mut phis = Vec::new();
        let mut caa = Vec::new();
        for k in 0..12 {
            let phi = TAU * k as f64 / 12.0;
            let out = dephased_pair()
                .phase_shift(Particle::First, &"a", phi)
                .unwrap()
                .apply_both(&bs)
                .unwrap();
            let p = out.probabilities();
            for key in [("a'", "a'"), ("b'", "b'"), ("a'", "b'"), ("b'", "a'")] {
                assert!((p[&key] - 0.25).abs() < 1e-14, "phi={phi}");
            }
            phis.push(phi);
            caa.push(p[&("a'", "a'")]);
        }
        assert!(fringe_visibility(&phis, &caa).unwrap() < 1e-12);
    }

    #[test]
    fn visibility_reads_the_modulation_depth() {
        let n = 7;
        let phis: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
        let full: Vec<f64> = phis.iter().map(|p| 0.25 * (1.0 + p.cos())).collect();
        assert!((fringe_visibility(&phis, &full).unwrap() - 1.0).abs() < 1e-12);
        let shallow: Vec<f64> =
            phis.iter().map(|p| 0.25 * (1.0 + 0.37 * (p + 0.4).cos())).collect();
        assert!((fringe_visibility(&phis, &shallow).unwrap() - 0.37).abs() < 1e-12);
        assert!(fringe_visibility(&phis[..2], &full[..2]).is_err());
        assert!(fringe_visibility(&phis, &full[..3]).is_err());
    }

    #[test]
    fn rf_pulse_is_its_own_inverse() {
        let up_up =
            SpinState::new(vec![(("up", "up"), c(1.0, 0.0)), (("down", "down"), ZERO)]).unwrap();
        let rf = rf_half_pulse();
        let once = up_up.apply_single(Particle::First, &rf).unwrap();
        assert!((once.amplitude(&"up", &"up") - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((once.amplitude(&"down", &"up") - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        let twice = once.apply_single(Particle::First, &rf).unwrap();
        assert!((twice.amplitude(&"up", &"up") - c(1.0, 0.0)).norm() < 1e-12);
        assert!(twice.probability(&"down", &"up") < 1e-24);
    }

    /// A π/2 pulse on both atoms sends the singlet to minus itself —
    /// global sign only, so every detection probability is unchanged.
    #[test]
    fn singlet_survives_a_common_pulse_up_to_sign() {
        let s = singlet();
        let rotated = s.apply_both(&rf_half_pulse()).unwrap();
        for key in [("up", "down"), ("down", "up"), ("up", "up"), ("down", "down")] {
            let before = s.amplitude(&key.0, &key.1);
            let after = rotated.amplitude(&key.0, &key.1);
            assert!((after + before).norm() < 1e-12, "{key:?}");
        }
        assert!((rotated.probability(&"up", &"down") - 0.5).abs() < 1e-12);
        assert!(rotated.probability(&"up", &"up") < 1e-24);
    }

    #[test]
    fn product_with_the_singlet_keeps_both_statistics() {
        let pair = spin_path_product(&entangled_pair(), &singlet());
        // four amplitudes of modulus 1/2
        let mags: Vec<f64> =
            pair.amplitudes.values().map(|a| a.norm()).filter(|m| *m > 0.0).collect();
        assert_eq!(mags.len(), 4);
        for m in mags {
            assert!((m - 0.5).abs() < 1e-15);
        }
        // reduced statistics reproduce each factor
        let path = pair.path_probabilities();
        assert!((path[&("a", "a")] - 0.5).abs() < 1e-15);
        assert!((path[&("b", "b")] - 0.5).abs() < 1e-15);
        let spin = pair.spin_probabilities();
        assert!((spin[&("up", "down")] - 0.5).abs() < 1e-15);
        assert!((spin[&("down", "up")] - 0.5).abs() < 1e-15);
    }

    /// Interfering the guide modes of the doubly entangled pair leaves
    /// the spin factor alone and reproduces the pure-path fringes after
    /// the spins are summed out.
    #[test]
    fn path_fringes_survive_the_spin_factor() {
        let bs = beam_splitter(("a", "b"), ("a'", "b'"));
        for &phi in &[0.0, 0.8, 2.2, 4.9] {
            let out = spin_path_product(&entangled_pair(), &singlet())
                .path_phase_shift(Particle::First, &"a", phi)
                .unwrap()
                .apply_path_unitary(Particle::First, &bs)
                .unwrap()
                .apply_path_unitary(Particle::Second, &bs)
                .unwrap();
            let reduced = out.path_probabilities();
            let pure = interfere(&entangled_pair(), phi);
            for key in [("a'", "a'"), ("b'", "b'"), ("a'", "b'"), ("b'", "a'")] {
                let a = reduced.get(&key).copied().unwrap_or(0.0);
                assert!((a - pure.probability(&key.0, &key.1)).abs() < 1e-13, "phi={phi} {key:?}");
            }
            let spins = out.spin_probabilities();
            assert!((spins[&("up", "down")] - 0.5).abs() < 1e-13);
            // rf rotations commute through: spin ops act on their own label slot
            let rotated = out.apply_spin_unitary(Particle::First, &rf_half_pulse()).unwrap();
            assert!((rotated.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    /// With a product spin attached, knowing the spin outcome says
    /// nothing about the path: conditional path statistics match the
    /// unconditional ones.
    #[test]
    fn product_spin_carries_no_path_information() {
        let spin_product =
            SpinState::new(vec![(("up", "up"), c(1.0, 0.0)), (("down", "down"), ZERO)]).unwrap();
        let pair = spin_path_product(&entangled_pair(), &spin_product);
        let joint = pair.probabilities();
        let paths = pair.path_probabilities();
        for ((p1, p2), pp) in &paths {
            // all weight sits on the (up, up) spin outcome
            let key = ((*p1, "up"), (*p2, "up"));
            let cond = joint.get(&key).copied().unwrap_or(0.0);
            assert!((cond - pp).abs() < 1e-15);
        }
    }

    #[test]
    fn mixtures_validate_their_weights() {
        assert!(matches!(
            Mixture::<&'static str>::new(vec![]).unwrap_err(),
            Error::InvalidParameter(_)
        ));
        let s = entangled_pair();
        assert!(matches!(
            Mixture::new(vec![(0.4, s.clone()), (0.4, s.clone())]).unwrap_err(),
            Error::NotNormalized { .. }
        ));
        assert!(matches!(
            Mixture::new(vec![(1.5, s.clone()), (-0.5, s)]).unwrap_err(),
            Error::InvalidParameter(_)
        ));
    }

    #[test]
    fn duplicate_basis_labels_are_rejected() {
        let err = PathState::new(vec![(("a", "a"), c(1.0, 0.0)), (("a", "a"), ZERO)]).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }
}
