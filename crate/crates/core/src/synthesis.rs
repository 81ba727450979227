//! Exact decomposition of unitaries over `Z[ω, 1/χ]` into syllables
//! `H·D(a0,a1,a2)·R^ε·X^δ` plus a monomial residue, and expansion of the
//! result into the `{H, S, R}` alphabet.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg3::{d_gate, generators, RingMatrix3};
use crate::ring::Unit;

/// A gate of the normal form, or of a monomial residue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    H,
    Hdg,
    S,
    R,
    /// `X^k`, `k ∈ {1, 2}`.
    X(u8),
    X01,
    X12,
    D(u8, u8, u8),
}

impl Gate {
    pub fn matrix(&self) -> RingMatrix3 {
        let g = generators();
        match *self {
            Gate::H => g.h,
            Gate::Hdg => g.h_dagger,
            Gate::S => g.s,
            Gate::R => g.r,
            Gate::X(k) => g.x_pow(k),
            Gate::X01 => g.x01,
            Gate::X12 => g.x12,
            Gate::D(a, b, c) => d_gate(a, b, c),
        }
    }

    pub fn is_r(&self) -> bool {
        matches!(self, Gate::R)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H => write!(f, "H"),
            Gate::Hdg => write!(f, "Hdg"),
            Gate::S => write!(f, "S"),
            Gate::R => write!(f, "R"),
            Gate::X(k) => write!(f, "X^{k}"),
            Gate::X01 => write!(f, "X01"),
            Gate::X12 => write!(f, "X12"),
            Gate::D(a, b, c) => write!(f, "D({a},{b},{c})"),
        }
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown gate token `{s}`"));
        let digit = |t: &str| -> Result<u8> {
            match t.trim().parse::<u8>() {
                Ok(v) if v < 3 => Ok(v),
                _ => Err(bad()),
            }
        };
        Ok(match s {
            "H" => Gate::H,
            "Hdg" => Gate::Hdg,
            "S" => Gate::S,
            "R" => Gate::R,
            "X" => Gate::X(1),
            "X01" => Gate::X01,
            "X12" => Gate::X12,
            _ => {
                if let Some(k) = s.strip_prefix("X^") {
                    Gate::X(digit(k)?)
                } else if let Some(inner) = s.strip_prefix("D(").and_then(|t| t.strip_suffix(')')) {
                    let parts: Vec<&str> = inner.split(',').collect();
                    if parts.len() != 3 {
                        return Err(bad());
                    }
                    Gate::D(digit(parts[0])?, digit(parts[1])?, digit(parts[2])?)
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

impl Serialize for Gate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Gate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exact product of a gate sequence, leftmost gate first.
pub fn product(gates: &[Gate]) -> Result<RingMatrix3> {
    gates
        .iter()
        .try_fold(RingMatrix3::identity(), |acc, g| acc.checked_mul(&g.matrix()))
}

/// A gate sequence with a global unit phase: `source = phase · Π syllables`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateWord {
    pub syllables: Vec<Gate>,
    pub n_r: usize,
    pub phase: Unit,
}

impl GateWord {
    pub fn new(syllables: Vec<Gate>, phase: Unit) -> Self {
        let n_r = syllables.iter().filter(|g| g.is_r()).count();
        Self {
            syllables,
            n_r,
            phase,
        }
    }

    /// `phase · Π syllables`.
    pub fn matrix(&self) -> Result<RingMatrix3> {
        Ok(product(&self.syllables)?.scale_unit(self.phase))
    }
}

impl fmt::Display for GateWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> = self.syllables.iter().map(Gate::to_string).collect();
        write!(f, "{}", toks.join(" "))
    }
}

/// Parses whitespace-separated gate tokens.
pub fn parse_word(s: &str) -> Result<Vec<Gate>> {
    s.split_whitespace().map(str::parse).collect()
}

/// Formats a gate sequence as whitespace-separated tokens.
pub fn format_word(gates: &[Gate]) -> String {
    gates.iter().map(Gate::to_string).collect::<Vec<_>>().join(" ")
}

/// The common sde of all entries; errors if two nonzero entries disagree.
pub fn sde_matrix(v: &RingMatrix3) -> Result<u32> {
    let f = v.fexp();
    for i in 0..3 {
        for j in 0..3 {
            let e = v.entry(i, j);
            if !e.num().is_zero() && e.fexp() != f {
                return Err(Error::InvariantBreach(format!(
                    "entry ({i},{j}) has sde {} but the matrix has {f}",
                    e.fexp()
                )));
            }
        }
    }
    Ok(f)
}

/// Shortest `{H, S}` word for every Clifford class modulo unit phase.
#[derive(Debug, Clone)]
pub struct CliffordWords {
    words: HashMap<RingMatrix3, (Vec<Gate>, Unit)>,
}

impl CliffordWords {
    pub const MAX_LEN: usize = 12;

    /// Breadth-first search over `{H, S}` words up to [`Self::MAX_LEN`].
    pub fn build() -> Self {
        let mut words: HashMap<RingMatrix3, (Vec<Gate>, Unit)> = HashMap::new();
        let (rep, u) = RingMatrix3::identity().canonical_phase();
        words.insert(rep, (Vec::new(), u));
        let mut queue = VecDeque::from([(RingMatrix3::identity(), Vec::<Gate>::new())]);
        while let Some((m, w)) = queue.pop_front() {
            if w.len() == Self::MAX_LEN {
                continue;
            }
            for g in [Gate::H, Gate::S] {
                let next = m.checked_mul(&g.matrix()).expect("Clifford entries stay small");
                let (rep, u) = next.canonical_phase();
                if words.contains_key(&rep) {
                    continue;
                }
                let mut nw = w.clone();
                nw.push(g);
                words.insert(rep, (nw.clone(), u));
                queue.push_back((next, nw));
            }
        }
        Self { words }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// `{H, S}` word `w` and unit `u` with `m = u · Π w`.
    pub fn word_for(&self, m: &RingMatrix3) -> Option<(Vec<Gate>, Unit)> {
        let (rep, u_m) = m.canonical_phase();
        let (w, u_w) = self.words.get(&rep)?;
        // rep = u_m·m and rep = u_w·Π w.
        Some((w.clone(), u_m.inverse() * *u_w))
    }
}

pub fn clifford_words() -> &'static CliffordWords {
    static WORDS: OnceLock<CliffordWords> = OnceLock::new();
    WORDS.get_or_init(CliffordWords::build)
}

/// Every sde-0 unitary, modulo unit phase, with a word of minimal `R` count.
#[derive(Debug, Clone)]
pub struct MonomialTable {
    /// Exact matrix to a word of minimal `R` count.
    exact: HashMap<RingMatrix3, Vec<Gate>>,
    /// Phase class representative to (word, unit) with `rep = unit · Π word`.
    classes: HashMap<RingMatrix3, (Vec<Gate>, Unit)>,
}

fn r_count(w: &[Gate]) -> usize {
    w.iter().filter(|g| g.is_r()).count()
}

impl MonomialTable {
    /// 0-1 breadth-first search from `I` over `S, X, X01, X12, H² = -X12`
    /// (cost 0) and `R, X R X², X² R X` (cost 1). `H²` supplies the phase
    /// `-1`, so every exact member has a word with at most one `R`.
    pub fn build() -> Self {
        let gens: Vec<Vec<Gate>> = vec![
            vec![Gate::S],
            vec![Gate::X(1)],
            vec![Gate::X01],
            vec![Gate::X12],
            vec![Gate::H, Gate::H],
            vec![Gate::R],
            vec![Gate::X(1), Gate::R, Gate::X(2)],
            vec![Gate::X(2), Gate::R, Gate::X(1)],
        ];
        let gen_mats: Vec<RingMatrix3> = gens.iter().map(|w| product(w).expect("small")).collect();
        let mut best: HashMap<RingMatrix3, (usize, Vec<Gate>)> = HashMap::new();
        let mut deque = VecDeque::from([(RingMatrix3::identity(), 0usize, Vec::<Gate>::new())]);
        best.insert(RingMatrix3::identity(), (0, Vec::new()));
        while let Some((m, cost, w)) = deque.pop_front() {
            if best.get(&m).is_some_and(|(c, bw)| *c < cost || (*c == cost && bw.len() < w.len())) {
                continue;
            }
            for (g, gm) in gens.iter().zip(&gen_mats) {
                let next = m.checked_mul(gm).expect("monomials stay small");
                let step = r_count(g);
                let ncost = cost + step;
                let mut nw = w.clone();
                nw.extend_from_slice(g);
                let better = match best.get(&next) {
                    None => true,
                    Some((c, bw)) => ncost < *c || (ncost == *c && nw.len() < bw.len()),
                };
                if better {
                    best.insert(next, (ncost, nw.clone()));
                    if step == 0 {
                        deque.push_front((next, ncost, nw));
                    } else {
                        deque.push_back((next, ncost, nw));
                    }
                }
            }
        }
        let exact: HashMap<RingMatrix3, Vec<Gate>> = best.into_iter().map(|(m, (_, w))| (m, w)).collect();
        let mut classes: HashMap<RingMatrix3, (Vec<Gate>, Unit)> = HashMap::new();
        let mut members: Vec<(&RingMatrix3, &Vec<Gate>)> = exact.iter().collect();
        // Deterministic choice among phase-equivalent members.
        members.sort_by(|a, b| {
            (r_count(a.1), a.1.len(), a.1).cmp(&(r_count(b.1), b.1.len(), b.1))
        });
        for (m, w) in members {
            let (rep, u) = m.canonical_phase();
            // rep = u·m = u·Π w.
            classes.entry(rep).or_insert_with(|| (w.clone(), u));
        }
        Self { exact, classes }
    }

    /// Number of exact sde-0 unitaries (phases distinguished).
    pub fn exact_len(&self) -> usize {
        self.exact.len()
    }

    /// Number of classes modulo unit phase.
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn exact_members(&self) -> impl Iterator<Item = (&RingMatrix3, &Vec<Gate>)> {
        self.exact.iter()
    }

    /// Word `w` and unit `u` with `m = u · Π w`, or `None` if `m` is not a
    /// sde-0 unitary.
    pub fn lookup(&self, m: &RingMatrix3) -> Option<(Vec<Gate>, Unit)> {
        let (rep, u_m) = m.canonical_phase();
        let (w, u_rep) = self.classes.get(&rep)?;
        Some((w.clone(), u_m.inverse() * *u_rep))
    }
}

pub fn monomial_table() -> &'static MonomialTable {
    static TABLE: OnceLock<MonomialTable> = OnceLock::new();
    TABLE.get_or_init(MonomialTable::build)
}

/// Alias kept for callers that build a table explicitly.
pub fn build_monomial_table() -> MonomialTable {
    MonomialTable::build()
}

fn neg3(a: u8) -> u8 {
    (3 - a % 3) % 3
}

/// `(ε, a0, a1, a2, δ)` in search order: `ε = 0` first, then lexicographic.
fn syllable_order() -> impl Iterator<Item = (u8, u8, u8, u8, u8)> {
    (0..2u8).flat_map(|e| {
        (0..3u8).flat_map(move |a0| {
            (0..3u8).flat_map(move |a1| (0..3u8).flat_map(move |a2| (0..3u8).map(move |d| (e, a0, a1, a2, d))))
        })
    })
}

/// `H·D(a)·R^ε·X^δ`.
fn syllable_matrix(e: u8, a0: u8, a1: u8, a2: u8, d: u8) -> RingMatrix3 {
    let mut gates = vec![Gate::H, Gate::D(a0, a1, a2)];
    if e == 1 {
        gates.push(Gate::R);
    }
    if d != 0 {
        gates.push(Gate::X(d));
    }
    product(&gates).expect("syllables are small")
}

/// Tokens of `(H·D(a)·R^ε·X^δ)⁻¹ = X^{-δ}·R^ε·D(-a)·H†`.
fn syllable_inverse(e: u8, a0: u8, a1: u8, a2: u8, d: u8) -> Vec<Gate> {
    let mut out = Vec::new();
    if d != 0 {
        out.push(Gate::X(neg3(d)));
    }
    if e == 1 {
        out.push(Gate::R);
    }
    if (a0, a1, a2) != (0, 0, 0) {
        out.push(Gate::D(neg3(a0), neg3(a1), neg3(a2)));
    }
    out.push(Gate::Hdg);
    out
}

type Syllable = ((u8, u8, u8, u8, u8), RingMatrix3);

fn syllables() -> &'static [Syllable] {
    static SYL: OnceLock<Vec<Syllable>> = OnceLock::new();
    SYL.get_or_init(|| {
        syllable_order()
            .map(|k| (k, syllable_matrix(k.0, k.1, k.2, k.3, k.4)))
            .collect()
    })
}

/// Writes `V = u · T₁⁻¹ ⋯ T_k⁻¹ · M` with syllables `Tᵢ = H D R^ε X^δ`,
/// each lowering the sde by exactly one, and `M` a monomial.
pub fn decompose(v: &RingMatrix3) -> Result<GateWord> {
    if !crate::linalg3::is_unitary(v) {
        return Err(Error::NotUnitary);
    }
    let mut u = *v;
    let mut s = sde_matrix(&u)?;
    let mut gates = Vec::new();
    while s > 0 {
        let step = syllables().iter().find_map(|(k, t)| {
            let next = t.checked_mul(&u).ok()?;
            (next.fexp() + 1 == s).then_some((*k, next))
        });
        let Some((k, next)) = step else {
            return Err(Error::NoReduction { sde: s });
        };
        let ns = sde_matrix(&next)?;
        debug_assert_eq!(ns + 1, s);
        gates.extend(syllable_inverse(k.0, k.1, k.2, k.3, k.4));
        u = next;
        s = ns;
    }
    let (tail, phase) = monomial_table()
        .lookup(&u)
        .ok_or_else(|| Error::InvariantBreach("sde-0 residue missing from the monomial table".into()))?;
    gates.extend(tail);
    let word = GateWord::new(gates, phase);
    if word.matrix()? != *v {
        return Err(Error::InvariantBreach("decomposition does not reproduce its input".into()));
    }
    Ok(word)
}

/// A word over `{H, S, R}` only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub tokens: Vec<Gate>,
    /// `Π word.syllables = phase · Π tokens`.
    pub phase: Unit,
}

/// Rewrites every Clifford gate by its cached `{H, S}` word. The result is
/// phase-equal to the word's matrix; `R` tokens are kept as they are.
pub fn expand(word: &GateWord) -> Result<Expansion> {
    let cw = clifford_words();
    let mut tokens = Vec::new();
    let mut phase = Unit::ONE;
    for g in &word.syllables {
        match g {
            Gate::H | Gate::S | Gate::R => tokens.push(*g),
            _ => {
                let (w, u) = cw
                    .word_for(&g.matrix())
                    .ok_or_else(|| Error::InvariantBreach(format!("no Clifford word for {g}")))?;
                tokens.extend(w);
                phase = phase * u;
            }
        }
    }
    Ok(Expansion { tokens, phase })
}

/// `R` count of a matrix's decomposition.
pub fn r_count_of(v: &RingMatrix3) -> Result<usize> {
    decompose(v).map(|w| w.n_r)
}
