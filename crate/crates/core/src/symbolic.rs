//! Two-sided subshifts of finite type, restricted to eventually periodic points.
//!
//! Every [`SymbolSequence`] is stored in a canonical form: minimal-period
//! tails on both sides and a minimal core between them. Two sequences are
//! equal as bi-infinite words exactly when their canonical forms are equal,
//! which makes the metric zero-test, stable/unstable membership and first
//! returns decidable.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A letter of the alphabet `0..l`.
pub type Symbol = usize;

/// Default cap on the number of orbits produced by [`enumerate_periodic`].
pub const DEFAULT_ORBIT_CAP: usize = 5_000_000;

/// The 0/1 matrix `Q` defining which transitions `i -> j` are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    size: usize,
    entries: Vec<bool>,
    // m[i][j]: smallest m >= 1 with (Q^m)_{ij} > 0
    connectivity: Vec<Option<usize>>,
}

impl TransitionMatrix {
    /// Validates a square 0/1 matrix and computes its connectivity table.
    pub fn new(rows: &[Vec<u8>]) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::MalformedTransitionMatrix("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(size * size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::MalformedTransitionMatrix(format!(
                    "row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            for &q in row {
                match q {
                    0 => entries.push(false),
                    1 => entries.push(true),
                    other => {
                        return Err(Error::MalformedTransitionMatrix(format!(
                            "entry {other} in row {i} is not 0 or 1"
                        )))
                    }
                }
            }
        }
        for s in 0..size {
            let row_ok = (0..size).any(|j| entries[s * size + j]);
            let col_ok = (0..size).any(|i| entries[i * size + s]);
            if !row_ok || !col_ok {
                return Err(Error::NonAdmissibleAlphabet(s));
            }
        }
        let mut tm = TransitionMatrix {
            size,
            entries,
            connectivity: Vec::new(),
        };
        tm.connectivity = (0..size)
            .flat_map(|i| tm.shortest_paths_from(i))
            .collect();
        Ok(tm)
    }

    /// The full shift on `size` symbols.
    pub fn full_shift(size: usize) -> Self {
        Self::new(&vec![vec![1; size]; size]).expect("full shift is valid")
    }

    /// The golden-mean shift: symbol 1 may not follow itself.
    pub fn golden_mean() -> Self {
        Self::new(&[vec![1, 1], vec![1, 0]]).expect("golden mean shift is valid")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn allows(&self, from: Symbol, to: Symbol) -> bool {
        self.entries[from * self.size + to]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.allows(i, j) as u8).collect())
            .collect()
    }

    pub fn successors(&self, from: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.size).filter(move |&j| self.allows(from, j))
    }

    /// Smallest `m >= 1` with `(Q^m)_{ij} > 0`, if any.
    pub fn connectivity(&self, i: Symbol, j: Symbol) -> Option<usize> {
        self.connectivity[i * self.size + j]
    }

    pub fn is_irreducible(&self) -> bool {
        self.connectivity.iter().all(Option::is_some)
    }

    pub fn is_full_shift(&self) -> bool {
        self.entries.iter().all(|&q| q)
    }

    /// `max m_{ij}`, defined only for irreducible matrices.
    pub fn max_connectivity(&self) -> Option<usize> {
        self.connectivity
            .iter()
            .copied()
            .collect::<Option<Vec<_>>>()
            .and_then(|v| v.into_iter().max())
    }

    fn shortest_paths_from(&self, start: Symbol) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.size];
        let mut queue = VecDeque::new();
        for s in self.successors(start) {
            dist[s] = Some(1);
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for v in self.successors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Shortest word `c_1 … c_{n1-1}` with `a -> c_1 -> … -> c_{n1-1} -> b`
    /// admissible. The word is empty when `q_ab = 1`.
    pub fn connecting_word(&self, a: Symbol, b: Symbol) -> Result<Vec<Symbol>> {
        self.check_symbol(a)?;
        self.check_symbol(b)?;
        if !self.is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        if self.allows(a, b) {
            return Ok(Vec::new());
        }
        let mut parent: Vec<Option<Symbol>> = vec![None; self.size];
        let mut seen = vec![false; self.size];
        let mut queue = VecDeque::new();
        for s in self.successors(a) {
            seen[s] = true;
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            if self.allows(u, b) {
                let mut word = vec![u];
                let mut cur = u;
                while let Some(prev) = parent[cur] {
                    word.push(prev);
                    cur = prev;
                }
                word.reverse();
                return Ok(word);
            }
            for v in self.successors(u) {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        Err(Error::NotIrreducible)
    }

    pub fn check_symbol(&self, s: Symbol) -> Result<()> {
        if s < self.size {
            Ok(())
        } else {
            Err(Error::SymbolOutOfRange {
                symbol: s,
                size: self.size,
            })
        }
    }

    /// True when `w` read cyclically uses only allowed transitions.
    pub fn admits_cycle(&self, w: &[Symbol]) -> bool {
        !w.is_empty()
            && w.iter().all(|&s| s < self.size)
            && (0..w.len()).all(|i| self.allows(w[i], w[(i + 1) % w.len()]))
    }

    /// True when `w` read linearly uses only allowed transitions.
    pub fn admits_word(&self, w: &[Symbol]) -> bool {
        w.iter().all(|&s| s < self.size) && w.windows(2).all(|p| self.allows(p[0], p[1]))
    }

    /// Checks every adjacent pair of `x`, including both seams and the
    /// wrap-around of each periodic tail.
    pub fn check_sequence(&self, x: &SymbolSequence) -> Result<()> {
        let lo = x.core_start - x.left.len() as i64 - 1;
        let hi = x.core_end() + x.right.len() as i64;
        for n in lo..=hi {
            let (a, b) = (x.get(n), x.get(n + 1));
            self.check_symbol(a)?;
            self.check_symbol(b)?;
            if !self.allows(a, b) {
                return Err(Error::NotAdmissible {
                    from: a,
                    to: b,
                    index: n,
                });
            }
        }
        Ok(())
    }

    /// All admissible words of the given length, in lexicographic order.
    pub fn admissible_words(&self, len: usize) -> Vec<Vec<Symbol>> {
        let mut out = Vec::new();
        if len == 0 {
            out.push(Vec::new());
            return out;
        }
        let mut stack: Vec<Vec<Symbol>> = (0..self.size).rev().map(|s| vec![s]).collect();
        while let Some(w) = stack.pop() {
            if w.len() == len {
                out.push(w);
                continue;
            }
            let last = *w.last().unwrap();
            for s in (0..self.size).rev().filter(|&s| self.allows(last, s)) {
                let mut next = w.clone();
                next.push(s);
                stack.push(next);
            }
        }
        out
    }
}

/// An eventually periodic bi-infinite sequence `(…, x_{-1} | x_0, x_1, …)`.
///
/// Indices below `core_start` read the left period (repeated toward −∞),
/// indices in `[core_start, core_end)` read the core, and indices from
/// `core_end` on read the right period.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolSequence {
    left: Vec<Symbol>,
    core_start: i64,
    core: Vec<Symbol>,
    right: Vec<Symbol>,
}

impl SymbolSequence {
    /// Builds a sequence from its parts. `left` is aligned so that its last
    /// letter sits at index `core_start - 1`; `right` starts at the index
    /// following the core.
    pub fn new(
        left: Vec<Symbol>,
        core_start: i64,
        core: Vec<Symbol>,
        right: Vec<Symbol>,
    ) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        Ok(SymbolSequence {
            left,
            core_start,
            core,
            right,
        }
        .normalized())
    }

    /// The periodic point with `x_n = word[n mod |word|]`.
    pub fn periodic(word: &[Symbol]) -> Result<Self> {
        Self::new(word.to_vec(), 0, Vec::new(), word.to_vec())
    }

    pub fn constant(s: Symbol) -> Self {
        Self::periodic(&[s]).unwrap()
    }

    /// A finite `block` placed at `start` on a constant background.
    pub fn block_on_background(background: Symbol, start: i64, block: &[Symbol]) -> Self {
        Self::new(vec![background], start, block.to_vec(), vec![background]).unwrap()
    }

    #[inline]
    pub fn get(&self, n: i64) -> Symbol {
        if n < self.core_start {
            self.left[(n - self.core_start).rem_euclid(self.left.len() as i64) as usize]
        } else if n < self.core_end() {
            self.core[(n - self.core_start) as usize]
        } else {
            self.right[(n - self.core_end()).rem_euclid(self.right.len() as i64) as usize]
        }
    }

    /// Coordinates `x_lo, …, x_{hi-1}`.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<Symbol> {
        (lo..hi).map(|n| self.get(n)).collect()
    }

    pub fn left_period(&self) -> &[Symbol] {
        &self.left
    }

    pub fn right_period(&self) -> &[Symbol] {
        &self.right
    }

    pub fn core(&self) -> &[Symbol] {
        &self.core
    }

    pub fn core_start(&self) -> i64 {
        self.core_start
    }

    pub fn core_end(&self) -> i64 {
        self.core_start + self.core.len() as i64
    }

    /// Least period if the sequence is periodic.
    pub fn period(&self) -> Option<usize> {
        (self.core.is_empty() && self.left == self.right && self.core_start == 0)
            .then_some(self.left.len())
    }

    /// Largest symbol appearing anywhere in the sequence.
    pub fn max_symbol(&self) -> Symbol {
        self.left
            .iter()
            .chain(&self.core)
            .chain(&self.right)
            .copied()
            .max()
            .unwrap_or(0)
    }

    fn left_ext(&self, n: i64) -> Symbol {
        self.left[(n - self.core_start).rem_euclid(self.left.len() as i64) as usize]
    }

    fn right_ext(&self, n: i64) -> Symbol {
        self.right[(n - self.core_end()).rem_euclid(self.right.len() as i64) as usize]
    }

    fn normalized(self) -> Self {
        let left = primitive_root(&self.left);
        let right = primitive_root(&self.right);
        let raw = SymbolSequence {
            left,
            core_start: self.core_start,
            core: self.core,
            right,
        };
        let lp = raw.left.len() as i64;
        let rp = raw.right.len() as i64;
        let span = lcm(lp, rp);

        let first_off_left =
            (raw.core_start..raw.core_end() + span).find(|&n| raw.get(n) != raw.left_ext(n));
        let Some(a) = first_off_left else {
            let word: Vec<Symbol> = (0..lp).map(|n| raw.left_ext(n)).collect();
            return SymbolSequence {
                left: word.clone(),
                core_start: 0,
                core: Vec::new(),
                right: word,
            };
        };
        let last_off_right = (raw.core_start - span..raw.core_end())
            .rev()
            .find(|&n| raw.get(n) != raw.right_ext(n));
        let Some(b) = last_off_right else {
            let word: Vec<Symbol> = (0..rp).map(|n| raw.right_ext(n)).collect();
            return SymbolSequence {
                left: word.clone(),
                core_start: 0,
                core: Vec::new(),
                right: word,
            };
        };
        let new_left: Vec<Symbol> = (0..lp).map(|j| raw.left_ext(a + j)).collect();
        if a <= b {
            SymbolSequence {
                left: new_left,
                core_start: a,
                core: (a..=b).map(|n| raw.get(n)).collect(),
                right: (0..rp).map(|j| raw.right_ext(b + 1 + j)).collect(),
            }
        } else {
            SymbolSequence {
                left: new_left,
                core_start: a,
                core: Vec::new(),
                right: (0..rp).map(|j| raw.right_ext(a + j)).collect(),
            }
        }
    }

    /// `T^n x`, i.e. the sequence `k ↦ x_{k+n}`.
    pub fn shift(&self, n: i64) -> Self {
        if n == 0 {
            return self.clone();
        }
        SymbolSequence {
            left: self.left.clone(),
            core_start: self.core_start - n,
            core: self.core.clone(),
            right: self.right.clone(),
        }
        .normalized()
    }

    /// Index bound beyond which two sequences are both inside their tails
    /// for at least one common period.
    fn joint_bounds(&self, other: &Self) -> (i64, i64) {
        let lo = self.core_start.min(other.core_start)
            - lcm(self.left.len() as i64, other.left.len() as i64);
        let hi = self.core_end().max(other.core_end())
            + lcm(self.right.len() as i64, other.right.len() as i64);
        (lo, hi)
    }

    /// `N(x, y) = min{|n| : x_n != y_n}`, or `None` when `x = y`.
    pub fn agreement_radius(&self, other: &Self) -> Option<u64> {
        if self == other {
            return None;
        }
        let (lo, hi) = self.joint_bounds(other);
        let bound = hi.max(-lo).max(0);
        for r in 0..=bound {
            if self.get(r) != other.get(r) || self.get(-r) != other.get(-r) {
                return Some(r as u64);
            }
        }
        unreachable!("distinct canonical sequences must differ within the joint bounds")
    }

    /// `d(x, y) = 2^{-N(x,y)}`, and 0 when the sequences coincide.
    pub fn distance(&self, other: &Self) -> f64 {
        match self.agreement_radius(other) {
            None => 0.0,
            Some(r) => (-(r as f64)).exp2(),
        }
    }

    /// Smallest `m` with `x_n = y_n` for all `n >= m`; `None` if the futures
    /// never merge and `i64::MIN` if the sequences are equal.
    pub fn stable_index(&self, other: &Self) -> Option<i64> {
        let (lo, hi) = self.joint_bounds(other);
        let span = lcm(self.right.len() as i64, other.right.len() as i64);
        if (hi..hi + span).any(|n| self.get(n) != other.get(n)) {
            return None;
        }
        match (lo..hi).rev().find(|&n| self.get(n) != other.get(n)) {
            Some(n) => Some(n + 1),
            None => Some(i64::MIN),
        }
    }

    /// Largest `m` with `x_n = y_n` for all `n <= m`; `None` if the pasts
    /// never merge and `i64::MAX` if the sequences are equal.
    pub fn unstable_index(&self, other: &Self) -> Option<i64> {
        let (lo, hi) = self.joint_bounds(other);
        let span = lcm(self.left.len() as i64, other.left.len() as i64);
        if (lo - span..lo).any(|n| self.get(n) != other.get(n)) {
            return None;
        }
        match (lo..hi).find(|&n| self.get(n) != other.get(n)) {
            Some(n) => Some(n - 1),
            None => Some(i64::MAX),
        }
    }

    /// `self ∈ W^s_loc(x)`: coordinates agree for every `n >= 0`.
    pub fn in_local_stable_set_of(&self, x: &Self) -> bool {
        matches!(self.stable_index(x), Some(m) if m <= 0)
    }

    /// `self ∈ W^u_loc(x)`: coordinates agree for every `n <= 0`.
    pub fn in_local_unstable_set_of(&self, x: &Self) -> bool {
        matches!(self.unstable_index(x), Some(m) if m >= 0)
    }

    /// `[p, x]`: the past of `p` (indices `<= 0`) spliced onto the future of
    /// `x` (indices `>= 0`). Requires `p_0 = x_0`.
    pub fn bracket(p: &Self, x: &Self) -> Result<Self> {
        let (p0, x0) = (p.get(0), x.get(0));
        if p0 != x0 {
            return Err(Error::BracketUndefined { p0, x0 });
        }
        let start = p.core_start.min(0);
        let end = x.core_end().max(1);
        let core: Vec<Symbol> = (start..=0)
            .map(|n| p.get(n))
            .chain((1..end).map(|n| x.get(n)))
            .collect();
        let left = (0..p.left.len() as i64)
            .map(|j| p.left_ext(start + j))
            .collect();
        let right = (0..x.right.len() as i64)
            .map(|j| x.right_ext(end + j))
            .collect();
        Self::new(left, start, core, right)
    }
}

impl fmt::Display for SymbolSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.core_start.min(0);
        let hi = self.core_end().max(1);
        let lp = self.left.len() as i64;
        let rp = self.right.len() as i64;
        let left: Vec<Symbol> = (lo - lp..lo).map(|n| self.get(n)).collect();
        let past: Vec<Symbol> = (lo..0).map(|n| self.get(n)).collect();
        let future: Vec<Symbol> = (0..hi).map(|n| self.get(n)).collect();
        let right: Vec<Symbol> = (hi..hi + rp).map(|n| self.get(n)).collect();
        write!(
            f,
            "({}){}|{}({})",
            word_to_string(&left),
            word_to_string(&past),
            word_to_string(&future),
            word_to_string(&right)
        )
    }
}

impl FromStr for SymbolSequence {
    type Err = Error;

    /// Parses `(L)U|V(R)`: `L` repeats toward −∞, `U` ends at index −1,
    /// `V` starts at index 0, `R` repeats toward +∞.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse {
            line: 0,
            message: format!("sequence {s:?}: {m}"),
        };
        let s = s.trim();
        let rest = s.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
        let (left, rest) = rest.split_once(')').ok_or_else(|| bad("expected ')'"))?;
        let (past, rest) = rest.split_once('|').ok_or_else(|| bad("expected '|'"))?;
        let (future, rest) = rest.split_once('(').ok_or_else(|| bad("expected '('"))?;
        let right = rest.strip_suffix(')').ok_or_else(|| bad("expected ')'"))?;
        let left = parse_word(left).map_err(|e| bad(&e))?;
        let past = parse_word(past).map_err(|e| bad(&e))?;
        let future = parse_word(future).map_err(|e| bad(&e))?;
        let right = parse_word(right).map_err(|e| bad(&e))?;
        let start = -(past.len() as i64);
        let mut core = past;
        core.extend(future);
        SymbolSequence::new(left, start, core, right)
    }
}

impl Serialize for SymbolSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SymbolSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Renders a word as concatenated digits, or comma-separated when some
/// symbol needs more than one digit. A one-letter word of that kind gets a
/// trailing comma so it does not read back as several digits.
pub fn word_to_string(w: &[Symbol]) -> String {
    if w.iter().all(|&s| s < 10) {
        w.iter().map(|s| char::from(b'0' + *s as u8)).collect()
    } else if w.len() == 1 {
        format!("{},", w[0])
    } else {
        w.iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Inverse of [`word_to_string`].
pub fn parse_word(s: &str) -> std::result::Result<Vec<Symbol>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains(',') {
        s.strip_suffix(',')
            .unwrap_or(s)
            .split(',')
            .map(|t| t.trim().parse::<Symbol>().map_err(|e| format!("{t:?}: {e}")))
            .collect()
    } else {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as Symbol)
                    .ok_or_else(|| format!("invalid symbol {c:?}"))
            })
            .collect()
    }
}

/// A periodic orbit, represented by the lexicographically least rotation
/// of its primitive cyclic word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodicOrbit {
    word: Vec<Symbol>,
}

impl PeriodicOrbit {
    /// Canonicalizes `word` (primitive root, least rotation) after checking
    /// cyclic admissibility.
    pub fn new(word: &[Symbol], q: &TransitionMatrix) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        if !q.admits_cycle(word) {
            let i = (0..word.len())
                .find(|&i| word[i] >= q.size() || !q.allows(word[i], word[(i + 1) % word.len()]))
                .unwrap_or(0);
            return Err(Error::NotAdmissible {
                from: word[i],
                to: word[(i + 1) % word.len()],
                index: i as i64,
            });
        }
        let root = primitive_root(word);
        Ok(PeriodicOrbit {
            word: least_rotation(&root),
        })
    }

    pub fn word(&self) -> &[Symbol] {
        &self.word
    }

    pub fn period(&self) -> usize {
        self.word.len()
    }

    pub fn base_point(&self) -> SymbolSequence {
        SymbolSequence::periodic(&self.word).unwrap()
    }

    /// `T^k p` for `k = 0 .. per-1`.
    pub fn points(&self) -> Vec<SymbolSequence> {
        let base = self.base_point();
        (0..self.period() as i64).map(|k| base.shift(k)).collect()
    }
}

impl fmt::Display for PeriodicOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})^inf", word_to_string(&self.word))
    }
}

impl Serialize for PeriodicOrbit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&word_to_string(&self.word))
    }
}

/// All periodic orbits of least period `<= max_period`, each listed once,
/// ordered by period and then lexicographically.
pub fn enumerate_periodic(
    q: &TransitionMatrix,
    max_period: usize,
    cap: usize,
) -> Result<Vec<PeriodicOrbit>> {
    let mut out = Vec::new();
    for n in 1..=max_period {
        let mut a = vec![0; n + 1];
        lyndon_words(q, n, 1, 1, &mut a, &mut out, cap)?;
    }
    Ok(out)
}

// Fredricksen–Kessler–Maiorana generation of Lyndon words, pruned by
// admissibility of every prefix; `a` is 1-indexed with a[0] = 0.
fn lyndon_words(
    q: &TransitionMatrix,
    n: usize,
    t: usize,
    p: usize,
    a: &mut Vec<Symbol>,
    out: &mut Vec<PeriodicOrbit>,
    cap: usize,
) -> Result<()> {
    if t > n {
        if p == n && q.allows(a[n], a[1]) {
            if out.len() >= cap {
                return Err(Error::BudgetExceeded(cap));
            }
            out.push(PeriodicOrbit {
                word: a[1..=n].to_vec(),
            });
        }
        return Ok(());
    }
    let base = a[t - p];
    for j in base..q.size() {
        if t > 1 && !q.allows(a[t - 1], j) {
            continue;
        }
        a[t] = j;
        let next_p = if j == base { p } else { t };
        lyndon_words(q, n, t + 1, next_p, a, out, cap)?;
    }
    Ok(())
}

/// Shortest word whose cyclic repetition gives `w`.
pub fn primitive_root(w: &[Symbol]) -> Vec<Symbol> {
    let n = w.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && (0..n).all(|i| w[i] == w[(i + d) % n]) {
            return w[..d].to_vec();
        }
    }
    w.to_vec()
}

/// Lexicographically least rotation of `w`.
pub fn least_rotation(w: &[Symbol]) -> Vec<Symbol> {
    let n = w.len();
    (0..n)
        .map(|r| w[r..].iter().chain(&w[..r]).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}
