//! Finite pattern algebra modulo `k`.
//!
//! A *pattern* is a tuple of residues mod `k` (possibly empty). Each entry
//! `a` acts on a pair of consecutive continuant residues by the transfer map
//! `T_a(u, v) = (v, (a·v + u) mod k)`, so a whole tuple acts by the product
//! of the matrices `[[0,1],[1,a]]` over ℤ/k. The *character* of a tuple is
//! the image of the seed state `(1, 0)`.
//!
//! A tuple is *null* when its map is the identity on the reachable state set
//! `R_k = {(u,v) : gcd(u,v,k) = 1}`, *elementary* when it is null with no
//! proper null contiguous block, and *prime* when it contains no null
//! contiguous block at all. Both pattern families are finite for every `k`
//! and are enumerated here exhaustively with certified completeness.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::{Error, Result};

/// 2×2 matrix over ℤ/k, acting on row-vector states by right multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Mat2([[u64; 2]; 2]);

const IDENTITY: Mat2 = Mat2([[1, 0], [0, 1]]);

impl Mat2 {
    fn letter(a: u64, k: u64) -> Mat2 {
        Mat2([[0, 1], [1, a % k]])
    }

    fn mul(&self, rhs: &Mat2, k: u64) -> Mat2 {
        let m = &self.0;
        let n = &rhs.0;
        let p = |i: usize, j: usize| -> u64 {
            ((m[i][0] as u128 * n[0][j] as u128 + m[i][1] as u128 * n[1][j] as u128)
                % k as u128) as u64
        };
        Mat2([[p(0, 0), p(0, 1)], [p(1, 0), p(1, 1)]])
    }

    fn apply(&self, u: u64, v: u64, k: u64) -> (u64, u64) {
        let m = &self.0;
        (
            ((u as u128 * m[0][0] as u128 + v as u128 * m[1][0] as u128) % k as u128) as u64,
            ((u as u128 * m[0][1] as u128 + v as u128 * m[1][1] as u128) % k as u128) as u64,
        )
    }

    /// Character of the word this matrix evaluates: the image of (1, 0),
    /// which is the matrix's first row.
    fn char_state(&self) -> CharState {
        CharState {
            u: self.0[0][0],
            v: self.0[0][1],
        }
    }
}

fn validate_k(k: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::invalid("modulus k must be at least 2"));
    }
    Ok(())
}

/// Pair of consecutive continuant residues `(u, v)` mod `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CharState {
    pub u: u64,
    pub v: u64,
}

/// The map a tuple induces on state pairs mod `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferMap {
    k: u64,
    mat: Mat2,
}

impl TransferMap {
    pub fn modulus(&self) -> u64 {
        self.k
    }

    pub fn apply(&self, state: (u64, u64)) -> (u64, u64) {
        self.mat.apply(state.0 % self.k, state.1 % self.k, self.k)
    }

    pub fn compose(&self, then: &TransferMap) -> Result<TransferMap> {
        if self.k != then.k {
            return Err(Error::invalid("cannot compose maps over different moduli"));
        }
        Ok(TransferMap {
            k: self.k,
            mat: self.mat.mul(&then.mat, self.k),
        })
    }

    /// Identity on the reachable set `R_k`. For the matrix action this is
    /// exactly matrix identity: an element fixing `(1,0)` and `(0,1)` fixes
    /// everything (the verification suites re-check this equivalence by
    /// brute force on all states).
    pub fn is_identity(&self) -> bool {
        self.mat == IDENTITY
    }
}

/// Single-letter transfer map `T_a`.
pub fn transfer_map(a: u64, k: u64) -> Result<TransferMap> {
    validate_k(k)?;
    Ok(TransferMap {
        k,
        mat: Mat2::letter(a, k),
    })
}

/// The map of a whole tuple: letters act left to right.
pub fn word_map(tuple: &[u64], k: u64) -> Result<TransferMap> {
    validate_k(k)?;
    let mut mat = IDENTITY;
    for &a in tuple {
        mat = mat.mul(&Mat2::letter(a, k), k);
    }
    Ok(TransferMap { k, mat })
}

/// Character of a tuple: the state reached from `(1, 0)`.
///
/// Computed twice — once through the matrix word action and once through the
/// plain continuant recursion `q_n = a_n q_{n-1} + q_{n-2}` mod `k` — and
/// cross-checked.
pub fn character(tuple: &[u64], k: u64) -> Result<CharState> {
    validate_k(k)?;
    let via_map = word_map(tuple, k)?.mat.char_state();
    let mut prev: u64 = 1;
    let mut last: u64 = 0;
    for &a in tuple {
        let next = (((a % k) as u128 * last as u128 + prev as u128) % k as u128) as u64;
        prev = std::mem::replace(&mut last, next);
    }
    let via_recursion = CharState { u: prev, v: last };
    if via_map != via_recursion {
        return Err(Error::internal(format!(
            "character mismatch: word action {via_map:?} vs continuant recursion {via_recursion:?}"
        )));
    }
    Ok(via_map)
}

/// Index of a `k = 2` character state in the 3-element reachable set,
/// ordered so that `T_1` becomes `x ↦ x + 1` and `T_0` becomes
/// `x ↦ 2x (mod 3)`: `(1,1) ↦ 0`, `(1,0) ↦ 1`, `(0,1) ↦ 2`.
pub fn char_index_mod2(state: &CharState) -> Result<u8> {
    match (state.u, state.v) {
        (1, 1) => Ok(0),
        (1, 0) => Ok(1),
        (0, 1) => Ok(2),
        _ => Err(Error::invalid(format!(
            "state ({}, {}) is not reachable for modulus 2",
            state.u, state.v
        ))),
    }
}

/// Prefix evaluations of a tuple: `evals[i]` is the map of the first `i`
/// letters, so `evals[0]` is the identity and a block `tuple[s..=e]` is null
/// exactly when `evals[s] == evals[e+1]`.
fn prefix_evals(tuple: &[u64], k: u64) -> Vec<Mat2> {
    let mut evals = Vec::with_capacity(tuple.len() + 1);
    let mut g = IDENTITY;
    evals.push(g);
    for &a in tuple {
        g = g.mul(&Mat2::letter(a, k), k);
        evals.push(g);
    }
    evals
}

/// True iff the tuple's map is the identity (insertion anywhere changes no
/// character).
pub fn is_null(tuple: &[u64], k: u64) -> Result<bool> {
    validate_k(k)?;
    if tuple.is_empty() {
        return Err(Error::invalid("nullity is defined for nonempty tuples"));
    }
    Ok(word_map(tuple, k)?.is_identity())
}

/// True iff the tuple is null and no proper nonempty contiguous block is
/// null.
pub fn is_elementary(tuple: &[u64], k: u64) -> Result<bool> {
    validate_k(k)?;
    if tuple.is_empty() {
        return Err(Error::invalid("elementarity is defined for nonempty tuples"));
    }
    let evals = prefix_evals(tuple, k);
    let last = *evals.last().expect("nonempty");
    if last != IDENTITY {
        return Ok(false);
    }
    // The only allowed coincidence is evals[0] == evals[len]; interior
    // evaluations must be distinct from each other and from the identity.
    let mut seen = HashSet::new();
    seen.insert(IDENTITY);
    for g in &evals[1..evals.len() - 1] {
        if !seen.insert(*g) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff no nonempty contiguous block is null, i.e. all prefix
/// evaluations are pairwise distinct.
pub fn is_prime(tuple: &[u64], k: u64) -> Result<bool> {
    validate_k(k)?;
    let evals = prefix_evals(tuple, k);
    let mut seen = HashSet::new();
    Ok(evals.into_iter().all(|g| seen.insert(g)))
}

/// True iff the character's second coordinate is 0 (the final continuant is
/// divisible by `k`).
pub fn is_type_k(tuple: &[u64], k: u64) -> Result<bool> {
    Ok(character(tuple, k)?.v == 0)
}

/// Resource limits for the exhaustive enumerations. Exceeding a limit is an
/// error — results are never silently truncated.
#[derive(Debug, Clone, Copy)]
pub struct EnumBudget {
    /// Cap on visited search nodes across the whole enumeration.
    pub max_nodes: u64,
    /// Cap on the order of the generated matrix group.
    pub max_group: u64,
}

impl Default for EnumBudget {
    /// The default caps admit every modulus whose pattern families are small
    /// enough to materialize at all. In practice that means `k = 2` (7
    /// elementary, 16 prime): already for `k = 3` the letter group has order
    /// 48 and the prime family, while finite, has on the order of 10¹¹
    /// members — no budget makes that listable, and the enumeration reports
    /// a resource error instead of a truncated table.
    fn default() -> Self {
        EnumBudget {
            max_nodes: 10_000_000,
            max_group: 1_000_000,
        }
    }
}

/// Order of the group generated by the single-letter maps mod `k`.
pub fn group_order(k: u64, budget: &EnumBudget) -> Result<u64> {
    validate_k(k)?;
    let letters: Vec<Mat2> = (0..k).map(|a| Mat2::letter(a, k)).collect();
    let mut seen = HashSet::new();
    seen.insert(IDENTITY);
    let mut frontier = vec![IDENTITY];
    while let Some(g) = frontier.pop() {
        for l in &letters {
            let next = g.mul(l, k);
            if seen.insert(next) {
                if seen.len() as u64 > budget.max_group {
                    return Err(Error::budget(format!(
                        "group order for k = {k} exceeds the configured cap {}",
                        budget.max_group
                    )));
                }
                frontier.push(next);
            }
        }
    }
    Ok(seen.len() as u64)
}

/// Which family a `PatternSet` holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    Elementary,
    Prime,
    TypeKPrime,
}

/// A complete enumerated family of patterns for one modulus, sorted by
/// (length, lexicographic). Serializes to the documented JSON shape.
#[derive(Debug, Clone, Serialize)]
pub struct PatternSet {
    pub k: u64,
    pub kind: PatternKind,
    pub patterns: Vec<Vec<u64>>,
    pub group_order: u64,
}

struct Enumerator {
    k: u64,
    letters: Vec<Mat2>,
    budget: EnumBudget,
    nodes: u64,
    on_path: HashSet<Mat2>,
    word: Vec<u64>,
    elementary: Vec<Vec<u64>>,
    prime: Vec<Vec<u64>>,
    want_elementary: bool,
    want_prime: bool,
}

impl Enumerator {
    /// Depth-first search over words whose prefix evaluations are pairwise
    /// distinct. Every node is a prime word; an edge closing back to the
    /// identity completes an elementary word (and cannot be extended —
    /// distinctness would fail); an edge to any other visited state is
    /// pruned because the null block it creates persists in every
    /// extension.
    fn dfs(&mut self, g: Mat2) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes {
            return Err(Error::budget(format!(
                "pattern enumeration for k = {} exceeded {} search nodes",
                self.k, self.budget.max_nodes
            )));
        }
        if self.want_prime {
            self.prime.push(self.word.clone());
        }
        for a in 0..self.k {
            let next = g.mul(&self.letters[a as usize], self.k);
            if next == IDENTITY {
                if self.want_elementary {
                    self.word.push(a);
                    self.elementary.push(self.word.clone());
                    self.word.pop();
                }
            } else if !self.on_path.contains(&next) {
                self.on_path.insert(next);
                self.word.push(a);
                self.dfs(next)?;
                self.word.pop();
                self.on_path.remove(&next);
            }
        }
        Ok(())
    }
}

fn enumerate(
    k: u64,
    budget: &EnumBudget,
    want_elementary: bool,
    want_prime: bool,
) -> Result<(Vec<Vec<u64>>, Vec<Vec<u64>>, u64)> {
    validate_k(k)?;
    let order = group_order(k, budget)?;
    let mut e = Enumerator {
        k,
        letters: (0..k).map(|a| Mat2::letter(a, k)).collect(),
        budget: *budget,
        nodes: 0,
        on_path: HashSet::from([IDENTITY]),
        word: Vec::new(),
        elementary: Vec::new(),
        prime: Vec::new(),
        want_elementary,
        want_prime,
    };
    e.dfs(IDENTITY)?;
    let sort = |mut v: Vec<Vec<u64>>| {
        v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        v
    };
    Ok((sort(e.elementary), sort(e.prime), order))
}

/// All elementary patterns for modulus `k`.
pub fn enumerate_elementary(k: u64, budget: &EnumBudget) -> Result<PatternSet> {
    let (elementary, _, order) = enumerate(k, budget, true, false)?;
    Ok(PatternSet {
        k,
        kind: PatternKind::Elementary,
        patterns: elementary,
        group_order: order,
    })
}

/// All prime patterns for modulus `k` (the empty pattern included).
pub fn enumerate_prime(k: u64, budget: &EnumBudget) -> Result<PatternSet> {
    let (_, prime, order) = enumerate(k, budget, false, true)?;
    Ok(PatternSet {
        k,
        kind: PatternKind::Prime,
        patterns: prime,
        group_order: order,
    })
}

/// The prime patterns of type `k` (character second coordinate 0).
pub fn type_k_primes(k: u64, budget: &EnumBudget) -> Result<PatternSet> {
    let all = enumerate_prime(k, budget)?;
    let mut patterns = Vec::new();
    for p in all.patterns {
        if is_type_k(&p, k)? {
            patterns.push(p);
        }
    }
    Ok(PatternSet {
        k,
        kind: PatternKind::TypeKPrime,
        patterns,
        group_order: all.group_order,
    })
}

/// Minimal `n ≥ 1` such that the `n`-fold repetition `(l, l, …, l)` is
/// elementary; equals the order of `T_{l mod k}` in the letter group.
pub fn elementary_run_length(l: u64, k: u64) -> Result<u64> {
    validate_k(k)?;
    let m = Mat2::letter(l, k);
    let mut acc = m;
    let mut n: u64 = 1;
    while acc != IDENTITY {
        acc = acc.mul(&m, k);
        n += 1;
        if n > 4 * k * k * k + 4 {
            return Err(Error::internal(
                "letter order exceeded the group-order bound",
            ));
        }
    }
    Ok(n)
}

/// One recorded insertion: the block occupies indices `position + 1 ..`
/// after insertion (so `position = -1` prepends).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Insertion {
    pub position: i64,
    pub block: Vec<u64>,
}

/// A prime core plus the elementary blocks removed to reach it. Replaying
/// the insertions in order onto the core reproduces the (reduced) input.
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub k: u64,
    pub input: Vec<u64>,
    pub core: Vec<u64>,
    pub insertions: Vec<Insertion>,
}

impl Decomposition {
    pub fn replay(&self) -> Vec<u64> {
        let mut word = self.core.clone();
        for ins in &self.insertions {
            let at = (ins.position + 1) as usize;
            word.splice(at..at, ins.block.iter().copied());
        }
        word
    }
}

/// Decomposes a tuple into a prime core and elementary insertions by
/// repeatedly removing the shortest null contiguous block (leftmost on
/// ties). A globally shortest null block can contain no proper null block,
/// hence is elementary.
pub fn prime_decompose(tuple: &[u64], k: u64) -> Result<Decomposition> {
    validate_k(k)?;
    let input: Vec<u64> = tuple.iter().map(|&a| a % k).collect();
    let mut word = input.clone();
    let mut removals: Vec<Insertion> = Vec::new();
    loop {
        let evals = prefix_evals(&word, k);
        // Shortest null block = minimal gap between equal prefix
        // evaluations; consecutive occurrences of the same state realize it.
        let mut last_pos: HashMap<Mat2, usize> = HashMap::new();
        let mut best: Option<(usize, usize)> = None; // (length, start)
        for (i, g) in evals.iter().enumerate() {
            if let Some(&prev) = last_pos.get(g) {
                let cand = (i - prev, prev);
                if best.map_or(true, |b| cand < b) {
                    best = Some(cand);
                }
            }
            last_pos.insert(*g, i);
        }
        let Some((len, start)) = best else {
            break;
        };
        let block: Vec<u64> = word.splice(start..start + len, std::iter::empty()).collect();
        removals.push(Insertion {
            position: start as i64 - 1,
            block,
        });
    }
    let insertions: Vec<Insertion> = removals.into_iter().rev().collect();
    let result = Decomposition {
        k,
        input: input.clone(),
        core: word,
        insertions,
    };
    // Self-checks: cheap relative to use, and each failure would be a bug.
    if result.replay() != input {
        return Err(Error::internal("decomposition replay does not reproduce the input"));
    }
    if !is_prime(&result.core, k)? {
        return Err(Error::internal("decomposition core is not prime"));
    }
    for ins in &result.insertions {
        if !is_elementary(&ins.block, k)? {
            return Err(Error::internal("decomposition removed a non-elementary block"));
        }
    }
    if character(&result.core, k)? != character(&input, k)? {
        return Err(Error::internal("decomposition changed the character"));
    }
    Ok(result)
}
