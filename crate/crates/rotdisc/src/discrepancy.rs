//! The local discrepancy path and its level structure.
//!
//! For a fixed irrational `α` and a rational window `c = h/k ∈ (0,1)`, write
//! `ξ_j = 1` when `{jα} < c` and `0` otherwise. The object of study is the
//! integer path
//!
//! ```text
//! v_n = k·D_n = k·(ξ_1 + ⋯ + ξ_n) − h·n,
//! ```
//!
//! the discrepancy `D_n = Σ ξ_j − n·c` scaled by `k` so every value is an
//! integer. Two independent constructions are provided:
//!
//! * [`path_direct`] sums the indicator step by step with exact orbit
//!   comparisons;
//! * [`path_recursive`] builds a short base segment directly and then lifts
//!   it level by level along the continued-fraction denominators `q_n`,
//!   copying whole periods and applying the one-step corrections dictated by
//!   the level analysis. Per-step indicator evaluation stops at the base
//!   level; above it, each level costs `O(log a_{n+1})` exact order queries
//!   to locate the first side-crossing among the critical-interval visitors.
//!
//! The two must agree exactly; `path_recursive` additionally cross-checks
//! the endpoint value `v_{q_n}` predicted by its case analysis against the
//! value it already computed, and fails loudly on any mismatch.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::numkernel::{window_parts, Ratio};
use crate::orbit::Alpha;
use crate::{Error, Result};

/// Largest path length materialized in memory (8 bytes per entry).
const PATH_LEN_CAP: u64 = 50_000_000;

/// A k-scaled discrepancy path `v_0..v_N` for a window `c = h/k`.
///
/// Invariants: `v_0 = 0`; every step `v_n − v_{n−1}` is `k−h` (indicator hit)
/// or `−h` (miss); consequently `v_n ≡ −h·n (mod k)`.
#[derive(Debug, Clone)]
pub struct DiscrepancyPath {
    pub c: Ratio,
    pub h: i64,
    pub k: i64,
    /// `values[n] = v_n`, for `n = 0..=N`.
    pub values: Vec<i64>,
}

impl DiscrepancyPath {
    /// Largest index `N` of the path.
    pub fn n_max(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    pub fn value(&self, n: u64) -> i64 {
        self.values[n as usize]
    }

    /// Recovers the indicator `ξ_n` from the step into index `n ≥ 1`.
    pub fn xi(&self, n: u64) -> bool {
        assert!(n >= 1 && n <= self.n_max(), "xi index out of range");
        self.values[n as usize] - self.values[n as usize - 1] == self.k - self.h
    }

    /// Checks the step and congruence invariants over the whole path.
    pub fn invariants_hold(&self) -> bool {
        if self.values.is_empty() || self.values[0] != 0 {
            return false;
        }
        for n in 1..self.values.len() {
            let step = self.values[n] - self.values[n - 1];
            if step != self.k - self.h && step != -self.h {
                return false;
            }
            let expect = (-(self.h as i128) * n as i128).rem_euclid(self.k as i128) as i64;
            if self.values[n].rem_euclid(self.k) != expect {
                return false;
            }
        }
        true
    }
}

/// Prefix maxima and minima of a path, both starting at `v_0 = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct ExtremaRow {
    pub n: u64,
    pub max: i64,
    pub min: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremaTrack {
    pub rows: Vec<ExtremaRow>,
}

impl ExtremaTrack {
    /// Max non-decreasing, min non-increasing, both starting at 0.
    pub fn invariants_hold(&self) -> bool {
        if self.rows.is_empty() || self.rows[0].max != 0 || self.rows[0].min != 0 {
            return false;
        }
        self.rows
            .windows(2)
            .all(|w| w[1].max >= w[0].max && w[1].min <= w[0].min)
    }
}

/// Running extrema of the path, one row per index including `n = 0`.
pub fn running_extrema(path: &DiscrepancyPath) -> ExtremaTrack {
    let mut rows = Vec::with_capacity(path.values.len());
    let (mut mx, mut mn) = (0i64, 0i64);
    for (n, &v) in path.values.iter().enumerate() {
        mx = mx.max(v);
        mn = mn.min(v);
        rows.push(ExtremaRow {
            n: n as u64,
            max: mx,
            min: mn,
        });
    }
    ExtremaTrack { rows }
}

/// Extrema of `v_0..v_n` (the base point 0 always participates).
pub fn extrema_at(path: &DiscrepancyPath, n: u64) -> (i64, i64) {
    let slice = &path.values[..=n as usize];
    let mx = *slice.iter().max().expect("nonempty");
    let mn = *slice.iter().min().expect("nonempty");
    (mn, mx)
}

fn check_budget(k: i64, n_steps: u64) -> Result<()> {
    if n_steps > PATH_LEN_CAP {
        return Err(Error::budget(format!(
            "path length {n_steps} exceeds the in-memory cap {PATH_LEN_CAP}"
        )));
    }
    if (k as u128) * (n_steps as u128 + 2) > (i64::MAX / 8) as u128 {
        return Err(Error::budget(
            "k·N is too large for 64-bit path values".to_string(),
        ));
    }
    Ok(())
}

/// Direct construction: one exact orbit comparison per step.
pub fn path_direct(alpha: &Alpha, c: &Ratio, n_steps: u64) -> Result<DiscrepancyPath> {
    let (h, k) = window_parts(c)?;
    check_budget(k, n_steps)?;
    let mut values = Vec::with_capacity(n_steps as usize + 1);
    values.push(0i64);
    let mut cur = 0i64;
    let mut walker = alpha.walker();
    for _ in 0..n_steps {
        let hit = walker.cmp(c) == Ordering::Less;
        cur += if hit { k - h } else { -h };
        values.push(cur);
        walker.advance();
    }
    Ok(DiscrepancyPath {
        c: c.clone(),
        h,
        k,
        values,
    })
}

/// Outcome of the level case analysis at an index `n` with `k ∤ q_n`.
struct LevelBranch {
    /// `r = (h·q_n) mod k`, nonzero here.
    r: i64,
    /// `[c·q_n] = ⌊h·q_n/k⌋`.
    floor_cq: u64,
    /// Index of the level interval containing `c`.
    critical_interval: u64,
    /// Visitor time `λ` of the critical interval, in `[1, q_n]`.
    critical_time: u64,
    /// Whether the visitor itself already sits on the far side of `c`
    /// (equivalently, the first-crossing level `l_n` is 0).
    crossed_at_zero: bool,
    /// The value `v_{q_n}` forced by the case split.
    expected_endpoint: i64,
}

/// Case analysis for level `n` when `k ∤ q_n`: locates the critical interval
/// (the one containing `c`), its unique visitor `λ` among times `1..=q_n`,
/// and the endpoint value the theory forces. For odd `n` the interval
/// numbering mirrors, which shifts the critical index by one with wraparound
/// at `q_n`; that single index map is the only parity difference.
fn level_branch(alpha: &Alpha, c: &Ratio, h: i64, k: i64, n: i64) -> Result<LevelBranch> {
    let q_n = alpha.level_size(n)?;
    let r = ((h as u128 * q_n as u128) % k as u128) as i64;
    debug_assert!(r != 0, "level_branch requires k ∤ q_n");
    let floor_cq = ((h as u128 * q_n as u128) / k as u128) as u64;
    let even = n % 2 == 0;
    let critical_interval = if even {
        floor_cq
    } else {
        (floor_cq + 1) % q_n
    };
    let critical_time = alpha.visitor_time(n, critical_interval)?;
    // At l = 0 the visitor is on the far side exactly when, for even n, the
    // point exceeds c (points march upward), or for odd n, lies below c
    // (points march downward).
    let far = if even { Ordering::Greater } else { Ordering::Less };
    let crossed_at_zero = alpha.frac_compare(critical_time, c) == far;
    let expected_endpoint = match (even, crossed_at_zero) {
        (true, true) => -r,
        (true, false) => k - r,
        (false, true) => k - r,
        (false, false) => -r,
    };
    Ok(LevelBranch {
        r,
        floor_cq,
        critical_interval,
        critical_time,
        crossed_at_zero,
        expected_endpoint,
    })
}

/// First `l ∈ [l_lo, l_hi]` whose point `{(λ + l·q_n)α}` lies on the far
/// side of `c` (above for even levels, below for odd), or `None`. The points
/// move monotonically with `l` inside the critical interval, so a binary
/// search decides with `O(log)` exact comparisons.
fn first_crossing(
    alpha: &Alpha,
    c: &Ratio,
    even: bool,
    lambda: u64,
    q_n: u64,
    l_lo: u64,
    l_hi: u64,
) -> Option<u64> {
    let far = if even { Ordering::Greater } else { Ordering::Less };
    let crossed = |l: u64| alpha.frac_compare(lambda + l * q_n, c) == far;
    if l_lo > l_hi || !crossed(l_hi) {
        return None;
    }
    let (mut lo, mut hi) = (l_lo, l_hi);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if crossed(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

/// Level-by-level construction. A base segment up to the largest `q_n ≤ √N`
/// is summed directly; every later index is produced by lifting a full
/// period of the previous level and applying the correction from the level
/// case analysis. Must agree with [`path_direct`] exactly.
pub fn path_recursive(alpha: &Alpha, c: &Ratio, n_steps: u64) -> Result<DiscrepancyPath> {
    let (h, k) = window_parts(c)?;
    check_budget(k, n_steps)?;
    let k_u = k as u64;

    let mut values = Vec::with_capacity(n_steps as usize + 1);
    values.push(0i64);

    if n_steps > 0 {
        // base level: largest n with q_n ≤ ⌊√N⌋
        let sqrt_n = BigInt::from(n_steps).sqrt();
        let mut n0: i64 = 0;
        while alpha.convergent(n0 + 1).1 <= sqrt_n {
            n0 += 1;
        }
        let base_len = alpha.level_size(n0)?.min(n_steps);
        let mut cur = 0i64;
        let mut walker = alpha.walker();
        for _ in 0..base_len {
            let hit = walker.cmp(c) == Ordering::Less;
            cur += if hit { k - h } else { -h };
            values.push(cur);
            walker.advance();
        }

        let mut n = n0;
        while (values.len() as u64) - 1 < n_steps {
            let q_n = alpha.level_size(n)?;
            if values.len() as u64 != q_n + 1 {
                return Err(Error::internal(format!(
                    "level fill out of step: have {} values entering level {n} with q = {q_n}",
                    values.len()
                )));
            }
            let q_next_big = alpha.convergent(n + 1).1;
            if q_next_big == BigInt::from(q_n) {
                // q_1 = q_0 = 1 when a_1 = 1: nothing to fill at this level
                n += 1;
                continue;
            }
            let fill_to = q_next_big.to_u64().unwrap_or(u64::MAX).min(n_steps);
            let v_qn = values[q_n as usize];

            if q_n % k_u == 0 {
                // divisible level: the path is exactly periodic
                if v_qn != 0 {
                    return Err(Error::internal(format!(
                        "level {n}: k divides q_n = {q_n} but v({q_n}) = {v_qn} ≠ 0"
                    )));
                }
                for m in (q_n + 1)..=fill_to {
                    values.push(values[(m - q_n) as usize]);
                }
            } else {
                let br = level_branch(alpha, c, h, k, n)?;
                if v_qn != br.expected_endpoint {
                    return Err(Error::internal(format!(
                        "level {n}: case analysis predicts v({q_n}) = {} but the path has {v_qn}",
                        br.expected_endpoint
                    )));
                }
                let lambda = br.critical_time;
                let even = n % 2 == 0;
                // First-crossing level within the range that matters for the
                // fill. Searching is valid only while the visitors stay in
                // the critical interval, i.e. l ≤ (q_{n+1} − λ)/q_n.
                let l_n: Option<u64> = if br.crossed_at_zero {
                    Some(0)
                } else {
                    let l_fill_max = (fill_to - 1) / q_n;
                    let l_true_max = ((&q_next_big - BigInt::from(lambda))
                        / BigInt::from(q_n))
                    .to_u64()
                    .unwrap_or(u64::MAX);
                    first_crossing(alpha, c, even, lambda, q_n, 1, l_fill_max.min(l_true_max))
                };
                let mut l: u64 = 1;
                while l * q_n + 1 <= fill_to {
                    let lift = (l as i64) * v_qn;
                    let j_hi = q_n.min(fill_to - l * q_n);
                    for j in 1..=j_hi {
                        let mut val = lift + values[j as usize];
                        // correction applies only in the l_n ≥ 1 case
                        if !br.crossed_at_zero {
                            if let Some(ln) = l_n {
                                if l >= ln {
                                    let corr = (l - ln) as i64 + (j >= lambda) as i64;
                                    val += if even { -k * corr } else { k * corr };
                                }
                            }
                        }
                        values.push(val);
                    }
                    l += 1;
                }
            }
            n += 1;
        }
    }

    Ok(DiscrepancyPath {
        c: c.clone(),
        h,
        k,
        values,
    })
}

/// The two possible single-period shapes of the path at a level `n` with
/// `k ∤ q_n`, differing by exactly one indicator step.
///
/// `hat` treats the critical interval (the one containing `c`) as inside the
/// window; `check` flips that single index. Their endpoints are forced:
/// `hat[q_n] = k − (h·q_n mod k)` and `check[q_n] = −(h·q_n mod k)`.
#[derive(Debug, Clone, Serialize)]
pub struct TemplatePair {
    pub n: i64,
    /// Index of the level interval containing `c`.
    pub critical_interval: u64,
    /// Visitor time `λ` of that interval, in `[1, q_n]`.
    pub critical_time: u64,
    /// `hat[j−1] = v̂_j` for `j = 1..=q_n`.
    pub hat: Vec<i64>,
    /// `check[j−1] = v̌_j` for `j = 1..=q_n`.
    pub check: Vec<i64>,
    /// First level `l` at which the critical visitors cross `c`
    /// (`None` when they never cross before `q_{n+1}`).
    pub l_n: Option<u64>,
}

/// Templates at an even level; the odd-level mirror stays internal.
pub fn templates(alpha: &Alpha, c: &Ratio, n: i64) -> Result<TemplatePair> {
    if n < 0 || n % 2 != 0 {
        return Err(Error::invalid(format!(
            "template level must be even and nonnegative, got {n}"
        )));
    }
    templates_core(alpha, c, n)
}

/// Shared template construction for both parities. The only parity
/// difference is the interval numbering (mirrored for odd `n`, with the
/// critical index wrapping at `q_n`), which `level_branch` encapsulates.
pub(crate) fn templates_core(alpha: &Alpha, c: &Ratio, n: i64) -> Result<TemplatePair> {
    let (h, k) = window_parts(c)?;
    let q_n = alpha.level_size(n)?;
    if q_n % k as u64 == 0 {
        return Err(Error::invalid(format!(
            "k = {k} divides q_{n} = {q_n}: the level path is periodic and has no templates"
        )));
    }
    if q_n > PATH_LEN_CAP {
        return Err(Error::budget(format!(
            "q_{n} = {q_n} exceeds the template materialization cap {PATH_LEN_CAP}"
        )));
    }
    let br = level_branch(alpha, c, h, k, n)?;
    let even = n % 2 == 0;

    // interval index of time j, advanced incrementally: i_j = (j·p_n) mod q_n
    let p_mod = alpha
        .interval_index(n, 1)
        .expect("level size already validated");
    let mut hat = Vec::with_capacity(q_n as usize);
    let mut acc = 0i64;
    let mut i_j: u64 = 0;
    for _ in 1..=q_n {
        i_j = (i_j + p_mod) % q_n;
        // inside-the-window indicator with the critical interval counted in:
        // even levels place interval i at (i/q_n, (i+1)/q_n); odd levels at
        // ((i−1)/q_n, i/q_n) with index 0 naming the top interval
        let strictly_below = if even {
            i_j < br.floor_cq
        } else {
            i_j >= 1 && i_j <= br.floor_cq
        };
        let xi_hat = strictly_below || i_j == br.critical_interval;
        acc += if xi_hat { k - h } else { -h };
        hat.push(acc);
    }
    let check: Vec<i64> = hat
        .iter()
        .enumerate()
        .map(|(idx, &x)| {
            if (idx as u64 + 1) >= br.critical_time {
                x - k
            } else {
                x
            }
        })
        .collect();
    let expected_hat_end = k - br.r;
    let expected_check_end = -br.r;
    if *hat.last().unwrap() != expected_hat_end || *check.last().unwrap() != expected_check_end {
        return Err(Error::internal(format!(
            "template endpoints at level {n} do not match the forced residues: \
             hat end {} (want {expected_hat_end}), check end {} (want {expected_check_end})",
            hat.last().unwrap(),
            check.last().unwrap()
        )));
    }

    let q_next = alpha.level_size(n + 1)?;
    let l_max = (q_next - br.critical_time) / q_n;
    let l_n = first_crossing(alpha, c, even, br.critical_time, q_n, 0, l_max);

    Ok(TemplatePair {
        n,
        critical_interval: br.critical_interval,
        critical_time: br.critical_time,
        hat,
        check,
        l_n,
    })
}

/// One evaluated case of a backwards identity.
#[derive(Debug, Clone, Serialize)]
pub struct BackwardsCounterexample {
    /// Period index for the adjacent-period identity; absent for the final-period one.
    pub l: Option<u64>,
    pub j: u64,
    pub lhs: i64,
    pub rhs: i64,
}

/// Pass/fail record for one identity, with the first failing case if any.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub holds: bool,
    pub cases: u64,
    pub first_counterexample: Option<BackwardsCounterexample>,
}

/// Outcome of [`backwards_check`] at one even level.
#[derive(Debug, Clone, Serialize)]
pub struct BackwardsReport {
    pub n: i64,
    pub critical_time: u64,
    pub l_n: Option<u64>,
    /// Identity comparing the final period before `q_{n+1}` against the
    /// initial segment of length `q_{n−1}`.
    pub identity_final_period: IdentityReport,
    /// Identity comparing each pair of adjacent periods of length `q_n`.
    pub identity_adjacent_periods: IdentityReport,
}

/// Evaluates the two backwards comparison identities at an even level `n`
/// with `k ∤ q_n`, against directly computed path values. Both identities
/// are scored exactly as stated, with the shared right-hand side
/// `k·1{1 ≤ l_n < ∞ and j < λ ≤ q_{n−1}}`; the report records pass/fail and
/// the first counterexample, and no correction is applied silently.
pub fn backwards_check(alpha: &Alpha, c: &Ratio, n: i64) -> Result<BackwardsReport> {
    if n < 0 || n % 2 != 0 {
        return Err(Error::invalid(format!(
            "backwards check level must be even and nonnegative, got {n}"
        )));
    }
    let (h, k) = window_parts(c)?;
    let q_n = alpha.level_size(n)?;
    if q_n % k as u64 == 0 {
        return Err(Error::invalid(format!(
            "k = {k} divides q_{n} = {q_n}: the backwards identities require k ∤ q_n"
        )));
    }
    let q_next = alpha.level_size(n + 1)?;
    let q_prev = alpha.level_size(n - 1)?;
    let a_next = (q_next - q_prev) / q_n;

    let path = path_direct(alpha, c, q_next)?;
    let v = |idx: u64| path.values[idx as usize];

    let br = level_branch(alpha, c, h, k, n)?;
    let lambda = br.critical_time;
    let l_n = if br.crossed_at_zero {
        Some(0)
    } else {
        let l_max = (q_next - lambda) / q_n;
        first_crossing(alpha, c, true, lambda, q_n, 1, l_max)
    };
    let guard_level = matches!(l_n, Some(l) if l >= 1) && lambda <= q_prev;
    let rhs_at = |j: u64| if guard_level && j < lambda { k } else { 0 };

    // (1) final period against the initial q_{n−1}-segment
    let mut identity_final = IdentityReport {
        holds: true,
        cases: 0,
        first_counterexample: None,
    };
    for j in 0..=q_prev {
        identity_final.cases += 1;
        let lhs = (v(a_next * q_n + j) - v(q_next)) - (v(j) - v(q_prev));
        let rhs = rhs_at(j);
        if lhs != rhs && identity_final.holds {
            identity_final.holds = false;
            identity_final.first_counterexample = Some(BackwardsCounterexample {
                l: None,
                j,
                lhs,
                rhs,
            });
        }
    }

    // (2) adjacent periods, all l ∈ [1, a_{n+1}]
    let mut identity_adjacent = IdentityReport {
        holds: true,
        cases: 0,
        first_counterexample: None,
    };
    for l in 1..=a_next {
        for j in 0..=q_n {
            identity_adjacent.cases += 1;
            let lhs = (v((l - 1) * q_n + j) - v(l * q_n)) - (v(j) - v(q_n));
            let rhs = rhs_at(j);
            if lhs != rhs && identity_adjacent.holds {
                identity_adjacent.holds = false;
                identity_adjacent.first_counterexample = Some(BackwardsCounterexample {
                    l: Some(l),
                    j,
                    lhs,
                    rhs,
                });
            }
        }
    }

    Ok(BackwardsReport {
        n,
        critical_time: lambda,
        l_n,
        identity_final_period: identity_final,
        identity_adjacent_periods: identity_adjacent,
    })
}

/// Endpoint record for one level of [`dqn_residue_check`].
#[derive(Debug, Clone, Serialize)]
pub struct ResidueLevel {
    pub n: i64,
    pub q_n: u64,
    pub divisible: bool,
    pub value: i64,
    pub expected: i64,
    pub ok: bool,
}

/// Outcome of [`dqn_residue_check`].
#[derive(Debug, Clone, Serialize)]
pub struct ResidueReport {
    pub all_ok: bool,
    pub levels: Vec<ResidueLevel>,
}

/// Verifies the forced endpoint values `v_{q_n}` for every level `n ≤ n_max`:
/// zero when `k | q_n`; otherwise `−(h·q_n mod k)` or `k − (h·q_n mod k)`
/// with the sign decided by whether the critical visitor has already crossed
/// `c` at level 0 (mirrored between parities).
pub fn dqn_residue_check(alpha: &Alpha, c: &Ratio, n_max: i64) -> Result<ResidueReport> {
    if n_max < 0 {
        return Err(Error::invalid("n_max must be nonnegative"));
    }
    let (h, k) = window_parts(c)?;
    let q_top = alpha.level_size(n_max)?;
    let path = path_direct(alpha, c, q_top)?;

    let mut levels = Vec::new();
    let mut all_ok = true;
    for n in 0..=n_max {
        let q_n = alpha.level_size(n)?;
        let divisible = q_n % k as u64 == 0;
        let expected = if divisible {
            0
        } else {
            level_branch(alpha, c, h, k, n)?.expected_endpoint
        };
        let value = path.values[q_n as usize];
        let ok = value == expected && value.unsigned_abs() < k as u64 + 1;
        all_ok &= ok;
        levels.push(ResidueLevel {
            n,
            q_n,
            divisible,
            value,
            expected,
            ok,
        });
    }
    Ok(ResidueReport { all_ok, levels })
}

/// Emits the path as CSV: header `n,xi_n,kDn,runmax,runmin`, one row per
/// index `n = 1..=N`, integers only. Running extrema include the base point
/// `v_0 = 0`.
pub fn write_csv<W: std::io::Write>(path: &DiscrepancyPath, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "n,xi_n,kDn,runmax,runmin")?;
    let (mut mx, mut mn) = (0i64, 0i64);
    for n in 1..=path.n_max() {
        let v = path.values[n as usize];
        mx = mx.max(v);
        mn = mn.min(v);
        writeln!(out, "{},{},{},{},{}", n, path.xi(n) as u8, v, mx, mn)?;
    }
    Ok(())
}

/// CSV emission into a string; see [`write_csv`].
pub fn csv_string(path: &DiscrepancyPath) -> String {
    let mut buf = Vec::new();
    write_csv(path, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}
