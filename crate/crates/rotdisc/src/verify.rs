//! Bundled self-verification suites.
//!
//! Each suite sweeps a seeded family of inputs through one of the library's
//! redundant consistency checks — placement tables, level-endpoint residues,
//! the backwards identities, the two path constructions, the two
//! classification routes, and the pattern tables — and reports pass/fail
//! with the first few counterexamples. The command-line `verify` subcommand
//! and the integration tests both drive these functions, so a regression
//! shows up identically in both places.

use num_bigint::BigInt;
use num_integer::Integer;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{classify, construct_member, Parity, Verdict};
use crate::discrepancy::{
    backwards_check, dqn_residue_check, path_direct, path_recursive, running_extrema,
};
use crate::numkernel::{ratio, CfExpansion, Ratio};
use crate::orbit::{three_distance_check, Alpha};
use crate::patterns::{
    character, char_index_mod2, enumerate_elementary, enumerate_prime, is_prime,
    prime_decompose, type_k_primes, EnumBudget,
};
use crate::{Error, Result};

/// Default seed for every randomized suite; override with `--seed` for a
/// different sweep.
pub const DEFAULT_SEED: u64 = 24301;

/// All suite names, in execution order.
pub const SUITE_NAMES: [&str; 6] = [
    "patterns",
    "three-distance",
    "residues",
    "backwards",
    "oracle",
    "routes",
];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub pass: bool,
    pub cases: u64,
    /// First few failing cases, human-readable.
    pub failures: Vec<String>,
    /// Informational observations that do not affect pass/fail.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub all_pass: bool,
    pub suites: Vec<SuiteReport>,
}

const MAX_RECORDED_FAILURES: usize = 5;

struct SuiteLog {
    name: &'static str,
    cases: u64,
    failures: Vec<String>,
    notes: Vec<String>,
    dropped: u64,
}

impl SuiteLog {
    fn new(name: &'static str) -> SuiteLog {
        SuiteLog {
            name,
            cases: 0,
            failures: Vec::new(),
            notes: Vec::new(),
            dropped: 0,
        }
    }

    fn case(&mut self) {
        self.cases += 1;
    }

    fn fail(&mut self, msg: String) {
        if self.failures.len() < MAX_RECORDED_FAILURES {
            self.failures.push(msg);
        } else {
            self.dropped += 1;
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.case();
        if !ok {
            self.fail(msg());
        }
    }

    fn finish(mut self) -> SuiteReport {
        if self.dropped > 0 {
            self.notes
                .push(format!("{} further failures not recorded", self.dropped));
        }
        SuiteReport {
            name: self.name,
            pass: self.failures.is_empty(),
            cases: self.cases,
            failures: self.failures,
            notes: self.notes,
        }
    }
}

// ---------------------------------------------------------------------------
// seeded input families
// ---------------------------------------------------------------------------

/// Shape of a sampled expansion family.
#[derive(Debug, Clone, Copy)]
pub struct SampleSpec {
    /// Extra prefix terms after the mandatory zero head (0..=this many).
    pub extra_prefix_max: usize,
    /// Period length is drawn from 1..=this.
    pub period_len_max: usize,
    /// Every term is drawn from 1..=this.
    pub entry_max: i64,
    /// Resample while q_13 exceeds this, keeping level tables small.
    pub level_cap: u64,
}

impl Default for SampleSpec {
    fn default() -> SampleSpec {
        SampleSpec {
            extra_prefix_max: 2,
            period_len_max: 4,
            entry_max: 5,
            level_cap: 50_000,
        }
    }
}

/// Draws an eventually periodic expansion `[0; …]` within the caps in
/// `spec`, rejecting draws whose continuants grow past the level cap.
pub fn sample_expansion(rng: &mut ChaCha8Rng, spec: &SampleSpec) -> CfExpansion {
    for _ in 0..1000 {
        let mut prefix = vec![0i64];
        for _ in 0..rng.gen_range(0..=spec.extra_prefix_max) {
            prefix.push(rng.gen_range(1..=spec.entry_max));
        }
        let period: Vec<i64> = (0..rng.gen_range(1..=spec.period_len_max))
            .map(|_| rng.gen_range(1..=spec.entry_max))
            .collect();
        let cf = CfExpansion::from_i64(&prefix, &period).expect("sampled terms are valid");
        let alpha = Alpha::from_cf(&cf).expect("sampled expansion is infinite");
        match alpha.level_size(13) {
            Ok(q) if q <= spec.level_cap => return cf,
            _ => continue,
        }
    }
    unreachable!("the sample space contains many small expansions");
}

/// Draws a window c = h/k in lowest terms with 2 ≤ k ≤ max_k.
pub fn sample_window(rng: &mut ChaCha8Rng, max_k: i64) -> Ratio {
    loop {
        let k = rng.gen_range(2..=max_k);
        let h = rng.gen_range(1..k);
        if h.gcd(&k) == 1 {
            return ratio(h, k);
        }
    }
}

fn fixed_alphas() -> Vec<CfExpansion> {
    vec![
        CfExpansion::from_i64(&[0], &[2]).unwrap(),          // √2 − 1
        CfExpansion::from_i64(&[0], &[1]).unwrap(),          // (√5 − 1)/2
        CfExpansion::from_i64(&[0], &[1, 2]).unwrap(),       // √3 − 1
        CfExpansion::from_i64(&[0], &[1, 1, 1, 4]).unwrap(), // √7 − 2
    ]
}

// ---------------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------------

/// Pattern-table regression: the exact modulus-2 tables, the group orders
/// against the closed-form count, and seeded decomposition round trips.
fn suite_patterns(seed: u64) -> Result<SuiteReport> {
    let mut log = SuiteLog::new("patterns");
    let budget = EnumBudget::default();

    let elementary = enumerate_elementary(2, &budget)?;
    log.check(elementary.patterns.len() == 7, || {
        format!("expected 7 elementary patterns for k=2, got {}", elementary.patterns.len())
    });

    let prime = enumerate_prime(2, &budget)?;
    log.check(prime.patterns.len() == 16, || {
        format!("expected 16 prime patterns for k=2, got {}", prime.patterns.len())
    });

    // every prime pattern's character must sit at a legal index
    for p in &prime.patterns {
        let st = character(p, 2)?;
        log.check(char_index_mod2(&st).is_ok(), || {
            format!("prime pattern {p:?} has unreachable character ({}, {})", st.u, st.v)
        });
    }

    let tk = type_k_primes(2, &budget)?;
    let expected: Vec<Vec<u64>> = vec![vec![], vec![1, 0], vec![0, 1, 1], vec![1, 1, 0, 1]];
    log.check(tk.patterns == expected, || {
        format!("type-2 primes mismatch: {:?}", tk.patterns)
    });

    // group order against |SL₂(ℤ/k)|·2 (k > 2) or 6 (k = 2)
    for k in 2u64..=6 {
        let order = crate::patterns::group_order(k, &budget)?;
        let mut sl2 = k * k * k;
        let mut m = k;
        let mut p = 2;
        let mut fac = Vec::new();
        while p * p <= m {
            if m % p == 0 {
                fac.push(p);
                while m % p == 0 {
                    m /= p;
                }
            }
            p += 1;
        }
        if m > 1 {
            fac.push(m);
        }
        for p in fac {
            sl2 = sl2 / (p * p) * (p * p - 1);
        }
        let expected = if k == 2 { sl2 } else { 2 * sl2 };
        log.check(order == expected, || {
            format!("group order for k={k}: got {order}, formula gives {expected}")
        });
    }

    // seeded decomposition round trips; prime_decompose self-checks its
    // replay and core internally, so an Err is itself a failure
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7061_7474);
    for _ in 0..60 {
        let k = rng.gen_range(2..=4u64);
        let len = rng.gen_range(0..=12usize);
        let tuple: Vec<u64> = (0..len).map(|_| rng.gen_range(0..k)).collect();
        match prime_decompose(&tuple, k) {
            Ok(d) => {
                log.check(d.replay() == tuple, || {
                    format!("replay mismatch for {tuple:?} (k={k})")
                });
                log.check(is_prime(&d.core, k).unwrap_or(false), || {
                    format!("core {:?} is not prime (k={k})", d.core)
                });
            }
            Err(e) => {
                log.case();
                log.fail(format!("decompose failed for {tuple:?} (k={k}): {e}"));
            }
        }
    }

    Ok(log.finish())
}

/// Placement check: at every level, the visitor table must place orbit
/// points in the correct step-1/q_n subintervals on the correct side.
fn suite_three_distance(seed: u64) -> Result<SuiteReport> {
    let mut log = SuiteLog::new("three-distance");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3d15_7a9c);
    let mut family = fixed_alphas();
    let spec = SampleSpec::default();
    for _ in 0..8 {
        family.push(sample_expansion(&mut rng, &spec));
    }
    for cf in &family {
        let alpha = Alpha::from_cf(cf)?;
        for n in 0..=8i64 {
            match three_distance_check(&alpha, n) {
                Ok(()) => log.case(),
                Err(e) => {
                    log.case();
                    log.fail(format!("alpha {cf}, level {n}: {e}"));
                }
            }
        }
    }
    Ok(log.finish())
}

/// Level-endpoint residues: v_{q_n} must vanish when k | q_n and otherwise
/// take one of the two residue values selected by the crossing test.
fn suite_residues(seed: u64) -> Result<SuiteReport> {
    let mut log = SuiteLog::new("residues");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7265_7369);
    let mut family = fixed_alphas();
    let spec = SampleSpec::default();
    for _ in 0..8 {
        family.push(sample_expansion(&mut rng, &spec));
    }
    for cf in &family {
        let alpha = Alpha::from_cf(cf)?;
        for _ in 0..3 {
            let c = sample_window(&mut rng, 7);
            let report = dqn_residue_check(&alpha, &c, 10)?;
            log.check(report.all_ok, || {
                let bad = report.levels.iter().find(|l| !l.ok);
                format!("alpha {cf}, c {c}: first bad level {:?}", bad)
            });
        }
    }
    Ok(log.finish())
}

/// Backwards identities: the final-period identity must hold at every even
/// level with k ∤ q_n; the adjacent-period identity is observational and
/// its failure count is reported as a note.
fn suite_backwards(seed: u64) -> Result<SuiteReport> {
    let mut log = SuiteLog::new("backwards");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6261_636b);
    let mut family = fixed_alphas();
    let spec = SampleSpec::default();
    for _ in 0..6 {
        family.push(sample_expansion(&mut rng, &spec));
    }
    let mut adjacent_holds = 0u64;
    let mut adjacent_fails = 0u64;
    for cf in &family {
        let alpha = Alpha::from_cf(cf)?;
        let c = sample_window(&mut rng, 7);
        let (_, k) = crate::numkernel::window_parts(&c)?;
        for n in (0..=10i64).step_by(2) {
            let q_n = alpha.level_size(n)?;
            let q_next = alpha.level_size(n + 1)?;
            if q_n % (k as u64) == 0 || q_next > 100_000 {
                continue;
            }
            let report = backwards_check(&alpha, &c, n)?;
            log.check(report.identity_final_period.holds, || {
                format!(
                    "alpha {cf}, c {c}, level {n}: final-period identity failed at {:?}",
                    report.identity_final_period.first_counterexample
                )
            });
            if report.identity_adjacent_periods.holds {
                adjacent_holds += 1;
            } else {
                adjacent_fails += 1;
            }
        }
    }
    log.notes.push(format!(
        "adjacent-period identity as printed: held {adjacent_holds}, failed {adjacent_fails} (observational)"
    ));
    Ok(log.finish())
}

/// Oracle equivalence: the per-step walker path and the level-recursion
/// path must agree elementwise, and both must satisfy the step invariants.
fn suite_oracle(seed: u64) -> Result<SuiteReport> {
    let mut log = SuiteLog::new("oracle");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6f72_6163);
    let spec = SampleSpec::default();
    for _ in 0..12 {
        let cf = sample_expansion(&mut rng, &spec);
        let alpha = Alpha::from_cf(&cf)?;
        let c = sample_window(&mut rng, 7);
        let n = rng.gen_range(500..=1500u64);
        let direct = path_direct(&alpha, &c, n)?;
        let recursive = path_recursive(&alpha, &c, n)?;
        log.check(direct.values == recursive.values, || {
            let first = direct
                .values
                .iter()
                .zip(&recursive.values)
                .position(|(a, b)| a != b)
                .unwrap();
            format!("alpha {cf}, c {c}, N {n}: paths diverge at n = {first}")
        });
        log.check(direct.invariants_hold(), || {
            format!("alpha {cf}, c {c}: direct path violates step invariants")
        });
        log.check(running_extrema(&direct).invariants_hold(), || {
            format!("alpha {cf}, c {c}: running extrema not monotone")
        });
    }
    Ok(log.finish())
}

/// Route agreement: classification must succeed (it errors internally on
/// any route disagreement), witnesses must carry the right parity, and
/// constructed members must classify as requested.
fn suite_routes(seed: u64) -> Result<SuiteReport> {
    let mut log = SuiteLog::new("routes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x726f_7574);
    let spec = SampleSpec {
        entry_max: 6,
        ..SampleSpec::default()
    };
    for _ in 0..120 {
        let cf = sample_expansion(&mut rng, &spec);
        let k = rng.gen_range(2..=5i64);
        match classify(&cf, 1, k) {
            Ok(c) => {
                let parity_ok = match (c.verdict, c.witness_m) {
                    (Verdict::BoundedAbove, Some(m)) => m.rem_euclid(2) == 0,
                    (Verdict::BoundedBelow, Some(m)) => m.rem_euclid(2) == 1,
                    (Verdict::Unbounded, None) => true,
                    _ => false,
                };
                log.check(parity_ok && c.witness_m == c.condition2_m, || {
                    format!("alpha {cf}, k {k}: inconsistent verdict {c:?}")
                });
            }
            Err(e) => {
                log.case();
                log.fail(format!("alpha {cf}, k {k}: {e}"));
            }
        }
    }
    for _ in 0..10 {
        let k = rng.gen_range(2..=5i64);
        let len = rng.gen_range(0..=4usize);
        let mut prefix = Vec::new();
        for i in 0..len {
            let low = if i == 0 { 0 } else { 1 };
            prefix.push(BigInt::from(rng.gen_range(low..=4i64)));
        }
        let parity = if rng.gen_bool(0.5) {
            Parity::Even
        } else {
            Parity::Odd
        };
        let expected = match parity {
            Parity::Even => Verdict::BoundedAbove,
            Parity::Odd => Verdict::BoundedBelow,
        };
        match construct_member(&prefix, k, parity).and_then(|e| classify(&e, 1, k)) {
            Ok(c) => log.check(c.verdict == expected, || {
                format!("construct {prefix:?} (k={k}, {parity:?}) classified {:?}", c.verdict)
            }),
            Err(e) => {
                log.case();
                log.fail(format!("construct {prefix:?} (k={k}, {parity:?}): {e}"));
            }
        }
    }
    Ok(log.finish())
}

// ---------------------------------------------------------------------------
// entry points
// ---------------------------------------------------------------------------

/// Runs one named suite.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    match name {
        "patterns" => suite_patterns(seed),
        "three-distance" => suite_three_distance(seed),
        "residues" => suite_residues(seed),
        "backwards" => suite_backwards(seed),
        "oracle" => suite_oracle(seed),
        "routes" => suite_routes(seed),
        _ => Err(Error::invalid(format!(
            "unknown suite {name:?}; available: {}",
            SUITE_NAMES.join(", ")
        ))),
    }
}

/// Runs the given suites (or all of them for the name "all").
pub fn run(names: &[String], seed: u64) -> Result<VerifyReport> {
    let selected: Vec<&str> = if names.is_empty() || names.iter().any(|n| n == "all") {
        SUITE_NAMES.to_vec()
    } else {
        names.iter().map(|s| s.as_str()).collect()
    };
    let mut suites = Vec::new();
    for name in selected {
        suites.push(run_suite(name, seed)?);
    }
    Ok(VerifyReport {
        seed,
        all_pass: suites.iter().all(|s| s.pass),
        suites,
    })
}
