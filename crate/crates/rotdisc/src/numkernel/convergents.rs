//! Convergent tables `p_n/q_n` with the standard seed rows at n = -2, -1.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::cf::CfExpansion;
use super::Ratio;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentRow {
    pub n: i64,
    pub p: BigInt,
    pub q: BigInt,
}

/// Rows `n = -2, -1, 0, ..., max_index` of the convergent recursion
/// `p_n = a_n p_{n-1} + p_{n-2}`, `q_n = a_n q_{n-1} + q_{n-2}` with seeds
/// `p_{-2} = 0, p_{-1} = 1, q_{-2} = 1, q_{-1} = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentTable {
    rows: Vec<ConvergentRow>,
}

impl ConvergentTable {
    pub fn rows(&self) -> &[ConvergentRow] {
        &self.rows
    }

    /// Row for index `n >= -2`.
    pub fn get(&self, n: i64) -> Option<&ConvergentRow> {
        usize::try_from(n + 2).ok().and_then(|i| self.rows.get(i))
    }

    pub fn max_index(&self) -> i64 {
        self.rows.len() as i64 - 3
    }

    pub fn value(&self, n: i64) -> Option<Ratio> {
        let row = self.get(n)?;
        (!row.q.is_zero()).then(|| Ratio::new(row.p.clone(), row.q.clone()))
    }

    /// Checks `p_n q_{n-1} - p_{n-1} q_n = (-1)^{n-1}` on every adjacent
    /// pair, plus coprimality of each row.
    pub fn invariants_hold(&self) -> bool {
        for w in self.rows.windows(2) {
            let (lo, hi) = (&w[0], &w[1]);
            let det = &hi.p * &lo.q - &lo.p * &hi.q;
            let expect = if hi.n.rem_euclid(2) == 0 {
                -BigInt::one()
            } else {
                BigInt::one()
            };
            if det != expect {
                return false;
            }
            if hi.p.gcd(&hi.q) > BigInt::one() {
                return false;
            }
        }
        true
    }
}

/// Builds the convergent table of `cf` up to index `max_index`.
///
/// `max_index` may be as small as -2 (seed rows only); for a finite
/// expansion it must not exceed the final term index.
pub fn convergents(cf: &CfExpansion, max_index: i64) -> Result<ConvergentTable> {
    if max_index < -2 {
        return Err(Error::invalid("convergent index must be at least -2"));
    }
    if let Some(last) = cf.last_index() {
        if max_index > last as i64 {
            return Err(Error::invalid(format!(
                "index {max_index} exceeds the final term index {last} of a finite expansion"
            )));
        }
    }
    let mut rows = vec![
        ConvergentRow {
            n: -2,
            p: BigInt::zero(),
            q: BigInt::one(),
        },
        ConvergentRow {
            n: -1,
            p: BigInt::one(),
            q: BigInt::zero(),
        },
    ];
    for n in 0..=max_index {
        let a = cf.term(n as usize).expect("bounded above");
        let len = rows.len();
        let p = a * &rows[len - 1].p + &rows[len - 2].p;
        let q = a * &rows[len - 1].q + &rows[len - 2].q;
        rows.push(ConvergentRow { n, p, q });
    }
    Ok(ConvergentTable { rows })
}
