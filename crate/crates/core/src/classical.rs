//! Communication matrices of two-party predicates, exact rank and Hamming
//! distance.
//!
//! Rows and columns are indexed by [`OracleTable::code`], so for `n = 1`
//! the order is `00, 01, 10, 11` with entry 0 of the table on the left.

use std::fmt;
use std::io::Write;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::OracleTable;

/// Largest arity built without an explicit override.
pub const DEFAULT_MATRIX_ARITY: usize = 3;
/// Hard upper bound even with the override (side `2^16`).
pub const MAX_MATRIX_ARITY: usize = 4;

/// `|{x : g(x) != h(x)}|`.
pub fn hamming_distance(g: &OracleTable, h: &OracleTable) -> Result<usize> {
    if g.n() != h.n() {
        return Err(Error::ArityMismatch {
            expected: g.n(),
            actual: h.n(),
        });
    }
    Ok(g.bits().iter().zip(h.bits()).filter(|(a, b)| a != b).count())
}

/// Two-party predicates on pairs of truth tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommPredicate {
    /// 1 iff the tables share a one.
    Disj,
    /// 1 iff the tables are equal.
    Eq,
    /// Parity of the common ones.
    Ip,
    /// 1 iff the tables share no one; the complement of `Disj`.
    Disjointness,
}

impl CommPredicate {
    pub fn eval(self, g: &OracleTable, h: &OracleTable) -> Result<bool> {
        if g.n() != h.n() {
            return Err(Error::ArityMismatch {
                expected: g.n(),
                actual: h.n(),
            });
        }
        let common = g.bits().iter().zip(h.bits()).filter(|(a, b)| **a && **b).count();
        Ok(match self {
            CommPredicate::Disj => common > 0,
            CommPredicate::Eq => g == h,
            CommPredicate::Ip => common % 2 == 1,
            CommPredicate::Disjointness => common == 0,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            CommPredicate::Disj => "disj",
            CommPredicate::Eq => "eq",
            CommPredicate::Ip => "ip",
            CommPredicate::Disjointness => "disjointness",
        }
    }
}

impl FromStr for CommPredicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "disj" => Ok(CommPredicate::Disj),
            "eq" => Ok(CommPredicate::Eq),
            "ip" => Ok(CommPredicate::Ip),
            "disjointness" => Ok(CommPredicate::Disjointness),
            other => Err(Error::Parse(format!("unknown predicate {other:?}"))),
        }
    }
}

impl fmt::Display for CommPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The `2^N x 2^N` 0/1 matrix of a predicate, `N = 2^n`.
#[derive(Clone, PartialEq, Eq)]
pub struct CommMatrix {
    n: usize,
    predicate: CommPredicate,
    side: usize,
    entries: Vec<bool>,
}

impl CommMatrix {
    /// Builds the matrix for `n <= 3`, or `n <= 4` with `allow_large`.
    pub fn build(predicate: CommPredicate, n: usize, allow_large: bool) -> Result<Self> {
        let limit = if allow_large { MAX_MATRIX_ARITY } else { DEFAULT_MATRIX_ARITY };
        if n > limit {
            return Err(Error::Resource {
                what: "matrix arity",
                requested: n,
                cap: limit,
                detail: format!(" (matrix side 2^{} for n = {n}; the limit is n = {limit})", 1 << n),
            });
        }
        let side = 1usize << (1 << n);
        let len = 1usize << n;
        let tables: Vec<OracleTable> = (0..side)
            .map(|c| OracleTable::from_code(n, c as u64))
            .collect::<Result<_>>()?;
        let mut entries = Vec::with_capacity(side * side);
        for g in &tables {
            for h in &tables {
                entries.push(predicate.eval(g, h)?);
            }
        }
        debug_assert_eq!(tables.len(), 1 << len);
        Ok(CommMatrix {
            n,
            predicate,
            side,
            entries,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn predicate(&self) -> CommPredicate {
        self.predicate
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.entries[row * self.side + col]
    }

    pub fn row(&self, row: usize) -> &[bool] {
        &self.entries[row * self.side..(row + 1) * self.side]
    }

    pub fn transpose(&self) -> Self {
        let side = self.side;
        let entries = (0..side * side).map(|i| self.get(i % side, i / side)).collect();
        CommMatrix {
            entries,
            ..self.clone()
        }
    }

    /// One line of `0`/`1` characters per row.
    pub fn write_bits<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for r in 0..self.side {
            let line: String = self.row(r).iter().map(|b| if *b { '1' } else { '0' }).collect();
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_bit_lines(&self) -> String {
        let mut buf = Vec::new();
        self.write_bits(&mut buf).expect("writing to a vector");
        String::from_utf8(buf).expect("ascii")
    }
}

impl fmt::Debug for CommMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CommMatrix({}, n={}, side={})", self.predicate, self.n, self.side)
    }
}

/// Rank over the rationals by fraction-free (Bareiss) elimination on
/// integers. Every division is exact.
pub fn exact_rank(matrix: &CommMatrix) -> usize {
    let side = matrix.side();
    let rows = (0..side)
        .map(|r| matrix.row(r).iter().map(|b| BigInt::from(u8::from(*b))).collect())
        .collect();
    bareiss_rank(rows)
}

/// Bareiss rank of an integer matrix given as rows.
pub fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|r| !a[*r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        let (top, rest) = a.split_at_mut(rank + 1);
        let p = &top[rank];
        for row in rest.iter_mut() {
            for c in (col + 1)..cols {
                let v = (&p[col] * &row[c] - &row[col] * &p[c]) / &prev;
                row[c] = v;
            }
            row[col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let d: BigInt = denom.into();
        if d.is_zero() {
            return Err(Error::invalid("denominator", "must be nonzero"));
        }
        Ok(ExactRational(BigRational::new(numer.into(), d)))
    }

    pub fn from_int(v: i64) -> Self {
        ExactRational(BigRational::from_integer(v.into()))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Always positive.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.abs())
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! rational_op {
    ($tr:ident, $m:ident) => {
        impl $tr for &ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &ExactRational) -> ExactRational {
                ExactRational((&self.0).$m(&rhs.0))
            }
        }
    };
}

rational_op!(Add, add);
rational_op!(Sub, sub);
rational_op!(Mul, mul);
rational_op!(Div, div);

/// Rank by ordinary Gaussian elimination over [`ExactRational`].
pub fn rational_rank(mut a: Vec<Vec<ExactRational>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|r| !a[*r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        let pivot_row = a[rank].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot_row[col];
            for (v, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *v = &*v - &(&factor * p);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}
