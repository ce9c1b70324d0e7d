//! Binary matrices with the "lone one" covering property.
//!
//! A matrix has event E for `t` when for every increasing `t`-tuple of
//! columns and every position in that tuple, some row has a 1 at that
//! position's column and 0 at the other `t - 1` columns.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::skfree::coloring::binomial;

/// Serializes as a list of row strings over `'0'`/`'1'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Vec<String>", try_from = "Vec<String>")]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl BinaryMatrix {
    pub fn new(rows: usize, cols: usize, bits: Vec<bool>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Argument("matrix dimensions must be positive".into()));
        }
        if bits.len() != rows * cols {
            return Err(Error::Argument(format!(
                "{} entries for a {rows}x{cols} matrix",
                bits.len()
            )));
        }
        Ok(BinaryMatrix { rows, cols, bits })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![false; rows * cols])
    }

    /// `cols x cols` identity followed by `rows - cols` zero rows.
    pub fn padded_identity(rows: usize, cols: usize) -> Result<Self> {
        let mut m = Self::zeros(rows, cols)?;
        for j in 0..cols.min(rows) {
            m.bits[j * cols + j] = true;
        }
        Ok(m)
    }

    /// Fair-coin entries, row-major.
    pub fn random<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Result<Self> {
        let bits = (0..rows * cols).map(|_| rng.gen::<bool>()).collect();
        Self::new(rows, cols, bits)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.bits[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[bool]> {
        self.bits.chunks(self.cols)
    }
}

impl From<BinaryMatrix> for Vec<String> {
    fn from(m: BinaryMatrix) -> Self {
        m.iter_rows()
            .map(|row| row.iter().map(|&b| if b { '1' } else { '0' }).collect())
            .collect()
    }
}

impl TryFrom<Vec<String>> for BinaryMatrix {
    type Error = Error;

    fn try_from(rows: Vec<String>) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut bits = Vec::with_capacity(rows.len() * cols);
        for row in &rows {
            if row.len() != cols {
                return Err(Error::Argument("ragged matrix rows".into()));
            }
            for ch in row.chars() {
                match ch {
                    '0' => bits.push(false),
                    '1' => bits.push(true),
                    other => return Err(Error::Argument(format!("matrix entry `{other}`"))),
                }
            }
        }
        BinaryMatrix::new(rows.len(), cols, bits)
    }
}

/// Checks event E for tuples of size `t` (`1 <= t <= cols`).
pub fn event_e_holds(matrix: &BinaryMatrix, t: usize) -> Result<bool> {
    let q = matrix.cols();
    if t == 0 || t > q {
        return Err(Error::Argument(format!("need 1 <= t <= q, got t = {t}, q = {q}")));
    }
    let words = q.div_ceil(64);
    let rows: Vec<Vec<u64>> = matrix
        .iter_rows()
        .map(|row| {
            let mut w = vec![0u64; words];
            for (j, _) in row.iter().enumerate().filter(|(_, &b)| b) {
                w[j / 64] |= 1 << (j % 64);
            }
            w
        })
        .collect();
    let bit = |row: &[u64], j: usize| row[j / 64] >> (j % 64) & 1 == 1;

    let mut tuple: Vec<usize> = (0..t).collect();
    loop {
        for (pos, &col) in tuple.iter().enumerate() {
            let covered = rows.iter().any(|row| {
                bit(row, col)
                    && tuple
                        .iter()
                        .enumerate()
                        .all(|(other, &c)| other == pos || !bit(row, c))
            });
            if !covered {
                return Ok(false);
            }
        }
        if !next_lex(&mut tuple, q) {
            return Ok(true);
        }
    }
}

fn next_lex(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Union bound `1 - t * C(q, t) * (1 - 2^-t)^r` on the probability that a
/// fair-coin `r x q` matrix has event E.
pub fn event_probability_bound(t: usize, q: usize, r: usize) -> f64 {
    let miss = 1.0 - 0.5f64.powi(t as i32);
    1.0 - t as f64 * binomial(q, t) as f64 * miss.powf(r as f64)
}

/// Smallest row count `r` with `r >= t * 2^t * ln q`.
pub fn required_rows(t: usize, q: usize) -> usize {
    (t as f64 * 2f64.powi(t as i32) * (q as f64).ln()).ceil() as usize
}

/// A matrix with event E. With `r >= q` this is the padded identity; row `j`
/// then has its only 1 in column `j`. Otherwise fair-coin matrices are drawn
/// until one qualifies.
pub fn acquire_event_matrix(t: usize, q: usize, r: usize, seed: u64, max_tries: usize) -> Result<BinaryMatrix> {
    if t == 0 || t > q || r == 0 {
        return Err(Error::Argument(format!(
            "need 1 <= t <= q and r >= 1, got t = {t}, q = {q}, r = {r}"
        )));
    }
    if r >= q {
        return BinaryMatrix::padded_identity(r, q);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_tries {
        let m = BinaryMatrix::random(r, q, &mut rng)?;
        if event_e_holds(&m, t)? {
            return Ok(m);
        }
    }
    Err(Error::AcquisitionFailed {
        tries: max_tries,
        bound: event_probability_bound(t, q, r),
    })
}
