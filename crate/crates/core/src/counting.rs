//! Numbers of top simplices: the two-process recursion, its generating
//! function, and the general subset recursion.

use crate::error::{Error, Result};
use std::collections::HashMap;

fn add(a: u64, b: u64) -> Result<u64> {
    a.checked_add(b).ok_or(Error::Overflow)
}

/// Number of edges of `P(m,n)`: `f(m,n) = f(m,n-1) + f(m-1,n) + f(m-1,n-1)`
/// with `f(m,0) = f(0,n) = 1`.
pub fn f_dim1(m: usize, n: usize) -> Result<u64> {
    let mut table = vec![vec![1u64; n + 1]; m + 1];
    for i in 1..=m {
        for j in 1..=n {
            table[i][j] = add(add(table[i][j - 1], table[i - 1][j])?, table[i - 1][j - 1])?;
        }
    }
    Ok(table[m][n])
}

/// Memo for [`f_top`], keyed by the sorted nonzero values.
#[derive(Debug, Default)]
pub struct CountMemo {
    table: HashMap<Vec<u32>, u64>,
}

impl CountMemo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Number of top simplices of `P(values)`.
    pub fn f_top(&mut self, values: &[u32]) -> Result<u64> {
        let mut key: Vec<u32> = values.iter().copied().filter(|&v| v > 0).collect();
        key.sort_unstable();
        self.count(key)
    }

    fn count(&mut self, key: Vec<u32>) -> Result<u64> {
        if key.is_empty() {
            return Ok(1);
        }
        if let Some(&v) = self.table.get(&key) {
            return Ok(v);
        }
        let n = key.len();
        assert!(n < 32, "too many active processes");
        let mut total = 0u64;
        for mask in 1u32..(1 << n) {
            let mut next: Vec<u32> = key
                .iter()
                .enumerate()
                .map(|(k, &v)| if mask & (1 << k) != 0 { v - 1 } else { v })
                .filter(|&v| v > 0)
                .collect();
            next.sort_unstable();
            total = add(total, self.count(next)?)?;
        }
        self.table.insert(key, total);
        Ok(total)
    }
}

/// `f(m_0,…,m_n) = Σ_{∅≠S} f(m^S)` where `m^S` lowers the entries in `S` by one.
pub fn f_top(values: &[u32]) -> Result<u64> {
    CountMemo::new().f_top(values)
}

/// Coefficients `c[i][j]` of `1/(1-x-y-xy)` for `i, j ≤ order`, by summing
/// powers of `u = x+y+xy` truncated at total degree `2·order`.
pub fn series_coefficients(order: usize) -> Result<Vec<Vec<u64>>> {
    let deg = 2 * order;
    let size = deg + 1;
    let mul_u = |p: &Vec<Vec<u64>>| -> Result<Vec<Vec<u64>>> {
        let mut out = vec![vec![0u64; size]; size];
        for i in 0..size {
            for j in 0..size {
                let c = p[i][j];
                if c == 0 {
                    continue;
                }
                for (di, dj) in [(1, 0), (0, 1), (1, 1)] {
                    if i + di + j + dj <= deg {
                        out[i + di][j + dj] = add(out[i + di][j + dj], c)?;
                    }
                }
            }
        }
        Ok(out)
    };
    let mut power = vec![vec![0u64; size]; size];
    power[0][0] = 1;
    let mut sum = power.clone();
    for _ in 0..deg {
        power = mul_u(&power)?;
        for i in 0..size {
            for j in 0..size {
                sum[i][j] = add(sum[i][j], power[i][j])?;
            }
        }
    }
    Ok((0..=order).map(|i| sum[i][..=order].to_vec()).collect())
}

/// Outcome of comparing the series with the recursion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesCheck {
    pub ok: bool,
    pub compared: usize,
    pub mismatch: Option<(usize, usize)>,
}

/// Compare every coefficient of `x^i y^j`, `i, j ≤ order`, with `f_dim1(i, j)`.
pub fn series_check(order: usize) -> Result<SeriesCheck> {
    let c = series_coefficients(order)?;
    let mut compared = 0;
    for (i, row) in c.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            compared += 1;
            if v != f_dim1(i, j)? {
                return Ok(SeriesCheck {
                    ok: false,
                    compared,
                    mismatch: Some((i, j)),
                });
            }
        }
    }
    Ok(SeriesCheck {
        ok: true,
        compared,
        mismatch: None,
    })
}
