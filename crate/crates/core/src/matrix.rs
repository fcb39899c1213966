//! Dense symmetric matrices with packed upper-triangle storage.

use crate::error::{Error, Result};

/// Real symmetric `n x n` matrix. Only the upper triangle is stored, so
/// `get(i, j) == get(j, i)` holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

/// A principal minor together with the row/column that was removed.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorSplit {
    pub minor: SymMatrix,
    /// Removed column without its diagonal entry, in the minor's index order.
    pub column: Vec<f64>,
    pub diagonal: f64,
    pub dropped: usize,
}

/// Row `i` of the packed upper triangle starts at `i * (2n - i + 1) / 2`.
#[inline]
fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (2 * n - i + 1) / 2 + (j - i)
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// The all-ones matrix `J_n`.
    pub fn ones(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![1.0; n * (n + 1) / 2],
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle `i <= j`.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                data.push(f(i, j));
            }
        }
        SymMatrix { n, data }
    }

    /// Builds a matrix from a row-major dense slice, which must be exactly
    /// symmetric.
    pub fn from_dense(n: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != n * n {
            return Err(Error::param(
                "dense",
                format!("expected {} entries, got {}", n * n, dense.len()),
            ));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if dense[i * n + j] != dense[j * n + i] {
                    return Err(Error::Contract(format!(
                        "matrix not symmetric at ({i}, {j}): {} vs {}",
                        dense[i * n + j],
                        dense[j * n + i]
                    )));
                }
            }
        }
        Ok(Self::from_upper_fn(n, |i, j| dense[i * n + j]))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[packed_index(self.n, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = packed_index(self.n, i, j);
        self.data[k] = value;
    }

    /// Packed upper triangle, row by row.
    pub fn upper(&self) -> &[f64] {
        &self.data
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                out[i * n + j] = self.data[k];
                out[j * n + i] = self.data[k];
                k += 1;
            }
        }
        out
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.n).map(|j| self.get(i, j)).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(x.len(), n, "vector length must match matrix dimension");
        let mut y = vec![0.0; n];
        let mut k = 0;
        for i in 0..n {
            let xi = x[i];
            y[i] += self.data[k] * xi;
            k += 1;
            for j in (i + 1)..n {
                let a = self.data[k];
                y[i] += a * x[j];
                y[j] += a * xi;
                k += 1;
            }
        }
        y
    }

    /// `self + c * Id`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            let v = m.get(i, i);
            m.set(i, i, v + c);
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, &x| a.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        let mut k = 0;
        for i in 0..self.n {
            for j in i..self.n {
                let w = if i == j { 1.0 } else { 2.0 };
                s += w * self.data[k] * self.data[k];
                k += 1;
            }
        }
        s.sqrt()
    }

    /// Largest absolute column sum, an upper bound on the operator norm.
    pub fn max_column_abs_sum(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Number of nonzero entries in the upper triangle (diagonal included).
    pub fn upper_nonzeros(&self) -> usize {
        self.data.iter().filter(|&&x| x != 0.0).count()
    }

    /// Removes row and column `drop`.
    pub fn principal_minor(&self, drop: usize) -> Result<MinorSplit> {
        let n = self.n;
        if drop >= n {
            return Err(Error::IndexOutOfRange { index: drop, len: n });
        }
        if n < 3 {
            return Err(Error::param("n", format!("principal minor needs n >= 3, got {n}")));
        }
        let keep: Vec<usize> = (0..n).filter(|&i| i != drop).collect();
        let minor = SymMatrix::from_upper_fn(n - 1, |a, b| self.get(keep[a], keep[b]));
        let column = keep.iter().map(|&i| self.get(i, drop)).collect();
        Ok(MinorSplit {
            minor,
            column,
            diagonal: self.get(drop, drop),
            dropped: drop,
        })
    }

    /// Serialises as `n` on the first line followed by `n` rows of
    /// space-separated values with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.n * self.n * 25 + 16);
        out.push_str(&self.n.to_string());
        out.push('\n');
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format_f64(self.get(i, j))).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
        let n: usize = first
            .trim()
            .parse()
            .map_err(|e| Error::parse(1, format!("bad dimension: {e}")))?;
        let mut dense = Vec::with_capacity(n * n);
        let mut rows = 0;
        for (lineno, line) in lines {
            if rows == n {
                return Err(Error::parse(lineno + 1, "more rows than declared"));
            }
            let before = dense.len();
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|e| Error::parse(lineno + 1, format!("bad value `{tok}`: {e}")))?;
                dense.push(v);
            }
            if dense.len() - before != n {
                return Err(Error::parse(
                    lineno + 1,
                    format!("expected {n} values, got {}", dense.len() - before),
                ));
            }
            rows += 1;
        }
        if rows != n {
            return Err(Error::parse(rows + 2, format!("expected {n} rows, got {rows}")));
        }
        Self::from_dense(n, &dense)
    }
}

impl MinorSplit {
    /// Inverse of [`SymMatrix::principal_minor`].
    pub fn reassemble(&self) -> SymMatrix {
        let n = self.minor.n() + 1;
        let d = self.dropped;
        let pos = |i: usize| if i < d { i } else { i - 1 };
        SymMatrix::from_upper_fn(n, |i, j| match (i == d, j == d) {
            (true, true) => self.diagonal,
            (true, false) => self.column[pos(j)],
            (false, true) => self.column[pos(i)],
            (false, false) => self.minor.get(pos(i), pos(j)),
        })
    }
}

/// Shortest-roundtrip is not fixed width; 17 significant digits always is.
pub(crate) fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}
