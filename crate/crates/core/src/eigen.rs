//! Dense symmetric eigensolver.
//!
//! Householder reduction to tridiagonal form followed by implicit QL
//! iteration with Wilkinson-type shifts, accumulating plane rotations into
//! the eigenvector basis (the classical `tred2`/`tql2` pair). Internally the
//! orthogonal factor is kept transposed so that every inner loop runs over
//! contiguous memory; row `i` of the working array is eigenvector `i`.

use crate::error::{Error, Result};
use crate::matrix::{format_f64, SymMatrix};

/// Eigen-decomposition with eigenvalues in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: usize,
    eigenvalues: Vec<f64>,
    /// Eigenvector `i` occupies `vectors[i*n..(i+1)*n]`.
    vectors: Vec<f64>,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unit eigenvector for `eigenvalues()[i]`. Its largest-magnitude
    /// coordinate (lowest index on ties) is positive.
    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.n..(i + 1) * self.n]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        self.vectors.chunks_exact(self.n.max(1))
    }

    /// Consecutive gaps `lambda_{i+1} - lambda_i`.
    pub fn gaps(&self) -> Vec<f64> {
        gaps(&self.eigenvalues)
    }

    /// `max |V^T V - I|` over all entries.
    pub fn orthogonality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                let d = dot(self.vector(i), self.vector(j)) - if i == j { 1.0 } else { 0.0 };
                worst = worst.max(d.abs());
            }
        }
        worst
    }

    /// `max_i |M v_i - lambda_i v_i|_2`.
    pub fn max_residual(&self, m: &SymMatrix) -> f64 {
        (0..self.n)
            .map(|i| {
                let v = self.vector(i);
                let mv = m.matvec(v);
                let lam = self.eigenvalues[i];
                mv.iter()
                    .zip(v)
                    .map(|(a, b)| (a - lam * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `V diag(lambda) V^T`, row-major.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for (k, v) in self.vectors().enumerate() {
            let lam = self.eigenvalues[k];
            for i in 0..n {
                let a = lam * v[i];
                if a == 0.0 {
                    continue;
                }
                let row = &mut out[i * n..(i + 1) * n];
                for (r, &vj) in row.iter_mut().zip(v) {
                    *r += a * vj;
                }
            }
        }
        out
    }

    /// Text block: `lambda:` followed by the eigenvalues on one line, then
    /// `V:` followed by the `n` rows of the eigenvector matrix (eigenvectors
    /// are its columns). Values use 17 significant digits.
    pub fn to_text(&self) -> String {
        let n = self.n;
        let mut out = String::from("lambda:");
        for &l in &self.eigenvalues {
            out.push(' ');
            out.push_str(&format_f64(l));
        }
        out.push_str("\nV:\n");
        for row in 0..n {
            let line: Vec<String> = (0..n).map(|col| format_f64(self.vector(col)[row])).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, first) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
        let rest = first
            .strip_prefix("lambda:")
            .ok_or_else(|| Error::parse(1, "expected `lambda:`"))?;
        let eigenvalues = parse_floats(rest, 1)?;
        let n = eigenvalues.len();
        match lines.next() {
            Some((_, l)) if l.trim() == "V:" => {}
            _ => return Err(Error::parse(2, "expected `V:`")),
        }
        let mut vectors = vec![0.0; n * n];
        for row in 0..n {
            let (lineno, line) = lines
                .next()
                .ok_or_else(|| Error::parse(row + 3, "missing eigenvector row"))?;
            let vals = parse_floats(line, lineno + 1)?;
            if vals.len() != n {
                return Err(Error::parse(lineno + 1, format!("expected {n} values")));
            }
            for (col, v) in vals.into_iter().enumerate() {
                vectors[col * n + row] = v;
            }
        }
        Ok(Spectrum {
            n,
            eigenvalues,
            vectors,
        })
    }
}

fn parse_floats(s: &str, line: usize) -> Result<Vec<f64>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| Error::parse(line, format!("bad value `{t}`: {e}")))
        })
        .collect()
}

pub fn gaps(eigenvalues: &[f64]) -> Vec<f64> {
    eigenvalues.windows(2).map(|w| w[1] - w[0]).collect()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_finite(m: &SymMatrix) -> Result<()> {
    if m.upper().iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::param("matrix", "entries must be finite"))
    }
}

/// Full eigen-decomposition of a symmetric matrix.
pub fn eig_sym(m: &SymMatrix) -> Result<Spectrum> {
    check_finite(m)?;
    let n = m.n();
    if n == 0 {
        return Ok(Spectrum {
            n,
            eigenvalues: vec![],
            vectors: vec![],
        });
    }
    let mut w = m.to_dense();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    householder(n, &mut w, &mut d, &mut e, true);
    implicit_ql(n, &mut d, &mut e, Some(&mut w))?;

    let order = ascending_order(&d);
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        let v = &w[k * n..(k + 1) * n];
        let lead = v
            .iter()
            .enumerate()
            .fold(0, |best, (i, x)| if x.abs() > v[best].abs() { i } else { best });
        let sign = if v[lead] < 0.0 { -1.0 } else { 1.0 };
        vectors.extend(v.iter().map(|x| sign * x));
    }
    Ok(Spectrum {
        n,
        eigenvalues: order.iter().map(|&k| d[k]).collect(),
        vectors,
    })
}

/// Eigenvalues only, ascending. Skips the `O(n^3)` accumulation of the
/// orthogonal factor.
pub fn eigvals_sym(m: &SymMatrix) -> Result<Vec<f64>> {
    check_finite(m)?;
    let n = m.n();
    if n == 0 {
        return Ok(vec![]);
    }
    let mut w = m.to_dense();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    householder(n, &mut w, &mut d, &mut e, false);
    implicit_ql(n, &mut d, &mut e, None)?;
    let mut out = d;
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Stable ascending permutation; equal values keep index order.
fn ascending_order(d: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..d.len()).collect();
    idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    idx
}

/// Householder tridiagonalisation. On entry `w` holds the dense matrix; on
/// exit `d` is the diagonal, `e[1..]` the sub-diagonal and, when
/// `accumulate`, row `i` of `w` is column `i` of the orthogonal factor.
///
/// `w[b * n + a]` plays the role of `V[a][b]` in the textbook formulation.
fn householder(n: usize, w: &mut [f64], d: &mut [f64], e: &mut [f64], accumulate: bool) {
    macro_rules! v {
        ($a:expr, $b:expr) => {
            w[($b) * n + ($a)]
        };
    }

    for j in 0..n {
        d[j] = v!(n - 1, j);
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v!(i - 1, j);
                v!(i, j) = 0.0;
                v!(j, i) = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v!(j, i) = f;
                g = e[j] + v!(j, j) * f;
                // column j of V below the diagonal is row j of w
                let col = &w[j * n..j * n + i];
                for k in (j + 1)..i {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }

            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let col = &mut w[j * n..j * n + i];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = v!(i - 1, j);
                v!(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    if accumulate {
        for i in 0..(n - 1) {
            v!(n - 1, i) = v!(i, i);
            v!(i, i) = 1.0;
            let h = d[i + 1];
            if h != 0.0 {
                for k in 0..=i {
                    d[k] = v!(k, i + 1) / h;
                }
                for j in 0..=i {
                    let (lo, hi) = w.split_at_mut((i + 1) * n);
                    let src = &hi[..=i];
                    let dst = &mut lo[j * n..j * n + i + 1];
                    let g: f64 = src.iter().zip(dst.iter()).map(|(a, b)| a * b).sum();
                    for (x, &dk) in dst.iter_mut().zip(&d[..=i]) {
                        *x -= g * dk;
                    }
                }
            }
            for k in 0..=i {
                v!(k, i + 1) = 0.0;
            }
        }
        for j in 0..n {
            d[j] = v!(n - 1, j);
            v!(n - 1, j) = 0.0;
        }
        v!(n - 1, n - 1) = 1.0;
    } else {
        for j in 0..n {
            d[j] = v!(j, j);
        }
    }
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal `(d, e)`; rotations are applied to the rows
/// of `z` when present. At most `50 n` sweeps in total.
fn implicit_ql(n: usize, d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let max_sweeps = 50 * n;
    let mut sweeps = 0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }

        if m > l {
            loop {
                sweeps += 1;
                if sweeps > max_sweeps {
                    return Err(Error::NonConvergence {
                        sweeps: max_sweeps,
                        start: l,
                        end: m + 1,
                        diagonal: d[l..=m].to_vec(),
                        off_diagonal: e[l..m].to_vec(),
                    });
                }

                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    if let Some(z) = z.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let zi = &mut lo[i * n..];
                        let zi1 = &mut hi[..n];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let t = *b;
                            *b = s * *a + c * t;
                            *a = c * *a - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// `max(|lambda_1|, |lambda_n|)`.
pub fn operator_norm(spec: &Spectrum) -> f64 {
    spectral_radius(spec.eigenvalues())
}

pub fn spectral_radius(eigenvalues: &[f64]) -> f64 {
    match (eigenvalues.first(), eigenvalues.last()) {
        (Some(a), Some(b)) => a.abs().max(b.abs()),
        _ => 0.0,
    }
}

/// Outcome of locating the eigenpair nearest to an approximate one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenpairMatch {
    pub index: usize,
    pub lambda_distance: f64,
    /// `min(|v - u|, |v + u|)`.
    pub vector_distance: f64,
    /// `|(M - lambda) v|_2`.
    pub residual: f64,
}

/// If `|(M - lambda) v| <= eta`, returns the eigenvector with the largest
/// overlap `|<v, u_i>|` and its distances to `(lambda, v)`.
///
/// The residual is evaluated in the eigenbasis as
/// `sqrt(sum_i <v, u_i>^2 (lambda_i - lambda)^2)`.
pub fn residual_eigenpair_locate(
    spec: &Spectrum,
    lambda: f64,
    v: &[f64],
    eta: f64,
) -> Result<Option<EigenpairMatch>> {
    if v.len() != spec.n() {
        return Err(Error::param("v", "length must match the spectrum dimension"));
    }
    let norm = dot(v, v).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Contract(format!("v must be a unit vector, |v| = {norm}")));
    }
    let coeffs: Vec<f64> = spec.vectors().map(|u| dot(u, v)).collect();
    let residual = coeffs
        .iter()
        .zip(spec.eigenvalues())
        .map(|(c, l)| (c * (l - lambda)).powi(2))
        .sum::<f64>()
        .sqrt();
    if residual > eta {
        return Ok(None);
    }
    let index = coeffs
        .iter()
        .enumerate()
        .fold(0, |best, (i, c)| if c.abs() > coeffs[best].abs() { i } else { best });
    let u = spec.vector(index);
    let minus: f64 = v.iter().zip(u).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let plus: f64 = v.iter().zip(u).map(|(a, b)| (a + b).powi(2)).sum::<f64>().sqrt();
    Ok(Some(EigenpairMatch {
        index,
        lambda_distance: (lambda - spec.eigenvalues()[index]).abs(),
        vector_distance: minus.min(plus),
        residual,
    }))
}

/// Result of comparing a spectrum with that of a principal minor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterlacingReport {
    pub holds: bool,
    /// Largest amount by which an inequality is violated (0 if none).
    pub max_violation: f64,
    pub slack: f64,
}

/// Checks `lambda_i(M) <= lambda_i(M') <= lambda_{i+1}(M)` where `M'` drops
/// row/column `drop`, with slack `1e-9 * max(1, |M|)`.
pub fn interlacing_check(m: &SymMatrix, drop: usize) -> Result<InterlacingReport> {
    let split = m.principal_minor(drop)?;
    let full = eigvals_sym(m)?;
    let minor = eigvals_sym(&split.minor)?;
    let slack = 1e-9 * spectral_radius(&full).max(1.0);
    Ok(interlacing_from_eigenvalues(&full, &minor, slack))
}

pub fn interlacing_from_eigenvalues(full: &[f64], minor: &[f64], slack: f64) -> InterlacingReport {
    let mut worst: f64 = 0.0;
    for (i, &mu) in minor.iter().enumerate() {
        worst = worst.max(full[i] - mu).max(mu - full[i + 1]);
    }
    InterlacingReport {
        holds: worst <= slack,
        max_violation: worst.max(0.0),
        slack,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream_rng;

    fn random_sym(n: usize, seed: u64) -> SymMatrix {
        let mut r = derive_stream_rng(seed, 0);
        SymMatrix::from_upper_fn(n, |_, _| 2.0 * r.uniform() - 1.0)
    }

    fn assert_invariants(m: &SymMatrix, s: &Spectrum) {
        let n = m.n() as f64;
        let norm = operator_norm(s).max(1.0);
        assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        assert!(s.orthogonality_error() <= 1e-10 * n);
        assert!(s.max_residual(m) <= 1e-10 * n * norm);
    }

    #[test]
    fn identity() {
        let s = eig_sym(&SymMatrix::identity(3)).unwrap();
        assert_eq!(s.eigenvalues(), &[1.0, 1.0, 1.0]);
        assert_invariants(&SymMatrix::identity(3), &s);
    }

    #[test]
    fn two_by_two_swap() {
        let m = SymMatrix::from_dense(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let s = eig_sym(&m).unwrap();
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // sign convention: first coordinate wins the tie and is positive
        assert!((s.vector(0)[0] - r).abs() < 1e-15 && (s.vector(0)[1] + r).abs() < 1e-15);
        assert!((s.vector(1)[0] - r).abs() < 1e-15 && (s.vector(1)[1] - r).abs() < 1e-15);
    }

    #[test]
    fn one_by_one_and_diagonal() {
        let s = eig_sym(&SymMatrix::diag(&[4.0])).unwrap();
        assert_eq!(s.eigenvalues(), &[4.0]);
        assert_eq!(s.vector(0), &[1.0]);
        let s = eig_sym(&SymMatrix::diag(&[3.0, -1.0, 2.0])).unwrap();
        assert_eq!(s.eigenvalues(), &[-1.0, 2.0, 3.0]);
        assert_eq!(s.vector(0), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn random_invariants_and_reconstruction() {
        for (n, seed) in [(5, 1), (17, 2), (64, 3), (150, 4)] {
            let m = random_sym(n, seed);
            let s = eig_sym(&m).unwrap();
            assert_invariants(&m, &s);
            let rec = s.reconstruct();
            let dense = m.to_dense();
            let err = rec.iter().zip(&dense).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err <= 1e-9 * n as f64 * operator_norm(&s).max(1.0));
        }
    }

    #[test]
    fn values_only_path_agrees() {
        for (n, seed) in [(2, 9), (3, 10), (31, 11), (120, 12)] {
            let m = random_sym(n, seed);
            let full = eig_sym(&m).unwrap();
            let vals = eigvals_sym(&m).unwrap();
            for (a, b) in full.eigenvalues().iter().zip(&vals) {
                assert!((a - b).abs() < 1e-12 * n as f64, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn sparse_matrix_with_zero_rows() {
        // Block structure exercises the scale == 0 branch.
        let mut m = SymMatrix::zeros(6);
        m.set(0, 1, 2.0);
        m.set(3, 3, -1.0);
        m.set(4, 5, 0.5);
        let s = eig_sym(&m).unwrap();
        assert_invariants(&m, &s);
        let mut expected = vec![-2.0, 2.0, -1.0, -0.5, 0.5, 0.0];
        expected.sort_by(f64::total_cmp);
        for (a, b) in s.eigenvalues().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn shift_invariance() {
        let m = random_sym(40, 5);
        let base = eigvals_sym(&m).unwrap();
        let shifted = eigvals_sym(&m.shifted(3.25)).unwrap();
        for (a, b) in base.iter().zip(&shifted) {
            assert!(((a + 3.25) - b).abs() <= 1e-10 * b.abs().max(1.0));
        }
    }

    #[test]
    fn nonfinite_input_rejected() {
        let mut m = SymMatrix::identity(3);
        m.set(0, 2, f64::NAN);
        assert!(matches!(eig_sym(&m), Err(Error::Parameter { .. })));
    }

    #[test]
    fn operator_norm_examples() {
        let s = eig_sym(&SymMatrix::diag(&[-3.0, 2.0])).unwrap();
        assert_eq!(operator_norm(&s), 3.0);
        assert_eq!(operator_norm(&eig_sym(&SymMatrix::zeros(4)).unwrap()), 0.0);
        let m = random_sym(6, 77);
        let norm = operator_norm(&eig_sym(&m).unwrap());
        assert!(norm <= m.max_column_abs_sum() + 1e-12);
        assert!(norm <= m.frobenius_norm() + 1e-12);
        assert!(norm >= m.frobenius_norm() / 6f64.sqrt() - 1e-12);
    }

    #[test]
    fn locate_exact_pair() {
        let m = random_sym(8, 6);
        let s = eig_sym(&m).unwrap();
        let v = s.vector(3).to_vec();
        let hit = residual_eigenpair_locate(&s, s.eigenvalues()[3], &v, 1e-8)
            .unwrap()
            .unwrap();
        assert_eq!(hit.index, 3);
        assert!(hit.lambda_distance == 0.0);
        assert!(hit.vector_distance < 1e-12);
    }

    #[test]
    fn locate_perturbed_pair() {
        let s = eig_sym(&SymMatrix::diag(&[1.0, 2.0, 3.0])).unwrap();
        let t = 1e-6;
        let mut v = vec![1.0, t, 0.0];
        let norm = dot(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        // residual is |v_2| * (2 - 1)
        let hit = residual_eigenpair_locate(&s, 1.0, &v, 1e-5).unwrap().unwrap();
        assert_eq!(hit.index, 0);
        assert!((hit.vector_distance - t).abs() < 1e-9);
        assert!((hit.residual - t).abs() < 1e-9);
    }

    #[test]
    fn locate_rejects_large_residual() {
        let s = eig_sym(&SymMatrix::diag(&[1.0, 2.0, 3.0])).unwrap();
        let v = [0.0, 0.0, 1.0];
        assert_eq!(residual_eigenpair_locate(&s, 1.0, &v, 1e-3).unwrap(), None);
        assert!(residual_eigenpair_locate(&s, 1.0, &[0.5, 0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn interlacing_examples() {
        let r = interlacing_check(&SymMatrix::diag(&[1.0, 2.0, 3.0]), 2).unwrap();
        assert!(r.holds);
        assert_eq!(r.max_violation, 0.0);

        let j = SymMatrix::ones(3);
        let full = eigvals_sym(&j).unwrap();
        let minor = eigvals_sym(&j.principal_minor(0).unwrap().minor).unwrap();
        assert!((full[2] - 3.0).abs() < 1e-14 && full[0].abs() < 1e-14 && full[1].abs() < 1e-14);
        assert!(minor[0].abs() < 1e-14 && (minor[1] - 2.0).abs() < 1e-14);
        assert!(interlacing_check(&j, 0).unwrap().holds);

        let bad = interlacing_from_eigenvalues(&[0.0, 1.0], &[2.0], 1e-9);
        assert!(!bad.holds);
        assert_eq!(bad.max_violation, 1.0);
    }

    #[test]
    fn interlacing_random_sweep() {
        for t in 0..200 {
            let m = random_sym(8, 1000 + t);
            let drop = (t as usize * 7) % 8;
            assert!(interlacing_check(&m, drop).unwrap().holds);
        }
    }

    #[test]
    fn spectrum_text_roundtrip() {
        let s = eig_sym(&random_sym(5, 8)).unwrap();
        let text = s.to_text();
        assert!(text.starts_with("lambda: "));
        assert_eq!(Spectrum::from_text(&text).unwrap(), s);
    }
}
