//! Real symmetric tridiagonal eigenproblems.
//!
//! Two independent routes are provided: Sturm-sequence bisection, which
//! isolates a single eigenvalue by its rank to full working precision, and
//! implicit-shift QL, which returns the complete eigensystem.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty matrix");
        assert_eq!(
            off.len() + 1,
            diag.len(),
            "off-diagonal length must be n - 1"
        );
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly less than `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let scale = self
            .diag
            .iter()
            .chain(self.off.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let tiny = f64::EPSILON * scale;
        let mut count = 0;
        let mut pivot = 1.0;
        for i in 0..self.dim() {
            let coupling = if i > 0 {
                self.off[i - 1] * self.off[i - 1]
            } else {
                0.0
            };
            pivot = self.diag[i] - x - if i > 0 { coupling / pivot } else { 0.0 };
            if pivot == 0.0 {
                pivot = -tiny;
            }
            if pivot < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based), by bisection on the Sturm count.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.dim(), "eigenvalue index {k} out of range");
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// All eigenvalues (ascending) with orthonormal eigenvectors.
    ///
    /// `vectors[i]` is the eigenvector belonging to `values[i]`.
    pub fn eigen(&self) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);
        let mut z: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut col = vec![0.0; n];
                col[i] = 1.0;
                col
            })
            .collect();

        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > 100 {
                    return Err(Error::Convergence {
                        what: "tridiagonal QL",
                        detail: format!("eigenvalue {l} after {iter} sweeps"),
                    });
                }
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
                let mut deflated = false;
                let mut i = m;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    let (lo, hi) = z.split_at_mut(i + 1);
                    let (zi, zi1) = (&mut lo[i], &mut hi[0]);
                    for k in 0..n {
                        let f = zi1[k];
                        zi1[k] = s * zi[k] + c * f;
                        zi[k] = c * zi[k] - s * f;
                    }
                }
                if deflated {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
        let values = order.iter().map(|&i| d[i]).collect();
        let vectors = order.iter().map(|&i| z[i].clone()).collect();
        Ok((values, vectors))
    }
}
