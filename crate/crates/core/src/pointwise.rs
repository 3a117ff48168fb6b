//! Pointwise tensor algebra on row-major `n × n` matrices over any [`Scalar`].
//!
//! Derivative arrays use the layouts
//! `dg[a * n² + i * n + j] = ∂_a g_ij` and
//! `ddg[(a * n + b) * n² + i * n + j] = ∂_a ∂_b g_ij`.

use crate::scalar::Scalar;

/// Inverse of a symmetric positive-definite matrix (Gauss–Jordan, no pivoting).
pub fn inverse<S: Scalar>(a: &[S], n: usize) -> Vec<S> {
    let mut m = a.to_vec();
    let mut inv = vec![S::zero(); n * n];
    for i in 0..n {
        inv[i * n + i] = S::from_f64(1.0);
    }
    for col in 0..n {
        let piv = m[col * n + col];
        for k in 0..n {
            m[col * n + k] = m[col * n + k] / piv;
            inv[col * n + k] = inv[col * n + k] / piv;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = m[row * n + col];
            for k in 0..n {
                let mk = m[col * n + k];
                let ik = inv[col * n + k];
                m[row * n + k] -= f * mk;
                inv[row * n + k] -= f * ik;
            }
        }
    }
    inv
}

pub fn matmul<S: Scalar>(a: &[S], b: &[S], n: usize) -> Vec<S> {
    let mut c = vec![S::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

pub fn trace<S: Scalar>(a: &[S], n: usize) -> S {
    let mut s = S::zero();
    for i in 0..n {
        s += a[i * n + i];
    }
    s
}

/// `tr(A B)` without forming the product.
pub fn trace_of_product<S: Scalar>(a: &[S], b: &[S], n: usize) -> S {
    let mut s = S::zero();
    for i in 0..n {
        for k in 0..n {
            s += a[i * n + k] * b[k * n + i];
        }
    }
    s
}

/// `g^{ia} g^{jb} τ_ij σ_ab` given `g^{-1}`.
pub fn inner<S: Scalar>(ginv: &[S], tau: &[S], sigma: &[S], n: usize) -> S {
    let a = matmul(ginv, tau, n);
    let b = matmul(ginv, sigma, n);
    trace_of_product(&a, &b, n)
}

/// Determinant of a small matrix by LU without pivoting (SPD input).
pub fn determinant(a: &[f64], n: usize) -> f64 {
    let mut m = a.to_vec();
    let mut det = 1.0;
    for c in 0..n {
        let piv = m[c * n + c];
        det *= piv;
        for r in c + 1..n {
            let f = m[r * n + c] / piv;
            for k in c..n {
                m[r * n + k] -= f * m[c * n + k];
            }
        }
    }
    det
}

/// Cholesky test for positive-definiteness.
pub fn is_positive_definite(a: &[f64], n: usize) -> bool {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return false;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    true
}

/// Christoffel symbols `Γ^l_ij` stored at `l * n² + i * n + j`.
pub fn christoffel<S: Scalar>(ginv: &[S], dg: &[S], n: usize) -> Vec<S> {
    let n2 = n * n;
    let mut lowered = vec![S::zero(); n * n2];
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                lowered[m * n2 + i * n + j] = (dg[i * n2 + m * n + j] + dg[j * n2 + m * n + i]
                    - dg[m * n2 + i * n + j])
                    .scale(0.5);
            }
        }
    }
    let mut gamma = vec![S::zero(); n * n2];
    for l in 0..n {
        for m in 0..n {
            let glm = ginv[l * n + m];
            for ij in 0..n2 {
                gamma[l * n2 + ij] += glm * lowered[m * n2 + ij];
            }
        }
    }
    gamma
}

/// Ricci tensor from the metric and its first and second coordinate derivatives.
pub fn ricci<S: Scalar>(g: &[S], dg: &[S], ddg: &[S], n: usize) -> Vec<S> {
    let n2 = n * n;
    let n3 = n2 * n;
    let ginv = inverse(g, n);
    let gamma = christoffel(&ginv, dg, n);

    // ∂_k g^{lm} = -g^{la} ∂_k g_ab g^{bm}
    let mut dginv = vec![S::zero(); n3];
    for k in 0..n {
        let t = matmul(&ginv, &dg[k * n2..(k + 1) * n2], n);
        let d = matmul(&t, &ginv, n);
        for lm in 0..n2 {
            dginv[k * n2 + lm] = -d[lm];
        }
    }

    // ∂_k Γ_{m,ij}
    let dlow = |k: usize, m: usize, i: usize, j: usize| -> S {
        (ddg[(k * n + i) * n2 + m * n + j] + ddg[(k * n + j) * n2 + m * n + i]
            - ddg[(k * n + m) * n2 + i * n + j])
            .scale(0.5)
    };
    let low = |m: usize, i: usize, j: usize| -> S {
        (dg[i * n2 + m * n + j] + dg[j * n2 + m * n + i] - dg[m * n2 + i * n + j]).scale(0.5)
    };
    // ∂_k Γ^l_ij
    let dgamma = |k: usize, l: usize, i: usize, j: usize| -> S {
        let mut s = S::zero();
        for m in 0..n {
            s += dginv[k * n2 + l * n + m] * low(m, i, j) + ginv[l * n + m] * dlow(k, m, i, j);
        }
        s
    };

    let mut ric = vec![S::zero(); n2];
    for i in 0..n {
        for j in i..n {
            let mut s = S::zero();
            for k in 0..n {
                s += dgamma(k, k, i, j) - dgamma(j, k, k, i);
                for l in 0..n {
                    s += gamma[k * n2 + k * n + l] * gamma[l * n2 + i * n + j]
                        - gamma[k * n2 + j * n + l] * gamma[l * n2 + k * n + i];
                }
            }
            ric[i * n + j] = s;
            ric[j * n + i] = s;
        }
    }
    ric
}

/// Radial Einstein operator in geodesic compactified gauge,
/// `t g̈ − (n−1) ġ − tr(g⁻¹ġ) g − 2t Ric + ½ t tr(g⁻¹ġ) ġ − t ġ g⁻¹ ġ`.
pub fn radial_operator<S: Scalar>(
    t: S,
    g: &[S],
    gd: &[S],
    gdd: &[S],
    ric: &[S],
    n: usize,
) -> Vec<S> {
    let ginv = inverse(g, n);
    let mixed = matmul(&ginv, gd, n);
    let tr = trace(&mixed, n);
    let quad = matmul(gd, &mixed, n);
    let nm1 = (n - 1) as f64;
    (0..n * n)
        .map(|k| {
            t * gdd[k] - gd[k].scale(nm1) - tr * g[k] - (t * ric[k]).scale(2.0)
                + (t * tr * gd[k]).scale(0.5)
                - t * quad[k]
        })
        .collect()
}

/// Solves the radial operator for `g̈` (t > 0).
pub fn radial_acceleration(t: f64, g: &[f64], gd: &[f64], ric: &[f64], n: usize) -> Vec<f64> {
    let ginv = inverse(g, n);
    let mixed = matmul(&ginv, gd, n);
    let tr = trace(&mixed, n);
    let quad = matmul(gd, &mixed, n);
    let nm1 = (n - 1) as f64;
    (0..n * n)
        .map(|k| {
            (nm1 * gd[k] + tr * g[k] + 2.0 * t * ric[k] - 0.5 * t * tr * gd[k] + t * quad[k]) / t
        })
        .collect()
}

/// Mean curvature `H = ½ tr(g⁻¹ ġ)` and `|A|² = ¼ tr((g⁻¹ġ)²)` for `A = ½ ġ`.
pub fn mean_curvature<S: Scalar>(g: &[S], gd: &[S], n: usize) -> (S, S) {
    let ginv = inverse(g, n);
    let mixed = matmul(&ginv, gd, n);
    (
        trace(&mixed, n).scale(0.5),
        trace_of_product(&mixed, &mixed, n).scale(0.25),
    )
}

/// Riccati trace identity residual `t Ḣ − H + t |A|²`.
pub fn riccati_trace<S: Scalar>(t: S, g: &[S], gd: &[S], gdd: &[S], n: usize) -> S {
    let ginv = inverse(g, n);
    let mixed = matmul(&ginv, gd, n);
    let h = trace(&mixed, n).scale(0.5);
    let a2 = trace_of_product(&mixed, &mixed, n).scale(0.25);
    // Ḣ = ½ tr(g⁻¹ g̈) − ½ tr((g⁻¹ ġ)²)
    let hdot = trace_of_product(&ginv, gdd, n).scale(0.5) - a2.scale(2.0);
    t * hdot - h + t * a2
}

/// Hamiltonian constraint of the physical metric `t⁻²(dt² + g_t)` with
/// `Ric = −n g`, written on the compactified slice:
/// `2(n−1)H + t(|A|² − H² + R_{g_t})`.
pub fn hamiltonian<S: Scalar>(t: S, g: &[S], gd: &[S], scalar_curvature: S, n: usize) -> S {
    let (h, a2) = mean_curvature(g, gd, n);
    h.scale(2.0 * (n - 1) as f64) + t * (a2 - h * h + scalar_curvature)
}
