//! Independent reference computations shared by the integration tests.
//! None of these go through the library's eigensolver or exponential.
#![allow(dead_code)]

use openmap::linalg::{c, r, Complex64, ComplexMatrix};
use openmap::spin::{pauli, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    Uniform::new(lo, hi).expect("valid range").sample(rng)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn frobenius(m: &ComplexMatrix) -> f64 {
    m.to_row_major().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `exp(m)` by scaling, a 12th-order Taylor polynomial, and squaring.
pub fn taylor_expm(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let norm = frobenius(m);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = m.scale_real(scale);
    let mut term = ComplexMatrix::identity(n);
    let mut sum = ComplexMatrix::identity(n);
    for k in 1..=12 {
        term = (&term * &a).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(-i h t)` from the Taylor oracle.
pub fn taylor_unitary(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    taylor_expm(&h.scale(c(0.0, -t)))
}

/// Characteristic polynomial coefficients `[1, c1, ..., cn]` of
/// `det(x I - m)` by Faddeev-LeVerrier.
pub fn charpoly(m: &ComplexMatrix) -> Vec<Complex64> {
    let n = m.rows();
    let id = ComplexMatrix::identity(n);
    let mut coeffs = vec![r(1.0)];
    let mut mk = ComplexMatrix::zeros(n, n);
    for k in 1..=n {
        let prev = *coeffs.last().expect("nonempty");
        mk = &(m * &mk) + &id.scale(prev);
        let ck = -(m * &mk).trace() / k as f64;
        coeffs.push(ck);
    }
    coeffs
}

fn horner(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().fold(r(0.0), |acc, &c| acc * x + c)
}

/// Roots of a monic polynomial by Durand-Kerner iteration.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let bound = 1.0 + coeffs[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = c(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut denom = r(1.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = horner(coeffs, roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    // polish with Newton on the polynomial
    let deriv: Vec<Complex64> = coeffs[..n]
        .iter()
        .enumerate()
        .map(|(k, &c)| c * (n - k) as f64)
        .collect();
    for z in &mut roots {
        for _ in 0..5 {
            let d = horner(&deriv, *z);
            if d.norm() > 0.0 {
                *z -= horner(coeffs, *z) / d;
            }
        }
    }
    roots
}

/// Real parts of the eigenvalues of a Hermitian matrix, ascending, from its
/// characteristic polynomial.
pub fn oracle_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = poly_roots(&charpoly(m)).into_iter().map(|z| z.re).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Closed-form eigenvalues of a 2x2 Hermitian matrix.
pub fn eig2(m: &ComplexMatrix) -> (f64, f64) {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean - rad, mean + rad)
}

fn h2(ev: &[f64]) -> f64 {
    ev.iter().filter(|&&x| x > 1e-300).map(|&x| -x * x.log2()).sum()
}

/// Discord with qubit 2 measured, by exhaustive search on a fine angle grid.
pub fn brute_discord(rho: &ComplexMatrix) -> f64 {
    let ptrace_second = |m: &ComplexMatrix| -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] = m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)];
            }
        }
        out
    };
    let ptrace_first = |m: &ComplexMatrix| -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] = m[(i, j)] + m[(2 + i, 2 + j)];
            }
        }
        out
    };
    let (e0, e1) = eig2(&ptrace_first(rho));
    let s_e = h2(&[e0, e1]);
    let s_joint = h2(&oracle_eigenvalues(rho));
    let id = ComplexMatrix::identity(2);
    let mut best = f64::INFINITY;
    for i in 0..=90 {
        let theta = std::f64::consts::PI * i as f64 / 90.0;
        for j in 0..180 {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / 180.0;
            let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let mut cond = 0.0;
            for s in [1.0, -1.0] {
                let ns = &(&pauli(Axis::X).scale_real(s * n[0]) + &pauli(Axis::Y).scale_real(s * n[1]))
                    + &pauli(Axis::Z).scale_real(s * n[2]);
                let proj = (&id + &ns).scale_real(0.5);
                let op = openmap::linalg::kron(&id, &proj);
                let post = ptrace_second(&(&(&op * rho) * &op));
                let p = post.trace().re;
                if p > 1e-15 {
                    let (a, b) = eig2(&post.scale_real(1.0 / p));
                    cond += p * h2(&[a, b]);
                }
            }
            best = best.min(cond);
        }
    }
    (s_e - s_joint + best).max(0.0)
}

/// Haar-ish random 2x2 unitary from a normalized quaternion.
pub fn random_su2(rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let q: Vec<f64> = (0..4).map(|_| gaussian(rng)).collect();
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (a, b, cc, d) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
    ComplexMatrix::from_row_major(2, 2, &[c(a, b), c(cc, d), c(-cc, d), c(a, -b)]).expect("finite")
}

pub fn max_sorted_diff(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    x.iter().zip(&y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}
