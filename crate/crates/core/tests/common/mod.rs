#![allow(dead_code)]

use std::f64::consts::TAU;

/// Extreme eigenvalues of the Hermitian Gram matrix `V*V/d`, computed by
/// cyclic Jacobi rotations on its real symmetric `2d x 2d` embedding.
pub fn gram_extremes(nodes: &[f64]) -> (f64, f64) {
    let d = nodes.len();
    let n = 2 * d;
    let mut a = vec![0.0f64; n * n];
    for k in 0..d {
        for l in 0..d {
            let (mut re, mut im) = (0.0, 0.0);
            for t in nodes {
                let ph = TAU * (l as f64 - k as f64) * t;
                re += ph.cos();
                im += ph.sin();
            }
            re /= d as f64;
            im /= d as f64;
            // [[Re, -Im], [Im, Re]]
            a[k * n + l] = re;
            a[(k + d) * n + (l + d)] = re;
            a[k * n + (l + d)] = -im;
            a[(k + d) * n + l] = im;
        }
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    a[r * n + p] = c * arp - s * arq;
                    a[r * n + q] = s * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[p * n + r];
                    let aqr = a[q * n + r];
                    a[p * n + r] = c * apr - s * aqr;
                    a[q * n + r] = s * apr + c * aqr;
                }
            }
        }
    }
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Sorted uniform random nodes from a tiny xorshift stream, independent of
/// the library's generator.
pub fn oracle_nodes(seed: u64, d: usize) -> Vec<f64> {
    let mut x = seed.wrapping_mul(0x2545_f491_4f6c_dd1d) | 1;
    let mut v: Vec<f64> = (0..d)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect();
    v.sort_by(f64::total_cmp);
    v
}
