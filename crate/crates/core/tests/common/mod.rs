#![allow(dead_code)]

use std::collections::HashMap;

use atomlight::schemes::SplitterNetwork;
use atomlight::C64;

/// `sum_a s10(a)` applied in the product basis (site 0 most significant).
pub fn product_raise(n: usize, amps: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for (idx, a) in amps.iter().enumerate() {
        for site in 0..n {
            let bit = 1usize << (n - 1 - site);
            if idx & bit == 0 {
                out[idx | bit] += a;
            }
        }
    }
    out
}

pub fn product_lower(n: usize, amps: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for (idx, a) in amps.iter().enumerate() {
        for site in 0..n {
            let bit = 1usize << (n - 1 - site);
            if idx & bit != 0 {
                out[idx & !bit] += a;
            }
        }
    }
    out
}

fn factorial(k: u8) -> f64 {
    (1..=k as u64).map(|x| x as f64).product()
}

/// Full Fock-space propagation of `n` identical pairs `a|0>|0> + b|1>|W>`
/// through `net`, projected on one photon at output port 1 and vacuum
/// elsewhere. Returns the heralding probability and the unnormalized
/// ensemble-qubit amplitudes indexed by excitation mask (site 0 MSB).
pub fn brute_force_herald(a: C64, b: C64, net: &SplitterNetwork) -> (f64, Vec<C64>) {
    let n = net.n_ports();
    let u = net.matrix();
    let mut target = vec![0u8; n];
    target[0] = 1;
    let mut atoms = vec![C64::new(0.0, 0.0); 1usize << n];
    for mask in 0usize..1 << n {
        let ports: Vec<usize> = (0..n).filter(|k| mask & (1 << (n - 1 - k)) != 0).collect();
        let weight = a.powu((n - ports.len()) as u32) * b.powu(ports.len() as u32);
        // product of transformed creation operators acting on vacuum
        let mut poly: HashMap<Vec<u8>, f64> = HashMap::new();
        poly.insert(vec![0u8; n], 1.0);
        for &k in &ports {
            let mut next: HashMap<Vec<u8>, f64> = HashMap::new();
            for (occ, coef) in &poly {
                for j in 0..n {
                    let mut o = occ.clone();
                    o[j] += 1;
                    *next.entry(o).or_insert(0.0) += coef * u[(j, k)];
                }
            }
            poly = next;
        }
        for (occ, coef) in &poly {
            if *occ == target {
                let fock_norm: f64 = occ.iter().map(|&m| factorial(m).sqrt()).product();
                atoms[mask] += weight * coef * fock_norm;
            }
        }
    }
    let prob = atoms.iter().map(|x| x.norm_sqr()).sum();
    (prob, atoms)
}

/// Single-excitation coefficients of a mask-indexed ket.
pub fn single_excitation_coeffs(n: usize, amps: &[C64]) -> Vec<C64> {
    (0..n).map(|k| amps[1usize << (n - 1 - k)]).collect()
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Kronecker product of coefficient vectors, first factor outermost.
pub fn kron_coeffs(levels: &[Vec<f64>]) -> Vec<f64> {
    levels.iter().fold(vec![1.0], |acc, q| acc.iter().flat_map(|x| q.iter().map(move |y| x * y)).collect())
}

/// Ordered factorizations of `m` into factors >= 2.
pub fn factorizations(m: usize) -> Vec<Vec<usize>> {
    if m == 1 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for f in 2..=m {
        if m % f == 0 {
            for mut rest in factorizations(m / f) {
                rest.insert(0, f);
                out.push(rest);
            }
        }
    }
    out
}
