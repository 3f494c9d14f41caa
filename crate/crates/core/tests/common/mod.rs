//! Test-only oracles that share no code path with the sector-blocked solver.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(Sx, Sy, Sz)` written out by hand, basis ordered by descending `m`.
pub fn spin_ops(d: usize) -> [DMatrix<Complex64>; 3] {
    match d {
        2 => [
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)]),
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.0, 0.0)]),
            DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]),
        ],
        3 => {
            let r = 1.0 / 2f64.sqrt();
            let z = c(0.0, 0.0);
            [
                DMatrix::from_row_slice(3, 3, &[z, c(r, 0.0), z, c(r, 0.0), z, c(r, 0.0), z, c(r, 0.0), z]),
                DMatrix::from_row_slice(3, 3, &[z, c(0.0, -r), z, c(0.0, r), z, c(0.0, -r), z, c(0.0, r), z]),
                DMatrix::from_row_slice(3, 3, &[c(1.0, 0.0), z, z, z, z, z, z, z, c(-1.0, 0.0)]),
            ]
        }
        _ => panic!("unsupported local dimension {d}"),
    }
}

/// `op` acting on 0-based `site` of an `l`-site chain. Site 0 is the least
/// significant base-`d` digit, so it is the rightmost Kronecker factor.
fn embed(op: &DMatrix<Complex64>, site: usize, l: usize, d: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::<Complex64>::identity(1, 1);
    for k in (0..l).rev() {
        let factor = if k == site { op.clone() } else { DMatrix::identity(d, d) };
        out = out.kronecker(&factor);
    }
    out
}

/// Dense `S_i·S_j` on the full space (0-based sites).
pub fn dense_dot(i: usize, j: usize, l: usize, d: usize) -> DMatrix<Complex64> {
    let ops = spin_ops(d);
    let n = d.pow(l as u32);
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for s in &ops {
        out += embed(s, i, l, d) * embed(s, j, l, d);
    }
    out
}

/// Dense open-chain Hamiltonian with `J = 1`, no symmetry used.
pub fn dense_hamiltonian(l: usize, d: usize) -> DMatrix<Complex64> {
    let n = d.pow(l as u32);
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..l - 1 {
        let dot = dense_dot(i, i + 1, l, d);
        if d == 2 {
            h += dot * c(2.0, 0.0) + DMatrix::<Complex64>::identity(n, n) * c(0.5, 0.0);
        } else {
            h += dot;
        }
    }
    h
}

pub fn dense_sorted_eigenvalues(l: usize, d: usize) -> Vec<f64> {
    let mut e: Vec<f64> = dense_hamiltonian(l, d).symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}
