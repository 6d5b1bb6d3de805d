#![allow(dead_code)]

use nalgebra::{Complex, DMatrix};
use num_complex::Complex64 as C;
use qdt_core::{make_factor_state, ProspectState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_amplitude(rng: &mut ChaCha8Rng) -> C {
    C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_vector(rng: &mut ChaCha8Rng, m: usize) -> Vec<C> {
    loop {
        let v: Vec<C> = (0..m).map(|_| random_amplitude(rng)).collect();
        if v.iter().any(|z| z.norm() > 1e-3) {
            return v;
        }
    }
}

pub fn random_state(rng: &mut ChaCha8Rng, dims: &[usize]) -> ProspectState {
    let d: usize = dims.iter().product();
    ProspectState::from_dense(dims, random_vector(rng, d)).unwrap()
}

pub fn random_dims(rng: &mut ChaCha8Rng, max_actions: usize, max_modes: usize) -> Vec<usize> {
    let n = rng.gen_range(1..=max_actions);
    (0..n).map(|_| rng.gen_range(1..=max_modes)).collect()
}

pub fn random_factor_state(rng: &mut ChaCha8Rng, dims: &[usize]) -> ProspectState {
    let factors: Vec<Vec<C>> = dims.iter().map(|&m| random_vector(rng, m)).collect();
    make_factor_state(&factors).unwrap()
}

/// Haar-ish unitary from Gram–Schmidt on a random complex matrix (row-major).
pub fn random_unitary(rng: &mut ChaCha8Rng, m: usize) -> Vec<C> {
    let mut rows: Vec<Vec<C>> = Vec::with_capacity(m);
    while rows.len() < m {
        let mut v = random_vector(rng, m);
        for r in &rows {
            let proj: C = r.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, a) in v.iter_mut().zip(r) {
                *x -= proj * a;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            rows.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    rows.into_iter().flatten().collect()
}

/// Largest eigenvalue of B B† for the M1×M2 coefficient matrix of a
/// two-action state, via nalgebra's Hermitian eigensolver.
pub fn gram_sigma_max_sq(state: &ProspectState) -> f64 {
    let dims = state.dims();
    assert_eq!(dims.len(), 2);
    let (m1, m2) = (dims[0], dims[1]);
    let b = DMatrix::from_fn(m1, m2, |i, j| {
        let z = state.data()[i * m2 + j];
        Complex::new(z.re, z.im)
    });
    let gram = &b * b.adjoint();
    gram.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Prints one verdict line per criterion and fails the test on a miss.
pub fn verdict(id: &str, name: &str, ok: bool, detail: String) {
    println!("[{}] {id} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{id} {name} failed: {detail}");
}
