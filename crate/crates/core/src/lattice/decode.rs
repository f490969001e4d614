//! Fast exact closest-vector decoders, one per lattice family.
//!
//! * `Z^N`: independent per-axis rounding.
//! * `A2`: solve for real basis coefficients, then search the 3x3 integer
//!   neighborhood — the minimizer's coefficients provably lie within 1 of
//!   the rounded solution for this basis.
//! * `D3`/`D4`: round every coordinate; if the coordinate sum is odd, flip
//!   one coordinate by ±1, choosing the flip with the smallest penalty.
//! * `E8`: decode the `D8` branch and the half-shifted `D8` branch and keep
//!   the nearer point.
//!
//! All decoders resolve exact ties to the lexicographically smallest
//! candidate, consistently with the brute-force oracles.

use super::{dist_sq, lex_less, nearest_int_tie_down, Lattice, LatticeKind};
use crate::num::{real, Real};

pub(super) fn cvp<F: Real>(lat: &Lattice<F>, x: &[F]) -> Vec<F> {
    match lat.kind() {
        LatticeKind::Zn(_) => {
            let steps = lat.cubic_steps().expect("cubic lattice carries steps");
            x.iter()
                .zip(steps)
                .map(|(&xi, &step)| nearest_int_tie_down(xi / step) * step)
                .collect()
        }
        LatticeKind::A2 => a2_cvp(lat, x),
        LatticeKind::D3 | LatticeKind::D4 => scaled(lat, x, |u| dn_cvp(u)),
        LatticeKind::E8 => scaled(lat, x, |u| e8_cvp(u)),
    }
}

/// Runs a unit-scale decoder on `x / scale` and scales the result back.
fn scaled<F: Real>(lat: &Lattice<F>, x: &[F], f: impl Fn(&[F]) -> Vec<F>) -> Vec<F> {
    let s = lat.scale();
    let u: Vec<F> = x.iter().map(|&xi| xi / s).collect();
    f(&u).into_iter().map(|c| c * s).collect()
}

fn a2_cvp<F: Real>(lat: &Lattice<F>, x: &[F]) -> Vec<F> {
    let zhat = lat.inverse_generator().mul_vec(x);
    let b0 = nearest_int_tie_down(zhat[0])
        .to_f64()
        .expect("finite coefficient") as i64;
    let b1 = nearest_int_tie_down(zhat[1])
        .to_f64()
        .expect("finite coefficient") as i64;
    let mut best: Option<(F, Vec<F>)> = None;
    for dz0 in -1..=1 {
        for dz1 in -1..=1 {
            let cand = lat.generator().mul_int_vec(&[b0 + dz0, b1 + dz1]);
            let d = dist_sq(x, &cand);
            let better = match &best {
                None => true,
                Some((bd, bp)) => d < *bd || (d == *bd && lex_less(&cand, bp)),
            };
            if better {
                best = Some((d, cand));
            }
        }
    }
    best.expect("candidate set is nonempty").1
}

/// Closest point of `D_n = { v ∈ Z^n : Σ v_i even }` at unit scale.
pub(super) fn dn_cvp<F: Real>(u: &[F]) -> Vec<F> {
    let f: Vec<F> = u.iter().map(|&ui| nearest_int_tie_down(ui)).collect();
    let mut parity = 0i64;
    for &fi in &f {
        parity += fi.to_f64().expect("finite coordinate") as i64;
    }
    if parity.rem_euclid(2) == 0 {
        // Coordinate-wise nearest rounding already lands in D_n, and
        // tie-down rounding makes it the lexicographic minimum.
        return f;
    }
    // Parity is odd: every valid candidate differs from `f` by a single ±1
    // flip (flipping a coordinate to its second-nearest integer).
    let mut best: Option<(F, Vec<F>)> = None;
    for i in 0..u.len() {
        for delta in [-1.0, 1.0] {
            let mut cand = f.clone();
            cand[i] = cand[i] + real::<F>(delta);
            let d = dist_sq(u, &cand);
            let better = match &best {
                None => true,
                Some((bd, bp)) => d < *bd || (d == *bd && lex_less(&cand, bp)),
            };
            if better {
                best = Some((d, cand));
            }
        }
    }
    best.expect("candidate set is nonempty").1
}

/// Closest point of `E8 = D8 ∪ (D8 + ½·1)` at unit scale.
pub(super) fn e8_cvp<F: Real>(u: &[F]) -> Vec<F> {
    let half = real::<F>(0.5);
    let a = dn_cvp(u);
    let shifted: Vec<F> = u.iter().map(|&ui| ui - half).collect();
    let b: Vec<F> = dn_cvp(&shifted).into_iter().map(|c| c + half).collect();
    let da = dist_sq(u, &a);
    let db = dist_sq(u, &b);
    if da < db || (da == db && lex_less(&a, &b)) {
        a
    } else {
        b
    }
}
