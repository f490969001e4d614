//! Exhaustive reference decoders.
//!
//! These exist to cross-validate the fast decoders: they enumerate a
//! candidate set that provably contains the minimizer and pick the best
//! point by definition (minimum distance, then lexicographic order). They
//! share no code path with `decode`.

use super::{dist_sq, lex_less, Lattice, LatticeKind};
use crate::error::{Error, Result};
use crate::num::{real, Real};

/// Minimum over `{ G z : z ∈ [-radius, radius]^N }`.
pub(super) fn bruteforce_box<F: Real>(lat: &Lattice<F>, x: &[F], radius: u32) -> Vec<F> {
    let n = lat.dimension();
    let r = radius as i64;
    let mut z = vec![-r; n];
    let mut best: Option<(F, Vec<F>)> = None;
    loop {
        let cand = lat.generator().mul_int_vec(&z);
        consider(x, cand, &mut best);
        // Odometer increment over the box.
        let mut axis = 0;
        loop {
            if axis == n {
                return best.expect("box is nonempty").1;
            }
            z[axis] += 1;
            if z[axis] <= r {
                break;
            }
            z[axis] = -r;
            axis += 1;
        }
    }
}

/// Minimum over every lattice vector whose coordinates lie within the
/// covering radius of `x` (a box that contains the closed covering ball,
/// hence the minimizer). Works off the coordinate description of each
/// family; `A2` has none and is rejected.
pub(super) fn ball_search<F: Real>(lat: &Lattice<F>, x: &[F]) -> Result<Vec<F>> {
    match lat.kind() {
        LatticeKind::Zn(_) => {
            let steps = lat.cubic_steps().expect("cubic lattice carries steps");
            let reach = lat.r_cov() + F::membership_tol();
            let axes: Vec<Vec<F>> = x
                .iter()
                .zip(steps)
                .map(|(&xi, &step)| {
                    integers_in(xi / step - reach / step, xi / step + reach / step)
                        .into_iter()
                        .map(|k| real::<F>(k as f64) * step)
                        .collect()
                })
                .collect();
            let best = grid_min(x, &axes, |_| true);
            Ok(best.expect("covering ball contains a lattice point").1)
        }
        LatticeKind::D3 | LatticeKind::D4 | LatticeKind::E8 => {
            let s = lat.scale();
            let u: Vec<F> = x.iter().map(|&xi| xi / s).collect();
            // Unit-scale covering radius is 1 for D3, D4 and E8.
            let reach = F::one() + F::membership_tol();
            let even_sum = |cand: &[F]| {
                let mut sum = 0i64;
                for &c in cand {
                    sum += c.to_f64().expect("finite") as i64;
                }
                sum.rem_euclid(2) == 0
            };

            let int_axes: Vec<Vec<F>> = u
                .iter()
                .map(|&ui| {
                    integers_in(ui - reach, ui + reach)
                        .into_iter()
                        .map(|k| real::<F>(k as f64))
                        .collect()
                })
                .collect();
            let mut best = grid_min(&u, &int_axes, even_sum);

            if lat.kind() == LatticeKind::E8 {
                // Half-integer branch: v = m + ½·1 with Σ m_i even.
                let half = real::<F>(0.5);
                let half_axes: Vec<Vec<F>> = u
                    .iter()
                    .map(|&ui| {
                        integers_in(ui - half - reach, ui - half + reach)
                            .into_iter()
                            .map(|k| real::<F>(k as f64) + half)
                            .collect()
                    })
                    .collect();
                let half_even = |cand: &[F]| {
                    let mut sum = 0i64;
                    for &c in cand {
                        sum += (c - half).to_f64().expect("finite") as i64;
                    }
                    sum.rem_euclid(2) == 0
                };
                if let Some((d, p)) = grid_min(&u, &half_axes, half_even) {
                    let replace = match &best {
                        None => true,
                        Some((bd, bp)) => d < *bd || (d == *bd && lex_less(&p, bp)),
                    };
                    if replace {
                        best = Some((d, p));
                    }
                }
            }

            let (_, point) = best.expect("covering ball contains a lattice point");
            Ok(point.into_iter().map(|c| c * s).collect())
        }
        LatticeKind::A2 => Err(Error::invalid(
            "ball search needs a coordinate description; use cvp_bruteforce for a2",
        )),
    }
}

/// Integers in the closed interval `[lo, hi]`.
fn integers_in<F: Real>(lo: F, hi: F) -> Vec<i64> {
    let lo = lo.ceil().to_f64().expect("finite bound") as i64;
    let hi = hi.floor().to_f64().expect("finite bound") as i64;
    (lo..=hi).collect()
}

/// Minimum-distance, lexicographic-tie point over a coordinate product set.
fn grid_min<F: Real>(
    x: &[F],
    axes: &[Vec<F>],
    accept: impl Fn(&[F]) -> bool,
) -> Option<(F, Vec<F>)> {
    let n = axes.len();
    if axes.iter().any(|a| a.is_empty()) {
        return None;
    }
    let mut idx = vec![0usize; n];
    let mut best: Option<(F, Vec<F>)> = None;
    loop {
        let cand: Vec<F> = idx.iter().zip(axes).map(|(&i, axis)| axis[i]).collect();
        if accept(&cand) {
            consider(x, cand, &mut best);
        }
        let mut axis = 0;
        loop {
            if axis == n {
                return best;
            }
            idx[axis] += 1;
            if idx[axis] < axes[axis].len() {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

#[inline]
fn consider<F: Real>(x: &[F], cand: Vec<F>, best: &mut Option<(F, Vec<F>)>) {
    let d = dist_sq(x, &cand);
    let better = match best {
        None => true,
        Some((bd, bp)) => d < *bd || (d == *bd && lex_less(&cand, bp)),
    };
    if better {
        *best = Some((d, cand));
    }
}
