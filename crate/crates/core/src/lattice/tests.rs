use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn all_kinds() -> Vec<LatticeKind> {
    vec![
        LatticeKind::Zn(1),
        LatticeKind::Zn(2),
        LatticeKind::A2,
        LatticeKind::D3,
        LatticeKind::D4,
        LatticeKind::E8,
    ]
}

/// Uniform sample over `K` fundamental parallelepipeds: exactly uniform
/// modulo the lattice, so Voronoi-cell statistics come out unbiased.
fn sample_mod_uniform(lat: &Lattice<f64>, cells: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let z: Vec<f64> = (0..lat.dimension())
        .map(|_| rng.random_range(-cells / 2.0..cells / 2.0))
        .collect();
    lat.generator().mul_vec(&z)
}

#[test]
fn published_constants_z1_and_a2() {
    let z1 = Lattice::<f64>::new(LatticeKind::Zn(1), 1.0).unwrap();
    assert_eq!(z1.r_pack(), 0.5);
    assert_eq!(z1.r_cov(), 0.5);
    assert_eq!(z1.nsm(), 0.083333);

    let a2 = Lattice::<f64>::new(LatticeKind::A2, 1.0).unwrap();
    assert!((a2.r_pack() - 0.5).abs() < 1e-15);
    assert!((a2.r_cov() - 3f64.sqrt() / 3.0).abs() < 1e-15);
    assert_eq!(a2.nsm(), 0.080188);
}

#[test]
fn published_constants_d3_d4_e8() {
    for (kind, nsm) in [
        (LatticeKind::D3, 0.078745),
        (LatticeKind::D4, 0.076603),
        (LatticeKind::E8, 0.071682),
    ] {
        let lat = Lattice::<f64>::new(kind, 1.0).unwrap();
        assert!((lat.r_pack() - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(lat.r_cov(), 1.0);
        assert_eq!(lat.nsm(), nsm);
    }
}

#[test]
fn d4_scaled_volume_matches_cofactor_determinant() {
    // Independent determinant of the D4 basis by cofactor expansion along
    // the first column: det = 2 * det(I3) = 2.
    let det_by_cofactor = 2.0;
    let lat = Lattice::<f64>::new(LatticeKind::D4, 2000.0).unwrap();
    let expected = 2000f64.powi(4) * det_by_cofactor;
    assert!((lat.volume() - expected).abs() / expected < 1e-12);
}

#[test]
fn volume_agrees_with_generator_determinant() {
    for kind in all_kinds() {
        for scale in [1.0, 0.5, 2000.0] {
            let lat = Lattice::<f64>::new(kind, scale).unwrap();
            let det = lat.generator().determinant().abs();
            assert!(
                (det - lat.volume()).abs() / lat.volume() < 1e-12,
                "{kind:?} scale {scale}: det {det} vs volume {}",
                lat.volume()
            );
        }
    }
}

#[test]
fn scaling_scales_radii_linearly_and_volume_by_dim_power() {
    for kind in all_kinds() {
        let unit = Lattice::<f64>::new(kind, 1.0).unwrap();
        let scaled = Lattice::<f64>::new(kind, 3.0).unwrap();
        assert!((scaled.r_pack() - 3.0 * unit.r_pack()).abs() < 1e-12);
        assert!((scaled.r_cov() - 3.0 * unit.r_cov()).abs() < 1e-12);
        assert_eq!(scaled.nsm(), unit.nsm());
        let expect = unit.volume() * 3f64.powi(kind.dimension() as i32);
        assert!((scaled.volume() - expect).abs() / expect < 1e-12);
    }
}

#[test]
fn non_positive_scale_is_rejected() {
    assert!(Lattice::<f64>::new(LatticeKind::A2, 0.0).is_err());
    assert!(Lattice::<f64>::new(LatticeKind::A2, -1.0).is_err());
}

#[test]
fn cvp_z1_rounds_to_nearest_integer() {
    let z1 = Lattice::<f64>::new(LatticeKind::Zn(1), 1.0).unwrap();
    assert_eq!(z1.cvp(&[0.3]).unwrap().coords(), &[0.0]);
    assert_eq!(z1.cvp(&[0.7]).unwrap().coords(), &[1.0]);
    assert_eq!(z1.cvp(&[-1.6]).unwrap().coords(), &[-2.0]);
}

#[test]
fn cvp_half_integer_tie_takes_lexicographically_smaller_point() {
    let z1 = Lattice::<f64>::new(LatticeKind::Zn(1), 1.0).unwrap();
    assert_eq!(z1.cvp(&[0.5]).unwrap().coords(), &[0.0]);
    assert_eq!(z1.cvp(&[-0.5]).unwrap().coords(), &[-1.0]);
    assert_eq!(z1.cvp(&[1.5]).unwrap().coords(), &[1.0]);
}

#[test]
fn cvp_dimension_mismatch_is_rejected() {
    let a2 = Lattice::<f64>::new(LatticeKind::A2, 1.0).unwrap();
    assert!(a2.cvp(&[1.0]).is_err());
    assert!(a2.modulo(&[1.0, 2.0, 3.0]).is_err());
}

#[test]
fn cvp_a2_agrees_with_bruteforce_example() {
    let a2 = Lattice::<f64>::new(LatticeKind::A2, 1.0).unwrap();
    let x = [0.9, 0.1];
    let fast = a2.cvp(&x).unwrap();
    let brute = a2.cvp_bruteforce(&x, 4).unwrap();
    assert_eq!(fast, brute);
}

#[test]
fn cvp_bruteforce_identities() {
    let e8 = Lattice::<f64>::new(LatticeKind::E8, 1.0).unwrap();
    let origin = vec![0.0; 8];
    assert_eq!(e8.cvp_bruteforce(&origin, 2).unwrap().coords(), &origin[..]);

    // A perturbation below the packing radius cannot move the decode.
    let d4 = Lattice::<f64>::new(LatticeKind::D4, 1.0).unwrap();
    let mut r = rng(7);
    for _ in 0..50 {
        let z: Vec<i64> = (0..4).map(|_| r.random_range(-1..=1)).collect();
        let point = d4.generator().mul_int_vec(&z);
        let dir: Vec<f64> = (0..4).map(|_| r.random_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        let eps = 0.9 * d4.r_pack() / norm;
        let x: Vec<f64> = point.iter().zip(&dir).map(|(p, d)| p + d * eps).collect();
        assert_eq!(d4.cvp_bruteforce(&x, 2).unwrap().coords(), &point[..]);
    }
}

#[test]
fn modulo_examples() {
    let z1 = Lattice::<f64>::new(LatticeKind::Zn(1), 1.0).unwrap();
    let m = z1.modulo(&[2.3]).unwrap();
    assert!((m[0] - 0.3).abs() < 1e-12);

    let z4 = Lattice::<f64>::new(LatticeKind::Zn(1), 4.0).unwrap();
    assert_eq!(z4.modulo(&[5.0]).unwrap(), vec![1.0]);
}

#[test]
fn modulo_of_lattice_points_is_zero() {
    let mut r = rng(11);
    for kind in all_kinds() {
        let lat = Lattice::<f64>::new(kind, 1.5).unwrap();
        for _ in 0..100 {
            let z: Vec<i64> = (0..lat.dimension())
                .map(|_| r.random_range(-3..=3))
                .collect();
            let point = lat.generator().mul_int_vec(&z);
            let m = lat.modulo(&point).unwrap();
            assert!(m.iter().all(|&v| v.abs() < 1e-9), "{kind:?}: {m:?}");
        }
    }
}

#[test]
fn modulo_is_idempotent() {
    let mut r = rng(13);
    for kind in all_kinds() {
        let lat = Lattice::<f64>::new(kind, 1.0).unwrap();
        for _ in 0..200 {
            let x: Vec<f64> = (0..lat.dimension())
                .map(|_| r.random_range(-10.0..10.0))
                .collect();
            let m1 = lat.modulo(&x).unwrap();
            let m2 = lat.modulo(&m1).unwrap();
            for (a, b) in m1.iter().zip(&m2) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn covering_property_holds_on_random_points() {
    let mut r = rng(17);
    for kind in all_kinds() {
        let lat = Lattice::<f64>::new(kind, 1.0).unwrap();
        let reach = 3.0 * lat.r_cov();
        for _ in 0..2_000 {
            let x: Vec<f64> = (0..lat.dimension())
                .map(|_| r.random_range(-reach..reach))
                .collect();
            let q = lat.cvp(&x).unwrap();
            let d = dist_sq(&x, q.coords()).sqrt();
            assert!(
                d <= lat.r_cov() + 1e-9,
                "{kind:?}: distance {d} exceeds covering radius {}",
                lat.r_cov()
            );
        }
    }
}

#[test]
fn cvp_is_shift_invariant() {
    let mut r = rng(19);
    for kind in all_kinds() {
        let lat = Lattice::<f64>::new(kind, 1.0).unwrap();
        for _ in 0..300 {
            let x: Vec<f64> = (0..lat.dimension())
                .map(|_| r.random_range(-2.0..2.0))
                .collect();
            let z: Vec<i64> = (0..lat.dimension())
                .map(|_| r.random_range(-2..=2))
                .collect();
            let shift = lat.generator().mul_int_vec(&z);
            let shifted: Vec<f64> = x.iter().zip(&shift).map(|(a, b)| a + b).collect();
            let q1 = lat.cvp(&shifted).unwrap();
            let q0 = lat.cvp(&x).unwrap();
            for ((a, b), s) in q1.coords().iter().zip(q0.coords()).zip(&shift) {
                assert!((a - (b + s)).abs() < 1e-9, "{kind:?}");
            }
        }
    }
}

#[test]
fn fast_decoders_match_box_bruteforce() {
    let mut r = rng(23);
    for kind in [
        LatticeKind::Zn(1),
        LatticeKind::Zn(2),
        LatticeKind::A2,
        LatticeKind::D3,
        LatticeKind::D4,
    ] {
        let lat = Lattice::<f64>::new(kind, 1.0).unwrap();
        let reach = 3.0 * lat.r_cov();
        // Box radius that provably contains the minimizer's coefficients:
        // ceil((|x| + r_cov) / shortest basis norm) + 1.
        let shortest = (0..lat.dimension())
            .map(|j| dist_sq(&lat.generator().column(j), &vec![0.0; lat.dimension()]).sqrt())
            .fold(f64::INFINITY, f64::min);
        for _ in 0..300 {
            let x: Vec<f64> = (0..lat.dimension())
                .map(|_| r.random_range(-reach..reach))
                .collect();
            let norm = dist_sq(&x, &vec![0.0; x.len()]).sqrt();
            let radius = ((norm + lat.r_cov()) / shortest).ceil() as u32 + 1;
            let fast = lat.cvp(&x).unwrap();
            let brute = lat.cvp_bruteforce(&x, radius).unwrap();
            for (a, b) in fast.coords().iter().zip(brute.coords()) {
                assert!((a - b).abs() < 1e-9, "{kind:?} at {x:?}");
            }
        }
    }
}

#[test]
fn fast_decoders_match_ball_search() {
    let mut r = rng(29);
    for kind in [
        LatticeKind::Zn(2),
        LatticeKind::D3,
        LatticeKind::D4,
        LatticeKind::E8,
    ] {
        let lat = Lattice::<f64>::new(kind, 1.0).unwrap();
        let reach = 3.0 * lat.r_cov();
        for _ in 0..300 {
            let x: Vec<f64> = (0..lat.dimension())
                .map(|_| r.random_range(-reach..reach))
                .collect();
            let fast = lat.cvp(&x).unwrap();
            let oracle = lat.cvp_ball_search(&x).unwrap();
            for (a, b) in fast.coords().iter().zip(oracle.coords()) {
                assert!((a - b).abs() < 1e-9, "{kind:?} at {x:?}");
            }
        }
    }
}

#[test]
fn box_and_ball_oracles_agree_on_d_lattices() {
    let mut r = rng(31);
    for kind in [LatticeKind::D3, LatticeKind::D4] {
        let lat = Lattice::<f64>::new(kind, 1.0).unwrap();
        for _ in 0..100 {
            let x: Vec<f64> = (0..lat.dimension())
                .map(|_| r.random_range(-2.0..2.0))
                .collect();
            let a = lat.cvp_bruteforce(&x, 5).unwrap();
            let b = lat.cvp_ball_search(&x).unwrap();
            assert_eq!(a, b, "{kind:?} at {x:?}");
        }
    }
}

#[test]
fn d4_half_cell_ties_are_lexicographic() {
    let d4 = Lattice::<f64>::new(LatticeKind::D4, 1.0).unwrap();
    // (½,½,½,½) ties 0, six (1,1,0,0)-type points and (1,1,1,1).
    let q = d4.cvp(&[0.5, 0.5, 0.5, 0.5]).unwrap();
    assert_eq!(q.coords(), &[0.0, 0.0, 0.0, 0.0]);
    let q = d4.cvp(&[-0.5, -0.5, 0.5, 0.5]).unwrap();
    assert_eq!(q.coords(), &[-1.0, -1.0, 0.0, 0.0]);
    // Odd parity after rounding, two equally-bad flips: lexicographic pick.
    let q = d4.cvp(&[0.5, 0.5, 0.9, 0.0]).unwrap();
    assert_eq!(q.coords(), &[0.0, 1.0, 1.0, 0.0]);
}

#[test]
fn e8_tie_between_branches_is_deterministic() {
    let e8 = Lattice::<f64>::new(LatticeKind::E8, 1.0).unwrap();
    // (¼,…,¼) is equidistant from 0 (D8) and (½,…,½) (D8 + ½·1).
    let x = vec![0.25; 8];
    let q = e8.cvp(&x).unwrap();
    assert_eq!(q.coords(), &[0.0; 8][..]);
    let oracle = e8.cvp_ball_search(&x).unwrap();
    assert_eq!(q, oracle);
}

#[test]
fn monte_carlo_second_moment_matches_published_nsm() {
    let mut r = rng(37);
    for kind in all_kinds() {
        let lat = Lattice::<f64>::new(kind, 1.0).unwrap();
        let n = lat.dimension() as f64;
        let samples = 200_000;
        let mut acc = 0.0;
        for _ in 0..samples {
            let u = sample_mod_uniform(&lat, 4.0, &mut r);
            let m = lat.modulo(&u).unwrap();
            acc += m.iter().map(|v| v * v).sum::<f64>();
        }
        let second_moment = acc / (samples as f64 * n);
        let expected = lat.nsm() * lat.volume().powf(2.0 / n);
        let rel = (second_moment - expected).abs() / expected;
        assert!(
            rel < 0.02,
            "{kind:?}: MC second moment {second_moment} vs {expected} (rel {rel})"
        );
    }
}

#[test]
fn contains_accepts_lattice_points_and_rejects_others() {
    let mut r = rng(41);
    for kind in all_kinds() {
        let lat = Lattice::<f64>::new(kind, 2.0).unwrap();
        for _ in 0..50 {
            let z: Vec<i64> = (0..lat.dimension())
                .map(|_| r.random_range(-4..=4))
                .collect();
            let p = lat.generator().mul_int_vec(&z);
            assert!(lat.contains(&p), "{kind:?} should contain {p:?}");
            let off: Vec<f64> = p.iter().map(|v| v + 0.37).collect();
            assert!(!lat.contains(&off));
        }
    }
}

#[test]
fn rectangular_lattice_constants() {
    let lat = Lattice::<f64>::rectangular(&[2.0, 4.0]).unwrap();
    assert_eq!(lat.r_pack(), 1.0);
    assert_eq!(lat.r_cov(), (4.0f64 + 16.0).sqrt() / 2.0);
    assert_eq!(lat.volume(), 8.0);
    let q = lat.cvp(&[1.2, 5.1]).unwrap();
    assert_eq!(q.coords(), &[2.0, 4.0]);
}

#[test]
fn kind_labels_round_trip() {
    for kind in all_kinds() {
        assert_eq!(LatticeKind::parse(&kind.label()).unwrap(), kind);
    }
    assert_eq!(LatticeKind::parse("z").unwrap(), LatticeKind::Zn(1));
    assert!(LatticeKind::parse("leech").is_err());
    assert!(LatticeKind::parse("z0").is_err());
}
