//! Nested lattice pairs and coset coding.
//!
//! A coarse lattice `Λc = { G_f J z }` sits inside the fine lattice
//! `Λf = { G_f z }` whenever `J` is an integer matrix; here `J` is
//! restricted to positive diagonals, which covers self-similar shaping
//! (`J = Γ I`) for every family and rectangular shaping for `Z^N`. The fine
//! lattice splits into `det J` cosets of the coarse one; each coset carries
//! one message index.
//!
//! Labeling is the mixed-radix expansion of the index over the diagonal of
//! `J`, pushed through `G_f` and reduced into the fundamental cell of `Λc`.
//! It is bijective by construction and invertible in `O(N^2)` without a
//! table scan.

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeKind};
use crate::num::{real, Real};

/// Hard cap on coset table sizes (number of representatives).
pub const DEFAULT_COSET_CAP: u64 = 1 << 20;

/// Diagonal nesting matrix `J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestingMatrix {
    diag: Vec<u64>,
}

impl NestingMatrix {
    pub fn new(diag: Vec<u64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::invalid("nesting diagonal must be non-empty"));
        }
        if diag.iter().any(|&d| d == 0) {
            return Err(Error::invalid("nesting diagonal entries must be >= 1"));
        }
        Ok(NestingMatrix { diag })
    }

    /// `J = Γ I` for the given dimension: one coarse cell per `Γ^N` fine
    /// cells, i.e. a rate of `log2 Γ` bits per dimension.
    pub fn self_similar(dim: usize, gamma: u64) -> Result<Self> {
        NestingMatrix::new(vec![gamma; dim])
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[u64] {
        &self.diag
    }

    /// `det J`, i.e. the number of cosets.
    pub fn det(&self) -> Result<u64> {
        self.diag
            .iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::invalid("nesting determinant overflows u64"))
    }

    /// `Γ` when the diagonal is constant.
    pub fn self_similar_factor(&self) -> Option<u64> {
        let g = self.diag[0];
        self.diag.iter().all(|&d| d == g).then_some(g)
    }
}

/// A fine/coarse lattice pair with its nesting matrix and code rate.
#[derive(Debug, Clone)]
pub struct NestedPair<F> {
    fine: Lattice<F>,
    coarse: Lattice<F>,
    nesting: NestingMatrix,
    rate: F,
}

impl<F: Real> NestedPair<F> {
    /// Builds the pair with fine lattice `scale * kind` and coarse generator
    /// `G_f J`. Non-uniform diagonals are only meaningful for `Z^N`; for the
    /// other families they would break the fast coarse decoder and are
    /// rejected.
    pub fn new(kind: LatticeKind, scale: F, nesting: NestingMatrix) -> Result<Self> {
        let fine = Lattice::new(kind, scale)?;
        if nesting.dim() != fine.dimension() {
            return Err(Error::invalid(format!(
                "nesting diagonal has length {}, lattice dimension is {}",
                nesting.dim(),
                fine.dimension()
            )));
        }
        let det = nesting.det()?;
        let coarse = match (nesting.self_similar_factor(), kind) {
            (Some(gamma), _) => {
                let generator = fine.generator().scale_columns_by_ints(nesting.diag());
                Lattice::from_parts(kind, scale * real(gamma as f64), generator)?
            }
            (None, LatticeKind::Zn(_)) => {
                let steps: Vec<F> = (0..fine.dimension())
                    .map(|i| fine.generator().get(i, i) * real(nesting.diag()[i] as f64))
                    .collect();
                Lattice::rectangular(&steps)?
            }
            (None, other) => {
                return Err(Error::config(format!(
                    "non-uniform nesting requires the cubic lattice; {} only supports J = Γ·I",
                    other.label()
                )));
            }
        };
        let n = real::<F>(fine.dimension() as f64);
        let rate = real::<F>((det as f64).log2()) / n;
        Ok(NestedPair {
            fine,
            coarse,
            nesting,
            rate,
        })
    }

    pub fn fine(&self) -> &Lattice<F> {
        &self.fine
    }

    pub fn coarse(&self) -> &Lattice<F> {
        &self.coarse
    }

    pub fn nesting(&self) -> &NestingMatrix {
        &self.nesting
    }

    pub fn dimension(&self) -> usize {
        self.fine.dimension()
    }

    /// Code rate in bits per dimension: `log2(det J) / N`.
    pub fn rate(&self) -> F {
        self.rate
    }

    /// Number of message indices (`det J`).
    pub fn coset_count(&self) -> u64 {
        self.nesting.det().expect("validated at construction")
    }

    /// Nearest point of coset `index` to `s`: `Q_Λc(s - d_i) + d_i`.
    pub fn quantize_to_coset(&self, table: &CosetTable<F>, index: u64, s: &[F]) -> Result<Vec<F>> {
        let d = table.representative(index)?;
        let shifted: Vec<F> = s.iter().zip(d).map(|(&si, &di)| si - di).collect();
        let q = self.coarse.cvp(&shifted)?;
        Ok(q.coords().iter().zip(d).map(|(&qi, &di)| qi + di).collect())
    }

    /// Decodes the message index of an observation: quantize to the fine
    /// lattice, then invert the labeling of the resulting coset.
    pub fn decode_coset(&self, y: &[F]) -> Result<u64> {
        let v = self.fine.cvp(y)?;
        Ok(self.decode_fine_point(v.coords()))
    }

    /// Inverse labeling of a fine lattice point: its basis coefficients
    /// reduced modulo the nesting diagonal, recombined in mixed radix.
    pub fn decode_fine_point(&self, point: &[F]) -> u64 {
        let z = self.fine.coefficients_of(point);
        let mut index = 0u64;
        let mut stride = 1u64;
        for (zk, &ak) in z.iter().zip(self.nesting.diag()) {
            let digit = zk.rem_euclid(ak as i64) as u64;
            index += digit * stride;
            stride *= ak;
        }
        index
    }
}

/// Enumerated coset representatives, one per message index, each reduced
/// into the fundamental Voronoi cell of the coarse lattice.
#[derive(Debug, Clone)]
pub struct CosetTable<F> {
    representatives: Vec<Vec<F>>,
    radices: Vec<u64>,
}

impl<F: Real> CosetTable<F> {
    /// Builds the table for a pair, refusing sizes above `cap`
    /// (use [`DEFAULT_COSET_CAP`] unless you know better).
    pub fn build(pair: &NestedPair<F>, cap: u64) -> Result<Self> {
        let det = pair.nesting().det()?;
        if det > cap {
            return Err(Error::Capacity {
                requested: det,
                capacity: cap,
            });
        }
        let mut representatives = Vec::with_capacity(det as usize);
        for index in 0..det {
            let digits = mixed_radix_digits(index, pair.nesting().diag());
            let raw = pair.fine().generator().mul_int_vec(&digits);
            representatives.push(pair.coarse().modulo(&raw)?);
        }
        Ok(CosetTable {
            representatives,
            radices: pair.nesting().diag().to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn representatives(&self) -> &[Vec<F>] {
        &self.representatives
    }

    pub fn index_radices(&self) -> &[u64] {
        &self.radices
    }

    pub fn representative(&self, index: u64) -> Result<&[F]> {
        self.representatives
            .get(index as usize)
            .map(Vec::as_slice)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "coset index {index} out of range (table has {})",
                    self.representatives.len()
                ))
            })
    }

    /// Minimum distance between distinct cosets: the shortest reduced
    /// difference of representatives. Quadratic in the table size — meant
    /// for verification, not hot paths.
    pub fn min_coset_distance(&self, pair: &NestedPair<F>) -> Result<Option<F>> {
        let mut best: Option<F> = None;
        for i in 0..self.representatives.len() {
            for j in i + 1..self.representatives.len() {
                let diff: Vec<F> = self.representatives[i]
                    .iter()
                    .zip(&self.representatives[j])
                    .map(|(&a, &b)| a - b)
                    .collect();
                let reduced = pair.coarse().modulo(&diff)?;
                let d = reduced.iter().map(|&v| v * v).sum::<F>().sqrt();
                best = Some(match best {
                    None => d,
                    Some(b) => b.min(d),
                });
            }
        }
        Ok(best)
    }
}

/// Little-endian mixed-radix expansion of `index` over `radices`
/// (axis 0 is the fastest-varying digit).
fn mixed_radix_digits(index: u64, radices: &[u64]) -> Vec<i64> {
    let mut digits = Vec::with_capacity(radices.len());
    let mut rem = index;
    for &r in radices {
        digits.push((rem % r) as i64);
        rem /= r;
    }
    digits
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn pair(kind: LatticeKind, scale: f64, diag: &[u64]) -> NestedPair<f64> {
        NestedPair::new(kind, scale, NestingMatrix::new(diag.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn nesting_matrix_rejects_zero_entries() {
        assert!(NestingMatrix::new(vec![2, 0]).is_err());
        assert!(NestingMatrix::new(vec![]).is_err());
    }

    #[test]
    fn coarse_generator_is_fine_times_nesting_bit_exactly() {
        let p = pair(LatticeKind::A2, 1.0, &[4, 4]);
        for i in 0..2 {
            for j in 0..2 {
                let expect = p.fine().generator().get(i, j) * 4.0;
                assert_eq!(p.coarse().generator().get(i, j), expect);
            }
        }
    }

    #[test]
    fn coarse_columns_are_fine_lattice_points() {
        for (kind, diag) in [
            (LatticeKind::Zn(2), vec![2u64, 2]),
            (LatticeKind::Zn(2), vec![2, 4]),
            (LatticeKind::A2, vec![4, 4]),
            (LatticeKind::D4, vec![2, 2, 2, 2]),
            (LatticeKind::E8, vec![2; 8]),
        ] {
            let p = pair(kind, 1.0, &diag);
            for j in 0..p.dimension() {
                let col = p.coarse().generator().column(j);
                assert!(p.fine().contains(&col), "{kind:?} column {j}");
            }
        }
    }

    #[test]
    fn rate_examples() {
        let p = pair(LatticeKind::Zn(2), 2000.0, &[2, 2]);
        assert_eq!(p.rate(), 1.0);

        let p = pair(LatticeKind::A2, 1.0, &[4, 4]);
        assert_eq!(p.nesting().self_similar_factor(), Some(4));
        assert_eq!(p.coarse().scale(), 4.0);
        assert_eq!(p.rate(), 2.0);

        let degenerate = pair(LatticeKind::Zn(1), 1.0, &[1]);
        assert_eq!(degenerate.rate(), 0.0);
        let table = CosetTable::build(&degenerate, DEFAULT_COSET_CAP).unwrap();
        assert_eq!(table.len(), 1);
    }

    #[test]
    fn rectangular_nesting_on_non_cubic_is_rejected() {
        let nesting = NestingMatrix::new(vec![2, 4]).unwrap();
        assert!(NestedPair::<f64>::new(LatticeKind::A2, 1.0, nesting).is_err());
    }

    #[test]
    fn rectangular_nesting_on_cubic_works() {
        let p = pair(LatticeKind::Zn(2), 1.0, &[2, 4]);
        assert_eq!(p.coarse().volume(), 8.0);
        assert_eq!(p.rate(), 8f64.log2() / 2.0);
        let table = CosetTable::build(&p, DEFAULT_COSET_CAP).unwrap();
        assert_eq!(table.len(), 8);
    }

    #[test]
    fn scalar_representatives_reduce_into_coarse_cell() {
        // Fine Z, coarse 4Z: indices 0..3 reduce to {0, 1, 2, -1}; the
        // half-cell point 2 stays +2 under the lexicographic tie rule.
        let p = pair(LatticeKind::Zn(1), 1.0, &[4]);
        let table = CosetTable::build(&p, DEFAULT_COSET_CAP).unwrap();
        let reps: Vec<f64> = table.representatives().iter().map(|r| r[0]).collect();
        assert_eq!(reps, vec![0.0, 1.0, 2.0, -1.0]);
    }

    #[test]
    fn first_representative_is_zero() {
        for (kind, diag) in [
            (LatticeKind::Zn(2), vec![2u64, 2]),
            (LatticeKind::A2, vec![2, 2]),
            (LatticeKind::E8, vec![2; 8]),
        ] {
            let p = pair(kind, 1.0, &diag);
            let table = CosetTable::build(&p, DEFAULT_COSET_CAP).unwrap();
            assert!(table.representative(0).unwrap().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn a2_representatives_are_distinct_modulo_coarse() {
        let p = pair(LatticeKind::A2, 1.0, &[2, 2]);
        let table = CosetTable::build(&p, DEFAULT_COSET_CAP).unwrap();
        let reps = table.representatives();
        assert_eq!(reps.len(), 4);
        for i in 0..reps.len() {
            for j in 0..reps.len() {
                if i == j {
                    continue;
                }
                let diff: Vec<f64> = reps[i].iter().zip(&reps[j]).map(|(a, b)| a - b).collect();
                assert!(
                    !p.coarse().contains(&diff),
                    "representatives {i} and {j} are congruent"
                );
            }
        }
    }

    #[test]
    fn coset_count_matches_rate_for_power_of_two_nesting() {
        for r in [1u32, 2, 3] {
            let p = pair(LatticeKind::Zn(2), 1.0, &[1 << r, 1 << r]);
            let table = CosetTable::build(&p, DEFAULT_COSET_CAP).unwrap();
            assert_eq!(table.len() as u64, 1u64 << (2 * r));
        }
    }

    #[test]
    fn table_cap_is_enforced() {
        let p = pair(LatticeKind::Zn(2), 1.0, &[64, 64]);
        match CosetTable::build(&p, 1024) {
            Err(crate::Error::Capacity {
                requested,
                capacity,
            }) => {
                assert_eq!(requested, 4096);
                assert_eq!(capacity, 1024);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn quantize_to_coset_scalar_examples() {
        let p = pair(LatticeKind::Zn(1), 1.0, &[4]);
        let table = CosetTable::build(&p, DEFAULT_COSET_CAP).unwrap();
        // Nearest point of 2 + 4Z to 1.3 is 2.
        assert_eq!(p.quantize_to_coset(&table, 2, &[1.3]).unwrap(), vec![2.0]);
        // Nearest point of 4Z to 1.9 is 0.
        assert_eq!(p.quantize_to_coset(&table, 0, &[1.9]).unwrap(), vec![0.0]);
        // A coarse lattice point is its own quantization in coset 0.
        assert_eq!(p.quantize_to_coset(&table, 0, &[-8.0]).unwrap(), vec![-8.0]);
    }

    #[test]
    fn quantize_to_coset_rejects_out_of_range_index() {
        let p = pair(LatticeKind::Zn(1), 1.0, &[4]);
        let table = CosetTable::build(&p, DEFAULT_COSET_CAP).unwrap();
        assert!(p.quantize_to_coset(&table, 4, &[0.0]).is_err());
    }

    #[test]
    fn quantized_point_minus_representative_lies_in_coarse() {
        let mut r = rng(51);
        for (kind, diag) in [
            (LatticeKind::Zn(2), vec![2u64, 2]),
            (LatticeKind::A2, vec![2, 2]),
            (LatticeKind::D4, vec![2, 2, 2, 2]),
        ] {
            let p = pair(kind, 1.0, &diag);
            let table = CosetTable::build(&p, DEFAULT_COSET_CAP).unwrap();
            for _ in 0..200 {
                let i = r.random_range(0..table.len() as u64);
                let s: Vec<f64> = (0..p.dimension())
                    .map(|_| r.random_range(-10.0..10.0))
                    .collect();
                let q = p.quantize_to_coset(&table, i, &s).unwrap();
                let diff: Vec<f64> = q
                    .iter()
                    .zip(table.representative(i).unwrap())
                    .map(|(a, b)| a - b)
                    .collect();
                assert!(p.coarse().contains(&diff));
            }
        }
    }

    #[test]
    fn decode_inverts_quantize_on_random_hosts() {
        let mut r = rng(53);
        for (kind, diag) in [
            (LatticeKind::Zn(1), vec![4u64]),
            (LatticeKind::Zn(2), vec![2, 2]),
            (LatticeKind::Zn(2), vec![2, 4]),
            (LatticeKind::A2, vec![2, 2]),
            (LatticeKind::D3, vec![2, 2, 2]),
            (LatticeKind::D4, vec![2, 2, 2, 2]),
            (LatticeKind::E8, vec![2; 8]),
        ] {
            let p = pair(kind, 1.0, &diag);
            let table = CosetTable::build(&p, DEFAULT_COSET_CAP).unwrap();
            let trials = 100_000 / table.len().max(1);
            for _ in 0..trials {
                for i in 0..table.len() as u64 {
                    let s: Vec<f64> = (0..p.dimension())
                        .map(|_| r.random_range(-8.0..8.0))
                        .collect();
                    let q = p.quantize_to_coset(&table, i, &s).unwrap();
                    assert_eq!(p.decode_coset(&q).unwrap(), i, "{kind:?} index {i}");
                }
            }
        }
    }

    #[test]
    fn decode_matches_exhaustive_nearest_coset_search() {
        // Independent decode route: find the nearest fine point by ball
        // search, then identify its coset by congruence against the table.
        let mut r = rng(57);
        let p = pair(LatticeKind::D4, 1.0, &[2, 2, 2, 2]);
        let table = CosetTable::build(&p, DEFAULT_COSET_CAP).unwrap();
        for _ in 0..500 {
            let y: Vec<f64> = (0..4).map(|_| r.random_range(-4.0..4.0)).collect();
            let fast = p.decode_coset(&y).unwrap();
            let nearest = p.fine().cvp_ball_search(&y).unwrap();
            let by_congruence = (0..table.len() as u64)
                .find(|&i| {
                    let diff: Vec<f64> = nearest
                        .coords()
                        .iter()
                        .zip(table.representative(i).unwrap())
                        .map(|(a, b)| a - b)
                        .collect();
                    p.coarse().contains(&diff)
                })
                .expect("every fine point belongs to some coset");
            assert_eq!(fast, by_congruence, "at {y:?}");
        }
    }

    #[test]
    fn noisy_decode_is_correct_while_fine_quantization_holds() {
        // y = d_i + λc + n decodes to i whenever the fine decode of y lands
        // back on d_i + λc.
        let mut r = rng(59);
        let p = pair(LatticeKind::Zn(2), 1.0, &[4, 4]);
        let table = CosetTable::build(&p, DEFAULT_COSET_CAP).unwrap();
        for _ in 0..500 {
            let i = r.random_range(0..table.len() as u64);
            let z: Vec<i64> = (0..2).map(|_| r.random_range(-2..=2)).collect();
            let coarse_pt = p.coarse().generator().mul_int_vec(&z);
            let base: Vec<f64> = table
                .representative(i)
                .unwrap()
                .iter()
                .zip(&coarse_pt)
                .map(|(a, b)| a + b)
                .collect();
            let noise: Vec<f64> = (0..2).map(|_| r.random_range(-0.45..0.45)).collect();
            let y: Vec<f64> = base.iter().zip(&noise).map(|(a, b)| a + b).collect();
            let fine_q = p.fine().cvp(&y).unwrap();
            if fine_q.coords() == &base[..] {
                assert_eq!(p.decode_coset(&y).unwrap(), i);
            }
        }
    }

    #[test]
    fn min_coset_distance_is_twice_fine_packing_radius() {
        for (kind, diag) in [
            (LatticeKind::Zn(1), vec![4u64]),
            (LatticeKind::Zn(2), vec![2, 2]),
            (LatticeKind::A2, vec![2, 2]),
            (LatticeKind::A2, vec![4, 4]),
            (LatticeKind::D3, vec![2, 2, 2]),
            (LatticeKind::D4, vec![2, 2, 2, 2]),
            (LatticeKind::E8, vec![2; 8]),
        ] {
            let p = pair(kind, 1.0, &diag);
            let table = CosetTable::build(&p, DEFAULT_COSET_CAP).unwrap();
            let min = table.min_coset_distance(&p).unwrap().unwrap();
            let expect = 2.0 * p.fine().r_pack();
            assert!(
                (min - expect).abs() < 1e-9,
                "{kind:?} {diag:?}: min coset distance {min}, expected {expect}"
            );
        }
    }
}
