//! Lattices and nearest-neighbor quantization.
//!
//! A lattice is the set `{ G z : z integer vector }` for a full-rank
//! generator `G`. This module provides the five quantizer lattices used by
//! the embedding schemes — `Z^N`, the hexagonal `A2`, the checkerboard `D3`
//! and `D4`, and the Gosset lattice `E8` — together with their geometric
//! constants (packing radius, covering radius, normalized second moment,
//! cell volume), exact closest-vector decoders, and modulo reduction into
//! the fundamental Voronoi region.
//!
//! Every closest-vector operation resolves exact distance ties the same
//! way: among equidistant lattice points the one with lexicographically
//! smallest coordinates wins. Ties have measure zero but occur for real on
//! half-cell inputs, and reversible embedding needs the encoder and decoder
//! to agree on them.

mod decode;
mod enumerate;
mod matrix;

pub use matrix::GeneratorMatrix;

use crate::error::{Error, Result};
use crate::num::{real, Real};

/// The supported lattice families. `Zn` carries its dimension; the others
/// are fixed-dimensional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    /// Cubic integer lattice in `n` dimensions.
    Zn(usize),
    /// Hexagonal lattice (optimal 2-d quantizer).
    A2,
    /// Face-centered cubic lattice, `A3 ≅ D3`.
    D3,
    /// Checkerboard lattice in four dimensions.
    D4,
    /// Gosset lattice in eight dimensions.
    E8,
}

impl LatticeKind {
    pub fn dimension(self) -> usize {
        match self {
            LatticeKind::Zn(n) => n,
            LatticeKind::A2 => 2,
            LatticeKind::D3 => 3,
            LatticeKind::D4 => 4,
            LatticeKind::E8 => 8,
        }
    }

    /// Short label used in CSV reports and CLI flags, e.g. `z2`, `a2`, `e8`.
    pub fn label(self) -> String {
        match self {
            LatticeKind::Zn(n) => format!("z{n}"),
            LatticeKind::A2 => "a2".into(),
            LatticeKind::D3 => "d3".into(),
            LatticeKind::D4 => "d4".into(),
            LatticeKind::E8 => "e8".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "a2" => return Ok(LatticeKind::A2),
            "d3" => return Ok(LatticeKind::D3),
            "d4" => return Ok(LatticeKind::D4),
            "e8" => return Ok(LatticeKind::E8),
            "z" => return Ok(LatticeKind::Zn(1)),
            _ => {}
        }
        if let Some(n) = t.strip_prefix('z').and_then(|d| d.parse::<usize>().ok()) {
            if n >= 1 {
                return Ok(LatticeKind::Zn(n));
            }
        }
        Err(Error::invalid(format!(
            "unknown lattice '{s}' (expected z<N>, a2, d3, d4 or e8)"
        )))
    }
}

/// A point of a lattice, i.e. an integer combination of the basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePoint<F> {
    coords: Vec<F>,
}

impl<F: Real> LatticePoint<F> {
    pub(crate) fn new(coords: Vec<F>) -> Self {
        LatticePoint { coords }
    }

    pub fn coords(&self) -> &[F] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<F> {
        self.coords
    }
}

/// A concrete lattice: a family, a scale, its generator and its geometric
/// constants. The normalized second moment is recorded to the published
/// six-digit precision; packing and covering radii are exact closed forms.
#[derive(Debug, Clone)]
pub struct Lattice<F> {
    kind: LatticeKind,
    scale: F,
    generator: GeneratorMatrix<F>,
    inverse: GeneratorMatrix<F>,
    r_pack: F,
    r_cov: F,
    nsm: F,
    volume: F,
    /// Per-axis steps for the cubic decoder (`Zn` only; allows rectangular
    /// sublattices `diag(a) Z^N` to share the fast path).
    cubic_steps: Option<Vec<F>>,
}

/// Unscaled constants of the base lattices: (r_pack, r_cov, nsm, |det G|).
fn base_constants(kind: LatticeKind) -> (f64, f64, f64, f64) {
    let sqrt2 = 2f64.sqrt();
    let sqrt3 = 3f64.sqrt();
    match kind {
        LatticeKind::Zn(n) => (0.5, 0.5 * (n as f64).sqrt(), 0.083333, 1.0),
        LatticeKind::A2 => (0.5, sqrt3 / 3.0, 0.080188, sqrt3 / 2.0),
        LatticeKind::D3 => (sqrt2 / 2.0, 1.0, 0.078745, 2.0),
        LatticeKind::D4 => (sqrt2 / 2.0, 1.0, 0.076603, 2.0),
        LatticeKind::E8 => (sqrt2 / 2.0, 1.0, 0.071682, 1.0),
    }
}

/// Unscaled generator of the base lattice, row-major.
fn base_generator<F: Real>(kind: LatticeKind) -> GeneratorMatrix<F> {
    let h = 0.5;
    let rows: Vec<f64> = match kind {
        LatticeKind::Zn(n) => {
            return GeneratorMatrix::identity(n);
        }
        LatticeKind::A2 => vec![3f64.sqrt() / 2.0, 0.0, 0.5, 1.0],
        LatticeKind::D3 => vec![-1.0, 1.0, 0.0, -1.0, -1.0, 1.0, 0.0, 0.0, -1.0],
        LatticeKind::D4 => vec![
            2.0, 1.0, 1.0, 1.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
        #[rustfmt::skip]
        LatticeKind::E8 => vec![
            2.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, h,
            0.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0, h,
            0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, h,
            0.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, h,
            0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 0.0, h,
            0.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0, h,
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, h,
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, h,
        ],
    };
    let dim = kind.dimension();
    let entries = rows.into_iter().map(real::<F>).collect();
    GeneratorMatrix::new(dim, entries).expect("base generators are full rank")
}

impl<F: Real> Lattice<F> {
    /// Builds a lattice of the given family scaled by `scale`, i.e. with
    /// generator `scale * G_base`. All radii scale linearly, the volume by
    /// `scale^N`, and the normalized second moment is scale-invariant.
    pub fn new(kind: LatticeKind, scale: F) -> Result<Self> {
        if !(scale > F::zero()) || !scale.is_finite() {
            return Err(Error::invalid(format!(
                "lattice scale must be positive and finite, got {scale}"
            )));
        }
        if kind.dimension() == 0 {
            return Err(Error::invalid("lattice dimension must be at least 1"));
        }
        let dim = kind.dimension();
        let base = base_generator::<F>(kind);
        let entries = base.entries().iter().map(|&e| e * scale).collect();
        let generator = GeneratorMatrix::new(dim, entries)?;
        Self::from_parts(kind, scale, generator)
    }

    /// Builds the rectangular cubic lattice `diag(steps) Z^N`. Used for
    /// coarse lattices produced by unequal nesting diagonals on `Z^N`.
    pub fn rectangular(steps: &[F]) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::invalid("rectangular lattice needs at least 1 axis"));
        }
        for &s in steps {
            if !(s > F::zero()) || !s.is_finite() {
                return Err(Error::invalid("rectangular steps must be positive"));
            }
        }
        let min_step = steps.iter().cloned().fold(F::infinity(), F::min);
        let generator = GeneratorMatrix::diagonal(steps);
        Self::from_parts(LatticeKind::Zn(steps.len()), min_step, generator)
    }

    /// Internal constructor used by nested pairs: the coarse generator is
    /// formed by column-scaling the fine one so that `G_c = G_f J` holds
    /// bit-exactly.
    pub(crate) fn from_parts(
        kind: LatticeKind,
        scale: F,
        generator: GeneratorMatrix<F>,
    ) -> Result<Self> {
        let dim = kind.dimension();
        let inverse = generator.inverse()?;
        let lat = match kind {
            LatticeKind::Zn(_) => {
                let steps: Vec<F> = (0..dim).map(|i| generator.get(i, i)).collect();
                // Cell is the box spanned by the per-axis steps.
                let min_step = steps.iter().cloned().fold(F::infinity(), F::min);
                let sum_sq: F = steps.iter().map(|&s| s * s).sum();
                let volume: F = steps.iter().cloned().fold(F::one(), |a, b| a * b);
                let uniform = steps.iter().all(|&s| s == steps[0]);
                let nsm = if uniform {
                    real(base_constants(kind).2)
                } else {
                    let n = real::<F>(dim as f64);
                    sum_sq / (real::<F>(12.0) * n) / volume.powf(real::<F>(2.0) / n)
                };
                Lattice {
                    kind,
                    scale,
                    r_pack: min_step * real(0.5),
                    r_cov: sum_sq.sqrt() * real(0.5),
                    nsm,
                    volume,
                    cubic_steps: Some(steps),
                    generator,
                    inverse,
                }
            }
            _ => {
                let (r_pack, r_cov, nsm, det) = base_constants(kind);
                let n = real::<F>(dim as f64);
                Lattice {
                    kind,
                    scale,
                    r_pack: real::<F>(r_pack) * scale,
                    r_cov: real::<F>(r_cov) * scale,
                    nsm: real(nsm),
                    volume: real::<F>(det) * scale.powf(n),
                    cubic_steps: None,
                    generator,
                    inverse,
                }
            }
        };
        Ok(lat)
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.kind.dimension()
    }

    /// The base quantization step this lattice was built with.
    pub fn scale(&self) -> F {
        self.scale
    }

    pub fn generator(&self) -> &GeneratorMatrix<F> {
        &self.generator
    }

    /// Packing radius: half the minimum distance between lattice points.
    pub fn r_pack(&self) -> F {
        self.r_pack
    }

    /// Covering radius: largest possible distance from a point to the
    /// lattice.
    pub fn r_cov(&self) -> F {
        self.r_cov
    }

    /// Normalized second moment `G(Λ)` (dimensionless, scale-invariant).
    pub fn nsm(&self) -> F {
        self.nsm
    }

    /// Volume of the fundamental Voronoi cell, `|det G|`.
    pub fn volume(&self) -> F {
        self.volume
    }

    pub(crate) fn cubic_steps(&self) -> Option<&[F]> {
        self.cubic_steps.as_deref()
    }

    pub(crate) fn inverse_generator(&self) -> &GeneratorMatrix<F> {
        &self.inverse
    }

    fn check_dim(&self, x: &[F]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::invalid(format!(
                "vector has dimension {}, lattice expects {}",
                x.len(),
                self.dimension()
            )));
        }
        Ok(())
    }

    /// Nearest-neighbor quantizer: the lattice point minimizing the
    /// Euclidean distance to `x`. Exact ties go to the lexicographically
    /// smallest coordinate vector.
    pub fn cvp(&self, x: &[F]) -> Result<LatticePoint<F>> {
        self.check_dim(x)?;
        Ok(LatticePoint::new(decode::cvp(self, x)))
    }

    /// Exhaustive reference decoder: minimizes over every integer
    /// coefficient vector in the box `[-radius, radius]^N`. Exponential in
    /// the dimension — a test oracle, not a production path.
    pub fn cvp_bruteforce(&self, x: &[F], radius: u32) -> Result<LatticePoint<F>> {
        self.check_dim(x)?;
        Ok(LatticePoint::new(enumerate::bruteforce_box(
            self, x, radius,
        )))
    }

    /// Exhaustive reference decoder over the coordinate characterization of
    /// the lattice (integer / parity / half-integer grids within covering
    /// distance of `x`). Supports the cubic and parity families, where the
    /// minimizer provably lies in the searched box; `A2` has no coordinate
    /// characterization and is rejected. A test oracle like
    /// [`Lattice::cvp_bruteforce`], but usable in high dimension.
    pub fn cvp_ball_search(&self, x: &[F]) -> Result<LatticePoint<F>> {
        self.check_dim(x)?;
        enumerate::ball_search(self, x).map(LatticePoint::new)
    }

    /// Modulo reduction `x - Q(x)` into the fundamental Voronoi region.
    pub fn modulo(&self, x: &[F]) -> Result<Vec<F>> {
        let q = self.cvp(x)?;
        Ok(x.iter()
            .zip(q.coords())
            .map(|(&xi, &qi)| xi - qi)
            .collect())
    }

    /// Whether `x` is a lattice point: solve for the integer coefficients,
    /// round, and accept if the reconstruction residual is negligible.
    pub fn contains(&self, x: &[F]) -> bool {
        if x.len() != self.dimension() {
            return false;
        }
        let z = self.inverse.mul_vec(x);
        let zr: Vec<i64> = z
            .iter()
            .map(|&v| v.round().to_f64().map(|f| f as i64).unwrap_or(0))
            .collect();
        let back = self.generator.mul_int_vec(&zr);
        let tol = F::membership_tol();
        x.iter().zip(&back).all(|(&a, &b)| (a - b).abs() < tol)
    }

    /// Integer coefficients of a lattice point (solve and round). The caller
    /// asserts that `x` is a lattice point; residuals are not re-checked.
    pub(crate) fn coefficients_of(&self, x: &[F]) -> Vec<i64> {
        self.inverse
            .mul_vec(x)
            .iter()
            .map(|&v| {
                v.round()
                    .to_f64()
                    .map(|f| f as i64)
                    .expect("coefficient fits in i64")
            })
            .collect()
    }
}

/// Nearest integer with exact halves rounded toward negative infinity,
/// which is the lexicographic tie rule in one dimension.
#[inline]
pub(crate) fn nearest_int_tie_down<F: Real>(t: F) -> F {
    // ceil(t - 1/2); +0 normalizes a possible negative zero.
    (t - real::<F>(0.5)).ceil() + F::zero()
}

/// Lexicographic strict order on coordinate vectors.
#[inline]
pub(crate) fn lex_less<F: Real>(a: &[F], b: &[F]) -> bool {
    for (&ai, &bi) in a.iter().zip(b) {
        if ai < bi {
            return true;
        }
        if ai > bi {
            return false;
        }
    }
    false
}

#[inline]
pub(crate) fn dist_sq<F: Real>(a: &[F], b: &[F]) -> F {
    let mut acc = F::zero();
    for (&ai, &bi) in a.iter().zip(b) {
        let d = ai - bi;
        acc = acc + d * d;
    }
    acc
}

#[cfg(test)]
mod tests;
