//! Point sequences for the empirical harness: van der Corput radical
//! inverses, Halton points, counter-based iid uniforms, and the two
//! randomizations (modulo-1 shifts and nested base-2 digit scrambling).
//!
//! Every generator is stateless given `(index, seed)`: point `i` is
//! computable without generating points `1..i-1`, so callers may fan work
//! out across threads freely.

use super::QuadratureError;

/// Weyl increment used by the splitmix-style mixing below.
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Bases for [`PointSequence::halton`]; dimensions beyond this are refused.
const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Number of scrambled digits kept by the base-2 scrambler.
const SCRAMBLE_DIGITS: u32 = 32;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based seed split: stream `stream` of master seed `master`.
/// Distinct streams give decorrelated 64-bit seeds, reproducibly.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    mix64(master.wrapping_add(stream.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

#[inline]
fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Radical inverse of `index` in the given base: the digits of `index` are
/// mirrored across the radix point. `index = 0` maps to `0.0`; the harness
/// indexes points from 1, so the zero point never appears in a sequence.
pub fn van_der_corput(index: u64, base: u32) -> Result<f64, QuadratureError> {
    if base < 2 {
        return Err(QuadratureError::BaseTooSmall { base });
    }
    Ok(radical_inverse(index, base))
}

fn radical_inverse(index: u64, base: u32) -> f64 {
    if base == 2 {
        // digit reversal is a bit reversal; exact because the reversed
        // value has at most as many significant bits as the index
        return (index.reverse_bits() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    }
    let b = base as u64;
    let inv_b = 1.0 / base as f64;
    let mut i = index;
    let mut scale = inv_b;
    let mut x = 0.0;
    while i > 0 {
        x += (i % b) as f64 * scale;
        i /= b;
        scale *= inv_b;
    }
    x
}

/// Nested uniform digit scrambling in base 2 of the first
/// [`SCRAMBLE_DIGITS`] digits. The flip applied to digit `k` depends on the
/// original first `k` digits (the node of the binary scrambling tree), so
/// the dyadic net structure is preserved while each output point becomes
/// marginally uniform.
fn owen_scramble_base2(index: u64, seed: u64) -> f64 {
    assert!(
        index < 1 << 32,
        "scrambled_base2 supports indices below 2^32, got {index}"
    );
    let rev = (index as u32).reverse_bits();
    let mut out: u32 = 0;
    for k in 0..SCRAMBLE_DIGITS {
        let prefix = if k == 0 { 0 } else { rev >> (SCRAMBLE_DIGITS - k) };
        let node = ((k as u64) << 32) | prefix as u64;
        let flip = (derive_seed(seed, node) & 1) as u32;
        let bit = (rev >> (SCRAMBLE_DIGITS - 1 - k)) & 1;
        out = (out << 1) | (bit ^ flip);
    }
    out as f64 * (1.0 / (1u64 << 32) as f64)
}

#[derive(Debug, Clone)]
enum SequenceKind {
    VanDerCorput { base: u32 },
    Halton { bases: Vec<u32> },
    IidUniform { seed: u64 },
    Shifted {
        base: Box<PointSequence>,
        shift: Vec<f64>,
        /// Present when the shift was derived from a seed; fixed-vector
        /// shifts are deterministic and cannot be re-randomized.
        seed: Option<u64>,
    },
    ScrambledBase2 { seed: u64 },
}

/// A point sequence on `[0, 1)^d`, deterministic given its kind and seed.
#[derive(Debug, Clone)]
pub struct PointSequence {
    kind: SequenceKind,
    dimension: usize,
}

impl PointSequence {
    /// 1-d van der Corput sequence in the given base (first point is `1/b`).
    pub fn van_der_corput(base: u32) -> Result<Self, QuadratureError> {
        if base < 2 {
            return Err(QuadratureError::BaseTooSmall { base });
        }
        Ok(Self { kind: SequenceKind::VanDerCorput { base }, dimension: 1 })
    }

    /// Halton sequence using the first `dims` primes as bases.
    pub fn halton(dims: usize) -> Result<Self, QuadratureError> {
        if dims == 0 || dims > PRIMES.len() {
            return Err(QuadratureError::UnsupportedDimension { dimension: dims });
        }
        Ok(Self {
            kind: SequenceKind::Halton { bases: PRIMES[..dims].to_vec() },
            dimension: dims,
        })
    }

    /// Counter-based iid uniforms: point `i` is a pure function of
    /// `(seed, i)`, identical across runs and platforms.
    pub fn iid_uniform(dimension: usize, seed: u64) -> Result<Self, QuadratureError> {
        if dimension == 0 {
            return Err(QuadratureError::UnsupportedDimension { dimension });
        }
        Ok(Self { kind: SequenceKind::IidUniform { seed }, dimension })
    }

    /// Modulo-1 addition of one uniform vector drawn from `seed`.
    pub fn random_shift(self, seed: u64) -> Result<Self, QuadratureError> {
        if self.is_randomized() {
            return Err(QuadratureError::AlreadyRandomized);
        }
        let d = self.dimension;
        let shift: Vec<f64> = (0..d as u64)
            .map(|j| unit_f64(derive_seed(seed, j)))
            .collect();
        Ok(Self {
            dimension: d,
            kind: SequenceKind::Shifted { base: Box::new(self), shift, seed: Some(seed) },
        })
    }

    /// Modulo-1 addition of an explicit vector (deterministic; mainly for
    /// checks like "a zero shift reproduces the base sequence").
    pub fn shifted_by(self, shift: Vec<f64>) -> Result<Self, QuadratureError> {
        if shift.len() != self.dimension {
            return Err(QuadratureError::DimensionMismatch {
                sequence: self.dimension,
                integrand: shift.len(),
            });
        }
        if self.is_randomized() {
            return Err(QuadratureError::AlreadyRandomized);
        }
        if shift.iter().any(|s| !(0.0..1.0).contains(s)) {
            return Err(QuadratureError::ShiftOutOfRange);
        }
        Ok(Self {
            dimension: shift.len(),
            kind: SequenceKind::Shifted { base: Box::new(self), shift, seed: None },
        })
    }

    /// Owen-scrambled base-2 van der Corput sequence (1-d, 32 digits).
    pub fn scrambled_base2(seed: u64) -> Self {
        Self { kind: SequenceKind::ScrambledBase2 { seed }, dimension: 1 }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Whether points depend on a seed (and so can be re-randomized).
    pub fn is_randomized(&self) -> bool {
        match &self.kind {
            SequenceKind::VanDerCorput { .. } | SequenceKind::Halton { .. } => false,
            SequenceKind::IidUniform { .. } | SequenceKind::ScrambledBase2 { .. } => true,
            SequenceKind::Shifted { seed, .. } => seed.is_some(),
        }
    }

    /// The same construction under a fresh seed; `None` for deterministic
    /// kinds.
    pub fn with_seed(&self, seed: u64) -> Option<Self> {
        match &self.kind {
            SequenceKind::VanDerCorput { .. } | SequenceKind::Halton { .. } => None,
            SequenceKind::IidUniform { .. } => {
                Some(Self { kind: SequenceKind::IidUniform { seed }, dimension: self.dimension })
            }
            SequenceKind::ScrambledBase2 { .. } => Some(Self::scrambled_base2(seed)),
            SequenceKind::Shifted { base, seed: Some(_), .. } => {
                base.as_ref().clone().random_shift(seed).ok()
            }
            SequenceKind::Shifted { seed: None, .. } => None,
        }
    }

    /// Short generator name used in reports (`vdc2`, `halton2`, `iid`,
    /// `shifted_vdc2`, `scrambled_vdc`, ...).
    pub fn label(&self) -> String {
        match &self.kind {
            SequenceKind::VanDerCorput { base } => format!("vdc{base}"),
            SequenceKind::Halton { bases } => format!("halton{}", bases.len()),
            SequenceKind::IidUniform { .. } => {
                if self.dimension == 1 {
                    "iid".to_string()
                } else {
                    format!("iid{}", self.dimension)
                }
            }
            SequenceKind::Shifted { base, .. } => format!("shifted_{}", base.label()),
            SequenceKind::ScrambledBase2 { .. } => "scrambled_vdc".to_string(),
        }
    }

    /// Writes point `index` (1-based) into `out`, which must have length
    /// [`Self::dimension`]. Every coordinate lies in `[0, 1)`.
    pub fn point_into(&self, index: u64, out: &mut [f64]) {
        assert_eq!(out.len(), self.dimension, "output buffer has wrong dimension");
        assert!(index >= 1, "points are indexed from 1");
        match &self.kind {
            SequenceKind::VanDerCorput { base } => {
                out[0] = radical_inverse(index, *base);
            }
            SequenceKind::Halton { bases } => {
                for (o, &b) in out.iter_mut().zip(bases) {
                    *o = radical_inverse(index, b);
                }
            }
            SequenceKind::IidUniform { seed } => {
                let d = self.dimension as u64;
                for (j, o) in out.iter_mut().enumerate() {
                    let counter = index.wrapping_mul(d).wrapping_add(j as u64);
                    *o = unit_f64(derive_seed(*seed, counter));
                }
            }
            SequenceKind::Shifted { base, shift, .. } => {
                base.point_into(index, out);
                for (o, s) in out.iter_mut().zip(shift) {
                    let v = *o + s;
                    *o = if v >= 1.0 { v - 1.0 } else { v };
                }
            }
            SequenceKind::ScrambledBase2 { seed } => {
                out[0] = owen_scramble_base2(index, *seed);
            }
        }
    }

    /// Convenience allocating form of [`Self::point_into`].
    pub fn point(&self, index: u64) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        self.point_into(index, &mut out);
        out
    }
}

/// A randomized sequence template plus a master seed: replicate `r` is the
/// template reseeded with the `r`-th derived seed. Construction rejects
/// deterministic templates, for which "independent replicates" would all be
/// the same realization.
#[derive(Debug, Clone)]
pub struct ReplicatedSequence {
    template: PointSequence,
    master_seed: u64,
}

impl ReplicatedSequence {
    pub fn new(template: PointSequence, master_seed: u64) -> Result<Self, QuadratureError> {
        if !template.is_randomized() {
            return Err(QuadratureError::DeterministicSequence);
        }
        Ok(Self { template, master_seed })
    }

    pub fn replicate(&self, r: u32) -> PointSequence {
        self.template
            .with_seed(derive_seed(self.master_seed, r as u64))
            .expect("template verified randomized at construction")
    }

    pub fn template(&self) -> &PointSequence {
        &self.template
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_hand_values() {
        assert_eq!(van_der_corput(1, 2).unwrap(), 0.5);
        assert_eq!(van_der_corput(3, 2).unwrap(), 0.75);
        // 5 = 12 in base 3, mirrored: 0.21_3 = 2/3 + 1/9 = 7/9
        assert!((van_der_corput(5, 3).unwrap() - 7.0 / 9.0).abs() < 1e-15);
        assert_eq!(van_der_corput(0, 2).unwrap(), 0.0);
        assert!(matches!(
            van_der_corput(1, 1),
            Err(QuadratureError::BaseTooSmall { .. })
        ));
    }

    #[test]
    fn base2_fast_path_matches_generic_loop() {
        for i in [1u64, 2, 3, 4, 5, 100, 1023, 1024, 4095, 123_456_789] {
            let fast = radical_inverse(i, 2);
            // generic digit loop, forced past the base-2 shortcut
            let mut x = 0.0;
            let mut scale = 0.5;
            let mut n = i;
            while n > 0 {
                x += (n % 2) as f64 * scale;
                n /= 2;
                scale *= 0.5;
            }
            assert_eq!(fast, x, "index {i}");
        }
    }

    #[test]
    fn first_vdc2_points() {
        let seq = PointSequence::van_der_corput(2).unwrap();
        let got: Vec<f64> = (1..=4).map(|i| seq.point(i)[0]).collect();
        assert_eq!(got, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn vdc2_stratifies_dyadic_intervals() {
        // first 2^k points occupy each interval [j 2^-k, (j+1) 2^-k) once
        let seq = PointSequence::van_der_corput(2).unwrap();
        for k in 1..=12u32 {
            let n = 1u64 << k;
            let mut seen = vec![false; n as usize];
            for i in 1..=n {
                let cell = (seq.point(i)[0] * n as f64) as usize;
                assert!(!seen[cell], "k={k}: cell {cell} hit twice");
                seen[cell] = true;
            }
        }
    }

    #[test]
    fn halton_uses_prime_bases() {
        let seq = PointSequence::halton(2).unwrap();
        let p1 = seq.point(1);
        assert_eq!(p1, vec![0.5, 1.0 / 3.0]);
        let p5 = seq.point(5);
        assert!((p5[0] - 0.625).abs() < 1e-15);
        assert!((p5[1] - 7.0 / 9.0).abs() < 1e-15);
        assert!(PointSequence::halton(0).is_err());
        assert!(PointSequence::halton(17).is_err());
    }

    #[test]
    fn iid_is_reproducible_and_in_range() {
        let a = PointSequence::iid_uniform(3, 42).unwrap();
        let b = PointSequence::iid_uniform(3, 42).unwrap();
        let c = PointSequence::iid_uniform(3, 43).unwrap();
        for i in 1..=200 {
            let pa = a.point(i);
            assert_eq!(pa, b.point(i));
            assert!(pa.iter().all(|x| (0.0..1.0).contains(x)));
            assert_ne!(pa, c.point(i), "different seeds must differ somewhere");
        }
    }

    #[test]
    fn zero_shift_reproduces_base() {
        let base = PointSequence::van_der_corput(2).unwrap();
        let shifted = base.clone().shifted_by(vec![0.0]).unwrap();
        for i in 1..=64 {
            assert_eq!(base.point(i), shifted.point(i));
        }
    }

    #[test]
    fn shift_wraps_into_unit_interval() {
        let base = PointSequence::van_der_corput(2).unwrap();
        let seq = base.random_shift(7).unwrap();
        for i in 1..=512 {
            let x = seq.point(i)[0];
            assert!((0.0..1.0).contains(&x), "point {i} = {x}");
        }
        assert!(seq.is_randomized());
    }

    #[test]
    fn scrambled_points_reproducible_per_seed_and_in_range() {
        let a = PointSequence::scrambled_base2(5);
        let b = PointSequence::scrambled_base2(5);
        let c = PointSequence::scrambled_base2(6);
        let mut differs = false;
        for i in 1..=256 {
            let xa = a.point(i)[0];
            assert_eq!(xa, b.point(i)[0]);
            assert!((0.0..1.0).contains(&xa));
            differs |= xa != c.point(i)[0];
        }
        assert!(differs);
    }

    #[test]
    fn scrambling_preserves_dyadic_net_structure() {
        // first 2^k points still partition the level-k dyadic intervals,
        // one point each, for every seed
        for seed in [0u64, 1, 42, 0xDEAD_BEEF] {
            let seq = PointSequence::scrambled_base2(seed);
            for k in 1..=8u32 {
                let n = 1u64 << k;
                let mut seen = vec![false; n as usize];
                for i in 1..=n {
                    let cell = (seq.point(i)[0] * n as f64) as usize;
                    assert!(!seen[cell], "seed={seed} k={k}: cell {cell} hit twice");
                    seen[cell] = true;
                }
            }
        }
    }

    #[test]
    fn scrambled_point_is_marginally_uniform() {
        // fix an index, vary the seed: the scrambled point should look
        // uniform; check the mean and a coarse histogram
        let n_seeds = 4000u64;
        let mut mean = 0.0;
        let mut hist = [0u32; 4];
        for s in 0..n_seeds {
            let x = PointSequence::scrambled_base2(derive_seed(9, s)).point(5)[0];
            mean += x;
            hist[(x * 4.0) as usize] += 1;
        }
        mean /= n_seeds as f64;
        // 3 sigma of a U(0,1) mean over 4000 draws is ~0.0137
        assert!((mean - 0.5).abs() < 0.015, "mean = {mean}");
        for (q, &c) in hist.iter().enumerate() {
            let frac = c as f64 / n_seeds as f64;
            assert!((frac - 0.25).abs() < 0.03, "quartile {q}: {frac}");
        }
    }

    #[test]
    fn replicates_need_randomized_template() {
        let det = PointSequence::van_der_corput(2).unwrap();
        assert!(matches!(
            ReplicatedSequence::new(det, 1),
            Err(QuadratureError::DeterministicSequence)
        ));
        let factory =
            ReplicatedSequence::new(PointSequence::scrambled_base2(0), 42).unwrap();
        let r0 = factory.replicate(0);
        let r1 = factory.replicate(1);
        assert_ne!(r0.point(1), r1.point(1));
        // replication is itself reproducible
        let again = factory.replicate(0);
        assert_eq!(r0.point(17), again.point(17));
    }

    #[test]
    fn derived_seeds_differ_across_streams() {
        let a = derive_seed(42, 0);
        let b = derive_seed(42, 1);
        let c = derive_seed(43, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(42, 0));
    }
}
