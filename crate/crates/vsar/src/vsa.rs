//! Phase-domain hypervector algebra.
//!
//! Vectors are stored as complex spectra. Atomic vectors are phase-only
//! (unit modulus per entry); superpositions keep their raw complex sums and
//! are never renormalized implicitly. The real-valued view of a vector is
//! its inverse DFT, under which binding becomes circular convolution.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;

use crate::error::{Result, VsaError};

/// A d-dimensional complex hypervector.
#[derive(Debug, Clone, PartialEq)]
pub struct HdVector {
    entries: Vec<Complex64>,
}

impl HdVector {
    pub fn from_entries(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(VsaError::InvalidDimension);
        }
        Ok(Self { entries })
    }

    /// Builds a phase-only vector from a slice of phases (radians).
    pub fn from_phases(phases: &[f64]) -> Result<Self> {
        if phases.is_empty() {
            return Err(VsaError::InvalidDimension);
        }
        Ok(Self {
            entries: phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect(),
        })
    }

    /// The binding identity: every phase is zero.
    pub fn identity(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(VsaError::InvalidDimension);
        }
        Ok(Self {
            entries: vec![Complex64::new(1.0, 0.0); d],
        })
    }

    /// All-zero vector. Useful as an absent-slot filler in grid sums.
    pub fn zero(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(VsaError::InvalidDimension);
        }
        Ok(Self {
            entries: vec![Complex64::new(0.0, 0.0); d],
        })
    }

    /// Samples a random atomic vector with phases i.i.d. uniform on (-pi, pi].
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Self> {
        if d == 0 {
            return Err(VsaError::InvalidDimension);
        }
        let phases: Vec<f64> = (0..d).map(|_| rng.gen_range(-PI..PI)).collect();
        Self::from_phases(&phases)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn phases(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.arg()).collect()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(VsaError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    /// Binding: elementwise complex multiplication (phase addition for
    /// phase-only inputs, circular convolution in the real-domain view).
    pub fn bind(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// Exact binding inverse: elementwise complex reciprocal.
    /// Entrywise complex conjugate. For unit-modulus vectors this equals
    /// the exact inverse; for bundles it acts as a magnitude-weighted
    /// unbinding that avoids amplifying near-zero entries.
    pub fn conjugate(&self) -> Self {
        HdVector {
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let mut entries = Vec::with_capacity(self.dim());
        for (i, z) in self.entries.iter().enumerate() {
            if z.norm_sqr() == 0.0 {
                return Err(VsaError::SingularEntry(i));
            }
            entries.push(z.inv());
        }
        Ok(Self { entries })
    }

    /// Unbinding: `inverse(self) ∘ other`.
    pub fn unbind(&self, other: &Self) -> Result<Self> {
        self.inverse()?.bind(other)
    }

    /// Fractional binding power: `|z|^x · e^{i·x·arg(z)}` per entry.
    pub fn pow(&self, x: f64) -> Result<Self> {
        let mut entries = Vec::with_capacity(self.dim());
        for (i, z) in self.entries.iter().enumerate() {
            let r = z.norm();
            if r == 0.0 {
                if x > 0.0 {
                    entries.push(Complex64::new(0.0, 0.0));
                    continue;
                } else if x == 0.0 {
                    entries.push(Complex64::new(1.0, 0.0));
                    continue;
                }
                return Err(VsaError::SingularEntry(i));
            }
            entries.push(Complex64::from_polar(r.powf(x), z.arg() * x));
        }
        Ok(Self { entries })
    }

    /// Bundling: elementwise complex sum. With `normalize` set, every entry
    /// of the sum is projected back to unit modulus; entries that cancel to
    /// exactly zero are mapped to phase 0.
    pub fn bundle(vectors: &[&HdVector], normalize: bool) -> Result<Self> {
        let first = *vectors.first().ok_or(VsaError::EmptyBundle)?;
        let d = first.dim();
        let mut sum = vec![Complex64::new(0.0, 0.0); d];
        for v in vectors {
            first.check_dim(v)?;
            for (s, z) in sum.iter_mut().zip(&v.entries) {
                *s += z;
            }
        }
        let mut out = Self { entries: sum };
        if normalize {
            out = out.normalized();
        }
        Ok(out)
    }

    /// Weighted elementwise sum, used by attention-style superpositions.
    pub fn weighted_sum(terms: &[(f64, &HdVector)]) -> Result<Self> {
        let (_, first) = *terms.first().ok_or(VsaError::EmptyBundle)?;
        let d = first.dim();
        let mut sum = vec![Complex64::new(0.0, 0.0); d];
        for (w, v) in terms {
            first.check_dim(v)?;
            if *w == 0.0 {
                continue;
            }
            for (s, z) in sum.iter_mut().zip(&v.entries) {
                *s += w * z;
            }
        }
        Ok(Self { entries: sum })
    }

    /// Projects every entry to unit modulus; exact-zero entries become phase 0.
    pub fn normalized(&self) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|z| {
                    let r = z.norm();
                    if r == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        z / r
                    }
                })
                .collect(),
        }
    }

    pub fn scale(&self, w: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| w * z).collect(),
        }
    }

    fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Cosine similarity `Re(<a, b>) / (|a||b|)`. For phase-only inputs this
    /// equals the mean of `cos(theta_i - phi_i)`.
    pub fn similarity(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        let na = self.norm();
        let nb = other.norm();
        if na == 0.0 || nb == 0.0 {
            return Err(VsaError::UndefinedSimilarity);
        }
        let dot: f64 = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        Ok(dot / (na * nb))
    }

    /// Inverse DFT of the spectrum (convention: 1/d on the inverse transform).
    /// Binding of spectra corresponds to circular convolution of these views.
    pub fn to_time_domain(&self) -> Vec<Complex64> {
        let d = self.dim();
        let mut buf = self.entries.clone();
        let mut planner = FftPlanner::new();
        planner.plan_fft_inverse(d).process(&mut buf);
        let scale = 1.0 / d as f64;
        for z in &mut buf {
            *z *= scale;
        }
        buf
    }

    /// Real part of the inverse DFT. Exact as an HRR view only when the
    /// spectrum is conjugate-symmetric, which is not enforced here.
    pub fn to_real_domain(&self) -> Vec<f64> {
        self.to_time_domain().into_iter().map(|z| z.re).collect()
    }
}

/// Argmax cleanup: index of the codebook entry most similar to `query`.
pub fn cleanup_index(query: &HdVector, book: &[HdVector]) -> Result<usize> {
    if book.is_empty() {
        return Err(VsaError::EmptyBundle);
    }
    let mut best = 0;
    let mut best_sim = f64::NEG_INFINITY;
    for (i, entry) in book.iter().enumerate() {
        let s = query.similarity(entry)?;
        if s > best_sim {
            best_sim = s;
            best = i;
        }
    }
    Ok(best)
}

/// Circular convolution of two complex sequences (direct form, test oracle).
pub fn circular_convolution(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let d = a.len();
    assert_eq!(d, b.len());
    let mut out = vec![Complex64::new(0.0, 0.0); d];
    for n in 0..d {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..d {
            acc += a[m] * b[(n + d - m) % d];
        }
        out[n] = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const D: usize = 3000;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn rv(seed: u64) -> HdVector {
        HdVector::random(D, &mut rng(seed)).unwrap()
    }

    #[test]
    fn random_is_deterministic_per_seed() {
        assert_eq!(rv(7), rv(7));
    }

    #[test]
    fn random_rejects_zero_dimension() {
        assert!(matches!(
            HdVector::random(0, &mut rng(1)),
            Err(VsaError::InvalidDimension)
        ));
    }

    #[test]
    fn random_single_dimension_is_unit_modulus() {
        let v = HdVector::random(1, &mut rng(3)).unwrap();
        assert!((v.entries()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn independent_vectors_are_pseudo_orthogonal() {
        // std of the similarity is ~1/sqrt(2d) ~ 0.013; 0.1 is ~7.7 sigma.
        for seed in 0..100u64 {
            let a = rv(2 * seed);
            let b = rv(2 * seed + 1);
            assert!(a.similarity(&b).unwrap().abs() < 0.1, "seed {seed}");
        }
    }

    #[test]
    fn bind_identity_and_inverse() {
        let a = rv(11);
        let id = HdVector::identity(D).unwrap();
        let bound = a.bind(&id).unwrap();
        assert!(bound.similarity(&a).unwrap() > 1.0 - 1e-12);
        let cancelled = a.bind(&a.inverse().unwrap()).unwrap();
        assert!(cancelled.similarity(&id).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn bind_dimension_mismatch() {
        let a = rv(1);
        let b = HdVector::random(17, &mut rng(2)).unwrap();
        assert!(matches!(a.bind(&b), Err(VsaError::DimensionMismatch(_, _))));
    }

    #[test]
    fn bound_pair_is_dissimilar_to_third() {
        for seed in 0..100u64 {
            let a = rv(3 * seed);
            let b = rv(3 * seed + 1);
            let c = rv(3 * seed + 2);
            let s = a.bind(&b).unwrap().similarity(&c).unwrap();
            assert!(s.abs() < 0.1, "seed {seed}: {s}");
        }
    }

    #[test]
    fn bind_is_commutative_and_associative() {
        let (a, b, c) = (rv(21), rv(22), rv(23));
        let ab = a.bind(&b).unwrap();
        let ba = b.bind(&a).unwrap();
        assert!(ab.similarity(&ba).unwrap() > 1.0 - 1e-12);
        let left = ab.bind(&c).unwrap();
        let right = a.bind(&b.bind(&c).unwrap()).unwrap();
        assert!(left.similarity(&right).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn binding_preserves_similarity() {
        let (a, b, c) = (rv(31), rv(32), rv(33));
        let base = a.similarity(&b).unwrap();
        let bound = c.bind(&a).unwrap().similarity(&c.bind(&b).unwrap()).unwrap();
        assert!((base - bound).abs() < 1e-9);
    }

    #[test]
    fn bundle_singleton_is_identity_map() {
        let a = rv(41);
        let bundled = HdVector::bundle(&[&a], true).unwrap();
        assert!(bundled.similarity(&a).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn bundle_of_two_sits_at_forty_five_degrees() {
        let a = rv(42);
        let b = rv(43);
        let s = HdVector::bundle(&[&a, &b], false).unwrap().similarity(&a).unwrap();
        assert!((s - 0.5f64.sqrt()).abs() < 0.05, "{s}");
    }

    #[test]
    fn bundle_rejects_empty_list() {
        assert!(matches!(HdVector::bundle(&[], false), Err(VsaError::EmptyBundle)));
    }

    #[test]
    fn bundle_preserves_argmax_retrieval() {
        let book: Vec<HdVector> = (0..12).map(|i| rv(100 + i)).collect();
        for k in 2..=5usize {
            let members: Vec<&HdVector> = book[..k].iter().collect();
            let bundled = HdVector::bundle(&members, false).unwrap();
            // every bundled member beats every non-member
            let member_min = (0..k)
                .map(|i| bundled.similarity(&book[i]).unwrap())
                .fold(f64::MAX, f64::min);
            let outside_max = (k..12)
                .map(|i| bundled.similarity(&book[i]).unwrap())
                .fold(f64::MIN, f64::max);
            assert!(member_min > outside_max, "k={k}");
        }
    }

    #[test]
    fn inverse_is_involutive_and_unbinds() {
        let a = rv(51);
        let b = rv(52);
        let id = HdVector::identity(D).unwrap();
        assert!(id.inverse().unwrap().similarity(&id).unwrap() > 1.0 - 1e-12);
        assert!(a.inverse().unwrap().inverse().unwrap().similarity(&a).unwrap() > 1.0 - 1e-12);
        let recovered = a.inverse().unwrap().bind(&a.bind(&b).unwrap()).unwrap();
        assert!(recovered.similarity(&b).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn inverse_rejects_zero_entry() {
        let v = HdVector::zero(4).unwrap();
        assert!(matches!(v.inverse(), Err(VsaError::SingularEntry(_))));
    }

    #[test]
    fn unbind_recovers_bound_filler() {
        let a = rv(61);
        let b = rv(62);
        let id = HdVector::identity(D).unwrap();
        assert!(a.unbind(&a.bind(&b).unwrap()).unwrap().similarity(&b).unwrap() > 1.0 - 1e-12);
        assert!(id.unbind(&b).unwrap().similarity(&b).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn unbind_recovers_from_noisy_superposition() {
        let (a, c, x, y) = (rv(71), rv(72), rv(73), rv(74));
        let book: Vec<HdVector> = (200..210).map(rv).chain([x.clone()]).collect();
        let mix = HdVector::bundle(&[&a.bind(&x).unwrap(), &c.bind(&y).unwrap()], false).unwrap();
        let est = a.unbind(&mix).unwrap();
        assert_eq!(cleanup_index(&est, &book).unwrap(), book.len() - 1);
    }

    #[test]
    fn similarity_basics() {
        let a = rv(81);
        assert!((a.similarity(&a).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            a.similarity(&HdVector::zero(D).unwrap()),
            Err(VsaError::UndefinedSimilarity)
        ));
    }

    #[test]
    fn phase_and_complex_similarity_formulas_agree() {
        let a = rv(91);
        let b = rv(92);
        let complex_sim = a.similarity(&b).unwrap();
        let phase_sim: f64 = a
            .phases()
            .iter()
            .zip(b.phases())
            .map(|(t, p)| (t - p).cos())
            .sum::<f64>()
            / D as f64;
        assert!((complex_sim - phase_sim).abs() < 1e-12);
    }

    #[test]
    fn time_domain_of_identity_is_impulse() {
        let id = HdVector::identity(64).unwrap();
        let x = id.to_time_domain();
        assert!((x[0].re - 1.0).abs() < 1e-12);
        for z in &x[1..] {
            assert!(z.norm() < 1e-12);
        }
    }

    #[test]
    fn time_domain_similarity_matches_phase_domain() {
        // Parseval: the inverse DFT is unitary up to the 1/d convention.
        for seed in 0..20u64 {
            let a = HdVector::random(256, &mut rng(300 + seed)).unwrap();
            let b = HdVector::random(256, &mut rng(400 + seed)).unwrap();
            let spectral = a.similarity(&b).unwrap();
            let (xa, xb) = (a.to_time_domain(), b.to_time_domain());
            let dot: f64 = xa.iter().zip(&xb).map(|(p, q)| (p * q.conj()).re).sum();
            let na: f64 = xa.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let nb: f64 = xb.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((spectral - dot / (na * nb)).abs() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn binding_is_convolution_in_time_domain() {
        let a = HdVector::random(128, &mut rng(501)).unwrap();
        let b = HdVector::random(128, &mut rng(502)).unwrap();
        let direct = circular_convolution(&a.to_time_domain(), &b.to_time_domain());
        let via_bind = a.bind(&b).unwrap().to_time_domain();
        for (p, q) in direct.iter().zip(&via_bind) {
            assert!((p - q).norm() < 1e-9);
        }
    }
}
