//! Semantic atomic-vector codecs: numeric (fractional power encoding),
//! circular (periodic), boolean (period 2), plus the logic gates built on
//! boolean vectors.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, VsaError};
use crate::vsa::HdVector;

/// Fractional power encoder over a random phase-only base vector.
///
/// `encode(x1).bind(encode(x2)) == encode(x1 + x2)` up to float rounding,
/// and `encode(0)` is exactly the identity.
#[derive(Debug, Clone)]
pub struct NumericCodec {
    base_phases: Vec<f64>,
    d: usize,
}

impl NumericCodec {
    pub fn new<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Self> {
        if d == 0 {
            return Err(VsaError::InvalidDimension);
        }
        let base_phases = (0..d).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
        Ok(Self { base_phases, d })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn base(&self) -> HdVector {
        HdVector::from_phases(&self.base_phases).expect("d > 0")
    }

    pub fn encode(&self, x: f64) -> Result<HdVector> {
        if !x.is_finite() {
            return Err(VsaError::NonFiniteInput(x));
        }
        if x == 0.0 {
            return HdVector::identity(self.d);
        }
        HdVector::from_phases(&self.base_phases.iter().map(|t| t * x).collect::<Vec<_>>())
    }
}

/// Periodic encoder: base phases are multiples of 2π/L, so integer inputs
/// that differ by the period map to bitwise-identical vectors.
///
/// Phases are stored as integer steps over a common denominator; the
/// modular reduction happens in integer arithmetic, which is what makes
/// the periodicity exact rather than approximate.
#[derive(Debug, Clone)]
pub struct CircularCodec {
    steps: Vec<u64>,
    denom: u64,
    period: u64,
    d: usize,
}

impl CircularCodec {
    /// For even L the phases are sampled from {2πj/L : j = 1..L}.
    /// For odd L a period-2L base is squared (every second vector of the
    /// doubled codec), which lands on the same phase set while keeping the
    /// integer-step representation closed under the period.
    pub fn new<R: Rng + ?Sized>(period: u64, d: usize, rng: &mut R) -> Result<Self> {
        if d == 0 {
            return Err(VsaError::InvalidDimension);
        }
        if period == 0 {
            return Err(VsaError::InvalidPeriod);
        }
        let (steps, denom) = if period % 2 == 0 {
            let steps = (0..d).map(|_| rng.gen_range(1..=period) % period).collect();
            (steps, period)
        } else {
            let denom = 2 * period;
            let steps = (0..d)
                .map(|_| (2 * rng.gen_range(1..=denom)) % denom)
                .collect();
            (steps, denom)
        };
        Ok(Self { steps, denom, period, d })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    /// Exact integer encoding; encode_int(r + kL) is bitwise equal to
    /// encode_int(r).
    pub fn encode_int(&self, r: i64) -> HdVector {
        let denom = self.denom as i64;
        let res = r.rem_euclid(denom) as u64;
        let entries: Vec<Complex64> = self
            .steps
            .iter()
            .map(|&s| {
                let idx = (res * s) % self.denom;
                let phase = TAU * idx as f64 / self.denom as f64;
                Complex64::new(phase.cos(), phase.sin())
            })
            .collect();
        HdVector::from_entries(entries).expect("d > 0")
    }

    /// Real-exponent encoding; periodicity holds only for integer inputs.
    pub fn encode(&self, x: f64) -> Result<HdVector> {
        if !x.is_finite() {
            return Err(VsaError::NonFiniteInput(x));
        }
        if x.fract() == 0.0 && x.abs() < 2f64.powi(62) {
            return Ok(self.encode_int(x as i64));
        }
        let phases: Vec<f64> = self
            .steps
            .iter()
            .map(|&s| x * TAU * s as f64 / self.denom as f64)
            .collect();
        HdVector::from_phases(&phases)
    }
}

/// Boolean codec: a period-2 circular codec with `e0` the exact identity
/// and `e1` a random {0, π}-phase vector.
#[derive(Debug, Clone)]
pub struct BooleanCodec {
    inner: CircularCodec,
    e0: HdVector,
    e1: HdVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicOp {
    Not,
    Xor,
    And,
    Or,
}

impl BooleanCodec {
    pub fn new<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Self> {
        let inner = CircularCodec::new(2, d, rng)?;
        let e0 = inner.encode_int(0);
        let e1 = inner.encode_int(1);
        Ok(Self { inner, e0, e1 })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn e0(&self) -> &HdVector {
        &self.e0
    }

    pub fn e1(&self) -> &HdVector {
        &self.e1
    }

    pub fn encode(&self, bit: bool) -> HdVector {
        if bit { self.e1.clone() } else { self.e0.clone() }
    }

    /// Gates from the boolean-vector operation table. Inputs may be noisy
    /// superpositions; no cleanup is applied.
    ///
    /// NOT a   = a ∘ e1
    /// a XOR b = a ∘ b
    /// a AND b = a^(∘ sim(a,b))    (fractional self-binding)
    /// a OR b  = (a XOR b) ∘ (a AND b)
    pub fn logic(&self, op: LogicOp, a: &HdVector, b: Option<&HdVector>) -> Result<HdVector> {
        match op {
            LogicOp::Not => {
                if b.is_some() {
                    return Err(VsaError::LogicArity("NOT takes one operand"));
                }
                a.bind(&self.e1)
            }
            LogicOp::Xor | LogicOp::And | LogicOp::Or => {
                let b = b.ok_or(VsaError::LogicArity("binary op needs two operands"))?;
                match op {
                    LogicOp::Xor => a.bind(b),
                    LogicOp::And => {
                        let s = a.similarity(b)?;
                        a.pow(s)
                    }
                    LogicOp::Or => {
                        let x = a.bind(b)?;
                        let s = a.similarity(b)?;
                        x.bind(&a.pow(s)?)
                    }
                    LogicOp::Not => unreachable!(),
                }
            }
        }
    }
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

    fn wrap(p: f64) -> f64 {
        let mut p = p.rem_euclid(TAU);
        if p > std::f64::consts::PI {
            p -= TAU;
        }
        p
    }

    #[test]
    fn fpe_zero_is_identity() {
        let nv = NumericCodec::new(D, &mut rng(1)).unwrap();
        let id = HdVector::identity(D).unwrap();
        assert_eq!(nv.encode(0.0).unwrap().entries(), id.entries());
    }

    #[test]
    fn fpe_homomorphism_integer_example() {
        let nv = NumericCodec::new(D, &mut rng(2)).unwrap();
        let lhs = nv.encode(2.0).unwrap().bind(&nv.encode(3.0).unwrap()).unwrap();
        let rhs = nv.encode(5.0).unwrap();
        for (a, b) in lhs.phases().iter().zip(rhs.phases().iter()) {
            assert!(wrap(a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn fpe_homomorphism_random_reals() {
        let nv = NumericCodec::new(D, &mut rng(3)).unwrap();
        let mut r = rng(33);
        for _ in 0..50 {
            let a: f64 = r.gen_range(-100.0..100.0);
            let b: f64 = r.gen_range(-100.0..100.0);
            let lhs = nv.encode(a).unwrap().bind(&nv.encode(b).unwrap()).unwrap();
            let rhs = nv.encode(a + b).unwrap();
            for (x, y) in lhs.phases().iter().zip(rhs.phases().iter()) {
                assert!(wrap(x - y).abs() < 1e-9, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn fpe_rejects_non_finite() {
        let nv = NumericCodec::new(D, &mut rng(4)).unwrap();
        assert!(nv.encode(f64::NAN).is_err());
        assert!(nv.encode(f64::INFINITY).is_err());
    }

    #[test]
    fn circular_periodicity_is_bitwise_even_period() {
        let cv = CircularCodec::new(4, D, &mut rng(5)).unwrap();
        for r in -8..=8i64 {
            for k in 1..=3i64 {
                assert_eq!(
                    cv.encode_int(r).entries(),
                    cv.encode_int(r + k * 4).entries()
                );
            }
        }
    }

    #[test]
    fn circular_periodicity_is_bitwise_odd_period() {
        let cv = CircularCodec::new(9, D, &mut rng(6)).unwrap();
        for r in 0..=20i64 {
            assert_eq!(cv.encode_int(r).entries(), cv.encode_int(r + 9).entries());
        }
    }

    #[test]
    fn circular_real_and_integer_paths_agree() {
        let cv = CircularCodec::new(9, D, &mut rng(7)).unwrap();
        let a = cv.encode(4.0).unwrap();
        let b = cv.encode_int(4);
        assert!(a.similarity(&b).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn circular_distinct_residues_pseudo_orthogonal() {
        let cv = CircularCodec::new(4, D, &mut rng(8)).unwrap();
        let s = cv.encode_int(1).similarity(&cv.encode_int(3)).unwrap();
        assert!(s.abs() < 0.1, "sim={s}");
    }

    #[test]
    fn circular_rejects_zero_period() {
        assert!(matches!(
            CircularCodec::new(0, D, &mut rng(9)),
            Err(VsaError::InvalidPeriod)
        ));
    }

    #[test]
    fn boolean_e0_is_identity_and_e1_squares_to_e0() {
        let bv = BooleanCodec::new(D, &mut rng(10)).unwrap();
        let id = HdVector::identity(D).unwrap();
        assert_eq!(bv.e0().entries(), id.entries());
        let sq = bv.e1().bind(bv.e1()).unwrap();
        assert!(sq.similarity(bv.e0()).unwrap() > 1.0 - 1e-12);
        assert!(bv.e0().similarity(bv.e1()).unwrap().abs() < 0.1);
    }

    #[test]
    fn not_gate_is_exact_and_involutive() {
        let bv = BooleanCodec::new(D, &mut rng(11)).unwrap();
        let n0 = bv.logic(LogicOp::Not, bv.e0(), None).unwrap();
        let n1 = bv.logic(LogicOp::Not, bv.e1(), None).unwrap();
        assert_eq!(n0.entries(), bv.e1().entries());
        assert!(n1.similarity(bv.e0()).unwrap() > 1.0 - 1e-12);
        let nn = bv.logic(LogicOp::Not, &n1, None).unwrap();
        assert!(nn.similarity(bv.e1()).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn xor_truth_table_exact() {
        let bv = BooleanCodec::new(D, &mut rng(12)).unwrap();
        for (a, b, out) in [(false, false, false), (false, true, true), (true, false, true), (true, true, false)] {
            let r = bv
                .logic(LogicOp::Xor, &bv.encode(a), Some(&bv.encode(b)))
                .unwrap();
            assert!(r.similarity(&bv.encode(out)).unwrap() > 1.0 - 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn and_truth_table() {
        let bv = BooleanCodec::new(D, &mut rng(13)).unwrap();
        for (a, b, out) in [(false, false, false), (false, true, false), (true, false, false), (true, true, true)] {
            let r = bv
                .logic(LogicOp::And, &bv.encode(a), Some(&bv.encode(b)))
                .unwrap();
            assert!(r.similarity(&bv.encode(out)).unwrap() > 0.99, "{a} {b}");
        }
    }

    #[test]
    fn or_truth_table() {
        let bv = BooleanCodec::new(D, &mut rng(14)).unwrap();
        for (a, b, out) in [(false, false, false), (false, true, true), (true, false, true), (true, true, true)] {
            let r = bv
                .logic(LogicOp::Or, &bv.encode(a), Some(&bv.encode(b)))
                .unwrap();
            assert!(r.similarity(&bv.encode(out)).unwrap() > 0.98, "{a} {b}");
        }
    }

    #[test]
    fn logic_closure_lands_on_a_boolean() {
        let bv = BooleanCodec::new(D, &mut rng(15)).unwrap();
        let pairs = [(false, false), (false, true), (true, false), (true, true)];
        for op in [LogicOp::Xor, LogicOp::And, LogicOp::Or] {
            for (a, b) in pairs {
                let r = bv
                    .logic(op, &bv.encode(a), Some(&bv.encode(b)))
                    .unwrap();
                let s0 = r.similarity(bv.e0()).unwrap();
                let s1 = r.similarity(bv.e1()).unwrap();
                assert!(s0.max(s1) > 0.98, "{op:?} {a} {b}");
            }
        }
    }

    #[test]
    fn logic_arity_errors() {
        let bv = BooleanCodec::new(D, &mut rng(16)).unwrap();
        assert!(bv.logic(LogicOp::Not, bv.e0(), Some(bv.e1())).is_err());
        assert!(bv.logic(LogicOp::Xor, bv.e0(), None).is_err());
        assert!(bv.logic(LogicOp::And, bv.e0(), None).is_err());
    }
}
