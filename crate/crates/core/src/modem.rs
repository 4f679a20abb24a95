//! Gray-mapped QPSK with unit symbol energy.

use rand::Rng;

use crate::{Complex, Error, Result};

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A symbol drawn from the QPSK alphabet, or any complex value the caller
/// wants to treat as one (for example a zero test symbol).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstellationPoint(Complex);

impl ConstellationPoint {
    pub const fn new(value: Complex) -> Self {
        ConstellationPoint(value)
    }

    pub fn value(&self) -> Complex {
        self.0
    }
}

/// The QPSK alphabet in enumeration order: bit pairs 00, 01, 10, 11.
/// The first bit picks the sign of the real part, the second the sign of the
/// imaginary part.
pub const QPSK: [ConstellationPoint; 4] = [
    ConstellationPoint::new(Complex::new(H, H)),
    ConstellationPoint::new(Complex::new(H, -H)),
    ConstellationPoint::new(Complex::new(-H, H)),
    ConstellationPoint::new(Complex::new(-H, -H)),
];

fn index_of_bits(b0: u8, b1: u8) -> usize {
    ((b0 as usize) << 1) | b1 as usize
}

/// Maps two bits to a QPSK symbol.
pub fn qpsk_modulate(bits: &[u8]) -> Result<ConstellationPoint> {
    if bits.len() != 2 {
        return Err(Error::WrongArity(bits.len()));
    }
    if let Some(&b) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::NonBinary(b));
    }
    Ok(QPSK[index_of_bits(bits[0], bits[1])])
}

/// Quadrant decision. Zero components decide for bit 0.
pub fn qpsk_demodulate(symbol: Complex) -> [u8; 2] {
    [(symbol.re < 0.0) as u8, (symbol.im < 0.0) as u8]
}

/// Bit pair of a QPSK alphabet point.
pub fn bits_of(point: ConstellationPoint) -> [u8; 2] {
    qpsk_demodulate(point.value())
}

/// Payload bits of one user for one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitFrame {
    bits: Vec<u8>,
}

impl BitFrame {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if !bits.len().is_multiple_of(2) {
            return Err(Error::OddFrameLength(bits.len()));
        }
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::NonBinary(b));
        }
        Ok(BitFrame { bits })
    }

    /// Uniform random payload. `len` must be even.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Result<Self> {
        if !len.is_multiple_of(2) {
            return Err(Error::OddFrameLength(len));
        }
        Ok(BitFrame {
            bits: (0..len).map(|_| rng.random_range(0..=1u8)).collect(),
        })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn symbol_count(&self) -> usize {
        self.bits.len() / 2
    }

    /// The `i`-th symbol of the frame.
    pub fn symbol(&self, i: usize) -> ConstellationPoint {
        QPSK[index_of_bits(self.bits[2 * i], self.bits[2 * i + 1])]
    }

    pub fn symbols(&self) -> impl Iterator<Item = ConstellationPoint> + '_ {
        (0..self.symbol_count()).map(|i| self.symbol(i))
    }

    /// Bit errors between symbol `i` and a detected bit pair.
    pub fn errors_at(&self, i: usize, detected: [u8; 2]) -> u32 {
        (self.bits[2 * i] != detected[0]) as u32 + (self.bits[2 * i + 1] != detected[1]) as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gray_mapping() {
        let s = qpsk_modulate(&[0, 0]).unwrap().value();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.re - h).abs() < 1e-15 && (s.im - h).abs() < 1e-15);
        assert_eq!(qpsk_modulate(&[0, 1]).unwrap().value(), Complex::new(H, -H));
        assert_eq!(qpsk_modulate(&[1, 0]).unwrap().value(), Complex::new(-H, H));
        assert_eq!(
            qpsk_modulate(&[1, 1]).unwrap().value(),
            Complex::new(-H, -H)
        );
    }

    #[test]
    fn unit_energy_and_round_trip() {
        for b0 in 0..2u8 {
            for b1 in 0..2u8 {
                let s = qpsk_modulate(&[b0, b1]).unwrap();
                assert!((s.value().norm_sqr() - 1.0).abs() < 1e-15);
                assert_eq!(qpsk_demodulate(s.value()), [b0, b1]);
            }
        }
    }

    #[test]
    fn demodulation_decisions() {
        assert_eq!(qpsk_demodulate(Complex::new(0.7, 0.7)), [0, 0]);
        assert_eq!(qpsk_demodulate(Complex::new(-0.9, 0.1)), [1, 0]);
        assert_eq!(qpsk_demodulate(Complex::new(0.0, 0.0)), [0, 0]);
    }

    #[test]
    fn arity_and_binary_checks() {
        assert_eq!(qpsk_modulate(&[0]), Err(Error::WrongArity(1)));
        assert_eq!(qpsk_modulate(&[0, 1, 1]), Err(Error::WrongArity(3)));
        assert_eq!(qpsk_modulate(&[0, 2]), Err(Error::NonBinary(2)));
        assert_eq!(BitFrame::new(vec![0, 1, 1]), Err(Error::OddFrameLength(3)));
    }

    #[test]
    fn frame_symbols() {
        let f = BitFrame::new(vec![0, 0, 1, 1, 1, 0]).unwrap();
        let syms: Vec<_> = f.symbols().collect();
        assert_eq!(syms, vec![QPSK[0], QPSK[3], QPSK[2]]);
        assert_eq!(f.errors_at(1, [1, 1]), 0);
        assert_eq!(f.errors_at(1, [0, 1]), 1);
        assert_eq!(f.errors_at(1, [0, 0]), 2);

        let r = BitFrame::random(&mut ChaCha8Rng::seed_from_u64(1), 6144).unwrap();
        assert_eq!(r.symbol_count(), 3072);
        let ones = r.bits().iter().filter(|&&b| b == 1).count();
        assert!((ones as f64 / 6144.0 - 0.5).abs() < 0.03);
    }
}
