//! Signed n-qubit Pauli operators in the binary symplectic representation.
//!
//! An operator is stored as `i^k · P_0 ⊗ P_1 ⊗ … ⊗ P_{n-1}` where every
//! `P_j ∈ {I, X, Y, Z}` is a Hermitian letter encoded by the bit pair
//! `(x_j, z_j)`: `I = (0,0)`, `X = (1,0)`, `Z = (0,1)`, `Y = (1,1)`.
//! Phases are exact; nothing is quotiented out.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::error::{Error, Result};

/// A power of `i`, stored modulo 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// `+1 → 1`, `-1 → -1`; panics on imaginary phases.
    pub fn sign(self) -> i32 {
        match self.0 {
            0 => 1,
            2 => -1,
            _ => panic!("phase {self} is not a sign"),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' | '_' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x: BitVec,
    z: BitVec,
    phase: Phase,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
            phase: Phase::ONE,
        }
    }

    pub fn from_bits(x: BitVec, z: BitVec, phase: Phase) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::LengthMismatch(x.len(), z.len()));
        }
        Ok(Self {
            n: x.len(),
            x,
            z,
            phase,
        })
    }

    pub fn single(n: usize, qubit: usize, letter: Letter) -> Self {
        let mut p = Self::identity(n);
        p.set_letter(qubit, letter);
        p
    }

    /// Product of one letter on each listed qubit, phase `+1`.
    pub fn from_sparse(n: usize, terms: impl IntoIterator<Item = (usize, Letter)>) -> Self {
        let mut p = Self::identity(n);
        for (q, l) in terms {
            p.set_letter(q, l);
        }
        p
    }

    /// Uniform letter on every qubit of `qubits`.
    pub fn uniform(n: usize, qubits: impl IntoIterator<Item = usize>, letter: Letter) -> Self {
        Self::from_sparse(n, qubits.into_iter().map(|q| (q, letter)))
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    #[inline]
    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    #[inline]
    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x.get(q), self.z.get(q))
    }

    pub fn set_letter(&mut self, q: usize, letter: Letter) {
        let (x, z) = letter.bits();
        self.x.set(q, x);
        self.z.set(q, z);
    }

    pub fn support(&self) -> BitVec {
        let mut s = self.x.clone();
        s.or_assign(&self.z);
        s
    }

    pub fn support_indices(&self) -> Vec<usize> {
        self.support().iter_ones().collect()
    }

    pub fn weight(&self) -> usize {
        self.x
            .words()
            .iter()
            .zip(self.z.words())
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    /// Letters agree on every qubit; phases may differ.
    pub fn same_letters(&self, other: &PauliOperator) -> bool {
        self.x == other.x && self.z == other.z
    }

    pub fn dagger(&self) -> PauliOperator {
        let mut d = self.clone();
        d.phase = self.phase.conj();
        d
    }

    /// Letters of `self` on `region`, identity elsewhere, phase `+1`.
    pub fn restrict(&self, region: &BitVec) -> PauliOperator {
        let mut x = self.x.clone();
        let mut z = self.z.clone();
        x.and_assign(region);
        z.and_assign(region);
        PauliOperator {
            n: self.n,
            x,
            z,
            phase: Phase::ONE,
        }
    }

    /// Letters only, phase reset to `+1`.
    pub fn unsigned(&self) -> PauliOperator {
        self.clone().with_phase(Phase::ONE)
    }

    fn check_len(&self, other: &PauliOperator) -> Result<()> {
        if self.n != other.n {
            Err(Error::LengthMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    /// In-place right multiplication `self ← self · other`.
    pub fn mul_assign_right(&mut self, other: &PauliOperator) {
        debug_assert_eq!(self.n, other.n);
        let mut acc: i64 = (self.phase.0 + other.phase.0) as i64;
        let xs = self.x.words_mut();
        let zs = self.z.words_mut();
        for (i, (&x2, &z2)) in other.x.words().iter().zip(other.z.words()).enumerate() {
            let x1 = xs[i];
            let z1 = zs[i];
            let y1 = x1 & z1;
            let xo1 = x1 & !z1;
            let zo1 = !x1 & z1;
            let y2 = x2 & z2;
            let xo2 = x2 & !z2;
            let zo2 = !x2 & z2;
            let plus = (y1 & zo2) | (xo1 & y2) | (zo1 & xo2);
            let minus = (y1 & xo2) | (xo1 & zo2) | (zo1 & y2);
            acc += plus.count_ones() as i64 - minus.count_ones() as i64;
            xs[i] = x1 ^ x2;
            zs[i] = z1 ^ z2;
        }
        self.phase = Phase::from_exponent(acc);
    }

    /// In-place left multiplication `self ← other · self`.
    pub fn mul_assign_left(&mut self, other: &PauliOperator) {
        let mut out = other.clone();
        out.mul_assign_right(self);
        *self = out;
    }

    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator> {
        self.check_len(other)?;
        let mut out = self.clone();
        out.mul_assign_right(other);
        Ok(out)
    }

    pub fn commutes_with(&self, other: &PauliOperator) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.commutes_unchecked(other))
    }

    #[inline]
    pub fn commutes_unchecked(&self, other: &PauliOperator) -> bool {
        let mut acc = 0u64;
        for i in 0..self.x.words().len() {
            acc ^=
                (self.x.words()[i] & other.z.words()[i]) ^ (self.z.words()[i] & other.x.words()[i]);
        }
        acc.count_ones().is_multiple_of(2)
    }

    /// Anticommuting single-qubit sites between `self` and `other`.
    pub fn anticommuting_sites(&self, other: &PauliOperator) -> BitVec {
        let mut a = self.x.clone();
        a.and_assign(&other.z);
        let mut b = self.z.clone();
        b.and_assign(&other.x);
        a.xor_assign(&b);
        a
    }

    /// Letter string without sign.
    pub fn letters_string(&self) -> String {
        (0..self.n).map(|q| self.letter(q).as_char()).collect()
    }
}

/// Product `p · q` with exact phase.
pub fn multiply(p: &PauliOperator, q: &PauliOperator) -> Result<PauliOperator> {
    p.multiply(q)
}

/// Whether `p` and `q` commute (symplectic form vanishes).
pub fn commutes(p: &PauliOperator, q: &PauliOperator) -> Result<bool> {
    p.commutes_with(q)
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.phase, self.letters_string())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().replace('\u{2212}', "-");
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i") {
            (Phase::I, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (Phase::ONE, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (Phase::I, rest)
        } else {
            (Phase::ONE, s.as_str())
        };
        let letters = body
            .chars()
            .enumerate()
            .map(|(i, c)| {
                Letter::from_char(c).ok_or_else(|| {
                    Error::MalformedPauli(format!("invalid character {c:?} at {i} in {s:?}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut p = PauliOperator::identity(letters.len());
        for (q, l) in letters.into_iter().enumerate() {
            p.set_letter(q, l);
        }
        p.phase = phase;
        Ok(p)
    }
}

impl Serialize for PauliOperator {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        assert_eq!(p("X").multiply(&p("Z")).unwrap(), p("-iY"));
        assert_eq!(p("Z").multiply(&p("X")).unwrap(), p("+iY"));
        assert_eq!(p("Y").multiply(&p("Z")).unwrap(), p("+iX"));
        assert_eq!(p("X").multiply(&p("Y")).unwrap(), p("+iZ"));
    }

    #[test]
    fn hermitian_involution() {
        for s in ["XYZI", "-ZZXY", "+IIII"] {
            let q = p(s);
            assert_eq!(q.multiply(&q).unwrap(), PauliOperator::identity(4));
        }
    }

    #[test]
    fn commutation_basics() {
        assert!(!commutes(&p("XI"), &p("ZI")).unwrap());
        assert!(commutes(&p("XI"), &p("IZ")).unwrap());
        assert!(commutes(&p("XX"), &p("ZZ")).unwrap());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(matches!(
            p("X").multiply(&p("XX")),
            Err(Error::LengthMismatch(1, 2))
        ));
        assert!(commutes(&p("X"), &p("XX")).is_err());
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["+XYZ", "-IXI", "+iZZ", "-iYI"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("\u{2212}X"), p("-X"));
        assert!("XQ".parse::<PauliOperator>().is_err());
    }

    #[test]
    fn restriction_and_weight() {
        let q = p("-XYZI");
        let r = q.restrict(&BitVec::from_indices(4, [1, 3]));
        assert_eq!(r, p("+IYII"));
        assert_eq!(q.weight(), 3);
    }
}
