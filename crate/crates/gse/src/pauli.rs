//! Exact n-qubit Pauli arithmetic in symplectic form.
//!
//! An operator is stored as `i^phase · P_0 ⊗ P_1 ⊗ … ⊗ P_{n-1}` where each
//! `P_q ∈ {I, X, Y, Z}` is encoded by one bit in an X mask and one bit in a Z
//! mask (`Y` sets both).  Qubit 0 is the leftmost character of a label.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::GseError;

/// A single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli1 {
    I,
    X,
    Y,
    Z,
}

impl Pauli1 {
    pub const NON_IDENTITY: [Pauli1; 3] = [Pauli1::X, Pauli1::Y, Pauli1::Z];
    pub const ALL: [Pauli1; 4] = [Pauli1::I, Pauli1::X, Pauli1::Y, Pauli1::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli1::I,
            (true, false) => Pauli1::X,
            (true, true) => Pauli1::Y,
            (false, true) => Pauli1::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli1::I => (false, false),
            Pauli1::X => (true, false),
            Pauli1::Y => (true, true),
            Pauli1::Z => (false, true),
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli1::I),
            'X' => Some(Pauli1::X),
            'Y' => Some(Pauli1::Y),
            'Z' => Some(Pauli1::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli1::I => 'I',
            Pauli1::X => 'X',
            Pauli1::Y => 'Y',
            Pauli1::Z => 'Z',
        }
    }

    pub fn is_identity(self) -> bool {
        self == Pauli1::I
    }

    pub fn commutes(self, other: Pauli1) -> bool {
        self == Pauli1::I || other == Pauli1::I || self == other
    }

    /// Product up to phase.
    pub fn times(self, other: Pauli1) -> Pauli1 {
        let (ax, az) = self.bits();
        let (bx, bz) = other.bits();
        Pauli1::from_bits(ax ^ bx, az ^ bz)
    }
}

impl fmt::Display for Pauli1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

fn words(n: usize) -> usize {
    n.div_ceil(64)
}

/// An n-qubit Pauli operator with an explicit power-of-i phase.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOp {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        PauliOp { n, x: vec![0; words(n)], z: vec![0; words(n)], phase: 0 }
    }

    /// `p` acting on qubit `q` of an `n`-qubit register.
    pub fn single(n: usize, q: usize, p: Pauli1) -> Self {
        let mut op = PauliOp::identity(n);
        op.set(q, p);
        op
    }

    /// Builds an operator from `(qubit, letter)` pairs; repeated qubits are
    /// multiplied together up to phase.
    pub fn from_sparse(n: usize, factors: &[(usize, Pauli1)]) -> Self {
        let mut op = PauliOp::identity(n);
        for &(q, p) in factors {
            let cur = op.get(q);
            op.set(q, cur.times(p));
        }
        op
    }

    /// Parses a label such as `"-YXZI"` or `"iZI"`.
    pub fn parse(label: &str) -> Result<Self, GseError> {
        let (phase, body) = if let Some(rest) = label.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = label.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = label.strip_prefix('i') {
            (1, rest)
        } else if let Some(rest) = label.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = label.strip_prefix('+') {
            (0, rest)
        } else {
            (0, label)
        };
        let mut op = PauliOp::identity(body.chars().count());
        for (q, c) in body.chars().enumerate() {
            let p = Pauli1::from_char(c)
                .ok_or_else(|| GseError::Parse(format!("invalid Pauli character {c:?} in {label:?}")))?;
            op.set(q, p);
        }
        op.phase = phase;
        Ok(op)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Power of `i` in front of the tensor product.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase & 3;
        self
    }

    /// Multiplies by `i^k`.
    pub fn times_i(mut self, k: u8) -> Self {
        self.phase = (self.phase + k) & 3;
        self
    }

    pub fn negated(self) -> Self {
        self.times_i(2)
    }

    /// `+1` or `-1` for Hermitian operators; `None` otherwise.
    pub fn sign(&self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    pub fn get(&self, q: usize) -> Pauli1 {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (w, b) = (q / 64, q % 64);
        Pauli1::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, q: usize, p: Pauli1) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (w, b) = (q / 64, q % 64);
        let (px, pz) = p.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((px as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((pz as u64) << b);
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.phase == 0 && self.is_identity_up_to_phase()
    }

    pub fn eq_up_to_phase(&self, other: &PauliOp) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    /// Qubits with non-identity action, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, (a, b)) in self.x.iter().zip(&self.z).enumerate() {
            let mut m = a | b;
            while m != 0 {
                let t = m.trailing_zeros() as usize;
                out.push(w * 64 + t);
                m &= m - 1;
            }
        }
        out
    }

    /// The unsigned label, e.g. `"IYXZ"`.
    pub fn letters(&self) -> String {
        (0..self.n).map(|q| self.get(q).as_char()).collect()
    }

    /// Restriction to the listed qubits, in the listed order; the phase is kept.
    pub fn restrict(&self, qubits: &[usize]) -> PauliOp {
        let mut out = PauliOp::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            out.set(i, self.get(q));
        }
        out.phase = self.phase;
        out
    }

    /// Places this operator on `qubits` of an `n`-qubit register.
    pub fn embed(&self, n: usize, qubits: &[usize]) -> PauliOp {
        assert_eq!(qubits.len(), self.n, "embedding needs one target per qubit");
        let mut out = PauliOp::identity(n);
        for (i, &q) in qubits.iter().enumerate() {
            out.set(q, self.get(i));
        }
        out.phase = self.phase;
        out
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &PauliOp) -> PauliOp {
        let mut out = PauliOp::identity(self.n + other.n);
        for q in 0..self.n {
            out.set(q, self.get(q));
        }
        for q in 0..other.n {
            out.set(self.n + q, other.get(q));
        }
        out.phase = (self.phase + other.phase) & 3;
        out
    }

    fn check_size(&self, other: &PauliOp) -> Result<(), GseError> {
        if self.n != other.n {
            return Err(GseError::SizeMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn try_commutes(&self, other: &PauliOp) -> Result<bool, GseError> {
        self.check_size(other)?;
        Ok(self.commutes(other))
    }

    /// Symplectic commutation test. Panics on a size mismatch.
    pub fn commutes(&self, other: &PauliOp) -> bool {
        assert_eq!(self.n, other.n, "commutes: size mismatch");
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        parity & 1 == 0
    }

    pub fn try_mul(&self, other: &PauliOp) -> Result<PauliOp, GseError> {
        self.check_size(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &PauliOp) -> PauliOp {
        // Convert to i^k X^a Z^b form, multiply, convert back.
        let mut k = self.phase as u32 + other.phase as u32;
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.z.len());
        for w in 0..self.x.len() {
            let (a, b) = (self.x[w], self.z[w]);
            let (c, d) = (other.x[w], other.z[w]);
            k += (a & b).count_ones();
            k += (c & d).count_ones();
            k += 2 * (b & c).count_ones();
            let (nx, nz) = (a ^ c, b ^ d);
            k += 3 * (nx & nz).count_ones();
            x.push(nx);
            z.push(nz);
        }
        PauliOp { n: self.n, x, z, phase: (k & 3) as u8 }
    }

    /// In-place product ignoring phase; used by Pauli-frame code.
    pub fn mul_assign_unsigned(&mut self, other: &PauliOp) {
        debug_assert_eq!(self.n, other.n);
        for w in 0..self.x.len() {
            self.x[w] ^= other.x[w];
            self.z[w] ^= other.z[w];
        }
    }

    /// Symplectic bit vector `[x | z]` packed into words, for GF(2) work.
    pub fn symplectic_row(&self) -> Vec<u64> {
        let mut row = self.x.clone();
        row.extend_from_slice(&self.z);
        row
    }
}

impl Mul for &PauliOp {
    type Output = PauliOp;

    fn mul(self, rhs: &PauliOp) -> PauliOp {
        self.try_mul(rhs).expect("Pauli product of different sizes")
    }
}

impl Mul for PauliOp {
    type Output = PauliOp;

    fn mul(self, rhs: PauliOp) -> PauliOp {
        &self * &rhs
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.phase as usize];
        write!(f, "{prefix}{}", self.letters())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

impl FromStr for PauliOp {
    type Err = GseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PauliOp::parse(s)
    }
}

impl Serialize for PauliOp {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliOp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let label = String::deserialize(d)?;
        PauliOp::parse(&label).map_err(serde::de::Error::custom)
    }
}
