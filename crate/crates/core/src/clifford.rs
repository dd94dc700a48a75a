//! The 24-element single-qubit Clifford group, acting on the computational
//! subspace and embedded into the four-level space.
//!
//! Elements are identified by how they conjugate `X` and `Z`. Products and
//! inverses are computed on these signed-Pauli images, so long compositions
//! never accumulate phase error; the 2x2 matrices are kept only for
//! building superoperators.

use std::sync::OnceLock;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liouville::{embed_gate, pauli2, Op2, SuperOperator, C64};

pub const GROUP_ORDER: usize = 24;

/// Single-qubit Pauli label with index `0 = 1, 1 = X, 2 = Y, 3 = Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(j: usize) -> Result<Self> {
        Self::ALL.get(j).copied().ok_or_else(|| Error::Parameter(format!("Pauli index {j} out of range")))
    }

    /// Outcome that signals survival: dark (`0`) for `1` and `Z`, bright
    /// (`1`) for `X` and `Y`.
    pub fn target_outcome(self) -> u8 {
        match self {
            Pauli::I | Pauli::Z => 0,
            Pauli::X | Pauli::Y => 1,
        }
    }

    pub fn matrix(self) -> Op2 {
        pauli2(self.index())
    }

    pub fn label(self) -> &'static str {
        match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "I" | "1" => Some(Pauli::I),
            "X" => Some(Pauli::X),
            "Y" => Some(Pauli::Y),
            "Z" => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Product of two non-identity Paulis: `a b = phase * c`, phase as a power
/// of `i`.
fn pauli_product(a: Pauli, b: Pauli) -> (u8, Pauli) {
    use Pauli::*;
    match (a, b) {
        (I, p) | (p, I) => (0, p),
        (X, X) | (Y, Y) | (Z, Z) => (0, I),
        (X, Y) => (1, Z),
        (Y, Z) => (1, X),
        (Z, X) => (1, Y),
        (Y, X) => (3, Z),
        (Z, Y) => (3, X),
        (X, Z) => (3, Y),
    }
}

/// `sign * pauli` with `sign = ±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignedPauli {
    pub negative: bool,
    pub pauli: Pauli,
}

impl SignedPauli {
    pub fn plus(pauli: Pauli) -> Self {
        Self { negative: false, pauli }
    }

    pub fn minus(pauli: Pauli) -> Self {
        Self { negative: true, pauli }
    }

    fn negate(self) -> Self {
        Self { negative: !self.negative, pauli: self.pauli }
    }
}

/// A Clifford element, stored by its conjugation action on `X` and `Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CliffordElement {
    pub index: usize,
    pub x_image: SignedPauli,
    pub z_image: SignedPauli,
    /// A representative unitary (global phase arbitrary).
    pub unitary: Op2,
}

impl CliffordElement {
    /// `g Y g^†`, from `Y = i X Z`.
    pub fn y_image(&self) -> SignedPauli {
        let (phase, p) = pauli_product(self.x_image.pauli, self.z_image.pauli);
        // i * i^phase must be real: phase is 1 or 3.
        let total = (1 + phase) % 4;
        let negative = (total == 2) ^ self.x_image.negative ^ self.z_image.negative;
        SignedPauli { negative, pauli: p }
    }

    /// `g (s P) g^†`.
    pub fn conjugate(&self, s: SignedPauli) -> SignedPauli {
        let img = match s.pauli {
            Pauli::I => SignedPauli::plus(Pauli::I),
            Pauli::X => self.x_image,
            Pauli::Y => self.y_image(),
            Pauli::Z => self.z_image,
        };
        if s.negative {
            img.negate()
        } else {
            img
        }
    }
}

struct GroupTable {
    elements: Vec<CliffordElement>,
    product: [[u8; GROUP_ORDER]; GROUP_ORDER],
    inverse: [u8; GROUP_ORDER],
    superops: Vec<SuperOperator>,
}

fn image_of(u: &Op2, p: Pauli) -> SignedPauli {
    let m = u * p.matrix() * u.adjoint();
    for q in [Pauli::X, Pauli::Y, Pauli::Z] {
        let overlap = (q.matrix() * m).trace() / C64::new(2.0, 0.0);
        if (overlap.re - 1.0).abs() < 1e-9 {
            return SignedPauli::plus(q);
        }
        if (overlap.re + 1.0).abs() < 1e-9 {
            return SignedPauli::minus(q);
        }
    }
    unreachable!("Clifford conjugation left the Pauli group")
}

fn build_table() -> GroupTable {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = Op2::new(C64::new(s, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0));
    let phase = Op2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), Complex::i());
    let key = |u: &Op2| (image_of(u, Pauli::X), image_of(u, Pauli::Z));

    let mut unitaries = vec![Op2::identity()];
    let mut keys = vec![key(&Op2::identity())];
    let mut frontier = 0;
    while frontier < unitaries.len() {
        let u = unitaries[frontier];
        frontier += 1;
        for g in [&h, &phase] {
            let next = g * u;
            let k = key(&next);
            if !keys.contains(&k) {
                keys.push(k);
                unitaries.push(next);
            }
        }
    }
    assert_eq!(unitaries.len(), GROUP_ORDER);

    let elements: Vec<CliffordElement> = unitaries
        .iter()
        .zip(&keys)
        .enumerate()
        .map(|(index, (u, (x, z)))| CliffordElement { index, x_image: *x, z_image: *z, unitary: *u })
        .collect();

    let mut product = [[0u8; GROUP_ORDER]; GROUP_ORDER];
    for a in &elements {
        for b in &elements {
            let x = a.conjugate(b.x_image);
            let z = a.conjugate(b.z_image);
            let idx = elements.iter().position(|e| e.x_image == x && e.z_image == z).expect("group closure");
            product[a.index][b.index] = idx as u8;
        }
    }
    let mut inverse = [0u8; GROUP_ORDER];
    for a in 0..GROUP_ORDER {
        inverse[a] = (0..GROUP_ORDER).find(|b| product[a][*b] == 0).expect("inverse exists") as u8;
    }
    let superops = elements
        .iter()
        .map(|e| embed_gate(&e.unitary, &Op2::identity()).expect("Clifford representatives are unitary"))
        .collect();
    GroupTable { elements, product, inverse, superops }
}

fn table() -> &'static GroupTable {
    static TABLE: OnceLock<GroupTable> = OnceLock::new();
    TABLE.get_or_init(build_table)
}

/// All 24 elements; index 0 is the identity.
pub fn enumerate() -> &'static [CliffordElement] {
    &table().elements
}

pub fn element(index: usize) -> &'static CliffordElement {
    &table().elements[index]
}

/// Index of `a * b` (apply `b`, then `a`).
pub fn compose(a: usize, b: usize) -> usize {
    table().product[a][b] as usize
}

pub fn inverse(a: usize) -> usize {
    table().inverse[a] as usize
}

/// Group element equal to the Pauli gate `p`.
pub fn pauli_element(p: Pauli) -> usize {
    let x_negative = matches!(p, Pauli::Y | Pauli::Z);
    let z_negative = matches!(p, Pauli::X | Pauli::Y);
    enumerate()
        .iter()
        .position(|e| {
            e.x_image == SignedPauli { negative: x_negative, pauli: Pauli::X }
                && e.z_image == SignedPauli { negative: z_negative, pauli: Pauli::Z }
        })
        .expect("Paulis are Clifford")
}

/// Net product `g_l ... g_1` of a sequence applied in order.
pub fn sequence_product(seq: &[usize]) -> usize {
    seq.iter().fold(0, |acc, g| compose(*g, acc))
}

/// `P_j (g_l ... g_1)^-1`: undoes the sequence and applies the final Pauli.
pub fn inversion_for(seq: &[usize], final_pauli: Pauli) -> usize {
    compose(pauli_element(final_pauli), inverse(sequence_product(seq)))
}

/// Superoperator of `g ⊕ W_e`.
pub fn to_superop(index: usize, extra: &Op2) -> Result<SuperOperator> {
    embed_gate(&element(index).unitary, extra)
}

/// Cached superoperator of `g ⊕ 1_e`.
pub fn superop(index: usize) -> &'static SuperOperator {
    &table().superops[index]
}
