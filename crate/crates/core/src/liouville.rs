//! Liouville representation for the four-level ion: levels `|0>, |1>` span
//! the computational subspace, `|2>, |3>` the extra (leaked) subspace.
//!
//! Operators are expanded in a fixed orthonormal Hermitian basis, so
//! supervectors hold expansion coefficients and superoperators are 16x16
//! matrices acting on them. The basis order is
//!
//! | index | element |
//! |-------|---------|
//! | 0..4  | `1_c, X_c, Y_c, Z_c` |
//! | 4..8  | `1_e, X_e, Y_e, Z_e` |
//! | 8..16 | `X_ce(i,j), Y_ce(i,j)` for `(i,j)` in `(0,2),(0,3),(1,2),(1,3)` |
//!
//! with every element scaled to unit Hilbert–Schmidt norm.

use std::fmt::Write as _;
use std::sync::OnceLock;

use nalgebra::{Complex, SMatrix, SVector};

use crate::error::{param, Error, Result};

pub type C64 = Complex<f64>;
/// Operator on the 4-level Hilbert space.
pub type Op4 = SMatrix<C64, 4, 4>;
/// 2x2 block acting on one subspace.
pub type Op2 = SMatrix<C64, 2, 2>;
pub type SuperMatrix = SMatrix<C64, 16, 16>;

pub const IDX_ID_C: usize = 0;
pub const IDX_X_C: usize = 1;
pub const IDX_Y_C: usize = 2;
pub const IDX_Z_C: usize = 3;
pub const IDX_ID_E: usize = 4;
pub const COMPUTATIONAL: std::ops::Range<usize> = 0..4;
pub const EXTRA: std::ops::Range<usize> = 4..8;
pub const CROSS: std::ops::Range<usize> = 8..16;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    PauliComputational,
    PauliExtra,
    Cross,
}

#[derive(Debug, Clone)]
pub struct BasisElement {
    pub index: usize,
    pub label: String,
    pub kind: BasisKind,
    pub matrix: Op4,
}

pub fn ket_bra(i: usize, j: usize) -> Op4 {
    let mut m = Op4::zeros();
    m[(i, j)] = ONE;
    m
}

pub fn projector(level: usize) -> Op4 {
    ket_bra(level, level)
}

pub fn pauli2(which: usize) -> Op2 {
    match which {
        0 => Op2::identity(),
        1 => Op2::new(ZERO, ONE, ONE, ZERO),
        2 => Op2::new(ZERO, -I, I, ZERO),
        3 => Op2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index {which} out of range"),
    }
}

/// `V ⊕ W` with `V` on the computational block and `W` on the extra block.
pub fn direct_sum(v: &Op2, w: &Op2) -> Op4 {
    let mut m = Op4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(v);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(w);
    m
}

fn build_basis() -> Vec<BasisElement> {
    let norm = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let names = ["1", "X", "Y", "Z"];
    let zero2 = Op2::zeros();
    let mut out = Vec::with_capacity(16);
    for (p, name) in names.iter().enumerate() {
        out.push(BasisElement {
            index: out.len(),
            label: format!("{name}_c"),
            kind: BasisKind::PauliComputational,
            matrix: direct_sum(&pauli2(p), &zero2) * norm,
        });
    }
    for (p, name) in names.iter().enumerate() {
        out.push(BasisElement {
            index: out.len(),
            label: format!("{name}_e"),
            kind: BasisKind::PauliExtra,
            matrix: direct_sum(&zero2, &pauli2(p)) * norm,
        });
    }
    for i in 0..2 {
        for j in 2..4 {
            let x = ket_bra(i, j) + ket_bra(j, i);
            let y = ket_bra(i, j) * (-I) + ket_bra(j, i) * I;
            out.push(BasisElement {
                index: out.len(),
                label: format!("X_ce({i},{j})"),
                kind: BasisKind::Cross,
                matrix: x * norm,
            });
            out.push(BasisElement {
                index: out.len(),
                label: format!("Y_ce({i},{j})"),
                kind: BasisKind::Cross,
                matrix: y * norm,
            });
        }
    }
    out
}

/// The 16 orthonormal basis operators in their fixed order.
pub fn standard_basis() -> &'static [BasisElement] {
    static BASIS: OnceLock<Vec<BasisElement>> = OnceLock::new();
    BASIS.get_or_init(build_basis)
}

/// Change of basis from column-stacked `vec` coordinates to the standard
/// basis: column `i` is `vec(B_i)`.
fn vec_to_basis() -> &'static SuperMatrix {
    static T: OnceLock<SuperMatrix> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = SuperMatrix::zeros();
        for (i, b) in standard_basis().iter().enumerate() {
            for col in 0..4 {
                for row in 0..4 {
                    t[(col * 4 + row, i)] = b.matrix[(row, col)];
                }
            }
        }
        t
    })
}

fn trace_product(a: &Op4, b: &Op4) -> C64 {
    let mut s = ZERO;
    for i in 0..4 {
        for k in 0..4 {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s
}

/// Expansion coefficients of an operator, `|A>> = sum_i Tr(B_i^† A) |B_i>>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperVector(pub SVector<C64, 16>);

impl SuperVector {
    pub fn from_operator(op: &Op4) -> Self {
        let mut v = SVector::<C64, 16>::zeros();
        for (i, b) in standard_basis().iter().enumerate() {
            // Basis elements are Hermitian, so B_i^† = B_i.
            v[i] = trace_product(&b.matrix, op);
        }
        Self(v)
    }

    pub fn to_operator(&self) -> Op4 {
        standard_basis().iter().zip(self.0.iter()).fold(Op4::zeros(), |acc, (b, c)| acc + b.matrix * *c)
    }

    /// Supervector of the pure state `|level><level|`.
    pub fn level(level: usize) -> Self {
        Self::from_operator(&projector(level))
    }

    /// Identity operator on the full space.
    pub fn identity() -> Self {
        Self::from_operator(&Op4::identity())
    }

    pub fn coefficient(&self, i: usize) -> C64 {
        self.0[i]
    }

    /// `<<self|other>> = Tr(self^† other)`.
    pub fn inner(&self, other: &SuperVector) -> C64 {
        self.0.dotc(&other.0)
    }
}

/// Born rule `Tr(E^† rho)` for an effect and a state.
pub fn born_probability(effect: &SuperVector, state: &SuperVector) -> Result<f64> {
    let p = effect.inner(state);
    if p.im.abs() > 1e-9 {
        return Err(Error::Representation(format!("probability has imaginary part {}", p.im)));
    }
    if !(-1e-9..=1.0 + 1e-9).contains(&p.re) {
        return Err(Error::Representation(format!("probability {} outside [0, 1]", p.re)));
    }
    Ok(p.re.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperOperator(pub SuperMatrix);

impl SuperOperator {
    pub fn identity() -> Self {
        Self(SuperMatrix::identity())
    }

    /// `sum_i A_i^* ⊗ A_i` in column-stacking coordinates, then rotated into
    /// the standard basis.
    pub fn from_kraus(kraus: &[Op4]) -> Result<Self> {
        if kraus.is_empty() {
            return Err(param("at least one Kraus operator is required"));
        }
        let mut m = SuperMatrix::zeros();
        for a in kraus {
            let conj = a.map(|z| z.conj());
            for r1 in 0..4 {
                for c1 in 0..4 {
                    let s = conj[(r1, c1)];
                    if s == ZERO {
                        continue;
                    }
                    for r2 in 0..4 {
                        for c2 in 0..4 {
                            m[(r1 * 4 + r2, c1 * 4 + c2)] += s * a[(r2, c2)];
                        }
                    }
                }
            }
        }
        let t = vec_to_basis();
        Ok(Self(t.adjoint() * m * t))
    }

    /// Kraus operators given as nested row-major arrays; rejects non-4x4 input.
    pub fn from_kraus_rows(kraus: &[Vec<Vec<C64>>]) -> Result<Self> {
        let mut ops = Vec::with_capacity(kraus.len());
        for k in kraus {
            if k.len() != 4 || k.iter().any(|row| row.len() != 4) {
                let cols = k.first().map(|r| r.len()).unwrap_or(0);
                return Err(Error::Shape { expected: "4x4".into(), got: format!("{}x{}", k.len(), cols) });
            }
            ops.push(Op4::from_fn(|r, c| k[r][c]));
        }
        Self::from_kraus(&ops)
    }

    /// Superoperator of an arbitrary linear map on operators.
    pub fn from_linear_map<F: Fn(&Op4) -> Op4>(map: F) -> Self {
        let basis = standard_basis();
        let mut m = SuperMatrix::zeros();
        for (j, bj) in basis.iter().enumerate() {
            let image = map(&bj.matrix);
            for (i, bi) in basis.iter().enumerate() {
                m[(i, j)] = trace_product(&bi.matrix, &image);
            }
        }
        Self(m)
    }

    pub fn apply(&self, v: &SuperVector) -> SuperVector {
        SuperVector(self.0 * v.0)
    }

    /// Applies the channel to an operator.
    pub fn apply_operator(&self, op: &Op4) -> Op4 {
        self.apply(&SuperVector::from_operator(op)).to_operator()
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &SuperOperator) -> SuperOperator {
        Self(self.0 * first.0)
    }

    pub fn adjoint(&self) -> SuperOperator {
        Self(self.0.adjoint())
    }

    pub fn element(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    /// Largest deviation of `<<1| M` from `<<1|`.
    pub fn trace_preservation_error(&self) -> f64 {
        let one = SuperVector::identity().0;
        let lhs = one.adjoint() * self.0;
        (lhs - one.adjoint()).camax()
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.trace_preservation_error() <= tol
    }

    /// Largest imaginary part of any element.
    pub fn max_imaginary(&self) -> f64 {
        self.0.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// 16x16 grid of real parts, one row per line, 17 significant digits.
    /// Imaginary parts are appended as `+<im>i` only where they exceed 1e-12.
    pub fn to_csv_grid(&self) -> String {
        let mut s = String::new();
        for r in 0..16 {
            let row: Vec<String> = (0..16)
                .map(|c| {
                    let z = self.0[(r, c)];
                    if z.im.abs() > 1e-12 {
                        format!("{}{:+.16e}i", crate::fmt_f64(z.re), z.im)
                    } else {
                        crate::fmt_f64(z.re)
                    }
                })
                .collect();
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }
}

fn is_unitary(u: &Op2) -> bool {
    (u.adjoint() * u - Op2::identity()).camax() <= 1e-10
}

/// Superoperator of `U = V_c ⊕ W_e`.
pub fn embed_gate(v: &Op2, w: &Op2) -> Result<SuperOperator> {
    if !is_unitary(v) {
        return Err(param("computational block is not unitary"));
    }
    if !is_unitary(w) {
        return Err(param("extra block is not unitary"));
    }
    SuperOperator::from_kraus(&[direct_sum(v, w)])
}

/// The three pieces of a block-diagonal gate superoperator: `V` acting on
/// computational operators, `W` on extra operators and `A` on cross
/// operators. They sum to the full gate and multiply pairwise to zero.
pub struct GateBlocks {
    pub computational: SuperOperator,
    pub extra: SuperOperator,
    pub cross: SuperOperator,
}

pub fn gate_blocks(v: &Op2, w: &Op2) -> GateBlocks {
    let zero = Op2::zeros();
    let vc = direct_sum(v, &zero);
    let we = direct_sum(&zero, w);
    let sandwich = |left: Op4, right: Op4| SuperOperator::from_linear_map(|rho| left * rho * right.adjoint());
    let cross = SuperOperator(sandwich(vc, we).0 + sandwich(we, vc).0);
    GateBlocks { computational: sandwich(vc, vc), extra: sandwich(we, we), cross }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_is_orthonormal() {
        let b = standard_basis();
        for i in 0..16 {
            for j in 0..16 {
                let g = trace_product(&b[i].matrix.adjoint(), &b[j].matrix);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - C64::new(want, 0.0)).norm() < 1e-14, "({i},{j})");
            }
        }
    }

    #[test]
    fn first_and_cross_elements() {
        let b = standard_basis();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want0 = (projector(0) + projector(1)) * C64::new(s, 0.0);
        assert!((b[0].matrix - want0).camax() < 1e-15);
        let want_x02 = (ket_bra(0, 2) + ket_bra(2, 0)) * C64::new(s, 0.0);
        assert_eq!(b[8].label, "X_ce(0,2)");
        assert!((b[8].matrix - want_x02).camax() < 1e-15);
        assert_eq!(b[9].label, "Y_ce(0,2)");
        assert_eq!(b[15].label, "Y_ce(1,3)");
    }

    #[test]
    fn identity_kraus_is_identity() {
        let m = SuperOperator::from_kraus(&[Op4::identity()]).unwrap();
        assert!((m.0 - SuperMatrix::identity()).camax() < 1e-14);
    }

    #[test]
    fn empty_and_misshapen_kraus_rejected() {
        assert!(SuperOperator::from_kraus(&[]).is_err());
        let bad = vec![vec![vec![ONE; 3]; 3]];
        assert!(matches!(SuperOperator::from_kraus_rows(&bad), Err(Error::Shape { .. })));
    }

    #[test]
    fn non_tp_kraus_detected() {
        let m = SuperOperator::from_kraus(&[Op4::identity() * C64::new(0.5, 0.0)]).unwrap();
        assert!(!m.is_trace_preserving(1e-10));
    }

    #[test]
    fn born_rule_examples() {
        let zero = SuperVector::level(0);
        assert!((born_probability(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
        let e1 = SuperVector::from_operator(&(projector(1) + projector(2) + projector(3)));
        assert_eq!(born_probability(&e1, &zero).unwrap(), 0.0);
    }

    #[test]
    fn x_gate_action() {
        let g = embed_gate(&pauli2(1), &Op2::identity()).unwrap();
        let out = g.apply(&SuperVector::level(0));
        assert!((out.to_operator() - projector(1)).camax() < 1e-14);
        let out = g.apply(&SuperVector::level(2));
        assert!((out.to_operator() - projector(2)).camax() < 1e-14);
    }

    #[test]
    fn non_unitary_block_rejected() {
        let bad = Op2::identity() * C64::new(2.0, 0.0);
        assert!(embed_gate(&bad, &Op2::identity()).is_err());
        assert!(embed_gate(&Op2::identity(), &bad).is_err());
    }

    #[test]
    fn csv_grid_has_16_rows() {
        let grid = SuperOperator::identity().to_csv_grid();
        assert_eq!(grid.lines().count(), 16);
        assert!(grid.lines().all(|l| l.split(',').count() == 16));
    }
}
