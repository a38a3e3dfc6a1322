//! First-principles verifier for extension classification.
//!
//! An extension is represented by the subspace of the 4-dimensional complex
//! boundary-value space that its conditions carve out. The space carries the
//! sesquilinear Lagrange form `omega`; adjoints become omega-complements and
//! the three symmetry classes become subspace equalities. Everything here is
//! plain dense linear algebra, independent of the closed-form criteria in
//! [`crate::boundary`], so the two routes can be checked against each other.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

use crate::boundary::{BoundaryForm, ClassificationReport};

/// Relative singular-value threshold for all rank decisions.
pub const RANK_TOL: f64 = 1e-9;

/// Residual threshold for subspace equality.
pub const SUBSPACE_TOL: f64 = 1e-9;

/// Gram matrix of the Lagrange form: `omega(g, f) = z(g)^H J z(f)` in the
/// ordering (alpha1, alpha2, beta1, beta2). Skew-Hermitian and unitary.
pub fn lagrange_gram() -> Matrix4<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let p = Complex64::new(1.0, 0.0);
    let n = Complex64::new(-1.0, 0.0);
    Matrix4::from_row_slice(&[
        z, p, z, z, //
        n, z, z, z, //
        z, z, z, n, //
        z, z, p, z,
    ])
}

/// The boundary-value pairing equal to the Green-identity defect
/// `[g,f]` from -infinity to +infinity.
pub fn omega(g: &BoundaryForm, f: &BoundaryForm) -> Complex64 {
    g.b2.conj() * f.b1 - g.a2.conj() * f.a1 - g.b1.conj() * f.b2 + g.a1.conj() * f.a2
}

/// Parity action on boundary vectors: (a1,a2,b1,b2) -> (b1,-b2,a1,-a2).
/// Real orthogonal, so it maps orthonormal bases to orthonormal bases.
pub fn parity_matrix() -> Matrix4<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let p = Complex64::new(1.0, 0.0);
    let n = Complex64::new(-1.0, 0.0);
    Matrix4::from_row_slice(&[
        z, z, p, z, //
        z, z, z, n, //
        p, z, z, z, //
        z, n, z, z,
    ])
}

/// A subspace of the boundary-value space, stored as a 4 x k matrix with
/// orthonormal columns (k = numerical rank of the generating data).
#[derive(Debug, Clone)]
pub struct BoundarySubspace {
    basis: DMatrix<Complex64>,
}

/// Orthonormal basis of the column space, rank decided at `RANK_TOL` relative.
fn orthonormal_range(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    debug_assert_eq!(m.nrows(), 4);
    let ncols = m.ncols().max(4);
    let mut padded = DMatrix::zeros(4, ncols);
    padded.view_mut((0, 0), (4, m.ncols())).copy_from(m);
    let svd = padded.svd(true, false);
    let u = svd.u.expect("svd with u");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax > 0.0 && s > RANK_TOL * smax)
        .map(|(j, _)| j)
        .collect();
    u.select_columns(&keep)
}

/// Orthonormal basis of the kernel of `rows` (an m x 4 constraint matrix).
fn orthonormal_nullspace(rows: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    debug_assert_eq!(rows.ncols(), 4);
    let nrows = rows.nrows().max(4);
    let mut padded = DMatrix::zeros(nrows, 4);
    if rows.nrows() > 0 {
        padded.view_mut((0, 0), (rows.nrows(), 4)).copy_from(rows);
    }
    let svd = padded.svd(false, true);
    let v = svd.v_t.expect("svd with v_t").adjoint();
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax == 0.0 || s <= RANK_TOL * smax)
        .map(|(j, _)| j)
        .collect();
    v.select_columns(&keep)
}

/// Numerical rank of an arbitrary matrix at `RANK_TOL` relative.
pub fn numerical_rank(m: &DMatrix<Complex64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| smax > 0.0 && s > RANK_TOL * smax).count()
}

impl BoundarySubspace {
    /// Subspace spanned by the columns of `m` (4 x n).
    pub fn from_spanning(m: &DMatrix<Complex64>) -> Self {
        Self { basis: orthonormal_range(m) }
    }

    /// Solution set of the homogeneous system `rows * z = 0` (m x 4).
    pub fn from_constraints(rows: &DMatrix<Complex64>) -> Self {
        Self { basis: orthonormal_nullspace(rows) }
    }

    pub fn zero() -> Self {
        Self { basis: DMatrix::zeros(4, 0) }
    }

    pub fn full() -> Self {
        Self { basis: DMatrix::identity(4, 4) }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// The stored orthonormal basis, one column per dimension.
    pub fn basis(&self) -> &DMatrix<Complex64> {
        &self.basis
    }

    pub fn basis_forms(&self) -> Vec<BoundaryForm> {
        (0..self.dim())
            .map(|j| {
                BoundaryForm::new(
                    self.basis[(0, j)],
                    self.basis[(1, j)],
                    self.basis[(2, j)],
                    self.basis[(3, j)],
                )
            })
            .collect()
    }

    /// Residual of v against the subspace, relative to |v|.
    pub fn residual_of(&self, v: &BoundaryForm) -> f64 {
        let x = v.to_vector();
        let n = x.norm();
        if n == 0.0 {
            return 0.0;
        }
        let proj = &self.basis * (self.basis.adjoint() * &x);
        (x - proj).norm() / n
    }

    pub fn contains(&self, v: &BoundaryForm) -> bool {
        self.residual_of(v) < SUBSPACE_TOL
    }
}

fn to_dynamic(m: &Matrix4<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(4, 4, |r, c| m[(r, c)])
}

/// omega-orthogonal complement: all g with omega(g, f) = 0 for every f in L.
pub fn omega_complement(l: &BoundarySubspace) -> BoundarySubspace {
    // omega(g, f) = g^H J f, so the complement is the kernel of B^H J.
    let rows = l.basis().adjoint() * to_dynamic(&lagrange_gram());
    BoundarySubspace::from_constraints(&rows)
}

/// Image of L under the parity map (linear).
pub fn apply_p(l: &BoundarySubspace) -> BoundarySubspace {
    BoundarySubspace { basis: to_dynamic(&parity_matrix()) * l.basis() }
}

/// Image of L under the PT map (antilinear): conjugate the basis, then apply
/// the linear parity part.
pub fn apply_pt(l: &BoundarySubspace) -> BoundarySubspace {
    BoundarySubspace { basis: to_dynamic(&parity_matrix()) * l.basis().map(|c| c.conj()) }
}

/// Symmetric projection residual between two subspaces. Zero iff equal.
pub fn subspace_distance(l: &BoundarySubspace, m: &BoundarySubspace) -> f64 {
    let bl = l.basis();
    let bm = m.basis();
    let rl = (bl - bm * (bm.adjoint() * bl)).norm();
    let rm = (bm - bl * (bl.adjoint() * bm)).norm();
    rl.max(rm)
}

pub fn subspace_equal(l: &BoundarySubspace, m: &BoundarySubspace) -> bool {
    l.dim() == m.dim() && subspace_distance(l, m) < SUBSPACE_TOL
}

pub fn intersection_dimension(l: &BoundarySubspace, m: &BoundarySubspace) -> usize {
    if l.dim() == 0 || m.dim() == 0 {
        return 0;
    }
    let mut stacked = DMatrix::zeros(4, l.dim() + m.dim());
    stacked.view_mut((0, 0), (4, l.dim())).copy_from(l.basis());
    stacked.view_mut((0, l.dim()), (4, m.dim())).copy_from(m.basis());
    l.dim() + m.dim() - numerical_rank(&stacked)
}

/// Classify a subspace by linear algebra alone:
/// self-adjoint iff L equals its omega-complement, P-self-adjoint iff L
/// equals the parity image of the complement, PT-symmetric iff L is
/// PT-invariant.
pub fn oracle_classify(l: &BoundarySubspace) -> ClassificationReport {
    let complement = omega_complement(l);
    ClassificationReport {
        dimension: l.dim(),
        self_adjoint: subspace_equal(l, &complement),
        p_self_adjoint: subspace_equal(l, &apply_p(&complement)),
        pt_symmetric: subspace_equal(l, &apply_pt(l)),
        phase: None,
        normal_form: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn form(a1: f64, a2: f64, b1: f64, b2: f64) -> BoundaryForm {
        BoundaryForm::new(c(a1, 0.0), c(a2, 0.0), c(b1, 0.0), c(b2, 0.0))
    }

    fn span(vs: &[[f64; 4]]) -> BoundarySubspace {
        let m = DMatrix::from_fn(4, vs.len(), |r, col| c(vs[col][r], 0.0));
        BoundarySubspace::from_spanning(&m)
    }

    #[test]
    fn omega_single_terms() {
        assert_eq!(omega(&form(0.0, 1.0, 0.0, 0.0), &form(1.0, 0.0, 0.0, 0.0)), c(-1.0, 0.0));
        assert_eq!(omega(&form(0.0, 0.0, 0.0, 1.0), &form(0.0, 0.0, 1.0, 0.0)), c(1.0, 0.0));
        let v = form(1.0, 0.0, 1.0, 0.0);
        assert_eq!(omega(&v, &v), c(0.0, 0.0));
    }

    #[test]
    fn gram_is_skew_hermitian_and_unitary() {
        let j = lagrange_gram();
        assert!((j.adjoint() + j).norm() < 1e-15);
        assert!((j.adjoint() * j - Matrix4::identity()).norm() < 1e-15);
    }

    #[test]
    fn complement_of_identity_mixed_subspace_is_itself() {
        let l = span(&[[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]]);
        let lc = omega_complement(&l);
        assert!(subspace_equal(&l, &lc));
    }

    #[test]
    fn complement_of_full_space_is_zero() {
        let full = BoundarySubspace::full();
        assert_eq!(omega_complement(&full).dim(), 0);
        assert_eq!(omega_complement(&BoundarySubspace::zero()).dim(), 4);
    }

    #[test]
    fn complement_of_three_dim_alpha1_zero() {
        // {alpha1 = 0} has complement spanned by (0,1,0,0)
        let l = span(&[[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]);
        let lc = omega_complement(&l);
        assert_eq!(lc.dim(), 1);
        assert!(lc.contains(&form(0.0, 1.0, 0.0, 0.0)));
    }

    #[test]
    fn parity_fixes_and_maps() {
        let l = span(&[[1.0, 0.0, 1.0, 0.0]]);
        assert!(subspace_equal(&apply_p(&l), &l));
        let m = span(&[[0.0, 1.0, 0.0, 1.0]]);
        assert!(subspace_equal(&apply_pt(&m), &m));
    }

    #[test]
    fn oracle_classify_examples() {
        let l = span(&[[1.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]]);
        let r = oracle_classify(&l);
        assert!(r.self_adjoint && r.p_self_adjoint && r.pt_symmetric);

        let line = span(&[[0.0, 1.0, 0.0, 1.0]]);
        let r = oracle_classify(&line);
        assert!(r.pt_symmetric && !r.self_adjoint && !r.p_self_adjoint);
    }

    #[test]
    fn intersection_dimensions() {
        let l = span(&[[1.0, 0.0, 0.0, 0.0]]);
        let m = span(&[[0.0, 1.0, 0.0, 0.0]]);
        assert_eq!(intersection_dimension(&l, &m), 0);
        assert!(subspace_equal(&l, &l));
    }

    fn arb_c64() -> impl Strategy<Value = Complex64> {
        (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(re, im)| Complex64::new(re, im))
    }

    fn arb_form() -> impl Strategy<Value = BoundaryForm> {
        (arb_c64(), arb_c64(), arb_c64(), arb_c64())
            .prop_map(|(a1, a2, b1, b2)| BoundaryForm::new(a1, a2, b1, b2))
    }

    fn arb_subspace(k: usize) -> impl Strategy<Value = BoundarySubspace> {
        proptest::collection::vec(arb_c64(), 4 * k).prop_map(move |entries| {
            let m = DMatrix::from_fn(4, k, |r, col| entries[4 * col + r]);
            BoundarySubspace::from_spanning(&m)
        })
    }

    proptest! {
        #[test]
        fn omega_is_skew_hermitian(g in arb_form(), f in arb_form()) {
            let lhs = omega(&f, &g);
            let rhs = -omega(&g, &f).conj();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn double_complement_returns_l(k in 1usize..=3, seed in proptest::arbitrary::any::<u64>()) {
            // build a deterministic pseudo-random subspace from the seed
            let mut state = seed | 1;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
            };
            let m = DMatrix::from_fn(4, k, |_, _| Complex64::new(next(), next()));
            let l = BoundarySubspace::from_spanning(&m);
            prop_assume!(l.dim() == k);
            let lcc = omega_complement(&omega_complement(&l));
            prop_assert!(subspace_equal(&l, &lcc));
            prop_assert_eq!(omega_complement(&l).dim(), 4 - k);
        }

        #[test]
        fn pt_is_an_involution_on_subspaces(l in arb_subspace(2)) {
            prop_assert!(subspace_equal(&apply_pt(&apply_pt(&l)), &l));
            prop_assert!(subspace_equal(&apply_p(&apply_p(&l)), &l));
        }

        #[test]
        fn parity_commutes_with_complement(l in arb_subspace(2)) {
            let lhs = apply_p(&omega_complement(&l));
            let rhs = omega_complement(&apply_p(&l));
            prop_assert!(subspace_equal(&lhs, &rhs));
        }
    }
}
