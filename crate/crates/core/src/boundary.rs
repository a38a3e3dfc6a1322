//! Closed-form representation of extensions by boundary conditions, their
//! adjoints and P-adjoints, and the classification criteria for the three
//! symmetry classes (self-adjoint, P-self-adjoint, PT-symmetric).
//!
//! Boundary data lives in the 4-dimensional complex space of functionals
//! (alpha1, alpha2, beta1, beta2). An extension is selected by 4 - k
//! independent linear conditions on that vector, k in {1, 2, 3}. Everything
//! in this module works on the condition coefficients directly; the subspace
//! route lives in [`crate::oracle`] and is used only for cross-checks.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::{DMatrix, Matrix2, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{self, BoundarySubspace, RANK_TOL};

/// Tolerance for the closed-form predicate comparisons (matches the oracle's
/// rank tolerance so the two routes agree on random inputs).
pub const PRED_TOL: f64 = 1e-9;

/// Tolerance for angle congruences mod pi.
pub const ANGLE_TOL: f64 = 1e-9;

/// Threshold below which sin or cos of a stored angle counts as exactly zero
/// (the parameterization degenerates there and the phase becomes immaterial).
const DEG_TOL: f64 = 1e-12;

fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The boundary-value 4-vector (alpha1, alpha2, beta1, beta2) of a function
/// in the maximal domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryForm {
    pub a1: Complex64,
    pub a2: Complex64,
    pub b1: Complex64,
    pub b2: Complex64,
}

impl BoundaryForm {
    pub fn new(a1: Complex64, a2: Complex64, b1: Complex64, b2: Complex64) -> Self {
        Self { a1, a2, b1, b2 }
    }

    pub fn zero() -> Self {
        Self::new(cr(0.0), cr(0.0), cr(0.0), cr(0.0))
    }

    pub fn to_vector(self) -> Vector4<Complex64> {
        Vector4::new(self.a1, self.a2, self.b1, self.b2)
    }

    pub fn from_vector(v: &Vector4<Complex64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    /// Action of parity on boundary values: (a1,a2,b1,b2) -> (b1,-b2,a1,-a2).
    /// A linear involution.
    pub fn p_map(self) -> Self {
        Self::new(self.b1, -self.b2, self.a1, -self.a2)
    }

    /// Action of PT on boundary values: conjugate, then swap as in `p_map`.
    /// An antilinear involution.
    pub fn pt_map(self) -> Self {
        Self::new(self.b1.conj(), -self.b2.conj(), self.a1.conj(), -self.a2.conj())
    }

    pub fn norm(self) -> f64 {
        self.to_vector().norm()
    }
}

/// Separated boundary conditions
///   alpha1 * xi * cos(alpha) - alpha2 * sin(alpha) = 0,
///   beta1 * eta * cos(beta)  - beta2 * sin(beta)   = 0,
/// with |xi| = |eta| = 1 and angles in [0, 2*pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparatedBC {
    pub xi: Complex64,
    pub eta: Complex64,
    pub alpha: f64,
    pub beta: f64,
}

fn reduce_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r == TAU {
        0.0
    } else {
        r
    }
}

fn angle_is_degenerate(t: f64) -> bool {
    t.sin().abs() <= DEG_TOL || t.cos().abs() <= DEG_TOL
}

impl SeparatedBC {
    /// Validates the unit-modulus invariant, reduces angles mod 2*pi and
    /// forces the phase to 1 at degenerate angles (where it is immaterial).
    pub fn new(xi: Complex64, eta: Complex64, alpha: f64, beta: f64) -> Result<Self> {
        for (name, u) in [("xi", xi), ("eta", eta)] {
            if (u.norm() - 1.0).abs() > PRED_TOL {
                return Err(Error::InvalidSpec(format!("|{name}| must be 1, got {}", u.norm())));
            }
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidSpec("angles must be finite".into()));
        }
        let alpha = reduce_angle(alpha);
        let beta = reduce_angle(beta);
        let xi = if angle_is_degenerate(alpha) { cr(1.0) } else { xi };
        let eta = if angle_is_degenerate(beta) { cr(1.0) } else { eta };
        Ok(Self { xi, eta, alpha, beta })
    }

    /// Coefficients of the condition at the left end, as (p, q) with
    /// p*alpha1 + q*alpha2 = 0.
    fn left_coeffs(&self) -> (Complex64, Complex64) {
        (self.xi * cr(self.alpha.cos()), cr(-self.alpha.sin()))
    }

    fn right_coeffs(&self) -> (Complex64, Complex64) {
        (self.eta * cr(self.beta.cos()), cr(-self.beta.sin()))
    }
}

/// Which pair of functionals is expressed through the other in a mixed
/// condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixedDirection {
    /// (alpha1, alpha2)^T = M (beta1, beta2)^T
    AlphaFromBeta,
    /// (beta1, beta2)^T = M (alpha1, alpha2)^T
    BetaFromAlpha,
}

/// Mixed boundary conditions coupling the two ends through a full-rank
/// 2x2 matrix. Rank-deficient matrices are rejected at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedBC {
    pub direction: MixedDirection,
    pub matrix: [[Complex64; 2]; 2],
}

fn to_matrix2(m: &[[Complex64; 2]; 2]) -> Matrix2<Complex64> {
    Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

fn from_matrix2(m: &Matrix2<Complex64>) -> [[Complex64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

impl MixedBC {
    pub fn new(direction: MixedDirection, matrix: [[Complex64; 2]; 2]) -> Result<Self> {
        let sv = to_matrix2(&matrix).singular_values();
        if !(sv[0] > 0.0) || sv[1] <= RANK_TOL * sv[0] {
            return Err(Error::RankDeficient { singular_values: sv.iter().cloned().collect() });
        }
        Ok(Self { direction, matrix })
    }

    fn det(&self) -> Complex64 {
        self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0]
    }

    fn scale(&self) -> f64 {
        self.matrix.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// A single condition a*alpha1 + b*alpha2 = c*beta1 + d*beta2 selecting a
/// 3-dimensional extension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeDimBC {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl ThreeDimBC {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        if a.norm() + b.norm() + c.norm() + d.norm() == 0.0 {
            return Err(Error::InvalidSpec("all four coefficients are zero".into()));
        }
        Ok(Self { a, b, c, d })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OneDimVariant {
    /// One condition on the alpha pair, plus the beta pair expressed through
    /// the alpha pair by a 2x2 matrix.
    I,
    /// One condition on the beta pair, plus the alpha pair expressed through
    /// the beta pair.
    II,
}

/// Three independent conditions selecting a 1-dimensional extension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneDimBC {
    pub variant: OneDimVariant,
    pub pair: (Complex64, Complex64),
    pub matrix: [[Complex64; 2]; 2],
}

impl OneDimBC {
    pub fn new(
        variant: OneDimVariant,
        pair: (Complex64, Complex64),
        matrix: [[Complex64; 2]; 2],
    ) -> Result<Self> {
        if pair.0.norm() + pair.1.norm() == 0.0 {
            return Err(Error::InvalidSpec("pair coefficients are both zero".into()));
        }
        Ok(Self { variant, pair, matrix })
    }
}

/// A parameterized boundary condition selecting a bi-extension of the
/// minimal operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecJson", into = "SpecJson")]
pub enum ExtensionSpec {
    Separated(SeparatedBC),
    Mixed(MixedBC),
    ThreeDim(ThreeDimBC),
    OneDim(OneDimBC),
}

impl From<SeparatedBC> for ExtensionSpec {
    fn from(s: SeparatedBC) -> Self {
        Self::Separated(s)
    }
}
impl From<MixedBC> for ExtensionSpec {
    fn from(s: MixedBC) -> Self {
        Self::Mixed(s)
    }
}
impl From<ThreeDimBC> for ExtensionSpec {
    fn from(s: ThreeDimBC) -> Self {
        Self::ThreeDim(s)
    }
}
impl From<OneDimBC> for ExtensionSpec {
    fn from(s: OneDimBC) -> Self {
        Self::OneDim(s)
    }
}

/// Classification flags plus the PT normal-form data for mixed conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub dimension: usize,
    pub self_adjoint: bool,
    pub p_self_adjoint: bool,
    pub pt_symmetric: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_matrix")]
    pub normal_form: Option<[[Complex64; 2]; 2]>,
}

fn ser_opt_matrix<S: serde::Serializer>(
    m: &Option<[[Complex64; 2]; 2]>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    crate::cpair::matrix2::serialize(m.as_ref().expect("skipped when none"), s)
}

impl ClassificationReport {
    pub fn flags(&self) -> (bool, bool, bool) {
        (self.self_adjoint, self.p_self_adjoint, self.pt_symmetric)
    }
}

/// Rewrite a one-end condition p*x1 + q*x2 = 0, (p, q) != 0, in the
/// normalized form (xi*cos t)*x1 - (sin t)*x2 = 0 with |xi| = 1 and
/// sin t >= 0. The phase is 1 exactly when (p, q) is proportional to a real
/// vector, which makes "xi = eta = 1" a faithful self-adjointness test; the
/// residual sign freedom is fixed by keeping Re(xi) >= 0.
fn normalize_end_condition(p: Complex64, q: Complex64) -> (Complex64, f64) {
    let scale = (p.norm_sqr() + q.norm_sqr()).sqrt();
    debug_assert!(scale > 0.0);
    if q.norm() <= DEG_TOL * scale {
        return (cr(1.0), 0.0);
    }
    if p.norm() <= DEG_TOL * scale {
        return (cr(1.0), FRAC_PI_2);
    }
    let qhat = q / q.norm();
    let u = -p * qhat.conj() / scale; // candidate xi * cos t
    let sin_t = q.norm() / scale;
    if u.im.abs() <= DEG_TOL {
        // real-proportional condition: xi = 1, signed cosine
        return (cr(1.0), reduce_angle(sin_t.atan2(u.re)));
    }
    let mut xi = u / u.norm();
    let mut cos_t = u.norm();
    if xi.re < 0.0 || (xi.re == 0.0 && xi.im < 0.0) {
        xi = -xi;
        cos_t = -cos_t;
    }
    (xi, reduce_angle(sin_t.atan2(cos_t)))
}

/// Three cases for a rank-2 system  L (alpha1,alpha2)^T = R (beta1,beta2)^T
/// given as the 2x4 matrix [L | R]: invertible L gives mixed conditions
/// expressing alpha through beta, invertible R the reverse, and doubly
/// degenerate blocks split into separated conditions.
pub fn canonicalize(rows: &[[Complex64; 4]; 2]) -> Result<ExtensionSpec> {
    let full = DMatrix::from_fn(2, 4, |r, col| rows[r][col]);
    let sv = full.singular_values();
    let smax = sv[0];
    if !(smax > 0.0) || sv[1] <= RANK_TOL * smax {
        return Err(Error::RankDeficient { singular_values: sv.iter().cloned().collect() });
    }
    let l = Matrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1]);
    let r = Matrix2::new(rows[0][2], rows[0][3], rows[1][2], rows[1][3]);
    let sv_l = l.singular_values();
    if sv_l[1] > RANK_TOL * smax {
        let m = l.try_inverse().expect("full-rank block") * r;
        let spec = MixedBC::new(MixedDirection::AlphaFromBeta, from_matrix2(&m))?;
        return Ok(spec.into());
    }
    let sv_r = r.singular_values();
    if sv_r[1] > RANK_TOL * smax {
        let m = r.try_inverse().expect("full-rank block") * l;
        let spec = MixedBC::new(MixedDirection::BetaFromAlpha, from_matrix2(&m))?;
        return Ok(spec.into());
    }
    // Both blocks are rank one: the system separates. A left null covector of
    // R turns the system into a pure alpha condition, and vice versa.
    let alpha_cov = left_null_covector(&r) * l;
    let beta_cov = left_null_covector(&l) * r;
    let a_norm = (alpha_cov[0].norm_sqr() + alpha_cov[1].norm_sqr()).sqrt();
    let b_norm = (beta_cov[0].norm_sqr() + beta_cov[1].norm_sqr()).sqrt();
    if a_norm <= RANK_TOL * smax || b_norm <= RANK_TOL * smax {
        return Err(Error::RankDeficient { singular_values: sv.iter().cloned().collect() });
    }
    let (xi, alpha) = normalize_end_condition(alpha_cov[0], alpha_cov[1]);
    let (eta, beta) = normalize_end_condition(beta_cov[0], beta_cov[1]);
    Ok(SeparatedBC::new(xi, eta, alpha, beta)?.into())
}

/// Row covector u with u * m ~ 0, for a (numerically) rank-deficient 2x2 m.
fn left_null_covector(m: &Matrix2<Complex64>) -> nalgebra::RowVector2<Complex64> {
    let svd = m.svd(true, false);
    let u = svd.u.expect("svd with u");
    nalgebra::RowVector2::new(u[(0, 1)].conj(), u[(1, 1)].conj())
}

impl ExtensionSpec {
    /// dim(dom of the extension / dom of the minimal operator):
    /// 4 minus the number of independent boundary conditions.
    pub fn dimension(&self) -> usize {
        match self {
            Self::Separated(_) | Self::Mixed(_) => 2,
            Self::ThreeDim(_) => 3,
            Self::OneDim(_) => 1,
        }
    }

    /// The conditions as rows of an m x 4 system on (a1, a2, b1, b2).
    pub fn constraint_rows(&self) -> Vec<[Complex64; 4]> {
        let z = cr(0.0);
        let one = cr(1.0);
        match self {
            Self::Separated(s) => {
                let (p, q) = s.left_coeffs();
                let (r, t) = s.right_coeffs();
                vec![[p, q, z, z], [z, z, r, t]]
            }
            Self::Mixed(m) => {
                let mm = &m.matrix;
                match m.direction {
                    MixedDirection::AlphaFromBeta => vec![
                        [one, z, -mm[0][0], -mm[0][1]],
                        [z, one, -mm[1][0], -mm[1][1]],
                    ],
                    MixedDirection::BetaFromAlpha => vec![
                        [-mm[0][0], -mm[0][1], one, z],
                        [-mm[1][0], -mm[1][1], z, one],
                    ],
                }
            }
            Self::ThreeDim(t) => vec![[t.a, t.b, -t.c, -t.d]],
            Self::OneDim(o) => {
                let n = &o.matrix;
                match o.variant {
                    OneDimVariant::I => vec![
                        [o.pair.0, o.pair.1, z, z],
                        [n[0][0], n[0][1], -one, z],
                        [n[1][0], n[1][1], z, -one],
                    ],
                    OneDimVariant::II => vec![
                        [z, z, o.pair.0, o.pair.1],
                        [-one, z, n[0][0], n[0][1]],
                        [z, -one, n[1][0], n[1][1]],
                    ],
                }
            }
        }
    }

    /// The subspace of boundary vectors satisfying the conditions, with the
    /// dimension validated against the variant.
    pub fn boundary_subspace(&self) -> Result<BoundarySubspace> {
        let rows = self.constraint_rows();
        let m = DMatrix::from_fn(rows.len(), 4, |r, col| rows[r][col]);
        let sub = BoundarySubspace::from_constraints(&m);
        if sub.dim() != self.dimension() {
            let sv = m.singular_values();
            return Err(Error::RankDeficient { singular_values: sv.iter().cloned().collect() });
        }
        Ok(sub)
    }

    /// Closed-form spec of the adjoint extension. Its dimension is
    /// 4 - dimension(self) and its boundary subspace is the
    /// omega-complement of this one's.
    pub fn adjoint(&self) -> ExtensionSpec {
        match self {
            Self::Separated(s) => Self::Separated(
                SeparatedBC::new(s.xi.conj(), s.eta.conj(), s.alpha, s.beta)
                    .expect("unit phases are preserved"),
            ),
            Self::Mixed(m) => {
                let [[a, b], [c, d]] = m.matrix;
                let flipped = [[d.conj(), -b.conj()], [-c.conj(), a.conj()]];
                let direction = match m.direction {
                    MixedDirection::AlphaFromBeta => MixedDirection::BetaFromAlpha,
                    MixedDirection::BetaFromAlpha => MixedDirection::AlphaFromBeta,
                };
                Self::Mixed(MixedBC::new(direction, flipped).expect("same rank as the original"))
            }
            Self::ThreeDim(t) => Self::OneDim(three_dim_adjoint(t)),
            Self::OneDim(o) => {
                let (a, b, cc, d) = one_dim_adjoint_sum_coeffs(o);
                // sum form a*a1 + b*a2 + cc*b1 + d*b2 = 0 is the eq-form
                // with the beta coefficients negated
                Self::ThreeDim(
                    ThreeDimBC::new(a, b, -cc, -d).expect("pair coefficients are nonzero"),
                )
            }
        }
    }

    /// Spec whose boundary subspace is the parity image of this one's.
    pub fn p_transform(&self) -> ExtensionSpec {
        match self {
            Self::Separated(s) => Self::Separated(
                SeparatedBC::new(s.eta, s.xi, reduce_angle(-s.beta), reduce_angle(-s.alpha))
                    .expect("unit phases are preserved"),
            ),
            Self::Mixed(m) => {
                let direction = match m.direction {
                    MixedDirection::AlphaFromBeta => MixedDirection::BetaFromAlpha,
                    MixedDirection::BetaFromAlpha => MixedDirection::AlphaFromBeta,
                };
                Self::Mixed(
                    MixedBC::new(direction, conjugate_by_sign_flip(&m.matrix))
                        .expect("same rank as the original"),
                )
            }
            Self::ThreeDim(t) => {
                Self::ThreeDim(ThreeDimBC::new(t.c, -t.d, t.a, -t.b).expect("nonzero"))
            }
            Self::OneDim(o) => {
                let variant = match o.variant {
                    OneDimVariant::I => OneDimVariant::II,
                    OneDimVariant::II => OneDimVariant::I,
                };
                Self::OneDim(
                    OneDimBC::new(
                        variant,
                        (o.pair.0, -o.pair.1),
                        conjugate_by_sign_flip(&o.matrix),
                    )
                    .expect("nonzero pair"),
                )
            }
        }
    }

    /// Closed-form spec of the P-adjoint (Krein-space adjoint with the parity
    /// fundamental symmetry): the parity image of the adjoint domain.
    pub fn p_adjoint(&self) -> ExtensionSpec {
        self.adjoint().p_transform()
    }

    /// Criterion: separated conditions are self-adjoint iff both end
    /// conditions are proportional to real vectors (normalized phases both 1);
    /// mixed ones iff the matrix is a unimodular phase times a real matrix
    /// with unit determinant. Dimensions 1 and 3 are never self-adjoint.
    pub fn is_self_adjoint(&self) -> bool {
        match self {
            Self::Separated(s) => {
                let (p, q) = s.left_coeffs();
                let (r, t) = s.right_coeffs();
                let (xi_c, _) = normalize_end_condition(p, q);
                let (eta_c, _) = normalize_end_condition(r, t);
                (xi_c - cr(1.0)).norm() <= PRED_TOL && (eta_c - cr(1.0)).norm() <= PRED_TOL
            }
            Self::Mixed(m) => {
                let det = m.det();
                if (det.norm() - 1.0).abs() > PRED_TOL * (1.0 + det.norm()) {
                    return false;
                }
                let phase = Complex64::from_polar(1.0, -det.arg() / 2.0);
                let tol = PRED_TOL * m.scale().max(1.0);
                m.matrix.iter().flatten().all(|z| (z * phase).im.abs() <= tol)
            }
            _ => false,
        }
    }

    /// Criterion: separated conditions are P-self-adjoint iff the angles sum
    /// to 0 mod pi with phase product 1, or differ by 0 mod pi with phase
    /// product -1 (at degenerate angles only the angle sum matters); mixed
    /// ones iff d = conj(a) with b and c real.
    pub fn is_p_self_adjoint(&self) -> bool {
        match self {
            Self::Separated(s) => {
                if angle_is_degenerate(s.alpha) || angle_is_degenerate(s.beta) {
                    return (s.alpha + s.beta).sin().abs() <= ANGLE_TOL;
                }
                let xe = s.xi * s.eta;
                ((s.alpha + s.beta).sin().abs() <= ANGLE_TOL && (xe - cr(1.0)).norm() <= PRED_TOL)
                    || ((s.alpha - s.beta).sin().abs() <= ANGLE_TOL
                        && (xe + cr(1.0)).norm() <= PRED_TOL)
            }
            Self::Mixed(m) => {
                let [[a, b], [cc, d]] = m.matrix;
                let tol = PRED_TOL * m.scale().max(1.0);
                (d - a.conj()).norm() <= tol && b.im.abs() <= tol && cc.im.abs() <= tol
            }
            _ => false,
        }
    }

    /// Criterion: separated conditions are PT-symmetric iff P-self-adjoint;
    /// mixed ones iff the matrix is a phase times [[a, b], [g, conj(a)]]
    /// with b, g real and unit determinant; a single 3-dim condition iff
    /// |a| = |c|, |b| = |d| and a*conj(d) + b*conj(c) = 0; 1-dim conditions
    /// iff the coefficients of the (3-dim) adjoint satisfy the same test.
    pub fn is_pt_symmetric(&self) -> bool {
        match self {
            Self::Separated(_) => self.is_p_self_adjoint(),
            Self::Mixed(m) => pt_normal_form(m).is_some(),
            Self::ThreeDim(t) => eq3_holds(t.a, t.b, t.c, t.d),
            Self::OneDim(o) => {
                let (a, b, cc, d) = one_dim_adjoint_sum_coeffs(o);
                eq3_holds(a, b, cc, d)
            }
        }
    }

    /// Aggregate the three predicates, the extension dimension, and the PT
    /// normal form (phase and rescaled matrix) for mixed conditions. In debug
    /// builds the flags are cross-validated against the subspace oracle.
    pub fn classify(&self) -> ClassificationReport {
        let pt = self.is_pt_symmetric();
        let (phase, normal_form) = match (pt, self) {
            (true, Self::Mixed(m)) => {
                let (phi, nf) = pt_normal_form(m).expect("pt predicate just held");
                (Some(phi), Some(nf))
            }
            _ => (None, None),
        };
        let report = ClassificationReport {
            dimension: self.dimension(),
            self_adjoint: self.is_self_adjoint(),
            p_self_adjoint: self.is_p_self_adjoint(),
            pt_symmetric: pt,
            phase,
            normal_form,
        };
        #[cfg(debug_assertions)]
        {
            if let Ok(sub) = self.boundary_subspace() {
                let o = oracle::oracle_classify(&sub);
                debug_assert_eq!(
                    report.flags(),
                    o.flags(),
                    "internal error: closed-form flags disagree with the subspace oracle for {self:?}"
                );
            }
        }
        report
    }
}

/// |a| = |c|, |b| = |d|, a*conj(d) + b*conj(c) = 0, at PRED_TOL relative.
fn eq3_holds(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm()).max(1e-300);
    (a.norm() - c.norm()).abs() <= PRED_TOL * scale
        && (b.norm() - d.norm()).abs() <= PRED_TOL * scale
        && (a * d.conj() + b * c.conj()).norm() <= PRED_TOL * scale * scale
}

/// PT normal form of a mixed matrix: the phase phi = arg(det)/2 and
/// N = exp(-i*phi) * M, accepted when |det| = 1, the off-diagonal entries of
/// N are real and its diagonal entries are mutually conjugate.
fn pt_normal_form(m: &MixedBC) -> Option<(f64, [[Complex64; 2]; 2])> {
    let det = m.det();
    if (det.norm() - 1.0).abs() > PRED_TOL * (1.0 + det.norm()) {
        return None;
    }
    let phi = det.arg() / 2.0;
    let rot = Complex64::from_polar(1.0, -phi);
    let n: Vec<Complex64> = m.matrix.iter().flatten().map(|z| z * rot).collect();
    let tol = PRED_TOL * m.scale().max(1.0);
    let ok = n[1].im.abs() <= tol && n[2].im.abs() <= tol && (n[3] - n[0].conj()).norm() <= tol;
    ok.then(|| (phi, [[n[0], n[1]], [n[2], n[3]]]))
}

/// Adjoint of a 3-dim condition as a 1-dim spec, branching on the largest
/// coefficient for stability.
fn three_dim_adjoint(t: &ThreeDimBC) -> OneDimBC {
    let z = cr(0.0);
    let (a, b, c, d) = (t.a, t.b, t.c, t.d);
    let mags = [a.norm(), b.norm(), c.norm(), d.norm()];
    let argmax = (0..4).max_by(|&i, &j| mags[i].total_cmp(&mags[j])).expect("nonempty");
    let (variant, pair, matrix) = match argmax {
        0 => (OneDimVariant::I, (a.conj(), b.conj()), [[z, -d.conj() / a.conj()], [z, c.conj() / a.conj()]]),
        1 => (OneDimVariant::I, (a.conj(), b.conj()), [[d.conj() / b.conj(), z], [-c.conj() / b.conj(), z]]),
        2 => (OneDimVariant::II, (c.conj(), d.conj()), [[z, -b.conj() / c.conj()], [z, a.conj() / c.conj()]]),
        _ => (OneDimVariant::II, (c.conj(), d.conj()), [[b.conj() / d.conj(), z], [-a.conj() / d.conj(), z]]),
    };
    OneDimBC::new(variant, pair, matrix).expect("largest coefficient is nonzero")
}

/// Coefficients (a, b, c, d) of the sum form
/// a*alpha1 + b*alpha2 + c*beta1 + d*beta2 = 0 describing the adjoint of a
/// 1-dim condition. Derived from the Lagrange-form complement of the spanning
/// vector; the derivation fixes the relative sign between the pairs.
fn one_dim_adjoint_sum_coeffs(o: &OneDimBC) -> (Complex64, Complex64, Complex64, Complex64) {
    let [[al, be], [ga, de]] = o.matrix;
    let (p, q) = o.pair;
    match o.variant {
        OneDimVariant::I => {
            // spanning vector v = (-q, p, be*p - al*q, de*p - ga*q);
            // the condition on g is g1*conj(v2) - g2*conj(v1) - g3*conj(v4) + g4*conj(v3) = 0
            let a = p.conj();
            let b = q.conj();
            let c = -(de * p - ga * q).conj();
            let d = (be * p - al * q).conj();
            (a, b, c, d)
        }
        OneDimVariant::II => {
            // spanning vector v = (be*q - al*... ) with (b1, b2) = t(-q, p):
            // v = (al*(-q) + be*p, ga*(-q) + de*p, -q, p)
            let v1 = be * p - al * q;
            let v2 = de * p - ga * q;
            let a = v2.conj();
            let b = -v1.conj();
            let c = -p.conj();
            let d = -q.conj();
            (a, b, c, d)
        }
    }
}

/// D m D with D = diag(1, -1): flips the off-diagonal signs.
fn conjugate_by_sign_flip(m: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [[m[0][0], -m[0][1]], [-m[1][0], m[1][1]]]
}

// --- JSON encoding -----------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum SpecJson {
    Separated {
        #[serde(with = "crate::cpair")]
        xi: Complex64,
        #[serde(with = "crate::cpair")]
        eta: Complex64,
        alpha: f64,
        beta: f64,
    },
    Mixed {
        direction: MixedDirection,
        #[serde(with = "crate::cpair::matrix2")]
        matrix: [[Complex64; 2]; 2],
    },
    ThreeDim {
        #[serde(with = "crate::cpair::array")]
        coeffs: [Complex64; 4],
    },
    OneDim {
        variant: OneDimVariant,
        #[serde(with = "crate::cpair::array")]
        pair: [Complex64; 2],
        #[serde(with = "crate::cpair::matrix2")]
        matrix: [[Complex64; 2]; 2],
    },
}

impl From<ExtensionSpec> for SpecJson {
    fn from(spec: ExtensionSpec) -> Self {
        match spec {
            ExtensionSpec::Separated(s) => {
                Self::Separated { xi: s.xi, eta: s.eta, alpha: s.alpha, beta: s.beta }
            }
            ExtensionSpec::Mixed(m) => {
                Self::Mixed { direction: m.direction, matrix: m.matrix }
            }
            ExtensionSpec::ThreeDim(t) => Self::ThreeDim { coeffs: [t.a, t.b, t.c, t.d] },
            ExtensionSpec::OneDim(o) => Self::OneDim {
                variant: o.variant,
                pair: [o.pair.0, o.pair.1],
                matrix: o.matrix,
            },
        }
    }
}

impl TryFrom<SpecJson> for ExtensionSpec {
    type Error = Error;

    fn try_from(raw: SpecJson) -> Result<Self> {
        Ok(match raw {
            SpecJson::Separated { xi, eta, alpha, beta } => {
                SeparatedBC::new(xi, eta, alpha, beta)?.into()
            }
            SpecJson::Mixed { direction, matrix } => MixedBC::new(direction, matrix)?.into(),
            SpecJson::ThreeDim { coeffs } => {
                ThreeDimBC::new(coeffs[0], coeffs[1], coeffs[2], coeffs[3])?.into()
            }
            SpecJson::OneDim { variant, pair, matrix } => {
                OneDimBC::new(variant, (pair[0], pair[1]), matrix)?.into()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{apply_p, omega_complement, oracle_classify, subspace_equal};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mixed(direction: MixedDirection, m: [[f64; 2]; 4]) -> ExtensionSpec {
        // rows of 2x2 complex matrix given as [re, im] pairs, row-major
        let mat = [
            [c(m[0][0], m[0][1]), c(m[1][0], m[1][1])],
            [c(m[2][0], m[2][1]), c(m[3][0], m[3][1])],
        ];
        MixedBC::new(direction, mat).unwrap().into()
    }

    #[test]
    fn p_map_examples() {
        let v = BoundaryForm::new(cr(1.0), cr(0.0), cr(0.0), cr(0.0));
        assert_eq!(v.p_map(), BoundaryForm::new(cr(0.0), cr(0.0), cr(1.0), cr(0.0)));
        let w = BoundaryForm::new(cr(0.0), cr(1.0), cr(0.0), cr(1.0));
        assert_eq!(w.p_map(), BoundaryForm::new(cr(0.0), cr(-1.0), cr(0.0), cr(-1.0)));
    }

    #[test]
    fn pt_map_examples() {
        let w = BoundaryForm::new(cr(0.0), cr(1.0), cr(0.0), cr(1.0));
        assert_eq!(w.pt_map(), BoundaryForm::new(cr(0.0), cr(-1.0), cr(0.0), cr(-1.0)));
        let v = BoundaryForm::new(c(0.0, 1.0), cr(0.0), cr(0.0), cr(0.0));
        assert_eq!(v.pt_map(), BoundaryForm::new(cr(0.0), cr(0.0), c(0.0, -1.0), cr(0.0)));
    }

    #[test]
    fn canonicalize_identity_blocks() {
        // alpha1 = beta1, alpha2 = beta2 in L a = R b form has R = -I, so the
        // emitted matrix is -I (note the sign: the rows are [L | R]).
        let rows = [
            [cr(1.0), cr(0.0), cr(-1.0), cr(0.0)],
            [cr(0.0), cr(1.0), cr(0.0), cr(-1.0)],
        ];
        match canonicalize(&rows).unwrap() {
            ExtensionSpec::Mixed(m) => {
                assert_eq!(m.direction, MixedDirection::AlphaFromBeta);
                assert_eq!(m.matrix, [[cr(-1.0), cr(0.0)], [cr(0.0), cr(-1.0)]]);
            }
            other => panic!("expected mixed, got {other:?}"),
        }
    }

    #[test]
    fn canonicalize_inverts_left_block() {
        let rows = [
            [cr(2.0), cr(1.0), cr(1.0), cr(0.0)],
            [cr(1.0), cr(1.0), cr(0.0), cr(1.0)],
        ];
        match canonicalize(&rows).unwrap() {
            ExtensionSpec::Mixed(m) => {
                assert_eq!(m.direction, MixedDirection::AlphaFromBeta);
                let expect = [[cr(1.0), cr(-1.0)], [cr(-1.0), cr(2.0)]];
                for (row, erow) in m.matrix.iter().zip(&expect) {
                    for (got, want) in row.iter().zip(erow) {
                        assert!((got - want).norm() < 1e-12, "{got} vs {want}");
                    }
                }
                // residual of the original system on the resulting subspace
                let sub = ExtensionSpec::Mixed(m).boundary_subspace().unwrap();
                for bf in sub.basis_forms() {
                    let r1 = cr(2.0) * bf.a1 + bf.a2 - bf.b1;
                    let r2 = bf.a1 + bf.a2 - bf.b2;
                    assert!(r1.norm() < 1e-12 && r2.norm() < 1e-12);
                }
            }
            other => panic!("expected mixed, got {other:?}"),
        }
    }

    #[test]
    fn canonicalize_separated_split() {
        let rows = [
            [cr(1.0), cr(0.0), cr(0.0), cr(0.0)],
            [cr(0.0), cr(0.0), cr(1.0), cr(0.0)],
        ];
        match canonicalize(&rows).unwrap() {
            ExtensionSpec::Separated(s) => {
                // conditions alpha1 = 0 and beta1 = 0
                assert_eq!(s.xi, cr(1.0));
                assert_eq!(s.eta, cr(1.0));
                assert!(s.alpha.abs() < 1e-12 && s.beta.abs() < 1e-12);
            }
            other => panic!("expected separated, got {other:?}"),
        }
    }

    #[test]
    fn canonicalize_separated_with_row_mixing() {
        // alpha1 = beta1 and alpha1 = -beta1 jointly mean alpha1 = beta1 = 0
        let rows = [
            [cr(1.0), cr(0.0), cr(1.0), cr(0.0)],
            [cr(1.0), cr(0.0), cr(-1.0), cr(0.0)],
        ];
        let spec = canonicalize(&rows).unwrap();
        let sub = spec.boundary_subspace().unwrap();
        assert!(sub.contains(&BoundaryForm::new(cr(0.0), cr(1.0), cr(0.0), cr(0.0))));
        assert!(sub.contains(&BoundaryForm::new(cr(0.0), cr(0.0), cr(0.0), cr(1.0))));
    }

    #[test]
    fn canonicalize_rejects_rank_deficient_rows() {
        let rows = [
            [cr(1.0), cr(2.0), cr(0.0), cr(1.0)],
            [cr(2.0), cr(4.0), cr(0.0), cr(2.0)],
        ];
        match canonicalize(&rows) {
            Err(Error::RankDeficient { singular_values }) => {
                assert_eq!(singular_values.len(), 2);
            }
            other => panic!("expected rank error, got {other:?}"),
        }
    }

    #[test]
    fn mixed_rejects_rank_one_matrix() {
        let m = [[cr(1.0), cr(2.0)], [cr(2.0), cr(4.0)]];
        assert!(matches!(
            MixedBC::new(MixedDirection::AlphaFromBeta, m),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn dimensions_by_variant() {
        let t: ExtensionSpec =
            ThreeDimBC::new(cr(1.0), cr(0.0), cr(0.0), cr(0.0)).unwrap().into();
        assert_eq!(t.dimension(), 3);
        let s: ExtensionSpec = SeparatedBC::new(cr(1.0), cr(1.0), 0.3, 1.2).unwrap().into();
        assert_eq!(s.dimension(), 2);
        let o: ExtensionSpec = OneDimBC::new(
            OneDimVariant::I,
            (cr(1.0), cr(0.0)),
            [[cr(0.0), cr(0.0)], [cr(0.0), cr(1.0)]],
        )
        .unwrap()
        .into();
        assert_eq!(o.dimension(), 1);
    }

    #[test]
    fn subspace_examples() {
        let m = mixed(
            MixedDirection::AlphaFromBeta,
            [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]],
        );
        let sub = m.boundary_subspace().unwrap();
        assert!(sub.contains(&BoundaryForm::new(cr(1.0), cr(0.0), cr(1.0), cr(0.0))));
        assert!(sub.contains(&BoundaryForm::new(cr(0.0), cr(1.0), cr(0.0), cr(1.0))));

        let t: ExtensionSpec =
            ThreeDimBC::new(cr(1.0), cr(0.0), cr(0.0), cr(0.0)).unwrap().into();
        let sub = t.boundary_subspace().unwrap();
        assert_eq!(sub.dim(), 3);
        assert!(sub.contains(&BoundaryForm::new(cr(0.0), cr(1.0), cr(0.0), cr(0.0))));

        let o: ExtensionSpec = OneDimBC::new(
            OneDimVariant::I,
            (cr(1.0), cr(0.0)),
            [[cr(0.0), cr(0.0)], [cr(0.0), cr(1.0)]],
        )
        .unwrap()
        .into();
        let sub = o.boundary_subspace().unwrap();
        assert_eq!(sub.dim(), 1);
        assert!(sub.contains(&BoundaryForm::new(cr(0.0), cr(1.0), cr(0.0), cr(1.0))));
    }

    #[test]
    fn adjoint_of_separated_conjugates_phases() {
        let s = SeparatedBC::new(c(0.6, 0.8), cr(1.0), 0.7, 2.1).unwrap();
        let spec: ExtensionSpec = s.into();
        match spec.adjoint() {
            ExtensionSpec::Separated(a) => {
                assert_eq!(a.xi, c(0.6, -0.8));
                assert_eq!(a.eta, cr(1.0));
                assert_eq!(a.alpha, 0.7);
                assert_eq!(a.beta, 2.1);
            }
            other => panic!("expected separated, got {other:?}"),
        }
    }

    #[test]
    fn adjoint_of_three_dim_1000() {
        let t: ExtensionSpec =
            ThreeDimBC::new(cr(1.0), cr(0.0), cr(0.0), cr(0.0)).unwrap().into();
        let a = t.adjoint();
        // conditions alpha1 = 0, beta1 = 0, beta2 = 0: subspace span{(0,1,0,0)}
        let sub = a.boundary_subspace().unwrap();
        assert_eq!(sub.dim(), 1);
        assert!(sub.contains(&BoundaryForm::new(cr(0.0), cr(1.0), cr(0.0), cr(0.0))));
        // cross-check against the omega-complement oracle
        let lc = omega_complement(&t.boundary_subspace().unwrap());
        assert!(subspace_equal(&sub, &lc));
    }

    #[test]
    fn adjoint_of_mixed_flips_and_conjugates() {
        let m = MixedBC::new(
            MixedDirection::AlphaFromBeta,
            [[c(1.0, 2.0), c(0.0, -1.0)], [c(3.0, 0.0), c(0.5, 0.5)]],
        )
        .unwrap();
        let spec: ExtensionSpec = m.into();
        match spec.adjoint() {
            ExtensionSpec::Mixed(a) => {
                assert_eq!(a.direction, MixedDirection::BetaFromAlpha);
                assert_eq!(a.matrix[0][0], c(0.5, -0.5));
                assert_eq!(a.matrix[0][1], c(0.0, -1.0));
                assert_eq!(a.matrix[1][0], c(-3.0, 0.0));
                assert_eq!(a.matrix[1][1], c(1.0, -2.0));
            }
            other => panic!("expected mixed, got {other:?}"),
        }
    }

    #[test]
    fn p_adjoint_of_separated_swaps_and_negates_angles() {
        // domT+sep: conditions a1 cos b + a2 eta sin b = 0, b1 cos a + b2 xi sin a = 0
        let s = SeparatedBC::new(c(0.6, 0.8), c(0.0, 1.0), 0.7, 2.1).unwrap();
        let spec: ExtensionSpec = s.into();
        let pa = spec.p_adjoint();
        let expected = expected_sep_p_adjoint(&s);
        assert!(subspace_equal(
            &pa.boundary_subspace().unwrap(),
            &expected.boundary_subspace().unwrap()
        ));
    }

    /// Direct transcription of the separated P-adjoint conditions.
    fn expected_sep_p_adjoint(s: &SeparatedBC) -> ExtensionSpec {
        let rows = [
            [cr(s.beta.cos()), s.eta * cr(s.beta.sin()), cr(0.0), cr(0.0)],
            [cr(0.0), cr(0.0), cr(s.alpha.cos()), s.xi * cr(s.alpha.sin())],
        ];
        // separated by construction: both blocks are rank one
        canonicalize(&[rows[0], rows[1]]).map(|spec| spec).unwrap_or_else(|_| {
            panic!("separated p-adjoint rows must canonicalize")
        })
    }

    #[test]
    fn p_adjoint_of_mixed_conjugates_entries() {
        let m = MixedBC::new(
            MixedDirection::BetaFromAlpha,
            [[c(1.0, 2.0), c(0.0, -1.0)], [c(3.0, 0.0), c(0.5, 0.5)]],
        )
        .unwrap();
        let spec: ExtensionSpec = m.into();
        match spec.p_adjoint() {
            ExtensionSpec::Mixed(a) => {
                // (domT+mixed): same direction, matrix [[conj d, conj b], [conj c, conj a]]
                assert_eq!(a.direction, MixedDirection::BetaFromAlpha);
                assert_eq!(a.matrix[0][0], c(0.5, -0.5));
                assert_eq!(a.matrix[0][1], c(0.0, 1.0));
                assert_eq!(a.matrix[1][0], c(3.0, 0.0));
                assert_eq!(a.matrix[1][1], c(1.0, -2.0));
            }
            other => panic!("expected mixed, got {other:?}"),
        }
    }

    #[test]
    fn p_adjoint_of_identity_mixed_is_itself() {
        let m = mixed(
            MixedDirection::AlphaFromBeta,
            [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]],
        );
        let pa = m.p_adjoint();
        assert!(subspace_equal(
            &pa.boundary_subspace().unwrap(),
            &m.boundary_subspace().unwrap()
        ));
    }

    #[test]
    fn self_adjoint_examples() {
        let s: ExtensionSpec = SeparatedBC::new(cr(1.0), cr(1.0), 0.3, 1.2).unwrap().into();
        assert!(s.is_self_adjoint());

        // xi = -1 represents a real condition too, so it is still self-adjoint
        let s2: ExtensionSpec = SeparatedBC::new(cr(-1.0), cr(1.0), 0.3, 1.2).unwrap().into();
        assert!(s2.is_self_adjoint());

        let m = mixed(
            MixedDirection::AlphaFromBeta,
            [[0.0, 1.0], [0.0, 0.0], [0.0, 0.0], [0.0, 1.0]],
        );
        assert!(m.is_self_adjoint());

        let t: ExtensionSpec =
            ThreeDimBC::new(cr(1.0), cr(1.0), cr(1.0), cr(-1.0)).unwrap().into();
        assert!(!t.is_self_adjoint());
    }

    #[test]
    fn p_self_adjoint_examples() {
        let s: ExtensionSpec =
            SeparatedBC::new(cr(1.0), cr(-1.0), PI / 4.0, PI / 4.0).unwrap().into();
        assert!(s.is_p_self_adjoint());

        let m = mixed(
            MixedDirection::AlphaFromBeta,
            [[0.0, 1.0], [1.0, 0.0], [2.0, 0.0], [0.0, -1.0]],
        );
        assert!(m.is_p_self_adjoint());

        let m2 = mixed(
            MixedDirection::AlphaFromBeta,
            [[0.0, 1.0], [1.0, 0.0], [2.0, 0.0], [0.0, 1.0]],
        );
        assert!(!m2.is_p_self_adjoint());
    }

    #[test]
    fn pt_symmetric_examples() {
        let t: ExtensionSpec =
            ThreeDimBC::new(cr(1.0), cr(1.0), cr(1.0), cr(-1.0)).unwrap().into();
        assert!(t.is_pt_symmetric());

        let m = mixed(
            MixedDirection::AlphaFromBeta,
            [[2.0, 0.0], [1.0, 0.0], [3.0, 0.0], [2.0, 0.0]],
        );
        assert!(m.is_pt_symmetric());

        let o: ExtensionSpec = OneDimBC::new(
            OneDimVariant::I,
            (cr(1.0), cr(0.0)),
            [[cr(0.0), cr(0.0)], [cr(0.0), cr(1.0)]],
        )
        .unwrap()
        .into();
        // adjoint coefficients (1, 0, -1, 0) in sum form satisfy the modulus test
        let (a, b, cc, d) = one_dim_adjoint_sum_coeffs(match &o {
            ExtensionSpec::OneDim(o) => o,
            _ => unreachable!(),
        });
        assert!(eq3_holds(a, b, cc, d));
        assert!(o.is_pt_symmetric());
    }

    #[test]
    fn classify_spandau_example() {
        let m = mixed(
            MixedDirection::AlphaFromBeta,
            [[2.0, 0.0], [1.0, 0.0], [3.0, 0.0], [2.0, 0.0]],
        );
        let r = m.classify();
        assert_eq!(r.dimension, 2);
        assert!(r.self_adjoint && r.p_self_adjoint && r.pt_symmetric);
        assert!(r.phase.unwrap().abs() < 1e-12);
    }

    #[test]
    fn classify_phase_pi_half_example() {
        let m = mixed(
            MixedDirection::AlphaFromBeta,
            [[0.0, 1.0], [0.0, 0.0], [0.0, 0.0], [0.0, 1.0]],
        );
        let r = m.classify();
        assert!(r.self_adjoint && !r.p_self_adjoint && r.pt_symmetric);
        assert!((r.phase.unwrap() - FRAC_PI_2).abs() < 1e-12);
        let nf = r.normal_form.unwrap();
        assert!((nf[0][0] - cr(1.0)).norm() < 1e-12);
        assert!((nf[1][1] - cr(1.0)).norm() < 1e-12);
    }

    #[test]
    fn classify_generic_separated_is_nothing() {
        let s: ExtensionSpec = SeparatedBC::new(
            Complex64::from_polar(1.0, PI / 3.0),
            cr(1.0),
            PI / 4.0,
            7.0 * PI / 4.0,
        )
        .unwrap()
        .into();
        let r = s.classify();
        assert!(!r.self_adjoint && !r.p_self_adjoint && !r.pt_symmetric);
    }

    #[test]
    fn spandau_corollary_single_criterion() {
        // self-adjoint and P-self-adjoint together should match the real
        // a = d, a^2 - bc = 1 family, and imply PT symmetry
        let m = mixed(
            MixedDirection::BetaFromAlpha,
            [[3.0, 0.0], [4.0, 0.0], [2.0, 0.0], [3.0, 0.0]],
        );
        let r = m.classify();
        assert!(r.self_adjoint && r.p_self_adjoint && r.pt_symmetric);
    }

    #[test]
    fn json_round_trips() {
        let examples: Vec<ExtensionSpec> = vec![
            SeparatedBC::new(cr(1.0), cr(-1.0), PI / 4.0, PI / 4.0).unwrap().into(),
            mixed(
                MixedDirection::AlphaFromBeta,
                [[2.0, 0.0], [1.0, 0.0], [3.0, 0.0], [2.0, 0.0]],
            ),
            ThreeDimBC::new(cr(1.0), cr(1.0), cr(1.0), cr(-1.0)).unwrap().into(),
            OneDimBC::new(
                OneDimVariant::I,
                (cr(1.0), cr(0.0)),
                [[cr(0.0), cr(0.0)], [cr(0.0), cr(1.0)]],
            )
            .unwrap()
            .into(),
        ];
        for spec in examples {
            let json = serde_json::to_string(&spec).unwrap();
            let back: ExtensionSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(spec, back, "round trip failed for {json}");
        }
    }

    #[test]
    fn json_matches_documented_shapes() {
        let spec: ExtensionSpec = serde_json::from_str(
            r#"{"type":"mixed","direction":"alpha_from_beta","matrix":[[[2,0],[1,0]],[[3,0],[2,0]]]}"#,
        )
        .unwrap();
        assert!(matches!(spec, ExtensionSpec::Mixed(_)));
        let spec: ExtensionSpec = serde_json::from_str(
            r#"{"type":"one_dim","variant":"I","pair":[[1,0],[0,0]],"matrix":[[[0,0],[0,0]],[[0,0],[1,0]]]}"#,
        )
        .unwrap();
        assert!(matches!(spec, ExtensionSpec::OneDim(_)));
        let err = serde_json::from_str::<ExtensionSpec>(
            r#"{"type":"mixed","direction":"alpha_from_beta","matrix":[[[1,0],[2,0]],[[2,0],[4,0]]]}"#,
        );
        assert!(err.is_err(), "rank-one mixed matrix must be rejected");
    }

    // --- property tests -------------------------------------------------

    fn arb_unit() -> impl Strategy<Value = Complex64> {
        (0.0..TAU).prop_map(|t| Complex64::from_polar(1.0, t))
    }

    fn arb_c() -> impl Strategy<Value = Complex64> {
        (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| Complex64::new(re, im))
    }

    prop_compose! {
        fn arb_separated()(xi in arb_unit(), eta in arb_unit(), a in 0.0..TAU, b in 0.0..TAU)
            -> ExtensionSpec
        {
            SeparatedBC::new(xi, eta, a, b).unwrap().into()
        }
    }

    fn arb_spec() -> impl Strategy<Value = ExtensionSpec> {
        prop_oneof![
            arb_separated(),
            (arb_c(), arb_c(), arb_c(), arb_c(), proptest::bool::ANY).prop_filter_map(
                "rank-2 matrix",
                |(a, b, cc, d, dir)| {
                    let direction = if dir {
                        MixedDirection::AlphaFromBeta
                    } else {
                        MixedDirection::BetaFromAlpha
                    };
                    MixedBC::new(direction, [[a, b], [cc, d]]).ok().map(ExtensionSpec::Mixed)
                }
            ),
            (arb_c(), arb_c(), arb_c(), arb_c()).prop_filter_map("nonzero", |(a, b, cc, d)| {
                ThreeDimBC::new(a, b, cc, d).ok().map(ExtensionSpec::ThreeDim)
            }),
            (arb_c(), arb_c(), arb_c(), arb_c(), arb_c(), arb_c(), proptest::bool::ANY)
                .prop_filter_map("nonzero pair", |(p, q, m11, m12, m21, m22, var)| {
                    let variant = if var { OneDimVariant::I } else { OneDimVariant::II };
                    OneDimBC::new(variant, (p, q), [[m11, m12], [m21, m22]])
                        .ok()
                        .map(ExtensionSpec::OneDim)
                }),
        ]
    }

    proptest! {
        #[test]
        fn p_map_is_an_involution(a1 in arb_c(), a2 in arb_c(), b1 in arb_c(), b2 in arb_c()) {
            let v = BoundaryForm::new(a1, a2, b1, b2);
            prop_assert_eq!(v.p_map().p_map(), v);
            prop_assert_eq!(v.pt_map().pt_map(), v);
        }

        #[test]
        fn adjoint_involution_and_dimension_duality(spec in arb_spec()) {
            prop_assert_eq!(spec.adjoint().dimension(), 4 - spec.dimension());
            let round = spec.adjoint().adjoint();
            let l = spec.boundary_subspace().unwrap();
            let lr = round.boundary_subspace().unwrap();
            prop_assert!(subspace_equal(&l, &lr));
        }

        #[test]
        fn adjoint_matches_omega_complement(spec in arb_spec()) {
            let l = spec.boundary_subspace().unwrap();
            let a = spec.adjoint().boundary_subspace().unwrap();
            prop_assert!(subspace_equal(&a, &omega_complement(&l)));
        }

        #[test]
        fn p_adjoint_matches_parity_of_complement(spec in arb_spec()) {
            let l = spec.boundary_subspace().unwrap();
            let pa = spec.p_adjoint().boundary_subspace().unwrap();
            prop_assert!(subspace_equal(&pa, &apply_p(&omega_complement(&l))));
        }

        #[test]
        fn predicates_agree_with_oracle(spec in arb_spec()) {
            let report = spec.classify();
            let oracle = oracle_classify(&spec.boundary_subspace().unwrap());
            prop_assert_eq!(report.flags(), oracle.flags());
        }

        #[test]
        fn separated_pt_iff_p_self_adjoint(spec in arb_separated()) {
            prop_assert_eq!(spec.is_pt_symmetric(), spec.is_p_self_adjoint());
        }
    }
}
