//! Eigenvalue machinery for truncated extensions: characteristic matrices,
//! real-axis shooting for self-adjoint 2-dimensional conditions, and the
//! eigen/orthogonality witnesses that exhibit the empty-resolvent behaviour
//! of 3- and 1-dimensional conditions.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::boundary::{BoundaryForm, ExtensionSpec, MixedDirection};
use crate::error::{Error, Result};
use crate::ode::{
    construct_representative, reference_solutions, simpson, solve_endpoint,
    solve_ivp, Grid, PotentialSpec, ReferencePair, SampledFunction, SolutionSample,
};
use crate::oracle::BoundarySubspace;

fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A boundary-condition extension realized on the truncated interval
/// [-X, X]: the potential, grid, reference pair, the spec, its boundary
/// subspace L and an orthonormal (4-k) x 4 constraint matrix with
/// null space L.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    pub potential: PotentialSpec,
    pub grid: Grid,
    pub reference: ReferencePair,
    pub spec: ExtensionSpec,
    pub subspace: BoundarySubspace,
    constraints: DMatrix<Complex64>,
    pub tol: f64,
}

/// One located eigenvalue: the combination coefficients of the fundamental
/// pair (normalized to unit length) and the constraint defect ||C B c||.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub lambda: Complex64,
    pub coeffs: [Complex64; 2],
    pub defect: f64,
    pub ode_tol: f64,
}

/// Eigen-witness for a 3-dimensional condition: the located null data plus
/// the assembled eigenfunction samples.
#[derive(Debug, Clone)]
pub struct Witness {
    pub result: EigenResult,
    pub eigenfunction: SampledFunction,
}

/// Orthogonality report for the residual-spectrum witness of a
/// 1-dimensional condition.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub lambda: Complex64,
    pub panel_size: usize,
    pub max_residual: f64,
}

/// Solutions y_e (y(0) = 1, y'(0) = 0) and y_o (y(0) = 0, y'(0) = 1) of
/// -y'' - (q + lambda) y = 0, sampled on the grid.
pub fn fundamental_pair(
    q: &PotentialSpec,
    lambda: Complex64,
    grid: &Grid,
    tol: f64,
) -> Result<(SolutionSample, SolutionSample)> {
    let even = solve_ivp(q, lambda, cr(1.0), cr(0.0), grid, tol)?;
    let odd = solve_ivp(q, lambda, cr(0.0), cr(1.0), grid, tol)?;
    Ok((even, odd))
}

impl TruncatedOperator {
    pub fn new(
        potential: PotentialSpec,
        grid: Grid,
        spec: ExtensionSpec,
        tol: f64,
    ) -> Result<Self> {
        let reference = reference_solutions(&potential, &grid, tol)?;
        let subspace = spec.boundary_subspace()?;
        let rows = spec.constraint_rows();
        let raw = DMatrix::from_fn(rows.len(), 4, |r, c| rows[r][c]);
        // orthonormal rows spanning the same row space
        let range = BoundarySubspace::from_spanning(&raw.adjoint());
        if range.dim() != 4 - spec.dimension() {
            let sv = raw.singular_values();
            return Err(Error::RankDeficient { singular_values: sv.iter().cloned().collect() });
        }
        let constraints = range.basis().adjoint();
        debug_assert!((&constraints * subspace.basis()).norm() < 1e-10);
        Ok(Self { potential, grid, reference, spec, subspace, constraints, tol })
    }

    /// Extension dimension k; the characteristic matrix is (4 - k) x 2.
    pub fn k(&self) -> usize {
        self.spec.dimension()
    }

    pub fn constraints(&self) -> &DMatrix<Complex64> {
        &self.constraints
    }

    /// Boundary forms of the fundamental pair at lambda, as a 4 x 2 matrix
    /// (columns: even solution, odd solution). Uses endpoint-only solves.
    pub fn boundary_matrix(&self, lambda: Complex64) -> Result<DMatrix<Complex64>> {
        let x = self.grid.x_max();
        let last = self.grid.len() - 1;
        let w = &self.reference;
        let w_at = |i: usize| {
            [
                (w.w1.values()[i], w.w1.derivs()[i]),
                (w.w2.values()[i], w.w2.derivs()[i]),
            ]
        };
        let w_left = w_at(0);
        let w_right = w_at(last);
        let mut b = DMatrix::zeros(4, 2);
        for (col, init) in [(cr(1.0), cr(0.0)), (cr(0.0), cr(1.0))].iter().enumerate() {
            let (y_l, dy_l) = solve_endpoint(&self.potential, lambda, init.0, init.1, -x, self.tol)?;
            let (y_r, dy_r) = solve_endpoint(&self.potential, lambda, init.0, init.1, x, self.tol)?;
            // [w, y] = conj(w) y' - conj(w') y; the reference pair is real
            for j in 0..2 {
                let (wv, wd) = w_left[j];
                b[(j, col)] = wv.conj() * dy_l - wd.conj() * y_l;
                let (wv, wd) = w_right[j];
                b[(2 + j, col)] = wv.conj() * dy_r - wd.conj() * y_r;
            }
        }
        Ok(b)
    }

    /// C * B(lambda): lambda is an eigenvalue of the truncated extension iff
    /// this matrix has a nontrivial null space.
    pub fn char_matrix(&self, lambda: Complex64) -> Result<DMatrix<Complex64>> {
        Ok(&self.constraints * self.boundary_matrix(lambda)?)
    }

    /// Smallest singular value of the characteristic matrix.
    pub fn smallest_singular_value(&self, lambda: Complex64) -> Result<f64> {
        let sv = self.char_matrix(lambda)?.singular_values();
        Ok(sv.iter().cloned().fold(f64::INFINITY, f64::min))
    }

    /// det of the 2 x 2 characteristic matrix (k = 2 only).
    pub fn char_det(&self, lambda: Complex64) -> Result<Complex64> {
        if self.k() != 2 {
            return Err(Error::InvalidSpec(format!(
                "char_det needs a 2-dimensional extension, got k = {}",
                self.k()
            )));
        }
        let m = self.char_matrix(lambda)?;
        Ok(m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)])
    }

    /// Unit null vector of the characteristic matrix at lambda, with its
    /// defect ||char * c||.
    fn null_data(&self, lambda: Complex64) -> Result<EigenResult> {
        let m = self.char_matrix(lambda)?;
        let c = if m.nrows() == 1 {
            // exact kernel of a single row
            let (r1, r2) = (m[(0, 0)], m[(0, 1)]);
            if r1.norm() == 0.0 && r2.norm() == 0.0 {
                [cr(1.0), cr(0.0)]
            } else {
                let n = (r1.norm_sqr() + r2.norm_sqr()).sqrt();
                [-r2 / n, r1 / n]
            }
        } else {
            let svd = m.clone().svd(false, true);
            let vt = svd.v_t.expect("svd with v_t");
            let k = svd.singular_values.len() - 1; // smallest comes last (sorted)
            [vt[(k, 0)].conj(), vt[(k, 1)].conj()]
        };
        let defect = (&m * DMatrix::from_column_slice(2, 1, &c)).norm();
        Ok(EigenResult { lambda, coeffs: c, defect, ode_tol: self.tol })
    }

    /// A real-valued characteristic function for classified self-adjoint
    /// 2-dimensional conditions. For separated conditions the (normalized)
    /// coefficient rows are real; for mixed ones the matrix is
    /// exp(i phi) K with K real and det K = 1, and splitting the phase
    /// evenly yields det(e^{-i phi/2} B_dep - e^{i phi/2} K B_ind) which is
    /// real on the real axis because det B_top = det B_bot = 1 there.
    fn real_char(&self, lambda: f64) -> Result<f64> {
        let b = self.boundary_matrix(cr(lambda))?;
        let d = match &self.spec {
            ExtensionSpec::Separated(_) => {
                let m = &self.constraints * b;
                m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
            }
            ExtensionSpec::Mixed(m) => {
                let [[a, bb], [cc, dd]] = m.matrix;
                let det = a * dd - bb * cc;
                let phi = det.arg() / 2.0;
                let k: Vec<Complex64> =
                    [a, bb, cc, dd].iter().map(|z| z * Complex64::from_polar(1.0, -phi)).collect();
                let half = Complex64::from_polar(1.0, -phi / 2.0);
                let top = [b[(0, 0)], b[(0, 1)], b[(1, 0)], b[(1, 1)]];
                let bot = [b[(2, 0)], b[(2, 1)], b[(3, 0)], b[(3, 1)]];
                let (dep, ind) = match m.direction {
                    MixedDirection::AlphaFromBeta => (top, bot),
                    MixedDirection::BetaFromAlpha => (bot, top),
                };
                let mut rows = [[cr(0.0); 2]; 2];
                for r in 0..2 {
                    for c in 0..2 {
                        let kb = k[2 * r] * ind[c] + k[2 * r + 1] * ind[2 + c];
                        rows[r][c] = half * dep[2 * r + c] - half.conj() * kb;
                    }
                }
                rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
            }
            _ => unreachable!("real_char is gated on k = 2"),
        };
        Ok(d.re)
    }

    /// Locate real eigenvalues of a self-adjoint 2-dimensional condition by
    /// scanning `count` points in [lo, hi], bracketing sign changes of the
    /// real characteristic function and refining by a secant iteration with
    /// bisection safeguard.
    pub fn eigenvalues_real_scan(
        &self,
        lo: f64,
        hi: f64,
        count: usize,
    ) -> Result<Vec<EigenResult>> {
        if self.k() != 2 || !self.spec.is_self_adjoint() {
            return Err(Error::InvalidSpec(
                "real-axis scan requires a self-adjoint 2-dimensional condition".into(),
            ));
        }
        if count < 2 || !(hi > lo) {
            return Err(Error::InvalidConfig("need hi > lo and count >= 2".into()));
        }
        let xs: Vec<f64> =
            (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect();
        let mut ds = Vec::with_capacity(count);
        for &x in &xs {
            ds.push(self.real_char(x)?);
        }
        let mut out: Vec<EigenResult> = Vec::new();
        for i in 0..count - 1 {
            let (a, b) = (ds[i], ds[i + 1]);
            if a == 0.0 {
                out.push(self.null_data(cr(xs[i]))?);
                continue;
            }
            if a * b < 0.0 {
                let root = self.refine_real_root(xs[i], xs[i + 1])?;
                if out.iter().all(|r| (r.lambda.re - root).abs() > 1e-7) {
                    out.push(self.null_data(cr(root))?);
                }
            }
        }
        Ok(out)
    }

    /// Secant refinement of a bracketed sign change to |delta| < 1e-8,
    /// falling back to bisection whenever the secant step leaves the bracket.
    pub fn refine_real_root(&self, mut lo: f64, mut hi: f64) -> Result<f64> {
        let mut flo = self.real_char(lo)?;
        let mut fhi = self.real_char(hi)?;
        if flo == 0.0 {
            return Ok(lo);
        }
        if fhi == 0.0 {
            return Ok(hi);
        }
        if flo * fhi > 0.0 {
            return Err(Error::NoRootInBracket { lo, hi });
        }
        for _ in 0..80 {
            if (hi - lo).abs() < 1e-8 {
                return Ok(0.5 * (lo + hi));
            }
            let mut mid = if (fhi - flo).abs() > 0.0 {
                hi - fhi * (hi - lo) / (fhi - flo)
            } else {
                0.5 * (lo + hi)
            };
            if !(mid > lo && mid < hi) {
                mid = 0.5 * (lo + hi);
            }
            let fmid = self.real_char(mid)?;
            if fmid == 0.0 {
                return Ok(mid);
            }
            if flo * fmid < 0.0 {
                hi = mid;
                fhi = fmid;
            } else {
                lo = mid;
                flo = fmid;
            }
        }
        Err(Error::MaxIterations(80))
    }

    /// Newton iteration on det(char) from a complex seed, for complex
    /// eigenvalues of non-self-adjoint 2-dimensional conditions. The
    /// derivative is a central finite difference.
    pub fn newton_complex_root(&self, seed: Complex64) -> Result<EigenResult> {
        let mut z = seed;
        for _ in 0..60 {
            let d = self.char_det(z)?;
            let h = 1e-6 * z.norm().max(1.0);
            let dp = self.char_det(z + cr(h))?;
            let dm = self.char_det(z - cr(h))?;
            let deriv = (dp - dm) / cr(2.0 * h);
            if deriv.norm() == 0.0 {
                return Err(Error::MaxIterations(60));
            }
            let step = d / deriv;
            z -= step;
            if step.norm() < 1e-10 * z.norm().max(1.0) {
                return self.null_data(z);
            }
        }
        Err(Error::MaxIterations(60))
    }

    /// Finite-difference Cauchy-Riemann residual of det(char) at lambda;
    /// small values certify analyticity at desk scale.
    pub fn cauchy_riemann_residual(&self, lambda: Complex64, h: f64) -> Result<f64> {
        let re_deriv =
            (self.char_det(lambda + cr(h))? - self.char_det(lambda - cr(h))?) / cr(2.0 * h);
        let im_deriv = (self.char_det(lambda + Complex64::new(0.0, h))?
            - self.char_det(lambda - Complex64::new(0.0, h))?)
            / Complex64::new(0.0, 2.0 * h);
        Ok((re_deriv - im_deriv).norm())
    }

    /// For a 3-dimensional condition every complex lambda is an eigenvalue:
    /// the 1 x 2 characteristic matrix always has a null vector. Returns it
    /// together with the assembled eigenfunction.
    pub fn empty_resolvent_witness(&self, lambda: Complex64) -> Result<Witness> {
        if self.k() != 3 {
            return Err(Error::InvalidSpec(
                "empty-resolvent witness requires a 3-dimensional condition".into(),
            ));
        }
        let result = self.null_data(lambda)?;
        let (even, odd) = fundamental_pair(&self.potential, lambda, &self.grid, self.tol)?;
        let eigenfunction =
            even.f.scaled(result.coeffs[0]).add(&odd.f.scaled(result.coeffs[1]));
        Ok(Witness { result, eigenfunction })
    }

    /// Residual-spectrum witness for a 1-dimensional condition: the adjoint
    /// is 3-dimensional, so conj(lambda) has an eigenfunction g there, and
    /// (tau - lambda) f must be L2-orthogonal to g for every f in the domain.
    /// Returns the worst normalized pairing over a panel of domain functions
    /// (a representative of the boundary subspace plus interior bumps).
    pub fn residual_spectrum_witness(
        &self,
        lambda: Complex64,
        panel_size: usize,
        rng: &mut impl Rng,
    ) -> Result<ResidualReport> {
        if self.k() != 1 {
            return Err(Error::InvalidSpec(
                "residual-spectrum witness requires a 1-dimensional condition".into(),
            ));
        }
        let adj = TruncatedOperator::new(
            self.potential.clone(),
            self.grid.clone(),
            self.spec.adjoint(),
            self.tol,
        )?;
        let g = adj.empty_resolvent_witness(lambda.conj())?.eigenfunction;
        let g_norm = g.l2_norm(&self.grid)?;

        let basis = self.subspace.basis_forms();
        debug_assert_eq!(basis.len(), 1);
        let mut worst = 0.0f64;
        for _ in 0..panel_size {
            let scale = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let z = BoundaryForm::from_vector(&(basis[0].to_vector() * scale));
            let mut f = construct_representative(&z, &self.reference, &self.grid)?;
            let bump: [Complex64; 4] = std::array::from_fn(|_| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            f = f.add(&interior_bump(&bump, &self.potential, &self.grid));
            // (tau - lambda) f against conj(g)
            let integrand: Vec<Complex64> = (0..self.grid.len())
                .map(|i| (f.tau[i] - lambda * f.values[i]) * g.values[i].conj())
                .collect();
            let pairing = simpson(&integrand, &self.grid)?.norm();
            let resid: Vec<Complex64> = (0..self.grid.len())
                .map(|i| cr((f.tau[i] - lambda * f.values[i]).norm_sqr()))
                .collect();
            let f_norm = simpson(&resid, &self.grid)?.re.max(1e-300).sqrt();
            worst = worst.max(pairing / (f_norm * g_norm));
        }
        Ok(ResidualReport { lambda, panel_size, max_residual: worst })
    }
}

/// A cubic polynomial times (1 - (x/X)^2)^3: vanishes with two derivatives
/// at the ends, so its boundary form is exactly zero, and tau of it is
/// available in closed form.
pub fn interior_bump(
    coeffs: &[Complex64; 4],
    q: &PotentialSpec,
    grid: &Grid,
) -> SampledFunction {
    let x_max = grid.x_max();
    let n = grid.len();
    let mut values = vec![cr(0.0); n];
    let mut derivs = vec![cr(0.0); n];
    let mut tau = vec![cr(0.0); n];
    for i in 0..n {
        let x = grid.nodes()[i];
        let u = x / x_max;
        let w = 1.0 - u * u;
        let b = w * w * w;
        let db = -6.0 * u * w * w / x_max;
        let ddb = (-6.0 * w * w + 24.0 * u * u * w) / (x_max * x_max);
        let p = coeffs[0] + coeffs[1] * x + coeffs[2] * (x * x) + coeffs[3] * (x * x * x);
        let dp = coeffs[1] + coeffs[2] * (2.0 * x) + coeffs[3] * (3.0 * x * x);
        let ddp = coeffs[2] * 2.0 + coeffs[3] * (6.0 * x);
        let val = p * cr(b);
        let der = dp * cr(b) + p * cr(db);
        let second = ddp * cr(b) + dp * cr(2.0 * db) + p * cr(ddb);
        values[i] = val;
        derivs[i] = der;
        tau[i] = -second - cr(q.eval(x)) * val;
    }
    SampledFunction { values, derivs, tau }
}
