//! Numerical realization of tau_q(y) = -y'' - q(x) y on a symmetric
//! truncated interval [-X, X]: reference solutions, Wronskian brackets,
//! boundary functionals, representative construction and identity checks.
//!
//! The boundary functionals are limits at +-infinity in the limit-circle
//! theory; here they are evaluated at the truncation points +-X. All the
//! algebraic identities hold exactly at finite X because the reference pair
//! keeps [w1, w2] = 1 at every node, so only the values of the functionals
//! (not the structure) depend on the truncation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryForm;
use crate::error::{Error, Result};
use crate::rk;

fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// An even potential q with -y'' - q y in the limit-circle case at both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "PotentialJson")]
pub enum PotentialSpec {
    /// q(x) = x^degree with degree in {4, 8, 12, ...}.
    Monomial { degree: u32 },
    /// q = 0 (regular truncated problem; used for closed-form sanity checks).
    Zero,
    /// q given by samples on x >= 0, evaluated at |x| by linear
    /// interpolation and clamped beyond the last sample.
    TabulatedEven { samples: Vec<(f64, f64)> },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum PotentialJson {
    Monomial { degree: u32 },
    Zero,
    TabulatedEven { samples: Vec<(f64, f64)> },
}

impl TryFrom<PotentialJson> for PotentialSpec {
    type Error = Error;

    fn try_from(raw: PotentialJson) -> Result<Self> {
        match raw {
            PotentialJson::Monomial { degree } => PotentialSpec::monomial(degree),
            PotentialJson::Zero => Ok(PotentialSpec::Zero),
            PotentialJson::TabulatedEven { samples } => PotentialSpec::tabulated_even(samples),
        }
    }
}

impl PotentialSpec {
    pub fn monomial(degree: u32) -> Result<Self> {
        if degree < 4 || degree % 4 != 0 {
            return Err(Error::InvalidConfig(format!(
                "monomial degree must be one of 4, 8, 12, ..., got {degree}"
            )));
        }
        Ok(Self::Monomial { degree })
    }

    pub fn tabulated_even(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidConfig("tabulated potential needs samples".into()));
        }
        if samples[0].0 != 0.0 {
            return Err(Error::InvalidConfig("tabulated samples must start at x = 0".into()));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidConfig("tabulated abscissas must increase".into()));
            }
        }
        if samples.iter().any(|&(x, v)| !x.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidConfig("tabulated samples must be finite".into()));
        }
        Ok(Self::TabulatedEven { samples })
    }

    /// Evaluate q(x); evenness comes from evaluating at |x|.
    pub fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        match self {
            Self::Monomial { degree } => ax.powi(*degree as i32),
            Self::Zero => 0.0,
            Self::TabulatedEven { samples } => {
                let n = samples.len();
                if ax >= samples[n - 1].0 {
                    return samples[n - 1].1;
                }
                let j = samples.partition_point(|&(sx, _)| sx <= ax);
                let (x0, v0) = samples[j - 1];
                let (x1, v1) = samples[j];
                v0 + (v1 - v0) * (ax - x0) / (x1 - x0)
            }
        }
    }
}

/// A strictly increasing symmetric partition of [-X, X] containing 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    spacing: Option<f64>,
}

impl Grid {
    /// Uniform symmetric grid with an odd number of nodes (>= 5).
    pub fn uniform_symmetric(x_max: f64, node_count: usize) -> Result<Self> {
        if !(x_max > 0.0) || !x_max.is_finite() {
            return Err(Error::InvalidConfig(format!("X must be positive, got {x_max}")));
        }
        if node_count < 5 || node_count % 2 == 0 {
            return Err(Error::InvalidConfig(format!(
                "node count must be odd and at least 5, got {node_count}"
            )));
        }
        let m = node_count / 2;
        let mut nodes = Vec::with_capacity(node_count);
        for i in (1..=m).rev() {
            nodes.push(-x_max * i as f64 / m as f64);
        }
        nodes.push(0.0);
        for i in 1..=m {
            nodes.push(x_max * i as f64 / m as f64);
        }
        let spacing = x_max / m as f64;
        Ok(Self { nodes, spacing: Some(spacing) })
    }

    /// Wrap an explicit node list, validating monotonicity and symmetry.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 5 {
            return Err(Error::InvalidConfig("need at least 5 nodes".into()));
        }
        for w in nodes.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidConfig("nodes must be strictly increasing".into()));
            }
        }
        let n = nodes.len();
        let x_max = nodes[n - 1];
        if n % 2 == 0 || nodes[n / 2] != 0.0 {
            return Err(Error::AsymmetricGrid);
        }
        for i in 0..n {
            if (nodes[i] + nodes[n - 1 - i]).abs() > 1e-12 * x_max.abs() {
                return Err(Error::AsymmetricGrid);
            }
        }
        let h0 = nodes[1] - nodes[0];
        let uniform = nodes.windows(2).all(|w| ((w[1] - w[0]) - h0).abs() <= 1e-12 * h0);
        Ok(Self { nodes, spacing: uniform.then_some(h0) })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn zero_index(&self) -> usize {
        self.nodes.len() / 2
    }

    /// Uniform spacing, when the grid is uniform.
    pub fn spacing(&self) -> Option<f64> {
        self.spacing
    }

    pub fn index_of(&self, x: f64) -> Option<usize> {
        let i = self.nodes.partition_point(|&n| n < x);
        for j in [i.saturating_sub(1), i, i + 1] {
            if j < self.nodes.len() && (self.nodes[j] - x).abs() <= 1e-12 * self.x_max() {
                return Some(j);
            }
        }
        None
    }
}

/// A function sampled on a grid together with its derivative and (when known
/// analytically) tau_q applied to it.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    pub values: Vec<Complex64>,
    pub derivs: Vec<Complex64>,
    pub tau: Vec<Complex64>,
}

impl SampledFunction {
    /// Build from raw value/derivative samples, filling tau by a 4th-order
    /// central difference of the values (one-sided at the edges).
    pub fn from_raw(
        values: Vec<Complex64>,
        derivs: Vec<Complex64>,
        q: &PotentialSpec,
        grid: &Grid,
    ) -> Result<Self> {
        let h = grid.spacing().ok_or(Error::NonUniformGrid)?;
        let n = values.len();
        if n != grid.len() || derivs.len() != n {
            return Err(Error::InvalidConfig("sample length does not match grid".into()));
        }
        let mut tau = vec![cr(0.0); n];
        let y = &values;
        for i in 0..n {
            let ypp = if i >= 2 && i + 2 < n {
                (-y[i - 2] + y[i - 1] * 16.0 - y[i] * 30.0 + y[i + 1] * 16.0 - y[i + 2])
                    / (12.0 * h * h)
            } else {
                // 4th-order one-sided stencils at the boundary nodes
                let at = |k: usize| y[k];
                if i < 2 {
                    let j = i;
                    (at(j) * 45.0 - at(j + 1) * 154.0 + at(j + 2) * 214.0 - at(j + 3) * 156.0
                        + at(j + 4) * 61.0
                        - at(j + 5) * 10.0)
                        / (12.0 * h * h)
                } else {
                    let j = i;
                    (at(j) * 45.0 - at(j - 1) * 154.0 + at(j - 2) * 214.0 - at(j - 3) * 156.0
                        + at(j - 4) * 61.0
                        - at(j - 5) * 10.0)
                        / (12.0 * h * h)
                }
            };
            tau[i] = -ypp - cr(q.eval(grid.nodes()[i])) * y[i];
        }
        Ok(Self { values, derivs, tau })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn zero(n: usize) -> Self {
        Self { values: vec![cr(0.0); n], derivs: vec![cr(0.0); n], tau: vec![cr(0.0); n] }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            derivs: self.derivs.iter().map(|v| v * c).collect(),
            tau: self.tau.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let zip = |a: &[Complex64], b: &[Complex64]| -> Vec<Complex64> {
            a.iter().zip(b).map(|(x, y)| x + y).collect()
        };
        Self {
            values: zip(&self.values, &other.values),
            derivs: zip(&self.derivs, &other.derivs),
            tau: zip(&self.tau, &other.tau),
        }
    }

    /// Reflection (P f)(x) = f(-x); derivatives flip sign, tau reflects
    /// (q is even).
    pub fn p_action(&self) -> Self {
        Self {
            values: self.values.iter().rev().cloned().collect(),
            derivs: self.derivs.iter().rev().map(|v| -v).collect(),
            tau: self.tau.iter().rev().cloned().collect(),
        }
    }

    /// Conjugation (T f)(x) = conj(f(x)); tau conjugates along.
    pub fn t_action(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.conj()).collect(),
            derivs: self.derivs.iter().map(|v| v.conj()).collect(),
            tau: self.tau.iter().map(|v| v.conj()).collect(),
        }
    }

    /// L2 norm over a uniform grid (Simpson weights).
    pub fn l2_norm(&self, grid: &Grid) -> Result<f64> {
        let sq: Vec<Complex64> = self.values.iter().map(|v| cr(v.norm_sqr())).collect();
        Ok(simpson(&sq, grid)?.re.max(0.0).sqrt())
    }
}

/// A solution sample of -y'' - (q + lambda) y = 0; tau f is lambda * f.
#[derive(Debug, Clone)]
pub struct SolutionSample {
    pub f: SampledFunction,
    pub lambda: Complex64,
    pub tol: f64,
}

impl SolutionSample {
    pub fn values(&self) -> &[Complex64] {
        &self.f.values
    }

    pub fn derivs(&self) -> &[Complex64] {
        &self.f.derivs
    }

    pub fn p_action(&self) -> Self {
        Self { f: self.f.p_action(), lambda: self.lambda, tol: self.tol }
    }

    pub fn t_action(&self) -> Self {
        Self { f: self.f.t_action(), lambda: self.lambda.conj(), tol: self.tol }
    }
}

/// Sampled odd/even solutions w1, w2 of tau_q(y) = 0 with [w1, w2] = 1.
#[derive(Debug, Clone)]
pub struct ReferencePair {
    pub w1: SolutionSample,
    pub w2: SolutionSample,
}

/// Integrate -y'' - (q + lambda) y = 0 from x = 0 outward in both
/// directions, landing exactly on the grid nodes.
pub fn solve_ivp(
    q: &PotentialSpec,
    lambda: Complex64,
    y0: Complex64,
    dy0: Complex64,
    grid: &Grid,
    tol: f64,
) -> Result<SolutionSample> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
    }
    let coeff = |x: f64| cr(q.eval(x)) + lambda;
    let iz = grid.zero_index();
    let start: rk::State = [y0, dy0];

    let right_targets: Vec<f64> = grid.nodes()[iz + 1..].to_vec();
    let right = rk::integrate_path(&coeff, 0.0, start, &right_targets, tol)?;

    let left_targets: Vec<f64> = grid.nodes()[..iz].iter().rev().cloned().collect();
    let left = rk::integrate_path(&coeff, 0.0, start, &left_targets, tol)?;

    let n = grid.len();
    let mut values = vec![cr(0.0); n];
    let mut derivs = vec![cr(0.0); n];
    values[iz] = y0;
    derivs[iz] = dy0;
    for (k, st) in right.iter().enumerate() {
        values[iz + 1 + k] = st[0];
        derivs[iz + 1 + k] = st[1];
    }
    for (k, st) in left.iter().enumerate() {
        values[iz - 1 - k] = st[0];
        derivs[iz - 1 - k] = st[1];
    }
    let tau: Vec<Complex64> = values.iter().map(|v| lambda * v).collect();
    Ok(SolutionSample { f: SampledFunction { values, derivs, tau }, lambda, tol })
}

/// Endpoint-only variant of [`solve_ivp`]: the state (y, y') at `x_target`.
pub fn solve_endpoint(
    q: &PotentialSpec,
    lambda: Complex64,
    y0: Complex64,
    dy0: Complex64,
    x_target: f64,
    tol: f64,
) -> Result<(Complex64, Complex64)> {
    let coeff = |x: f64| cr(q.eval(x)) + lambda;
    let st = rk::integrate_to(&coeff, 0.0, [y0, dy0], x_target, tol)?;
    Ok((st[0], st[1]))
}

/// The odd solution w1 (y(0) = 0, y'(0) = 1) and even solution w2
/// (y(0) = -1, y'(0) = 0) of tau_q(y) = 0. The initial data makes
/// [w1, w2] = w1 w2' - w1' w2 = 1 at x = 0, hence at every node.
pub fn reference_solutions(q: &PotentialSpec, grid: &Grid, tol: f64) -> Result<ReferencePair> {
    let w1 = solve_ivp(q, cr(0.0), cr(0.0), cr(1.0), grid, tol)?;
    let w2 = solve_ivp(q, cr(0.0), cr(-1.0), cr(0.0), grid, tol)?;
    Ok(ReferencePair { w1, w2 })
}

/// The bracket [f, g]_x = conj(f(x)) g'(x) - conj(f'(x)) g(x) at node i.
pub fn wronskian_bracket(f: &SampledFunction, g: &SampledFunction, i: usize) -> Complex64 {
    f.values[i].conj() * g.derivs[i] - f.derivs[i].conj() * g.values[i]
}

/// Same, addressed by abscissa; errors if x is not a grid node.
pub fn wronskian_bracket_at(
    f: &SampledFunction,
    g: &SampledFunction,
    grid: &Grid,
    x: f64,
) -> Result<Complex64> {
    let i = grid.index_of(x).ok_or(Error::NodeMissing(x))?;
    Ok(wronskian_bracket(f, g, i))
}

/// The boundary 4-vector (alpha1, alpha2, beta1, beta2) =
/// ([w1,f]_{-X}, [w2,f]_{-X}, [w1,f]_{X}, [w2,f]_{X}).
pub fn boundary_form(f: &SampledFunction, rp: &ReferencePair, grid: &Grid) -> BoundaryForm {
    let last = grid.len() - 1;
    BoundaryForm::new(
        wronskian_bracket(&rp.w1.f, f, 0),
        wronskian_bracket(&rp.w2.f, f, 0),
        wronskian_bracket(&rp.w1.f, f, last),
        wronskian_bracket(&rp.w2.f, f, last),
    )
}

/// Quintic smoothstep on [-1, 1]: s(-1) = 0, s(1) = 1, s' = s'' = 0 at both
/// ends. Returns (s, s', s'').
fn smoothstep(x: f64) -> (f64, f64, f64) {
    if x <= -1.0 {
        return (0.0, 0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let t = (x + 1.0) / 2.0;
    let s = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    let ds = 15.0 * t * t * (1.0 - t) * (1.0 - t);
    let dds = 15.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
    (s, ds, dds)
}

/// A maximal-domain function with prescribed boundary values: a smooth blend
/// of the reference solutions that equals z1 w2 - z2 w1 near -X and
/// z3 w2 - z4 w1 near +X, interpolated by a quintic cutoff on [-1, 1].
/// tau of the result is analytic in the stored samples because tau w_j = 0.
pub fn construct_representative(
    z: &BoundaryForm,
    rp: &ReferencePair,
    grid: &Grid,
) -> Result<SampledFunction> {
    if grid.x_max() <= 1.0 {
        return Err(Error::InvalidConfig(
            "representative construction needs X > 1 (cutoff lives on [-1, 1])".into(),
        ));
    }
    let n = grid.len();
    let mut values = vec![cr(0.0); n];
    let mut derivs = vec![cr(0.0); n];
    let mut tau = vec![cr(0.0); n];
    for i in 0..n {
        let x = grid.nodes()[i];
        let (s, ds, dds) = smoothstep(x);
        let w = [rp.w1.f.values[i], rp.w2.f.values[i]];
        let dw = [rp.w1.f.derivs[i], rp.w2.f.derivs[i]];
        // u_j = s w_j (right cutoff), v_j = (1 - s) w_j (left cutoff)
        // f = -z4 u1 + z3 u2 - z2 v1 + z1 v2
        let cu = [-z.b2, z.b1];
        let cv = [-z.a2, z.a1];
        let mut val = cr(0.0);
        let mut der = cr(0.0);
        let mut tv = cr(0.0);
        for j in 0..2 {
            val += cu[j] * cr(s) * w[j] + cv[j] * cr(1.0 - s) * w[j];
            der += cu[j] * (cr(ds) * w[j] + cr(s) * dw[j])
                + cv[j] * (cr(-ds) * w[j] + cr(1.0 - s) * dw[j]);
            // tau(s w) = -s'' w - 2 s' w', tau((1-s) w) = s'' w + 2 s' w'
            let blend = cr(dds) * w[j] + cr(2.0 * ds) * dw[j];
            tv += -cu[j] * blend + cv[j] * blend;
        }
        values[i] = val;
        derivs[i] = der;
        tau[i] = tv;
    }
    Ok(SampledFunction { values, derivs, tau })
}

/// Max over nodes of the defect of the bracket identity
/// [g,f] [w1,w2] = [g,w2][w1,f] - [g,w1][w2,f]; exact up to roundoff.
pub fn verify_plucker(
    f: &SampledFunction,
    g: &SampledFunction,
    rp: &ReferencePair,
    grid: &Grid,
) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..grid.len() {
        let lhs = wronskian_bracket(g, f, i) * wronskian_bracket(&rp.w1.f, &rp.w2.f, i);
        let rhs = wronskian_bracket(g, &rp.w2.f, i) * wronskian_bracket(&rp.w1.f, f, i)
            - wronskian_bracket(g, &rp.w1.f, i) * wronskian_bracket(&rp.w2.f, f, i);
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

/// Composite Simpson integral of complex samples over a uniform grid.
pub fn simpson(values: &[Complex64], grid: &Grid) -> Result<Complex64> {
    let h = grid.spacing().ok_or(Error::NonUniformGrid)?;
    let n = values.len();
    debug_assert!(n % 2 == 1);
    let mut acc = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += v * cr(if i % 2 == 1 { 4.0 } else { 2.0 });
    }
    Ok(acc * cr(h / 3.0))
}

/// Defect of the Green identity: the integral form (g, tau f) - (tau g, f)
/// minus the bracket difference [f,g]_X - [f,g]_{-X}. Bounded by quadrature
/// plus integration error.
pub fn green_identity_defect(
    f: &SampledFunction,
    g: &SampledFunction,
    grid: &Grid,
) -> Result<Complex64> {
    let n = grid.len();
    let integrand: Vec<Complex64> = (0..n)
        .map(|i| g.values[i] * f.tau[i].conj() - g.tau[i] * f.values[i].conj())
        .collect();
    let integral = simpson(&integrand, grid)?;
    let bracket = |i: usize| {
        f.values[i].conj() * g.derivs[i] - f.derivs[i].conj() * g.values[i]
    };
    Ok(integral - (bracket(n - 1) - bracket(0)))
}
