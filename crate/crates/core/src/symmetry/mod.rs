//! Lie point symmetries: operators as coefficient fields, numerical
//! commutators, invariance checks and the hodograph system.

mod tag;

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{CharCoords, CharacteristicField, Revuzhenko, RevuzhenkoSign, StressField};
use crate::error::{Error, Result};
use crate::numeric::{derivative, fd_partial, fd_partial_vec};
use crate::plane::{Frame, Point2};
use crate::residuals::{characteristic_jacobian, eq_u_residual, field_partials, position_jacobian_det, DerivativeMode};
use crate::velocity::{velocity_residual, NadaiVelocity, SenashovVelocity, VelocityField, YakhnoVelocity};

pub use tag::SubalgebraTag;

pub type Coefficients<const N: usize> = Arc<dyn Fn(&[f64; N]) -> [f64; N] + Send + Sync>;
/// `j[i][m] = d coeff_i / d var_m`.
pub type CoefficientJacobian<const N: usize> = Arc<dyn Fn(&[f64; N]) -> [[f64; N]; N] + Send + Sync>;

pub const STRESS_SPACE: [&str; 4] = ["x", "y", "sigma", "theta"];
pub const POLAR_SPACE: [&str; 4] = ["r", "phi", "sigma", "theta"];
pub const VELOCITY_SPACE: [&str; 4] = ["x", "y", "u", "v"];

/// Step used by [`LieOperator::apply`].
pub const APPLY_STEP: f64 = 1e-5;
/// Step used when commutators differentiate coefficients numerically. Larger
/// than [`APPLY_STEP`] so that nested commutators stay above rounding noise.
pub const COMMUTATOR_STEP: f64 = 1e-3;

/// A vector field `sum_i coeff_i(p) d/d var_i` on an `N`-dimensional space.
#[derive(Clone)]
pub struct LieOperator<const N: usize> {
    name: String,
    space: [&'static str; N],
    coeffs: Coefficients<N>,
    jacobian: Option<CoefficientJacobian<N>>,
}

impl<const N: usize> fmt::Debug for LieOperator<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LieOperator")
            .field("name", &self.name)
            .field("space", &self.space)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

fn scaled_step(x: f64, h: f64) -> f64 {
    h * x.abs().max(1.0)
}

impl<const N: usize> LieOperator<N> {
    pub fn new(
        name: impl Into<String>,
        space: [&'static str; N],
        coeffs: impl Fn(&[f64; N]) -> [f64; N] + Send + Sync + 'static,
    ) -> Self {
        LieOperator { name: name.into(), space, coeffs: Arc::new(coeffs), jacobian: None }
    }

    pub fn with_jacobian(mut self, j: impl Fn(&[f64; N]) -> [[f64; N]; N] + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(j));
        self
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> [&'static str; N] {
        self.space
    }

    pub fn has_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn coefficients(&self, p: &[f64; N]) -> [f64; N] {
        (self.coeffs)(p)
    }

    /// `X(f)` at `p` with Richardson central differences for the partials of `f`.
    pub fn apply(&self, f: impl Fn(&[f64; N]) -> f64, p: &[f64; N]) -> f64 {
        let c = self.coefficients(p);
        (0..N)
            .filter(|&i| c[i] != 0.0)
            .map(|i| c[i] * fd_partial(&f, p, i, scaled_step(p[i], APPLY_STEP)))
            .sum()
    }

    /// `X(f)` at `p` given the gradient of `f` there.
    pub fn apply_with_gradient(&self, grad: &[f64; N], p: &[f64; N]) -> f64 {
        let c = self.coefficients(p);
        (0..N).map(|i| c[i] * grad[i]).sum()
    }

    /// Partials of the coefficients; analytic when requested and available.
    pub fn coefficient_jacobian(&self, p: &[f64; N], mode: DerivativeMode) -> [[f64; N]; N] {
        if let (DerivativeMode::Analytic, Some(j)) = (mode, &self.jacobian) {
            return j(p);
        }
        let mut out = [[0.0; N]; N];
        for m in 0..N {
            let col = fd_partial_vec(|q| (self.coeffs)(q), p, m, scaled_step(p[m], COMMUTATOR_STEP));
            for i in 0..N {
                out[i][m] = col[i];
            }
        }
        out
    }

    /// Coefficients of `[self, other] = self(other) - other(self)` at `p`.
    pub fn commutator(&self, other: &LieOperator<N>, p: &[f64; N], mode: DerivativeMode) -> [f64; N] {
        let (a, b) = (self.coefficients(p), other.coefficients(p));
        let (ja, jb) = (self.coefficient_jacobian(p, mode), other.coefficient_jacobian(p, mode));
        let mut out = [0.0; N];
        for i in 0..N {
            for m in 0..N {
                out[i] += a[m] * jb[i][m] - b[m] * ja[i][m];
            }
        }
        out
    }

    /// `[self, other]` as an operator whose coefficients are evaluated on demand.
    pub fn commutator_operator(&self, other: &LieOperator<N>, mode: DerivativeMode) -> LieOperator<N> {
        let (a, b) = (self.clone(), other.clone());
        let name = format!("[{}, {}]", self.name, other.name);
        LieOperator::new(name, self.space, move |p| a.commutator(&b, p, mode))
    }

    /// `sum_i w_i op_i`; keeps an analytic Jacobian if every term has one.
    pub fn combination(name: impl Into<String>, terms: &[(f64, &LieOperator<N>)]) -> LieOperator<N> {
        assert!(!terms.is_empty(), "empty combination");
        let space = terms[0].1.space;
        let ops: Vec<(f64, LieOperator<N>)> = terms.iter().map(|(w, o)| (*w, (*o).clone())).collect();
        let all_jac = ops.iter().all(|(_, o)| o.jacobian.is_some());
        let coeff_ops = ops.clone();
        let mut out = LieOperator::new(name, space, move |p| {
            let mut c = [0.0; N];
            for (w, o) in &coeff_ops {
                let oc = o.coefficients(p);
                for i in 0..N {
                    c[i] += w * oc[i];
                }
            }
            c
        });
        if all_jac {
            out = out.with_jacobian(move |p| {
                let mut j = [[0.0; N]; N];
                for (w, o) in &ops {
                    let oj = (o.jacobian.as_ref().expect("checked"))(p);
                    for i in 0..N {
                        for m in 0..N {
                            j[i][m] += w * oj[i][m];
                        }
                    }
                }
                j
            });
        }
        out
    }

    pub fn scaled(&self, w: f64) -> LieOperator<N> {
        Self::combination(format!("{w}*{}", self.name), &[(w, self)])
    }
}

/// `X1 = x d_x + y d_y`, `X2 = -y d_x + x d_y + d_theta`, `X3 = d_sigma`,
/// `X4 = (x cos 2theta + y sin 2theta + y sigma/k) d_x + (x sin 2theta - y cos 2theta - x sigma/k) d_y
///       - 4k theta d_sigma - (sigma/k) d_theta`.
pub fn stress_operators(k: f64) -> [LieOperator<4>; 4] {
    let x1 = LieOperator::new("X1", STRESS_SPACE, |p| [p[0], p[1], 0.0, 0.0]).with_jacobian(|_| {
        let mut j = [[0.0; 4]; 4];
        j[0][0] = 1.0;
        j[1][1] = 1.0;
        j
    });
    let x2 = LieOperator::new("X2", STRESS_SPACE, |p| [-p[1], p[0], 0.0, 1.0]).with_jacobian(|_| {
        let mut j = [[0.0; 4]; 4];
        j[0][1] = -1.0;
        j[1][0] = 1.0;
        j
    });
    let x3 = LieOperator::new("X3", STRESS_SPACE, |_| [0.0, 0.0, 1.0, 0.0]).with_jacobian(|_| [[0.0; 4]; 4]);
    let x4 = LieOperator::new("X4", STRESS_SPACE, move |p| {
        let [x, y, s, t] = *p;
        let (s2, c2) = (2.0 * t).sin_cos();
        [x * c2 + y * s2 + y * s / k, x * s2 - y * c2 - x * s / k, -4.0 * k * t, -s / k]
    })
    .with_jacobian(move |p| {
        let [x, y, s, t] = *p;
        let (s2, c2) = (2.0 * t).sin_cos();
        [
            [c2, s2 + s / k, y / k, -2.0 * x * s2 + 2.0 * y * c2],
            [s2 - s / k, -c2, -x / k, 2.0 * x * c2 + 2.0 * y * s2],
            [0.0, 0.0, 0.0, -4.0 * k],
            [0.0, 0.0, -1.0 / k, 0.0],
        ]
    });
    [x1, x2, x3, x4]
}

/// The same basis in `(r, phi, sigma, theta)`; with `psi = theta - phi`,
/// `X4 = r cos 2psi d_r + (sin 2psi - sigma/k) d_phi - 4k theta d_sigma - (sigma/k) d_theta`.
pub fn polar_operators(k: f64) -> [LieOperator<4>; 4] {
    let x1 = LieOperator::new("X1p", POLAR_SPACE, |p| [p[0], 0.0, 0.0, 0.0]).with_jacobian(|_| {
        let mut j = [[0.0; 4]; 4];
        j[0][0] = 1.0;
        j
    });
    let x2 = LieOperator::new("X2p", POLAR_SPACE, |_| [0.0, 1.0, 0.0, 1.0]).with_jacobian(|_| [[0.0; 4]; 4]);
    let x3 = LieOperator::new("X3p", POLAR_SPACE, |_| [0.0, 0.0, 1.0, 0.0]).with_jacobian(|_| [[0.0; 4]; 4]);
    let x4 = LieOperator::new("X4p", POLAR_SPACE, move |p| {
        let [r, phi, s, t] = *p;
        let (s2, c2) = (2.0 * (t - phi)).sin_cos();
        [r * c2, s2 - s / k, -4.0 * k * t, -s / k]
    })
    .with_jacobian(move |p| {
        let [r, phi, _, t] = *p;
        let (s2, c2) = (2.0 * (t - phi)).sin_cos();
        [
            [c2, 2.0 * r * s2, 0.0, -2.0 * r * s2],
            [0.0, -2.0 * c2, -1.0 / k, 2.0 * c2],
            [0.0, 0.0, 0.0, -4.0 * k],
            [0.0, 0.0, -1.0 / k, 0.0],
        ]
    });
    [x1, x2, x3, x4]
}

fn strip_s(y: f64) -> f64 {
    (1.0 - y * y).max(0.0).sqrt()
}

/// Velocity operators on `(x, y, u, v)` for the Prandtl background (`2k = 1`):
/// `Z1 = u d_u + v d_v`, `Z2 = -2y d_x + 2s d_y - v d_u + u d_v`, `Z3 = d_x`,
/// `Z4 = (2 arccos y + 2y(x - s)) d_x + 2(s - x)s d_y + (yu + v(x - 2s)) d_u - (xu + yv) d_v`,
/// `Z5 = y d_u - x d_v`, with `s = sqrt(1 - y^2)`.
pub fn velocity_operators() -> [LieOperator<4>; 5] {
    let z1 = LieOperator::new("Z1", VELOCITY_SPACE, |p| [0.0, 0.0, p[2], p[3]]).with_jacobian(|_| {
        let mut j = [[0.0; 4]; 4];
        j[2][2] = 1.0;
        j[3][3] = 1.0;
        j
    });
    let z2 = LieOperator::new("Z2", VELOCITY_SPACE, |p| {
        let [_, y, u, v] = *p;
        [-2.0 * y, 2.0 * strip_s(y), -v, u]
    })
    .with_jacobian(|p| {
        let y = p[1];
        let mut j = [[0.0; 4]; 4];
        j[0][1] = -2.0;
        j[1][1] = -2.0 * y / strip_s(y);
        j[2][3] = -1.0;
        j[3][2] = 1.0;
        j
    });
    let z3 = LieOperator::new("Z3", VELOCITY_SPACE, |_| [1.0, 0.0, 0.0, 0.0]).with_jacobian(|_| [[0.0; 4]; 4]);
    let z4 = LieOperator::new("Z4", VELOCITY_SPACE, |p| {
        let [x, y, u, v] = *p;
        let s = strip_s(y);
        [
            2.0 * y.acos() + 2.0 * y * (x - s),
            2.0 * (s - x) * s,
            y * u + v * (x - 2.0 * s),
            -(x * u + y * v),
        ]
    })
    .with_jacobian(|p| {
        let [x, y, u, v] = *p;
        let s = strip_s(y);
        [
            [2.0 * y, 2.0 * x - 4.0 * s, 0.0, 0.0],
            [-2.0 * s, 2.0 * x * y / s - 4.0 * y, 0.0, 0.0],
            [v, u + 2.0 * v * y / s, y, x - 2.0 * s],
            [-u, -v, -x, -y],
        ]
    });
    let z5 = LieOperator::new("Z5", VELOCITY_SPACE, |p| [0.0, 0.0, p[1], -p[0]]).with_jacobian(|_| {
        let mut j = [[0.0; 4]; 4];
        j[2][1] = 1.0;
        j[3][0] = -1.0;
        j
    });
    [z1, z2, z3, z4, z5]
}

/// The velocity-space operator `u0(x, y) d_u + v0(x, y) d_v` of a velocity field.
pub fn velocity_generator(name: &str, f: impl Fn(f64, f64) -> [f64; 2] + Send + Sync + 'static) -> LieOperator<4> {
    LieOperator::new(name, VELOCITY_SPACE, move |p| {
        let [u, v] = f(p[0], p[1]);
        [0.0, 0.0, u, v]
    })
}

/// Representative operator of a subalgebra tag, in the basis of `frame`.
///
/// `Theta1 = X4 + alpha X1`, `Theta2 = X3 + alpha X1`, `Theta3 = X2 + alpha X1`,
/// `Theta4 = weight X3 + sign X2 + alpha X1`, `Theta5 = X1`.
pub fn operator_for(tag: &SubalgebraTag, k: f64, frame: Frame) -> Result<LieOperator<4>> {
    let [x1, x2, x3, x4] = match frame {
        Frame::Cartesian => stress_operators(k),
        Frame::Polar => polar_operators(k),
    };
    let label = tag.label();
    Ok(match *tag {
        SubalgebraTag::Theta1 { alpha } => LieOperator::combination(label, &[(1.0, &x4), (alpha, &x1)]),
        SubalgebraTag::Theta2 { alpha } => LieOperator::combination(label, &[(1.0, &x3), (alpha, &x1)]),
        SubalgebraTag::Theta3 { alpha } => LieOperator::combination(label, &[(1.0, &x2), (alpha, &x1)]),
        SubalgebraTag::Theta4 { sign, weight, alpha } => {
            LieOperator::combination(label, &[(weight, &x3), (sign as f64, &x2), (alpha, &x1)])
        }
        SubalgebraTag::Theta5 => x1.named(label),
        SubalgebraTag::Translation { sigma_coeff, x_coeff, y_coeff } => match frame {
            Frame::Cartesian => LieOperator::new(label, STRESS_SPACE, move |_| [x_coeff, y_coeff, sigma_coeff, 0.0])
                .with_jacobian(|_| [[0.0; 4]; 4]),
            Frame::Polar => LieOperator::new(label, POLAR_SPACE, move |p| {
                let (s, c) = p[1].sin_cos();
                [x_coeff * c + y_coeff * s, (-x_coeff * s + y_coeff * c) / p[0], sigma_coeff, 0.0]
            }),
        },
        SubalgebraTag::Unspecified => {
            return Err(Error::UnsupportedField { field: label, what: "a subalgebra representative".into() })
        }
    })
}

/// `-X4p + (pi/2) X3p` in `(r, phi, sigma, theta)`, the image of `Y1/3`.
pub fn revuzhenko_operator(k: f64) -> LieOperator<4> {
    let [_, _, x3, x4] = polar_operators(k);
    LieOperator::combination("-X4p + pi/2 X3p", &[(-1.0, &x4), (FRAC_PI_2, &x3)])
}

fn space_frame(space: &[&str; 4]) -> Option<Frame> {
    match space[0] {
        "x" if space[2] == "sigma" => Some(Frame::Cartesian),
        "r" => Some(Frame::Polar),
        _ => None,
    }
}

/// Invariance residuals of a stress field under `op`:
/// `res_sigma = eta^sigma - (xi^1 sigma_a + xi^2 sigma_b)`, same for `theta`,
/// with `(a, b)` the field's native coordinates.
pub fn check_invariance(op: &LieOperator<4>, field: &dyn StressField, p: &Point2, mode: DerivativeMode) -> Result<[f64; 2]> {
    if space_frame(&op.space) != Some(field.frame()) {
        return Err(Error::UnsupportedField {
            field: field.name().into(),
            what: format!("coordinates matching operator {}", op.name),
        });
    }
    let (q, s, g) = field_partials(field, p, mode)?;
    let [a, b] = q.coords();
    let c = op.coefficients(&[a, b, s.sigma, s.theta]);
    Ok([
        c[2] - (c[0] * g.sigma[0] + c[1] * g.sigma[1]),
        c[3] - (c[0] * g.theta[0] + c[1] * g.theta[1]),
    ])
}

/// Invariance residuals of a characteristic-net field under a polar operator,
/// with `(r, phi)` partials obtained by inverting the position Jacobian.
pub fn check_invariance_characteristic(
    op: &LieOperator<4>,
    field: &dyn CharacteristicField,
    c: CharCoords,
    mode: DerivativeMode,
) -> Result<[f64; 2]> {
    if space_frame(&op.space) != Some(Frame::Polar) {
        return Err(Error::UnsupportedField { field: field.name().into(), what: "a polar operator".into() });
    }
    let m = field.map(c)?;
    let j = characteristic_jacobian(field, c, mode)?;
    let det = position_jacobian_det(&j);
    if det == 0.0 || !det.is_finite() {
        return Err(Error::SingularJacobian(det));
    }
    let inv = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
    let pull = |row: [f64; 2]| [row[0] * inv[0][0] + row[1] * inv[1][0], row[0] * inv[0][1] + row[1] * inv[1][1]];
    let (gs, gt) = (pull(j[2]), pull(j[3]));
    let co = op.coefficients(&[m.r, m.phi, m.sigma, m.theta]);
    Ok([co[2] - (co[0] * gs[0] + co[1] * gs[1]), co[3] - (co[0] * gt[0] + co[1] * gt[1])])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algebra {
    /// `X1..X4` on `(x, y, sigma, theta)`.
    SigmaTheta,
    /// `X1p..X4p` on `(r, phi, sigma, theta)`.
    SigmaThetaPolar,
    /// `Z1..Z5` on `(x, y, u, v)`.
    Velocity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureCheck {
    pub name: String,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub algebra: Algebra,
    pub mode: DerivativeMode,
    pub n_points: usize,
    pub checks: Vec<StructureCheck>,
    pub max_deviation: f64,
}

fn random_points(algebra: Algebra, n: usize, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| match algebra {
            Algebra::SigmaTheta => [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.5..1.5),
            ],
            Algebra::SigmaThetaPolar => [
                rng.gen_range(0.2..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.5..1.5),
            ],
            Algebra::Velocity => [
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-0.9..0.9),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ],
        })
        .collect()
}

fn max_dev(points: &[[f64; 4]], f: impl Fn(&[f64; 4]) -> [f64; 4]) -> f64 {
    points
        .iter()
        .map(|p| f(p).iter().fold(0.0f64, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) }))
        .fold(0.0f64, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

fn sub(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

/// Checks the commutation relations of an algebra, antisymmetry of every pair
/// and the Jacobi identity of every triple at `n_points` seeded random points.
pub fn structure_constant_suite(algebra: Algebra, k: f64, n_points: usize, seed: u64, mode: DerivativeMode) -> StructureReport {
    let points = random_points(algebra, n_points.max(1), seed);
    let mut checks = Vec::new();
    let mut push = |name: String, dev: f64| checks.push(StructureCheck { name, max_deviation: dev });
    let ops: Vec<LieOperator<4>> = match algebra {
        Algebra::SigmaTheta => stress_operators(k).to_vec(),
        Algebra::SigmaThetaPolar => polar_operators(k).to_vec(),
        Algebra::Velocity => velocity_operators().to_vec(),
    };
    // Expected brackets: (i, j, expected coefficients).
    type Expected = Box<dyn Fn(&[f64; 4]) -> [f64; 4]>;
    let mut expected: Vec<(usize, usize, &str, Expected)> = Vec::new();
    match algebra {
        Algebra::SigmaTheta | Algebra::SigmaThetaPolar => {
            let (x2, x3) = (ops[1].clone(), ops[2].clone());
            expected.push((1, 3, "-4k X3", Box::new(move |p| x3.coefficients(p).map(|c| -4.0 * k * c))));
            expected.push((2, 3, "-X2/k", Box::new(move |p| x2.coefficients(p).map(|c| -c / k))));
            for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2)] {
                expected.push((i, j, "0", Box::new(|_| [0.0; 4])));
            }
        }
        Algebra::Velocity => {
            let (z2, z3, z5) = (ops[1].clone(), ops[2].clone(), ops[4].clone());
            expected.push((1, 3, "-4 Z3", Box::new(move |p| z3.coefficients(p).map(|c| -4.0 * c))));
            expected.push((2, 3, "-Z2", Box::new(move |p| z2.coefficients(p).map(|c| -c))));
            expected.push((0, 4, "-Z5", Box::new(move |p| z5.coefficients(p).map(|c| -c))));
            expected.push((2, 4, "-d_v", Box::new(|_| [0.0, 0.0, 0.0, -1.0])));
            for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2)] {
                expected.push((i, j, "0", Box::new(|_| [0.0; 4])));
            }
        }
    }
    for (i, j, label, want) in &expected {
        let (a, b) = (&ops[*i], &ops[*j]);
        let dev = max_dev(&points, |p| sub(a.commutator(b, p, mode), want(p)));
        push(format!("[{}, {}] = {label}", a.name(), b.name()), dev);
    }
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let (a, b) = (&ops[i], &ops[j]);
            let dev = max_dev(&points, |p| {
                let (ab, ba) = (a.commutator(b, p, mode), b.commutator(a, p, mode));
                [ab[0] + ba[0], ab[1] + ba[1], ab[2] + ba[2], ab[3] + ba[3]]
            });
            push(format!("[{0}, {1}] = -[{1}, {0}]", a.name(), b.name()), dev);
        }
    }
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            for l in j + 1..ops.len() {
                let (a, b, c) = (&ops[i], &ops[j], &ops[l]);
                let (ab, bc, ca) =
                    (a.commutator_operator(b, mode), b.commutator_operator(c, mode), c.commutator_operator(a, mode));
                let dev = max_dev(&points, |p| {
                    let t1 = ab.commutator(c, p, mode);
                    let t2 = bc.commutator(a, p, mode);
                    let t3 = ca.commutator(b, p, mode);
                    [t1[0] + t2[0] + t3[0], t1[1] + t2[1] + t3[1], t1[2] + t2[2] + t3[2], t1[3] + t2[3] + t3[3]]
                });
                push(format!("Jacobi({}, {}, {})", a.name(), b.name(), c.name()), dev);
            }
        }
    }
    let max_deviation = checks
        .iter()
        .fold(0.0f64, |m, c| if c.max_deviation.is_nan() || m.is_nan() { f64::NAN } else { m.max(c.max_deviation) });
    StructureReport { algebra, mode, n_points: points.len(), checks, max_deviation }
}

/// Compares the commutators `[Z2, Z5]`, `[Z4, Z5]`, `[Z2, [Z4, Z5]]` with the
/// generators of catalog velocity fields:
/// `[Z2, Z5] = -nadai`, `[Z4, Z5] = yakhno(C1 = 2, C2 = 0)`,
/// `[Z2, [Z4, Z5]] = 2 senashov(c1 = -pi/2, c2 = 3)`.
pub fn velocity_generator_checks(n_points: usize, seed: u64, mode: DerivativeMode) -> Vec<StructureCheck> {
    let points = random_points(Algebra::Velocity, n_points.max(1), seed);
    let [_, z2, _, z4, z5] = velocity_operators();
    let gen = |vf: &dyn VelocityField, w: f64, p: &[f64; 4]| -> [f64; 4] {
        match vf.eval(&Point2::cartesian(p[0], p[1])) {
            Ok([u, v]) => [0.0, 0.0, w * u, w * v],
            Err(_) => [f64::NAN; 4],
        }
    };
    let z45 = z4.commutator_operator(&z5, mode);
    let yakhno = YakhnoVelocity { c1: 2.0, c2: 0.0 };
    let senashov = SenashovVelocity { c1: -FRAC_PI_2, c2: 3.0 };
    vec![
        StructureCheck {
            name: "[Z2, Z5] = -nadai".into(),
            max_deviation: max_dev(&points, |p| sub(z2.commutator(&z5, p, mode), gen(&NadaiVelocity, -1.0, p))),
        },
        StructureCheck {
            name: "[Z4, Z5] = yakhno(C1=2, C2=0)".into(),
            max_deviation: max_dev(&points, |p| sub(z4.commutator(&z5, p, mode), gen(&yakhno, 1.0, p))),
        },
        StructureCheck {
            name: "[Z2, [Z4, Z5]] = 2 senashov(c1=-pi/2, c2=3)".into(),
            max_deviation: max_dev(&points, |p| sub(z2.commutator(&z45, p, mode), gen(&senashov, 2.0, p))),
        },
    ]
}

/// Residuals of the linear system satisfied by the hodograph `x(sigma, theta)`, `y(sigma, theta)`:
/// `y_theta + 2k(y_sigma cos 2theta - x_sigma sin 2theta) = 0`,
/// `x_theta - 2k(y_sigma sin 2theta + x_sigma cos 2theta) = 0`.
pub fn hodograph_residual(
    x_of: impl Fn(f64, f64) -> f64,
    y_of: impl Fn(f64, f64) -> f64,
    point: [f64; 2],
    k: f64,
) -> Result<[f64; 2]> {
    let [s, t] = point;
    let hs = scaled_step(s, 1e-4);
    let ht = scaled_step(t, 1e-4);
    let x_s = derivative(|v| x_of(v, t), s, hs);
    let x_t = derivative(|v| x_of(s, v), t, ht);
    let y_s = derivative(|v| y_of(v, t), s, hs);
    let y_t = derivative(|v| y_of(s, v), t, ht);
    let jac = x_s * y_t - x_t * y_s;
    if jac.abs() < 1e-12 {
        return Err(Error::SingularJacobian(jac));
    }
    let (s2, c2) = (2.0 * t).sin_cos();
    Ok([
        y_t + 2.0 * k * (y_s * c2 - x_s * s2),
        x_t - 2.0 * k * (y_s * s2 + x_s * c2),
    ])
}

/// Element `xi(sigma, theta) d_x + eta(sigma, theta) d_y` of the infinite part,
/// accepted only if `(xi, eta)` solves the hodograph system at every probe.
pub fn x5_operator(
    xi: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    eta: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    k: f64,
    probes: &[[f64; 2]],
    tol: f64,
) -> Result<LieOperator<4>> {
    let mut worst = 0.0f64;
    for p in probes {
        // A degenerate Jacobian of (xi, eta) does not disqualify a solution pair.
        match hodograph_residual(&xi, &eta, *p, k) {
            Ok(r) => worst = worst.max(r[0].abs()).max(r[1].abs()),
            Err(Error::SingularJacobian(_)) => {
                let (s, t) = (p[0], p[1]);
                let (hs, ht) = (scaled_step(s, 1e-4), scaled_step(t, 1e-4));
                let x_s = derivative(|v| xi(v, t), s, hs);
                let x_t = derivative(|v| xi(s, v), t, ht);
                let y_s = derivative(|v| eta(v, t), s, hs);
                let y_t = derivative(|v| eta(s, v), t, ht);
                let (s2, c2) = (2.0 * t).sin_cos();
                worst = worst
                    .max((y_t + 2.0 * k * (y_s * c2 - x_s * s2)).abs())
                    .max((x_t - 2.0 * k * (y_s * s2 + x_s * c2)).abs());
            }
            Err(e) => return Err(e),
        }
    }
    if !(worst <= tol) {
        return Err(Error::NotASolution(worst));
    }
    Ok(LieOperator::new("X5", STRESS_SPACE, move |p| [xi(p[2], p[3]), eta(p[2], p[3]), 0.0, 0.0]))
}

/// Operator `u0 d_u + v0 d_v` of a velocity field, accepted only if the field
/// solves the velocity system on its background at every probe.
pub fn z6_operator(vf: Arc<dyn VelocityField>, probes: &[Point2], tol: f64) -> Result<LieOperator<4>> {
    let mut worst = 0.0f64;
    for p in probes {
        let r = velocity_residual(vf.as_ref(), vf.background(), p, DerivativeMode::FiniteDifference)?;
        worst = worst.max(r[0].abs()).max(r[1].abs());
    }
    if !(worst <= tol) {
        return Err(Error::NotASolution(worst));
    }
    let name = format!("Z6[{}]", vf.name());
    Ok(velocity_generator(&name, move |x, y| vf.eval(&Point2::cartesian(x, y)).unwrap_or([f64::NAN; 2])))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevuzhenkoCheck {
    /// `Y1(u - u0)` on the solution `u = u0 = +-eta/xi`.
    pub y1_residual: f64,
    /// Residual of the reduced equation for `u0`.
    pub eq_u_residual: f64,
    /// Largest relative mismatch between the image of `Y1/3` and `-X4p + (pi/2) X3p`.
    pub pushforward_deviation: f64,
}

/// Verifies at `(xi, eta)` that `u = +-eta/xi` is `Y1`-invariant, solves the reduced
/// equation with `F = 2(xi^2 + pi/8)`, `G = 2(eta^2 - pi/8)`, and that `Y1/3`
/// pushed through the characteristic map equals `-X4p + (pi/2) X3p`.
pub fn revuzhenko_operator_check(sign: RevuzhenkoSign, xi: f64, eta: f64) -> Result<RevuzhenkoCheck> {
    if xi == 0.0 || eta == 0.0 {
        return Err(Error::SingularCoords { xi, eta });
    }
    let s = sign.value();
    let y1 = LieOperator::new("Y1", ["xi", "eta", "u"], |p: &[f64; 3]| [-p[0], p[1], 2.0 * p[2]]);
    let on_manifold = [xi, eta, s * eta / xi];
    let y1_residual = y1.apply(|p| p[2] - s * p[1] / p[0], &on_manifold);
    let eq_u = eq_u_residual(|x, e| s * e / x, |x| 4.0 * x, |e| 4.0 * e, xi, eta);

    let field = Revuzhenko::new(sign);
    let m = field.map(CharCoords::new(xi, eta))?;
    let j = field.jacobian(CharCoords::new(xi, eta))?;
    // Y1 = -xi d_xi + eta d_eta + 2u d_u with 2u d_u = -2xi d_xi + 2eta d_eta on the solution.
    let (dxi, deta) = ((-xi - 2.0 * xi) / 3.0, (eta + 2.0 * eta) / 3.0);
    let image: Vec<f64> = j.iter().map(|row| row[0] * dxi + row[1] * deta).collect();
    let target = revuzhenko_operator(Revuzhenko::K).coefficients(&[m.r, m.phi, m.sigma, m.theta]);
    let pushforward_deviation = image
        .iter()
        .zip(target.iter())
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0f64, f64::max);
    Ok(RevuzhenkoCheck { y1_residual, eq_u_residual: eq_u, pushforward_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{NadaiCavity, Prandtl};

    #[test]
    fn apply_examples() {
        let [x1, x2, x3, _] = stress_operators(1.0);
        let p = [2.0, 0.5, 0.3, 0.1];
        assert!((x3.apply(|q| q[2], &p) - 1.0).abs() < 1e-10);
        assert!((x2.apply(|q| q[3], &p) - 1.0).abs() < 1e-10);
        assert!((x1.apply(|q| q[0] * q[0], &p) - 8.0).abs() < 1e-8);
    }

    #[test]
    fn commutator_examples() {
        let [_, x2, x3, x4] = stress_operators(1.0);
        let p = [1.0, 2.0, 0.3, 0.1];
        for mode in [DerivativeMode::Analytic, DerivativeMode::FiniteDifference] {
            let c = x2.commutator(&x4, &p, mode);
            for (a, b) in c.iter().zip([0.0, 0.0, -4.0, 0.0]) {
                assert!((a - b).abs() < 1e-9);
            }
            let c = x3.commutator(&x4, &p, mode);
            for (a, b) in c.iter().zip([2.0, -1.0, 0.0, -1.0]) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn prandtl_translation_invariance() {
        let f = Prandtl::default();
        let op = operator_for(&f.subalgebra(), f.k, Frame::Cartesian).unwrap();
        let r = check_invariance(&op, &f, &Point2::cartesian(0.3, 0.4), DerivativeMode::Analytic).unwrap();
        assert_eq!(r, [0.0, 0.0]);
        let [x1, ..] = stress_operators(f.k);
        let r = check_invariance(&x1, &f, &Point2::cartesian(0.3, 0.4), DerivativeMode::Analytic).unwrap();
        assert!(r[0].abs() > 1e-3);
    }

    #[test]
    fn cavity_theta2() {
        let f = NadaiCavity::new(1.0, 0.2, 0.5).unwrap();
        let op = operator_for(&f.subalgebra(), f.k, Frame::Polar).unwrap();
        let r = check_invariance(&op, &f, &Point2::polar(1.5, 0.3).unwrap(), DerivativeMode::Analytic).unwrap();
        assert!(r[0].abs() < 1e-12 && r[1].abs() < 1e-12);
    }

    #[test]
    fn hodograph_examples() {
        let r = hodograph_residual(|s, t| -2.0 * s - (2.0 * t).sin(), |_, t| (2.0 * t).cos(), [0.3, -0.4], 0.5).unwrap();
        assert!(r[0].abs() < 1e-9 && r[1].abs() < 1e-9);
        let r = hodograph_residual(|s, _| s, |_, t| t, [0.3, -0.4], 0.5).unwrap();
        assert!(r[0].abs() > 1e-3 || r[1].abs() > 1e-3);
    }

    #[test]
    fn revuzhenko_operator() {
        for sign in [RevuzhenkoSign::Upper, RevuzhenkoSign::Lower] {
            let c = revuzhenko_operator_check(sign, 0.7, -1.1).unwrap();
            assert!(c.y1_residual.abs() < 1e-9);
            assert!(c.eq_u_residual.abs() < 1e-7);
            assert!(c.pushforward_deviation < 1e-12, "{c:?}");
        }
    }

    #[test]
    fn structure_constants() {
        for alg in [Algebra::SigmaTheta, Algebra::SigmaThetaPolar, Algebra::Velocity] {
            for mode in [DerivativeMode::Analytic, DerivativeMode::FiniteDifference] {
                let r = structure_constant_suite(alg, 0.7, 20, 3, mode);
                let worst = r.checks.iter().max_by(|a, b| a.max_deviation.total_cmp(&b.max_deviation)).unwrap();
                eprintln!("{alg:?} {mode:?} {} {:e}", worst.name, worst.max_deviation);
                assert!(r.max_deviation < 1e-6, "{alg:?} {mode:?}: {worst:?}");
            }
        }
    }

    #[test]
    fn velocity_generators() {
        for mode in [DerivativeMode::Analytic, DerivativeMode::FiniteDifference] {
            for c in velocity_generator_checks(20, 5, mode) {
                eprintln!("{mode:?} {} {:e}", c.name, c.max_deviation);
                assert!(c.max_deviation < 1e-6, "{c:?}");
            }
        }
    }
}
