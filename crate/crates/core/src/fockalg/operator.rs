use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{SpaceSignature, C64};
use crate::error::{Error, Result};

/// Relative Hermiticity tolerance accepted by spectral routines.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-10;

/// Dense operator on a tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    space: SpaceSignature,
    data: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn new(space: SpaceSignature, data: DMatrix<C64>) -> Result<Self> {
        let dim = space.dim();
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::Signature(format!(
                "matrix is {}x{}, space {space} has dimension {dim}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { space, data })
    }

    /// Only for callers that built `data` from `space` themselves.
    pub(crate) fn from_parts(space: SpaceSignature, data: DMatrix<C64>) -> Self {
        debug_assert_eq!(data.nrows(), space.dim());
        Self { space, data }
    }

    pub fn zeros(space: &SpaceSignature) -> Self {
        let d = space.dim();
        Self::from_parts(space.clone(), DMatrix::zeros(d, d))
    }

    pub fn identity(space: &SpaceSignature) -> Self {
        let d = space.dim();
        Self::from_parts(space.clone(), DMatrix::identity(d, d))
    }

    /// Embed a local matrix acting on factor `index`.
    pub fn local(space: &SpaceSignature, index: usize, local: &DMatrix<C64>) -> Result<Self> {
        Ok(Self::from_parts(space.clone(), space.embed(index, local)?))
    }

    /// Kronecker product with one local matrix per factor, in factor order.
    pub fn from_factors(space: &SpaceSignature, locals: &[&DMatrix<C64>]) -> Result<Self> {
        if locals.len() != space.factors().len() {
            return Err(Error::Signature(format!(
                "{} local matrices for {} factors",
                locals.len(),
                space.factors().len()
            )));
        }
        let mut acc = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for (k, (m, f)) in locals.iter().zip(space.factors()).enumerate() {
            if m.nrows() != f.dim() || m.ncols() != f.dim() {
                return Err(Error::Signature(format!(
                    "local matrix {k} is {}x{}, factor is {f}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            acc = acc.kronecker(*m);
        }
        Ok(Self::from_parts(space.clone(), acc))
    }

    pub fn space(&self) -> &SpaceSignature {
        &self.space
    }

    pub fn data(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<C64> {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.space.clone(), self.data.adjoint())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }

    /// `max |H - H†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.data[(r, c)] - self.data[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian within `rel_tol · max|H|`.
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_defect() <= rel_tol * self.max_abs()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        Ok(Self::from_parts(
            self.space.clone(),
            &self.data + &other.data,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        Ok(Self::from_parts(
            self.space.clone(),
            &self.data - &other.data,
        ))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        Ok(Self::from_parts(
            self.space.clone(),
            &self.data * &other.data,
        ))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_parts(self.space.clone(), &self.data * factor)
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        Ok(Self::from_parts(
            self.space.clone(),
            &self.data * &other.data - &other.data * &self.data,
        ))
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.data * v
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Ladder operator direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Lowering,
    Raising,
}

/// Local truncated annihilation operator, `√n` at `(n-1, n)`.
pub(crate) fn lowering_local(n: usize) -> DMatrix<C64> {
    let mut a = DMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = C64::new((k as f64).sqrt(), 0.0);
    }
    a
}

pub(crate) fn number_local(n: usize) -> DMatrix<C64> {
    DMatrix::from_diagonal(&DVector::from_fn(n, |k, _| C64::new(k as f64, 0.0)))
}

/// Truncated `a` or `a†` on the bosonic factor `index`, identity elsewhere.
pub fn ladder(space: &SpaceSignature, index: usize, kind: Ladder) -> Result<OperatorMatrix> {
    let n = space.boson_dim(index)?;
    let a = lowering_local(n);
    let local = match kind {
        Ladder::Lowering => a,
        Ladder::Raising => a.adjoint(),
    };
    OperatorMatrix::local(space, index, &local)
}

/// `a†a` on the bosonic factor `index`.
pub fn number(space: &SpaceSignature, index: usize) -> Result<OperatorMatrix> {
    let n = space.boson_dim(index)?;
    OperatorMatrix::local(space, index, &number_local(n))
}

/// Atomic level. The basis index map is fixed: `g → 0`, `e → 1`, `i → 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    G,
    E,
    I,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::G, Level::E, Level::I];

    pub fn index(self) -> usize {
        match self {
            Level::G => 0,
            Level::E => 1,
            Level::I => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Level::G => "g",
            Level::E => "e",
            Level::I => "i",
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g" => Ok(Level::G),
            "e" => Ok(Level::E),
            "i" => Ok(Level::I),
            other => Err(Error::param(
                "level",
                format!("unknown atomic level `{other}`, expected one of g, e, i"),
            )),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `σ_rs = |r><s|` on the atomic factor `index`.
pub fn atomic_projector(
    space: &SpaceSignature,
    index: usize,
    r: Level,
    s: Level,
) -> Result<OperatorMatrix> {
    space.require_atom(index)?;
    let mut local = DMatrix::zeros(3, 3);
    local[(r.index(), s.index())] = C64::new(1.0, 0.0);
    OperatorMatrix::local(space, index, &local)
}

/// Eigendecomposition `H = Q diag(λ) Q†` of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct Spectral {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<C64>,
}

impl Spectral {
    /// Fails with [`Error::NotHermitian`] when `max|H - H†| > 1e-10·max|H|`.
    /// Inputs inside the tolerance are symmetrized as `(H + H†)/2`.
    pub fn of(op: &OperatorMatrix) -> Result<Self> {
        Self::of_matrix(op.data())
    }

    pub(crate) fn of_matrix(m: &DMatrix<C64>) -> Result<Self> {
        let scale = max_abs(m);
        let defect = max_abs(&(m - m.adjoint()));
        let tolerance = HERMITIAN_INPUT_TOL * scale;
        if defect > tolerance {
            return Err(Error::NotHermitian { defect, tolerance });
        }
        let dim = m.nrows();
        if scale == 0.0 {
            return Ok(Self {
                eigenvalues: DVector::zeros(dim),
                eigenvectors: DMatrix::identity(dim, dim),
            });
        }
        let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let eig = nalgebra::linalg::SymmetricEigen::try_new(sym, f64::EPSILON, 0)
            .ok_or(Error::Eigen(dim))?;
        Ok(Self {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    /// `Q f(Λ) Q†`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> DMatrix<C64> {
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let fj = f(lam);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= fj);
        }
        scaled * q.adjoint()
    }
}

/// Scalar function applied to the spectrum of a Hermitian operator.
#[derive(Clone, Copy)]
pub enum MatrixFunction<'a> {
    Sin,
    Cos,
    /// `x ↦ exp(i·k·x)`.
    ExpI(f64),
    Custom(&'a dyn Fn(f64) -> C64),
}

impl MatrixFunction<'_> {
    fn eval(&self, x: f64) -> C64 {
        match self {
            MatrixFunction::Sin => C64::new(x.sin(), 0.0),
            MatrixFunction::Cos => C64::new(x.cos(), 0.0),
            MatrixFunction::ExpI(k) => C64::from_polar(1.0, k * x),
            MatrixFunction::Custom(f) => f(x),
        }
    }
}

/// `f(X)` through the spectral decomposition of the Hermitian operator `X`.
pub fn hermitian_function(x: &OperatorMatrix, f: MatrixFunction<'_>) -> Result<OperatorMatrix> {
    let spec = Spectral::of(x)?;
    Ok(OperatorMatrix::from_parts(
        x.space().clone(),
        spec.map(|l| f.eval(l)),
    ))
}
