use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::C64;
use crate::error::{Error, Result};

/// One tensor factor of the Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Factor {
    /// Bosonic mode truncated to the Fock states `|0>..|n-1>`.
    Boson(usize),
    /// Three-level atom in the basis `g, e, i`.
    Atom,
}

impl Factor {
    pub fn dim(&self) -> usize {
        match *self {
            Factor::Boson(n) => n,
            Factor::Atom => 3,
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Boson(n) => write!(f, "Boson({n})"),
            Factor::Atom => write!(f, "Atom(3)"),
        }
    }
}

/// Ordered list of tensor factors. The first factor is the slowest-varying
/// index of the flattened basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSignature {
    factors: Vec<Factor>,
}

impl SpaceSignature {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Signature("a space needs at least one factor".into()));
        }
        for f in &factors {
            if let Factor::Boson(n) = f {
                if *n < 2 {
                    return Err(Error::Signature(format!(
                        "boson truncation must be at least 2, got {n}"
                    )));
                }
            }
        }
        Ok(Self { factors })
    }

    pub fn boson(n: usize) -> Result<Self> {
        Self::new(vec![Factor::Boson(n)])
    }

    /// `Boson(n_cav) ⊗ Boson(n_vib)`.
    pub fn cavity_motion(n_cav: usize, n_vib: usize) -> Result<Self> {
        Self::new(vec![Factor::Boson(n_cav), Factor::Boson(n_vib)])
    }

    /// `Boson(n_cav) ⊗ Boson(n_vib) ⊗ Atom`, the layout of the full model.
    pub fn cavity_motion_atom(n_cav: usize, n_vib: usize) -> Result<Self> {
        Self::new(vec![
            Factor::Boson(n_cav),
            Factor::Boson(n_vib),
            Factor::Atom,
        ])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(Factor::dim).product()
    }

    pub fn factor(&self, index: usize) -> Result<Factor> {
        self.factors.get(index).copied().ok_or_else(|| {
            Error::Signature(format!(
                "factor index {index} out of range for {} factors",
                self.factors.len()
            ))
        })
    }

    /// Truncation of the bosonic factor at `index`.
    pub fn boson_dim(&self, index: usize) -> Result<usize> {
        match self.factor(index)? {
            Factor::Boson(n) => Ok(n),
            Factor::Atom => Err(Error::Signature(format!(
                "factor {index} is atomic, expected a boson"
            ))),
        }
    }

    pub fn require_atom(&self, index: usize) -> Result<()> {
        match self.factor(index)? {
            Factor::Atom => Ok(()),
            other => Err(Error::Signature(format!(
                "factor {index} is {other}, expected Atom(3)"
            ))),
        }
    }

    pub(crate) fn ensure_same(&self, other: &SpaceSignature) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Signature(format!("{self} vs {other}")))
        }
    }

    /// Product of dimensions left and right of `index`.
    pub(crate) fn strides(&self, index: usize) -> (usize, usize) {
        let left = self.factors[..index].iter().map(Factor::dim).product();
        let right = self.factors[index + 1..].iter().map(Factor::dim).product();
        (left, right)
    }

    /// Lift a local operator on factor `index` to the full space.
    pub(crate) fn embed(&self, index: usize, local: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let d = self.factor(index)?.dim();
        if local.nrows() != d || local.ncols() != d {
            return Err(Error::Signature(format!(
                "local operator is {}x{}, factor {index} has dimension {d}",
                local.nrows(),
                local.ncols()
            )));
        }
        let (left, right) = self.strides(index);
        let dim = self.dim();
        let mut out = DMatrix::zeros(dim, dim);
        // block-sparse Kronecker product I_left ⊗ local ⊗ I_right
        for l in 0..left {
            for (r, c) in (0..d).flat_map(|r| (0..d).map(move |c| (r, c))) {
                let v = local[(r, c)];
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..right {
                    let row = (l * d + r) * right + k;
                    let col = (l * d + c) * right + k;
                    out[(row, col)] = v;
                }
            }
        }
        Ok(out)
    }

    /// Split a flat basis index into per-factor indices.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.factors.len()];
        for (slot, f) in idx.iter_mut().zip(&self.factors).rev() {
            *slot = flat % f.dim();
            flat /= f.dim();
        }
        idx
    }

    pub fn flatten(&self, indices: &[usize]) -> Result<usize> {
        if indices.len() != self.factors.len() {
            return Err(Error::Signature(format!(
                "expected {} indices, got {}",
                self.factors.len(),
                indices.len()
            )));
        }
        let mut flat = 0;
        for (&i, f) in indices.iter().zip(&self.factors) {
            if i >= f.dim() {
                return Err(Error::Signature(format!("index {i} out of range for {f}")));
            }
            flat = flat * f.dim() + i;
        }
        Ok(flat)
    }
}

impl fmt::Display for SpaceSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, factor) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str(" ⊗ ")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}
