use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64};
use super::DIMENSION_CAP;
use crate::error::{invalid, Error, Result};

/// Ordered register dimensions of a composite Hilbert space.
///
/// Register 0 is the least significant digit of a basis index. Tensoring
/// `a ⊗ b` places the registers of `a` above those of `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct RegisterLayout(pub(super) Vec<usize>);

impl RegisterLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(invalid("a layout needs at least one register"));
        }
        if dims.iter().any(|&d| d < 2) {
            return Err(invalid("register dimensions must be at least 2"));
        }
        let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        match total {
            Some(t) if t <= DIMENSION_CAP => Ok(Self(dims)),
            Some(t) => Err(Error::Capacity {
                requested: t,
                cap: DIMENSION_CAP,
            }),
            None => Err(Error::Capacity {
                requested: usize::MAX,
                cap: DIMENSION_CAP,
            }),
        }
    }

    pub fn qubits(count: usize) -> Result<Self> {
        Self::new(vec![2; count])
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0.iter().product()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut acc = 1;
        for &d in &self.0 {
            out.push(acc);
            acc *= d;
        }
        out
    }

    /// Layout of `self ⊗ low`.
    pub fn above(&self, low: &RegisterLayout) -> Result<Self> {
        let mut dims = low.0.clone();
        dims.extend_from_slice(&self.0);
        Self::new(dims)
    }

    pub fn sub_layout(&self, registers: &[usize]) -> Result<Self> {
        self.check_registers(registers)?;
        Self::new(registers.iter().map(|&r| self.0[r]).collect())
    }

    pub(crate) fn check_registers(&self, registers: &[usize]) -> Result<()> {
        if registers.is_empty() {
            return Err(invalid("register set must not be empty"));
        }
        for (k, &r) in registers.iter().enumerate() {
            if r >= self.0.len() {
                return Err(invalid(format!(
                    "register {r} out of range for a {}-register layout",
                    self.0.len()
                )));
            }
            if registers[..k].contains(&r) {
                return Err(invalid(format!("register {r} listed twice")));
            }
        }
        Ok(())
    }

    /// Index arithmetic for acting on a subset of registers.
    ///
    /// `registers[0]` is the least significant register of the local space.
    pub(crate) fn local_map(&self, registers: &[usize]) -> Result<LocalMap> {
        self.check_registers(registers)?;
        let strides = self.strides();
        let local_dims: Vec<usize> = registers.iter().map(|&r| self.0[r]).collect();
        let local_dim: usize = local_dims.iter().product();
        let mut offsets = Vec::with_capacity(local_dim);
        for l in 0..local_dim {
            let mut rest = l;
            let mut off = 0;
            for (k, &r) in registers.iter().enumerate() {
                off += (rest % local_dims[k]) * strides[r];
                rest /= local_dims[k];
            }
            offsets.push(off);
        }
        let bases = (0..self.dim())
            .filter(|&g| registers.iter().all(|&r| (g / strides[r]) % self.0[r] == 0))
            .collect();
        Ok(LocalMap { offsets, bases })
    }

    /// Embeds an operator on `registers` into the full space (identity elsewhere).
    pub fn lift(&self, op: &ComplexMatrix, registers: &[usize]) -> Result<ComplexMatrix> {
        let map = self.local_map(registers)?;
        let d = map.offsets.len();
        if op.rows() != d || op.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: op.rows(),
            });
        }
        let n = self.dim();
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for &b in &map.bases {
            for (l1, &o1) in map.offsets.iter().enumerate() {
                for (l2, &o2) in map.offsets.iter().enumerate() {
                    entries[(b + o1) * n + (b + o2)] = op.get(l1, l2);
                }
            }
        }
        ComplexMatrix::from_row_major(n, n, entries)
    }
}

impl TryFrom<Vec<usize>> for RegisterLayout {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<RegisterLayout> for Vec<usize> {
    fn from(layout: RegisterLayout) -> Self {
        layout.0
    }
}

pub(crate) struct LocalMap {
    /// Global offset of each local basis index.
    pub offsets: Vec<usize>,
    /// Global indices whose selected digits are all zero.
    pub bases: Vec<usize>,
}
