//! Satake tuples and the two local Euler factors built from them.
//!
//! A tuple `(a_0, a_1, ..., a_g)` is stored by its angles, so every
//! parameter has modulus one by construction. The only remaining invariant,
//! the trivial central character `a_0^2 a_1 ... a_g = 1`, becomes the
//! angular congruence `2 theta_0 + theta_1 + ... + theta_g = 0 (mod 2 pi)`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for the central-character constraint.
pub const TOL_CONSTRAINT: f64 = 1e-10;
/// Default tolerance on the imaginary part of quantities that must be real.
pub const TOL_REAL: f64 = 1e-10;

/// Which square root of `(a_1 ... a_g)^{-1}` is taken for `a_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// `theta_0 = -(theta_1 + ... + theta_g) / 2`
    Plus,
    /// `theta_0 = -(theta_1 + ... + theta_g) / 2 + pi`
    Minus,
}

impl Branch {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Branch::Minus
        } else {
            Branch::Plus
        }
    }
}

/// Local parameters `(a_0, ..., a_g)` of an unramified representation at one prime.
#[derive(Debug, Clone, PartialEq)]
pub struct SatakeTuple {
    genus: usize,
    angles: Vec<f64>,
    /// Moduli recorded alongside ingested data. `None` means the tuple came
    /// from angles alone and is unit-modulus.
    recorded_moduli: Option<Vec<f64>>,
}

/// An invariant that a tuple fails to satisfy.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `|a_0^2 a_1 ... a_g - 1|` exceeds the tolerance.
    CentralCharacter { residual: f64, tol: f64 },
    /// A recorded modulus is off the unit circle.
    NotTempered { index: usize, modulus: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CentralCharacter { residual, tol } => write!(
                f,
                "central character constraint violated: |a0^2*a1*...*ag - 1| = {residual:e} > {tol:e}"
            ),
            Violation::NotTempered { index, modulus } => {
                write!(f, "parameter a{index} has modulus {modulus}, not 1")
            }
        }
    }
}

impl SatakeTuple {
    /// Builds a tuple from `g + 1` angles `(theta_0, ..., theta_g)`.
    ///
    /// Only the shape is checked here. The central constraint is checked by
    /// [`SatakeTuple::validate`], so deliberately broken tuples can still be
    /// represented.
    pub fn new(genus: usize, angles: Vec<f64>) -> Result<Self> {
        if genus == 0 {
            return Err(Error::ZeroGenus);
        }
        if angles.len() != genus + 1 {
            return Err(Error::ShapeMismatch {
                expected: genus + 1,
                got: angles.len(),
            });
        }
        if let Some(index) = angles.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonFiniteAngle { index });
        }
        Ok(Self {
            genus,
            angles,
            recorded_moduli: None,
        })
    }

    /// Solves the central constraint for `a_0` given the free angles
    /// `theta_1, ..., theta_g`.
    pub fn from_free_angles(genus: usize, free: &[f64], branch: Branch) -> Result<Self> {
        if genus == 0 {
            return Err(Error::ZeroGenus);
        }
        if free.len() != genus {
            return Err(Error::ShapeMismatch {
                expected: genus,
                got: free.len(),
            });
        }
        let half: f64 = -free.iter().sum::<f64>() / 2.0;
        let theta0 = match branch {
            Branch::Plus => half,
            Branch::Minus => half + PI,
        };
        let mut angles = Vec::with_capacity(genus + 1);
        angles.push(theta0);
        angles.extend_from_slice(free);
        Self::new(genus, angles)
    }

    /// The all-ones tuple of the given genus.
    pub fn identity(genus: usize) -> Result<Self> {
        Self::new(genus, vec![0.0; genus + 1])
    }

    /// Attaches moduli recorded in ingested data, one per parameter.
    pub fn with_recorded_moduli(mut self, moduli: Vec<f64>) -> Result<Self> {
        if moduli.len() != self.genus + 1 {
            return Err(Error::ShapeMismatch {
                expected: self.genus + 1,
                got: moduli.len(),
            });
        }
        self.recorded_moduli = Some(moduli);
        Ok(self)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// `(theta_0, ..., theta_g)`.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// `theta_1, ..., theta_g`.
    pub fn free_angles(&self) -> &[f64] {
        &self.angles[1..]
    }

    pub fn recorded_moduli(&self) -> Option<&[f64]> {
        self.recorded_moduli.as_deref()
    }

    /// `a_i` as a complex number.
    pub fn param(&self, i: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.angles[i])
    }

    /// `a_0, ..., a_g` as complex numbers.
    pub fn params(&self) -> Vec<Complex64> {
        self.angles
            .iter()
            .map(|&a| Complex64::from_polar(1.0, a))
            .collect()
    }

    /// `|a_0^2 a_1 ... a_g - 1|`.
    pub fn constraint_residual(&self) -> f64 {
        let phase = 2.0 * self.angles[0] + self.angles[1..].iter().sum::<f64>();
        2.0 * (phase / 2.0).sin().abs()
    }

    /// Lists every violated invariant. An empty list means the tuple is valid.
    pub fn validate(&self, tol: f64) -> Vec<Violation> {
        let mut out = Vec::new();
        let residual = self.constraint_residual();
        if residual.is_nan() || residual > tol {
            out.push(Violation::CentralCharacter { residual, tol });
        }
        if let Some(moduli) = &self.recorded_moduli {
            for (index, &m) in moduli.iter().enumerate() {
                if (m - 1.0).abs() > tol {
                    out.push(Violation::NotTempered { index, modulus: m });
                }
            }
        }
        out
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.validate(tol).is_empty()
    }

    /// Whether every parameter lies on the unit circle.
    ///
    /// Always true for tuples built from angles; only ingested tuples carrying
    /// recorded moduli can fail.
    pub fn is_tempered(&self, tol: f64) -> bool {
        match &self.recorded_moduli {
            None => true,
            Some(moduli) => moduli.iter().all(|m| (m - 1.0).abs() <= tol),
        }
    }

    /// `a_0 (1 + a_1) ... (1 + a_g)` without the reality check.
    pub fn mu_complex(&self) -> Complex64 {
        self.angles[1..].iter().fold(self.param(0), |acc, &t| {
            acc * (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, t))
        })
    }

    /// The normalized Hecke eigenvalue, from the factored product form.
    pub fn mu(&self) -> Result<f64> {
        self.mu_with_tol(TOL_REAL)
    }

    pub fn mu_with_tol(&self, tol: f64) -> Result<f64> {
        real_part(self.mu_complex(), tol)
    }

    /// The normalized Hecke eigenvalue as the literal sum over all `2^g`
    /// subsets `a_0 a_{i_1} ... a_{i_k}`.
    pub fn mu_expanded(&self) -> Result<f64> {
        let params = self.params();
        let free = &params[1..];
        let mut total = Complex64::new(0.0, 0.0);
        for mask in 0u64..(1u64 << self.genus) {
            let mut term = params[0];
            for (i, a) in free.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    term *= a;
                }
            }
            total += term;
        }
        real_part(total, TOL_REAL)
    }

    /// `1 + sum_i (a_i + a_i^{-1}) = 1 + 2 sum_i cos(theta_i)`.
    pub fn std_trace(&self) -> f64 {
        1.0 + 2.0 * self.angles[1..].iter().map(|t| t.cos()).sum::<f64>()
    }

    pub fn local_factor(&self, kind: FactorKind) -> LocalFactor {
        LocalFactor::new(self, kind)
    }

    /// Angles of the inverse roots of the requested local factor.
    pub fn root_angles(&self, kind: FactorKind) -> Vec<f64> {
        let g = self.genus;
        let free = &self.angles[1..];
        match kind {
            FactorKind::Spin => (0u64..(1u64 << g))
                .map(|mask| {
                    let mut a = self.angles[0];
                    for (i, t) in free.iter().enumerate() {
                        if mask & (1 << i) != 0 {
                            a += t;
                        }
                    }
                    a
                })
                .collect(),
            FactorKind::Std => {
                let mut out = Vec::with_capacity(2 * g + 1);
                out.push(0.0);
                for &t in free {
                    out.push(t);
                    out.push(-t);
                }
                out
            }
        }
    }
}

pub(crate) fn real_part(z: Complex64, tol: f64) -> Result<f64> {
    if z.im.abs() > tol || z.im.is_nan() {
        return Err(Error::NonReal { imag: z.im, tol });
    }
    Ok(z.re)
}

/// Which of the two local L-factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorKind {
    /// Degree `2^g`, inverse roots `a_0 a_{i_1} ... a_{i_k}`.
    Spin,
    /// Degree `2g + 1`, inverse roots `1, a_i, a_i^{-1}`.
    Std,
}

impl FactorKind {
    pub fn degree(self, genus: usize) -> usize {
        match self {
            FactorKind::Spin => 1 << genus,
            FactorKind::Std => 2 * genus + 1,
        }
    }
}

impl fmt::Display for FactorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FactorKind::Spin => "spin",
            FactorKind::Std => "std",
        })
    }
}

/// One local Euler factor `prod_j (1 - alpha_j X)^{-1}` with `X = p^{-s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFactor {
    kind: FactorKind,
    genus: usize,
    root_angles: Vec<f64>,
}

impl LocalFactor {
    pub fn new(tuple: &SatakeTuple, kind: FactorKind) -> Self {
        Self {
            kind,
            genus: tuple.genus(),
            root_angles: tuple.root_angles(kind),
        }
    }

    pub fn kind(&self) -> FactorKind {
        self.kind
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn degree(&self) -> usize {
        self.root_angles.len()
    }

    pub fn root_angles(&self) -> &[f64] {
        &self.root_angles
    }

    /// The inverse roots `alpha_j`.
    pub fn roots(&self) -> Vec<Complex64> {
        self.root_angles
            .iter()
            .map(|&a| Complex64::from_polar(1.0, a))
            .collect()
    }
}
