use alloc::format;

use crate::{math, Error, Result};

/// Largest supported `|κ|` or `|ε|`.
pub const MAX_DEFORMATION: f64 = 0.2;
pub const DEFAULT_REFRACTIVE_INDEX: f64 = 3.3;
pub const DEFAULT_OVAL_A: f64 = 1.0;
pub const DEFAULT_OVAL_B: f64 = 1.03;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// `ρ(φ) = 1 + κ cos 2φ`, centred at the origin.
    Quadrupole,
    /// `x²/a² + (1 + εx) y²/b² = 1`.
    Oval { a: f64, b: f64 },
    /// The rectangle `[0, width] × [0, height]`; a test domain with a closed
    /// form spectrum. Deformation is ignored.
    Rectangle { width: f64, height: f64 },
}

/// A closed hard-wall domain with deformation `η` (κ for the quadrupole, ε
/// for the oval) and refractive index `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilliardGeometry {
    shape: Shape,
    deformation: f64,
    refractive_index: f64,
}

impl BilliardGeometry {
    pub fn quadrupole(kappa: f64) -> Result<Self> {
        Self::new(Shape::Quadrupole, kappa, DEFAULT_REFRACTIVE_INDEX)
    }

    pub fn oval(epsilon: f64) -> Result<Self> {
        Self::new(
            Shape::Oval {
                a: DEFAULT_OVAL_A,
                b: DEFAULT_OVAL_B,
            },
            epsilon,
            DEFAULT_REFRACTIVE_INDEX,
        )
    }

    pub fn unit_square() -> Self {
        Self::rectangle(1.0, 1.0).expect("unit square is valid")
    }

    pub fn rectangle(width: f64, height: f64) -> Result<Self> {
        Self::new(Shape::Rectangle { width, height }, 0.0, DEFAULT_REFRACTIVE_INDEX)
    }

    pub fn new(shape: Shape, deformation: f64, refractive_index: f64) -> Result<Self> {
        if !deformation.is_finite() || deformation.abs() > MAX_DEFORMATION {
            return Err(Error::InvalidGeometry(format!(
                "deformation {deformation} outside the supported range |η| ≤ {MAX_DEFORMATION}"
            )));
        }
        if !(refractive_index > 0.0) || !refractive_index.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "refractive index must be positive, got {refractive_index}"
            )));
        }
        match shape {
            Shape::Oval { a, b } if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) => {
                return Err(Error::InvalidGeometry(format!("oval semi-axes must be positive, got a={a}, b={b}")));
            }
            // (1 + εx) must stay positive on |x| ≤ a or the curve opens up.
            Shape::Oval { a, .. } if deformation.abs() * a >= 1.0 => {
                return Err(Error::InvalidGeometry("oval deformation makes the boundary open (|ε|·a ≥ 1)".into()));
            }
            Shape::Rectangle { width, height }
                if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) =>
            {
                return Err(Error::InvalidGeometry(format!(
                    "rectangle sides must be positive, got {width}×{height}"
                )));
            }
            _ => {}
        }
        Ok(BilliardGeometry {
            shape,
            deformation,
            refractive_index,
        })
    }

    pub fn with_deformation(&self, deformation: f64) -> Result<Self> {
        Self::new(self.shape, deformation, self.refractive_index)
    }

    pub fn with_refractive_index(&self, n: f64) -> Result<Self> {
        Self::new(self.shape, self.deformation, n)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn deformation(&self) -> f64 {
        self.deformation
    }

    pub fn refractive_index(&self) -> f64 {
        self.refractive_index
    }

    /// Quadrupole boundary radius `1 + κ cos 2φ`; `None` for other shapes.
    pub fn boundary_radius(&self, angle: f64) -> Option<f64> {
        match self.shape {
            Shape::Quadrupole => Some(1.0 + self.deformation * math::cos(2.0 * angle)),
            _ => None,
        }
    }

    /// Implicit boundary function: negative inside, zero on the boundary,
    /// positive outside.
    pub fn level(&self, x: f64, y: f64) -> f64 {
        match self.shape {
            Shape::Quadrupole => {
                let r = math::hypot(x, y);
                let phi = math::atan2(y, x);
                r - (1.0 + self.deformation * math::cos(2.0 * phi))
            }
            Shape::Oval { a, b } => {
                x * x / (a * a) + (1.0 + self.deformation * x) * y * y / (b * b) - 1.0
            }
            Shape::Rectangle { width, height } => (-x).max(x - width).max(-y).max(y - height),
        }
    }

    /// Closed-domain membership: `x²/a² + (1+εx) y²/b² ≤ 1` for the oval,
    /// `r ≤ ρ(φ)` for the quadrupole.
    pub fn inside_or_on(&self, x: f64, y: f64) -> bool {
        self.level(x, y) <= BOUNDARY_SLACK
    }

    /// Strict interior, with a small slack so lattice points lying on the
    /// boundary up to roundoff count as boundary.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.level(x, y) < -BOUNDARY_SLACK
    }

    pub fn on_boundary(&self, x: f64, y: f64) -> bool {
        self.level(x, y).abs() <= BOUNDARY_SLACK
    }

    /// Axis-aligned box `(x_min, x_max, y_min, y_max)` containing the domain.
    pub fn extent(&self) -> (f64, f64, f64, f64) {
        let eta = self.deformation.abs();
        match self.shape {
            Shape::Quadrupole => {
                let r = 1.0 + eta;
                (-r, r, -r, r)
            }
            Shape::Oval { a, b } => {
                // y² ≤ b² / (1 + εx) is largest where 1 + εx is smallest.
                let ymax = b / math::sqrt(1.0 - eta * a);
                (-a, a, -ymax, ymax)
            }
            Shape::Rectangle { width, height } => (0.0, width, 0.0, height),
        }
    }
}

const BOUNDARY_SLACK: f64 = 1e-12;
