use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::sde::OscillatorParams;

/// Uniform grid on `[-L, L] x [-Y, Y]`, stored column by column
/// (index `i * nz + j`, `i` along `y`, `j` along `z`).
///
/// `ny` is odd so that `y = 0` is a grid line; `z = ±Y` are the first and
/// last rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    half_width: f64,
    bound: f64,
    ny: usize,
    nz: usize,
    hy: f64,
    hz: f64,
}

/// Role of a node in the discrete problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// Governed by the interior operator, including the rows `z = ±Y` on
    /// their inflow halves and the two junction nodes `(0, ±Y)`.
    Interior,
    /// `y > 0` on `z = Y`.
    PlusLine,
    /// `y < 0` on `z = -Y`.
    MinusLine,
    /// `y = L`, off the line: immediate exit to `(L, Y)`.
    FarPlus,
    /// `y = -L`, off the line: immediate exit to `(-L, -Y)`.
    FarMinus,
}

impl Grid {
    pub fn new(params: &OscillatorParams, half_width: f64, ny: usize, nz: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "velocity truncation must be positive, got {half_width}"
            )));
        }
        if ny < 3 || ny.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "ny must be odd and at least 3, got {ny}"
            )));
        }
        if nz < 3 {
            return Err(Error::InvalidArgument(format!(
                "nz must be at least 3, got {nz}"
            )));
        }
        let bound = params.bound();
        Ok(Self {
            half_width,
            bound,
            ny,
            nz,
            hy: 2.0 * half_width / (ny - 1) as f64,
            hz: 2.0 * bound / (nz - 1) as f64,
        })
    }

    /// Grid truncated at six stationary velocity deviations, `L = 6 / sqrt(2 c0)`.
    pub fn with_default_truncation(
        params: &OscillatorParams,
        ny: usize,
        nz: usize,
    ) -> Result<Self> {
        Self::new(params, params.velocity_scale(), ny, nz)
    }

    /// Halves both spacings.
    pub fn refined(&self) -> Self {
        let ny = 2 * (self.ny - 1) + 1;
        let nz = 2 * (self.nz - 1) + 1;
        Self {
            ny,
            nz,
            hy: self.hy / 2.0,
            hz: self.hz / 2.0,
            ..*self
        }
    }

    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn nz(&self) -> usize {
        self.nz
    }
    pub fn hy(&self) -> f64 {
        self.hy
    }
    pub fn hz(&self) -> f64 {
        self.hz
    }
    pub fn half_width(&self) -> f64 {
        self.half_width
    }
    pub fn bound(&self) -> f64 {
        self.bound
    }
    pub fn len(&self) -> usize {
        self.ny * self.nz
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Column index of `y = 0`.
    pub fn center(&self) -> usize {
        (self.ny - 1) / 2
    }

    #[inline]
    pub fn y(&self, i: usize) -> f64 {
        // Symmetric evaluation keeps y(i) = -y(ny - 1 - i) exactly.
        let c = self.center() as f64;
        (i as f64 - c) * self.hy
    }

    #[inline]
    pub fn z(&self, j: usize) -> f64 {
        let c = (self.nz - 1) as f64 / 2.0;
        (j as f64 - c) * self.hz
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nz + j
    }

    pub fn top(&self) -> usize {
        self.nz - 1
    }

    pub fn kind(&self, i: usize, j: usize) -> NodeKind {
        let c = self.center();
        if j == self.top() && i > c {
            NodeKind::PlusLine
        } else if j == 0 && i < c {
            NodeKind::MinusLine
        } else if i == self.ny - 1 {
            NodeKind::FarPlus
        } else if i == 0 {
            NodeKind::FarMinus
        } else {
            NodeKind::Interior
        }
    }

    /// Node `(0, Y)` where a `+Y` plastic phase hands back to the interior.
    pub fn plus_junction(&self) -> usize {
        self.index(self.center(), self.top())
    }

    /// Node `(0, -Y)`.
    pub fn minus_junction(&self) -> usize {
        self.index(self.center(), 0)
    }
}

/// Which problem a field solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldTag {
    PiPlus,
    PiMinus,
    Eta,
    PsiPlus,
    PsiMinus,
    VPlus,
    VMinus,
    SecondMoment,
}

/// Nodal values of one solution.
///
/// Node values at the junctions `(0, ±Y)` are the interior-side limits
/// `(0-, Y)` and `(0+, -Y)`. The opposite one-sided limits, taken along the
/// boundary lines, are kept separately.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub grid: Grid,
    pub tag: FieldTag,
    pub values: Vec<f64>,
    /// Limit along `z = Y` as `y -> 0+`.
    pub plus_line_limit: f64,
    /// Limit along `z = -Y` as `y -> 0-`.
    pub minus_line_limit: f64,
}

impl GridField {
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Value at `(0-, Y)`.
    pub fn at_plus_corner(&self) -> f64 {
        self.values[self.grid.plus_junction()]
    }

    /// Value at `(0+, -Y)`.
    pub fn at_minus_corner(&self) -> f64 {
        self.values[self.grid.minus_junction()]
    }

    /// Bilinear interpolation; arguments are clamped to the grid.
    pub fn sample(&self, y: f64, z: f64) -> f64 {
        let g = &self.grid;
        let fy = ((y + g.half_width) / g.hy).clamp(0.0, (g.ny - 1) as f64);
        let fz = ((z + g.bound) / g.hz).clamp(0.0, (g.nz - 1) as f64);
        let i = (fy.floor() as usize).min(g.ny - 2);
        let j = (fz.floor() as usize).min(g.nz - 2);
        let (ty, tz) = (fy - i as f64, fz - j as f64);
        let v00 = self.at(i, j);
        let v10 = self.at(i + 1, j);
        let v01 = self.at(i, j + 1);
        let v11 = self.at(i + 1, j + 1);
        (1.0 - ty) * ((1.0 - tz) * v00 + tz * v01) + ty * ((1.0 - tz) * v10 + tz * v11)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Writes `y,z,value`, `y` outermost (storage order).
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "y,z,value")?;
        for i in 0..self.grid.ny {
            for j in 0..self.grid.nz {
                writeln!(
                    out,
                    "{},{},{}",
                    self.grid.y(i),
                    self.grid.z(j),
                    self.at(i, j)
                )?;
            }
        }
        Ok(())
    }
}
