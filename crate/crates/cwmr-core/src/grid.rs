//! Square cell-average grids, the primitive-function correspondence,
//! quarter-sum decimation, and reflective boundary extension.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;

/// Axis-aligned rectangular domain. Cells are uniform squares, so consumers
/// only ever need the width; the full rectangle is kept for bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Domain {
    pub const UNIT: Domain = Domain {
        x_lo: 0.0,
        x_hi: 1.0,
        y_lo: 0.0,
        y_hi: 1.0,
    };

    /// The symmetric square [-1,1] x [-1,1].
    pub const SYMMETRIC: Domain = Domain {
        x_lo: -1.0,
        x_hi: 1.0,
        y_lo: -1.0,
        y_hi: 1.0,
    };

    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }
}

/// How stencils obtain values outside the grid.
///
/// `Reflect` is half-sample symmetric: the ghost cell k cells outside an edge
/// copies the interior cell k cells inside it, so constants extend exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPolicy {
    Reflect,
}

/// Square 2D array of cell averages. Row index i runs along x, column index
/// j along y; storage is row-major. `level` counts dyadic refinements from
/// the coarsest grid of a transform and is carried as metadata only.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGrid {
    n: usize,
    level: u32,
    domain: Domain,
    data: Vec<f64>,
}

impl CellGrid {
    pub fn new(n: usize, level: u32, domain: Domain, data: Vec<f64>) -> Result<Self, Error> {
        if data.len() != n * n {
            return Err(Error::SizeMismatch {
                left: n * n,
                right: data.len(),
            });
        }
        Ok(CellGrid {
            n,
            level,
            domain,
            data,
        })
    }

    pub fn constant(n: usize, level: u32, domain: Domain, value: f64) -> Self {
        CellGrid {
            n,
            level,
            domain,
            data: vec![value; n * n],
        }
    }

    pub fn from_fn(
        n: usize,
        level: u32,
        domain: Domain,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        CellGrid {
            n,
            level,
            domain,
            data,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn set_level(&mut self, level: u32) {
        self.level = level;
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Uniform cell side length.
    pub fn h(&self) -> f64 {
        self.domain.width() / self.n as f64
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Compensated arithmetic mean (fixed row-major order).
    pub fn mean(&self) -> f64 {
        let mut sum = Sum::new();
        for &v in &self.data {
            sum.add(v);
        }
        sum.value() / (self.n * self.n) as f64
    }
}

/// Point values of the primitive function F(x,y) = double integral of the
/// field, on the (n+1)x(n+1) grid nodes. The first row and column (the
/// domain corner axes) are exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveGrid {
    n: usize,
    level: u32,
    domain: Domain,
    data: Vec<f64>,
}

impl PrimitiveGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.domain.width() / self.n as f64
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.n + 1) + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Neumaier compensated accumulator; summation order stays the caller's.
pub(crate) struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    pub(crate) fn new() -> Self {
        Sum { s: 0.0, c: 0.0 }
    }

    #[inline]
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.s + v;
        if num_traits::Float::abs(self.s) >= num_traits::Float::abs(v) {
            self.c += (self.s - t) + v;
        } else {
            self.c += (v - t) + self.s;
        }
        self.s = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Quarter-sum coarsening: each coarse cell is the mean of its four children.
pub fn decimate(fine: &CellGrid) -> Result<CellGrid, Error> {
    if fine.n % 2 != 0 {
        return Err(Error::OddDimension { n: fine.n });
    }
    let m = fine.n / 2;
    let mut data = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let s = fine.get(2 * i, 2 * j)
                + fine.get(2 * i + 1, 2 * j)
                + fine.get(2 * i, 2 * j + 1)
                + fine.get(2 * i + 1, 2 * j + 1);
            data.push(0.25 * s);
        }
    }
    Ok(CellGrid {
        n: m,
        level: fine.level.saturating_sub(1),
        domain: fine.domain,
        data,
    })
}

/// Surround a grid with `halo` ghost cells per side according to `policy`.
/// The returned grid is (n + 2*halo)^2 with the domain enlarged to match, so
/// the cell size is unchanged.
pub fn extend(g: &CellGrid, halo: usize, policy: BoundaryPolicy) -> Result<CellGrid, Error> {
    if halo > g.n {
        return Err(Error::HaloExceedsGrid { halo, n: g.n });
    }
    let BoundaryPolicy::Reflect = policy;
    let n = g.n;
    let m = n + 2 * halo;
    let reflect = |i: isize| -> usize {
        if i < 0 {
            (-1 - i) as usize
        } else if i as usize >= n {
            2 * n - 1 - i as usize
        } else {
            i as usize
        }
    };
    let mut data = Vec::with_capacity(m * m);
    for i in 0..m {
        let si = reflect(i as isize - halo as isize);
        for j in 0..m {
            let sj = reflect(j as isize - halo as isize);
            data.push(g.get(si, sj));
        }
    }
    let h = g.h();
    let pad = halo as f64 * h;
    Ok(CellGrid {
        n: m,
        level: g.level,
        domain: Domain {
            x_lo: g.domain.x_lo - pad,
            x_hi: g.domain.x_hi + pad,
            y_lo: g.domain.y_lo - pad,
            y_hi: g.domain.y_hi + pad,
        },
        data,
    })
}

/// Node values of the primitive: F(i,j) = h^2 * sum of all cell averages in
/// the lower-left i x j block. Accumulation is compensated and row-major so
/// the cells/primitive correspondence round-trips at large sizes.
pub fn cells_to_primitive(g: &CellGrid) -> PrimitiveGrid {
    let n = g.n;
    let h2 = g.h() * g.h();
    let mut data = vec![0.0; (n + 1) * (n + 1)];
    // Running compensated column sums of the row-prefix values.
    let mut col = Vec::with_capacity(n);
    for _ in 0..n {
        col.push(Sum::new());
    }
    for i in 0..n {
        let mut row = Sum::new();
        for j in 0..n {
            row.add(g.get(i, j));
            col[j].add(row.value());
            data[(i + 1) * (n + 1) + (j + 1)] = h2 * col[j].value();
        }
    }
    PrimitiveGrid {
        n,
        level: g.level,
        domain: g.domain,
        data,
    }
}

/// Inverse of [`cells_to_primitive`]: mixed second difference over h^2.
pub fn primitive_to_cells(f: &PrimitiveGrid) -> CellGrid {
    let n = f.n;
    let h2 = f.h() * f.h();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let v = f.get(i + 1, j + 1) - f.get(i, j + 1) - f.get(i + 1, j) + f.get(i, j);
            data.push(v / h2);
        }
    }
    CellGrid {
        n,
        level: f.level,
        domain: f.domain,
        data,
    }
}
