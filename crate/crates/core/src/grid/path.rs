//! Path-ordered integration over the grid and the edge-level RK4 kernel
//! shared by every Riccati-type solver.

use rayon::prelude::*;

use super::{Axis, ConformalGrid, Payload, SampledField};
use crate::error::Result;

/// The edge leaving node `(p, q)` in the positive `axis` direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub p: usize,
    pub q: usize,
    pub axis: Axis,
}

impl Edge {
    pub fn end(&self) -> (usize, usize) {
        match self.axis {
            Axis::U => (self.p + 1, self.q),
            Axis::V => (self.p, self.q + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathOrder {
    /// Seed column (`p = 0`) bottom to top, then each row left to right.
    RowsFirst,
    /// Seed row (`q = 0`) left to right, then each column bottom to top.
    ColumnsFirst,
}

impl PathOrder {
    pub fn transposed(self) -> Self {
        match self {
            PathOrder::RowsFirst => PathOrder::ColumnsFirst,
            PathOrder::ColumnsFirst => PathOrder::RowsFirst,
        }
    }
}

fn sweep<Y, F>(
    start: Y,
    len: usize,
    mut edge_at: impl FnMut(usize) -> Edge,
    step: &F,
) -> Result<Vec<Y>>
where
    Y: Copy,
    F: Fn(Edge, Y) -> Result<Y>,
{
    let mut out = Vec::with_capacity(len);
    out.push(start);
    for k in 0..len - 1 {
        let next = step(edge_at(k), out[k])?;
        out.push(next);
    }
    Ok(out)
}

/// Propagates `seed` from node `(0, 0)` to every node, advancing across one
/// edge at a time with `step`. After the seed line the sweeps are
/// independent and run in parallel; the result is row-major.
pub fn integrate_along_paths<Y, F>(
    grid: ConformalGrid,
    seed: Y,
    order: PathOrder,
    step: F,
) -> Result<Vec<Y>>
where
    Y: Copy + Send + Sync,
    F: Fn(Edge, Y) -> Result<Y> + Sync,
{
    let (nu, nv) = (grid.nu, grid.nv);
    match order {
        PathOrder::RowsFirst => {
            let column = sweep(
                seed,
                nv,
                |q| Edge {
                    p: 0,
                    q,
                    axis: Axis::V,
                },
                &step,
            )?;
            let rows = column
                .par_iter()
                .enumerate()
                .map(|(q, &start)| {
                    sweep(
                        start,
                        nu,
                        |p| Edge {
                            p,
                            q,
                            axis: Axis::U,
                        },
                        &step,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(rows.into_iter().flatten().collect())
        }
        PathOrder::ColumnsFirst => {
            let row = sweep(
                seed,
                nu,
                |p| Edge {
                    p,
                    q: 0,
                    axis: Axis::U,
                },
                &step,
            )?;
            let columns = row
                .par_iter()
                .enumerate()
                .map(|(p, &start)| {
                    sweep(
                        start,
                        nv,
                        |q| Edge {
                            p,
                            q,
                            axis: Axis::V,
                        },
                        &step,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let mut out = Vec::with_capacity(grid.len());
            for q in 0..nv {
                for column in &columns {
                    out.push(column[q]);
                }
            }
            Ok(out)
        }
    }
}

/// Lagrange weights at `x` for the integer nodes `first..first + count`.
fn lagrange_weights(first: usize, count: usize, x: f64) -> [f64; 4] {
    let mut w = [0.0; 4];
    for (a, slot) in w.iter_mut().enumerate().take(count) {
        let xa = (first + a) as f64;
        let mut l = 1.0;
        for b in 0..count {
            if b != a {
                let xb = (first + b) as f64;
                l *= (x - xb) / (xa - xb);
            }
        }
        *slot = l;
    }
    w
}

/// Value at the midpoint of `edge` by cubic interpolation along the edge's
/// grid line (quadratic when the line has only three nodes). The stencil is
/// centred where possible and shifted inward at the boundary.
pub fn edge_midpoint<T: Payload>(field: &SampledField<T>, edge: Edge) -> T {
    let n = field.grid.count(edge.axis);
    let k = match edge.axis {
        Axis::U => edge.p,
        Axis::V => edge.q,
    };
    let count = n.min(4);
    let first = k.saturating_sub(1).min(n - count);
    let w = lagrange_weights(first, count, k as f64 + 0.5);
    let mut acc = T::default();
    for (a, weight) in w.iter().enumerate().take(count) {
        let j = first + a;
        let value = match edge.axis {
            Axis::U => *field.at(j, edge.q),
            Axis::V => *field.at(edge.p, j),
        };
        acc = acc + value * *weight;
    }
    acc
}

/// Where along an edge a right-hand side is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Start,
    Mid,
    End,
}

/// One classical Runge–Kutta step of length `h`.
pub fn rk4_step<Y, F>(y0: Y, h: f64, rhs: F) -> Y
where
    Y: Payload,
    F: Fn(Stage, Y) -> Y,
{
    let k1 = rhs(Stage::Start, y0);
    let k2 = rhs(Stage::Mid, y0 + k1 * (0.5 * h));
    let k3 = rhs(Stage::Mid, y0 + k2 * (0.5 * h));
    let k4 = rhs(Stage::End, y0 + k3 * h);
    y0 + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}
