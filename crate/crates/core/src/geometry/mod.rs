//! Sampled correlation measures over the `(c1, c2, c3)` cube at fixed `(r, s)`
//! and extraction of their level surfaces.

mod export;
mod marching;
mod tables;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::correlations::{concurrence_xstate, gmqd_xstate};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::state::{XStateParams, PSD_TOL};

pub use export::{
    export_field, export_mesh, field_from_json, read_field_json, write_field_csv, write_field_json,
    write_mesh_obj, FieldFormat,
};
pub use marching::{extract_isosurface, IsoMesh};

/// Default samples per axis; odd so the origin and the cube corners are on the grid.
pub const DEFAULT_RESOLUTION: usize = 81;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Gmqd,
    Concurrence,
    /// Minimum eigenvalue of the state; level 0 is the boundary of the
    /// physical region.
    Physicality,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Gmqd => "gmqd",
            Measure::Concurrence => "concurrence",
            Measure::Physicality => "physicality",
        }
    }

    /// Value at a single parameter point; NaN marks unphysical points for
    /// the correlation measures.
    pub fn evaluate(self, p: &XStateParams) -> f64 {
        match self {
            Measure::Physicality => p.min_eigenvalue(),
            _ if !p.is_physical(PSD_TOL) => f64::NAN,
            Measure::Gmqd => gmqd_xstate(p),
            Measure::Concurrence => concurrence_xstate(p),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gmqd" => Ok(Measure::Gmqd),
            "concurrence" => Ok(Measure::Concurrence),
            "physicality" => Ok(Measure::Physicality),
            other => Err(Error::InvalidConfig(format!("unknown measure '{other}'"))),
        }
    }
}

/// Scalar samples on an `n × n × n` grid spanning `[−1, 1]³`.
///
/// Storage is `c1`-fastest: the sample at grid indices `(i, j, k)` is
/// `values[i + n·(j + n·k)]`. Non-finite entries are the unphysical sentinel.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub r: f64,
    pub s: f64,
    /// `None` for ad-hoc fields built with [`ScalarField::from_fn`].
    pub measure: Option<Measure>,
    pub n: usize,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub const ORIGIN: f64 = -1.0;

    /// Samples `f` at every grid point.
    pub fn from_fn<F>(n: usize, exec: Execution, f: F) -> Result<Self>
    where
        F: Fn([f64; 3]) -> f64 + Sync + Send,
    {
        check_resolution(n)?;
        let slabs = exec.map(n, |k| {
            let mut slab = Vec::with_capacity(n * n);
            for j in 0..n {
                for i in 0..n {
                    slab.push(f([coordinate(n, i), coordinate(n, j), coordinate(n, k)]));
                }
            }
            slab
        });
        Ok(Self {
            r: 0.0,
            s: 0.0,
            measure: None,
            n,
            values: slabs.concat(),
        })
    }

    pub fn spacing(&self) -> f64 {
        2.0 / (self.n - 1) as f64
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n * (j + self.n * k)
    }

    pub fn grid_indices(&self, index: usize) -> [usize; 3] {
        let n = self.n;
        [index % n, (index / n) % n, index / (n * n)]
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        coordinate(self.n, i)
    }

    pub fn point(&self, index: usize) -> [f64; 3] {
        self.grid_indices(index).map(|i| self.coordinate(i))
    }

    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.index(i, j, k)]
    }

    /// X-state parameters at a grid point.
    pub fn params(&self, index: usize) -> XStateParams {
        let [c1, c2, c3] = self.point(index);
        XStateParams::new(self.r, self.s, c1, c2, c3)
    }

    /// Number of finite samples `≥ level`.
    pub fn count_at_least(&self, level: f64) -> usize {
        self.values
            .iter()
            .filter(|v| v.is_finite() && **v >= level)
            .count()
    }

    pub fn max_finite(&self) -> Option<f64> {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .reduce(f64::max)
    }

    /// Trilinear interpolation at a point inside the cube.
    pub fn trilinear(&self, point: [f64; 3]) -> f64 {
        let h = self.spacing();
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for axis in 0..3 {
            let u = (point[axis] - Self::ORIGIN) / h;
            let cell = (u.floor().max(0.0) as usize).min(self.n - 2);
            base[axis] = cell;
            frac[axis] = u - cell as f64;
        }
        let mut acc = 0.0;
        for corner in 0..8 {
            let offset = [corner & 1, (corner >> 1) & 1, (corner >> 2) & 1];
            let weight: f64 = (0..3)
                .map(|a| {
                    if offset[a] == 1 {
                        frac[a]
                    } else {
                        1.0 - frac[a]
                    }
                })
                .product();
            if weight != 0.0 {
                acc += weight
                    * self.value(
                        base[0] + offset[0],
                        base[1] + offset[1],
                        base[2] + offset[2],
                    );
            }
        }
        acc
    }
}

fn check_resolution(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "grid resolution must be at least 2, got {n}"
        )));
    }
    Ok(())
}

/// Grid coordinate `−1 + 2i/(n−1)`; exact at both ends and, for odd `n`, at 0.
fn coordinate(n: usize, i: usize) -> f64 {
    -1.0 + 2.0 * i as f64 / (n - 1) as f64
}

/// Samples `measure` over the correlation cube at fixed local Bloch lengths.
pub fn sample_field(
    r: f64,
    s: f64,
    measure: Measure,
    n: usize,
    exec: Execution,
) -> Result<ScalarField> {
    let field = ScalarField::from_fn(n, exec, |[c1, c2, c3]| {
        measure.evaluate(&XStateParams::new(r, s, c1, c2, c3))
    })?;
    Ok(ScalarField {
        r,
        s,
        measure: Some(measure),
        ..field
    })
}
