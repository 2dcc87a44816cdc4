//! Uniform aligned grids and piecewise-constant representatives of locally
//! p-integrable ℝ^d-valued functions, with unit-interval L^p norms and the
//! sliding Stepanov norm.
//!
//! A [`GridFunction`] on `[n_lo, n_hi]` with `m` samples per unit interval is
//! constant on half-open cells `[n_lo + i/m, n_lo + (i+1)/m)`. Every integral
//! that appears in this crate is therefore a finite sum of per-cell
//! contributions `h * |u_i|^p`, which we sum exactly (see [`crate::numeric`]);
//! window identities then hold at machine precision rather than approximately.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{exact_sum, pow_p, root_p, NonnegAccumulator};

/// Vector norm on the value space ℝ^d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    L1,
    L2,
    Linf,
}

impl NormKind {
    pub fn norm(&self, x: &[f64]) -> f64 {
        match self {
            NormKind::L1 => x.iter().map(|v| v.abs()).sum(),
            NormKind::L2 => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            NormKind::Linf => x.iter().fold(0.0f64, |a, v| a.max(v.abs())),
        }
    }
}

/// Aligned uniform grid on a window `[n_lo, n_hi]` with `m` cells per unit.
///
/// Integer points always lie on the grid, so integer/fractional-part
/// decompositions are exact index arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub m: usize,
    pub n_lo: i64,
    pub n_hi: i64,
}

impl GridSpec {
    pub fn new(m: usize, n_lo: i64, n_hi: i64) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidArgument("m must be >= 1".into()));
        }
        if n_lo >= n_hi {
            return Err(Error::InvalidArgument(format!(
                "window endpoints must satisfy n_lo < n_hi, got [{n_lo}, {n_hi}]"
            )));
        }
        Ok(GridSpec { m, n_lo, n_hi })
    }

    /// Cell width 1/m.
    pub fn h(&self) -> f64 {
        1.0 / self.m as f64
    }

    /// Window length in whole units.
    pub fn units(&self) -> usize {
        (self.n_hi - self.n_lo) as usize
    }

    pub fn total_cells(&self) -> usize {
        self.units() * self.m
    }

    /// Left endpoint of cell `i`, computed as one exact integer ratio.
    pub fn t_of_cell(&self, i: usize) -> f64 {
        (self.n_lo * self.m as i64 + i as i64) as f64 / self.m as f64
    }

    /// Cell index of the integer grid point `n` (must lie in the window).
    pub fn cell_of_integer(&self, n: i64) -> Option<usize> {
        if n < self.n_lo || n > self.n_hi {
            return None;
        }
        Some(((n - self.n_lo) as usize) * self.m)
    }
}

/// One unit interval of `m` samples: an element of L^p(0,1; ℝ^d) in
/// piecewise-constant representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSlice {
    pub m: usize,
    pub dim: usize,
    pub norm_kind: NormKind,
    pub values: Vec<f64>,
}

impl LpSlice {
    pub fn new(m: usize, dim: usize, norm_kind: NormKind, values: Vec<f64>) -> Result<Self> {
        if m < 1 || dim < 1 {
            return Err(Error::InvalidArgument("m and dim must be >= 1".into()));
        }
        if values.len() != m * dim {
            return Err(Error::ShapeMismatch(format!(
                "slice expects {} values ({} cells x dim {}), got {}",
                m * dim,
                m,
                dim,
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("slice values must be finite".into()));
        }
        Ok(LpSlice { m, dim, norm_kind, values })
    }

    pub fn constant(m: usize, value: &[f64], norm_kind: NormKind) -> Result<Self> {
        let dim = value.len();
        let mut values = Vec::with_capacity(m * dim);
        for _ in 0..m {
            values.extend_from_slice(value);
        }
        LpSlice::new(m, dim, norm_kind, values)
    }

    pub fn value(&self, cell: usize) -> &[f64] {
        &self.values[cell * self.dim..(cell + 1) * self.dim]
    }

    /// The L^p(0,1) norm of the piecewise-constant representative, exact as a
    /// finite sum.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let h = 1.0 / self.m as f64;
        let s = exact_sum((0..self.m).map(|c| h * pow_p(self.norm_kind.norm(self.value(c)), p)));
        Ok(root_p(s, p))
    }

    /// L^p distance to another slice of identical shape.
    pub fn lp_distance(&self, other: &LpSlice, p: f64) -> Result<f64> {
        check_exponent(p)?;
        self.check_same_shape(other)?;
        let h = 1.0 / self.m as f64;
        let d = self.dim;
        let s = exact_sum((0..self.m).map(|c| {
            let a = self.value(c);
            let b = other.value(c);
            let diff: Vec<f64> = (0..d).map(|k| a[k] - b[k]).collect();
            h * pow_p(self.norm_kind.norm(&diff), p)
        }));
        Ok(root_p(s, p))
    }

    pub fn check_same_shape(&self, other: &LpSlice) -> Result<()> {
        if self.m != other.m || self.dim != other.dim || self.norm_kind != other.norm_kind {
            return Err(Error::ShapeMismatch(format!(
                "slices differ: ({}, {}, {:?}) vs ({}, {}, {:?})",
                self.m, self.dim, self.norm_kind, other.m, other.dim, other.norm_kind
            )));
        }
        Ok(())
    }
}

/// Certified bracket for a sliding-window supremum norm. `grid_sup` is the
/// exact maximum over all grid shifts; `lower` restricts the maximum to
/// integer shifts and `upper = 2^(1/p) * lower`, so
/// `lower <= grid_sup <= upper` brackets the true supremum over ℝ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBracket {
    pub lower: f64,
    pub grid_sup: f64,
    pub upper: f64,
}

/// Piecewise-constant representative of u ∈ L^p_loc(ℝ, ℝ^d) on an aligned
/// uniform grid. Immutable after construction; all operations are pure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFunctionRepr", into = "GridFunctionRepr")]
pub struct GridFunction {
    spec: GridSpec,
    dim: usize,
    norm_kind: NormKind,
    values: Vec<f64>,
}

/// Wire format: flat JSON object with row-major values.
#[derive(Serialize, Deserialize)]
struct GridFunctionRepr {
    m: usize,
    n_lo: i64,
    n_hi: i64,
    dim: usize,
    norm_kind: NormKind,
    values: Vec<f64>,
}

impl TryFrom<GridFunctionRepr> for GridFunction {
    type Error = Error;
    fn try_from(r: GridFunctionRepr) -> Result<Self> {
        GridFunction::new(GridSpec::new(r.m, r.n_lo, r.n_hi)?, r.dim, r.norm_kind, r.values)
    }
}

impl From<GridFunction> for GridFunctionRepr {
    fn from(g: GridFunction) -> Self {
        GridFunctionRepr {
            m: g.spec.m,
            n_lo: g.spec.n_lo,
            n_hi: g.spec.n_hi,
            dim: g.dim,
            norm_kind: g.norm_kind,
            values: g.values,
        }
    }
}

impl GridFunction {
    pub fn new(spec: GridSpec, dim: usize, norm_kind: NormKind, values: Vec<f64>) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidArgument("dim must be >= 1".into()));
        }
        if values.len() != spec.total_cells() * dim {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values ({} cells x dim {}), got {}",
                spec.total_cells() * dim,
                spec.total_cells(),
                dim,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite value at flat index {bad}"
            )));
        }
        Ok(GridFunction { spec, dim, norm_kind, values })
    }

    /// Sample a vector-valued function at cell left endpoints.
    pub fn sample<F>(spec: GridSpec, dim: usize, norm_kind: NormKind, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Vec<f64>,
    {
        let cells = spec.total_cells();
        let mut values = Vec::with_capacity(cells * dim);
        for i in 0..cells {
            let t = spec.t_of_cell(i);
            let v = f(t);
            if v.len() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "sampler returned {} components, expected {dim}",
                    v.len()
                )));
            }
            if let Some(k) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::Evaluation {
                    t,
                    cell: i,
                    detail: format!("component {k} is not finite"),
                });
            }
            values.extend_from_slice(&v);
        }
        GridFunction::new(spec, dim, norm_kind, values)
    }

    /// Sample a scalar function into a dim-1 grid function.
    pub fn sample_scalar<F>(spec: GridSpec, norm_kind: NormKind, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64,
    {
        GridFunction::sample(spec, 1, norm_kind, |t| vec![f(t)])
    }

    pub fn constant(spec: GridSpec, value: &[f64], norm_kind: NormKind) -> Result<Self> {
        let dim = value.len();
        let mut values = Vec::with_capacity(spec.total_cells() * dim);
        for _ in 0..spec.total_cells() {
            values.extend_from_slice(value);
        }
        GridFunction::new(spec, dim, norm_kind, values)
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm_kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, cell: usize) -> &[f64] {
        &self.values[cell * self.dim..(cell + 1) * self.dim]
    }

    /// Norm of the value in `cell`.
    pub fn cell_norm(&self, cell: usize) -> f64 {
        self.norm_kind.norm(self.value(cell))
    }

    /// Value at a real point `t` in `[n_lo, n_hi)` (left-closed cells).
    pub fn value_at(&self, t: f64) -> Option<&[f64]> {
        let rel = (t - self.spec.n_lo as f64) * self.spec.m as f64;
        let i = rel.floor() as i64;
        if t < self.spec.n_lo as f64 || i < 0 || i as usize >= self.spec.total_cells() {
            return None;
        }
        Some(self.value(i as usize))
    }

    /// Copy the unit window of `m` cells starting at `start_cell` into a slice.
    pub fn unit_window(&self, start_cell: usize) -> Result<LpSlice> {
        let m = self.spec.m;
        let end = start_cell + m;
        if end > self.spec.total_cells() {
            return Err(Error::InvalidArgument(format!(
                "unit window starting at cell {start_cell} leaves the domain"
            )));
        }
        LpSlice::new(
            m,
            self.dim,
            self.norm_kind,
            self.values[start_cell * self.dim..end * self.dim].to_vec(),
        )
    }

    pub fn check_same_shape(&self, other: &GridFunction) -> Result<()> {
        if self.spec != other.spec || self.dim != other.dim || self.norm_kind != other.norm_kind {
            return Err(Error::ShapeMismatch(format!(
                "grid functions differ: ({:?}, {}, {:?}) vs ({:?}, {}, {:?})",
                self.spec, self.dim, self.norm_kind, other.spec, other.dim, other.norm_kind
            )));
        }
        Ok(())
    }

    /// Pointwise difference, requiring identical spec/dim/norm.
    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_same_shape(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        GridFunction::new(self.spec, self.dim, self.norm_kind, values)
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_same_shape(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        GridFunction::new(self.spec, self.dim, self.norm_kind, values)
    }

    pub fn scale(&self, lambda: f64) -> Result<GridFunction> {
        let values = self.values.iter().map(|v| lambda * v).collect();
        GridFunction::new(self.spec, self.dim, self.norm_kind, values)
    }

    /// Per-cell contributions `h * |u_i|^p`, the common currency of every
    /// windowed integral below.
    pub(crate) fn cell_powers(&self, p: f64) -> Vec<f64> {
        let h = self.spec.h();
        (0..self.spec.total_cells())
            .map(|c| h * pow_p(self.cell_norm(c), p))
            .collect()
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent { p });
    }
    Ok(())
}

/// The L^p(0,1) norm of one slice.
pub fn lp_norm(slice: &LpSlice, p: f64) -> Result<f64> {
    slice.lp_norm(p)
}

/// Sliding Stepanov norm with its integer-shift bracket.
///
/// `grid_sup` maximizes the unit-window L^p integral over every grid shift in
/// the window; `lower` restricts to integer shifts. Both maxima are taken over
/// the same per-window array, so `lower <= grid_sup` holds bitwise, and the
/// two-window covering argument gives `grid_sup <= 2^(1/p) * lower` with exact
/// window sums.
pub fn stepanov_norm(u: &GridFunction, p: f64) -> Result<NormBracket> {
    check_exponent(p)?;
    let spec = u.spec();
    if spec.units() < 2 {
        return Err(Error::InsufficientWindow {
            n_lo: spec.n_lo,
            n_hi: spec.n_hi,
            needed: "need at least 2 units so a shifted unit window exists".into(),
        });
    }
    let contrib = u.cell_powers(p);
    let m = spec.m;
    let starts = (spec.units() - 1) * m;
    let mut acc = NonnegAccumulator::new();
    let mut grid_sup = 0.0f64;
    let mut lower = 0.0f64;
    for j in 0..=starts {
        acc.reset();
        for c in &contrib[j..j + m] {
            acc.add(*c);
        }
        let norm = root_p(acc.value(), p);
        if norm > grid_sup {
            grid_sup = norm;
        }
        if j % m == 0 && norm > lower {
            lower = norm;
        }
    }
    let upper = 2.0f64.powf(1.0 / p) * lower;
    Ok(NormBracket { lower, grid_sup, upper })
}

/// Translate by a grid-aligned shift: returns `t -> u(t + tau)` on the maximal
/// integer-bounded subwindow.
pub fn shift(u: &GridFunction, tau: f64) -> Result<GridFunction> {
    let m = u.spec().m;
    let k_real = tau * m as f64;
    let k = k_real.round();
    if (k_real - k).abs() > 1e-9 * k_real.abs().max(1.0) {
        return Err(Error::Misaligned { tau, m });
    }
    shift_cells(u, k as i64)
}

/// Translate by an exact number of cells.
pub fn shift_cells(u: &GridFunction, k: i64) -> Result<GridFunction> {
    let spec = u.spec();
    let m = spec.m as i64;
    let (n_lo, n_hi, src_offset) = if k >= 0 {
        let eaten = (k + m - 1) / m; // ceil(k/m)
        (spec.n_lo, spec.n_hi - eaten, k)
    } else {
        let eaten = (-k + m - 1) / m;
        (spec.n_lo + eaten, spec.n_hi, eaten * m + k)
    };
    if n_lo >= n_hi {
        return Err(Error::InsufficientWindow {
            n_lo: spec.n_lo,
            n_hi: spec.n_hi,
            needed: format!("shift by {k} cells leaves no whole unit interval"),
        });
    }
    let new_spec = GridSpec::new(spec.m, n_lo, n_hi)?;
    let dim = u.dim();
    let cells = new_spec.total_cells();
    let mut values = Vec::with_capacity(cells * dim);
    for i in 0..cells {
        let src = (i as i64 + src_offset) as usize;
        values.extend_from_slice(u.value(src));
    }
    GridFunction::new(new_spec, dim, u.norm_kind(), values)
}

/// Stepanov norm of the pointwise difference.
pub fn difference_norm(u: &GridFunction, v: &GridFunction, p: f64) -> Result<NormBracket> {
    stepanov_norm(&u.sub(v)?, p)
}

/// Read a grid function from CSV columns `t, x_1, ..., x_d`.
///
/// The `t` column must be grid-aligned, strictly increasing, start at an
/// integer and cover a whole number of unit intervals.
pub fn read_csv<R: std::io::Read>(reader: R, norm_kind: NormKind) -> Result<GridFunction> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut ts: Vec<f64> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        if record.len() < 2 {
            return Err(Error::Csv("need at least columns t,x_1".into()));
        }
        let mut fields = record.iter();
        let t: f64 = fields
            .next()
            .unwrap()
            .parse()
            .map_err(|e| Error::Csv(format!("bad t value: {e}")))?;
        let xs: Vec<f64> = fields
            .map(|f| f.parse().map_err(|e| Error::Csv(format!("bad value: {e}"))))
            .collect::<Result<_>>()?;
        ts.push(t);
        rows.push(xs);
    }
    if rows.len() < 2 {
        return Err(Error::Csv("need at least two rows".into()));
    }
    let dim = rows[0].len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Csv("inconsistent column count".into()));
    }
    let n_lo = ts[0].round();
    if (ts[0] - n_lo).abs() > 1e-9 {
        return Err(Error::Csv(format!("first t = {} is not an integer", ts[0])));
    }
    let h = ts[1] - ts[0];
    let m = (1.0 / h).round();
    if m < 1.0 || !m.is_finite() || (h * m - 1.0).abs() > 1e-9 {
        return Err(Error::Csv(format!("row spacing {h} is not 1/m for integer m")));
    }
    let m = m as usize;
    for (i, &t) in ts.iter().enumerate() {
        let expect = (n_lo as i64 * m as i64 + i as i64) as f64 / m as f64;
        if (t - expect).abs() > 1e-9 {
            return Err(Error::Csv(format!(
                "t = {t} at row {i} is not grid-aligned (expected {expect})"
            )));
        }
    }
    if rows.len() % m != 0 {
        return Err(Error::Csv(format!(
            "{} rows do not cover a whole number of unit intervals at m = {m}",
            rows.len()
        )));
    }
    let n_hi = n_lo as i64 + (rows.len() / m) as i64;
    let spec = GridSpec::new(m, n_lo as i64, n_hi)?;
    let values: Vec<f64> = rows.into_iter().flatten().collect();
    GridFunction::new(spec, dim, norm_kind, values)
}

/// Write a grid function as CSV columns `t, x_1, ..., x_d`.
pub fn write_csv<W: std::io::Write>(u: &GridFunction, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["t".to_string()];
    for k in 1..=u.dim() {
        header.push(format!("x_{k}"));
    }
    wtr.write_record(&header).map_err(|e| Error::Csv(e.to_string()))?;
    for i in 0..u.spec().total_cells() {
        let mut row = vec![format!("{:?}", u.spec().t_of_cell(i))];
        for v in u.value(i) {
            row.push(format!("{v:?}"));
        }
        wtr.write_record(&row).map_err(|e| Error::Csv(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}
