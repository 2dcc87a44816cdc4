//! The Bochner transform family: the sliding-window transform B, its discrete
//! restriction D with exact inverse, the integer-point restriction R, the left
//! inverse L = D⁻¹ ∘ R, and the periodization isometry J.
//!
//! On the grid, a unit window starting at any grid point is a contiguous run
//! of cells, so B is a zero-copy view and the integer/fractional-part
//! decomposition behind D⁻¹ and L is exact index arithmetic. All round-trip
//! identities below hold bitwise on value arrays.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{stepanov_norm, GridFunction, GridSpec, LpSlice, NormKind};

/// The discrete Bochner transform of a function restricted to a finite
/// window: one L^p(0,1) slice per integer n in `[n_lo, n_hi - 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BochnerSequence {
    pub p: f64,
    pub n_lo: i64,
    pub n_hi: i64,
    pub slices: Vec<LpSlice>,
}

impl BochnerSequence {
    pub fn new(p: f64, n_lo: i64, n_hi: i64, slices: Vec<LpSlice>) -> Result<Self> {
        if n_lo >= n_hi {
            return Err(Error::InvalidArgument(format!(
                "sequence window must satisfy n_lo < n_hi, got [{n_lo}, {n_hi}]"
            )));
        }
        if slices.len() != (n_hi - n_lo) as usize {
            return Err(Error::ShapeMismatch(format!(
                "expected {} slices for window [{n_lo}, {n_hi}], got {}",
                n_hi - n_lo,
                slices.len()
            )));
        }
        let first = &slices[0];
        for s in &slices[1..] {
            first.check_same_shape(s)?;
        }
        Ok(BochnerSequence { p, n_lo, n_hi, slices })
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// Slice at integer n.
    pub fn slice_at(&self, n: i64) -> Option<&LpSlice> {
        if n < self.n_lo || n >= self.n_hi {
            return None;
        }
        Some(&self.slices[(n - self.n_lo) as usize])
    }

    /// sup_n of the slice L^p norms over the window.
    pub fn sup_norm(&self) -> Result<f64> {
        let mut sup = 0.0f64;
        for s in &self.slices {
            sup = sup.max(s.lp_norm(self.p)?);
        }
        Ok(sup)
    }

    /// True when every slice is identically zero.
    pub fn is_zero(&self) -> bool {
        self.slices.iter().all(|s| s.values.iter().all(|v| *v == 0.0))
    }
}

/// The Bochner transform u^b: one unit window per grid point t in
/// `[n_lo, n_hi - 1]`. Transforms of grid functions are stored as a lazy view
/// into the source array; general slice-valued curves (needed for the
/// direct-sum decomposition checks) are stored materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct BochnerFunction {
    m: usize,
    dim: usize,
    norm_kind: NormKind,
    n_lo: i64,
    n_hi: i64,
    data: BochnerData,
}

#[derive(Debug, Clone, PartialEq)]
enum BochnerData {
    Window(GridFunction),
    Slices(Vec<LpSlice>),
}

impl BochnerFunction {
    /// Number of grid points carrying a slice: (n_hi - n_lo - 1) * m + 1.
    pub fn num_points(&self) -> usize {
        ((self.n_hi - self.n_lo - 1) as usize) * self.m + 1
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm_kind
    }

    pub fn window(&self) -> (i64, i64) {
        (self.n_lo, self.n_hi)
    }

    /// Grid point of slice index j.
    pub fn t_of_index(&self, j: usize) -> f64 {
        (self.n_lo * self.m as i64 + j as i64) as f64 / self.m as f64
    }

    /// Build from explicit slices, one per grid point of `[n_lo, n_hi - 1]`.
    pub fn from_slices(n_lo: i64, n_hi: i64, slices: Vec<LpSlice>) -> Result<Self> {
        if n_hi - n_lo < 2 {
            return Err(Error::InsufficientWindow {
                n_lo,
                n_hi,
                needed: "need at least 2 units of t-window".into(),
            });
        }
        if slices.is_empty() {
            return Err(Error::InvalidArgument("no slices".into()));
        }
        let m = slices[0].m;
        let expected = ((n_hi - n_lo - 1) as usize) * m + 1;
        if slices.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "expected {expected} slices for window [{n_lo}, {n_hi}] at m = {m}, got {}",
                slices.len()
            )));
        }
        let first = slices[0].clone();
        for s in &slices[1..] {
            first.check_same_shape(s)?;
        }
        Ok(BochnerFunction {
            m,
            dim: first.dim,
            norm_kind: first.norm_kind,
            n_lo,
            n_hi,
            data: BochnerData::Slices(slices),
        })
    }

    /// Materialize the slice at index j.
    pub fn slice(&self, j: usize) -> LpSlice {
        match &self.data {
            BochnerData::Window(u) => u.unit_window(j).expect("index within window"),
            BochnerData::Slices(s) => s[j].clone(),
        }
    }

    /// Borrowed view of the slice values at index j; contiguous for window
    /// views, so scans never copy.
    pub fn slice_values(&self, j: usize) -> &[f64] {
        match &self.data {
            BochnerData::Window(u) => {
                let d = u.dim();
                &u.values()[j * d..(j + self.m) * d]
            }
            BochnerData::Slices(s) => &s[j].values,
        }
    }

    /// Pointwise difference of two curves on the same grid.
    pub fn sub(&self, other: &BochnerFunction) -> Result<BochnerFunction> {
        if self.m != other.m
            || self.dim != other.dim
            || self.norm_kind != other.norm_kind
            || self.n_lo != other.n_lo
            || self.n_hi != other.n_hi
        {
            return Err(Error::ShapeMismatch("Bochner curves differ in shape".into()));
        }
        if let (BochnerData::Window(a), BochnerData::Window(b)) = (&self.data, &other.data) {
            if a.spec() == b.spec() {
                let mut out = self.clone();
                out.data = BochnerData::Window(a.sub(b)?);
                return Ok(out);
            }
        }
        let slices: Vec<LpSlice> = (0..self.num_points())
            .map(|j| {
                let a = self.slice_values(j);
                let b = other.slice_values(j);
                let values: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                LpSlice::new(self.m, self.dim, self.norm_kind, values)
            })
            .collect::<Result<_>>()?;
        BochnerFunction::from_slices(self.n_lo, self.n_hi, slices)
    }
}

/// The Bochner transform of a grid function: the curve of its unit windows.
pub fn bochner(u: &GridFunction) -> Result<BochnerFunction> {
    let spec = u.spec();
    if spec.units() < 2 {
        return Err(Error::InsufficientWindow {
            n_lo: spec.n_lo,
            n_hi: spec.n_hi,
            needed: "need at least 2 units so the transform has a nontrivial domain".into(),
        });
    }
    Ok(BochnerFunction {
        m: spec.m,
        dim: u.dim(),
        norm_kind: u.norm_kind(),
        n_lo: spec.n_lo,
        n_hi: spec.n_hi,
        data: BochnerData::Window(u.clone()),
    })
}

/// The discrete Bochner transform: unit windows at integer points only.
pub fn discrete_bochner(u: &GridFunction, p: f64) -> Result<BochnerSequence> {
    let spec = u.spec();
    let slices: Vec<LpSlice> = (spec.n_lo..spec.n_hi)
        .map(|n| u.unit_window(spec.cell_of_integer(n).unwrap()))
        .collect::<Result<_>>()?;
    BochnerSequence::new(p, spec.n_lo, spec.n_hi, slices)
}

/// Exact inverse of the discrete transform: glue the slices back into one
/// grid function, `u(t) = U(floor(t))(frac(t))`.
pub fn discrete_bochner_inverse(seq: &BochnerSequence) -> Result<GridFunction> {
    let first = &seq.slices[0];
    let spec = GridSpec::new(first.m, seq.n_lo, seq.n_hi)?;
    let mut values = Vec::with_capacity(spec.total_cells() * first.dim);
    for s in &seq.slices {
        values.extend_from_slice(&s.values);
    }
    GridFunction::new(spec, first.dim, first.norm_kind, values)
}

/// Restriction of a slice-valued curve to the integers.
pub fn restriction(v: &BochnerFunction, p: f64) -> Result<BochnerSequence> {
    let (n_lo, n_hi) = v.window();
    let slices: Vec<LpSlice> = (0..(n_hi - n_lo) as usize)
        .map(|k| {
            let values = v.slice_values(k * v.m()).to_vec();
            LpSlice::new(v.m(), v.dim(), v.norm_kind(), values)
        })
        .collect::<Result<_>>()?;
    BochnerSequence::new(p, n_lo, n_hi, slices)
}

/// Left inverse of the Bochner transform: `L(V)(t) = V(floor(t))(frac(t))`,
/// i.e. D⁻¹ applied to the integer restriction. Satisfies L(B(u)) = u exactly.
pub fn left_inverse(v: &BochnerFunction) -> Result<GridFunction> {
    let seq = restriction(v, 1.0)?;
    discrete_bochner_inverse(&seq)
}

/// Periodization J: tile one slice into a 1-periodic grid function on the
/// given window. An isometry for the Stepanov norm.
pub fn periodize(omega: &LpSlice, n_lo: i64, n_hi: i64) -> Result<GridFunction> {
    let spec = GridSpec::new(omega.m, n_lo, n_hi)?;
    let mut values = Vec::with_capacity(spec.total_cells() * omega.dim);
    for _ in 0..spec.units() {
        values.extend_from_slice(&omega.values);
    }
    GridFunction::new(spec, omega.dim, omega.norm_kind, values)
}

/// sup over the curve's grid points of the slice L^p norms; equals the
/// Stepanov grid_sup of the source when the curve is a transform.
pub fn curve_sup_norm(v: &BochnerFunction, p: f64) -> Result<f64> {
    let mut sup = 0.0f64;
    for j in 0..v.num_points() {
        let s = LpSlice::new(v.m(), v.dim(), v.norm_kind(), v.slice_values(j).to_vec())?;
        sup = sup.max(s.lp_norm(p)?);
    }
    Ok(sup)
}

/// Convenience: check the isometry `sup_t ||u^b(t)||_Lp == ||u||_Sp.grid_sup`.
pub fn isometry_gap(u: &GridFunction, p: f64) -> Result<f64> {
    let v = bochner(u)?;
    let lhs = curve_sup_norm(&v, p)?;
    let rhs = stepanov_norm(u, p)?.grid_sup;
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{lp_norm, shift_cells};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_grid(rng: &mut ChaCha8Rng, m: usize, n_lo: i64, n_hi: i64, dim: usize) -> GridFunction {
        let s = GridSpec::new(m, n_lo, n_hi).unwrap();
        let values: Vec<f64> = (0..s.total_cells() * dim)
            .map(|_| rng.random_range(-3.0..3.0))
            .collect();
        GridFunction::new(s, dim, NormKind::L2, values).unwrap()
    }

    fn random_curve(rng: &mut ChaCha8Rng, m: usize, n_lo: i64, n_hi: i64, dim: usize) -> BochnerFunction {
        let count = ((n_hi - n_lo - 1) as usize) * m + 1;
        let slices: Vec<LpSlice> = (0..count)
            .map(|_| {
                let values: Vec<f64> = (0..m * dim).map(|_| rng.random_range(-2.0..2.0)).collect();
                LpSlice::new(m, dim, NormKind::L2, values).unwrap()
            })
            .collect();
        BochnerFunction::from_slices(n_lo, n_hi, slices).unwrap()
    }

    #[test]
    fn transform_of_constant_has_constant_slices() {
        let s = GridSpec::new(5, -1, 2).unwrap();
        let u = GridFunction::constant(s, &[2.0, -1.0], NormKind::L2).unwrap();
        let v = bochner(&u).unwrap();
        for j in 0..v.num_points() {
            let sl = v.slice(j);
            for c in 0..sl.m {
                assert_eq!(sl.value(c), &[2.0, -1.0]);
            }
        }
    }

    #[test]
    fn transform_of_sawtooth_at_integers_is_the_ramp() {
        let s = GridSpec::new(8, -2, 2).unwrap();
        let u = GridFunction::sample_scalar(s, NormKind::L2, |t| t - t.floor()).unwrap();
        let v = bochner(&u).unwrap();
        for n in 0..3usize {
            let sl = v.slice(n * 8);
            for c in 0..8 {
                assert_eq!(sl.value(c)[0], c as f64 / 8.0);
            }
        }
    }

    #[test]
    fn transform_isometry_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let u = random_grid(&mut rng, 10, -2, 3, 2);
            for p in [1.0, 2.0, 3.0] {
                assert_eq!(isometry_gap(&u, p).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn discrete_transform_equals_restricted_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let u = random_grid(&mut rng, 6, -3, 2, 3);
        let d = discrete_bochner(&u, 2.0).unwrap();
        let r = restriction(&bochner(&u).unwrap(), 2.0).unwrap();
        assert_eq!(d, r);
    }

    #[test]
    fn discrete_round_trips_are_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let u = random_grid(&mut rng, 7, -2, 2, 2);
            let back = discrete_bochner_inverse(&discrete_bochner(&u, 2.0).unwrap()).unwrap();
            assert_eq!(u, back);
        }
        // The other direction: D(D^-1(U)) = U.
        for _ in 0..20 {
            let m = 5;
            let slices: Vec<LpSlice> = (0..4)
                .map(|_| {
                    let values: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
                    LpSlice::new(m, 1, NormKind::L2, values).unwrap()
                })
                .collect();
            let seq = BochnerSequence::new(1.0, -1, 3, slices).unwrap();
            let round = discrete_bochner(&discrete_bochner_inverse(&seq).unwrap(), 1.0).unwrap();
            assert_eq!(seq, round);
        }
    }

    #[test]
    fn single_constant_slice_inverts_to_constant_function() {
        let sl = LpSlice::constant(4, &[1.5], NormKind::L1).unwrap();
        let seq = BochnerSequence::new(1.0, 2, 3, vec![sl]).unwrap();
        let u = discrete_bochner_inverse(&seq).unwrap();
        assert_eq!(u.spec(), GridSpec::new(4, 2, 3).unwrap());
        for i in 0..4 {
            assert_eq!(u.value(i)[0], 1.5);
        }
    }

    #[test]
    fn heterogeneous_slices_are_rejected() {
        let a = LpSlice::constant(4, &[1.0], NormKind::L2).unwrap();
        let b = LpSlice::constant(5, &[1.0], NormKind::L2).unwrap();
        assert!(matches!(
            BochnerSequence::new(1.0, 0, 2, vec![a, b]),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn left_inverse_of_transform_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..50 {
            let m = [4usize, 9, 16][rng.random_range(0..3)];
            let dim = rng.random_range(1..=3);
            let u = random_grid(&mut rng, m, -2, 2, dim);
            let back = left_inverse(&bochner(&u).unwrap()).unwrap();
            assert_eq!(u, back);
        }
    }

    #[test]
    fn curves_vanishing_at_integers_map_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let m = 6;
        let mut v = random_curve(&mut rng, m, -1, 2, 2);
        // Zero out the slices at integer grid points.
        if let BochnerData::Slices(slices) = &mut v.data {
            for k in 0..3 {
                for val in slices[k * m].values.iter_mut() {
                    *val = 0.0;
                }
            }
        }
        let u = left_inverse(&v).unwrap();
        assert!(u.values().iter().all(|x| *x == 0.0));
    }

    #[test]
    fn decomposition_remainder_vanishes_at_integers() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for _ in 0..10 {
            let v = random_curve(&mut rng, 5, -2, 2, 2);
            let blv = bochner(&left_inverse(&v).unwrap()).unwrap();
            let w = v.sub(&blv).unwrap();
            let r = restriction(&w, 2.0).unwrap();
            assert!(r.is_zero(), "remainder must vanish at integer grid points");
            // And V agrees with B(L(V)) + W at every grid point.
            for j in 0..v.num_points() {
                let lhs = v.slice_values(j);
                let rhs: Vec<f64> = blv
                    .slice_values(j)
                    .iter()
                    .zip(w.slice_values(j))
                    .map(|(a, b)| a + b)
                    .collect();
                assert_eq!(lhs, rhs.as_slice());
            }
        }
    }

    #[test]
    fn transform_commutes_with_integer_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let u = random_grid(&mut rng, 6, -3, 3, 2);
        let k = 1i64;
        let shifted = shift_cells(&u, k * 6).unwrap();
        let vu = bochner(&u).unwrap();
        let vs = bochner(&shifted).unwrap();
        // B(shift(u, 1)) at t equals B(u) at t + 1 on the overlap.
        for j in 0..vs.num_points() {
            assert_eq!(vs.slice_values(j), vu.slice_values(j + 6));
        }
    }

    #[test]
    fn periodize_constant_and_ramp() {
        let sl = LpSlice::constant(4, &[2.0], NormKind::L2).unwrap();
        let u = periodize(&sl, -1, 2).unwrap();
        assert!(u.values().iter().all(|v| *v == 2.0));

        let ramp = LpSlice::new(4, 1, NormKind::L2, vec![0.0, 0.25, 0.5, 0.75]).unwrap();
        let u = periodize(&ramp, 0, 3).unwrap();
        let saw = GridFunction::sample_scalar(u.spec(), NormKind::L2, |t| t - t.floor()).unwrap();
        assert_eq!(u, saw);
    }

    #[test]
    fn periodize_is_an_isometry_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        for _ in 0..20 {
            let m = rng.random_range(3..20);
            let values: Vec<f64> = (0..m * 2).map(|_| rng.random_range(-4.0..4.0)).collect();
            let omega = LpSlice::new(m, 2, NormKind::L2, values).unwrap();
            for p in [1.0, 2.0, 3.0] {
                let u = periodize(&omega, -2, 3).unwrap();
                let b = stepanov_norm(&u, p).unwrap();
                let n = lp_norm(&omega, p).unwrap();
                assert_eq!(b.grid_sup.to_bits(), n.to_bits());
            }
        }
    }

    #[test]
    fn sequence_json_round_trip_is_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let u = random_grid(&mut rng, 5, 0, 3, 2);
        let seq = discrete_bochner(&u, 2.0).unwrap();
        let text = serde_json::to_string(&seq).unwrap();
        let back: BochnerSequence = serde_json::from_str(&text).unwrap();
        assert_eq!(seq, back);
        assert_eq!(discrete_bochner_inverse(&back).unwrap(), u);
    }
}
