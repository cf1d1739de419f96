//! Index-aware dense tensors and pointwise metric machinery.
//!
//! Everything indexed in this crate is a [`Tensor`]: a dense `f64` array of
//! shape `dim^rank` with a per-slot variance marker ([`Slot::Up`] or
//! [`Slot::Down`]). Variance is checked at runtime on every contraction and
//! raise/lower, since mixed-variance mistakes are the dominant bug class in
//! this kind of code.
//!
//! Coordinate partial derivatives of tensor fields (the `d*` arrays inside
//! [`MetricJet`] and [`VectorJet`], and the `partials` argument of
//! [`covariant_derivative`]) are stored in the same container with the leading
//! slot(s) marked `Down`; they are chart arrays, not tensors, until the
//! connection terms are added.

use thiserror::Error;

/// Variance marker for one tensor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Up,
    Down,
}

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("slot {slot} out of range for rank {rank}")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("slot {slot} has variance {found:?}, expected {expected:?}")]
    VarianceMismatch { slot: usize, found: Slot, expected: Slot },
    #[error("cannot contract slot {0} with itself")]
    SameSlot(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("metric is numerically singular")]
    SingularMetric,
    #[error("metric inverse check failed: |g_inv·g - id| = {0:.3e} exceeds 1e-13")]
    InverseCheck(f64),
    #[error("{0} fails its symmetry invariant (max asymmetry {1:.3e})")]
    Asymmetric(&'static str, f64),
    #[error("non-finite component in {0}")]
    NonFinite(&'static str),
    #[error("point dimension must be at least 2, got {0}")]
    PointTooSmall(usize),
}

/// A chart point: ordered coordinate values.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self, TensorError> {
        if coords.len() < 2 {
            return Err(TensorError::PointTooSmall(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(TensorError::NonFinite("point coordinates"));
        }
        Ok(Point { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn get(&self, i: usize) -> f64 {
        self.coords[i]
    }

    /// Copy of this point with coordinate `i` shifted by `delta`.
    pub fn shifted(&self, i: usize, delta: f64) -> Point {
        let mut c = self.coords.clone();
        c[i] += delta;
        Point { coords: c }
    }
}

/// Dense multi-index value with per-slot variance.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dim: usize,
    variance: Vec<Slot>,
    data: Vec<f64>,
}

/// Visit every multi-index of the given rank in row-major order.
pub fn each_index(dim: usize, rank: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; rank];
    loop {
        f(&idx);
        // odometer increment
        let mut k = rank;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < dim {
                break;
            }
            idx[k] = 0;
        }
    }
}

impl Tensor {
    pub fn zeros(dim: usize, variance: &[Slot]) -> Self {
        assert!(dim >= 1, "tensor dimension must be positive");
        let len = dim.pow(variance.len() as u32);
        Tensor { dim, variance: variance.to_vec(), data: vec![0.0; len] }
    }

    pub fn from_fn(dim: usize, variance: &[Slot], mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Tensor::zeros(dim, variance);
        let mut flat = 0usize;
        each_index(dim, variance.len(), |idx| {
            t.data[flat] = f(idx);
            flat += 1;
        });
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Slot] {
        &self.variance
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        let mut o = 0usize;
        for &i in idx {
            debug_assert!(i < self.dim);
            o = o * self.dim + i;
        }
        o
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    #[inline]
    pub fn add_assign_at(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] += v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn scale(&self, c: f64) -> Tensor {
        Tensor {
            dim: self.dim,
            variance: self.variance.clone(),
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    fn same_shape(&self, other: &Tensor) -> bool {
        self.dim == other.dim && self.variance == other.variance
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        assert!(self.same_shape(other), "tensor addition requires identical shape and variance");
        Tensor {
            dim: self.dim,
            variance: self.variance.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        assert!(self.same_shape(other), "tensor subtraction requires identical shape and variance");
        Tensor {
            dim: self.dim,
            variance: self.variance.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Contract two slots of opposite variance; rank drops by two.
    pub fn contract(&self, slot_a: usize, slot_b: usize) -> Result<Tensor, TensorError> {
        let rank = self.rank();
        if slot_a >= rank {
            return Err(TensorError::SlotOutOfRange { slot: slot_a, rank });
        }
        if slot_b >= rank {
            return Err(TensorError::SlotOutOfRange { slot: slot_b, rank });
        }
        if slot_a == slot_b {
            return Err(TensorError::SameSlot(slot_a));
        }
        if self.variance[slot_a] == self.variance[slot_b] {
            return Err(TensorError::VarianceMismatch {
                slot: slot_b,
                found: self.variance[slot_b],
                expected: match self.variance[slot_a] {
                    Slot::Up => Slot::Down,
                    Slot::Down => Slot::Up,
                },
            });
        }
        let keep: Vec<usize> = (0..rank).filter(|&s| s != slot_a && s != slot_b).collect();
        let var: Vec<Slot> = keep.iter().map(|&s| self.variance[s]).collect();
        let mut full = vec![0usize; rank];
        let out = Tensor::from_fn(self.dim, &var, |idx| {
            for (j, &s) in keep.iter().enumerate() {
                full[s] = idx[j];
            }
            let mut sum = 0.0;
            for s in 0..self.dim {
                full[slot_a] = s;
                full[slot_b] = s;
                sum += self.get(&full);
            }
            sum
        });
        Ok(out)
    }

    /// Raise a `Down` slot by contracting it with the inverse metric.
    pub fn raise_index(&self, slot: usize, jet: &MetricJet) -> Result<Tensor, TensorError> {
        self.flip_index(slot, Slot::Down, jet.g_inv())
    }

    /// Lower an `Up` slot by contracting it with the metric.
    pub fn lower_index(&self, slot: usize, jet: &MetricJet) -> Result<Tensor, TensorError> {
        self.flip_index(slot, Slot::Up, jet.g())
    }

    fn flip_index(&self, slot: usize, expect: Slot, metric: &Tensor) -> Result<Tensor, TensorError> {
        let rank = self.rank();
        if slot >= rank {
            return Err(TensorError::SlotOutOfRange { slot, rank });
        }
        if self.variance[slot] != expect {
            return Err(TensorError::VarianceMismatch {
                slot,
                found: self.variance[slot],
                expected: expect,
            });
        }
        if metric.dim() != self.dim {
            return Err(TensorError::DimensionMismatch { expected: self.dim, got: metric.dim() });
        }
        let mut var = self.variance.clone();
        var[slot] = match expect {
            Slot::Down => Slot::Up,
            Slot::Up => Slot::Down,
        };
        let mut inner = vec![0usize; rank];
        let out = Tensor::from_fn(self.dim, &var, |idx| {
            inner.copy_from_slice(idx);
            let mut sum = 0.0;
            for a in 0..self.dim {
                inner[slot] = a;
                sum += metric.get(&[idx[slot], a]) * self.get(&inner);
            }
            sum
        });
        Ok(out)
    }
}

/// Relative residual between two same-shape tensors:
/// `max-abs(a-b) / max(1, max-abs(a), max-abs(b))`.
///
/// The floor of 1 keeps identities among near-zero tensors (e.g. the Weyl
/// tensor of de Sitter) from blowing up the quotient.
pub fn rel_residual(a: &Tensor, b: &Tensor) -> Result<f64, TensorError> {
    if a.dim != b.dim || a.variance != b.variance {
        return Err(TensorError::ShapeMismatch(format!(
            "rel_residual: {}^{} vs {}^{}",
            a.dim,
            a.rank(),
            b.dim,
            b.rank()
        )));
    }
    let diff = a
        .data
        .iter()
        .zip(&b.data)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    Ok(diff / 1.0f64.max(a.max_abs()).max(b.max_abs()))
}

/// Scalar counterpart of [`rel_residual`].
pub fn rel_residual_scalar(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1.0f64.max(a.abs()).max(b.abs())
}

/// Covariant derivative of a tensor field at a point.
///
/// `partials` must hold the coordinate derivatives `∂_a T_{j…}` with the
/// derivative index in slot 0; `gamma` is `Γ^s_{jk}` (Up, Down, Down). The
/// result is `∇_a T` with the same slot layout as `partials`:
/// connection terms subtract for every Down slot and add for every Up slot.
pub fn covariant_derivative(
    value: &Tensor,
    partials: &Tensor,
    gamma: &Tensor,
) -> Result<Tensor, TensorError> {
    let n = value.dim();
    if partials.dim() != n || gamma.dim() != n {
        return Err(TensorError::DimensionMismatch { expected: n, got: partials.dim().min(gamma.dim()) });
    }
    if partials.rank() != value.rank() + 1 {
        return Err(TensorError::ShapeMismatch(format!(
            "partials rank {} does not extend value rank {}",
            partials.rank(),
            value.rank()
        )));
    }
    if gamma.rank() != 3 {
        return Err(TensorError::ShapeMismatch("gamma must have rank 3".into()));
    }
    let mut var = vec![Slot::Down];
    var.extend_from_slice(value.variance());
    let rank = value.rank();
    let mut inner = vec![0usize; rank];
    let out = Tensor::from_fn(n, &var, |idx| {
        let a = idx[0];
        let mut v = partials.get(idx);
        for slot in 0..rank {
            inner.copy_from_slice(&idx[1..]);
            let j = idx[1 + slot];
            for s in 0..n {
                inner[slot] = s;
                match value.variance()[slot] {
                    Slot::Down => v -= gamma.get(&[s, a, j]) * value.get(&inner),
                    Slot::Up => v += gamma.get(&[j, a, s]) * value.get(&inner),
                }
            }
        }
        v
    });
    Ok(out)
}

/// Metric components and coordinate partials through order 3 at one point.
///
/// Index layout: `dg[a][j][k] = ∂_a g_{jk}`, `ddg[a][b][j][k] = ∂_a∂_b g_{jk}`,
/// `dddg[a][b][c][j][k]`. The inverse metric is computed (and checked) at
/// construction; order 3 is what the Weyl divergence needs.
#[derive(Debug, Clone)]
pub struct MetricJet {
    g: Tensor,
    dg: Tensor,
    ddg: Tensor,
    dddg: Tensor,
    g_inv: Tensor,
}

impl MetricJet {
    pub fn new(g: Tensor, dg: Tensor, ddg: Tensor, dddg: Tensor) -> Result<Self, TensorError> {
        let n = g.dim();
        if n < 2 {
            return Err(TensorError::PointTooSmall(n));
        }
        for (t, name, rank) in [(&g, "g", 2), (&dg, "dg", 3), (&ddg, "ddg", 4), (&dddg, "dddg", 5)]
        {
            if t.dim() != n {
                return Err(TensorError::DimensionMismatch { expected: n, got: t.dim() });
            }
            if t.rank() != rank {
                return Err(TensorError::ShapeMismatch(format!(
                    "{name} must have rank {rank}, got {}",
                    t.rank()
                )));
            }
            if !t.is_finite() {
                return Err(TensorError::NonFinite(name));
            }
        }
        check_sym(&g, &[], "g")?;
        check_sym(&dg, &[0], "dg")?;
        check_sym(&ddg, &[0, 1], "ddg")?;
        check_sym(&dddg, &[0, 1, 2], "dddg")?;

        let g_inv = invert_metric(&g)?;
        // verify g_inv · g = id to 1e-13
        let mut worst = 0.0f64;
        for i in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for a in 0..n {
                    s += g_inv.get(&[i, a]) * g.get(&[a, k]);
                }
                let want = if i == k { 1.0 } else { 0.0 };
                worst = worst.max((s - want).abs());
            }
        }
        if worst > 1e-13 {
            return Err(TensorError::InverseCheck(worst));
        }
        Ok(MetricJet { g, dg, ddg, dddg, g_inv })
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn g(&self) -> &Tensor {
        &self.g
    }

    pub fn dg(&self) -> &Tensor {
        &self.dg
    }

    pub fn ddg(&self) -> &Tensor {
        &self.ddg
    }

    pub fn dddg(&self) -> &Tensor {
        &self.dddg
    }

    pub fn g_inv(&self) -> &Tensor {
        &self.g_inv
    }

    /// `∂_a g^{jk} = -g^{jm} g^{kl} ∂_a g_{ml}`, layout `[a][j][k]`.
    pub fn dg_inv(&self) -> Tensor {
        let n = self.dim();
        Tensor::from_fn(n, &[Slot::Down, Slot::Up, Slot::Up], |idx| {
            let (a, j, k) = (idx[0], idx[1], idx[2]);
            let mut s = 0.0;
            for m in 0..n {
                for l in 0..n {
                    s -= self.g_inv.get(&[j, m]) * self.g_inv.get(&[k, l]) * self.dg.get(&[a, m, l]);
                }
            }
            s
        })
    }

    /// Signature as (negative, positive) eigenvalue counts of `g`.
    pub fn signature(&self) -> (usize, usize) {
        let eig = symmetric_eigenvalues(&self.g);
        let neg = eig.iter().filter(|&&v| v < 0.0).count();
        (neg, eig.len() - neg)
    }

    /// True when the signature is Lorentzian `(-,+,…,+)`.
    pub fn is_lorentzian(&self) -> bool {
        self.signature().0 == 1
    }

    /// True when `g` is positive definite (Riemannian).
    pub fn is_riemannian(&self) -> bool {
        self.signature().0 == 0
    }
}

/// Symmetry validation: tensors must be symmetric within `deriv_slots` (the
/// leading derivative indices) and within the trailing metric pair.
fn check_sym(t: &Tensor, deriv_slots: &[usize], name: &'static str) -> Result<(), TensorError> {
    let rank = t.rank();
    let scale = 1.0f64.max(t.max_abs());
    let mut worst = 0.0f64;
    let mut swapped = vec![0usize; rank];
    each_index(t.dim(), rank, |idx| {
        // metric pair (last two slots)
        swapped.copy_from_slice(idx);
        swapped.swap(rank - 2, rank - 1);
        worst = worst.max((t.get(idx) - t.get(&swapped)).abs());
        // adjacent derivative-slot swaps generate the full symmetric group
        for w in deriv_slots.windows(2) {
            swapped.copy_from_slice(idx);
            swapped.swap(w[0], w[1]);
            worst = worst.max((t.get(idx) - t.get(&swapped)).abs());
        }
    });
    if worst > 1e-12 * scale {
        return Err(TensorError::Asymmetric(name, worst));
    }
    Ok(())
}

/// Gauss-Jordan inverse with partial pivoting (n ≤ 6 in practice).
fn invert_metric(g: &Tensor) -> Result<Tensor, TensorError> {
    let n = g.dim();
    let mut a = vec![vec![0.0f64; 2 * n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = g.get(&[i, j]);
        }
        a[i][n + i] = 1.0;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[p][col].abs().partial_cmp(&a[q][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < 1e-14 {
            return Err(TensorError::SingularMetric);
        }
        a.swap(col, pivot);
        let d = a[col][col];
        for v in a[col].iter_mut() {
            *v /= d;
        }
        for row in 0..n {
            if row != col {
                let factor = a[row][col];
                if factor != 0.0 {
                    for j in 0..2 * n {
                        a[row][j] -= factor * a[col][j];
                    }
                }
            }
        }
    }
    Ok(Tensor::from_fn(n, &[Slot::Up, Slot::Up], |idx| a[idx[0]][n + idx[1]]))
}

/// Eigenvalues of a symmetric matrix via cyclic Jacobi rotations.
fn symmetric_eigenvalues(g: &Tensor) -> Vec<f64> {
    let n = g.dim();
    let mut a = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = g.get(&[i, j]);
        }
    }
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[p][q].abs());
            }
        }
        if off < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// A covector field value and its coordinate partials at one point.
///
/// Layout: `dx[a][k] = ∂_a X_k`, `ddx[a][b][k] = ∂_a∂_b X_k`.
#[derive(Debug, Clone)]
pub struct VectorJet {
    x: Tensor,
    dx: Tensor,
    ddx: Tensor,
}

impl VectorJet {
    pub fn new(x: Tensor, dx: Tensor, ddx: Tensor) -> Result<Self, TensorError> {
        let n = x.dim();
        for (t, name, rank) in [(&x, "x", 1), (&dx, "dx", 2), (&ddx, "ddx", 3)] {
            if t.dim() != n {
                return Err(TensorError::DimensionMismatch { expected: n, got: t.dim() });
            }
            if t.rank() != rank {
                return Err(TensorError::ShapeMismatch(format!(
                    "{name} must have rank {rank}, got {}",
                    t.rank()
                )));
            }
            if !t.is_finite() {
                return Err(TensorError::NonFinite(name));
            }
        }
        // ddx symmetric in the derivative pair
        let mut worst = 0.0f64;
        each_index(n, 3, |idx| {
            worst = worst.max((ddx.get(idx) - ddx.get(&[idx[1], idx[0], idx[2]])).abs());
        });
        if worst > 1e-12 * 1.0f64.max(ddx.max_abs()) {
            return Err(TensorError::Asymmetric("ddx", worst));
        }
        Ok(VectorJet { x, dx, ddx })
    }

    pub fn x(&self) -> &Tensor {
        &self.x
    }

    pub fn dx(&self) -> &Tensor {
        &self.dx
    }

    pub fn ddx(&self) -> &Tensor {
        &self.ddx
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// Same covector scaled by a constant λ.
    pub fn scaled(&self, lambda: f64) -> VectorJet {
        VectorJet {
            x: self.x.scale(lambda),
            dx: self.dx.scale(lambda),
            ddx: self.ddx.scale(lambda),
        }
    }
}
