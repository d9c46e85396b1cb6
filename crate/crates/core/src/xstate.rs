//! Function spaces on `I_[n]`, the X-shaped matrix model `X(s, u)`, X-part
//! extraction and the closed-form positivity/PPT predicates.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, XsepError};
use crate::index::{check_qubits, dim, signed_sum, Index};

/// Default tolerance for trace and Hermiticity checks.
pub const STATE_TOL: f64 = 1e-10;

/// Largest qubit count for which dense `2^n x 2^n` matrices are built.
pub const MAX_DENSE_QUBITS: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Real function on `I_[n]` (an element of `V_n^R`, or of `V_n^+` when built
/// through [`DiagVec::nonnegative`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagVec {
    n: usize,
    values: Vec<f64>,
}

impl DiagVec {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_qubits(n)?;
        if values.len() != dim(n) {
            return Err(XsepError::Length {
                expected: dim(n),
                got: values.len(),
            });
        }
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(XsepError::Invalid(format!(
                "non-finite entry at index {}",
                Index::raw(n, p as u32)
            )));
        }
        Ok(Self { n, values })
    }

    /// Element of `V_n^+`; rejects negative entries.
    pub fn nonnegative(n: usize, values: Vec<f64>) -> Result<Self> {
        let v = Self::new(n, values)?;
        if let Some(p) = v.values.iter().position(|&x| x < 0.0) {
            return Err(XsepError::Negative {
                index: Index::raw(n, p as u32).to_string(),
                value: v.values[p],
            });
        }
        Ok(v)
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(n, vec![value; dim(n)])
    }

    /// The basis vector `e_i`.
    pub fn unit(i: Index) -> Self {
        let mut values = vec![0.0; dim(i.n())];
        values[i.rank()] = 1.0;
        Self { n: i.n(), values }
    }

    /// `r~_i = r^i` for positive `r`.
    pub fn monomials(r: &[f64]) -> Result<Self> {
        let n = r.len();
        check_qubits(n)?;
        if let Some(k) = r.iter().position(|&x| !(x > 0.0)) {
            return Err(XsepError::Invalid(format!("r_{} must be positive", k + 1)));
        }
        let logs: Vec<f64> = r.iter().map(|x| x.ln()).collect();
        Ok(Self {
            n,
            values: Index::all(n).map(|i| signed_sum(i, &logs).exp()).collect(),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: Index) -> f64 {
        self.values[i.rank()]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&x| x >= 0.0)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `<s, a> = sum_i s_i a_i`.
    pub fn pairing(&self, other: &DiagVec) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x * y)
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            values: self.values.iter().map(|x| x * factor).collect(),
        }
    }

    /// `min_i sqrt(a_i a_ī)`.
    pub fn min_pair_geometric_mean(&self) -> (f64, Index) {
        let mut best = (f64::INFINITY, Index::raw(self.n, 0));
        for i in Index::all(self.n).filter(|i| i.is_pair_representative()) {
            let g = (self.get(i) * self.get(i.complement())).sqrt();
            if g < best.0 {
                best = (g, i);
            }
        }
        best
    }
}

/// Complex function on `I_[n]` with `u_ī = conj(u_i)` (an element of
/// `V_n^sa`). One value per pair `{i, ī}` is stored, for the member whose
/// first digit is 0.
#[derive(Clone, Debug, PartialEq)]
pub struct HermVec {
    n: usize,
    half: Vec<Complex64>,
}

impl HermVec {
    /// Builds from the representatives `i` with `i(1) = 0`, in rank order.
    pub fn from_half(n: usize, half: Vec<Complex64>) -> Result<Self> {
        check_qubits(n)?;
        if half.len() != dim(n) / 2 {
            return Err(XsepError::Length {
                expected: dim(n) / 2,
                got: half.len(),
            });
        }
        if let Some(p) = half
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(XsepError::Invalid(format!(
                "non-finite entry at index {}",
                Index::raw(n, p as u32)
            )));
        }
        Ok(Self { n, half })
    }

    /// Builds from all `2^n` entries, checking `u_ī = conj(u_i)` to `tol`.
    pub fn from_full(n: usize, full: &[Complex64], tol: f64) -> Result<Self> {
        check_qubits(n)?;
        if full.len() != dim(n) {
            return Err(XsepError::Length {
                expected: dim(n),
                got: full.len(),
            });
        }
        for i in Index::all(n).filter(|i| i.is_pair_representative()) {
            let defect = (full[i.complement().rank()] - full[i.rank()].conj()).norm();
            if !(defect <= tol) {
                return Err(XsepError::NotPaired {
                    index: i.to_string(),
                    defect,
                });
            }
        }
        Self::from_half(n, full[..dim(n) / 2].to_vec())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_half(n, vec![ZERO; dim(n) / 2])
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::from_half(n, vec![Complex64::new(value, 0.0); dim(n) / 2])
    }

    /// `alpha~_i = alpha^i` for `alpha_k = e^{i angle_k}`.
    pub fn torus(angles: &[f64]) -> Result<Self> {
        let n = angles.len();
        check_qubits(n)?;
        let half = (0..dim(n) / 2)
            .map(|b| Complex64::from_polar(1.0, signed_sum(Index::raw(n, b as u32), angles)))
            .collect();
        Ok(Self { n, half })
    }

    /// Unit-modulus vector `e^{i phi}` for a phase vector.
    pub fn from_phases(phases: &PhaseVec) -> Self {
        Self {
            n: phases.n,
            half: phases.values[..dim(phases.n) / 2]
                .iter()
                .map(|&t| Complex64::from_polar(1.0, t))
                .collect(),
        }
    }

    /// Vector with the given moduli and phases.
    pub fn from_polar(moduli: &[f64], phases: &PhaseVec) -> Result<Self> {
        let n = phases.n;
        if moduli.len() != dim(n) {
            return Err(XsepError::Length {
                expected: dim(n),
                got: moduli.len(),
            });
        }
        for i in Index::all(n).filter(|i| i.is_pair_representative()) {
            let (m, mc) = (moduli[i.rank()], moduli[i.complement().rank()]);
            if (m - mc).abs() > STATE_TOL * (1.0 + m.abs()) || m < 0.0 {
                return Err(XsepError::NotPaired {
                    index: i.to_string(),
                    defect: (m - mc).abs(),
                });
            }
        }
        Self::from_half(
            n,
            (0..dim(n) / 2)
                .map(|b| Complex64::from_polar(moduli[b], phases.values[b]))
                .collect(),
        )
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored representatives (indices with first digit 0, in rank order).
    #[inline]
    pub fn half(&self) -> &[Complex64] {
        &self.half
    }

    #[inline]
    pub fn get(&self, i: Index) -> Complex64 {
        let r = i.rank();
        let h = self.half.len();
        if r < h {
            self.half[r]
        } else {
            self.half[dim(self.n) - 1 - r].conj()
        }
    }

    pub fn to_full(&self) -> Vec<Complex64> {
        Index::all(self.n).map(|i| self.get(i)).collect()
    }

    pub fn moduli(&self) -> Vec<f64> {
        Index::all(self.n).map(|i| self.get(i).norm()).collect()
    }

    pub fn norm_inf(&self) -> f64 {
        self.half.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `sum_i |u_i|` over all `2^n` entries.
    pub fn norm_1(&self) -> f64 {
        2.0 * self.half.iter().map(|z| z.norm()).sum::<f64>()
    }

    /// The bilinear pairing `<c, u> = sum_i c_i u_i`, real on `V_n^sa`.
    pub fn pairing(&self, other: &HermVec) -> f64 {
        2.0 * self
            .half
            .iter()
            .zip(&other.half)
            .map(|(x, y)| (x * y).re)
            .sum::<f64>()
    }

    /// Entrywise product `u ∘ v`.
    pub fn hadamard(&self, other: &HermVec) -> Self {
        Self {
            n: self.n,
            half: self
                .half
                .iter()
                .zip(&other.half)
                .map(|(x, y)| x * y)
                .collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            half: self.half.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            half: self.half.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Principal-branch phase part in `(-π, π]`. Zero entries get phase 0.
    pub fn phase_part(&self) -> PhaseVec {
        let half: Vec<f64> = self.half.iter().map(|z| principal_arg(*z)).collect();
        PhaseVec::from_half(self.n, &half).expect("length matches")
    }

    /// First index with a zero entry, if any.
    pub fn first_zero(&self) -> Option<Index> {
        self.half
            .iter()
            .position(|z| z.norm() == 0.0)
            .map(|p| Index::raw(self.n, p as u32))
    }

    /// Value of `sum_i u_i alpha^i` at `alpha_k = e^{i angle_k}`.
    pub fn torus_value(&self, angles: &[f64]) -> f64 {
        2.0 * self
            .half
            .iter()
            .enumerate()
            .map(|(b, z)| {
                let t = signed_sum(Index::raw(self.n, b as u32), angles);
                z.re * t.cos() - z.im * t.sin()
            })
            .sum::<f64>()
    }
}

/// Serialized as `{"n": n, "values": [[re, im], ...]}` over all `2^n` indices.
impl Serialize for HermVec {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let values: Vec<[f64; 2]> = self.to_full().iter().map(|z| [z.re, z.im]).collect();
        let mut st = ser.serialize_struct("HermVec", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("values", &values)?;
        st.end()
    }
}

/// Argument in `(-π, π]`.
pub fn principal_arg(z: Complex64) -> f64 {
    if z.norm() == 0.0 {
        return 0.0;
    }
    let t = z.arg();
    if t <= -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        t
    }
}

/// Real function on `I_[n]` with `θ_ī = -θ_i` (an element of `V_n^ph`).
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseVec {
    n: usize,
    values: Vec<f64>,
}

impl PhaseVec {
    /// Checks antisymmetry to `tol`.
    pub fn new(n: usize, values: Vec<f64>, tol: f64) -> Result<Self> {
        check_qubits(n)?;
        if values.len() != dim(n) {
            return Err(XsepError::Length {
                expected: dim(n),
                got: values.len(),
            });
        }
        for i in Index::all(n).filter(|i| i.is_pair_representative()) {
            let defect = (values[i.rank()] + values[i.complement().rank()]).abs();
            if !(defect <= tol) {
                return Err(XsepError::NotPaired {
                    index: i.to_string(),
                    defect,
                });
            }
        }
        Ok(Self { n, values })
    }

    /// Builds from the values on indices with first digit 0.
    pub fn from_half(n: usize, half: &[f64]) -> Result<Self> {
        check_qubits(n)?;
        if half.len() != dim(n) / 2 {
            return Err(XsepError::Length {
                expected: dim(n) / 2,
                got: half.len(),
            });
        }
        let mut values = vec![0.0; dim(n)];
        for (b, &t) in half.iter().enumerate() {
            values[b] = t;
            values[dim(n) - 1 - b] = -t;
        }
        Ok(Self { n, values })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_half(n, &vec![0.0; dim(n) / 2])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: Index) -> f64 {
        self.values[i.rank()]
    }

    pub fn negated(&self) -> Self {
        Self {
            n: self.n,
            values: self.values.iter().map(|x| -x).collect(),
        }
    }

    pub fn add(&self, other: &PhaseVec) -> Self {
        Self {
            n: self.n,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }
}

/// An X-shaped matrix `X(a, c)` with `a ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct XState {
    pub a: DiagVec,
    pub c: HermVec,
}

impl XState {
    pub fn new(a: DiagVec, c: HermVec) -> Result<Self> {
        if a.n() != c.n() {
            return Err(XsepError::MixedQubits(a.n(), c.n()));
        }
        if let Some(p) = a.values().iter().position(|&x| x < 0.0) {
            return Err(XsepError::Negative {
                index: Index::raw(a.n(), p as u32).to_string(),
                value: a.values()[p],
            });
        }
        Ok(Self { a, c })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn trace(&self) -> f64 {
        self.a.sum()
    }

    /// Every 2x2 block `[[a_i, c_i], [conj c_i, a_ī]]` is positive
    /// semidefinite: `a_i a_ī ≥ |c_i|^2`.
    pub fn is_positive(&self) -> bool {
        self.is_positive_tol(0.0)
    }

    pub fn is_positive_tol(&self, tol: f64) -> bool {
        Index::all(self.n())
            .filter(|i| i.is_pair_representative())
            .all(|i| {
                let g = (self.a.get(i) * self.a.get(i.complement())).sqrt();
                g >= self.c.get(i).norm() - tol
            })
    }

    /// Closed-form PPT condition `min_i sqrt(a_i a_ī) ≥ ||c||_∞`.
    pub fn is_ppt(&self) -> bool {
        self.is_ppt_tol(1e-12 * self.scale())
    }

    pub fn is_ppt_tol(&self, tol: f64) -> bool {
        self.a.min_pair_geometric_mean().0 >= self.c.norm_inf() - tol
    }

    /// Rejects states that are not positive or do not have unit trace.
    pub fn validate_state(&self, tol: f64) -> Result<()> {
        let tr = self.trace();
        if !((tr - 1.0).abs() <= tol) {
            return Err(XsepError::InvalidState(format!(
                "trace {tr} differs from 1"
            )));
        }
        if !self.is_positive_tol(tol) {
            let bad = Index::all(self.n())
                .find(|&i| {
                    (self.a.get(i) * self.a.get(i.complement())).sqrt() < self.c.get(i).norm() - tol
                })
                .expect("some block fails");
            return Err(XsepError::InvalidState(format!(
                "block at index {bad} is not positive semidefinite"
            )));
        }
        Ok(())
    }

    /// Magnitude used to scale absolute tolerances.
    pub fn scale(&self) -> f64 {
        self.a
            .values()
            .iter()
            .fold(0.0f64, |m, x| m.max(*x))
            .max(self.c.norm_inf())
            .max(1e-300)
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        assemble(&self.a, &self.c)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            a: self.a.scaled(factor),
            c: self.c.scaled(factor),
        }
    }
}

/// Dense `2^n x 2^n` matrix of `X(s, u)` in lexicographic order.
pub fn assemble(s: &DiagVec, u: &HermVec) -> Result<DMatrix<Complex64>> {
    let n = s.n();
    if n != u.n() {
        return Err(XsepError::MixedQubits(n, u.n()));
    }
    if n > MAX_DENSE_QUBITS {
        return Err(XsepError::QubitCount {
            n,
            max: MAX_DENSE_QUBITS,
        });
    }
    let d = dim(n);
    let mut m = DMatrix::from_element(d, d, ZERO);
    for i in Index::all(n) {
        m[(i.rank(), i.rank())] = Complex64::new(s.get(i), 0.0);
        m[(i.rank(), i.complement().rank())] = u.get(i);
    }
    Ok(m)
}

/// A dense Hermitian `2^n x 2^n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    matrix: DMatrix<Complex64>,
}

impl DenseState {
    /// Checks shape and Hermiticity to `tol`.
    pub fn new(n: usize, matrix: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        check_qubits(n)?;
        if n > MAX_DENSE_QUBITS {
            return Err(XsepError::QubitCount {
                n,
                max: MAX_DENSE_QUBITS,
            });
        }
        let d = dim(n);
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(XsepError::Length {
                expected: d * d,
                got: matrix.nrows() * matrix.ncols(),
            });
        }
        let defect = (0..d)
            .flat_map(|r| (r..d).map(move |c| (r, c)))
            .map(|(r, c)| (matrix[(r, c)] - matrix[(c, r)].conj()).norm())
            .fold(0.0, f64::max);
        if !(defect <= tol) {
            return Err(XsepError::NotHermitian(defect));
        }
        Ok(Self { n, matrix })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// Unit trace and positive semidefinite, both to `tol`.
    pub fn validate_state(&self, tol: f64) -> Result<()> {
        let tr = self.trace();
        if !((tr - 1.0).abs() <= tol) {
            return Err(XsepError::InvalidState(format!(
                "trace {tr} differs from 1"
            )));
        }
        let min_eig = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -tol {
            return Err(XsepError::InvalidState(format!(
                "matrix has negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(())
    }

    /// Diagonal and anti-diagonal of the matrix, without sign checks.
    pub fn xpart_parts(&self) -> (DiagVec, HermVec) {
        let n = self.n;
        let diag = Index::all(n)
            .map(|i| self.matrix[(i.rank(), i.rank())].re)
            .collect();
        let half = Index::all(n)
            .take(dim(n) / 2)
            .map(|i| self.matrix[(i.rank(), i.complement().rank())])
            .collect();
        (
            DiagVec::new(n, diag).expect("finite diagonal"),
            HermVec::from_half(n, half).expect("length matches"),
        )
    }
}

/// Transposes the qubits set in `mask` (bit `n − k` for qubit `k`).
pub fn partial_transpose(m: &DMatrix<Complex64>, mask: u32) -> DMatrix<Complex64> {
    let d = m.nrows();
    let mask = mask as usize;
    DMatrix::from_fn(d, d, |r, c| {
        let r2 = (r & !mask) | (c & mask);
        let c2 = (c & !mask) | (r & mask);
        m[(r2, c2)]
    })
}

/// Every partial transpose of the `2^n x 2^n` matrix is positive
/// semidefinite to `tol`.
pub fn dense_is_ppt(m: &DMatrix<Complex64>, n: usize, tol: f64) -> bool {
    // Transposing a set of qubits or its complement gives the same spectrum.
    (1..1u32 << (n - 1)).all(|mask| {
        partial_transpose(m, mask)
            .symmetric_eigenvalues()
            .iter()
            .all(|&x| x >= -tol)
    })
}

/// X-part: `a_i = ρ[i,i]`, `c_i = ρ[i,ī]`.
pub fn xpart(rho: &DenseState) -> Result<XState> {
    let (a, c) = rho.xpart_parts();
    XState::new(a, c)
}

/// GHZ-diagonal state `sum_i p_i |ξ_i><ξ_i|` with
/// `|ξ_i> = (|i> + (-1)^{i_1} |ī>) / sqrt 2`.
pub fn ghz_diagonal(n: usize, p: &[f64]) -> Result<XState> {
    check_qubits(n)?;
    if p.len() != dim(n) {
        return Err(XsepError::Length {
            expected: dim(n),
            got: p.len(),
        });
    }
    if let Some(k) = p.iter().position(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(XsepError::InvalidProbability(format!(
            "entry {} is {}",
            Index::raw(n, k as u32),
            p[k]
        )));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > STATE_TOL {
        return Err(XsepError::InvalidProbability(format!("sum is {total}")));
    }
    let a = Index::all(n)
        .map(|i| 0.5 * (p[i.rank()] + p[i.complement().rank()]))
        .collect();
    let half = Index::all(n)
        .take(dim(n) / 2)
        .map(|i| {
            let sign = if i.bit(1) == 0 { 1.0 } else { -1.0 };
            Complex64::new(0.5 * sign * (p[i.rank()] - p[i.complement().rank()]), 0.0)
        })
        .collect();
    XState::new(DiagVec::new(n, a)?, HermVec::from_half(n, half)?)
}

/// Dense assembly of `sum_i p_i |ξ_i><ξ_i|`.
pub fn ghz_dense(n: usize, p: &[f64]) -> Result<DMatrix<Complex64>> {
    check_qubits(n)?;
    if n > MAX_DENSE_QUBITS {
        return Err(XsepError::QubitCount {
            n,
            max: MAX_DENSE_QUBITS,
        });
    }
    let d = dim(n);
    let mut m = DMatrix::from_element(d, d, ZERO);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in Index::all(n) {
        let mut v = nalgebra::DVector::from_element(d, ZERO);
        let sign = if i.bit(1) == 0 { 1.0 } else { -1.0 };
        v[i.rank()] += Complex64::new(h, 0.0);
        v[i.complement().rank()] += Complex64::new(sign * h, 0.0);
        m += (&v * v.adjoint()) * Complex64::new(p[i.rank()], 0.0);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hermvec_pairing_is_enforced() {
        let full = vec![c(1.0, 2.0), c(0.5, 0.0), c(0.5, 0.0), c(1.0, -2.0)];
        let u = HermVec::from_full(2, &full, 1e-12).unwrap();
        assert_eq!(u.to_full(), full);
        let bad = vec![c(1.0, 2.0), c(0.5, 0.0), c(0.5, 0.0), c(1.0, 2.0)];
        assert!(matches!(
            HermVec::from_full(2, &bad, 1e-12),
            Err(XsepError::NotPaired { .. })
        ));
    }

    #[test]
    fn pairing_matches_full_sum() {
        let u = HermVec::from_half(2, vec![c(1.0, 2.0), c(-0.5, 0.3)]).unwrap();
        let v = HermVec::from_half(2, vec![c(0.2, -1.0), c(3.0, 0.1)]).unwrap();
        let full: Complex64 = u
            .to_full()
            .iter()
            .zip(v.to_full())
            .map(|(x, y)| x * y)
            .sum();
        assert!(full.im.abs() < 1e-12);
        assert!((full.re - u.pairing(&v)).abs() < 1e-12);
    }

    #[test]
    fn diagonal_state_has_zero_xpart_antidiagonal() {
        let d = dim(2);
        let mut m = DMatrix::from_element(d, d, ZERO);
        for k in 0..d {
            m[(k, k)] = c(0.25, 0.0);
        }
        let x = xpart(&DenseState::new(2, m, STATE_TOL).unwrap()).unwrap();
        assert_eq!(x.c.norm_inf(), 0.0);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = DMatrix::from_element(2, 2, ZERO);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            DenseState::new(1, m, STATE_TOL),
            Err(XsepError::NotHermitian(_))
        ));
    }

    #[test]
    fn positivity_and_ppt_predicates() {
        let x = XState::new(
            DiagVec::constant(3, 1.0).unwrap(),
            HermVec::constant(3, 1.0).unwrap(),
        )
        .unwrap();
        assert!(x.is_positive());
        assert!(x.is_ppt());

        let mut half = vec![c(1.0, 0.0); 4];
        half[2] = c(0.0, 1.01);
        let y = XState::new(
            DiagVec::constant(3, 1.0).unwrap(),
            HermVec::from_half(3, half).unwrap(),
        )
        .unwrap();
        assert!(!y.is_ppt());
        assert!(!y.is_positive());
    }

    #[test]
    fn ghz_examples() {
        let n = 3;
        let x = ghz_diagonal(n, &vec![1.0 / 8.0; 8]).unwrap();
        assert!(x.a.values().iter().all(|&v| (v - 0.125).abs() < 1e-15));
        assert_eq!(x.c.norm_inf(), 0.0);

        let mut p = vec![0.0; 8];
        p[0] = 1.0;
        let x = ghz_diagonal(n, &p).unwrap();
        assert_eq!(x.a.values(), &[0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5]);
        assert_eq!(x.c.get("000".parse().unwrap()), c(0.5, 0.0));
        assert_eq!(x.c.get("111".parse().unwrap()), c(0.5, 0.0));
        assert_eq!(x.c.norm_1(), 1.0);

        assert!(ghz_diagonal(n, &[0.5; 8]).is_err());
        assert!(ghz_diagonal(n, &[-0.1, 1.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn torus_vectors_have_unit_moduli() {
        let u = HermVec::torus(&[0.3, -2.0, 1.7]).unwrap();
        assert!(u.moduli().iter().all(|m| (m - 1.0).abs() < 1e-12));
        let want = Complex64::from_polar(1.0, 0.3 - 2.0 - 1.7);
        assert!((u.get("001".parse().unwrap()) - want).norm() < 1e-12);
    }

    #[test]
    fn principal_branch() {
        assert_eq!(principal_arg(c(-1.0, 0.0)), std::f64::consts::PI);
        assert_eq!(principal_arg(c(-1.0, -0.0)), std::f64::consts::PI);
        assert_eq!(principal_arg(c(0.0, 0.0)), 0.0);
    }
}
