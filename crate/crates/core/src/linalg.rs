//! Dense Hermitian linear algebra.
//!
//! Operators are stored densely (dimension at most a few hundred here). Real
//! symmetric operators keep a real backing store so the eigensolver can run
//! entirely in real arithmetic; genuinely complex Hermitian operators are
//! reduced to a real symmetric tridiagonal matrix by complex Householder
//! reflections followed by a diagonal phase change. Both paths finish with the
//! same implicit-shift QL iteration.

use num_complex::Complex64;
use thiserror::Error;

/// Entrywise tolerance for `H = H^dagger`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed deviation of a state norm from one.
pub const NORM_TOL: f64 = 1e-10;
/// Eigenvalue separation below which a ground state is reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

const MAX_QL_ITERATIONS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is not Hermitian (max |H - H^dagger| = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },
    #[error("empty operator")]
    Empty,
    #[error("QL iteration did not converge for eigenvalue {index}")]
    NoConvergence { index: usize },
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
}

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// Dense complex self-adjoint matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    storage: Storage,
}

impl HermitianOperator {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, storage: Storage::Real(vec![0.0; dim * dim]) }
    }

    pub fn from_real(dim: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != dim * dim {
            return Err(LinalgError::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        let mut defect = 0.0f64;
        for i in 0..dim {
            for j in (i + 1)..dim {
                defect = defect.max((data[i * dim + j] - data[j * dim + i]).abs());
            }
        }
        if defect > HERMITIAN_TOL || data.iter().any(|x| !x.is_finite()) {
            return Err(LinalgError::NotHermitian { defect });
        }
        Ok(Self { dim, storage: Storage::Real(data) })
    }

    /// Complex input whose imaginary parts all vanish is stored as real.
    pub fn from_complex(dim: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if data.len() != dim * dim {
            return Err(LinalgError::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        let mut defect = 0.0f64;
        for i in 0..dim {
            defect = defect.max(data[i * dim + i].im.abs());
            for j in (i + 1)..dim {
                defect = defect.max((data[i * dim + j] - data[j * dim + i].conj()).norm());
            }
        }
        if defect > HERMITIAN_TOL || data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NotHermitian { defect });
        }
        if data.iter().all(|z| z.im == 0.0) {
            return Ok(Self { dim, storage: Storage::Real(data.iter().map(|z| z.re).collect()) });
        }
        Ok(Self { dim, storage: Storage::Complex(data) })
    }

    pub fn from_diagonal(values: &[f64]) -> Self {
        let dim = values.len();
        let mut data = vec![0.0; dim * dim];
        for (i, v) in values.iter().enumerate() {
            data[i * dim + i] = *v;
        }
        Self { dim, storage: Storage::Real(data) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_real(&self) -> bool {
        matches!(self.storage, Storage::Real(_))
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match &self.storage {
            Storage::Real(data) => Some(data),
            Storage::Complex(_) => None,
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        match &self.storage {
            Storage::Real(data) => Complex64::new(data[row * self.dim + col], 0.0),
            Storage::Complex(data) => data[row * self.dim + col],
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    pub fn to_complex_vec(&self) -> Vec<Complex64> {
        match &self.storage {
            Storage::Real(data) => data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Storage::Complex(data) => data.clone(),
        }
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        let mut defect = 0.0f64;
        for i in 0..self.dim {
            defect = defect.max(self.get(i, i).im.abs());
            for j in (i + 1)..self.dim {
                defect = defect.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        defect
    }

    pub fn max_abs_entry(&self) -> f64 {
        match &self.storage {
            Storage::Real(data) => data.iter().fold(0.0, |m, x| m.max(x.abs())),
            Storage::Complex(data) => data.iter().fold(0.0, |m, z| m.max(z.norm())),
        }
    }

    /// Frobenius norm, an upper bound on the spectral norm.
    pub fn frobenius_norm(&self) -> f64 {
        match &self.storage {
            Storage::Real(data) => data.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Storage::Complex(data) => data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let storage = match &self.storage {
            Storage::Real(data) => Storage::Real(data.iter().map(|x| x * factor).collect()),
            Storage::Complex(data) => Storage::Complex(data.iter().map(|z| z * factor).collect()),
        };
        Self { dim: self.dim, storage }
    }

    /// `sum_k c_k H_k` over operators of equal dimension.
    pub fn linear_combination(terms: &[(f64, &HermitianOperator)]) -> Result<Self, LinalgError> {
        let (_, first) = terms.first().ok_or(LinalgError::Empty)?;
        let dim = first.dim;
        for (_, op) in terms {
            if op.dim != dim {
                return Err(LinalgError::DimensionMismatch { expected: dim, found: op.dim });
            }
        }
        if terms.iter().all(|(_, op)| op.is_real()) {
            let mut out = vec![0.0; dim * dim];
            for (c, op) in terms {
                if *c == 0.0 {
                    continue;
                }
                let data = op.as_real().expect("checked real");
                for (o, x) in out.iter_mut().zip(data) {
                    *o += c * x;
                }
            }
            return Ok(Self { dim, storage: Storage::Real(out) });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (c, op) in terms {
            if *c == 0.0 {
                continue;
            }
            for (idx, o) in out.iter_mut().enumerate() {
                *o += op.get(idx / dim, idx % dim) * *c;
            }
        }
        Self::from_complex(dim, out)
    }

    /// Adds a real diagonal in place.
    pub fn add_diagonal(&mut self, values: &[f64]) -> Result<(), LinalgError> {
        if values.len() != self.dim {
            return Err(LinalgError::DimensionMismatch { expected: self.dim, found: values.len() });
        }
        let dim = self.dim;
        match &mut self.storage {
            Storage::Real(data) => {
                for (i, v) in values.iter().enumerate() {
                    data[i * dim + i] += v;
                }
            }
            Storage::Complex(data) => {
                for (i, v) in values.iter().enumerate() {
                    data[i * dim + i] += v;
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, psi: &[Complex64]) -> Result<Vec<Complex64>, LinalgError> {
        if psi.len() != self.dim {
            return Err(LinalgError::DimensionMismatch { expected: self.dim, found: psi.len() });
        }
        let n = self.dim;
        let out = match &self.storage {
            Storage::Real(data) => data
                .chunks_exact(n)
                .map(|row| row.iter().zip(psi).map(|(a, z)| z * a).sum())
                .collect(),
            Storage::Complex(data) => data
                .chunks_exact(n)
                .map(|row| row.iter().zip(psi).map(|(a, z)| a * z).sum())
                .collect(),
        };
        Ok(out)
    }

    /// `<psi|H|psi>` (real for Hermitian `H`).
    pub fn expectation(&self, psi: &StateVector) -> Result<f64, LinalgError> {
        let h_psi = self.apply(psi.amplitudes())?;
        Ok(psi.amplitudes().iter().zip(&h_psi).map(|(a, b)| (a.conj() * b).re).sum())
    }
}

/// Normalized complex amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, LinalgError> {
        if amplitudes.is_empty() {
            return Err(LinalgError::Empty);
        }
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(LinalgError::NotNormalized { norm });
        }
        Ok(Self { amplitudes })
    }

    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self, LinalgError> {
        let norm = l2_norm(&amplitudes);
        if amplitudes.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(LinalgError::NotNormalized { norm });
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self { amplitudes })
    }

    pub fn uniform(dim: usize) -> Self {
        let a = 1.0 / (dim as f64).sqrt();
        Self { amplitudes: vec![Complex64::new(a, 0.0); dim] }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|<self|other>|^2`.
    pub fn overlap_probability(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, Debug)]
enum Vectors {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// Full spectrum in ascending order with orthonormal eigenvectors.
///
/// Eigenvectors are gauge-fixed: the first entry of largest magnitude is real
/// and positive.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    dim: usize,
    eigenvalues: Vec<f64>,
    // eigenvector k occupies [k * dim, (k + 1) * dim)
    vectors: Vectors,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        let range = k * self.dim..(k + 1) * self.dim;
        match &self.vectors {
            Vectors::Real(v) => v[range].iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Vectors::Complex(v) => v[range].to_vec(),
        }
    }

    pub fn eigenstate(&self, k: usize) -> StateVector {
        StateVector { amplitudes: self.eigenvector(k) }
    }

    /// Coefficients `<v_k|psi>` for every eigenvector.
    pub fn coefficients(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        match &self.vectors {
            Vectors::Real(v) => v
                .chunks_exact(n)
                .map(|col| col.iter().zip(psi).map(|(a, z)| z * a).sum())
                .collect(),
            Vectors::Complex(v) => v
                .chunks_exact(n)
                .map(|col| col.iter().zip(psi).map(|(a, z)| a.conj() * z).sum())
                .collect(),
        }
    }

    /// `sum_k c_k v_k`.
    pub fn synthesize(&self, coefficients: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        match &self.vectors {
            Vectors::Real(v) => {
                for (col, c) in v.chunks_exact(n).zip(coefficients) {
                    for (o, a) in out.iter_mut().zip(col) {
                        *o += c * a;
                    }
                }
            }
            Vectors::Complex(v) => {
                for (col, c) in v.chunks_exact(n).zip(coefficients) {
                    for (o, a) in out.iter_mut().zip(col) {
                        *o += c * a;
                    }
                }
            }
        }
        out
    }

    /// `f(H) psi` for a scalar function of the eigenvalues.
    pub fn apply_function<F: Fn(f64) -> Complex64>(&self, f: F, psi: &[Complex64]) -> Vec<Complex64> {
        let mut coeffs = self.coefficients(psi);
        for (c, &lambda) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= f(lambda);
        }
        self.synthesize(&coeffs)
    }

    /// Squared norm of the projection of `psi` onto the eigenspace spanned by
    /// eigenvectors `0..count`.
    pub fn lowest_space_weight(&self, psi: &[Complex64], count: usize) -> f64 {
        self.coefficients(psi).iter().take(count).map(|c| c.norm_sqr()).sum()
    }
}

/// Full eigendecomposition of a Hermitian operator.
pub fn eigh(h: &HermitianOperator) -> Result<EigenDecomposition, LinalgError> {
    let n = h.dim();
    if n == 0 {
        return Err(LinalgError::Empty);
    }
    let defect = h.max_hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian { defect });
    }
    match &h.storage {
        Storage::Real(data) => {
            // symmetric, so row-major data doubles as the column-major work array
            let mut z = data.clone();
            let mut d = vec![0.0; n];
            let mut e = vec![0.0; n];
            tridiagonalize_real(n, &mut z, &mut d, &mut e);
            ql_implicit(n, &mut d, &mut e, &mut z)?;
            let (eigenvalues, mut vectors) = sort_real(n, d, z);
            for col in vectors.chunks_exact_mut(n) {
                fix_gauge_real(col);
            }
            Ok(EigenDecomposition { dim: n, eigenvalues, vectors: Vectors::Real(vectors) })
        }
        Storage::Complex(data) => {
            let (mut d, mut e, u) = tridiagonalize_complex(n, data);
            let mut z = vec![0.0; n * n];
            for i in 0..n {
                z[i * n + i] = 1.0;
            }
            ql_implicit(n, &mut d, &mut e, &mut z)?;
            // eigenvectors of H are U z_k, with U column-major
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
            let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
            let mut eigenvalues = Vec::with_capacity(n);
            for (k, &src) in order.iter().enumerate() {
                eigenvalues.push(d[src]);
                let zk = &z[src * n..(src + 1) * n];
                let out = &mut vectors[k * n..(k + 1) * n];
                for (j, &zj) in zk.iter().enumerate() {
                    if zj == 0.0 {
                        continue;
                    }
                    let uj = &u[j * n..(j + 1) * n];
                    for (o, a) in out.iter_mut().zip(uj) {
                        *o += a * zj;
                    }
                }
                fix_gauge_complex(out);
            }
            Ok(EigenDecomposition { dim: n, eigenvalues, vectors: Vectors::Complex(vectors) })
        }
    }
}

/// Lowest eigenpair plus the gap to the next level.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    /// `E_1 - E_0`; infinite for a one-dimensional space.
    pub gap: f64,
    /// Number of eigenvalues within `DEGENERACY_TOL` of the lowest.
    pub multiplicity: usize,
}

impl GroundState {
    pub fn is_degenerate(&self) -> bool {
        self.multiplicity > 1
    }
}

pub fn ground_state(h: &HermitianOperator) -> Result<GroundState, LinalgError> {
    let eig = eigh(h)?;
    Ok(ground_state_from(&eig))
}

pub fn ground_state_from(eig: &EigenDecomposition) -> GroundState {
    let values = eig.eigenvalues();
    let energy = values[0];
    let multiplicity = values.iter().take_while(|&&v| v - energy < DEGENERACY_TOL).count();
    let gap = values.get(1).map_or(f64::INFINITY, |v| v - energy);
    GroundState { energy, state: eig.eigenstate(0), gap, multiplicity }
}

/// `exp(-i H dt) psi` through the eigendecomposition of `H`.
pub fn evolve_step(h: &HermitianOperator, dt: f64, psi: &StateVector) -> Result<StateVector, LinalgError> {
    if psi.dim() != h.dim() {
        return Err(LinalgError::DimensionMismatch { expected: h.dim(), found: psi.dim() });
    }
    let eig = eigh(h)?;
    Ok(evolve_with(&eig, dt, psi))
}

/// Propagation with a precomputed decomposition.
pub fn evolve_with(eig: &EigenDecomposition, dt: f64, psi: &StateVector) -> StateVector {
    let amplitudes = eig.apply_function(|lambda| Complex64::from_polar(1.0, -lambda * dt), psi.amplitudes());
    StateVector { amplitudes }
}

/// Solves `A X = B` for symmetric positive definite `A` (row-major, `dim x
/// dim`) and `B` with `cols` columns (row-major), by Cholesky factorization.
pub fn solve_spd(a: &[f64], dim: usize, b: &[f64], cols: usize) -> Result<Vec<f64>, LinalgError> {
    if a.len() != dim * dim {
        return Err(LinalgError::DimensionMismatch { expected: dim * dim, found: a.len() });
    }
    if b.len() != dim * cols {
        return Err(LinalgError::DimensionMismatch { expected: dim * cols, found: b.len() });
    }
    let mut l = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let s: f64 = a[i * dim + j] - (0..j).map(|k| l[i * dim + k] * l[j * dim + k]).sum::<f64>();
            if i == j {
                if s <= 0.0 {
                    return Err(LinalgError::NotPositiveDefinite { pivot: i, value: s });
                }
                l[i * dim + i] = s.sqrt();
            } else {
                l[i * dim + j] = s / l[j * dim + j];
            }
        }
    }
    let mut x = b.to_vec();
    for c in 0..cols {
        for i in 0..dim {
            let s: f64 = (0..i).map(|k| l[i * dim + k] * x[k * cols + c]).sum();
            x[i * cols + c] = (x[i * cols + c] - s) / l[i * dim + i];
        }
        for i in (0..dim).rev() {
            let s: f64 = (i + 1..dim).map(|k| l[k * dim + i] * x[k * cols + c]).sum();
            x[i * cols + c] = (x[i * cols + c] - s) / l[i * dim + i];
        }
    }
    Ok(x)
}

// Householder reduction of a real symmetric matrix (EISPACK tred2 lineage).
// `z` holds the matrix on entry and the orthogonal transform, column-major, on
// exit; `d` gets the diagonal and `e[1..]` the subdiagonal.
fn tridiagonalize_real(n: usize, z: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    let ix = |r: usize, c: usize| c * n + r;
    for j in 0..n {
        d[j] = z[ix(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = z[ix(i - 1, j)];
                z[ix(i, j)] = 0.0;
                z[ix(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                z[ix(j, i)] = f;
                g = e[j] + z[ix(j, j)] * f;
                let col = &z[ix(j + 1, j)..ix(i, j)];
                for (k, &zkj) in (j + 1..i).zip(col) {
                    g += zkj * d[k];
                    e[k] += zkj * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let col = &mut z[ix(j, j)..ix(i, j)];
                for (zkj, k) in col.iter_mut().zip(j..i) {
                    *zkj -= f * e[k] + g * d[k];
                }
                d[j] = z[ix(i - 1, j)];
                z[ix(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        z[ix(n - 1, i)] = z[ix(i, i)];
        z[ix(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = z[ix(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += z[ix(k, i + 1)] * z[ix(k, j)];
                }
                for k in 0..=i {
                    z[ix(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            z[ix(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = z[ix(n - 1, j)];
        z[ix(n - 1, j)] = 0.0;
    }
    z[ix(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

// Complex Householder reduction of a Hermitian matrix followed by a diagonal
// phase change, so the returned tridiagonal (`d`, `e[1..]`) is real. The
// returned unitary is column-major.
fn tridiagonalize_complex(n: usize, data: &[Complex64]) -> (Vec<f64>, Vec<f64>, Vec<Complex64>) {
    let zero = Complex64::new(0.0, 0.0);
    let mut a = data.to_vec();
    let mut q = vec![zero; n * n];
    for i in 0..n {
        q[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<Complex64> = (0..m).map(|r| a[(k + 1 + r) * n + k]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = (tail + x[0].norm_sqr()).sqrt();
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        v[..m].copy_from_slice(&x);
        v[0] -= alpha;
        let vnorm = l2_norm(&v[..m]);
        for vi in v[..m].iter_mut() {
            *vi /= vnorm;
        }
        // B <- P B P with P = I - 2 v v^dagger on the trailing block
        let off = k + 1;
        for r in 0..m {
            let row = &a[(off + r) * n + off..(off + r) * n + off + m];
            p[r] = row.iter().zip(&v[..m]).map(|(b, vi)| b * vi).sum::<Complex64>() * 2.0;
        }
        let vp: Complex64 = v[..m].iter().zip(&p[..m]).map(|(vi, pi)| vi.conj() * pi).sum();
        for r in 0..m {
            p[r] -= v[r] * vp.re;
        }
        for r in 0..m {
            for c in 0..m {
                a[(off + r) * n + off + c] -= v[r] * p[c].conj() + p[r] * v[c].conj();
            }
        }
        a[off * n + k] = alpha;
        a[k * n + off] = alpha.conj();
        for r in 1..m {
            a[(off + r) * n + k] = zero;
            a[k * n + off + r] = zero;
        }
        // Q <- Q P on columns off..n
        for row in 0..n {
            let s: Complex64 = (0..m).map(|c| q[(off + c) * n + row] * v[c]).sum::<Complex64>() * 2.0;
            for c in 0..m {
                q[(off + c) * n + row] -= s * v[c].conj();
            }
        }
    }
    let d: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    let mut e = vec![0.0; n];
    let mut phase = Complex64::new(1.0, 0.0);
    for i in 1..n {
        let beta = a[i * n + i - 1];
        e[i] = beta.norm();
        if e[i] > 0.0 {
            phase *= beta / e[i];
        }
        for row in 0..n {
            q[i * n + row] *= phase;
        }
    }
    (d, e, q)
}

// Implicit-shift QL on the symmetric tridiagonal (`d`, `e[1..]`), rotating the
// columns of the column-major `z` (EISPACK tql2 lineage).
fn ql_implicit(n: usize, d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<(), LinalgError> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(LinalgError::NoConvergence { index: l });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let col_i = &mut lo[i * n..];
                    let col_next = &mut hi[..n];
                    for (zi, zn) in col_i.iter_mut().zip(col_next.iter_mut()) {
                        let t = *zn;
                        *zn = s * *zi + c * t;
                        *zi = c * *zi - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

fn sort_real(n: usize, d: Vec<f64>, z: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        values.push(d[k]);
        vectors.extend_from_slice(&z[k * n..(k + 1) * n]);
    }
    (values, vectors)
}

fn gauge_index(mags: impl Iterator<Item = f64> + Clone) -> usize {
    let max = mags.clone().fold(0.0f64, f64::max);
    mags.into_iter().position(|m| m >= max * (1.0 - 1e-9)).unwrap_or(0)
}

fn fix_gauge_real(col: &mut [f64]) {
    let k = gauge_index(col.iter().map(|x| x.abs()));
    if col[k] < 0.0 {
        col.iter_mut().for_each(|x| *x = -*x);
    }
}

fn fix_gauge_complex(col: &mut [Complex64]) {
    let k = gauge_index(col.iter().map(|z| z.norm()));
    let mag = col[k].norm();
    if mag > 0.0 {
        let rot = col[k].conj() / mag;
        col.iter_mut().for_each(|z| *z *= rot);
        col[k] = Complex64::new(col[k].re, 0.0);
    }
}
