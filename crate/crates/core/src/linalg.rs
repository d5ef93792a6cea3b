//! Small dense helpers on top of nalgebra: eigen-decomposition of unitary
//! matrices, norms, assignment and alignment of eigenvector frames.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

/// Eigenvalues and orthonormal eigenvectors of a unitary matrix.
#[derive(Clone, Debug)]
pub struct UnitaryEigen {
    pub values: Vec<C64>,
    pub vectors: Vec<CVector>,
}

/// Diagonalizes a (numerically) unitary matrix through its complex Schur
/// form. For normal input the triangular factor is diagonal up to rounding,
/// so the Schur vectors are eigenvectors; degenerate clusters come back as an
/// orthonormal basis of the eigenspace.
pub fn unitary_eigen(m: &CMatrix) -> UnitaryEigen {
    let n = m.nrows();
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), 1e-15, 10_000)
        .unwrap_or_else(|| nalgebra::linalg::Schur::new(m.clone()));
    let (q, t) = schur.unpack();
    let values = (0..n).map(|i| t[(i, i)]).collect();
    let vectors = (0..n).map(|i| q.column(i).into_owned()).collect();
    UnitaryEigen { values, vectors }
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    // Hermitian Gram matrix keeps this cheap and exact enough for n <= 16.
    let gram = m.adjoint() * m;
    let eig = nalgebra::linalg::SymmetricEigen::new(gram);
    eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max).max(0.0).sqrt()
}

pub fn determinant(m: &CMatrix) -> C64 {
    m.clone().lu().determinant()
}

pub fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, Vec<CVector>) {
    let n = m.nrows();
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = nalgebra::linalg::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    (values, vectors)
}

/// Unitary factor of the polar decomposition of a square matrix. Used to
/// rotate a degenerate eigenbasis onto a reference frame.
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    u * v_t
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method,
/// O(n^3)). Returns `assign[row] = col`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let inf = f64::INFINITY;
    // 1-based potentials, following the classical formulation.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for p in 0..br {
                for q in 0..bc {
                    out[(i * br + p, j * bc + q)] = s * b[(p, q)];
                }
            }
        }
    }
    out
}

/// Principal argument mapped to [0, 2π).
pub fn arg_0_2pi(z: C64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}
