//! Just enough complex linear algebra for the beamforming in this crate.
//!
//! Dimensions never exceed the antenna count, so a cyclic Jacobi
//! eigensolver and modified Gram-Schmidt with reorthogonalization are both
//! simple and accurate here; no external matrix library is pulled in.

use num_complex::Complex64;

pub(crate) type C64 = Complex64;

/// Hermitian inner product conj(a) . b.
pub(crate) fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [C64], alpha: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn normalize(v: &mut [C64]) {
    let n = norm(v);
    for x in v.iter_mut() {
        *x /= n;
    }
}

/// Subtracts from `v` its projections onto the orthonormal `basis`.
fn project_out(v: &mut [C64], basis: &[Vec<C64>]) {
    for b in basis {
        let coeff = dot(b, v);
        axpy(v, -coeff, b);
    }
}

/// Orthonormal basis of the orthogonal complement of `span` in C^dim.
///
/// `span` vectors are orthonormalized first (modified Gram-Schmidt with a
/// second reorthogonalization pass), then the standard basis is filtered
/// through the same projections until `dim` vectors are reached.
pub(crate) fn orthonormal_complement(span: &[Vec<C64>], dim: usize) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for v in span {
        let mut w = v.clone();
        project_out(&mut w, &basis);
        project_out(&mut w, &basis);
        // Callers check rank via singular values beforehand; a dependent
        // vector contributes nothing here.
        if norm(&w) > 1e-12 * norm(v).max(1.0) {
            normalize(&mut w);
            basis.push(w);
        }
    }
    let span_dim = basis.len();
    for i in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut w = vec![C64::new(0.0, 0.0); dim];
        w[i] = C64::new(1.0, 0.0);
        project_out(&mut w, &basis);
        project_out(&mut w, &basis);
        if norm(&w) > 1e-7 {
            normalize(&mut w);
            basis.push(w);
        }
    }
    basis.split_off(span_dim)
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues ascending with matching unit eigenvectors (as rows
/// of the second element). Intended for matrices no larger than the
/// antenna count; panics on non-square input.
pub(crate) fn hermitian_eigen(matrix: &[Vec<C64>]) -> (Vec<f64>, Vec<Vec<C64>>) {
    let n = matrix.len();
    assert!(matrix.iter().all(|row| row.len() == n));
    let mut a: Vec<Vec<C64>> = matrix.to_vec();
    // v holds the accumulated rotations, column j = eigenvector j.
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();

    let scale: f64 = matrix
        .iter()
        .flatten()
        .map(|x| x.norm_sqr())
        .sum::<f64>()
        .sqrt()
        .max(1.0);

    for _sweep in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                let r = apq.norm();
                if r <= 1e-18 * scale {
                    continue;
                }
                let phase = apq / r;
                let app = a[p][p].re;
                let aqq = a[q][q].re;
                // Real Jacobi angle for [[app, r], [r, aqq]].
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Unitary U: identity except U[p][p] = c, U[p][q] = s,
                // U[q][p] = -s * conj(phase), U[q][q] = c * conj(phase).
                let uqp = -s * phase.conj();
                let uqq = c * phase.conj();

                // A <- A U (columns p, q).
                for row in a.iter_mut() {
                    let aip = row[p];
                    let aiq = row[q];
                    row[p] = aip * c + aiq * uqp;
                    row[q] = aip * s + aiq * uqq;
                }
                // A <- U^H A (rows p, q); p < q by loop order.
                let (head, tail) = a.split_at_mut(q);
                for (x, y) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let apj = *x;
                    let aqj = *y;
                    *x = apj * c + aqj * uqp.conj();
                    *y = apj * s + aqj * uqq.conj();
                }
                // V <- V U.
                for row in v.iter_mut() {
                    let vip = row[p];
                    let viq = row[q];
                    row[p] = vip * c + viq * uqp;
                    row[q] = vip * s + viq * uqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].re.partial_cmp(&a[j][j].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[i][i].re).collect();
    let vectors: Vec<Vec<C64>> = order
        .iter()
        .map(|&j| (0..n).map(|i| v[i][j]).collect())
        .collect();
    (values, vectors)
}

/// Singular values (ascending) of a matrix given as rows, via the
/// eigenvalues of its Gram matrix.
pub(crate) fn singular_values(rows: &[Vec<C64>]) -> Vec<f64> {
    let m = rows.len();
    let gram: Vec<Vec<C64>> = (0..m)
        .map(|i| (0..m).map(|j| dot(&rows[j], &rows[i])).collect())
        .collect();
    let (values, _) = hermitian_eigen(&gram);
    values.into_iter().map(|l| l.max(0.0).sqrt()).collect()
}

/// Rotates a vector's global phase so its largest-magnitude entry is real
/// and positive, fixing the (physically irrelevant) phase ambiguity so
/// results are reproducible.
pub(crate) fn canonical_phase(v: &mut [C64]) {
    let lead = v
        .iter()
        .max_by(|a, b| a.norm_sqr().partial_cmp(&b.norm_sqr()).unwrap())
        .copied()
        .unwrap_or_else(|| C64::new(1.0, 0.0));
    if lead.norm() > 0.0 {
        let rot = lead.conj() / lead.norm();
        for x in v.iter_mut() {
            *x *= rot;
        }
    }
}
